use crate::error::{Error, Result};

/// Piecewise-linear desired actuator position, with the interval at which it is scored.
#[derive(Clone, Debug, PartialEq)]
pub struct DesiredProfile {
    /// (time s, position m), strictly increasing in time.
    points: Vec<(f64, f64)>,
    /// s
    pub sample_interval: f64,
}

impl DesiredProfile {
    pub fn new(points: Vec<(f64, f64)>, sample_interval: f64) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Validation("a profile needs at least two points".into()));
        }
        if points[0].0 != 0.0 {
            return Err(Error::Validation("a profile must start at t = 0".into()));
        }
        for w in points.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::Validation(format!("profile times must increase: {} then {}", w[0].0, w[1].0)));
            }
        }
        if points.iter().any(|&(t, x)| !t.is_finite() || !x.is_finite() || x < 0.0) {
            return Err(Error::Validation("profile positions must be finite and non-negative".into()));
        }
        if !(sample_interval > 0.0 && sample_interval.is_finite()) {
            return Err(Error::Validation(format!("sample interval {sample_interval} must be positive")));
        }
        Ok(Self { points, sample_interval })
    }

    /// Extend to 0.45 m over 2 s, hold to 2.5 s, retract by 4.5 s, hold to 5 s; scored every 0.1 s.
    pub fn default_trapezoid() -> Self {
        Self::new(vec![(0.0, 0.0), (2.0, 0.45), (2.5, 0.45), (4.5, 0.0), (5.0, 0.0)], 0.1)
            .expect("built-in profile is valid")
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn end_time(&self) -> f64 {
        self.points[self.points.len() - 1].0
    }

    pub fn max_position(&self) -> f64 {
        self.points.iter().map(|p| p.1).fold(0.0, f64::max)
    }

    pub fn covers(&self, duration: f64) -> bool {
        self.end_time() >= duration
    }

    /// Linear interpolation, held constant past the last point.
    pub fn at(&self, t: f64) -> f64 {
        let i = self.points.partition_point(|p| p.0 <= t);
        if i == 0 {
            return self.points[0].1;
        }
        if i == self.points.len() {
            return self.points[i - 1].1;
        }
        let (t0, x0) = self.points[i - 1];
        let (t1, x1) = self.points[i];
        x0 + (x1 - x0) * (t - t0) / (t1 - t0)
    }

    /// Scoring instants `0, Δ, 2Δ, …` up to and including `duration`.
    pub fn sample_times(&self, duration: f64) -> Vec<f64> {
        let n = (duration / self.sample_interval + 1e-9).floor() as usize;
        (0..=n).map(|i| i as f64 * self.sample_interval).collect()
    }
}
