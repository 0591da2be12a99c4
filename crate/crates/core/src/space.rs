//! Bounded, grid-quantized parameter domains.
//!
//! Every point the search touches lives on the lattice `lower[i] + k * grid[i]`
//! clipped to `[lower[i], upper[i]]`. Lattice values are always rebuilt from
//! their integer index, so two points that quantize to the same lattice site
//! compare bitwise equal. The tabu list relies on that.

use std::fmt;
use std::ops::Index;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Seeded random stream owned by a single run.
pub type RandomStream = ChaCha8Rng;

/// Build the run-local random stream for `seed`.
pub fn random_stream(seed: u64) -> RandomStream {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParameterVector(Vec<f64>);

impl ParameterVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Contract("parameter vector must be non-empty".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Contract(format!("parameter {i} is not finite")));
        }
        Ok(Self(values))
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    /// Exact coordinate-wise equality, including the sign of zero.
    pub fn same_site(&self, other: &ParameterVector) -> bool {
        self.0.len() == other.0.len()
            && self
                .0
                .iter()
                .zip(&other.0)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }

    // Internal constructor for values already known to be finite.
    pub(crate) fn from_raw(values: Vec<f64>) -> Self {
        debug_assert!(values.iter().all(|v| v.is_finite()));
        Self(values)
    }
}

impl Index<usize> for ParameterVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl fmt::Display for ParameterVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dimension {
    pub name: String,
    pub unit: String,
    pub lower: f64,
    pub upper: f64,
    pub grid: f64,
}

impl Dimension {
    pub fn new(name: impl Into<String>, unit: impl Into<String>, lower: f64, upper: f64, grid: f64) -> Self {
        Self {
            name: name.into(),
            unit: unit.into(),
            lower,
            upper,
            grid,
        }
    }

    fn max_index(&self) -> i64 {
        // Small slack so an upper bound sitting on the lattice is kept.
        ((self.upper - self.lower) / self.grid + 1e-9).floor() as i64
    }

    fn site(&self, index: i64) -> f64 {
        self.lower + index as f64 * self.grid
    }

    fn quantize(&self, v: f64) -> f64 {
        let r = (v - self.lower) / self.grid;
        // Nearest lattice index; an exact half rounds toward `lower`.
        let k = (r - 0.5).ceil() as i64;
        self.site(k.clamp(0, self.max_index()))
    }

    fn clamp(&self, v: f64) -> f64 {
        v.clamp(self.lower, self.upper)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchSpace {
    dims: Vec<Dimension>,
}

impl SearchSpace {
    pub fn new(dims: Vec<Dimension>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidSpace("at least one dimension is required".into()));
        }
        for d in &dims {
            if !(d.lower.is_finite() && d.upper.is_finite() && d.grid.is_finite()) {
                return Err(Error::InvalidSpace(format!("`{}` has non-finite bounds", d.name)));
            }
            if d.lower >= d.upper {
                return Err(Error::InvalidSpace(format!(
                    "`{}`: lower {} must be below upper {}",
                    d.name, d.lower, d.upper
                )));
            }
            if d.grid <= 0.0 || d.grid > d.upper - d.lower {
                return Err(Error::InvalidSpace(format!(
                    "`{}`: grid {} must lie in (0, {}]",
                    d.name,
                    d.grid,
                    d.upper - d.lower
                )));
            }
        }
        Ok(Self { dims })
    }

    /// Same bounds and grid in every one of `n` dimensions, named `x0..`.
    pub fn uniform(n: usize, lower: f64, upper: f64, grid: f64) -> Result<Self> {
        Self::new(
            (0..n)
                .map(|i| Dimension::new(format!("x{i}"), "", lower, upper, grid))
                .collect(),
        )
    }

    pub fn dimension(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[Dimension] {
        &self.dims
    }

    pub fn lower(&self) -> Vec<f64> {
        self.dims.iter().map(|d| d.lower).collect()
    }

    pub fn upper(&self) -> Vec<f64> {
        self.dims.iter().map(|d| d.upper).collect()
    }

    pub fn grid(&self) -> Vec<f64> {
        self.dims.iter().map(|d| d.grid).collect()
    }

    pub fn names(&self) -> Vec<&str> {
        self.dims.iter().map(|d| d.name.as_str()).collect()
    }

    pub fn check_dimension(&self, found: usize) -> Result<()> {
        if found != self.dims.len() {
            return Err(Error::DimensionMismatch {
                expected: self.dims.len(),
                found,
            });
        }
        Ok(())
    }

    /// Snap every coordinate to the nearest in-bounds lattice site.
    pub fn quantize(&self, p: &ParameterVector) -> Result<ParameterVector> {
        self.check_dimension(p.dimension())?;
        Ok(ParameterVector::from_raw(self.quantize_raw(p.values())))
    }

    pub fn clamp(&self, p: &ParameterVector) -> Result<ParameterVector> {
        self.check_dimension(p.dimension())?;
        Ok(ParameterVector::from_raw(
            self.dims.iter().zip(p.values()).map(|(d, &v)| d.clamp(v)).collect(),
        ))
    }

    /// `quantize(clamp(values))` for a raw coordinate slice of the right length.
    pub(crate) fn project(&self, values: &[f64]) -> ParameterVector {
        debug_assert_eq!(values.len(), self.dims.len());
        ParameterVector::from_raw(
            self.dims
                .iter()
                .zip(values)
                .map(|(d, &v)| d.quantize(d.clamp(v)))
                .collect(),
        )
    }

    fn quantize_raw(&self, values: &[f64]) -> Vec<f64> {
        self.dims.iter().zip(values).map(|(d, &v)| d.quantize(v)).collect()
    }

    pub fn contains(&self, p: &ParameterVector) -> bool {
        p.dimension() == self.dims.len()
            && self
                .dims
                .iter()
                .zip(p.values())
                .all(|(d, &v)| v >= d.lower && v <= d.upper)
    }

    /// Uniform sample over the box, quantized to the grid.
    pub fn random_point(&self, rng: &mut RandomStream) -> ParameterVector {
        let raw: Vec<f64> = self
            .dims
            .iter()
            .map(|d| rng.gen_range(d.lower..=d.upper))
            .collect();
        self.project(&raw)
    }

    /// Coordinate-wise `base ± steps` candidates, clamped and quantized.
    ///
    /// Order is `+dim0, -dim0, +dim1, -dim1, ...`. Candidates that land back
    /// on `base` are dropped.
    pub fn neighborhood(&self, base: &ParameterVector, steps: &[f64]) -> Result<Vec<ParameterVector>> {
        self.check_dimension(base.dimension())?;
        self.check_dimension(steps.len())?;
        let mut out = Vec::with_capacity(2 * self.dims.len());
        let mut scratch = base.values().to_vec();
        for (i, &step) in steps.iter().enumerate() {
            for sign in [1.0, -1.0] {
                scratch[i] = base[i] + sign * step;
                let candidate = self.project(&scratch);
                if !candidate.same_site(base) {
                    out.push(candidate);
                }
            }
            scratch[i] = base[i];
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepSchedule {
    pub initial: Vec<f64>,
    pub minimum: Vec<f64>,
    pub reduction_factor: f64,
}

impl StepSchedule {
    pub fn new(initial: Vec<f64>, minimum: Vec<f64>, reduction_factor: f64) -> Self {
        Self {
            initial,
            minimum,
            reduction_factor,
        }
    }

    /// Same initial and minimum step in every dimension, halving each cycle.
    pub fn uniform(n: usize, initial: f64, minimum: f64) -> Self {
        Self::new(vec![initial; n], vec![minimum; n], 2.0)
    }

    pub fn validate(&self, space: &SearchSpace) -> Result<()> {
        let n = space.dimension();
        if self.initial.len() != n || self.minimum.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: if self.initial.len() != n {
                    self.initial.len()
                } else {
                    self.minimum.len()
                },
            });
        }
        if !(self.reduction_factor > 1.0 && self.reduction_factor.is_finite()) {
            return Err(Error::InvalidSchedule(format!(
                "reduction factor {} must exceed 1",
                self.reduction_factor
            )));
        }
        for (i, d) in space.dims().iter().enumerate() {
            let (init, min) = (self.initial[i], self.minimum[i]);
            if !(min > 0.0 && init >= min && init.is_finite()) {
                return Err(Error::InvalidSchedule(format!(
                    "`{}`: need initial {init} >= minimum {min} > 0",
                    d.name
                )));
            }
            if min < d.grid * (1.0 - 1e-12) {
                return Err(Error::InvalidSchedule(format!(
                    "`{}`: minimum step {min} is finer than grid {}",
                    d.name, d.grid
                )));
            }
        }
        Ok(())
    }

    /// Space whose grid equals this schedule's minimum steps.
    pub fn matching_space(&self, bounds: &[(f64, f64)]) -> Result<SearchSpace> {
        SearchSpace::new(
            bounds
                .iter()
                .zip(&self.minimum)
                .enumerate()
                .map(|(i, (&(lo, hi), &g))| Dimension::new(format!("x{i}"), "", lo, hi, g))
                .collect(),
        )
    }
}
