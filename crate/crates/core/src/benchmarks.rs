//! Rastrigin (two variables) and Schwefel (ten variables) test functions.

use crate::error::Result;
use crate::space::{ParameterVector, SearchSpace, StepSchedule};
use crate::tabu::SearchConfig;

/// Location of each coordinate of the Schwefel minimum.
pub const SCHWEFEL_OPTIMUM_COORD: f64 = 420.9687;
pub const SCHWEFEL_DIMENSION: usize = 10;

/// `x² + y² − cos(18x) − cos(18y)`, minimum −2 at the origin.
pub fn rastrigin(x: f64, y: f64) -> f64 {
    x * x + y * y - (18.0 * x).cos() - (18.0 * y).cos()
}

/// `−Σ xᵢ sin(√|xᵢ|)`, minimised at `xᵢ = 420.9687`.
///
/// The sum is negated so the known optimum is a minimum.
pub fn schwefel(x: &[f64]) -> f64 {
    -x.iter().map(|&xi| xi * xi.abs().sqrt().sin()).sum::<f64>()
}

/// Benchmark bundle: evaluator, search box, step schedule and known optimum.
#[derive(Clone, Debug)]
pub struct BenchmarkSpec {
    pub name: &'static str,
    pub space: SearchSpace,
    pub schedule: StepSchedule,
    /// Memory and control settings used for this benchmark unless overridden.
    pub search: SearchConfig,
    pub optimum_point: ParameterVector,
    pub optimum_value: f64,
    evaluator: fn(&ParameterVector) -> f64,
}

impl BenchmarkSpec {
    pub fn evaluate(&self, p: &ParameterVector) -> f64 {
        (self.evaluator)(p)
    }

    pub fn evaluator(&self) -> fn(&ParameterVector) -> f64 {
        self.evaluator
    }

    /// Two-variable Rastrigin on [−1, 1]², steps 0.5 down to 1e−4.
    pub fn rastrigin() -> Result<Self> {
        let schedule = StepSchedule::uniform(2, 0.5, 1e-4);
        let mut space = schedule.matching_space(&[(-1.0, 1.0); 2])?;
        space = rename(space, &["x", "y"]);
        Ok(Self {
            name: "rastrigin",
            space,
            schedule,
            search: SearchConfig::default(),
            optimum_point: ParameterVector::new(vec![0.0, 0.0])?,
            optimum_value: -2.0,
            evaluator: |p| rastrigin(p[0], p[1]),
        })
    }

    /// Ten-variable Schwefel on [−500, 500]¹⁰, steps 100 down to 0.01.
    ///
    /// Basins are fixed during the coarsest cycle, so that cycle gets a long
    /// tabu walk and the finer ones are passed through quickly (factor 10).
    /// A pattern factor of 3 turns a 100-wide return move into a jump of one
    /// basin spacing.
    pub fn schwefel() -> Result<Self> {
        let mut schedule = StepSchedule::uniform(SCHWEFEL_DIMENSION, 100.0, 0.01);
        schedule.reduction_factor = 10.0;
        let search = SearchConfig {
            tabu_capacity: 200,
            memory_capacity: 4,
            intensify_at: 248,
            diversify_at: 249,
            end_of_cycle: 250,
            pattern_factor: 3.0,
            ..SearchConfig::default()
        };
        let space = schedule.matching_space(&[(-500.0, 500.0); SCHWEFEL_DIMENSION])?;
        let optimum_point = ParameterVector::new(vec![SCHWEFEL_OPTIMUM_COORD; SCHWEFEL_DIMENSION])?;
        let optimum_value = schwefel(optimum_point.values());
        Ok(Self {
            name: "schwefel",
            space,
            schedule,
            search,
            optimum_point,
            optimum_value,
            evaluator: |p| schwefel(p.values()),
        })
    }
}

fn rename(space: SearchSpace, names: &[&str]) -> SearchSpace {
    let dims = space
        .dims()
        .iter()
        .zip(names)
        .map(|(d, n)| crate::space::Dimension { name: (*n).to_string(), ..d.clone() })
        .collect();
    SearchSpace::new(dims).expect("renaming keeps a valid space")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rastrigin_values() {
        assert_eq!(rastrigin(0.0, 0.0), -2.0);
        let c18 = 18f64.cos();
        assert!((c18 - 0.66031).abs() < 1e-5);
        assert!((rastrigin(1.0, 1.0) - (2.0 - 2.0 * c18)).abs() < 1e-15);
        assert!((rastrigin(0.5, -0.5) - (0.5 - 2.0 * 9f64.cos())).abs() < 1e-15);
    }

    #[test]
    fn schwefel_values() {
        assert_eq!(schwefel(&[0.0; 10]), 0.0);
        let term = 420.9687 * 420.9687f64.sqrt().sin();
        let all = schwefel(&[SCHWEFEL_OPTIMUM_COORD; 10]);
        assert!((all + 10.0 * term).abs() < 1e-9);
        assert!((all + 4189.829).abs() < 1e-3);
        let mut one = [0.0; 10];
        one[0] = SCHWEFEL_OPTIMUM_COORD;
        assert!((schwefel(&one) + 418.9829).abs() < 1e-4);
    }

    #[test]
    fn specs_reproduce_known_optima() {
        for b in [BenchmarkSpec::rastrigin().unwrap(), BenchmarkSpec::schwefel().unwrap()] {
            assert!((b.evaluate(&b.optimum_point) - b.optimum_value).abs() < 1e-12);
            assert!(b.schedule.validate(&b.space).is_ok());
            assert!(b.search.validate().is_ok());
        }
    }

    #[test]
    fn rastrigin_grid_scan_finds_origin() {
        let mut best = (f64::INFINITY, 0.0, 0.0);
        for i in 0..=200 {
            for j in 0..=200 {
                let (x, y) = (-1.0 + i as f64 * 0.01, -1.0 + j as f64 * 0.01);
                let v = rastrigin(x, y);
                if v < best.0 {
                    best = (v, x, y);
                }
            }
        }
        assert!(best.1.abs() < 1e-9 && best.2.abs() < 1e-9);
        assert_eq!(best.0, -2.0);
    }

    #[test]
    fn schwefel_term_scan_finds_optimum_coordinate() {
        let mut best = (f64::INFINITY, 0.0);
        for k in 0..=10_000 {
            let x = -500.0 + k as f64 * 0.1;
            let v = schwefel(&[x]);
            if v < best.0 {
                best = (v, x);
            }
        }
        assert!((best.1 - SCHWEFEL_OPTIMUM_COORD).abs() <= 0.1, "{best:?}");
    }

    proptest! {
        #[test]
        fn rastrigin_symmetries(x in -1.0f64..1.0, y in -1.0f64..1.0) {
            let v = rastrigin(x, y);
            prop_assert_eq!(v, rastrigin(-x, -y));
            prop_assert!((v - rastrigin(y, x)).abs() <= 1e-15);
        }

        #[test]
        fn schwefel_permutation_invariant(
            x in proptest::collection::vec(-500.0f64..500.0, 10),
            rot in 0usize..10,
        ) {
            let mut y = x.clone();
            y.rotate_left(rot);
            y.reverse();
            prop_assert!((schwefel(&x) - schwefel(&y)).abs() < 1e-9);
        }
    }
}
