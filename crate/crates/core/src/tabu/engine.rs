use crate::error::{Error, Result};
use crate::space::{random_stream, ParameterVector, RandomStream, SearchSpace, StepSchedule};

use super::memory::{Evaluation, IntermediateMemory, TabuList};

/// Scalar cost over a parameter vector. Lower is better.
pub trait Objective {
    fn evaluate(&self, point: &ParameterVector) -> f64;
}

impl<F> Objective for F
where
    F: Fn(&ParameterVector) -> f64,
{
    fn evaluate(&self, point: &ParameterVector) -> f64 {
        self(point)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    /// Tabu list capacity.
    pub tabu_capacity: usize,
    /// Intermediate memory capacity.
    pub memory_capacity: usize,
    pub intensify_at: usize,
    pub diversify_at: usize,
    pub end_of_cycle: usize,
    pub pattern_factor: f64,
    /// Move the base back to the best point after each step reduction.
    pub restart_from_best: bool,
    pub max_evaluations: u64,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            tabu_capacity: 7,
            memory_capacity: 4,
            intensify_at: 10,
            diversify_at: 15,
            end_of_cycle: 25,
            pattern_factor: 2.0,
            restart_from_best: true,
            max_evaluations: 200_000,
            seed: 0,
        }
    }
}

impl SearchConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.tabu_capacity == 0 {
            return Err(Error::InvalidConfig("tabu list capacity n must be >= 1".into()));
        }
        if self.memory_capacity == 0 {
            return Err(Error::InvalidConfig("intermediate memory capacity m must be >= 1".into()));
        }
        if !(0 < self.intensify_at
            && self.intensify_at < self.diversify_at
            && self.diversify_at < self.end_of_cycle)
        {
            return Err(Error::InvalidConfig(format!(
                "need 0 < intense ({}) < diverse ({}) < end_of_cycle ({})",
                self.intensify_at, self.diversify_at, self.end_of_cycle
            )));
        }
        if !(self.pattern_factor > 1.0 && self.pattern_factor.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "pattern factor {} must exceed 1",
                self.pattern_factor
            )));
        }
        if self.max_evaluations == 0 {
            return Err(Error::InvalidConfig("evaluation budget must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    /// A step size dropped below its minimum.
    StepFloor,
    /// The evaluation budget ran out.
    Budget,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::StepFloor => "step_floor",
            Termination::Budget => "budget",
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub best: Evaluation,
    pub evaluations_used: u64,
    /// Every accepted base point, in order, starting with the initial point.
    pub accepted_history: Vec<Evaluation>,
    pub terminated_by: Termination,
    /// Objective calls that returned NaN or infinity.
    pub non_finite_evaluations: u64,
    /// Number of step reductions performed.
    pub step_reductions: u32,
}

/// Counts calls, enforces the budget and tracks the best value seen.
pub struct Evaluator<'a, O: ?Sized> {
    objective: &'a O,
    budget: u64,
    used: u64,
    non_finite: u64,
    best: Option<Evaluation>,
    improvements: u64,
    memory: IntermediateMemory,
}

impl<'a, O: Objective + ?Sized> Evaluator<'a, O> {
    pub fn new(objective: &'a O, budget: u64, memory_capacity: usize) -> Self {
        Self {
            objective,
            budget,
            used: 0,
            non_finite: 0,
            best: None,
            improvements: 0,
            memory: IntermediateMemory::new(memory_capacity),
        }
    }

    /// `None` once the budget is spent.
    pub fn evaluate(&mut self, point: ParameterVector) -> Option<Evaluation> {
        if self.used >= self.budget {
            return None;
        }
        self.used += 1;
        let raw = self.objective.evaluate(&point);
        if !raw.is_finite() {
            self.non_finite += 1;
        }
        let e = Evaluation::new(point, raw);
        if e.value.is_finite() && aspiration_override(e.value, self.best_value()) {
            self.best = Some(e.clone());
            self.improvements += 1;
            self.memory.insert_best(e.clone());
        }
        Some(e)
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn exhausted(&self) -> bool {
        self.used >= self.budget
    }

    /// Best value so far, `+inf` before any finite evaluation.
    pub fn best_value(&self) -> f64 {
        self.best.as_ref().map_or(f64::INFINITY, |b| b.value)
    }

    pub fn best(&self) -> Option<&Evaluation> {
        self.best.as_ref()
    }

    pub fn memory(&self) -> &IntermediateMemory {
        &self.memory
    }

    fn improvements(&self) -> u64 {
        self.improvements
    }
}

/// Tabu status may be overridden only by a strict improvement on the best so far.
pub fn aspiration_override(candidate_value: f64, best_so_far: f64) -> bool {
    candidate_value < best_so_far
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExploreOutcome {
    Move(Evaluation),
    /// Every candidate was tabu and none aspirated.
    NeighborhoodExhausted,
    /// The budget ran out before any admissible candidate was evaluated.
    BudgetExhausted,
}

/// Best admissible coordinate move around `base`, even when it is worse than `base`.
///
/// Tabu candidates are never passed to the objective; their recorded value is
/// used for the aspiration test instead.
pub fn explore<O: Objective + ?Sized>(
    base: &Evaluation,
    steps: &[f64],
    space: &SearchSpace,
    evaluator: &mut Evaluator<'_, O>,
    tabu: &TabuList,
) -> Result<ExploreOutcome> {
    let candidates = space.neighborhood(&base.point, steps)?;
    let best_so_far = evaluator.best_value();
    let mut chosen: Option<Evaluation> = None;
    let mut budget_hit = false;
    for candidate in candidates {
        let scored = match tabu.lookup(&candidate) {
            Some(recorded) => {
                if !aspiration_override(recorded, best_so_far) {
                    continue;
                }
                Evaluation::new(candidate, recorded)
            }
            None => match evaluator.evaluate(candidate) {
                Some(e) => e,
                None => {
                    budget_hit = true;
                    break;
                }
            },
        };
        // Strict comparison keeps the first of equal candidates.
        if chosen.as_ref().is_none_or(|c| scored.value < c.value) {
            chosen = Some(scored);
        }
    }
    Ok(match chosen {
        Some(e) => ExploreOutcome::Move(e),
        None if budget_hit => ExploreOutcome::BudgetExhausted,
        None => ExploreOutcome::NeighborhoodExhausted,
    })
}

/// Extrapolate from `old_base` through `new_base` by `pattern_factor`.
///
/// Returns the pattern point if it beats `new_base`, otherwise `new_base`.
pub fn pattern_move<O: Objective + ?Sized>(
    old_base: &Evaluation,
    new_base: &Evaluation,
    pattern_factor: f64,
    space: &SearchSpace,
    evaluator: &mut Evaluator<'_, O>,
    tabu: &TabuList,
) -> Evaluation {
    let raw: Vec<f64> = old_base
        .point
        .values()
        .iter()
        .zip(new_base.point.values())
        .map(|(o, n)| o + pattern_factor * (n - o))
        .collect();
    let candidate = space.project(&raw);
    if candidate.same_site(&new_base.point) || candidate.same_site(&old_base.point) {
        return new_base.clone();
    }
    let scored = match tabu.lookup(&candidate) {
        Some(recorded) if aspiration_override(recorded, evaluator.best_value()) => {
            Evaluation::new(candidate, recorded)
        }
        Some(_) => return new_base.clone(),
        None => match evaluator.evaluate(candidate) {
            Some(e) => e,
            None => return new_base.clone(),
        },
    };
    if scored.value < new_base.value {
        scored
    } else {
        new_base.clone()
    }
}

/// Centroid of the intermediate memory, or `None` when it is empty.
pub fn intensify(memory: &IntermediateMemory, space: &SearchSpace) -> Option<ParameterVector> {
    memory.centroid(space)
}

/// Random refresh point.
pub fn diversify(space: &SearchSpace, rng: &mut RandomStream) -> ParameterVector {
    space.random_point(rng)
}

/// Run a search from a random start drawn from the seeded stream.
pub fn run<O: Objective + ?Sized>(
    space: &SearchSpace,
    schedule: &StepSchedule,
    objective: &O,
    config: &SearchConfig,
) -> Result<RunResult> {
    let mut rng = random_stream(config.seed);
    let start = space.random_point(&mut rng);
    Search::new(space, schedule, objective, config, rng)?.execute(start)
}

/// Run a search from an explicit start point. Random refreshes still use the seed.
pub fn run_from<O: Objective + ?Sized>(
    start: &ParameterVector,
    space: &SearchSpace,
    schedule: &StepSchedule,
    objective: &O,
    config: &SearchConfig,
) -> Result<RunResult> {
    let rng = random_stream(config.seed);
    let start = space.quantize(&space.clamp(start)?)?;
    Search::new(space, schedule, objective, config, rng)?.execute(start)
}

struct Search<'a, O: ?Sized> {
    space: &'a SearchSpace,
    schedule: &'a StepSchedule,
    config: &'a SearchConfig,
    evaluator: Evaluator<'a, O>,
    tabu: TabuList,
    rng: RandomStream,
    steps: Vec<f64>,
    history: Vec<Evaluation>,
    base: Option<Evaluation>,
}

// Control flow signal: the budget ran out.
struct OutOfBudget;

impl<'a, O: Objective + ?Sized> Search<'a, O> {
    fn new(
        space: &'a SearchSpace,
        schedule: &'a StepSchedule,
        objective: &'a O,
        config: &'a SearchConfig,
        rng: RandomStream,
    ) -> Result<Self> {
        config.validate()?;
        schedule.validate(space)?;
        Ok(Self {
            space,
            schedule,
            config,
            evaluator: Evaluator::new(objective, config.max_evaluations, config.memory_capacity),
            tabu: TabuList::new(config.tabu_capacity),
            rng,
            steps: schedule.initial.clone(),
            history: Vec::new(),
            base: None,
        })
    }

    fn execute(mut self, start: ParameterVector) -> Result<RunResult> {
        let mut reductions = 0;
        let terminated_by = match self.control_loop(start, &mut reductions) {
            Ok(()) => Termination::StepFloor,
            Err(OutOfBudget) => Termination::Budget,
        };
        let best = match self.evaluator.best() {
            Some(b) => b.clone(),
            // Only possible when every evaluation was non-finite.
            None => self
                .history
                .first()
                .cloned()
                .ok_or_else(|| Error::Contract("search made no evaluations".into()))?,
        };
        Ok(RunResult {
            best,
            evaluations_used: self.evaluator.used(),
            accepted_history: self.history,
            terminated_by,
            non_finite_evaluations: self.evaluator.non_finite,
            step_reductions: reductions,
        })
    }

    fn control_loop(&mut self, start: ParameterVector, reductions: &mut u32) -> Result<(), OutOfBudget> {
        let first = self.evaluator.evaluate(start).ok_or(OutOfBudget)?;
        self.accept(first);
        let cfg = self.config;
        loop {
            let mut control = 0;
            while control < cfg.end_of_cycle {
                let before = self.evaluator.improvements();
                if control == cfg.intensify_at {
                    self.intensify()?;
                }
                if control == cfg.diversify_at {
                    self.diversify()?;
                }
                self.search_step()?;
                if self.evaluator.improvements() > before {
                    control = 0;
                } else {
                    control += 1;
                }
            }
            for s in &mut self.steps {
                *s /= self.schedule.reduction_factor;
            }
            *reductions += 1;
            if self
                .steps
                .iter()
                .zip(&self.schedule.minimum)
                .any(|(s, min)| s < min)
            {
                return Ok(());
            }
            if cfg.restart_from_best {
                self.restart_from_best();
            }
        }
    }

    fn accept(&mut self, e: Evaluation) {
        self.tabu.record(e.clone());
        self.history.push(e.clone());
        self.base = Some(e);
    }

    /// The best point is already evaluated, so this costs no objective call.
    /// It is only recorded as tabu again if it has left the list.
    fn restart_from_best(&mut self) {
        if let Some(best) = self.evaluator.best().cloned() {
            if self.tabu.is_tabu(&best.point) {
                self.base = Some(best);
            } else {
                self.accept(best);
            }
        }
    }

    fn base(&self) -> &Evaluation {
        self.base.as_ref().expect("base is set by the first evaluation")
    }

    fn search_step(&mut self) -> Result<(), OutOfBudget> {
        let base = self.base().clone();
        let outcome = explore(&base, &self.steps, self.space, &mut self.evaluator, &self.tabu)
            .expect("steps and base share the space's dimension");
        match outcome {
            ExploreOutcome::Move(moved) => {
                // Extrapolate only along a move that improved on the base.
                let accepted = if moved.value < base.value {
                    pattern_move(
                        &base,
                        &moved,
                        self.config.pattern_factor,
                        self.space,
                        &mut self.evaluator,
                        &self.tabu,
                    )
                } else {
                    moved
                };
                self.accept(accepted);
                if self.evaluator.exhausted() {
                    return Err(OutOfBudget);
                }
                Ok(())
            }
            ExploreOutcome::NeighborhoodExhausted => self.diversify(),
            ExploreOutcome::BudgetExhausted => Err(OutOfBudget),
        }
    }

    fn intensify(&mut self) -> Result<(), OutOfBudget> {
        let Some(centre) = intensify(self.evaluator.memory(), self.space) else {
            return Ok(());
        };
        if self.tabu.is_tabu(&centre) {
            return Ok(());
        }
        let e = self.evaluator.evaluate(centre).ok_or(OutOfBudget)?;
        self.accept(e);
        Ok(())
    }

    fn diversify(&mut self) -> Result<(), OutOfBudget> {
        // A handful of redraws; on a tiny lattice every site may be tabu.
        for _ in 0..16 {
            let p = diversify(self.space, &mut self.rng);
            if !self.tabu.is_tabu(&p) {
                let e = self.evaluator.evaluate(p).ok_or(OutOfBudget)?;
                self.accept(e);
                return Ok(());
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cell::Cell;

    fn pv(v: &[f64]) -> ParameterVector {
        ParameterVector::new(v.to_vec()).unwrap()
    }

    fn square(p: &ParameterVector) -> f64 {
        p.values().iter().map(|x| x * x).sum()
    }

    #[test]
    fn aspiration_needs_strict_improvement() {
        assert!(aspiration_override(-2.1, -2.0));
        assert!(!aspiration_override(-2.0, -2.0));
        assert!(!aspiration_override(-1.9, -2.0));
    }

    #[test]
    fn config_validation() {
        assert!(SearchConfig::default().validate().is_ok());
        let bad = SearchConfig {
            intensify_at: 15,
            ..SearchConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = SearchConfig {
            pattern_factor: 1.0,
            ..SearchConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = SearchConfig {
            tabu_capacity: 0,
            ..SearchConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn explore_picks_improving_candidate() {
        let space = SearchSpace::uniform(1, -10.0, 10.0, 0.5).unwrap();
        let f = |p: &ParameterVector| (p[0] - 3.0).powi(2);
        let mut ev = Evaluator::new(&f, 100, 4);
        let base = ev.evaluate(pv(&[2.0])).unwrap();
        let tabu = TabuList::new(3);
        let out = explore(&base, &[1.0], &space, &mut ev, &tabu).unwrap();
        assert_eq!(out, ExploreOutcome::Move(Evaluation::new(pv(&[3.0]), 0.0)));
    }

    #[test]
    fn explore_takes_smallest_increase_when_stuck() {
        let space = SearchSpace::uniform(1, -10.0, 10.0, 0.5).unwrap();
        let f = |p: &ParameterVector| if p[0] < 0.0 { -3.0 * p[0] } else { p[0] };
        let mut ev = Evaluator::new(&f, 100, 4);
        let base = ev.evaluate(pv(&[0.0])).unwrap();
        let out = explore(&base, &[1.0], &space, &mut ev, &TabuList::new(3)).unwrap();
        assert_eq!(out, ExploreOutcome::Move(Evaluation::new(pv(&[1.0]), 1.0)));
    }

    #[test]
    fn explore_skips_tabu_without_evaluating() {
        let space = SearchSpace::uniform(1, -10.0, 10.0, 0.5).unwrap();
        let calls = Cell::new(0);
        let f = |p: &ParameterVector| {
            calls.set(calls.get() + 1);
            p[0].abs()
        };
        let mut ev = Evaluator::new(&f, 100, 4);
        let base = ev.evaluate(pv(&[2.0])).unwrap();
        let mut tabu = TabuList::new(3);
        // Best raw candidate (1.0) is tabu and does not beat best so far (2.0 -> value 2).
        tabu.record(Evaluation::new(pv(&[1.0]), 1.0));
        let before = calls.get();
        let out = explore(&base, &[1.0], &space, &mut ev, &tabu).unwrap();
        assert_eq!(calls.get() - before, 1);
        // 1.0 recorded with value 1.0 < best 2.0, so it aspirates.
        assert_eq!(out, ExploreOutcome::Move(Evaluation::new(pv(&[1.0]), 1.0)));

        // Once the best is already 1.0 the tabu entry cannot aspirate.
        let mut ev = Evaluator::new(&f, 100, 4);
        ev.evaluate(pv(&[1.0])).unwrap();
        let base = ev.evaluate(pv(&[2.0])).unwrap();
        let out = explore(&base, &[1.0], &space, &mut ev, &tabu).unwrap();
        assert_eq!(out, ExploreOutcome::Move(Evaluation::new(pv(&[3.0]), 3.0)));
    }

    #[test]
    fn explore_reports_exhausted_neighborhood() {
        let space = SearchSpace::uniform(1, -10.0, 10.0, 0.5).unwrap();
        let mut ev = Evaluator::new(&square, 100, 4);
        ev.evaluate(pv(&[0.0])).unwrap();
        let base = ev.evaluate(pv(&[2.0])).unwrap();
        let mut tabu = TabuList::new(3);
        tabu.record(Evaluation::new(pv(&[1.0]), 1.0));
        tabu.record(Evaluation::new(pv(&[3.0]), 9.0));
        let out = explore(&base, &[1.0], &space, &mut ev, &tabu).unwrap();
        assert_eq!(out, ExploreOutcome::NeighborhoodExhausted);
    }

    #[test]
    fn pattern_move_examples() {
        let space = SearchSpace::uniform(1, -10.0, 10.0, 0.5).unwrap();
        let tabu = TabuList::new(3);
        let mut ev = Evaluator::new(&square, 100, 4);
        let old = ev.evaluate(pv(&[4.0])).unwrap();
        let new = ev.evaluate(pv(&[2.0])).unwrap();
        let got = pattern_move(&old, &new, 2.0, &space, &mut ev, &tabu);
        assert_eq!(got, Evaluation::new(pv(&[0.0]), 0.0));

        // Pattern point clamps onto new base.
        let old = ev.evaluate(pv(&[9.0])).unwrap();
        let new = ev.evaluate(pv(&[10.0])).unwrap();
        let used = ev.used();
        assert_eq!(pattern_move(&old, &new, 2.0, &space, &mut ev, &tabu), new);
        assert_eq!(ev.used(), used);

        // Pattern point worse than new base.
        let old = ev.evaluate(pv(&[1.0])).unwrap();
        let new = ev.evaluate(pv(&[-0.5])).unwrap();
        assert_eq!(pattern_move(&old, &new, 2.0, &space, &mut ev, &tabu), new);
    }

    #[test]
    fn evaluator_enforces_budget() {
        let mut ev = Evaluator::new(&square, 2, 4);
        assert!(ev.evaluate(pv(&[1.0])).is_some());
        assert!(ev.evaluate(pv(&[2.0])).is_some());
        assert!(ev.evaluate(pv(&[3.0])).is_none());
        assert_eq!(ev.used(), 2);
    }

    #[test]
    fn convex_run_reaches_minimum() {
        let space = SearchSpace::uniform(1, -10.0, 10.0, 0.5).unwrap();
        let schedule = StepSchedule::uniform(1, 4.0, 0.5);
        let r = run_from(&pv(&[8.0]), &space, &schedule, &square, &SearchConfig::default()).unwrap();
        assert_eq!(r.best.value, 0.0);
        assert_eq!(r.best.point[0], 0.0);
        assert_eq!(r.terminated_by, Termination::StepFloor);
        // 4 -> 2 -> 1 -> 0.5 -> 0.25 (< 0.5 stops)
        assert_eq!(r.step_reductions, 4);
    }

    #[test]
    fn non_finite_values_never_become_best() {
        let space = SearchSpace::uniform(1, -10.0, 10.0, 0.5).unwrap();
        let schedule = StepSchedule::uniform(1, 4.0, 0.5);
        let f = |p: &ParameterVector| if p[0] < 0.0 { f64::NAN } else { p[0] };
        let r = run_from(&pv(&[8.0]), &space, &schedule, &f, &SearchConfig::default()).unwrap();
        assert_eq!(r.best.value, 0.0);
        assert!(r.non_finite_evaluations > 0);
        assert!(r.accepted_history.iter().all(|e| !e.value.is_nan()));
    }

    #[test]
    fn budget_termination() {
        let space = SearchSpace::uniform(2, -10.0, 10.0, 0.01).unwrap();
        let schedule = StepSchedule::uniform(2, 4.0, 0.01);
        let cfg = SearchConfig {
            max_evaluations: 37,
            ..SearchConfig::default()
        };
        let calls = Cell::new(0u64);
        let f = |p: &ParameterVector| {
            calls.set(calls.get() + 1);
            square(p)
        };
        let r = run(&space, &schedule, &f, &cfg).unwrap();
        assert_eq!(r.terminated_by, Termination::Budget);
        assert_eq!(r.evaluations_used, 37);
        assert_eq!(calls.get(), 37);
    }
}
