use std::cell::Cell;

use proptest::prelude::*;
use tabu_core::tabu::{explore, run, Evaluation, Evaluator, ExploreOutcome, TabuList};
use tabu_core::{ParameterVector, SearchConfig, SearchSpace, StepSchedule, Termination};

fn bumpy(p: &ParameterVector) -> f64 {
    p.values()
        .iter()
        .enumerate()
        .map(|(i, x)| (x - i as f64).powi(2) + 3.0 * (2.0 * x).sin())
        .sum()
}

fn small_config(seed: u64, n: usize) -> SearchConfig {
    SearchConfig {
        tabu_capacity: n,
        seed,
        max_evaluations: 20_000,
        ..SearchConfig::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn accepted_points_do_not_repeat_within_tabu_window(seed in any::<u64>(), n in 2usize..12) {
        let space = SearchSpace::uniform(2, -5.0, 5.0, 0.25).unwrap();
        let schedule = StepSchedule::uniform(2, 2.0, 0.25);
        let r = run(&space, &schedule, &bumpy, &small_config(seed, n)).unwrap();
        let h = &r.accepted_history;
        for i in 0..h.len() {
            for j in i + 1..h.len().min(i + n) {
                if h[i].point.same_site(&h[j].point) {
                    let best_before = h[..j].iter().map(|e| e.value).fold(f64::INFINITY, f64::min);
                    prop_assert!(h[j].value < best_before, "repeat at {} and {}", i, j);
                }
            }
        }
    }

    #[test]
    fn best_bounds_history_and_counts_match(seed in any::<u64>()) {
        let space = SearchSpace::uniform(3, -4.0, 4.0, 0.125).unwrap();
        let schedule = StepSchedule::uniform(3, 2.0, 0.125);
        let calls = Cell::new(0u64);
        let f = |p: &ParameterVector| {
            calls.set(calls.get() + 1);
            bumpy(p)
        };
        let cfg = small_config(seed, 7);
        let r = run(&space, &schedule, &f, &cfg).unwrap();
        prop_assert_eq!(r.evaluations_used, calls.get());
        prop_assert!(r.evaluations_used <= cfg.max_evaluations);
        prop_assert!(r.accepted_history.iter().all(|e| r.best.value <= e.value));
        prop_assert_eq!(r.best.value, bumpy(&r.best.point));

        // Running minimum of the accepted points never increases and ends above the best.
        let mut running = f64::INFINITY;
        for e in &r.accepted_history {
            let next = running.min(e.value);
            prop_assert!(next <= running);
            running = next;
        }
        prop_assert!(r.best.value <= running);
    }

    #[test]
    fn step_floor_reached_after_expected_reductions(seed in any::<u64>(), factor in 1.5f64..6.0) {
        let space = SearchSpace::uniform(2, -5.0, 5.0, 0.01).unwrap();
        let mut schedule = StepSchedule::uniform(2, 3.0, 0.01);
        schedule.reduction_factor = factor;
        let r = run(&space, &schedule, &bumpy, &small_config(seed, 7)).unwrap();
        prop_assert_eq!(r.terminated_by, Termination::StepFloor);
        // Independent count of the geometric ladder.
        let mut step = 3.0;
        let mut expected = 0;
        while step >= 0.01 {
            step /= factor;
            expected += 1;
        }
        prop_assert_eq!(r.step_reductions, expected);
    }

    #[test]
    fn identical_inputs_give_identical_runs(seed in any::<u64>()) {
        let space = SearchSpace::uniform(2, -5.0, 5.0, 0.25).unwrap();
        let schedule = StepSchedule::uniform(2, 2.0, 0.25);
        let cfg = small_config(seed, 7);
        let a = run(&space, &schedule, &bumpy, &cfg).unwrap();
        let b = run(&space, &schedule, &bumpy, &cfg).unwrap();
        prop_assert_eq!(a.best, b.best);
        prop_assert_eq!(a.accepted_history, b.accepted_history);
        prop_assert_eq!(a.evaluations_used, b.evaluations_used);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn explore_matches_brute_force_argmin(
        base in proptest::collection::vec(-8i32..=8, 3),
        steps in proptest::collection::vec(1i32..=4, 3),
        centre in proptest::collection::vec(-10.0f64..10.0, 3),
        tabu_mask in proptest::collection::vec(any::<bool>(), 6),
        anchor in proptest::collection::vec(-20i32..=20, 3),
    ) {
        let space = SearchSpace::uniform(3, -10.0, 10.0, 0.5).unwrap();
        let base = ParameterVector::new(base.iter().map(|&v| v as f64 * 0.5).collect()).unwrap();
        let steps: Vec<f64> = steps.iter().map(|&s| s as f64 * 0.5).collect();
        let f = |p: &ParameterVector| -> f64 {
            p.values().iter().zip(&centre).map(|(x, c)| (x - c).powi(2)).sum()
        };

        // Brute force: every coordinate move, clamped to the box, minus the base itself.
        let mut raw = Vec::new();
        for d in 0..3 {
            for sign in [1.0, -1.0] {
                let mut v = base.values().to_vec();
                v[d] = (v[d] + sign * steps[d]).clamp(-10.0, 10.0);
                if v != base.values() {
                    raw.push(v);
                }
            }
        }
        let mut tabu = TabuList::new(6);
        for (v, &mark) in raw.iter().zip(&tabu_mask) {
            if mark {
                let p = ParameterVector::new(v.clone()).unwrap();
                let value = f(&p);
                tabu.record(Evaluation::new(p, value));
            }
        }

        let calls = Cell::new(0u64);
        let counted = |p: &ParameterVector| {
            calls.set(calls.get() + 1);
            f(p)
        };
        let mut ev = Evaluator::new(&counted, 1_000, 4);
        let anchor = ParameterVector::new(anchor.iter().map(|&v| v as f64 * 0.5).collect()).unwrap();
        let best_so_far = ev.evaluate(anchor).unwrap().value;
        let base_eval = Evaluation::new(base.clone(), f(&base));

        let mut admissible: Vec<(Vec<f64>, f64)> = Vec::new();
        let mut untabu = 0;
        for v in &raw {
            let p = ParameterVector::new(v.clone()).unwrap();
            let value = f(&p);
            let is_tabu = tabu.is_tabu(&p);
            untabu += usize::from(!is_tabu);
            if !is_tabu || value < best_so_far {
                admissible.push((v.clone(), value));
            }
        }

        calls.set(0);
        let out = explore(&base_eval, &steps, &space, &mut ev, &tabu).unwrap();
        prop_assert_eq!(calls.get() as usize, untabu);
        match out {
            ExploreOutcome::Move(e) => {
                let min = admissible.iter().map(|a| a.1).fold(f64::INFINITY, f64::min);
                prop_assert_eq!(e.value, min);
                let first = admissible.iter().find(|a| a.1 == min).unwrap();
                prop_assert_eq!(e.point.values(), &first.0[..]);
            }
            ExploreOutcome::NeighborhoodExhausted => prop_assert!(admissible.is_empty()),
            ExploreOutcome::BudgetExhausted => prop_assert!(false, "budget is ample"),
        }
    }
}
