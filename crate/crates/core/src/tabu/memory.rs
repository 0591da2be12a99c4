use std::collections::VecDeque;

use crate::space::{ParameterVector, SearchSpace};

/// A point together with its objective value.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub point: ParameterVector,
    /// Objective value; non-finite objective outputs are stored as `+inf`.
    pub value: f64,
}

impl Evaluation {
    pub fn new(point: ParameterVector, value: f64) -> Self {
        let value = if value.is_finite() { value } else { f64::INFINITY };
        Self { point, value }
    }
}

/// Short-term memory: the last `n` accepted points, first in first out.
///
/// Entries keep the value they were accepted with, so a tabu candidate can be
/// checked for aspiration without calling the objective again.
#[derive(Clone, Debug)]
pub struct TabuList {
    capacity: usize,
    entries: VecDeque<Evaluation>,
}

impl TabuList {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity >= 1, "tabu list capacity must be positive");
        Self {
            capacity,
            entries: VecDeque::with_capacity(capacity),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Oldest first.
    pub fn entries(&self) -> impl Iterator<Item = &Evaluation> {
        self.entries.iter()
    }

    pub fn is_tabu(&self, candidate: &ParameterVector) -> bool {
        self.lookup(candidate).is_some()
    }

    /// Value recorded for `candidate`, if it is tabu.
    pub fn lookup(&self, candidate: &ParameterVector) -> Option<f64> {
        self.entries
            .iter()
            .rev()
            .find(|e| e.point.same_site(candidate))
            .map(|e| e.value)
    }

    pub fn record(&mut self, accepted: Evaluation) {
        if self.entries.len() == self.capacity {
            self.entries.pop_front();
        }
        self.entries.push_back(accepted);
    }
}

/// Intermediate memory: the last `m` best-so-far solutions in insertion order.
#[derive(Clone, Debug)]
pub struct IntermediateMemory {
    capacity: usize,
    entries: VecDeque<Evaluation>,
}

impl IntermediateMemory {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity >= 1, "intermediate memory capacity must be positive");
        Self {
            capacity,
            entries: VecDeque::with_capacity(capacity),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = &Evaluation> {
        self.entries.iter()
    }

    /// Store a new best-so-far. Entries that do not strictly improve on the
    /// latest one are ignored.
    pub fn insert_best(&mut self, e: Evaluation) -> bool {
        if let Some(last) = self.entries.back() {
            if e.value >= last.value {
                return false;
            }
        }
        if self.entries.len() == self.capacity {
            self.entries.pop_front();
        }
        self.entries.push_back(e);
        true
    }

    /// Coordinate-wise mean of the stored points, projected onto the lattice.
    pub fn centroid(&self, space: &SearchSpace) -> Option<ParameterVector> {
        let first = self.entries.front()?;
        let n = first.point.dimension();
        let mut sum = vec![0.0; n];
        for e in &self.entries {
            for (s, v) in sum.iter_mut().zip(e.point.values()) {
                *s += v;
            }
        }
        let count = self.entries.len() as f64;
        sum.iter_mut().for_each(|s| *s /= count);
        Some(space.project(&sum))
    }
}
