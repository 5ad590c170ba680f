//! Belief states over the union of all expert states.

use std::sync::Arc;

use crate::experts::ExpertFsm;
use crate::Error;

/// Position of one FSM state inside the flattened model state space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StateRef {
    pub expert: usize,
    pub state: usize,
}

/// The ordered union of every expert's states, with expert boundaries.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpace {
    entries: Vec<StateRef>,
    labels: Vec<String>,
    expert_names: Vec<String>,
    expert_ranges: Vec<(usize, usize)>,
    start_indices: Vec<usize>,
}

impl StateSpace {
    pub fn from_roster(roster: &[ExpertFsm]) -> Arc<StateSpace> {
        let mut entries = Vec::new();
        let mut labels = Vec::new();
        let mut expert_names = Vec::new();
        let mut expert_ranges = Vec::new();
        let mut start_indices = Vec::new();
        for (e, expert) in roster.iter().enumerate() {
            let begin = entries.len();
            start_indices.push(begin + expert.start);
            for s in 0..expert.state_count() {
                entries.push(StateRef { expert: e, state: s });
                labels.push(format!("{}/{}", expert.name, expert.state_label(s)));
            }
            expert_names.push(expert.name.clone());
            expert_ranges.push((begin, entries.len()));
        }
        Arc::new(StateSpace {
            entries,
            labels,
            expert_names,
            expert_ranges,
            start_indices,
        })
    }

    /// A bare state space for hand-built models: one expert per size entry,
    /// the first state of each expert acting as its start state.
    pub fn synthetic(sizes: &[usize]) -> Arc<StateSpace> {
        let mut entries = Vec::new();
        let mut labels = Vec::new();
        let mut expert_names = Vec::new();
        let mut expert_ranges = Vec::new();
        let mut start_indices = Vec::new();
        for (e, &size) in sizes.iter().enumerate() {
            assert!(size > 0, "expert must have at least one state");
            let begin = entries.len();
            start_indices.push(begin);
            for s in 0..size {
                entries.push(StateRef { expert: e, state: s });
                labels.push(format!("expert{e}/s{s}"));
            }
            expert_names.push(format!("expert{e}"));
            expert_ranges.push((begin, entries.len()));
        }
        Arc::new(StateSpace {
            entries,
            labels,
            expert_names,
            expert_ranges,
            start_indices,
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn expert_count(&self) -> usize {
        self.expert_ranges.len()
    }

    pub fn entry(&self, idx: usize) -> StateRef {
        self.entries[idx]
    }

    pub fn label(&self, idx: usize) -> &str {
        &self.labels[idx]
    }

    pub fn expert_name(&self, expert: usize) -> &str {
        &self.expert_names[expert]
    }

    /// Index range [start, end) of the expert's states in the flat space.
    pub fn expert_range(&self, expert: usize) -> (usize, usize) {
        self.expert_ranges[expert]
    }

    /// Flat index of the expert's start state.
    pub fn start_index(&self, expert: usize) -> usize {
        self.start_indices[expert]
    }

    pub fn expert_of(&self, idx: usize) -> usize {
        self.entries[idx].expert
    }
}

/// Whether a belief ranges over propositional states (speech is emitted next)
/// or interim states (an action is emitted next).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BeliefPhase {
    Propositional,
    Interim,
}

/// A normalized probability distribution over the model state space.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefState {
    space: Arc<StateSpace>,
    probs: Vec<f64>,
    phase: BeliefPhase,
}

impl BeliefState {
    /// Normalizes raw nonnegative weights into a belief. Fails on a zero,
    /// negative, or non-finite total.
    pub fn from_raw(
        space: Arc<StateSpace>,
        raw: Vec<f64>,
        phase: BeliefPhase,
    ) -> Result<BeliefState, Error> {
        if raw.len() != space.len() {
            return Err(Error::BeliefLength {
                expected: space.len(),
                got: raw.len(),
            });
        }
        if raw.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::DegenerateBelief);
        }
        let total: f64 = raw.iter().sum();
        if total <= 0.0 || !total.is_finite() {
            return Err(Error::DegenerateBelief);
        }
        let probs = raw.into_iter().map(|p| p / total).collect();
        Ok(BeliefState { space, probs, phase })
    }

    pub fn uniform(space: Arc<StateSpace>, phase: BeliefPhase) -> BeliefState {
        let n = space.len();
        BeliefState {
            space,
            probs: vec![1.0 / n as f64; n],
            phase,
        }
    }

    pub(crate) fn with_phase(&self, phase: BeliefPhase) -> BeliefState {
        BeliefState {
            space: Arc::clone(&self.space),
            probs: self.probs.clone(),
            phase,
        }
    }

    pub fn space(&self) -> &Arc<StateSpace> {
        &self.space
    }

    pub fn phase(&self) -> BeliefPhase {
        self.phase
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, idx: usize) -> f64 {
        self.probs[idx]
    }

    /// Total probability mass inside one expert's states.
    pub fn expert_mass(&self, expert: usize) -> f64 {
        let (begin, end) = self.space.expert_range(expert);
        self.probs[begin..end].iter().sum()
    }

    pub fn expert_masses(&self) -> Vec<f64> {
        (0..self.space.expert_count())
            .map(|e| self.expert_mass(e))
            .collect()
    }

    /// Max-probability state index (first index wins ties).
    pub fn argmax(&self) -> usize {
        self.probs
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &p)| if p > self.probs[acc] { i } else { acc })
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }
}
