//! Cheap-talk speech acts: a closed vocabulary of message kinds, with
//! proposals carrying a short cyclic plan of joint actions.

use serde::{Deserialize, Serialize};

use crate::game::{JointAction, PlayerRole};
use crate::Error;

/// The seven message kinds of the closed cheap-talk vocabulary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpeechKind {
    Propose,
    Threat,
    Praise,
    Insult,
    Forgive,
    Accuse,
    Silence,
}

pub const SPEECH_KINDS: [SpeechKind; 7] = [
    SpeechKind::Propose,
    SpeechKind::Threat,
    SpeechKind::Praise,
    SpeechKind::Insult,
    SpeechKind::Forgive,
    SpeechKind::Accuse,
    SpeechKind::Silence,
];

impl SpeechKind {
    pub fn index(self) -> usize {
        SPEECH_KINDS.iter().position(|k| *k == self).unwrap()
    }

    pub fn label(self) -> &'static str {
        match self {
            SpeechKind::Propose => "Propose",
            SpeechKind::Threat => "Threat",
            SpeechKind::Praise => "Praise",
            SpeechKind::Insult => "Insult",
            SpeechKind::Forgive => "Forgive",
            SpeechKind::Accuse => "Accuse",
            SpeechKind::Silence => "Silence",
        }
    }
}

/// A proposed way of playing: a cycle of one or two joint actions, repeated
/// forever ("let's always play AC", "let's alternate between AC and BC").
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PlanCycle {
    steps: Vec<JointAction>,
}

impl PlanCycle {
    pub fn new(steps: Vec<JointAction>) -> Result<PlanCycle, Error> {
        if steps.is_empty() || steps.len() > 2 {
            return Err(Error::InvalidPlanCycle { len: steps.len() });
        }
        Ok(PlanCycle { steps })
    }

    pub fn pure(step: JointAction) -> PlanCycle {
        PlanCycle { steps: vec![step] }
    }

    pub fn alternating(first: JointAction, second: JointAction) -> PlanCycle {
        PlanCycle {
            steps: vec![first, second],
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        false // cycles always hold 1 or 2 steps
    }

    pub fn step(&self, index: usize) -> JointAction {
        self.steps[index % self.steps.len()]
    }

    pub fn steps(&self) -> &[JointAction] {
        &self.steps
    }

    /// The acting side's payoff averaged over one cycle.
    pub fn mean_payoff(&self, game: &crate::game::MatrixGame, role: PlayerRole) -> f64 {
        let total: u32 = self.steps.iter().map(|&j| game.payoff_for(j, role)).sum();
        f64::from(total) / self.steps.len() as f64
    }

    /// The same cycle advanced by `shift` steps.
    pub fn rotated(&self, shift: usize) -> PlanCycle {
        let n = self.steps.len();
        PlanCycle {
            steps: (0..n).map(|i| self.steps[(i + shift) % n]).collect(),
        }
    }

    /// Cycle equality ignoring rotation, so AC-BC matches BC-AC.
    pub fn same_cycle(&self, other: &PlanCycle) -> bool {
        if self.steps.len() != other.steps.len() {
            return false;
        }
        let n = self.steps.len();
        (0..n).any(|shift| (0..n).all(|i| self.steps[i] == other.steps[(i + shift) % n]))
    }

    pub fn label(&self) -> String {
        self.steps
            .iter()
            .map(|j| j.label())
            .collect::<Vec<_>>()
            .join("-")
    }
}

/// One cheap-talk message. Only proposals carry a payload.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpeechAct {
    Propose(PlanCycle),
    Threat,
    Praise,
    Insult,
    Forgive,
    Accuse,
    Silence,
}

impl SpeechAct {
    pub fn kind(&self) -> SpeechKind {
        match self {
            SpeechAct::Propose(_) => SpeechKind::Propose,
            SpeechAct::Threat => SpeechKind::Threat,
            SpeechAct::Praise => SpeechKind::Praise,
            SpeechAct::Insult => SpeechKind::Insult,
            SpeechAct::Forgive => SpeechKind::Forgive,
            SpeechAct::Accuse => SpeechKind::Accuse,
            SpeechAct::Silence => SpeechKind::Silence,
        }
    }

    pub fn proposal(&self) -> Option<&PlanCycle> {
        match self {
            SpeechAct::Propose(plan) => Some(plan),
            _ => None,
        }
    }

    pub fn from_kind(kind: SpeechKind, proposal: Option<PlanCycle>) -> Result<SpeechAct, Error> {
        match (kind, proposal) {
            (SpeechKind::Propose, Some(plan)) => Ok(SpeechAct::Propose(plan)),
            (SpeechKind::Propose, None) => Err(Error::ProposalPayload {
                kind: "Propose".into(),
                present: false,
            }),
            (kind, Some(_)) => Err(Error::ProposalPayload {
                kind: kind.label().into(),
                present: true,
            }),
            (SpeechKind::Threat, None) => Ok(SpeechAct::Threat),
            (SpeechKind::Praise, None) => Ok(SpeechAct::Praise),
            (SpeechKind::Insult, None) => Ok(SpeechAct::Insult),
            (SpeechKind::Forgive, None) => Ok(SpeechAct::Forgive),
            (SpeechKind::Accuse, None) => Ok(SpeechAct::Accuse),
            (SpeechKind::Silence, None) => Ok(SpeechAct::Silence),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::ActionId;

    fn joint(s: &str) -> JointAction {
        JointAction::parse(s).unwrap()
    }

    #[test]
    fn cycle_length_bounds() {
        assert!(PlanCycle::new(vec![]).is_err());
        assert!(PlanCycle::new(vec![joint("AC")]).is_ok());
        assert!(PlanCycle::new(vec![joint("AC"), joint("BC")]).is_ok());
        assert!(PlanCycle::new(vec![joint("AC"), joint("BC"), joint("BD")]).is_err());
    }

    #[test]
    fn cycle_rotation_equality() {
        let a = PlanCycle::alternating(joint("AC"), joint("BC"));
        let b = PlanCycle::alternating(joint("BC"), joint("AC"));
        let c = PlanCycle::alternating(joint("AC"), joint("AD"));
        assert!(a.same_cycle(&b));
        assert!(!a.same_cycle(&c));
        assert!(!a.same_cycle(&PlanCycle::pure(joint("AC"))));
    }

    #[test]
    fn proposal_payload_rule() {
        let plan = PlanCycle::pure(joint("BD"));
        assert!(SpeechAct::from_kind(SpeechKind::Propose, Some(plan.clone())).is_ok());
        assert!(SpeechAct::from_kind(SpeechKind::Propose, None).is_err());
        assert!(SpeechAct::from_kind(SpeechKind::Threat, Some(plan)).is_err());
        assert_eq!(
            SpeechAct::from_kind(SpeechKind::Silence, None).unwrap(),
            SpeechAct::Silence
        );
    }

    #[test]
    fn cycle_steps_wrap() {
        let plan = PlanCycle::alternating(joint("AC"), joint("BC"));
        assert_eq!(plan.step(0).row, ActionId::A);
        assert_eq!(plan.step(1).row, ActionId::B);
        assert_eq!(plan.step(2).row, ActionId::A);
    }
}
