//! Turning beliefs into predictions of the modeled player's next action,
//! plan type, and intent type.
//!
//! MAP estimators commit to the single most probable expert (or, for
//! actions, the action with the highest total emission mass); aggregation
//! estimators pool probability across every state sharing the predicted
//! attribute. Ties break toward Cooperate, the lowest expert index, Leader,
//! and MaximizePayoff.

use crate::belief::BeliefState;
use crate::experts::{ExpertFsm, IntentType, PlanType};
use crate::game::ActionId;
use crate::models::ConditionalModels;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredictionMethod {
    Map,
    Aggregation,
}

impl PredictionMethod {
    pub fn label(self) -> &'static str {
        match self {
            PredictionMethod::Map => "map",
            PredictionMethod::Aggregation => "agg",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PredictionValue {
    Action(ActionId),
    Plan(PlanType),
    Intent(IntentType),
}

/// A single prediction with the probability mass backing it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub value: PredictionValue,
    pub confidence: f64,
    pub method: PredictionMethod,
}

impl Prediction {
    pub fn action(&self) -> Option<ActionId> {
        match self.value {
            PredictionValue::Action(a) => Some(a),
            _ => None,
        }
    }

    pub fn plan(&self) -> Option<PlanType> {
        match self.value {
            PredictionValue::Plan(p) => Some(p),
            _ => None,
        }
    }

    pub fn intent(&self) -> Option<IntentType> {
        match self.value {
            PredictionValue::Intent(i) => Some(i),
            _ => None,
        }
    }
}

fn action_masses(bel: &BeliefState, models: &ConditionalModels) -> (f64, f64) {
    let mut coop = 0.0;
    let mut defect = 0.0;
    for (s, &p) in bel.probs().iter().enumerate() {
        let row = models.action_row(s);
        coop += p * row[0];
        defect += p * row[1];
    }
    (coop, defect)
}

/// Most probable next action by total emission mass over all states.
pub fn predict_action_map(bel: &BeliefState, models: &ConditionalModels) -> Prediction {
    let (coop, defect) = action_masses(bel, models);
    let cooperate = coop >= defect;
    Prediction {
        value: PredictionValue::Action(ActionId::from_flags(models.seat(), cooperate)),
        confidence: if cooperate { coop } else { defect },
        method: PredictionMethod::Map,
    }
}

fn argmax_expert(bel: &BeliefState) -> (usize, f64) {
    let masses = bel.expert_masses();
    let mut best = 0;
    for (j, &m) in masses.iter().enumerate() {
        if m > masses[best] {
            best = j;
        }
    }
    (best, masses[best])
}

/// Next action of the single most probable expert, scored within it.
pub fn predict_action_agg(bel: &BeliefState, models: &ConditionalModels) -> Prediction {
    let (expert, expert_mass) = argmax_expert(bel);
    let (begin, end) = bel.space().expert_range(expert);
    let mut coop = 0.0;
    let mut defect = 0.0;
    for s in begin..end {
        let p = bel.prob(s);
        let row = models.action_row(s);
        coop += p * row[0];
        defect += p * row[1];
    }
    let cooperate = coop >= defect;
    let score = if cooperate { coop } else { defect };
    Prediction {
        value: PredictionValue::Action(ActionId::from_flags(models.seat(), cooperate)),
        confidence: if expert_mass > 0.0 {
            score / expert_mass
        } else {
            0.5
        },
        method: PredictionMethod::Aggregation,
    }
}

/// Plan type of the most probable expert.
pub fn predict_plan_map(bel: &BeliefState, roster: &[ExpertFsm]) -> Prediction {
    let (expert, mass) = argmax_expert(bel);
    Prediction {
        value: PredictionValue::Plan(roster[expert].plan_type),
        confidence: mass,
        method: PredictionMethod::Map,
    }
}

/// Plan type with the larger pooled mass across all experts of that type.
pub fn predict_plan_agg(bel: &BeliefState, roster: &[ExpertFsm]) -> Prediction {
    let masses = bel.expert_masses();
    let mut leader = 0.0;
    let mut follower = 0.0;
    for (j, expert) in roster.iter().enumerate() {
        match expert.plan_type {
            PlanType::Leader => leader += masses[j],
            PlanType::Follower => follower += masses[j],
        }
    }
    let value = if leader >= follower {
        PlanType::Leader
    } else {
        PlanType::Follower
    };
    Prediction {
        value: PredictionValue::Plan(value),
        confidence: leader.max(follower),
        method: PredictionMethod::Aggregation,
    }
}

/// Intent type of the most probable expert.
pub fn predict_intent_map(bel: &BeliefState, roster: &[ExpertFsm]) -> Prediction {
    let (expert, mass) = argmax_expert(bel);
    Prediction {
        value: PredictionValue::Intent(roster[expert].intent_type),
        confidence: mass,
        method: PredictionMethod::Map,
    }
}

/// Intent type with the larger pooled mass across experts of that intent.
pub fn predict_intent_agg(bel: &BeliefState, roster: &[ExpertFsm]) -> Prediction {
    let masses = bel.expert_masses();
    let mut payoff = 0.0;
    let mut fairness = 0.0;
    for (j, expert) in roster.iter().enumerate() {
        match expert.intent_type {
            IntentType::MaximizePayoff => payoff += masses[j],
            IntentType::MaximizeFairness => fairness += masses[j],
        }
    }
    let value = if payoff >= fairness {
        IntentType::MaximizePayoff
    } else {
        IntentType::MaximizeFairness
    };
    Prediction {
        value: PredictionValue::Intent(value),
        confidence: payoff.max(fairness),
        method: PredictionMethod::Aggregation,
    }
}
