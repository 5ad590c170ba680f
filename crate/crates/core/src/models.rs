//! The four conditional models of the graphical model, compiled from an
//! expert roster: speech emission, reflection, action emission, and update.
//!
//! All tables are epsilon-smoothed so no transition or emission is ever
//! impossible. Speech emission factorizes into a kind table over the seven
//! message kinds and, for proposals, a plan table over the distinct roster
//! plans plus an "other plan" bucket; the product is the full emission
//! probability of an observed speech act.

use std::sync::Arc;

use crate::belief::{BeliefPhase, BeliefState, StateSpace};
use crate::experts::{EventSymbol, ExpertFsm, StateKind};
use crate::game::{ActionId, MatrixGame, PlayerRole};
use crate::speech::{PlanCycle, SpeechAct};
use crate::Error;

/// Reflection conditioning symbol: what the partner proposed this round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProposalSymbol {
    None,
    Plan(usize),
    Other,
}

/// Raw tables for building a model directly, used for randomized and
/// hand-constructed test models.
#[derive(Debug, Clone)]
pub struct ModelTables {
    pub space: Arc<StateSpace>,
    pub seat: PlayerRole,
    /// Distinct plan vocabulary for proposal content.
    pub plans: Vec<PlanCycle>,
    /// `[state][kind]`, rows over the 7 speech kinds.
    pub speech_kind: Vec<Vec<f64>>,
    /// `[state][plan symbol]`, rows over plans.len() + 1 (last = other plan).
    pub plan_given_propose: Vec<Vec<f64>>,
    /// `[proposal symbol][state][next state]`; symbol 0 = no proposal,
    /// 1..=plans.len() = that plan, plans.len()+1 = other plan.
    pub reflection: Vec<Vec<Vec<f64>>>,
    /// `[state][cooperate, defect]` for the modeled seat.
    pub action: Vec<[f64; 2]>,
    /// `[joint combo][state][next state]`, combo = 2*own_defects + partner_defects.
    pub update: Vec<Vec<Vec<f64>>>,
    pub epsilon: f64,
}

/// The compiled conditional models plus the state space they range over.
#[derive(Debug, Clone)]
pub struct ConditionalModels {
    tables: ModelTables,
}

const KIND_COUNT: usize = 7;
const COMBO_COUNT: usize = 4;

/// Per-round probability that a punishing machine returns to its offer in
/// the update kernel: a geometric stand-in (mean 3 rounds) for the agent's
/// deficit rule, which runs 2 to 5 rounds against typical opponents.
const PUNISH_RELEASE_HAZARD: f64 = 1.0 / 3.0;

fn smooth(row: &mut [f64], epsilon: f64) {
    let k = row.len() as f64;
    let mut total = 0.0;
    for v in row.iter_mut() {
        *v += epsilon / k;
        total += *v;
    }
    for v in row.iter_mut() {
        *v /= total;
    }
}

fn check_row(row: &[f64], what: &str) -> Result<(), Error> {
    if row.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(Error::InvalidDistribution {
            what: what.to_string(),
        });
    }
    let total: f64 = row.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidDistribution {
            what: format!("{what} sums to {total}"),
        });
    }
    Ok(())
}

impl ConditionalModels {
    /// Validates and wraps raw tables.
    pub fn from_tables(tables: ModelTables) -> Result<ConditionalModels, Error> {
        let n = tables.space.len();
        let plan_symbols = tables.plans.len() + 1;
        let proposal_symbols = tables.plans.len() + 2;
        if tables.speech_kind.len() != n
            || tables.plan_given_propose.len() != n
            || tables.action.len() != n
            || tables.reflection.len() != proposal_symbols
            || tables.update.len() != COMBO_COUNT
        {
            return Err(Error::InvalidDistribution {
                what: "table dimensions do not match the state space".into(),
            });
        }
        for (s, row) in tables.speech_kind.iter().enumerate() {
            if row.len() != KIND_COUNT {
                return Err(Error::InvalidDistribution {
                    what: format!("speech kind row {s} width"),
                });
            }
            check_row(row, &format!("speech kind row {s}"))?;
        }
        for (s, row) in tables.plan_given_propose.iter().enumerate() {
            if row.len() != plan_symbols {
                return Err(Error::InvalidDistribution {
                    what: format!("plan row {s} width"),
                });
            }
            check_row(row, &format!("plan row {s}"))?;
        }
        for (sym, kernel) in tables.reflection.iter().enumerate() {
            if kernel.len() != n {
                return Err(Error::InvalidDistribution {
                    what: format!("reflection kernel {sym} height"),
                });
            }
            for (s, row) in kernel.iter().enumerate() {
                if row.len() != n {
                    return Err(Error::InvalidDistribution {
                        what: format!("reflection row {sym}/{s} width"),
                    });
                }
                check_row(row, &format!("reflection row {sym}/{s}"))?;
            }
        }
        for (s, row) in tables.action.iter().enumerate() {
            check_row(row, &format!("action row {s}"))?;
        }
        for (combo, kernel) in tables.update.iter().enumerate() {
            if kernel.len() != n {
                return Err(Error::InvalidDistribution {
                    what: format!("update kernel {combo} height"),
                });
            }
            for (s, row) in kernel.iter().enumerate() {
                if row.len() != n {
                    return Err(Error::InvalidDistribution {
                        what: format!("update row {combo}/{s} width"),
                    });
                }
                check_row(row, &format!("update row {combo}/{s}"))?;
            }
        }
        Ok(ConditionalModels { tables })
    }

    pub fn space(&self) -> &Arc<StateSpace> {
        &self.tables.space
    }

    pub fn seat(&self) -> PlayerRole {
        self.tables.seat
    }

    pub fn epsilon(&self) -> f64 {
        self.tables.epsilon
    }

    pub fn plans(&self) -> &[PlanCycle] {
        &self.tables.plans
    }

    pub fn speech_kind_row(&self, state: usize) -> &[f64] {
        &self.tables.speech_kind[state]
    }

    pub fn plan_row(&self, state: usize) -> &[f64] {
        &self.tables.plan_given_propose[state]
    }

    pub fn action_row(&self, state: usize) -> [f64; 2] {
        self.tables.action[state]
    }

    /// p(action | interim state) for the modeled seat.
    pub fn action_prob(&self, state: usize, action: ActionId) -> f64 {
        let row = self.tables.action[state];
        if action.is_cooperate() {
            row[0]
        } else {
            row[1]
        }
    }

    fn plan_symbol(&self, plan: &PlanCycle) -> usize {
        self.tables
            .plans
            .iter()
            .position(|p| p.same_cycle(plan))
            .unwrap_or(self.tables.plans.len())
    }

    pub fn proposal_symbol(&self, speech: &SpeechAct) -> ProposalSymbol {
        match speech.proposal() {
            None => ProposalSymbol::None,
            Some(plan) => {
                let sym = self.plan_symbol(plan);
                if sym < self.tables.plans.len() {
                    ProposalSymbol::Plan(sym)
                } else {
                    ProposalSymbol::Other
                }
            }
        }
    }

    fn proposal_index(&self, symbol: ProposalSymbol) -> usize {
        match symbol {
            ProposalSymbol::None => 0,
            ProposalSymbol::Plan(k) => 1 + k,
            ProposalSymbol::Other => 1 + self.tables.plans.len(),
        }
    }

    /// Full emission probability of an observed speech act from a state.
    pub fn speech_weight(&self, state: usize, speech: &SpeechAct) -> f64 {
        let kind_p = self.tables.speech_kind[state][speech.kind().index()];
        match speech.proposal() {
            None => kind_p,
            Some(plan) => kind_p * self.tables.plan_given_propose[state][self.plan_symbol(plan)],
        }
    }

    pub fn reflection_row(&self, symbol: ProposalSymbol, state: usize) -> &[f64] {
        &self.tables.reflection[self.proposal_index(symbol)][state]
    }

    pub fn update_row(&self, own: ActionId, partner: ActionId, state: usize) -> &[f64] {
        &self.tables.update[combo_index(own, partner)][state]
    }
}

fn combo_index(own: ActionId, partner: ActionId) -> usize {
    2 * usize::from(!own.is_cooperate()) + usize::from(!partner.is_cooperate())
}

fn switch_profile(roster: &[ExpertFsm], space: &StateSpace, from_expert: usize) -> Vec<f64> {
    let mut profile = vec![0.0; space.len()];
    let max_potential = roster.iter().map(|e| e.potential).fold(0.0, f64::max);
    let weight = |e: &ExpertFsm| {
        if max_potential > 0.0 {
            e.potential / max_potential
        } else {
            1.0
        }
    };
    let total: f64 = roster
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != from_expert)
        .map(|(_, e)| weight(e))
        .sum();
    if total <= 0.0 {
        return profile;
    }
    for (j, expert) in roster.iter().enumerate() {
        if j == from_expert {
            continue;
        }
        let mass = weight(expert) / total;
        spread_over_expert(space, j, expert, mass, &mut profile);
    }
    profile
}

fn spread_over_expert(
    space: &StateSpace,
    expert_idx: usize,
    expert: &ExpertFsm,
    mass: f64,
    out: &mut [f64],
) {
    let (begin, end) = space.expert_range(expert_idx);
    let count = end - begin;
    if count == 1 {
        out[begin] += mass;
        return;
    }
    for (offset, slot) in out[begin..end].iter_mut().enumerate() {
        if offset == expert.start {
            *slot += 0.9 * mass;
        } else {
            *slot += 0.1 * mass / (count - 1) as f64;
        }
    }
}

/// Compiles the conditional models from a roster.
///
/// Emission tables are read off the FSM emission distributions; the
/// reflection and update kernels apply each machine's transition function to
/// the event implied by the conditioning observations. Every row is floored
/// by epsilon smoothing and renormalized, and the update kernel routes a
/// total mass of epsilon into other experts to model expert switching.
pub fn build_models(
    roster: &[ExpertFsm],
    game: &MatrixGame,
    epsilon: f64,
) -> Result<ConditionalModels, Error> {
    let _ = game;
    if roster.is_empty() {
        return Err(Error::EmptyRoster);
    }
    if !(epsilon > 0.0 && epsilon <= 0.2) {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    let seat = roster[0].seat;
    let space = StateSpace::from_roster(roster);
    let n = space.len();

    let mut plans: Vec<PlanCycle> = Vec::new();
    for expert in roster {
        if !plans.iter().any(|p| p.same_cycle(&expert.plan)) {
            plans.push(expert.plan.clone());
        }
    }
    let plan_symbol =
        |plan: &PlanCycle| -> usize { plans.iter().position(|p| p.same_cycle(plan)).unwrap() };

    let mut speech_kind = Vec::with_capacity(n);
    let mut plan_given_propose = Vec::with_capacity(n);
    let mut action = Vec::with_capacity(n);
    for idx in 0..n {
        let r = space.entry(idx);
        let expert = &roster[r.expert];
        let st = expert.state(r.state);

        let mut kind_row = vec![0.0; KIND_COUNT];
        for (kind, p) in &st.speech {
            kind_row[kind.index()] += p;
        }
        smooth(&mut kind_row, epsilon);
        speech_kind.push(kind_row);

        // A state only ever proposes its own expert's plan.
        let mut plan_row = vec![0.0; plans.len() + 1];
        plan_row[plan_symbol(&expert.plan)] = 1.0;
        smooth(&mut plan_row, epsilon);
        plan_given_propose.push(plan_row);

        let mut action_row = [st.action_coop, 1.0 - st.action_coop];
        smooth(&mut action_row, epsilon);
        action.push(action_row);
    }

    // Reflection: partner proposals move machines in the speech phase.
    let mut reflection = Vec::with_capacity(plans.len() + 2);
    for sym in 0..plans.len() + 2 {
        let mut kernel = Vec::with_capacity(n);
        for idx in 0..n {
            let r = space.entry(idx);
            let expert = &roster[r.expert];
            let event = if sym == 0 {
                EventSymbol::RoundStart
            } else if sym <= plans.len() && plans[sym - 1].same_cycle(&expert.plan) {
                EventSymbol::ProposedOwnPlan
            } else {
                EventSymbol::ProposedOtherPlan
            };
            let target = expert.step_symbol(r.state, event);
            let mut row = vec![0.0; n];
            row[space.expert_range(r.expert).0 + target] = 1.0;
            smooth(&mut row, epsilon);
            kernel.push(row);
        }
        reflection.push(kernel);
    }

    // Update: played actions move machines across rounds; epsilon mass models
    // switching to another expert, landing on start-weighted states.
    //
    // A punish state's release condition is a history-dependent deficit rule
    // that no single round's actions can imply, so the kernel represents its
    // unknown timing as a constant hazard toward the re-offer state.
    let mut update = Vec::with_capacity(COMBO_COUNT);
    for combo in 0..COMBO_COUNT {
        let own_coop = combo < 2;
        let partner_coop = combo % 2 == 0;
        let mut kernel = Vec::with_capacity(n);
        for idx in 0..n {
            let r = space.entry(idx);
            let expert = &roster[r.expert];
            let begin = space.expert_range(r.expert).0;
            let own = ActionId::from_flags(seat, own_coop);
            let partner = ActionId::from_flags(seat.other(), partner_coop);

            let mut row = switch_profile(roster, &space, r.expert);
            for v in row.iter_mut() {
                *v *= epsilon;
            }
            if expert.state(r.state).kind == StateKind::Punish {
                let released =
                    expert.step_symbol(r.state, EventSymbol::PunishmentSatisfied);
                row[begin + released] += (1.0 - epsilon) * PUNISH_RELEASE_HAZARD;
                row[begin + r.state] += (1.0 - epsilon) * (1.0 - PUNISH_RELEASE_HAZARD);
            } else {
                let event = derive_action_event(expert, r.state, own, partner);
                row[begin + expert.step_symbol(r.state, event)] += 1.0 - epsilon;
            }
            smooth(&mut row, epsilon);
            kernel.push(row);
        }
        update.push(kernel);
    }

    ConditionalModels::from_tables(ModelTables {
        space,
        seat,
        plans,
        speech_kind,
        plan_given_propose,
        reflection,
        action,
        update,
        epsilon,
    })
}

/// The transition event implied by one round's played actions, as seen from
/// a single (expert, state) hypothesis. Punish states are handled by the
/// hazard mix in the update kernel, not here.
pub(crate) fn derive_action_event(
    expert: &ExpertFsm,
    state: usize,
    own: ActionId,
    partner: ActionId,
) -> EventSymbol {
    if expert.state(state).kind == StateKind::Punish {
        return EventSymbol::PartnerDeviated;
    }
    if own != expert.prescribed_action(state) {
        return EventSymbol::SelfDeviated;
    }
    match expert.expected_partner_action(state) {
        Some(expected) if partner != expected => EventSymbol::PartnerDeviated,
        _ => EventSymbol::PartnerComplied,
    }
}

/// Prior belief: expert mass is the fraction of uniformly drawn aspiration
/// levels (over [0, max potential]) the expert's potential meets, and within
/// an expert 0.9 sits on the start state with 0.1 spread over the rest.
pub fn build_prior(roster: &[ExpertFsm], space: &Arc<StateSpace>) -> Result<BeliefState, Error> {
    if roster.is_empty() {
        return Err(Error::EmptyRoster);
    }
    let max_potential = roster.iter().map(|e| e.potential).fold(0.0, f64::max);
    let weights: Vec<f64> = if max_potential > 0.0 {
        roster.iter().map(|e| e.potential / max_potential).collect()
    } else {
        vec![1.0; roster.len()]
    };
    let total: f64 = weights.iter().sum();
    let mut raw = vec![0.0; space.len()];
    for (j, expert) in roster.iter().enumerate() {
        spread_over_expert(space, j, expert, weights[j] / total, &mut raw);
    }
    BeliefState::from_raw(Arc::clone(space), raw, BeliefPhase::Propositional)
}
