//! A simplified expert-selecting reference agent used as simulation ground
//! truth. Each round it replays the shared history through every expert
//! machine, keeps an aspiration level as a moving average of realized
//! payoff, and plays the emission of the best eligible expert.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::experts::{EventSymbol, ExpertFsm, GameEvent, StateKind};
use crate::game::{ActionId, PlayerRole};
use crate::logio::InteractionLog;
use crate::speech::{PlanCycle, SpeechAct, SpeechKind};
use crate::Error;

/// Punishment persists until the partner's payoff since its deviation falls
/// below the compliant counterfactual, capped at this many punish rounds.
const PUNISH_CAP: usize = 5;

/// Configuration of the reference agent.
///
/// `aspiration` is the level held at round 0; [`sharp_agent_step`] replays
/// the history to derive the current level, and the config it returns
/// carries that current value.
#[derive(Debug, Clone)]
pub struct SharpAgentConfig {
    pub aspiration: f64,
    pub aspiration_decay: f64,
    pub roster: Vec<ExpertFsm>,
    pub honor_congruence: bool,
}

impl SharpAgentConfig {
    pub fn new(roster: Vec<ExpertFsm>) -> SharpAgentConfig {
        SharpAgentConfig {
            aspiration: 0.0,
            aspiration_decay: 0.9,
            roster,
            honor_congruence: true,
        }
    }

    pub fn seat(&self) -> Option<PlayerRole> {
        self.roster.first().map(|e| e.seat)
    }
}

#[derive(Debug, Clone)]
struct PunishTracker {
    partner_actual: u32,
    partner_counterfactual: u32,
    cf_step: usize,
    rounds: usize,
}

#[derive(Debug, Clone)]
struct ExpertRun {
    state: usize,
    punish: Option<PunishTracker>,
}

#[derive(Debug)]
struct Replay {
    runs: Vec<ExpertRun>,
    aspiration: f64,
    last_partner_proposal: Option<PlanCycle>,
}

fn reflect_event(expert: &ExpertFsm, partner_speech: &SpeechAct) -> EventSymbol {
    expert.symbol_for(&GameEvent::PartnerProposed(partner_speech.clone()))
}

/// Replays the history through every expert machine, maintaining punishment
/// deficits and the aspiration moving average.
fn replay(config: &SharpAgentConfig, history: &InteractionLog, seat: PlayerRole) -> Replay {
    let partner = seat.other();
    let mut runs: Vec<ExpertRun> = config
        .roster
        .iter()
        .map(|e| ExpertRun {
            state: e.start,
            punish: None,
        })
        .collect();
    let mut aspiration = config.aspiration;
    let mut last_partner_proposal = None;

    for round in &history.rounds {
        let partner_speech = round.speech_of(partner);
        if let Some(plan) = partner_speech.proposal() {
            last_partner_proposal = Some(plan.clone());
        }
        let own_action = round.action_of(seat);
        let partner_action = round.action_of(partner);
        let partner_payoff = round.payoff_of(partner);

        for (expert, run) in config.roster.iter().zip(runs.iter_mut()) {
            // Speech phase: proposals can move the machine.
            run.state = expert.step_symbol(run.state, reflect_event(expert, partner_speech));

            // Action phase.
            let st = expert.state(run.state);
            let event = if st.kind == StateKind::Punish {
                let tracker = run.punish.get_or_insert(PunishTracker {
                    partner_actual: 0,
                    partner_counterfactual: 0,
                    cf_step: 0,
                    rounds: 0,
                });
                tracker.partner_actual += partner_payoff;
                tracker.partner_counterfactual +=
                    history.game.payoff_for(expert.plan.step(tracker.cf_step), partner);
                tracker.cf_step += 1;
                tracker.rounds += 1;
                if tracker.partner_actual < tracker.partner_counterfactual
                    || tracker.rounds >= PUNISH_CAP
                {
                    run.punish = None;
                    EventSymbol::PunishmentSatisfied
                } else {
                    EventSymbol::PartnerDeviated
                }
            } else if own_action != expert.prescribed_action(run.state) {
                EventSymbol::SelfDeviated
            } else {
                match expert.expected_partner_action(run.state) {
                    Some(expected) if partner_action != expected => EventSymbol::PartnerDeviated,
                    _ => EventSymbol::PartnerComplied,
                }
            };
            let next = expert.step_symbol(run.state, event);
            // Entering punishment starts the deficit ledger at the deviation
            // round itself.
            if expert.state(next).kind == StateKind::Punish && st.kind != StateKind::Punish {
                run.punish = Some(PunishTracker {
                    partner_actual: partner_payoff,
                    partner_counterfactual: history
                        .game
                        .payoff_for(expert.plan.step(st.step), partner),
                    cf_step: st.step + 1,
                    rounds: 0,
                });
            }
            run.state = next;
        }

        let own_payoff = f64::from(round.payoff_of(seat));
        aspiration =
            config.aspiration_decay * aspiration + (1.0 - config.aspiration_decay) * own_payoff;
    }

    Replay {
        runs,
        aspiration,
        last_partner_proposal,
    }
}

/// Picks the expert to play this round: among experts whose potential meets
/// the aspiration (restricted to plans congruent with the partner's last
/// proposal when requested and possible), the highest potential wins, with
/// ties broken by the lowest roster index. An empty eligible set falls back
/// to the highest-potential expert outright.
fn select_expert(config: &SharpAgentConfig, replay: &Replay) -> usize {
    let by_potential = |pool: &[usize]| -> usize {
        pool.iter()
            .copied()
            .fold(pool[0], |best, j| {
                if config.roster[j].potential > config.roster[best].potential {
                    j
                } else {
                    best
                }
            })
    };

    let eligible: Vec<usize> = (0..config.roster.len())
        .filter(|&j| config.roster[j].potential >= replay.aspiration - 1e-9)
        .collect();
    if eligible.is_empty() {
        let all: Vec<usize> = (0..config.roster.len()).collect();
        return by_potential(&all);
    }
    if config.honor_congruence {
        if let Some(proposal) = &replay.last_partner_proposal {
            let congruent: Vec<usize> = eligible
                .iter()
                .copied()
                .filter(|&j| config.roster[j].plan.same_cycle(proposal))
                .collect();
            if !congruent.is_empty() {
                return by_potential(&congruent);
            }
        }
    }
    by_potential(&eligible)
}

fn sample_speech_kind(state_speech: &[(SpeechKind, f64)], rng: &mut ChaCha8Rng) -> SpeechKind {
    let total: f64 = state_speech.iter().map(|(_, p)| p).sum();
    let mut draw = rng.gen::<f64>() * total;
    for (kind, p) in state_speech {
        draw -= p;
        if draw <= 0.0 {
            return *kind;
        }
    }
    state_speech.last().map(|(k, _)| *k).unwrap_or(SpeechKind::Silence)
}

/// One round of the reference agent: replays the history, selects an expert,
/// and emits that expert's current speech and action. Returns the config
/// with its aspiration advanced to the post-history value.
///
/// Deterministic: a fixed config, history, and seed always produce the same
/// output.
pub fn sharp_agent_step(
    config: &SharpAgentConfig,
    history: &InteractionLog,
    rng_seed: u64,
) -> Result<(SpeechAct, ActionId, SharpAgentConfig), Error> {
    if !config.aspiration.is_finite() || config.aspiration < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "aspiration {} must be nonnegative",
            config.aspiration
        )));
    }
    if !(config.aspiration_decay > 0.0 && config.aspiration_decay <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "aspiration decay {} outside (0, 1]",
            config.aspiration_decay
        )));
    }
    let seat = config
        .seat()
        .ok_or(Error::EmptyRoster)?;
    let replay = replay(config, history, seat);
    let choice = select_expert(config, &replay);
    let expert = &config.roster[choice];
    let state = expert.state(replay.runs[choice].state);

    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let kind = sample_speech_kind(&state.speech, &mut rng);
    let speech = expert.speech_act_for(kind);
    let cooperate = rng.gen::<f64>() < state.action_coop;
    let action = ActionId::from_flags(seat, cooperate);

    let mut updated = config.clone();
    updated.aspiration = replay.aspiration;
    Ok((speech, action, updated))
}
