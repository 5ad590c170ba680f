//! Recursive belief updating: two hidden-state transitions per round.
//!
//! Each round the propositional belief is pushed through the reflection
//! kernel (conditioned on the partner's proposal), corrected by the observed
//! action, pushed through the update kernel (conditioned on both actions),
//! and finally corrected by the modeled player's next observed speech act
//! when one exists.

use std::sync::Arc;

use crate::belief::{BeliefPhase, BeliefState};
use crate::game::{ActionId, PlayerRole};
use crate::logio::InteractionLog;
use crate::models::{ConditionalModels, ProposalSymbol};
use crate::speech::SpeechAct;
use crate::Error;

/// One round's observations as seen by the modeling agent. The `partner`
/// fields are the exogenous inputs; the `modeled` fields are the evidence
/// about the hidden state.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationRecord {
    pub speech_partner: SpeechAct,
    pub speech_modeled: SpeechAct,
    pub action_partner: ActionId,
    pub action_modeled: ActionId,
}

impl ObservationRecord {
    /// Reads one round of a log from the perspective of modeling `role`.
    pub fn from_round(round: &crate::logio::RoundRecord, modeled: PlayerRole) -> ObservationRecord {
        ObservationRecord {
            speech_partner: round.speech_of(modeled.other()).clone(),
            speech_modeled: round.speech_of(modeled).clone(),
            action_partner: round.action_of(modeled.other()),
            action_modeled: round.action_of(modeled),
        }
    }
}

/// Output of one filter step: the interim (action-phase) belief and the next
/// propositional belief. `degenerate` reports a zero-evidence reset.
#[derive(Debug, Clone)]
pub struct FilterStepOutput {
    pub interim: BeliefState,
    pub next: BeliefState,
    pub degenerate: bool,
}

fn normalize_or_reset(
    raw: Vec<f64>,
    prior: &BeliefState,
    phase: BeliefPhase,
    degenerate: &mut bool,
) -> BeliefState {
    match BeliefState::from_raw(Arc::clone(prior.space()), raw, phase) {
        Ok(bel) => bel,
        Err(_) => {
            *degenerate = true;
            prior.with_phase(phase)
        }
    }
}

/// Applies one round of observations to a propositional belief.
///
/// `next_modeled_speech` is the modeled player's speech act from the
/// following round; passing `None` (end of horizon) skips the speech
/// correction. With `use_cheap_talk` false all speech conditioning is
/// neutral, leaving only action evidence.
pub fn filter_step(
    bel: &BeliefState,
    obs: &ObservationRecord,
    next_modeled_speech: Option<&SpeechAct>,
    models: &ConditionalModels,
    prior: &BeliefState,
    use_cheap_talk: bool,
) -> Result<FilterStepOutput, Error> {
    if bel.phase() != BeliefPhase::Propositional {
        return Err(Error::WrongBeliefPhase);
    }
    let n = models.space().len();
    if bel.space().len() != n {
        return Err(Error::BeliefLength {
            expected: n,
            got: bel.space().len(),
        });
    }
    let mut degenerate = false;

    // Reflection then action correction.
    let symbol = if use_cheap_talk {
        models.proposal_symbol(&obs.speech_partner)
    } else {
        ProposalSymbol::None
    };
    let mut interim_raw = vec![0.0; n];
    for s in 0..n {
        let p = bel.prob(s);
        if p == 0.0 {
            continue;
        }
        let row = models.reflection_row(symbol, s);
        for (s_hat, w) in row.iter().enumerate() {
            interim_raw[s_hat] += p * w;
        }
    }
    for (s_hat, v) in interim_raw.iter_mut().enumerate() {
        *v *= models.action_prob(s_hat, obs.action_modeled);
    }
    let interim = normalize_or_reset(interim_raw, prior, BeliefPhase::Interim, &mut degenerate);

    // Update then next-round speech correction.
    let mut next_raw = vec![0.0; n];
    for s_hat in 0..n {
        let p = interim.prob(s_hat);
        if p == 0.0 {
            continue;
        }
        let row = models.update_row(obs.action_modeled, obs.action_partner, s_hat);
        for (s_next, w) in row.iter().enumerate() {
            next_raw[s_next] += p * w;
        }
    }
    if use_cheap_talk {
        if let Some(speech) = next_modeled_speech {
            for (s_next, v) in next_raw.iter_mut().enumerate() {
                *v *= models.speech_weight(s_next, speech);
            }
        }
    }
    let next = normalize_or_reset(next_raw, prior, BeliefPhase::Propositional, &mut degenerate);

    Ok(FilterStepOutput {
        interim,
        next,
        degenerate,
    })
}

/// A full filtering pass over a log.
#[derive(Debug, Clone)]
pub struct FilterRun {
    /// Belief over the round-0 propositional state, including the round-0
    /// speech correction when cheap talk is used.
    pub initial: BeliefState,
    /// Per round: the interim belief and the next propositional belief.
    pub steps: Vec<FilterStepOutput>,
    /// Rounds on which evidence mass vanished and the belief was reset.
    pub degenerate_rounds: Vec<usize>,
}

impl FilterRun {
    /// The propositional belief held entering round `t` (after observing the
    /// round-t speech act of the modeled player).
    pub fn belief_before(&self, t: usize) -> &BeliefState {
        if t == 0 {
            &self.initial
        } else {
            &self.steps[t - 1].next
        }
    }

    pub fn degenerate_count(&self) -> usize {
        self.degenerate_rounds.len()
    }
}

/// Runs the filter over every round of a log. The modeled seat is the one
/// the models were built for.
pub fn run_filter(
    log: &InteractionLog,
    models: &ConditionalModels,
    prior: &BeliefState,
    use_cheap_talk: bool,
) -> Result<FilterRun, Error> {
    let modeled = models.seat();
    let mut degenerate_rounds = Vec::new();

    let mut initial = prior.clone();
    if use_cheap_talk {
        if let Some(first) = log.rounds.first() {
            let mut raw: Vec<f64> = prior.probs().to_vec();
            for (s, v) in raw.iter_mut().enumerate() {
                *v *= models.speech_weight(s, first.speech_of(modeled));
            }
            let mut degenerate = false;
            initial = normalize_or_reset(raw, prior, BeliefPhase::Propositional, &mut degenerate);
            if degenerate {
                degenerate_rounds.push(0);
            }
        }
    }

    let mut steps = Vec::with_capacity(log.rounds.len());
    let mut bel = initial.clone();
    for (t, round) in log.rounds.iter().enumerate() {
        let obs = ObservationRecord::from_round(round, modeled);
        let next_speech = log.rounds.get(t + 1).map(|r| r.speech_of(modeled).clone());
        let out = filter_step(
            &bel,
            &obs,
            next_speech.as_ref(),
            models,
            prior,
            use_cheap_talk,
        )?;
        if out.degenerate {
            degenerate_rounds.push(t);
        }
        bel = out.next.clone();
        steps.push(out);
    }

    Ok(FilterRun {
        initial,
        steps,
        degenerate_rounds,
    })
}
