//! Shared test support: independent oracles and randomized model builders.
//!
//! The filter oracle enumerates every hidden-state path explicitly with no
//! per-step normalization or marginalization reuse, so it shares nothing
//! with the forward recursion it checks. The t-distribution oracle
//! integrates the density by quadrature with a numerically computed
//! normalization constant, independent of the gamma/beta special-function
//! route used by the implementation.

use std::sync::Arc;

use cheaptalk::belief::{BeliefPhase, BeliefState, StateSpace};
use cheaptalk::filter::ObservationRecord;
use cheaptalk::models::{ConditionalModels, ModelTables};
use cheaptalk::speech::{PlanCycle, SpeechAct, SpeechKind, SPEECH_KINDS};
use cheaptalk::{ActionId, JointAction, PlayerRole};

pub struct Xorshift(pub u64);

impl Xorshift {
    pub fn new(seed: u64) -> Xorshift {
        Xorshift(seed.max(1))
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }

    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }
}

fn random_row(rng: &mut Xorshift, len: usize) -> Vec<f64> {
    // Entries bounded away from zero so no evidence combination can vanish.
    let raw: Vec<f64> = (0..len).map(|_| 0.05 + rng.unit()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / total).collect()
}

fn random_kernel(rng: &mut Xorshift, n: usize) -> Vec<Vec<f64>> {
    (0..n).map(|_| random_row(rng, n)).collect()
}

pub struct RandomModel {
    pub models: ConditionalModels,
    pub prior: BeliefState,
}

/// A fully random smoothed-style model over `n` states split into one or two
/// experts, with an optional one-plan proposal vocabulary.
pub fn random_model(rng: &mut Xorshift, n: usize) -> RandomModel {
    let sizes: Vec<usize> = if n > 1 && rng.below(2) == 0 {
        let first = 1 + rng.below(n - 1);
        vec![first, n - first]
    } else {
        vec![n]
    };
    let space = StateSpace::synthetic(&sizes);
    let plans = if rng.below(2) == 0 {
        vec![PlanCycle::pure(JointAction::parse("AC").unwrap())]
    } else {
        vec![]
    };
    let proposal_symbols = plans.len() + 2;
    let plan_cols = plans.len() + 1;
    let tables = ModelTables {
        space: Arc::clone(&space),
        seat: PlayerRole::Row,
        plans,
        speech_kind: (0..n).map(|_| random_row(rng, 7)).collect(),
        plan_given_propose: (0..n).map(|_| random_row(rng, plan_cols)).collect(),
        reflection: (0..proposal_symbols).map(|_| random_kernel(rng, n)).collect(),
        action: (0..n)
            .map(|_| {
                let row = random_row(rng, 2);
                [row[0], row[1]]
            })
            .collect(),
        update: (0..4).map(|_| random_kernel(rng, n)).collect(),
        epsilon: 0.05,
    };
    let models = ConditionalModels::from_tables(tables).expect("random tables are valid");
    let prior = BeliefState::from_raw(
        space,
        (0..n).map(|_| 0.05 + rng.unit()).collect(),
        BeliefPhase::Propositional,
    )
    .unwrap();
    RandomModel { models, prior }
}

pub fn random_speech(rng: &mut Xorshift, models: &ConditionalModels) -> SpeechAct {
    let kind = SPEECH_KINDS[rng.below(7)];
    if kind == SpeechKind::Propose {
        let plan = if !models.plans().is_empty() && rng.below(2) == 0 {
            models.plans()[0].clone()
        } else {
            PlanCycle::pure(JointAction::parse("BD").unwrap())
        };
        SpeechAct::Propose(plan)
    } else {
        SpeechAct::from_kind(kind, None).unwrap()
    }
}

pub fn random_observation(rng: &mut Xorshift, models: &ConditionalModels) -> ObservationRecord {
    ObservationRecord {
        speech_partner: random_speech(rng, models),
        speech_modeled: random_speech(rng, models),
        action_partner: if rng.below(2) == 0 {
            ActionId::C
        } else {
            ActionId::D
        },
        action_modeled: if rng.below(2) == 0 {
            ActionId::A
        } else {
            ActionId::B
        },
    }
}

fn speech_weight(models: &ConditionalModels, state: usize, speech: &SpeechAct) -> f64 {
    models.speech_weight(state, speech)
}

/// Brute-force filtered posterior over the propositional state entering
/// round `t` (after its speech correction), by explicit enumeration of all
/// hidden-state paths with evidence from rounds 0..t.
pub fn oracle_propositional(
    models: &ConditionalModels,
    prior: &BeliefState,
    obs: &[ObservationRecord],
    t: usize,
    cheap_talk: bool,
) -> Vec<f64> {
    let n = models.space().len();
    let mut marginal = vec![0.0; n];
    for s0 in 0..n {
        let mut w = prior.prob(s0);
        if cheap_talk && !obs.is_empty() {
            w *= speech_weight(models, s0, &obs[0].speech_modeled);
        }
        dfs_prop(models, obs, cheap_talk, 0, t, s0, w, &mut marginal);
    }
    normalize(marginal)
}

#[allow(clippy::too_many_arguments)]
fn dfs_prop(
    models: &ConditionalModels,
    obs: &[ObservationRecord],
    cheap_talk: bool,
    round: usize,
    t: usize,
    state: usize,
    weight: f64,
    marginal: &mut [f64],
) {
    if round == t {
        marginal[state] += weight;
        return;
    }
    let o = &obs[round];
    let symbol = if cheap_talk {
        models.proposal_symbol(&o.speech_partner)
    } else {
        cheaptalk::models::ProposalSymbol::None
    };
    let n = models.space().len();
    for s_hat in 0..n {
        let w1 = weight
            * models.reflection_row(symbol, state)[s_hat]
            * models.action_prob(s_hat, o.action_modeled);
        for s_next in 0..n {
            let mut w2 =
                w1 * models.update_row(o.action_modeled, o.action_partner, s_hat)[s_next];
            if cheap_talk && round + 1 < obs.len() {
                w2 *= speech_weight(models, s_next, &obs[round + 1].speech_modeled);
            }
            dfs_prop(models, obs, cheap_talk, round + 1, t, s_next, w2, marginal);
        }
    }
}

/// Brute-force filtered posterior over the interim state of round `t`
/// (after the round-t reflection and action evidence).
pub fn oracle_interim(
    models: &ConditionalModels,
    prior: &BeliefState,
    obs: &[ObservationRecord],
    t: usize,
    cheap_talk: bool,
) -> Vec<f64> {
    let n = models.space().len();
    // Propositional paths up to round t, then one reflection + action step.
    // Reuse the propositional enumeration with arrival weights, but stop at
    // the interim variable: enumerate s_t via paths, then extend.
    let mut marginal = vec![0.0; n];
    for s0 in 0..n {
        let mut w = prior.prob(s0);
        if cheap_talk && !obs.is_empty() {
            w *= speech_weight(models, s0, &obs[0].speech_modeled);
        }
        dfs_interim(models, obs, cheap_talk, 0, t, s0, w, &mut marginal);
    }
    normalize(marginal)
}

#[allow(clippy::too_many_arguments)]
fn dfs_interim(
    models: &ConditionalModels,
    obs: &[ObservationRecord],
    cheap_talk: bool,
    round: usize,
    t: usize,
    state: usize,
    weight: f64,
    marginal: &mut [f64],
) {
    let o = &obs[round];
    let symbol = if cheap_talk {
        models.proposal_symbol(&o.speech_partner)
    } else {
        cheaptalk::models::ProposalSymbol::None
    };
    let n = models.space().len();
    if round == t {
        for (s_hat, slot) in marginal.iter_mut().enumerate() {
            *slot += weight
                * models.reflection_row(symbol, state)[s_hat]
                * models.action_prob(s_hat, o.action_modeled);
        }
        return;
    }
    for s_hat in 0..n {
        let w1 = weight
            * models.reflection_row(symbol, state)[s_hat]
            * models.action_prob(s_hat, o.action_modeled);
        for s_next in 0..n {
            let mut w2 =
                w1 * models.update_row(o.action_modeled, o.action_partner, s_hat)[s_next];
            if cheap_talk && round + 1 < obs.len() {
                w2 *= speech_weight(models, s_next, &obs[round + 1].speech_modeled);
            }
            dfs_interim(models, obs, cheap_talk, round + 1, t, s_next, w2, marginal);
        }
    }
}

fn normalize(mut v: Vec<f64>) -> Vec<f64> {
    let total: f64 = v.iter().sum();
    assert!(total > 0.0, "oracle mass vanished");
    for x in v.iter_mut() {
        *x /= total;
    }
    v
}

/// Two-tailed Student-t p-value by quadrature: with x = sqrt(df) tan(theta)
/// the density reduces to cos^(df-1), so both the tail mass and the
/// normalization constant are finite-interval Simpson integrals.
pub fn t_p_value_by_integration(t: f64, df: f64) -> f64 {
    let power = df - 1.0;
    let f = |theta: f64| theta.cos().powf(power);
    let half = simpson(&f, 0.0, std::f64::consts::FRAC_PI_2, 16_384);
    let theta_star = (t.abs() / df.sqrt()).atan();
    let head = simpson(&f, 0.0, theta_star, 16_384);
    (1.0 - head / half).clamp(0.0, 1.0)
}

fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let n = intervals + intervals % 2;
    let h = (b - a) / n as f64;
    if h == 0.0 {
        return 0.0;
    }
    let mut total = f(a) + f(b);
    for i in 1..n {
        let x = a + h * i as f64;
        total += f(x) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    total * h / 3.0
}
