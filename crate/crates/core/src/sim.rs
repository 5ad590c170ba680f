//! Plays agent specifications against each other to generate interaction
//! corpora. Matches are 51 rounds by default, speech precedes actions within
//! a round, both speeches are visible before either action, and everything
//! is seeded.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::baselines::{next_action_for, FixedStrategy};
use crate::game::{ActionId, JointAction, MatrixGame, PlayerRole};
use crate::logio::{InteractionLog, RoundRecord};
use crate::sharp::{sharp_agent_step, SharpAgentConfig};
use crate::speech::SpeechAct;
use crate::Error;

/// What sits in one seat of a simulated match.
#[derive(Debug, Clone)]
pub enum AgentKind {
    SharpLike(SharpAgentConfig),
    Fixed(FixedStrategy),
    /// Replays one side of a recorded log.
    Replay(InteractionLog, PlayerRole),
}

/// One seat's agent plus its lying probability and seed.
#[derive(Debug, Clone)]
pub struct AgentSpec {
    pub kind: AgentKind,
    pub lie_prob: f64,
    pub seed: u64,
}

impl AgentSpec {
    pub fn fixed(strategy: FixedStrategy) -> AgentSpec {
        AgentSpec {
            kind: AgentKind::Fixed(strategy),
            lie_prob: 0.0,
            seed: 0,
        }
    }

    /// A reference agent with the default roster for `seat`.
    pub fn sharp_for(game: &MatrixGame, seat: PlayerRole, seed: u64) -> AgentSpec {
        AgentSpec {
            kind: AgentKind::SharpLike(SharpAgentConfig::new(crate::experts::build_expert_roster(
                game, seat,
            ))),
            lie_prob: 0.0,
            seed,
        }
    }

    pub fn with_lie_prob(mut self, lie_prob: f64) -> AgentSpec {
        self.lie_prob = lie_prob;
        self
    }

    pub fn name(&self) -> String {
        match &self.kind {
            AgentKind::SharpLike(_) => "sharp".to_string(),
            AgentKind::Fixed(s) => s.id().to_string(),
            AgentKind::Replay(log, role) => format!("replay-{}-{}", log.game_id, role.label()),
        }
    }
}

/// Match-level configuration.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub rounds: usize,
    pub games: usize,
    pub cheap_talk: bool,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> SimConfig {
        SimConfig {
            rounds: 51,
            games: 12,
            cheap_talk: true,
            seed: 0,
        }
    }
}

pub(crate) fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn round_seed(agent_seed: u64, round: usize) -> u64 {
    splitmix64(agent_seed ^ (round as u64).wrapping_mul(0xA24B_AED4_963E_E407))
}

/// With probability `lie_prob`, contradicts the speaker's own side of its
/// current proposal; otherwise returns the compliant action. Speech without
/// a proposal passes the intended action through untouched.
pub fn apply_lie(
    speech: &SpeechAct,
    action: ActionId,
    lie_prob: f64,
    rng: &mut ChaCha8Rng,
) -> ActionId {
    match speech.proposal() {
        None => action,
        Some(plan) => {
            let compliant = plan.step(0).action_of(action.role());
            if rng.gen::<f64>() < lie_prob {
                compliant.opposite()
            } else {
                compliant
            }
        }
    }
}

struct SeatState<'a> {
    spec: &'a AgentSpec,
    seat: PlayerRole,
    lie_rng: ChaCha8Rng,
    /// The agent's own standing proposal and the round it was made.
    active_plan: Option<(crate::speech::PlanCycle, usize)>,
}

impl<'a> SeatState<'a> {
    fn new(spec: &'a AgentSpec, seat: PlayerRole) -> Result<SeatState<'a>, Error> {
        if let AgentKind::SharpLike(config) = &spec.kind {
            if config.seat() != Some(seat) {
                return Err(Error::InvalidArgument(format!(
                    "sharp agent roster built for the wrong seat (expected {})",
                    seat.label()
                )));
            }
        }
        Ok(SeatState {
            spec,
            seat,
            lie_rng: ChaCha8Rng::seed_from_u64(splitmix64(spec.seed ^ 0x11E5)),
            active_plan: None,
        })
    }

    fn validate_replay(&self, rounds: usize) -> Result<(), Error> {
        if let AgentKind::Replay(log, _) = &self.spec.kind {
            if log.len() < rounds {
                return Err(Error::ReplayTooShort {
                    game_id: log.game_id.clone(),
                    available: log.len(),
                    needed: rounds,
                });
            }
        }
        Ok(())
    }

    /// Speech and intended action for the round, conditioned on the shared
    /// history only.
    fn emit(
        &mut self,
        history: &InteractionLog,
        joint_history: &[JointAction],
        round: usize,
        cheap_talk: bool,
    ) -> Result<(SpeechAct, ActionId), Error> {
        let (speech, action) = match &self.spec.kind {
            AgentKind::Fixed(strategy) => (
                SpeechAct::Silence,
                next_action_for(*strategy, joint_history, self.seat),
            ),
            AgentKind::SharpLike(config) => {
                let (speech, action, _) =
                    sharp_agent_step(config, history, round_seed(self.spec.seed, round))?;
                (speech, action)
            }
            AgentKind::Replay(log, source_role) => {
                let record = &log.rounds[round];
                let action = ActionId::from_flags(
                    self.seat,
                    record.action_of(*source_role).is_cooperate(),
                );
                (record.speech_of(*source_role).clone(), action)
            }
        };
        let speech = if cheap_talk { speech } else { SpeechAct::Silence };
        // Lying contradicts the speaker's own proposal on the action side
        // only, and only for agents that form their own speech. A proposal
        // stays applicable on later rounds: the plan cycle is rotated so its
        // first step names this round's promised action, and the lie roll
        // applies whenever the agent was about to keep its word.
        let action = match &self.spec.kind {
            AgentKind::SharpLike(_) => {
                if let Some(plan) = speech.proposal() {
                    self.active_plan = Some((plan.clone(), round));
                }
                let applicable = match &self.active_plan {
                    Some((plan, since)) if speech.proposal().is_none() => {
                        let shifted = plan.rotated(round - since);
                        if shifted.step(0).action_of(self.seat) == action {
                            Some(SpeechAct::Propose(shifted))
                        } else {
                            None // off the plan already: punishing or replanning
                        }
                    }
                    _ => speech.proposal().is_some().then(|| speech.clone()),
                };
                match applicable {
                    Some(promise) => {
                        apply_lie(&promise, action, self.spec.lie_prob, &mut self.lie_rng)
                    }
                    None => action,
                }
            }
            _ => action,
        };
        Ok((speech, action))
    }
}

/// Plays one match. Speech and actions are simultaneous within their phases:
/// each side's round-t output depends only on the shared history through
/// round t-1, so evaluation order cannot matter.
pub fn run_game(
    row_spec: &AgentSpec,
    col_spec: &AgentSpec,
    config: &SimConfig,
    game_id: impl Into<String>,
) -> Result<InteractionLog, Error> {
    let game = MatrixGame::prisoners_dilemma();
    let mut row = SeatState::new(row_spec, PlayerRole::Row)?;
    let mut col = SeatState::new(col_spec, PlayerRole::Column)?;
    row.validate_replay(config.rounds)?;
    col.validate_replay(config.rounds)?;

    let mut log = InteractionLog {
        game_id: game_id.into(),
        game: game.clone(),
        rounds: Vec::with_capacity(config.rounds),
    };
    let mut joint_history: Vec<JointAction> = Vec::with_capacity(config.rounds);

    for round in 0..config.rounds {
        let (z_row, a_row) = row.emit(&log, &joint_history, round, config.cheap_talk)?;
        let (z_col, a_col) = col.emit(&log, &joint_history, round, config.cheap_talk)?;
        let joint = JointAction {
            row: a_row,
            column: a_col,
        };
        let (u_row, u_col) = game.payoff(joint);
        log.rounds.push(RoundRecord {
            index: round,
            speech_row: z_row,
            speech_col: z_col,
            action_row: a_row,
            action_col: a_col,
            payoff_row: u_row,
            payoff_col: u_col,
        });
        joint_history.push(joint);
    }
    Ok(log)
}

/// One log per matchup, with per-matchup seeds derived from the corpus seed.
pub fn generate_corpus(
    config: &SimConfig,
    matchups: &[(AgentSpec, AgentSpec)],
) -> Result<Vec<InteractionLog>, Error> {
    if matchups.is_empty() {
        return Err(Error::InvalidArgument("no matchups given".into()));
    }
    let mut logs = Vec::with_capacity(matchups.len());
    for (index, (row, col)) in matchups.iter().enumerate() {
        let mut row = row.clone();
        let mut col = col.clone();
        row.seed = splitmix64(config.seed ^ row.seed ^ (2 * index as u64 + 1));
        col.seed = splitmix64(config.seed ^ col.seed ^ (2 * index as u64 + 2));
        let game_id = format!("g{index:02}-{}-vs-{}", row.name(), col.name());
        logs.push(run_game(&row, &col, config, game_id)?);
    }
    Ok(logs)
}

/// The default mixed fixed-opponent lineup used by the harness: twelve
/// distinct strategies spanning the unconditional, reciprocal, punishing,
/// win-stay, and exploitive families.
pub fn default_opponents() -> [FixedStrategy; 12] {
    [
        FixedStrategy::AlwaysCooperate,
        FixedStrategy::AlwaysDefect,
        FixedStrategy::Tft,
        FixedStrategy::Tf2t,
        FixedStrategy::Tf3t,
        FixedStrategy::Grim,
        FixedStrategy::LenientGrim2,
        FixedStrategy::Wsls,
        FixedStrategy::TwoTitsForOneTat,
        FixedStrategy::T2,
        FixedStrategy::Alternator,
        FixedStrategy::ExplTft,
    ]
}

/// The standard evaluation corpus: the reference agent in the row seat
/// against each default opponent in the column seat.
pub fn sharp_vs_fixed_matchups(
    game: &MatrixGame,
    lie_prob: f64,
    seed: u64,
) -> Vec<(AgentSpec, AgentSpec)> {
    default_opponents()
        .iter()
        .map(|&strategy| {
            (
                AgentSpec::sharp_for(game, PlayerRole::Row, seed).with_lie_prob(lie_prob),
                AgentSpec::fixed(strategy),
            )
        })
        .collect()
}
