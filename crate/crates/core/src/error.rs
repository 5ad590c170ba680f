use crate::game::ActionId;

/// Library-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("joint action pairs a {row:?} row action with a {column:?} column action")]
    InvalidJointAction { row: ActionId, column: ActionId },

    #[error("plan cycle must hold 1 or 2 joint actions, got {len}")]
    InvalidPlanCycle { len: usize },

    #[error("speech kind {kind} {}", if *.present { "does not take a proposal payload" } else { "requires a proposal payload" })]
    ProposalPayload { kind: String, present: bool },

    #[error("expert roster is empty")]
    EmptyRoster,

    #[error("smoothing epsilon {0} outside (0, 0.2]")]
    InvalidEpsilon(f64),

    #[error("invalid probability table: {what}")]
    InvalidDistribution { what: String },

    #[error("belief vector length {got} does not match state space size {expected}")]
    BeliefLength { expected: usize, got: usize },

    #[error("belief mass is zero or not finite")]
    DegenerateBelief,

    #[error("filter step requires a propositional-phase belief")]
    WrongBeliefPhase,

    #[error("log line {line}: {msg}")]
    LogParse { line: usize, msg: String },

    #[error("round {round}: recorded payoffs do not match the game payoff table")]
    PayoffMismatch { round: usize },

    #[error("replay log {game_id} has {available} rounds, {needed} required")]
    ReplayTooShort {
        game_id: String,
        available: usize,
        needed: usize,
    },

    #[error("prediction and actual sequences differ in length ({predictions} vs {actuals})")]
    LengthMismatch { predictions: usize, actuals: usize },

    #[error("paired t-test requires at least 2 paired samples, got {0}")]
    TooFewSamples(usize),

    #[error("{0}")]
    InvalidArgument(String),
}
