//! Opponent modeling for two-player repeated 2x2 games with cheap talk.
//!
//! The library maintains a Bayesian belief over the hidden expert states of
//! a modeled player and turns that belief into predictions of its next
//! action, plan type, and intent type, via MAP and aggregation estimators.
//! A simulation harness plays reference and fixed-strategy agents against
//! each other to produce interaction logs, and an evaluation layer scores
//! predictors against those logs.
//!
//! Modules follow the pipeline: [`game`] defines the payoff structure,
//! [`experts`] the hidden-state vocabulary, [`models`] compiles the
//! conditional probability tables, [`filter`] runs the belief updates,
//! [`predictors`] reads predictions off beliefs, [`baselines`] provides the
//! fixed comparison strategies, [`sim`] generates corpora, [`logio`] defines
//! the log format, and [`stats`]/[`eval`] score everything.

mod error;

pub mod baselines;
pub mod belief;
pub mod eval;
pub mod experts;
pub mod filter;
pub mod game;
pub mod logio;
pub mod models;
pub mod predictors;
pub mod sharp;
pub mod sim;
pub mod speech;
pub mod stats;

pub use error::Error;

pub use baselines::{baseline_predict, next_action_for, strategy_next_action, FixedStrategy};
pub use belief::{BeliefPhase, BeliefState, StateSpace};
pub use eval::{compare_predictors, evaluate_log, model_trace, ComparisonReport, EvalResult};
pub use experts::{
    build_expert_roster, expert_intent_type, expert_plan_type, fsm_step, ExpertFsm, GameEvent,
    IntentType, PlanType, StateKind,
};
pub use filter::{filter_step, run_filter, FilterRun, FilterStepOutput, ObservationRecord};
pub use game::{is_cooperate, payoff, ActionId, JointAction, MatrixGame, PlayerRole};
pub use logio::{
    parse_speech, parse_speech_acts, read_corpus, read_log, write_corpus, write_log,
    InteractionLog, RoundRecord,
};
pub use models::{build_models, build_prior, ConditionalModels, ModelTables};
pub use predictors::{
    predict_action_agg, predict_action_map, predict_intent_agg, predict_intent_map,
    predict_plan_agg, predict_plan_map, Prediction, PredictionMethod, PredictionValue,
};
pub use sharp::{sharp_agent_step, SharpAgentConfig};
pub use sim::{
    apply_lie, default_opponents, generate_corpus, run_game, sharp_vs_fixed_matchups, AgentKind,
    AgentSpec, SimConfig,
};
pub use speech::{PlanCycle, SpeechAct, SpeechKind};
pub use stats::{accuracy, lying_rate, paired_t_test, repetition_fraction, TTestResult};
