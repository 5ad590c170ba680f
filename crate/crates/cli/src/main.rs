//! Command-line front door: simulate corpora, run the filter and emit
//! per-round predictions, evaluate and compare predictors, and dump the
//! expert roster.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cheaptalk::eval::{all_baselines, compare_predictors, model_trace};
use cheaptalk::{
    build_expert_roster, build_models, build_prior, generate_corpus, read_corpus, run_filter,
    write_corpus, AgentSpec, ExpertFsm, FixedStrategy, GameEvent, InteractionLog, MatrixGame,
    PlanCycle, PlayerRole, SimConfig, SpeechAct,
};

#[derive(Parser)]
#[command(
    name = "cheaptalk",
    about = "Opponent modeling for repeated 2x2 games with cheap talk",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum RoleArg {
    Row,
    Col,
}

impl From<RoleArg> for PlayerRole {
    fn from(role: RoleArg) -> PlayerRole {
        match role {
            RoleArg::Row => PlayerRole::Row,
            RoleArg::Col => PlayerRole::Column,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a corpus of reference-agent games against fixed opponents.
    Simulate(SimulateArgs),
    /// Per-round action/plan/intent predictions for one log.
    Predict(PredictArgs),
    /// Evaluate the model predictors over a corpus (EvalResult CSV).
    Evaluate(EvaluateArgs),
    /// Full comparison report including the fixed-strategy baselines.
    Compare(CompareArgs),
    /// Dump the expert machines: states, emissions, transitions.
    Roster(RosterArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Number of games to simulate.
    #[arg(long, default_value_t = 12)]
    games: usize,
    /// Rounds per game.
    #[arg(long, default_value_t = 51)]
    rounds: usize,
    /// Master seed; all randomness derives from it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Probability that the reference agent contradicts its own proposal.
    #[arg(long, default_value_t = 0.0)]
    lie_prob: f64,
    /// Disable the speech phase entirely.
    #[arg(long)]
    no_cheap_talk: bool,
    /// Comma-separated fixed opponent ids (defaults to the standard twelve).
    #[arg(long, value_delimiter = ',')]
    opponents: Vec<String>,
    /// Output .ijl path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PredictArgs {
    /// Input .ijl log (first game is used if the file holds several).
    #[arg(long)]
    log: PathBuf,
    /// Which seat to model.
    #[arg(long, value_enum, default_value = "col")]
    role: RoleArg,
    /// Ignore all speech evidence.
    #[arg(long)]
    no_cheap_talk: bool,
    /// Smoothing mass for the conditional models.
    #[arg(long, default_value_t = 0.02)]
    epsilon: f64,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the belief trajectory (round, state, probability).
    #[arg(long)]
    beliefs_out: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Input .ijl corpus.
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, value_enum, default_value = "row")]
    role: RoleArg,
    #[arg(long, default_value_t = 0.02)]
    epsilon: f64,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// Input .ijl corpus.
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, value_enum, default_value = "row")]
    role: RoleArg,
    #[arg(long, default_value_t = 0.02)]
    epsilon: f64,
    /// CSV output path; the human-readable summary always goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RosterArgs {
    #[arg(long, value_enum, default_value = "row")]
    role: RoleArg,
}

enum Failure {
    /// Bad flags, unreadable files, validation failures.
    Input(String),
    /// Library invariant violations: these indicate bugs, not bad input.
    Internal(String),
}

impl From<cheaptalk::Error> for Failure {
    fn from(err: cheaptalk::Error) -> Failure {
        use cheaptalk::Error::*;
        match err {
            InvalidDistribution { .. } | BeliefLength { .. } | DegenerateBelief
            | WrongBeliefPhase => Failure::Internal(err.to_string()),
            _ => Failure::Input(err.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(err: std::io::Error) -> Failure {
        Failure::Input(err.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{err}");
                return ExitCode::SUCCESS;
            }
            let rendered = err.to_string();
            let first = rendered.lines().next().unwrap_or("bad arguments");
            eprintln!("{first}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Predict(args) => predict(args),
        Command::Evaluate(args) => evaluate(args),
        Command::Compare(args) => compare(args),
        Command::Roster(args) => roster(args),
    }
}

fn parse_opponents(ids: &[String]) -> Result<Vec<FixedStrategy>, Failure> {
    if ids.is_empty() {
        return Ok(cheaptalk::default_opponents().to_vec());
    }
    ids.iter()
        .map(|id| {
            FixedStrategy::from_id(id)
                .ok_or_else(|| Failure::Input(format!("unknown strategy id {id:?}")))
        })
        .collect()
}

fn simulate(args: SimulateArgs) -> Result<(), Failure> {
    if args.games == 0 || args.rounds == 0 {
        return Err(Failure::Input("games and rounds must be positive".into()));
    }
    let game = MatrixGame::prisoners_dilemma();
    let opponents = parse_opponents(&args.opponents)?;
    let config = SimConfig {
        rounds: args.rounds,
        games: args.games,
        cheap_talk: !args.no_cheap_talk,
        seed: args.seed,
    };
    let matchups: Vec<_> = (0..args.games)
        .map(|i| {
            let opponent = opponents[i % opponents.len()];
            (
                AgentSpec::sharp_for(&game, PlayerRole::Row, args.seed)
                    .with_lie_prob(args.lie_prob),
                AgentSpec::fixed(opponent),
            )
        })
        .collect();
    let corpus = generate_corpus(&config, &matchups)?;
    fs::write(&args.out, write_corpus(&corpus))?;
    println!(
        "wrote {} games x {} rounds to {}",
        corpus.len(),
        args.rounds,
        args.out.display()
    );
    Ok(())
}

fn load_corpus(path: &PathBuf) -> Result<Vec<InteractionLog>, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok(read_corpus(&text)?)
}

fn write_or_print(out: &Option<PathBuf>, content: &str) -> Result<(), Failure> {
    match out {
        Some(path) => {
            fs::write(path, content)?;
            Ok(())
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn predict(args: PredictArgs) -> Result<(), Failure> {
    let corpus = load_corpus(&args.log)?;
    let log = corpus
        .first()
        .ok_or_else(|| Failure::Input(format!("{}: no games found", args.log.display())))?;
    let role: PlayerRole = args.role.into();
    let roster = build_expert_roster(&log.game, role);
    let models = build_models(&roster, &log.game, args.epsilon)?;
    let prior = build_prior(&roster, models.space())?;
    let use_cheap_talk = !args.no_cheap_talk;
    let trace = model_trace(log, &roster, &models, &prior, use_cheap_talk)?;

    let mut csv = String::from(
        "round,actual,map_action,map_confidence,agg_action,agg_confidence,map_plan,agg_plan,map_intent,agg_intent\n",
    );
    for (t, round) in log.rounds.iter().enumerate() {
        csv.push_str(&format!(
            "{},{},{},{:.6},{},{:.6},{},{},{},{}\n",
            t,
            round.action_of(role).letter(),
            trace.map_actions[t].letter(),
            trace.map_confidence[t],
            trace.agg_actions[t].letter(),
            trace.agg_confidence[t],
            trace.map_plans[t].label(),
            trace.agg_plans[t].label(),
            trace.map_intents[t].label(),
            trace.agg_intents[t].label(),
        ));
    }
    write_or_print(&args.out, &csv)?;

    if let Some(path) = &args.beliefs_out {
        let run = run_filter(log, &models, &prior, use_cheap_talk)?;
        let mut beliefs = String::from("round,state,probability\n");
        for t in 0..log.len() {
            let bel = run.belief_before(t);
            for s in 0..models.space().len() {
                beliefs.push_str(&format!(
                    "{},{},{:.9}\n",
                    t,
                    models.space().label(s),
                    bel.prob(s)
                ));
            }
        }
        fs::write(path, beliefs)?;
    }
    Ok(())
}

fn evaluate(args: EvaluateArgs) -> Result<(), Failure> {
    let corpus = load_corpus(&args.corpus)?;
    let report = compare_predictors(&corpus, args.role.into(), args.epsilon, &[])?;
    let mut csv = String::from("predictor,game_id,accuracy,degenerate_flags\n");
    for result in report.eval_results() {
        for (game, acc) in report.games.iter().zip(result.per_game.iter()) {
            csv.push_str(&format!(
                "{},{},{:.6},{}\n",
                result.predictor_id, game.game_id, acc, game.degenerate_rounds
            ));
        }
        csv.push_str(&format!(
            "{},mean,{:.6},{}\n",
            result.predictor_id, result.mean_accuracy, result.degenerate_flags
        ));
    }
    write_or_print(&args.out, &csv)
}

fn compare(args: CompareArgs) -> Result<(), Failure> {
    let corpus = load_corpus(&args.corpus)?;
    let report = compare_predictors(&corpus, args.role.into(), args.epsilon, &all_baselines())?;
    print!("{}", report.summary());
    if let Some(path) = &args.out {
        fs::write(path, report.to_csv())?;
    }
    Ok(())
}

fn event_labels(expert: &ExpertFsm) -> Vec<(String, GameEvent)> {
    let own = expert.plan.clone();
    let cc = PlanCycle::pure(cheaptalk::JointAction::parse("AC").unwrap());
    let foreign = if own.same_cycle(&cc) {
        PlanCycle::pure(cheaptalk::JointAction::parse("BD").unwrap())
    } else {
        cc
    };
    vec![
        ("RoundStart".into(), GameEvent::RoundStart),
        (
            format!("PartnerProposed({})", own.label()),
            GameEvent::PartnerProposed(SpeechAct::Propose(own)),
        ),
        (
            "PartnerProposed(other)".into(),
            GameEvent::PartnerProposed(SpeechAct::Propose(foreign)),
        ),
        ("PartnerComplied".into(), GameEvent::PartnerComplied),
        ("PartnerDeviated".into(), GameEvent::PartnerDeviated),
        ("PunishmentSatisfied".into(), GameEvent::PunishmentSatisfied),
        ("SelfDeviated".into(), GameEvent::SelfDeviated),
    ]
}

fn roster(args: RosterArgs) -> Result<(), Failure> {
    let game = MatrixGame::prisoners_dilemma();
    let role: PlayerRole = args.role.into();
    let roster = build_expert_roster(&game, role);
    for expert in &roster {
        println!(
            "{} ({}, {}, plan {}, potential {:.1}, seat {})",
            expert.name,
            expert.plan_type.label(),
            expert.intent_type.label(),
            expert.plan.label(),
            expert.potential,
            expert.seat.label()
        );
        println!("  states:");
        for idx in 0..expert.state_count() {
            let st = expert.state(idx);
            let marker = if idx == expert.start { "*" } else { " " };
            let speech: Vec<String> = st
                .speech
                .iter()
                .map(|(k, p)| format!("{} {:.2}", k.label(), p))
                .collect();
            println!(
                "   {marker}{:<14} speech: {:<38} action: {} {:.2} / {} {:.2}",
                expert.state_label(idx),
                speech.join(", "),
                cheaptalk::ActionId::from_flags(role, true).letter(),
                st.action_coop,
                cheaptalk::ActionId::from_flags(role, false).letter(),
                1.0 - st.action_coop,
            );
        }
        println!("  transitions:");
        for idx in 0..expert.state_count() {
            for (label, event) in event_labels(expert) {
                let next = expert.step(idx, &event);
                if next != idx {
                    println!(
                        "    {} --{}--> {}",
                        expert.state_label(idx),
                        label,
                        expert.state_label(next)
                    );
                }
            }
        }
        println!();
    }
    Ok(())
}
