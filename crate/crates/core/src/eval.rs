//! Scores predictors against interaction corpora and assembles comparison
//! reports: per-game accuracy for the model predictors (MAP and aggregation,
//! with and without cheap talk) and the fixed-strategy baselines, the lying
//! and repetition analysis subsets, and paired t-tests.

use std::collections::BTreeMap;

use crate::baselines::{baseline_predict, FixedStrategy, ALL_STRATEGIES};
use crate::experts::{build_expert_roster, ExpertFsm, IntentType, PlanType};
use crate::filter::run_filter;
use crate::game::{ActionId, JointAction, PlayerRole};
use crate::logio::InteractionLog;
use crate::models::{build_models, build_prior, ConditionalModels};
use crate::predictors::{
    predict_action_agg, predict_action_map, predict_intent_agg, predict_intent_map,
    predict_plan_agg, predict_plan_map,
};
use crate::stats::{accuracy, lying_rate, paired_t_test, repetition_fraction, TTestResult};
use crate::Error;

/// Per-round model predictions for one log.
#[derive(Debug, Clone)]
pub struct ModelTrace {
    pub map_actions: Vec<ActionId>,
    pub agg_actions: Vec<ActionId>,
    pub map_confidence: Vec<f64>,
    pub agg_confidence: Vec<f64>,
    pub map_plans: Vec<PlanType>,
    pub agg_plans: Vec<PlanType>,
    pub map_intents: Vec<IntentType>,
    pub agg_intents: Vec<IntentType>,
    pub degenerate_rounds: usize,
}

/// Runs the filter over a log and reads off every per-round prediction. The
/// prediction for round t uses the belief held entering round t (which has
/// seen the round-t speech act but not the round-t action).
pub fn model_trace(
    log: &InteractionLog,
    roster: &[ExpertFsm],
    models: &ConditionalModels,
    prior: &crate::belief::BeliefState,
    use_cheap_talk: bool,
) -> Result<ModelTrace, Error> {
    let run = run_filter(log, models, prior, use_cheap_talk)?;
    let n = log.len();
    let mut trace = ModelTrace {
        map_actions: Vec::with_capacity(n),
        agg_actions: Vec::with_capacity(n),
        map_confidence: Vec::with_capacity(n),
        agg_confidence: Vec::with_capacity(n),
        map_plans: Vec::with_capacity(n),
        agg_plans: Vec::with_capacity(n),
        map_intents: Vec::with_capacity(n),
        agg_intents: Vec::with_capacity(n),
        degenerate_rounds: run.degenerate_count(),
    };
    for t in 0..n {
        let bel = run.belief_before(t);
        let map = predict_action_map(bel, models);
        let agg = predict_action_agg(bel, models);
        trace.map_actions.push(map.action().expect("action prediction"));
        trace.agg_actions.push(agg.action().expect("action prediction"));
        trace.map_confidence.push(map.confidence);
        trace.agg_confidence.push(agg.confidence);
        trace.map_plans.push(predict_plan_map(bel, roster).plan().expect("plan"));
        trace.agg_plans.push(predict_plan_agg(bel, roster).plan().expect("plan"));
        trace
            .map_intents
            .push(predict_intent_map(bel, roster).intent().expect("intent"));
        trace
            .agg_intents
            .push(predict_intent_agg(bel, roster).intent().expect("intent"));
    }
    Ok(trace)
}

/// Identifier strings for the four model predictors.
pub const MAP_CT: &str = "map-cheap-talk";
pub const MAP_NO_CT: &str = "map-no-cheap-talk";
pub const AGG_CT: &str = "agg-cheap-talk";
pub const AGG_NO_CT: &str = "agg-no-cheap-talk";

/// One game's scores across all predictors.
#[derive(Debug, Clone)]
pub struct GameEval {
    pub game_id: String,
    pub rounds: usize,
    pub lying_rate: f64,
    pub repetition_fraction: f64,
    pub degenerate_rounds: usize,
    /// predictor id -> action prediction accuracy
    pub accuracy: BTreeMap<String, f64>,
    /// Fraction of rounds where both intent predictors said MaximizePayoff.
    pub intent_payoff_fraction: f64,
}

/// Aggregate evaluation result for one predictor over a corpus.
#[derive(Debug, Clone)]
pub struct EvalResult {
    pub predictor_id: String,
    pub per_game: Vec<f64>,
    pub mean_accuracy: f64,
    pub degenerate_flags: usize,
}

/// Full comparison report over a corpus.
#[derive(Debug, Clone)]
pub struct ComparisonReport {
    pub role: PlayerRole,
    pub predictor_ids: Vec<String>,
    pub games: Vec<GameEval>,
    pub t_tests: Vec<(String, String, TTestResult)>,
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

/// Evaluates every predictor on one log.
pub fn evaluate_log(
    log: &InteractionLog,
    role: PlayerRole,
    epsilon: f64,
    baselines: &[FixedStrategy],
) -> Result<GameEval, Error> {
    let roster = build_expert_roster(&log.game, role);
    let models = build_models(&roster, &log.game, epsilon)?;
    let prior = build_prior(&roster, models.space())?;

    let actuals: Vec<ActionId> = log.rounds.iter().map(|r| r.action_of(role)).collect();
    let with_ct = model_trace(log, &roster, &models, &prior, true)?;
    let without_ct = model_trace(log, &roster, &models, &prior, false)?;

    let mut acc = BTreeMap::new();
    acc.insert(MAP_CT.to_string(), accuracy(&with_ct.map_actions, &actuals)?);
    acc.insert(AGG_CT.to_string(), accuracy(&with_ct.agg_actions, &actuals)?);
    acc.insert(
        MAP_NO_CT.to_string(),
        accuracy(&without_ct.map_actions, &actuals)?,
    );
    acc.insert(
        AGG_NO_CT.to_string(),
        accuracy(&without_ct.agg_actions, &actuals)?,
    );

    let mut joint_history: Vec<JointAction> = Vec::with_capacity(log.len());
    let mut baseline_preds: BTreeMap<FixedStrategy, Vec<ActionId>> =
        baselines.iter().map(|&s| (s, Vec::new())).collect();
    for round in &log.rounds {
        for (&strategy, preds) in baseline_preds.iter_mut() {
            preds.push(baseline_predict(strategy, &joint_history, role));
        }
        joint_history.push(round.joint());
    }
    for (strategy, preds) in &baseline_preds {
        acc.insert(format!("fixed:{}", strategy.id()), accuracy(preds, &actuals)?);
    }

    let payoff_rounds = with_ct
        .map_intents
        .iter()
        .zip(with_ct.agg_intents.iter())
        .filter(|(m, a)| {
            **m == IntentType::MaximizePayoff && **a == IntentType::MaximizePayoff
        })
        .count();

    Ok(GameEval {
        game_id: log.game_id.clone(),
        rounds: log.len(),
        lying_rate: lying_rate(log, role),
        repetition_fraction: repetition_fraction(log, role),
        degenerate_rounds: with_ct.degenerate_rounds + without_ct.degenerate_rounds,
        accuracy: acc,
        intent_payoff_fraction: if log.is_empty() {
            1.0
        } else {
            payoff_rounds as f64 / log.len() as f64
        },
    })
}

impl ComparisonReport {
    pub fn eval_results(&self) -> Vec<EvalResult> {
        self.predictor_ids
            .iter()
            .map(|id| {
                let per_game: Vec<f64> =
                    self.games.iter().map(|g| g.accuracy[id]).collect();
                EvalResult {
                    predictor_id: id.clone(),
                    mean_accuracy: mean(&per_game),
                    per_game,
                    degenerate_flags: self.games.iter().map(|g| g.degenerate_rounds).sum(),
                }
            })
            .collect()
    }

    pub fn mean_accuracy(&self, predictor_id: &str) -> f64 {
        mean(&self
            .games
            .iter()
            .map(|g| g.accuracy[predictor_id])
            .collect::<Vec<_>>())
    }

    fn subset_mean(&self, predictor_id: &str, keep: impl Fn(&GameEval) -> bool) -> (f64, usize) {
        let subset: Vec<f64> = self
            .games
            .iter()
            .filter(|g| keep(g))
            .map(|g| g.accuracy[predictor_id])
            .collect();
        (mean(&subset), subset.len())
    }

    /// Mean accuracy over games where the modeled player lied on fewer than
    /// a quarter of its proposals.
    pub fn honest_subset_mean(&self, predictor_id: &str) -> (f64, usize) {
        self.subset_mean(predictor_id, |g| g.lying_rate < 0.25)
    }

    /// Mean accuracy over games with at most 25% continuous repetition.
    pub fn high_variance_subset_mean(&self, predictor_id: &str) -> (f64, usize) {
        self.subset_mean(predictor_id, |g| g.repetition_fraction <= 0.25)
    }

    fn predictor_columns(id: &str) -> (&str, &str) {
        match id {
            MAP_CT => ("map", "true"),
            MAP_NO_CT => ("map", "false"),
            AGG_CT => ("agg", "true"),
            AGG_NO_CT => ("agg", "false"),
            other => (other.trim_start_matches("fixed:"), "na"),
        }
    }

    /// CSV report: one row per (game, predictor), followed by mean rows over
    /// the whole corpus and the lying / repetition analysis subsets.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "game_id,predictor,with_cheap_talk,accuracy,lying_rate,repetition_fraction,degenerate_flags\n",
        );
        for game in &self.games {
            for id in &self.predictor_ids {
                let (name, ct) = Self::predictor_columns(id);
                out.push_str(&format!(
                    "{},{},{},{:.6},{:.6},{:.6},{}\n",
                    game.game_id,
                    name,
                    ct,
                    game.accuracy[id],
                    game.lying_rate,
                    game.repetition_fraction,
                    game.degenerate_rounds,
                ));
            }
        }
        type SubsetFilter = Box<dyn Fn(&GameEval) -> bool>;
        let subsets: [(&str, SubsetFilter); 3] = [
            ("mean:all", Box::new(|_| true)),
            ("mean:lying-lt-0.25", Box::new(|g| g.lying_rate < 0.25)),
            (
                "mean:repetition-le-0.25",
                Box::new(|g| g.repetition_fraction <= 0.25),
            ),
        ];
        for (label, keep) in &subsets {
            let kept: Vec<&GameEval> = self.games.iter().filter(|g| keep(g)).collect();
            let mean_of = |f: &dyn Fn(&GameEval) -> f64| {
                mean(&kept.iter().map(|g| f(g)).collect::<Vec<_>>())
            };
            for id in &self.predictor_ids {
                let (name, ct) = Self::predictor_columns(id);
                out.push_str(&format!(
                    "{},{},{},{:.6},{:.6},{:.6},{}\n",
                    label,
                    name,
                    ct,
                    mean_of(&|g| g.accuracy[id]),
                    mean_of(&|g| g.lying_rate),
                    mean_of(&|g| g.repetition_fraction),
                    kept.iter().map(|g| g.degenerate_rounds).sum::<usize>(),
                ));
            }
        }
        out
    }

    /// Human-readable summary mirroring the MAP/aggregation-by-cheap-talk
    /// grouping, plus the analysis subsets and t-tests.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "comparison over {} games, modeling the {} player\n\n",
            self.games.len(),
            self.role.label()
        ));
        out.push_str("model predictors (mean action accuracy):\n");
        for id in [MAP_CT, AGG_CT, MAP_NO_CT, AGG_NO_CT] {
            if self.predictor_ids.iter().any(|p| p == id) {
                out.push_str(&format!("  {:<20} {:.4}\n", id, self.mean_accuracy(id)));
            }
        }
        let mut fixed: Vec<(&String, f64)> = self
            .predictor_ids
            .iter()
            .filter(|id| id.starts_with("fixed:"))
            .map(|id| (id, self.mean_accuracy(id)))
            .collect();
        if !fixed.is_empty() {
            fixed.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(b.0)));
            out.push_str("\nfixed-model baselines (best first):\n");
            for (id, acc) in &fixed {
                out.push_str(&format!("  {:<28} {:.4}\n", &id[6..], acc));
            }
        }
        let model_ids: Vec<&str> = [MAP_CT, AGG_CT, MAP_NO_CT, AGG_NO_CT]
            .into_iter()
            .filter(|id| self.predictor_ids.iter().any(|p| p == id))
            .collect();
        if !model_ids.is_empty() {
            out.push_str("\nanalysis subsets (mean accuracy):\n");
            for id in &model_ids {
                let (honest, honest_n) = self.honest_subset_mean(id);
                let (varied, varied_n) = self.high_variance_subset_mean(id);
                out.push_str(&format!(
                    "  {:<20} lying<0.25: {:.4} ({} games)   repetition<=0.25: {:.4} ({} games)\n",
                    id, honest, honest_n, varied, varied_n
                ));
            }
        }
        if !self.t_tests.is_empty() {
            out.push_str("\npaired t-tests (two-tailed):\n");
            for (a, b, res) in &self.t_tests {
                out.push_str(&format!(
                    "  {:<20} vs {:<24} t = {:>8.4}  df = {:>2}  p = {:.4}{}\n",
                    a,
                    b,
                    res.t,
                    res.df,
                    res.p_two_tailed,
                    if res.infinite_t { " (zero-variance)" } else { "" }
                ));
            }
        }
        out
    }
}

/// Evaluates the model predictors and the given baselines over a corpus,
/// with pairwise t-tests among the model predictors and between the
/// cheap-talk MAP predictor and every baseline.
pub fn compare_predictors(
    corpus: &[InteractionLog],
    role: PlayerRole,
    epsilon: f64,
    baselines: &[FixedStrategy],
) -> Result<ComparisonReport, Error> {
    if corpus.is_empty() {
        return Err(Error::InvalidArgument("empty corpus".into()));
    }
    let mut predictor_ids: Vec<String> = vec![
        MAP_CT.to_string(),
        AGG_CT.to_string(),
        MAP_NO_CT.to_string(),
        AGG_NO_CT.to_string(),
    ];
    for s in baselines {
        predictor_ids.push(format!("fixed:{}", s.id()));
    }

    let games = corpus
        .iter()
        .map(|log| evaluate_log(log, role, epsilon, baselines))
        .collect::<Result<Vec<_>, _>>()?;

    let series = |id: &str| -> Vec<f64> { games.iter().map(|g| g.accuracy[id]).collect() };
    let mut t_tests = Vec::new();
    let model_ids = [MAP_CT, AGG_CT, MAP_NO_CT, AGG_NO_CT];
    if games.len() >= 2 {
        for i in 0..model_ids.len() {
            for j in i + 1..model_ids.len() {
                t_tests.push((
                    model_ids[i].to_string(),
                    model_ids[j].to_string(),
                    paired_t_test(&series(model_ids[i]), &series(model_ids[j]))?,
                ));
            }
        }
        for s in baselines {
            let id = format!("fixed:{}", s.id());
            t_tests.push((
                MAP_CT.to_string(),
                id.clone(),
                paired_t_test(&series(MAP_CT), &series(&id))?,
            ));
        }
    }

    Ok(ComparisonReport {
        role,
        predictor_ids,
        games,
        t_tests,
    })
}

/// All 21 fixed strategies, for comparison runs.
pub fn all_baselines() -> Vec<FixedStrategy> {
    ALL_STRATEGIES.to_vec()
}
