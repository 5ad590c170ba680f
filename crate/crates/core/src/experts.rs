//! Expert finite-state machines: the hidden-state vocabulary of the model.
//!
//! An expert is a self-contained strategy built around a plan cycle. Leaders
//! push their plan with a trigger strategy (offer, cooperate, punish);
//! followers play along with a deal they are willing to strike (accept) and
//! fall back to best-responding when no deal holds. Every expert carries a
//! plan type and an intent type used by the plan/intent predictors.

use serde::{Deserialize, Serialize};

use crate::game::{ActionId, JointAction, MatrixGame, PlayerRole};
use crate::speech::{PlanCycle, SpeechAct, SpeechKind};

/// Leader experts drive a plan via trigger strategies; followers best-respond
/// to the plan they expect their partner to push.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PlanType {
    Leader,
    Follower,
}

impl PlanType {
    pub fn label(self) -> &'static str {
        match self {
            PlanType::Leader => "Leader",
            PlanType::Follower => "Follower",
        }
    }
}

/// The designer goal an expert pursues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IntentType {
    MaximizePayoff,
    MaximizeFairness,
}

impl IntentType {
    pub fn label(self) -> &'static str {
        match self {
            IntentType::MaximizePayoff => "MaximizePayoff",
            IntentType::MaximizeFairness => "MaximizeFairness",
        }
    }
}

/// Index of an expert within its roster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExpertId(pub usize);

/// Events that drive expert state transitions. Proposal events fire in the
/// speech phase of a round; the rest are derived from the played actions.
#[derive(Debug, Clone, PartialEq)]
pub enum GameEvent {
    RoundStart,
    PartnerProposed(SpeechAct),
    PartnerComplied,
    PartnerDeviated,
    PunishmentSatisfied,
    SelfDeviated,
}

/// Internal event alphabet: proposals collapse to "own plan" / "other plan".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum EventSymbol {
    RoundStart = 0,
    ProposedOwnPlan = 1,
    ProposedOtherPlan = 2,
    PartnerComplied = 3,
    PartnerDeviated = 4,
    PunishmentSatisfied = 5,
    SelfDeviated = 6,
}

pub(crate) const EVENT_SYMBOLS: [EventSymbol; 7] = [
    EventSymbol::RoundStart,
    EventSymbol::ProposedOwnPlan,
    EventSymbol::ProposedOtherPlan,
    EventSymbol::PartnerComplied,
    EventSymbol::PartnerDeviated,
    EventSymbol::PunishmentSatisfied,
    EventSymbol::SelfDeviated,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StateKind {
    Offer,
    Cooperate,
    Punish,
    Accept,
    BestRespond,
}

/// One state of an expert machine, with its speech and action emissions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FsmState {
    pub kind: StateKind,
    /// Plan-cycle position this state plays (0 for non-plan states).
    pub step: usize,
    /// Distribution over speech kinds emitted from this state.
    pub speech: Vec<(SpeechKind, f64)>,
    /// Probability mass on the cooperative action of the owner's seat.
    pub action_coop: f64,
}

impl FsmState {
    fn new(kind: StateKind, step: usize, speech: Vec<(SpeechKind, f64)>, action_coop: f64) -> Self {
        FsmState {
            kind,
            step,
            speech,
            action_coop,
        }
    }

    pub fn label(&self, cycle_len: usize) -> String {
        let base = match self.kind {
            StateKind::Offer => "Offer",
            StateKind::Cooperate => "Cooperate",
            StateKind::Punish => "Punish",
            StateKind::Accept => "Accept",
            StateKind::BestRespond => "BestRespond",
        };
        if cycle_len > 1 && matches!(self.kind, StateKind::Cooperate | StateKind::Accept) {
            format!("{base}[{}]", self.step)
        } else {
            base.to_string()
        }
    }

    pub fn speech_kind_prob(&self, kind: SpeechKind) -> f64 {
        self.speech
            .iter()
            .find(|(k, _)| *k == kind)
            .map(|(_, p)| *p)
            .unwrap_or(0.0)
    }
}

/// An expert strategy as a finite-state machine.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpertFsm {
    pub id: ExpertId,
    pub name: String,
    pub seat: PlayerRole,
    pub plan: PlanCycle,
    pub plan_type: PlanType,
    pub intent_type: IntentType,
    /// Estimated achievable per-round payoff in points.
    pub potential: f64,
    pub states: Vec<FsmState>,
    pub start: usize,
    /// transitions[state][event symbol] -> next state index
    transitions: Vec<[usize; 7]>,
}

impl ExpertFsm {
    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, idx: usize) -> &FsmState {
        &self.states[idx]
    }

    pub fn state_label(&self, idx: usize) -> String {
        self.states[idx].label(self.plan.len())
    }

    pub fn with_intent_type(mut self, intent: IntentType) -> Self {
        self.intent_type = intent;
        self
    }

    /// The action this state plays when followed deterministically.
    pub fn prescribed_action(&self, state_idx: usize) -> ActionId {
        let st = &self.states[state_idx];
        ActionId::from_flags(self.seat, st.action_coop >= 0.5)
    }

    /// The partner action this state expects, when the state carries a deal.
    pub fn expected_partner_action(&self, state_idx: usize) -> Option<ActionId> {
        let st = &self.states[state_idx];
        match st.kind {
            StateKind::Offer | StateKind::Cooperate | StateKind::Accept => {
                Some(self.plan.step(st.step).action_of(self.seat.other()))
            }
            StateKind::Punish | StateKind::BestRespond => None,
        }
    }

    /// The speech act this state emits for a given kind (proposals carry the
    /// expert's own plan).
    pub fn speech_act_for(&self, kind: SpeechKind) -> SpeechAct {
        match kind {
            SpeechKind::Propose => SpeechAct::Propose(self.plan.clone()),
            SpeechKind::Threat => SpeechAct::Threat,
            SpeechKind::Praise => SpeechAct::Praise,
            SpeechKind::Insult => SpeechAct::Insult,
            SpeechKind::Forgive => SpeechAct::Forgive,
            SpeechKind::Accuse => SpeechAct::Accuse,
            SpeechKind::Silence => SpeechAct::Silence,
        }
    }

    pub(crate) fn symbol_for(&self, event: &GameEvent) -> EventSymbol {
        match event {
            GameEvent::RoundStart => EventSymbol::RoundStart,
            GameEvent::PartnerProposed(act) => match act.proposal() {
                Some(plan) if plan.same_cycle(&self.plan) => EventSymbol::ProposedOwnPlan,
                Some(_) => EventSymbol::ProposedOtherPlan,
                None => EventSymbol::RoundStart,
            },
            GameEvent::PartnerComplied => EventSymbol::PartnerComplied,
            GameEvent::PartnerDeviated => EventSymbol::PartnerDeviated,
            GameEvent::PunishmentSatisfied => EventSymbol::PunishmentSatisfied,
            GameEvent::SelfDeviated => EventSymbol::SelfDeviated,
        }
    }

    pub(crate) fn step_symbol(&self, state_idx: usize, symbol: EventSymbol) -> usize {
        self.transitions[state_idx][symbol as usize]
    }

    /// Total transition function over (state, event).
    pub fn step(&self, state_idx: usize, event: &GameEvent) -> usize {
        self.step_symbol(state_idx, self.symbol_for(event))
    }

    pub fn find_state(&self, kind: StateKind, step: usize) -> Option<usize> {
        self.states
            .iter()
            .position(|s| s.kind == kind && s.step == step)
            .or_else(|| self.states.iter().position(|s| s.kind == kind))
    }
}

/// The unique successor of `state` under `event`.
pub fn fsm_step(expert: &ExpertFsm, state_idx: usize, event: &GameEvent) -> usize {
    expert.step(state_idx, event)
}

pub fn expert_plan_type(expert: &ExpertFsm) -> PlanType {
    expert.plan_type
}

pub fn expert_intent_type(expert: &ExpertFsm) -> IntentType {
    expert.intent_type
}

fn leader_speech_offer() -> Vec<(SpeechKind, f64)> {
    vec![(SpeechKind::Propose, 1.0)]
}

fn leader_speech_cooperate() -> Vec<(SpeechKind, f64)> {
    vec![(SpeechKind::Silence, 0.7), (SpeechKind::Praise, 0.3)]
}

fn leader_speech_punish() -> Vec<(SpeechKind, f64)> {
    vec![(SpeechKind::Threat, 0.7), (SpeechKind::Accuse, 0.3)]
}

fn follower_speech_accept() -> Vec<(SpeechKind, f64)> {
    vec![(SpeechKind::Silence, 0.8), (SpeechKind::Praise, 0.2)]
}

fn follower_speech_betrayed() -> Vec<(SpeechKind, f64)> {
    vec![(SpeechKind::Silence, 0.8), (SpeechKind::Accuse, 0.2)]
}

fn follower_speech_silent() -> Vec<(SpeechKind, f64)> {
    vec![(SpeechKind::Silence, 1.0)]
}

fn own_coop_mass(plan: &PlanCycle, seat: PlayerRole, step: usize) -> f64 {
    if plan.step(step).action_of(seat).is_cooperate() {
        1.0
    } else {
        0.0
    }
}

/// The action maximizing the seat's worst-case payoff (pure maximin).
fn maximin_coop(game: &MatrixGame, seat: PlayerRole) -> bool {
    let worst = |coop: bool| -> u32 {
        [true, false]
            .iter()
            .map(|&partner_coop| {
                let own = ActionId::from_flags(seat, coop);
                let partner = ActionId::from_flags(seat.other(), partner_coop);
                let joint = match seat {
                    PlayerRole::Row => JointAction {
                        row: own,
                        column: partner,
                    },
                    PlayerRole::Column => JointAction {
                        row: partner,
                        column: own,
                    },
                };
                game.payoff_for(joint, seat)
            })
            .min()
            .unwrap()
    };
    worst(true) > worst(false)
}

fn build_leader(
    id: usize,
    name: &str,
    game: &MatrixGame,
    seat: PlayerRole,
    plan: PlanCycle,
) -> ExpertFsm {
    let len = plan.len();
    let mut states = vec![FsmState::new(
        StateKind::Offer,
        0,
        leader_speech_offer(),
        own_coop_mass(&plan, seat, 0),
    )];
    for step in 0..len {
        states.push(FsmState::new(
            StateKind::Cooperate,
            step,
            leader_speech_cooperate(),
            own_coop_mass(&plan, seat, step),
        ));
    }
    let punish = states.len();
    states.push(FsmState::new(
        StateKind::Punish,
        0,
        leader_speech_punish(),
        0.0,
    ));

    let offer = 0usize;
    let coop = |step: usize| 1 + (step % len);
    let mut transitions = Vec::with_capacity(states.len());
    // Offer plays cycle step 0; agreement or compliance moves into the cycle.
    transitions.push([
        offer,         // RoundStart
        coop(0),       // ProposedOwnPlan
        offer,         // ProposedOtherPlan
        coop(1 % len), // PartnerComplied: step 0 done, next is step 1
        punish,        // PartnerDeviated
        offer,         // PunishmentSatisfied
        offer,         // SelfDeviated
    ]);
    for step in 0..len {
        let here = coop(step);
        transitions.push([
            here,
            here,
            here,
            coop(step + 1),
            punish,
            here,
            offer,
        ]);
    }
    transitions.push([
        punish, punish, punish, punish, punish, offer, punish,
    ]);

    ExpertFsm {
        id: ExpertId(id),
        name: name.to_string(),
        seat,
        potential: plan.mean_payoff(game, seat),
        plan,
        plan_type: PlanType::Leader,
        intent_type: IntentType::MaximizePayoff,
        states,
        start: offer,
        transitions,
    }
}

fn build_follower(
    id: usize,
    name: &str,
    game: &MatrixGame,
    seat: PlayerRole,
    plan: PlanCycle,
    trusting: bool,
) -> ExpertFsm {
    let len = plan.len();
    let mut states = Vec::new();
    for step in 0..len {
        states.push(FsmState::new(
            StateKind::Accept,
            step,
            follower_speech_accept(),
            own_coop_mass(&plan, seat, step),
        ));
    }
    let best_respond = states.len();
    states.push(FsmState::new(
        StateKind::BestRespond,
        0,
        if trusting {
            follower_speech_betrayed()
        } else {
            follower_speech_silent()
        },
        if maximin_coop(game, seat) { 1.0 } else { 0.0 },
    ));

    let accept = |step: usize| step % len;
    let mut transitions = Vec::with_capacity(states.len());
    for step in 0..len {
        let here = accept(step);
        transitions.push([
            here,
            here,
            here,
            accept(step + 1),
            best_respond,
            here,
            best_respond,
        ]);
    }
    transitions.push([
        best_respond,
        accept(0),
        best_respond,
        best_respond,
        best_respond,
        best_respond,
        best_respond,
    ]);

    ExpertFsm {
        id: ExpertId(id),
        name: name.to_string(),
        seat,
        potential: plan.mean_payoff(game, seat),
        plan,
        plan_type: PlanType::Follower,
        intent_type: IntentType::MaximizePayoff,
        states,
        start: if trusting { accept(0) } else { best_respond },
        transitions,
    }
}

fn joint(s: &str) -> JointAction {
    JointAction::parse(s).expect("static joint action label")
}

/// Builds the expert roster for one seat of a 2x2 game.
///
/// The roster covers pure and alternating leaders, the matching followers,
/// and the plan-free maximin and best-response experts. Every leader carries
/// a punish state reachable through partner deviation.
pub fn build_expert_roster(game: &MatrixGame, seat: PlayerRole) -> Vec<ExpertFsm> {
    let cc = PlanCycle::pure(joint("AC"));
    let ac_bc = PlanCycle::alternating(joint("AC"), joint("BC"));
    let ac_ad = PlanCycle::alternating(joint("AC"), joint("AD"));
    let dd = PlanCycle::pure(joint("BD"));
    // A follower expects the partner to lead with the plan that favors the
    // partner's own seat.
    let partner_greedy = match seat {
        PlayerRole::Row => ac_ad.clone(),
        PlayerRole::Column => ac_bc.clone(),
    };

    vec![
        build_leader(0, "leader-pure-cc", game, seat, cc.clone()),
        build_leader(1, "leader-alt-ac-bc", game, seat, ac_bc),
        build_leader(2, "leader-alt-ac-ad", game, seat, ac_ad),
        build_follower(3, "follower-pure", game, seat, cc, true),
        build_follower(4, "follower-alt", game, seat, partner_greedy, true),
        build_follower(5, "maximin", game, seat, dd.clone(), false),
        build_follower(6, "best-response", game, seat, dd, false),
    ]
}

/// All states reachable from the start state under the event alphabet.
pub fn reachable_states(expert: &ExpertFsm) -> Vec<bool> {
    let mut seen = vec![false; expert.state_count()];
    let mut stack = vec![expert.start];
    seen[expert.start] = true;
    while let Some(s) = stack.pop() {
        for &sym in EVENT_SYMBOLS.iter() {
            let next = expert.step_symbol(s, sym);
            if !seen[next] {
                seen[next] = true;
                stack.push(next);
            }
        }
    }
    seen
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pd_roster() -> Vec<ExpertFsm> {
        build_expert_roster(&MatrixGame::prisoners_dilemma(), PlayerRole::Row)
    }

    fn by_name<'a>(roster: &'a [ExpertFsm], name: &str) -> &'a ExpertFsm {
        roster.iter().find(|e| e.name == name).unwrap()
    }

    #[test]
    fn roster_covers_required_experts() {
        let roster = pd_roster();
        assert!(roster.len() >= 6);
        assert_eq!(by_name(&roster, "leader-pure-cc").plan_type, PlanType::Leader);
        assert_eq!(by_name(&roster, "leader-alt-ac-bc").plan_type, PlanType::Leader);
        assert_eq!(by_name(&roster, "leader-alt-ac-ad").plan_type, PlanType::Leader);
        assert_eq!(by_name(&roster, "follower-pure").plan_type, PlanType::Follower);
        assert_eq!(by_name(&roster, "follower-alt").plan_type, PlanType::Follower);
        assert_eq!(by_name(&roster, "maximin").plan_type, PlanType::Follower);
        assert_eq!(by_name(&roster, "best-response").plan_type, PlanType::Follower);
        assert_eq!(
            by_name(&roster, "maximin").intent_type,
            IntentType::MaximizePayoff
        );
        for expert in &roster {
            assert_eq!(expert.intent_type, IntentType::MaximizePayoff);
            assert!(expert.potential >= 0.0);
        }
    }

    #[test]
    fn plan_types_partition_roster() {
        let roster = pd_roster();
        let leaders = roster.iter().filter(|e| e.plan_type == PlanType::Leader).count();
        let followers = roster
            .iter()
            .filter(|e| e.plan_type == PlanType::Follower)
            .count();
        assert!(leaders > 0 && followers > 0);
        assert_eq!(leaders + followers, roster.len());
    }

    #[test]
    fn leader_pure_cc_transitions() {
        let roster = pd_roster();
        let leader = by_name(&roster, "leader-pure-cc");
        let offer = leader.find_state(StateKind::Offer, 0).unwrap();
        let coop = leader.find_state(StateKind::Cooperate, 0).unwrap();
        let punish = leader.find_state(StateKind::Punish, 0).unwrap();

        assert_eq!(fsm_step(leader, offer, &GameEvent::PartnerComplied), coop);
        assert_eq!(fsm_step(leader, coop, &GameEvent::PartnerDeviated), punish);
        assert_eq!(
            fsm_step(leader, punish, &GameEvent::PunishmentSatisfied),
            offer
        );
    }

    #[test]
    fn every_leader_reaches_punish_via_deviation() {
        for seat in [PlayerRole::Row, PlayerRole::Column] {
            let roster = build_expert_roster(&MatrixGame::prisoners_dilemma(), seat);
            for expert in roster.iter().filter(|e| e.plan_type == PlanType::Leader) {
                let punish = expert
                    .find_state(StateKind::Punish, 0)
                    .expect("leaders carry a punish state");
                let hit = (0..expert.state_count()).any(|s| {
                    s != punish && fsm_step(expert, s, &GameEvent::PartnerDeviated) == punish
                });
                assert!(hit, "{}: punish unreachable via deviation", expert.name);
            }
        }
    }

    #[test]
    fn punish_states_defect() {
        let roster = pd_roster();
        for expert in roster.iter().filter(|e| e.plan_type == PlanType::Leader) {
            let punish = expert.find_state(StateKind::Punish, 0).unwrap();
            assert!(expert.states[punish].action_coop <= 1e-12);
            assert!(!expert.prescribed_action(punish).is_cooperate());
        }
    }

    #[test]
    fn all_states_reachable_from_start() {
        for seat in [PlayerRole::Row, PlayerRole::Column] {
            let roster = build_expert_roster(&MatrixGame::prisoners_dilemma(), seat);
            for expert in &roster {
                let seen = reachable_states(expert);
                assert!(
                    seen.iter().all(|&r| r),
                    "{}: unreachable states {:?}",
                    expert.name,
                    seen
                );
            }
        }
    }

    #[test]
    fn emission_distributions_normalized() {
        let roster = pd_roster();
        for expert in &roster {
            for st in &expert.states {
                let total: f64 = st.speech.iter().map(|(_, p)| p).sum();
                assert!((total - 1.0).abs() < 1e-9, "{}: {:?}", expert.name, st);
                assert!((0.0..=1.0).contains(&st.action_coop));
            }
        }
    }

    #[test]
    fn alternating_leader_tracks_cycle() {
        let roster = pd_roster();
        let leader = by_name(&roster, "leader-alt-ac-bc");
        let offer = leader.find_state(StateKind::Offer, 0).unwrap();
        // Offer plays step 0 (A); compliance moves to the step-1 state (B).
        assert_eq!(leader.prescribed_action(offer), ActionId::A);
        let c1 = fsm_step(leader, offer, &GameEvent::PartnerComplied);
        assert_eq!(leader.prescribed_action(c1), ActionId::B);
        let c0 = fsm_step(leader, c1, &GameEvent::PartnerComplied);
        assert_eq!(leader.prescribed_action(c0), ActionId::A);
        assert_eq!(fsm_step(leader, c0, &GameEvent::PartnerComplied), c1);
    }

    #[test]
    fn follower_accepts_only_its_plan() {
        let roster = pd_roster();
        let maximin = by_name(&roster, "maximin");
        let br_state = maximin.start;
        assert_eq!(maximin.states[br_state].kind, StateKind::BestRespond);
        let own_plan = GameEvent::PartnerProposed(SpeechAct::Propose(PlanCycle::pure(joint("BD"))));
        let other_plan =
            GameEvent::PartnerProposed(SpeechAct::Propose(PlanCycle::pure(joint("AC"))));
        let accepted = fsm_step(maximin, br_state, &own_plan);
        assert_eq!(maximin.states[accepted].kind, StateKind::Accept);
        assert_eq!(fsm_step(maximin, br_state, &other_plan), br_state);
        // Non-proposal speech does not move the machine.
        let praise = GameEvent::PartnerProposed(SpeechAct::Praise);
        assert_eq!(fsm_step(maximin, br_state, &praise), br_state);
    }

    #[test]
    fn seat_mirrors_plan_sides() {
        let game = MatrixGame::prisoners_dilemma();
        let row = build_expert_roster(&game, PlayerRole::Row);
        let col = build_expert_roster(&game, PlayerRole::Column);
        // The AC<->BC alternation is worth 80 to the row seat and 30 to the column seat.
        assert!((by_name(&row, "leader-alt-ac-bc").potential - 80.0).abs() < 1e-12);
        assert!((by_name(&col, "leader-alt-ac-bc").potential - 30.0).abs() < 1e-12);
        assert!((by_name(&col, "leader-alt-ac-ad").potential - 80.0).abs() < 1e-12);
        // Column-seat experts prescribe column actions.
        let leader = by_name(&col, "leader-pure-cc");
        assert_eq!(leader.prescribed_action(leader.start), ActionId::C);
    }

    #[test]
    fn potentials_match_plan_means() {
        let roster = pd_roster();
        assert!((by_name(&roster, "leader-pure-cc").potential - 60.0).abs() < 1e-12);
        assert!((by_name(&roster, "leader-alt-ac-ad").potential - 30.0).abs() < 1e-12);
        assert!((by_name(&roster, "maximin").potential - 20.0).abs() < 1e-12);
    }
}
