//! The 21 fixed strategies used both as playable agents and as fixed-model
//! action predictors.
//!
//! Each strategy is a pure function of the shared joint-action history,
//! interpreted from the acting player's seat, so the same code drives play
//! and prediction.

use crate::game::{ActionId, JointAction, PlayerRole};

/// The fixed strategy roster. Ids are stable strings used in CLI flags and
/// report columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FixedStrategy {
    AlwaysCooperate,
    Tft,
    Tf2t,
    Tf3t,
    TwoTitsForOneTat,
    TwoTitsForTwoTats,
    T2,
    Grim,
    LenientGrim2,
    LenientGrim3,
    Wsls,
    PerfectTft2,
    AlwaysDefect,
    FalseCooperator,
    ExplTft,
    ExplTf2t,
    ExplTf3t,
    ExplGrim2,
    ExplGrim3,
    Alternator,
    Pavlov,
}

pub const ALL_STRATEGIES: [FixedStrategy; 21] = [
    FixedStrategy::AlwaysCooperate,
    FixedStrategy::Tft,
    FixedStrategy::Tf2t,
    FixedStrategy::Tf3t,
    FixedStrategy::TwoTitsForOneTat,
    FixedStrategy::TwoTitsForTwoTats,
    FixedStrategy::T2,
    FixedStrategy::Grim,
    FixedStrategy::LenientGrim2,
    FixedStrategy::LenientGrim3,
    FixedStrategy::Wsls,
    FixedStrategy::PerfectTft2,
    FixedStrategy::AlwaysDefect,
    FixedStrategy::FalseCooperator,
    FixedStrategy::ExplTft,
    FixedStrategy::ExplTf2t,
    FixedStrategy::ExplTf3t,
    FixedStrategy::ExplGrim2,
    FixedStrategy::ExplGrim3,
    FixedStrategy::Alternator,
    FixedStrategy::Pavlov,
];

impl FixedStrategy {
    pub fn id(self) -> &'static str {
        match self {
            FixedStrategy::AlwaysCooperate => "always-cooperate",
            FixedStrategy::Tft => "tft",
            FixedStrategy::Tf2t => "tf2t",
            FixedStrategy::Tf3t => "tf3t",
            FixedStrategy::TwoTitsForOneTat => "two-tits-for-one-tat",
            FixedStrategy::TwoTitsForTwoTats => "two-tits-for-two-tats",
            FixedStrategy::T2 => "t2",
            FixedStrategy::Grim => "grim",
            FixedStrategy::LenientGrim2 => "lenient-grim-2",
            FixedStrategy::LenientGrim3 => "lenient-grim-3",
            FixedStrategy::Wsls => "wsls",
            FixedStrategy::PerfectTft2 => "perfect-tft-2",
            FixedStrategy::AlwaysDefect => "always-defect",
            FixedStrategy::FalseCooperator => "false-cooperator",
            FixedStrategy::ExplTft => "expl-tft",
            FixedStrategy::ExplTf2t => "expl-tf2t",
            FixedStrategy::ExplTf3t => "expl-tf3t",
            FixedStrategy::ExplGrim2 => "expl-grim-2",
            FixedStrategy::ExplGrim3 => "expl-grim-3",
            FixedStrategy::Alternator => "alternator",
            FixedStrategy::Pavlov => "pavlov",
        }
    }

    pub fn from_id(id: &str) -> Option<FixedStrategy> {
        ALL_STRATEGIES.iter().copied().find(|s| s.id() == id)
    }
}

/// Partner defected in every one of the last `n` rounds.
fn partner_defected_last_n(history: &[(bool, bool)], n: usize) -> bool {
    history.len() >= n && history.iter().rev().take(n).all(|&(_, p)| !p)
}

/// Partner defected in any of the last `n` rounds.
fn partner_defected_any_of_last_n(history: &[(bool, bool)], n: usize) -> bool {
    history.iter().rev().take(n).any(|&(_, p)| !p)
}

/// Two consecutive partner defections within the last `window` rounds.
fn partner_two_consecutive_in_window(history: &[(bool, bool)], window: usize) -> bool {
    let start = history.len().saturating_sub(window);
    let tail = &history[start..];
    tail.windows(2).any(|w| !w[0].1 && !w[1].1)
}

fn either_defected(round: (bool, bool)) -> bool {
    !round.0 || !round.1
}

/// Lenient grim with `n` consecutive trigger rounds: once `n` consecutive
/// rounds occur in which either player defected, defect forever.
fn lenient_grim_triggered(history: &[(bool, bool)], n: usize) -> bool {
    let mut streak = 0;
    for &round in history {
        if either_defected(round) {
            streak += 1;
            if streak >= n {
                return true;
            }
        } else {
            streak = 0;
        }
    }
    false
}

/// T2 punishment automaton: a defection by either player buys two rounds of
/// punishment, after which all history up to the punishment is cleared.
fn t2_punishing(history: &[(bool, bool)]) -> bool {
    let mut punish = 0;
    let mut cleared_until = 0;
    for (i, &round) in history.iter().enumerate() {
        if punish > 0 {
            punish -= 1;
            if punish == 0 {
                cleared_until = i + 1;
            }
            continue;
        }
        if i >= cleared_until && either_defected(round) {
            punish = 2;
        }
    }
    punish > 0
}

/// Whether the strategy cooperates next, given the shared history as
/// (own cooperated, partner cooperated) pairs. The round index is the
/// history length.
fn next_cooperates(strategy: FixedStrategy, history: &[(bool, bool)]) -> bool {
    let round = history.len();
    match strategy {
        FixedStrategy::AlwaysCooperate => true,
        FixedStrategy::AlwaysDefect => false,
        FixedStrategy::Tft => history.last().is_none_or(|&(_, p)| p),
        FixedStrategy::Tf2t => !partner_defected_last_n(history, 2),
        FixedStrategy::Tf3t => !partner_defected_last_n(history, 3),
        FixedStrategy::TwoTitsForOneTat => !partner_defected_any_of_last_n(history, 2),
        FixedStrategy::TwoTitsForTwoTats => !partner_two_consecutive_in_window(history, 3),
        FixedStrategy::T2 => !t2_punishing(history),
        FixedStrategy::Grim => !history.iter().copied().any(either_defected),
        FixedStrategy::LenientGrim2 => !lenient_grim_triggered(history, 2),
        FixedStrategy::LenientGrim3 => !lenient_grim_triggered(history, 3),
        FixedStrategy::Wsls => history.last().is_none_or(|&(own, p)| own == p),
        FixedStrategy::PerfectTft2 => {
            // Missing early rounds count as mutual cooperation.
            let get = |back: usize| -> (bool, bool) {
                if round >= back {
                    history[round - back]
                } else {
                    (true, true)
                }
            };
            let last = get(1);
            let before = get(2);
            let both_c = |r: (bool, bool)| r.0 && r.1;
            let both_d = |r: (bool, bool)| !r.0 && !r.1;
            (both_c(last) && both_c(before))
                || (both_d(last) && both_d(before))
                || (both_d(before) && both_c(last))
        }
        FixedStrategy::FalseCooperator => round == 0,
        FixedStrategy::ExplTft => round != 0 && next_cooperates(FixedStrategy::Tft, history),
        FixedStrategy::ExplTf2t => round != 0 && next_cooperates(FixedStrategy::Tf2t, history),
        FixedStrategy::ExplTf3t => round != 0 && next_cooperates(FixedStrategy::Tf3t, history),
        FixedStrategy::ExplGrim2 => {
            round != 0 && next_cooperates(FixedStrategy::LenientGrim2, history)
        }
        FixedStrategy::ExplGrim3 => {
            round != 0 && next_cooperates(FixedStrategy::LenientGrim3, history)
        }
        FixedStrategy::Alternator => round % 2 == 1,
        FixedStrategy::Pavlov => {
            // Win-stay-lose-shift seeded with cooperation: repeat the last own
            // move if the partner cooperated, otherwise switch.
            history.last().is_none_or(|&(own, p)| if p { own } else { !own })
        }
    }
}

fn seat_history(history: &[JointAction], seat: PlayerRole) -> Vec<(bool, bool)> {
    history
        .iter()
        .map(|j| {
            (
                j.action_of(seat).is_cooperate(),
                j.action_of(seat.other()).is_cooperate(),
            )
        })
        .collect()
}

/// The next action the strategy plays as the row player.
pub fn strategy_next_action(strategy: FixedStrategy, history: &[JointAction]) -> ActionId {
    next_action_for(strategy, history, PlayerRole::Row)
}

/// The next action the strategy plays from the given seat.
pub fn next_action_for(
    strategy: FixedStrategy,
    history: &[JointAction],
    seat: PlayerRole,
) -> ActionId {
    let flags = seat_history(history, seat);
    ActionId::from_flags(seat, next_cooperates(strategy, &flags))
}

/// Predicts the modeled player's next action as what `strategy` would play
/// in the modeled player's seat given the shared history.
pub fn baseline_predict(
    strategy: FixedStrategy,
    history: &[JointAction],
    modeled: PlayerRole,
) -> ActionId {
    next_action_for(strategy, history, modeled)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn joint(s: &str) -> JointAction {
        JointAction::parse(s).unwrap()
    }

    fn history(labels: &[&str]) -> Vec<JointAction> {
        labels.iter().map(|s| joint(s)).collect()
    }

    #[test]
    fn table_semantics_spot_checks() {
        use FixedStrategy::*;
        // TFT opens with cooperation.
        assert_eq!(strategy_next_action(Tft, &[]), ActionId::A);
        assert_eq!(strategy_next_action(Tft, &history(&["AD"])), ActionId::B);
        assert_eq!(strategy_next_action(Tft, &history(&["AD", "BC"])), ActionId::A);
        // Alternator plays DCDC..., so round 2 is D.
        assert_eq!(strategy_next_action(Alternator, &[]), ActionId::B);
        assert_eq!(strategy_next_action(Alternator, &history(&["BC"])), ActionId::A);
        assert_eq!(strategy_next_action(Alternator, &history(&["BC", "AC"])), ActionId::B);
        // Grim defects after any defection by either player.
        assert_eq!(strategy_next_action(Grim, &history(&["AC", "AC"])), ActionId::A);
        assert_eq!(strategy_next_action(Grim, &history(&["AC", "BC", "AC"])), ActionId::B);
        assert_eq!(strategy_next_action(Grim, &history(&["AD", "AC"])), ActionId::B);
        // WSLS cooperates after matched moves, defects otherwise.
        assert_eq!(strategy_next_action(Wsls, &history(&["AD"])), ActionId::B);
        assert_eq!(strategy_next_action(Wsls, &history(&["BD"])), ActionId::A);
        assert_eq!(strategy_next_action(Wsls, &history(&["AC"])), ActionId::A);
        // Exploitive variants open with defection.
        assert_eq!(strategy_next_action(ExplTft, &[]), ActionId::B);
        assert_eq!(strategy_next_action(ExplTft, &history(&["BC"])), ActionId::A);
        // Pavlov starts with cooperation.
        assert_eq!(strategy_next_action(Pavlov, &[]), ActionId::A);
        // False cooperator plays C once, then D forever.
        assert_eq!(strategy_next_action(FalseCooperator, &[]), ActionId::A);
        assert_eq!(strategy_next_action(FalseCooperator, &history(&["AC"])), ActionId::B);
    }

    #[test]
    fn tit_for_n_tats_need_consecutive_defections() {
        use FixedStrategy::*;
        assert_eq!(strategy_next_action(Tf2t, &history(&["AD"])), ActionId::A);
        assert_eq!(strategy_next_action(Tf2t, &history(&["AD", "AD"])), ActionId::B);
        assert_eq!(strategy_next_action(Tf2t, &history(&["AD", "AC", "AD"])), ActionId::A);
        assert_eq!(strategy_next_action(Tf3t, &history(&["AD", "AD"])), ActionId::A);
        assert_eq!(
            strategy_next_action(Tf3t, &history(&["AD", "AD", "AD"])),
            ActionId::B
        );
    }

    #[test]
    fn two_tits_variants_punish_for_two_rounds() {
        use FixedStrategy::*;
        // One partner defection draws two rounds of punishment.
        assert_eq!(strategy_next_action(TwoTitsForOneTat, &history(&["AD"])), ActionId::B);
        assert_eq!(
            strategy_next_action(TwoTitsForOneTat, &history(&["AD", "BC"])),
            ActionId::B
        );
        assert_eq!(
            strategy_next_action(TwoTitsForOneTat, &history(&["AD", "BC", "BC"])),
            ActionId::A
        );
        // Two-tits-for-two-tats needs two consecutive partner defections.
        assert_eq!(
            strategy_next_action(TwoTitsForTwoTats, &history(&["AD", "AC", "AD"])),
            ActionId::A
        );
        assert_eq!(
            strategy_next_action(TwoTitsForTwoTats, &history(&["AC", "AD", "AD"])),
            ActionId::B
        );
    }

    #[test]
    fn t2_punishes_twice_then_resets() {
        use FixedStrategy::T2;
        // Trigger at round 0, punish rounds 1-2, return to C at round 3.
        let h = history(&["AD"]);
        assert_eq!(strategy_next_action(T2, &h), ActionId::B);
        let h = history(&["AD", "BD"]);
        assert_eq!(strategy_next_action(T2, &h), ActionId::B);
        let h = history(&["AD", "BD", "BD"]);
        assert_eq!(strategy_next_action(T2, &h), ActionId::A);
        // A defection after the reset re-triggers.
        let h = history(&["AD", "BD", "BD", "AD"]);
        assert_eq!(strategy_next_action(T2, &h), ActionId::B);
    }

    #[test]
    fn lenient_grims_absorb_after_consecutive_bad_rounds() {
        use FixedStrategy::*;
        assert_eq!(
            strategy_next_action(LenientGrim2, &history(&["AD", "AC", "AD"])),
            ActionId::A
        );
        assert_eq!(
            strategy_next_action(LenientGrim2, &history(&["AD", "AD", "AC"])),
            ActionId::B
        );
        assert_eq!(
            strategy_next_action(LenientGrim3, &history(&["AD", "AD", "AC", "AD", "AD"])),
            ActionId::A
        );
        assert_eq!(
            strategy_next_action(LenientGrim3, &history(&["AD", "AD", "AD", "AC"])),
            ActionId::B
        );
    }

    #[test]
    fn perfect_tft2_follows_published_rule() {
        use FixedStrategy::PerfectTft2;
        assert_eq!(strategy_next_action(PerfectTft2, &[]), ActionId::A);
        assert_eq!(
            strategy_next_action(PerfectTft2, &history(&["AC", "AC"])),
            ActionId::A
        );
        assert_eq!(
            strategy_next_action(PerfectTft2, &history(&["BD", "BD"])),
            ActionId::A
        );
        assert_eq!(
            strategy_next_action(PerfectTft2, &history(&["BD", "AC"])),
            ActionId::A
        );
        assert_eq!(
            strategy_next_action(PerfectTft2, &history(&["AC", "BD"])),
            ActionId::B
        );
        assert_eq!(
            strategy_next_action(PerfectTft2, &history(&["AC", "AD"])),
            ActionId::B
        );
    }

    /// Every deterministic strategy predicts itself exactly.
    #[test]
    fn self_prediction_is_exact() {
        for &strategy in ALL_STRATEGIES.iter() {
            let mut shared: Vec<JointAction> = Vec::new();
            for round in 0..51 {
                let row_action = next_action_for(strategy, &shared, PlayerRole::Row);
                let col_action = next_action_for(FixedStrategy::Tft, &shared, PlayerRole::Column);
                let predicted = baseline_predict(strategy, &shared, PlayerRole::Row);
                assert_eq!(
                    predicted, row_action,
                    "{} mispredicted itself at round {round}",
                    strategy.id()
                );
                shared.push(JointAction {
                    row: row_action,
                    column: col_action,
                });
            }
        }
    }

    /// Strategies declared to use a bounded memory window must ignore
    /// anything outside it (Grim-family and counter-based T2 excepted).
    #[test]
    fn memory_window_boundedness() {
        use FixedStrategy::*;
        let windowed: [(FixedStrategy, usize); 12] = [
            (AlwaysCooperate, 0),
            (AlwaysDefect, 0),
            (Alternator, 0),
            (Tft, 1),
            (Wsls, 1),
            (Pavlov, 1),
            (Tf2t, 2),
            (TwoTitsForOneTat, 2),
            (PerfectTft2, 2),
            (Tf3t, 3),
            (TwoTitsForTwoTats, 3),
            (ExplTft, 1),
        ];
        let joints = crate::game::MatrixGame::joint_actions();
        let mut seed = 0x9e3779b97f4a7c15u64;
        let mut next = || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed >> 32) as usize
        };
        for &(strategy, window) in windowed.iter() {
            for _ in 0..200 {
                let len = 4 + next() % 4;
                let h1: Vec<JointAction> = (0..len).map(|_| joints[next() % 4]).collect();
                // Same in-window suffix, everything earlier resampled.
                let mut h2: Vec<JointAction> = (0..len).map(|_| joints[next() % 4]).collect();
                let tail_start = len.saturating_sub(window);
                h2[tail_start..len].copy_from_slice(&h1[tail_start..len]);
                assert_eq!(
                    strategy_next_action(strategy, &h1),
                    strategy_next_action(strategy, &h2),
                    "{} looked outside its window {window}",
                    strategy.id()
                );
            }
        }
    }

    #[test]
    fn ids_round_trip() {
        for &s in ALL_STRATEGIES.iter() {
            assert_eq!(FixedStrategy::from_id(s.id()), Some(s));
        }
        assert_eq!(FixedStrategy::from_id("nope"), None);
    }
}
