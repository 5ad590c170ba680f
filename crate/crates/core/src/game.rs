//! 2x2 matrix games: actions, joint outcomes, and payoff lookup.

use serde::{Deserialize, Serialize};

use crate::Error;

/// Which seat a player occupies in a 2x2 game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PlayerRole {
    Row,
    Column,
}

impl PlayerRole {
    pub fn other(self) -> PlayerRole {
        match self {
            PlayerRole::Row => PlayerRole::Column,
            PlayerRole::Column => PlayerRole::Row,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            PlayerRole::Row => "row",
            PlayerRole::Column => "col",
        }
    }
}

/// One of the four actions in a 2x2 game. Row players choose A or B,
/// column players C or D; A and C are the cooperative actions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ActionId {
    A,
    B,
    C,
    D,
}

impl ActionId {
    pub fn role(self) -> PlayerRole {
        match self {
            ActionId::A | ActionId::B => PlayerRole::Row,
            ActionId::C | ActionId::D => PlayerRole::Column,
        }
    }

    pub fn is_cooperate(self) -> bool {
        matches!(self, ActionId::A | ActionId::C)
    }

    /// The action for `role` with the given cooperation flag.
    pub fn from_flags(role: PlayerRole, cooperate: bool) -> ActionId {
        match (role, cooperate) {
            (PlayerRole::Row, true) => ActionId::A,
            (PlayerRole::Row, false) => ActionId::B,
            (PlayerRole::Column, true) => ActionId::C,
            (PlayerRole::Column, false) => ActionId::D,
        }
    }

    /// The other action available to the same seat.
    pub fn opposite(self) -> ActionId {
        match self {
            ActionId::A => ActionId::B,
            ActionId::B => ActionId::A,
            ActionId::C => ActionId::D,
            ActionId::D => ActionId::C,
        }
    }

    pub fn letter(self) -> char {
        match self {
            ActionId::A => 'A',
            ActionId::B => 'B',
            ActionId::C => 'C',
            ActionId::D => 'D',
        }
    }

    pub fn parse(ch: char) -> Option<ActionId> {
        match ch.to_ascii_uppercase() {
            'A' => Some(ActionId::A),
            'B' => Some(ActionId::B),
            'C' => Some(ActionId::C),
            'D' => Some(ActionId::D),
            _ => None,
        }
    }
}

/// True iff the action is the cooperative one for its seat (A or C).
pub fn is_cooperate(action: ActionId) -> bool {
    action.is_cooperate()
}

/// A pair of simultaneous actions, one per seat.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct JointAction {
    pub row: ActionId,
    pub column: ActionId,
}

impl JointAction {
    pub fn new(row: ActionId, column: ActionId) -> Result<JointAction, Error> {
        if row.role() != PlayerRole::Row || column.role() != PlayerRole::Column {
            return Err(Error::InvalidJointAction { row, column });
        }
        Ok(JointAction { row, column })
    }

    pub fn action_of(self, role: PlayerRole) -> ActionId {
        match role {
            PlayerRole::Row => self.row,
            PlayerRole::Column => self.column,
        }
    }

    /// Two-letter label, row action first ("AC", "BD", ...).
    pub fn label(self) -> String {
        format!("{}{}", self.row.letter(), self.column.letter())
    }

    pub fn parse(s: &str) -> Option<JointAction> {
        let mut chars = s.chars();
        let (r, c) = (chars.next()?, chars.next()?);
        if chars.next().is_some() {
            return None;
        }
        let row = ActionId::parse(r)?;
        let column = ActionId::parse(c)?;
        JointAction::new(row, column).ok()
    }
}

/// An immutable 2x2 matrix game with integer payoffs in points.
///
/// Payoffs are indexed by the cooperation flags of the two seats, so the
/// structure is label-free and works for any game with two actions per side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixGame {
    name: String,
    // payoffs[row_defects][col_defects] = (row points, column points)
    payoffs: [[(u32, u32); 2]; 2],
}

impl MatrixGame {
    pub fn new(name: impl Into<String>, payoffs: [[(u32, u32); 2]; 2]) -> MatrixGame {
        MatrixGame {
            name: name.into(),
            payoffs,
        }
    }

    /// The Prisoner's Dilemma instance used throughout: mutual cooperation 60,
    /// mutual defection 20, temptation 100, sucker 0.
    pub fn prisoners_dilemma() -> MatrixGame {
        MatrixGame::new(
            "prisoners-dilemma",
            [
                // row cooperates (A)      row defects (B)
                [(60, 60), (0, 100)], // col C, col D
                [(100, 0), (20, 20)],
            ],
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn payoff(&self, joint: JointAction) -> (u32, u32) {
        let r = usize::from(!joint.row.is_cooperate());
        let c = usize::from(!joint.column.is_cooperate());
        self.payoffs[r][c]
    }

    pub fn payoff_for(&self, joint: JointAction, role: PlayerRole) -> u32 {
        let (u_row, u_col) = self.payoff(joint);
        match role {
            PlayerRole::Row => u_row,
            PlayerRole::Column => u_col,
        }
    }

    /// All four joint actions in a stable order (AC, AD, BC, BD).
    pub fn joint_actions() -> [JointAction; 4] {
        let j = |row, column| JointAction { row, column };
        [
            j(ActionId::A, ActionId::C),
            j(ActionId::A, ActionId::D),
            j(ActionId::B, ActionId::C),
            j(ActionId::B, ActionId::D),
        ]
    }
}

/// Payoff lookup for a joint action: (row points, column points).
pub fn payoff(game: &MatrixGame, joint: JointAction) -> (u32, u32) {
    game.payoff(joint)
}
