//! A minimal deterministic real-time-strategy forward model: grid world,
//! durative simultaneous unit-actions, resources, production, combat, static
//! evaluation, playouts, scripted players, and the bandit view of a decision.

pub mod action;
pub mod cmab;
pub mod eval;
pub mod map;
pub mod playout;
pub mod script;
pub mod state;
pub mod units;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("unknown unit id {0}")]
    UnknownUnit(u32),
    #[error("unit {0} is busy")]
    BusyUnit(u32),
    #[error("unit {0} is not owned by a player")]
    NotAPlayerUnit(u32),
    #[error("illegal action for unit {unit}: {reason}")]
    IllegalAction { unit: u32, reason: String },
    #[error("player-action covers {covered} units but {idle} are idle")]
    IncompleteAssignment { covered: usize, idle: usize },
    #[error("cell ({x}, {y}) is occupied")]
    CellOccupied { x: u8, y: u8 },
    #[error("map parse error at line {line}: {msg}")]
    MapParse { line: usize, msg: String },
    #[error("stats parse error at line {line}: {msg}")]
    StatsParse { line: usize, msg: String },
    #[error("unknown map `{0}`")]
    UnknownMap(String),
    #[error("unknown script `{0}`")]
    UnknownScript(String),
    #[error("player {0} has no idle units")]
    NoIdleUnits(units::Player),
}

pub use action::{
    count_player_actions, decision_table, is_action_legal, legal_player_actions,
    legal_unit_actions, CountResult, PlayerAction, PlayerActionIter, UnitAction,
};
pub use cmab::{cmab_of_state, DecisionCmab};
pub use eval::{evaluate, score};
pub use map::{builtin_map, parse_map, MAP_NAMES};
pub use playout::{playout, playout_from, policy_action, PlayoutPolicy, DEFAULT_PLAYOUT_HORIZON};
pub use script::{scripted_action, ScriptKind};
pub use state::{Dir, GameState, MatchResult, Pending, Pos, Unit, DEFAULT_CYCLE_LIMIT, DIRS};
pub use units::{KindStats, Owner, Player, UnitKind, UnitStats, DEFAULT_STATS_TEXT};
