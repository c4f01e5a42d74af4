//! Scripted baseline players.

use rand::Rng;

use crate::action::{is_action_legal, PlayerAction, UnitAction};
use crate::playout::{policy_action, PlayoutPolicy};
use crate::state::{GameState, Pos, Unit, DIRS};
use crate::units::{Owner, Player, UnitKind};
use crate::SimError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScriptKind {
    /// Uniform per-unit selection with attack/harvest/return weighted 5x.
    RandomBiased,
    /// Trains workers nonstop and throws every worker at the nearest enemy.
    WorkerRush,
    /// Builds one barracks, trains lights, sends the military forward while
    /// the workers keep harvesting.
    LightRush,
}

impl ScriptKind {
    pub fn parse(name: &str) -> Result<ScriptKind, SimError> {
        match name {
            "RandomBiased" | "random-biased" => Ok(ScriptKind::RandomBiased),
            "WorkerRush" | "worker-rush" => Ok(ScriptKind::WorkerRush),
            "LightRush" | "light-rush" => Ok(ScriptKind::LightRush),
            other => Err(SimError::UnknownScript(other.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ScriptKind::RandomBiased => "RandomBiased",
            ScriptKind::WorkerRush => "WorkerRush",
            ScriptKind::LightRush => "LightRush",
        }
    }
}

/// Joint bookkeeping while a script assembles its player-action.
struct Tally {
    budget: u32,
    claimed: Vec<Pos>,
}

impl Tally {
    fn allows(&self, state: &GameState, unit: &Unit, action: UnitAction) -> bool {
        if !is_action_legal(state, unit, action) {
            return false;
        }
        if let UnitAction::Produce { kind, dir } = action {
            let target = state.neighbor(unit.pos, dir).expect("legal target");
            return state.stats.cost(kind) <= self.budget && !self.claimed.contains(&target);
        }
        true
    }

    fn commit(&mut self, state: &GameState, unit: &Unit, action: UnitAction) -> UnitAction {
        if let UnitAction::Produce { kind, dir } = action {
            self.budget -= state.stats.cost(kind);
            self.claimed
                .push(state.neighbor(unit.pos, dir).expect("legal target"));
        }
        action
    }
}

fn nearest<'a>(
    state: &'a GameState,
    from: Pos,
    mut filter: impl FnMut(&Unit) -> bool,
) -> Option<&'a Unit> {
    state
        .units
        .iter()
        .filter(|u| filter(u))
        .min_by_key(|u| (from.manhattan(u.pos), u.id))
}

/// First direction whose adjacent cell holds a unit matching the filter.
fn adjacent_dir(
    state: &GameState,
    unit: &Unit,
    mut filter: impl FnMut(&Unit) -> bool,
) -> Option<crate::state::Dir> {
    DIRS.into_iter().find(|&dir| {
        state
            .neighbor(unit.pos, dir)
            .and_then(|p| state.unit_at(p))
            .map_or(false, &mut filter)
    })
}

/// Legal move that gets the unit closest to `target` (fixed dir order on
/// ties); noop when no move helps or none is legal.
fn move_toward(state: &GameState, unit: &Unit, target: Pos, tally: &Tally) -> UnitAction {
    let mut best: Option<(u32, UnitAction)> = None;
    for dir in DIRS {
        let action = UnitAction::Move(dir);
        if !tally.allows(state, unit, action) {
            continue;
        }
        let pos = state.neighbor(unit.pos, dir).expect("legal move target");
        let d = pos.manhattan(target);
        if best.map_or(true, |(bd, _)| d < bd) {
            best = Some((d, action));
        }
    }
    match best {
        Some((d, action)) if d < unit.pos.manhattan(target) => action,
        _ => UnitAction::Noop,
    }
}

fn first_produce(
    state: &GameState,
    unit: &Unit,
    kind: UnitKind,
    tally: &Tally,
) -> Option<UnitAction> {
    DIRS.into_iter()
        .map(|dir| UnitAction::Produce { kind, dir })
        .find(|&action| tally.allows(state, unit, action))
}

fn is_enemy(unit: &Unit, me: Player) -> bool {
    unit.owner == Owner::Player(me.opponent())
}

fn worker_combat_action(state: &GameState, unit: &Unit, me: Player, tally: &Tally) -> UnitAction {
    if let Some(dir) = adjacent_dir(state, unit, |u| is_enemy(u, me)) {
        let attack = UnitAction::Attack(dir);
        if tally.allows(state, unit, attack) {
            return attack;
        }
    }
    match nearest(state, unit.pos, |u| is_enemy(u, me)) {
        Some(enemy) => move_toward(state, unit, enemy.pos, tally),
        None => UnitAction::Noop,
    }
}

fn harvest_cycle_action(state: &GameState, unit: &Unit, me: Player, tally: &Tally) -> UnitAction {
    if unit.cargo >= 1 {
        if let Some(dir) = adjacent_dir(state, unit, |u| {
            u.kind == UnitKind::Base && u.owner == Owner::Player(me)
        }) {
            let ret = UnitAction::Return(dir);
            if tally.allows(state, unit, ret) {
                return ret;
            }
        }
        return match nearest(state, unit.pos, |u| {
            u.kind == UnitKind::Base && u.owner == Owner::Player(me)
        }) {
            Some(base) => move_toward(state, unit, base.pos, tally),
            None => UnitAction::Noop,
        };
    }
    if let Some(dir) = adjacent_dir(state, unit, |u| u.kind == UnitKind::Mine && u.cargo >= 1) {
        let harvest = UnitAction::Harvest(dir);
        if tally.allows(state, unit, harvest) {
            return harvest;
        }
    }
    match nearest(state, unit.pos, |u| u.kind == UnitKind::Mine && u.cargo >= 1) {
        Some(mine) => move_toward(state, unit, mine.pos, tally),
        None => worker_combat_action(state, unit, me, tally),
    }
}

/// The joint action the named script issues for `player`. Always legal; any
/// unit without an applicable rule stands still.
pub fn scripted_action<R: Rng>(
    script: ScriptKind,
    state: &GameState,
    player: Player,
    rng: &mut R,
) -> PlayerAction {
    if script == ScriptKind::RandomBiased {
        return policy_action(state, player, PlayoutPolicy::RandomBiased, rng);
    }
    let mut tally = Tally {
        budget: state.resources[player.index()],
        claimed: Vec::new(),
    };
    let ids: Vec<u32> = state.idle_units(player).map(|u| u.id).collect();
    let mut assignments = Vec::with_capacity(ids.len());
    for id in ids {
        let unit = state.unit(id).expect("idle unit exists");
        let action = match script {
            ScriptKind::RandomBiased => unreachable!(),
            ScriptKind::WorkerRush => match unit.kind {
                UnitKind::Base => {
                    first_produce(state, unit, UnitKind::Worker, &tally).unwrap_or(UnitAction::Noop)
                }
                UnitKind::Worker | UnitKind::Light => {
                    worker_combat_action(state, unit, player, &tally)
                }
                _ => UnitAction::Noop,
            },
            ScriptKind::LightRush => match unit.kind {
                UnitKind::Worker => {
                    let has_barracks = state
                        .units_of(player)
                        .any(|u| u.kind == UnitKind::Barracks);
                    if !has_barracks
                        && tally.budget >= state.stats.cost(UnitKind::Barracks)
                    {
                        first_produce(state, unit, UnitKind::Barracks, &tally)
                            .unwrap_or_else(|| harvest_cycle_action(state, unit, player, &tally))
                    } else {
                        harvest_cycle_action(state, unit, player, &tally)
                    }
                }
                UnitKind::Base => {
                    if state.units_of(player).any(|u| u.kind == UnitKind::Worker) {
                        UnitAction::Noop
                    } else {
                        first_produce(state, unit, UnitKind::Worker, &tally)
                            .unwrap_or(UnitAction::Noop)
                    }
                }
                UnitKind::Barracks => {
                    first_produce(state, unit, UnitKind::Light, &tally).unwrap_or(UnitAction::Noop)
                }
                UnitKind::Light => worker_combat_action(state, unit, player, &tally),
                _ => UnitAction::Noop,
            },
        };
        debug_assert!(tally.allows(state, unit, action) || action == UnitAction::Noop);
        let action = tally.commit(state, unit, action);
        assignments.push((id, action));
    }
    PlayerAction { assignments }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::UnitStats;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn empty(w: u8, h: u8) -> GameState {
        GameState::new(w, h, Arc::new(UnitStats::default()))
    }

    #[test]
    fn unknown_script_name_is_rejected() {
        assert!(matches!(
            ScriptKind::parse("ZergRush"),
            Err(SimError::UnknownScript(_))
        ));
        assert_eq!(ScriptKind::parse("WorkerRush").unwrap(), ScriptKind::WorkerRush);
    }

    #[test]
    fn scripts_emit_noop_when_nothing_is_possible() {
        // A lone enclosed worker with no enemies: every script noops.
        let mut s = empty(3, 3);
        s.resources = [0, 0];
        let w = s
            .spawn(Owner::Player(Player::Max), UnitKind::Worker, Pos::new(1, 1))
            .unwrap();
        for pos in [Pos::new(0, 1), Pos::new(2, 1), Pos::new(1, 0), Pos::new(1, 2)] {
            s.spawn(Owner::Player(Player::Max), UnitKind::Base, pos).unwrap();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for script in [ScriptKind::RandomBiased, ScriptKind::WorkerRush, ScriptKind::LightRush] {
            let action = scripted_action(script, &s, Player::Max, &mut rng);
            let worker_action = action
                .assignments
                .iter()
                .find(|(id, _)| *id == w)
                .unwrap()
                .1;
            assert_eq!(worker_action, UnitAction::Noop, "{script:?}");
            s.validate_action(Player::Max, &action).unwrap();
        }
    }

    #[test]
    fn worker_rush_produces_workers_from_the_base() {
        let mut s = empty(6, 6);
        s.resources = [5, 0];
        s.spawn(Owner::Player(Player::Max), UnitKind::Base, Pos::new(1, 1))
            .unwrap();
        s.spawn(Owner::Player(Player::Min), UnitKind::Base, Pos::new(4, 4))
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let action = scripted_action(ScriptKind::WorkerRush, &s, Player::Max, &mut rng);
        assert!(matches!(
            action.assignments[0].1,
            UnitAction::Produce {
                kind: UnitKind::Worker,
                ..
            }
        ));
    }

    #[test]
    fn worker_rush_charges_and_attacks() {
        let mut s = empty(6, 6);
        s.resources = [0, 0];
        let w = s
            .spawn(Owner::Player(Player::Max), UnitKind::Worker, Pos::new(1, 1))
            .unwrap();
        s.spawn(Owner::Player(Player::Min), UnitKind::Worker, Pos::new(4, 1))
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let action = scripted_action(ScriptKind::WorkerRush, &s, Player::Max, &mut rng);
        assert_eq!(action.assignments[0], (w, UnitAction::Move(crate::state::Dir::Right)));

        // Adjacent: attack.
        let mut s2 = empty(6, 6);
        let w2 = s2
            .spawn(Owner::Player(Player::Max), UnitKind::Worker, Pos::new(1, 1))
            .unwrap();
        s2.spawn(Owner::Player(Player::Min), UnitKind::Worker, Pos::new(2, 1))
            .unwrap();
        let action = scripted_action(ScriptKind::WorkerRush, &s2, Player::Max, &mut rng);
        assert_eq!(
            action.assignments[0],
            (w2, UnitAction::Attack(crate::state::Dir::Right))
        );
    }

    #[test]
    fn light_rush_builds_a_barracks_then_harvests() {
        let mut s = empty(6, 6);
        s.resources = [5, 0];
        s.spawn(Owner::Neutral, UnitKind::Mine, Pos::new(0, 0)).unwrap();
        s.spawn(Owner::Player(Player::Max), UnitKind::Base, Pos::new(2, 2))
            .unwrap();
        let w = s
            .spawn(Owner::Player(Player::Max), UnitKind::Worker, Pos::new(1, 1))
            .unwrap();
        s.spawn(Owner::Player(Player::Min), UnitKind::Base, Pos::new(5, 5))
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let action = scripted_action(ScriptKind::LightRush, &s, Player::Max, &mut rng);
        let worker_action = action.assignments.iter().find(|(id, _)| *id == w).unwrap().1;
        assert!(matches!(
            worker_action,
            UnitAction::Produce {
                kind: UnitKind::Barracks,
                ..
            }
        ));

        // Once a barracks exists, the worker goes back to harvesting.
        let mut s2 = s.clone();
        s2.spawn(Owner::Player(Player::Max), UnitKind::Barracks, Pos::new(3, 3))
            .unwrap();
        let action = scripted_action(ScriptKind::LightRush, &s2, Player::Max, &mut rng);
        let worker_action = action.assignments.iter().find(|(id, _)| *id == w).unwrap().1;
        assert!(
            matches!(worker_action, UnitAction::Harvest(_) | UnitAction::Move(_)),
            "{worker_action:?}"
        );
    }

    #[test]
    fn scripted_actions_are_always_valid() {
        let stats = Arc::new(UnitStats::default());
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for name in crate::map::MAP_NAMES {
            let mut s = crate::map::builtin_map(name, stats.clone()).unwrap();
            for script in [ScriptKind::RandomBiased, ScriptKind::WorkerRush, ScriptKind::LightRush]
            {
                for _ in 0..120 {
                    if s.winner() != crate::state::MatchResult::Ongoing {
                        break;
                    }
                    let a_max = scripted_action(script, &s, Player::Max, &mut rng);
                    let a_min = scripted_action(script, &s, Player::Min, &mut rng);
                    s.issue_action(Player::Max, &a_max).expect("max action valid");
                    s.issue_action(Player::Min, &a_min).expect("min action valid");
                    s.advance();
                }
            }
        }
    }
}
