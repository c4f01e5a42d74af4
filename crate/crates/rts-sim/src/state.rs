//! The game state and the deterministic transition function.

use std::sync::Arc;

use crate::action::{action_duration, is_action_legal, PlayerAction, UnitAction};
use crate::units::{Owner, Player, UnitKind, UnitStats};
use crate::SimError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Pos {
    pub x: u8,
    pub y: u8,
}

impl Pos {
    pub fn new(x: u8, y: u8) -> Pos {
        Pos { x, y }
    }

    pub fn manhattan(self, other: Pos) -> u32 {
        (self.x as i32 - other.x as i32).unsigned_abs()
            + (self.y as i32 - other.y as i32).unsigned_abs()
    }
}

/// The four movement/targeting directions, in the fixed enumeration order
/// used everywhere (action lists, scripted fallbacks, conflict checks).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dir {
    Up,
    Right,
    Down,
    Left,
}

pub const DIRS: [Dir; 4] = [Dir::Up, Dir::Right, Dir::Down, Dir::Left];

impl Dir {
    pub fn offset(self) -> (i32, i32) {
        match self {
            Dir::Up => (0, -1),
            Dir::Right => (1, 0),
            Dir::Down => (0, 1),
            Dir::Left => (-1, 0),
        }
    }
}

/// An action in flight: what the unit is doing and when it completes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pending {
    pub action: UnitAction,
    pub finish: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Unit {
    pub id: u32,
    pub owner: Owner,
    pub kind: UnitKind,
    pub pos: Pos,
    pub hp: u16,
    /// Carried resources for workers, remaining stock for mines.
    pub cargo: u16,
    pub busy: Option<Pending>,
}

impl Unit {
    pub fn is_idle(&self) -> bool {
        self.busy.is_none()
    }
}

/// Result of the winner function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchResult {
    Winner(Player),
    Draw,
    Ongoing,
}

/// Deterministic, fully observable grid state. `step` produces a successor;
/// engines that advance in place use `issue_action` plus `advance`.
#[derive(Debug, Clone, PartialEq)]
pub struct GameState {
    pub width: u8,
    pub height: u8,
    /// Alive units in ascending id order.
    pub units: Vec<Unit>,
    /// Stockpiled resources, indexed by `Player::index()`.
    pub resources: [u32; 2],
    pub cycle: u32,
    /// Cycle at which an undecided game becomes a draw.
    pub cycle_limit: u32,
    pub stats: Arc<UnitStats>,
    next_id: u32,
    /// Cell -> unit id + 1, 0 when empty.
    grid: Vec<u32>,
}

pub const DEFAULT_CYCLE_LIMIT: u32 = 3000;

impl GameState {
    pub fn new(width: u8, height: u8, stats: Arc<UnitStats>) -> GameState {
        GameState {
            width,
            height,
            units: Vec::new(),
            resources: [0, 0],
            cycle: 0,
            cycle_limit: DEFAULT_CYCLE_LIMIT,
            stats,
            next_id: 0,
            grid: vec![0; width as usize * height as usize],
        }
    }

    fn cell(&self, pos: Pos) -> usize {
        pos.y as usize * self.width as usize + pos.x as usize
    }

    pub fn in_bounds(&self, x: i32, y: i32) -> bool {
        x >= 0 && y >= 0 && x < self.width as i32 && y < self.height as i32
    }

    pub fn neighbor(&self, pos: Pos, dir: Dir) -> Option<Pos> {
        let (dx, dy) = dir.offset();
        let (x, y) = (pos.x as i32 + dx, pos.y as i32 + dy);
        self.in_bounds(x, y).then(|| Pos::new(x as u8, y as u8))
    }

    pub fn unit_id_at(&self, pos: Pos) -> Option<u32> {
        match self.grid[self.cell(pos)] {
            0 => None,
            id_plus_one => Some(id_plus_one - 1),
        }
    }

    pub fn unit_at(&self, pos: Pos) -> Option<&Unit> {
        self.unit_id_at(pos).and_then(|id| self.unit(id))
    }

    pub fn is_free(&self, pos: Pos) -> bool {
        self.grid[self.cell(pos)] == 0
    }

    pub fn unit_index(&self, id: u32) -> Option<usize> {
        self.units.binary_search_by_key(&id, |u| u.id).ok()
    }

    pub fn unit(&self, id: u32) -> Option<&Unit> {
        self.unit_index(id).map(|i| &self.units[i])
    }

    fn unit_mut(&mut self, id: u32) -> Option<&mut Unit> {
        self.unit_index(id).map(move |i| &mut self.units[i])
    }

    /// Places a new unit at creation-time (map setup or production).
    pub fn spawn(&mut self, owner: Owner, kind: UnitKind, pos: Pos) -> Result<u32, SimError> {
        if !self.is_free(pos) {
            return Err(SimError::CellOccupied {
                x: pos.x,
                y: pos.y,
            });
        }
        let id = self.next_id;
        self.next_id += 1;
        let hp = self.stats.max_hp(kind);
        let cargo = if kind == UnitKind::Mine {
            self.stats.mine_capacity
        } else {
            0
        };
        let cell = self.cell(pos);
        self.units.push(Unit {
            id,
            owner,
            kind,
            pos,
            hp,
            cargo,
            busy: None,
        });
        self.grid[cell] = id + 1;
        Ok(id)
    }

    pub fn idle_units(&self, player: Player) -> impl Iterator<Item = &Unit> {
        self.units
            .iter()
            .filter(move |u| u.owner == Owner::Player(player) && u.is_idle())
    }

    pub fn has_idle_units(&self, player: Player) -> bool {
        self.idle_units(player).next().is_some()
    }

    /// True when either player must decide something this cycle.
    pub fn is_decision_point(&self) -> bool {
        self.has_idle_units(Player::Max) || self.has_idle_units(Player::Min)
    }

    pub fn units_of(&self, player: Player) -> impl Iterator<Item = &Unit> {
        self.units
            .iter()
            .filter(move |u| u.owner == Owner::Player(player))
    }

    /// Winner determination: a player without units loses, both without (or
    /// the cycle limit) is a draw.
    pub fn winner(&self) -> MatchResult {
        let max_alive = self.units_of(Player::Max).next().is_some();
        let min_alive = self.units_of(Player::Min).next().is_some();
        match (max_alive, min_alive) {
            (false, false) => MatchResult::Draw,
            (true, false) => MatchResult::Winner(Player::Max),
            (false, true) => MatchResult::Winner(Player::Min),
            (true, true) => {
                if self.cycle >= self.cycle_limit {
                    MatchResult::Draw
                } else {
                    MatchResult::Ongoing
                }
            }
        }
    }

    /// Validates a joint player-action: it must cover exactly the player's
    /// idle units, each unit-action must be individually legal, the produce
    /// spend must fit the stockpile, and no two produce actions may target
    /// the same cell.
    pub fn validate_action(&self, player: Player, action: &PlayerAction) -> Result<(), SimError> {
        let mut covered = 0usize;
        let mut spend = 0u64;
        let mut produce_cells: Vec<Pos> = Vec::new();
        for &(unit_id, unit_action) in &action.assignments {
            let unit = self.unit(unit_id).ok_or(SimError::UnknownUnit(unit_id))?;
            if unit.owner != Owner::Player(player) {
                return Err(SimError::NotAPlayerUnit(unit_id));
            }
            if !unit.is_idle() {
                return Err(SimError::BusyUnit(unit_id));
            }
            if !is_action_legal(self, unit, unit_action) {
                return Err(SimError::IllegalAction {
                    unit: unit_id,
                    reason: format!("{unit_action:?} is not legal here"),
                });
            }
            if let UnitAction::Produce { kind, dir } = unit_action {
                spend += self.stats.cost(kind) as u64;
                let target = self.neighbor(unit.pos, dir).expect("legal produce target");
                if produce_cells.contains(&target) {
                    return Err(SimError::IllegalAction {
                        unit: unit_id,
                        reason: "two produce actions target the same cell".into(),
                    });
                }
                produce_cells.push(target);
            }
            covered += 1;
        }
        if spend > self.resources[player.index()] as u64 {
            return Err(SimError::IllegalAction {
                unit: action.assignments.first().map(|a| a.0).unwrap_or(0),
                reason: "joint produce spend exceeds the stockpile".into(),
            });
        }
        let idle = self.idle_units(player).count();
        if covered != idle {
            return Err(SimError::IncompleteAssignment {
                covered,
                idle,
            });
        }
        Ok(())
    }

    /// Registers a validated player-action; produce costs are debited now
    /// and refunded if the production later fails.
    pub fn issue_action(&mut self, player: Player, action: &PlayerAction) -> Result<(), SimError> {
        self.validate_action(player, action)?;
        let cycle = self.cycle;
        for &(unit_id, unit_action) in &action.assignments {
            if let UnitAction::Produce { kind, .. } = unit_action {
                self.resources[player.index()] -= self.stats.cost(kind);
            }
            let finish = cycle + action_duration(&self.stats, unit_action);
            let unit = self.unit_mut(unit_id).expect("validated unit");
            unit.busy = Some(Pending {
                action: unit_action,
                finish,
            });
        }
        Ok(())
    }

    /// Advances one cycle: completes every action whose completion cycle
    /// arrived (ascending unit id; conflict losers cancel to no-ops) and
    /// removes units at zero hit-points.
    pub fn advance(&mut self) {
        self.cycle += 1;
        let cycle = self.cycle;
        let due: Vec<u32> = self
            .units
            .iter()
            .filter(|u| u.busy.map_or(false, |p| p.finish <= cycle))
            .map(|u| u.id)
            .collect();
        for id in due {
            let Some(idx) = self.unit_index(id) else {
                continue;
            };
            let action = self.units[idx].busy.expect("due unit is busy").action;
            self.units[idx].busy = None;
            self.complete(id, action);
        }
        self.remove_dead();
    }

    fn complete(&mut self, id: u32, action: UnitAction) {
        let (pos, owner, kind) = {
            let unit = self.unit(id).expect("completing unit exists");
            (unit.pos, unit.owner, unit.kind)
        };
        match action {
            UnitAction::Noop => {}
            UnitAction::Move(dir) => {
                if let Some(target) = self.neighbor(pos, dir) {
                    if self.is_free(target) {
                        let from = self.cell(pos);
                        let to = self.cell(target);
                        self.grid[from] = 0;
                        self.grid[to] = id + 1;
                        self.unit_mut(id).unwrap().pos = target;
                    }
                    // Occupied target: the move cancels, the unit stays.
                }
            }
            UnitAction::Harvest(dir) => {
                let Some(target) = self.neighbor(pos, dir) else {
                    return;
                };
                let Some(mine_id) = self.unit_id_at(target) else {
                    return;
                };
                let mine_ok = {
                    let mine = self.unit(mine_id).unwrap();
                    mine.kind == UnitKind::Mine && mine.cargo >= 1
                };
                let worker_ok = {
                    let unit = self.unit(id).unwrap();
                    unit.kind == UnitKind::Worker && unit.cargo == 0
                };
                if mine_ok && worker_ok {
                    let exhausted = {
                        let mine = self.unit_mut(mine_id).unwrap();
                        mine.cargo -= 1;
                        mine.cargo == 0
                    };
                    self.unit_mut(id).unwrap().cargo = 1;
                    if exhausted {
                        self.remove_unit(mine_id);
                    }
                }
            }
            UnitAction::Return(dir) => {
                let Some(target) = self.neighbor(pos, dir) else {
                    return;
                };
                let base_ok = self
                    .unit_at(target)
                    .map_or(false, |u| u.kind == UnitKind::Base && u.owner == owner);
                if base_ok {
                    if let Some(player) = owner.player() {
                        let cargo = {
                            let unit = self.unit_mut(id).unwrap();
                            std::mem::take(&mut unit.cargo)
                        };
                        self.resources[player.index()] += cargo as u32;
                    }
                }
            }
            UnitAction::Produce { kind: produced, dir } => {
                let target = self.neighbor(pos, dir);
                let spawned = match target {
                    Some(target) if self.is_free(target) => {
                        self.spawn(owner, produced, target).is_ok()
                    }
                    _ => false,
                };
                if !spawned {
                    // Blocked production refunds its reserved cost.
                    if let Some(player) = owner.player() {
                        self.resources[player.index()] += self.stats.cost(produced);
                    }
                }
            }
            UnitAction::Attack(dir) => {
                let Some(target) = self.neighbor(pos, dir) else {
                    return;
                };
                let victim = match self.unit_at(target) {
                    Some(v)
                        if v.owner != owner
                            && v.owner != Owner::Neutral
                            && self.stats.damage(kind) > 0 =>
                    {
                        Some(v.id)
                    }
                    _ => None,
                };
                if let Some(victim_id) = victim {
                    let damage = self.stats.damage(kind);
                    let victim = self.unit_mut(victim_id).unwrap();
                    victim.hp = victim.hp.saturating_sub(damage);
                }
            }
        }
    }

    fn remove_unit(&mut self, id: u32) {
        if let Some(idx) = self.unit_index(id) {
            // Refund escrowed production so resources only leave the economy
            // when a unit actually spawns.
            if let Some(Pending {
                action: UnitAction::Produce { kind, .. },
                ..
            }) = self.units[idx].busy
            {
                if let Some(player) = self.units[idx].owner.player() {
                    self.resources[player.index()] += self.stats.cost(kind);
                }
            }
            let cell = self.cell(self.units[idx].pos);
            self.grid[cell] = 0;
            self.units.remove(idx);
        }
    }

    fn remove_dead(&mut self) {
        let dead: Vec<u32> = self
            .units
            .iter()
            .filter(|u| u.hp == 0 && u.kind != UnitKind::Mine)
            .map(|u| u.id)
            .collect();
        for id in dead {
            self.remove_unit(id);
        }
    }

    /// The transition function: registers both player-actions (either may be
    /// empty when that player has no idle units) and advances one cycle.
    pub fn step(
        &self,
        action_max: &PlayerAction,
        action_min: &PlayerAction,
    ) -> Result<GameState, SimError> {
        let mut next = self.clone();
        next.issue_action(Player::Max, action_max)?;
        next.issue_action(Player::Min, action_min)?;
        next.advance();
        Ok(next)
    }
}
