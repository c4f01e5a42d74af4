//! A player's decision in a game state, viewed as a combinatorial bandit:
//! one variable per idle unit, values are that unit's legal actions, and the
//! reward oracle is a playout from the issued joint action.

use rand::RngCore;

use cmab::{CmabProblem, MacroArm};

use crate::action::{decision_table, PlayerAction, UnitAction};
use crate::playout::{playout_from, PlayoutPolicy};
use crate::state::{GameState, Pos};
use crate::units::Player;
use crate::SimError;

/// The bandit view of one decision point. Borrows the state; clones it only
/// per oracle sample.
pub struct DecisionCmab<'a> {
    pub state: &'a GameState,
    pub player: Player,
    pub unit_ids: Vec<u32>,
    pub actions: Vec<Vec<UnitAction>>,
    pub horizon: u32,
    pub policy: PlayoutPolicy,
}

/// Builds the bandit view of `player`'s decision. The no-op action sits at
/// value index 0 of every variable.
pub fn cmab_of_state(
    state: &GameState,
    player: Player,
    horizon: u32,
    policy: PlayoutPolicy,
) -> Result<DecisionCmab<'_>, SimError> {
    let (unit_ids, actions) = decision_table(state, player)?;
    if unit_ids.is_empty() {
        return Err(SimError::NoIdleUnits(player));
    }
    Ok(DecisionCmab {
        state,
        player,
        unit_ids,
        actions,
        horizon,
        policy,
    })
}

impl DecisionCmab<'_> {
    /// Translates a macro-arm into the joint player-action it encodes.
    pub fn to_player_action(&self, arm: &MacroArm) -> PlayerAction {
        PlayerAction {
            assignments: self
                .unit_ids
                .iter()
                .zip(arm.values())
                .map(|(&id, &v)| (id, self.actions_of_unit(id)[v as usize]))
                .collect(),
        }
    }

    fn actions_of_unit(&self, id: u32) -> &[UnitAction] {
        let idx = self.unit_ids.iter().position(|&u| u == id).expect("known unit");
        &self.actions[idx]
    }

    fn produce_target(&self, var: usize, value: u16) -> Option<(Pos, u32)> {
        match self.actions[var][value as usize] {
            UnitAction::Produce { kind, dir } => {
                let unit = self.state.unit(self.unit_ids[var]).expect("unit exists");
                let pos = self.state.neighbor(unit.pos, dir).expect("legal target");
                Some((pos, self.state.stats.cost(kind)))
            }
            _ => None,
        }
    }
}

impl CmabProblem for DecisionCmab<'_> {
    fn num_variables(&self) -> usize {
        self.unit_ids.len()
    }

    fn num_values(&self, var: usize) -> usize {
        self.actions[var].len()
    }

    fn special_value(&self, _var: usize) -> u16 {
        0
    }

    /// Joint legality: individual legality is built into the value lists, so
    /// only the shared stockpile and produce-cell conflicts remain.
    fn partial_legal(&self, partial: &[Option<u16>]) -> bool {
        let mut spend = 0u64;
        let mut cells: Vec<Pos> = Vec::new();
        for (var, assignment) in partial.iter().enumerate() {
            let Some(value) = assignment else { continue };
            if let Some((cell, cost)) = self.produce_target(var, *value) {
                if cells.contains(&cell) {
                    return false;
                }
                cells.push(cell);
                spend += cost as u64;
            }
        }
        spend <= self.state.resources[self.player.index()] as u64
    }

    /// Issues the encoded joint action and plays the game out; the result is
    /// signed for this decision's player.
    fn sample(&self, arm: &MacroArm, mut rng: &mut dyn RngCore) -> f64 {
        let mut scratch = self.state.clone();
        scratch
            .issue_action(self.player, &self.to_player_action(arm))
            .expect("macro-arms encode legal joint actions");
        let value = playout_from(&mut scratch, self.policy, self.policy, self.horizon, &mut rng);
        value * self.player.sign()
    }
}
