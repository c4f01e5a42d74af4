//! Monte Carlo playouts under default policies.

use rand::Rng;

use crate::action::{legal_unit_actions, PlayerAction, UnitAction};
use crate::eval::evaluate;
use crate::state::{GameState, MatchResult, Pos};
use crate::units::Player;

pub const DEFAULT_PLAYOUT_HORIZON: u32 = 100;

/// Default action policies used inside playouts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlayoutPolicy {
    /// Every idle unit stands still.
    Noop,
    /// Uniform among each unit's legal actions, joint-constraint aware.
    Random,
    /// Like `Random` but attack/harvest/return weighted five-fold.
    RandomBiased,
}

fn action_weight(policy: PlayoutPolicy, action: &UnitAction) -> u32 {
    match policy {
        PlayoutPolicy::Noop | PlayoutPolicy::Random => 1,
        PlayoutPolicy::RandomBiased => match action {
            UnitAction::Attack(_) | UnitAction::Harvest(_) | UnitAction::Return(_) => 5,
            _ => 1,
        },
    }
}

/// Samples a legal joint action for `player`: units visited in id order, each
/// choosing among its legal actions filtered by the remaining stockpile and
/// the produce cells already claimed.
pub fn policy_action<R: Rng>(
    state: &GameState,
    player: Player,
    policy: PlayoutPolicy,
    rng: &mut R,
) -> PlayerAction {
    let mut assignments: Vec<(u32, UnitAction)> = Vec::new();
    if !state.has_idle_units(player) {
        return PlayerAction::empty();
    }
    let mut budget = state.resources[player.index()];
    let mut claimed: Vec<Pos> = Vec::new();
    let ids: Vec<u32> = state.idle_units(player).map(|u| u.id).collect();
    for id in ids {
        if policy == PlayoutPolicy::Noop {
            assignments.push((id, UnitAction::Noop));
            continue;
        }
        let unit = state.unit(id).expect("idle unit exists");
        let candidates: Vec<UnitAction> = legal_unit_actions(state, id)
            .expect("idle player unit")
            .into_iter()
            .filter(|action| match action {
                UnitAction::Produce { kind, dir } => {
                    let cost = state.stats.cost(*kind);
                    let target = state.neighbor(unit.pos, *dir).expect("legal target");
                    cost <= budget && !claimed.contains(&target)
                }
                _ => true,
            })
            .collect();
        let total: u32 = candidates.iter().map(|a| action_weight(policy, a)).sum();
        let mut draw = rng.gen_range(0..total);
        let mut chosen = UnitAction::Noop;
        for action in &candidates {
            let w = action_weight(policy, action);
            if draw < w {
                chosen = *action;
                break;
            }
            draw -= w;
        }
        if let UnitAction::Produce { kind, dir } = chosen {
            budget -= state.stats.cost(kind);
            claimed.push(state.neighbor(unit.pos, dir).expect("legal target"));
        }
        assignments.push((id, chosen));
    }
    PlayerAction { assignments }
}

/// Advances `state` in place under both policies until a terminal state or
/// the horizon; returns +1/-1/0 for a decided result (max perspective), else
/// the static evaluation of the reached state.
pub fn playout_from<R: Rng>(
    state: &mut GameState,
    policy_max: PlayoutPolicy,
    policy_min: PlayoutPolicy,
    horizon: u32,
    rng: &mut R,
) -> f64 {
    for _ in 0..horizon {
        match state.winner() {
            MatchResult::Winner(p) => return p.sign(),
            MatchResult::Draw => return 0.0,
            MatchResult::Ongoing => {}
        }
        let action_max = policy_action(state, Player::Max, policy_max, rng);
        let action_min = policy_action(state, Player::Min, policy_min, rng);
        state
            .issue_action(Player::Max, &action_max)
            .expect("policy actions are legal");
        state
            .issue_action(Player::Min, &action_min)
            .expect("policy actions are legal");
        state.advance();
    }
    match state.winner() {
        MatchResult::Winner(p) => p.sign(),
        MatchResult::Draw => 0.0,
        MatchResult::Ongoing => evaluate(state),
    }
}

/// Playout from a copy of `state`.
pub fn playout<R: Rng>(
    state: &GameState,
    policy_max: PlayoutPolicy,
    policy_min: PlayoutPolicy,
    horizon: u32,
    rng: &mut R,
) -> f64 {
    let mut scratch = state.clone();
    playout_from(&mut scratch, policy_max, policy_min, horizon, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::{builtin_map, MAP_8X8_1BASE};
    use crate::units::{Owner, UnitKind, UnitStats};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    #[test]
    fn noop_policies_leave_the_evaluation_unchanged() {
        let stats = Arc::new(UnitStats::default());
        let state = crate::map::parse_map(MAP_8X8_1BASE, stats).unwrap();
        let before = evaluate(&state);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let value = playout(
            &state,
            PlayoutPolicy::Noop,
            PlayoutPolicy::Noop,
            100,
            &mut rng,
        );
        assert_eq!(value, before);
    }

    #[test]
    fn terminal_states_return_their_outcome() {
        let stats = Arc::new(UnitStats::default());
        let mut state = GameState::new(4, 4, stats);
        state
            .spawn(Owner::Player(Player::Max), UnitKind::Worker, crate::state::Pos::new(0, 0))
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let value = playout(
            &state,
            PlayoutPolicy::Random,
            PlayoutPolicy::Random,
            1,
            &mut rng,
        );
        assert_eq!(value, 1.0);
    }

    #[test]
    fn playouts_are_bit_reproducible() {
        let stats = Arc::new(UnitStats::default());
        let state = builtin_map("8x8-1base", stats).unwrap();
        let run = |seed: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..20)
                .map(|_| {
                    playout(
                        &state,
                        PlayoutPolicy::Random,
                        PlayoutPolicy::Random,
                        100,
                        &mut rng,
                    )
                })
                .collect::<Vec<f64>>()
        };
        assert_eq!(run(42), run(42));
        assert_ne!(run(42), run(43));
    }

    #[test]
    fn biased_policy_prefers_attack_fivefold() {
        // One worker flanked by an enemy: actions are noop, moves, attack.
        let stats = Arc::new(UnitStats::default());
        let mut state = GameState::new(4, 4, stats);
        let w = state
            .spawn(Owner::Player(Player::Max), UnitKind::Worker, crate::state::Pos::new(1, 1))
            .unwrap();
        state
            .spawn(Owner::Player(Player::Min), UnitKind::Worker, crate::state::Pos::new(2, 1))
            .unwrap();
        let actions = legal_unit_actions(&state, w).unwrap();
        let attack_count = actions
            .iter()
            .filter(|a| matches!(a, UnitAction::Attack(_)))
            .count();
        assert_eq!(attack_count, 1);
        let plain = actions.len() - 1;
        let expected = 5.0 / (plain as f64 + 5.0);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let draws = 100_000;
        let mut attacks = 0usize;
        for _ in 0..draws {
            let pa = policy_action(&state, Player::Max, PlayoutPolicy::RandomBiased, &mut rng);
            if matches!(pa.assignments[0].1, UnitAction::Attack(_)) {
                attacks += 1;
            }
        }
        let freq = attacks as f64 / draws as f64;
        assert!(
            (freq - expected).abs() < 0.02,
            "attack frequency {freq} vs expected {expected}"
        );
    }
}
