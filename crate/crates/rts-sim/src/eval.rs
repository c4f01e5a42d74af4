//! Static evaluation: resource-cost scores weighted by sqrt of health,
//! normalized to [-1, 1] from max's perspective.

use crate::state::GameState;
use crate::units::{Owner, Player, UnitKind};

/// Score of one player: the sum over their units of
/// `cost(kind) * sqrt(hp / max_hp(kind))`.
pub fn score(state: &GameState, player: Player) -> f64 {
    state
        .units
        .iter()
        .filter(|u| u.owner == Owner::Player(player) && u.kind != UnitKind::Mine)
        .map(|u| {
            let stats = state.stats.kind(u.kind);
            stats.cost as f64 * (u.hp as f64 / stats.max_hp as f64).sqrt()
        })
        .sum()
}

/// `2 * score(max) / (score(max) + score(min)) - 1`, zero when both scores
/// are zero.
pub fn evaluate(state: &GameState) -> f64 {
    let max_score = score(state, Player::Max);
    let min_score = score(state, Player::Min);
    let total = max_score + min_score;
    if total == 0.0 {
        return 0.0;
    }
    2.0 * max_score / total - 1.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::Pos;
    use crate::units::UnitStats;
    use std::sync::Arc;

    fn state() -> GameState {
        GameState::new(8, 8, Arc::new(UnitStats::default()))
    }

    #[test]
    fn mirrored_state_scores_zero() {
        let mut s = state();
        s.spawn(Owner::Player(Player::Max), UnitKind::Base, Pos::new(1, 1))
            .unwrap();
        s.spawn(Owner::Player(Player::Max), UnitKind::Worker, Pos::new(2, 1))
            .unwrap();
        s.spawn(Owner::Player(Player::Min), UnitKind::Base, Pos::new(6, 6))
            .unwrap();
        s.spawn(Owner::Player(Player::Min), UnitKind::Worker, Pos::new(5, 6))
            .unwrap();
        assert!(evaluate(&s).abs() < 1e-12);
    }

    #[test]
    fn two_to_one_score_ratio_gives_one_third() {
        // max: two lights (cost 2, full hp) -> 4; min: one light -> 2.
        let mut s = state();
        s.spawn(Owner::Player(Player::Max), UnitKind::Light, Pos::new(0, 0))
            .unwrap();
        s.spawn(Owner::Player(Player::Max), UnitKind::Light, Pos::new(1, 0))
            .unwrap();
        s.spawn(Owner::Player(Player::Min), UnitKind::Light, Pos::new(7, 7))
            .unwrap();
        assert!((evaluate(&s) - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn min_without_units_is_plus_one() {
        let mut s = state();
        s.spawn(Owner::Player(Player::Max), UnitKind::Worker, Pos::new(0, 0))
            .unwrap();
        assert_eq!(evaluate(&s), 1.0);
    }

    #[test]
    fn empty_board_is_zero() {
        assert_eq!(evaluate(&state()), 0.0);
    }

    #[test]
    fn damage_lowers_the_score_by_sqrt_health() {
        let mut s = state();
        let id = s
            .spawn(Owner::Player(Player::Max), UnitKind::Light, Pos::new(0, 0))
            .unwrap();
        s.spawn(Owner::Player(Player::Min), UnitKind::Light, Pos::new(7, 7))
            .unwrap();
        let idx = s.unit_index(id).unwrap();
        s.units[idx].hp = 1;
        // score(max) = 2 * sqrt(1/4) = 1, score(min) = 2.
        assert!((evaluate(&s) - (2.0 / 3.0 - 1.0)).abs() < 1e-12);
        // Mines never contribute to either score.
        s.spawn(Owner::Neutral, UnitKind::Mine, Pos::new(3, 3)).unwrap();
        assert!((evaluate(&s) - (2.0 / 3.0 - 1.0)).abs() < 1e-12);
    }
}
