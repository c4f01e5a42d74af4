use std::sync::Arc;
use std::time::Instant;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rts_sim::*;

fn main() {
    let stats = Arc::new(UnitStats::default());
    for name in ["8x8-1base", "8x8-4base", "12x12-4base"] {
        let initial = builtin_map(name, stats.clone()).unwrap();
        // mid-game state
        let mut mid = initial.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..150 {
            if mid.winner() != MatchResult::Ongoing { break; }
            let am = policy_action(&mid, Player::Max, PlayoutPolicy::Random, &mut rng);
            let an = policy_action(&mid, Player::Min, PlayoutPolicy::Random, &mut rng);
            mid.issue_action(Player::Max, &am).unwrap();
            mid.issue_action(Player::Min, &an).unwrap();
            mid.advance();
        }
        for (label, s) in [("start", &initial), ("mid", &mid)] {
            let n = 20_000;
            let t0 = Instant::now();
            let mut acc = 0.0;
            for _ in 0..n {
                acc += playout(s, PlayoutPolicy::Random, PlayoutPolicy::Random, 100, &mut rng);
            }
            let dt = t0.elapsed();
            println!("{name:12} {label:5} units={:2} {:7.2} us/playout (acc {acc:.1})", s.units.len(), dt.as_micros() as f64 / n as f64);
        }
    }
}
