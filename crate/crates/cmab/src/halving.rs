//! Sequential-halving best-arm identification.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{CmabError, Result};
use crate::select::argmax_tie_break;
use crate::stats::ArmStats;

/// Runs sequential halving over `num_candidates` arms and returns the index
/// of the last survivor.
///
/// The budget is split into `ceil(log2 k)` equal rounds (leftover going to
/// the final round); each round splits its share evenly across the surviving
/// candidates, statistics accumulate across rounds, and the top half by mean
/// survives, ties broken uniformly at random.
pub fn sequential_halving<R, F>(
    num_candidates: usize,
    budget: u64,
    mut oracle: F,
    rng: &mut R,
) -> Result<usize>
where
    R: Rng,
    F: FnMut(usize, &mut R) -> f64,
{
    if num_candidates == 0 {
        return Err(CmabError::EmptyArms);
    }
    if budget < num_candidates as u64 {
        return Err(CmabError::BudgetTooSmall {
            budget,
            candidates: num_candidates,
        });
    }
    let mut stats = vec![ArmStats::new(); num_candidates];
    let mut alive: Vec<usize> = (0..num_candidates).collect();
    let rounds = (num_candidates as f64).log2().ceil() as u64;
    if rounds == 0 {
        return Ok(0);
    }
    let per_round = budget / rounds;
    let leftover = budget - per_round * rounds;
    for round in 0..rounds {
        let round_budget = if round + 1 == rounds {
            per_round + leftover
        } else {
            per_round
        };
        let per_candidate = round_budget / alive.len() as u64;
        for &idx in &alive {
            for _ in 0..per_candidate {
                let reward = oracle(idx, rng);
                stats[idx].update(reward)?;
            }
        }
        // Shuffle before the stable sort so equal means survive uniformly.
        alive.shuffle(rng);
        alive.sort_by(|&a, &b| {
            stats[b]
                .mean
                .partial_cmp(&stats[a].mean)
                .expect("rewards are finite")
        });
        alive.truncate(alive.len().div_ceil(2));
    }
    if alive.len() == 1 {
        return Ok(alive[0]);
    }
    Ok(argmax_tie_break(alive.iter().copied(), |i| stats[i].mean, rng)
        .expect("non-empty survivors"))
}
