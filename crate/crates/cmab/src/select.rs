//! Flat-bandit arm selection policies.
//!
//! All tie-breaks are uniform at random among the maxima so that no policy
//! carries an index-order bias into the experiments.

use rand::Rng;

use crate::error::{CmabError, Result};
use crate::stats::BanditView;

/// Uniform-random choice among the indices in `candidates` maximizing `score`.
///
/// Uses reservoir sampling, so a single pass and one rng draw per tie.
pub(crate) fn argmax_tie_break<R: Rng, F: Fn(usize) -> f64>(
    candidates: impl Iterator<Item = usize>,
    score: F,
    rng: &mut R,
) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    let mut ties = 0u32;
    for idx in candidates {
        let s = score(idx);
        match best {
            None => {
                best = Some((idx, s));
                ties = 1;
            }
            Some((_, b)) if s > b => {
                best = Some((idx, s));
                ties = 1;
            }
            Some((_, b)) if s == b => {
                ties += 1;
                if rng.gen_range(0..ties) == 0 {
                    best = Some((idx, s));
                }
            }
            _ => {}
        }
    }
    best.map(|(idx, _)| idx)
}

/// Most-sampled arm of the view; count ties broken by higher mean, then
/// uniformly at random. This is the recommendation rule every strategy uses.
pub fn most_sampled<R: Rng>(view: &BanditView, rng: &mut R) -> Option<usize> {
    let max_count = view.arms.iter().map(|s| s.count).max()?;
    argmax_tie_break(
        (0..view.len()).filter(|&i| view.arms[i].count == max_count),
        |i| view.arms[i].mean,
        rng,
    )
}

/// ε-greedy over a subset of arms: with probability `1 - epsilon` the
/// highest-mean candidate (ties uniform), otherwise a uniform candidate.
pub fn epsilon_greedy_among<R: Rng>(
    view: &BanditView,
    candidates: &[usize],
    epsilon: f64,
    rng: &mut R,
) -> Result<usize> {
    if candidates.is_empty() {
        return Err(CmabError::EmptyArms);
    }
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(CmabError::InvalidParam {
            name: "epsilon",
            value: epsilon,
        });
    }
    if epsilon > 0.0 && rng.gen::<f64>() < epsilon {
        return Ok(candidates[rng.gen_range(0..candidates.len())]);
    }
    Ok(
        argmax_tie_break(candidates.iter().copied(), |i| view.arms[i].mean, rng)
            .expect("non-empty candidates"),
    )
}

/// ε-greedy over every arm of the view.
pub fn epsilon_greedy_select<R: Rng>(
    view: &BanditView,
    epsilon: f64,
    rng: &mut R,
) -> Result<usize> {
    if view.is_empty() {
        return Err(CmabError::EmptyArms);
    }
    let all: Vec<usize> = (0..view.len()).collect();
    epsilon_greedy_among(view, &all, epsilon, rng)
}

/// UCB1 index of one arm: `mean + c * sqrt(ln(total) / count)`.
///
/// Unvisited arms score `fpu` when given, +inf otherwise (forcing a visit).
pub fn ucb1_index(count: u64, mean: f64, total_pulls: u64, c: f64, fpu: Option<f64>) -> f64 {
    if count == 0 {
        return fpu.unwrap_or(f64::INFINITY);
    }
    mean + c * ((total_pulls.max(1) as f64).ln() / count as f64).sqrt()
}

/// UCB1 selection over a subset of arms, ties uniform at random.
pub fn ucb1_among<R: Rng>(
    view: &BanditView,
    candidates: &[usize],
    c: f64,
    fpu: Option<f64>,
    rng: &mut R,
) -> Result<usize> {
    if candidates.is_empty() {
        return Err(CmabError::EmptyArms);
    }
    if c < 0.0 {
        return Err(CmabError::NegativeExploration(c));
    }
    let total = view.total_pulls;
    Ok(argmax_tie_break(
        candidates.iter().copied(),
        |i| ucb1_index(view.arms[i].count, view.arms[i].mean, total, c, fpu),
        rng,
    )
    .expect("non-empty candidates"))
}

/// UCB1 selection over every arm of the view.
pub fn ucb1_select<R: Rng>(view: &BanditView, c: f64, fpu: Option<f64>, rng: &mut R) -> Result<usize> {
    if view.is_empty() {
        return Err(CmabError::EmptyArms);
    }
    let all: Vec<usize> = (0..view.len()).collect();
    ucb1_among(view, &all, c, fpu, rng)
}
