//! Linear side information: a two-phase strategy that first probes every
//! (variable, value) pair to estimate marginal contributions, generates a
//! pool of candidate macro-arms from those estimates, and then runs
//! sequential halving over the pool with the remaining budget.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{CmabError, Result};
use crate::halving::sequential_halving;
use crate::problem::{legal_values, noop_arm, CmabProblem, MacroArm};
use crate::stats::BanditView;

/// How side-information probes fill the non-probed variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LsiSideInfo {
    /// All other variables take their special no-op value.
    NoopFill,
    /// All other variables take uniform-random legal values.
    RandomFill,
}

/// How candidates are generated from the side information.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LsiGeneration {
    /// Variables assigned in decreasing entropy order, each sampled from its
    /// normalized value-reward distribution.
    Entropy,
    /// Values sampled from the union of the remaining variables'
    /// distributions until the arm is complete.
    Union,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LsiConfig {
    /// Fraction of the budget spent on side information (`T_g = round(r * T)`).
    pub generation_ratio: f64,
    pub side_info: LsiSideInfo,
    pub generation: LsiGeneration,
    /// Candidate pool size; defaults to one tenth of the evaluation budget.
    pub candidates: Option<usize>,
}

impl Default for LsiConfig {
    fn default() -> Self {
        Self {
            generation_ratio: 0.25,
            side_info: LsiSideInfo::NoopFill,
            generation: LsiGeneration::Entropy,
            candidates: None,
        }
    }
}

/// Result of one LSI run, with the bookkeeping the run metadata wants.
#[derive(Debug, Clone)]
pub struct LsiOutcome {
    pub winner: MacroArm,
    pub candidates: usize,
    /// Probes where the no-op fill was illegal and random fill was used.
    pub noop_fill_fallbacks: u64,
    pub generation_budget: u64,
    pub evaluation_budget: u64,
}

/// Shifts by the minimum and divides by the sum; all-equal input maps to the
/// uniform distribution.
pub fn normalize_to_distribution(rewards: &[f64]) -> Vec<f64> {
    assert!(!rewards.is_empty(), "empty reward vector");
    let min = rewards.iter().cloned().fold(f64::INFINITY, f64::min);
    let shifted: Vec<f64> = rewards.iter().map(|r| r - min).collect();
    let sum: f64 = shifted.iter().sum();
    if sum == 0.0 {
        return vec![1.0 / rewards.len() as f64; rewards.len()];
    }
    shifted.iter().map(|s| s / sum).collect()
}

/// Shannon entropy in nats of a probability vector.
pub fn entropy_nats(dist: &[f64]) -> f64 {
    -dist
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.ln())
        .sum::<f64>()
}

fn sample_weighted<R: Rng>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return rng.gen_range(0..weights.len());
    }
    let mut draw = rng.gen::<f64>() * total;
    for (i, &w) in weights.iter().enumerate() {
        draw -= w;
        if draw <= 0.0 {
            return i;
        }
    }
    weights.len() - 1
}

/// Completes `partial` with uniform-random legal values (random order).
fn random_fill<P: CmabProblem + ?Sized, R: Rng>(
    problem: &P,
    partial: &mut [Option<u16>],
    rng: &mut R,
) -> Result<()> {
    let mut rest: Vec<usize> = (0..problem.num_variables())
        .filter(|&v| partial[v].is_none())
        .collect();
    rest.shuffle(rng);
    for var in rest {
        let choices = legal_values(problem, partial, var);
        if choices.is_empty() {
            return Err(CmabError::NoLegalCompletion { variable: var });
        }
        partial[var] = Some(choices[rng.gen_range(0..choices.len())]);
    }
    Ok(())
}

/// Spends `budget` probes evenly over all (variable, value) pairs and returns
/// the per-variable side-information statistics plus the number of probes
/// where the no-op fill had to fall back to a random fill.
pub fn collect_side_info<P: CmabProblem + ?Sized, R: Rng>(
    problem: &P,
    budget: u64,
    mode: LsiSideInfo,
    rng: &mut R,
) -> Result<(Vec<BanditView>, u64)> {
    let n = problem.num_variables();
    let mut side: Vec<BanditView> = (0..n)
        .map(|v| BanditView::new(problem.num_values(v)))
        .collect();
    let pairs: Vec<(usize, u16)> = (0..n)
        .flat_map(|v| (0..problem.num_values(v) as u16).map(move |x| (v, x)))
        .collect();
    if pairs.is_empty() {
        return Err(CmabError::DegenerateProblem);
    }
    let per_pair = budget / pairs.len() as u64;
    let extra = (budget % pairs.len() as u64) as usize;
    let mut fallbacks = 0u64;
    for (pair_idx, &(var, value)) in pairs.iter().enumerate() {
        let probes = per_pair + u64::from(pair_idx < extra);
        for _ in 0..probes {
            let mut partial: Vec<Option<u16>> = vec![None; n];
            partial[var] = Some(value);
            if !problem.partial_legal(&partial) {
                // This value can never appear in a legal arm; leave it at the
                // zero-count sentinel.
                break;
            }
            let arm = match mode {
                LsiSideInfo::NoopFill => {
                    let mut arm = noop_arm(problem);
                    arm.0[var] = value;
                    if problem.is_legal(&arm) {
                        arm
                    } else {
                        fallbacks += 1;
                        random_fill(problem, &mut partial, rng)?;
                        MacroArm(partial.iter().map(|v| v.unwrap()).collect())
                    }
                }
                LsiSideInfo::RandomFill => {
                    random_fill(problem, &mut partial, rng)?;
                    MacroArm(partial.iter().map(|v| v.unwrap()).collect())
                }
            };
            let reward = problem.sample(&arm, rng);
            side[var].update(value as usize, reward)?;
        }
    }
    Ok((side, fallbacks))
}

/// Generates up to `k` distinct legal candidates from the side information.
pub fn generate_candidates<P: CmabProblem + ?Sized, R: Rng>(
    problem: &P,
    side: &[BanditView],
    k: usize,
    mode: LsiGeneration,
    rng: &mut R,
) -> Result<Vec<MacroArm>> {
    let n = problem.num_variables();
    let dists: Vec<Vec<f64>> = side
        .iter()
        .map(|view| {
            let means: Vec<f64> = view.arms.iter().map(|s| s.mean).collect();
            normalize_to_distribution(&means)
        })
        .collect();
    // Entropy order is fixed across candidates; ties stay in variable order.
    let mut entropy_order: Vec<usize> = (0..n).collect();
    entropy_order.sort_by(|&a, &b| {
        entropy_nats(&dists[b])
            .partial_cmp(&entropy_nats(&dists[a]))
            .expect("finite entropy")
            .then(a.cmp(&b))
    });

    let mut seen: HashSet<MacroArm> = HashSet::new();
    let mut out: Vec<MacroArm> = Vec::with_capacity(k);
    let max_attempts = 20 * k;
    let mut attempts = 0;
    while out.len() < k && attempts < max_attempts {
        attempts += 1;
        let mut partial: Vec<Option<u16>> = vec![None; n];
        match mode {
            LsiGeneration::Entropy => {
                for &var in &entropy_order {
                    let choices = legal_values(problem, &mut partial, var);
                    if choices.is_empty() {
                        return Err(CmabError::NoLegalCompletion { variable: var });
                    }
                    let weights: Vec<f64> =
                        choices.iter().map(|&v| dists[var][v as usize]).collect();
                    let picked = choices[sample_weighted(&weights, rng)];
                    partial[var] = Some(picked);
                }
            }
            LsiGeneration::Union => {
                let mut remaining: Vec<usize> = (0..n).collect();
                while !remaining.is_empty() {
                    let mut union: Vec<(usize, u16)> = Vec::new();
                    let mut weights: Vec<f64> = Vec::new();
                    for &var in &remaining {
                        for v in legal_values(problem, &mut partial, var) {
                            union.push((var, v));
                            weights.push(dists[var][v as usize]);
                        }
                    }
                    if union.is_empty() {
                        return Err(CmabError::NoLegalCompletion {
                            variable: remaining[0],
                        });
                    }
                    let (var, value) = union[sample_weighted(&weights, rng)];
                    partial[var] = Some(value);
                    remaining.retain(|&v| v != var);
                }
            }
        }
        let arm = MacroArm(partial.into_iter().map(|v| v.unwrap()).collect());
        if seen.insert(arm.clone()) {
            out.push(arm);
        }
    }
    if out.is_empty() {
        return Err(CmabError::DegenerateProblem);
    }
    Ok(out)
}

/// Runs the full two-phase strategy with a known total budget.
pub fn lsi_run<P: CmabProblem + ?Sized, R: Rng>(
    problem: &P,
    budget: u64,
    config: &LsiConfig,
    rng: &mut R,
) -> Result<LsiOutcome> {
    if !(0.0..=1.0).contains(&config.generation_ratio) {
        return Err(CmabError::InvalidParam {
            name: "generation_ratio",
            value: config.generation_ratio,
        });
    }
    let t_g = (config.generation_ratio * budget as f64).round() as u64;
    let t_e = budget - t_g;
    let (side, fallbacks) = collect_side_info(problem, t_g, config.side_info, rng)?;
    let k = config
        .candidates
        .unwrap_or_else(|| ((t_e / 10).max(1)) as usize)
        .max(1)
        .min(t_e.max(1) as usize);
    let candidates = generate_candidates(problem, &side, k, config.generation, rng)?;
    let winner_idx = sequential_halving(
        candidates.len(),
        t_e,
        |i, rng: &mut R| problem.sample(&candidates[i], rng),
        rng,
    )?;
    Ok(LsiOutcome {
        winner: candidates[winner_idx].clone(),
        candidates: candidates.len(),
        noop_fill_fallbacks: fallbacks,
        generation_budget: t_g,
        evaluation_budget: t_e,
    })
}
