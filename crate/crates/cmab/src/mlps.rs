//! Greedy variant of matching learning with polynomial storage.
//!
//! Keeps only the per-variable statistics and selects the macro-arm greedily
//! under the W index, restarting from several random variable orders. The
//! original assignment-problem formulation does not carry over to variables
//! with unequal value lists and a legality predicate, hence the greedy
//! construction.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{CmabError, Result};
use crate::problem::{legal_values, CmabProblem, MacroArm};
use crate::select::argmax_tie_break;
use crate::stats::BanditView;

/// W index of a (partial) macro-arm: the sum of marginal means plus an
/// exploration bonus driven by the least-sampled chosen value.
///
/// `m` is the largest value count over all variables; a zero `min_count`
/// scores infinity so unvisited values are always picked up first.
pub fn w_index(sum_means: f64, min_count: u64, ln_t: f64, c: f64, m: f64) -> f64 {
    if min_count == 0 {
        return f64::INFINITY;
    }
    sum_means + c * m * ((m + 1.0) * ln_t / min_count as f64).sqrt()
}

#[derive(Debug, Clone)]
pub struct MlpsSampler {
    locals: Vec<BanditView>,
    seen: HashSet<MacroArm>,
    t: u64,
    c: f64,
    restarts: u32,
    m: f64,
}

impl MlpsSampler {
    pub fn new(value_counts: &[usize], c: f64, restarts: u32) -> Self {
        let m = value_counts.iter().copied().max().unwrap_or(1) as f64;
        Self {
            locals: value_counts.iter().map(|&k| BanditView::new(k)).collect(),
            seen: HashSet::new(),
            t: 0,
            c,
            restarts: restarts.max(1),
            m,
        }
    }

    pub fn for_problem<P: CmabProblem + ?Sized>(problem: &P, c: f64, restarts: u32) -> Self {
        let counts: Vec<usize> = (0..problem.num_variables())
            .map(|i| problem.num_values(i))
            .collect();
        Self::new(&counts, c, restarts)
    }

    pub fn iterations(&self) -> u64 {
        self.t
    }

    pub fn explored_arms(&self) -> usize {
        self.seen.len()
    }

    /// Builds one macro-arm greedily: variables in uniform-random order, each
    /// value maximizing the partial W index among legality-consistent values.
    fn greedy_arm<P: CmabProblem + ?Sized, R: Rng>(
        &self,
        problem: &P,
        c: f64,
        rng: &mut R,
    ) -> Result<(MacroArm, f64)> {
        let n = problem.num_variables();
        let ln_t = (self.t.max(1) as f64).ln();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        let mut partial: Vec<Option<u16>> = vec![None; n];
        let mut sum_means = 0.0;
        let mut min_count = u64::MAX;
        for &var in &order {
            let choices = legal_values(problem, &mut partial, var);
            if choices.is_empty() {
                return Err(CmabError::NoLegalCompletion { variable: var });
            }
            let stats = &self.locals[var];
            let picked = argmax_tie_break(
                choices.iter().map(|&v| v as usize),
                |v| {
                    w_index(
                        sum_means + stats.arms[v].mean,
                        min_count.min(stats.arms[v].count),
                        ln_t,
                        c,
                        self.m,
                    )
                },
                rng,
            )
            .expect("non-empty choices");
            sum_means += stats.arms[picked].mean;
            min_count = min_count.min(stats.arms[picked].count);
            partial[var] = Some(picked as u16);
        }
        let arm = MacroArm(partial.into_iter().map(|v| v.unwrap()).collect());
        Ok((arm, w_index(sum_means, min_count, ln_t, c, self.m)))
    }

    fn best_of_restarts<P: CmabProblem + ?Sized, R: Rng>(
        &self,
        problem: &P,
        c: f64,
        rng: &mut R,
    ) -> Result<MacroArm> {
        let mut best: Option<(MacroArm, f64)> = None;
        let mut ties = 0u32;
        for _ in 0..self.restarts {
            let (arm, w) = self.greedy_arm(problem, c, rng)?;
            match &best {
                None => {
                    best = Some((arm, w));
                    ties = 1;
                }
                Some((_, bw)) if w > *bw => {
                    best = Some((arm, w));
                    ties = 1;
                }
                Some((_, bw)) if w == *bw => {
                    ties += 1;
                    if rng.gen_range(0..ties) == 0 {
                        best = Some((arm, w));
                    }
                }
                _ => {}
            }
        }
        Ok(best.expect("restarts >= 1").0)
    }

    pub fn select<P: CmabProblem + ?Sized, R: Rng>(
        &self,
        problem: &P,
        rng: &mut R,
    ) -> Result<MacroArm> {
        self.best_of_restarts(problem, self.c, rng)
    }

    pub fn update(&mut self, arm: &MacroArm, reward: f64) -> Result<()> {
        for (var, &value) in arm.0.iter().enumerate() {
            self.locals[var].update(value as usize, reward)?;
        }
        self.seen.insert(arm.clone());
        self.t += 1;
        Ok(())
    }

    pub fn iterate<P: CmabProblem + ?Sized, R: Rng>(
        &mut self,
        problem: &P,
        rng: &mut R,
    ) -> Result<(MacroArm, f64)> {
        let arm = self.select(problem, rng)?;
        let reward = problem.sample(&arm, rng);
        self.update(&arm, reward)?;
        Ok((arm, reward))
    }

    /// Recommendation: the greedy arm under the means alone (no exploration
    /// bonus). There is no global bandit to read a most-sampled arm from.
    pub fn recommend<P: CmabProblem + ?Sized, R: Rng>(
        &self,
        problem: &P,
        rng: &mut R,
    ) -> Result<MacroArm> {
        if self.t == 0 {
            return Err(CmabError::NotInitialized);
        }
        let mut best: Option<(MacroArm, f64)> = None;
        for _ in 0..self.restarts {
            let n = problem.num_variables();
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(rng);
            let mut partial: Vec<Option<u16>> = vec![None; n];
            let mut sum = 0.0;
            for &var in &order {
                let choices = legal_values(problem, &mut partial, var);
                if choices.is_empty() {
                    return Err(CmabError::NoLegalCompletion { variable: var });
                }
                let picked = argmax_tie_break(
                    choices.iter().map(|&v| v as usize),
                    |v| self.locals[var].arms[v].mean,
                    rng,
                )
                .expect("non-empty choices");
                sum += self.locals[var].arms[picked].mean;
                partial[var] = Some(picked as u16);
            }
            let arm = MacroArm(partial.into_iter().map(|v| v.unwrap()).collect());
            if best.as_ref().map_or(true, |(_, s)| sum > *s) {
                best = Some((arm, sum));
            }
        }
        Ok(best.expect("restarts >= 1").0)
    }
}
