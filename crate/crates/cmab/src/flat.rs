//! Flat baselines: treat the CMAB as an ordinary bandit over its enumerated
//! legal macro-arms. Only usable when that enumeration fits under a cap.

use std::collections::HashMap;

use rand::Rng;

use crate::error::{CmabError, Result};
use crate::problem::{enumerate_legal, CmabProblem, MacroArm};
use crate::select::{epsilon_greedy_select, most_sampled, ucb1_select};
use crate::stats::BanditView;

/// Flat selection policy over enumerated macro-arms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FlatPolicy {
    EpsilonGreedy(f64),
    Ucb1 { c: f64 },
    /// UCB1 where unvisited arms score the fixed first-play-urgency value
    /// instead of forcing a visit.
    Ucb1Fpu { c: f64, fpu: f64 },
}

/// A flat bandit over every legal macro-arm of a problem.
#[derive(Debug, Clone)]
pub struct FlatSampler {
    arms: Vec<MacroArm>,
    index: HashMap<MacroArm, usize>,
    view: BanditView,
    policy: FlatPolicy,
}

impl FlatSampler {
    /// Enumerates the legal macro-arms (error above `cap`) and wraps them in
    /// a flat bandit.
    pub fn new<P: CmabProblem + ?Sized>(problem: &P, policy: FlatPolicy, cap: u64) -> Result<Self> {
        let arms = enumerate_legal(problem, cap)?;
        if arms.is_empty() {
            return Err(CmabError::DegenerateProblem);
        }
        let index = arms
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), i))
            .collect();
        let view = BanditView::new(arms.len());
        Ok(Self {
            arms,
            index,
            view,
            policy,
        })
    }

    pub fn num_arms(&self) -> usize {
        self.arms.len()
    }

    pub fn explored_arms(&self) -> usize {
        self.view.arms.iter().filter(|s| s.count > 0).count()
    }

    pub fn select<R: Rng>(&self, rng: &mut R) -> Result<MacroArm> {
        let idx = match self.policy {
            FlatPolicy::EpsilonGreedy(e) => epsilon_greedy_select(&self.view, e, rng)?,
            FlatPolicy::Ucb1 { c } => ucb1_select(&self.view, c, None, rng)?,
            FlatPolicy::Ucb1Fpu { c, fpu } => ucb1_select(&self.view, c, Some(fpu), rng)?,
        };
        Ok(self.arms[idx].clone())
    }

    pub fn update(&mut self, arm: &MacroArm, reward: f64) -> Result<()> {
        let &idx = self
            .index
            .get(arm)
            .ok_or(CmabError::NotInitialized)?;
        self.view.update(idx, reward)
    }

    pub fn iterate<P: CmabProblem + ?Sized, R: Rng>(
        &mut self,
        problem: &P,
        rng: &mut R,
    ) -> Result<(MacroArm, f64)> {
        let arm = self.select(rng)?;
        let reward = problem.sample(&arm, rng);
        self.update(&arm, reward)?;
        Ok((arm, reward))
    }

    /// Most-sampled arm, ties by mean then uniform.
    pub fn best<R: Rng>(&self, rng: &mut R) -> Result<MacroArm> {
        if self.view.total_pulls == 0 {
            return Err(CmabError::NotInitialized);
        }
        let idx = most_sampled(&self.view, rng).expect("non-empty view");
        Ok(self.arms[idx].clone())
    }
}

/// Runs a flat policy for `budget` pulls and records the recommendation
/// after every iteration.
pub fn flat_adapter<P: CmabProblem + ?Sized, R: Rng>(
    problem: &P,
    policy: FlatPolicy,
    budget: u64,
    cap: u64,
    rng: &mut R,
) -> Result<Vec<MacroArm>> {
    let mut sampler = FlatSampler::new(problem, policy, cap)?;
    let mut trace = Vec::with_capacity(budget as usize);
    for _ in 0..budget {
        sampler.iterate(problem, rng)?;
        trace.push(sampler.best(rng)?);
    }
    Ok(trace)
}
