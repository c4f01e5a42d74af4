//! Naive sampling for combinatorial bandits.
//!
//! The joint reward is assumed to decompose (loosely) over the variables, so
//! exploration picks each variable's value independently from a per-variable
//! local bandit, while exploitation runs a flat policy over the global bandit
//! of macro-arms sampled so far.

use indexmap::IndexMap;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{CmabError, Result};
use crate::problem::{legal_values, CmabProblem, MacroArm};
use crate::select::{epsilon_greedy_among, epsilon_greedy_select, most_sampled, ucb1_select};
use crate::stats::BanditView;

/// Policy for the global bandit during exploitation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GlobalPolicy {
    /// ε-greedy over the sampled macro-arms.
    EpsilonGreedy(f64),
    /// UCB1 with exploration constant `c` over the sampled macro-arms.
    Ucb1(f64),
}

/// Parameters of one sampling phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NsPhase {
    /// Probability of exploring (building an arm from the local bandits).
    pub explore: f64,
    /// ε of the per-variable local policy.
    pub local_epsilon: f64,
    pub global: GlobalPolicy,
}

impl NsPhase {
    pub fn greedy(explore: f64, local_epsilon: f64, global_epsilon: f64) -> Self {
        Self {
            explore,
            local_epsilon,
            global: GlobalPolicy::EpsilonGreedy(global_epsilon),
        }
    }
}

/// One- or two-phase schedule; the second phase starts after iteration `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NsSchedule {
    pub first: NsPhase,
    pub switch: Option<(u64, NsPhase)>,
}

impl NsSchedule {
    pub fn single(phase: NsPhase) -> Self {
        Self {
            first: phase,
            switch: None,
        }
    }

    pub fn two_phase(k: u64, first: NsPhase, second: NsPhase) -> Self {
        Self {
            first,
            switch: Some((k, second)),
        }
    }

    fn at(&self, iteration: u64) -> &NsPhase {
        match &self.switch {
            Some((k, second)) if iteration > *k => second,
            _ => &self.first,
        }
    }
}

/// Local per-variable bandits plus the global bandit over sampled macro-arms.
#[derive(Debug, Clone)]
pub struct NaiveSampler {
    locals: Vec<BanditView>,
    global: BanditView,
    arms: Vec<MacroArm>,
    arm_index: IndexMap<MacroArm, usize>,
    t: u64,
    schedule: NsSchedule,
}

impl NaiveSampler {
    pub fn new(value_counts: &[usize], schedule: NsSchedule) -> Self {
        Self {
            locals: value_counts.iter().map(|&k| BanditView::new(k)).collect(),
            global: BanditView::default(),
            arms: Vec::new(),
            arm_index: IndexMap::new(),
            t: 0,
            schedule,
        }
    }

    pub fn for_problem<P: CmabProblem + ?Sized>(problem: &P, schedule: NsSchedule) -> Self {
        let counts: Vec<usize> = (0..problem.num_variables())
            .map(|i| problem.num_values(i))
            .collect();
        Self::new(&counts, schedule)
    }

    pub fn iterations(&self) -> u64 {
        self.t
    }

    /// Number of distinct macro-arms in the global bandit.
    pub fn explored_arms(&self) -> usize {
        self.arms.len()
    }

    pub fn local(&self, var: usize) -> &BanditView {
        &self.locals[var]
    }

    pub fn global_stats(&self) -> impl Iterator<Item = (&MacroArm, u64, f64)> {
        self.arms
            .iter()
            .zip(self.global.arms.iter())
            .map(|(arm, s)| (arm, s.count, s.mean))
    }

    /// Builds a legal macro-arm from the local bandits: variables visited in
    /// a fresh uniform-random order, each value ε-greedy among the choices
    /// consistent with the partial assignment.
    fn explore<P: CmabProblem + ?Sized, R: Rng>(
        &self,
        problem: &P,
        epsilon: f64,
        rng: &mut R,
    ) -> Result<MacroArm> {
        let n = problem.num_variables();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        let mut partial: Vec<Option<u16>> = vec![None; n];
        for &var in &order {
            let choices = legal_values(problem, &mut partial, var);
            if choices.is_empty() {
                return Err(CmabError::NoLegalCompletion { variable: var });
            }
            let idxs: Vec<usize> = choices.iter().map(|&v| v as usize).collect();
            let picked = epsilon_greedy_among(&self.locals[var], &idxs, epsilon, rng)?;
            partial[var] = Some(picked as u16);
        }
        Ok(MacroArm(partial.into_iter().map(|v| v.unwrap()).collect()))
    }

    /// One selection without a reward; phase chosen by the upcoming iteration.
    pub fn select<P: CmabProblem + ?Sized, R: Rng>(
        &self,
        problem: &P,
        rng: &mut R,
    ) -> Result<MacroArm> {
        let phase = *self.schedule.at(self.t + 1);
        let explore = phase.explore >= 1.0
            || (phase.explore > 0.0 && rng.gen::<f64>() < phase.explore);
        if explore || self.arms.is_empty() {
            return self.explore(problem, phase.local_epsilon, rng);
        }
        let idx = match phase.global {
            GlobalPolicy::EpsilonGreedy(eg) => epsilon_greedy_select(&self.global, eg, rng)?,
            GlobalPolicy::Ucb1(c) => ucb1_select(&self.global, c, None, rng)?,
        };
        Ok(self.arms[idx].clone())
    }

    /// Records a reward for `arm`: marginal update of every local bandit plus
    /// the arm's global entry, then advances the iteration counter.
    pub fn update(&mut self, arm: &MacroArm, reward: f64) -> Result<()> {
        for (var, &value) in arm.0.iter().enumerate() {
            self.locals[var].update(value as usize, reward)?;
        }
        let idx = match self.arm_index.get(arm) {
            Some(&idx) => idx,
            None => {
                let idx = self.arms.len();
                self.arms.push(arm.clone());
                self.arm_index.insert(arm.clone(), idx);
                self.global.arms.push(Default::default());
                idx
            }
        };
        self.global.arms[idx].update(reward)?;
        self.global.total_pulls += 1;
        self.t += 1;
        Ok(())
    }

    /// One full iteration: select, draw a reward from the oracle, update.
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

    /// The most-sampled macro-arm; count ties broken by higher mean, then
    /// uniformly at random.
    pub fn best<R: Rng>(&self, rng: &mut R) -> Result<MacroArm> {
        match most_sampled(&self.global, rng) {
            Some(idx) => Ok(self.arms[idx].clone()),
            None => Err(CmabError::NotInitialized),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::test_problems::TableProblem;
    use crate::problem::{enumerate_legal, noop_arm};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ns(e0: f64, el: f64, eg: f64) -> NsSchedule {
        NsSchedule::single(NsPhase::greedy(e0, el, eg))
    }

    #[test]
    fn degenerate_single_arm_problem() {
        let p = TableProblem::all_legal(vec![vec![0.4]]);
        let mut sampler = NaiveSampler::for_problem(&p, ns(0.8, 0.4, 0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..50 {
            let (arm, _) = sampler.iterate(&p, &mut rng).unwrap();
            assert_eq!(arm, MacroArm(vec![0]));
        }
        assert_eq!(sampler.explored_arms(), 1);
        let (_, count, mean) = sampler.global_stats().next().unwrap();
        assert_eq!(count, 50);
        assert!((mean - 0.4).abs() < 1e-12);
    }

    #[test]
    fn pure_exploration_is_uniform_over_arms() {
        let p = TableProblem::all_legal(vec![vec![0.0, 0.1], vec![0.0, 0.2]]);
        let mut sampler = NaiveSampler::for_problem(&p, ns(1.0, 1.0, 0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let mut freq = [0usize; 4];
        let draws = 100_000;
        for _ in 0..draws {
            let (arm, _) = sampler.iterate(&p, &mut rng).unwrap();
            freq[(arm.0[0] * 2 + arm.0[1]) as usize] += 1;
        }
        for f in freq {
            let share = f as f64 / draws as f64;
            assert!((share - 0.25).abs() < 0.01, "share {share}");
        }
    }

    #[test]
    fn long_run_optimum_frequency_matches_mixture_formula() {
        // 2 vars x 2 vals, all legal, unique optimum at (1, 1).
        // p* = (1-e0)[(1-eg) + eg/N] + e0 * prod[(1-el) + el/Ki] = 0.712
        let p = TableProblem::all_legal(vec![vec![0.1, 0.4], vec![0.1, 0.3]]);
        let mut sampler = NaiveSampler::for_problem(&p, ns(0.8, 0.4, 0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let optimum = MacroArm(vec![1, 1]);
        let mut hits = 0usize;
        for t in 1..=10_000u64 {
            let (arm, _) = sampler.iterate(&p, &mut rng).unwrap();
            if t > 5_000 && arm == optimum {
                hits += 1;
            }
        }
        let freq = hits as f64 / 5_000.0;
        assert!((freq - 0.712).abs() <= 0.02, "frequency {freq} vs p* 0.712");
    }

    #[test]
    fn bookkeeping_counts_stay_consistent() {
        let p = TableProblem {
            means: vec![vec![0.0, 0.2, 0.1], vec![0.1, 0.0], vec![0.0, 0.3]],
            forbidden: vec![((0, 1), (1, 1)), ((0, 2), (2, 1))],
        };
        let mut sampler = NaiveSampler::for_problem(&p, ns(0.6, 0.5, 0.2));
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for t in 1..=2_000u64 {
            let (arm, _) = sampler.iterate(&p, &mut rng).unwrap();
            assert!(p.is_legal(&arm));
            if t % 500 == 0 {
                let global_total: u64 = sampler.global_stats().map(|(_, c, _)| c).sum();
                assert_eq!(global_total, t);
                for var in 0..3 {
                    let local_total: u64 =
                        sampler.local(var).arms.iter().map(|s| s.count).sum();
                    assert_eq!(local_total, t);
                }
            }
        }
        for (arm, count, _) in sampler.global_stats() {
            assert!(count >= 1);
            assert!(p.is_legal(arm));
        }
    }

    #[test]
    fn empty_global_falls_back_to_exploration() {
        // explore = 0 would always exploit, but the first iteration has an
        // empty global bandit and must still produce a legal arm.
        let p = TableProblem::all_legal(vec![vec![0.0, 0.1]]);
        let mut sampler = NaiveSampler::for_problem(&p, ns(0.0, 1.0, 0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        sampler.iterate(&p, &mut rng).unwrap();
        assert_eq!(sampler.explored_arms(), 1);
    }

    #[test]
    fn best_prefers_count_then_mean() {
        let p = TableProblem::all_legal(vec![vec![0.0, 0.1], vec![0.0, 0.1]]);
        let mut sampler = NaiveSampler::for_problem(&p, ns(1.0, 1.0, 0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let a = MacroArm(vec![0, 0]);
        let b = MacroArm(vec![1, 1]);
        for _ in 0..5 {
            sampler.update(&a, 0.1).unwrap();
        }
        for _ in 0..3 {
            sampler.update(&b, 0.9).unwrap();
        }
        assert_eq!(sampler.best(&mut rng).unwrap(), a);
        // Tie on count: higher mean wins.
        for _ in 0..2 {
            sampler.update(&b, 0.9).unwrap();
        }
        assert_eq!(sampler.best(&mut rng).unwrap(), b);
        assert_eq!(sampler.iterations(), 10);
    }

    #[test]
    fn best_on_empty_global_is_an_error() {
        let p = TableProblem::all_legal(vec![vec![0.0, 0.1]]);
        let sampler = NaiveSampler::for_problem(&p, ns(0.8, 0.4, 0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(sampler.best(&mut rng), Err(CmabError::NotInitialized));
    }

    #[test]
    fn single_entry_is_best() {
        let p = TableProblem::all_legal(vec![vec![0.0, 0.1]]);
        let mut sampler = NaiveSampler::for_problem(&p, ns(0.8, 0.4, 0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        sampler.update(&MacroArm(vec![1]), 0.1).unwrap();
        assert_eq!(sampler.best(&mut rng).unwrap(), MacroArm(vec![1]));
    }

    #[test]
    fn two_phase_switches_parameters_after_k() {
        // Phase 1 explores uniformly; phase 2 exploits only, so after the
        // switch every selection is the global-best arm.
        let p = TableProblem::all_legal(vec![vec![0.0, 0.4], vec![0.0, 0.4]]);
        let schedule = NsSchedule::two_phase(
            100,
            NsPhase::greedy(1.0, 1.0, 0.0),
            NsPhase::greedy(0.0, 0.0, 0.0),
        );
        let mut sampler = NaiveSampler::for_problem(&p, schedule);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut distinct_after_switch = std::collections::HashSet::new();
        for t in 1..=300u64 {
            let (arm, _) = sampler.iterate(&p, &mut rng).unwrap();
            if t > 100 {
                distinct_after_switch.insert(arm);
            }
        }
        // Pure exploitation with eg = 0 locks onto the single best entry.
        assert_eq!(distinct_after_switch.len(), 1);
        assert!(distinct_after_switch.contains(&MacroArm(vec![1, 1])));
    }

    #[test]
    fn exploration_miss_rate_obeys_exponential_bound() {
        // Pure exploration, n = 2, K_i = 2: P(optimum unseen after t) is at
        // most (1 - p)^t with p = prod(el / K_i) = 1/4.
        let p = TableProblem::all_legal(vec![vec![0.0, 0.1], vec![0.0, 0.2]]);
        let optimum = MacroArm(vec![1, 1]);
        let runs = 10_000;
        for t in [2u64, 4, 8] {
            let bound = (1.0f64 - 0.25).powf(t as f64);
            let mut misses = 0usize;
            for run in 0..runs {
                let mut rng = ChaCha8Rng::seed_from_u64(1_000_000 + run as u64 * 7 + t);
                let mut sampler = NaiveSampler::for_problem(&p, ns(1.0, 1.0, 0.0));
                let mut seen = false;
                for _ in 0..t {
                    let (arm, _) = sampler.iterate(&p, &mut rng).unwrap();
                    if arm == optimum {
                        seen = true;
                    }
                }
                if !seen {
                    misses += 1;
                }
            }
            let rate = misses as f64 / runs as f64;
            let sigma = (bound * (1.0 - bound) / runs as f64).sqrt();
            assert!(
                rate <= bound + 3.0 * sigma,
                "t={t}: miss rate {rate} above bound {bound} + 3s"
            );
        }
    }

    #[test]
    fn reduces_to_flat_epsilon_greedy_when_local_is_uniform() {
        // NS(e0, 1.0, 0.0) with frozen statistics selects with the same
        // distribution as flat ε-greedy(e0) when every combination is legal.
        // Exact cell probabilities: best arm (1-e0) + e0/4, others e0/4.
        let p = TableProblem::all_legal(vec![vec![0.0, 0.1], vec![0.0, 0.2]]);
        let arms = enumerate_legal(&p, 16).unwrap();
        let e0 = 0.3;
        let mut sampler = NaiveSampler::for_problem(&p, ns(e0, 1.0, 0.0));
        let mut flat = BanditView::new(4);
        for (i, arm) in arms.iter().enumerate() {
            let mean = p.true_mean(arm);
            sampler.update(arm, mean).unwrap();
            flat.update(i, mean).unwrap();
        }
        let best = arms
            .iter()
            .enumerate()
            .max_by(|a, b| p.true_mean(a.1).partial_cmp(&p.true_mean(b.1)).unwrap())
            .unwrap()
            .0;

        let draws = 100_000usize;
        let mut rng = ChaCha8Rng::seed_from_u64(321);
        let mut ns_freq = vec![0f64; 4];
        for _ in 0..draws {
            let arm = sampler.select(&p, &mut rng).unwrap();
            let idx = arms.iter().position(|a| *a == arm).unwrap();
            ns_freq[idx] += 1.0;
        }
        let mut flat_freq = vec![0f64; 4];
        for _ in 0..draws {
            let idx = crate::select::epsilon_greedy_select(&flat, e0, &mut rng).unwrap();
            flat_freq[idx] += 1.0;
        }
        let expected: Vec<f64> = (0..4)
            .map(|i| {
                let p_cell = if i == best { (1.0 - e0) + e0 / 4.0 } else { e0 / 4.0 };
                p_cell * draws as f64
            })
            .collect();
        // Chi-square goodness of fit, df = 3, alpha = 0.001 -> 16.27.
        for freq in [&ns_freq, &flat_freq] {
            let chi2: f64 = freq
                .iter()
                .zip(expected.iter())
                .map(|(o, e)| (o - e) * (o - e) / e)
                .sum();
            assert!(chi2 < 16.27, "chi-square {chi2} rejects the reduction");
        }
    }

    #[test]
    fn noop_arm_is_always_available() {
        let p = TableProblem {
            means: vec![vec![0.0, 0.5], vec![0.0, 0.5]],
            forbidden: vec![((0, 1), (1, 1))],
        };
        assert!(p.is_legal(&noop_arm(&p)));
        let mut sampler = NaiveSampler::for_problem(&p, ns(0.8, 0.4, 0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let (arm, _) = sampler.iterate(&p, &mut rng).unwrap();
            assert!(p.is_legal(&arm), "illegal arm {arm} selected");
        }
    }
}
