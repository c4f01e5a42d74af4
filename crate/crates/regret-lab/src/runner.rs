//! The budget-sweep experiment runner.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::cell::Cell;

use cmab::{lsi_run, CmabError, CmabProblem, MacroArm, Strategy, StrategySpec};

use crate::oracle::{brute_force_optimum, ENUMERATION_CAP};
use crate::synthetic::{splitmix, SyntheticCmab};
use crate::trace::{aggregate, AggregatedPoint, CheckpointRecord, MuStar, RegretTrace};
use crate::LabError;

/// Anything that can drive one select-sample-update iteration. Implemented by
/// every library strategy and by test stubs.
pub trait StrategyDriver {
    fn step(
        &mut self,
        problem: &SyntheticCmab,
        rng: &mut ChaCha8Rng,
    ) -> Result<(MacroArm, f64), CmabError>;

    fn recommend(
        &self,
        problem: &SyntheticCmab,
        rng: &mut ChaCha8Rng,
    ) -> Result<MacroArm, CmabError>;
}

impl StrategyDriver for Strategy {
    fn step(
        &mut self,
        problem: &SyntheticCmab,
        rng: &mut ChaCha8Rng,
    ) -> Result<(MacroArm, f64), CmabError> {
        self.iterate(problem, rng)
    }

    fn recommend(
        &self,
        problem: &SyntheticCmab,
        rng: &mut ChaCha8Rng,
    ) -> Result<MacroArm, CmabError> {
        Strategy::recommend(self, problem, rng)
    }
}

#[derive(Debug, Clone)]
pub struct MeasureConfig {
    pub budget: u64,
    pub repetitions: u32,
    /// Oracle draws used to estimate a recommendation's value when no closed
    /// form exists (unused for synthetic problems, which are exact).
    pub eval_samples: u32,
    pub checkpoints: Vec<u64>,
    pub base_seed: u64,
}

impl MeasureConfig {
    pub fn new(budget: u64, repetitions: u32, base_seed: u64) -> Self {
        Self {
            budget,
            repetitions,
            eval_samples: 200,
            checkpoints: crate::trace::default_checkpoints(budget),
            base_seed,
        }
    }
}

/// Aggregated outcome of repeated runs of one strategy on one problem.
#[derive(Debug, Clone)]
pub struct MeasuredRegret {
    pub problem_id: String,
    pub strategy: String,
    pub base_seed: u64,
    pub mu_star: MuStar,
    pub optimum: Option<MacroArm>,
    pub traces: Vec<RegretTrace>,
    pub aggregated: Vec<AggregatedPoint>,
    /// LSI probes that fell back from no-op fill to random fill.
    pub lsi_fallbacks: u64,
}

/// Forwards samples while tallying the running reward sum, so budget-ahead
/// strategies still yield an exact cumulative regret.
struct Tally<'a> {
    inner: &'a SyntheticCmab,
    sum: Cell<f64>,
    calls: Cell<u64>,
}

impl CmabProblem for Tally<'_> {
    fn num_variables(&self) -> usize {
        self.inner.num_variables()
    }
    fn num_values(&self, var: usize) -> usize {
        self.inner.num_values(var)
    }
    fn special_value(&self, var: usize) -> u16 {
        self.inner.special_value(var)
    }
    fn partial_legal(&self, partial: &[Option<u16>]) -> bool {
        self.inner.partial_legal(partial)
    }
    fn sample(&self, arm: &MacroArm, rng: &mut dyn RngCore) -> f64 {
        let reward = self.inner.sample(arm, rng);
        self.sum.set(self.sum.get() + reward);
        self.calls.set(self.calls.get() + 1);
        reward
    }
}

/// Runs `repetitions` independent seeded runs of the strategy for `budget`
/// iterations, logging the recommendation at every checkpoint, and aggregates
/// the expected best-arm value with 95% confidence intervals.
pub fn measure_regret(
    problem: &SyntheticCmab,
    spec: &StrategySpec,
    config: &MeasureConfig,
) -> Result<MeasuredRegret, LabError> {
    let (optimum, mu_star) = match brute_force_optimum(problem) {
        Ok((arm, value)) => (Some(arm), Some(value)),
        Err(LabError::EnumerationCap { .. }) => (None, None),
        Err(e) => return Err(e),
    };

    let results: Vec<Result<(RegretTrace, u64), LabError>> = (0..config.repetitions)
        .into_par_iter()
        .map(|rep| {
            let seed = splitmix(config.base_seed, rep as u64);
            if let Some(lsi) = spec.lsi_config() {
                run_lsi_trace(problem, &lsi, config, seed, mu_star)
            } else {
                run_iterative_trace(problem, spec, config, seed, mu_star)
            }
        })
        .collect();

    let mut traces = Vec::with_capacity(results.len());
    let mut fallbacks = 0u64;
    for result in results {
        let (trace, fb) = result?;
        traces.push(trace);
        fallbacks += fb;
    }

    // Without an exact optimum, regret is relative to the best expected
    // value any run ever recommended, flagged as a lower bound.
    let mu = match mu_star {
        Some(v) => MuStar::Exact(v),
        None => {
            let best = traces
                .iter()
                .flat_map(|t| t.records.iter().map(|r| r.best_value))
                .fold(f64::NEG_INFINITY, f64::max);
            MuStar::ObservedLowerBound(best)
        }
    };
    for trace in &mut traces {
        trace.mu_star = mu;
        if !mu.is_exact() {
            // Runs accumulated `0 - reward` while the optimum was unknown;
            // shift by t * bound now that the reference value exists.
            for record in &mut trace.records {
                record.cumulative_regret += record.t as f64 * mu.value();
            }
        }
    }

    let aggregated = aggregate(&traces);
    Ok(MeasuredRegret {
        problem_id: problem.id.clone(),
        strategy: spec.to_string(),
        base_seed: config.base_seed,
        mu_star: mu,
        optimum,
        traces,
        aggregated,
        lsi_fallbacks: fallbacks,
    })
}

/// One seeded run of an iterative strategy with checkpoint logging.
pub fn run_driver_trace<D: StrategyDriver>(
    problem: &SyntheticCmab,
    driver: &mut D,
    budget: u64,
    checkpoints: &[u64],
    rng: &mut ChaCha8Rng,
    mu_star: Option<f64>,
) -> Result<RegretTrace, LabError> {
    let mu = mu_star.unwrap_or(0.0);
    let mut records = Vec::with_capacity(checkpoints.len());
    let mut next_checkpoint = 0usize;
    let mut cumulative = 0.0;
    for t in 1..=budget {
        let (chosen, reward) = driver.step(problem, rng)?;
        cumulative += mu - reward;
        if next_checkpoint < checkpoints.len() && checkpoints[next_checkpoint] == t {
            next_checkpoint += 1;
            let best = driver.recommend(problem, rng)?;
            let best_value = problem.true_mean(&best);
            records.push(CheckpointRecord {
                t,
                chosen,
                reward,
                best,
                best_value,
                cumulative_regret: cumulative,
            });
        }
    }
    Ok(RegretTrace {
        mu_star: MuStar::Exact(mu),
        records,
    })
}

fn run_iterative_trace(
    problem: &SyntheticCmab,
    spec: &StrategySpec,
    config: &MeasureConfig,
    seed: u64,
    mu_star: Option<f64>,
) -> Result<(RegretTrace, u64), LabError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut strategy = spec.build_iterative(problem, config.budget, ENUMERATION_CAP)?;
    let trace = run_driver_trace(
        problem,
        &mut strategy,
        config.budget,
        &config.checkpoints,
        &mut rng,
        mu_star,
    )?;
    Ok((trace, 0))
}

/// Budget-ahead strategies re-run from scratch for every checkpoint budget.
fn run_lsi_trace(
    problem: &SyntheticCmab,
    lsi: &cmab::LsiConfig,
    config: &MeasureConfig,
    seed: u64,
    mu_star: Option<f64>,
) -> Result<(RegretTrace, u64), LabError> {
    let mu = mu_star.unwrap_or(0.0);
    let mut records = Vec::with_capacity(config.checkpoints.len());
    let mut fallbacks = 0u64;
    for (i, &t) in config.checkpoints.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(splitmix(seed, i as u64));
        let tally = Tally {
            inner: problem,
            sum: Cell::new(0.0),
            calls: Cell::new(0),
        };
        let outcome = lsi_run(&tally, t, lsi, &mut rng)?;
        fallbacks += outcome.noop_fill_fallbacks;
        let best_value = problem.true_mean(&outcome.winner);
        let calls = tally.calls.get();
        records.push(CheckpointRecord {
            t,
            chosen: outcome.winner.clone(),
            reward: if calls > 0 { tally.sum.get() / calls as f64 } else { 0.0 },
            best: outcome.winner,
            best_value,
            cumulative_regret: calls as f64 * mu - tally.sum.get(),
        });
    }
    Ok((
        RegretTrace {
            mu_star: MuStar::Exact(mu),
            records,
        },
        fallbacks,
    ))
}
