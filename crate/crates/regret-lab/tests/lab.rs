//! Integration tests: trace identities, runner behavior, reproducibility.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use cmab::{CmabError, MacroArm, StrategySpec};
use regret_lab::{
    all_checkpoints, brute_force_optimum, generate_suite, measure_regret, run_driver_trace,
    write_regret_csv, Legality, MeasureConfig, Noise, StrategyDriver, SyntheticCmab, Tier,
};

fn small_problem() -> SyntheticCmab {
    SyntheticCmab {
        id: "fixture".into(),
        means: vec![vec![0.0, 0.25, 0.1], vec![0.2, 0.0, 0.05]],
        interactions: Vec::new(),
        noise: Noise::UniformBounded(0.1),
        legality: Legality::AllLegal,
    }
}

/// Recommends the known optimum at every step.
struct AlwaysOptimal(MacroArm);

impl StrategyDriver for AlwaysOptimal {
    fn step(
        &mut self,
        problem: &SyntheticCmab,
        rng: &mut ChaCha8Rng,
    ) -> Result<(MacroArm, f64), CmabError> {
        let reward = cmab::CmabProblem::sample(problem, &self.0, rng);
        Ok((self.0.clone(), reward))
    }

    fn recommend(
        &self,
        _problem: &SyntheticCmab,
        _rng: &mut ChaCha8Rng,
    ) -> Result<MacroArm, CmabError> {
        Ok(self.0.clone())
    }
}

#[test]
fn regret_identities_hold_exactly() {
    // With every iteration logged, R_T equals the sum of instantaneous
    // regrets and the simple regret never exceeds the largest instantaneous
    // regret, both to 1e-12.
    let problem = small_problem();
    let (_, mu_star) = brute_force_optimum(&problem).unwrap();
    let spec: StrategySpec = "ns(e0=0.8,el=0.4,eg=0.0)".parse().unwrap();
    let budget = 400u64;
    let mut strategy = spec
        .build_iterative(&problem, budget, regret_lab::ENUMERATION_CAP)
        .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let trace = run_driver_trace(
        &problem,
        &mut strategy,
        budget,
        &all_checkpoints(budget),
        &mut rng,
        Some(mu_star),
    )
    .unwrap();
    assert_eq!(trace.records.len(), budget as usize);
    let mut running = 0.0;
    let mut max_instant = f64::NEG_INFINITY;
    for record in &trace.records {
        running += trace.instantaneous(record);
        max_instant = max_instant.max(trace.instantaneous(record));
        assert!(
            (running - record.cumulative_regret).abs() < 1e-12,
            "cumulative regret drifted at t={}",
            record.t
        );
    }
    let simple = trace.final_simple_regret().unwrap();
    assert!(simple <= max_instant + 1e-12);
}

#[test]
fn always_optimal_driver_has_zero_simple_regret() {
    let problem = small_problem();
    let (optimum, mu_star) = brute_force_optimum(&problem).unwrap();
    let mut driver = AlwaysOptimal(optimum);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let trace = run_driver_trace(
        &problem,
        &mut driver,
        500,
        &[100, 500],
        &mut rng,
        Some(mu_star),
    )
    .unwrap();
    for record in &trace.records {
        assert!(trace.simple(record).abs() < 1e-12);
    }
}

#[test]
fn uniform_random_converges_to_the_arm_average() {
    let problem = small_problem();
    let arms = cmab::enumerate_legal(&problem, 100).unwrap();
    let grand_mean =
        arms.iter().map(|a| problem.true_mean(a)).sum::<f64>() / arms.len() as f64;
    let spec: StrategySpec = "random".parse().unwrap();
    let config = MeasureConfig::new(200, 400, 77);
    let measured = measure_regret(&problem, &spec, &config).unwrap();
    let last = measured.aggregated.last().unwrap();
    // The recommendation of the random strategy is a uniform legal arm.
    let tol = 4.0 * 0.3 / (400f64).sqrt();
    assert!(
        (last.mean_value - grand_mean).abs() < tol,
        "random recommender mean {} vs arm average {grand_mean}",
        last.mean_value
    );
}

#[test]
fn naive_sampling_recovers_tiny_tier_optima() {
    // The recommendation agrees with the brute-force optimum in at least
    // 95% of seeded runs at a 10^4 budget.
    let problems = generate_suite(Tier::Tiny, 10, 2024);
    let spec: StrategySpec = "ns(e0=0.8,el=0.4,eg=0.0)".parse().unwrap();
    let mut agree = 0usize;
    let mut total = 0usize;
    for (i, problem) in problems.iter().enumerate() {
        let (optimum, mu_star) = brute_force_optimum(problem).unwrap();
        let config = MeasureConfig {
            budget: 10_000,
            repetitions: 10,
            eval_samples: 200,
            checkpoints: vec![10_000],
            base_seed: 3000 + i as u64,
        };
        let measured = measure_regret(problem, &spec, &config).unwrap();
        for trace in &measured.traces {
            total += 1;
            let record = trace.records.last().unwrap();
            if record.best == optimum || (record.best_value - mu_star).abs() < 1e-9 {
                agree += 1;
            }
        }
    }
    assert!(
        agree as f64 / total as f64 >= 0.95,
        "only {agree}/{total} runs recovered the optimum"
    );
}

#[test]
fn simple_regret_decays_with_budget() {
    // Qualitative exponential decay: average simple regret at t = 4000 is
    // strictly below the average at t = 500 over 200 runs.
    let problem = SyntheticCmab {
        id: "decay".into(),
        means: vec![vec![0.0, 0.12, 0.06, 0.09], vec![0.1, 0.0, 0.07, 0.04]],
        interactions: Vec::new(),
        noise: Noise::Bernoulli,
        legality: Legality::AllLegal,
    };
    let spec: StrategySpec = "ns(e0=0.8,el=0.4,eg=0.0)".parse().unwrap();
    let config = MeasureConfig {
        budget: 4000,
        repetitions: 200,
        eval_samples: 200,
        checkpoints: vec![500, 4000],
        base_seed: 11,
    };
    let measured = measure_regret(&problem, &spec, &config).unwrap();
    let early = measured.aggregated[0].mean_simple_regret;
    let late = measured.aggregated[1].mean_simple_regret;
    assert!(
        late < early,
        "simple regret did not decay: {early} -> {late}"
    );
}

#[test]
fn runs_are_bit_reproducible() {
    let problem = &generate_suite(Tier::Tiny, 2, 5)[1];
    let spec: StrategySpec = "nsucb(e0=0.8,el=0.4,c=0.005)".parse().unwrap();
    let config = MeasureConfig::new(1000, 8, 99);
    let a = measure_regret(problem, &spec, &config).unwrap();
    let b = measure_regret(problem, &spec, &config).unwrap();
    assert_eq!(a.traces, b.traces);
    let mut csv_a = Vec::new();
    let mut csv_b = Vec::new();
    write_regret_csv(&mut csv_a, std::slice::from_ref(&a)).unwrap();
    write_regret_csv(&mut csv_b, std::slice::from_ref(&b)).unwrap();
    assert_eq!(csv_a, csv_b);
}

#[test]
fn lsi_reruns_per_checkpoint() {
    let problem = small_problem();
    let spec: StrategySpec = "lsi(rg=0.25,mode=ve)".parse().unwrap();
    let config = MeasureConfig {
        budget: 1000,
        repetitions: 4,
        eval_samples: 200,
        checkpoints: vec![200, 1000],
        base_seed: 1,
    };
    let measured = measure_regret(&problem, &spec, &config).unwrap();
    assert_eq!(measured.aggregated.len(), 2);
    for trace in &measured.traces {
        for record in &trace.records {
            assert!(cmab::CmabProblem::is_legal(&problem, &record.best));
        }
    }
}

#[test]
fn unenumerable_problems_report_lower_bound_regret() {
    let problem = &generate_suite(Tier::Cmab3Scale, 1, 9)[0];
    let spec: StrategySpec = "random".parse().unwrap();
    let config = MeasureConfig {
        budget: 50,
        repetitions: 3,
        eval_samples: 200,
        checkpoints: vec![50],
        base_seed: 4,
    };
    let measured = measure_regret(problem, &spec, &config).unwrap();
    assert!(!measured.mu_star.is_exact());
    // The lower bound is attained by some run, so min simple regret is 0.
    let min_simple = measured
        .traces
        .iter()
        .map(|t| t.final_simple_regret().unwrap())
        .fold(f64::INFINITY, f64::min);
    assert!(min_simple.abs() < 1e-12);
}
