//! Regret bookkeeping: per-run traces at logged checkpoints and their
//! aggregation into means with 95% confidence intervals.

use cmab::MacroArm;

/// Reference value regrets are measured against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MuStar {
    /// Exact optimum from the brute-force oracle.
    Exact(f64),
    /// Best expected value ever observed; a lower bound used when the
    /// problem cannot be enumerated. Regrets against it are lower bounds.
    ObservedLowerBound(f64),
}

impl MuStar {
    pub fn value(&self) -> f64 {
        match *self {
            MuStar::Exact(v) | MuStar::ObservedLowerBound(v) => v,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, MuStar::Exact(_))
    }
}

/// State of one run at a logged checkpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckpointRecord {
    pub t: u64,
    /// Macro-arm chosen at iteration `t`.
    pub chosen: MacroArm,
    /// Reward drawn at iteration `t`.
    pub reward: f64,
    /// Recommendation after iteration `t`.
    pub best: MacroArm,
    /// Exact (or estimated) expected reward of the recommendation.
    pub best_value: f64,
    /// Sum over iterations so far of mu* minus the realized reward.
    pub cumulative_regret: f64,
}

/// One run's records, ordered by `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretTrace {
    pub mu_star: MuStar,
    pub records: Vec<CheckpointRecord>,
}

impl RegretTrace {
    /// Instantaneous regret at a record: mu* minus the realized reward.
    pub fn instantaneous(&self, record: &CheckpointRecord) -> f64 {
        self.mu_star.value() - record.reward
    }

    /// Simple regret at a record: mu* minus the recommendation's value.
    pub fn simple(&self, record: &CheckpointRecord) -> f64 {
        self.mu_star.value() - record.best_value
    }

    pub fn final_simple_regret(&self) -> Option<f64> {
        self.records.last().map(|r| self.simple(r))
    }
}

/// Cross-repetition aggregate of one checkpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregatedPoint {
    pub t: u64,
    pub mean_value: f64,
    /// 95% interval of `mean_value`: mean ± 1.96 sd / sqrt(R).
    pub ci_low: f64,
    pub ci_high: f64,
    pub mean_simple_regret: f64,
    pub mean_cumulative_regret: f64,
    pub repetitions: usize,
}

/// Aggregates runs checkpoint-by-checkpoint. Panics if the runs logged
/// different checkpoint grids.
pub fn aggregate(traces: &[RegretTrace]) -> Vec<AggregatedPoint> {
    let Some(first) = traces.first() else {
        return Vec::new();
    };
    let reps = traces.len();
    (0..first.records.len())
        .map(|i| {
            let t = first.records[i].t;
            let values: Vec<f64> = traces
                .iter()
                .map(|trace| {
                    assert_eq!(trace.records[i].t, t, "checkpoint grids differ");
                    trace.records[i].best_value
                })
                .collect();
            let mean = values.iter().sum::<f64>() / reps as f64;
            let var = if reps > 1 {
                values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (reps - 1) as f64
            } else {
                0.0
            };
            let half = 1.96 * (var / reps as f64).sqrt();
            let mean_simple = traces
                .iter()
                .map(|trace| trace.simple(&trace.records[i]))
                .sum::<f64>()
                / reps as f64;
            let mean_cumulative = traces
                .iter()
                .map(|trace| trace.records[i].cumulative_regret)
                .sum::<f64>()
                / reps as f64;
            AggregatedPoint {
                t,
                mean_value: mean,
                ci_low: mean - half,
                ci_high: mean + half,
                mean_simple_regret: mean_simple,
                mean_cumulative_regret: mean_cumulative,
                repetitions: reps,
            }
        })
        .collect()
}

/// The logarithmically spaced default checkpoint grid up to `budget`
/// ({100, 200, 300, 500} scaled by powers of ten), always ending at `budget`.
pub fn default_checkpoints(budget: u64) -> Vec<u64> {
    let mut points = Vec::new();
    let mut decade = 100u64;
    'outer: loop {
        for mult in [1, 2, 3, 5] {
            let t = decade * mult;
            if t >= budget {
                break 'outer;
            }
            points.push(t);
        }
        match decade.checked_mul(10) {
            Some(next) => decade = next,
            None => break,
        }
    }
    if budget > 0 && points.last() != Some(&budget) {
        points.push(budget);
    }
    points
}

/// Every iteration as a checkpoint, for exactness tests.
pub fn all_checkpoints(budget: u64) -> Vec<u64> {
    (1..=budget).collect()
}
