//! A regret laboratory for combinatorial bandit strategies: seeded synthetic
//! problem generators with closed-form expected rewards, an exact brute-force
//! oracle, regret traces, and a reproducible budget-sweep runner.

pub mod oracle;
pub mod report;
pub mod runner;
pub mod synthetic;
pub mod trace;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("macro-arm space bound {bound} exceeds the enumeration cap {cap}")]
    EnumerationCap { bound: u64, cap: u64 },
    #[error("problem has no legal macro-arm")]
    NoLegalArm,
    #[error(transparent)]
    Strategy(#[from] cmab::CmabError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub use oracle::{brute_force_optimum, ENUMERATION_CAP};
pub use report::{write_regret_csv, write_regret_csv_file, REGRET_CSV_HEADER};
pub use runner::{measure_regret, run_driver_trace, MeasureConfig, MeasuredRegret, StrategyDriver};
pub use synthetic::{
    generate_suite, splitmix, Interaction, Legality, Noise, SyntheticCmab, Tier,
};
pub use trace::{
    aggregate, all_checkpoints, default_checkpoints, AggregatedPoint, CheckpointRecord, MuStar,
    RegretTrace,
};
