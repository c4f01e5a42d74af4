//! Combinatorial multi-armed bandit (CMAB) strategies.
//!
//! A CMAB assigns one value to each of `n` variables and receives a single
//! stochastic reward for the joint assignment (the macro-arm). This crate
//! provides the flat bandit primitives (ε-greedy, UCB1, sequential halving)
//! and the CMAB strategies built on them: the naive-sampling family, flat
//! adapters over the enumerated macro-arm space, greedy MLPS, and LSI.

pub mod error;
pub mod flat;
pub mod halving;
pub mod lsi;
pub mod mlps;
pub mod naive;
pub mod problem;
pub mod select;
pub mod stats;
pub mod strategy;

pub use error::{CmabError, Result};
pub use flat::{flat_adapter, FlatPolicy, FlatSampler};
pub use halving::sequential_halving;
pub use lsi::{
    lsi_run, normalize_to_distribution, LsiConfig, LsiGeneration, LsiOutcome, LsiSideInfo,
};
pub use mlps::MlpsSampler;
pub use naive::{GlobalPolicy, NaiveSampler, NsPhase, NsSchedule};
pub use problem::{
    arm_space_bound, enumerate_legal, legal_values, noop_arm, random_legal_arm, CmabProblem,
    MacroArm,
};
pub use select::{epsilon_greedy_select, most_sampled, ucb1_index, ucb1_select};
pub use stats::{update_arm, ArmStats, BanditView};
pub use strategy::{FpuSampler, RandomSampler, Strategy, StrategySpec};
