//! Incremental reward statistics shared by every bandit in the crate.

use crate::error::{CmabError, Result};

/// Pull count and running mean reward of a single arm.
///
/// A count of zero keeps the mean at the 0.0 sentinel; greedy selection
/// reads that sentinel as the neutral midpoint of the [-1, 1] reward range.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ArmStats {
    pub count: u64,
    pub mean: f64,
}

impl ArmStats {
    pub fn new() -> Self {
        Self::default()
    }

    /// Incorporates one reward into the running average.
    pub fn update(&mut self, reward: f64) -> Result<()> {
        if !(-1.0..=1.0).contains(&reward) {
            return Err(CmabError::RewardOutOfRange(reward));
        }
        self.count += 1;
        self.mean += (reward - self.mean) / self.count as f64;
        Ok(())
    }
}

/// Updated copy of `stats` after observing `reward`.
pub fn update_arm(stats: ArmStats, reward: f64) -> Result<ArmStats> {
    let mut next = stats;
    next.update(reward)?;
    Ok(next)
}

/// An ordered list of arms with their pull total.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BanditView {
    pub arms: Vec<ArmStats>,
    pub total_pulls: u64,
}

impl BanditView {
    pub fn new(num_arms: usize) -> Self {
        Self {
            arms: vec![ArmStats::new(); num_arms],
            total_pulls: 0,
        }
    }

    /// View with preset statistics, for frozen-state tests and fixtures.
    pub fn from_stats(arms: Vec<ArmStats>) -> Self {
        let total_pulls = arms.iter().map(|a| a.count).sum();
        Self { arms, total_pulls }
    }

    pub fn len(&self) -> usize {
        self.arms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arms.is_empty()
    }

    pub fn update(&mut self, arm: usize, reward: f64) -> Result<()> {
        self.arms[arm].update(reward)?;
        self.total_pulls += 1;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn first_sample_sets_mean() {
        let s = update_arm(ArmStats::new(), 0.5).unwrap();
        assert_eq!(s.count, 1);
        assert_eq!(s.mean, 0.5);
    }

    #[test]
    fn two_point_average() {
        let s = update_arm(ArmStats { count: 1, mean: 0.5 }, 0.9).unwrap();
        assert_eq!(s.count, 2);
        assert!((s.mean - 0.7).abs() < 1e-12);
    }

    #[test]
    fn four_point_average() {
        // (0.6 - 0.2) / 4 = 0.1
        let s = update_arm(ArmStats { count: 3, mean: 0.2 }, -0.2).unwrap();
        assert_eq!(s.count, 4);
        assert!((s.mean - 0.1).abs() < 1e-12);
    }

    #[test]
    fn reward_out_of_range_rejected() {
        assert!(matches!(
            update_arm(ArmStats::new(), 1.5),
            Err(CmabError::RewardOutOfRange(_))
        ));
        assert!(matches!(
            update_arm(ArmStats::new(), -1.0000001),
            Err(CmabError::RewardOutOfRange(_))
        ));
    }

    #[test]
    fn zero_count_means_zero_sentinel() {
        assert_eq!(ArmStats::new().mean, 0.0);
    }

    #[test]
    fn view_tracks_total_pulls() {
        let mut view = BanditView::new(3);
        view.update(0, 0.2).unwrap();
        view.update(2, -0.4).unwrap();
        view.update(2, 0.0).unwrap();
        assert_eq!(view.total_pulls, 3);
        assert_eq!(
            view.total_pulls,
            view.arms.iter().map(|a| a.count).sum::<u64>()
        );
    }

    proptest! {
        // Running mean matches the batch mean regardless of order, within 1e-9 * n.
        #[test]
        fn mean_is_order_insensitive(mut rewards in prop::collection::vec(-1.0f64..=1.0, 1..200)) {
            let mut forward = ArmStats::new();
            for &r in &rewards {
                forward.update(r).unwrap();
            }
            rewards.reverse();
            let mut backward = ArmStats::new();
            for &r in &rewards {
                backward.update(r).unwrap();
            }
            let n = rewards.len() as f64;
            let batch: f64 = rewards.iter().sum::<f64>() / n;
            prop_assert!((forward.mean - batch).abs() <= 1e-9 * n);
            prop_assert!((forward.mean - backward.mean).abs() <= 1e-9 * n);
        }
    }
}
