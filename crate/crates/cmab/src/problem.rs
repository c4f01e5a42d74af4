//! The combinatorial bandit problem abstraction.

use rand::seq::SliceRandom;
use rand::{Rng, RngCore};
use std::fmt;

use crate::error::{CmabError, Result};

/// One value per problem variable; the unit of selection and of global-MAB
/// bookkeeping. Compared and hashed by content.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MacroArm(pub Vec<u16>);

impl MacroArm {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[u16] {
        &self.0
    }
}

impl fmt::Display for MacroArm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// A combinatorial multi-armed bandit: `n` variables with finite value lists,
/// a legality predicate, and a stochastic reward oracle over macro-arms.
///
/// Contract expected by every strategy in this crate:
/// - legality on partial assignments is monotone (an illegal partial
///   assignment has no legal completion), and
/// - extending a legal partial assignment with special (no-op) values keeps
///   it legal, so the all-no-op macro-arm is legal and per-variable greedy
///   construction never dead-ends.
pub trait CmabProblem {
    fn num_variables(&self) -> usize;

    /// Number of values variable `var` can take.
    fn num_values(&self, var: usize) -> usize;

    /// The designated no-op value of variable `var`.
    fn special_value(&self, _var: usize) -> u16 {
        0
    }

    /// Legality of a partial assignment (`None` = unassigned).
    fn partial_legal(&self, partial: &[Option<u16>]) -> bool;

    /// Draws one stochastic reward in [-1, 1] for a complete macro-arm.
    fn sample(&self, arm: &MacroArm, rng: &mut dyn RngCore) -> f64;

    fn is_legal(&self, arm: &MacroArm) -> bool {
        let partial: Vec<Option<u16>> = arm.0.iter().map(|&v| Some(v)).collect();
        self.partial_legal(&partial)
    }
}

impl<P: CmabProblem + ?Sized> CmabProblem for &P {
    fn num_variables(&self) -> usize {
        (**self).num_variables()
    }
    fn num_values(&self, var: usize) -> usize {
        (**self).num_values(var)
    }
    fn special_value(&self, var: usize) -> u16 {
        (**self).special_value(var)
    }
    fn partial_legal(&self, partial: &[Option<u16>]) -> bool {
        (**self).partial_legal(partial)
    }
    fn sample(&self, arm: &MacroArm, rng: &mut dyn RngCore) -> f64 {
        (**self).sample(arm, rng)
    }
    fn is_legal(&self, arm: &MacroArm) -> bool {
        (**self).is_legal(arm)
    }
}

/// Values of `var` that keep `partial` legal when assigned.
pub fn legal_values<P: CmabProblem + ?Sized>(
    problem: &P,
    partial: &mut [Option<u16>],
    var: usize,
) -> Vec<u16> {
    debug_assert!(partial[var].is_none());
    let mut out = Vec::new();
    for v in 0..problem.num_values(var) as u16 {
        partial[var] = Some(v);
        if problem.partial_legal(partial) {
            out.push(v);
        }
    }
    partial[var] = None;
    out
}

/// The all-no-op macro-arm.
pub fn noop_arm<P: CmabProblem + ?Sized>(problem: &P) -> MacroArm {
    MacroArm(
        (0..problem.num_variables())
            .map(|i| problem.special_value(i))
            .collect(),
    )
}

/// Builds a legal macro-arm by assigning variables in uniform-random order,
/// each value uniform among the legality-consistent choices.
pub fn random_legal_arm<P: CmabProblem + ?Sized, R: Rng>(
    problem: &P,
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
        partial[var] = Some(choices[rng.gen_range(0..choices.len())]);
    }
    Ok(MacroArm(partial.into_iter().map(|v| v.unwrap()).collect()))
}

/// Exhaustively enumerates the legal macro-arms by depth-first assignment
/// with legality pruning, refusing once more than `cap` arms are found.
pub fn enumerate_legal<P: CmabProblem + ?Sized>(problem: &P, cap: u64) -> Result<Vec<MacroArm>> {
    let n = problem.num_variables();
    let mut out = Vec::new();
    let mut partial: Vec<Option<u16>> = vec![None; n];
    fn recurse<P: CmabProblem + ?Sized>(
        problem: &P,
        partial: &mut Vec<Option<u16>>,
        var: usize,
        cap: u64,
        out: &mut Vec<MacroArm>,
    ) -> Result<()> {
        if var == problem.num_variables() {
            if out.len() as u64 >= cap {
                return Err(CmabError::EnumerationCap { cap });
            }
            out.push(MacroArm(partial.iter().map(|v| v.unwrap()).collect()));
            return Ok(());
        }
        for v in 0..problem.num_values(var) as u16 {
            partial[var] = Some(v);
            if problem.partial_legal(partial) {
                recurse(problem, partial, var + 1, cap, out)?;
            }
            partial[var] = None;
        }
        Ok(())
    }
    recurse(problem, &mut partial, 0, cap, &mut out)?;
    Ok(out)
}

/// Upper bound on the number of macro-arms, saturating at `u64::MAX`.
pub fn arm_space_bound<P: CmabProblem + ?Sized>(problem: &P) -> u64 {
    let mut bound = 1u64;
    for var in 0..problem.num_variables() {
        bound = bound.saturating_mul(problem.num_values(var) as u64);
    }
    bound
}


#[cfg(test)]
mod tests {
    use super::test_problems::TableProblem;
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn enumerates_all_legal_arms() {
        let p = TableProblem::all_legal(vec![vec![0.0, 0.1], vec![0.0, 0.2], vec![0.0, 0.3]]);
        let arms = enumerate_legal(&p, 100).unwrap();
        assert_eq!(arms.len(), 8);
    }

    #[test]
    fn forbidden_pairs_prune_enumeration() {
        let p = TableProblem {
            means: vec![vec![0.0, 0.1], vec![0.0, 0.2]],
            forbidden: vec![((0, 1), (1, 1))],
        };
        let arms = enumerate_legal(&p, 100).unwrap();
        assert_eq!(arms.len(), 3);
        assert!(!arms.contains(&MacroArm(vec![1, 1])));
        assert!(!p.is_legal(&MacroArm(vec![1, 1])));
    }

    #[test]
    fn cap_is_enforced() {
        let p = TableProblem::all_legal(vec![vec![0.0; 4]; 4]);
        assert_eq!(
            enumerate_legal(&p, 100),
            Err(CmabError::EnumerationCap { cap: 100 })
        );
    }

    #[test]
    fn random_arm_is_legal_and_respects_mask() {
        let p = TableProblem {
            means: vec![vec![0.0, 0.1, 0.2], vec![0.0, 0.2, 0.4]],
            forbidden: vec![((0, 1), (1, 1)), ((0, 2), (1, 2))],
        };
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..500 {
            let arm = random_legal_arm(&p, &mut rng).unwrap();
            assert!(p.is_legal(&arm));
        }
    }

    #[test]
    fn uniform_random_arm_on_all_legal_problem() {
        let p = TableProblem::all_legal(vec![vec![0.0, 0.1], vec![0.0, 0.2]]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut freq = [0usize; 4];
        let draws = 40_000;
        for _ in 0..draws {
            let arm = random_legal_arm(&p, &mut rng).unwrap();
            freq[(arm.0[0] * 2 + arm.0[1]) as usize] += 1;
        }
        for f in freq {
            assert!((f as f64 / draws as f64 - 0.25).abs() < 0.015);
        }
    }
}
