//! Exact brute-force optimum for enumerable synthetic problems.

use cmab::{arm_space_bound, CmabProblem, MacroArm};

use crate::synthetic::SyntheticCmab;
use crate::LabError;

pub const ENUMERATION_CAP: u64 = 10_000_000;

/// Exhaustive depth-first search over legal macro-arms, returning one of
/// maximal exact expected reward and that value.
///
/// Refuses problems whose value-combination bound exceeds the cap, so the
/// un-enumerable tiers fail fast instead of running for hours.
pub fn brute_force_optimum(problem: &SyntheticCmab) -> Result<(MacroArm, f64), LabError> {
    let bound = arm_space_bound(problem);
    if bound > ENUMERATION_CAP {
        return Err(LabError::EnumerationCap {
            bound,
            cap: ENUMERATION_CAP,
        });
    }
    let n = problem.num_variables();
    let mut partial: Vec<Option<u16>> = vec![None; n];
    let mut best: Option<(MacroArm, f64)> = None;
    fn recurse(
        problem: &SyntheticCmab,
        partial: &mut Vec<Option<u16>>,
        var: usize,
        best: &mut Option<(MacroArm, f64)>,
    ) {
        if var == problem.num_variables() {
            let arm = MacroArm(partial.iter().map(|v| v.unwrap()).collect());
            let value = problem.true_mean(&arm);
            if best.as_ref().map_or(true, |(_, b)| value > *b) {
                *best = Some((arm, value));
            }
            return;
        }
        for v in 0..problem.num_values(var) as u16 {
            partial[var] = Some(v);
            if problem.partial_legal(partial) {
                recurse(problem, partial, var + 1, best);
            }
            partial[var] = None;
        }
    }
    recurse(problem, &mut partial, 0, &mut best);
    best.ok_or(LabError::NoLegalArm)
}
