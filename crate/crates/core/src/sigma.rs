//! Betti numbers of the compactified strata.
//!
//! The reduced Betti numbers of the stratum for λ are assembled from the
//! building blocks: for every coarsening μ of λ, the block's reduced Betti
//! vector is shifted up by `2 l(μ) + 1` and summed. The block for μ = λ is
//! the empty space, whose single class in dimension -1 lands in dimension
//! `2 l(λ)`; coarsenings that are not joins of type-λ set partitions
//! contribute nothing (the block is a point). Reachability is decided by
//! the lattice oracle when the ground set is small enough, otherwise it can
//! be assumed, and the report says which happened.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::chain_complex::BettiVector;
use crate::forests::CellComplex;
use crate::partitions::NumberPartition;
use crate::quotient_oracle::build_pi_lambda;
use crate::{bell, Error, Guards, Result};

/// How a coarsening entered the aggregation.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockKind {
    /// μ = λ: the empty space.
    Empty,
    /// Not a join of type-λ partitions: a point, contributing nothing.
    Point,
    /// A genuine complex, computed from the forest model.
    Complex,
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockTerm {
    pub mu: NumberPartition,
    pub kind: BlockKind,
    /// None when reachability was assumed rather than checked.
    pub reachable_checked: Option<bool>,
    pub shift: i64,
    pub betti_x: BettiVector,
}

#[derive(Clone, Debug, Serialize)]
pub struct SigmaReport {
    pub lambda: NumberPartition,
    pub n: u32,
    pub betti: BettiVector,
    pub terms: Vec<BlockTerm>,
    /// True when the ground set was too large to verify join-reachability
    /// and every coarsening was assumed reachable.
    pub reachability_assumed: bool,
}

/// Aggregate the blocks for every coarsening of λ.
pub fn betti_sigma(
    lambda: &NumberPartition,
    guards: &Guards,
    assume_reachable_above_guard: bool,
) -> Result<SigmaReport> {
    let n = lambda.n();
    let within_guard = bell(n) <= guards.max_bell;
    if !within_guard && !assume_reachable_above_guard {
        return Err(Error::GuardExceeded(format!(
            "Bell({}) = {} exceeds the bound {}; pass the assume-reachable flag to proceed",
            n,
            bell(n),
            guards.max_bell
        )));
    }
    let reachable_types: Option<BTreeSet<NumberPartition>> = if within_guard {
        Some(build_pi_lambda(lambda, guards)?.reachable_types())
    } else {
        None
    };

    let coarsenings: Vec<NumberPartition> = lambda.coarsenings().into_iter().collect();
    let terms: Vec<BlockTerm> = coarsenings
        .par_iter()
        .map(|mu| -> Result<BlockTerm> {
            let shift = 2 * mu.len() as i64 + 1;
            if mu == lambda {
                return Ok(BlockTerm {
                    mu: mu.clone(),
                    kind: BlockKind::Empty,
                    reachable_checked: reachable_types.as_ref().map(|_| true),
                    shift,
                    betti_x: BettiVector::empty_space(),
                });
            }
            let reachable = reachable_types.as_ref().map(|set| set.contains(mu));
            if reachable == Some(false) {
                return Ok(BlockTerm {
                    mu: mu.clone(),
                    kind: BlockKind::Point,
                    reachable_checked: Some(false),
                    shift,
                    betti_x: BettiVector::default(),
                });
            }
            let cx = CellComplex::x_lambda_mu(lambda, mu, guards)?;
            let betti_x = cx.chain_complex()?.reduced_betti()?;
            Ok(BlockTerm {
                mu: mu.clone(),
                kind: BlockKind::Complex,
                reachable_checked: reachable,
                shift,
                betti_x,
            })
        })
        .collect::<Result<_>>()?;

    let mut betti = BettiVector::default();
    for term in &terms {
        betti.add_assign(&term.betti_x.shifted(term.shift));
    }
    Ok(SigmaReport {
        lambda: lambda.clone(),
        n,
        betti: betti.trimmed(),
        terms,
        reachability_assumed: !within_guard,
    })
}

/// True when the aggregated Betti numbers are the indicator at `2 l(λ)`.
pub fn is_delta_at_top(report: &SigmaReport) -> bool {
    let top = 2 * report.lambda.len() as i64;
    report.betti.get(top) == 1 && report.betti.support() == vec![top]
}

/// `β~_{2l(λ)} = 1` and everything else supported in `3..=2l(λ)`.
pub fn vanishing_check(lambda: &NumberPartition, guards: &Guards) -> Result<bool> {
    let report = betti_sigma(lambda, guards, false)?;
    let top = 2 * lambda.len() as i64;
    if report.betti.get(top) != 1 {
        return Ok(false);
    }
    Ok(report
        .betti
        .support()
        .into_iter()
        .all(|i| i == top || (3..=top).contains(&i)))
}

#[derive(Clone, Debug, Serialize)]
pub struct ArnoldCase {
    pub lambda: NumberPartition,
    pub n: u32,
    pub k: u32,
    pub m: u32,
    pub expected_dimension: i64,
    pub ok: bool,
    pub betti: BettiVector,
}

#[derive(Clone, Debug, Serialize)]
pub struct ArnoldReport {
    pub n_max: u32,
    pub all_ok: bool,
    pub cases: Vec<ArnoldCase>,
}

/// For every λ = (k^m, 1^{n-km}) with n ≤ n_max, the stratum must have a
/// single class in dimension 2 l(λ).
pub fn verify_arnold(n_max: u32, guards: &Guards) -> Result<ArnoldReport> {
    let mut inputs = Vec::new();
    for n in 2..=n_max {
        for k in 2..=n {
            for m in 1..=(n / k) {
                inputs.push((n, k, m));
            }
        }
    }
    let cases: Vec<ArnoldCase> = inputs
        .par_iter()
        .map(|&(n, k, m)| -> Result<ArnoldCase> {
            let lambda = NumberPartition::special(k, m, n - k * m)?;
            let report = betti_sigma(&lambda, guards, false)?;
            Ok(ArnoldCase {
                n,
                k,
                m,
                expected_dimension: 2 * lambda.len() as i64,
                ok: is_delta_at_top(&report),
                betti: report.betti,
                lambda,
            })
        })
        .collect::<Result<_>>()?;
    Ok(ArnoldReport {
        n_max,
        all_ok: cases.iter().all(|c| c.ok),
        cases,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn np(s: &str) -> NumberPartition {
        s.parse().unwrap()
    }

    #[test]
    fn smallest_pair_stratum() {
        let report = betti_sigma(&np("2,1"), &Guards::default(), false).unwrap();
        assert_eq!(report.betti.get(4), 1);
        assert_eq!(report.betti.support(), vec![4]);
    }

    #[test]
    fn single_part_stratum_is_a_sphere() {
        for n in 1..=6u32 {
            let report = betti_sigma(&NumberPartition::single(n), &Guards::default(), false).unwrap();
            assert_eq!(report.betti.support(), vec![2]);
            assert_eq!(report.betti.get(2), 1);
        }
    }

    #[test]
    fn generic_three_part_stratum() {
        let report = betti_sigma(&np("4,2,1"), &Guards::default(), false).unwrap();
        assert_eq!(report.betti.support(), vec![6]);
        assert_eq!(report.betti.get(6), 1);
    }

    #[test]
    fn unreachable_blocks_are_points() {
        let report = betti_sigma(&np("3,1,1"), &Guards::default(), false).unwrap();
        let point_terms: Vec<&BlockTerm> = report
            .terms
            .iter()
            .filter(|t| t.kind == BlockKind::Point)
            .collect();
        assert_eq!(point_terms.len(), 1);
        assert_eq!(point_terms[0].mu, np("3,2"));
        assert!(!report.reachability_assumed);
    }

    #[test]
    fn guard_requires_explicit_assumption() {
        let guards = Guards {
            max_bell: 10,
            ..Guards::default()
        };
        assert!(betti_sigma(&np("2,1,1"), &guards, false).is_err());
        let report = betti_sigma(&np("2,1,1"), &guards, true).unwrap();
        assert!(report.reachability_assumed);
        // For this lambda every coarsening is in fact reachable, so assuming
        // changes nothing.
        assert_eq!(report.betti.support(), vec![6]);
    }

    #[test]
    fn arnold_small() {
        let report = verify_arnold(6, &Guards::default()).unwrap();
        assert!(report.all_ok);
        let case = report
            .cases
            .iter()
            .find(|c| c.lambda == np("2,2,1,1"))
            .unwrap();
        assert_eq!(case.expected_dimension, 8);
        let case = report.cases.iter().find(|c| c.lambda == np("3,3")).unwrap();
        assert_eq!(case.expected_dimension, 4);
    }

    #[test]
    fn vanishing_small_sweep() {
        for n in 1..=6u32 {
            for lambda in NumberPartition::all(n) {
                assert!(
                    vanishing_check(&lambda, &Guards::default()).unwrap(),
                    "{}",
                    lambda
                );
            }
        }
    }

    #[test]
    fn aggregation_is_linear_in_the_blocks() {
        // Replacing a block's Betti vector by an equal one recomputed from
        // the oracle leaves the aggregate unchanged.
        let lambda = np("2,1,1");
        let report = betti_sigma(&lambda, &Guards::default(), false).unwrap();
        let mut total = BettiVector::default();
        for term in &report.terms {
            total.add_assign(&term.betti_x.shifted(term.shift));
        }
        assert_eq!(total.trimmed(), report.betti);
    }
}
