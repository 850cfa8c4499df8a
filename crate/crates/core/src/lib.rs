//! Rational homology of the compactified strata of monic complex polynomials
//! with prescribed root coincidences.
//!
//! The stratum attached to a number partition λ of the degree n is studied
//! through a family of triangulated spaces, one per coarsening μ of λ. Each
//! such space has a purely combinatorial cell model: cells are marked forests
//! whose level partitions interpolate between λ and μ, and the boundary
//! operator deletes levels with alternating signs. This crate provides
//!
//! * partition algebra ([`partitions`]): refinement, joins, genericity, and
//!   the rounding map that splits parts into k's and 1's;
//! * the forest cell model ([`forests`]) and exact rational homology of the
//!   resulting chain complexes ([`chain_complex`]);
//! * a brute-force quotient-complex oracle at small n ([`quotient_oracle`])
//!   that builds the intersection lattice, its order complex, and the
//!   stabilizer quotient directly, for cross-validation of the forest model;
//! * discrete Morse machinery ([`morse`]): acyclic-matching verification,
//!   the insertion matching driven by the rounding map, and cone matchings
//!   for generic partitions;
//! * the poset of bracketed partitions ([`ppos`]) whose comparability graph
//!   counts connected components of the forest model;
//! * aggregation of the per-μ Betti numbers into Betti numbers of the
//!   compactified stratum ([`sigma`]).

pub mod chain_complex;
pub mod forests;
pub mod morse;
pub mod partitions;
pub mod ppos;
pub mod quotient_oracle;
pub mod sigma;

pub use chain_complex::{BettiVector, ChainComplex};
pub use forests::{CellComplex, MarkedForest, TreeNode};
pub use partitions::{NumberPartition, Perm, SetPartition};

/// Errors surfaced by the library.
///
/// `InvalidInput` and `GuardExceeded` are caller problems; `Inconsistency`
/// means an internal cross-check failed (a boundary that does not square to
/// zero, a matching that is not acyclic where it must be, two independent
/// computations of the same number disagreeing). The command-line front end
/// maps the former to exit code 2 and the latter to exit code 3.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("size guard exceeded: {0}")]
    GuardExceeded(String),
    #[error("internal consistency failure: {0}")]
    Inconsistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Size limits for the expensive enumerations.
///
/// `max_bell` bounds the Bell number of the ground set before the quotient
/// oracle or a reachability check will touch the full set-partition lattice.
/// `max_cells` bounds any single cell or chain enumeration (forest complexes,
/// chains of the order complex, bracketed-partition posets).
#[derive(Clone, Copy, Debug)]
pub struct Guards {
    pub max_bell: u128,
    pub max_cells: u64,
}

impl Default for Guards {
    fn default() -> Self {
        // Bell(8) = 4140; enough for every check shipped with the crate.
        Guards {
            max_bell: 4140,
            max_cells: 5_000_000,
        }
    }
}

/// Cap the global worker pool; call once, before any parallel work. Later
/// calls are ignored.
pub fn configure_threads(threads: usize) {
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global();
}

/// Bell number, the number of set partitions of an n-element set.
pub fn bell(n: u32) -> u128 {
    // Bell triangle.
    let n = n as usize;
    let mut row = vec![1u128];
    for _ in 0..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(*row.last().unwrap());
        for &x in &row {
            let last = *next.last().unwrap();
            next.push(last + x);
        }
        row = next;
    }
    row[0]
}

#[cfg(test)]
mod tests {
    use super::bell;

    #[test]
    fn bell_numbers() {
        let want = [1u128, 1, 2, 5, 15, 52, 203, 877, 4140, 21147];
        for (n, &b) in want.iter().enumerate() {
            assert_eq!(bell(n as u32), b);
        }
    }
}
