//! Acceptance suite: one test per criterion, each printing a pass line with
//! the measured numbers (run with `--nocapture` to see them).

use std::collections::BTreeSet;

use rootstrata::forests::{enumerate_forests, CellComplex};
use rootstrata::morse::{
    collapse_pipeline, generic_cone_matching, length_band_family, refinement_closure,
    SubcomplexShape,
};
use rootstrata::partitions::NumberPartition;
use rootstrata::ppos::{compare_beta0, counterexample_pair};
use rootstrata::quotient_oracle::oracle_sweep;
use rootstrata::sigma::{betti_sigma, is_delta_at_top, vanishing_check, verify_arnold};
use rootstrata::Guards;

fn guards() -> Guards {
    Guards::default()
}

fn np(s: &str) -> NumberPartition {
    s.parse().unwrap()
}

/// Criterion 1: for every pair lambda |- mu |- n, lambda != mu, 3 <= n <= 7,
/// the forest model is compared against the brute-force quotient of the
/// join-closure lattice: the chain-to-forest map must embed the quotient
/// cells into the forest enumeration with commuting face maps, and the
/// reduced Betti numbers must agree exactly.
///
/// The cell-count equality asserted by the source theorem fails for pairs
/// whose lattice does not realize every admissible level type (smallest
/// case: lambda = (3,1,1), mu = (5), where no element has type (3,2)); the
/// suite verifies that every such discrepancy is exactly of that form and
/// reports it as a finding instead of hiding it. See the oracle-check CLI
/// report for the same data.
#[test]
fn acceptance_1_oracle_equivalence() {
    let mut pairs = 0usize;
    let mut bijective = 0usize;
    let mut unreachable = 0usize;
    let mut findings: Vec<String> = Vec::new();
    for n in 3..=7u32 {
        for report in oracle_sweep(n, None, &guards()).unwrap() {
            pairs += 1;
            assert!(
                report.betti_equal,
                "Betti mismatch for {} and {}",
                report.lambda, report.mu
            );
            if !report.reachable {
                unreachable += 1;
                continue;
            }
            assert!(
                report.embedding_ok && report.face_maps_match,
                "embedding failure for {} and {}",
                report.lambda,
                report.mu
            );
            assert!(
                report.psi_collisions.is_empty(),
                "orbit collision for {} and {}: {:?}",
                report.lambda,
                report.mu,
                report.psi_collisions
            );
            if report.bijective {
                bijective += 1;
            } else {
                assert!(
                    report.mismatch_explained,
                    "unexplained cell-count mismatch for {} and {}",
                    report.lambda, report.mu
                );
                findings.push(format!(
                    "lambda = {}, mu = {}: oracle {:?} vs forest {:?}",
                    report.lambda,
                    report.mu,
                    report
                        .dims
                        .iter()
                        .map(|d| d.oracle_cells)
                        .collect::<Vec<_>>(),
                    report
                        .dims
                        .iter()
                        .map(|d| d.forest_cells)
                        .collect::<Vec<_>>()
                ));
            }
        }
    }
    for f in &findings {
        println!("[criterion 1] finding (forest model strictly larger, Betti equal): {}", f);
    }
    println!(
        "[criterion 1] PASS - {} pairs at 3 <= n <= 7: {} bijective, {} with mu unreachable \
         (point convention), {} findings where the lattice misses admissible level types; \
         Betti numbers and face-commuting embeddings exact everywhere",
        pairs,
        bijective,
        unreachable,
        findings.len()
    );
}

/// Criterion 2: the stratum for (k^m, 1^(n-km)) has a single reduced class,
/// in dimension 2 l(lambda), for every n <= 8.
#[test]
fn acceptance_2_arnold() {
    let report = verify_arnold(8, &guards()).unwrap();
    for case in &report.cases {
        assert!(
            case.ok,
            "failed for lambda = {} (n = {}): {}",
            case.lambda, case.n, case.betti
        );
    }
    assert!(report.all_ok);
    println!(
        "[criterion 2] PASS - {} special-partition strata up to n = 8, all a single class in dimension 2 l(lambda)",
        report.cases.len()
    );
}

/// Criterion 3: the collapse pipeline certifies a perfect acyclic matching,
/// the simplex/cone shape of the special subcomplex, and vanishing homology
/// for every refinement-closure family at n <= 8 and for the length-band
/// families at n = 6.
#[test]
fn acceptance_3_collapse_pipeline() {
    let mut runs = 0usize;
    for n in 3..=8u32 {
        for k in 2..=n {
            for m in 1..=(n / k) {
                let lambda = NumberPartition::special(k, m, n - k * m).unwrap();
                let family = refinement_closure(&lambda);
                for mu in lambda.coarsenings() {
                    if mu == lambda {
                        continue;
                    }
                    let cert = collapse_pipeline(&family, &mu, k, &guards()).unwrap();
                    assert!(cert.acyclic && cert.betti_zero, "{} {}", lambda, mu);
                    assert_eq!(cert.critical, 1, "{} {}", lambda, mu);
                    let expect_simplex = mu.is_single() || mu.is_special(k);
                    assert_eq!(
                        cert.shape,
                        if expect_simplex {
                            SubcomplexShape::Simplex
                        } else {
                            SubcomplexShape::Cone
                        },
                        "{} {}",
                        lambda,
                        mu
                    );
                    assert_eq!(
                        cert.matched * 2 + 1,
                        cert.cell_counts.iter().sum::<usize>(),
                        "{} {}",
                        lambda,
                        mu
                    );
                    runs += 1;
                }
            }
        }
    }
    let mut bands = 0usize;
    for (min_len, name) in [(2usize, "two"), (3usize, "three")] {
        let family = length_band_family(6, min_len, 5);
        let cert = collapse_pipeline(&family, &np("6"), 2, &guards()).unwrap();
        assert!(cert.acyclic && cert.betti_zero, "length band from {}", name);
        assert_eq!(cert.shape, SubcomplexShape::Simplex);
        bands += 1;
    }
    println!(
        "[criterion 3] PASS - {} refinement-closure collapses at n <= 8 plus {} length-band collapses at n = 6, all acyclic with zero reduced homology",
        runs, bands
    );
}

/// Criterion 4: at n = 23 the bracketed-partition poset and the forest model
/// are both disconnected, with equal component counts.
#[test]
fn acceptance_4_counterexample() {
    let (lambda, mu) = counterexample_pair();
    let cx = CellComplex::x_lambda_mu(&lambda, &mu, &guards()).unwrap();
    assert!(cx.dims.len() <= 3, "dimension at most 2");
    let report = compare_beta0(&lambda, &mu, &guards()).unwrap();
    assert!(report.p_components >= 2);
    assert!(report.equal);
    println!(
        "[criterion 4] PASS - lambda = {}, mu = {}: {} elements, {} components in both models",
        lambda, mu, report.p_elements, report.p_components
    );
}

/// Criterion 5: the quotient of the order complex of the partition lattice
/// of a five-element set has five vertices and five triangles, and there are
/// exactly five rank-2 trees.
#[test]
fn acceptance_5_figure_counts() {
    let forests = enumerate_forests(
        |t| np("2,1,1,1").refines(t).unwrap(),
        &np("5"),
        2,
        &guards(),
    )
    .unwrap();
    assert_eq!(forests.len(), 5);
    let cx = CellComplex::x_lambda_mu(&np("2,1,1,1"), &np("5"), &guards()).unwrap();
    assert_eq!(cx.dims[0].len(), 5);
    assert_eq!(cx.dims[2].len(), 5);
    println!(
        "[criterion 5] PASS - five vertices, five 2-cells, five rank-2 trees (f-vector {:?})",
        cx.cell_counts()
    );
}

/// Criterion 6: for every generic lambda with n <= 8 and every strict
/// coarsening, the cone matching succeeds, the block vanishes rationally,
/// and the stratum shows the indicator pattern.
#[test]
fn acceptance_6_generic_cones() {
    let mut cones = 0usize;
    let mut strata = 0usize;
    for n in 2..=8u32 {
        for lambda in NumberPartition::all(n) {
            if !lambda.is_generic() {
                continue;
            }
            for mu in lambda.coarsenings() {
                if mu == lambda {
                    continue;
                }
                let cert = generic_cone_matching(&lambda, &mu, &guards()).unwrap();
                assert!(cert.acyclic && cert.betti_zero, "{} {}", lambda, mu);
                cones += 1;
            }
            let report = betti_sigma(&lambda, &guards(), false).unwrap();
            assert!(
                is_delta_at_top(&report),
                "stratum for generic {} is {}",
                lambda,
                report.betti
            );
            strata += 1;
        }
    }
    println!(
        "[criterion 6] PASS - {} cone certificates and {} generic strata with the indicator pattern, n <= 8",
        cones, strata
    );
}

/// Criterion 7: structural suites. The boundary-squares-to-zero and Euler
/// cross-checks run inside every chain-complex build; here every complex at
/// n <= 6 is built explicitly, the level-deletion commutation identity is
/// checked exhaustively at n <= 6, component counts of the two models are
/// compared for all pairs at n <= 7, and the rounding map is idempotent for
/// n <= 10, k in {2, 3, 4}.
#[test]
fn acceptance_7_structural_suites() {
    let mut complexes = 0usize;
    for n in 3..=6u32 {
        for lambda in NumberPartition::all(n) {
            for mu in lambda.coarsenings() {
                let cx = CellComplex::x_lambda_mu(&lambda, &mu, &guards()).unwrap();
                // Build checks that boundaries square to zero; Betti checks
                // the Euler identity.
                let chain = cx.chain_complex().unwrap();
                let betti = chain.reduced_betti().unwrap();
                let alt: i64 = (-1..=(chain.top_dim().map_or(-1, |d| d as i64)))
                    .map(|i| {
                        let v = betti.get(i) as i64;
                        if i.rem_euclid(2) == 0 {
                            v
                        } else {
                            -v
                        }
                    })
                    .sum();
                assert_eq!(chain.euler_characteristic(), 1 + alt, "{} {}", lambda, mu);
                complexes += 1;
                for cells in cx.dims.iter().skip(2) {
                    for f in cells {
                        for i in 1..=f.rank() {
                            for j in 0..i {
                                let a = f.delete_level(i).unwrap().delete_level(j).unwrap();
                                let b = f.delete_level(j).unwrap().delete_level(i - 1).unwrap();
                                assert_eq!(a, b);
                            }
                        }
                    }
                }
            }
        }
    }
    let mut beta0_pairs = 0usize;
    for n in 3..=7u32 {
        for lambda in NumberPartition::all(n) {
            for mu in lambda.coarsenings() {
                if mu == lambda {
                    continue;
                }
                let report = compare_beta0(&lambda, &mu, &guards()).unwrap();
                assert!(report.equal, "{} {}", lambda, mu);
                beta0_pairs += 1;
            }
        }
    }
    let mut gamma_checks = 0usize;
    for n in 1..=10u32 {
        for p in NumberPartition::all(n) {
            for k in 2..=4u32 {
                let g = p.gamma_k(k).unwrap();
                assert_eq!(g.gamma_k(k).unwrap(), g);
                gamma_checks += 1;
            }
        }
    }
    println!(
        "[criterion 7] PASS - {} complexes with zero boundary squares and Euler agreement, \
         level-deletion commutation at n <= 6, {} component-count agreements at n <= 7, \
         {} idempotence checks of the rounding map",
        complexes, beta0_pairs, gamma_checks
    );
}

/// Criterion 8: every stratum at n <= 7 has its top class in dimension
/// 2 l(lambda) and no support outside 3..=2 l(lambda) (besides that top
/// class, which for one-part lambda sits in dimension 2).
#[test]
fn acceptance_8_vanishing_bounds() {
    let mut checked = 0usize;
    for n in 1..=7u32 {
        for lambda in NumberPartition::all(n) {
            assert!(
                vanishing_check(&lambda, &guards()).unwrap(),
                "bounds fail for {}",
                lambda
            );
            checked += 1;
        }
    }
    // The largest support the sweep actually exercises: the disconnected
    // example contributes in low dimensions at n = 23 but is out of reach of
    // the lattice guard; the forest-model blocks behind these bounds are the
    // same ones criterion 1 validated.
    let report = betti_sigma(&np("2,2,1"), &guards(), false).unwrap();
    let top = 2 * np("2,2,1").len() as i64;
    assert_eq!(report.betti.get(top), 1);
    println!(
        "[criterion 8] PASS - vanishing bounds hold for all {} partitions with n <= 7",
        checked
    );
}

/// The spec's open question for the aggregation: record the unreachable
/// coarsenings found at n <= 8. They exist (the smallest is lambda = (3,1,1)
/// with mu = (3,2)), so the point convention is not vacuous.
#[test]
fn unreachable_coarsenings_are_recorded() {
    let mut found: Vec<(NumberPartition, NumberPartition)> = Vec::new();
    for n in 2..=8u32 {
        for lambda in NumberPartition::all(n) {
            let report = betti_sigma(&lambda, &guards(), false).unwrap();
            for term in &report.terms {
                if term.reachable_checked == Some(false) {
                    found.push((lambda.clone(), term.mu.clone()));
                }
            }
        }
    }
    assert!(found.contains(&(np("3,1,1"), np("3,2"))));
    println!(
        "[open question] {} unreachable coarsenings at n <= 8; smallest: lambda = (3,1,1), mu = (3,2)",
        found.len()
    );
}

/// All criteria bundled: prints the summary banner when everything above is
/// green (each criterion also runs on its own).
#[test]
fn acceptance_summary() {
    let sets: BTreeSet<&str> = [
        "1 oracle equivalence",
        "2 Arnold pattern",
        "3 collapse pipeline",
        "4 counterexample",
        "5 figure counts",
        "6 generic cones",
        "7 structural suites",
        "8 vanishing bounds",
    ]
    .into_iter()
    .collect();
    println!(
        "[acceptance] {} criteria implemented in this suite; see the individual test output lines",
        sets.len()
    );
}
