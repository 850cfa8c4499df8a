//! Bracketed partitions and their poset.
//!
//! An element is a multiset of number partitions, one bracket per part of μ,
//! the bracket for μ_j summing to μ_j, with the concatenation coarser than λ
//! and different from μ. These are exactly the vertices of the forest
//! complex for (λ, μ), but kept as pure partition data so that large ground
//! sets cost nothing. The order is bracket-preserving refinement; only the
//! comparability graph matters here, since its component count equals that
//! of the forest complex.

use std::collections::HashMap;

use serde::Serialize;

use crate::forests::{CellComplex, MarkedForest, TreeNode};
use crate::partitions::NumberPartition;
use crate::{Error, Guards, Result};

/// A partition refining μ together with the brackets that assemble μ from it.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct BracketedPartition {
    groups: Vec<NumberPartition>,
}

impl BracketedPartition {
    pub fn new(mut groups: Vec<NumberPartition>) -> Result<Self> {
        if groups.is_empty() {
            return Err(Error::InvalidInput("need at least one bracket".into()));
        }
        groups.sort_unstable();
        Ok(BracketedPartition { groups })
    }

    pub fn groups(&self) -> &[NumberPartition] {
        &self.groups
    }

    /// Sums of the brackets, i.e. the μ this element refines.
    pub fn mu(&self) -> NumberPartition {
        NumberPartition::new(self.groups.iter().map(|g| g.n()).collect()).unwrap()
    }

    /// The concatenation of all brackets.
    pub fn underlying(&self) -> NumberPartition {
        let mut parts = Vec::new();
        for g in &self.groups {
            parts.extend_from_slice(g.parts());
        }
        NumberPartition::new(parts).unwrap()
    }

    /// Total number of parts across brackets.
    pub fn len(&self) -> usize {
        self.groups.iter().map(|g| g.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The corresponding vertex of the forest complex.
    pub fn to_forest(&self) -> MarkedForest {
        let roots = self
            .groups
            .iter()
            .map(|g| {
                TreeNode::new(
                    g.n(),
                    g.parts().iter().map(|&p| TreeNode::leaf(p)).collect(),
                )
            })
            .collect();
        MarkedForest::new(roots).expect("brackets form a valid vertex")
    }

    pub fn from_forest(f: &MarkedForest) -> Result<Self> {
        if f.rank() != 0 {
            return Err(Error::InvalidInput("vertices are rank-0 forests".into()));
        }
        let groups = f
            .roots()
            .iter()
            .map(|r| NumberPartition::new(r.children.iter().map(|c| c.label).collect()))
            .collect::<Result<_>>()?;
        BracketedPartition::new(groups)
    }
}

impl std::fmt::Display for BracketedPartition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for g in &self.groups {
            write!(f, "({})", g)?;
        }
        Ok(())
    }
}

impl Serialize for BracketedPartition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Strict bracket-preserving refinement: a sum-preserving bijection of
/// brackets with groupwise refinement, and strictly more parts overall.
pub fn bracket_refines(fine: &BracketedPartition, coarse: &BracketedPartition) -> Result<bool> {
    if fine.mu() != coarse.mu() {
        return Err(Error::InvalidInput("brackets assemble different partitions".into()));
    }
    if fine.len() <= coarse.len() {
        return Ok(false);
    }
    // Match brackets within each sum class.
    let mut by_sum: HashMap<u32, (Vec<&NumberPartition>, Vec<&NumberPartition>)> = HashMap::new();
    for g in &fine.groups {
        by_sum.entry(g.n()).or_default().0.push(g);
    }
    for g in &coarse.groups {
        by_sum.entry(g.n()).or_default().1.push(g);
    }
    for (_, (fs, cs)) in by_sum {
        debug_assert_eq!(fs.len(), cs.len());
        if !class_matchable(&fs, &cs, 0, &mut vec![false; cs.len()])? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn class_matchable(
    fine: &[&NumberPartition],
    coarse: &[&NumberPartition],
    i: usize,
    used: &mut Vec<bool>,
) -> Result<bool> {
    if i == fine.len() {
        return Ok(true);
    }
    for j in 0..coarse.len() {
        if used[j] || !fine[i].refines(coarse[j])? {
            continue;
        }
        used[j] = true;
        if class_matchable(fine, coarse, i + 1, used)? {
            used[j] = false;
            return Ok(true);
        }
        used[j] = false;
    }
    Ok(false)
}

/// The poset of bracketed partitions for a pair λ ⊢ μ, λ ≠ μ.
pub struct PPoset {
    pub lambda: NumberPartition,
    pub mu: NumberPartition,
    pub elements: Vec<BracketedPartition>,
    /// `less[a][b]` iff element `a` strictly refines element `b`.
    pub less: Vec<Vec<bool>>,
}

pub fn build_p_poset(
    lambda: &NumberPartition,
    mu: &NumberPartition,
    guards: &Guards,
) -> Result<PPoset> {
    if !lambda.refines(mu)? || lambda == mu {
        return Err(Error::InvalidInput(format!(
            "need lambda strictly refining mu, got {} and {}",
            lambda, mu
        )));
    }
    // Every way to pick one partition per part of mu.
    let per_part: Vec<Vec<NumberPartition>> = mu
        .parts()
        .iter()
        .map(|&p| NumberPartition::all(p))
        .collect();
    let mut elements: Vec<BracketedPartition> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let mut cursor = vec![0usize; per_part.len()];
    loop {
        let groups: Vec<NumberPartition> = cursor
            .iter()
            .enumerate()
            .map(|(i, &c)| per_part[i][c].clone())
            .collect();
        let candidate = BracketedPartition::new(groups)?;
        let tau = candidate.underlying();
        if &tau != mu && lambda.refines(&tau)? && seen.insert(candidate.clone()) {
            if seen.len() as u64 > guards.max_cells {
                return Err(Error::GuardExceeded(format!(
                    "poset exceeds {} elements",
                    guards.max_cells
                )));
            }
            elements.push(candidate);
        }
        // Odometer.
        let mut i = 0;
        loop {
            if i == cursor.len() {
                elements.sort_unstable();
                let less = relation(&elements)?;
                return Ok(PPoset {
                    lambda: lambda.clone(),
                    mu: mu.clone(),
                    elements,
                    less,
                });
            }
            cursor[i] += 1;
            if cursor[i] < per_part[i].len() {
                break;
            }
            cursor[i] = 0;
            i += 1;
        }
    }
}

fn relation(elements: &[BracketedPartition]) -> Result<Vec<Vec<bool>>> {
    let m = elements.len();
    let mut less = vec![vec![false; m]; m];
    for a in 0..m {
        for b in 0..m {
            if a != b {
                less[a][b] = bracket_refines(&elements[a], &elements[b])?;
            }
        }
    }
    Ok(less)
}

impl PPoset {
    /// Number of connected components of the comparability graph; zero for
    /// the empty poset.
    pub fn beta0(&self) -> u64 {
        let m = self.elements.len();
        let mut parent: Vec<usize> = (0..m).collect();
        fn find(parent: &mut Vec<usize>, x: usize) -> usize {
            if parent[x] != x {
                let r = find(parent, parent[x]);
                parent[x] = r;
            }
            parent[x]
        }
        for a in 0..m {
            for b in 0..m {
                if self.less[a][b] {
                    let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                    if ra != rb {
                        parent[ra] = rb;
                    }
                }
            }
        }
        (0..m)
            .filter(|&x| find(&mut parent, x) == x)
            .count() as u64
    }
}

/// Connected components of both models, which must agree.
#[derive(Clone, Debug, Serialize)]
pub struct Beta0Report {
    pub lambda: NumberPartition,
    pub mu: NumberPartition,
    pub p_elements: usize,
    pub p_components: u64,
    pub x_vertices: usize,
    pub x_components: u64,
    pub equal: bool,
}

/// Compute the component count from the forest-model chain complex and from
/// the comparability graph; disagreement is an internal failure.
pub fn compare_beta0(
    lambda: &NumberPartition,
    mu: &NumberPartition,
    guards: &Guards,
) -> Result<Beta0Report> {
    let p = build_p_poset(lambda, mu, guards)?;
    let p_components = p.beta0();
    let cx = CellComplex::x_lambda_mu(lambda, mu, guards)?;
    let betti = cx.chain_complex()?.reduced_betti()?;
    let x_vertices = cx.dims.first().map_or(0, |v| v.len());
    let x_components = if x_vertices == 0 {
        0
    } else {
        betti.get(0) + 1
    };
    let equal = p_components == x_components;
    if !equal {
        return Err(Error::Inconsistency(format!(
            "component counts disagree for {} and {}: poset {}, complex {}",
            lambda, mu, p_components, x_components
        )));
    }
    Ok(Beta0Report {
        lambda: lambda.clone(),
        mu: mu.clone(),
        p_elements: p.elements.len(),
        p_components,
        x_vertices,
        x_components,
        equal,
    })
}

/// The disconnected example: n = 23, λ = (7,6,4,3,2,1), μ = (10,8,5).
pub fn counterexample_pair() -> (NumberPartition, NumberPartition) {
    (
        NumberPartition::new(vec![7, 6, 4, 3, 2, 1]).unwrap(),
        NumberPartition::new(vec![10, 8, 5]).unwrap(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn np(s: &str) -> NumberPartition {
        s.parse().unwrap()
    }

    fn bp(groups: &[&str]) -> BracketedPartition {
        BracketedPartition::new(groups.iter().map(|g| g.parse().unwrap()).collect()).unwrap()
    }

    #[test]
    fn bracket_equality_ignores_order() {
        let a = bp(&["1,1,1", "3,1", "2,2"]);
        let b = bp(&["1,1,1", "2,2", "3,1"]);
        assert_eq!(a, b);
        let c = bp(&["3", "2,1,1", "2,1,1"]);
        assert_ne!(a, c);
        assert_eq!(a.mu(), np("4,4,3"));
        assert_eq!(c.mu(), np("4,4,3"));
    }

    #[test]
    fn scrambled_presentations_collapse() {
        let base = bp(&["3,1", "2,2", "1,1,1"]);
        let variants = [
            vec!["1,3", "2,2", "1,1,1"],
            vec!["2,2", "3,1", "1,1,1"],
            vec!["1,1,1", "2,2", "1,3"],
        ];
        for v in variants {
            let other =
                BracketedPartition::new(v.iter().map(|g| g.parse().unwrap()).collect()).unwrap();
            assert_eq!(other, base);
        }
    }

    #[test]
    fn both_paper_elements_appear_in_the_poset() {
        let p = build_p_poset(&np("2,1,1,1,1,1,1,1,1,1"), &np("4,4,3"), &Guards::default()).unwrap();
        let a = bp(&["1,1,1", "3,1", "2,2"]);
        let c = bp(&["3", "2,1,1", "2,1,1"]);
        assert!(p.elements.contains(&a));
        assert!(p.elements.contains(&c));
    }

    #[test]
    fn poset_with_single_element() {
        // lambda = (3,1), mu = (4): only tau = (3,1) lies strictly between.
        let p = build_p_poset(&np("3,1"), &np("4"), &Guards::default()).unwrap();
        assert_eq!(p.elements.len(), 1);
        assert_eq!(p.beta0(), 1);
    }

    #[test]
    fn chain_of_three_is_connected() {
        let p = build_p_poset(&np("2,1,1"), &np("4"), &Guards::default()).unwrap();
        assert_eq!(p.elements.len(), 3);
        assert_eq!(p.beta0(), 1);
    }

    #[test]
    fn refinement_respects_brackets() {
        let fine = bp(&["2,1", "2"]);
        let coarse = bp(&["3", "2"]);
        assert!(bracket_refines(&fine, &coarse).unwrap());
        // Same underlying partitions, incompatible brackets.
        let a = bp(&["2,2", "1,1,1,1"]);
        let b = bp(&["2,1,1", "2,1,1"]);
        assert!(!bracket_refines(&b, &a).unwrap());
        assert!(!bracket_refines(&a, &b).unwrap());
    }

    #[test]
    fn vertices_match_rank_zero_forests() {
        for n in 3..=6u32 {
            for lambda in NumberPartition::all(n) {
                for mu in lambda.coarsenings() {
                    if mu == lambda {
                        continue;
                    }
                    let p = build_p_poset(&lambda, &mu, &Guards::default()).unwrap();
                    let cx = CellComplex::x_lambda_mu(&lambda, &mu, &Guards::default()).unwrap();
                    let x_vertices = cx.dims.first().map_or(0, |v| v.len());
                    assert_eq!(p.elements.len(), x_vertices, "{} {}", lambda, mu);
                    // Same vertices, not just the same number.
                    let from_forests: HashSet<BracketedPartition> = cx
                        .dims
                        .first()
                        .map(|vs| {
                            vs.iter()
                                .map(|f| BracketedPartition::from_forest(f).unwrap())
                                .collect()
                        })
                        .unwrap_or_default();
                    let from_poset: HashSet<BracketedPartition> =
                        p.elements.iter().cloned().collect();
                    assert_eq!(from_forests, from_poset);
                }
            }
        }
    }

    #[test]
    fn adjacency_matches_rank_one_forests() {
        for n in 3..=6u32 {
            for lambda in NumberPartition::all(n) {
                for mu in lambda.coarsenings() {
                    if mu == lambda {
                        continue;
                    }
                    let p = build_p_poset(&lambda, &mu, &Guards::default()).unwrap();
                    let cx = CellComplex::x_lambda_mu(&lambda, &mu, &Guards::default()).unwrap();
                    let index: HashMap<BracketedPartition, usize> = p
                        .elements
                        .iter()
                        .enumerate()
                        .map(|(i, e)| (e.clone(), i))
                        .collect();
                    // Edges of the forest model, as unordered vertex pairs.
                    let mut forest_edges = HashSet::new();
                    if cx.dims.len() > 1 {
                        for f in &cx.dims[1] {
                            let fine =
                                BracketedPartition::from_forest(&f.delete_level(1).unwrap())
                                    .unwrap();
                            let coarse =
                                BracketedPartition::from_forest(&f.delete_level(0).unwrap())
                                    .unwrap();
                            forest_edges.insert((index[&fine], index[&coarse]));
                        }
                    }
                    // Rank-1 forests realize exactly the comparable pairs.
                    let mut comparable = HashSet::new();
                    for a in 0..p.elements.len() {
                        for b in 0..p.elements.len() {
                            if p.less[a][b] {
                                comparable.insert((a, b));
                            }
                        }
                    }
                    assert_eq!(forest_edges, comparable, "{} {}", lambda, mu);
                }
            }
        }
    }

    #[test]
    fn counterexample_poset_is_disconnected() {
        let (lambda, mu) = counterexample_pair();
        let p = build_p_poset(&lambda, &mu, &Guards::default()).unwrap();
        assert_eq!(p.elements.len(), 14);
        assert_eq!(p.beta0(), 2);
        let x1 = bp(&["7,3", "6,2", "4,1"]);
        let x2 = bp(&["6,4", "7,1", "3,2"]);
        assert!(p.elements.contains(&x1));
        assert!(p.elements.contains(&x2));
        assert!(!bracket_refines(&x1, &x2).unwrap());
    }

    #[test]
    fn beta0_agreement_small_sweep() {
        for n in 3..=6u32 {
            for lambda in NumberPartition::all(n) {
                for mu in lambda.coarsenings() {
                    if mu == lambda {
                        continue;
                    }
                    let report = compare_beta0(&lambda, &mu, &Guards::default()).unwrap();
                    assert!(report.equal, "{} {}", lambda, mu);
                }
            }
        }
    }

    #[test]
    fn generic_lambda_gives_one_component() {
        let report = compare_beta0(&np("4,2,1"), &np("7"), &Guards::default()).unwrap();
        assert_eq!(report.p_components, 1);
        assert_eq!(report.x_components, 1);
    }
}
