//! Marked forests, the cells of the triangulated spaces studied here.
//!
//! A marked forest of rank `r` is a forest of rooted trees in which every
//! leaf sits at depth `r+1`, the level sizes strictly increase from the
//! roots down, and every non-leaf label equals the sum of its children's
//! labels. Heights count from the leaves: leaves have height 0, roots have
//! height `r+1`. The root level is always stored; two forests are equal when
//! they are isomorphic as labeled forests, which the canonical child order
//! turns into structural equality.
//!
//! For partitions `λ ⊢ μ` the rank-`r` cells of the associated space are the
//! marked forests with root labels `μ` whose level partitions are all
//! coarsenings of `λ`; the face maps delete a level and regraft, and the
//! boundary operator is the alternating sum of level deletions.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::chain_complex::ChainComplex;
use crate::partitions::NumberPartition;
use crate::{Error, Guards, Result};

/// A vertex of a marked forest with its subtree.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct TreeNode {
    pub label: u32,
    pub children: Vec<TreeNode>,
}

impl TreeNode {
    pub fn leaf(label: u32) -> Self {
        TreeNode {
            label,
            children: Vec::new(),
        }
    }

    pub fn new(label: u32, children: Vec<TreeNode>) -> Self {
        TreeNode { label, children }
    }

    fn canonicalize(&mut self) {
        for c in &mut self.children {
            c.canonicalize();
        }
        self.children.sort_unstable_by(node_order);
    }

    fn key_into(&self, out: &mut String) {
        out.push_str(&self.label.to_string());
        if !self.children.is_empty() {
            out.push('(');
            for (i, c) in self.children.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                c.key_into(out);
            }
            out.push(')');
        }
    }
}

/// Total order on canonicalized subtrees: larger labels first, then
/// lexicographically by child list.
fn node_order(a: &TreeNode, b: &TreeNode) -> Ordering {
    b.label
        .cmp(&a.label)
        .then_with(|| {
            for (x, y) in a.children.iter().zip(b.children.iter()) {
                let o = node_order(x, y);
                if o != Ordering::Equal {
                    return o;
                }
            }
            a.children.len().cmp(&b.children.len())
        })
}

/// A graded, labeled forest in canonical form.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MarkedForest {
    rank: usize,
    roots: Vec<TreeNode>,
}

impl MarkedForest {
    /// Validate and canonicalize a forest given by its root subtrees. The
    /// rank is inferred from the (uniform) leaf depth.
    pub fn new(mut roots: Vec<TreeNode>) -> Result<Self> {
        let rank = check(&roots)?;
        for r in &mut roots {
            r.canonicalize();
        }
        roots.sort_unstable_by(node_order);
        Ok(MarkedForest { rank, roots })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn roots(&self) -> &[TreeNode] {
        &self.roots
    }

    pub fn n(&self) -> u32 {
        self.roots.iter().map(|r| r.label).sum()
    }

    /// Re-run the structural checks on an existing value.
    pub fn is_valid(&self) -> bool {
        matches!(check(&self.roots), Ok(r) if r == self.rank)
    }

    /// Labels at the given height as a number partition. Height 0 is the
    /// leaf level, height `rank+1` the root level.
    pub fn level_partition(&self, height: usize) -> Result<NumberPartition> {
        if height > self.rank + 1 {
            return Err(Error::InvalidInput(format!(
                "height {} out of range for rank {}",
                height, self.rank
            )));
        }
        let depth = self.rank + 1 - height;
        let mut labels = Vec::new();
        collect_labels(&self.roots, depth, &mut labels);
        NumberPartition::new(labels)
    }

    /// The chain of level partitions from leaves to roots.
    pub fn level_partitions(&self) -> Vec<NumberPartition> {
        (0..=self.rank + 1)
            .map(|h| self.level_partition(h).unwrap())
            .collect()
    }

    /// The rank-0 forest spanned by the roots and the vertices of the given
    /// height; these are the vertices of the cell, one per height `0..=rank`.
    pub fn vertex_at(&self, height: usize) -> Result<MarkedForest> {
        if height > self.rank {
            return Err(Error::InvalidInput(format!(
                "vertex height {} out of range for rank {}",
                height, self.rank
            )));
        }
        let depth = self.rank + 1 - height;
        let roots = self
            .roots
            .iter()
            .map(|r| {
                let mut labels = Vec::new();
                collect_labels(std::slice::from_ref(r), depth, &mut labels);
                TreeNode::new(r.label, labels.into_iter().map(TreeNode::leaf).collect())
            })
            .collect();
        MarkedForest::new(roots)
    }

    /// Remove the whole level at the given height and regraft, producing a
    /// forest of rank one less.
    pub fn delete_level(&self, height: usize) -> Result<MarkedForest> {
        if self.rank == 0 {
            return Err(Error::InvalidInput(
                "cannot delete a level of a rank-0 forest".into(),
            ));
        }
        if height > self.rank {
            return Err(Error::InvalidInput(format!(
                "height {} out of range for rank {}",
                height, self.rank
            )));
        }
        let depth = self.rank + 1 - height;
        let roots = self.roots.iter().map(|r| splice(r, depth, 0)).collect();
        MarkedForest::new(roots)
    }

    /// The alternating sum of level deletions, terms combined on equal
    /// forests. Empty for rank 0, where the boundary is the augmentation.
    pub fn boundary(&self) -> Vec<(i64, MarkedForest)> {
        if self.rank == 0 {
            return Vec::new();
        }
        let mut acc: Vec<(i64, MarkedForest)> = Vec::new();
        for h in 0..=self.rank {
            let sign = if h % 2 == 0 { 1 } else { -1 };
            let face = self.delete_level(h).expect("face of a valid forest");
            match acc.iter_mut().find(|(_, f)| *f == face) {
                Some((c, _)) => *c += sign,
                None => acc.push((sign, face)),
            }
        }
        acc.retain(|(c, _)| *c != 0);
        acc
    }

    /// Deterministic encoding; equal exactly for isomorphic forests.
    pub fn canonical_key(&self) -> String {
        let mut out = String::new();
        for (i, r) in self.roots.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            r.key_into(&mut out);
        }
        out
    }
}

fn collect_labels(nodes: &[TreeNode], depth: usize, out: &mut Vec<u32>) {
    for node in nodes {
        if depth == 0 {
            out.push(node.label);
        } else {
            collect_labels(&node.children, depth - 1, out);
        }
    }
}

/// Rebuild a subtree with the level at `target` depth removed: each vertex
/// one above adopts its grandchildren (or becomes a leaf).
fn splice(node: &TreeNode, target: usize, depth: usize) -> TreeNode {
    if depth + 1 == target {
        let grandchildren = node
            .children
            .iter()
            .flat_map(|c| c.children.iter().cloned())
            .collect();
        TreeNode::new(node.label, grandchildren)
    } else {
        TreeNode::new(
            node.label,
            node.children.iter().map(|c| splice(c, target, depth + 1)).collect(),
        )
    }
}

/// Structural validation; returns the rank on success.
fn check(roots: &[TreeNode]) -> Result<usize> {
    if roots.is_empty() {
        return Err(Error::InvalidInput("a forest needs at least one root".into()));
    }
    let mut level_counts: Vec<usize> = Vec::new();
    fn walk(node: &TreeNode, depth: usize, counts: &mut Vec<usize>, leaf_depth: &mut Option<usize>) -> Result<()> {
        if counts.len() <= depth {
            counts.resize(depth + 1, 0);
        }
        counts[depth] += 1;
        if node.label == 0 {
            return Err(Error::InvalidInput("vertex labels must be positive".into()));
        }
        if node.children.is_empty() {
            match *leaf_depth {
                Some(d) if d != depth => {
                    return Err(Error::InvalidInput("leaves at unequal depths".into()))
                }
                _ => *leaf_depth = Some(depth),
            }
        } else {
            let sum: u32 = node.children.iter().map(|c| c.label).sum();
            if sum != node.label {
                return Err(Error::InvalidInput(format!(
                    "vertex labeled {} has children summing to {}",
                    node.label, sum
                )));
            }
            for c in &node.children {
                walk(c, depth + 1, counts, leaf_depth)?;
            }
        }
        Ok(())
    }
    let mut leaf_depth = None;
    for r in roots {
        walk(r, 0, &mut level_counts, &mut leaf_depth)?;
    }
    let d = leaf_depth.expect("nonempty forest has a leaf");
    if d == 0 {
        return Err(Error::InvalidInput(
            "roots cannot be leaves: a forest has at least two levels".into(),
        ));
    }
    if level_counts.len() != d + 1 {
        return Err(Error::InvalidInput("vertices below the leaf level".into()));
    }
    for w in level_counts.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::InvalidInput(format!(
                "level sizes must strictly increase from the roots down, got {:?}",
                level_counts
            )));
        }
    }
    Ok(d - 1)
}

impl fmt::Display for MarkedForest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical_key())
    }
}

#[derive(Serialize, Deserialize)]
struct NodeRepr {
    label: u32,
    children: Vec<NodeRepr>,
}

#[derive(Serialize, Deserialize)]
struct ForestRepr {
    rank: usize,
    roots: Vec<NodeRepr>,
}

fn to_repr(node: &TreeNode) -> NodeRepr {
    NodeRepr {
        label: node.label,
        children: node.children.iter().map(to_repr).collect(),
    }
}

fn from_repr(repr: NodeRepr) -> TreeNode {
    TreeNode {
        label: repr.label,
        children: repr.children.into_iter().map(from_repr).collect(),
    }
}

impl Serialize for MarkedForest {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ForestRepr {
            rank: self.rank,
            roots: self.roots.iter().map(to_repr).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MarkedForest {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = ForestRepr::deserialize(d)?;
        let forest = MarkedForest::new(repr.roots.into_iter().map(from_repr).collect())
            .map_err(D::Error::custom)?;
        if forest.rank() != repr.rank {
            return Err(D::Error::custom(format!(
                "declared rank {} but structure has rank {}",
                repr.rank,
                forest.rank()
            )));
        }
        Ok(forest)
    }
}

/// All marked forests of the given rank with root labels `mu` whose level
/// partitions all satisfy `admissible`, up to isomorphism.
pub fn enumerate_forests<F>(
    admissible: F,
    mu: &NumberPartition,
    rank: usize,
    guards: &Guards,
) -> Result<Vec<MarkedForest>>
where
    F: Fn(&NumberPartition) -> bool,
{
    let mut level: Vec<Vec<TreeNode>> = vec![mu.parts().iter().map(|&p| TreeNode::leaf(p)).collect()];
    for _ in 0..=rank {
        level = expand_level(&level, &admissible, guards)?;
        if level.is_empty() {
            return Ok(Vec::new());
        }
    }
    let mut out: Vec<MarkedForest> = level
        .into_iter()
        .map(MarkedForest::new)
        .collect::<Result<_>>()?;
    out.sort_unstable_by(forest_order);
    Ok(out)
}

fn forest_order(a: &MarkedForest, b: &MarkedForest) -> Ordering {
    for (x, y) in a.roots.iter().zip(b.roots.iter()) {
        let o = node_order(x, y);
        if o != Ordering::Equal {
            return o;
        }
    }
    a.roots.len().cmp(&b.roots.len())
}

/// Attach one more level below the current leaves of every structure,
/// in every admissible way, deduplicating up to isomorphism.
fn expand_level<F>(
    current: &[Vec<TreeNode>],
    admissible: &F,
    guards: &Guards,
) -> Result<Vec<Vec<TreeNode>>>
where
    F: Fn(&NumberPartition) -> bool,
{
    let mut seen: HashSet<Vec<TreeNode>> = HashSet::new();
    let mut out = Vec::new();
    for roots in current {
        let old_leaves = count_leaves(roots);
        for mut candidate in grow(roots) {
            let mut labels = Vec::new();
            let mut new_leaves = 0usize;
            for r in &candidate {
                collect_leaf_labels(r, &mut labels, &mut new_leaves);
            }
            // At least one vertex must split.
            if new_leaves <= old_leaves {
                continue;
            }
            let partition = NumberPartition::new(labels)?;
            if !admissible(&partition) {
                continue;
            }
            for r in &mut candidate {
                r.canonicalize();
            }
            candidate.sort_unstable_by(node_order);
            if seen.insert(candidate.clone()) {
                if seen.len() as u64 > guards.max_cells {
                    return Err(Error::GuardExceeded(format!(
                        "more than {} forests at one rank",
                        guards.max_cells
                    )));
                }
                out.push(candidate);
            }
        }
    }
    Ok(out)
}

fn count_leaves(roots: &[TreeNode]) -> usize {
    fn rec(node: &TreeNode, acc: &mut usize) {
        if node.children.is_empty() {
            *acc += 1;
        } else {
            for c in &node.children {
                rec(c, acc);
            }
        }
    }
    let mut acc = 0;
    for r in roots {
        rec(r, &mut acc);
    }
    acc
}

fn collect_leaf_labels(node: &TreeNode, labels: &mut Vec<u32>, count: &mut usize) {
    if node.children.is_empty() {
        labels.push(node.label);
        *count += 1;
    } else {
        for c in &node.children {
            collect_leaf_labels(c, labels, count);
        }
    }
}

/// Every way of giving each current leaf a set of children realizing a
/// partition of its label.
fn grow(roots: &[TreeNode]) -> Vec<Vec<TreeNode>> {
    fn grow_node(node: &TreeNode) -> Vec<TreeNode> {
        if node.children.is_empty() {
            NumberPartition::all(node.label)
                .into_iter()
                .map(|p| {
                    TreeNode::new(
                        node.label,
                        p.parts().iter().map(|&x| TreeNode::leaf(x)).collect(),
                    )
                })
                .collect()
        } else {
            grow_list(&node.children)
                .into_iter()
                .map(|cs| TreeNode::new(node.label, cs))
                .collect()
        }
    }
    fn grow_list(nodes: &[TreeNode]) -> Vec<Vec<TreeNode>> {
        let mut acc: Vec<Vec<TreeNode>> = vec![Vec::new()];
        for node in nodes {
            let options = grow_node(node);
            let mut next = Vec::with_capacity(acc.len() * options.len());
            for prefix in &acc {
                for opt in &options {
                    let mut row = prefix.clone();
                    row.push(opt.clone());
                    next.push(row);
                }
            }
            acc = next;
        }
        acc
    }
    grow_list(roots)
}

/// The cell structure of one of the triangulated spaces: cells of dimension
/// `r` are the admissible forests of rank `r`, faces delete a level.
pub struct CellComplex {
    pub mu: NumberPartition,
    /// Cells per dimension, each list sorted canonically.
    pub dims: Vec<Vec<MarkedForest>>,
    /// `faces[r][c][h]` is the index in `dims[r-1]` of `delete_level(c, h)`.
    pub faces: Vec<Vec<Vec<usize>>>,
    index: Vec<HashMap<MarkedForest, usize>>,
}

impl CellComplex {
    /// Build the full complex for an admissibility predicate on level
    /// partitions, enumerating every rank until none survive.
    pub fn build<F>(admissible: F, mu: &NumberPartition, guards: &Guards) -> Result<CellComplex>
    where
        F: Fn(&NumberPartition) -> bool,
    {
        let mut dims: Vec<Vec<MarkedForest>> = Vec::new();
        let mut level: Vec<Vec<TreeNode>> =
            vec![mu.parts().iter().map(|&p| TreeNode::leaf(p)).collect()];
        let mut total = 0u64;
        loop {
            level = expand_level(&level, &admissible, guards)?;
            if level.is_empty() {
                break;
            }
            let mut cells: Vec<MarkedForest> = level
                .iter()
                .cloned()
                .map(MarkedForest::new)
                .collect::<Result<_>>()?;
            cells.sort_unstable_by(forest_order);
            total += cells.len() as u64;
            if total > guards.max_cells {
                return Err(Error::GuardExceeded(format!(
                    "complex exceeds {} cells",
                    guards.max_cells
                )));
            }
            dims.push(cells);
        }
        let index: Vec<HashMap<MarkedForest, usize>> = dims
            .iter()
            .map(|cells| {
                cells
                    .iter()
                    .enumerate()
                    .map(|(i, f)| (f.clone(), i))
                    .collect()
            })
            .collect();
        let mut faces: Vec<Vec<Vec<usize>>> = Vec::with_capacity(dims.len());
        for (r, cells) in dims.iter().enumerate() {
            let mut per_cell = Vec::with_capacity(cells.len());
            for cell in cells {
                let mut fs = Vec::with_capacity(r);
                if r >= 1 {
                    for h in 0..=r {
                        let face = cell.delete_level(h)?;
                        let idx = index[r - 1].get(&face).copied().ok_or_else(|| {
                            Error::Inconsistency(format!(
                                "face {} of cell {} missing from the complex",
                                face.canonical_key(),
                                cell.canonical_key()
                            ))
                        })?;
                        fs.push(idx);
                    }
                }
                per_cell.push(fs);
            }
            faces.push(per_cell);
        }
        Ok(CellComplex {
            mu: mu.clone(),
            dims,
            faces,
            index,
        })
    }

    /// The space attached to `λ ⊢ μ`: level partitions must be coarsenings
    /// of `λ`. Empty when `λ = μ`.
    pub fn x_lambda_mu(
        lambda: &NumberPartition,
        mu: &NumberPartition,
        guards: &Guards,
    ) -> Result<CellComplex> {
        if !lambda.refines(mu)? {
            return Err(Error::InvalidInput(format!(
                "{} does not refine {}",
                lambda, mu
            )));
        }
        let cache = std::cell::RefCell::new(HashMap::<NumberPartition, bool>::new());
        let lambda = lambda.clone();
        CellComplex::build(
            move |tau| {
                let mut cache = cache.borrow_mut();
                if let Some(&v) = cache.get(tau) {
                    return v;
                }
                let v = lambda.refines(tau).unwrap_or(false);
                cache.insert(tau.clone(), v);
                v
            },
            mu,
            guards,
        )
    }

    /// The space attached to a family Λ of level partitions and root labels
    /// `μ`: every level partition must lie in the family.
    pub fn x_family_mu(
        family: &std::collections::BTreeSet<NumberPartition>,
        mu: &NumberPartition,
        guards: &Guards,
    ) -> Result<CellComplex> {
        let n = mu.n();
        if let Some(bad) = family.iter().find(|p| p.n() != n) {
            return Err(Error::InvalidInput(format!(
                "family member {} does not partition {}",
                bad, n
            )));
        }
        let family = family.clone();
        CellComplex::build(move |tau| family.contains(tau), mu, guards)
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    /// Largest dimension with cells, or None when empty.
    pub fn top_dim(&self) -> Option<usize> {
        self.dims.len().checked_sub(1)
    }

    pub fn cell_counts(&self) -> Vec<usize> {
        self.dims.iter().map(|d| d.len()).collect()
    }

    pub fn total_cells(&self) -> usize {
        self.dims.iter().map(|d| d.len()).sum()
    }

    pub fn find(&self, dim: usize, f: &MarkedForest) -> Option<usize> {
        self.index.get(dim)?.get(f).copied()
    }

    /// Indices into `dims[0]` of each cell's vertices, by level.
    pub fn vertex_table(&self) -> Result<Vec<Vec<Vec<usize>>>> {
        let mut out = Vec::with_capacity(self.dims.len());
        for (r, cells) in self.dims.iter().enumerate() {
            let mut rows = Vec::with_capacity(cells.len());
            for cell in cells {
                let mut vs = Vec::with_capacity(r + 1);
                for h in 0..=r {
                    let v = cell.vertex_at(h)?;
                    let idx = self.find(0, &v).ok_or_else(|| {
                        Error::Inconsistency(format!(
                            "vertex {} of cell {} missing from the complex",
                            v.canonical_key(),
                            cell.canonical_key()
                        ))
                    })?;
                    vs.push(idx);
                }
                rows.push(vs);
            }
            out.push(rows);
        }
        Ok(out)
    }

    /// For each cell, the list of `(coface index, deleted height)` pairs one
    /// dimension up.
    pub fn coface_table(&self) -> Vec<Vec<Vec<(usize, usize)>>> {
        let mut out: Vec<Vec<Vec<(usize, usize)>>> = self
            .dims
            .iter()
            .map(|cells| vec![Vec::new(); cells.len()])
            .collect();
        for r in 1..self.dims.len() {
            for (c, fs) in self.faces[r].iter().enumerate() {
                for (h, &f) in fs.iter().enumerate() {
                    out[r - 1][f].push((c, h));
                }
            }
        }
        out
    }

    /// The boundary matrices with alternating signs, checked to square to
    /// zero, together with the augmentation.
    pub fn chain_complex(&self) -> Result<ChainComplex> {
        let counts = self.cell_counts();
        let mut boundaries: Vec<Vec<(usize, usize, i64)>> = Vec::new();
        for r in 1..self.dims.len() {
            let mut trips = Vec::new();
            for (c, fs) in self.faces[r].iter().enumerate() {
                for (h, &f) in fs.iter().enumerate() {
                    let sign = if h % 2 == 0 { 1 } else { -1 };
                    trips.push((f, c, sign));
                }
            }
            boundaries.push(trips);
        }
        ChainComplex::from_boundaries(&counts, boundaries)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Guards;

    fn np(s: &str) -> NumberPartition {
        s.parse().unwrap()
    }

    fn leafy(label: u32, kids: &[u32]) -> TreeNode {
        TreeNode::new(label, kids.iter().map(|&k| TreeNode::leaf(k)).collect())
    }

    #[test]
    fn validation_examples() {
        // Rank 0, roots (3,2), leaves (2,1 | 1,1).
        assert!(MarkedForest::new(vec![leafy(3, &[2, 1]), leafy(2, &[1, 1])]).is_ok());
        // Label coherence violated: 4 != 2 + 1.
        assert!(MarkedForest::new(vec![leafy(4, &[2, 1])]).is_err());
        // No split between two consecutive levels.
        let stalled = TreeNode::new(3, vec![TreeNode::new(3, vec![TreeNode::leaf(2), TreeNode::leaf(1)])]);
        let grown = TreeNode::new(
            3,
            vec![TreeNode::new(2, vec![TreeNode::leaf(1), TreeNode::leaf(1)]), TreeNode::new(1, vec![TreeNode::leaf(1)])],
        );
        assert!(MarkedForest::new(vec![stalled]).is_err());
        assert!(MarkedForest::new(vec![grown]).is_ok());
        // Leaves at unequal depths.
        let ragged = TreeNode::new(3, vec![TreeNode::new(2, vec![TreeNode::leaf(1), TreeNode::leaf(1)]), TreeNode::leaf(1)]);
        assert!(MarkedForest::new(vec![ragged]).is_err());
    }

    #[test]
    fn canonical_key_ignores_presentation_order() {
        let a = MarkedForest::new(vec![leafy(3, &[2, 1]), leafy(2, &[1, 1])]).unwrap();
        let b = MarkedForest::new(vec![leafy(2, &[1, 1]), leafy(3, &[1, 2])]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.canonical_key(), b.canonical_key());
        let c = MarkedForest::new(vec![leafy(3, &[1, 1, 1]), leafy(2, &[2])]).unwrap();
        assert_ne!(a.canonical_key(), c.canonical_key());
        assert_eq!(a.canonical_key(), "3(2,1),2(1,1)");
    }

    #[test]
    fn level_partitions_of_example_tree() {
        // Root 5 over (3,2), then (3,1,1), then leaves (2,1,1,1).
        let tree = TreeNode::new(
            5,
            vec![
                TreeNode::new(3, vec![TreeNode::new(3, vec![TreeNode::leaf(2), TreeNode::leaf(1)])]),
                TreeNode::new(2, vec![TreeNode::new(1, vec![TreeNode::leaf(1)]), TreeNode::new(1, vec![TreeNode::leaf(1)])]),
            ],
        );
        let f = MarkedForest::new(vec![tree]).unwrap();
        assert_eq!(f.rank(), 2);
        assert_eq!(f.level_partition(0).unwrap(), np("2,1,1,1"));
        assert_eq!(f.level_partition(1).unwrap(), np("3,1,1"));
        assert_eq!(f.level_partition(2).unwrap(), np("3,2"));
        assert_eq!(f.level_partition(3).unwrap(), np("5"));
        assert!(f.level_partition(4).is_err());
        let chain = f.level_partitions();
        for w in chain.windows(2) {
            assert!(w[0].refines(&w[1]).unwrap());
        }
    }

    #[test]
    fn delete_level_examples() {
        let f = MarkedForest::new(vec![TreeNode::new(
            4,
            vec![
                TreeNode::new(3, vec![TreeNode::leaf(2), TreeNode::leaf(1)]),
                TreeNode::new(1, vec![TreeNode::leaf(1)]),
            ],
        )])
        .unwrap();
        assert_eq!(f.rank(), 1);
        let no_leaves = f.delete_level(0).unwrap();
        assert_eq!(no_leaves.level_partition(0).unwrap(), np("3,1"));
        let spliced = f.delete_level(1).unwrap();
        assert_eq!(spliced.level_partition(0).unwrap(), np("2,1,1"));
        assert!(f.delete_level(2).is_err());
        assert!(no_leaves.delete_level(0).is_err());
    }

    #[test]
    fn delete_level_commutes() {
        for n in 3..=6u32 {
            for lambda in NumberPartition::all(n) {
                for mu in lambda.coarsenings() {
                    let cx = CellComplex::x_lambda_mu(&lambda, &mu, &Guards::default()).unwrap();
                    for cells in cx.dims.iter().skip(2) {
                        for f in cells {
                            let r = f.rank();
                            for i in 1..=r {
                                for j in 0..i {
                                    let a = f.delete_level(i).unwrap().delete_level(j).unwrap();
                                    let b = f.delete_level(j).unwrap().delete_level(i - 1).unwrap();
                                    assert_eq!(a, b, "cell {} i={} j={}", f.canonical_key(), i, j);
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn boundary_of_rank_one_has_two_faces() {
        let f = MarkedForest::new(vec![TreeNode::new(
            4,
            vec![
                TreeNode::new(3, vec![TreeNode::leaf(2), TreeNode::leaf(1)]),
                TreeNode::new(1, vec![TreeNode::leaf(1)]),
            ],
        )])
        .unwrap();
        let b = f.boundary();
        assert_eq!(b.len(), 2);
        assert_eq!(b[0].0 + b[1].0, 0);
        let faces: Vec<&MarkedForest> = b.iter().map(|(_, g)| g).collect();
        assert!(faces.contains(&&f.delete_level(0).unwrap()));
        assert!(faces.contains(&&f.delete_level(1).unwrap()));
    }

    #[test]
    fn five_trees_of_rank_two() {
        let forests =
            enumerate_forests(|t| np("2,1,1,1").refines(t).unwrap(), &np("5"), 2, &Guards::default())
                .unwrap();
        assert_eq!(forests.len(), 5);
        for f in &forests {
            assert!(f.is_valid());
            assert_eq!(f.level_partition(0).unwrap(), np("2,1,1,1"));
        }
    }

    #[test]
    fn rank_zero_counts_follow_partition_numbers() {
        for n in 3..=8u32 {
            let lambda = NumberPartition::special(2, 1, n - 2).unwrap();
            let mu = NumberPartition::single(n);
            let got = enumerate_forests(
                |t| lambda.refines(t).unwrap(),
                &mu,
                0,
                &Guards::default(),
            )
            .unwrap();
            let p = NumberPartition::all(n).len();
            assert_eq!(got.len(), p - 2, "n = {}", n);
        }
    }

    #[test]
    fn enumeration_beyond_top_dimension_is_empty() {
        let lambda = np("7,6,4,3,2,1");
        let mu = np("10,8,5");
        // Top dimension is l(lambda) - l(mu) - 1 = 2.
        let too_deep =
            enumerate_forests(|t| lambda.refines(t).unwrap(), &mu, 3, &Guards::default()).unwrap();
        assert!(too_deep.is_empty());
        let top =
            enumerate_forests(|t| lambda.refines(t).unwrap(), &mu, 2, &Guards::default()).unwrap();
        assert!(!top.is_empty());
    }

    #[test]
    fn no_duplicate_keys_and_faces_enumerated() {
        for n in 3..=6u32 {
            for lambda in NumberPartition::all(n) {
                for mu in lambda.coarsenings() {
                    let cx = CellComplex::x_lambda_mu(&lambda, &mu, &Guards::default()).unwrap();
                    for (r, cells) in cx.dims.iter().enumerate() {
                        let keys: HashSet<String> =
                            cells.iter().map(|f| f.canonical_key()).collect();
                        assert_eq!(keys.len(), cells.len());
                        // Closure under faces comes from CellComplex::build succeeding.
                        if r >= 1 {
                            for fs in &cx.faces[r] {
                                assert_eq!(fs.len(), r + 1);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn complex_for_figure_counts() {
        let cx = CellComplex::x_lambda_mu(&np("2,1,1,1"), &np("5"), &Guards::default()).unwrap();
        assert_eq!(cx.cell_counts(), vec![5, 9, 5]);
    }

    #[test]
    fn empty_complex_when_mu_equals_lambda() {
        let cx = CellComplex::x_lambda_mu(&np("2,1"), &np("2,1"), &Guards::default()).unwrap();
        assert!(cx.is_empty());
    }

    #[test]
    fn json_round_trip() {
        let f = MarkedForest::new(vec![leafy(3, &[2, 1]), leafy(2, &[1, 1])]).unwrap();
        let json = serde_json::to_string(&f).unwrap();
        assert!(json.contains("\"rank\":0"));
        let back: MarkedForest = serde_json::from_str(&json).unwrap();
        assert_eq!(back, f);
        // Declared rank must match the structure.
        let bad = json.replace("\"rank\":0", "\"rank\":1");
        assert!(serde_json::from_str::<MarkedForest>(&bad).is_err());
        // Invalid labels rejected.
        let broken = r#"{"rank":0,"roots":[{"label":4,"children":[{"label":2,"children":[]},{"label":1,"children":[]}]}]}"#;
        assert!(serde_json::from_str::<MarkedForest>(broken).is_err());
    }
}
