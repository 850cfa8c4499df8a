//! Discrete Morse machinery for the forest complexes.
//!
//! A matching pairs cells with cofaces so that no alternating sequence
//! closes up; an acyclic matching that is perfect away from a subcomplex
//! certifies a sequence of collapses onto it. Two constructions are
//! provided. The insertion matching is driven by a vertex scheme: vertices
//! are linearly ordered extending decreasing length, each vertex outside the
//! subcomplex points to a representative inside it, and a cell is matched
//! with the unique coface obtained by inserting the representative of its
//! first outside vertex. The cone matching is the degenerate scheme whose
//! subcomplex is a single apex vertex.
//!
//! The collapsibility pipeline runs the insertion matching with the scheme
//! `v -> gamma_k(v)` against the subcomplex spanned by partitions with all
//! parts 1 or k, checks the shape of that subcomplex, and confirms
//! acyclicity of the homology independently.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::Serialize;

use crate::chain_complex::BettiVector;
use crate::forests::{CellComplex, MarkedForest, TreeNode};
use crate::partitions::NumberPartition;
use crate::{Error, Guards, Result};

/// A cell addressed as (dimension, index).
pub type Cell = (usize, usize);

/// A matching on the cells outside a subcomplex, each pair a cell and one
/// of its cofaces.
#[derive(Clone, Debug)]
pub struct MorseMatching {
    pub pairs: Vec<(Cell, Cell)>,
    /// The cells the matching must cover exactly.
    pub domain: Vec<Cell>,
}

/// Check the cover condition and perfection, then decide acyclicity by a
/// depth-first search for a closed alternating sequence.
pub fn verify_acyclic(cx: &CellComplex, matching: &MorseMatching) -> Result<bool> {
    let domain: HashSet<Cell> = matching.domain.iter().copied().collect();
    let mut seen: HashSet<Cell> = HashSet::new();
    let mut lower_of: HashMap<Cell, usize> = HashMap::new();
    for (p, &(lo, hi)) in matching.pairs.iter().enumerate() {
        if hi.0 != lo.0 + 1 {
            return Err(Error::InvalidInput(format!(
                "pair ({:?}, {:?}) is not a cover",
                lo, hi
            )));
        }
        if !cx.faces[hi.0][hi.1].contains(&lo.1) {
            return Err(Error::InvalidInput(format!(
                "{:?} is not a face of {:?}",
                lo, hi
            )));
        }
        if !domain.contains(&lo) || !domain.contains(&hi) {
            return Err(Error::InvalidInput("pair leaves the domain".into()));
        }
        if !seen.insert(lo) || !seen.insert(hi) {
            return Err(Error::InvalidInput("cell matched twice".into()));
        }
        lower_of.insert(lo, p);
    }
    if seen.len() != domain.len() {
        return Err(Error::InvalidInput(format!(
            "matching covers {} of {} cells",
            seen.len(),
            domain.len()
        )));
    }

    // Directed graph on pairs: an arc when the upper cell of one pair has
    // the lower cell of another as a face.
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); matching.pairs.len()];
    for (p, &(lo, hi)) in matching.pairs.iter().enumerate() {
        for &f in &cx.faces[hi.0][hi.1] {
            let cell = (hi.0 - 1, f);
            if cell != lo {
                if let Some(&q) = lower_of.get(&cell) {
                    adj[p].push(q);
                }
            }
        }
    }
    // 0 unvisited, 1 on stack, 2 done.
    let mut state = vec![0u8; adj.len()];
    for start in 0..adj.len() {
        if state[start] != 0 {
            continue;
        }
        let mut stack: Vec<(usize, usize)> = vec![(start, 0)];
        state[start] = 1;
        while let Some(&mut (node, ref mut next)) = stack.last_mut() {
            if *next < adj[node].len() {
                let target = adj[node][*next];
                *next += 1;
                match state[target] {
                    0 => {
                        state[target] = 1;
                        stack.push((target, 0));
                    }
                    1 => return Ok(false),
                    _ => {}
                }
            } else {
                state[node] = 2;
                stack.pop();
            }
        }
    }
    Ok(true)
}

/// A linear order on the vertices extending decreasing length, a subcomplex
/// vertex set, and a representative in the subcomplex for every vertex.
pub struct VertexScheme {
    /// Position of each vertex in the order; smaller comes first.
    pub position: Vec<usize>,
    pub in_subcomplex: Vec<bool>,
    pub representative: Vec<usize>,
}

fn vertex_order(cx: &CellComplex) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..cx.dims[0].len()).collect();
    idx.sort_unstable_by_key(|&v| {
        let f = &cx.dims[0][v];
        (
            std::cmp::Reverse(f.level_partition(0).unwrap().len()),
            f.canonical_key(),
        )
    });
    let mut position = vec![0usize; idx.len()];
    for (p, &v) in idx.iter().enumerate() {
        position[v] = p;
    }
    position
}

fn validate_scheme(cx: &CellComplex, scheme: &VertexScheme) -> Result<()> {
    let nv = cx.dims[0].len();
    if scheme.position.len() != nv
        || scheme.in_subcomplex.len() != nv
        || scheme.representative.len() != nv
    {
        return Err(Error::InvalidInput("scheme tables sized to the vertex set".into()));
    }
    for v in 0..nv {
        let z = scheme.representative[v];
        if !scheme.in_subcomplex[z] {
            return Err(Error::Inconsistency(format!(
                "representative of vertex {} lies outside the subcomplex",
                cx.dims[0][v].canonical_key()
            )));
        }
        if scheme.in_subcomplex[v] && z != v {
            return Err(Error::InvalidInput(
                "subcomplex vertices must represent themselves".into(),
            ));
        }
        if !scheme.in_subcomplex[v] && scheme.position[z] >= scheme.position[v] {
            return Err(Error::Inconsistency(format!(
                "representative {} does not precede {}",
                cx.dims[0][z].canonical_key(),
                cx.dims[0][v].canonical_key()
            )));
        }
    }
    Ok(())
}

/// Scheme for the collapsibility pipeline: the subcomplex is spanned by the
/// vertices whose partition has all parts 1 or k, and every other vertex
/// points to its leafwise k-split.
pub fn special_scheme(cx: &CellComplex, k: u32) -> Result<VertexScheme> {
    if k < 2 {
        return Err(Error::InvalidInput("k must be at least 2".into()));
    }
    let position = vertex_order(cx);
    let nv = cx.dims[0].len();
    let mut in_subcomplex = vec![false; nv];
    let mut representative = vec![0usize; nv];
    for v in 0..nv {
        let f = &cx.dims[0][v];
        if f.level_partition(0)?.is_special(k) {
            in_subcomplex[v] = true;
            representative[v] = v;
        } else {
            let g = gamma_vertex(f, k)?;
            representative[v] = cx.find(0, &g).ok_or_else(|| {
                Error::Inconsistency(format!(
                    "k-split vertex {} missing from the complex; family not closed",
                    g.canonical_key()
                ))
            })?;
        }
    }
    let scheme = VertexScheme {
        position,
        in_subcomplex,
        representative,
    };
    validate_scheme(cx, &scheme)?;
    Ok(scheme)
}

/// Degenerate scheme: subcomplex is one apex vertex representing everything.
pub fn cone_scheme(cx: &CellComplex, apex: usize) -> Result<VertexScheme> {
    let position = vertex_order(cx);
    let nv = cx.dims[0].len();
    let scheme = VertexScheme {
        position,
        in_subcomplex: (0..nv).map(|v| v == apex).collect(),
        representative: vec![apex; nv],
    };
    validate_scheme(cx, &scheme)?;
    Ok(scheme)
}

/// Split every leaf of a rank-0 forest into parts k and 1, as many k's as
/// possible, keeping the root structure.
pub fn gamma_vertex(v: &MarkedForest, k: u32) -> Result<MarkedForest> {
    if v.rank() != 0 {
        return Err(Error::InvalidInput("gamma acts on vertices (rank-0 forests)".into()));
    }
    let roots = v
        .roots()
        .iter()
        .map(|r| {
            let mut children = Vec::new();
            for c in &r.children {
                let q = c.label / k;
                let rem = c.label % k;
                children.extend(std::iter::repeat(TreeNode::leaf(k)).take(q as usize));
                children.extend(std::iter::repeat(TreeNode::leaf(1)).take(rem as usize));
            }
            TreeNode::new(r.label, children)
        })
        .collect();
    MarkedForest::new(roots)
}

/// Outcome of building the insertion matching.
pub struct InsertionMatching {
    pub matching: MorseMatching,
    /// Cells of the subcomplex (untouched by the matching).
    pub critical: Vec<Cell>,
}

/// Build the matching of the unique-insertion construction over the cells
/// outside the subcomplex induced by the scheme, restricted to the member
/// cells when a membership table is given. Verifies the insertion is unique,
/// the matching perfect, the first-outside-vertex index monotone along
/// pairs, and the whole matching acyclic.
pub fn build_insertion_matching(
    cx: &CellComplex,
    scheme: &VertexScheme,
    member: Option<&[Vec<bool>]>,
) -> Result<InsertionMatching> {
    let vtab = cx.vertex_table()?;
    let cofaces = cx.coface_table();
    let is_member = |cell: Cell| -> bool {
        member.map_or(true, |m| m[cell.0][cell.1])
    };

    // First level (from the leaves) whose vertex is outside the subcomplex.
    let xi = |cell: Cell| -> Option<usize> {
        vtab[cell.0][cell.1]
            .iter()
            .position(|&v| !scheme.in_subcomplex[v])
    };

    let mut domain = Vec::new();
    let mut in_u = Vec::new();
    for r in 0..cx.dims.len() {
        for c in 0..cx.dims[r].len() {
            let cell = (r, c);
            if !is_member(cell) {
                continue;
            }
            let Some(h) = xi(cell) else { continue };
            domain.push(cell);
            let chi = scheme.representative[vtab[r][c][h]];
            if h == 0 || vtab[r][c][h - 1] != chi {
                in_u.push((cell, h, chi));
            }
        }
    }

    let mut pairs = Vec::with_capacity(in_u.len());
    for &(cell, h, chi) in &in_u {
        let mut found: Option<Cell> = None;
        for &(up, del) in &cofaces[cell.0][cell.1] {
            let upper = (cell.0 + 1, up);
            if del != h || !is_member(upper) {
                continue;
            }
            if vtab[upper.0][upper.1][h] != chi {
                continue;
            }
            if found.is_some() {
                return Err(Error::Inconsistency(format!(
                    "two insertions of {} into {}",
                    cx.dims[0][chi].canonical_key(),
                    cx.dims[cell.0][cell.1].canonical_key()
                )));
            }
            found = Some(upper);
        }
        let upper = found.ok_or_else(|| {
            Error::Inconsistency(format!(
                "no insertion of {} into {}",
                cx.dims[0][chi].canonical_key(),
                cx.dims[cell.0][cell.1].canonical_key()
            ))
        })?;
        // The first outside vertex moves up by exactly one level.
        match xi(upper) {
            Some(hu) if hu == h + 1 => {}
            _ => {
                return Err(Error::Inconsistency(
                    "insertion does not shift the first outside vertex".into(),
                ))
            }
        }
        pairs.push((cell, upper));
    }

    // Monotonicity along cover alternations.
    let u_index: HashMap<Cell, usize> = in_u.iter().map(|&(cell, h, _)| (cell, h)).collect();
    for &(cell, upper) in &pairs {
        let h_up = xi(upper).expect("upper cell has an outside vertex");
        for &f in &cx.faces[upper.0][upper.1] {
            let face = (upper.0 - 1, f);
            if face == cell {
                continue;
            }
            if let Some(&hf) = u_index.get(&face) {
                if hf < h_up {
                    return Err(Error::Inconsistency(
                        "first-outside-vertex index drops along a cover".into(),
                    ));
                }
            }
        }
    }

    let matching = MorseMatching {
        pairs,
        domain,
    };
    if !verify_acyclic(cx, &matching)? {
        return Err(Error::Inconsistency("insertion matching has a cycle".into()));
    }
    let critical = (0..cx.dims.len())
        .flat_map(|r| (0..cx.dims[r].len()).map(move |c| (r, c)))
        .filter(|&cell| is_member(cell) && xi(cell).is_none())
        .collect();
    Ok(InsertionMatching {
        matching,
        critical,
    })
}

/// Match every member cell avoiding the apex with its unique member coface
/// through the apex, wherever the apex's level sits. This is the collapse
/// of a cone onto its apex; existence and uniqueness of the coface is
/// exactly the cone property and is verified cell by cell.
pub fn cone_matching(
    cx: &CellComplex,
    apex: usize,
    member: Option<&[Vec<bool>]>,
) -> Result<InsertionMatching> {
    let vtab = cx.vertex_table()?;
    let cofaces = cx.coface_table();
    let is_member = |cell: Cell| -> bool { member.map_or(true, |m| m[cell.0][cell.1]) };
    if !is_member((0, apex)) {
        return Err(Error::InvalidInput("apex outside the subcomplex".into()));
    }
    let mut pairs = Vec::new();
    let mut domain = Vec::new();
    for r in 0..cx.dims.len() {
        for c in 0..cx.dims[r].len() {
            let cell = (r, c);
            if !is_member(cell) || cell == (0, apex) {
                continue;
            }
            domain.push(cell);
            if vtab[r][c].contains(&apex) {
                continue;
            }
            let mut found: Option<Cell> = None;
            for &(up, h) in &cofaces[r][c] {
                let upper = (r + 1, up);
                if !is_member(upper) || vtab[upper.0][upper.1][h] != apex {
                    continue;
                }
                if found.is_some() {
                    return Err(Error::Inconsistency(format!(
                        "two cofaces of {} through the apex",
                        cx.dims[r][c].canonical_key()
                    )));
                }
                found = Some(upper);
            }
            let upper = found.ok_or_else(|| {
                Error::Inconsistency(format!(
                    "no coface of {} through the apex",
                    cx.dims[r][c].canonical_key()
                ))
            })?;
            pairs.push((cell, upper));
        }
    }
    let matching = MorseMatching { pairs, domain };
    if !verify_acyclic(cx, &matching)? {
        return Err(Error::Inconsistency("cone matching has a cycle".into()));
    }
    Ok(InsertionMatching {
        matching,
        critical: vec![(0, apex)],
    })
}

/// True when `gamma_k` keeps every member inside the family.
pub fn gamma_closed(family: &BTreeSet<NumberPartition>, k: u32) -> Result<bool> {
    let Some(first) = family.iter().next() else {
        return Ok(true);
    };
    let n = first.n();
    for p in family {
        if p.n() != n {
            return Err(Error::InvalidInput("family members partition different totals".into()));
        }
        if p.is_all_ones() || p.is_single() {
            return Err(Error::InvalidInput(format!(
                "family may not contain {}",
                p
            )));
        }
    }
    for p in family {
        if !family.contains(&p.gamma_k(k)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Shape certified for the subcomplex of all-special cells.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SubcomplexShape {
    Simplex,
    Cone,
    Empty,
}

/// Certificate that the family complex collapses to a point.
#[derive(Clone, Debug, Serialize)]
pub struct CollapseCertificate {
    pub mu: NumberPartition,
    pub k: u32,
    pub family_size: usize,
    pub cell_counts: Vec<usize>,
    pub matched: usize,
    pub critical: usize,
    pub shape: SubcomplexShape,
    pub apex: Option<String>,
    pub acyclic: bool,
    pub betti_zero: bool,
}

/// Run the full collapse: the insertion matching from the complex onto the
/// all-special subcomplex, a shape certificate for that subcomplex (simplex,
/// or cone over the unique k-split of μ), a combined acyclic matching
/// collapsing everything to one vertex, and an independent homology check.
pub fn collapse_pipeline(
    family: &BTreeSet<NumberPartition>,
    mu: &NumberPartition,
    k: u32,
    guards: &Guards,
) -> Result<CollapseCertificate> {
    if !gamma_closed(family, k)? {
        return Err(Error::InvalidInput(format!(
            "family is not closed under splitting parts into {}'s and 1's",
            k
        )));
    }
    if !family.contains(mu) && !mu.is_single() {
        return Err(Error::InvalidInput(format!(
            "mu = {} must lie in the family or be the one-part partition",
            mu
        )));
    }
    let cx = CellComplex::x_family_mu(family, mu, guards)?;
    if cx.is_empty() {
        return Ok(CollapseCertificate {
            mu: mu.clone(),
            k,
            family_size: family.len(),
            cell_counts: vec![],
            matched: 0,
            critical: 0,
            shape: SubcomplexShape::Empty,
            apex: None,
            acyclic: true,
            betti_zero: false,
        });
    }

    let scheme = special_scheme(&cx, k)?;
    let main = build_insertion_matching(&cx, &scheme, None)?;

    // Membership table for the all-special subcomplex.
    let vtab = cx.vertex_table()?;
    let member: Vec<Vec<bool>> = (0..cx.dims.len())
        .map(|r| {
            (0..cx.dims[r].len())
                .map(|c| vtab[r][c].iter().all(|&v| scheme.in_subcomplex[v]))
                .collect()
        })
        .collect();
    let k_counts: Vec<usize> = member
        .iter()
        .map(|row| row.iter().filter(|&&b| b).count())
        .collect();
    let k_vertices: Vec<usize> = (0..cx.dims[0].len())
        .filter(|&v| scheme.in_subcomplex[v])
        .collect();
    if k_vertices.is_empty() {
        return Err(Error::Inconsistency(
            "nonempty complex with no special vertices".into(),
        ));
    }

    let simplex_expected = mu.is_single() || &mu.gamma_k(k)? == mu;
    let shape = if simplex_expected {
        // Every subset of the vertex chain spans exactly one cell.
        let v = k_vertices.len();
        for (d, &count) in k_counts.iter().enumerate() {
            if count != binomial(v, d + 1) {
                return Err(Error::Inconsistency(format!(
                    "expected a simplex on {} vertices but found {} cells in dimension {}",
                    v, count, d
                )));
            }
        }
        SubcomplexShape::Simplex
    } else {
        SubcomplexShape::Cone
    };

    // Collapse the subcomplex to its apex: the k-split of μ in the cone
    // case, which must be the unique vertex of that partition; any simplex
    // is a cone over its first vertex.
    let apex = if shape == SubcomplexShape::Cone {
        let target = mu.gamma_k(k)?;
        let candidates: Vec<usize> = (0..cx.dims[0].len())
            .filter(|&v| cx.dims[0][v].level_partition(0).unwrap() == target)
            .collect();
        if candidates.len() != 1 {
            return Err(Error::Inconsistency(format!(
                "expected a unique vertex labeled {}, found {}",
                target,
                candidates.len()
            )));
        }
        candidates[0]
    } else {
        *k_vertices
            .iter()
            .min_by_key(|&&v| scheme.position[v])
            .unwrap()
    };
    let sub = cone_matching(&cx, apex, Some(&member))?;
    if sub.critical.len() != 1 {
        return Err(Error::Inconsistency(
            "subcomplex collapse leaves more than the apex".into(),
        ));
    }

    // The combined matching collapses the whole complex to the apex vertex.
    let mut combined_pairs = main.matching.pairs.clone();
    combined_pairs.extend(sub.matching.pairs.iter().copied());
    let mut combined_domain = main.matching.domain.clone();
    combined_domain.extend(sub.matching.domain.iter().copied());
    let combined = MorseMatching {
        pairs: combined_pairs,
        domain: combined_domain,
    };
    if !verify_acyclic(&cx, &combined)? {
        return Err(Error::Inconsistency("combined collapse has a cycle".into()));
    }

    let betti = cx.chain_complex()?.reduced_betti()?;
    if !betti.is_zero() {
        return Err(Error::Inconsistency(format!(
            "collapsible complex with nonzero homology: {}",
            betti
        )));
    }

    Ok(CollapseCertificate {
        mu: mu.clone(),
        k,
        family_size: family.len(),
        cell_counts: cx.cell_counts(),
        matched: combined.pairs.len(),
        critical: 1,
        shape,
        apex: Some(cx.dims[0][apex].canonical_key()),
        acyclic: true,
        betti_zero: true,
    })
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// Certificate that the complex for a generic λ is a cone.
#[derive(Clone, Debug, Serialize)]
pub struct ConeCertificate {
    pub lambda: NumberPartition,
    pub mu: NumberPartition,
    pub apex: String,
    pub cell_counts: Vec<usize>,
    pub matched: usize,
    pub acyclic: bool,
    pub betti_zero: bool,
    pub betti: BettiVector,
}

/// For generic λ the complex is a cone over the unique vertex with leaf
/// partition λ: every cell avoiding it has a unique coface through it.
pub fn generic_cone_matching(
    lambda: &NumberPartition,
    mu: &NumberPartition,
    guards: &Guards,
) -> Result<ConeCertificate> {
    if !lambda.is_generic() {
        return Err(Error::InvalidInput(format!("{} is not generic", lambda)));
    }
    if !lambda.refines(mu)? || lambda == mu {
        return Err(Error::InvalidInput(format!(
            "need lambda strictly refining mu, got {} and {}",
            lambda, mu
        )));
    }
    let cx = CellComplex::x_lambda_mu(lambda, mu, guards)?;
    let apex_candidates: Vec<usize> = (0..cx.dims[0].len())
        .filter(|&v| &cx.dims[0][v].level_partition(0).unwrap() == lambda)
        .collect();
    if apex_candidates.len() != 1 {
        return Err(Error::Inconsistency(format!(
            "expected a unique vertex with leaf partition {}, found {}",
            lambda,
            apex_candidates.len()
        )));
    }
    let apex = apex_candidates[0];
    let scheme = cone_scheme(&cx, apex)?;
    let built = build_insertion_matching(&cx, &scheme, None)?;
    if built.critical != vec![(0usize, apex)] {
        return Err(Error::Inconsistency(
            "cone matching leaves more than the apex".into(),
        ));
    }
    let betti = cx.chain_complex()?.reduced_betti()?;
    if !betti.is_zero() {
        return Err(Error::Inconsistency(format!(
            "cone with nonzero homology: {}",
            betti
        )));
    }
    Ok(ConeCertificate {
        lambda: lambda.clone(),
        mu: mu.clone(),
        apex: cx.dims[0][apex].canonical_key(),
        cell_counts: cx.cell_counts(),
        matched: built.matching.pairs.len(),
        acyclic: true,
        betti_zero: true,
        betti,
    })
}

/// The family of all coarsenings of λ other than the one-part partition;
/// the level partitions of the λ-μ complexes range over it.
pub fn refinement_closure(lambda: &NumberPartition) -> BTreeSet<NumberPartition> {
    lambda
        .coarsenings()
        .into_iter()
        .filter(|t| !t.is_single())
        .collect()
}

/// Partitions of n with length in `min_len..=max_len`.
pub fn length_band_family(n: u32, min_len: usize, max_len: usize) -> BTreeSet<NumberPartition> {
    NumberPartition::all(n)
        .into_iter()
        .filter(|p| (min_len..=max_len).contains(&p.len()))
        .collect()
}
