//! Brute-force ground truth at small n.
//!
//! For a partition λ the intersection lattice is realized combinatorially as
//! the join-closure of all type-λ set partitions (with the discrete partition
//! attached as bottom). Given a top element π, every chain of the open
//! interval is enumerated explicitly, chains are grouped into orbits of the
//! stabilizer of π by closing under stabilizer generators, and the orbit
//! cells with their face maps form the quotient triangulated space. This is
//! compared, cell by cell and in homology, against the marked-forest model:
//! the map sending a chain to its forest of block sizes must be a bijection
//! commuting with face maps.
//!
//! Nothing here consults the forest enumeration while building the quotient
//! side, so the comparison is a genuine cross-check of the two models.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use crate::chain_complex::{BettiVector, ChainComplex};
use crate::forests::{CellComplex, MarkedForest, TreeNode};
use crate::partitions::{NumberPartition, SetPartition};
use crate::{bell, Error, Guards, Result};

/// The combinatorial intersection lattice for λ: joins of type-λ set
/// partitions, plus the discrete partition as bottom element.
pub struct PiLambda {
    pub lambda: NumberPartition,
    pub n: u32,
    /// Sorted; includes the bottom (discrete) partition.
    pub elements: Vec<SetPartition>,
}

impl PiLambda {
    pub fn bottom(&self) -> SetPartition {
        SetPartition::discrete(self.n)
    }

    /// Types realized by lattice elements.
    pub fn reachable_types(&self) -> BTreeSet<NumberPartition> {
        self.elements.iter().map(|e| e.type_of()).collect()
    }

    /// The canonical element of the given type, when one exists.
    pub fn find_of_type(&self, mu: &NumberPartition) -> Option<&SetPartition> {
        self.elements.iter().find(|e| &e.type_of() == mu)
    }
}

/// Join-closure of all type-λ set partitions.
pub fn build_pi_lambda(lambda: &NumberPartition, guards: &Guards) -> Result<PiLambda> {
    let n = lambda.n();
    if bell(n) > guards.max_bell {
        return Err(Error::GuardExceeded(format!(
            "Bell({}) = {} exceeds the configured bound {}",
            n,
            bell(n),
            guards.max_bell
        )));
    }
    let generators = SetPartition::all_of_type(lambda);
    let mut elements: BTreeSet<SetPartition> = generators.iter().cloned().collect();
    let mut queue: Vec<SetPartition> = generators.clone();
    while let Some(x) = queue.pop() {
        for g in &generators {
            let j = x.join(g)?;
            if elements.insert(j.clone()) {
                queue.push(j);
            }
        }
    }
    elements.insert(SetPartition::discrete(n));
    Ok(PiLambda {
        lambda: lambda.clone(),
        n,
        elements: elements.into_iter().collect(),
    })
}

/// One cell of the quotient: an orbit of chains, kept as its minimal
/// representative (indices into the open interval, finest first).
#[derive(Clone, Debug)]
pub struct OrbitCell {
    pub rep: Vec<u32>,
    pub orbit_size: u64,
}

/// The quotient of the order complex of the open interval below `pi` by the
/// stabilizer of `pi`.
pub struct OrbitComplex {
    pub pi: SetPartition,
    pub interval: Vec<SetPartition>,
    /// Orbit cells per dimension.
    pub dims: Vec<Vec<OrbitCell>>,
    /// `faces[r][c][i]`: index of the orbit of the representative chain with
    /// its i-th element removed.
    pub faces: Vec<Vec<Vec<usize>>>,
    pub total_chains: u64,
}

pub fn orbit_complex(pl: &PiLambda, pi: &SetPartition, guards: &Guards) -> Result<OrbitComplex> {
    if pl.find_of_type(&pi.type_of()).is_none() || !pl.elements.contains(pi) {
        return Err(Error::InvalidInput(format!(
            "{} is not an element of the lattice",
            pi
        )));
    }
    let bottom = pl.bottom();
    let interval: Vec<SetPartition> = pl
        .elements
        .iter()
        .filter(|e| **e != bottom && *e != pi && e.refines(pi).unwrap())
        .cloned()
        .collect();
    let m = interval.len();

    // Strict comparability within the interval.
    let mut successors: Vec<Vec<u32>> = vec![Vec::new(); m];
    for i in 0..m {
        for j in 0..m {
            if i != j && interval[i].refines(&interval[j]).unwrap() {
                successors[i].push(j as u32);
            }
        }
    }

    // All chains, finest element first.
    let mut chains: Vec<Box<[u32]>> = Vec::new();
    let mut chain_id: HashMap<Box<[u32]>, u32> = HashMap::new();
    let mut stack: Vec<u32> = Vec::new();
    fn dfs(
        at: u32,
        successors: &[Vec<u32>],
        stack: &mut Vec<u32>,
        chains: &mut Vec<Box<[u32]>>,
        chain_id: &mut HashMap<Box<[u32]>, u32>,
        max: u64,
    ) -> Result<()> {
        stack.push(at);
        let key: Box<[u32]> = stack.clone().into_boxed_slice();
        chain_id.insert(key.clone(), chains.len() as u32);
        chains.push(key);
        if chains.len() as u64 > max {
            return Err(Error::GuardExceeded(format!(
                "more than {} chains in the open interval",
                max
            )));
        }
        for &next in &successors[at as usize] {
            dfs(next, successors, stack, chains, chain_id, max)?;
        }
        stack.pop();
        Ok(())
    }
    for start in 0..m as u32 {
        dfs(
            start,
            &successors,
            &mut stack,
            &mut chains,
            &mut chain_id,
            guards.max_cells,
        )?;
    }

    // Stabilizer generators act element-wise; orbits are the components of
    // the action graph.
    let stab = pi.stabilizer();
    let elem_index: HashMap<&SetPartition, u32> = interval
        .iter()
        .enumerate()
        .map(|(i, e)| (e, i as u32))
        .collect();
    let mut tables: Vec<Vec<u32>> = Vec::with_capacity(stab.generators.len());
    for g in &stab.generators {
        let mut table = vec![0u32; m];
        for (i, e) in interval.iter().enumerate() {
            let image = e.apply(g);
            let &idx = elem_index.get(&image).ok_or_else(|| {
                Error::Inconsistency(format!(
                    "stabilizer image {} leaves the interval",
                    image
                ))
            })?;
            table[i] = idx;
        }
        tables.push(table);
    }

    let mut uf: Vec<u32> = (0..chains.len() as u32).collect();
    fn find(uf: &mut Vec<u32>, x: u32) -> u32 {
        if uf[x as usize] != x {
            let root = find(uf, uf[x as usize]);
            uf[x as usize] = root;
        }
        uf[x as usize]
    }
    let mut image = Vec::new();
    for id in 0..chains.len() as u32 {
        for table in &tables {
            image.clear();
            image.extend(chains[id as usize].iter().map(|&e| table[e as usize]));
            let other = *chain_id
                .get(image.as_slice())
                .ok_or_else(|| Error::Inconsistency("chain image is not a chain".into()))?;
            let (a, b) = (find(&mut uf, id), find(&mut uf, other));
            if a != b {
                uf[a as usize] = b;
            }
        }
    }

    // Group chains into orbits; the minimal chain is the representative.
    let mut orbit_of_root: HashMap<u32, usize> = HashMap::new();
    let mut orbits: Vec<(Vec<u32>, u64)> = Vec::new();
    for id in 0..chains.len() as u32 {
        let root = find(&mut uf, id);
        let entry = orbit_of_root.entry(root).or_insert_with(|| {
            orbits.push((chains[id as usize].to_vec(), 0));
            orbits.len() - 1
        });
        let slot = &mut orbits[*entry];
        slot.1 += 1;
        let candidate = &chains[id as usize];
        if candidate.as_ref() < slot.0.as_slice() {
            slot.0 = candidate.to_vec();
        }
    }

    let top = orbits.iter().map(|(rep, _)| rep.len()).max().unwrap_or(0);
    let mut dims: Vec<Vec<OrbitCell>> = vec![Vec::new(); top];
    for (rep, size) in orbits {
        dims[rep.len() - 1].push(OrbitCell {
            rep,
            orbit_size: size,
        });
    }
    for cells in &mut dims {
        cells.sort_unstable_by(|a, b| a.rep.cmp(&b.rep));
    }

    // Root of the union-find -> position of its orbit cell.
    let mut cell_of_root: HashMap<u32, (usize, usize)> = HashMap::new();
    for (r, cells) in dims.iter().enumerate() {
        for (c, cell) in cells.iter().enumerate() {
            let id = *chain_id.get(cell.rep.as_slice()).expect("rep is a chain");
            let root = find(&mut uf, id);
            cell_of_root.insert(root, (r, c));
        }
    }

    let mut faces: Vec<Vec<Vec<usize>>> = Vec::with_capacity(dims.len());
    for (r, cells) in dims.iter().enumerate() {
        let mut per_cell = Vec::with_capacity(cells.len());
        for cell in cells {
            let mut fs = Vec::new();
            if r >= 1 {
                for i in 0..cell.rep.len() {
                    let mut sub = cell.rep.clone();
                    sub.remove(i);
                    let id = *chain_id
                        .get(sub.as_slice())
                        .ok_or_else(|| Error::Inconsistency("missing face chain".into()))?;
                    let root = find(&mut uf, id);
                    let &(fr, fc) = cell_of_root
                        .get(&root)
                        .ok_or_else(|| Error::Inconsistency("orbit without a cell".into()))?;
                    if fr != r - 1 {
                        return Err(Error::Inconsistency(
                            "face orbit has the wrong dimension".into(),
                        ));
                    }
                    fs.push(fc);
                }
            }
            per_cell.push(fs);
        }
        faces.push(per_cell);
    }

    Ok(OrbitComplex {
        pi: pi.clone(),
        interval,
        dims,
        faces,
        total_chains: chains.len() as u64,
    })
}

impl OrbitComplex {
    pub fn cell_counts(&self) -> Vec<usize> {
        self.dims.iter().map(|d| d.len()).collect()
    }

    /// The marked forest of a cell: chain elements become levels labeled by
    /// block sizes, with the top element's blocks as artificial roots.
    pub fn psi(&self, dim: usize, idx: usize) -> Result<MarkedForest> {
        let cell = &self.dims[dim][idx];
        self.forest_of_chain(&cell.rep)
    }

    pub fn forest_of_chain(&self, rep: &[u32]) -> Result<MarkedForest> {
        let levels: Vec<&SetPartition> = rep
            .iter()
            .map(|&i| &self.interval[i as usize])
            .collect();
        fn build(block: &[u32], level: usize, levels: &[&SetPartition]) -> TreeNode {
            if level == 0 {
                return TreeNode::leaf(block.len() as u32);
            }
            let below = levels[level - 1];
            let children = below
                .blocks()
                .iter()
                .filter(|b| b.iter().all(|e| block.binary_search(e).is_ok()))
                .map(|b| build(b, level - 1, levels))
                .collect();
            TreeNode::new(block.len() as u32, children)
        }
        let roots = self
            .pi
            .blocks()
            .iter()
            .map(|b| build(b, levels.len(), &levels))
            .collect();
        MarkedForest::new(roots)
    }

    /// Chain complex of the quotient space with alternating-sign face maps.
    pub fn chain_complex(&self) -> Result<ChainComplex> {
        let counts = self.cell_counts();
        let mut boundary_triplets = Vec::new();
        for r in 1..self.dims.len() {
            let mut trips = Vec::new();
            for (c, fs) in self.faces[r].iter().enumerate() {
                for (i, &f) in fs.iter().enumerate() {
                    let sign = if i % 2 == 0 { 1 } else { -1 };
                    trips.push((f, c, sign));
                }
            }
            boundary_triplets.push(trips);
        }
        ChainComplex::from_boundaries(&counts, boundary_triplets)
    }
}

/// Per-dimension comparison of the quotient oracle and the forest model.
#[derive(Clone, Debug, Serialize)]
pub struct DimComparison {
    pub dim: usize,
    pub oracle_cells: usize,
    pub forest_cells: usize,
}

/// Report of one (λ, μ) comparison.
#[derive(Clone, Debug, Serialize)]
pub struct ComparisonReport {
    pub lambda: NumberPartition,
    pub mu: NumberPartition,
    pub n: u32,
    /// False when no lattice element has type μ; the space is then a point
    /// by convention and there is no quotient complex to compare.
    pub reachable: bool,
    pub dims: Vec<DimComparison>,
    /// Chain-to-forest map is injective and lands in the enumeration with
    /// commuting face maps.
    pub embedding_ok: bool,
    pub face_maps_match: bool,
    /// Injective and onto the whole forest enumeration.
    pub bijective: bool,
    /// When not bijective: every forest cell outside the image has a level
    /// partition that is not the type of any lattice element, and the counts
    /// match the all-reachable-level cells exactly.
    pub mismatch_explained: bool,
    /// Distinct orbits with equal forest images would contradict the cell
    /// model; listed rather than merged.
    pub psi_collisions: Vec<String>,
    pub oracle_betti: Option<BettiVector>,
    pub forest_betti: BettiVector,
    pub betti_equal: bool,
    pub ok: bool,
}

/// Build both models for (λ, μ) and compare cells, face maps, and homology.
pub fn compare_with_forest_model(
    lambda: &NumberPartition,
    mu: &NumberPartition,
    guards: &Guards,
) -> Result<ComparisonReport> {
    if !lambda.refines(mu)? || lambda == mu {
        return Err(Error::InvalidInput(format!(
            "need lambda strictly refining mu, got {} and {}",
            lambda, mu
        )));
    }
    let forest = CellComplex::x_lambda_mu(lambda, mu, guards)?;
    let forest_betti = forest.chain_complex()?.reduced_betti()?;
    let pl = build_pi_lambda(lambda, guards)?;
    let Some(pi) = pl.find_of_type(mu).cloned() else {
        return Ok(ComparisonReport {
            lambda: lambda.clone(),
            mu: mu.clone(),
            n: lambda.n(),
            reachable: false,
            dims: forest
                .cell_counts()
                .iter()
                .enumerate()
                .map(|(dim, &forest_cells)| DimComparison {
                    dim,
                    oracle_cells: 0,
                    forest_cells,
                })
                .collect(),
            embedding_ok: true,
            face_maps_match: true,
            bijective: false,
            mismatch_explained: true,
            psi_collisions: Vec::new(),
            oracle_betti: None,
            forest_betti,
            betti_equal: true,
            ok: true,
        });
    };
    let oracle = orbit_complex(&pl, &pi, guards)?;

    let top = oracle.dims.len().max(forest.dims.len());
    let mut dims = Vec::new();
    for d in 0..top {
        dims.push(DimComparison {
            dim: d,
            oracle_cells: oracle.dims.get(d).map_or(0, |v| v.len()),
            forest_cells: forest.dims.get(d).map_or(0, |v| v.len()),
        });
    }
    let counts_equal = dims.iter().all(|d| d.oracle_cells == d.forest_cells);

    // The forest image of every orbit cell, with injectivity bookkeeping.
    let mut embedding_ok = true;
    let mut psi_collisions = Vec::new();
    let mut images: Vec<Vec<usize>> = Vec::new();
    let mut seen: HashMap<(usize, usize), String> = HashMap::new();
    for (r, cells) in oracle.dims.iter().enumerate() {
        let mut row = Vec::with_capacity(cells.len());
        for (c, _) in cells.iter().enumerate() {
            let f = oracle.psi(r, c)?;
            match forest.find(r, &f) {
                Some(idx) => {
                    if let Some(other) = seen.insert((r, idx), f.canonical_key()) {
                        psi_collisions.push(format!(
                            "dimension {}: two orbits share the forest {}",
                            r, other
                        ));
                        embedding_ok = false;
                    }
                    row.push(idx);
                }
                None => {
                    // Chains of the lattice always give admissible forests.
                    return Err(Error::Inconsistency(format!(
                        "orbit forest {} missing from the enumeration",
                        f.canonical_key()
                    )));
                }
            }
        }
        images.push(row);
    }

    // Faces must commute with the forest map on every orbit cell.
    let mut face_maps_match = true;
    'outer: for (r, cells) in oracle.dims.iter().enumerate().skip(1) {
        for c in 0..cells.len() {
            let fidx = images[r][c];
            for i in 0..=r {
                let oracle_face = oracle.faces[r][c][i];
                let forest_face = forest.faces[r][fidx][i];
                if images[r - 1][oracle_face] != forest_face {
                    face_maps_match = false;
                    break 'outer;
                }
            }
        }
    }
    embedding_ok = embedding_ok && face_maps_match;
    let bijective = embedding_ok && counts_equal;

    // When the image falls short, it must consist exactly of the forests
    // whose level partitions are all types of lattice elements.
    let mismatch_explained = if bijective {
        true
    } else {
        let reachable_types = pl.reachable_types();
        (0..top).all(|d| {
            let realizable = forest.dims.get(d).map_or(0, |cells| {
                cells
                    .iter()
                    .filter(|f| {
                        f.level_partitions()
                            .iter()
                            .take(f.rank() + 1)
                            .all(|t| reachable_types.contains(t))
                    })
                    .count()
            });
            realizable == dims[d].oracle_cells
        })
    };

    let oracle_betti = oracle.chain_complex()?.reduced_betti()?;
    let betti_equal = oracle_betti.trimmed() == forest_betti.trimmed();
    let ok = embedding_ok && betti_equal && (bijective || mismatch_explained);
    Ok(ComparisonReport {
        lambda: lambda.clone(),
        mu: mu.clone(),
        n: lambda.n(),
        reachable: true,
        dims,
        embedding_ok,
        face_maps_match,
        bijective,
        mismatch_explained,
        psi_collisions,
        oracle_betti: Some(oracle_betti),
        forest_betti,
        betti_equal,
        ok,
    })
}

/// Compare every pair λ ⊢ μ ⊢ n with λ ≠ μ.
pub fn oracle_sweep(
    n: u32,
    lambda_filter: Option<&NumberPartition>,
    guards: &Guards,
) -> Result<Vec<ComparisonReport>> {
    let lambdas: Vec<NumberPartition> = match lambda_filter {
        Some(l) => vec![l.clone()],
        None => NumberPartition::all(n),
    };
    let mut pairs = Vec::new();
    for lambda in &lambdas {
        for mu in lambda.coarsenings() {
            if &mu != lambda {
                pairs.push((lambda.clone(), mu));
            }
        }
    }
    pairs
        .par_iter()
        .map(|(lambda, mu)| compare_with_forest_model(lambda, mu, guards))
        .collect()
}
