//! Number and set partitions.
//!
//! Number partitions are kept in canonical weakly decreasing order, so
//! multiset equality is plain sequence equality. Set partitions live on the
//! ground set `{1..n}` with blocks sorted by size (descending) and then
//! lexicographically; equality ignores block order by construction.

use std::cmp::Reverse;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// A weakly decreasing sequence of positive integers summing to `n`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct NumberPartition {
    parts: Vec<u32>,
}

impl NumberPartition {
    pub fn new(mut parts: Vec<u32>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidInput(
                "a partition needs at least one part".into(),
            ));
        }
        if parts.iter().any(|&p| p == 0) {
            return Err(Error::InvalidInput("partition parts must be positive".into()));
        }
        parts.sort_unstable_by_key(|&p| Reverse(p));
        Ok(NumberPartition { parts })
    }

    /// The one-part partition `(n)`.
    pub fn single(n: u32) -> Self {
        NumberPartition::new(vec![n]).expect("n must be positive")
    }

    /// The all-ones partition `(1^n)`.
    pub fn ones(n: u32) -> Self {
        NumberPartition::new(vec![1; n as usize]).expect("n must be positive")
    }

    /// Power notation `(k^m, 1^ones)`.
    pub fn special(k: u32, m: u32, ones: u32) -> Result<Self> {
        let mut parts = vec![k; m as usize];
        parts.extend(std::iter::repeat(1).take(ones as usize));
        NumberPartition::new(parts)
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn n(&self) -> u32 {
        self.parts.iter().sum()
    }

    /// Number of parts.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_single(&self) -> bool {
        self.parts.len() == 1
    }

    pub fn is_all_ones(&self) -> bool {
        self.parts[0] == 1
    }

    /// True when every part is `1` or `k`.
    pub fn is_special(&self, k: u32) -> bool {
        self.parts.iter().all(|&p| p == 1 || p == k)
    }

    /// True when the parts of `self` can be grouped into blocks whose sums
    /// are exactly the parts of `coarser`, as multisets.
    pub fn refines(&self, coarser: &NumberPartition) -> Result<bool> {
        if self.n() != coarser.n() {
            return Err(Error::InvalidInput(format!(
                "refinement needs equal totals: {} vs {}",
                self, coarser
            )));
        }
        let mut remaining: Vec<u32> = coarser.parts.clone();
        let mut visited: HashSet<(usize, Vec<u32>)> = HashSet::new();
        Ok(assign(&self.parts, &mut remaining, &mut visited))
    }

    /// All partitions coarser than or equal to `self` under refinement,
    /// including `self` and `(n)`.
    pub fn coarsenings(&self) -> BTreeSet<NumberPartition> {
        let mut out = BTreeSet::new();
        let mut stack = vec![self.clone()];
        while let Some(p) = stack.pop() {
            if !out.insert(p.clone()) {
                continue;
            }
            let parts = p.parts();
            for i in 0..parts.len() {
                for j in i + 1..parts.len() {
                    let mut q = parts.to_vec();
                    q[i] += q[j];
                    q.remove(j);
                    stack.push(NumberPartition::new(q).unwrap());
                }
            }
        }
        out
    }

    /// A partition is generic when two sub-multisets of its parts can only
    /// have equal sums by being equal as multisets.
    pub fn is_generic(&self) -> bool {
        let l = self.parts.len();
        assert!(l <= 24, "genericity check enumerates 2^l subsets");
        let mut seen: HashMap<u32, Vec<u32>> = HashMap::new();
        for mask in 0u32..(1u32 << l) {
            let mut sum = 0;
            let mut sub = Vec::new();
            for (i, &p) in self.parts.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    sum += p;
                    sub.push(p);
                }
            }
            match seen.entry(sum) {
                std::collections::hash_map::Entry::Occupied(e) => {
                    if *e.get() != sub {
                        return false;
                    }
                }
                std::collections::hash_map::Entry::Vacant(e) => {
                    e.insert(sub);
                }
            }
        }
        true
    }

    /// Write each part as `k*q + r` with `0 <= r < k` and return
    /// `(k^{sum q}, 1^{sum r})`.
    pub fn gamma_k(&self, k: u32) -> Result<NumberPartition> {
        if k < 2 {
            return Err(Error::InvalidInput(format!("gamma_k needs k >= 2, got {}", k)));
        }
        let q: u32 = self.parts.iter().map(|&p| p / k).sum();
        let r: u32 = self.parts.iter().map(|&p| p % k).sum();
        let mut parts = vec![k; q as usize];
        parts.extend(std::iter::repeat(1).take(r as usize));
        NumberPartition::new(parts)
    }

    /// Every partition of `n`, in canonical order.
    pub fn all(n: u32) -> Vec<NumberPartition> {
        fn gen(rem: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<NumberPartition>) {
            if rem == 0 {
                out.push(NumberPartition { parts: cur.clone() });
                return;
            }
            let top = rem.min(max);
            for p in (1..=top).rev() {
                cur.push(p);
                gen(rem - p, p, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if n > 0 {
            gen(n, n, &mut Vec::new(), &mut out);
        }
        out
    }
}

fn assign(parts: &[u32], remaining: &mut Vec<u32>, visited: &mut HashSet<(usize, Vec<u32>)>) -> bool {
    let Some((&p, rest)) = parts.split_first() else {
        return remaining.iter().all(|&r| r == 0);
    };
    let mut state = remaining.clone();
    state.sort_unstable();
    if !visited.insert((parts.len(), state)) {
        return false;
    }
    let mut tried = HashSet::new();
    for i in 0..remaining.len() {
        let r = remaining[i];
        if r >= p && tried.insert(r) {
            remaining[i] -= p;
            let ok = assign(rest, remaining, visited);
            remaining[i] += p;
            if ok {
                return true;
            }
        }
    }
    false
}

impl fmt::Display for NumberPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", s.join(","))
    }
}

impl FromStr for NumberPartition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Result<Vec<u32>> = s
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::InvalidInput(format!("bad partition part {:?}", tok)))
            })
            .collect();
        NumberPartition::new(parts?)
    }
}

impl Serialize for NumberPartition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for NumberPartition {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A permutation of `{1..n}`; `images[i]` is the image of `i+1`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Perm(pub Vec<u32>);

impl Perm {
    pub fn identity(n: u32) -> Self {
        Perm((1..=n).collect())
    }

    pub fn apply(&self, x: u32) -> u32 {
        self.0[(x - 1) as usize]
    }

    pub fn n(&self) -> u32 {
        self.0.len() as u32
    }
}

/// Generators and order of the subgroup of the symmetric group preserving
/// the block set of a set partition.
#[derive(Clone, Debug)]
pub struct Stabilizer {
    pub generators: Vec<Perm>,
    pub order: u128,
}

/// A partition of `{1..n}` into disjoint nonempty blocks.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct SetPartition {
    n: u32,
    blocks: Vec<Vec<u32>>,
}

impl SetPartition {
    pub fn new(n: u32, mut blocks: Vec<Vec<u32>>) -> Result<Self> {
        let mut seen = vec![false; n as usize];
        let mut count = 0u32;
        for b in &mut blocks {
            if b.is_empty() {
                return Err(Error::InvalidInput("empty block".into()));
            }
            b.sort_unstable();
            for &e in b.iter() {
                if e == 0 || e > n {
                    return Err(Error::InvalidInput(format!("element {} outside 1..={}", e, n)));
                }
                if seen[(e - 1) as usize] {
                    return Err(Error::InvalidInput(format!("element {} appears twice", e)));
                }
                seen[(e - 1) as usize] = true;
                count += 1;
            }
        }
        if count != n {
            return Err(Error::InvalidInput(format!(
                "blocks cover {} of {} elements",
                count, n
            )));
        }
        blocks.sort_unstable_by(|a, b| (Reverse(a.len()), a).cmp(&(Reverse(b.len()), b)));
        Ok(SetPartition { n, blocks })
    }

    /// The discrete partition, every element a singleton.
    pub fn discrete(n: u32) -> Self {
        SetPartition::new(n, (1..=n).map(|e| vec![e]).collect()).unwrap()
    }

    /// The one-block partition of `{1..n}`.
    pub fn full(n: u32) -> Self {
        SetPartition::new(n, vec![(1..=n).collect()]).unwrap()
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<u32>] {
        &self.blocks
    }

    /// The number partition of block sizes.
    pub fn type_of(&self) -> NumberPartition {
        NumberPartition::new(self.blocks.iter().map(|b| b.len() as u32).collect()).unwrap()
    }

    /// Block index of each element; entry `e-1` names the block containing `e`.
    pub fn block_of(&self) -> Vec<u32> {
        let mut out = vec![0; self.n as usize];
        for (i, b) in self.blocks.iter().enumerate() {
            for &e in b {
                out[(e - 1) as usize] = i as u32;
            }
        }
        out
    }

    /// True when every block of `self` is contained in a block of `coarser`.
    pub fn refines(&self, coarser: &SetPartition) -> Result<bool> {
        if self.n != coarser.n {
            return Err(Error::InvalidInput("set partitions of different ground sets".into()));
        }
        let owner = coarser.block_of();
        Ok(self
            .blocks
            .iter()
            .all(|b| b.iter().all(|&e| owner[(e - 1) as usize] == owner[(b[0] - 1) as usize])))
    }

    /// Finest common coarsening: connected components of the union of the
    /// two block-membership relations.
    pub fn join(&self, other: &SetPartition) -> Result<SetPartition> {
        if self.n != other.n {
            return Err(Error::InvalidInput("set partitions of different ground sets".into()));
        }
        let mut uf = UnionFind::new(self.n as usize);
        for p in [self, other] {
            for b in &p.blocks {
                for w in b.windows(2) {
                    uf.union((w[0] - 1) as usize, (w[1] - 1) as usize);
                }
            }
        }
        let mut groups: HashMap<usize, Vec<u32>> = HashMap::new();
        for e in 1..=self.n {
            groups.entry(uf.find((e - 1) as usize)).or_default().push(e);
        }
        SetPartition::new(self.n, groups.into_values().collect())
    }

    /// Relabel elements through a permutation.
    pub fn apply(&self, g: &Perm) -> SetPartition {
        let blocks = self
            .blocks
            .iter()
            .map(|b| b.iter().map(|&e| g.apply(e)).collect())
            .collect();
        SetPartition::new(self.n, blocks).unwrap()
    }

    /// All set partitions of `{1..n}`, by restricted growth strings.
    pub fn all(n: u32) -> Vec<SetPartition> {
        let mut out = Vec::new();
        let mut rgs = vec![0u32; n as usize];
        fn rec(rgs: &mut Vec<u32>, i: usize, max: u32, n: u32, out: &mut Vec<SetPartition>) {
            if i == rgs.len() {
                let nblocks = max as usize;
                let mut blocks: Vec<Vec<u32>> = vec![Vec::new(); nblocks];
                for (e, &b) in rgs.iter().enumerate() {
                    blocks[b as usize].push(e as u32 + 1);
                }
                out.push(SetPartition::new(n, blocks).unwrap());
                return;
            }
            for b in 0..=max {
                rgs[i] = b;
                rec(rgs, i + 1, max.max(b + 1), n, out);
            }
        }
        if n > 0 {
            rec(&mut rgs, 1, 1, n, &mut out);
        } else {
            out.push(SetPartition { n: 0, blocks: vec![] });
        }
        out
    }

    /// All set partitions of the given type.
    pub fn all_of_type(t: &NumberPartition) -> Vec<SetPartition> {
        SetPartition::all(t.n())
            .into_iter()
            .filter(|p| &p.type_of() == t)
            .collect()
    }

    /// Generators and order of the stabilizer: permutations within blocks
    /// plus swaps of equal-size blocks.
    pub fn stabilizer(&self) -> Stabilizer {
        let n = self.n;
        let mut generators = Vec::new();
        for b in &self.blocks {
            if b.len() >= 2 {
                let mut img = Perm::identity(n);
                img.0[(b[0] - 1) as usize] = b[1];
                img.0[(b[1] - 1) as usize] = b[0];
                generators.push(img);
            }
            if b.len() >= 3 {
                let mut img = Perm::identity(n);
                for w in 0..b.len() {
                    img.0[(b[w] - 1) as usize] = b[(w + 1) % b.len()];
                }
                generators.push(img);
            }
        }
        // Equal-size blocks are adjacent in canonical order.
        for i in 0..self.blocks.len().saturating_sub(1) {
            let (a, b) = (&self.blocks[i], &self.blocks[i + 1]);
            if a.len() == b.len() {
                let mut img = Perm::identity(n);
                for (&x, &y) in a.iter().zip(b.iter()) {
                    img.0[(x - 1) as usize] = y;
                    img.0[(y - 1) as usize] = x;
                }
                generators.push(img);
            }
        }
        let mut order: u128 = 1;
        let mut by_size: HashMap<usize, u128> = HashMap::new();
        for b in &self.blocks {
            order *= factorial(b.len() as u128);
            *by_size.entry(b.len()).or_insert(0) += 1;
        }
        for (_, m) in by_size {
            order *= factorial(m);
        }
        Stabilizer { generators, order }
    }
}

fn factorial(k: u128) -> u128 {
    (1..=k).product::<u128>().max(1)
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let blocks: Vec<String> = self
            .blocks
            .iter()
            .map(|b| {
                let es: Vec<String> = b.iter().map(|e| e.to_string()).collect();
                format!("[{}]", es.join(","))
            })
            .collect();
        write!(f, "[{}]", blocks.join(","))
    }
}

impl Serialize for SetPartition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.blocks.serialize(s)
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}
