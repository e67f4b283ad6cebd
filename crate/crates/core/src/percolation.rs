//! Cluster partitions for site and bond percolation, the root-isolation
//! map between them, cluster censuses and the census transition chain.
//!
//! Every partition here is built in one forward pass over the labels.
//! Because `parent(v) < v`, the cluster of `v` is either a fresh cluster
//! rooted at `v` or the (already known) cluster of its parent, so cluster
//! indices come out ordered by increasing root without any sorting.

use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};
use crate::tree::{RecursiveTree, SiteMarks};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PercolationKind {
    Site,
    Bond,
}

/// A partition of `1..=n` into clusters.
///
/// Cluster indices are 0-based and ordered by increasing root label, so
/// index `i` is the paper-style block with the `(i+1)`-th smallest root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterPartition {
    kind: PercolationKind,
    cluster_of: Vec<u32>,
    roots: Vec<u32>,
    sizes: Vec<u32>,
    open: Vec<bool>,
}

impl ClusterPartition {
    fn forward<L, O>(tree: &RecursiveTree, kind: PercolationKind, linked: L, root_open: O) -> Self
    where
        L: Fn(usize, usize) -> bool,
        O: Fn(usize) -> bool,
    {
        let n = tree.n();
        let parents = tree.parent_table();
        let mut cluster_of = Vec::with_capacity(n);
        let mut roots = vec![1u32];
        let mut sizes = vec![1u32];
        let mut open = vec![root_open(1)];
        cluster_of.push(0u32);
        for v in 2..=n {
            let p = parents[v - 1] as usize;
            if linked(v, p) {
                let c = cluster_of[p - 1];
                sizes[c as usize] += 1;
                cluster_of.push(c);
            } else {
                cluster_of.push(roots.len() as u32);
                roots.push(v as u32);
                sizes.push(1);
                open.push(root_open(v));
            }
        }
        Self { kind, cluster_of, roots, sizes, open }
    }

    pub fn kind(&self) -> PercolationKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.cluster_of.len()
    }

    pub fn cluster_count(&self) -> usize {
        self.roots.len()
    }

    /// 0-based cluster index of vertex `v`.
    #[inline]
    pub fn cluster_of(&self, v: usize) -> usize {
        self.cluster_of[v - 1] as usize
    }

    pub fn cluster_table(&self) -> &[u32] {
        &self.cluster_of
    }

    pub fn roots(&self) -> &[u32] {
        &self.roots
    }

    pub fn sizes(&self) -> &[u32] {
        &self.sizes
    }

    /// Whether cluster `i` consists of open sites. Closed sites form
    /// singleton clusters in site percolation; bond clusters are all open.
    pub fn is_open(&self, i: usize) -> bool {
        self.open[i]
    }

    /// Members of every cluster, in increasing label order.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks: Vec<Vec<usize>> = self.sizes.iter().map(|&s| Vec::with_capacity(s as usize)).collect();
        for (i, &c) in self.cluster_of.iter().enumerate() {
            blocks[c as usize].push(i + 1);
        }
        blocks
    }

    /// Set equality of the blocks, ignoring the percolation kind. Both
    /// sides use the canonical root ordering, so this is a table compare.
    pub fn same_blocks(&self, other: &ClusterPartition) -> bool {
        self.cluster_of == other.cluster_of
    }

    pub fn to_record(&self) -> PartitionRecord {
        PartitionRecord {
            cluster_of: self.cluster_of.clone(),
            roots: self.roots.clone(),
            sizes: self.sizes.clone(),
        }
    }

    /// The cluster `i` relabelled `1..=size` in increasing label order,
    /// as a recursive tree of its own.
    pub fn cluster_shape(&self, tree: &RecursiveTree, i: usize) -> Result<RecursiveTree> {
        if i >= self.cluster_count() {
            return Err(Error::OutOfRange(format!("cluster {i} of {}", self.cluster_count())));
        }
        let members: Vec<usize> = (1..=self.n()).filter(|&v| self.cluster_of(v) == i).collect();
        let mut parents = Vec::with_capacity(members.len().saturating_sub(1));
        for &v in &members[1..] {
            let p = tree.parent(v).expect("non-root member has a parent");
            let local = members.binary_search(&p).map_err(|_| {
                Error::MismatchedPartition(format!("parent {p} of {v} lies outside its cluster"))
            })?;
            parents.push(local + 1);
        }
        RecursiveTree::from_parents(&parents)
    }
}

/// JSON form `{"cluster_of", "roots", "sizes"}`; `cluster_of` holds
/// 0-based indices into `roots` and `sizes`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionRecord {
    pub cluster_of: Vec<u32>,
    pub roots: Vec<u32>,
    pub sizes: Vec<u32>,
}

impl PartitionRecord {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Site percolation: `v` and `parent(v)` share a cluster iff both are open.
pub fn site_partition(tree: &RecursiveTree, marks: &SiteMarks) -> Result<ClusterPartition> {
    marks.check_covers(tree)?;
    Ok(ClusterPartition::forward(
        tree,
        PercolationKind::Site,
        |v, p| marks.is_open(v) && marks.is_open(p),
        |r| marks.is_open(r),
    ))
}

/// Bond percolation: the edge `{v, parent(v)}` is kept iff `omega(v) = 1`.
pub fn bond_partition(tree: &RecursiveTree, marks: &SiteMarks) -> Result<ClusterPartition> {
    marks.check_covers(tree)?;
    Ok(ClusterPartition::forward(tree, PercolationKind::Bond, |v, _| marks.is_open(v), |_| true))
}

/// Site partition recovered from a bond partition, together with the
/// decomposition of every bond cluster into its root-isolation pieces.
#[derive(Debug, Clone)]
pub struct IsolatedPartition {
    pub site: ClusterPartition,
    // piece_of[v - 1] = j: 0 for the bond root itself, j >= 1 for the
    // subtree of the j-th child of that root inside the bond cluster
    piece_of: Vec<u32>,
    bond_cluster_of: Vec<u32>,
    piece_sizes: Vec<Vec<u32>>,
}

impl IsolatedPartition {
    /// `(i, j)` label of vertex `v`: bond cluster `i` (0-based) and piece `j`.
    pub fn piece_label(&self, v: usize) -> (usize, usize) {
        (self.bond_cluster_of[v - 1] as usize, self.piece_of[v - 1] as usize)
    }

    /// Sizes of pieces `0, 1, 2, ...` of bond cluster `i`; piece 0 is the
    /// isolated root and always has size 1.
    pub fn piece_sizes(&self, i: usize) -> &[u32] {
        &self.piece_sizes[i]
    }
}

/// Root isolation: cut every bond cluster root from its children, except
/// the cluster of vertex 1 when vertex 1 is open.
pub fn root_isolation(
    tree: &RecursiveTree,
    marks: &SiteMarks,
    bond: &ClusterPartition,
) -> Result<IsolatedPartition> {
    marks.check_covers(tree)?;
    check_bond_matches(tree, marks, bond)?;

    let n = tree.n();
    let parents = tree.parent_table();
    let mut piece_of = vec![0u32; n];
    let mut piece_sizes: Vec<Vec<u32>> = vec![vec![1]; bond.cluster_count()];
    for v in 2..=n {
        let c = bond.cluster_of[v - 1] as usize;
        if bond.roots[c] as usize == v {
            continue;
        }
        let p = parents[v - 1] as usize;
        if bond.roots[c] as usize == p {
            piece_sizes[c].push(1);
            piece_of[v - 1] = (piece_sizes[c].len() - 1) as u32;
        } else {
            let j = piece_of[p - 1];
            piece_of[v - 1] = j;
            piece_sizes[c][j as usize] += 1;
        }
    }

    let isolated = |c: usize| bond.roots[c] != 1 || !marks.is_open(1);
    let site = ClusterPartition::forward(
        tree,
        PercolationKind::Site,
        |v, p| {
            let c = bond.cluster_of[v - 1] as usize;
            let bond_root = bond.roots[c] as usize;
            v != bond_root && !(p == bond_root && isolated(c))
        },
        |r| marks.is_open(r),
    );
    Ok(IsolatedPartition { site, piece_of, bond_cluster_of: bond.cluster_of.clone(), piece_sizes })
}

fn check_bond_matches(tree: &RecursiveTree, marks: &SiteMarks, bond: &ClusterPartition) -> Result<()> {
    if bond.kind != PercolationKind::Bond {
        return Err(Error::MismatchedPartition("expected a bond partition".into()));
    }
    if bond.n() != tree.n() {
        return Err(Error::MismatchedPartition(format!("{} vertices vs tree of {}", bond.n(), tree.n())));
    }
    if bond.cluster_of[0] != 0 || bond.roots.first() != Some(&1) {
        return Err(Error::MismatchedPartition("vertex 1 must root cluster 0".into()));
    }
    for v in 2..=tree.n() {
        let p = tree.parent(v).expect("v >= 2");
        let c = bond.cluster_of[v - 1] as usize;
        let joined = c == bond.cluster_of[p - 1] as usize;
        if joined != marks.is_open(v) {
            return Err(Error::MismatchedPartition(format!("edge {{{p}, {v}}} disagrees with omega({v})")));
        }
        if !joined && bond.roots.get(c).map(|&r| r as usize) != Some(v) {
            return Err(Error::MismatchedPartition(format!("vertex {v} should root cluster {c}")));
        }
    }
    Ok(())
}

/// Counts of clusters by size class. In the site case class 0 counts
/// closed vertices; in the bond case class 0 is always empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClusterCensus {
    kind: PercolationKind,
    // trailing zeros trimmed, so equal censuses compare equal
    counts: Vec<u64>,
    n: u64,
}

impl ClusterCensus {
    pub fn new(kind: PercolationKind, mut counts: Vec<u64>) -> Result<Self> {
        while counts.last() == Some(&0) {
            counts.pop();
        }
        if kind == PercolationKind::Bond && counts.first().copied().unwrap_or(0) != 0 {
            return Err(Error::InvalidCensus("bond census has closed vertices".into()));
        }
        let n = mass(&counts);
        Ok(Self { kind, counts, n })
    }

    /// Census of a single vertex: one closed vertex or one open singleton.
    pub fn single_vertex(open: bool) -> Self {
        let counts = if open { vec![0, 1] } else { vec![1] };
        Self { kind: PercolationKind::Site, counts, n: 1 }
    }

    pub fn kind(&self) -> PercolationKind {
        self.kind
    }

    /// Total number of vertices.
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn count(&self, k: usize) -> u64 {
        self.counts.get(k).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Largest occupied class, or 0 for an empty census.
    pub fn max_class(&self) -> usize {
        self.counts.len().saturating_sub(1)
    }

    /// `<census, f>` over the occupied classes.
    pub fn pair<F: Fn(usize) -> f64>(&self, f: F) -> f64 {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(k, &c)| c as f64 * f(k))
            .sum()
    }

    /// CSV with header `k,count`, one row per class `0..=max_class`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,count\n");
        for (k, c) in self.counts.iter().enumerate() {
            let _ = writeln!(out, "{k},{c}");
        }
        out
    }

    pub fn from_csv(kind: PercolationKind, text: &str) -> Result<Self> {
        let mut counts = Vec::new();
        for (line_no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (line_no == 0 && line == "k,count") {
                continue;
            }
            let (k, c) = line
                .split_once(',')
                .ok_or_else(|| Error::InvalidCensus(format!("line {}: expected k,count", line_no + 1)))?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<u64>()
                    .map_err(|e| Error::InvalidCensus(format!("line {}: {e}", line_no + 1)))
            };
            let (k, c) = (parse(k)? as usize, parse(c)?);
            if counts.len() <= k {
                counts.resize(k + 1, 0);
            }
            counts[k] += c;
        }
        Self::new(kind, counts)
    }

    fn validate_site(&self) -> Result<()> {
        if self.kind != PercolationKind::Site {
            return Err(Error::InvalidCensus("the transition chain runs on site censuses".into()));
        }
        if self.n == 0 {
            return Err(Error::InvalidCensus("empty census".into()));
        }
        Ok(())
    }

    pub(crate) fn add(&self, k: usize, delta: i64) -> ClusterCensus {
        let mut counts = self.counts.clone();
        if counts.len() <= k {
            counts.resize(k + 1, 0);
        }
        counts[k] = (counts[k] as i64 + delta) as u64;
        while counts.last() == Some(&0) {
            counts.pop();
        }
        let n = mass(&counts);
        ClusterCensus { kind: self.kind, counts, n }
    }
}

fn mass(counts: &[u64]) -> u64 {
    counts.first().copied().unwrap_or(0) + counts.iter().enumerate().skip(1).map(|(k, &c)| k as u64 * c).sum::<u64>()
}

/// Census of a partition: open clusters by size, closed sites in class 0.
pub fn census(partition: &ClusterPartition) -> ClusterCensus {
    let max = partition.sizes.iter().copied().max().unwrap_or(0) as usize;
    let mut counts = vec![0u64; max + 1];
    for (i, &s) in partition.sizes.iter().enumerate() {
        if partition.open[i] {
            counts[s as usize] += 1;
        } else {
            counts[0] += 1;
        }
    }
    ClusterCensus::new(partition.kind, counts).expect("partition censuses are consistent")
}

/// Every successor of `census` under the one-vertex transition law, with its
/// probability: `+e_0` w.p. `1-p`, `+e_1` w.p. `p X(0)/n`, and
/// `-e_k + e_{k+1}` w.p. `p k X(k)/n`.
pub fn census_transitions(census: &ClusterCensus, p: f64) -> Result<Vec<(ClusterCensus, f64)>> {
    check_probability(p)?;
    census.validate_site()?;
    let n = census.n as f64;
    let mut out = Vec::with_capacity(census.counts.len() + 2);
    out.push((census.add(0, 1), 1.0 - p));
    for (k, &c) in census.counts.iter().enumerate() {
        if c == 0 {
            continue;
        }
        if k == 0 {
            out.push((census.add(1, 1), p * c as f64 / n));
        } else {
            let next = census.add(k, -1).add(k + 1, 1);
            out.push((next, p * (k as u64 * c) as f64 / n));
        }
    }
    Ok(out)
}

/// One step of the census chain. The new vertex is closed w.p. `1-p`;
/// otherwise it attaches to a uniform existing vertex, found by inverse
/// transform over the per-class vertex masses.
pub fn census_step<R: Rng + ?Sized>(census: &ClusterCensus, p: f64, rng: &mut R) -> Result<ClusterCensus> {
    check_probability(p)?;
    census.validate_site()?;
    if !rng.random_bool(p) {
        return Ok(census.add(0, 1));
    }
    let mut r = rng.random_range(0..census.n);
    for (k, &c) in census.counts.iter().enumerate() {
        let weight = if k == 0 { c } else { k as u64 * c };
        if r < weight {
            return Ok(if k == 0 { census.add(1, 1) } else { census.add(k, -1).add(k + 1, 1) });
        }
        r -= weight;
    }
    unreachable!("vertex index below the census mass")
}

/// Cluster sizes in decreasing order, each multiplied by `scale`.
pub fn ranked_sizes(partition: &ClusterPartition, scale: f64) -> Vec<f64> {
    let mut sizes = partition.sizes.clone();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    sizes.into_iter().map(|s| s as f64 * scale).collect()
}

/// The `k` largest cluster sizes, in decreasing order (padded with zeros).
pub fn largest_sizes(partition: &ClusterPartition, k: usize) -> Vec<u32> {
    let mut sizes = partition.sizes.clone();
    if k < sizes.len() {
        sizes.select_nth_unstable_by(k, |a, b| b.cmp(a));
        sizes.truncate(k);
    }
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    sizes.resize(k, 0);
    sizes
}
