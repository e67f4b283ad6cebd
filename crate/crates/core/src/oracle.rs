//! Exact laws at small sizes by exhaustive enumeration of recursive trees
//! and site configurations.
//!
//! Tree enumeration is streamed. For the census law each `(tree, omega)`
//! pair contributes an integer count keyed by `(census, #open)`; masses are
//! formed once at the end, in `f64` or exactly in rationals.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{check_probability, Error, Result};
use crate::percolation::{bond_partition, census, root_isolation, site_partition, ClusterCensus};
use crate::tree::{RecursiveTree, SiteMarks, TreeEnumerator, DEFAULT_ENUMERATION_CAP};

/// Probability arithmetic used by the oracles.
pub trait Mass: Clone + PartialEq + std::fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn from_ratio(num: u64, den: u64) -> Self;
    fn to_f64(&self) -> f64;
}

impl Mass for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn from_ratio(num: u64, den: u64) -> Self {
        num as f64 / den as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Mass for BigRational {
    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }
    fn one() -> Self {
        <BigRational as One>::one()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn from_ratio(num: u64, den: u64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// Finite law: each support point with its probability.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactDistribution<K: Ord, M> {
    masses: BTreeMap<K, M>,
}

impl<K: Ord + Clone, M: Mass> ExactDistribution<K, M> {
    fn from_map(masses: BTreeMap<K, M>) -> Self {
        Self { masses }
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn mass(&self, key: &K) -> M {
        self.masses.get(key).cloned().unwrap_or_else(M::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &M)> {
        self.masses.iter()
    }

    pub fn total(&self) -> M {
        self.masses.values().fold(M::zero(), |acc, m| acc.add(m))
    }

    /// `E[f(X)]` in the same arithmetic.
    pub fn expect(&self, f: impl Fn(&K) -> M) -> M {
        self.masses.iter().fold(M::zero(), |acc, (k, m)| acc.add(&m.mul(&f(k))))
    }

    /// Total variation distance in `f64`.
    pub fn total_variation(&self, other: &Self) -> f64 {
        let mut keys: Vec<&K> = self.masses.keys().chain(other.masses.keys()).collect();
        keys.sort();
        keys.dedup();
        0.5 * keys.iter().map(|k| (self.mass(k).to_f64() - other.mass(k).to_f64()).abs()).sum::<f64>()
    }

    /// CSV `observable_encoding,probability` with a caller-supplied encoding.
    pub fn to_csv(&self, encode: impl Fn(&K) -> String) -> String {
        let mut out = String::from("observable_encoding,probability\n");
        for (k, m) in &self.masses {
            let _ = writeln!(out, "{},{}", encode(k), m.to_f64());
        }
        out
    }
}

/// Census encoding used in exported tables: counts joined by `;`.
pub fn encode_census(c: &ClusterCensus) -> String {
    c.counts().iter().map(u64::to_string).collect::<Vec<_>>().join(";")
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

fn check_cap(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::EmptyTree);
    }
    if n > DEFAULT_ENUMERATION_CAP {
        return Err(Error::EnumerationCap { n, cap: DEFAULT_ENUMERATION_CAP });
    }
    Ok(())
}

/// Integer counts of `(census, #open)` over all `(n-1)! 2^n` instances.
pub fn census_counts(n: usize) -> Result<BTreeMap<(ClusterCensus, u32), u64>> {
    check_cap(n)?;
    let mut counts = BTreeMap::new();
    for tree in TreeEnumerator::with_cap(n, DEFAULT_ENUMERATION_CAP)? {
        for mask in 0..(1u64 << n) {
            let marks = SiteMarks::from_mask(n, mask);
            let c = census(&site_partition(&tree, &marks)?);
            *counts.entry((c, mask.count_ones())).or_insert(0) += 1;
        }
    }
    Ok(counts)
}

fn weigh<M: Mass>(n: usize, counts: BTreeMap<(ClusterCensus, u32), u64>, p: &M, q: &M) -> ExactDistribution<ClusterCensus, M> {
    let trees = factorial(n - 1);
    let mut masses: BTreeMap<ClusterCensus, M> = BTreeMap::new();
    for ((c, open), count) in counts {
        let mut w = M::from_ratio(count, trees);
        for _ in 0..open {
            w = w.mul(p);
        }
        for _ in open as usize..n {
            w = w.mul(q);
        }
        let slot = masses.entry(c).or_insert_with(M::zero);
        *slot = slot.add(&w);
    }
    ExactDistribution::from_map(masses)
}

/// Exact law of the site census `X_n` under a uniform tree and i.i.d.
/// Bernoulli(`p`) sites.
pub fn exact_census_distribution(n: usize, p: f64) -> Result<ExactDistribution<ClusterCensus, f64>> {
    check_probability(p)?;
    Ok(weigh(n, census_counts(n)?, &p, &(1.0 - p)))
}

/// [`exact_census_distribution`] with rational `p`.
pub fn exact_census_distribution_rational(n: usize, p: &BigRational) -> Result<ExactDistribution<ClusterCensus, BigRational>> {
    check_rational(p)?;
    let q = <BigRational as One>::one() - p;
    Ok(weigh(n, census_counts(n)?, p, &q))
}

fn check_rational(p: &BigRational) -> Result<()> {
    if *p > <BigRational as Zero>::zero() && *p < <BigRational as One>::one() {
        Ok(())
    } else {
        Err(Error::InvalidProbability(Mass::to_f64(p)))
    }
}

fn chain_law<M: Mass>(n: usize, p: &M, q: &M) -> Result<ExactDistribution<ClusterCensus, M>> {
    if n == 0 {
        return Err(Error::EmptyTree);
    }
    let mut law: BTreeMap<ClusterCensus, M> = BTreeMap::new();
    law.insert(ClusterCensus::single_vertex(false), q.clone());
    law.insert(ClusterCensus::single_vertex(true), p.clone());
    for m in 1..n as u64 {
        let mut next: BTreeMap<ClusterCensus, M> = BTreeMap::new();
        let mut push = |c: ClusterCensus, w: M| {
            let slot = next.entry(c).or_insert_with(M::zero);
            *slot = slot.add(&w);
        };
        for (c, w) in &law {
            push(c.add(0, 1), w.mul(q));
            for (k, &count) in c.counts().iter().enumerate() {
                if count == 0 {
                    continue;
                }
                let vertices = if k == 0 { count } else { k as u64 * count };
                let moved = if k == 0 { c.add(1, 1) } else { c.add(k, -1).add(k + 1, 1) };
                push(moved, w.mul(p).mul(&M::from_ratio(vertices, m)));
            }
        }
        law = next;
    }
    Ok(ExactDistribution::from_map(law))
}

/// Law of the census chain after `n - 1` steps from a single vertex.
pub fn exact_chain_distribution(n: usize, p: f64) -> Result<ExactDistribution<ClusterCensus, f64>> {
    check_probability(p)?;
    chain_law(n, &p, &(1.0 - p))
}

pub fn exact_chain_distribution_rational(n: usize, p: &BigRational) -> Result<ExactDistribution<ClusterCensus, BigRational>> {
    check_rational(p)?;
    let q = <BigRational as One>::one() - p;
    chain_law(n, p, &q)
}

/// Multiplicities `(a_1, ..., a_k)` of the subtree sizes left when the root
/// of a recursive tree on `k + 1` vertices is removed.
pub fn root_subtree_multiplicities(tree: &RecursiveTree) -> Vec<u32> {
    let k = tree.n() - 1;
    let sizes = tree.subtree_sizes();
    let mut a = vec![0u32; k];
    for v in 2..=tree.n() {
        if tree.parent(v) == Some(1) {
            a[sizes[v - 1] as usize - 1] += 1;
        }
    }
    a
}

/// Exact law of the root-removal multiplicities over all `k!` trees on
/// `k + 1` vertices.
pub fn exact_ewens_distribution(k: usize) -> Result<ExactDistribution<Vec<u32>, BigRational>> {
    if k == 0 {
        return Err(Error::OutOfRange("k must be at least 1".into()));
    }
    check_cap(k + 1)?;
    let mut counts: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
    for tree in TreeEnumerator::with_cap(k + 1, DEFAULT_ENUMERATION_CAP)? {
        *counts.entry(root_subtree_multiplicities(&tree)).or_insert(0) += 1;
    }
    let total = factorial(k);
    Ok(ExactDistribution::from_map(counts.into_iter().map(|(a, c)| (a, BigRational::from_ratio(c, total))).collect()))
}

/// Outcome of the exhaustive root-isolation check at one size.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingReport {
    pub n: usize,
    pub instances: u64,
    pub failures: u64,
    /// Parent sequence and open mask of the first failing instance.
    pub first_counterexample: Option<(Vec<usize>, u64)>,
}

impl CouplingReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Checks that root isolation of the bond partition reproduces the site
/// partition for every tree and configuration on `n` vertices.
pub fn exact_coupling_check(n: usize) -> Result<CouplingReport> {
    check_cap(n)?;
    let mut report = CouplingReport { n, instances: 0, failures: 0, first_counterexample: None };
    for tree in TreeEnumerator::with_cap(n, DEFAULT_ENUMERATION_CAP)? {
        for mask in 0..(1u64 << n) {
            let marks = SiteMarks::from_mask(n, mask);
            let site = site_partition(&tree, &marks)?;
            let bond = bond_partition(&tree, &marks)?;
            let isolated = root_isolation(&tree, &marks, &bond)?;
            report.instances += 1;
            let same = isolated.site.same_blocks(&site)
                && (0..site.cluster_count()).all(|i| site.is_open(i) == isolated.site.is_open(i));
            if !same {
                report.failures += 1;
                report.first_counterexample.get_or_insert((tree.parent_sequence(), mask));
            }
        }
    }
    Ok(report)
}
