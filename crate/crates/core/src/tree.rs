//! Recursive trees: uniform growth, the continuous-time Yule embedding,
//! site marks, exhaustive enumeration and text export.
//!
//! Vertices carry the labels `1..=n`; the root is always `1` and every
//! other vertex points to a strictly smaller parent label.

use std::fmt::Write as _;

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};

/// Largest `n` accepted by [`enumerate_recursive_trees`] unless a caller
/// raises the cap explicitly.
pub const DEFAULT_ENUMERATION_CAP: usize = 9;

/// A labelled recursive tree stored as its parent sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct RecursiveTree {
    // parents[v - 1] is the parent label of v; the root stores 0
    parents: Vec<u32>,
    birth: Option<Vec<f64>>,
}

impl RecursiveTree {
    /// Builds a tree from the parents of vertices `2..=n`, in label order.
    pub fn from_parents(parents: &[usize]) -> Result<Self> {
        let n = parents.len() + 1;
        if n > u32::MAX as usize {
            return Err(Error::InvalidRecord(format!("{n} vertices do not fit in u32 labels")));
        }
        let mut stored = Vec::with_capacity(n);
        stored.push(0);
        for (i, &p) in parents.iter().enumerate() {
            let v = i + 2;
            if p == 0 || p >= v {
                return Err(Error::InvalidRecord(format!(
                    "parent of vertex {v} is {p}, expected a label in 1..{v}"
                )));
            }
            stored.push(p as u32);
        }
        Ok(Self { parents: stored, birth: None })
    }

    /// Attaches birth times (one per vertex, root first).
    pub fn with_birth_times(mut self, birth: Vec<f64>) -> Result<Self> {
        if birth.len() != self.n() {
            return Err(Error::InvalidRecord(format!(
                "{} birth times for {} vertices",
                birth.len(),
                self.n()
            )));
        }
        if birth[0] != 0.0 {
            return Err(Error::InvalidRecord("root birth time must be 0".into()));
        }
        if birth.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidRecord("birth times must increase strictly with the label".into()));
        }
        self.birth = Some(birth);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.parents.len()
    }

    /// Parent label of `v`, or `None` for the root and out-of-range labels.
    #[inline]
    pub fn parent(&self, v: usize) -> Option<usize> {
        if v < 2 || v > self.n() {
            None
        } else {
            Some(self.parents[v - 1] as usize)
        }
    }

    /// Raw parent table indexed by `v - 1`; entry 0 is the root's placeholder 0.
    #[inline]
    pub fn parent_table(&self) -> &[u32] {
        &self.parents
    }

    /// Parents of vertices `2..=n` in label order.
    pub fn parent_sequence(&self) -> Vec<usize> {
        self.parents[1..].iter().map(|&p| p as usize).collect()
    }

    pub fn birth_times(&self) -> Option<&[f64]> {
        self.birth.as_deref()
    }

    /// Time at which the `n`-th vertex was born (`tau_n`), if birth times exist.
    pub fn tau(&self) -> Option<f64> {
        self.birth.as_ref().map(|b| b[b.len() - 1])
    }

    /// The subtree induced on the first `m` labels (the canonical coupling
    /// restriction).
    pub fn restrict(&self, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::EmptyTree);
        }
        let m = m.min(self.n());
        Ok(Self {
            parents: self.parents[..m].to_vec(),
            birth: self.birth.as_ref().map(|b| b[..m].to_vec()),
        })
    }

    /// Size of the subtree below every vertex, indexed by `v - 1`.
    pub fn subtree_sizes(&self) -> Vec<u32> {
        let mut sizes = vec![1u32; self.n()];
        for v in (2..=self.n()).rev() {
            let p = self.parents[v - 1] as usize;
            sizes[p - 1] += sizes[v - 1];
        }
        sizes
    }

    /// Serializable form, optionally carrying site marks.
    pub fn to_record(&self, marks: Option<&SiteMarks>) -> TreeRecord {
        TreeRecord {
            n: self.n(),
            parent: self.parent_sequence(),
            birth: self.birth.clone(),
            marks: marks.map(|m| m.open.iter().map(|&o| o as u8).collect()),
        }
    }
}

/// Grows a uniform random recursive tree: vertex `v` picks its parent
/// uniformly from `1..v`.
pub fn grow_uniform<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<RecursiveTree> {
    if n == 0 {
        return Err(Error::EmptyTree);
    }
    let mut parents = Vec::with_capacity(n);
    parents.push(0u32);
    for v in 2..=n as u32 {
        parents.push(rng.random_range(1..v));
    }
    Ok(RecursiveTree { parents, birth: None })
}

/// Grows the tree through the rate-1 Yule process: with `k` vertices alive
/// the next birth comes after an `Exp(k)` wait and picks a uniform parent.
pub fn grow_yule<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<RecursiveTree> {
    if n == 0 {
        return Err(Error::EmptyTree);
    }
    let mut parents = Vec::with_capacity(n);
    let mut birth = Vec::with_capacity(n);
    parents.push(0u32);
    birth.push(0.0);
    let mut t = 0.0;
    for k in 1..n as u32 {
        let wait: f64 = Exp1.sample(rng);
        t += wait / f64::from(k);
        parents.push(rng.random_range(1..=k));
        birth.push(t);
    }
    Ok(RecursiveTree { parents, birth: Some(birth) })
}

/// Open/closed state of every vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SiteMarks {
    open: Vec<bool>,
}

impl SiteMarks {
    pub fn from_open(open: Vec<bool>) -> Self {
        Self { open }
    }

    /// Marks for `n` vertices read from the low bits of `mask`
    /// (bit `v - 1` is vertex `v`).
    pub fn from_mask(n: usize, mask: u64) -> Self {
        debug_assert!(n <= 64);
        Self { open: (0..n).map(|i| mask >> i & 1 == 1).collect() }
    }

    pub fn all(n: usize, open: bool) -> Self {
        Self { open: vec![open; n] }
    }

    pub fn len(&self) -> usize {
        self.open.len()
    }

    pub fn is_empty(&self) -> bool {
        self.open.is_empty()
    }

    /// `omega(v)` for a 1-based label.
    #[inline]
    pub fn is_open(&self, v: usize) -> bool {
        self.open[v - 1]
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.open
    }

    pub fn set(&mut self, v: usize, open: bool) {
        self.open[v - 1] = open;
    }

    pub fn open_count(&self) -> usize {
        self.open.iter().filter(|&&o| o).count()
    }

    pub(crate) fn check_covers(&self, tree: &RecursiveTree) -> Result<()> {
        if self.len() != tree.n() {
            return Err(Error::MarksMismatch { marks: self.len(), vertices: tree.n() });
        }
        Ok(())
    }
}

/// I.i.d. Bernoulli(`p`) marks, drawn in label order.
pub fn mark_sites<R: Rng + ?Sized>(tree: &RecursiveTree, p: f64, rng: &mut R) -> Result<SiteMarks> {
    check_probability(p)?;
    Ok(SiteMarks { open: (0..tree.n()).map(|_| rng.random_bool(p)).collect() })
}

/// Streams every recursive tree on `n` vertices, lexicographically in the
/// parent sequence `(parent(2), parent(3), ...)`.
#[derive(Debug, Clone)]
pub struct TreeEnumerator {
    n: usize,
    next: Option<Vec<u32>>,
}

impl TreeEnumerator {
    pub fn with_cap(n: usize, cap: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyTree);
        }
        if n > cap {
            return Err(Error::EnumerationCap { n, cap });
        }
        let mut first = vec![1u32; n];
        first[0] = 0;
        Ok(Self { n, next: Some(first) })
    }
}

impl Iterator for TreeEnumerator {
    type Item = RecursiveTree;

    fn next(&mut self) -> Option<RecursiveTree> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        // odometer: the last parent moves fastest, vertex v ranges over 1..v
        let mut v = self.n;
        while v >= 2 {
            if (succ[v - 1] as usize) < v - 1 {
                succ[v - 1] += 1;
                for s in succ.iter_mut().skip(v) {
                    *s = 1;
                }
                self.next = Some(succ);
                break;
            }
            v -= 1;
        }
        Some(RecursiveTree { parents: current, birth: None })
    }
}

/// All `(n-1)!` recursive trees on `n` vertices, capped at
/// [`DEFAULT_ENUMERATION_CAP`].
pub fn enumerate_recursive_trees(n: usize) -> Result<TreeEnumerator> {
    TreeEnumerator::with_cap(n, DEFAULT_ENUMERATION_CAP)
}

/// Graphviz description of the tree. Open sites are filled green and
/// closed sites red when marks are supplied.
pub fn export_dot(tree: &RecursiveTree, marks: Option<&SiteMarks>) -> String {
    let mut out = String::new();
    out.push_str("graph rrt {\n  node [shape=circle];\n");
    for v in 1..=tree.n() {
        match marks {
            Some(m) => {
                let color = if m.is_open(v) { "green" } else { "red" };
                let _ = writeln!(out, "  {v} [style=filled, fillcolor={color}];");
            }
            None => {
                let _ = writeln!(out, "  {v};");
            }
        }
    }
    for v in 2..=tree.n() {
        let _ = writeln!(out, "  {} -- {v};", tree.parents[v - 1]);
    }
    out.push_str("}\n");
    out
}

/// JSON form `{"n", "parent", "birth"?, "marks"?}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeRecord {
    pub n: usize,
    pub parent: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub birth: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub marks: Option<Vec<u8>>,
}

impl TreeRecord {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Validates the record and splits it into a tree and optional marks.
    pub fn into_parts(self) -> Result<(RecursiveTree, Option<SiteMarks>)> {
        if self.n == 0 {
            return Err(Error::EmptyTree);
        }
        if self.parent.len() != self.n - 1 {
            return Err(Error::InvalidRecord(format!(
                "parent array has {} entries, expected {}",
                self.parent.len(),
                self.n - 1
            )));
        }
        let mut tree = RecursiveTree::from_parents(&self.parent)?;
        if let Some(birth) = self.birth {
            tree = tree.with_birth_times(birth)?;
        }
        let marks = match self.marks {
            None => None,
            Some(bits) => {
                if bits.len() != self.n {
                    return Err(Error::InvalidRecord(format!(
                        "marks array has {} entries, expected {}",
                        bits.len(),
                        self.n
                    )));
                }
                let open = bits
                    .into_iter()
                    .map(|b| match b {
                        0 => Ok(false),
                        1 => Ok(true),
                        other => Err(Error::InvalidRecord(format!("mark {other} is not 0 or 1"))),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Some(SiteMarks::from_open(open))
            }
        };
        Ok((tree, marks))
    }
}
