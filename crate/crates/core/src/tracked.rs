//! Exact sampler for the first `K` bond clusters of a percolated random
//! recursive tree, without building the rest of the tree.
//!
//! Until the `K`-th cluster root appears every vertex is simulated. After
//! that only the tracked mass `T` matters: vertex `j` joins a tracked
//! cluster iff it is open and attaches to one of the `T` tracked vertices
//! among the `j - 1` present, which has probability `a / (j - 1)` with
//! `a = pT`. The survival function between such events is
//! `prod_{l=L}^{j-1} (1 - a/l) = exp(g(j) - g(L))` with
//! `g(x) = ln Γ(x - a) - ln Γ(x)`, which is inverted directly when gaps are
//! long. The joining vertex picks a uniform tracked vertex, so it either
//! starts a new root-isolation piece (parent is a cluster root) or grows an
//! existing piece.

use rand::Rng;

use crate::error::{check_probability, Error, Result};
use crate::special::ln_gamma_ratio;

/// Gaps shorter than this (in expectation) are stepped vertex by vertex.
const DENSE_GAP: f64 = 16.0;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrackedCluster {
    /// Label of the cluster root.
    pub root: u64,
    pub size: u64,
    /// `pieces[0] = 1` is the root; `pieces[j]` for `j >= 1` is the subtree
    /// of the `j`-th child of the root inside the cluster, in birth order.
    pub pieces: Vec<u64>,
}

impl TrackedCluster {
    /// Size of piece `j`, 0 if it does not exist.
    pub fn piece(&self, j: usize) -> u64 {
        self.pieces.get(j).copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrackedClusters {
    pub n: u64,
    /// Whether vertex 1 is open.
    pub root_open: bool,
    /// The first `K` bond clusters by root label (fewer if the tree has fewer).
    pub clusters: Vec<TrackedCluster>,
}

impl TrackedClusters {
    /// Size of the site cluster containing vertex 1: the whole first bond
    /// cluster if vertex 1 is open, otherwise the closed singleton.
    pub fn root_site_cluster(&self) -> u64 {
        if self.root_open {
            self.clusters[0].size
        } else {
            1
        }
    }
}

struct State {
    p: f64,
    clusters: Vec<TrackedCluster>,
    // flat (cluster, piece) index of each block, for uniform vertex choice
    tracked: u64,
}

impl State {
    /// Attach an open vertex to a uniformly chosen tracked vertex.
    fn join<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let mut r = rng.random_range(0..self.tracked);
        for c in &mut self.clusters {
            if r >= c.size {
                r -= c.size;
                continue;
            }
            if r == 0 {
                c.pieces.push(1);
            } else {
                r -= 1;
                let j = c.pieces[1..]
                    .iter()
                    .position(|&s| {
                        if r < s {
                            true
                        } else {
                            r -= s;
                            false
                        }
                    })
                    .expect("r below cluster size");
                c.pieces[j + 1] += 1;
            }
            c.size += 1;
            self.tracked += 1;
            return;
        }
        unreachable!("tracked vertex index below tracked mass");
    }
}

// ln of prod_{l=L}^{j-1} (1 - a/l), as g(j) - g(L)
fn g(x: f64, a: f64) -> f64 {
    ln_gamma_ratio(x - a, a)
}

/// Next vertex label in `[j0, n]` that joins the tracked clusters, if any.
fn next_event<R: Rng + ?Sized>(j0: u64, n: u64, a: f64, rng: &mut R) -> Option<u64> {
    let existing = (j0 - 1) as f64;
    if existing / a < DENSE_GAP {
        let mut j = j0;
        while j <= n {
            if rng.random::<f64>() * ((j - 1) as f64) < a {
                return Some(j);
            }
            j += 1;
            if (j - 1) as f64 / a >= DENSE_GAP {
                return next_event(j, n, a, rng);
            }
        }
        return None;
    }
    let ln_u = rng.random::<f64>().ln();
    let base = g(existing, a);
    let hit = |j: u64| g(j as f64, a) - base < ln_u;
    if !hit(n) {
        return None;
    }
    // guess from Γ(j - a) / Γ(j) ~ (j - c)^{-a}, c = (a + 1) / 2
    let c = 0.5 * (a + 1.0);
    let guess = c + (existing - c) * (-ln_u / a).exp();
    let guess = (guess.ceil() as u64).clamp(j0, n);
    // smallest j with hit(j); hit(j0 - 1) is false since the product is empty
    let (mut lo, mut hi);
    if hit(guess) {
        hi = guess;
        let mut step = 1;
        loop {
            let probe = guess.saturating_sub(step);
            if probe < j0 {
                lo = j0 - 1;
                break;
            }
            if !hit(probe) {
                lo = probe;
                break;
            }
            hi = probe;
            step *= 2;
        }
    } else {
        lo = guess;
        let mut step = 1;
        loop {
            let probe = (guess + step).min(n);
            if hit(probe) {
                hi = probe;
                break;
            }
            lo = probe;
            step *= 2;
        }
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if hit(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// Samples the first `k` bond clusters (with their root-isolation pieces)
/// of a bond-percolated uniform recursive tree on `n` vertices.
pub fn sample_tracked_clusters<R: Rng + ?Sized>(n: u64, p: f64, k: usize, rng: &mut R) -> Result<TrackedClusters> {
    check_probability(p)?;
    if n == 0 {
        return Err(Error::EmptyTree);
    }
    if k == 0 {
        return Err(Error::OutOfRange("track at least one cluster".into()));
    }
    let root_open = rng.random_bool(p);
    let mut state = State {
        p,
        clusters: vec![TrackedCluster { root: 1, size: 1, pieces: vec![1] }],
        tracked: 1,
    };
    // (cluster, piece) of every vertex until the k-th root is born
    let mut label: Vec<(usize, usize)> = vec![(0, 0)];
    let mut v = 2u64;
    while v <= n && state.clusters.len() < k {
        let parent = rng.random_range(0..label.len());
        if rng.random_bool(p) {
            let (c, j) = label[parent];
            let cluster = &mut state.clusters[c];
            let piece = if j == 0 {
                cluster.pieces.push(0);
                cluster.pieces.len() - 1
            } else {
                j
            };
            cluster.pieces[piece] += 1;
            cluster.size += 1;
            label.push((c, piece));
        } else {
            state.clusters.push(TrackedCluster { root: v, size: 1, pieces: vec![1] });
            label.push((state.clusters.len() - 1, 0));
        }
        state.tracked += 1;
        v += 1;
    }
    drop(label);
    let mut j0 = v;
    while j0 <= n {
        let a = state.p * state.tracked as f64;
        match next_event(j0, n, a, rng) {
            Some(j) => {
                state.join(rng);
                j0 = j + 1;
            }
            None => break,
        }
    }
    Ok(TrackedClusters { n, root_open, clusters: state.clusters })
}
