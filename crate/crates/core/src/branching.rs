//! The multi-type branching process `Z_t` behind the cluster census and
//! its finite truncation `Z^(h)`.
//!
//! Individuals are open clusters (type `k >= 1`, `k` vertices) or closed
//! vertices (type 0). Every vertex rings at rate 1; the new vertex is closed
//! with probability `1 - p`, otherwise it joins the ringing vertex's cluster
//! (a type-0 parent starts a fresh type-1 cluster). In the truncated process
//! clusters that would grow past size `h` are dissolved into "over-weighted"
//! vertices, which behave like vertices of an unbounded cluster.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, Exp1, Geometric};

use crate::error::{check_probability, Error, Result};
use crate::limits::LimitLaw;
use crate::percolation::{ClusterCensus, PercolationKind};
use crate::stats::linear_fit;

/// Default ceiling on the tracked size class of the untruncated process.
pub const DEFAULT_CLASS_CEILING: usize = 1 << 20;

/// Minimum `t_end` accepted by [`estimate_malthusian`].
pub const DEFAULT_MIN_MALTHUSIAN_T: f64 = 4.0;

/// Snapshot of the process.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchingState {
    /// `census.count(k)` is the number of type-`k` individuals.
    pub census: ClusterCensus,
    /// Over-weighted vertices (always 0 for the untruncated process).
    pub overweight: u64,
    pub t: f64,
    /// Truncation level, `None` for the full process.
    pub h: Option<usize>,
}

impl BranchingState {
    /// `N_t = Z(0) + sum_k k Z(k) + overweight`.
    pub fn total(&self) -> u64 {
        self.census.n() + self.overweight
    }
}

/// When to stop a trajectory. At least one bound must be set.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StopRule {
    pub t_end: Option<f64>,
    /// Stop as soon as `N_t` reaches this value (realizes `tau_n`).
    pub n_end: Option<u64>,
}

impl StopRule {
    pub fn at_time(t: f64) -> Self {
        Self { t_end: Some(t), n_end: None }
    }

    pub fn at_size(n: u64) -> Self {
        Self { t_end: None, n_end: Some(n) }
    }
}

/// Sampling and bookkeeping options for a run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimOptions {
    pub stop: StopRule,
    /// Record `(t, N_t)` at these times (must be increasing).
    pub sample_times: Vec<f64>,
    /// Also store the census at each sample time.
    pub record_census: bool,
    pub class_ceiling: usize,
}

impl SimOptions {
    pub fn new(stop: StopRule) -> Self {
        Self { stop, sample_times: Vec::new(), record_census: false, class_ceiling: DEFAULT_CLASS_CEILING }
    }

    /// Sample every `dt` on `(0, t_end]`.
    pub fn with_grid(mut self, dt: f64) -> Self {
        if let Some(t_end) = self.stop.t_end {
            let steps = (t_end / dt).floor() as usize;
            self.sample_times = (1..=steps).map(|i| i as f64 * dt).collect();
        }
        self
    }

    pub fn with_census(mut self) -> Self {
        self.record_census = true;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub total: u64,
    pub overweight: u64,
    pub census: Option<ClusterCensus>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub p: f64,
    pub samples: Vec<TrajectorySample>,
    pub final_state: BranchingState,
    pub events: u64,
}

impl Trajectory {
    /// CSV rows `t,k,count` for every recorded census; the over-weighted
    /// count, if any, is written with `k = overweight`.
    pub fn census_csv(&self) -> String {
        let mut out = String::from("t,k,count\n");
        for s in &self.samples {
            if let Some(c) = &s.census {
                for (k, &count) in c.counts().iter().enumerate() {
                    if count > 0 {
                        let _ = writeln!(out, "{},{k},{count}", s.t);
                    }
                }
                if s.overweight > 0 {
                    let _ = writeln!(out, "{},overweight,{}", s.t, s.overweight);
                }
            }
        }
        out
    }
}

/// Fenwick tree over size-class weights, growable up to a ceiling.
#[derive(Debug, Clone)]
struct ClassRates {
    tree: Vec<u64>,
    weight: Vec<u64>,
}

impl ClassRates {
    fn with_capacity(cap: usize) -> Self {
        let cap = cap.next_power_of_two();
        Self { tree: vec![0; cap + 1], weight: vec![0; cap] }
    }

    fn capacity(&self) -> usize {
        self.weight.len()
    }

    fn grow(&mut self, need: usize) {
        let cap = (need + 1).next_power_of_two();
        let mut weight = std::mem::take(&mut self.weight);
        weight.resize(cap, 0);
        self.tree = vec![0; cap + 1];
        for (i, &w) in weight.iter().enumerate() {
            let mut j = i + 1;
            while j <= cap {
                self.tree[j] += w;
                j += j & j.wrapping_neg();
            }
        }
        self.weight = weight;
    }

    fn add(&mut self, class: usize, delta: i64) {
        self.weight[class] = self.weight[class].wrapping_add_signed(delta);
        let mut j = class + 1;
        while j < self.tree.len() {
            self.tree[j] = self.tree[j].wrapping_add_signed(delta);
            j += j & j.wrapping_neg();
        }
    }

    /// Class `c` with `prefix(c) <= target < prefix(c + 1)`.
    fn find(&self, mut target: u64) -> usize {
        let mut pos = 0;
        let mut step = self.capacity();
        while step > 0 {
            let next = pos + step;
            if next < self.tree.len() && self.tree[next] <= target {
                pos = next;
                target -= self.tree[next];
            }
            step >>= 1;
        }
        pos
    }
}

/// Shared Gillespie engine. Class index `k` holds the individuals of type
/// `k`; in truncated mode index `h + 1` holds the over-weighted vertices.
struct Engine {
    p: f64,
    h: Option<usize>,
    counts: Vec<u64>,
    rates: ClassRates,
    total: u64,
    ceiling: usize,
}

impl Engine {
    fn new(p: f64, h: Option<usize>, ceiling: usize) -> Self {
        let cap = h.map_or(64, |h| h + 2);
        Self { p, h, counts: vec![0; cap], rates: ClassRates::with_capacity(cap), total: 0, ceiling }
    }

    fn overweight_class(&self) -> Option<usize> {
        self.h.map(|h| h + 1)
    }

    fn weight_of(&self, class: usize) -> u64 {
        if class == 0 || Some(class) == self.overweight_class() {
            1
        } else {
            class as u64
        }
    }

    fn change(&mut self, class: usize, delta: i64) -> Result<()> {
        if class >= self.counts.len() {
            if class > self.ceiling {
                return Err(Error::ClassCeilingExceeded { class, ceiling: self.ceiling });
            }
            let cap = (class + 1).next_power_of_two();
            self.counts.resize(cap, 0);
            self.rates.grow(cap);
        }
        self.counts[class] = self.counts[class].wrapping_add_signed(delta);
        let w = self.weight_of(class) as i64 * delta;
        self.rates.add(class, w);
        self.total = self.total.wrapping_add_signed(w);
        Ok(())
    }

    /// Open vertex born next to a vertex of the given class.
    fn grow_class(&mut self, class: usize) -> Result<()> {
        match (class, self.h) {
            (0, _) => self.change(1, 1),
            (k, Some(h)) if k == h => {
                self.change(k, -1)?;
                self.change(h + 1, (h + 1) as i64)
            }
            (k, Some(h)) if k == h + 1 => self.change(k, 1),
            (k, _) => {
                self.change(k, -1)?;
                self.change(k + 1, 1)
            }
        }
    }

    fn start<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<()> {
        if rng.random_bool(self.p) {
            self.grow_class(0)
        } else {
            self.change(0, 1)
        }
    }

    fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<()> {
        let target = rng.random_range(0..self.total);
        let class = self.rates.find(target);
        debug_assert!(self.counts[class] > 0, "selected class {class} has zero rate");
        if rng.random_bool(self.p) {
            self.grow_class(class)
        } else {
            self.change(0, 1)
        }
    }

    fn state(&self, t: f64) -> BranchingState {
        let (census, overweight) = match self.h {
            Some(h) => (&self.counts[..=h], self.counts.get(h + 1).copied().unwrap_or(0)),
            None => (&self.counts[..], 0),
        };
        let census = ClusterCensus::new(PercolationKind::Site, census.to_vec()).expect("engine keeps a valid census");
        BranchingState { census, overweight, t, h: self.h }
    }

    fn overweight(&self) -> u64 {
        self.overweight_class().and_then(|c| self.counts.get(c).copied()).unwrap_or(0)
    }
}

fn run<R: Rng + ?Sized>(p: f64, h: Option<usize>, opts: &SimOptions, rng: &mut R) -> Result<Trajectory> {
    check_probability(p)?;
    if opts.stop.t_end.is_none() && opts.stop.n_end.is_none() {
        return Err(Error::MissingStopCondition);
    }
    let t_end = opts.stop.t_end.unwrap_or(f64::INFINITY);
    let n_end = opts.stop.n_end.unwrap_or(u64::MAX);
    let mut engine = Engine::new(p, h, opts.class_ceiling);
    engine.start(rng)?;
    let mut t = 0.0;
    let mut events = 0u64;
    let mut samples = Vec::with_capacity(opts.sample_times.len());
    let mut next_sample = 0;
    loop {
        if engine.total >= n_end {
            break;
        }
        let wait: f64 = Exp1.sample(rng);
        let t_next = t + wait / engine.total as f64;
        while next_sample < opts.sample_times.len() && opts.sample_times[next_sample] < t_next.min(t_end) {
            let ts = opts.sample_times[next_sample];
            samples.push(TrajectorySample {
                t: ts,
                total: engine.total,
                overweight: engine.overweight(),
                census: opts.record_census.then(|| engine.state(ts).census),
            });
            next_sample += 1;
        }
        if t_next > t_end {
            t = t_end;
            break;
        }
        t = t_next;
        engine.step(rng)?;
        events += 1;
    }
    // sample times at exactly t_end
    while next_sample < opts.sample_times.len() && opts.sample_times[next_sample] <= t {
        let ts = opts.sample_times[next_sample];
        samples.push(TrajectorySample {
            t: ts,
            total: engine.total,
            overweight: engine.overweight(),
            census: opts.record_census.then(|| engine.state(ts).census),
        });
        next_sample += 1;
    }
    Ok(Trajectory { p, samples, final_state: engine.state(t), events })
}

/// Event-driven simulation of the untruncated process from one individual.
pub fn simulate_z<R: Rng + ?Sized>(p: f64, opts: &SimOptions, rng: &mut R) -> Result<Trajectory> {
    run(p, None, opts, rng)
}

/// Simulation of the truncated process `Z^(h)`.
pub fn simulate_z_truncated<R: Rng + ?Sized>(p: f64, h: usize, opts: &SimOptions, rng: &mut R) -> Result<Trajectory> {
    run(p, Some(h), opts, rng)
}

/// Eigenvector `nu^(h)(0..=h+1)` of the truncated system with eigenvalue 1
/// and `nu(0) = 1 - p`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSolution {
    pub p: f64,
    pub h: usize,
    /// From the dense LU solve.
    pub nu: Vec<f64>,
    /// From the recursion `nu(k+1) = k / (k + 1 + 1/p) nu(k)`.
    pub iterated: Vec<f64>,
    /// Largest relative gap between the two.
    pub agreement: f64,
    /// Residual of the type-0 balance row, which is implied by the others.
    pub balance_residual: f64,
}

impl EigenSolution {
    /// Largest relative error of `nu(k)`, `1 <= k <= h`, against `c_p B(1 + 1/p, k)`.
    pub fn closed_form_error(&self) -> f64 {
        let law = LimitLaw::new(self.p).expect("validated p");
        (1..=self.h)
            .map(|k| {
                let exact = law.nu(k as u64);
                ((self.nu[k] - exact) / exact).abs()
            })
            .fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,nu\n");
        for (k, v) in self.nu.iter().enumerate() {
            let _ = writeln!(out, "{k},{v}");
        }
        out
    }
}

/// Relative agreement required between the two solution routes.
pub const EIGEN_AGREEMENT_TOL: f64 = 1e-12;

/// Solves the truncated eigenvector system twice and checks the routes agree.
///
/// Rows: `nu(1) = p (nu(0) - nu(1))`, `nu(k) = p ((k-1) nu(k-1) - k nu(k))`
/// for `2 <= k <= h`, and `nu(h+1) = p (h (h+1) nu(h) + nu(h+1))`; for `h = 0`
/// the last row reads `nu(1) = p (nu(0) + nu(1))`. Together with
/// `nu(0) = 1 - p` these form a lower-triangular system.
pub fn solve_truncated_eigenvector(p: f64, h: usize) -> Result<EigenSolution> {
    check_probability(p)?;
    let dim = h + 2;
    let mut a = DMatrix::<f64>::zeros(dim, dim);
    let mut b = DVector::<f64>::zeros(dim);
    a[(0, 0)] = 1.0;
    b[0] = 1.0 - p;
    if h == 0 {
        a[(1, 0)] = -p;
        a[(1, 1)] = 1.0 - p;
    } else {
        a[(1, 0)] = -p;
        a[(1, 1)] = 1.0 + p;
        for k in 2..=h {
            a[(k, k - 1)] = -p * (k - 1) as f64;
            a[(k, k)] = 1.0 + p * k as f64;
        }
        a[(h + 1, h)] = -p * (h * (h + 1)) as f64;
        a[(h + 1, h + 1)] = 1.0 - p;
    }
    let nu: Vec<f64> = a
        .clone()
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::LinearSolve("singular system".into()))?
        .iter()
        .copied()
        .collect();
    let residual = (&a * DVector::from_column_slice(&nu) - &b).amax();
    if !(residual <= 1e-12) {
        return Err(Error::LinearSolve(format!("residual {residual:e}")));
    }

    let mut iterated = vec![0.0; dim];
    iterated[0] = 1.0 - p;
    if h == 0 {
        iterated[1] = p;
    } else {
        iterated[1] = iterated[0] / (1.0 + 1.0 / p);
        for k in 1..h {
            iterated[k + 1] = k as f64 / (k as f64 + 1.0 + 1.0 / p) * iterated[k];
        }
        iterated[h + 1] = p * (h * (h + 1)) as f64 * iterated[h] / (1.0 - p);
    }

    let agreement = nu.iter().zip(&iterated).map(|(x, y)| ((x - y) / y).abs()).fold(0.0, f64::max);
    if !(agreement <= EIGEN_AGREEMENT_TOL) {
        return Err(Error::LinearSolve(format!("routes disagree by {agreement:e}")));
    }
    let mass: f64 = nu[0] + (1..=h).map(|k| k as f64 * nu[k]).sum::<f64>() + nu[h + 1];
    let balance_residual = (nu[0] - (1.0 - p) * mass).abs();
    Ok(EigenSolution { p, h, nu, iterated, agreement, balance_residual })
}

/// Growth-rate estimate from one trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MalthusianEstimate {
    /// Slope of `ln N_t` against `t` over `[t_end / 2, t_end]`.
    pub slope: f64,
    /// `e^{-t} N_t` at the last sample.
    pub limit_sample: f64,
    pub points: usize,
}

/// Regression slope of `ln N_t` on the trajectory tail.
pub fn estimate_malthusian(trajectory: &Trajectory, min_t: f64) -> Result<MalthusianEstimate> {
    let t_end = trajectory.final_state.t;
    if t_end < min_t {
        return Err(Error::InsufficientTrajectory(format!("t_end = {t_end} below {min_t}")));
    }
    estimate_from_points(trajectory.samples.iter().map(|s| (s.t, s.total as f64)), t_end)
}

/// Same estimate from bare `(t, N_t)` pairs, e.g. when only counts were kept.
pub fn estimate_from_points(points: impl IntoIterator<Item = (f64, f64)>, t_end: f64) -> Result<MalthusianEstimate> {
    let (xs, ys): (Vec<f64>, Vec<f64>) =
        points.into_iter().filter(|(t, _)| *t >= t_end / 2.0).map(|(t, n)| (t, n.ln())).unzip();
    if xs.len() < 2 {
        return Err(Error::InsufficientTrajectory(format!("{} samples in the tail window", xs.len())));
    }
    let fit = linear_fit(&xs, &ys)?;
    let (t, ln_n) = (xs[xs.len() - 1], ys[ys.len() - 1]);
    Ok(MalthusianEstimate { slope: fit.slope, limit_sample: (ln_n - t).exp(), points: xs.len() })
}

/// `<census, f> = sum_k census(k) f(k)`.
pub fn pair_census(census: &ClusterCensus, f: impl Fn(usize) -> f64) -> f64 {
    census.pair(f)
}

/// One draw of `G_t / N_t^p` where `N` is a rate-1 Yule process started
/// from one individual and `G_t` the open cluster of its root (a rate-`p`
/// Yule process). Converges in law to Mittag–Leffler(`p`) as `t -> inf`.
///
/// Only the root cluster is simulated; each closed child born at `s` roots
/// an independent Yule subtree whose size at `t` is geometric on `{1, 2, ...}`
/// with success probability `e^{-(t - s)}`.
pub fn yule_root_cluster_ratio<R: Rng + ?Sized>(p: f64, t: f64, rng: &mut R) -> Result<f64> {
    let (g, n) = yule_root_cluster(p, t, rng)?;
    Ok(g as f64 / (n as f64).powf(p))
}

/// `(G_t, N_t)` as in [`yule_root_cluster_ratio`].
pub fn yule_root_cluster<R: Rng + ?Sized>(p: f64, t: f64, rng: &mut R) -> Result<(u64, u64)> {
    check_probability(p)?;
    let mut g = 1u64;
    let mut outside = 0u64;
    let mut s = 0.0;
    loop {
        let wait: f64 = Exp1.sample(rng);
        s += wait / g as f64;
        if s >= t {
            break;
        }
        if rng.random_bool(p) {
            g += 1;
        } else {
            let geo = Geometric::new((s - t).exp()).expect("success probability in (0, 1]");
            outside += 1 + geo.sample(rng);
        }
    }
    Ok((g, g + outside))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;

    #[test]
    fn fenwick_find_matches_linear_scan() {
        let mut rates = ClassRates::with_capacity(5);
        let weights = [3u64, 0, 2, 5, 0, 1];
        rates.grow(6);
        for (c, &w) in weights.iter().enumerate() {
            rates.add(c, w as i64);
        }
        let mut target = 0;
        for (c, &w) in weights.iter().enumerate() {
            for _ in 0..w {
                assert_eq!(rates.find(target), c);
                target += 1;
            }
        }
        rates.grow(40);
        assert_eq!(rates.find(10), 5);
    }

    #[test]
    fn missing_stop_rule() {
        let mut rng = stream_rng(0, "z", 0);
        assert!(matches!(simulate_z(0.5, &SimOptions::new(StopRule::default()), &mut rng), Err(Error::MissingStopCondition)));
        assert!(simulate_z(1.5, &SimOptions::new(StopRule::at_time(1.0)), &mut rng).is_err());
    }

    #[test]
    fn start_state_distribution() {
        let mut rng = stream_rng(1, "start", 0);
        let reps = 20_000;
        let opts = SimOptions::new(StopRule::at_size(1));
        let ones = (0..reps)
            .filter(|_| simulate_z(0.3, &opts, &mut rng).unwrap().final_state.census.count(1) == 1)
            .count();
        let se = (0.3f64 * 0.7 / reps as f64).sqrt();
        assert!((ones as f64 / reps as f64 - 0.3).abs() < 4.0 * se);
    }

    #[test]
    fn stops_at_requested_size() {
        let mut rng = stream_rng(2, "size", 0);
        for n in [1u64, 2, 10, 500] {
            let tr = simulate_z(0.6, &SimOptions::new(StopRule::at_size(n)), &mut rng).unwrap();
            assert_eq!(tr.final_state.total(), n);
            assert_eq!(tr.events, n - 1);
        }
    }

    #[test]
    fn truncated_conservation() {
        let mut rng = stream_rng(3, "trunc", 0);
        for h in [0usize, 1, 3] {
            let opts = SimOptions::new(StopRule::at_time(5.0)).with_grid(0.25).with_census();
            let tr = simulate_z_truncated(0.7, h, &opts, &mut rng).unwrap();
            for s in &tr.samples {
                let c = s.census.as_ref().unwrap();
                assert!(c.max_class() <= h);
                assert_eq!(c.n() + s.overweight, s.total);
            }
            let end = &tr.final_state;
            assert_eq!(end.total(), tr.events + 1);
            if h == 0 {
                assert_eq!(end.census.max_class(), 0);
            }
        }
    }

    #[test]
    fn sample_grid_is_monotone() {
        let mut rng = stream_rng(4, "grid", 0);
        let opts = SimOptions::new(StopRule::at_time(3.0)).with_grid(0.5);
        let tr = simulate_z(0.5, &opts, &mut rng).unwrap();
        assert_eq!(tr.samples.len(), 6);
        assert!(tr.samples.windows(2).all(|w| w[0].total <= w[1].total));
        assert_eq!(tr.samples.last().unwrap().total, tr.final_state.total());
    }

    #[test]
    fn eigenvector_small_cases() {
        for p in [0.1, 0.5, 0.9] {
            let s = solve_truncated_eigenvector(p, 0).unwrap();
            assert!((s.nu[0] - (1.0 - p)).abs() < 1e-15);
            assert!((s.nu[1] - p).abs() < 1e-15);
        }
        let s = solve_truncated_eigenvector(0.5, 3).unwrap();
        assert!((s.nu[1] - 1.0 / 6.0).abs() < 1e-15);
        assert!(s.balance_residual < 1e-14);
        assert!(s.to_csv().starts_with("k,nu\n0,0.5\n"));
    }

    #[test]
    fn eigenvector_closed_form() {
        for p in [0.2, 0.5, 0.8] {
            let s = solve_truncated_eigenvector(p, 200).unwrap();
            assert!(s.closed_form_error() < 1e-12, "p={p}: {}", s.closed_form_error());
            assert!(s.balance_residual < 1e-12);
        }
    }

    #[test]
    fn malthusian_degenerate() {
        let pts = (0..10).map(|i| (i as f64, 7.0));
        let est = estimate_from_points(pts, 9.0).unwrap();
        assert_eq!(est.slope, 0.0);
        assert!(estimate_from_points([(1.0, 2.0)], 1.0).is_err());
    }

    #[test]
    fn pairing() {
        let c = ClusterCensus::new(PercolationKind::Site, vec![2, 1, 0, 1]).unwrap();
        assert_eq!(pair_census(&c, |k| k.max(1) as f64), 6.0);
        assert_eq!(pair_census(&c, |k| f64::from(u8::from(k == 0))), 2.0);
    }

    #[test]
    fn root_cluster_at_time_zero() {
        let mut rng = stream_rng(5, "yule", 0);
        assert_eq!(yule_root_cluster(0.5, 0.0, &mut rng).unwrap(), (1, 1));
        let (g, n) = yule_root_cluster(0.5, 3.0, &mut rng).unwrap();
        assert!(g >= 1 && n >= g);
    }
}
