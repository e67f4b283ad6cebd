//! Closed-form limit laws and samplers for the scaled cluster sizes.
//!
//! The Yule–Simon weights are `nu_p(0) = 1 - p` and
//! `nu_p(k) = (1 - p) B(1 + 1/p, k)` for `k >= 1`; bond percolation has the
//! same shape with constant `1/p - 1`. Infinite sums over these weights are
//! split into an explicit partial sum and a closed-form remainder obtained
//! by telescoping, e.g. `sum_{k >= K} k B(a, k) = Γ(a) Γ(K+1) / ((a-2) Γ(a+K-1))`.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::distr::Open01;
use rand::Rng;
use rand_distr::{Distribution, Exp1, Geometric};

use crate::error::{check_probability, Error, Result};
use crate::special::{ln_beta, ln_gamma, ln_gamma_ratio};

/// Number of explicitly summed terms before switching to the closed-form tail.
pub const SERIES_TERMS: usize = 20_000;

/// `nu_p` and the bond-percolation constants for a fixed `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitLaw {
    p: f64,
    c_p: f64,
    c_tilde_p: f64,
}

impl LimitLaw {
    pub fn new(p: f64) -> Result<Self> {
        check_probability(p)?;
        Ok(Self { p, c_p: 1.0 - p, c_tilde_p: 1.0 / p - 1.0 })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn c_p(&self) -> f64 {
        self.c_p
    }

    pub fn c_tilde_p(&self) -> f64 {
        self.c_tilde_p
    }

    /// Shape `a = 1 + 1/p` of the Beta weights.
    pub fn shape(&self) -> f64 {
        1.0 + 1.0 / self.p
    }

    /// `ln B(1 + 1/p, k)` for `k >= 1`.
    pub fn ln_beta_weight(&self, k: u64) -> f64 {
        ln_gamma(self.shape()) + ln_gamma_ratio(k as f64, self.shape())
    }

    /// Site limit proportion `nu_p(k)`.
    pub fn nu(&self, k: u64) -> f64 {
        if k == 0 {
            self.c_p
        } else {
            self.c_p * self.ln_beta_weight(k).exp()
        }
    }

    /// Bond limit proportion `c~_p B(1 + 1/p, k)` for `k >= 1`.
    pub fn bond(&self, k: u64) -> f64 {
        if k == 0 {
            0.0
        } else {
            self.c_tilde_p * self.ln_beta_weight(k).exp()
        }
    }

    /// `sum_{k >= from} B(a, k)`, exact.
    fn beta_tail(&self, from: u64) -> f64 {
        let a = self.shape();
        (ln_gamma(a) + ln_gamma_ratio(from as f64, a - 1.0)).exp() / (a - 1.0)
    }

    /// `sum_{k >= from} k B(a, k)`, exact (`a > 2` since `p < 1`).
    fn weighted_beta_tail(&self, from: u64) -> f64 {
        let a = self.shape();
        (ln_gamma(a) + ln_gamma_ratio(from as f64 + 1.0, a - 2.0)).exp() / (a - 2.0)
    }

    /// Envelope `Γ(a) sum_{k > K} k^{e}` with `e < -1`, bounded by the integral.
    fn power_tail_bound(&self, last: u64, exponent: f64) -> f64 {
        let k = last as f64;
        ln_gamma(self.shape()).exp() * k.powf(exponent + 1.0) / -(exponent + 1.0)
    }
}

/// `nu_p(k)`: `1 - p` at `k = 0`, `(1 - p) B(1 + 1/p, k)` otherwise.
pub fn yule_simon_pmf(p: f64, k: u64) -> Result<f64> {
    Ok(LimitLaw::new(p)?.nu(k))
}

/// Bond-percolation limit proportion `(1/p - 1) B(1 + 1/p, k)`, `k >= 1`.
pub fn bond_yule_simon_pmf(p: f64, k: u64) -> Result<f64> {
    let law = LimitLaw::new(p)?;
    if k == 0 {
        return Err(Error::OutOfRange("bond cluster sizes start at 1".into()));
    }
    Ok(law.bond(k))
}

/// A truncated infinite series: explicit partial sum plus a closed-form
/// remainder, with the cruder power-law envelope for the same remainder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesCheck {
    pub partial: f64,
    pub tail: f64,
    pub tail_bound: f64,
    pub total: f64,
    pub target: f64,
}

impl SeriesCheck {
    pub fn residual(&self) -> f64 {
        (self.total - self.target).abs()
    }
}

/// `<nu_p, x v 1> = (1 - p) + sum_k k nu_p(k)`, which should equal 1.
pub fn site_mass_check(p: f64) -> Result<SeriesCheck> {
    let law = LimitLaw::new(p)?;
    let terms = SERIES_TERMS as u64;
    let partial: f64 = law.c_p + (1..=terms).map(|k| k as f64 * law.nu(k)).sum::<f64>();
    let tail = law.c_p * law.weighted_beta_tail(terms + 1);
    let tail_bound = law.c_p * law.power_tail_bound(terms, -law.shape() + 1.0);
    Ok(SeriesCheck { partial, tail, tail_bound, total: partial + tail, target: 1.0 })
}

/// `sum_k k c~_p B(1 + 1/p, k)`, which should equal 1.
pub fn bond_mass_check(p: f64) -> Result<SeriesCheck> {
    let law = LimitLaw::new(p)?;
    let terms = SERIES_TERMS as u64;
    let partial: f64 = (1..=terms).map(|k| k as f64 * law.bond(k)).sum();
    let tail = law.c_tilde_p * law.weighted_beta_tail(terms + 1);
    let tail_bound = law.c_tilde_p * law.power_tail_bound(terms, -law.shape() + 1.0);
    Ok(SeriesCheck { partial, tail, tail_bound, total: partial + tail, target: 1.0 })
}

/// Residual of `(c~_p / j) sum_{k >= j} B(1+1/p, k+1) = c_p B(1+1/p, j)`.
pub fn beta_series_identity_check(p: f64, j: u64) -> Result<SeriesCheck> {
    let law = LimitLaw::new(p)?;
    if j == 0 {
        return Err(Error::OutOfRange("j starts at 1".into()));
    }
    let last = j + SERIES_TERMS as u64;
    let scale = law.c_tilde_p / j as f64;
    let partial: f64 = scale * (j..=last).map(|k| law.ln_beta_weight(k + 1).exp()).sum::<f64>();
    let tail = scale * law.beta_tail(last + 2);
    let tail_bound = scale * law.power_tail_bound(last + 1, -law.shape());
    let target = law.nu(j);
    Ok(SeriesCheck { partial, tail, tail_bound, total: partial + tail, target })
}

/// `|ln Γ(1/p) + ln Γ(j+1) - ln(p j) - ln Γ(1+1/p) - ln Γ(j)|`.
pub fn gamma_identity_residual(p: f64, j: u64) -> Result<f64> {
    check_probability(p)?;
    let jf = j as f64;
    let lhs = ln_gamma(1.0 / p) + ln_gamma(jf + 1.0);
    let rhs = (p * jf).ln() + ln_gamma(1.0 + 1.0 / p) + ln_gamma(jf);
    Ok((lhs - rhs).abs())
}

fn ewens_mass(k: usize, a: &[u32]) -> bool {
    a.iter().enumerate().map(|(i, &m)| (i + 1) * m as usize).sum::<usize>() == k
}

/// Ewens probability `prod_j 1 / (j^{a_j} a_j!)` of the multiplicities
/// `a = (a_1, a_2, ...)` for the subtree sizes left after removing the
/// root of a uniform recursive tree on `k + 1` vertices. Zero when
/// `sum_j j a_j != k`.
pub fn ewens_pmf(k: usize, a: &[u32]) -> f64 {
    if !ewens_mass(k, a) {
        return 0.0;
    }
    let ln: f64 = a
        .iter()
        .enumerate()
        .map(|(i, &m)| m as f64 * ((i + 1) as f64).ln() + ln_gamma(m as f64 + 1.0))
        .sum();
    (-ln).exp()
}

/// [`ewens_pmf`] in exact rational arithmetic.
pub fn ewens_pmf_exact(k: usize, a: &[u32]) -> BigRational {
    if !ewens_mass(k, a) {
        return BigRational::zero();
    }
    let mut denom = BigInt::one();
    for (i, &m) in a.iter().enumerate() {
        let j = BigInt::from(i + 1);
        for f in 1..=m {
            denom *= &j * BigInt::from(f);
        }
    }
    BigRational::new(BigInt::one(), denom)
}

/// `(E[C_k(j)], E[C_k(j)^2])`: `(1/j, 1/j + 1/j^2)` when `2j <= k`. For
/// `2j > k` at most one block of size `j` fits, so the second moment is `1/j`.
pub fn ewens_moments(k: usize, j: usize) -> Result<(f64, f64)> {
    if j == 0 || j > k {
        return Err(Error::OutOfRange(format!("j = {j} outside 1..={k}")));
    }
    let inv = 1.0 / j as f64;
    let pairs = if 2 * j <= k { inv * inv } else { 0.0 };
    Ok((inv, inv + pairs))
}

/// Mittag–Leffler law with parameter `p`: `S^{-p}` for `S` positive
/// `p`-stable with Laplace transform `exp(-s^p)`.
///
/// `S` comes from Kanter's representation `S = (A(U) / E)^{(1-p)/p}` with
/// `U` uniform, `E` standard exponential and
/// `A(u) = (sin(p pi u) / sin(pi u))^{1/(1-p)} sin((1-p) pi u) / sin(p pi u)`,
/// so the sample is `(E / A(U))^{1-p}`. Moments are `k! / Γ(1 + k p)`.
#[derive(Debug, Clone, Copy)]
pub struct MittagLeffler {
    p: f64,
}

impl MittagLeffler {
    pub fn new(p: f64) -> Result<Self> {
        check_probability(p)?;
        Ok(Self { p })
    }

    /// `E[M^k] = k! / Γ(1 + k p)`.
    pub fn moment(&self, k: u32) -> f64 {
        (ln_gamma(f64::from(k) + 1.0) - ln_gamma(1.0 + f64::from(k) * self.p)).exp()
    }
}

impl Distribution<f64> for MittagLeffler {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let p = self.p;
        let u: f64 = rng.sample(Open01);
        let e: f64 = Exp1.sample(rng);
        let pi_u = std::f64::consts::PI * u;
        let ln_a = ((p * pi_u).sin().ln() - pi_u.sin().ln()) / (1.0 - p) + ((1.0 - p) * pi_u).sin().ln()
            - (p * pi_u).sin().ln();
        ((1.0 - p) * (e.ln() - ln_a)).exp()
    }
}

pub fn sample_mittag_leffler<R: Rng + ?Sized>(p: f64, rng: &mut R) -> Result<f64> {
    Ok(MittagLeffler::new(p)?.sample(rng))
}

/// Label of the `i`-th bond cluster root: `sigma_1 = 1` and
/// `sigma_j = sigma_{j-1} + G_j` with `G_j >= 1` geometric of success `1 - p`.
pub fn sample_sigma<R: Rng + ?Sized>(p: f64, i: u64, rng: &mut R) -> Result<u64> {
    check_probability(p)?;
    if i == 0 {
        return Err(Error::OutOfRange("cluster index starts at 1".into()));
    }
    let geo = Geometric::new(1.0 - p).expect("1 - p in (0, 1)");
    Ok((1..i).fold(1u64, |s, _| s + 1 + geo.sample(rng)))
}

/// `Beta(1, b)` by inversion, with `Beta(1, 0)` the point mass at 1.
pub fn sample_beta_one<R: Rng + ?Sized>(b: u64, rng: &mut R) -> f64 {
    if b == 0 {
        return 1.0;
    }
    let u: f64 = rng.sample(Open01);
    -(u.ln() / b as f64).exp_m1()
}

/// Marginal draw of the `i`-th bond limit `W~_i = W~_{1,i} beta_{sigma_i}^p`.
pub fn sample_limit_bond<R: Rng + ?Sized>(p: f64, i: u64, rng: &mut R) -> Result<f64> {
    let ml = MittagLeffler::new(p)?;
    let sigma = sample_sigma(p, i, rng)?;
    let w = ml.sample(rng);
    let beta = sample_beta_one(sigma - 1, rng);
    Ok(w * beta.powf(p))
}

/// Uniform stick breaking: `V_j = U_j prod_{l<j} (1 - U_l)` for `j = 1..=j_max`.
pub fn sample_stick_breaking<R: Rng + ?Sized>(rng: &mut R, j_max: usize) -> Result<Vec<f64>> {
    if j_max == 0 {
        return Err(Error::OutOfRange("j_max must be at least 1".into()));
    }
    let mut remaining = 1.0;
    let mut out = Vec::with_capacity(j_max);
    for _ in 0..j_max {
        let u: f64 = rng.random();
        out.push(remaining * u);
        remaining *= 1.0 - u;
    }
    Ok(out)
}

/// One marginal draw of a site limit `W~_i V_{i,j}` with its two factors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiteLimitDraw {
    pub i: u64,
    pub j: u64,
    pub bond_factor: f64,
    pub stick: f64,
    pub value: f64,
}

/// Marginal draw of `W~_i V_{i,j}`; `j = 0` is the isolated root and gives 0.
pub fn sample_limit_site_detailed<R: Rng + ?Sized>(p: f64, i: u64, j: u64, rng: &mut R) -> Result<SiteLimitDraw> {
    check_probability(p)?;
    if i == 0 {
        return Err(Error::OutOfRange("cluster index starts at 1".into()));
    }
    if j == 0 {
        return Ok(SiteLimitDraw { i, j, bond_factor: 0.0, stick: 0.0, value: 0.0 });
    }
    let bond_factor = sample_limit_bond(p, i, rng)?;
    let stick = *sample_stick_breaking(rng, j as usize)?.last().expect("j >= 1");
    Ok(SiteLimitDraw { i, j, bond_factor, stick, value: bond_factor * stick })
}

pub fn sample_limit_site<R: Rng + ?Sized>(p: f64, i: u64, j: u64, rng: &mut R) -> Result<f64> {
    Ok(sample_limit_site_detailed(p, i, j, rng)?.value)
}

/// `l^q` norm; `q = f64::INFINITY` gives the largest absolute entry.
pub fn lq_norm(v: &[f64], q: f64) -> Result<f64> {
    if q.is_nan() || q < 1.0 {
        return Err(Error::InvalidExponent(q));
    }
    if q.is_infinite() {
        return Ok(v.iter().fold(0.0f64, |m, x| m.max(x.abs())));
    }
    // scale by the largest entry so large q does not overflow
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return Ok(0.0);
    }
    let sum: f64 = v.iter().map(|x| (x.abs() / scale).powf(q)).sum();
    Ok(scale * sum.powf(1.0 / q))
}

/// Entries sorted in decreasing order.
pub fn rank_descending(v: &[f64]) -> Result<Vec<f64>> {
    if let Some((index, &value)) = v.iter().enumerate().find(|(_, x)| !(**x >= 0.0)) {
        return Err(Error::NegativeEntry { index, value });
    }
    let mut out = v.to_vec();
    out.sort_unstable_by(|a, b| b.total_cmp(a));
    Ok(out)
}

/// CSV table `k,pmf` of `nu_p(k)` for `k = 0..=k_max` (site) or the bond
/// proportions for `k = 1..=k_max`.
pub fn pmf_table_csv(p: f64, k_max: u64, bond: bool) -> Result<String> {
    let law = LimitLaw::new(p)?;
    let mut out = String::from("k,pmf\n");
    let start = u64::from(bond);
    for k in start..=k_max {
        let v = if bond { law.bond(k) } else { law.nu(k) };
        let _ = writeln!(out, "{k},{v}");
    }
    Ok(out)
}

/// `ln B(1 + 1/p, k)` via the generic Beta routine (for cross-checks).
pub fn ln_beta_generic(p: f64, k: u64) -> f64 {
    ln_beta(1.0 + 1.0 / p, k as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;

    #[test]
    fn pmf_values() {
        for p in [0.1, 0.5, 0.77] {
            assert_eq!(yule_simon_pmf(p, 0).unwrap(), 1.0 - p);
        }
        // B(3, 1) = 1/3
        assert!((yule_simon_pmf(0.5, 1).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert!((bond_yule_simon_pmf(0.5, 1).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(bond_yule_simon_pmf(0.5, 0).is_err());
        assert!(yule_simon_pmf(1.0, 3).is_err());
        assert!(yule_simon_pmf(0.0, 3).is_err());
    }

    #[test]
    fn pmf_ratio_recursion() {
        for p in [0.2, 0.5, 0.8] {
            let law = LimitLaw::new(p).unwrap();
            for k in 1..200u64 {
                let ratio = law.nu(k + 1) / law.nu(k);
                let expected = k as f64 / (k as f64 + 1.0 + 1.0 / p);
                assert!((ratio - expected).abs() < 1e-13 * expected);
                assert!(law.bond(k + 1) < law.bond(k));
            }
        }
    }

    #[test]
    fn generic_beta_agrees() {
        for p in [0.3, 0.6] {
            let law = LimitLaw::new(p).unwrap();
            for k in [1u64, 3, 50, 400] {
                assert!((law.ln_beta_weight(k) - ln_beta_generic(p, k)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn masses_sum_to_one() {
        for i in 2..=9 {
            let p = i as f64 / 10.0;
            let site = site_mass_check(p).unwrap();
            assert!(site.residual() < 1e-10, "p={p}: {site:?}");
            assert!(site.tail <= site.tail_bound * (1.0 + 1e-12));
            let bond = bond_mass_check(p).unwrap();
            assert!(bond.residual() < 1e-10, "p={p}: {bond:?}");
        }
    }

    #[test]
    fn beta_series_identity() {
        let c = beta_series_identity_check(0.5, 1).unwrap();
        assert!((c.total - 1.0 / 6.0).abs() < 1e-12);
        assert!((c.target - 1.0 / 6.0).abs() < 1e-15);
        assert!(c.residual() < 1e-12);
        for p in [0.2, 0.5, 0.8] {
            for j in 1..=50 {
                let c = beta_series_identity_check(p, j).unwrap();
                assert!(c.residual() < 1e-10, "p={p} j={j}: {c:?}");
                assert!(c.tail <= c.tail_bound * (1.0 + 1e-12));
                assert!(gamma_identity_residual(p, j).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn power_law_slope() {
        for i in 2..=9 {
            let p = i as f64 / 10.0;
            let law = LimitLaw::new(p).unwrap();
            let (mut sx, mut sy, mut sxx, mut sxy, mut m) = (0.0, 0.0, 0.0, 0.0, 0.0);
            for k in 100..=10_000u64 {
                let x = (k as f64).ln();
                let y = law.nu(k).ln();
                sx += x;
                sy += y;
                sxx += x * x;
                sxy += x * y;
                m += 1.0;
            }
            let slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
            assert!((slope + 1.0 + 1.0 / p).abs() < 0.02, "p={p}: slope {slope}");
        }
    }

    #[test]
    fn ewens_small_cases() {
        assert_eq!(ewens_pmf(2, &[2, 0]), 0.5);
        assert_eq!(ewens_pmf(2, &[0, 1]), 0.5);
        assert_eq!(ewens_pmf(1, &[1]), 1.0);
        assert_eq!(ewens_pmf(2, &[1, 1]), 0.0);
        assert_eq!(ewens_pmf_exact(2, &[2]), BigRational::new(1.into(), 2.into()));
        assert_eq!(ewens_pmf_exact(3, &[1]), BigRational::zero());
    }

    fn partitions(k: usize, max_part: usize, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if k == 0 {
            out.push(current.clone());
            return;
        }
        for part in (1..=max_part.min(k)).rev() {
            current[part - 1] += 1;
            partitions(k - part, part, current, out);
            current[part - 1] -= 1;
        }
    }

    #[test]
    fn ewens_sums_to_one() {
        for k in 1..=12 {
            let mut all = Vec::new();
            partitions(k, k, &mut vec![0; k], &mut all);
            let total: f64 = all.iter().map(|a| ewens_pmf(k, a)).sum();
            assert!((total - 1.0).abs() < 1e-12, "k={k}");
            let exact: BigRational = all.iter().map(|a| ewens_pmf_exact(k, a)).sum();
            assert!(exact.is_one(), "k={k}");
        }
    }

    #[test]
    fn ewens_moment_values() {
        assert_eq!(ewens_moments(2, 1).unwrap(), (1.0, 2.0));
        assert_eq!(ewens_moments(3, 2).unwrap(), (0.5, 0.5));
        assert_eq!(ewens_moments(2, 2).unwrap().0, 0.5);
        let (m, s) = ewens_moments(9, 4).unwrap();
        assert!((s - m * m - 0.25).abs() < 1e-15);
        assert!(ewens_moments(3, 0).is_err());
        assert!(ewens_moments(3, 4).is_err());
    }

    #[test]
    fn sigma_and_beta_conventions() {
        let mut rng = stream_rng(1, "limits", 0);
        for _ in 0..100 {
            assert_eq!(sample_sigma(0.4, 1, &mut rng).unwrap(), 1);
            assert!(sample_sigma(0.4, 3, &mut rng).unwrap() >= 3);
        }
        assert_eq!(sample_beta_one(0, &mut rng), 1.0);
        for _ in 0..100 {
            let b = sample_beta_one(4, &mut rng);
            assert!(b > 0.0 && b < 1.0);
        }
        assert!(sample_sigma(0.4, 0, &mut rng).is_err());
        assert!(sample_limit_bond(0.4, 0, &mut rng).is_err());
    }

    #[test]
    fn bond_limit_for_first_cluster_is_mittag_leffler() {
        // i = 1 draws sigma = 1, beta = 1, so the stream yields the same value
        let a = sample_limit_bond(0.6, 1, &mut stream_rng(4, "ml", 0)).unwrap();
        let b = sample_mittag_leffler(0.6, &mut stream_rng(4, "ml", 0)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn site_limit_edge_cases() {
        let mut rng = stream_rng(2, "site", 0);
        assert_eq!(sample_limit_site(0.5, 2, 0, &mut rng).unwrap(), 0.0);
        for _ in 0..200 {
            let d = sample_limit_site_detailed(0.5, 2, 3, &mut rng).unwrap();
            assert!(d.value >= 0.0);
            assert!((d.value - d.bond_factor * d.stick).abs() < 1e-15);
        }
        assert!(sample_limit_site(0.5, 0, 1, &mut rng).is_err());
    }

    #[test]
    fn stick_breaking_telescopes() {
        let mut rng = stream_rng(3, "stick", 0);
        assert!(sample_stick_breaking(&mut rng, 0).is_err());
        for _ in 0..100 {
            // reconstruct the uniforms from the same stream
            let mut replay = rng.clone();
            let v = sample_stick_breaking(&mut rng, 6).unwrap();
            let prod: f64 = (0..6).map(|_| 1.0 - replay.random::<f64>()).product();
            let sum: f64 = v.iter().sum();
            assert!((sum - (1.0 - prod)).abs() < 1e-14);
        }
    }

    #[test]
    fn norms_and_ranking() {
        assert_eq!(lq_norm(&[3.0, 4.0], 2.0).unwrap(), 5.0);
        assert_eq!(lq_norm(&[3.0, -7.0, 4.0], f64::INFINITY).unwrap(), 7.0);
        assert_eq!(lq_norm(&[], 2.0).unwrap(), 0.0);
        assert!(lq_norm(&[1.0], 0.5).is_err());
        assert_eq!(rank_descending(&[1.0, 3.0, 2.0]).unwrap(), vec![3.0, 2.0, 1.0]);
        assert!(matches!(rank_descending(&[1.0, -1.0]), Err(Error::NegativeEntry { index: 1, .. })));
        assert!(rank_descending(&[f64::NAN]).is_err());
    }

    #[test]
    fn pmf_csv_layout() {
        let text = pmf_table_csv(0.5, 2, false).unwrap();
        assert!(text.starts_with("k,pmf\n0,0.5\n1,"));
        assert_eq!(text.lines().count(), 4);
        let bond = pmf_table_csv(0.5, 2, true).unwrap();
        assert!(bond.starts_with("k,pmf\n1,"));
    }
}
