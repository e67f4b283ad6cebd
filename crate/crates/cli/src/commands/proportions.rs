use std::collections::BTreeMap;

use rrt_percolation::limits::LimitLaw;
use rrt_percolation::oracle::exact_census_distribution;
use rrt_percolation::stats::{chi_square_gof, linear_fit};
use rrt_percolation::tree::DEFAULT_ENUMERATION_CAP;
use rrt_percolation::{census, grow_uniform, mark_sites, site_partition, ClusterCensus};

use super::{summary, z_score};
use crate::report::{Check, Report, Table};
use crate::{ExperimentConfig, ExperimentError};

/// Size classes `0..=PROPORTION_ROWS` are reported.
pub const PROPORTION_ROWS: usize = 64;
/// Classes compared one by one against `nu_p`.
const Z_CLASSES: usize = 10;
const SLOPE_WINDOW: (usize, usize) = (8, 64);
const SLOPE_TOL: f64 = 0.15;
const EXACT_MODE_P_VALUE: f64 = 1e-3;

/// Empirical cluster-size proportions `X_n(k)/n` against `nu_p(k)`.
pub fn cmd_proportions(config: &ExperimentConfig) -> Result<Report, ExperimentError> {
    config.validate()?;
    let (n, p) = (config.n as usize, config.p);
    let censuses = config.replicate("proportions", |rng| {
        let tree = grow_uniform(n, rng)?;
        let marks = mark_sites(&tree, p, rng)?;
        Ok(census(&site_partition(&tree, &marks)?))
    })?;

    let law = LimitLaw::new(p)?;
    let mut table = Table::new("proportions", &["k", "reps", "n", "mean", "se", "nu", "z"]);
    let mut means = Vec::with_capacity(PROPORTION_ROWS + 1);
    let mut worst_z: f64 = 0.0;
    for k in 0..=PROPORTION_ROWS {
        let xs: Vec<f64> = censuses.iter().map(|c| c.count(k) as f64 / n as f64).collect();
        let (mean, se) = summary(&xs);
        let nu = law.nu(k as u64);
        let z = z_score(mean, se, nu);
        if k <= Z_CLASSES {
            worst_z = worst_z.max(z.abs());
        }
        means.push(mean);
        table.push(vec![k.into(), config.reps.into(), config.n.into(), mean.into(), se.into(), nu.into(), z.into()]);
    }

    let mut report = Report::new("proportions");
    report.tables.push(table);
    report.checks.push(Check::new(
        "proportions_within_3_sigma",
        worst_z <= 3.0,
        worst_z,
        3.0,
        config.reps as u64,
        format!("max |z| over k <= {Z_CLASSES}"),
    ));

    let (xs, ys): (Vec<f64>, Vec<f64>) = (SLOPE_WINDOW.0..=SLOPE_WINDOW.1)
        .filter(|&k| means[k] > 0.0)
        .map(|k| ((k as f64).ln(), means[k].ln()))
        .unzip();
    let target = -(1.0 + 1.0 / p);
    let slope = if xs.len() >= 2 { linear_fit(&xs, &ys)?.slope } else { f64::NAN };
    report.checks.push(Check::new(
        "power_law_slope",
        (slope - target).abs() <= SLOPE_TOL,
        slope,
        SLOPE_TOL,
        config.reps as u64,
        format!("target {target}, {} classes in [{}, {}] with positive mean", xs.len(), SLOPE_WINDOW.0, SLOPE_WINDOW.1),
    ));

    if n <= DEFAULT_ENUMERATION_CAP {
        report.checks.push(exact_mode_check(n, p, &censuses)?);
    }
    Ok(report)
}

/// Chi-square of the empirical census law against the enumerated one.
fn exact_mode_check(n: usize, p: f64, censuses: &[ClusterCensus]) -> Result<Check, ExperimentError> {
    let exact = exact_census_distribution(n, p)?;
    let mut observed: BTreeMap<&ClusterCensus, u64> = BTreeMap::new();
    for c in censuses {
        *observed.entry(c).or_insert(0) += 1;
    }
    let mut counts = Vec::with_capacity(exact.len());
    let mut probs = Vec::with_capacity(exact.len());
    for (c, &m) in exact.iter() {
        counts.push(observed.get(c).copied().unwrap_or(0));
        probs.push(m);
    }
    let outside: u64 = observed.iter().filter(|(c, _)| exact.mass(c) == 0.0).map(|(_, &k)| k).sum();
    if outside > 0 {
        counts.push(outside);
        probs.push(0.0);
    }
    let r = chi_square_gof(&counts, &probs, 5.0)?;
    Ok(Check::new(
        "exact_census_law",
        r.p_value > EXACT_MODE_P_VALUE,
        r.p_value,
        EXACT_MODE_P_VALUE,
        censuses.len() as u64,
        format!("chi2 = {} on {} dof", r.statistic, r.dof),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_shapes() {
        let config = ExperimentConfig { n: 2000, reps: 4, ..Default::default() };
        let report = cmd_proportions(&config).unwrap();
        let t = report.table("proportions").unwrap();
        assert_eq!(t.rows.len(), PROPORTION_ROWS + 1);
        assert!(report.check("power_law_slope").is_some());
        assert!(report.check("exact_census_law").is_none());
    }

    #[test]
    fn exact_mode_at_six() {
        let config = ExperimentConfig { n: 6, reps: 20_000, ..Default::default() };
        let report = cmd_proportions(&config).unwrap();
        let check = report.check("exact_census_law").unwrap();
        assert!(check.passed, "{}", check.line());
    }
}
