use rrt_percolation::branching::{
    estimate_malthusian, simulate_z, simulate_z_truncated, solve_truncated_eigenvector, SimOptions, StopRule,
};
use rrt_percolation::limits::LimitLaw;
use rrt_percolation::stats::ks_one_sample;

use super::{summary, z_score, LEVEL};
use crate::report::{Check, Report, Table};
use crate::{ExperimentConfig, ExperimentError};

/// Percolation parameters of the eigenvector report, besides the configured one.
pub const BRANCHING_EIGEN_PS: [f64; 3] = [0.2, 0.5, 0.8];
const RATIO_CLASSES: usize = 10;
const SLOPE_TOL: f64 = 0.05;
const EIGEN_TOL: f64 = 1e-12;
const GRID_DT: f64 = 0.25;
const TRUNCATED_H: usize = 5;
const TRUNCATED_REPS: usize = 1000;

struct Run {
    slope: f64,
    limit: f64,
    ratios: Vec<f64>,
}

/// Growth rate, `e^{-t} N_t`, census ratios and the truncated eigenvector.
pub fn cmd_branching(config: &ExperimentConfig) -> Result<Report, ExperimentError> {
    config.validate()?;
    let (p, t) = (config.p, config.t);
    let opts = SimOptions::new(StopRule::at_time(t)).with_grid(GRID_DT);
    let runs = config.replicate("branching", |rng| {
        let tr = simulate_z(p, &opts, rng)?;
        let est = estimate_malthusian(&tr, 2.0 * GRID_DT)?;
        let n = tr.final_state.total() as f64;
        let ratios = (0..=RATIO_CLASSES).map(|k| tr.final_state.census.count(k) as f64 / n).collect();
        Ok(Run { slope: est.slope, limit: n * (-t).exp(), ratios })
    })?;
    let reps = runs.len() as u64;
    let mut report = Report::new("branching");

    let slopes: Vec<f64> = runs.iter().map(|r| r.slope).collect();
    let limits: Vec<f64> = runs.iter().map(|r| r.limit).collect();
    let (slope_mean, slope_se) = summary(&slopes);
    let (w_mean, w_se) = summary(&limits);
    let ks = ks_one_sample(&limits, |x| if x > 0.0 { -(-x).exp_m1() } else { 0.0 })?;
    let mut growth = Table::new("growth", &["quantity", "reps", "t", "mean", "se", "target", "ks", "p_value"]);
    growth.push(vec!["malthusian_slope".into(), reps.into(), t.into(), slope_mean.into(), slope_se.into(), 1.0.into(), f64::NAN.into(), f64::NAN.into()]);
    growth.push(vec!["scaled_population".into(), reps.into(), t.into(), w_mean.into(), w_se.into(), 1.0.into(), ks.statistic.into(), ks.p_value.into()]);
    report.tables.push(growth);
    report.checks.push(Check::new(
        "malthusian_slope",
        (slope_mean - 1.0).abs() <= SLOPE_TOL,
        slope_mean,
        SLOPE_TOL,
        reps,
        format!("mean regression slope of ln N over [{}, {t}], se {slope_se}", t / 2.0),
    ));
    report.checks.push(Check::new(
        "scaled_population_exponential",
        ks.p_value >= LEVEL,
        ks.p_value,
        LEVEL,
        reps,
        format!("KS of e^-t N_t against Exp(1), D = {}", ks.statistic),
    ));

    let law = LimitLaw::new(p)?;
    let mut ratios = Table::new("ratios", &["k", "reps", "mean", "se", "nu", "z"]);
    let mut worst: f64 = 0.0;
    for k in 0..=RATIO_CLASSES {
        let xs: Vec<f64> = runs.iter().map(|r| r.ratios[k]).collect();
        let (m, se) = summary(&xs);
        let nu = law.nu(k as u64);
        let z = z_score(m, se, nu);
        worst = worst.max(z.abs());
        ratios.push(vec![k.into(), reps.into(), m.into(), se.into(), nu.into(), z.into()]);
    }
    report.tables.push(ratios);
    report.checks.push(Check::new(
        "census_ratios_within_3_sigma",
        worst <= 3.0,
        worst,
        3.0,
        reps,
        format!("max |z| of Z_t(k)/N_t against nu_p(k), k <= {RATIO_CLASSES}"),
    ));

    // truncated process: class fractions against its own eigenvector
    let h = TRUNCATED_H.min(config.h);
    let eigen_h = solve_truncated_eigenvector(p, h)?;
    let trunc_reps = config.reps.min(TRUNCATED_REPS);
    let trunc = config.replicate_n("branching-truncated", trunc_reps, |rng| {
        let tr = simulate_z_truncated(p, h, &SimOptions::new(StopRule::at_time(t)), rng)?;
        let s = &tr.final_state;
        let n = s.total() as f64;
        let mut v: Vec<f64> = (0..=h).map(|k| s.census.count(k) as f64 / n).collect();
        v.push(s.overweight as f64 / n);
        Ok(v)
    })?;
    let mut trunc_table = Table::new("truncated", &["h", "k", "reps", "mean", "se", "nu_h", "z"]);
    let mut trunc_worst: f64 = 0.0;
    for k in 0..=h + 1 {
        let xs: Vec<f64> = trunc.iter().map(|v| v[k]).collect();
        let (m, se) = summary(&xs);
        let z = z_score(m, se, eigen_h.nu[k]);
        trunc_worst = trunc_worst.max(z.abs());
        let label = if k == h + 1 { "overweight".to_string() } else { k.to_string() };
        trunc_table.push(vec![h.into(), label.into(), trunc.len().into(), m.into(), se.into(), eigen_h.nu[k].into(), z.into()]);
    }
    report.tables.push(trunc_table);
    report.checks.push(Check::new(
        "truncated_fractions_within_3_sigma",
        trunc_worst <= 3.0,
        trunc_worst,
        3.0,
        trunc.len() as u64,
        format!("max |z| of class fractions of Z^(h), h = {h}, against its eigenvector"),
    ));

    let mut eigen = Table::new("eigenvector", &["p", "h", "closed_form_rel_error", "route_agreement", "balance_residual"]);
    let mut eigen_worst: f64 = 0.0;
    let mut ps = BRANCHING_EIGEN_PS.to_vec();
    if !ps.contains(&p) {
        ps.push(p);
    }
    for &q in &ps {
        let s = solve_truncated_eigenvector(q, config.h)?;
        let err = s.closed_form_error();
        eigen_worst = eigen_worst.max(err).max(s.agreement);
        eigen.push(vec![q.into(), config.h.into(), err.into(), s.agreement.into(), s.balance_residual.into()]);
    }
    report.tables.push(eigen);
    report.checks.push(Check::new(
        "eigenvector_closed_form",
        eigen_worst < EIGEN_TOL,
        eigen_worst,
        EIGEN_TOL,
        ps.len() as u64,
        format!("max relative error for k <= h = {}", config.h),
    ));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_layout() {
        let config = ExperimentConfig { reps: 30, t: 4.0, h: 20, ..Default::default() };
        let report = cmd_branching(&config).unwrap();
        assert_eq!(report.table("ratios").unwrap().rows.len(), RATIO_CLASSES + 1);
        assert_eq!(report.table("truncated").unwrap().rows.len(), TRUNCATED_H + 2);
        assert_eq!(report.table("eigenvector").unwrap().rows.len(), 4);
        assert!(report.check("eigenvector_closed_form").unwrap().passed);
    }
}
