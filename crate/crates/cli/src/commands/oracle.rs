use num_rational::BigRational;
use rrt_percolation::limits::ewens_pmf_exact;
use rrt_percolation::oracle::{
    exact_census_distribution, exact_census_distribution_rational, exact_chain_distribution,
    exact_chain_distribution_rational, exact_coupling_check, exact_ewens_distribution,
};
use rrt_percolation::tree::DEFAULT_ENUMERATION_CAP;

use crate::report::{Check, Report, Table};
use crate::{ExperimentConfig, ExperimentError};

/// Largest size handled in exact rational arithmetic.
const RATIONAL_MAX: usize = 7;
const EWENS_MAX: usize = 7;
const TV_TOL: f64 = 1e-12;

/// Exhaustive checks: root-isolation coupling, Ewens law and the census
/// chain against enumeration, for every size up to `n`.
pub fn cmd_oracle(config: &ExperimentConfig) -> Result<Report, ExperimentError> {
    config.validate()?;
    let n_max = config.n as usize;
    if n_max > DEFAULT_ENUMERATION_CAP {
        return Err(ExperimentError::Config(format!("n = {n_max} exceeds the enumeration cap {DEFAULT_ENUMERATION_CAP}")));
    }
    let mut report = Report::new("oracle");

    let mut coupling = Table::new("coupling", &["n", "instances", "failures", "counterexample"]);
    let (mut instances, mut failures) = (0u64, 0u64);
    for n in 1..=n_max {
        let r = exact_coupling_check(n)?;
        instances += r.instances;
        failures += r.failures;
        let example = r.first_counterexample.map_or(String::new(), |(parents, mask)| format!("{parents:?} mask {mask:#b}"));
        coupling.push(vec![n.into(), r.instances.into(), r.failures.into(), example.into()]);
    }
    report.tables.push(coupling);
    report.checks.push(Check::new(
        "coupling_exhaustive",
        failures == 0,
        failures as f64,
        0.0,
        instances,
        format!("root isolation vs site partition for n <= {n_max}"),
    ));

    let mut ewens = Table::new("ewens", &["k", "support", "pmf_mismatches", "mean_mismatches"]);
    let mut ewens_bad = 0u64;
    let mut ewens_points = 0u64;
    let k_max = EWENS_MAX.min(n_max.saturating_sub(1)).max(1);
    for k in 1..=k_max {
        let law = exact_ewens_distribution(k)?;
        let pmf_bad = law.iter().filter(|(a, m)| **m != ewens_pmf_exact(k, a)).count();
        let mean_bad = (1..=k)
            .filter(|&j| {
                let mean = law.expect(|a| BigRational::from_integer(a[j - 1].into()));
                mean != BigRational::new(1.into(), j.into())
            })
            .count();
        ewens_bad += (pmf_bad + mean_bad) as u64;
        ewens_points += law.len() as u64;
        ewens.push(vec![k.into(), law.len().into(), pmf_bad.into(), mean_bad.into()]);
    }
    report.tables.push(ewens);
    report.checks.push(Check::new(
        "ewens_exact",
        ewens_bad == 0,
        ewens_bad as f64,
        0.0,
        ewens_points,
        format!("rational equality with the Ewens formula and E[C_k(j)] = 1/j, k <= {k_max}"),
    ));

    let mut chain = Table::new("census_chain", &["n", "mode", "support", "total_variation"]);
    let mut worst_tv: f64 = 0.0;
    let p_exact = BigRational::from_float(config.p).expect("finite p");
    for n in 1..=n_max {
        let (mode, support, tv) = if n <= RATIONAL_MAX {
            let a = exact_census_distribution_rational(n, &p_exact)?;
            let b = exact_chain_distribution_rational(n, &p_exact)?;
            ("rational", a.len(), if a == b { 0.0 } else { a.total_variation(&b).max(f64::MIN_POSITIVE) })
        } else {
            let a = exact_census_distribution(n, config.p)?;
            let b = exact_chain_distribution(n, config.p)?;
            ("double", a.len(), a.total_variation(&b))
        };
        worst_tv = worst_tv.max(tv);
        chain.push(vec![n.into(), mode.into(), support.into(), tv.into()]);
    }
    report.tables.push(chain);
    report.checks.push(Check::new(
        "census_chain_matches_enumeration",
        worst_tv < TV_TOL,
        worst_tv,
        TV_TOL,
        n_max as u64,
        format!("exact in rationals for n <= {RATIONAL_MAX}"),
    ));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sizes_pass() {
        let config = ExperimentConfig { n: 5, ..Default::default() };
        let report = cmd_oracle(&config).unwrap();
        assert!(report.all_passed(), "{:?}", report.checks);
        assert_eq!(report.table("coupling").unwrap().rows.len(), 5);
        let over = ExperimentConfig { n: 10, ..Default::default() };
        assert!(matches!(cmd_oracle(&over), Err(ExperimentError::Config(_))));
    }
}
