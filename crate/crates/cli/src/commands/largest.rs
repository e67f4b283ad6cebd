use rrt_percolation::limits::lq_norm;
use rrt_percolation::stats::{ks_two_sample, linear_fit};
use rrt_percolation::{grow_uniform, mark_sites, site_partition};

use super::{quantile, summary};
use crate::report::{Check, Report, Table};
use crate::{ExperimentConfig, ExperimentError};

/// Length of the truncated ranked vector in the `l^q` report.
pub const RANK_TRUNCATION: usize = 64;
const TOP: usize = 5;
const SLOPE_TOL: f64 = 0.05;
const TAIL_SHARE_MAX: f64 = 0.05;
const MIN_GRID: usize = 4;
const MIN_OCTAVES: f64 = 3.0;

struct Replicate {
    top: [f64; TOP],
    largest: f64,
    lq_truncated: f64,
    tail_share: f64,
}

fn run_one(n: usize, config: &ExperimentConfig, rng: &mut rrt_percolation::SimRng) -> Result<Replicate, ExperimentError> {
    let (p, q) = (config.p, config.q());
    let tree = grow_uniform(n, rng)?;
    let marks = mark_sites(&tree, p, rng)?;
    let part = site_partition(&tree, &marks)?;
    let mut sizes: Vec<u32> =
        part.sizes().iter().enumerate().filter(|&(i, _)| part.is_open(i)).map(|(_, &s)| s).collect();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    let scale = (n as f64).powf(-p);
    let scaled: Vec<f64> = sizes.iter().map(|&s| f64::from(s) * scale).collect();
    let mut top = [0.0; TOP];
    for (slot, &x) in top.iter_mut().zip(&scaled) {
        *slot = x;
    }
    let head = &scaled[..scaled.len().min(RANK_TRUNCATION)];
    let lq_truncated = lq_norm(head, q)?;
    let head_q: f64 = head.iter().map(|x| x.powf(q)).sum();
    let tail_q: f64 = scaled[head.len()..].iter().map(|x| x.powf(q)).sum();
    let total = head_q + tail_q;
    Ok(Replicate {
        top,
        largest: sizes.first().copied().map_or(0.0, f64::from),
        lq_truncated,
        tail_share: if total > 0.0 { tail_q / total } else { 0.0 },
    })
}

/// Scaling of the largest site clusters, `n^{-p} |Pi_i|`, over a grid of sizes.
pub fn cmd_largest(config: &ExperimentConfig) -> Result<Report, ExperimentError> {
    config.validate()?;
    let mut grid = config.n_grid.clone();
    grid.sort_unstable();
    grid.dedup();
    if grid.len() < MIN_GRID {
        return Err(ExperimentError::Config(format!("n-grid needs at least {MIN_GRID} distinct sizes")));
    }
    let octaves = (grid[grid.len() - 1] as f64 / grid[0] as f64).log2();
    if octaves < MIN_OCTAVES {
        return Err(ExperimentError::Config(format!("n-grid spans {octaves:.2} octaves, need {MIN_OCTAVES}")));
    }

    let mut ranks = Table::new("largest", &["n", "rank", "reps", "mean", "se", "q10", "q50", "q90"]);
    let mut norms = Table::new(
        "norms",
        &["n", "reps", "q", "mean_largest", "se_largest", "lq_truncated_mean", "lq_truncated_se", "tail_share_mean", "tail_share_se"],
    );
    let mut log_n = Vec::new();
    let mut log_mean = Vec::new();
    let mut first_coord: Vec<Vec<f64>> = Vec::new();
    let mut last_tail = (f64::NAN, f64::NAN);
    for &n in &grid {
        let reps = config.replicate(&format!("largest-{n}"), |rng| run_one(n as usize, config, rng))?;
        for i in 0..TOP {
            let mut xs: Vec<f64> = reps.iter().map(|r| r.top[i]).collect();
            let (mean, se) = summary(&xs);
            xs.sort_unstable_by(f64::total_cmp);
            ranks.push(vec![
                n.into(),
                (i + 1).into(),
                config.reps.into(),
                mean.into(),
                se.into(),
                quantile(&xs, 0.1).into(),
                quantile(&xs, 0.5).into(),
                quantile(&xs, 0.9).into(),
            ]);
        }
        let (mean_largest, se_largest) = summary(&reps.iter().map(|r| r.largest).collect::<Vec<_>>());
        let (lq_mean, lq_se) = summary(&reps.iter().map(|r| r.lq_truncated).collect::<Vec<_>>());
        let (tail_mean, tail_se) = summary(&reps.iter().map(|r| r.tail_share).collect::<Vec<_>>());
        norms.push(vec![
            n.into(),
            config.reps.into(),
            config.q().into(),
            mean_largest.into(),
            se_largest.into(),
            lq_mean.into(),
            lq_se.into(),
            tail_mean.into(),
            tail_se.into(),
        ]);
        log_n.push((n as f64).ln());
        log_mean.push(mean_largest.ln());
        first_coord.push(reps.iter().map(|r| r.top[0]).collect());
        last_tail = (tail_mean, tail_se);
    }

    let mut report = Report::new("largest");
    report.tables.push(ranks);
    report.tables.push(norms);

    let slope = linear_fit(&log_n, &log_mean)?.slope;
    report.checks.push(Check::new(
        "largest_cluster_exponent",
        (slope - config.p).abs() <= SLOPE_TOL,
        slope,
        SLOPE_TOL,
        config.reps as u64,
        format!("target {}, {} grid sizes", config.p, grid.len()),
    ));

    let last = first_coord.len() - 1;
    let near = ks_two_sample(&first_coord[last - 1], &first_coord[last])?.statistic;
    let far = ks_two_sample(&first_coord[0], &first_coord[last])?.statistic;
    report.checks.push(Check::new(
        "first_coordinate_cauchy_trend",
        near < far,
        near,
        far,
        config.reps as u64,
        format!("KS(n={}, n={}) vs KS(n={}, n={})", grid[last - 1], grid[last], grid[0], grid[last]),
    ));

    report.checks.push(Check::new(
        "lq_tail_share",
        last_tail.0 < TAIL_SHARE_MAX,
        last_tail.0,
        TAIL_SHARE_MAX,
        config.reps as u64,
        format!("share of ||.||_q^q beyond rank {RANK_TRUNCATION} at n={}, q={}, se {}", grid[last], config.q(), last_tail.1),
    ));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_requirements() {
        let base = ExperimentConfig { p: 0.5, reps: 2, ..Default::default() };
        let short = ExperimentConfig { n_grid: vec![64, 128, 256], ..base.clone() };
        assert!(matches!(cmd_largest(&short), Err(ExperimentError::Config(_))));
        let narrow = ExperimentConfig { n_grid: vec![64, 80, 96, 112], ..base.clone() };
        assert!(matches!(cmd_largest(&narrow), Err(ExperimentError::Config(_))));
        let ok = ExperimentConfig { n_grid: vec![64, 128, 256, 512], ..base };
        let report = cmd_largest(&ok).unwrap();
        assert_eq!(report.table("largest").unwrap().rows.len(), 4 * TOP);
        assert_eq!(report.table("norms").unwrap().rows.len(), 4);
        assert_eq!(report.checks.len(), 3);
    }
}
