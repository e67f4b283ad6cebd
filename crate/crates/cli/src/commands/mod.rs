mod branching;
mod largest;
mod limit_laws;
mod oracle;
mod proportions;

pub use branching::{cmd_branching, BRANCHING_EIGEN_PS};
pub use largest::{cmd_largest, RANK_TRUNCATION};
pub use limit_laws::cmd_limit_laws;
pub use oracle::cmd_oracle;
pub use proportions::{cmd_proportions, PROPORTION_ROWS};

/// Significance level of every statistical check, before Bonferroni.
pub const LEVEL: f64 = 0.01;

/// `(mean, standard error)` of a sample.
pub(crate) fn summary(xs: &[f64]) -> (f64, f64) {
    rrt_percolation::stats::mean_se(xs)
}

/// Empirical quantile by linear interpolation on sorted data.
pub(crate) fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// `(mean - target) / se`, with a zero spread treated as exact agreement
/// only when the mean hits the target.
pub(crate) fn z_score(mean: f64, se: f64, target: f64) -> f64 {
    if se > 0.0 {
        (mean - target) / se
    } else if mean == target {
        0.0
    } else {
        f64::INFINITY
    }
}
