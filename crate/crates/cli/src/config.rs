use rrt_percolation::stream_rng;
use rrt_percolation::SimRng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ExperimentError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Parameters shared by every experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub p: f64,
    pub n: u64,
    pub n_grid: Vec<u64>,
    pub reps: usize,
    pub seed: u64,
    /// Truncation level for the eigenvector checks.
    pub h: usize,
    /// Exponent of the `l^q` reports; `None` means `1/p + 0.5`.
    pub q: Option<f64>,
    /// Horizon of the branching runs and of the Mittag–Leffler oracle.
    pub t: f64,
    pub format: OutputFormat,
    pub workers: usize,
}

pub const SHOWCASE_P: f64 = 0.6;
pub const DEFAULT_SEED: u64 = 20_240_601;

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            p: SHOWCASE_P,
            n: 1_000_000,
            n_grid: Vec::new(),
            reps: 20,
            seed: DEFAULT_SEED,
            h: 200,
            q: None,
            t: 12.0,
            format: OutputFormat::Csv,
            workers: 1,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        if !(self.p > 0.0 && self.p < 1.0) {
            return Err(ExperimentError::Config(format!("p = {} must lie in (0, 1)", self.p)));
        }
        if self.reps == 0 {
            return Err(ExperimentError::Config("need at least one replicate".into()));
        }
        if self.n == 0 || self.n_grid.contains(&0) {
            return Err(ExperimentError::Config("tree sizes must be at least 1".into()));
        }
        if self.workers == 0 {
            return Err(ExperimentError::Config("need at least one worker".into()));
        }
        if let Some(q) = self.q {
            if !(q > 1.0 / self.p) {
                return Err(ExperimentError::Config(format!("q = {q} must exceed 1/p = {}", 1.0 / self.p)));
            }
        }
        if !(self.t > 0.0 && self.t.is_finite()) {
            return Err(ExperimentError::Config(format!("t = {} must be positive", self.t)));
        }
        Ok(())
    }

    pub fn q(&self) -> f64 {
        self.q.unwrap_or(1.0 / self.p + 0.5)
    }

    /// Runs `f` once per replicate with its own RNG stream, in parallel on
    /// `workers` threads, and returns the results in replicate order.
    pub fn replicate<T, F>(&self, stream: &str, f: F) -> Result<Vec<T>, ExperimentError>
    where
        T: Send,
        F: Fn(&mut SimRng) -> Result<T, ExperimentError> + Sync,
    {
        self.replicate_n(stream, self.reps, f)
    }

    pub fn replicate_n<T, F>(&self, stream: &str, reps: usize, f: F) -> Result<Vec<T>, ExperimentError>
    where
        T: Send,
        F: Fn(&mut SimRng) -> Result<T, ExperimentError> + Sync,
    {
        let run = |i: usize| f(&mut stream_rng(self.seed, stream, i as u64));
        if self.workers == 1 {
            return (0..reps).map(run).collect();
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| ExperimentError::Config(e.to_string()))?;
        pool.install(|| (0..reps).into_par_iter().map(run).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        let ok = ExperimentConfig::default();
        assert!(ok.validate().is_ok());
        assert!((ok.q() - (1.0 / 0.6 + 0.5)).abs() < 1e-15);
        for bad in [
            ExperimentConfig { p: 1.0, ..ok.clone() },
            ExperimentConfig { reps: 0, ..ok.clone() },
            ExperimentConfig { n: 0, ..ok.clone() },
            ExperimentConfig { workers: 0, ..ok.clone() },
            ExperimentConfig { q: Some(1.5), ..ok.clone() },
        ] {
            assert!(bad.validate().is_err());
        }
    }

    #[test]
    fn replicates_are_ordered_and_worker_independent() {
        use rand::Rng;
        let one = ExperimentConfig { reps: 50, ..Default::default() };
        let four = ExperimentConfig { workers: 4, ..one.clone() };
        let draw = |rng: &mut SimRng| Ok(rng.random::<u64>());
        assert_eq!(one.replicate("x", draw).unwrap(), four.replicate("x", draw).unwrap());
        // adding replicates leaves the earlier ones untouched
        let more = ExperimentConfig { reps: 80, ..one.clone() };
        assert_eq!(one.replicate("x", draw).unwrap()[..], more.replicate("x", draw).unwrap()[..50]);
    }
}
