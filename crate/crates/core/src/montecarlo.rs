//! Seeded sampling of the joint Gaussian system.
//!
//! Samples are drawn in fixed-size chunks; chunk `c` uses ChaCha8 stream `c`
//! of the seed, so the sample sequence does not depend on how chunks are
//! distributed over threads. Partial sums are combined in chunk order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{
    build_joint_covariance, generator_loadings, generator_variances, CovarianceMatrix, Var, DIM,
};
use crate::model::{ChannelConfig, HelperStrategy};

pub const CHUNK: usize = 1 << 16;

#[derive(Clone)]
struct Sums {
    s: [f64; DIM],
    ss: [[f64; DIM]; DIM],
}

impl Sums {
    fn zero() -> Self {
        Sums {
            s: [0.0; DIM],
            ss: [[0.0; DIM]; DIM],
        }
    }

    fn add(&mut self, other: &Sums) {
        for i in 0..DIM {
            self.s[i] += other.s[i];
            for j in 0..=i {
                self.ss[i][j] += other.ss[i][j];
            }
        }
    }
}

fn sample_chunk(
    seed: u64,
    chunk: usize,
    len: usize,
    loadings: &[[f64; 8]; DIM],
    scale: &[f64; 8],
) -> Sums {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    let mut sums = Sums::zero();
    let mut g = [0.0; 8];
    let mut v = [0.0; DIM];
    for _ in 0..len {
        for (gi, sd) in g.iter_mut().zip(scale) {
            let z: f64 = rng.sample(StandardNormal);
            *gi = z * sd;
        }
        for (vi, row) in v.iter_mut().zip(loadings) {
            *vi = row.iter().zip(&g).map(|(a, b)| a * b).sum();
        }
        for i in 0..DIM {
            sums.s[i] += v[i];
            for j in 0..=i {
                sums.ss[i][j] += v[i] * v[j];
            }
        }
    }
    sums
}

/// Unbiased sample covariance of `n` draws of the nine canonical variables.
pub fn sample_empirical_covariance(
    cfg: &ChannelConfig,
    strat: &HelperStrategy,
    n: usize,
    seed: u64,
) -> Result<CovarianceMatrix> {
    if n < 2 {
        return Err(Error::TooFewSamples(n));
    }
    strat.validate(cfg)?;
    let loadings = generator_loadings(cfg, strat);
    let scale = generator_variances(cfg, strat).map(f64::sqrt);
    let chunks = n.div_ceil(CHUNK);
    let parts: Vec<Sums> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let len = CHUNK.min(n - c * CHUNK);
            sample_chunk(seed, c, len, &loadings, &scale)
        })
        .collect();
    let mut total = Sums::zero();
    for p in &parts {
        total.add(p);
    }

    let nf = n as f64;
    let mut entries = [[0.0; DIM]; DIM];
    for i in 0..DIM {
        for j in 0..=i {
            let c = (total.ss[i][j] - total.s[i] * total.s[j] / nf) / (nf - 1.0);
            entries[i][j] = c;
            entries[j][i] = c;
        }
    }
    Ok(CovarianceMatrix::from_entries(entries))
}

/// Outcome of comparing sampled and analytic covariances.
///
/// The relative error of entry `(i, j)` is its absolute error divided by
/// `sqrt(Sigma_ii Sigma_jj)`, i.e. measured as a correlation coefficient, so
/// that analytically zero covariances are judged on the scale of their
/// variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub samples: usize,
    pub seed: u64,
    pub max_abs_error: f64,
    pub max_rel_error: f64,
    pub worst_entry: (String, String),
    pub tol_rel: f64,
    pub pass: bool,
}

pub fn covariance_check(
    cfg: &ChannelConfig,
    strat: &HelperStrategy,
    n: usize,
    seed: u64,
    tol_rel: f64,
) -> Result<McReport> {
    if tol_rel.is_nan() || tol_rel <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "relative tolerance must be positive, got {tol_rel}"
        )));
    }
    let analytic = build_joint_covariance(cfg, strat)?;
    let empirical = sample_empirical_covariance(cfg, strat, n, seed)?;
    let mut max_abs: f64 = 0.0;
    let mut max_rel: f64 = 0.0;
    let mut worst = (Var::U, Var::U);
    for a in Var::ALL {
        for b in Var::ALL {
            if b.index() > a.index() {
                continue;
            }
            let err = (empirical.get(a, b) - analytic.get(a, b)).abs();
            let scale = (analytic.get(a, a) * analytic.get(b, b)).sqrt();
            let rel = if err == 0.0 { 0.0 } else { err / scale };
            max_abs = max_abs.max(err);
            if rel > max_rel {
                max_rel = rel;
                worst = (a, b);
            }
        }
    }
    Ok(McReport {
        samples: n,
        seed,
        max_abs_error: max_abs,
        max_rel_error: max_rel,
        worst_entry: (worst.0.name().to_string(), worst.1.name().to_string()),
        tol_rel,
        pass: max_rel <= tol_rel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use Var::*;

    fn base_channel() -> ChannelConfig {
        ChannelConfig::new(1.0, 1.0, 2.0, 5.0, 5.0, 12.0, 12.0).unwrap()
    }

    #[test]
    fn rejects_tiny_samples() {
        let s = HelperStrategy::default();
        assert_eq!(
            sample_empirical_covariance(&base_channel(), &s, 1, 0).unwrap_err(),
            Error::TooFewSamples(1)
        );
    }

    #[test]
    fn same_seed_same_matrix() {
        let s = HelperStrategy::new([0.5, 0.1], [0.2, 0.0, 0.3], [0.0; 2], 0.4);
        let a = sample_empirical_covariance(&base_channel(), &s, 100_000, 3).unwrap();
        let b = sample_empirical_covariance(&base_channel(), &s, 100_000, 3).unwrap();
        assert_eq!(a, b);
        let c = sample_empirical_covariance(&base_channel(), &s, 100_000, 4).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn zero_variance_generator_stays_zero() {
        // gamma = 1 leaves no power for X02'; V then carries only X01' and states
        let s = HelperStrategy::new([0.0; 2], [0.0, 0.0, 0.0], [0.0; 2], 1.0);
        let cov = sample_empirical_covariance(&base_channel(), &s, 10_000, 1).unwrap();
        assert_eq!(cov.get(V, V), 0.0);
        let s = HelperStrategy::new([0.0; 2], [1.0, 0.0, 0.0], [0.0; 2], 0.0);
        let cov = sample_empirical_covariance(&base_channel(), &s, 10_000, 1).unwrap();
        assert_eq!(cov.get(U, U), 0.0);
    }

    #[test]
    fn large_tolerance_passes_and_tiny_fails() {
        let s = HelperStrategy::new([2.0 / 3.0, 0.0], [0.0; 3], [0.0; 2], 1.0);
        assert!(covariance_check(&base_channel(), &s, 10, 1, 10.0).unwrap().pass);
        assert!(!covariance_check(&base_channel(), &s, 10, 1, 1e-6).unwrap().pass);
        assert!(covariance_check(&base_channel(), &s, 10, 1, 0.0).is_err());
    }
}
