//! Error-induced exit distribution and the noise statistics built on it.

use serde::Serialize;

use super::paths::{central_exit, path_counts, PathCountTable};
use crate::error::{Error, Result};
use crate::scalar::{PathCount, Real};

/// Probability that an erroneous agent leaves through exit `i`, defined on the
/// interior exits `1..Z`. Exits `0` and `Z` carry zero mass.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NoiseDistribution<F> {
    z: usize,
    probs: Vec<F>,
    normalization: F,
    p_error: F,
}

impl<F: Real> NoiseDistribution<F> {
    /// The `p -> 0` limit: every interior exit equally likely.
    pub fn flat(z: usize) -> Result<Self> {
        check_depth(z)?;
        let w = F::one() / F::from_count(z as u64 - 1);
        let mut probs = vec![w; z + 1];
        probs[0] = F::zero();
        probs[z] = F::zero();
        Ok(Self {
            z,
            probs,
            normalization: F::zero(),
            p_error: F::zero(),
        })
    }

    pub fn z(&self) -> usize {
        self.z
    }

    pub fn prob(&self, exit: usize) -> F {
        self.probs.get(exit).copied().unwrap_or_else(F::zero)
    }

    pub fn probs(&self) -> &[F] {
        &self.probs
    }

    /// Normalization constant `C_Z`; zero for the flat limit.
    pub fn normalization(&self) -> F {
        self.normalization
    }

    /// Pass-error probability the distribution was evaluated at.
    pub fn p_error(&self) -> F {
        self.p_error
    }

    pub fn central_exit(&self) -> usize {
        central_exit(self.z)
    }

    /// Normalizes unnormalized per-exit weights (exits 0 and Z are ignored).
    pub(crate) fn from_weights(z: usize, mut weights: Vec<F>, p_error: F) -> Result<Self> {
        weights[0] = F::zero();
        weights[z] = F::zero();
        let normalization = sum_ascending(weights[1..z].to_vec());
        if normalization.is_nan() || normalization <= F::zero() {
            return Err(Error::NoErrorPaths);
        }
        for w in &mut weights {
            *w = *w / normalization;
        }
        Ok(Self {
            z,
            probs: weights,
            normalization,
            p_error,
        })
    }
}

fn check_depth(z: usize) -> Result<()> {
    if z < 2 {
        return Err(Error::param(
            "Z",
            format!("a grid of length {z} has no interior exits"),
        ));
    }
    Ok(())
}

pub(crate) fn check_error_prob<F: Real>(p: F) -> Result<()> {
    if p == F::zero() {
        return Err(Error::NoErrorPaths);
    }
    if !(p > F::zero() && p < F::one()) {
        return Err(Error::param(
            "p_pass_error",
            format!("must lie in (0, 1), got {p}"),
        ));
    }
    Ok(())
}

fn sum_ascending<F: Real>(mut terms: Vec<F>) -> F {
    terms.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    terms.into_iter().fold(F::zero(), |acc, t| acc + t)
}

/// Error-induced exit distribution from an explicit path-count table.
///
/// Each path with `m` turns has weight `p_sj · p^(m-1) · q^(Z-m)`; all `m`
/// with nonzero counts contribute, summed from the smallest term upward.
pub fn noise_from_table<F: Real, C: PathCount>(
    table: &PathCountTable<C>,
    p: F,
    p_sj: F,
) -> Result<NoiseDistribution<F>> {
    let z = table.z();
    check_depth(z)?;
    check_error_prob(p)?;
    if !(p_sj > F::zero() && p_sj <= F::one()) {
        return Err(Error::param(
            "p_sj",
            format!("must lie in (0, 1], got {p_sj}"),
        ));
    }
    let q = F::one() - p;
    let turn_weight: Vec<F> = (1..=z)
        .map(|m| p_sj * p.powi(m as i32 - 1) * q.powi((z - m) as i32))
        .collect();
    let weights = (0..=z)
        .map(|i| {
            let terms = (1..=z)
                .filter(|&m| table.count(m, i) != C::zero())
                .map(|m| table.count(m, i).to_real::<F>() * turn_weight[m - 1])
                .collect();
            sum_ascending(terms)
        })
        .collect();
    NoiseDistribution::from_weights(z, weights, p)
}

/// Error-induced exit distribution of a simplistic grid of length `z` with
/// pass-error probability `p` and initial split probability `p_sj`.
pub fn noise_distribution<F: Real>(z: usize, p: F, p_sj: F) -> Result<NoiseDistribution<F>> {
    check_depth(z)?;
    check_error_prob(p)?;
    let table: PathCountTable<u64> = path_counts(z)?;
    noise_from_table(&table, p, p_sj)
}

/// Mean and standard deviation of the noise count at the central exit for
/// `n_fp` faulty agents.
pub fn noise_stats<F: Real>(dist: &NoiseDistribution<F>, n_fp: u64) -> (F, F) {
    let p = dist.prob(dist.central_exit());
    let n = F::from_count(n_fp);
    (p * n, (n * p * (F::one() - p)).sqrt())
}

/// Agents per correct exit needed to stand `ell` sigma above the worst-case
/// noise of `n_fp` faulty agents. Never less than one.
pub fn required_per_exit<F: Real>(dist: &NoiseDistribution<F>, n_fp: u64, ell: F) -> u64 {
    let (mean, sigma) = noise_stats(dist, n_fp);
    (mean + ell * sigma)
        .ceil()
        .to_u64()
        .unwrap_or(u64::MAX)
        .max(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn three_rows_split_evenly() {
        let d = noise_distribution(3, 0.1f64, 0.5).unwrap();
        assert!((d.prob(1) - 0.5).abs() < 1e-15);
        assert!((d.prob(2) - 0.5).abs() < 1e-15);
        assert_eq!(d.prob(0), 0.0);
        assert_eq!(d.prob(3), 0.0);
    }

    #[test]
    fn small_error_is_near_flat() {
        let d = noise_distribution(18, 0.01f64, 0.5).unwrap();
        let flat = 1.0 / 17.0;
        for i in 1..18 {
            assert!(
                (d.prob(i) - flat).abs() < 0.01 * flat * 10.0,
                "{i}: {}",
                d.prob(i)
            );
        }
        // and the distribution is not flat at p = 0.15
        let peaked = noise_distribution(18, 0.15f64, 0.5).unwrap();
        let max_exit = (1..18)
            .max_by(|&a, &b| peaked.prob(a).partial_cmp(&peaked.prob(b)).unwrap())
            .unwrap();
        assert_eq!(max_exit, 9);
        assert!(peaked.prob(9) > peaked.prob(1) * 1.5);
    }

    #[test]
    fn converges_to_flat_limit() {
        let flat = NoiseDistribution::<f64>::flat(18).unwrap();
        let d = noise_distribution(18, 1e-9f64, 0.5).unwrap();
        for i in 0..=18 {
            assert!((d.prob(i) - flat.prob(i)).abs() < 1e-6);
        }
    }

    #[test]
    fn zero_error_has_no_paths() {
        assert!(matches!(
            noise_distribution(18, 0.0f64, 0.5),
            Err(Error::NoErrorPaths)
        ));
        assert!(noise_distribution(1, 0.1f64, 0.5).is_err());
        assert!(noise_distribution(10, 1.0f64, 0.5).is_err());
    }

    #[test]
    fn stats_and_requirement() {
        let d = noise_distribution(18, 0.1165f64, 0.5).unwrap();
        assert_eq!(noise_stats(&d, 0), (0.0, 0.0));
        assert_eq!(required_per_exit(&d, 0, 3.0), 1);
        let (mean, sigma) = noise_stats(&d, 39);
        let p9 = d.prob(9);
        assert!((mean - 39.0 * p9).abs() < 1e-12);
        assert!((sigma - (39.0 * p9 * (1.0 - p9)).sqrt()).abs() < 1e-12);
        let mut prev = 0;
        for n in 0..2000 {
            let r = required_per_exit(&d, n, 3.0);
            assert!(r >= prev);
            prev = r;
        }
    }

    #[test]
    fn single_precision_agrees() {
        let a = noise_distribution(18, 0.15f64, 0.5).unwrap();
        let b = noise_distribution(18, 0.15f32, 0.5).unwrap();
        for i in 0..=18 {
            assert!((a.prob(i) - b.prob(i) as f64).abs() < 1e-6);
        }
    }

    proptest! {
        #[test]
        fn normalized_and_symmetric(z in 2usize..=40, p in 1e-4f64..0.9) {
            let d = noise_distribution(z, p, 0.5).unwrap();
            let total: f64 = d.probs().iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
            for i in 0..=z {
                prop_assert!((d.prob(i) - d.prob(z - i)).abs() < 1e-12);
            }
        }
    }
}
