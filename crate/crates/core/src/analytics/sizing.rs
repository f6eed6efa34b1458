//! Confidence intervals and agent-count sizing under the Gaussian
//! approximation of the multinomial distribution.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Probability that a single outcome lands inside its 3σ interval.
pub const DEFAULT_SINGLE_SUCCESS: f64 = 0.99;

fn open_unit<F: Real>(name: &'static str, p: F) -> Result<()> {
    if p > F::zero() && p < F::one() {
        Ok(())
    } else {
        Err(Error::param(name, format!("must lie in (0, 1), got {p}")))
    }
}

fn non_negative<F: Real>(name: &'static str, x: F) -> Result<()> {
    if x >= F::zero() && x.is_finite() {
        Ok(())
    } else {
        Err(Error::param(
            name,
            format!("must be finite and >= 0, got {x}"),
        ))
    }
}

/// Multinomial probability of observing `counts` given outcome `probs`.
///
/// Evaluated in log space, so totals of several thousand trials are fine.
pub fn multinomial_pmf<F: Real>(counts: &[u64], probs: &[F]) -> Result<F> {
    if counts.len() != probs.len() {
        return Err(Error::LengthMismatch {
            left: counts.len(),
            right: probs.len(),
        });
    }
    if let Some(p) = probs
        .iter()
        .find(|p| !(**p >= F::zero() && **p <= F::one()))
    {
        return Err(Error::param("probs", format!("{p} is not a probability")));
    }
    let sum: F = probs.iter().copied().sum();
    // f32 cannot hold 1e-12 relative accuracy, so scale the tolerance.
    let tol = F::lit(1e-12).max(F::epsilon() * F::lit(4.0 * probs.len() as f64));
    if (sum - F::one()).abs() > tol {
        return Err(Error::param("probs", format!("sum to {sum}, expected 1")));
    }

    let ln_fact = |n: u64| -> F { (2..=n).map(|k| F::from_count(k).ln()).sum() };
    let total: u64 = counts.iter().sum();
    let mut log_p = ln_fact(total);
    for (&x, &p) in counts.iter().zip(probs) {
        if x == 0 {
            continue;
        }
        if p == F::zero() {
            return Ok(F::zero());
        }
        log_p = log_p - ln_fact(x) + F::from_count(x) * p.ln();
    }
    Ok(log_p.exp())
}

/// Symmetric normal-approximation interval `N p ± ell √(N p q)`.
pub fn ci_bounds<F: Real>(n: u64, p: F, ell: F) -> Result<(F, F)> {
    open_unit("p", p)?;
    non_negative("ell", ell)?;
    if n == 0 {
        return Err(Error::param("N", "must be at least 1"));
    }
    let n = F::from_count(n);
    let mean = n * p;
    let half = ell * (mean * (F::one() - p)).sqrt();
    Ok((mean - half, mean + half))
}

/// Smallest `N` with `N p - ell √(N p q) >= target`.
///
/// The closed-form root is rounded up and then nudged so the inequality holds
/// exactly in `F`.
fn binomial_sizing<F: Real>(p: F, target: u64, ell: F) -> Result<u64> {
    let q = F::one() - p;
    let t = F::from_count(target);
    let two = F::lit(2.0);
    let four = F::lit(4.0);
    let ell2 = ell * ell;
    let root = (ell2 * q + two * t + ell * (ell2 * q * q + four * q * t).sqrt()) / (two * p);
    let mut n = root
        .ceil()
        .to_u64()
        .ok_or_else(|| Error::param("N", format!("sizing result {root} is not representable")))?;

    let holds = |n: u64| {
        let nf = F::from_count(n);
        nf * p - ell * (nf * p * q).sqrt() >= t
    };
    while n > 0 && holds(n - 1) {
        n -= 1;
    }
    while !holds(n) {
        n += 1;
    }
    Ok(n)
}

/// Minimal number of agents on an ideal grid so that an outcome of
/// probability `p` receives at least `n_floor` agents at the lower edge of
/// its `ell`-sigma interval.
pub fn n_min_ideal<F: Real>(p: F, n_floor: u64, ell: F) -> Result<u64> {
    open_unit("p", p)?;
    non_negative("ell", ell)?;
    if n_floor == 0 {
        return Err(Error::param("n_floor", "must be at least 1"));
    }
    binomial_sizing(p, n_floor, ell)
}

/// Probability that all `n_sol` outcomes land inside their intervals.
pub fn success_prob<F: Real>(p_single: F, n_sol: u64) -> Result<F> {
    if !(p_single >= F::zero() && p_single <= F::one()) {
        return Err(Error::param(
            "p_single",
            format!("{p_single} is not a probability"),
        ));
    }
    Ok(p_single.powf(F::from_count(n_sol)))
}

/// Probability of crossing `n_pass` pass junctions without a single flip.
pub fn p_correct_traversal<F: Real>(p_pj: F, n_pass: u64) -> Result<F> {
    if !(p_pj >= F::zero() && p_pj < F::one()) {
        return Err(Error::param(
            "p_pj",
            format!("must lie in [0, 1), got {p_pj}"),
        ));
    }
    Ok((F::one() - p_pj).powf(F::from_count(n_pass)))
}

/// Agents needed on a faulty grid so that at least `n_min` of them traverse
/// it without error, at confidence `ell`. This is the binomial analogue of
/// [`n_min_ideal`] with success probability `p_c`; the radicand uses
/// `ell² q_c²`.
pub fn n_min_nonideal<F: Real>(n_min: u64, p_c: F, ell: F) -> Result<u64> {
    if !(p_c > F::zero() && p_c <= F::one()) {
        return Err(Error::param(
            "p_c",
            format!("must lie in (0, 1], got {p_c}"),
        ));
    }
    non_negative("ell", ell)?;
    if p_c == F::one() {
        return Ok(n_min);
    }
    binomial_sizing(p_c, n_min, ell)
}

/// Probability of the least likely correct path for the given split ratios.
pub fn min_path_prob<F: Real>(split_ratios: &[F]) -> Result<F> {
    split_ratios.iter().try_fold(F::one(), |acc, &b| {
        open_unit("split_ratio", b)?;
        Ok(acc * b.min(F::one() - b))
    })
}

/// Effective per-row error probability obtained by spreading the `s` split
/// junctions (flip probability `p_sj`) evenly over all `Z` rows.
pub fn effective_error_prob<F: Real>(p_pj: F, p_sj: F, s: u64, z: u64) -> Result<F> {
    if !(p_pj >= F::zero() && p_pj < F::one()) {
        return Err(Error::param(
            "p_pj",
            format!("must lie in [0, 1), got {p_pj}"),
        ));
    }
    open_unit("p_sj", p_sj)?;
    if s == 0 || s > z {
        return Err(Error::param(
            "s",
            format!("need 1 <= s <= Z, got s={s}, Z={z}"),
        ));
    }
    let q = F::one() - p_pj;
    let exponent = F::from_count(s) / F::from_count(z);
    Ok(F::one() - q * ((F::one() - p_sj) / q).powf(exponent))
}
