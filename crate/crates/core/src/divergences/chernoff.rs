//! Chernoff information: the maximal skew Bhattacharyya distance.
//!
//! `alpha -> B_alpha(p : q)` is strictly concave on `(0, 1)` (it is the
//! negated log-normalizer of the likelihood-ratio exponential family spanned
//! by `p` and `q`) and vanishes at both endpoints, so it admits a unique
//! interior maximizer `alpha*`. At the optimum the geometric mixture
//! `p_alpha*` is KL-equidistant from both endpoints:
//! `KL(p_alpha* : p) = KL(p_alpha* : q)`.
//!
//! The solver exploits that structure: the derivative
//! `B'(alpha) = -(KL(p_alpha : p) - KL(p_alpha : q))` changes sign
//! monotonically, so a bisection on the KL difference locates `alpha*` far
//! more precisely than comparing nearly-equal `B` values near the flat top.

use crate::error::{Error, Result};
use crate::oracle::{self, Density, IntegralEstimate, OracleCfg, Support};

use super::{bhattacharyya, LOG_FLOOR};

/// Result of the Chernoff optimization.
#[derive(Clone, Copy, Debug)]
pub struct ChernoffResult {
    /// The optimal skew `alpha*` in `(0, 1)`.
    pub alpha_star: f64,
    /// The Chernoff information `B_(alpha*)(p : q)`.
    pub value: f64,
    /// Count of positive second differences in the concavity spot check;
    /// nonzero values signal oracle noise.
    pub concavity_violations: usize,
}

/// `integral G_alpha(p, q) f dmu` for `f = 1` and `f = log(q) - log(p)`,
/// whose ratio is the derivative of the Bhattacharyya exponent.
fn geometric_terms(
    p: &Density,
    q: &Density,
    alpha: f64,
    cfg: &OracleCfg,
) -> Result<(IntegralEstimate, IntegralEstimate)> {
    let log_g = |x: &[f64]| {
        (1.0 - alpha) * p.log_eval(x).max(LOG_FLOOR) + alpha * q.log_eval(x).max(LOG_FLOOR)
    };
    let log_ratio = |x: &[f64]| q.log_eval(x).max(LOG_FLOOR) - p.log_eval(x).max(LOG_FLOOR);
    let mc = matches!(p.support(), Support::RealLine(d) if *d >= 2);
    let z = if mc {
        oracle::integrate_mc(|x| log_g(x).exp(), p, cfg)?
    } else {
        oracle::integrate(|x| log_g(x).exp(), p.support(), cfg)?
    };
    let num = if mc {
        oracle::integrate_mc(|x| log_g(x).exp() * log_ratio(x), p, cfg)?
    } else {
        oracle::integrate(|x| log_g(x).exp() * log_ratio(x), p.support(), cfg)?
    };
    Ok((z, num))
}

/// `E_(p_alpha)[log(q/p)] = KL(p_alpha : p) - KL(p_alpha : q)` where
/// `p_alpha` is the normalized geometric mixture. This is `-B'(alpha)` and
/// increases monotonically from negative to positive across `(0, 1)`.
fn kl_gap(p: &Density, q: &Density, alpha: f64, cfg: &OracleCfg) -> Result<f64> {
    let (z, num) = geometric_terms(p, q, alpha, cfg)?;
    if !(z.value > 0.0) {
        return Err(Error::Degenerate(format!(
            "geometric mixture normalizer evaluated to {}",
            z.value
        )));
    }
    // E_(p_alpha)[log(q/p)] = KL(p_alpha : p) - KL(p_alpha : q)
    Ok(num.value / z.value)
}

/// Maximizes the skew Bhattacharyya distance over `alpha` in
/// `[eps, 1 - eps]`, `eps = 1e-6`.
///
/// Errors with [`Error::Degenerate`] when `B_alpha < 1e-14` across the
/// bracket (the densities coincide).
pub fn chernoff_information(p: &Density, q: &Density, cfg: &OracleCfg) -> Result<ChernoffResult> {
    const EPS: f64 = 1e-6;

    // Degeneracy and concavity scan.
    let grid: Vec<f64> = (1..=9).map(|k| k as f64 / 10.0).collect();
    let mut b_vals = Vec::with_capacity(grid.len());
    for &a in &grid {
        b_vals.push(bhattacharyya(p, q, a, false, cfg)?);
    }
    if b_vals.iter().all(|&b| b < 1e-14) {
        return Err(Error::Degenerate(
            "Bhattacharyya distance vanishes across the bracket; the densities coincide".into(),
        ));
    }
    let noise = 100.0 * cfg.abs_tol + 1e-9;
    let concavity_violations = b_vals
        .windows(3)
        .filter(|w| w[2] - 2.0 * w[1] + w[0] > noise)
        .count();

    // B'(alpha) flips sign exactly once; bisect on the KL-equality gap.
    let lo = EPS;
    let hi = 1.0 - EPS;
    let g_lo = kl_gap(p, q, lo, cfg)?;
    let g_hi = kl_gap(p, q, hi, cfg)?;
    let alpha_star = if g_lo >= 0.0 {
        lo // maximum pinned at the left edge of the bracket
    } else if g_hi <= 0.0 {
        hi
    } else {
        let mut lo = lo;
        let mut hi = hi;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if hi - lo < 1e-12 {
                break;
            }
            if kl_gap(p, q, mid, cfg)? < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };

    Ok(ChernoffResult {
        alpha_star,
        value: bhattacharyya(p, q, alpha_star, false, cfg)?,
        concavity_violations,
    })
}

/// Normalized geometric mixture density `p_alpha` between two densities
/// (the Hellinger-arc member), for checking the KL-equality optimality
/// condition of the Chernoff point.
pub fn geometric_mixture_density(
    p: &Density,
    q: &Density,
    alpha: f64,
    cfg: &OracleCfg,
) -> Result<Density> {
    let mc = matches!(p.support(), Support::RealLine(d) if *d >= 2);
    let log_g = {
        let (pp, qq) = (p.clone(), q.clone());
        move |x: &[f64]| {
            (1.0 - alpha) * pp.log_eval(x).max(LOG_FLOOR) + alpha * qq.log_eval(x).max(LOG_FLOOR)
        }
    };
    let z = if mc {
        oracle::integrate_mc(|x| log_g(x).exp(), p, cfg)?
    } else {
        oracle::integrate(|x| log_g(x).exp(), p.support(), cfg)?
    };
    if !(z.value > 0.0) {
        return Err(Error::Degenerate("geometric mixture normalizer".into()));
    }
    let log_z = z.value.ln();
    Ok(Density::from_log(p.support().clone(), move |x| {
        log_g(x) - log_z
    }))
}
