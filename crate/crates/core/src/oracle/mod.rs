//! Numerical integration serving as the brute-force ground truth for every
//! closed-form claim in this crate.
//!
//! One-dimensional supports use adaptive Gauss-Kronrod quadrature with a
//! tail substitution (`x = t / (1 - t^2)` on the real line) rather than
//! truncation, because Cauchy-type `1/x^2` tails carry mass a truncated
//! window would miss. Finite alphabets are summed exactly. Dimensions two
//! and up use importance-sampled Monte Carlo with a caller-supplied proposal
//! density; the reported `abs_error` there is one standard error, and the
//! cross-validation suites test against 3-sigma bands.
//!
//! Everything is deterministic for a fixed seed.

pub mod density;
mod mc;
mod quad;

pub use density::{Density, FamilyTag, Support, DENSITY_FLOOR};

use crate::error::{Error, Result};

/// Tolerance and budget knobs for the oracle.
#[derive(Clone, Copy, Debug)]
pub struct OracleCfg {
    /// Absolute tolerance for 1D adaptive quadrature.
    pub abs_tol: f64,
    /// Budget of 1D integrand evaluations before giving up.
    pub max_nodes: usize,
    /// Monte Carlo sample count for `d >= 2` integrals.
    pub mc_samples: usize,
    /// RNG seed; fixing it makes Monte Carlo results bit-reproducible.
    pub seed: u64,
}

impl Default for OracleCfg {
    fn default() -> Self {
        OracleCfg {
            abs_tol: 1e-10,
            max_nodes: 400_000,
            mc_samples: 200_000,
            seed: 0,
        }
    }
}

impl OracleCfg {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_mc_samples(mut self, n: usize) -> Self {
        self.mc_samples = n;
        self
    }
}

/// An integral value with its error estimate and the work it took.
#[derive(Clone, Copy, Debug)]
pub struct IntegralEstimate {
    pub value: f64,
    pub abs_error: f64,
    pub nodes_used: usize,
}

impl IntegralEstimate {
    /// An exact value known without integration (`Z = 1` for arithmetic
    /// mixtures, closed-form normalizers).
    pub fn exact(value: f64) -> Self {
        IntegralEstimate {
            value,
            abs_error: 0.0,
            nodes_used: 0,
        }
    }
}

/// Integrates `f` over a support with respect to the support's dominating
/// measure (Lebesgue or counting).
///
/// `RealLine(d)` with `d >= 2` has no quadrature backend; use
/// [`integrate_mc`] with a proposal density instead.
pub fn integrate(
    f: impl Fn(&[f64]) -> f64,
    support: &Support,
    cfg: &OracleCfg,
) -> Result<IntegralEstimate> {
    match support {
        Support::RealLine(1) => {
            let g = |x: f64| f(&[x]);
            let (value, abs_error, nodes_used) =
                quad::integrate_real_line(&g, cfg.abs_tol, cfg.max_nodes)?;
            Ok(IntegralEstimate {
                value,
                abs_error,
                nodes_used,
            })
        }
        Support::RealLine(d) => Err(Error::Domain(format!(
            "no quadrature rule for R^{d}; use integrate_mc with a proposal"
        ))),
        Support::PositiveHalfLine => {
            let g = |x: f64| f(&[x]);
            let (value, abs_error, nodes_used) =
                quad::integrate_half_line(&g, cfg.abs_tol, cfg.max_nodes)?;
            Ok(IntegralEstimate {
                value,
                abs_error,
                nodes_used,
            })
        }
        Support::FiniteAlphabet(n) => {
            let mut value = 0.0;
            let mut abs_sum = 0.0;
            for i in 0..*n {
                let v = f(&[i as f64]);
                if !v.is_finite() {
                    return Err(Error::NonFiniteIntegrand {
                        node: vec![i as f64],
                    });
                }
                value += v;
                abs_sum += v.abs();
            }
            Ok(IntegralEstimate {
                value,
                abs_error: f64::EPSILON * abs_sum * (*n as f64).max(1.0),
                nodes_used: *n,
            })
        }
    }
}

/// Importance-sampled Monte Carlo integral of `f` with respect to Lebesgue
/// measure, using `proposal` (which must be sampleable) as the importance
/// density. Deterministic given `cfg.seed`.
pub fn integrate_mc(
    f: impl Fn(&[f64]) -> f64,
    proposal: &Density,
    cfg: &OracleCfg,
) -> Result<IntegralEstimate> {
    let (value, se) = mc::importance_sample(&f, proposal, cfg.mc_samples, cfg.seed)?;
    Ok(IntegralEstimate {
        value,
        abs_error: se,
        nodes_used: cfg.mc_samples,
    })
}

/// Estimate of `E_p[f] = integral p(x) f(x) dmu(x)`.
///
/// One-dimensional supports integrate `p * f` by quadrature; `d >= 2`
/// averages `f` over draws from `p`.
pub fn expectation(
    p: &Density,
    f: impl Fn(&[f64]) -> f64,
    cfg: &OracleCfg,
) -> Result<IntegralEstimate> {
    match p.support() {
        Support::RealLine(d) if *d >= 2 => {
            let (value, se) = mc::expectation_sample(p, &f, cfg.mc_samples, cfg.seed)?;
            Ok(IntegralEstimate {
                value,
                abs_error: se,
                nodes_used: cfg.mc_samples,
            })
        }
        support => integrate(
            |x| {
                let px = p.eval(x);
                if px == 0.0 {
                    0.0
                } else {
                    px * f(x)
                }
            },
            support,
            cfg,
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cauchy(gamma: f64) -> Density {
        Density::new(
            Support::RealLine(1),
            move |x| gamma / (PI * (gamma * gamma + x[0] * x[0])),
            move |x| (gamma / (PI * (gamma * gamma + x[0] * x[0]))).ln(),
        )
    }

    #[test]
    fn cauchy_pdf_normalizes() {
        let p = cauchy(1.0);
        let est = integrate(|x| p.eval(x), &Support::RealLine(1), &OracleCfg::default()).unwrap();
        assert!((est.value - 1.0).abs() <= 1e-9, "{est:?}");
    }

    #[test]
    fn harmonic_mixture_normalizer_matches_closed_form() {
        // Z^H_(1/2)(0.1, 0.5) = sqrt(g1 g2 / ((g1 g2)_a (g2 g1)_a)) = sqrt(5)/3
        let p = cauchy(0.1);
        let q = cauchy(0.5);
        let est = integrate(
            |x| {
                let (a, b) = (p.eval(x), q.eval(x));
                a * b / (0.5 * a + 0.5 * b)
            },
            &Support::RealLine(1),
            &OracleCfg::default(),
        )
        .unwrap();
        let expected = (0.05f64 / 0.09).sqrt();
        assert!(
            (est.value - expected).abs() <= 1e-8,
            "{} vs {expected}",
            est.value
        );
    }

    #[test]
    fn cauchy_entropy_matches_log_4_pi() {
        let p = cauchy(1.0);
        let est = expectation(&p, |x| -p.log_eval(x), &OracleCfg::default()).unwrap();
        assert!((est.value - (4.0 * PI).ln()).abs() <= 1e-8, "{est:?}");
    }

    #[test]
    fn cauchy_squared_mass_is_inverse_two_pi_gamma() {
        for gamma in [0.4, 1.0, 2.5] {
            let p = cauchy(gamma);
            let est = expectation(&p, |x| p.eval(x), &OracleCfg::default()).unwrap();
            assert!((est.value - 1.0 / (2.0 * PI * gamma)).abs() <= 1e-9);
        }
    }

    #[test]
    fn expectation_of_one_is_one() {
        let p = cauchy(0.7);
        let est = expectation(&p, |_| 1.0, &OracleCfg::default()).unwrap();
        assert!((est.value - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn refinement_does_not_worsen_reported_error() {
        let p = cauchy(0.3);
        let mut last = f64::INFINITY;
        for tol in [1e-4, 1e-6, 1e-8, 1e-10] {
            let cfg = OracleCfg::default().with_abs_tol(tol);
            let est = integrate(|x| p.eval(x), &Support::RealLine(1), &cfg).unwrap();
            assert!(
                est.abs_error <= last + 1e-15,
                "tol {tol}: {} > {last}",
                est.abs_error
            );
            last = est.abs_error;
        }
    }

    #[test]
    fn finite_alphabet_sums_exactly() {
        let d = Density::categorical(&[0.25, 0.25, 0.5]).unwrap();
        let est = integrate(|x| d.eval(x), d.support(), &OracleCfg::default()).unwrap();
        assert_eq!(est.nodes_used, 3);
        assert!((est.value - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn mc_is_deterministic_given_seed() {
        let d2 = mvn2_standard();
        let cfg = OracleCfg::default().with_mc_samples(5_000).with_seed(42);
        let a = integrate_mc(|x| d2.eval(x), &d2, &cfg).unwrap();
        let b = integrate_mc(|x| d2.eval(x), &d2, &cfg).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        // self-proposal: every weight is exactly 1
        assert_eq!(a.value, 1.0);
        assert_eq!(a.abs_error, 0.0);
    }

    fn mvn2_standard() -> Density {
        use rand_distr::{Distribution, StandardNormal};
        let log_norm = -(2.0 * PI).ln();
        Density::new(
            Support::RealLine(2),
            move |x| (log_norm - 0.5 * (x[0] * x[0] + x[1] * x[1])).exp(),
            move |x| log_norm - 0.5 * (x[0] * x[0] + x[1] * x[1]),
        )
        .with_sampler(|rng| {
            let z0: f64 = StandardNormal.sample(rng);
            let z1: f64 = StandardNormal.sample(rng);
            vec![z0, z1]
        })
    }
}
