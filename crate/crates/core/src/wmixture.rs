//! Mixture families with prescribed components (w-mixtures).
//!
//! A family is spanned by `D + 1` fixed, linearly independent component
//! densities `p_0 .. p_D`; the member at `theta` is
//! `m_theta = (1 - sum theta_i) p_0 + sum theta_i p_i`. Arithmetic mixtures
//! of members are members, so
//!
//! - `KL(m_theta1 : m_theta2) = B_F(theta1 : theta2)` for the convex
//!   negentropy generator `F(theta) = -h(m_theta)`, and
//! - the Jensen-Shannon divergence is the Jensen gap
//!   `JS = (F(theta1) + F(theta2)) / 2 - F((theta1 + theta2) / 2)`.
//!
//! `F` is generally not available in closed form (it can even be
//! non-analytic), so it is realized through the quadrature oracle and its
//! gradient by Richardson-extrapolated central differences. Categorical
//! families (delta components on a finite alphabet) evaluate exactly.

use std::collections::HashMap;
use std::sync::RwLock;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::oracle::{self, Density, OracleCfg, Support, DENSITY_FLOOR};

/// Interior margin: negentropy evaluations reject weights closer than this
/// to the simplex boundary, where the entropy integrand conditions badly.
const DOMAIN_MARGIN: f64 = 1e-9;

/// Finite-difference step for the numeric Bregman gradient.
const FD_STEP: f64 = 1e-5;

/// A mixture family with prescribed components.
pub struct WMixtureFamily {
    components: Vec<Density>,
    // negentropy cache: concurrent readers, serialized insertion,
    // values immutable once stored
    cache: RwLock<HashMap<(Vec<u64>, u64), f64>>,
}

impl std::fmt::Debug for WMixtureFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WMixtureFamily")
            .field("components", &self.components.len())
            .finish()
    }
}

impl WMixtureFamily {
    /// Builds a family from its component densities. Components must share a
    /// support; near-dependent components (normalized Gram matrix with an
    /// eigenvalue at numerical zero) are rejected, a heuristic stand-in for
    /// the linear-independence assumption that remains the caller's
    /// responsibility.
    pub fn new(components: Vec<Density>) -> Result<Self> {
        if components.len() < 2 {
            return Err(Error::Domain(
                "a mixture family needs at least two components".into(),
            ));
        }
        let support = components[0].support().clone();
        if components.iter().any(|c| *c.support() != support) {
            return Err(Error::Domain(
                "all components must share one support".into(),
            ));
        }
        let fam = WMixtureFamily {
            components,
            cache: RwLock::new(HashMap::new()),
        };
        if !fam.components_independent() {
            return Err(Error::Degenerate(
                "components look linearly dependent on the sample grid".into(),
            ));
        }
        Ok(fam)
    }

    /// The categorical family over an alphabet of `size` cells: delta
    /// components, for which every quantity here is an exact finite sum.
    pub fn categorical(size: usize) -> Result<Self> {
        let components = (0..size)
            .map(|i| {
                let mut probs = vec![0.0; size];
                probs[i] = 1.0;
                Density::categorical(&probs)
            })
            .collect::<Result<Vec<_>>>()?;
        WMixtureFamily::new(components)
    }

    /// Number of free parameters `D` (one less than the component count).
    pub fn param_dim(&self) -> usize {
        self.components.len() - 1
    }

    pub fn components(&self) -> &[Density] {
        &self.components
    }

    /// Mixture weights `(w_0, .., w_D)` for a parameter on the closed
    /// simplex.
    fn weights(&self, theta: &[f64]) -> Result<Vec<f64>> {
        if theta.len() != self.param_dim() {
            return Err(Error::Domain(format!(
                "theta has length {}, family has {} free parameters",
                theta.len(),
                self.param_dim()
            )));
        }
        let sum: f64 = theta.iter().sum();
        if theta.iter().any(|&t| !(t >= 0.0)) || sum > 1.0 + 1e-12 {
            return Err(Error::Domain(format!(
                "theta {theta:?} outside the simplex"
            )));
        }
        let mut w = Vec::with_capacity(theta.len() + 1);
        w.push((1.0 - sum).max(0.0));
        w.extend_from_slice(theta);
        Ok(w)
    }

    /// Interior-domain test used by the negentropy machinery: every
    /// coordinate at least `1e-9` and the total at most `1 - 1e-9`.
    pub fn theta_in_domain(&self, theta: &[f64]) -> bool {
        theta.len() == self.param_dim()
            && theta.iter().all(|&t| t >= DOMAIN_MARGIN)
            && theta.iter().sum::<f64>() <= 1.0 - DOMAIN_MARGIN
    }

    fn check_interior(&self, theta: &[f64]) -> Result<()> {
        if !self.theta_in_domain(theta) {
            return Err(Error::Domain(format!(
                "theta {theta:?} outside the interior domain (margin {DOMAIN_MARGIN})"
            )));
        }
        Ok(())
    }

    /// The member `m_theta`, evaluable anywhere on the closed simplex
    /// (boundary members are honest densities even though the negentropy
    /// machinery stays in the interior).
    pub fn mixture_density(&self, theta: &[f64]) -> Result<Density> {
        let w = self.weights(theta)?;

        // categorical families compose exactly
        if let Some(probs) = self.categorical_probs(&w) {
            return Density::categorical(&probs);
        }

        let comps: Vec<Density> = self.components.clone();
        let comps_log = comps.clone();
        let w_eval = w.clone();
        let w_log = w.clone();
        let support = self.components[0].support().clone();
        let mut density = Density::new(
            support,
            move |x| {
                comps
                    .iter()
                    .zip(&w_eval)
                    .map(|(c, &wi)| wi * c.eval(x))
                    .sum()
            },
            move |x| {
                comps_log
                    .iter()
                    .zip(&w_log)
                    .map(|(c, &wi)| wi * c.eval(x))
                    .sum::<f64>()
                    .max(DENSITY_FLOOR)
                    .ln()
            },
        );
        if self.components.iter().all(|c| c.can_sample()) {
            let comps = self.components.clone();
            let w = w.clone();
            density = density.with_sampler(move |rng| {
                let u: f64 = rand::Rng::random(rng);
                let mut acc = 0.0;
                for (c, &wi) in comps.iter().zip(&w) {
                    acc += wi;
                    if u <= acc {
                        return c.sample(rng).expect("component sampler");
                    }
                }
                comps.last().unwrap().sample(rng).expect("component sampler")
            });
        }
        Ok(density)
    }

    fn categorical_probs(&self, weights: &[f64]) -> Option<Vec<f64>> {
        let mut acc: Option<Vec<f64>> = None;
        for (c, &wi) in self.components.iter().zip(weights) {
            match c.family() {
                Some(crate::oracle::FamilyTag::Categorical { probs }) => {
                    let acc = acc.get_or_insert_with(|| vec![0.0; probs.len()]);
                    if acc.len() != probs.len() {
                        return None;
                    }
                    for (a, p) in acc.iter_mut().zip(probs) {
                        *a += wi * p;
                    }
                }
                _ => return None,
            }
        }
        acc
    }

    /// Convex negentropy generator `F(theta) = -h(m_theta)`, computed by the
    /// oracle and cached per `(theta, tolerance)`.
    pub fn negentropy(&self, theta: &[f64], cfg: &OracleCfg) -> Result<f64> {
        self.check_interior(theta)?;
        let key = (
            theta.iter().map(|t| t.to_bits()).collect::<Vec<_>>(),
            cfg.abs_tol.to_bits(),
        );
        if let Some(&v) = self.cache.read().expect("cache lock").get(&key) {
            return Ok(v);
        }
        let m = self.mixture_density(theta)?;
        let est = oracle::expectation(&m, |x| m.log_eval(x).max(crate::divergences::LOG_FLOOR) , cfg)?;
        self.cache.write().expect("cache lock").insert(key, est.value);
        Ok(est.value)
    }

    /// `grad F` by Richardson-extrapolated central differences with base
    /// step `1e-5`; no closed gradient exists because `F` itself does not.
    pub fn grad_negentropy(&self, theta: &[f64], cfg: &OracleCfg) -> Result<Vec<f64>> {
        self.check_interior(theta)?;
        let mut grad = Vec::with_capacity(theta.len());
        for i in 0..theta.len() {
            let diff = |h: f64| -> Result<f64> {
                let mut up = theta.to_vec();
                let mut dn = theta.to_vec();
                up[i] += h;
                dn[i] -= h;
                Ok((self.negentropy(&up, cfg)? - self.negentropy(&dn, cfg)?) / (2.0 * h))
            };
            let d_full = diff(FD_STEP)?;
            let d_half = diff(FD_STEP / 2.0)?;
            grad.push((4.0 * d_half - d_full) / 3.0);
        }
        Ok(grad)
    }

    /// `KL(m_theta1 : m_theta2) = B_F(theta1 : theta2)` through the numeric
    /// generator.
    pub fn kl(&self, theta1: &[f64], theta2: &[f64], cfg: &OracleCfg) -> Result<f64> {
        let f1 = self.negentropy(theta1, cfg)?;
        let f2 = self.negentropy(theta2, cfg)?;
        let g2 = self.grad_negentropy(theta2, cfg)?;
        let inner: f64 = theta1
            .iter()
            .zip(theta2)
            .zip(&g2)
            .map(|((a, b), g)| (a - b) * g)
            .sum();
        Ok(f1 - f2 - inner)
    }

    /// `JS(m_theta1, m_theta2) = (F(theta1) + F(theta2)) / 2
    /// - F((theta1 + theta2) / 2)`, the closed-path Jensen-Shannon
    /// divergence of the mixture family.
    pub fn jsd(&self, theta1: &[f64], theta2: &[f64], cfg: &OracleCfg) -> Result<f64> {
        let mid: Vec<f64> = theta1
            .iter()
            .zip(theta2)
            .map(|(a, b)| 0.5 * (a + b))
            .collect();
        Ok(0.5 * self.negentropy(theta1, cfg)? + 0.5 * self.negentropy(theta2, cfg)?
            - self.negentropy(&mid, cfg)?)
    }

    /// Normalized-Gram heuristic for component independence.
    fn components_independent(&self) -> bool {
        let n = self.components.len();
        let inner = |a: &Density, b: &Density| -> f64 {
            match self.components[0].support() {
                Support::FiniteAlphabet(size) => (0..*size)
                    .map(|i| a.eval(&[i as f64]) * b.eval(&[i as f64]))
                    .sum(),
                Support::PositiveHalfLine => {
                    let steps = 2001;
                    (1..steps)
                        .map(|k| {
                            let t = k as f64 / steps as f64;
                            let x = t / (1.0 - t);
                            let jac = 1.0 / ((1.0 - t) * (1.0 - t));
                            a.eval(&[x]) * b.eval(&[x]) * jac / steps as f64
                        })
                        .sum()
                }
                _ => {
                    // real line through the tail transform; a coarse sampled
                    // quadrature is enough for a rank heuristic
                    let steps = 2001;
                    (1..steps)
                        .map(|k| {
                            let t = -1.0 + 2.0 * k as f64 / steps as f64;
                            let s = 1.0 - t * t;
                            let x = t / s;
                            let jac = (1.0 + t * t) / (s * s);
                            let v = a.eval(&[x]) * b.eval(&[x]);
                            if v == 0.0 {
                                0.0
                            } else {
                                v * jac * 2.0 / steps as f64
                            }
                        })
                        .sum()
                }
            }
        };
        let mut gram = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = inner(&self.components[i], &self.components[j]);
                gram[(i, j)] = v;
                gram[(j, i)] = v;
            }
        }
        for i in 0..n {
            if gram[(i, i)] <= 0.0 {
                return false;
            }
        }
        let norm = DMatrix::from_fn(n, n, |i, j| {
            gram[(i, j)] / (gram[(i, i)] * gram[(j, j)]).sqrt()
        });
        let eigs = norm.symmetric_eigenvalues();
        eigs.iter().all(|&e| e > 1e-10)
    }
}

/// Right-sided Bregman centroid of mixture parameters: the center of mass,
/// independent of the (numeric, expensive) generator.
pub fn bregman_centroid_right(
    fam: &WMixtureFamily,
    thetas: &[Vec<f64>],
    weights: &[f64],
) -> Result<Vec<f64>> {
    if thetas.is_empty() || thetas.len() != weights.len() {
        return Err(Error::Domain("need as many weights as parameters".into()));
    }
    let wsum: f64 = weights.iter().sum();
    if weights.iter().any(|&w| w < 0.0) || (wsum - 1.0).abs() > 1e-9 {
        return Err(Error::Domain("weights must lie on the simplex".into()));
    }
    let mut center = vec![0.0; fam.param_dim()];
    for (theta, &w) in thetas.iter().zip(weights) {
        if !fam.theta_in_domain(theta) {
            return Err(Error::Domain(format!("theta {theta:?} outside domain")));
        }
        for (c, t) in center.iter_mut().zip(theta) {
            *c += w * t;
        }
    }
    Ok(center)
}
