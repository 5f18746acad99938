//! Exponential-family engine: Bregman and skew Jensen divergences on natural
//! parameters, and the closed-form geometric Jensen-Shannon divergence.
//!
//! A family is specified by its log-normalizer `F` (strictly convex on the
//! natural parameter space), its gradient `grad F` (the map to expectation
//! parameters), a domain membership test, and a density factory. Parameters
//! are flat `f64` vectors; for the multivariate Gaussian the composite
//! (vector, matrix) parameter is flattened so the compound inner product
//! becomes the plain Euclidean dot product.
//!
//! The closed forms realized here:
//!
//! - `KL(p_theta1 : p_theta2) = B_F(theta2 : theta1)`;
//! - geometric mixtures stay in the family, with normalizer
//!   `Z_alpha^G = exp(-J_F^alpha(theta1 : theta2))`;
//! - `JS^G_alpha = (1-alpha) B_F((t1 t2)_alpha : t1) + alpha B_F((t1 t2)_alpha : t2)`;
//! - the dual (reverse-KL) symmetrization collapses to `J_F^alpha` itself.

pub mod mvn;

use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::oracle::{Density, Support};

pub use mvn::{Chart, MvnParam};

/// A skew Jensen divergence value `J_F^alpha(theta1 : theta2)`.
#[derive(Clone, Copy, Debug)]
pub struct JensenGap {
    pub value: f64,
    pub alpha: f64,
}

type VecFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type GradFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
type GradInvFn = Arc<dyn Fn(&[f64]) -> Result<Vec<f64>> + Send + Sync>;
type DomainFn = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;
type FactoryFn = Arc<dyn Fn(&[f64]) -> Result<Density> + Send + Sync>;

/// An exponential family given through its log-normalizer.
#[derive(Clone)]
pub struct ExpFamily {
    name: String,
    dim_param: usize,
    f: VecFn,
    grad: GradFn,
    grad_inv: Option<GradInvFn>,
    domain: DomainFn,
    factory: FactoryFn,
}

impl std::fmt::Debug for ExpFamily {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        fm.debug_struct("ExpFamily")
            .field("name", &self.name)
            .field("dim_param", &self.dim_param)
            .finish()
    }
}

impl ExpFamily {
    pub fn new(
        name: impl Into<String>,
        dim_param: usize,
        f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        grad: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
        domain: impl Fn(&[f64]) -> bool + Send + Sync + 'static,
        factory: impl Fn(&[f64]) -> Result<Density> + Send + Sync + 'static,
    ) -> Self {
        ExpFamily {
            name: name.into(),
            dim_param,
            f: Arc::new(f),
            grad: Arc::new(grad),
            grad_inv: None,
            domain: Arc::new(domain),
            factory: Arc::new(factory),
        }
    }

    pub fn with_grad_inverse(
        mut self,
        inv: impl Fn(&[f64]) -> Result<Vec<f64>> + Send + Sync + 'static,
    ) -> Self {
        self.grad_inv = Some(Arc::new(inv));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim_param(&self) -> usize {
        self.dim_param
    }

    pub fn in_domain(&self, theta: &[f64]) -> bool {
        theta.len() == self.dim_param && (self.domain)(theta)
    }

    fn check_domain(&self, theta: &[f64]) -> Result<()> {
        if !self.in_domain(theta) {
            return Err(Error::Domain(format!(
                "{theta:?} outside the natural domain of {}",
                self.name
            )));
        }
        Ok(())
    }

    /// Log-normalizer `F(theta)`.
    pub fn log_normalizer(&self, theta: &[f64]) -> Result<f64> {
        self.check_domain(theta)?;
        Ok((self.f)(theta))
    }

    /// `grad F(theta)`, the expectation parameter of `theta`.
    pub fn grad_f(&self, theta: &[f64]) -> Result<Vec<f64>> {
        self.check_domain(theta)?;
        Ok((self.grad)(theta))
    }

    /// `(grad F)^-1(eta)`: closed form when the family ships one, otherwise a
    /// bisection fallback for one-parameter families (grad F is strictly
    /// increasing there because F is strictly convex).
    pub fn grad_inverse(&self, eta: &[f64]) -> Result<Vec<f64>> {
        if let Some(inv) = &self.grad_inv {
            return inv(eta);
        }
        if self.dim_param != 1 {
            return Err(Error::GradientInversion(format!(
                "{}: no closed-form gradient inverse and dim > 1",
                self.name
            )));
        }
        self.grad_inverse_bisect(eta[0]).map(|t| vec![t])
    }

    fn grad_inverse_bisect(&self, eta: f64) -> Result<f64> {
        // Locate any domain point to anchor the bracket.
        let seeds = [0.0, -0.5, 0.5, -1.0, 1.0, -2.0, 2.0, -4.0, 4.0, -8.0, 8.0];
        let mut anchor = None;
        for &s in &seeds {
            if self.in_domain(&[s]) {
                anchor = Some(s);
                break;
            }
        }
        let anchor =
            anchor.ok_or_else(|| Error::GradientInversion("no domain seed found".into()))?;
        let g = |t: f64| (self.grad)(&[t])[0];

        // Expand left/right from the anchor while staying in the domain.
        let (mut lo, mut hi) = (anchor, anchor);
        let mut step = 1.0;
        for _ in 0..200 {
            if g(lo) <= eta {
                break;
            }
            let mut cand = lo - step;
            while !self.in_domain(&[cand]) && step > 1e-12 {
                step *= 0.5;
                cand = lo - step;
            }
            if !self.in_domain(&[cand]) {
                return Err(Error::GradientInversion(format!(
                    "cannot bracket eta={eta} from below"
                )));
            }
            lo = cand;
            step *= 2.0;
        }
        step = 1.0;
        for _ in 0..200 {
            if g(hi) >= eta {
                break;
            }
            let mut cand = hi + step;
            while !self.in_domain(&[cand]) && step > 1e-12 {
                step *= 0.5;
                cand = hi + step;
            }
            if !self.in_domain(&[cand]) {
                return Err(Error::GradientInversion(format!(
                    "cannot bracket eta={eta} from above"
                )));
            }
            hi = cand;
            step *= 2.0;
        }
        if !(g(lo) <= eta && g(hi) >= eta) {
            return Err(Error::GradientInversion(format!(
                "gradient does not bracket eta={eta}"
            )));
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if g(mid) < eta {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// The family member at `theta` as an evaluable density.
    pub fn density(&self, theta: &[f64]) -> Result<Density> {
        self.check_domain(theta)?;
        (self.factory)(theta)
    }

    // --- shipped families ---------------------------------------------------

    /// Unit-variance Gaussians `N(theta, 1)`: `F(theta) = theta^2 / 2`.
    pub fn gaussian_fixed_variance() -> Self {
        const LN_SQRT_2PI: f64 = 0.9189385332046727;
        ExpFamily::new(
            "gaussian(sigma=1)",
            1,
            |t| 0.5 * t[0] * t[0],
            |t| vec![t[0]],
            |t| t[0].is_finite(),
            |t| {
                let mu = t[0];
                Ok(Density::new(
                    Support::RealLine(1),
                    move |x| {
                        let d = x[0] - mu;
                        (-0.5 * d * d - LN_SQRT_2PI).exp()
                    },
                    move |x| {
                        let d = x[0] - mu;
                        -0.5 * d * d - LN_SQRT_2PI
                    },
                )
                .with_sampler(move |rng| {
                    let z: f64 = StandardNormal.sample(rng);
                    vec![mu + z]
                }))
            },
        )
        .with_grad_inverse(|eta| Ok(eta.to_vec()))
    }

    /// Exponential distributions `-theta exp(theta x)` on `(0, inf)` for
    /// `theta < 0`: `F(theta) = -log(-theta)`.
    pub fn exponential() -> Self {
        ExpFamily::new(
            "exponential",
            1,
            |t| -(-t[0]).ln(),
            |t| vec![-1.0 / t[0]],
            |t| t[0] < -1e-12 && t[0].is_finite(),
            |t| {
                let theta = t[0];
                let rate = -theta;
                Ok(Density::new(
                    Support::PositiveHalfLine,
                    move |x| rate * (theta * x[0]).exp(),
                    move |x| rate.ln() + theta * x[0],
                )
                .with_sampler(move |rng| {
                    let u: f64 = rng.random();
                    vec![-(1.0 - u).ln() / rate]
                }))
            },
        )
        .with_grad_inverse(|eta| {
            if eta[0] <= 0.0 {
                return Err(Error::GradientInversion(format!(
                    "exponential expectation must be positive, got {}",
                    eta[0]
                )));
            }
            Ok(vec![-1.0 / eta[0]])
        })
    }

    /// Poisson distributions on the counting measure, truncated to the
    /// alphabet `{0, ..., cutoff-1}` for the oracle: `F(theta) = exp(theta)`.
    ///
    /// The domain is capped at `theta <= 4` (`lambda <= e^4`) so the
    /// truncated tail mass stays far below the oracle tolerances.
    pub fn poisson(cutoff: usize) -> Self {
        let ln_factorial: Arc<Vec<f64>> = {
            let mut v = Vec::with_capacity(cutoff);
            let mut acc = 0.0;
            v.push(0.0);
            for k in 1..cutoff {
                acc += (k as f64).ln();
                v.push(acc);
            }
            Arc::new(v)
        };
        ExpFamily::new(
            "poisson",
            1,
            |t| t[0].exp(),
            |t| vec![t[0].exp()],
            |t| t[0].is_finite() && t[0] <= 4.0,
            move |t| {
                let theta = t[0];
                let lambda = theta.exp();
                let lf = Arc::clone(&ln_factorial);
                let lf_log = Arc::clone(&lf);
                let lf_sample = Arc::clone(&lf);
                Ok(Density::new(
                    Support::FiniteAlphabet(cutoff),
                    move |x| {
                        let k = x[0].round() as usize;
                        (theta * k as f64 - lambda - lf[k]).exp()
                    },
                    move |x| {
                        let k = x[0].round() as usize;
                        theta * k as f64 - lambda - lf_log[k]
                    },
                )
                .with_sampler(move |rng| {
                    let u: f64 = rng.random();
                    let mut acc = 0.0;
                    for k in 0..lf_sample.len() {
                        acc += (theta * k as f64 - lambda - lf_sample[k]).exp();
                        if u <= acc {
                            return vec![k as f64];
                        }
                    }
                    vec![(lf_sample.len() - 1) as f64]
                }))
            },
        )
        .with_grad_inverse(|eta| {
            if eta[0] <= 0.0 {
                return Err(Error::GradientInversion(format!(
                    "Poisson mean must be positive, got {}",
                    eta[0]
                )));
            }
            Ok(vec![eta[0].ln()])
        })
    }

    /// The `d`-dimensional Gaussian family on flattened natural parameters
    /// `[theta_v, theta_M row-major]` of length `d + d^2`.
    pub fn mvn(d: usize) -> Self {
        let dim = d + d * d;
        ExpFamily::new(
            format!("mvn(d={d})"),
            dim,
            move |t| {
                MvnParam::from_flat_natural(d, t)
                    .and_then(|p| p.log_normalizer())
                    .expect("domain-checked parameter")
            },
            move |t| {
                let p = MvnParam::from_flat_natural(d, t).expect("domain-checked parameter");
                p.to_expectation()
                    .and_then(|e| flat_expectation(&e))
                    .expect("expectation conversion")
            },
            move |t| MvnParam::flat_natural_in_domain(d, t),
            move |t| MvnParam::from_flat_natural(d, t)?.density(),
        )
        .with_grad_inverse(move |eta| {
            let p = expectation_from_flat(d, eta)?;
            p.to_natural()?.flat_natural()
        })
    }
}

fn flat_expectation(e: &MvnParam) -> Result<Vec<f64>> {
    let (v, m) = e.parts();
    let d = v.len();
    let mut flat = Vec::with_capacity(d + d * d);
    flat.extend(v.iter());
    for i in 0..d {
        for j in 0..d {
            flat.push(m[(i, j)]);
        }
    }
    Ok(flat)
}

fn expectation_from_flat(d: usize, flat: &[f64]) -> Result<MvnParam> {
    if flat.len() != d + d * d {
        return Err(Error::Domain("flat expectation parameter length".into()));
    }
    let eta_v = flat[..d].to_vec();
    let eta_m: Vec<Vec<f64>> = (0..d)
        .map(|i| flat[d + i * d..d + (i + 1) * d].to_vec())
        .collect();
    MvnParam::expectation(eta_v, eta_m)
}

fn lerp(a: &[f64], b: &[f64], alpha: f64) -> Vec<f64> {
    a.iter()
        .zip(b)
        .map(|(x, y)| (1.0 - alpha) * x + alpha * y)
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Bregman divergence `B_F(theta1 : theta2) = F(theta1) - F(theta2)
/// - <theta1 - theta2, grad F(theta2)>` with the flat inner product (the
/// compound inner product for flattened composite parameters).
pub fn bregman(fam: &ExpFamily, theta1: &[f64], theta2: &[f64]) -> Result<f64> {
    let f1 = fam.log_normalizer(theta1)?;
    let f2 = fam.log_normalizer(theta2)?;
    let g2 = fam.grad_f(theta2)?;
    let diff: Vec<f64> = theta1.iter().zip(theta2).map(|(a, b)| a - b).collect();
    Ok(f1 - f2 - dot(&diff, &g2))
}

/// Skew Jensen divergence `J_F^alpha = (F(t1) F(t2))_alpha - F((t1 t2)_alpha)`.
pub fn jensen_skew(fam: &ExpFamily, theta1: &[f64], theta2: &[f64], alpha: f64) -> Result<JensenGap> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Domain(format!("alpha={alpha} outside [0, 1]")));
    }
    let f1 = fam.log_normalizer(theta1)?;
    let f2 = fam.log_normalizer(theta2)?;
    let mid = fam.log_normalizer(&lerp(theta1, theta2, alpha))?;
    Ok(JensenGap {
        value: (1.0 - alpha) * f1 + alpha * f2 - mid,
        alpha,
    })
}

/// Closed-form skew geometric Jensen-Shannon divergence
/// `(1-alpha) B_F((t1 t2)_alpha : t1) + alpha B_F((t1 t2)_alpha : t2)`.
pub fn g_jsd(fam: &ExpFamily, theta1: &[f64], theta2: &[f64], alpha: f64) -> Result<f64> {
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha={alpha} outside (0, 1)")));
    }
    let mid = lerp(theta1, theta2, alpha);
    Ok((1.0 - alpha) * bregman(fam, &mid, theta1)? + alpha * bregman(fam, &mid, theta2)?)
}

/// Dual (reverse-KL) skew geometric Jensen-Shannon divergence, which equals
/// the skew Jensen divergence `J_F^alpha(theta1 : theta2)`.
pub fn g_jsd_dual(fam: &ExpFamily, theta1: &[f64], theta2: &[f64], alpha: f64) -> Result<f64> {
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha={alpha} outside (0, 1)")));
    }
    Ok(jensen_skew(fam, theta1, theta2, alpha)?.value)
}

/// Geometric-mixture normalizer `Z_alpha^G = exp(-J_F^alpha)`.
pub fn z_geometric(fam: &ExpFamily, theta1: &[f64], theta2: &[f64], alpha: f64) -> Result<f64> {
    Ok((-jensen_skew(fam, theta1, theta2, alpha)?.value).exp())
}

/// Multi-component normalizer
/// `Z^G(theta_1..theta_k; w) = exp(F(sum_i w_i theta_i) - sum_i w_i F(theta_i))`
/// for weights on the simplex. With `k = 2` and weights `(1-alpha, alpha)`
/// this is [`z_geometric`].
pub fn z_geometric_multi(fam: &ExpFamily, thetas: &[Vec<f64>], weights: &[f64]) -> Result<f64> {
    if thetas.is_empty() || thetas.len() != weights.len() {
        return Err(Error::Domain("need as many weights as components".into()));
    }
    let wsum: f64 = weights.iter().sum();
    if weights.iter().any(|&w| w < 0.0) || (wsum - 1.0).abs() > 1e-9 {
        return Err(Error::Domain(format!(
            "weights must lie on the simplex (sum {wsum})"
        )));
    }
    let mut bar = vec![0.0; thetas[0].len()];
    let mut avg_f = 0.0;
    for (theta, &w) in thetas.iter().zip(weights) {
        avg_f += w * fam.log_normalizer(theta)?;
        for (b, t) in bar.iter_mut().zip(theta) {
            *b += w * t;
        }
    }
    Ok((fam.log_normalizer(&bar)? - avg_f).exp())
}

/// Density-at-zero route to the same normalizer:
/// `Z^G = prod_i p(0; theta_i)^{w_i} / p(0; theta_bar)`.
///
/// Valid only for families whose sufficient statistic vanishes at the origin
/// (so `p(0; theta) = exp(-F(theta))` up to a carrier constant); the
/// multivariate Gaussian and the other families shipped here qualify. Used
/// as the independent second route in cross-checks.
pub fn z_via_density_at_zero(
    fam: &ExpFamily,
    thetas: &[Vec<f64>],
    weights: &[f64],
) -> Result<f64> {
    if thetas.is_empty() || thetas.len() != weights.len() {
        return Err(Error::Domain("need as many weights as components".into()));
    }
    let mut bar = vec![0.0; thetas[0].len()];
    let mut log_num = 0.0;
    let mut zero: Option<Vec<f64>> = None;
    for (theta, &w) in thetas.iter().zip(weights) {
        let dens = fam.density(theta)?;
        let z = zero.get_or_insert_with(|| vec![0.0; dens.dim()]);
        log_num += w * dens.log_eval(z);
        for (b, t) in bar.iter_mut().zip(theta) {
            *b += w * t;
        }
    }
    let dens_bar = fam.density(&bar)?;
    let zero = zero.expect("at least one component");
    Ok((log_num - dens_bar.log_eval(&zero)).exp())
}
