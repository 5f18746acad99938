//! Statistical distances and the symmetrization combinators built on
//! abstract means.
//!
//! The building blocks:
//!
//! - oracle-backed KL, entropy, cross-entropy and f-divergences;
//! - M-mixtures `(pq)_alpha^M proportional to M_alpha(p(x), q(x))` with their
//!   normalizers `Z_alpha^M`;
//! - the skew M-JS symmetrization `(1-alpha) D(p : (pq)_alpha^M) + alpha
//!   D(q : (pq)_alpha^M)`, the N-Jeffreys symmetrization
//!   `N_beta(D(p:q), D(q:p))`, and their combination, the skew (M,N)-JS
//!   divergence `N_beta(D(p : (pq)_alpha^M), D(q : (pq)_alpha^M))`;
//! - Bhattacharyya / Hellinger / alpha-divergences and Chernoff information.
//!
//! Every combinator takes the base distance as a [`Divergence`] value, so a
//! closed-form backend and the numeric oracle are interchangeable behind one
//! contract; the repo's core tests are exactly closed-form-vs-oracle
//! equalities. Mixtures recognize tagged parametric inputs and use the
//! family's closed-form normalizer when one exists; calling
//! [`Density::untagged`] on the inputs forces the numeric route.

mod chernoff;
mod fgen;

pub use chernoff::{chernoff_information, geometric_mixture_density, ChernoffResult};
pub use fgen::{conjugate_generator, js_skew_generator, FGenerator};

use std::sync::Arc;

use crate::cauchy;
use crate::error::{Error, Result};
use crate::expfam::mvn::{self, MvnParam};
use crate::means::{MeanGrid, WeightedMean};
use crate::oracle::{
    self, Density, FamilyTag, IntegralEstimate, OracleCfg, Support, DENSITY_FLOOR,
};

/// `ln(DENSITY_FLOOR)`; log-densities are clamped here inside integrands.
pub(crate) const LOG_FLOOR: f64 = -690.77552789821368; // ln(1e-300)

/// A KL computed under the density floor cannot meaningfully exceed half of
/// `-ln(floor)`; values beyond this threshold mean the true integral
/// diverges (non-matching supports) and are reported as the +inf sentinel.
pub const KL_DIVERGENT_THRESHOLD: f64 = 345.0;

// ---------------------------------------------------------------------------
// The distance-as-a-value contract
// ---------------------------------------------------------------------------

type ApplyFn = Arc<dyn Fn(&Density, &Density) -> Result<f64> + Send + Sync>;

/// A statistical distance `D(p : q)` between densities, either closed-form
/// or oracle-backed. `apply(p, p) = 0` within the backing method's
/// tolerance; values are nonnegative extended reals (`+inf` allowed).
#[derive(Clone)]
pub struct Divergence {
    name: String,
    closed_form: bool,
    apply: ApplyFn,
}

impl std::fmt::Debug for Divergence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Divergence({}, closed_form={})", self.name, self.closed_form)
    }
}

impl Divergence {
    pub fn new(
        name: impl Into<String>,
        closed_form: bool,
        apply: impl Fn(&Density, &Density) -> Result<f64> + Send + Sync + 'static,
    ) -> Self {
        Divergence {
            name: name.into(),
            closed_form,
            apply: Arc::new(apply),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn closed_form(&self) -> bool {
        self.closed_form
    }

    pub fn apply(&self, p: &Density, q: &Density) -> Result<f64> {
        (self.apply)(p, q)
    }

    /// Oracle-backed Kullback-Leibler divergence.
    pub fn oracle_kl(cfg: OracleCfg) -> Self {
        Divergence::new("kl", false, move |p, q| kl(p, q, &cfg))
    }

    /// Closed-form KL dispatching on the density family tags (Cauchy scale
    /// and location-scale, multivariate Gaussian, categorical). Errors on
    /// untagged or mixed-family inputs.
    pub fn closed_kl() -> Self {
        Divergence::new("kl", true, |p, q| closed_kl_dispatch(p, q))
    }

    /// The reverse distance `D*(p : q) = D(q : p)`.
    pub fn reversed(self) -> Self {
        let name = format!("{}*", self.name);
        let inner = self.apply;
        Divergence {
            name,
            closed_form: self.closed_form,
            apply: Arc::new(move |p, q| inner(q, p)),
        }
    }
}

fn closed_kl_dispatch(p: &Density, q: &Density) -> Result<f64> {
    use FamilyTag::*;
    match (p.family(), q.family()) {
        (Some(CauchyScale { gamma: a }), Some(CauchyScale { gamma: b })) => Ok(cauchy::kl(
            &cauchy::CauchyScale::new(*a)?,
            &cauchy::CauchyScale::new(*b)?,
        )),
        (Some(CauchyScale { gamma: a }), Some(CauchyLocationScale { location, gamma })) => {
            Ok(cauchy::location_scale_kl(
                &cauchy::CauchyLocationScale::new(0.0, *a)?,
                &cauchy::CauchyLocationScale::new(*location, *gamma)?,
            ))
        }
        (Some(CauchyLocationScale { location, gamma }), Some(CauchyScale { gamma: b })) => {
            Ok(cauchy::location_scale_kl(
                &cauchy::CauchyLocationScale::new(*location, *gamma)?,
                &cauchy::CauchyLocationScale::new(0.0, *b)?,
            ))
        }
        (
            Some(CauchyLocationScale {
                location: l1,
                gamma: g1,
            }),
            Some(CauchyLocationScale {
                location: l2,
                gamma: g2,
            }),
        ) => Ok(cauchy::location_scale_kl(
            &cauchy::CauchyLocationScale::new(*l1, *g1)?,
            &cauchy::CauchyLocationScale::new(*l2, *g2)?,
        )),
        (Some(MvnOrdinary { mu: m1, sigma: s1 }), Some(MvnOrdinary { mu: m2, sigma: s2 })) => {
            mvn::kl(&MvnParam::from_tag(m1, s1)?, &MvnParam::from_tag(m2, s2)?)
        }
        (Some(Categorical { probs: a }), Some(Categorical { probs: b })) => {
            if a.len() != b.len() {
                return Err(Error::Domain("categorical alphabets differ".into()));
            }
            Ok(categorical_kl(a, b))
        }
        _ => Err(Error::Domain(
            "no closed-form KL for this pair of densities; use the oracle backend".into(),
        )),
    }
}

// ---------------------------------------------------------------------------
// Oracle-backed basics
// ---------------------------------------------------------------------------

fn check_pair(p: &Density, q: &Density) -> Result<()> {
    if p.support() != q.support() {
        return Err(Error::Domain(format!(
            "densities live on different supports: {:?} vs {:?}",
            p.support(),
            q.support()
        )));
    }
    Ok(())
}

/// A KL value distinguishing a genuinely divergent integral from a finite
/// one; the divergent sentinel keeps the partial (floored) estimate.
#[derive(Clone, Copy, Debug)]
pub enum KlValue {
    Finite(IntegralEstimate),
    Divergent { partial: IntegralEstimate },
}

impl KlValue {
    /// The value as an extended real (`+inf` for the divergent sentinel).
    pub fn value(&self) -> f64 {
        match self {
            KlValue::Finite(e) => e.value,
            KlValue::Divergent { .. } => f64::INFINITY,
        }
    }

    pub fn estimate(&self) -> &IntegralEstimate {
        match self {
            KlValue::Finite(e) => e,
            KlValue::Divergent { partial } => partial,
        }
    }
}

/// Raw oracle estimate of `integral p log(p/q) dmu` under the density floor.
pub fn kl_est(p: &Density, q: &Density, cfg: &OracleCfg) -> Result<IntegralEstimate> {
    check_pair(p, q)?;
    oracle::expectation(
        p,
        |x| p.log_eval(x).max(LOG_FLOOR) - q.log_eval(x).max(LOG_FLOOR),
        cfg,
    )
}

/// KL divergence with the divergence sentinel applied.
pub fn kl_value(p: &Density, q: &Density, cfg: &OracleCfg) -> Result<KlValue> {
    let est = kl_est(p, q, cfg)?;
    if est.value > KL_DIVERGENT_THRESHOLD {
        Ok(KlValue::Divergent { partial: est })
    } else {
        Ok(KlValue::Finite(est))
    }
}

/// `KL(p : q)` as an extended real (`+inf` when the integral diverges).
pub fn kl(p: &Density, q: &Density, cfg: &OracleCfg) -> Result<f64> {
    Ok(kl_value(p, q, cfg)?.value())
}

/// Differential (or discrete) entropy `h(p) = -integral p log p dmu`.
pub fn entropy(p: &Density, cfg: &OracleCfg) -> Result<f64> {
    Ok(oracle::expectation(p, |x| -p.log_eval(x).max(LOG_FLOOR), cfg)?.value)
}

/// Cross-entropy `h_x(p : q) = -integral p log q dmu`.
///
/// `kl == cross_entropy - entropy` within combined oracle tolerance.
pub fn cross_entropy(p: &Density, q: &Density, cfg: &OracleCfg) -> Result<f64> {
    check_pair(p, q)?;
    Ok(oracle::expectation(p, |x| -q.log_eval(x).max(LOG_FLOOR), cfg)?.value)
}

/// Csiszar f-divergence `I_f(p : q) = integral p f(q/p) dmu`.
///
/// Regions where `p` underflows the density floor contribute zero, the
/// `0 f(0/0) = 0` side of the floor convention. The generator's convexity
/// can be spot-checked with [`FGenerator::convex_on_grid`].
pub fn f_divergence(
    f: &FGenerator,
    p: &Density,
    q: &Density,
    cfg: &OracleCfg,
) -> Result<f64> {
    check_pair(p, q)?;
    Ok(oracle::expectation(
        p,
        |x| {
            let pv = p.eval(x).max(DENSITY_FLOOR);
            let qv = q.eval(x).max(DENSITY_FLOOR);
            f.eval(qv / pv)
        },
        cfg,
    )?
    .value)
}

// ---------------------------------------------------------------------------
// Exact categorical forms (finite sums; used as closed backends and oracles)
// ---------------------------------------------------------------------------

/// Exact categorical KL with the `0 log 0 = 0` convention; `+inf` when some
/// `q_i = 0 < p_i`.
pub fn categorical_kl(p: &[f64], q: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi <= 0.0 {
            continue;
        }
        if qi <= 0.0 {
            return f64::INFINITY;
        }
        acc += pi * (pi / qi).ln();
    }
    acc
}

/// Exact categorical Jensen-Shannon divergence
/// `1/2 sum_i (p_i log(2 p_i / (p_i + q_i)) + q_i log(2 q_i / (p_i + q_i)))`.
pub fn categorical_jsd(p: &[f64], q: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        let m = 0.5 * (pi + qi);
        if pi > 0.0 {
            acc += 0.5 * pi * (pi / m).ln();
        }
        if qi > 0.0 {
            acc += 0.5 * qi * (qi / m).ln();
        }
    }
    acc
}

// ---------------------------------------------------------------------------
// M-mixtures
// ---------------------------------------------------------------------------

/// A normalized statistical M-mixture `(pq)_alpha^M`.
#[derive(Clone, Debug)]
pub struct MMixture {
    pub base_p: Density,
    pub base_q: Density,
    pub mean: WeightedMean,
    pub alpha: f64,
    /// The normalizer `Z_alpha^M`; `nodes_used == 0` marks a closed form.
    pub z: IntegralEstimate,
    density: Density,
}

impl MMixture {
    pub fn density(&self) -> &Density {
        &self.density
    }

    pub fn into_density(self) -> Density {
        self.density
    }

    pub fn is_closed_form(&self) -> bool {
        self.z.nodes_used == 0
    }
}

/// Numeric estimate of `Z_alpha^M(p : q) = integral M_alpha(p, q) dmu`.
///
/// One-dimensional supports use quadrature; `d >= 2` uses Monte Carlo with
/// `p` (the first argument) as the proposal.
pub fn numeric_mixture_z(
    p: &Density,
    q: &Density,
    mean: &WeightedMean,
    alpha: f64,
    cfg: &OracleCfg,
) -> Result<IntegralEstimate> {
    check_pair(p, q)?;
    let integrand = |x: &[f64]| {
        mean.evaluate_unchecked(
            p.eval(x).max(DENSITY_FLOOR),
            q.eval(x).max(DENSITY_FLOOR),
            alpha,
        )
    };
    let est = match p.support() {
        Support::RealLine(d) if *d >= 2 => oracle::integrate_mc(integrand, p, cfg),
        support => oracle::integrate(integrand, support, cfg),
    };
    let est = match est {
        Ok(e) => e,
        Err(Error::BudgetExceeded {
            partial,
            abs_error,
            nodes,
        }) => {
            return Err(Error::DivergentNormalizer(format!(
                "Z did not converge within {nodes} nodes (partial {partial}, error {abs_error})"
            )))
        }
        Err(e) => return Err(e),
    };
    if !est.value.is_finite() || est.value <= 0.0 {
        return Err(Error::DivergentNormalizer(format!(
            "Z evaluated to {}",
            est.value
        )));
    }
    Ok(est)
}

/// The alpha-weighted M-mixture of `p` and `q`.
///
/// `alpha` in `{0, 1}` returns the respective endpoint with `Z = 1`. The
/// arithmetic mean always has `Z = 1`. Tagged parametric pairs closed under
/// the mean (Cauchy scale + harmonic, Gaussian + geometric) get the family's
/// closed-form normalizer and a mixture that is itself a tagged family
/// member; everything else normalizes through the oracle.
pub fn m_mixture(
    p: &Density,
    q: &Density,
    mean: &WeightedMean,
    alpha: f64,
    cfg: &OracleCfg,
) -> Result<MMixture> {
    check_pair(p, q)?;
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Domain(format!("alpha={alpha} outside [0, 1]")));
    }
    let mk = |density: Density, z: IntegralEstimate| MMixture {
        base_p: p.clone(),
        base_q: q.clone(),
        mean: mean.clone(),
        alpha,
        z,
        density,
    };

    if alpha == 0.0 {
        return Ok(mk(p.clone(), IntegralEstimate::exact(1.0)));
    }
    if alpha == 1.0 {
        return Ok(mk(q.clone(), IntegralEstimate::exact(1.0)));
    }

    // Closed routes for families that are stable under the mean.
    match (mean, p.family(), q.family()) {
        (
            WeightedMean::Harmonic,
            Some(FamilyTag::CauchyScale { gamma: a }),
            Some(FamilyTag::CauchyScale { gamma: b }),
        ) => {
            let (mixture, z) = cauchy::harmonic_mixture(
                &cauchy::CauchyScale::new(*a)?,
                &cauchy::CauchyScale::new(*b)?,
                alpha,
            )?;
            return Ok(mk(mixture.density(), IntegralEstimate::exact(z)));
        }
        (
            WeightedMean::Geometric,
            Some(FamilyTag::MvnOrdinary { mu: m1, sigma: s1 }),
            Some(FamilyTag::MvnOrdinary { mu: m2, sigma: s2 }),
        ) => {
            let (mixture, z) = mvn::g_mixture(
                &MvnParam::from_tag(m1, s1)?,
                &MvnParam::from_tag(m2, s2)?,
                alpha,
            )?;
            return Ok(mk(mixture.density()?, IntegralEstimate::exact(z)));
        }
        (
            WeightedMean::Arithmetic,
            Some(FamilyTag::Categorical { probs: a }),
            Some(FamilyTag::Categorical { probs: b }),
        ) => {
            let mixed: Vec<f64> = a
                .iter()
                .zip(b)
                .map(|(x, y)| (1.0 - alpha) * x + alpha * y)
                .collect();
            return Ok(mk(Density::categorical(&mixed)?, IntegralEstimate::exact(1.0)));
        }
        _ => {}
    }

    if matches!(mean, WeightedMean::Arithmetic) {
        // Z = 1 exactly; the mixture samples by component choice when both
        // bases are sampleable.
        let (pp, qq) = (p.clone(), q.clone());
        let (pl, ql) = (p.clone(), q.clone());
        let mut density = Density::new(
            p.support().clone(),
            move |x| (1.0 - alpha) * pp.eval(x) + alpha * qq.eval(x),
            move |x| {
                ((1.0 - alpha) * pl.eval(x) + alpha * ql.eval(x))
                    .max(DENSITY_FLOOR)
                    .ln()
            },
        );
        if p.can_sample() && q.can_sample() {
            let (ps, qs) = (p.clone(), q.clone());
            density = density.with_sampler(move |rng| {
                let u: f64 = rand::Rng::random(rng);
                if u < 1.0 - alpha {
                    ps.sample(rng).expect("sampler present")
                } else {
                    qs.sample(rng).expect("sampler present")
                }
            });
        }
        return Ok(mk(density, IntegralEstimate::exact(1.0)));
    }

    // Generic numeric route.
    let z = numeric_mixture_z(p, q, mean, alpha, cfg)?;
    let log_z = z.value.ln();
    let density = match mean {
        WeightedMean::Geometric => {
            // log-domain form keeps the far tails meaningful
            let (pp, qq) = (p.clone(), q.clone());
            Density::from_log(p.support().clone(), move |x| {
                (1.0 - alpha) * pp.log_eval(x).max(LOG_FLOOR)
                    + alpha * qq.log_eval(x).max(LOG_FLOOR)
                    - log_z
            })
        }
        other => {
            let (pp, qq) = (p.clone(), q.clone());
            let m = other.clone();
            Density::from_log(p.support().clone(), move |x| {
                m.evaluate_unchecked(
                    pp.eval(x).max(DENSITY_FLOOR),
                    qq.eval(x).max(DENSITY_FLOOR),
                    alpha,
                )
                .ln()
                    - log_z
            })
        }
    };
    Ok(mk(density, z))
}

// ---------------------------------------------------------------------------
// Symmetrization combinators
// ---------------------------------------------------------------------------

/// Skew M-JS symmetrization of `d`:
/// `(1-alpha) d(p : (pq)_alpha^M) + alpha d(q : (pq)_alpha^M)`.
///
/// With `d = KL` this is the skew M-Jensen-Shannon divergence. Endpoint
/// convention: `alpha = 0` returns 0 and `alpha = 1` returns `d(p : q)`.
pub fn js_symmetrization(
    d: &Divergence,
    mean: &WeightedMean,
    alpha: f64,
    p: &Density,
    q: &Density,
    cfg: &OracleCfg,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Domain(format!("alpha={alpha} outside [0, 1]")));
    }
    if alpha == 0.0 {
        return Ok(0.0);
    }
    if alpha == 1.0 {
        return d.apply(p, q);
    }
    let mixture = m_mixture(p, q, mean, alpha, cfg)?;
    Ok((1.0 - alpha) * d.apply(p, mixture.density())? + alpha * d.apply(q, mixture.density())?)
}

/// Fully numeric skew M-JSD (`d = KL` through the oracle, `Z` through the
/// oracle) with a propagated error estimate, the independent side of the
/// closed-form-vs-oracle checks.
///
/// Decomposes `KL(p : (pq)_alpha^M) = E_p[log p - log M_alpha(p,q)] + log Z`
/// so the normalizer's uncertainty enters once; the reported `abs_error`
/// combines the three sub-estimates (linearly for quadrature, in quadrature
/// for Monte Carlo, whose three streams use distinct sub-seeds).
pub fn oracle_m_jsd(
    p: &Density,
    q: &Density,
    mean: &WeightedMean,
    alpha: f64,
    cfg: &OracleCfg,
) -> Result<IntegralEstimate> {
    check_pair(p, q)?;
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha={alpha} outside (0, 1)")));
    }
    let mc = matches!(p.support(), Support::RealLine(d) if *d >= 2);
    let cfg_z = cfg.with_seed(cfg.seed.wrapping_mul(3).wrapping_add(1));
    let cfg_p = cfg.with_seed(cfg.seed.wrapping_mul(3).wrapping_add(2));
    let cfg_q = cfg.with_seed(cfg.seed.wrapping_mul(3).wrapping_add(3));

    let z = numeric_mixture_z(p, q, mean, alpha, &cfg_z)?;
    let log_mean = |x: &[f64]| {
        mean.evaluate_unchecked(
            p.eval(x).max(DENSITY_FLOOR),
            q.eval(x).max(DENSITY_FLOOR),
            alpha,
        )
        .ln()
    };
    let term_p = oracle::expectation(p, |x| p.log_eval(x).max(LOG_FLOOR) - log_mean(x), &cfg_p)?;
    let term_q = oracle::expectation(q, |x| q.log_eval(x).max(LOG_FLOOR) - log_mean(x), &cfg_q)?;

    let value = (1.0 - alpha) * term_p.value + alpha * term_q.value + z.value.ln();
    let z_rel = z.abs_error / z.value;
    let abs_error = if mc {
        (((1.0 - alpha) * term_p.abs_error).powi(2)
            + (alpha * term_q.abs_error).powi(2)
            + z_rel.powi(2))
        .sqrt()
    } else {
        (1.0 - alpha) * term_p.abs_error + alpha * term_q.abs_error + z_rel
    };
    Ok(IntegralEstimate {
        value,
        abs_error,
        nodes_used: z.nodes_used + term_p.nodes_used + term_q.nodes_used,
    })
}

/// Combines two nonnegative extended reals with a weighted mean, under the
/// limit conventions the Jeffreys symmetrizations need: a zero argument
/// yields 0 for the harmonic and geometric means (the resistor average of a
/// vanishing KL vanishes), and infinities propagate through the natural
/// formula semantics.
fn combine_nonneg(mean: &WeightedMean, a: f64, b: f64, beta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::Domain(format!("beta={beta} outside [0, 1]")));
    }
    if a < 0.0 || b < 0.0 {
        return Err(Error::Domain(format!(
            "mean combination needs nonnegative arguments, got ({a}, {b})"
        )));
    }
    let w = 1.0 - beta;
    Ok(match mean {
        WeightedMean::Arithmetic => w * a + beta * b,
        WeightedMean::Harmonic => {
            if a == 0.0 || b == 0.0 {
                0.0
            } else {
                1.0 / (w / a + beta / b)
            }
        }
        WeightedMean::Geometric => {
            if a == 0.0 || b == 0.0 {
                0.0
            } else {
                (w * a.ln() + beta * b.ln()).exp()
            }
        }
        WeightedMean::Power(p) => {
            if (a == 0.0 || b == 0.0) && *p < 0.0 {
                0.0
            } else {
                (w * a.powf(*p) + beta * b.powf(*p)).powf(1.0 / p)
            }
        }
        qa @ WeightedMean::QuasiArithmetic { .. } => qa.evaluate(a, b, beta)?,
    })
}

/// Skew N-Jeffreys symmetrization `N_beta(d(p : q), d(q : p))`.
///
/// The harmonic instance at `beta = 1/2` is the resistor average distance
/// `R = 2 KL KL* / (KL + KL*)`.
pub fn n_jeffreys(
    d: &Divergence,
    mean_n: &WeightedMean,
    beta: f64,
    p: &Density,
    q: &Density,
) -> Result<f64> {
    let fwd = d.apply(p, q)?;
    let rev = d.apply(q, p)?;
    combine_nonneg(mean_n, fwd, rev, beta)
}

/// Skew (M,N)-JS divergence
/// `N_beta(d(p : (pq)_alpha^M), d(q : (pq)_alpha^M))`.
///
/// With `N` arithmetic and `beta = alpha` this is [`js_symmetrization`].
pub fn mn_js(
    d: &Divergence,
    mean_m: &WeightedMean,
    alpha: f64,
    mean_n: &WeightedMean,
    beta: f64,
    p: &Density,
    q: &Density,
    cfg: &OracleCfg,
) -> Result<f64> {
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha={alpha} outside (0, 1)")));
    }
    let mixture = m_mixture(p, q, mean_m, alpha, cfg)?;
    let fwd = d.apply(p, mixture.density())?;
    let rev = d.apply(q, mixture.density())?;
    combine_nonneg(mean_n, fwd, rev, beta)
}

/// Skew K-divergence `K_alpha(p : q) = KL(p : (1-alpha) p + alpha q)` for
/// `alpha` in `(0, 1]`; `K_1 = KL`.
pub fn k_divergence(p: &Density, q: &Density, alpha: f64, cfg: &OracleCfg) -> Result<f64> {
    if !(0.0 < alpha && alpha <= 1.0) {
        return Err(Error::Domain(format!("alpha={alpha} outside (0, 1]")));
    }
    if alpha == 1.0 {
        return kl(p, q, cfg);
    }
    let mixture = m_mixture(p, q, &WeightedMean::Arithmetic, alpha, cfg)?;
    kl(p, mixture.density(), cfg)
}

/// Generalized K-divergence `K^(M_alpha)_D(p : q) = D(p : (pq)_alpha^M)`,
/// a one-line alias kept for completeness.
pub fn k_divergence_generalized(
    d: &Divergence,
    mean: &WeightedMean,
    alpha: f64,
    p: &Density,
    q: &Density,
    cfg: &OracleCfg,
) -> Result<f64> {
    let mixture = m_mixture(p, q, mean, alpha, cfg)?;
    d.apply(p, mixture.density())
}

// ---------------------------------------------------------------------------
// Bhattacharyya, Hellinger, alpha-divergence, bound
// ---------------------------------------------------------------------------

/// Skew Bhattacharyya distance `B_alpha(p : q) = -log integral p^(1-alpha)
/// q^alpha dmu`. Setting `reverse_convention` swaps the exponents, the other
/// convention in the literature (`B_alpha(q : p)`).
pub fn bhattacharyya(
    p: &Density,
    q: &Density,
    alpha: f64,
    reverse_convention: bool,
    cfg: &OracleCfg,
) -> Result<f64> {
    check_pair(p, q)?;
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha={alpha} outside (0, 1)")));
    }
    let alpha = if reverse_convention { 1.0 - alpha } else { alpha };
    let integrand = |x: &[f64]| {
        ((1.0 - alpha) * p.log_eval(x).max(LOG_FLOOR) + alpha * q.log_eval(x).max(LOG_FLOOR)).exp()
    };
    let est = match p.support() {
        Support::RealLine(d) if *d >= 2 => oracle::integrate_mc(integrand, p, cfg)?,
        support => oracle::integrate(integrand, support, cfg)?,
    };
    if !(est.value > 0.0) {
        return Err(Error::Degenerate(format!(
            "Bhattacharyya coefficient evaluated to {}",
            est.value
        )));
    }
    Ok(-est.value.ln())
}

/// Hellinger distance `sqrt(integral (A(p,q) - G(p,q)) dmu)
/// = sqrt(1 - integral sqrt(p q) dmu)`, realized as the mean-difference
/// integral.
pub fn hellinger(p: &Density, q: &Density, cfg: &OracleCfg) -> Result<f64> {
    check_pair(p, q)?;
    let integrand = |x: &[f64]| {
        let pv = p.eval(x).max(DENSITY_FLOOR);
        let qv = q.eval(x).max(DENSITY_FLOOR);
        0.5 * (pv + qv) - (pv * qv).sqrt()
    };
    let est = match p.support() {
        Support::RealLine(d) if *d >= 2 => oracle::integrate_mc(integrand, p, cfg)?,
        support => oracle::integrate(integrand, support, cfg)?,
    };
    Ok(est.value.max(0.0).sqrt())
}

/// Alpha-divergence `I_alpha(p : q) = integral (alpha p + (1-alpha) q
/// - p^alpha q^(1-alpha)) dmu`, the integrated gap between the arithmetic
/// and geometric means `A_alpha(q : p) - G_alpha(q : p)`.
pub fn alpha_divergence(p: &Density, q: &Density, alpha: f64, cfg: &OracleCfg) -> Result<f64> {
    check_pair(p, q)?;
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha={alpha} outside (0, 1)")));
    }
    let integrand = |x: &[f64]| {
        let pv = p.eval(x).max(DENSITY_FLOOR);
        let qv = q.eval(x).max(DENSITY_FLOOR);
        let lp = p.log_eval(x).max(LOG_FLOOR);
        let lq = q.log_eval(x).max(LOG_FLOOR);
        alpha * pv + (1.0 - alpha) * qv - (alpha * lp + (1.0 - alpha) * lq).exp()
    };
    let est = match p.support() {
        Support::RealLine(d) if *d >= 2 => oracle::integrate_mc(integrand, p, cfg)?,
        support => oracle::integrate(integrand, support, cfg)?,
    };
    Ok(est.value)
}

/// Upper bound `log(Z_alpha^M / (1 - alpha))` on the skew M-JSD, valid when
/// `M` dominates the arithmetic mean; the dominance precondition is checked
/// on the default sampling grid and violations are reported as errors.
///
/// For the arithmetic mean itself this is `-log(1 - alpha)` (`log 2` at
/// `alpha = 1/2`), the classical JSD bound.
pub fn m_jsd_upper_bound(
    mean: &WeightedMean,
    alpha: f64,
    p: &Density,
    q: &Density,
    cfg: &OracleCfg,
) -> Result<f64> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::Domain(format!("alpha={alpha} outside [0, 1)")));
    }
    if let Some((x, y, a)) = mean.dominance_violation(&WeightedMean::Arithmetic, &MeanGrid::default_grid())? {
        return Err(Error::DominanceViolation { x, y, alpha: a });
    }
    if matches!(mean, WeightedMean::Arithmetic) {
        return Ok(-(1.0 - alpha).ln());
    }
    let z = numeric_mixture_z(p, q, mean, alpha, cfg)?;
    Ok((z.value / (1.0 - alpha)).ln())
}

#[cfg(test)]
mod tests;
