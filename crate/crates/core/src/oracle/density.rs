//! Evaluable probability densities, the common currency of all numeric
//! divergences.

use std::fmt;
use std::sync::Arc;

use rand::RngCore;

use crate::error::{Error, Result};

/// Density values below this floor are clamped before entering log-ratio or
/// mean evaluations (`0 log 0 = 0` convention at support boundaries).
pub const DENSITY_FLOOR: f64 = 1e-300;

/// Where a density lives; fixes the dominating measure (Lebesgue on
/// `R^d`/`(0, inf)`, counting on a finite alphabet).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Support {
    /// Lebesgue measure on `R^dim`.
    RealLine(usize),
    /// Lebesgue measure on `(0, inf)`.
    PositiveHalfLine,
    /// Counting measure on `{0, 1, ..., size-1}`; points are passed to
    /// `eval` as one-element slices `[i as f64]`.
    FiniteAlphabet(usize),
}

impl Support {
    pub fn dim(&self) -> usize {
        match self {
            Support::RealLine(d) => *d,
            Support::PositiveHalfLine => 1,
            Support::FiniteAlphabet(_) => 1,
        }
    }
}

/// Tags densities whose parametric family is known, so that closed-form
/// backends can recognize their inputs. Purely advisory: the numeric oracle
/// ignores tags, and [`Density::untagged`] strips them to force the oracle
/// route in cross-validation tests.
#[derive(Clone, Debug, PartialEq)]
pub enum FamilyTag {
    CauchyScale { gamma: f64 },
    CauchyLocationScale { location: f64, gamma: f64 },
    /// Multivariate Gaussian in the ordinary chart; `sigma` is row-major.
    MvnOrdinary { mu: Vec<f64>, sigma: Vec<f64> },
    Categorical { probs: Vec<f64> },
}

type EvalFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type SampleFn = Arc<dyn Fn(&mut dyn RngCore) -> Vec<f64> + Send + Sync>;

/// An evaluable probability density with a support descriptor.
///
/// Carries pointwise `eval` and `log_eval` (consistent within 1e-12 relative
/// wherever `eval > 1e-250`), an optional sampler used as the Monte Carlo
/// proposal for `dim >= 2` oracle integrals, and an optional family tag.
#[derive(Clone)]
pub struct Density {
    support: Support,
    eval: EvalFn,
    log_eval: EvalFn,
    sampler: Option<SampleFn>,
    family: Option<FamilyTag>,
}

impl fmt::Debug for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Density")
            .field("support", &self.support)
            .field("family", &self.family)
            .field("has_sampler", &self.sampler.is_some())
            .finish()
    }
}

impl Density {
    pub fn new(
        support: Support,
        eval: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        log_eval: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Density {
            support,
            eval: Arc::new(eval),
            log_eval: Arc::new(log_eval),
            sampler: None,
            family: None,
        }
    }

    /// Builds a density from its log; `eval` is `exp(log_eval)`.
    pub fn from_log(
        support: Support,
        log_eval: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        let log_eval = Arc::new(log_eval);
        let le = Arc::clone(&log_eval);
        Density {
            support,
            eval: Arc::new(move |x| le(x).exp()),
            log_eval,
            sampler: None,
            family: None,
        }
    }

    pub fn with_sampler(
        mut self,
        sampler: impl Fn(&mut dyn RngCore) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        self.sampler = Some(Arc::new(sampler));
        self
    }

    pub fn with_family(mut self, tag: FamilyTag) -> Self {
        self.family = Some(tag);
        self
    }

    /// Strips the family tag, forcing downstream code onto the numeric
    /// (oracle) route. Closed-form-vs-oracle tests call this on one side.
    pub fn untagged(mut self) -> Self {
        self.family = None;
        self
    }

    pub fn dim(&self) -> usize {
        self.support.dim()
    }

    pub fn support(&self) -> &Support {
        &self.support
    }

    pub fn family(&self) -> Option<&FamilyTag> {
        self.family.as_ref()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.eval)(x)
    }

    pub fn log_eval(&self, x: &[f64]) -> f64 {
        (self.log_eval)(x)
    }

    /// Scalar convenience for one-dimensional supports.
    pub fn eval1(&self, x: f64) -> f64 {
        (self.eval)(&[x])
    }

    pub fn log_eval1(&self, x: f64) -> f64 {
        (self.log_eval)(&[x])
    }

    pub fn can_sample(&self) -> bool {
        self.sampler.is_some()
    }

    pub fn sample(&self, rng: &mut dyn RngCore) -> Result<Vec<f64>> {
        match &self.sampler {
            Some(s) => Ok(s(rng)),
            None => Err(Error::NoSampler(format!(
                "density on {:?} has no sampler",
                self.support
            ))),
        }
    }

    /// Categorical distribution on a finite alphabet. Probabilities must be
    /// nonnegative and sum to 1 within 1e-9.
    pub fn categorical(probs: &[f64]) -> Result<Density> {
        if probs.is_empty() {
            return Err(Error::Domain("empty categorical distribution".into()));
        }
        if probs.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
            return Err(Error::Domain("categorical mass must be >= 0".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!(
                "categorical mass sums to {total}, expected 1"
            )));
        }
        let n = probs.len();
        let p = probs.to_vec();
        let p_eval = p.clone();
        let p_log = p.clone();
        let p_sample = p.clone();
        let cell = move |x: &[f64]| -> usize {
            let i = x[0].round();
            debug_assert!(i >= 0.0 && (i as usize) < n);
            i as usize
        };
        let cell_log = cell.clone();
        Ok(Density::new(
            Support::FiniteAlphabet(n),
            move |x| p_eval[cell(x)],
            move |x| p_log[cell_log(x)].max(DENSITY_FLOOR).ln(),
        )
        .with_sampler(move |rng| {
            let u: f64 = rand::Rng::random(rng);
            let mut acc = 0.0;
            for (i, &pi) in p_sample.iter().enumerate() {
                acc += pi;
                if u <= acc {
                    return vec![i as f64];
                }
            }
            vec![(n - 1) as f64]
        })
        .with_family(FamilyTag::Categorical { probs: p }))
    }

    /// Uniform density on `[a, b]`, embedded in the real line.
    pub fn uniform(a: f64, b: f64) -> Result<Density> {
        if !(b > a) {
            return Err(Error::Domain(format!("uniform needs a < b, got [{a}, {b}]")));
        }
        let h = 1.0 / (b - a);
        let log_h = h.ln();
        Ok(Density::new(
            Support::RealLine(1),
            move |x| if x[0] >= a && x[0] <= b { h } else { 0.0 },
            move |x| {
                if x[0] >= a && x[0] <= b {
                    log_h
                } else {
                    f64::NEG_INFINITY
                }
            },
        )
        .with_sampler(move |rng| vec![rand::Rng::random_range(rng, a..b)]))
    }
}
