//! Csiszar f-divergence generators: convex functions on `(0, inf)` with
//! `f(1) = 0`, plus the conjugation and JS-skewing transforms that realize
//! argument swapping and JS-symmetrization at the generator level.

use std::sync::Arc;

use crate::error::{Error, Result};

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A convex generator for `I_f(p : q) = integral p f(q/p) dmu`.
#[derive(Clone)]
pub struct FGenerator {
    name: String,
    f: ScalarFn,
    f_prime: Option<ScalarFn>,
}

impl std::fmt::Debug for FGenerator {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(fm, "FGenerator({})", self.name)
    }
}

impl FGenerator {
    /// Wraps a generator; rejects functions with `f(1) != 0`, since every
    /// f-divergence must vanish on identical arguments.
    pub fn new(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        let g = FGenerator {
            name: name.into(),
            f: Arc::new(f),
            f_prime: None,
        };
        if g.eval(1.0) != 0.0 {
            return Err(Error::Domain(format!(
                "generator {} has f(1) = {} != 0",
                g.name,
                g.eval(1.0)
            )));
        }
        Ok(g)
    }

    /// Attaches the derivative, used only for diagnostics.
    pub fn with_prime(mut self, fp: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.f_prime = Some(Arc::new(fp));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, u: f64) -> f64 {
        (self.f)(u)
    }

    pub fn prime(&self, u: f64) -> Option<f64> {
        self.f_prime.as_ref().map(|fp| fp(u))
    }

    /// Midpoint-convexity spot check on a log-spaced grid; a necessary
    /// condition, not a proof. Violations beyond 1e-12 fail the check.
    pub fn convex_on_grid(&self) -> bool {
        let grid: Vec<f64> = (-30..=30).map(|k| 10f64.powf(k as f64 / 10.0)).collect();
        for &a in &grid {
            for &b in &grid {
                let mid = self.eval(0.5 * (a + b));
                let chord = 0.5 * (self.eval(a) + self.eval(b));
                let scale = chord.abs().max(1.0);
                if mid > chord + 1e-12 * scale {
                    return false;
                }
            }
        }
        true
    }

    /// `f(u) = -log u`, generating the Kullback-Leibler divergence.
    pub fn kl() -> Self {
        FGenerator::new("kl", |u| -u.ln())
            .expect("f(1) = 0")
            .with_prime(|u| -1.0 / u)
    }

    /// `f(u) = u log u`, generating the reverse Kullback-Leibler divergence.
    pub fn reverse_kl() -> Self {
        FGenerator::new("reverse-kl", |u| u * u.ln())
            .expect("f(1) = 0")
            .with_prime(|u| u.ln() + 1.0)
    }

    /// `f_J(u) = (u - 1) log u`, generating the Jeffreys divergence.
    pub fn jeffreys() -> Self {
        FGenerator::new("jeffreys", |u| (u - 1.0) * u.ln())
            .expect("f(1) = 0")
            .with_prime(|u| u.ln() + 1.0 - 1.0 / u)
    }

    /// `f_JS(u) = 1/2 (u log u - (u + 1) log((1 + u) / 2))`, generating the
    /// Jensen-Shannon divergence.
    pub fn jensen_shannon() -> Self {
        FGenerator::new("jensen-shannon", |u| {
            0.5 * (u * u.ln() - (u + 1.0) * (0.5 * (1.0 + u)).ln())
        })
        .expect("f(1) = 0")
    }
}

/// Conjugate generator `f*(u) = u f(1/u)`, which swaps the f-divergence's
/// arguments: `I_{f*}(p : q) = I_f(q : p)`. An involution.
pub fn conjugate_generator(f: &FGenerator) -> FGenerator {
    let inner = f.clone();
    FGenerator {
        name: format!("conjugate({})", f.name),
        f: Arc::new(move |u| u * inner.eval(1.0 / u)),
        f_prime: None,
    }
}

/// JS-skewing transform: the returned generator `g` satisfies
/// `I_g(p : q) = (1-alpha) I_f(p : (pq)_alpha) + alpha I_f(q : (pq)_alpha)`,
/// the skew JS-symmetrization of `I_f` with arithmetic mixtures.
///
/// Concretely `g(u) = (1-alpha) f(alpha u + 1 - alpha)
/// + alpha u f(alpha + (1-alpha)/u)`: the first term substitutes the mixture
/// ratio against `p`, the second is a perspective-style term that rewrites
/// the integral against `q` as one against `p` (hence the extra factor `u`,
/// exactly as in the conjugate generator).
pub fn js_skew_generator(f: &FGenerator, alpha: f64) -> Result<FGenerator> {
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha={alpha} outside (0, 1)")));
    }
    let inner = f.clone();
    Ok(FGenerator {
        name: format!("js-skew({}, {alpha})", f.name),
        f: Arc::new(move |u| {
            (1.0 - alpha) * inner.eval(alpha * u + 1.0 - alpha)
                + alpha * u * inner.eval(alpha + (1.0 - alpha) / u)
        }),
        f_prime: None,
    })
}
