//! Importance-sampled Monte Carlo for multi-dimensional oracle integrals.
//!
//! Estimates `integral f dmu` as the sample mean of `f(x) / p(x)` under a
//! proposal density `p`, reporting the standard error of the mean as the
//! absolute-error figure. Sampling is serial from a counter-seeded ChaCha
//! stream, so results are bit-reproducible given `(seed, sample count)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::oracle::density::{Density, DENSITY_FLOOR};

/// Mean and standard error of `f(x) / proposal(x)` over `n` proposal draws.
pub fn importance_sample(
    f: &dyn Fn(&[f64]) -> f64,
    proposal: &Density,
    n: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::Domain("Monte Carlo sample count must be > 0".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for i in 0..n {
        let x = proposal.sample(&mut rng)?;
        let fx = f(&x);
        let px = proposal.eval(&x).max(DENSITY_FLOOR);
        let w = if fx == 0.0 { 0.0 } else { fx / px };
        if !w.is_finite() {
            return Err(Error::NonFiniteIntegrand { node: x });
        }
        // Welford update keeps the variance accumulation stable.
        let delta = w - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (w - mean);
    }
    let se = if n > 1 {
        (m2 / ((n - 1) as f64 * n as f64)).sqrt()
    } else {
        0.0
    };
    Ok((mean, se))
}

/// Mean and standard error of `f(x)` itself over draws from `p` (plain
/// Monte Carlo expectation, the `d >= 2` backend of `expectation`).
pub fn expectation_sample(
    p: &Density,
    f: &dyn Fn(&[f64]) -> f64,
    n: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::Domain("Monte Carlo sample count must be > 0".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for i in 0..n {
        let x = p.sample(&mut rng)?;
        let fx = f(&x);
        if !fx.is_finite() {
            return Err(Error::NonFiniteIntegrand { node: x });
        }
        let delta = fx - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (fx - mean);
    }
    let se = if n > 1 {
        (m2 / ((n - 1) as f64 * n as f64)).sqrt()
    } else {
        0.0
    };
    Ok((mean, se))
}
