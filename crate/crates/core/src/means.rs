//! Abstract weighted bivariate means.
//!
//! A weighted mean `M_alpha(x, y)` interpolates between `x` (at `alpha = 0`)
//! and `y` (at `alpha = 1`) while staying inside `[min(x,y), max(x,y)]`
//! (in-betweenness). The arithmetic, geometric and harmonic means are the
//! classical instances; power means and quasi-arithmetic means
//! `h^{-1}((1-alpha) h(x) + alpha h(y))` unify them.
//!
//! Means are defined on positive reals only. Callers that integrate over
//! densities clamp zero density values to a floor before evaluating a mean
//! (see the oracle module).

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Threshold below which a power mean exponent is routed to the geometric
/// mean, its limit as `p -> 0`.
pub const POWER_GEOMETRIC_CUTOFF: f64 = 1e-6;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A closed family of bivariate weighted means, evaluable at any skew
/// `alpha` in `[0, 1]`.
#[derive(Clone)]
pub enum WeightedMean {
    /// `A_alpha(x,y) = (1-alpha) x + alpha y`
    Arithmetic,
    /// `G_alpha(x,y) = x^(1-alpha) y^alpha`
    Geometric,
    /// `H_alpha(x,y) = x y / ((1-alpha) y + alpha x)`
    Harmonic,
    /// `P_alpha^p(x,y) = ((1-alpha) x^p + alpha y^p)^(1/p)`, `p != 0`.
    ///
    /// Exponents with `|p| < POWER_GEOMETRIC_CUTOFF` are evaluated as the
    /// geometric mean to step over the removable singularity at `p = 0`.
    Power(f64),
    /// `M_alpha^h(x,y) = h^{-1}((1-alpha) h(x) + alpha h(y))` for a strictly
    /// monotone continuous generator `h`.
    ///
    /// The inverse is supplied explicitly rather than computed numerically,
    /// so that inversion failures for user generators cannot pass silently.
    QuasiArithmetic { h: ScalarFn, h_inv: ScalarFn },
}

impl fmt::Debug for WeightedMean {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl WeightedMean {
    /// Builds a quasi-arithmetic mean from a generator and its inverse.
    pub fn quasi_arithmetic(
        h: impl Fn(f64) -> f64 + Send + Sync + 'static,
        h_inv: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        WeightedMean::QuasiArithmetic {
            h: Arc::new(h),
            h_inv: Arc::new(h_inv),
        }
    }

    pub fn name(&self) -> String {
        match self {
            WeightedMean::Arithmetic => "arithmetic".into(),
            WeightedMean::Geometric => "geometric".into(),
            WeightedMean::Harmonic => "harmonic".into(),
            WeightedMean::Power(p) => format!("power:{p}"),
            WeightedMean::QuasiArithmetic { .. } => "quasi-arithmetic".into(),
        }
    }

    /// Parses a mean name as used by the CLI: `arithmetic`, `geometric`,
    /// `harmonic` (or their initials), and `power:<p>`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        match s.as_str() {
            "arithmetic" | "a" => return Ok(WeightedMean::Arithmetic),
            "geometric" | "g" => return Ok(WeightedMean::Geometric),
            "harmonic" | "h" => return Ok(WeightedMean::Harmonic),
            _ => {}
        }
        if let Some(p) = s.strip_prefix("power:") {
            let p: f64 = p
                .parse()
                .map_err(|_| Error::Domain(format!("invalid power mean exponent {p:?}")))?;
            if p == 0.0 {
                return Err(Error::Domain("power mean exponent must be nonzero".into()));
            }
            return Ok(WeightedMean::Power(p));
        }
        Err(Error::Domain(format!("unknown mean {s:?}")))
    }

    /// Evaluates `M_alpha(x, y)` for positive `x`, `y` and `alpha` in `[0,1]`.
    pub fn evaluate(&self, x: f64, y: f64, alpha: f64) -> Result<f64> {
        if !(x > 0.0) || !(y > 0.0) {
            return Err(Error::Domain(format!(
                "mean arguments must be positive (got x={x}, y={y})"
            )));
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::Domain(format!("alpha={alpha} outside [0, 1]")));
        }
        Ok(self.evaluate_unchecked(x, y, alpha))
    }

    /// Evaluates without validating inputs. Integration hot paths use this
    /// after clamping density values to a positive floor.
    pub fn evaluate_unchecked(&self, x: f64, y: f64, alpha: f64) -> f64 {
        // Exact endpoints: M_0 = x and M_1 = y hold to the bit.
        if alpha == 0.0 {
            return x;
        }
        if alpha == 1.0 {
            return y;
        }
        let w = 1.0 - alpha;
        match self {
            WeightedMean::Arithmetic => w * x + alpha * y,
            WeightedMean::Geometric => geometric(x, y, alpha),
            WeightedMean::Harmonic => (x * y) / (w * y + alpha * x),
            WeightedMean::Power(p) => {
                if p.abs() < POWER_GEOMETRIC_CUTOFF {
                    geometric(x, y, alpha)
                } else {
                    (w * x.powf(*p) + alpha * y.powf(*p)).powf(1.0 / p)
                }
            }
            WeightedMean::QuasiArithmetic { h, h_inv } => h_inv(w * h(x) + alpha * h(y)),
        }
    }

    /// Sampled dominance test: true iff `self >= other - 1e-12` at every
    /// grid point. A necessary check, not a proof.
    pub fn dominates(&self, other: &WeightedMean, grid: &MeanGrid) -> Result<bool> {
        for &(x, y, alpha) in &grid.points {
            let a = self.evaluate(x, y, alpha)?;
            let b = other.evaluate(x, y, alpha)?;
            if a < b - 1e-12 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Like [`dominates`](Self::dominates) but reports the first violating
    /// grid point, for error messages.
    pub fn dominance_violation(
        &self,
        other: &WeightedMean,
        grid: &MeanGrid,
    ) -> Result<Option<(f64, f64, f64)>> {
        for &(x, y, alpha) in &grid.points {
            let a = self.evaluate(x, y, alpha)?;
            let b = other.evaluate(x, y, alpha)?;
            if a < b - 1e-12 {
                return Ok(Some((x, y, alpha)));
            }
        }
        Ok(None)
    }
}

fn geometric(x: f64, y: f64, alpha: f64) -> f64 {
    ((1.0 - alpha) * x.ln() + alpha * y.ln()).exp()
}

/// A finite positive lattice of `(x, y, alpha)` triples used by the sampled
/// dominance test.
#[derive(Clone, Debug)]
pub struct MeanGrid {
    pub points: Vec<(f64, f64, f64)>,
}

impl MeanGrid {
    pub fn from_points(points: Vec<(f64, f64, f64)>) -> Self {
        MeanGrid { points }
    }

    /// Log-spaced arguments over `[1e-3, 1e3]` crossed with eleven skews.
    pub fn default_grid() -> Self {
        let args: Vec<f64> = (-3..=3).map(|e| 10f64.powi(e)).collect();
        let mut points = Vec::new();
        for &x in &args {
            for &y in &args {
                for k in 0..=10 {
                    points.push((x, y, k as f64 / 10.0));
                }
            }
        }
        MeanGrid { points }
    }
}

impl Default for MeanGrid {
    fn default() -> Self {
        Self::default_grid()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn harmonic_midpoint() {
        let h = WeightedMean::Harmonic.evaluate(0.1, 0.5, 0.5).unwrap();
        close(h, 1.0 / 6.0, 1e-15);
    }

    #[test]
    fn geometric_midpoint() {
        let g = WeightedMean::Geometric.evaluate(4.0, 1.0, 0.5).unwrap();
        close(g, 2.0, 1e-12);
    }

    #[test]
    fn power_mean_quarter_skew() {
        // P^2_{1/4}(1, 3) = sqrt(0.75 + 0.25 * 9) = sqrt(3), cross-checked
        // against the quasi-arithmetic form with h(u) = u^2.
        let p = WeightedMean::Power(2.0).evaluate(1.0, 3.0, 0.25).unwrap();
        close(p, 3f64.sqrt(), 1e-12);
        let qa = WeightedMean::quasi_arithmetic(|u| u * u, |v| v.sqrt());
        close(p, qa.evaluate(1.0, 3.0, 0.25).unwrap(), 1e-12);
    }

    #[test]
    fn endpoints_are_exact() {
        let means = [
            WeightedMean::Arithmetic,
            WeightedMean::Geometric,
            WeightedMean::Harmonic,
            WeightedMean::Power(3.5),
        ];
        for m in &means {
            assert_eq!(m.evaluate(0.37, 12.5, 0.0).unwrap(), 0.37);
            assert_eq!(m.evaluate(0.37, 12.5, 1.0).unwrap(), 12.5);
        }
    }

    #[test]
    fn power_near_zero_exponent_matches_geometric() {
        for &p in &[1e-6, -1e-6] {
            let pm = WeightedMean::Power(p).evaluate(0.2, 7.0, 0.3).unwrap();
            let g = WeightedMean::Geometric.evaluate(0.2, 7.0, 0.3).unwrap();
            assert!((pm - g).abs() / g <= 1e-5);
        }
    }

    #[test]
    fn quasi_arithmetic_reproduces_geometric_and_harmonic() {
        let qa_g = WeightedMean::quasi_arithmetic(|u| u.ln(), |v| v.exp());
        let qa_h = WeightedMean::quasi_arithmetic(|u| 1.0 / u, |v| 1.0 / v);
        for &(x, y, a) in &[(0.3, 2.0, 0.25), (5.0, 0.01, 0.7), (1.0, 1.0, 0.5)] {
            let g = WeightedMean::Geometric.evaluate(x, y, a).unwrap();
            let h = WeightedMean::Harmonic.evaluate(x, y, a).unwrap();
            assert!((qa_g.evaluate(x, y, a).unwrap() - g).abs() <= 1e-12 * g);
            assert!((qa_h.evaluate(x, y, a).unwrap() - h).abs() <= 1e-12 * h);
        }
    }

    #[test]
    fn agh_dominance_chain() {
        let grid = MeanGrid::default_grid();
        assert!(WeightedMean::Arithmetic
            .dominates(&WeightedMean::Geometric, &grid)
            .unwrap());
        assert!(WeightedMean::Geometric
            .dominates(&WeightedMean::Harmonic, &grid)
            .unwrap());
        assert!(!WeightedMean::Harmonic
            .dominates(&WeightedMean::Arithmetic, &grid)
            .unwrap());
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(WeightedMean::Arithmetic.evaluate(-1.0, 2.0, 0.5).is_err());
        assert!(WeightedMean::Arithmetic.evaluate(1.0, 0.0, 0.5).is_err());
        assert!(WeightedMean::Arithmetic.evaluate(1.0, 2.0, 1.5).is_err());
        assert!(WeightedMean::parse("power:0").is_err());
        assert!(WeightedMean::parse("median").is_err());
    }

    #[test]
    fn parse_roundtrip() {
        assert!(matches!(
            WeightedMean::parse("harmonic").unwrap(),
            WeightedMean::Harmonic
        ));
        assert!(matches!(
            WeightedMean::parse("power:2").unwrap(),
            WeightedMean::Power(p) if p == 2.0
        ));
    }
}
