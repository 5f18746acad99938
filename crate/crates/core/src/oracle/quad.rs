//! Adaptive 1D quadrature: 15-point Gauss-Kronrod rule with bisection of the
//! worst interval, QUADPACK-style error rescaling, and variable substitutions
//! that pull improper integrals onto a bounded interval.
//!
//! The whole real line is mapped through `x = t / (1 - t^2)`, `t in (-1, 1)`,
//! whose Jacobian `(1 + t^2) / (1 - t^2)^2` turns `1/x^2` tails (Cauchy) into
//! a bounded transformed integrand. Truncating instead misestimates such
//! normalizers badly. The positive half-line uses `x = t / (1 - t)`.

use std::collections::BinaryHeap;

use crate::error::{Error, Result};

// 15-point Kronrod abscissae (positive half), embedded 7-point Gauss weights,
// and Kronrod weights.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

/// QUADPACK error rescaling: damps the raw `|K15 - G7|` difference using the
/// integral of `|f - mean|` so the estimate is neither naive nor optimistic.
fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

/// One Gauss-Kronrod 15(7) application on `[a, b]`.
///
/// Returns `(kronrod_value, error_estimate)`; propagates a non-finite
/// integrand as an error carrying the offending node.
fn qk15(f: &mut impl FnMut(f64) -> Result<f64>, a: f64, b: f64) -> Result<(f64, f64)> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let f_center = f(center)?;
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];

    let mut res_gauss = f_center * WG[3];
    let mut res_kronrod = f_center * WGK[7];
    let mut res_abs = res_kronrod.abs();

    for j in 0..3 {
        let jtw = j * 2 + 1;
        let dx = half * XGK[jtw];
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        res_gauss += WG[j] * (f1 + f2);
        res_kronrod += WGK[jtw] * (f1 + f2);
        res_abs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    for j in 0..4 {
        let jtw = j * 2;
        let dx = half * XGK[jtw];
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        res_kronrod += WGK[jtw] * (f1 + f2);
        res_abs += WGK[jtw] * (f1.abs() + f2.abs());
    }

    let mean = res_kronrod * 0.5;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let err = (res_kronrod - res_gauss) * half;
    let value = res_kronrod * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    Ok((value, rescale_error(err, res_abs, res_asc)))
}

#[derive(Debug)]
struct Interval {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Interval {}
impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Interval {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err
            .partial_cmp(&other.err)
            .unwrap_or(std::cmp::Ordering::Equal)
    }
}

/// Adaptive quadrature of `f` over `[a, b]`.
///
/// Bisects the interval with the largest error estimate until the summed
/// error drops below `abs_tol` or the node budget is exhausted, in which
/// case the partial estimate travels with the error.
pub fn adaptive(
    f: &mut impl FnMut(f64) -> Result<f64>,
    a: f64,
    b: f64,
    abs_tol: f64,
    max_nodes: usize,
) -> Result<(f64, f64, usize)> {
    let mut nodes = 15usize;
    let (v, e) = qk15(f, a, b)?;
    let mut heap = BinaryHeap::new();
    heap.push(Interval {
        a,
        b,
        value: v,
        err: e,
    });
    let mut total_err = e;

    while total_err > abs_tol {
        if nodes + 30 > max_nodes {
            let value: f64 = heap.iter().map(|iv| iv.value).sum();
            return Err(Error::BudgetExceeded {
                partial: value,
                abs_error: total_err,
                nodes,
            });
        }
        let worst = heap.pop().expect("heap never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval narrowed to machine resolution; keep its estimate.
            total_err -= worst.err;
            let spent = Interval { err: 0.0, ..worst };
            heap.push(spent);
            if heap.iter().all(|iv| iv.err == 0.0) {
                break;
            }
            continue;
        }
        let (lv, le) = qk15(f, worst.a, mid)?;
        let (rv, re) = qk15(f, mid, worst.b)?;
        nodes += 30;
        total_err += le + re - worst.err;
        heap.push(Interval {
            a: worst.a,
            b: mid,
            value: lv,
            err: le,
        });
        heap.push(Interval {
            a: mid,
            b: worst.b,
            value: rv,
            err: re,
        });
    }

    let value: f64 = heap.iter().map(|iv| iv.value).sum();
    let err: f64 = heap.iter().map(|iv| iv.err).sum();
    Ok((value, err, nodes))
}

/// Integrates `f` over the whole real line via `x = t / (1 - t^2)`.
pub fn integrate_real_line(
    f: &dyn Fn(f64) -> f64,
    abs_tol: f64,
    max_nodes: usize,
) -> Result<(f64, f64, usize)> {
    let mut g = |t: f64| -> Result<f64> {
        let s = 1.0 - t * t;
        let x = t / s;
        let fx = f(x);
        if fx == 0.0 {
            return Ok(0.0); // avoid 0 * inf at extreme |t|
        }
        if !fx.is_finite() {
            return Err(Error::NonFiniteIntegrand { node: vec![x] });
        }
        let jac = (1.0 + t * t) / (s * s);
        let v = fx * jac;
        if !v.is_finite() {
            return Err(Error::NonFiniteIntegrand { node: vec![x] });
        }
        Ok(v)
    };
    adaptive(&mut g, -1.0, 1.0, abs_tol, max_nodes)
}

/// Integrates `f` over `(0, inf)` via `x = t / (1 - t)`.
pub fn integrate_half_line(
    f: &dyn Fn(f64) -> f64,
    abs_tol: f64,
    max_nodes: usize,
) -> Result<(f64, f64, usize)> {
    let mut g = |t: f64| -> Result<f64> {
        let s = 1.0 - t;
        let x = t / s;
        let fx = f(x);
        if fx == 0.0 {
            return Ok(0.0);
        }
        if !fx.is_finite() {
            return Err(Error::NonFiniteIntegrand { node: vec![x] });
        }
        let v = fx / (s * s);
        if !v.is_finite() {
            return Err(Error::NonFiniteIntegrand { node: vec![x] });
        }
        Ok(v)
    };
    adaptive(&mut g, 0.0, 1.0, abs_tol, max_nodes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_on_finite_interval() {
        let mut f = |x: f64| Ok(3.0 * x * x);
        let (v, e, _) = adaptive(&mut f, 0.0, 2.0, 1e-12, 10_000).unwrap();
        assert!((v - 8.0).abs() <= 1e-12, "value {v}, err {e}");
    }

    #[test]
    fn standard_cauchy_normalizes() {
        let f = |x: f64| 1.0 / (PI * (1.0 + x * x));
        let (v, _, _) = integrate_real_line(&f, 1e-10, 200_000).unwrap();
        assert!((v - 1.0).abs() <= 1e-9, "got {v}");
    }

    #[test]
    fn gaussian_normalizes_on_half_line() {
        // integral of exp(-x) over (0, inf) = 1
        let f = |x: f64| (-x).exp();
        let (v, _, _) = integrate_half_line(&f, 1e-10, 200_000).unwrap();
        assert!((v - 1.0).abs() <= 1e-10, "got {v}");
    }

    #[test]
    fn budget_exhaustion_carries_partial() {
        // 45 nodes cannot push the Cauchy normalizer down to 1e-14.
        let f = |x: f64| 1.0 / (PI * (1.0 + x * x));
        match integrate_real_line(&f, 1e-14, 45) {
            Err(Error::BudgetExceeded { partial, nodes, .. }) => {
                assert!((partial - 1.0).abs() < 0.1);
                assert!(nodes <= 45);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn non_finite_integrand_reports_node() {
        let f = |x: f64| if x.abs() < 0.3 { f64::NAN } else { 0.0 };
        match integrate_real_line(&f, 1e-10, 1_000) {
            Err(Error::NonFiniteIntegrand { node }) => assert!(node[0].abs() < 0.3),
            other => panic!("expected non-finite error, got {other:?}"),
        }
    }
}
