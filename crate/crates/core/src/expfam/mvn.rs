//! Multivariate Gaussian coordinate machinery.
//!
//! A `d`-dimensional Gaussian carries three equivalent composite
//! (vector, matrix) parameterizations:
//!
//! - ordinary `lambda = (mu, Sigma)`,
//! - natural `theta = (Sigma^-1 mu, Sigma^-1 / 2)`,
//! - expectation `eta = (mu, -Sigma - mu mu^T) = grad F(theta)`.
//!
//! Conversions are closed-form and lossless; the log-normalizer has a
//! chart-native formula in each coordinate system and all three agree. All
//! linear algebra goes through Cholesky factorizations, with determinants in
//! log space so nothing overflows for the dimensions this crate targets.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand_distr::{Distribution, StandardNormal};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::oracle::{Density, FamilyTag, Support};

const LN_2PI: f64 = 1.8378770664093453; // ln(2 pi)
const CHOLESKY_PIVOT_FLOOR: f64 = 1e-12;
const ASYMMETRY_GATE: f64 = 1e-8;

/// The three coordinate charts of the Gaussian family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Chart {
    Ordinary,
    Natural,
    Expectation,
}

/// A multivariate Gaussian in one of its three charts.
#[derive(Clone, Debug, PartialEq)]
pub enum MvnParam {
    Ordinary {
        mu: DVector<f64>,
        sigma: DMatrix<f64>,
    },
    Natural {
        theta_v: DVector<f64>,
        theta_m: DMatrix<f64>,
    },
    Expectation {
        eta_v: DVector<f64>,
        eta_m: DMatrix<f64>,
    },
}

/// Symmetrizes after gating the asymmetry, which in practice comes from
/// noisy CSV/JSON input.
fn ingest_symmetric(m: DMatrix<f64>, what: &str) -> Result<DMatrix<f64>> {
    if !m.is_square() {
        return Err(Error::Domain(format!("{what} must be square")));
    }
    let scale = m.amax().max(1.0);
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    if worst > ASYMMETRY_GATE * scale {
        return Err(Error::NotPositiveDefinite(format!(
            "{what} asymmetry {worst:.3e} exceeds the {ASYMMETRY_GATE:.0e} gate"
        )));
    }
    Ok(symmetrize(m))
}

fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    let mt = m.transpose();
    (m + mt) * 0.5
}

/// Cholesky with a pivot floor; the factorization both validates positive
/// definiteness and backs every solve/determinant below.
fn spd_cholesky(m: &DMatrix<f64>, what: &str) -> Result<Cholesky<f64, Dyn>> {
    let chol = Cholesky::new(m.clone())
        .ok_or_else(|| Error::NotPositiveDefinite(format!("{what}: Cholesky failed")))?;
    let min_pivot = chol
        .l_dirty()
        .diagonal()
        .iter()
        .fold(f64::INFINITY, |a, &b| a.min(b * b));
    if !(min_pivot > CHOLESKY_PIVOT_FLOOR) {
        return Err(Error::NotPositiveDefinite(format!(
            "{what}: pivot {min_pivot:.3e} below floor"
        )));
    }
    Ok(chol)
}

fn log_det(chol: &Cholesky<f64, Dyn>) -> f64 {
    2.0 * chol.l_dirty().diagonal().iter().map(|v| v.ln()).sum::<f64>()
}

fn vec_to_dvector(v: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(v)
}

fn rows_to_dmatrix(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::Domain("matrix rows must form a square".into()));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

impl MvnParam {
    /// Ordinary chart `(mu, Sigma)` with `Sigma` symmetric positive-definite.
    pub fn ordinary(mu: Vec<f64>, sigma: Vec<Vec<f64>>) -> Result<Self> {
        let mu = vec_to_dvector(&mu);
        let sigma = ingest_symmetric(rows_to_dmatrix(&sigma)?, "Sigma")?;
        if sigma.nrows() != mu.len() {
            return Err(Error::Domain("mu and Sigma dimensions differ".into()));
        }
        spd_cholesky(&sigma, "Sigma")?;
        Ok(MvnParam::Ordinary { mu, sigma })
    }

    /// Natural chart `(theta_v, theta_M)` with `theta_M` positive-definite.
    pub fn natural(theta_v: Vec<f64>, theta_m: Vec<Vec<f64>>) -> Result<Self> {
        let theta_v = vec_to_dvector(&theta_v);
        let theta_m = ingest_symmetric(rows_to_dmatrix(&theta_m)?, "theta_M")?;
        if theta_m.nrows() != theta_v.len() {
            return Err(Error::Domain("theta_v and theta_M dimensions differ".into()));
        }
        spd_cholesky(&theta_m, "theta_M")?;
        Ok(MvnParam::Natural { theta_v, theta_m })
    }

    /// Expectation chart `(eta_v, eta_M)` with `-(eta_M + eta_v eta_v^T)`
    /// positive-definite.
    pub fn expectation(eta_v: Vec<f64>, eta_m: Vec<Vec<f64>>) -> Result<Self> {
        let eta_v = vec_to_dvector(&eta_v);
        let eta_m = ingest_symmetric(rows_to_dmatrix(&eta_m)?, "eta_M")?;
        if eta_m.nrows() != eta_v.len() {
            return Err(Error::Domain("eta_v and eta_M dimensions differ".into()));
        }
        let sigma = -(&eta_m + &eta_v * eta_v.transpose());
        spd_cholesky(&sigma, "-(eta_M + eta_v eta_v^T)")?;
        Ok(MvnParam::Expectation { eta_v, eta_m })
    }

    pub fn dim(&self) -> usize {
        match self {
            MvnParam::Ordinary { mu, .. } => mu.len(),
            MvnParam::Natural { theta_v, .. } => theta_v.len(),
            MvnParam::Expectation { eta_v, .. } => eta_v.len(),
        }
    }

    pub fn chart(&self) -> Chart {
        match self {
            MvnParam::Ordinary { .. } => Chart::Ordinary,
            MvnParam::Natural { .. } => Chart::Natural,
            MvnParam::Expectation { .. } => Chart::Expectation,
        }
    }

    /// The chart's `(vector, matrix)` pair.
    pub fn parts(&self) -> (&DVector<f64>, &DMatrix<f64>) {
        match self {
            MvnParam::Ordinary { mu, sigma } => (mu, sigma),
            MvnParam::Natural { theta_v, theta_m } => (theta_v, theta_m),
            MvnParam::Expectation { eta_v, eta_m } => (eta_v, eta_m),
        }
    }

    /// Lossless conversion into a target chart.
    pub fn convert(&self, target: Chart) -> Result<MvnParam> {
        if self.chart() == target {
            return Ok(self.clone());
        }
        // Hop through the ordinary chart; each leg is one of the closed
        // conversion formulas.
        let ordinary = match self {
            MvnParam::Ordinary { .. } => self.clone(),
            MvnParam::Natural { theta_v, theta_m } => {
                // Sigma = theta_M^-1 / 2, mu = theta_M^-1 theta_v / 2
                let chol = spd_cholesky(theta_m, "theta_M")?;
                let sigma = symmetrize(chol.inverse() * 0.5);
                let mu = chol.solve(theta_v) * 0.5;
                MvnParam::Ordinary { mu, sigma }
            }
            MvnParam::Expectation { eta_v, eta_m } => {
                // mu = eta_v, Sigma = -eta_M - eta_v eta_v^T
                let sigma = symmetrize(-(eta_m + eta_v * eta_v.transpose()));
                spd_cholesky(&sigma, "Sigma(eta)")?;
                MvnParam::Ordinary {
                    mu: eta_v.clone(),
                    sigma,
                }
            }
        };
        let (mu, sigma) = match &ordinary {
            MvnParam::Ordinary { mu, sigma } => (mu, sigma),
            _ => unreachable!(),
        };
        Ok(match target {
            Chart::Ordinary => ordinary.clone(),
            Chart::Natural => {
                // theta_v = Sigma^-1 mu, theta_M = Sigma^-1 / 2
                let chol = spd_cholesky(sigma, "Sigma")?;
                MvnParam::Natural {
                    theta_v: chol.solve(mu),
                    theta_m: symmetrize(chol.inverse() * 0.5),
                }
            }
            Chart::Expectation => MvnParam::Expectation {
                eta_v: mu.clone(),
                eta_m: symmetrize(-(sigma + mu * mu.transpose())),
            },
        })
    }

    pub fn to_ordinary(&self) -> Result<MvnParam> {
        self.convert(Chart::Ordinary)
    }

    pub fn to_natural(&self) -> Result<MvnParam> {
        self.convert(Chart::Natural)
    }

    pub fn to_expectation(&self) -> Result<MvnParam> {
        self.convert(Chart::Expectation)
    }

    /// Log-normalizer `F`, evaluated with the formula native to the chart
    /// this parameter lives in. All three formulas agree on the same point.
    pub fn log_normalizer(&self) -> Result<f64> {
        match self {
            MvnParam::Ordinary { mu, sigma } => {
                let chol = spd_cholesky(sigma, "Sigma")?;
                let quad = mu.dot(&chol.solve(mu));
                let d = mu.len() as f64;
                Ok(0.5 * (quad + log_det(&chol) + d * LN_2PI))
            }
            MvnParam::Natural { theta_v, theta_m } => {
                let chol = spd_cholesky(theta_m, "theta_M")?;
                let quad = theta_v.dot(&chol.solve(theta_v));
                let d = theta_v.len() as f64;
                Ok(0.5 * (d * std::f64::consts::PI.ln() - log_det(&chol) + 0.5 * quad))
            }
            MvnParam::Expectation { eta_v, eta_m } => {
                let sigma = symmetrize(-(eta_m + eta_v * eta_v.transpose()));
                let chol = spd_cholesky(&sigma, "Sigma(eta)")?;
                let quad = eta_v.dot(&chol.solve(eta_v));
                let d = eta_v.len() as f64;
                Ok(0.5 * (quad + log_det(&chol) + d * LN_2PI))
            }
        }
    }

    /// Flattened natural parameter `[theta_v, theta_M row-major]`, the layout
    /// the generic exponential-family engine works on. The compound inner
    /// product `theta_v . theta_v' + tr(theta_M'^T theta_M)` is exactly the
    /// Euclidean dot product of these flat vectors.
    pub fn flat_natural(&self) -> Result<Vec<f64>> {
        let natural = self.to_natural()?;
        let (v, m) = natural.parts();
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

    /// Rebuilds a natural-chart parameter from the flat layout. The matrix
    /// block is symmetrized silently (finite-difference probes perturb one
    /// entry at a time); positive definiteness is still enforced.
    pub fn from_flat_natural(dim: usize, flat: &[f64]) -> Result<MvnParam> {
        if flat.len() != dim + dim * dim {
            return Err(Error::Domain(format!(
                "flat natural parameter must have length {} for d={dim}, got {}",
                dim + dim * dim,
                flat.len()
            )));
        }
        let theta_v = DVector::from_column_slice(&flat[..dim]);
        let theta_m = symmetrize(DMatrix::from_fn(dim, dim, |i, j| flat[dim + i * dim + j]));
        spd_cholesky(&theta_m, "theta_M")?;
        Ok(MvnParam::Natural { theta_v, theta_m })
    }

    /// True iff the flat natural parameter lies in the family's domain
    /// (`theta_M` symmetric positive-definite up to the pivot floor).
    pub fn flat_natural_in_domain(dim: usize, flat: &[f64]) -> bool {
        MvnParam::from_flat_natural(dim, flat).is_ok()
    }

    /// The evaluable Gaussian density (tagged, with a sampler).
    pub fn density(&self) -> Result<Density> {
        let ordinary = self.to_ordinary()?;
        let (mu, sigma) = ordinary.parts();
        let d = mu.len();
        let chol = spd_cholesky(sigma, "Sigma")?;
        let log_const = -0.5 * (d as f64 * LN_2PI + log_det(&chol));
        let l = chol.l();
        let mu_s = mu.clone();
        let mu_e = mu.clone();
        let l_sample = l.clone();
        let log_pdf = move |x: &[f64]| {
            let diff = DVector::from_column_slice(x) - &mu_e;
            let z = l
                .solve_lower_triangular(&diff)
                .expect("Cholesky factor is invertible");
            log_const - 0.5 * z.dot(&z)
        };
        let log_pdf_eval = log_pdf.clone();
        let tag = FamilyTag::MvnOrdinary {
            mu: mu.iter().copied().collect(),
            sigma: sigma.iter().copied().collect(),
        };
        Ok(Density::new(
            Support::RealLine(d),
            move |x| log_pdf_eval(x).exp(),
            log_pdf,
        )
        .with_sampler(move |rng| {
            let z = DVector::from_fn(d, |_, _| StandardNormal.sample(rng));
            (&mu_s + &l_sample * z).iter().copied().collect()
        })
        .with_family(tag))
    }

    /// Rebuilds a parameter from the density tag layout (row-major Sigma).
    pub fn from_tag(mu: &[f64], sigma_flat: &[f64]) -> Result<MvnParam> {
        let d = mu.len();
        if sigma_flat.len() != d * d {
            return Err(Error::Domain("tag Sigma has wrong length".into()));
        }
        // Density tags store column-major (nalgebra iteration order); Sigma
        // is symmetric so the distinction is moot.
        let sigma = DMatrix::from_fn(d, d, |i, j| sigma_flat[j * d + i]);
        let sigma = symmetrize(sigma);
        spd_cholesky(&sigma, "Sigma")?;
        Ok(MvnParam::Ordinary {
            mu: vec_to_dvector(mu),
            sigma,
        })
    }
}

/// Legendre conjugate `F*` evaluated at an expectation-chart parameter:
/// `F*(eta) = -1/2 (log(1 + eta_v^T eta_M^-1 eta_v) + log|-eta_M| + d (1 + log 2 pi))`.
pub fn fenchel_conjugate(eta: &MvnParam) -> Result<f64> {
    let eta = eta.to_expectation()?;
    let (eta_v, eta_m) = eta.parts();
    let neg_eta_m = -eta_m;
    let chol = spd_cholesky(&neg_eta_m, "-eta_M")?;
    let quad = -eta_v.dot(&chol.solve(eta_v)); // eta_v^T eta_M^-1 eta_v
    let d = eta_v.len() as f64;
    Ok(-0.5 * ((1.0 + quad).ln() + log_det(&chol) + d * (1.0 + LN_2PI)))
}

/// `KL(p1 : p2) = 1/2 (tr(S2^-1 S1) + dmu^T S2^-1 dmu + log(|S2|/|S1|) - d)`.
pub fn kl(p1: &MvnParam, p2: &MvnParam) -> Result<f64> {
    let o1 = p1.to_ordinary()?;
    let o2 = p2.to_ordinary()?;
    let (mu1, sigma1) = o1.parts();
    let (mu2, sigma2) = o2.parts();
    if mu1.len() != mu2.len() {
        return Err(Error::Domain("KL between Gaussians of different dims".into()));
    }
    let d = mu1.len() as f64;
    let chol1 = spd_cholesky(sigma1, "Sigma1")?;
    let chol2 = spd_cholesky(sigma2, "Sigma2")?;
    let trace = chol2.solve(sigma1).trace();
    let diff = mu2 - mu1;
    let maha = diff.dot(&chol2.solve(&diff));
    Ok(0.5 * (trace + maha + log_det(&chol2) - log_det(&chol1) - d))
}

/// Mahalanobis distance `sqrt((x1 - x2)^T Q (x1 - x2))` for `Q` positive-definite.
pub fn mahalanobis(q: &DMatrix<f64>, x1: &[f64], x2: &[f64]) -> Result<f64> {
    if x1.len() != x2.len() || q.nrows() != x1.len() {
        return Err(Error::Domain("Mahalanobis dimension mismatch".into()));
    }
    spd_cholesky(&symmetrize(q.clone()), "Q")?;
    let diff = vec_to_dvector(x1) - vec_to_dvector(x2);
    Ok((q * &diff).dot(&diff).max(0.0).sqrt())
}

/// Parameter of the normalized geometric mixture `(p1 p2)_alpha^G`:
/// `Sigma_alpha = ((1-alpha) S1^-1 + alpha S2^-1)^-1` (matrix harmonic
/// barycenter) and `mu_alpha = Sigma_alpha ((1-alpha) S1^-1 mu1 + alpha S2^-1 mu2)`.
///
/// Identical to interpolating in the natural chart and converting back.
pub fn g_mixture_param(p1: &MvnParam, p2: &MvnParam, alpha: f64) -> Result<MvnParam> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Domain(format!("alpha={alpha} outside [0, 1]")));
    }
    let o1 = p1.to_ordinary()?;
    let o2 = p2.to_ordinary()?;
    let (mu1, sigma1) = o1.parts();
    let (mu2, sigma2) = o2.parts();
    if mu1.len() != mu2.len() {
        return Err(Error::Domain("mixture of Gaussians of different dims".into()));
    }
    let chol1 = spd_cholesky(sigma1, "Sigma1")?;
    let chol2 = spd_cholesky(sigma2, "Sigma2")?;
    let precision = symmetrize(chol1.inverse() * (1.0 - alpha) + chol2.inverse() * alpha);
    let chol_p = spd_cholesky(&precision, "interpolated precision")?;
    let sigma_alpha = symmetrize(chol_p.inverse());
    let rhs = chol1.solve(mu1) * (1.0 - alpha) + chol2.solve(mu2) * alpha;
    let mu_alpha = chol_p.solve(&rhs);
    Ok(MvnParam::Ordinary {
        mu: mu_alpha,
        sigma: sigma_alpha,
    })
}

/// Skew Jensen divergence `J_F^alpha(theta1 : theta2)` of the Gaussian
/// log-normalizer, computed chart-natively.
pub fn jensen_alpha(p1: &MvnParam, p2: &MvnParam, alpha: f64) -> Result<f64> {
    let t1 = p1.to_natural()?;
    let t2 = p2.to_natural()?;
    let (v1, m1) = t1.parts();
    let (v2, m2) = t2.parts();
    let mid = MvnParam::Natural {
        theta_v: v1 * (1.0 - alpha) + v2 * alpha,
        theta_m: symmetrize(m1 * (1.0 - alpha) + m2 * alpha),
    };
    Ok((1.0 - alpha) * t1.log_normalizer()? + alpha * t2.log_normalizer()?
        - mid.log_normalizer()?)
}

/// Normalized geometric mixture with its closed-form normalizer
/// `Z_alpha^G = exp(-J_F^alpha)`.
pub fn g_mixture(p1: &MvnParam, p2: &MvnParam, alpha: f64) -> Result<(MvnParam, f64)> {
    let mixture = g_mixture_param(p1, p2, alpha)?;
    let z = (-jensen_alpha(p1, p2, alpha)?).exp();
    Ok((mixture, z))
}

// --- serde -----------------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(tag = "chart", rename_all = "lowercase")]
enum MvnParamJson {
    Ordinary {
        mu: Vec<f64>,
        sigma: Vec<Vec<f64>>,
    },
    Natural {
        theta_v: Vec<f64>,
        theta_m: Vec<Vec<f64>>,
    },
    Expectation {
        eta_v: Vec<f64>,
        eta_m: Vec<Vec<f64>>,
    },
}

fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

impl Serialize for MvnParam {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let json = match self {
            MvnParam::Ordinary { mu, sigma } => MvnParamJson::Ordinary {
                mu: mu.iter().copied().collect(),
                sigma: matrix_rows(sigma),
            },
            MvnParam::Natural { theta_v, theta_m } => MvnParamJson::Natural {
                theta_v: theta_v.iter().copied().collect(),
                theta_m: matrix_rows(theta_m),
            },
            MvnParam::Expectation { eta_v, eta_m } => MvnParamJson::Expectation {
                eta_v: eta_v.iter().copied().collect(),
                eta_m: matrix_rows(eta_m),
            },
        };
        json.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MvnParam {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let json = MvnParamJson::deserialize(deserializer)?;
        let parsed = match json {
            MvnParamJson::Ordinary { mu, sigma } => MvnParam::ordinary(mu, sigma),
            MvnParamJson::Natural { theta_v, theta_m } => MvnParam::natural(theta_v, theta_m),
            MvnParamJson::Expectation { eta_v, eta_m } => MvnParam::expectation(eta_v, eta_m),
        };
        parsed.map_err(D::Error::custom)
    }
}

/// The worked 2D pair used across the test suites: lambda1 = ((0,0), I),
/// lambda2 = ((1,2), [[1,-1],[-1,2]]).
#[cfg(test)]
pub(crate) fn test_paper_pair() -> (MvnParam, MvnParam) {
    let p1 = MvnParam::ordinary(vec![0.0, 0.0], vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
    let p2 = MvnParam::ordinary(vec![1.0, 2.0], vec![vec![1.0, -1.0], vec![-1.0, 2.0]]).unwrap();
    (p1, p2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    fn paper_pair() -> (MvnParam, MvnParam) {
        test_paper_pair()
    }

    fn assert_matrix(m: &DMatrix<f64>, rows: &[&[f64]], tol: f64) {
        for (i, r) in rows.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                close(m[(i, j)], v, tol);
            }
        }
    }

    #[test]
    fn worked_example_conversions() {
        let (p1, p2) = paper_pair();

        let n2 = p2.to_natural().unwrap();
        let (tv, tm) = n2.parts();
        close(tv[0], 4.0, 1e-12);
        close(tv[1], 3.0, 1e-12);
        assert_matrix(tm, &[&[1.0, 0.5], &[0.5, 0.5]], 1e-12);

        let e2 = p2.to_expectation().unwrap();
        let (ev, em) = e2.parts();
        close(ev[0], 1.0, 1e-12);
        close(ev[1], 2.0, 1e-12);
        assert_matrix(em, &[&[-2.0, -1.0], &[-1.0, -6.0]], 1e-12);

        let n1 = p1.to_natural().unwrap();
        let (tv1, tm1) = n1.parts();
        close(tv1[0], 0.0, 1e-15);
        close(tv1[1], 0.0, 1e-15);
        assert_matrix(tm1, &[&[0.5, 0.0], &[0.0, 0.5]], 1e-15);
    }

    #[test]
    fn conversions_roundtrip() {
        let (_, p2) = paper_pair();
        let back = p2
            .to_natural()
            .unwrap()
            .to_expectation()
            .unwrap()
            .to_natural()
            .unwrap()
            .to_ordinary()
            .unwrap();
        let (mu, sigma) = back.parts();
        close(mu[0], 1.0, 1e-10);
        close(mu[1], 2.0, 1e-10);
        assert_matrix(sigma, &[&[1.0, -1.0], &[-1.0, 2.0]], 1e-10);
    }

    #[test]
    fn log_normalizer_agrees_across_charts() {
        let (p1, p2) = paper_pair();
        for p in [&p1, &p2] {
            let f_ord = p.log_normalizer().unwrap();
            let f_nat = p.to_natural().unwrap().log_normalizer().unwrap();
            let f_exp = p.to_expectation().unwrap().log_normalizer().unwrap();
            close(f_ord, f_nat, 1e-10);
            close(f_ord, f_exp, 1e-10);
        }
        // standard 2D Gaussian: F = log 2 pi; paper's lambda2: F = 5 + log 2 pi
        close(p1.log_normalizer().unwrap(), LN_2PI, 1e-12);
        close(p2.log_normalizer().unwrap(), 5.0 + LN_2PI, 1e-12);
    }

    #[test]
    fn fenchel_young_equality() {
        let (p1, p2) = paper_pair();
        for p in [&p1, &p2] {
            let theta = p.flat_natural().unwrap();
            let eta_param = p.to_expectation().unwrap();
            let (ev, em) = eta_param.parts();
            let d = ev.len();
            let mut eta = Vec::with_capacity(d + d * d);
            eta.extend(ev.iter());
            for i in 0..d {
                for j in 0..d {
                    eta.push(em[(i, j)]);
                }
            }
            let inner: f64 = theta.iter().zip(&eta).map(|(a, b)| a * b).sum();
            let gap = p.log_normalizer().unwrap() + fenchel_conjugate(p).unwrap() - inner;
            close(gap, 0.0, 1e-9);
        }
    }

    #[test]
    fn kl_examples() {
        let (p1, p2) = paper_pair();
        close(kl(&p1, &p1).unwrap(), 0.0, 1e-12);

        // equal covariances: half the squared Mahalanobis distance
        let a = MvnParam::ordinary(vec![0.0], vec![vec![1.0]]).unwrap();
        let b = MvnParam::ordinary(vec![1.0], vec![vec![1.0]]).unwrap();
        close(kl(&a, &b).unwrap(), 0.5, 1e-12);
        let q = DMatrix::from_row_slice(1, 1, &[1.0]);
        let maha = mahalanobis(&q, &[0.0], &[1.0]).unwrap();
        close(kl(&a, &b).unwrap(), 0.5 * maha * maha, 1e-12);

        assert!(kl(&p1, &p2).unwrap() > 0.0);
    }

    #[test]
    fn g_mixture_matches_worked_example() {
        let (p1, p2) = paper_pair();
        let mix = g_mixture_param(&p1, &p2, 0.5).unwrap();
        let (mu, sigma) = mix.parts();
        close(mu[0], 1.0, 1e-12);
        close(mu[1], 1.0, 1e-12);
        assert_matrix(sigma, &[&[0.8, -0.4], &[-0.4, 1.2]], 1e-12);

        // natural-chart interpolation gives the same member
        let n1 = p1.to_natural().unwrap();
        let n2 = p2.to_natural().unwrap();
        let (v1, m1) = n1.parts();
        let (v2, m2) = n2.parts();
        let lerp = MvnParam::Natural {
            theta_v: v1 * 0.5 + v2 * 0.5,
            theta_m: symmetrize(m1 * 0.5 + m2 * 0.5),
        };
        let lerp_ord = lerp.to_ordinary().unwrap();
        let (lmu, lsigma) = lerp_ord.parts();
        close(lmu[0], mu[0], 1e-12);
        close(lmu[1], mu[1], 1e-12);
        assert_matrix(lsigma, &[&[0.8, -0.4], &[-0.4, 1.2]], 1e-12);

        // endpoints and coincident inputs are trivial
        let m0 = g_mixture_param(&p1, &p2, 0.0).unwrap();
        let (m0v, m0m) = m0.parts();
        close(m0v[0], 0.0, 1e-12);
        assert_matrix(m0m, &[&[1.0, 0.0], &[0.0, 1.0]], 1e-12);
        let msame = g_mixture_param(&p2, &p2, 0.37).unwrap();
        let (sv, sm) = msame.parts();
        close(sv[0], 1.0, 1e-10);
        close(sv[1], 2.0, 1e-10);
        assert_matrix(sm, &[&[1.0, -1.0], &[-1.0, 2.0]], 1e-10);
    }

    #[test]
    fn jensen_value_from_paper() {
        let (p1, p2) = paper_pair();
        close(jensen_alpha(&p1, &p2, 0.5).unwrap(), 0.86157, 1e-4);
        let (_, z) = g_mixture(&p1, &p2, 0.5).unwrap();
        close(z, (-0.861572f64).exp(), 1e-5);
    }

    #[test]
    fn asymmetry_gate_trips() {
        let bad = MvnParam::ordinary(
            vec![0.0, 0.0],
            vec![vec![1.0, 0.5], vec![0.3, 1.0]],
        );
        assert!(matches!(bad, Err(Error::NotPositiveDefinite(_))));
    }

    #[test]
    fn non_positive_definite_rejected() {
        assert!(MvnParam::ordinary(vec![0.0], vec![vec![-1.0]]).is_err());
        assert!(MvnParam::natural(vec![0.0, 0.0], vec![vec![1.0, 2.0], vec![2.0, 1.0]]).is_err());
        // eta_M + eta_v eta_v^T must be negative-definite
        assert!(MvnParam::expectation(vec![2.0], vec![vec![-1.0]]).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let (_, p2) = paper_pair();
        let s = serde_json::to_string(&p2).unwrap();
        assert!(s.contains("\"chart\":\"ordinary\""));
        let back: MvnParam = serde_json::from_str(&s).unwrap();
        assert_eq!(p2, back);

        let nat_json = r#"{"chart":"natural","theta_v":[4.0,3.0],"theta_m":[[1.0,0.5],[0.5,0.5]]}"#;
        let nat: MvnParam = serde_json::from_str(nat_json).unwrap();
        let ord = nat.to_ordinary().unwrap();
        let (mu, _) = ord.parts();
        close(mu[0], 1.0, 1e-12);
        close(mu[1], 2.0, 1e-12);
    }

    #[test]
    fn density_evaluates_and_tags() {
        let (p1, _) = paper_pair();
        let d = p1.density().unwrap();
        close(d.eval(&[0.0, 0.0]), 1.0 / (2.0 * std::f64::consts::PI), 1e-12);
        assert!(matches!(d.family(), Some(FamilyTag::MvnOrdinary { .. })));
        if let Some(FamilyTag::MvnOrdinary { mu, sigma }) = d.family() {
            let rebuilt = MvnParam::from_tag(mu, sigma).unwrap();
            close(kl(&rebuilt, &p1).unwrap(), 0.0, 1e-12);
        }
    }
}
