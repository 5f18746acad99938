//! Divergence-generic k-means.
//!
//! The objective is `E_D(P, C) = (1/n) sum_i min_j D(p_i : c_j)` for an
//! arbitrary parameter divergence `D`, with the point in the first slot
//! (right-centroid convention). Seeding is probabilistic k-means++
//! (each next center drawn proportionally to the divergence from the
//! current center set), Lloyd iterations alternate assignment and centroid
//! steps, and the centroid step is pluggable: the arithmetic mean is the
//! exact minimizer for every right-sided Bregman divergence, and the
//! convex-concave fixed point handles skew Jensen centroids on exponential
//! families.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expfam::ExpFamily;

/// A divergence on flat parameter vectors, `D(point : center)`.
pub type ParamDivergence = Arc<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>;

/// What the parameter vectors mean; used for domain validation and by the
/// CLI to pick divergences and centroid solvers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PointFamily {
    /// Plain vectors in `R^d`.
    Raw,
    /// Flattened Gaussian natural parameters `[theta_v, theta_M]`.
    MvnNatural { dim: usize },
    /// Cauchy scales (positive reals).
    CauchyScale,
    /// Mixture-family weights (interior of the simplex).
    WMixtureTheta,
}

impl PointFamily {
    fn point_ok(&self, p: &[f64]) -> bool {
        match self {
            PointFamily::Raw => p.iter().all(|v| v.is_finite()),
            PointFamily::MvnNatural { dim } => {
                crate::expfam::MvnParam::flat_natural_in_domain(*dim, p)
            }
            PointFamily::CauchyScale => p.len() == 1 && p[0] > 1e-12,
            PointFamily::WMixtureTheta => {
                p.iter().all(|&t| t > 0.0) && p.iter().sum::<f64>() < 1.0
            }
        }
    }
}

/// A full clustering instance.
#[derive(Clone)]
pub struct ClusterProblem {
    pub points: Vec<Vec<f64>>,
    pub family: PointFamily,
    pub divergence: ParamDivergence,
    pub k: usize,
    pub seed: u64,
    pub max_iters: usize,
    pub tol: f64,
}

impl std::fmt::Debug for ClusterProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ClusterProblem")
            .field("n", &self.points.len())
            .field("family", &self.family)
            .field("k", &self.k)
            .field("seed", &self.seed)
            .finish()
    }
}

impl ClusterProblem {
    pub fn new(
        points: Vec<Vec<f64>>,
        family: PointFamily,
        divergence: ParamDivergence,
        k: usize,
        seed: u64,
    ) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Domain("no points to cluster".into()));
        }
        if k == 0 || k > points.len() {
            return Err(Error::Domain(format!(
                "k={k} must be in 1..={}",
                points.len()
            )));
        }
        let dim = points[0].len();
        if points.iter().any(|p| p.len() != dim) {
            return Err(Error::Domain("points have mixed dimensions".into()));
        }
        if let Some(bad) = points.iter().find(|p| !family.point_ok(p)) {
            return Err(Error::Domain(format!(
                "point {bad:?} outside the {family:?} domain"
            )));
        }
        Ok(ClusterProblem {
            points,
            family,
            divergence,
            k,
            seed,
            max_iters: 100,
            tol: 1e-9,
        })
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    fn divergence(&self, p: &[f64], c: &[f64]) -> f64 {
        let d = (self.divergence)(p, c);
        if d.is_nan() {
            f64::INFINITY
        } else {
            d
        }
    }
}

/// Squared Euclidean distance, the plain-vector instance of `D`.
pub fn squared_euclidean() -> ParamDivergence {
    Arc::new(|a, b| a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
}

/// The result of a clustering run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClusterResult {
    pub centers: Vec<Vec<f64>>,
    /// `assignment[i]` is the index of the center nearest to point `i`
    /// (ties broken toward the lowest center index).
    pub assignment: Vec<usize>,
    /// `E_D` after seeding and after each Lloyd iteration; nonincreasing
    /// whenever the centroid solver is exact for the divergence.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
}

/// Centroid update used inside Lloyd iterations.
#[derive(Clone)]
pub enum CentroidSolver {
    /// Arithmetic mean of the members: exact for squared Euclidean and for
    /// every right-sided Bregman divergence `D(p : c) = B_F(p : c)`.
    Mean,
    /// Any custom update (e.g. the CCCP Jensen centroid).
    Custom(Arc<dyn Fn(&[Vec<f64>]) -> Result<Vec<f64>> + Send + Sync>),
}

impl CentroidSolver {
    fn solve(&self, members: &[Vec<f64>]) -> Result<Vec<f64>> {
        match self {
            CentroidSolver::Mean => {
                let dim = members[0].len();
                let mut c = vec![0.0; dim];
                for m in members {
                    for (ci, mi) in c.iter_mut().zip(m) {
                        *ci += mi;
                    }
                }
                let n = members.len() as f64;
                c.iter_mut().for_each(|ci| *ci /= n);
                Ok(c)
            }
            CentroidSolver::Custom(f) => f(members),
        }
    }
}

/// `E_D(P, C)`: mean over points of the divergence to the nearest center.
pub fn objective(problem: &ClusterProblem, centers: &[Vec<f64>]) -> Result<f64> {
    if centers.is_empty() {
        return Err(Error::Domain("no centers".into()));
    }
    let mut total = 0.0;
    for p in &problem.points {
        let d = centers
            .iter()
            .map(|c| problem.divergence(p, c))
            .fold(f64::INFINITY, f64::min);
        if !d.is_finite() {
            return Err(Error::Degenerate(format!(
                "point {p:?} has no finite divergence to any center"
            )));
        }
        total += d;
    }
    Ok(total / problem.points.len() as f64)
}

fn nearest(problem: &ClusterProblem, centers: &[Vec<f64>], p: &[f64]) -> (usize, f64) {
    let mut best = (0usize, f64::INFINITY);
    for (j, c) in centers.iter().enumerate() {
        let d = problem.divergence(p, c);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

/// k-means++ seeding: first center uniform, each next center drawn with
/// probability proportional to the divergence from the current center set.
/// Deterministic given the problem seed. If the remaining mass vanishes
/// (all points coincide with a chosen center) the remaining slots are
/// filled with copies of already-chosen centers.
pub fn seed_kmeanspp(problem: &ClusterProblem) -> Result<Vec<Vec<f64>>> {
    let n = problem.points.len();
    let mut rng = ChaCha8Rng::seed_from_u64(problem.seed);
    let mut centers: Vec<Vec<f64>> = Vec::with_capacity(problem.k);
    centers.push(problem.points[rng.random_range(0..n)].clone());

    let mut dist: Vec<f64> = vec![0.0; n];
    while centers.len() < problem.k {
        let mut total = 0.0;
        for (i, p) in problem.points.iter().enumerate() {
            let (_, d) = nearest(problem, &centers, p);
            dist[i] = d;
            if d.is_finite() {
                total += d;
            }
        }
        // infinite-divergence points are picked outright (they carry all
        // the proposal mass)
        if let Some(i) = dist.iter().position(|d| d.is_infinite()) {
            centers.push(problem.points[i].clone());
            continue;
        }
        if total <= 0.0 {
            // degenerate: every point coincides with some center
            while centers.len() < problem.k {
                let copy = centers[0].clone();
                centers.push(copy);
            }
            break;
        }
        let u: f64 = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut chosen = n - 1;
        for (i, &d) in dist.iter().enumerate() {
            acc += d;
            if u <= acc {
                chosen = i;
                break;
            }
        }
        centers.push(problem.points[chosen].clone());
    }
    Ok(centers)
}

/// Lloyd's batched k-means from the given initial centers.
///
/// Alternates assignment (nearest center under `D(point : center)`, ties to
/// the lowest index) and centroid steps until the relative objective change
/// drops below `tol` or `max_iters` is hit. A cluster left empty is reseeded
/// at the point farthest from its current center (keeping `k` fixed, never
/// increasing the objective).
pub fn lloyd(
    problem: &ClusterProblem,
    init_centers: &[Vec<f64>],
    solver: &CentroidSolver,
) -> Result<ClusterResult> {
    if init_centers.len() != problem.k {
        return Err(Error::Domain(format!(
            "expected {} initial centers, got {}",
            problem.k,
            init_centers.len()
        )));
    }
    let n = problem.points.len();
    let mut centers = init_centers.to_vec();
    let mut assignment = vec![0usize; n];
    let mut trace = vec![objective(problem, &centers)?];
    let mut iterations = 0;

    for _ in 0..problem.max_iters {
        // assignment step
        for (i, p) in problem.points.iter().enumerate() {
            assignment[i] = nearest(problem, &centers, p).0;
        }

        // empty-cluster repair: reseed at the farthest point whose cluster
        // can spare it
        loop {
            let mut counts = vec![0usize; problem.k];
            for &a in &assignment {
                counts[a] += 1;
            }
            let Some(empty) = counts.iter().position(|&c| c == 0) else {
                break;
            };
            let far = problem
                .points
                .iter()
                .enumerate()
                .filter(|(i, _)| counts[assignment[*i]] > 1)
                .max_by(|(i, p), (j, q)| {
                    let di = problem.divergence(p, &centers[assignment[*i]]);
                    let dj = problem.divergence(q, &centers[assignment[*j]]);
                    di.partial_cmp(&dj).unwrap_or(std::cmp::Ordering::Equal)
                })
                .map(|(i, _)| i);
            let Some(far) = far else { break };
            centers[empty] = problem.points[far].clone();
            assignment[far] = empty;
        }

        // centroid step
        for j in 0..problem.k {
            let members: Vec<Vec<f64>> = problem
                .points
                .iter()
                .zip(&assignment)
                .filter(|(_, &a)| a == j)
                .map(|(p, _)| p.clone())
                .collect();
            if !members.is_empty() {
                centers[j] = solver.solve(&members)?;
            }
        }

        iterations += 1;
        let obj = objective(problem, &centers)?;
        let prev = *trace.last().unwrap();
        trace.push(obj);
        if (prev - obj).abs() <= problem.tol * prev.abs().max(1e-300) {
            break;
        }
    }

    // final assignment consistent with the returned centers
    for (i, p) in problem.points.iter().enumerate() {
        assignment[i] = nearest(problem, &centers, p).0;
    }

    Ok(ClusterResult {
        centers,
        assignment,
        objective_trace: trace,
        iterations,
    })
}

/// Skew Jensen centroid by the convex-concave fixed point
/// `theta <- (grad F)^-1(sum_i w_i grad F((theta_i theta)_alpha))`,
/// initialized at the arithmetic mean.
///
/// Stops after `iters` rounds or when successive iterates differ by less
/// than 1e-10 in the max norm. Every iterate stays in the natural domain
/// (the update lands in the expectation space, which maps back inside).
pub fn jensen_centroid_cccp(
    fam: &ExpFamily,
    thetas: &[Vec<f64>],
    weights: &[f64],
    alpha: f64,
    iters: usize,
) -> Result<Vec<f64>> {
    if thetas.is_empty() || thetas.len() != weights.len() {
        return Err(Error::Domain("need as many weights as parameters".into()));
    }
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha={alpha} outside (0, 1)")));
    }
    let wsum: f64 = weights.iter().sum();
    if weights.iter().any(|&w| w < 0.0) || (wsum - 1.0).abs() > 1e-9 {
        return Err(Error::Domain("weights must lie on the simplex".into()));
    }
    let dim = thetas[0].len();
    let mut theta = vec![0.0; dim];
    for (t, &w) in thetas.iter().zip(weights) {
        if !fam.in_domain(t) {
            return Err(Error::Domain(format!("theta {t:?} outside domain")));
        }
        for (c, v) in theta.iter_mut().zip(t) {
            *c += w * v;
        }
    }

    for _ in 0..iters {
        let mut eta = vec![0.0; dim];
        for (t, &w) in thetas.iter().zip(weights) {
            let mid: Vec<f64> = t
                .iter()
                .zip(&theta)
                .map(|(a, b)| (1.0 - alpha) * a + alpha * b)
                .collect();
            let g = fam.grad_f(&mid)?;
            for (e, gi) in eta.iter_mut().zip(&g) {
                *e += w * gi;
            }
        }
        let next = fam.grad_inverse(&eta)?;
        if !fam.in_domain(&next) {
            return Err(Error::GradientInversion(
                "CCCP iterate left the natural domain".into(),
            ));
        }
        let step = theta
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        theta = next;
        if step < 1e-10 {
            break;
        }
    }
    Ok(theta)
}

/// The skew Jensen objective `sum_i w_i J_F^alpha(theta_i : theta)` the CCCP
/// centroid descends.
pub fn jensen_objective(
    fam: &ExpFamily,
    thetas: &[Vec<f64>],
    weights: &[f64],
    alpha: f64,
    theta: &[f64],
) -> Result<f64> {
    let mut total = 0.0;
    for (t, &w) in thetas.iter().zip(weights) {
        total += w * crate::expfam::jensen_skew(fam, t, theta, alpha)?.value;
    }
    Ok(total)
}

/// Sampled surrogate for the quasi-triangle (`kappa_1`) and symmetry
/// (`kappa_2`) constants of the k-means++ performance bound: the ratio of
/// the largest to the smallest Hessian spectral norm of `F` over random
/// convex combinations of the inputs. A sampled estimate over the convex
/// hull, never a certified bound.
pub fn kappa_estimate(fam: &ExpFamily, thetas: &[Vec<f64>]) -> Result<(f64, f64)> {
    if thetas.is_empty() {
        return Err(Error::Domain("no parameters".into()));
    }
    let dim = thetas[0].len();
    let distinct = thetas
        .iter()
        .any(|t| t.iter().zip(&thetas[0]).any(|(a, b)| (a - b).abs() > 1e-14));
    if thetas.len() == 1 || !distinct {
        return Ok((1.0, 1.0));
    }

    // hull vertices plus random convex combinations; fixed stream so the
    // estimate is reproducible
    let mut rng = ChaCha8Rng::seed_from_u64(0x6b61_7070_6121);
    let mut samples: Vec<Vec<f64>> = thetas.to_vec();
    for _ in 0..48 {
        let mut w: Vec<f64> = (0..thetas.len())
            .map(|_| -(rng.random::<f64>()).ln())
            .collect();
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= total);
        let mut point = vec![0.0; dim];
        for (t, wi) in thetas.iter().zip(&w) {
            for (p, v) in point.iter_mut().zip(t) {
                *p += wi * v;
            }
        }
        samples.push(point);
    }

    let mut max_norm = f64::MIN;
    let mut min_norm = f64::MAX;
    for point in &samples {
        let norm = hessian_spectral_norm(fam, point)?;
        max_norm = max_norm.max(norm);
        min_norm = min_norm.min(norm);
    }
    if min_norm < 1e-14 {
        return Err(Error::Degenerate(
            "singular Hessian sample in kappa estimation".into(),
        ));
    }
    let ratio = (max_norm / min_norm).max(1.0);
    Ok((ratio, ratio))
}

fn hessian_spectral_norm(fam: &ExpFamily, theta: &[f64]) -> Result<f64> {
    let dim = theta.len();
    let scale = theta.iter().fold(1.0f64, |a, &b| a.max(b.abs()));
    let h = 1e-4 * scale;
    let mut hess = DMatrix::zeros(dim, dim);
    for j in 0..dim {
        let mut up = theta.to_vec();
        let mut dn = theta.to_vec();
        up[j] += h;
        dn[j] -= h;
        let gu = fam.grad_f(&up)?;
        let gd = fam.grad_f(&dn)?;
        for i in 0..dim {
            hess[(i, j)] = (gu[i] - gd[i]) / (2.0 * h);
        }
    }
    let sym = (hess.clone() + hess.transpose()) * 0.5;
    Ok(sym
        .symmetric_eigenvalues()
        .iter()
        .fold(0.0f64, |a, &e| a.max(e.abs())))
}
