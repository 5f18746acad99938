//! `genjs cluster`: k-means over a CSV point file or a JSON problem file,
//! emitting the `ClusterResult` (centers, assignment, objective trace) as
//! JSON.
//!
//! CSV format: one parameter vector per row; the header names the family by
//! prefixing every column, e.g. `raw.x0,raw.x1`, `cauchy.gamma`, or
//! `mvn_natural.v0,mvn_natural.v1,mvn_natural.m00,...` (flattened natural
//! parameters, `d + d^2` columns).
//!
//! JSON format mirrors `ClusterProblem`:
//! `{"family":"raw","points":[[...],...],"k":2,"seed":0,
//!   "divergence":"sqeuclidean","max_iters":100,"tol":1e-9}`
//! plus `"components":[density descriptors...]` for `wmix_theta` with the
//! `kl` divergence.

use std::path::PathBuf;
use std::sync::Arc;

use clap::Args;
use serde::Deserialize;

use genjs::clustering::{
    self, CentroidSolver, ClusterProblem, ParamDivergence, PointFamily,
};
use genjs::descriptor::DensityDescriptor;
use genjs::expfam::ExpFamily;
use genjs::oracle::OracleCfg;
use genjs::wmixture::WMixtureFamily;

use crate::{emit, CliError, OracleArgs};

#[derive(Args)]
pub struct ClusterArgs {
    /// CSV point file or JSON problem file
    #[arg(long)]
    input: PathBuf,
    /// Number of clusters (required for CSV input; overrides JSON)
    #[arg(long)]
    k: Option<usize>,
    /// Divergence: sqeuclidean, kl, rkl (Gaussian natural parameters), hjs
    /// (Cauchy scales); overrides JSON
    #[arg(long)]
    divergence: Option<String>,
    /// Maximum Lloyd iterations
    #[arg(long, default_value_t = 100)]
    max_iters: usize,
    /// Relative objective-change stopping tolerance
    #[arg(long, default_value_t = 1e-9)]
    lloyd_tol: f64,
    #[command(flatten)]
    oracle: OracleArgs,
    /// Write the JSON result here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Deserialize)]
struct ProblemFile {
    /// One of `raw`, `cauchy`, `mvn_natural`, `wmix`; the Gaussian
    /// dimension is inferred from the point width (`d + d^2`).
    family: String,
    points: Vec<Vec<f64>>,
    k: usize,
    #[serde(default)]
    seed: u64,
    #[serde(default = "default_divergence")]
    divergence: String,
    #[serde(default = "default_max_iters")]
    max_iters: usize,
    #[serde(default = "default_tol")]
    tol: f64,
    #[serde(default)]
    components: Option<Vec<DensityDescriptor>>,
}

impl ProblemFile {
    fn point_family(&self) -> Result<PointFamily, CliError> {
        let width = self
            .points
            .first()
            .map(|p| p.len())
            .ok_or_else(|| CliError::Spec("no points".into()))?;
        resolve_family(&self.family, width)
    }
}

fn resolve_family(name: &str, width: usize) -> Result<PointFamily, CliError> {
    match name {
        "raw" => Ok(PointFamily::Raw),
        "cauchy" => Ok(PointFamily::CauchyScale),
        "wmix" => Ok(PointFamily::WMixtureTheta),
        "mvn_natural" => {
            let d = (1..=16).find(|d| d + d * d == width).ok_or_else(|| {
                CliError::Spec(format!(
                    "{width} columns do not match d + d^2 for any d <= 16"
                ))
            })?;
            Ok(PointFamily::MvnNatural { dim: d })
        }
        other => Err(CliError::Spec(format!("unknown family {other:?}"))),
    }
}

fn default_divergence() -> String {
    "sqeuclidean".into()
}

fn default_max_iters() -> usize {
    100
}

fn default_tol() -> f64 {
    1e-9
}

pub fn run(args: ClusterArgs) -> Result<(), CliError> {
    let raw = std::fs::read_to_string(&args.input)
        .map_err(|e| CliError::Spec(format!("cannot read {}: {e}", args.input.display())))?;

    let mut file = if args.input.extension().is_some_and(|e| e == "json") {
        serde_json::from_str::<ProblemFile>(&raw)
            .map_err(|e| CliError::Spec(format!("invalid problem file: {e}")))?
    } else {
        parse_csv(&raw)?
    };
    if let Some(k) = args.k {
        file.k = k;
    }
    if let Some(d) = &args.divergence {
        file.divergence = d.clone();
    }
    if let Some(seed) = args.oracle.seed {
        file.seed = seed;
    }

    let family = file.point_family()?;
    let (divergence, solver) = build_divergence(&file, &family, &args.oracle.cfg())?;
    let problem = ClusterProblem::new(file.points, family, divergence, file.k, file.seed)
        .map_err(CliError::from)?
    .with_max_iters(args.max_iters.max(file.max_iters))
    .with_tol(if args.lloyd_tol != 1e-9 {
        args.lloyd_tol
    } else {
        file.tol
    });

    let centers = clustering::seed_kmeanspp(&problem).map_err(CliError::from)?;
    let result = clustering::lloyd(&problem, &centers, &solver).map_err(CliError::from)?;
    emit(&serde_json::to_string(&result).unwrap(), args.out.as_deref())
}

/// CSV with family-prefixed column names.
fn parse_csv(raw: &str) -> Result<ProblemFile, CliError> {
    let mut reader = csv::Reader::from_reader(raw.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| CliError::Spec(format!("CSV header: {e}")))?
        .clone();
    let prefixes: Vec<&str> = headers
        .iter()
        .map(|h| h.split('.').next().unwrap_or(""))
        .collect();
    let family_name = prefixes
        .first()
        .copied()
        .ok_or_else(|| CliError::Spec("empty CSV header".into()))?;
    if prefixes.iter().any(|p| *p != family_name) {
        return Err(CliError::Spec(
            "all CSV columns must share one family prefix".into(),
        ));
    }
    let ncols = headers.len();
    // reject unknown families early, with a column-count check for Gaussians
    resolve_family(family_name, ncols)?;

    let mut points = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Spec(format!("CSV row: {e}")))?;
        let row: Vec<f64> = record
            .iter()
            .map(|cell| {
                cell.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::Spec(format!("bad CSV number {cell:?}")))
            })
            .collect::<Result<_, _>>()?;
        if row.len() != ncols {
            return Err(CliError::Spec("ragged CSV row".into()));
        }
        points.push(row);
    }
    Ok(ProblemFile {
        family: family_name.to_string(),
        points,
        k: 1,
        seed: 0,
        divergence: default_divergence(),
        max_iters: default_max_iters(),
        tol: default_tol(),
        components: None,
    })
}

/// Divergence plus the exact centroid solver that matches it.
fn build_divergence(
    file: &ProblemFile,
    family: &PointFamily,
    cfg: &OracleCfg,
) -> Result<(ParamDivergence, CentroidSolver), CliError> {
    let name = file.divergence.to_ascii_lowercase();
    match (family, name.as_str()) {
        (_, "sqeuclidean") => Ok((clustering::squared_euclidean(), CentroidSolver::Mean)),
        (PointFamily::MvnNatural { dim }, "kl") => {
            // D(point : center) = KL(p_point : p_center) = B_F(center : point);
            // the exact minimizer is the expectation-parameter mean
            let d = *dim;
            let fam = ExpFamily::mvn(d);
            let div_fam = fam.clone();
            let divergence: ParamDivergence = Arc::new(move |p, c| {
                genjs::expfam::bregman(&div_fam, c, p).unwrap_or(f64::INFINITY)
            });
            let solver_fam = fam;
            let solver = CentroidSolver::Custom(Arc::new(move |members| {
                let dim_p = members[0].len();
                let mut eta = vec![0.0; dim_p];
                for m in members {
                    let g = solver_fam.grad_f(m)?;
                    for (e, gi) in eta.iter_mut().zip(&g) {
                        *e += gi / members.len() as f64;
                    }
                }
                solver_fam.grad_inverse(&eta)
            }));
            Ok((divergence, solver))
        }
        (PointFamily::MvnNatural { dim }, "rkl") => {
            // D(point : center) = KL(p_center : p_point) = B_F(point : center);
            // the right-Bregman centroid is the arithmetic mean
            let fam = ExpFamily::mvn(*dim);
            let divergence: ParamDivergence = Arc::new(move |p, c| {
                genjs::expfam::bregman(&fam, p, c).unwrap_or(f64::INFINITY)
            });
            Ok((divergence, CentroidSolver::Mean))
        }
        (PointFamily::CauchyScale, "kl") | (PointFamily::CauchyScale, "hjs") => {
            let harmonic = name == "hjs";
            let divergence: ParamDivergence = Arc::new(move |p, c| {
                let (Ok(a), Ok(b)) = (
                    genjs::cauchy::CauchyScale::new(p[0]),
                    genjs::cauchy::CauchyScale::new(c[0]),
                ) else {
                    return f64::INFINITY;
                };
                if harmonic {
                    genjs::cauchy::harmonic_jsd(&a, &b)
                } else {
                    genjs::cauchy::kl(&a, &b)
                }
            });
            let solver_div = divergence.clone();
            // scalar scale: golden-section over the member span (the
            // centroid obeys in-betweenness for these divergences)
            let solver = CentroidSolver::Custom(Arc::new(move |members| {
                let lo = members.iter().map(|m| m[0]).fold(f64::INFINITY, f64::min);
                let hi = members.iter().map(|m| m[0]).fold(f64::NEG_INFINITY, f64::max);
                Ok(vec![golden_min(
                    |g| members.iter().map(|m| solver_div(m, &[g])).sum::<f64>(),
                    lo,
                    hi,
                )])
            }));
            Ok((divergence, solver))
        }
        (PointFamily::WMixtureTheta, "kl") => {
            let components = file
                .components
                .as_ref()
                .ok_or_else(|| {
                    CliError::Spec("wmix_theta with kl needs \"components\"".into())
                })?
                .iter()
                .map(|c| c.build())
                .collect::<genjs::Result<Vec<_>>>()
                .map_err(CliError::from)?;
            let fam = Arc::new(WMixtureFamily::new(components).map_err(CliError::from)?);
            let cfg = *cfg;
            let divergence: ParamDivergence = Arc::new(move |p, c| {
                fam.kl(p, c, &cfg).unwrap_or(f64::INFINITY)
            });
            // KL(m_p : m_c) = B_F(p : c): right-Bregman, mean centroid
            Ok((divergence, CentroidSolver::Mean))
        }
        (family, d) => Err(CliError::Spec(format!(
            "divergence {d:?} is not available for {family:?}"
        ))),
    }
}

fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    if hi - lo < 1e-14 {
        return 0.5 * (lo + hi);
    }
    let gr = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - gr * (hi - lo);
    let mut d = lo + gr * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if hi - lo < 1e-12 * hi.abs().max(1.0) {
            break;
        }
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - gr * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + gr * (hi - lo);
            fd = f(d);
        }
    }
    0.5 * (lo + hi)
}
