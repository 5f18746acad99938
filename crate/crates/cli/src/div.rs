//! `genjs div`: evaluate a divergence between two density specs, closed-form
//! when the pair admits one, through the oracle otherwise.

use std::path::PathBuf;

use clap::Args;
use serde::Serialize;

use genjs::descriptor::DensityDescriptor;
use genjs::divergences::{self, chernoff_information, Divergence};
use genjs::expfam::{self, ExpFamily};
use genjs::means::WeightedMean;
use genjs::oracle::Density;

use crate::{emit, spec, CliError, OracleArgs};

/// Nominal accuracy reported for closed-form evaluations.
const CLOSED_FORM_TOL: f64 = 1e-12;

#[derive(Args)]
pub struct DivArgs {
    /// Divergence name: kl, rkl, jeffreys, resistor, js, gjs, gjs-dual,
    /// hjs, bhat, hellinger, alpha-div, k-div
    #[arg(long = "d")]
    divergence: String,
    /// Mixture mean M for js (arithmetic, geometric, harmonic, power:`<p>`)
    #[arg(long = "m", default_value = "arithmetic")]
    mean_m: String,
    /// Combination mean N; turns js into the (M,N)-JS symmetrization
    #[arg(long = "n")]
    mean_n: Option<String>,
    /// Mixture skew alpha
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    /// Combination skew beta (defaults to alpha)
    #[arg(long)]
    beta: Option<f64>,
    /// Use the reversed-exponent Bhattacharyya convention
    #[arg(long, default_value_t = false)]
    bhat_reverse: bool,
    #[command(flatten)]
    oracle: OracleArgs,
    /// Write the JSON report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// The two density specs (family:params or JSON file paths)
    #[arg(num_args = 2)]
    specs: Vec<String>,
}

#[derive(Serialize)]
struct DivReport {
    divergence: String,
    value: f64,
    method: &'static str,
    tolerance: f64,
}

/// Closed-form KL when the tags allow it, oracle otherwise.
fn kl_any(p: &Density, q: &Density, cfg: &genjs::OracleCfg) -> Result<(f64, &'static str, f64), CliError> {
    match Divergence::closed_kl().apply(p, q) {
        Ok(v) => Ok((v, "closed_form", CLOSED_FORM_TOL)),
        Err(genjs::Error::Domain(_)) => {
            let est = divergences::kl_est(p, q, cfg).map_err(CliError::from)?;
            let value = divergences::kl_value(p, q, cfg).map_err(CliError::from)?.value();
            Ok((value, "oracle", est.abs_error))
        }
        Err(e) => Err(e.into()),
    }
}

pub fn run(args: DivArgs) -> Result<(), CliError> {
    if args.specs.len() != 2 {
        return Err(CliError::Spec("div needs exactly two density specs".into()));
    }
    let d1 = spec::parse_spec(&args.specs[0])?;
    let d2 = spec::parse_spec(&args.specs[1])?;
    let p = spec::build(&d1)?;
    let q = spec::build(&d2)?;
    let cfg = args.oracle.cfg();
    let alpha = args.alpha;
    let beta = args.beta.unwrap_or(alpha);
    let mean_m = WeightedMean::parse(&args.mean_m).map_err(CliError::from)?;

    let name = args.divergence.to_ascii_lowercase();
    let (value, method, tolerance) = match name.as_str() {
        "kl" => kl_any(&p, &q, &cfg)?,
        "rkl" => kl_any(&q, &p, &cfg)?,
        "jeffreys" => {
            let (fwd, m1, t1) = kl_any(&p, &q, &cfg)?;
            let (rev, m2, t2) = kl_any(&q, &p, &cfg)?;
            let method = if m1 == "closed_form" && m2 == "closed_form" {
                "closed_form"
            } else {
                "oracle"
            };
            (fwd + rev, method, t1 + t2)
        }
        "resistor" => {
            let (fwd, m1, t1) = kl_any(&p, &q, &cfg)?;
            let (rev, m2, t2) = kl_any(&q, &p, &cfg)?;
            let method = if m1 == "closed_form" && m2 == "closed_form" {
                "closed_form"
            } else {
                "oracle"
            };
            let value = if fwd == 0.0 || rev == 0.0 {
                0.0
            } else {
                2.0 * fwd * rev / (fwd + rev)
            };
            (value, method, t1 + t2)
        }
        "js" => {
            // closed KL backend when the mixture and the tags allow it;
            // otherwise the fully numeric path
            let closed = Divergence::closed_kl();
            let closed_try = match &args.mean_n {
                None => divergences::js_symmetrization(&closed, &mean_m, alpha, &p, &q, &cfg),
                Some(n) => {
                    let mean_n = WeightedMean::parse(n).map_err(CliError::from)?;
                    divergences::mn_js(&closed, &mean_m, alpha, &mean_n, beta, &p, &q, &cfg)
                }
            };
            match closed_try {
                Ok(v) => (v, "closed_form", CLOSED_FORM_TOL),
                Err(genjs::Error::Domain(_)) => match &args.mean_n {
                    None => {
                        let est = divergences::oracle_m_jsd(
                            &p.clone().untagged(),
                            &q.clone().untagged(),
                            &mean_m,
                            alpha,
                            &cfg,
                        )
                        .map_err(CliError::from)?;
                        (est.value, "oracle", est.abs_error)
                    }
                    Some(n) => {
                        let mean_n = WeightedMean::parse(n).map_err(CliError::from)?;
                        let v = divergences::mn_js(
                            &Divergence::oracle_kl(cfg),
                            &mean_m,
                            alpha,
                            &mean_n,
                            beta,
                            &p.clone().untagged(),
                            &q.clone().untagged(),
                            &cfg,
                        )
                        .map_err(CliError::from)?;
                        (v, "oracle", cfg.abs_tol)
                    }
                },
                Err(e) => return Err(e.into()),
            }
        }
        "gjs" | "gjs-dual" => {
            let (fam, t1, t2) = gaussian_pair(&d1, &d2)?;
            let v = if name == "gjs" {
                expfam::g_jsd(&fam, &t1, &t2, alpha)
            } else {
                expfam::g_jsd_dual(&fam, &t1, &t2, alpha)
            }
            .map_err(CliError::from)?;
            (v, "closed_form", CLOSED_FORM_TOL)
        }
        "hjs" => {
            let g1 = d1
                .as_cauchy_scale()
                .map_err(|e| CliError::Spec(e.to_string()))?;
            let g2 = d2
                .as_cauchy_scale()
                .map_err(|e| CliError::Spec(e.to_string()))?;
            (
                genjs::cauchy::harmonic_jsd(&g1, &g2),
                "closed_form",
                CLOSED_FORM_TOL,
            )
        }
        "bhat" => {
            let v = divergences::bhattacharyya(&p, &q, alpha, args.bhat_reverse, &cfg)
                .map_err(CliError::from)?;
            (v, "oracle", cfg.abs_tol)
        }
        "hellinger" => {
            let v = divergences::hellinger(&p, &q, &cfg).map_err(CliError::from)?;
            (v, "oracle", cfg.abs_tol)
        }
        "alpha-div" => {
            let v = divergences::alpha_divergence(&p, &q, alpha, &cfg).map_err(CliError::from)?;
            (v, "oracle", cfg.abs_tol)
        }
        "k-div" => {
            let v = divergences::k_divergence(&p, &q, alpha, &cfg).map_err(CliError::from)?;
            (v, "oracle", cfg.abs_tol)
        }
        other => {
            return Err(CliError::Spec(format!("unknown divergence {other:?}")));
        }
    };

    let report = DivReport {
        divergence: name,
        value,
        method,
        tolerance,
    };
    emit(&serde_json::to_string(&report).unwrap(), args.out.as_deref())
}

/// Both descriptors as members of one Gaussian family on flat naturals.
fn gaussian_pair(
    d1: &DensityDescriptor,
    d2: &DensityDescriptor,
) -> Result<(ExpFamily, Vec<f64>, Vec<f64>), CliError> {
    let p1 = d1.as_mvn().map_err(|e| CliError::Spec(e.to_string()))?;
    let p2 = d2.as_mvn().map_err(|e| CliError::Spec(e.to_string()))?;
    if p1.dim() != p2.dim() {
        return Err(CliError::Spec(format!(
            "Gaussians of different dimensions: {} vs {}",
            p1.dim(),
            p2.dim()
        )));
    }
    let fam = ExpFamily::mvn(p1.dim());
    let t1 = p1.flat_natural().map_err(CliError::from)?;
    let t2 = p2.flat_natural().map_err(CliError::from)?;
    Ok((fam, t1, t2))
}

#[derive(Args)]
pub struct ChernoffArgs {
    #[command(flatten)]
    oracle: OracleArgs,
    /// Write the JSON report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// The two density specs
    #[arg(num_args = 2)]
    specs: Vec<String>,
}

#[derive(Serialize)]
struct ChernoffReport {
    alpha_star: f64,
    value: f64,
    method: &'static str,
    concavity_violations: usize,
}

pub fn run_chernoff(args: ChernoffArgs) -> Result<(), CliError> {
    if args.specs.len() != 2 {
        return Err(CliError::Spec("chernoff needs exactly two density specs".into()));
    }
    let p = spec::build(&spec::parse_spec(&args.specs[0])?)?;
    let q = spec::build(&spec::parse_spec(&args.specs[1])?)?;
    let res = chernoff_information(&p, &q, &args.oracle.cfg()).map_err(CliError::from)?;
    let report = ChernoffReport {
        alpha_star: res.alpha_star,
        value: res.value,
        method: "oracle",
        concavity_violations: res.concavity_violations,
    };
    emit(&serde_json::to_string(&report).unwrap(), args.out.as_deref())
}
