//! `genjs verify`: closed-form-vs-oracle suites with one JSON line per case
//! and a nonzero exit on any mismatch.

use clap::Args;
use serde::Serialize;

use genjs::cauchy::{self, CauchyScale};
use genjs::divergences::{self, categorical_jsd, oracle_m_jsd, Divergence};
use genjs::expfam::{self, ExpFamily, MvnParam};
use genjs::means::WeightedMean;
use genjs::oracle::OracleCfg;
use genjs::wmixture::WMixtureFamily;

use crate::{CliError, OracleArgs};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Args)]
pub struct VerifyArgs {
    /// Suite: gjs-mvn, hjs-cauchy, bhat-jensen, wmix-jsd, all
    suite: String,
    /// Gaussian dimension for gjs-mvn (1 = quadrature, 2 = Monte Carlo)
    #[arg(long, default_value_t = 1)]
    dim: usize,
    /// Number of random pairs per suite
    #[arg(long, default_value_t = 20)]
    pairs: usize,
    #[command(flatten)]
    oracle: OracleArgs,
}

#[derive(Serialize)]
struct Case {
    suite: &'static str,
    case: String,
    closed: f64,
    oracle: f64,
    abs_diff: f64,
    tol: f64,
    pass: bool,
}

struct Tally {
    cases: usize,
    failures: usize,
}

impl Tally {
    fn new() -> Self {
        Tally {
            cases: 0,
            failures: 0,
        }
    }

    fn record(&mut self, case: Case) {
        self.cases += 1;
        if !case.pass {
            self.failures += 1;
        }
        println!("{}", serde_json::to_string(&case).unwrap());
    }
}

fn uniform(r: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * r.random::<f64>()
}

fn random_mvn(r: &mut ChaCha8Rng, d: usize) -> MvnParam {
    let mu: Vec<f64> = (0..d).map(|_| uniform(r, -1.5, 1.5)).collect();
    let a: Vec<Vec<f64>> = (0..d)
        .map(|_| (0..d).map(|_| uniform(r, -0.7, 0.7)).collect())
        .collect();
    let mut sigma = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in 0..d {
            let mut v = if i == j { 0.4 } else { 0.0 };
            for row in &a {
                v += row[i] * row[j];
            }
            sigma[i][j] = v;
        }
    }
    MvnParam::ordinary(mu, sigma).expect("positive-definite by construction")
}

pub fn run(args: VerifyArgs) -> Result<(), CliError> {
    let cfg = args.oracle.cfg();
    let mut tally = Tally::new();
    let suite = args.suite.to_ascii_lowercase();
    match suite.as_str() {
        "gjs-mvn" => gjs_mvn(&mut tally, &args, &cfg)?,
        "hjs-cauchy" => hjs_cauchy(&mut tally, &args, &cfg)?,
        "bhat-jensen" => bhat_jensen(&mut tally, &args, &cfg)?,
        "wmix-jsd" => wmix_jsd(&mut tally, &args, &cfg)?,
        "all" => {
            gjs_mvn(&mut tally, &args, &cfg)?;
            hjs_cauchy(&mut tally, &args, &cfg)?;
            bhat_jensen(&mut tally, &args, &cfg)?;
            wmix_jsd(&mut tally, &args, &cfg)?;
        }
        other => return Err(CliError::Spec(format!("unknown suite {other:?}"))),
    }
    println!(
        "{}",
        serde_json::json!({
            "suite": "summary",
            "cases": tally.cases,
            "failures": tally.failures,
        })
    );
    if tally.failures > 0 {
        return Err(CliError::Verification(format!(
            "{} of {} cases failed",
            tally.failures, tally.cases
        )));
    }
    Ok(())
}

/// Closed-form geometric JSD vs the fully numeric M-JSD.
fn gjs_mvn(tally: &mut Tally, args: &VerifyArgs, cfg: &OracleCfg) -> Result<(), CliError> {
    let d = args.dim;
    if !(1..=3).contains(&d) {
        return Err(CliError::Spec(format!("gjs-mvn supports dim 1..=3, got {d}")));
    }
    let fam = ExpFamily::mvn(d);
    let mut r = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(101));
    for i in 0..args.pairs {
        let p1 = random_mvn(&mut r, d);
        let p2 = random_mvn(&mut r, d);
        let alpha = uniform(&mut r, 0.15, 0.85);
        let closed = expfam::g_jsd(
            &fam,
            &p1.flat_natural().map_err(CliError::from)?,
            &p2.flat_natural().map_err(CliError::from)?,
            alpha,
        )
        .map_err(CliError::from)?;
        let est = oracle_m_jsd(
            &p1.density().map_err(CliError::from)?.untagged(),
            &p2.density().map_err(CliError::from)?.untagged(),
            &WeightedMean::Geometric,
            alpha,
            &cfg.with_seed(cfg.seed.wrapping_add(i as u64)),
        )
        .map_err(CliError::from)?;
        let abs_diff = (closed - est.value).abs();
        let tol = if d == 1 { 1e-7 } else { 3.0 * est.abs_error };
        tally.record(Case {
            suite: "gjs-mvn",
            case: format!("d={d} pair {i} alpha={alpha:.3}"),
            closed,
            oracle: est.value,
            abs_diff,
            tol,
            pass: abs_diff <= tol,
        });
    }
    Ok(())
}

/// Eq-ZH normalizer and the skew harmonic JSD against quadrature.
fn hjs_cauchy(tally: &mut Tally, args: &VerifyArgs, cfg: &OracleCfg) -> Result<(), CliError> {
    let mut r = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(202));
    for i in 0..args.pairs {
        let g1 = CauchyScale::new(10f64.powf(uniform(&mut r, -1.3, 0.3))).map_err(CliError::from)?;
        let g2 = CauchyScale::new(10f64.powf(uniform(&mut r, -1.3, 0.3))).map_err(CliError::from)?;
        let alpha = uniform(&mut r, 0.1, 0.9);

        let (member, z_closed) =
            cauchy::harmonic_mixture(&g1, &g2, alpha).map_err(CliError::from)?;
        let z_quad = divergences::numeric_mixture_z(
            &g1.density().untagged(),
            &g2.density().untagged(),
            &WeightedMean::Harmonic,
            alpha,
            cfg,
        )
        .map_err(CliError::from)?;
        let dz = (z_closed - z_quad.value).abs();
        tally.record(Case {
            suite: "hjs-cauchy",
            case: format!("Z pair {i} alpha={alpha:.3}"),
            closed: z_closed,
            oracle: z_quad.value,
            abs_diff: dz,
            tol: 1e-7,
            pass: dz <= 1e-7,
        });

        let closed =
            (1.0 - alpha) * cauchy::kl(&g1, &member) + alpha * cauchy::kl(&g2, &member);
        let md = member.density();
        let quad = (1.0 - alpha)
            * divergences::kl(&g1.density(), &md, cfg).map_err(CliError::from)?
            + alpha * divergences::kl(&g2.density(), &md, cfg).map_err(CliError::from)?;
        let dj = (closed - quad).abs();
        tally.record(Case {
            suite: "hjs-cauchy",
            case: format!("JSD pair {i} alpha={alpha:.3}"),
            closed,
            oracle: quad,
            abs_diff: dj,
            tol: 1e-7,
            pass: dj <= 1e-7,
        });
    }
    Ok(())
}

/// Bhattacharyya-Jensen identity on 1D Gaussians.
fn bhat_jensen(tally: &mut Tally, args: &VerifyArgs, cfg: &OracleCfg) -> Result<(), CliError> {
    let fam = ExpFamily::mvn(1);
    let mut r = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(303));
    for i in 0..args.pairs {
        let p1 = random_mvn(&mut r, 1);
        let p2 = random_mvn(&mut r, 1);
        let alpha = uniform(&mut r, 0.1, 0.9);
        let jensen = expfam::jensen_skew(
            &fam,
            &p1.flat_natural().map_err(CliError::from)?,
            &p2.flat_natural().map_err(CliError::from)?,
            alpha,
        )
        .map_err(CliError::from)?
        .value;
        let bhat = divergences::bhattacharyya(
            &p1.density().map_err(CliError::from)?.untagged(),
            &p2.density().map_err(CliError::from)?.untagged(),
            alpha,
            false,
            cfg,
        )
        .map_err(CliError::from)?;
        let abs_diff = (jensen - bhat).abs();
        tally.record(Case {
            suite: "bhat-jensen",
            case: format!("pair {i} alpha={alpha:.3}"),
            closed: jensen,
            oracle: bhat,
            abs_diff,
            tol: 1e-7,
            pass: abs_diff <= 1e-7,
        });
    }
    Ok(())
}

/// Mixture-family Jensen path vs the direct oracle JSD of the mixtures.
fn wmix_jsd(tally: &mut Tally, args: &VerifyArgs, cfg: &OracleCfg) -> Result<(), CliError> {
    let mut r = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(404));

    // categorical half: exact identity
    let fam = WMixtureFamily::categorical(4).map_err(CliError::from)?;
    for i in 0..args.pairs / 2 {
        let draw = |r: &mut ChaCha8Rng| {
            vec![
                uniform(r, 0.05, 0.35),
                uniform(r, 0.05, 0.35),
                uniform(r, 0.05, 0.25),
            ]
        };
        let t1 = draw(&mut r);
        let t2 = draw(&mut r);
        let closed = fam.jsd(&t1, &t2, cfg).map_err(CliError::from)?;
        let to_probs = |t: &[f64]| {
            let rest: f64 = t.iter().sum();
            let mut m = vec![1.0 - rest];
            m.extend_from_slice(t);
            m
        };
        let direct = categorical_jsd(&to_probs(&t1), &to_probs(&t2));
        let abs_diff = (closed - direct).abs();
        tally.record(Case {
            suite: "wmix-jsd",
            case: format!("categorical pair {i}"),
            closed,
            oracle: direct,
            abs_diff,
            tol: 1e-12,
            pass: abs_diff <= 1e-12,
        });
    }

    // continuous half: Gaussian components, quadrature oracle
    let g = ExpFamily::gaussian_fixed_variance();
    let fam = WMixtureFamily::new(vec![
        g.density(&[-1.5]).map_err(CliError::from)?,
        g.density(&[1.0]).map_err(CliError::from)?,
    ])
    .map_err(CliError::from)?;
    for i in 0..(args.pairs - args.pairs / 2).min(5) {
        let t1 = vec![uniform(&mut r, 0.1, 0.45)];
        let t2 = vec![uniform(&mut r, 0.5, 0.9)];
        let closed = fam.jsd(&t1, &t2, cfg).map_err(CliError::from)?;
        let m1 = fam.mixture_density(&t1).map_err(CliError::from)?;
        let m2 = fam.mixture_density(&t2).map_err(CliError::from)?;
        let direct = divergences::js_symmetrization(
            &Divergence::oracle_kl(*cfg),
            &WeightedMean::Arithmetic,
            0.5,
            &m1,
            &m2,
            cfg,
        )
        .map_err(CliError::from)?;
        let abs_diff = (closed - direct).abs();
        tally.record(Case {
            suite: "wmix-jsd",
            case: format!("continuous pair {i}"),
            closed,
            oracle: direct,
            abs_diff,
            tol: 1e-5,
            pass: abs_diff <= 1e-5,
        });
    }
    Ok(())
}
