//! `genjs paper-table`: reproduces the library's reference numbers — the
//! worked 2D Gaussian conversions and geometric JSD values, the harmonic
//! Cauchy JSD examples, and the normalizer table (arithmetic / geometric /
//! harmonic mean vs. matching family) evaluated on sample inputs, each
//! checked against its expected value.

use clap::Args;
use serde::Serialize;

use genjs::cauchy::{self, CauchyScale};
use genjs::divergences;
use genjs::expfam::{self, ExpFamily, MvnParam};
use genjs::means::WeightedMean;
use genjs::oracle::Density;

use crate::{CliError, OracleArgs};

#[derive(Args)]
pub struct PaperTableArgs {
    /// Emit JSON rows instead of the text table
    #[arg(long, default_value_t = false)]
    json: bool,
    #[command(flatten)]
    oracle: OracleArgs,
}

#[derive(Serialize)]
struct Row {
    quantity: String,
    value: f64,
    expected: f64,
    tolerance: f64,
    pass: bool,
}

fn row(quantity: &str, value: f64, expected: f64, tolerance: f64) -> Row {
    Row {
        quantity: quantity.to_string(),
        value,
        expected,
        tolerance,
        pass: (value - expected).abs() <= tolerance,
    }
}

pub fn run(args: PaperTableArgs) -> Result<(), CliError> {
    let cfg = args.oracle.cfg();
    let mut rows: Vec<Row> = Vec::new();

    // worked 2D Gaussian example: conversions are exact rationals
    let p1 = MvnParam::ordinary(vec![0.0, 0.0], vec![vec![1.0, 0.0], vec![0.0, 1.0]])
        .map_err(CliError::from)?;
    let p2 = MvnParam::ordinary(vec![1.0, 2.0], vec![vec![1.0, -1.0], vec![-1.0, 2.0]])
        .map_err(CliError::from)?;
    let n2 = p2.to_natural().map_err(CliError::from)?;
    let (tv, tm) = n2.parts();
    rows.push(row("theta_v[0]", tv[0], 4.0, 1e-12));
    rows.push(row("theta_v[1]", tv[1], 3.0, 1e-12));
    rows.push(row("theta_M[0][0]", tm[(0, 0)], 1.0, 1e-12));
    rows.push(row("theta_M[0][1]", tm[(0, 1)], 0.5, 1e-12));
    rows.push(row("theta_M[1][1]", tm[(1, 1)], 0.5, 1e-12));
    let e2 = p2.to_expectation().map_err(CliError::from)?;
    let (ev, em) = e2.parts();
    rows.push(row("eta_v[0]", ev[0], 1.0, 1e-12));
    rows.push(row("eta_v[1]", ev[1], 2.0, 1e-12));
    rows.push(row("eta_M[0][0]", em[(0, 0)], -2.0, 1e-12));
    rows.push(row("eta_M[0][1]", em[(0, 1)], -1.0, 1e-12));
    rows.push(row("eta_M[1][1]", em[(1, 1)], -6.0, 1e-12));
    let mix = expfam::mvn::g_mixture_param(&p1, &p2, 0.5).map_err(CliError::from)?;
    let (mv, mm) = mix.parts();
    rows.push(row("lambda_alpha mu[0]", mv[0], 1.0, 1e-12));
    rows.push(row("lambda_alpha mu[1]", mv[1], 1.0, 1e-12));
    rows.push(row("lambda_alpha Sigma[0][0]", mm[(0, 0)], 0.8, 1e-12));
    rows.push(row("lambda_alpha Sigma[0][1]", mm[(0, 1)], -0.4, 1e-12));
    rows.push(row("lambda_alpha Sigma[1][1]", mm[(1, 1)], 1.2, 1e-12));

    let fam2 = ExpFamily::mvn(2);
    let t1 = p1.flat_natural().map_err(CliError::from)?;
    let t2 = p2.flat_natural().map_err(CliError::from)?;
    rows.push(row(
        "G-JSD (KL)",
        expfam::g_jsd(&fam2, &t1, &t2, 0.5).map_err(CliError::from)?,
        1.26343,
        1e-4,
    ));
    rows.push(row(
        "G-JSD (reverse KL)",
        expfam::g_jsd_dual(&fam2, &t1, &t2, 0.5).map_err(CliError::from)?,
        0.86157,
        1e-4,
    ));

    // harmonic Cauchy JSD examples
    let g = |v: f64| CauchyScale::new(v).map_err(CliError::from);
    rows.push(row(
        "JS^H(0.1, 0.5)",
        cauchy::harmonic_jsd(&g(0.1)?, &g(0.5)?),
        0.176,
        1e-3,
    ));
    rows.push(row(
        "JS^H(0.2, 0.8)",
        cauchy::harmonic_jsd(&g(0.2)?, &g(0.8)?),
        0.129,
        1e-3,
    ));

    // normalizer table on sample inputs, each mean against its family
    let c1 = g(0.3)?.density().untagged();
    let c2 = g(1.1)?.density().untagged();
    let z_a = divergences::numeric_mixture_z(&c1, &c2, &WeightedMean::Arithmetic, 0.4, &cfg)
        .map_err(CliError::from)?;
    rows.push(row("Z^A (mixture family)", z_a.value, 1.0, 1e-7));

    let fam1 = ExpFamily::mvn(1);
    let q1 = MvnParam::ordinary(vec![-0.4], vec![vec![0.8]]).map_err(CliError::from)?;
    let q2 = MvnParam::ordinary(vec![0.9], vec![vec![1.6]]).map_err(CliError::from)?;
    let z_closed = expfam::z_geometric(
        &fam1,
        &q1.flat_natural().map_err(CliError::from)?,
        &q2.flat_natural().map_err(CliError::from)?,
        0.4,
    )
    .map_err(CliError::from)?;
    let z_quad: Density = q1.density().map_err(CliError::from)?.untagged();
    let z_g = divergences::numeric_mixture_z(
        &z_quad,
        &q2.density().map_err(CliError::from)?.untagged(),
        &WeightedMean::Geometric,
        0.4,
        &cfg,
    )
    .map_err(CliError::from)?;
    rows.push(row(
        "Z^G (exponential family) = exp(-J)",
        z_g.value,
        z_closed,
        1e-7,
    ));

    let (_, z_h_closed) = cauchy::harmonic_mixture(&g(0.3)?, &g(1.1)?, 0.4).map_err(CliError::from)?;
    let z_h = divergences::numeric_mixture_z(&c1, &c2, &WeightedMean::Harmonic, 0.4, &cfg)
        .map_err(CliError::from)?;
    rows.push(row(
        "Z^H (Cauchy scale family)",
        z_h.value,
        z_h_closed,
        1e-7,
    ));

    let failures = rows.iter().filter(|r| !r.pass).count();
    if args.json {
        for r in &rows {
            println!("{}", serde_json::to_string(r).unwrap());
        }
    } else {
        println!(
            "{:<38} {:>14} {:>14} {:>9} {:>5}",
            "quantity", "value", "expected", "tol", "pass"
        );
        for r in &rows {
            println!(
                "{:<38} {:>14.8} {:>14.8} {:>9.0e} {:>5}",
                r.quantity, r.value, r.expected, r.tolerance, r.pass
            );
        }
    }
    if failures > 0 {
        return Err(CliError::Verification(format!(
            "{failures} of {} reference values deviate beyond tolerance",
            rows.len()
        )));
    }
    Ok(())
}
