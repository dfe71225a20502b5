//! Command-line front end for the `supercoherent` library.
//!
//! Each subcommand runs one experiment and writes a [`ResultTable`] as CSV or
//! JSON. Output depends only on the parameters, so repeated runs are
//! byte-identical.

mod config;
mod table;

use std::process::ExitCode;

use nalgebra::Matrix2;
use serde_json::json;
use supercoherent::basis::{enumerate_paths, irrep_table};
use supercoherent::logic::{
    encode, encoded_algebra_dimension, grid_argmax, h8_ground_space, optimal_delta,
    projected_generator,
};
use supercoherent::open_system::{
    temperature_sweep, Couplings, FitOptions, SweepPoint, SweepTemplate,
};
use supercoherent::operators::{collective_hamiltonian, single_spin_operator, LABEL_TOL};
use supercoherent::selection::{
    code_block, error_detection_check, exchange_conjugation_check, selection_rule_scan,
    verify_final_step_identity, FORBIDDEN_TOL, IDENTITY_TOL,
};
use supercoherent::{Axis, HalfInt, HamiltonianForm, SystemSpec, C64};
use thiserror::Error;

pub use config::{parse_config, Experiment, ExperimentConfig};
pub use table::{emit_results, format_sig, Cell, Format, Meta, ResultTable};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Clap(clap::Error),
    #[error("usage: {0}")]
    Usage(String),
    #[error("{context}: {source}")]
    Numerical {
        context: &'static str,
        #[source]
        source: supercoherent::Error,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Clap(e) if !e.use_stderr() => 0,
            CliError::Clap(_) | CliError::Usage(_) => 2,
            CliError::Numerical { .. } => 3,
            CliError::Io { .. } => 1,
        }
    }

    fn module(context: &'static str) -> impl Fn(supercoherent::Error) -> CliError {
        move |source| match source {
            supercoherent::Error::InvalidArgument(msg) => {
                CliError::Usage(format!("{context}: {msg}"))
            }
            supercoherent::Error::DimensionMismatch { .. } => {
                CliError::Usage(format!("{context}: {source}"))
            }
            _ => CliError::Numerical { context, source },
        }
    }
}

/// Parses `args`, runs the experiment and writes the result.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let outcome = parse_config(args).and_then(|cfg| {
        let table = run_experiment(&cfg)?;
        emit_results(&table, cfg.format, cfg.out.as_deref())
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Clap(e)) => {
            let _ = e.print();
            ExitCode::from(CliError::Clap(e).exit_code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ResultTable, CliError> {
    let meta = Meta {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        subcommand: cfg.experiment.name().to_string(),
        config: cfg.params.clone(),
        timestamp: std::env::var("SOURCE_DATE_EPOCH").ok(),
    };
    match cfg.experiment {
        Experiment::Spectrum => spectrum(cfg, meta),
        Experiment::Paths => paths(cfg, meta),
        Experiment::Selection => selection(cfg, meta),
        Experiment::Lindblad => lindblad(cfg, meta),
        Experiment::Fidelity => fidelity(cfg, meta),
    }
}

fn spectrum(cfg: &ExperimentConfig, meta: Meta) -> Result<ResultTable, CliError> {
    let err = CliError::module("spectrum");
    let n = cfg.get_usize("n").unwrap_or(4);
    let delta = cfg.get_f64("delta").unwrap_or(1.0);
    let spec = SystemSpec::new(n, delta).map_err(&err)?;
    if delta <= 0.0 {
        return Err(CliError::Usage("spectrum: `delta` must be positive".into()));
    }
    let h = collective_hamiltonian(&spec, HamiltonianForm::SpinSquared).map_err(&err)?;
    let energies = h.eigenvalues().map_err(&err)?;

    let mut table = ResultTable::new(meta, &["J", "E", "multiplicity"]);
    let mut start = 0;
    while start < energies.len() {
        let e0 = energies[start];
        let end = start
            + energies[start..]
                .iter()
                .take_while(|e| (*e - e0).abs() < LABEL_TOL * delta.max(1.0))
                .count();
        let mean = energies[start..end].iter().sum::<f64>() / (end - start) as f64;
        // E = (Δ/2) J(J+1)
        let j_real = 0.5 * ((1.0 + 8.0 * mean / delta).max(0.0).sqrt() - 1.0);
        let j = HalfInt::from_f64(j_real, 1e-6).map_err(&err)?;
        let level = 0.5 * delta * j.casimir();
        if (level - mean).abs() > LABEL_TOL * delta.max(1.0) {
            return Err(CliError::Numerical {
                context: "spectrum",
                source: supercoherent::Error::Estimation(format!(
                    "level {mean} is not of the form (Δ/2)J(J+1)"
                )),
            });
        }
        table.push(vec![
            j.to_string().into(),
            level.into(),
            (end - start).into(),
        ]);
        start = end;
    }
    if cfg.verbose {
        let pairwise =
            collective_hamiltonian(&spec, HamiltonianForm::PairwiseHeisenberg).map_err(&err)?;
        table.details = Some(json!({ "max_form_difference": h.max_abs_diff(&pairwise) }));
    }
    Ok(table)
}

fn paths(cfg: &ExperimentConfig, meta: Meta) -> Result<ResultTable, CliError> {
    let err = CliError::module("paths");
    let n = cfg.get_usize("n").unwrap_or(4);
    let rows = irrep_table(n).map_err(&err)?.rows;
    let only = match cfg.get_text("j") {
        Some(s) => Some(
            s.parse::<HalfInt>()
                .map_err(|e| CliError::Usage(format!("key `j`: {e}")))?,
        ),
        None => None,
    };
    if let Some(j) = only {
        if !rows.iter().any(|r| r.j == j) {
            return Err(CliError::Usage(format!(
                "paths: J = {j} does not occur for n = {n}"
            )));
        }
    }
    let mut table = ResultTable::new(meta, &["n", "J", "multiplicity", "path"]);
    for row in rows.iter().filter(|r| only.map_or(true, |j| r.j == j)) {
        for path in enumerate_paths(n, row.j) {
            table.push(vec![
                n.into(),
                row.j.to_string().into(),
                row.multiplicity.into(),
                path.to_string().into(),
            ]);
        }
    }
    Ok(table)
}

fn parse_axis(cfg: &ExperimentConfig) -> Result<Vec<Axis>, CliError> {
    match cfg.get_text("axis") {
        Some(s) => Ok(vec![s
            .parse()
            .map_err(|e| CliError::Usage(format!("key `axis`: {e}")))?]),
        None => Ok(Axis::ALL.to_vec()),
    }
}

/// `‖B − (tr B / 2) 𝐈‖_F`
fn non_scalar_part(b: &Matrix2<C64>) -> f64 {
    (b - Matrix2::identity() * (b.trace() / C64::from(2.0))).norm()
}

fn selection(cfg: &ExperimentConfig, meta: Meta) -> Result<ResultTable, CliError> {
    let err = CliError::module("selection");
    let n = cfg.get_usize("n").unwrap_or(4);
    if !(2..=8).contains(&n) {
        return Err(CliError::Usage(format!(
            "selection: `n` must lie in 2..=8, got {n}"
        )));
    }
    let qubits: Vec<usize> = match cfg.get_usize("qubit") {
        Some(q) if (1..=n).contains(&q) => vec![q],
        Some(q) => {
            return Err(CliError::Usage(format!(
                "selection: `qubit` must lie in 1..={n}, got {q}"
            )))
        }
        None => (1..=n).collect(),
    };
    let axes = parse_axis(cfg)?;

    let mut table = ResultTable::new(
        meta,
        &["rule", "qubit", "axis", "value", "threshold", "pass"],
    );
    let mut details = Vec::new();
    let push = |table: &mut ResultTable,
                rule: &str,
                qubit: usize,
                axis: &str,
                value: f64,
                threshold: f64,
                pass: bool| {
        table.push(vec![
            rule.into(),
            qubit.into(),
            axis.into(),
            value.into(),
            threshold.into(),
            pass.into(),
        ]);
    };

    // the identity concerns the last qubit of a k-qubit register, for every k up to n
    for k in 2..=n {
        for &axis in &axes {
            let r = verify_final_step_identity(k, axis).map_err(&err)?;
            push(
                &mut table,
                "final_step_identity",
                k,
                &axis.to_string(),
                r,
                IDENTITY_TOL,
                r < IDENTITY_TOL,
            );
        }
    }
    for &i in &qubits {
        for &axis in &axes {
            let report = selection_rule_scan(n, i, axis).map_err(&err)?;
            let a = axis.to_string();
            let f = report.max_forbidden_delta_j;
            push(
                &mut table,
                "delta_j_at_most_1",
                i,
                &a,
                f,
                FORBIDDEN_TOL,
                f < FORBIDDEN_TOL,
            );
            let g = report.max_ground_block;
            push(
                &mut table,
                "ground_block_vanishes",
                i,
                &a,
                g,
                FORBIDDEN_TOL,
                g < FORBIDDEN_TOL,
            );
            let o = report.max_ground_to_other;
            push(
                &mut table,
                "ground_connects_to_j1_only",
                i,
                &a,
                o,
                FORBIDDEN_TOL,
                o < FORBIDDEN_TOL,
            );
            if cfg.verbose {
                details.push(serde_json::to_value(&report).expect("report serializes"));
            }
        }
    }
    if n == 4 {
        let report = error_detection_check().map_err(&err)?;
        for (i, axis, norm) in &report.blocks {
            if qubits.contains(i) && axes.contains(axis) {
                push(
                    &mut table,
                    "code_block_vanishes",
                    *i,
                    &axis.to_string(),
                    *norm,
                    FORBIDDEN_TOL,
                    *norm < FORBIDDEN_TOL,
                );
            }
        }
        let zz = &single_spin_operator(Axis::Z, 1, 4).map_err(&err)?
            * &single_spin_operator(Axis::Z, 2, 4).map_err(&err)?;
        let off = non_scalar_part(&code_block(&zz).map_err(&err)?);
        push(
            &mut table,
            "two_qubit_block_not_scalar",
            1,
            "zz",
            off,
            FORBIDDEN_TOL,
            off > FORBIDDEN_TOL,
        );

        let dim = encoded_algebra_dimension().map_err(&err)? as f64;
        push(
            &mut table,
            "encoded_algebra_dimension",
            0,
            "-",
            dim,
            3.0,
            dim == 3.0,
        );
        let e12 = projected_generator(1, 2).map_err(&err)?;
        let off = (e12 - Matrix2::new(-1.0, 0.0, 0.0, 1.0).map(C64::from)).norm();
        push(
            &mut table,
            "projected_exchange_12_is_minus_z",
            1,
            "-",
            off,
            IDENTITY_TOL,
            off < IDENTITY_TOL,
        );
    }
    if n == 8 {
        let ground = h8_ground_space().map_err(&err)?;
        let dim = ground.dimension as f64;
        push(
            &mut table,
            "ground_space_dimension",
            0,
            "-",
            dim,
            14.0,
            ground.dimension == 14,
        );
        for (k, r) in ground.product_residuals.iter().enumerate() {
            let ab = format!("{}{}", k / 2, k % 2);
            push(
                &mut table,
                "logical_product_in_ground_space",
                0,
                &ab,
                *r,
                IDENTITY_TOL,
                *r < IDENTITY_TOL,
            );
        }
        for ((i, j), r) in &ground.exchange_residuals {
            let pair = format!("{i}-{j}");
            push(
                &mut table,
                "exchange_preserves_ground_space",
                *i,
                &pair,
                *r,
                IDENTITY_TOL,
                *r < IDENTITY_TOL,
            );
        }
    }
    for &i in qubits.iter().filter(|&&i| i < n) {
        for &axis in &axes {
            let r = exchange_conjugation_check(i, n, axis).map_err(&err)?;
            push(
                &mut table,
                "exchange_conjugation",
                i,
                &axis.to_string(),
                r,
                FORBIDDEN_TOL,
                r < FORBIDDEN_TOL,
            );
        }
    }

    let failures = table
        .rows
        .iter()
        .filter(|r| r[5] != Cell::Bool(true))
        .count();
    table.push(vec![
        "all".into(),
        0usize.into(),
        "-".into(),
        (failures as f64).into(),
        0.0.into(),
        (failures == 0).into(),
    ]);
    if cfg.verbose {
        table.details = Some(json!({ "scans": details }));
    }
    Ok(table)
}

/// `d ln Γ / d(βΔ)` from neighboring rows; NaN where undefined.
fn local_slopes(points: &[SweepPoint], delta: f64) -> Vec<f64> {
    let k = points.len();
    (0..k)
        .map(|i| {
            if k < 2 {
                return f64::NAN;
            }
            let (a, b) = if i == 0 {
                (0, 1)
            } else if i == k - 1 {
                (k - 2, k - 1)
            } else {
                (i - 1, i + 1)
            };
            let (pa, pb) = (&points[a], &points[b]);
            let dx = (pb.beta - pa.beta) * delta;
            if pa.gamma <= 0.0 || pb.gamma <= 0.0 || dx == 0.0 {
                return f64::NAN;
            }
            (pb.gamma.ln() - pa.gamma.ln()) / dx
        })
        .collect()
}

fn lindblad(cfg: &ExperimentConfig, meta: Meta) -> Result<ResultTable, CliError> {
    let err = CliError::module("lindblad");
    let n = cfg.get_usize("n").unwrap_or(4);
    let delta = cfg.get_f64("delta").unwrap_or(1.0);
    let betas = match (cfg.get_f64("beta"), cfg.get_list("beta-list")) {
        (Some(b), _) => vec![b],
        (None, Some(list)) => list,
        (None, None) => {
            return Err(CliError::Usage(
                "lindblad: `beta` or `beta-list` is required".into(),
            ))
        }
    };
    let g = cfg.get_f64("g").unwrap_or(0.1);
    let amplitudes = cfg
        .get_list("state")
        .unwrap_or_else(|| vec![1.0, 0.0, 0.0, 0.0]);
    let [ra, ia, rb, ib] = amplitudes[..] else {
        return Err(CliError::Usage(format!(
            "key `state` needs 4 numbers, got {}",
            amplitudes.len()
        )));
    };
    let state = encode(C64::new(ra, ia), C64::new(rb, ib)).map_err(&err)?;
    let template = SweepTemplate {
        spec: SystemSpec::new(n, delta).map_err(&err)?,
        couplings: Couplings::uniform(g),
        gamma0: cfg.get_f64("gamma0"),
        state: state.vector,
        fit: FitOptions {
            window: cfg.get_f64("t-final"),
            dt: cfg.get_f64("dt"),
        },
    };
    let points = temperature_sweep(&template, &betas).map_err(&err)?;
    let slopes = local_slopes(&points, delta);

    let mut table = ResultTable::new(meta, &["beta", "gamma_fit", "n_thermal", "slope_check"]);
    for (p, s) in points.iter().zip(slopes) {
        table.push(vec![
            p.beta.into(),
            p.gamma.into(),
            p.n_thermal.into(),
            s.into(),
        ]);
    }
    if cfg.verbose {
        let fits: Vec<_> = points
            .iter()
            .map(|p| json!({ "beta": p.beta, "fit": p.fit }))
            .collect();
        table.details = Some(json!({ "fits": fits }));
    }
    Ok(table)
}

fn fidelity(cfg: &ExperimentConfig, meta: Meta) -> Result<ResultTable, CliError> {
    let err = CliError::module("fidelity");
    let gap = cfg.get_f64("delta").unwrap_or(1.0);
    let betas = cfg
        .get_list("beta-list")
        .unwrap_or_else(|| vec![1.0, 2.0, 5.0]);
    let step = cfg.get_f64("delta-step").unwrap_or(1e-3 * gap);
    let max = cfg.get_f64("delta-max").unwrap_or(gap);
    let mut table = ResultTable::new(
        meta,
        &[
            "beta",
            "delta_opt_numeric",
            "delta_opt_analytic",
            "F_at_opt",
        ],
    );
    for beta in betas {
        let (best, f) = grid_argmax(gap, beta, step, max).map_err(&err)?;
        let analytic = optimal_delta(beta).map_err(&err)?;
        table.push(vec![beta.into(), best.into(), analytic.into(), f.into()]);
    }
    Ok(table)
}
