//! Command-line and config-file parsing.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{Map, Number, Value};

use crate::table::Format;
use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "supercoherent",
    version,
    about = "Exact small-matrix experiments on the four-qubit supercoherent code"
)]
struct Cli {
    /// Output file; stdout when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Flat JSON object of parameters. Flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Attach per-rule details to JSON output.
    #[arg(long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Levels of the collective Hamiltonian with their degeneracies.
    Spectrum(SpectrumArgs),
    /// Coupling paths labeling each irrep copy.
    Paths(PathsArgs),
    /// Selection-rule and error-detection report.
    Selection(SelectionArgs),
    /// Fitted leakage rate against inverse temperature.
    Lindblad(LindbladArgs),
    /// Optimal encoded gate strength against inverse temperature.
    Fidelity(FidelityArgs),
}

#[derive(Debug, Args)]
struct SpectrumArgs {
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    delta: Option<f64>,
}

#[derive(Debug, Args)]
struct PathsArgs {
    #[arg(long)]
    n: Option<u64>,
    /// Restrict to one final spin, e.g. `0` or `3/2`.
    #[arg(long)]
    j: Option<String>,
}

#[derive(Debug, Args)]
struct SelectionArgs {
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    qubit: Option<u64>,
    #[arg(long)]
    axis: Option<String>,
}

#[derive(Debug, Args)]
struct LindbladArgs {
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long = "beta-list", value_delimiter = ',', num_args = 1..)]
    beta_list: Option<Vec<f64>>,
    /// Uniform single-qubit coupling strength.
    #[arg(long)]
    g: Option<f64>,
    /// Rate of the in-sector dephasing channels.
    #[arg(long)]
    gamma0: Option<f64>,
    /// Length of the leakage fit window.
    #[arg(long = "t-final")]
    t_final: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    /// Logical amplitudes as `re_a,im_a,re_b,im_b`.
    #[arg(long, value_delimiter = ',', num_args = 1.., allow_negative_numbers = true)]
    state: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
struct FidelityArgs {
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long = "beta-list", value_delimiter = ',', num_args = 1..)]
    beta_list: Option<Vec<f64>>,
    #[arg(long = "delta-step")]
    delta_step: Option<f64>,
    #[arg(long = "delta-max")]
    delta_max: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Experiment {
    Spectrum,
    Paths,
    Selection,
    Lindblad,
    Fidelity,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Spectrum => "spectrum",
            Experiment::Paths => "paths",
            Experiment::Selection => "selection",
            Experiment::Lindblad => "lindblad",
            Experiment::Fidelity => "fidelity",
        }
    }

    fn default_format(self) -> Format {
        match self {
            Experiment::Selection => Format::Json,
            _ => Format::Csv,
        }
    }

    fn keys(self) -> &'static [(&'static str, Kind)] {
        use Kind::*;
        match self {
            Experiment::Spectrum => &[("n", Count), ("delta", Real)],
            Experiment::Paths => &[("n", Count), ("j", Spin)],
            Experiment::Selection => &[("n", Count), ("qubit", Count), ("axis", Text)],
            Experiment::Lindblad => &[
                ("n", Count),
                ("delta", Real),
                ("beta", Real),
                ("beta-list", RealList),
                ("g", Real),
                ("gamma0", Real),
                ("t-final", Real),
                ("dt", Real),
                ("state", RealList),
            ],
            Experiment::Fidelity => &[
                ("delta", Real),
                ("beta-list", RealList),
                ("delta-step", Real),
                ("delta-max", Real),
            ],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Count,
    Real,
    RealList,
    Text,
    /// A spin written as text (`"3/2"`) or as a number.
    Spin,
}

impl Kind {
    fn accepts(self, v: &Value) -> bool {
        match self {
            Kind::Count => v.as_u64().is_some(),
            Kind::Real => v.is_number(),
            Kind::RealList => v
                .as_array()
                .is_some_and(|a| !a.is_empty() && a.iter().all(Value::is_number)),
            Kind::Text => v.is_string(),
            Kind::Spin => v.is_string() || v.is_number(),
        }
    }

    fn describe(self) -> &'static str {
        match self {
            Kind::Count => "a non-negative integer",
            Kind::Real => "a number",
            Kind::RealList => "a non-empty list of numbers",
            Kind::Text => "a string",
            Kind::Spin => "a spin such as 0, 1 or \"3/2\"",
        }
    }
}

/// A validated request for one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    /// Effective parameters, flags merged over the config file.
    pub params: Map<String, Value>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub verbose: bool,
}

impl ExperimentConfig {
    pub fn get_f64(&self, key: &str) -> Option<f64> {
        self.params.get(key).and_then(Value::as_f64)
    }

    pub fn get_usize(&self, key: &str) -> Option<usize> {
        self.params
            .get(key)
            .and_then(Value::as_u64)
            .map(|v| v as usize)
    }

    pub fn get_list(&self, key: &str) -> Option<Vec<f64>> {
        self.params
            .get(key)
            .and_then(Value::as_array)
            .map(|a| a.iter().filter_map(Value::as_f64).collect())
    }

    pub fn get_text(&self, key: &str) -> Option<String> {
        match self.params.get(key)? {
            Value::String(s) => Some(s.clone()),
            other => Some(other.to_string()),
        }
    }
}

/// Parses arguments (program name first) and an optional config file.
pub fn parse_config<I, T>(args: I) -> Result<ExperimentConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(CliError::Clap)?;
    let (experiment, flags) = flag_values(&cli.command)?;

    let mut params = match &cli.config {
        Some(path) => read_config_file(path)?,
        None => Map::new(),
    };
    let keys = experiment.keys();
    for (key, value) in &params {
        let Some((_, kind)) = keys.iter().find(|(k, _)| k == key) else {
            return Err(CliError::Usage(format!(
                "unknown key `{key}` for `{}`",
                experiment.name()
            )));
        };
        if !kind.accepts(value) {
            return Err(CliError::Usage(format!(
                "key `{key}` must be {}, got {value}",
                kind.describe()
            )));
        }
    }
    // a flag for one form of the temperature input replaces the other form from the file
    for (a, b) in [("beta", "beta-list"), ("beta-list", "beta")] {
        if flags.contains_key(a) {
            params.remove(b);
        }
    }
    params.extend(flags);
    if params.contains_key("beta") && params.contains_key("beta-list") {
        return Err(CliError::Usage(
            "give either `beta` or `beta-list`, not both".into(),
        ));
    }

    Ok(ExperimentConfig {
        experiment,
        params,
        out: cli.out,
        format: cli.format.unwrap_or(experiment.default_format()),
        verbose: cli.verbose,
    })
}

fn read_config_file(path: &PathBuf) -> Result<Map<String, Value>, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    match serde_json::from_str::<Value>(&text) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(CliError::Usage(format!(
            "{}: config must be a flat JSON object",
            path.display()
        ))),
        Err(e) => Err(CliError::Usage(format!("{}: {e}", path.display()))),
    }
}

fn real(key: &str, v: f64) -> Result<Value, CliError> {
    Number::from_f64(v)
        .map(Value::Number)
        .ok_or_else(|| CliError::Usage(format!("`--{key}` must be finite, got {v}")))
}

fn flag_values(cmd: &Command) -> Result<(Experiment, Map<String, Value>), CliError> {
    let mut m = Map::new();
    let count = |m: &mut Map<String, Value>, key: &str, v: Option<u64>| {
        if let Some(v) = v {
            m.insert(key.into(), Value::from(v));
        }
    };
    let reals =
        |m: &mut Map<String, Value>, pairs: &[(&str, Option<f64>)]| -> Result<(), CliError> {
            for (key, v) in pairs {
                if let Some(v) = v {
                    m.insert(key.to_string(), real(key, *v)?);
                }
            }
            Ok(())
        };
    let list =
        |m: &mut Map<String, Value>, key: &str, v: &Option<Vec<f64>>| -> Result<(), CliError> {
            if let Some(v) = v {
                let items = v
                    .iter()
                    .map(|x| real(key, *x))
                    .collect::<Result<Vec<_>, _>>()?;
                m.insert(key.into(), Value::Array(items));
            }
            Ok(())
        };
    let experiment = match cmd {
        Command::Spectrum(a) => {
            count(&mut m, "n", a.n);
            reals(&mut m, &[("delta", a.delta)])?;
            Experiment::Spectrum
        }
        Command::Paths(a) => {
            count(&mut m, "n", a.n);
            if let Some(j) = &a.j {
                m.insert("j".into(), Value::from(j.clone()));
            }
            Experiment::Paths
        }
        Command::Selection(a) => {
            count(&mut m, "n", a.n);
            count(&mut m, "qubit", a.qubit);
            if let Some(axis) = &a.axis {
                m.insert("axis".into(), Value::from(axis.clone()));
            }
            Experiment::Selection
        }
        Command::Lindblad(a) => {
            count(&mut m, "n", a.n);
            reals(
                &mut m,
                &[
                    ("delta", a.delta),
                    ("beta", a.beta),
                    ("g", a.g),
                    ("gamma0", a.gamma0),
                    ("t-final", a.t_final),
                    ("dt", a.dt),
                ],
            )?;
            list(&mut m, "beta-list", &a.beta_list)?;
            list(&mut m, "state", &a.state)?;
            Experiment::Lindblad
        }
        Command::Fidelity(a) => {
            reals(
                &mut m,
                &[
                    ("delta", a.delta),
                    ("delta-step", a.delta_step),
                    ("delta-max", a.delta_max),
                ],
            )?;
            list(&mut m, "beta-list", &a.beta_list)?;
            Experiment::Fidelity
        }
    };
    Ok((experiment, m))
}
