mod commands;
mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;
use wkb::config::{ExperimentConfig, Radii, Spacing};
use wkb::experiments::Prop;

#[derive(Parser, Debug)]
#[command(
    name = "wkb",
    version,
    about = "Large-R asymptotics of Fenchel-Nielsen coordinates on the 5-punctured sphere"
)]
pub struct Cli {
    /// JSON config file; defaults to $WKB_CONFIG when set.
    #[arg(long, global = true, env = "WKB_CONFIG")]
    config: Option<PathBuf>,
    /// Write the result here instead of stdout.
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    command: Command,
}

/// Fields overriding the config file.
#[derive(Args, Debug, Default)]
pub struct Overrides {
    #[arg(long, global = true)]
    k: Option<f64>,
    #[arg(long = "eps", global = true)]
    epsilon: Option<f64>,
    /// Coefficient a as `re` or `re,im`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    a: Option<String>,
    /// Coefficient b as `re` or `re,im`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    b: Option<String>,
    /// Radii `s2,s3,s4`.
    #[arg(long, global = true)]
    radii: Option<String>,
    /// Holonomy phases `h1,h2,h3,h4`; replaces the configured list.
    #[arg(long, global = true, allow_hyphen_values = true)]
    holonomy: Option<String>,
    #[arg(long, global = true)]
    r_min: Option<f64>,
    #[arg(long, global = true)]
    r_max: Option<f64>,
    #[arg(long, global = true)]
    r_count: Option<usize>,
    #[arg(long, global = true, value_enum)]
    spacing: Option<SpacingArg>,
    /// Orientation signs `s1,s2,s3,s4`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    orientation: Option<String>,
    /// Tolerance `key=value`; repeatable.
    #[arg(long = "tol", global = true)]
    tolerances: Vec<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SpacingArg {
    Linear,
    Log,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum PropArg {
    RhXi,
    L2,
    L3,
    Twist2,
    Twist3,
}

impl From<PropArg> for Prop {
    fn from(p: PropArg) -> Prop {
        match p {
            PropArg::RhXi => Prop::RhXi,
            PropArg::L2 => Prop::L2,
            PropArg::L3 => Prop::L3,
            PropArg::Twist2 => Prop::Twist2,
            PropArg::Twist3 => Prop::Twist3,
        }
    }
}

/// Differential an experiment runs on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum At {
    /// q = (a z + b) dz^2 / prod(z - t_j) with the configured a, b.
    Coefficients,
    /// The corner point q* of the Legendre family.
    Qstar,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum KindArg {
    Logarithmic,
    Ramification,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Periods of the configured differential (JSON).
    Periods,
    /// Fiducial profile r, m, r dm/dr (CSV).
    Fiducial {
        #[arg(long, default_value_t = 100.0)]
        r: f64,
        #[arg(long, value_enum, default_value_t = KindArg::Logarithmic)]
        kind: KindArg,
    },
    /// Coordinates and predictions at one R (JSON).
    Monodromy {
        #[arg(long, default_value_t = 1e4)]
        r: f64,
        #[arg(long, value_enum, default_value_t = At::Qstar)]
        at: At,
    },
    /// Computed against predicted values along the R grid (CSV).
    Converge {
        #[arg(long, value_enum)]
        prop: PropArg,
        /// Defaults to the coefficients for rh-xi, l2, l3 and to q* for twists.
        #[arg(long, value_enum)]
        at: Option<At>,
    },
    /// The corner point q* (JSON).
    FindQstar,
    /// Sweep of one holonomy phase against the tracked coordinate phases (CSV).
    Winding {
        /// Phase index 1..4 (h1 .. h4).
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        phase: u8,
        #[arg(long, default_value_t = 1e4)]
        r: f64,
        #[arg(long, default_value_t = 64)]
        samples: usize,
        #[arg(long, value_enum, default_value_t = At::Qstar)]
        at: At,
    },
}

/// Failure with its exit code: 1 numeric, 2 configuration.
#[derive(Debug)]
pub enum CliError {
    Numeric(String),
    Config(String),
}

impl From<wkb::Error> for CliError {
    fn from(e: wkb::Error) -> Self {
        match e {
            wkb::Error::Config(m) => CliError::Config(m),
            other => CliError::Numeric(other.to_string()),
        }
    }
}

fn parse_list(s: &str, n: usize, what: &str) -> Result<Vec<f64>, CliError> {
    let v: Result<Vec<f64>, _> = s.split(',').map(|x| x.trim().parse::<f64>()).collect();
    match v {
        Ok(v) if v.len() == n => Ok(v),
        _ => Err(CliError::Config(format!(
            "{what} expects {n} comma-separated numbers, got '{s}'"
        ))),
    }
}

fn parse_complex(s: &str, what: &str) -> Result<[f64; 2], CliError> {
    let v: Result<Vec<f64>, _> = s.split(',').map(|x| x.trim().parse::<f64>()).collect();
    match v.as_deref() {
        Ok([re]) => Ok([*re, 0.0]),
        Ok([re, im]) => Ok([*re, *im]),
        _ => Err(CliError::Config(format!(
            "{what} expects 're' or 're,im', got '{s}'"
        ))),
    }
}

pub fn load_config(path: Option<&PathBuf>, o: &Overrides) -> Result<ExperimentConfig, CliError> {
    let mut c = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(k) = o.k {
        c.k = k;
    }
    if let Some(e) = o.epsilon {
        c.epsilon = e;
    }
    if let Some(a) = &o.a {
        c.a = parse_complex(a, "--a")?;
    }
    if let Some(b) = &o.b {
        c.b = parse_complex(b, "--b")?;
    }
    if let Some(r) = &o.radii {
        let v = parse_list(r, 3, "--radii")?;
        c.radii = Some(Radii {
            s2: v[0],
            s3: v[1],
            s4: v[2],
        });
    }
    if let Some(h) = &o.holonomy {
        let v = parse_list(h, 4, "--holonomy")?;
        c.holonomies = vec![[v[0], v[1], v[2], v[3]]];
    }
    if let Some(x) = o.r_min {
        c.r_grid.min = x;
    }
    if let Some(x) = o.r_max {
        c.r_grid.max = x;
    }
    if let Some(n) = o.r_count {
        c.r_grid.count = n;
    }
    if let Some(s) = o.spacing {
        c.r_grid.spacing = match s {
            SpacingArg::Linear => Spacing::Linear,
            SpacingArg::Log => Spacing::Log,
        };
    }
    if let Some(s) = &o.orientation {
        let v = parse_list(s, 4, "--orientation")?;
        if v.iter().any(|x| x.abs() != 1.0) {
            return Err(CliError::Config(
                "--orientation entries must be 1 or -1".into(),
            ));
        }
        c.orientation_signs = [v[0] as i8, v[1] as i8, v[2] as i8, v[3] as i8];
    }
    for t in &o.tolerances {
        let (key, val) = t
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("--tol expects key=value, got '{t}'")))?;
        let v: f64 = val
            .parse()
            .map_err(|_| CliError::Config(format!("--tol value '{val}' is not a number")))?;
        c.tolerances.insert(key.to_string(), v);
    }
    if let Some(s) = o.seed {
        c.seed = s;
    }
    c.validate()?;
    Ok(c)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = load_config(cli.config.as_ref(), &cli.overrides)
        .and_then(|c| commands::run(&cli.command, &c, cli.out.as_ref()));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Numeric(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(CliError::Config(m)) => {
            eprintln!("config error: {m}");
            ExitCode::from(2)
        }
    }
}
