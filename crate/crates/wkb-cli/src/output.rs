use crate::CliError;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::io::Write;
use std::path::PathBuf;
use wkb::config::ExperimentConfig;
use wkb::fenchel_nielsen::LOG_FORM_THRESHOLD;
use wkb::numerics::{LogComplex, Scalar};

pub fn config_hash(c: &ExperimentConfig) -> String {
    format!("{:x}", Sha256::digest(c.canonical_json().as_bytes()))
}

fn sink(out: Option<&PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(p) => Box::new(
            std::fs::File::create(p)
                .map_err(|e| CliError::Config(format!("cannot write {}: {e}", p.display())))?,
        ),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn io_err(e: impl std::fmt::Display) -> CliError {
    CliError::Numeric(format!("output failed: {e}"))
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    config_sha256: String,
    command: &'a str,
    result: &'a T,
}

pub fn write_json<T: Serialize>(
    out: Option<&PathBuf>,
    config: &ExperimentConfig,
    command: &str,
    value: &T,
) -> Result<(), CliError> {
    let env = Envelope {
        config_sha256: config_hash(config),
        command,
        result: value,
    };
    let mut w = sink(out)?;
    serde_json::to_writer_pretty(&mut w, &env).map_err(io_err)?;
    writeln!(w).map_err(io_err)
}

/// CSV table: a `#` comment line with the config hash and command, then the header row.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<String>) -> Self {
        Table {
            header,
            rows: Vec::new(),
        }
    }

    pub fn write(
        &self,
        out: Option<&PathBuf>,
        config: &ExperimentConfig,
        command: &str,
    ) -> Result<(), CliError> {
        let mut w = sink(out)?;
        writeln!(
            w,
            "# config_sha256={} command={}",
            config_hash(config),
            command
        )
        .map_err(io_err)?;
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(&self.header).map_err(io_err)?;
        for r in &self.rows {
            csv.write_record(r).map_err(io_err)?;
        }
        csv.flush().map_err(io_err)
    }
}

/// Shortest round-trip decimal, scientific outside [1e-4, 1e15); empty for NaN.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if x.is_nan() {
        String::new()
    } else if x == 0.0 {
        "0".into()
    } else if a.is_finite() && !(1e-4..1e15).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

/// [re, im, log_abs, phase]; re and im are left empty beyond double range.
pub fn complex_fields(z: Option<LogComplex>) -> [String; 4] {
    match z {
        None => Default::default(),
        Some(z) => {
            let la = z.ln_abs();
            let (re, im) = if la.is_finite() && la.abs() > LOG_FORM_THRESHOLD {
                (String::new(), String::new())
            } else {
                let v = z.to_c64();
                (num(v.re), num(v.im))
            };
            [
                re,
                im,
                num(la),
                num(if z.is_zero() { 0.0 } else { z.arg() }),
            ]
        }
    }
}
