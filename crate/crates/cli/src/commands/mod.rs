//! One module per subcommand. Each returns the one-line summary printed on
//! success.

pub mod eseem;
pub mod fit;
pub mod samples;
pub mod scan;
pub mod spectrum;

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::Resolved;
use crate::error::CliResult;
use crate::output::OutputDir;

pub const RESOLVED_CONFIG: &str = "resolved-config.toml";

pub struct Context {
    pub resolved: Resolved,
    pub out: OutputDir,
    pub verbose: bool,
}

impl Context {
    pub fn write_resolved_config(&self) -> CliResult<()> {
        self.out
            .write_bytes(RESOLVED_CONFIG, self.resolved.to_toml()?.as_bytes())
    }

    pub fn log(&self, msg: impl AsRef<str>) {
        if self.verbose {
            eprintln!("{}", msg.as_ref());
        }
    }

    /// `[sample X] ` when a sample is configured.
    pub fn sample_prefix(&self) -> String {
        self.resolved
            .sample
            .as_ref()
            .map(|s| format!("[sample {}] ", s.label))
            .unwrap_or_default()
    }

    /// Sample record as JSON, `null` when no sample is configured.
    pub fn sample_json(&self) -> Value {
        json!(self.resolved.sample)
    }

    pub fn field_json(&self) -> Value {
        let d = self.resolved.direction();
        let e = self.resolved.euler;
        json!({
            "nominal_axis": self.resolved.nominal_axis.as_slice(),
            "euler_deg": [e.alpha, e.beta, e.gamma],
            "direction": [d.x, d.y, d.z],
        })
    }
}

/// One fitted quantity with its 1σ uncertainty, `null` when unavailable.
#[derive(Debug, Clone, Serialize)]
pub struct Parameter {
    pub name: &'static str,
    pub value: f64,
    pub uncertainty: Option<f64>,
    pub unit: &'static str,
}

impl Parameter {
    pub fn new(name: &'static str, value: f64, uncertainty: f64, unit: &'static str) -> Self {
        Parameter {
            name,
            value,
            uncertainty: uncertainty.is_finite().then_some(uncertainty),
            unit,
        }
    }

    pub fn without_uncertainty(name: &'static str, value: f64, unit: &'static str) -> Self {
        Parameter {
            name,
            value,
            uncertainty: None,
            unit,
        }
    }
}

/// Common layout of the JSON fit reports.
#[derive(Debug, Serialize)]
pub struct FitReport {
    pub command: &'static str,
    pub sample: Value,
    pub converged: bool,
    pub parameters: Vec<Parameter>,
    pub residuals: Value,
    pub diagnostics: Value,
    pub summary: String,
}

/// `name = value ± uncertainty unit` for summaries.
pub fn describe(p: &Parameter) -> String {
    let unit = if p.unit.is_empty() {
        String::new()
    } else {
        format!(" {}", p.unit)
    };
    match p.uncertainty {
        Some(u) => format!(
            "{} = {} ± {}{unit}",
            p.name,
            significant(p.value, 5),
            significant(u, 2)
        ),
        None => format!("{} = {}{unit}", p.name, significant(p.value, 5)),
    }
}

/// `digits` significant figures, in scientific notation outside 1e-3..1e5.
pub fn significant(v: f64, digits: usize) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let exponent = v.abs().log10().floor() as i32;
    if (-3..5).contains(&exponent) {
        let decimals = (digits as i32 - 1 - exponent).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        format!("{v:.prec$e}", prec = digits - 1)
    }
}
