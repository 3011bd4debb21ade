//! `samples validate`: checks a sample registry and writes it as JSON.

use std::path::Path;

use serde_json::json;

use super::Context;
use crate::error::{CliError, CliResult};
use crate::samples::{parse_registry, BUNDLED_REGISTRY};

pub const SAMPLES: &str = "samples.json";

/// Validates `registry`, or the configured registry, or the bundled one.
pub fn validate(ctx: &Context, registry: Option<&Path>) -> CliResult<String> {
    let path = registry
        .map(Path::to_path_buf)
        .or_else(|| ctx.resolved.config.registry.clone());
    let (records, origin) = match &path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Data(format!("cannot read {}: {e}", p.display())))?;
            (
                parse_registry(&text, &p.display().to_string())?,
                p.display().to_string(),
            )
        }
        None => (
            parse_registry(BUNDLED_REGISTRY, "bundled registry")?,
            "bundled registry".to_string(),
        ),
    };
    let labels: Vec<&str> = records.iter().map(|r| r.label.as_str()).collect();
    let summary = format!(
        "{origin}: {} valid samples ({})",
        records.len(),
        labels.join(", ")
    );
    ctx.out.write_json(
        SAMPLES,
        &json!({ "registry": origin, "samples": records, "summary": summary }),
    )?;
    Ok(summary)
}
