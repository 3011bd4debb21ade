//! `simulate-spectrum`: stick and broadened field-swept spectra.

use serde_json::json;

use nvespin::io::{write_broadened, write_sticks};
use nvespin::spectra::{broaden, stick_spectrum, BroadenedSpectrum, ResonanceOptions};

use super::Context;
use crate::error::{CliResult, CoreContext};

pub const STICKS: &str = "sticks.csv";
pub const SPECTRUM: &str = "spectrum.csv";
pub const SUMMARY: &str = "spectrum-summary.json";

pub fn run(ctx: &Context) -> CliResult<String> {
    let r = &ctx.resolved;
    let s = &r.config.spectrum;
    let opts = ResonanceOptions {
        grid_points: s.grid_points,
        polarization: s.polarization,
        ..Default::default()
    };
    let sticks = stick_spectrum(
        &r.system,
        r.config.mw_frequency_ghz,
        &r.nominal_axis,
        &r.euler,
        &r.populations()?,
        (s.window_mt[0], s.window_mt[1]),
        &opts,
    )
    .sim()?;
    ctx.log(format!(
        "{} lines, {} root-search warnings",
        sticks.lines.len(),
        sticks.warnings.len()
    ));
    // a window without lines gives header-only tables
    let broadened = if sticks.lines.is_empty() {
        BroadenedSpectrum {
            field_mt: Vec::new(),
            amplitude: Vec::new(),
        }
    } else {
        broaden(&sticks, s.linewidth_mt).sim()?
    };

    ctx.out
        .write_csv(STICKS, |w| write_sticks(w, &sticks.lines))?;
    ctx.out
        .write_csv(SPECTRUM, |w| write_broadened(w, &broadened))?;
    let lines: Vec<_> = sticks
        .lines
        .iter()
        .map(|l| {
            json!({
                "label": l.label.to_string(),
                "field_mt": l.field_mt,
                "intensity": l.intensity,
                "signed_amplitude": l.signed_amplitude,
            })
        })
        .collect();
    let summary = format!(
        "{}{} lines between {} and {} mT at {} GHz",
        ctx.sample_prefix(),
        sticks.lines.len(),
        s.window_mt[0],
        s.window_mt[1],
        r.config.mw_frequency_ghz
    );
    ctx.out.write_json(
        SUMMARY,
        &json!({
            "command": "simulate-spectrum",
            "sample": ctx.sample_json(),
            "mw_frequency_ghz": r.config.mw_frequency_ghz,
            "field": ctx.field_json(),
            "lines": lines,
            "warnings": sticks.warnings,
            "summary": summary,
        }),
    )?;
    ctx.write_resolved_config()?;
    Ok(summary)
}
