//! `simulate-eseem`: trace, optional detection filter, dead time, cosine FT,
//! phase correction and peak picking.

use serde_json::json;

use nvespin::eseem::{
    damped_ensemble_trace, multi_nucleus_trace, nuclear_frequencies, resonance_field_for,
};
use nvespin::io::{write_frequencies, write_peaks, write_spectrum, write_trace};
use nvespin::sigproc::{
    check_additive_relation, cosine_ft, detection_bandwidth_filter, phase_correct_first_order,
    pick_peaks, PeakList,
};
use nvespin::spin::FieldVector;

use super::Context;
use crate::error::{CliResult, CoreContext};

pub const TRACE: &str = "trace.csv";
pub const FT: &str = "ft.csv";
pub const PEAKS: &str = "peaks.json";
pub const FILTERED_TRACE: &str = "trace-filtered.csv";
pub const UNCORRECTED_FT: &str = "ft-uncorrected.csv";
pub const PEAK_TABLE: &str = "peaks.csv";
pub const FREQUENCIES: &str = "frequencies.csv";

/// Positive peaks assigned to a manifold lie within this many native FT
/// bins of one of its simulated frequencies.
const ASSIGNMENT_BINS: f64 = 2.0;

pub fn run(ctx: &Context) -> CliResult<String> {
    let r = &ctx.resolved;
    let e = &r.config.eseem;
    let sel = r.selection()?;
    let direction = r.direction();
    let magnitude = match r.config.field.magnitude_mt {
        Some(b) => b,
        None => {
            resonance_field_for(&r.system, &sel, r.config.mw_frequency_ghz, &direction).sim()?
        }
    };
    ctx.log(format!(
        "field {magnitude:.4} mT along {:?}",
        direction.as_slice()
    ));
    let field = FieldVector::new(magnitude, direction).sim()?;
    let grid = e.tau_grid()?;

    let trace = match &e.ensemble {
        Some(ens) => damped_ensemble_trace(
            &r.system,
            &field,
            &sel,
            &grid,
            ens.hyperfine_fraction,
            ens.quadrupole_fraction,
            ens.samples,
            r.seed(),
        ),
        None => multi_nucleus_trace(&r.system, &field, &sel, &grid, e.combine),
    }
    .sim()?;
    let filtered = match e.bandwidth_window_ns {
        Some(w) => Some(detection_bandwidth_filter(&trace, w).sim()?),
        None => None,
    };
    let processed = filtered.as_ref().unwrap_or(&trace);
    let raw_ft = cosine_ft(processed, e.dead_time_us, e.zero_fill, e.window).sim()?;
    let ft = phase_correct_first_order(&raw_ft, e.dead_time_us);

    let mean = processed.v.iter().sum::<f64>() / processed.v.len() as f64;
    let excursion = processed
        .v
        .iter()
        .map(|v| (v - mean).abs())
        .fold(0.0, f64::max);
    let flat = excursion < e.flat_tolerance;
    let peaks = if flat {
        PeakList::default()
    } else {
        pick_peaks(&ft, e.peak_floor).sim()?
    };
    let freqs = nuclear_frequencies(&r.system, &field, &sel).sim()?;

    // basic peaks of each driven manifold and the additive triples among them
    let kept = processed
        .tau_us
        .iter()
        .filter(|t| **t >= e.dead_time_us - 1e-9 * grid.step_us)
        .count();
    let native_bin = 1.0 / (kept as f64 * grid.step_us);
    let positive = peaks.positive();
    let (ma, mb) = sel.pair.manifolds();
    let manifolds: Vec<_> = [ma, mb]
        .into_iter()
        .map(|m| {
            let simulated = freqs.get(m);
            let assigned = PeakList {
                peaks: positive
                    .peaks
                    .iter()
                    .filter(|p| simulated.iter().any(|f| (f - p.freq_mhz).abs() <= ASSIGNMENT_BINS * native_bin))
                    .copied()
                    .collect(),
            };
            let f = assigned.frequencies();
            let triples: Vec<_> = check_additive_relation(&assigned, e.triple_tolerance_mhz)
                .iter()
                .map(|t| json!({ "sum": [f[t.i], f[t.j]], "equals": f[t.k], "mismatch_mhz": t.mismatch_mhz }))
                .collect();
            json!({
                "manifold": m.to_string(),
                "simulated_mhz": simulated,
                "assigned_peaks_mhz": f,
                "additive_triples": triples,
            })
        })
        .collect();

    ctx.out.write_csv(TRACE, |w| write_trace(w, &trace))?;
    ctx.out.write_csv(FT, |w| write_spectrum(w, &ft))?;
    if r.config.output.dump_intermediates {
        if let Some(f) = &filtered {
            ctx.out.write_csv(FILTERED_TRACE, |w| write_trace(w, f))?;
        }
        ctx.out
            .write_csv(UNCORRECTED_FT, |w| write_spectrum(w, &raw_ft))?;
        ctx.out.write_csv(PEAK_TABLE, |w| write_peaks(w, &peaks))?;
        ctx.out
            .write_csv(FREQUENCIES, |w| write_frequencies(w, &freqs))?;
    }
    let summary = format!(
        "{}site {} {:?} at {:.3} mT: {} positive and {} negative peaks{}",
        ctx.sample_prefix(),
        r.config.selection.site,
        sel.pair,
        magnitude,
        positive.len(),
        peaks.negative().len(),
        if flat { " (flat trace)" } else { "" },
    );
    ctx.out.write_json(
        PEAKS,
        &json!({
            "command": "simulate-eseem",
            "sample": ctx.sample_json(),
            "field_mt": magnitude,
            "field": ctx.field_json(),
            "selection": { "site": r.config.selection.site, "pair": sel.pair },
            "max_imag": trace.max_imag,
            "flat": flat,
            "max_excursion": excursion,
            "native_bin_mhz": native_bin,
            "peaks": peaks.peaks,
            "manifolds": manifolds,
            "summary": summary,
        }),
    )?;
    ctx.write_resolved_config()?;
    Ok(summary)
}
