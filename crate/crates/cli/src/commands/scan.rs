//! `scan-cancellation`: modulation depth against field strength.

use serde_json::json;

use nvespin::eseem::cancellation_scan;
use nvespin::io::write_scan;

use super::Context;
use crate::error::{CliResult, CoreContext};

pub const SCAN: &str = "scan.csv";
pub const SUMMARY: &str = "scan-summary.json";

pub fn run(ctx: &Context) -> CliResult<String> {
    let r = &ctx.resolved;
    let sc = &r.config.scan;
    let sel = r.selection()?;
    let grid = r.config.eseem.tau_grid()?;
    let scan = cancellation_scan(
        &r.system,
        &r.direction(),
        &sel,
        (sc.range_mt[0], sc.range_mt[1]),
        sc.steps,
        &grid,
    )
    .sim()?;
    if !scan.skipped_mt.is_empty() {
        ctx.log(format!(
            "{} fields skipped where the electron levels could not be labelled",
            scan.skipped_mt.len()
        ));
    }
    let max_depth = scan.points.iter().map(|p| p.1).fold(f64::NAN, f64::max);
    ctx.out.write_csv(SCAN, |w| write_scan(w, &scan))?;
    let summary = match scan.argmax_mt {
        Some(b) => format!(
            "{}deepest modulation {max_depth:.4} at {b} mT",
            ctx.sample_prefix()
        ),
        None => format!(
            "{}no field in the range could be evaluated",
            ctx.sample_prefix()
        ),
    };
    ctx.out.write_json(
        SUMMARY,
        &json!({
            "command": "scan-cancellation",
            "sample": ctx.sample_json(),
            "field": ctx.field_json(),
            "selection": { "site": r.config.selection.site, "pair": sel.pair },
            "argmax_mt": scan.argmax_mt,
            "max_depth": max_depth,
            "skipped_mt": scan.skipped_mt,
            "summary": summary,
        }),
    )?;
    ctx.write_resolved_config()?;
    Ok(summary)
}
