//! `fit decay|orientation|couplings|t2-temperature`: JSON fit reports.

use std::fs::File;
use std::path::{Path, PathBuf};

use serde_json::json;

use nvespin::eseem::resonance_field_for;
use nvespin::inference::{
    direction_class_distance_deg, fit_nitrogen_couplings, fit_orientation, fit_t2_temperature,
    t2_of_temperature, CouplingObservation, FluctuatorModel,
};
use nvespin::io::{read_decay, read_frequencies, read_measured_peaks, read_t2_table};
use nvespin::sigproc::fit_stretched_exponential;
use nvespin::spin::{angle_between_deg, rotate_field, EulerAngles};

use super::{describe, Context, FitReport, Parameter};
use crate::config;
use crate::error::{CliError, CliResult, CoreContext};

pub const DECAY: &str = "fit-decay.json";
pub const ORIENTATION: &str = "fit-orientation.json";
pub const COUPLINGS: &str = "fit-couplings.json";
pub const T2_TEMPERATURE: &str = "fit-t2-temperature.json";

fn data_path(path: Option<&PathBuf>, key: &str) -> CliResult<PathBuf> {
    path.cloned().ok_or_else(|| {
        CliError::config(format!(
            "{key}: no data file given; set it in the config or pass --data"
        ))
    })
}

fn open(path: &Path) -> CliResult<File> {
    File::open(path).map_err(|e| CliError::Data(format!("cannot open {}: {e}", path.display())))
}

/// Writes the report, then fails with a solver error if the fit did not
/// converge so that the exit status reflects it.
fn finish(ctx: &Context, name: &str, report: FitReport) -> CliResult<String> {
    ctx.out.write_json(name, &report)?;
    ctx.write_resolved_config()?;
    if report.converged {
        Ok(report.summary)
    } else {
        Err(CliError::Solver(format!(
            "{} did not converge; report written to {name}",
            report.command
        )))
    }
}

fn summary_line(ctx: &Context, what: &str, params: &[Parameter], tail: String) -> String {
    let body: Vec<String> = params.iter().map(describe).collect();
    format!("{}{what}: {}; {tail}", ctx.sample_prefix(), body.join(", "))
}

pub fn decay(ctx: &Context) -> CliResult<String> {
    let cfg = ctx.resolved.config.fit.decay.clone().unwrap_or_default();
    let path = data_path(cfg.data.as_ref(), "fit.decay.data")?;
    let decay =
        read_decay(open(&path)?, cfg.quadrature()?).map_err(|e| CliError::in_file(e, &path))?;
    ctx.log(format!("{} points from {}", decay.len(), path.display()));
    let fit = fit_stretched_exponential(&decay, cfg.initial).fit()?;
    let se = fit.std_errors();
    let params = vec![
        Parameter::new("A", fit.a, se[0], ""),
        Parameter::new("T2", fit.t2_ms, se[1], "ms"),
        Parameter::new("n", fit.n, se[2], ""),
    ];
    let residuals: Vec<f64> = decay
        .two_tau_us
        .iter()
        .zip(&decay.amplitude)
        .map(|(t, y)| y - fit.model(*t))
        .collect();
    let rms = fit.residual_norm / (decay.len() as f64).sqrt();
    let summary = summary_line(
        ctx,
        "decay",
        &params,
        format!("rms {}", super::significant(rms, 3)),
    );
    let report = FitReport {
        command: "fit decay",
        sample: ctx.sample_json(),
        converged: fit.converged,
        parameters: params,
        residuals: json!({ "rms": rms, "two_tau_us": decay.two_tau_us, "values": residuals }),
        diagnostics: json!({
            "data": path,
            "points": decay.len(),
            "iterations": fit.iterations,
            "residual_norm": fit.residual_norm,
        }),
        summary,
    };
    finish(ctx, DECAY, report)
}

pub fn orientation(ctx: &Context) -> CliResult<String> {
    let r = &ctx.resolved;
    let cfg = r.config.fit.orientation.clone().unwrap_or_default();
    let path = data_path(cfg.data.as_ref(), "fit.orientation.data")?;
    let peaks = read_measured_peaks(open(&path)?).map_err(|e| CliError::in_file(e, &path))?;
    let [a, b, g] = cfg.initial_euler_deg;
    let fit = fit_orientation(
        &peaks,
        &r.system,
        r.config.mw_frequency_ghz,
        &r.nominal_axis,
        &EulerAngles::new(a, b, g),
    )
    .fit()?;
    let direction = nalgebra::Vector3::from(fit.direction);
    let params = vec![
        Parameter::without_uncertainty("alpha", fit.euler.alpha, "deg"),
        Parameter::without_uncertainty("beta", fit.euler.beta, "deg"),
        Parameter::without_uncertainty("gamma", fit.euler.gamma, "deg"),
    ];
    let residuals: Vec<_> = fit
        .residuals
        .iter()
        .map(|p| {
            json!({
                "label": p.label.to_string(),
                "measured_mt": p.measured_mt,
                "model_mt": p.model_mt,
                "residual_mt": p.measured_mt - p.model_mt,
            })
        })
        .collect();
    let tilt = angle_between_deg(&direction, &r.nominal_axis);
    let summary = summary_line(
        ctx,
        "orientation",
        &params,
        format!(
            "{tilt:.3}° from nominal, rms {} mT",
            super::significant(fit.residual_rms_mt, 3)
        ),
    );
    let report = FitReport {
        command: "fit orientation",
        sample: ctx.sample_json(),
        converged: true,
        parameters: params,
        residuals: json!({ "rms_mt": fit.residual_rms_mt, "peaks": residuals }),
        diagnostics: json!({
            "data": path,
            "nominal_axis": r.nominal_axis.as_slice(),
            "direction": fit.direction,
            "angle_from_nominal_deg": tilt,
            "angle_from_configured_deg": direction_class_distance_deg(&direction, &r.direction()),
            "starts": fit.starts,
        }),
        summary,
    };
    finish(ctx, ORIENTATION, report)
}

pub fn couplings(ctx: &Context) -> CliResult<String> {
    let r = &ctx.resolved;
    let cfg = r.config.fit.couplings.clone().unwrap_or_default();
    if cfg.observations.is_empty() {
        return Err(CliError::config(
            "fit.couplings.observations: at least one observation is required",
        ));
    }
    let initial = cfg
        .initial
        .ok_or_else(|| CliError::config("fit.couplings.initial: missing"))?;
    let mut observations = Vec::new();
    let mut sources = Vec::new();
    for (k, obs) in cfg.observations.iter().enumerate() {
        let key = format!("fit.couplings.observations[{k}]");
        let sel = config::selection(obs.site, obs.pair, &format!("{key}.site"))?;
        let axis = obs.nominal_axis.unwrap_or([0.0, 0.0, 1.0]);
        let [a, b, g] = obs.euler_deg.unwrap_or([0.0; 3]);
        let euler = EulerAngles::new(a, b, g);
        let field_mt = match obs.field_mt {
            Some(b) => b,
            None => {
                let direction = rotate_field(&nalgebra::Vector3::from(axis).normalize(), &euler);
                resonance_field_for(&r.system, &sel, r.config.mw_frequency_ghz, &direction).sim()?
            }
        };
        let peaks =
            read_frequencies(open(&obs.data)?).map_err(|e| CliError::in_file(e, &obs.data))?;
        ctx.log(format!(
            "{key}: {} frequencies at {field_mt:.3} mT",
            peaks.len()
        ));
        sources.push(json!({ "data": obs.data, "field_mt": field_mt, "peaks": peaks.len() }));
        observations.push(CouplingObservation {
            nominal_axis: axis,
            euler,
            field_mt,
            selection: sel,
            peaks,
        });
    }
    let fit = fit_nitrogen_couplings(&r.system, &observations, initial).fit()?;
    let u = fit.uncertainties;
    let params = vec![
        Parameter::new("A_parallel", fit.a_par, u[0], "MHz"),
        Parameter::new("A_perpendicular", fit.a_perp, u[1], "MHz"),
        Parameter::new("P_parallel", fit.p_par, u[2], "MHz"),
    ];
    let summary = summary_line(
        ctx,
        "couplings",
        &params,
        format!("rms {} MHz", super::significant(fit.residual_rms_mhz, 3)),
    );
    let report = FitReport {
        command: "fit couplings",
        sample: ctx.sample_json(),
        converged: true,
        parameters: params,
        residuals: json!({ "rms_mhz": fit.residual_rms_mhz }),
        diagnostics: json!({
            "observations": sources,
            "initial": initial,
            "orientation_uncertainties": fit.orientation_uncertainties,
            "iterations": fit.iterations,
        }),
        summary,
    };
    finish(ctx, COUPLINGS, report)
}

pub fn t2_temperature(ctx: &Context) -> CliResult<String> {
    let cfg = ctx
        .resolved
        .config
        .fit
        .t2_temperature
        .clone()
        .unwrap_or_default();
    let path = data_path(cfg.data.as_ref(), "fit.t2_temperature.data")?;
    let data = read_t2_table(open(&path)?).map_err(|e| CliError::in_file(e, &path))?;
    let i = &cfg.initial;
    let initial = FluctuatorModel::new(i.e_a_mev, i.tau_0_s, i.delta_mrad_s, i.t2_bath_ms)
        .map_err(|e| CliError::config(format!("fit.t2_temperature.initial: {e}")))?;
    let fit = fit_t2_temperature(&data, &initial).fit()?;
    let m = &fit.model;
    let se = fit.std_errors;
    let hidden = |v: f64| if fit.identifiable { v } else { f64::NAN };
    let params = vec![
        Parameter::new("E_a", m.e_a_mev, hidden(se[0]), "meV"),
        Parameter::new("tau_0", m.tau_0_s, hidden(se[1]), "s"),
        Parameter::new("Delta", m.delta_mrad_s, hidden(se[2]), "Mrad/s"),
        Parameter::new("T2_bath", m.t2_bath_ms, se[3], "ms"),
    ];
    let residuals: Vec<_> = data
        .iter()
        .map(|(t, t2)| {
            let model = t2_of_temperature(m, *t);
            json!({ "temperature_k": t, "t2_ms": t2, "model_ms": model, "residual_ms": t2 - model })
        })
        .collect();
    let tail = if fit.identifiable {
        format!("rms {} ms", super::significant(fit.residual_rms_ms, 3))
    } else {
        format!(
            "rms {} ms; no fluctuator dip, only T2_bath is constrained",
            super::significant(fit.residual_rms_ms, 3)
        )
    };
    let summary = summary_line(ctx, "t2-temperature", &params, tail);
    let report = FitReport {
        command: "fit t2-temperature",
        sample: ctx.sample_json(),
        converged: true,
        parameters: params,
        residuals: json!({ "rms_ms": fit.residual_rms_ms, "points": residuals }),
        diagnostics: json!({
            "data": path,
            "identifiable": fit.identifiable,
            "fluctuator_density_cm3": m.density_cm3,
            "iterations": fit.iterations,
        }),
        summary,
    };
    finish(ctx, T2_TEMPERATURE, report)
}
