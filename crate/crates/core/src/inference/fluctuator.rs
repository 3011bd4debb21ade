use serde::{Deserialize, Serialize};

use super::bath::mean_dipolar_coupling;
use crate::constants::BOLTZMANN_MEV_PER_K;
use crate::lm::{levenberg_marquardt, LmOptions};
use crate::{Error, Result};

const SERIES_BELOW: f64 = 0.1;

/// (2x − 3 + 4e^{−x} − e^{−2x})/x³ for x < 0.1, where the direct form cancels.
fn ou_bracket_over_cube(x: f64) -> f64 {
    // Σ_{k≥3} (−1)^k (4 − 2^k) x^{k−3} / k!
    let mut sum = 0.0;
    let mut term = 1.0 / 6.0;
    for k in 3..=24 {
        if k > 3 {
            term *= x / k as f64;
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * (4.0 - 2f64.powi(k)) * term;
    }
    sum
}

/// 2x − 3 + 4e^{−x} − e^{−2x}, x = τ/τ_c.
#[cfg(test)]
fn ou_bracket(x: f64) -> f64 {
    if x < SERIES_BELOW {
        x.powi(3) * ou_bracket_over_cube(x)
    } else {
        2.0 * x - 3.0 + 4.0 * (-x).exp() - (-2.0 * x).exp()
    }
}

fn ou_log_decay(delta_rad_s: f64, tau_c_s: f64, two_tau_s: f64) -> f64 {
    let tau = 0.5 * two_tau_s;
    let x = tau / tau_c_s;
    if x < SERIES_BELOW {
        // Δ²τ_c²·x³ written as (Δτ)²·x so that τ_c → ∞ cannot overflow
        -(delta_rad_s * tau).powi(2) * x * ou_bracket_over_cube(x)
    } else {
        -(delta_rad_s * tau_c_s).powi(2) * (2.0 * x - 3.0 + 4.0 * (-x).exp() - (-2.0 * x).exp())
    }
}

/// Hahn-echo attenuation by a Gaussian field fluctuating with rms angular
/// amplitude Δ (Mrad/s) and correlation time τ_c (s):
/// ln V = −Δ²τ_c²[2τ/τ_c − 3 + 4e^{−τ/τ_c} − e^{−2τ/τ_c}], τ = two_tau/2.
pub fn ou_echo_envelope(delta_mrad_s: f64, tau_c_s: f64, two_tau_s: f64) -> Result<f64> {
    if !(delta_mrad_s > 0.0 && tau_c_s > 0.0 && two_tau_s > 0.0) {
        return Err(Error::invalid("OU envelope arguments must be positive"));
    }
    Ok(ou_log_decay(delta_mrad_s * 1e6, tau_c_s, two_tau_s).exp())
}

/// Free-evolution time 2τ (s) at which the envelope falls to 1/e.
fn one_over_e_time(delta_rad_s: f64, tau_c_s: f64) -> f64 {
    if !tau_c_s.is_finite() {
        return f64::INFINITY;
    }
    let g = |t: f64| -ou_log_decay(delta_rad_s, tau_c_s, t) - 1.0;
    // the smaller of the two asymptotic 1/e times underestimates the true one
    let fast = 1.0 / (delta_rad_s * delta_rad_s * tau_c_s);
    let slow = (12.0 * tau_c_s / (delta_rad_s * delta_rad_s)).cbrt();
    // either estimate can under- or overflow for extreme τ_c
    let Some(start) = [fast, slow]
        .into_iter()
        .filter(|t| t.is_normal())
        .min_by(f64::total_cmp)
    else {
        return f64::INFINITY;
    };
    let mut lo = 0.5 * start;
    let mut hi = lo;
    while g(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return f64::INFINITY;
        }
    }
    if g(lo) > 0.0 {
        lo = 0.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Thermally activated fluctuator bath plus a temperature-independent
/// background decoherence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluctuatorModel {
    pub e_a_mev: f64,
    /// Attempt time, s.
    pub tau_0_s: f64,
    /// Rms angular amplitude of the fluctuating field, Mrad/s.
    pub delta_mrad_s: f64,
    /// Fluctuator density implied by Δ through the mean dipolar coupling,
    /// cm⁻³.
    pub density_cm3: f64,
    pub t2_bath_ms: f64,
}

impl FluctuatorModel {
    pub fn new(e_a_mev: f64, tau_0_s: f64, delta_mrad_s: f64, t2_bath_ms: f64) -> Result<Self> {
        if !(e_a_mev > 0.0 && tau_0_s > 0.0 && delta_mrad_s > 0.0 && t2_bath_ms > 0.0) {
            return Err(Error::invalid("fluctuator parameters must be positive"));
        }
        Ok(FluctuatorModel {
            e_a_mev,
            tau_0_s,
            delta_mrad_s,
            density_cm3: density_from_delta(delta_mrad_s),
            t2_bath_ms,
        })
    }
}

/// Δ = 2π·ν_dd(n): inverts the linear density-to-coupling conversion.
fn density_from_delta(delta_mrad_s: f64) -> f64 {
    let khz_per_cm3 = mean_dipolar_coupling(1.0).expect("positive density");
    delta_mrad_s * 1e6 / (2.0 * std::f64::consts::PI * 1e3 * khz_per_cm3)
}

/// τ_c(T) = τ₀·exp(E_a/kT), s.
pub fn correlation_time_s(model: &FluctuatorModel, temperature_k: f64) -> f64 {
    model.tau_0_s * (model.e_a_mev / (BOLTZMANN_MEV_PER_K * temperature_k)).exp()
}

/// Γ_f(T) in 1/ms: inverse 1/e time of the fluctuator echo envelope.
pub fn fluctuator_rate(model: &FluctuatorModel, temperature_k: f64) -> f64 {
    let t = one_over_e_time(
        model.delta_mrad_s * 1e6,
        correlation_time_s(model, temperature_k),
    );
    if t.is_finite() {
        1e-3 / t
    } else {
        0.0
    }
}

/// 1/T₂ = 1/T2_bath + Γ_f(T), ms.
pub fn t2_of_temperature(model: &FluctuatorModel, temperature_k: f64) -> f64 {
    1.0 / (1.0 / model.t2_bath_ms + fluctuator_rate(model, temperature_k))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluctuatorFit {
    pub model: FluctuatorModel,
    /// False when the fluctuator term is negligible at every measured
    /// temperature, so E_a, τ₀ and Δ are not constrained by the data.
    pub identifiable: bool,
    /// Standard errors of (E_a, τ₀, Δ, T2_bath) where available.
    pub std_errors: [f64; 4],
    pub residual_rms_ms: f64,
    pub iterations: usize,
}

const FLAT_SPREAD: f64 = 0.05;

/// Least squares over (E_a, τ₀, Δ, T2_bath) on relative T₂ residuals, with
/// τ₀, Δ and T2_bath fitted in log space.
pub fn fit_t2_temperature(data: &[(f64, f64)], initial: &FluctuatorModel) -> Result<FluctuatorFit> {
    if data.len() < 5 {
        return Err(Error::UnderDetermined(format!(
            "need at least 5 temperatures, got {}",
            data.len()
        )));
    }
    if data
        .iter()
        .any(|(t, y)| !(t.is_finite() && *t > 0.0 && y.is_finite() && *y > 0.0))
    {
        return Err(Error::DegenerateData(
            "temperatures and T2 values must be positive".into(),
        ));
    }
    let mut data = data.to_vec();
    data.sort_by(|a, b| a.0.total_cmp(&b.0));
    let max = data.iter().map(|d| d.1).fold(f64::NEG_INFINITY, f64::max);
    let min = data.iter().map(|d| d.1).fold(f64::INFINITY, f64::min);
    if (max - min) / max <= FLAT_SPREAD {
        // no dip: only the background is measurable
        let bath = data.len() as f64 / data.iter().map(|d| 1.0 / d.1).sum::<f64>();
        let model = FluctuatorModel {
            t2_bath_ms: bath,
            ..*initial
        };
        let rms =
            (data.iter().map(|d| (d.1 - bath).powi(2)).sum::<f64>() / data.len() as f64).sqrt();
        return Ok(FluctuatorFit {
            model,
            identifiable: false,
            std_errors: [f64::NAN; 4],
            residual_rms_ms: rms,
            iterations: 0,
        });
    }
    let argmin = data
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    if argmin == 0 || argmin == data.len() - 1 {
        return Err(Error::MinimumNotBracketed);
    }

    let unpack = |p: &[f64]| FluctuatorModel {
        e_a_mev: p[0],
        tau_0_s: p[1].exp(),
        delta_mrad_s: p[2].exp(),
        density_cm3: density_from_delta(p[2].exp()),
        t2_bath_ms: p[3].exp(),
    };
    let residuals = |p: &[f64]| {
        let m = unpack(p);
        Ok(data
            .iter()
            .map(|(t, y)| t2_of_temperature(&m, *t) / y - 1.0)
            .collect())
    };
    let opts = LmOptions {
        difference_step: 1e-6,
        ..LmOptions::default()
    }
    .with_bounds(vec![1e-3, -60.0, -30.0, -20.0], vec![1e3, 20.0, 30.0, 20.0]);
    let base = [
        initial.e_a_mev,
        initial.tau_0_s.ln(),
        initial.delta_mrad_s.ln(),
        initial.t2_bath_ms.ln(),
    ];
    let mut best: Option<crate::lm::LmResult> = None;
    let mut last_err = None;
    for scale in [1.0, 0.6, 1.6] {
        // keep τ_c at the dip roughly fixed while E_a moves
        let t_dip = data[argmin].0;
        let shift = (scale - 1.0) * initial.e_a_mev / (BOLTZMANN_MEV_PER_K * t_dip);
        let x0 = [base[0] * scale, base[1] - shift, base[2], base[3]];
        match levenberg_marquardt(&residuals, None, &x0, &opts) {
            Ok(r) => {
                if best
                    .as_ref()
                    .is_none_or(|b| r.sum_squares() < b.sum_squares())
                {
                    best = Some(r);
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    let res = match best {
        Some(r) => r,
        None => return Err(last_err.unwrap_or(Error::NonConvergence { iterations: 0 })),
    };
    let model = unpack(&res.params);
    let peak_rate = data
        .iter()
        .map(|(t, _)| fluctuator_rate(&model, *t))
        .fold(0.0, f64::max);
    let identifiable = peak_rate > 0.01 / model.t2_bath_ms;
    let std_errors = match res.covariance() {
        Some(c) => [
            c[(0, 0)].sqrt(),
            model.tau_0_s * c[(1, 1)].sqrt(),
            model.delta_mrad_s * c[(2, 2)].sqrt(),
            model.t2_bath_ms * c[(3, 3)].sqrt(),
        ],
        None => [f64::NAN; 4],
    };
    let rms = (data
        .iter()
        .map(|(t, y)| (t2_of_temperature(&model, *t) - y).powi(2))
        .sum::<f64>()
        / data.len() as f64)
        .sqrt();
    Ok(FluctuatorFit {
        model,
        identifiable,
        std_errors,
        residual_rms_ms: rms,
        iterations: res.iterations,
    })
}
