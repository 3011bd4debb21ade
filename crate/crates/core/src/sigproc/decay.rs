use serde::{Deserialize, Serialize};

use crate::eseem::EseemTrace;
use crate::lm::{levenberg_marquardt, LmOptions};
use crate::{Error, Result};

const N_MIN: f64 = 0.5;
const N_MAX: f64 = 4.0;

/// Hahn-echo amplitude against total free evolution time 2τ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EchoDecay {
    pub two_tau_us: Vec<f64>,
    pub amplitude: Vec<f64>,
    pub temperature_k: Option<f64>,
    pub label: Option<String>,
    pub field_mt: Option<f64>,
}

impl EchoDecay {
    pub fn new(two_tau_us: Vec<f64>, amplitude: Vec<f64>) -> Result<Self> {
        let d = EchoDecay {
            two_tau_us,
            amplitude,
            temperature_k: None,
            label: None,
            field_mt: None,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn with_temperature(mut self, kelvin: f64) -> Self {
        self.temperature_k = Some(kelvin);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.two_tau_us.len() != self.amplitude.len() {
            return Err(Error::invalid("two_tau and amplitude lengths differ"));
        }
        if self.two_tau_us.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("two_tau must be strictly increasing"));
        }
        if self
            .two_tau_us
            .iter()
            .chain(&self.amplitude)
            .any(|v| !v.is_finite())
        {
            return Err(Error::invalid("decay data must be finite"));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.two_tau_us.len()
    }

    pub fn is_empty(&self) -> bool {
        self.two_tau_us.is_empty()
    }
}

/// A·exp(−(2τ/T₂)ⁿ), 2τ in μs and T₂ in ms.
pub fn stretched_exponential(two_tau_us: f64, a: f64, t2_ms: f64, n: f64) -> f64 {
    a * (-(two_tau_us / (t2_ms * 1e3)).powf(n)).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StretchedExpFit {
    pub a: f64,
    pub t2_ms: f64,
    pub n: f64,
    pub residual_norm: f64,
    /// Variances of (A, T₂, n).
    pub covariance_diagonal: [f64; 3],
    pub converged: bool,
    pub iterations: usize,
}

impl StretchedExpFit {
    pub fn model(&self, two_tau_us: f64) -> f64 {
        stretched_exponential(two_tau_us, self.a, self.t2_ms, self.n)
    }

    /// Standard errors of (A, T₂, n).
    pub fn std_errors(&self) -> [f64; 3] {
        self.covariance_diagonal.map(f64::sqrt)
    }
}

/// Initial (A, T₂, n) from a straight line through ln(−ln(V/A)) against
/// ln(2τ).
fn log_log_guess(decay: &EchoDecay) -> [f64; 3] {
    let a0 = decay
        .amplitude
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let pts: Vec<(f64, f64)> = decay
        .two_tau_us
        .iter()
        .zip(&decay.amplitude)
        .filter(|(t, v)| **t > 0.0 && **v / a0 > 0.02 && **v / a0 < 0.98)
        .map(|(t, v)| (t.ln(), (-(v / a0).ln()).ln()))
        .collect();
    let median_t = decay.two_tau_us[decay.len() / 2].max(1e-6) * 1e-3;
    if pts.len() < 2 {
        return [a0, median_t, 1.0];
    }
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
    let (mx, my) = (sx / m, sy / m);
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= 0.0 {
        return [a0, median_t, 1.0];
    }
    let n = (sxy / sxx).clamp(N_MIN, N_MAX);
    // y = n·ln(2τ) − n·ln(T₂[μs])
    let ln_t2 = mx - my / n;
    let t2 = (ln_t2.exp() * 1e-3).max(1e-9);
    [a0, t2, n]
}

/// Least-squares fit of A·exp(−(2τ/T₂)ⁿ) with 0.5 ≤ n ≤ 4.
pub fn fit_stretched_exponential(
    decay: &EchoDecay,
    initial: Option<[f64; 3]>,
) -> Result<StretchedExpFit> {
    decay.validate()?;
    if decay.len() < 8 {
        return Err(Error::UnderDetermined(format!(
            "need at least 8 points, got {}",
            decay.len()
        )));
    }
    let max = decay
        .amplitude
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    if max <= 0.0 {
        return Err(Error::DegenerateData(
            "amplitude is non-positive throughout".into(),
        ));
    }
    if !decay.amplitude.iter().any(|v| *v < 0.1 * max) {
        return Err(Error::UnderDetermined(
            "data must span at least one decade of decay".into(),
        ));
    }
    let x0 = initial.unwrap_or_else(|| log_log_guess(decay));
    let t = &decay.two_tau_us;
    let y = &decay.amplitude;
    let residuals = |p: &[f64]| {
        Ok(t.iter()
            .zip(y)
            .map(|(t, y)| stretched_exponential(*t, p[0], p[1], p[2]) - y)
            .collect())
    };
    let jacobian = |p: &[f64]| {
        let (a, t2, n) = (p[0], p[1] * 1e3, p[2]);
        Ok(nalgebra::DMatrix::from_fn(t.len(), 3, |r, c| {
            let x = t[r] / t2;
            let xn = if x > 0.0 { x.powf(n) } else { 0.0 };
            let e = (-xn).exp();
            match c {
                0 => e,
                // ∂/∂T₂[ms] = A·e·n·xⁿ/T₂[ms]
                1 => a * e * n * xn / p[1],
                _ => {
                    if x > 0.0 {
                        -a * e * xn * x.ln()
                    } else {
                        0.0
                    }
                }
            }
        }))
    };
    let opts = LmOptions::default().with_bounds(
        vec![f64::NEG_INFINITY, 1e-12, N_MIN],
        vec![f64::INFINITY, f64::INFINITY, N_MAX],
    );
    let res = levenberg_marquardt(&residuals, Some(&jacobian), &x0, &opts)?;
    let cov = res.covariance();
    let diag = match cov {
        Some(c) => [c[(0, 0)], c[(1, 1)], c[(2, 2)]],
        None => [f64::NAN; 3],
    };
    Ok(StretchedExpFit {
        a: res.params[0],
        t2_ms: res.params[1],
        n: res.params[2],
        residual_norm: res.sum_squares().sqrt(),
        covariance_diagonal: diag,
        converged: res.converged,
        iterations: res.iterations,
    })
}

/// Divides a modulation trace recorded against τ by the fitted decay at 2τ.
pub fn normalize_by_decay(trace: &EseemTrace, fit: &StretchedExpFit) -> EseemTrace {
    let mut out = trace.clone();
    for (v, tau) in out.v.iter_mut().zip(&trace.tau_us) {
        *v /= fit.model(2.0 * tau);
    }
    out
}
