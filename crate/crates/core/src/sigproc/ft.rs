use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::eseem::EseemTrace;
use crate::{Error, Result};

pub const DEFAULT_ZERO_FILL: usize = 8;

/// Apodization applied before the transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FtWindow {
    None,
    /// Half Hamming window, 1 at the first retained sample and 0.08 at the
    /// last. A one-sided trace is the right half of a symmetric signal, so
    /// the real part of its transform carries the full-window lineshape.
    #[default]
    Hamming,
}

impl FtWindow {
    fn weights(self, n: usize) -> Vec<f64> {
        match self {
            FtWindow::None => vec![1.0; n],
            FtWindow::Hamming => {
                let denom = (n.max(2) - 1) as f64;
                (0..n)
                    .map(|k| 0.54 + 0.46 * (std::f64::consts::PI * k as f64 / denom).cos())
                    .collect()
            }
        }
    }
}

impl std::str::FromStr for FtWindow {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "none" => Ok(FtWindow::None),
            "hamming" => Ok(FtWindow::Hamming),
            other => Err(Error::invalid(format!("unknown window {other:?}"))),
        }
    }
}

/// Cosine FT on a uniform grid from 0 to Nyquist.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FtSpectrum {
    pub freq_mhz: Vec<f64>,
    /// Real part of the (possibly phase-corrected) transform.
    pub amplitude: Vec<f64>,
    #[serde(skip)]
    complex: Vec<Complex64>,
    pub dead_time_us: f64,
    pub zero_fill: usize,
    pub phase_corrected: bool,
}

impl FtSpectrum {
    pub fn complex(&self) -> &[Complex64] {
        &self.complex
    }

    pub fn bin_width_mhz(&self) -> f64 {
        self.freq_mhz[1] - self.freq_mhz[0]
    }
}

/// Drops τ < dead time, removes the (window-weighted) mean, applies the
/// window, zero-fills to `zero_fill`·N points and transforms with the
/// e^{+i2πντ} kernel, time measured from the first retained sample.
/// Amplitudes are divided by the number of retained samples.
pub fn cosine_ft(
    trace: &EseemTrace,
    dead_time_us: f64,
    zero_fill: usize,
    window: FtWindow,
) -> Result<FtSpectrum> {
    if !(dead_time_us.is_finite() && dead_time_us >= 0.0) {
        return Err(Error::invalid("dead time must be >= 0"));
    }
    if zero_fill == 0 {
        return Err(Error::invalid("zero-fill factor must be >= 1"));
    }
    if trace.tau_us.len() != trace.v.len() || trace.tau_us.len() < 2 {
        return Err(Error::invalid(
            "trace needs at least 2 samples of matching length",
        ));
    }
    let step = trace.tau_us[1] - trace.tau_us[0];
    let uniform = trace
        .tau_us
        .windows(2)
        .all(|w| ((w[1] - w[0]) - step).abs() <= 1e-9 * step.abs().max(1e-12));
    if !(step > 0.0 && uniform) {
        return Err(Error::invalid("trace must be on a uniform increasing grid"));
    }
    let cutoff = dead_time_us - 1e-9 * step;
    let kept: Vec<f64> = trace
        .tau_us
        .iter()
        .zip(&trace.v)
        .filter(|(t, _)| **t >= cutoff)
        .map(|(_, v)| *v)
        .collect();
    if kept.len() < 2 {
        return Err(Error::EmptyAfterDeadTime { dead_time_us });
    }
    let n = kept.len();
    let w = window.weights(n);
    let wsum: f64 = w.iter().sum();
    let mean = kept.iter().zip(&w).map(|(x, w)| x * w).sum::<f64>() / wsum;
    let m = zero_fill * n;
    let mut buf: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); m];
    for k in 0..n {
        buf[k] = Complex64::new((kept[k] - mean) * w[k], 0.0);
    }
    FftPlanner::new().plan_fft_inverse(m).process(&mut buf);
    let bins = m / 2 + 1;
    let scale = 1.0 / n as f64;
    let complex: Vec<Complex64> = buf[..bins].iter().map(|z| z * scale).collect();
    let df = 1.0 / (m as f64 * step);
    Ok(FtSpectrum {
        freq_mhz: (0..bins).map(|k| k as f64 * df).collect(),
        amplitude: complex.iter().map(|z| z.re).collect(),
        complex,
        dead_time_us,
        zero_fill,
        phase_corrected: false,
    })
}

/// Multiplies bin ν by e^{+i2πν·t_d} and keeps the real part.
pub fn phase_correct_first_order(spectrum: &FtSpectrum, dead_time_us: f64) -> FtSpectrum {
    let complex: Vec<Complex64> = spectrum
        .complex
        .iter()
        .zip(&spectrum.freq_mhz)
        .map(|(z, f)| z * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * f * dead_time_us))
        .collect();
    FtSpectrum {
        freq_mhz: spectrum.freq_mhz.clone(),
        amplitude: complex.iter().map(|z| z.re).collect(),
        complex,
        dead_time_us: spectrum.dead_time_us,
        zero_fill: spectrum.zero_fill,
        phase_corrected: true,
    }
}
