use serde::{Deserialize, Serialize};

use super::ft::FtSpectrum;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub freq_mhz: f64,
    /// Signed: basic harmonics are positive, combination harmonics negative.
    pub amplitude: f64,
    /// Full width at half maximum.
    pub width_mhz: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PeakList {
    pub peaks: Vec<Peak>,
}

impl PeakList {
    pub fn len(&self) -> usize {
        self.peaks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.peaks.is_empty()
    }

    /// Positive-amplitude peaks only.
    pub fn positive(&self) -> PeakList {
        PeakList {
            peaks: self
                .peaks
                .iter()
                .filter(|p| p.amplitude > 0.0)
                .copied()
                .collect(),
        }
    }

    pub fn negative(&self) -> PeakList {
        PeakList {
            peaks: self
                .peaks
                .iter()
                .filter(|p| p.amplitude < 0.0)
                .copied()
                .collect(),
        }
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.peaks.iter().map(|p| p.freq_mhz).collect()
    }

    /// Peak nearest to `freq_mhz`, if any lies within `tolerance`.
    pub fn nearest(&self, freq_mhz: f64, tolerance: f64) -> Option<&Peak> {
        self.peaks
            .iter()
            .filter(|p| (p.freq_mhz - freq_mhz).abs() <= tolerance)
            .min_by(|a, b| {
                (a.freq_mhz - freq_mhz)
                    .abs()
                    .total_cmp(&(b.freq_mhz - freq_mhz).abs())
            })
    }
}

fn half_width(a: &[f64], k: usize, df: f64, dir: isize) -> Option<f64> {
    let half = 0.5 * a[k];
    let mut i = k as isize;
    loop {
        let next = i + dir;
        if next < 0 || next as usize >= a.len() {
            return None;
        }
        let (y0, y1) = (a[i as usize], a[next as usize]);
        if (y1 - half) * half.signum() <= 0.0 {
            let frac = (y0 - half) / (y0 - y1);
            return Some(((i - k as isize).abs() as f64 + frac) * df);
        }
        i = next;
    }
}

/// Local maxima (positive) and minima (negative) whose magnitude exceeds
/// `floor`·max|amplitude|, refined by three-point parabolic interpolation.
pub fn pick_peaks(spectrum: &FtSpectrum, floor: f64) -> Result<PeakList> {
    if !(floor > 0.0 && floor < 1.0) {
        return Err(Error::invalid("peak floor must lie in (0, 1)"));
    }
    let a = &spectrum.amplitude;
    if a.len() < 3 {
        return Ok(PeakList::default());
    }
    let df = spectrum.bin_width_mhz();
    let max = a.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if max == 0.0 {
        return Ok(PeakList::default());
    }
    let mut peaks = Vec::new();
    for k in 1..a.len() - 1 {
        let (l, c, r) = (a[k - 1], a[k], a[k + 1]);
        let is_max = c > 0.0 && c > l && c >= r;
        let is_min = c < 0.0 && c < l && c <= r;
        if !(is_max || is_min) || c.abs() < floor * max {
            continue;
        }
        let denom = l - 2.0 * c + r;
        let delta = if denom != 0.0 {
            (0.5 * (l - r) / denom).clamp(-0.5, 0.5)
        } else {
            0.0
        };
        let width = match (half_width(a, k, df, -1), half_width(a, k, df, 1)) {
            (Some(x), Some(y)) => x + y,
            (Some(x), None) | (None, Some(x)) => 2.0 * x,
            (None, None) => f64::NAN,
        };
        peaks.push(Peak {
            freq_mhz: spectrum.freq_mhz[k] + delta * df,
            amplitude: c - 0.25 * (l - r) * delta,
            width_mhz: width,
        });
    }
    Ok(PeakList { peaks })
}

/// Indices (i, j, k) into the peak list with νᵢ + νⱼ = νₖ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdditiveTriple {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub mismatch_mhz: f64,
}

/// Every triple of distinct peaks with νᵢ + νⱼ = νₖ within `tolerance`,
/// i < j.
pub fn check_additive_relation(peaks: &PeakList, tolerance: f64) -> Vec<AdditiveTriple> {
    let f = peaks.frequencies();
    let mut out = Vec::new();
    if f.len() < 3 {
        return out;
    }
    for i in 0..f.len() {
        for j in i + 1..f.len() {
            for k in 0..f.len() {
                if k == i || k == j {
                    continue;
                }
                let mismatch = f[i] + f[j] - f[k];
                if mismatch.abs() <= tolerance {
                    out.push(AdditiveTriple {
                        i,
                        j,
                        k,
                        mismatch_mhz: mismatch,
                    });
                }
            }
        }
    }
    out
}
