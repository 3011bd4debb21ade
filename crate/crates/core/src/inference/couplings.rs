use nalgebra::{DMatrix, DVector, Vector3};
use serde::{Deserialize, Serialize};

use crate::constants::{G_N_13C, MT_TO_T, NUCLEAR_MAGNETON_MHZ_PER_T};
use crate::eseem::{nuclear_frequencies, ManifoldPair, TransitionSelection};
use crate::lm::{levenberg_marquardt, normal_inverse, LmOptions};
use crate::spin::{rotate_field, ElectronManifold, EulerAngles, FieldVector, SpinSystem};
use crate::{Error, Result};

/// Assumed 1σ uncertainty of the Euler misalignment angles α and β.
pub const ORIENTATION_UNCERTAINTY_DEG: f64 = 0.1;

/// One measured nuclear frequency, tied to a line of the simulated
/// manifold's sorted frequency list.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservedFrequency {
    pub manifold: ElectronManifold,
    pub index: usize,
    pub freq_mhz: f64,
}

/// Peaks measured at one field orientation and strength.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingObservation {
    pub nominal_axis: [f64; 3],
    pub euler: EulerAngles,
    pub field_mt: f64,
    pub selection: TransitionSelection,
    pub peaks: Vec<ObservedFrequency>,
}

impl CouplingObservation {
    fn field(&self, euler: &EulerAngles) -> Result<FieldVector> {
        FieldVector::new(
            self.field_mt,
            rotate_field(&Vector3::from(self.nominal_axis), euler),
        )
    }
}

/// Fitted (A∥, A⊥, P∥) of the nitrogen, MHz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingFit {
    pub a_par: f64,
    pub a_perp: f64,
    pub p_par: f64,
    /// Statistical and orientation uncertainty combined in quadrature.
    pub uncertainties: [f64; 3],
    /// Part of `uncertainties` caused by ±0.1° in α and β alone.
    pub orientation_uncertainties: [f64; 3],
    pub residual_rms_mhz: f64,
    pub iterations: usize,
}

impl CouplingFit {
    pub fn values(&self) -> [f64; 3] {
        [self.a_par, self.a_perp, self.p_par]
    }
}

fn nitrogen_slot(sys: &SpinSystem) -> Result<usize> {
    sys.nuclei()
        .iter()
        .position(|n| n.quadrupole().is_some())
        .ok_or_else(|| Error::invalid("spin system has no nucleus with a quadrupole tensor"))
}

fn with_couplings(sys: &SpinSystem, slot: usize, p: &[f64]) -> SpinSystem {
    let mut nuclei = sys.nuclei().to_vec();
    nuclei[slot] = nuclei[slot]
        .with_hyperfine(p[0], p[1])
        .with_quadrupole(p[2]);
    sys.with_nuclei(nuclei)
}

fn model_residuals(
    sys: &SpinSystem,
    observations: &[CouplingObservation],
    eulers: &[EulerAngles],
) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (obs, euler) in observations.iter().zip(eulers) {
        let freqs = nuclear_frequencies(sys, &obs.field(euler)?, &obs.selection)?;
        for peak in &obs.peaks {
            let list = freqs.get(peak.manifold);
            let model = list.get(peak.index).ok_or_else(|| {
                Error::invalid(format!(
                    "manifold {} has {} lines, index {} requested",
                    peak.manifold,
                    list.len(),
                    peak.index
                ))
            })?;
            out.push(model - peak.freq_mhz);
        }
    }
    Ok(out)
}

/// Least-squares fit of the nitrogen hyperfine and quadrupole couplings to
/// nuclear frequencies measured at one or more orientations.
pub fn fit_nitrogen_couplings(
    sys: &SpinSystem,
    observations: &[CouplingObservation],
    initial: [f64; 3],
) -> Result<CouplingFit> {
    let count: usize = observations.iter().map(|o| o.peaks.len()).sum();
    if count < 6 {
        return Err(Error::UnderDetermined(format!(
            "need at least 6 peaks for 3 couplings, got {count}"
        )));
    }
    if observations
        .iter()
        .flat_map(|o| &o.peaks)
        .any(|p| !p.freq_mhz.is_finite())
    {
        return Err(Error::DegenerateData(
            "peak frequencies must be finite".into(),
        ));
    }
    let slot = nitrogen_slot(sys)?;
    let eulers: Vec<EulerAngles> = observations.iter().map(|o| o.euler).collect();
    let residuals =
        |p: &[f64]| model_residuals(&with_couplings(sys, slot, p), observations, &eulers);
    let opts = LmOptions {
        difference_step: 1e-6,
        ..LmOptions::default()
    };
    let res = levenberg_marquardt(&residuals, None, &initial, &opts)?;
    let inverse = normal_inverse(&res.jacobian).ok_or(Error::RankDeficient)?;
    let dof = count.saturating_sub(3).max(1) as f64;
    let s2 = res.sum_squares() / dof;

    // first-order response of the fitted couplings to each misalignment angle
    let fitted = with_couplings(sys, slot, &res.params);
    let base = DVector::from_vec(res.residuals.clone());
    let jt = res.jacobian.transpose();
    let mut orientation_var = [0.0; 3];
    for k in 0..observations.len() {
        for angle in 0..2 {
            let mut shifted = eulers.clone();
            if angle == 0 {
                shifted[k].alpha += ORIENTATION_UNCERTAINTY_DEG;
            } else {
                shifted[k].beta += ORIENTATION_UNCERTAINTY_DEG;
            }
            let moved = DVector::from_vec(model_residuals(&fitted, observations, &shifted)?);
            let dp: DVector<f64> = &inverse * (&jt * (moved - &base));
            for c in 0..3 {
                orientation_var[c] += dp[c] * dp[c];
            }
        }
    }
    let mut uncertainties = [0.0; 3];
    let mut orientation_uncertainties = [0.0; 3];
    for c in 0..3 {
        orientation_uncertainties[c] = orientation_var[c].sqrt();
        uncertainties[c] = (s2 * inverse[(c, c)] + orientation_var[c]).sqrt();
    }
    Ok(CouplingFit {
        a_par: res.params[0],
        a_perp: res.params[1],
        p_par: res.params[2],
        uncertainties,
        orientation_uncertainties,
        residual_rms_mhz: res.rms(),
        iterations: res.iterations,
    })
}

/// Sensitivity of the observed frequencies to the couplings at `params`;
/// exposed for diagnosing rank deficiency of an observation design.
pub fn coupling_sensitivity(
    sys: &SpinSystem,
    observations: &[CouplingObservation],
    params: [f64; 3],
) -> Result<DMatrix<f64>> {
    let slot = nitrogen_slot(sys)?;
    let eulers: Vec<EulerAngles> = observations.iter().map(|o| o.euler).collect();
    let residuals =
        |p: &[f64]| model_residuals(&with_couplings(sys, slot, p), observations, &eulers);
    let r0 = residuals(&params)?;
    crate::lm::numeric_jacobian(&residuals, &params, &r0, &LmOptions::default())
}

/// ¹³C Larmor frequency g_n·μ_N·B, MHz.
pub fn c13_larmor_mhz(field_mt: f64) -> f64 {
    G_N_13C * NUCLEAR_MAGNETON_MHZ_PER_T * field_mt * MT_TO_T
}

/// Secular couplings consistent with a line at `nu_mhz` in `manifold`, given
/// ν = |m_S·A − ν_I|. Both signs of the absolute value are returned, so the
/// result is a candidate set rather than a unique value. The m_S = 0
/// manifold carries no coupling information.
pub fn c13_candidates(larmor_mhz: f64, nu_mhz: f64, manifold: ElectronManifold) -> Vec<f64> {
    let mut out = match manifold {
        ElectronManifold::Plus => vec![larmor_mhz - nu_mhz, larmor_mhz + nu_mhz],
        ElectronManifold::Minus => vec![-larmor_mhz - nu_mhz, -larmor_mhz + nu_mhz],
        ElectronManifold::Zero => Vec::new(),
    };
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    out
}

/// Couplings implied by one shifted peak.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakCandidates {
    pub freq_mhz: f64,
    pub candidates: Vec<f64>,
}

/// ¹³C coupling read off an FT peak list: the peak at the Larmor frequency
/// anchors the assignment and every other peak yields a sign-ambiguous
/// candidate pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignAmbiguousCoupling {
    pub larmor_mhz: f64,
    pub anchor_mhz: f64,
    pub manifold: ElectronManifold,
    pub candidates: Vec<f64>,
    pub per_peak: Vec<PeakCandidates>,
}

pub fn extract_c13_coupling(
    peaks_mhz: &[f64],
    field_mt: f64,
    pair: ManifoldPair,
    tolerance_mhz: f64,
) -> Result<SignAmbiguousCoupling> {
    let larmor = c13_larmor_mhz(field_mt);
    let anchor = peaks_mhz
        .iter()
        .copied()
        .filter(|f| (f - larmor).abs() <= tolerance_mhz)
        .min_by(|a, b| (a - larmor).abs().total_cmp(&(b - larmor).abs()))
        .ok_or(Error::NoLarmorAnchor { larmor_mhz: larmor })?;
    let (lower, upper) = pair.manifolds();
    let manifold = if lower == ElectronManifold::Zero {
        upper
    } else {
        lower
    };
    let per_peak: Vec<PeakCandidates> = peaks_mhz
        .iter()
        .filter(|f| **f != anchor)
        .map(|f| PeakCandidates {
            freq_mhz: *f,
            candidates: c13_candidates(larmor, *f, manifold),
        })
        .collect();
    let mut candidates: Vec<f64> = per_peak
        .iter()
        .flat_map(|p| p.candidates.iter().copied())
        .collect();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    Ok(SignAmbiguousCoupling {
        larmor_mhz: larmor,
        anchor_mhz: anchor,
        manifold,
        candidates,
        per_peak,
    })
}
