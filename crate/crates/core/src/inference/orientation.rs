use nalgebra::Vector3;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::lm::{levenberg_marquardt, LmOptions, LmResult};
use crate::spectra::{track_resonance, TransitionLabel};
use crate::spin::{
    angle_between_deg, cubic_point_group, nv_site_axes, rotate_field, spherical_angles,
    EulerAngles, SpinSystem,
};
use crate::{Error, Result};

/// A resonance line whose site and branch have been assigned.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasuredPeak {
    pub label: TransitionLabel,
    pub field_mt: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakResidual {
    pub label: TransitionLabel,
    pub measured_mt: f64,
    pub model_mt: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrientationFit {
    /// Misalignment relative to the nominal direction; γ is 0 because it
    /// does not move the field.
    pub euler: EulerAngles,
    pub direction: [f64; 3],
    pub residual_rms_mt: f64,
    pub residuals: Vec<PeakResidual>,
    pub starts: usize,
}

fn direction_of(theta_deg: f64, phi_deg: f64) -> Vector3<f64> {
    let (st, ct) = theta_deg.to_radians().sin_cos();
    let (sp, cp) = phi_deg.to_radians().sin_cos();
    Vector3::new(st * cp, st * sp, ct)
}

fn wrap_deg(a: f64) -> f64 {
    let w = (a + 180.0).rem_euclid(360.0) - 180.0;
    if w == -180.0 {
        180.0
    } else {
        w
    }
}

/// Fits the absolute field direction to assigned resonance fields, starting
/// from the nominal direction misaligned by `initial` and from rings of
/// perturbed starts around it; the lowest-cost solution wins.
pub fn fit_orientation(
    peaks: &[MeasuredPeak],
    sys: &SpinSystem,
    mw_ghz: f64,
    nominal: &Vector3<f64>,
    initial: &EulerAngles,
) -> Result<OrientationFit> {
    if peaks.len() < 4 {
        return Err(Error::UnderDetermined(format!(
            "need at least 4 assigned lines, got {}",
            peaks.len()
        )));
    }
    if peaks
        .iter()
        .any(|p| !(p.field_mt.is_finite() && p.field_mt > 0.0))
    {
        return Err(Error::DegenerateData(
            "resonance fields must be positive".into(),
        ));
    }
    let axes = nv_site_axes();
    let site_systems: Vec<SpinSystem> = axes
        .iter()
        .map(|a| sys.electron_only().for_site(a))
        .collect();
    let model = |p: &[f64]| -> Result<Vec<f64>> {
        let dir = direction_of(p[0], p[1]);
        peaks
            .iter()
            .map(|pk| {
                let site = &site_systems[pk.label.site() as usize - 1];
                track_resonance(site, pk.label.branch(), mw_ghz, &dir, pk.field_mt)
            })
            .collect()
    };
    let residuals = |p: &[f64]| -> Result<Vec<f64>> {
        Ok(model(p)?
            .iter()
            .zip(peaks)
            .map(|(m, pk)| m - pk.field_mt)
            .collect())
    };

    let (t0, p0) = spherical_angles(&rotate_field(nominal, initial));
    let (t0, p0) = (t0.to_degrees(), p0.to_degrees());
    let mut starts = vec![[t0, p0]];
    for radius in [1.0, 3.0, 6.0] {
        for k in 0..8 {
            let az = (k as f64 * 45.0).to_radians();
            starts.push([
                t0 + radius * az.cos(),
                p0 + radius * az.sin() / t0.to_radians().sin().max(0.05),
            ]);
        }
    }
    let opts = LmOptions {
        difference_step: 1e-7,
        ..LmOptions::default()
    };
    let results: Vec<LmResult> = starts
        .par_iter()
        .filter_map(|s| levenberg_marquardt(&residuals, None, s, &opts).ok())
        .collect();
    let best = results
        .into_iter()
        .min_by(|a, b| a.sum_squares().total_cmp(&b.sum_squares()))
        .ok_or(Error::NonConvergence {
            iterations: opts.max_iterations,
        })?;

    let dir = direction_of(best.params[0], best.params[1]);
    let (theta, phi) = spherical_angles(&dir);
    let (theta_n, phi_n) = spherical_angles(nominal);
    let euler = EulerAngles::new(
        wrap_deg((phi - phi_n).to_degrees()),
        (theta - theta_n).to_degrees(),
        0.0,
    );
    let fields = model(&best.params)?;
    let residuals = peaks
        .iter()
        .zip(fields)
        .map(|(pk, m)| PeakResidual {
            label: pk.label,
            measured_mt: pk.field_mt,
            model_mt: m,
        })
        .collect();
    Ok(OrientationFit {
        euler,
        direction: [dir.x, dir.y, dir.z],
        residual_rms_mt: best.rms(),
        residuals,
        starts: starts.len(),
    })
}

/// Smallest angle between `a` and any cubic-group image of `b`, degrees.
/// Directions related by a lattice symmetry give identical spectra up to a
/// relabeling of sites.
pub fn direction_class_distance_deg(a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    cubic_point_group()
        .iter()
        .map(|g| angle_between_deg(a, &(g * b)))
        .fold(f64::INFINITY, f64::min)
}
