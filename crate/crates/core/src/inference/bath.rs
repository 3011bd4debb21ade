use serde::{Deserialize, Serialize};

use crate::constants::{
    BOHR_MAGNETON_J_PER_T, DIAMOND_ATOMIC_DENSITY_CM3, G_NV, MU0_OVER_4PI, PLANCK_J_S,
};
use crate::{Error, Result};

/// Dimensionless factor between the pair coupling at the mean spacing
/// n^(−1/3) and the reported mean dipolar coupling.
pub const DIPOLAR_PREFACTOR: f64 = 1.0;

/// Paramagnetic bath of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathParams {
    pub p1_concentration_ppm: f64,
    pub inhomogeneous_linewidth_khz: f64,
    pub carbon13_abundance: f64,
}

impl BathParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.p1_concentration_ppm >= 0.0 && self.inhomogeneous_linewidth_khz >= 0.0) {
            return Err(Error::invalid("bath parameters must be non-negative"));
        }
        if !(0.0..=1.0).contains(&self.carbon13_abundance) {
            return Err(Error::invalid("13C abundance must lie in [0, 1]"));
        }
        Ok(())
    }
}

/// Parts per million of lattice sites to spins per cm³.
pub fn ppm_to_cm3(ppm: f64) -> f64 {
    ppm * 1e-6 * DIAMOND_ATOMIC_DENSITY_CM3
}

/// C·(μ₀/4π)·g²μ_B²·n/h in kHz for a spin density in cm⁻³.
pub fn mean_dipolar_coupling(concentration_cm3: f64) -> Result<f64> {
    if !(concentration_cm3.is_finite() && concentration_cm3 > 0.0) {
        return Err(Error::invalid("concentration must be positive"));
    }
    let per_m3 = concentration_cm3 * 1e6;
    let hz = DIPOLAR_PREFACTOR * MU0_OVER_4PI * (G_NV * BOHR_MAGNETON_J_PER_T).powi(2) * per_m3
        / PLANCK_J_S;
    Ok(hz * 1e-3)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlipFlopEstimate {
    /// Share of pairs close enough in frequency to flip-flop.
    pub fraction: f64,
    pub corrected_t2_ms: f64,
    pub base_t2_ms: f64,
}

/// Only pairs within the coupling of each other in an inhomogeneous line
/// can flip-flop, which stretches the flip-flop-limited T₂ accordingly.
pub fn flip_flop_suppression(
    coupling_khz: f64,
    linewidth_khz: f64,
    base_t2_ms: f64,
) -> Result<FlipFlopEstimate> {
    if !(coupling_khz > 0.0 && base_t2_ms > 0.0 && linewidth_khz.is_finite()) {
        return Err(Error::invalid("coupling and base T2 must be positive"));
    }
    if coupling_khz >= linewidth_khz {
        return Err(Error::InvalidRegime {
            coupling_khz,
            linewidth_khz,
        });
    }
    Ok(FlipFlopEstimate {
        fraction: coupling_khz / linewidth_khz,
        corrected_t2_ms: base_t2_ms * linewidth_khz / coupling_khz,
        base_t2_ms,
    })
}
