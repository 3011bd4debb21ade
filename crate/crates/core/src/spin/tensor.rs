use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Axially symmetric 3×3 interaction tensor, MHz.
///
/// Reconstructed as `⊥·1 + (∥ − ⊥)·a·aᵀ`, i.e. `R·diag(⊥, ⊥, ∥)·Rᵀ` for any
/// rotation `R` taking ẑ to the unique axis `a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawAxialTensor", into = "RawAxialTensor")]
pub struct AxialTensor {
    parallel: f64,
    perpendicular: f64,
    axis: Vector3<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAxialTensor {
    parallel: f64,
    perpendicular: f64,
    axis: [f64; 3],
}

impl TryFrom<RawAxialTensor> for AxialTensor {
    type Error = Error;
    fn try_from(raw: RawAxialTensor) -> Result<Self> {
        AxialTensor::new(raw.parallel, raw.perpendicular, Vector3::from(raw.axis))
    }
}

impl From<AxialTensor> for RawAxialTensor {
    fn from(t: AxialTensor) -> Self {
        RawAxialTensor {
            parallel: t.parallel,
            perpendicular: t.perpendicular,
            axis: t.axis.into(),
        }
    }
}

impl AxialTensor {
    /// The axis is normalized; a zero or non-finite axis is rejected.
    pub fn new(parallel: f64, perpendicular: f64, axis: Vector3<f64>) -> Result<Self> {
        let norm = axis.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::invalid(
                "tensor axis must be a non-zero finite vector",
            ));
        }
        if !(parallel.is_finite() && perpendicular.is_finite()) {
            return Err(Error::invalid("tensor principal values must be finite"));
        }
        // axes already of unit length up to rounding are kept verbatim, so a
        // serialized tensor reloads bit for bit
        let axis = if (norm - 1.0).abs() <= 4.0 * f64::EPSILON {
            axis
        } else {
            axis / norm
        };
        Ok(AxialTensor {
            parallel,
            perpendicular,
            axis,
        })
    }

    /// Traceless zero-field splitting tensor: ∥ = 2D/3, ⊥ = −D/3.
    pub fn zero_field_splitting(d_mhz: f64, axis: Vector3<f64>) -> Result<Self> {
        Self::new(2.0 * d_mhz / 3.0, -d_mhz / 3.0, axis)
    }

    /// Traceless axial quadrupole tensor (η = 0): ∥ = P∥, ⊥ = −P∥/2.
    pub fn quadrupole(p_parallel_mhz: f64, axis: Vector3<f64>) -> Result<Self> {
        Self::new(p_parallel_mhz, -p_parallel_mhz / 2.0, axis)
    }

    pub fn isotropic(value: f64) -> Self {
        AxialTensor {
            parallel: value,
            perpendicular: value,
            axis: Vector3::z(),
        }
    }

    pub fn parallel(&self) -> f64 {
        self.parallel
    }

    pub fn perpendicular(&self) -> f64 {
        self.perpendicular
    }

    pub fn axis(&self) -> Vector3<f64> {
        self.axis
    }

    /// (∥ + 2⊥)/3
    pub fn isotropic_part(&self) -> f64 {
        (self.parallel + 2.0 * self.perpendicular) / 3.0
    }

    /// (∥ − ⊥)/3
    pub fn anisotropic_part(&self) -> f64 {
        (self.parallel - self.perpendicular) / 3.0
    }

    pub fn with_principal_values(&self, parallel: f64, perpendicular: f64) -> Self {
        AxialTensor {
            parallel,
            perpendicular,
            axis: self.axis,
        }
    }

    pub fn rotated(&self, rotation: &Matrix3<f64>) -> Self {
        let axis = rotation * self.axis;
        AxialTensor {
            axis: axis / axis.norm(),
            ..*self
        }
    }

    pub fn matrix(&self) -> Matrix3<f64> {
        let a = self.axis;
        Matrix3::identity() * self.perpendicular
            + (a * a.transpose()) * (self.parallel - self.perpendicular)
    }
}
