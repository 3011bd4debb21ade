//! Crystal geometry: NV site axes, Euler misalignment and field vectors.

use nalgebra::{Matrix3, Rotation3, Unit, Vector3};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Unit vector along [111]; spin-system tensors are specified for this site.
pub const REFERENCE_SITE_AXIS: [f64; 3] = [
    0.577_350_269_189_625_8,
    0.577_350_269_189_625_8,
    0.577_350_269_189_625_8,
];

/// Euler angles in degrees, ZYZ.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EulerAngles {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl EulerAngles {
    pub const fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        EulerAngles { alpha, beta, gamma }
    }

    /// `Rz(α)·Ry(β)·Rz(γ)`.
    pub fn matrix(&self) -> Matrix3<f64> {
        rz(self.alpha.to_radians()) * ry(self.beta.to_radians()) * rz(self.gamma.to_radians())
    }
}

impl From<[f64; 3]> for EulerAngles {
    fn from(a: [f64; 3]) -> Self {
        EulerAngles::new(a[0], a[1], a[2])
    }
}

fn rz(t: f64) -> Matrix3<f64> {
    let (s, c) = t.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

fn ry(t: f64) -> Matrix3<f64> {
    let (s, c) = t.sin_cos();
    Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

/// Static field: magnitude in mT along a unit direction in the crystal frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldVector {
    magnitude_mt: f64,
    direction: Vector3<f64>,
}

impl FieldVector {
    pub fn new(magnitude_mt: f64, direction: Vector3<f64>) -> Result<Self> {
        if !(magnitude_mt.is_finite() && magnitude_mt >= 0.0) {
            return Err(Error::invalid(format!(
                "field magnitude must be ≥ 0, got {magnitude_mt}"
            )));
        }
        let n = direction.norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::invalid("field direction must be a non-zero vector"));
        }
        Ok(FieldVector {
            magnitude_mt,
            direction: direction / n,
        })
    }

    pub fn magnitude_mt(&self) -> f64 {
        self.magnitude_mt
    }

    pub fn direction(&self) -> Vector3<f64> {
        self.direction
    }

    /// Field vector in tesla.
    pub fn tesla(&self) -> Vector3<f64> {
        self.direction * (self.magnitude_mt * crate::constants::MT_TO_T)
    }

    pub fn with_magnitude(&self, magnitude_mt: f64) -> Self {
        FieldVector {
            magnitude_mt,
            direction: self.direction,
        }
    }
}

/// The four NV orientations: [111], [1̄1̄1] family, each normalized.
pub fn nv_site_axes() -> [Vector3<f64>; 4] {
    let r = 1.0 / 3f64.sqrt();
    [
        Vector3::new(1.0, 1.0, 1.0) * r,
        Vector3::new(1.0, -1.0, -1.0) * r,
        Vector3::new(-1.0, 1.0, -1.0) * r,
        Vector3::new(-1.0, -1.0, 1.0) * r,
    ]
}

/// Polar and azimuthal angles (θ, φ) of a direction, radians.
pub fn spherical_angles(v: &Vector3<f64>) -> (f64, f64) {
    let n = v.norm();
    let theta = (v.z / n).clamp(-1.0, 1.0).acos();
    let phi = v.y.atan2(v.x);
    (theta, phi)
}

/// Misaligns a nominal field direction by Euler angles.
///
/// The nominal direction is written as the laboratory ẑ axis seen from the
/// crystal frame, `Rz(φ₀)·Ry(θ₀)·ẑ`. The misaligned direction is
/// `Rz(φ₀+α)·Ry(θ₀+β)·Rz(γ)·ẑ`; γ turns about the field itself and so leaves
/// the direction unchanged. All-zero angles return the nominal direction.
pub fn rotate_field(nominal: &Vector3<f64>, euler: &EulerAngles) -> Vector3<f64> {
    let (theta0, phi0) = spherical_angles(nominal);
    let r = rz(phi0 + euler.alpha.to_radians())
        * ry(theta0 + euler.beta.to_radians())
        * rz(euler.gamma.to_radians());
    r * Vector3::z()
}

pub fn angle_between_deg(a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    // atan2 form stays accurate for nearly parallel vectors
    a.cross(b).norm().atan2(a.dot(b)).to_degrees()
}

/// Proper rotation taking the reference [111] axis onto `axis`.
///
/// For the four NV axes this is the lattice C₂ rotation about x, y or z, so
/// tensors of neighbouring nuclei map onto equivalent lattice positions.
pub fn site_rotation(axis: &Vector3<f64>) -> Matrix3<f64> {
    let target = axis.normalize();
    let reference = Vector3::from(REFERENCE_SITE_AXIS);
    for sign in [
        Vector3::new(1.0, 1.0, 1.0),
        Vector3::new(1.0, -1.0, -1.0),
        Vector3::new(-1.0, 1.0, -1.0),
        Vector3::new(-1.0, -1.0, 1.0),
    ] {
        let m = Matrix3::from_diagonal(&sign);
        if (m * reference - target).norm() < 1e-9 {
            return m;
        }
    }
    match Rotation3::rotation_between(&reference, &target) {
        Some(r) => r.into_inner(),
        None => {
            let perp = Unit::new_normalize(Vector3::new(1.0, -1.0, 0.0));
            Rotation3::from_axis_angle(&perp, std::f64::consts::PI).into_inner()
        }
    }
}

/// All 48 signed permutation matrices (the full cubic point group Oₕ).
pub fn cubic_point_group() -> Vec<Matrix3<f64>> {
    const PERMS: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let mut ops = Vec::with_capacity(48);
    for p in PERMS {
        for signs in 0..8u8 {
            let mut m = Matrix3::zeros();
            for (row, &col) in p.iter().enumerate() {
                m[(row, col)] = if signs & (1 << row) != 0 { -1.0 } else { 1.0 };
            }
            ops.push(m);
        }
    }
    ops
}
