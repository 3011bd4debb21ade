use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::CMatrix;
use crate::{Error, Result};

/// Spin multiplicity 2S+1 (or 2I+1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct SpinQuantum(u32);

impl SpinQuantum {
    pub const HALF: SpinQuantum = SpinQuantum(2);
    pub const ONE: SpinQuantum = SpinQuantum(3);

    pub fn from_multiplicity(multiplicity: u32) -> Result<Self> {
        if multiplicity < 2 {
            return Err(Error::invalid(format!(
                "spin multiplicity must be at least 2, got {multiplicity}"
            )));
        }
        Ok(SpinQuantum(multiplicity))
    }

    /// From a spin value such as 0.5 or 1.0.
    pub fn from_spin(spin: f64) -> Result<Self> {
        let m = 2.0 * spin + 1.0;
        if (m - m.round()).abs() > 1e-9 || m < 1.5 {
            return Err(Error::invalid(format!(
                "{spin} is not a positive half-integer spin"
            )));
        }
        Self::from_multiplicity(m.round() as u32)
    }

    pub fn multiplicity(self) -> usize {
        self.0 as usize
    }

    pub fn spin(self) -> f64 {
        (self.0 as f64 - 1.0) / 2.0
    }
}

impl TryFrom<u32> for SpinQuantum {
    type Error = Error;
    fn try_from(value: u32) -> Result<Self> {
        SpinQuantum::from_multiplicity(value)
    }
}

impl From<SpinQuantum> for u32 {
    fn from(value: SpinQuantum) -> u32 {
        value.0
    }
}

/// Cartesian spin operators in the |S, m⟩ basis ordered m = S, S−1, …, −S.
#[derive(Debug, Clone)]
pub struct SpinMatrices {
    pub x: CMatrix,
    pub y: CMatrix,
    pub z: CMatrix,
}

impl SpinMatrices {
    pub fn components(&self) -> [&CMatrix; 3] {
        [&self.x, &self.y, &self.z]
    }

    /// Spin component along a (not necessarily unit) vector.
    pub fn along(&self, v: &nalgebra::Vector3<f64>) -> CMatrix {
        &self.x * Complex64::from(v.x)
            + &self.y * Complex64::from(v.y)
            + &self.z * Complex64::from(v.z)
    }
}

pub fn spin_matrices(spin: SpinQuantum) -> SpinMatrices {
    let n = spin.multiplicity();
    let s = spin.spin();
    let m = |k: usize| s - k as f64;

    let mut plus = CMatrix::zeros(n, n);
    for k in 1..n {
        // ⟨m+1|S+|m⟩ with m = m(k), m+1 = m(k-1)
        let mk = m(k);
        plus[(k - 1, k)] = Complex64::from((s * (s + 1.0) - mk * (mk + 1.0)).sqrt());
    }
    let minus = plus.adjoint();
    let z = CMatrix::from_fn(n, n, |r, c| {
        if r == c {
            Complex64::from(m(r))
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let x = (&plus + &minus) * Complex64::from(0.5);
    let y = (&plus - &minus) * Complex64::new(0.0, -0.5);
    SpinMatrices { x, y, z }
}

pub fn identity(n: usize) -> CMatrix {
    DMatrix::identity(n, n)
}

/// Embeds `op` acting on factor `slot` of a tensor product with the given
/// factor dimensions.
pub fn embed(op: &CMatrix, slot: usize, dims: &[usize]) -> CMatrix {
    let mut out = identity(1);
    for (k, &d) in dims.iter().enumerate() {
        out = if k == slot {
            out.kronecker(op)
        } else {
            out.kronecker(&identity(d))
        };
    }
    out
}
