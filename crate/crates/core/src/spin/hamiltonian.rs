use nalgebra::Matrix3;
use num_complex::Complex64;

use super::geometry::FieldVector;
use super::operators::{embed, spin_matrices, SpinMatrices, SpinQuantum};
use super::system::SpinSystem;
use super::CMatrix;
use crate::constants::{BOHR_MAGNETON_MHZ_PER_T, NUCLEAR_MAGNETON_MHZ_PER_T};
use crate::{Error, Result};

/// Electron + two spin-1 nuclei + one spin-1/2.
pub const DEFAULT_DIMENSION_CAP: usize = 64;

/// Hermitian spin Hamiltonian in MHz over the product basis
/// (electron first, nuclei in list order).
#[derive(Debug, Clone)]
pub struct HamiltonianMatrix {
    dims: Vec<usize>,
    matrix: CMatrix,
}

impl HamiltonianMatrix {
    pub fn from_matrix(dims: Vec<usize>, matrix: CMatrix) -> Result<Self> {
        let n: usize = dims.iter().product();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::invalid(format!(
                "matrix is {}×{}, factor dimensions imply {n}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(HamiltonianMatrix { dims, matrix })
    }

    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// max |H − H†|
    pub fn hermiticity_residual(&self) -> f64 {
        hermiticity_residual(&self.matrix)
    }

    pub fn norm(&self) -> f64 {
        self.matrix.norm()
    }
}

pub(crate) fn hermiticity_residual(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Σᵢⱼ Tᵢⱼ · Aᵢ Bⱼ for Cartesian operator triples.
fn bilinear(t: &Matrix3<f64>, a: [&CMatrix; 3], b: [&CMatrix; 3]) -> CMatrix {
    let n = a[0].nrows();
    let mut out = CMatrix::zeros(n, n);
    for i in 0..3 {
        for j in 0..3 {
            let tij = t[(i, j)];
            if tij != 0.0 {
                out += (a[i] * b[j]) * Complex64::from(tij);
            }
        }
    }
    out
}

pub fn build_hamiltonian(sys: &SpinSystem, field: &FieldVector) -> Result<HamiltonianMatrix> {
    build_hamiltonian_capped(sys, field, DEFAULT_DIMENSION_CAP)
}

/// μ_B·g·B·S + S·D·S + Σₖ (S·Aₖ·Iₖ + Iₖ·Qₖ·Iₖ − g_{n,k}·μ_n·B·Iₖ), MHz.
pub fn build_hamiltonian_capped(
    sys: &SpinSystem,
    field: &FieldVector,
    cap: usize,
) -> Result<HamiltonianMatrix> {
    let dims = sys.factor_dims();
    let dimension: usize = dims.iter().product();
    if dimension > cap {
        return Err(Error::DimensionCap { dimension, cap });
    }

    let b = field.tesla();
    let se = spin_matrices(SpinQuantum::ONE);
    let s = embed_all(&se, 0, &dims);
    let s_ref = [&s[0], &s[1], &s[2]];

    let mut h = CMatrix::zeros(dimension, dimension);
    for k in 0..3 {
        h += &s[k] * Complex64::from(sys.g_e() * BOHR_MAGNETON_MHZ_PER_T * b[k]);
    }
    h += bilinear(&sys.zfs().matrix(), s_ref, s_ref);

    for (slot, nucleus) in sys.nuclei().iter().enumerate() {
        let ni = spin_matrices(nucleus.spin());
        let i_ops = embed_all(&ni, slot + 1, &dims);
        let i_ref = [&i_ops[0], &i_ops[1], &i_ops[2]];
        h += bilinear(&nucleus.hyperfine().matrix(), s_ref, i_ref);
        if let Some(q) = nucleus.quadrupole() {
            h += bilinear(&q.matrix(), i_ref, i_ref);
        }
        let nz = -nucleus.g_n() * NUCLEAR_MAGNETON_MHZ_PER_T;
        for k in 0..3 {
            h += &i_ops[k] * Complex64::from(nz * b[k]);
        }
    }

    // remove rounding asymmetry from the operator products
    let h = (&h + h.adjoint()) * Complex64::from(0.5);
    HamiltonianMatrix::from_matrix(dims, h)
}

fn embed_all(ops: &SpinMatrices, slot: usize, dims: &[usize]) -> [CMatrix; 3] {
    [
        embed(&ops.x, slot, dims),
        embed(&ops.y, slot, dims),
        embed(&ops.z, slot, dims),
    ]
}
