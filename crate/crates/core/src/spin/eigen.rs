//! Cyclic Jacobi eigensolver for small dense Hermitian matrices.

use nalgebra::DVector;
use num_complex::Complex64;

use super::hamiltonian::{hermiticity_residual, HamiltonianMatrix};
use super::CMatrix;
use crate::{Error, Result};

const HERMITIAN_TOLERANCE: f64 = 1e-9;
const MAX_SWEEPS: usize = 100;

/// Ascending eigenvalues (MHz) and unitary eigenvectors (columns).
///
/// Each eigenvector's largest-magnitude component is real and positive.
#[derive(Debug, Clone)]
pub struct EigenSolution {
    values: DVector<f64>,
    vectors: CMatrix,
}

impl EigenSolution {
    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.values
    }

    pub fn eigenvectors(&self) -> &CMatrix {
        &self.vectors
    }

    pub fn dimension(&self) -> usize {
        self.values.len()
    }

    /// ‖H·V − V·Λ‖_F
    pub fn reconstruction_residual(&self, h: &CMatrix) -> f64 {
        let lambda = CMatrix::from_diagonal(&self.values.map(Complex64::from));
        (h * &self.vectors - &self.vectors * lambda).norm()
    }
}

/// Diagonalizes a Hermitian Hamiltonian.
pub fn eigensolve(h: &HamiltonianMatrix) -> Result<EigenSolution> {
    eigensolve_matrix(h.matrix())
}

pub(crate) fn eigensolve_matrix(h: &CMatrix) -> Result<EigenSolution> {
    let n = h.nrows();
    if h.ncols() != n {
        return Err(Error::invalid("eigensolve needs a square matrix"));
    }
    let scale = h.norm();
    let residual = hermiticity_residual(h);
    let tolerance = HERMITIAN_TOLERANCE * scale.max(f64::MIN_POSITIVE);
    if residual > tolerance && residual > 0.0 {
        return Err(Error::NotHermitian {
            residual,
            tolerance,
        });
    }

    let mut a = (h + h.adjoint()) * Complex64::from(0.5);
    let mut v = CMatrix::identity(n, n);
    let threshold = 1e-14 * scale;

    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > threshold {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = DVector::from_iterator(n, order.iter().map(|&i| a[(i, i)].re));
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = v.column(src).clone_owned();
        fix_phase(col.as_mut_slice());
        vectors.set_column(dst, &col);
    }
    Ok(EigenSolution { values, vectors })
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Zeroes a[p,q] with the unitary [[c, −s·e^{iφ}], [s·e^{−iφ}, c]].
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let b = a[(p, q)];
    let mag = b.norm();
    if mag == 0.0 {
        return;
    }
    let phase = b / mag;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let zeta = (aqq - app) / (2.0 * mag);
    let t = if zeta >= 0.0 {
        -1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
    } else {
        1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let s_conj_phase = phase.conj() * s; // s·e^{−iφ}
    let s_phase = phase * s; // s·e^{iφ}
    let n = a.nrows();

    // columns: A ← A·U
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c + akq * s_conj_phase;
        a[(k, q)] = -akp * s_phase + akq * c;
    }
    // rows: A ← U†·A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c + aqk * s_phase;
        a[(q, k)] = -apk * s_conj_phase + aqk * c;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::from(a[(p, p)].re);
    a[(q, q)] = Complex64::from(a[(q, q)].re);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c + vkq * s_conj_phase;
        v[(k, q)] = -vkp * s_phase + vkq * c;
    }
}

/// Makes the largest-magnitude entry real and positive; the first index wins
/// among entries tied within 1e-10.
pub(crate) fn fix_phase(col: &mut [Complex64]) {
    let max = col.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let pivot = col
        .iter()
        .position(|z| z.norm() >= max * (1.0 - 1e-10))
        .unwrap_or(0);
    let rot = col[pivot].conj() / col[pivot].norm();
    for z in col.iter_mut() {
        *z *= rot;
    }
    col[pivot] = Complex64::from(col[pivot].re);
}
