//! Laboratory-frame labels T₋, T₀, T₊ for electron eigenstates.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::eigen::{eigensolve_matrix, EigenSolution};
use super::geometry::FieldVector;
use super::hamiltonian::build_hamiltonian;
use super::operators::{spin_matrices, SpinQuantum};
use super::system::SpinSystem;
use super::CMatrix;
use crate::{Error, Result};

/// Minimum weight of a single laboratory-frame m_S state for a level to be
/// labeled.
pub const MANIFOLD_WEIGHT_THRESHOLD: f64 = 0.9;

/// Electron spin projection along B₀.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElectronManifold {
    Minus,
    Zero,
    Plus,
}

impl ElectronManifold {
    pub const ALL: [ElectronManifold; 3] = [
        ElectronManifold::Minus,
        ElectronManifold::Zero,
        ElectronManifold::Plus,
    ];

    pub fn m_s(self) -> i8 {
        match self {
            ElectronManifold::Minus => -1,
            ElectronManifold::Zero => 0,
            ElectronManifold::Plus => 1,
        }
    }

    pub fn index(self) -> usize {
        (self.m_s() + 1) as usize
    }

    pub fn symbol(self) -> &'static str {
        match self {
            ElectronManifold::Minus => "T-",
            ElectronManifold::Zero => "T0",
            ElectronManifold::Plus => "T+",
        }
    }
}

impl std::fmt::Display for ElectronManifold {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ElectronManifold::Minus => "minus",
            ElectronManifold::Zero => "zero",
            ElectronManifold::Plus => "plus",
        })
    }
}

impl std::str::FromStr for ElectronManifold {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "minus" | "-1" | "t-" => Ok(ElectronManifold::Minus),
            "zero" | "0" | "t0" => Ok(ElectronManifold::Zero),
            "plus" | "+1" | "1" | "t+" => Ok(ElectronManifold::Plus),
            other => Err(Error::invalid(format!(
                "unknown electron manifold {other:?}"
            ))),
        }
    }
}

/// Eigenstates of (b̂·S) ordered m_S = −1, 0, +1.
pub(crate) fn lab_frame_basis(direction: &nalgebra::Vector3<f64>) -> Result<CMatrix> {
    let s = spin_matrices(SpinQuantum::ONE);
    let sb = s.along(direction);
    Ok(eigensolve_matrix(&sb)?.eigenvectors().clone())
}

/// Electron-only levels labeled by dominant laboratory-frame m_S.
#[derive(Debug, Clone)]
pub struct ElectronLevels {
    energies: [f64; 3],
    states: [DVector<Complex64>; 3],
    min_weight: f64,
}

impl ElectronLevels {
    pub fn energy(&self, m: ElectronManifold) -> f64 {
        self.energies[m.index()]
    }

    pub fn state(&self, m: ElectronManifold) -> &DVector<Complex64> {
        &self.states[m.index()]
    }

    /// Smallest dominant-m_S weight among the three levels.
    pub fn min_weight(&self) -> f64 {
        self.min_weight
    }
}

/// Diagonalizes the electron part of `sys` and labels the levels.
pub fn electron_levels(sys: &SpinSystem, field: &FieldVector) -> Result<ElectronLevels> {
    let h = build_hamiltonian(&sys.electron_only(), field)?;
    let sol = eigensolve_matrix(h.matrix())?;
    label_levels(&sol, &field.direction())
}

pub(crate) fn label_levels(
    sol: &EigenSolution,
    direction: &nalgebra::Vector3<f64>,
) -> Result<ElectronLevels> {
    let basis = lab_frame_basis(direction)?;
    let vecs = sol.eigenvectors();
    let mut assigned: [Option<usize>; 3] = [None; 3];
    let mut min_weight = 1.0f64;
    for k in 0..3 {
        let col = vecs.column(k);
        let weights: Vec<f64> = (0..3)
            .map(|m| basis.column(m).dotc(&col).norm_sqr())
            .collect();
        let (m, &w) = weights
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("three weights");
        if w < MANIFOLD_WEIGHT_THRESHOLD || assigned[m].is_some() {
            return Err(Error::AmbiguousManifold {
                weight: w,
                threshold: MANIFOLD_WEIGHT_THRESHOLD,
            });
        }
        assigned[m] = Some(k);
        min_weight = min_weight.min(w);
    }
    let idx = assigned.map(|k| k.expect("every manifold assigned"));
    Ok(ElectronLevels {
        energies: idx.map(|k| sol.eigenvalues()[k]),
        states: idx.map(|k| vecs.column(k).clone_owned()),
        min_weight,
    })
}
