//! Laboratory-frame spin Hamiltonian of an S = 1 electron coupled to nuclei.

mod eigen;
mod geometry;
mod hamiltonian;
mod levels;
mod operators;
mod system;
mod tensor;

pub(crate) use eigen::eigensolve_matrix;
pub use eigen::{eigensolve, EigenSolution};
pub use geometry::{
    angle_between_deg, cubic_point_group, nv_site_axes, rotate_field, site_rotation,
    spherical_angles, EulerAngles, FieldVector, REFERENCE_SITE_AXIS,
};
pub use hamiltonian::{
    build_hamiltonian, build_hamiltonian_capped, HamiltonianMatrix, DEFAULT_DIMENSION_CAP,
};
pub(crate) use levels::label_levels;
pub use levels::{electron_levels, ElectronLevels, ElectronManifold, MANIFOLD_WEIGHT_THRESHOLD};
pub use operators::{embed, identity, spin_matrices, SpinMatrices, SpinQuantum};
pub use system::{NucleusSpec, SpinSystem};
pub use tensor::AxialTensor;

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
