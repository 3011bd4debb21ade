//! Physical constants, in the frequency units used throughout the crate.
//!
//! Every module reads these from here; nothing else hard-codes a constant.

/// Bohr magneton over Planck's constant, MHz/T.
pub const BOHR_MAGNETON_MHZ_PER_T: f64 = 13_996.2;

/// Nuclear magneton over Planck's constant, MHz/T.
pub const NUCLEAR_MAGNETON_MHZ_PER_T: f64 = 7.622_593;

/// Nuclear g-factor of ¹⁴N.
pub const G_N_14N: f64 = 0.403_761;

/// Nuclear g-factor of ¹³C.
pub const G_N_13C: f64 = 1.404_824;

/// Free-ish electron g-factor of NV⁻ (isotropic).
pub const G_NV: f64 = 2.0030;

/// Axial zero-field splitting of NV⁻, MHz.
pub const D_NV_MHZ: f64 = 2873.0;

/// Boltzmann constant, meV/K.
pub const BOLTZMANN_MEV_PER_K: f64 = 0.086_173_3;

/// Atomic density of diamond, cm⁻³.
pub const DIAMOND_ATOMIC_DENSITY_CM3: f64 = 1.762e23;

/// Natural abundance of ¹³C.
pub const C13_NATURAL_ABUNDANCE: f64 = 0.0107;

/// μ₀/4π in SI units (T·m/A).
pub const MU0_OVER_4PI: f64 = 1.0e-7;

/// Bohr magneton, J/T.
pub const BOHR_MAGNETON_J_PER_T: f64 = 9.274_010_078_3e-24;

/// Planck constant, J·s.
pub const PLANCK_J_S: f64 = 6.626_070_15e-34;

/// Field in mT to tesla.
pub const MT_TO_T: f64 = 1.0e-3;
