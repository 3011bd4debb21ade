//! Fits and estimates built on the forward models.

mod bath;
mod couplings;
mod fluctuator;
mod orientation;

pub use bath::{
    flip_flop_suppression, mean_dipolar_coupling, ppm_to_cm3, BathParams, FlipFlopEstimate,
    DIPOLAR_PREFACTOR,
};
pub use couplings::{
    c13_candidates, c13_larmor_mhz, coupling_sensitivity, extract_c13_coupling,
    fit_nitrogen_couplings, CouplingFit, CouplingObservation, ObservedFrequency, PeakCandidates,
    SignAmbiguousCoupling, ORIENTATION_UNCERTAINTY_DEG,
};
pub use fluctuator::{
    correlation_time_s, fit_t2_temperature, fluctuator_rate, ou_echo_envelope, t2_of_temperature,
    FluctuatorFit, FluctuatorModel,
};
pub use orientation::{
    direction_class_distance_deg, fit_orientation, MeasuredPeak, OrientationFit, PeakResidual,
};
