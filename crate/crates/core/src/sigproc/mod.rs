//! Echo-data processing: decay fits, decay normalization, cosine FT with
//! dead-time phase correction, detection-bandwidth filtering and peak lists.

mod decay;
mod filter;
mod ft;
mod peaks;

pub use decay::{
    fit_stretched_exponential, normalize_by_decay, stretched_exponential, EchoDecay,
    StretchedExpFit,
};
pub use filter::detection_bandwidth_filter;
pub use ft::{cosine_ft, phase_correct_first_order, FtSpectrum, FtWindow, DEFAULT_ZERO_FILL};
pub use peaks::{check_additive_relation, pick_peaks, AdditiveTriple, Peak, PeakList};
