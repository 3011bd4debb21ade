use crate::eseem::EseemTrace;
use crate::{Error, Result};

/// Centered moving average of width `integration_window_ns`, modelling a
/// boxcar integrator. K = round(w/Δ) taps; an even K becomes K+1 taps with
/// half-weight ends so the effective width stays w. Near the edges the
/// average runs over the samples that exist.
pub fn detection_bandwidth_filter(
    trace: &EseemTrace,
    integration_window_ns: f64,
) -> Result<EseemTrace> {
    if !(integration_window_ns.is_finite() && integration_window_ns > 0.0) {
        return Err(Error::invalid("integration window must be positive"));
    }
    if trace.tau_us.len() < 2 {
        return Ok(trace.clone());
    }
    let step_ns = (trace.tau_us[1] - trace.tau_us[0]) * 1e3;
    let k = (integration_window_ns / step_ns).round() as usize;
    if k <= 1 {
        return Ok(trace.clone());
    }
    let taps: Vec<f64> = if k % 2 == 1 {
        vec![1.0; k]
    } else {
        let mut t = vec![1.0; k + 1];
        t[0] = 0.5;
        t[k] = 0.5;
        t
    };
    let half = (taps.len() / 2) as isize;
    let n = trace.v.len() as isize;
    let v = (0..n)
        .map(|i| {
            let (mut acc, mut wsum) = (0.0, 0.0);
            for (j, w) in taps.iter().enumerate() {
                let idx = i + j as isize - half;
                if (0..n).contains(&idx) {
                    acc += w * trace.v[idx as usize];
                    wsum += w;
                }
            }
            acc / wsum
        })
        .collect();
    Ok(EseemTrace { v, ..trace.clone() })
}
