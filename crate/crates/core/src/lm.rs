//! Box-constrained Levenberg–Marquardt least squares.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

pub type Residuals<'a> = dyn Fn(&[f64]) -> Result<Vec<f64>> + Sync + 'a;
pub type Jacobian<'a> = dyn Fn(&[f64]) -> Result<DMatrix<f64>> + Sync + 'a;

#[derive(Debug, Clone)]
pub struct LmOptions {
    pub max_iterations: usize,
    /// Stop when the relative cost decrease of an accepted step is below this.
    pub cost_tolerance: f64,
    /// Stop when every parameter moves less than this relative amount.
    pub step_tolerance: f64,
    /// Stop when the scaled gradient falls below this.
    pub gradient_tolerance: f64,
    pub lower: Option<Vec<f64>>,
    pub upper: Option<Vec<f64>>,
    /// Relative forward-difference step when no Jacobian is supplied.
    pub difference_step: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        LmOptions {
            max_iterations: 500,
            cost_tolerance: 1e-15,
            step_tolerance: 1e-13,
            gradient_tolerance: 1e-14,
            lower: None,
            upper: None,
            difference_step: 1e-7,
        }
    }
}

impl LmOptions {
    pub fn with_bounds(mut self, lower: Vec<f64>, upper: Vec<f64>) -> Self {
        self.lower = Some(lower);
        self.upper = Some(upper);
        self
    }
}

#[derive(Debug, Clone)]
pub struct LmResult {
    pub params: Vec<f64>,
    pub residuals: Vec<f64>,
    pub jacobian: DMatrix<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl LmResult {
    /// Σ r²
    pub fn sum_squares(&self) -> f64 {
        self.residuals.iter().map(|r| r * r).sum()
    }

    pub fn rms(&self) -> f64 {
        (self.sum_squares() / self.residuals.len().max(1) as f64).sqrt()
    }

    /// s²·(JᵀJ)⁻¹ with s² = Σr²/(m − p); `None` when JᵀJ is singular or the
    /// problem has no residual degrees of freedom.
    pub fn covariance(&self) -> Option<DMatrix<f64>> {
        let m = self.residuals.len();
        let p = self.params.len();
        if m <= p {
            return None;
        }
        let s2 = self.sum_squares() / (m - p) as f64;
        normal_inverse(&self.jacobian).map(|inv| inv * s2)
    }
}

/// (JᵀJ)⁻¹ when it is numerically nonsingular.
pub fn normal_inverse(j: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let jtj = j.transpose() * j;
    let eig = jtj.clone().symmetric_eigen();
    let max = eig.eigenvalues.amax();
    let min = eig.eigenvalues.min();
    if !(max > 0.0) || min <= max * 1e-14 {
        return None;
    }
    jtj.cholesky().map(|c| c.inverse())
}

fn project(x: &mut [f64], opts: &LmOptions) {
    if let Some(lo) = &opts.lower {
        for (v, l) in x.iter_mut().zip(lo) {
            *v = v.max(*l);
        }
    }
    if let Some(hi) = &opts.upper {
        for (v, h) in x.iter_mut().zip(hi) {
            *v = v.min(*h);
        }
    }
}

/// Forward-difference Jacobian of `f` at `x`, respecting upper bounds.
pub fn numeric_jacobian(
    f: &Residuals<'_>,
    x: &[f64],
    r0: &[f64],
    opts: &LmOptions,
) -> Result<DMatrix<f64>> {
    let mut j = DMatrix::zeros(r0.len(), x.len());
    for c in 0..x.len() {
        let mut h = opts.difference_step * x[c].abs().max(1.0);
        if let Some(hi) = &opts.upper {
            if x[c] + h > hi[c] {
                h = -h;
            }
        }
        let mut xp = x.to_vec();
        xp[c] += h;
        let rp = f(&xp)?;
        for r in 0..r0.len() {
            j[(r, c)] = (rp[r] - r0[r]) / h;
        }
    }
    Ok(j)
}

fn check_finite(r: &[f64]) -> Result<()> {
    if r.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::DegenerateData("residuals are not finite".into()))
    }
}

/// Minimizes Σ rᵢ(x)² starting from `x0`, projecting every trial point onto
/// the box. Returns `NonConvergence` if no stopping test passes within the
/// iteration budget.
pub fn levenberg_marquardt(
    f: &Residuals<'_>,
    jac: Option<&Jacobian<'_>>,
    x0: &[f64],
    opts: &LmOptions,
) -> Result<LmResult> {
    let p = x0.len();
    let mut x = x0.to_vec();
    project(&mut x, opts);
    let mut r = f(&x)?;
    check_finite(&r)?;
    let jacobian = |x: &[f64], r: &[f64]| -> Result<DMatrix<f64>> {
        match jac {
            Some(j) => j(x),
            None => numeric_jacobian(f, x, r, opts),
        }
    };
    let mut j = jacobian(&x, &r)?;
    let mut cost: f64 = r.iter().map(|v| v * v).sum();
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iterations {
        iterations += 1;
        let rv = DVector::from_column_slice(&r);
        let jtj = j.transpose() * &j;
        let g = j.transpose() * &rv;
        let diag: Vec<f64> = (0..p).map(|k| jtj[(k, k)].max(1e-300)).collect();
        let gscaled = (0..p)
            .map(|k| g[k].abs() / diag[k].sqrt())
            .fold(0.0, f64::max);
        if gscaled <= opts.gradient_tolerance * cost.sqrt().max(1e-300) || cost == 0.0 {
            converged = true;
            break;
        }
        let mut accepted = false;
        for _ in 0..60 {
            let mut a = jtj.clone();
            for k in 0..p {
                a[(k, k)] += lambda * diag[k];
            }
            let Some(step) = a.cholesky().map(|c| c.solve(&(-&g))) else {
                lambda *= 10.0;
                continue;
            };
            let mut trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            project(&mut trial, opts);
            let rt = match f(&trial) {
                Ok(v) if v.iter().all(|e| e.is_finite()) => v,
                _ => {
                    lambda *= 10.0;
                    continue;
                }
            };
            let ct: f64 = rt.iter().map(|v| v * v).sum();
            // tolerate rounding-level increases so that the final Gauss–Newton
            // step is taken instead of stalling about √ε away from the minimum
            if ct <= cost * (1.0 + 16.0 * f64::EPSILON) {
                let rel_cost = (cost - ct) / cost.max(1e-300);
                let rel_step = x
                    .iter()
                    .zip(&trial)
                    .map(|(a, b)| (a - b).abs() / a.abs().max(1e-12))
                    .fold(0.0, f64::max);
                x = trial;
                r = rt;
                cost = ct;
                j = jacobian(&x, &r)?;
                lambda = (lambda / 10.0).max(1e-12);
                accepted = true;
                if rel_cost < opts.cost_tolerance || rel_step < opts.step_tolerance {
                    converged = true;
                }
                break;
            }
            lambda *= 10.0;
            if lambda > 1e16 {
                break;
            }
        }
        if converged {
            break;
        }
        if !accepted {
            // no downhill step exists at any damping: a (box-)stationary point
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence { iterations });
    }
    Ok(LmResult {
        params: x,
        residuals: r,
        jacobian: j,
        iterations,
        converged,
    })
}
