//! Two-pulse (Hahn echo) envelope modulation from hyperfine-coupled nuclei.
//!
//! The full electron-nuclear Hamiltonian is diagonalized and its eigenvectors
//! are grouped by electron level (T₋, T₀, T₊ along B₀). Each group spans one
//! nuclear manifold; projecting onto the electron state and orthonormalizing
//! gives an exact effective nuclear Hamiltonian per manifold. The echo for
//! ideal selective pulses on levels a, b is
//! V(τ) = (1/d)·Tr[e^{iH_aτ} e^{iH_bτ} e^{−iH_aτ} e^{−iH_bτ}], τ the pulse
//! spacing in μs and H in MHz (phases carry 2π).

use std::collections::BTreeMap;

use nalgebra::{DVector, Vector3};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::spectra::{site_resonances, Branch, ResonanceOptions};
use crate::spin::{
    build_hamiltonian, eigensolve_matrix, label_levels, nv_site_axes, CMatrix, ElectronManifold,
    FieldVector, NucleusSpec, SpinSystem, MANIFOLD_WEIGHT_THRESHOLD,
};
use crate::{Error, Result};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Pair of electron levels driven by the pulses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ManifoldPair {
    /// T₋ ↔ T₀
    MinusZero,
    /// T₀ ↔ T₊
    ZeroPlus,
}

impl ManifoldPair {
    pub fn manifolds(self) -> (ElectronManifold, ElectronManifold) {
        match self {
            ManifoldPair::MinusZero => (ElectronManifold::Minus, ElectronManifold::Zero),
            ManifoldPair::ZeroPlus => (ElectronManifold::Zero, ElectronManifold::Plus),
        }
    }

    pub fn branch(self) -> Branch {
        match self {
            ManifoldPair::MinusZero => Branch::Minus,
            ManifoldPair::ZeroPlus => Branch::Plus,
        }
    }
}

impl From<Branch> for ManifoldPair {
    fn from(b: Branch) -> Self {
        match b {
            Branch::Minus => ManifoldPair::MinusZero,
            Branch::Plus => ManifoldPair::ZeroPlus,
        }
    }
}

/// Driven transition: level pair and the NV site whose axis the system is
/// rotated onto.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionSelection {
    pub pair: ManifoldPair,
    site_axis: [f64; 3],
}

impl TransitionSelection {
    pub fn new(pair: ManifoldPair, site_axis: Vector3<f64>) -> Result<Self> {
        let n = site_axis.norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::invalid("site axis must be a nonzero vector"));
        }
        let a = site_axis / n;
        Ok(TransitionSelection {
            pair,
            site_axis: [a.x, a.y, a.z],
        })
    }

    /// Selection on NV site 1–4.
    pub fn site(index: u8, pair: ManifoldPair) -> Result<Self> {
        if !(1..=4).contains(&index) {
            return Err(Error::invalid(format!("site must be 1-4, got {index}")));
        }
        Self::new(pair, nv_site_axes()[index as usize - 1])
    }

    pub fn site_axis(&self) -> Vector3<f64> {
        Vector3::from(self.site_axis)
    }
}

/// Uniform grid of pulse spacings τ in μs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TauGrid {
    pub start_us: f64,
    pub step_us: f64,
    pub points: usize,
}

impl Default for TauGrid {
    fn default() -> Self {
        TauGrid {
            start_us: 0.0,
            step_us: 0.004,
            points: 4096,
        }
    }
}

impl TauGrid {
    pub fn new(start_us: f64, step_us: f64, points: usize) -> Result<Self> {
        let g = TauGrid {
            start_us,
            step_us,
            points,
        };
        g.validate()?;
        Ok(g)
    }

    /// Grid from 0 covering `length_us` at `step_us`.
    pub fn spanning(length_us: f64, step_us: f64) -> Result<Self> {
        Self::new(0.0, step_us, (length_us / step_us).round() as usize + 1)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.start_us.is_finite()
            && self.start_us >= 0.0
            && self.step_us.is_finite()
            && self.step_us > 0.0
            && self.points >= 2)
        {
            return Err(Error::invalid(
                "tau grid needs start >= 0, step > 0 and at least 2 points",
            ));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.points)
            .map(|k| self.start_us + self.step_us * k as f64)
            .collect()
    }
}

/// Simulated or measured echo modulation trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EseemTrace {
    pub tau_us: Vec<f64>,
    pub v: Vec<f64>,
    /// Largest |Im V| seen before taking the real part.
    pub max_imag: f64,
    pub field_mt: f64,
    pub field_direction: [f64; 3],
    pub selection: Option<TransitionSelection>,
}

impl EseemTrace {
    /// Wraps measured samples; τ must be uniformly spaced and increasing.
    /// Field metadata is unknown and left at zero.
    pub fn from_samples(tau_us: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if tau_us.len() != v.len() {
            return Err(Error::invalid(format!(
                "{} τ values but {} samples",
                tau_us.len(),
                v.len()
            )));
        }
        if tau_us.len() < 2 {
            return Err(Error::invalid("a trace needs at least two samples"));
        }
        if tau_us.iter().chain(&v).any(|x| !x.is_finite()) {
            return Err(Error::DegenerateData(
                "trace contains non-finite values".into(),
            ));
        }
        let step = tau_us[1] - tau_us[0];
        if !(step > 0.0) {
            return Err(Error::invalid("τ must increase"));
        }
        for (k, pair) in tau_us.windows(2).enumerate() {
            if ((pair[1] - pair[0]) - step).abs() > 1e-6 * step {
                return Err(Error::invalid(format!(
                    "τ spacing is not uniform at sample {}",
                    k + 1
                )));
            }
        }
        Ok(EseemTrace {
            tau_us,
            v,
            max_imag: 0.0,
            field_mt: 0.0,
            field_direction: [0.0; 3],
            selection: None,
        })
    }

    pub fn step_us(&self) -> f64 {
        self.tau_us[1] - self.tau_us[0]
    }
}

/// Effective nuclear Hamiltonian of one electron manifold in its eigenbasis.
#[derive(Debug, Clone)]
pub struct ManifoldBlock {
    pub manifold: ElectronManifold,
    /// Nuclear eigenvalues in MHz, ascending, shifted to zero mean.
    pub energies: DVector<f64>,
    /// Nuclear eigenvectors (columns) in the product nuclear basis.
    pub basis: CMatrix,
}

impl ManifoldBlock {
    /// H = U·diag(E)·U†
    pub fn hamiltonian(&self) -> CMatrix {
        let e = CMatrix::from_diagonal(&self.energies.map(Complex64::from));
        &self.basis * e * self.basis.adjoint()
    }

    /// Sorted pairwise differences E_j − E_i, j > i.
    pub fn frequencies(&self) -> Vec<f64> {
        let e = &self.energies;
        let mut f = Vec::new();
        for i in 0..e.len() {
            for j in i + 1..e.len() {
                f.push(e[j] - e[i]);
            }
        }
        f.sort_by(f64::total_cmp);
        f
    }
}

/// Nuclear blocks of the two driven manifolds.
#[derive(Debug, Clone)]
pub struct SubHamiltonians {
    pub a: ManifoldBlock,
    pub b: ManifoldBlock,
}

impl SubHamiltonians {
    /// M = U_a†·U_b
    pub fn overlap(&self) -> CMatrix {
        self.a.basis.adjoint() * &self.b.basis
    }

    pub fn dimension(&self) -> usize {
        self.a.energies.len()
    }
}

/// Exact nuclear blocks for all three electron manifolds.
pub fn manifold_blocks(sys: &SpinSystem, field: &FieldVector) -> Result<[ManifoldBlock; 3]> {
    let d = sys.nuclear_dimension();
    let electron_h = build_hamiltonian(&sys.electron_only(), field)?;
    let electron = label_levels(&eigensolve_matrix(electron_h.matrix())?, &field.direction())?;
    let h = build_hamiltonian(sys, field)?;
    let sol = eigensolve_matrix(h.matrix())?;
    let vecs = sol.eigenvectors();
    let n = sol.dimension();

    // projection of each eigenvector onto the three electron states: φ_m,k
    let mut groups: [Vec<(usize, DVector<Complex64>)>; 3] = Default::default();
    for k in 0..n {
        let psi = vecs.column(k);
        let mut best = (0usize, 0.0f64, DVector::<Complex64>::zeros(d));
        for m in ElectronManifold::ALL {
            let e = electron.state(m);
            // ψ is ordered electron-major: ψ[s·d + ν]
            let phi = DVector::from_fn(d, |nu, _| {
                (0..3)
                    .map(|s| e[s].conj() * psi[s * d + nu])
                    .sum::<Complex64>()
            });
            let w = phi.norm_squared();
            if w > best.1 {
                best = (m.index(), w, phi);
            }
        }
        if best.1 < MANIFOLD_WEIGHT_THRESHOLD {
            return Err(Error::AmbiguousManifold {
                weight: best.1,
                threshold: MANIFOLD_WEIGHT_THRESHOLD,
            });
        }
        groups[best.0].push((k, best.2));
    }
    let mut blocks = Vec::with_capacity(3);
    for m in ElectronManifold::ALL {
        let g = &groups[m.index()];
        if g.len() != d {
            return Err(Error::AmbiguousManifold {
                weight: g.len() as f64 / d as f64,
                threshold: 1.0,
            });
        }
        let phi = CMatrix::from_fn(d, d, |r, c| g[c].1[r]);
        let basis = lowdin(&phi)?;
        let energies: Vec<f64> = g.iter().map(|(k, _)| sol.eigenvalues()[*k]).collect();
        let mean = energies.iter().sum::<f64>() / d as f64;
        blocks.push(ManifoldBlock {
            manifold: m,
            energies: DVector::from_iterator(d, energies.iter().map(|e| e - mean)),
            basis,
        });
    }
    Ok(blocks.try_into().expect("three manifolds"))
}

/// Closest unitary to Φ: Φ·(Φ†Φ)^(−1/2).
fn lowdin(phi: &CMatrix) -> Result<CMatrix> {
    let s = phi.adjoint() * phi;
    let eig = eigensolve_matrix(&s)?;
    let min = eig.eigenvalues().min();
    if min < 0.5 {
        return Err(Error::AmbiguousManifold {
            weight: min,
            threshold: MANIFOLD_WEIGHT_THRESHOLD,
        });
    }
    let w = eig.eigenvectors();
    let inv_sqrt =
        CMatrix::from_diagonal(&eig.eigenvalues().map(|x| Complex64::from(1.0 / x.sqrt())));
    Ok(phi * (w * inv_sqrt * w.adjoint()))
}

/// Effective nuclear Hamiltonians of the driven manifolds; `sys` is given for
/// the [111] site and rotated onto the selected site axis.
pub fn sub_hamiltonians(
    sys: &SpinSystem,
    field: &FieldVector,
    selection: &TransitionSelection,
) -> Result<SubHamiltonians> {
    let site = sys.for_site(&selection.site_axis());
    let [minus, zero, plus] = manifold_blocks(&site, field)?;
    Ok(match selection.pair {
        ManifoldPair::MinusZero => SubHamiltonians { a: minus, b: zero },
        ManifoldPair::ZeroPlus => SubHamiltonians { a: zero, b: plus },
    })
}

/// Echo envelope from the blocks of the driven manifolds.
pub fn trace_from_blocks(blocks: &SubHamiltonians, tau_us: &[f64]) -> (Vec<f64>, f64) {
    let d = blocks.dimension();
    let m = blocks.overlap();
    let a = &blocks.a.energies;
    let b = &blocks.b.energies;
    let mut max_imag = 0.0f64;
    let mut v = Vec::with_capacity(tau_us.len());
    let mut x = CMatrix::zeros(d, d);
    for &tau in tau_us {
        // X = M·diag(e^{−i2πbτ})·M† expresses e^{−iH_bτ} in the a-eigenbasis
        let phases: Vec<Complex64> = b
            .iter()
            .map(|bj| Complex64::from_polar(1.0, -TWO_PI * bj * tau))
            .collect();
        for i in 0..d {
            for k in 0..d {
                let mut s = Complex64::new(0.0, 0.0);
                for j in 0..d {
                    s += m[(i, j)] * phases[j] * m[(k, j)].conj();
                }
                x[(i, k)] = s;
            }
        }
        // Tr[A†X†AX] = Σ_ik |X_ki|² e^{i2π(a_k − a_i)τ}
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..d {
            for k in 0..d {
                acc += Complex64::from_polar(x[(k, i)].norm_sqr(), TWO_PI * (a[k] - a[i]) * tau);
            }
        }
        acc /= d as f64;
        max_imag = max_imag.max(acc.im.abs());
        v.push(acc.re);
    }
    (v, max_imag)
}

/// Ideal-pulse two-pulse ESEEM trace.
pub fn eseem_time_domain(
    sys: &SpinSystem,
    field: &FieldVector,
    selection: &TransitionSelection,
    tau: &TauGrid,
) -> Result<EseemTrace> {
    tau.validate()?;
    let blocks = sub_hamiltonians(sys, field, selection)?;
    let tau_us = tau.values();
    let (v, max_imag) = trace_from_blocks(&blocks, &tau_us);
    let dir = field.direction();
    Ok(EseemTrace {
        tau_us,
        v,
        max_imag,
        field_mt: field.magnitude_mt(),
        field_direction: [dir.x, dir.y, dir.z],
        selection: Some(*selection),
    })
}

/// Nuclear transition frequencies (MHz) of each electron manifold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NuclearFrequencies {
    pub by_manifold: BTreeMap<ElectronManifold, Vec<f64>>,
}

impl NuclearFrequencies {
    pub fn get(&self, m: ElectronManifold) -> &[f64] {
        self.by_manifold.get(&m).map(Vec::as_slice).unwrap_or(&[])
    }
}

/// All pairwise level differences of every manifold at the selected site.
pub fn nuclear_frequencies(
    sys: &SpinSystem,
    field: &FieldVector,
    selection: &TransitionSelection,
) -> Result<NuclearFrequencies> {
    let site = sys.for_site(&selection.site_axis());
    let blocks = manifold_blocks(&site, field)?;
    Ok(NuclearFrequencies {
        by_manifold: blocks
            .iter()
            .map(|b| (b.manifold, b.frequencies()))
            .collect(),
    })
}

/// How several nuclei are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CombineMode {
    /// Exact simulation in the joint nuclear space.
    Joint,
    /// Product of single-nucleus traces.
    Product,
}

pub fn multi_nucleus_trace(
    sys: &SpinSystem,
    field: &FieldVector,
    selection: &TransitionSelection,
    tau: &TauGrid,
    mode: CombineMode,
) -> Result<EseemTrace> {
    match mode {
        CombineMode::Joint => eseem_time_domain(sys, field, selection, tau),
        CombineMode::Product => {
            let mut out = eseem_time_domain(&sys.electron_only(), field, selection, tau)?;
            for n in sys.nuclei() {
                let t =
                    eseem_time_domain(&sys.with_nuclei(vec![n.clone()]), field, selection, tau)?;
                out.max_imag = out.max_imag.max(t.max_imag);
                for (o, x) in out.v.iter_mut().zip(&t.v) {
                    *o *= x;
                }
            }
            Ok(out)
        }
    }
}

/// (max − min)/max of a trace.
pub fn depth(v: &[f64]) -> f64 {
    let max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = v.iter().cloned().fold(f64::INFINITY, f64::min);
    if max <= 0.0 || !max.is_finite() {
        return 0.0;
    }
    ((max - min) / max).clamp(0.0, 1.0)
}

/// Peak-to-peak modulation of `trace` in the final `window_us` relative to
/// that of an undamped `reference` over the same window.
pub fn modulation_retention(trace: &EseemTrace, reference: &EseemTrace, window_us: f64) -> f64 {
    let p2p = |t: &EseemTrace| {
        let end = *t.tau_us.last().expect("nonempty trace");
        let (mn, mx) = t
            .tau_us
            .iter()
            .zip(&t.v)
            .filter(|(tau, _)| **tau >= end - window_us)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), (_, v)| {
                (a.min(*v), b.max(*v))
            });
        mx - mn
    };
    let r = p2p(reference);
    if r <= 0.0 {
        return 1.0;
    }
    p2p(trace) / r
}

/// Depth as a function of field magnitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CancellationScan {
    pub points: Vec<(f64, f64)>,
    /// Fields where the electron levels were too mixed to label.
    pub skipped_mt: Vec<f64>,
    pub argmax_mt: Option<f64>,
}

pub fn cancellation_scan(
    sys: &SpinSystem,
    direction: &Vector3<f64>,
    selection: &TransitionSelection,
    field_range: (f64, f64),
    steps: usize,
    tau: &TauGrid,
) -> Result<CancellationScan> {
    if !(field_range.0 >= 0.0 && field_range.1 > field_range.0 && steps >= 2) {
        return Err(Error::invalid(
            "field range needs 0 <= lo < hi and at least 2 steps",
        ));
    }
    tau.validate()?;
    let fields: Vec<f64> = (0..steps)
        .map(|k| field_range.0 + (field_range.1 - field_range.0) * k as f64 / (steps - 1) as f64)
        .collect();
    let results: Vec<(f64, Result<f64>)> = fields
        .par_iter()
        .map(|&b| {
            let r = FieldVector::new(b, *direction)
                .and_then(|f| eseem_time_domain(sys, &f, selection, tau))
                .map(|t| depth(&t.v));
            (b, r)
        })
        .collect();
    let mut points = Vec::new();
    let mut skipped_mt = Vec::new();
    for (b, r) in results {
        match r {
            Ok(d) => points.push((b, d)),
            Err(Error::AmbiguousManifold { .. }) => skipped_mt.push(b),
            Err(e) => return Err(e),
        }
    }
    let argmax_mt = points
        .iter()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|p| p.0);
    Ok(CancellationScan {
        points,
        skipped_mt,
        argmax_mt,
    })
}

fn perturbed_nucleus(
    n: &NucleusSpec,
    frac_a: f64,
    frac_q: f64,
    rng: &mut ChaCha8Rng,
) -> NucleusSpec {
    let z = Normal::new(0.0, 1.0).expect("unit normal");
    let hf = n.hyperfine();
    let a_par = hf.parallel() * (1.0 + frac_a * z.sample(rng));
    let a_perp = hf.perpendicular() * (1.0 + frac_a * z.sample(rng));
    let mut out = n.with_hyperfine(a_par, a_perp);
    if let Some(q) = n.quadrupole() {
        out = out.with_quadrupole(q.parallel() * (1.0 + frac_q * z.sample(rng)));
    }
    out
}

/// Average of traces over Gaussian spreads of the hyperfine principal values
/// (shared fractional width) and the quadrupole coupling.
#[allow(clippy::too_many_arguments)]
pub fn damped_ensemble_trace(
    sys: &SpinSystem,
    field: &FieldVector,
    selection: &TransitionSelection,
    tau: &TauGrid,
    hyperfine_fraction: f64,
    quadrupole_fraction: f64,
    samples: usize,
    seed: u64,
) -> Result<EseemTrace> {
    if !(hyperfine_fraction >= 0.0 && quadrupole_fraction >= 0.0) || samples == 0 {
        return Err(Error::invalid("fractions must be >= 0 and samples >= 1"));
    }
    if hyperfine_fraction == 0.0 && quadrupole_fraction == 0.0 {
        return eseem_time_domain(sys, field, selection, tau);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let systems: Vec<SpinSystem> = (0..samples)
        .map(|_| {
            let nuclei = sys
                .nuclei()
                .iter()
                .map(|n| perturbed_nucleus(n, hyperfine_fraction, quadrupole_fraction, &mut rng))
                .collect();
            sys.with_nuclei(nuclei)
        })
        .collect();
    let traces: Vec<Result<EseemTrace>> = systems
        .par_iter()
        .map(|s| eseem_time_domain(s, field, selection, tau))
        .collect();
    let mut out: Option<EseemTrace> = None;
    for t in traces {
        let t = t?;
        match out.as_mut() {
            None => out = Some(t),
            Some(o) => {
                o.max_imag = o.max_imag.max(t.max_imag);
                for (a, b) in o.v.iter_mut().zip(&t.v) {
                    *a += b;
                }
            }
        }
    }
    let mut out = out.expect("at least one sample");
    for a in out.v.iter_mut() {
        *a /= samples as f64;
    }
    Ok(out)
}

/// Field magnitude at which the selected site and branch resonate at
/// `mw_ghz` for the given direction; the strongest root is used.
pub fn resonance_field_for(
    sys: &SpinSystem,
    selection: &TransitionSelection,
    mw_ghz: f64,
    direction: &Vector3<f64>,
) -> Result<f64> {
    let site = sys.for_site(&selection.site_axis());
    let (lines, _) = site_resonances(
        &site,
        1,
        mw_ghz,
        direction,
        (1.0, 1500.0),
        &ResonanceOptions::default(),
    )?;
    lines
        .into_iter()
        .filter(|l| l.label.branch() == selection.pair.branch())
        .max_by(|a, b| a.intensity.total_cmp(&b.intensity))
        .map(|l| l.field_mt)
        .ok_or_else(|| Error::invalid("selected transition has no resonance at this frequency"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{G_N_13C, NUCLEAR_MAGNETON_MHZ_PER_T};
    use crate::spin::{rotate_field, EulerAngles};

    fn small_grid() -> TauGrid {
        TauGrid::new(0.0, 0.01, 1000).unwrap()
    }

    #[test]
    fn no_nuclei_is_flat() {
        let sys = SpinSystem::nv_electron();
        let f = FieldVector::new(350.0, Vector3::z()).unwrap();
        let sel = TransitionSelection::site(1, ManifoldPair::MinusZero).unwrap();
        let sub = sub_hamiltonians(&sys, &f, &sel).unwrap();
        assert_eq!(sub.dimension(), 1);
        let t = eseem_time_domain(&sys, &f, &sel, &small_grid()).unwrap();
        assert!(t.v.iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn on_axis_overlap_is_diagonal() {
        let sys = SpinSystem::nv_14n();
        let axis = Vector3::new(1.0, 1.0, 1.0);
        let f = FieldVector::new(445.0, axis).unwrap();
        let sel = TransitionSelection::site(1, ManifoldPair::MinusZero).unwrap();
        let m = sub_hamiltonians(&sys, &f, &sel).unwrap().overlap();
        // shared eigenbasis: a permutation matrix up to phases
        for i in 0..3 {
            let big = (0..3)
                .filter(|&j| (m[(i, j)].norm() - 1.0).abs() < 1e-8)
                .count();
            let small = (0..3).filter(|&j| m[(i, j)].norm() < 1e-8).count();
            assert_eq!((big, small), (1, 2));
        }
    }

    #[test]
    fn blocks_reproduce_full_spectrum() {
        // the manifold energies plus offsets are the full eigenvalues
        let sys = SpinSystem::nv_14n();
        let f = FieldVector::new(
            350.0,
            rotate_field(&Vector3::z(), &EulerAngles::new(8.0, 1.0, 0.0)),
        )
        .unwrap();
        let site = sys.for_site(&nv_site_axes()[0]);
        let blocks = manifold_blocks(&site, &f).unwrap();
        let full = eigensolve_matrix(build_hamiltonian(&site, &f).unwrap().matrix()).unwrap();
        let mut freqs: Vec<f64> = blocks.iter().flat_map(|b| b.frequencies()).collect();
        freqs.sort_by(f64::total_cmp);
        // every block frequency is a difference of two full eigenvalues
        let ev = full.eigenvalues();
        for fq in freqs {
            let hit = (0..9).any(|i| (0..9).any(|j| (ev[j] - ev[i] - fq).abs() < 1e-8));
            assert!(hit, "{fq}");
        }
        for b in &blocks {
            let h = b.hamiltonian();
            assert!((&h - h.adjoint()).norm() < 1e-9);
        }
    }

    #[test]
    fn trace_starts_at_one_and_is_bounded() {
        let sys = SpinSystem::nv_14n();
        let f = FieldVector::new(
            350.0,
            rotate_field(&Vector3::z(), &EulerAngles::new(8.0, 1.0, 0.0)),
        )
        .unwrap();
        let sel = TransitionSelection::site(1, ManifoldPair::MinusZero).unwrap();
        let t = eseem_time_domain(&sys, &f, &sel, &small_grid()).unwrap();
        assert!((t.v[0] - 1.0).abs() < 1e-12);
        assert!(t.v.iter().all(|v| v.abs() <= 1.0 + 1e-9));
        assert!(t.max_imag < 1e-10, "{}", t.max_imag);
    }

    #[test]
    fn carbon_on_axis_frequencies() {
        let sys = SpinSystem::nv_electron().with_nuclei(vec![NucleusSpec::carbon13(
            "c",
            2.0,
            2.0,
            Vector3::z(),
        )
        .unwrap()]);
        let axis = Vector3::new(1.0, 1.0, 1.0);
        let f = FieldVector::new(350.0, axis).unwrap();
        let sel = TransitionSelection::site(1, ManifoldPair::ZeroPlus).unwrap();
        let nf = nuclear_frequencies(&sys, &f, &sel).unwrap();
        let nu_i = G_N_13C * NUCLEAR_MAGNETON_MHZ_PER_T * 0.350;
        assert!((nu_i - 3.748).abs() < 1e-3);
        assert!((nf.get(ElectronManifold::Zero)[0] - nu_i).abs() < 1e-3);
        assert!((nf.get(ElectronManifold::Plus)[0] - (nu_i - 2.0).abs()).abs() < 1e-2);
        assert!((nf.get(ElectronManifold::Minus)[0] - (nu_i + 2.0)).abs() < 1e-2);
    }

    #[test]
    fn zero_fractions_reproduce_single_trace() {
        let sys = SpinSystem::nv_14n();
        let f = FieldVector::new(350.0, Vector3::new(0.1, 0.0, 1.0)).unwrap();
        let sel = TransitionSelection::site(2, ManifoldPair::MinusZero).unwrap();
        let a = eseem_time_domain(&sys, &f, &sel, &small_grid()).unwrap();
        let b = damped_ensemble_trace(&sys, &f, &sel, &small_grid(), 0.0, 0.0, 10, 1).unwrap();
        assert_eq!(a.v, b.v);
    }

    #[test]
    fn product_equals_joint_for_one_nucleus() {
        let sys = SpinSystem::nv_14n();
        let f = FieldVector::new(350.0, Vector3::new(0.1, 0.0, 1.0)).unwrap();
        let sel = TransitionSelection::site(2, ManifoldPair::MinusZero).unwrap();
        let a = multi_nucleus_trace(&sys, &f, &sel, &small_grid(), CombineMode::Joint).unwrap();
        let b = multi_nucleus_trace(&sys, &f, &sel, &small_grid(), CombineMode::Product).unwrap();
        for (x, y) in a.v.iter().zip(&b.v) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn depth_definition() {
        assert_eq!(depth(&[1.0, 0.5, 1.0]), 0.5);
        assert_eq!(depth(&[1.0, 1.0]), 0.0);
    }
}
