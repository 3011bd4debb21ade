//! Field-swept ESR stick spectra for the four NV orientations.
//!
//! Resonance positions come from the electron-only Hamiltonian of each site:
//! nuclear couplings shift lines by a few MHz, far below X-band linewidths in
//! field units. Levels are labeled T₋, T₀, T₊ by dominant m_S along B₀.

use nalgebra::Vector3;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::spin::{
    build_hamiltonian, eigensolve_matrix, electron_levels, nv_site_axes, rotate_field,
    spin_matrices, CMatrix, ElectronLevels, ElectronManifold, EulerAngles, FieldVector,
    SpinQuantum, SpinSystem,
};
use crate::{Error, Result};

/// Mismatch below which a root is accepted, MHz (1 kHz).
pub const RESONANCE_TOLERANCE_MHZ: f64 = 1e-3;

/// Which pair of laboratory-frame levels a line connects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// T₀ ↔ T₊
    Plus,
    /// T₋ ↔ T₀
    Minus,
}

impl Branch {
    pub const ALL: [Branch; 2] = [Branch::Plus, Branch::Minus];

    /// The two manifolds connected, ordered by m_S.
    pub fn manifolds(self) -> (ElectronManifold, ElectronManifold) {
        match self {
            Branch::Plus => (ElectronManifold::Zero, ElectronManifold::Plus),
            Branch::Minus => (ElectronManifold::Minus, ElectronManifold::Zero),
        }
    }

    pub fn sign(self) -> char {
        match self {
            Branch::Plus => '+',
            Branch::Minus => '-',
        }
    }
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Branch::Plus => "plus",
            Branch::Minus => "minus",
        })
    }
}

impl std::str::FromStr for Branch {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "plus" | "+" => Ok(Branch::Plus),
            "minus" | "-" => Ok(Branch::Minus),
            other => Err(Error::invalid(format!("unknown branch {other:?}"))),
        }
    }
}

/// Line label S^±ᵢ: NV site 1–4 and branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TransitionLabel {
    site: u8,
    branch: Branch,
}

impl TransitionLabel {
    pub fn new(site: u8, branch: Branch) -> Result<Self> {
        if !(1..=4).contains(&site) {
            return Err(Error::invalid(format!("site must be 1-4, got {site}")));
        }
        Ok(TransitionLabel { site, branch })
    }

    pub fn site(&self) -> u8 {
        self.site
    }

    pub fn branch(&self) -> Branch {
        self.branch
    }
}

impl std::str::FromStr for TransitionLabel {
    type Err = Error;
    /// Parses "S2+" / "S1-" (case-insensitive leading S optional).
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let t = t.strip_prefix(['S', 's']).unwrap_or(t);
        let bad = || Error::invalid(format!("cannot parse transition label {s:?}"));
        let (digits, sign) = t.split_at(t.len().checked_sub(1).ok_or_else(bad)?);
        let site: u8 = digits.parse().map_err(|_| bad())?;
        TransitionLabel::new(site, sign.parse()?)
    }
}

impl std::fmt::Display for TransitionLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "S{}{}", self.site, self.branch.sign())
    }
}

/// Level populations of one site. Not normalized: optically pumped
/// populations are non-thermal inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PopulationSet {
    pub p_plus: f64,
    pub p_zero: f64,
    pub p_minus: f64,
}

impl PopulationSet {
    pub fn new(p_plus: f64, p_zero: f64, p_minus: f64) -> Result<Self> {
        let p = PopulationSet {
            p_plus,
            p_zero,
            p_minus,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn equal() -> Self {
        PopulationSet {
            p_plus: 1.0 / 3.0,
            p_zero: 1.0 / 3.0,
            p_minus: 1.0 / 3.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if [self.p_plus, self.p_zero, self.p_minus]
            .iter()
            .all(|p| p.is_finite())
        {
            Ok(())
        } else {
            Err(Error::invalid("populations must be finite"))
        }
    }

    pub fn of(&self, m: ElectronManifold) -> f64 {
        match m {
            ElectronManifold::Minus => self.p_minus,
            ElectronManifold::Zero => self.p_zero,
            ElectronManifold::Plus => self.p_plus,
        }
    }
}

/// One resonance in a field sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceLine {
    pub label: TransitionLabel,
    pub field_mt: f64,
    pub intensity: f64,
    pub signed_amplitude: f64,
    /// Lower-energy level at the resonance field.
    pub lower: ElectronManifold,
    pub upper: ElectronManifold,
    /// |ΔE(B*)| − ν, MHz.
    pub mismatch_mhz: f64,
}

impl ResonanceLine {
    /// Recomputes the signed amplitude from site populations.
    pub fn with_populations(mut self, p: &PopulationSet) -> Self {
        self.signed_amplitude = self.intensity * (p.of(self.lower) - p.of(self.upper));
        self
    }
}

/// Stick spectrum of all four sites for one misaligned field direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StickSpectrum {
    pub lines: Vec<ResonanceLine>,
    pub mw_frequency_ghz: f64,
    pub nominal_axis: [f64; 3],
    pub orientation: EulerAngles,
    pub window_mt: (f64, f64),
    pub warnings: Vec<ResonanceWarning>,
}

/// Non-fatal diagnostics from the root search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ResonanceWarning {
    /// Two roots of one branch fell inside a single grid cell.
    GridTooCoarse {
        label: TransitionLabel,
        cell_mt: (f64, f64),
    },
}

/// Microwave polarization used for transition moments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarization {
    /// B₀ × ẑ (B₀ × x̂ when B₀ ∥ ẑ).
    Fixed,
    /// Mean over two orthogonal axes perpendicular to B₀.
    #[default]
    Averaged,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonanceOptions {
    pub grid_points: usize,
    pub field_tolerance_mt: f64,
    pub max_bisections: usize,
    /// Relative to the strongest line found.
    pub intensity_threshold: f64,
    pub polarization: Polarization,
}

impl Default for ResonanceOptions {
    fn default() -> Self {
        ResonanceOptions {
            grid_points: 2000,
            field_tolerance_mt: 1e-4,
            max_bisections: 60,
            intensity_threshold: 1e-6,
            polarization: Polarization::Averaged,
        }
    }
}

/// Transition between two eigenstates of the full Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub lower: usize,
    pub upper: usize,
    pub delta_mhz: f64,
    /// |⟨upper|S_⊥|lower⟩|²
    pub moment: f64,
}

/// Unit vectors perpendicular to the field: B₀ × ẑ, then B₀ × (B₀ × ẑ).
pub fn polarization_axes(direction: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let b = direction.normalize();
    let mut u = b.cross(&Vector3::z());
    if u.norm() < 1e-9 {
        u = b.cross(&Vector3::x());
    }
    let u = u.normalize();
    (u, b.cross(&u))
}

fn electron_perp_operators(dims: &[usize], direction: &Vector3<f64>) -> (CMatrix, CMatrix) {
    let s = spin_matrices(SpinQuantum::ONE);
    let (u1, u2) = polarization_axes(direction);
    let embed = |op: CMatrix| crate::spin::embed(&op, 0, dims);
    (embed(s.along(&u1)), embed(s.along(&u2)))
}

fn moment(a: &CMatrix, b: &CMatrix, upper: &CMatrix, lower: &CMatrix, pol: Polarization) -> f64 {
    let m1 = (upper.adjoint() * a * lower)[(0, 0)].norm_sqr();
    match pol {
        Polarization::Fixed => m1,
        Polarization::Averaged => {
            let m2 = (upper.adjoint() * b * lower)[(0, 0)].norm_sqr();
            0.5 * (m1 + m2)
        }
    }
}

/// All eigenpairs i < j of the full Hamiltonian with their transition moments.
pub fn transition_energies(
    sys: &SpinSystem,
    field: &FieldVector,
    polarization: Polarization,
) -> Result<Vec<Transition>> {
    let h = build_hamiltonian(sys, field)?;
    let sol = eigensolve_matrix(h.matrix())?;
    let (a, b) = electron_perp_operators(h.factor_dims(), &field.direction());
    let n = sol.dimension();
    let vecs = sol.eigenvectors();
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        let vi = vecs.columns(i, 1).clone_owned();
        for j in i + 1..n {
            let vj = vecs.columns(j, 1).clone_owned();
            out.push(Transition {
                lower: i,
                upper: j,
                delta_mhz: sol.eigenvalues()[j] - sol.eigenvalues()[i],
                moment: moment(&a, &b, &vj, &vi, polarization),
            });
        }
    }
    Ok(out)
}

/// |ΔE| of a branch for one site, MHz. `None` where levels are too mixed to
/// label.
fn branch_splitting(
    site_sys: &SpinSystem,
    branch: Branch,
    direction: &Vector3<f64>,
    b_mt: f64,
) -> Option<f64> {
    let field = FieldVector::new(b_mt, *direction).ok()?;
    let lv = electron_levels(site_sys, &field).ok()?;
    let (m1, m2) = branch.manifolds();
    Some((lv.energy(m2) - lv.energy(m1)).abs())
}

fn line_at(
    site_sys: &SpinSystem,
    label: TransitionLabel,
    direction: &Vector3<f64>,
    b_mt: f64,
    mw_mhz: f64,
    pol: Polarization,
) -> Result<ResonanceLine> {
    let field = FieldVector::new(b_mt, *direction)?;
    let lv: ElectronLevels = electron_levels(site_sys, &field)?;
    let (m1, m2) = label.branch.manifolds();
    let (lower, upper) = if lv.energy(m1) <= lv.energy(m2) {
        (m1, m2)
    } else {
        (m2, m1)
    };
    let (a, b) = electron_perp_operators(&[3], direction);
    let col = |m| CMatrix::from_column_slice(3, 1, lv.state(m).as_slice());
    let intensity = moment(&a, &b, &col(upper), &col(lower), pol);
    Ok(ResonanceLine {
        label,
        field_mt: b_mt,
        intensity,
        signed_amplitude: 0.0,
        lower,
        upper,
        mismatch_mhz: (lv.energy(m2) - lv.energy(m1)).abs() - mw_mhz,
    })
}

fn validate_window(window: (f64, f64)) -> Result<()> {
    if !(window.0.is_finite() && window.1.is_finite() && window.0 >= 0.0 && window.1 > window.0) {
        return Err(Error::invalid(format!(
            "field window {window:?} must satisfy 0 <= lo < hi"
        )));
    }
    Ok(())
}

fn validate_mw(mw_ghz: f64) -> Result<()> {
    if !(mw_ghz.is_finite() && mw_ghz > 0.0) {
        return Err(Error::invalid("microwave frequency must be positive"));
    }
    Ok(())
}

struct BranchRoots {
    roots: Vec<f64>,
    coarse_cells: Vec<(f64, f64)>,
}

fn bisect(
    f: &dyn Fn(f64) -> Option<f64>,
    mut lo: f64,
    mut hi: f64,
    mut flo: f64,
    opts: &ResonanceOptions,
) -> Option<f64> {
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..opts.max_bisections {
        mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if hi - lo < opts.field_tolerance_mt && fm.abs() < 0.1 * RESONANCE_TOLERANCE_MHZ {
            return Some(mid);
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some(mid)
}

/// Sign changes of `f` on `[lo, hi]` sampled at `n` points.
fn sign_changes(
    f: &dyn Fn(f64) -> Option<f64>,
    lo: f64,
    hi: f64,
    n: usize,
) -> Vec<(f64, f64, f64)> {
    let step = (hi - lo) / (n - 1) as f64;
    let values: Vec<Option<f64>> = (0..n).map(|k| f(lo + step * k as f64)).collect();
    let mut out = Vec::new();
    for k in 0..n - 1 {
        if let (Some(a), Some(b)) = (values[k], values[k + 1]) {
            if a == 0.0 || (a < 0.0) != (b < 0.0) {
                out.push((lo + step * k as f64, lo + step * (k + 1) as f64, a));
            }
        }
    }
    out
}

fn branch_roots(
    f: &dyn Fn(f64) -> Option<f64>,
    window: (f64, f64),
    opts: &ResonanceOptions,
) -> BranchRoots {
    let n = opts.grid_points.max(3);
    let step = (window.1 - window.0) / (n - 1) as f64;
    let grid: Vec<f64> = (0..n).map(|k| window.0 + step * k as f64).collect();
    let values: Vec<Option<f64>> = grid.iter().map(|&b| f(b)).collect();
    let mut roots = Vec::new();
    let mut coarse_cells = Vec::new();
    for k in 0..n - 1 {
        let (Some(a), Some(b)) = (values[k], values[k + 1]) else {
            continue;
        };
        if a == 0.0 || (a < 0.0) != (b < 0.0) {
            if let Some(r) = bisect(f, grid[k], grid[k + 1], a, opts) {
                roots.push(r);
            }
            continue;
        }
        // same sign at both ends: an extremum inside the cell may hide a root pair
        let left = if k > 0 { values[k - 1] } else { None };
        let right = values.get(k + 2).copied().flatten();
        let turning = match (left, right) {
            (Some(l), Some(r)) => {
                (a - l) * (r - b) < 0.0 || (a - l) * (b - a) < 0.0 || (b - a) * (r - b) < 0.0
            }
            _ => false,
        };
        if turning && a.abs().min(b.abs()) < (b - a).abs().max(1e-9) * 4.0 + 50.0 {
            let pairs = sign_changes(f, grid[k], grid[k + 1], 65);
            if pairs.len() >= 2 {
                coarse_cells.push((grid[k], grid[k + 1]));
            }
            for (lo, hi, flo) in pairs {
                if let Some(r) = bisect(f, lo, hi, flo, opts) {
                    roots.push(r);
                }
            }
        }
    }
    BranchRoots {
        roots,
        coarse_cells,
    }
}

/// Resonances of a single site's system (already rotated onto its axis).
pub fn site_resonances(
    site_sys: &SpinSystem,
    site: u8,
    mw_ghz: f64,
    direction: &Vector3<f64>,
    window: (f64, f64),
    opts: &ResonanceOptions,
) -> Result<(Vec<ResonanceLine>, Vec<ResonanceWarning>)> {
    validate_window(window)?;
    validate_mw(mw_ghz)?;
    let direction = direction.normalize();
    let electron = site_sys.electron_only();
    let mw_mhz = mw_ghz * 1e3;
    let mut lines = Vec::new();
    let mut warnings = Vec::new();
    for branch in Branch::ALL {
        let label = TransitionLabel::new(site, branch)?;
        let f = |b: f64| branch_splitting(&electron, branch, &direction, b).map(|d| d - mw_mhz);
        let found = branch_roots(&f, window, opts);
        for cell in found.coarse_cells {
            warnings.push(ResonanceWarning::GridTooCoarse {
                label,
                cell_mt: cell,
            });
        }
        for r in found.roots {
            let line = line_at(&electron, label, &direction, r, mw_mhz, opts.polarization)?;
            if line.mismatch_mhz.abs() < RESONANCE_TOLERANCE_MHZ {
                lines.push(line);
            }
        }
    }
    Ok((lines, warnings))
}

fn drop_weak(lines: &mut Vec<ResonanceLine>, threshold: f64) {
    let max = lines.iter().map(|l| l.intensity).fold(0.0, f64::max);
    lines.retain(|l| l.intensity > threshold * max);
    lines.sort_by(|a, b| {
        a.field_mt
            .total_cmp(&b.field_mt)
            .then(a.label.cmp(&b.label))
    });
}

/// Resonances of all four sites along `direction`; `sys` describes the [111]
/// site. Signed amplitudes are zero until populations are applied.
pub fn resonance_fields(
    sys: &SpinSystem,
    mw_ghz: f64,
    direction: &Vector3<f64>,
    window: (f64, f64),
    opts: &ResonanceOptions,
) -> Result<(Vec<ResonanceLine>, Vec<ResonanceWarning>)> {
    validate_window(window)?;
    validate_mw(mw_ghz)?;
    let per_site: Vec<Result<(Vec<ResonanceLine>, Vec<ResonanceWarning>)>> = nv_site_axes()
        .par_iter()
        .enumerate()
        .map(|(k, axis)| {
            site_resonances(
                &sys.for_site(axis),
                k as u8 + 1,
                mw_ghz,
                direction,
                window,
                opts,
            )
        })
        .collect();
    let mut lines = Vec::new();
    let mut warnings = Vec::new();
    for r in per_site {
        let (l, w) = r?;
        lines.extend(l);
        warnings.extend(w);
    }
    drop_weak(&mut lines, opts.intensity_threshold);
    Ok((lines, warnings))
}

/// Stick spectrum with per-site populations for a misaligned nominal axis.
pub fn stick_spectrum(
    sys: &SpinSystem,
    mw_ghz: f64,
    nominal_axis: &Vector3<f64>,
    euler: &EulerAngles,
    populations: &[PopulationSet; 4],
    window: (f64, f64),
    opts: &ResonanceOptions,
) -> Result<StickSpectrum> {
    for p in populations {
        p.validate()?;
    }
    let direction = rotate_field(&nominal_axis.normalize(), euler);
    let (lines, warnings) = resonance_fields(sys, mw_ghz, &direction, window, opts)?;
    let lines = lines
        .into_iter()
        .map(|l| {
            let p = populations[l.label.site as usize - 1];
            l.with_populations(&p)
        })
        .collect();
    let n = nominal_axis.normalize();
    Ok(StickSpectrum {
        lines,
        mw_frequency_ghz: mw_ghz,
        nominal_axis: [n.x, n.y, n.z],
        orientation: *euler,
        window_mt: window,
        warnings,
    })
}

/// Field of one branch's resonance near `guess_mt`, by secant iteration on
/// |ΔE(B)| − ν. Used by fits that need smooth, fast re-evaluation.
pub fn track_resonance(
    site_sys: &SpinSystem,
    branch: Branch,
    mw_ghz: f64,
    direction: &Vector3<f64>,
    guess_mt: f64,
) -> Result<f64> {
    validate_mw(mw_ghz)?;
    let electron = site_sys.electron_only();
    let direction = direction.normalize();
    let mw_mhz = mw_ghz * 1e3;
    let f = |b: f64| {
        branch_splitting(&electron, branch, &direction, b)
            .map(|d| d - mw_mhz)
            .ok_or(Error::AmbiguousManifold {
                weight: f64::NAN,
                threshold: crate::spin::MANIFOLD_WEIGHT_THRESHOLD,
            })
    };
    let mut b0 = guess_mt;
    let mut b1 = guess_mt + 0.5;
    let mut f0 = f(b0)?;
    let mut f1 = f(b1)?;
    for _ in 0..60 {
        if f1.abs() < 1e-9 {
            return Ok(b1);
        }
        let slope = (f1 - f0) / (b1 - b0);
        if !slope.is_finite() || slope == 0.0 {
            break;
        }
        // cap steps so the iteration stays on the tracked branch
        let step = (-f1 / slope).clamp(-50.0, 50.0);
        let next = (b1 + step).max(0.0);
        b0 = b1;
        f0 = f1;
        b1 = next;
        f1 = f(b1)?;
        if (b1 - b0).abs() < 1e-12 {
            break;
        }
    }
    if f1.abs() < RESONANCE_TOLERANCE_MHZ {
        Ok(b1)
    } else {
        Err(Error::NonConvergence { iterations: 60 })
    }
}

/// Gaussian-broadened spectrum sampled on a uniform field grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BroadenedSpectrum {
    pub field_mt: Vec<f64>,
    pub amplitude: Vec<f64>,
}

impl BroadenedSpectrum {
    /// Trapezoid-rule area, amplitude·mT.
    pub fn integral(&self) -> f64 {
        self.field_mt
            .windows(2)
            .zip(self.amplitude.windows(2))
            .map(|(b, a)| 0.5 * (b[1] - b[0]) * (a[0] + a[1]))
            .sum()
    }

    /// Indices of strict local extrema with |amplitude| above `floor`.
    pub fn extrema(&self, floor: f64) -> Vec<usize> {
        let a = &self.amplitude;
        (1..a.len().saturating_sub(1))
            .filter(|&k| {
                a[k].abs() > floor
                    && ((a[k] > a[k - 1] && a[k] >= a[k + 1])
                        || (a[k] < a[k - 1] && a[k] <= a[k + 1]))
            })
            .collect()
    }
}

/// Sum of unit-area Gaussians (σ = `linewidth_mt`) weighted by signed
/// amplitude. The grid covers the sweep window plus 8σ at step σ/20.
pub fn broaden(spectrum: &StickSpectrum, linewidth_mt: f64) -> Result<BroadenedSpectrum> {
    if !(linewidth_mt.is_finite() && linewidth_mt > 0.0) {
        return Err(Error::invalid("linewidth must be positive"));
    }
    let lo = spectrum.window_mt.0 - 8.0 * linewidth_mt;
    let hi = spectrum.window_mt.1 + 8.0 * linewidth_mt;
    let step = linewidth_mt / 20.0;
    let n = ((hi - lo) / step).ceil() as usize + 1;
    if n > 50_000_000 {
        return Err(Error::invalid("linewidth too small for the sweep window"));
    }
    let grid: Vec<f64> = (0..n).map(|k| lo + step * k as f64).collect();
    Ok(broaden_on_grid(&spectrum.lines, linewidth_mt, grid))
}

pub fn broaden_on_grid(
    lines: &[ResonanceLine],
    linewidth_mt: f64,
    grid: Vec<f64>,
) -> BroadenedSpectrum {
    let norm = 1.0 / (linewidth_mt * (2.0 * std::f64::consts::PI).sqrt());
    let amplitude = grid
        .par_iter()
        .map(|&b| {
            lines
                .iter()
                .map(|l| {
                    let x = (b - l.field_mt) / linewidth_mt;
                    l.signed_amplitude * norm * (-0.5 * x * x).exp()
                })
                .sum()
        })
        .collect();
    BroadenedSpectrum {
        field_mt: grid,
        amplitude,
    }
}

/// Sanity helper: ⟨a|op|b⟩ for column vectors.
#[allow(dead_code)]
fn element(a: &CMatrix, op: &CMatrix, b: &CMatrix) -> Complex64 {
    (a.adjoint() * op * b)[(0, 0)]
}
