//! Acceptance suite: runs every criterion at its stated tolerance and prints
//! one PASS/FAIL line each. Exits non-zero if any criterion fails.

use std::time::Instant;

use nalgebra::{DMatrix, Vector3};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use nvespin::eseem::{
    cancellation_scan, damped_ensemble_trace, depth, eseem_time_domain, modulation_retention,
    nuclear_frequencies, resonance_field_for, ManifoldPair, TauGrid, TransitionSelection,
};
use nvespin::inference::{
    c13_larmor_mhz, direction_class_distance_deg, fit_nitrogen_couplings, fit_orientation,
    fit_t2_temperature, flip_flop_suppression, mean_dipolar_coupling, ppm_to_cm3,
    t2_of_temperature, CouplingObservation, FluctuatorModel, MeasuredPeak, ObservedFrequency,
};
use nvespin::sigproc::{
    check_additive_relation, cosine_ft, fit_stretched_exponential, phase_correct_first_order,
    pick_peaks, stretched_exponential, EchoDecay, FtWindow, PeakList,
};
use nvespin::spectra::{
    resonance_fields, stick_spectrum, Branch, PopulationSet, ResonanceOptions, TransitionLabel,
};
use nvespin::spin::{
    eigensolve, rotate_field, EulerAngles, FieldVector, HamiltonianMatrix, NucleusSpec, SpinSystem,
};

const MW_GHZ: f64 = 9.6;
/// Dead time removed before the FT, μs.
const DEAD_TIME_US: f64 = 0.5;
const PEAK_FLOOR: f64 = 0.05;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn config_001() -> (Vector3<f64>, EulerAngles) {
    (Vector3::new(0.0, 0.0, 1.0), EulerAngles::new(8.0, 1.0, 0.0))
}

fn config_110() -> (Vector3<f64>, EulerAngles) {
    (Vector3::new(1.0, 1.0, 0.0), EulerAngles::new(1.1, 2.1, 0.0))
}

fn config_111() -> (Vector3<f64>, EulerAngles) {
    (Vector3::new(1.0, 1.0, 1.0), EulerAngles::new(0.3, 0.9, 0.0))
}

fn direction(config: (Vector3<f64>, EulerAngles)) -> Vector3<f64> {
    rotate_field(&config.0, &config.1)
}

/// Field at the selected line's resonance, pointing along `dir`.
fn resonant_field(sys: &SpinSystem, sel: &TransitionSelection, dir: &Vector3<f64>) -> FieldVector {
    let b = resonance_field_for(sys, sel, MW_GHZ, dir).expect("line exists");
    FieldVector::new(b, *dir).expect("valid field")
}

fn processed_peaks(
    sys: &SpinSystem,
    field: &FieldVector,
    sel: &TransitionSelection,
) -> (PeakList, f64) {
    let trace = eseem_time_domain(sys, field, sel, &TauGrid::default()).expect("trace");
    let ft = cosine_ft(&trace, DEAD_TIME_US, 8, FtWindow::Hamming).expect("ft");
    let ft = phase_correct_first_order(&ft, DEAD_TIME_US);
    let native_bin = 1.0 / (trace.tau_us.len() as f64 * trace.step_us());
    (pick_peaks(&ft, PEAK_FLOOR).expect("peaks"), native_bin)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let (nominal, euler) = (Vector3::new(1.0, 1.0, 0.0), EulerAngles::new(2.0, 2.2, 0.0));
    let spectrum = stick_spectrum(
        &SpinSystem::nv_electron(),
        MW_GHZ,
        &nominal,
        &euler,
        &[PopulationSet::equal(); 4],
        (1.0, 1500.0),
        &ResonanceOptions::default(),
    )
    .expect("spectrum");
    let elapsed = start.elapsed().as_secs_f64();
    let s2p = TransitionLabel::new(2, Branch::Plus).unwrap();
    let field = spectrum
        .lines
        .iter()
        .find(|l| l.label == s2p)
        .map(|l| l.field_mt);
    let pass = spectrum.lines.len() == 8
        && field.is_some_and(|b| (b - 390.0).abs() <= 5.0)
        && elapsed < 5.0;
    outcome(
        pass,
        format!(
            "{} lines, S2+ at {:.2?} mT, {:.2} s",
            spectrum.lines.len(),
            field,
            elapsed
        ),
    )
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let sys = SpinSystem::nv_14n();
    let dir = Vector3::new(1.0, 1.0, 1.0);
    let tau = TauGrid::spanning(20.0, 0.004).unwrap();
    let mut worst = 0.0f64;
    for pair in [ManifoldPair::MinusZero, ManifoldPair::ZeroPlus] {
        let sel = TransitionSelection::site(1, pair).unwrap();
        let field = resonant_field(&sys, &sel, &dir);
        let trace = eseem_time_domain(&sys, &field, &sel, &tau).expect("trace");
        worst = trace.v.iter().fold(worst, |w, v| w.max((v - 1.0).abs()));
    }
    let elapsed = start.elapsed().as_secs_f64();
    outcome(
        worst < 1e-6 && elapsed < 1.0,
        format!("max|V-1| = {worst:.2e}, {elapsed:.2} s"),
    )
}

fn criterion_3() -> Outcome {
    let sys = SpinSystem::nv_14n();
    let tau = TauGrid::default();
    let depth_of = |config, site, pair| {
        let dir = direction(config);
        let sel = TransitionSelection::site(site, pair).unwrap();
        let field = resonant_field(&sys, &sel, &dir);
        depth(
            &eseem_time_domain(&sys, &field, &sel, &tau)
                .expect("trace")
                .v,
        )
    };
    let mut pass = true;
    let mut lines = Vec::new();
    let mut record = |name: String, d: f64, ok: bool| {
        pass &= ok;
        lines.push(format!("{name} {d:.3}"));
    };
    for site in 1..=4 {
        let d = depth_of(config_001(), site, ManifoldPair::MinusZero);
        record(format!("[001] S{site}-"), d, d >= 0.85);
        let d = depth_of(config_001(), site, ManifoldPair::ZeroPlus);
        record(format!("[001] S{site}+"), d, (0.1..=0.6).contains(&d));
    }
    for site in 1..=4 {
        for pair in [ManifoldPair::MinusZero, ManifoldPair::ZeroPlus] {
            let d = depth_of(config_110(), site, pair);
            record(
                format!("[110] S{site}{}", pair.branch().sign()),
                d,
                (0.1..=0.6).contains(&d),
            );
        }
    }
    outcome(pass, lines.join(", "))
}

/// Positive peaks within two native bins of one of `manifold`'s simulated
/// nuclear frequencies.
fn manifold_peaks(peaks: &PeakList, freqs: &[f64], bin: f64) -> PeakList {
    PeakList {
        peaks: peaks
            .positive()
            .peaks
            .into_iter()
            .filter(|p| freqs.iter().any(|f| (f - p.freq_mhz).abs() < 2.0 * bin))
            .collect(),
    }
}

fn additive_counts(config: (Vector3<f64>, EulerAngles)) -> Vec<(String, usize)> {
    let sys = SpinSystem::nv_14n();
    let dir = direction(config);
    let mut out = Vec::new();
    for site in 1..=4u8 {
        for pair in [ManifoldPair::MinusZero, ManifoldPair::ZeroPlus] {
            let sel = TransitionSelection::site(site, pair).unwrap();
            let field = resonant_field(&sys, &sel, &dir);
            let (peaks, bin) = processed_peaks(&sys, &field, &sel);
            let freqs = nuclear_frequencies(&sys, &field, &sel).unwrap();
            let (a, b) = pair.manifolds();
            for m in [a, b] {
                let list = manifold_peaks(&peaks, freqs.get(m), bin);
                let triples = check_additive_relation(&list, 0.02).len();
                out.push((format!("S{site}{}/{m}", pair.branch().sign()), triples));
            }
        }
    }
    out
}

fn criterion_4() -> Outcome {
    // Every [001] trace must show one triple per manifold; the [110] traces
    // carry a single basic harmonic per manifold and are reported only.
    let counts = additive_counts(config_001());
    let pass = counts.iter().all(|(_, n)| *n == 1);
    let failing: Vec<_> = counts
        .iter()
        .filter(|(_, n)| *n != 1)
        .map(|(k, n)| format!("{k}={n}"))
        .collect();
    let info = additive_counts(config_110());
    let with_triple = info.iter().filter(|(_, n)| *n == 1).count();
    outcome(
        pass,
        format!(
            "[001]: {}/{} manifolds with exactly one triple{}; [110] (informational): {}/{}",
            counts.len() - failing.len(),
            counts.len(),
            if failing.is_empty() {
                String::new()
            } else {
                format!(" (off: {})", failing.join(" "))
            },
            with_triple,
            info.len()
        ),
    )
}

fn criterion_5() -> Outcome {
    let dir = direction(config_111());
    let cases = [
        (
            "G",
            SpinSystem::nv_14n_13c_site_g(),
            2.56,
            ManifoldPair::MinusZero,
            true,
        ),
        (
            "D",
            SpinSystem::nv_14n_13c_site_d(),
            -6.70,
            ManifoldPair::MinusZero,
            true,
        ),
        (
            "D",
            SpinSystem::nv_14n_13c_site_d(),
            -6.70,
            ManifoldPair::ZeroPlus,
            true,
        ),
        (
            "G",
            SpinSystem::nv_14n_13c_site_g(),
            2.56,
            ManifoldPair::ZeroPlus,
            false,
        ),
    ];
    let mut pass = true;
    let mut lines = Vec::new();
    for (name, sys, a, pair, scored) in cases {
        let sel = TransitionSelection::site(1, pair).unwrap();
        let field = resonant_field(&sys, &sel, &dir);
        let (peaks, bin) = processed_peaks(&sys, &field, &sel);
        let larmor = c13_larmor_mhz(field.magnitude_mt());
        // ν = |ν_I − m_S·A| for the driven m_S = ±1 manifold
        let shifted = match pair {
            ManifoldPair::ZeroPlus => (larmor - a).abs(),
            ManifoldPair::MinusZero => (larmor + a).abs(),
        };
        let positive = peaks.positive();
        let anchor = positive
            .nearest(larmor, f64::INFINITY)
            .map(|p| p.freq_mhz - larmor);
        let shift = positive
            .nearest(shifted, f64::INFINITY)
            .map(|p| p.freq_mhz - shifted);
        let ok = anchor.is_some_and(|d| d.abs() <= bin) && shift.is_some_and(|d| d.abs() <= 0.05);
        if scored {
            pass &= ok;
        }
        lines.push(format!(
            "{name} S1{}{}: nu0 off {:+.4}, nu off {:+.4} MHz",
            pair.branch().sign(),
            if scored { "" } else { " (informational)" },
            anchor.unwrap_or(f64::NAN),
            shift.unwrap_or(f64::NAN)
        ));
    }
    outcome(pass, lines.join("; "))
}

fn coupling_observation(
    sys: &SpinSystem,
    config: (Vector3<f64>, EulerAngles),
    site: u8,
    pair: ManifoldPair,
) -> CouplingObservation {
    let sel = TransitionSelection::site(site, pair).unwrap();
    let dir = direction(config);
    let field = resonant_field(sys, &sel, &dir);
    let freqs = nuclear_frequencies(sys, &field, &sel).unwrap();
    let (a, b) = pair.manifolds();
    let peaks = [a, b]
        .into_iter()
        .flat_map(|m| {
            freqs
                .get(m)
                .iter()
                .enumerate()
                .map(move |(index, f)| ObservedFrequency {
                    manifold: m,
                    index,
                    freq_mhz: *f,
                })
        })
        .collect();
    CouplingObservation {
        nominal_axis: [config.0.x, config.0.y, config.0.z],
        euler: config.1,
        field_mt: field.magnitude_mt(),
        selection: sel,
        peaks,
    }
}

fn criterion_6() -> Outcome {
    let sys = SpinSystem::nv_14n();
    let clean = [
        coupling_observation(&sys, config_001(), 1, ManifoldPair::ZeroPlus),
        coupling_observation(&sys, config_110(), 2, ManifoldPair::ZeroPlus),
    ];
    let truth = [-2.19, -2.65, -4.95];
    let bounds = [0.02, 0.03, 0.02];
    let mut worst = [0.0f64; 3];
    let mut failures = 0;
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noise = Normal::new(0.0, 0.01).unwrap();
        let mut obs = clean.to_vec();
        for p in obs.iter_mut().flat_map(|o| o.peaks.iter_mut()) {
            p.freq_mhz += noise.sample(&mut rng);
        }
        match fit_nitrogen_couplings(&sys, &obs, [-2.0, -2.4, -4.7]) {
            Ok(fit) => {
                for (k, v) in fit.values().iter().enumerate() {
                    worst[k] = worst[k].max((v - truth[k]).abs());
                }
            }
            Err(_) => failures += 1,
        }
    }
    let pass = failures == 0 && (0..3).all(|k| worst[k] <= bounds[k]);
    outcome(
        pass,
        format!(
            "worst |error| A_par {:.4}, A_perp {:.4}, P_par {:.4} MHz over 20 seeds, {failures} fit failures",
            worst[0], worst[1], worst[2]
        ),
    )
}

fn criterion_7() -> Outcome {
    let (a, t2, n) = (1.0, 0.74, 1.45);
    let t: Vec<f64> = (0..200).map(|k| 12.5 * k as f64).collect();
    let mut worst = (0.0f64, 0.0f64);
    let mut failures = 0;
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noise = Normal::new(0.0, 0.01).unwrap();
        let amp: Vec<f64> = t
            .iter()
            .map(|x| stretched_exponential(*x, a, t2, n) + noise.sample(&mut rng))
            .collect();
        let decay = EchoDecay::new(t.clone(), amp).unwrap();
        match fit_stretched_exponential(&decay, None) {
            Ok(fit) => {
                worst.0 = worst.0.max((fit.t2_ms / t2 - 1.0).abs());
                worst.1 = worst.1.max((fit.n / n - 1.0).abs());
            }
            Err(_) => failures += 1,
        }
    }
    let pass = failures == 0 && worst.0 <= 0.02 && worst.1 <= 0.02;
    outcome(
        pass,
        format!(
            "worst relative error T2 {:.4}, n {:.4} over 20 seeds, {failures} fit failures",
            worst.0, worst.1
        ),
    )
}

fn criterion_8() -> Outcome {
    let sys = SpinSystem::nv_electron();
    let mut pass = true;
    let mut lines = Vec::new();
    for (nominal, euler) in [
        (Vector3::new(1.0, 1.0, 0.0), EulerAngles::new(2.0, 2.2, 0.0)),
        (Vector3::new(0.0, 0.0, 1.0), EulerAngles::new(8.0, 1.0, 0.0)),
    ] {
        let truth = rotate_field(&nominal, &euler);
        let (lines_true, _) = resonance_fields(
            &sys,
            MW_GHZ,
            &truth,
            (1.0, 1500.0),
            &ResonanceOptions::default(),
        )
        .expect("lines");
        let mut worst = 0.0f64;
        let mut failures = 0;
        for seed in 0..20u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let noise = Normal::new(0.0, 0.01).unwrap();
            let peaks: Vec<MeasuredPeak> = lines_true
                .iter()
                .map(|l| MeasuredPeak {
                    label: l.label,
                    field_mt: l.field_mt + noise.sample(&mut rng),
                })
                .collect();
            match fit_orientation(&peaks, &sys, MW_GHZ, &nominal, &EulerAngles::default()) {
                Ok(fit) => {
                    worst = worst.max(direction_class_distance_deg(
                        &truth,
                        &Vector3::from(fit.direction),
                    ))
                }
                Err(_) => failures += 1,
            }
        }
        pass &= lines_true.len() == 8 && failures == 0 && worst <= 0.1;
        lines.push(format!(
            "({}, {}, {}) deg: {} peaks, worst {worst:.4} deg, {failures} failures",
            euler.alpha,
            euler.beta,
            euler.gamma,
            lines_true.len()
        ));
    }
    outcome(pass, lines.join("; "))
}

fn criterion_9() -> Outcome {
    let sel = TransitionSelection::site(1, ManifoldPair::MinusZero).unwrap();
    let scan = cancellation_scan(
        &SpinSystem::nv_14n(),
        &direction(config_001()),
        &sel,
        (100.0, 600.0),
        51,
        &TauGrid::default(),
    )
    .expect("scan");
    let argmax = scan.argmax_mt;
    let first = argmax.is_some_and(|b| (290.0..=410.0).contains(&b));

    // distant ¹³C: 0.05 MHz point-dipole coupling, axis at 45° to the NV axis
    let axis = Vector3::new(1.0, 1.0, 1.0)
        .normalize()
        .cross(&Vector3::z())
        .normalize()
        + Vector3::new(1.0, 1.0, 1.0).normalize();
    let carbon = NucleusSpec::carbon13("13C distant", 0.10, -0.05, axis).unwrap();
    let distant = SpinSystem::nv_electron().with_nuclei(vec![carbon]);
    let mut worst = 0.0f64;
    for pair in [ManifoldPair::MinusZero, ManifoldPair::ZeroPlus] {
        let sel = TransitionSelection::site(1, pair).unwrap();
        let scan = cancellation_scan(
            &distant,
            &direction(config_001()),
            &sel,
            (280.0, 400.0),
            25,
            &TauGrid::default(),
        )
        .expect("scan");
        worst = scan.points.iter().fold(worst, |w, (_, d)| w.max(*d));
    }
    let second = worst < 0.01;
    outcome(
        first && second,
        format!("T- argmax {argmax:.1?} mT; distant 13C max depth {worst:.2e} over 280-400 mT"),
    )
}

fn criterion_10() -> Outcome {
    let model = FluctuatorModel::new(2.5, 5.6e-5, 2.6e-3, 0.7).unwrap();
    let temps: Vec<f64> = (0..=990).map(|k| 1.0 + 0.1 * k as f64).collect();
    let t2: Vec<f64> = temps
        .iter()
        .map(|t| t2_of_temperature(&model, *t))
        .collect();
    let minima: Vec<usize> = (1..t2.len() - 1)
        .filter(|&k| t2[k] < t2[k - 1] && t2[k] <= t2[k + 1])
        .collect();
    let shape = minima.len() == 1 && {
        let k = minima[0];
        (5.0..=25.0).contains(&temps[k]) && t2[k] <= 0.75 * model.t2_bath_ms
    };
    let (t_min, t2_min) = minima
        .first()
        .map(|&k| (temps[k], t2[k]))
        .unwrap_or((f64::NAN, f64::NAN));

    let grid: Vec<f64> = (1..=35).map(|k| 2.0 * k as f64).collect();
    let init = FluctuatorModel::new(2.0, 1e-4, 2e-3, 0.6).unwrap();
    let mut worst = 0.0f64;
    let mut failures = 0;
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // 1% relative scatter, the level of the quoted T2 uncertainty
        let noise = Normal::new(0.0, 0.01).unwrap();
        let data: Vec<(f64, f64)> = grid
            .iter()
            .map(|t| {
                (
                    *t,
                    t2_of_temperature(&model, *t) * (1.0 + noise.sample(&mut rng)),
                )
            })
            .collect();
        match fit_t2_temperature(&data, &init) {
            Ok(fit) => worst = worst.max((fit.model.e_a_mev / model.e_a_mev - 1.0).abs()),
            Err(_) => failures += 1,
        }
    }
    let pass = shape && failures == 0 && worst <= 0.15;
    outcome(
        pass,
        format!(
            "{} minimum, at {t_min:.1} K with T2 {t2_min:.3} ms ({:.0}% reduction); E_a worst relative error {worst:.3} over 20 seeds, {failures} failures",
            minima.len(),
            100.0 * (1.0 - t2_min / model.t2_bath_ms)
        ),
    )
}

fn criterion_11() -> Outcome {
    let est = flip_flop_suppression(1.0, 300.0, 0.2).expect("estimate");
    let exact = est.fraction == 1.0 / 300.0 && est.corrected_t2_ms == 60.0;
    let coupling = mean_dipolar_coupling(ppm_to_cm3(0.1)).expect("coupling");
    let band = (1.0 / 3.0..=3.0).contains(&coupling);
    outcome(
        exact && band,
        format!(
            "fraction {}, T2 {} ms; coupling at 0.1 ppm {coupling:.3} kHz",
            est.fraction, est.corrected_t2_ms
        ),
    )
}

/// Eigenvalues of a complex Hermitian matrix from the real symmetric
/// embedding [[Re, −Im], [Im, Re]], which doubles each eigenvalue.
fn oracle_eigenvalues(h: &DMatrix<Complex64>) -> Vec<f64> {
    let n = h.nrows();
    let mut real = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            real[(i, j)] = z.re;
            real[(i + n, j + n)] = z.re;
            real[(i, j + n)] = -z.im;
            real[(i + n, j)] = z.im;
        }
    }
    let mut ev: Vec<f64> = real.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev.into_iter().step_by(2).collect()
}

fn criterion_12() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = rng.random_range(1..=18);
        let mut h = DMatrix::<Complex64>::zeros(n, n);
        for i in 0..n {
            h[(i, i)] = Complex64::new(rng.random_range(-1e3..1e3), 0.0);
            for j in i + 1..n {
                let z = Complex64::new(rng.random_range(-1e3..1e3), rng.random_range(-1e3..1e3));
                h[(i, j)] = z;
                h[(j, i)] = z.conj();
            }
        }
        let want = oracle_eigenvalues(&h);
        let got =
            eigensolve(&HamiltonianMatrix::from_matrix(vec![n], h).unwrap()).expect("eigensolve");
        let scale = want
            .iter()
            .map(|v| v.abs())
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        for (a, b) in got.eigenvalues().iter().zip(&want) {
            worst = worst.max((a - b).abs() / scale);
        }
    }
    outcome(
        worst < 1e-6,
        format!("worst relative eigenvalue error {worst:.2e} over 100 matrices"),
    )
}

fn criterion_13() -> Outcome {
    let sys = SpinSystem::nv_14n();
    let sel = TransitionSelection::site(1, ManifoldPair::MinusZero).unwrap();
    let field = resonant_field(&sys, &sel, &direction(config_001()));
    let tau = TauGrid::spanning(200.0, 0.004).unwrap();
    let window = 2.0;
    let reference = eseem_time_domain(&sys, &field, &sel, &tau).expect("trace");
    let retention = |fa, fq| {
        let t = damped_ensemble_trace(&sys, &field, &sel, &tau, fa, fq, 200, 0).expect("ensemble");
        modulation_retention(&t, &reference, window)
    };
    let small = retention(0.002, 0.01);
    let large = retention(0.05, 0.05);
    let threshold = (-1.0f64).exp();
    outcome(
        small > 0.7 && large < threshold,
        format!(
            "envelope at 200 us: (0.2%, 1%) {small:.3} (needs > 0.7), (5%, 5%) {large:.3} (needs < {threshold:.3})"
        ),
    )
}

fn main() {
    let criteria: [Criterion; 13] = [
        ("ESR positions", criterion_1),
        ("on-axis suppression", criterion_2),
        ("modulation-depth ordering", criterion_3),
        ("harmonic algebra", criterion_4),
        ("13C peak algebra", criterion_5),
        ("coupling round-trip", criterion_6),
        ("decay fit round-trip", criterion_7),
        ("orientation fit round-trip", criterion_8),
        ("cancellation scan", criterion_9),
        ("fluctuator model", criterion_10),
        ("bath arithmetic", criterion_11),
        ("eigensolver oracle", criterion_12),
        ("damping bound", criterion_13),
    ];
    let mut failed = Vec::new();
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        println!(
            "criterion {:>2} {:<27} {}  ({:.1} s) {}",
            k + 1,
            name,
            if result.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            result.detail
        );
        if !result.pass {
            failed.push(k + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 13 criteria pass");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
