//! Property tests for field-swept resonance positions and amplitudes.

use nalgebra::Vector3;
use proptest::prelude::*;

use nvespin::spectra::PopulationSet;
use nvespin::spectra::{resonance_fields, ResonanceLine, ResonanceOptions};
use nvespin::spin::{cubic_point_group, electron_levels, nv_site_axes, FieldVector, SpinSystem};

const WINDOW: (f64, f64) = (1.0, 1500.0);

fn unit_vector() -> impl Strategy<Value = Vector3<f64>> {
    (-1.0f64..1.0, 0.0f64..std::f64::consts::TAU).prop_map(|(z, phi)| {
        let r = (1.0 - z * z).sqrt();
        Vector3::new(r * phi.cos(), r * phi.sin(), z)
    })
}

fn lines(mw_ghz: f64, dir: &Vector3<f64>) -> Vec<ResonanceLine> {
    resonance_fields(
        &SpinSystem::nv_electron(),
        mw_ghz,
        dir,
        WINDOW,
        &ResonanceOptions::default(),
    )
    .unwrap()
    .0
}

/// Every line in `a` above `rel` of the strongest has a partner in `b`
/// within `tol_mt`.
fn covered(a: &[ResonanceLine], b: &[ResonanceLine], rel: f64, tol_mt: f64) -> bool {
    let max = a.iter().map(|l| l.intensity).fold(0.0, f64::max);
    a.iter()
        .filter(|l| l.intensity > rel * max)
        .all(|l| b.iter().any(|m| (m.field_mt - l.field_mt).abs() < tol_mt))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn reported_fields_are_resonant(mw in 8.0f64..12.0, dir in unit_vector()) {
        // re-evaluate the level splitting independently at each reported field
        let sys = SpinSystem::nv_electron();
        for line in lines(mw, &dir) {
            let site = sys.for_site(&nv_site_axes()[line.label.site() as usize - 1]);
            let levels = electron_levels(&site, &FieldVector::new(line.field_mt, dir).unwrap()).unwrap();
            let gap = (levels.energy(line.upper) - levels.energy(line.lower)).abs();
            prop_assert!((gap - mw * 1e3).abs() < 1e-3, "{} at {} mT off by {} MHz", line.label, line.field_mt, gap - mw * 1e3);
        }
    }

    #[test]
    fn cubic_equivalent_directions_give_the_same_line_positions(
        mw in 8.0f64..12.0,
        dir in unit_vector(),
        op in 0usize..48,
    ) {
        let g = cubic_point_group()[op];
        let a = lines(mw, &dir);
        let b = lines(mw, &(g * dir));
        prop_assert!(covered(&a, &b, 1e-3, 1e-3));
        prop_assert!(covered(&b, &a, 1e-3, 1e-3));
    }

    #[test]
    fn reversing_populations_flips_signed_amplitudes(
        mw in 8.0f64..12.0,
        dir in unit_vector(),
        (p_plus, p_zero, p_minus) in (0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0),
        offset in -1.0f64..1.0,
    ) {
        let p = PopulationSet::new(p_plus, p_zero, p_minus).unwrap();
        let flipped = PopulationSet::new(offset - p_plus, offset - p_zero, offset - p_minus).unwrap();
        for line in lines(mw, &dir) {
            let s = line.clone().with_populations(&p).signed_amplitude;
            let t = line.with_populations(&flipped).signed_amplitude;
            prop_assert!((s + t).abs() <= 1e-12 * s.abs().max(1e-300));
        }
    }
}

#[test]
fn field_along_001_collapses_four_sites_to_two_positions() {
    for mw in [9.0, 9.6, 10.5] {
        let found = lines(mw, &Vector3::z());
        let mut distinct: Vec<f64> = Vec::new();
        for l in &found {
            if !distinct.iter().any(|d| (d - l.field_mt).abs() < 1e-3) {
                distinct.push(l.field_mt);
            }
        }
        assert_eq!(distinct.len(), 2, "{mw} GHz: {distinct:?}");
        for d in &distinct {
            let n = found
                .iter()
                .filter(|l| (l.field_mt - d).abs() < 1e-3)
                .count();
            assert_eq!(n, 4, "{mw} GHz: {n} sites at {d} mT");
        }
    }
}
