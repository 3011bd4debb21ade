//! Regenerates the synthetic data sets bundled with the command-line tool.
//!
//! Usage: `cargo run -p nvespin-core --example synthetic_data -- DIR`

use std::fmt::Write as _;
use std::fs::File;
use std::path::Path;

use nalgebra::Vector3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use nvespin::eseem::{nuclear_frequencies, resonance_field_for, ManifoldPair, TransitionSelection};
use nvespin::inference::{t2_of_temperature, FluctuatorModel};
use nvespin::io::write_decay;
use nvespin::sigproc::{stretched_exponential, EchoDecay};
use nvespin::spectra::{resonance_fields, ResonanceOptions};
use nvespin::spin::{rotate_field, EulerAngles, FieldVector, SpinSystem};

const MW_GHZ: f64 = 9.6;

fn decay(dir: &Path) {
    // A = 1, T₂ = 0.74 ms, n = 1.45 with 1% additive noise
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let noise = Normal::new(0.0, 0.01).unwrap();
    let t: Vec<f64> = (0..200).map(|k| 12.5 * k as f64).collect();
    let a = t
        .iter()
        .map(|t| stretched_exponential(*t, 1.0, 0.74, 1.45) + noise.sample(&mut rng))
        .collect();
    let decay = EchoDecay::new(t, a).unwrap();
    write_decay(
        File::create(dir.join("decay-sample-C.csv")).unwrap(),
        &decay,
    )
    .unwrap();
}

fn peaks(dir: &Path) {
    // eight assigned lines for a field 2°, 2.2° off [110], 0.01 mT jitter
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let noise = Normal::new(0.0, 0.01).unwrap();
    let truth = rotate_field(
        &Vector3::new(1.0, 1.0, 0.0),
        &EulerAngles::new(2.0, 2.2, 0.0),
    );
    let (lines, _) = resonance_fields(
        &SpinSystem::nv_electron(),
        MW_GHZ,
        &truth,
        (1.0, 1500.0),
        &ResonanceOptions::default(),
    )
    .unwrap();
    let mut text = String::from("label,field_mT\n");
    for l in &lines {
        writeln!(
            text,
            "{},{:.4}",
            l.label,
            l.field_mt + noise.sample(&mut rng)
        )
        .unwrap();
    }
    std::fs::write(dir.join("peaks-110.csv"), text).unwrap();
}

fn t2_table(dir: &Path) {
    // fluctuator dip near 16 K on a 0.7 ms background, 1% relative scatter
    let model = FluctuatorModel::new(2.5, 5.6e-5, 2.6e-3, 0.7).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let noise = Normal::new(0.0, 0.01).unwrap();
    let mut text = String::from("temperature_K,t2_ms\n");
    for k in 1..=35 {
        let t = 2.0 * k as f64;
        writeln!(
            text,
            "{t},{:.5}",
            t2_of_temperature(&model, t) * (1.0 + noise.sample(&mut rng))
        )
        .unwrap();
    }
    std::fs::write(dir.join("t2-sample-B.csv"), text).unwrap();
}

fn frequencies(
    dir: &Path,
    name: &str,
    nominal: Vector3<f64>,
    euler: EulerAngles,
    site: u8,
    seed: u64,
) {
    // the six basic frequencies of the T₀ ↔ T₊ pair, 0.01 MHz jitter
    let sys = SpinSystem::nv_14n();
    let sel = TransitionSelection::site(site, ManifoldPair::ZeroPlus).unwrap();
    let direction = rotate_field(&nominal, &euler);
    let b = resonance_field_for(&sys, &sel, MW_GHZ, &direction).unwrap();
    let freqs = nuclear_frequencies(&sys, &FieldVector::new(b, direction).unwrap(), &sel).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 0.01).unwrap();
    let (ma, mb) = sel.pair.manifolds();
    let mut text = String::from("manifold,index,freq_MHz\n");
    for m in [ma, mb] {
        for (i, f) in freqs.get(m).iter().enumerate() {
            writeln!(text, "{m},{i},{:.4}", f + noise.sample(&mut rng)).unwrap();
        }
    }
    std::fs::write(dir.join(name), text).unwrap();
}

fn main() {
    let dir = std::env::args().nth(1).expect("usage: synthetic_data DIR");
    let dir = Path::new(&dir);
    std::fs::create_dir_all(dir).unwrap();
    decay(dir);
    peaks(dir);
    t2_table(dir);
    frequencies(
        dir,
        "frequencies-001.csv",
        Vector3::new(0.0, 0.0, 1.0),
        EulerAngles::new(8.0, 1.0, 0.0),
        1,
        21,
    );
    frequencies(
        dir,
        "frequencies-110.csv",
        Vector3::new(1.0, 1.0, 0.0),
        EulerAngles::new(1.1, 2.1, 0.0),
        2,
        22,
    );
}
