//! Bundled spin systems and field orientations.

use nvespin::spin::{EulerAngles, SpinSystem};

use crate::error::{CliError, CliResult};

const SYSTEMS: [(&str, &str); 3] = [
    ("nv-14N", include_str!("../presets/nv-14N.sys")),
    (
        "nv-14N-13C-siteG",
        include_str!("../presets/nv-14N-13C-siteG.sys"),
    ),
    (
        "nv-14N-13C-siteD",
        include_str!("../presets/nv-14N-13C-siteD.sys"),
    ),
];

/// Nominal crystal axis and misalignment of the measured field settings.
const ORIENTATIONS: [(&str, [f64; 3], EulerAngles); 3] = [
    ("001", [0.0, 0.0, 1.0], EulerAngles::new(8.0, 1.0, 0.0)),
    ("110", [1.0, 1.0, 0.0], EulerAngles::new(1.1, 2.1, 0.0)),
    ("111", [1.0, 1.0, 1.0], EulerAngles::new(0.3, 0.9, 0.0)),
];

pub fn system_names() -> Vec<&'static str> {
    SYSTEMS.iter().map(|(n, _)| *n).collect()
}

/// Parses a spin-system document, naming `origin` in errors.
pub fn parse_system(text: &str, origin: &str) -> CliResult<SpinSystem> {
    toml::from_str(text).map_err(|e| CliError::config(format!("{origin}: {e}")))
}

pub fn system(name: &str) -> CliResult<SpinSystem> {
    let name = name.strip_suffix(".sys").unwrap_or(name);
    let (_, text) = SYSTEMS.iter().find(|(n, _)| *n == name).ok_or_else(|| {
        CliError::config(format!(
            "system.preset: unknown preset {name:?}, expected one of {}",
            system_names().join(", ")
        ))
    })?;
    parse_system(text, &format!("preset {name}"))
}

pub fn orientation(name: &str) -> CliResult<([f64; 3], EulerAngles)> {
    ORIENTATIONS
        .iter()
        .find(|(n, _, _)| *n == name)
        .map(|(_, axis, euler)| (*axis, *euler))
        .ok_or_else(|| {
            let names: Vec<&str> = ORIENTATIONS.iter().map(|(n, _, _)| *n).collect();
            CliError::config(format!(
                "field.orientation: unknown orientation {name:?}, expected one of {}",
                names.join(", ")
            ))
        })
}
