use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::geometry::{site_rotation, REFERENCE_SITE_AXIS};
use super::operators::SpinQuantum;
use super::tensor::AxialTensor;
use crate::constants::{D_NV_MHZ, G_NV, G_N_13C, G_N_14N};
use crate::{Error, Result};

/// A nucleus coupled to the electron spin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawNucleus", into = "RawNucleus")]
pub struct NucleusSpec {
    label: String,
    spin: SpinQuantum,
    g_n: f64,
    hyperfine: AxialTensor,
    quadrupole: Option<AxialTensor>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNucleus {
    label: String,
    multiplicity: u32,
    g_n: f64,
    hyperfine: AxialTensor,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    quadrupole: Option<AxialTensor>,
}

impl TryFrom<RawNucleus> for NucleusSpec {
    type Error = Error;
    fn try_from(raw: RawNucleus) -> Result<Self> {
        NucleusSpec::new(
            raw.label,
            SpinQuantum::from_multiplicity(raw.multiplicity)?,
            raw.g_n,
            raw.hyperfine,
            raw.quadrupole,
        )
    }
}

impl From<NucleusSpec> for RawNucleus {
    fn from(n: NucleusSpec) -> Self {
        RawNucleus {
            label: n.label,
            multiplicity: n.spin.into(),
            g_n: n.g_n,
            hyperfine: n.hyperfine,
            quadrupole: n.quadrupole,
        }
    }
}

impl NucleusSpec {
    pub fn new(
        label: impl Into<String>,
        spin: SpinQuantum,
        g_n: f64,
        hyperfine: AxialTensor,
        quadrupole: Option<AxialTensor>,
    ) -> Result<Self> {
        let label = label.into();
        if quadrupole.is_some() && spin.spin() < 1.0 {
            return Err(Error::invalid(format!(
                "nucleus {label}: quadrupole coupling needs I ≥ 1"
            )));
        }
        if !g_n.is_finite() {
            return Err(Error::invalid(format!(
                "nucleus {label}: g_n must be finite"
            )));
        }
        Ok(NucleusSpec {
            label,
            spin,
            g_n,
            hyperfine,
            quadrupole,
        })
    }

    /// Central ¹⁴N of NV⁻ with coaxial axial hyperfine and quadrupole tensors.
    pub fn nitrogen14(a_par: f64, a_perp: f64, p_par: f64, axis: Vector3<f64>) -> Result<Self> {
        Self::new(
            "14N",
            SpinQuantum::ONE,
            G_N_14N,
            AxialTensor::new(a_par, a_perp, axis)?,
            Some(AxialTensor::quadrupole(p_par, axis)?),
        )
    }

    pub fn carbon13(
        label: impl Into<String>,
        a_par: f64,
        a_perp: f64,
        axis: Vector3<f64>,
    ) -> Result<Self> {
        Self::new(
            label,
            SpinQuantum::HALF,
            G_N_13C,
            AxialTensor::new(a_par, a_perp, axis)?,
            None,
        )
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn spin(&self) -> SpinQuantum {
        self.spin
    }

    pub fn g_n(&self) -> f64 {
        self.g_n
    }

    pub fn hyperfine(&self) -> &AxialTensor {
        &self.hyperfine
    }

    pub fn quadrupole(&self) -> Option<&AxialTensor> {
        self.quadrupole.as_ref()
    }

    /// (A∥ + 2A⊥)/3
    pub fn a_iso(&self) -> f64 {
        self.hyperfine.isotropic_part()
    }

    /// (A∥ − A⊥)/3
    pub fn anisotropy(&self) -> f64 {
        self.hyperfine.anisotropic_part()
    }

    pub fn with_hyperfine(&self, a_par: f64, a_perp: f64) -> Self {
        NucleusSpec {
            hyperfine: self.hyperfine.with_principal_values(a_par, a_perp),
            ..self.clone()
        }
    }

    /// Replaces P∥; no-op for nuclei without a quadrupole tensor.
    pub fn with_quadrupole(&self, p_par: f64) -> Self {
        let quadrupole = self
            .quadrupole
            .map(|q| q.with_principal_values(p_par, -p_par / 2.0));
        NucleusSpec {
            quadrupole,
            ..self.clone()
        }
    }

    fn rotated(&self, r: &Matrix3<f64>) -> Self {
        NucleusSpec {
            hyperfine: self.hyperfine.rotated(r),
            quadrupole: self.quadrupole.map(|q| q.rotated(r)),
            ..self.clone()
        }
    }
}

/// Electron S = 1 with isotropic g, axial ZFS, and coupled nuclei.
///
/// Tensors are written for the NV center whose axis is [111]; use
/// [`SpinSystem::for_site`] to obtain the other crystal sites.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSystem", into = "RawSystem")]
pub struct SpinSystem {
    g_e: f64,
    zfs: AxialTensor,
    nuclei: Vec<NucleusSpec>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    g_e: f64,
    zfs: AxialTensor,
    #[serde(default)]
    nuclei: Vec<NucleusSpec>,
}

impl TryFrom<RawSystem> for SpinSystem {
    type Error = Error;
    fn try_from(raw: RawSystem) -> Result<Self> {
        SpinSystem::new(raw.g_e, raw.zfs, raw.nuclei)
    }
}

impl From<SpinSystem> for RawSystem {
    fn from(s: SpinSystem) -> Self {
        RawSystem {
            g_e: s.g_e,
            zfs: s.zfs,
            nuclei: s.nuclei,
        }
    }
}

impl SpinSystem {
    pub fn new(g_e: f64, zfs: AxialTensor, nuclei: Vec<NucleusSpec>) -> Result<Self> {
        if !(g_e.is_finite() && g_e > 0.0) {
            return Err(Error::invalid(format!("g_e must be positive, got {g_e}")));
        }
        Ok(SpinSystem { g_e, zfs, nuclei })
    }

    /// Bare NV⁻ electron: D = 2873 MHz, g = 2.0030, axis [111].
    pub fn nv_electron() -> Self {
        let axis = Vector3::from(REFERENCE_SITE_AXIS);
        SpinSystem {
            g_e: G_NV,
            zfs: AxialTensor::zero_field_splitting(D_NV_MHZ, axis).expect("valid axis"),
            nuclei: Vec::new(),
        }
    }

    /// NV⁻ with the central ¹⁴N: A∥ = −2.19, A⊥ = −2.65, P∥ = −4.95 MHz.
    pub fn nv_14n() -> Self {
        Self::nv_14n_with(-2.19, -2.65, -4.95)
    }

    pub fn nv_14n_with(a_par: f64, a_perp: f64, p_par: f64) -> Self {
        let axis = Vector3::from(REFERENCE_SITE_AXIS);
        let mut sys = Self::nv_electron();
        sys.nuclei
            .push(NucleusSpec::nitrogen14(a_par, a_perp, p_par, axis).expect("valid axis"));
        sys
    }

    /// NV⁻ + ¹⁴N + a ¹³C whose secular coupling along [111] is `a_secular`.
    ///
    /// The ¹³C hyperfine axis is [001], at the magic angle to [111], so for a
    /// field along [111] the secular part equals the isotropic part and the
    /// anisotropy `t` only enters through the pseudo-secular term.
    pub fn nv_14n_13c(label: &str, a_secular: f64, t: f64) -> Self {
        let mut sys = Self::nv_14n();
        sys.nuclei.push(
            NucleusSpec::carbon13(label, a_secular + 2.0 * t, a_secular - t, Vector3::z())
                .expect("valid axis"),
        );
        sys
    }

    /// Fourth-nearest-neighbour ¹³C ("site G"), secular coupling +2.56 MHz.
    pub fn nv_14n_13c_site_g() -> Self {
        Self::nv_14n_13c("13C site G", 2.56, 0.15)
    }

    /// Second-nearest-neighbour ¹³C ("site D"), secular coupling −6.70 MHz.
    pub fn nv_14n_13c_site_d() -> Self {
        Self::nv_14n_13c("13C site D", -6.70, 0.20)
    }

    pub fn g_e(&self) -> f64 {
        self.g_e
    }

    pub fn zfs(&self) -> &AxialTensor {
        &self.zfs
    }

    /// Axial D (∥ − ⊥ of the ZFS tensor), MHz.
    pub fn d_mhz(&self) -> f64 {
        self.zfs.parallel() - self.zfs.perpendicular()
    }

    pub fn nuclei(&self) -> &[NucleusSpec] {
        &self.nuclei
    }

    /// Factor dimensions, electron first then nuclei in list order.
    pub fn factor_dims(&self) -> Vec<usize> {
        std::iter::once(3)
            .chain(self.nuclei.iter().map(|n| n.spin.multiplicity()))
            .collect()
    }

    pub fn nuclear_dimension(&self) -> usize {
        self.nuclei.iter().map(|n| n.spin.multiplicity()).product()
    }

    pub fn dimension(&self) -> usize {
        3 * self.nuclear_dimension()
    }

    pub fn electron_only(&self) -> Self {
        SpinSystem {
            nuclei: Vec::new(),
            ..self.clone()
        }
    }

    pub fn with_nuclei(&self, nuclei: Vec<NucleusSpec>) -> Self {
        SpinSystem {
            nuclei,
            ..self.clone()
        }
    }

    pub fn with_g_e(&self, g_e: f64) -> Result<Self> {
        Self::new(g_e, self.zfs, self.nuclei.clone())
    }

    /// Applies a rotation to every tensor axis.
    pub fn rotated(&self, r: &Matrix3<f64>) -> Self {
        SpinSystem {
            g_e: self.g_e,
            zfs: self.zfs.rotated(r),
            nuclei: self.nuclei.iter().map(|n| n.rotated(r)).collect(),
        }
    }

    /// The same center on the crystal site whose NV axis is `axis`.
    pub fn for_site(&self, axis: &Vector3<f64>) -> Self {
        self.rotated(&site_rotation(axis))
    }
}
