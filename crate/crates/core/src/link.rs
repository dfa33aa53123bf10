//! Shot-noise-unit parameterization of the Gaussian link.
//!
//! All variances are in shot-noise units (SNU) and detection is heterodyne. The excess
//! noise `xi` stored in a [`LinkBudget`] is referenced at the channel output; use
//! [`LinkBudget::xi_input`] when the input-referenced value is needed.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Relative tolerance used when a link carries both a distance and a transmittance.
const CONSISTENCY_TOL: f64 = 1e-9;

/// Power transmittance of `d` km of fiber with attenuation `alpha_db_per_km`.
pub fn transmittance_from_distance(alpha_db_per_km: f64, d: f64) -> Result<f64> {
    if !(alpha_db_per_km >= 0.0) || !alpha_db_per_km.is_finite() {
        return Err(invalid(format!("attenuation must be finite and >= 0, got {alpha_db_per_km}")));
    }
    if !(d >= 0.0) || !d.is_finite() {
        return Err(invalid(format!("distance must be finite and >= 0, got {d}")));
    }
    Ok(10f64.powf(-alpha_db_per_km * d / 10.0))
}

/// Inverse of [`transmittance_from_distance`].
pub fn distance_from_transmittance(alpha_db_per_km: f64, t: f64) -> Result<f64> {
    if !(alpha_db_per_km > 0.0) || !alpha_db_per_km.is_finite() {
        return Err(invalid(format!("attenuation must be finite and > 0, got {alpha_db_per_km}")));
    }
    if !(t > 0.0 && t <= 1.0) {
        return Err(invalid(format!("transmittance must lie in (0, 1], got {t}")));
    }
    Ok(-10.0 * t.log10() / alpha_db_per_km)
}

/// Attenuation in dB of a power transmittance.
pub fn transmittance_to_db(t: f64) -> f64 {
    -10.0 * t.log10()
}

/// Fiber link: attenuation, length, transmittance and output-referenced excess noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawLinkBudget")]
pub struct LinkBudget {
    pub alpha_db_per_km: f64,
    pub distance_km: f64,
    pub t_ch: f64,
    pub xi: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLinkBudget {
    alpha_db_per_km: f64,
    #[serde(default)]
    distance_km: Option<f64>,
    #[serde(default)]
    t_ch: Option<f64>,
    xi: f64,
}

impl TryFrom<RawLinkBudget> for LinkBudget {
    type Error = crate::Error;

    fn try_from(raw: RawLinkBudget) -> Result<Self> {
        match (raw.distance_km, raw.t_ch) {
            (Some(d), None) => LinkBudget::from_distance(raw.alpha_db_per_km, d, raw.xi),
            (None, Some(t)) => LinkBudget::from_transmittance(raw.alpha_db_per_km, t, raw.xi),
            (Some(d), Some(t)) => {
                let link = LinkBudget::from_distance(raw.alpha_db_per_km, d, raw.xi)?;
                if ((link.t_ch - t) / t).abs() > CONSISTENCY_TOL {
                    return Err(invalid(format!(
                        "t_ch = {t} disagrees with distance {d} km at {} dB/km (expected {})",
                        raw.alpha_db_per_km, link.t_ch
                    )));
                }
                Ok(link)
            }
            (None, None) => Err(invalid("link needs distance_km or t_ch")),
        }
    }
}

impl LinkBudget {
    pub fn from_distance(alpha_db_per_km: f64, distance_km: f64, xi: f64) -> Result<Self> {
        let t_ch = transmittance_from_distance(alpha_db_per_km, distance_km)?;
        Self::checked(alpha_db_per_km, distance_km, t_ch, xi)
    }

    /// Builds a link from its transmittance. With zero attenuation the distance is
    /// reported as 0.
    pub fn from_transmittance(alpha_db_per_km: f64, t_ch: f64, xi: f64) -> Result<Self> {
        if !(t_ch > 0.0 && t_ch <= 1.0) {
            return Err(invalid(format!("transmittance must lie in (0, 1], got {t_ch}")));
        }
        let distance_km = if alpha_db_per_km > 0.0 { distance_from_transmittance(alpha_db_per_km, t_ch)? } else { 0.0 };
        Self::checked(alpha_db_per_km, distance_km, t_ch, xi)
    }

    fn checked(alpha_db_per_km: f64, distance_km: f64, t_ch: f64, xi: f64) -> Result<Self> {
        if !(xi >= 0.0) || !xi.is_finite() {
            return Err(invalid(format!("excess noise must be finite and >= 0, got {xi}")));
        }
        if !(t_ch > 0.0 && t_ch <= 1.0) {
            return Err(invalid(format!("transmittance must lie in (0, 1], got {t_ch}")));
        }
        Ok(Self { alpha_db_per_km, distance_km, t_ch, xi })
    }

    /// Same fiber with a different output-referenced excess noise.
    pub fn with_xi(self, xi: f64) -> Result<Self> {
        Self::checked(self.alpha_db_per_km, self.distance_km, self.t_ch, xi)
    }

    /// Excess noise referred back to the channel input (`xi / t_ch`).
    pub fn xi_input(&self) -> f64 {
        self.xi / self.t_ch
    }

    /// Channel attenuation in dB.
    pub fn attenuation_db(&self) -> f64 {
        transmittance_to_db(self.t_ch)
    }
}

/// Gaussian modulation variance in SNU (total over both quadratures).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModulation")]
pub struct Modulation {
    pub v_mod: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModulation {
    v_mod: f64,
}

impl TryFrom<RawModulation> for Modulation {
    type Error = crate::Error;

    fn try_from(raw: RawModulation) -> Result<Self> {
        Modulation::new(raw.v_mod)
    }
}

impl Modulation {
    pub fn new(v_mod: f64) -> Result<Self> {
        if !(v_mod > 0.0) || !v_mod.is_finite() {
            return Err(invalid(format!("modulation variance must be finite and > 0, got {v_mod}")));
        }
        Ok(Self { v_mod })
    }
}

/// Receiver model: detector transmittance, electronic noise and whether both are trusted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDetector")]
pub struct DetectorModel {
    pub eta: f64,
    pub nu_el: f64,
    pub trusted: bool,
    /// Shot-to-electronic noise ratio in dB, `10 log10(1 / nu_el)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clearance_db: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDetector {
    eta: f64,
    #[serde(default)]
    nu_el: Option<f64>,
    trusted: bool,
    #[serde(default)]
    clearance_db: Option<f64>,
}

impl TryFrom<RawDetector> for DetectorModel {
    type Error = crate::Error;

    fn try_from(raw: RawDetector) -> Result<Self> {
        let nu_el = match (raw.nu_el, raw.clearance_db) {
            (Some(nu), None) => nu,
            (None, Some(c)) => clearance_to_nu_el(c),
            (Some(nu), Some(c)) => {
                let derived = clearance_to_nu_el(c);
                if ((derived - nu) / nu).abs() > 1e-6 {
                    return Err(invalid(format!("nu_el = {nu} disagrees with clearance {c} dB (implies {derived})")));
                }
                nu
            }
            (None, None) => return Err(invalid("detector needs nu_el or clearance_db")),
        };
        DetectorModel::new(raw.eta, nu_el, raw.trusted)
    }
}

fn clearance_to_nu_el(clearance_db: f64) -> f64 {
    10f64.powf(-clearance_db / 10.0)
}

impl DetectorModel {
    pub fn new(eta: f64, nu_el: f64, trusted: bool) -> Result<Self> {
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(invalid(format!("detector transmittance must lie in (0, 1], got {eta}")));
        }
        if !(nu_el >= 0.0) || !nu_el.is_finite() {
            return Err(invalid(format!("electronic noise must be finite and >= 0, got {nu_el}")));
        }
        if trusted && nu_el > 0.0 && eta >= 1.0 {
            return Err(invalid("a trusted detector with electronic noise needs eta < 1"));
        }
        let clearance_db = (nu_el > 0.0).then(|| 10.0 * (1.0 / nu_el).log10());
        Ok(Self { eta, nu_el, trusted, clearance_db })
    }

    /// Unit-efficiency, noiseless heterodyne receiver.
    pub fn ideal() -> Self {
        Self { eta: 1.0, nu_el: 0.0, trusted: false, clearance_db: None }
    }

    pub fn from_clearance_db(eta: f64, clearance_db: f64, trusted: bool) -> Result<Self> {
        Self::new(eta, clearance_to_nu_el(clearance_db), trusted)
    }

    /// Same receiver with another transmittance (trusted loss added or removed).
    pub fn with_eta(self, eta: f64) -> Result<Self> {
        Self::new(eta, self.nu_el, self.trusted)
    }
}

/// Received SNR `T V_mod / (2 + xi)` with `T = t_ch * eta`.
///
/// Electronic noise is deliberately absent: it only enters the security analysis
/// through the detector model and the simulated data.
pub fn received_snr(modulation: &Modulation, link: &LinkBudget, det: &DetectorModel) -> f64 {
    link.t_ch * det.eta * modulation.v_mod / (2.0 + link.xi)
}

/// Heterodyne mutual information `log2(1 + snr)` in bits per symbol.
pub fn mutual_information(snr: f64) -> f64 {
    (1.0 + snr).log2()
}

/// Distance dependence of the output-referenced excess noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum XiModel {
    /// The same excess noise at the channel output at every distance.
    ConstantOutput { xi: f64 },
    /// Constant input-referenced excess noise: `xi_out = xi * t_ch`.
    ConstantInput { xi: f64 },
    /// `xi_out = intercept + slope * t_ch`.
    Affine { intercept: f64, slope: f64 },
}

impl XiModel {
    /// Output-referenced excess noise at channel transmittance `t_ch`.
    pub fn xi_at(&self, t_ch: f64) -> f64 {
        match *self {
            XiModel::ConstantOutput { xi } => xi,
            XiModel::ConstantInput { xi } => xi * t_ch,
            XiModel::Affine { intercept, slope } => intercept + slope * t_ch,
        }
    }

    pub fn link_at(&self, alpha_db_per_km: f64, distance_km: f64) -> Result<LinkBudget> {
        let t = transmittance_from_distance(alpha_db_per_km, distance_km)?;
        LinkBudget::from_distance(alpha_db_per_km, distance_km, self.xi_at(t))
    }
}

/// Link, modulation and detector read from one JSON document.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkConfig {
    pub link: LinkBudget,
    pub modulation: Modulation,
    pub detector: DetectorModel,
}

impl LinkConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}
