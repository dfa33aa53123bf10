use serde::{Deserialize, Serialize};

use super::holevo::holevo_bound;
use crate::error::{invalid, Result};
use crate::link::{mutual_information, received_snr, DetectorModel, LinkBudget, Modulation};

/// Column order of [`SecurityReport::csv_row`].
pub const CSV_HEADER: &str = "d_km,t_ch,snr,i_ab,chi_eb,r_c,beta,fer,skr_asym,skr_ext";

/// Key-rate figures for one operating point, all in bits per symbol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecurityReport {
    pub d_km: f64,
    pub t_ch: f64,
    pub snr: f64,
    pub i_ab: f64,
    pub chi_eb: f64,
    pub r_c: f64,
    pub beta: f64,
    pub fer: f64,
    pub skr_asymptotic: f64,
    /// `max(0, skr_extracted_raw)`.
    pub skr_extracted: f64,
    pub skr_extracted_raw: f64,
    pub no_key: bool,
}

impl SecurityReport {
    /// Assembles a report from an SNR and a Holevo bound that were obtained elsewhere
    /// (for instance from parameter estimates rather than true link values).
    pub fn from_parts(d_km: f64, t_ch: f64, snr: f64, chi_eb: f64, r_c: f64, fer: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&fer) {
            return Err(invalid(format!("FER must lie in [0, 1], got {fer}")));
        }
        if !(r_c > 0.0) {
            return Err(invalid(format!("code rate must be > 0, got {r_c}")));
        }
        if !(snr >= 0.0) {
            return Err(invalid(format!("SNR must be >= 0, got {snr}")));
        }
        let i_ab = mutual_information(snr);
        let beta = r_c / i_ab;
        let raw = (1.0 - fer) * (r_c - chi_eb);
        Ok(Self {
            d_km,
            t_ch,
            snr,
            i_ab,
            chi_eb,
            r_c,
            beta,
            fer,
            skr_asymptotic: beta * i_ab - chi_eb,
            skr_extracted: raw.max(0.0),
            skr_extracted_raw: raw,
            no_key: raw <= 0.0,
        })
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.d_km,
            self.t_ch,
            self.snr,
            self.i_ab,
            self.chi_eb,
            self.r_c,
            self.beta,
            self.fer,
            self.skr_asymptotic,
            self.skr_extracted
        )
    }
}

/// Report for code rate `r_c` running at frame error rate `fer` on the given link.
pub fn skr_report(
    modulation: &Modulation,
    link: &LinkBudget,
    det: &DetectorModel,
    r_c: f64,
    fer: f64,
) -> Result<SecurityReport> {
    let snr = received_snr(modulation, link, det);
    let chi = holevo_bound(modulation, link, det)?;
    SecurityReport::from_parts(link.distance_km, link.t_ch, snr, chi, r_c, fer)
}

/// `beta * I_AB - chi_EB`.
pub fn asymptotic_skr(beta: f64, i_ab: f64, chi_eb: f64) -> f64 {
    beta * i_ab - chi_eb
}
