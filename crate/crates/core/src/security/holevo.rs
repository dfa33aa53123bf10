//! Holevo bound between Eve and Bob's heterodyne data under reverse reconciliation.

use nalgebra::DMatrix;

use super::gaussian::{
    beam_splitter, condition_on_heterodyne, covariance_from_link, entropy_of, g_entropy, symplectic_eigenvalues,
    TwoModeCovariance,
};
use crate::error::{invalid, Result};
use crate::link::{DetectorModel, LinkBudget, Modulation};

/// `chi_EB = S(E) - S(E|b)` in bits per symbol.
///
/// An untrusted receiver's loss and electronic noise are handed to Eve by folding
/// them into the channel. A trusted receiver is modeled as a beam splitter of
/// transmittance `eta` whose second input is one arm of an EPR pair of variance
/// `1 + nu_el / (1 - eta)`.
pub fn holevo_bound(modulation: &Modulation, link: &LinkBudget, det: &DetectorModel) -> Result<f64> {
    if det.trusted {
        trusted(modulation, link, det)
    } else {
        untrusted(modulation, link, det)
    }
}

/// Channel seen by Eve when the receiver is not trusted: transmittance `t eta`,
/// output excess noise `eta xi + nu_el`.
pub fn fold_untrusted(link: &LinkBudget, det: &DetectorModel) -> Result<LinkBudget> {
    LinkBudget::from_transmittance(link.alpha_db_per_km, link.t_ch * det.eta, det.eta * link.xi + det.nu_el)
}

fn untrusted(modulation: &Modulation, link: &LinkBudget, det: &DetectorModel) -> Result<f64> {
    let folded = fold_untrusted(link, det)?;
    let cov = covariance_from_link(modulation, &folded);
    cov.check_physical()?;
    let s_e = cov.entropy()?;
    let nu3 = cov.a - cov.c * cov.c / (cov.b + 1.0);
    let s_e_b = g_entropy(nu3)?;
    Ok(s_e - s_e_b)
}

fn trusted(modulation: &Modulation, link: &LinkBudget, det: &DetectorModel) -> Result<f64> {
    let (eta, nu_el) = (det.eta, det.nu_el);
    if eta >= 1.0 && nu_el > 0.0 {
        return Err(invalid("trusted detector with eta = 1 cannot carry electronic noise"));
    }
    let cov = covariance_from_link(modulation, link);
    cov.check_physical()?;
    let s_e = cov.entropy()?;
    let s_e_b = entropy_of(&trusted_conditional_spectrum(&cov, eta, nu_el)?)?;
    Ok(s_e - s_e_b)
}

/// Symplectic spectrum of modes (A, F, G) after Bob's heterodyne on the detector output.
fn trusted_conditional_spectrum(cov: &TwoModeCovariance, eta: f64, nu_el: f64) -> Result<Vec<f64>> {
    let nu_d = if nu_el > 0.0 { 1.0 + nu_el / (1.0 - eta) } else { 1.0 };
    let e = (nu_d * nu_d - 1.0).max(0.0).sqrt();
    // Modes: 0 = A, 1 = B, 2 = F0, 3 = G.
    let mut sigma = DMatrix::zeros(8, 8);
    sigma.view_mut((0, 0), (4, 4)).copy_from(&cov.to_matrix());
    let epr = TwoModeCovariance { a: nu_d, b: nu_d, c: e }.to_matrix();
    sigma.view_mut((4, 4), (4, 4)).copy_from(&epr);
    let mixed = beam_splitter(&sigma, 1, 2, eta);
    let cond = condition_on_heterodyne(&mixed, &[1])?;
    symplectic_eigenvalues(&cond)
}
