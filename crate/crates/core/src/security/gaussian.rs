//! Covariance matrices, symplectic spectra and the bosonic entropy function.
//!
//! Matrices use the mode-wise quadrature ordering `(x1, p1, x2, p2, ...)`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::link::{LinkBudget, Modulation};

/// Eigenvalues this far below 1 are clamped to 1; anything lower is unphysical.
pub const CLAMP_WINDOW: f64 = 1e-6;
const ASYMMETRY_TOL: f64 = 1e-9;
const RESIDUE_TOL: f64 = 1e-9;

/// Bosonic entropy `g(nu)` in bits of a thermal mode with symplectic eigenvalue `nu`.
pub fn g_entropy(nu: f64) -> Result<f64> {
    if !nu.is_finite() {
        return Err(Error::Unphysical(format!("symplectic eigenvalue {nu}")));
    }
    if nu < 1.0 - CLAMP_WINDOW {
        return Err(Error::Unphysical(format!("symplectic eigenvalue {nu} < 1")));
    }
    if nu <= 1.0 {
        return Ok(0.0);
    }
    let p = (nu + 1.0) / 2.0;
    let m = (nu - 1.0) / 2.0;
    Ok(p * p.log2() - m * m.log2())
}

/// Sum of `g` over a symplectic spectrum.
pub fn entropy_of(spectrum: &[f64]) -> Result<f64> {
    spectrum.iter().try_fold(0.0, |acc, &nu| Ok(acc + g_entropy(nu)?))
}

/// Two-mode state in standard form `[[a I, c Z], [c Z, b I]]`, `Z = diag(1, -1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoModeCovariance {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl TwoModeCovariance {
    /// Checks `a, b >= 1` and the uncertainty relation `ab - c^2 >= 1`.
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        let cov = Self { a, b, c };
        cov.check_physical()?;
        Ok(cov)
    }

    pub fn check_physical(&self) -> Result<()> {
        let tol = CLAMP_WINDOW;
        if !(self.a >= 1.0 - tol && self.b >= 1.0 - tol) {
            return Err(Error::Unphysical(format!("mode variances a={}, b={} below vacuum", self.a, self.b)));
        }
        if self.a * self.b - self.c * self.c < 1.0 - tol * self.a * self.b {
            return Err(Error::Unphysical(format!(
                "ab - c^2 = {} violates the uncertainty relation",
                self.a * self.b - self.c * self.c
            )));
        }
        Ok(())
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(4, 4);
        m[(0, 0)] = self.a;
        m[(1, 1)] = self.a;
        m[(2, 2)] = self.b;
        m[(3, 3)] = self.b;
        m[(0, 2)] = self.c;
        m[(2, 0)] = self.c;
        m[(1, 3)] = -self.c;
        m[(3, 1)] = -self.c;
        m
    }

    /// Closed-form symplectic eigenvalues, descending.
    pub fn symplectic_eigenvalues(&self) -> [f64; 2] {
        let (a, b, c) = (self.a, self.b, self.c);
        let delta = a * a + b * b - 2.0 * c * c;
        let det = (a * b - c * c).powi(2);
        let disc = (delta * delta - 4.0 * det).max(0.0).sqrt();
        let nu1 = ((delta + disc) / 2.0).max(0.0).sqrt();
        let nu2 = ((delta - disc) / 2.0).max(0.0).sqrt();
        [nu1, nu2]
    }

    /// `S(AB)` in bits.
    pub fn entropy(&self) -> Result<f64> {
        entropy_of(&self.symplectic_eigenvalues())
    }
}

/// Entanglement-based state shared by Alice and Bob after the channel (before detection).
pub fn covariance_from_link(modulation: &Modulation, link: &LinkBudget) -> TwoModeCovariance {
    let v = modulation.v_mod;
    TwoModeCovariance { a: v + 1.0, b: link.t_ch * v + 1.0 + link.xi, c: (link.t_ch * v * (v + 2.0)).sqrt() }
}

/// Symplectic form `Omega` for `n` modes.
pub fn symplectic_form(n: usize) -> DMatrix<f64> {
    let mut om = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        om[(2 * k, 2 * k + 1)] = 1.0;
        om[(2 * k + 1, 2 * k)] = -1.0;
    }
    om
}

/// Symplectic eigenvalues of an `N`-mode covariance matrix, sorted descending.
///
/// The spectrum of `Omega * sigma` is `{±i nu_k}`; each `nu_k` is read off the
/// imaginary parts after checking the real parts vanish.
pub fn symplectic_eigenvalues(sigma: &DMatrix<f64>) -> Result<Vec<f64>> {
    let dim = sigma.nrows();
    if dim != sigma.ncols() || dim % 2 != 0 || dim == 0 {
        return Err(Error::InvalidParameter(format!(
            "covariance must be 2N x 2N, got {}x{}",
            sigma.nrows(),
            sigma.ncols()
        )));
    }
    let scale = sigma.amax().max(1.0);
    if (sigma - sigma.transpose()).amax() > ASYMMETRY_TOL * scale {
        return Err(Error::InvalidParameter("covariance matrix is not symmetric".into()));
    }
    let ev = (symplectic_form(dim / 2) * sigma).complex_eigenvalues();
    let mut nus = Vec::with_capacity(dim);
    for z in ev.iter() {
        if z.re.abs() > RESIDUE_TOL * scale {
            return Err(Error::Unphysical(format!("eigenvalue {z} of Omega*sigma has a real part")));
        }
        nus.push(z.im.abs());
    }
    nus.sort_by(|a, b| b.total_cmp(a));
    // Each nu appears twice (as +i nu and -i nu); keep one of each pair.
    let out: Vec<f64> = nus.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect();
    for pair in nus.chunks(2) {
        if (pair[0] - pair[1]).abs() > RESIDUE_TOL * scale {
            return Err(Error::Unphysical("symplectic spectrum is not paired".into()));
        }
    }
    Ok(out)
}

/// Conditional covariance of the remaining modes after heterodyning the modes in `measured`.
///
/// `sigma_A - sigma_X (sigma_B + I)^{-1} sigma_X^T`, where `B` are the measured modes.
pub fn condition_on_heterodyne(sigma: &DMatrix<f64>, measured: &[usize]) -> Result<DMatrix<f64>> {
    let n = sigma.nrows() / 2;
    let keep: Vec<usize> = (0..n).filter(|k| !measured.contains(k)).collect();
    let idx = |modes: &[usize]| -> Vec<usize> { modes.iter().flat_map(|&k| [2 * k, 2 * k + 1]).collect() };
    let ki = idx(&keep);
    let mi = idx(measured);
    let sub = |r: &[usize], c: &[usize]| DMatrix::from_fn(r.len(), c.len(), |i, j| sigma[(r[i], c[j])]);
    let s_a = sub(&ki, &ki);
    let s_x = sub(&ki, &mi);
    let s_b = sub(&mi, &mi) + DMatrix::identity(mi.len(), mi.len());
    let inv = s_b.try_inverse().ok_or_else(|| Error::Unphysical("measured block is singular".into()))?;
    Ok(&s_a - &s_x * inv * s_x.transpose())
}

/// Apply a beam splitter of transmittance `eta` to modes `(i, j)`: `i' = sqrt(eta) i + sqrt(1-eta) j`,
/// `j' = -sqrt(1-eta) i + sqrt(eta) j`.
pub fn beam_splitter(sigma: &DMatrix<f64>, i: usize, j: usize, eta: f64) -> DMatrix<f64> {
    let dim = sigma.nrows();
    let (t, r) = (eta.sqrt(), (1.0 - eta).sqrt());
    let mut s = DMatrix::identity(dim, dim);
    for q in 0..2 {
        let (a, b) = (2 * i + q, 2 * j + q);
        s[(a, a)] = t;
        s[(a, b)] = r;
        s[(b, a)] = -r;
        s[(b, b)] = t;
    }
    &s * sigma * s.transpose()
}
