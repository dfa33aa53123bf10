//! Distance window of a constant-rate code, with the FER idealized as a step at capacity.

use serde::{Deserialize, Serialize};

use super::holevo::holevo_bound;
use crate::error::{invalid, Error, Result};
use crate::link::{mutual_information, received_snr, DetectorModel, Modulation, XiModel};

/// Distances between which the code rate exceeds the Holevo bound while staying below capacity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceWindow {
    pub d_min: f64,
    pub d_max: f64,
    pub width: f64,
}

/// Grid used to bracket the window edges before bisection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowSearch {
    pub max_km: f64,
    pub step_km: f64,
    /// Bisection stops once the bracket is this narrow.
    pub tol_km: f64,
}

impl Default for WindowSearch {
    fn default() -> Self {
        Self { max_km: 400.0, step_km: 0.5, tol_km: 1e-3 }
    }
}

struct Scenario<'a> {
    modulation: &'a Modulation,
    det: &'a DetectorModel,
    alpha: f64,
    xi: &'a XiModel,
}

impl Scenario<'_> {
    fn i_ab(&self, d: f64) -> Result<f64> {
        let link = self.xi.link_at(self.alpha, d)?;
        Ok(mutual_information(received_snr(self.modulation, &link, self.det)))
    }

    fn chi(&self, d: f64) -> Result<f64> {
        let link = self.xi.link_at(self.alpha, d)?;
        holevo_bound(self.modulation, &link, self.det)
    }
}

/// Bisect on `[lo, hi]` where `pred(lo)` holds and `pred(hi)` does not.
fn bisect(mut lo: f64, mut hi: f64, tol: f64, pred: impl Fn(f64) -> Result<bool>) -> Result<(f64, f64)> {
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if pred(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}

/// Window `[d_min, d_max]` of a code of rate `r_c` (bits per symbol), or `None` if empty.
///
/// `d_max` is the last distance at which `I_AB >= r_c`. `d_min` is the start of the
/// connected stretch ending at `d_max` on which `chi_EB < r_c`; it coincides with the
/// smallest such distance whenever `chi_EB` is monotone over the stretch.
pub fn find_distance_window(
    modulation: &Modulation,
    det: &DetectorModel,
    r_c: f64,
    alpha: f64,
    xi_model: &XiModel,
    search: &WindowSearch,
) -> Result<Option<DistanceWindow>> {
    if !(r_c > 0.0 && r_c < 1.0) {
        return Err(invalid(format!("code rate must lie in (0, 1), got {r_c}")));
    }
    if !(alpha > 0.0) || !(search.step_km > 0.0) || !(search.tol_km > 0.0) {
        return Err(invalid("attenuation, grid step and tolerance must be > 0"));
    }
    let sc = Scenario { modulation, det, alpha, xi: xi_model };
    let n = (search.max_km / search.step_km).ceil() as usize;
    let grid: Vec<f64> = (0..=n).map(|i| (i as f64 * search.step_km).min(search.max_km)).collect();

    let mut last_ok = None;
    let mut prev = f64::INFINITY;
    for (i, &d) in grid.iter().enumerate() {
        let info = sc.i_ab(d)?;
        if info > prev {
            return Err(Error::NotMonotone(format!(
                "I_AB rises from {prev} to {info} at {d} km; check the excess-noise model"
            )));
        }
        prev = info;
        if info >= r_c {
            last_ok = Some(i);
        }
    }
    let Some(i_max) = last_ok else {
        return Ok(None);
    };
    if i_max == grid.len() - 1 {
        return Err(Error::OutOfRange(format!("capacity still exceeds {r_c} at {} km", search.max_km)));
    }
    let (d_max, _) = bisect(grid[i_max], grid[i_max + 1], search.tol_km, |d| Ok(sc.i_ab(d)? >= r_c))?;

    let secure = |d: f64| -> Result<bool> { Ok(sc.chi(d)? < r_c) };
    if !secure(d_max)? {
        return Ok(None);
    }
    let mut j = i_max;
    loop {
        if !secure(grid[j])? {
            break;
        }
        if j == 0 {
            return Ok(Some(DistanceWindow { d_min: 0.0, d_max, width: d_max }));
        }
        j -= 1;
    }
    // grid[j] is insecure, and everything from grid[j + 1] up to d_max is secure.
    let upper = if j == i_max { d_max } else { grid[j + 1] };
    let (_, d_min) = bisect(grid[j], upper, search.tol_km, |d| Ok(!secure(d)?))?;
    let d_min = d_min.min(d_max);
    Ok(Some(DistanceWindow { d_min, d_max, width: d_max - d_min }))
}
