//! Distance adaptation: fixed code sets, modulation-variance tuning, trusted-loss tuning
//! and rate-adaptive codes, plus the emulated-distance bookkeeping behind them.
//!
//! Code rates `r_c` are in bits per heterodyne symbol, the unit of `I_AB`. A binary code
//! of rate `r` carried by multidimensional reconciliation spends one code bit per real
//! quadrature sample, i.e. two per symbol, so `r_c = 2 r`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::ldpc::{CodeSpec, RateGrid};
use crate::link::{
    mutual_information, received_snr, transmittance_from_distance, DetectorModel, LinkBudget, Modulation, XiModel,
};
use crate::security::{holevo_bound, SecurityReport};

/// Symbol rate of a binary code rate under 8-dimensional reconciliation.
pub fn symbol_rate(binary_rate: f64) -> f64 {
    2.0 * binary_rate
}

pub fn binary_rate(symbol_rate: f64) -> f64 {
    symbol_rate / 2.0
}

/// Reference point for emulating other distances on a fixed fiber.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmulationBaseline {
    pub v_mod_base: f64,
    /// Channel transmittance actually set on the link.
    pub t_voa_ch: f64,
    pub t_det_base: f64,
    pub alpha: f64,
}

impl EmulationBaseline {
    pub fn new(v_mod_base: f64, t_voa_ch: f64, t_det_base: f64, alpha: f64) -> Result<Self> {
        if !(v_mod_base > 0.0) || !(t_voa_ch > 0.0 && t_voa_ch <= 1.0) || !(t_det_base > 0.0 && t_det_base <= 1.0) {
            return Err(invalid("baseline needs v_mod > 0 and transmittances in (0, 1]"));
        }
        if !(alpha > 0.0) {
            return Err(invalid("attenuation must be > 0"));
        }
        Ok(Self { v_mod_base, t_voa_ch, t_det_base, alpha })
    }
}

/// Modulation variance that makes the fixed link look like `d` km of fiber.
pub fn emulate_vmod(base: &EmulationBaseline, d: f64) -> Result<f64> {
    let t_fl = transmittance_from_distance(base.alpha, d)?;
    Ok(base.v_mod_base * base.t_voa_ch / t_fl)
}

/// Detector transmittance that makes the fixed link look like `d` km of fiber. Distances
/// that would need a better detector than the installed one are rejected.
pub fn emulate_tdet(base: &EmulationBaseline, d: f64) -> Result<f64> {
    let t_fl = transmittance_from_distance(base.alpha, d)?;
    let t = base.t_det_base * base.t_voa_ch / t_fl;
    if t > base.t_det_base * (1.0 + 1e-12) {
        return Err(Error::OutOfRange(format!(
            "{d} km needs detector transmittance {t} > installed {}",
            base.t_det_base
        )));
    }
    Ok(t)
}

/// `V_mod` giving received SNR `target_snr` on this link.
pub fn vmod_for_target_snr(target_snr: f64, link: &LinkBudget, det: &DetectorModel) -> Result<f64> {
    if !(target_snr > 0.0) {
        return Err(invalid(format!("target SNR must be > 0, got {target_snr}")));
    }
    let t = link.t_ch * det.eta;
    if !(t > 0.0) {
        return Err(invalid("zero effective transmittance"));
    }
    Ok(target_snr * (2.0 + link.xi) / t)
}

/// Detector transmittance giving received SNR `target_snr`; adding trusted loss is the
/// only available knob, so targets that need `eta` above the installed value are infeasible.
pub fn eta_for_target_snr(
    target_snr: f64,
    modulation: &Modulation,
    link: &LinkBudget,
    det: &DetectorModel,
) -> Result<f64> {
    if !(target_snr > 0.0) {
        return Err(invalid(format!("target SNR must be > 0, got {target_snr}")));
    }
    let eta = target_snr * (2.0 + link.xi) / (link.t_ch * modulation.v_mod);
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(invalid(format!("no detector transmittance reaches SNR {target_snr}")));
    }
    if eta > det.eta * (1.0 + 1e-12) {
        return Err(Error::Infeasible(format!(
            "SNR {target_snr} at {} km needs eta = {eta:.6} > installed {}",
            link.distance_km, det.eta
        )));
    }
    Ok(eta.min(det.eta))
}

/// Binary rates a code supports, descending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateLadder {
    rates: Vec<f64>,
}

impl RateLadder {
    pub fn new(mut rates: Vec<f64>) -> Result<Self> {
        if rates.is_empty() || rates.iter().any(|&r| !(r > 0.0 && r < 1.0)) {
            return Err(invalid("rate ladder needs rates in (0, 1)"));
        }
        rates.sort_by(|a, b| b.total_cmp(a));
        rates.dedup();
        Ok(Self { rates })
    }

    pub fn from_spec(spec: &CodeSpec) -> Self {
        Self { rates: spec.rates() }
    }

    pub fn from_grid(grid: &RateGrid) -> Result<Self> {
        Self::new(grid.nominal()?)
    }

    /// Nominal grid of the default code family: 0.2 down to 0.01 in steps of 0.001.
    pub fn default_family() -> Self {
        Self::from_grid(&RateGrid::Step { max: 0.2, min: 0.01, step: 0.001 }).expect("valid grid")
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn max(&self) -> f64 {
        self.rates[0]
    }

    pub fn min(&self) -> f64 {
        *self.rates.last().unwrap()
    }

    /// Largest rate not above `r`.
    pub fn floor(&self, r: f64) -> Option<f64> {
        self.rates.iter().copied().find(|&x| x <= r * (1.0 + 1e-9))
    }
}

/// `r_c = beta log2(1 + snr)` rounded down onto the ladder (in symbol units).
pub fn rate_for_beta(beta: f64, snr: f64, ladder: &RateLadder) -> Result<f64> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(invalid(format!("beta must lie in (0, 1], got {beta}")));
    }
    if !(snr > 0.0) {
        return Err(invalid(format!("SNR must be > 0, got {snr}")));
    }
    let ideal = beta * mutual_information(snr);
    let b = binary_rate(ideal);
    if b > ladder.max() * (1.0 + 1e-9) {
        return Err(Error::OutOfRange(format!(
            "rate {ideal} is above the largest supported rate {}",
            symbol_rate(ladder.max())
        )));
    }
    match ladder.floor(b) {
        Some(r) => Ok(symbol_rate(r)),
        None => Err(Error::OutOfRange(format!(
            "rate {ideal} is below the smallest supported rate {}",
            symbol_rate(ladder.min())
        ))),
    }
}

/// The four adaptation methods.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum StrategyConfig {
    /// A set of fixed-rate codes; each distance uses the best of them.
    CodeSet { code_rates: Vec<f64> },
    /// One code; `V_mod` holds Bob's SNR constant.
    TuneVmod { fixed_rate: f64 },
    /// One code; added trusted detector loss holds Bob's SNR constant.
    TrustedLoss { fixed_rate: f64, t_det_floor: f64 },
    /// Rate-adaptive code run at constant reconciliation efficiency.
    RateAdaptive { target_beta: f64 },
}

impl StrategyConfig {
    pub fn validate(&self) -> Result<()> {
        let rate_ok = |r: f64| r > 0.0 && r < 1.0;
        match self {
            StrategyConfig::CodeSet { code_rates } => {
                if code_rates.is_empty() || !code_rates.iter().all(|&r| rate_ok(r)) {
                    return Err(invalid("code_rates must be a nonempty list of rates in (0, 1)"));
                }
            }
            StrategyConfig::TuneVmod { fixed_rate } => {
                if !rate_ok(*fixed_rate) {
                    return Err(invalid("fixed_rate must lie in (0, 1)"));
                }
            }
            StrategyConfig::TrustedLoss { fixed_rate, t_det_floor } => {
                if !rate_ok(*fixed_rate) || !(*t_det_floor >= 0.0 && *t_det_floor < 1.0) {
                    return Err(invalid("fixed_rate must lie in (0, 1) and t_det_floor in [0, 1)"));
                }
            }
            StrategyConfig::RateAdaptive { target_beta } => {
                if !(*target_beta > 0.0 && *target_beta <= 1.0) {
                    return Err(invalid("target_beta must lie in (0, 1]"));
                }
            }
        }
        Ok(())
    }

    /// Short label used in output files.
    pub fn label(&self) -> &'static str {
        match self {
            StrategyConfig::CodeSet { .. } => "code_set",
            StrategyConfig::TuneVmod { .. } => "tune_vmod",
            StrategyConfig::TrustedLoss { .. } => "trusted_loss",
            StrategyConfig::RateAdaptive { .. } => "rate_adaptive",
        }
    }
}

/// Which received SNR the constant-SNR methods hold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum HoldSnr {
    /// The SNR the base configuration produces at this distance.
    Distance {
        km: f64,
    },
    Value {
        snr: f64,
    },
}

/// Link, transmitter and receiver settings swept over distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub modulation: Modulation,
    pub detector: DetectorModel,
    pub alpha_db_per_km: f64,
    pub xi_model: XiModel,
    pub distances_km: Vec<f64>,
    pub hold: HoldSnr,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha_db_per_km > 0.0) {
            return Err(invalid("alpha_db_per_km must be > 0"));
        }
        if self.distances_km.iter().any(|&d| !(d >= 0.0) || !d.is_finite()) {
            return Err(invalid("distances must be finite and >= 0"));
        }
        if let HoldSnr::Value { snr } = self.hold {
            if !(snr > 0.0) {
                return Err(invalid("held SNR must be > 0"));
            }
        }
        Ok(())
    }

    pub fn link_at(&self, d: f64) -> Result<LinkBudget> {
        self.xi_model.link_at(self.alpha_db_per_km, d)
    }

    /// Received SNR held by the constant-SNR methods.
    pub fn held_snr(&self) -> Result<f64> {
        match self.hold {
            HoldSnr::Value { snr } => Ok(snr),
            HoldSnr::Distance { km } => Ok(received_snr(&self.modulation, &self.link_at(km)?, &self.detector)),
        }
    }
}

/// Frame error rate a planner assumes for a code of rate `r_c` at received SNR `snr`.
pub trait FerModel {
    fn fer(&self, r_c: f64, snr: f64) -> f64;
}

/// Decoding succeeds exactly when `r_c <= beta_threshold * I_AB`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepFer {
    pub beta_threshold: f64,
}

impl StepFer {
    pub const AT_CAPACITY: StepFer = StepFer { beta_threshold: 1.0 };
}

impl FerModel for StepFer {
    fn fer(&self, r_c: f64, snr: f64) -> f64 {
        if r_c <= self.beta_threshold * mutual_information(snr) * (1.0 + 1e-12) {
            0.0
        } else {
            1.0
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum PointStatus {
    Operating,
    /// A valid operating point exists, but no code rate yields key.
    NoKey,
    /// The method cannot realize this distance at all.
    Infeasible {
        reason: String,
    },
}

/// Settings chosen by a method for one distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    pub d_km: f64,
    pub link: LinkBudget,
    pub modulation: Modulation,
    pub detector: DetectorModel,
    /// Code rate in bits per symbol; `None` when no code is run.
    pub r_c: Option<f64>,
    pub status: PointStatus,
}

impl OperatingPoint {
    pub fn snr(&self) -> f64 {
        received_snr(&self.modulation, &self.link, &self.detector)
    }

    pub fn is_feasible(&self) -> bool {
        !matches!(self.status, PointStatus::Infeasible { .. })
    }

    /// Key-rate report for this point given a frame error rate.
    pub fn report(&self, fer: f64) -> Result<Option<SecurityReport>> {
        let Some(r_c) = self.r_c else {
            return Ok(None);
        };
        let chi = holevo_bound(&self.modulation, &self.link, &self.detector)?;
        SecurityReport::from_parts(self.d_km, self.link.t_ch, self.snr(), chi, r_c, fer).map(Some)
    }
}

/// Chooses the operating point of `cfg` at every distance of the scenario, in grid order.
pub fn plan_strategy(
    cfg: &StrategyConfig,
    scenario: &Scenario,
    ladder: &RateLadder,
    fer_model: &dyn FerModel,
) -> Result<Vec<OperatingPoint>> {
    cfg.validate()?;
    scenario.validate()?;
    let held = scenario.held_snr()?;
    scenario.distances_km.iter().map(|&d| plan_point(cfg, scenario, d, held, ladder, fer_model)).collect()
}

fn plan_point(
    cfg: &StrategyConfig,
    sc: &Scenario,
    d: f64,
    held: f64,
    ladder: &RateLadder,
    fer_model: &dyn FerModel,
) -> Result<OperatingPoint> {
    let link = sc.link_at(d)?;
    let mut point = OperatingPoint {
        d_km: d,
        link,
        modulation: sc.modulation,
        detector: sc.detector,
        r_c: None,
        status: PointStatus::Operating,
    };
    match cfg {
        StrategyConfig::CodeSet { code_rates } => {
            let snr = point.snr();
            let chi = holevo_bound(&point.modulation, &link, &point.detector)?;
            let best = code_rates
                .iter()
                .map(|&r| (r, (1.0 - fer_model.fer(r, snr)) * (r - chi)))
                .filter(|&(_, skr)| skr > 0.0)
                .max_by(|a, b| a.1.total_cmp(&b.1));
            match best {
                Some((r, _)) => point.r_c = Some(r),
                None => point.status = PointStatus::NoKey,
            }
        }
        StrategyConfig::TuneVmod { fixed_rate } => {
            point.modulation = Modulation::new(vmod_for_target_snr(held, &link, &sc.detector)?)?;
            point.r_c = Some(*fixed_rate);
        }
        StrategyConfig::TrustedLoss { fixed_rate, t_det_floor } => {
            if !sc.detector.trusted {
                return Err(invalid("trusted-loss adaptation needs a trusted detector"));
            }
            match eta_for_target_snr(held, &sc.modulation, &link, &sc.detector) {
                Ok(eta) if eta >= *t_det_floor => {
                    point.detector = sc.detector.with_eta(eta)?;
                    point.r_c = Some(*fixed_rate);
                }
                Ok(eta) => {
                    point.status =
                        PointStatus::Infeasible { reason: format!("eta = {eta:.6} is below the floor {t_det_floor}") }
                }
                Err(Error::Infeasible(reason)) => point.status = PointStatus::Infeasible { reason },
                Err(e) => return Err(e),
            }
        }
        StrategyConfig::RateAdaptive { target_beta } => {
            let beta = *target_beta;
            match rate_for_beta(beta, point.snr(), ladder) {
                Ok(r) => point.r_c = Some(r),
                Err(Error::OutOfRange(_)) => {
                    // Off the ends of the rate ladder, pin the rate to the nearest end and
                    // retune V_mod so the code still runs at the target efficiency.
                    let ideal = beta * mutual_information(point.snr());
                    let edge = if binary_rate(ideal) > ladder.max() { ladder.max() } else { ladder.min() };
                    let r_c = symbol_rate(edge);
                    let snr = 2f64.powf(r_c / beta) - 1.0;
                    point.modulation = Modulation::new(vmod_for_target_snr(snr, &link, &sc.detector)?)?;
                    point.r_c = Some(r_c);
                }
                Err(e) => return Err(e),
            }
        }
    }
    if point.r_c.is_some() {
        if let Some(rep) = point.report(fer_model.fer(point.r_c.unwrap(), point.snr()))? {
            if rep.no_key {
                point.status = PointStatus::NoKey;
            }
        }
    }
    Ok(point)
}

pub const PLAN_CSV_HEADER: &str = "method,d_km,status,v_mod,eta,snr,r_c,beta";

/// One row per distance; the code-rate columns are empty where no code runs.
pub fn plan_csv(cfg: &StrategyConfig, points: &[OperatingPoint]) -> String {
    let mut s = format!("{PLAN_CSV_HEADER}\n");
    for p in points {
        let status = match &p.status {
            PointStatus::Operating => "operating",
            PointStatus::NoKey => "no_key",
            PointStatus::Infeasible { .. } => "infeasible",
        };
        let snr = p.snr();
        let (r_c, beta) = match p.r_c {
            Some(r) => (r.to_string(), (r / mutual_information(snr)).to_string()),
            None => (String::new(), String::new()),
        };
        s.push_str(&format!(
            "{},{},{status},{},{},{snr},{r_c},{beta}\n",
            cfg.label(),
            p.d_km,
            p.modulation.v_mod,
            p.detector.eta
        ));
    }
    s
}
