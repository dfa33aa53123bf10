//! Monte Carlo protocol runs: Gaussian symbols through the link, parameter estimation on
//! a revealed subset, reconciliation campaigns and per-distance sweeps.

use std::io::{Read, Write};

use num_complex::Complex64;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adaptation::{
    binary_rate, plan_strategy, FerModel, OperatingPoint, PointStatus, RateLadder, Scenario, StepFer, StrategyConfig,
};
use crate::error::{invalid, Error, Result};
use crate::ldpc::{CodeSpec, RateEncoder, Subgraph, DEFAULT_MAX_ITER};
use crate::link::{DetectorModel, LinkBudget, Modulation};
use crate::mdr::{to_blocks, MdrFrame, DIM};
use crate::security::{holevo_bound, SecurityReport, CSV_HEADER};

pub const DEFAULT_N_SYMBOLS: usize = 1 << 19;
pub const DEFAULT_REVEAL_FRACTION: f64 = 0.1;
pub const MIN_REVEALED: usize = 1000;
pub const DEFAULT_TARGET_FRAME_ERRORS: usize = 100;
/// FER floor that sizes the default frame budget: `10 * target / floor` frames.
pub const DEFAULT_FER_FLOOR: f64 = 1e-3;
pub const DEFAULT_SNR_WINDOW_SIGMA: f64 = 4.0;

/// Mixes a master seed with work-item indices into an independent stream seed.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    fn splitmix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    path.iter().fold(splitmix(master), |acc, &p| splitmix(acc ^ splitmix(p)))
}

/// Link parameters a run was simulated with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrueParams {
    pub v_mod: f64,
    pub t_ch: f64,
    pub eta: f64,
    /// Output-referenced excess noise of the channel, before the detector.
    pub xi: f64,
    pub nu_el: f64,
}

impl TrueParams {
    /// Total variance of Bob's noise: vacuum, attenuated excess noise and electronic noise.
    pub fn noise_variance(&self) -> f64 {
        2.0 + self.xi * self.eta + self.nu_el
    }

    /// Signal-to-noise ratio actually present in the simulated data.
    pub fn data_snr(&self) -> f64 {
        self.t_ch * self.eta * self.v_mod / self.noise_variance()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimates {
    pub t_hat: f64,
    /// Output-referenced, like the link model's `xi`. May be negative.
    pub xi_hat: f64,
    /// Received SNR of the link model evaluated at the estimates.
    pub snr_hat: f64,
    /// Signal-to-noise ratio of the data, used to scale decoder inputs.
    pub snr_data: f64,
    pub n_revealed: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FrameStats {
    pub frames_tried: usize,
    pub frames_failed: usize,
    /// Frames where the decoder converged to a wrong codeword (included in `frames_failed`).
    pub undetected: usize,
    pub fer_hat: f64,
    /// Symbols consumed by all frames divided by the pool size.
    pub reuse_factor: f64,
    /// 95 % upper bound on the FER when no frame failed (rule of three), else `fer_hat`.
    pub fer_upper: f64,
}

/// One simulated protocol run. Symbols are complex, total variance over both quadratures.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub seed: u64,
    pub truth: TrueParams,
    pub x: Vec<Complex64>,
    pub y: Vec<Complex64>,
    pub estimates: Option<Estimates>,
    pub frames: Option<FrameStats>,
}

/// Draws `n_symbols` Gaussian symbols and passes them through the link and detector.
pub fn simulate_run(
    modulation: &Modulation,
    link: &LinkBudget,
    det: &DetectorModel,
    n_symbols: usize,
    seed: u64,
) -> RunRecord {
    let truth = TrueParams { v_mod: modulation.v_mod, t_ch: link.t_ch, eta: det.eta, xi: link.xi, nu_el: det.nu_el };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sx = (truth.v_mod / 2.0).sqrt();
    let sn = (truth.noise_variance() / 2.0).sqrt();
    let gain = (truth.t_ch * truth.eta).sqrt();
    let mut normal = || -> f64 { rng.sample(StandardNormal) };
    let mut x = Vec::with_capacity(n_symbols);
    let mut y = Vec::with_capacity(n_symbols);
    for _ in 0..n_symbols {
        let xi = Complex64::new(sx * normal(), sx * normal());
        let ni = Complex64::new(sn * normal(), sn * normal());
        x.push(xi);
        y.push(gain * xi + ni);
    }
    RunRecord { seed, truth, x, y, estimates: None, frames: None }
}

/// Number of symbols revealed for estimation; they are the first ones of the run.
pub fn revealed_count(n_symbols: usize, reveal_fraction: f64) -> usize {
    (reveal_fraction * n_symbols as f64).ceil() as usize
}

/// Estimates transmittance, excess noise and SNR from the revealed prefix of the run.
pub fn estimate_params(run: &RunRecord, reveal_fraction: f64) -> Result<Estimates> {
    if !(reveal_fraction > 0.0 && reveal_fraction <= 0.5) {
        return Err(invalid(format!("reveal fraction must lie in (0, 0.5], got {reveal_fraction}")));
    }
    let m = revealed_count(run.x.len(), reveal_fraction);
    if m < MIN_REVEALED {
        return Err(Error::Infeasible(format!("{m} revealed symbols; at least {MIN_REVEALED} needed")));
    }
    let (x, y) = (&run.x[..m], &run.y[..m]);
    let inv = 1.0 / m as f64;
    let px: f64 = x.iter().map(|v| v.norm_sqr()).sum::<f64>() * inv;
    let cross: f64 = x.iter().zip(y).map(|(a, b)| (a * b.conj()).re).sum::<f64>() * inv;
    if !(px > 0.0) {
        return Err(Error::Infeasible("revealed symbols carry no power".into()));
    }
    let g = cross / px;
    let residual: f64 = x.iter().zip(y).map(|(a, b)| (b - g * a).norm_sqr()).sum::<f64>() * inv;
    let TrueParams { v_mod, eta, nu_el, .. } = run.truth;
    let t_hat = g * g / eta;
    let xi_hat = (residual - 2.0 - nu_el) / eta;
    Ok(Estimates {
        t_hat,
        xi_hat,
        snr_hat: t_hat * eta * v_mod / (2.0 + xi_hat),
        snr_data: g * g * px / residual,
        n_revealed: m,
    })
}

/// Why a run does not enter the per-point mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exclusion {
    NegativeExcessNoise,
    EstimationFailed,
    SnrOutOfRange,
}

/// Standard deviation of the data-SNR estimate from `m` complex samples.
pub fn snr_estimate_sigma(snr: f64, m: usize) -> f64 {
    (snr * (4.0 + snr) / m as f64).sqrt()
}

/// Applies the exclusion rules to an estimation outcome.
pub fn classify_run(
    truth: &TrueParams,
    est: &Result<Estimates>,
    snr_window_sigma: f64,
) -> std::result::Result<Estimates, Exclusion> {
    let est = match est {
        Ok(e) if e.t_hat > 0.0 && e.t_hat <= 1.0 && e.snr_hat.is_finite() => *e,
        _ => return Err(Exclusion::EstimationFailed),
    };
    if est.xi_hat < 0.0 {
        return Err(Exclusion::NegativeExcessNoise);
    }
    let expected = truth.data_snr();
    if (est.snr_data - expected).abs() > snr_window_sigma * snr_estimate_sigma(expected, est.n_revealed) {
        return Err(Exclusion::SnrOutOfRange);
    }
    Ok(est)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    #[serde(default = "default_target")]
    pub target_frame_errors: usize,
    #[serde(default)]
    pub max_frames: Option<usize>,
    /// Stop early once `(failed + 3) / tried` drops below this FER.
    #[serde(default)]
    pub fer_threshold: Option<f64>,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
}

fn default_target() -> usize {
    DEFAULT_TARGET_FRAME_ERRORS
}

fn default_max_iter() -> usize {
    DEFAULT_MAX_ITER
}

impl Default for CampaignConfig {
    fn default() -> Self {
        Self {
            target_frame_errors: DEFAULT_TARGET_FRAME_ERRORS,
            max_frames: None,
            fer_threshold: None,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

impl CampaignConfig {
    pub fn frame_budget(&self) -> usize {
        self.max_frames.unwrap_or_else(|| (10.0 * self.target_frame_errors as f64 / DEFAULT_FER_FLOOR).ceil() as usize)
    }
}

/// Reconciles frames drawn from the unrevealed symbols of `run` at code rate `rate`
/// (binary) until the error target or the frame budget is reached.
///
/// Each frame takes a fresh seeded random subset of the pool, so symbols are reused
/// across frames once the pool is exhausted. Bob encodes a random codeword (padded with
/// random filler bits to whole 8-blocks) onto his data; Alice decodes from hers.
pub fn run_ir_campaign(
    run: &RunRecord,
    est: &Estimates,
    spec: &CodeSpec,
    rate: f64,
    cfg: &CampaignConfig,
    seed: u64,
) -> Result<FrameStats> {
    let p = spec.rows_for_rate(rate)?;
    let rate = spec.rate_with(p);
    let decoder = Subgraph::new(&spec.matrix_with(p));
    let encoder = RateEncoder::new(spec)?;
    let n = decoder.n_vars();
    let blocks = n.div_ceil(DIM);
    let symbols_per_frame = blocks * DIM / 2;
    let pool = run.x.len().min(run.y.len());
    let start = est.n_revealed;
    let pool_len = pool.saturating_sub(start);
    if pool_len < symbols_per_frame {
        return Err(Error::Infeasible(format!(
            "{pool_len} unrevealed symbols cannot fill a frame of {symbols_per_frame}"
        )));
    }
    // Both sides scale their data to unit variance per real dimension.
    let scale = |v: &[Complex64]| (2.0 * v.len() as f64 / v.iter().map(|c| c.norm_sqr()).sum::<f64>()).sqrt();
    let sx = scale(&run.x[start..]);
    let sy = scale(&run.y[start..]);

    let frame = |i: usize| -> Result<(bool, bool)> {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[i as u64]));
        let pick = index::sample(&mut rng, pool_len, symbols_per_frame);
        let mut xs = Vec::with_capacity(2 * symbols_per_frame);
        let mut ys = Vec::with_capacity(2 * symbols_per_frame);
        for j in pick.iter() {
            let (a, b) = (run.x[start + j], run.y[start + j]);
            xs.extend([a.re * sx, a.im * sx]);
            ys.extend([b.re * sy, b.im * sy]);
        }
        let payload: Vec<u8> = (0..spec.k()).map(|_| rng.random_range(0..2u8)).collect();
        let word = encoder.encode(rate, &payload)?;
        let mut bits = word.clone();
        bits.extend((n..blocks * DIM).map(|_| rng.random_range(0..2u8)));
        let mdr = MdrFrame::encode(to_blocks(&xs), to_blocks(&ys), &bits)?;
        let llrs = mdr.llrs(est.snr_data);
        let res = decoder.decode(&llrs[..n], cfg.max_iter)?;
        let ok = res.converged && res.bits == word;
        Ok((ok, res.converged && !ok))
    };

    let budget = cfg.frame_budget();
    let batch = 2 * rayon::current_num_threads().max(1);
    let mut stats = FrameStats::default();
    'outer: while stats.frames_tried < budget {
        let hi = (stats.frames_tried + batch).min(budget);
        let outcomes: Vec<Result<(bool, bool)>> = (stats.frames_tried..hi).into_par_iter().map(frame).collect();
        for o in outcomes {
            let (ok, undetected) = o?;
            stats.frames_tried += 1;
            if !ok {
                stats.frames_failed += 1;
            }
            if undetected {
                stats.undetected += 1;
            }
            if stats.frames_failed >= cfg.target_frame_errors {
                break 'outer;
            }
            if let Some(th) = cfg.fer_threshold {
                if ((stats.frames_failed + 3) as f64) / (stats.frames_tried as f64) < th {
                    break 'outer;
                }
            }
        }
    }
    stats.fer_hat = stats.frames_failed as f64 / stats.frames_tried as f64;
    stats.fer_upper = if stats.frames_failed == 0 { 3.0 / stats.frames_tried as f64 } else { stats.fer_hat };
    stats.reuse_factor = (stats.frames_tried * symbols_per_frame) as f64 / pool_len as f64;
    Ok(stats)
}

impl RunRecord {
    const MAGIC: &'static [u8; 4] = b"RUNR";
    const VERSION: u16 = 1;

    /// Flat little-endian replay layout: magic, version, seed, the true parameters,
    /// estimates and frame statistics (NaN / zero when absent), symbol count, then `x`
    /// and `y` as interleaved real and imaginary parts.
    pub fn write_to(&self, w: &mut impl Write) -> Result<()> {
        w.write_all(Self::MAGIC)?;
        w.write_all(&Self::VERSION.to_le_bytes())?;
        w.write_all(&self.seed.to_le_bytes())?;
        let t = &self.truth;
        let e = self.estimates;
        let f = self.frames.unwrap_or_default();
        let reals = [
            t.v_mod,
            t.t_ch,
            t.eta,
            t.xi,
            t.nu_el,
            e.map_or(f64::NAN, |e| e.t_hat),
            e.map_or(f64::NAN, |e| e.xi_hat),
            e.map_or(f64::NAN, |e| e.snr_hat),
            e.map_or(f64::NAN, |e| e.snr_data),
            f.fer_hat,
            f.reuse_factor,
            f.fer_upper,
        ];
        for v in reals {
            w.write_all(&v.to_le_bytes())?;
        }
        let counts = [
            u64::from(e.is_some()),
            e.map_or(0, |e| e.n_revealed as u64),
            u64::from(self.frames.is_some()),
            f.frames_tried as u64,
            f.frames_failed as u64,
            f.undetected as u64,
            self.x.len() as u64,
        ];
        for v in counts {
            w.write_all(&v.to_le_bytes())?;
        }
        for s in [&self.x, &self.y] {
            for c in s {
                w.write_all(&c.re.to_le_bytes())?;
                w.write_all(&c.im.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(110 + 32 * self.x.len());
        self.write_to(&mut out).expect("writing to a Vec cannot fail");
        out
    }

    pub fn read_from(r: &mut impl Read) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != Self::MAGIC {
            return Err(Error::Parse("not a run record".into()));
        }
        let mut b2 = [0u8; 2];
        r.read_exact(&mut b2)?;
        if u16::from_le_bytes(b2) != Self::VERSION {
            return Err(Error::Parse(format!("unsupported run record version {}", u16::from_le_bytes(b2))));
        }
        let mut b8 = [0u8; 8];
        let mut u64_ = |r: &mut dyn Read| -> Result<u64> {
            r.read_exact(&mut b8)?;
            Ok(u64::from_le_bytes(b8))
        };
        let seed = u64_(r)?;
        let mut reals = [0.0; 12];
        for v in &mut reals {
            *v = f64::from_bits(u64_(r)?);
        }
        let mut counts = [0u64; 7];
        for v in &mut counts {
            *v = u64_(r)?;
        }
        let truth = TrueParams { v_mod: reals[0], t_ch: reals[1], eta: reals[2], xi: reals[3], nu_el: reals[4] };
        let estimates = (counts[0] == 1).then_some(Estimates {
            t_hat: reals[5],
            xi_hat: reals[6],
            snr_hat: reals[7],
            snr_data: reals[8],
            n_revealed: counts[1] as usize,
        });
        let frames = (counts[2] == 1).then_some(FrameStats {
            frames_tried: counts[3] as usize,
            frames_failed: counts[4] as usize,
            undetected: counts[5] as usize,
            fer_hat: reals[9],
            reuse_factor: reals[10],
            fer_upper: reals[11],
        });
        let n = counts[6] as usize;
        let mut read_symbols = |r: &mut dyn Read| -> Result<Vec<Complex64>> {
            (0..n).map(|_| Ok(Complex64::new(f64::from_bits(u64_(r)?), f64::from_bits(u64_(r)?)))).collect()
        };
        let x = read_symbols(r)?;
        let y = read_symbols(r)?;
        Ok(Self { seed, truth, x, y, estimates, frames })
    }
}

/// How a sweep obtains frame error rates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SweepMode {
    /// No simulation: true link parameters and a step FER at `beta_threshold * I_AB`.
    Analytic {
        #[serde(default = "default_beta_threshold")]
        beta_threshold: f64,
    },
    /// Simulated runs, estimation, exclusion and reconciliation campaigns.
    MonteCarlo {
        #[serde(default = "default_runs")]
        runs_per_point: usize,
        #[serde(default = "default_n_symbols")]
        n_symbols: usize,
        #[serde(default = "default_reveal")]
        reveal_fraction: f64,
        #[serde(default = "default_snr_sigma")]
        snr_window_sigma: f64,
        #[serde(default)]
        campaign: CampaignConfig,
    },
}

fn default_beta_threshold() -> f64 {
    1.0
}
fn default_runs() -> usize {
    50
}
fn default_n_symbols() -> usize {
    DEFAULT_N_SYMBOLS
}
fn default_reveal() -> f64 {
    DEFAULT_REVEAL_FRACTION
}
fn default_snr_sigma() -> f64 {
    DEFAULT_SNR_WINDOW_SIGMA
}

/// Mean results of one method at one distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub method: String,
    pub d_km: f64,
    pub attenuation_db: f64,
    pub status: String,
    /// Operating settings chosen by the method.
    pub v_mod: f64,
    pub eta: f64,
    /// Mean over valid runs; absent when the method has no operating point here.
    pub report: Option<SecurityReport>,
    pub n_valid: usize,
    pub n_excluded: usize,
}

pub const SWEEP_CSV_HEADER_PREFIX: &str = "method,status,attenuation_db,v_mod,eta";

impl SweepPoint {
    pub fn csv_header() -> String {
        format!("{SWEEP_CSV_HEADER_PREFIX},{CSV_HEADER},n_valid,n_excluded")
    }

    pub fn csv_row(&self) -> String {
        let report = match &self.report {
            Some(r) => r.csv_row(),
            None => format!("{},,,,,,,,,", self.d_km),
        };
        format!(
            "{},{},{},{},{},{},{},{}",
            self.method, self.status, self.attenuation_db, self.v_mod, self.eta, report, self.n_valid, self.n_excluded
        )
    }
}

pub fn sweep_csv(points: &[SweepPoint]) -> String {
    let mut s = SweepPoint::csv_header();
    s.push('\n');
    for p in points {
        s.push_str(&p.csv_row());
        s.push('\n');
    }
    s
}

/// Averages per-run reports field by field.
fn mean_report(reports: &[SecurityReport]) -> Option<SecurityReport> {
    let n = reports.len() as f64;
    let first = reports.first()?;
    let avg = |f: fn(&SecurityReport) -> f64| reports.iter().map(f).sum::<f64>() / n;
    let raw = avg(|r| r.skr_extracted_raw);
    Some(SecurityReport {
        d_km: first.d_km,
        t_ch: avg(|r| r.t_ch),
        snr: avg(|r| r.snr),
        i_ab: avg(|r| r.i_ab),
        chi_eb: avg(|r| r.chi_eb),
        r_c: avg(|r| r.r_c),
        beta: avg(|r| r.beta),
        fer: avg(|r| r.fer),
        skr_asymptotic: avg(|r| r.skr_asymptotic),
        skr_extracted: avg(|r| r.skr_extracted),
        skr_extracted_raw: raw,
        no_key: raw <= 0.0,
    })
}

fn status_label(s: &PointStatus) -> &'static str {
    match s {
        PointStatus::Operating => "operating",
        PointStatus::NoKey => "no_key",
        PointStatus::Infeasible { .. } => "infeasible",
    }
}

/// One Monte Carlo run at an operating point; `Err` carries the exclusion reason.
fn mc_run(
    op: &OperatingPoint,
    spec: &CodeSpec,
    mode: (usize, f64, f64, &CampaignConfig),
    seed: u64,
) -> Result<std::result::Result<SecurityReport, Exclusion>> {
    let (n_symbols, reveal, k_sigma, campaign) = mode;
    let r_c = op.r_c.expect("operating point with a code");
    let run = simulate_run(&op.modulation, &op.link, &op.detector, n_symbols, seed);
    let est = match classify_run(&run.truth, &estimate_params(&run, reveal), k_sigma) {
        Ok(e) => e,
        Err(why) => return Ok(Err(why)),
    };
    let stats = run_ir_campaign(&run, &est, spec, binary_rate(r_c), campaign, derive_seed(seed, &[1]))?;
    let link = LinkBudget::from_transmittance(op.link.alpha_db_per_km, est.t_hat, est.xi_hat)?;
    let chi = holevo_bound(&op.modulation, &link, &op.detector)?;
    SecurityReport::from_parts(op.d_km, op.link.t_ch, est.snr_hat, chi, r_c, stats.fer_hat).map(Ok)
}

/// Plans every method over the scenario grid and evaluates each operating point.
///
/// Points come back grouped by method (in the order given), then by distance. Each run
/// is seeded from `(master_seed, point, method, run)`, so the result does not depend on
/// the thread count.
pub fn sweep(
    scenario: &Scenario,
    methods: &[StrategyConfig],
    mode: &SweepMode,
    spec: Option<&CodeSpec>,
    master_seed: u64,
) -> Result<Vec<SweepPoint>> {
    let ladder = match spec {
        Some(s) => RateLadder::from_spec(s),
        None => RateLadder::default_family(),
    };
    // Planning assumes decoding at capacity; the measured or modelled FER enters below.
    let planner_fer = StepFer::AT_CAPACITY;
    let mut out = Vec::new();
    for (mi, method) in methods.iter().enumerate() {
        let plan = plan_strategy(method, scenario, &ladder, &planner_fer)?;
        let points: Vec<Result<SweepPoint>> = plan
            .par_iter()
            .enumerate()
            .map(|(pi, op)| {
                let mut point = SweepPoint {
                    method: method.label().to_string(),
                    d_km: op.d_km,
                    attenuation_db: op.link.attenuation_db(),
                    status: status_label(&op.status).to_string(),
                    v_mod: op.modulation.v_mod,
                    eta: op.detector.eta,
                    report: None,
                    n_valid: 0,
                    n_excluded: 0,
                };
                let Some(r_c) = op.r_c else {
                    return Ok(point);
                };
                match mode {
                    SweepMode::Analytic { beta_threshold } => {
                        let fer = StepFer { beta_threshold: *beta_threshold }.fer(r_c, op.snr());
                        point.report = op.report(fer)?;
                        point.n_valid = 1;
                    }
                    SweepMode::MonteCarlo {
                        runs_per_point,
                        n_symbols,
                        reveal_fraction,
                        snr_window_sigma,
                        campaign,
                    } => {
                        let spec = spec.ok_or_else(|| invalid("Monte Carlo sweeps need a code"))?;
                        let mut reports = Vec::new();
                        for run in 0..*runs_per_point {
                            let seed = derive_seed(master_seed, &[pi as u64, mi as u64, run as u64]);
                            match mc_run(op, spec, (*n_symbols, *reveal_fraction, *snr_window_sigma, campaign), seed)? {
                                Ok(r) => reports.push(r),
                                Err(why) => {
                                    log::debug!("{} at {} km, run {run}: excluded ({why:?})", method.label(), op.d_km);
                                    point.n_excluded += 1;
                                }
                            }
                        }
                        point.n_valid = reports.len();
                        point.report = mean_report(&reports);
                        if let Some(r) = &point.report {
                            if r.no_key && point.status == "operating" {
                                point.status = "no_key".into();
                            }
                        }
                    }
                }
                Ok(point)
            })
            .collect();
        for p in points {
            out.push(p?);
        }
        log::info!("{}: {} points evaluated", method.label(), plan.len());
    }
    Ok(out)
}

/// `beta I_AB - chi_EB` of the unadapted scenario at every grid distance.
pub fn reference_curve(scenario: &Scenario, beta: f64) -> Result<Vec<(f64, f64)>> {
    scenario
        .distances_km
        .iter()
        .map(|&d| {
            let link = scenario.link_at(d)?;
            let snr = crate::link::received_snr(&scenario.modulation, &link, &scenario.detector);
            let chi = holevo_bound(&scenario.modulation, &link, &scenario.detector)?;
            Ok((d, crate::security::asymptotic_skr(beta, crate::link::mutual_information(snr), chi)))
        })
        .collect()
}
