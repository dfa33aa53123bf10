//! Batch front end: distance windows, method comparisons, FER curves and code construction.

pub mod config;

use serde::{Deserialize, Serialize};

use cvqkd_core::adaptation::StrategyConfig;
use cvqkd_core::harness::{
    derive_seed, estimate_params, reference_curve, run_ir_campaign, simulate_run, sweep, sweep_csv, SweepMode,
    SweepPoint,
};
use cvqkd_core::ldpc::CodeSpec;
use cvqkd_core::link::{mutual_information, DetectorModel, LinkBudget, Modulation};
use cvqkd_core::security::{find_distance_window, holevo_bound, SecurityReport, WindowSearch};

pub use config::CliConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("runtime error: {0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Runtime(_) => 4,
        }
    }
}

impl From<cvqkd_core::Error> for CliError {
    fn from(e: cvqkd_core::Error) -> Self {
        use cvqkd_core::Error as E;
        match e {
            E::InvalidParameter(_) | E::Parse(_) | E::Json(_) | E::RateNotOnGrid(_) | E::Unphysical(_) => {
                CliError::Config(e.to_string())
            }
            E::Infeasible(_) | E::OutOfRange(_) => CliError::Infeasible(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    fn ext(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// One output file. The first output of a command is the one printed when no output
/// path is given.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub name: String,
    pub bytes: Vec<u8>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub format: Format,
    pub test_scale: bool,
}

impl RunOptions {
    fn seed(&self, cfg: &CliConfig) -> u64 {
        self.seed.or(cfg.seed).unwrap_or(0)
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<Vec<u8>, CliError> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| CliError::Runtime(e.to_string()))?;
    s.push('\n');
    Ok(s.into_bytes())
}

fn check_scale(spec: &CodeSpec, opts: &RunOptions) -> Result<(), CliError> {
    if !opts.test_scale && !spec.is_production_scale() {
        return Err(CliError::Config(format!(
            "block lengths {}..{} are outside the production range; pass --test-scale for desk-scale codes",
            spec.block_length(spec.max_rate())?,
            spec.block_length(spec.min_rate())?
        )));
    }
    Ok(())
}

fn load_code(cfg: &CliConfig, opts: &RunOptions) -> Result<CodeSpec, CliError> {
    let code = cfg.code.as_ref().ok_or_else(|| CliError::Config("a `code` section is required".into()))?;
    let spec = code.load()?;
    check_scale(&spec, opts)?;
    Ok(spec)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowRow {
    pub r_c: f64,
    pub d_min: Option<f64>,
    pub d_max: Option<f64>,
    pub width: Option<f64>,
}

pub const WINDOW_CSV_HEADER: &str = "r_c,d_min,d_max,width";

impl WindowRow {
    pub fn csv_row(&self) -> String {
        let f = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        format!("{},{},{},{}", self.r_c, f(self.d_min), f(self.d_max), f(self.width))
    }
}

/// Distance window of every configured code rate.
pub fn window_rows(cfg: &CliConfig) -> Result<Vec<WindowRow>, CliError> {
    let w = cfg.window.as_ref().ok_or_else(|| CliError::Config("a `window` section is required".into()))?;
    let sc = &cfg.scenario;
    let search = w.search.unwrap_or_else(WindowSearch::default);
    w.rates
        .iter()
        .map(|&r_c| {
            let win =
                find_distance_window(&sc.modulation, &sc.detector, r_c, sc.alpha_db_per_km, &sc.xi_model, &search)?;
            log::info!("r_c = {r_c}: {win:?}");
            Ok(WindowRow { r_c, d_min: win.map(|w| w.d_min), d_max: win.map(|w| w.d_max), width: win.map(|w| w.width) })
        })
        .collect()
}

pub fn cmd_window(cfg: &CliConfig, opts: &RunOptions) -> Result<Vec<Output>, CliError> {
    let rows = window_rows(cfg)?;
    let bytes = match opts.format {
        Format::Csv => {
            let mut s = format!("{WINDOW_CSV_HEADER}\n");
            for r in &rows {
                s.push_str(&r.csv_row());
                s.push('\n');
            }
            s.into_bytes()
        }
        Format::Json => to_json(&rows)?,
    };
    Ok(vec![Output { name: format!("windows.{}", opts.format.ext()), bytes }])
}

/// Rows of the reference curve, shaped like sweep points so they share one table.
pub fn reference_points(cfg: &CliConfig, beta: f64) -> Result<Vec<SweepPoint>, CliError> {
    let sc = cfg.scenario.to_scenario()?;
    let curve = reference_curve(&sc, beta)?;
    curve
        .into_iter()
        .map(|(d, skr)| {
            let link = sc.link_at(d)?;
            let snr = cvqkd_core::link::received_snr(&sc.modulation, &link, &sc.detector);
            let chi = holevo_bound(&sc.modulation, &link, &sc.detector)?;
            let i_ab = mutual_information(snr);
            let raw = skr;
            Ok(SweepPoint {
                method: "reference".into(),
                d_km: d,
                attenuation_db: link.attenuation_db(),
                status: if raw > 0.0 { "operating".into() } else { "no_key".into() },
                v_mod: sc.modulation.v_mod,
                eta: sc.detector.eta,
                report: Some(SecurityReport {
                    d_km: d,
                    t_ch: link.t_ch,
                    snr,
                    i_ab,
                    chi_eb: chi,
                    r_c: beta * i_ab,
                    beta,
                    fer: 0.0,
                    skr_asymptotic: raw,
                    skr_extracted: raw.max(0.0),
                    skr_extracted_raw: raw,
                    no_key: raw <= 0.0,
                }),
                n_valid: 1,
                n_excluded: 0,
            })
        })
        .collect()
}

/// Sweep of every configured method plus the reference curve, in that order.
pub fn compare_points(cfg: &CliConfig, opts: &RunOptions) -> Result<Vec<SweepPoint>, CliError> {
    if cfg.strategies.is_empty() {
        return Err(CliError::Config("`strategies` must list at least one method".into()));
    }
    let needs_hold = cfg
        .strategies
        .iter()
        .any(|s| matches!(s, StrategyConfig::TuneVmod { .. } | StrategyConfig::TrustedLoss { .. }));
    if needs_hold && cfg.scenario.hold.is_none() {
        return Err(CliError::Config("scenario.hold is required by constant-SNR methods".into()));
    }
    let compare = cfg.compare.clone().unwrap_or_default();
    let spec = match compare.mode {
        SweepMode::MonteCarlo { .. } => Some(load_code(cfg, opts)?),
        SweepMode::Analytic { .. } => None,
    };
    let sc = cfg.scenario.to_scenario()?;
    let mut points = sweep(&sc, &cfg.strategies, &compare.mode, spec.as_ref(), opts.seed(cfg))?;
    points.extend(reference_points(cfg, compare.reference_beta)?);
    Ok(points)
}

pub fn cmd_compare(cfg: &CliConfig, opts: &RunOptions) -> Result<Vec<Output>, CliError> {
    let points = compare_points(cfg, opts)?;
    let encode = |pts: &[SweepPoint]| -> Result<Vec<u8>, CliError> {
        match opts.format {
            Format::Csv => Ok(sweep_csv(pts).into_bytes()),
            Format::Json => to_json(&pts),
        }
    };
    let ext = opts.format.ext();
    let mut out = vec![Output { name: format!("combined.{ext}"), bytes: encode(&points)? }];
    let mut methods: Vec<&str> = Vec::new();
    for p in &points {
        if !methods.contains(&p.method.as_str()) {
            methods.push(&p.method);
        }
    }
    for m in methods {
        let pts: Vec<SweepPoint> = points.iter().filter(|p| p.method == m).cloned().collect();
        out.push(Output { name: format!("{m}.{ext}"), bytes: encode(&pts)? });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FerRow {
    pub code_rate: f64,
    pub r_c: f64,
    pub snr: f64,
    pub beta: f64,
    pub frames_tried: usize,
    pub frames_failed: usize,
    pub undetected: usize,
    pub fer_hat: f64,
    pub fer_upper: f64,
    pub reuse_factor: f64,
}

pub const FER_CSV_HEADER: &str =
    "code_rate,r_c,snr,beta,frames_tried,frames_failed,undetected,fer_hat,fer_upper,reuse_factor";

impl FerRow {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.code_rate,
            self.r_c,
            self.snr,
            self.beta,
            self.frames_tried,
            self.frames_failed,
            self.undetected,
            self.fer_hat,
            self.fer_upper,
            self.reuse_factor
        )
    }
}

/// FER of each configured rate over the SNR list, on a lossless link with `V_mod = 2 snr`.
pub fn fer_rows(cfg: &CliConfig, opts: &RunOptions) -> Result<Vec<FerRow>, CliError> {
    let fc = cfg.fer.as_ref().ok_or_else(|| CliError::Config("a `fer` section is required".into()))?;
    let spec = load_code(cfg, opts)?;
    let seed = opts.seed(cfg);
    let link = LinkBudget::from_transmittance(cfg.scenario.alpha_db_per_km, 1.0, 0.0)?;
    let det = DetectorModel::ideal();
    let mut rows = Vec::new();
    for (ri, &rate) in fc.code_rates.iter().enumerate() {
        let code_rate = spec.rate_with(spec.rows_for_rate(rate)?);
        for (si, &snr) in fc.snrs.iter().enumerate() {
            let m = Modulation::new(2.0 * snr)?;
            let run = simulate_run(&m, &link, &det, fc.n_symbols, derive_seed(seed, &[ri as u64, si as u64, 0]));
            let est = estimate_params(&run, fc.reveal_fraction)?;
            let stats = run_ir_campaign(
                &run,
                &est,
                &spec,
                code_rate,
                &fc.campaign,
                derive_seed(seed, &[ri as u64, si as u64, 1]),
            )?;
            log::info!("rate {code_rate:.4} snr {snr}: {}/{} frames failed", stats.frames_failed, stats.frames_tried);
            let r_c = 2.0 * code_rate;
            rows.push(FerRow {
                code_rate,
                r_c,
                snr,
                beta: r_c / mutual_information(snr),
                frames_tried: stats.frames_tried,
                frames_failed: stats.frames_failed,
                undetected: stats.undetected,
                fer_hat: stats.fer_hat,
                fer_upper: stats.fer_upper,
                reuse_factor: stats.reuse_factor,
            });
        }
    }
    Ok(rows)
}

pub fn cmd_fer(cfg: &CliConfig, opts: &RunOptions) -> Result<Vec<Output>, CliError> {
    let rows = fer_rows(cfg, opts)?;
    let bytes = match opts.format {
        Format::Csv => {
            let mut s = format!("{FER_CSV_HEADER}\n");
            for r in &rows {
                s.push_str(&r.csv_row());
                s.push('\n');
            }
            s.into_bytes()
        }
        Format::Json => to_json(&rows)?,
    };
    Ok(vec![Output { name: format!("fer.{}", opts.format.ext()), bytes }])
}

/// Builds (or loads and extends) the configured code and serializes it.
pub fn cmd_buildcode(cfg: &CliConfig, opts: &RunOptions) -> Result<Vec<Output>, CliError> {
    let spec = load_code(cfg, opts)?;
    log::info!(
        "code: k = {}, n = {}..{}, {} grid rates",
        spec.k(),
        spec.block_length(spec.max_rate())?,
        spec.block_length(spec.min_rate())?,
        spec.rates().len()
    );
    Ok(vec![Output { name: "code.rlcs".into(), bytes: spec.to_bytes() }])
}
