//! Acceptance suite: one PASS/FAIL line per criterion. Exits nonzero if any criterion fails.

use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde_json::json;

use cvqkd_cli::{cmd_compare, compare_points, CliConfig, Format, RunOptions};
use cvqkd_core::harness::{
    classify_run, derive_seed, estimate_params, run_ir_campaign, simulate_run, CampaignConfig, Exclusion, FrameStats,
    SweepPoint,
};
use cvqkd_core::ldpc::{build_code, decode, encode, CodeParams, CodeSpec, DEFAULT_MAX_ITER, LLR_CLIP};
use cvqkd_core::link::{
    distance_from_transmittance, mutual_information, received_snr, transmittance_from_distance, DetectorModel,
    LinkBudget, Modulation, XiModel,
};
use cvqkd_core::mdr::{apply_rotation, map_bits_to_sphere, normalize, rotation_coefficients, Block, MdrFrame, DIM};
use cvqkd_core::octonion::Octonion;
use cvqkd_core::security::{
    find_distance_window, g_entropy, holevo_bound, skr_report, symplectic_eigenvalues, TwoModeCovariance, WindowSearch,
};

// Tolerances and sizes, as stated by each criterion.
const TOL_CLOSED_FORM: f64 = 1e-12;
const TOL_CHI_PURE: f64 = 1e-9;
const TOL_TRUSTED_LIMIT: f64 = 1e-6;
const TOL_SPECTRUM: f64 = 1e-9;
const RANDOM_STATES: usize = 1000;
const WINDOW_RATES: [f64; 4] = [0.04, 0.06, 0.08, 0.1];
const TOL_WINDOW_KM: f64 = 0.010;
const TOL_MDR: f64 = 1e-10;
const MDR_FRAMES: usize = 1000;
const MDR_BLOCKS: usize = 10_000;
const NOISELESS_MAX_ITER: usize = 2;
const LINEARITY_PAIRS: usize = 1000;
const FER_FRAMES: usize = 200;
const FER_ALPHA: f64 = 0.05;
const BETA_LOW: f64 = 0.93;
const BETA_HIGH: f64 = 0.99;
const TOL_BETA: f64 = 1e-9;
const ESTIMATOR_RUNS: u64 = 100;
const MIN_NEGATIVE_SHARE: f64 = 0.05;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn configs() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn desk_code() -> CodeSpec {
    build_code(&CodeParams::desk(1)).expect("desk code")
}

fn gaussian_block(rng: &mut ChaCha8Rng) -> Block {
    std::array::from_fn(|_| rng.sample(StandardNormal))
}

fn criterion_1() -> Verdict {
    let m = Modulation::new(5.0).unwrap();
    let link = LinkBudget::from_transmittance(0.2, 1.0, 0.0).unwrap();
    let i = mutual_information(received_snr(&m, &link, &DetectorModel::ideal()));
    let e_i = (i - 3.5f64.log2()).abs();
    let e_g1 = g_entropy(1.0).unwrap().abs();
    let e_g3 = (g_entropy(3.0).unwrap() - 2.0).abs();
    let mut e_rt = 0.0f64;
    for d in [0.0, 0.5, 7.3, 25.0, 47.7, 79.0, 100.0, 250.0] {
        let t = transmittance_from_distance(0.2, d).unwrap();
        let back = distance_from_transmittance(0.2, t).unwrap();
        e_rt = e_rt.max((back - d).abs()).max((transmittance_from_distance(0.2, back).unwrap() - t).abs() / t);
    }
    let worst = e_i.max(e_g1).max(e_g3).max(e_rt);
    verdict(
        worst <= TOL_CLOSED_FORM,
        format!("|I-log2 3.5| {e_i:.1e}, |g(1)| {e_g1:.1e}, |g(3)-2| {e_g3:.1e}, round trip {e_rt:.1e} (tol {TOL_CLOSED_FORM:.0e})"),
    )
}

fn criterion_2() -> Verdict {
    let m = Modulation::new(5.0).unwrap();
    let pure = holevo_bound(&m, &LinkBudget::from_transmittance(0.2, 1.0, 0.0).unwrap(), &DetectorModel::ideal())
        .unwrap()
        .abs();
    let near_one = DetectorModel::new(1.0 - 1e-9, 0.0, true).unwrap();
    let mut e_trusted = 0.0f64;
    for (t, xi) in [(0.9, 0.0), (0.5, 0.01), (0.1, 0.03), (0.01, 0.05)] {
        let link = LinkBudget::from_transmittance(0.2, t, xi).unwrap();
        let a = holevo_bound(&m, &link, &near_one).unwrap();
        let b = holevo_bound(&m, &link, &DetectorModel::ideal()).unwrap();
        e_trusted = e_trusted.max((a - b).abs());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut e_spec = 0.0f64;
    for _ in 0..RANDOM_STATES {
        let v: f64 = rng.random_range(0.01..50.0);
        let t: f64 = rng.random_range(0.001..1.0);
        let xi: f64 = rng.random_range(0.0..0.5);
        let cov = TwoModeCovariance::new(v + 1.0, t * v + 1.0 + xi, (t * v * (v + 2.0)).sqrt()).unwrap();
        let closed = cov.symplectic_eigenvalues();
        let generic = symplectic_eigenvalues(&cov.to_matrix()).unwrap();
        for k in 0..2 {
            e_spec = e_spec.max((closed[k] - generic[k]).abs() / closed[0].max(1.0));
        }
    }
    verdict(
        pure <= TOL_CHI_PURE && e_trusted <= TOL_TRUSTED_LIMIT && e_spec <= TOL_SPECTRUM,
        format!(
            "chi(pure) {pure:.1e} (tol {TOL_CHI_PURE:.0e}), trusted limit {e_trusted:.1e} (tol {TOL_TRUSTED_LIMIT:.0e}), \
             spectrum {e_spec:.1e} over {RANDOM_STATES} states (tol {TOL_SPECTRUM:.0e})"
        ),
    )
}

/// Entropy of a thermal mode with symplectic eigenvalue `nu`.
fn g_oracle(nu: f64) -> f64 {
    if nu <= 1.0 + 1e-15 {
        return 0.0;
    }
    let (p, q) = ((nu + 1.0) / 2.0, (nu - 1.0) / 2.0);
    p * p.log2() - q * q.log2()
}

/// Reverse-reconciliation Holevo bound for heterodyne detection with an ideal receiver,
/// written in terms of the input-referenced noise `chi_line = 1/T - 1 + xi_in`.
fn chi_oracle(v_mod: f64, t: f64, xi_out: f64) -> f64 {
    let v = v_mod + 1.0;
    let chi_line = 1.0 / t - 1.0 + xi_out / t;
    let a = v * v * (1.0 - 2.0 * t) + 2.0 * t + t * t * (v + chi_line).powi(2);
    let b = t * t * (v * chi_line + 1.0).powi(2);
    let disc = (a * a - 4.0 * b).max(0.0).sqrt();
    let l1 = (0.5 * (a + disc)).sqrt();
    let l2 = (0.5 * (a - disc)).max(1.0).sqrt();
    let l3 = v - t * (v * v - 1.0) / (t * (v + chi_line) + 1.0);
    g_oracle(l1) + g_oracle(l2) - g_oracle(l3)
}

fn criterion_3() -> Verdict {
    let m = Modulation::new(5.0).unwrap();
    let det = DetectorModel::ideal();
    let (alpha, xi_in) = (0.2, 0.03);
    let xi_model = XiModel::ConstantInput { xi: xi_in };
    let mut lines = Vec::new();
    let mut pass = true;
    let mut prev: Option<(f64, f64)> = None;
    let mut e_chi = 0.0f64;
    for r_c in WINDOW_RATES {
        let Some(w) = find_distance_window(&m, &det, r_c, alpha, &xi_model, &WindowSearch::default()).unwrap() else {
            pass = false;
            lines.push(format!("R_c {r_c}: empty"));
            continue;
        };
        // d_max: 5 T / (2 + xi_in T) = 2^R_c - 1 solved for T.
        let s = 2f64.powf(r_c) - 1.0;
        let t_max = 2.0 * s / (5.0 - xi_in * s);
        let d_max = -10.0 * t_max.log10() / alpha;
        // d_min: 1 m scan of the oracle bound back from d_max while it stays below R_c.
        let chi_at = |d: f64| {
            let t = 10f64.powf(-alpha * d / 10.0);
            chi_oracle(5.0, t, xi_in * t)
        };
        let mut d = (d_max * 1000.0).floor() / 1000.0;
        while d > 0.0 && chi_at(d - 0.001) < r_c {
            d -= 0.001;
        }
        let d_min = d;
        for probe in [d_min, 0.5 * (d_min + d_max), d_max] {
            let link = xi_model.link_at(alpha, probe).unwrap();
            e_chi = e_chi.max((holevo_bound(&m, &link, &det).unwrap() - chi_at(probe)).abs());
        }
        let ok = 0.0 < w.d_min
            && w.d_min < w.d_max
            && w.d_max.is_finite()
            && (w.d_max - d_max).abs() <= TOL_WINDOW_KM
            && (w.d_min - d_min).abs() <= TOL_WINDOW_KM
            && prev.is_none_or(|(pmin, pmax)| w.d_min < pmin && w.d_max < pmax);
        pass &= ok;
        prev = Some((w.d_min, w.d_max));
        lines.push(format!("R_c {r_c}: [{:.3}, {:.3}] km vs oracle [{d_min:.3}, {d_max:.3}]", w.d_min, w.d_max));
    }
    pass &= e_chi < 1e-9;
    verdict(pass, format!("{}; oracle chi agreement {e_chi:.1e}; tol {TOL_WINDOW_KM} km", lines.join("; ")))
}

fn criterion_4() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut e_rot = 0.0f64;
    let mut e_norm = 0.0f64;
    for _ in 0..MDR_FRAMES {
        let (y, _) = normalize(&gaussian_block(&mut rng));
        let bits: [u8; DIM] = std::array::from_fn(|_| rng.random_range(0..2u8));
        let u = map_bits_to_sphere(&bits);
        let a = rotation_coefficients(&y, &u).unwrap();
        let r = apply_rotation(&a, &y);
        e_rot = e_rot.max(r.iter().zip(&u).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max));
        let (p, q) = (Octonion(gaussian_block(&mut rng)), Octonion(gaussian_block(&mut rng)));
        e_norm = e_norm.max(((p * q).norm() - p.norm() * q.norm()).abs() / (p.norm() * q.norm()).max(1.0));
    }
    let y: Vec<Block> = (0..MDR_BLOCKS).map(|_| gaussian_block(&mut rng)).collect();
    let bits: Vec<u8> = (0..MDR_BLOCKS * DIM).map(|_| rng.random_range(0..2u8)).collect();
    let llrs = MdrFrame::encode(y.clone(), y, &bits).unwrap().llrs(1.0);
    let wrong = llrs.iter().zip(&bits).filter(|(l, b)| u8::from(**l < 0.0) != **b).count();
    verdict(
        e_rot < TOL_MDR && e_norm < TOL_MDR && wrong == 0,
        format!(
            "round trip {e_rot:.1e}, norm product {e_norm:.1e} over {MDR_FRAMES} frames (tol {TOL_MDR:.0e}); \
             {wrong} wrong bits of {} noiseless",
            bits.len()
        ),
    )
}

fn syndrome_zero(spec: &CodeSpec, p: usize, word: &[u8]) -> bool {
    let n_base = spec.n_base();
    spec.base().rows().iter().all(|r| r.iter().fold(0, |a, &c| a ^ word[c as usize]) == 0)
        && spec.extension()[..p]
            .iter()
            .enumerate()
            .all(|(j, r)| r.iter().fold(word[n_base + j], |a, &c| a ^ word[c as usize]) == 0)
}

fn criterion_5(spec: &CodeSpec) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let payload = |rng: &mut ChaCha8Rng| -> Vec<u8> { (0..spec.k()).map(|_| rng.random_range(0..2u8)).collect() };
    let mut worst_iter = 0;
    let mut noiseless_ok = true;
    for rate in [0.2, 0.1, 0.05, 0.02, 0.01] {
        let word = encode(spec, rate, &payload(&mut rng)).unwrap();
        let llrs: Vec<f64> = word.iter().map(|&b| if b == 0 { LLR_CLIP } else { -LLR_CLIP }).collect();
        let res = decode(spec, rate, &llrs, DEFAULT_MAX_ITER).unwrap();
        noiseless_ok &= res.converged && res.bits == word;
        worst_iter = worst_iter.max(res.iterations_used);
    }
    let p = spec.rows_for_rate(0.05).unwrap();
    let linear = (0..LINEARITY_PAIRS).all(|_| {
        let a = encode(spec, 0.05, &payload(&mut rng)).unwrap();
        let b = encode(spec, 0.05, &payload(&mut rng)).unwrap();
        syndrome_zero(spec, p, &a.iter().zip(&b).map(|(x, y)| x ^ y).collect::<Vec<_>>())
    });
    let word = encode(spec, spec.min_rate(), &payload(&mut rng)).unwrap();
    let nested = spec.grid_rows().iter().all(|&p| syndrome_zero(spec, p, &word[..spec.n_base() + p]));
    verdict(
        noiseless_ok && worst_iter <= NOISELESS_MAX_ITER && linear && nested,
        format!(
            "noiseless exact {noiseless_ok} in <= {worst_iter} iterations (limit {NOISELESS_MAX_ITER}); \
             linearity over {LINEARITY_PAIRS} pairs {linear}; nesting over {} grid rates {nested}",
            spec.grid_rows().len()
        ),
    )
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

/// One-sided Fisher exact p-value for "group b fails more often than group a".
fn fisher_greater(fail_a: usize, n_a: usize, fail_b: usize, n_b: usize) -> f64 {
    let (fails, n) = (fail_a + fail_b, n_a + n_b);
    let ln_c = |n: usize, k: usize| ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k);
    (fail_b..=fails.min(n_b))
        .filter(|&x| fails - x <= n_a)
        .map(|x| (ln_c(n_b, x) + ln_c(n_a, fails - x) - ln_c(n, fails)).exp())
        .sum()
}

fn criterion_6(spec: &CodeSpec) -> Verdict {
    // Fixed channel: 5 km of fiber with a little excess noise, V_mod set so that binary
    // rate 0.1 (R_c = 0.2) sits at beta 0.93.
    let det = DetectorModel::ideal();
    let link = LinkBudget::from_distance(0.2, 5.0, 0.01).unwrap();
    let i_target = 0.2 / BETA_LOW;
    let snr = 2f64.powf(i_target) - 1.0;
    let m = Modulation::new(snr * (2.0 + link.xi) / link.t_ch).unwrap();
    let i_ab = mutual_information(received_snr(&m, &link, &det));
    let low = spec.floor_rate(BETA_LOW * i_ab / 2.0 * (1.0 + 1e-9)).unwrap();
    let high = spec.floor_rate(BETA_HIGH * i_ab / 2.0).unwrap();

    let run = simulate_run(&m, &link, &det, 1 << 19, 61);
    let est = estimate_params(&run, 0.1).unwrap();
    let cfg = CampaignConfig {
        target_frame_errors: FER_FRAMES,
        max_frames: Some(FER_FRAMES),
        fer_threshold: None,
        max_iter: DEFAULT_MAX_ITER,
    };
    let stats = |rate: f64, seed: u64| -> FrameStats { run_ir_campaign(&run, &est, spec, rate, &cfg, seed).unwrap() };
    let (s_low, s_high) = (stats(low, 62), stats(high, 63));
    let p = fisher_greater(s_low.frames_failed, s_low.frames_tried, s_high.frames_failed, s_high.frames_tried);

    let rep_low = skr_report(&m, &link, &det, 2.0 * low, s_low.fer_hat).unwrap();
    let rep_high = skr_report(&m, &link, &det, 2.0 * high, s_high.fer_hat).unwrap();
    let asym_order = rep_high.skr_asymptotic > rep_low.skr_asymptotic;
    let ext_order = rep_low.skr_extracted_raw > rep_high.skr_extracted_raw;
    verdict(
        p < FER_ALPHA && asym_order && ext_order,
        format!(
            "snr {:.4}, chi {:.4}; beta {:.3}: FER {}/{}, beta {:.3}: FER {}/{} (one-sided Fisher p {p:.1e}, alpha {FER_ALPHA}); \
             asymptotic {:.5} vs {:.5}, extracted {:.5} vs {:.5}; reuse {:.2}/{:.2}",
            rep_low.snr,
            rep_low.chi_eb,
            rep_low.beta,
            s_low.frames_failed,
            s_low.frames_tried,
            rep_high.beta,
            s_high.frames_failed,
            s_high.frames_tried,
            rep_low.skr_asymptotic,
            rep_high.skr_asymptotic,
            rep_low.skr_extracted_raw,
            rep_high.skr_extracted_raw,
            s_low.reuse_factor,
            s_high.reuse_factor
        ),
    )
}

fn by_method<'a>(points: &'a [SweepPoint], method: &str) -> Vec<&'a SweepPoint> {
    points.iter().filter(|p| p.method == method).collect()
}

fn keyed(p: &SweepPoint) -> bool {
    p.report.as_ref().is_some_and(|r| r.skr_extracted > 0.0)
}

fn reach(points: &[&SweepPoint]) -> f64 {
    points.iter().filter(|p| keyed(p)).map(|p| p.d_km).fold(f64::NEG_INFINITY, f64::max)
}

fn criterion_7() -> Verdict {
    let cfg = CliConfig::load(&configs().join("compare.json")).unwrap();
    let points = compare_points(&cfg, &RunOptions::default()).unwrap();
    let held = match cfg.scenario.hold {
        Some(cvqkd_core::adaptation::HoldSnr::Value { snr }) => snr,
        _ => unreachable!("compare.json holds a fixed SNR"),
    };
    let beta_expected = 0.06 / mutual_information(held);
    let mut e_beta = 0.0f64;
    for method in ["tune_vmod", "trusted_loss"] {
        for p in by_method(&points, method) {
            if let Some(r) = &p.report {
                e_beta = e_beta.max((r.beta - beta_expected).abs());
            }
        }
    }
    let (m0, m1, m2, m3) = (
        by_method(&points, "code_set"),
        by_method(&points, "tune_vmod"),
        by_method(&points, "trusted_loss"),
        by_method(&points, "rate_adaptive"),
    );
    let (reach1, reach2) = (reach(&m1), reach(&m2));
    let covered = |pts: &[&SweepPoint]| -> Vec<f64> { pts.iter().filter(|p| keyed(p)).map(|p| p.d_km).collect() };
    let (c0, c3) = (covered(&m0), covered(&m3));
    let strict_subset = c0.iter().all(|d| c3.contains(d)) && c3.len() > c0.len();
    let reference = by_method(&points, "reference");
    let bounded = m3.iter().zip(&reference).all(|(p, r)| {
        p.d_km == r.d_km
            && p.report.as_ref().map_or(0.0, |x| x.skr_extracted)
                <= r.report.as_ref().map_or(0.0, |x| x.skr_extracted) + 1e-12
    });
    verdict(
        e_beta <= TOL_BETA && reach2 < reach1 && strict_subset && bounded,
        format!(
            "(a) beta {beta_expected:.6}, max deviation {e_beta:.1e} (tol {TOL_BETA:.0e}); (b) reach {reach2} km < {reach1} km; \
             (c) code set keys {} km, rate-adaptive {} km, strict subset {strict_subset}; (d) reference bounds rate-adaptive {bounded}",
            c0.len(),
            c3.len()
        ),
    )
}

fn criterion_8() -> Verdict {
    let m = Modulation::new(5.0).unwrap();
    let link = LinkBudget::from_distance(0.2, 100.0, 0.0).unwrap();
    let det = DetectorModel::ideal();
    let (mut negative, mut flagged, mut kept, mut other) = (0usize, 0usize, 0usize, 0usize);
    let mut bookkeeping = true;
    for i in 0..ESTIMATOR_RUNS {
        let run = simulate_run(&m, &link, &det, cvqkd_core::harness::DEFAULT_N_SYMBOLS, derive_seed(8, &[i]));
        let est = estimate_params(&run, cvqkd_core::harness::DEFAULT_REVEAL_FRACTION);
        let xi_hat = est.as_ref().map(|e| e.xi_hat).unwrap_or(f64::NAN);
        if xi_hat < 0.0 {
            negative += 1;
        }
        match classify_run(&run.truth, &est, cvqkd_core::harness::DEFAULT_SNR_WINDOW_SIGMA) {
            Err(Exclusion::NegativeExcessNoise) => {
                flagged += 1;
                bookkeeping &= xi_hat < 0.0;
            }
            Ok(e) => {
                kept += 1;
                bookkeeping &= e.xi_hat >= 0.0 && e.xi_hat == xi_hat;
            }
            Err(_) => other += 1,
        }
    }
    let share = negative as f64 / ESTIMATOR_RUNS as f64;
    bookkeeping &= flagged == negative && flagged + kept + other == ESTIMATOR_RUNS as usize;
    verdict(
        share > MIN_NEGATIVE_SHARE && bookkeeping,
        format!(
            "{negative}/{ESTIMATOR_RUNS} runs with negative xi_hat (needs > {:.0} %); excluded as negative {flagged}, \
             kept {kept}, other exclusions {other}; bookkeeping consistent {bookkeeping}",
            MIN_NEGATIVE_SHARE * 100.0
        ),
    )
}

fn criterion_9() -> Verdict {
    let analytic = CliConfig::load(&configs().join("compare.json")).unwrap();
    // A small Monte Carlo variant of the same scenario exercises the seeded paths.
    let mut v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(configs().join("compare.json")).unwrap()).unwrap();
    v["scenario"]["grid"] = json!({ "kind": "distance_list", "km": [20.0, 60.0] });
    v["compare"]["mode"] = json!({
        "kind": "monte_carlo",
        "runs_per_point": 2,
        "n_symbols": 16384,
        "campaign": { "target_frame_errors": 3, "max_frames": 6, "max_iter": 30 }
    });
    v["code"] = json!({ "source": "build", "params": {
        "seed": 3, "info_bits": 100,
        "hrc": { "rate": 0.75, "info_degrees": [[3, 1.0]] },
        "extension": { "degrees": [[2, 0.2], [3, 0.8]], "parity_share": 0.03 },
        "grid": { "kind": "step", "max": 0.2, "min": 0.01, "step": 0.001 }
    }});
    let mc = CliConfig::from_json(&v.to_string(), &configs()).unwrap();
    let mut pass = true;
    let mut files = 0;
    for (cfg, test_scale) in [(&analytic, false), (&mc, true)] {
        for format in [Format::Csv, Format::Json] {
            let opts = RunOptions { seed: Some(2024), format, test_scale };
            let a = cmd_compare(cfg, &opts).unwrap();
            let b = cmd_compare(cfg, &opts).unwrap();
            pass &= a == b && !a.is_empty();
            files += a.len();
        }
    }
    verdict(
        pass,
        format!("{files} output files byte-identical across two runs (analytic and Monte Carlo, CSV and JSON)"),
    )
}

fn main() {
    let spec = desk_code();
    let criteria: Vec<(&str, Box<dyn Fn() -> Verdict + '_>)> = vec![
        ("closed-form math", Box::new(criterion_1)),
        ("Holevo correctness", Box::new(criterion_2)),
        ("window structure", Box::new(criterion_3)),
        ("MDR exactness", Box::new(criterion_4)),
        ("LDPC sanity", Box::new(|| criterion_5(&spec))),
        ("FER trade-off direction", Box::new(|| criterion_6(&spec))),
        ("method comparison structure", Box::new(criterion_7)),
        ("estimator statistics", Box::new(criterion_8)),
        ("determinism", Box::new(criterion_9)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = check();
        if !v.pass {
            failed += 1;
        }
        println!(
            "criterion {} ({name}): {} [{:.1} s] {}",
            i + 1,
            if v.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            v.detail
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
