//! Acceptance criteria, one line of output per criterion.
//!
//! Every setting uses `J = Q = P = Γ = 1` and unit-power Rayleigh fading.
//! Run with `cargo test -p interdiv-cli --test acceptance`.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{attenuation_quadrature, capped_power_quadrature, harmonic, mean_se};
use interdiv_cli::spec::{validate_spec, Preset, RawFlags};
use interdiv_cli::{run_experiment, OutputFormat};
use interdiv_core::metrics::{curve, Quantity};
use interdiv_core::*;
use rand::{Rng, SeedableRng};
use rand_distr::Exp1;

const CR: [NetworkKind; 3] = [NetworkKind::CMac, NetworkKind::CBc, NetworkKind::CPac];
const REF: NetworkKind = NetworkKind::Reference(Topology::Pac);

// Bound factors for P = Γ = Q = 1, from quadrature of E[min(1, 1/g)] and E[1/(1+e)].
const ALPHA_MAC: f64 = 1.174_39;
const ALPHA_BC: f64 = 1.676_88;
const ALPHA_PAC: f64 = 1.969_30;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

fn unit() -> NetworkConfig {
    NetworkConfig::new(NetworkKind::CMac, 1)
}

fn alpha(kind: NetworkKind) -> f64 {
    match kind {
        NetworkKind::CMac => ALPHA_MAC,
        NetworkKind::CBc => ALPHA_BC,
        NetworkKind::CPac => ALPHA_PAC,
        NetworkKind::Reference(_) => 1.0,
    }
}

fn theorem_sandwich() -> Outcome {
    let start = Instant::now();
    let constants = bound_constants(&unit()).expect("unit config is supported");
    let mut failures = Vec::new();
    for kind in CR {
        let computed = constants.alpha(kind);
        let tol = if kind == NetworkKind::CPac { 3e-5 } else { 1e-5 };
        if (computed - alpha(kind)).abs() > tol {
            failures.push(format!("alpha {kind} = {computed}"));
        }
    }
    let dir = tempfile::tempdir().expect("tempdir");
    let out = dir.path().join("theorem.csv");
    let raw = RawFlags {
        preset: Some(Preset::TheoremSuite),
        samples: Some(100_000),
        seed: Some(7),
        output: Some(out.clone()),
        ..Default::default()
    };
    let spec = validate_spec(&raw).expect("valid spec");
    let outcome = run_experiment(&spec).expect("theorem suite runs");
    failures.extend(outcome.violations.iter().cloned());
    let mut worst_margin = f64::INFINITY;
    for row in &outcome.rows {
        let h = harmonic(row.users);
        let slack = 3.0 * row.std_error;
        let lo = h - slack;
        let hi = alpha(row.network) * h + slack;
        worst_margin = worst_margin.min((row.mean - lo).min(hi - row.mean));
        if row.mean < lo || row.mean > hi {
            failures.push(format!(
                "{} K={}: {} not in [{lo}, {hi}]",
                row.network, row.users, row.mean
            ));
        }
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(120) {
        failures.push(format!("took {elapsed:?}"));
    }
    Outcome::new(
        failures.is_empty() && outcome.rows.len() == 24,
        format!(
            "{} rows, smallest margin {worst_margin:.4}, {elapsed:.1?}{}",
            outcome.rows.len(),
            describe(&failures)
        ),
    )
}

fn proof_steps() -> Outcome {
    let rng = RngSpec::new(2);
    let mut checked = 0;
    let mut failures = Vec::new();
    for k in [2usize, 16, 100] {
        let cfg = NetworkConfig::new(NetworkKind::CPac, k);
        for i in 0..10_000 {
            let s = sample_state(&cfg, &rng, i).expect("valid");
            let snrs = per_user_snr(&s, &cfg).expect("shape");
            let best = select_user(&snrs).expect("nonempty").realized_snr;
            let strongest = select_user(&s.h).expect("nonempty").selected_user;
            let max_h = s.h.iter().cloned().fold(0.0, f64::max);
            if best < snrs[strongest] {
                failures.push(format!("K={k} sample {i}: lower step"));
            }
            if best > 1.0 * max_h {
                failures.push(format!("K={k} sample {i}: upper step"));
            }
            checked += 1;
        }
    }
    Outcome::new(
        failures.is_empty(),
        format!("{checked} C-PAC draws checked{}", describe(&failures)),
    )
}

fn reference_oracle() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut parts = Vec::new();
    for (k, h) in [(2usize, 1.5), (10, 2.928_968_253_968_254), (100, 5.187_377_517_639_621)] {
        let e = estimate_mdg_ratio(&NetworkConfig::new(REF, k), 100_000, &RngSpec::new(3)).expect("estimate");
        parts.push(format!("K={k}: {:.4}±{:.4} vs {h:.4}", e.mean, e.std_error));
        if (e.mean - h).abs() > 3.0 * e.std_error {
            failures.push(format!("K={k}"));
        }
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(30) {
        failures.push(format!("took {elapsed:?}"));
    }
    Outcome::new(
        failures.is_empty(),
        format!("{}{}", parts.join(", "), describe(&failures)),
    )
}

fn mdg_forms_agree() -> Outcome {
    let users = [2usize, 10, 50];
    let rng = RngSpec::new(4);
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for kind in NetworkKind::ALL {
        let ratio = curve(&unit(), kind, &users, Quantity::MdgRatio, 100_000, &rng).expect("ratio");
        let kappa = curve(&unit(), kind, &users, Quantity::MdgKappa, 100_000, &rng).expect("kappa");
        for (a, b) in ratio.iter().zip(&kappa) {
            let z = (a.value.mean - b.value.mean).abs() / a.value.combined_std_error(&b.value);
            worst = worst.max(z);
            if z > 3.0 {
                failures.push(format!("{kind} K={}: {} vs {}", a.users, a.value.mean, b.value.mean));
            }
        }
    }
    Outcome::new(
        failures.is_empty(),
        format!("largest gap {worst:.2} combined SE{}", describe(&failures)),
    )
}

fn figure_one_ordering() -> Outcome {
    let start = Instant::now();
    let users = [16usize, 64, 100];
    let pts =
        normalized_throughput_curve(&unit(), &NetworkKind::ALL, &users, 100_000, &RngSpec::new(5)).expect("curve");
    let at = |kind: NetworkKind, k: usize| {
        pts.iter()
            .find(|p| p.network == kind && p.users == k)
            .expect("point present")
            .value
    };
    let mut failures = Vec::new();
    for &k in &users {
        let reference = at(REF, k);
        for kind in CR {
            let v = at(kind, k);
            if v.mean < reference.mean - 3.0 * v.combined_std_error(&reference) {
                failures.push(format!("{kind} below ref at K={k}"));
            }
        }
        let pac = at(NetworkKind::CPac, k);
        for kind in [NetworkKind::CMac, NetworkKind::CBc] {
            let v = at(kind, k);
            if pac.mean < v.mean - 3.0 * pac.combined_std_error(&v) {
                failures.push(format!("pac below {kind} at K={k}"));
            }
        }
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(120) {
        failures.push(format!("took {elapsed:?}"));
    }
    let summary = NetworkKind::ALL
        .iter()
        .map(|&kind| format!("{kind}={:.3}", at(kind, 100).mean))
        .collect::<Vec<_>>()
        .join(" ");
    Outcome::new(failures.is_empty(), format!("K=100: {summary}{}", describe(&failures)))
}

fn corollary_trend() -> Outcome {
    let start = Instant::now();
    let users = [1_000usize, 10_000, 100_000, 1_000_000];
    let mut failures = Vec::new();
    let mut parts = Vec::new();
    for kind in NetworkKind::ALL {
        let pts = curve(
            &unit(),
            kind,
            &users,
            Quantity::AsymptoticRatio,
            2_000,
            &RngSpec::new(6),
        )
        .expect("curve");
        let ratios: Vec<String> = pts.iter().map(|p| format!("{:.3}", p.value.mean)).collect();
        parts.push(format!("{kind}[{}]", ratios.join(",")));
        for p in &pts {
            if !(0.90..=1.25).contains(&p.value.mean) {
                failures.push(format!(
                    "{kind} K={}: {:.4} outside [0.90, 1.25]",
                    p.users, p.value.mean
                ));
            }
        }
        let (first, last) = (pts[0].value, pts[pts.len() - 1].value);
        if (last.mean - 1.0).abs() > (first.mean - 1.0).abs() + 3.0 * first.combined_std_error(&last) {
            failures.push(format!("{kind}: ratio moves away from 1"));
        }
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(15 * 60) {
        failures.push(format!("took {elapsed:?}"));
    }
    Outcome::new(
        failures.is_empty(),
        format!("{} in {elapsed:.0?}{}", parts.join(" "), describe(&failures)),
    )
}

fn analytic_constants() -> Outcome {
    let mut failures = Vec::new();
    let capped = expected_capped_power(1.0, 1.0).expect("valid");
    let atten = expected_interference_attenuation(1.0).expect("valid");
    for (name, got, pinned, quad) in [
        ("E[min(P,Γ/g)]", capped, 0.851_504, capped_power_quadrature(1.0, 1.0)),
        ("E[1/(1+Qe)]", atten, 0.596_347, attenuation_quadrature(1.0)),
    ] {
        if (got - quad).abs() > 1e-5 || (got - pinned).abs() > 1e-5 {
            failures.push(format!("{name} = {got}, quadrature {quad}"));
        }
    }
    let mut rng = rand_xoshiro::Xoshiro256PlusPlus::seed_from_u64(7);
    let n = 10_000_000;
    let (mut cs, mut es) = (Vec::with_capacity(n), Vec::with_capacity(n));
    for _ in 0..n {
        let g: f64 = rng.sample(Exp1);
        let e: f64 = rng.sample(Exp1);
        cs.push(max_transmit_power(1.0, 1.0, g));
        es.push(1.0 / (1.0 + e));
    }
    let (mc_c, se_c) = mean_se(&cs);
    let (mc_e, se_e) = mean_se(&es);
    let zc = (mc_c - capped).abs() / se_c;
    let ze = (mc_e - atten).abs() / se_e;
    if zc > 4.0 || ze > 4.0 {
        failures.push(format!("MC gaps {zc:.2} and {ze:.2} SE"));
    }
    Outcome::new(
        failures.is_empty(),
        format!(
            "{capped:.6} and {atten:.6}, MC within {zc:.2} and {ze:.2} SE{}",
            describe(&failures)
        ),
    )
}

fn run_to(dir: &Path, name: &str, mut raw: RawFlags, workers: &str) -> Vec<u8> {
    let path = dir.join(name);
    raw.output = Some(path.clone());
    raw.workers = Some(workers.into());
    let spec = validate_spec(&raw).expect("valid spec");
    run_experiment(&spec).expect("run succeeds");
    std::fs::read(path).expect("output written")
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().expect("tempdir");
    let specs = [
        (
            "fig1.csv",
            RawFlags {
                preset: Some(Preset::Fig1),
                samples: Some(20_000),
                seed: Some(7),
                ..Default::default()
            },
        ),
        (
            "fig1.json",
            RawFlags {
                preset: Some(Preset::Fig1),
                samples: Some(20_000),
                seed: Some(7),
                format: Some(OutputFormat::Json),
                ..Default::default()
            },
        ),
        (
            "theorem.csv",
            RawFlags {
                preset: Some(Preset::TheoremSuite),
                samples: Some(20_000),
                seed: Some(7),
                ..Default::default()
            },
        ),
        (
            "fig2.csv",
            RawFlags {
                preset: Some(Preset::Fig2),
                samples: Some(40),
                seed: Some(7),
                ..Default::default()
            },
        ),
    ];
    let mut failures = Vec::new();
    for (name, raw) in specs {
        let one = run_to(dir.path(), &format!("w1-{name}"), raw.clone(), "1");
        let eight = run_to(dir.path(), &format!("w8-{name}"), raw, "8");
        if one != eight || one.is_empty() {
            failures.push(name.to_string());
        }
    }
    Outcome::new(
        failures.is_empty(),
        format!(
            "fig1 csv/json, theorem suite, fig2 at 1 vs 8 workers{}",
            describe(&failures)
        ),
    )
}

fn describe(failures: &[String]) -> String {
    if failures.is_empty() {
        String::new()
    } else {
        format!("; failures: {}", failures.join("; "))
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("1 diversity gain within [H_K, alpha*H_K]", theorem_sandwich),
        ("2 per-sample proof-step bounds", proof_steps),
        ("3 reference gain equals H_K", reference_oracle),
        ("4 ratio and kappa gain forms agree", mdg_forms_agree),
        ("5 normalized throughput ordering", figure_one_ordering),
        ("6 throughput / log2(ln K) band and trend", corollary_trend),
        ("7 analytic constants", analytic_constants),
        ("8 output independent of worker count", determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, check) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let outcome = check();
        let status = if outcome.pass { "PASS" } else { "FAIL" };
        println!("[{status}] criterion {name}: {}", outcome.detail);
        if !outcome.pass {
            failed += 1;
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    }
}
