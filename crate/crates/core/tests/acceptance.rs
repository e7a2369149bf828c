//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use cubefpp::analytic::identities::{convolution_residual, log_sinh_bound_gap, master_equation_residual, tenths};
use cubefpp::analytic::oracle::{a_brute_force, ab_brute_force, DEFAULT_PANELS};
use cubefpp::analytic::{a_expected, ab_expected, b_expected, constants, success_lower_bound, theta, AnalyticConfig};
use cubefpp::experiments::pilot::Calibration;
use cubefpp::experiments::runner::{BtpOutcome, FppOutcome};
use cubefpp::experiments::{
    compare_distributions, execute, render, run_btp, run_fpp, run_walks, Command, ExperimentConfig, Format, RunOptions,
    TrialSummary,
};
use cubefpp::fpp::{brute_force_oracle, first_passage, WeightModel, WeightScheme};
use cubefpp::hypercube::Dimension;
use cubefpp::rng::{derive_seed, Stream};
use cubefpp::Result;

const SEED: u64 = 20_261_018;
const BANDS: &str = include_str!("../calibration/bands.json");

type Outcome = Result<(bool, String)>;

fn mean_of(s: &TrialSummary, metric: &str) -> (f64, f64) {
    let r = s.get(metric).unwrap_or_else(|| panic!("missing {metric}"));
    (r.mean, r.stderr.unwrap_or(0.0))
}

fn z_of(s: &TrialSummary, metric: &str, target: f64) -> f64 {
    let (m, se) = mean_of(s, metric);
    (m - target) / se
}

/// `floor(x·10^digits)/10^digits` printed at `digits` places.
fn truncated(x: f64, digits: usize) -> String {
    let scale = 10f64.powi(digits as i32);
    format!("{:.*}", digits, (x * scale).floor() / scale)
}

fn constants_digits() -> Outcome {
    let c = constants();
    let residual = (c.theta.sinh() - 1.0).abs();
    let digits = [
        (truncated(c.a_limit, 3), "0.623"),
        (truncated(c.b_limit, 3), "6.709"),
        (truncated(c.ab_limit, 3), "7.333"),
        (truncated(c.p_lower_limit * 1e9, 1), "6.9"),
    ];
    let ok = residual <= 1e-14 && digits.iter().all(|(got, want)| got == want);
    let shown: Vec<String> = digits.iter().map(|(g, w)| format!("{g}/{w}")).collect();
    Ok((ok, format!("|sinh θ - 1| = {residual:.1e}; digits {}", shown.join(" "))))
}

fn large_n_quadrature() -> Outcome {
    let cfg = AnalyticConfig::default();
    let th = theta();
    let n = 10_000;
    let a = a_expected(n, th, &cfg)?.value;
    let b = b_expected(n, th, &cfg)?.value;
    let p = success_lower_bound(n, th, &cfg)?.value;
    let ok = (a - 0.6232).abs() <= 0.01 && (b - 6.7098).abs() <= 0.03 && ((p - 6.9e-9) / 6.9e-9).abs() <= 0.05;
    Ok((ok, format!("A = {a:.6}, B = {b:.6}, bound = {p:.4e}")))
}

fn reduced_vs_brute_force() -> Outcome {
    let cfg = AnalyticConfig::default();
    let th = theta();
    let mut worst: f64 = 0.0;
    for n in 1..=3 {
        let a = a_expected(n, th, &cfg)?.value;
        let ab = ab_expected(n, th, &cfg)?.value;
        worst = worst.max(((a - a_brute_force(n, th, DEFAULT_PANELS)?) / a).abs());
        worst = worst.max(((ab - ab_brute_force(n, th, DEFAULT_PANELS)?) / ab).abs());
    }
    Ok((worst < 1e-4, format!("max relative difference {worst:.2e}")))
}

fn identities() -> Outcome {
    let grid = tenths();
    let mut master: f64 = 0.0;
    for n in (1..=8).chain([12, 16]) {
        master = master.max(master_equation_residual(n, &grid)?);
    }
    let mut conv: f64 = 0.0;
    for n in 1..=4 {
        conv = conv.max(convolution_residual(n, &grid)?);
    }
    let gap = log_sinh_bound_gap(10_000);
    let ok = master <= 1e-6 && conv <= 1e-10 && gap <= 4.0 * f64::EPSILON;
    Ok((ok, format!("master {master:.2e}, convolution {conv:.2e}, bound gap {gap:.1e}")))
}

fn btp_vs_analytic(o: &BtpOutcome) -> Outcome {
    let s = &o.summary;
    let cfg = AnalyticConfig::default();
    let th = theta();
    let zs = [
        ("E Z(1,θ)", z_of(s, "z_one", 1.0)),
        ("E|Ta|", z_of(s, "t_a", a_expected(3, th, &cfg)?.value)),
        ("E|T|", z_of(s, "t_ab", ab_expected(3, th, &cfg)?.value)),
        ("population", z_of(s, "particles", (3.0 * th).exp())),
    ];
    let ok = zs.iter().all(|(_, z)| z.abs() < 3.0);
    let shown: Vec<String> = zs.iter().map(|(m, z)| format!("{m} z={z:+.2}")).collect();
    Ok((ok, format!("{} runs: {}", o.records.len(), shown.join(", "))))
}

fn coupling_invariants(o: &BtpOutcome) -> Outcome {
    let v: u64 = o.records.iter().map(|r| r.violations).sum();
    Ok((v == 0, format!("{v} violations across {} runs", o.records.len())))
}

fn fpp_oracle() -> Outcome {
    let mut checked = 0;
    let mut mismatches = 0;
    for n in 1..=3 {
        let d = Dimension::new(n)?;
        for i in 0..1000 {
            for scheme in [WeightScheme::Stored, WeightScheme::Derived] {
                let m = WeightModel::new(derive_seed(SEED, Stream::Verify, i), d, scheme)?;
                checked += 1;
                if first_passage(&m, d.one(), false, false)?.t_first != brute_force_oracle(&m)? {
                    mismatches += 1;
                }
            }
        }
    }
    Ok((mismatches == 0, format!("{mismatches} mismatches in {checked} comparisons")))
}

fn model_equivalence() -> Outcome {
    let h = theta() + 1.0;
    let trials = 10_000;
    let btp = run_btp(
        &ExperimentConfig { command: Command::Btp, n: 3, trials, seed: SEED, horizon: Some(h), ..Default::default() },
        RunOptions::default(),
    )?;
    let fpp = run_fpp(
        &ExperimentConfig { command: Command::Fpp, n: 3, trials, seed: SEED + 1, ..Default::default() },
        RunOptions::default(),
    )?;
    let a = btp.censored_arrivals();
    let b: Vec<f64> = fpp.t_first().into_iter().map(|t| t.min(h)).collect();
    let ks = compare_distributions(&a, &b)?;
    Ok((ks.p_value > 0.01, format!("D = {:.4}, p = {:.3}", ks.statistic, ks.p_value)))
}

fn passage_bands(runs: &[(u32, FppOutcome)], cal: &Calibration) -> Outcome {
    let cfg = AnalyticConfig::default();
    let mut ok = true;
    let mut parts = Vec::new();
    for (n, o) in runs {
        let s = &o.summary;
        let (l1, _) = mean_of(s, "n_norm_l1");
        let (var, _) = mean_of(s, "n2_var");
        let (minus, _) = mean_of(s, "n_t_minus_l1");
        let (p, _) = mean_of(s, "p_below_theta");
        let bound = success_lower_bound(*n, theta(), &cfg).map(|b| b.value).ok();
        ok &= cal.bands.n_norm_l1.contains(l1)
            && cal.bands.n2_var.contains(var)
            && cal.bands.n_t_minus_l1.contains(minus)
            && p > 0.0
            && bound.is_none_or(|b| p > b);
        let bound = bound.map_or("n/a".to_string(), |b| format!("{b:.2e}"));
        parts.push(format!("n={n}: nL1={l1:.3} n2Var={var:.3} nL1-={minus:.3} P={p:.4} (bound {bound})"));
    }
    Ok((ok, parts.join("; ")))
}

fn walk_and_geodesic(fpp16: &FppOutcome, btp: &BtpOutcome, cal: &Calibration) -> Outcome {
    let th = theta();
    let slope = constants().geodesic_slope;
    let big = run_walks(
        &ExperimentConfig { command: Command::Walk, n: 1000, trials: 1000, seed: SEED, ..Default::default() },
        RunOptions::default(),
    )?;
    let z_len = z_of(&big.summary, "length_over_n", slope);
    let (geo, _) = mean_of(&fpp16.summary, "length_over_n");
    let in_band = cal.bands.geodesic_length_over_n.contains(geo);

    let small = run_walks(
        &ExperimentConfig { command: Command::Walk, n: 3, trials: 100_000, seed: SEED, ..Default::default() },
        RunOptions::default(),
    )?;
    let target = th.powi(3);
    let (p_walk, se_walk) = mean_of(&small.summary, "oriented");
    let z_walk = (p_walk - target) / se_walk;
    let ends = small.records.iter().chain(&big.records).all(|r| r.ends_at_one);

    // Ratio estimator Σ c_n / Σ Z over BTP runs, with delta-method error.
    let k = btp.records.len() as f64;
    let c: Vec<f64> = btp.records.iter().map(|r| r.line_classes[0] as f64).collect();
    let z: Vec<f64> = btp.records.iter().map(|r| r.z_one as f64).collect();
    let ratio = c.iter().sum::<f64>() / z.iter().sum::<f64>();
    let zbar = z.iter().sum::<f64>() / k;
    let resid: Vec<f64> = c.iter().zip(&z).map(|(c, z)| c - ratio * z).collect();
    let rvar = resid.iter().map(|r| r * r).sum::<f64>() / (k - 1.0);
    let se_ratio = (rvar / k).sqrt() / zbar;
    let z_bridge = (ratio - p_walk) / se_walk.hypot(se_ratio);
    let z_ratio = (ratio - target) / se_ratio;

    let ok = z_len.abs() < 3.0 && in_band && z_walk.abs() < 3.0 && z_bridge.abs() < 3.0 && z_ratio.abs() < 3.0 && ends;
    let band = cal.bands.geodesic_length_over_n;
    Ok((
        ok,
        format!(
            "n=1000 length/n z={z_len:+.2}; n=16 geodesic length/n {geo:.4} in [{:.4}, {:.4}] \
             (asymptote {slope:.4}); n=3 oriented {p_walk:.4} z={z_walk:+.2}; BTP class ratio {ratio:.4} \
             z={z_ratio:+.2}, walk-vs-BTP z={z_bridge:+.2}",
            band.lower.unwrap_or(f64::NEG_INFINITY),
            band.upper,
        ),
    ))
}

fn reproducibility() -> Outcome {
    let mut mismatched = Vec::new();
    for (command, n) in [(Command::Fpp, 10), (Command::Btp, 3), (Command::Walk, 50)] {
        for per_trial in [false, true] {
            for format in [Format::Csv, Format::Json] {
                let cfg =
                    ExperimentConfig { command, n, trials: 2000, seed: SEED, per_trial, format, ..Default::default() };
                let one = render(&cfg, &execute(&cfg, RunOptions { threads: 1 })?)?;
                let eight = render(&cfg, &execute(&cfg, RunOptions { threads: 8 })?)?;
                if one != eight {
                    mismatched.push(format!("{command:?}/{per_trial}/{format:?}"));
                }
            }
        }
    }
    Ok((mismatched.is_empty(), format!("12 outputs compared; mismatched: {mismatched:?}")))
}

struct Report {
    failed: usize,
}

impl Report {
    fn run(&mut self, id: u32, name: &str, f: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let (ok, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
        let secs = start.elapsed().as_secs_f64();
        println!("{} {id:>2} {name}: {detail} [{secs:.1}s]", if ok { "PASS" } else { "FAIL" });
        self.failed += usize::from(!ok);
    }
}

fn main() -> ExitCode {
    let cal = Calibration::from_json(BANDS).expect("calibration file parses");
    assert_ne!(cal.seed, SEED, "acceptance must not reuse the pilot seed");
    let mut r = Report { failed: 0 };

    r.run(1, "constants", constants_digits);
    r.run(2, "quadrature asymptotics", large_n_quadrature);
    r.run(3, "reduced form vs brute force", reduced_vs_brute_force);
    r.run(4, "analytic identities", identities);

    let start = Instant::now();
    let btp = run_btp(
        &ExperimentConfig { command: Command::Btp, n: 3, trials: 100_000, seed: SEED, ..Default::default() },
        RunOptions::default(),
    );
    println!("     shared BTP run for 5, 6, 10 [{:.1}s]", start.elapsed().as_secs_f64());
    let btp = match btp {
        Ok(o) => Some(o),
        Err(e) => {
            println!("error: BTP run failed: {e}");
            None
        }
    };
    let missing = || Ok((false, "BTP run unavailable".to_string()));
    match &btp {
        Some(o) => {
            r.run(5, "simulation vs analytic", || btp_vs_analytic(o));
            r.run(6, "coupling invariants", || coupling_invariants(o));
        }
        None => {
            r.run(5, "simulation vs analytic", missing);
            r.run(6, "coupling invariants", missing);
        }
    }
    r.run(7, "fpp oracle equivalence", fpp_oracle);
    r.run(8, "model equivalence", model_equivalence);

    let start = Instant::now();
    let fpp: Result<Vec<(u32, FppOutcome)>> = [8u32, 12, 16]
        .into_iter()
        .map(|n| {
            let cfg = ExperimentConfig {
                command: Command::Fpp,
                n,
                trials: 10_000,
                seed: SEED,
                p: vec![1],
                ..Default::default()
            };
            Ok((n, run_fpp(&cfg, RunOptions::default())?))
        })
        .collect();
    println!("     shared FPP runs for 9, 10 [{:.1}s]", start.elapsed().as_secs_f64());
    match (&fpp, &btp) {
        (Ok(runs), Some(b)) => {
            r.run(9, "finite-n passage time bands", || passage_bands(runs, &cal));
            r.run(10, "conditioned walks and geodesics", || walk_and_geodesic(&runs[2].1, b, &cal));
        }
        (Ok(runs), None) => {
            r.run(9, "finite-n passage time bands", || passage_bands(runs, &cal));
            r.run(10, "conditioned walks and geodesics", missing);
        }
        (Err(e), _) => {
            let msg = e.to_string();
            r.run(9, "finite-n passage time bands", || Ok((false, msg.clone())));
            r.run(10, "conditioned walks and geodesics", || Ok((false, msg.clone())));
        }
    }
    r.run(11, "reproducibility across thread counts", reproducibility);

    println!("{} of 11 criteria passed", 11 - r.failed);
    if r.failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
