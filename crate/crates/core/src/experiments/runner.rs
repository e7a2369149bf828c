//! Trial drivers. Each trial draws from its own derived seed and results are
//! collected in trial order, so output is independent of the worker count.

use rayon::prelude::*;
use serde::Serialize;

use super::config::{Command, ExperimentConfig};
use super::output::Table;
use super::stats::{passage_rows, SummaryRow, TrialSummary};
use crate::analytic::{self, constants, theta, AnalyticConfig};
use crate::btp::{self, check_invariants, expected_population, Caps};
use crate::error::{Error, Result};
use crate::fpp::{first_passage, geodesic_stats, WeightModel, WeightScheme};
use crate::hypercube::Dimension;
use crate::rng::{derive_seed, trial_rng, Stream};
use crate::walks::{sample_conditioned_walk, walk_stats};

/// Execution settings that do not affect results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RunOptions {
    /// Worker threads; 0 picks the rayon default.
    pub threads: usize,
}

/// Runs `f(trial)` for every trial on a dedicated pool and returns results in
/// trial order. On failure the error of the lowest failing trial is returned.
pub fn par_trials<T, F>(trials: u64, opts: RunOptions, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads)
        .build()
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let results: Vec<Result<T>> = pool.install(|| (0..trials).into_par_iter().map(&f).collect());
    results.into_iter().collect()
}

fn z_rows(summary: &mut TrialSummary, metric: &str, reference: &str, target: f64) {
    let Some(row) = summary.get(metric) else { return };
    let count = row.count;
    let z = row.z_against(target);
    summary.push(SummaryRow::scalar(&format!("analytic:{reference}"), count, target, None));
    if let Some(z) = z {
        summary.push(SummaryRow::scalar(&format!("z:{metric}"), count, z, None));
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FppRecord {
    pub trial: u64,
    pub seed: u64,
    pub t_first: f64,
    pub length: u32,
    pub backsteps: u32,
    pub covering_time: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FppOutcome {
    pub records: Vec<FppRecord>,
    pub summary: TrialSummary,
}

impl FppOutcome {
    pub fn trial_table(&self) -> Table {
        let mut t = Table::new(&["trial", "seed", "t_first", "length", "backsteps", "covering_time"]);
        for r in &self.records {
            t.push(vec![
                r.trial.into(),
                r.seed.into(),
                r.t_first.into(),
                u64::from(r.length).into(),
                u64::from(r.backsteps).into(),
                r.covering_time.into(),
            ]);
        }
        t
    }

    pub fn t_first(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.t_first).collect()
    }
}

/// Independent first-passage trials at dimension `cfg.n`.
pub fn run_fpp(cfg: &ExperimentConfig, opts: RunOptions) -> Result<FppOutcome> {
    cfg.validate()?;
    let n = Dimension::new(cfg.n)?;
    let records = par_trials(cfg.trials, opts, |trial| {
        let seed = derive_seed(cfg.seed, Stream::FppWeights, trial);
        let model = WeightModel::new(seed, n, WeightScheme::Derived)?;
        let r = first_passage(&model, n.one(), true, cfg.covering)?;
        let g = geodesic_stats(&r)?;
        Ok(FppRecord {
            trial,
            seed,
            t_first: r.t_first,
            length: g.length,
            backsteps: g.backsteps,
            covering_time: r.covering_time,
        })
    })?;
    let th = theta();
    let ts: Vec<f64> = records.iter().map(|r| r.t_first).collect();
    let nf = f64::from(cfg.n);
    let mut s = TrialSummary::default();
    s.sample("t_first", &ts)?;
    for row in passage_rows(&ts, th, cfg.n, &cfg.p)? {
        s.push(row);
    }
    let len: Vec<f64> = records.iter().map(|r| f64::from(r.length)).collect();
    s.sample("length", &len)?;
    s.sample("length_over_n", &len.iter().map(|l| l / nf).collect::<Vec<_>>())?;
    s.sample("backsteps", &records.iter().map(|r| f64::from(r.backsteps)).collect::<Vec<_>>())?;
    s.sample("oriented", &records.iter().map(|r| f64::from(u8::from(r.backsteps == 0))).collect::<Vec<_>>())?;
    if cfg.covering {
        let cov: Vec<f64> = records.iter().filter_map(|r| r.covering_time).collect();
        s.sample("covering_time", &cov)?;
    }
    let c = constants();
    s.push(SummaryRow::scalar("analytic:theta", ts.len() as u64, th, None));
    s.push(SummaryRow::scalar("analytic:geodesic_slope", ts.len() as u64, c.geodesic_slope, None));
    if let Ok(b) = analytic::success_lower_bound(cfg.n, th, &cfg.analytic()) {
        s.push(SummaryRow::scalar("analytic:success_lower_bound", ts.len() as u64, b.value, Some(b.est_error)));
    }
    Ok(FppOutcome { records, summary: s })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BtpRecord {
    pub trial: u64,
    pub seed: u64,
    pub particles: u64,
    /// `Z(1̂, h)`.
    pub z_one: u64,
    pub t_a: u64,
    pub t_b: u64,
    /// Particles at 1̂ with a simple ancestral line.
    pub simple: u64,
    /// `Z₀(1̂, h)`.
    pub uncontested: bool,
    /// Alive first arrival at 1̂, absent if after the horizon.
    pub alive_arrival: Option<f64>,
    /// Particles at 1̂ by ancestral line length `n, n+2, n+4, n+6`.
    pub line_classes: [u64; 4],
    pub violations: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BtpOutcome {
    pub horizon: f64,
    pub records: Vec<BtpRecord>,
    pub summary: TrialSummary,
}

impl BtpOutcome {
    pub fn trial_table(&self) -> Table {
        let mut t = Table::new(&[
            "trial",
            "seed",
            "particles",
            "z_one",
            "t_a",
            "t_b",
            "simple",
            "uncontested",
            "alive_arrival",
            "violations",
        ]);
        for r in &self.records {
            t.push(vec![
                r.trial.into(),
                r.seed.into(),
                r.particles.into(),
                r.z_one.into(),
                r.t_a.into(),
                r.t_b.into(),
                r.simple.into(),
                r.uncontested.into(),
                r.alive_arrival.into(),
                r.violations.into(),
            ]);
        }
        t
    }

    /// Alive arrival times at 1̂, censored at the horizon.
    pub fn censored_arrivals(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.alive_arrival.unwrap_or(self.horizon)).collect()
    }
}

/// One BTP realisation summarised at `(1̂, h)`.
pub fn btp_trial(n: Dimension, h: f64, seed: u64, caps: Caps, trial: u64) -> Result<BtpRecord> {
    let run = btp::simulate(n, h, 0, seed, caps)?;
    let one = n.one();
    let triples = run.count_triples(one, h)?;
    let lengths = run.line_lengths(one, h)?;
    let mut line_classes = [0u64; 4];
    for l in lengths {
        let extra = l - n.get() as usize;
        if extra % 2 == 0 && extra / 2 < 4 {
            line_classes[extra / 2] += 1;
        }
    }
    Ok(BtpRecord {
        trial,
        seed,
        particles: run.len() as u64,
        z_one: run.count_at(one, h)? as u64,
        t_a: triples.t_a,
        t_b: triples.t_b,
        simple: triples.per_particle.iter().filter(|(_, k)| k.a == 0).count() as u64,
        uncontested: run.uncontested_occupancy(one, h)? == 1,
        alive_arrival: run.alive_arrival(one),
        line_classes,
        violations: check_invariants(&run).len() as u64,
    })
}

pub fn run_btp(cfg: &ExperimentConfig, opts: RunOptions) -> Result<BtpOutcome> {
    cfg.validate()?;
    let n = Dimension::new(cfg.n)?;
    let h = cfg.horizon_or_theta();
    let caps = Caps { max_particles: cfg.max_particles };
    let records =
        par_trials(cfg.trials, opts, |trial| btp_trial(n, h, derive_seed(cfg.seed, Stream::Btp, trial), caps, trial))?;
    let col = |f: &dyn Fn(&BtpRecord) -> f64| records.iter().map(f).collect::<Vec<f64>>();
    let mut s = TrialSummary::default();
    s.sample("particles", &col(&|r| r.particles as f64))?;
    s.sample("z_one", &col(&|r| r.z_one as f64))?;
    s.sample("t_a", &col(&|r| r.t_a as f64))?;
    s.sample("t_b", &col(&|r| r.t_b as f64))?;
    s.sample("t_ab", &col(&|r| (r.t_a + r.t_b) as f64))?;
    s.sample("simple", &col(&|r| r.simple as f64))?;
    s.sample("uncontested", &col(&|r| f64::from(u8::from(r.uncontested))))?;
    s.sample("arrived", &col(&|r| f64::from(u8::from(r.alive_arrival.is_some()))))?;
    s.sample("alive_arrival_censored", &col(&|r| r.alive_arrival.unwrap_or(h)))?;
    for j in 0..4 {
        let name = format!("line_len_{}", cfg.n as usize + 2 * j);
        s.sample(&name, &col(&|r| r.line_classes[j] as f64))?;
    }
    s.sample("violations", &col(&|r| r.violations as f64))?;
    let acfg = cfg.analytic();
    z_rows(&mut s, "particles", "population", expected_population(cfg.n, h));
    if let Ok(m) = analytic::occupancy_mean(cfg.n, h, cfg.n) {
        z_rows(&mut s, "z_one", "m_one", m);
    }
    if h > 0.0 {
        if let (Ok(a), Ok(ab)) = (analytic::a_expected(cfg.n, h, &acfg), analytic::ab_expected(cfg.n, h, &acfg)) {
            z_rows(&mut s, "t_a", "a", a.value);
            z_rows(&mut s, "t_ab", "ab", ab.value);
            z_rows(&mut s, "t_b", "b", ab.value - a.value);
        }
        if let Ok(sb) = analytic::s_bounds(cfg.n, h, &acfg) {
            let count = cfg.trials;
            s.push(SummaryRow::scalar("analytic:s_lower", count, sb.lower, None));
            s.push(SummaryRow::scalar("analytic:s_upper", count, sb.upper, None));
        }
        if let Ok(p) = analytic::success_lower_bound(cfg.n, h, &acfg) {
            s.push(SummaryRow::scalar("analytic:success_lower_bound", cfg.trials, p.value, Some(p.est_error)));
        }
    }
    Ok(BtpOutcome { horizon: h, records, summary: s })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WalkRecord {
    pub trial: u64,
    pub seed: u64,
    pub length: u64,
    pub backsteps: u64,
    pub oriented: bool,
    pub ends_at_one: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WalkOutcome {
    pub records: Vec<WalkRecord>,
    pub summary: TrialSummary,
}

impl WalkOutcome {
    pub fn trial_table(&self) -> Table {
        let mut t = Table::new(&["trial", "seed", "length", "backsteps", "oriented", "ends_at_one"]);
        for r in &self.records {
            t.push(vec![
                r.trial.into(),
                r.seed.into(),
                r.length.into(),
                r.backsteps.into(),
                r.oriented.into(),
                r.ends_at_one.into(),
            ]);
        }
        t
    }
}

pub fn run_walks(cfg: &ExperimentConfig, opts: RunOptions) -> Result<WalkOutcome> {
    cfg.validate()?;
    let t_end = cfg.horizon_or_theta();
    let records = par_trials(cfg.trials, opts, |trial| {
        let mut rng = trial_rng(cfg.seed, Stream::Walk, trial);
        let w = sample_conditioned_walk(cfg.n, t_end, &mut rng)?;
        let st = walk_stats(&w);
        Ok(WalkRecord {
            trial,
            seed: derive_seed(cfg.seed, Stream::Walk, trial),
            length: st.length,
            backsteps: st.backsteps,
            oriented: st.oriented,
            ends_at_one: w.ends_at_one(),
        })
    })?;
    let nf = f64::from(cfg.n);
    let col = |f: &dyn Fn(&WalkRecord) -> f64| records.iter().map(f).collect::<Vec<f64>>();
    let mut s = TrialSummary::default();
    s.sample("length", &col(&|r| r.length as f64))?;
    s.sample("length_over_n", &col(&|r| r.length as f64 / nf))?;
    s.sample("backsteps", &col(&|r| r.backsteps as f64))?;
    s.sample("oriented", &col(&|r| f64::from(u8::from(r.oriented))))?;
    s.sample("ends_at_one", &col(&|r| f64::from(u8::from(r.ends_at_one))))?;
    for j in 0..4u64 {
        let l = u64::from(cfg.n) + 2 * j;
        s.sample(&format!("line_len_{l}"), &col(&|r| f64::from(u8::from(r.length == l))))?;
    }
    // E[k | odd] = t coth t per coordinate
    z_rows(&mut s, "length_over_n", "mean_length_over_n", t_end / t_end.tanh());
    if let Ok(p) = analytic::oriented_mass_ratio(cfg.n, t_end) {
        z_rows(&mut s, "oriented", "oriented", p);
    }
    Ok(WalkOutcome { records, summary: s })
}

/// Closed forms and quadratures at `(n, u)`.
pub fn run_analytic(cfg: &ExperimentConfig) -> Result<TrialSummary> {
    let acfg = AnalyticConfig { tol: cfg.tol, max_subdivisions: cfg.max_subdivisions };
    acfg.validate()?;
    let n = cfg.n;
    let u = cfg.horizon_or_theta();
    let c = constants();
    let mut s = TrialSummary::default();
    let mut put = |name: &str, v: f64, e: Option<f64>| s.push(SummaryRow::scalar(name, 1, v, e));
    put("theta", c.theta, None);
    put("a_limit", c.a_limit, None);
    put("b_limit", c.b_limit, None);
    put("ab_limit", c.ab_limit, None);
    put("s_lower_limit", c.s_lower_limit, None);
    put("p_lower_limit", c.p_lower_limit, None);
    put("geodesic_slope", c.geodesic_slope, None);
    put("u", u, None);
    put("log_m_one", analytic::log_occupancy_mean(n, u, n), None);
    let a = analytic::a_expected(n, u, &acfg)?;
    let ab = analytic::ab_expected(n, u, &acfg)?;
    let b = analytic::b_expected(n, u, &acfg)?;
    put("a", a.value, Some(a.est_error));
    put("b", b.value, Some(b.est_error));
    put("ab", ab.value, Some(ab.est_error));
    let sb = analytic::s_bounds(n, u, &acfg)?;
    put("s_lower", sb.lower, Some(sb.a.est_error));
    put("s_upper", sb.upper, None);
    match analytic::success_lower_bound(n, u, &acfg) {
        Ok(p) => put("success_lower_bound", p.value, Some(p.est_error)),
        Err(Error::DegenerateBound { .. }) => put("success_lower_bound", f64::NAN, None),
        Err(e) => return Err(e),
    }
    put("oriented_mass_ratio", analytic::oriented_mass_ratio(n, u)?, None);
    Ok(s)
}

/// Runs the experiment named by `cfg.command` and returns the table to write.
pub fn execute(cfg: &ExperimentConfig, opts: RunOptions) -> Result<Table> {
    Ok(match cfg.command {
        Command::Analytic => Table::from(&run_analytic(cfg)?),
        Command::Fpp => {
            let o = run_fpp(cfg, opts)?;
            if cfg.per_trial {
                o.trial_table()
            } else {
                Table::from(&o.summary)
            }
        }
        Command::Btp => {
            let o = run_btp(cfg, opts)?;
            if cfg.per_trial {
                o.trial_table()
            } else {
                Table::from(&o.summary)
            }
        }
        Command::Walk => {
            let o = run_walks(cfg, opts)?;
            if cfg.per_trial {
                o.trial_table()
            } else {
                Table::from(&o.summary)
            }
        }
        Command::Verify | Command::Pilot => {
            return Err(Error::InvalidArgument("verify and pilot have their own drivers".into()))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::output::render;

    #[test]
    fn thread_count_does_not_change_output() {
        for command in [Command::Fpp, Command::Btp, Command::Walk] {
            for per_trial in [false, true] {
                let cfg = ExperimentConfig { command, n: 5, trials: 300, seed: 17, per_trial, ..Default::default() };
                let a = render(&cfg, &execute(&cfg, RunOptions { threads: 1 }).unwrap()).unwrap();
                let b = render(&cfg, &execute(&cfg, RunOptions { threads: 4 }).unwrap()).unwrap();
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn fpp_summary_has_passage_rows() {
        let cfg = ExperimentConfig { n: 6, trials: 200, covering: true, ..Default::default() };
        let o = run_fpp(&cfg, RunOptions::default()).unwrap();
        for m in ["t_first", "t_plus", "t_minus", "norm_l1", "norm_l2", "n2_var", "p_below_theta", "covering_time"] {
            assert!(o.summary.get(m).is_some(), "{m}");
        }
        assert!(o.summary.get("norm_l1").unwrap().mean <= o.summary.get("norm_l2").unwrap().mean);
        assert!(o.records.iter().all(|r| r.covering_time.unwrap() >= r.t_first));
        assert!(o.records.iter().all(|r| r.length == 6 + 2 * r.backsteps));
    }

    #[test]
    fn btp_zero_violations_and_cap() {
        let cfg = ExperimentConfig { command: Command::Btp, n: 3, trials: 500, ..Default::default() };
        let o = run_btp(&cfg, RunOptions::default()).unwrap();
        assert_eq!(o.summary.get("violations").unwrap().mean, 0.0);
        let capped = ExperimentConfig { max_particles: 10, n: 8, horizon: Some(2.0), ..cfg };
        assert!(run_btp(&capped, RunOptions::default()).unwrap_err().is_resource_cap());
    }

    #[test]
    fn analytic_table() {
        let cfg = ExperimentConfig { command: Command::Analytic, n: 4, ..Default::default() };
        let s = run_analytic(&cfg).unwrap();
        assert!((s.get("log_m_one").unwrap().mean).abs() < 1e-12);
        let degenerate = ExperimentConfig { horizon: Some(2.0), ..cfg };
        assert!(run_analytic(&degenerate).unwrap().get("success_lower_bound").unwrap().mean.is_nan());
    }
}
