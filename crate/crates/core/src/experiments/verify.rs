//! Release gate: every pathwise invariant and analytic identity in one report.

use serde::Serialize;

use super::config::ExperimentConfig;
use super::runner::{par_trials, RunOptions};
use crate::analytic::identities::{
    convolution_residual, log_sinh_bound_gap, master_equation_residual, second_derivative_residual, tenths,
};
use crate::analytic::oracle::{a_brute_force, ab_brute_force, DEFAULT_PANELS};
use crate::analytic::{a_expected, ab_expected, bound_from, theta};
use crate::btp::{self, check_invariants, Caps};
use crate::error::Result;
use crate::fpp::{brute_force_oracle, first_passage, geodesic_stats, shortest_paths, WeightModel, WeightScheme};
use crate::hypercube::{edge_from_index, edge_index, neighbors, Dimension, EdgeRef, Vertex};
use crate::rng::{derive_seed, trial_rng, Stream};
use crate::walks::{sample_conditioned_walk, walk_stats};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    fn add(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.to_string(), passed, detail: detail.into() });
    }

    fn add_result(&mut self, name: &str, r: Result<(bool, String)>) {
        match r {
            Ok((ok, detail)) => self.add(name, ok, detail),
            Err(e) => self.add(name, false, format!("error: {e}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct VerifyOptions {
    /// Plant a negative edge weight next to 0̂; the suite must report it.
    pub inject_negative_weight: bool,
}

fn hypercube_checks(r: &mut VerifyReport) {
    let mut ok = true;
    for n in 1..=12 {
        let d = Dimension::new(n).expect("in range");
        let mut seen = vec![false; d.edge_count() as usize];
        for idx in 0..d.edge_count() {
            let e = edge_from_index(idx, d).expect("in range");
            ok &= edge_index(e, d) == Ok(idx);
            ok &= !std::mem::replace(&mut seen[idx as usize], true);
        }
        for v in 0..d.vertex_count() as Vertex {
            for (i, w) in neighbors(v, d).enumerate() {
                ok &= v.count_ones().abs_diff(w.count_ones()) == 1;
                ok &= neighbors(w, d).nth(i) == Some(v);
            }
        }
    }
    r.add("hypercube: edge index bijection, adjacency, involution (n <= 12)", ok, "");
}

fn analytic_checks(r: &mut VerifyReport, cfg: &ExperimentConfig) {
    let grid = tenths();
    r.add_result(
        "analytic: master equation residual <= 1e-6",
        (1..=8)
            .try_fold(0.0f64, |m, n| Ok(m.max(master_equation_residual(n, &grid)?)))
            .map(|e| (e <= 1e-6, format!("max {e:.3e}"))),
    );
    r.add_result(
        "analytic: second-derivative identity <= 1e-6 (n <= 6)",
        (1..=6)
            .try_fold(0.0f64, |m, n| Ok(m.max(second_derivative_residual(n, &grid)?)))
            .map(|e| (e <= 1e-6, format!("max {e:.3e}"))),
    );
    r.add_result(
        "analytic: convolution identity < 1e-10 (n <= 4)",
        (1..=4)
            .try_fold(0.0f64, |m, n| Ok(m.max(convolution_residual(n, &grid)?)))
            .map(|e| (e < 1e-10, format!("max relative error {e:.3e}"))),
    );
    let gap = log_sinh_bound_gap(10_000);
    r.add("analytic: ln sinh(theta - t) <= -sqrt(2) t", gap <= 4.0 * f64::EPSILON, format!("max gap {gap:.3e}"));
    let acfg = cfg.analytic();
    let th = theta();
    r.add_result(
        "analytic: reduced forms match brute force (n <= 3, rel 1e-4)",
        (1..=3).try_fold((true, String::new()), |(ok, mut s), n| {
            let a = a_expected(n, th, &acfg)?.value;
            let ab = ab_expected(n, th, &acfg)?.value;
            let ba = a_brute_force(n, th, DEFAULT_PANELS)?;
            let bab = ab_brute_force(n, th, DEFAULT_PANELS)?;
            let ea = (a - ba).abs() / ba;
            let eab = (ab - bab).abs() / bab;
            s += &format!("n={n}: {ea:.1e} {eab:.1e}; ");
            Ok((ok && ea < 1e-4 && eab < 1e-4, s))
        }),
    );
    let mono = (1..400).all(|i| {
        let x = i as f64 * 0.005;
        bound_from(x, 2.5) <= bound_from(x + 0.005, 2.5)
    });
    r.add("analytic: success bound monotone in S", mono, "");
}

fn fpp_checks(r: &mut VerifyReport, cfg: &ExperimentConfig, opts: VerifyOptions) {
    let base = cfg.seed;
    r.add_result(
        "fpp: search equals simple-path enumeration (n <= 3)",
        (1..=3)
            .try_fold((true, 0u64), |(ok, count), n| {
                let d = Dimension::new(n)?;
                let mut ok = ok;
                for i in 0..200 {
                    let m = WeightModel::new(derive_seed(base, Stream::Verify, i), d, WeightScheme::Derived)?;
                    ok &= first_passage(&m, d.one(), false, false)?.t_first == brute_force_oracle(&m)?;
                }
                Ok((ok, count + 200))
            })
            .map(|(ok, c)| (ok, format!("{c} weight draws"))),
    );
    let metric = |seed: u64, n: u32| -> Result<(bool, String)> {
        let d = Dimension::new(n)?;
        let mut m = WeightModel::new(seed, d, WeightScheme::Derived)?;
        if opts.inject_negative_weight {
            m.set_weight(EdgeRef::new(0, 0)?, -1.0);
        }
        let from0 = shortest_paths(&m, 0, None)?;
        let from1 = shortest_paths(&m, d.one(), None)?;
        let mut ok = true;
        for v in 0..d.vertex_count() as Vertex {
            for i in 0..n {
                let len = m.weight(EdgeRef::from_vertex(v, i));
                ok &= len > 0.0 && from0.dist[(v ^ (1 << i)) as usize] <= from0.dist[v as usize] + len;
            }
        }
        let a = from0.dist[d.one() as usize];
        ok &= (a - from1.dist[0]).abs() <= 1e-12 * a;
        let p = first_passage(&m, d.one(), true, true)?;
        let g = geodesic_stats(&p)?;
        ok &= g.length == n + 2 * g.backsteps && g.per_direction_steps.iter().all(|c| c % 2 == 1);
        ok &= p.covering_time.is_some_and(|c| c >= p.t_first) && p.t_first > 0.0;
        Ok((ok, String::new()))
    };
    r.add_result(
        "fpp: triangle inequality, symmetric metric, parity, covering >= T (n = 10)",
        (0..5).try_fold((true, String::new()), |(ok, s), i| {
            let (o, _) = metric(derive_seed(base, Stream::Verify, 1000 + i), 10)?;
            Ok((ok && o, s))
        }),
    );
}

fn btp_checks(r: &mut VerifyReport, cfg: &ExperimentConfig, run: RunOptions) {
    let n = Dimension::new(3).expect("in range");
    let h = theta() + 0.5;
    let runs = cfg.trials;
    let res = par_trials(runs, run, |i| {
        let sim = btp::simulate(n, h, 0, derive_seed(cfg.seed, Stream::Btp, i), Caps::default())?;
        Ok(check_invariants(&sim))
    });
    r.add_result(
        "btp: coupling invariants (n = 3)",
        res.map(|all| {
            let bad: Vec<String> = all.into_iter().flatten().collect();
            let detail = format!(
                "{runs} runs, {} violations{}",
                bad.len(),
                bad.first().map(|b| format!(": {b}")).unwrap_or_default()
            );
            (bad.is_empty(), detail)
        }),
    );
}

fn walk_checks(r: &mut VerifyReport, cfg: &ExperimentConfig) {
    let mut rng = trial_rng(cfg.seed, Stream::Verify, 7);
    let res = (0..1000).try_fold(true, |ok, _| {
        let w = sample_conditioned_walk(5, theta(), &mut rng)?;
        let s = walk_stats(&w);
        Ok::<_, crate::Error>(
            ok && w.ends_at_one() && w.events.windows(2).all(|p| p[0].0 < p[1].0) && s.length == 5 + 2 * s.backsteps,
        )
    });
    r.add_result("walks: endpoint 1, strict event order, parity", res.map(|ok| (ok, String::new())));
}

/// Runs the full suite. `cfg.trials` sets the number of BTP runs checked.
pub fn run_verify(cfg: &ExperimentConfig, run: RunOptions, opts: VerifyOptions) -> VerifyReport {
    let mut r = VerifyReport::default();
    if let Err(e) = cfg.validate() {
        r.add("config", false, e.to_string());
        return r;
    }
    hypercube_checks(&mut r);
    analytic_checks(&mut r, cfg);
    fpp_checks(&mut r, cfg, opts);
    btp_checks(&mut r, cfg, run);
    walk_checks(&mut r, cfg);
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_run_passes_and_fault_is_caught() {
        let cfg = ExperimentConfig { trials: 200, ..Default::default() };
        let ok = run_verify(&cfg, RunOptions::default(), VerifyOptions::default());
        assert!(ok.passed(), "{:?}", ok.failures().collect::<Vec<_>>());
        let bad = run_verify(&cfg, RunOptions::default(), VerifyOptions { inject_negative_weight: true });
        assert!(!bad.passed());
        assert!(bad.failures().any(|c| c.detail.contains("invalid passage time")));
    }
}
