//! Oracle checks, sized by the caller. `fdjam verify` runs them at quick
//! sizes; the acceptance suite runs them at full size.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use fdjam_core::colluding::{opt_jam, worst_location};
use fdjam_core::colluding_fading::{cdf_lower_bound, cond_prob_zero, decreasing_prob_lower_bound, uncond_prob_zero};
use fdjam_core::geometry::{gains, region4_containment_threshold, rho_disk, rho_margin};
use fdjam_core::montecarlo::{derive_seed, ecdf, estimate_with, ChunkRunner, ExpSampler, McConfig, Sequential};
use fdjam_core::pairwise::{deriv_asymptote, deriv_x_axis, origin_extremum, pair_hypotheses_hold, secrecy_pair, Extremum};
use fdjam_core::pairwise_fading::{
    cond_prob_samples, cond_prob_zero_pair, ln_cond_prob_zero_pair, p1, p1_bound, p2_excess, pj_star, policy_prob_zero,
    prob_zero_nojam, JamPolicy, PairFading,
};
use fdjam_core::{from_db, to_db, EveLocation, LinkGains, SystemParams};

use crate::error::{usage, Result};
use crate::export::{read, write, Format};
use crate::grid::{field, FieldRequest, GridSpec, Mode, Quantity};
use crate::oracle::{
    binomial_sigma, central_difference, colluding_mc, colluding_secrecy, opt_jam_oracle, pair_mc,
    pair_mc_unconditional, pair_wedge,
};
use crate::parallel::{with_threads, Parallel};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl Check {
    pub fn line(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        format!("{verdict} {} ({:.3} s): {}", self.name, self.elapsed.as_secs_f64(), self.detail)
    }
}

fn timed<F: FnOnce() -> Result<(bool, String)>>(name: &str, f: F) -> Check {
    let start = Instant::now();
    let (passed, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
    Check {
        name: name.to_string(),
        passed,
        detail,
        elapsed: start.elapsed(),
    }
}

/// Random test inputs from the crate's own generator.
struct Draw(ExpSampler);

impl Draw {
    fn new(seed: u64) -> Self {
        Draw(ExpSampler::new(seed, 0))
    }

    fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.0.uniform()
    }

    fn log_uniform(&mut self, lo_exp: f64, hi_exp: f64) -> f64 {
        10f64.powf(self.uniform(lo_exp, hi_exp))
    }

    fn exp(&mut self) -> f64 {
        self.0.exp().max(1e-12)
    }

    /// A location in `[-2, 2]^2` at least `margin` from both nodes.
    fn location(&mut self, margin: f64) -> EveLocation {
        loop {
            let loc = EveLocation::new(self.uniform(-2.0, 2.0), self.uniform(-2.0, 2.0));
            if loc.distance_to_alice() >= margin && loc.distance_to_bob() >= margin {
                return loc;
            }
        }
    }
}

pub const SUITES: &[&str] = &[
    "geometry",
    "colluding",
    "colluding-fading",
    "pairwise",
    "pairwise-fading",
    "montecarlo",
    "export",
];

pub fn region4_threshold() -> Check {
    timed("region-4 containment threshold", || {
        let v = region4_containment_threshold(0.1, 2.0)?;
        let db = to_db(v);
        let ok = (v - 0.008264).abs() < 5e-7 && (db + 20.8).abs() < 0.05;
        Ok((ok, format!("rho = {v:.6} ({db:.2} dB), want 0.008264 (-20.8 dB)")))
    })
}

pub fn disk_matches_margin(n: usize, seed: u64) -> Check {
    timed("rho-disk membership equals the sign of b - rho a", || {
        let mut d = Draw::new(seed);
        let mut bad = 0;
        let mut used = 0;
        for _ in 0..n {
            let loc = d.location(1e-3);
            let (rho, al) = (d.log_uniform(-3.0, -0.01), d.uniform(2.0, 5.0));
            let g = gains(loc, al).gains;
            let m = rho_margin(g, rho);
            if m.abs() <= 1e-9 * g.b.max(rho * g.a) {
                continue;
            }
            used += 1;
            bad += (rho_disk(rho, al)?.in_r_rho(loc) != (m > 0.0)) as usize;
        }
        Ok((bad == 0, format!("{bad} disagreements in {used} points")))
    })
}

pub fn opt_jam_vs_oracle(n: usize, seed: u64) -> Check {
    timed("optimal jamming power vs grid + golden-section oracle", || {
        let mut d = Draw::new(seed);
        let mut counts = [0usize; 4];
        let mut failures = 0;
        let mut first_failure = String::new();
        for _ in 0..n {
            let (a, b) = (d.log_uniform(-2.0, 2.0), d.log_uniform(-2.0, 2.0));
            let (rho, p_t) = (d.log_uniform(-3.0, 0.0), d.log_uniform(-1.0, 4.0));
            let g = LinkGains::new(a, b);
            let cf = opt_jam(g, rho, p_t)?;
            counts[cf.region.index() as usize - 1] += 1;
            let or = opt_jam_oracle(g, rho, p_t);
            let s_cf = colluding_secrecy(a, b, rho, p_t, cf.p_j_opt);
            let rel = (cf.p_j_opt - or.p_j).abs() / or.p_j.abs().max(f64::MIN_POSITIVE);
            let ok = rel <= 1e-6 || (s_cf - or.secrecy).abs() <= 1e-10;
            if !ok {
                failures += 1;
                if first_failure.is_empty() {
                    first_failure = format!(
                        "; first: a={a} b={b} rho={rho} P_T={p_t}: {} vs {} (S {s_cf} vs {})",
                        cf.p_j_opt, or.p_j, or.secrecy
                    );
                }
            }
        }
        let spans = counts[0] > 0 && counts[1] > 0 && counts[2] > 0;
        Ok((
            failures == 0 && spans,
            format!(
                "{failures}/{n} mismatches; regions R1..R4 = {counts:?}{first_failure}"
            ),
        ))
    })
}

pub fn worst_location_grid(delta: f64, alpha: f64, rho: f64, p_t: f64, spec: &GridSpec) -> Check {
    let name = format!("worst location (Delta={delta}, alpha={alpha}, rho={rho}, P_T={p_t:e})");
    timed(&name, || {
        let p = SystemParams::new(p_t, 1.0, rho, alpha, delta)?;
        let p = p.with_p_j(p.auto_jam());
        let want = worst_location(&p)?;
        let req = FieldRequest {
            mode: Mode::Colluding,
            quantity: Quantity::Secrecy,
            fading: false,
            optimal_jamming: false,
            params: p,
            seed: None,
        };
        let grid = field(&req, spec)?;
        let (loc, v) = grid
            .argmin_where(|l| l.distance_to_alice() >= delta * (1.0 - 1e-9))
            .ok_or_else(|| usage("empty grid"))?;
        let tol = spec.step * (1.0 + 1e-9);
        let ok = (loc.x - want.x).abs() <= tol && (loc.y - want.y).abs() <= tol;
        Ok((ok, format!("argmin ({:.4}, {:.4}) S={v:.6}, want ({}, {})", loc.x, loc.y, want.x, want.y)))
    })
}

pub fn colluding_fading_vs_mc<C: ChunkRunner>(n_sets: usize, n_samples: usize, seed: u64, runner: &C) -> Check {
    timed("colluding fading closed form vs raw-SNR Monte Carlo", || {
        let mut d = Draw::new(seed);
        let mut worst = 0.0f64;
        let mut failures = 0;
        for k in 0..n_sets {
            let loc = d.location(0.05);
            let al = d.uniform(2.0, 4.0);
            let p = SystemParams::new(d.log_uniform(0.0, 6.0), d.log_uniform(-2.0, 5.0), d.log_uniform(-3.0, 0.0), al, 0.1)?;
            let (at, bt) = (d.log_uniform(-1.0, 0.5), d.log_uniform(-1.0, 0.5));
            let g = gains(loc, al).gains;
            let closed = cond_prob_zero(g, &p, at, bt);
            let mc = colluding_mc(g, &p, at, bt, McConfig::new(derive_seed(seed, k as u64), n_samples), runner)?;
            let sigma = binomial_sigma(closed, n_samples);
            let dev = (mc.mean - closed).abs();
            if dev > 3.0 * sigma {
                failures += 1;
            }
            if sigma > 0.0 {
                worst = worst.max(dev / sigma);
            } else if dev > 0.0 {
                worst = f64::INFINITY;
            }
        }
        Ok((
            failures == 0,
            format!("{failures}/{n_sets} sets outside 3 sigma; largest deviation {worst:.2} sigma"),
        ))
    })
}

pub fn headline_bound() -> Check {
    timed("decreasing-probability bound at (-0.6, 0), eta = 1.01", || {
        let (a, b) = (100.0, 1.0 / 1.21);
        let rho = b / (1.01 * a);
        let r = decreasing_prob_lower_bound(a, b, rho)?;
        let tiny = (-100.0f64).exp() * (101.0 - 100.0 * (-1.0f64).exp());
        let ok = (r.complement - 2.3e-42).abs() <= 0.2e-42 && ((r.complement - tiny) / tiny).abs() < 1e-10;
        Ok((ok, format!("1 - {:.4e} (analytic 1 - {tiny:.4e})", r.complement)))
    })
}

pub fn unconditional_at_worst<C: ChunkRunner>(n_outer: usize, seed: u64, runner: &C) -> Check {
    timed("unconditional zero-secrecy probability at (-0.6, 0)", || {
        let g = gains(EveLocation::new(-0.6, 0.0), 2.0).gains;
        let rho = g.b / (1.01 * g.a);
        let mut ok = true;
        let mut detail = String::new();
        for db in [40.0, 50.0, 60.0] {
            let p = SystemParams::new(1e6, from_db(db), rho, 2.0, 0.1)?;
            let r = uncond_prob_zero(g, &p, McConfig::new(seed, n_outer), runner)?;
            let good = (r.prob.mean - 0.5).abs() <= 0.05 && r.prob.mean < r.upper_bound.mean;
            ok &= good;
            let _ = write!(
                detail,
                "P_J={db} dB: {:.4} +- {:.4} (bound {:.4}); ",
                r.prob.mean, r.prob.stderr, r.upper_bound.mean
            );
        }
        Ok((ok, detail.trim_end_matches("; ").to_string()))
    })
}

const CDF_LEVELS: [f64; 19] = [
    0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.45, 0.50, 0.55, 0.60, 0.65, 0.70, 0.75, 0.80, 0.85, 0.90, 0.95,
];

/// Empirical CDF of `P(S_AB = 0 | Ã, B̃)` at (-0.6, 0) with its closed-form bound.
pub fn cdf_table<C: ChunkRunner>(p_j: f64, rho: f64, n: usize, seed: u64, runner: &C) -> Result<Vec<(f64, f64, f64)>> {
    let g = gains(EveLocation::new(-0.6, 0.0), 2.0).gains;
    let p = SystemParams::new(1e6, p_j, rho, 2.0, 0.1)?;
    let values = fdjam_core::montecarlo::sample_values(McConfig::new(seed, n), runner, move |s| {
        cond_prob_zero(g, &p, s.exp(), s.exp())
    })?;
    let pts = ecdf(&values, &CDF_LEVELS)?;
    pts.iter()
        .map(|pt| Ok((pt.t, pt.cdf, cdf_lower_bound(pt.t, g.a, g.b, rho, p_j)?)))
        .collect()
}

pub fn cdf_bound<C: ChunkRunner>(n: usize, seed: u64, runner: &C) -> Check {
    timed("empirical CDF vs closed-form lower bound at (-0.6, 0)", || {
        let rho = 0.01;
        let mut ok = true;
        let mut detail = String::new();
        for db in [20.0, 30.0, 40.0] {
            let rows = cdf_table(from_db(db), rho, n, seed, runner)?;
            let slack = rows
                .iter()
                .map(|&(_, emp, bound)| (emp - bound) / binomial_sigma(bound, n).max(1.0 / n as f64))
                .fold(f64::INFINITY, f64::min);
            ok &= slack >= -3.0;
            let _ = write!(detail, "P_J={db} dB min (emp - bound) = {slack:.2} sigma; ");
        }
        let rows = cdf_table(f64::INFINITY, rho, n, seed, runner)?;
        let worst = rows
            .iter()
            .map(|&(_, emp, exact)| (emp - exact).abs() / binomial_sigma(exact, n))
            .fold(0.0, f64::max);
        ok &= worst <= 3.0;
        let _ = write!(detail, "P_J=inf max |emp - exact| = {worst:.2} sigma");
        Ok((ok, detail))
    })
}

pub fn pair_nojam<C: ChunkRunner>(n: usize, seed: u64, runner: &C) -> Check {
    timed("pairwise zero-secrecy probability without jamming", || {
        let mut ok = true;
        let mut detail = String::new();
        let cases = [
            (EveLocation::ORIGIN, 2.0, 2.0 / 3.0),
            (EveLocation::ORIGIN, 3.0, 1.0 / (1.0 + 0.25)),
            (EveLocation::BOB, 2.0, 0.5),
            (EveLocation::ALICE, 2.0, 0.5),
        ];
        for (k, (loc, al, want)) in cases.into_iter().enumerate() {
            let g = gains(loc, al).gains;
            let closed = prob_zero_nojam(g);
            let p = SystemParams::new(1e3, 0.0, 0.1, al, 0.1)?;
            let mc = pair_mc_unconditional(g, &p, McConfig::new(derive_seed(seed, k as u64), n), runner)?;
            let z = (mc.mean - closed).abs() / binomial_sigma(closed, n);
            let good = (closed - want).abs() < 1e-12 && z <= 3.0;
            ok &= good;
            let _ = write!(detail, "({}, {}) alpha={al}: {closed:.4} mc {:.4} ({z:.2} sigma); ", loc.x, loc.y, mc.mean);
        }
        Ok((ok, detail.trim_end_matches("; ").to_string()))
    })
}

pub fn pair_fading_vs_oracles<C: ChunkRunner>(n_sets: usize, n_samples: usize, seed: u64, runner: &C) -> Check {
    timed("pairwise fading closed form vs wedge quadrature and Monte Carlo", || {
        let mut d = Draw::new(seed);
        let (mut quad_worst, mut z_worst) = (0.0f64, 0.0f64);
        let (mut quad_fail, mut mc_fail, mut near_gate) = (0, 0, 0);
        for k in 0..n_sets {
            let loc = d.location(0.05);
            let al = d.uniform(2.0, 4.0);
            let rho = d.log_uniform(-3.0, -0.3);
            let f = PairFading {
                a_tilde: d.exp(),
                b1_tilde: d.exp(),
                b2_tilde: d.exp(),
            };
            let p_j = match (k % 4, pj_star(f, rho)) {
                (0, _) => 0.0,
                (3, Some(star)) => {
                    near_gate += 1;
                    star * (1.0 - d.log_uniform(-4.0, -1.0))
                }
                _ => d.log_uniform(-2.0, 4.0),
            };
            let p = SystemParams::new(d.log_uniform(0.0, 6.0), p_j, rho, al, 0.1)?;
            let g = gains(loc, al).gains;
            let closed = cond_prob_zero_pair(g, &p, f);
            let quad = pair_wedge(g, &p, f);
            let dq = (closed - quad).abs();
            quad_worst = quad_worst.max(dq);
            quad_fail += (dq > 1e-4) as usize;
            let mc = pair_mc(g, &p, f, McConfig::new(derive_seed(seed, k as u64), n_samples), runner)?;
            let sigma = binomial_sigma(closed, n_samples);
            let dev = (mc.mean - closed).abs();
            mc_fail += (dev > 3.0 * sigma) as usize;
            if sigma > 0.0 {
                z_worst = z_worst.max(dev / sigma);
            } else if dev > 0.0 {
                z_worst = f64::INFINITY;
            }
        }
        Ok((
            quad_fail == 0 && mc_fail == 0 && near_gate > 0,
            format!(
                "quadrature: {quad_fail}/{n_sets} off by > 1e-4 (worst {quad_worst:.2e}); \
                 Monte Carlo: {mc_fail}/{n_sets} outside 3 sigma (worst {z_worst:.2}); {near_gate} sets near the gate"
            ),
        ))
    })
}

pub fn pj_star_gate(n: usize, seed: u64) -> Check {
    timed("conditional probability vanishes exactly from P_J*", || {
        let mut d = Draw::new(seed);
        let (mut zero_fail, mut pos_fail, mut done) = (0, 0, 0);
        while done < n {
            let rho = d.log_uniform(-3.0, 0.0);
            let f = PairFading {
                a_tilde: d.exp(),
                b1_tilde: d.exp(),
                b2_tilde: d.exp(),
            };
            let Some(star) = pj_star(f, rho) else { continue };
            let al = d.uniform(2.0, 4.0);
            let g = gains(d.location(0.05), al).gains;
            let p = SystemParams::new(d.log_uniform(0.0, 6.0), star, rho, al, 0.1)?;
            zero_fail += (cond_prob_zero_pair(g, &p.with_p_j(star * 1.001), f) != 0.0) as usize;
            pos_fail += !ln_cond_prob_zero_pair(g, &p.with_p_j(star * 0.999), f).is_finite() as usize;
            done += 1;
        }
        Ok((
            zero_fail == 0 && pos_fail == 0,
            format!("{n} triples: {zero_fail} nonzero above P_J*, {pos_fail} not positive below"),
        ))
    })
}

/// Zero-secrecy probabilities of the semi-dynamic and constant policies
/// over a jamming-power ladder, next to `P1`, `P2` and `pi rho / 4`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyRow {
    pub rho: f64,
    pub p_j_db: f64,
    pub location: EveLocation,
    pub semi: f64,
    pub constant: f64,
    pub p1: f64,
    pub p2: f64,
    pub bound: f64,
}

pub const POLICY_LADDER_DB: [f64; 7] = [0.0, 10.0, 20.0, 30.0, 40.0, 50.0, 60.0];

pub fn policy_rows<C: ChunkRunner>(rho: f64, n: usize, seed: u64, runner: &C) -> Result<Vec<PolicyRow>> {
    let mut rows = Vec::new();
    let prob1 = p1(rho);
    for loc in [EveLocation::ORIGIN, EveLocation::new(-0.6, 0.0)] {
        let g = gains(loc, 2.0).gains;
        for db in POLICY_LADDER_DB {
            let p = SystemParams::new(1e6, from_db(db), rho, 2.0, 0.1)?;
            let mc = McConfig::new(seed, n);
            let semi = policy_prob_zero(JamPolicy::SemiDynamic, g, &p, mc, runner)?;
            let constant = policy_prob_zero(JamPolicy::Constant, g, &p, mc, runner)?;
            rows.push(PolicyRow {
                rho,
                p_j_db: db,
                location: loc,
                semi: semi.prob.mean,
                constant: constant.prob.mean,
                p1: prob1,
                p2: prob1 + p2_excess(rho, p.p_j),
                bound: p1_bound(rho),
            });
        }
    }
    Ok(rows)
}

pub fn policy_table(rows: &[PolicyRow]) -> String {
    let mut out = String::from("rho,p_j_db,x,y,semi_dynamic,constant,p1,p2,pi_rho_over_4\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e}",
            r.rho, r.p_j_db, r.location.x, r.location.y, r.semi, r.constant, r.p1, r.p2, r.bound
        );
    }
    out
}

pub fn policy_bounds<C: ChunkRunner>(n: usize, seed: u64, runner: &C) -> (Check, String) {
    let mut table = String::new();
    let check = timed("semi-dynamic < P1 < pi rho / 4 and P2 -> P1 along the ladder", || {
        let mut ok = true;
        let mut detail = String::new();
        let mut rows_all = Vec::new();
        for rho in [0.1, 0.01] {
            let rows = policy_rows(rho, n, seed, runner)?;
            let prob1 = p1(rho);
            ok &= prob1 < p1_bound(rho);
            ok &= rows.iter().all(|r| r.semi < r.p1);
            let gaps: Vec<f64> = POLICY_LADDER_DB.iter().map(|&db| p2_excess(rho, from_db(db))).collect();
            ok &= gaps.iter().all(|&g| g > 0.0);
            ok &= gaps.windows(2).all(|w| w[1] <= w[0]);
            ok &= gaps[gaps.len() - 1] < 1e-2 * gaps[0];
            let semi_max = rows.iter().map(|r| r.semi).fold(0.0, f64::max);
            let _ = write!(
                detail,
                "rho={rho}: semi max {semi_max:.3e} < P1 {prob1:.5e} < {:.5e}; P2-P1 {:.2e} -> {:.2e}; ",
                p1_bound(rho),
                gaps[0],
                gaps[gaps.len() - 1]
            );
            rows_all.extend(rows);
        }
        table = policy_table(&rows_all);
        Ok((ok, detail.trim_end_matches("; ").to_string()))
    });
    (check, table)
}

/// Mean and spread of the pairwise field over `Delta < d_A, d_B < 1` at
/// `rho = 0.01`, `P_J = sqrt(P_T / rho)`.
pub fn near_field(p_t_db: f64, spec: &GridSpec) -> Check {
    timed(&format!("constant near-field secrecy at P_T = {p_t_db} dB"), || {
        let p = SystemParams::new(from_db(p_t_db), 1.0, 0.01, 2.0, 0.1)?;
        let p = p.with_p_j(p.auto_jam());
        let req = FieldRequest {
            mode: Mode::Pairwise,
            quantity: Quantity::Secrecy,
            fading: false,
            optimal_jamming: false,
            params: p,
            seed: None,
        };
        let grid = field(&req, spec)?;
        let inside = |l: EveLocation| {
            let (da, db) = (l.distance_to_alice(), l.distance_to_bob());
            da > p.delta && da < 1.0 && db > p.delta && db < 1.0
        };
        let vals: Vec<(EveLocation, f64)> = grid.cells().filter(|(l, _)| inside(*l)).collect();
        let mean = vals.iter().map(|c| c.1).sum::<f64>() / vals.len() as f64;
        let (lo, hi) = (grid.argmin_where(inside).unwrap(), grid.argmax_where(inside).unwrap());
        let target = (1.0 / p.rho).log2();
        let ok = (mean - target).abs() <= 0.2 && hi.1 - lo.1 <= 0.3;
        Ok((
            ok,
            format!(
                "{} cells: mean {mean:.4} (target {target:.4}), max - min {:.4} (min {:.4} at ({:.2}, {:.2}))",
                vals.len(),
                hi.1 - lo.1,
                lo.1,
                lo.0.x,
                lo.0.y
            ),
        ))
    })
}

fn pair_s(x: f64, p: &SystemParams) -> f64 {
    secrecy_pair(gains(EveLocation::new(x, 0.0), p.alpha).gains, p).s
}

pub fn derivative_suite(n: usize, seed: u64) -> Vec<Check> {
    let fd = timed("x-axis derivative vs finite differences", || {
        let mut d = Draw::new(seed);
        let (mut checked, mut failures, mut worst) = (0, 0, 0.0f64);
        let mut tries = 0;
        while checked < n && tries < 1000 * n {
            tries += 1;
            let al = d.uniform(2.0, 4.0);
            let p = SystemParams::new(d.log_uniform(2.0, 5.0), d.log_uniform(2.0, 5.0), d.log_uniform(-5.0, -2.0), al, 0.1)?;
            let dist = d.uniform(0.2, 2.5);
            if (dist - 0.5).abs() < 0.05 || (dist - 1.0).abs() < 0.05 {
                continue;
            }
            let h = 1e-6;
            let x = dist - 0.5;
            let unclipped = [x - h, x + h]
                .iter()
                .all(|&xx| pair_hypotheses_hold(gains(EveLocation::new(xx, 0.0), al).gains, &p));
            let Ok(v) = deriv_x_axis(dist, &p) else { continue };
            if !unclipped {
                continue;
            }
            let fd = central_difference(|xx| pair_s(xx, &p), x, h);
            let rel = ((v - fd) / fd).abs();
            worst = worst.max(rel);
            failures += (rel > 1e-4) as usize;
            checked += 1;
        }
        Ok((
            failures == 0 && checked == n,
            format!("{failures}/{checked} above 1e-4 relative; worst {worst:.2e}"),
        ))
    });
    let asym = timed("x-axis derivative asymptote near Bob", || {
        let p = SystemParams::new(1e6, 1e7, 1e-9, 2.0, 0.1)?;
        let x = 0.5 - 1e-3;
        let v = deriv_x_axis(x + 0.5, &p)?;
        let want = deriv_asymptote(x, p.alpha);
        let rel = ((v - want) / want).abs();
        Ok((rel <= 0.05, format!("{v:.3} vs {want:.3} ({:.2}%)", 100.0 * rel)))
    });
    let ext = timed("origin extremum classification vs sampling", || {
        let mut d = Draw::new(seed ^ 0x5eed);
        let (mut checked, mut failures, mut tries) = (0, 0, 0);
        while checked < n && tries < 1000 * n {
            tries += 1;
            let al = d.uniform(2.0, 4.0);
            let p = SystemParams::new(d.log_uniform(0.0, 5.0), d.log_uniform(-0.5, 3.0), d.log_uniform(-4.0, -1.0), al, 0.1)?;
            let Ok(class) = origin_extremum(&p) else { continue };
            let h = 1e-3;
            if !pair_hypotheses_hold(gains(EveLocation::new(h, 0.0), al).gains, &p) {
                continue;
            }
            let c = pair_s(0.0, &p);
            let (d1, d2) = (pair_s(h, &p) - c, pair_s(h / 2.0, &p) - c);
            // too flat to read a sign at these steps
            if d1.signum() != d2.signum() || d2.abs() < 1e-12 * c.abs().max(1.0) {
                continue;
            }
            let sampled = if d1 < 0.0 { Extremum::LocalMax } else { Extremum::LocalMin };
            failures += (class != sampled) as usize;
            checked += 1;
        }
        Ok((
            failures == 0 && checked == n,
            format!("{failures}/{checked} disagree with sampling"),
        ))
    });
    vec![fd, asym, ext]
}

pub fn nojam_origin_tail<C: ChunkRunner>(n: usize, seed: u64, runner: &C) -> Check {
    timed("conditional probability mass below 1e-4 at the origin, P_J = 0 dB", || {
        let g = gains(EveLocation::ORIGIN, 2.0).gains;
        let p = SystemParams::new(1e6, 1.0, 0.1, 2.0, 0.1)?;
        let values = cond_prob_samples(g, &p, McConfig::new(seed, n), runner)?;
        let frac = values.iter().filter(|&&v| v < 1e-4).count() as f64 / values.len() as f64;
        Ok((frac >= 0.1, format!("{:.2}% of {n} draws below 1e-4", 100.0 * frac)))
    })
}

pub fn thread_independence(seed: u64) -> Check {
    timed("results independent of the thread count", || {
        let p = SystemParams::new(1e4, 100.0, 0.1, 2.0, 0.1)?;
        let req = FieldRequest {
            mode: Mode::Pairwise,
            quantity: Quantity::Secrecy,
            fading: true,
            optimal_jamming: false,
            params: p,
            seed: Some(seed),
        };
        let spec = GridSpec::new(-1.0, 1.0, -1.0, 1.0, 0.05)?;
        let one = with_threads(Some(1), || field(&req, &spec))??;
        let three = with_threads(Some(3), || field(&req, &spec))??;
        let mc = McConfig::new(seed, 200_000).with_chunk(4096);
        let seq = estimate_with(mc, &Sequential, |s| s.exp().sqrt())?;
        let par = with_threads(Some(3), || estimate_with(mc, &Parallel, |s| s.exp().sqrt()))??;
        let same = one.values.iter().zip(&three.values).all(|(a, b)| a.to_bits() == b.to_bits());
        Ok((same && seq == par, format!("field identical: {same}; estimate identical: {}", seq == par)))
    })
}

pub fn stderr_coverage(trials: usize, seed: u64) -> Check {
    timed("3-sigma coverage of the Exp(1) mean", || {
        let covered = (0..trials)
            .filter(|&k| {
                estimate_with(McConfig::new(derive_seed(seed, k as u64), 2000), &Sequential, |s| s.exp())
                    .map(|e| e.covers(1.0, 3.0))
                    .unwrap_or(false)
            })
            .count();
        let rate = covered as f64 / trials as f64;
        Ok((rate >= 0.98, format!("{covered}/{trials} intervals cover the mean")))
    })
}

pub fn export_round_trip(seed: u64) -> Check {
    timed("CSV and JSON round trips are bit-exact", || {
        let p = SystemParams::new(1e6, 1e4, 0.01, 2.0, 0.1)?;
        let req = FieldRequest {
            mode: Mode::Colluding,
            quantity: Quantity::Secrecy,
            fading: true,
            optimal_jamming: false,
            params: p,
            seed: Some(seed),
        };
        let grid = field(&req, &GridSpec::new(-1.0, 1.0, -0.5, 0.5, 0.05)?)?;
        let mut ok = true;
        for format in [Format::Csv, Format::Json] {
            let mut buf = Vec::new();
            write(&grid, format, &mut buf)?;
            let back = read(format, &buf[..])?;
            ok &= back.meta == grid.meta
                && back.spec == grid.spec
                && back.values.iter().zip(&grid.values).all(|(a, b)| a.to_bits() == b.to_bits());
        }
        Ok((ok, format!("{} cells", grid.values.len())))
    })
}

/// Runs one named suite, or every suite for `"all"`, at quick sizes.
pub fn run_suite(name: &str, seed: u64) -> Result<Vec<Check>> {
    let r = &Parallel;
    let small = GridSpec::new(-2.0, 2.0, -1.0, 1.0, 0.01)?;
    let checks = match name {
        "all" => {
            let mut all = Vec::new();
            for s in SUITES {
                all.extend(run_suite(s, seed)?);
            }
            return Ok(all);
        }
        "geometry" => vec![region4_threshold(), disk_matches_margin(20_000, seed)],
        "colluding" => vec![
            opt_jam_vs_oracle(1000, seed),
            worst_location_grid(0.1, 2.0, 0.005, 1e6, &small),
            worst_location_grid(0.25, 3.0, 0.005, 1e4, &small),
        ],
        "colluding-fading" => vec![
            colluding_fading_vs_mc(20, 100_000, seed, r),
            headline_bound(),
            unconditional_at_worst(20_000, seed, r),
            cdf_bound(20_000, seed, r),
        ],
        "pairwise" => {
            let mut v = derivative_suite(200, seed);
            v.push(near_field(80.0, &GridSpec::new(-0.5, 0.5, -0.5, 0.5, 0.01)?));
            v
        }
        "pairwise-fading" => vec![
            pair_nojam(100_000, seed, r),
            pair_fading_vs_oracles(20, 100_000, seed, r),
            pj_star_gate(1000, seed),
            policy_bounds(20_000, seed, r).0,
            nojam_origin_tail(10_000, seed, r),
        ],
        "montecarlo" => vec![thread_independence(seed), stderr_coverage(500, seed)],
        "export" => vec![export_round_trip(seed)],
        other => {
            return Err(usage(format!(
                "unknown suite `{other}` (expected all, {})",
                SUITES.join(", ")
            )))
        }
    };
    Ok(checks)
}
