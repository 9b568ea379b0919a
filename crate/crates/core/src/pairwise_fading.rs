//! Dual-phase zero-secrecy probabilities under Rayleigh fading, jamming
//! policies, and the location-invariant secrecy between the nodes.
//!
//! `Ã` (the Alice-Bob factor) is shared by both phases, `B̃1` and `B̃2` are
//! the receivers' self-interference factors in the two phases, and `C̃`, `D̃`
//! the Alice-Eve and Bob-Eve factors. Secrecy is zero iff
//! `C̃ >= v1 D̃ + v2` and `D̃ >= u1 C̃ + u2`.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use crate::error::{invalid, Result};
use crate::geometry::{LinkGains, SystemParams};
use crate::math;
use crate::montecarlo::{estimate_n, sample_values, Accumulator, ChunkRunner, Estimate, ExpSampler, McConfig};
use crate::pairwise::near_far_field;
use crate::quadrature::{ExpPairRule, GaussLegendre};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairFading {
    pub a_tilde: f64,
    pub b1_tilde: f64,
    pub b2_tilde: f64,
}

impl PairFading {
    pub const UNIT: PairFading = PairFading {
        a_tilde: 1.0,
        b1_tilde: 1.0,
        b2_tilde: 1.0,
    };

    pub fn sample(s: &mut ExpSampler) -> Self {
        PairFading {
            a_tilde: s.exp(),
            b1_tilde: s.exp(),
            b2_tilde: s.exp(),
        }
    }

    /// Whether a jamming power exists that zeroes the conditional probability.
    pub fn admits_pj_star(&self, rho: f64) -> bool {
        self.a_tilde * self.a_tilde > rho * rho * self.b1_tilde * self.b2_tilde
    }

    /// Whether `S = 0` for Eve factors `(c, d)`, from the faded SNRs directly.
    pub fn secrecy_is_zero(&self, g: LinkGains, params: &SystemParams, c: f64, d: f64) -> bool {
        let (pt, pj, rho) = (params.p_t, params.p_j, params.rho);
        let jam = |gain: f64, f: f64| if pj == 0.0 { 0.0 } else { gain * f * pj };
        let ab = self.a_tilde * pt / (1.0 + rho * self.b1_tilde * pj);
        let ba = self.a_tilde * pt / (1.0 + rho * self.b2_tilde * pj);
        let ae = g.a * c * pt / (1.0 + jam(g.b, d));
        let be = g.b * d * pt / (1.0 + jam(g.a, c));
        ae >= ab && be >= ba
    }
}

/// Quantities of the closed form `K e^-E` with `K = w1 / w2`, `E = w3 / w1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairTerms {
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
}

pub fn pair_terms(g: LinkGains, params: &SystemParams, f: PairFading) -> PairTerms {
    let (a, b, rho, pj) = (g.a, g.b, params.rho, params.p_j);
    let (at, b1, b2) = (f.a_tilde, f.b1_tilde, f.b2_tilde);
    let z1 = 1.0 + rho * b1 * pj;
    let z2 = 1.0 + rho * b2 * pj;
    PairTerms {
        w1: a * b * (z1 * z2 - at * at * pj * pj),
        w2: (a * at * pj + b * z2) * (b * at * pj + a * z1),
        w3: at * (a * z1 + b * z2 + b * at * pj + a * at * pj),
    }
}

/// `ln P(S = 0 | Ã, B̃1, B̃2)`; `-inf` when the probability is exactly zero.
///
/// Stays finite where the probability itself underflows.
pub fn ln_cond_prob_zero_pair(g: LinkGains, params: &SystemParams, f: PairFading) -> f64 {
    let pj = params.p_j;
    if pj == 0.0 {
        return -f.a_tilde * (1.0 / g.a + 1.0 / g.b);
    }
    if g.a.is_infinite() || g.b.is_infinite() {
        return f64::NEG_INFINITY;
    }
    if pj.is_infinite() {
        let (a, b, rho) = (g.a, g.b, params.rho);
        let (at, b1, b2) = (f.a_tilde, f.b1_tilde, f.b2_tilde);
        let num = a * b * (rho * rho * b1 * b2 - at * at);
        let den = (a * at + rho * b * b2) * (b * at + rho * a * b1);
        return if num > 0.0 { math::ln(num / den) } else { f64::NEG_INFINITY };
    }
    let t = pair_terms(g, params, f);
    if !(t.w1 > 1e-30 * t.w2) {
        return f64::NEG_INFINITY;
    }
    math::ln(t.w1 / t.w2) - t.w3 / t.w1
}

/// `P(S = 0 | Ã, B̃1, B̃2)`: `K e^-E` when `w1 > 0`, else zero.
pub fn cond_prob_zero_pair(g: LinkGains, params: &SystemParams, f: PairFading) -> f64 {
    math::exp(ln_cond_prob_zero_pair(g, params, f))
}

/// `P(S = 0)` without jamming: `1 / (1 + 1/a + 1/b)`.
pub fn prob_zero_nojam(g: LinkGains) -> f64 {
    let (a, b) = (g.a, g.b);
    if a.is_infinite() {
        return b / (1.0 + b);
    }
    if b.is_infinite() {
        return a / (1.0 + a);
    }
    a * b / (a * b + (a + b))
}

/// The maximum of [`prob_zero_nojam`] over all locations, attained at the origin.
pub fn prob_zero_nojam_max(alpha: f64) -> f64 {
    1.0 / (1.0 + math::powf(0.5, alpha - 1.0))
}

/// `P(S = 0)` for Eve sitting on either node.
pub fn eve_at_node_prob(p_j: f64) -> f64 {
    if p_j > 0.0 {
        0.0
    } else {
        0.5
    }
}

/// Smallest jamming power from which the conditional zero-secrecy
/// probability vanishes; `None` unless `Ã^2 > rho^2 B̃1 B̃2`.
pub fn pj_star(f: PairFading, rho: f64) -> Option<f64> {
    if !f.admits_pj_star(rho) {
        return None;
    }
    let s = rho * (f.b1_tilde + f.b2_tilde);
    let d = f.a_tilde * f.a_tilde - rho * rho * f.b1_tilde * f.b2_tilde;
    Some((s + math::sqrt(s * s + 4.0 * d)) / (2.0 * d))
}

/// `P(Ã^2 <= rho^2 B̃1 B̃2) = 1 - E[exp(-rho sqrt(B̃1 B̃2))]`.
pub fn p1(rho: f64) -> f64 {
    if rho == 0.0 {
        return 0.0;
    }
    // E[exp(-rho sqrt(UV))] = int_0^{pi/2} sin(t) / (1 + rho sin(t) / 2)^2 dt
    let rule = GaussLegendre::new(32);
    let mean = rule.integrate_composite(0.0, FRAC_PI_2, 8, |t| {
        let s = math::sin(t);
        let q = 1.0 + 0.5 * rho * s;
        s / (q * q)
    });
    1.0 - mean
}

/// `E[1 - exp(-w0)]` with `w0 = sqrt(rho^2 UV + (1 + rho (U + V) P_J) / P_J^2)`.
pub fn p2(rho: f64, p_j: f64) -> f64 {
    p1(rho) + p2_excess(rho, p_j)
}

/// `P2 - P1 = E[exp(-rho sqrt(UV)) - exp(-w0)]`, integrated directly so
/// the (positive) gap survives when both are close.
pub fn p2_excess(rho: f64, p_j: f64) -> f64 {
    if p_j.is_infinite() {
        return 0.0;
    }
    ExpPairRule::default().expect(|u, v| {
        let uv = u * v;
        let w0 = math::sqrt(rho * rho * uv + (1.0 + rho * (u + v) * p_j) / (p_j * p_j));
        math::exp(-rho * math::sqrt(uv)) - math::exp(-w0)
    })
}

/// `pi rho / 4`, the small-`rho` limit of [`p1`] and an upper bound on it.
pub fn p1_bound(rho: f64) -> f64 {
    FRAC_PI_4 * rho
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JamPolicy {
    /// Jam at `params.p_j` whatever the fading.
    Constant,
    /// Jam at `P_J*` when it exists, otherwise at `params.p_j`.
    SemiDynamic,
    /// Exchange keys only when `P_J*` exists, then jam at `P_J*`.
    FullDynamic,
    /// Exchange keys only when the conditional probability at `params.p_j`
    /// is at most `threshold`.
    GeneralDynamic { threshold: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicyReport {
    /// Zero-secrecy probability of the exchanged keys.
    pub prob: Estimate,
    /// Closed-form bound: `P1` (semi-dynamic), `P2` (constant), 0 (full
    /// dynamic) or the threshold (general dynamic).
    pub bound: f64,
    /// Probability that a fading draw is accepted for key exchange
    /// (always 1 for the constant and semi-dynamic policies).
    pub acceptance: Estimate,
}

pub fn policy_prob_zero<C: ChunkRunner>(
    policy: JamPolicy,
    g: LinkGains,
    params: &SystemParams,
    mc: McConfig,
    runner: &C,
) -> Result<PolicyReport> {
    mc.validate()?;
    let p = *params;
    let rho = p.rho;
    let always = Estimate {
        mean: 1.0,
        stderr: 0.0,
        n: mc.n_samples,
    };
    match policy {
        JamPolicy::Constant => {
            let [prob] = estimate_n(mc, runner, move |s| [cond_prob_zero_pair(g, &p, PairFading::sample(s))])?;
            Ok(PolicyReport {
                prob,
                bound: p2(rho, p.p_j),
                acceptance: always,
            })
        }
        JamPolicy::SemiDynamic => {
            let [prob] = estimate_n(mc, runner, move |s| {
                let f = PairFading::sample(s);
                [if f.admits_pj_star(rho) { 0.0 } else { cond_prob_zero_pair(g, &p, f) }]
            })?;
            Ok(PolicyReport {
                prob,
                bound: p1(rho),
                acceptance: always,
            })
        }
        JamPolicy::FullDynamic => {
            let [acceptance] = estimate_n(mc, runner, move |s| [PairFading::sample(s).admits_pj_star(rho) as u8 as f64])?;
            Ok(PolicyReport {
                prob: Estimate {
                    mean: 0.0,
                    stderr: 0.0,
                    n: mc.n_samples,
                },
                bound: 0.0,
                acceptance,
            })
        }
        JamPolicy::GeneralDynamic { threshold } => {
            if !(threshold > 0.0 && threshold < 1.0) {
                return Err(invalid("threshold", "must lie in (0, 1)"));
            }
            let values = sample_values(mc, runner, move |s| cond_prob_zero_pair(g, &p, PairFading::sample(s)))?;
            let mut accepted = Accumulator::default();
            let mut indicator = Accumulator::default();
            for &v in &values {
                let ok = v <= threshold;
                indicator.push(ok as u8 as f64);
                if ok {
                    accepted.push(v);
                }
            }
            Ok(PolicyReport {
                prob: accepted.estimate(),
                bound: threshold,
                acceptance: indicator.estimate(),
            })
        }
    }
}

/// Conditional zero-secrecy probabilities for `n` fading draws, in draw order.
pub fn cond_prob_samples<C: ChunkRunner>(
    g: LinkGains,
    params: &SystemParams,
    mc: McConfig,
    runner: &C,
) -> Result<Vec<f64>> {
    let p = *params;
    sample_values(mc, runner, move |s| cond_prob_zero_pair(g, &p, PairFading::sample(s)))
}

/// `log2(Ã / (rho sqrt(B̃1 B̃2)))` clipped at zero, without regime checks.
pub fn homogeneous_value(f: PairFading, rho: f64) -> f64 {
    math::log2(f.a_tilde / (rho * math::sqrt(f.b1_tilde * f.b2_tilde))).max(0.0)
}

/// The location-invariant near-field secrecy under fading; fails outside
/// the regime accepted by [`near_far_field`].
pub fn homogeneous_secrecy(f: PairFading, params: &SystemParams) -> Result<f64> {
    near_far_field(params)?;
    Ok(homogeneous_value(f, params.rho))
}

/// `2^s rho pi / 4`, an upper bound on `P(S <= s)` in the near field.
pub fn tail_bound(s: f64, rho: f64) -> f64 {
    math::powf(2.0, s) * p1_bound(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{gains, EveLocation};
    use crate::montecarlo::{estimate, Sequential};
    use crate::quadrature::ExpPairRule;

    fn params(p_j: f64, rho: f64) -> SystemParams {
        SystemParams::new(100.0, p_j, rho, 2.0, 0.1).unwrap()
    }

    #[test]
    fn no_jamming_form() {
        let g = LinkGains::new(4.0, 2.0);
        let f = PairFading {
            a_tilde: 0.7,
            b1_tilde: 1.3,
            b2_tilde: 0.2,
        };
        let v = cond_prob_zero_pair(g, &params(0.0, 0.1), f);
        assert!((v - (-0.7f64 * 6.0 / 8.0).exp()).abs() < 1e-15);
        let t = pair_terms(g, &params(0.0, 0.1), f);
        assert_eq!(t.w1, t.w2);
    }

    #[test]
    fn eve_at_nodes() {
        let f = PairFading::UNIT;
        let at_bob = LinkGains::new(1.0, f64::INFINITY);
        assert_eq!(cond_prob_zero_pair(at_bob, &params(1e-3, 0.1), f), 0.0);
        assert_eq!(eve_at_node_prob(1e-3), 0.0);
        assert_eq!(eve_at_node_prob(0.0), 0.5);
        assert_eq!(prob_zero_nojam(at_bob), 0.5);
    }

    #[test]
    fn closed_form_matches_raw_snr_monte_carlo() {
        let g = LinkGains::new(4.0, 4.0);
        let p = params(1.0, 0.1);
        let f = PairFading::UNIT;
        let closed = cond_prob_zero_pair(g, &p, f);
        let e = estimate(McConfig::new(8, 1_000_000), |s| f.secrecy_is_zero(g, &p, s.exp(), s.exp()) as u8 as f64).unwrap();
        assert!(e.covers(closed, 3.0), "{e:?} {closed}");
        assert!(closed > 0.0);
    }

    #[test]
    fn infinite_jamming_form() {
        let g = LinkGains::new(3.0, 0.7);
        let f = PairFading {
            a_tilde: 0.05,
            b1_tilde: 2.0,
            b2_tilde: 1.5,
        };
        let p = params(f64::INFINITY, 0.3);
        let lim = cond_prob_zero_pair(g, &p, f);
        let big = cond_prob_zero_pair(g, &p.with_p_j(1e9), f);
        assert!(lim > 0.0 && (lim - big).abs() < 1e-6, "{lim} {big}");
        let good = PairFading { a_tilde: 2.0, ..f };
        assert_eq!(cond_prob_zero_pair(g, &p, good), 0.0);
    }

    #[test]
    fn pj_star_examples() {
        let f = PairFading::UNIT;
        let v = pj_star(f, 0.1).unwrap();
        assert!((v - 1.111_111_111_111_111).abs() < 1e-12, "{v}");
        let z1 = 1.0 + 0.1 * v;
        assert!((z1 * z1 - v * v).abs() < 1e-12);
        let f = PairFading {
            a_tilde: 0.8,
            ..PairFading::UNIT
        };
        assert!((pj_star(f, 0.0).unwrap() - 1.25).abs() < 1e-15);
        let f = PairFading {
            a_tilde: 0.1,
            ..PairFading::UNIT
        };
        assert_eq!(pj_star(f, 0.1), None);
    }

    #[test]
    fn pj_star_gate() {
        let mut s = ExpSampler::new(12, 0);
        let g = gains(EveLocation::new(0.3, 0.2), 2.0).gains;
        let mut checked = 0;
        while checked < 1000 {
            let f = PairFading::sample(&mut s);
            let rho = 0.1;
            let Some(star) = pj_star(f, rho) else { continue };
            let p = params(star, rho);
            assert_eq!(cond_prob_zero_pair(g, &p.with_p_j(star * 1.001), f), 0.0);
            assert!(ln_cond_prob_zero_pair(g, &p.with_p_j(star * 0.999), f) > f64::NEG_INFINITY);
            checked += 1;
        }
    }

    #[test]
    fn nojam_examples() {
        let origin = gains(EveLocation::ORIGIN, 2.0).gains;
        assert!((prob_zero_nojam(origin) - 2.0 / 3.0).abs() < 1e-15);
        assert!((prob_zero_nojam_max(2.0) - 2.0 / 3.0).abs() < 1e-15);
        assert!(prob_zero_nojam(LinkGains::new(1e-12, 1e-12)) < 1e-11);
        for al in [2.0, 3.0, 4.0] {
            let o = prob_zero_nojam(gains(EveLocation::ORIGIN, al).gains);
            assert!((o - prob_zero_nojam_max(al)).abs() < 1e-15);
        }
    }

    #[test]
    fn nojam_maximised_at_origin() {
        let best = prob_zero_nojam_max(2.0);
        for i in 0..=200 {
            for j in 0..=200 {
                let (x, y) = (-2.0 + 0.02 * i as f64, -2.0 + 0.02 * j as f64);
                let v = prob_zero_nojam(gains(EveLocation::new(x, y), 2.0).gains);
                assert!(v <= best + 1e-15);
                assert_eq!(v, prob_zero_nojam(gains(EveLocation::new(-x, y), 2.0).gains));
                assert_eq!(v, prob_zero_nojam(gains(EveLocation::new(x, -y), 2.0).gains));
            }
        }
    }

    #[test]
    fn p1_forms_agree() {
        for rho in [0.001, 0.01, 0.1, 1.0] {
            let two_d = 1.0 - ExpPairRule::default().expect(|u, v| math::exp(-rho * math::sqrt(u * v)));
            assert!((p1(rho) - two_d).abs() < 1e-12, "{rho}");
        }
    }

    #[test]
    fn p1_bounds() {
        let mut prev_ratio = 0.0;
        for rho in [0.1, 0.01, 0.001] {
            let v = p1(rho);
            assert!(v < p1_bound(rho));
            let ratio = v / p1_bound(rho);
            assert!(ratio > prev_ratio);
            prev_ratio = ratio;
        }
        assert!(prev_ratio > 0.99);
    }

    #[test]
    fn p2_ladder() {
        let rho = 0.1;
        let mut prev = f64::INFINITY;
        for db in (0..=60).step_by(10) {
            let gap = p2_excess(rho, crate::from_db(db as f64));
            assert!(gap > 0.0 && gap < prev, "{db}");
            prev = gap;
        }
        assert!(prev < 1e-4);
        assert_eq!(p2(rho, f64::INFINITY), p1(rho));
    }

    #[test]
    fn policies() {
        let g = gains(EveLocation::ORIGIN, 2.0).gains;
        let p = params(1.0, 0.1);
        let mc = McConfig::new(4, 50_000);
        let semi = policy_prob_zero(JamPolicy::SemiDynamic, g, &p, mc, &Sequential).unwrap();
        assert!(semi.prob.mean < semi.bound && semi.bound < p1_bound(0.1));
        let full = policy_prob_zero(JamPolicy::FullDynamic, g, &p, mc, &Sequential).unwrap();
        assert_eq!(full.prob.mean, 0.0);
        assert!(full.acceptance.covers(1.0 - p1(0.1), 4.0));
        let constant = policy_prob_zero(JamPolicy::Constant, g, &p, mc, &Sequential).unwrap();
        assert!(constant.prob.mean < constant.bound);
        let general = policy_prob_zero(JamPolicy::GeneralDynamic { threshold: 1e-4 }, g, &p, mc, &Sequential).unwrap();
        assert!(general.prob.mean <= 1e-4 && general.acceptance.mean > 0.1);
        assert!(policy_prob_zero(JamPolicy::GeneralDynamic { threshold: 1.5 }, g, &p, mc, &Sequential).is_err());
    }

    #[test]
    fn homogeneous_examples() {
        assert!((homogeneous_value(PairFading::UNIT, 0.01) - 100f64.log2()).abs() < 1e-12);
        assert!((tail_bound(3.0, 0.01) - 0.0628).abs() < 1e-4);
        let p = SystemParams::new(1e6, 1.0, 0.01, 2.0, 0.1).unwrap();
        let p = p.with_p_j(p.auto_jam());
        assert!(homogeneous_secrecy(PairFading::UNIT, &p).is_err());
        let p = SystemParams::new(1e6, 1.0, 0.01, 2.0, 0.2).unwrap();
        let p = p.with_p_j(p.auto_jam());
        assert!(homogeneous_secrecy(PairFading::UNIT, &p).is_ok());
    }

    #[test]
    fn tail_frequency_below_bound() {
        for s_bits in 0..=6 {
            let s_bits = s_bits as f64;
            let e = estimate(McConfig::new(21, 200_000), |s| {
                let f = PairFading::sample(s);
                (math::log2(f.a_tilde / (0.01 * math::sqrt(f.b1_tilde * f.b2_tilde))) <= s_bits) as u8 as f64
            })
            .unwrap();
            assert!(e.mean < tail_bound(s_bits, 0.01), "{s_bits} {e:?}");
        }
    }
}
