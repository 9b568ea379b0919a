//! Zero-secrecy probabilities of `S_AB` under Rayleigh fading.
//!
//! Each link gain is multiplied by an independent unit-mean exponential
//! factor: `Ã` (Alice-Bob), `B̃` (Bob's residual self-interference), `C̃`
//! (Alice-Eve) and `D̃` (Bob-Eve). Secrecy is zero iff `C̃ >= v1 D̃ + v2`.

use crate::error::{invalid, Result};
use crate::geometry::{LinkGains, SystemParams};
use crate::math;
use crate::montecarlo::{estimate_n, ChunkRunner, Estimate, ExpSampler, McConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColludingFading {
    pub a_tilde: f64,
    pub b_tilde: f64,
    pub c_tilde: f64,
    pub d_tilde: f64,
}

impl ColludingFading {
    pub const UNIT: ColludingFading = ColludingFading {
        a_tilde: 1.0,
        b_tilde: 1.0,
        c_tilde: 1.0,
        d_tilde: 1.0,
    };

    pub fn sample(s: &mut ExpSampler) -> Self {
        ColludingFading {
            a_tilde: s.exp(),
            b_tilde: s.exp(),
            c_tilde: s.exp(),
            d_tilde: s.exp(),
        }
    }

    /// Whether `S_AB = 0` for this draw, from the faded SNRs directly.
    pub fn secrecy_is_zero(&self, g: LinkGains, params: &SystemParams) -> bool {
        let to_bob = self.a_tilde * params.p_t / (1.0 + params.rho * self.b_tilde * params.p_j);
        let jam_at_eve = if params.p_j == 0.0 { 0.0 } else { g.b * self.d_tilde * params.p_j };
        let to_eve = g.a * self.c_tilde * params.p_t / (1.0 + jam_at_eve);
        to_eve >= to_bob
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColludingTerms {
    /// `b Ã P_J / (a (1 + rho B̃ P_J))`.
    pub v1: f64,
    /// `Ã / (a (1 + rho B̃ P_J))`.
    pub v2: f64,
}

pub fn terms(g: LinkGains, params: &SystemParams, a_tilde: f64, b_tilde: f64) -> ColludingTerms {
    let (a, b, rho, pj) = (g.a, g.b, params.rho, params.p_j);
    if a.is_infinite() {
        return ColludingTerms { v1: 0.0, v2: 0.0 };
    }
    if pj == 0.0 {
        return ColludingTerms {
            v1: 0.0,
            v2: a_tilde / a,
        };
    }
    if b.is_infinite() {
        return ColludingTerms {
            v1: f64::INFINITY,
            v2: a_tilde / (a * (1.0 + rho * b_tilde * pj)),
        };
    }
    if pj.is_infinite() {
        let sb = rho * b_tilde;
        return if sb > 0.0 {
            ColludingTerms {
                v1: b * a_tilde / (a * sb),
                v2: 0.0,
            }
        } else {
            ColludingTerms {
                v1: if a_tilde > 0.0 { f64::INFINITY } else { 0.0 },
                v2: a_tilde / a,
            }
        };
    }
    let z = a * (1.0 + rho * b_tilde * pj);
    ColludingTerms {
        v1: b * a_tilde * pj / z,
        v2: a_tilde / z,
    }
}

/// `e^-v2 / (1 + v1)`.
pub fn prob_from_terms(t: ColludingTerms) -> f64 {
    if t.v1.is_infinite() {
        return 0.0;
    }
    math::exp(-t.v2) / (1.0 + t.v1)
}

/// `P(S_AB = 0 | Ã, B̃)`.
pub fn cond_prob_zero(g: LinkGains, params: &SystemParams, a_tilde: f64, b_tilde: f64) -> f64 {
    prob_from_terms(terms(g, params, a_tilde, b_tilde))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncondProbZero {
    pub prob: Estimate,
    /// Estimate of `E[1 / (1 + v1)]`, an upper bound on `prob`, from the same draws.
    pub upper_bound: Estimate,
}

/// `P(S_AB = 0)` averaged over `Ã, B̃`.
pub fn uncond_prob_zero<C: ChunkRunner>(
    g: LinkGains,
    params: &SystemParams,
    mc: McConfig,
    runner: &C,
) -> Result<UncondProbZero> {
    let p = *params;
    let [prob, upper_bound] = estimate_n(mc, runner, move |s| {
        let t = terms(g, &p, s.exp(), s.exp());
        let bound = if t.v1.is_infinite() { 0.0 } else { 1.0 / (1.0 + t.v1) };
        [prob_from_terms(t), bound]
    })?;
    Ok(UncondProbZero { prob, upper_bound })
}

/// How `P(S_AB = 0 | Ã, B̃)` responds to the jamming power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JamResponse {
    /// Decreasing for all `P_J`: jam as hard as allowed.
    OptimalInfinite,
    /// Decreasing then increasing, with the minimum at the given power.
    OptimalFinite(f64),
    /// Nondecreasing: do not jam.
    OptimalZero,
}

/// The derivative of the conditional probability in `P_J` has the sign of
/// `-(a1 P_J + a0)` with `a1 = rho B̃ (a (b - rho B̃) - b Ã)` and `a0 = a (b - rho B̃)`.
pub fn response_coefficients(g: LinkGains, rho: f64, a_tilde: f64, b_tilde: f64) -> (f64, f64) {
    let (a, b) = (g.a, g.b);
    let sb = rho * b_tilde;
    (sb * (a * (b - sb) - b * a_tilde), a * (b - sb))
}

pub fn classify_jam_response(g: LinkGains, rho: f64, a_tilde: f64, b_tilde: f64) -> JamResponse {
    if g.a.is_infinite() {
        return JamResponse::OptimalZero;
    }
    if g.b.is_infinite() {
        return JamResponse::OptimalInfinite;
    }
    let (a1, a0) = response_coefficients(g, rho, a_tilde, b_tilde);
    if a0 > 0.0 {
        if a1 >= 0.0 {
            JamResponse::OptimalInfinite
        } else {
            JamResponse::OptimalFinite(a0 / -a1)
        }
    } else {
        JamResponse::OptimalZero
    }
}

/// A probability close to one, kept as its complement so tiny complements
/// survive (`1 - 2.3e-42` is not representable directly).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NearOne {
    pub complement: f64,
    pub ln_complement: f64,
}

impl NearOne {
    pub fn value(&self) -> f64 {
        1.0 - self.complement
    }

    fn from_ln(ln_complement: f64) -> Self {
        NearOne {
            complement: math::exp(ln_complement),
            ln_complement,
        }
    }
}

/// Lower bound on the probability that `P(S_AB = 0 | Ã, B̃)` decreases in
/// `P_J`, i.e. `P(Ã < a, B̃ < (b / rho)(1 - Ã / a))`, with `eta = b / (rho a)`.
pub fn decreasing_prob_lower_bound_eta(a: f64, eta: f64) -> Result<NearOne> {
    if !(a > 0.0) {
        return Err(invalid("a", "must be > 0"));
    }
    if !(eta > 0.0) {
        return Err(invalid("eta", "must be > 0"));
    }
    if a.is_infinite() {
        return Ok(NearOne {
            complement: 0.0,
            ln_complement: f64::NEG_INFINITY,
        });
    }
    if eta.is_infinite() {
        return Ok(NearOne::from_ln(-a));
    }
    let eps = eta - 1.0;
    let ln_q = if eps == 0.0 {
        -a + math::ln_1p(a)
    } else if eps > 0.0 {
        // e^-a (1 + (1 - e^{-eps a}) / eps)
        -a + math::ln_1p(-math::expm1(-eps * a) / eps)
    } else {
        // e^{-eta a} (1 - eta e^{-(1 - eta) a}) / (1 - eta)
        let m = -eps;
        -eta * a + math::ln_1p(-eta * math::exp(-m * a)) - math::ln(m)
    };
    Ok(NearOne::from_ln(ln_q))
}

/// The same bound in terms of `(a, b, rho)`:
/// `1 - b/(b - rho a) e^-a + rho a/(b - rho a) e^{-b/rho}`.
pub fn decreasing_prob_lower_bound(a: f64, b: f64, rho: f64) -> Result<NearOne> {
    if !(b > 0.0) {
        return Err(invalid("b", "must be > 0"));
    }
    if !(rho >= 0.0) {
        return Err(invalid("rho", "must be >= 0"));
    }
    if a.is_infinite() {
        return decreasing_prob_lower_bound_eta(a, 1.0);
    }
    let eta = if rho == 0.0 || b.is_infinite() { f64::INFINITY } else { b / (rho * a) };
    decreasing_prob_lower_bound_eta(a, eta)
}

/// Lower bound on `P(P(S_AB = 0 | Ã, B̃) <= p)`:
/// `exp(-a (1 - p) / (b P_J p)) · b p / (b p + a rho (1 - p))`, exact at `P_J = inf`.
pub fn cdf_lower_bound(p: f64, a: f64, b: f64, rho: f64, p_j: f64) -> Result<f64> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(invalid("p", "must lie in (0, 1]"));
    }
    if !(p_j > 0.0) {
        return Err(invalid("p_j", "must be > 0 (infinity allowed)"));
    }
    if p == 1.0 {
        return Ok(1.0);
    }
    if a.is_infinite() {
        return Ok(0.0);
    }
    let q = 1.0 - p;
    let ratio = b * p / (b * p + a * rho * q);
    if p_j.is_infinite() || b.is_infinite() {
        return Ok(ratio);
    }
    Ok(math::exp(-a * q / (b * p_j * p)) * ratio)
}
