//! Dual-phase secrecy without fading.
//!
//! Alice and Bob each send one key while the other jams, so the secrecy at an
//! Eve location is the average `S = (S_AB + S_BA) / 2`, where `S_BA` is
//! `S_AB` with the roles of `a` and `b` exchanged.

use crate::colluding::{gamma, secrecy_ab, snr_ab, snr_ae};
use crate::error::{invalid, regime, Error, Result};
use crate::geometry::{gains, region4_containment_threshold, region_classify, rho_margin, EveLocation, LinkGains, Region, SystemParams};
use crate::math;

/// Distance from both nodes beyond which a location counts as far field:
/// where `a P_T <= 0.01`, so Eve's SNR no longer registers. A working
/// convention; the asymptotic claim does not fix one.
pub fn far_field_distance(p_t: f64, alpha: f64) -> f64 {
    math::powf(100.0 * p_t, 1.0 / alpha)
}

/// Margin `Delta^alpha sqrt(rho P_T)` below which the near-field result is
/// flagged as marginal.
pub const NEAR_FIELD_WARN_MARGIN: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairSecrecy {
    pub s: f64,
    pub s_ab: f64,
    pub s_ba: f64,
}

pub fn secrecy_pair(g: LinkGains, params: &SystemParams) -> PairSecrecy {
    let s_ab = secrecy_ab(g, params);
    let s_ba = secrecy_ab(g.swapped(), params);
    PairSecrecy {
        s: 0.5 * (s_ab + s_ba),
        s_ab,
        s_ba,
    }
}

/// `(1 + SNR_AE)(1 + SNR_BE)`.
pub fn t_factor(g: LinkGains, params: &SystemParams) -> f64 {
    (1.0 + snr_ae(g, params)) * (1.0 + snr_ae(g.swapped(), params))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairPositivity {
    /// `S > 0` without jamming: the location is outside the intersection of
    /// the unit disks around both nodes.
    pub without_jamming: bool,
    /// Some jamming power makes `S > 0`: the location is not in `R4` for
    /// either direction.
    pub for_some_jamming: bool,
}

pub fn positivity_pair(g: LinkGains, rho: f64) -> PairPositivity {
    PairPositivity {
        without_jamming: !(g.a >= 1.0 && g.b >= 1.0),
        for_some_jamming: !(region_classify(g, rho) == Region::R4
            && region_classify(g.swapped(), rho) == Region::R4),
    }
}

/// Whether a jamming power can make `S > 0` at every location.
pub fn universal_positivity_possible(rho: f64) -> bool {
    rho < 1.0
}

/// Both directions strictly inside their `b > rho a` regions and `P_J` above
/// both `gamma` thresholds, so that neither one-way secrecy is clipped.
pub fn pair_hypotheses_hold(g: LinkGains, params: &SystemParams) -> bool {
    if !(rho_margin(g, params.rho) > 0.0 && rho_margin(g.swapped(), params.rho) > 0.0) {
        return false;
    }
    match (gamma(g, params.rho), gamma(g.swapped(), params.rho)) {
        (Some(g1), Some(g2)) => params.p_j > g1.max(g2),
        _ => false,
    }
}

/// `log2(1 + SNR) - log2(T) / 2`, valid only where [`pair_hypotheses_hold`].
pub fn secrecy_via_t(g: LinkGains, params: &SystemParams) -> Result<f64> {
    if !pair_hypotheses_hold(g, params) {
        return Err(regime("location in both rho-regions and P_J > max(gamma, gamma_bar)"));
    }
    Ok(math::log2_1p(snr_ab(params)) - 0.5 * math::log2(t_factor(g, params)))
}

/// `T` on the perpendicular bisector, where `a = b`: `(1 + a P_T / (1 + a P_J))^2`.
pub fn t_on_bisector(y: f64, params: &SystemParams) -> f64 {
    let a = gains(EveLocation::new(0.0, y), params.alpha).gains.a;
    let f = 1.0 + a * params.p_t / (1.0 + a * params.p_j);
    f * f
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extremum {
    LocalMax,
    LocalMin,
    Boundary,
}

/// Coefficient of `x^2` in the expansion of `T(x, 0)` around the origin.
pub fn origin_curvature(params: &SystemParams) -> f64 {
    let (pt, pj, al) = (params.p_t, params.p_j, params.alpha);
    let k = math::powf(2.0, al);
    let q = origin_cubic(params);
    let den = 1.0 + k * pj;
    4.0 * pt * al * k * q / (den * den * den * den)
}

// Sign-carrying cubic in P_J of the origin curvature.
fn origin_cubic(params: &SystemParams) -> f64 {
    let (pt, pj, al) = (params.p_t, params.p_j, params.alpha);
    let k = math::powf(2.0, al);
    4.0 * al * k * k * k * pj * pj * pj
        + (7.0 * al + 1.0) * k * k * pj * pj
        + ((1.0 - al) * k * k * pt + (4.0 * al + 2.0) * k) * pj
        + k * pt
        + al
        + 1.0
}

/// `(-1 + sqrt(1 + 2^(alpha+1) P_T)) / 2^(alpha+1)`: jamming above this power
/// makes the origin a local maximum of `S` along the x-axis. Sufficient, not
/// necessary; [`origin_extremum`] uses the exact curvature.
pub fn origin_max_threshold(p_t: f64, alpha: f64) -> f64 {
    let k2 = math::powf(2.0, alpha + 1.0);
    (-1.0 + math::sqrt(1.0 + k2 * p_t)) / k2
}

/// Whether the origin is a local maximum or minimum of `S` along the x-axis.
pub fn origin_extremum(params: &SystemParams) -> Result<Extremum> {
    let (rho, pj) = (params.rho, params.p_j);
    if !(rho < 1.0) {
        return Err(regime("rho < 1"));
    }
    let floor = (1.0 - math::powf(2.0, -params.alpha)) / (1.0 - rho);
    if !(pj > floor) {
        return Err(regime("P_J > (1 - 2^-alpha) / (1 - rho)"));
    }
    if pj.is_infinite() {
        return Ok(Extremum::LocalMax);
    }
    let q = origin_cubic(params);
    Ok(if q > 0.0 {
        Extremum::LocalMax
    } else if q < 0.0 {
        Extremum::LocalMin
    } else {
        Extremum::Boundary
    })
}

// |s|^e * s^j, the real-alpha reading of (1 - d)^(e + j).
fn pw(s: f64, e: f64, j: i32) -> f64 {
    math::powf(math::abs(s), e) * math::powf(s, j as f64)
}

/// `dS/dx` along the x-axis at distance `d = d_A` from Alice, computed as
/// `-(log2 e / 2) N(d) / D(d)`.
pub fn deriv_x_axis(d: f64, params: &SystemParams) -> Result<f64> {
    if !(d > 0.0 && d.is_finite()) || d == 1.0 {
        return Err(invalid("d", "must be finite, > 0 and away from Bob (d = 1)"));
    }
    if params.p_j.is_infinite() {
        return Err(invalid("p_j", "must be finite"));
    }
    let g = gains(EveLocation::new(d - 0.5, 0.0), params.alpha).gains;
    if !pair_hypotheses_hold(g, params) {
        return Err(regime("location in both rho-regions and P_J > max(gamma, gamma_bar)"));
    }
    let (n, den) = derivative_terms(d, params);
    Ok(-0.5 * core::f64::consts::LOG2_E * n / den)
}

fn derivative_terms(d: f64, params: &SystemParams) -> (f64, f64) {
    let (pt, pj, al) = (params.p_t, params.p_j, params.alpha);
    let s = 1.0 - d;
    let dp = |e: f64| math::powf(d, e);
    let den = (1.0 + pj / pw(s, al, 0) + pt / dp(al))
        * (1.0 + pj / pw(s, al, 0))
        * (1.0 + pj / dp(al) + pt / pw(s, al, 0))
        * (1.0 + pj / dp(al));

    let t1 = -al * pj * pt * pt * (dp(al - 1.0) - pw(s, al, -1)) / (dp(2.0 * al) * pw(s, 2.0 * al, 0));
    let t2 = al * pt * (dp(al + 1.0) - pw(s, al, 1)) / (dp(al + 1.0) * pw(s, al, 1));
    let t3 = 2.0 * al * pj * pt * (dp(2.0 * al + 1.0) - pw(s, 2.0 * al, 1)) / (dp(2.0 * al + 1.0) * pw(s, 2.0 * al, 1));
    let t4 = al
        * pj
        * pj
        * pt
        * (2.0 * (dp(al) - pw(s, al, 0)) / (dp(2.0 * al + 1.0) * pw(s, 2.0 * al, 1))
            + (dp(3.0 * al + 1.0) - pw(s, 3.0 * al, 1)) / (dp(3.0 * al + 1.0) * pw(s, 3.0 * al, 1)));
    let t5 = al * pj * pj * pj * pt * (dp(2.0 * al) - pw(s, 2.0 * al, 0)) / (dp(3.0 * al + 1.0) * pw(s, 3.0 * al, 1));
    let t6 = al * pt * pt * (2.0 * d - 1.0) / (dp(al + 1.0) * pw(s, al, 1));
    (t1 + t2 + t3 + t4 + t5 + t6, den)
}

/// `-(log2 e / 2) alpha / (0.5 - x)`: the leading behaviour of `dS/dx` as `x -> 0.5`.
pub fn deriv_asymptote(x: f64, alpha: f64) -> f64 {
    -0.5 * core::f64::consts::LOG2_E * alpha / (0.5 - x)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LrAsymmetry {
    /// `T` at `(0.5 - Delta, 0)`.
    pub t_left: f64,
    /// `T` at `(0.5 + Delta, 0)`.
    pub t_right: f64,
    pub difference: f64,
    /// `2 alpha Delta^(1 - alpha) P_T / P_J`.
    pub asymptotic_difference: f64,
    pub s_left: f64,
    pub s_right: f64,
}

/// Compares the two sides of Bob at distance `delta`.
pub fn lr_asymmetry(delta: f64, params: &SystemParams) -> Result<LrAsymmetry> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid("delta", "must lie in (0, 1)"));
    }
    let al = params.alpha;
    let left = gains(EveLocation::new(0.5 - delta, 0.0), al).gains;
    let right = gains(EveLocation::new(0.5 + delta, 0.0), al).gains;
    let t_left = t_factor(left, params);
    let t_right = t_factor(right, params);
    Ok(LrAsymmetry {
        t_left,
        t_right,
        difference: t_right - t_left,
        asymptotic_difference: 2.0 * al * math::powf(delta, 1.0 - al) * params.p_t / params.p_j,
        s_left: secrecy_pair(left, params).s,
        s_right: secrecy_pair(right, params).s,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NearFarField {
    /// `log2(1 / rho)`: the location-invariant secrecy between the nodes.
    pub near: f64,
    /// `log2(P_T / rho) / 2`: the secrecy far from both nodes.
    pub far: f64,
    /// `Delta^alpha sqrt(rho P_T)`; the near-field value needs this `>> 1`.
    pub margin: f64,
    /// `margin < NEAR_FIELD_WARN_MARGIN`.
    pub marginal: bool,
}

/// The two plateau values without any regime check.
pub fn plateau_values(rho: f64, p_t: f64) -> (f64, f64) {
    (-math::log2(rho), 0.5 * math::log2(p_t / rho))
}

/// Plateau values of `S` under `P_J = sqrt(P_T / rho)`.
///
/// Requires that jamming power, `rho < Delta^alpha / (1 + Delta)^alpha` and a
/// margin above one; margins below [`NEAR_FIELD_WARN_MARGIN`] are flagged.
pub fn near_far_field(params: &SystemParams) -> Result<NearFarField> {
    params.validate()?;
    if !(params.rho > 0.0) {
        return Err(regime("rho > 0"));
    }
    let auto = params.auto_jam();
    if !((params.p_j - auto).abs() <= 1e-9 * auto) {
        return Err(regime("P_J = sqrt(P_T / rho)"));
    }
    let delta = params.delta.min(1.0);
    let threshold = region4_containment_threshold(delta, params.alpha)?;
    if !(params.rho < threshold) {
        return Err(regime("rho < Delta^alpha / (1 + Delta)^alpha"));
    }
    let margin = math::powf(params.delta, params.alpha) * math::sqrt(params.rho * params.p_t);
    if !(margin > 1.0) {
        return Err(Error::NearFieldMargin { margin });
    }
    let (near, far) = plateau_values(params.rho, params.p_t);
    Ok(NearFarField {
        near,
        far,
        margin,
        marginal: margin < NEAR_FIELD_WARN_MARGIN,
    })
}

/// `S` at either node: `log2(1 + P_T / (1 + rho P_J)) / 2`.
pub fn node_peaks(params: &SystemParams) -> Result<f64> {
    if !(params.rho < math::powf(2.0, -params.alpha)) {
        return Err(regime("rho < 2^-alpha"));
    }
    if !(params.p_j > 0.0) {
        return Err(regime("P_J > 0"));
    }
    Ok(0.5 * math::log2_1p(snr_ab(params)))
}
