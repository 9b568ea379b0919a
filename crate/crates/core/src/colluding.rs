//! One-way secrecy `S_AB` against colluding eavesdroppers without fading.

use crate::error::{invalid, regime, Error, Result};
use crate::geometry::{region4_containment_threshold, region_classify, rho_margin, EveLocation, LinkGains, Region, SystemParams};
use crate::math;

/// `P_T / (1 + rho P_J)`.
pub fn snr_ab(params: &SystemParams) -> f64 {
    if params.p_j.is_infinite() {
        return if params.rho > 0.0 { 0.0 } else { params.p_t };
    }
    params.p_t / (1.0 + params.rho * params.p_j)
}

/// `a P_T / (1 + b P_J)`; no jamming (`P_J = 0`) means `b P_J = 0` even for infinite `b`.
pub fn snr_ae(g: LinkGains, params: &SystemParams) -> f64 {
    if g.a.is_infinite() {
        return f64::INFINITY;
    }
    if params.p_j == 0.0 {
        return g.a * params.p_t;
    }
    g.a * params.p_t / (1.0 + g.b * params.p_j)
}

/// `log2(1 + x) - log2(1 + y)` clipped at zero.
pub(crate) fn secrecy_from_snrs(x: f64, y: f64) -> f64 {
    if !(x > y) {
        return 0.0;
    }
    math::log2_1p((x - y) / (1.0 + y))
}

/// Secrecy capacity of Alice to Bob, in bits per channel use.
pub fn secrecy_ab(g: LinkGains, params: &SystemParams) -> f64 {
    secrecy_from_snrs(snr_ab(params), snr_ae(g, params))
}

/// `(1 + b P_J) / (a (1 + rho P_J))`; secrecy is positive iff this exceeds one.
pub fn lambda(g: LinkGains, params: &SystemParams) -> f64 {
    let (a, b, rho, pj) = (g.a, g.b, params.rho, params.p_j);
    if pj.is_infinite() {
        return if rho > 0.0 { b / (a * rho) } else { f64::INFINITY };
    }
    if pj == 0.0 {
        return 1.0 / a;
    }
    (1.0 + b * pj) / (a * (1.0 + rho * pj))
}

/// `(a - 1) / (b - rho a)`; `None` on the boundary `b = rho a`.
pub fn gamma(g: LinkGains, rho: f64) -> Option<f64> {
    let m = rho_margin(g, rho);
    if m == 0.0 {
        None
    } else if m.is_infinite() {
        Some(0.0)
    } else {
        Some((g.a - 1.0) / m)
    }
}

/// `(ab - rho + a P_T (b - rho)) / (rho b (b - rho a))`; `None` when
/// `rho = 0` or `b = rho a`.
pub fn beta(g: LinkGains, rho: f64, p_t: f64) -> Option<f64> {
    let c = JamPolynomial::new(g, rho, p_t);
    if c.c2 == 0.0 {
        None
    } else {
        Some(c.c0 / c.c2)
    }
}

/// Whether `S_AB > 0`, evaluated from the sign of `b - rho a` and `gamma`.
pub fn positivity(g: LinkGains, params: &SystemParams) -> bool {
    let pj = params.p_j;
    if g.a.is_infinite() {
        return false;
    }
    if g.b.is_infinite() {
        return pj > 0.0 || g.a < 1.0;
    }
    let m = rho_margin(g, params.rho);
    if m == 0.0 {
        return g.a < 1.0;
    }
    let gamma = (g.a - 1.0) / m;
    if m > 0.0 {
        pj > gamma
    } else {
        pj < gamma
    }
}

/// Whether the location belongs to the zero-secrecy set `R4 ∪ R_{P_J}`.
///
/// Only defined when `rho < 2^-alpha` and `P_J > 0`, where the zero set is
/// `R4` plus the ring of `R1 ∪ R2` points with `P_J <= gamma`.
pub fn zero_region_predicate(g: LinkGains, params: &SystemParams) -> Result<bool> {
    if !(params.rho < math::powf(2.0, -params.alpha)) {
        return Err(regime("rho < 2^-alpha"));
    }
    if !(params.p_j > 0.0) {
        return Err(regime("P_J > 0"));
    }
    Ok(match region_classify(g, params.rho) {
        Region::R4 => true,
        Region::R1 | Region::R2 => match gamma(g, params.rho) {
            Some(gm) => params.p_j <= gm,
            None => false,
        },
        Region::R3 => !positivity(g, params),
    })
}

/// Coefficients of the numerator of `dS_AB/dP_J`, whose sign equals that of
/// `-c2 P_J^2 + c1 P_J + c0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JamPolynomial {
    pub c2: f64,
    pub c1: f64,
    pub c0: f64,
}

impl JamPolynomial {
    pub fn new(g: LinkGains, rho: f64, p_t: f64) -> Self {
        let (a, b) = (g.a, g.b);
        JamPolynomial {
            c2: rho * b * (b - rho * a),
            c1: 2.0 * rho * b * (a - 1.0),
            c0: a * b - rho + a * p_t * (b - rho),
        }
    }

    pub fn eval(&self, p_j: f64) -> f64 {
        -self.c2 * p_j * p_j + self.c1 * p_j + self.c0
    }

    /// Larger root of `c2 P^2 - c1 P - c0`, i.e. `gamma + sqrt(gamma^2 + beta)`.
    pub fn positive_root(&self) -> f64 {
        let disc = self.c1 * self.c1 + 4.0 * self.c0 * self.c2;
        let sq = math::sqrt(disc.max(0.0));
        if self.c1 >= 0.0 {
            (self.c1 + sq) / (2.0 * self.c2)
        } else {
            2.0 * self.c0 / (sq - self.c1)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptJamNote {
    /// Stationary point of `S_AB`.
    Interior,
    /// `R1` with `c0 <= 0`: the secrecy already decreases at `P_J = 0`.
    Clipped,
    /// `R3`: jamming only hurts.
    NoJamming,
    /// `R4`: the secrecy is zero for every power, so the cheapest is reported.
    ZeroEverywhere,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptJam {
    pub p_j_opt: f64,
    pub gamma: Option<f64>,
    pub beta: Option<f64>,
    pub region: Region,
    pub note: OptJamNote,
}

/// Jamming power maximizing `S_AB` at a location.
pub fn opt_jam(g: LinkGains, rho: f64, p_t: f64) -> Result<OptJam> {
    if !g.is_finite() || !(g.a > 0.0) || !(g.b > 0.0) {
        return Err(invalid("gains", "optimal jamming needs finite positive gains"));
    }
    if !(p_t > 0.0 && p_t.is_finite()) {
        return Err(invalid("p_t", "must be finite and > 0"));
    }
    if !(rho >= 0.0 && rho.is_finite()) {
        return Err(invalid("rho", "must be finite and >= 0"));
    }
    if rho == 0.0 {
        return Err(Error::UnboundedOptimum);
    }
    let region = region_classify(g, rho);
    let poly = JamPolynomial::new(g, rho, p_t);
    let (p_j_opt, note) = match region {
        Region::R1 if poly.c0 <= 0.0 => (0.0, OptJamNote::Clipped),
        Region::R1 | Region::R2 => (poly.positive_root().max(0.0), OptJamNote::Interior),
        Region::R3 => (0.0, OptJamNote::NoJamming),
        Region::R4 => (0.0, OptJamNote::ZeroEverywhere),
    };
    Ok(OptJam {
        p_j_opt,
        gamma: gamma(g, rho),
        beta: beta(g, rho, p_t),
        region,
        note,
    })
}

/// The most harmful Eve location `(-Delta - 0.5, 0)`.
///
/// Requires `Delta <= 1`, `rho < Delta^alpha / (1 + Delta)^alpha` and
/// `P_J > gamma` at the returned point; otherwise secrecy vanishes on a whole
/// ring and there is no single worst location.
pub fn worst_location(params: &SystemParams) -> Result<EveLocation> {
    params.validate()?;
    if params.delta > 1.0 {
        return Err(regime("Delta <= 1"));
    }
    let threshold = region4_containment_threshold(params.delta, params.alpha)?;
    if !(params.rho < threshold) {
        return Err(regime("rho < Delta^alpha / (1 + Delta)^alpha"));
    }
    let loc = EveLocation::new(-params.delta - 0.5, 0.0);
    let g = crate::geometry::gains(loc, params.alpha).gains;
    match gamma(g, params.rho) {
        Some(gm) if params.p_j > gm => Ok(loc),
        _ => Err(regime("P_J > gamma at (-Delta - 0.5, 0)")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::gains;
    use crate::montecarlo::ExpSampler;

    fn params(p_t: f64, p_j: f64, rho: f64) -> SystemParams {
        SystemParams::new(p_t, p_j, rho, 2.0, 0.1).unwrap()
    }

    fn log_uniform(s: &mut ExpSampler, lo: f64, hi: f64) -> f64 {
        math::powf(10.0, lo + (hi - lo) * s.uniform())
    }

    #[test]
    fn snr_examples() {
        assert_eq!(snr_ab(&params(1.0, 0.0, 0.3)), 1.0);
        assert_eq!(snr_ab(&params(100.0, 100.0, 0.01)), 50.0);
        assert_eq!(snr_ab(&params(7.0, 1e9, 0.0)), 7.0);
        assert_eq!(snr_ab(&params(7.0, f64::INFINITY, 0.1)), 0.0);
    }

    #[test]
    fn secrecy_examples() {
        let p = params(1.0, 0.0, 0.1);
        assert_eq!(secrecy_ab(LinkGains::new(4.0, 4.0), &p), 0.0);
        let far = secrecy_ab(LinkGains::new(1e-300, 1e-300), &p);
        assert!((far - 1.0).abs() < 1e-15);

        // Direct recomputation of both capacities at the worst location.
        let rho = 0.00818;
        let pt = 1e6;
        let pj = math::sqrt(pt / rho);
        let p = params(pt, pj, rho);
        let g = LinkGains::new(100.0, 1.0 / 1.21);
        let c_ab = math::log2(1.0 + pt / (1.0 + rho * pj));
        let c_ae = math::log2(1.0 + 100.0 * pt / (1.0 + pj / 1.21));
        // Eve is marginally stronger than Bob here, so the secrecy clips to zero.
        assert!(c_ab - c_ae < 0.0);
        assert_eq!(secrecy_ab(g, &p), 0.0);
        let p = p.with_rho(0.005).with_p_j(math::sqrt(pt / 0.005));
        let c_ab = math::log2(1.0 + pt / (1.0 + 0.005 * p.p_j));
        let c_ae = math::log2(1.0 + 100.0 * pt / (1.0 + p.p_j / 1.21));
        assert!(c_ab > c_ae);
        assert!((secrecy_ab(g, &p) - (c_ab - c_ae)).abs() < 1e-11);
    }

    #[test]
    fn secrecy_at_nodes() {
        let p = params(10.0, 5.0, 0.1);
        assert_eq!(secrecy_ab(LinkGains::new(f64::INFINITY, 1.0), &p), 0.0);
        let at_bob = secrecy_ab(LinkGains::new(1.0, f64::INFINITY), &p);
        assert!((at_bob - math::log2(1.0 + 10.0 / 1.5)).abs() < 1e-14);
        assert!(positivity(LinkGains::new(1.0, f64::INFINITY), &p));
        assert!(!positivity(LinkGains::new(1.0, f64::INFINITY), &p.with_p_j(0.0)));
    }

    #[test]
    fn positivity_examples() {
        for pj in [0.0, 0.1, 10.0, 1e6, f64::INFINITY] {
            assert!(positivity(LinkGains::new(0.5, 0.5), &params(3.0, pj, 0.1)));
            assert!(!positivity(LinkGains::new(2.0, 0.01), &params(3.0, pj, 0.1)));
            assert!(positivity(LinkGains::new(0.5, 0.05), &params(3.0, pj, 0.1)));
        }
    }

    #[test]
    fn positivity_matches_secrecy_and_lambda() {
        let mut s = ExpSampler::new(17, 0);
        for _ in 0..100_000 {
            let g = LinkGains::new(log_uniform(&mut s, -2.0, 2.0), log_uniform(&mut s, -2.0, 2.0));
            let pj = if s.uniform() < 0.05 { 0.0 } else { log_uniform(&mut s, -3.0, 6.0) };
            let p = params(log_uniform(&mut s, -2.0, 6.0), pj, log_uniform(&mut s, -4.0, 1.0));
            let pos = positivity(g, &p);
            assert_eq!(pos, secrecy_ab(g, &p) > 0.0, "{g:?} {p:?}");
            assert_eq!(pos, lambda(g, &p) > 1.0, "{g:?} {p:?}");
            assert!(secrecy_ab(g, &p) >= 0.0);
        }
    }

    #[test]
    fn monotone_in_gains() {
        let mut s = ExpSampler::new(23, 0);
        let mut checked = 0;
        while checked < 10_000 {
            let g = LinkGains::new(log_uniform(&mut s, -2.0, 2.0), log_uniform(&mut s, -2.0, 2.0));
            let p = params(log_uniform(&mut s, -1.0, 4.0), log_uniform(&mut s, -1.0, 4.0), log_uniform(&mut s, -3.0, 0.0));
            let base = secrecy_ab(g, &p);
            if base <= 0.0 {
                continue;
            }
            let f = 1.0 + 0.5 * s.uniform() + 1e-3;
            assert!(secrecy_ab(LinkGains::new(g.a * f, g.b), &p) < base);
            assert!(secrecy_ab(LinkGains::new(g.a, g.b * f), &p) > base);
            checked += 1;
        }
    }

    #[test]
    fn zero_region_examples() {
        let p = params(100.0, 10.0, 0.1);
        assert!(zero_region_predicate(LinkGains::new(2.0, 0.01), &p).unwrap());
        let g = LinkGains::new(4.0, 1.0);
        let gm = gamma(g, 0.1).unwrap();
        assert!(zero_region_predicate(g, &p.with_p_j(gm / 2.0)).unwrap());
        assert!(!zero_region_predicate(g, &p.with_p_j(2.0 * gm)).unwrap());
        assert!(zero_region_predicate(g, &p.with_rho(0.3)).is_err());
        assert!(zero_region_predicate(g, &p.with_p_j(0.0)).is_err());
    }

    #[test]
    fn zero_region_matches_secrecy_on_grid() {
        let p = SystemParams::new(100.0, math::sqrt(1000.0), 0.1, 2.0, 0.1).unwrap();
        for i in 0..=80 {
            for j in 0..=80 {
                let loc = EveLocation::new(-2.0 + 0.05 * i as f64, -2.0 + 0.05 * j as f64);
                let g = gains(loc, 2.0).gains;
                assert_eq!(zero_region_predicate(g, &p).unwrap(), secrecy_ab(g, &p) == 0.0, "{loc:?}");
            }
        }
    }

    #[test]
    fn opt_jam_example() {
        let r = opt_jam(LinkGains::new(4.0, 1.0), 0.01, 100.0).unwrap();
        assert_eq!(r.region, Region::R2);
        assert!((r.gamma.unwrap() - 3.125).abs() < 1e-12);
        assert!((r.beta.unwrap() - 41_665.625).abs() < 1e-8, "{:?}", r.beta);
        assert!((r.p_j_opt - 207.270_513_36).abs() < 1e-6, "{}", r.p_j_opt);
        let gm = r.gamma.unwrap();
        let gb = gm + math::sqrt(gm * gm + r.beta.unwrap());
        assert!(((gb - r.p_j_opt) / gb).abs() < 1e-14);
    }

    #[test]
    fn opt_jam_regions() {
        let r3 = opt_jam(LinkGains::new(0.5, 0.01), 0.1, 10.0).unwrap();
        assert_eq!((r3.p_j_opt, r3.note), (0.0, OptJamNote::NoJamming));
        let r4 = opt_jam(LinkGains::new(2.0, 0.01), 0.1, 10.0).unwrap();
        assert_eq!((r4.p_j_opt, r4.note), (0.0, OptJamNote::ZeroEverywhere));
        assert_eq!(opt_jam(LinkGains::new(4.0, 1.0), 0.0, 10.0), Err(Error::UnboundedOptimum));
        assert!(opt_jam(LinkGains::new(f64::INFINITY, 1.0), 0.1, 10.0).is_err());
    }

    #[test]
    fn opt_jam_small_rho_limit() {
        let (a, b, pt) = (4.0, 1.0, 100.0);
        for rho in [1e-6, 1e-8, 1e-10] {
            let r = opt_jam(LinkGains::new(a, b), rho, pt).unwrap();
            let lim = math::sqrt(a * (1.0 + pt) / (rho * b));
            assert!(((r.p_j_opt - lim) / lim).abs() < 1e-2, "{rho}");
        }
    }

    #[test]
    fn opt_jam_positive_in_r2_and_r1_clip() {
        let mut s = ExpSampler::new(31, 0);
        for _ in 0..10_000 {
            let g = LinkGains::new(log_uniform(&mut s, -2.0, 2.0), log_uniform(&mut s, -2.0, 2.0));
            let rho = log_uniform(&mut s, -3.0, 1.0);
            let pt = log_uniform(&mut s, -2.0, 4.0);
            let r = opt_jam(g, rho, pt).unwrap();
            assert!(r.p_j_opt >= 0.0);
            if r.region == Region::R2 {
                assert!(r.p_j_opt > 0.0);
                assert!(r.p_j_opt > r.gamma.unwrap());
            }
            if r.note == OptJamNote::Clipped {
                assert!(JamPolynomial::new(g, rho, pt).c0 <= 0.0);
            }
        }
    }

    #[test]
    fn derivative_sign_matches_finite_difference() {
        let mut s = ExpSampler::new(37, 0);
        let mut checked = 0;
        while checked < 5_000 {
            let g = LinkGains::new(log_uniform(&mut s, -2.0, 2.0), log_uniform(&mut s, -2.0, 2.0));
            let rho = log_uniform(&mut s, -3.0, 0.0);
            let pt = log_uniform(&mut s, -1.0, 3.0);
            let pj = log_uniform(&mut s, -2.0, 4.0);
            let p = params(pt, pj, rho);
            let h = 1e-4 * pj.max(1.0);
            let (lo, hi) = (p.with_p_j(pj - h), p.with_p_j(pj + h));
            if secrecy_ab(g, &lo) <= 0.0 || secrecy_ab(g, &hi) <= 0.0 {
                continue;
            }
            let fd = secrecy_ab(g, &hi) - secrecy_ab(g, &lo);
            let poly = JamPolynomial::new(g, rho, pt);
            let v = poly.eval(pj);
            let scale = poly.c2.abs() * pj * pj + poly.c1.abs() * pj + poly.c0.abs();
            if v.abs() < 1e-3 * scale || fd.abs() < 1e-12 {
                continue;
            }
            assert_eq!(v > 0.0, fd > 0.0, "{g:?} {p:?}");
            checked += 1;
        }
    }

    #[test]
    fn lambda_limits_at_optimum() {
        let (a, b) = (4.0, 1.0);
        let rho = 1e-6;
        let lo = opt_jam(LinkGains::new(a, b), rho, 1e-6).unwrap().p_j_opt;
        let l = lambda(LinkGains::new(a, b), &params(1e-6, lo, rho));
        let target = math::sqrt(b / (rho * a));
        assert!(((l - target) / target).abs() < 0.01, "{l} {target}");

        let rho = 0.01;
        let hi = opt_jam(LinkGains::new(a, b), rho, 1e12).unwrap().p_j_opt;
        let l = lambda(LinkGains::new(a, b), &params(1e12, hi, rho));
        let target = b / (rho * a);
        assert!(((l - target) / target).abs() < 0.01, "{l} {target}");
    }

    #[test]
    fn opt_jam_nonincreasing_along_axis() {
        let (rho, pt, alpha) = (0.001, 100.0, 2.0);
        let mut prev = f64::INFINITY;
        for k in 0..2000 {
            let d = 0.1 + 0.01 * k as f64;
            let g = LinkGains::new(math::powf(d, -alpha), math::powf(d + 1.0, -alpha));
            let v = opt_jam(g, rho, pt).unwrap().p_j_opt;
            assert!(v <= prev * (1.0 + 1e-12), "{d}");
            prev = v;
        }
    }

    #[test]
    fn beta_nonincreasing_in_b() {
        let mut s = ExpSampler::new(41, 0);
        let mut checked = 0;
        while checked < 10_000 {
            let g = LinkGains::new(log_uniform(&mut s, 0.0, 2.0), log_uniform(&mut s, -2.0, 2.0));
            let rho = log_uniform(&mut s, -3.0, 0.0);
            let pt = log_uniform(&mut s, -2.0, 4.0);
            if region_classify(g, rho) != Region::R2 {
                continue;
            }
            let h = 1e-6 * g.b;
            let up = beta(LinkGains::new(g.a, g.b + h), rho, pt).unwrap();
            let down = beta(LinkGains::new(g.a, g.b - h), rho, pt).unwrap();
            if region_classify(LinkGains::new(g.a, g.b - h), rho) != Region::R2 {
                continue;
            }
            assert!(up <= down * (1.0 + 1e-9), "{g:?} {rho} {pt}");
            checked += 1;
        }
    }

    #[test]
    fn worst_location_examples() {
        let p = SystemParams::new(1e6, 1e4, 0.005, 2.0, 0.1).unwrap();
        assert_eq!(worst_location(&p).unwrap(), EveLocation::new(-0.6, 0.0));
        let p = SystemParams::new(1e6, 1e4, 0.005, 2.0, 1.0).unwrap();
        assert_eq!(worst_location(&p).unwrap(), EveLocation::new(-1.5, 0.0));
        // rho above the containment threshold
        let p = SystemParams::new(1e6, 1e4, 0.01, 2.0, 0.1).unwrap();
        assert!(worst_location(&p).is_err());
        // P_J below gamma
        let p = SystemParams::new(1e6, 1.0, 0.005, 2.0, 0.1).unwrap();
        assert!(worst_location(&p).is_err());
    }
}
