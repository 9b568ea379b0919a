//! Normalized system model and large-scale geometry.
//!
//! All powers and gains are linear. An infinite gain (`f64::INFINITY`) marks
//! an eavesdropper sitting exactly on a node; downstream formulas take the
//! corresponding limits instead of failing.

use crate::error::{invalid, Result};
use crate::math;

/// Actual (un-normalized) link quantities, all linear.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawLinkParams {
    /// Alice-Bob channel gain `g'`.
    pub g_prime: f64,
    pub pt_prime: f64,
    pub pj_prime: f64,
    /// Residual self-interference gain of the jamming receiver.
    pub rho_prime: f64,
    pub noise_b: f64,
    pub noise_e: f64,
}

/// Output of [`normalize`]: the powers and gains every other module consumes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normalized {
    pub p_t: f64,
    pub p_j: f64,
    pub rho: f64,
    pub gains: LinkGains,
}

/// Folds the Alice-Bob gain and the noise variances into the powers and the
/// Eve gains so that the Alice-Bob gain and all noise variances become one.
pub fn normalize(raw: &RawLinkParams, a_prime: f64, b_prime: f64) -> Result<Normalized> {
    let positive = |v: f64, name| {
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(invalid(name, "must be finite and > 0"))
        }
    };
    positive(raw.g_prime, "g_prime")?;
    positive(raw.noise_b, "noise_b")?;
    positive(raw.noise_e, "noise_e")?;
    positive(raw.pt_prime, "pt_prime")?;
    if !(raw.pj_prime >= 0.0) {
        return Err(invalid("pj_prime", "must be >= 0"));
    }
    if !(raw.rho_prime >= 0.0) {
        return Err(invalid("rho_prime", "must be >= 0"));
    }
    if !(a_prime > 0.0) || !(b_prime > 0.0) {
        return Err(invalid("a_prime/b_prime", "Eve gains must be > 0"));
    }
    let power_scale = raw.g_prime / raw.noise_b;
    let gain_scale = raw.noise_b / (raw.g_prime * raw.noise_e);
    Ok(Normalized {
        p_t: raw.pt_prime * power_scale,
        p_j: raw.pj_prime * power_scale,
        rho: raw.rho_prime / raw.g_prime,
        gains: LinkGains::new(a_prime * gain_scale, b_prime * gain_scale),
    })
}

/// Inverse of [`normalize`] given the quantities it divided out.
/// Returns the raw parameters together with `(a', b')`.
pub fn denormalize(
    n: &Normalized,
    g_prime: f64,
    noise_b: f64,
    noise_e: f64,
) -> (RawLinkParams, f64, f64) {
    let power_scale = noise_b / g_prime;
    let gain_scale = g_prime * noise_e / noise_b;
    (
        RawLinkParams {
            g_prime,
            pt_prime: n.p_t * power_scale,
            pj_prime: n.p_j * power_scale,
            rho_prime: n.rho * g_prime,
            noise_b,
            noise_e,
        },
        n.gains.a * gain_scale,
        n.gains.b * gain_scale,
    )
}

/// The normalized scalars that drive every formula.
///
/// `p_j` may be `f64::INFINITY`; formulas then use their `P_J -> inf` limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub p_t: f64,
    pub p_j: f64,
    pub rho: f64,
    pub alpha: f64,
    /// Eve-free radius around Alice, in Alice-Bob distance units.
    pub delta: f64,
}

impl SystemParams {
    pub fn new(p_t: f64, p_j: f64, rho: f64, alpha: f64, delta: f64) -> Result<Self> {
        let params = SystemParams {
            p_t,
            p_j,
            rho,
            alpha,
            delta,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p_t > 0.0 && self.p_t.is_finite()) {
            return Err(invalid("p_t", "must be finite and > 0"));
        }
        if !(self.p_j >= 0.0) {
            return Err(invalid("p_j", "must be >= 0 (infinity allowed)"));
        }
        if !(self.rho >= 0.0 && self.rho.is_finite()) {
            return Err(invalid("rho", "must be finite and >= 0"));
        }
        if !(self.alpha >= 2.0 && self.alpha.is_finite()) {
            return Err(invalid("alpha", "path-loss exponent must be >= 2"));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(invalid("delta", "exclusion radius must be > 0"));
        }
        Ok(())
    }

    pub fn with_p_j(mut self, p_j: f64) -> Self {
        self.p_j = p_j;
        self
    }

    pub fn with_rho(mut self, rho: f64) -> Self {
        self.rho = rho;
        self
    }

    /// `sqrt(P_T / rho)`: the large-`P_T`, small-`rho` optimum at the origin.
    pub fn auto_jam(&self) -> f64 {
        math::sqrt(self.p_t / self.rho)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EveLocation {
    pub x: f64,
    pub y: f64,
}

impl EveLocation {
    pub const ALICE: EveLocation = EveLocation { x: -0.5, y: 0.0 };
    pub const BOB: EveLocation = EveLocation { x: 0.5, y: 0.0 };
    pub const ORIGIN: EveLocation = EveLocation { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        EveLocation { x, y }
    }

    pub fn distance_to_alice(&self) -> f64 {
        math::hypot(self.x + 0.5, self.y)
    }

    pub fn distance_to_bob(&self) -> f64 {
        math::hypot(self.x - 0.5, self.y)
    }
}

/// Large-scale gains from Alice (`a`) and Bob (`b`) to Eve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGains {
    pub a: f64,
    pub b: f64,
}

impl LinkGains {
    pub fn new(a: f64, b: f64) -> Self {
        LinkGains { a, b }
    }

    /// The gains seen from the reverse direction (Bob transmitting).
    pub fn swapped(self) -> Self {
        LinkGains {
            a: self.b,
            b: self.a,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.a.is_finite() && self.b.is_finite()
    }
}

/// Distances and gains of one Eve location.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    pub d_a: f64,
    pub d_b: f64,
    pub gains: LinkGains,
}

/// `d^-alpha`, with the infinite-gain marker at `d = 0`.
pub fn path_gain(distance: f64, alpha: f64) -> f64 {
    if distance == 0.0 {
        f64::INFINITY
    } else {
        math::powf(distance, -alpha)
    }
}

pub fn gains(loc: EveLocation, alpha: f64) -> LinkGeometry {
    let d_a = loc.distance_to_alice();
    let d_b = loc.distance_to_bob();
    LinkGeometry {
        d_a,
        d_b,
        gains: LinkGains::new(path_gain(d_a, alpha), path_gain(d_b, alpha)),
    }
}

/// `b - rho a`, with limits for infinite gains and `rho = 0`.
pub fn rho_margin(g: LinkGains, rho: f64) -> f64 {
    if rho == 0.0 {
        g.b
    } else if g.a.is_infinite() {
        f64::NEG_INFINITY
    } else {
        g.b - rho * g.a
    }
}

/// The four regions that organise positivity of `S_AB`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    /// `b - rho a > 0`, `a < 1`: positive for every jamming power.
    R1,
    /// `b - rho a > 0`, `a >= 1`: positive iff `P_J > gamma`.
    R2,
    /// `b - rho a <= 0`, `a < 1`: positive at `P_J = 0`.
    R3,
    /// `b - rho a <= 0`, `a >= 1`: zero for every jamming power.
    R4,
}

impl Region {
    pub fn index(self) -> u8 {
        match self {
            Region::R1 => 1,
            Region::R2 => 2,
            Region::R3 => 3,
            Region::R4 => 4,
        }
    }
}

pub fn region_classify(g: LinkGains, rho: f64) -> Region {
    let in_r_rho = rho_margin(g, rho) > 0.0;
    match (in_r_rho, g.a < 1.0) {
        (true, true) => Region::R1,
        (true, false) => Region::R2,
        (false, true) => Region::R3,
        (false, false) => Region::R4,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiskSide {
    /// `b > rho a` everywhere outside a disk around Alice (`rho < 1`).
    LeftExclusion,
    /// `b > rho a` everywhere inside a disk around Bob (`rho > 1`).
    RightInclusion,
    /// `b > a` iff `x > 0` (`rho = 1`).
    HalfPlane,
}

/// Boundary `b = rho a`: the circle `(x + x0)^2 + y^2 = r^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskBoundary {
    /// Signed offset; the circle is centred at `(-x0, 0)`.
    pub x0: f64,
    pub r: f64,
    pub side: DiskSide,
}

impl DiskBoundary {
    pub fn center(&self) -> EveLocation {
        EveLocation::new(-self.x0, 0.0)
    }

    /// Whether `(x, y)` lies in `R_rho = {b - rho a > 0}` according to the
    /// circle alone.
    pub fn in_r_rho(&self, loc: EveLocation) -> bool {
        let dx = loc.x + self.x0;
        let s = dx * dx + loc.y * loc.y;
        let r2 = self.r * self.r;
        match self.side {
            DiskSide::HalfPlane => loc.x > 0.0,
            DiskSide::LeftExclusion => s > r2,
            DiskSide::RightInclusion => s < r2,
        }
    }
}

pub fn rho_disk(rho: f64, alpha: f64) -> Result<DiskBoundary> {
    if !(rho >= 0.0) || !rho.is_finite() {
        return Err(invalid("rho", "must be finite and >= 0"));
    }
    if rho == 1.0 {
        return Ok(DiskBoundary {
            x0: f64::INFINITY,
            r: f64::INFINITY,
            side: DiskSide::HalfPlane,
        });
    }
    // rho = 0: the disk degenerates to Alice's point.
    if rho == 0.0 {
        return Ok(DiskBoundary {
            x0: 0.5,
            r: 0.0,
            side: DiskSide::LeftExclusion,
        });
    }
    let q = math::powf(rho, 2.0 / alpha);
    let x0 = (1.0 + q) / (2.0 * (1.0 - q));
    let r = math::sqrt(x0 * x0 - 0.25);
    let side = if rho < 1.0 {
        DiskSide::LeftExclusion
    } else {
        DiskSide::RightInclusion
    };
    Ok(DiskBoundary { x0, r, side })
}

/// Largest `rho` for which `R4` sits inside the Eve-free disk `d_A < Delta`.
///
/// For `Delta > 1` the containment holds for every `rho` (R4 always lies in
/// `d_A <= 1`) and the function returns 1.
pub fn region4_containment_threshold(delta: f64, alpha: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(invalid("delta", "must be > 0"));
    }
    if delta > 1.0 {
        return Ok(1.0);
    }
    Ok(math::powf(delta / (1.0 + delta), alpha))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::ExpSampler;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn normalize_identity_and_scaling() {
        let raw = RawLinkParams {
            g_prime: 1.0,
            pt_prime: 10.0,
            pj_prime: 5.0,
            rho_prime: 0.2,
            noise_b: 1.0,
            noise_e: 1.0,
        };
        let n = normalize(&raw, 3.0, 7.0).unwrap();
        assert_eq!((n.p_t, n.p_j, n.rho, n.gains.a, n.gains.b), (10.0, 5.0, 0.2, 3.0, 7.0));

        let raw2 = RawLinkParams {
            g_prime: 0.01,
            rho_prime: 0.001,
            ..raw
        };
        assert!(close(normalize(&raw2, 1.0, 1.0).unwrap().rho, 0.1, 1e-15));

        let raw3 = RawLinkParams {
            g_prime: 2.0,
            noise_b: 4.0,
            pt_prime: 8.0,
            ..raw
        };
        assert_eq!(normalize(&raw3, 1.0, 1.0).unwrap().p_t, 4.0);
    }

    #[test]
    fn normalize_rejects_bad_inputs() {
        let raw = RawLinkParams {
            g_prime: 0.0,
            pt_prime: 1.0,
            pj_prime: 0.0,
            rho_prime: 0.0,
            noise_b: 1.0,
            noise_e: 1.0,
        };
        assert!(normalize(&raw, 1.0, 1.0).is_err());
        let raw = RawLinkParams {
            g_prime: 1.0,
            noise_e: -1.0,
            ..raw
        };
        assert!(normalize(&raw, 1.0, 1.0).is_err());
    }

    #[test]
    fn gains_examples() {
        let g = gains(EveLocation::ORIGIN, 2.0);
        assert_eq!((g.d_a, g.d_b, g.gains.a, g.gains.b), (0.5, 0.5, 4.0, 4.0));

        let g = gains(EveLocation::new(-0.6, 0.0), 2.0);
        assert!(close(g.gains.a, 100.0, 1e-12));
        assert!(close(g.gains.b, 1.0 / 1.21, 1e-12));

        for alpha in [2.0, 2.7, 4.0] {
            let g = gains(EveLocation::BOB, alpha);
            assert!(g.gains.b.is_infinite());
            assert_eq!(g.gains.a, 1.0);
        }
    }

    #[test]
    fn region_examples() {
        assert_eq!(region_classify(LinkGains::new(0.5, 0.5), 0.1), Region::R1);
        assert_eq!(region_classify(LinkGains::new(4.0, 4.0), 0.01), Region::R2);
        assert_eq!(region_classify(LinkGains::new(2.0, 0.01), 0.1), Region::R4);
        assert_eq!(region_classify(LinkGains::new(0.5, 0.01), 0.1), Region::R3);
        // boundary b = rho a goes to R3/R4
        assert_eq!(region_classify(LinkGains::new(0.5, 0.25), 0.5), Region::R3);
        assert_eq!(region_classify(LinkGains::new(2.0, 1.0), 0.5), Region::R4);
        // Eve on the nodes
        assert_eq!(region_classify(LinkGains::new(f64::INFINITY, 1.0), 0.1), Region::R4);
        assert_eq!(region_classify(LinkGains::new(1.0, f64::INFINITY), 0.1), Region::R2);
    }

    #[test]
    fn disk_examples() {
        let d = rho_disk(1.0, 2.0).unwrap();
        assert_eq!(d.side, DiskSide::HalfPlane);
        assert!(d.in_r_rho(EveLocation::new(0.1, 3.0)));
        assert!(!d.in_r_rho(EveLocation::new(-0.1, 3.0)));

        let d = rho_disk(1e-12, 2.0).unwrap();
        assert!(close(d.x0, 0.5, 1e-9) && d.r < 1e-5);

        let d = rho_disk(0.25, 2.0).unwrap();
        assert!(close(d.x0, 5.0 / 6.0, 1e-14));
        assert!(close(d.r, 2.0 / 3.0, 1e-14));
        let g = gains(EveLocation::new(-1.0 / 6.0, 0.0), 2.0).gains;
        assert!((g.b - 0.25 * g.a).abs() < 1e-12);
        let g = gains(EveLocation::new(-1.5, 0.0), 2.0).gains;
        assert!((g.b - 0.25 * g.a).abs() < 1e-12);

        let d = rho_disk(0.0, 2.0).unwrap();
        assert_eq!((d.x0, d.r), (0.5, 0.0));
        assert!(rho_disk(-1.0, 2.0).is_err());
    }

    #[test]
    fn containment_threshold_examples() {
        let t = region4_containment_threshold(0.1, 2.0).unwrap();
        assert!((t - 0.008_264_462_809_917_356).abs() < 1e-15);
        assert_eq!(region4_containment_threshold(1.0, 2.0).unwrap(), 0.25);
        assert_eq!(region4_containment_threshold(1.5, 2.0).unwrap(), 1.0);
        assert!(region4_containment_threshold(0.0, 2.0).is_err());
    }

    #[test]
    fn disk_agrees_with_gain_sign() {
        let mut s = ExpSampler::new(11, 0);
        let mut checked = 0;
        for _ in 0..100_000 {
            let x = 6.0 * s.uniform() - 3.0;
            let y = 6.0 * s.uniform() - 3.0;
            let rho = crate::math::powf(10.0, 4.0 * s.uniform() - 2.0);
            let alpha = 2.0 + 3.0 * s.uniform();
            let loc = EveLocation::new(x, y);
            let g = gains(loc, alpha).gains;
            let m = rho_margin(g, rho);
            if m.abs() <= 1e-12 * g.b.max(rho * g.a) {
                continue;
            }
            assert_eq!(rho_disk(rho, alpha).unwrap().in_r_rho(loc), m > 0.0, "{x} {y} {rho} {alpha}");
            checked += 1;
        }
        assert!(checked > 99_000);
    }

    #[test]
    fn r3_absent_below_two_pow_minus_alpha() {
        for alpha in [2.0, 3.0, 4.5] {
            let rho = math::powf(2.0, -alpha);
            for i in 0..=400 {
                for j in 0..=400 {
                    let loc = EveLocation::new(-2.0 + 0.01 * i as f64, -2.0 + 0.01 * j as f64);
                    let g = gains(loc, alpha).gains;
                    assert_ne!(region_classify(g, rho), Region::R3);
                    assert_ne!(region_classify(g, 0.5 * rho), Region::R3);
                }
            }
        }
    }

    #[test]
    fn gains_symmetries() {
        let mut s = ExpSampler::new(5, 0);
        for _ in 0..1000 {
            let x = 4.0 * s.uniform() - 2.0;
            let y = 4.0 * s.uniform() - 2.0;
            let alpha = 2.0 + 2.0 * s.uniform();
            let g = gains(EveLocation::new(x, y), alpha).gains;
            assert_eq!(g, gains(EveLocation::new(x, -y), alpha).gains);
            assert_eq!(g.swapped(), gains(EveLocation::new(-x, y), alpha).gains);
        }
    }

    #[test]
    fn normalize_round_trip() {
        let mut s = ExpSampler::new(9, 0);
        for _ in 0..1000 {
            let mut r = || math::powf(10.0, 6.0 * s.uniform() - 3.0);
            let raw = RawLinkParams {
                g_prime: r(),
                pt_prime: r(),
                pj_prime: r(),
                rho_prime: r(),
                noise_b: r(),
                noise_e: r(),
            };
            let (ap, bp) = (r(), r());
            let n = normalize(&raw, ap, bp).unwrap();
            let (back, a2, b2) = denormalize(&n, raw.g_prime, raw.noise_b, raw.noise_e);
            for (u, v) in [
                (back.pt_prime, raw.pt_prime),
                (back.pj_prime, raw.pj_prime),
                (back.rho_prime, raw.rho_prime),
                (a2, ap),
                (b2, bp),
            ] {
                assert!(((u - v) / v).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn params_validation() {
        assert!(SystemParams::new(1.0, 0.0, 0.0, 2.0, 0.1).is_ok());
        assert!(SystemParams::new(1.0, f64::INFINITY, 0.1, 2.0, 0.1).is_ok());
        assert!(SystemParams::new(0.0, 0.0, 0.0, 2.0, 0.1).is_err());
        assert!(SystemParams::new(1.0, -1.0, 0.0, 2.0, 0.1).is_err());
        assert!(SystemParams::new(1.0, 1.0, 0.0, 1.5, 0.1).is_err());
        assert!(SystemParams::new(1.0, 1.0, 0.0, 2.0, 0.0).is_err());
    }
}
