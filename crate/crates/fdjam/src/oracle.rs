//! Brute-force references for the closed forms. Everything here works from
//! the raw SNR definitions, never from the closed-form algebra it checks.

use fdjam_core::colluding_fading::ColludingFading;
use fdjam_core::montecarlo::{estimate_with, ChunkRunner, Estimate, McConfig};
use fdjam_core::pairwise_fading::PairFading;
use fdjam_core::{LinkGains, Result, SystemParams};

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Maximizes a unimodal `f` on `[lo, hi]`; returns `(x, f(x))`.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, rel_tol: f64) -> (f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..400 {
        if hi - lo <= rel_tol * hi.abs().max(f64::MIN_POSITIVE) {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (l0, l1) = (lo.log10(), hi.log10());
    (0..n).map(|k| 10f64.powf(l0 + (l1 - l0) * k as f64 / (n - 1) as f64)).collect()
}

/// `(log2(1 + to_bob) - log2(1 + to_eve))^+` straight from the capacities.
pub fn secrecy_from_capacities(to_bob: f64, to_eve: f64) -> f64 {
    ((to_bob.ln_1p() - to_eve.ln_1p()) / std::f64::consts::LN_2).max(0.0)
}

/// One-way secrecy at finite gains `(a, b)` and jamming power `p_j`.
pub fn colluding_secrecy(a: f64, b: f64, rho: f64, p_t: f64, p_j: f64) -> f64 {
    secrecy_from_capacities(p_t / (1.0 + rho * p_j), a * p_t / (1.0 + b * p_j))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptimum {
    pub p_j: f64,
    pub secrecy: f64,
}

/// Best jamming power by a 2000-point log grid on `[1e-6, 1e9]` (extended
/// to `1e18` when the maximum sits on the upper edge) plus `P_J = 0`, then
/// golden-section refinement between the neighbours of the best grid point.
pub fn opt_jam_oracle(g: LinkGains, rho: f64, p_t: f64) -> OracleOptimum {
    let s = |pj: f64| colluding_secrecy(g.a, g.b, rho, p_t, pj);
    let best_on = |grid: &[f64]| {
        let mut best = 0;
        for (k, &pj) in grid.iter().enumerate() {
            if s(pj) > s(grid[best]) {
                best = k;
            }
        }
        best
    };
    let mut grid = log_grid(1e-6, 1e9, 2000);
    let mut i = best_on(&grid);
    if i == grid.len() - 1 {
        grid = log_grid(1e9, 1e18, 2000);
        i = best_on(&grid);
    }
    let lo = if i == 0 { 0.0 } else { grid[i - 1] };
    let hi = grid[(i + 1).min(grid.len() - 1)];
    let (mut p_j, mut secrecy) = golden_section_max(s, lo, hi, 1e-15);
    if s(grid[i]) > secrecy {
        (p_j, secrecy) = (grid[i], s(grid[i]));
    }
    if s(0.0) >= secrecy {
        (p_j, secrecy) = (0.0, s(0.0));
    }
    OracleOptimum { p_j, secrecy }
}

/// `sqrt(p (1 - p) / n)`: the standard error of a frequency with true value `p`.
pub fn binomial_sigma(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Frequency of `S_AB = 0` over `(C̃, D̃)` with `Ã, B̃` held fixed.
pub fn colluding_mc<C: ChunkRunner>(
    g: LinkGains,
    params: &SystemParams,
    a_tilde: f64,
    b_tilde: f64,
    mc: McConfig,
    runner: &C,
) -> Result<Estimate> {
    let p = *params;
    estimate_with(mc, runner, move |s| {
        let f = ColludingFading {
            a_tilde,
            b_tilde,
            c_tilde: s.exp(),
            d_tilde: s.exp(),
        };
        f.secrecy_is_zero(g, &p) as u8 as f64
    })
}

/// Frequency of `S = 0` over `(C̃, D̃)` with the pair factors held fixed.
pub fn pair_mc<C: ChunkRunner>(
    g: LinkGains,
    params: &SystemParams,
    f: PairFading,
    mc: McConfig,
    runner: &C,
) -> Result<Estimate> {
    let p = *params;
    estimate_with(mc, runner, move |s| {
        let (c, d) = (s.exp(), s.exp());
        f.secrecy_is_zero(g, &p, c, d) as u8 as f64
    })
}

/// Frequency of `S = 0` over every fading factor.
pub fn pair_mc_unconditional<C: ChunkRunner>(
    g: LinkGains,
    params: &SystemParams,
    mc: McConfig,
    runner: &C,
) -> Result<Estimate> {
    let p = *params;
    estimate_with(mc, runner, move |s| {
        let f = PairFading::sample(s);
        let (c, d) = (s.exp(), s.exp());
        f.secrecy_is_zero(g, &p, c, d) as u8 as f64
    })
}

fn simpson<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, intervals: usize) -> f64 {
    let n = intervals + intervals % 2;
    let h = (hi - lo) / n as f64;
    let mut sum = f(lo) + f(hi);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(lo + k as f64 * h);
    }
    sum * h / 3.0
}

type Bound = Box<dyn Fn(f64) -> f64>;

/// `P(S = 0 | Ã, B̃1, B̃2)` as the integral of `e^{-c-d}` over the set of
/// Eve factors `(c, d)` where both directional secrecies vanish. The inner
/// `d` integral is exact; the outer one is Simpson's rule from the start of
/// the set over 40 decay lengths. Gains must be finite.
pub fn pair_wedge(g: LinkGains, params: &SystemParams, f: PairFading) -> f64 {
    let (a, b, rho, pj) = (g.a, g.b, params.rho, params.p_j);
    let (at, b1, b2) = (f.a_tilde, f.b1_tilde, f.b2_tilde);
    // S_AB = 0  <=>  d <= upper(c);  S_BA = 0  <=>  d >= lower(c)
    let (lower, upper): (Bound, Bound) = if pj == 0.0 {
        (
            Box::new(move |_| at / b),
            Box::new(move |c| if a * c >= at { f64::INFINITY } else { -1.0 }),
        )
    } else if pj.is_infinite() {
        (
            Box::new(move |c| at * a * c / (b * rho * b2)),
            Box::new(move |c| a * c * rho * b1 / (at * b)),
        )
    } else {
        let (z1, z2) = (1.0 + rho * b1 * pj, 1.0 + rho * b2 * pj);
        (
            Box::new(move |c| at * (1.0 + a * c * pj) / (b * z2)),
            Box::new(move |c| (a * c * z1 / at - 1.0) / (b * pj)),
        )
    };
    // the set is nonempty on a half-line of c: find where it starts
    let open = |c: f64| upper(c) > lower(c);
    let mut hi = 1.0;
    while !open(hi) {
        hi *= 2.0;
        if hi > 1e300 {
            return 0.0;
        }
    }
    let mut lo = 0.0;
    if !open(lo) {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if open(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    } else {
        hi = 0.0;
    }
    let start = hi;
    let scale = (-start).exp();
    if scale == 0.0 {
        return 0.0;
    }
    // the integrand decays at least like exp(-(1 + lower') t); the upper
    // term can switch off on a much shorter scale, so resolve that first
    let slope = |h: &dyn Fn(f64) -> f64| (h(start + 1.0) - h(start)).max(0.0);
    let span = 40.0 / (1.0 + slope(&lower));
    let knee = (40.0 / (1.0 + slope(&upper))).min(span);
    let integrand = |t: f64| {
        let c = start + t;
        let (l, u) = (lower(c), upper(c));
        if u <= l {
            return 0.0;
        }
        (-t).exp() * ((-l).exp() - (-u).exp())
    };
    scale * (simpson(integrand, 0.0, knee, 20_000) + simpson(integrand, knee, span, 20_000))
}

pub fn central_difference<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}
