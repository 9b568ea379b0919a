//! Gauss-Legendre rules and expectations over pairs of Exp(1) variates.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use crate::math;

/// An `n`-point Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Tricomi's initial guess, then Newton on P_n.
            let mut x = math::cos(PI * (i as f64 + 0.75) / (nf + 0.5));
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, lo: f64, hi: f64, mut f: F) -> f64 {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }

    /// The rule applied on `panels` equal sub-intervals.
    pub fn integrate_composite<F: FnMut(f64) -> f64>(
        &self,
        lo: f64,
        hi: f64,
        panels: usize,
        mut f: F,
    ) -> f64 {
        let h = (hi - lo) / panels as f64;
        (0..panels)
            .map(|k| {
                let a = lo + h * k as f64;
                self.integrate(a, a + h, &mut f)
            })
            .sum()
    }
}

// P_n(x) and P_n'(x) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// `E[f(U, V)]` for independent `U, V ~ Exp(1)`.
///
/// Uses `U = r^2 cos^2(t)`, `V = r^2 sin^2(t)`, under which the density
/// becomes `4 r^3 cos(t) sin(t) exp(-r^2)` on `[0, inf) x [0, pi/2]`; the
/// radius is truncated at 7 where the remaining mass is below `1e-19`.
/// Accurate for `f` bounded and smooth in the square roots of its arguments.
#[derive(Debug, Clone)]
pub struct ExpPairRule {
    rule: GaussLegendre,
    panels: usize,
}

pub const EXP_PAIR_RADIUS: f64 = 7.0;

impl Default for ExpPairRule {
    fn default() -> Self {
        ExpPairRule {
            rule: GaussLegendre::new(24),
            panels: 12,
        }
    }
}

impl ExpPairRule {
    pub fn new(order: usize, panels: usize) -> Self {
        ExpPairRule {
            rule: GaussLegendre::new(order),
            panels,
        }
    }

    pub fn expect<F: FnMut(f64, f64) -> f64>(&self, mut f: F) -> f64 {
        self.rule.integrate_composite(0.0, FRAC_PI_2, self.panels, |t| {
            let (c, s) = (math::cos(t), math::sin(t));
            let (c2, s2) = (c * c, s * s);
            self.rule
                .integrate_composite(0.0, EXP_PAIR_RADIUS, self.panels, |r| {
                    let r2 = r * r;
                    4.0 * r2 * r * c * s * math::exp(-r2) * f(r2 * c2, r2 * s2)
                })
        })
    }
}
