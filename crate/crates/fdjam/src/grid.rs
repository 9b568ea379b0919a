//! Cell-by-cell sweeps of the secrecy, probability, region and jamming fields.

use std::collections::BTreeMap;

use fdjam_core::colluding::{opt_jam, secrecy_ab};
use fdjam_core::colluding_fading::cond_prob_zero;
use fdjam_core::geometry::{gains, region_classify};
use fdjam_core::montecarlo::{derive_seed, ExpSampler};
use fdjam_core::pairwise::secrecy_pair;
use fdjam_core::pairwise_fading::{cond_prob_zero_pair, PairFading};
use fdjam_core::{EveLocation, LinkGains, SystemParams};
use rayon::prelude::*;

use crate::error::{usage, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub step: f64,
}

impl Default for GridSpec {
    /// `[-2, 2]^2` at step 0.01.
    fn default() -> Self {
        GridSpec {
            x_min: -2.0,
            x_max: 2.0,
            y_min: -2.0,
            y_max: 2.0,
            step: 0.01,
        }
    }
}

fn axis_len(lo: f64, hi: f64, step: f64) -> usize {
    ((hi - lo) / step + 1.0 + 1e-9).floor() as usize
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64, step: f64) -> Result<Self> {
        let spec = GridSpec {
            x_min,
            x_max,
            y_min,
            y_max,
            step,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.x_min, self.x_max, self.y_min, self.y_max, self.step];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(usage("grid bounds and step must be finite"));
        }
        if self.step <= 0.0 {
            return Err(usage("grid step must be > 0"));
        }
        if !(self.x_min < self.x_max && self.y_min < self.y_max) {
            return Err(usage("grid needs x_min < x_max and y_min < y_max"));
        }
        if self.nx().checked_mul(self.ny()).is_none_or(|n| n > 1 << 28) {
            return Err(usage("grid has too many cells"));
        }
        Ok(())
    }

    pub fn nx(&self) -> usize {
        axis_len(self.x_min, self.x_max, self.step)
    }

    pub fn ny(&self) -> usize {
        axis_len(self.y_min, self.y_max, self.step)
    }

    pub fn len(&self) -> usize {
        self.nx() * self.ny()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.step
    }

    pub fn y(&self, j: usize) -> f64 {
        self.y_min + j as f64 * self.step
    }

    /// Location of cell `k` in row-major order (x varies fastest).
    pub fn location(&self, k: usize) -> EveLocation {
        let nx = self.nx();
        EveLocation::new(self.x(k % nx), self.y(k / nx))
    }

    pub fn locations(&self) -> impl Iterator<Item = EveLocation> + '_ {
        (0..self.len()).map(|k| self.location(k))
    }

    pub(crate) fn echo(&self, meta: &mut BTreeMap<String, String>) {
        for (k, v) in [
            ("x_min", self.x_min),
            ("x_max", self.x_max),
            ("y_min", self.y_min),
            ("y_max", self.y_max),
            ("step", self.step),
        ] {
            meta.insert(k.to_string(), float_repr(v));
        }
    }
}

/// Shortest decimal that parses back to the same `f64`.
pub fn float_repr(v: f64) -> String {
    format!("{v:?}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    pub spec: GridSpec,
    /// One value per cell, row-major with y as the outer index.
    pub values: Vec<f64>,
    /// Every parameter needed to regenerate the grid.
    pub meta: BTreeMap<String, String>,
}

impl FieldGrid {
    /// Builds a grid and records its bounds in `meta`.
    pub fn new(spec: GridSpec, values: Vec<f64>, mut meta: BTreeMap<String, String>) -> Result<Self> {
        spec.validate()?;
        if values.len() != spec.len() {
            return Err(usage(format!("{} values for {} cells", values.len(), spec.len())));
        }
        spec.echo(&mut meta);
        Ok(FieldGrid { spec, values, meta })
    }

    pub fn cells(&self) -> impl Iterator<Item = (EveLocation, f64)> + '_ {
        self.spec.locations().zip(self.values.iter().copied())
    }

    pub fn value_at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.spec.nx() + i]
    }

    fn extreme_where<P>(&self, keep: P, better: fn(f64, f64) -> bool) -> Option<(EveLocation, f64)>
    where
        P: Fn(EveLocation) -> bool,
    {
        let mut best: Option<(EveLocation, f64)> = None;
        for (loc, v) in self.cells() {
            if v.is_nan() || !keep(loc) {
                continue;
            }
            let replace = match best {
                None => true,
                Some((bl, bv)) => better(v, bv) || (v == bv && (loc.x, loc.y) < (bl.x, bl.y)),
            };
            if replace {
                best = Some((loc, v));
            }
        }
        best
    }

    /// Smallest value among cells accepted by `keep`; ties go to the
    /// lexicographically smallest `(x, y)`. NaN cells are skipped.
    pub fn argmin_where<P: Fn(EveLocation) -> bool>(&self, keep: P) -> Option<(EveLocation, f64)> {
        self.extreme_where(keep, |a, b| a < b)
    }

    pub fn argmax_where<P: Fn(EveLocation) -> bool>(&self, keep: P) -> Option<(EveLocation, f64)> {
        self.extreme_where(keep, |a, b| a > b)
    }

    pub fn argmin(&self) -> Option<(EveLocation, f64)> {
        self.argmin_where(|_| true)
    }

    pub fn argmax(&self) -> Option<(EveLocation, f64)> {
        self.argmax_where(|_| true)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// One-way secrecy `S_AB` against colluding eavesdroppers.
    Colluding,
    /// Dual-phase secrecy `(S_AB + S_BA) / 2`.
    Pairwise,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Colluding => "colluding",
            Mode::Pairwise => "pairwise",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Secrecy,
    /// Zero-secrecy probability over the Eve fading factors, with the
    /// Alice-Bob and self-interference factors fixed at one.
    ProbZero,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::Secrecy => "secrecy",
            Quantity::ProbZero => "prob-zero",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldRequest {
    pub mode: Mode,
    pub quantity: Quantity,
    /// Draw fresh Eve fading factors in every cell.
    pub fading: bool,
    /// Replace `params.p_j` by the per-cell optimal jamming power.
    pub optimal_jamming: bool,
    pub params: SystemParams,
    /// Seed for the per-cell fading draws.
    pub seed: Option<u64>,
}

impl FieldRequest {
    pub fn meta(&self) -> BTreeMap<String, String> {
        let mut meta = params_meta(&self.params);
        meta.insert("kind".into(), "field".into());
        meta.insert("mode".into(), self.mode.name().into());
        meta.insert("quantity".into(), self.quantity.name().into());
        meta.insert("fading".into(), self.fading.to_string());
        let jam = if self.optimal_jamming { "optimal" } else { "fixed" };
        meta.insert("jamming".into(), jam.into());
        if let Some(seed) = self.seed {
            meta.insert("seed".into(), seed.to_string());
        }
        meta
    }
}

pub fn params_meta(p: &SystemParams) -> BTreeMap<String, String> {
    let mut meta = BTreeMap::new();
    for (k, v) in [
        ("p_t", p.p_t),
        ("p_j", p.p_j),
        ("rho", p.rho),
        ("alpha", p.alpha),
        ("delta", p.delta),
    ] {
        meta.insert(k.to_string(), float_repr(v));
    }
    meta
}

fn scaled(gain: f64, factor: f64) -> f64 {
    if gain.is_infinite() {
        gain
    } else {
        gain * factor
    }
}

/// Optimal jamming power for a cell, `None` at the nodes themselves.
fn cell_opt_jam(g: LinkGains, rho: f64, p_t: f64) -> Result<Option<f64>> {
    if !g.is_finite() {
        return Ok(None);
    }
    Ok(Some(opt_jam(g, rho, p_t)?.p_j_opt))
}

fn cell_value(req: &FieldRequest, cell: usize, loc: EveLocation) -> Result<f64> {
    let p = req.params;
    let g = gains(loc, p.alpha).gains;
    let p = if req.optimal_jamming {
        // At a node the supremum is approached as P_J -> 0+.
        p.with_p_j(cell_opt_jam(g, p.rho, p.p_t)?.unwrap_or(f64::MIN_POSITIVE))
    } else {
        p
    };
    let value = match (req.quantity, req.fading) {
        (Quantity::Secrecy, false) => match req.mode {
            Mode::Colluding => secrecy_ab(g, &p),
            Mode::Pairwise => secrecy_pair(g, &p).s,
        },
        (Quantity::Secrecy, true) => {
            let seed = req.seed.ok_or_else(|| usage("fading fields need a seed"))?;
            let mut s = ExpSampler::new(derive_seed(seed, cell as u64), 0);
            let faded = LinkGains::new(scaled(g.a, s.exp()), scaled(g.b, s.exp()));
            match req.mode {
                Mode::Colluding => secrecy_ab(faded, &p),
                Mode::Pairwise => secrecy_pair(faded, &p).s,
            }
        }
        (Quantity::ProbZero, true) => match req.mode {
            Mode::Colluding => cond_prob_zero(g, &p, 1.0, 1.0),
            Mode::Pairwise => cond_prob_zero_pair(g, &p, PairFading::UNIT),
        },
        (Quantity::ProbZero, false) => return Err(usage("prob-zero fields need fading")),
    };
    Ok(value)
}

/// Sweeps one scalar per cell. Cells are independent and fading cells seed
/// from `(seed, cell index)`, so the result does not depend on the thread count.
pub fn field(req: &FieldRequest, spec: &GridSpec) -> Result<FieldGrid> {
    spec.validate()?;
    req.params.validate()?;
    if req.optimal_jamming && req.mode != Mode::Colluding {
        return Err(usage("optimal jamming is only defined in colluding mode"));
    }
    if req.fading && req.seed.is_none() {
        return Err(usage("fading fields need a seed"));
    }
    if req.quantity == Quantity::ProbZero && !req.fading {
        return Err(usage("prob-zero fields need fading"));
    }
    let values = (0..spec.len())
        .into_par_iter()
        .map(|k| cell_value(req, k, spec.location(k)))
        .collect::<Result<Vec<f64>>>()?;
    FieldGrid::new(*spec, values, req.meta())
}

/// Region index (1 to 4) of every cell.
pub fn region_grid(rho: f64, alpha: f64, spec: &GridSpec) -> Result<FieldGrid> {
    if !(rho >= 0.0 && rho.is_finite()) {
        return Err(usage("rho must be finite and >= 0"));
    }
    if !(alpha >= 2.0 && alpha.is_finite()) {
        return Err(usage("alpha must be >= 2"));
    }
    spec.validate()?;
    let values = (0..spec.len())
        .into_par_iter()
        .map(|k| f64::from(region_classify(gains(spec.location(k), alpha).gains, rho).index()))
        .collect();
    let mut meta = BTreeMap::new();
    meta.insert("kind".into(), "regions".into());
    meta.insert("rho".into(), float_repr(rho));
    meta.insert("alpha".into(), float_repr(alpha));
    FieldGrid::new(*spec, values, meta)
}

/// Optimal jamming power of every cell; NaN at the nodes, where it is undefined.
pub fn optjam_grid(params: &SystemParams, spec: &GridSpec) -> Result<FieldGrid> {
    params.validate()?;
    spec.validate()?;
    let p = *params;
    let values = (0..spec.len())
        .into_par_iter()
        .map(|k| {
            let g = gains(spec.location(k), p.alpha).gains;
            Ok(cell_opt_jam(g, p.rho, p.p_t)?.unwrap_or(f64::NAN))
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut meta = params_meta(params);
    meta.remove("p_j");
    meta.insert("kind".into(), "optjam".into());
    FieldGrid::new(*spec, values, meta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use fdjam_core::colluding::zero_region_predicate;
    use fdjam_core::pairwise::positivity_pair;

    fn small() -> GridSpec {
        GridSpec::new(-1.5, 1.5, -1.0, 1.0, 0.05).unwrap()
    }

    #[test]
    fn cell_count_formula() {
        let g = GridSpec::default();
        assert_eq!((g.nx(), g.ny(), g.len()), (401, 401, 160_801));
        let g = GridSpec::new(0.0, 1.0, 0.0, 0.25, 0.1).unwrap();
        assert_eq!((g.nx(), g.ny()), (11, 3));
        assert_eq!(g.location(12), EveLocation::new(0.1, 0.1));
    }

    #[test]
    fn invalid_grids_rejected() {
        assert!(GridSpec::new(1.0, 0.0, 0.0, 1.0, 0.1).is_err());
        assert!(GridSpec::new(0.0, 1.0, 0.0, 1.0, 0.0).is_err());
        assert!(GridSpec::new(0.0, 1.0, 0.0, f64::NAN, 0.1).is_err());
    }

    #[test]
    fn ties_break_lexicographically() {
        let spec = GridSpec::new(0.0, 1.0, 0.0, 1.0, 1.0).unwrap();
        let grid = FieldGrid::new(spec, vec![1.0, 0.0, 0.0, 1.0], BTreeMap::new()).unwrap();
        let (loc, v) = grid.argmin().unwrap();
        assert_eq!((loc.x, loc.y, v), (0.0, 1.0, 0.0));
        let (loc, _) = grid.argmax().unwrap();
        assert_eq!((loc.x, loc.y), (0.0, 0.0));
    }

    #[test]
    fn colluding_zero_cells_match_zero_region() {
        let p = SystemParams::new(1e4, 0.0, 0.1, 2.0, 0.1).unwrap();
        let p = p.with_p_j(p.auto_jam());
        let req = FieldRequest {
            mode: Mode::Colluding,
            quantity: Quantity::Secrecy,
            fading: false,
            optimal_jamming: false,
            params: p,
            seed: None,
        };
        let grid = field(&req, &small()).unwrap();
        let mut zeros = 0;
        for (loc, v) in grid.cells() {
            let g = gains(loc, p.alpha).gains;
            if !g.is_finite() {
                continue;
            }
            assert_eq!(v == 0.0, zero_region_predicate(g, &p).unwrap(), "{loc:?}");
            zeros += (v == 0.0) as usize;
        }
        assert!(zeros > 10);
    }

    #[test]
    fn unjammed_pairwise_positivity_is_the_almond() {
        let p = SystemParams::new(100.0, 0.0, 0.01, 2.0, 0.1).unwrap();
        let req = FieldRequest {
            mode: Mode::Pairwise,
            quantity: Quantity::Secrecy,
            fading: false,
            optimal_jamming: false,
            params: p,
            seed: None,
        };
        let grid = field(&req, &small()).unwrap();
        for (loc, v) in grid.cells() {
            let g = gains(loc, p.alpha).gains;
            let inside = loc.distance_to_alice() <= 1.0 && loc.distance_to_bob() <= 1.0;
            assert_eq!(v > 0.0, !inside, "{loc:?}");
            if g.is_finite() {
                assert_eq!(v > 0.0, positivity_pair(g, p.rho).without_jamming, "{loc:?}");
            }
        }
    }

    #[test]
    fn optimal_jamming_rejected_in_pairwise_mode() {
        let p = SystemParams::new(100.0, 1.0, 0.01, 2.0, 0.1).unwrap();
        let req = FieldRequest {
            mode: Mode::Pairwise,
            quantity: Quantity::Secrecy,
            fading: false,
            optimal_jamming: true,
            params: p,
            seed: None,
        };
        assert!(field(&req, &small()).is_err());
    }

    #[test]
    fn optimal_jamming_field_dominates_fixed() {
        let p = SystemParams::new(100.0, 50.0, 0.05, 2.0, 0.1).unwrap();
        let mut req = FieldRequest {
            mode: Mode::Colluding,
            quantity: Quantity::Secrecy,
            fading: false,
            optimal_jamming: false,
            params: p,
            seed: None,
        };
        let fixed = field(&req, &small()).unwrap();
        req.optimal_jamming = true;
        let best = field(&req, &small()).unwrap();
        for (f, b) in fixed.values.iter().zip(&best.values) {
            assert!(b + 1e-12 >= *f);
        }
    }

    #[test]
    fn region_labels_cover_one_to_four() {
        let grid = region_grid(0.1, 2.0, &small()).unwrap();
        assert!(grid.values.iter().all(|v| [1.0, 2.0, 4.0].contains(v)));
        assert!(grid.values.contains(&4.0) && grid.values.contains(&1.0));
    }
}
