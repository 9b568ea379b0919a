use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fdjam_core::colluding::{opt_jam, secrecy_ab};
use fdjam_core::colluding_fading::{cdf_lower_bound, cond_prob_zero, uncond_prob_zero};
use fdjam_core::geometry::gains;
use fdjam_core::montecarlo::{ecdf, sample_values, McConfig};
use fdjam_core::pairwise_fading::{cond_prob_samples, cond_prob_zero_pair, policy_prob_zero, JamPolicy, PairFading};
use fdjam_core::{EveLocation, LinkGains, SystemParams};

use crate::config::{ConfigFile, JamChoice, Settings, SEED_ENV};
use crate::error::{usage, Result};
use crate::export::{self, Format};
use crate::grid::{field, float_repr, optjam_grid, region_grid, FieldGrid, FieldRequest, Mode, Quantity};
use crate::oracle::{colluding_mc, pair_mc, pair_mc_unconditional};
use crate::parallel::{with_threads, Parallel};
use crate::verify::{policy_rows, policy_table, run_suite};

#[derive(Debug, Parser)]
#[command(name = "fdjam", version, about = "Secrecy fields of a full-duplex jamming link")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sweep secrecy or zero-secrecy probability over a grid of Eve locations.
    Field {
        #[arg(long, value_enum, default_value_t = ModeArg::Colluding)]
        mode: ModeArg,
        #[arg(long, value_enum, default_value_t = QuantityArg::Secrecy)]
        quantity: QuantityArg,
        /// Draw fresh Eve fading factors in every cell.
        #[arg(long)]
        fading: bool,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Label every grid cell with its region (1 to 4).
    Regions {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Optimal jamming power for gains (--a, --b), at a location, or over a grid.
    Optjam {
        #[arg(long, allow_negative_numbers = true, requires = "b")]
        a: Option<f64>,
        #[arg(long, allow_negative_numbers = true, requires = "a")]
        b: Option<f64>,
        #[arg(long, num_args = 2, value_names = ["X", "Y"], allow_negative_numbers = true, conflicts_with = "a")]
        at: Option<Vec<f64>>,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Zero-secrecy probability at one location: closed form and Monte Carlo.
    ProbZero {
        #[arg(long, value_enum, default_value_t = ModeArg::Colluding)]
        mode: ModeArg,
        #[command(flatten)]
        point: PointArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Empirical CDF of the conditional zero-secrecy probability, with the
    /// closed-form lower bound in colluding mode.
    Cdf {
        #[arg(long, value_enum, default_value_t = ModeArg::Colluding)]
        mode: ModeArg,
        #[arg(long, num_args = 2, value_names = ["X", "Y"], allow_negative_numbers = true)]
        at: Option<Vec<f64>>,
        #[command(flatten)]
        common: Common,
    },
    /// Zero-secrecy probability under a jamming policy, or the policy
    /// comparison table over a jamming-power ladder.
    Policy {
        #[arg(long, value_enum, default_value_t = PolicyArg::SemiDynamic)]
        policy: PolicyArg,
        /// Acceptance threshold of the general-dynamic policy.
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long, num_args = 2, value_names = ["X", "Y"], allow_negative_numbers = true)]
        at: Option<Vec<f64>>,
        /// Print the semi-dynamic / constant comparison over P_J = 0..60 dB.
        #[arg(long)]
        ladder: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Run the oracle verification suites.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Colluding,
    Pairwise,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Colluding => Mode::Colluding,
            ModeArg::Pairwise => Mode::Pairwise,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum QuantityArg {
    Secrecy,
    ProbZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    Constant,
    SemiDynamic,
    FullDynamic,
    GeneralDynamic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

/// Model, Monte Carlo and execution settings shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// Transmit power (linear, normalized).
    #[arg(long)]
    pub pt: Option<f64>,
    #[arg(long = "pt-db", allow_negative_numbers = true)]
    pub pt_db: Option<f64>,
    /// Jamming power (linear, normalized; `inf` allowed).
    #[arg(long)]
    pub pj: Option<f64>,
    #[arg(long = "pj-db", allow_negative_numbers = true)]
    pub pj_db: Option<f64>,
    /// Jam at sqrt(P_T / rho) (the default).
    #[arg(long = "pj-auto")]
    pub pj_auto: bool,
    /// Jam at the per-cell optimum (colluding fields only).
    #[arg(long = "pj-opt")]
    pub pj_opt: bool,
    /// Residual self-interference gain.
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long = "rho-db", allow_negative_numbers = true)]
    pub rho_db: Option<f64>,
    /// Path-loss exponent (default 2).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Eve-free radius around Alice (default 0.1).
    #[arg(long)]
    pub delta: Option<f64>,
    /// Monte Carlo seed (default: $FDJAM_SEED, else 1).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Monte Carlo sample count.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Flat key=value file; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GridArgs {
    #[arg(long = "x-min", allow_negative_numbers = true)]
    pub x_min: Option<f64>,
    #[arg(long = "x-max", allow_negative_numbers = true)]
    pub x_max: Option<f64>,
    #[arg(long = "y-min", allow_negative_numbers = true)]
    pub y_min: Option<f64>,
    #[arg(long = "y-max", allow_negative_numbers = true)]
    pub y_max: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct OutArgs {
    /// Output format (default: from the file extension, else csv).
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Output file (default: stdout).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct PointArgs {
    /// Eve location (default: -0.6 0).
    #[arg(long, num_args = 2, value_names = ["X", "Y"], allow_negative_numbers = true)]
    pub at: Option<Vec<f64>>,
    /// Alice-Bob fading factor held fixed for the conditional probability.
    #[arg(long = "a-tilde", default_value_t = 1.0)]
    pub a_tilde: f64,
    /// Self-interference fading factor (colluding, and first pairwise phase).
    #[arg(long = "b-tilde", default_value_t = 1.0)]
    pub b_tilde: f64,
    /// Self-interference fading factor of the second pairwise phase.
    #[arg(long = "b2-tilde", default_value_t = 1.0)]
    pub b2_tilde: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    VerifyFailed,
}

fn settings(common: &Common, grid: Option<&GridArgs>) -> Result<Settings> {
    let mut flags: BTreeMap<String, String> = BTreeMap::new();
    let mut put = |k: &str, v: Option<f64>| {
        if let Some(v) = v {
            flags.insert(k.to_string(), float_repr(v));
        }
    };
    put("pt", common.pt);
    put("pt-db", common.pt_db);
    put("pj", common.pj);
    put("pj-db", common.pj_db);
    put("rho", common.rho);
    put("rho-db", common.rho_db);
    put("alpha", common.alpha);
    put("delta", common.delta);
    if let Some(g) = grid {
        put("x-min", g.x_min);
        put("x-max", g.x_max);
        put("y-min", g.y_min);
        put("y-max", g.y_max);
        put("step", g.step);
    }
    if common.pj_auto {
        flags.insert("pj-auto".into(), "true".into());
    }
    if common.pj_opt {
        flags.insert("pj-opt".into(), "true".into());
    }
    if let Some(s) = common.seed {
        flags.insert("seed".into(), s.to_string());
    }
    if let Some(n) = common.samples {
        flags.insert("samples".into(), n.to_string());
    }
    if let Some(n) = common.threads {
        flags.insert("threads".into(), n.to_string());
    }
    let file = common.config.as_deref().map(ConfigFile::load).transpose()?;
    let env_seed = std::env::var(SEED_ENV).ok();
    Settings::resolve(&flags, file.as_ref(), env_seed.as_deref())
}

fn location(at: &Option<Vec<f64>>, default: EveLocation) -> EveLocation {
    match at.as_deref() {
        Some([x, y]) => EveLocation::new(*x, *y),
        _ => default,
    }
}

fn emit_grid(grid: &FieldGrid, out_args: &OutArgs, stdout: &mut dyn Write) -> Result<()> {
    let format = match (out_args.format, &out_args.output) {
        (Some(FormatArg::Csv), _) => Format::Csv,
        (Some(FormatArg::Json), _) => Format::Json,
        (None, Some(p)) if p.extension().is_some_and(|e| e == "json") => Format::Json,
        _ => Format::Csv,
    };
    match &out_args.output {
        Some(path) => export::write(grid, format, BufWriter::new(File::create(path)?)),
        None => export::write(grid, format, stdout),
    }
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<Outcome> {
    match cli.command {
        Command::Field {
            mode,
            quantity,
            fading,
            common,
            grid,
            out: out_args,
        } => {
            let s = settings(&common, Some(&grid))?;
            let req = FieldRequest {
                mode: mode.into(),
                quantity: match quantity {
                    QuantityArg::Secrecy => Quantity::Secrecy,
                    QuantityArg::ProbZero => Quantity::ProbZero,
                },
                fading,
                optimal_jamming: s.jam == JamChoice::Optimal,
                params: s.params()?,
                seed: fading.then_some(s.seed),
            };
            let g = with_threads(s.threads, || field(&req, &s.grid))??;
            emit_grid(&g, &out_args, out)?;
        }
        Command::Regions {
            common,
            grid,
            out: out_args,
        } => {
            let s = settings(&common, Some(&grid))?;
            let g = with_threads(s.threads, || region_grid(s.rho, s.alpha, &s.grid))??;
            emit_grid(&g, &out_args, out)?;
        }
        Command::Optjam {
            a,
            b,
            at,
            common,
            grid,
            out: out_args,
        } => {
            let s = settings(&common, Some(&grid))?;
            let g = match (a, b, &at) {
                (Some(a), Some(b), _) => Some(LinkGains::new(a, b)),
                (_, _, Some(_)) => Some(gains(location(&at, EveLocation::ORIGIN), s.alpha).gains),
                _ => None,
            };
            match g {
                Some(g) => {
                    if !(g.a > 0.0 && g.b > 0.0 && g.is_finite()) {
                        return Err(usage("gains must be finite and > 0"));
                    }
                    let r = opt_jam(g, s.rho, s.p_t)?;
                    let p = SystemParams::new(s.p_t, r.p_j_opt, s.rho, s.alpha, s.delta)?;
                    writeln!(out, "a = {}", g.a)?;
                    writeln!(out, "b = {}", g.b)?;
                    writeln!(out, "region = R{}", r.region.index())?;
                    writeln!(out, "p_j_opt = {}", r.p_j_opt)?;
                    writeln!(out, "p_j_opt_db = {:.4}", fdjam_core::to_db(r.p_j_opt))?;
                    writeln!(out, "note = {:?}", r.note)?;
                    let opt = |v: Option<f64>| v.map_or("undefined".to_string(), |x| x.to_string());
                    writeln!(out, "gamma = {}", opt(r.gamma))?;
                    writeln!(out, "beta = {}", opt(r.beta))?;
                    writeln!(out, "secrecy = {}", secrecy_ab(g, &p))?;
                }
                None => {
                    let p = SystemParams::new(s.p_t, 0.0, s.rho, s.alpha, s.delta)?;
                    let grid = with_threads(s.threads, || optjam_grid(&p, &s.grid))??;
                    emit_grid(&grid, &out_args, out)?;
                }
            }
        }
        Command::ProbZero { mode, point, common } => {
            let s = settings(&common, None)?;
            let p = s.fixed_params("prob-zero")?;
            let loc = location(&point.at, EveLocation::new(-0.6, 0.0));
            let g = gains(loc, s.alpha).gains;
            let mc = McConfig::new(s.seed, s.samples);
            let r = &Parallel;
            writeln!(out, "location = ({}, {})", loc.x, loc.y)?;
            writeln!(out, "samples = {}", s.samples)?;
            writeln!(out, "seed = {}", s.seed)?;
            let (closed, sim, values, extra) = with_threads(s.threads, || -> Result<_> {
                Ok(match mode {
                    ModeArg::Colluding => {
                        let closed = cond_prob_zero(g, &p, point.a_tilde, point.b_tilde);
                        let sim = colluding_mc(g, &p, point.a_tilde, point.b_tilde, mc, r)?;
                        let values = sample_values(mc, r, move |s| cond_prob_zero(g, &p, s.exp(), s.exp()))?;
                        let u = uncond_prob_zero(g, &p, mc, r)?;
                        (closed, sim, values, ("upper_bound", u.upper_bound))
                    }
                    ModeArg::Pairwise => {
                        let f = PairFading {
                            a_tilde: point.a_tilde,
                            b1_tilde: point.b_tilde,
                            b2_tilde: point.b2_tilde,
                        };
                        let closed = cond_prob_zero_pair(g, &p, f);
                        let sim = pair_mc(g, &p, f, mc, r)?;
                        let values = cond_prob_samples(g, &p, mc, r)?;
                        let raw = pair_mc_unconditional(g, &p, mc, r)?;
                        (closed, sim, values, ("unconditional_monte_carlo", raw))
                    }
                })
            })??;
            writeln!(out, "conditional_closed_form = {closed}")?;
            writeln!(out, "conditional_monte_carlo = {} +- {}", sim.mean, sim.stderr)?;
            let n = values.len() as f64;
            let mean = values.iter().sum::<f64>() / n;
            writeln!(out, "unconditional_closed_form_average = {mean}")?;
            writeln!(out, "{} = {} +- {}", extra.0, extra.1.mean, extra.1.stderr)?;
            let below = values.iter().filter(|&&v| v < 1e-4).count() as f64 / n;
            writeln!(out, "cdf_mass_below_1e-4 = {below}")?;
        }
        Command::Cdf { mode, at, common } => {
            let s = settings(&common, None)?;
            let p = s.fixed_params("cdf")?;
            let loc = location(&at, EveLocation::new(-0.6, 0.0));
            let g = gains(loc, s.alpha).gains;
            let mc = McConfig::new(s.seed, s.samples);
            let values = with_threads(s.threads, || match mode {
                ModeArg::Colluding => sample_values(mc, &Parallel, move |r| cond_prob_zero(g, &p, r.exp(), r.exp())),
                ModeArg::Pairwise => cond_prob_samples(g, &p, mc, &Parallel),
            })??;
            let levels: Vec<f64> = (1..=19).map(|k| k as f64 * 0.05).collect();
            let pts = ecdf(&values, &levels)?;
            writeln!(out, "# location=({}, {}) p_j={} rho={} samples={} seed={}", loc.x, loc.y, p.p_j, p.rho, s.samples, s.seed)?;
            match mode {
                ModeArg::Colluding => {
                    writeln!(out, "p,empirical,stderr,lower_bound")?;
                    for pt in pts {
                        let bound = if p.p_j > 0.0 { cdf_lower_bound(pt.t, g.a, g.b, p.rho, p.p_j)? } else { f64::NAN };
                        writeln!(out, "{:.2},{:.6},{:.6},{:.6}", pt.t, pt.cdf, pt.stderr, bound)?;
                    }
                }
                ModeArg::Pairwise => {
                    writeln!(out, "p,empirical,stderr")?;
                    for pt in pts {
                        writeln!(out, "{:.2},{:.6},{:.6}", pt.t, pt.cdf, pt.stderr)?;
                    }
                }
            }
        }
        Command::Policy {
            policy,
            threshold,
            at,
            ladder,
            common,
        } => {
            let s = settings(&common, None)?;
            if ladder {
                let rows = with_threads(s.threads, || policy_rows(s.rho, s.samples, s.seed, &Parallel))??;
                write!(out, "{}", policy_table(&rows))?;
                return Ok(Outcome::Success);
            }
            let p = s.fixed_params("policy")?;
            let policy_arg = policy;
            let policy = match (policy_arg, threshold) {
                (PolicyArg::Constant, None) => JamPolicy::Constant,
                (PolicyArg::SemiDynamic, None) => JamPolicy::SemiDynamic,
                (PolicyArg::FullDynamic, None) => JamPolicy::FullDynamic,
                (PolicyArg::GeneralDynamic, Some(t)) => JamPolicy::GeneralDynamic { threshold: t },
                (PolicyArg::GeneralDynamic, None) => return Err(usage("general-dynamic needs --threshold")),
                (_, Some(_)) => return Err(usage("--threshold only applies to general-dynamic")),
            };
            let loc = location(&at, EveLocation::ORIGIN);
            let g = gains(loc, s.alpha).gains;
            let mc = McConfig::new(s.seed, s.samples);
            let r = with_threads(s.threads, || policy_prob_zero(policy, g, &p, mc, &Parallel))??;
            let name = policy_arg.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
            match threshold {
                Some(t) => writeln!(out, "policy = {name} (threshold {t})")?,
                None => writeln!(out, "policy = {name}")?,
            }
            writeln!(out, "location = ({}, {})", loc.x, loc.y)?;
            writeln!(out, "prob_zero = {} +- {}", r.prob.mean, r.prob.stderr)?;
            writeln!(out, "bound = {}", r.bound)?;
            writeln!(out, "acceptance = {} +- {}", r.acceptance.mean, r.acceptance.stderr)?;
        }
        Command::Verify { suite, common } => {
            let s = settings(&common, None)?;
            let checks = with_threads(s.threads, || run_suite(&suite, s.seed))??;
            let mut failed = 0;
            for c in &checks {
                writeln!(out, "{}", c.line())?;
                failed += !c.passed as usize;
            }
            writeln!(out, "{} checks, {failed} failed", checks.len())?;
            out.flush()?;
            return Ok(if failed == 0 { Outcome::Success } else { Outcome::VerifyFailed });
        }
    }
    out.flush()?;
    Ok(Outcome::Success)
}
