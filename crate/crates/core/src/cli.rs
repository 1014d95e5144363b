//! Command-line front end. Each subcommand loads its inputs, calls the
//! library and writes a report; exit codes are 0 on success, 1 when a checked
//! inequality or contract fails and 2 on usage or input errors.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::hamming_junta_map;
use crate::geometry::{random_box_pair, separated_junta_sets, BoxSet, IsoReport, VectorMap};
use crate::inequality::{
    run_suite, verify_heat_l1, verify_hypercontractivity, verify_poincare_junta, verify_reverse_poincare,
    verify_smoothed_junta, verify_triangle_bound, CheckKind, InequalityReport, Suite,
};
use crate::junta::{best_junta_oracle, extract_junta, select_parameters, Mode, Target};
use crate::quad::{read_grid_dump, Domain, QuadratureSpec};
use crate::report::{emit_report, Envelope, Format};
use crate::torus::{CoordSet, TrigPoly};

pub const SEED_ENV: &str = "JUNTALAB_SEED";

#[derive(Debug, Parser)]
#[command(name = "juntalab", version, about = "Junta approximation and inequality checks on product spaces")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Seed for every random choice of the run [default: 0]
    #[arg(long, global = true, env = SEED_ENV)]
    pub seed: Option<u64>,
    /// Tensor grid with this many points per axis
    #[arg(long, global = true, conflicts_with = "samples")]
    pub points: Option<usize>,
    /// Monte-Carlo with this many samples
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Report format: json (JSON lines) or csv
    #[arg(long, global = true, default_value = "json")]
    pub format: Format,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-coordinate influences ||d_n f||_1 (and ||d_n f||_2 for polynomials)
    Influences(FnArgs),
    /// Junta extraction at tolerance epsilon
    Junta {
        #[command(flatten)]
        input: FnArgs,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value = "empirical")]
        mode: Mode,
    },
    /// Inequality checks, from a suite file or on one polynomial
    Verify {
        #[arg(long, conflicts_with = "fn_path")]
        suite: Option<PathBuf>,
        #[arg(long = "fn")]
        fn_path: Option<PathBuf>,
        /// Check to run on --fn: heat_l1, reverse_poincare, hypercontractivity,
        /// poincare_junta, smoothed_junta or triangle_bound
        #[arg(long, requires = "fn_path")]
        check: Option<String>,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        eta: Option<f64>,
        /// One-based coordinate set for poincare_junta, e.g. 1,3
        #[arg(long, value_delimiter = ',')]
        set: Vec<usize>,
    },
    /// Junta approximation of a vector map for the Hamming metrics
    Hamming {
        /// Map spec file (families identity, sine, random, grid)
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        epsilon: f64,
    },
    /// Junta level sets for separated box sets
    Isoperimetry {
        #[arg(long, requires = "b")]
        a: Option<PathBuf>,
        #[arg(long, requires = "a")]
        b: Option<PathBuf>,
        /// Draw this many random pairs instead of reading --a and --b
        #[arg(long, conflicts_with = "a")]
        random: Option<usize>,
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long, default_value_t = 3)]
        max_boxes: usize,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        /// Monte-Carlo points for the loss estimates
        #[arg(long, default_value_t = 1 << 16)]
        loss_samples: usize,
    },
    /// Best p-junta by exhaustive search
    Oracle {
        #[command(flatten)]
        input: FnArgs,
        #[arg(long)]
        p: usize,
    },
}

#[derive(Debug, Args)]
pub struct FnArgs {
    /// Polynomial (.json or text) or box-grid dump (.csv)
    #[arg(long = "fn")]
    pub path: PathBuf,
    /// Domain of a grid dump
    #[arg(long, default_value = "cube", value_parser = parse_domain)]
    pub domain: Domain,
}

fn parse_domain(s: &str) -> std::result::Result<Domain, String> {
    match s {
        "cube" => Ok(Domain::Cube),
        "torus" => Ok(Domain::Torus),
        _ => Err(format!("unknown domain {s:?}, expected cube or torus")),
    }
}

impl Common {
    fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    fn quad(&self, seed: u64) -> QuadratureSpec {
        match (self.points, self.samples) {
            (Some(p), _) => QuadratureSpec::grid(p, seed),
            (None, Some(s)) => QuadratureSpec::monte_carlo(s, seed),
            (None, None) => QuadratureSpec::auto(seed),
        }
    }

    fn emit<T: Serialize>(&self, kind: &'static str, seed: u64, records: &[T]) -> Result<()> {
        emit_report(records, &Envelope::new(kind, seed), self.format, self.out.as_deref())
    }
}

/// Loads a polynomial or a grid dump, by file extension.
pub fn load_target(path: &Path, domain: Domain) -> Result<Target> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => Ok(Target::Handle(read_grid_dump(path, domain)?)),
        Some("json") => Ok(Target::Poly(TrigPoly::from_json_str(&std::fs::read_to_string(path)?)?)),
        _ => Ok(Target::Poly(TrigPoly::read(path)?)),
    }
}

fn load_poly(path: &Path) -> Result<TrigPoly> {
    match load_target(path, Domain::Torus)? {
        Target::Poly(p) => Ok(p),
        Target::Handle(_) => Err(Error::param("inequality checks need a trigonometric polynomial")),
    }
}

#[derive(Debug, Serialize)]
struct InfluenceRecord {
    n: usize,
    l1: f64,
    l1_half_width: f64,
    l2: Option<f64>,
}

#[derive(Debug, Serialize)]
struct OracleRecord {
    p: usize,
    #[serde(rename = "S")]
    s: Vec<usize>,
    error: f64,
    half_width: f64,
    subsets: usize,
}

/// Outcome of a subcommand: `true` if every check passed.
fn execute(cfg: &RunConfig) -> Result<bool> {
    let c = &cfg.common;
    match &cfg.command {
        Command::Influences(input) => {
            let seed = c.seed();
            let f = load_target(&input.path, input.domain)?;
            let prof = f.influences(&c.quad(seed))?;
            let records: Vec<_> = (0..prof.dim())
                .map(|n| InfluenceRecord {
                    n: n + 1,
                    l1: prof.l1[n].value,
                    l1_half_width: prof.l1[n].half_width,
                    l2: prof.l2.as_ref().map(|v| v[n].value),
                })
                .collect();
            c.emit("influences", seed, &records)?;
            Ok(true)
        }
        Command::Junta { input, epsilon, mode } => {
            let seed = c.seed();
            let schedule = select_parameters(*epsilon, *mode)?;
            let f = load_target(&input.path, input.domain)?;
            let j = extract_junta(&f, &schedule, &c.quad(seed))?;
            c.emit("junta", seed, &[j.report()])?;
            Ok(true)
        }
        Command::Verify { suite, fn_path, check, t, eta, set } => {
            let reports = match (suite, fn_path) {
                (Some(path), _) => {
                    let suite = Suite::load(path)?;
                    let seed = c.seed.unwrap_or(suite.seed);
                    (seed, run_suite(&suite, Some(seed))?)
                }
                (None, Some(path)) => {
                    let seed = c.seed();
                    let f = load_poly(path)?;
                    let kind = check.as_deref().ok_or_else(|| Error::param("--fn needs --check"))?;
                    let kind: CheckKind = serde_json::from_value(serde_json::Value::String(kind.into()))
                        .map_err(|_| Error::param(format!("unknown check {kind:?}")))?;
                    let need = |v: &Option<f64>, name: &str| {
                        v.ok_or_else(|| Error::param(format!("check {kind:?} needs --{name}")))
                    };
                    let quad = c.quad(seed);
                    let r = match kind {
                        CheckKind::HeatL1 => verify_heat_l1(&f, need(t, "t")?, &quad)?,
                        CheckKind::ReversePoincare => verify_reverse_poincare(&f, need(t, "t")?)?,
                        CheckKind::Hypercontractivity => verify_hypercontractivity(&f, need(t, "t")?, &quad)?,
                        CheckKind::PoincareJunta => {
                            verify_poincare_junta(&f, &CoordSet::from_one_based(f.dim(), set.iter().copied())?)?
                        }
                        CheckKind::SmoothedJunta => verify_smoothed_junta(&f, need(t, "t")?, need(eta, "eta")?, &quad)?,
                        CheckKind::TriangleBound => verify_triangle_bound(&f, need(t, "t")?, need(eta, "eta")?, &quad)?,
                    };
                    (seed, vec![r])
                }
                (None, None) => return Err(Error::param("verify needs --suite or --fn")),
            };
            let (seed, reports): (u64, Vec<InequalityReport>) = reports;
            c.emit("inequality", seed, &reports)?;
            Ok(reports.iter().all(|r| r.pass))
        }
        Command::Hamming { map, epsilon } => {
            let seed = c.seed();
            let f = VectorMap::load(map)?;
            let j = hamming_junta_map(&f, *epsilon, &c.quad(seed))?;
            let report = j.report();
            c.emit("hamming", seed, std::slice::from_ref(&report))?;
            Ok(report.pass)
        }
        Command::Isoperimetry { a, b, random, dim, max_boxes, delta, epsilon, loss_samples } => {
            let seed = c.seed();
            let pairs: Vec<(BoxSet, BoxSet)> = match (a, b, random) {
                (Some(a), Some(b), _) => vec![(load_boxes(a)?, load_boxes(b)?)],
                (_, _, Some(k)) => (0..*k as u64)
                    .map(|i| random_box_pair(*dim, *max_boxes, *delta, seed.wrapping_add(i)))
                    .collect::<Result<_>>()?,
                _ => return Err(Error::param("isoperimetry needs --a and --b, or --random")),
            };
            let reports = pairs
                .iter()
                .map(|(a, b)| Ok(separated_junta_sets(a, b, *delta, *epsilon, &c.quad(seed), *loss_samples)?.1))
                .collect::<Result<Vec<IsoReport>>>()?;
            c.emit("isoperimetry", seed, &reports)?;
            Ok(reports.iter().all(|r| r.pass))
        }
        Command::Oracle { input, p } => {
            let seed = c.seed();
            let f = load_target(&input.path, input.domain)?;
            let r = best_junta_oracle(&f, *p, &c.quad(seed))?;
            let rec = OracleRecord {
                p: *p,
                s: r.s.one_based(),
                error: r.error.value,
                half_width: r.error.half_width,
                subsets: r.subsets,
            };
            c.emit("oracle", seed, &[rec])?;
            Ok(true)
        }
    }
}

fn load_boxes(path: &Path) -> Result<BoxSet> {
    BoxSet::from_json_str(&std::fs::read_to_string(path)?)
}

/// Exit code for a library error: 1 for a failed postcondition, 2 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Postcondition(_) => 1,
        _ => 2,
    }
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn dispatch<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(cfg) => cfg,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cfg) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("juntalab: error: {e}");
            exit_code(&e)
        }
    }
}
