//! The `nda` command line.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nda_core::catalog::{lookup, StateParams};
use nda_core::estimators::SamplerConfig;
use nda_core::orbital::Axis;
use nda_core::topology::{
    count_nodal_domains_with, search_equivalence, test_node_equivalence_with, DomainSettings, TransformSpec,
};
use nda_core::NdaError;
use serde::Serialize;

use crate::compute::{compute, resolve_method, sig6, Component, KinMethod};
use crate::exec::Parallel;
use crate::record::{self, format_sigma, RunRecord};
use crate::verify::{self, Cell};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_UNCONVERGED: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "nda", version, about = "Nodal-surface and domain averages of few-electron wave functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Estimate components for one state.
    Compute(ComputeArgs),
    /// Check every catalog state with references against them.
    VerifyTables(VerifyArgs),
    /// Count nodal domains of a state.
    Domains(DomainArgs),
    /// Test whether two states share a node up to an orthogonal map.
    Equiv(EquivArgs),
    /// Catalog operations.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Subcommand, Debug)]
enum CatalogAction {
    /// Write the catalog with its references as JSON.
    Export {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct ParamArgs {
    /// Nuclear charge.
    #[arg(long = "Z", default_value_t = 1.0)]
    z: f64,
    /// Trap frequency.
    #[arg(long, default_value_t = 0.25)]
    omega: f64,
    /// Interaction strength of the trapped pair.
    #[arg(long, default_value_t = 1.0)]
    g0: f64,
}

impl ParamArgs {
    fn params(&self) -> StateParams {
        StateParams { z: self.z, omega: self.omega, g0: self.g0 }
    }
}

#[derive(Args, Debug)]
struct SamplingArgs {
    /// Total samples over all chains, e.g. 1e6.
    #[arg(long, default_value = "1.6e6", value_parser = parse_count)]
    samples: usize,
    #[arg(long, default_value_t = 8)]
    chains: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl SamplingArgs {
    fn config(&self) -> Result<SamplerConfig, NdaError> {
        if self.chains == 0 {
            return Err(NdaError::InvalidSampler("chains must be positive".into()));
        }
        let cfg = SamplerConfig::with_steps(self.chains, self.samples.div_ceil(self.chains), self.seed);
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args, Debug)]
struct ComputeArgs {
    #[arg(long)]
    state: String,
    #[command(flatten)]
    params: ParamArgs,
    /// Comma-separated subset of kin, pot, sum, kin_std, pot_std.
    #[arg(long, value_delimiter = ',', default_value = "kin,pot,sum")]
    components: Vec<Component>,
    #[arg(long, value_enum, default_value_t = KinMethod::Auto)]
    method: KinMethod,
    #[command(flatten)]
    sampling: SamplingArgs,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Also write the output to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Restrict to these states (repeatable or comma-separated).
    #[arg(long, value_delimiter = ',')]
    only: Vec<String>,
    #[arg(long, value_enum, default_value_t = KinMethod::Auto)]
    method: KinMethod,
    #[command(flatten)]
    sampling: SamplingArgs,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DomainArgs {
    #[arg(long)]
    state: String,
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, default_value = "20000", value_parser = parse_count)]
    points: usize,
    #[arg(long, default_value_t = 12)]
    neighbors: usize,
    /// Interior sign checks per edge.
    #[arg(long, default_value_t = 16)]
    checks: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum NamedTransform {
    Identity,
    /// Exchange the first two particles.
    Swap,
}

#[derive(Args, Debug)]
struct EquivArgs {
    #[arg(long)]
    a: String,
    #[arg(long)]
    b: String,
    #[command(flatten)]
    params: ParamArgs,
    /// Reflect one coordinate, `axis:particle` with particles counted from
    /// 1, e.g. `x:2`. Repeatable.
    #[arg(long, value_parser = parse_flip)]
    flip: Vec<(Axis, usize)>,
    #[arg(long, value_enum, default_value_t = NamedTransform::Identity)]
    transform: NamedTransform,
    /// Search signed permutations for a map instead of testing one.
    #[arg(long)]
    search: bool,
    #[arg(long, default_value = "1e5", value_parser = parse_count)]
    points: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

fn parse_count(s: &str) -> Result<usize, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
    if !(v >= 1.0 && v.is_finite() && v.fract() == 0.0 && v <= 1e15) {
        return Err(format!("`{s}` is not a positive whole count"));
    }
    Ok(v as usize)
}

fn parse_flip(s: &str) -> Result<(Axis, usize), String> {
    let (a, p) = s.split_once(':').ok_or_else(|| format!("`{s}` is not axis:particle"))?;
    let axis = match a {
        "x" => Axis::X,
        "y" => Axis::Y,
        "z" => Axis::Z,
        _ => return Err(format!("unknown axis `{a}`")),
    };
    let p: usize = p.parse().map_err(|_| format!("bad particle `{p}`"))?;
    if p == 0 {
        return Err("particles are counted from 1".into());
    }
    Ok((axis, p - 1))
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code. Results go to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let exec = Parallel::from_env();
    let res = match cli.command {
        Command::Compute(a) => cmd_compute(a, &exec, out),
        Command::VerifyTables(a) => cmd_verify(a, &exec, out, err),
        Command::Domains(a) => cmd_domains(a, &exec, out),
        Command::Equiv(a) => cmd_equiv(a, &exec, out),
        Command::Catalog { action: CatalogAction::Export { params, out: path } } => cmd_export(&params, path, out),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

#[derive(Debug)]
enum CliError {
    Nda(NdaError),
    Io(std::io::Error),
    Json(serde_json::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Nda(e) => e.fmt(f),
            CliError::Io(e) => e.fmt(f),
            CliError::Json(e) => e.fmt(f),
        }
    }
}

impl From<NdaError> for CliError {
    fn from(e: NdaError) -> Self {
        CliError::Nda(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Json(e)
    }
}

type CmdResult = Result<i32, CliError>;

fn emit(out: &mut dyn Write, path: Option<&PathBuf>, text: &[u8]) -> Result<(), CliError> {
    out.write_all(text)?;
    if let Some(p) = path {
        fs::write(p, text)?;
    }
    Ok(())
}

fn json<T: Serialize>(v: &T) -> Result<Vec<u8>, CliError> {
    let mut s = serde_json::to_vec_pretty(v)?;
    s.push(b'\n');
    Ok(s)
}

fn cmd_compute(a: ComputeArgs, exec: &Parallel, out: &mut dyn Write) -> CmdResult {
    let state = lookup(&a.state, &a.params.params())?;
    let cfg = a.sampling.config()?;
    let method = resolve_method(&state, a.method);
    let mut components: Vec<Component> = Vec::new();
    for c in &a.components {
        if !components.contains(c) {
            components.push(*c);
        }
    }
    let t = Instant::now();
    let results = compute(&state, &components, method, &cfg, exec)?;
    let rec = RunRecord {
        command: "compute".into(),
        state: state.name.clone(),
        parameters: state.params,
        method: format!("{method:?}").to_lowercase(),
        sampler: cfg,
        reference_eigenvalue: state.reference_eigenvalue.as_ref().map(Into::into),
        results,
        wall_time_s: t.elapsed().as_secs_f64(),
        version: record::VERSION.into(),
        timestamp: record::timestamp(),
    };
    let text = match a.format {
        Format::Json => json(&rec)?,
        Format::Csv => {
            let mut v = Vec::new();
            record::write_csv(&mut v, rec.results.iter().map(|r| (rec.state.as_str(), r)))?;
            v
        }
        Format::Table => {
            let mut v = Vec::new();
            record::write_table(&mut v, &rec)?;
            v
        }
    };
    emit(out, a.out.as_ref(), &text)?;
    Ok(if rec.results.iter().any(|r| r.unconverged()) { EXIT_UNCONVERGED } else { EXIT_PASS })
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    command: &'static str,
    method: String,
    sampler: &'a SamplerConfig,
    cells: &'a [Cell],
    version: &'static str,
    timestamp: String,
}

fn cmd_verify(a: VerifyArgs, exec: &Parallel, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let states = verify::select_states(&a.only, a.method)?;
    let cfg = a.sampling.config()?;
    let mut cells = Vec::new();
    for s in &states {
        let c = verify::verify_state(s, a.method, &cfg, exec)?;
        if a.format == Format::Table {
            for cell in &c {
                write_cell(out, cell)?;
            }
        } else {
            let _ = writeln!(err, "{} done", s.name);
        }
        cells.extend(c);
    }
    let code = verify::exit_code(&cells);
    let text = match a.format {
        Format::Table => {
            let count = |v| cells.iter().filter(|c| c.verdict == v).count();
            let summary = format!(
                "{} cells: {} pass, {} marginal, {} fail, {} unconverged\n",
                cells.len(),
                count(verify::CellVerdict::Pass),
                count(verify::CellVerdict::Marginal),
                count(verify::CellVerdict::Fail),
                count(verify::CellVerdict::Unconverged)
            );
            out.write_all(summary.as_bytes())?;
            None
        }
        Format::Csv => {
            let mut v = Vec::new();
            record::write_csv(&mut v, cells.iter().map(|c| (c.state.as_str(), &c.result)))?;
            Some(v)
        }
        Format::Json => Some(json(&VerifyReport {
            command: "verify-tables",
            method: format!("{:?}", a.method).to_lowercase(),
            sampler: &cfg,
            cells: &cells,
            version: record::VERSION,
            timestamp: record::timestamp(),
        })?),
    };
    if let Some(t) = text {
        emit(out, a.out.as_ref(), &t)?;
    }
    Ok(code)
}

fn write_cell(out: &mut dyn Write, c: &Cell) -> std::io::Result<()> {
    let r = &c.result;
    let exact = r.exact.as_ref().map(ToString::to_string).unwrap_or_default();
    writeln!(
        out,
        "{:<11} {:<24} {:<8} {:>12} ± {:<9} exact {:<24} dev {}σ",
        c.verdict.label(),
        c.state,
        r.component.name(),
        sig6(r.estimate.mean),
        format!("{:.2e}", r.estimate.stderr),
        exact,
        format_sigma(r.sigma_deviation)
    )
}

fn cmd_domains(a: DomainArgs, exec: &Parallel, out: &mut dyn Write) -> CmdResult {
    let state = lookup(&a.state, &a.params.params())?;
    let settings = DomainSettings { n_points: a.points, k_neighbors: a.neighbors, segment_checks: a.checks, seed: a.seed };
    let rep = count_nodal_domains_with(&state, &settings, exec)?;
    match a.format {
        Format::Json => out.write_all(&json(&rep)?)?,
        _ => {
            writeln!(out, "state {}  domains {}", state.name, rep.n_domains)?;
            writeln!(
                out,
                "points {}  edges tested {}  positive fraction {:.4}  sizes {:?}",
                rep.n_points, rep.n_edges_tested, rep.positive_fraction, rep.component_sizes
            )?;
            if !rep.confidence_note.is_empty() {
                writeln!(out, "note: {}", rep.confidence_note)?;
            }
        }
    }
    Ok(EXIT_PASS)
}

fn transform(a: &EquivArgs, n: usize) -> Result<TransformSpec, NdaError> {
    let id = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let mut blocks = vec![id; n];
    let perm = match a.transform {
        NamedTransform::Identity => (0..n).collect(),
        NamedTransform::Swap if n >= 2 => {
            let mut p: Vec<usize> = (0..n).collect();
            p.swap(0, 1);
            p
        }
        NamedTransform::Swap => return Err(NdaError::InvalidParameter("swap needs two particles".into())),
    };
    for &(axis, p) in &a.flip {
        if p >= n {
            return Err(NdaError::InvalidParameter(format!("particle {} out of range", p + 1)));
        }
        let k = axis.index();
        blocks[p][k][k] = -blocks[p][k][k];
    }
    TransformSpec::new(perm, blocks)
}

#[derive(Serialize)]
struct SearchOutcome {
    found: bool,
    transform: Option<TransformSpec>,
    report: Option<nda_core::topology::EquivalenceReport>,
}

fn cmd_equiv(a: EquivArgs, exec: &Parallel, out: &mut dyn Write) -> CmdResult {
    let params = a.params.params();
    let (sa, sb) = (lookup(&a.a, &params)?, lookup(&a.b, &params)?);
    if a.search {
        let found = search_equivalence(&sa, &sb, a.points, a.seed)?;
        match a.format {
            Format::Json => {
                let (transform, report) = found.map_or((None, None), |(t, r)| (Some(t), Some(r)));
                out.write_all(&json(&SearchOutcome { found: transform.is_some(), transform, report })?)?;
            }
            _ => match found {
                Some((t, r)) => {
                    writeln!(out, "equivalent  agreement {:.6} over {} points", r.agreement_fraction, r.n_points)?;
                    writeln!(out, "transform perm {:?} blocks {:?}", t.perm(), t.blocks())?;
                }
                None => writeln!(out, "no signed permutation maps {} onto {}", sb.name, sa.name)?,
            },
        }
        return Ok(EXIT_PASS);
    }
    let n = sa.model()?.n_particles();
    let t = transform(&a, n)?;
    let rep = test_node_equivalence_with(&sa, &sb, &t, a.points, a.seed, exec)?;
    match a.format {
        Format::Json => out.write_all(&json(&rep)?)?,
        _ => {
            let v = match rep.verdict {
                nda_core::topology::Verdict::Equivalent => "equivalent",
                nda_core::topology::Verdict::Inequivalent => "inequivalent",
            };
            writeln!(out, "{v}  agreement {:.6} over {} points  resampled {}", rep.agreement_fraction, rep.n_points, rep.resampled)?;
            if rep.degenerate {
                writeln!(out, "note: more than 1% of draws sat on a node")?;
            }
        }
    }
    Ok(EXIT_PASS)
}

fn cmd_export(p: &ParamArgs, path: Option<PathBuf>, out: &mut dyn Write) -> CmdResult {
    let entries = crate::catalog_json::export(&p.params())?;
    emit(out, path.as_ref(), &json(&entries)?)?;
    Ok(EXIT_PASS)
}
