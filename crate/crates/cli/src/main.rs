use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use sclab_core::connection::Connection;
use sclab_core::flows::{descend, flow_rows, flow_run, write_rows, write_trace, DescentOptions, FlowState, Layout, ParamVector};
use sclab_core::lie::BracketParams;
use sclab_core::serial::{from_text, parse_value, to_text, AnyPayload, Payload};
use sclab_core::suite::{cmd_verify, ParamPair, SuiteConfig};
use sclab_core::tensors::SymplecticModel;
use sclab_core::Error;

#[derive(Parser)]
#[command(name = "sclab", version, about = "Exact identity checks and numerical flows for symplectic connections on flat tori")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the identity registry on seeded inputs and write a JSON report.
    Verify(VerifyArgs),
    /// Gradient descent of J_{s,t}; trace CSV on stdout.
    Search(SearchArgs),
    /// RK4 integration of the Hamiltonian flow of R_(k); trace CSV on stdout.
    Flow(FlowArgs),
    /// Re-emit a serialized object in canonical form after a round-trip check.
    Export(ExportArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// JSON file mirroring the suite configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    band: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    /// Comma-separated identity names; an empty value selects none.
    #[arg(long)]
    which: Option<String>,
    /// Bracket parameters as `s:t` pairs, e.g. `1:1,2:1/3`.
    #[arg(long)]
    params: Option<String>,
    /// Record per-identity wall times (the report is then not byte-stable).
    #[arg(long)]
    timings: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    /// List registered identities and exit.
    #[arg(long)]
    list: bool,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, default_value_t = 1.0)]
    s: f64,
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    band: usize,
    #[arg(long, default_value_t = 1e-2)]
    step: f64,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 500)]
    max_iters: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Amplitude of the seeded start; 0 starts at the flat connection.
    #[arg(long, default_value_t = 0.3)]
    amp: f64,
    /// Start from a serialized connection instead of a seeded one.
    #[arg(long)]
    state: Option<PathBuf>,
    /// Write the trace here instead of stdout.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// JSON summary of the run.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FlowArgs {
    #[arg(long, default_value_t = 1)]
    k: u32,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    #[arg(long, default_value_t = 100)]
    steps: usize,
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Band of the Galerkin layout carrying the state.
    #[arg(long, default_value_t = 2)]
    band: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Amplitude of the seeded band-1 start.
    #[arg(long, default_value_t = 3e-3)]
    amp: f64,
    #[arg(long)]
    state: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Pretty)]
    format: Format,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Format {
    Pretty,
    Compact,
}

/// Failure kinds mapped onto exit codes.
enum Fail {
    Usage(String),
    Run(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        match e {
            Error::UnknownIdentity { .. } | Error::Invalid(_) => Fail::Usage(e.to_string()),
            other => Fail::Run(other.to_string()),
        }
    }
}

fn io_fail(path: &Path, e: io::Error) -> Fail {
    Fail::Usage(format!("{}: {e}", path.display()))
}

fn read(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| io_fail(path, e))
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), Fail> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| io_fail(p, e)),
        None => io::stdout().write_all(text.as_bytes()).map_err(|e| Fail::Run(e.to_string())),
    }
}

fn csv_to(path: Option<&Path>, write: impl FnOnce(&mut dyn Write) -> sclab_core::Result<()>) -> Result<(), Fail> {
    match path {
        Some(p) => {
            let mut f = fs::File::create(p).map_err(|e| io_fail(p, e))?;
            write(&mut f)?;
        }
        None => write(&mut io::stdout().lock())?,
    }
    Ok(())
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value");
    s.push('\n');
    s
}

fn parse_params(text: &str) -> Result<Vec<ParamPair>, Fail> {
    text.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| match p.split_once(':') {
            Some((s, t)) => Ok(ParamPair { s: s.trim().into(), t: t.trim().into() }),
            None => Err(Fail::Usage(format!("parameter pair `{p}` is not of the form s:t"))),
        })
        .collect()
}

fn verify(a: VerifyArgs) -> Result<bool, Fail> {
    if a.list {
        for id in sclab_core::suite::registry() {
            println!("{:36} {}", id.name, id.statement);
        }
        return Ok(true);
    }
    let mut cfg = match &a.config {
        Some(p) => serde_json::from_str::<SuiteConfig>(&read(p)?).map_err(|e| Fail::Usage(format!("{}: {e}", p.display())))?,
        None => SuiteConfig::new(1, 1, vec![1, 2, 3]),
    };
    if let Some(n) = a.n {
        cfg.n = n;
    }
    if let Some(b) = a.band {
        cfg.band = b;
    }
    if let Some(s) = a.seeds {
        cfg.seeds = s;
    }
    if let Some(w) = a.which {
        cfg.which = Some(w.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect());
    }
    if let Some(p) = a.params {
        cfg.params = parse_params(&p)?;
    }
    if a.timings {
        cfg.deterministic = false;
    }
    let report = cmd_verify(&cfg)?;
    emit(a.out.as_deref(), &report.to_text())?;
    let s = &report.summary;
    eprintln!("{}/{} passed", s.passed, s.total);
    for r in report.results.iter().filter(|r| !r.passed) {
        eprintln!("FAIL {} seed {}: {}", r.identity, r.seed, r.residual);
    }
    Ok(report.all_passed())
}

fn layout(n: usize, band: usize) -> Result<Arc<Layout>, Fail> {
    if band == 0 {
        return Err(Fail::Usage("band must be at least 1".into()));
    }
    Ok(Arc::new(Layout::new(SymplecticModel::new(n)?, band)))
}

/// Start vector from a serialized torsion-free connection, or a seeded one.
fn start(l: &Arc<Layout>, state: Option<&Path>, seed_layout: Arc<Layout>, seed: u64, amp: f64) -> Result<ParamVector, Fail> {
    let field = match state {
        Some(p) => {
            let c: Connection<sclab_core::scalars::Rational> = from_text(&read(p)?)?;
            if c.model() != l.model() {
                return Err(Fail::Usage(format!("{}: connection has n = {}, run uses n = {}", p.display(), c.model().n(), l.model().n())));
            }
            c.pi_sym()?.to_f64()
        }
        None => ParamVector::random(seed_layout, seed, amp).field()?,
    };
    Ok(ParamVector::from_field(l.clone(), &field)?)
}

fn search(a: SearchArgs) -> Result<bool, Fail> {
    let l = layout(a.n, a.band)?;
    let theta0 = start(&l, a.state.as_deref(), l.clone(), a.seed, a.amp)?;
    let p = BracketParams::new(a.s, a.t);
    let opts = DescentOptions { step: a.step, max_iters: a.max_iters, tol: a.tol };
    let run = descend(&p, &theta0, opts)?;
    csv_to(a.trace.as_deref(), |w| write_trace(&run.trace, w))?;
    let summary = json!({
        "tool": "sclab",
        "version": env!("CARGO_PKG_VERSION"),
        "config": { "s": a.s, "t": a.t, "n": a.n, "band": a.band, "seed": a.seed, "amp": a.amp, "options": opts },
        "stop": run.stop,
        "iterations": run.iterations,
        "gradient_norm": run.gradient_norm,
        "final": run.state.diagnostics,
    });
    if let Some(p) = &a.out {
        emit(Some(p), &pretty(&summary))?;
    }
    eprintln!("{:?} after {} iterations, J = {:e}, |grad| = {:e}", run.stop, run.iterations, run.state.diagnostics.j, run.gradient_norm);
    Ok(run.converged())
}

fn flow(a: FlowArgs) -> Result<bool, Fail> {
    let l = layout(a.n, a.band)?;
    let theta0 = start(&l, a.state.as_deref(), layout(a.n, 1)?, a.seed, a.amp)?;
    let s0 = FlowState::new(theta0, 0.0, &BracketParams::one_one())?;
    let run = flow_run(a.k, a.c, &s0, a.dt, a.steps)?;
    csv_to(a.out.as_deref(), |w| write_rows(&flow_rows(&run.states), w))?;
    match run.error {
        Some(e) => {
            eprintln!("stopped after {} of {} steps: {e}", run.states.len() - 1, a.steps);
            Ok(false)
        }
        None => Ok(true),
    }
}

fn export(a: ExportArgs) -> Result<bool, Fail> {
    let text = read(&a.input)?;
    let obj = AnyPayload::from_json(&parse_value(&text)?).map_err(|e| Fail::Run(format!("{}: {e}", a.input.display())))?;
    let out = match a.format {
        Format::Pretty => to_text(&obj),
        Format::Compact => serde_json::to_string(&obj.to_json()).expect("json value") + "\n",
    };
    let back: AnyPayload = from_text(&out)?;
    if back != obj {
        return Err(Fail::Run("round trip changed the object".into()));
    }
    emit(a.out.as_deref(), &out)?;
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let res = match cli.cmd {
        Cmd::Verify(a) => verify(a),
        Cmd::Search(a) => search(a),
        Cmd::Flow(a) => flow(a),
        Cmd::Export(a) => export(a),
    };
    match res {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Fail::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Fail::Run(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
