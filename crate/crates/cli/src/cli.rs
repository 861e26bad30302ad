use std::fs;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use seedcheck_core::verifier::{
    explore, run_full_suite, Canary, ExplorationSummary, ExploreOptions, Status, SuiteOptions,
    DEFAULT_MAX_SEEDS, EXIT_OK, EXIT_TRUNCATED,
};
use seedcheck_core::{is_acyclic, EngineOptions, Seed};

use crate::payload::{principal_matrix, symmetrizer_of, SeedPayload, SCHEMA_VERSION};
use crate::service::{self, ServeOptions};

/// Exit code for unreadable input, bad arguments and engine errors.
pub const EXIT_CONFIG: i32 = 1;

#[derive(Debug, Parser)]
#[command(name = "seedcheck", version, about = "Exact seed mutation and exchange-graph verification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mutate the principal seed of a matrix along a path and print it.
    Mutate(MutateArgs),
    /// Explore the exchange graph and run every property check.
    Verify(VerifyArgs),
    /// Explore the exchange graph and print its shape.
    Explore(ExploreArgs),
    /// Run the HTTP session service.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct MutateArgs {
    /// JSON matrix file, `{"n":2,"B":[[0,1],[-1,0]]}` or `{"n":2,"m":2,"Bt":[...]}`.
    pub matrix: PathBuf,
    /// Mutation directions, 1-based, applied left to right.
    pub path: Vec<usize>,
    /// Skip positivity and homogeneity assertions on new variables.
    #[arg(long)]
    pub no_assert: bool,
    /// Write the payload as JSON to this file (`-` for stdout).
    #[arg(long, value_name = "FILE")]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CanaryArg {
    FlipSign,
    PerturbC,
}

impl From<CanaryArg> for Canary {
    fn from(c: CanaryArg) -> Self {
        match c {
            CanaryArg::FlipSign => Canary::FlipSign,
            CanaryArg::PerturbC => Canary::PerturbC,
        }
    }
}

#[derive(Debug, Args)]
pub struct ExploreFlags {
    /// JSON matrix file.
    pub matrix: PathBuf,
    /// Largest mutation-path length explored.
    #[arg(long, default_value_t = 8)]
    pub depth: usize,
    /// Abort when more labeled seeds than this are found.
    #[arg(long, default_value_t = DEFAULT_MAX_SEEDS)]
    pub max_seeds: usize,
    /// Exit with code 3 if the exploration does not close.
    #[arg(long)]
    pub require_closure: bool,
    #[arg(long)]
    pub no_assert: bool,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Write the JSON result to this file (`-` for stdout).
    #[arg(long, value_name = "FILE")]
    pub json: Option<PathBuf>,
}

impl ExploreFlags {
    fn options(&self) -> ExploreOptions {
        ExploreOptions {
            depth: self.depth,
            max_seeds: self.max_seeds,
            workers: self.workers,
            engine: EngineOptions {
                assert_invariants: !self.no_assert,
            },
        }
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub flags: ExploreFlags,
    /// Corrupt the atlas before checking (negative control).
    #[arg(long, value_enum)]
    pub canary: Option<CanaryArg>,
}

#[derive(Debug, Args)]
pub struct ExploreArgs {
    #[command(flatten)]
    pub flags: ExploreFlags,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    #[arg(long, default_value_t = 8750)]
    pub port: u16,
    /// Snapshot file written on shutdown and loaded on start.
    #[arg(long, value_name = "FILE")]
    pub snapshot: Option<PathBuf>,
    #[arg(long)]
    pub no_assert: bool,
    /// Largest depth accepted by the verify endpoint.
    #[arg(long, default_value_t = 16)]
    pub max_depth: usize,
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            EXIT_CONFIG
        }
    }
}

fn dispatch(command: Command) -> anyhow::Result<i32> {
    match command {
        Command::Mutate(args) => cmd_mutate(&args),
        Command::Verify(args) => cmd_verify(&args),
        Command::Explore(args) => cmd_explore(&args),
        Command::Serve(args) => cmd_serve(&args),
    }
}

fn read_matrix(path: &Path) -> anyhow::Result<seedcheck_core::IntMatrix> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    principal_matrix(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_json<T: Serialize>(target: &Path, value: &T) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    if target == Path::new("-") {
        std::io::stdout().write_all(text.as_bytes())?;
    } else {
        fs::write(target, text).with_context(|| format!("writing {}", target.display()))?;
    }
    Ok(())
}

/// The payload `mutate` prints for `path` from the principal seed of `b`.
pub fn mutate_payload(
    b: &seedcheck_core::IntMatrix,
    path: &[usize],
    engine: &EngineOptions,
) -> anyhow::Result<SeedPayload> {
    let seed = Seed::principal(b)?;
    let mut current = seed;
    for (step, &k) in path.iter().enumerate() {
        current = current
            .mutate_with(k, engine)
            .with_context(|| format!("mutation {k} at step {} of path {path:?}", step + 1))?;
    }
    let s = symmetrizer_of(b)?;
    Ok(SeedPayload::build(&current, path, s.as_ref())?)
}

fn cmd_mutate(args: &MutateArgs) -> anyhow::Result<i32> {
    let b = read_matrix(&args.matrix)?;
    let engine = EngineOptions {
        assert_invariants: !args.no_assert,
    };
    let payload = mutate_payload(&b, &args.path, &engine)?;
    match &args.json {
        Some(target) => write_json(target, &payload)?,
        None => print!("{}", render_payload(&payload)),
    }
    Ok(EXIT_OK)
}

fn render_payload(p: &SeedPayload) -> String {
    let mut out = format!("path: {:?}\nfingerprint: {}\n", p.path, p.fingerprint);
    for (i, v) in p.variables.iter().enumerate() {
        out.push_str(&format!("x{}' = {v}\n", i + 1));
    }
    for (name, m) in [("Bt", &p.bt), ("C", &p.c), ("G", &p.g)] {
        out.push_str(&format!("{name} =\n{}\n", m.to_string().trim_end()));
    }
    for (i, (g, f)) in p.g_vectors.iter().zip(&p.f_polynomials).enumerate() {
        out.push_str(&format!("g{} = {g:?}  F{} = {f}\n", i + 1, i + 1));
    }
    out.push_str(&format!("sign-coherent columns: {:?}\n", p.sign_coherent));
    if let Some(d) = &p.duality {
        out.push_str(&format!(
            "duality: exchange {}, coefficient {}, det G = {}\n",
            d.exchange, d.coefficient, d.det_g
        ));
    }
    out
}

fn cmd_verify(args: &VerifyArgs) -> anyhow::Result<i32> {
    let b = read_matrix(&args.flags.matrix)?;
    let opts = SuiteOptions {
        explore: args.flags.options(),
        canary: args.canary.map(Canary::from),
    };
    let report = run_full_suite(&b, &opts)?;
    for c in &report.checks {
        let status = match c.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIP",
        };
        let mut line = format!("{status}  {:<24} seeds={}", c.check, c.seeds_covered);
        if c.failures > 0 {
            line.push_str(&format!(" failures={} witness={:?}", c.failures, c.witness_path.as_deref().unwrap_or(&[])));
        }
        if let Some(note) = &c.note {
            line.push_str(&format!(" ({note})"));
        }
        println!("{line}");
    }
    let e = &report.exploration;
    println!(
        "explored {} seeds, {} cluster variables, layers {:?}, {}",
        e.seeds,
        e.cluster_variables,
        e.layers,
        if report.is_closed() { "closed" } else { "truncated" }
    );
    if let Some(target) = &args.flags.json {
        write_json(target, &report)?;
    }
    Ok(report.exit_code(args.flags.require_closure))
}

#[derive(Debug, Serialize)]
struct ExploreOutput {
    v: u32,
    exploration: ExplorationSummary,
    seeds: Vec<ExploreSeed>,
}

#[derive(Debug, Serialize)]
struct ExploreSeed {
    path: Vec<usize>,
    fingerprint: String,
}

fn cmd_explore(args: &ExploreArgs) -> anyhow::Result<i32> {
    let b = read_matrix(&args.flags.matrix)?;
    let atlas = explore(&b, &args.flags.options())?;
    let s = symmetrizer_of(&b)?;
    let out = ExploreOutput {
        v: SCHEMA_VERSION,
        exploration: ExplorationSummary::of(&atlas, s.map(|s| s.diag().to_vec()), is_acyclic(&b)?),
        seeds: atlas
            .entries()
            .iter()
            .map(|e| ExploreSeed {
                path: e.path().to_vec(),
                fingerprint: e.fingerprint().to_string(),
            })
            .collect(),
    };
    println!(
        "explored {} seeds, {} cluster variables, layers {:?}, {}",
        out.exploration.seeds,
        out.exploration.cluster_variables,
        out.exploration.layers,
        if atlas.is_closed() { "closed" } else { "truncated" }
    );
    if let Some(target) = &args.flags.json {
        write_json(target, &out)?;
    }
    Ok(if args.flags.require_closure && !atlas.is_closed() {
        EXIT_TRUNCATED
    } else {
        EXIT_OK
    })
}

fn cmd_serve(args: &ServeArgs) -> anyhow::Result<i32> {
    let addr: SocketAddr = format!("{}:{}", args.host, args.port)
        .parse()
        .with_context(|| format!("invalid address {}:{}", args.host, args.port))?;
    let opts = ServeOptions {
        engine: EngineOptions {
            assert_invariants: !args.no_assert,
        },
        snapshot: args.snapshot.clone(),
        max_depth: args.max_depth,
    };
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async move {
        let listener = service::bind(addr).await?;
        eprintln!("listening on http://{}", listener.local_addr()?);
        service::serve(listener, opts, shutdown_signal()).await
    })?;
    Ok(EXIT_OK)
}

async fn shutdown_signal() {
    let _ = tokio::signal::ctrl_c().await;
}
