//! Subcommands `solve`, `generate`, `bench` and `table`.
//!
//! [`run`] returns the process exit code: 0 on success (for `solve`: optimum
//! found), 2 when `solve` timed out, 3 when the instance is infeasible and 1
//! on any error, including bad flags.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use wcsp_ihs::instance::{gen_scale_free, gen_uniform, parse_wcsp, write_wcsp, GeneratorParams};
use wcsp_ihs::{solve, CoreStrategy, HvStrategy, RunReport, RunStatus, SolverConfig};

use crate::matrix::parse_matrix;
use crate::table::{self, Kind, TimeoutMode};
use crate::{on_off, parse_on_off, runner};

#[derive(Debug, Parser)]
#[command(
    name = "wcsp-bench",
    version,
    about = "Implicit hitting set solver for weighted CSPs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one instance.
    Solve(SolveArgs),
    /// Write random instances.
    Generate(GenerateArgs),
    /// Run a configuration matrix over a directory of instances.
    Bench(BenchArgs),
    /// Render a ratio table from a bench CSV.
    Table(TableArgs),
}

#[derive(Debug, Args)]
struct SolverFlags {
    /// Per-run time limit in seconds.
    #[arg(long)]
    timeout: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = wcsp_ihs::merge::DEFAULT_MERGE_CAP)]
    merge_cap: u64,
}

impl SolverFlags {
    fn base(&self) -> Result<SolverConfig> {
        let time_limit = match self.timeout {
            Some(t) if !(t >= 0.0 && t.is_finite()) => bail!("--timeout must be a non-negative number of seconds"),
            Some(t) => Some(Duration::from_secs_f64(t)),
            None => None,
        };
        Ok(SolverConfig {
            time_limit,
            seed: self.seed,
            merge_cap: self.merge_cap,
            ..SolverConfig::default()
        })
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, default_value = "lb", value_parser = str::parse::<HvStrategy>)]
    hv: HvStrategy,
    #[arg(long, default_value = "maximal", value_parser = str::parse::<CoreStrategy>)]
    core: CoreStrategy,
    #[arg(long, default_value = "on", value_parser = parse_on_off, action = ArgAction::Set)]
    merge: bool,
    #[arg(long, default_value = "off", value_parser = parse_on_off, action = ArgAction::Set)]
    disjoint: bool,
    #[command(flatten)]
    solver: SolverFlags,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Class {
    Uniform,
    ScaleFree,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    class: Class,
    /// n,d,m,w,t
    #[arg(long)]
    params: String,
    #[arg(long, default_value_t = 1)]
    count: u64,
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Seed of the first instance; later ones use consecutive seeds.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// File name prefix (default: the class name).
    #[arg(long)]
    prefix: Option<String>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Directory of `.wcsp` files.
    #[arg(long)]
    instance: PathBuf,
    /// CSV output file (default: standard output).
    #[arg(long, alias = "csv")]
    out: Option<PathBuf>,
    #[arg(long, default_value = "")]
    matrix: String,
    /// Worker threads (0: one per core).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[command(flatten)]
    solver: SolverFlags,
}

#[derive(Debug, Args)]
struct TableArgs {
    #[arg(long)]
    csv: PathBuf,
    #[arg(long, default_value = "time-ratio", value_parser = str::parse::<Kind>)]
    kind: Kind,
    #[arg(long, default_value = "clamp", value_parser = str::parse::<TimeoutMode>)]
    timeout_mode: TimeoutMode,
    /// Output file (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(&a, out),
        Command::Generate(a) => cmd_generate(&a, out).map(|_| 0),
        Command::Bench(a) => cmd_bench(&a, out).map(|_| 0),
        Command::Table(a) => cmd_table(&a, out).map(|_| 0),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            1
        }
    }
}

#[derive(Serialize)]
struct SolveOutput<'a> {
    instance: String,
    hv: String,
    core: String,
    merge: &'a str,
    disjoint: &'a str,
    status: String,
    optimum: Option<u64>,
    lb: u64,
    ub: Option<u64>,
    iterations: u64,
    hv_calls: u64,
    sat_calls: u64,
    improve_probes: u64,
    cores_added: u64,
    core_set_size: usize,
    components: usize,
    merge_fallbacks: usize,
    hv_time_ms: f64,
    sat_time_ms: f64,
    improve_time_ms: f64,
    total_time_ms: f64,
    assignment: Option<Vec<u32>>,
}

fn cmd_solve(a: &SolveArgs, out: &mut dyn Write) -> Result<i32> {
    let text = fs::read_to_string(&a.instance).with_context(|| format!("reading {}", a.instance.display()))?;
    let w = parse_wcsp(&text).with_context(|| format!("parsing {}", a.instance.display()))?;
    let cfg = SolverConfig {
        hv: a.hv,
        core: a.core,
        merge: a.merge,
        disjoint_cores: a.disjoint,
        ..a.solver.base()?
    };
    let r: RunReport = solve(&w, &cfg)?;
    let ms = |d: Duration| d.as_secs_f64() * 1e3;
    let o = SolveOutput {
        instance: a.instance.display().to_string(),
        hv: cfg.hv.to_string(),
        core: cfg.core.to_string(),
        merge: on_off(cfg.merge),
        disjoint: on_off(cfg.disjoint_cores),
        status: r.status.to_string(),
        optimum: r.optimum,
        lb: r.final_lb,
        ub: r.final_ub,
        iterations: r.iterations,
        hv_calls: r.hv_calls,
        sat_calls: r.sat_calls,
        improve_probes: r.improve_probes,
        cores_added: r.cores_added,
        core_set_size: r.core_set_size,
        components: r.num_components,
        merge_fallbacks: r.merge_fallbacks,
        hv_time_ms: ms(r.times.hitting),
        sat_time_ms: ms(r.times.sat),
        improve_time_ms: ms(r.times.improve),
        total_time_ms: ms(r.times.total),
        assignment: r.best_assignment.as_ref().map(|x| x.0.clone()),
    };
    match a.format {
        OutputFormat::Json => writeln!(out, "{}", serde_json::to_string_pretty(&o)?)?,
        OutputFormat::Text => {
            let value = serde_json::to_value(&o)?;
            for (k, v) in value.as_object().expect("struct serializes to an object") {
                let v = match v {
                    serde_json::Value::Null => "-".to_string(),
                    serde_json::Value::String(s) => s.clone(),
                    serde_json::Value::Array(xs) => xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "),
                    other => other.to_string(),
                };
                writeln!(out, "{k}: {v}")?;
            }
        }
    }
    Ok(match r.status {
        RunStatus::Optimal => 0,
        RunStatus::Timeout => 2,
        RunStatus::Infeasible => 3,
    })
}

fn parse_params(s: &str) -> Result<[u64; 5]> {
    let parts: Vec<u64> = s
        .split(',')
        .map(|x| x.trim().parse::<u64>())
        .collect::<Result<_, _>>()
        .with_context(|| format!("--params `{s}` is not n,d,m,w,t"))?;
    match <[u64; 5]>::try_from(parts) {
        Ok(p) => Ok(p),
        Err(_) => bail!("--params `{s}` must have exactly five values n,d,m,w,t"),
    }
}

fn cmd_generate(a: &GenerateArgs, out: &mut dyn Write) -> Result<()> {
    let [n, d, m, wt, t] = parse_params(&a.params)?;
    let d = u32::try_from(d).context("domain size too large")?;
    if a.count == 0 {
        return Ok(());
    }
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let prefix = a.prefix.clone().unwrap_or_else(|| match a.class {
        Class::Uniform => "uniform".into(),
        Class::ScaleFree => "scale-free".into(),
    });
    for seed in a.seed..a.seed + a.count {
        let p = GeneratorParams::new(n as usize, d, m as usize, wt as usize, t as usize, seed);
        let w = match a.class {
            Class::Uniform => gen_uniform(&p)?,
            Class::ScaleFree => gen_scale_free(&p)?,
        };
        let path = a.out.join(format!("{prefix}_{seed}.wcsp"));
        fs::write(&path, write_wcsp(&w)).with_context(|| format!("writing {}", path.display()))?;
        writeln!(out, "{}", path.display())?;
    }
    Ok(())
}

fn cmd_bench(a: &BenchArgs, out: &mut dyn Write) -> Result<()> {
    let configs = parse_matrix(&a.matrix, &a.solver.base()?)?;
    let files = runner::instance_files(&a.instance)?;
    let rows = runner::run_matrix(&files, &configs, a.jobs)?;
    match &a.out {
        Some(path) => {
            let f = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
            runner::write_csv(&rows, f)?;
        }
        None => runner::write_csv(&rows, out)?,
    }
    Ok(())
}

fn cmd_table(a: &TableArgs, out: &mut dyn Write) -> Result<()> {
    let f = fs::File::open(&a.csv).with_context(|| format!("opening {}", a.csv.display()))?;
    let text = table::render(f, a.kind, a.timeout_mode)?;
    match &a.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}
