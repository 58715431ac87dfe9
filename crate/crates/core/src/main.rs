// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use apxsynth::area::{default_library, estimate_area, CellLibrary};
use apxsynth::error::{is_sound_with, ErrorSpec};
use apxsynth::explore::{explore_with, Schedule, StopPolicy};
use apxsynth::harness::{
    run_area_vs_et, run_area_vs_proxy, sample_sound, Benchmark, ExperimentConfig, Operation, SamplerKind,
};
use apxsynth::netlist::{emit_netlist, emit_verilog, parse_netlist, Circuit, GateKind};
use apxsynth::par::Exec;
use apxsynth::smt::SolverConfig;
use apxsynth::template::{instantiate, Family, Template};

#[derive(Parser)]
#[command(name = "apxsynth", version, about = "Template-based approximate logic synthesis")]
struct Cli {
    /// Run single-threaded.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a benchmark as netlist and Verilog.
    Gen(GenArgs),
    /// Search for the smallest sound approximation.
    Synth(SynthArgs),
    /// Check an approximate netlist against an exact one.
    Verify(VerifyArgs),
    /// Draw random sound approximations.
    Sample(SampleArgs),
    /// Run an experiment and write its CSV dataset.
    Bench(BenchArgs),
    /// Print circuit statistics.
    Show(ShowArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum OpArg {
    Adder,
    Mul,
}

impl From<OpArg> for Operation {
    fn from(op: OpArg) -> Operation {
        match op {
            OpArg::Adder => Operation::Adder,
            OpArg::Mul => Operation::Multiplier,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Shared,
    Nonshared,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Family {
        match f {
            FamilyArg::Shared => Family::Shared,
            FamilyArg::Nonshared => Family::Nonshared,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    FirstSat,
    Exhaust,
}

#[derive(Clone, Copy, ValueEnum)]
enum SamplerArg {
    Walk,
    Rejection,
}

impl From<SamplerArg> for SamplerKind {
    fn from(s: SamplerArg) -> SamplerKind {
        match s {
            SamplerArg::Walk => SamplerKind::Walk,
            SamplerArg::Rejection => SamplerKind::Rejection,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ExperimentArg {
    Proxy,
    Et,
}

/// A circuit given either as a netlist file or as a generated benchmark.
#[derive(Args)]
struct CircuitSource {
    /// Exact circuit netlist.
    #[arg(long, conflicts_with_all = ["op", "bits"])]
    exact: Option<PathBuf>,
    #[arg(long, value_enum, requires = "bits")]
    op: Option<OpArg>,
    #[arg(long, requires = "op")]
    bits: Option<usize>,
}

impl CircuitSource {
    fn load(&self) -> anyhow::Result<Circuit> {
        match (&self.exact, self.op, self.bits) {
            (Some(path), _, _) => read_netlist(path),
            (None, Some(op), Some(bits)) => Ok(Benchmark::new(op.into(), bits)?.circuit()?),
            _ => bail!("give either --exact FILE or --op and --bits"),
        }
    }
}

#[derive(Args)]
struct SolverArgs {
    /// Solver executable (default: $APXSYNTH_SOLVER or z3).
    #[arg(long)]
    solver: Option<PathBuf>,
    /// Directory receiving every SMT-LIB script sent to the solver.
    #[arg(long)]
    dump_smt: Option<PathBuf>,
}

impl SolverArgs {
    fn config(&self) -> SolverConfig {
        let config = match &self.solver {
            Some(p) => SolverConfig::new(p),
            None => SolverConfig::from_env(),
        };
        match &self.dump_smt {
            Some(dir) => config.with_dump_dir(dir),
            None => config,
        }
    }
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    op: OpArg,
    #[arg(long)]
    bits: usize,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct SynthArgs {
    #[command(flatten)]
    circuit: CircuitSource,
    #[arg(long)]
    et: u64,
    #[arg(long, value_enum, default_value = "shared")]
    family: FamilyArg,
    /// T for shared, K for nonshared (default: m*3 or 3).
    #[arg(long)]
    size: Option<usize>,
    /// Largest first bound (PIT or LPP) of the grid.
    #[arg(long)]
    max_a: Option<usize>,
    /// Largest second bound (ITS or PPO) of the grid.
    #[arg(long)]
    max_b: Option<usize>,
    #[arg(long, value_enum, default_value = "exhaust")]
    policy: PolicyArg,
    #[arg(long, default_value_t = 10)]
    solutions: usize,
    /// Per-cell solver timeout in seconds.
    #[arg(long, default_value_t = 60.0)]
    timeout: f64,
    /// Global budget in seconds.
    #[arg(long, default_value_t = 10800.0)]
    budget: f64,
    /// Cell library file (`KIND AREA` lines).
    #[arg(long)]
    library: Option<PathBuf>,
    #[arg(long, default_value = "synth-out")]
    out: PathBuf,
    /// Record wall times in the log.
    #[arg(long)]
    timings: bool,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    exact: PathBuf,
    #[arg(long)]
    approx: PathBuf,
    #[arg(long)]
    et: u64,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    circuit: CircuitSource,
    #[arg(long)]
    et: u64,
    #[arg(long, default_value_t = 1000)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "walk")]
    sampler: SamplerArg,
    #[arg(long)]
    library: Option<PathBuf>,
    /// CSV destination (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum)]
    experiment: ExperimentArg,
    #[arg(long, value_enum)]
    op: OpArg,
    #[arg(long)]
    bits: usize,
    /// Error thresholds (one for `proxy`, several for `et`).
    #[arg(long, value_delimiter = ',', required = true)]
    et: Vec<u64>,
    /// Families to explore (default: both).
    #[arg(long, value_enum, value_delimiter = ',')]
    family: Vec<FamilyArg>,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "walk")]
    sampler: SamplerArg,
    #[arg(long, default_value_t = 10)]
    solutions: usize,
    #[arg(long, default_value_t = 60.0)]
    timeout: f64,
    #[arg(long, default_value_t = 10800.0)]
    budget: f64,
    #[arg(long)]
    library: Option<PathBuf>,
    #[arg(long, default_value = "bench-out")]
    out: PathBuf,
    #[arg(long)]
    timings: bool,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct ShowArgs {
    /// Netlist file; omitted when --op and --bits are given.
    file: Option<PathBuf>,
    #[arg(long, value_enum, requires = "bits", conflicts_with = "file")]
    op: Option<OpArg>,
    #[arg(long, requires = "op")]
    bits: Option<usize>,
    #[arg(long)]
    library: Option<PathBuf>,
}

fn read_netlist(path: &Path) -> anyhow::Result<Circuit> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_netlist(&text).with_context(|| format!("parsing {}", path.display()))
}

fn library(path: &Option<PathBuf>) -> anyhow::Result<CellLibrary> {
    match path {
        Some(p) => CellLibrary::from_file(p).with_context(|| format!("loading {}", p.display())),
        None => Ok(default_library()),
    }
}

fn seconds(s: f64) -> anyhow::Result<Duration> {
    Duration::try_from_secs_f64(s).context("invalid duration")
}

fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn gen(args: &GenArgs, _: Exec) -> anyhow::Result<ExitCode> {
    let circuit = Benchmark::new(args.op.into(), args.bits)?.circuit()?;
    fs::create_dir_all(&args.out)?;
    let net = args.out.join(format!("{}.net", circuit.name()));
    let v = args.out.join(format!("{}.v", circuit.name()));
    write(&net, &emit_netlist(&circuit))?;
    write(&v, &emit_verilog(&circuit, circuit.name()))?;
    println!("{}", net.display());
    println!("{}", v.display());
    Ok(ExitCode::SUCCESS)
}

fn synth(args: &SynthArgs, exec: Exec) -> anyhow::Result<ExitCode> {
    let exact = args.circuit.load()?;
    let lib = library(&args.library)?;
    let family: Family = args.family.into();
    let m = exact.output_count();
    let template = match family {
        Family::Shared => Template::for_circuit(family, &exact, args.size.unwrap_or(3 * m)),
        Family::Nonshared => Template::for_circuit(family, &exact, args.size.unwrap_or(3)),
    };
    let (da, db) = match family {
        Family::Shared => (template.size(), 2 * template.size()),
        Family::Nonshared => (template.inputs(), template.size()),
    };
    let policy = match args.policy {
        PolicyArg::FirstSat => StopPolicy::FirstSat,
        PolicyArg::Exhaust => StopPolicy::ExhaustGrid,
    };
    let schedule = Schedule::grid(family, (args.max_a.unwrap_or(da), args.max_b.unwrap_or(db)))
        .with_policy(policy)
        .with_solutions(args.solutions)
        .with_timeout(seconds(args.timeout)?)
        .with_budget(seconds(args.budget)?);
    let solver = args.solver.config();
    solver.probe()?;
    let spec = ErrorSpec::new(args.et);
    let result = explore_with(&exact, &template, &spec, &schedule, &lib, &solver, exec)?;

    fs::create_dir_all(&args.out)?;
    let best = &result.best.circuit;
    write(&args.out.join("best.net"), &emit_netlist(best))?;
    write(&args.out.join("best.v"), &emit_verilog(best, best.name()))?;
    let params = match &result.best.params {
        Some(p) => p.to_text(&template),
        None => String::from("# exact circuit returned, no template assignment\n"),
    };
    write(&args.out.join("best.params"), &params)?;
    write(&args.out.join("log.csv"), &result.log_csv(args.timings)?)?;
    println!(
        "area {} (exact {}){}",
        result.best.area,
        result.exact_area,
        if result.fallback_used {
            ", exact circuit kept"
        } else {
            ""
        }
    );
    Ok(ExitCode::SUCCESS)
}

fn verify(args: &VerifyArgs, exec: Exec) -> anyhow::Result<ExitCode> {
    let exact = read_netlist(&args.exact)?;
    let approx = read_netlist(&args.approx)?;
    let verdict = is_sound_with(&exact, &approx, &ErrorSpec::new(args.et), exec)?;
    println!("wce {}", verdict.worst_case_error);
    if verdict.sound {
        println!("sound");
        Ok(ExitCode::SUCCESS)
    } else {
        if let Some(w) = &verdict.witness {
            println!("unsound, witness input {w}");
        }
        Ok(ExitCode::from(1))
    }
}

fn sample(args: &SampleArgs, exec: Exec) -> anyhow::Result<ExitCode> {
    let exact = args.circuit.load()?;
    let lib = library(&args.library)?;
    let rows = 1usize << exact.input_count();
    let spec = ErrorSpec::new(args.et);
    let bounds = (rows, rows * exact.output_count());
    let set = sample_sound(&exact, &spec, bounds, args.count, args.seed, args.sampler.into(), exec)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["index", "pit", "its", "lpp", "ppo", "area"])?;
    for (k, p) in set.samples.iter().enumerate() {
        let circuit = instantiate(&set.template, p)?;
        let area = estimate_area(&circuit, &lib).total;
        w.write_record(
            [k, p.pit(), p.its(), p.lpp(), p.ppo()]
                .map(|v| v.to_string())
                .iter()
                .chain([&area.to_string()]),
        )?;
    }
    let text = String::from_utf8(w.into_inner()?)?;
    match &args.out {
        Some(path) => write(path, &text)?,
        None => print!("{text}"),
    }
    eprintln!("{} samples from {} attempts", set.samples.len(), set.attempts);
    Ok(ExitCode::SUCCESS)
}

fn bench(args: &BenchArgs, exec: Exec) -> anyhow::Result<ExitCode> {
    let mut config = ExperimentConfig::new(Benchmark::new(args.op.into(), args.bits)?, args.et.clone());
    if !args.family.is_empty() {
        config.families = args.family.iter().map(|&f| f.into()).collect();
    }
    config.random_samples = args.samples;
    config.seed = args.seed;
    config.sampler = args.sampler.into();
    config.solutions_per_cell = args.solutions;
    config.per_cell_timeout = seconds(args.timeout)?;
    config.global_budget = seconds(args.budget)?;
    config.timings = args.timings;
    let lib = library(&args.library)?;
    let solver = args.solver.config();
    solver.probe()?;
    let dir = args.out.join(format!("{}_seed{}", config.benchmark, config.seed));
    fs::create_dir_all(&dir)?;
    let path = match args.experiment {
        ExperimentArg::Proxy => {
            let path = dir.join(format!("area_vs_proxy_et{}.csv", args.et[0]));
            write(&path, &run_area_vs_proxy(&config, &lib, &solver, exec)?.to_csv()?)?;
            path
        }
        ExperimentArg::Et => {
            if args.et.len() < 2 {
                bail!("the ET experiment needs at least two --et values");
            }
            let path = dir.join("area_vs_et.csv");
            write(&path, &run_area_vs_et(&config, &lib, &solver, exec)?.to_csv()?)?;
            path
        }
    };
    println!("{}", path.display());
    Ok(ExitCode::SUCCESS)
}

fn show(args: &ShowArgs, _: Exec) -> anyhow::Result<ExitCode> {
    let circuit = match (&args.file, args.op, args.bits) {
        (Some(path), _, _) => read_netlist(path)?,
        (None, Some(op), Some(bits)) => Benchmark::new(op.into(), bits)?.circuit()?,
        _ => bail!("give a netlist file or --op and --bits"),
    };
    let lib = library(&args.library)?;
    let count = |k: GateKind| circuit.gates().iter().filter(|g| g.kind == k).count();
    let report = estimate_area(&circuit, &lib);
    println!("name     {}", circuit.name());
    println!("inputs   {}", circuit.input_count());
    println!("outputs  {}", circuit.output_count());
    println!(
        "gates    {} (AND {}, OR {}, NOT {}, CONST {})",
        circuit.gates().len(),
        count(GateKind::And),
        count(GateKind::Or),
        count(GateKind::Not),
        count(GateKind::Const0) + count(GateKind::Const1)
    );
    println!("cells    NOT {}, AND2 {}, OR2 {}", report.not, report.and2, report.or2);
    println!("area     {} ({})", report.total, lib.name);
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let exec = if cli.sequential {
        Exec::Sequential
    } else {
        Exec::default()
    };
    let outcome = match &cli.command {
        Command::Gen(a) => gen(a, exec),
        Command::Synth(a) => synth(a, exec),
        Command::Verify(a) => verify(a, exec),
        Command::Sample(a) => sample(a, exec),
        Command::Bench(a) => bench(a, exec),
        Command::Show(a) => show(a, exec),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
