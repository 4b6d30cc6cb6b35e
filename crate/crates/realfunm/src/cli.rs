//! Command-line interface.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use realfunm_core::funm::{funm_with_clock, FunmConfig, Mode};
use realfunm_core::harness::{gen_instance, ExperimentSpec, RNG_NAME};
use realfunm_core::hiprec::XScalar;
use realfunm_core::interp::chebyshev_nodes;
use realfunm_core::scalarfun::catalog_get;

use crate::experiment::run_experiment;
use crate::io;
use crate::report::{Report, StdClock};

pub const SEED_ENV: &str = "REALFUNM_SEED";

#[derive(Parser, Debug)]
#[command(name = "realfunm", version, about = "Analytic functions of matrices with real spectrum")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute f(T) for a matrix file.
    Compute(ComputeArgs),
    /// Run a batch of generated instances and print mean error metrics.
    Experiment(ExperimentArgs),
    /// Print Chebyshev nodes on [-1, 1].
    Nodes(NodesArgs),
    /// Write one generated instance T and its reference f(T).
    Generate(GenerateArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeArg {
    Standard,
    DoubleBlock,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Standard => Mode::Standard,
            ModeArg::DoubleBlock => Mode::DoubleBlock,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct SolverArgs {
    /// exp | cos | sin | exp_t:<t> | identity
    #[arg(long, default_value = "exp")]
    pub func: String,
    #[arg(long, default_value_t = 2.0)]
    pub rho: f64,
    /// Decimal digits for the scalar kernels.
    #[arg(long, default_value_t = 30)]
    pub digits: u32,
    #[arg(long, value_enum, default_value_t = ModeArg::Standard)]
    pub mode: ModeArg,
    /// Interpolation nodes per variable.
    #[arg(long, default_value_t = 16)]
    pub nodes: usize,
    /// Largest accepted imaginary part on the Schur diagonal.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Left end of the first clustering interval.
    #[arg(long, allow_hyphen_values = true)]
    pub origin: Option<f64>,
}

impl SolverArgs {
    pub fn config(&self) -> FunmConfig {
        FunmConfig {
            rho: self.rho,
            node_count: self.nodes,
            scalar_digits: self.digits,
            real_spectrum_tol: self.tol,
            origin: self.origin,
            mode: self.mode.into(),
            ..FunmConfig::default()
        }
    }
}

#[derive(Args, Debug)]
pub struct ComputeArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    /// Also write the report here instead of stdout.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Args, Debug, Clone)]
pub struct GeneratorArgs {
    #[arg(long = "N", alias = "n", default_value_t = 64)]
    pub n: usize,
    #[arg(long, default_value_t = 4)]
    pub blocks: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "coef-range", default_value_t = 0.5)]
    pub coef_range: f64,
    #[arg(long = "gen-digits", default_value_t = 64)]
    pub gen_digits: u32,
}

impl GeneratorArgs {
    fn spec(&self, func: &str, rho: f64, trials: usize, seed: u64) -> ExperimentSpec {
        ExperimentSpec {
            n: self.n,
            n_blocks: self.blocks,
            rho,
            gen_digits: self.gen_digits,
            coef_range: self.coef_range,
            func: func.to_string(),
            seed,
            trials,
        }
    }
}

#[derive(Args, Debug)]
pub struct ExperimentArgs {
    #[command(flatten)]
    pub generator: GeneratorArgs,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    /// Print one line of metrics per trial before the means.
    #[arg(long)]
    pub per_trial: bool,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Args, Debug)]
pub struct NodesArgs {
    #[arg(long, default_value_t = 16)]
    pub count: usize,
    #[arg(long, default_value_t = 30)]
    pub digits: u32,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub generator: GeneratorArgs,
    #[arg(long, default_value = "exp")]
    pub func: String,
    #[arg(long, default_value_t = 2.0)]
    pub rho: f64,
    #[arg(long, default_value_t = 0)]
    pub trial: u64,
    /// Destination for T.
    #[arg(long)]
    pub output: PathBuf,
    /// Destination for the reference f(T).
    #[arg(long)]
    pub reference: PathBuf,
}

/// `REALFUNM_SEED` if set, else the flag value.
pub fn effective_seed(flag: u64) -> anyhow::Result<u64> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s.trim().parse().with_context(|| format!("{SEED_ENV}={s:?} is not a 64-bit unsigned integer")),
        Err(_) => Ok(flag),
    }
}

fn compute(args: &ComputeArgs, out: &mut dyn Write) -> anyhow::Result<()> {
    let r = io::read(&args.input)?;
    let f = catalog_get(&args.solver.func, args.solver.digits)?;
    let res = funm_with_clock(&r, &f, &args.solver.config(), &StdClock::default())?;
    io::write(&args.output, &res.f)?;
    let mut rep = Report::new();
    rep.push("func", &args.solver.func).push("input", args.input.display()).push("output", args.output.display());
    rep.add_funm(&res.report);
    match &args.report {
        Some(p) => std::fs::write(p, rep.to_string()).with_context(|| format!("writing {}", p.display()))?,
        None => write!(out, "{rep}")?,
    }
    Ok(())
}

fn experiment(args: &ExperimentArgs, out: &mut dyn Write) -> anyhow::Result<()> {
    let seed = effective_seed(args.generator.seed)?;
    let spec = args.generator.spec(&args.solver.func, args.solver.rho, args.trials, seed);
    let res = run_experiment(&spec, &args.solver.config())?;
    if args.per_trial {
        for t in &res.trials {
            let m = t.metrics();
            let cols: Vec<String> = m.fields().iter().map(|(k, v)| format!("{k}={v:.3e}")).collect();
            writeln!(out, "trial={} {}", t.trial, cols.join(" "))?;
        }
    }
    let mut rep = Report::new();
    rep.push("rng", RNG_NAME)
        .push("seed", seed)
        .push("N", spec.n)
        .push("blocks", spec.n_blocks)
        .push("trials", spec.trials)
        .push("func", &spec.func)
        .push("coef_range", spec.coef_range)
        .push("gen_digits", spec.gen_digits)
        .push("mean_mul_count", res.trials.iter().map(|t| t.report.mul_count).sum::<usize>() as f64 / spec.trials as f64);
    rep.add_metrics("mean_", &res.mean);
    write!(out, "{rep}")?;
    Ok(())
}

fn nodes(args: &NodesArgs, out: &mut dyn Write) -> anyhow::Result<()> {
    anyhow::ensure!(args.count >= 1, "--count must be at least 1");
    let d = args.digits;
    let z = chebyshev_nodes(args.count, &XScalar::from_i64(-1, d), &XScalar::one(d), d);
    for x in &z.nodes {
        writeln!(out, "{}", x.to_string_digits(d))?;
    }
    Ok(())
}

fn generate(args: &GenerateArgs, out: &mut dyn Write) -> anyhow::Result<()> {
    let seed = effective_seed(args.generator.seed)?;
    let spec = args.generator.spec(&args.func, args.rho, args.trial as usize + 1, seed);
    spec.validate()?;
    let inst = gen_instance(&spec, args.trial)?;
    io::write(&args.output, &inst.t)?;
    io::write(&args.reference, &inst.f_ref)?;
    let sizes: Vec<String> = inst.block_sizes.iter().map(usize::to_string).collect();
    let mut rep = Report::new();
    rep.push("rng", RNG_NAME)
        .push("seed", seed)
        .push("trial", args.trial)
        .push("origin", spec.origin())
        .push("block_sizes", sizes.join(","))
        .push("kappa_S", format!("{:e}", inst.kappa_s))
        .push("kappa_T", format!("{:e}", inst.kappa_t));
    write!(out, "{rep}")?;
    Ok(())
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> anyhow::Result<()> {
    match &cli.command {
        Command::Compute(a) => compute(a, out),
        Command::Experiment(a) => experiment(a, out),
        Command::Nodes(a) => nodes(a, out),
        Command::Generate(a) => generate(a, out),
    }
}

/// Parses `argv` and runs it. Returns the process exit code: 0 on success,
/// 2 on a usage error, 1 when the computation fails.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            1
        }
    }
}
