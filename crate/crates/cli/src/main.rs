use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use locinfo::acceptance;
use locinfo::bounds::{Evaluation, ProductAverageForm, DEFAULT_MC_SAMPLES};
use locinfo::ensembles::parse_angle;
use locinfo::oracle::OptimizerBudget;
use locinfo::pipeline::{self, BoundsConfig, ScroogeConfig};
use locinfo::{Error, Result};

#[derive(Parser)]
#[command(name = "locinfo", version, about = "Bounds on locally accessible information")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Cap on worker threads (defaults to all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// χ, Λ, χ_L and Λ_L for one ensemble, with oracle values
    Bounds(BoundsArgs),
    /// Λ_L along the E₁ family as a CSV curve
    SweepE1(SweepArgs),
    /// Sample the Scrooge ensemble of an average state and test saturation
    Scrooge(ScroogeArgs),
    /// Upper bound on distillable entanglement from a pure decomposition
    Distill(DistillArgs),
    /// Run the acceptance suite
    Selftest(SelftestArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Quadrature,
    Mc,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormArg {
    Derived,
    Printed,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long, value_enum, default_value = "quadrature")]
    method: MethodArg,
    #[arg(long, default_value_t = 64)]
    ntheta: usize,
    #[arg(long, default_value_t = 64)]
    nphi: usize,
    /// Monte Carlo sample count
    #[arg(long, default_value_t = DEFAULT_MC_SAMPLES)]
    samples: usize,
}

impl EvalArgs {
    fn evaluation(&self, seed: u64) -> Evaluation {
        match self.method {
            MethodArg::Quadrature => Evaluation::Quadrature {
                n_theta: self.ntheta,
                n_phi: self.nphi,
            },
            MethodArg::Mc => Evaluation::MonteCarlo {
                samples: self.samples,
                seed,
            },
        }
    }
}

#[derive(Args)]
struct OutArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct BoundsArgs {
    /// Ensemble file or built-in name (bell3, bell4, product8, e1:<θ>:<φ>)
    #[arg(long)]
    ensemble: String,
    #[command(flatten)]
    eval: EvalArgs,
    /// Random product bases for the averaging oracle (0 skips it)
    #[arg(long, default_value_t = 0)]
    bases: usize,
    /// Skip the two-step LOCC and global basis searches
    #[arg(long)]
    no_optimize: bool,
    #[arg(long, default_value_t = OptimizerBudget::default().restarts)]
    restarts: usize,
    #[arg(long, default_value_t = OptimizerBudget::default().max_iters)]
    max_iters: u64,
    /// Fail with exit code 4 if an optimizer does not converge
    #[arg(long)]
    require_converged: bool,
    /// Average output entanglement for χ_L, in bits
    #[arg(long, default_value_t = 0.0)]
    e_out: f64,
    /// Also evaluate Λ_L through the product-average form
    #[arg(long, value_enum)]
    product_form: Option<FormArg>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value = "pi/4")]
    phi: String,
    #[arg(long, default_value = "0")]
    theta_min: String,
    #[arg(long, default_value = "pi")]
    theta_max: String,
    #[arg(long, default_value_t = 100)]
    steps: usize,
    #[command(flatten)]
    eval: EvalArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct ScroogeArgs {
    /// Ensemble whose average state is the Scrooge source
    #[arg(long)]
    ensemble: String,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 50)]
    bases: usize,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct DistillArgs {
    /// Ket-only ensemble file, `bell-diagonal:<p1>:<p2>:<p3>:<p4>` or `product`
    #[arg(long)]
    ensemble: String,
    /// Copies per string
    #[arg(short = 'm', long, default_value_t = 1)]
    copies: usize,
    /// JSON `2 x d_A` isometry, rows of [re, im] pairs
    #[arg(long)]
    isometry: Option<PathBuf>,
    #[command(flatten)]
    eval: EvalArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct SelftestArgs {
    /// Criteria to run (default: all)
    #[arg(long, value_delimiter = ',')]
    criteria: Vec<u8>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    seed: u64,
    params: Value,
    wall_clock_secs: f64,
    report: T,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            return fail(&Error::InvalidArgument(format!("thread pool: {e}")));
        }
    }
    let result = match cli.command {
        Command::Bounds(a) => bounds(a),
        Command::SweepE1(a) => sweep(a),
        Command::Scrooge(a) => scrooge(a),
        Command::Distill(a) => distill(a),
        Command::Selftest(a) => return selftest(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}

fn fail(e: &Error) -> ExitCode {
    let payload = json!({ "error": e.kind(), "message": e.to_string(), "exit_code": e.exit_code() });
    eprintln!("{payload}");
    ExitCode::from(e.exit_code() as u8)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit_json<T: Serialize>(out: &OutArgs, command: &str, params: Value, start: Instant, report: T) -> Result<()> {
    if out.format == Some(Format::Csv) {
        return Err(Error::InvalidArgument(format!("{command} has no CSV output")));
    }
    let envelope = Envelope {
        tool: "locinfo",
        version: locinfo::VERSION,
        command,
        seed: out.seed,
        params,
        wall_clock_secs: start.elapsed().as_secs_f64(),
        report,
    };
    let mut text = serde_json::to_string_pretty(&envelope).expect("report serializes");
    text.push('\n');
    emit(&out.out, &text)
}

fn bounds(a: BoundsArgs) -> Result<()> {
    let start = Instant::now();
    let e = pipeline::load_ensemble(&a.ensemble)?;
    let evaluation = a.eval.evaluation(a.out.seed);
    let budget = OptimizerBudget {
        restarts: a.restarts,
        max_iters: a.max_iters,
        ..OptimizerBudget::default()
    };
    let cfg = BoundsConfig {
        evaluation,
        e_out_avg: a.e_out,
        bases: a.bases,
        optimize: !a.no_optimize,
        budget,
        product_form: a.product_form.map(|f| match f {
            FormArg::Derived => ProductAverageForm::Derived,
            FormArg::Printed => ProductAverageForm::AsPrinted,
        }),
        seed: a.out.seed,
    };
    let report = pipeline::bounds_report(&e, &cfg)?;
    if a.require_converged {
        for r in [&report.oracle.two_step_locc, &report.oracle.global_orthogonal]
            .into_iter()
            .flatten()
        {
            r.clone().require_converged()?;
        }
    }
    let params = json!({
        "ensemble": a.ensemble,
        "evaluation": evaluation,
        "bases": a.bases,
        "optimize": !a.no_optimize,
        "budget": budget,
        "e_out": a.e_out,
        "product_form": cfg.product_form.map(|f| f.name()),
    });
    emit_json(&a.out, "bounds", params, start, report)
}

fn sweep(a: SweepArgs) -> Result<()> {
    let start = Instant::now();
    let phi = parse_angle(&a.phi)?;
    let (lo, hi) = (parse_angle(&a.theta_min)?, parse_angle(&a.theta_max)?);
    let evaluation = a.eval.evaluation(a.out.seed);
    let rows = pipeline::sweep_e1(phi, lo, hi, a.steps, &evaluation)?;
    match a.out.format.unwrap_or(Format::Csv) {
        Format::Csv => emit(&a.out.out, &pipeline::sweep_csv(&rows)?),
        Format::Json => {
            let params = json!({
                "phi": phi,
                "theta_min": lo,
                "theta_max": hi,
                "steps": a.steps,
                "evaluation": evaluation,
            });
            emit_json(&a.out, "sweep-e1", params, start, rows)
        }
    }
}

fn scrooge(a: ScroogeArgs) -> Result<()> {
    let start = Instant::now();
    let rho = pipeline::load_ensemble(&a.ensemble)?.average_state();
    let cfg = ScroogeConfig {
        samples: a.samples,
        bases: a.bases,
        seed: a.out.seed,
    };
    let report = pipeline::scrooge_report(&rho, &cfg)?;
    let params = json!({ "ensemble": a.ensemble, "samples": a.samples, "bases": a.bases });
    emit_json(&a.out, "scrooge", params, start, report)
}

fn distill(a: DistillArgs) -> Result<()> {
    let start = Instant::now();
    let d = pipeline::load_decomposition(&a.ensemble)?;
    let isometry = match &a.isometry {
        Some(p) => Some(pipeline::load_isometry(&p.to_string_lossy())?),
        None => None,
    };
    let evaluation = a.eval.evaluation(a.out.seed);
    let report = pipeline::distill_report(&d, a.copies, isometry.as_ref(), &evaluation)?;
    let params = json!({
        "ensemble": a.ensemble,
        "copies": a.copies,
        "isometry": a.isometry,
        "evaluation": evaluation,
    });
    emit_json(&a.out, "distill", params, start, report)
}

fn selftest(a: SelftestArgs) -> ExitCode {
    let ids = if a.criteria.is_empty() {
        acceptance::CRITERIA.to_vec()
    } else {
        a.criteria
    };
    let mut reports = Vec::new();
    for id in ids {
        let r = acceptance::run(id);
        println!("{r}");
        reports.push(r);
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    println!("{} passed, {failed} failed", reports.len() - failed);
    if let Some(path) = &a.out {
        let text = serde_json::to_string_pretty(&reports).expect("reports serialize");
        if let Err(e) = std::fs::write(path, text) {
            return fail(&e.into());
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    }
}
