use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use tfsource_cli::commands::{forward, invert, ml_eval, verify};
use tfsource_cli::io::RunDir;
use tfsource_cli::{Overrides, ProblemConfig};

#[derive(Parser)]
#[command(name = "tfsource", version, about = "Inverse source problems for multi-term time-fractional equations on the torus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the multinomial Mittag-Leffler function along the negative axis.
    MlEval(Common),
    /// Synthesize u(., t) and the trace Psi = u(., t0) from phi and f.
    Forward(Common),
    /// Recover f from phi and Psi.
    Invert(Common),
    /// Run the property suite.
    Verify(Common),
}

#[derive(Args)]
struct Common {
    /// Problem configuration (JSON); the built-in example when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory; overrides `output_dir` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    cutoff: Option<usize>,
    #[arg(long)]
    t0: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for per-mode work.
    #[arg(long)]
    threads: Option<usize>,
}

impl Common {
    fn load(&self) -> Result<ProblemConfig> {
        let overrides = Overrides { cutoff: self.cutoff, t0: self.t0, seed: self.seed };
        let (cfg, warnings) = match &self.config {
            Some(path) => ProblemConfig::load(path, overrides)?,
            None => {
                let mut cfg = ProblemConfig::example();
                cfg.apply(overrides);
                let warnings = cfg.validate()?;
                (cfg, warnings)
            }
        };
        for w in warnings {
            eprintln!("warning: {w}");
        }
        Ok(cfg)
    }

    fn run_dir(&self, cfg: &ProblemConfig, command: &str) -> Result<RunDir> {
        RunDir::create(&run_root(&self.out, cfg, command))
    }

    fn init_threads(&self) -> Result<()> {
        if let Some(n) = self.threads {
            rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring the thread pool")?;
        }
        Ok(())
    }
}

fn cmd_ml_eval(c: &Common) -> Result<u8> {
    let cfg = c.load()?;
    let mut run = c.run_dir(&cfg, "ml-eval")?;
    let summary = ml_eval::run_sweep(&cfg)?;
    run.write("ml_eval.csv", &ml_eval::sweep_csv(&summary, &cfg.sweep.asymptotic_terms)?)?;
    run.write_json("ml_eval_summary.json", &summary)?;
    run.finish("ml-eval", &cfg)?;
    for (p, slope) in &summary.slopes {
        if let Some(s) = slope {
            println!("p = {p}: remainder slope {s:.3}");
        }
    }
    if summary.failures > 0 {
        eprintln!("{} sweep point(s) disagree beyond {:e}", summary.failures, summary.tolerance);
        return Ok(1);
    }
    Ok(0)
}

fn cmd_forward(c: &Common) -> Result<u8> {
    let cfg = c.load()?;
    let mut run = c.run_dir(&cfg, "forward")?;
    let out = forward::run_forward(&cfg)?;
    forward::write_forward(&out, &cfg, &mut run)?;
    let root = run.root().to_path_buf();
    run.finish("forward", &cfg)?;
    println!("wrote {}", root.display());
    Ok(0)
}

fn run_root(out: &Option<PathBuf>, cfg: &ProblemConfig, command: &str) -> PathBuf {
    out.clone().or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| Path::new("tfsource-out").join(command))
}

fn cmd_invert(c: &Common) -> Result<u8> {
    let cfg = c.load()?;
    let mut run = c.run_dir(&cfg, "invert")?;
    let status = invert::run_invert(&cfg, &mut run)?;
    run.finish("invert", &cfg)?;
    println!("{}", serde_json::to_string(&status)?.trim_matches('"'));
    Ok(status.exit_code() as u8)
}

fn cmd_verify(c: &Common) -> Result<u8> {
    let cfg = c.load()?;
    let mut run = c.run_dir(&cfg, "verify")?;
    let report = verify::run_verify(&cfg, &mut run)?;
    run.finish("verify", &cfg)?;
    for check in &report.checks {
        println!("[{}] {}: {}", if check.passed { "PASS" } else { "FAIL" }, check.name, check.detail);
    }
    Ok(if report.passed { 0 } else { 1 })
}

type Handler = fn(&Common) -> Result<u8>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, run, failure): (&Common, Handler, u8) = match &cli.command {
        Command::MlEval(c) => (c, cmd_ml_eval, 1),
        Command::Forward(c) => (c, cmd_forward, 1),
        Command::Invert(c) => (c, cmd_invert, invert::EXIT_NUMERICAL as u8),
        Command::Verify(c) => (c, cmd_verify, 1),
    };
    let result = common.init_threads().and_then(|_| run(common));
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(failure)
        }
    }
}
