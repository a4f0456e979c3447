use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use porlab::config::RunConfig;
use porlab::pipeline::{self, Run};
use porlab::Error;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "porlab", version, about = "Exact porous-set constructions and finite certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the decreasing control sequence and certify its invariants.
    Sequence {
        #[command(flatten)]
        common: Common,
        /// Number of terms (overrides sequence.count).
        #[arg(long)]
        count: Option<usize>,
    },
    /// Build the multi-expansion, check the set parameters and emit a witness.
    Construct(Common),
    /// Gap certificates, dichotomy trials and the porosity bridge.
    Verify(Common),
    /// Implication harness over a corpus of finite sets.
    Metrics(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Report path; CSV exports go next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Witness depth (range index).
    #[arg(long)]
    depth: Option<usize>,
    /// Certificate range, `a..b` or `a,b` (inclusive).
    #[arg(long, value_parser = parse_range)]
    n_range: Option<(usize, usize)>,
    /// Node budget for outer approximations and term budget for coupled runs.
    #[arg(long)]
    budget: Option<usize>,
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once("..=")
        .or_else(|| s.split_once(".."))
        .or_else(|| s.split_once(','))
        .ok_or_else(|| format!("expected `a..b` or `a,b`, got `{s}`"))?;
    let p = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("`{t}`: {e}"));
    Ok((p(a)?, p(b)?))
}

impl Common {
    fn load(&self) -> Result<RunConfig, Error> {
        let mut cfg = RunConfig::load(&self.config)?;
        if let Some(seed) = self.seed {
            cfg.set.seed = seed;
            cfg.foran.seed = Some(seed);
        }
        if let Some(d) = self.depth {
            cfg.set.depth = d;
        }
        if let Some(r) = self.n_range {
            if r.0 > r.1 {
                return Err(Error::Config(format!("empty n-range {}..{}", r.0, r.1)));
            }
            cfg.verify.n_range = r;
        }
        if let Some(b) = self.budget {
            if b == 0 {
                return Err(Error::Config("budget must be positive".into()));
            }
            cfg.verify.budget = b;
            cfg.expansion.term_budget = b;
        }
        Ok(cfg)
    }
}

fn emit<R: Serialize>(run: Run<R>, out: Option<&PathBuf>) -> Result<i32, Error> {
    match out {
        Some(path) => {
            for p in run.write(path)? {
                eprintln!("wrote {}", p.display());
            }
        }
        None => print!("{}", run.json()?),
    }
    eprintln!("status: {:?}", run.status);
    Ok(run.status.exit_code())
}

fn run(cli: Cli) -> Result<i32, Error> {
    match cli.command {
        Command::Sequence { common, count } => {
            let mut cfg = common.load()?;
            if let Some(c) = count {
                if c == 0 {
                    return Err(Error::Config("count must be positive".into()));
                }
                cfg.sequence.count = c;
            }
            emit(pipeline::cmd_sequence(&cfg)?, common.out.as_ref())
        }
        Command::Construct(common) => emit(pipeline::cmd_construct(&common.load()?)?, common.out.as_ref()),
        Command::Verify(common) => emit(pipeline::cmd_verify(&common.load()?)?, common.out.as_ref()),
        Command::Metrics(common) => emit(pipeline::cmd_metrics(&common.load()?)?, common.out.as_ref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_resource_limit() { 3 } else { 1 })
        }
    }
}
