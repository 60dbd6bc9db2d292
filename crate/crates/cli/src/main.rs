mod config;
mod experiments;

use std::path::PathBuf;
use std::process::ExitCode;

use asymlab::rank_one::{build_tower, Classification, SpacerPlan};
use asymlab::rational::{fmt_exact, to_f64};
use asymlab::Error;
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use config::{resolve, Experiment, Overrides, RunConfig};

#[derive(Parser)]
#[command(
    name = "asymlab",
    version,
    about = "Triple-correlation experiments for Ledrappier and rank-one systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its CSV and JSON reports.
    Run(Box<RunArgs>),
    /// Print the stages of a plan file and its measure classification.
    DescribePlan {
        plan: PathBuf,
        /// Number of stages to list (default: the explicit stages of the plan).
        #[arg(long)]
        stages: Option<usize>,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_enum)]
    experiment: Option<Experiment>,
    /// JSON config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Plan file path or inline plan JSON.
    #[arg(long)]
    plan: Option<String>,
    /// Set spec (repeatable): "character: [...]" for theorem1, level-set JSON otherwise.
    #[arg(long = "set")]
    sets: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Evaluation depth offset: stage j is evaluated at stage j + depth.
    #[arg(long)]
    depth: Option<usize>,
    /// Monte Carlo samples for the theorem1 cross-check (0 disables it).
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long = "m-max")]
    m_max: Option<u32>,
    /// Tested stages, "a..b" (inclusive) or "a,b,c".
    #[arg(long)]
    stages: Option<String>,
    /// Block parameter N for theorem2 and backward tables.
    #[arg(long = "n")]
    n: Option<u64>,
    #[arg(long = "out-csv")]
    out_csv: Option<PathBuf>,
    #[arg(long = "out-json")]
    out_json: Option<PathBuf>,
    /// KEY=VAL (repeatable); KEY "all" sets every tolerance.
    #[arg(long = "tolerance")]
    tolerances: Vec<String>,
}

const EXIT_TOLERANCE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(if e.is_resource_cap() {
        EXIT_RESOURCE
    } else {
        EXIT_CONFIG
    })
}

fn summary(cfg: &RunConfig, outcome: &experiments::Outcome) -> serde_json::Value {
    let mut s = json!({
        "experiment": cfg.experiment.name(),
        "version": asymlab::VERSION,
        "seed": cfg.seed,
        "depth": cfg.depth,
        "stages": cfg.stages,
        "samples": cfg.samples,
        "m_max": cfg.m_max,
        "plan_source": match &cfg.plan {
            None => json!("built-in preset"),
            Some(config::PlanSource::File(p)) => json!(p.display().to_string()),
            Some(config::PlanSource::Inline(v)) => v.clone(),
        },
        "tolerances": cfg.tolerances.to_json(),
        "tolerance_overrides": cfg.tolerance_overrides,
        "verdict": if outcome.pass { "PASS" } else { "FAIL" },
    });
    if let (Some(obj), Some(extra)) = (s.as_object_mut(), outcome.summary.as_object()) {
        for (k, v) in extra {
            obj.insert(k.clone(), v.clone());
        }
    }
    s
}

fn run(args: RunArgs) -> ExitCode {
    let flags = Overrides {
        experiment: args.experiment,
        plan: args.plan,
        sets: args.sets,
        seed: args.seed,
        depth: args.depth,
        samples: args.samples,
        m_max: args.m_max,
        stages: args.stages,
        n: args.n,
        out_csv: args.out_csv,
        out_json: args.out_json,
        tolerances: args.tolerances,
    };
    let cfg = match resolve(args.config.as_deref(), flags) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    let outcome = match experiments::run(&cfg) {
        Ok(o) => o,
        Err(e) => return fail(&e),
    };
    let summary = summary(&cfg, &outcome);
    let write = |path: &Option<PathBuf>, text: String| -> std::io::Result<()> {
        if let Some(p) = path {
            std::fs::write(p, text)?;
        }
        Ok(())
    };
    let pretty = serde_json::to_string_pretty(&summary).expect("summary serializes");
    if let Err(e) =
        write(&cfg.out_csv, outcome.csv.clone()).and_then(|_| write(&cfg.out_json, pretty + "\n"))
    {
        return fail(&Error::Io(e));
    }
    println!("experiment: {}", cfg.experiment.name());
    for line in &outcome.lines {
        println!("{line}");
    }
    println!("verdict: {}", if outcome.pass { "PASS" } else { "FAIL" });
    if outcome.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_TOLERANCE)
    }
}

fn describe(path: PathBuf, stages: Option<usize>) -> ExitCode {
    let plan = match SpacerPlan::load(&path) {
        Ok(p) => p,
        Err(e) => return fail(&e),
    };
    let count = stages.unwrap_or(plan.explicit_stages().len()).max(1);
    let tower = match build_tower(&plan, count - 1) {
        Ok(t) => t,
        Err(e) => return fail(&e),
    };
    println!(
        "{:>3} {:>3} {:>4} {:>12} {:>5} {:>24} {:>16} {:>14}",
        "j", "N", "L", "H", "r", "h_j", "w_j", "mu_j"
    );
    for st in tower.stages() {
        let h = match st.spec.h {
            asymlab::rank_one::Height::Fixed(h) => h.to_string(),
            asymlab::rank_one::Height::Auto => format!("auto({})", st.spacer_height),
        };
        println!(
            "{:>3} {:>3} {:>4} {:>12} {:>5} {:>24} {:>16} {:>14.6}",
            st.index,
            st.spec.n,
            st.spec.l,
            h,
            st.cuts(),
            st.height,
            fmt_exact(&st.width),
            to_f64(&st.measure())
        );
    }
    match &tower.limits().classification {
        Classification::Finite { limit } => {
            println!(
                "classification: finite, limit measure {} ({:.6})",
                fmt_exact(limit),
                to_f64(limit)
            )
        }
        Classification::Infinite => println!("classification: infinite"),
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => run(*args),
        Command::DescribePlan { plan, stages } => describe(plan, stages),
    }
}
