use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use dqhinf::analysis::{attenuation, write_summary_csv, write_trace_csv, RatioMode, SummaryRow};
use dqhinf::config::{self, ScenarioConfig};
use dqhinf::controllers::controller_names;

#[derive(Parser, Debug)]
#[command(
    name = "dqhinf",
    version,
    about = "Run dual-quaternion H∞ kinematic control scenarios"
)]
struct Cli {
    /// Print the registered controller kinds and exit.
    #[arg(long)]
    list_controllers: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate scenarios, writing one CSV trace each plus summary.csv.
    Run {
        /// Scenario file; repeat for several. Sweeps expand in place.
        #[arg(long = "config", required = true)]
        configs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Overrides every scenario's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Report the square root of the attenuation ratios.
        #[arg(long)]
        sqrt_ratio: bool,
    },
}

fn main() -> ExitCode {
    match real_main() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// `Ok(false)` when a scenario ran but failed a check.
fn real_main() -> Result<bool> {
    let cli = Cli::parse();
    if cli.list_controllers {
        for name in controller_names() {
            println!("{name}");
        }
        return Ok(true);
    }
    let Some(Command::Run {
        configs,
        out,
        seed,
        sqrt_ratio,
    }) = cli.command
    else {
        bail!("nothing to do; try `dqhinf run --config FILE --out DIR` or `--list-controllers`");
    };
    let mode = if sqrt_ratio {
        RatioMode::Sqrt
    } else {
        RatioMode::AsPrinted
    };

    let mut scenarios: Vec<ScenarioConfig> = Vec::new();
    for path in &configs {
        scenarios.extend(config::load(path)?);
    }
    let mut seen = BTreeSet::new();
    for s in &mut scenarios {
        if let Some(n) = seed {
            s.seed = n;
        }
        if !seen.insert(s.name.clone()) {
            bail!("two scenarios are named `{}`; set distinct `[sim] name`s", s.name);
        }
    }
    std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;

    let mut rows = Vec::with_capacity(scenarios.len());
    let mut all_passed = true;
    for s in &scenarios {
        let sim = s.build().with_context(|| format!("scenario `{}`", s.name))?;
        let trace = sim.run().with_context(|| format!("scenario `{}`", s.name))?;
        write_trace_csv(&trace, out.join(format!("{}.csv", s.name)))?;
        let report = attenuation(
            &trace,
            s.controller.attenuation_spec()?.as_ref(),
            s.controller.region_spec()?.as_ref(),
            mode,
        );
        let failed: Vec<String> = report
            .flags
            .iter()
            .filter(|f| !f.passed)
            .map(|f| format!("{} ({:.4e} vs {:.4e})", f.name, f.value, f.bound))
            .collect();
        all_passed &= failed.is_empty();
        println!(
            "{:<40} {} effort {:.4e} final err {:.3e} min sigma {:.4e}{}",
            s.name,
            if failed.is_empty() { "pass" } else { "FAIL" },
            report.effort_integral,
            report.final_err_norm,
            report.min_sigma_min,
            if failed.is_empty() {
                String::new()
            } else {
                format!(" [{}]", failed.join(", "))
            }
        );
        rows.push(SummaryRow {
            scenario: s.name.clone(),
            controller: s.controller.kind.clone(),
            report,
        });
    }
    write_summary_csv(&rows, out.join("summary.csv"))?;
    Ok(all_passed)
}
