//! Experiment harness behind the `fastcur` binary.

pub mod args;
pub mod config;
pub mod error;
pub mod output;
pub mod plot;
pub mod run;
pub mod seeds;

use args::{Cli, Command};
use error::CliResult;

/// Runs one parsed invocation; progress and summaries go to stderr.
pub fn execute(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Approx(a) => {
            let plan = config::approx_plan(&a)?;
            let reports = run::run_approx(&plan)?;
            for p in output::write_reports(&plan.output, &reports)? {
                eprintln!("wrote {}", p.display());
            }
            let worst = reports
                .iter()
                .map(|r| r.rel_err_exact.unwrap_or(r.rel_err_sampled))
                .fold(0.0, f64::max);
            eprintln!("{} runs, worst relative error {worst:.3e}", reports.len());
        }
        Command::Genp(a) => {
            let plan = config::genp_plan(&a)?;
            let reports = run::run_genp(&plan)?;
            for p in output::write_reports(&plan.output, &reports)? {
                eprintln!("wrote {}", p.display());
            }
            let ok = reports.iter().filter(|r| r.ok).count();
            let mut growth: Vec<f64> = reports.iter().filter_map(|r| r.growth).collect();
            growth.sort_by(f64::total_cmp);
            let median = growth
                .get(growth.len() / 2)
                .map_or("-".to_string(), |g| format!("{g:.3e}"));
            eprintln!("{:<14} {:>8} {:>14}", "mode", "ok", "median growth");
            eprintln!(
                "{:<14} {:>8} {:>14}",
                reports[0].mode,
                format!("{ok}/{}", reports.len()),
                median
            );
        }
        Command::Plot(a) => {
            let reports = plot::read_reports(&a.reports)?;
            let svg = plot::figure_svg(&reports, a.kind, a.threshold)?;
            std::fs::write(&a.out, svg).map_err(error::CliError::io(&a.out))?;
            eprintln!("wrote {}", a.out.display());
        }
    }
    Ok(())
}
