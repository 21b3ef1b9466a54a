use clap::{Args, Parser, Subcommand, ValueEnum};
use radswap_cli::commands::{self, RunOptions};
use radswap_cli::output::json_bytes;
use radswap_cli::verify::{run_verify, Fault};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "radswap", version, about = "Spin-correlation swapping in radical-ion pair recombination")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the swapping algebra and the cancellation identity.
    Verify {
        #[arg(long)]
        json: bool,
        /// Corrupt the computation to exercise the failure path.
        #[arg(long, value_enum, hide = true)]
        inject_fault: Option<FaultArg>,
    },
    /// Integrate the index hierarchy and the scalar ξ equation side by side.
    Pde {
        #[command(flatten)]
        common: Common,
    },
    /// Run a kinetic Monte Carlo ensemble.
    Kmc {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        ensemble: Ensemble,
    },
    /// Compare exact and classical-reset swap modes.
    Compare {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        ensemble: Ensemble,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Output directory (default: $RADSWAP_OUT_DIR, then ./out).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the summary as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct Ensemble {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    replicas: Option<u64>,
    /// Worker threads (default: available parallelism).
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    TripletWeightHalf,
}

fn options(common: &Common, ensemble: Option<&Ensemble>) -> RunOptions {
    RunOptions {
        config: common.config.clone(),
        seed: ensemble.and_then(|e| e.seed),
        replicas: ensemble.and_then(|e| e.replicas),
        workers: ensemble.map_or(0, |e| e.workers),
        out: common.out.clone(),
    }
}

fn print_json<T: serde::Serialize>(value: &T) -> anyhow::Result<()> {
    std::io::stdout().write_all(&json_bytes(value)?)?;
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Verify { json, inject_fault } => {
            let fault = match inject_fault {
                Some(FaultArg::TripletWeightHalf) => Fault::TripletWeightHalf,
                None => Fault::None,
            };
            let report = run_verify(fault);
            if json {
                print_json(&report)?;
            } else {
                print!("{}", report.table());
            }
            Ok(if report.passed { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::Pde { common } => {
            let out = commands::pde(&options(&common, None))?;
            let s = &out.summary;
            if common.json {
                print_json(s)?;
            } else {
                println!("steps                 {}", s.steps);
                println!("max xi rel. L-inf     {:.3e} (tol {:.0e})", s.max_xi_relative_linf, s.xi_tolerance);
                println!("max density rel. err  {:.3e} (tol {:.0e})", s.max_density_relative_error, s.density_tolerance);
                println!("xi(0) at t = {}       {:.6e}", s.last.t, s.last.xi0_hierarchy);
                println!("agreement             {}", if s.agreement_pass { "pass" } else { "FAIL" });
                println!("outputs in            {}", out.out_dir.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Kmc { common, ensemble } => {
            let out = commands::kmc(&options(&common, Some(&ensemble)))?;
            let s = &out.summary;
            if common.json {
                print_json(s)?;
            } else {
                println!("events         {} ({} singlet, {} triplet)", s.events, s.singlets, s.triplets);
                for c in &s.classes {
                    println!("  {:<12} {} singlet, {} triplet", c.class.label(), c.singlets, c.triplets);
                }
                match &s.ratio {
                    Some(r) => println!("nuS/nuT        {:.5} [{:.5}, {:.5}]", r.value, r.ci_low, r.ci_high),
                    None => println!("nuS/nuT        undefined ({})", s.ratio_error.as_deref().unwrap_or("")),
                }
                if let Some(c) = &s.consistency {
                    println!("xi0_hat        {:.5} -> predicted ratio {:.5}", c.xi0_hat, c.predicted);
                }
                println!("outputs in     {}", out.out_dir.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Compare { common, ensemble } => {
            let out = commands::compare(&options(&common, Some(&ensemble)))?;
            let s = &out.summary;
            if common.json {
                print_json(s)?;
            } else {
                for (name, e) in [("exact", &s.exact), ("classical-reset", &s.reset)] {
                    if let Some(r) = &e.ratio {
                        println!(
                            "{name:<16} nuS/nuT = {:.5} [{:.5}, {:.5}] over {} events",
                            r.value, r.ci_low, r.ci_high, r.n_events
                        );
                    }
                }
                let c = &s.comparison;
                println!("z = {:.3}, p = {:.4}, alpha = {}", c.z, c.p_value, c.alpha);
                println!("verdict: {}", s.verdict);
            }
            Ok(if s.comparison.pass { ExitCode::SUCCESS } else { ExitCode::from(2) })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
