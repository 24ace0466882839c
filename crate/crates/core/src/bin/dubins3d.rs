use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dubins3d::io::{run_benchmark, run_instance, InstanceFile, Manifest, Overrides};
use dubins3d::Error;

#[derive(Parser)]
#[command(name = "dubins3d", version, about = "Shortest 3D paths with separate pitch and yaw turning limits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan one instance.
    Plan {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        rpitch: Option<f64>,
        #[arg(long)]
        ryaw: Option<f64>,
        #[arg(long)]
        theta_disc: Option<usize>,
        #[arg(long)]
        phi_disc: Option<usize>,
        /// Trajectory sampling step in meters.
        #[arg(long)]
        step: Option<f64>,
        /// Result JSON path; printed to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Trajectory CSV path.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        refine: bool,
    },
    /// Run every instance of a manifest and print a summary table.
    Bench {
        #[arg(long)]
        manifest: PathBuf,
        /// Table JSON path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::PlannerInfeasible => 3,
        _ => 2,
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Plan { instance, rpitch, ryaw, theta_disc, phi_disc, step, out, csv, refine } => {
            let inst = InstanceFile::load(&instance)?;
            let overrides = Overrides { r_pitch: rpitch, r_yaw: ryaw, theta_disc, phi_disc, step, refine };
            let res = run_instance(&inst, &overrides)?;
            eprintln!("{}: length {:.2} m in {:.3} s", res.best_label, res.total_length, res.wall_time_s);
            match out {
                Some(p) => res.write_json(&p)?,
                None => println!("{}", res.to_json()?),
            }
            if let Some(p) = csv {
                res.write_csv(&p)?;
            }
        }
        Command::Bench { manifest, out } => {
            let table = run_benchmark(&Manifest::load(&manifest)?);
            print!("{table}");
            if let Some(p) = out {
                let text = serde_json::to_string_pretty(&table).map_err(|e| Error::Validation(e.to_string()))?;
                std::fs::write(p, text)?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
