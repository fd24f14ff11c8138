use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cutfrac::cli::{parse_config, run_check, run_convergence, run_solve, Overrides};

#[derive(Parser)]
#[command(name = "cutfrac", version, about = "Cut FEM for convection on fractured domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve once and report errors, balances and output files.
    Run(Common),
    /// Solve on a sequence of meshes and fit convergence rates.
    Converge {
        #[command(flatten)]
        common: Common,
        /// Fail when the energy-norm slope is below 1.4.
        #[arg(long)]
        enforce: bool,
    },
    /// Run the identity and diagnostic suite.
    Check(Common),
    /// List the built-in domains.
    Presets,
}

#[derive(Args)]
struct Common {
    /// Preset name or path to a domain JSON file.
    domain: Option<String>,
    /// JSON configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Cells per side; comma-separated for a convergence study.
    #[arg(long, value_delimiter = ',')]
    nx: Option<Vec<usize>>,
    #[arg(long)]
    tau1: Option<f64>,
    #[arg(long)]
    tau2: Option<f64>,
    /// Output directory.
    #[arg(long, env = "CUTFRAC_OUT")]
    out: Option<PathBuf>,
    #[arg(long)]
    vtk: bool,
    #[arg(long)]
    csv: bool,
    /// Also evaluate the coercivity identity for the solution.
    #[arg(long)]
    check_identities: bool,
    /// Sequential assembly.
    #[arg(long)]
    deterministic: bool,
}

impl Common {
    fn config(self) -> cutfrac::Result<cutfrac::cli::RunConfig> {
        let o = Overrides {
            domain: self.domain,
            nx: self.nx,
            tau1: self.tau1,
            tau2: self.tau2,
            out: self.out,
            vtk: self.vtk,
            csv: self.csv,
            check_identities: self.check_identities,
            deterministic: self.deterministic,
        };
        parse_config(self.config.as_deref(), o)
    }
}

fn run(cli: Cli) -> cutfrac::Result<bool> {
    match cli.command {
        Command::Run(c) => {
            print!("{}", run_solve(&c.config()?)?);
            Ok(true)
        }
        Command::Converge { common, enforce } => {
            print!("{}", run_convergence(&common.config()?, enforce)?);
            Ok(true)
        }
        Command::Check(c) => {
            let items = run_check(&c.config()?)?;
            let mut ok = true;
            for i in &items {
                let tag = if i.passed() { "PASS" } else { "FAIL" };
                println!("{tag}  {:<36} {:.3e} (tol {:.0e})", i.name, i.value, i.tolerance);
                ok &= i.passed();
            }
            Ok(ok)
        }
        Command::Presets => {
            for p in cutfrac::presets::Preset::all() {
                println!("{p}");
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
