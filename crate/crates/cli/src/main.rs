//! `msat`: scenario generation, solving, oracle checks and sweeps.
//!
//! Exit codes: 0 success, 2 configuration error, 3 infeasible, 4 not
//! converged, 1 anything else.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use msat_core::export::{export_solution, export_table, table_to_csv, SolutionFile};
use msat_core::oracle::{exhaustive_minimum, DEFAULT_ORACLE_CAP};
use msat_core::scenario::{generate_users, Region};
use msat_core::sweep::{run_sweep, SweepParameter, SweepSpec};
use msat_core::{solve_dual, solve_simple, Algorithm, Error, Scenario};

#[derive(Parser)]
#[command(
    name = "msat",
    version,
    about = "Beam-cluster selection and precoding for multi-satellite downlinks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolveAlgorithm {
    Dual,
    Simple,
}

#[derive(Subcommand)]
enum Command {
    /// Write a scenario with the reference satellites and random users.
    GenScenario {
        #[arg(long)]
        users: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// lat1,lon1,lat2,lon2
        #[arg(long, allow_hyphen_values = true)]
        region: Option<Region>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve one scenario and write the solution as JSON.
    Solve {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, value_enum, default_value = "dual")]
        algorithm: SolveAlgorithm,
        #[arg(long)]
        cluster_size: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        target_sinr_db: Option<f64>,
        /// Defaults to standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the dual solver with exhaustive search over all associations.
    OracleCheck {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
        cap: u128,
        /// Largest accepted relative gap between dual and exhaustive power.
        #[arg(long, default_value_t = 1e-5)]
        tolerance: f64,
    },
    /// Run a parameter sweep and write a CSV table.
    Sweep {
        #[arg(long)]
        scenario: PathBuf,
        /// B, gamma or users
        #[arg(long)]
        param: SweepParameter,
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        values: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        seeds: Vec<u64>,
        #[arg(long, value_delimiter = ',', default_value = "dual,simple")]
        algorithms: Vec<Algorithm>,
        #[arg(long, default_value_t = DEFAULT_ORACLE_CAP)]
        oracle_cap: u128,
        /// Append a wall-time column (makes output run-dependent).
        #[arg(long)]
        timings: bool,
        /// Defaults to standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn exit_code(err: &anyhow::Error) -> u8 {
    err.chain()
        .find_map(|e| e.downcast_ref::<Error>())
        .map_or(1, |e| e.exit_code() as u8)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::GenScenario {
            users,
            seed,
            region,
            out,
        } => {
            if users == 0 {
                return Err(Error::Config {
                    field: "users".into(),
                    message: "must be at least 1".into(),
                }
                .into());
            }
            let mut s = Scenario::reference(users, seed);
            if let Some(r) = region {
                s.region = Some(r);
                s.replace_users(generate_users(users, &r, seed))?;
            }
            s.save(&out)?;
        }
        Command::Solve {
            scenario,
            algorithm,
            cluster_size,
            target_sinr_db,
            out,
        } => {
            let mut s = Scenario::load(&scenario)?;
            if let Some(b) = cluster_size {
                s.cluster_size = b;
            }
            if let Some(g) = target_sinr_db {
                s.set_uniform_target(g);
            }
            let p = s.prepare()?;
            let sol = match algorithm {
                SolveAlgorithm::Dual => solve_dual(&p.instance, &s.solver)?,
                SolveAlgorithm::Simple => solve_simple(&p.instance, &s.solver)?,
            };
            eprintln!(
                "{}: total power {:.6e} W ({:.4} dBW), {} iterations",
                sol.algorithm.as_str(),
                sol.total_power_w,
                sol.total_power_dbw(),
                sol.iterations
            );
            let file = SolutionFile::new(sol, &p.instance.catalog);
            match &out {
                Some(path) => export_solution(&file, path)?,
                None => print!("{}", file.to_json()?),
            }
        }
        Command::OracleCheck {
            scenario,
            cap,
            tolerance,
        } => {
            let s = Scenario::load(&scenario)?;
            let p = s.prepare()?;
            let report = exhaustive_minimum(&p.instance, &s.solver, cap)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            if report.globally_infeasible {
                // Every association is infeasible; the dual must agree.
                return match report.dual_power {
                    None => Err(Error::Infeasible {
                        user: 0,
                        lambda: f64::INFINITY,
                        cap: s.solver.cap(p.instance.noise_power),
                    }
                    .into()),
                    Some(_) => {
                        anyhow::bail!("dual solver returned a solution on an infeasible instance")
                    }
                };
            }
            match report.relative_gap {
                Some(g) if g.abs() <= tolerance => {}
                Some(g) => anyhow::bail!("dual power differs from exhaustive minimum by {g:e}"),
                None => anyhow::bail!(
                    "dual solver failed on a feasible instance: {}",
                    report.dual_error.unwrap_or_default()
                ),
            }
        }
        Command::Sweep {
            scenario,
            param,
            values,
            seeds,
            algorithms,
            oracle_cap,
            timings,
            out,
        } => {
            let s = Scenario::load(&scenario)?;
            let mut spec = SweepSpec::new(param, values, seeds, algorithms);
            spec.timings = timings;
            spec.oracle_cap = oracle_cap;
            let table = run_sweep(&s, &spec)?;
            match &out {
                Some(path) => export_table(&table, path)?,
                None => print!("{}", table_to_csv(&table)?),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
