use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use pnpcns_core::diagnostics::dissipation_d1_parts;
use pnpcns_core::dynamics::{rhs_ion, run, Model as GenericModel};
use pnpcns_core::elliptic::solve_poisson;
use pnpcns_core::snapshot::write_snapshot;
use pnpcns_core::verify::vacuum::{check_pair, vacuum_branch};
use pnpcns_core::verify::{
    entropy_study, mms_study, poisson_boltzmann_oracle, vacuum_experiment, ConvergenceReport, Manufactured, VacuumReport,
};
use pnpcns_core::{Backend, Grid, IonSign, Ops, RunConfig, ScalarField};

use crate::config_file::{echo, parse_config};
use crate::csv::write_csv;
use crate::CliError;

/// Observed order required of every refinement study on the stencil backend.
pub const MIN_ORDER: f64 = 1.9;
/// Error plateau required of the spectral manufactured-solution study.
pub const SPECTRAL_PLATEAU: f64 = 1e-9;
pub const PB_RHS_TOLERANCE: f64 = 1e-8;
pub const PB_DISSIPATION_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Parser)]
#[command(name = "pnpcns", version, about = "Poisson-Nernst-Planck / compressible Navier-Stokes solver")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Run file, for subcommands that take one and were not given it positionally.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory; overrides `[output] dir`.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Write a snapshot every N steps; overrides `[output] snapshot_every`.
    #[arg(long, global = true, value_name = "EVERY_N")]
    pub snapshots: Option<usize>,
    /// Only warnings and errors on stderr.
    #[arg(long, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate a run file and emit the diagnostics CSV.
    Run {
        #[arg(value_name = "CONFIG")]
        file: Option<PathBuf>,
    },
    /// Verification experiments.
    #[command(subcommand)]
    Verify(Verify),
    /// Singular versus gamma-only pressure on a pair of run files differing only in c1.
    Vacuum { singular: PathBuf, gamma_only: PathBuf },
    /// Time and check the periodic Poisson solvers.
    PoissonBench,
}

#[derive(Debug, Subcommand)]
pub enum Verify {
    /// Manufactured-solution refinement with dt ~ h^2 from the file's fixed dt.
    Mms {
        #[arg(value_name = "CONFIG")]
        file: Option<PathBuf>,
        /// Comma-separated resolutions; default n, 2n, 4n.
        #[arg(long, value_delimiter = ',')]
        resolutions: Option<Vec<usize>>,
    },
    /// Energy and BD-entropy residual refinement with dt ~ h^2.
    Entropy {
        #[arg(value_name = "CONFIG")]
        file: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        resolutions: Option<Vec<usize>>,
    },
    /// Poisson-Boltzmann equilibrium on the file's grid and physics.
    Pb {
        #[arg(value_name = "CONFIG")]
        file: Option<PathBuf>,
        /// Mean ion concentration.
        #[arg(long, default_value_t = 1.0)]
        background: f64,
        /// Amplitude of the fixed background charge `a cos(2 pi x / L)`.
        #[arg(long, default_value_t = 0.5)]
        amplitude: f64,
    },
}

fn config_path(positional: &Option<PathBuf>, global: &Global) -> Result<PathBuf, CliError> {
    match (positional, &global.config) {
        (Some(p), None) | (None, Some(p)) => Ok(p.clone()),
        (Some(_), Some(_)) => Err(CliError::Usage("give the run file either positionally or with --config".into())),
        (None, None) => Err(CliError::Usage("missing run file".into())),
    }
}

fn load(positional: &Option<PathBuf>, global: &Global) -> Result<RunConfig, CliError> {
    load_path(&config_path(positional, global)?, global)
}

fn load_path(path: &Path, global: &Global) -> Result<RunConfig, CliError> {
    let mut config = parse_config(path)?;
    if let Some(dir) = &global.out {
        config.output.dir = Some(dir.clone());
    }
    if let Some(every) = global.snapshots {
        if every == 0 {
            return Err(CliError::Validation("--snapshots must be at least 1".into()));
        }
        config.output.snapshot_every = Some(every);
    }
    Ok(config)
}

/// Worker cap from `PNPCNS_THREADS`, unset meaning no cap.
pub fn thread_cap() -> Result<Option<usize>, CliError> {
    match std::env::var("PNPCNS_THREADS") {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(CliError::Validation(format!("PNPCNS_THREADS must be a positive integer, got {v:?}"))),
        },
    }
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    let g = &cli.global;
    match &cli.command {
        Command::Run { file } => run_command(load(file, g)?),
        Command::Verify(Verify::Mms { file, resolutions }) => verify_mms(&load(file, g)?, resolutions.as_deref()),
        Command::Verify(Verify::Entropy { file, resolutions }) => {
            verify_entropy(&load(file, g)?, resolutions.as_deref())
        }
        Command::Verify(Verify::Pb { file, background, amplitude }) => {
            verify_pb(&load(file, g)?, *background, *amplitude)
        }
        Command::Vacuum { singular, gamma_only } => {
            let cap = thread_cap()?;
            vacuum_command(&load_path(singular, g)?, &load_path(gamma_only, g)?, cap)
        }
        Command::PoissonBench => poisson_bench(),
    }
}

fn run_command(config: RunConfig) -> Result<(), CliError> {
    if config.output.snapshot_every.is_some() && config.output.dir.is_none() {
        return Err(CliError::Usage("snapshots need an output directory (--out or [output] dir)".into()));
    }
    let started = Instant::now();
    let out = run(&config)?;
    log::info!("{} steps to t = {:e} in {:.2?}", out.steps, out.final_state.t, started.elapsed());
    let header = echo(&config);
    match &config.output.dir {
        None => write_csv(io::stdout().lock(), &header, &out.records)?,
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
            let path = dir.join("diagnostics.csv");
            write_csv(BufWriter::new(create(&path)?), &header, &out.records)?;
            if let Some(every) = config.output.snapshot_every {
                for (j, state) in out.snapshots.iter().enumerate() {
                    let path = dir.join(format!("snapshot_{:08}.bin", j * every));
                    let mut w = BufWriter::new(create(&path)?);
                    write_snapshot(state, &mut w)?;
                    w.flush()?;
                }
            }
            log::info!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn create(path: &Path) -> Result<fs::File, CliError> {
    fs::File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn default_resolutions(config: &RunConfig, given: Option<&[usize]>) -> Vec<usize> {
    given.map_or_else(|| (0..3).map(|j| config.grid.n() << j).collect(), <[usize]>::to_vec)
}

fn print_report(title: &str, report: &ConvergenceReport) {
    println!("# {title}");
    print!("{}", report.summary());
}

fn verdict(pass: bool, what: String) -> Result<(), CliError> {
    if pass {
        println!("PASS {what}");
        Ok(())
    } else {
        println!("FAIL {what}");
        Err(CliError::Failed(what))
    }
}

fn verify_mms(config: &RunConfig, resolutions: Option<&[usize]>) -> Result<(), CliError> {
    let man = Manufactured::standard(config.grid.dim());
    let report = mms_study(config, &man, &default_resolutions(config, resolutions))?;
    print_report("manufactured solution", &report);
    match config.backend {
        Backend::Centered2 => {
            let order = report.min_order();
            verdict(order >= MIN_ORDER, format!("mms min order {order:.3} (need >= {MIN_ORDER})"))
        }
        Backend::Spectral => {
            let err = report.finest_max_error();
            verdict(err <= SPECTRAL_PLATEAU, format!("mms finest error {err:.3e} (need <= {SPECTRAL_PLATEAU:e})"))
        }
    }
}

fn verify_entropy(config: &RunConfig, resolutions: Option<&[usize]>) -> Result<(), CliError> {
    let report = entropy_study(config, &default_resolutions(config, resolutions))?;
    print_report("energy and BD residuals", &report);
    let order = report.min_order();
    verdict(order >= MIN_ORDER, format!("residual min order {order:.3} (need >= {MIN_ORDER})"))
}

fn verify_pb(config: &RunConfig, background: f64, amplitude: f64) -> Result<(), CliError> {
    let mut config = config.clone();
    config.frozen_fluid = true;
    let model = GenericModel::from_config(&config)?;
    let sol = poisson_boltzmann_oracle(config.grid, &config.phys, background, amplitude)?;
    let state = sol.state(&config.phys)?;
    let rhs_max = rhs_ion(&model, &state, IonSign::Plus)?.max_abs().max(rhs_ion(&model, &state, IonSign::Minus)?.max_abs());
    let parts = dissipation_d1_parts(&model, &state)?;
    let ion_d = parts.ion_plus.max(parts.ion_minus);
    println!("# poisson-boltzmann equilibrium, {} Picard iterations", sol.iterations);
    println!("max_psi,ion_rhs_max,ion_dissipation_plus,ion_dissipation_minus");
    println!("{:e},{:e},{:e},{:e}", sol.psi.max_abs(), rhs_max, parts.ion_plus, parts.ion_minus);
    verdict(
        rhs_max <= PB_RHS_TOLERANCE && ion_d <= PB_DISSIPATION_TOLERANCE,
        format!(
            "pb ion rhs {rhs_max:.3e} (need <= {PB_RHS_TOLERANCE:e}), ion dissipation {ion_d:.3e} (need <= {PB_DISSIPATION_TOLERANCE:e})"
        ),
    )
}

fn vacuum_command(singular: &RunConfig, gamma_only: &RunConfig, cap: Option<usize>) -> Result<(), CliError> {
    let report = if cap == Some(1) {
        check_pair(singular, gamma_only)?;
        VacuumReport { singular: vacuum_branch(singular)?, gamma_only: vacuum_branch(gamma_only)? }
    } else {
        vacuum_experiment(singular, gamma_only)?
    };
    println!("branch,c1,min_rho,steps,rejected");
    for b in [&report.singular, &report.gamma_only] {
        println!("{},{:e},{:e},{},{}", if b.c1 > 0.0 { "singular" } else { "gamma_only" }, b.c1, b.min_rho, b.steps, b.rejected.as_deref().unwrap_or("-"));
    }
    if let Some(dir) = &singular.output.dir {
        fs::create_dir_all(dir)?;
        for (name, b) in [("singular", &report.singular), ("gamma_only", &report.gamma_only)] {
            let mut w = BufWriter::new(create(&dir.join(format!("min_rho_{name}.csv")))?);
            writeln!(w, "t,min_rho")?;
            for (t, m) in &b.min_rho_series {
                writeln!(w, "{t:e},{m:e}")?;
            }
            w.flush()?;
        }
    }
    verdict(
        report.singular_wins(),
        format!("vacuum min rho singular {:e} vs gamma-only {:e}", report.singular.min_rho, report.gamma_only.min_rho),
    )
}

fn poisson_bench() -> Result<(), CliError> {
    println!("backend,dim,n,seconds_per_solve,max_error");
    let cases = [(1usize, [64usize, 256, 1024, 4096]), (2, [16, 32, 64, 128])];
    for backend in [Backend::Centered2, Backend::Spectral] {
        for (dim, ns) in cases {
            for n in ns {
                let grid = Grid::unit(dim, n)?;
                let ops = Ops::new(grid, backend);
                let two_pi = 2.0 * std::f64::consts::PI;
                let mode = |x: [f64; 2]| (two_pi * x[0]).sin() * if dim == 2 { (two_pi * x[1]).cos() } else { 1.0 };
                let q = ScalarField::from_fn(grid, mode);
                // the mode is an eigenfunction of both discrete Laplacians
                let lambda = ops.laplacian_symbol(grid.ravel([1, dim - 1]));
                let exact = q.scale(-1.0 / lambda);
                let reps = (1 << 16) / grid.cells() + 1;
                let started = Instant::now();
                let mut psi = solve_poisson(&ops, &q, 1.0)?;
                for _ in 1..reps {
                    psi = solve_poisson(&ops, &q, 1.0)?;
                }
                let per = started.elapsed().as_secs_f64() / reps as f64;
                let name = match backend {
                    Backend::Centered2 => "centered2",
                    Backend::Spectral => "spectral",
                };
                println!("{name},{dim},{n},{per:e},{:e}", psi.max_abs_diff(&exact));
            }
        }
    }
    Ok(())
}
