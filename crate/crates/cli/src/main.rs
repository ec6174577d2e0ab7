mod check;
mod config;
mod output;

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use lagrange_htc::cases::{l2_error_and_eoc, l2_errors, Case, CaseSpec};
use lagrange_htc::timeloop::{run, SystemState, TimeConfig};

use config::RunConfig;
use output::{eoc_csv, eoc_text, write_vtk, TrackSeries};

#[derive(Parser)]
#[command(name = "lagrange-htc", version, about = "Cell-centred Lagrangian solver for the unified model of continuum mechanics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one case and write monitors, snapshots and the tracked-node series.
    Run(RunArgs),
    /// Run a case on several meshes and report L2 errors and convergence orders.
    Converge {
        #[command(flatten)]
        args: RunArgs,
        /// Comma-separated mesh list such as `49x49,64x64`.
        #[arg(long, value_delimiter = ',')]
        meshes: Vec<String>,
    },
    /// Check the discrete identities on a small mesh.
    Check {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Args, Clone)]
struct RunArgs {
    #[arg(long)]
    case: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    cfl: Option<f64>,
    #[arg(long)]
    tf: Option<f64>,
    /// Switch off the numerical viscosity.
    #[arg(long)]
    ecl: bool,
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    ny: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

/// Failure classes mapped to exit codes.
enum Failure {
    Usage(anyhow::Error),
    Numerical(anyhow::Error),
}

impl RunArgs {
    fn config(&self) -> Result<RunConfig> {
        let file = match &self.config {
            Some(p) => RunConfig::from_file(p)?,
            None => RunConfig::default(),
        };
        let flags = RunConfig {
            case: self.case.clone(),
            out: self.out.as_ref().map(|p| p.display().to_string()),
            cfl: self.cfl,
            t_final: self.tf,
            ecl: self.ecl.then_some(true),
            nx: self.nx,
            ny: self.ny,
            seed: self.seed,
            ..Default::default()
        };
        Ok(file.overlay(flags))
    }
}

fn prepare(args: &RunArgs) -> Result<(RunConfig, CaseSpec, PathBuf), Failure> {
    let (full, spec) = args.config().and_then(|c| c.resolve()).map_err(Failure::Usage)?;
    let out = PathBuf::from(full.out.clone().unwrap_or_default());
    fs::create_dir_all(&out)
        .with_context(|| format!("creating {}", out.display()))
        .map_err(Failure::Usage)?;
    fs::write(out.join("config.toml"), full.to_text())
        .context("writing config.toml")
        .map_err(Failure::Usage)?;
    Ok((full, spec, out))
}

fn snapshot(case: &Case, state: &SystemState, path: &Path) -> Result<()> {
    let eval = case.scheme.rhs(&state.mesh, &state.cells, state.t)?;
    let velocity: Vec<_> = eval.nodal.iter().map(|n| n.v).collect();
    let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let title = format!("{} t = {:e}", case.spec.name.as_str(), state.t);
    write_vtk(BufWriter::new(file), &state.mesh, &state.cells, &eval.duals, &velocity, &title)?;
    Ok(())
}

fn run_case(full: &RunConfig, spec: &CaseSpec, out: &Path) -> Result<()> {
    let case = spec.build()?;
    let time = TimeConfig {
        monitor_every: full.monitor_every.unwrap_or(1),
        ..case.time
    };
    let every = full.snapshot_every.unwrap_or(0);
    let mut track = spec.track.map(|x| {
        let (series, dist) = TrackSeries::new(&case.state.mesh, &x);
        if dist > 0.1 * case.state.mesh.characteristic_h() {
            eprintln!("warning: tracked point snapped to node {} at distance {dist:e}", series.node);
        }
        series
    });
    let mut last_snapshot = None;
    let result = run(&case.scheme, case.state.clone(), &time, |step, state| {
        if let Some(tr) = track.as_mut() {
            tr.record(state.t, &state.mesh);
        }
        if step == 0 || (every > 0 && step % every == 0) {
            snapshot(&case, state, &out.join(format!("snapshot_{step:06}.vtk"))).map_err(|e| {
                lagrange_htc::HtcError::Io(format!("{e:#}"))
            })?;
            last_snapshot = Some(step);
        }
        Ok(())
    })?;
    if last_snapshot != Some(result.steps) {
        snapshot(&case, &result.state, &out.join(format!("snapshot_{:06}.vtk", result.steps)))?;
    }
    fs::write(out.join("monitors.csv"), result.monitors.to_csv())?;
    if let Some(tr) = &track {
        fs::write(out.join("track.csv"), tr.to_csv())?;
    }
    let m = &result.monitors;
    println!("case {} finished: {} steps to t = {}", spec.name.as_str(), result.steps, result.state.t);
    println!(
        "energy drift {:.3e} (relative {:.3e}), entropy change {:.3e}",
        result.final_energy - result.initial_energy,
        (result.final_energy - result.initial_energy) / result.initial_energy.abs(),
        result.final_entropy - result.initial_entropy
    );
    println!(
        "max eps_E/E {:.3e}, eps_detA {:.3e}, curl A {:.3e}, curl J {:.3e}",
        m.max_eps_e_rel, m.max_eps_det, m.max_curl_a, m.max_curl_j
    );
    if let Some(exact) = &spec.exact {
        let e = l2_errors(&result.state, &case.scheme, exact.as_ref())?;
        println!("L2 errors rho {:.4e}, u {:.4e}, p {:.4e}", e[0], e[1], e[2]);
    }
    Ok(())
}

fn parse_mesh(s: &str) -> Result<(usize, usize)> {
    let (a, b) = s.split_once('x').with_context(|| format!("mesh `{s}` is not of the form NXxNY"))?;
    Ok((a.trim().parse()?, b.trim().parse()?))
}

fn converge(full: &RunConfig, spec: &CaseSpec, meshes: &[(usize, usize)], out: &Path) -> Result<()> {
    let exact = spec.exact.clone().context("case has no exact solution")?;
    let mut runs = Vec::new();
    let mut failure = None;
    for &(nx, ny) in meshes {
        let spec = CaseSpec { nx, ny, ..spec.clone() };
        let attempt = (|| -> Result<(f64, [f64; 3])> {
            let case = spec.build()?;
            let time = TimeConfig {
                monitor_every: full.monitor_every.unwrap_or(1),
                ..case.time
            };
            let res = run(&case.scheme, case.state, &time, |_, _| Ok(()))?;
            Ok((res.state.mesh.characteristic_h(), l2_errors(&res.state, &case.scheme, exact.as_ref())?))
        })();
        match attempt {
            Ok(r) => runs.push(r),
            Err(e) => {
                failure = Some(e.context(format!("mesh {nx}x{ny}")));
                break;
            }
        }
    }
    let rows = match runs.len() {
        0 => Vec::new(),
        1 => vec![lagrange_htc::cases::EocRow {
            h: runs[0].0,
            errors: runs[0].1,
            eoc: [None; 3],
        }],
        _ => l2_error_and_eoc(&runs)?,
    };
    fs::write(out.join("eoc.csv"), eoc_csv(&rows))?;
    let text = eoc_text(&rows);
    fs::write(out.join("eoc.txt"), &text)?;
    print!("{text}");
    match failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Run(args) => {
            let (full, spec, out) = prepare(&args)?;
            run_case(&full, &spec, &out).map_err(Failure::Numerical)
        }
        Command::Converge { args, meshes } => {
            let meshes = if meshes.is_empty() {
                vec!["49x49".to_string(), "64x64".to_string()]
            } else {
                meshes
            };
            let meshes = meshes
                .iter()
                .map(|m| parse_mesh(m))
                .collect::<Result<Vec<_>>>()
                .map_err(Failure::Usage)?;
            if meshes.len() < 2 {
                return Err(Failure::Usage(anyhow::anyhow!("convergence needs at least two meshes")));
            }
            let (full, spec, out) = prepare(&args)?;
            converge(&full, &spec, &meshes, &out).map_err(Failure::Numerical)
        }
        Command::Check { seed } => {
            let lines = check::run_checks(seed).map_err(Failure::Numerical)?;
            let mut ok = true;
            for l in &lines {
                ok &= l.passed();
                let verdict = if l.passed() { "PASS" } else { "FAIL" };
                println!("{verdict} {:<45} {:.3e} (tol {:.0e})", l.name, l.value, l.tol);
            }
            if ok {
                Ok(())
            } else {
                Err(Failure::Numerical(anyhow::anyhow!("invariant check failed")))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Numerical(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
