//! `gdl` — command line front end for the game dynamics laboratory.
//!
//! Every subcommand writes its tables into `--out` along with a
//! `manifest.json` describing the resolved run. Exit codes: 0 on success,
//! 1 for input errors, 2 for numerical failures (a diverging solver, an
//! empty certificate). `GDL_THREADS` caps scan parallelism.

mod commands;
mod manifest;
mod output;
mod spec_file;

use clap::{Parser, Subcommand};
use commands::analyze::AnalyzeArgs;
use commands::regret::RegretArgs;
use commands::scan::ScanArgs;
use commands::simulate::SimulateArgs;
use gdl_core::{GdlError, Result};
use manifest::Manifest;
use std::path::Path;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "gdl", version, about = "Numerical laboratory for game dynamics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Equilibrium candidates, their linear stability, and field structure
    Analyze(AnalyzeArgs),
    /// Integrate a learning dynamic and classify the trajectory
    Simulate(SimulateArgs),
    /// Grid scan of variational and Lyapunov decrease diagnostics
    Scan(ScanArgs),
    /// Scan plus a certified basin-of-attraction level
    Basin(ScanArgs),
    /// Bandit self-play with external regret curves
    Regret(RegretArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Analyze(_) => "analyze",
            Command::Simulate(_) => "simulate",
            Command::Scan(_) => "scan",
            Command::Basin(_) => "basin",
            Command::Regret(_) => "regret",
        }
    }

    fn out_dir(&self) -> &Path {
        match self {
            Command::Analyze(a) => &a.out,
            Command::Simulate(a) => &a.out,
            Command::Scan(a) | Command::Basin(a) => &a.out,
            Command::Regret(a) => &a.out,
        }
    }

    fn run(&self, man: &mut Manifest, threads: usize) -> Result<()> {
        match self {
            Command::Analyze(a) => commands::analyze::run(a, man),
            Command::Simulate(a) => commands::simulate::run(a, man),
            Command::Scan(a) => commands::scan::run(a, man, threads).map(|_| ()),
            Command::Basin(a) => commands::basin::run(a, man, threads),
            Command::Regret(a) => commands::regret::run(a, man),
        }
    }
}

fn thread_count() -> Result<usize> {
    match std::env::var("GDL_THREADS") {
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
        Ok(s) => s
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n >= 1)
            .ok_or_else(|| {
                GdlError::input(format!("GDL_THREADS={s:?} is not a positive integer"))
            }),
    }
}

fn exit_code(e: &GdlError) -> i32 {
    match e {
        GdlError::Input(_) => 1,
        GdlError::Numerical(_) => 2,
    }
}

fn main() {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };

    let threads = match thread_count() {
        Ok(t) => t,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(1);
        }
    };
    let out_dir = cli.command.out_dir().to_path_buf();
    if let Err(e) = std::fs::create_dir_all(&out_dir) {
        eprintln!("cannot create {}: {e}", out_dir.display());
        std::process::exit(1);
    }

    let started = Instant::now();
    let mut man = Manifest::new(cli.command.name(), argv, threads);
    let result = cli.command.run(&mut man, threads);
    man.finish(&result, started.elapsed().as_millis() as u64);
    if let Err(e) = man.write(&out_dir) {
        eprintln!("{e}");
    }

    if let Err(e) = result {
        eprintln!("{e}");
        std::process::exit(exit_code(&e));
    }
}
