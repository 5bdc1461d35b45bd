//! Command-line surface.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::{execute, parse_config, CliError, Command};

#[derive(Debug, Parser)]
#[command(name = "boxtherm", version, about = "Box-scheme solver for the nonlocal thermistor problem")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Generate or read a mesh, validate it and write it out.
    Mesh(Settings),
    /// Run the transient solver and write the trajectory.
    Solve(Settings),
    /// Refinement study on a benchmark; exits 3 if a rate is below 0.9.
    Converge(Settings),
    /// Run the geometry/operator invariant suite; exits 3 on any FAIL.
    Verify(Settings),
}

#[derive(Debug, Args)]
pub struct Settings {
    /// key = value settings file; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Cells per side of the structured unit-square mesh.
    #[arg(long)]
    pub mesh_n: Option<String>,
    /// Mesh in the text format written by `boxtherm mesh`.
    #[arg(long)]
    pub mesh_file: Option<String>,
    /// Load parameter of the nonlocal source.
    #[arg(long)]
    pub lambda: Option<String>,
    /// Conductivity preset, e.g. const:1 or sigmoid:0.5,2.
    #[arg(long)]
    pub k: Option<String>,
    /// Source preset, e.g. const:1 or bounded-quadratic:1,1,2.
    #[arg(long)]
    pub f: Option<String>,
    /// Initial condition: zero or sine:a.
    #[arg(long)]
    pub u0: Option<String>,
    /// Final time.
    #[arg(long)]
    pub tf: Option<String>,
    /// Time step.
    #[arg(long)]
    pub dt: Option<String>,
    /// Picard stopping tolerance on successive iterates.
    #[arg(long)]
    pub picard_tol: Option<String>,
    /// a..b, a,b,c, or n (meaning 1..n).
    #[arg(long)]
    pub levels: Option<String>,
    /// standard, standard-sigmoid or unforced.
    #[arg(long)]
    pub benchmark: Option<String>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<String>,
    /// Also write VTK files.
    #[arg(long)]
    pub vtk: bool,
    /// Single worker thread, fixed seeds.
    #[arg(long)]
    pub reproducible: bool,
}

impl Settings {
    fn overrides(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        let mut push = |k: &str, v: &Option<String>| {
            if let Some(v) = v {
                out.push((k.to_string(), v.clone()));
            }
        };
        push("mesh_n", &self.mesh_n);
        push("mesh_file", &self.mesh_file);
        push("lambda", &self.lambda);
        push("k", &self.k);
        push("f", &self.f);
        push("u0", &self.u0);
        push("tf", &self.tf);
        push("dt", &self.dt);
        push("picard_tol", &self.picard_tol);
        push("levels", &self.levels);
        push("benchmark", &self.benchmark);
        push("out", &self.out);
        if self.vtk {
            out.push(("vtk".into(), "true".into()));
        }
        if self.reproducible {
            out.push(("reproducible".into(), "true".into()));
        }
        out
    }
}

fn run_settings(command: Command, settings: &Settings) -> Result<String, CliError> {
    let text = match &settings.config {
        Some(path) => std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?,
        None => String::new(),
    };
    let spec = parse_config(command, &text, &settings.overrides())?;
    execute(&spec)
}

/// Parses `args` (program name first), runs, and returns the exit status.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let (command, settings) = match &cli.command {
        Sub::Mesh(s) => (Command::Mesh, s),
        Sub::Solve(s) => (Command::Solve, s),
        Sub::Converge(s) => (Command::Converge, s),
        Sub::Verify(s) => (Command::Verify, s),
    };
    match run_settings(command, settings) {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("error: {}", e.to_string().replace('\n', "; "));
            e.exit_code()
        }
    }
}
