//! Configuration merging and command execution for the `boxtherm` binary.
//!
//! A run is described by `key = value` settings: first from an optional
//! config file, then from command-line flags, which win.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use boxtherm::coefficients::{Coefficient, CoefficientModel};
use boxtherm::error::{HypothesisError, MeshError, SolverError, VerificationError};
use boxtherm::io::{write_dual_vtk, write_trajectory_csv, write_vtk};
use boxtherm::solver::{BoxScheme, SolverConfig, StepDiagnostics};
use boxtherm::verification::{invariant_suite, thread_cap, ConvergenceStudy, ManufacturedProblem, ReferenceStudy};
use boxtherm::{DualMesh, Mesh};
use thiserror::Error;

pub mod args;

/// Recognised setting keys. `-` in keys is read as `_`.
pub const KEYS: &[&str] = &[
    "mesh_n",
    "mesh_file",
    "lambda",
    "k",
    "f",
    "u0",
    "tf",
    "dt",
    "picard_tol",
    "picard_max_iters",
    "cg_tol",
    "snapshot_stride",
    "levels",
    "benchmark",
    "tau_factor",
    "samples",
    "seed",
    "out",
    "vtk",
    "reproducible",
];

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("bad value for `{key}`: {reason}")]
    Value { key: String, reason: String },
    #[error("coefficients rejected: {0}")]
    Hypothesis(#[from] HypothesisError),
    #[error("mesh: {0}")]
    Mesh(#[from] MeshError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("verification FAIL: {0}")]
    VerificationFailed(String),
}

impl CliError {
    /// 1 usage/config, 2 numerical failure, 3 verification FAIL.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Numerical(_) => 2,
            CliError::VerificationFailed(_) => 3,
            _ => 1,
        }
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::Config(reason) => CliError::Value {
                key: "solver".into(),
                reason,
            },
            other => CliError::Numerical(other.to_string()),
        }
    }
}

impl From<VerificationError> for CliError {
    fn from(e: VerificationError) -> Self {
        match e {
            VerificationError::Mesh(m) => CliError::Mesh(m),
            VerificationError::TooFewLevels { .. } => CliError::Value {
                key: "levels".into(),
                reason: e.to_string(),
            },
            VerificationError::Solver(s) => s.into(),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

impl From<boxtherm::Error> for CliError {
    fn from(e: boxtherm::Error) -> Self {
        match e {
            boxtherm::Error::Mesh(m) => CliError::Mesh(m),
            boxtherm::Error::Hypothesis(h) => CliError::Hypothesis(h),
            boxtherm::Error::Solver(s) => s.into(),
            boxtherm::Error::Verification(v) => v.into(),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Mesh,
    Solve,
    Converge,
    Verify,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MeshSource {
    Structured(usize),
    File(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialCondition {
    Zero,
    /// `a · sin(πx) sin(πy)`
    Sine(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Benchmark {
    /// Manufactured `e^{−t} sin πx sin πy` with `k ≡ 1`.
    Standard,
    /// Same solution with the `sigmoid:0.5,2` conductivity.
    StandardSigmoid,
    /// Unforced problem with the configured coefficients, measured against
    /// a reference two levels finer than the finest level.
    Unforced,
}

/// Fully validated description of one run.
#[derive(Debug, Clone)]
pub struct RunSpec {
    pub command: Command,
    pub mesh: MeshSource,
    pub coefficients: CoefficientModel,
    pub initial: InitialCondition,
    pub solver: SolverConfig,
    pub levels: Vec<u32>,
    pub benchmark: Benchmark,
    pub tau_factor: f64,
    pub samples: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub vtk: bool,
    pub reproducible: bool,
}

fn normalize(key: &str) -> String {
    key.trim().replace('-', "_")
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_settings(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| CliError::Syntax {
            line: i + 1,
            reason: "expected `key = value`".into(),
        })?;
        let key = normalize(key);
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::UnknownKey(key));
        }
        insert(&mut out, key, value.trim().to_string());
    }
    Ok(out)
}

fn insert(map: &mut BTreeMap<String, String>, key: String, value: String) {
    // a later mesh source replaces the other kind
    match key.as_str() {
        "mesh_n" => map.remove("mesh_file"),
        "mesh_file" => map.remove("mesh_n"),
        _ => None,
    };
    map.insert(key, value);
}

fn value<T: std::str::FromStr>(map: &BTreeMap<String, String>, key: &str, default: T) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    match map.get(key) {
        None => Ok(default),
        Some(v) => v.parse().map_err(|e: T::Err| CliError::Value {
            key: key.into(),
            reason: format!("`{v}`: {e}"),
        }),
    }
}

fn flag(map: &BTreeMap<String, String>, key: &str) -> Result<bool, CliError> {
    match map.get(key).map(String::as_str) {
        None | Some("false") | Some("0") | Some("no") => Ok(false),
        Some("true") | Some("1") | Some("yes") | Some("") => Ok(true),
        Some(v) => Err(CliError::Value {
            key: key.into(),
            reason: format!("`{v}` is not a boolean"),
        }),
    }
}

/// `a..b` (inclusive), `a,b,c`, or a single `n` meaning `1..n`.
pub fn parse_levels(text: &str) -> Result<Vec<u32>, CliError> {
    let bad = |reason: &str| CliError::Value {
        key: "levels".into(),
        reason: format!("`{text}`: {reason}"),
    };
    let num = |s: &str| s.trim().parse::<u32>().map_err(|_| bad("not a level number"));
    let levels: Vec<u32> = if let Some((a, b)) = text.split_once("..") {
        let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
        (a..=b).collect()
    } else if text.contains(',') {
        text.split(',').map(num).collect::<Result<_, _>>()?
    } else {
        (1..=num(text)?).collect()
    };
    if levels.is_empty() {
        return Err(bad("empty range"));
    }
    if levels.iter().any(|&l| l > 10) {
        return Err(bad("levels above 10 are not supported"));
    }
    let mut sorted = levels.clone();
    sorted.sort_unstable();
    sorted.dedup();
    Ok(sorted)
}

fn parse_initial(text: &str) -> Result<InitialCondition, CliError> {
    match text.split_once(':') {
        None if text == "zero" => Ok(InitialCondition::Zero),
        Some(("sine", a)) => a.parse().map(InitialCondition::Sine).map_err(|_| CliError::Value {
            key: "u0".into(),
            reason: format!("`{text}`: bad amplitude"),
        }),
        _ => Err(CliError::Value {
            key: "u0".into(),
            reason: format!("`{text}`: expected `zero` or `sine:a`"),
        }),
    }
}

fn parse_benchmark(text: &str) -> Result<Benchmark, CliError> {
    match text {
        "standard" => Ok(Benchmark::Standard),
        "standard-sigmoid" => Ok(Benchmark::StandardSigmoid),
        "unforced" => Ok(Benchmark::Unforced),
        _ => Err(CliError::Value {
            key: "benchmark".into(),
            reason: format!("`{text}`: expected standard, standard-sigmoid or unforced"),
        }),
    }
}

/// Merges config-file text with command-line overrides (which win) and
/// validates the result.
///
/// Defaults: 32×32 unit-square mesh, `k = const:1`, `f = const:1`, λ = 1,
/// `u0 = zero`, t_f = 0.5, τ = 0.01, levels `2..5`, benchmark `standard`,
/// τ-factor 0.1, output directory `out`.
pub fn parse_config(command: Command, text: &str, overrides: &[(String, String)]) -> Result<RunSpec, CliError> {
    let mut map = parse_settings(text)?;
    for (k, v) in overrides {
        let key = normalize(k);
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::UnknownKey(key));
        }
        insert(&mut map, key, v.clone());
    }

    let mesh = match (map.get("mesh_file"), map.get("mesh_n")) {
        (Some(path), _) => MeshSource::File(PathBuf::from(path)),
        _ => MeshSource::Structured(value(&map, "mesh_n", 32usize)?),
    };
    if mesh == MeshSource::Structured(0) {
        return Err(CliError::Value {
            key: "mesh_n".into(),
            reason: "must be at least 1".into(),
        });
    }
    let preset = |key: &str| -> Result<Coefficient, CliError> {
        let text = map.get(key).map_or("const:1", String::as_str);
        text.parse().map_err(|e: String| CliError::Value {
            key: key.into(),
            reason: e,
        })
    };
    let coefficients = CoefficientModel::new(preset("k")?, preset("f")?, value(&map, "lambda", 1.0)?)?;

    let defaults = SolverConfig::default();
    let solver = SolverConfig {
        tau: value(&map, "dt", 0.01)?,
        t_final: value(&map, "tf", 0.5)?,
        picard_tol: value(&map, "picard_tol", defaults.picard_tol)?,
        picard_max_iters: value(&map, "picard_max_iters", defaults.picard_max_iters)?,
        cg_tol: value(&map, "cg_tol", defaults.cg_tol)?,
        snapshot_stride: value(&map, "snapshot_stride", defaults.snapshot_stride)?,
        ..defaults
    };
    solver.validate()?;

    let tau_factor: f64 = value(&map, "tau_factor", 0.1)?;
    if !(tau_factor > 0.0) {
        return Err(CliError::Value {
            key: "tau_factor".into(),
            reason: "must be positive".into(),
        });
    }

    Ok(RunSpec {
        command,
        mesh,
        coefficients,
        initial: parse_initial(map.get("u0").map_or("zero", String::as_str))?,
        solver,
        levels: parse_levels(map.get("levels").map_or("2..5", String::as_str))?,
        benchmark: parse_benchmark(map.get("benchmark").map_or("standard", String::as_str))?,
        tau_factor,
        samples: value(&map, "samples", 100)?,
        seed: value(&map, "seed", 2024)?,
        out: PathBuf::from(map.get("out").map_or("out", String::as_str)),
        vtk: flag(&map, "vtk")?,
        reproducible: flag(&map, "reproducible")?,
    })
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<(), CliError> {
    let mut w = create(path)?;
    f(&mut w).and_then(|_| w.flush()).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load_mesh(source: &MeshSource) -> Result<Mesh, CliError> {
    match source {
        MeshSource::Structured(n) => Ok(Mesh::structured(*n)?),
        MeshSource::File(path) => {
            let text = fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            Mesh::from_text(&text).map_err(|e| match e {
                MeshError::Parse { line, reason } => CliError::Mesh(MeshError::Parse {
                    line,
                    reason: format!("{}: {reason}", path.display()),
                }),
                other => other.into(),
            })
        }
    }
}

fn steps_csv(steps: &[StepDiagnostics]) -> String {
    let mut out = String::from("time,tau,picard_iterations,cg_iterations,contraction_ratio,source_integral,backoffs\n");
    for s in steps {
        let ratio = s.contraction_ratio.map_or_else(String::new, |r| format!("{r:e}"));
        out.push_str(&format!(
            "{:e},{:e},{},{},{ratio},{:e},{}\n",
            s.time, s.tau, s.picard_iterations, s.cg_iterations, s.source_integral, s.backoffs
        ));
    }
    out
}

/// Runs the command, writing artifacts under `spec.out`. Returns a short
/// human-readable summary.
pub fn execute(spec: &RunSpec) -> Result<String, CliError> {
    fs::create_dir_all(&spec.out).map_err(|source| CliError::Io {
        path: spec.out.clone(),
        source,
    })?;
    let threads = if spec.reproducible { 1 } else { thread_cap() };
    let out = |name: &str| spec.out.join(name);

    match spec.command {
        Command::Mesh => {
            let mesh = load_mesh(&spec.mesh)?;
            let report = mesh.validate();
            write_file(&out("mesh.txt"), |w| w.write_all(mesh.to_text().as_bytes()))?;
            write_file(&out("mesh_report.txt"), |w| writeln!(w, "{report}"))?;
            if spec.vtk {
                let dual = DualMesh::build(&mesh).map_err(|e| CliError::Numerical(e.to_string()))?;
                write_file(&out("mesh.vtk"), |w| write_vtk(w, &mesh, &[]))?;
                write_file(&out("dual.vtk"), |w| write_dual_vtk(w, &mesh, &dual))?;
            }
            if !report.is_valid() {
                return Err(CliError::VerificationFailed(format!("mesh is not admissible\n{report}")));
            }
            Ok(format!(
                "mesh: {} vertices, {} triangles, h = {:.4e}",
                mesh.num_vertices(),
                mesh.num_triangles(),
                mesh.h()
            ))
        }
        Command::Solve => {
            let mesh = load_mesh(&spec.mesh)?;
            let scheme = BoxScheme::new(mesh.clone(), spec.coefficients.clone(), spec.solver.clone())?;
            let traj = match spec.initial {
                InitialCondition::Zero => scheme.solve_transient(|_| 0.0, None)?,
                InitialCondition::Sine(a) => {
                    scheme.solve_transient(|p| a * (PI * p[0]).sin() * (PI * p[1]).sin(), None)?
                }
            };
            write_file(&out("trajectory.csv"), |w| write_trajectory_csv(w, &mesh, &traj))?;
            write_file(&out("steps.csv"), |w| w.write_all(steps_csv(&traj.steps).as_bytes()))?;
            if spec.vtk {
                for (i, field) in traj.fields.iter().enumerate() {
                    write_file(&out(&format!("solution_{i:04}.vtk")), |w| write_vtk(w, &mesh, &[("u", field)]))?;
                }
            }
            let max = traj.final_field().values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
            Ok(format!(
                "solve: {} steps to t = {}, max |u| = {max:.6e}",
                traj.steps.len(),
                traj.times.last().copied().unwrap_or(0.0)
            ))
        }
        Command::Converge => {
            let report = match spec.benchmark {
                Benchmark::Standard | Benchmark::StandardSigmoid => {
                    let k = if spec.benchmark == Benchmark::Standard {
                        Coefficient::Const(1.0)
                    } else {
                        Coefficient::Sigmoid { lo: 0.5, hi: 2.0 }
                    };
                    ConvergenceStudy {
                        problem: ManufacturedProblem::standard(k, spec.coefficients.lambda)?,
                        levels: spec.levels.clone(),
                        tau_factor: spec.tau_factor,
                        config: spec.solver.clone(),
                        threads,
                    }
                    .run()?
                }
                Benchmark::Unforced => {
                    let finest = *spec.levels.last().expect("levels are non-empty");
                    ReferenceStudy {
                        coefficients: spec.coefficients.clone(),
                        initial: Arc::new(|p| (PI * p[0]).sin() * (PI * p[1]).sin()),
                        levels: spec.levels.clone(),
                        reference_level: finest + 2,
                        config: spec.solver.clone(),
                        threads,
                    }
                    .run()?
                    .report
                }
            };
            let csv = report.to_csv();
            write_file(&out("convergence.csv"), |w| w.write_all(csv.as_bytes()))?;
            let summary = format!(
                "converge: rates L_inf(L2) {:.3}, L2(H1) {:.3}, L_inf(H1) {:.3}",
                report.rates[0], report.rates[1], report.rates[2]
            );
            if report.all_pass() {
                Ok(summary)
            } else {
                Err(CliError::VerificationFailed(summary))
            }
        }
        Command::Verify => {
            let report = invariant_suite(&spec.levels, spec.samples, spec.seed)?;
            let table = report.to_table();
            write_file(&out("invariants.csv"), |w| w.write_all(table.as_bytes()))?;
            let failed: Vec<_> = report.checks.iter().filter(|c| !c.pass).map(|c| c.name).collect();
            if failed.is_empty() {
                Ok(format!("verify: {} checks PASS", report.checks.len()))
            } else {
                Err(CliError::VerificationFailed(failed.join(", ")))
            }
        }
    }
}
