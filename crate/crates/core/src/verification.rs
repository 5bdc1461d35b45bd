//! Oracles, space-time error norms, refinement studies and the invariant
//! suite for the geometric and operator identities.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::assembly::assemble_flux_matrix_full;
use crate::coefficients::{Coefficient, CoefficientModel};
use crate::dual::DualMesh;
use crate::error::VerificationError;
use crate::field::{Dofs, NodalField, QuadratureRule};
use crate::linalg::SparseOperator;
use crate::mesh::{Mesh, Point};
use crate::operators::{box_interpolation_error, compute_norms, error_against, lagrange_interpolate};
use crate::solver::{BoxScheme, Forcing, SolverConfig, Trajectory};

/// Minimum fitted rate for a study to pass.
pub const RATE_THRESHOLD: f64 = 0.9;
/// Largest allowed max/min spread of an empirical constant across levels.
pub const BAND_LIMIT: f64 = 10.0;
/// Tolerance of the exact algebraic identities.
pub const IDENTITY_TOL: f64 = 1e-12;

/// Piecewise-linear stiffness matrix over all vertices by the cotangent
/// formula: the edge opposite angle θ gets weight ½ cot θ from each triangle.
pub fn fem_stiffness_oracle(mesh: &Mesh) -> SparseOperator {
    let mut triplets = Vec::with_capacity(12 * mesh.num_triangles());
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let pts = mesh.triangle_points(t);
        for k in 0..3 {
            let (i, j) = ((k + 1) % 3, (k + 2) % 3);
            let u = [pts[i][0] - pts[k][0], pts[i][1] - pts[k][1]];
            let v = [pts[j][0] - pts[k][0], pts[j][1] - pts[k][1]];
            let cot = (u[0] * v[0] + u[1] * v[1]) / (u[0] * v[1] - u[1] * v[0]);
            let w = 0.5 * cot;
            triplets.push((tri[i], tri[i], w));
            triplets.push((tri[j], tri[j], w));
            triplets.push((tri[i], tri[j], -w));
            triplets.push((tri[j], tri[i], -w));
        }
    }
    SparseOperator::from_triplets(mesh.num_vertices(), triplets, true)
}

/// Least-squares slope of `ln err` against `ln h`.
pub fn fit_rate(h: &[f64], err: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = h
        .iter()
        .zip(err)
        .filter(|(_, e)| **e > 0.0)
        .map(|(h, e)| (h.ln(), e.ln()))
        .collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Linear interpolation of `field` onto `mesh.refine_uniform()`.
pub fn prolongate(mesh: &Mesh, field: &NodalField) -> (Mesh, NodalField) {
    let fine = mesh.refine_uniform();
    let v = field.values();
    let mut values = v.to_vec();
    values.extend(mesh.edges().iter().map(|&(a, b)| 0.5 * (v[a] + v[b])));
    let f = NodalField::new(&fine, values).expect("refined vertex count");
    (fine, f)
}

/// Errors of one trajectory in the three space-time norms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceTimeErrors {
    /// max_n ‖e(t_n)‖
    pub linf_l2: f64,
    /// (Σ_n τ_n ‖e(t_n)‖₁²)^{1/2}
    pub l2_h1: f64,
    /// max_n ‖e(t_n)‖₁
    pub linf_h1: f64,
}

fn accumulate(per_snapshot: impl Iterator<Item = (f64, f64, f64)>) -> SpaceTimeErrors {
    let mut out = SpaceTimeErrors {
        linf_l2: 0.0,
        l2_h1: 0.0,
        linf_h1: 0.0,
    };
    for (tau, l2, h1) in per_snapshot {
        out.linf_l2 = out.linf_l2.max(l2);
        out.linf_h1 = out.linf_h1.max(h1);
        out.l2_h1 += tau * h1 * h1;
    }
    out.l2_h1 = out.l2_h1.sqrt();
    out
}

/// Errors against an exact solution `u(x, t)` by degree-5 quadrature.
pub fn errors_against_exact(
    mesh: &Mesh,
    traj: &Trajectory,
    exact: &dyn Fn(Point, f64) -> f64,
    exact_gradient: &dyn Fn(Point, f64) -> [f64; 2],
) -> SpaceTimeErrors {
    accumulate(traj.times.iter().zip(&traj.fields).zip(&traj.step_sizes).map(|((&t, f), &tau)| {
        let e = error_against(mesh, f, |p| exact(p, t), |p| exact_gradient(p, t), QuadratureRule::Degree5);
        (tau, e.l2, e.h1())
    }))
}

/// Errors against a reference trajectory computed on a uniform refinement
/// of `mesh` (or on `mesh` itself). Snapshot times must agree.
pub fn errors_against_reference(
    mesh: &Mesh,
    traj: &Trajectory,
    reference_mesh: &Mesh,
    reference: &Trajectory,
) -> Result<SpaceTimeErrors, VerificationError> {
    if traj.times.len() != reference.times.len() {
        return Err(VerificationError::TimeGridMismatch(format!(
            "{} snapshots vs {}",
            traj.times.len(),
            reference.times.len()
        )));
    }
    for (a, b) in traj.times.iter().zip(&reference.times) {
        if (a - b).abs() > 1e-9 * a.abs().max(1.0) {
            return Err(VerificationError::TimeGridMismatch(format!("t = {a} vs t = {b}")));
        }
    }
    let dual = DualMesh::build(reference_mesh)?;
    let mut per = Vec::with_capacity(traj.times.len());
    for ((f, r), &tau) in traj.fields.iter().zip(&reference.fields).zip(&traj.step_sizes) {
        let mut m = mesh.clone();
        let mut v = f.clone();
        let mut depth = 0;
        while m.fingerprint() != reference_mesh.fingerprint() {
            if depth == 8 || m.num_vertices() >= reference_mesh.num_vertices() {
                return Err(VerificationError::NotNested);
            }
            (m, v) = prolongate(&m, &v);
            depth += 1;
        }
        let n = compute_norms(reference_mesh, &dual, &v.sub(r));
        per.push((tau, n.l2, n.h1()));
    }
    Ok(accumulate(per.into_iter()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelErrors {
    pub level: u32,
    pub h: f64,
    pub tau: f64,
    pub errors: SpaceTimeErrors,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub levels: Vec<LevelErrors>,
    /// Fitted rates for (L∞(L²), L²(H¹), L∞(H¹)).
    pub rates: [f64; 3],
    pub threshold: f64,
}

impl ErrorReport {
    pub fn new(mut levels: Vec<LevelErrors>, threshold: f64) -> Self {
        levels.sort_by_key(|l| l.level);
        let h: Vec<f64> = levels.iter().map(|l| l.h).collect();
        let col = |f: fn(&SpaceTimeErrors) -> f64| levels.iter().map(|l| f(&l.errors)).collect::<Vec<_>>();
        let rates = [
            fit_rate(&h, &col(|e| e.linf_l2)),
            fit_rate(&h, &col(|e| e.l2_h1)),
            fit_rate(&h, &col(|e| e.linf_h1)),
        ];
        ErrorReport { levels, rates, threshold }
    }

    /// Per-norm pass flags, in the order of [`Self::rates`].
    pub fn passes(&self) -> [bool; 3] {
        self.rates.map(|r| r >= self.threshold)
    }

    pub fn all_pass(&self) -> bool {
        self.passes().iter().all(|&p| p)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("level,h,tau,err_linf_l2,err_l2_h1,err_linf_h1\n");
        for l in &self.levels {
            let _ = writeln!(
                out,
                "{},{:e},{:e},{:e},{:e},{:e}",
                l.level, l.h, l.tau, l.errors.linf_l2, l.errors.l2_h1, l.errors.linf_h1
            );
        }
        let names = ["err_linf_l2", "err_l2_h1", "err_linf_h1"];
        for ((name, rate), pass) in names.iter().zip(self.rates).zip(self.passes()) {
            let _ = writeln!(
                out,
                "# rate {name} = {rate:.4} ({})",
                if pass { "PASS" } else { "FAIL" }
            );
        }
        out
    }
}

type SpaceTimeFn = Arc<dyn Fn(Point, f64) -> f64 + Send + Sync>;
type SpaceTimeGrad = Arc<dyn Fn(Point, f64) -> [f64; 2] + Send + Sync>;

/// Problem with a known exact solution and the forcing that produces it.
#[derive(Clone)]
pub struct ManufacturedProblem {
    pub name: String,
    pub coefficients: CoefficientModel,
    pub exact: SpaceTimeFn,
    pub exact_gradient: SpaceTimeGrad,
    pub forcing: Option<Forcing>,
}

impl ManufacturedProblem {
    /// `u = e^{−t} sin(πx) sin(πy)` with `f = 1 + min(ξ², 4)` and the given
    /// preset `k`.
    ///
    /// Since |u| ≤ 1, `f(u) = 1 + u²` and `∫_Ω f(u) = 1 + e^{−2t}/4`, so
    ///
    /// ```text
    /// g = −u + 2π² k(u) u − k'(u)|∇u|² − λ (1 + u²) / (1 + e^{−2t}/4)²
    /// ```
    pub fn standard(k: Coefficient, lambda: f64) -> Result<Self, crate::error::HypothesisError> {
        let k_fn = k.clone();
        let k_prime = k.clone();
        k_prime
            .derivative(0.0)
            .ok_or_else(|| crate::error::HypothesisError::Constants("standard benchmark needs a preset k".into()))?;
        let f = Coefficient::BoundedQuadratic { a: 1.0, b: 1.0, r: 2.0 };
        let coefficients = CoefficientModel::new(k, f, lambda)?;
        let exact = |p: Point, t: f64| (-t).exp() * (PI * p[0]).sin() * (PI * p[1]).sin();
        let gradient = |p: Point, t: f64| {
            let e = (-t).exp() * PI;
            [
                e * (PI * p[0]).cos() * (PI * p[1]).sin(),
                e * (PI * p[0]).sin() * (PI * p[1]).cos(),
            ]
        };
        let forcing = move |p: Point, t: f64| {
            let u = exact(p, t);
            let g = gradient(p, t);
            let grad2 = g[0] * g[0] + g[1] * g[1];
            let integral = 1.0 + 0.25 * (-2.0 * t).exp();
            -u + 2.0 * PI * PI * k_fn.eval(u) * u
                - k_prime.derivative(u).unwrap() * grad2
                - lambda * (1.0 + u * u) / (integral * integral)
        };
        Ok(ManufacturedProblem {
            name: "standard".into(),
            coefficients,
            exact: Arc::new(exact),
            exact_gradient: Arc::new(gradient),
            forcing: Some(Arc::new(forcing)),
        })
    }

    /// `u ≡ 0`, with `g` cancelling the nonlocal source at zero.
    pub fn zero(coefficients: CoefficientModel) -> Self {
        let f0 = coefficients.f.eval(0.0);
        let lambda = coefficients.lambda;
        // unit square: ∫ f(0) = f(0)
        let g = -lambda * f0 / (f0 * f0);
        ManufacturedProblem {
            name: "zero".into(),
            coefficients,
            exact: Arc::new(|_, _| 0.0),
            exact_gradient: Arc::new(|_, _| [0.0, 0.0]),
            forcing: Some(Arc::new(move |_, _| g)),
        }
    }
}

/// Refinement study against a manufactured solution with τ = `tau_factor`·h.
#[derive(Clone)]
pub struct ConvergenceStudy {
    pub problem: ManufacturedProblem,
    pub levels: Vec<u32>,
    pub tau_factor: f64,
    pub config: SolverConfig,
    pub threads: usize,
}

fn run_levels<T: Send>(levels: &[u32], threads: usize, job: impl Fn(u32) -> T + Sync) -> Vec<T> {
    let threads = threads.max(1);
    let mut out: Vec<Option<T>> = (0..levels.len()).map(|_| None).collect();
    for chunk in levels.iter().zip(out.iter_mut()).collect::<Vec<_>>().chunks_mut(threads) {
        std::thread::scope(|s| {
            for (level, slot) in chunk.iter_mut() {
                let job = &job;
                let level = **level;
                s.spawn(move || **slot = Some(job(level)));
            }
        });
    }
    out.into_iter().map(|o| o.expect("every level ran")).collect()
}

/// Worker count from `BOXTHERM_THREADS`, defaulting to the available parallelism.
pub fn thread_cap() -> usize {
    std::env::var("BOXTHERM_THREADS")
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&n: &usize| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Per-level trajectories plus their meshes, for callers that want more
/// than the error table.
pub struct LevelRun {
    pub level: u32,
    pub mesh: Mesh,
    pub trajectory: Trajectory,
}

impl ConvergenceStudy {
    pub fn run_level(&self, level: u32) -> Result<LevelRun, VerificationError> {
        let mesh = Mesh::structured_level(level)?;
        let config = SolverConfig {
            tau: self.tau_factor * mesh.h(),
            ..self.config.clone()
        };
        let dual = DualMesh::build(&mesh)?;
        let scheme = BoxScheme::with_dual(mesh.clone(), dual, self.problem.coefficients.clone(), config)?;
        let exact = self.problem.exact.clone();
        let forcing = self.problem.forcing.clone();
        let trajectory = scheme.solve_transient(
            |p| exact(p, 0.0),
            forcing.as_ref().map(|g| g.as_ref() as &dyn Fn(Point, f64) -> f64),
        )?;
        Ok(LevelRun { level, mesh, trajectory })
    }

    pub fn run(&self) -> Result<ErrorReport, VerificationError> {
        if self.levels.len() < 3 {
            return Err(VerificationError::TooFewLevels {
                needed: 3,
                got: self.levels.len(),
            });
        }
        let results = run_levels(&self.levels, self.threads, |level| {
            let run = self.run_level(level)?;
            let errors = errors_against_exact(
                &run.mesh,
                &run.trajectory,
                self.problem.exact.as_ref(),
                self.problem.exact_gradient.as_ref(),
            );
            Ok::<_, VerificationError>(LevelErrors {
                level,
                h: run.mesh.h(),
                tau: self.tau_factor * run.mesh.h(),
                errors,
            })
        });
        let levels = results.into_iter().collect::<Result<Vec<_>, _>>()?;
        Ok(ErrorReport::new(levels, RATE_THRESHOLD))
    }
}

/// Study of the unforced problem against a fine-level reference solution,
/// all levels sharing one τ so the time grids coincide.
#[derive(Clone)]
pub struct ReferenceStudy {
    pub coefficients: CoefficientModel,
    pub initial: Arc<dyn Fn(Point) -> f64 + Send + Sync>,
    pub levels: Vec<u32>,
    pub reference_level: u32,
    pub config: SolverConfig,
    pub threads: usize,
}

pub struct ReferenceOutcome {
    pub report: ErrorReport,
    pub reference_mesh: Mesh,
    pub reference: Trajectory,
}

/// Structured mesh of `level` obtained by uniformly refining the mesh of
/// `base`, so that meshes of different levels nest vertex-for-vertex.
pub fn nested_level(base: u32, level: u32) -> Result<Mesh, VerificationError> {
    let mut mesh = Mesh::structured_level(base)?;
    for _ in base..level {
        mesh = mesh.refine_uniform();
    }
    Ok(mesh)
}

impl ReferenceStudy {
    fn solve(&self, level: u32) -> Result<(Mesh, Trajectory), VerificationError> {
        let base = self.levels.iter().copied().min().unwrap_or(level).min(level);
        let mesh = nested_level(base, level)?;
        let dual = DualMesh::build(&mesh)?;
        let scheme = BoxScheme::with_dual(mesh.clone(), dual, self.coefficients.clone(), self.config.clone())?;
        let init = self.initial.clone();
        let traj = scheme.solve_transient(|p| init(p), None)?;
        Ok((mesh, traj))
    }

    pub fn run(&self) -> Result<ReferenceOutcome, VerificationError> {
        if self.levels.len() < 3 {
            return Err(VerificationError::TooFewLevels {
                needed: 3,
                got: self.levels.len(),
            });
        }
        let (reference_mesh, reference) = self.solve(self.reference_level)?;
        let results = run_levels(&self.levels, self.threads, |level| {
            let (mesh, traj) = self.solve(level)?;
            let errors = errors_against_reference(&mesh, &traj, &reference_mesh, &reference)?;
            Ok::<_, VerificationError>(LevelErrors {
                level,
                h: mesh.h(),
                tau: self.config.tau,
                errors,
            })
        });
        let levels = results.into_iter().collect::<Result<Vec<_>, _>>()?;
        Ok(ReferenceOutcome {
            report: ErrorReport::new(levels, RATE_THRESHOLD),
            reference_mesh,
            reference,
        })
    }
}

/// One line of the invariant table.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    /// `None` for checks spanning all levels.
    pub level: Option<u32>,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct InvariantReport {
    pub checks: Vec<CheckResult>,
    /// Smallest sampled xᵀAx / ‖x‖₁² per level (reported, not asserted).
    pub coercivity: Vec<(u32, f64)>,
}

impl InvariantReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// `check,level,value,threshold,status` lines.
    pub fn to_table(&self) -> String {
        let mut out = String::from("check,level,value,threshold,status\n");
        for c in &self.checks {
            let level = c.level.map_or_else(|| "all".to_string(), |l| l.to_string());
            let _ = writeln!(
                out,
                "{},{},{:e},{:e},{}",
                c.name,
                level,
                c.value,
                c.threshold,
                if c.pass { "PASS" } else { "FAIL" }
            );
        }
        out
    }
}

fn random_interior_field(mesh: &Mesh, rng: &mut ChaCha8Rng) -> NodalField {
    let mut f = NodalField::zeros(mesh);
    for v in mesh.interior_vertices() {
        f.values_mut()[v] = rng.gen_range(-1.0..1.0);
    }
    f
}

/// Largest |v(p*) − v(p) − (∇v|_T · n) |p − p*|| over every piece.
pub fn jump_identity_residual(mesh: &Mesh, dual: &DualMesh, v: &NodalField) -> f64 {
    let vals = v.values();
    let mut worst: f64 = 0.0;
    for s in dual.segments() {
        let jump = vals[s.p_star] - vals[s.p];
        for piece in &s.pieces {
            let g = v.gradient_in(mesh, piece.triangle);
            let dn = g[0] * s.unit_normal[0] + g[1] * s.unit_normal[1];
            worst = worst.max((jump - dn * s.l_db).abs());
        }
    }
    worst
}

fn band(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    max / min
}

/// Geometry and operator checks on structured meshes of the given levels,
/// with `samples` random fields per level.
pub fn invariant_suite(levels: &[u32], samples: usize, seed: u64) -> Result<InvariantReport, VerificationError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = InvariantReport::default();
    let mut ratio_1h = Vec::new();
    let mut ratio_0h = Vec::new();
    let mut bound_consts = Vec::new();
    let mut interp_consts = Vec::new();
    let unit_k = CoefficientModel::new(Coefficient::Const(1.0), Coefficient::Const(1.0), 1.0)
        .expect("constant coefficients are admissible");
    let var_k = CoefficientModel::new(Coefficient::Sigmoid { lo: 0.5, hi: 2.0 }, Coefficient::Const(1.0), 1.0)
        .expect("sigmoid preset is admissible");

    for &level in levels {
        let mesh = Mesh::structured_level(level)?;
        let dual = DualMesh::build(&mesh)?;
        let dofs = Dofs::new(&mesh);
        let mut push = |name: &'static str, value: f64, threshold: f64, pass: bool| {
            report.checks.push(CheckResult {
                name,
                level: Some(level),
                value,
                threshold,
                pass,
            })
        };

        let partition = (dual.total_area() - mesh.domain_area()).abs() / mesh.domain_area();
        push("partition", partition, IDENTITY_TOL, partition <= IDENTITY_TOL);
        let positive = dual.box_areas().iter().cloned().fold(f64::INFINITY, f64::min);
        push("box_area_positive", positive, 0.0, positive > 0.0);
        let ortho = dual.max_orthogonality_defect();
        push("orthogonality", ortho, IDENTITY_TOL, ortho <= IDENTITY_TOL);

        let fields: Vec<NodalField> = (0..samples).map(|_| random_interior_field(&mesh, &mut rng)).collect();
        let jump = fields
            .iter()
            .map(|v| jump_identity_residual(&mesh, &dual, v))
            .fold(0.0, f64::max);
        push("jump_identity", jump, IDENTITY_TOL, jump <= IDENTITY_TOL);

        let zero = NodalField::zeros(&mesh);
        let flux = assemble_flux_matrix_full(&mesh, &dual, &unit_k, &zero).expect("unit conductivity");
        let fem = fem_stiffness_oracle(&mesh);
        let mut fem_diff: f64 = 0.0;
        for r in 0..mesh.num_vertices() {
            for (c, v) in flux.row(r).chain(fem.row(r)) {
                fem_diff = fem_diff.max((flux.get(r, c) - fem.get(r, c)).abs());
                let _ = v;
            }
        }
        push("fem_equivalence", fem_diff, IDENTITY_TOL, fem_diff <= IDENTITY_TOL);

        // variable conductivity, frozen at a random state
        let state = random_interior_field(&mesh, &mut rng);
        let a = assemble_flux_matrix_full(&mesh, &dual, &var_k, &state)
            .expect("sigmoid conductivity")
            .restrict(dofs.vertices());
        let sym = a.symmetry_defect();
        push("flux_symmetry", sym, 1e-13, sym <= 1e-13);
        let mut min_rayleigh = f64::INFINITY;
        let mut min_coercivity = f64::INFINITY;
        let mut max_bound: f64 = 0.0;
        for pair in fields.chunks(2) {
            let x = dofs.restrict(pair[0].values());
            let xn = compute_norms(&mesh, &dual, &pair[0]);
            let xax = a.bilinear(&x, &x);
            min_rayleigh = min_rayleigh.min(xax / crate::linalg::dot(&x, &x));
            min_coercivity = min_coercivity.min(xax / xn.h1().powi(2));
            if let Some(second) = pair.get(1) {
                let y = dofs.restrict(second.values());
                let yn = compute_norms(&mesh, &dual, second);
                max_bound = max_bound.max(a.bilinear(&x, &y).abs() / (xn.h1() * yn.h1()));
            }
        }
        push("flux_positive_definite", min_rayleigh, 0.0, min_rayleigh > 0.0);
        report.coercivity.push((level, min_coercivity));
        bound_consts.push(max_bound.max(min_coercivity));

        for v in &fields {
            let n = compute_norms(&mesh, &dual, v);
            ratio_1h.push(n.norm_1h / n.h1_semi);
            ratio_0h.push(n.norm_0h / n.l2);
        }

        let smooth = lagrange_interpolate(&mesh, |p| (PI * p[0]).sin() * (PI * p[1]).sin());
        let n = compute_norms(&mesh, &dual, &smooth);
        interp_consts.push(box_interpolation_error(&mesh, &dual, &smooth) / (mesh.h() * n.h1()));
    }

    let mut push_band = |name: &'static str, values: &[f64]| {
        let b = band(values);
        report.checks.push(CheckResult {
            name,
            level: None,
            value: b,
            threshold: BAND_LIMIT,
            pass: b.is_finite() && b <= BAND_LIMIT,
        });
    };
    push_band("norm_equivalence_1h_band", &ratio_1h);
    push_band("norm_equivalence_0h_band", &ratio_0h);
    push_band("flux_boundedness_band", &bound_consts);
    push_band("box_interpolation_band", &interp_consts);
    Ok(report)
}
