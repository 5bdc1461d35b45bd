//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! FAIL. Oracles here are assembled independently of the library's dual-mesh
//! code path wherever the criterion compares against one.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use boxtherm::assembly::{assemble_flux_matrix, assemble_flux_matrix_full, assemble_nonlocal_source, SourceIntegral};
use boxtherm::error::HypothesisError;
use boxtherm::field::Dofs;
use boxtherm::operators::{error_against, flux_projection, l2_project, ProjectionBoundary};
use boxtherm::solver::{BoxScheme, SolverConfig};
use boxtherm::verification::{
    fit_rate, thread_cap, ConvergenceStudy, ManufacturedProblem, ReferenceStudy, RATE_THRESHOLD,
};
use boxtherm::{Coefficient, CoefficientModel, DualMesh, Mesh, NodalField, Point, QuadratureRule};
use nalgebra::{DMatrix, Matrix3, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

type Check = fn() -> Outcome;

const STANDARD_T_FINAL: f64 = 0.5;

fn sine(p: Point) -> f64 {
    (PI * p[0]).sin() * (PI * p[1]).sin()
}

fn sine_grad(p: Point) -> [f64; 2] {
    [PI * (PI * p[0]).cos() * (PI * p[1]).sin(), PI * (PI * p[0]).sin() * (PI * p[1]).cos()]
}

fn random_interior(mesh: &Mesh, rng: &mut ChaCha8Rng) -> NodalField {
    let mut f = NodalField::zeros(mesh);
    for v in mesh.interior_vertices() {
        f.values_mut()[v] = rng.gen_range(-1.0..1.0);
    }
    f
}

/// Gradients of the three barycentric functions from the inverse of the
/// affine map matrix.
fn barycentric_gradients(pts: [Point; 3]) -> [[f64; 2]; 3] {
    let m = Matrix3::new(
        1.0, pts[0][0], pts[0][1], //
        1.0, pts[1][0], pts[1][1], //
        1.0, pts[2][0], pts[2][1],
    );
    let c = m.try_inverse().expect("non-degenerate triangle");
    [0, 1, 2].map(|i| [c[(1, i)], c[(2, i)]])
}

/// Dense P1 stiffness over all vertices: ∫ ∇φ_i·∇φ_j elementwise.
fn dense_p1_stiffness(mesh: &Mesh) -> DMatrix<f64> {
    let n = mesh.num_vertices();
    let mut k = DMatrix::zeros(n, n);
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let pts = mesh.triangle_points(t);
        let area = 0.5
            * ((pts[1][0] - pts[0][0]) * (pts[2][1] - pts[0][1]) - (pts[2][0] - pts[0][0]) * (pts[1][1] - pts[0][1]));
        let g = barycentric_gradients(pts);
        for i in 0..3 {
            for j in 0..3 {
                k[(tri[i], tri[j])] += area * (g[i][0] * g[j][0] + g[i][1] * g[j][1]);
            }
        }
    }
    k
}

fn c1_partition() -> Outcome {
    let mut worst: f64 = 0.0;
    for level in 1..=6 {
        let mesh = Mesh::structured_level(level).unwrap();
        let dual = DualMesh::build(&mesh).unwrap();
        // the unit square, independently of the mesh's own bookkeeping
        worst = worst.max((dual.box_areas().iter().sum::<f64>() - 1.0).abs());
    }
    outcome(worst <= 1e-12, format!("max relative defect {worst:.2e} (tol 1e-12), levels 1-6"))
}

fn c2_jump_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for level in 1..=5 {
        let mesh = Mesh::structured_level(level).unwrap();
        let dual = DualMesh::build(&mesh).unwrap();
        for _ in 0..100 {
            let v = random_interior(&mesh, &mut rng);
            let vals = v.values();
            for s in dual.segments() {
                let (p, q) = (mesh.vertices()[s.p], mesh.vertices()[s.p_star]);
                let len = ((q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2)).sqrt();
                let n = [(q[0] - p[0]) / len, (q[1] - p[1]) / len];
                for piece in &s.pieces {
                    let tri = mesh.triangles()[piece.triangle];
                    let g = barycentric_gradients(mesh.triangle_points(piece.triangle));
                    let grad = (0..3).fold([0.0, 0.0], |acc, i| {
                        [acc[0] + vals[tri[i]] * g[i][0], acc[1] + vals[tri[i]] * g[i][1]]
                    });
                    let residual = vals[s.p_star] - vals[s.p] - (grad[0] * n[0] + grad[1] * n[1]) * s.l_db;
                    worst = worst.max(residual.abs());
                }
            }
        }
    }
    outcome(worst <= 1e-12, format!("max residual {worst:.2e} (tol 1e-12), 100 fields x levels 1-5"))
}

fn c3_fem_equivalence() -> Outcome {
    let unit = CoefficientModel::new(Coefficient::Const(1.0), Coefficient::Const(1.0), 1.0).unwrap();
    let mut worst: f64 = 0.0;
    for level in 1..=5 {
        let mesh = Mesh::structured_level(level).unwrap();
        let dual = DualMesh::build(&mesh).unwrap();
        let zero = NodalField::zeros(&mesh);
        let oracle = dense_p1_stiffness(&mesh);
        let full = assemble_flux_matrix_full(&mesh, &dual, &unit, &zero).unwrap();
        let reduced = assemble_flux_matrix(&mesh, &dual, &unit, &zero).unwrap();
        let dofs = Dofs::new(&mesh);
        let n = mesh.num_vertices();
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((full.get(i, j) - oracle[(i, j)]).abs());
            }
        }
        for (a, &i) in dofs.vertices().iter().enumerate() {
            for (b, &j) in dofs.vertices().iter().enumerate() {
                worst = worst.max((reduced.get(a, b) - oracle[(i, j)]).abs());
            }
        }
    }
    outcome(worst <= 1e-12, format!("max entry difference {worst:.2e} (tol 1e-12), levels 1-5"))
}

fn c4_spd() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let models = [
        CoefficientModel::new(Coefficient::Const(1.0), Coefficient::Const(1.0), 1.0).unwrap(),
        CoefficientModel::new(Coefficient::Sigmoid { lo: 0.5, hi: 2.0 }, Coefficient::Const(1.0), 1.0).unwrap(),
    ];
    let mut min_eig = f64::INFINITY;
    let mut min_quotient = f64::INFINITY;
    for model in &models {
        for level in 1..=5 {
            let mesh = Mesh::structured_level(level).unwrap();
            let dual = DualMesh::build(&mesh).unwrap();
            let state = random_interior(&mesh, &mut rng).values().iter().map(|v| 3.0 * v).collect();
            let state = NodalField::new(&mesh, state).unwrap();
            let a = assemble_flux_matrix(&mesh, &dual, model, &state).unwrap();
            if level <= 3 {
                let n = a.dim();
                let dense = DMatrix::from_fn(n, n, |i, j| a.get(i, j));
                min_eig = min_eig.min(SymmetricEigen::new(dense).eigenvalues.min());
            } else {
                for _ in 0..1000 {
                    let x: Vec<f64> = (0..a.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    let xx: f64 = x.iter().map(|v| v * v).sum();
                    min_quotient = min_quotient.min(a.bilinear(&x, &x) / xx);
                }
            }
        }
    }
    outcome(
        min_eig > 0.0 && min_quotient > 0.0,
        format!("min eigenvalue (levels 1-3) {min_eig:.3e}; min xAx/xx over 1000 x (levels 4-5) {min_quotient:.3e}"),
    )
}

fn c5_projections() -> Outcome {
    let (mut h, mut e_p, mut e_q) = (Vec::new(), Vec::new(), Vec::new());
    for level in 2..=5 {
        let mesh = Mesh::structured_level(level).unwrap();
        let dual = DualMesh::build(&mesh).unwrap();
        let p = l2_project(&mesh, sine, QuadratureRule::Degree5, ProjectionBoundary::Free).unwrap();
        let q = flux_projection(&mesh, &dual, |_| 1.0, sine, sine_grad, 4).unwrap();
        h.push(mesh.h());
        e_p.push(error_against(&mesh, &p, sine, sine_grad, QuadratureRule::Degree5).l2);
        e_q.push(error_against(&mesh, &q, sine, sine_grad, QuadratureRule::Degree5).h1());
    }
    let (rp, rq) = (fit_rate(&h, &e_p), fit_rate(&h, &e_q));
    outcome(
        (rp - 2.0).abs() <= 0.2 && rq >= RATE_THRESHOLD,
        format!("rate ||u-P_h u|| = {rp:.3} (want 2 +- 0.2); rate ||u-Q_h u||_1 = {rq:.3} (want >= 0.9)"),
    )
}

fn standard_study(k: Coefficient) -> ConvergenceStudy {
    ConvergenceStudy {
        problem: ManufacturedProblem::standard(k, 1.0).unwrap(),
        levels: vec![2, 3, 4, 5],
        tau_factor: 0.1,
        config: SolverConfig {
            t_final: STANDARD_T_FINAL,
            ..SolverConfig::default()
        },
        threads: thread_cap(),
    }
}

fn c6_linf_h1_rate() -> Outcome {
    match standard_study(Coefficient::Const(1.0)).run() {
        Ok(r) => outcome(
            r.rates[2] >= RATE_THRESHOLD,
            format!("k = 1: L_inf(H1) rate {:.3} (want >= 0.9)", r.rates[2]),
        ),
        Err(e) => outcome(false, format!("study failed: {e}")),
    }
}

fn c7_variable_k_rates() -> Outcome {
    match standard_study(Coefficient::Sigmoid { lo: 0.5, hi: 2.0 }).run() {
        Ok(r) => outcome(
            r.rates[0] >= RATE_THRESHOLD && r.rates[1] >= RATE_THRESHOLD,
            format!(
                "sigmoid k: L_inf(L2) rate {:.3}, L2(H1) rate {:.3} (want >= 0.9); L_inf(H1) rate {:.3}",
                r.rates[0], r.rates[1], r.rates[2]
            ),
        ),
        Err(e) => outcome(false, format!("study failed: {e}")),
    }
}

fn c8_picard() -> Outcome {
    let config = SolverConfig {
        tau: 0.01,
        t_final: STANDARD_T_FINAL,
        ..SolverConfig::default()
    };
    let mesh = Mesh::structured_level(4).unwrap();
    let problem = ManufacturedProblem::standard(Coefficient::Const(1.0), 1.0).unwrap();
    let scheme = BoxScheme::new(mesh.clone(), problem.coefficients.clone(), config.clone()).unwrap();
    let g = problem.forcing.clone().unwrap();
    let traj = scheme.solve_transient(|p| (problem.exact)(p, 0.0), Some(g.as_ref())).unwrap();
    let steps = &traj.steps;
    let max_iters = steps.iter().map(|s| s.picard_iterations).max().unwrap_or(0);
    let contracting = steps.iter().filter(|s| s.contraction_ratio.is_some_and(|r| r < 1.0)).count();
    let fraction = contracting as f64 / steps.len() as f64;
    let worst_ratio = steps.iter().filter_map(|s| s.contraction_ratio).fold(0.0, f64::max);

    let linear = CoefficientModel::new(Coefficient::Const(1.0), Coefficient::Const(1.0), 1.0).unwrap();
    let scheme = BoxScheme::new(mesh, linear, config).unwrap();
    let lin = scheme.solve_transient(sine, None).unwrap();
    let linear_once = lin.steps.iter().all(|s| s.picard_iterations == 1);
    outcome(
        max_iters <= 10 && fraction >= 0.95 && linear_once,
        format!(
            "{} steps: max iterations {max_iters} (<= 10), ratio < 1 on {:.1}% (>= 95%), worst ratio {worst_ratio:.3e}; \
             constant coefficients single-iteration: {linear_once}",
            steps.len(),
            100.0 * fraction
        ),
    )
}

fn c9_hypotheses() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;

    // every assembly of a run sits above ν·|Ω|
    let problem = ManufacturedProblem::standard(Coefficient::Sigmoid { lo: 0.5, hi: 2.0 }, 1.0).unwrap();
    let mesh = Mesh::structured_level(3).unwrap();
    let bound = problem.coefficients.nu() * mesh.domain_area();
    let config = SolverConfig {
        tau: 0.02,
        t_final: 0.2,
        ..SolverConfig::default()
    };
    let scheme = BoxScheme::new(mesh.clone(), problem.coefficients.clone(), config).unwrap();
    let g = problem.forcing.clone().unwrap();
    let traj = scheme.solve_transient(|p| (problem.exact)(p, 0.0), Some(g.as_ref())).unwrap();
    let min_integral = traj.steps.iter().map(|s| s.min_source_integral).fold(f64::INFINITY, f64::min);
    pass &= min_integral >= bound;
    notes.push(format!("min integral {min_integral:.4} >= {bound}"));

    // the assembly-time guard fires when the floor is breached
    let treacherous = Coefficient::Custom {
        name: "dips-far-out".into(),
        func: Arc::new(|x: f64| if x.abs() > 1e4 { 0.01 } else { 1.0 }),
        lo: 1.0,
        hi: 1.0,
        growth: (0.0, 1.0),
        lipschitz: 0.0,
    };
    let model = CoefficientModel::new(Coefficient::Const(1.0), treacherous, 1.0).unwrap();
    let dual = DualMesh::build(&mesh).unwrap();
    let mut hot = NodalField::zeros(&mesh);
    for v in mesh.interior_vertices() {
        hot.values_mut()[v] = 1e5;
    }
    let guard = assemble_nonlocal_source(&mesh, &dual, &hot, &model, SourceIntegral::Lumped);
    let fired = matches!(guard, Err(HypothesisError::SourceIntegral { .. }));
    pass &= fired;
    notes.push(format!("assembly guard fired: {fired}"));

    // presets violating the source bounds never reach a solver
    let zero_floor = CoefficientModel::new(Coefficient::Const(1.0), Coefficient::Const(0.0), 1.0);
    let superlinear = CoefficientModel::new(
        Coefficient::Const(1.0),
        Coefficient::Custom {
            name: "quadratic".into(),
            func: Arc::new(|x: f64| 1.0 + x * x),
            lo: 1.0,
            hi: f64::INFINITY,
            growth: (1.0, 1.0),
            lipschitz: 1.0,
        },
        1.0,
    );
    let rejected = zero_floor.is_err() && superlinear.is_err();
    pass &= rejected;
    notes.push(format!("violating presets rejected: {rejected}"));
    outcome(pass, notes.join("; "))
}

/// Center value of the solution of −Δw = 1 on the unit square with zero
/// boundary values, from its double sine series.
fn poisson_center_value() -> f64 {
    let mut sum = 0.0;
    for m in (1..4000).step_by(2) {
        for n in (1..4000).step_by(2) {
            let sign = if ((m + n) / 2 - 1) % 2 == 0 { 1.0 } else { -1.0 };
            let (m, n) = (m as f64, n as f64);
            sum += sign / (m * n * (m * m + n * n));
        }
    }
    16.0 / PI.powi(4) * sum
}

fn c10_reference_study() -> Outcome {
    let coefficients = CoefficientModel::new(Coefficient::Const(1.0), Coefficient::Const(1.0), 1.0).unwrap();
    let study = ReferenceStudy {
        coefficients: coefficients.clone(),
        initial: Arc::new(sine),
        levels: vec![2, 3, 4, 5],
        reference_level: 7,
        config: SolverConfig {
            tau: 0.01,
            t_final: 0.2,
            ..SolverConfig::default()
        },
        threads: thread_cap(),
    };
    let report = match study.run() {
        Ok(o) => o.report,
        Err(e) => return outcome(false, format!("study failed: {e}")),
    };
    let mesh = Mesh::structured_level(5).unwrap();
    let center = mesh
        .vertices()
        .iter()
        .position(|p| (p[0] - 0.5).abs() < 1e-12 && (p[1] - 0.5).abs() < 1e-12)
        .unwrap();
    let scheme = BoxScheme::new(mesh, coefficients, SolverConfig::default()).unwrap();
    let steady = scheme.steady_state().unwrap().values()[center];
    let oracle = poisson_center_value();
    let rel = (steady - oracle).abs() / oracle;
    outcome(
        report.rates[0] >= RATE_THRESHOLD && rel <= 0.01,
        format!(
            "L_inf(L2) rate vs level 7 {:.3} (want >= 0.9); steady center {steady:.6} vs series {oracle:.6} ({:.3}% off, want <= 1%)",
            report.rates[0],
            100.0 * rel
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, Check, Duration); 10] = [
        ("dual-mesh partition", c1_partition, Duration::from_secs(1)),
        ("jump identity", c2_jump_identity, Duration::from_secs(5)),
        ("FEM equivalence", c3_fem_equivalence, Duration::from_secs(5)),
        ("coercivity / SPD", c4_spd, Duration::from_secs(10)),
        ("projection estimates", c5_projections, Duration::from_secs(30)),
        ("L_inf(H1) rate, k = 1", c6_linf_h1_rate, Duration::from_secs(300)),
        ("L_inf(L2) + L2(H1) rates, sigmoid k", c7_variable_k_rates, Duration::from_secs(300)),
        ("Picard contraction", c8_picard, Duration::from_secs(60)),
        ("hypothesis enforcement", c9_hypotheses, Duration::from_secs(1)),
        ("unforced reference study", c10_reference_study, Duration::from_secs(600)),
    ];
    let mut failures = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let in_time = elapsed <= *budget;
        let pass = result.pass && in_time;
        if !pass {
            failures += 1;
        }
        println!(
            "criterion {:>2} {:<38} {}  {} [{:.2}s / {}s budget]",
            i + 1,
            name,
            if pass { "PASS" } else { "FAIL" },
            result.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
