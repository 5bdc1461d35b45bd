//! Backward-Euler time stepping of the box scheme.
//!
//! One Picard map `G` evaluation solves the linear problem with `k` and the
//! nonlocal source frozen at the current iterate:
//!
//! ```text
//! (D/τ + A(w_m)) w_{m+1} = (D/τ) u_prev + b(w_m) + g
//! ```
//!
//! where `D` is the lumped (box-area) mass, `A` the flux matrix and `b` the
//! nonlocal source. Iteration stops once `‖w_{m+1} − w_m‖_{0,h}` drops below
//! the Picard tolerance. If it does not, the step is retried with a smaller
//! `τ`, since the fixed point is only guaranteed for short times.

use std::sync::Arc;

use crate::assembly::{assemble_flux_matrix, assemble_nonlocal_source, SourceIntegral};
use crate::coefficients::CoefficientModel;
use crate::dual::DualMesh;
use crate::error::SolverError;
use crate::field::{Dofs, NodalField, QuadratureRule};
use crate::linalg::{cg_solve, norm2, Shifted};
use crate::mesh::{Mesh, Point};
use crate::operators::{l2_project, ProjectionBoundary};

/// Manufactured forcing `g(x, t)`, added to the right-hand side.
pub type Forcing = Arc<dyn Fn(Point, f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub tau: f64,
    pub t_final: f64,
    /// Stop when ‖w_{m+1} − w_m‖_{0,h} ≤ picard_tol.
    pub picard_tol: f64,
    pub picard_max_iters: usize,
    /// Relative residual target of each linear solve.
    pub cg_tol: f64,
    pub cg_max_iters: usize,
    /// Factor in (0, 1) applied to τ after a failed step.
    pub tau_backoff: f64,
    pub max_backoffs: usize,
    /// Keep every `snapshot_stride`-th step (the final state is always kept).
    pub snapshot_stride: usize,
    pub source_integral: SourceIntegral,
    /// Quadrature for the initial L² projection.
    pub projection_rule: QuadratureRule,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tau: 0.01,
            t_final: 0.1,
            picard_tol: 1e-10,
            picard_max_iters: 50,
            cg_tol: 1e-12,
            cg_max_iters: 20_000,
            tau_backoff: 0.5,
            max_backoffs: 8,
            snapshot_stride: 1,
            source_integral: SourceIntegral::Lumped,
            projection_rule: QuadratureRule::Degree5,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |m: &str| Err(SolverError::Config(m.to_string()));
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return bad("tau must be positive");
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return bad("t_final must be non-negative");
        }
        if !(self.picard_tol > 0.0) || !(self.cg_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        if !(self.tau_backoff > 0.0 && self.tau_backoff < 1.0) {
            return bad("tau_backoff must lie in (0, 1)");
        }
        if self.picard_max_iters == 0 || self.cg_max_iters == 0 {
            return bad("iteration caps must be positive");
        }
        if self.snapshot_stride == 0 {
            return bad("snapshot_stride must be positive");
        }
        Ok(())
    }
}

/// Result of one evaluation of the Picard map.
#[derive(Debug, Clone)]
pub struct PicardOutcome {
    pub field: NodalField,
    pub cg_iterations: usize,
    /// ∫f(u_iter) used in the frozen source.
    pub source_integral: f64,
    /// Euclidean norm of the frozen source vector.
    pub source_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepDiagnostics {
    /// Time at the end of the step.
    pub time: f64,
    /// Accepted step size.
    pub tau: f64,
    /// Index `m` of the first iterate found to be a fixed point.
    pub picard_iterations: usize,
    /// Evaluations of the Picard map in the accepted attempt.
    pub map_evaluations: usize,
    pub cg_iterations: usize,
    /// Largest ‖δ_{m+1}‖/‖δ_m‖ over the accepted attempt, when defined.
    pub contraction_ratio: Option<f64>,
    /// Successive Picard updates ‖w_{m+1} − w_m‖_{0,h}.
    pub updates: Vec<f64>,
    /// Smallest ∫f seen in any assembly of this step (all attempts).
    pub min_source_integral: f64,
    pub source_integral: f64,
    pub source_norm: f64,
    pub backoffs: usize,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub fields: Vec<NodalField>,
    /// Time covered by each snapshot; the first entry is the nominal τ
    /// (capped at the final time).
    pub step_sizes: Vec<f64>,
    pub steps: Vec<StepDiagnostics>,
}

impl Trajectory {
    pub fn final_field(&self) -> &NodalField {
        self.fields.last().expect("trajectory has an initial snapshot")
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Box scheme on a fixed mesh with fixed coefficients.
#[derive(Clone)]
pub struct BoxScheme {
    mesh: Mesh,
    dual: DualMesh,
    coeff: CoefficientModel,
    dofs: Dofs,
    lumped: Vec<f64>,
    pub config: SolverConfig,
}

enum AttemptError {
    Diverged { last_update: f64 },
    Fatal(SolverError),
}

impl BoxScheme {
    pub fn new(mesh: Mesh, coeff: CoefficientModel, config: SolverConfig) -> Result<Self, crate::Error> {
        let dual = DualMesh::build(&mesh)?;
        Self::with_dual(mesh, dual, coeff, config).map_err(Into::into)
    }

    pub fn with_dual(mesh: Mesh, dual: DualMesh, coeff: CoefficientModel, config: SolverConfig) -> Result<Self, SolverError> {
        config.validate()?;
        let dofs = Dofs::new(&mesh);
        let lumped = dofs.vertices().iter().map(|&v| dual.box_area(v)).collect();
        Ok(BoxScheme {
            mesh,
            dual,
            coeff,
            dofs,
            lumped,
            config,
        })
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn dual(&self) -> &DualMesh {
        &self.dual
    }

    pub fn coefficients(&self) -> &CoefficientModel {
        &self.coeff
    }

    pub fn dofs(&self) -> &Dofs {
        &self.dofs
    }

    /// ‖I_h v‖ over all vertices.
    pub fn lumped_norm(&self, v: &[f64]) -> f64 {
        v.iter()
            .zip(self.dual.box_areas())
            .map(|(x, a)| a * x * x)
            .sum::<f64>()
            .sqrt()
    }

    /// Lumped load `g(p, t) |b_p|` at interior vertices.
    pub fn forcing_load(&self, forcing: &dyn Fn(Point, f64) -> f64, t: f64) -> NodalField {
        let mut load = NodalField::zeros(&self.mesh);
        for &v in self.dofs.vertices() {
            load.values_mut()[v] = forcing(self.mesh.vertices()[v], t) * self.dual.box_area(v);
        }
        load
    }

    /// Initial state `P_h u₀`, projected onto the fields vanishing on the boundary.
    pub fn initial_state(&self, u0: impl Fn(Point) -> f64) -> Result<NodalField, SolverError> {
        l2_project(&self.mesh, u0, self.config.projection_rule, ProjectionBoundary::Zero)
    }

    /// One evaluation of the Picard map with step `tau`. `extra_load` is an
    /// already-integrated load vector (e.g. from [`Self::forcing_load`]).
    pub fn picard_step(
        &self,
        u_prev: &NodalField,
        u_iter: &NodalField,
        tau: f64,
        extra_load: Option<&NodalField>,
    ) -> Result<PicardOutcome, SolverError> {
        u_prev.ensure_bound(&self.mesh)?;
        u_iter.ensure_bound(&self.mesh)?;
        let a = assemble_flux_matrix(&self.mesh, &self.dual, &self.coeff, u_iter)?;
        let (source, integral) =
            assemble_nonlocal_source(&self.mesh, &self.dual, u_iter, &self.coeff, self.config.source_integral)?;
        let shift: Vec<f64> = self.lumped.iter().map(|d| d / tau).collect();
        let prev = self.dofs.restrict(u_prev.values());
        let src = self.dofs.restrict(source.values());
        let mut rhs: Vec<f64> = shift.iter().zip(&prev).zip(&src).map(|((s, u), b)| s * u + b).collect();
        if let Some(load) = extra_load {
            for (r, g) in rhs.iter_mut().zip(self.dofs.restrict(load.values())) {
                *r += g;
            }
        }
        let op = Shifted {
            shift: &shift,
            operator: &a,
        };
        let guess = self.dofs.restrict(u_iter.values());
        let out = cg_solve(&op, &rhs, Some(&guess), self.config.cg_tol, self.config.cg_max_iters)?;
        let field = NodalField::new(&self.mesh, self.dofs.extend(&out.solution, self.mesh.num_vertices()))?;
        Ok(PicardOutcome {
            field,
            cg_iterations: out.iterations,
            source_integral: integral,
            source_norm: norm2(&src),
        })
    }

    /// Residual of the nonlinear step equation at `w`, in the Euclidean norm
    /// of the interior equations.
    pub fn step_residual(
        &self,
        u_prev: &NodalField,
        w: &NodalField,
        tau: f64,
        extra_load: Option<&NodalField>,
    ) -> Result<f64, SolverError> {
        let a = assemble_flux_matrix(&self.mesh, &self.dual, &self.coeff, w)?;
        let (source, _) = assemble_nonlocal_source(&self.mesh, &self.dual, w, &self.coeff, self.config.source_integral)?;
        let wi = self.dofs.restrict(w.values());
        let aw = a.mul_vec(&wi);
        let prev = self.dofs.restrict(u_prev.values());
        let src = self.dofs.restrict(source.values());
        let load = extra_load.map(|l| self.dofs.restrict(l.values()));
        let r: Vec<f64> = (0..wi.len())
            .map(|i| {
                let g = load.as_ref().map_or(0.0, |l| l[i]);
                self.lumped[i] / tau * (wi[i] - prev[i]) + aw[i] - src[i] - g
            })
            .collect();
        Ok(norm2(&r))
    }

    fn attempt(
        &self,
        u_prev: &NodalField,
        tau: f64,
        load: Option<&NodalField>,
        min_integral: &mut f64,
    ) -> Result<(NodalField, StepDiagnostics), AttemptError> {
        let mut w = u_prev.clone();
        let mut updates = Vec::new();
        let mut cg_iterations = 0;
        for m in 0..=self.config.picard_max_iters {
            let out = match self.picard_step(u_prev, &w, tau, load) {
                Ok(out) => out,
                Err(SolverError::CgNotConverged { .. }) => {
                    return Err(AttemptError::Diverged {
                        last_update: updates.last().copied().unwrap_or(f64::NAN),
                    })
                }
                Err(e) => return Err(AttemptError::Fatal(e)),
            };
            cg_iterations += out.cg_iterations;
            *min_integral = min_integral.min(out.source_integral);
            let delta = self.lumped_norm(&out.field.sub(&w).into_values());
            updates.push(delta);
            w = out.field;
            if !delta.is_finite() {
                break;
            }
            if delta <= self.config.picard_tol {
                let contraction_ratio = updates
                    .windows(2)
                    .filter(|p| p[0] > 0.0)
                    .map(|p| p[1] / p[0])
                    .fold(None, |acc: Option<f64>, r| Some(acc.map_or(r, |a| a.max(r))));
                return Ok((
                    w,
                    StepDiagnostics {
                        time: 0.0,
                        tau,
                        picard_iterations: m,
                        map_evaluations: m + 1,
                        cg_iterations,
                        contraction_ratio,
                        updates,
                        min_source_integral: *min_integral,
                        source_integral: out.source_integral,
                        source_norm: out.source_norm,
                        backoffs: 0,
                    },
                ));
            }
        }
        Err(AttemptError::Diverged {
            last_update: updates.last().copied().unwrap_or(f64::NAN),
        })
    }

    /// Advances one step from time `t`, reducing τ on Picard failure.
    pub fn advance(
        &self,
        u_prev: &NodalField,
        t: f64,
        tau: f64,
        forcing: Option<&dyn Fn(Point, f64) -> f64>,
    ) -> Result<(NodalField, StepDiagnostics), SolverError> {
        let mut tau_try = tau;
        let mut min_integral = f64::INFINITY;
        let mut last_update = f64::NAN;
        for backoffs in 0..=self.config.max_backoffs {
            let load = forcing.map(|g| self.forcing_load(g, t + tau_try));
            match self.attempt(u_prev, tau_try, load.as_ref(), &mut min_integral) {
                Ok((w, mut diag)) => {
                    diag.time = t + tau_try;
                    diag.backoffs = backoffs;
                    diag.min_source_integral = min_integral;
                    return Ok((w, diag));
                }
                Err(AttemptError::Fatal(e)) => return Err(e),
                Err(AttemptError::Diverged { last_update: u }) => {
                    last_update = u;
                    if backoffs < self.config.max_backoffs {
                        tau_try *= self.config.tau_backoff;
                    }
                }
            }
        }
        Err(SolverError::PicardNotConverged {
            time: t,
            tau: tau_try,
            backoffs: self.config.max_backoffs,
            last_update,
        })
    }

    /// Runs from `P_h u₀` at t = 0 to `t_final`.
    ///
    /// After a step-size reduction the reduced τ is kept for the rest of
    /// the run.
    pub fn solve_transient(
        &self,
        u0: impl Fn(Point) -> f64,
        forcing: Option<&dyn Fn(Point, f64) -> f64>,
    ) -> Result<Trajectory, SolverError> {
        let cfg = &self.config;
        let mut u = self.initial_state(u0)?;
        let mut traj = Trajectory {
            times: vec![0.0],
            fields: vec![u.clone()],
            step_sizes: vec![if cfg.t_final > 0.0 { cfg.tau.min(cfg.t_final) } else { cfg.tau }],
            steps: Vec::new(),
        };
        let mut t = 0.0;
        let mut tau = cfg.tau;
        let mut since_snapshot = 0.0;
        let end = cfg.t_final * (1.0 - 1e-12);
        let mut step = 0usize;
        while t < end {
            let dt = tau.min(cfg.t_final - t);
            let (w, diag) = self.advance(&u, t, dt, forcing)?;
            if diag.backoffs > 0 {
                tau = diag.tau;
            }
            t = if (diag.time - cfg.t_final).abs() <= 1e-12 * cfg.t_final.max(1.0) {
                cfg.t_final
            } else {
                diag.time
            };
            since_snapshot += diag.tau;
            step += 1;
            u = w;
            traj.steps.push(diag);
            if step.is_multiple_of(cfg.snapshot_stride) || t >= end {
                traj.times.push(t);
                traj.fields.push(u.clone());
                traj.step_sizes.push(since_snapshot);
                since_snapshot = 0.0;
            }
        }
        Ok(traj)
    }

    /// Steady state `A(u) u = b(u)` by Picard iteration from zero.
    pub fn steady_state(&self) -> Result<NodalField, SolverError> {
        let mut w = NodalField::zeros(&self.mesh);
        for _ in 0..=self.config.picard_max_iters {
            let a = assemble_flux_matrix(&self.mesh, &self.dual, &self.coeff, &w)?;
            let (source, _) =
                assemble_nonlocal_source(&self.mesh, &self.dual, &w, &self.coeff, self.config.source_integral)?;
            let rhs = self.dofs.restrict(source.values());
            let guess = self.dofs.restrict(w.values());
            let x = cg_solve(&a, &rhs, Some(&guess), self.config.cg_tol, self.config.cg_max_iters)?.solution;
            let next = NodalField::new(&self.mesh, self.dofs.extend(&x, self.mesh.num_vertices()))?;
            let delta = self.lumped_norm(&next.sub(&w).into_values());
            w = next;
            if delta <= self.config.picard_tol {
                return Ok(w);
            }
        }
        Err(SolverError::PicardNotConverged {
            time: f64::INFINITY,
            tau: f64::INFINITY,
            backoffs: 0,
            last_update: f64::NAN,
        })
    }
}
