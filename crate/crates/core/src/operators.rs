//! Interpolation and projection onto the piecewise-linear space, and the
//! continuous and mesh-dependent norms.

use crate::assembly::{assemble_consistent_mass, assemble_segment_laplacian};
use crate::dual::DualMesh;
use crate::error::{HypothesisError, SolverError};
use crate::field::{bary_to_point, Dofs, NodalField, QuadratureRule};
use crate::linalg::{cg_solve, SparseOperator};
use crate::mesh::{signed_area, Mesh, Point};

/// Tolerance and iteration cap for the projection solves.
const PROJECTION_CG_TOL: f64 = 1e-14;

fn projection_iters(n: usize) -> usize {
    10 * n + 100
}

/// Nodal interpolation `i_h u`.
pub fn lagrange_interpolate(mesh: &Mesh, u: impl Fn(Point) -> f64) -> NodalField {
    NodalField::from_fn(mesh, u)
}

/// Boundary treatment for [`l2_project`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectionBoundary {
    /// Project onto the full piecewise-linear space.
    Free,
    /// Project onto the subspace vanishing on the boundary.
    Zero,
}

/// `b_i = ∫ u φ_i` by the given quadrature rule, over all vertices.
pub fn load_vector(mesh: &Mesh, u: impl Fn(Point) -> f64, rule: QuadratureRule) -> Vec<f64> {
    let points = rule.points();
    let mut b = vec![0.0; mesh.num_vertices()];
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let pts = mesh.triangle_points(t);
        let area = mesh.triangle_area(t);
        for &(bary, w) in &points {
            let val = u(bary_to_point(pts, bary)) * w * area;
            for i in 0..3 {
                b[tri[i]] += val * bary[i];
            }
        }
    }
    b
}

/// L² projection `P_h u` via the consistent mass matrix.
pub fn l2_project(
    mesh: &Mesh,
    u: impl Fn(Point) -> f64,
    rule: QuadratureRule,
    boundary: ProjectionBoundary,
) -> Result<NodalField, SolverError> {
    let mass = assemble_consistent_mass(mesh);
    let b = load_vector(mesh, u, rule);
    let values = match boundary {
        ProjectionBoundary::Free => {
            cg_solve(&mass, &b, None, PROJECTION_CG_TOL, projection_iters(b.len()))?.solution
        }
        ProjectionBoundary::Zero => {
            let dofs = Dofs::new(mesh);
            let m = mass.restrict(dofs.vertices());
            let rhs = dofs.restrict(&b);
            let x = cg_solve(&m, &rhs, None, PROJECTION_CG_TOL, projection_iters(rhs.len()))?.solution;
            dofs.extend(&x, mesh.num_vertices())
        }
    };
    NodalField::new(mesh, values)
}

/// Flux projection `Q_h u`: equals `i_h u` on the boundary, and its
/// `a`-weighted fluxes through every interior box boundary match those of `u`.
///
/// Both the exact fluxes and the `a` weights use composite midpoint
/// quadrature with `points_per_piece` points on every dual piece.
pub fn flux_projection(
    mesh: &Mesh,
    dual: &DualMesh,
    a: impl Fn(Point) -> f64,
    u: impl Fn(Point) -> f64,
    grad_u: impl Fn(Point) -> [f64; 2],
    points_per_piece: usize,
) -> Result<NodalField, SolverError> {
    let nq = points_per_piece.max(1);
    let nv = mesh.num_vertices();
    let mut flux_out = vec![0.0; nv];
    let operator = assemble_segment_laplacian(mesh, dual, |s| {
        let mut a_integral = 0.0;
        let mut flux = 0.0;
        for piece in &s.pieces {
            let ds = piece.length / nq as f64;
            for j in 0..nq {
                let t = (j as f64 + 0.5) / nq as f64;
                let x = [
                    piece.circumcenter[0] + t * (piece.midpoint[0] - piece.circumcenter[0]),
                    piece.circumcenter[1] + t * (piece.midpoint[1] - piece.circumcenter[1]),
                ];
                let ax = a(x);
                if !(ax > 0.0) {
                    return Err(HypothesisError::NonPositiveConductivity {
                        p: s.p,
                        q: s.p_star,
                        value: ax,
                    });
                }
                let g = grad_u(x);
                a_integral += ax * ds;
                flux += ax * (g[0] * s.unit_normal[0] + g[1] * s.unit_normal[1]) * ds;
            }
        }
        // outward flux of box p is +flux, of box p* is −flux
        flux_out[s.p] += flux;
        flux_out[s.p_star] -= flux;
        Ok(a_integral / s.l_db)
    })?;

    let interp = lagrange_interpolate(mesh, u);
    let dofs = Dofs::new(mesh);
    let a_interp = operator.mul_vec(interp.values());
    // −∫_{∂b_p} a ∂(Q_h u)/∂n = (A Q_h u)_p must equal −∫_{∂b_p} a ∂u/∂n
    let rhs: Vec<f64> = dofs.vertices().iter().map(|&p| -flux_out[p] - a_interp[p]).collect();
    let reduced = operator.restrict(dofs.vertices());
    let correction = cg_solve(&reduced, &rhs, None, PROJECTION_CG_TOL, projection_iters(rhs.len()))?.solution;
    let mut values = interp.into_values();
    for (&v, c) in dofs.vertices().iter().zip(correction) {
        values[v] += c;
    }
    NodalField::new(mesh, values)
}

/// Continuous and mesh-dependent norms of a piecewise-linear field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormBundle {
    /// ‖v‖ in L².
    pub l2: f64,
    /// ‖∇v‖ in L².
    pub h1_semi: f64,
    /// ‖I_h v‖, box-lumped.
    pub norm_0h: f64,
    /// Square root of the summed squared jumps of `I_h v` over the dual interfaces.
    pub norm_1h: f64,
}

impl NormBundle {
    /// Full H¹ norm.
    pub fn h1(&self) -> f64 {
        self.l2.hypot(self.h1_semi)
    }
}

/// `∫_T v²` for `v` linear with corner values `a, b, c`.
pub(crate) fn linear_square_integral(area: f64, a: f64, b: f64, c: f64) -> f64 {
    area / 6.0 * (a * a + b * b + c * c + a * b + b * c + c * a)
}

/// Norms by exact elementwise integration.
///
/// `norm_1h` sums each interior edge's interface once and skips interfaces
/// of zero length, which are not part of any box boundary.
pub fn compute_norms(mesh: &Mesh, dual: &DualMesh, v: &NodalField) -> NormBundle {
    let vals = v.values();
    let mut l2 = 0.0;
    let mut semi = 0.0;
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let area = mesh.triangle_area(t);
        l2 += linear_square_integral(area, vals[tri[0]], vals[tri[1]], vals[tri[2]]);
        let g = v.gradient_in(mesh, t);
        semi += area * (g[0] * g[0] + g[1] * g[1]);
    }
    let norm_0h: f64 = dual
        .box_areas()
        .iter()
        .zip(vals)
        .map(|(a, x)| a * x * x)
        .sum::<f64>()
        .sqrt();
    let norm_1h: f64 = dual
        .segments()
        .iter()
        .filter(|s| !s.on_boundary && s.total_length() > 1e-14 * s.l_db)
        .map(|s| (vals[s.p_star] - vals[s.p]).powi(2))
        .sum::<f64>()
        .sqrt();
    NormBundle {
        l2: l2.sqrt(),
        h1_semi: semi.sqrt(),
        norm_0h,
        norm_1h,
    }
}

/// L² and H¹-seminorm of `v − u` for a smooth `u`, by elementwise quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorNorms {
    pub l2: f64,
    pub h1_semi: f64,
}

impl ErrorNorms {
    pub fn h1(&self) -> f64 {
        self.l2.hypot(self.h1_semi)
    }
}

pub fn error_against(
    mesh: &Mesh,
    v: &NodalField,
    u: impl Fn(Point) -> f64,
    grad_u: impl Fn(Point) -> [f64; 2],
    rule: QuadratureRule,
) -> ErrorNorms {
    let points = rule.points();
    let mut l2 = 0.0;
    let mut semi = 0.0;
    for t in 0..mesh.num_triangles() {
        let pts = mesh.triangle_points(t);
        let area = mesh.triangle_area(t);
        let g = v.gradient_in(mesh, t);
        for &(bary, w) in &points {
            let x = bary_to_point(pts, bary);
            let e = v.eval_in(mesh, t, bary) - u(x);
            let gu = grad_u(x);
            l2 += w * area * e * e;
            semi += w * area * ((g[0] - gu[0]).powi(2) + (g[1] - gu[1]).powi(2));
        }
    }
    ErrorNorms {
        l2: l2.sqrt(),
        h1_semi: semi.sqrt(),
    }
}

/// `max(‖v‖_∞, ‖∇v‖_∞)` for a piecewise-linear field.
pub fn w1_inf_norm(mesh: &Mesh, v: &NodalField) -> f64 {
    let vmax = v.values().iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let gmax = (0..mesh.num_triangles()).fold(0.0f64, |m, t| {
        let g = v.gradient_in(mesh, t);
        m.max(g[0].hypot(g[1]))
    });
    vmax.max(gmax)
}

/// ‖v − I_h v‖ for piecewise-linear `v`, integrated exactly over the
/// sub-triangles `(p, m, q)` of every box.
pub fn box_interpolation_error(mesh: &Mesh, dual: &DualMesh, v: &NodalField) -> f64 {
    let mut total = 0.0;
    for t in 0..mesh.num_triangles() {
        let pts = mesh.triangle_points(t);
        let q = dual.circumcenters()[t];
        let g = v.gradient_in(mesh, t);
        for i in 0..3 {
            let p = pts[i];
            for other in [pts[(i + 1) % 3], pts[(i + 2) % 3]] {
                let m = [0.5 * (p[0] + other[0]), 0.5 * (p[1] + other[1])];
                let area = signed_area(p, m, q).abs();
                // v − v(p) is linear, vanishing at p
                let dm = g[0] * (m[0] - p[0]) + g[1] * (m[1] - p[1]);
                let dq = g[0] * (q[0] - p[0]) + g[1] * (q[1] - p[1]);
                total += linear_square_integral(area, 0.0, dm, dq);
            }
        }
    }
    total.sqrt()
}

/// Consistent-mass matrix restricted to interior vertices; exposed for
/// callers that need `P_h` repeatedly on one mesh.
pub fn interior_mass(mesh: &Mesh) -> SparseOperator {
    assemble_consistent_mass(mesh).restrict(Dofs::new(mesh).vertices())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sine(p: Point) -> f64 {
        (PI * p[0]).sin() * (PI * p[1]).sin()
    }

    fn sine_grad(p: Point) -> [f64; 2] {
        [
            PI * (PI * p[0]).cos() * (PI * p[1]).sin(),
            PI * (PI * p[0]).sin() * (PI * p[1]).cos(),
        ]
    }

    #[test]
    fn interpolation_examples() {
        let mesh = Mesh::structured(2).unwrap();
        assert!(lagrange_interpolate(&mesh, |_| 0.0).values().iter().all(|&v| v == 0.0));
        let lin = lagrange_interpolate(&mesh, |p| p[0] + p[1]);
        for (p, v) in mesh.vertices().iter().zip(lin.values()) {
            assert_eq!(*v, p[0] + p[1]);
        }
        let bubble = lagrange_interpolate(&mesh, |p| p[0] * (1.0 - p[0]) * p[1] * (1.0 - p[1]));
        assert_eq!(bubble.values()[4], 0.0625);
    }

    #[test]
    fn projection_reproduces_hat_functions() {
        let mesh = Mesh::structured(4).unwrap();
        let hat = NodalField::hat(&mesh, 12);
        let eval = |p: Point| {
            // the hat at (0.5, 0.5) on the n = 4 mesh, evaluated by locating p
            for t in 0..mesh.num_triangles() {
                let pts = mesh.triangle_points(t);
                let area = signed_area(pts[0], pts[1], pts[2]);
                let b = [
                    signed_area(p, pts[1], pts[2]) / area,
                    signed_area(pts[0], p, pts[2]) / area,
                    signed_area(pts[0], pts[1], p) / area,
                ];
                if b.iter().all(|&x| x >= -1e-12) {
                    return hat.eval_in(&mesh, t, b);
                }
            }
            unreachable!()
        };
        for boundary in [ProjectionBoundary::Free, ProjectionBoundary::Zero] {
            let p = l2_project(&mesh, eval, QuadratureRule::MidEdge, boundary).unwrap();
            for (a, b) in p.values().iter().zip(hat.values()) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn projection_of_one_without_constraint() {
        let mesh = Mesh::structured(1).unwrap();
        let p = l2_project(&mesh, |_| 1.0, QuadratureRule::MidEdge, ProjectionBoundary::Free).unwrap();
        for v in p.values() {
            assert!((v - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn flux_projection_reproduces_affine() {
        let mesh = Mesh::structured(4).unwrap().refine_uniform();
        let dual = DualMesh::build(&mesh).unwrap();
        let u = |p: Point| 1.0 + 2.0 * p[0] - 0.5 * p[1];
        let q = flux_projection(&mesh, &dual, |_| 3.0, u, |_| [2.0, -0.5], 4).unwrap();
        let i = lagrange_interpolate(&mesh, u);
        for (a, b) in q.values().iter().zip(i.values()) {
            assert!((a - b).abs() < 1e-12);
        }
        // variable a: fluxes of affine u are still matched piece by piece
        let q = flux_projection(&mesh, &dual, |p| 1.0 + p[0] * p[1], u, |_| [2.0, -0.5], 3).unwrap();
        for (a, b) in q.values().iter().zip(i.values()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(flux_projection(&mesh, &dual, |_| -1.0, u, |_| [2.0, -0.5], 3).is_err());
    }

    #[test]
    fn flux_projection_error_decreases() {
        let mut errs = Vec::new();
        for level in 2..=4 {
            let mesh = Mesh::structured_level(level).unwrap();
            let dual = DualMesh::build(&mesh).unwrap();
            let q = flux_projection(&mesh, &dual, |_| 1.0, sine, sine_grad, 4).unwrap();
            errs.push(error_against(&mesh, &q, sine, sine_grad, QuadratureRule::Degree5).h1());
        }
        assert!(errs[1] < 0.6 * errs[0] && errs[2] < 0.6 * errs[1], "{errs:?}");
    }

    #[test]
    fn norms_of_zero_and_center_hat() {
        let mesh = Mesh::structured(2).unwrap();
        let dual = DualMesh::build(&mesh).unwrap();
        let z = compute_norms(&mesh, &dual, &NodalField::zeros(&mesh));
        assert_eq!((z.l2, z.h1_semi, z.norm_0h, z.norm_1h), (0.0, 0.0, 0.0, 0.0));

        let hat = NodalField::hat(&mesh, 4);
        let n = compute_norms(&mesh, &dual, &hat);
        // brute force: walk all primal edges, keep interior edges that are
        // not the hypotenuse of every adjacent triangle
        let mut oracle = 0.0;
        for (a, b) in mesh.edges() {
            let adjacent: Vec<usize> = (0..mesh.num_triangles())
                .filter(|&t| mesh.triangles()[t].contains(&a) && mesh.triangles()[t].contains(&b))
                .collect();
            if adjacent.len() != 2 {
                continue;
            }
            let all_hypotenuse = adjacent.iter().all(|&t| {
                let tri = mesh.triangles()[t];
                let c = *tri.iter().find(|&&x| x != a && x != b).unwrap();
                let (pa, pb, pc) = (mesh.vertices()[a], mesh.vertices()[b], mesh.vertices()[c]);
                let dot = (pa[0] - pc[0]) * (pb[0] - pc[0]) + (pa[1] - pc[1]) * (pb[1] - pc[1]);
                dot.abs() < 1e-14
            });
            if !all_hypotenuse {
                oracle += (hat.values()[a] - hat.values()[b]).powi(2);
            }
        }
        assert_eq!(oracle, 4.0);
        assert!((n.norm_1h * n.norm_1h - oracle).abs() < 1e-14);
        // ∫|∇φ|² for the center hat is the diagonal stiffness entry 4
        assert!((n.h1_semi * n.h1_semi - 4.0).abs() < 1e-13);
        assert!((n.norm_0h * n.norm_0h - 0.25).abs() < 1e-15);
    }

    #[test]
    fn box_interpolation_error_of_constant_is_zero() {
        let mesh = Mesh::structured(3).unwrap();
        let dual = DualMesh::build(&mesh).unwrap();
        let c = NodalField::from_fn(&mesh, |_| 2.0);
        assert!(box_interpolation_error(&mesh, &dual, &c) < 1e-15);
        let lin = NodalField::from_fn(&mesh, |p| p[0]);
        assert!(box_interpolation_error(&mesh, &dual, &lin) > 0.0);
    }
}
