//! Discrete operators of the box scheme.
//!
//! Testing against box indicators turns the flux term into a sum over dual
//! interface pieces. A piece of length `ℓ` across edge `pp*` carries the
//! conductance `k̄ ℓ / |p − p*|`, where `k̄` is `k` at the edge-midpoint
//! value of the current iterate. Boundary rows and columns are eliminated.

use crate::coefficients::CoefficientModel;
use crate::dual::{DualMesh, Segment};
use crate::error::HypothesisError;
use crate::field::{Dofs, NodalField};
use crate::linalg::{DiagonalOperator, SparseOperator};
use crate::mesh::Mesh;

/// How `∫_Ω f(u)` is approximated in the nonlocal denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SourceIntegral {
    /// `Σ_p |b_p| f(u(p))` over all vertices.
    #[default]
    Lumped,
    /// `Σ_T |T| f(u(centroid_T))`.
    Centroid,
}

/// Box areas of the interior vertices.
pub fn assemble_lumped_mass(dual: &DualMesh, mesh: &Mesh) -> DiagonalOperator {
    let dofs = Dofs::new(mesh);
    DiagonalOperator {
        entries: dofs.vertices().iter().map(|&v| dual.box_area(v)).collect(),
    }
}

/// Piecewise-linear mass matrix over all vertices.
pub fn assemble_consistent_mass(mesh: &Mesh) -> SparseOperator {
    let mut triplets = Vec::with_capacity(9 * mesh.num_triangles());
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let area = mesh.triangle_area(t);
        for i in 0..3 {
            for j in 0..3 {
                let m = if i == j { area / 6.0 } else { area / 12.0 };
                triplets.push((tri[i], tri[j], m));
            }
        }
    }
    SparseOperator::from_triplets(mesh.num_vertices(), triplets, true)
}

/// Full-vertex matrix with `+w` on both diagonals and `−w` off-diagonal for
/// every segment, `w = conductance(segment)`.
pub(crate) fn assemble_segment_laplacian(
    mesh: &Mesh,
    dual: &DualMesh,
    mut conductance: impl FnMut(&Segment) -> Result<f64, HypothesisError>,
) -> Result<SparseOperator, HypothesisError> {
    let mut triplets = Vec::with_capacity(4 * dual.segments().len());
    for s in dual.segments() {
        let w = conductance(s)?;
        triplets.push((s.p, s.p, w));
        triplets.push((s.p_star, s.p_star, w));
        triplets.push((s.p, s.p_star, -w));
        triplets.push((s.p_star, s.p, -w));
    }
    Ok(SparseOperator::from_triplets(mesh.num_vertices(), triplets, true))
}

fn edge_conductivity(coeff: &CoefficientModel, u: &[f64], s: &Segment) -> Result<f64, HypothesisError> {
    let k = coeff.k.eval(0.5 * (u[s.p] + u[s.p_star]));
    if !(k > 0.0) {
        return Err(HypothesisError::NonPositiveConductivity {
            p: s.p,
            q: s.p_star,
            value: k,
        });
    }
    Ok(k)
}

/// Flux matrix over all vertices (no Dirichlet elimination).
pub fn assemble_flux_matrix_full(
    mesh: &Mesh,
    dual: &DualMesh,
    coeff: &CoefficientModel,
    u: &NodalField,
) -> Result<SparseOperator, HypothesisError> {
    let values = u.values();
    assemble_segment_laplacian(mesh, dual, |s| {
        Ok(edge_conductivity(coeff, values, s)? * s.total_length() / s.l_db)
    })
}

/// Flux matrix over the interior vertices, symmetric positive definite.
pub fn assemble_flux_matrix(
    mesh: &Mesh,
    dual: &DualMesh,
    coeff: &CoefficientModel,
    u: &NodalField,
) -> Result<SparseOperator, HypothesisError> {
    let full = assemble_flux_matrix_full(mesh, dual, coeff, u)?;
    Ok(full.restrict(Dofs::new(mesh).vertices()))
}

/// Nonlocal source `λ f(u(p)) |b_p| / I²` (zero on the boundary) and the
/// denominator integral `I ≈ ∫_Ω f(u)`.
pub fn assemble_nonlocal_source(
    mesh: &Mesh,
    dual: &DualMesh,
    u: &NodalField,
    coeff: &CoefficientModel,
    rule: SourceIntegral,
) -> Result<(NodalField, f64), HypothesisError> {
    let values = u.values();
    let f_at: Vec<f64> = values.iter().map(|&x| coeff.f.eval(x)).collect();
    let integral = match rule {
        SourceIntegral::Lumped => dual.box_areas().iter().zip(&f_at).map(|(a, f)| a * f).sum::<f64>(),
        SourceIntegral::Centroid => (0..mesh.num_triangles())
            .map(|t| mesh.triangle_area(t) * coeff.f.eval(u.eval_in(mesh, t, [1.0 / 3.0; 3])))
            .sum(),
    };
    let bound = coeff.nu() * mesh.domain_area();
    if !(integral >= bound * (1.0 - 1e-12)) {
        return Err(HypothesisError::SourceIntegral { integral, bound });
    }
    let scale = coeff.lambda / (integral * integral);
    let mut source = NodalField::zeros(mesh);
    for (v, out) in source.values_mut().iter_mut().enumerate() {
        if !mesh.is_boundary(v) {
            *out = scale * f_at[v] * dual.box_area(v);
        }
    }
    Ok((source, integral))
}
