//! Per-vertex fields, the interior degree-of-freedom map, and triangle
//! quadrature.

use crate::error::SolverError;
use crate::mesh::{Mesh, Point};

/// Real values indexed by mesh vertex.
///
/// As a member of the piecewise-linear space the values are the nodal
/// values; read box-wise they are the piecewise-constant image `I_h v`.
#[derive(Debug, Clone, PartialEq)]
pub struct NodalField {
    values: Vec<f64>,
    mesh_id: u64,
}

impl NodalField {
    pub fn new(mesh: &Mesh, values: Vec<f64>) -> Result<Self, SolverError> {
        if values.len() != mesh.num_vertices() {
            return Err(SolverError::FieldLength {
                expected: mesh.num_vertices(),
                got: values.len(),
            });
        }
        Ok(NodalField {
            values,
            mesh_id: mesh.fingerprint(),
        })
    }

    pub fn zeros(mesh: &Mesh) -> Self {
        NodalField {
            values: vec![0.0; mesh.num_vertices()],
            mesh_id: mesh.fingerprint(),
        }
    }

    pub fn from_fn(mesh: &Mesh, f: impl Fn(Point) -> f64) -> Self {
        NodalField {
            values: mesh.vertices().iter().map(|&p| f(p)).collect(),
            mesh_id: mesh.fingerprint(),
        }
    }

    /// Hat basis function of vertex `v`.
    pub fn hat(mesh: &Mesh, v: usize) -> Self {
        let mut f = Self::zeros(mesh);
        f.values[v] = 1.0;
        f
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mesh_id(&self) -> u64 {
        self.mesh_id
    }

    pub fn is_bound_to(&self, mesh: &Mesh) -> bool {
        self.mesh_id == mesh.fingerprint() && self.values.len() == mesh.num_vertices()
    }

    /// True when every boundary entry is exactly zero.
    pub fn vanishes_on_boundary(&self, mesh: &Mesh) -> bool {
        mesh.boundary_flags()
            .iter()
            .zip(&self.values)
            .all(|(&b, &v)| !b || v == 0.0)
    }

    pub fn zero_boundary(&mut self, mesh: &Mesh) {
        for (v, &b) in self.values.iter_mut().zip(mesh.boundary_flags()) {
            if b {
                *v = 0.0;
            }
        }
    }

    /// Value of the piecewise-linear interpolant at barycentric coordinates
    /// `bary` inside triangle `t`.
    pub fn eval_in(&self, mesh: &Mesh, t: usize, bary: [f64; 3]) -> f64 {
        let tri = mesh.triangles()[t];
        (0..3).map(|i| bary[i] * self.values[tri[i]]).sum()
    }

    /// Constant gradient of the interpolant on triangle `t`.
    pub fn gradient_in(&self, mesh: &Mesh, t: usize) -> [f64; 2] {
        let tri = mesh.triangles()[t];
        p1_gradient(mesh.triangle_points(t), tri.map(|i| self.values[i]))
    }

    pub fn sub(&self, other: &NodalField) -> NodalField {
        assert_eq!(self.mesh_id, other.mesh_id, "fields bound to different meshes");
        NodalField {
            values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
            mesh_id: self.mesh_id,
        }
    }

    pub(crate) fn ensure_bound(&self, mesh: &Mesh) -> Result<(), SolverError> {
        if self.values.len() != mesh.num_vertices() {
            return Err(SolverError::FieldLength {
                expected: mesh.num_vertices(),
                got: self.values.len(),
            });
        }
        assert_eq!(self.mesh_id, mesh.fingerprint(), "field bound to a different mesh");
        Ok(())
    }
}

/// Gradient of the linear function taking `values` at the corners `pts`.
pub fn p1_gradient(pts: [Point; 3], values: [f64; 3]) -> [f64; 2] {
    let [a, b, c] = pts;
    let (e1, e2) = ([b[0] - a[0], b[1] - a[1]], [c[0] - a[0], c[1] - a[1]]);
    let det = e1[0] * e2[1] - e1[1] * e2[0];
    let (d1, d2) = (values[1] - values[0], values[2] - values[0]);
    [(d1 * e2[1] - d2 * e1[1]) / det, (e1[0] * d2 - e2[0] * d1) / det]
}

/// Maps vertices to unknowns: interior vertices only, in increasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct Dofs {
    interior: Vec<usize>,
    index: Vec<Option<usize>>,
}

impl Dofs {
    pub fn new(mesh: &Mesh) -> Self {
        let interior = mesh.interior_vertices();
        let mut index = vec![None; mesh.num_vertices()];
        for (i, &v) in interior.iter().enumerate() {
            index[v] = Some(i);
        }
        Dofs { interior, index }
    }

    pub fn len(&self) -> usize {
        self.interior.len()
    }

    pub fn is_empty(&self) -> bool {
        self.interior.is_empty()
    }

    pub fn vertices(&self) -> &[usize] {
        &self.interior
    }

    pub fn dof(&self, vertex: usize) -> Option<usize> {
        self.index[vertex]
    }

    pub fn restrict(&self, full: &[f64]) -> Vec<f64> {
        self.interior.iter().map(|&v| full[v]).collect()
    }

    /// Scatters interior values into a full vector with zero boundary.
    pub fn extend(&self, reduced: &[f64], num_vertices: usize) -> Vec<f64> {
        let mut full = vec![0.0; num_vertices];
        for (&v, &x) in self.interior.iter().zip(reduced) {
            full[v] = x;
        }
        full
    }
}

/// Symmetric quadrature rules on triangles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QuadratureRule {
    /// One point, exact for degree 1.
    Centroid,
    /// Three edge midpoints, exact for degree 2.
    #[default]
    MidEdge,
    /// Seven points, exact for degree 5.
    Degree5,
}

impl QuadratureRule {
    /// `(barycentric point, weight)` pairs; weights sum to 1.
    pub fn points(self) -> Vec<([f64; 3], f64)> {
        match self {
            QuadratureRule::Centroid => vec![([1.0 / 3.0; 3], 1.0)],
            QuadratureRule::MidEdge => vec![
                ([0.5, 0.5, 0.0], 1.0 / 3.0),
                ([0.0, 0.5, 0.5], 1.0 / 3.0),
                ([0.5, 0.0, 0.5], 1.0 / 3.0),
            ],
            QuadratureRule::Degree5 => {
                let s15 = 15f64.sqrt();
                let (a1, w1) = ((6.0 - s15) / 21.0, (155.0 - s15) / 1200.0);
                let (a2, w2) = ((6.0 + s15) / 21.0, (155.0 + s15) / 1200.0);
                let mut pts = vec![([1.0 / 3.0; 3], 9.0 / 40.0)];
                for (a, w) in [(a1, w1), (a2, w2)] {
                    let b = 1.0 - 2.0 * a;
                    pts.push(([b, a, a], w));
                    pts.push(([a, b, a], w));
                    pts.push(([a, a, b], w));
                }
                pts
            }
        }
    }

    pub fn degree(self) -> usize {
        match self {
            QuadratureRule::Centroid => 1,
            QuadratureRule::MidEdge => 2,
            QuadratureRule::Degree5 => 5,
        }
    }
}

pub fn bary_to_point(pts: [Point; 3], bary: [f64; 3]) -> Point {
    [
        bary[0] * pts[0][0] + bary[1] * pts[1][0] + bary[2] * pts[2][0],
        bary[0] * pts[0][1] + bary[1] * pts[1][1] + bary[2] * pts[2][1],
    ]
}
