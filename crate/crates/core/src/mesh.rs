//! Conforming, non-obtuse triangulations of convex polygons.
//!
//! The circumcenter dual mesh is a true partition only when every triangle
//! contains its own circumcenter, so every constructor here validates that
//! no angle exceeds a right angle.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::hash::{Hash, Hasher};

use crate::error::MeshError;

pub type Point = [f64; 2];

/// Angular slack (radians) when testing for obtuse triangles.
pub const OBTUSE_TOLERANCE: f64 = 1e-9;

/// A triangulation with per-vertex boundary flags.
///
/// Immutable once built: all constructors validate the invariants.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    boundary: Vec<bool>,
    h: f64,
    domain_area: f64,
    fingerprint: u64,
}

/// Undirected edge key with the smaller vertex first.
pub(crate) fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

pub(crate) fn signed_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

pub(crate) fn distance(a: Point, b: Point) -> f64 {
    (b[0] - a[0]).hypot(b[1] - a[1])
}

/// Interior angles of a triangle, in radians, at its three corners.
pub fn triangle_angles(a: Point, b: Point, c: Point) -> [f64; 3] {
    let angle = |p: Point, q: Point, r: Point| {
        let u = [q[0] - p[0], q[1] - p[1]];
        let v = [r[0] - p[0], r[1] - p[1]];
        let cross = u[0] * v[1] - u[1] * v[0];
        let dot = u[0] * v[0] + u[1] * v[1];
        cross.abs().atan2(dot)
    };
    [angle(a, b, c), angle(b, c, a), angle(c, a, b)]
}

type Edge = (usize, usize);

/// Edge -> incident triangle count, in order of first appearance.
fn edge_incidence(triangles: &[[usize; 3]]) -> (Vec<Edge>, HashMap<Edge, usize>) {
    let mut order = Vec::new();
    let mut count: HashMap<Edge, usize> = HashMap::new();
    for t in triangles {
        for i in 0..3 {
            let key = edge_key(t[i], t[(i + 1) % 3]);
            let c = count.entry(key).or_insert(0);
            if *c == 0 {
                order.push(key);
            }
            *c += 1;
        }
    }
    (order, count)
}

impl Mesh {
    /// Builds a mesh, deriving boundary flags from edge incidence.
    pub fn new(vertices: Vec<Point>, triangles: Vec<[usize; 3]>) -> Result<Self, MeshError> {
        let (_, count) = edge_incidence(&triangles);
        let mut boundary = vec![false; vertices.len()];
        for (&(a, b), &c) in &count {
            if c == 1 {
                if a >= vertices.len() || b >= vertices.len() {
                    continue;
                }
                boundary[a] = true;
                boundary[b] = true;
            }
        }
        Self::with_boundary(vertices, triangles, boundary)
    }

    /// Builds a mesh with explicit boundary flags, which must agree with the
    /// flags implied by the triangulation.
    pub fn with_boundary(
        vertices: Vec<Point>,
        triangles: Vec<[usize; 3]>,
        boundary: Vec<bool>,
    ) -> Result<Self, MeshError> {
        check_triangulation(&vertices, &triangles, &boundary, &|_| None, &|_| None)?;
        Ok(Self::assemble_unchecked(vertices, triangles, boundary))
    }

    fn assemble_unchecked(vertices: Vec<Point>, triangles: Vec<[usize; 3]>, boundary: Vec<bool>) -> Self {
        let mut h: f64 = 0.0;
        let mut domain_area = 0.0;
        for t in &triangles {
            let [a, b, c] = t.map(|i| vertices[i]);
            domain_area += signed_area(a, b, c);
            h = h.max(distance(a, b)).max(distance(b, c)).max(distance(c, a));
        }
        let mut hasher = std::collections::hash_map::DefaultHasher::new();
        for p in &vertices {
            p[0].to_bits().hash(&mut hasher);
            p[1].to_bits().hash(&mut hasher);
        }
        triangles.hash(&mut hasher);
        boundary.hash(&mut hasher);
        Mesh {
            vertices,
            triangles,
            boundary,
            h,
            domain_area,
            fingerprint: hasher.finish(),
        }
    }

    /// Hash of the vertex coordinates, triangles and flags; identifies the
    /// mesh a [`crate::field::NodalField`] is bound to.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn boundary_flags(&self) -> &[bool] {
        &self.boundary
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.boundary[v]
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    /// Maximum edge length.
    pub fn h(&self) -> f64 {
        self.h
    }

    /// Sum of the triangle areas.
    pub fn domain_area(&self) -> f64 {
        self.domain_area
    }

    pub fn triangle_points(&self, t: usize) -> [Point; 3] {
        self.triangles[t].map(|i| self.vertices[i])
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_points(t);
        signed_area(a, b, c)
    }

    /// Unique undirected edges in order of first appearance.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        edge_incidence(&self.triangles).0
    }

    /// Interior vertex indices in increasing order.
    pub fn interior_vertices(&self) -> Vec<usize> {
        (0..self.num_vertices()).filter(|&v| !self.boundary[v]).collect()
    }

    /// Area enclosed by the boundary edges, oriented by their triangles.
    ///
    /// Independent of the per-triangle sum, so the two can be compared.
    pub fn boundary_enclosed_area(&self) -> f64 {
        let (_, count) = edge_incidence(&self.triangles);
        let mut area = 0.0;
        for t in &self.triangles {
            for i in 0..3 {
                let (a, b) = (t[i], t[(i + 1) % 3]);
                if count[&edge_key(a, b)] == 1 {
                    let (p, q) = (self.vertices[a], self.vertices[b]);
                    area += 0.5 * (p[0] * q[1] - q[0] * p[1]);
                }
            }
        }
        area
    }

    /// Unit square split into `n` x `n` cells, each cut along its
    /// lower-left to upper-right diagonal.
    pub fn structured(n: usize) -> Result<Self, MeshError> {
        if n == 0 {
            return Err(MeshError::InvalidSubdivision);
        }
        let stride = n + 1;
        let mut vertices = Vec::with_capacity(stride * stride);
        let mut boundary = Vec::with_capacity(stride * stride);
        for j in 0..=n {
            for i in 0..=n {
                vertices.push([i as f64 / n as f64, j as f64 / n as f64]);
                boundary.push(i == 0 || j == 0 || i == n || j == n);
            }
        }
        let mut triangles = Vec::with_capacity(2 * n * n);
        for j in 0..n {
            for i in 0..n {
                let v00 = j * stride + i;
                let v10 = v00 + 1;
                let v01 = v00 + stride;
                let v11 = v01 + 1;
                triangles.push([v00, v10, v11]);
                triangles.push([v00, v11, v01]);
            }
        }
        Self::with_boundary(vertices, triangles, boundary)
    }

    /// Splits every triangle into four similar children through its edge
    /// midpoints. New vertices follow the old ones, in edge order.
    pub fn refine_uniform(&self) -> Mesh {
        let edges = self.edges();
        let nv = self.num_vertices();
        let mut vertices = self.vertices.clone();
        let mut boundary = self.boundary.clone();
        let (_, count) = edge_incidence(&self.triangles);
        let mut midpoint = HashMap::with_capacity(edges.len());
        for (e, &(a, b)) in edges.iter().enumerate() {
            let (p, q) = (self.vertices[a], self.vertices[b]);
            vertices.push([0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])]);
            boundary.push(count[&(a, b)] == 1);
            midpoint.insert((a, b), nv + e);
        }
        let mid = |a: usize, b: usize| midpoint[&edge_key(a, b)];
        let mut triangles = Vec::with_capacity(4 * self.num_triangles());
        for &[a, b, c] in &self.triangles {
            let (ab, bc, ca) = (mid(a, b), mid(b, c), mid(c, a));
            triangles.push([a, ab, ca]);
            triangles.push([ab, b, bc]);
            triangles.push([ca, bc, c]);
            triangles.push([ab, bc, ca]);
        }
        Self::assemble_unchecked(vertices, triangles, boundary)
    }

    /// Structured mesh of level `level`, i.e. `2^level` cells per side.
    pub fn structured_level(level: u32) -> Result<Self, MeshError> {
        Self::structured(1usize << level)
    }

    pub fn validate(&self) -> MeshReport {
        MeshReport::of(self)
    }

    /// Canonical text form: header, vertices `x y b`, triangles `i j k`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.num_vertices(), self.num_triangles());
        for (p, &b) in self.vertices.iter().zip(&self.boundary) {
            let _ = writeln!(out, "{} {} {}", p[0], p[1], u8::from(b));
        }
        for t in &self.triangles {
            let _ = writeln!(out, "{} {} {}", t[0], t[1], t[2]);
        }
        out
    }

    /// Parses the canonical text form. Lines starting with `#` and blank
    /// lines are skipped; errors carry the 1-based line number.
    pub fn from_text(text: &str) -> Result<Mesh, MeshError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

        let parse_err = |line: usize, reason: &str| MeshError::Parse {
            line,
            reason: reason.to_string(),
        };

        let (header_line, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
        let counts: Vec<usize> = header
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|_| parse_err(header_line, "malformed header"))?;
        let [nv, nt] = counts[..] else {
            return Err(parse_err(header_line, "malformed header"));
        };

        let mut vertices = Vec::with_capacity(nv);
        let mut boundary = Vec::with_capacity(nv);
        let mut vertex_lines = Vec::with_capacity(nv);
        for _ in 0..nv {
            let (ln, l) = lines
                .next()
                .ok_or_else(|| parse_err(usize::MAX, "unexpected end of file in vertex block"))?;
            let fields: Vec<&str> = l.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(parse_err(ln, "expected `x y b`"));
            }
            let x: f64 = fields[0].parse().map_err(|_| parse_err(ln, "bad x coordinate"))?;
            let y: f64 = fields[1].parse().map_err(|_| parse_err(ln, "bad y coordinate"))?;
            if !x.is_finite() || !y.is_finite() {
                return Err(parse_err(ln, "non-finite coordinate"));
            }
            let b = match fields[2] {
                "0" => false,
                "1" => true,
                _ => return Err(parse_err(ln, "boundary flag must be 0 or 1")),
            };
            vertices.push([x, y]);
            boundary.push(b);
            vertex_lines.push(ln);
        }

        let mut triangles = Vec::with_capacity(nt);
        let mut triangle_lines = Vec::with_capacity(nt);
        for _ in 0..nt {
            let (ln, l) = lines
                .next()
                .ok_or_else(|| parse_err(usize::MAX, "unexpected end of file in triangle block"))?;
            let idx: Vec<usize> = l
                .split_whitespace()
                .map(str::parse)
                .collect::<Result<_, _>>()
                .map_err(|_| parse_err(ln, "bad vertex index"))?;
            let [i, j, k] = idx[..] else {
                return Err(parse_err(ln, "expected `i j k`"));
            };
            triangles.push([i, j, k]);
            triangle_lines.push(ln);
        }
        if let Some((ln, _)) = lines.next() {
            return Err(parse_err(ln, "trailing data after triangle block"));
        }

        check_triangulation(
            &vertices,
            &triangles,
            &boundary,
            &|t| Some(triangle_lines[t]),
            &|v| Some(vertex_lines[v]),
        )?;
        Ok(Self::assemble_unchecked(vertices, triangles, boundary))
    }
}

/// Validates index range, orientation, non-obtuseness, conformity and
/// boundary flags, in that order.
fn check_triangulation(
    vertices: &[Point],
    triangles: &[[usize; 3]],
    boundary: &[bool],
    triangle_line: &dyn Fn(usize) -> Option<usize>,
    vertex_line: &dyn Fn(usize) -> Option<usize>,
) -> Result<(), MeshError> {
    let fail = |line: Option<usize>, what: String, reason: &str| match line {
        Some(line) => MeshError::Parse {
            line,
            reason: reason.to_string(),
        },
        None => MeshError::Invalid {
            what,
            reason: reason.to_string(),
        },
    };
    if triangles.is_empty() {
        return Err(fail(None, "mesh".into(), "no triangles"));
    }
    if boundary.len() != vertices.len() {
        return Err(fail(None, "mesh".into(), "boundary flag count differs from vertex count"));
    }
    for (t, tri) in triangles.iter().enumerate() {
        let what = format!("triangle {t}");
        if tri.iter().any(|&i| i >= vertices.len()) {
            return Err(fail(triangle_line(t), what, "vertex index out of range"));
        }
        if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
            return Err(fail(triangle_line(t), what, "repeated vertex"));
        }
        let [a, b, c] = tri.map(|i| vertices[i]);
        let area = signed_area(a, b, c);
        let scale = distance(a, b).max(distance(b, c)).max(distance(c, a));
        if area <= 1e-14 * scale * scale {
            return Err(fail(triangle_line(t), what, "triangle not counterclockwise or degenerate"));
        }
        let max_angle = triangle_angles(a, b, c).into_iter().fold(0.0, f64::max);
        if max_angle > std::f64::consts::FRAC_PI_2 + OBTUSE_TOLERANCE {
            return Err(fail(triangle_line(t), what, "obtuse triangle"));
        }
    }

    let mut count: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
    for (t, tri) in triangles.iter().enumerate() {
        for i in 0..3 {
            let (a, b) = (tri[i], tri[(i + 1) % 3]);
            let entry = count.entry(edge_key(a, b)).or_insert((0, 0));
            entry.0 += 1;
            // same directed edge twice means inconsistent orientation
            if entry.0 > 2 || (entry.0 == 2 && entry.1 == a) {
                return Err(fail(triangle_line(t), format!("triangle {t}"), "non-conforming edge"));
            }
            entry.1 = a;
        }
    }
    let mut on_boundary_edge = vec![false; vertices.len()];
    for (&(a, b), &(c, _)) in &count {
        if c == 1 {
            on_boundary_edge[a] = true;
            on_boundary_edge[b] = true;
        }
    }
    let mut used = vec![false; vertices.len()];
    for tri in triangles {
        for &i in tri {
            used[i] = true;
        }
    }
    for v in 0..vertices.len() {
        if !used[v] {
            return Err(fail(vertex_line(v), format!("vertex {v}"), "vertex not used by any triangle"));
        }
        if on_boundary_edge[v] != boundary[v] {
            return Err(fail(vertex_line(v), format!("vertex {v}"), "boundary flag mismatch"));
        }
    }
    Ok(())
}

/// Geometric quality summary of a mesh. Angles are in degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshReport {
    pub min_angle_deg: f64,
    pub max_angle_deg: f64,
    pub min_edge: f64,
    pub max_edge: f64,
    pub h: f64,
    /// Largest ratio of longest edge to shortest altitude over all triangles.
    pub aspect_ratio_bound: f64,
    /// max edge / min edge over the whole mesh.
    pub quasi_uniformity: f64,
    pub conforming: bool,
    pub non_obtuse: bool,
    /// |Σ triangle areas − boundary-enclosed area| / domain area.
    pub partition_defect: f64,
}

impl MeshReport {
    pub fn of(mesh: &Mesh) -> MeshReport {
        let mut min_angle = f64::INFINITY;
        let mut max_angle: f64 = 0.0;
        let mut min_edge = f64::INFINITY;
        let mut max_edge: f64 = 0.0;
        let mut aspect: f64 = 0.0;
        for t in 0..mesh.num_triangles() {
            let [a, b, c] = mesh.triangle_points(t);
            for ang in triangle_angles(a, b, c) {
                min_angle = min_angle.min(ang);
                max_angle = max_angle.max(ang);
            }
            let lens = [distance(a, b), distance(b, c), distance(c, a)];
            let longest = lens.iter().cloned().fold(0.0, f64::max);
            for l in lens {
                min_edge = min_edge.min(l);
                max_edge = max_edge.max(l);
            }
            let area = signed_area(a, b, c);
            let min_altitude = 2.0 * area / longest;
            aspect = aspect.max(longest / min_altitude);
        }
        let (_, count) = edge_incidence(&mesh.triangles);
        let conforming = count.values().all(|&c| c == 1 || c == 2);
        let area = mesh.domain_area();
        MeshReport {
            min_angle_deg: min_angle.to_degrees(),
            max_angle_deg: max_angle.to_degrees(),
            min_edge,
            max_edge,
            h: mesh.h(),
            aspect_ratio_bound: aspect,
            quasi_uniformity: max_edge / min_edge,
            conforming,
            non_obtuse: max_angle <= std::f64::consts::FRAC_PI_2 + OBTUSE_TOLERANCE,
            partition_defect: (area - mesh.boundary_enclosed_area()).abs() / area,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.conforming && self.non_obtuse && self.partition_defect <= 1e-12
    }
}

impl std::fmt::Display for MeshReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "h = {:.6e}", self.h)?;
        writeln!(f, "angles: min {:.4} deg, max {:.4} deg", self.min_angle_deg, self.max_angle_deg)?;
        writeln!(f, "edges: min {:.6e}, max {:.6e}", self.min_edge, self.max_edge)?;
        writeln!(f, "aspect ratio bound = {:.6}", self.aspect_ratio_bound)?;
        writeln!(f, "quasi-uniformity ratio = {:.6}", self.quasi_uniformity)?;
        writeln!(f, "conforming = {}", self.conforming)?;
        writeln!(f, "non-obtuse = {}", self.non_obtuse)?;
        write!(f, "partition defect = {:.3e}", self.partition_defect)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square_two() -> Mesh {
        Mesh::structured(1).unwrap()
    }

    #[test]
    fn structured_counts() {
        let m = unit_square_two();
        assert_eq!((m.num_vertices(), m.num_triangles()), (4, 2));
        assert_eq!(m.h(), 2f64.sqrt());

        let m = Mesh::structured(2).unwrap();
        assert_eq!((m.num_vertices(), m.num_triangles()), (9, 8));
        for (v, p) in m.vertices().iter().enumerate() {
            assert_eq!(m.is_boundary(v), *p != [0.5, 0.5]);
        }

        let m = Mesh::structured(4).unwrap();
        assert_eq!((m.num_vertices(), m.num_triangles()), (25, 32));
        assert!((m.domain_area() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn zero_subdivision_rejected() {
        assert!(matches!(Mesh::structured(0), Err(MeshError::InvalidSubdivision)));
    }

    #[test]
    fn parse_smallest_mesh() {
        let text = "# unit square\n4 2\n0 0 1\n1 0 1\n0 1 1\n1 1 1\n0 1 3\n0 3 2\n";
        let m = Mesh::from_text(text).unwrap();
        assert_eq!(m, unit_square_two());
    }

    #[test]
    fn parse_reports_out_of_range_index() {
        let text = "4 2\n0 0 1\n1 0 1\n1 1 1\n0 1 1\n0 1 9\n0 2 3\n";
        match Mesh::from_text(text) {
            Err(MeshError::Parse { line, reason }) => {
                assert_eq!(line, 6);
                assert_eq!(reason, "vertex index out of range");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parse_rejects_obtuse_triangle() {
        // largest angle, at (0.2, 0.05): cos = (a² + b² − c²)/(2ab) with
        // c = 1 the opposite side; a² + b² = 0.0425 + 0.6425 < 1, so obtuse
        let (a2, b2, c2) = (0.2f64 * 0.2 + 0.05 * 0.05, 0.8f64 * 0.8 + 0.05 * 0.05, 1.0f64);
        assert!(a2 + b2 < c2);
        let text = "3 1\n0 0 1\n1 0 1\n0.2 0.05 1\n0 1 2\n";
        match Mesh::from_text(text) {
            Err(MeshError::Parse { line, reason }) => {
                assert_eq!(line, 5);
                assert_eq!(reason, "obtuse triangle");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parse_rejects_non_conforming_and_bad_flags() {
        // three triangles sharing edge 0-2
        let text = "5 3\n0 0 1\n1 0 1\n1 1 1\n0 1 1\n1.2 -0.2 1\n0 1 2\n0 2 3\n0 4 2\n";
        let err = Mesh::from_text(text).unwrap_err();
        assert!(err.to_string().contains("line 9"), "{err}");
        assert!(err.to_string().contains("non-conforming edge"));

        let text = "4 2\n0 0 1\n1 0 0\n1 1 1\n0 1 1\n0 1 2\n0 2 3\n";
        let err = Mesh::from_text(text).unwrap_err();
        assert_eq!(
            err,
            MeshError::Parse {
                line: 3,
                reason: "boundary flag mismatch".into()
            }
        );

        let err = Mesh::from_text("4 x\n").unwrap_err();
        assert!(err.to_string().contains("malformed header"));
    }

    #[test]
    fn clockwise_triangle_rejected() {
        let err = Mesh::new(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], vec![[0, 2, 1]]).unwrap_err();
        assert!(err.to_string().contains("counterclockwise"));
    }

    #[test]
    fn refine_counts_and_h() {
        let m = unit_square_two();
        let r = m.refine_uniform();
        assert_eq!((r.num_vertices(), r.num_triangles()), (9, 8));
        assert_eq!(r.num_vertices(), m.num_vertices() + m.edges().len());
        assert_eq!(r.h(), m.h() / 2.0);
        assert!(r.validate().is_valid());
        assert_eq!(r, Mesh::new(r.vertices().to_vec(), r.triangles().to_vec()).unwrap());
    }

    #[test]
    fn refine_twice_matches_structured_point_set() {
        let r = unit_square_two().refine_uniform().refine_uniform();
        let s = Mesh::structured(4).unwrap();
        let key = |p: &Point| ((p[0] * 1e6).round() as i64, (p[1] * 1e6).round() as i64);
        let mut a: Vec<_> = r.vertices().to_vec();
        let mut b: Vec<_> = s.vertices().to_vec();
        a.sort_by_key(key);
        b.sort_by_key(key);
        assert_eq!(a.len(), b.len());
        for (p, q) in a.iter().zip(&b) {
            assert!(distance(*p, *q) <= 1e-14);
        }
    }

    #[test]
    fn report_angles() {
        let rep = Mesh::structured(4).unwrap().validate();
        assert!((rep.min_angle_deg - 45.0).abs() < 1e-9);
        assert!((rep.max_angle_deg - 90.0).abs() < 1e-9);
        assert!(rep.is_valid());

        let s3 = 3f64.sqrt() / 2.0;
        let eq = Mesh::new(vec![[0.0, 0.0], [1.0, 0.0], [0.5, s3]], vec![[0, 1, 2]]).unwrap();
        let rep = eq.validate();
        assert!((rep.min_angle_deg - 60.0).abs() < 1e-9);
        assert!((rep.max_angle_deg - 60.0).abs() < 1e-9);
    }

    #[test]
    fn quasi_uniformity_constant_under_refinement() {
        let mut m = Mesh::structured(2).unwrap();
        let q0 = m.validate().quasi_uniformity;
        for _ in 0..3 {
            m = m.refine_uniform();
            assert!((m.validate().quasi_uniformity - q0).abs() < 1e-12);
        }
    }

    #[test]
    fn text_round_trip_is_identity_on_canonical_files() {
        let m = Mesh::structured(3).unwrap().refine_uniform();
        let text = m.to_text();
        let back = Mesh::from_text(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_text(), text);
    }
}
