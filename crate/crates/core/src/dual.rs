//! Circumcenter (box) dual of a non-obtuse triangulation.
//!
//! Each triangle contributes its circumcenter `q`, joined to the three edge
//! midpoints. The box of vertex `p` is the union of the quadrilaterals
//! `(p, m, q, m')` over the triangles incident to `p`, and the interface
//! between boxes `p` and `p*` is made of one piece `q -> m` per triangle
//! sharing the edge `pp*`.

use std::collections::HashMap;

use crate::error::DualMeshError;
use crate::mesh::{distance, edge_key, signed_area, Mesh, Point};

/// Barycentric slack when testing whether a circumcenter lies in the closed triangle.
const CLOSURE_TOLERANCE: f64 = 1e-10;

/// One straight piece of a dual interface, inside a single triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub triangle: usize,
    /// Circumcenter of `triangle`.
    pub circumcenter: Point,
    /// Midpoint of the primal edge.
    pub midpoint: Point,
    pub length: f64,
}

/// The dual interface `Γ_pp*` across primal edge `(p, p_star)`, `p < p_star`.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub p: usize,
    pub p_star: usize,
    /// One piece per adjacent triangle; zero-length pieces are kept.
    pub pieces: Vec<Piece>,
    /// |p − p*|.
    pub l_db: f64,
    /// (p* − p)/|p* − p|, the outward normal of box `p` on this interface.
    pub unit_normal: [f64; 2],
    /// True when the primal edge lies on the domain boundary.
    pub on_boundary: bool,
}

impl Segment {
    pub fn total_length(&self) -> f64 {
        self.pieces.iter().map(|p| p.length).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualMesh {
    box_area: Vec<f64>,
    segments: Vec<Segment>,
    circumcenters: Vec<Point>,
    /// Per triangle, the segment index of edges (0,1), (1,2), (2,0).
    triangle_segments: Vec<[usize; 3]>,
}

/// Circumcenter from the two perpendicular-bisector equations
/// `2 (b − a)·q = |b|² − |a|²` and `2 (c − a)·q = |c|² − |a|²`.
pub fn circumcenter(a: Point, b: Point, c: Point) -> Option<Point> {
    let (bx, by) = (b[0] - a[0], b[1] - a[1]);
    let (cx, cy) = (c[0] - a[0], c[1] - a[1]);
    let det = 2.0 * (bx * cy - by * cx);
    let scale = (bx * bx + by * by).max(cx * cx + cy * cy);
    if det.abs() <= 1e-14 * scale {
        return None;
    }
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    let ux = (cy * b2 - by * c2) / det;
    let uy = (bx * c2 - cx * b2) / det;
    Some([a[0] + ux, a[1] + uy])
}

fn in_closed_triangle(q: Point, a: Point, b: Point, c: Point) -> bool {
    let area = signed_area(a, b, c);
    let l0 = signed_area(q, b, c) / area;
    let l1 = signed_area(a, q, c) / area;
    let l2 = signed_area(a, b, q) / area;
    l0 >= -CLOSURE_TOLERANCE && l1 >= -CLOSURE_TOLERANCE && l2 >= -CLOSURE_TOLERANCE
}

fn midpoint(a: Point, b: Point) -> Point {
    [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
}

impl DualMesh {
    pub fn build(mesh: &Mesh) -> Result<DualMesh, DualMeshError> {
        let nv = mesh.num_vertices();
        let mut box_area = vec![0.0; nv];
        let mut circumcenters = Vec::with_capacity(mesh.num_triangles());
        let mut segments: Vec<Segment> = Vec::new();
        let mut segment_of: HashMap<(usize, usize), usize> = HashMap::new();
        let mut triangle_segments = Vec::with_capacity(mesh.num_triangles());

        for (t, tri) in mesh.triangles().iter().enumerate() {
            let pts = mesh.triangle_points(t);
            let q = circumcenter(pts[0], pts[1], pts[2]).ok_or(DualMeshError::Degenerate { triangle: t })?;
            if !in_closed_triangle(q, pts[0], pts[1], pts[2]) {
                return Err(DualMeshError::CircumcenterOutside { triangle: t });
            }
            circumcenters.push(q);

            let mids = [
                midpoint(pts[0], pts[1]),
                midpoint(pts[1], pts[2]),
                midpoint(pts[2], pts[0]),
            ];
            // corner i is bounded by edge (i, i+1) with midpoint mids[i] and
            // edge (i-1, i) with midpoint mids[i+2]
            for i in 0..3 {
                let quad = [pts[i], mids[i], q, mids[(i + 2) % 3]];
                box_area[tri[i]] += signed_area(quad[0], quad[1], quad[2]) + signed_area(quad[0], quad[2], quad[3]);
            }

            let mut local = [0usize; 3];
            for i in 0..3 {
                let (a, b) = (tri[i], tri[(i + 1) % 3]);
                let key = edge_key(a, b);
                let s = *segment_of.entry(key).or_insert_with(|| {
                    let (pp, ps) = (mesh.vertices()[key.0], mesh.vertices()[key.1]);
                    let l = distance(pp, ps);
                    segments.push(Segment {
                        p: key.0,
                        p_star: key.1,
                        pieces: Vec::with_capacity(2),
                        l_db: l,
                        unit_normal: [(ps[0] - pp[0]) / l, (ps[1] - pp[1]) / l],
                        on_boundary: false,
                    });
                    segments.len() - 1
                });
                segments[s].pieces.push(Piece {
                    triangle: t,
                    circumcenter: q,
                    midpoint: mids[i],
                    length: distance(q, mids[i]),
                });
                local[i] = s;
            }
            triangle_segments.push(local);
        }
        for s in &mut segments {
            s.on_boundary = s.pieces.len() == 1;
        }
        Ok(DualMesh {
            box_area,
            segments,
            circumcenters,
            triangle_segments,
        })
    }

    /// Area of the box around each vertex.
    pub fn box_areas(&self) -> &[f64] {
        &self.box_area
    }

    pub fn box_area(&self, v: usize) -> f64 {
        self.box_area[v]
    }

    pub fn total_area(&self) -> f64 {
        self.box_area.iter().sum()
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn circumcenters(&self) -> &[Point] {
        &self.circumcenters
    }

    pub fn triangle_segments(&self) -> &[[usize; 3]] {
        &self.triangle_segments
    }

    /// Largest |cos| between a nonzero piece and its primal edge.
    pub fn max_orthogonality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for s in &self.segments {
            for piece in &s.pieces {
                if piece.length <= 1e-14 * s.l_db {
                    continue;
                }
                let d = [
                    piece.midpoint[0] - piece.circumcenter[0],
                    piece.midpoint[1] - piece.circumcenter[1],
                ];
                let cos = (d[0] * s.unit_normal[0] + d[1] * s.unit_normal[1]) / piece.length;
                worst = worst.max(cos.abs());
            }
        }
        worst
    }

    /// Box of vertex `v` as a closed counterclockwise polygon (without
    /// repeating the first point). Consecutive duplicates are merged.
    pub fn box_polygon(&self, mesh: &Mesh, v: usize) -> Vec<Point> {
        // chains m_in -> q -> m_out per incident triangle, keyed by the
        // incoming edge's far vertex
        let mut chains: Vec<(usize, usize, [Point; 3])> = Vec::new();
        for (t, tri) in mesh.triangles().iter().enumerate() {
            let Some(i) = tri.iter().position(|&x| x == v) else {
                continue;
            };
            let next = tri[(i + 1) % 3];
            let prev = tri[(i + 2) % 3];
            let pts = mesh.triangle_points(t);
            let m_next = midpoint(pts[i], pts[(i + 1) % 3]);
            let m_prev = midpoint(pts[i], pts[(i + 2) % 3]);
            chains.push((next, prev, [m_next, self.circumcenters[t], m_prev]));
        }
        let start = chains
            .iter()
            .position(|c| !chains.iter().any(|d| d.1 == c.0))
            .unwrap_or(0);
        let mut polygon = Vec::with_capacity(2 * chains.len() + 1);
        if mesh.is_boundary(v) {
            polygon.push(mesh.vertices()[v]);
        }
        let mut used = vec![false; chains.len()];
        let mut cur = start;
        loop {
            used[cur] = true;
            let (_, out, pts) = chains[cur];
            for p in pts {
                if polygon.last() != Some(&p) {
                    polygon.push(p);
                }
            }
            match chains.iter().enumerate().position(|(j, c)| !used[j] && c.0 == out) {
                Some(j) => cur = j,
                None => break,
            }
        }
        if polygon.len() > 1 && polygon.first() == polygon.last() {
            polygon.pop();
        }
        polygon
    }
}

/// Shoelace area of a simple polygon.
pub fn polygon_area(points: &[Point]) -> f64 {
    let n = points.len();
    (0..n)
        .map(|i| {
            let (a, b) = (points[i], points[(i + 1) % n]);
            a[0] * b[1] - b[0] * a[1]
        })
        .sum::<f64>()
        * 0.5
}
