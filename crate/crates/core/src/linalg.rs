//! Compressed sparse row storage and a conjugate-gradient solver.

use std::fmt::Write as _;

use crate::error::SolverError;

/// Square sparse matrix in CSR layout.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    dim: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
    symmetric: bool,
}

impl SparseOperator {
    /// Builds from `(row, col, value)` triplets; duplicates are summed in
    /// the order given, so the result is deterministic.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, f64)>, symmetric: bool) -> Self {
        // stable sort keeps insertion order among duplicates
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_offsets = vec![0usize; dim + 1];
        let mut col_indices = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            assert!(r < dim && c < dim, "triplet ({r}, {c}) outside {dim}x{dim}");
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_indices.push(c);
                values.push(v);
                row_offsets[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..dim {
            row_offsets[r + 1] += row_offsets[r];
        }
        SparseOperator {
            dim,
            row_offsets,
            col_indices,
            values,
            symmetric,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_triplets(dim, (0..dim).map(|i| (i, i, 1.0)).collect(), true)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_offsets[r]..self.row_offsets[r + 1];
        self.col_indices[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.row(r).find(|&(j, _)| j == c).map_or(0.0, |(_, v)| v)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim];
        self.apply(x, &mut y);
        y
    }

    /// xᵀ A y.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        dot(x, &self.mul_vec(y))
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.dim]; self.dim];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, v) in self.row(r) {
                row[c] += v;
            }
        }
        out
    }

    /// max |A_ij − A_ji| / max |A_ij|.
    pub fn symmetry_defect(&self) -> f64 {
        let scale = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                worst = worst.max((v - self.get(c, r)).abs());
            }
        }
        worst / scale
    }

    /// Row subset/column subset restricted to `keep` (in the given order).
    pub fn restrict(&self, keep: &[usize]) -> SparseOperator {
        let mut new_index = vec![usize::MAX; self.dim];
        for (i, &k) in keep.iter().enumerate() {
            new_index[k] = i;
        }
        let mut triplets = Vec::new();
        for (i, &k) in keep.iter().enumerate() {
            for (c, v) in self.row(k) {
                if new_index[c] != usize::MAX {
                    triplets.push((i, new_index[c], v));
                }
            }
        }
        Self::from_triplets(keep.len(), triplets, self.symmetric)
    }

    /// Coordinate text dump, one `row col value` line per stored entry.
    pub fn to_coordinate_text(&self) -> String {
        let mut out = String::new();
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                let _ = writeln!(out, "{r} {c} {v:e}");
            }
        }
        out
    }
}

/// Strictly diagonal operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalOperator {
    pub entries: Vec<f64>,
}

impl DiagonalOperator {
    pub fn dim(&self) -> usize {
        self.entries.len()
    }
}

/// Anything that can compute `y = A x` for a symmetric positive definite `A`.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

impl LinearOperator for SparseOperator {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (r, out) in y.iter_mut().enumerate() {
            let range = self.row_offsets[r]..self.row_offsets[r + 1];
            *out = self.col_indices[range.clone()]
                .iter()
                .zip(&self.values[range])
                .map(|(&c, &v)| v * x[c])
                .sum();
        }
    }
}

impl LinearOperator for DiagonalOperator {
    fn dim(&self) -> usize {
        self.entries.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for ((o, d), xi) in y.iter_mut().zip(&self.entries).zip(x) {
            *o = d * xi;
        }
    }
}

/// `diag(shift) + A`, e.g. `D/τ + A` in an implicit time step.
pub struct Shifted<'a> {
    pub shift: &'a [f64],
    pub operator: &'a SparseOperator,
}

impl LinearOperator for Shifted<'_> {
    fn dim(&self) -> usize {
        self.operator.dim()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.operator.apply(x, y);
        for ((o, s), xi) in y.iter_mut().zip(self.shift).zip(x) {
            *o += s * xi;
        }
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CgOutcome {
    pub solution: Vec<f64>,
    pub iterations: usize,
    /// ‖A x − b‖ / ‖b‖ at exit.
    pub relative_residual: f64,
}

/// Unpreconditioned conjugate gradients from `x0` (zero when `None`),
/// stopping once ‖A x − b‖ ≤ `tol`·‖b‖.
pub fn cg_solve<A: LinearOperator + ?Sized>(
    a: &A,
    b: &[f64],
    x0: Option<&[f64]>,
    tol: f64,
    max_iters: usize,
) -> Result<CgOutcome, SolverError> {
    let n = a.dim();
    assert_eq!(b.len(), n, "right-hand side length");
    let b_norm = norm2(b);
    if b_norm == 0.0 {
        return Ok(CgOutcome {
            solution: vec![0.0; n],
            iterations: 0,
            relative_residual: 0.0,
        });
    }
    let mut x = x0.map_or_else(|| vec![0.0; n], <[f64]>::to_vec);
    let mut ax = vec![0.0; n];
    a.apply(&x, &mut ax);
    let mut r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
    let mut rs = dot(&r, &r);
    if rs.sqrt() <= tol * b_norm {
        return Ok(CgOutcome {
            solution: x,
            iterations: 0,
            relative_residual: rs.sqrt() / b_norm,
        });
    }
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    for it in 1..=max_iters {
        a.apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            // not positive definite along p
            return Err(SolverError::CgNotConverged {
                iterations: it,
                residual: rs.sqrt() / b_norm,
            });
        }
        let alpha = rs / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rs_new = dot(&r, &r);
        if rs_new.sqrt() <= tol * b_norm {
            return Ok(CgOutcome {
                solution: x,
                iterations: it,
                relative_residual: rs_new.sqrt() / b_norm,
            });
        }
        let beta = rs_new / rs;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
        rs = rs_new;
    }
    Err(SolverError::CgNotConverged {
        iterations: max_iters,
        residual: rs.sqrt() / b_norm,
    })
}
