//! Finite-difference stencils as sparse linear functionals of nodal values.
//!
//! Every stencil here is exact on quadratic polynomials. Interior Hessians use
//! the standard three-point second differences on the diagonal. Mixed
//! derivatives use the four-corner cross when all corners are inside the
//! domain; near a cut boundary they fall back to a seven-point diagonal
//! stencil or a half-shifted cross, whichever fits.

use crate::domain::{Grid, NodeKind};
use crate::error::{Error, Result};
use crate::operators::{tri, SymMatrix};

/// Sparse rows of `(node, weight)` pairs stored contiguously.
#[derive(Debug, Clone)]
pub struct SparseRows<W> {
    start: Vec<usize>,
    entries: Vec<(usize, W)>,
}

impl<W: Copy> SparseRows<W> {
    fn new() -> Self {
        SparseRows {
            start: vec![0],
            entries: Vec::new(),
        }
    }

    fn push_row(&mut self, row: Vec<(usize, W)>) {
        self.entries.extend(row);
        self.start.push(self.entries.len());
    }

    pub fn row(&self, i: usize) -> &[(usize, W)] {
        &self.entries[self.start[i]..self.start[i + 1]]
    }

    pub fn len(&self) -> usize {
        self.start.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub(crate) fn accumulate<const K: usize>(row: &mut Vec<(usize, [f64; K])>, node: usize, w: [f64; K]) {
    if let Some((_, acc)) = row.iter_mut().find(|(n, _)| *n == node) {
        for (a, b) in acc.iter_mut().zip(w) {
            *a += b;
        }
    } else {
        row.push((node, w));
    }
}

fn slot6(i: usize, j: usize, v: f64) -> [f64; 6] {
    let mut w = [0.0; 6];
    w[tri(i, j)] = v;
    w
}

fn slot3(i: usize, v: f64) -> [f64; 3] {
    let mut w = [0.0; 3];
    w[i] = v;
    w
}

fn require_interior(grid: &Grid, node: usize) -> Result<()> {
    match grid.kind(node) {
        NodeKind::Interior => Ok(()),
        k => Err(Error::Usage(format!(
            "central stencil requested at {k:?} node {node}"
        ))),
    }
}

fn axis_neighbors(grid: &Grid, node: usize, axis: usize) -> Result<(usize, usize)> {
    match (
        grid.active_neighbor(node, axis, -1),
        grid.active_neighbor(node, axis, 1),
    ) {
        (Some(m), Some(p)) => Ok((m, p)),
        _ => Err(Error::Stencil {
            node,
            reason: format!("missing axis-{axis} neighbor"),
        }),
    }
}

/// Central-difference gradient at an interior node.
pub fn gradient_row(grid: &Grid, node: usize) -> Result<Vec<(usize, [f64; 3])>> {
    require_interior(grid, node)?;
    let mut row = Vec::new();
    for axis in 0..grid.dim() {
        let h = grid.spacing()[axis];
        let (m, p) = axis_neighbors(grid, node, axis)?;
        accumulate(&mut row, p, slot3(axis, 0.5 / h));
        accumulate(&mut row, m, slot3(axis, -0.5 / h));
    }
    Ok(row)
}

/// Hessian stencil at an interior node; weights are packed upper triangles.
pub fn hessian_row(grid: &Grid, node: usize) -> Result<Vec<(usize, [f64; 6])>> {
    require_interior(grid, node)?;
    let dim = grid.dim();
    let mut row = Vec::new();
    let mut nbr = [(0usize, 0usize); 3];
    for (axis, slot) in nbr.iter_mut().enumerate().take(dim) {
        let h = grid.spacing()[axis];
        let (m, p) = axis_neighbors(grid, node, axis)?;
        *slot = (m, p);
        let inv = 1.0 / (h * h);
        accumulate(&mut row, m, slot6(axis, axis, inv));
        accumulate(&mut row, p, slot6(axis, axis, inv));
        accumulate(&mut row, node, slot6(axis, axis, -2.0 * inv));
    }
    for a in 0..dim {
        for b in (a + 1)..dim {
            let corner = |sa: isize, sb: isize| {
                grid.offset(node, &[(a, sa), (b, sb)])
                    .filter(|&n| grid.is_active(n))
            };
            let (pp, mm, pm, mp) = (corner(1, 1), corner(-1, -1), corner(1, -1), corner(-1, 1));
            let hab = grid.spacing()[a] * grid.spacing()[b];
            let (am, ap) = nbr[a];
            let (bm, bp) = nbr[b];
            let mut put = |n: usize, coef: f64| accumulate(&mut row, n, slot6(a, b, coef));
            match (pp, mm, pm, mp) {
                (Some(pp), Some(mm), Some(pm), Some(mp)) => {
                    let c = 0.25 / hab;
                    put(pp, c);
                    put(mm, c);
                    put(pm, -c);
                    put(mp, -c);
                }
                (Some(pp), Some(mm), _, _) => {
                    let c = 0.5 / hab;
                    put(pp, c);
                    put(mm, c);
                    put(node, 2.0 * c);
                    for n in [am, ap, bm, bp] {
                        put(n, -c);
                    }
                }
                (_, _, Some(pm), Some(mp)) => {
                    let c = 0.5 / hab;
                    put(pm, -c);
                    put(mp, -c);
                    put(node, -2.0 * c);
                    for n in [am, ap, bm, bp] {
                        put(n, c);
                    }
                }
                _ => {
                    let c = 0.5 / hab;
                    // half-shifted crosses: (outer pair) − (inner pair)
                    if let (Some(pp), Some(pm)) = (pp, pm) {
                        put(pp, c);
                        put(pm, -c);
                        put(bp, -c);
                        put(bm, c);
                    } else if let (Some(mp), Some(mm)) = (mp, mm) {
                        put(bp, c);
                        put(bm, -c);
                        put(mp, -c);
                        put(mm, c);
                    } else if let (Some(pp), Some(mp)) = (pp, mp) {
                        put(pp, c);
                        put(mp, -c);
                        put(ap, -c);
                        put(am, c);
                    } else if let (Some(pm), Some(mm)) = (pm, mm) {
                        put(ap, c);
                        put(am, -c);
                        put(pm, -c);
                        put(mm, c);
                    } else {
                        return Err(Error::Stencil {
                            node,
                            reason: format!("no mixed-derivative stencil for axes ({a}, {b})"),
                        });
                    }
                }
            }
        }
    }
    Ok(row)
}

#[inline]
pub fn apply_hessian(row: &[(usize, [f64; 6])], u: &[f64], dim: usize) -> SymMatrix {
    let mut acc = [0.0; 6];
    for &(n, w) in row {
        let v = u[n];
        for k in 0..6 {
            acc[k] += w[k] * v;
        }
    }
    SymMatrix::from_packed(dim, acc)
}

#[inline]
pub fn apply_vector(row: &[(usize, [f64; 3])], u: &[f64]) -> [f64; 3] {
    let mut acc = [0.0; 3];
    for &(n, w) in row {
        let v = u[n];
        for k in 0..3 {
            acc[k] += w[k] * v;
        }
    }
    acc
}

/// Precomputed gradient and Hessian stencils for every interior node,
/// indexed by interior ordinal.
#[derive(Debug, Clone)]
pub struct Stencils {
    dim: usize,
    hessian: SparseRows<[f64; 6]>,
    gradient: SparseRows<[f64; 3]>,
}

impl Stencils {
    pub fn build(grid: &Grid) -> Result<Self> {
        let mut hessian = SparseRows::new();
        let mut gradient = SparseRows::new();
        for &node in grid.interior_nodes() {
            hessian.push_row(hessian_row(grid, node)?);
            gradient.push_row(gradient_row(grid, node)?);
        }
        Ok(Stencils {
            dim: grid.dim(),
            hessian,
            gradient,
        })
    }

    pub fn hessian_row(&self, ordinal: usize) -> &[(usize, [f64; 6])] {
        self.hessian.row(ordinal)
    }

    #[inline]
    pub fn hessian(&self, ordinal: usize, u: &[f64]) -> SymMatrix {
        apply_hessian(self.hessian.row(ordinal), u, self.dim)
    }

    #[inline]
    pub fn gradient(&self, ordinal: usize, u: &[f64]) -> [f64; 3] {
        apply_vector(self.gradient.row(ordinal), u)
    }
}
