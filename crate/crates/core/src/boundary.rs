//! Oblique boundary conditions h(Du, x) = 0 and their enforcement.
//!
//! The discrete gradient at a boundary node is a linear functional of nodal
//! values:
//!
//! * along the dominant axis of the inward normal, the one-sided three-point
//!   difference pointing into the domain;
//! * along the other axes, central differences where both neighbors exist and
//!   one-sided differences otherwise;
//! * on cut-lattice domains the node sits a distance `d` inside the continuous
//!   boundary, and the gradient is carried out to the boundary with the
//!   Hessian of the nearest interior node: `Du(x − dν) ≈ Du(x) − d·D²u·ν`.
//!
//! With the other nodes frozen, h becomes a scalar function of the boundary
//! node's own value, solved by Newton's method. Boundary nodes whose stencils
//! read each other are resolved by repeating Jacobi sweeps to a fixed point.

use crate::domain::{Grid, NodeKind, Point};
use crate::error::{Error, Result};
use crate::operators::GAUSS_LEGENDRE_5;
use crate::stencil::{accumulate, hessian_row};

pub const NEWTON_MAX_ITERATIONS: usize = 50;
/// |β·ν| at or below this value is treated as a degenerate condition.
pub const DEGENERACY_TOL: f64 = 1e-8;
/// Required max |h| after enforcement.
pub const RESIDUAL_TOL: f64 = 1e-10;
const NEWTON_TOL: f64 = 1e-13;
const MAX_SWEEPS: usize = 500;

#[derive(Debug, Clone, PartialEq)]
pub enum BoundarySpec {
    /// u′ = alpha at the left end and u′ = beta at the right end of an interval.
    Flux1d { alpha: f64, beta: f64 },
    /// Du·ν = φ. A single value applies to every boundary node; otherwise one
    /// value per boundary node in [`Grid::boundary_nodes`] order.
    Neumann { phi: Vec<f64> },
    /// Du(Ω) = disk of radius R about the origin, via h(p) = |p|² − R².
    TargetDisk { radius: f64 },
}

/// Location data handed to h and its derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub node: usize,
    pub ordinal: usize,
    pub dim: usize,
    pub x: Point,
    pub normal: Point,
}

impl BoundaryPoint {
    pub fn of(grid: &Grid, node: usize) -> Result<Self> {
        let ordinal = grid
            .boundary_ordinal(node)
            .ok_or_else(|| Error::Usage(format!("node {node} is not a boundary node")))?;
        Ok(BoundaryPoint {
            node,
            ordinal,
            dim: grid.dim(),
            x: grid.coords(node),
            normal: grid.inward_normal(node)?,
        })
    }
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

impl BoundarySpec {
    pub fn kind_name(&self) -> &'static str {
        match self {
            BoundarySpec::Flux1d { .. } => "flux1d",
            BoundarySpec::Neumann { .. } => "neumann",
            BoundarySpec::TargetDisk { .. } => "target_disk",
        }
    }

    pub fn validate(&self, grid: &Grid) -> Result<()> {
        match self {
            BoundarySpec::Flux1d { alpha, beta } => {
                if grid.dim() != 1 {
                    return Err(Error::config(
                        "boundary.kind",
                        "flux1d applies only to interval domains",
                    ));
                }
                if !(alpha.is_finite() && beta.is_finite()) {
                    return Err(Error::config("boundary.alpha", "non-finite flux"));
                }
            }
            BoundarySpec::Neumann { phi } => {
                let n = grid.boundary_nodes().len();
                if phi.len() != 1 && phi.len() != n {
                    return Err(Error::config(
                        "boundary.phi",
                        format!("expected 1 or {n} values, got {}", phi.len()),
                    ));
                }
                if phi.iter().any(|v| !v.is_finite()) {
                    return Err(Error::config("boundary.phi", "non-finite value"));
                }
            }
            BoundarySpec::TargetDisk { radius } => {
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::config(
                        "boundary.radius",
                        format!("target radius must be positive, got {radius}"),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn h_value(&self, p: &[f64; 3], at: &BoundaryPoint) -> Result<f64> {
        Ok(match self {
            BoundarySpec::Flux1d { alpha, beta } => {
                if at.dim != 1 {
                    return Err(Error::config(
                        "boundary.kind",
                        "flux1d evaluated on a non-interval domain",
                    ));
                }
                if at.normal[0] > 0.0 {
                    p[0] - alpha
                } else {
                    p[0] - beta
                }
            }
            BoundarySpec::Neumann { phi } => {
                let v = if phi.len() == 1 { phi[0] } else { phi[at.ordinal] };
                dot(p, &at.normal) - v
            }
            BoundarySpec::TargetDisk { radius } => dot(p, p) - radius * radius,
        })
    }

    /// ∇ₚh, exact.
    pub fn h_gradient(&self, p: &[f64; 3], at: &BoundaryPoint) -> [f64; 3] {
        match self {
            BoundarySpec::Flux1d { .. } => [1.0, 0.0, 0.0],
            BoundarySpec::Neumann { .. } => at.normal,
            BoundarySpec::TargetDisk { .. } => p.map(|v| 2.0 * v),
        }
    }

    /// Signed ∇ₚh·ν. Callers treat |value| ≤ [`DEGENERACY_TOL`] as lost obliqueness.
    pub fn obliqueness(&self, p: &[f64; 3], at: &BoundaryPoint) -> f64 {
        dot(&self.h_gradient(p, at), &at.normal)
    }

    /// Averaged vector ∫₀¹ ∇ₚh(s·p + (1 − s)·q) ds of the linear boundary
    /// condition satisfied by the difference of two solutions.
    pub fn frozen_gradient(&self, p: &[f64; 3], q: &[f64; 3], at: &BoundaryPoint) -> [f64; 3] {
        let mut acc = [0.0; 3];
        for (s, w) in GAUSS_LEGENDRE_5 {
            let m = [0, 1, 2].map(|k| s * p[k] + (1.0 - s) * q[k]);
            let g = self.h_gradient(&m, at);
            for k in 0..3 {
                acc[k] += w * g[k];
            }
        }
        acc
    }
}

#[derive(Debug, Clone)]
struct NodeRule {
    at: BoundaryPoint,
    /// coefficient of the node's own value in the discrete gradient
    own: [f64; 3],
    /// remaining `(node, weight)` terms
    others: Vec<(usize, [f64; 3])>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EnforceStats {
    pub sweeps: usize,
    pub max_residual: f64,
}

/// Boundary gradient stencils and the Newton/Jacobi solver for one grid.
#[derive(Debug, Clone)]
pub struct Enforcer {
    spec: BoundarySpec,
    rules: Vec<NodeRule>,
    coupled: bool,
}

impl Enforcer {
    pub fn new(spec: &BoundarySpec, grid: &Grid) -> Result<Self> {
        spec.validate(grid)?;
        let mut rules = Vec::with_capacity(grid.boundary_nodes().len());
        for &node in grid.boundary_nodes() {
            let at = BoundaryPoint::of(grid, node)?;
            let row = boundary_gradient_row(grid, node)?;
            let mut own = [0.0; 3];
            let mut others = Vec::with_capacity(row.len());
            for (n, w) in row {
                if n == node {
                    own = w;
                } else {
                    others.push((n, w));
                }
            }
            rules.push(NodeRule { at, own, others });
        }
        let coupled = rules.iter().any(|r| {
            r.others
                .iter()
                .any(|&(n, _)| grid.kind(n) == NodeKind::Boundary)
        });
        Ok(Enforcer {
            spec: spec.clone(),
            rules,
            coupled,
        })
    }

    pub fn spec(&self) -> &BoundarySpec {
        &self.spec
    }

    pub fn points(&self) -> impl Iterator<Item = &BoundaryPoint> {
        self.rules.iter().map(|r| &r.at)
    }

    #[inline]
    fn partial(rule: &NodeRule, u: &[f64]) -> [f64; 3] {
        let mut p = [0.0; 3];
        for &(n, w) in &rule.others {
            let v = u[n];
            for k in 0..3 {
                p[k] += w[k] * v;
            }
        }
        p
    }

    /// Discrete gradient at the `ordinal`-th boundary node.
    pub fn gradient(&self, ordinal: usize, u: &[f64]) -> [f64; 3] {
        let rule = &self.rules[ordinal];
        let p0 = Self::partial(rule, u);
        let ub = u[rule.at.node];
        [0, 1, 2].map(|k| p0[k] + rule.own[k] * ub)
    }

    /// max |h(Du, x)| over boundary nodes.
    pub fn max_residual(&self, u: &[f64]) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (i, rule) in self.rules.iter().enumerate() {
            let h = self.spec.h_value(&self.gradient(i, u), &rule.at)?;
            worst = worst.max(h.abs());
        }
        Ok(worst)
    }

    /// min |∇ₚh·ν| over boundary nodes at state `u`.
    pub fn min_obliqueness(&self, u: &[f64]) -> f64 {
        self.rules
            .iter()
            .enumerate()
            .map(|(i, r)| self.spec.obliqueness(&self.gradient(i, u), &r.at).abs())
            .fold(f64::INFINITY, f64::min)
    }

    /// min |β̄·ν| with β̄ the averaged gradient between two states.
    pub fn min_frozen_obliqueness(&self, u0: &[f64], u1: &[f64]) -> f64 {
        self.rules
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let beta = self
                    .spec
                    .frozen_gradient(&self.gradient(i, u0), &self.gradient(i, u1), &r.at);
                dot(&beta, &r.at.normal).abs()
            })
            .fold(f64::INFINITY, f64::min)
    }

    fn solve_node(&self, rule: &NodeRule, p0: &[f64; 3], start: f64) -> Result<f64> {
        let node = rule.at.node;
        let mut ub = start;
        let mut residual = f64::NAN;
        for _ in 0..NEWTON_MAX_ITERATIONS {
            let p = [0, 1, 2].map(|k| p0[k] + rule.own[k] * ub);
            residual = self.spec.h_value(&p, &rule.at)?;
            let beta = self.spec.h_gradient(&p, &rule.at);
            let oblique = dot(&beta, &rule.at.normal).abs();
            if !(oblique > DEGENERACY_TOL) {
                return Err(Error::Degenerate {
                    node,
                    obliqueness: oblique,
                });
            }
            if residual.abs() <= NEWTON_TOL {
                return Ok(ub);
            }
            let slope = dot(&beta, &rule.own);
            if !(slope.abs() > 0.0) || !slope.is_finite() {
                return Err(Error::Degenerate {
                    node,
                    obliqueness: oblique,
                });
            }
            let step = residual / slope;
            ub -= step;
            if !ub.is_finite() {
                break;
            }
            if step.abs() <= 4.0 * f64::EPSILON * (1.0 + ub.abs()) {
                return Ok(ub);
            }
        }
        Err(Error::BoundaryEnforcement { node, residual })
    }

    /// Adjusts boundary values in place until every boundary node satisfies
    /// |h| ≤ [`RESIDUAL_TOL`]. Interior values are never touched.
    pub fn enforce(&self, u: &mut [f64]) -> Result<EnforceStats> {
        let mut next = vec![0.0; self.rules.len()];
        let mut sweeps = 0;
        loop {
            sweeps += 1;
            for (slot, rule) in next.iter_mut().zip(&self.rules) {
                let p0 = Self::partial(rule, u);
                *slot = self.solve_node(rule, &p0, u[rule.at.node])?;
            }
            let mut change: f64 = 0.0;
            let mut scale: f64 = 0.0;
            let mut worst = 0;
            for (i, (&v, rule)) in next.iter().zip(&self.rules).enumerate() {
                let d = (v - u[rule.at.node]).abs();
                if d > change {
                    change = d;
                    worst = i;
                }
                scale = scale.max(v.abs());
                u[rule.at.node] = v;
            }
            if !self.coupled || change <= 1e-14 * (1.0 + scale) {
                break;
            }
            if sweeps >= MAX_SWEEPS {
                let rule = &self.rules[worst];
                let residual = self.spec.h_value(&self.gradient(worst, u), &rule.at)?;
                return Err(Error::BoundaryEnforcement {
                    node: rule.at.node,
                    residual,
                });
            }
        }
        let mut max_residual: f64 = 0.0;
        for (i, rule) in self.rules.iter().enumerate() {
            let h = self.spec.h_value(&self.gradient(i, u), &rule.at)?;
            if !(h.abs() <= RESIDUAL_TOL) {
                return Err(Error::BoundaryEnforcement {
                    node: rule.at.node,
                    residual: h,
                });
            }
            max_residual = max_residual.max(h.abs());
        }
        Ok(EnforceStats {
            sweeps,
            max_residual,
        })
    }
}

/// One-shot enforcement returning the adjusted state.
pub fn enforce(spec: &BoundarySpec, grid: &Grid, u: &[f64]) -> Result<Vec<f64>> {
    let enforcer = Enforcer::new(spec, grid)?;
    let mut out = u.to_vec();
    enforcer.enforce(&mut out)?;
    Ok(out)
}

/// Discrete gradient functional at a boundary node (see module docs).
pub fn boundary_gradient_row(grid: &Grid, node: usize) -> Result<Vec<(usize, [f64; 3])>> {
    let nu = grid.inward_normal(node)?;
    let dim = grid.dim();
    let mut k = 0;
    for a in 1..dim {
        if nu[a].abs() > nu[k].abs() {
            k = a;
        }
    }
    let s: isize = if nu[k] >= 0.0 { 1 } else { -1 };
    let mut row: Vec<(usize, [f64; 3])> = Vec::new();
    let unit = |axis: usize, v: f64| {
        let mut w = [0.0; 3];
        w[axis] = v;
        w
    };

    let one_sided = |row: &mut Vec<(usize, [f64; 3])>, axis: usize, dir: isize| -> bool {
        let h = grid.spacing()[axis];
        let sf = dir as f64;
        match grid.active_neighbor(node, axis, dir) {
            Some(n1) => {
                match grid.offset(node, &[(axis, 2 * dir)]).filter(|&n| grid.is_active(n)) {
                    Some(n2) => {
                        accumulate(row, node, unit(axis, -1.5 * sf / h));
                        accumulate(row, n1, unit(axis, 2.0 * sf / h));
                        accumulate(row, n2, unit(axis, -0.5 * sf / h));
                    }
                    None => {
                        accumulate(row, node, unit(axis, -sf / h));
                        accumulate(row, n1, unit(axis, sf / h));
                    }
                }
                true
            }
            None => false,
        }
    };

    if !one_sided(&mut row, k, s) {
        return Err(Error::Stencil {
            node,
            reason: "no inward neighbor along the dominant normal axis".into(),
        });
    }
    for j in (0..dim).filter(|&j| j != k) {
        let h = grid.spacing()[j];
        match (
            grid.active_neighbor(node, j, -1),
            grid.active_neighbor(node, j, 1),
        ) {
            (Some(m), Some(p)) => {
                accumulate(&mut row, p, unit(j, 0.5 / h));
                accumulate(&mut row, m, unit(j, -0.5 / h));
            }
            (None, Some(_)) => {
                one_sided(&mut row, j, 1);
            }
            (Some(_), None) => {
                one_sided(&mut row, j, -1);
            }
            (None, None) => {
                // borrow the transverse derivative of the inward neighbor
                let inner = grid.active_neighbor(node, k, s).unwrap();
                if let (Some(m), Some(p)) = (
                    grid.active_neighbor(inner, j, -1),
                    grid.active_neighbor(inner, j, 1),
                ) {
                    accumulate(&mut row, p, unit(j, 0.5 / h));
                    accumulate(&mut row, m, unit(j, -0.5 / h));
                }
            }
        }
    }

    let offset = grid.boundary_offset(node)?;
    if offset > 0.0 {
        let mut probe = node;
        let hnode = loop {
            probe = grid.active_neighbor(probe, k, s).ok_or_else(|| Error::Stencil {
                node,
                reason: "no interior node along the inward normal".into(),
            })?;
            if grid.kind(probe) == NodeKind::Interior {
                break probe;
            }
        };
        for (n, w6) in hessian_row(grid, hnode)? {
            let mut w = [0.0; 3];
            for (i, wi) in w.iter_mut().enumerate().take(dim) {
                *wi = -offset
                    * (0..dim)
                        .map(|j| w6[crate::operators::tri(i, j)] * nu[j])
                        .sum::<f64>();
            }
            accumulate(&mut row, n, w);
        }
    }
    Ok(row)
}
