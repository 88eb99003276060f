//! Discretized domains on uniform Cartesian lattices.
//!
//! Intervals and rectangles are covered exactly by their lattice; the edge
//! nodes form the boundary. Disks live on a cut lattice over the bounding box:
//! a node is *inside* when it lies strictly within the disk, *interior* when it
//! and all of its axis-neighbors are inside, and *boundary* when it is inside
//! with at least one outside axis-neighbor. Boundary normals on the disk come
//! from the analytic level set, not from the staircase.

use crate::error::{Error, Result};

/// A point in up to three dimensions; unused trailing coordinates are zero.
pub type Point = [f64; 3];

pub const MIN_RESOLUTION: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub enum DomainSpec {
    Interval {
        lo: f64,
        hi: f64,
        resolution: usize,
    },
    Rectangle {
        lo: [f64; 2],
        hi: [f64; 2],
        resolution: [usize; 2],
    },
    Disk {
        center: [f64; 2],
        radius: f64,
        resolution: [usize; 2],
    },
}

impl DomainSpec {
    pub fn unit_interval(resolution: usize) -> Self {
        DomainSpec::Interval {
            lo: 0.0,
            hi: 1.0,
            resolution,
        }
    }

    pub fn unit_disk(resolution: usize) -> Self {
        DomainSpec::Disk {
            center: [0.0, 0.0],
            radius: 1.0,
            resolution: [resolution, resolution],
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            DomainSpec::Interval { .. } => 1,
            _ => 2,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            DomainSpec::Interval { .. } => "interval",
            DomainSpec::Rectangle { .. } => "rectangle",
            DomainSpec::Disk { .. } => "disk",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let check_res = |r: usize| {
            if r < MIN_RESOLUTION {
                Err(Error::config(
                    "domain.resolution",
                    format!("need at least {MIN_RESOLUTION} nodes per axis, got {r}"),
                ))
            } else {
                Ok(())
            }
        };
        let check_span = |lo: f64, hi: f64| {
            if !(lo.is_finite() && hi.is_finite() && hi > lo) {
                Err(Error::config(
                    "domain.bounds",
                    format!("degenerate axis bounds [{lo}, {hi}]"),
                ))
            } else {
                Ok(())
            }
        };
        match self {
            DomainSpec::Interval { lo, hi, resolution } => {
                check_res(*resolution)?;
                check_span(*lo, *hi)
            }
            DomainSpec::Rectangle { lo, hi, resolution } => {
                for axis in 0..2 {
                    check_res(resolution[axis])?;
                    check_span(lo[axis], hi[axis])?;
                }
                Ok(())
            }
            DomainSpec::Disk {
                center,
                radius,
                resolution,
            } => {
                resolution.iter().try_for_each(|&r| check_res(r))?;
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::config(
                        "domain.bounds",
                        format!("radius must be positive, got {radius}"),
                    ));
                }
                if !center.iter().all(|c| c.is_finite()) {
                    return Err(Error::config("domain.bounds", "non-finite center"));
                }
                Ok(())
            }
        }
    }

    /// Lattice extent per axis as `(lo, hi, nodes)`.
    fn lattice(&self) -> Vec<(f64, f64, usize)> {
        match self {
            DomainSpec::Interval { lo, hi, resolution } => vec![(*lo, *hi, *resolution)],
            DomainSpec::Rectangle { lo, hi, resolution } => (0..2)
                .map(|a| (lo[a], hi[a], resolution[a]))
                .collect(),
            DomainSpec::Disk {
                center,
                radius,
                resolution,
            } => (0..2)
                .map(|a| (center[a] - radius, center[a] + radius, resolution[a]))
                .collect(),
        }
    }

    /// Whether `x` belongs to the closed box (interval, rectangle) or the open disk.
    pub fn contains(&self, x: &Point) -> bool {
        match self {
            DomainSpec::Interval { lo, hi, .. } => x[0] >= *lo && x[0] <= *hi,
            DomainSpec::Rectangle { lo, hi, .. } => {
                (0..2).all(|a| x[a] >= lo[a] && x[a] <= hi[a])
            }
            DomainSpec::Disk { center, radius, .. } => {
                let dx = x[0] - center[0];
                let dy = x[1] - center[1];
                dx * dx + dy * dy < radius * radius
            }
        }
    }

    /// Distance from `x` to the continuous boundary (negative outside).
    pub fn distance_to_boundary(&self, x: &Point) -> f64 {
        match self {
            DomainSpec::Interval { lo, hi, .. } => (x[0] - lo).min(hi - x[0]),
            DomainSpec::Rectangle { lo, hi, .. } => (0..2)
                .map(|a| (x[a] - lo[a]).min(hi[a] - x[a]))
                .fold(f64::INFINITY, f64::min),
            DomainSpec::Disk { center, radius, .. } => {
                radius - (x[0] - center[0]).hypot(x[1] - center[1])
            }
        }
    }

    pub fn centroid(&self) -> Point {
        match self {
            DomainSpec::Interval { lo, hi, .. } => [0.5 * (lo + hi), 0.0, 0.0],
            DomainSpec::Rectangle { lo, hi, .. } => {
                [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1]), 0.0]
            }
            DomainSpec::Disk { center, .. } => [center[0], center[1], 0.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Interior,
    Boundary,
    Exterior,
}

const NO_SLOT: usize = usize::MAX;

#[derive(Debug, Clone)]
pub struct Grid {
    spec: DomainSpec,
    dim: usize,
    shape: [usize; 3],
    origin: [f64; 3],
    spacing: [f64; 3],
    kinds: Vec<NodeKind>,
    interior: Vec<usize>,
    boundary: Vec<usize>,
    slot: Vec<usize>,
    normals: Vec<Point>,
    offsets: Vec<f64>,
}

/// Builds the lattice, classifies nodes and attaches inward normals.
pub fn build_grid(spec: &DomainSpec) -> Result<Grid> {
    spec.validate()?;
    let lattice = spec.lattice();
    let dim = lattice.len();
    let mut shape = [1usize; 3];
    let mut origin = [0.0; 3];
    let mut spacing = [0.0; 3];
    for (a, &(lo, hi, n)) in lattice.iter().enumerate() {
        shape[a] = n;
        origin[a] = lo;
        spacing[a] = (hi - lo) / (n - 1) as f64;
    }

    let total: usize = shape.iter().product();
    let mut grid = Grid {
        spec: spec.clone(),
        dim,
        shape,
        origin,
        spacing,
        kinds: vec![NodeKind::Exterior; total],
        interior: Vec::new(),
        boundary: Vec::new(),
        slot: vec![NO_SLOT; total],
        normals: Vec::new(),
        offsets: Vec::new(),
    };

    let inside: Vec<bool> = (0..total).map(|n| spec.contains(&grid.coords(n))).collect();
    for node in 0..total {
        if !inside[node] {
            continue;
        }
        let all_inside = (0..dim).all(|axis| {
            [-1isize, 1]
                .iter()
                .all(|&step| grid.neighbor(node, axis, step).is_some_and(|m| inside[m]))
        });
        if all_inside {
            grid.kinds[node] = NodeKind::Interior;
            grid.slot[node] = grid.interior.len();
            grid.interior.push(node);
        } else {
            let (normal, offset) = grid.analytic_normal(node)?;
            grid.kinds[node] = NodeKind::Boundary;
            grid.slot[node] = grid.boundary.len();
            grid.boundary.push(node);
            grid.normals.push(normal);
            grid.offsets.push(offset);
        }
    }
    Ok(grid)
}

impl Grid {
    pub fn spec(&self) -> &DomainSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Total lattice size, exterior nodes included.
    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape[..self.dim]
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing[..self.dim]
    }

    pub fn min_spacing(&self) -> f64 {
        self.spacing().iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn multi_index(&self, node: usize) -> [usize; 3] {
        let i0 = node % self.shape[0];
        let rest = node / self.shape[0];
        [i0, rest % self.shape[1], rest / self.shape[1]]
    }

    pub fn flat_index(&self, idx: [usize; 3]) -> usize {
        idx[0] + self.shape[0] * (idx[1] + self.shape[1] * idx[2])
    }

    pub fn coords(&self, node: usize) -> Point {
        let idx = self.multi_index(node);
        let mut x = [0.0; 3];
        for a in 0..self.dim {
            x[a] = self.origin[a] + idx[a] as f64 * self.spacing[a];
        }
        x
    }

    /// Lattice neighbor `step` nodes away along `axis`, if it exists.
    pub fn neighbor(&self, node: usize, axis: usize, step: isize) -> Option<usize> {
        let mut idx = self.multi_index(node);
        let moved = idx[axis] as isize + step;
        if moved < 0 || moved >= self.shape[axis] as isize {
            return None;
        }
        idx[axis] = moved as usize;
        Some(self.flat_index(idx))
    }

    /// Neighbor displaced by integer steps along several axes at once.
    pub fn offset(&self, node: usize, steps: &[(usize, isize)]) -> Option<usize> {
        let mut idx = self.multi_index(node);
        for &(axis, step) in steps {
            let moved = idx[axis] as isize + step;
            if moved < 0 || moved >= self.shape[axis] as isize {
                return None;
            }
            idx[axis] = moved as usize;
        }
        Some(self.flat_index(idx))
    }

    pub fn kind(&self, node: usize) -> NodeKind {
        self.kinds[node]
    }

    pub fn is_active(&self, node: usize) -> bool {
        self.kinds[node] != NodeKind::Exterior
    }

    /// `neighbor` restricted to interior or boundary nodes.
    pub fn active_neighbor(&self, node: usize, axis: usize, step: isize) -> Option<usize> {
        self.neighbor(node, axis, step).filter(|&m| self.is_active(m))
    }

    pub fn interior_nodes(&self) -> &[usize] {
        &self.interior
    }

    pub fn boundary_nodes(&self) -> &[usize] {
        &self.boundary
    }

    /// Interior and boundary nodes in lattice order.
    pub fn active_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&n| self.is_active(n))
    }

    pub fn count(&self, kind: NodeKind) -> usize {
        self.kinds.iter().filter(|&&k| k == kind).count()
    }

    /// Position of `node` within [`Grid::boundary_nodes`].
    pub fn boundary_ordinal(&self, node: usize) -> Option<usize> {
        (self.kinds[node] == NodeKind::Boundary).then(|| self.slot[node])
    }

    /// Position of `node` within [`Grid::interior_nodes`].
    pub fn interior_ordinal(&self, node: usize) -> Option<usize> {
        (self.kinds[node] == NodeKind::Interior).then(|| self.slot[node])
    }

    /// Unit inward normal at a boundary node.
    pub fn inward_normal(&self, node: usize) -> Result<Point> {
        self.boundary_ordinal(node)
            .map(|b| self.normals[b])
            .ok_or_else(|| {
                Error::Usage(format!(
                    "inward normal requested at {:?} node {node}",
                    self.kinds[node]
                ))
            })
    }

    /// Distance from a boundary node to the continuous boundary, measured
    /// against the inward normal. Zero when the node sits on the boundary.
    pub fn boundary_offset(&self, node: usize) -> Result<f64> {
        self.boundary_ordinal(node)
            .map(|b| self.offsets[b])
            .ok_or_else(|| Error::Usage(format!("node {node} is not a boundary node")))
    }

    /// Active node closest to `x` (ties resolved by lowest index).
    pub fn nearest_active(&self, x: &Point) -> usize {
        let mut best = (f64::INFINITY, 0);
        for n in self.active_nodes() {
            let y = self.coords(n);
            let d: f64 = (0..self.dim).map(|a| (x[a] - y[a]).powi(2)).sum();
            if d < best.0 {
                best = (d, n);
            }
        }
        best.1
    }

    fn analytic_normal(&self, node: usize) -> Result<(Point, f64)> {
        let x = self.coords(node);
        match &self.spec {
            DomainSpec::Disk { center, radius, .. } => {
                let d = [center[0] - x[0], center[1] - x[1]];
                let r = d[0].hypot(d[1]);
                if r == 0.0 {
                    return Err(Error::Stencil {
                        node,
                        reason: "boundary node at the disk center".into(),
                    });
                }
                Ok(([d[0] / r, d[1] / r, 0.0], radius - r))
            }
            _ => {
                let idx = self.multi_index(node);
                let mut nu = [0.0; 3];
                for a in 0..self.dim {
                    if idx[a] == 0 {
                        nu[a] += 1.0;
                    }
                    if idx[a] + 1 == self.shape[a] {
                        nu[a] -= 1.0;
                    }
                }
                let norm = nu.iter().map(|v| v * v).sum::<f64>().sqrt();
                if norm == 0.0 {
                    return Err(Error::Stencil {
                        node,
                        reason: "edge node without a face normal".into(),
                    });
                }
                Ok((nu.map(|v| v / norm), 0.0))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_endpoints_and_normals() {
        let g = build_grid(&DomainSpec::unit_interval(11)).unwrap();
        assert_eq!(g.len(), 11);
        assert!((g.spacing()[0] - 0.1).abs() < 1e-15);
        assert_eq!(g.boundary_nodes(), &[0, 10]);
        assert_eq!(g.inward_normal(0).unwrap()[0], 1.0);
        assert_eq!(g.inward_normal(10).unwrap()[0], -1.0);
        assert_eq!(g.count(NodeKind::Interior), 9);
    }

    #[test]
    fn square_counts_and_corner_normal() {
        let spec = DomainSpec::Rectangle {
            lo: [0.0, 0.0],
            hi: [1.0, 1.0],
            resolution: [5, 5],
        };
        let g = build_grid(&spec).unwrap();
        assert_eq!(g.len(), 25);
        assert_eq!(g.count(NodeKind::Interior), 9);
        assert_eq!(g.count(NodeKind::Boundary), 16);
        assert_eq!(g.count(NodeKind::Exterior), 0);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let nu = g.inward_normal(0).unwrap();
        assert!((nu[0] - s).abs() < 1e-15 && (nu[1] - s).abs() < 1e-15);
        let top_right = g.flat_index([4, 4, 0]);
        let nu = g.inward_normal(top_right).unwrap();
        assert!((nu[0] + s).abs() < 1e-15 && (nu[1] + s).abs() < 1e-15);
        // face x₁ = 0
        let face = g.flat_index([0, 2, 0]);
        assert_eq!(g.inward_normal(face).unwrap(), [1.0, 0.0, 0.0]);
    }

    #[test]
    fn disk_rightmost_boundary_node_points_left() {
        let g = build_grid(&DomainSpec::unit_disk(41)).unwrap();
        // brute-force: inside lattice node nearest (1, 0)
        let mut best = (f64::INFINITY, 0);
        for n in 0..g.len() {
            let x = g.coords(n);
            if x[0] * x[0] + x[1] * x[1] < 1.0 {
                let d = (x[0] - 1.0).powi(2) + x[1].powi(2);
                if d < best.0 {
                    best = (d, n);
                }
            }
        }
        let node = best.1;
        assert!((g.coords(node)[0] - 0.95).abs() < 1e-12);
        assert_eq!(g.kind(node), NodeKind::Boundary);
        let nu = g.inward_normal(node).unwrap();
        assert!((nu[0] + 1.0).abs() < 1e-15 && nu[1].abs() < 1e-15);
        assert!((g.boundary_offset(node).unwrap() - 0.05).abs() < 1e-12);
    }

    #[test]
    fn normal_queries_reject_non_boundary_nodes() {
        let g = build_grid(&DomainSpec::unit_disk(21)).unwrap();
        let center = g.nearest_active(&[0.0; 3]);
        assert!(matches!(g.inward_normal(center), Err(Error::Usage(_))));
        assert!(matches!(g.inward_normal(0), Err(Error::Usage(_))));
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(matches!(
            build_grid(&DomainSpec::unit_interval(4)),
            Err(Error::Config { .. })
        ));
        let flat = DomainSpec::Interval {
            lo: 1.0,
            hi: 1.0,
            resolution: 9,
        };
        assert!(matches!(build_grid(&flat), Err(Error::Config { .. })));
        let disk = DomainSpec::Disk {
            center: [0.0, 0.0],
            radius: 0.0,
            resolution: [9, 9],
        };
        assert!(matches!(build_grid(&disk), Err(Error::Config { .. })));
    }

    #[test]
    fn disk_normals_are_unit_and_inward() {
        let g = build_grid(&DomainSpec::unit_disk(33)).unwrap();
        for &b in g.boundary_nodes() {
            let nu = g.inward_normal(b).unwrap();
            let x = g.coords(b);
            assert!(((nu[0].hypot(nu[1])) - 1.0).abs() < 1e-14);
            assert!(-(nu[0] * x[0] + nu[1] * x[1]) > 0.0);
        }
        for &i in g.interior_nodes() {
            for axis in 0..2 {
                for step in [-1, 1] {
                    assert!(g.active_neighbor(i, axis, step).is_some());
                }
            }
        }
    }
}
