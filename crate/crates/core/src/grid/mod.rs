//! Slit-aware uniform grids on boxes in `R^{n+1}`.
//!
//! The ambient dimension is `n + 1` with `n ∈ {1, 2}`; the last coordinate
//! `x_{n+1}` is the "vertical" one. Distinguished sets:
//!
//! * the slit hyperplane `{x_{n+1} = 0}` (carries the thin energy term),
//! * the half-hyperplane `P = {x_n ≤ 0, x_{n+1} = 0}`,
//! * its edge `L = {x_n = 0, x_{n+1} = 0}`.
//!
//! Points are `[F; 3]` with unused trailing components equal to zero, so the
//! same code paths serve both ambient dimensions. Grids are immutable after
//! construction and shared behind `Arc` by fields and masks.

mod field;
mod mask;

pub use field::ScalarField;
pub use mask::{distance_to_sets, nearest_interface, DistanceFields, Interface, SlitMask};

use crate::error::{Error, Result};
use crate::scalar::Real;
use std::sync::Arc;

/// A point in the ambient space; components past `n+1` are zero.
pub type Point<F> = [F; 3];

/// Euclidean norm of a point.
pub fn norm<F: Real>(p: Point<F>) -> F {
    (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt()
}

/// Euclidean distance between points.
pub fn dist<F: Real>(a: Point<F>, b: Point<F>) -> F {
    let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    norm(d)
}

/// Disjoint node classification.
///
/// Slit membership takes precedence: a node with `x_{n+1} = 0` is `Slit`
/// even when it also sits on a box face (solvers ask [`SlitGrid::is_box_boundary`]
/// separately when they need the Dirichlet set).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeClass {
    Interior,
    Slit,
    Boundary,
}

/// Uniform grid on `[-halfwidth, halfwidth]^{n+1}` resolving the slit exactly.
#[derive(Debug)]
pub struct SlitGrid<F> {
    n: usize,
    h: F,
    halfwidth: F,
    /// nodes from the center to an edge along one axis
    m: usize,
    /// nodes per axis, `2m + 1`
    per_axis: usize,
}

impl<F: Real> SlitGrid<F> {
    /// Builds the grid; `halfwidth` must be an exact multiple of `h`.
    pub fn new(n: usize, h: F, halfwidth: F) -> Result<Arc<Self>> {
        if !(n == 1 || n == 2) {
            return Err(Error::Config(format!("slit dimension must be 1 or 2, got {n}")));
        }
        if !(h > F::zero()) || !h.is_finite() {
            return Err(Error::Config(format!("spacing must be positive, got {}", h.as_f64())));
        }
        if !(halfwidth > F::zero()) || !halfwidth.is_finite() {
            return Err(Error::Config(format!(
                "halfwidth must be positive, got {}",
                halfwidth.as_f64()
            )));
        }
        let q = halfwidth / h;
        let m = q.round().as_f64() as usize;
        // exact divisibility: the quotient must be an integer, m*h must
        // reproduce halfwidth bit-for-bit, and every node coordinate i*h
        // must be an exact product (fma exposes the rounding). Dyadic
        // spacings qualify; 1/3 or 0.01 do not.
        let exact = m >= 1 && q == q.round() && F::of(m as f64) * h == halfwidth && {
            (2..=2 * m).all(|i| {
                let fi = F::of(i as f64);
                fi.mul_add(h, -(fi * h)) == F::zero()
            })
        };
        if !exact {
            return Err(Error::Config(format!(
                "spacing {} does not divide halfwidth {} exactly",
                h.as_f64(),
                halfwidth.as_f64()
            )));
        }
        Ok(Arc::new(Self { n, h, halfwidth, m, per_axis: 2 * m + 1 }))
    }

    /// Slit dimension `n`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Ambient dimension `n + 1`.
    pub fn dim(&self) -> usize {
        self.n + 1
    }

    /// Grid spacing.
    pub fn spacing(&self) -> F {
        self.h
    }

    /// Box half-side.
    pub fn halfwidth(&self) -> F {
        self.halfwidth
    }

    /// Index of the center node along one axis.
    pub fn center_index(&self) -> usize {
        self.m
    }

    /// Nodes per axis.
    pub fn per_axis(&self) -> usize {
        self.per_axis
    }

    /// Total node count, `per_axis^(n+1)`.
    pub fn num_nodes(&self) -> usize {
        self.per_axis.pow(self.dim() as u32)
    }

    /// Cells per axis.
    pub fn cells_per_axis(&self) -> usize {
        2 * self.m
    }

    /// Total count of `(n+1)`-dimensional cells.
    pub fn num_cells(&self) -> usize {
        self.cells_per_axis().pow(self.dim() as u32)
    }

    /// Count of n-dimensional slit cells.
    pub fn num_slit_cells(&self) -> usize {
        self.cells_per_axis().pow(self.n as u32)
    }

    /// Flat-index stride of one step along an axis.
    #[inline]
    pub fn node_stride(&self, axis: usize) -> usize {
        self.per_axis.pow(axis as u32)
    }

    #[inline]
    pub fn index(&self, multi: [usize; 3]) -> usize {
        debug_assert!(multi[0] < self.per_axis && multi[1] < self.per_axis);
        debug_assert!(self.dim() == 3 || multi[2] == 0);
        multi[0] + self.per_axis * (multi[1] + self.per_axis * multi[2])
    }

    #[inline]
    pub fn multi(&self, idx: usize) -> [usize; 3] {
        let p = self.per_axis;
        [idx % p, (idx / p) % p, idx / (p * p)]
    }

    /// Coordinate of a 1-d index along one axis; exact for dyadic spacings.
    #[inline]
    pub fn axis_coord(&self, i: usize) -> F {
        F::of(i as f64 - self.m as f64) * self.h
    }

    /// Coordinates of a node.
    #[inline]
    pub fn coord(&self, idx: usize) -> Point<F> {
        let mi = self.multi(idx);
        let mut p = [F::zero(); 3];
        for a in 0..self.dim() {
            p[a] = self.axis_coord(mi[a]);
        }
        p
    }

    /// Iterator over all flat node indices in ascending order.
    pub fn nodes(&self) -> std::ops::Range<usize> {
        0..self.num_nodes()
    }

    /// Whether the node lies on the slit hyperplane `{x_{n+1} = 0}`.
    #[inline]
    pub fn is_slit(&self, idx: usize) -> bool {
        self.multi(idx)[self.n] == self.m
    }

    /// Whether the node lies on a face of the box.
    #[inline]
    pub fn is_box_boundary(&self, idx: usize) -> bool {
        let mi = self.multi(idx);
        (0..self.dim()).any(|a| mi[a] == 0 || mi[a] == 2 * self.m)
    }

    /// Node classification; see [`NodeClass`] for the precedence rule.
    pub fn class(&self, idx: usize) -> NodeClass {
        if self.is_slit(idx) {
            NodeClass::Slit
        } else if self.is_box_boundary(idx) {
            NodeClass::Boundary
        } else {
            NodeClass::Interior
        }
    }

    /// Whether the node lies on the half-hyperplane `P = {x_n ≤ 0, x_{n+1} = 0}`.
    #[inline]
    pub fn on_p(&self, idx: usize) -> bool {
        let mi = self.multi(idx);
        mi[self.n] == self.m && mi[self.n - 1] <= self.m
    }

    /// Whether the node lies on the edge `L = {x_n = 0, x_{n+1} = 0}`.
    #[inline]
    pub fn on_l(&self, idx: usize) -> bool {
        let mi = self.multi(idx);
        mi[self.n] == self.m && mi[self.n - 1] == self.m
    }

    /// Distance from a point to the edge `L` (ignores the flat `x'` directions).
    pub fn dist_to_edge(&self, p: Point<F>) -> F {
        let t = p[self.n - 1];
        let s = p[self.n];
        (t * t + s * s).sqrt()
    }

    /// Distance from a point to the half-hyperplane `P = {x_n ≤ 0, x_{n+1} = 0}`.
    pub fn dist_to_p(&self, p: Point<F>) -> F {
        let t = p[self.n - 1];
        let s = p[self.n];
        if t <= F::zero() {
            s.abs()
        } else {
            t.hypot(s)
        }
    }

    /// Flat indices of all slit nodes, ascending.
    pub fn slit_nodes(&self) -> Vec<usize> {
        self.nodes().filter(|&i| self.is_slit(i)).collect()
    }

    /// Mirror node under `x_{n+1} -> -x_{n+1}`.
    #[inline]
    pub fn mirror(&self, idx: usize) -> usize {
        let mut mi = self.multi(idx);
        mi[self.n] = 2 * self.m - mi[self.n];
        self.index(mi)
    }

    /// All nodes with `|X - center| <= r`, ascending flat index.
    ///
    /// An empty intersection yields an empty vector, not an error.
    pub fn ball_nodes(&self, center: Point<F>, r: F) -> Vec<usize> {
        self.nodes().filter(|&i| dist(self.coord(i), center) <= r).collect()
    }

    /// Base-corner multi-index of an `(n+1)`-cell from its flat cell index.
    #[inline]
    pub fn cell_multi(&self, cell: usize) -> [usize; 3] {
        let c = self.cells_per_axis();
        [cell % c, (cell / c) % c, cell / (c * c)]
    }

    #[inline]
    pub fn cell_index(&self, multi: [usize; 3]) -> usize {
        let c = self.cells_per_axis();
        multi[0] + c * (multi[1] + c * multi[2])
    }

    /// Center of an `(n+1)`-cell.
    pub fn cell_center(&self, cell: usize) -> Point<F> {
        let mi = self.cell_multi(cell);
        let half = self.h * F::of(0.5);
        let mut p = [F::zero(); 3];
        for a in 0..self.dim() {
            p[a] = self.axis_coord(mi[a]) + half;
        }
        p
    }

    /// Node at the base corner of a cell.
    #[inline]
    pub fn cell_base_node(&self, cell: usize) -> usize {
        self.index(self.cell_multi(cell))
    }

    /// Flat node indices of the `2^(n+1)` corners of an ambient cell.
    pub fn cell_corners(&self, cell: usize) -> Vec<usize> {
        let base = self.cell_multi(cell);
        let d = self.dim();
        let mut out = Vec::with_capacity(1 << d);
        for bits in 0..(1usize << d) {
            let mut mi = base;
            for a in 0..d {
                mi[a] += (bits >> a) & 1;
            }
            out.push(self.index(mi));
        }
        out
    }

    /// Cell index mirrored across the slit plane.
    #[inline]
    pub fn mirror_cell(&self, cell: usize) -> usize {
        let mut mi = self.cell_multi(cell);
        mi[self.n] = self.cells_per_axis() - 1 - mi[self.n];
        self.cell_index(mi)
    }

    /// Center of an n-dimensional slit cell (vertical coordinate is zero).
    pub fn slit_cell_center(&self, cell: usize) -> Point<F> {
        let c = self.cells_per_axis();
        let half = self.h * F::of(0.5);
        let mut p = [F::zero(); 3];
        let mut rest = cell;
        for a in 0..self.n {
            p[a] = self.axis_coord(rest % c) + half;
            rest /= c;
        }
        p
    }

    /// Flat node indices of the `2^n` corners of a slit cell.
    pub fn slit_cell_corners(&self, cell: usize) -> Vec<usize> {
        let c = self.cells_per_axis();
        let mut base = [0usize; 3];
        let mut rest = cell;
        for a in 0..self.n {
            base[a] = rest % c;
            rest /= c;
        }
        base[self.n] = self.m;
        let mut out = Vec::with_capacity(1 << self.n);
        for bits in 0..(1usize << self.n) {
            let mut mi = base;
            for a in 0..self.n {
                mi[a] += (bits >> a) & 1;
            }
            out.push(self.index(mi));
        }
        out
    }
}

/// Geometric sample region used by energy and diagnostic reductions.
#[derive(Debug, Clone, PartialEq)]
pub enum Region<F> {
    /// The whole box.
    All,
    /// Closed ball `{ |X - center| <= r }`.
    Ball { center: Point<F>, r: F },
}

impl<F: Real> Region<F> {
    /// Ball centered at the origin.
    pub fn ball(r: F) -> Self {
        Region::Ball { center: [F::zero(); 3], r }
    }

    pub fn contains(&self, p: Point<F>) -> bool {
        match self {
            Region::All => true,
            Region::Ball { center, r } => dist(p, *center) <= *r,
        }
    }

    /// Nodes of `grid` inside the region, ascending flat index.
    pub fn nodes(&self, grid: &SlitGrid<F>) -> Vec<usize> {
        match self {
            Region::All => grid.nodes().collect(),
            Region::Ball { center, r } => grid.ball_nodes(*center, *r),
        }
    }

    /// Short human-readable descriptor for reports.
    pub fn label(&self) -> String {
        match self {
            Region::All => "all".to_string(),
            Region::Ball { center, r } => {
                if center.iter().all(|c| *c == F::zero()) {
                    format!("ball(r={})", r.as_f64())
                } else {
                    format!(
                        "ball(c=[{},{},{}],r={})",
                        center[0].as_f64(),
                        center[1].as_f64(),
                        center[2].as_f64(),
                        r.as_f64()
                    )
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn node_counts_match_dimension() {
        let g = SlitGrid::<f64>::new(1, 1.0 / 64.0, 1.0).unwrap();
        assert_eq!(g.num_nodes(), 129 * 129);
        assert_eq!(g.slit_nodes().len(), 129);

        let g3 = SlitGrid::<f64>::new(2, 1.0 / 16.0, 1.0).unwrap();
        assert_eq!(g3.num_nodes(), 33 * 33 * 33);
        assert_eq!(g3.slit_nodes().len(), 33 * 33);
    }

    #[test]
    fn non_divisible_spacing_rejected() {
        assert!(matches!(
            SlitGrid::<f64>::new(1, 1.0 / 3.0, 1.0),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn bad_dimension_rejected() {
        assert!(SlitGrid::<f64>::new(3, 0.25, 1.0).is_err());
        assert!(SlitGrid::<f64>::new(0, 0.25, 1.0).is_err());
    }

    #[test]
    fn classification_is_a_partition() {
        let g = SlitGrid::<f64>::new(1, 0.25, 1.0).unwrap();
        let mut counts = [0usize; 3];
        for i in g.nodes() {
            match g.class(i) {
                NodeClass::Interior => counts[0] += 1,
                NodeClass::Slit => counts[1] += 1,
                NodeClass::Boundary => counts[2] += 1,
            }
        }
        assert_eq!(counts.iter().sum::<usize>(), g.num_nodes());
        // slit nodes are exactly those with x_{n+1} = 0
        assert_eq!(counts[1], g.per_axis());
        // all slit nodes report x_{n+1} == 0
        for i in g.slit_nodes() {
            assert_eq!(g.coord(i)[1], 0.0);
        }
    }

    #[test]
    fn ball_with_radius_halfwidth_contains_axis_extremes() {
        let g = SlitGrid::<f64>::new(1, 0.25, 1.0).unwrap();
        let all = g.ball_nodes([0.0; 3], g.halfwidth());
        // the ball of radius `halfwidth` misses box corners but hits face centers
        assert!(all.contains(&g.index([0, g.center_index(), 0])));
        assert!(!all.contains(&g.index([0, 0, 0])));
        let everything = g.ball_nodes([0.0; 3], 2.0 * g.halfwidth());
        assert_eq!(everything.len(), g.num_nodes());
    }

    #[test]
    fn tiny_off_lattice_ball_may_be_empty() {
        let g = SlitGrid::<f64>::new(1, 0.25, 1.0).unwrap();
        let nodes = g.ball_nodes([0.11, 0.11, 0.0], 0.05);
        assert!(nodes.is_empty());
    }

    #[test]
    fn ball_node_count_approximates_area() {
        // r = 0.5, h = 1/64: node count within 2% of pi r^2 / h^2
        let g = SlitGrid::<f64>::new(1, 1.0 / 64.0, 1.0).unwrap();
        let count = g.ball_nodes([0.0; 3], 0.5).len() as f64;
        let target = std::f64::consts::PI * 0.25 / (g.spacing() * g.spacing());
        assert!((count - target).abs() / target < 0.02, "count {count} target {target}");
    }

    #[test]
    fn mirror_is_an_involution_fixing_the_slit() {
        let g = SlitGrid::<f64>::new(2, 0.5, 1.0).unwrap();
        for i in g.nodes() {
            let j = g.mirror(i);
            assert_eq!(g.mirror(j), i);
            if g.is_slit(i) {
                assert_eq!(j, i);
            }
            let (a, b) = (g.coord(i), g.coord(j));
            assert_eq!(a[2], -b[2]);
        }
    }

    #[test]
    fn p_and_l_membership() {
        let g = SlitGrid::<f64>::new(1, 0.25, 1.0).unwrap();
        let m = g.center_index();
        assert!(g.on_l(g.index([m, m, 0])));
        assert!(g.on_p(g.index([0, m, 0])));
        assert!(!g.on_p(g.index([m + 1, m, 0])));
        assert!(!g.on_p(g.index([0, m + 1, 0])));
    }

    #[test]
    fn slit_cell_corners_have_zero_vertical_coordinate() {
        let g = SlitGrid::<f64>::new(2, 0.5, 1.0).unwrap();
        for c in 0..g.num_slit_cells() {
            let corners = g.slit_cell_corners(c);
            assert_eq!(corners.len(), 4);
            for &k in &corners {
                assert!(g.is_slit(k));
            }
        }
    }
}
