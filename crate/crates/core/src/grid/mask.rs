//! Positivity masks on the slit and distances to the zero set / free boundary.

use super::{Point, Region, ScalarField, SlitGrid};
use crate::error::{Error, Result};
use crate::scalar::Real;
use std::sync::Arc;

/// One facet of the free boundary: the interface between a positive slit
/// cell and a zero slit cell, represented by its midpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interface<F> {
    /// Slit axis orthogonal to the facet.
    pub axis: usize,
    /// Midpoint of the facet; vertical coordinate is zero.
    pub midpoint: Point<F>,
}

/// Boolean positivity indicator per n-dimensional slit cell.
///
/// The zero set `Z` is the closed complement of the positive cells within the
/// slit; the free boundary `F` consists exactly of the cell interfaces that
/// separate positive from zero cells (interfaces on the box rim are not part
/// of `F`: outside the box the positivity is unknown).
#[derive(Debug, Clone)]
pub struct SlitMask<F> {
    grid: Arc<SlitGrid<F>>,
    positive: Vec<bool>,
}

impl<F: Real> SlitMask<F> {
    pub fn new(grid: Arc<SlitGrid<F>>, positive: Vec<bool>) -> Self {
        assert_eq!(positive.len(), grid.num_slit_cells());
        Self { grid, positive }
    }

    pub fn all_positive(grid: Arc<SlitGrid<F>>) -> Self {
        let n = grid.num_slit_cells();
        Self { grid, positive: vec![true; n] }
    }

    pub fn all_zero(grid: Arc<SlitGrid<F>>) -> Self {
        let n = grid.num_slit_cells();
        Self { grid, positive: vec![false; n] }
    }

    /// Mask derived from a field: a slit cell is positive iff `u > 0` at some
    /// slit-node corner.
    ///
    /// With this convention a non-negative field vanishes on the closed zero
    /// set of its own mask, so it is always feasible for the support-solve
    /// generated from that mask. (The energy's thin term uses the stricter
    /// all-corners rule; the two differ by at most a one-cell layer at the
    /// free boundary.)
    pub fn from_field(u: &ScalarField<F>) -> Self {
        let grid = u.grid().clone();
        let positive = (0..grid.num_slit_cells())
            .map(|c| grid.slit_cell_corners(c).iter().any(|&k| u.value(k) > F::zero()))
            .collect();
        Self { grid, positive }
    }

    /// Half-space mask `{x_n > s}`.
    pub fn half_space(grid: Arc<SlitGrid<F>>, s: F) -> Self {
        let cols = if grid.n() == 1 { 1 } else { grid.cells_per_axis() };
        Self::from_graph(grid, &vec![s; cols])
    }

    /// Graph mask: cell positive iff its center satisfies `x_n > s(x')`.
    ///
    /// For `n = 1` pass a single value; for `n = 2` one value per `x'`
    /// cell column (axis 0).
    pub fn from_graph(grid: Arc<SlitGrid<F>>, s: &[F]) -> Self {
        let expected = if grid.n() == 1 { 1 } else { grid.cells_per_axis() };
        assert_eq!(s.len(), expected, "one graph height per x' column");
        let c = grid.cells_per_axis();
        let n = grid.n();
        let positive = (0..grid.num_slit_cells())
            .map(|cell| {
                let col = if n == 1 { 0 } else { cell % c };
                grid.slit_cell_center(cell)[n - 1] > s[col]
            })
            .collect();
        Self { grid, positive }
    }

    pub fn grid(&self) -> &Arc<SlitGrid<F>> {
        &self.grid
    }

    #[inline]
    pub fn is_positive(&self, cell: usize) -> bool {
        self.positive[cell]
    }

    pub fn set_positive(&mut self, cell: usize, value: bool) {
        self.positive[cell] = value;
    }

    pub fn flip(&mut self, cell: usize) {
        self.positive[cell] = !self.positive[cell];
    }

    pub fn count_positive(&self) -> usize {
        self.positive.iter().filter(|p| **p).count()
    }

    /// Positive slit cells whose center lies in `region`.
    pub fn count_positive_in(&self, region: &Region<F>) -> usize {
        (0..self.positive.len())
            .filter(|&c| self.positive[c] && region.contains(self.grid.slit_cell_center(c)))
            .count()
    }

    /// Slit nodes of the closed zero set: corners of at least one zero cell.
    ///
    /// Includes box-boundary nodes; solvers that treat the box trace as data
    /// filter those out before constraining.
    pub fn zero_nodes(&self) -> Vec<usize> {
        let g = &self.grid;
        let mut flags = vec![false; g.num_nodes()];
        for c in 0..self.positive.len() {
            if !self.positive[c] {
                for k in g.slit_cell_corners(c) {
                    flags[k] = true;
                }
            }
        }
        (0..flags.len()).filter(|&i| flags[i]).collect()
    }

    /// Free-boundary interfaces between adjacent slit cells of opposite sign.
    pub fn interfaces(&self) -> Vec<Interface<F>> {
        let g = &self.grid;
        let c = g.cells_per_axis();
        let n = g.n();
        let half = g.spacing() * F::of(0.5);
        let mut out = Vec::new();
        for cell in 0..self.positive.len() {
            let (i0, i1) = if n == 1 { (cell, 0) } else { (cell % c, cell / c) };
            for axis in 0..n {
                let idx = if axis == 0 { i0 } else { i1 };
                if idx + 1 >= c {
                    continue;
                }
                let nb = if axis == 0 { cell + 1 } else { cell + c };
                if self.positive[cell] != self.positive[nb] {
                    // midpoint of the shared facet
                    let mut p = [F::zero(); 3];
                    let centers = g.slit_cell_center(cell);
                    for a in 0..n {
                        p[a] = if a == axis { centers[a] + half } else { centers[a] };
                    }
                    out.push(Interface { axis, midpoint: p });
                }
            }
        }
        out
    }
}

/// Distance fields to the zero set and the free boundary.
#[derive(Debug, Clone)]
pub struct DistanceFields<F> {
    /// Distance from each node to the closed zero set `Z` (slit nodes).
    pub d_z: ScalarField<F>,
    /// Distance from each node to the free boundary `F` (interface midpoints).
    pub d_f: ScalarField<F>,
    /// `Z` was empty; `d_z` is `+inf` everywhere.
    pub z_empty: bool,
    /// `F` was empty; `d_f` is `+inf` everywhere.
    pub f_empty: bool,
}

/// Exact Euclidean distance from every node to the discrete sets `Z` and `F`.
///
/// Both sets live on the slit hyperplane, so the problem factors: the n-dim
/// distance is computed on the slit lattice and lifted vertically by
/// Pythagoras. This is exact, and it is what the brute-force oracle in the
/// tests reproduces point by point.
pub fn distance_to_sets<F: Real>(grid: &Arc<SlitGrid<F>>, mask: &SlitMask<F>) -> DistanceFields<F> {
    assert!(Arc::ptr_eq(grid, mask.grid()), "mask must belong to the grid");
    let n = grid.n();
    let p = grid.per_axis();
    let slit_lattice: usize = p.pow(n as u32);

    let slit_xy = |lattice: usize| -> [F; 2] {
        let i0 = lattice % p;
        let i1 = if n == 2 { lattice / p } else { 0 };
        [grid.axis_coord(i0), if n == 2 { grid.axis_coord(i1) } else { F::zero() }]
    };

    // positions of Z (slit nodes) and F (facet midpoints) in slit coordinates
    let z_pts: Vec<[F; 2]> = mask
        .zero_nodes()
        .iter()
        .map(|&k| {
            let c = grid.coord(k);
            [c[0], if n == 2 { c[1] } else { F::zero() }]
        })
        .collect();
    let f_pts: Vec<[F; 2]> = mask
        .interfaces()
        .iter()
        .map(|itf| [itf.midpoint[0], if n == 2 { itf.midpoint[1] } else { F::zero() }])
        .collect();

    let min_dist = |x: [F; 2], pts: &[[F; 2]]| -> F {
        let mut best = F::infinity();
        for q in pts {
            let dx = x[0] - q[0];
            let dy = x[1] - q[1];
            let d2 = dx * dx + dy * dy;
            if d2 < best {
                best = d2;
            }
        }
        best.sqrt()
    };

    let mut dz_slit = vec![F::infinity(); slit_lattice];
    let mut df_slit = vec![F::infinity(); slit_lattice];
    for l in 0..slit_lattice {
        let x = slit_xy(l);
        if !z_pts.is_empty() {
            dz_slit[l] = min_dist(x, &z_pts);
        }
        if !f_pts.is_empty() {
            df_slit[l] = min_dist(x, &f_pts);
        }
    }

    let lift = |slit: &[F]| -> Vec<F> {
        grid.nodes()
            .map(|i| {
                let mi = grid.multi(i);
                let lattice = if n == 1 { mi[0] } else { mi[0] + p * mi[1] };
                let v = grid.axis_coord(mi[n]);
                let d = slit[lattice];
                if d.is_finite() {
                    (d * d + v * v).sqrt()
                } else {
                    F::infinity()
                }
            })
            .collect()
    };

    DistanceFields {
        d_z: ScalarField::from_values(grid.clone(), lift(&dz_slit), true),
        d_f: ScalarField::from_values(grid.clone(), lift(&df_slit), true),
        z_empty: z_pts.is_empty(),
        f_empty: f_pts.is_empty(),
    }
}

/// The interface nearest to a point, if any.
pub fn nearest_interface<F: Real>(mask: &SlitMask<F>, p: Point<F>) -> Result<(Interface<F>, F)> {
    let itfs = mask.interfaces();
    itfs.into_iter()
        .map(|itf| {
            let d = super::dist(itf.midpoint, p);
            (itf, d)
        })
        .min_by(|a, b| a.1.partial_cmp(&b.1).expect("finite distances"))
        .ok_or_else(|| Error::EmptySet("free boundary has no interfaces".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::dist;

    fn grid_1d(h: f64) -> Arc<SlitGrid<f64>> {
        SlitGrid::new(1, h, 1.0).unwrap()
    }

    #[test]
    fn half_space_interfaces_sit_at_the_origin() {
        let g = grid_1d(0.25);
        let mask = SlitMask::half_space(g.clone(), 0.0);
        let itfs = mask.interfaces();
        assert_eq!(itfs.len(), 1);
        assert_eq!(itfs[0].midpoint[0], 0.0);
    }

    #[test]
    fn distance_examples_for_half_space_mask() {
        let g = grid_1d(0.25);
        let mask = SlitMask::half_space(g.clone(), 0.0);
        let d = distance_to_sets(&g, &mask);
        assert!(!d.z_empty && !d.f_empty);

        // node (0.5, 0.25): d_F = sqrt(0.5^2 + 0.25^2)
        let m = g.center_index();
        let node = g.index([m + 2, m + 1, 0]);
        assert_eq!(g.coord(node), [0.5, 0.25, 0.0]);
        let expect = (0.5f64 * 0.5 + 0.25 * 0.25).sqrt();
        assert!((d.d_f.value(node) - expect).abs() < 1e-14);

        // node (-0.5, 0) lies in Z
        let z_node = g.index([m - 2, m, 0]);
        assert_eq!(d.d_z.value(z_node), 0.0);
    }

    #[test]
    fn empty_sets_are_flagged_with_infinite_fields() {
        let g = grid_1d(0.25);
        let all = SlitMask::all_positive(g.clone());
        let d = distance_to_sets(&g, &all);
        assert!(d.z_empty && d.f_empty);
        assert!(d.d_z.value(0).is_infinite());
        assert!(d.d_f.value(0).is_infinite());
    }

    #[test]
    fn distances_match_brute_force_over_full_ambient_sets() {
        // independent oracle: minimize over set points in ambient coordinates
        let g = SlitGrid::new(2, 0.5, 1.0).unwrap();
        let mut mask = SlitMask::all_positive(g.clone());
        // a hand-picked ragged zero region
        for c in [0usize, 1, 4, 5, 6, 9, 12] {
            mask.set_positive(c, false);
        }
        let d = distance_to_sets(&g, &mask);
        let z_coords: Vec<_> = mask.zero_nodes().iter().map(|&k| g.coord(k)).collect();
        let f_coords: Vec<_> = mask.interfaces().iter().map(|i| i.midpoint).collect();
        assert!(!z_coords.is_empty() && !f_coords.is_empty());
        for i in g.nodes() {
            let p = g.coord(i);
            let bz = z_coords.iter().map(|q| dist(p, *q)).fold(f64::INFINITY, f64::min);
            let bf = f_coords.iter().map(|q| dist(p, *q)).fold(f64::INFINITY, f64::min);
            assert!((d.d_z.value(i) - bz).abs() < 1e-12);
            assert!((d.d_f.value(i) - bf).abs() < 1e-12);
        }
    }

    #[test]
    fn from_field_mask_puts_the_interface_at_the_sign_change() {
        let g = grid_1d(0.25);
        let u = ScalarField::from_fn(g.clone(), |p| if p[0] > 0.0 { p[0] } else { 0.0 });
        let mask = SlitMask::from_field(&u);
        // cell [0, h] has a positive right corner, so it counts as positive
        for c in 0..g.num_slit_cells() {
            let center = g.slit_cell_center(c)[0];
            assert_eq!(mask.is_positive(c), center > 0.0, "cell center {center}");
        }
        // the field vanishes on the closed zero set of its own mask
        for k in mask.zero_nodes() {
            assert_eq!(u.value(k), 0.0);
        }
        assert_eq!(mask.interfaces()[0].midpoint[0], 0.0);
    }
}
