//! Node-indexed scalar fields.

use super::{Point, SlitGrid};
use crate::scalar::Real;
use std::sync::Arc;

/// One real value per grid node, with an optional even-in-`x_{n+1}` flag.
#[derive(Debug, Clone)]
pub struct ScalarField<F> {
    grid: Arc<SlitGrid<F>>,
    values: Vec<F>,
    even: bool,
}

impl<F: Real> ScalarField<F> {
    pub fn zeros(grid: Arc<SlitGrid<F>>) -> Self {
        let n = grid.num_nodes();
        Self { grid, values: vec![F::zero(); n], even: true }
    }

    pub fn constant(grid: Arc<SlitGrid<F>>, c: F) -> Self {
        let n = grid.num_nodes();
        Self { grid, values: vec![c; n], even: true }
    }

    /// Samples `f` at every node.
    pub fn from_fn(grid: Arc<SlitGrid<F>>, f: impl Fn(Point<F>) -> F) -> Self {
        let values: Vec<F> = grid.nodes().map(|i| f(grid.coord(i))).collect();
        debug_assert!(values.iter().all(|v| v.is_finite()), "field values must be finite");
        Self { grid, values, even: false }
    }

    /// Takes ownership of raw values (length must match the grid).
    pub fn from_values(grid: Arc<SlitGrid<F>>, values: Vec<F>, even: bool) -> Self {
        assert_eq!(values.len(), grid.num_nodes());
        Self { grid, values, even }
    }

    pub fn grid(&self) -> &Arc<SlitGrid<F>> {
        &self.grid
    }

    #[inline]
    pub fn value(&self, idx: usize) -> F {
        self.values[idx]
    }

    #[inline]
    pub fn set(&mut self, idx: usize, v: F) {
        debug_assert!(v.is_finite());
        self.values[idx] = v;
    }

    pub fn values(&self) -> &[F] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [F] {
        &mut self.values
    }

    /// Whether the field is flagged even in `x_{n+1}`.
    pub fn is_even(&self) -> bool {
        self.even
    }

    pub fn set_even_flag(&mut self, even: bool) {
        self.even = even;
    }

    /// Checks the even flag against the data, exactly.
    pub fn even_holds_exactly(&self) -> bool {
        self.grid.nodes().all(|i| self.values[i] == self.values[self.grid.mirror(i)])
    }

    /// Replaces the field by its even part in `x_{n+1}` and sets the flag.
    ///
    /// Idempotent bit-for-bit: mirror pairs receive the same sum in the same
    /// order, and averaging an already-even field is the identity.
    pub fn symmetrize(&mut self) {
        let g = self.grid.clone();
        let half = F::of(0.5);
        for i in g.nodes() {
            let j = g.mirror(i);
            if j > i {
                let avg = (self.values[i] + self.values[j]) * half;
                self.values[i] = avg;
                self.values[j] = avg;
            }
        }
        self.even = true;
    }

    /// Maximum of `|self - other|` over all nodes.
    pub fn sup_distance(&self, other: &Self) -> F {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (*a - *b).abs())
            .fold(F::zero(), F::max)
    }

    /// Maximum absolute value over a node set.
    pub fn sup_on(&self, nodes: &[usize]) -> F {
        nodes.iter().map(|&i| self.values[i].abs()).fold(F::zero(), F::max)
    }

    /// Multilinear interpolation at an arbitrary point of the box.
    ///
    /// The point is clamped to the box, so callers that guarantee in-range
    /// queries lose nothing and off-by-an-ulp queries stay defined.
    pub fn interp(&self, p: Point<F>) -> F {
        let g = &self.grid;
        let h = g.spacing();
        let d = g.dim();
        let top = g.per_axis() - 1;
        let mut base = [0usize; 3];
        let mut frac = [F::zero(); 3];
        for a in 0..d {
            let x = num_traits::clamp(p[a], -g.halfwidth(), g.halfwidth());
            let t = (x + g.halfwidth()) / h;
            let mut i = t.floor().as_f64() as usize;
            if i >= top {
                i = top - 1;
            }
            base[a] = i;
            frac[a] = num_traits::clamp(t - F::of(i as f64), F::zero(), F::one());
        }
        let mut acc = F::zero();
        for bits in 0..(1usize << d) {
            let mut w = F::one();
            let mut mi = base;
            for a in 0..d {
                if (bits >> a) & 1 == 1 {
                    mi[a] += 1;
                    w = w * frac[a];
                } else {
                    w = w * (F::one() - frac[a]);
                }
            }
            acc = acc + w * self.values[g.index(mi)];
        }
        acc
    }

    /// Interpolated value at `X + t e_n` (translation along the slit normal).
    pub fn interp_shifted_en(&self, p: Point<F>, t: F) -> F {
        let mut q = p;
        q[self.grid.n() - 1] = q[self.grid.n() - 1] + t;
        self.interp(q)
    }

    /// Pointwise map, preserving the even flag only when the map cannot break it.
    pub fn map(&self, f: impl Fn(F) -> F) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| f(*v)).collect(),
            even: self.even,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Arc<SlitGrid<f64>> {
        SlitGrid::new(1, 0.125, 1.0).unwrap()
    }

    #[test]
    fn interp_reproduces_nodes_and_multilinear_functions() {
        let g = grid();
        let f = ScalarField::from_fn(g.clone(), |p| 2.0 * p[0] - 3.0 * p[1] + 0.5);
        for i in g.nodes() {
            assert!((f.interp(g.coord(i)) - f.value(i)).abs() < 1e-14);
        }
        // multilinear functions are reproduced exactly off lattice
        for (x, y) in [(0.3, -0.71), (0.99, 0.99), (-1.0, 1.0), (0.0601, 0.0)] {
            let v = f.interp([x, y, 0.0]);
            assert!((v - (2.0 * x - 3.0 * y + 0.5)).abs() < 1e-13, "at ({x},{y}): {v}");
        }
    }

    #[test]
    fn symmetrize_is_idempotent_bitwise() {
        let g = grid();
        let mut f = ScalarField::from_fn(g.clone(), |p| p[0] + p[1] * p[1] + p[1].sin());
        f.symmetrize();
        assert!(f.even_holds_exactly());
        let once = f.values().to_vec();
        f.symmetrize();
        assert_eq!(once, f.values());
    }

    #[test]
    fn odd_field_symmetrizes_to_zero() {
        let g = grid();
        let mut f = ScalarField::from_fn(g.clone(), |p| p[1] * (1.0 + p[0]));
        f.symmetrize();
        assert!(f.values().iter().all(|v| *v == 0.0));
    }
}
