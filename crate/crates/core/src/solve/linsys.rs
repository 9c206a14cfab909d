//! Linear solves for weighted discrete Dirichlet forms.
//!
//! The quadratic form is the cell sum `Σ_c w_c Σ_a (u[base+e_a] - u[base])²`
//! (the common `h` power scales both sides of the normal equations and is
//! dropped). The matrix is a weighted graph Laplacian restricted to the free
//! nodes, symmetric positive definite, solved either by Jacobi-preconditioned
//! conjugate gradients or by successive relaxation.

use crate::error::{Error, Result};
use crate::grid::SlitGrid;
use crate::scalar::Real;
use crate::sum::Accumulator;
use std::sync::Arc;

/// Per-cell weight of the Dirichlet form.
#[derive(Clone, Copy)]
pub enum CellWeight<'a, F> {
    Uniform,
    PerCell(&'a [F]),
}

impl<'a, F: Real> CellWeight<'a, F> {
    #[inline]
    fn get(&self, cell: usize) -> F {
        match self {
            CellWeight::Uniform => F::one(),
            CellWeight::PerCell(w) => w[cell],
        }
    }
}

/// Linear method selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinearMethod {
    /// Conjugate gradients with diagonal preconditioning.
    ConjugateDirection,
    /// Gauss-Seidel sweeps (successive relaxation).
    SuccessiveRelaxation,
}

pub(crate) struct LinearProblem<'a, F> {
    grid: &'a Arc<SlitGrid<F>>,
    weight: CellWeight<'a, F>,
    free: Vec<usize>,
    strides: [usize; 3],
    cells_per_axis: usize,
}

impl<'a, F: Real> LinearProblem<'a, F> {
    pub fn new(grid: &'a Arc<SlitGrid<F>>, free_flags: &[bool], weight: CellWeight<'a, F>) -> Self {
        assert_eq!(free_flags.len(), grid.num_nodes());
        if let CellWeight::PerCell(w) = weight {
            assert_eq!(w.len(), grid.num_cells());
        }
        let free: Vec<usize> = (0..free_flags.len()).filter(|&i| free_flags[i]).collect();
        let strides = [grid.node_stride(0), grid.node_stride(1), grid.node_stride(2)];
        Self { grid, weight, free, strides, cells_per_axis: grid.cells_per_axis() }
    }

    /// Weight of the cell based at `mi`, if that cell exists.
    #[inline]
    fn cell_weight_at(&self, mi: [usize; 3]) -> Option<F> {
        let d = self.grid.dim();
        for a in 0..d {
            if mi[a] >= self.cells_per_axis {
                return None;
            }
        }
        let c = self.cells_per_axis;
        let cell = mi[0] + c * (mi[1] + c * mi[2]);
        Some(self.weight.get(cell))
    }

    /// Row of the operator at node `i` applied to the full vector `v`.
    #[inline]
    fn row(&self, i: usize, v: &[F]) -> F {
        let g = self.grid;
        let d = g.dim();
        let mi = g.multi(i);
        let mut acc = F::zero();
        if let Some(w) = self.cell_weight_at(mi) {
            for a in 0..d {
                acc += w * (v[i] - v[i + self.strides[a]]);
            }
        }
        for a in 0..d {
            if mi[a] == 0 {
                continue;
            }
            let mut mj = mi;
            mj[a] -= 1;
            if let Some(w) = self.cell_weight_at(mj) {
                acc += w * (v[i] - v[i - self.strides[a]]);
            }
        }
        acc
    }

    /// Diagonal of the operator at node `i`.
    #[inline]
    fn diag(&self, i: usize) -> F {
        let g = self.grid;
        let d = g.dim();
        let mi = g.multi(i);
        let mut acc = F::zero();
        if let Some(w) = self.cell_weight_at(mi) {
            acc += F::of(d as f64) * w;
        }
        for a in 0..d {
            if mi[a] == 0 {
                continue;
            }
            let mut mj = mi;
            mj[a] -= 1;
            if let Some(w) = self.cell_weight_at(mj) {
                acc += w;
            }
        }
        acc
    }

    /// Solves in place: `values` carries Dirichlet data at non-free nodes and
    /// the initial guess at free nodes; on return the free entries minimize
    /// the form.
    pub fn solve(&self, values: &mut [F], tolerance: F, max_iterations: usize, method: LinearMethod) -> Result<()> {
        if self.free.is_empty() {
            return Ok(());
        }
        match method {
            LinearMethod::ConjugateDirection => self.solve_cg(values, tolerance, max_iterations),
            LinearMethod::SuccessiveRelaxation => self.solve_sor(values, tolerance, max_iterations),
        }
    }

    fn solve_cg(&self, values: &mut [F], tolerance: F, max_iterations: usize) -> Result<()> {
        let nf = self.free.len();
        // b = -A(data with zeros at free); assembled by zeroing free entries
        let mut full: Vec<F> = values.to_vec();
        for &i in &self.free {
            full[i] = F::zero();
        }
        let b: Vec<F> = self.free.iter().map(|&i| -self.row(i, &full)).collect();
        let b_norm = l2(&b);
        // from here on `full` is scratch for the free-free block: every fixed
        // entry must read as zero
        for v in full.iter_mut() {
            *v = F::zero();
        }

        let diag: Vec<F> = self
            .free
            .iter()
            .map(|&i| {
                let d = self.diag(i);
                if d > F::zero() {
                    d
                } else {
                    F::one() // isolated node: row is zero, keep preconditioner sane
                }
            })
            .collect();

        // iterate on the free entries of `full`
        let mut x: Vec<F> = self.free.iter().map(|&i| values[i]).collect();
        let mut ax = vec![F::zero(); nf];
        self.apply_free(&x, &mut full, &mut ax);
        let mut r: Vec<F> = (0..nf).map(|k| b[k] - ax[k]).collect();
        let target = tolerance * if b_norm > F::zero() { b_norm } else { F::one() };

        let mut z: Vec<F> = (0..nf).map(|k| r[k] / diag[k]).collect();
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        let mut res = l2(&r);
        let mut iterations = 0usize;
        while res > target {
            if iterations >= max_iterations {
                return Err(Error::NonConvergence {
                    residual: res.as_f64(),
                    iterations,
                });
            }
            self.apply_free(&p, &mut full, &mut ax);
            let pap = dot(&p, &ax);
            if !(pap > F::zero()) {
                // exact zero happens only for p = 0, i.e. convergence
                break;
            }
            let alpha = rz / pap;
            for k in 0..nf {
                x[k] += alpha * p[k];
                r[k] -= alpha * ax[k];
            }
            res = l2(&r);
            for k in 0..nf {
                z[k] = r[k] / diag[k];
            }
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for k in 0..nf {
                p[k] = z[k] + beta * p[k];
            }
            iterations += 1;
        }
        for (k, &i) in self.free.iter().enumerate() {
            values[i] = x[k];
        }
        Ok(())
    }

    /// Applies the free-free block to `x`, using `full` as scratch (fixed
    /// entries must already be zero there).
    fn apply_free(&self, x: &[F], full: &mut [F], out: &mut [F]) {
        for (k, &i) in self.free.iter().enumerate() {
            full[i] = x[k];
        }
        for (k, &i) in self.free.iter().enumerate() {
            out[k] = self.row(i, full);
        }
    }

    fn solve_sor(&self, values: &mut [F], tolerance: F, max_iterations: usize) -> Result<()> {
        let omega = F::of(1.7);
        let mut res = F::infinity();
        // reference scale: residual of the zero-correction state
        let mut full: Vec<F> = values.to_vec();
        for &i in &self.free {
            full[i] = F::zero();
        }
        let b0: Vec<F> = self.free.iter().map(|&i| -self.row(i, &full)).collect();
        let scale = l2(&b0);
        let target = tolerance * if scale > F::zero() { scale } else { F::one() };
        for sweep in 0..max_iterations {
            for &i in &self.free {
                let d = self.diag(i);
                if d <= F::zero() {
                    continue;
                }
                let r = -self.row(i, values);
                values[i] += omega * r / d;
            }
            if sweep % 8 == 7 || sweep + 1 == max_iterations {
                let mut acc = Accumulator::new();
                for &i in &self.free {
                    let r = self.row(i, values);
                    acc.add(r * r);
                }
                res = acc.total().sqrt();
                if res <= target {
                    return Ok(());
                }
            }
        }
        Err(Error::NonConvergence { residual: res.as_f64(), iterations: max_iterations })
    }

    /// Max residual `|A u|` over free nodes for a full-vector candidate.
    pub fn sup_residual(&self, values: &[F]) -> F {
        self.free.iter().map(|&i| self.row(i, values).abs()).fold(F::zero(), F::max)
    }
}

fn dot<F: Real>(a: &[F], b: &[F]) -> F {
    let mut acc = Accumulator::new();
    for k in 0..a.len() {
        acc.add(a[k] * b[k]);
    }
    acc.total()
}

fn l2<F: Real>(a: &[F]) -> F {
    let mut acc = Accumulator::new();
    for v in a {
        acc.add(*v * *v);
    }
    acc.total().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Free set: all non-box nodes. Data: `g` on the box.
    fn laplace_setup(h: f64, boundary: impl Fn([f64; 3]) -> f64) -> (Arc<SlitGrid<f64>>, Vec<bool>, Vec<f64>) {
        let g = SlitGrid::new(1, h, 1.0).unwrap();
        let free: Vec<bool> = g.nodes().map(|i| !g.is_box_boundary(i)).collect();
        let values: Vec<f64> = g.nodes().map(|i| if free[i] { 0.0 } else { boundary(g.coord(i)) }).collect();
        (g, free, values)
    }

    #[test]
    fn harmonic_polynomial_is_reproduced() {
        // x^2 - y^2 is discrete harmonic for the 5-point stencil
        let f = |p: [f64; 3]| p[0] * p[0] - p[1] * p[1];
        let (g, free, mut values) = laplace_setup(1.0 / 16.0, f);
        let lp = LinearProblem::new(&g, &free, CellWeight::Uniform);
        lp.solve(&mut values, 1e-12, 10_000, LinearMethod::ConjugateDirection).unwrap();
        for i in g.nodes() {
            assert!((values[i] - f(g.coord(i))).abs() < 1e-9, "node {i}");
        }
    }

    #[test]
    fn cg_and_sor_agree() {
        let f = |p: [f64; 3]| (p[0] * 2.1).sin() + p[1];
        let (g, free, values) = laplace_setup(1.0 / 8.0, f);
        let lp = LinearProblem::new(&g, &free, CellWeight::Uniform);
        let mut a = values.clone();
        lp.solve(&mut a, 1e-12, 20_000, LinearMethod::ConjugateDirection).unwrap();
        let mut b = values;
        lp.solve(&mut b, 1e-12, 20_000, LinearMethod::SuccessiveRelaxation).unwrap();
        for i in g.nodes() {
            assert!((a[i] - b[i]).abs() < 1e-8);
        }
    }

    #[test]
    fn nonconvergence_is_reported_with_residual() {
        let f = |p: [f64; 3]| p[0].abs();
        let (g, free, mut values) = laplace_setup(1.0 / 32.0, f);
        let lp = LinearProblem::new(&g, &free, CellWeight::Uniform);
        let err = lp.solve(&mut values, 1e-14, 3, LinearMethod::ConjugateDirection).unwrap_err();
        match err {
            Error::NonConvergence { residual, iterations } => {
                assert!(residual > 0.0);
                assert_eq!(iterations, 3);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn discrete_maximum_principle_holds() {
        let f = |p: [f64; 3]| 0.5 + 0.5 * (3.0 * p[0]).cos() * (p[1]).sin();
        let (g, free, mut values) = laplace_setup(1.0 / 16.0, f);
        let lp = LinearProblem::new(&g, &free, CellWeight::Uniform);
        lp.solve(&mut values, 1e-12, 10_000, LinearMethod::ConjugateDirection).unwrap();
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in g.nodes() {
            if g.is_box_boundary(i) {
                lo = lo.min(values[i]);
                hi = hi.max(values[i]);
            }
        }
        for i in g.nodes() {
            assert!(values[i] >= lo - 1e-12 && values[i] <= hi + 1e-12);
        }
    }
}
