//! Outer free-boundary search: descend on the positivity mask, with an inner
//! support-constrained linear solve per candidate.

use super::linsys::{CellWeight, LinearProblem};
use super::SolverSettings;
use crate::energy::{dirichlet_part, thin_part};
use crate::error::{Error, Result};
use crate::grid::{Region, ScalarField, SlitGrid, SlitMask};
use crate::scalar::Real;
use std::sync::Arc;

/// Free-boundary search strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FbSearch {
    /// Free boundary as a graph `x_n = s(x')`; per-column threshold moves.
    GraphDescent,
    /// Single-cell flips anywhere; exhaustive per step, coarse grids only.
    CellFlip,
}

/// One free-boundary minimization instance: the fixed data, which nodes the
/// solves may move, which slit cells the search may flip.
pub(crate) struct FbProblem<'a, F> {
    pub grid: &'a Arc<SlitGrid<F>>,
    /// Values at non-free nodes (box trace, and surrounding field on balls).
    pub data: Vec<F>,
    pub free: Vec<bool>,
    pub movable: Vec<bool>,
    pub weight: CellWeight<'a, F>,
    pub lambda: F,
    pub settings: &'a SolverSettings<F>,
    /// Whether data, free set and weights are mirror-symmetric; if so every
    /// solve is projected onto even fields (a strict error reduction).
    pub symmetric: bool,
}

pub(crate) struct FbOutcome<F> {
    pub field: ScalarField<F>,
    pub mask: SlitMask<F>,
    pub energies: Vec<f64>,
}

impl<'a, F: Real> FbProblem<'a, F> {
    pub fn is_symmetric(grid: &SlitGrid<F>, data: &[F], free: &[bool], weight: &CellWeight<F>) -> bool {
        let nodes_ok = (0..grid.num_nodes()).all(|i| {
            let j = grid.mirror(i);
            free[i] == free[j] && (free[i] || data[i] == data[j])
        });
        if !nodes_ok {
            return false;
        }
        match weight {
            CellWeight::Uniform => true,
            CellWeight::PerCell(w) => (0..grid.num_cells()).all(|c| w[c] == w[grid.mirror_cell(c)]),
        }
    }

    /// Solves the support-constrained problem for one mask.
    pub fn solve_mask(&self, mask: &SlitMask<F>, warm: Option<&ScalarField<F>>) -> Result<ScalarField<F>> {
        let g = self.grid;
        let mut pinned = vec![false; g.num_nodes()];
        for c in 0..g.num_slit_cells() {
            if !mask.is_positive(c) {
                for k in g.slit_cell_corners(c) {
                    pinned[k] = true;
                }
            }
        }
        let mut values = self.data.clone();
        let mut solve_free = vec![false; g.num_nodes()];
        for i in g.nodes() {
            if self.free[i] {
                if pinned[i] {
                    values[i] = F::zero();
                } else {
                    solve_free[i] = true;
                    // warm start from the previous field, falling back to the
                    // data vector (whose interior entries are the caller's
                    // best guess)
                    if let Some(w) = warm {
                        values[i] = w.value(i);
                    }
                }
            }
        }
        let lp = LinearProblem::new(g, &solve_free, self.weight);
        lp.solve(&mut values, self.settings.tolerance, self.settings.max_iterations, self.settings.method)?;
        let mut field = ScalarField::from_values(g.clone(), values, false);
        if self.symmetric {
            field.symmetrize();
        }
        Ok(field)
    }

    /// Total energy used by the descent: full-box Dirichlet part plus the
    /// slit measure of the field's positive cells. Matches the convention of
    /// [`crate::energy::energy`], so scores compare directly against
    /// candidate fields.
    pub fn score(&self, field: &ScalarField<F>) -> F {
        let dir = match self.weight {
            CellWeight::Uniform => dirichlet_part(field, |_| true),
            CellWeight::PerCell(w) => weighted_dirichlet(field, w),
        };
        dir + self.lambda * thin_part(field, &Region::All)
    }

    pub fn descend(&self, initial: SlitMask<F>) -> Result<FbOutcome<F>> {
        match self.settings.fb_search {
            FbSearch::GraphDescent => self.graph_descent(initial),
            FbSearch::CellFlip => self.cell_flip(initial),
        }
    }

    fn accept_tolerance(&self, e: F) -> F {
        F::of(10.0) * self.settings.tolerance * (F::one() + e.abs())
    }

    fn graph_descent(&self, initial: SlitMask<F>) -> Result<FbOutcome<F>> {
        let g = self.grid;
        let cols = if g.n() == 1 { 1 } else { g.cells_per_axis() };
        let c = g.cells_per_axis();
        let cell_of = |col: usize, level: usize| if g.n() == 1 { level } else { col + c * level };

        // movable span and threshold per column; the threshold is the level
        // of the first positive cell within the span
        let mut span = vec![None::<(usize, usize)>; cols];
        for col in 0..cols {
            let levels: Vec<usize> =
                (0..c).filter(|&l| self.movable[cell_of(col, l)]).collect();
            if let Some((&lo, &hi)) = levels.first().zip(levels.last()) {
                debug_assert_eq!(levels.len(), hi - lo + 1, "movable span must be contiguous");
                span[col] = Some((lo, hi));
            }
        }
        let mut mask = initial;
        let mut tau = vec![0usize; cols];
        for col in 0..cols {
            if let Some((lo, hi)) = span[col] {
                let first_pos =
                    (lo..=hi).find(|&l| mask.is_positive(cell_of(col, l))).unwrap_or(hi + 1);
                tau[col] = first_pos;
                // rewrite the span monotone: zero below the threshold, positive above
                for l in lo..=hi {
                    mask.set_positive(cell_of(col, l), l >= first_pos);
                }
            }
        }

        let mut field = self.solve_mask(&mask, None)?;
        let mut energy = self.score(&field);
        let mut energies = vec![energy.as_f64()];
        let mut steps = 0usize;
        loop {
            let mut moved = false;
            for col in 0..cols {
                let Some((lo, hi)) = span[col] else { continue };
                if steps >= self.settings.max_fb_steps {
                    return Err(Error::SolverFailure(format!(
                        "free-boundary descent exceeded {} moves",
                        self.settings.max_fb_steps
                    )));
                }
                // candidate thresholds: grow the positivity set (tau-1) or
                // shrink it (tau+1); on ties prefer growing
                let mut best: Option<(usize, F, ScalarField<F>, SlitMask<F>)> = None;
                for cand in [tau[col].checked_sub(1), Some(tau[col] + 1)].into_iter().flatten() {
                    if cand < lo || cand > hi + 1 {
                        continue;
                    }
                    let mut m2 = mask.clone();
                    for l in lo..=hi {
                        m2.set_positive(cell_of(col, l), l >= cand);
                    }
                    let f2 = self.solve_mask(&m2, Some(&field))?;
                    let e2 = self.score(&f2);
                    if e2 < energy - self.accept_tolerance(energy)
                        && best.as_ref().map_or(true, |b| e2 < b.1)
                    {
                        best = Some((cand, e2, f2, m2));
                    }
                }
                if let Some((cand, e2, f2, m2)) = best {
                    if e2 > energy {
                        energies.push(e2.as_f64());
                        return Err(Error::Oscillation(energies));
                    }
                    tau[col] = cand;
                    mask = m2;
                    field = f2;
                    energy = e2;
                    energies.push(energy.as_f64());
                    steps += 1;
                    moved = true;
                }
            }
            if !moved {
                break;
            }
        }
        Ok(FbOutcome { field, mask, energies })
    }

    fn cell_flip(&self, initial: SlitMask<F>) -> Result<FbOutcome<F>> {
        let g = self.grid;
        let mut mask = initial;
        let mut field = self.solve_mask(&mask, None)?;
        let mut energy = self.score(&field);
        let mut energies = vec![energy.as_f64()];
        let mut steps = 0usize;
        loop {
            if steps >= self.settings.max_fb_steps {
                return Err(Error::SolverFailure(format!(
                    "free-boundary descent exceeded {} moves",
                    self.settings.max_fb_steps
                )));
            }
            let mut best: Option<(usize, F, ScalarField<F>, SlitMask<F>)> = None;
            for cell in 0..g.num_slit_cells() {
                if !self.movable[cell] {
                    continue;
                }
                let mut m2 = mask.clone();
                m2.flip(cell);
                let f2 = self.solve_mask(&m2, Some(&field))?;
                let e2 = self.score(&f2);
                // strict improvement over the incumbent best keeps ties at
                // the lexicographically smallest cell index
                if e2 < energy - self.accept_tolerance(energy)
                    && best.as_ref().map_or(true, |b| e2 < b.1)
                {
                    best = Some((cell, e2, f2, m2));
                }
            }
            match best {
                Some((_, e2, f2, m2)) => {
                    if e2 > energy {
                        energies.push(e2.as_f64());
                        return Err(Error::Oscillation(energies));
                    }
                    mask = m2;
                    field = f2;
                    energy = e2;
                    energies.push(energy.as_f64());
                    steps += 1;
                }
                None => break,
            }
        }
        Ok(FbOutcome { field, mask, energies })
    }
}

/// Dirichlet part with per-cell weights (same stencil as the solver).
pub(crate) fn weighted_dirichlet<F: Real>(u: &ScalarField<F>, w: &[F]) -> F {
    let g = u.grid();
    let d = g.dim();
    let h = g.spacing();
    let mut acc = crate::sum::Accumulator::new();
    for cell in 0..g.num_cells() {
        let base = g.cell_base_node(cell);
        let mut cell_sum = F::zero();
        for axis in 0..d {
            let diff = u.value(base + g.node_stride(axis)) - u.value(base);
            cell_sum += diff * diff;
        }
        acc.add(w[cell] * cell_sum);
    }
    acc.total() * h.powi(d as i32 - 2)
}
