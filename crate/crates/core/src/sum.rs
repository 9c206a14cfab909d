//! Compensated summation and small fitting helpers.
//!
//! Energy reductions must reproduce to ~1e-12 across runs, so every
//! accumulation of many terms goes through [`Accumulator`] (Neumaier's
//! variant of Kahan summation) in a fixed iteration order.

use crate::scalar::Real;

/// Neumaier compensated accumulator.
#[derive(Debug, Clone, Copy)]
pub struct Accumulator<F> {
    sum: F,
    compensation: F,
}

impl<F: Real> Default for Accumulator<F> {
    fn default() -> Self {
        Self::new()
    }
}

impl<F: Real> Accumulator<F> {
    pub fn new() -> Self {
        Self { sum: F::zero(), compensation: F::zero() }
    }

    #[inline]
    pub fn add(&mut self, x: F) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn total(&self) -> F {
        self.sum + self.compensation
    }
}

/// Compensated sum of an iterator.
pub fn csum<F: Real>(values: impl IntoIterator<Item = F>) -> F {
    let mut acc = Accumulator::new();
    for v in values {
        acc.add(v);
    }
    acc.total()
}

/// Least-squares slope of `y` against `x`.
///
/// Used for convergence orders and log-log exponent fits; the caller passes
/// already-transformed (e.g. `ln`) samples.
pub fn ls_slope<F: Real>(x: &[F], y: &[F]) -> F {
    assert_eq!(x.len(), y.len());
    assert!(x.len() >= 2, "need at least two samples for a slope");
    let n = F::of(x.len() as f64);
    let mx = csum(x.iter().copied()) / n;
    let my = csum(y.iter().copied()) / n;
    let mut num = Accumulator::new();
    let mut den = Accumulator::new();
    for (&xi, &yi) in x.iter().zip(y) {
        num.add((xi - mx) * (yi - my));
        den.add((xi - mx) * (xi - mx));
    }
    num.total() / den.total()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_beats_naive_on_cancellation() {
        // 1 + many tiny terms that a naive f64 sum drops entirely
        let tiny = 1e-16_f64;
        let k = 10_000usize;
        let mut acc = Accumulator::new();
        acc.add(1.0);
        for _ in 0..k {
            acc.add(tiny);
        }
        let exact = 1.0 + tiny * k as f64;
        assert!((acc.total() - exact).abs() < 1e-18);
    }

    #[test]
    fn slope_of_exact_line() {
        let x = [1.0_f64, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 3.5 * v - 1.0).collect();
        assert!((ls_slope(&x, &y) - 3.5).abs() < 1e-12);
    }
}
