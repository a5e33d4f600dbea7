use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::State;
use crate::scalar::Scalar;

/// Piecewise constant function on the line: `values[j]` on `(x_j, x_{j+1})`
/// with `x_0 = −∞`, `x_{m+1} = +∞`. At a breakpoint the right value is taken.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct PiecewiseConstantFn<T> {
    breakpoints: Vec<T>,
    values: Vec<State<T>>,
}

impl<T: Scalar> PiecewiseConstantFn<T> {
    pub fn new(breakpoints: Vec<T>, values: Vec<State<T>>) -> Result<Self> {
        if values.len() != breakpoints.len() + 1 {
            return Err(Error::InvalidInput(format!(
                "{} breakpoints need {} values, got {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                values.len()
            )));
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) || breakpoints.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("breakpoints must be finite and strictly increasing".into()));
        }
        let n = values[0].dim();
        if values.iter().any(|v| v.dim() != n) {
            return Err(Error::InvalidInput("values of mixed dimension".into()));
        }
        Ok(Self { breakpoints, values })
    }

    pub fn constant(u: State<T>) -> Self {
        Self { breakpoints: Vec::new(), values: vec![u] }
    }

    pub fn riemann(x0: T, u_l: State<T>, u_r: State<T>) -> Self {
        Self { breakpoints: vec![x0], values: vec![u_l, u_r] }
    }

    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[State<T>] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values[0].dim()
    }

    pub fn left_state(&self) -> State<T> {
        self.values[0]
    }

    pub fn right_state(&self) -> State<T> {
        *self.values.last().unwrap()
    }

    pub fn eval(&self, x: T) -> State<T> {
        let k = self.breakpoints.partition_point(|&b| b <= x);
        self.values[k]
    }

    /// Sum of the Euclidean norms of the jumps.
    pub fn total_variation(&self) -> T {
        self.values.windows(2).map(|w| (w[1] - w[0]).norm()).fold(T::zero(), |a, b| a + b)
    }

    /// Total variation of the jumps located in `[a, b]`.
    pub fn total_variation_on(&self, a: T, b: T) -> T {
        self.breakpoints
            .iter()
            .enumerate()
            .filter(|(_, &x)| x >= a && x <= b)
            .map(|(j, _)| (self.values[j + 1] - self.values[j]).norm())
            .fold(T::zero(), |s, v| s + v)
    }

    /// `∫_a^b u dx`, exact.
    pub fn integral(&self, a: T, b: T) -> State<T> {
        let mut acc = State::zeros(self.dim());
        if !(b > a) {
            return acc;
        }
        let mut left = a;
        let start = self.breakpoints.partition_point(|&x| x <= a);
        for j in start..=self.breakpoints.len() {
            let right = if j < self.breakpoints.len() { self.breakpoints[j].min(b) } else { b };
            if right > left {
                acc = acc.axpy(right - left, &self.values[j]);
                left = right;
            }
            if left >= b {
                break;
            }
        }
        acc
    }

    /// Mean value over `[a, b]`.
    pub fn average(&self, a: T, b: T) -> State<T> {
        self.integral(a, b) / (b - a)
    }

    /// Cell averages on the uniform grid `[x0 + k dx, x0 + (k+1) dx)`.
    pub fn cell_averages(&self, x0: T, dx: T, n_cells: usize) -> Vec<State<T>> {
        (0..n_cells)
            .map(|k| {
                let a = x0 + dx * T::from_usize_lossy(k);
                self.average(a, a + dx)
            })
            .collect()
    }

    /// Exact `∫_a^b |u − v| dx` (Euclidean norm of the difference).
    pub fn l1_distance(&self, other: &Self, a: T, b: T) -> T {
        if !(b > a) {
            return T::zero();
        }
        let mut cuts: Vec<T> = self
            .breakpoints
            .iter()
            .chain(other.breakpoints.iter())
            .copied()
            .filter(|&x| x > a && x < b)
            .collect();
        cuts.push(a);
        cuts.push(b);
        cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        cuts.dedup();
        let mut acc = T::zero();
        for w in cuts.windows(2) {
            let mid = (w[0] + w[1]) * T::lit(0.5);
            acc = acc + (self.eval(mid) - other.eval(mid)).norm() * (w[1] - w[0]);
        }
        acc
    }

    /// Drop breakpoints across which the value does not change.
    pub fn simplify(&self) -> Self {
        let mut bps = Vec::with_capacity(self.breakpoints.len());
        let mut vals = vec![self.values[0]];
        for (j, &x) in self.breakpoints.iter().enumerate() {
            if self.values[j + 1] != *vals.last().unwrap() {
                bps.push(x);
                vals.push(self.values[j + 1]);
            }
        }
        Self { breakpoints: bps, values: vals }
    }

    /// Piecewise constant function taking the cell values of a uniform grid.
    pub fn from_cells(x0: T, dx: T, cells: &[State<T>]) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::InvalidInput("no cells".into()));
        }
        let bps = (1..cells.len()).map(|k| x0 + dx * T::from_usize_lossy(k)).collect();
        Ok(Self { breakpoints: bps, values: cells.to_vec() }.simplify())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: f64) -> State<f64> {
        State::scalar(x)
    }

    #[test]
    fn integrals_and_averages() {
        let f = PiecewiseConstantFn::new(vec![0.0, 1.0], vec![s(2.0), s(1.0), s(0.0)]).unwrap();
        assert_eq!(f.integral(-1.0, 2.0)[0], 3.0);
        assert_eq!(f.average(-0.5, 0.5)[0], 1.5);
        assert_eq!(f.eval(0.0)[0], 1.0);
        assert_eq!(f.total_variation(), 2.0);
        let c = f.cell_averages(-1.0, 0.5, 6);
        let v: Vec<f64> = c.iter().map(|x| x[0]).collect();
        assert_eq!(v, vec![2.0, 2.0, 1.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn shifted_steps_l1() {
        let a = PiecewiseConstantFn::riemann(0.0, s(1.0), s(-0.5));
        let b = PiecewiseConstantFn::riemann(0.3, s(1.0), s(-0.5));
        assert!((a.l1_distance(&b, -5.0, 5.0) - 1.5 * 0.3).abs() < 1e-15);
        assert_eq!(a.l1_distance(&a, -5.0, 5.0), 0.0);
    }

    #[test]
    fn rejects_unsorted_breakpoints() {
        assert!(PiecewiseConstantFn::new(vec![1.0, 0.0], vec![s(0.0); 3]).is_err());
        assert!(PiecewiseConstantFn::new(vec![0.0], vec![s(0.0)]).is_err());
    }
}
