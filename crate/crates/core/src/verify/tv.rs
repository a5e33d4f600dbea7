use crate::error::Result;
use crate::linalg::State;
use crate::schemes::PiecewiseConstantFn;
use crate::scalar::Scalar;

/// Either a piecewise constant function or one row of a uniform grid.
#[derive(Debug, Clone, Copy)]
pub enum Profile<'a, T> {
    Pc(&'a PiecewiseConstantFn<T>),
    Grid { x0: T, dx: T, cells: &'a [State<T>] },
}

impl<'a, T: Scalar> From<&'a PiecewiseConstantFn<T>> for Profile<'a, T> {
    fn from(f: &'a PiecewiseConstantFn<T>) -> Self {
        Profile::Pc(f)
    }
}

impl<T: Scalar> Profile<'_, T> {
    pub fn to_pc(&self) -> Result<PiecewiseConstantFn<T>> {
        match *self {
            Profile::Pc(f) => Ok(f.clone()),
            Profile::Grid { x0, dx, cells } => PiecewiseConstantFn::from_cells(x0, dx, cells),
        }
    }
}

/// Total variation on `[a, b]`: jumps located in the interval for a
/// piecewise constant function, `Σ |u_{k+1} − u_k|` over cells meeting it
/// for a grid row.
pub fn total_variation<T: Scalar>(f: Profile<'_, T>, interval: (T, T)) -> T {
    let (a, b) = interval;
    match f {
        Profile::Pc(f) => f.total_variation_on(a, b),
        Profile::Grid { x0, dx, cells } => {
            let mut acc = T::zero();
            for k in 1..cells.len() {
                let face = x0 + dx * T::from_usize_lossy(k);
                if face >= a && face <= b {
                    acc = acc + (cells[k] - cells[k - 1]).norm();
                }
            }
            acc
        }
    }
}

/// Greedy left-to-right split: a point is inserted at every jump that would
/// bring the variation of the current open interval to `ε` or more.
pub fn interval_partition<T: Scalar>(f: &PiecewiseConstantFn<T>, eps: T) -> Vec<T> {
    let mut points = Vec::new();
    let mut acc = T::zero();
    for (j, &x) in f.breakpoints().iter().enumerate() {
        let s = (f.values()[j + 1] - f.values()[j]).norm();
        // a relative slack keeps jumps of size ε (up to rounding) as points
        if acc + s >= eps * (T::one() - T::lit(1e-12)) {
            points.push(x);
            acc = T::zero();
        } else {
            acc = acc + s;
        }
    }
    points
}

/// `∫_a^b |u − v| dx`: exact when either side is piecewise constant, the
/// midpoint rule when both are rows of the same grid.
pub fn l1_distance<T: Scalar>(a: Profile<'_, T>, b: Profile<'_, T>, interval: (T, T)) -> Result<T> {
    let (lo, hi) = interval;
    if let (Profile::Grid { x0, dx, cells }, Profile::Grid { x0: y0, dx: dy, cells: c2 }) = (a, b) {
        if x0 == y0 && dx == dy && cells.len() == c2.len() {
            let mut acc = T::zero();
            for k in 0..cells.len() {
                let xl = x0 + dx * T::from_usize_lossy(k);
                let w = (xl + dx).min(hi) - xl.max(lo);
                if w > T::zero() {
                    acc = acc + (cells[k] - c2[k]).norm() * w;
                }
            }
            return Ok(acc);
        }
    }
    Ok(a.to_pc()?.l1_distance(&b.to_pc()?, lo, hi))
}
