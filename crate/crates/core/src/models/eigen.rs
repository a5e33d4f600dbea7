//! Real eigen-decomposition of small strictly hyperbolic Jacobians.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Mat, State};
use crate::scalar::{Scalar, Tolerances};

/// Eigenvalues `λ₁ < … < λₙ` with unit right eigenvectors and dual left eigenvectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar + Serialize", deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct EigenSystem<T> {
    pub lambdas: State<T>,
    pub right: [State<T>; 4],
    pub left: [State<T>; 4],
}

impl<T: Scalar> EigenSystem<T> {
    pub fn dim(&self) -> usize {
        self.lambdas.dim()
    }

    pub fn lambda(&self, i: usize) -> T {
        self.lambdas[i]
    }

    pub fn r(&self, i: usize) -> &State<T> {
        &self.right[i]
    }

    pub fn l(&self, i: usize) -> &State<T> {
        &self.left[i]
    }

    /// Characteristic components `l_i · v`.
    pub fn project(&self, v: &State<T>) -> State<T> {
        let mut c = State::zeros(self.dim());
        for i in 0..self.dim() {
            c[i] = self.left[i].dot(v);
        }
        c
    }

    /// Inverse of [`project`](Self::project): `Σ c_i r_i`.
    pub fn combine(&self, c: &State<T>) -> State<T> {
        let mut v = State::zeros(self.dim());
        for i in 0..self.dim() {
            v = v.axpy(c[i], &self.right[i]);
        }
        v
    }

    /// Largest of the residuals `‖A r − λ r‖`, `‖l A − λ l‖` and `|l_i·r_j − δ_ij|`.
    pub fn residual(&self, a: &Mat<T>) -> T {
        let n = self.dim();
        let mut worst = T::zero();
        for i in 0..n {
            let lam = self.lambdas[i];
            let rr = (a.mul_vec(&self.right[i]) - self.right[i] * lam).norm();
            let lr = (a.vec_mul(&self.left[i]) - self.left[i] * lam).norm();
            worst = worst.max(rr).max(lr);
            for j in 0..n {
                let d = if i == j { T::one() } else { T::zero() };
                worst = worst.max((self.left[i].dot(&self.right[j]) - d).abs());
            }
        }
        worst
    }
}

/// Decompose `a`, which must have `n` real eigenvalues separated by more than `tol.gap`.
pub fn decompose<T: Scalar>(a: &Mat<T>, tol: &Tolerances<T>) -> Result<EigenSystem<T>> {
    let n = a.dim();
    let fail = |reason: String| Error::NonHyperbolic { state: Vec::new(), reason };
    if !a.is_finite() {
        return Err(fail("non-finite Jacobian".into()));
    }
    let lambdas: Vec<T> = match n {
        1 => vec![a[(0, 0)]],
        2 => {
            let (l1, l2) = eig2(a[(0, 0)], a[(0, 1)], a[(1, 0)], a[(1, 1)])
                .ok_or_else(|| fail("complex eigenvalues".into()))?;
            vec![l1, l2]
        }
        _ => qr_eigenvalues(a).ok_or_else(|| fail("complex eigenvalues or no convergence".into()))?,
    };
    let mut lambdas = lambdas;
    lambdas.sort_by(|x, y| x.partial_cmp(y).unwrap());
    for w in lambdas.windows(2) {
        if w[1] - w[0] <= tol.gap {
            return Err(fail(format!(
                "eigenvalues {} and {} closer than {}",
                w[0].to_f64_lossy(),
                w[1].to_f64_lossy(),
                tol.gap.to_f64_lossy()
            )));
        }
    }

    let zero = State::zeros(n);
    let mut right = [zero; 4];
    let mut lam_state = State::zeros(n);
    for (i, &lam) in lambdas.iter().enumerate() {
        let r = match n {
            1 => State::scalar(T::one()),
            2 => null_vector2(a, lam),
            _ => inverse_iteration(a, lam, &lambdas).ok_or_else(|| fail("eigenvector iteration failed".into()))?,
        };
        right[i] = fix_sign(r / r.norm());
        lam_state[i] = lam;
    }
    let r_mat = Mat::from_columns(&right[..n]);
    let l_mat = r_mat
        .inverse()
        .ok_or_else(|| fail("eigenvectors are linearly dependent".into()))?;
    let mut left = [zero; 4];
    for (i, l) in left.iter_mut().enumerate().take(n) {
        *l = l_mat.row(i);
    }
    Ok(EigenSystem { lambdas: lam_state, right, left })
}

/// Sorted real eigenvalues of `[[a, b], [c, d]]`, or `None` if they are complex.
pub(crate) fn eig2<T: Scalar>(a: T, b: T, c: T, d: T) -> Option<(T, T)> {
    let half = T::lit(0.5);
    let m = (a + d) * half;
    let h = (a - d) * half;
    let disc = h * h + b * c;
    if !(disc >= T::zero()) {
        return None;
    }
    let s = disc.sqrt();
    Some((m - s, m + s))
}

fn null_vector2<T: Scalar>(a: &Mat<T>, lam: T) -> State<T> {
    // kernel of A - λI, taken from whichever row is better conditioned
    let r1 = State::from_slice(&[a[(0, 1)], lam - a[(0, 0)]]);
    let r2 = State::from_slice(&[lam - a[(1, 1)], a[(1, 0)]]);
    let v = if r1.norm() >= r2.norm() { r1 } else { r2 };
    if v.norm() == T::zero() {
        // A = λI on this eigen-direction: any axis works; pick the one the
        // other eigenvalue does not own
        if (a[(0, 0)] - lam).abs() <= (a[(1, 1)] - lam).abs() {
            State::unit(2, 0)
        } else {
            State::unit(2, 1)
        }
    } else {
        v
    }
}

fn fix_sign<T: Scalar>(r: State<T>) -> State<T> {
    let scale = r.norm_inf();
    for &x in r.iter() {
        if x.abs() > scale * T::lit(1e-12) {
            return if x < T::zero() { -r } else { r };
        }
    }
    r
}

fn inverse_iteration<T: Scalar>(a: &Mat<T>, lam: T, all: &[T]) -> Option<State<T>> {
    let n = a.dim();
    let gap = all
        .iter()
        .filter(|&&m| m != lam)
        .fold(T::infinity(), |g, &m| g.min((m - lam).abs()));
    let offset = (gap * T::lit(1e-6)).max(T::epsilon() * (T::one() + lam.abs()) * T::lit(64.0));
    let shifted = a.sub(&Mat::identity(n).scale(lam + offset));
    let mut v = State::zeros(n);
    for k in 0..n {
        v[k] = T::one() + T::lit(0.1) * T::from_usize_lossy(k);
    }
    for _ in 0..6 {
        let w = shifted.solve(&v)?;
        let nrm = w.norm();
        if !(nrm > T::zero()) || !nrm.is_finite() {
            return None;
        }
        v = w / nrm;
    }
    Some(v)
}

/// Eigenvalues by shifted QR iteration with deflation (n ≤ 4).
fn qr_eigenvalues<T: Scalar>(a: &Mat<T>) -> Option<Vec<T>> {
    let n = a.dim();
    let mut h: Vec<Vec<T>> = (0..n).map(|i| (0..n).map(|j| a[(i, j)]).collect()).collect();
    let mut out = Vec::with_capacity(n);
    let mut m = n;
    let mut iters = 0;
    while m > 0 {
        if m == 1 {
            out.push(h[0][0]);
            break;
        }
        if m == 2 {
            let (l1, l2) = eig2(h[0][0], h[0][1], h[1][0], h[1][1])?;
            out.push(l1);
            out.push(l2);
            break;
        }
        let last = m - 1;
        let off: T = (0..last).fold(T::zero(), |s, j| s + h[last][j].abs());
        let diag = h[last][last].abs() + h[last - 1][last - 1].abs();
        if off <= T::epsilon() * (diag + T::one()) {
            out.push(h[last][last]);
            m -= 1;
            continue;
        }
        iters += 1;
        if iters > 2000 {
            return None;
        }
        // Wilkinson-style shift from the trailing 2x2 block (real part if complex)
        let (p, q, r, s) = (h[last - 1][last - 1], h[last - 1][last], h[last][last - 1], h[last][last]);
        let mu = match eig2(p, q, r, s) {
            Some((l1, l2)) => {
                if (l1 - s).abs() < (l2 - s).abs() {
                    l1
                } else {
                    l2
                }
            }
            None => (p + s) * T::lit(0.5),
        };
        // exceptional shift every so often to break cycles
        let mu = if iters % 11 == 0 { mu + off } else { mu };
        qr_step(&mut h, m, mu);
    }
    Some(out)
}

/// One shifted QR step `H ← R Q + μ I` on the leading `m × m` block (Householder).
fn qr_step<T: Scalar>(h: &mut [Vec<T>], m: usize, mu: T) {
    let mut r: Vec<Vec<T>> = (0..m).map(|i| (0..m).map(|j| h[i][j]).collect()).collect();
    for (i, row) in r.iter_mut().enumerate() {
        row[i] = row[i] - mu;
    }
    let mut q: Vec<Vec<T>> = (0..m)
        .map(|i| (0..m).map(|j| if i == j { T::one() } else { T::zero() }).collect())
        .collect();
    for k in 0..m - 1 {
        let norm = (k..m).fold(T::zero(), |s, i| s + r[i][k] * r[i][k]).sqrt();
        if norm == T::zero() {
            continue;
        }
        let alpha = if r[k][k] > T::zero() { -norm } else { norm };
        let mut v: Vec<T> = (0..m).map(|i| if i < k { T::zero() } else { r[i][k] }).collect();
        v[k] = v[k] - alpha;
        let vn = v.iter().fold(T::zero(), |s, &x| s + x * x);
        if vn == T::zero() {
            continue;
        }
        let two = T::lit(2.0);
        for j in 0..m {
            let d = (k..m).fold(T::zero(), |s, i| s + v[i] * r[i][j]);
            let f = two * d / vn;
            for i in k..m {
                r[i][j] = r[i][j] - f * v[i];
            }
        }
        // accumulate Q = Q · H_k
        for row in q.iter_mut() {
            let d = (k..m).fold(T::zero(), |s, i| s + row[i] * v[i]);
            let f = two * d / vn;
            for i in k..m {
                row[i] = row[i] - f * v[i];
            }
        }
    }
    for i in 0..m {
        for j in 0..m {
            let mut acc = T::zero();
            for k in 0..m {
                acc = acc + r[i][k] * q[k][j];
            }
            h[i][j] = acc + if i == j { mu } else { T::zero() };
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances<f64> {
        Tolerances::standard()
    }

    #[test]
    fn diagonal_two_by_two() {
        let a = Mat::from_rows(&[&[1.0, 0.0], &[0.0, 2.0]]);
        let e = decompose(&a, &tol()).unwrap();
        assert_eq!(e.lambdas.as_slice(), &[1.0, 2.0]);
        assert_eq!(e.r(0).as_slice(), &[1.0, 0.0]);
        assert_eq!(e.r(1).as_slice(), &[0.0, 1.0]);
    }

    #[test]
    fn rotation_is_not_hyperbolic() {
        let a = Mat::from_rows(&[&[0.0, -1.0], &[1.0, 0.0]]);
        assert!(matches!(decompose(&a, &tol()), Err(Error::NonHyperbolic { .. })));
    }

    #[test]
    fn repeated_eigenvalue_is_rejected() {
        let a = Mat::from_rows(&[&[1.0, 0.0], &[0.0, 1.0]]);
        assert!(decompose(&a, &tol()).is_err());
    }

    #[test]
    fn three_by_three_general() {
        // similar to diag(-1, 0.5, 3) through a fixed non-orthogonal basis
        let p = Mat::from_rows(&[&[1.0, 2.0, 0.0], &[0.0, 1.0, 1.0], &[1.0, 0.0, 3.0]]);
        let d = Mat::diag(&[-1.0, 0.5, 3.0]);
        let a = p.matmul(&d).matmul(&p.inverse().unwrap());
        let e = decompose(&a, &tol()).unwrap();
        for (got, want) in e.lambdas.iter().zip([-1.0, 0.5, 3.0]) {
            assert!((got - want).abs() < 1e-11, "{got} vs {want}");
        }
        assert!(e.residual(&a) < 1e-9);
        for i in 0..3 {
            assert!((e.r(i).norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn four_by_four_general() {
        let p = Mat::from_rows(&[
            &[1.0, 0.3, 0.0, 0.2],
            &[0.1, 1.0, 0.5, 0.0],
            &[0.0, -0.4, 1.0, 0.3],
            &[0.2, 0.0, 0.1, 1.0],
        ]);
        let d = Mat::diag(&[-2.0, -0.5, 0.7, 1.9]);
        let a = p.matmul(&d).matmul(&p.inverse().unwrap());
        let e = decompose(&a, &tol()).unwrap();
        for (got, want) in e.lambdas.iter().zip([-2.0, -0.5, 0.7, 1.9]) {
            assert!((got - want).abs() < 1e-10);
        }
        assert!(e.residual(&a) < 1e-9);
    }
}
