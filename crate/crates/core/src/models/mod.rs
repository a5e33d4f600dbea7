//! Flux models `u_t + f(u)_x = 0`, their eigenstructure and entropy pairs.

mod builtin;
mod classify;
mod eigen;

use std::fmt;
use std::sync::Arc;

pub use builtin::{advection, burgers, cubic, from_name, linear2, psystem, quartic, scalar_poly};
pub use classify::{
    classify_field, entropy_compatibility_residual, entropy_hessian_min_eigenvalue, FieldClass,
    FieldTag,
};
pub use eigen::{decompose, EigenSystem};
pub(crate) use classify::lambda_derivative;

use crate::error::{Error, Result};
use crate::linalg::{Mat, State};
use crate::scalar::{fd_step_at, Scalar, Tolerances};

pub type VecFn<T> = Arc<dyn Fn(&State<T>) -> State<T> + Send + Sync>;
pub type MatFn<T> = Arc<dyn Fn(&State<T>) -> Mat<T> + Send + Sync>;
pub type RealFn<T> = Arc<dyn Fn(&State<T>) -> T + Send + Sync>;

/// Entropy `η` with entropy flux `q`, `Dη·Df = Dq`.
#[derive(Clone)]
pub struct EntropyPair<T> {
    pub eta: RealFn<T>,
    pub q: RealFn<T>,
    pub strictly_convex: bool,
}

/// States admitted by a model.
///
/// `lo`/`hi` are open hard bounds (possibly infinite); `sample_lo`/`sample_hi`
/// is a finite box on which invariants are checked.
#[derive(Debug, Clone, Copy)]
pub struct DomainBox<T> {
    pub lo: State<T>,
    pub hi: State<T>,
    pub sample_lo: State<T>,
    pub sample_hi: State<T>,
}

impl<T: Scalar> DomainBox<T> {
    pub fn unbounded(n: usize, sample_half_width: T) -> Self {
        let mut lo = State::zeros(n);
        let mut hi = State::zeros(n);
        let mut slo = State::zeros(n);
        let mut shi = State::zeros(n);
        for k in 0..n {
            lo[k] = T::neg_infinity();
            hi[k] = T::infinity();
            slo[k] = -sample_half_width;
            shi[k] = sample_half_width;
        }
        Self { lo, hi, sample_lo: slo, sample_hi: shi }
    }

    pub fn contains(&self, u: &State<T>) -> bool {
        u.dim() == self.lo.dim()
            && (0..u.dim()).all(|k| u[k] > self.lo[k] && u[k] < self.hi[k])
    }

    /// Tensor grid of `per_dim` points per coordinate over the sample box.
    pub fn samples(&self, per_dim: usize) -> Vec<State<T>> {
        let n = self.lo.dim();
        let per_dim = per_dim.max(2);
        let total = per_dim.pow(n as u32);
        let step = |k: usize, i: usize| {
            let a = self.sample_lo[k];
            let b = self.sample_hi[k];
            a + (b - a) * T::from_usize_lossy(i) / T::from_usize_lossy(per_dim - 1)
        };
        (0..total)
            .map(|mut idx| {
                let mut u = State::zeros(n);
                for k in 0..n {
                    u[k] = step(k, idx % per_dim);
                    idx /= per_dim;
                }
                u
            })
            .collect()
    }
}

/// Known shape of a scalar flux, used to pick fast Riemann-solver paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Convexity {
    Convex,
    Concave,
    Linear,
    Unknown,
}

/// A system of conservation laws `u_t + f(u)_x = 0` in `n ≤ 4` unknowns.
#[derive(Clone)]
pub struct FluxModel<T> {
    pub name: String,
    pub n: usize,
    flux: VecFn<T>,
    jacobian: Option<MatFn<T>>,
    pub entropy: Option<EntropyPair<T>>,
    diffusion: Option<MatFn<T>>,
    pub domain: DomainBox<T>,
    /// Scalar models only.
    pub convexity: Convexity,
    /// Polynomial coefficients `c₀ + c₁u + …` for scalar polynomial fluxes,
    /// enabling exact-arithmetic evaluation.
    pub poly: Option<Vec<f64>>,
    pub tol: Tolerances<T>,
}

impl<T: Scalar> fmt::Debug for FluxModel<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FluxModel")
            .field("name", &self.name)
            .field("n", &self.n)
            .field("analytic_jacobian", &self.jacobian.is_some())
            .field("entropy", &self.entropy.is_some())
            .field("diffusion", &self.diffusion.is_some())
            .field("domain", &self.domain)
            .field("convexity", &self.convexity)
            .finish()
    }
}

impl<T: Scalar> FluxModel<T> {
    /// A model from a flux closure; everything else defaults (finite-difference
    /// Jacobian, no entropy, unbounded domain sampled on `[-2, 2]ⁿ`).
    pub fn new(
        name: impl Into<String>,
        n: usize,
        flux: impl Fn(&State<T>) -> State<T> + Send + Sync + 'static,
    ) -> Self {
        assert!((1..=crate::MAX_DIM).contains(&n));
        Self {
            name: name.into(),
            n,
            flux: Arc::new(flux),
            jacobian: None,
            entropy: None,
            diffusion: None,
            domain: DomainBox::unbounded(n, T::lit(2.0)),
            convexity: Convexity::Unknown,
            poly: None,
            tol: Tolerances::standard(),
        }
    }

    pub fn with_jacobian(mut self, j: impl Fn(&State<T>) -> Mat<T> + Send + Sync + 'static) -> Self {
        self.jacobian = Some(Arc::new(j));
        self
    }

    pub fn with_entropy(
        mut self,
        eta: impl Fn(&State<T>) -> T + Send + Sync + 'static,
        q: impl Fn(&State<T>) -> T + Send + Sync + 'static,
        strictly_convex: bool,
    ) -> Self {
        self.entropy = Some(EntropyPair { eta: Arc::new(eta), q: Arc::new(q), strictly_convex });
        self
    }

    pub fn with_diffusion(mut self, b: impl Fn(&State<T>) -> Mat<T> + Send + Sync + 'static) -> Self {
        self.diffusion = Some(Arc::new(b));
        self
    }

    pub fn without_diffusion(mut self) -> Self {
        self.diffusion = None;
        self
    }

    pub fn with_domain(mut self, domain: DomainBox<T>) -> Self {
        self.domain = domain;
        self
    }

    pub fn with_convexity(mut self, c: Convexity) -> Self {
        self.convexity = c;
        self
    }

    pub fn with_tolerances(mut self, tol: Tolerances<T>) -> Self {
        self.tol = tol;
        self
    }

    pub fn is_scalar(&self) -> bool {
        self.n == 1
    }

    pub fn has_analytic_jacobian(&self) -> bool {
        self.jacobian.is_some()
    }

    #[inline]
    pub fn flux(&self, u: &State<T>) -> State<T> {
        (self.flux)(u)
    }

    /// Scalar flux evaluation.
    #[inline]
    pub fn f1(&self, u: T) -> T {
        (self.flux)(&State::scalar(u))[0]
    }

    /// `Df(u)`, analytic if supplied, central differences otherwise.
    pub fn jacobian(&self, u: &State<T>) -> Mat<T> {
        if let Some(j) = &self.jacobian {
            return j(u);
        }
        let mut m = Mat::zeros(self.n);
        for k in 0..self.n {
            let h = fd_step_at(u[k]);
            let mut up = *u;
            let mut dn = *u;
            up[k] = up[k] + h;
            dn[k] = dn[k] - h;
            let d = (self.flux(&up) - self.flux(&dn)) / (h + h);
            for i in 0..self.n {
                m[(i, k)] = d[i];
            }
        }
        m
    }

    /// Scalar `f′(u)`.
    #[inline]
    pub fn df1(&self, u: T) -> T {
        self.jacobian(&State::scalar(u))[(0, 0)]
    }

    /// Diffusion matrix `B(u)`; identity when the model does not define one.
    pub fn diffusion(&self, u: &State<T>) -> Mat<T> {
        match &self.diffusion {
            Some(b) => b(u),
            None => Mat::identity(self.n),
        }
    }

    pub fn has_diffusion(&self) -> bool {
        self.diffusion.is_some()
    }

    pub fn check_domain(&self, u: &State<T>) -> Result<()> {
        if u.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: u.dim() });
        }
        if !self.domain.contains(u) {
            return Err(Error::OutOfDomain { state: u.to_f64_vec() });
        }
        Ok(())
    }

    pub fn eigensystem(&self, u: &State<T>) -> Result<EigenSystem<T>> {
        self.check_domain(u)?;
        decompose(&self.jacobian(u), &self.tol).map_err(|e| match e {
            Error::NonHyperbolic { reason, .. } => {
                Error::NonHyperbolic { state: u.to_f64_vec(), reason }
            }
            other => other,
        })
    }

    /// Eigenvalue `λ_i(u)`.
    pub fn lambda(&self, i: usize, u: &State<T>) -> Result<T> {
        if self.n == 1 {
            self.check_domain(u)?;
            return Ok(self.jacobian(u)[(0, 0)]);
        }
        Ok(self.eigensystem(u)?.lambda(i))
    }

    pub fn eta(&self, u: &State<T>) -> Result<T> {
        Ok((self.entropy.as_ref().ok_or(Error::MissingEntropyPair)?.eta)(u))
    }

    pub fn q(&self, u: &State<T>) -> Result<T> {
        Ok((self.entropy.as_ref().ok_or(Error::MissingEntropyPair)?.q)(u))
    }

    /// Check strict hyperbolicity on `per_dim`-point sample grid.
    pub fn validate(&self, per_dim: usize) -> Result<()> {
        for u in self.domain.samples(per_dim) {
            self.eigensystem(&u)?;
        }
        Ok(())
    }

    /// Largest `|λ_i|` over the sample grid.
    pub fn max_speed(&self, per_dim: usize) -> Result<T> {
        let mut m = T::zero();
        for u in self.domain.samples(per_dim) {
            let e = self.eigensystem(&u)?;
            m = m.max(e.lambdas.norm_inf());
        }
        Ok(m)
    }

    /// Coordinate change `x̃ = x + Mt`, `t̃ = 2Mt`, mapping speeds in `[-M, M]` to `[0, 1]`.
    pub fn normalize_speeds(&self, m: T) -> Result<Self> {
        self.normalize_speeds_to(m, T::zero(), T::one())
    }

    /// Affine speed map taking `[-M, M]` onto `[lo, hi]`:
    /// `f̃ = a f + b u` with `a = (hi - lo)/(2M)`, `b = (lo + hi)/2`.
    pub fn normalize_speeds_to(&self, m: T, lo: T, hi: T) -> Result<Self> {
        if !(m > T::zero()) || !(hi > lo) {
            return Err(Error::InvalidInput("speed bound must be positive and target range nonempty".into()));
        }
        let slack = self.tol.order * (T::one() + m);
        for u in self.domain.samples(self.default_sample_density()) {
            let e = self.eigensystem(&u)?;
            for &l in e.lambdas.iter() {
                if l.abs() > m + slack {
                    return Err(Error::SpeedBoundViolated { speed: l.to_f64_lossy(), bound: m.to_f64_lossy() });
                }
            }
        }
        let a = (hi - lo) / (m + m);
        let b = (lo + hi) * T::lit(0.5);
        let base = self.clone();
        let f = base.flux.clone();
        let mut out = self.clone();
        out.name = format!("{}~[{},{}]", self.name, lo, hi);
        out.flux = Arc::new(move |u| f(u) * a + *u * b);
        let jb = base.clone();
        out.jacobian = Some(Arc::new(move |u| {
            let n = u.dim();
            jb.jacobian(u).scale(a).add(&Mat::identity(n).scale(b))
        }));
        if let Some(ep) = &self.entropy {
            let eta = ep.eta.clone();
            let q = ep.q.clone();
            let eta2 = eta.clone();
            out.entropy = Some(EntropyPair {
                eta,
                q: Arc::new(move |u| q(u) * a + eta2(u) * b),
                strictly_convex: ep.strictly_convex,
            });
        }
        if let Some(bm) = &self.diffusion {
            let bm = bm.clone();
            out.diffusion = Some(Arc::new(move |u| bm(u).scale(a)));
        }
        out.poly = self.poly.as_ref().map(|c| {
            let (af, bf) = (a.to_f64_lossy(), b.to_f64_lossy());
            let mut c: Vec<f64> = c.iter().map(|x| x * af).collect();
            if c.len() < 2 {
                c.resize(2, 0.0);
            }
            c[1] += bf;
            c
        });
        Ok(out)
    }

    pub(crate) fn default_sample_density(&self) -> usize {
        match self.n {
            1 => 201,
            2 => 21,
            3 => 9,
            _ => 6,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn burgers_eigen() {
        let m = burgers::<f64>();
        let e = m.eigensystem(&State::scalar(3.0)).unwrap();
        assert_eq!(e.lambda(0), 3.0);
        assert_eq!(e.r(0)[0], 1.0);
        assert_eq!(e.l(0)[0], 1.0);
    }

    #[test]
    fn normalized_burgers_speeds() {
        let m = burgers::<f64>()
            .with_domain(DomainBox::unbounded(1, 1.0))
            .normalize_speeds(1.0)
            .unwrap();
        for (u, want) in [(-1.0, 0.0), (0.0, 0.5), (1.0, 1.0)] {
            assert!((m.df1(u) - want).abs() < 1e-14);
            let expected = (u * u / 2.0 + u) / 2.0;
            assert!((m.f1(u) - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn speed_bound_violation_is_reported() {
        let m = burgers::<f64>();
        assert!(matches!(m.normalize_speeds(1.0), Err(Error::SpeedBoundViolated { .. })));
    }

    #[test]
    fn sample_grid_covers_box_corners() {
        let d = DomainBox::<f64>::unbounded(2, 1.0);
        let s = d.samples(3);
        assert_eq!(s.len(), 9);
        assert_eq!(s[0].as_slice(), &[-1.0, -1.0]);
        assert_eq!(s[8].as_slice(), &[1.0, 1.0]);
    }
}
