//! Built-in flux models and the name parser used by configs and the CLI.

use super::{Convexity, DomainBox, FluxModel};
use crate::error::{Error, Result};
use crate::linalg::{Mat, State};
use crate::scalar::Scalar;

fn horner<T: Scalar>(c: &[T], x: T) -> T {
    c.iter().rev().fold(T::zero(), |acc, &a| acc * x + a)
}

/// Scalar polynomial flux `f(u) = Σ c_k u^k` with entropy `η = u²`,
/// `q(u) = ∫ 2u f′(u) du`.
pub fn scalar_poly<T: Scalar>(name: &str, coeffs: &[f64]) -> FluxModel<T> {
    let c: Vec<T> = coeffs.iter().map(|&x| T::lit(x)).collect();
    let dc: Vec<T> = c
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &a)| a * T::from_usize_lossy(k))
        .collect();
    // q′ = 2u f′ = Σ 2k c_k u^k  =>  q = Σ 2k c_k u^{k+1}/(k+1)
    let mut qc = vec![T::zero(); c.len() + 1];
    for (k, &a) in c.iter().enumerate().skip(1) {
        let kk = T::from_usize_lossy(k);
        qc[k + 1] = T::lit(2.0) * kk * a / (kk + T::one());
    }
    let d2: Vec<T> = dc
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &a)| a * T::from_usize_lossy(k))
        .collect();
    let convexity = poly_convexity(&d2);
    let (cf, cj) = (c.clone(), dc);
    FluxModel::new(name, 1, move |u: &State<T>| State::scalar(horner(&cf, u[0])))
        .with_jacobian(move |u| Mat::scalar(horner(&cj, u[0])))
        .with_entropy(|u| u[0] * u[0], move |u| horner(&qc, u[0]), true)
        .with_convexity(convexity)
        .with_poly(coeffs.to_vec())
}

fn poly_convexity<T: Scalar>(d2: &[T]) -> Convexity {
    if d2.iter().all(|&a| a == T::zero()) {
        return Convexity::Linear;
    }
    // only recognise the shapes the built-ins produce: a constant second
    // derivative, or an even monomial
    let nz: Vec<(usize, T)> = d2.iter().copied().enumerate().filter(|(_, a)| *a != T::zero()).collect();
    if nz.len() == 1 && nz[0].0 % 2 == 0 {
        return if nz[0].1 > T::zero() { Convexity::Convex } else { Convexity::Concave };
    }
    Convexity::Unknown
}

impl<T: Scalar> FluxModel<T> {
    pub(crate) fn with_poly(mut self, c: Vec<f64>) -> Self {
        self.poly = Some(c);
        self
    }
}

/// `f(u) = u²/2`.
pub fn burgers<T: Scalar>() -> FluxModel<T> {
    scalar_poly("burgers", &[0.0, 0.0, 0.5])
}

/// `f(u) = u³`.
pub fn cubic<T: Scalar>() -> FluxModel<T> {
    scalar_poly("cubic", &[0.0, 0.0, 0.0, 1.0])
}

/// `f(u) = u⁴/4`.
pub fn quartic<T: Scalar>() -> FluxModel<T> {
    scalar_poly("quartic", &[0.0, 0.0, 0.0, 0.0, 0.25])
}

/// `f(u) = c u`.
pub fn advection<T: Scalar>(c: f64) -> FluxModel<T> {
    let mut m = scalar_poly(&format!("advection:{c}"), &[0.0, c]);
    m.convexity = Convexity::Linear;
    m
}

/// The p-system `v_t − u_x = 0`, `u_t + p(v)_x = 0` with `p(v) = k v^{−γ}`.
///
/// State is `(v, u)`. Entropy `η = u²/2 + P(v)` with `P′ = −p`, flux `q = u p(v)`.
pub fn psystem<T: Scalar>(k: f64, gamma: f64) -> Result<FluxModel<T>> {
    if !(k > 0.0) || !(gamma >= 1.0) {
        return Err(Error::InvalidModel(format!("psystem needs k > 0 and gamma >= 1 (got {k}, {gamma})")));
    }
    let kk = T::lit(k);
    let g = T::lit(gamma);
    let int_gamma = (gamma.fract() == 0.0 && gamma <= 8.0).then_some(gamma as i32);
    // p and p′ with powi where possible so that integer exponents stay exact-ish
    let pw = move |v: T, e: i32, fe: T| match int_gamma {
        Some(_) => v.powi(e),
        None => v.powf(fe),
    };
    let ig = int_gamma.unwrap_or(0);
    let p = move |v: T| kk * pw(v, -ig, -g);
    let dp = move |v: T| -g * kk * pw(v, -ig - 1, -g - T::one());
    let pot = move |v: T| {
        if gamma == 1.0 {
            -kk * v.ln()
        } else {
            kk * pw(v, 1 - ig, T::one() - g) / (g - T::one())
        }
    };
    let mut domain = DomainBox::unbounded(2, T::one());
    domain.lo[0] = T::zero();
    domain.sample_lo[0] = T::lit(0.5);
    domain.sample_hi[0] = T::lit(2.0);
    let m = FluxModel::new(format!("psystem:{k},{gamma}"), 2, move |s: &State<T>| {
        State::from_slice(&[-s[1], p(s[0])])
    })
    .with_jacobian(move |s| Mat::from_rows(&[&[T::zero(), -T::one()], &[dp(s[0]), T::zero()]]))
    .with_entropy(
        move |s| s[1] * s[1] * T::lit(0.5) + pot(s[0]),
        move |s| s[1] * p(s[0]),
        true,
    )
    .with_domain(domain);
    Ok(m)
}

/// Constant-coefficient system `f(u) = A u`.
///
/// Carries the quadratic entropy `η = ½ Σ (l_i·u)²`, `q = ½ Σ λ_i (l_i·u)²`.
pub fn linear2<T: Scalar>(a11: f64, a12: f64, a21: f64, a22: f64) -> Result<FluxModel<T>> {
    let a = Mat::from_rows(&[&[T::lit(a11), T::lit(a12)], &[T::lit(a21), T::lit(a22)]]);
    let e = super::decompose(&a, &crate::Tolerances::standard()).map_err(|_| {
        Error::InvalidModel(format!("linear2:{a11},{a12},{a21},{a22} is not strictly hyperbolic"))
    })?;
    let e2 = e;
    let m = FluxModel::new(format!("linear2:{a11},{a12},{a21},{a22}"), 2, move |u: &State<T>| a.mul_vec(u))
        .with_jacobian(move |_| a)
        .with_entropy(
            move |u| {
                let c = e.project(u);
                (c[0] * c[0] + c[1] * c[1]) * T::lit(0.5)
            },
            move |u| {
                let c = e2.project(u);
                (e2.lambda(0) * c[0] * c[0] + e2.lambda(1) * c[1] * c[1]) * T::lit(0.5)
            },
            true,
        );
    Ok(m)
}

/// Parse a model name: `burgers`, `cubic`, `quartic`, `advection:c`,
/// `psystem[:k,gamma]`, `linear2:a11,a12,a21,a22`.
pub fn from_name<T: Scalar>(name: &str) -> Result<FluxModel<T>> {
    let (head, args) = match name.split_once(':') {
        Some((h, a)) => (h.trim(), Some(a)),
        None => (name.trim(), None),
    };
    let nums = |want: usize| -> Result<Vec<f64>> {
        let a = args.ok_or_else(|| Error::InvalidModel(format!("{head} needs {want} parameter(s)")))?;
        let v: std::result::Result<Vec<f64>, _> = a.split(',').map(|s| s.trim().parse::<f64>()).collect();
        let v = v.map_err(|e| Error::InvalidModel(format!("bad parameter in {name:?}: {e}")))?;
        if v.len() != want || v.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidModel(format!("{head} needs {want} finite parameter(s), got {:?}", v)));
        }
        Ok(v)
    };
    let no_args = |m: FluxModel<T>| -> Result<FluxModel<T>> {
        if args.is_some() {
            return Err(Error::InvalidModel(format!("{head} takes no parameters")));
        }
        Ok(m)
    };
    match head {
        "burgers" => no_args(burgers()),
        "cubic" => no_args(cubic()),
        "quartic" => no_args(quartic()),
        "advection" => Ok(advection(nums(1)?[0])),
        "psystem" => match args {
            None => psystem(1.0, 2.0),
            Some(_) => {
                let v = nums(2)?;
                psystem(v[0], v[1])
            }
        },
        "linear2" => {
            let v = nums(4)?;
            linear2(v[0], v[1], v[2], v[3])
        }
        other => Err(Error::InvalidModel(format!("unknown model {other:?}"))),
    }
}
