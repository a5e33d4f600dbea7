//! Scalar Riemann problems by convex (concave) envelopes of the flux.

use super::{liu_margin_scalar, RiemannOptions, Wave, WaveFan};
use crate::error::{Error, Result};
use crate::linalg::State;
use crate::models::{Convexity, FluxModel};
use crate::scalar::Scalar;

pub fn solve_riemann_scalar<T: Scalar>(model: &FluxModel<T>, u_minus: &State<T>, u_plus: &State<T>) -> Result<WaveFan<T>> {
    solve_riemann_scalar_with(model, u_minus, u_plus, &RiemannOptions::default())
}

pub fn solve_riemann_scalar_with<T: Scalar>(
    model: &FluxModel<T>,
    u_minus: &State<T>,
    u_plus: &State<T>,
    opts: &RiemannOptions,
) -> Result<WaveFan<T>> {
    if model.n != 1 || u_minus.dim() != 1 || u_plus.dim() != 1 {
        return Err(Error::InvalidInput("scalar Riemann solver needs n = 1".into()));
    }
    model.check_domain(u_minus)?;
    model.check_domain(u_plus)?;
    let (ul, ur) = (u_minus[0], u_plus[0]);
    if ul == ur {
        return Ok(WaveFan::trivial(*u_minus));
    }
    let waves = match model.convexity {
        Convexity::Linear => vec![Wave::Contact { family: 0, u_l: *u_minus, u_r: *u_plus, speed: model.df1(ul) }],
        Convexity::Convex | Convexity::Concave => {
            let convex = model.convexity == Convexity::Convex;
            if (ul > ur) == convex {
                let speed = (model.f1(ur) - model.f1(ul)) / (ur - ul);
                vec![Wave::Shock { family: 0, u_l: *u_minus, u_r: *u_plus, speed, liu_margin: T::zero() }]
            } else {
                vec![rarefaction(model, ul, ur, profile_points(model))]
            }
        }
        Convexity::Unknown => envelope_waves(model, ul, ur, opts)?,
    };
    Ok(WaveFan { u_minus: *u_minus, u_plus: *u_plus, omega: vec![*u_minus, *u_plus], waves })
}

fn profile_points<T: Scalar>(model: &FluxModel<T>) -> usize {
    // f′ affine: linear interpolation of the profile in λ is exact
    match &model.poly {
        Some(c) if c.iter().skip(3).all(|&x| x == 0.0) => 2,
        _ => 129,
    }
}

fn rarefaction<T: Scalar>(model: &FluxModel<T>, a: T, b: T, points: usize) -> Wave<T> {
    let profile: Vec<(T, State<T>)> = (0..points)
        .map(|k| {
            let u = if k + 1 == points { b } else { a + (b - a) * T::from_usize_lossy(k) / T::from_usize_lossy(points - 1) };
            (model.df1(u), State::scalar(u))
        })
        .collect();
    Wave::Rarefaction {
        family: 0,
        u_l: State::scalar(a),
        u_r: State::scalar(b),
        speed_l: profile[0].0,
        speed_r: profile[points - 1].0,
        profile,
    }
}

/// Indices of the lower convex hull of `(x_k, y_k)` (x increasing), monotone chain.
pub(crate) fn lower_hull<T: Scalar>(x: &[T], y: &[T]) -> Vec<usize> {
    let mut h: Vec<usize> = Vec::with_capacity(x.len());
    for k in 0..x.len() {
        while h.len() >= 2 {
            let (i, j) = (h[h.len() - 2], h[h.len() - 1]);
            // remove j if it lies on or above the chord i-k
            let cross = (x[j] - x[i]) * (y[k] - y[i]) - (y[j] - y[i]) * (x[k] - x[i]);
            if cross <= T::zero() {
                h.pop();
            } else {
                break;
            }
        }
        h.push(k);
    }
    h
}

fn envelope_waves<T: Scalar>(model: &FluxModel<T>, ul: T, ur: T, opts: &RiemannOptions) -> Result<Vec<Wave<T>>> {
    let n = opts.n_env.max(3);
    // work in the variable w running from ul to ur; for ul > ur the concave
    // envelope in u is the convex envelope of -f in the reflected variable
    let increasing = ul < ur;
    let sign = if increasing { T::one() } else { -T::one() };
    let (lo, hi) = if increasing { (ul, ur) } else { (ur, ul) };
    let xs: Vec<T> = (0..n)
        .map(|k| if k + 1 == n { hi } else { lo + (hi - lo) * T::from_usize_lossy(k) / T::from_usize_lossy(n - 1) })
        .collect();
    let g: Vec<T> = xs.iter().map(|&x| sign * model.f1(x)).collect();
    let hull = lower_hull(&xs, &g);
    // hull edges as (vertex_a, vertex_b) in increasing x
    let mut verts: Vec<T> = hull.iter().map(|&k| xs[k]).collect();
    let adjacent: Vec<bool> = hull.windows(2).map(|w| w[1] == w[0] + 1).collect();

    // polish tangency points between a secant edge and a curved run
    let gf = |x: T| sign * model.f1(x);
    let dg = |x: T| sign * model.df1(x);
    let h = (hi - lo) / T::from_usize_lossy(n - 1);
    let m = verts.len();
    for _ in 0..3 {
        for e in 0..m - 1 {
            if adjacent[e] {
                continue;
            }
            // secant edge verts[e] -> verts[e+1]
            if e > 0 && adjacent[e - 1] {
                let b = verts[e + 1];
                verts[e] = tangent_point(&gf, &dg, b, verts[e] - h, verts[e] + h, verts[e]);
            }
            if e + 2 < m && adjacent[e + 1] {
                let a = verts[e];
                verts[e + 1] = tangent_point(&gf, &dg, a, verts[e + 1] - h, verts[e + 1] + h, verts[e + 1]);
            }
        }
    }
    verts[0] = lo;
    verts[m - 1] = hi;

    // group into waves
    let mut waves_w: Vec<(bool, T, T)> = Vec::new(); // (is_rarefaction, a, b) in w-order
    let mut e = 0;
    while e < m - 1 {
        if adjacent[e] {
            let start = e;
            while e < m - 1 && adjacent[e] {
                e += 1;
            }
            waves_w.push((true, verts[start], verts[e]));
        } else {
            waves_w.push((false, verts[e], verts[e + 1]));
            e += 1;
        }
    }
    if !increasing {
        waves_w.reverse();
        for w in waves_w.iter_mut() {
            std::mem::swap(&mut w.1, &mut w.2);
        }
    }
    let mut out = Vec::with_capacity(waves_w.len());
    for (rare, a, b) in waves_w {
        if a == b {
            continue;
        }
        if rare {
            let pts = (((b - a).abs() / h).round().to_usize().unwrap_or(2) + 1).clamp(2, n);
            let w = rarefaction(model, a, b, pts);
            out.push(w);
        } else {
            let speed = (model.f1(b) - model.f1(a)) / (b - a);
            let margin = liu_margin_scalar(model, a, b, opts.liu_samples);
            out.push(Wave::Shock {
                family: 0,
                u_l: State::scalar(a),
                u_r: State::scalar(b),
                speed,
                liu_margin: margin,
            });
        }
    }
    // merge consecutive shocks with equal speeds (collinear hull edges)
    let mut merged: Vec<Wave<T>> = Vec::with_capacity(out.len());
    for w in out {
        if let (Some(Wave::Shock { u_l, speed: s0, .. }), Wave::Shock { u_r, speed: s1, .. }) = (merged.last(), &w) {
            let tol = model.tol.order * (T::one() + s0.abs());
            if (*s0 - *s1).abs() <= tol {
                let (a, b) = (u_l[0], u_r[0]);
                let speed = (model.f1(b) - model.f1(a)) / (b - a);
                let margin = liu_margin_scalar(model, a, b, opts.liu_samples);
                merged.pop();
                merged.push(Wave::Shock { family: 0, u_l: State::scalar(a), u_r: State::scalar(b), speed, liu_margin: margin });
                continue;
            }
        }
        merged.push(w);
    }
    Ok(merged)
}

/// Solve `g′(t) = (g(t) − g(p)) / (t − p)` for `t` in `[lo, hi]` by bisection;
/// falls back to `t0` if there is no sign change.
fn tangent_point<T: Scalar>(g: &dyn Fn(T) -> T, dg: &dyn Fn(T) -> T, p: T, lo: T, hi: T, t0: T) -> T {
    let phi = |t: T| if t == p { T::zero() } else { dg(t) * (t - p) - (g(t) - g(p)) };
    let (mut a, mut b) = (lo, hi);
    // keep the bracket on one side of p
    if p >= a && p <= b {
        return t0;
    }
    let (mut fa, fb) = (phi(a), phi(b));
    if !(fa * fb <= T::zero()) {
        return t0;
    }
    for _ in 0..200 {
        let mid = (a + b) * T::lit(0.5);
        if mid <= a || mid >= b {
            break;
        }
        let fm = phi(mid);
        if (fm <= T::zero()) == (fa <= T::zero()) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    (a + b) * T::lit(0.5)
}
