//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;
use slowman::interval::Interval;
use slowman::prelude::*;
use slowman::system::HopfParameters;

pub fn exact(v: f64) -> BigRational {
    BigRational::from_float(v).expect("finite")
}

/// Whether the exact rational `q` lies in `r`.
pub fn encloses(r: Interval, q: &BigRational) -> bool {
    exact(r.lo()) <= *q && *q <= exact(r.hi())
}

/// A finite double with a random sign and a magnitude spread over many binades.
pub fn wide_f64<R: Rng>(rng: &mut R) -> f64 {
    let m: f64 = rng.gen_range(1.0..2.0);
    let e: i32 = rng.gen_range(-30..30);
    let s = if rng.gen_bool(0.5) { -1.0 } else { 1.0 };
    s * m * 2f64.powi(e)
}

pub fn random_interval<R: Rng>(rng: &mut R) -> Interval {
    let a = wide_f64(rng);
    let b = if rng.gen_bool(0.2) { a } else { a + wide_f64(rng).abs() };
    Interval::new(a.min(b), a.max(b)).unwrap()
}

/// A double inside `x`, endpoints included with positive probability.
pub fn member<R: Rng>(rng: &mut R, x: Interval) -> f64 {
    match rng.gen_range(0..4) {
        0 => x.lo(),
        1 => x.hi(),
        _ => {
            let t: f64 = rng.gen();
            (x.lo() + t * (x.hi() - x.lo())).clamp(x.lo(), x.hi())
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
    Sqr,
    Sqrt,
    Neg,
    Abs,
}

pub const OPS: [Op; 8] = [Op::Add, Op::Sub, Op::Mul, Op::Div, Op::Sqr, Op::Sqrt, Op::Neg, Op::Abs];

/// One containment trial: the exact result at sampled members must lie in
/// the interval result. Returns `None` when the operation is undefined.
pub fn containment_trial<R: Rng>(rng: &mut R, op: Op) -> Option<bool> {
    let x = random_interval(rng);
    let y = random_interval(rng);
    let (u, v) = (member(rng, x), member(rng, y));
    let (eu, ev) = (exact(u), exact(v));
    let ok = match op {
        Op::Add => encloses(x + y, &(eu + ev)),
        Op::Sub => encloses(x - y, &(eu - ev)),
        Op::Mul => encloses(x * y, &(eu * ev)),
        Op::Div => {
            let r = x.checked_div(y).ok()?;
            if ev.is_zero() {
                return None;
            }
            encloses(r, &(eu / ev))
        }
        Op::Sqr => encloses(x.sqr(), &(eu.clone() * eu)),
        Op::Sqrt => {
            let x = x.abs();
            let u = member(rng, x);
            let r = x.sqrt().ok()?;
            let eu = exact(u);
            exact(r.lo()) * exact(r.lo()) <= eu && eu <= exact(r.hi()) * exact(r.hi()) && r.lo() >= 0.0
        }
        Op::Neg => encloses(-x, &(-eu)),
        Op::Abs => encloses(x.abs(), &(if eu < BigRational::zero() { -eu } else { eu })),
    };
    Some(ok)
}

pub fn strip_params() -> HopfParameters {
    HopfParameters::Rescaled(RescaledParams {
        mu: 0.01,
        a: -0.05,
        b: 0.001,
        c: 0.1,
    })
}

pub fn strip_domain() -> Domain2 {
    Domain2::new(0.01, 0.2, -0.01, 0.01).unwrap()
}

/// `K_ε` over the strip at mesh parameter `d`.
pub fn strip_approximation(d: u32, eps: f64) -> (SingularHopf, LiftedSurface) {
    let sys = strip_params().at(eps, Branch::Plus).unwrap();
    let pts = generate_vertices(&strip_domain(), d, |y, z| sys.kappa(y, z)).unwrap();
    let mesh = Arc::new(triangulate(&pts).unwrap());
    let k0 = lift(&mesh, |y, z| sys.h0_at(y, z)).unwrap();
    let keps = build_approximation(&k0, &sys).unwrap();
    (sys, keps)
}

/// `F·n` in plain floating point at `n` barycentric samples of a face.
pub fn sampled_signs<S: SlowFastSystem + ?Sized>(sys: &S, v: [[f64; 3]; 3], per_side: usize) -> Vec<f64> {
    let n = slowman::transversality::face_normal(v[0], v[1], v[2]).unwrap().mid();
    let mut out = Vec::new();
    for i in 0..=per_side {
        for j in 0..=per_side - i {
            let (l1, l2) = (i as f64 / per_side as f64, j as f64 / per_side as f64);
            let l0 = 1.0 - l1 - l2;
            let p: [f64; 3] = std::array::from_fn(|k| l0 * v[0][k] + l1 * v[1][k] + l2 * v[2][k]);
            let f = sys.eval_field(&IntervalVec3::from_point(p)).unwrap().mid();
            out.push(f[0] * n[0] + f[1] * n[1] + f[2] * n[2]);
        }
    }
    out
}
