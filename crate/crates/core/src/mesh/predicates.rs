//! Filtered geometric predicates in the `(y, z)` plane.
//!
//! Each predicate is first evaluated in interval arithmetic; only when the
//! enclosure straddles zero is the determinant recomputed exactly over the
//! rationals.

use std::cmp::Ordering;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::interval::{Interval, SignClass};

pub type Point2 = [f64; 2];

fn exact(v: f64) -> BigRational {
    BigRational::from_float(v).expect("finite coordinate")
}

fn sign_of(v: &BigRational) -> Ordering {
    if v.is_zero() {
        Ordering::Equal
    } else if v.is_positive() {
        Ordering::Greater
    } else {
        Ordering::Less
    }
}

fn class_to_ordering(c: SignClass) -> Option<Ordering> {
    match c {
        SignClass::Positive => Some(Ordering::Greater),
        SignClass::Negative => Some(Ordering::Less),
        SignClass::Straddles => None,
    }
}

/// Sign of `(b - a) × (c - a)`: `Greater` for a counterclockwise turn.
pub fn orient2d(a: Point2, b: Point2, c: Point2) -> Ordering {
    let p = Interval::point;
    let det = (p(b[0]) - p(a[0])) * (p(c[1]) - p(a[1])) - (p(b[1]) - p(a[1])) * (p(c[0]) - p(a[0]));
    if let Some(s) = class_to_ordering(det.sign_class()) {
        return s;
    }
    orient2d_exact(a, b, c)
}

pub fn orient2d_exact(a: Point2, b: Point2, c: Point2) -> Ordering {
    let (ax, ay) = (exact(a[0]), exact(a[1]));
    let det = (exact(b[0]) - &ax) * (exact(c[1]) - &ay) - (exact(b[1]) - &ay) * (exact(c[0]) - &ax);
    sign_of(&det)
}

/// Unperturbed in-circle test: `Greater` iff `d` lies strictly inside the
/// circle through the counterclockwise triangle `a, b, c`.
pub fn incircle(a: Point2, b: Point2, c: Point2, d: Point2) -> Ordering {
    let p = Interval::point;
    let row = |q: Point2| {
        let dx = p(q[0]) - p(d[0]);
        let dy = p(q[1]) - p(d[1]);
        (dx, dy, dx.sqr() + dy.sqr())
    };
    let (ax, ay, aw) = row(a);
    let (bx, by, bw) = row(b);
    let (cx, cy, cw) = row(c);
    let det = ax * (by * cw - bw * cy) - ay * (bx * cw - bw * cx) + aw * (bx * cy - by * cx);
    if let Some(s) = class_to_ordering(det.sign_class()) {
        return s;
    }
    incircle_exact(a, b, c, d)
}

pub fn incircle_exact(a: Point2, b: Point2, c: Point2, d: Point2) -> Ordering {
    let (dx0, dy0) = (exact(d[0]), exact(d[1]));
    let row = |q: Point2| {
        let dx = exact(q[0]) - &dx0;
        let dy = exact(q[1]) - &dy0;
        let w = &dx * &dx + &dy * &dy;
        (dx, dy, w)
    };
    let (ax, ay, aw) = row(a);
    let (bx, by, bw) = row(b);
    let (cx, cy, cw) = row(c);
    let det = &ax * (&by * &cw - &bw * &cy) - &ay * (&bx * &cw - &bw * &cx) + &aw * (&bx * &cy - &by * &cx);
    sign_of(&det)
}

fn lex_cmp(p: Point2, q: Point2) -> Ordering {
    p[0].total_cmp(&q[0]).then(p[1].total_cmp(&q[1]))
}

/// In-circle test under a symbolic perturbation that never returns `Equal`
/// for distinct points.
///
/// Each point's paraboloid lift `y² + z²` is raised by an infinitesimal whose
/// magnitude is ordered by the lexicographic `(y, z)` order of the points, the
/// lexicographically largest point receiving the dominant term. For a
/// cocircular quadruple the sign is then the sign of the lift cofactor of
/// that dominant point, `(-1)^r · orient(other three)` where `r` is its row in
/// `(a, b, c, d)`. The rule depends only on coordinates, never on insertion
/// order, so the resulting triangulation is unique.
pub fn incircle_perturbed(a: Point2, b: Point2, c: Point2, d: Point2) -> Ordering {
    let s = incircle(a, b, c, d);
    if s != Ordering::Equal {
        return s;
    }
    let pts = [a, b, c, d];
    let mut top = 0;
    for r in 1..4 {
        if lex_cmp(pts[r], pts[top]) == Ordering::Greater {
            top = r;
        }
    }
    let others: Vec<Point2> = (0..4).filter(|&r| r != top).map(|r| pts[r]).collect();
    let o = orient2d(others[0], others[1], others[2]);
    if top % 2 == 0 {
        o
    } else {
        o.reverse()
    }
}

/// `true` iff `p` lies strictly inside the segment `ab`, given collinearity.
pub fn strictly_between(a: Point2, b: Point2, p: Point2) -> bool {
    let along = |k: usize| (a[k] < p[k] && p[k] < b[k]) || (b[k] < p[k] && p[k] < a[k]);
    if a[0] != b[0] {
        along(0)
    } else {
        along(1)
    }
}
