use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use slowman::mesh::triangulate;

fn q(v: f64) -> BigRational {
    BigRational::from_float(v).unwrap()
}

/// Exact test: is `d` strictly inside the circumcircle of the counter-clockwise triangle `abc`?
fn strictly_inside(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let row = |p: [f64; 2]| {
        let (x, y) = (q(p[0]) - q(d[0]), q(p[1]) - q(d[1]));
        let w = x.clone() * x.clone() + y.clone() * y.clone();
        (x, y, w)
    };
    let (ax, ay, aw) = row(a);
    let (bx, by, bw) = row(b);
    let (cx, cy, cw) = row(c);
    let det = ax * (by.clone() * cw.clone() - bw.clone() * cy.clone()) - ay * (bx.clone() * cw - bw * cx.clone())
        + aw * (bx * cy - by * cx);
    det > BigRational::from_integer(0.into())
}

fn orientation(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> BigRational {
    (q(b[0]) - q(a[0])) * (q(c[1]) - q(a[1])) - (q(b[1]) - q(a[1])) * (q(c[0]) - q(a[0]))
}

#[test]
fn random_points_satisfy_empty_circumcircle() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    for _ in 0..3 {
        let pts: Vec<[f64; 2]> = (0..100).map(|_| [rng.gen(), rng.gen()]).collect();
        let mesh = triangulate(&pts).unwrap();
        let zero = BigRational::from_integer(0.into());
        for f in mesh.faces() {
            let [a, b, c] = f.map(|i| pts[i]);
            let o = orientation(a, b, c);
            assert!(o != zero, "degenerate face");
            let (b, c) = if o > zero { (b, c) } else { (c, b) };
            for (k, p) in pts.iter().enumerate() {
                if f.contains(&k) {
                    continue;
                }
                assert!(!strictly_inside(a, b, c, *p), "point {k} inside circumcircle of {f:?}");
            }
        }
        // A planar triangulation of a point set in general position.
        assert_eq!(mesh.euler_characteristic(), 1);
    }
}

#[test]
fn grid_columns_triangulate_completely() {
    let mut pts = Vec::new();
    for i in 0..7 {
        for j in 0..5 {
            pts.push([i as f64 * 0.125, j as f64 * 0.25]);
        }
    }
    let mesh = triangulate(&pts).unwrap();
    // A convex point set with h hull vertices has 2n - h - 2 triangles.
    let hull = 2 * (7 + 5) - 4;
    assert_eq!(mesh.num_faces(), 2 * pts.len() - hull - 2);
}
