//! Incremental Bowyer–Watson Delaunay triangulation.
//!
//! The convex hull is closed with ghost triangles `[u, v, ∞]`, so points
//! outside the current hull are handled by the same cavity retriangulation as
//! interior points. A ghost conflicts with `p` when `p` lies strictly outside
//! its hull edge, or on the edge line strictly between its endpoints.
//! Cocircular configurations are resolved by
//! [`incircle_perturbed`](super::predicates::incircle_perturbed).

use std::cmp::Ordering;
use std::collections::HashMap;

use super::predicates::{incircle_perturbed, orient2d, strictly_between, Point2};
use crate::error::{Error, Result};

const GHOST: u32 = u32::MAX;
const NONE: u32 = u32::MAX;

struct Triangulation<'a> {
    pts: &'a [Point2],
    verts: Vec<[u32; 3]>,
    nbrs: Vec<[u32; 3]>,
    alive: Vec<bool>,
    stamp: Vec<u32>,
    epoch: u32,
    last: u32,
}

impl<'a> Triangulation<'a> {
    fn is_ghost(&self, t: u32) -> bool {
        self.verts[t as usize][2] == GHOST
    }

    fn pt(&self, v: u32) -> Point2 {
        self.pts[v as usize]
    }

    fn conflicts(&self, t: u32, p: Point2) -> bool {
        let [a, b, c] = self.verts[t as usize];
        if c == GHOST {
            let (pa, pb) = (self.pt(a), self.pt(b));
            match orient2d(pa, pb, p) {
                Ordering::Greater => true,
                Ordering::Less => false,
                Ordering::Equal => strictly_between(pa, pb, p),
            }
        } else {
            incircle_perturbed(self.pt(a), self.pt(b), self.pt(c), p) == Ordering::Greater
        }
    }

    fn seed(pts: &'a [Point2], a: u32, b: u32, c: u32) -> Self {
        let (a, b, c) = if orient2d(pts[a as usize], pts[b as usize], pts[c as usize]) == Ordering::Greater {
            (a, b, c)
        } else {
            (a, c, b)
        };
        let verts = vec![[a, b, c], [b, a, GHOST], [c, b, GHOST], [a, c, GHOST]];
        let mut tri = Triangulation {
            pts,
            nbrs: vec![[NONE; 3]; verts.len()],
            alive: vec![true; verts.len()],
            stamp: vec![0; verts.len()],
            verts,
            epoch: 0,
            last: 0,
        };
        let mut edges = HashMap::new();
        for (t, v) in tri.verts.iter().enumerate() {
            for i in 0..3 {
                edges.insert((v[(i + 1) % 3], v[(i + 2) % 3]), (t as u32, i));
            }
        }
        for t in 0..tri.verts.len() {
            for i in 0..3 {
                let v = tri.verts[t];
                let (n, _) = edges[&(v[(i + 2) % 3], v[(i + 1) % 3])];
                tri.nbrs[t][i] = n;
            }
        }
        tri
    }

    /// Finds some triangle in conflict with `p`, or reports that `p` coincides
    /// with an existing vertex.
    fn locate(&self, p: Point2) -> std::result::Result<u32, u32> {
        let mut t = self.last;
        let mut steps = 0usize;
        let limit = 4 * self.verts.len() + 16;
        'walk: while steps < limit {
            steps += 1;
            if self.is_ghost(t) {
                if self.conflicts(t, p) {
                    return Ok(t);
                }
                // Step back inside through the hull edge.
                t = self.nbrs[t as usize][2];
                continue;
            }
            let v = self.verts[t as usize];
            let start = steps % 3;
            for k in 0..3 {
                let i = (start + k) % 3;
                let (u, w) = (v[(i + 1) % 3], v[(i + 2) % 3]);
                if orient2d(self.pt(u), self.pt(w), p) == Ordering::Less {
                    t = self.nbrs[t as usize][i];
                    continue 'walk;
                }
            }
            for &q in &v {
                if self.pt(q) == p {
                    return Err(q);
                }
            }
            return Ok(t);
        }
        // Walk failed to converge; fall back to an exhaustive scan.
        for t in 0..self.verts.len() as u32 {
            if !self.alive[t as usize] {
                continue;
            }
            if !self.is_ghost(t) {
                for &q in &self.verts[t as usize] {
                    if self.pt(q) == p {
                        return Err(q);
                    }
                }
            }
            if self.conflicts(t, p) {
                return Ok(t);
            }
        }
        unreachable!("every point conflicts with some triangle")
    }

    fn insert(&mut self, pi: u32) -> Result<()> {
        let p = self.pt(pi);
        let seed = match self.locate(p) {
            Ok(t) => t,
            Err(q) => {
                return Err(Error::DegenerateInput(format!(
                    "duplicate point {p:?} (indices {q} and {pi})"
                )))
            }
        };

        self.epoch += 1;
        let epoch = self.epoch;
        let mut cavity = vec![seed];
        self.stamp[seed as usize] = epoch;
        // Boundary edges (u, v, outside triangle) in cavity orientation.
        let mut boundary: Vec<(u32, u32, u32)> = Vec::new();
        let mut k = 0;
        while k < cavity.len() {
            let t = cavity[k];
            k += 1;
            let v = self.verts[t as usize];
            for i in 0..3 {
                let n = self.nbrs[t as usize][i];
                let inside = self.stamp[n as usize] == epoch;
                if inside {
                    continue;
                }
                if self.conflicts(n, p) {
                    self.stamp[n as usize] = epoch;
                    cavity.push(n);
                } else {
                    boundary.push((v[(i + 1) % 3], v[(i + 2) % 3], n));
                }
            }
        }
        // A neighbor may have been recorded as boundary before it joined the cavity.
        boundary.retain(|&(_, _, n)| self.stamp[n as usize] != epoch);

        for &t in &cavity {
            self.alive[t as usize] = false;
        }

        let base = self.verts.len() as u32;
        let mut by_start: HashMap<u32, u32> = HashMap::with_capacity(boundary.len());
        for (j, &(u, _, _)) in boundary.iter().enumerate() {
            by_start.insert(u, base + j as u32);
        }
        let mut by_end: HashMap<u32, u32> = HashMap::with_capacity(boundary.len());
        for (j, &(_, w, _)) in boundary.iter().enumerate() {
            by_end.insert(w, base + j as u32);
        }

        for &(u, w, outside) in &boundary {
            let t = self.verts.len() as u32;
            // Logical triangle [u, w, p]: opposite u is (w, p), opposite w is (p, u), opposite p is (u, w).
            let logical_v = [u, w, pi];
            let logical_n = [by_start[&w], by_end[&u], outside];
            let rot = if u == GHOST {
                1
            } else if w == GHOST {
                2
            } else {
                0
            };
            let verts = [logical_v[rot], logical_v[(rot + 1) % 3], logical_v[(rot + 2) % 3]];
            let nbrs = [logical_n[rot], logical_n[(rot + 1) % 3], logical_n[(rot + 2) % 3]];
            self.verts.push(verts);
            self.nbrs.push(nbrs);
            self.alive.push(true);
            self.stamp.push(0);

            let ov = self.verts[outside as usize];
            let slot = (0..3)
                .find(|&i| ov[(i + 1) % 3] == w && ov[(i + 2) % 3] == u)
                .expect("outside triangle shares the boundary edge");
            self.nbrs[outside as usize][slot] = t;
            if verts[2] != GHOST {
                self.last = t;
            }
        }
        Ok(())
    }
}

/// Delaunay triangulation of `points`, returned as counterclockwise index triples.
pub fn delaunay(points: &[Point2]) -> Result<Vec<[usize; 3]>> {
    if points.len() < 3 {
        return Err(Error::DegenerateInput(format!(
            "need at least 3 points, got {}",
            points.len()
        )));
    }
    if let Some(p) = points.iter().find(|p| !p[0].is_finite() || !p[1].is_finite()) {
        return Err(Error::DegenerateInput(format!("non-finite point {p:?}")));
    }
    let (a, mut b) = (0u32, None);
    for (i, p) in points.iter().enumerate().skip(1) {
        if *p != points[0] {
            b = Some(i as u32);
            break;
        }
    }
    let b = b.ok_or_else(|| Error::DegenerateInput("all points coincide".into()))?;
    let c = (0..points.len() as u32)
        .find(|&i| orient2d(points[a as usize], points[b as usize], points[i as usize]) != Ordering::Equal)
        .ok_or_else(|| Error::DegenerateInput("all points are collinear".into()))?;

    let mut tri = Triangulation::seed(points, a, b, c);
    for i in 0..points.len() as u32 {
        if i == a || i == b || i == c {
            continue;
        }
        tri.insert(i)?;
    }

    Ok(tri
        .verts
        .iter()
        .zip(&tri.alive)
        .filter(|(v, &alive)| alive && v[2] != GHOST)
        .map(|(v, _)| [v[0] as usize, v[1] as usize, v[2] as usize])
        .collect())
}
