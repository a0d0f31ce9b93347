//! Planar triangulations of the slow-variable domain and their lifts to
//! graphs `x = h(y, z)` in phase space.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::system::Domain2;

pub mod delaunay;
pub mod io;
pub mod predicates;

pub use io::{export_mesh, parse_mesh_text, write_mesh_text};
pub use predicates::Point2;

/// Clamped boundary points closer than this fraction of the local step to
/// their predecessor replace it instead of being added.
const MERGE_FRACTION: f64 = 1e-3;

/// Triangulation of a point set in the `(y, z)` plane.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarMesh {
    vertices: Vec<Point2>,
    faces: Vec<[usize; 3]>,
    star: Vec<Vec<usize>>,
}

impl PlanarMesh {
    /// Builds a mesh from explicit faces. Faces are reoriented counterclockwise.
    pub fn from_faces(vertices: Vec<Point2>, faces: Vec<[usize; 3]>) -> Result<Self> {
        let n = vertices.len();
        let mut oriented = Vec::with_capacity(faces.len());
        for f in faces {
            if let Some(&bad) = f.iter().find(|&&i| i >= n) {
                return Err(Error::Index { index: bad, len: n });
            }
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(Error::DegenerateInput(format!("face {f:?} repeats a vertex")));
            }
            let [a, b, c] = f.map(|i| vertices[i]);
            oriented.push(match predicates::orient2d(a, b, c) {
                std::cmp::Ordering::Greater => f,
                std::cmp::Ordering::Less => [f[0], f[2], f[1]],
                std::cmp::Ordering::Equal => return Err(Error::DegenerateInput(format!("face {f:?} has zero area"))),
            });
        }
        let mut star = vec![Vec::new(); n];
        for (fi, f) in oriented.iter().enumerate() {
            for &v in f {
                star[v].push(fi);
            }
        }
        Ok(PlanarMesh {
            vertices,
            faces: oriented,
            star,
        })
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    /// Indices of the faces incident to vertex `i`.
    pub fn vertex_star(&self, i: usize) -> Result<&[usize]> {
        self.star.get(i).map(Vec::as_slice).ok_or(Error::Index {
            index: i,
            len: self.vertices.len(),
        })
    }

    /// Undirected edges as sorted index pairs.
    pub fn edges(&self) -> BTreeSet<(usize, usize)> {
        let mut e = BTreeSet::new();
        for f in &self.faces {
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                e.insert((a.min(b), a.max(b)));
            }
        }
        e
    }

    /// `V - E + F`; equals 1 for a triangulated disk.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges().len() as i64 + self.faces.len() as i64
    }
}

/// Delaunay triangulation of `points`.
pub fn triangulate(points: &[Point2]) -> Result<PlanarMesh> {
    let faces = delaunay::delaunay(points)?;
    PlanarMesh::from_faces(points.to_vec(), faces)
}

/// Geometry-adapted vertex set: columns advance in `y` from `y_min` with step
/// `k(y, z_min)`, and each column advances in `z` from `z_min` with step
/// `k(y_i, z)`, where `k = k̃ / (1 + κ)` and `k̃ = diam(D) / d`. The final step in
/// each direction is clamped to the domain boundary.
pub fn generate_vertices<K>(dom: &Domain2, d: u32, kappa: K) -> Result<Vec<Point2>>
where
    K: Fn(f64, f64) -> f64,
{
    if d == 0 {
        return Err(Error::Config("mesh.d must be a positive integer".into()));
    }
    let k_tilde = dom.diameter() / d as f64;
    let step = |y: f64, z: f64| -> Result<f64> {
        let kap = kappa(y, z);
        if !kap.is_finite() || kap < 0.0 {
            return Err(Error::Config(format!(
                "kappa({y}, {z}) = {kap} is not a finite non-negative value"
            )));
        }
        Ok(k_tilde / (1.0 + kap))
    };

    let ys = advance(dom.y_min, dom.y_max, |y| step(y, dom.z_min))?;
    let mut points = Vec::new();
    for &y in &ys {
        for z in advance(dom.z_min, dom.z_max, |z| step(y, z))? {
            points.push([y, z]);
        }
    }
    Ok(points)
}

fn advance<F>(start: f64, end: f64, step: F) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut out = vec![start];
    loop {
        let prev = *out.last().unwrap();
        let k = step(prev)?;
        let next = prev + k;
        if !(next > prev) {
            return Err(Error::Config(format!("vertex step {k:e} makes no progress at {prev}")));
        }
        if next < end {
            out.push(next);
            continue;
        }
        if out.len() > 1 && end - prev < MERGE_FRACTION * k {
            *out.last_mut().unwrap() = end;
        } else {
            out.push(end);
        }
        return Ok(out);
    }
}

/// A planar mesh lifted to a graph over the slow plane: one fast coordinate per vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedSurface {
    mesh: Arc<PlanarMesh>,
    pub x: Vec<f64>,
}

impl LiftedSurface {
    pub fn new(mesh: Arc<PlanarMesh>, x: Vec<f64>) -> Result<Self> {
        if x.len() != mesh.num_vertices() {
            return Err(Error::DegenerateInput(format!(
                "{} heights for {} vertices",
                x.len(),
                mesh.num_vertices()
            )));
        }
        if let Some(v) = x.iter().find(|v| !v.is_finite()) {
            return Err(Error::DegenerateInput(format!("non-finite height {v}")));
        }
        Ok(LiftedSurface { mesh, x })
    }

    pub fn mesh(&self) -> &Arc<PlanarMesh> {
        &self.mesh
    }

    pub fn vertex(&self, i: usize) -> [f64; 3] {
        let [y, z] = self.mesh.vertices[i];
        [self.x[i], y, z]
    }

    pub fn face_vertices(&self, f: usize) -> [[f64; 3]; 3] {
        self.mesh.faces[f].map(|i| self.vertex(i))
    }

    /// Projection back onto the slow plane.
    pub fn project(&self) -> &[Point2] {
        self.mesh.vertices()
    }
}

/// Lifts every vertex with `height(y, z)`; the combinatorics are unchanged.
pub fn lift<H>(mesh: &Arc<PlanarMesh>, height: H) -> Result<LiftedSurface>
where
    H: Fn(f64, f64) -> Result<f64>,
{
    let x = mesh
        .vertices()
        .iter()
        .map(|&[y, z]| height(y, z))
        .collect::<Result<Vec<_>>>()?;
    LiftedSurface::new(Arc::clone(mesh), x)
}
