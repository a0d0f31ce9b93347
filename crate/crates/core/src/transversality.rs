//! Face-wise proof that the flow crosses a lifted surface in one direction.
//!
//! For a face `T` with normal `n`, the sign of `F·n` is bounded using the
//! gradient `G = ∇(F·n) = J_Fᵀ n`. When `G` is bounded away from `(0,0,0)`
//! on `T` and `F·n` is monotone along every edge, the range of `F·n` on `T`
//! is enclosed by the hull of its three vertex values. Edges that fail the
//! monotonicity test contribute an enclosure of `F·n` along the whole edge
//! instead, and faces on which `G` may vanish fall back to evaluating `F·n`
//! over the face box.

use serde::{Deserialize, Serialize};

use crate::enclosure::{build_pair, EnclosurePair};
use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalVec3, SignClass};
use crate::mesh::{LiftedSurface, PlanarMesh};
use crate::system::SlowFastSystem;
use crate::Schedule;

/// Verification gives up once the shift divisor falls to this value.
pub const MIN_SHIFT_DIVISOR: f64 = 1.0 / 262_144.0;

const EDGES: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

/// A triangle in phase space with its sign-normalized normal and bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceGeometry {
    pub vertices: [[f64; 3]; 3],
    pub normal: IntervalVec3,
    pub bbox: IntervalVec3,
}

impl FaceGeometry {
    pub fn new(vertices: [[f64; 3]; 3]) -> Result<Self> {
        let [v1, v2, v3] = vertices;
        Ok(FaceGeometry {
            vertices,
            normal: face_normal(v1, v2, v3)?,
            bbox: IntervalVec3::hull_of_points(&vertices),
        })
    }

    /// Axis-aligned box of the edge from vertex `i` to vertex `j`.
    pub fn edge_box(&self, i: usize, j: usize) -> IntervalVec3 {
        IntervalVec3::hull_of_points(&[self.vertices[i], self.vertices[j]])
    }

    /// `v_j - v_i` as an interval vector.
    pub fn edge_vector(&self, i: usize, j: usize) -> IntervalVec3 {
        IntervalVec3::from_point(self.vertices[j]) - IntervalVec3::from_point(self.vertices[i])
    }
}

/// `(v2 - v1) × (v3 - v1)`, negated if needed so that its x-component is positive.
pub fn face_normal(v1: [f64; 3], v2: [f64; 3], v3: [f64; 3]) -> Result<IntervalVec3> {
    let p = IntervalVec3::from_point;
    let n = (p(v2) - p(v1)).cross(p(v3) - p(v1));
    match n.x.sign_class() {
        SignClass::Positive => Ok(n),
        SignClass::Negative => Ok(-n),
        SignClass::Straddles => Err(Error::FoldProximity {
            lo: n.x.lo(),
            hi: n.x.hi(),
        }),
    }
}

/// Which evaluation path decided a face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FacePath {
    /// `G` may vanish on the face: `F·n` over the whole face box.
    #[serde(rename = "a")]
    FaceBox,
    /// `G ≠ 0` and every edge monotone: hull of the vertex values.
    #[serde(rename = "b")]
    Vertices,
    /// `G ≠ 0` with some non-monotone edge: edge boxes join the hull.
    #[serde(rename = "c")]
    Edges,
}

/// Outcome of [`check_face`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceCheck {
    /// `+1`, `-1`, or `0` when the sign could not be established.
    pub sign: i32,
    pub path: FacePath,
    /// The enclosure of `F·n` whose sign was taken.
    pub value: Interval,
}

fn dot_field<S: SlowFastSystem + ?Sized>(sys: &S, b: &IntervalVec3, n: &IntervalVec3) -> Result<Interval> {
    Ok(sys.eval_field(b)?.dot(*n))
}

/// `F·n` over the face box, the quantity examined when `G` cannot be bounded away from zero.
pub fn face_box_value<S: SlowFastSystem + ?Sized>(sys: &S, face: &FaceGeometry) -> Result<Interval> {
    dot_field(sys, &face.bbox, &face.normal)
}

/// Hull of `F(v_i)·n` over the three vertices.
pub fn vertex_hull_value<S: SlowFastSystem + ?Sized>(sys: &S, face: &FaceGeometry) -> Result<Interval> {
    let mut acc: Option<Interval> = None;
    for v in &face.vertices {
        let val = dot_field(sys, &IntervalVec3::from_point(*v), &face.normal)?;
        acc = Some(acc.map_or(val, |a| a.hull(val)));
    }
    Ok(acc.expect("three vertices"))
}

/// Lower bound of `φ` on `[0, 1]` given `φ(0) ≥ a`, `φ(1) ≥ b` and
/// `φ' ∈ [s_lo, s_hi]` with `s_lo ≤ 0 ≤ s_hi`.
fn edge_lower(a: f64, b: f64, s: Interval) -> Option<f64> {
    let (a, b) = (Interval::point(a), Interval::point(b));
    let (lo, hi) = (Interval::point(s.lo()), Interval::point(s.hi()));
    // Where the two supporting lines a + λ s_lo and b - (1 - λ) s_hi meet.
    let meet = (a * hi + lo * hi - lo * b).checked_div(hi - lo).ok()?.lo();
    let bound = meet.max((a + lo).lo()).max((b - hi).lo());
    bound.is_finite().then_some(bound)
}

/// Enclosure of `F·n` along an edge from its endpoint values and the range
/// `slope` of its derivative, by the mean value theorem from both ends.
fn edge_mean_value(start: Interval, end: Interval, slope: Interval) -> Option<Interval> {
    if !slope.contains_zero() {
        return None;
    }
    let lo = edge_lower(start.lo(), end.lo(), slope)?;
    let hi = -edge_lower(-start.hi(), -end.hi(), -slope)?;
    Interval::new(lo, hi).ok()
}

/// Levels of bisection applied to an edge on which `F·n` is not monotone.
const EDGE_BISECTIONS: u32 = 3;

/// A piece of an edge: boxes around its exact endpoints and `F·n` there.
#[derive(Clone, Copy)]
struct Segment {
    a: IntervalVec3,
    b: IntervalVec3,
    fa: Interval,
    fb: Interval,
}

/// Encloses `F·n` along a segment whose derivative along the segment lies in
/// `slope`: the endpoint hull when `slope` excludes zero, otherwise the halves
/// are enclosed separately down to `depth` levels, where the box value is
/// intersected with the two-sided mean-value bound.
fn edge_value<S: SlowFastSystem + ?Sized>(
    sys: &S,
    n: &IntervalVec3,
    seg: Segment,
    slope: Interval,
    depth: u32,
) -> Result<Interval> {
    if !slope.contains_zero() {
        return Ok(seg.fa.hull(seg.fb));
    }
    let span = seg.a.hull(seg.b);
    if depth == 0 {
        let boxed = dot_field(sys, &span, n)?;
        return Ok(match edge_mean_value(seg.fa, seg.fb, slope) {
            Some(mv) => boxed.intersect(mv).unwrap_or(boxed),
            None => boxed,
        });
    }
    let m = (seg.a + seg.b).scale(0.5);
    let fm = dot_field(sys, &m, n)?;
    let mut out: Option<Interval> = None;
    for half in [Segment { b: m, fb: fm, ..seg }, Segment { a: m, fa: fm, ..seg }] {
        let s = sys.eval_g(&half.a.hull(half.b), n)?.dot(half.b - half.a);
        let v = edge_value(sys, n, half, s, depth - 1)?;
        out = Some(out.map_or(v, |o| o.hull(v)));
    }
    Ok(out.expect("two halves"))
}

/// Sign of `F·n` on a face.
pub fn check_face<S: SlowFastSystem + ?Sized>(sys: &S, face: &FaceGeometry) -> Result<FaceCheck> {
    let n = face.normal;
    let finish = |path, value: Interval| FaceCheck {
        sign: value.sign_class().as_i32(),
        path,
        value,
    };

    let g = sys.eval_g(&face.bbox, &n)?;
    if g.components().iter().all(|c| c.contains_zero()) {
        return Ok(finish(FacePath::FaceBox, face_box_value(sys, face)?));
    }

    let mut hull = vertex_hull_value(sys, face)?;
    let mut path = FacePath::Vertices;
    for (i, j) in EDGES {
        let eb = face.edge_box(i, j);
        let slope = sys.eval_g(&eb, &n)?.dot(face.edge_vector(i, j));
        if slope.contains_zero() {
            path = FacePath::Edges;
            let end = |k: usize| IntervalVec3::from_point(face.vertices[k]);
            let segment = Segment {
                a: end(i),
                b: end(j),
                fa: dot_field(sys, &end(i), &n)?,
                fb: dot_field(sys, &end(j), &n)?,
            };
            hull = hull.hull(edge_value(sys, &n, segment, slope, EDGE_BISECTIONS)?);
        }
    }
    Ok(finish(path, hull))
}

/// Machine-readable record of a face whose sign was not the expected one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceDiagnostic {
    pub face: usize,
    pub sign: i32,
    pub branch: Option<FacePath>,
    /// Endpoints of the enclosure of `F·n`; absent when evaluation failed.
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub error: Option<String>,
}

/// Signed crossing count of a surface over a set of faces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransversalityReport {
    /// Face indices examined, in evaluation order.
    pub faces: Vec<usize>,
    /// Sign per examined face, aligned with `faces`.
    pub signs: Vec<i8>,
    pub intersections: i64,
    pub face_count: usize,
    /// Faces with sign 0.
    pub failures: Vec<usize>,
    pub diagnostics: Vec<FaceDiagnostic>,
}

impl TransversalityReport {
    /// All faces cross in the positive x direction.
    pub fn all_positive(&self) -> bool {
        self.intersections == self.face_count as i64
    }

    /// All faces cross in the negative x direction.
    pub fn all_negative(&self) -> bool {
        self.intersections == -(self.face_count as i64)
    }

    /// `|intersections| = face_count`.
    pub fn is_transversal(&self) -> bool {
        self.all_positive() || self.all_negative()
    }
}

pub(crate) fn face_geometry(mesh: &PlanarMesh, x: &[f64], f: usize) -> Result<FaceGeometry> {
    let idx = mesh.faces()[f];
    FaceGeometry::new(idx.map(|i| {
        let [y, z] = mesh.vertices()[i];
        [x[i], y, z]
    }))
}

fn classify<S: SlowFastSystem + ?Sized>(sys: &S, mesh: &PlanarMesh, x: &[f64], f: usize) -> FaceDiagnostic {
    let outcome = face_geometry(mesh, x, f).and_then(|g| check_face(sys, &g));
    match outcome {
        Ok(c) => FaceDiagnostic {
            face: f,
            sign: c.sign,
            branch: Some(c.path),
            lo: Some(c.value.lo()),
            hi: Some(c.value.hi()),
            error: None,
        },
        Err(e) => FaceDiagnostic {
            face: f,
            sign: 0,
            branch: None,
            lo: None,
            hi: None,
            error: Some(e.to_string()),
        },
    }
}

/// `true` iff every listed face has sign `expected`; stops at the first face that does not.
pub(crate) fn faces_have_sign<S: SlowFastSystem + ?Sized>(
    sys: &S,
    mesh: &PlanarMesh,
    x: &[f64],
    faces: &[usize],
    expected: i32,
) -> bool {
    faces.iter().all(|&f| classify(sys, mesh, x, f).sign == expected)
}

pub(crate) fn transversality_of<S: SlowFastSystem + ?Sized>(
    sys: &S,
    mesh: &PlanarMesh,
    x: &[f64],
    faces: Option<&[usize]>,
    schedule: Schedule,
) -> Result<TransversalityReport> {
    let faces: Vec<usize> = match faces {
        Some(sub) => {
            if let Some(&bad) = sub.iter().find(|&&f| f >= mesh.num_faces()) {
                return Err(Error::Index {
                    index: bad,
                    len: mesh.num_faces(),
                });
            }
            sub.to_vec()
        }
        None => (0..mesh.num_faces()).collect(),
    };
    let results = schedule.map(faces.len(), |k| classify(sys, mesh, x, faces[k]));

    let signs: Vec<i8> = results.iter().map(|d| d.sign as i8).collect();
    let intersections = signs.iter().map(|&s| s as i64).sum();
    let failures = results.iter().filter(|d| d.sign == 0).map(|d| d.face).collect();
    let diagnostics = results.into_iter().filter(|d| d.sign == 0).collect();
    Ok(TransversalityReport {
        face_count: faces.len(),
        faces,
        signs,
        intersections,
        failures,
        diagnostics,
    })
}

/// Crossing report for `surface` over `faces` (all faces when `None`).
pub fn surface_transversality<S: SlowFastSystem + ?Sized>(
    sys: &S,
    surface: &LiftedSurface,
    faces: Option<&[usize]>,
) -> Result<TransversalityReport> {
    surface_transversality_with(sys, surface, faces, Schedule::default())
}

pub fn surface_transversality_with<S: SlowFastSystem + ?Sized>(
    sys: &S,
    surface: &LiftedSurface,
    faces: Option<&[usize]>,
    schedule: Schedule,
) -> Result<TransversalityReport> {
    transversality_of(sys, surface.mesh(), &surface.x, faces, schedule)
}

/// A verified enclosure with the reports that certified it.
#[derive(Debug, Clone)]
pub struct VerifiedPair {
    pub pair: EnclosurePair,
    pub n: f64,
    pub halvings: u32,
    pub left: TransversalityReport,
    pub right: TransversalityReport,
}

/// Shifts `keps` to `L = σ_{-ε/N}` and `R = σ_{+ε/N}`, halving `N` from `n0`
/// until `L` is crossed positively and `R` negatively on every face.
pub fn verify_pair<S: SlowFastSystem + ?Sized>(sys: &S, keps: &LiftedSurface, n0: f64) -> Result<VerifiedPair> {
    verify_pair_with(sys, keps, n0, Schedule::default())
}

pub fn verify_pair_with<S: SlowFastSystem + ?Sized>(
    sys: &S,
    keps: &LiftedSurface,
    n0: f64,
    schedule: Schedule,
) -> Result<VerifiedPair> {
    if !(n0.is_finite() && n0 > 0.0) {
        return Err(Error::Config(format!("N0 must be positive and finite, got {n0}")));
    }
    let mut n = n0;
    let mut halvings = 0;
    let mut last = None;
    while n > MIN_SHIFT_DIVISOR {
        let pair = build_pair(keps, sys, n)?;
        let left = transversality_of(sys, pair.mesh(), pair.x_left(), None, schedule)?;
        let right = transversality_of(sys, pair.mesh(), pair.x_right(), None, schedule)?;
        if left.all_positive() && right.all_negative() {
            let pair = pair.with_verified_n(n);
            return Ok(VerifiedPair {
                pair,
                n,
                halvings,
                left,
                right,
            });
        }
        last = Some((left, right));
        n /= 2.0;
        halvings += 1;
    }
    let (left, right) = last.unwrap_or_else(|| (empty_report(), empty_report()));
    Err(Error::VerificationFailure {
        last_n: n,
        left: Box::new(left),
        right: Box::new(right),
    })
}

fn empty_report() -> TransversalityReport {
    TransversalityReport {
        faces: Vec::new(),
        signs: Vec::new(),
        intersections: 0,
        face_count: 0,
        failures: Vec::new(),
        diagnostics: Vec::new(),
    }
}
