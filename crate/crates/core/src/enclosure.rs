//! Candidate enclosing surfaces around the first-order slow manifold
//! approximation `x = h₀ + ε h₁`, and the tightness metric `η`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::mesh::{LiftedSurface, PlanarMesh};
use crate::system::SlowFastSystem;
use crate::Schedule;

fn h1_at<S: SlowFastSystem + ?Sized>(sys: &S, y: f64, z: f64) -> Result<Interval> {
    sys.h1(Interval::point(y), Interval::point(z))
}

fn map_vertices<F>(surface: &LiftedSurface, f: F) -> Result<Vec<f64>>
where
    F: Fn(f64, f64, f64) -> Result<f64> + Sync + Send,
{
    let verts = surface.mesh().vertices();
    Schedule::default()
        .map(verts.len(), |i| {
            let [y, z] = verts[i];
            f(surface.x[i], y, z)
        })
        .into_iter()
        .collect()
}

/// `K_ε`: every vertex raised by `ε·mid(h₁)`.
pub fn build_approximation<S: SlowFastSystem + ?Sized>(k0: &LiftedSurface, sys: &S) -> Result<LiftedSurface> {
    let eps = sys.epsilon();
    let x = map_vertices(k0, |x0, y, z| Ok(x0 + eps * h1_at(sys, y, z)?.mid()))?;
    LiftedSurface::new(Arc::clone(k0.mesh()), x)
}

/// Magnitude of the shift `σ_c` at one vertex: `|c|·max(|h₁|, ε²/|c|)`.
pub fn shift_magnitude(h1: Interval, c: f64, eps: f64) -> f64 {
    let c = c.abs();
    c * h1.mag().max(eps * eps / c)
}

/// `σ_c`: moves each vertex along x by `c·max(|h₁|, ε²/|c|)`.
pub fn sigma_shift<S: SlowFastSystem + ?Sized>(surface: &LiftedSurface, c: f64, sys: &S) -> Result<LiftedSurface> {
    if !(c.is_finite() && c != 0.0) {
        return Err(Error::Config(format!(
            "shift parameter must be finite and nonzero, got {c}"
        )));
    }
    let eps = sys.epsilon();
    let sign = c.signum();
    let x = map_vertices(surface, |x, y, z| {
        Ok(x + sign * shift_magnitude(h1_at(sys, y, z)?, c, eps))
    })?;
    LiftedSurface::new(Arc::clone(surface.mesh()), x)
}

/// Two graphs over one mesh with `x_left < x_right` at every vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct EnclosurePair {
    mesh: Arc<PlanarMesh>,
    pub(crate) x_left: Vec<f64>,
    pub(crate) x_right: Vec<f64>,
    epsilon: f64,
    n: Option<f64>,
}

impl EnclosurePair {
    pub fn new(mesh: Arc<PlanarMesh>, x_left: Vec<f64>, x_right: Vec<f64>, epsilon: f64) -> Result<Self> {
        let nv = mesh.num_vertices();
        if x_left.len() != nv || x_right.len() != nv {
            return Err(Error::DegenerateInput(format!(
                "pair has {}/{} heights for {nv} vertices",
                x_left.len(),
                x_right.len()
            )));
        }
        if let Some(i) =
            (0..nv).find(|&i| !(x_left[i] < x_right[i]) || !x_right[i].is_finite() || !x_left[i].is_finite())
        {
            return Err(Error::DegenerateInput(format!(
                "bracket violated at vertex {i}: {} >= {}",
                x_left[i], x_right[i]
            )));
        }
        Ok(EnclosurePair {
            mesh,
            x_left,
            x_right,
            epsilon,
            n: None,
        })
    }

    pub(crate) fn with_verified_n(mut self, n: f64) -> Self {
        self.n = Some(n);
        self
    }

    pub fn mesh(&self) -> &Arc<PlanarMesh> {
        &self.mesh
    }

    pub fn x_left(&self) -> &[f64] {
        &self.x_left
    }

    pub fn x_right(&self) -> &[f64] {
        &self.x_right
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// The shift divisor at which the pair was verified, if it has been.
    pub fn verified_n(&self) -> Option<f64> {
        self.n
    }

    pub fn gap(&self, i: usize) -> f64 {
        self.x_right[i] - self.x_left[i]
    }

    pub fn left(&self) -> LiftedSurface {
        LiftedSurface::new(Arc::clone(&self.mesh), self.x_left.clone()).expect("pair heights are finite")
    }

    pub fn right(&self) -> LiftedSurface {
        LiftedSurface::new(Arc::clone(&self.mesh), self.x_right.clone()).expect("pair heights are finite")
    }
}

/// `L = σ_{-ε/N}(K_ε)` and `R = σ_{+ε/N}(K_ε)`.
///
/// Any `N > 0` yields a strict bracket; the region between `L` and `R` stays
/// clear of the critical manifold only while `N > 1`.
pub fn build_pair<S: SlowFastSystem + ?Sized>(keps: &LiftedSurface, sys: &S, n: f64) -> Result<EnclosurePair> {
    if !(n.is_finite() && n > 0.0) {
        return Err(Error::Config(format!("shift divisor N must be positive, got {n}")));
    }
    let c = sys.epsilon() / n;
    let left = sigma_shift(keps, -c, sys)?;
    let right = sigma_shift(keps, c, sys)?;
    EnclosurePair::new(Arc::clone(keps.mesh()), left.x, right.x, sys.epsilon())
}

/// `‖x_R - x_L‖ / √ι`, the root-mean-square vertex gap.
pub fn eta(pair: &EnclosurePair) -> f64 {
    let n = pair.x_left.len();
    if n == 0 {
        return 0.0;
    }
    let sum: f64 = (0..n).map(|i| pair.gap(i).powi(2)).sum();
    (sum / n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{lift, triangulate};
    use crate::system::{Branch, SingularHopf};

    fn hopf(eps: f64) -> SingularHopf {
        SingularHopf::new(0.0, 0.0, 0.0, 0.0, eps, Branch::Plus).unwrap()
    }

    fn k0(sys: &SingularHopf, pts: &[[f64; 2]]) -> LiftedSurface {
        let m = Arc::new(triangulate(pts).unwrap());
        lift(&m, |y, z| sys.h0_at(y, z)).unwrap()
    }

    const PTS: [[f64; 2]; 4] = [[0.25, 0.0], [0.36, 0.0], [0.25, 0.5], [0.04, 0.2]];

    #[test]
    fn approximation_adds_eps_h1() {
        let sys = hopf(0.01);
        let keps = build_approximation(&k0(&sys, &PTS), &sys).unwrap();
        assert!((keps.x[0] - 0.505).abs() < 1e-15);
        // z = √y: h₁ = 0.
        assert_eq!(keps.x[2], 0.5);
        assert_eq!(keps.x[3], 0.2);
    }

    #[test]
    fn shift_floor() {
        let eps = 0.01;
        // max(0.5, Nε = 0.64) · ε/N = ε².
        let m = shift_magnitude(Interval::point(0.5), -eps / 64.0, eps);
        assert!((m - 1e-4).abs() < 1e-18);
        let m = shift_magnitude(Interval::ZERO, eps / 64.0, eps);
        assert!((m - eps * eps).abs() < 1e-18);
        let m = shift_magnitude(Interval::point(1.0), 1e-3 / 64.0, 1e-3);
        assert!((2.0 * m - 3.125e-5).abs() < 1e-18);
    }

    #[test]
    fn shift_direction() {
        let sys = hopf(0.01);
        let s = k0(&sys, &PTS);
        let up = sigma_shift(&s, 0.001, &sys).unwrap();
        let down = sigma_shift(&s, -0.001, &sys).unwrap();
        for i in 0..s.x.len() {
            assert!(up.x[i] > s.x[i] && down.x[i] < s.x[i]);
        }
        assert!(sigma_shift(&s, 0.0, &sys).is_err());
    }

    #[test]
    fn pair_brackets_and_gap() {
        let eps = 1e-3;
        let sys = hopf(eps);
        let keps = build_approximation(&k0(&sys, &PTS), &sys).unwrap();
        let pair = build_pair(&keps, &sys, 64.0).unwrap();
        for i in 0..4 {
            let [y, z] = pair.mesh().vertices()[i];
            let h1 = sys.h1(Interval::point(y), Interval::point(z)).unwrap().mag();
            let expect = 2.0 * (eps / 64.0) * h1.max(64.0 * eps);
            assert!((pair.gap(i) - expect).abs() < 1e-15);
            assert!(pair.x_left()[i] < pair.x_right()[i]);
        }
        let wide = build_pair(&keps, &sys, 32.0).unwrap();
        // |h₁| = 0.5 > Nε at (0.25, 0): doubling N halves the gap there.
        assert!((wide.gap(0) - 2.0 * pair.gap(0)).abs() < 1e-15);
        assert!(build_pair(&keps, &sys, 0.0).is_err());
    }

    #[test]
    fn eta_examples() {
        let m = Arc::new(triangulate(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap());
        let p = EnclosurePair::new(Arc::clone(&m), vec![0.0; 3], vec![0.5; 3], 0.1).unwrap();
        assert!((eta(&p) - 0.5).abs() < 1e-16);
        let p = EnclosurePair::new(Arc::clone(&m), vec![0.0; 3], vec![3.0, 4.0, 0.0 + 1e-300], 0.1).unwrap();
        assert!((eta(&p) - 5.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!(EnclosurePair::new(m, vec![0.0; 3], vec![0.0; 3], 0.1).is_err());
    }
}
