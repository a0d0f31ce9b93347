//! Rigorous enclosures of slow manifolds for slow-fast systems with one fast
//! and two slow variables.
//!
//! A pair of piecewise-linear surfaces `L` and `R` over a triangulated slow
//! domain is constructed around a first-order approximation of the slow
//! manifold. Interval arithmetic proves that the flow crosses `L` and `R` in
//! opposite directions on every face, so a locally invariant manifold is
//! trapped between them. The pair is then contracted vertex by vertex while
//! the crossing conditions keep verifying.
//!
//! ```no_run
//! use std::sync::Arc;
//! use slowman::prelude::*;
//!
//! let eps = 1e-3;
//! let params = RescaledParams { mu: 0.01, a: -0.05, b: 0.001, c: 0.1 };
//! let sys = SingularHopf::from_rescaled(params, eps, Branch::Plus)?;
//! let dom = Domain2::new(0.01, 0.2, -0.01, 0.01)?;
//! let points = generate_vertices(&dom, 33, |y, z| sys.kappa(y, z))?;
//! let mesh = Arc::new(triangulate(&points)?);
//! let k0 = lift(&mesh, |y, z| sys.h0_at(y, z))?;
//! let keps = build_approximation(&k0, &sys)?;
//! let mut verified = verify_pair(&sys, &keps, 64.0)?;
//! let outcome = tighten(&sys, &mut verified.pair, 0.125, 10_000)?;
//! println!("N = {}, eta = {:e}", verified.n, outcome.eta_history.last().unwrap());
//! # Ok::<(), slowman::Error>(())
//! ```

pub mod diagnostics;
pub mod enclosure;
pub mod error;
pub mod interval;
pub mod mesh;
pub mod system;
pub mod tighten;
pub mod transversality;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::diagnostics::{loglog_slope, relative_slope, sweep, SweepConfig, SweepRecord};
    pub use crate::enclosure::{build_approximation, build_pair, eta, sigma_shift, EnclosurePair};
    pub use crate::error::{Error, Result};
    pub use crate::interval::{DomainError, Interval, IntervalVec3, SignClass};
    pub use crate::mesh::{generate_vertices, lift, triangulate, LiftedSurface, PlanarMesh};
    pub use crate::system::{Branch, Domain2, RescaledParams, SingularHopf, SlowFastSystem};
    pub use crate::tighten::{tighten, tighten_pass, try_move_vertex, Side};
    pub use crate::transversality::{check_face, surface_transversality, verify_pair, FaceGeometry};
    pub use crate::Schedule;
}

/// How independent per-face, per-vertex and per-ε work is scheduled.
///
/// `Parallel` uses the rayon global pool when the `parallel` feature is
/// enabled and silently runs sequentially otherwise. Results are identical
/// under both schedules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Schedule {
    Sequential,
    #[default]
    Parallel,
}

impl Schedule {
    /// `f(0), …, f(n-1)` collected in index order.
    pub(crate) fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Schedule::Parallel => {
                use rayon::prelude::*;
                (0..n).into_par_iter().map(f).collect()
            }
            _ => (0..n).map(f).collect(),
        }
    }
}
