//! Relative-slope bounds, log-log slope fits and ε sweeps.

use std::io::Write;
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::enclosure::{build_approximation, eta, EnclosurePair};
use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalVec3};
use crate::mesh::{generate_vertices, lift, triangulate, PlanarMesh};
use crate::system::{Branch, Domain2, HopfParameters, SlowFastSystem};
use crate::tighten::tighten;
use crate::transversality::verify_pair_with;
use crate::Schedule;

/// `(|ẋ| / (|ẏ| + |ż|)) / (|∂y h₀| + |∂z h₀|)` over a box, with `ẋ = f/ε`.
pub fn box_relative_slope<S: SlowFastSystem + ?Sized>(sys: &S, b: &IntervalVec3) -> Result<Interval> {
    let field = sys.eval_field(b)?;
    let speed = field.x.abs().checked_div(field.y.abs() + field.z.abs())?;
    let (hy, hz) = sys.h0_partials(b.y, b.z)?;
    Ok(speed.checked_div(hy.abs() + hz.abs())?)
}

/// Upper bound of the relative slope over an enclosure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeBound {
    /// Maximum over faces of the upper endpoint; infinite if any face failed.
    pub s_hi: f64,
    /// `s_hi · √ε ≤ 1`.
    pub criterion_ok: bool,
    pub face_errors: Vec<(usize, String)>,
}

/// Bounds the relative slope on the region between `L` and `R`, one box per face.
pub fn relative_slope<S: SlowFastSystem + ?Sized>(sys: &S, pair: &EnclosurePair) -> SlopeBound {
    let mesh = pair.mesh();
    let per_face = Schedule::default().map(mesh.num_faces(), |f| {
        let idx = mesh.faces()[f];
        let mut pts = Vec::with_capacity(6);
        for &i in &idx {
            let [y, z] = mesh.vertices()[i];
            pts.push([pair.x_left()[i], y, z]);
            pts.push([pair.x_right()[i], y, z]);
        }
        box_relative_slope(sys, &IntervalVec3::hull_of_points(&pts)).map(|s| s.hi())
    });
    let mut s_hi: f64 = 0.0;
    let mut face_errors = Vec::new();
    for (f, r) in per_face.into_iter().enumerate() {
        match r {
            Ok(s) => s_hi = s_hi.max(s),
            Err(e) => face_errors.push((f, e.to_string())),
        }
    }
    if !face_errors.is_empty() {
        s_hi = f64::INFINITY;
    }
    SlopeBound {
        s_hi,
        criterion_ok: s_hi * sys.epsilon().sqrt() <= 1.0,
        face_errors,
    }
}

/// Ordinary least-squares slope of `v` against `u` over points with `u` in `window`.
pub fn loglog_slope(points: &[(f64, f64)], window: (f64, f64)) -> Result<f64> {
    const TOL: f64 = 1e-9;
    let sel: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|&(u, v)| u >= window.0 - TOL && u <= window.1 + TOL && u.is_finite() && v.is_finite())
        .collect();
    let n = sel.len() as f64;
    let mean_u = sel.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_v = sel.iter().map(|p| p.1).sum::<f64>() / n;
    let suu: f64 = sel.iter().map(|p| (p.0 - mean_u).powi(2)).sum();
    if sel.len() < 2 || suu == 0.0 {
        return Err(Error::InsufficientData(format!(
            "{} usable points in window [{}, {}]",
            sel.len(),
            window.0,
            window.1
        )));
    }
    let suv: f64 = sel.iter().map(|p| (p.0 - mean_u) * (p.1 - mean_v)).sum();
    Ok(suv / suu)
}

/// `count` log-uniform ε values with `-log₁₀ε` running from `from` to `to`.
pub fn log_grid(from: f64, to: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![10f64.powf(-from)],
        _ => (0..count)
            .map(|k| 10f64.powf(-(from + (to - from) * k as f64 / (count - 1) as f64)))
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub parameters: HopfParameters,
    pub branch: Branch,
    pub domain: Domain2,
    pub d: u32,
    pub epsilons: Vec<f64>,
    pub n0: f64,
    pub factor: f64,
    pub tighten: bool,
    pub max_passes: usize,
}

impl SweepConfig {
    /// Nine points on `-log₁₀ε ∈ [1, 4]`, `N₀ = 64`, factor `1/8`, tightening on.
    pub fn new(parameters: HopfParameters, branch: Branch, domain: Domain2, d: u32) -> Self {
        SweepConfig {
            parameters,
            branch,
            domain,
            d,
            epsilons: log_grid(1.0, 4.0, 9),
            n0: 64.0,
            factor: 0.125,
            tighten: true,
            max_passes: 10_000,
        }
    }
}

/// Outcome of one ε point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub epsilon: f64,
    pub iota: usize,
    pub eta_initial: f64,
    pub eta_final: f64,
    pub verified_n: Option<f64>,
    pub s_eps_hi: f64,
    pub criterion_ok: bool,
    pub passes: usize,
    pub t_mesh: f64,
    pub t_verify: f64,
    pub t_tighten: f64,
    /// Set when the point could not be verified.
    pub error: Option<String>,
}

impl SweepRecord {
    pub fn wall_time_seconds(&self) -> f64 {
        self.t_mesh + self.t_verify + self.t_tighten
    }
}

pub const CSV_HEADER: &str =
    "epsilon,iota,eta_initial,eta_final,verified_N,s_eps_hi,criterion_ok,passes,t_mesh,t_verify,t_tighten";

pub fn write_csv<W: Write>(records: &[SweepRecord], mut w: W) -> Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in records {
        let n = r.verified_n.map(|n| format!("{n}")).unwrap_or_default();
        writeln!(
            w,
            "{:.16e},{},{:.16e},{:.16e},{},{:.16e},{},{},{:.6},{:.6},{:.6}",
            r.epsilon,
            r.iota,
            r.eta_initial,
            r.eta_final,
            n,
            r.s_eps_hi,
            r.criterion_ok,
            r.passes,
            r.t_mesh,
            r.t_verify,
            r.t_tighten
        )?;
    }
    Ok(())
}

/// `(-log₁₀ε, log₁₀η_final)` for every verified record.
pub fn eta_points(records: &[SweepRecord]) -> Vec<(f64, f64)> {
    records
        .iter()
        .filter(|r| r.error.is_none())
        .map(|r| (-r.epsilon.log10(), r.eta_final.log10()))
        .collect()
}

/// The shared planar mesh of a sweep; the vertex spacing depends on `∇h₀`,
/// which for the singular Hopf branches is independent of ε.
pub fn sweep_mesh(config: &SweepConfig) -> Result<Arc<PlanarMesh>> {
    let eps = config
        .epsilons
        .first()
        .copied()
        .ok_or_else(|| Error::Config("empty epsilon list".into()))?;
    let sys = config.parameters.at(eps, config.branch)?;
    sys.check_domain(&config.domain)?;
    let points = generate_vertices(&config.domain, config.d, |y, z| sys.kappa(y, z))?;
    Ok(Arc::new(triangulate(&points)?))
}

fn run_point(config: &SweepConfig, mesh: &Arc<PlanarMesh>, t_shared: f64, eps: f64, schedule: Schedule) -> SweepRecord {
    let mut rec = SweepRecord {
        epsilon: eps,
        iota: mesh.num_vertices(),
        eta_initial: f64::NAN,
        eta_final: f64::NAN,
        verified_n: None,
        s_eps_hi: f64::INFINITY,
        criterion_ok: false,
        passes: 0,
        t_mesh: t_shared,
        t_verify: 0.0,
        t_tighten: 0.0,
        error: None,
    };
    let outcome = (|| -> Result<()> {
        let sys = config.parameters.at(eps, config.branch)?;
        sys.check_domain(&config.domain)?;
        let t0 = Instant::now();
        let k0 = lift(mesh, |y, z| sys.h0_at(y, z))?;
        let keps = build_approximation(&k0, &sys)?;
        rec.t_mesh += t0.elapsed().as_secs_f64();

        let t0 = Instant::now();
        let verified = verify_pair_with(&sys, &keps, config.n0, schedule);
        rec.t_verify = t0.elapsed().as_secs_f64();
        let mut verified = verified?;
        rec.verified_n = Some(verified.n);
        rec.eta_initial = eta(&verified.pair);
        rec.eta_final = rec.eta_initial;

        if config.tighten {
            let t0 = Instant::now();
            let out = tighten(&sys, &mut verified.pair, config.factor, config.max_passes)?;
            rec.t_tighten = t0.elapsed().as_secs_f64();
            rec.passes = out.passes;
            rec.eta_final = *out.eta_history.last().expect("history starts with the initial eta");
        }
        let slope = relative_slope(&sys, &verified.pair);
        rec.s_eps_hi = slope.s_hi;
        rec.criterion_ok = slope.criterion_ok;
        Ok(())
    })();
    if let Err(e) = outcome {
        rec.error = Some(e.to_string());
    }
    rec
}

/// Runs every ε of the config on one shared mesh. Failed points are recorded
/// with `error` set; records are returned in the order of `config.epsilons`.
pub fn sweep(config: &SweepConfig) -> Result<Vec<SweepRecord>> {
    sweep_with(config, Schedule::default())
}

pub fn sweep_with(config: &SweepConfig, schedule: Schedule) -> Result<Vec<SweepRecord>> {
    let t0 = Instant::now();
    let mesh = sweep_mesh(config)?;
    let t_shared = t0.elapsed().as_secs_f64();
    Ok(schedule.map(config.epsilons.len(), |k| {
        run_point(config, &mesh, t_shared, config.epsilons[k], schedule)
    }))
}
