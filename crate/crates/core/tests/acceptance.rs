//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Criteria that do not hold are reported as FAIL with the measured values;
//! the run itself does not abort, so the full report is always printed.

mod common;

use std::time::Instant;

use common::*;
use rand::{Rng, SeedableRng};
use slowman::diagnostics::{eta_points, log_grid, loglog_slope, sweep_with, SweepConfig, SweepRecord};
use slowman::interval::{Interval, IntervalVec3};
use slowman::prelude::*;
use slowman::transversality::check_face;

/// Mesh parameter of the 1200-triangle strip mesh.
const D_COARSE: u32 = 25;
/// Mesh parameter of the 18236-triangle strip mesh.
const D_FINE: u32 = 100;
/// Mesh parameter of the 72239-triangle strip mesh.
const D_FINEST: u32 = 200;

/// Triangle counts and `[1, 4]` slopes of the reference table.
const TABLE_IOTA: [f64; 7] = [1200.0, 4662.0, 18236.0, 40805.0, 72239.0, 112736.0, 162190.0];
const TABLE_SLOPE: [f64; 7] = [-1.40, -1.58, -1.70, -1.76, -1.82, -1.86, -1.89];

struct Report {
    passed: usize,
    total: usize,
}

impl Report {
    fn line(&mut self, id: u32, ok: bool, what: &str, detail: String) {
        self.total += 1;
        if ok {
            self.passed += 1;
        }
        println!("{} criterion {id}: {what} ({detail})", if ok { "PASS" } else { "FAIL" });
    }
}

fn interpolated_slope(iota: f64) -> f64 {
    let x = iota.ln();
    let k = TABLE_IOTA
        .iter()
        .rposition(|&t| t <= iota)
        .unwrap_or(0)
        .min(TABLE_IOTA.len() - 2);
    let (x0, x1) = (TABLE_IOTA[k].ln(), TABLE_IOTA[k + 1].ln());
    let t = ((x - x0) / (x1 - x0)).clamp(0.0, 1.0);
    TABLE_SLOPE[k] + t * (TABLE_SLOPE[k + 1] - TABLE_SLOPE[k])
}

fn strip_sweep(d: u32, epsilons: Vec<f64>, tighten: bool) -> Vec<SweepRecord> {
    let mut config = SweepConfig::new(strip_params(), Branch::Plus, strip_domain(), d);
    config.epsilons = epsilons;
    config.tighten = tighten;
    sweep_with(&config, Schedule::Parallel).expect("sweep")
}

fn criterion_1(rep: &mut Report) {
    let t = Instant::now();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    let (mut trials, mut violations) = (0usize, 0usize);
    while trials < 1_000_000 {
        let op = OPS[trials % OPS.len()];
        if let Some(ok) = containment_trial(&mut rng, op) {
            trials += 1;
            violations += usize::from(!ok);
        }
    }
    let secs = t.elapsed().as_secs_f64();
    rep.line(
        1,
        violations == 0 && secs < 60.0,
        "interval containment against exact rationals",
        format!("{trials} trials, {violations} violations, {secs:.1} s"),
    );
}

fn fmt_slope(slope: &slowman::Result<f64>) -> String {
    match slope {
        Ok(s) => format!("{s:.3}"),
        Err(e) => format!("unavailable ({e})"),
    }
}

fn criterion_2(rep: &mut Report, recs: &[SweepRecord]) {
    let slope = loglog_slope(&eta_points(recs), (1.0, 4.0));
    let detail = format!(
        "slope {} over [1, 4], target -1.40 +/- 0.15, {} vertices",
        fmt_slope(&slope),
        recs[0].iota
    );
    let ok = matches!(slope, Ok(s) if (s + 1.40).abs() <= 0.15);
    rep.line(2, ok, "eta slope on the 1200-triangle strip mesh", detail);
}

fn criterion_3(rep: &mut Report) {
    let t = Instant::now();
    let recs = strip_sweep(D_FINE, log_grid(1.0, 4.0, 9), true);
    let faces = strip_approximation(D_FINE, 1e-3).1.mesh().num_faces();
    let target = interpolated_slope(faces as f64);
    let steep = loglog_slope(&eta_points(&recs), (2.0, 3.5));
    let whole = loglog_slope(&eta_points(&recs), (1.0, 4.0));
    let ok = matches!(steep, Ok(s) if (s - target).abs() <= 0.2);
    rep.line(
        3,
        ok,
        "steep-regime eta slope on a fine strip mesh",
        format!(
            "{faces} triangles, slope {} over [2, 3.5] ({} over [1, 4]), target {target:.2} +/- 0.2, {:.0} s",
            fmt_slope(&steep),
            fmt_slope(&whole),
            t.elapsed().as_secs_f64()
        ),
    );
}

fn verification_at_64(d: u32) -> (Option<f64>, usize, bool) {
    let (sys, keps) = strip_approximation(d, 1e-3);
    let faces = keps.mesh().num_faces();
    match verify_pair(&sys, &keps, 64.0) {
        Ok(v) => {
            let disjoint = (0..keps.mesh().num_vertices()).all(|i| {
                let [y, z] = keps.mesh().vertices()[i];
                v.pair.x_left()[i] > sys.h0_at(y, z).unwrap()
            });
            (Some(v.n), faces, disjoint)
        }
        Err(_) => (None, faces, false),
    }
}

fn criterion_4(rep: &mut Report) {
    let (n_coarse, f_coarse, _) = verification_at_64(D_COARSE);
    let (n, faces, disjoint) = verification_at_64(D_FINEST);
    rep.line(
        4,
        n == Some(64.0) && disjoint,
        "verification at N = 64, eps = 1e-3, pair clear of the critical manifold",
        format!("{faces} triangles: N = {n:?}, disjoint = {disjoint}; {f_coarse} triangles: N = {n_coarse:?}"),
    );
}

fn criterion_5(rep: &mut Report) {
    let (mut faces, mut disagreements, mut surfaces) = (0usize, 0usize, 0usize);
    for (d, eps) in [(12, 1e-2), (D_COARSE, 1e-2), (D_COARSE, 1e-3), (D_COARSE, 1e-4)] {
        let (sys, keps) = strip_approximation(d, eps);
        let mut v = verify_pair(&sys, &keps, 64.0).expect("fixture verifies");
        let before = (v.pair.left(), v.pair.right());
        tighten(&sys, &mut v.pair, 0.125, 10_000).unwrap();
        for s in [before.0, before.1, v.pair.left(), v.pair.right()] {
            surfaces += 1;
            for f in 0..s.mesh().num_faces() {
                let vs = s.face_vertices(f);
                let c = check_face(&sys, &FaceGeometry::new(vs).unwrap()).unwrap();
                faces += 1;
                if sampled_signs(&sys, vs, 19).iter().any(|x| x.signum() as i32 != c.sign) {
                    disagreements += 1;
                }
            }
        }
    }
    rep.line(
        5,
        disagreements == 0,
        "dense sampling agrees with check_face on verified surfaces",
        format!("{surfaces} surfaces, {faces} faces, 210 samples each, {disagreements} disagreements"),
    );
}

fn criterion_6(rep: &mut Report, on: &[SweepRecord]) {
    let off = strip_sweep(D_COARSE, on.iter().map(|r| r.epsilon).collect(), false);
    let ratio_ok = on.iter().zip(&off).all(|(a, b)| b.eta_final / a.eta_final >= 1.0);
    let min_ratio = on
        .iter()
        .zip(&off)
        .map(|(a, b)| b.eta_final / a.eta_final)
        .fold(f64::INFINITY, f64::min);
    let wall: f64 = on.iter().map(|r| r.wall_time_seconds()).sum();
    let tight: f64 = on.iter().map(|r| r.t_tighten).sum();
    let share = tight / wall;

    let (sys, keps) = strip_approximation(D_COARSE, 1e-3);
    let mut v = verify_pair(&sys, &keps, 64.0).unwrap();
    let out = tighten(&sys, &mut v.pair, 0.125, 10_000).unwrap();
    let h = &out.eta_history;
    let decreasing = h[..h.len() - 1].windows(2).all(|w| w[1] < w[0]) && h[h.len() - 1] <= h[h.len() - 2];
    let reverified = surface_transversality(&sys, &v.pair.left(), None)
        .unwrap()
        .all_positive()
        && surface_transversality(&sys, &v.pair.right(), None)
            .unwrap()
            .all_negative();
    rep.line(
        6,
        ratio_ok && share >= 0.5 && decreasing && reverified,
        "tightening is monotone, re-verifies, and dominates the run time",
        format!(
            "history decreasing = {decreasing}, re-verified = {reverified}, min eta(off)/eta(on) = {min_ratio:.3}, tightening share = {:.1}%",
            100.0 * share
        ),
    );
}

fn criterion_7(rep: &mut Report, on: &[SweepRecord]) {
    let extended = strip_sweep(
        D_COARSE,
        (1..=8).map(|k| 10f64.powf(-4.0 - 0.25 * k as f64)).collect(),
        true,
    );
    let holds_to_4 = on.iter().all(|r| r.criterion_ok);
    let mut all: Vec<&SweepRecord> = on.iter().chain(&extended).collect();
    all.sort_by(|a, b| b.epsilon.total_cmp(&a.epsilon));
    let crossover = all
        .iter()
        .take_while(|r| r.criterion_ok)
        .last()
        .map(|r| -r.epsilon.log10());
    let ok = holds_to_4 && matches!(crossover, Some(c) if (c - 4.0).abs() <= 0.5);
    let row: Vec<String> = all
        .iter()
        .map(|r| format!("{:.2}:{:.2}", -r.epsilon.log10(), r.s_eps_hi * r.epsilon.sqrt()))
        .collect();
    rep.line(
        7,
        ok,
        "relative slope s*sqrt(eps) <= 1 up to -log10 eps = 4 on the coarse mesh",
        format!(
            "last slow -log10 eps = {crossover:?}, target 4 +/- 0.5; {}",
            row.join(" ")
        ),
    );
}

fn criterion_8(rep: &mut Report) {
    let p = Interval::point;
    let eps = 1e-3;
    let sys = strip_params().at(eps, Branch::Plus).unwrap();
    let s = eps.sqrt();
    let g = sys
        .eval_g(
            &IntervalVec3::new(p(-25.0 * s), p(0.05), p(0.0)),
            &IntervalVec3::new(p(1.0), p(100.0 / s), p(1000.0)),
        )
        .unwrap();
    let zero_enclosed = g.components().iter().all(|c| c.contains_zero());

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
    let mut definite = 0;
    for _ in 0..1000 {
        let y0: f64 = rng.gen_range(0.01..0.2);
        let z0: f64 = rng.gen_range(-0.01..0.01);
        let dy: f64 = rng.gen_range(0.0..1e-3);
        let b = IntervalVec3::new(
            p(y0.sqrt()).hull(p((y0 + dy).sqrt())),
            p(y0).hull(p(y0 + dy)),
            p(z0).hull(p(z0 + 1e-3)),
        );
        let n = IntervalVec3::new(
            p(rng.gen_range(0.01..1.0)),
            p(rng.gen_range(-1.0..1.0)),
            p(rng.gen_range(-1.0..1.0)),
        );
        if sys
            .eval_g(&b, &n)
            .unwrap()
            .components()
            .iter()
            .any(|c| !c.contains_zero())
        {
            definite += 1;
        }
    }
    rep.line(
        8,
        zero_enclosed && definite == 1000,
        "G vanishes at the reference point and is sign-definite on branch boxes",
        format!("zero enclosed = {zero_enclosed}, {definite}/1000 boxes sign-definite"),
    );
}

fn main() {
    let t = Instant::now();
    let mut rep = Report { passed: 0, total: 0 };
    criterion_1(&mut rep);
    let coarse = strip_sweep(D_COARSE, log_grid(1.0, 4.0, 9), true);
    criterion_2(&mut rep, &coarse);
    criterion_3(&mut rep);
    criterion_4(&mut rep);
    criterion_5(&mut rep);
    criterion_6(&mut rep, &coarse);
    criterion_7(&mut rep, &coarse);
    criterion_8(&mut rep);
    println!(
        "acceptance: {}/{} criteria passed in {:.0} s",
        rep.passed,
        rep.total,
        t.elapsed().as_secs_f64()
    );
}
