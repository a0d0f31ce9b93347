//! Contraction of a verified pair by single-vertex moves.
//!
//! Each move pulls one vertex of `L` or `R` towards the other surface by a
//! fixed fraction of the current gap and keeps it only if every face in the
//! vertex star still crosses with the right sign on both surfaces.

use std::io::Write;

use crate::enclosure::{eta, EnclosurePair};
use crate::error::{Error, Result};
use crate::system::SlowFastSystem;
use crate::transversality::faces_have_sign;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

fn check_factor(factor: f64) -> Result<()> {
    if factor > 0.0 && factor < 0.5 {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "update factor must lie in (0, 1/2), got {factor}"
        )))
    }
}

fn star_verified<S: SlowFastSystem + ?Sized>(sys: &S, pair: &EnclosurePair, star: &[usize]) -> bool {
    faces_have_sign(sys, pair.mesh(), &pair.x_left, star, 1)
        && faces_have_sign(sys, pair.mesh(), &pair.x_right, star, -1)
}

/// Tentatively moves `side` of vertex `i` by `factor` of its gap; commits if
/// the star still verifies on both surfaces and rolls back otherwise.
pub fn try_move_vertex<S: SlowFastSystem + ?Sized>(
    sys: &S,
    pair: &mut EnclosurePair,
    i: usize,
    side: Side,
    factor: f64,
) -> Result<bool> {
    check_factor(factor)?;
    let mesh = std::sync::Arc::clone(pair.mesh());
    let star = mesh.vertex_star(i)?;
    let (l, r) = (pair.x_left[i], pair.x_right[i]);
    let step = factor * (r - l);
    let (slot, old, new) = match side {
        Side::Left => (&mut pair.x_left[i], l, l + step),
        Side::Right => (&mut pair.x_right[i], r, r - step),
    };
    // Also rejects moves that round to no change.
    if !(l < new && new < r) {
        return Ok(false);
    }
    *slot = new;
    if star_verified(sys, pair, star) {
        return Ok(true);
    }
    match side {
        Side::Left => pair.x_left[i] = old,
        Side::Right => pair.x_right[i] = old,
    }
    Ok(false)
}

/// Counts of committed and rejected moves in one pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PassStats {
    pub accepted: usize,
    pub rejected: usize,
}

/// One sweep over the vertices in ascending order, moving left then right.
pub fn tighten_pass<S: SlowFastSystem + ?Sized>(sys: &S, pair: &mut EnclosurePair, factor: f64) -> Result<PassStats> {
    check_factor(factor)?;
    let mut stats = PassStats::default();
    for i in 0..pair.mesh().num_vertices() {
        for side in [Side::Left, Side::Right] {
            if try_move_vertex(sys, pair, i, side, factor)? {
                stats.accepted += 1;
            } else {
                stats.rejected += 1;
            }
        }
    }
    Ok(stats)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TightenOutcome {
    pub passes: usize,
    /// `η` before the first pass and after each pass.
    pub eta_history: Vec<f64>,
}

impl TightenOutcome {
    /// `pass,eta` rows, pass 0 being the untightened pair.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "pass,eta")?;
        for (k, e) in self.eta_history.iter().enumerate() {
            writeln!(w, "{k},{e:.16e}")?;
        }
        Ok(())
    }
}

/// Repeats passes while `η` strictly decreases, at most `max_passes` times.
pub fn tighten<S: SlowFastSystem + ?Sized>(
    sys: &S,
    pair: &mut EnclosurePair,
    factor: f64,
    max_passes: usize,
) -> Result<TightenOutcome> {
    check_factor(factor)?;
    if max_passes == 0 {
        return Err(Error::Config("max_passes must be at least 1".into()));
    }
    let mut history = vec![eta(pair)];
    let mut passes = 0;
    while passes < max_passes {
        tighten_pass(sys, pair, factor)?;
        passes += 1;
        let e = eta(pair);
        let improved = e < *history.last().unwrap();
        history.push(e);
        if !improved {
            break;
        }
    }
    Ok(TightenOutcome {
        passes,
        eta_history: history,
    })
}
