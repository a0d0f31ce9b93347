//! Plain-text surface format:
//!
//! ```text
//! v <x> <y> <z>
//! ...
//! f <i> <j> <k>
//! ...
//! ```
//!
//! Face indices are 1-based; coordinates are written with 17 significant
//! digits so that parsing recovers the exact `f64` values.

use std::io::Write;
use std::path::Path;

use super::LiftedSurface;
use crate::error::{Error, Result};

pub fn write_mesh_text<W: Write>(surface: &LiftedSurface, mut w: W) -> Result<()> {
    for i in 0..surface.mesh().num_vertices() {
        let [x, y, z] = surface.vertex(i);
        writeln!(w, "v {x:.16e} {y:.16e} {z:.16e}")?;
    }
    for f in surface.mesh().faces() {
        writeln!(w, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1)?;
    }
    Ok(())
}

/// Vertices `(x, y, z)` and 0-based faces.
pub type ParsedMesh = (Vec<[f64; 3]>, Vec<[usize; 3]>);

/// Parses the text format.
pub fn parse_mesh_text(text: &str) -> Result<ParsedMesh> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let bad = || Error::Parse(format!("line {}: {line:?}", lineno + 1));
        let mut it = line.split_whitespace();
        let tag = it.next().ok_or_else(bad)?;
        let fields: Vec<&str> = it.collect();
        if fields.len() != 3 {
            return Err(bad());
        }
        match tag {
            "v" => {
                let mut v = [0.0; 3];
                for (slot, s) in v.iter_mut().zip(&fields) {
                    *slot = s.parse().map_err(|_| bad())?;
                }
                vertices.push(v);
            }
            "f" => {
                let mut f = [0usize; 3];
                for (slot, s) in f.iter_mut().zip(&fields) {
                    let one_based: usize = s.parse().map_err(|_| bad())?;
                    *slot = one_based.checked_sub(1).ok_or_else(bad)?;
                }
                faces.push(f);
            }
            _ => return Err(bad()),
        }
    }
    Ok((vertices, faces))
}

/// A temporary file readable by others once renamed into place.
fn temp_file_in(dir: &Path) -> std::io::Result<tempfile::NamedTempFile> {
    let mut builder = tempfile::Builder::new();
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        builder.permissions(std::fs::Permissions::from_mode(0o644));
    }
    builder.tempfile_in(dir)
}

/// Writes the surface atomically: a temporary file in the target directory
/// is renamed over `path` only after it has been fully written.
pub fn export_mesh(surface: &LiftedSurface, path: &Path) -> Result<()> {
    if surface.mesh().num_vertices() == 0 || surface.mesh().num_faces() == 0 {
        return Err(Error::DegenerateInput("refusing to export an empty surface".into()));
    }
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = temp_file_in(dir)?;
    {
        let mut w = std::io::BufWriter::new(tmp.as_file_mut());
        write_mesh_text(surface, &mut w)?;
        w.flush()?;
    }
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}
