//! Plain-text field snapshots.
//!
//! One header line (`x y z mx my mz`, or `x mx my mz` in 1-D) followed by one
//! row per interior cell in lexicographic `(i, j, k)` order. Every number is
//! written with 17 significant digits so a read returns the exact bits.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{Dim, Grid, VectorField};
use crate::Vec3;

pub fn header(dim: Dim) -> &'static str {
    match dim {
        Dim::One => "x mx my mz",
        Dim::Three => "x y z mx my mz",
    }
}

pub fn write_snapshot_to<W: Write>(field: &VectorField, mut w: W) -> io::Result<()> {
    let g = field.grid();
    writeln!(w, "{}", header(g.dim()))?;
    let d = g.dim().count();
    for idx in g.lexicographic_indices() {
        let x = g.center_of(idx);
        let m = field.at(idx);
        let mut line = String::with_capacity(24 * (d + 3));
        for a in 0..d {
            line.push_str(&format!("{:.16e} ", x[a]));
        }
        line.push_str(&format!("{:.16e} {:.16e} {:.16e}", m[0], m[1], m[2]));
        writeln!(w, "{line}")?;
    }
    w.flush()
}

pub fn write_snapshot(field: &VectorField, path: impl AsRef<Path>) -> io::Result<()> {
    let f = File::create(path)?;
    write_snapshot_to(field, BufWriter::new(f))
}

/// Reads a snapshot written for `grid`. Positions are checked against the
/// grid's cell centers; the ghost layer of the result is Neumann-filled.
pub fn read_snapshot_from<R: BufRead>(grid: Grid, r: R) -> io::Result<VectorField> {
    let bad = |msg: String| io::Error::new(io::ErrorKind::InvalidData, msg);
    let mut lines = r.lines();
    let head = lines.next().ok_or_else(|| bad("empty snapshot".into()))??;
    if head.trim() != header(grid.dim()) {
        return Err(bad(format!("unexpected header {head:?}")));
    }
    let d = grid.dim().count();
    let order = grid.lexicographic_indices();
    let mut field = VectorField::zeros(grid);
    let mut count = 0usize;
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let idx = *order
            .get(count)
            .ok_or_else(|| bad(format!("more rows than the {} grid cells", order.len())))?;
        let nums = line
            .split_whitespace()
            .map(str::parse::<f64>)
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| bad(format!("row {}: {e}", lineno + 2)))?;
        if nums.len() != d + 3 {
            return Err(bad(format!(
                "row {}: expected {} columns, got {}",
                lineno + 2,
                d + 3,
                nums.len()
            )));
        }
        let x = grid.center_of(idx);
        for a in 0..d {
            if (nums[a] - x[a]).abs() > 1e-9 * (1.0 + x[a].abs()) {
                return Err(bad(format!("row {}: position does not match grid", lineno + 2)));
            }
        }
        field.set_at(idx, Vec3::new(nums[d], nums[d + 1], nums[d + 2]));
        count += 1;
    }
    if count != order.len() {
        return Err(bad(format!("expected {} rows, got {count}", order.len())));
    }
    field.fill_ghost_neumann();
    Ok(field)
}

pub fn read_snapshot(grid: Grid, path: impl AsRef<Path>) -> io::Result<VectorField> {
    read_snapshot_from(grid, BufReader::new(File::open(path)?))
}
