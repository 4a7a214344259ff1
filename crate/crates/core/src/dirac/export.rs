//! Plain-text matrix export.
//!
//! Dense: a header line `# dense <rows> <cols>`, then one line per row with `re im` pairs
//! separated by spaces. Coordinate: `# coordinate <rows> <cols> <nnz>`, then one
//! `<row> <col> <re> <im>` line per nonzero (0-based indices, row-major order).

use crate::error::Result;
use crate::linalg::CMatrix;
use std::io::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFormat {
    Dense,
    Coordinate,
}

pub fn write_matrix(m: &CMatrix, format: MatrixFormat, out: &mut impl Write) -> Result<()> {
    let (r, cols) = m.shape();
    match format {
        MatrixFormat::Dense => {
            writeln!(out, "# dense {r} {cols}")?;
            for i in 0..r {
                let row: Vec<String> = (0..cols).map(|j| format!("{:e} {:e}", m[(i, j)].re, m[(i, j)].im)).collect();
                writeln!(out, "{}", row.join(" "))?;
            }
        }
        MatrixFormat::Coordinate => {
            let nz: Vec<(usize, usize)> = (0..r)
                .flat_map(|i| (0..cols).map(move |j| (i, j)))
                .filter(|&(i, j)| m[(i, j)].norm() != 0.0)
                .collect();
            writeln!(out, "# coordinate {r} {cols} {}", nz.len())?;
            for (i, j) in nz {
                writeln!(out, "{i} {j} {:e} {:e}", m[(i, j)].re, m[(i, j)].im)?;
            }
        }
    }
    Ok(())
}
