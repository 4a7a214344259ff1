//! Sampled complex fields on radial or 3D Cartesian grids, and the plain-text field file
//! format.
//!
//! File layout (UTF-8, one record per line, `#` starts a comment line):
//!
//! ```text
//! SQRTFIELD 1
//! grid radial <n> <spacing>              | grid periodic3d <nx> <ny> <nz> <spacing>
//!                                        | grid open3d <nx> <ny> <nz> <spacing>
//! components <1|4>
//! data
//! <re> <im>                              (n_points × components lines)
//! ```
//!
//! Samples are point-major with the component index fastest; 3D points are row-major with
//! z fastest. Radial samples sit at r_i = i·h; 3D samples at x_i = (i − n/2)·h.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::fmt::Write as _;

/// Sample layout of a field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Grid {
    /// Radial samples r_i = i·h, i = 0..n, for spherically symmetric 3D functions.
    Radial { n: usize, spacing: f64 },
    /// Periodic box of side n·h in each direction.
    Periodic3d { dims: [usize; 3], spacing: f64 },
    /// Finite box with the field taken as zero outside.
    Open3d { dims: [usize; 3], spacing: f64 },
}

impl Grid {
    pub fn radial(n: usize, spacing: f64) -> Result<Grid> {
        let g = Grid::Radial { n, spacing };
        g.validate()?;
        Ok(g)
    }

    pub fn periodic(n: usize, spacing: f64) -> Result<Grid> {
        let g = Grid::Periodic3d {
            dims: [n; 3],
            spacing,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn open(n: usize, spacing: f64) -> Result<Grid> {
        let g = Grid::Open3d {
            dims: [n; 3],
            spacing,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let (ok_n, h) = match *self {
            Grid::Radial { n, spacing } => (n >= 4, spacing),
            Grid::Periodic3d { dims, spacing } | Grid::Open3d { dims, spacing } => {
                (dims.iter().all(|&d| d >= 2), spacing)
            }
        };
        if !ok_n {
            return Err(Error::usage("grid has too few points"));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::usage(format!("grid spacing must be positive, got {h}")));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        match *self {
            Grid::Radial { spacing, .. }
            | Grid::Periodic3d { spacing, .. }
            | Grid::Open3d { spacing, .. } => spacing,
        }
    }

    pub fn len(&self) -> usize {
        match *self {
            Grid::Radial { n, .. } => n,
            Grid::Periodic3d { dims, .. } | Grid::Open3d { dims, .. } => dims[0] * dims[1] * dims[2],
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dims3(&self) -> Option<[usize; 3]> {
        match *self {
            Grid::Periodic3d { dims, .. } | Grid::Open3d { dims, .. } => Some(dims),
            Grid::Radial { .. } => None,
        }
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self, Grid::Periodic3d { .. })
    }

    /// Radius of sample i on a radial grid.
    pub fn radius(&self, i: usize) -> f64 {
        i as f64 * self.spacing()
    }

    /// Cartesian position of flat index `idx` on a 3D grid.
    pub fn position(&self, idx: usize) -> [f64; 3] {
        let d = self.dims3().expect("position needs a 3D grid");
        let h = self.spacing();
        let k = idx % d[2];
        let j = (idx / d[2]) % d[1];
        let i = idx / (d[1] * d[2]);
        [
            (i as f64 - (d[0] / 2) as f64) * h,
            (j as f64 - (d[1] / 2) as f64) * h,
            (k as f64 - (d[2] / 2) as f64) * h,
        ]
    }

    /// Volume element per sample for L² norms.
    pub fn weights(&self) -> Vec<f64> {
        match *self {
            Grid::Radial { n, spacing } => (0..n)
                .map(|i| {
                    let r = i as f64 * spacing;
                    4.0 * std::f64::consts::PI * r * r * spacing
                })
                .collect(),
            _ => vec![self.spacing().powi(3); self.len()],
        }
    }
}

/// Complex samples on a grid with 1 (scalar) or 4 (spinor) components per point.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub grid: Grid,
    pub components: usize,
    pub data: Vec<Complex64>,
}

pub type ScalarField = Field;
pub type SpinorField = Field;

impl Field {
    pub fn new(grid: Grid, components: usize, data: Vec<Complex64>) -> Result<Field> {
        grid.validate()?;
        if components != 1 && components != 4 {
            return Err(Error::usage(format!("fields carry 1 or 4 components, got {components}")));
        }
        if data.len() != grid.len() * components {
            return Err(Error::usage(format!(
                "expected {} samples, got {}",
                grid.len() * components,
                data.len()
            )));
        }
        Ok(Field {
            grid,
            components,
            data,
        })
    }

    pub fn zeros(grid: Grid, components: usize) -> Field {
        Field {
            grid,
            components,
            data: vec![Complex64::new(0.0, 0.0); grid.len() * components],
        }
    }

    /// Scalar field from a function of the radius (radial grid) or position (3D grid).
    pub fn from_fn(grid: Grid, f: impl Fn([f64; 3]) -> Complex64) -> Field {
        let data = match grid {
            Grid::Radial { .. } => (0..grid.len()).map(|i| f([grid.radius(i), 0.0, 0.0])).collect(),
            _ => (0..grid.len()).map(|i| f(grid.position(i))).collect(),
        };
        Field {
            grid,
            components: 1,
            data,
        }
    }

    /// Single component `c` as a scalar field.
    pub fn component(&self, c: usize) -> Field {
        let data = self.data.iter().skip(c).step_by(self.components).copied().collect();
        Field {
            grid: self.grid,
            components: 1,
            data,
        }
    }

    /// Assemble a spinor from four scalar fields on the same grid.
    pub fn from_components(parts: &[Field]) -> Result<Field> {
        let grid = parts[0].grid;
        if parts.iter().any(|p| p.grid != grid || p.components != 1) {
            return Err(Error::usage("components must be scalar fields on one grid"));
        }
        let mut data = Vec::with_capacity(grid.len() * parts.len());
        for i in 0..grid.len() {
            for p in parts {
                data.push(p.data[i]);
            }
        }
        Field::new(grid, parts.len(), data)
    }

    pub fn is_spinor(&self) -> bool {
        self.components == 4
    }

    /// Grid-weighted L² norm.
    pub fn norm_l2(&self) -> f64 {
        let w = self.grid.weights();
        let mut s = 0.0;
        for (i, wi) in w.iter().enumerate() {
            for c in 0..self.components {
                s += wi * self.data[i * self.components + c].norm_sqr();
            }
        }
        s.sqrt()
    }

    /// Relative L² distance ‖self − other‖ / ‖other‖.
    pub fn rel_l2_error(&self, reference: &Field) -> Result<f64> {
        self.check_same(reference)?;
        let diff = Field {
            grid: self.grid,
            components: self.components,
            data: self.data.iter().zip(&reference.data).map(|(a, b)| a - b).collect(),
        };
        Ok(diff.norm_l2() / reference.norm_l2())
    }

    pub fn check_same(&self, other: &Field) -> Result<()> {
        if self.grid != other.grid || self.components != other.components {
            return Err(Error::usage("fields live on mismatched grids"));
        }
        Ok(())
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Field {
        Field {
            grid: self.grid,
            components: self.components,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Multiply pointwise by a function of position (3D grids).
    pub fn modulate(&self, f: impl Fn([f64; 3]) -> Complex64) -> Field {
        let mut out = self.clone();
        for i in 0..self.grid.len() {
            let w = f(self.grid.position(i));
            for c in 0..self.components {
                out.data[i * self.components + c] *= w;
            }
        }
        out
    }

    /// Serialise to the text format described in the module docs.
    pub fn to_text(&self) -> String {
        let mut s = String::from("SQRTFIELD 1\n");
        match self.grid {
            Grid::Radial { n, spacing } => writeln!(s, "grid radial {n} {spacing:e}").unwrap(),
            Grid::Periodic3d { dims, spacing } => writeln!(
                s,
                "grid periodic3d {} {} {} {spacing:e}",
                dims[0], dims[1], dims[2]
            )
            .unwrap(),
            Grid::Open3d { dims, spacing } => {
                writeln!(s, "grid open3d {} {} {} {spacing:e}", dims[0], dims[1], dims[2]).unwrap()
            }
        }
        writeln!(s, "components {}", self.components).unwrap();
        s.push_str("data\n");
        for v in &self.data {
            writeln!(s, "{:e} {:e}", v.re, v.im).unwrap();
        }
        s
    }

    /// Parse the text format; errors report the byte offset of the offending line.
    pub fn from_text(text: &str) -> Result<Field> {
        let mut lines = Lines::new(text);
        let (off, header) = lines.next_record()?;
        if header.split_whitespace().collect::<Vec<_>>() != ["SQRTFIELD", "1"] {
            return Err(malformed(off, "expected header 'SQRTFIELD 1'"));
        }
        let (off, gline) = lines.next_record()?;
        let toks: Vec<&str> = gline.split_whitespace().collect();
        let grid = match toks.as_slice() {
            ["grid", "radial", n, h] => Grid::Radial {
                n: parse_num(off, n)?,
                spacing: parse_num(off, h)?,
            },
            ["grid", kind @ ("periodic3d" | "open3d"), a, b, c, h] => {
                let dims = [parse_num(off, a)?, parse_num(off, b)?, parse_num(off, c)?];
                let spacing = parse_num(off, h)?;
                if *kind == "periodic3d" {
                    Grid::Periodic3d { dims, spacing }
                } else {
                    Grid::Open3d { dims, spacing }
                }
            }
            _ => return Err(malformed(off, "expected 'grid radial N H' or 'grid periodic3d|open3d NX NY NZ H'")),
        };
        grid.validate().map_err(|e| malformed(off, &e.to_string()))?;
        let (off, cline) = lines.next_record()?;
        let components: usize = match cline.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["components", c] => parse_num(off, c)?,
            _ => return Err(malformed(off, "expected 'components N'")),
        };
        if components != 1 && components != 4 {
            return Err(malformed(off, "components must be 1 or 4"));
        }
        let (off, dline) = lines.next_record()?;
        if dline.trim() != "data" {
            return Err(malformed(off, "expected 'data'"));
        }
        let want = grid.len() * components;
        let mut data = Vec::with_capacity(want);
        while data.len() < want {
            let (off, l) = lines
                .next_record()
                .map_err(|_| malformed(text.len(), &format!("expected {want} samples, found {}", data.len())))?;
            let t: Vec<&str> = l.split_whitespace().collect();
            if t.len() != 2 {
                return Err(malformed(off, "sample lines hold exactly two numbers"));
            }
            let re: f64 = parse_num(off, t[0])?;
            let im: f64 = parse_num(off, t[1])?;
            if !(re.is_finite() && im.is_finite()) {
                return Err(malformed(off, "non-finite sample"));
            }
            data.push(Complex64::new(re, im));
        }
        if let Ok((off, _)) = lines.next_record() {
            return Err(malformed(off, "trailing data after the last sample"));
        }
        Ok(Field {
            grid,
            components,
            data,
        })
    }
}

fn malformed(offset: usize, message: &str) -> Error {
    Error::Malformed {
        offset,
        message: message.to_string(),
    }
}

fn parse_num<T: std::str::FromStr>(off: usize, tok: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| malformed(off, &format!("cannot parse number '{tok}'")))
}

struct Lines<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines { text, pos: 0 }
    }

    /// Next non-empty, non-comment line and its byte offset.
    fn next_record(&mut self) -> Result<(usize, &'a str)> {
        while self.pos < self.text.len() {
            let start = self.pos;
            let rest = &self.text[start..];
            let end = rest.find('\n').map(|i| start + i).unwrap_or(self.text.len());
            self.pos = end + 1;
            let line = &self.text[start..end];
            let t = line.trim();
            if !t.is_empty() && !t.starts_with('#') {
                return Ok((start, line));
            }
        }
        Err(malformed(self.text.len(), "unexpected end of file"))
    }
}
