use std::io::{BufRead, Write};

use num_complex::Complex;

use super::{BanachSpec, Field, GridSpec};
use crate::{Error, Real, Result};

fn header(dim: usize, comps: usize) -> String {
    let mut cols: Vec<String> = vec!["x".into()];
    if dim == 2 {
        cols.push("y".into());
    }
    for c in 0..comps {
        cols.push(format!("re_{c}"));
        cols.push(format!("im_{c}"));
    }
    cols.join(",")
}

/// Writes `x[,y],re_0,im_0,…` rows in grid order, 17 significant digits.
pub fn write_field_csv<T: Real, W: Write>(f: &Field<T>, mut out: W) -> Result<()> {
    let grid = f.grid();
    let comps = f.banach().components();
    let np = grid.npoints();
    writeln!(out, "{}", header(grid.dim(), comps))?;
    let mut line = String::new();
    for p in 0..np {
        line.clear();
        let x = grid.point(p);
        line.push_str(&format!("{:.16e}", x[0].as_f64()));
        if grid.dim() == 2 {
            line.push_str(&format!(",{:.16e}", x[1].as_f64()));
        }
        for c in 0..comps {
            let z = f.values()[c * np + p];
            line.push_str(&format!(",{:.16e},{:.16e}", z.re.as_f64(), z.im.as_f64()));
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

/// Reads a field written by [`write_field_csv`] onto a known grid and value space.
///
/// Errors carry 1-based line numbers.
pub fn read_field_csv<T: Real, R: BufRead>(input: R, grid: GridSpec<T>, banach: BanachSpec<T>) -> Result<Field<T>> {
    let comps = banach.components();
    let np = grid.npoints();
    let dim = grid.dim();
    let width = dim + 2 * comps;
    let mut lines = input.lines();
    let head = match lines.next() {
        Some(l) => l?,
        None => return Err(parse_err(1, "empty input")),
    };
    if head.trim() != header(dim, comps) {
        return Err(parse_err(1, format!("expected header `{}`", header(dim, comps))));
    }
    let tol = grid.spacing() * T::lit(1e-6);
    let mut values = vec![Complex::new(T::zero(), T::zero()); np * comps];
    let mut p = 0;
    for (idx, line) in lines.enumerate() {
        let lineno = idx + 2;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        if p >= np {
            return Err(parse_err(lineno, format!("more than {np} data rows")));
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != width {
            return Err(parse_err(lineno, format!("expected {width} columns, found {}", fields.len())));
        }
        let mut nums = Vec::with_capacity(width);
        for (col, s) in fields.iter().enumerate() {
            let v: f64 = s
                .parse()
                .map_err(|_| parse_err(lineno, format!("column {} is not a number: `{s}`", col + 1)))?;
            if !v.is_finite() {
                return Err(parse_err(lineno, format!("column {} is not finite", col + 1)));
            }
            nums.push(T::lit(v));
        }
        let x = grid.point(p);
        for d in 0..dim {
            if (nums[d] - x[d]).abs() > tol {
                return Err(parse_err(lineno, format!("coordinate {} does not match the grid point {}", nums[d], x[d])));
            }
        }
        for c in 0..comps {
            values[c * np + p] = Complex::new(nums[dim + 2 * c], nums[dim + 2 * c + 1]);
        }
        p += 1;
    }
    if p != np {
        return Err(parse_err(p + 2, format!("expected {np} data rows, found {p}")));
    }
    Field::new(grid, banach, values)
}
