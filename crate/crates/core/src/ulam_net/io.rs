//! Plain-text matrix exchange format.
//!
//! ```text
//! ulam <N> <n_c> <seed>
//! <i> <j> <value>
//! ...
//! ```
//!
//! One line per nonzero, ordered by column then row. Values are written as
//! the shortest decimal that parses back to the identical `f64`.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::grid::CellGrid;
use super::matrix::UlamMatrix;
use crate::error::{Error, Result};
use crate::sparse::CscMatrix;

pub fn write_matrix<W: Write>(s: &UlamMatrix, mut w: W) -> io::Result<()> {
    writeln!(w, "ulam {} {} {}", s.n(), s.n_c(), s.seed())?;
    let m = s.matrix();
    for j in 0..m.n() {
        for (i, v) in m.column(j) {
            writeln!(w, "{i} {j} {v}")?;
        }
    }
    Ok(())
}

pub fn export_matrix(s: &UlamMatrix, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_matrix(s, &mut w)?;
    w.flush()?;
    Ok(())
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Parses the text format and validates column stochasticity. The grid is
/// taken to be square when `N` is a perfect square and `N x 1` otherwise.
pub fn read_matrix<R: BufRead>(r: R) -> Result<UlamMatrix> {
    let mut lines = r.lines().enumerate();
    let (n, n_c, seed) = loop {
        let Some((idx, line)) = lines.next() else {
            return Err(parse_err(1, "empty file, expected `ulam N n_c seed` header"));
        };
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 4 || f[0] != "ulam" {
            return Err(parse_err(idx + 1, format!("expected `ulam N n_c seed`, found `{line}`")));
        }
        let num = |s: &str, what: &str| {
            s.parse::<u64>()
                .map_err(|e| parse_err(idx + 1, format!("bad {what} `{s}`: {e}")))
        };
        break (num(f[1], "N")? as usize, num(f[2], "n_c")? as usize, num(f[3], "seed")?);
    };
    if n == 0 || n > u32::MAX as usize {
        return Err(parse_err(1, format!("unsupported dimension {n}")));
    }

    let mut columns: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut f = line.split_whitespace();
        let (Some(a), Some(b), Some(c), None) = (f.next(), f.next(), f.next(), f.next()) else {
            return Err(parse_err(line_no, format!("expected `i j value`, found `{line}`")));
        };
        let i: usize = a
            .parse()
            .map_err(|e| parse_err(line_no, format!("bad row `{a}`: {e}")))?;
        let j: usize = b
            .parse()
            .map_err(|e| parse_err(line_no, format!("bad column `{b}`: {e}")))?;
        let v: f64 = c
            .parse()
            .map_err(|e| parse_err(line_no, format!("bad value `{c}`: {e}")))?;
        if i >= n || j >= n {
            return Err(parse_err(line_no, format!("index ({i}, {j}) outside {n} x {n}")));
        }
        if !v.is_finite() || v <= 0.0 {
            return Err(parse_err(line_no, format!("value {v} is not a positive probability")));
        }
        if columns[j].iter().any(|e| e.0 as usize == i) {
            return Err(parse_err(line_no, format!("duplicate entry ({i}, {j})")));
        }
        columns[j].push((i as u32, v));
    }
    let matrix = CscMatrix::from_columns(n, columns)?;
    matrix.validate_stochastic()?;

    let side = (n as f64).sqrt().round() as usize;
    let grid = if side * side == n {
        CellGrid::square(side)?
    } else {
        CellGrid::new(n, 1)?
    };
    Ok(UlamMatrix {
        matrix,
        grid,
        n_c,
        seed,
        phase_set: None,
    })
}

pub fn import_matrix(path: impl AsRef<Path>) -> Result<UlamMatrix> {
    read_matrix(BufReader::new(File::open(path)?))
}
