//! Matrix Market coordinate format (`real general`, 1-based indices).

use std::io::{BufRead, Write};

use super::csr::CsrMatrix;
use crate::error::{Error, Result};

const HEADER: &str = "%%MatrixMarket matrix coordinate real general";

pub fn write_matrix_market<W: Write>(matrix: &CsrMatrix, mut out: W) -> Result<()> {
    writeln!(out, "{HEADER}")?;
    writeln!(out, "{} {} {}", matrix.n_rows(), matrix.n_cols(), matrix.nnz())?;
    for (r, c, v) in matrix.triplets() {
        writeln!(out, "{} {} {:.16e}", r + 1, c + 1, v)?;
    }
    Ok(())
}

pub fn read_matrix_market<R: BufRead>(input: R) -> Result<CsrMatrix> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty Matrix Market file".into()))??;
    let tokens: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() != 5
        || tokens[0] != "%%matrixmarket"
        || tokens[1] != "matrix"
        || tokens[2] != "coordinate"
        || tokens[3] != "real"
        || tokens[4] != "general"
    {
        return Err(Error::Parse(format!("unsupported Matrix Market header: {header}")));
    }

    let mut size: Option<(usize, usize, usize)> = None;
    let mut triplets = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let bad = || Error::Parse(format!("line {}: cannot parse `{line}`", lineno + 2));
        match size {
            None => {
                if fields.len() != 3 {
                    return Err(bad());
                }
                let parse = |s: &str| s.parse::<usize>().map_err(|_| bad());
                size = Some((parse(fields[0])?, parse(fields[1])?, parse(fields[2])?));
            }
            Some(_) => {
                if fields.len() != 3 {
                    return Err(bad());
                }
                let r: usize = fields[0].parse().map_err(|_| bad())?;
                let c: usize = fields[1].parse().map_err(|_| bad())?;
                let v: f64 = fields[2].parse().map_err(|_| bad())?;
                if r == 0 || c == 0 {
                    return Err(Error::Parse(format!("line {}: indices are 1-based", lineno + 2)));
                }
                triplets.push((r - 1, c - 1, v));
            }
        }
    }
    let (n_rows, n_cols, nnz) = size.ok_or_else(|| Error::Parse("missing size line".into()))?;
    if triplets.len() != nnz {
        return Err(Error::Parse(format!(
            "expected {nnz} entries, found {}",
            triplets.len()
        )));
    }
    CsrMatrix::from_triplets(n_rows, n_cols, triplets)
}
