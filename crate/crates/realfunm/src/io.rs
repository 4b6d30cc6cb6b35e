//! Plain-text matrix files.
//!
//! ```text
//! CMAT 2 2
//! (1e0,0e0) (2.5e-1,0e0)
//! (0e0,0e0) (-3e0,1e-3)
//! ```
//!
//! The header gives rows and columns; the `rows·cols` tokens follow in
//! row-major order, separated by any whitespace. Numbers are written in the
//! shortest form that parses back to the same double.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use realfunm_core::la::{CMatrix, C64};

#[derive(Debug, thiserror::Error)]
pub enum MatrixFileError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
}

fn format_err(line: usize, msg: impl Into<String>) -> MatrixFileError {
    MatrixFileError::Format { line, msg: msg.into() }
}

pub fn to_string(m: &CMatrix) -> String {
    let mut out = format!("CMAT {} {}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if j > 0 {
                out.push(' ');
            }
            let z = m[(i, j)];
            let _ = write!(out, "({:e},{:e})", z.re, z.im);
        }
        out.push('\n');
    }
    out
}

fn parse_token(tok: &str, line: usize) -> Result<C64, MatrixFileError> {
    let inner = tok
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| format_err(line, format!("expected (re,im), found {tok:?}")))?;
    let (re, im) = inner.split_once(',').ok_or_else(|| format_err(line, format!("missing comma in {tok:?}")))?;
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| format_err(line, format!("bad number {s:?}")));
    Ok(C64::new(num(re)?, num(im)?))
}

pub fn from_str(text: &str) -> Result<CMatrix, MatrixFileError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (hline, header) = lines.next().ok_or_else(|| format_err(1, "empty file"))?;
    let mut head = header.split_whitespace();
    if head.next() != Some("CMAT") {
        return Err(format_err(hline + 1, "missing CMAT header"));
    }
    let dim = |s: Option<&str>| -> Result<usize, MatrixFileError> {
        s.and_then(|s| s.parse().ok()).ok_or_else(|| format_err(hline + 1, "bad dimensions"))
    };
    let rows = dim(head.next())?;
    let cols = dim(head.next())?;
    if head.next().is_some() {
        return Err(format_err(hline + 1, "trailing data in header"));
    }
    let mut data = Vec::with_capacity(rows * cols);
    let mut last_line = hline + 1;
    for (idx, line) in lines {
        last_line = idx + 1;
        for tok in line.split_whitespace() {
            data.push(parse_token(tok, idx + 1)?);
        }
    }
    if data.len() != rows * cols {
        return Err(format_err(last_line, format!("expected {} entries, found {}", rows * cols, data.len())));
    }
    CMatrix::from_vec(rows, cols, data).map_err(|e| format_err(last_line, e.to_string()))
}

pub fn read(path: &Path) -> Result<CMatrix, MatrixFileError> {
    let text = fs::read_to_string(path).map_err(|source| MatrixFileError::Io { path: path.display().to_string(), source })?;
    from_str(&text)
}

pub fn write(path: &Path, m: &CMatrix) -> Result<(), MatrixFileError> {
    fs::write(path, to_string(m)).map_err(|source| MatrixFileError::Io { path: path.display().to_string(), source })
}
