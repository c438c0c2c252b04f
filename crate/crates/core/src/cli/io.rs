//! Matrix files: a JSON document `{"rows", "cols", "data": [[re, im], ...]}`
//! in row-major order, or CSV with one row per line and entries like `1.5-2i`.

use std::fs;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::{c64, ComplexMatrix, C64};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl MatrixFile {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        Self { rows: m.rows(), cols: m.cols(), data: m.row_major().iter().map(|z| [z.re, z.im]).collect() }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let entries = self.data.iter().map(|&[re, im]| c64(re, im)).collect();
        ComplexMatrix::from_row_major(self.rows, self.cols, entries)
    }
}

/// Raw bytes of a matrix argument; `-` reads standard input.
pub fn read_source(arg: &str, stdin: &mut dyn Read) -> Result<Vec<u8>> {
    if arg == "-" {
        let mut buf = Vec::new();
        stdin.read_to_end(&mut buf).map_err(|e| Error::InvalidMatrix(format!("reading stdin: {e}")))?;
        Ok(buf)
    } else {
        fs::read(arg).map_err(|e| Error::InvalidMatrix(format!("reading {arg}: {e}")))
    }
}

/// JSON when the first non-blank byte is `{`, CSV otherwise.
pub fn parse_matrix(bytes: &[u8]) -> Result<ComplexMatrix> {
    let text = std::str::from_utf8(bytes).map_err(|_| Error::InvalidMatrix("input is not UTF-8".into()))?;
    if text.trim_start().starts_with('{') {
        let file: MatrixFile =
            serde_json::from_str(text).map_err(|e| Error::InvalidMatrix(format!("JSON matrix: {e}")))?;
        file.to_matrix()
    } else {
        parse_csv(text)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn parse_csv(text: &str) -> Result<ComplexMatrix> {
    let mut rows: Vec<Vec<C64>> = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split(',')
            .map(|cell| {
                parse_complex(cell.trim())
                    .ok_or_else(|| Error::InvalidMatrix(format!("line {}: cannot parse `{}`", line_no + 1, cell.trim())))
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::InvalidMatrix(format!(
                    "line {}: {} entries, expected {}",
                    line_no + 1,
                    row.len(),
                    first.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::InvalidMatrix("CSV input has no rows".into()));
    }
    let (r, c) = (rows.len(), rows[0].len());
    ComplexMatrix::from_row_major(r, c, rows.into_iter().flatten().collect())
}

/// `a`, `bi`, `a+bi`, `a-bi`, `i`, `-i`, with optional exponents.
pub fn parse_complex(s: &str) -> Option<C64> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return None;
    }
    let Some(body) = s.strip_suffix(['i', 'j']) else {
        return s.parse::<f64>().ok().map(|re| c64(re, 0.0));
    };
    // Split before the last sign that is neither leading nor part of an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len()).rev().find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (body[..k].parse::<f64>().ok()?, &body[k..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => other.parse::<f64>().ok()?,
    };
    Some(c64(re, im))
}

/// Row per line, entries `a+bi` in shortest round-trip form.
pub fn to_csv(m: &ComplexMatrix) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        let cells: Vec<String> = (0..m.cols())
            .map(|j| {
                let z = m.get(i, j);
                let sign = if z.im.is_sign_negative() { '-' } else { '+' };
                format!("{}{sign}{}i", z.re, z.im.abs())
            })
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn matrix_json(m: &ComplexMatrix) -> String {
    let mut s = serde_json::to_string(&MatrixFile::from_matrix(m)).expect("matrix files always serialize");
    s.push('\n');
    s
}

pub fn is_csv_path(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("1.5-2i"), Some(c64(1.5, -2.0)));
        assert_eq!(parse_complex("-i"), Some(c64(0.0, -1.0)));
        assert_eq!(parse_complex("3"), Some(c64(3.0, 0.0)));
        assert_eq!(parse_complex("2.5e-3+1e+2i"), Some(c64(2.5e-3, 100.0)));
        assert_eq!(parse_complex("-4e-1i"), Some(c64(0.0, -0.4)));
        assert_eq!(parse_complex(" 1 + i "), Some(c64(1.0, 1.0)));
        assert_eq!(parse_complex("abc"), None);
        assert_eq!(parse_complex(""), None);
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let m = ComplexMatrix::from_fn(2, 3, |i, j| c64(0.1 * i as f64 - 1e-17 * j as f64, -(j as f64) / 3.0));
        assert_eq!(parse_csv(&to_csv(&m)).unwrap(), m);
    }

    #[test]
    fn json_round_trip_and_validation() {
        let m = ComplexMatrix::from_fn(2, 2, |i, j| c64(i as f64 / 7.0, j as f64));
        assert_eq!(parse_matrix(matrix_json(&m).as_bytes()).unwrap(), m);
        assert!(parse_matrix(br#"{"rows":2,"cols":2,"data":[[1,0]]}"#).is_err());
        assert!(parse_matrix(b"1,2\n3").is_err());
    }

    #[test]
    fn digest_is_stable() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
