//! Matrix files.
//!
//! Two encodings are accepted. The structured one is JSON,
//! `{"dim": 4, "rows": [[...], ...]}`, with each entry either a real number or
//! an `[re, im]` pair. The plain one is whitespace-separated real numbers, one
//! row per line, `#` starting a comment.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mat::ComplexMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl Entry {
    fn value(self) -> Complex64 {
        match self {
            Entry::Real(x) => Complex64::new(x, 0.0),
            Entry::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub dim: usize,
    pub rows: Vec<Vec<Entry>>,
}

impl MatrixFile {
    pub fn from_matrix(m: &ComplexMatrix) -> MatrixFile {
        let real = m.is_real(0.0);
        let rows = (0..m.dim())
            .map(|i| {
                m.row(i)
                    .iter()
                    .map(|z| if real { Entry::Real(z.re) } else { Entry::Complex([z.re, z.im]) })
                    .collect()
            })
            .collect();
        MatrixFile { dim: m.dim(), rows }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        check_dim(self.dim, 1)?;
        if self.rows.len() != self.dim {
            return Err(Error::parse(1, format!("expected {} rows, found {}", self.dim, self.rows.len())));
        }
        let mut data = Vec::with_capacity(self.dim * self.dim);
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != self.dim {
                return Err(Error::parse(
                    1,
                    format!("row {} has {} entries, expected {}", i + 1, row.len(), self.dim),
                ));
            }
            for e in row {
                let z = e.value();
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::parse(1, format!("row {} has a non-finite entry", i + 1)));
                }
                data.push(z);
            }
        }
        ComplexMatrix::from_row_major(data)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("matrix serializes")
    }
}

fn check_dim(dim: usize, line: usize) -> Result<()> {
    if dim == 4 || dim == 8 {
        Ok(())
    } else {
        Err(Error::parse(line, format!("matrix dimension must be 4 or 8, found {dim}")))
    }
}

/// Parses either encoding; JSON is recognized by a leading `{`.
pub fn parse_matrix(text: &str) -> Result<ComplexMatrix> {
    if text.trim_start().starts_with('{') {
        let file: MatrixFile =
            serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()))?;
        return file.to_matrix();
    }
    let mut rows: Vec<(usize, Vec<f64>)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| Error::parse(idx + 1, format!("bad number {t:?}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push((idx + 1, row));
    }
    let dim = rows.len();
    check_dim(dim, rows.last().map_or(1, |r| r.0))?;
    for (line, row) in &rows {
        if row.len() != dim {
            return Err(Error::parse(
                *line,
                format!("row has {} entries, expected {dim}", row.len()),
            ));
        }
    }
    let flat: Vec<f64> = rows.into_iter().flat_map(|(_, r)| r).collect();
    ComplexMatrix::from_real(dim, &flat)
}

/// Plain encoding with round-trip float formatting.
pub fn to_plain(m: &ComplexMatrix) -> String {
    let mut out = String::new();
    for i in 0..m.dim() {
        let row: Vec<String> = m.row(i).iter().map(|z| format!("{:?}", z.re)).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let m = ComplexMatrix::from_real(4, &(0..16).map(|k| k as f64 * 0.125 - 1.0).collect::<Vec<_>>()).unwrap();
        let text = MatrixFile::from_matrix(&m).to_json();
        assert_eq!(parse_matrix(&text).unwrap(), m);
        assert!(text.contains("\"dim\": 4"));
    }

    #[test]
    fn complex_entries() {
        let text = r#"{"dim": 4, "rows": [[[1, 0], 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, [0, 1]]]}"#;
        let m = parse_matrix(text).unwrap();
        assert_eq!(m[(3, 3)], Complex64::new(0.0, 1.0));
        assert_eq!(m[(0, 0)], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn plain_round_trip_and_errors() {
        let m = ComplexMatrix::identity(8);
        assert_eq!(parse_matrix(&to_plain(&m)).unwrap(), m);
        assert!(matches!(parse_matrix("1 0\n0 1\n"), Err(Error::Parse { .. })));
        let bad = "1 0 0 0\n0 1 0 0\n0 0 x 0\n0 0 0 1\n";
        assert!(matches!(parse_matrix(bad), Err(Error::Parse { line: 3, .. })));
        let short = "# id\n1 0 0 0\n0 1 0 0\n0 0 1\n0 0 0 1\n";
        assert!(matches!(parse_matrix(short), Err(Error::Parse { line: 4, .. })));
        assert!(parse_matrix(r#"{"dim": 4, "rows": [[1]]}"#).is_err());
    }
}
