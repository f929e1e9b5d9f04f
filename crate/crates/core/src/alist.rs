//! Sparse binary matrices and their text formats.
//!
//! Two encodings are supported:
//!
//! * alist: `n_cols n_rows`, `max_col_degree max_row_degree`, the column
//!   degrees, the row degrees, then one line per column and one per row of
//!   1-based indices, zero-padded to the maximum degree.
//! * dense: one line of `0`/`1` characters per row.
//!
//! Writers emit single-space separated fields and a trailing newline on every
//! line, so `write(read(s)) == s` for any file produced by the writer.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::gf2::BitVector;

/// A binary matrix stored as sorted column indices per row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseBinaryMatrix {
    rows: usize,
    cols: usize,
    row_entries: Vec<Vec<usize>>,
}

impl SparseBinaryMatrix {
    pub fn new(rows: usize, cols: usize, mut row_entries: Vec<Vec<usize>>) -> Result<Self> {
        if row_entries.len() != rows {
            return Err(Error::InvalidArgument(format!(
                "expected {rows} rows, got {}",
                row_entries.len()
            )));
        }
        for (r, e) in row_entries.iter_mut().enumerate() {
            e.sort_unstable();
            if e.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidArgument(format!("row {r} repeats a column")));
            }
            if e.last().is_some_and(|&c| c >= cols) {
                return Err(Error::InvalidArgument(format!("row {r} has column out of range")));
            }
        }
        Ok(SparseBinaryMatrix {
            rows,
            cols,
            row_entries,
        })
    }

    pub fn from_rows(cols: usize, rows: &[BitVector]) -> Self {
        SparseBinaryMatrix {
            rows: rows.len(),
            cols,
            row_entries: rows.iter().map(|r| r.iter_ones().collect()).collect(),
        }
    }

    pub fn to_rows(&self) -> Vec<BitVector> {
        self.row_entries
            .iter()
            .map(|e| BitVector::from_support(self.cols, e))
            .collect()
    }

    pub fn num_rows(&self) -> usize {
        self.rows
    }

    pub fn num_cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[usize] {
        &self.row_entries[r]
    }

    pub fn column_entries(&self) -> Vec<Vec<usize>> {
        let mut cols = vec![Vec::new(); self.cols];
        for (r, e) in self.row_entries.iter().enumerate() {
            for &c in e {
                cols[c].push(r);
            }
        }
        cols
    }

    pub fn transpose(&self) -> Self {
        SparseBinaryMatrix {
            rows: self.cols,
            cols: self.rows,
            row_entries: self.column_entries(),
        }
    }

    pub fn to_alist(&self) -> String {
        let col_entries = self.column_entries();
        let max_col = col_entries.iter().map(Vec::len).max().unwrap_or(0);
        let max_row = self.row_entries.iter().map(Vec::len).max().unwrap_or(0);
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.cols, self.rows);
        let _ = writeln!(out, "{max_col} {max_row}");
        push_line(&mut out, col_entries.iter().map(Vec::len));
        push_line(&mut out, self.row_entries.iter().map(Vec::len));
        for e in &col_entries {
            push_padded(&mut out, e, max_col);
        }
        for e in &self.row_entries {
            push_padded(&mut out, e, max_row);
        }
        out
    }

    pub fn from_alist(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let mut next = |what: &str| -> Result<(usize, Vec<usize>)> {
            let (no, l) = lines.next().ok_or(Error::Parse {
                line: 0,
                msg: format!("unexpected end of file reading {what}"),
            })?;
            let nums = l
                .split_whitespace()
                .map(|t| {
                    t.parse::<usize>().map_err(|e| Error::Parse {
                        line: no,
                        msg: format!("{what}: {e}"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((no, nums))
        };
        let (no, dims) = next("dimensions")?;
        let [cols, rows] = dims[..] else {
            return Err(Error::Parse {
                line: no,
                msg: "expected `n_cols n_rows`".into(),
            });
        };
        let (no, max_deg) = next("maximum degrees")?;
        let [max_col, max_row] = max_deg[..] else {
            return Err(Error::Parse {
                line: no,
                msg: "expected `max_col_degree max_row_degree`".into(),
            });
        };
        let (no, col_deg) = next("column degrees")?;
        if col_deg.len() != cols {
            return Err(Error::Parse {
                line: no,
                msg: format!("expected {cols} column degrees"),
            });
        }
        let (no, row_deg) = next("row degrees")?;
        if row_deg.len() != rows {
            return Err(Error::Parse {
                line: no,
                msg: format!("expected {rows} row degrees"),
            });
        }
        let mut from_cols = vec![Vec::new(); rows];
        for (c, &d) in col_deg.iter().enumerate() {
            // Zero-width lists are written as blank lines, which are skipped.
            if max_col == 0 {
                continue;
            }
            let (no, idx) = next("column list")?;
            let entries = nonzero_entries(&idx, d, rows, no)?;
            for r in entries {
                from_cols[r].push(c);
            }
        }
        let mut row_entries = Vec::with_capacity(rows);
        for &d in &row_deg {
            if max_row == 0 {
                row_entries.push(Vec::new());
                continue;
            }
            let (no, idx) = next("row list")?;
            let mut entries = nonzero_entries(&idx, d, cols, no)?;
            entries.sort_unstable();
            row_entries.push(entries);
        }
        if row_entries != from_cols {
            return Err(Error::Parse {
                line: 0,
                msg: "row and column lists disagree".into(),
            });
        }
        Self::new(rows, cols, row_entries)
    }

    pub fn to_dense(&self) -> String {
        let mut out = String::with_capacity(self.rows * (self.cols + 1));
        for r in self.to_rows() {
            let _ = writeln!(out, "{r}");
        }
        out
    }

    pub fn from_dense(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (i, l) in text.lines().enumerate() {
            let l = l.trim();
            if l.is_empty() {
                continue;
            }
            let v = BitVector::parse(l).map_err(|e| Error::Parse {
                line: i + 1,
                msg: e.to_string(),
            })?;
            if let Some(first) = rows.first() {
                if BitVector::len(first) != v.len() {
                    return Err(Error::Parse {
                        line: i + 1,
                        msg: "rows have different lengths".into(),
                    });
                }
            }
            rows.push(v);
        }
        let cols = rows.first().map_or(0, BitVector::len);
        Ok(Self::from_rows(cols, &rows))
    }

    /// Reads either format, choosing alist when the first non-empty line has
    /// whitespace-separated fields.
    pub fn parse_any(text: &str) -> Result<Self> {
        let first = text.lines().map(str::trim).find(|l| !l.is_empty());
        match first {
            Some(l) if l.split_whitespace().count() > 1 => Self::from_alist(text),
            _ => Self::from_dense(text),
        }
    }
}

fn push_line(out: &mut String, values: impl Iterator<Item = usize>) {
    let parts: Vec<String> = values.map(|v| v.to_string()).collect();
    out.push_str(&parts.join(" "));
    out.push('\n');
}

fn push_padded(out: &mut String, entries: &[usize], width: usize) {
    let vals = entries
        .iter()
        .map(|&e| e + 1)
        .chain(std::iter::repeat(0))
        .take(width);
    push_line(out, vals);
}

fn nonzero_entries(idx: &[usize], degree: usize, bound: usize, line: usize) -> Result<Vec<usize>> {
    let entries: Vec<usize> = idx.iter().copied().filter(|&v| v != 0).collect();
    if entries.len() != degree {
        return Err(Error::Parse {
            line,
            msg: format!("expected {degree} indices, found {}", entries.len()),
        });
    }
    if let Some(&bad) = entries.iter().find(|&&v| v > bound) {
        return Err(Error::Parse {
            line,
            msg: format!("index {bad} out of range 1..={bound}"),
        });
    }
    Ok(entries.into_iter().map(|v| v - 1).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::hamming_7_4;
    use proptest::prelude::*;

    const HAMMING_ALIST: &str = "7 4\n3 3\n1 1 1 1 3 3 3\n3 3 3 3\n1 0 0\n2 0 0\n3 0 0\n4 0 0\n1 3 4\n1 2 3\n2 3 4\n1 5 6\n2 6 7\n3 5 6 7\n4 5 7\n";

    #[test]
    fn hamming_alist_exact() {
        let m = SparseBinaryMatrix::from_rows(7, hamming_7_4().generator());
        // Row 3 of the generator has weight 4, so max row degree is 4.
        let text = m.to_alist();
        let parsed = SparseBinaryMatrix::from_alist(&text).unwrap();
        assert_eq!(parsed, m);
        assert_eq!(parsed.to_alist(), text);
        assert!(text.starts_with("7 4\n3 4\n1 1 1 1 3 3 3\n3 3 4 3\n"));
    }

    #[test]
    fn inconsistent_alist_is_rejected() {
        // Row degree line claims 3 for a row with 4 entries.
        assert!(SparseBinaryMatrix::from_alist(HAMMING_ALIST).is_err());
    }

    #[test]
    fn dense_round_trip_and_detection() {
        let text = "1000110\n0100011\n0010111\n0001101\n";
        let m = SparseBinaryMatrix::parse_any(text).unwrap();
        assert_eq!(m.to_rows(), hamming_7_4().generator());
        assert_eq!(m.to_dense(), text);
        let via_alist = SparseBinaryMatrix::parse_any(&m.to_alist()).unwrap();
        assert_eq!(via_alist, m);
    }

    #[test]
    fn dense_rejects_garbage() {
        assert!(SparseBinaryMatrix::from_dense("10a\n").is_err());
        assert!(SparseBinaryMatrix::from_dense("101\n10\n").is_err());
    }

    proptest! {
        #[test]
        fn alist_write_read_write_is_identity(
            rows in 1usize..12,
            cols in 1usize..20,
            seed in proptest::collection::vec(any::<u32>(), 1..240),
        ) {
            let entries: Vec<Vec<usize>> = (0..rows)
                .map(|r| {
                    let mut e: Vec<usize> = (0..cols)
                        .filter(|&c| seed[(r * cols + c) % seed.len()] % 3 == 0)
                        .collect();
                    e.dedup();
                    e
                })
                .collect();
            let m = SparseBinaryMatrix::new(rows, cols, entries).unwrap();
            let text = m.to_alist();
            let back = SparseBinaryMatrix::from_alist(&text).unwrap();
            prop_assert_eq!(&back, &m);
            prop_assert_eq!(back.to_alist(), text);
            let dense = SparseBinaryMatrix::from_dense(&m.to_dense()).unwrap();
            prop_assert_eq!(dense.to_rows(), m.to_rows());
        }
    }
}
