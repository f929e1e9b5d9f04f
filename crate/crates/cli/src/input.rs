use std::fs;
use std::path::Path;

use anyhow::Context;
use sldgm::{BinaryCode, SparseBinaryMatrix, TannerGraph};

use crate::{usage, CmdResult, Failure};

pub fn read_text(path: &Path) -> CmdResult<String> {
    fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::Usage)
}

/// Generator rows from a dense 0/1 file or an alist file.
pub fn read_generator(path: &Path) -> CmdResult<BinaryCode> {
    let m = SparseBinaryMatrix::parse_any(&read_text(path)?)
        .map_err(|e| usage(format!("{}: {e}", path.display())))?;
    BinaryCode::new(m.num_cols(), m.to_rows()).map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// A Tanner graph stored as an alist parity-check matrix.
pub fn read_graph(path: &Path) -> CmdResult<TannerGraph> {
    let m = SparseBinaryMatrix::parse_any(&read_text(path)?)
        .map_err(|e| usage(format!("{}: {e}", path.display())))?;
    Ok(TannerGraph::from_matrix(&m))
}

/// Real numbers, one per line; blank lines and `#` comments are skipped.
pub fn read_vector(path: &Path) -> CmdResult<Vec<f64>> {
    let text = read_text(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let x: f64 = line
            .parse()
            .map_err(|_| usage(format!("{}:{}: not a number: {line:?}", path.display(), i + 1)))?;
        out.push(x);
    }
    Ok(out)
}

/// A nonnegative integer, also accepting scientific notation such as `1e5`.
pub fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let x: f64 = s.parse().map_err(|_| format!("not a count: {s:?}"))?;
    if x < 0.0 || x.fract() != 0.0 || x > u64::MAX as f64 {
        return Err(format!("not a nonnegative integer: {s:?}"));
    }
    Ok(x as u64)
}

/// SNR grid: comma-separated values, `a..b` (unit steps, inclusive) or
/// `a:step:b`.
pub fn parse_snr_list(s: &str) -> Result<Vec<f64>, String> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("bad SNR value {t:?}"));
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let (lo, step, hi) = if let Some((a, b)) = item.split_once("..") {
            (num(a)?, 1.0, num(b)?)
        } else if item.contains(':') {
            let parts: Vec<&str> = item.split(':').collect();
            if parts.len() != 3 {
                return Err(format!("expected start:step:end, got {item:?}"));
            }
            (num(parts[0])?, num(parts[1])?, num(parts[2])?)
        } else {
            out.push(num(item)?);
            continue;
        };
        if !(step > 0.0) || hi < lo {
            return Err(format!("empty or unbounded range {item:?}"));
        }
        let count = ((hi - lo) / step + 1e-9).floor() as usize;
        out.extend((0..=count).map(|i| lo + step * i as f64));
    }
    if out.is_empty() {
        return Err("no SNR values given".into());
    }
    Ok(out)
}
