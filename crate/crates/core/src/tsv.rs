//! Tab-separated plot data.
//!
//! | file    | columns                         |
//! |---------|---------------------------------|
//! | degrees | `d  count  cumulative`          |
//! | edges   | `d1  d2  X  Xcum  rho`          |
//! | d_nn    | `d  dnn`                        |
//!
//! The edges file lists the cells of `X` with `d1 >= d2` once; the diagonal
//! keeps its double count. `Xcum` and `rho` are `X~` and `rho~` at the
//! thresholds `(d1, d2)`; an undefined `rho~` is written as `nan`.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::stats::{cumulative_degree, cumulative_edges, DegreeHistogram, EdgeDegreeMatrix};

pub const DEGREES_HEADER: &str = "d\tcount\tcumulative";
pub const EDGES_HEADER: &str = "d1\td2\tX\tXcum\trho";
pub const DNN_HEADER: &str = "d\tdnn";

pub fn write_degrees<W: Write>(mut w: W, h: &DegreeHistogram) -> Result<()> {
    let cum = cumulative_degree(h);
    writeln!(w, "{DEGREES_HEADER}")?;
    for (d, count) in h.iter() {
        writeln!(w, "{d}\t{count}\t{}", cum.at(d))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_edges<W: Write>(mut w: W, h: &DegreeHistogram, x: &EdgeDegreeMatrix) -> Result<()> {
    let cum_deg = cumulative_degree(h);
    let cum = cumulative_edges(x);
    let cells: Vec<((u64, u64), u64)> = x.lower_cells().collect();
    let queries: Vec<(u64, u64)> = cells.iter().map(|&(k, _)| k).collect();
    let xcum = cum.evaluate_many(&queries);
    writeln!(w, "{EDGES_HEADER}")?;
    for (((d1, d2), v), xc) in cells.into_iter().zip(xcum) {
        let denom = cum_deg.at(d1) as f64 * cum_deg.at(d2) as f64;
        if denom > 0.0 {
            writeln!(w, "{d1}\t{d2}\t{v}\t{xc}\t{}", xc as f64 / denom)?;
        } else {
            writeln!(w, "{d1}\t{d2}\t{v}\t{xc}\tnan")?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_dnn<W: Write>(mut w: W, profile: &BTreeMap<u64, f64>) -> Result<()> {
    writeln!(w, "{DNN_HEADER}")?;
    for (d, v) in profile {
        writeln!(w, "{d}\t{v}")?;
    }
    w.flush()?;
    Ok(())
}

/// Splits data rows into fields, checking the header and column count.
fn rows<R: BufRead>(r: R, header: &str) -> Result<Vec<(usize, Vec<String>)>> {
    let width = header.split('\t').count();
    let mut out = Vec::new();
    let mut seen_header = false;
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        if !seen_header {
            if line.trim_end() != header {
                return Err(Error::Parse { line: lineno, message: format!("expected header `{header}`") });
            }
            seen_header = true;
            continue;
        }
        let fields: Vec<String> = line.split('\t').map(|f| f.trim().to_string()).collect();
        if fields.len() != width {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected {width} columns, found {}", fields.len()),
            });
        }
        out.push((lineno, fields));
    }
    if !seen_header {
        return Err(Error::Parse { line: 0, message: format!("missing header `{header}`") });
    }
    Ok(out)
}

fn field<T: std::str::FromStr>(lineno: usize, s: &str, name: &str) -> Result<T> {
    s.parse().map_err(|_| Error::Parse { line: lineno, message: format!("bad {name} `{s}`") })
}

/// Reads a degrees file back into a histogram; the cumulative column is
/// ignored.
pub fn read_degrees<R: BufRead>(r: R) -> Result<DegreeHistogram> {
    let mut counts = Vec::new();
    let mut last = None;
    for (lineno, f) in rows(r, DEGREES_HEADER)? {
        let d: u64 = field(lineno, &f[0], "degree")?;
        let c: u64 = field(lineno, &f[1], "count")?;
        if last.is_some_and(|p| d <= p) {
            return Err(Error::Parse { line: lineno, message: "degrees must be strictly increasing".into() });
        }
        last = Some(d);
        counts.push((d, c));
    }
    Ok(DegreeHistogram::from_counts(counts))
}

/// Reads an edges file back into `X`; only the first three columns are used.
pub fn read_edges<R: BufRead>(r: R) -> Result<EdgeDegreeMatrix> {
    let mut cells = Vec::new();
    for (lineno, f) in rows(r, EDGES_HEADER)? {
        let d1: u64 = field(lineno, &f[0], "d1")?;
        let d2: u64 = field(lineno, &f[1], "d2")?;
        let x: u64 = field(lineno, &f[2], "X")?;
        if d1 < d2 {
            return Err(Error::Parse { line: lineno, message: "rows must have d1 >= d2".into() });
        }
        cells.push(((d1, d2), x));
    }
    EdgeDegreeMatrix::from_cells(cells)
}

pub fn read_dnn<R: BufRead>(r: R) -> Result<BTreeMap<u64, f64>> {
    let mut out = BTreeMap::new();
    for (lineno, f) in rows(r, DNN_HEADER)? {
        out.insert(field(lineno, &f[0], "degree")?, field(lineno, &f[1], "dnn")?);
    }
    Ok(out)
}
