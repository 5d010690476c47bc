//! Text and binary edge-list formats.
//!
//! Text: one edge per line, two whitespace-separated decimal ids. Lines
//! starting with `#` are comments, except `#n <count>` which declares the
//! vertex count. Without the header, `n = 1 + max id`.
//!
//! Binary: `PAGL`, version byte `1`, then little-endian `u64` vertex count,
//! `u64` edge count and the `(u, v)` pairs as `u64`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{Graph, VertexId};
use crate::error::{Error, Result};

pub const BINARY_MAGIC: &[u8; 4] = b"PAGL";
const BINARY_VERSION: u8 = 1;

pub fn load_edge_list<R: BufRead>(source: R) -> Result<Graph> {
    let mut declared: Option<usize> = None;
    let mut edges = Vec::new();
    let mut max_id: Option<VertexId> = None;

    for (idx, line) in source.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            let mut parts = comment.split_whitespace();
            if parts.next() == Some("n") {
                let value = parts
                    .next()
                    .ok_or_else(|| Error::Parse { line: lineno, message: "missing vertex count after #n".into() })?;
                let n = value
                    .parse::<usize>()
                    .map_err(|e| Error::Parse { line: lineno, message: format!("bad vertex count {value:?}: {e}") })?;
                if parts.next().is_some() {
                    return Err(Error::Parse { line: lineno, message: "trailing tokens after #n".into() });
                }
                declared = Some(n);
            }
            continue;
        }

        let mut parts = trimmed.split_whitespace();
        let mut next_id = || -> Result<VertexId> {
            let tok =
                parts.next().ok_or_else(|| Error::Parse { line: lineno, message: "expected two vertex ids".into() })?;
            tok.parse::<VertexId>()
                .map_err(|e| Error::Parse { line: lineno, message: format!("bad vertex id {tok:?}: {e}") })
        };
        let u = next_id()?;
        let v = next_id()?;
        if parts.next().is_some() {
            return Err(Error::Parse { line: lineno, message: "expected exactly two vertex ids".into() });
        }
        if let Some(n) = declared {
            if u as usize >= n || v as usize >= n {
                return Err(Error::Validation(format!("line {lineno}: vertex id outside declared range 0..{n}")));
            }
        }
        max_id = Some(max_id.map_or(u.max(v), |m| m.max(u).max(v)));
        edges.push((u, v));
    }

    let n = match declared {
        Some(n) => n,
        None => max_id.map_or(0, |m| m as usize + 1),
    };
    Graph::new(n, edges)
}

pub fn save_edge_list<W: Write>(g: &Graph, sink: W) -> Result<()> {
    let mut out = BufWriter::new(sink);
    writeln!(out, "#n {}", g.n())?;
    for &(u, v) in g.edges() {
        writeln!(out, "{u} {v}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn save_binary<W: Write>(g: &Graph, sink: W) -> Result<()> {
    let mut out = BufWriter::new(sink);
    out.write_all(BINARY_MAGIC)?;
    out.write_all(&[BINARY_VERSION])?;
    out.write_all(&(g.n() as u64).to_le_bytes())?;
    out.write_all(&(g.edge_count() as u64).to_le_bytes())?;
    for &(u, v) in g.edges() {
        out.write_all(&(u as u64).to_le_bytes())?;
        out.write_all(&(v as u64).to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(u64::from_le_bytes(buf))
}

pub fn load_binary<R: Read>(source: R) -> Result<Graph> {
    let mut r = BufReader::new(source);
    let mut header = [0u8; 5];
    r.read_exact(&mut header)?;
    if &header[..4] != BINARY_MAGIC {
        return Err(Error::Validation("missing PAGL magic".into()));
    }
    if header[4] != BINARY_VERSION {
        return Err(Error::Validation(format!("unsupported binary version {}", header[4])));
    }
    let n = read_u64(&mut r)?;
    let m = read_u64(&mut r)?;
    if n > VertexId::MAX as u64 + 1 {
        return Err(Error::Validation(format!("vertex count {n} exceeds 32-bit ids")));
    }
    let mut edges = Vec::with_capacity(m.min(1 << 28) as usize);
    for _ in 0..m {
        let u = read_u64(&mut r)?;
        let v = read_u64(&mut r)?;
        if u >= n || v >= n {
            return Err(Error::Validation(format!("edge ({u}, {v}) outside 0..{n}")));
        }
        edges.push((u as VertexId, v as VertexId));
    }
    Ok(Graph::from_parts_unchecked(n as usize, edges))
}

/// Loads a graph file, choosing the format from its leading bytes.
pub fn load_graph_file(path: &Path) -> Result<Graph> {
    let mut file = BufReader::new(File::open(path)?);
    let is_binary = file.fill_buf()?.starts_with(BINARY_MAGIC);
    if is_binary {
        load_binary(file)
    } else {
        load_edge_list(file)
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn text(g: &Graph) -> String {
        let mut buf = Vec::new();
        save_edge_list(g, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn parses_plain_lines() {
        let g = load_edge_list("0 1\n1 2\n".as_bytes()).unwrap();
        assert_eq!(g, Graph::new(3, vec![(0, 1), (1, 2)]).unwrap());
    }

    #[test]
    fn empty_input() {
        assert_eq!(load_edge_list("".as_bytes()).unwrap(), Graph::empty(0));
    }

    #[test]
    fn header_sets_vertex_count() {
        let g = load_edge_list("#n 5\n0 1\n".as_bytes()).unwrap();
        assert_eq!(g.n(), 5);
        assert_eq!(g.edges(), &[(0, 1)]);
    }

    #[test]
    fn comments_and_tabs() {
        let g = load_edge_list("# a comment\n0\t1\n\n# another\n2 2\n".as_bytes()).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (2, 2)]);
        assert_eq!(g.n(), 3);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        match load_edge_list("0 1\n1 x\n".as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(load_edge_list("0 1 2\n".as_bytes()), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(load_edge_list("-1 2\n".as_bytes()), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn id_beyond_header_is_validation_error() {
        assert!(matches!(load_edge_list("#n 2\n0 2\n".as_bytes()), Err(Error::Validation(_))));
    }

    #[test]
    fn serializes_canonical_text() {
        let g = Graph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        assert_eq!(text(&g), "#n 3\n0 1\n1 2\n");
        let g = Graph::new(1, vec![(0, 0)]).unwrap();
        assert_eq!(text(&g), "#n 1\n0 0\n");
    }

    #[test]
    fn binary_layout() {
        let g = Graph::new(3, vec![(2, 1)]).unwrap();
        let mut buf = Vec::new();
        save_binary(&g, &mut buf).unwrap();
        assert_eq!(&buf[..5], b"PAGL\x01");
        assert_eq!(&buf[5..13], &3u64.to_le_bytes());
        assert_eq!(&buf[13..21], &1u64.to_le_bytes());
        assert_eq!(&buf[21..29], &2u64.to_le_bytes());
        assert_eq!(&buf[29..37], &1u64.to_le_bytes());
        assert_eq!(buf.len(), 37);
        assert_eq!(load_binary(&buf[..]).unwrap(), g);
    }

    #[test]
    fn binary_rejects_bad_magic() {
        assert!(matches!(load_binary(&b"XXXX\x01"[..]), Err(Error::Validation(_))));
    }

    fn arb_graph() -> impl Strategy<Value = Graph> {
        (0usize..40).prop_flat_map(|n| {
            let ids = if n == 0 { 0..1u32 } else { 0..n as u32 };
            prop::collection::vec((ids.clone(), ids), if n == 0 { 0..1 } else { 0..60 })
                .prop_map(move |e| Graph::new(n, if n == 0 { vec![] } else { e }).unwrap())
        })
    }

    proptest! {
        #[test]
        fn text_and_binary_round_trip(g in arb_graph()) {
            prop_assert_eq!(&load_edge_list(text(&g).as_bytes()).unwrap(), &g);
            let mut buf = Vec::new();
            save_binary(&g, &mut buf).unwrap();
            prop_assert_eq!(&load_binary(&buf[..]).unwrap(), &g);
            // save∘load is the identity on canonical text
            let canon = text(&g);
            prop_assert_eq!(text(&load_edge_list(canon.as_bytes()).unwrap()), canon);
        }
    }
}
