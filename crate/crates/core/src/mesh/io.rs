//! ASCII OFF (read/write) and Wavefront OBJ (write, plus a minimal reader).
//!
//! Coordinates are written with Rust's shortest round-trip float formatting,
//! so `read_off(&write_off(m))` reproduces every coordinate bit for bit.

use std::fmt::Write;

use super::TriangleMesh;
use crate::error::{Error, Result};
use crate::geom3::Point3;

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

/// Non-empty lines with `#` comments stripped, tagged with 1-based numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = body.split_whitespace().collect();
        (!toks.is_empty()).then_some((i + 1, toks))
    })
}

fn parse_num<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("invalid {what} '{tok}'")))
}

pub fn read_off_bytes(bytes: &[u8]) -> Result<TriangleMesh> {
    let text = std::str::from_utf8(bytes).map_err(|e| parse_err(0, format!("not UTF-8: {e}")))?;
    read_off(text)
}

pub fn read_off(text: &str) -> Result<TriangleMesh> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    if header[0] != "OFF" {
        return Err(parse_err(hline, format!("expected 'OFF' header, found '{}'", header[0])));
    }
    // counts may follow the keyword on the same line
    let (cline, counts) = if header.len() > 1 {
        (hline, header[1..].to_vec())
    } else {
        lines.next().ok_or_else(|| parse_err(hline + 1, "missing counts line"))?
    };
    if counts.len() < 2 {
        return Err(parse_err(cline, "counts line needs vertex and face counts"));
    }
    let nv: usize = parse_num(counts[0], cline, "vertex count")?;
    let nf: usize = parse_num(counts[1], cline, "face count")?;

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, toks) = lines
            .next()
            .ok_or_else(|| parse_err(cline, format!("expected {nv} vertices")))?;
        if toks.len() < 3 {
            return Err(parse_err(ln, "vertex line needs three coordinates"));
        }
        let c: Vec<f64> = toks[..3]
            .iter()
            .map(|t| parse_num(t, ln, "coordinate"))
            .collect::<Result<_>>()?;
        vertices.push(Point3::new(c[0], c[1], c[2]));
    }

    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (ln, toks) = lines
            .next()
            .ok_or_else(|| parse_err(cline, format!("expected {nf} faces")))?;
        let arity: usize = parse_num(toks[0], ln, "face size")?;
        if arity != 3 {
            return Err(parse_err(ln, "non-triangular face"));
        }
        if toks.len() < 4 {
            return Err(parse_err(ln, "face line needs three indices"));
        }
        let mut f = [0usize; 3];
        for k in 0..3 {
            f[k] = parse_num(toks[k + 1], ln, "vertex index")?;
            if f[k] >= nv {
                return Err(parse_err(ln, format!("vertex index {} out of range", f[k])));
            }
        }
        faces.push(f);
    }
    if let Some((ln, _)) = lines.next() {
        return Err(parse_err(ln, "unexpected trailing content"));
    }
    TriangleMesh::new(vertices, faces).map_err(|e| parse_err(cline, e.to_string()))
}

pub fn write_off(m: &TriangleMesh) -> String {
    let mut s = String::new();
    writeln!(s, "OFF").unwrap();
    writeln!(s, "{} {} {}", m.num_vertices(), m.num_faces(), m.num_edges()).unwrap();
    for v in m.vertices() {
        writeln!(s, "{} {} {}", v.x, v.y, v.z).unwrap();
    }
    for f in m.faces() {
        writeln!(s, "3 {} {} {}", f[0], f[1], f[2]).unwrap();
    }
    s
}

pub fn write_obj(m: &TriangleMesh) -> String {
    let mut s = String::new();
    for v in m.vertices() {
        writeln!(s, "v {} {} {}", v.x, v.y, v.z).unwrap();
    }
    for f in m.faces() {
        writeln!(s, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1).unwrap();
    }
    s
}

/// Reads `v` and `f` records; face entries may carry `/vt/vn` suffixes,
/// which are ignored.
pub fn read_obj(text: &str) -> Result<TriangleMesh> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (ln, toks) in content_lines(text) {
        match toks[0] {
            "v" => {
                if toks.len() < 4 {
                    return Err(parse_err(ln, "vertex line needs three coordinates"));
                }
                let c: Vec<f64> = toks[1..4]
                    .iter()
                    .map(|t| parse_num(t, ln, "coordinate"))
                    .collect::<Result<_>>()?;
                vertices.push(Point3::new(c[0], c[1], c[2]));
            }
            "f" => {
                if toks.len() != 4 {
                    return Err(parse_err(ln, "non-triangular face"));
                }
                let mut f = [0usize; 3];
                for k in 0..3 {
                    let idx = toks[k + 1].split('/').next().unwrap_or("");
                    let i: usize = parse_num(idx, ln, "vertex index")?;
                    if i == 0 || i > vertices.len() {
                        return Err(parse_err(ln, format!("vertex index {i} out of range")));
                    }
                    f[k] = i - 1;
                }
                faces.push(f);
            }
            _ => {}
        }
    }
    TriangleMesh::new(vertices, faces).map_err(|e| parse_err(0, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::fixtures::tetrahedron;

    const TET_OFF: &str = "OFF\n# regular tetrahedron\n4 4 6\n1 1 1\n1 -1 -1\n-1 1 -1\n-1 -1 1\n\
                           3 0 1 2\n3 0 3 1\n3 0 2 3\n3 1 3 2\n";

    #[test]
    fn reads_minimal_tetrahedron() {
        let m = read_off(TET_OFF).unwrap();
        assert_eq!(m.num_vertices(), 4);
        assert_eq!(m.num_faces(), 4);
        assert!(m.is_closed());
        assert_eq!(m, tetrahedron());
    }

    #[test]
    fn counts_on_header_line() {
        let m = read_off("OFF 4 4 0\n1 1 1\n1 -1 -1\n-1 1 -1\n-1 -1 1\n3 0 1 2\n3 0 3 1\n3 0 2 3\n3 1 3 2")
            .unwrap();
        assert_eq!(m.num_faces(), 4);
    }

    #[test]
    fn quad_face_is_rejected_with_line() {
        let text = "OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n";
        match read_off(text) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 7);
                assert_eq!(message, "non-triangular face");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(read_off("PLY\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(read_off(""), Err(Error::Parse { .. })));
        let oob = "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 5\n";
        assert!(matches!(read_off(oob), Err(Error::Parse { line: 6, .. })));
        let bad_num = "OFF\n3 1 0\n0 0 x\n1 0 0\n0 1 0\n3 0 1 2\n";
        assert!(matches!(read_off(bad_num), Err(Error::Parse { line: 3, .. })));
        let short = "OFF\n3 2 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n";
        assert!(read_off(short).is_err());
    }

    #[test]
    fn off_round_trip_is_exact() {
        let v = vec![
            Point3::new(0.1, 1.0 / 3.0, -2e-17),
            Point3::new(std::f64::consts::PI, 1e300, 5e-324),
            Point3::new(-0.0, 123456.789, 1.0),
        ];
        let m = TriangleMesh::new(v, vec![[0, 1, 2]]).unwrap();
        let back = read_off(&write_off(&m)).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn obj_round_trip() {
        let m = tetrahedron();
        let text = write_obj(&m);
        assert!(text.lines().any(|l| l == "f 1 2 3"));
        assert_eq!(read_obj(&text).unwrap(), m);
        assert!(read_obj("v 0 0 0\nf 1 2 3\n").is_err());
    }
}
