//! Kleetopes: the combinatorial operation on triangulations, two geometric
//! realizations, and an exact longest-cycle search.

mod cycle;
mod realize;

use std::collections::BTreeMap;
use std::fmt::Write;

pub use cycle::{longest_cycle_in_graph, longest_simple_cycle, CycleResult};
pub use realize::{
    convex_kleetope, pyramid_base_dihedrals, spike_kleetope, SpikeParams, DEFAULT_HEIGHT_FACTOR,
    MAX_DOUBLINGS,
};

use crate::error::{Error, Result};
use crate::mesh::{edge_key, read_off, Edge, TriangleMesh};

/// A planar triangulation without coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbstractTriangulation {
    vertex_count: usize,
    faces: Vec<[usize; 3]>,
    adjacency: Vec<Vec<usize>>,
}

impl AbstractTriangulation {
    /// Checks that every edge lies in exactly two faces, that no two faces
    /// have the same vertex set, and that `V − E + F = 2`.
    pub fn new(vertex_count: usize, faces: Vec<[usize; 3]>) -> Result<Self> {
        let mut edge_count: BTreeMap<Edge, usize> = BTreeMap::new();
        for (i, f) in faces.iter().enumerate() {
            if f.iter().any(|&v| v >= vertex_count) {
                return Err(Error::Topology(format!("face {i} has an index out of range")));
            }
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(Error::Topology(format!("face {i} repeats a vertex")));
            }
            for k in 0..3 {
                *edge_count.entry(edge_key(f[k], f[(k + 1) % 3])).or_default() += 1;
            }
        }
        if let Some((e, c)) = edge_count.iter().find(|(_, &c)| c != 2) {
            return Err(Error::Topology(format!("edge {e:?} lies in {c} faces")));
        }
        let mut sorted: Vec<[usize; 3]> = faces
            .iter()
            .map(|f| {
                let mut f = *f;
                f.sort_unstable();
                f
            })
            .collect();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Topology("two faces share all three vertices".into()));
        }
        let euler = vertex_count as i64 - edge_count.len() as i64 + faces.len() as i64;
        if euler != 2 {
            return Err(Error::Topology(format!("Euler characteristic {euler}, expected 2")));
        }
        let mut adjacency = vec![Vec::new(); vertex_count];
        for &(a, b) in edge_count.keys() {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(AbstractTriangulation { vertex_count, faces, adjacency })
    }

    pub fn from_mesh(m: &TriangleMesh) -> Result<Self> {
        Self::new(m.num_vertices(), m.faces().to_vec())
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    /// Sorted neighbour lists.
    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adjacency
    }

    /// Parses the `V F` text format: a header line with the two counts, then
    /// one `i j k` line per face. `#` starts a comment.
    pub fn read_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter_map(|(i, raw)| {
            let toks: Vec<&str> = raw.split('#').next().unwrap_or("").split_whitespace().collect();
            (!toks.is_empty()).then_some((i + 1, toks))
        });
        let perr = |line: usize, message: &str| Error::Parse { line, message: message.into() };
        let (hl, header) = lines.next().ok_or_else(|| perr(1, "empty file"))?;
        let parse = |t: &str, line: usize| t.parse::<usize>().map_err(|_| perr(line, "expected a non-negative integer"));
        if header.len() != 2 {
            return Err(perr(hl, "header must be 'V F'"));
        }
        let (v, f) = (parse(header[0], hl)?, parse(header[1], hl)?);
        let mut faces = Vec::with_capacity(f);
        for _ in 0..f {
            let (ln, toks) = lines.next().ok_or_else(|| perr(hl, "fewer face lines than declared"))?;
            if toks.len() != 3 {
                return Err(perr(ln, "face line needs exactly three indices"));
            }
            faces.push([parse(toks[0], ln)?, parse(toks[1], ln)?, parse(toks[2], ln)?]);
        }
        if let Some((ln, _)) = lines.next() {
            return Err(perr(ln, "unexpected trailing content"));
        }
        Self::new(v, faces)
    }

    pub fn write_text(&self) -> String {
        let mut s = format!("{} {}\n", self.vertex_count, self.faces.len());
        for f in &self.faces {
            writeln!(s, "{} {} {}", f[0], f[1], f[2]).unwrap();
        }
        s
    }

    /// Reads an OFF file and keeps only its combinatorics.
    pub fn read_off(text: &str) -> Result<Self> {
        Self::from_mesh(&read_off(text)?)
    }

    /// Accepts either OFF or the `V F` format, chosen by the first token.
    pub fn read_any(text: &str) -> Result<Self> {
        let first = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .find(|l| !l.is_empty())
            .unwrap_or("");
        if first.starts_with("OFF") {
            Self::read_off(text)
        } else {
            Self::read_text(text)
        }
    }
}

/// Adds vertex `V + f` for every face `f` and replaces `f = (a, b, c)` by
/// faces `3f, 3f+1, 3f+2 = (a, b, p), (b, c, p), (c, a, p)`.
pub fn combinatorial_kleetope(g: &AbstractTriangulation) -> AbstractTriangulation {
    let v = g.vertex_count;
    let faces = g
        .faces
        .iter()
        .enumerate()
        .flat_map(|(i, &[a, b, c])| {
            let p = v + i;
            [[a, b, p], [b, c, p], [c, a, p]]
        })
        .collect();
    AbstractTriangulation::new(v + g.faces.len(), faces).expect("Kleetope of a triangulation is a triangulation")
}

pub fn iterate_kleetope(g: &AbstractTriangulation, i: usize) -> AbstractTriangulation {
    (0..i).fold(g.clone(), |acc, _| combinatorial_kleetope(&acc))
}
