//! Embedded closed triangle meshes and their metric audits.
//!
//! Faces are ordered vertex triples, counterclockwise as seen from outside.
//! A mesh can be constructed in any state (so that [`validate`] can report
//! what is wrong with it); the audits that need a closed oriented 2-manifold
//! return [`Error::Topology`] otherwise.

mod intersect;
mod io;

use std::collections::{BTreeMap, HashSet};
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom3::{
    angle_at, classify_shape, geodesic_distance, interior_dihedral, FaceShape, PlanarTriangle,
    Point3, UnitVec,
};

pub use intersect::{self_intersection_check, triangles_intersect};
pub use io::{read_obj, read_off, read_off_bytes, write_obj, write_off};

/// Default tolerance for convexity checks (radians and fraction of the
/// bounding-box diagonal).
pub const CONVEXITY_TOL: f64 = 1e-9;
/// Default relative tolerance for side-length comparisons.
pub const SHAPE_TOL: f64 = 1e-9;

/// Undirected edge, smaller index first.
pub type Edge = (usize, usize);

pub fn edge_key(a: usize, b: usize) -> Edge {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh {
    vertices: Vec<Point3>,
    faces: Vec<[usize; 3]>,
    edges: BTreeMap<Edge, Vec<usize>>,
    closed: bool,
}

impl TriangleMesh {
    /// Checks only what every later computation relies on: finite
    /// coordinates, in-range indices, and three distinct indices per face.
    pub fn new(vertices: Vec<Point3>, faces: Vec<[usize; 3]>) -> Result<Self> {
        if let Some(i) = vertices.iter().position(|v| !v.is_finite()) {
            return Err(Error::DegenerateInput(format!("vertex {i} is not finite")));
        }
        let mut edges: BTreeMap<Edge, Vec<usize>> = BTreeMap::new();
        let mut directed = HashSet::new();
        let mut oriented = true;
        for (fi, f) in faces.iter().enumerate() {
            if let Some(&bad) = f.iter().find(|&&v| v >= vertices.len()) {
                return Err(Error::Topology(format!("face {fi} references vertex {bad}")));
            }
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(Error::Topology(format!("face {fi} repeats a vertex: {f:?}")));
            }
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                oriented &= directed.insert((a, b));
                edges.entry(edge_key(a, b)).or_default().push(fi);
            }
        }
        let closed = oriented
            && !faces.is_empty()
            && edges.values().all(|fs| fs.len() == 2)
            && vertices.len() as i64 - edges.len() as i64 + faces.len() as i64 == 2;
        Ok(TriangleMesh { vertices, faces, edges, closed })
    }

    pub fn vertices(&self) -> &[Point3] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn vertex(&self, i: usize) -> Point3 {
        self.vertices[i]
    }

    pub fn face(&self, f: usize) -> [usize; 3] {
        self.faces[f]
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (Edge, &[usize])> + '_ {
        self.edges.iter().map(|(&e, fs)| (e, fs.as_slice()))
    }

    pub fn edge_faces(&self, a: usize, b: usize) -> Option<&[usize]> {
        self.edges.get(&edge_key(a, b)).map(Vec::as_slice)
    }

    /// Closed, consistently oriented, every edge in two faces, `V − E + F = 2`.
    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn require_closed(&self) -> Result<()> {
        if self.closed {
            Ok(())
        } else {
            Err(Error::Topology(
                "mesh is not a closed, consistently oriented genus-0 surface".into(),
            ))
        }
    }

    pub fn corners(&self, f: usize) -> [Point3; 3] {
        self.faces[f].map(|v| self.vertices[v])
    }

    pub fn triangle(&self, f: usize) -> Result<PlanarTriangle> {
        let [a, b, c] = self.corners(f);
        PlanarTriangle::new(a, b, c).map_err(|e| match e {
            Error::DegenerateInput(msg) => Error::DegenerateInput(format!("face {f}: {msg}")),
            other => other,
        })
    }

    /// Unnormalized outward normal (twice the area).
    pub fn face_normal(&self, f: usize) -> Point3 {
        let [a, b, c] = self.corners(f);
        (b - a).cross(c - a)
    }

    pub fn face_unit_normal(&self, f: usize) -> Result<UnitVec> {
        UnitVec::new(self.face_normal(f))
    }

    pub fn face_centroid(&self, f: usize) -> Point3 {
        let [a, b, c] = self.corners(f);
        (a + b + c) / 3.0
    }

    /// Sorted neighbor lists.
    pub fn vertex_neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for &(a, b) in self.edges.keys() {
            adj[a].push(b);
            adj[b].push(a);
        }
        for n in &mut adj {
            n.sort_unstable();
        }
        adj
    }

    pub fn bbox(&self) -> (Point3, Point3) {
        let mut lo = Point3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
        let mut hi = -lo;
        for v in &self.vertices {
            lo = Point3::new(lo.x.min(v.x), lo.y.min(v.y), lo.z.min(v.z));
            hi = Point3::new(hi.x.max(v.x), hi.y.max(v.y), hi.z.max(v.z));
        }
        (lo, hi)
    }

    /// Bounding-box diagonal; the length scale for relative tolerances.
    pub fn scale(&self) -> f64 {
        if self.vertices.is_empty() {
            return 0.0;
        }
        let (lo, hi) = self.bbox();
        lo.distance(hi)
    }

    /// Interior dihedral at an edge, in `[0, 2π)`; above `π` is reflex.
    pub fn edge_dihedral(&self, a: usize, b: usize) -> Result<f64> {
        let fs = self
            .edge_faces(a, b)
            .ok_or_else(|| Error::Topology(format!("({a}, {b}) is not an edge")))?;
        let &[f1, f2] = fs else {
            return Err(Error::Topology(format!("edge ({a}, {b}) has {} faces", fs.len())));
        };
        let (p, q) = (self.vertices[a], self.vertices[b]);
        let r1 = self.vertices[self.opposite_vertex(f1, a, b)];
        let r2 = self.vertices[self.opposite_vertex(f2, a, b)];
        Ok(interior_dihedral(p, q, r1, r2, self.face_normal(f1)))
    }

    /// The vertex of face `f` that is neither `a` nor `b`.
    pub fn opposite_vertex(&self, f: usize, a: usize, b: usize) -> usize {
        *self.faces[f]
            .iter()
            .find(|&&v| v != a && v != b)
            .expect("face has three distinct vertices")
    }

    /// Interior angle of face `f` at local corner `k`.
    pub fn corner_angle(&self, f: usize, k: usize) -> f64 {
        let c = self.corners(f);
        angle_at(c[k], c[(k + 1) % 3], c[(k + 2) % 3])
    }

    /// Faces incident to vertex `v`, in cyclic order around it.
    pub fn vertex_star(&self, v: usize) -> Result<Vec<usize>> {
        self.require_closed()?;
        let start = self
            .faces
            .iter()
            .position(|f| f.contains(&v))
            .ok_or_else(|| Error::Topology(format!("vertex {v} has no faces")))?;
        let mut star = vec![start];
        let mut cur = start;
        loop {
            // the edge leaving v in face `cur` is shared with the next face
            let f = self.faces[cur];
            let k = f.iter().position(|&x| x == v).expect("v in face");
            let next_v = f[(k + 1) % 3];
            let fs = &self.edges[&edge_key(v, next_v)];
            let nxt = if fs[0] == cur { fs[1] } else { fs[0] };
            if nxt == start {
                break;
            }
            star.push(nxt);
            cur = nxt;
            if star.len() > self.faces.len() {
                return Err(Error::Topology(format!("vertex {v} star does not close")));
            }
        }
        Ok(star)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub vertex_count: usize,
    pub edge_count: usize,
    pub face_count: usize,
    pub euler_characteristic: i64,
    pub boundary_edges: Vec<Edge>,
    pub nonmanifold_edges: Vec<Edge>,
    pub orientation_conflicts: Vec<Edge>,
    pub duplicate_vertices: Vec<(usize, usize)>,
    pub isolated_vertices: Vec<usize>,
    pub degenerate_faces: Vec<usize>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.euler_characteristic == 2
            && self.boundary_edges.is_empty()
            && self.nonmanifold_edges.is_empty()
            && self.orientation_conflicts.is_empty()
            && self.duplicate_vertices.is_empty()
            && self.isolated_vertices.is_empty()
            && self.degenerate_faces.is_empty()
    }
}

pub fn validate(m: &TriangleMesh) -> ValidationReport {
    let mut boundary_edges = Vec::new();
    let mut nonmanifold_edges = Vec::new();
    let mut orientation_conflicts = Vec::new();
    for (e, fs) in m.edges() {
        match fs.len() {
            1 => boundary_edges.push(e),
            2 => {
                // consistent iff the two faces traverse the edge in opposite directions
                let dir = |f: usize| {
                    let t = m.face(f);
                    (0..3).any(|k| t[k] == e.0 && t[(k + 1) % 3] == e.1)
                };
                if dir(fs[0]) == dir(fs[1]) {
                    orientation_conflicts.push(e);
                }
            }
            _ => nonmanifold_edges.push(e),
        }
    }

    let tol = 1e-12 * m.scale();
    let vs = m.vertices();
    let mut duplicate_vertices = Vec::new();
    for i in 0..vs.len() {
        for j in i + 1..vs.len() {
            if vs[i].distance(vs[j]) <= tol {
                duplicate_vertices.push((i, j));
            }
        }
    }

    let mut used = vec![false; vs.len()];
    for f in m.faces() {
        for &v in f {
            used[v] = true;
        }
    }
    let isolated_vertices = (0..vs.len()).filter(|&v| !used[v]).collect();
    let degenerate_faces = (0..m.num_faces()).filter(|&f| m.triangle(f).is_err()).collect();

    ValidationReport {
        vertex_count: m.num_vertices(),
        edge_count: m.num_edges(),
        face_count: m.num_faces(),
        euler_characteristic: m.num_vertices() as i64 - m.num_edges() as i64
            + m.num_faces() as i64,
        boundary_edges,
        nonmanifold_edges,
        orientation_conflicts,
        duplicate_vertices,
        isolated_vertices,
        degenerate_faces,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum ConvexityWitness {
    /// Dihedral at the edge exceeds `π − tol`.
    ReflexEdge { edge: Edge, dihedral: f64 },
    /// Vertex lies outside the plane of the face by more than `tol·scale`.
    VertexOutside { face: usize, vertex: usize, distance: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvexityReport {
    pub convex: bool,
    pub witness: Option<ConvexityWitness>,
}

/// Strict convexity: every dihedral at most `π − tol`, and every vertex inside
/// every face's outer halfspace within `tol·scale`.
pub fn is_convex(m: &TriangleMesh, tol: f64) -> Result<ConvexityReport> {
    m.require_closed()?;
    for (e, _) in m.edges() {
        let d = m.edge_dihedral(e.0, e.1)?;
        if d > PI - tol {
            return Ok(ConvexityReport {
                convex: false,
                witness: Some(ConvexityWitness::ReflexEdge { edge: e, dihedral: d }),
            });
        }
    }
    let eps = tol * m.scale();
    for f in 0..m.num_faces() {
        let n = m.face_unit_normal(f)?.get();
        let a = m.vertex(m.face(f)[0]);
        for (v, &p) in m.vertices().iter().enumerate() {
            let distance = n.dot(p - a);
            if distance > eps {
                return Ok(ConvexityReport {
                    convex: false,
                    witness: Some(ConvexityWitness::VertexOutside { face: f, vertex: v, distance }),
                });
            }
        }
    }
    Ok(ConvexityReport { convex: true, witness: None })
}

/// `π` minus the smallest interior dihedral on the face's three edges.
pub fn sharpness(m: &TriangleMesh, face: usize) -> Result<f64> {
    m.require_closed()?;
    let f = m.face(face);
    let mut min = f64::INFINITY;
    for k in 0..3 {
        min = min.min(m.edge_dihedral(f[k], f[(k + 1) % 3])?);
    }
    Ok(PI - min)
}

/// Sharpness of every face, computing each edge dihedral once.
pub fn all_sharpness(m: &TriangleMesh) -> Result<Vec<f64>> {
    m.require_closed()?;
    let mut min = vec![f64::INFINITY; m.num_faces()];
    for (e, fs) in m.edges() {
        let d = m.edge_dihedral(e.0, e.1)?;
        for &f in fs {
            min[f] = min[f].min(d);
        }
    }
    Ok(min.into_iter().map(|d| PI - d).collect())
}

/// Outward face normals of a convex mesh, and for every edge the geodesic
/// distance between the normals of its two faces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussMap {
    pub normals: Vec<UnitVec>,
    pub arcs: Vec<(Edge, f64)>,
}

impl GaussMap {
    pub fn arc(&self, a: usize, b: usize) -> Option<f64> {
        let key = edge_key(a, b);
        self.arcs
            .binary_search_by(|(e, _)| e.cmp(&key))
            .ok()
            .map(|i| self.arcs[i].1)
    }
}

pub fn gauss_map(m: &TriangleMesh) -> Result<GaussMap> {
    let report = is_convex(m, CONVEXITY_TOL)?;
    if !report.convex {
        return Err(Error::ConvexityRequired(format!("witness {:?}", report.witness)));
    }
    let normals = (0..m.num_faces())
        .map(|f| m.face_unit_normal(f))
        .collect::<Result<Vec<_>>>()?;
    let arcs = m
        .edges()
        .map(|(e, fs)| (e, geodesic_distance(normals[fs[0]], normals[fs[1]])))
        .collect();
    Ok(GaussMap { normals, arcs })
}

/// `2π` minus the sum of face angles at each vertex.
pub fn angular_defects(m: &TriangleMesh) -> Result<Vec<f64>> {
    m.require_closed()?;
    let mut sum = vec![0.0; m.num_vertices()];
    for (fi, f) in m.faces().iter().enumerate() {
        for (k, &v) in f.iter().enumerate() {
            sum[v] += m.corner_angle(fi, k);
        }
    }
    Ok(sum.into_iter().map(|s| 2.0 * PI - s).collect())
}

pub fn angular_defect(m: &TriangleMesh, vertex: usize) -> Result<f64> {
    m.require_closed()?;
    if vertex >= m.num_vertices() {
        return Err(Error::Topology(format!("no vertex {vertex}")));
    }
    let mut total = 0.0;
    for (fi, f) in m.faces().iter().enumerate() {
        if let Some(k) = f.iter().position(|&v| v == vertex) {
            total += m.corner_angle(fi, k);
        }
    }
    Ok(2.0 * PI - total)
}

pub fn total_angular_defect(m: &TriangleMesh) -> Result<f64> {
    Ok(angular_defects(m)?.into_iter().sum())
}

/// Classification of every face, in face order.
pub fn face_shapes(m: &TriangleMesh, rel_tol: f64) -> Result<Vec<FaceShape>> {
    (0..m.num_faces())
        .map(|f| Ok(classify_shape(&m.triangle(f)?, rel_tol)))
        .collect()
}

/// Groups faces whose sorted side-length triples agree within
/// `rel_tol · longest side`. Classes are ordered by their first face.
pub fn congruence_classes(m: &TriangleMesh, rel_tol: f64) -> Vec<Vec<usize>> {
    let sorted = |f: usize| {
        let [a, b, c] = m.corners(f);
        let mut s = [b.distance(c), c.distance(a), a.distance(b)];
        s.sort_by(f64::total_cmp);
        s
    };
    let mut reps: Vec<[f64; 3]> = Vec::new();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for f in 0..m.num_faces() {
        let s = sorted(f);
        let hit = reps.iter().position(|r| {
            let scale = r[2].max(s[2]);
            (0..3).all(|i| (r[i] - s[i]).abs() <= rel_tol * scale)
        });
        match hit {
            Some(i) => classes[i].push(f),
            None => {
                reps.push(s);
                classes.push(vec![f]);
            }
        }
    }
    classes
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn tetrahedron() -> TriangleMesh {
        let v = [[1., 1., 1.], [1., -1., -1.], [-1., 1., -1.], [-1., -1., 1.]];
        TriangleMesh::new(
            v.into_iter().map(Point3::from).collect(),
            vec![[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]],
        )
        .unwrap()
    }

    pub fn octahedron() -> TriangleMesh {
        let v = [
            [1., 0., 0.],
            [-1., 0., 0.],
            [0., 1., 0.],
            [0., -1., 0.],
            [0., 0., 1.],
            [0., 0., -1.],
        ];
        let faces = vec![
            [0, 2, 4],
            [2, 1, 4],
            [1, 3, 4],
            [3, 0, 4],
            [2, 0, 5],
            [1, 2, 5],
            [3, 1, 5],
            [0, 3, 5],
        ];
        TriangleMesh::new(v.into_iter().map(Point3::from).collect(), faces).unwrap()
    }

    /// Origin and the three unit basis vectors.
    pub fn cube_corner() -> TriangleMesh {
        let v = [[0., 0., 0.], [1., 0., 0.], [0., 1., 0.], [0., 0., 1.]];
        TriangleMesh::new(
            v.into_iter().map(Point3::from).collect(),
            vec![[0, 2, 1], [0, 1, 3], [0, 3, 2], [1, 2, 3]],
        )
        .unwrap()
    }
}
