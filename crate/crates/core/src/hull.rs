//! Incremental 3D convex hull.
//!
//! Points are inserted in input order. Visibility uses a distance threshold
//! `eps = tol · bbox diagonal`, so nearly coplanar neighbours end up as
//! several small triangles; a final pass regroups the faces by supporting
//! plane, takes the strictly convex 2D hull of each planar patch, and fans it
//! from its lowest-index vertex. The output is therefore independent of how
//! the incremental phase happened to split a coplanar patch.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::geom3::Point3;
use crate::mesh::TriangleMesh;

/// Hull mesh plus, for every input point, its index in the hull (or `None`
/// when the point is interior, lies inside a facet or edge, or duplicates an
/// earlier point).
#[derive(Debug, Clone, PartialEq)]
pub struct HullResult {
    pub mesh: TriangleMesh,
    pub vertex_map: Vec<Option<usize>>,
}

struct Facet {
    v: [usize; 3],
    n: Point3,
    off: f64,
    alive: bool,
}

impl Facet {
    fn new(pts: &[Point3], v: [usize; 3]) -> Facet {
        let (a, b, c) = (pts[v[0]], pts[v[1]], pts[v[2]]);
        let n = (b - a).cross(c - a).normalized().unwrap_or(Point3::ORIGIN);
        Facet { v, n, off: n.dot(a), alive: true }
    }

    fn dist(&self, p: Point3) -> f64 {
        self.n.dot(p) - self.off
    }
}

fn bbox_diagonal(points: &[Point3]) -> f64 {
    let mut lo = points[0];
    let mut hi = points[0];
    for p in points {
        lo = Point3::new(lo.x.min(p.x), lo.y.min(p.y), lo.z.min(p.z));
        hi = Point3::new(hi.x.max(p.x), hi.y.max(p.y), hi.z.max(p.z));
    }
    (hi - lo).norm()
}

fn argmax(points: &[Point3], mut key: impl FnMut(Point3) -> f64) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, &p) in points.iter().enumerate() {
        let k = key(p);
        if k > best.1 {
            best = (i, k);
        }
    }
    best
}

fn initial_simplex(pts: &[Point3], eps: f64) -> Result<[usize; 4]> {
    let degenerate = || Error::DegenerateInput("fewer than 4 non-coplanar points".into());
    let i0 = 0;
    let (i1, d1) = argmax(pts, |p| p.distance(pts[i0]));
    if d1 <= eps {
        return Err(degenerate());
    }
    let dir = (pts[i1] - pts[i0]) / d1;
    let (i2, d2) = argmax(pts, |p| (p - pts[i0]).cross(dir).norm());
    if d2 <= eps {
        return Err(degenerate());
    }
    let n = (pts[i1] - pts[i0]).cross(pts[i2] - pts[i0]).normalized().ok_or_else(degenerate)?;
    let (i3, d3) = argmax(pts, |p| n.dot(p - pts[i0]).abs());
    if d3 <= eps {
        return Err(degenerate());
    }
    Ok([i0, i1, i2, i3])
}

/// Raw incremental hull: a closed, possibly over-triangulated set of facets.
fn incremental(pts: &[Point3], eps: f64) -> Result<Vec<[usize; 3]>> {
    let s = initial_simplex(pts, eps)?;
    let centre = (pts[s[0]] + pts[s[1]] + pts[s[2]] + pts[s[3]]) / 4.0;
    let mut facets: Vec<Facet> = Vec::new();
    let mut edge_face: HashMap<(usize, usize), usize> = HashMap::new();

    let push = |facets: &mut Vec<Facet>, edge_face: &mut HashMap<(usize, usize), usize>, v: [usize; 3]| {
        let id = facets.len();
        for k in 0..3 {
            edge_face.insert((v[k], v[(k + 1) % 3]), id);
        }
        facets.push(Facet::new(pts, v));
    };

    for skip in 0..4 {
        let mut v = [0usize; 3];
        let mut j = 0;
        for (k, &idx) in s.iter().enumerate() {
            if k != skip {
                v[j] = idx;
                j += 1;
            }
        }
        let f = Facet::new(pts, v);
        if f.dist(centre) > 0.0 {
            v.swap(1, 2);
        }
        push(&mut facets, &mut edge_face, v);
    }

    for (pi, &p) in pts.iter().enumerate() {
        if s.contains(&pi) {
            continue;
        }
        let mut seed = None;
        let mut best = eps;
        for (fi, f) in facets.iter().enumerate() {
            if f.alive {
                let d = f.dist(p);
                if d > best {
                    best = d;
                    seed = Some(fi);
                }
            }
        }
        let Some(seed) = seed else { continue };

        // connected visible region around the most visible facet
        let mut visible: HashSet<usize> = HashSet::from([seed]);
        let mut queue = VecDeque::from([seed]);
        while let Some(fi) = queue.pop_front() {
            let v = facets[fi].v;
            for k in 0..3 {
                let (a, b) = (v[k], v[(k + 1) % 3]);
                let g = *edge_face
                    .get(&(b, a))
                    .ok_or_else(|| Error::Topology("hull lost an edge twin".into()))?;
                if !visible.contains(&g) && facets[g].dist(p) > eps {
                    visible.insert(g);
                    queue.push_back(g);
                }
            }
        }

        let mut order: Vec<usize> = visible.iter().copied().collect();
        order.sort_unstable();
        let mut horizon = Vec::new();
        for &fi in &order {
            let v = facets[fi].v;
            for k in 0..3 {
                let (a, b) = (v[k], v[(k + 1) % 3]);
                if !visible.contains(&edge_face[&(b, a)]) {
                    horizon.push((a, b));
                }
            }
        }
        for &fi in &order {
            facets[fi].alive = false;
            let v = facets[fi].v;
            for k in 0..3 {
                let e = (v[k], v[(k + 1) % 3]);
                if edge_face.get(&e) == Some(&fi) {
                    edge_face.remove(&e);
                }
            }
        }
        for (a, b) in horizon {
            push(&mut facets, &mut edge_face, [a, b, pi]);
        }
    }
    Ok(facets.into_iter().filter(|f| f.alive).map(|f| f.v).collect())
}

/// Strictly convex 2D hull (collinear points within `eps` dropped), CCW.
fn convex_polygon(pts2: &[(f64, f64, usize)], eps: f64) -> Vec<usize> {
    let mut p = pts2.to_vec();
    p.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.cmp(&b.2)));
    p.dedup_by(|a, b| (a.0 - b.0).hypot(a.1 - b.1) <= eps);
    if p.len() < 3 {
        return p.iter().map(|q| q.2).collect();
    }
    // `a` is dropped when it is not strictly left of o→b by more than eps
    let keep = |o: (f64, f64, usize), a: (f64, f64, usize), b: (f64, f64, usize)| {
        let cross = (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
        let len = (b.0 - o.0).hypot(b.1 - o.1);
        cross < -eps * len
    };
    let mut chain: Vec<(f64, f64, usize)> = Vec::with_capacity(2 * p.len());
    for pass in 0..2 {
        let start = chain.len();
        let iter: Box<dyn Iterator<Item = &(f64, f64, usize)>> =
            if pass == 0 { Box::new(p.iter()) } else { Box::new(p.iter().rev()) };
        for &q in iter {
            while chain.len() >= start + 2 && !keep(chain[chain.len() - 2], chain[chain.len() - 1], q) {
                chain.pop();
            }
            chain.push(q);
        }
        chain.pop();
    }
    // `keep` tests for a right turn, so the chain is clockwise; reverse it
    chain.reverse();
    chain.into_iter().map(|q| q.2).collect()
}

/// Convex hull of `points`. `tol` is relative to the bounding-box diagonal.
pub fn convex_hull3(points: &[Point3], tol: f64) -> Result<HullResult> {
    if points.len() < 4 {
        return Err(Error::DegenerateInput(format!("{} points, need at least 4", points.len())));
    }
    if let Some(i) = points.iter().position(|p| !p.is_finite()) {
        return Err(Error::DegenerateInput(format!("point {i} is not finite")));
    }
    let eps = tol * bbox_diagonal(points);
    let raw = incremental(points, eps)?;

    // group facets by supporting plane, largest area first
    let area = |f: &[usize; 3]| {
        let (a, b, c) = (points[f[0]], points[f[1]], points[f[2]]);
        (b - a).cross(c - a).norm()
    };
    let mut order: Vec<usize> = (0..raw.len()).collect();
    order.sort_by(|&i, &j| area(&raw[j]).total_cmp(&area(&raw[i])).then(i.cmp(&j)));
    let mut group = vec![usize::MAX; raw.len()];
    let mut planes: Vec<(Point3, f64)> = Vec::new();
    for &i in &order {
        if group[i] != usize::MAX {
            continue;
        }
        let f = Facet::new(points, raw[i]);
        let g = planes.len();
        planes.push((f.n, f.off));
        for &j in &order {
            if group[j] == usize::MAX
                && Facet::new(points, raw[j]).n.dot(f.n) > 0.0
                && raw[j].iter().all(|&v| f.dist(points[v]).abs() <= eps)
            {
                group[j] = g;
            }
        }
    }

    let mut faces: Vec<[usize; 3]> = Vec::new();
    for (g, &(n, _)) in planes.iter().enumerate() {
        let mut verts: Vec<usize> = raw
            .iter()
            .zip(&group)
            .filter(|(_, &gg)| gg == g)
            .flat_map(|(f, _)| f.iter().copied())
            .collect();
        verts.sort_unstable();
        verts.dedup();
        let helper = if n.x.abs() < 0.9 { Point3::new(1.0, 0.0, 0.0) } else { Point3::new(0.0, 1.0, 0.0) };
        let u = n.cross(helper).normalized().expect("helper not parallel to normal");
        let w = n.cross(u);
        let pts2: Vec<(f64, f64, usize)> = verts.iter().map(|&v| (points[v].dot(u), points[v].dot(w), v)).collect();
        let mut poly = convex_polygon(&pts2, eps);
        if poly.len() < 3 {
            continue;
        }
        let lowest = (0..poly.len()).min_by_key(|&i| poly[i]).unwrap();
        poly.rotate_left(lowest);
        for i in 1..poly.len() - 1 {
            faces.push([poly[0], poly[i], poly[i + 1]]);
        }
    }

    let mut used = vec![false; points.len()];
    for f in &faces {
        for &v in f {
            used[v] = true;
        }
    }
    let mut vertex_map = vec![None; points.len()];
    let mut vertices = Vec::new();
    for (i, &u) in used.iter().enumerate() {
        if u {
            vertex_map[i] = Some(vertices.len());
            vertices.push(points[i]);
        }
    }
    let faces: Vec<[usize; 3]> = faces.iter().map(|f| f.map(|v| vertex_map[v].unwrap())).collect();
    let mesh = TriangleMesh::new(vertices, faces)?;
    if !mesh.is_closed() {
        return Err(Error::DegenerateInput(
            "hull facets do not close up; input is too close to degenerate for this tolerance".into(),
        ));
    }
    Ok(HullResult { mesh, vertex_map })
}
