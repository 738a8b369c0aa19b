//! Brute-force self-intersection check.
//!
//! Two non-coplanar triangles intersect iff an edge of one meets the other,
//! so everything reduces to a segment–triangle test with a distance
//! tolerance `eps`; contacts within `eps` count as intersections except along
//! the vertices and edges the two faces share.

use rayon::prelude::*;

use super::TriangleMesh;
use crate::geom3::Point3;

type Tri = [Point3; 3];

fn unit_normal(t: &Tri) -> Option<Point3> {
    (t[1] - t[0]).cross(t[2] - t[0]).normalized()
}

/// Drops the dominant axis of `n`, giving a well-conditioned 2D projection.
fn project(n: Point3) -> impl Fn(Point3) -> (f64, f64) {
    let (ax, ay, az) = (n.x.abs(), n.y.abs(), n.z.abs());
    move |p: Point3| {
        if ax >= ay && ax >= az {
            (p.y, p.z)
        } else if ay >= az {
            (p.z, p.x)
        } else {
            (p.x, p.y)
        }
    }
}

/// `x` (assumed within `eps` of the plane) lies in the triangle fattened
/// by `eps`.
fn point_in_triangle(x: Point3, t: &Tri, n: Point3, eps: f64) -> bool {
    (0..3).all(|k| {
        let (u, v) = (t[k], t[(k + 1) % 3]);
        let e = v - u;
        let len = e.norm();
        len == 0.0 || e.cross(x - u).dot(n) >= -eps * len
    })
}

fn orient2(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> f64 {
    (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
}

/// Closed 2D segments `ab` and `cd` meet, with slack `eps` on distances.
fn segments_meet_2d(a: (f64, f64), b: (f64, f64), c: (f64, f64), d: (f64, f64), eps: f64) -> bool {
    let len_ab = ((b.0 - a.0).powi(2) + (b.1 - a.1).powi(2)).sqrt();
    let len_cd = ((d.0 - c.0).powi(2) + (d.1 - c.1).powi(2)).sqrt();
    let (d1, d2) = (orient2(a, b, c), orient2(a, b, d));
    let (d3, d4) = (orient2(c, d, a), orient2(c, d, b));
    let straddle = |p: f64, q: f64, len: f64| !((p > eps * len && q > eps * len) || (p < -eps * len && q < -eps * len));
    if !(straddle(d1, d2, len_ab) && straddle(d3, d4, len_cd)) {
        return false;
    }
    // collinear-ish: require projected overlap
    let proj_overlap = |axis: usize| {
        let g = |p: (f64, f64)| if axis == 0 { p.0 } else { p.1 };
        let (lo1, hi1) = (g(a).min(g(b)), g(a).max(g(b)));
        let (lo2, hi2) = (g(c).min(g(d)), g(c).max(g(d)));
        lo1 <= hi2 + eps && lo2 <= hi1 + eps
    };
    proj_overlap(0) && proj_overlap(1)
}

/// Segment `p0p1` meets triangle `t` (unit normal `n`) within `eps`.
fn segment_hits_triangle(p0: Point3, p1: Point3, t: &Tri, n: Point3, eps: f64) -> bool {
    let d0 = n.dot(p0 - t[0]);
    let d1 = n.dot(p1 - t[0]);
    if (d0 > eps && d1 > eps) || (d0 < -eps && d1 < -eps) {
        return false;
    }
    let in_plane0 = d0.abs() <= eps;
    let in_plane1 = d1.abs() <= eps;
    if in_plane0 && in_plane1 {
        if point_in_triangle(p0, t, n, eps) || point_in_triangle(p1, t, n, eps) {
            return true;
        }
        let pr = project(n);
        let (a, b) = (pr(p0), pr(p1));
        return (0..3).any(|k| segments_meet_2d(a, b, pr(t[k]), pr(t[(k + 1) % 3]), eps));
    }
    if in_plane0 && point_in_triangle(p0, t, n, eps) {
        return true;
    }
    if in_plane1 && point_in_triangle(p1, t, n, eps) {
        return true;
    }
    if (d0 > 0.0) == (d1 > 0.0) {
        return false;
    }
    let x = p0 + (p1 - p0) * (d0 / (d0 - d1));
    point_in_triangle(x, t, n, eps)
}

/// Closed triangles `a` and `b` intersect (contacts within `eps` included).
pub fn triangles_intersect(a: &Tri, b: &Tri, eps: f64) -> bool {
    let (Some(na), Some(nb)) = (unit_normal(a), unit_normal(b)) else {
        return false;
    };
    let db = b.map(|p| na.dot(p - a[0]));
    if db.iter().all(|&d| d > eps) || db.iter().all(|&d| d < -eps) {
        return false;
    }
    let da = a.map(|p| nb.dot(p - b[0]));
    if da.iter().all(|&d| d > eps) || da.iter().all(|&d| d < -eps) {
        return false;
    }
    (0..3).any(|k| segment_hits_triangle(a[k], a[(k + 1) % 3], b, nb, eps))
        || (0..3).any(|k| segment_hits_triangle(b[k], b[(k + 1) % 3], a, na, eps))
}

fn bbox_overlap(a: &Tri, b: &Tri, eps: f64) -> bool {
    let lo = |t: &Tri, f: fn(&Point3) -> f64| t.iter().map(f).fold(f64::INFINITY, f64::min);
    let hi = |t: &Tri, f: fn(&Point3) -> f64| t.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
    let axes: [fn(&Point3) -> f64; 3] = [|p| p.x, |p| p.y, |p| p.z];
    axes.iter()
        .all(|&f| lo(a, f) <= hi(b, f) + eps && lo(b, f) <= hi(a, f) + eps)
}

fn pair_intersects(m: &TriangleMesh, i: usize, j: usize, eps: f64) -> bool {
    let (fi, fj) = (m.face(i), m.face(j));
    let (ti, tj) = (m.corners(i), m.corners(j));
    if !bbox_overlap(&ti, &tj, eps) {
        return false;
    }
    let shared: Vec<usize> = fi.iter().copied().filter(|v| fj.contains(v)).collect();
    match shared.len() {
        0 => triangles_intersect(&ti, &tj, eps),
        1 => {
            // only the edges opposite the shared vertex can carry a crossing
            let w = shared[0];
            let opp = |f: [usize; 3]| -> (Point3, Point3) {
                let k = f.iter().position(|&v| v == w).unwrap();
                (m.vertex(f[(k + 1) % 3]), m.vertex(f[(k + 2) % 3]))
            };
            let (Some(ni), Some(nj)) = (unit_normal(&ti), unit_normal(&tj)) else {
                return true;
            };
            let (a0, a1) = opp(fi);
            let (b0, b1) = opp(fj);
            // endpoints touching the other triangle only at w are not crossings
            let hits = |p0: Point3, p1: Point3, t: &Tri, n: Point3| {
                segment_hits_triangle(p0, p1, t, n, eps)
            };
            hits(a0, a1, &tj, nj) || hits(b0, b1, &ti, ni)
        }
        2 => {
            let (u, v) = (shared[0], shared[1]);
            let r1 = m.vertex(m.opposite_vertex(i, u, v));
            let r2 = m.vertex(m.opposite_vertex(j, u, v));
            let (pu, pv) = (m.vertex(u), m.vertex(v));
            let Some(n1) = unit_normal(&ti) else { return true };
            if n1.dot(r2 - pu).abs() > eps {
                return false;
            }
            // coplanar: a fold iff both apexes are on the same side of the edge
            let e = pv - pu;
            e.cross(r1 - pu).dot(e.cross(r2 - pu)) > 0.0
        }
        _ => true,
    }
}

/// All intersecting face pairs `(i, j)` with `i < j`, sorted.
pub fn self_intersection_check(m: &TriangleMesh, tol: f64) -> Vec<(usize, usize)> {
    let eps = tol * m.scale();
    let n = m.num_faces();
    let mut pairs: Vec<(usize, usize)> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            (i + 1..n)
                .filter(move |&j| pair_intersects(m, i, j, eps))
                .map(move |j| (i, j))
        })
        .collect();
    pairs.sort_unstable();
    pairs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::fixtures::{octahedron, tetrahedron};

    fn p(x: f64, y: f64, z: f64) -> Point3 {
        Point3::new(x, y, z)
    }

    #[test]
    fn octahedron_has_no_self_intersections() {
        assert!(self_intersection_check(&octahedron(), 1e-9).is_empty());
        assert!(self_intersection_check(&tetrahedron(), 1e-9).is_empty());
    }

    #[test]
    fn interpenetrating_tetrahedra_are_detected() {
        let t = tetrahedron();
        let mut v = t.vertices().to_vec();
        v.extend(t.vertices().iter().map(|&q| q * 0.8 + p(0.5, 0.3, 0.1)));
        let mut faces = t.faces().to_vec();
        faces.extend(t.faces().iter().map(|f| f.map(|i| i + 4)));
        let m = TriangleMesh::new(v, faces).unwrap();
        let hits = self_intersection_check(&m, 1e-9);
        assert!(!hits.is_empty());
        assert!(hits.iter().all(|&(i, j)| i < 4 && j >= 4));
    }

    #[test]
    fn crossing_and_separate_triangles() {
        let a = [p(0., 0., 0.), p(2., 0., 0.), p(0., 2., 0.)];
        let piercing = [p(0.5, 0.5, -1.), p(0.5, 0.5, 1.), p(3., 3., 0.5)];
        let above = [p(0., 0., 1.), p(2., 0., 1.), p(0., 2., 1.)];
        let coplanar = [p(0.5, 0.5, 0.), p(3., 0.5, 0.), p(0.5, 3., 0.)];
        let coplanar_apart = [p(3., 3., 0.), p(4., 3., 0.), p(3., 4., 0.)];
        assert!(triangles_intersect(&a, &piercing, 1e-12));
        assert!(!triangles_intersect(&a, &above, 1e-12));
        assert!(triangles_intersect(&a, &coplanar, 1e-12));
        assert!(!triangles_intersect(&a, &coplanar_apart, 1e-12));
        // touching at a point counts
        let touching = [p(1., 1., 0.), p(1., 1., 1.), p(2., 2., 1.)];
        assert!(triangles_intersect(&a, &touching, 1e-12));
    }

    #[test]
    fn folded_shared_edge_is_an_intersection() {
        let v = vec![p(0., 0., 0.), p(1., 0., 0.), p(0.5, 1., 0.), p(0.3, 0.5, 0.)];
        let m = TriangleMesh::new(v, vec![[0, 1, 2], [1, 0, 3]]).unwrap();
        // faces fold onto each other: 3 is on the same side of edge 01 as 2
        assert_eq!(self_intersection_check(&m, 1e-9), vec![(0, 1)]);
    }

    #[test]
    fn shared_vertex_crossing() {
        // two fans from the origin whose opposite edges pierce each other
        let v = vec![
            p(0., 0., 0.),
            p(1., -1., 0.),
            p(1., 1., 0.),
            p(1., 0., -1.),
            p(1., 0., 1.),
        ];
        let m = TriangleMesh::new(v, vec![[0, 1, 2], [0, 3, 4]]).unwrap();
        assert_eq!(self_intersection_check(&m, 1e-9), vec![(0, 1)]);
        let v2 = vec![
            p(0., 0., 0.),
            p(1., -1., 0.),
            p(1., 1., 0.),
            p(-1., 0., -1.),
            p(-1., 0., 1.),
        ];
        let m2 = TriangleMesh::new(v2, vec![[0, 1, 2], [0, 3, 4]]).unwrap();
        assert!(self_intersection_check(&m2, 1e-9).is_empty());
    }
}
