//! Four infinite families of convex polyhedra whose faces are congruent
//! isosceles triangles.

use std::collections::{BTreeSet, HashSet};
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom3::{fit_cyclic_rotation, spherical_angle, spherical_isosceles_sides, Point3, Rotation3, UnitVec};
use crate::hull::convex_hull3;
use crate::mesh::{congruence_classes, edge_key, is_convex, TriangleMesh, CONVEXITY_TOL, SHAPE_TOL};

const HULL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "camelCase")]
pub enum FamilySpec {
    Bipyramid { n: usize, h: f64 },
    Biarc { x: usize, y: usize },
    /// `equilateral` selects the unit-edge deltahedron instead of the
    /// spherical isosceles placement; only meaningful for `k` of 4 or 5.
    Gyro { k: usize, equilateral: bool },
    TwistedGyro { k: usize },
}

impl FamilySpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        match *self {
            FamilySpec::Bipyramid { n, h } if n < 3 || !(h > 0.0 && h.is_finite()) => {
                bad(format!("bipyramid needs n >= 3 and h > 0, got n = {n}, h = {h}"))
            }
            FamilySpec::Biarc { x, y } if x < 2 || y < 2 => bad(format!("biarc needs x, y >= 2, got ({x}, {y})")),
            FamilySpec::Gyro { k, .. } if k < 3 => bad(format!("gyro needs k >= 3, got {k}")),
            FamilySpec::Gyro { k, equilateral: true } if !(4..=5).contains(&k) => {
                bad(format!("the equilateral gyro exists only for k = 4, 5, got {k}"))
            }
            FamilySpec::TwistedGyro { k: 3 } => bad(
                "twisted k = 3 is a triangulated cube whose twisted faces are coplanar, not a strictly convex polyhedron"
                    .into(),
            ),
            FamilySpec::TwistedGyro { k } if k < 5 || k % 2 == 0 => {
                bad(format!("twisted gyro needs odd k >= 5, got {k}"))
            }
            _ => Ok(()),
        }
    }

    pub fn build(&self) -> Result<TriangleMesh> {
        match *self {
            FamilySpec::Bipyramid { n, h } => bipyramid(n, h),
            FamilySpec::Biarc { x, y } => biarc_hull(x, y),
            FamilySpec::Gyro { k, equilateral: false } => gyroelongated_bipyramid(k),
            FamilySpec::Gyro { k, equilateral: true } => equilateral_gyroelongated_bipyramid(k),
            FamilySpec::TwistedGyro { k } => twisted_gyroelongated_bipyramid(k).map(|t| t.mesh),
        }
    }
}

/// Ring `r_0..r_{n-1}` on the unit circle, then `N = (0,0,h)`, `S = (0,0,-h)`.
pub fn bipyramid(n: usize, h: f64) -> Result<TriangleMesh> {
    FamilySpec::Bipyramid { n, h }.validate()?;
    let mut v: Vec<Point3> = (0..n)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / n as f64;
            Point3::new(t.cos(), t.sin(), 0.0)
        })
        .collect();
    v.push(Point3::new(0.0, 0.0, h));
    v.push(Point3::new(0.0, 0.0, -h));
    let mut faces = Vec::with_capacity(2 * n);
    for i in 0..n {
        faces.push([i, (i + 1) % n, n]);
    }
    for i in 0..n {
        faces.push([(i + 1) % n, i, n + 1]);
    }
    TriangleMesh::new(v, faces)
}

/// Height at which the legs `√(1+h²)` equal the base `2 sin(π/n)`; exists
/// for `n ≤ 5`.
pub fn equilateral_bipyramid_height(n: usize) -> Option<f64> {
    let s = 2.0 * (PI / n as f64).sin();
    (n >= 3 && s > 1.0).then(|| (s * s - 1.0).sqrt())
}

/// Radius ratio of the two arcs of a biarc hull (the `Y` arc has radius 1).
pub fn biarc_radius(x: usize, y: usize) -> f64 {
    (PI / (2.0 * y as f64)).sin() / (PI / (2.0 * x as f64)).sin()
}

/// Points `X_0..X_x` on a half circle of radius `a` in the `z = 0` plane
/// followed by `Y_0..Y_y` on a unit half circle in the `x = 0` plane; every
/// point of one arc is equidistant from the two ends of the other.
pub fn biarc_points(x: usize, y: usize) -> Vec<Point3> {
    let a = biarc_radius(x, y);
    let xs = (0..=x).map(|i| {
        let t = i as f64 * PI / x as f64;
        Point3::new(a * t.cos(), a * t.sin(), 0.0)
    });
    let ys = (0..=y).map(|j| {
        let t = j as f64 * PI / y as f64;
        Point3::new(0.0, -t.sin(), t.cos())
    });
    xs.chain(ys).collect()
}

fn sorted_face_set(faces: &[[usize; 3]]) -> BTreeSet<[usize; 3]> {
    faces
        .iter()
        .map(|f| {
            let mut f = *f;
            f.sort_unstable();
            f
        })
        .collect()
}

/// Explicit biarc hull: each chord of one arc is joined to both ends of the
/// other. The face list is checked against the convex hull of the points.
pub fn biarc_hull(x: usize, y: usize) -> Result<TriangleMesh> {
    FamilySpec::Biarc { x, y }.validate()?;
    let pts = biarc_points(x, y);
    let yi = |j: usize| x + 1 + j;
    let mut faces = Vec::with_capacity(2 * (x + y));
    for i in 0..x {
        faces.push([i, i + 1, yi(0)]);
        faces.push([i, i + 1, yi(y)]);
    }
    for j in 0..y {
        faces.push([yi(j), yi(j + 1), 0]);
        faces.push([yi(j), yi(j + 1), x]);
    }
    let centre = pts.iter().fold(Point3::ORIGIN, |acc, &p| acc + p) / pts.len() as f64;
    for f in &mut faces {
        let (a, b, c) = (pts[f[0]], pts[f[1]], pts[f[2]]);
        if (b - a).cross(c - a).dot(a - centre) < 0.0 {
            f.swap(1, 2);
        }
    }
    let hull = convex_hull3(&pts, HULL_TOL)?;
    if hull.vertex_map.iter().any(Option::is_none) {
        return Err(Error::ConstructionInvalid(format!("biarc ({x}, {y}): some arc point is not a hull vertex")));
    }
    if sorted_face_set(hull.mesh.faces()) != sorted_face_set(&faces) {
        return Err(Error::ConstructionInvalid(format!("biarc ({x}, {y}): explicit faces differ from the hull")));
    }
    TriangleMesh::new(pts, faces)
}

/// Colatitude of the rings in the spherical placement of order `k`.
pub fn gyro_colatitude(k: usize) -> Result<f64> {
    let kf = k as f64;
    Ok(spherical_isosceles_sides(2.0 * PI / kf, (0.5 - 0.5 / kf) * PI)?.0)
}

/// Vertex order shared by both gyro placements: `N`, upper ring `U_0..`,
/// lower ring `L_0..` (offset by `π/k`), `S`.
fn gyro_points(k: usize, upper: (f64, f64), pole: f64) -> Vec<Point3> {
    let (rho, z) = upper;
    let mut v = vec![Point3::new(0.0, 0.0, pole)];
    for i in 0..k {
        let t = 2.0 * PI * i as f64 / k as f64;
        v.push(Point3::new(rho * t.cos(), rho * t.sin(), z));
    }
    for i in 0..k {
        let t = 2.0 * PI * i as f64 / k as f64 + PI / k as f64;
        v.push(Point3::new(rho * t.cos(), rho * t.sin(), -z));
    }
    v.push(Point3::new(0.0, 0.0, -pole));
    v
}

fn hull_with_faces(points: &[Point3], faces: usize, what: &str) -> Result<TriangleMesh> {
    let hull = convex_hull3(points, HULL_TOL)?;
    if hull.mesh.num_faces() != faces || hull.vertex_map.iter().any(Option::is_none) {
        return Err(Error::ConstructionInvalid(format!(
            "{what}: hull has {} faces and {} vertices, expected {faces} faces on all {} points",
            hull.mesh.num_faces(),
            hull.mesh.num_vertices(),
            points.len()
        )));
    }
    Ok(hull.mesh)
}

/// Spherical placement on the unit sphere in which every face spans a
/// spherical isosceles triangle with apex angle `2π/k` and base angles
/// `(1/2 − 1/(2k))π`.
pub fn gyroelongated_bipyramid(k: usize) -> Result<TriangleMesh> {
    FamilySpec::Gyro { k, equilateral: false }.validate()?;
    let l = gyro_colatitude(k)?;
    hull_with_faces(&gyro_points(k, (l.sin(), l.cos()), 1.0), 4 * k, &format!("gyro k = {k}"))
}

/// Unit-edge version for `k ∈ {4, 5}`: the gyroelongated square bipyramid
/// and the icosahedron.
pub fn equilateral_gyroelongated_bipyramid(k: usize) -> Result<TriangleMesh> {
    FamilySpec::Gyro { k, equilateral: true }.validate()?;
    let kf = k as f64;
    let rho = 0.5 / (PI / kf).sin();
    let cap = (1.0 - rho * rho).sqrt();
    let chord = 2.0 * rho * (PI / (2.0 * kf)).sin();
    let half = 0.5 * (1.0 - chord * chord).sqrt();
    hull_with_faces(&gyro_points(k, (rho, half), half + cap), 4 * k, &format!("equilateral gyro k = {k}"))
}

/// The polar skew hexagon of an odd-order gyro and the half it cuts off.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PolarHexagon {
    /// `N, a, b, S, −a, −b` as vertex indices.
    pub vertices: [usize; 6],
    /// Spherical angle of the hexagon at each of its vertices.
    pub turn_angles: [f64; 6],
    /// Faces on the side with `(k−1)/2` faces at the north pole.
    pub minor_faces: Vec<usize>,
    /// Vertices of that side not on the hexagon.
    pub minor_vertices: Vec<usize>,
}

fn antipode(m: &TriangleMesh, v: usize) -> Option<usize> {
    let target = -m.vertex(v);
    let (best, d) = (0..m.num_vertices())
        .map(|w| (w, m.vertex(w).distance(target)))
        .min_by(|a, b| a.1.total_cmp(&b.1))?;
    (d < 1e-9 * m.scale()).then_some(best)
}

/// Splits the faces along the closed edge path `cycle`; `None` unless the
/// path separates them into exactly two regions.
fn split_faces(m: &TriangleMesh, cycle: &[usize; 6]) -> Option<[Vec<usize>; 2]> {
    let cut: HashSet<(usize, usize)> = (0..6).map(|i| edge_key(cycle[i], cycle[(i + 1) % 6])).collect();
    let mut side = vec![usize::MAX; m.num_faces()];
    let mut regions: Vec<Vec<usize>> = Vec::new();
    for start in 0..m.num_faces() {
        if side[start] != usize::MAX {
            continue;
        }
        let r = regions.len();
        let mut stack = vec![start];
        side[start] = r;
        let mut region = Vec::new();
        while let Some(f) = stack.pop() {
            region.push(f);
            let face = m.face(f);
            for k in 0..3 {
                let (a, b) = (face[k], face[(k + 1) % 3]);
                if cut.contains(&edge_key(a, b)) {
                    continue;
                }
                for &g in m.edge_faces(a, b)? {
                    if side[g] == usize::MAX {
                        side[g] = r;
                        stack.push(g);
                    }
                }
            }
        }
        region.sort_unstable();
        regions.push(region);
    }
    let [r0, r1]: [Vec<usize>; 2] = regions.try_into().ok()?;
    Some([r0, r1])
}

/// Finds the hexagon `N, a, b, S, −a, −b` along mesh edges (with `N` the
/// vertex of largest `z`) that splits the `4k` faces evenly with `(k−1)/2`
/// and `(k+1)/2` faces on the two sides at each pole.
pub fn polar_hexagon(m: &TriangleMesh, k: usize) -> Result<PolarHexagon> {
    let not_found = |why: &str| Error::HexagonNotFound(format!("k = {k}: {why}"));
    if k.is_multiple_of(2) || k < 3 {
        return Err(not_found("k must be odd"));
    }
    if m.num_faces() != 4 * k {
        return Err(not_found("mesh does not have 4k faces"));
    }
    let north = (0..m.num_vertices())
        .max_by(|&a, &b| m.vertex(a).z.total_cmp(&m.vertex(b).z))
        .unwrap();
    let south = antipode(m, north).ok_or_else(|| not_found("north pole has no antipodal vertex"))?;
    let nbrs = m.vertex_neighbors();
    let adjacent = |a: usize, b: usize| nbrs[a].binary_search(&b).is_ok();
    let pole_faces = |region: &[usize], v: usize| region.iter().filter(|&&f| m.face(f).contains(&v)).count();

    for &a in &nbrs[north] {
        for &b in &nbrs[a] {
            if b == north || !adjacent(b, south) {
                continue;
            }
            let (Some(na), Some(nb)) = (antipode(m, a), antipode(m, b)) else { continue };
            let cycle = [north, a, b, south, na, nb];
            let distinct: HashSet<usize> = cycle.iter().copied().collect();
            if distinct.len() != 6 || !adjacent(south, na) || !adjacent(na, nb) || !adjacent(nb, north) {
                continue;
            }
            let Some(regions) = split_faces(m, &cycle) else { continue };
            if regions.iter().any(|r| r.len() != 2 * k) {
                continue;
            }
            let at_north = [pole_faces(&regions[0], north), pole_faces(&regions[1], north)];
            let minor = match at_north {
                [p, q] if p == (k - 1) / 2 && q == k.div_ceil(2) => 0,
                [p, q] if q == (k - 1) / 2 && p == k.div_ceil(2) => 1,
                _ => continue,
            };
            let at_south = pole_faces(&regions[minor], south);
            if at_south != (k - 1) / 2 && at_south != k.div_ceil(2) {
                continue;
            }
            let unit = |v: usize| UnitVec::new(m.vertex(v));
            let mut turn_angles = [0.0; 6];
            for i in 0..6 {
                turn_angles[i] = spherical_angle(unit(cycle[i])?, unit(cycle[(i + 5) % 6])?, unit(cycle[(i + 1) % 6])?);
            }
            let mut minor_vertices: Vec<usize> = regions[minor]
                .iter()
                .flat_map(|&f| m.face(f))
                .filter(|v| !distinct.contains(v))
                .collect();
            minor_vertices.sort_unstable();
            minor_vertices.dedup();
            return Ok(PolarHexagon {
                vertices: cycle,
                turn_angles,
                minor_faces: regions[minor].clone(),
                minor_vertices,
            });
        }
    }
    Err(not_found("no edge path splits the faces as required"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwistedGyro {
    pub mesh: TriangleMesh,
    pub hexagon: PolarHexagon,
    pub rotation: Rotation3,
}

/// Rotates the minor half of the spherical gyro of order `k` by the
/// rotation that shifts its polar hexagon two steps, then takes the hull.
pub fn twisted_gyroelongated_bipyramid(k: usize) -> Result<TwistedGyro> {
    FamilySpec::TwistedGyro { k }.validate()?;
    let base = gyroelongated_bipyramid(k)?;
    let hexagon = polar_hexagon(&base, k)?;
    let ring: Vec<Point3> = hexagon.vertices.iter().map(|&v| base.vertex(v)).collect();
    let rotation = fit_cyclic_rotation(&ring, 2)?;
    if rotation.trace().abs() > 1e-8 {
        return Err(Error::NoSymmetry(format!(
            "hexagon shift has trace {} instead of 0",
            rotation.trace()
        )));
    }
    let mut points = base.vertices().to_vec();
    for &v in &hexagon.minor_vertices {
        points[v] = rotation.apply(points[v]);
    }
    let mesh = hull_with_faces(&points, 4 * k, &format!("twisted gyro k = {k}"))?;
    if congruence_classes(&mesh, SHAPE_TOL).len() != 1 || !is_convex(&mesh, CONVEXITY_TOL)?.convex {
        return Err(Error::ConstructionInvalid(format!(
            "twisted gyro k = {k} is not a convex monohedral polyhedron"
        )));
    }
    Ok(TwistedGyro { mesh, hexagon, rotation })
}

/// Symmetric Hausdorff distance between two finite point sets.
pub fn hausdorff_distance(a: &[Point3], b: &[Point3]) -> f64 {
    let one_way = |p: &[Point3], q: &[Point3]| {
        p.iter()
            .map(|&x| q.iter().map(|&y| x.distance(y)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{face_shapes, total_angular_defect};

    fn assert_family_member(m: &TriangleMesh) {
        assert!(is_convex(m, CONVEXITY_TOL).unwrap().convex);
        assert_eq!(congruence_classes(m, SHAPE_TOL).len(), 1);
        assert!(face_shapes(m, SHAPE_TOL).unwrap().iter().all(|s| s.is_isosceles_or_equilateral()));
        assert!((total_angular_defect(m).unwrap() - 4.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn bipyramids() {
        let m = bipyramid(8, 1.0).unwrap();
        assert_eq!(m.num_faces(), 16);
        assert_family_member(&m);
        let leg = m.vertex(0).distance(m.vertex(8));
        assert!((leg - 2f64.sqrt()).abs() < 1e-15);
        // n = 4, h = 1 is the regular octahedron
        let o = bipyramid(4, 1.0).unwrap();
        for (e, _) in o.edges() {
            assert!((o.vertex(e.0).distance(o.vertex(e.1)) - 2f64.sqrt()).abs() < 1e-15);
        }
        let h3 = equilateral_bipyramid_height(3).unwrap();
        assert!((h3 - 2f64.sqrt()).abs() < 1e-15);
        let t = bipyramid(3, h3).unwrap();
        assert!(t.edges().all(|(e, _)| (t.vertex(e.0).distance(t.vertex(e.1)) - 3f64.sqrt()).abs() < 1e-12));
        assert_eq!(equilateral_bipyramid_height(6), None);
        assert!(bipyramid(2, 1.0).is_err());
        assert!(bipyramid(5, 0.0).is_err());
    }

    #[test]
    fn biarc_octahedron_and_three_five() {
        let o = biarc_hull(2, 2).unwrap();
        assert_eq!(o.num_faces(), 8);
        assert!(o.edges().all(|(e, _)| (o.vertex(e.0).distance(o.vertex(e.1)) - 2f64.sqrt()).abs() < 1e-15));
        let m = biarc_hull(3, 5).unwrap();
        assert_eq!(m.num_faces(), 16);
        assert_family_member(&m);
        let a = biarc_radius(3, 5);
        let leg = (a * a + 1.0).sqrt();
        let pts = biarc_points(3, 5);
        for i in 0..=3 {
            assert!((pts[i].distance(pts[4]) - leg).abs() < 1e-15);
            assert!((pts[i].distance(pts[9]) - leg).abs() < 1e-15);
        }
        assert!(biarc_hull(1, 3).is_err());
    }

    #[test]
    fn goldberg_twenty_five() {
        let m = gyroelongated_bipyramid(25).unwrap();
        assert_eq!(m.num_faces(), 100);
        assert_family_member(&m);
        assert!(m.vertices().iter().all(|v| (v.norm() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn gyro_five_is_the_icosahedron() {
        let m = gyroelongated_bipyramid(5).unwrap();
        assert!((gyro_colatitude(5).unwrap() - 2f64.atan()).abs() < 1e-14);
        let edge = m.vertex(0).distance(m.vertex(1));
        assert_eq!(m.num_edges(), 30);
        assert!(m.edges().all(|(e, _)| (m.vertex(e.0).distance(m.vertex(e.1)) - edge).abs() < 1e-9));
        let q = equilateral_gyroelongated_bipyramid(5).unwrap();
        assert!(q.edges().all(|(e, _)| (q.vertex(e.0).distance(q.vertex(e.1)) - 1.0).abs() < 1e-12));
    }

    #[test]
    fn square_gyro_both_placements() {
        let g = gyroelongated_bipyramid(4).unwrap();
        assert_family_member(&g);
        let j = equilateral_gyroelongated_bipyramid(4).unwrap();
        assert_eq!(j.num_faces(), 16);
        assert_family_member(&j);
        assert!(j.edges().all(|(e, _)| (j.vertex(e.0).distance(j.vertex(e.1)) - 1.0).abs() < 1e-12));
        assert!(equilateral_gyroelongated_bipyramid(6).is_err());
    }

    #[test]
    fn hexagon_of_order_seven() {
        let m = gyroelongated_bipyramid(7).unwrap();
        let h = polar_hexagon(&m, 7).unwrap();
        assert_eq!(h.vertices[0], 0);
        assert_eq!(h.vertices[3], 15);
        for t in h.turn_angles {
            assert!((t - 6.0 * PI / 7.0).abs() < 1e-9);
        }
        assert_eq!(h.minor_faces.len(), 14);
        let e = m.vertex(h.vertices[0]).distance(m.vertex(h.vertices[1]));
        for i in 0..6 {
            let d = m.vertex(h.vertices[i]).distance(m.vertex(h.vertices[(i + 1) % 6]));
            assert!((d - e).abs() < 1e-12);
        }
        let h5 = polar_hexagon(&gyroelongated_bipyramid(5).unwrap(), 5).unwrap();
        assert!(h5.turn_angles.iter().all(|t| (t - 4.0 * PI / 5.0).abs() < 1e-9));
        let m6 = gyroelongated_bipyramid(6).unwrap();
        assert!(matches!(polar_hexagon(&m6, 6), Err(Error::HexagonNotFound(_))));
    }

    #[test]
    fn twisting() {
        let t5 = twisted_gyroelongated_bipyramid(5).unwrap();
        let g5 = gyroelongated_bipyramid(5).unwrap();
        assert!(hausdorff_distance(t5.mesh.vertices(), g5.vertices()) < 1e-9);
        let t7 = twisted_gyroelongated_bipyramid(7).unwrap();
        assert_eq!(t7.mesh.num_faces(), 28);
        assert_family_member(&t7.mesh);
        assert!(t7.rotation.trace().abs() < 1e-8);
        assert!(matches!(twisted_gyroelongated_bipyramid(3), Err(Error::InvalidSpec(_))));
        assert!(twisted_gyroelongated_bipyramid(8).is_err());
    }
}
