//! Scalar 3D geometry and spherical trigonometry.
//!
//! Everything here is a pure function of its inputs. Angles are radians and
//! are computed with `atan2` of cross/dot products rather than `acos` of a
//! dot product, so they stay accurate near `0` and `π`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::ops::{Add, AddAssign, Div, Index, Mul, Neg, Sub};

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dihedral between a right-triangle face and the equilateral face of the
/// cube-corner tetrahedron, `½·arccos(−1/3) = arctan(√2)`.
pub const PHI: f64 = 0.955_316_618_124_509_3;

/// A triangle counts as degenerate when its area is below this fraction of
/// its squared longest side.
pub const DEGENERACY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const ORIGIN: Point3 = Point3 { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(self, o: Point3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Point3) -> Point3 {
        Point3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn distance(self, o: Point3) -> f64 {
        (self - o).norm()
    }

    /// Returns `None` for the zero vector.
    pub fn normalized(self) -> Option<Point3> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self / n)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn lerp(self, o: Point3, t: f64) -> Point3 {
        self + (o - self) * t
    }

    /// Component of `self` perpendicular to the unit vector `axis`.
    pub fn reject_from(self, axis: Point3) -> Point3 {
        self - axis * self.dot(axis)
    }
}

impl From<[f64; 3]> for Point3 {
    fn from(a: [f64; 3]) -> Self {
        Point3::new(a[0], a[1], a[2])
    }
}

impl Add for Point3 {
    type Output = Point3;
    fn add(self, o: Point3) -> Point3 {
        Point3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Point3 {
    fn add_assign(&mut self, o: Point3) {
        *self = *self + o;
    }
}

impl Sub for Point3 {
    type Output = Point3;
    fn sub(self, o: Point3) -> Point3 {
        Point3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Point3 {
    type Output = Point3;
    fn mul(self, s: f64) -> Point3 {
        Point3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Div<f64> for Point3 {
    type Output = Point3;
    fn div(self, s: f64) -> Point3 {
        Point3::new(self.x / s, self.y / s, self.z / s)
    }
}

impl Neg for Point3 {
    type Output = Point3;
    fn neg(self) -> Point3 {
        Point3::new(-self.x, -self.y, -self.z)
    }
}

impl fmt::Display for Point3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

/// A point on the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "Point3", try_from = "Point3")]
pub struct UnitVec(Point3);

impl UnitVec {
    /// Normalizes `v`; fails on zero or non-finite input.
    pub fn new(v: Point3) -> Result<Self> {
        v.normalized()
            .map(UnitVec)
            .ok_or_else(|| Error::DegenerateInput(format!("cannot normalize {v}")))
    }

    pub fn get(self) -> Point3 {
        self.0
    }

    pub fn dot(self, o: UnitVec) -> f64 {
        self.0.dot(o.0)
    }
}

impl From<UnitVec> for Point3 {
    fn from(u: UnitVec) -> Point3 {
        u.0
    }
}

impl TryFrom<Point3> for UnitVec {
    type Error = Error;
    fn try_from(p: Point3) -> Result<Self> {
        if (p.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::DegenerateInput(format!("{p} is not a unit vector")));
        }
        Ok(UnitVec(p))
    }
}

/// Angle at `p` between rays `p→q` and `p→r`, in `[0, π]`.
pub fn angle_at(p: Point3, q: Point3, r: Point3) -> f64 {
    let u = q - p;
    let v = r - p;
    u.cross(v).norm().atan2(u.dot(v))
}

/// Angle between the half-planes bounded by line `pq` that contain `r` and
/// `s`; this is the dihedral of tetrahedron `pqrs` at edge `pq`, in `[0, π]`.
pub fn wedge_angle(p: Point3, q: Point3, r: Point3, s: Point3) -> f64 {
    let axis = match (q - p).normalized() {
        Some(a) => a,
        None => return 0.0,
    };
    let u = (r - p).reject_from(axis);
    let v = (s - p).reject_from(axis);
    u.cross(v).norm().atan2(u.dot(v))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarTriangle {
    pub a: Point3,
    pub b: Point3,
    pub c: Point3,
}

impl PlanarTriangle {
    pub fn new(a: Point3, b: Point3, c: Point3) -> Result<Self> {
        let t = PlanarTriangle { a, b, c };
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(Error::DegenerateInput("non-finite triangle vertex".into()));
        }
        let longest = t.side_lengths().into_iter().fold(0.0, f64::max);
        if longest == 0.0 || t.area() < DEGENERACY_TOL * longest * longest {
            return Err(Error::DegenerateInput(format!("degenerate triangle {a} {b} {c}")));
        }
        Ok(t)
    }

    /// Lays out a triangle with the given side lengths in the xy-plane.
    /// Side `i` is opposite vertex `i`.
    pub fn from_sides(sa: f64, sb: f64, sc: f64) -> Result<Self> {
        // a at origin, b on the x-axis at distance sc, c from the law of cosines
        let x = (sb * sb + sc * sc - sa * sa) / (2.0 * sc);
        let y2 = sb * sb - x * x;
        if !(y2 > 0.0) {
            return Err(Error::DegenerateInput(format!(
                "sides ({sa}, {sb}, {sc}) violate the triangle inequality"
            )));
        }
        PlanarTriangle::new(
            Point3::ORIGIN,
            Point3::new(sc, 0.0, 0.0),
            Point3::new(x, y2.sqrt(), 0.0),
        )
    }

    pub fn vertices(&self) -> [Point3; 3] {
        [self.a, self.b, self.c]
    }

    /// Side `i` is the one opposite vertex `i`.
    pub fn side_lengths(&self) -> [f64; 3] {
        [
            self.b.distance(self.c),
            self.c.distance(self.a),
            self.a.distance(self.b),
        ]
    }

    /// Unnormalized normal, counterclockwise orientation.
    pub fn normal_vector(&self) -> Point3 {
        (self.b - self.a).cross(self.c - self.a)
    }

    pub fn unit_normal(&self) -> UnitVec {
        UnitVec(self.normal_vector().normalized().expect("non-degenerate"))
    }

    pub fn area(&self) -> f64 {
        0.5 * self.normal_vector().norm()
    }

    pub fn centroid(&self) -> Point3 {
        (self.a + self.b + self.c) / 3.0
    }
}

impl Index<usize> for PlanarTriangle {
    type Output = Point3;
    fn index(&self, i: usize) -> &Point3 {
        match i {
            0 => &self.a,
            1 => &self.b,
            2 => &self.c,
            _ => panic!("triangle vertex index {i} out of range"),
        }
    }
}

pub fn circumcircle(t: &PlanarTriangle) -> (Point3, f64) {
    let ab = t.b - t.a;
    let ac = t.c - t.a;
    let n = ab.cross(ac);
    let offset = (n.cross(ab) * ac.norm_squared() + ac.cross(n) * ab.norm_squared())
        / (2.0 * n.norm_squared());
    let center = t.a + offset;
    (center, offset.norm())
}

/// Interior angles `(α, β, γ)` at vertices `a`, `b`, `c`.
pub fn triangle_angles(t: &PlanarTriangle) -> [f64; 3] {
    [
        angle_at(t.a, t.b, t.c),
        angle_at(t.b, t.c, t.a),
        angle_at(t.c, t.a, t.b),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeCategory {
    Equilateral,
    Isosceles,
    Scalene,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AngleClass {
    Acute,
    Right,
    Obtuse,
}

/// Metric classification of one triangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FaceShape {
    pub category: ShapeCategory,
    /// Local index (0..3) of the vertex between the two equal sides; only
    /// set for isosceles faces.
    pub apex: Option<usize>,
    pub angle_class: AngleClass,
    pub sorted_sides: [f64; 3],
    pub largest_angle: f64,
}

impl FaceShape {
    pub fn is_isosceles_or_equilateral(&self) -> bool {
        self.category != ShapeCategory::Scalene
    }
}

pub fn classify_shape(t: &PlanarTriangle, rel_tol: f64) -> FaceShape {
    let sides = t.side_lengths();
    let mut sorted_sides = sides;
    sorted_sides.sort_by(f64::total_cmp);
    let max_side = sorted_sides[2];
    let largest_angle = triangle_angles(t).into_iter().fold(0.0, f64::max);
    let angle_class = if (largest_angle - FRAC_PI_2).abs() <= rel_tol * FRAC_PI_2 {
        AngleClass::Right
    } else if largest_angle > FRAC_PI_2 {
        AngleClass::Obtuse
    } else {
        AngleClass::Acute
    };

    let (category, apex) = if sorted_sides[2] - sorted_sides[0] <= rel_tol * max_side {
        (ShapeCategory::Equilateral, None)
    } else {
        // deviation of the two sides adjacent to vertex i
        let dev = |i: usize| (sides[(i + 1) % 3] - sides[(i + 2) % 3]).abs() / max_side;
        let best = (0..3)
            .filter(|&i| dev(i) <= rel_tol)
            .min_by(|&i, &j| dev(i).total_cmp(&dev(j)).then(i.cmp(&j)));
        match best {
            Some(i) => (ShapeCategory::Isosceles, Some(i)),
            None => (ShapeCategory::Scalene, None),
        }
    };
    FaceShape { category, apex, angle_class, sorted_sides, largest_angle }
}

/// Interior dihedral at the shared edge of two outward-oriented
/// (counterclockwise seen from outside) triangles, in `[0, 2π)`. Values above
/// `π` are reflex.
pub fn dihedral_angle(
    t1: &PlanarTriangle,
    t2: &PlanarTriangle,
    shared_edge: (Point3, Point3),
) -> Result<f64> {
    let (p, q) = shared_edge;
    let opposite = |t: &PlanarTriangle| -> Option<Point3> {
        let vs = t.vertices();
        let has = |x: Point3| vs.contains(&x);
        if !(has(p) && has(q)) || p == q {
            return None;
        }
        vs.into_iter().find(|&v| v != p && v != q)
    };
    match (opposite(t1), opposite(t2)) {
        (Some(r1), Some(r2)) => Ok(interior_dihedral(p, q, r1, r2, t1.normal_vector())),
        _ => Err(Error::Topology("triangles do not share the given edge".into())),
    }
}

/// Interior dihedral at edge `pq` between the face containing `r1` (outward
/// normal `n1`) and the face containing `r2`.
pub fn interior_dihedral(p: Point3, q: Point3, r1: Point3, r2: Point3, n1: Point3) -> f64 {
    let theta = wedge_angle(p, q, r1, r2);
    if n1.dot(r2 - p) > 0.0 {
        2.0 * PI - theta
    } else {
        theta
    }
}

pub fn geodesic_distance(u: UnitVec, v: UnitVec) -> f64 {
    u.0.cross(v.0).norm().atan2(u.0.dot(v.0))
}

/// Angle at `at` between the great-circle arcs towards `p` and `q`.
pub fn spherical_angle(at: UnitVec, p: UnitVec, q: UnitVec) -> f64 {
    let a = at.get();
    let u = p.get().reject_from(a);
    let v = q.get().reject_from(a);
    u.cross(v).norm().atan2(u.dot(v))
}

/// Arc lengths `(leg, base)` of the spherical isosceles triangle with apex
/// angle `apex` and base angles `base`, from the spherical law of cosines for
/// angles.
pub fn spherical_isosceles_sides(apex: f64, base: f64) -> Result<(f64, f64)> {
    let excess = apex + 2.0 * base - PI;
    if !(apex > 0.0 && apex < PI && base > 0.0 && base < PI) || !(excess > 0.0) {
        return Err(Error::InvalidSphericalTriangle(format!(
            "angles ({apex}, {base}, {base}) have excess {excess}"
        )));
    }
    let (sa, ca) = apex.sin_cos();
    let (sb, cb) = base.sin_cos();
    let cos_leg = cb * (1.0 + ca) / (sa * sb);
    let cos_base = (ca + cb * cb) / (sb * sb);
    if !(cos_leg.abs() < 1.0 && cos_base.abs() < 1.0) {
        return Err(Error::InvalidSphericalTriangle(format!(
            "angles ({apex}, {base}, {base}) admit no triangle"
        )));
    }
    Ok((cos_leg.acos(), cos_base.acos()))
}

/// A proper rotation about the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation3 {
    m: [[f64; 3]; 3],
}

impl Rotation3 {
    pub const IDENTITY: Rotation3 = Rotation3 {
        m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
    };

    pub fn from_matrix(m: [[f64; 3]; 3]) -> Result<Self> {
        let r = Rotation3 { m };
        if r.orthogonality_residual() > 1e-10 || (r.determinant() - 1.0).abs() > 1e-10 {
            return Err(Error::DegenerateInput("matrix is not a proper rotation".into()));
        }
        Ok(r)
    }

    /// Right-handed rotation by `angle` about `axis`.
    pub fn about_axis(axis: Point3, angle: f64) -> Result<Self> {
        let k = axis
            .normalized()
            .ok_or_else(|| Error::DegenerateInput("zero rotation axis".into()))?;
        let (s, c) = angle.sin_cos();
        let t = 1.0 - c;
        let m = [
            [t * k.x * k.x + c, t * k.x * k.y - s * k.z, t * k.x * k.z + s * k.y],
            [t * k.x * k.y + s * k.z, t * k.y * k.y + c, t * k.y * k.z - s * k.x],
            [t * k.x * k.z - s * k.y, t * k.y * k.z + s * k.x, t * k.z * k.z + c],
        ];
        Ok(Rotation3 { m })
    }

    pub fn matrix(&self) -> [[f64; 3]; 3] {
        self.m
    }

    pub fn apply(&self, p: Point3) -> Point3 {
        let r = |i: usize| self.m[i][0] * p.x + self.m[i][1] * p.y + self.m[i][2] * p.z;
        Point3::new(r(0), r(1), r(2))
    }

    pub fn trace(&self) -> f64 {
        self.m[0][0] + self.m[1][1] + self.m[2][2]
    }

    /// Rotation angle in `[0, π]`.
    pub fn angle(&self) -> f64 {
        ((self.trace() - 1.0) / 2.0).clamp(-1.0, 1.0).acos()
    }

    pub fn determinant(&self) -> f64 {
        self.na().determinant()
    }

    /// Max-abs entry of `RᵀR − I`.
    pub fn orthogonality_residual(&self) -> f64 {
        let m = self.na();
        (m.transpose() * m - Matrix3::identity()).abs().max()
    }

    fn na(&self) -> Matrix3<f64> {
        Matrix3::from_fn(|i, j| self.m[i][j])
    }
}

/// Least-squares rotation (about the origin) taking `points[i]` to
/// `points[(i + shift) mod n]`, accepted only if every point lands within
/// `1e-8` of the scale of the input.
pub fn fit_cyclic_rotation(points: &[Point3], shift: isize) -> Result<Rotation3> {
    let n = points.len();
    if n < 3 {
        return Err(Error::DegenerateInput(format!("need at least 3 points, got {n}")));
    }
    let scale = points.iter().map(|p| p.norm()).fold(0.0, f64::max);
    let spread = points
        .iter()
        .flat_map(|&p| points.iter().map(move |&q| p.cross(q).norm()))
        .fold(0.0, f64::max);
    if scale == 0.0 || spread <= 1e-12 * scale * scale {
        return Err(Error::DegenerateInput("points are collinear with the origin".into()));
    }
    let target = |i: usize| points[(i as isize + shift).rem_euclid(n as isize) as usize];

    // Kabsch: H = Σ p qᵀ, R = V diag(1, 1, d) Uᵀ
    let mut h = Matrix3::<f64>::zeros();
    for (i, &p) in points.iter().enumerate() {
        let q = target(i);
        let (pa, qa) = (p.to_array(), q.to_array());
        for r in 0..3 {
            for c in 0..3 {
                h[(r, c)] += pa[r] * qa[c];
            }
        }
    }
    let svd = h.svd(true, true);
    let (u, v_t) = (svd.u.expect("u requested"), svd.v_t.expect("v_t requested"));
    let v = v_t.transpose();
    let d = (v * u.transpose()).determinant().signum();
    let r = v * Matrix3::from_diagonal(&nalgebra::Vector3::new(1.0, 1.0, d)) * u.transpose();
    let rot = Rotation3 { m: std::array::from_fn(|i| std::array::from_fn(|j| r[(i, j)])) };

    let residual = points
        .iter()
        .enumerate()
        .map(|(i, &p)| rot.apply(p).distance(target(i)))
        .fold(0.0, f64::max);
    if residual > 1e-8 * scale {
        return Err(Error::NoSymmetry(format!(
            "cyclic shift {shift} residual {residual:e} exceeds tolerance"
        )));
    }
    Ok(rot)
}
