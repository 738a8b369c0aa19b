//! Geometric Kleetopes over a convex triangle mesh.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom3::{circumcircle, wedge_angle, Point3};
use crate::mesh::{is_convex, self_intersection_check, TriangleMesh, CONVEXITY_TOL};

pub const DEFAULT_HEIGHT_FACTOR: f64 = 0.5;
/// Upper limit on the radius doublings tried by the automatic spike radius.
pub const MAX_DOUBLINGS: u32 = 60;
const INTERSECTION_TOL: f64 = 1e-9;

fn require_convex(m: &TriangleMesh) -> Result<()> {
    let report = is_convex(m, CONVEXITY_TOL)?;
    if report.convex {
        Ok(())
    } else {
        Err(Error::ConvexityRequired(format!("witness {:?}", report.witness)))
    }
}

/// Appends apex `V + f` for every face and splits each face into three.
fn erect(m: &TriangleMesh, apexes: Vec<Point3>) -> Result<TriangleMesh> {
    let v = m.num_vertices();
    let mut vertices = m.vertices().to_vec();
    vertices.extend(apexes);
    let faces = m
        .faces()
        .iter()
        .enumerate()
        .flat_map(|(i, &[a, b, c])| {
            let p = v + i;
            [[a, b, p], [b, c, p], [c, a, p]]
        })
        .collect();
    TriangleMesh::new(vertices, faces)
}

/// Largest height above the barycentre of face `f` at which an apex keeps
/// the Kleetope strictly convex, whatever (smaller) heights the other faces
/// use.
///
/// Two limits apply. At each edge the apex must stay below the plane that
/// bisects the exterior angle between `f` and its neighbour, so that two
/// pyramids raised on either side never fold the edge past `π`. And the apex
/// must stay inside the halfspace of every other face.
fn max_apex_height(m: &TriangleMesh, f: usize) -> Result<f64> {
    let n = m.face_unit_normal(f)?.get();
    let c = m.face_centroid(f);
    let face = m.face(f);
    let mut t_max = f64::INFINITY;
    for k in 0..3 {
        let (u, v) = (face[k], face[(k + 1) % 3]);
        let g = *m
            .edge_faces(u, v)
            .and_then(|fs| fs.iter().find(|&&g| g != f))
            .ok_or_else(|| Error::Topology(format!("edge ({u}, {v}) has no second face")))?;
        let ng = m.face_unit_normal(g)?.get();
        let Some(bis) = (n + ng).normalized() else { continue };
        let denom = bis.dot(n);
        if denom > 0.0 {
            t_max = t_max.min(-bis.dot(c - m.vertex(u)) / denom);
        }
    }
    for g in 0..m.num_faces() {
        if g == f {
            continue;
        }
        let ng = m.face_unit_normal(g)?.get();
        let denom = ng.dot(n);
        if denom > 0.0 {
            t_max = t_max.min(ng.dot(m.vertex(m.face(g)[0]) - c) / denom);
        }
    }
    Ok(t_max)
}

/// Convex realization of the Kleetope of a strictly convex mesh: each apex
/// sits on the face normal through the barycentre at `height_factor` times
/// the largest safe height.
pub fn convex_kleetope(m: &TriangleMesh, height_factor: f64) -> Result<TriangleMesh> {
    if !(height_factor > 0.0 && height_factor < 1.0) {
        return Err(Error::InvalidConfig(format!("height factor {height_factor} not in (0, 1)")));
    }
    require_convex(m)?;
    let floor = 1e-12 * m.scale();
    let mut apexes = Vec::with_capacity(m.num_faces());
    for f in 0..m.num_faces() {
        let t_max = max_apex_height(m, f)?;
        if !(t_max > floor) {
            return Err(Error::CannotRaiseApex { face: f, t_max });
        }
        let n = m.face_unit_normal(f)?.get();
        apexes.push(m.face_centroid(f) + n * (height_factor * t_max));
    }
    let k = erect(m, apexes)?;
    let report = is_convex(&k, CONVEXITY_TOL)?;
    if !report.convex {
        return Err(Error::ConstructionInvalid(format!(
            "convex Kleetope failed the convexity check: {:?}",
            report.witness
        )));
    }
    Ok(k)
}

/// Radius shared by all spike apexes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SpikeParams {
    pub radius: f64,
    /// Number of doublings of the largest circumradius when the radius was
    /// chosen automatically.
    pub doublings: Option<u32>,
}

impl SpikeParams {
    /// Height of the apex above a face with circumradius `r_f`.
    pub fn apex_height(&self, r_f: f64) -> f64 {
        (self.radius * self.radius - r_f * r_f).sqrt()
    }
}

fn spike_apexes(m: &TriangleMesh, radius: f64) -> Result<Vec<Point3>> {
    (0..m.num_faces())
        .map(|f| {
            let (centre, r_f) = circumcircle(&m.triangle(f)?);
            let n = m.face_unit_normal(f)?.get();
            Ok(centre + n * (radius * radius - r_f * r_f).sqrt())
        })
        .collect()
}

/// For every face `f = (a, b, c)` with apex `p`, the dihedral of the
/// tetrahedron `abcp` at each base edge, in face-edge order.
pub fn pyramid_base_dihedrals(m: &TriangleMesh, apexes: &[Point3]) -> Vec<[f64; 3]> {
    (0..m.num_faces())
        .map(|f| {
            let c = m.corners(f);
            let p = apexes[f];
            [0, 1, 2].map(|k| wedge_angle(c[k], c[(k + 1) % 3], c[(k + 2) % 3], p))
        })
        .collect()
}

fn max_circumradius(m: &TriangleMesh) -> Result<f64> {
    let mut r = 0.0f64;
    for f in 0..m.num_faces() {
        r = r.max(circumcircle(&m.triangle(f)?).1);
    }
    Ok(r)
}

/// Non-convex isosceles realization: the apex over face `f` is the point at
/// distance `R` from all three corners, on the outer side of `f`.
///
/// Without an explicit radius, `R = 2^j · max r_f` for the first `j ≥ 1`
/// at which every pyramid's base dihedral is below `π − θ/2`, with `θ` the
/// largest dihedral of `m`. The result is checked for self-intersections.
pub fn spike_kleetope(m: &TriangleMesh, radius: Option<f64>) -> Result<(TriangleMesh, SpikeParams)> {
    require_convex(m)?;
    let r_max = max_circumradius(m)?;
    let params = match radius {
        Some(r) => {
            if !(r > r_max) {
                return Err(Error::RadiusTooSmall { radius: r, max_circumradius: r_max });
            }
            SpikeParams { radius: r, doublings: None }
        }
        None => {
            let mut theta = 0.0f64;
            for (e, _) in m.edges() {
                theta = theta.max(m.edge_dihedral(e.0, e.1)?);
            }
            let limit = std::f64::consts::PI - theta / 2.0;
            let mut found = None;
            for j in 1..=MAX_DOUBLINGS {
                let r = r_max * 2f64.powi(j as i32);
                let apexes = spike_apexes(m, r)?;
                let ok = pyramid_base_dihedrals(m, &apexes)
                    .iter()
                    .all(|ds| ds.iter().all(|&d| d < limit));
                if ok {
                    found = Some(SpikeParams { radius: r, doublings: Some(j) });
                    break;
                }
            }
            found.ok_or(Error::CannotSatisfyVoronoiCondition { doublings: MAX_DOUBLINGS })?
        }
    };
    let mesh = erect(m, spike_apexes(m, params.radius)?)?;
    let pairs = self_intersection_check(&mesh, INTERSECTION_TOL);
    if !pairs.is_empty() {
        return Err(Error::SelfIntersecting { pairs });
    }
    Ok((mesh, params))
}
