//! Randomized stress tests for the dihedral, projection and sharpness
//! lemmas about tetrahedra and Kleetopes.
//!
//! Every sample draws from its own ChaCha8 stream: the key is built from the
//! seed and the case, the stream number is the sample index. Parallel and
//! serial runs therefore produce identical samples.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::SCHEMA_VERSION;
use crate::error::{Error, Result};
use crate::geom3::{circumcircle, wedge_angle, PlanarTriangle, Point3, Rotation3, PHI};
use crate::kleetope::convex_kleetope;
use crate::mesh::{all_sharpness, TriangleMesh};

/// Slack on the strict `> π/3` bound.
pub const DIHEDRAL_SLACK: f64 = 1e-9;
/// Relative tolerance for the equal-length constraints of a sample.
pub const LENGTH_TOL: f64 = 1e-9;
const MAX_REJECTIONS: usize = 10_000;
/// Smallest accepted `6·volume / (longest edge)³`.
const SLIVER: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum IsoCase {
    TwoBasesOnF,
    TwoSharedBases,
    LongSide,
    TwoSharedApexes,
    NoneOfAbove,
}

impl IsoCase {
    pub const ALL: [IsoCase; 5] = [
        IsoCase::TwoBasesOnF,
        IsoCase::TwoSharedBases,
        IsoCase::LongSide,
        IsoCase::TwoSharedApexes,
        IsoCase::NoneOfAbove,
    ];

    /// The two shared cases are also sampled with a non-obtuse base.
    pub fn requires_obtuse_base(self) -> bool {
        !matches!(self, IsoCase::TwoSharedBases | IsoCase::TwoSharedApexes)
    }

    fn index(self) -> u64 {
        IsoCase::ALL.iter().position(|&c| c == self).unwrap() as u64
    }
}

/// Tetrahedron `ABCD` with base face `F = ABC`. Edge names: `a = BC`,
/// `b = CA`, `c = AB`, `d = AD`, `e = BD`, `f = CD`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct IsoTetra {
    pub vertices: [Point3; 4],
    pub case: IsoCase,
    /// Which family of equal-length constraints produced the sample.
    pub variant: &'static str,
}

const A: usize = 0;
const B: usize = 1;
const C: usize = 2;
const D: usize = 3;
const EA: usize = 0;
const EB: usize = 1;
const EC: usize = 2;
const ED: usize = 3;
const EE: usize = 4;
const EF: usize = 5;

impl IsoTetra {
    pub fn lengths(&self) -> [f64; 6] {
        let v = &self.vertices;
        [
            v[B].distance(v[C]),
            v[C].distance(v[A]),
            v[A].distance(v[B]),
            v[A].distance(v[D]),
            v[B].distance(v[D]),
            v[C].distance(v[D]),
        ]
    }

    pub fn base(&self) -> PlanarTriangle {
        PlanarTriangle::new(self.vertices[A], self.vertices[B], self.vertices[C]).expect("validated sample")
    }

    /// Largest angle of the base face exceeds `π/2`.
    pub fn base_obtuse(&self) -> bool {
        let [a, b, c, ..] = self.lengths();
        let mut s = [a, b, c];
        s.sort_by(f64::total_cmp);
        s[2] * s[2] > s[0] * s[0] + s[1] * s[1]
    }

    /// Dihedrals of the tetrahedron at `BC`, `CA`, `AB`.
    pub fn base_dihedrals(&self) -> [f64; 3] {
        let v = &self.vertices;
        [
            wedge_angle(v[B], v[C], v[A], v[D]),
            wedge_angle(v[C], v[A], v[B], v[D]),
            wedge_angle(v[A], v[B], v[C], v[D]),
        ]
    }

    /// Equalities `(i, j)` between edge lengths required by the variant.
    fn constraints(&self) -> Vec<(usize, usize)> {
        match (self.case, self.variant) {
            (IsoCase::TwoBasesOnF, _) => vec![(ED, EE), (EE, EF)],
            (IsoCase::TwoSharedBases, "aboutBase") => vec![(EB, EC), (EE, EC), (EF, EB)],
            (IsoCase::TwoSharedBases, _) => vec![(EB, EC), (ED, EB), (EE, EA)],
            (IsoCase::LongSide, v) => {
                let mut out = vec![(EE, EC)];
                out.push(if v.starts_with("fa") { (EF, EA) } else { (EF, EC) });
                out.push(if v.ends_with("db") { (ED, EB) } else { (ED, EF) });
                out
            }
            (IsoCase::TwoSharedApexes, v) => {
                let last = match v {
                    "dEqualsE" => (ED, EE),
                    "dEqualsC" => (ED, EC),
                    _ => (EE, EC),
                };
                vec![(EA, EB), (EA, EF), last]
            }
            (IsoCase::NoneOfAbove, _) => vec![(EB, ED), (ED, EE), (EA, EF)],
        }
    }

    /// Re-checks the sample from its coordinates alone: non-degenerate,
    /// the three side faces isosceles, the variant's length equalities, and
    /// an obtuse base where the case needs one.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(format!("{:?}/{}: {m}", self.case, self.variant)));
        if !self.vertices.iter().all(|p| p.is_finite()) {
            return bad("non-finite coordinates".into());
        }
        let l = self.lengths();
        let longest = l.iter().copied().fold(0.0, f64::max);
        let v = &self.vertices;
        let vol6 = (v[B] - v[A]).cross(v[C] - v[A]).dot(v[D] - v[A]).abs();
        if !(vol6 > SLIVER * longest.powi(3)) {
            return bad("degenerate tetrahedron".into());
        }
        let eq = |i: usize, j: usize| (l[i] - l[j]).abs() <= LENGTH_TOL * longest;
        let iso = |x: usize, y: usize, z: usize| eq(x, y) || eq(y, z) || eq(x, z);
        if !(iso(EC, ED, EE) && iso(EA, EE, EF) && iso(EB, EF, ED)) {
            return bad("a side face is not isosceles".into());
        }
        if let Some((i, j)) = self.constraints().into_iter().find(|&(i, j)| !eq(i, j)) {
            return bad(format!("lengths {i} and {j} differ: {} vs {}", l[i], l[j]));
        }
        if self.case.requires_obtuse_base() && !self.base_obtuse() {
            return bad("base face is not obtuse".into());
        }
        if self.case == IsoCase::NoneOfAbove && !(l[EC] > l[EA] && l[EC] > l[EB] && self.base_obtuse()) {
            return bad("AB must be the longest side, opposite an obtuse angle".into());
        }
        Ok(())
    }

    /// The tetrahedron as a closed mesh with outward faces.
    pub fn to_mesh(&self) -> TriangleMesh {
        let v = &self.vertices;
        let below = (v[B] - v[A]).cross(v[C] - v[A]).dot(v[D] - v[A]) > 0.0;
        let faces = if below {
            vec![[0, 2, 1], [0, 1, 3], [1, 2, 3], [2, 0, 3]]
        } else {
            vec![[0, 1, 2], [0, 3, 1], [1, 3, 2], [2, 3, 0]]
        };
        TriangleMesh::new(v.to_vec(), faces).expect("valid tetrahedron")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SampleConfig {
    pub seed: u64,
    /// Samples per case.
    pub count: usize,
    pub cases: Vec<IsoCase>,
    /// Range of the largest base angle whenever an obtuse base is drawn.
    pub obtuse_range: (f64, f64),
}

impl SampleConfig {
    pub fn new(seed: u64, count: usize) -> Self {
        SampleConfig { seed, count, cases: IsoCase::ALL.to_vec(), obtuse_range: (PI / 2.0 + 0.01, PI - 0.05) }
    }

    fn check(&self) -> Result<()> {
        let (lo, hi) = self.obtuse_range;
        if !(PI / 2.0 < lo && lo < hi && hi < PI) {
            return Err(Error::InvalidConfig(format!("obtuse range ({lo}, {hi}) must lie in (π/2, π)")));
        }
        Ok(())
    }
}

/// Independent stream for sample `index` of `case`.
pub fn sample_rng(seed: u64, case: u64, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&case.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}

/// The point at distances `(ra, rb, rc)` from `p, q, r`, on the side of
/// the plane `pqr` its normal points to.
pub fn trilaterate(p: Point3, q: Point3, r: Point3, ra: f64, rb: f64, rc: f64) -> Option<Point3> {
    let dd = p.distance(q);
    let ex = (q - p) / dd;
    let i = ex.dot(r - p);
    let ey = (r - p - ex * i).normalized()?;
    let ez = ex.cross(ey);
    let j = ey.dot(r - p);
    let x = (ra * ra - rb * rb + dd * dd) / (2.0 * dd);
    let y = (ra * ra - rc * rc + i * i + j * j) / (2.0 * j) - i / j * x;
    let z2 = ra * ra - x * x - y * y;
    (z2 > 0.0).then(|| p + ex * x + ey * y + ez * z2.sqrt())
}

/// Triangle with angle `gamma` at `C` between sides `CA = b` and `CB = a`,
/// placed in the `z = 0` plane.
fn base_from_angle(a: f64, b: f64, gamma: f64) -> [Point3; 3] {
    let c = Point3::ORIGIN;
    let pa = Point3::new(b, 0.0, 0.0);
    let pb = Point3::new(a * gamma.cos(), a * gamma.sin(), 0.0);
    [pa, pb, c]
}

fn draw_obtuse(rng: &mut ChaCha8Rng, range: (f64, f64)) -> f64 {
    rng.random_range(range.0..range.1)
}

fn rotate_about(p: Point3, from: Point3, to: Point3, angle: f64) -> Point3 {
    let r = Rotation3::about_axis(to - from, angle).expect("distinct axis points");
    from + r.apply(p - from)
}

fn draw(case: IsoCase, obtuse: bool, cfg: &SampleConfig, rng: &mut ChaCha8Rng) -> Option<IsoTetra> {
    let range = cfg.obtuse_range;
    let tetra = |v: [Point3; 4], variant: &'static str| IsoTetra { vertices: v, case, variant };
    match case {
        IsoCase::TwoBasesOnF => {
            let gamma = draw_obtuse(rng, range);
            let [pa, pb, pc] = base_from_angle(1.0, rng.random_range(0.2..1.0), gamma);
            let t = PlanarTriangle::new(pa, pb, pc).ok()?;
            let (centre, r) = circumcircle(&t);
            let n = t.unit_normal().get();
            let h = rng.random_range(0.05..3.0) * r;
            Some(tetra([pa, pb, pc, centre + n * h], "apexAboveCircumcenter"))
        }
        IsoCase::TwoSharedBases => {
            // isosceles F with apex A
            let alpha = if obtuse { draw_obtuse(rng, range) } else { rng.random_range(0.1..PI / 2.0) };
            let pa = Point3::new(0.0, (alpha / 2.0).cos(), 0.0);
            let s = (alpha / 2.0).sin();
            let (pb, pc) = (Point3::new(-s, 0.0, 0.0), Point3::new(s, 0.0, 0.0));
            let omega = rng.random_range(0.02..PI - 0.02);
            if rng.random_bool(0.5) {
                Some(tetra([pa, pb, pc, rotate_about(pa, pb, pc, omega)], "aboutBase"))
            } else {
                Some(tetra([pa, pb, pc, rotate_about(pc, pa, pb, omega)], "aboutSide"))
            }
        }
        IsoCase::LongSide => {
            let gamma = draw_obtuse(rng, range);
            let (mut a, mut b) = (rng.random_range(0.3..1.0), rng.random_range(0.3..1.0));
            if rng.random_bool(0.5) {
                std::mem::swap(&mut a, &mut b);
            }
            let [pa, pb, pc] = base_from_angle(a, b, gamma);
            let c = pa.distance(pb);
            let (fa, db) = (rng.random_bool(0.5), rng.random_bool(0.5));
            let f = if fa { a } else { c };
            let d = if db { b } else { f };
            let variant = match (fa, db) {
                (true, true) => "fa-db",
                (true, false) => "fa-df",
                (false, true) => "fc-db",
                (false, false) => "fc-df",
            };
            let pd = trilaterate(pa, pb, pc, d, c, f)?;
            Some(tetra([pa, pb, pc, pd], variant))
        }
        IsoCase::TwoSharedApexes => {
            let gamma = if obtuse { draw_obtuse(rng, range) } else { rng.random_range(0.2..PI / 2.0) };
            let [pa, pb, pc] = base_from_angle(1.0, 1.0, gamma);
            let c = pa.distance(pb);
            let t = rng.random_range(0.0..2.0 * PI);
            let z = Point3::new(0.0, 0.0, 1.0);
            let (variant, pd) = match rng.random_range(0..3) {
                0 => {
                    let u = (pa + pb).normalized()?;
                    ("dEqualsE", u * t.cos() + z * t.sin())
                }
                k => {
                    let centre = if k == 1 { pa } else { pb };
                    let w1 = centre.cross(z).normalized()?;
                    let along = 1.0 - c * c / 2.0;
                    let across = (1.0 - along * along).sqrt();
                    let p = centre * along + (w1 * t.cos() + z * t.sin()) * across;
                    (if k == 1 { "dEqualsC" } else { "eEqualsC" }, p)
                }
            };
            Some(tetra([pa, pb, pc, pd], variant))
        }
        IsoCase::NoneOfAbove => {
            let l1 = 1.0;
            let short = rng.random_bool(0.5);
            let l2 = if short { rng.random_range(0.2..0.999) } else { rng.random_range(1.001..2.0) };
            let gamma = draw_obtuse(rng, range);
            let [pa, pb, pc] = base_from_angle(l2, l1, gamma);
            let pd = trilaterate(pa, pb, pc, l1, l1, l2)?;
            Some(tetra([pa, pb, pc, pd], if short { "shortA" } else { "longA" }))
        }
    }
}

/// Whether sample `index` of a shared case gets an obtuse base (even
/// indices do). Other cases always do.
pub fn draws_obtuse(case: IsoCase, index: usize) -> bool {
    case.requires_obtuse_base() || index.is_multiple_of(2)
}

/// Sample `index` of `case`, redrawn until it validates.
pub fn sample_iso_tetra(cfg: &SampleConfig, case: IsoCase, index: usize) -> Result<IsoTetra> {
    cfg.check()?;
    let mut rng = sample_rng(cfg.seed, case.index(), index as u64);
    let obtuse = draws_obtuse(case, index);
    for _ in 0..MAX_REJECTIONS {
        if let Some(t) = draw(case, obtuse, cfg, &mut rng) {
            if t.validate().is_ok() {
                return Ok(t);
            }
        }
    }
    Err(Error::RejectionBudget { case: format!("{case:?}"), attempts: MAX_REJECTIONS })
}

/// Largest base dihedral and whether it clears `π/3 − DIHEDRAL_SLACK`.
pub fn check_big_dihedral(t: &IsoTetra) -> (f64, bool) {
    let m = t.base_dihedrals().into_iter().fold(f64::NEG_INFINITY, f64::max);
    (m, m > PI / 3.0 - DIHEDRAL_SLACK)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Counterexample {
    pub index: usize,
    pub max_base_dihedral: f64,
    pub tetra: IsoTetra,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CaseStats {
    pub case: IsoCase,
    pub obtuse_base: bool,
    pub samples: usize,
    pub violations: usize,
    /// Smallest and largest value of the largest base dihedral.
    pub min_max_dihedral: f64,
    pub max_max_dihedral: f64,
    pub counterexamples: Vec<Counterexample>,
}

/// Tetrahedra from the shared-bases construction on a base of apex angle
/// `π − 2δ` turned by `π/3`; their largest base dihedral tends to `π/3`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BoundaryFamily {
    pub deltas: Vec<f64>,
    pub max_dihedrals: Vec<f64>,
    /// `max_dihedral − π/3` at the smallest `δ`.
    pub final_gap: f64,
}

pub fn shared_bases_boundary(delta: f64) -> IsoTetra {
    let alpha = PI - 2.0 * delta;
    let pa = Point3::new(0.0, (alpha / 2.0).cos(), 0.0);
    let s = (alpha / 2.0).sin();
    let (pb, pc) = (Point3::new(-s, 0.0, 0.0), Point3::new(s, 0.0, 0.0));
    IsoTetra {
        vertices: [pa, pb, pc, rotate_about(pa, pb, pc, PI / 3.0)],
        case: IsoCase::TwoSharedBases,
        variant: "aboutBase",
    }
}

pub fn boundary_family() -> BoundaryFamily {
    let deltas: Vec<f64> = (1..=6).map(|i| 10f64.powi(-i)).collect();
    let max_dihedrals: Vec<f64> = deltas.iter().map(|&d| check_big_dihedral(&shared_bases_boundary(d)).0).collect();
    let final_gap = max_dihedrals.last().unwrap() - PI / 3.0;
    BoundaryFamily { deltas, max_dihedrals, final_gap }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BigDihedralReport {
    pub schema_version: u32,
    pub angle_unit: &'static str,
    pub seed: u64,
    pub samples_per_case: usize,
    pub bound: f64,
    pub cases: Vec<CaseStats>,
    pub boundary: BoundaryFamily,
    pub total_violations: usize,
}

impl BigDihedralReport {
    pub fn passed(&self) -> bool {
        self.total_violations == 0
    }

    pub fn in_degrees(mut self) -> Self {
        let k = 180.0 / PI;
        self.angle_unit = "degrees";
        self.bound *= k;
        for c in &mut self.cases {
            c.min_max_dihedral *= k;
            c.max_max_dihedral *= k;
            for x in &mut c.counterexamples {
                x.max_base_dihedral *= k;
            }
        }
        for d in &mut self.boundary.max_dihedrals {
            *d *= k;
        }
        self.boundary.final_gap *= k;
        self
    }
}

/// Runs `cfg.count` samples of every configured case. Counterexamples are
/// kept (up to 100 per group) rather than aborting the run.
pub fn run_big_dihedral(cfg: &SampleConfig) -> Result<BigDihedralReport> {
    cfg.check()?;
    let mut cases = Vec::new();
    for &case in &cfg.cases {
        let results: Vec<(IsoTetra, f64, bool)> = (0..cfg.count)
            .into_par_iter()
            .map(|i| {
                let t = sample_iso_tetra(cfg, case, i)?;
                let (m, ok) = check_big_dihedral(&t);
                Ok((t, m, ok))
            })
            .collect::<Result<_>>()?;
        let groups: &[bool] = if case.requires_obtuse_base() { &[true] } else { &[true, false] };
        for &obtuse in groups {
            let mut stats = CaseStats {
                case,
                obtuse_base: obtuse,
                samples: 0,
                violations: 0,
                min_max_dihedral: f64::INFINITY,
                max_max_dihedral: f64::NEG_INFINITY,
                counterexamples: Vec::new(),
            };
            for (i, (t, m, ok)) in results.iter().enumerate() {
                if draws_obtuse(case, i) != obtuse {
                    continue;
                }
                stats.samples += 1;
                stats.min_max_dihedral = stats.min_max_dihedral.min(*m);
                stats.max_max_dihedral = stats.max_max_dihedral.max(*m);
                if !ok {
                    stats.violations += 1;
                    if stats.counterexamples.len() < 100 {
                        stats.counterexamples.push(Counterexample { index: i, max_base_dihedral: *m, tetra: t.clone() });
                    }
                }
            }
            cases.push(stats);
        }
    }
    let total_violations = cases.iter().map(|c| c.violations).sum();
    Ok(BigDihedralReport {
        schema_version: SCHEMA_VERSION,
        angle_unit: "radians",
        seed: cfg.seed,
        samples_per_case: cfg.count,
        bound: PI / 3.0,
        cases,
        boundary: boundary_family(),
        total_violations,
    })
}

/// One configuration of the projection lemma: triangle `T = (0, e, q)` with
/// `e = (1, 0, 0)`, lying in a plane through the `x`-axis at angle `psi` to
/// the `xy` plane, whose projection onto that plane has its apex at
/// `(qx, qy)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ProjectionSample {
    pub qx: f64,
    pub qy: f64,
    pub psi: f64,
    pub projected_angle: f64,
    pub largest_angle: f64,
}

impl ProjectionSample {
    pub fn new(qx: f64, qy: f64, psi: f64) -> Result<Self> {
        let flat = PlanarTriangle::new(Point3::ORIGIN, Point3::new(1.0, 0.0, 0.0), Point3::new(qx, qy, 0.0))?;
        let q = Point3::new(qx, qy, qy * psi.tan());
        let t = PlanarTriangle::new(Point3::ORIGIN, Point3::new(1.0, 0.0, 0.0), q)?;
        let largest = crate::geom3::triangle_angles(&t).into_iter().fold(0.0, f64::max);
        Ok(ProjectionSample {
            qx,
            qy,
            psi,
            projected_angle: crate::geom3::triangle_angles(&flat)[2],
            largest_angle: largest,
        })
    }

    /// `T` is right or obtuse within `1e-9`.
    pub fn passes(&self) -> bool {
        self.largest_angle >= PI / 2.0 - 1e-9
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ObtuseProjectionReport {
    pub schema_version: u32,
    pub angle_unit: &'static str,
    pub seed: u64,
    pub samples: usize,
    pub counterexample: Option<ProjectionSample>,
    /// Smallest `largest angle − π/2` over the samples.
    pub min_margin: f64,
    /// Plane angle `φ` with projected angle exactly `2π/3`.
    pub boundary: ProjectionSample,
    pub boundary_is_right: bool,
}

impl ObtuseProjectionReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none() && self.boundary_is_right
    }

    pub fn in_degrees(mut self) -> Self {
        let k = 180.0 / PI;
        let conv = |s: &mut ProjectionSample| {
            s.psi *= k;
            s.projected_angle *= k;
            s.largest_angle *= k;
        };
        self.angle_unit = "degrees";
        self.min_margin *= k;
        conv(&mut self.boundary);
        if let Some(c) = self.counterexample.as_mut() {
            conv(c);
        }
        self
    }
}

fn draw_projection(rng: &mut ChaCha8Rng) -> Result<ProjectionSample> {
    let ymax = 3f64.sqrt() / 6.0;
    for _ in 0..MAX_REJECTIONS {
        let (x, y): (f64, f64) = (rng.random_range(0.0..1.0), rng.random_range(0.0..ymax));
        if y <= 0.0 {
            continue;
        }
        let (u, v) = (Point3::new(-x, -y, 0.0), Point3::new(1.0 - x, -y, 0.0));
        let angle = (u.dot(v) / (u.norm() * v.norm())).clamp(-1.0, 1.0).acos();
        if angle < 2.0 * PI / 3.0 {
            continue;
        }
        let psi = rng.random_range(0.0..PHI);
        return ProjectionSample::new(x, y, psi);
    }
    Err(Error::RejectionBudget { case: "obtuseProjection".into(), attempts: MAX_REJECTIONS })
}

pub fn check_obtuse_projection(seed: u64, samples: usize) -> Result<ObtuseProjectionReport> {
    let draws: Vec<ProjectionSample> = (0..samples)
        .into_par_iter()
        .map(|i| draw_projection(&mut sample_rng(seed, 100, i as u64)))
        .collect::<Result<_>>()?;
    let counterexample = draws.iter().find(|s| !s.passes()).copied();
    let min_margin = draws.iter().map(|s| s.largest_angle - PI / 2.0).fold(f64::INFINITY, f64::min);
    let boundary = ProjectionSample::new(0.5, 3f64.sqrt() / 6.0, PHI)?;
    Ok(ObtuseProjectionReport {
        schema_version: SCHEMA_VERSION,
        angle_unit: "radians",
        seed,
        samples,
        counterexample,
        min_margin,
        boundary,
        boundary_is_right: (boundary.largest_angle - PI / 2.0).abs() < 1e-9,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SharpnessDecayReport {
    pub schema_version: u32,
    pub angle_unit: &'static str,
    pub height_factor: f64,
    /// Smallest face sharpness of the seed and of every iterate.
    pub series: Vec<f64>,
    pub non_increasing: bool,
    pub strictly_decreasing: bool,
    /// Largest `child − 2·parent` sharpness over all iterates (≤ 1e-9 is a
    /// pass).
    pub worst_doubling_excess: f64,
    pub doubling_bound_holds: bool,
}

impl SharpnessDecayReport {
    pub fn in_degrees(mut self) -> Self {
        let k = 180.0 / PI;
        self.angle_unit = "degrees";
        for s in &mut self.series {
            *s *= k;
        }
        self.worst_doubling_excess *= k;
        self
    }
}

/// Convex Kleetope iterates of `seed` with the smallest face sharpness of
/// each, checking that every child face is at most twice as sharp as its
/// parent.
pub fn sharpness_decay(seed: &TriangleMesh, iterations: usize, height_factor: f64) -> Result<SharpnessDecayReport> {
    if iterations > 3 {
        return Err(Error::InvalidConfig(format!("at most 3 iterations, got {iterations}")));
    }
    let mut mesh = seed.clone();
    let mut sharp = all_sharpness(&mesh)?;
    let min = |s: &[f64]| s.iter().copied().fold(f64::INFINITY, f64::min);
    let mut series = vec![min(&sharp)];
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..iterations {
        let child = convex_kleetope(&mesh, height_factor)?;
        let child_sharp = all_sharpness(&child)?;
        for (i, s) in child_sharp.iter().enumerate() {
            worst = worst.max(s - 2.0 * sharp[i / 3]);
        }
        series.push(min(&child_sharp));
        mesh = child;
        sharp = child_sharp;
    }
    Ok(SharpnessDecayReport {
        schema_version: SCHEMA_VERSION,
        angle_unit: "radians",
        height_factor,
        non_increasing: series.windows(2).all(|w| w[1] <= w[0]),
        strictly_decreasing: series.windows(2).all(|w| w[1] < w[0]),
        doubling_bound_holds: worst <= 1e-9,
        worst_doubling_excess: if iterations == 0 { 0.0 } else { worst },
        series,
    })
}
