//! Vertex typing of isosceles meshes, domination, diameter and the
//! aggregate audit report.

use std::collections::{BTreeMap, VecDeque};
use std::f64::consts::PI;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom3::{classify_shape, ShapeCategory};
use crate::mesh::{
    all_sharpness, congruence_classes, edge_key, face_shapes, gauss_map, is_convex, self_intersection_check,
    total_angular_defect, ConvexityWitness, Edge, TriangleMesh, CONVEXITY_TOL, SHAPE_TOL,
};

pub const SCHEMA_VERSION: u32 = 1;
/// Search nodes allowed when assigning apexes to equilateral faces.
const APEX_SEARCH_NODES: u64 = 5_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum VertexType {
    Pyramidal,
    Semipyramidal,
    Basic,
    Semibasic,
    Other,
}

impl VertexType {
    pub fn from_counts(apex: usize, base: usize) -> VertexType {
        match (apex, base) {
            (a, 0) if a >= 1 => VertexType::Pyramidal,
            (a, 2) if a >= 1 => VertexType::Semipyramidal,
            (0, 4) => VertexType::Basic,
            (1, 4) => VertexType::Semibasic,
            _ => VertexType::Other,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VertexCensus {
    pub apex_count: usize,
    pub base_count: usize,
    pub vertex_type: VertexType,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VertexTypeReport {
    pub vertices: Vec<VertexCensus>,
    /// Apex vertex of every face.
    pub face_apex: Vec<usize>,
    /// Faces with no intrinsic apex; theirs was chosen by search.
    pub equilateral_faces: Vec<usize>,
    pub equilateral_ambiguity: bool,
    /// No vertex is of type `other` (for some apex choice on the
    /// equilateral faces, if there are any).
    pub well_behaved: bool,
    /// Base edges whose neighbouring face uses the edge as a leg.
    pub unpaired_base_edges: Vec<Edge>,
    pub convex: bool,
    pub monohedral: bool,
}

impl VertexTypeReport {
    pub fn of_type(&self, t: VertexType) -> Vec<usize> {
        (0..self.vertices.len()).filter(|&v| self.vertices[v].vertex_type == t).collect()
    }

    pub fn type_counts(&self) -> BTreeMap<VertexType, usize> {
        let mut c = BTreeMap::new();
        for v in &self.vertices {
            *c.entry(v.vertex_type).or_default() += 1;
        }
        c
    }
}

/// Whether a vertex with `a` apexes and `b` bases so far and `r` undecided
/// incident faces can still end up with one of the four named types.
fn completable(a: usize, b: usize, r: usize) -> bool {
    (0..=r).any(|x| VertexType::from_counts(a + x, b + r - x) != VertexType::Other)
}

struct ApexSearch<'a> {
    m: &'a TriangleMesh,
    order: Vec<usize>,
    apex: Vec<usize>,
    a: Vec<usize>,
    b: Vec<usize>,
    rem: Vec<usize>,
    base: Vec<Option<Edge>>,
    nodes: u64,
}

impl ApexSearch<'_> {
    /// Both faces at every edge of `f` agree on whether it is a base edge.
    fn pairs_up(&self, f: usize, base: Edge) -> bool {
        let face = self.m.face(f);
        (0..3).all(|k| {
            let e = edge_key(face[k], face[(k + 1) % 3]);
            let g = self.m.edge_faces(e.0, e.1).and_then(|fs| fs.iter().copied().find(|&g| g != f));
            match g.and_then(|g| self.base[g]) {
                Some(gb) => (gb == e) == (base == e),
                None => true,
            }
        })
    }

    fn run(&mut self, i: usize) -> bool {
        if i == self.order.len() {
            return true;
        }
        self.nodes += 1;
        if self.nodes > APEX_SEARCH_NODES {
            return false;
        }
        let f = self.order[i];
        let face = self.m.face(f);
        for &v in &face {
            self.rem[v] -= 1;
        }
        for (k, &p) in face.iter().enumerate() {
            let base = edge_key(face[(k + 1) % 3], face[(k + 2) % 3]);
            if !self.pairs_up(f, base) {
                continue;
            }
            for &v in &face {
                if v == p { self.a[v] += 1 } else { self.b[v] += 1 }
            }
            if face.iter().all(|&v| completable(self.a[v], self.b[v], self.rem[v])) {
                self.apex[f] = p;
                self.base[f] = Some(base);
                if self.run(i + 1) {
                    return true;
                }
                self.base[f] = None;
            }
            for &v in &face {
                if v == p { self.a[v] -= 1 } else { self.b[v] -= 1 }
            }
        }
        for &v in &face {
            self.rem[v] += 1;
        }
        false
    }
}

/// Apex and base angle census at every vertex.
///
/// Faces that are equilateral at `rel_tol` get an apex from a backtracking
/// search for an assignment with no vertex of type `other` in which both
/// faces at every edge agree on whether it is a base; if none exists their
/// first corner is used.
pub fn classify_vertices(m: &TriangleMesh, rel_tol: f64) -> Result<VertexTypeReport> {
    m.require_closed()?;
    let shapes = face_shapes(m, rel_tol)?;
    let nv = m.num_vertices();
    let mut apex = vec![usize::MAX; m.num_faces()];
    let mut eq = Vec::new();
    for (f, s) in shapes.iter().enumerate() {
        match (s.category, s.apex) {
            (ShapeCategory::Scalene, _) => return Err(Error::NotIsosceles { face: f }),
            (ShapeCategory::Isosceles, Some(k)) => apex[f] = m.face(f)[k],
            _ => eq.push(f),
        }
    }
    let (mut a, mut b, mut rem) = (vec![0; nv], vec![0; nv], vec![0; nv]);
    for f in 0..m.num_faces() {
        for v in m.face(f) {
            if apex[f] == usize::MAX {
                rem[v] += 1;
            } else if apex[f] == v {
                a[v] += 1;
            } else {
                b[v] += 1;
            }
        }
    }
    let mut order = eq.clone();
    order.sort_by_key(|&f| (m.face(f).iter().min().copied(), f));
    let feasible = (0..nv).all(|v| completable(a[v], b[v], rem[v]));
    let base = (0..m.num_faces())
        .map(|f| {
            let face = m.face(f);
            let k = face.iter().position(|&v| v == apex[f])?;
            Some(edge_key(face[(k + 1) % 3], face[(k + 2) % 3]))
        })
        .collect();
    let mut search = ApexSearch { m, order, apex: apex.clone(), a, b, rem, base, nodes: 0 };
    let found = feasible && search.run(0);
    let mut face_apex = if found { search.apex } else { apex };
    for &f in &eq {
        if !found {
            face_apex[f] = m.face(f)[0];
        }
    }

    let mut census = vec![(0usize, 0usize); nv];
    let mut base_uses: BTreeMap<Edge, usize> = BTreeMap::new();
    for f in 0..m.num_faces() {
        let face = m.face(f);
        for &v in &face {
            if v == face_apex[f] { census[v].0 += 1 } else { census[v].1 += 1 }
        }
        let k = face.iter().position(|&v| v == face_apex[f]).unwrap();
        *base_uses.entry(edge_key(face[(k + 1) % 3], face[(k + 2) % 3])).or_default() += 1;
    }
    let vertices: Vec<VertexCensus> = census
        .iter()
        .map(|&(a, b)| VertexCensus { apex_count: a, base_count: b, vertex_type: VertexType::from_counts(a, b) })
        .collect();
    let well_behaved = vertices.iter().all(|c| c.vertex_type != VertexType::Other);
    Ok(VertexTypeReport {
        vertices,
        face_apex,
        equilateral_ambiguity: !eq.is_empty(),
        equilateral_faces: eq,
        well_behaved,
        unpaired_base_edges: base_uses.into_iter().filter(|&(_, c)| c != 2).map(|(e, _)| e).collect(),
        convex: is_convex(m, CONVEXITY_TOL)?.convex,
        monohedral: congruence_classes(m, rel_tol).len() == 1,
    })
}

/// Every vertex has an even number of base angles and every base edge is a
/// base edge of both its faces.
pub fn base_angle_parity(r: &VertexTypeReport) -> bool {
    r.vertices.iter().all(|c| c.base_count % 2 == 0) && r.unpaired_base_edges.is_empty()
}

/// No vertex with four or more base angles has two or more apex angles.
/// `None` when the mesh is not convex and monohedral, where the statement
/// does not apply.
pub fn few_bases_check(r: &VertexTypeReport) -> Option<bool> {
    (r.convex && r.monohedral).then(|| r.vertices.iter().all(|c| !(c.base_count >= 4 && c.apex_count >= 2)))
}

/// The value `arccos(cos²(π − θ))` bounding the angle between the far sides
/// of two apex angles `θ` that share a side.
pub fn far_side_angle(theta: f64) -> f64 {
    let c = (PI - theta).cos();
    (c * c).acos()
}

/// Dihedral at the edge shared by the two apex faces of a vertex with two
/// apex and two base angles, whose apex angle is obtuse. Only the faces
/// around `vertex` need to be isosceles.
pub fn semipyramidal_dihedral(m: &TriangleMesh, vertex: usize, rel_tol: f64) -> Result<f64> {
    let wrong = |reason: String| Error::WrongVertexType { vertex, reason };
    let star = m.vertex_star(vertex)?;
    let mut apex_faces = Vec::new();
    let mut bases = 0;
    for &f in &star {
        let s = classify_shape(&m.triangle(f)?, rel_tol);
        match (s.category, s.apex) {
            (ShapeCategory::Isosceles, Some(k)) if m.face(f)[k] == vertex => apex_faces.push((f, s.largest_angle)),
            (ShapeCategory::Isosceles, Some(_)) => bases += 1,
            _ => return Err(wrong(format!("incident face {f} is not strictly isosceles"))),
        }
    }
    if apex_faces.len() != 2 || bases != 2 {
        return Err(wrong(format!("{} apex and {bases} base angles, need 2 and 2", apex_faces.len())));
    }
    let (f1, f2) = (apex_faces[0].0, apex_faces[1].0);
    for &(f, theta) in &apex_faces {
        let c = m.corners(f);
        let k = m.face(f).iter().position(|&v| v == vertex).unwrap();
        let at_apex = crate::geom3::angle_at(c[k], c[(k + 1) % 3], c[(k + 2) % 3]);
        if !(at_apex > PI / 2.0) {
            return Err(wrong(format!("apex angle {at_apex} of face {f} is not obtuse (largest {theta})")));
        }
    }
    let shared = m
        .face(f1)
        .into_iter()
        .find(|&w| w != vertex && m.face(f2).contains(&w))
        .ok_or_else(|| wrong("the two apex faces are not adjacent".into()))?;
    m.edge_dihedral(vertex, shared)
}

fn bfs_distances(adj: &[Vec<usize>], s: usize) -> Vec<usize> {
    let mut d = vec![usize::MAX; adj.len()];
    d[s] = 0;
    let mut q = VecDeque::from([s]);
    while let Some(u) = q.pop_front() {
        for &w in &adj[u] {
            if d[w] == usize::MAX {
                d[w] = d[u] + 1;
                q.push_back(w);
            }
        }
    }
    d
}

pub fn eccentricity(adj: &[Vec<usize>], s: usize) -> usize {
    bfs_distances(adj, s).into_iter().max().unwrap_or(0)
}

/// Exact unweighted diameter; `usize::MAX` if disconnected.
pub fn graph_diameter(m: &TriangleMesh) -> usize {
    let adj = m.vertex_neighbors();
    (0..adj.len()).map(|s| eccentricity(&adj, s)).max().unwrap_or(0)
}

/// Every vertex of `dom` has eccentricity at most `3·|dom|`.
pub fn layer_bound_check(m: &TriangleMesh, dom: &[usize]) -> bool {
    let adj = m.vertex_neighbors();
    !dom.is_empty() && dom.iter().all(|&s| eccentricity(&adj, s) <= 3 * dom.len())
}

fn undominated(adj: &[Vec<usize>], set: &[usize]) -> Vec<usize> {
    let mut covered = vec![false; adj.len()];
    for &s in set {
        covered[s] = true;
        for &w in &adj[s] {
            covered[w] = true;
        }
    }
    (0..adj.len()).filter(|&v| !covered[v]).collect()
}

/// The pyramidal and semipyramidal vertices, verified to dominate the graph.
pub fn dominating_set_from_pyramidal(m: &TriangleMesh, r: &VertexTypeReport) -> Result<Vec<usize>> {
    let set: Vec<usize> = (0..r.vertices.len())
        .filter(|&v| matches!(r.vertices[v].vertex_type, VertexType::Pyramidal | VertexType::Semipyramidal))
        .collect();
    let missing = undominated(&m.vertex_neighbors(), &set);
    if missing.is_empty() {
        Ok(set)
    } else {
        Err(Error::DominationFailed { undominated: missing })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DominationResult {
    pub set: Vec<usize>,
    /// False when the budget ran out; `set` then only bounds the minimum.
    pub exact: bool,
}

struct DomSearch<'a> {
    adj: &'a [Vec<usize>],
    count: Vec<usize>,
    chosen: Vec<usize>,
    best: Vec<usize>,
    max_closed: usize,
    deadline: Option<Instant>,
    nodes: u64,
    timed_out: bool,
}

impl DomSearch<'_> {
    fn toggle(&mut self, v: usize, add: bool) {
        for w in std::iter::once(v).chain(self.adj[v].iter().copied()) {
            if add { self.count[w] += 1 } else { self.count[w] -= 1 }
        }
    }

    fn run(&mut self) {
        self.nodes += 1;
        if self.nodes.is_multiple_of(1024) && self.deadline.is_some_and(|d| Instant::now() >= d) {
            self.timed_out = true;
        }
        if self.timed_out {
            return;
        }
        let open: Vec<usize> = (0..self.adj.len()).filter(|&v| self.count[v] == 0).collect();
        if open.is_empty() {
            if self.chosen.len() < self.best.len() {
                self.best = self.chosen.clone();
            }
            return;
        }
        let lower = open.len().div_ceil(self.max_closed);
        if self.chosen.len() + lower >= self.best.len() {
            return;
        }
        // some vertex of N[u] must be chosen
        let u = open[0];
        let mut options: Vec<usize> = std::iter::once(u).chain(self.adj[u].iter().copied()).collect();
        options.sort_by_key(|&w| {
            let gain = std::iter::once(w).chain(self.adj[w].iter().copied()).filter(|&x| self.count[x] == 0).count();
            (std::cmp::Reverse(gain), w)
        });
        for w in options {
            self.toggle(w, true);
            self.chosen.push(w);
            self.run();
            self.chosen.pop();
            self.toggle(w, false);
            if self.timed_out {
                return;
            }
        }
    }
}

fn greedy_dominating(adj: &[Vec<usize>]) -> Vec<usize> {
    let mut covered = vec![false; adj.len()];
    let mut set = Vec::new();
    while covered.iter().any(|c| !c) {
        let gain = |v: usize| std::iter::once(v).chain(adj[v].iter().copied()).filter(|&w| !covered[w]).count();
        let v = (0..adj.len()).max_by_key(|&v| (gain(v), std::cmp::Reverse(v))).unwrap();
        set.push(v);
        covered[v] = true;
        for &w in &adj[v] {
            covered[w] = true;
        }
    }
    set.sort_unstable();
    set
}

/// Minimum dominating set by branch and bound, seeded with a greedy
/// solution.
pub fn min_dominating_set_graph(adj: &[Vec<usize>], budget: Option<Duration>) -> DominationResult {
    if adj.is_empty() {
        return DominationResult { set: Vec::new(), exact: true };
    }
    let mut s = DomSearch {
        adj,
        count: vec![0; adj.len()],
        chosen: Vec::new(),
        best: greedy_dominating(adj),
        max_closed: adj.iter().map(|l| l.len() + 1).max().unwrap(),
        deadline: budget.map(|b| Instant::now() + b),
        nodes: 0,
        timed_out: false,
    };
    s.run();
    let mut set = s.best;
    set.sort_unstable();
    DominationResult { set, exact: !s.timed_out }
}

pub fn min_dominating_set(m: &TriangleMesh, budget: Option<Duration>) -> DominationResult {
    min_dominating_set_graph(&m.vertex_neighbors(), budget)
}

/// First face that is scalene at `rel_tol`.
pub fn scalene_witness(m: &TriangleMesh, rel_tol: f64) -> Result<Option<usize>> {
    Ok(face_shapes(m, rel_tol)?
        .iter()
        .position(|s| s.category == ShapeCategory::Scalene))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AngleStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

impl AngleStats {
    fn of(values: &[f64]) -> Option<AngleStats> {
        if values.is_empty() {
            return None;
        }
        Some(AngleStats {
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            mean: values.iter().sum::<f64>() / values.len() as f64,
        })
    }

    fn scaled(self, k: f64) -> AngleStats {
        AngleStats { min: self.min * k, max: self.max * k, mean: self.mean * k }
    }
}

/// Planar angle at the apex of every face, using the apexes of `r`.
pub fn apex_angles(m: &TriangleMesh, r: &VertexTypeReport) -> Vec<f64> {
    (0..m.num_faces())
        .map(|f| {
            let k = m.face(f).iter().position(|&v| v == r.face_apex[f]).unwrap();
            m.corner_angle(f, k)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VertexTypeCounts {
    pub pyramidal: usize,
    pub semipyramidal: usize,
    pub basic: usize,
    pub semibasic: usize,
    pub other: usize,
}

/// Aggregate audit. Angles are in radians unless `angleUnit` says
/// otherwise; vertex sets are sorted index arrays.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AuditReport {
    pub schema_version: u32,
    pub angle_unit: &'static str,
    pub vertex_count: usize,
    pub edge_count: usize,
    pub face_count: usize,
    pub convex: bool,
    pub convexity_witness: Option<ConvexityWitness>,
    pub self_intersecting_pairs: usize,
    pub congruence_classes: usize,
    pub monohedral: bool,
    pub isosceles: bool,
    pub scalene_witness: Option<usize>,
    pub sharpness_min: f64,
    pub sharpness_max: f64,
    pub defect_total: f64,
    /// Every Gauss arc plus its edge dihedral equals `π` within 1e-9; only
    /// evaluated on convex meshes.
    pub gauss_map_consistent: Option<bool>,
    pub vertex_types: Option<VertexTypeCounts>,
    pub equilateral_ambiguity: Option<bool>,
    pub well_behaved: Option<bool>,
    pub base_angle_parity: Option<bool>,
    pub few_bases: Option<bool>,
    pub apex_angle: Option<AngleStats>,
    pub dominating_set: Option<Vec<usize>>,
    pub domination_verified: Option<bool>,
    pub min_dominating_set: DominationResult,
    pub diameter: usize,
    pub layer_bound: Option<bool>,
}

impl AuditReport {
    pub fn in_degrees(mut self) -> AuditReport {
        let k = 180.0 / PI;
        self.angle_unit = "degrees";
        self.sharpness_min *= k;
        self.sharpness_max *= k;
        self.defect_total *= k;
        self.apex_angle = self.apex_angle.map(|s| s.scaled(k));
        if let Some(ConvexityWitness::ReflexEdge { edge, dihedral }) = self.convexity_witness {
            self.convexity_witness = Some(ConvexityWitness::ReflexEdge { edge, dihedral: dihedral * k });
        }
        self
    }

    /// Audit failures that should make a command exit nonzero.
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.self_intersecting_pairs > 0 {
            out.push(format!("{} self-intersecting face pairs", self.self_intersecting_pairs));
        }
        if self.domination_verified == Some(false) {
            out.push("pyramidal and semipyramidal vertices do not dominate".into());
        }
        if self.base_angle_parity == Some(false) && self.convex && self.monohedral {
            out.push("base angle parity fails on a convex monohedral mesh".into());
        }
        if self.few_bases == Some(false) {
            out.push("a vertex with four or more bases has two or more apexes".into());
        }
        if self.layer_bound == Some(false) {
            out.push("eccentricity exceeds three times the dominating set size".into());
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
pub struct AuditConfig {
    pub rel_tol: f64,
    pub domination_budget: Option<Duration>,
}

impl Default for AuditConfig {
    fn default() -> Self {
        AuditConfig { rel_tol: SHAPE_TOL, domination_budget: Some(Duration::from_secs(10)) }
    }
}

pub fn audit(m: &TriangleMesh, cfg: &AuditConfig) -> Result<AuditReport> {
    m.require_closed()?;
    let convexity = is_convex(m, CONVEXITY_TOL)?;
    let shapes = face_shapes(m, cfg.rel_tol)?;
    let sharp = all_sharpness(m)?;
    let classes = congruence_classes(m, cfg.rel_tol).len();
    let gauss_map_consistent = if convexity.convex {
        let g = gauss_map(m)?;
        let mut ok = true;
        for &(e, arc) in &g.arcs {
            ok &= (arc + m.edge_dihedral(e.0, e.1)? - PI).abs() < 1e-9;
        }
        Some(ok)
    } else {
        None
    };
    let self_intersecting_pairs = if convexity.convex { 0 } else { self_intersection_check(m, 1e-9).len() };
    let report = match classify_vertices(m, cfg.rel_tol) {
        Ok(r) => Some(r),
        Err(Error::NotIsosceles { .. }) => None,
        Err(e) => return Err(e),
    };
    let (mut dominating_set, mut domination_verified, mut layer_bound) = (None, None, None);
    if let Some(r) = report.as_ref().filter(|r| r.well_behaved) {
        match dominating_set_from_pyramidal(m, r) {
            Ok(set) => {
                layer_bound = Some(layer_bound_check(m, &set));
                dominating_set = Some(set);
                domination_verified = Some(true);
            }
            Err(Error::DominationFailed { .. }) => domination_verified = Some(false),
            Err(e) => return Err(e),
        }
    }
    let vertex_types = report.as_ref().map(|r| {
        let c = r.type_counts();
        let get = |t| c.get(&t).copied().unwrap_or(0);
        VertexTypeCounts {
            pyramidal: get(VertexType::Pyramidal),
            semipyramidal: get(VertexType::Semipyramidal),
            basic: get(VertexType::Basic),
            semibasic: get(VertexType::Semibasic),
            other: get(VertexType::Other),
        }
    });
    Ok(AuditReport {
        schema_version: SCHEMA_VERSION,
        angle_unit: "radians",
        vertex_count: m.num_vertices(),
        edge_count: m.num_edges(),
        face_count: m.num_faces(),
        convex: convexity.convex,
        convexity_witness: convexity.witness,
        self_intersecting_pairs,
        congruence_classes: classes,
        monohedral: classes == 1,
        isosceles: shapes.iter().all(|s| s.is_isosceles_or_equilateral()),
        scalene_witness: shapes.iter().position(|s| s.category == ShapeCategory::Scalene),
        sharpness_min: sharp.iter().copied().fold(f64::INFINITY, f64::min),
        sharpness_max: sharp.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        defect_total: total_angular_defect(m)?,
        gauss_map_consistent,
        vertex_types,
        equilateral_ambiguity: report.as_ref().map(|r| r.equilateral_ambiguity),
        well_behaved: report.as_ref().map(|r| r.well_behaved),
        base_angle_parity: report.as_ref().map(base_angle_parity),
        few_bases: report.as_ref().and_then(few_bases_check),
        apex_angle: report.as_ref().and_then(|r| AngleStats::of(&apex_angles(m, r))),
        dominating_set,
        domination_verified,
        min_dominating_set: min_dominating_set(m, cfg.domination_budget),
        diameter: graph_diameter(m),
        layer_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{biarc_hull, bipyramid, gyroelongated_bipyramid};
    use crate::geom3::Point3;
    use crate::hull::convex_hull3;
    use crate::kleetope::{convex_kleetope, spike_kleetope};
    use crate::mesh::fixtures::{octahedron, tetrahedron};

    #[test]
    fn type_table() {
        use VertexType::*;
        assert_eq!(VertexType::from_counts(25, 0), Pyramidal);
        assert_eq!(VertexType::from_counts(2, 2), Semipyramidal);
        assert_eq!(VertexType::from_counts(0, 4), Basic);
        assert_eq!(VertexType::from_counts(1, 4), Semibasic);
        for (a, b) in [(0, 2), (2, 4), (0, 6), (1, 1), (0, 0)] {
            assert_eq!(VertexType::from_counts(a, b), Other);
        }
    }

    #[test]
    fn goldberg_census() {
        let m = gyroelongated_bipyramid(25).unwrap();
        let r = classify_vertices(&m, SHAPE_TOL).unwrap();
        assert_eq!(r.vertices[0], VertexCensus { apex_count: 25, base_count: 0, vertex_type: VertexType::Pyramidal });
        assert_eq!(r.of_type(VertexType::Pyramidal), vec![0, 51]);
        assert_eq!(r.of_type(VertexType::Semibasic).len(), 50);
        assert!(r.well_behaved && !r.equilateral_ambiguity);
        assert_eq!(r.vertices.iter().map(|c| c.apex_count).sum::<usize>(), 100);
        assert_eq!(r.vertices.iter().map(|c| c.base_count).sum::<usize>(), 200);
        assert!(base_angle_parity(&r));
        assert_eq!(few_bases_check(&r), Some(true));
        assert_eq!(dominating_set_from_pyramidal(&m, &r).unwrap(), vec![0, 51]);
        assert_eq!(graph_diameter(&m), 3);
        assert!(layer_bound_check(&m, &[0, 51]));
    }

    #[test]
    fn biarc_and_bipyramid_census() {
        let m = biarc_hull(3, 5).unwrap();
        let r = classify_vertices(&m, SHAPE_TOL).unwrap();
        assert_eq!(r.of_type(VertexType::Semipyramidal), vec![0, 3, 4, 9]);
        assert_eq!(r.of_type(VertexType::Basic).len(), 6);
        let b = bipyramid(8, 1.0).unwrap();
        let r = classify_vertices(&b, SHAPE_TOL).unwrap();
        assert_eq!(r.of_type(VertexType::Pyramidal), vec![8, 9]);
        assert_eq!(r.of_type(VertexType::Basic).len(), 8);
        assert!(base_angle_parity(&classify_vertices(&bipyramid(5, 1.0).unwrap(), SHAPE_TOL).unwrap()));
    }

    #[test]
    fn icosahedron_is_well_behaved_after_apex_search() {
        let m = gyroelongated_bipyramid(5).unwrap();
        let r = classify_vertices(&m, SHAPE_TOL).unwrap();
        assert!(r.equilateral_ambiguity);
        assert_eq!(r.equilateral_faces.len(), 20);
        assert!(r.well_behaved);
        assert!(base_angle_parity(&r));
    }

    #[test]
    fn parity_negative_control() {
        // octahedron with one face's apex forced to a different corner
        let m = bipyramid(8, 1.0).unwrap();
        let mut r = classify_vertices(&m, SHAPE_TOL).unwrap();
        let f = 0;
        let face = m.face(f);
        let old = r.face_apex[f];
        let new = face[0];
        assert_ne!(old, new);
        r.vertices[old].apex_count -= 1;
        r.vertices[old].base_count += 1;
        r.vertices[new].apex_count += 1;
        r.vertices[new].base_count -= 1;
        assert!(!base_angle_parity(&r));
    }

    #[test]
    fn kleetope_of_tetrahedron_has_six_bases() {
        let k = convex_kleetope(&tetrahedron(), 0.5).unwrap();
        let r = classify_vertices(&k, SHAPE_TOL).unwrap();
        assert!(r.convex && r.monohedral);
        for v in 0..4 {
            assert_eq!((r.vertices[v].apex_count, r.vertices[v].base_count), (0, 6));
        }
        assert_eq!(few_bases_check(&r), Some(true));
        assert!(!r.well_behaved);
        let (s, _) = spike_kleetope(&tetrahedron(), Some(10.0)).unwrap();
        let r = classify_vertices(&s, SHAPE_TOL).unwrap();
        assert_eq!(few_bases_check(&r), None);
    }

    #[test]
    fn scalene_faces_are_rejected() {
        let m = TriangleMesh::new(
            vec![
                Point3::new(0.0, 0.0, 0.0),
                Point3::new(3.0, 0.0, 0.0),
                Point3::new(0.0, 4.0, 0.0),
                Point3::new(0.0, 0.0, 1.7),
            ],
            vec![[0, 2, 1], [0, 1, 3], [1, 2, 3], [0, 3, 2]],
        )
        .unwrap();
        assert!(matches!(classify_vertices(&m, SHAPE_TOL), Err(Error::NotIsosceles { .. })));
        assert!(scalene_witness(&m, SHAPE_TOL).unwrap().is_some());
        assert_eq!(scalene_witness(&gyroelongated_bipyramid(5).unwrap(), SHAPE_TOL).unwrap(), None);
    }

    #[test]
    fn far_side_formula() {
        let v = far_side_angle(2.0 * PI / 3.0);
        assert!((v - 0.25f64.acos()).abs() < 1e-15);
        assert!((v - 1.318116071652818).abs() < 1e-12);
        assert!(v > PI - 2.0 * PI / 3.0);
    }

    /// Vertex `v = 0` with apex faces `(v, w, a)` and `(v, w, b)` of apex
    /// angle `θ`, legs 1, and base faces `(v, a, c)`, `(v, b, c)` sharing
    /// the base `vc` of length `√3`. `alpha` opens the apex faces.
    fn semipyramidal_corner(alpha: f64) -> Option<TriangleMesh> {
        let theta = 2.0 * PI / 3.0;
        let (st, ct) = theta.sin_cos();
        let w = Point3::new(1.0, 0.0, 0.0);
        let a = Point3::new(ct, st * alpha.cos(), st * alpha.sin());
        let b = Point3::new(ct, st * alpha.cos(), -st * alpha.sin());
        // c = (cx, cy, 0), |c|² = 3, c·a = 3/2
        let (p, q) = (ct, st * alpha.cos());
        let disc = 3.0 * (p * p + q * q) - 2.25;
        if disc < 0.0 {
            return None;
        }
        let t = 1.5 / (p * p + q * q);
        let s = disc.sqrt() / (p * p + q * q);
        let c = Point3::new(t * p - s * q, t * q + s * p, 0.0);
        let pts = vec![Point3::ORIGIN, w, a, b, c];
        let h = convex_hull3(&pts, 1e-9).ok()?;
        (h.vertex_map.iter().all(Option::is_some) && h.mesh.vertex_star(0).ok()?.len() == 4).then_some(h.mesh)
    }

    #[test]
    fn semipyramidal_dihedral_is_acute() {
        let mut measured = 0;
        for i in 1..60 {
            let alpha = i as f64 * PI / 60.0;
            let Some(m) = semipyramidal_corner(alpha) else { continue };
            match semipyramidal_dihedral(&m, 0, 1e-9) {
                Ok(d) => {
                    assert!(d < PI / 2.0, "alpha {alpha}: {d}");
                    measured += 1;
                }
                Err(Error::WrongVertexType { .. }) => {}
                Err(e) => panic!("{e}"),
            }
        }
        assert!(measured > 0);
    }

    #[test]
    fn semipyramidal_dihedral_rejects_other_vertices() {
        let b = bipyramid(8, 1.0).unwrap();
        assert!(matches!(semipyramidal_dihedral(&b, 0, SHAPE_TOL), Err(Error::WrongVertexType { .. })));
        assert!(matches!(semipyramidal_dihedral(&b, 8, SHAPE_TOL), Err(Error::WrongVertexType { .. })));
    }

    #[test]
    fn domination_and_diameter() {
        let oct = octahedron();
        let r = min_dominating_set(&oct, None);
        assert_eq!((r.set.len(), r.exact), (2, true));
        // brute force: no single vertex dominates
        let adj = oct.vertex_neighbors();
        assert!((0..6).all(|v| !undominated(&adj, &[v]).is_empty()));
        assert_eq!(min_dominating_set(&gyroelongated_bipyramid(9).unwrap(), None).set.len(), 2);
        for n in [3, 7, 12, 30] {
            let b = bipyramid(n, 1.0).unwrap();
            assert!(min_dominating_set(&b, None).set.len() <= 2);
        }
        assert_eq!(graph_diameter(&bipyramid(12, 1.0).unwrap()), 2);
        let fails = dominating_set_from_pyramidal(
            &oct,
            &VertexTypeReport {
                vertices: vec![VertexCensus { apex_count: 0, base_count: 4, vertex_type: VertexType::Basic }; 6],
                face_apex: vec![0; 8],
                equilateral_faces: vec![],
                equilateral_ambiguity: false,
                well_behaved: true,
                unpaired_base_edges: vec![],
                convex: true,
                monohedral: true,
            },
        );
        assert!(matches!(fails, Err(Error::DominationFailed { undominated }) if undominated.len() == 6));
    }

    #[test]
    fn min_domination_matches_brute_force() {
        let k = convex_kleetope(&octahedron(), 0.5).unwrap();
        let adj = k.vertex_neighbors();
        let n = adj.len();
        let brute = (0u32..1 << n)
            .filter(|mask| {
                let set: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
                undominated(&adj, &set).is_empty()
            })
            .map(|m| m.count_ones() as usize)
            .min()
            .unwrap();
        assert_eq!(min_dominating_set(&k, None).set.len(), brute);
    }

    #[test]
    fn audit_report_of_goldberg() {
        let m = gyroelongated_bipyramid(7).unwrap();
        let a = audit(&m, &AuditConfig::default()).unwrap();
        assert_eq!(a.schema_version, SCHEMA_VERSION);
        assert!(a.convex && a.monohedral && a.isosceles);
        assert_eq!(a.gauss_map_consistent, Some(true));
        assert_eq!(a.dominating_set, Some(vec![0, 15]));
        assert!((a.defect_total - 4.0 * PI).abs() < 1e-9);
        assert!(a.failures().is_empty());
        let json = serde_json::to_value(&a).unwrap();
        assert_eq!(json["schemaVersion"], 1);
        assert_eq!(json["vertexTypes"]["pyramidal"], 2);
        let d = a.in_degrees();
        assert!((d.defect_total - 720.0).abs() < 1e-7);
    }
}
