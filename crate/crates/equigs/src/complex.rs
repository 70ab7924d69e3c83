//! Regular 2-dimensional cell complexes with signed incidence, planar
//! frameworks, and the dual graph used by reciprocal diagrams.
//!
//! Sign conventions, fixed once for the whole crate:
//! - an edge `(u, v)` is directed from tail `u` to head `v`, with incidence
//!   signs `[u:e] = -1` and `[v:e] = +1`;
//! - a face stores its boundary as an oriented edge cycle; `[e:f] = +1` when
//!   the cycle traverses `e` tail-to-head, `-1` otherwise;
//! - in sphere-closed complexes every edge bounds exactly two faces with
//!   opposite signs (interior faces counterclockwise, outer face clockwise).

use std::collections::{HashMap, HashSet};
use thiserror::Error;

/// Reference to a cell of the complex, by dimension and index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CellRef {
    Vertex(usize),
    Edge(usize),
    Face(usize),
}

impl CellRef {
    pub fn dim(&self) -> usize {
        match self {
            CellRef::Vertex(_) => 0,
            CellRef::Edge(_) => 1,
            CellRef::Face(_) => 2,
        }
    }

    pub fn index(&self) -> usize {
        match self {
            CellRef::Vertex(i) | CellRef::Edge(i) | CellRef::Face(i) => *i,
        }
    }
}

/// A directed edge between two vertices.
#[derive(Clone, Debug)]
pub struct Edge {
    pub id: String,
    pub tail: usize,
    pub head: usize,
}

/// A 2-cell given by its oriented boundary cycle.
#[derive(Clone, Debug)]
pub struct Face {
    pub id: String,
    /// `(edge index, sign)` pairs in cyclic order; sign +1 means the cycle
    /// traverses the edge tail-to-head.
    pub cycle: Vec<(usize, i8)>,
    pub outer: bool,
}

/// A finite 2-dimensional cell complex with a signed incidence relation.
///
/// Immutable after construction; the per-dimension orderings of `vertices`,
/// `edges` and `faces` fix the chain-basis order everywhere downstream.
#[derive(Clone, Debug)]
pub struct CellComplex {
    vertex_ids: Vec<String>,
    edges: Vec<Edge>,
    faces: Vec<Face>,
    /// Per edge: the faces containing it, with their `[e:f]` signs.
    edge_faces: Vec<Vec<(usize, i8)>>,
}

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("duplicate cell id {0:?}")]
    DuplicateId(String),
    #[error("edge {edge:?} references unknown vertex {vertex:?}")]
    UnknownVertex { edge: String, vertex: String },
    #[error("face {face:?} references unknown edge {edge:?}")]
    UnknownEdge { face: String, edge: String },
    #[error("edge {edge:?} is a self-loop")]
    SelfLoop { edge: String },
    #[error("face {face:?} has a bad cycle: {reason}")]
    BadCycle { face: String, reason: String },
    #[error("edge {edge:?} lies in {count} faces")]
    DanglingEdge { edge: String, count: usize },
    #[error("edge {edge:?} is traversed the same way by both of its faces")]
    NotOrientable { edge: String },
    #[error("not a sphere: |V| - |E| + |F| = {chi}, expected 2")]
    EulerMismatch { chi: i64 },
    #[error("underlying graph is not connected")]
    Disconnected,
    #[error("sphere-closed input needs exactly one outer face, found {0}")]
    OuterFaceCount(usize),
    #[error("complex fails signed-incidence validation: {0}")]
    NonRegular(String),
    #[error("edge {edge:?} has coincident endpoints")]
    DegenerateEdge { edge: String },
    #[error("vertex {vertex:?} has a non-finite coordinate")]
    BadCoordinate { vertex: String },
}

impl BuildError {
    /// Stable machine-readable code naming the failure kind.
    pub fn code(&self) -> &'static str {
        match self {
            BuildError::DuplicateId(_) => "DuplicateId",
            BuildError::UnknownVertex { .. } => "UnknownVertex",
            BuildError::UnknownEdge { .. } => "UnknownEdge",
            BuildError::SelfLoop { .. } => "SelfLoop",
            BuildError::BadCycle { .. } => "BadCycle",
            BuildError::DanglingEdge { .. } => "DanglingEdge",
            BuildError::NotOrientable { .. } => "NotOrientable",
            BuildError::EulerMismatch { .. } => "NotSphereClosed",
            BuildError::Disconnected => "Disconnected",
            BuildError::OuterFaceCount(_) => "OuterFaceCount",
            BuildError::NonRegular(_) => "NonRegular",
            BuildError::DegenerateEdge { .. } => "DegenerateEdge",
            BuildError::BadCoordinate { .. } => "BadCoordinate",
        }
    }
}

/// Face description accepted by [`build_complex`].
#[derive(Clone, Debug)]
pub struct FaceSpec {
    pub id: String,
    /// Oriented boundary: `(edge id, sign)` with sign +1 for tail-to-head.
    pub cycle: Vec<(String, i8)>,
    pub outer: bool,
}

/// Build a validated cell complex from vertices, directed edges and oriented
/// face cycles. When `faces` is empty the result is an open 1-complex; when
/// faces are present the complex must close up into a sphere.
pub fn build_complex(
    vertices: Vec<String>,
    edges: Vec<(String, String, String)>,
    faces: Vec<FaceSpec>,
) -> Result<CellComplex, BuildError> {
    let mut seen = HashSet::new();
    for id in vertices
        .iter()
        .chain(edges.iter().map(|(id, _, _)| id))
        .chain(faces.iter().map(|f| &f.id))
    {
        if !seen.insert(id.clone()) {
            return Err(BuildError::DuplicateId(id.clone()));
        }
    }

    let vertex_index: HashMap<&str, usize> =
        vertices.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
    let mut built_edges = Vec::with_capacity(edges.len());
    for (id, u, v) in &edges {
        let tail = *vertex_index.get(u.as_str()).ok_or_else(|| BuildError::UnknownVertex {
            edge: id.clone(),
            vertex: u.clone(),
        })?;
        let head = *vertex_index.get(v.as_str()).ok_or_else(|| BuildError::UnknownVertex {
            edge: id.clone(),
            vertex: v.clone(),
        })?;
        if tail == head {
            return Err(BuildError::SelfLoop { edge: id.clone() });
        }
        built_edges.push(Edge { id: id.clone(), tail, head });
    }

    let edge_index: HashMap<&str, usize> =
        built_edges.iter().enumerate().map(|(i, e)| (e.id.as_str(), i)).collect();
    let mut built_faces = Vec::with_capacity(faces.len());
    for spec in &faces {
        let mut cycle = Vec::with_capacity(spec.cycle.len());
        let mut used = HashSet::new();
        for (edge_id, sign) in &spec.cycle {
            let e = *edge_index.get(edge_id.as_str()).ok_or_else(|| BuildError::UnknownEdge {
                face: spec.id.clone(),
                edge: edge_id.clone(),
            })?;
            if !used.insert(e) {
                return Err(BuildError::BadCycle {
                    face: spec.id.clone(),
                    reason: format!("edge {:?} appears twice", edge_id),
                });
            }
            if *sign != 1 && *sign != -1 {
                return Err(BuildError::BadCycle {
                    face: spec.id.clone(),
                    reason: format!("edge {:?} has sign {}, expected +1 or -1", edge_id, sign),
                });
            }
            cycle.push((e, *sign));
        }
        if cycle.len() < 2 {
            return Err(BuildError::BadCycle {
                face: spec.id.clone(),
                reason: "cycle has fewer than two edges".into(),
            });
        }
        // Walk the cycle: each signed edge must start where the previous ended.
        let endpoints = |&(e, s): &(usize, i8)| {
            let edge = &built_edges[e];
            if s > 0 { (edge.tail, edge.head) } else { (edge.head, edge.tail) }
        };
        for k in 0..cycle.len() {
            let (_, end) = endpoints(&cycle[k]);
            let (next_start, _) = endpoints(&cycle[(k + 1) % cycle.len()]);
            if end != next_start {
                return Err(BuildError::BadCycle {
                    face: spec.id.clone(),
                    reason: format!(
                        "edge {:?} does not chain into {:?}",
                        built_edges[cycle[k].0].id,
                        built_edges[cycle[(k + 1) % cycle.len()].0].id
                    ),
                });
            }
        }
        built_faces.push(Face { id: spec.id.clone(), cycle, outer: spec.outer });
    }

    let complex = CellComplex::from_parts(vertices, built_edges, built_faces);

    for (e, faces) in complex.edge_faces.iter().enumerate() {
        if faces.len() > 2 {
            return Err(BuildError::DanglingEdge {
                edge: complex.edges[e].id.clone(),
                count: faces.len(),
            });
        }
    }

    if !complex.faces.is_empty() {
        complex.check_sphere_closed()?;
    }

    let report = validate(&complex);
    if let Some(first) = report.first() {
        return Err(BuildError::NonRegular(first.to_string()));
    }

    Ok(complex)
}

impl CellComplex {
    /// Assemble a complex from already-indexed parts without validation.
    /// Intended for tests and for deliberately broken inputs fed to
    /// [`validate`]; regular construction goes through [`build_complex`].
    pub fn from_parts(vertex_ids: Vec<String>, edges: Vec<Edge>, faces: Vec<Face>) -> Self {
        let mut edge_faces = vec![Vec::new(); edges.len()];
        for (f, face) in faces.iter().enumerate() {
            for &(e, sign) in &face.cycle {
                edge_faces[e].push((f, sign));
            }
        }
        CellComplex { vertex_ids, edges, faces, edge_faces }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn vertex_id(&self, v: usize) -> &str {
        &self.vertex_ids[v]
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertex_ids.iter().position(|x| x == id)
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|x| x.id == id)
    }

    pub fn face(&self, f: usize) -> &Face {
        &self.faces[f]
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face_index(&self, id: &str) -> Option<usize> {
        self.faces.iter().position(|x| x.id == id)
    }

    pub fn outer_face(&self) -> Option<usize> {
        self.faces.iter().position(|f| f.outer)
    }

    /// `[v:e]`: -1 at the tail, +1 at the head, `None` when not incident.
    pub fn vertex_edge_sign(&self, v: usize, e: usize) -> Option<i8> {
        let edge = &self.edges[e];
        if edge.tail == v {
            Some(-1)
        } else if edge.head == v {
            Some(1)
        } else {
            None
        }
    }

    /// `[e:f]` from the stored face cycle, `None` when not incident.
    pub fn edge_face_sign(&self, e: usize, f: usize) -> Option<i8> {
        self.faces[f].cycle.iter().find(|&&(k, _)| k == e).map(|&(_, s)| s)
    }

    /// Faces containing edge `e`, with their `[e:f]` signs.
    pub fn faces_of_edge(&self, e: usize) -> &[(usize, i8)] {
        &self.edge_faces[e]
    }

    /// Euler characteristic |V| - |E| + |F|.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.face_count() as i64
    }

    /// A complex with faces is treated as a closed sphere; see
    /// [`Self::check_sphere_closed`].
    pub fn is_sphere_closed(&self) -> bool {
        !self.faces.is_empty() && self.check_sphere_closed().is_ok()
    }

    pub(crate) fn check_sphere_closed(&self) -> Result<(), BuildError> {
        let outer = self.faces.iter().filter(|f| f.outer).count();
        if outer != 1 {
            return Err(BuildError::OuterFaceCount(outer));
        }
        for (e, faces) in self.edge_faces.iter().enumerate() {
            if faces.len() != 2 {
                return Err(BuildError::DanglingEdge {
                    edge: self.edges[e].id.clone(),
                    count: faces.len(),
                });
            }
            if faces[0].1 == faces[1].1 {
                return Err(BuildError::NotOrientable { edge: self.edges[e].id.clone() });
            }
        }
        if !self.is_connected() {
            return Err(BuildError::Disconnected);
        }
        let chi = self.euler_characteristic();
        if chi != 2 {
            return Err(BuildError::EulerMismatch { chi });
        }
        Ok(())
    }

    fn is_connected(&self) -> bool {
        if self.vertex_count() == 0 {
            return true;
        }
        let mut adjacency = vec![Vec::new(); self.vertex_count()];
        for edge in &self.edges {
            adjacency[edge.tail].push(edge.head);
            adjacency[edge.head].push(edge.tail);
        }
        let mut seen = vec![false; self.vertex_count()];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// A violation found by [`validate`].
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    /// `[u:e]·[v:e] != -1`; only possible for degenerate raw input.
    DirectedEdges { edge: String },
    /// An edge repeated inside one face cycle, so `[e:f]` is ill-defined.
    AmbiguousIncidence { face: String, edge: String },
    /// `Σ_e [b:e][e:f] != 0` at the given vertex-face pair.
    Regularity { vertex: String, face: String, sum: i64 },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::DirectedEdges { edge } => {
                write!(f, "Directed Edges violated at {edge}")
            }
            Violation::AmbiguousIncidence { face, edge } => {
                write!(f, "incidence [{edge}:{face}] is not single-valued")
            }
            Violation::Regularity { vertex, face, sum } => {
                write!(f, "Regularity violated at ({vertex},{face}): sum = {sum}")
            }
        }
    }
}

/// Check the three signed-incidence axioms, reporting every violation.
/// Never fails: broken complexes produce a non-empty report.
pub fn validate(complex: &CellComplex) -> Vec<Violation> {
    let mut report = Vec::new();
    for edge in complex.edges() {
        if edge.tail == edge.head {
            report.push(Violation::DirectedEdges { edge: edge.id.clone() });
        }
    }
    for face in complex.faces() {
        let mut seen = HashSet::new();
        for &(e, _) in &face.cycle {
            if !seen.insert(e) {
                report.push(Violation::AmbiguousIncidence {
                    face: face.id.clone(),
                    edge: complex.edge(e).id.clone(),
                });
            }
        }
    }
    // Regularity over all vertex-face pairs: Σ_e [b:e][e:f] = 0.
    for (f, face) in complex.faces().iter().enumerate() {
        let mut sums: HashMap<usize, i64> = HashMap::new();
        for &(e, ef_sign) in &face.cycle {
            let edge = complex.edge(e);
            for v in [edge.tail, edge.head] {
                if let Some(ve_sign) = complex.vertex_edge_sign(v, e) {
                    *sums.entry(v).or_insert(0) += (ve_sign as i64) * (ef_sign as i64);
                }
            }
        }
        let mut vertices: Vec<_> = sums.into_iter().collect();
        vertices.sort();
        for (v, sum) in vertices {
            if sum != 0 {
                report.push(Violation::Regularity {
                    vertex: complex.vertex_id(v).to_string(),
                    face: complex.face(f).id.clone(),
                    sum,
                });
            }
        }
    }
    report
}

/// A cell complex realized in the plane.
#[derive(Clone, Debug)]
pub struct Framework {
    pub complex: CellComplex,
    positions: Vec<[f64; 2]>,
}

impl Framework {
    /// Pair a complex with vertex positions, checking finiteness and local
    /// injectivity (`p_u != p_v` across every edge).
    pub fn new(complex: CellComplex, positions: Vec<[f64; 2]>) -> Result<Self, BuildError> {
        assert_eq!(positions.len(), complex.vertex_count(), "one position per vertex");
        for (v, p) in positions.iter().enumerate() {
            if !p[0].is_finite() || !p[1].is_finite() {
                return Err(BuildError::BadCoordinate { vertex: complex.vertex_id(v).to_string() });
            }
        }
        let scale = bounding_scale(&positions);
        for edge in complex.edges() {
            let d = sub(positions[edge.head], positions[edge.tail]);
            if norm(d) <= 1e-14 * scale.max(1.0) {
                return Err(BuildError::DegenerateEdge { edge: edge.id.clone() });
            }
        }
        Ok(Framework { complex, positions })
    }

    pub fn position(&self, v: usize) -> [f64; 2] {
        self.positions[v]
    }

    pub fn positions(&self) -> &[[f64; 2]] {
        &self.positions
    }

    /// Edge vector from tail to head.
    pub fn edge_vector(&self, e: usize) -> [f64; 2] {
        let edge = self.complex.edge(e);
        sub(self.positions[edge.head], self.positions[edge.tail])
    }

    /// Diameter of the bounding box, used to scale geometric tolerances.
    pub fn geometric_scale(&self) -> f64 {
        bounding_scale(&self.positions)
    }
}

fn bounding_scale(positions: &[[f64; 2]]) -> f64 {
    if positions.is_empty() {
        return 1.0;
    }
    let (mut min, mut max) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in positions {
        for k in 0..2 {
            min[k] = min[k].min(p[k]);
            max[k] = max[k].max(p[k]);
        }
    }
    norm(sub(max, min)).max(1e-12)
}

pub(crate) fn sub(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

pub(crate) fn norm(a: [f64; 2]) -> f64 {
    a[0].hypot(a[1])
}

pub(crate) fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// Node-arc view of the dual graph: one node per face, one arc per edge.
#[derive(Clone, Debug)]
pub struct DualGraph {
    pub node_count: usize,
    pub arcs: Vec<DualArc>,
}

#[derive(Clone, Copy, Debug)]
pub struct DualArc {
    pub edge: usize,
    /// The two incident faces with their `[e:f]` signs.
    pub faces: [(usize, i8); 2],
}

#[derive(Debug, Error)]
#[error("framework is not sphere-closed: {0}")]
pub struct NotSphereClosed(#[from] pub BuildError);

/// The dual graph of a sphere-closed framework.
pub fn dual_graph(framework: &Framework) -> Result<DualGraph, NotSphereClosed> {
    let complex = &framework.complex;
    if complex.faces().is_empty() {
        return Err(NotSphereClosed(BuildError::OuterFaceCount(0)));
    }
    complex.check_sphere_closed()?;
    let arcs = (0..complex.edge_count())
        .map(|e| {
            let faces = complex.faces_of_edge(e);
            DualArc { edge: e, faces: [faces[0], faces[1]] }
        })
        .collect();
    Ok(DualGraph { node_count: complex.face_count(), arcs })
}

impl DualGraph {
    /// Breadth-first spanning tree rooted at `root`; returns per-node parent
    /// arc index, or `None` for the root. Panics if the dual graph is
    /// disconnected (ruled out for sphere-closed complexes).
    pub fn bfs_tree(&self, root: usize) -> Vec<Option<usize>> {
        let mut adjacency = vec![Vec::new(); self.node_count];
        for (a, arc) in self.arcs.iter().enumerate() {
            adjacency[arc.faces[0].0].push((arc.faces[1].0, a));
            adjacency[arc.faces[1].0].push((arc.faces[0].0, a));
        }
        let mut parent = vec![None; self.node_count];
        let mut seen = vec![false; self.node_count];
        let mut queue = std::collections::VecDeque::from([root]);
        seen[root] = true;
        while let Some(n) = queue.pop_front() {
            for &(m, a) in &adjacency[n] {
                if !seen[m] {
                    seen[m] = true;
                    parent[m] = Some(a);
                    queue.push_back(m);
                }
            }
        }
        assert!(seen.iter().all(|&s| s), "dual graph is connected");
        parent
    }
}

/// A pair of edges whose straight segments meet outside shared endpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanarityViolation {
    pub edge_a: String,
    pub edge_b: String,
}

/// List all pairs of edges that intersect outside shared endpoints.
/// Exact orientation tests with a tolerance proportional to the framework
/// scale guard against near-degenerate input.
pub fn check_planarity(framework: &Framework) -> Vec<PlanarityViolation> {
    let complex = &framework.complex;
    let scale = framework.geometric_scale();
    let eps = 1e-12 * scale * scale;
    let mut report = Vec::new();
    for a in 0..complex.edge_count() {
        for b in (a + 1)..complex.edge_count() {
            let ea = complex.edge(a);
            let eb = complex.edge(b);
            let shared = [ea.tail, ea.head]
                .iter()
                .filter(|v| **v == eb.tail || **v == eb.head)
                .count();
            let pa = [framework.position(ea.tail), framework.position(ea.head)];
            let pb = [framework.position(eb.tail), framework.position(eb.head)];
            let bad = if shared == 0 {
                segments_intersect(pa, pb, eps)
            } else {
                // Sharing an endpoint: only a collinear overlap reaches
                // outside the shared point.
                collinear_overlap(pa, pb, eps, scale)
            };
            if bad {
                report.push(PlanarityViolation { edge_a: ea.id.clone(), edge_b: eb.id.clone() });
            }
        }
    }
    report
}

fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    cross(sub(b, a), sub(c, a))
}

fn on_segment(a: [f64; 2], b: [f64; 2], p: [f64; 2], eps_len: f64) -> bool {
    p[0] >= a[0].min(b[0]) - eps_len
        && p[0] <= a[0].max(b[0]) + eps_len
        && p[1] >= a[1].min(b[1]) - eps_len
        && p[1] <= a[1].max(b[1]) + eps_len
}

fn segments_intersect(p: [[f64; 2]; 2], q: [[f64; 2]; 2], eps: f64) -> bool {
    let d1 = orient(q[0], q[1], p[0]);
    let d2 = orient(q[0], q[1], p[1]);
    let d3 = orient(p[0], p[1], q[0]);
    let d4 = orient(p[0], p[1], q[1]);
    if ((d1 > eps && d2 < -eps) || (d1 < -eps && d2 > eps))
        && ((d3 > eps && d4 < -eps) || (d3 < -eps && d4 > eps))
    {
        return true;
    }
    let eps_len = eps.sqrt();
    (d1.abs() <= eps && on_segment(q[0], q[1], p[0], eps_len))
        || (d2.abs() <= eps && on_segment(q[0], q[1], p[1], eps_len))
        || (d3.abs() <= eps && on_segment(p[0], p[1], q[0], eps_len))
        || (d4.abs() <= eps && on_segment(p[0], p[1], q[1], eps_len))
}

fn collinear_overlap(p: [[f64; 2]; 2], q: [[f64; 2]; 2], eps: f64, scale: f64) -> bool {
    if orient(p[0], p[1], q[0]).abs() > eps || orient(p[0], p[1], q[1]).abs() > eps {
        return false;
    }
    // Both segments lie on one line: check 1-dimensional interval overlap
    // beyond a single point.
    let dir = sub(p[1], p[0]);
    let dot = |x: [f64; 2]| (x[0] - p[0][0]) * dir[0] + (x[1] - p[0][1]) * dir[1];
    let (a0, a1) = (0.0f64.min(dot(p[1])), 0.0f64.max(dot(p[1])));
    let (b0, b1) = (dot(q[0]).min(dot(q[1])), dot(q[0]).max(dot(q[1])));
    let overlap = a1.min(b1) - a0.max(b0);
    overlap > 1e-12 * scale * scale
}


#[cfg(test)]
mod tests {
    use super::test_complexes::*;
    use super::*;

    #[test]
    fn triangle_sphere_count() {
        let complex = triangle();
        assert_eq!(complex.euler_characteristic(), 2);
        assert!(complex.is_sphere_closed());
        assert!(validate(&complex).is_empty());
    }

    #[test]
    fn single_edge_open_complex() {
        let complex = build_complex(
            vec!["u".into(), "v".into()],
            vec![("e".into(), "u".into(), "v".into())],
            vec![],
        )
        .unwrap();
        assert!(validate(&complex).is_empty());
        assert!(!complex.is_sphere_closed());
        assert_eq!(complex.vertex_edge_sign(0, 0), Some(-1));
        assert_eq!(complex.vertex_edge_sign(1, 0), Some(1));
    }

    #[test]
    fn repeated_edge_in_face_is_bad_cycle() {
        let result = build_complex(
            vec!["a".into(), "b".into(), "c".into(), "d".into()],
            vec![
                ("ab".into(), "a".into(), "b".into()),
                ("bc".into(), "b".into(), "c".into()),
                ("cd".into(), "c".into(), "d".into()),
                ("da".into(), "d".into(), "a".into()),
            ],
            vec![FaceSpec {
                id: "f".into(),
                cycle: vec![("ab".into(), 1), ("ab".into(), 1), ("cd".into(), 1)],
                outer: false,
            }],
        );
        assert!(matches!(result, Err(BuildError::BadCycle { .. })));
    }

    #[test]
    fn non_chaining_cycle_is_bad() {
        let result = build_complex(
            vec!["a".into(), "b".into(), "c".into()],
            vec![
                ("ab".into(), "a".into(), "b".into()),
                ("bc".into(), "b".into(), "c".into()),
                ("ca".into(), "c".into(), "a".into()),
            ],
            vec![FaceSpec {
                id: "f".into(),
                // ca traversed backwards does not chain after ab.
                cycle: vec![("ab".into(), 1), ("ca".into(), -1), ("bc".into(), 1)],
                outer: false,
            }],
        );
        assert!(matches!(result, Err(BuildError::BadCycle { .. })));
    }

    #[test]
    fn validate_flags_directed_edge_violation() {
        // Hand-built self-loop: [u:e] and [v:e] collapse to the same vertex.
        let complex = CellComplex::from_parts(
            vec!["u".into()],
            vec![Edge { id: "e".into(), tail: 0, head: 0 }],
            vec![],
        );
        let report = validate(&complex);
        assert_eq!(report.len(), 1);
        assert_eq!(report[0], Violation::DirectedEdges { edge: "e".into() });
    }

    #[test]
    fn validate_flags_flipped_face_sign() {
        // Flip one [e:f] in the triangle's inner face; regularity must fail
        // exactly where a brute-force sweep over every vertex-face pair says.
        let good = triangle();
        let mut faces: Vec<Face> = good.faces().to_vec();
        faces[0].cycle[1].1 = -1; // flip bc in the inner face
        let broken = CellComplex::from_parts(
            (0..good.vertex_count()).map(|v| good.vertex_id(v).to_string()).collect(),
            good.edges().to_vec(),
            faces,
        );
        let report = validate(&broken);

        let mut expected = Vec::new();
        for f in 0..broken.face_count() {
            for b in 0..broken.vertex_count() {
                let mut sum = 0i64;
                for e in 0..broken.edge_count() {
                    let ve = broken.vertex_edge_sign(b, e).unwrap_or(0) as i64;
                    let ef = broken.edge_face_sign(e, f).unwrap_or(0) as i64;
                    sum += ve * ef;
                }
                if sum != 0 {
                    expected.push((broken.vertex_id(b).to_string(), broken.face(f).id.clone(), sum));
                }
            }
        }
        assert!(!expected.is_empty());
        let got: Vec<_> = report
            .iter()
            .filter_map(|v| match v {
                Violation::Regularity { vertex, face, sum } => {
                    Some((vertex.clone(), face.clone(), *sum))
                }
                _ => None,
            })
            .collect();
        let mut expected_sorted = expected;
        expected_sorted.sort();
        let mut got_sorted = got;
        got_sorted.sort();
        assert_eq!(got_sorted, expected_sorted);
    }

    #[test]
    fn dual_graph_of_triangle() {
        let dual = dual_graph(&triangle_framework()).unwrap();
        assert_eq!(dual.node_count, 2);
        assert_eq!(dual.arcs.len(), 3);
        for arc in &dual.arcs {
            let mut nodes = [arc.faces[0].0, arc.faces[1].0];
            nodes.sort();
            assert_eq!(nodes, [0, 1]);
            assert_eq!(arc.faces[0].1 * arc.faces[1].1, -1);
        }
    }

    #[test]
    fn dual_graph_requires_closure() {
        let complex = build_complex(
            vec!["u".into(), "v".into()],
            vec![("e".into(), "u".into(), "v".into())],
            vec![],
        )
        .unwrap();
        let framework = Framework::new(complex, vec![[0.0, 0.0], [1.0, 0.0]]).unwrap();
        assert!(dual_graph(&framework).is_err());
    }

    #[test]
    fn square_grid_dual_counts() {
        // 2x2 grid: 9 vertices, 12 edges, 4 inner faces + outer.
        let mut vertices = Vec::new();
        for y in 0..3 {
            for x in 0..3 {
                vertices.push(format!("v{x}{y}"));
            }
        }
        let mut edges = Vec::new();
        for y in 0..3 {
            for x in 0..2 {
                edges.push((format!("h{x}{y}"), format!("v{x}{y}"), format!("v{}{}", x + 1, y)));
            }
        }
        for y in 0..2 {
            for x in 0..3 {
                edges.push((format!("w{x}{y}"), format!("v{x}{y}"), format!("v{}{}", x, y + 1)));
            }
        }
        let mut faces = Vec::new();
        for y in 0..2 {
            for x in 0..2 {
                faces.push(FaceSpec {
                    id: format!("f{x}{y}"),
                    cycle: vec![
                        (format!("h{x}{y}"), 1),
                        (format!("w{}{}", x + 1, y), 1),
                        (format!("h{}{}", x, y + 1), -1),
                        (format!("w{x}{y}"), -1),
                    ],
                    outer: false,
                });
            }
        }
        faces.push(FaceSpec {
            id: "outer".into(),
            cycle: vec![
                ("h00".into(), -1),
                ("w00".into(), 1),
                ("w01".into(), 1),
                ("h02".into(), 1),
                ("h12".into(), 1),
                ("w21".into(), -1),
                ("w20".into(), -1),
                ("h10".into(), -1),
            ],
            outer: true,
        });
        let complex = build_complex(vertices.clone(), edges, faces).unwrap();
        let positions = (0..3)
            .flat_map(|y| (0..3).map(move |x| [x as f64, y as f64]))
            .collect();
        let framework = Framework::new(complex, positions).unwrap();
        let dual = dual_graph(&framework).unwrap();
        assert_eq!(dual.node_count, 5);
        assert_eq!(dual.arcs.len(), 12);
    }

    #[test]
    fn planarity_flags_crossing_diagonals() {
        let complex = build_complex(
            vec!["a".into(), "b".into(), "c".into(), "d".into()],
            vec![
                ("ac".into(), "a".into(), "c".into()),
                ("bd".into(), "b".into(), "d".into()),
            ],
            vec![],
        )
        .unwrap();
        let framework = Framework::new(
            complex,
            vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
        )
        .unwrap();
        let report = check_planarity(&framework);
        assert_eq!(report.len(), 1);
        assert_eq!(report[0].edge_a, "ac");
        assert_eq!(report[0].edge_b, "bd");
    }

    #[test]
    fn planarity_allows_shared_endpoints() {
        let framework = triangle_framework();
        assert!(check_planarity(&framework).is_empty());
    }

    #[test]
    fn planarity_flags_collinear_overlap_at_shared_endpoint() {
        let complex = build_complex(
            vec!["a".into(), "b".into(), "c".into()],
            vec![
                ("ab".into(), "a".into(), "b".into()),
                ("ac".into(), "a".into(), "c".into()),
            ],
            vec![],
        )
        .unwrap();
        // c lies inside segment ab: the two edges overlap along [a, c].
        let framework =
            Framework::new(complex, vec![[0.0, 0.0], [2.0, 0.0], [1.0, 0.0]]).unwrap();
        let report = check_planarity(&framework);
        assert_eq!(report.len(), 1);
    }

    #[test]
    fn degenerate_edge_rejected() {
        let complex = build_complex(
            vec!["u".into(), "v".into()],
            vec![("e".into(), "u".into(), "v".into())],
            vec![],
        )
        .unwrap();
        let result = Framework::new(complex, vec![[1.0, 1.0], [1.0, 1.0]]);
        assert!(matches!(result, Err(BuildError::DegenerateEdge { .. })));
    }
}
