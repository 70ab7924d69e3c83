//! Group actions on complexes and cosheaves: induced cell permutations with
//! orientation signs, the cosheaf representations over the constant, force
//! and position cosheaves, equivariance checks, isotypic projection, and the
//! symmetric Euler characteristic.
//!
//! Orientation signs follow the coherence rule `[gc,c][c:d] = [gc:gd][gd,d]`
//! with vertices always positive: edge signs are induced from the vertex
//! permutation, face signs from edge signs, and the latter must agree over
//! every boundary edge of a face.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::complex::{CellComplex, CellRef, Framework};
use crate::cosheaf::{assemble_boundary, Cosheaf, CosheafMap, HomologyBasis};
use crate::groups::{
    decompose_character, Character, CharacterTable, GroupElement, GroupError, GroupKind,
    GroupSpec, StandardRep,
};
use crate::numerics::{self, max_abs, Mat, Scalar, SubspaceBasis, Tolerance};

#[derive(Debug, Error)]
pub enum ActionError {
    #[error("generator {0:?} is required for this group")]
    MissingGenerator(String),
    #[error("generator {name:?} is not a permutation of the vertices")]
    BadPermutation { name: String },
    #[error("generator relations are violated: {relation}")]
    NotAnAction { relation: String },
    #[error("vertex permutation breaks incidence: {detail}")]
    NotEquivariant { detail: String },
    #[error("realization is not equivariant at vertex {vertex:?}: |τ(g)p - p_g| = {distance:.3e}")]
    NotARealization { vertex: String, distance: f64 },
    #[error("orientation signs are incoherent at face {face:?}")]
    SignIncoherence { face: String },
    #[error("equivariance broken at {count} (cell, element) pairs; first: {first}")]
    EquivarianceBroken { count: usize, first: String },
    #[error(transparent)]
    Group(#[from] GroupError),
}

impl ActionError {
    /// Stable machine-readable code naming the failure kind.
    pub fn code(&self) -> &'static str {
        match self {
            ActionError::MissingGenerator(_) => "MissingGenerator",
            ActionError::BadPermutation { .. } => "BadPermutation",
            ActionError::NotAnAction { .. } => "NotAnAction",
            ActionError::NotEquivariant { .. } => "NotEquivariant",
            ActionError::NotARealization { .. } => "NotARealization",
            ActionError::SignIncoherence { .. } => "SignIncoherence",
            ActionError::EquivarianceBroken { .. } => "EquivarianceBroken",
            ActionError::Group(_) => "BadOrder",
        }
    }
}

/// A dimension- and incidence-preserving action of a finite group on the
/// cells of a complex, with orientation signs `[gc,c]`.
#[derive(Clone, Debug)]
pub struct CellAction {
    pub group: Arc<GroupSpec>,
    pub tau: StandardRep,
    complex: Arc<CellComplex>,
    vertex_perm: Vec<Vec<usize>>,
    edge_perm: Vec<Vec<usize>>,
    face_perm: Vec<Vec<usize>>,
    /// `[ge,e]` per (element, edge).
    edge_signs: Vec<Vec<i8>>,
    /// `[gf,f]` per (element, face).
    face_signs: Vec<Vec<i8>>,
}

impl CellAction {
    pub fn complex(&self) -> &Arc<CellComplex> {
        &self.complex
    }

    pub fn vertex_image(&self, g: usize, v: usize) -> usize {
        self.vertex_perm[g][v]
    }

    pub fn edge_image(&self, g: usize, e: usize) -> usize {
        self.edge_perm[g][e]
    }

    pub fn face_image(&self, g: usize, f: usize) -> usize {
        self.face_perm[g][f]
    }

    pub fn cell_image(&self, g: usize, cell: CellRef) -> CellRef {
        match cell {
            CellRef::Vertex(v) => CellRef::Vertex(self.vertex_perm[g][v]),
            CellRef::Edge(e) => CellRef::Edge(self.edge_perm[g][e]),
            CellRef::Face(f) => CellRef::Face(self.face_perm[g][f]),
        }
    }

    /// Orientation sign `[gc,c]`; +1 on vertices by convention.
    pub fn orientation_sign(&self, g: usize, cell: CellRef) -> i8 {
        match cell {
            CellRef::Vertex(_) => 1,
            CellRef::Edge(e) => self.edge_signs[g][e],
            CellRef::Face(f) => self.face_signs[g][f],
        }
    }

    /// Worst violation of the coherence rule `[gc,c][c:d] = [gc:gd][gd,d]`
    /// over all elements and covering pairs; zero for a valid action.
    pub fn sign_coherence_defect(&self) -> i64 {
        let complex = &self.complex;
        let mut defect = 0i64;
        for g in 0..self.group.order() {
            for (e, edge) in complex.edges().iter().enumerate() {
                let ge = self.edge_perm[g][e];
                for v in [edge.tail, edge.head] {
                    let gv = self.vertex_perm[g][v];
                    let lhs = complex.vertex_edge_sign(v, e).unwrap() as i64;
                    let rhs = (complex.vertex_edge_sign(gv, ge).unwrap() as i64)
                        * (self.edge_signs[g][e] as i64);
                    defect = defect.max((lhs - rhs).abs());
                }
            }
            for (f, face) in complex.faces().iter().enumerate() {
                let gf = self.face_perm[g][f];
                for &(e, sign) in &face.cycle {
                    let ge = self.edge_perm[g][e];
                    let lhs = (self.edge_signs[g][e] as i64) * (sign as i64);
                    let rhs = (complex.edge_face_sign(ge, gf).unwrap() as i64)
                        * (self.face_signs[g][f] as i64);
                    defect = defect.max((lhs - rhs).abs());
                }
            }
        }
        defect
    }

    /// `α(g, α(h, c)) = α(gh, c)` over the full multiplication table.
    pub fn functoriality_holds(&self) -> bool {
        let elements = self.group.elements();
        for (gi, &g) in elements.iter().enumerate() {
            for (hi, &h) in elements.iter().enumerate() {
                let ghi = self.group.element_index(self.group.multiply(g, h));
                for v in 0..self.complex.vertex_count() {
                    if self.vertex_perm[gi][self.vertex_perm[hi][v]] != self.vertex_perm[ghi][v] {
                        return false;
                    }
                }
                for e in 0..self.complex.edge_count() {
                    if self.edge_perm[gi][self.edge_perm[hi][e]] != self.edge_perm[ghi][e] {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Extend vertex permutations of the canonical generators to a full cell
/// action, inducing edge and face permutations and orientation signs, and
/// checking that the realization is equivariant under τ.
pub fn induce_action(
    framework: &Framework,
    group: Arc<GroupSpec>,
    vertex_action: &HashMap<String, Vec<usize>>,
    tau: StandardRep,
) -> Result<CellAction, ActionError> {
    let complex = Arc::new(framework.complex.clone());
    let n = complex.vertex_count();

    let generator_perm = |name: &str| -> Result<Vec<usize>, ActionError> {
        let perm = vertex_action
            .get(name)
            .ok_or_else(|| ActionError::MissingGenerator(name.to_string()))?;
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&v| v >= n || std::mem::replace(&mut seen[v], true)) {
            return Err(ActionError::BadPermutation { name: name.to_string() });
        }
        Ok(perm.clone())
    };

    let identity: Vec<usize> = (0..n).collect();
    // (a ∘ b)(v) = a[b[v]]
    let compose = |a: &[usize], b: &[usize]| -> Vec<usize> { b.iter().map(|&v| a[v]).collect() };

    let rotation = if group.m > 1 { generator_perm("r")? } else { identity.clone() };
    let reflection =
        if group.kind == GroupKind::Dihedral { Some(generator_perm("s")?) } else { None };

    // Generator relations: r^m = ε, s² = ε, s r s = r⁻¹.
    let mut r_power = identity.clone();
    for _ in 0..group.m {
        r_power = compose(&rotation, &r_power);
    }
    if r_power != identity {
        return Err(ActionError::NotAnAction { relation: format!("r^{} != identity", group.m) });
    }
    if let Some(s) = &reflection {
        if compose(s, s) != identity {
            return Err(ActionError::NotAnAction { relation: "s² != identity".into() });
        }
        let mut r_inverse = identity.clone();
        for _ in 0..(group.m - 1) % group.m {
            r_inverse = compose(&rotation, &r_inverse);
        }
        if compose(s, &compose(&rotation, s)) != r_inverse {
            return Err(ActionError::NotAnAction { relation: "s r s != r⁻¹".into() });
        }
    }

    let mut vertex_perm = Vec::with_capacity(group.order());
    for &g in group.elements() {
        let mut perm = identity.clone();
        if g.reflection {
            perm = compose(reflection.as_ref().expect("dihedral group"), &perm);
        }
        for _ in 0..g.rotation {
            perm = compose(&rotation, &perm);
        }
        vertex_perm.push(perm);
    }

    // Realization equivariance: τ(g) p_v = p_{gv} within geometric tolerance.
    let geom_tol = 1e-8 * framework.geometric_scale();
    for (gi, &g) in group.elements().iter().enumerate() {
        for v in 0..n {
            let expected = tau.apply(g, framework.position(v));
            let got = framework.position(vertex_perm[gi][v]);
            let distance = crate::complex::norm(crate::complex::sub(expected, got));
            if distance > geom_tol {
                return Err(ActionError::NotARealization {
                    vertex: complex.vertex_id(v).to_string(),
                    distance,
                });
            }
        }
    }

    // Induce edge permutations and signs [ge,e] = [v:e][gv:ge].
    let mut edge_lookup = HashMap::new();
    for (e, edge) in complex.edges().iter().enumerate() {
        let key = (edge.tail.min(edge.head), edge.tail.max(edge.head));
        edge_lookup.insert(key, e);
    }
    let mut edge_perm = Vec::with_capacity(group.order());
    let mut edge_signs = Vec::with_capacity(group.order());
    for perm in &vertex_perm {
        let mut images = Vec::with_capacity(complex.edge_count());
        let mut signs = Vec::with_capacity(complex.edge_count());
        for edge in complex.edges() {
            let (gu, gv) = (perm[edge.tail], perm[edge.head]);
            let key = (gu.min(gv), gu.max(gv));
            let &ge = edge_lookup.get(&key).ok_or_else(|| ActionError::NotEquivariant {
                detail: format!(
                    "edge {:?} maps to the vertex pair ({}, {}) which spans no edge",
                    edge.id,
                    complex.vertex_id(gu),
                    complex.vertex_id(gv)
                ),
            })?;
            images.push(ge);
            signs.push(if complex.edge(ge).head == gv { 1 } else { -1 });
        }
        edge_perm.push(images);
        edge_signs.push(signs);
    }

    // Induce face permutations by matching boundary edge sets, and face signs
    // [gf,f] = [ge,e][e:f][ge:gf], which must agree over every boundary edge.
    // Planar symmetries fix the unbounded region, so when two faces share an
    // edge set (a two-face sphere) the outer flag disambiguates.
    let mut face_lookup: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
    for (f, face) in complex.faces().iter().enumerate() {
        let mut key: Vec<usize> = face.cycle.iter().map(|&(e, _)| e).collect();
        key.sort_unstable();
        face_lookup.entry(key).or_default().push(f);
    }
    let mut face_perm = Vec::with_capacity(group.order());
    let mut face_signs = Vec::with_capacity(group.order());
    for g in 0..group.order() {
        let mut images = Vec::with_capacity(complex.face_count());
        let mut signs = Vec::with_capacity(complex.face_count());
        for face in complex.faces() {
            let mut key: Vec<usize> = face.cycle.iter().map(|&(e, _)| edge_perm[g][e]).collect();
            key.sort_unstable();
            let gf = face_lookup
                .get(&key)
                .and_then(|candidates| {
                    candidates.iter().copied().find(|&c| complex.face(c).outer == face.outer)
                })
                .ok_or_else(|| ActionError::NotEquivariant {
                    detail: format!("face {:?} maps to an edge set that bounds no face", face.id),
                })?;
            let mut sign = 0i8;
            for &(e, ef_sign) in &face.cycle {
                let ge = edge_perm[g][e];
                let gef_sign = complex
                    .edge_face_sign(ge, gf)
                    .ok_or_else(|| ActionError::SignIncoherence { face: face.id.clone() })?;
                let candidate = edge_signs[g][e] * ef_sign * gef_sign;
                if sign == 0 {
                    sign = candidate;
                } else if sign != candidate {
                    return Err(ActionError::SignIncoherence { face: face.id.clone() });
                }
            }
            images.push(gf);
            signs.push(sign);
        }
        face_perm.push(images);
        face_signs.push(signs);
    }

    let action = CellAction {
        group,
        tau,
        complex,
        vertex_perm,
        edge_perm,
        face_perm,
        edge_signs,
        face_signs,
    };
    debug_assert_eq!(action.sign_coherence_defect(), 0);
    debug_assert!(action.functoriality_holds());
    Ok(action)
}

/// A cosheaf representation: one block `ρ_c(g): stalk(c) -> stalk(gc)` per
/// element and cell, assembling to chain-level block-permutation matrices.
#[derive(Clone, Debug)]
pub struct CosheafRep {
    pub cosheaf: Arc<Cosheaf>,
    pub action: Arc<CellAction>,
    vertex_blocks: Vec<Vec<Mat>>,
    edge_blocks: Vec<Vec<Mat>>,
    face_blocks: Vec<Vec<Mat>>,
}

fn cell_of(i: usize, c: usize) -> CellRef {
    match i {
        0 => CellRef::Vertex(c),
        1 => CellRef::Edge(c),
        _ => CellRef::Face(c),
    }
}

impl CosheafRep {
    fn from_block_fn(
        cosheaf: Arc<Cosheaf>,
        action: Arc<CellAction>,
        block: impl Fn(usize, CellRef) -> Mat,
    ) -> Self {
        let complex = action.complex().clone();
        let order = action.group.order();
        let build = |count: usize, dim: usize| -> Vec<Vec<Mat>> {
            (0..order)
                .map(|g| (0..count).map(|c| block(g, cell_of(dim, c))).collect())
                .collect()
        };
        CosheafRep {
            vertex_blocks: build(complex.vertex_count(), 0),
            edge_blocks: build(complex.edge_count(), 1),
            face_blocks: build(complex.face_count(), 2),
            cosheaf,
            action,
        }
    }

    fn cell_count(&self, i: usize) -> usize {
        match i {
            0 => self.action.complex().vertex_count(),
            1 => self.action.complex().edge_count(),
            _ => self.action.complex().face_count(),
        }
    }

    pub fn block(&self, g: usize, cell: CellRef) -> &Mat {
        match cell {
            CellRef::Vertex(v) => &self.vertex_blocks[g][v],
            CellRef::Edge(e) => &self.edge_blocks[g][e],
            CellRef::Face(f) => &self.face_blocks[g][f],
        }
    }

    /// Chain-level matrix of `ρ_i(g)`: block `(gc, c)` is `ρ_c(g)`.
    pub fn chain_matrix(&self, g: usize, i: usize) -> Mat {
        let dim = self.cosheaf.chain_dim(i);
        let offsets = self.cosheaf.chain_offsets(i);
        let mut out = Mat::zeros(dim, dim);
        for c in 0..self.cell_count(i) {
            let cell = cell_of(i, c);
            let image = self.action.cell_image(g, cell).index();
            let block = self.block(g, cell);
            for r in 0..block.nrows() {
                for s in 0..block.ncols() {
                    out[(offsets[image] + r, offsets[c] + s)] = block[(r, s)];
                }
            }
        }
        out
    }

    /// Character of the degree-`i` chain representation: the trace collects
    /// contributions only from cells fixed by the class representative.
    pub fn chain_character(&self, i: usize) -> Character {
        let values = self
            .action
            .group
            .classes()
            .iter()
            .map(|class| {
                let g = self.action.group.element_index(class.representative);
                let mut trace = Scalar::new(0.0, 0.0);
                for c in 0..self.cell_count(i) {
                    let cell = cell_of(i, c);
                    if self.action.cell_image(g, cell).index() == c {
                        let block = self.block(g, cell);
                        for k in 0..block.nrows().min(block.ncols()) {
                            trace += block[(k, k)];
                        }
                    }
                }
                trace
            })
            .collect();
        Character { values }
    }

    /// Worst chain-level defect over the given degrees of `ρ(ε) = I`,
    /// `ρ(g)ρ(h) = ρ(gh)` (generators against all elements, which forces the
    /// full homomorphism property), and `ρ(g)∂ = ∂ρ(g)` on generators.
    pub fn equivariance_defect(&self, degrees: &[usize]) -> f64 {
        let group = &self.action.group;
        let mut defect = 0.0f64;
        for &i in degrees {
            let identity = self.chain_matrix(group.element_index(GroupElement::IDENTITY), i);
            let dim = identity.nrows();
            defect = defect.max(max_abs(&(identity - Mat::identity(dim, dim))));
            for gen in group.generators() {
                let gen_mat = self.chain_matrix(group.element_index(gen), i);
                for &h in group.elements() {
                    let h_mat = self.chain_matrix(group.element_index(h), i);
                    let product = &gen_mat * &h_mat;
                    let expected =
                        self.chain_matrix(group.element_index(group.multiply(gen, h)), i);
                    defect = defect.max(max_abs(&(product - expected)));
                }
            }
            if i > 0 {
                let boundary = assemble_boundary(&self.cosheaf, i);
                for gen in group.generators() {
                    let g = group.element_index(gen);
                    let upper = self.chain_matrix(g, i);
                    let lower = self.chain_matrix(g, i - 1);
                    defect = defect.max(max_abs(&(&lower * &boundary - &boundary * &upper)));
                }
            }
        }
        defect
    }
}

/// A `(cell, element)` pair where boundary equivariance fails.
#[derive(Clone, Debug)]
pub struct EquivarianceViolation {
    pub cell: String,
    pub element: GroupElement,
    pub defect: f64,
}

/// Check the representation identities on generators and relations plus
/// boundary equivariance; empty report on success, the failing cells
/// otherwise.
pub fn verify_equivariance(rep: &CosheafRep, tol: &Tolerance) -> Vec<EquivarianceViolation> {
    if rep.equivariance_defect(&[0, 1, 2]) <= tol.abs_for(1.0) {
        return Vec::new();
    }
    // Localize: attribute the boundary commutator defect to source cells.
    let group = &rep.action.group;
    let complex = rep.action.complex().clone();
    let mut report = Vec::new();
    for i in [1usize, 2] {
        let boundary = assemble_boundary(&rep.cosheaf, i);
        let offsets = rep.cosheaf.chain_offsets(i);
        for gen in group.generators() {
            let g = group.element_index(gen);
            let commutator =
                rep.chain_matrix(g, i - 1) * &boundary - &boundary * rep.chain_matrix(g, i);
            for c in 0..rep.cell_count(i) {
                let width = rep.cosheaf.stalk_dim(cell_of(i, c));
                let mut defect = 0.0f64;
                for col in offsets[c]..offsets[c] + width {
                    for row in 0..commutator.nrows() {
                        defect = defect.max(commutator[(row, col)].norm());
                    }
                }
                if defect > tol.abs_for(1.0) {
                    let cell = if i == 1 {
                        complex.edge(c).id.clone()
                    } else {
                        complex.face(c).id.clone()
                    };
                    report.push(EquivarianceViolation { cell, element: gen, defect });
                }
            }
        }
    }
    if report.is_empty() {
        // Failure was in the homomorphism property itself.
        report.push(EquivarianceViolation {
            cell: "(chain level)".into(),
            element: GroupElement::IDENTITY,
            defect: rep.equivariance_defect(&[0, 1, 2]),
        });
    }
    report
}

/// Trivial representation over a constant cosheaf: `ι_c(g) = [gc,c]·I`.
pub fn build_trivial_rep(constant: Arc<Cosheaf>, action: Arc<CellAction>) -> CosheafRep {
    let stalks = constant.clone();
    CosheafRep::from_block_fn(constant, action.clone(), move |g, cell| {
        let dim = stalks.stalk_dim(cell);
        let sign = action.orientation_sign(g, cell) as f64;
        Mat::identity(dim, dim) * Scalar::new(sign, 0.0)
    })
}

/// Standard representation over the constant `ℝ²` cosheaf:
/// `η_c(g) = [gc,c]·τ(g)`.
pub fn build_constant_rep(constant: Arc<Cosheaf>, action: Arc<CellAction>) -> CosheafRep {
    let tau_mats: Vec<Mat> =
        action.group.elements().iter().map(|&g| action.tau.matrix(g).clone()).collect();
    CosheafRep::from_block_fn(constant, action.clone(), move |g, cell| {
        let sign = action.orientation_sign(g, cell) as f64;
        &tau_mats[g] * Scalar::new(sign, 0.0)
    })
}

/// Force cosheaf representation: `τ(g)` on vertex stalks, `+1` on edge
/// stalks (unit compression maps to unit compression). Equivariance against
/// the equilibrium boundary is verified before returning.
pub fn build_force_rep(
    force: Arc<Cosheaf>,
    action: Arc<CellAction>,
    tol: &Tolerance,
) -> Result<CosheafRep, ActionError> {
    let tau_mats: Vec<Mat> =
        action.group.elements().iter().map(|&g| action.tau.matrix(g).clone()).collect();
    let rep = CosheafRep::from_block_fn(force, action, move |g, cell| match cell {
        CellRef::Vertex(_) => tau_mats[g].clone(),
        CellRef::Edge(_) => Mat::identity(1, 1),
        CellRef::Face(_) => Mat::zeros(0, 0),
    });
    ensure_equivariant(rep, tol)
}

/// Position cosheaf representation in the canonical complement bases:
/// `+τ(g)` on face stalks and `+1` on edge stalks for rotations, `−τ(g)` and
/// `−1` for reflections. Equivariance against the assembled boundary of the
/// position cosheaf is verified before returning.
pub fn build_position_rep(
    position: Arc<Cosheaf>,
    action: Arc<CellAction>,
    tol: &Tolerance,
) -> Result<CosheafRep, ActionError> {
    let tau_mats: Vec<Mat> =
        action.group.elements().iter().map(|&g| action.tau.matrix(g).clone()).collect();
    let reflects: Vec<bool> = action.group.elements().iter().map(|g| g.reflection).collect();
    let rep = CosheafRep::from_block_fn(position, action, move |g, cell| {
        let sign = if reflects[g] { -1.0 } else { 1.0 };
        match cell {
            CellRef::Vertex(_) => Mat::zeros(0, 0),
            CellRef::Edge(_) => Mat::identity(1, 1) * Scalar::new(sign, 0.0),
            CellRef::Face(_) => &tau_mats[g] * Scalar::new(sign, 0.0),
        }
    });
    ensure_equivariant(rep, tol)
}

fn ensure_equivariant(rep: CosheafRep, tol: &Tolerance) -> Result<CosheafRep, ActionError> {
    let report = verify_equivariance(&rep, tol);
    if report.is_empty() {
        Ok(rep)
    } else {
        Err(ActionError::EquivarianceBroken {
            count: report.len(),
            first: format!(
                "cell {:?}, element r^{}s^{}, defect {:.3e}",
                report[0].cell,
                report[0].element.rotation,
                report[0].element.reflection as u8,
                report[0].defect
            ),
        })
    }
}

/// A failing face of the commuting cube for an equivariant cosheaf map.
#[derive(Clone, Debug)]
pub struct CubeViolation {
    pub face: &'static str,
    pub degree: usize,
    pub element: GroupElement,
    pub defect: f64,
}

/// Verify all six faces of the equivariance cube for `map` between two
/// represented cosheaves, for every generator and chain degree: the chain
/// map commutes with boundaries, both representations commute with
/// boundaries, and the map intertwines the representations.
pub fn verify_cube(
    map: &CosheafMap,
    dom_rep: &CosheafRep,
    cod_rep: &CosheafRep,
    tol: &Tolerance,
) -> Vec<CubeViolation> {
    let group = &dom_rep.action.group;
    let cutoff = tol.abs_for(1.0);
    let mut report = Vec::new();
    let mut push = |face: &'static str, degree: usize, element: GroupElement, defect: f64| {
        if defect > cutoff {
            report.push(CubeViolation { face, degree, element, defect });
        }
    };
    for i in [1usize, 2] {
        let dom_boundary = assemble_boundary(&dom_rep.cosheaf, i);
        let cod_boundary = assemble_boundary(&cod_rep.cosheaf, i);
        let map_upper = map.chain_matrix(i);
        let map_lower = map.chain_matrix(i - 1);
        push(
            "chain map",
            i,
            GroupElement::IDENTITY,
            max_abs(&(&map_lower * &dom_boundary - &cod_boundary * &map_upper)),
        );
        for gen in group.generators() {
            let g = group.element_index(gen);
            push(
                "domain representation",
                i,
                gen,
                max_abs(
                    &(dom_rep.chain_matrix(g, i - 1) * &dom_boundary
                        - &dom_boundary * dom_rep.chain_matrix(g, i)),
                ),
            );
            push(
                "codomain representation",
                i,
                gen,
                max_abs(
                    &(cod_rep.chain_matrix(g, i - 1) * &cod_boundary
                        - &cod_boundary * cod_rep.chain_matrix(g, i)),
                ),
            );
            for degree in [i - 1, i] {
                let map_mat = map.chain_matrix(degree);
                push(
                    "intertwining",
                    degree,
                    gen,
                    max_abs(
                        &(&map_mat * dom_rep.chain_matrix(g, degree)
                            - cod_rep.chain_matrix(g, degree) * &map_mat),
                    ),
                );
            }
        }
    }
    report
}

/// Per-irreducible multiplicities of the chain representations.
#[derive(Clone, Debug)]
pub struct IsotypicDecomposition {
    pub table: Arc<CharacterTable>,
    /// `multiplicities[i][j]` = N_i^(j), the number of μ^(j) factors in C_i.
    pub multiplicities: [Vec<u32>; 3],
}

impl IsotypicDecomposition {
    /// Σ_j N_i^(j)·n_j, which must equal dim C_i.
    pub fn degree_dimension(&self, i: usize) -> usize {
        self.multiplicities[i]
            .iter()
            .zip(&self.table.dims)
            .map(|(&n, &d)| n as usize * d)
            .sum()
    }
}

/// Chain-level multiplicities `N_i^(j) = ⟨χ(ρ_i), χ(μ^(j))⟩`, rounded after
/// checking integrality to 1e-6.
pub fn multiplicities(
    rep: &CosheafRep,
    table: &Arc<CharacterTable>,
) -> Result<IsotypicDecomposition, GroupError> {
    let per_degree = |i: usize| -> Result<Vec<u32>, GroupError> {
        let chi = rep.chain_character(i);
        let raw: Vec<Scalar> = table
            .rows
            .iter()
            .map(|row| crate::groups::inner_product(&table.group, &chi, row))
            .collect();
        let mut out = Vec::with_capacity(raw.len());
        for value in &raw {
            let rounded = value.re.round();
            if (value.re - rounded).abs() > 1e-6 || value.im.abs() > 1e-6 || rounded < 0.0 {
                return Err(GroupError::NotIntegral(raw));
            }
            out.push(rounded as u32);
        }
        Ok(out)
    };
    Ok(IsotypicDecomposition {
        table: table.clone(),
        multiplicities: [per_degree(0)?, per_degree(1)?, per_degree(2)?],
    })
}

/// The isotypic projector `P^(j) = (n_j/|G|) Σ_g conj(χ^(j)(g)) ρ_i(g)` on
/// degree-`i` chains: idempotent, with image the μ^(j)-isotypic component.
pub fn isotypic_projector(rep: &CosheafRep, table: &CharacterTable, i: usize, j: usize) -> Mat {
    let group = &rep.action.group;
    let dim = rep.cosheaf.chain_dim(i);
    let mut out = Mat::zeros(dim, dim);
    for &g in group.elements() {
        let chi = table.value_at(j, g).conj();
        out += rep.chain_matrix(group.element_index(g), i) * chi;
    }
    out * Scalar::new(table.dims[j] as f64 / group.order() as f64, 0.0)
}

/// Image of `P^(j)` restricted to the span of homology representatives:
/// project the representatives, orthonormalize, drop null columns.
pub fn isotypic_homology(
    rep: &CosheafRep,
    table: &CharacterTable,
    homology: &HomologyBasis,
    j: usize,
    tol: &Tolerance,
) -> SubspaceBasis {
    if homology.dim() == 0 {
        return SubspaceBasis::empty(homology.representatives.ambient_dim);
    }
    let projector = isotypic_projector(rep, table, homology.degree, j);
    let projected = &projector * &homology.representatives.basis;
    // The restriction of P^(j) to the invariant span of the representatives
    // is again an orthogonal projector, so singular values of the projected
    // basis are 0 or 1; an absolute floor drops the null directions.
    numerics::orthonormal_columns_floor(&projected, tol, tol.abs_for(1.0))
}

/// Restrict the representation to the span of homology representatives and
/// decompose its character. The span is invariant because the
/// representations built here are unitary and both `ker ∂` and `im ∂` are
/// preserved by the group.
pub fn homology_multiplicities(
    rep: &CosheafRep,
    table: &CharacterTable,
    homology: &HomologyBasis,
) -> Result<Vec<u32>, GroupError> {
    if homology.dim() == 0 {
        return Ok(vec![0; table.irrep_count()]);
    }
    let basis = &homology.representatives.basis;
    let group = &rep.action.group;
    let values = group
        .classes()
        .iter()
        .map(|class| {
            let g = group.element_index(class.representative);
            let restricted = basis.adjoint() * rep.chain_matrix(g, homology.degree) * basis;
            let mut trace = Scalar::new(0.0, 0.0);
            for k in 0..restricted.nrows() {
                trace += restricted[(k, k)];
            }
            trace
        })
        .collect();
    decompose_character(table, &Character { values })
}

/// Per-irreducible alternating sums of multiplicities; the chain and
/// homology sides must agree entrywise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetricEuler {
    pub entries: Vec<i64>,
}

impl SymmetricEuler {
    /// Weighted collapse Σ_j entry_j·n_j, the plain Euler characteristic.
    pub fn weighted_sum(&self, dims: &[usize]) -> i64 {
        self.entries.iter().zip(dims).map(|(&x, &n)| x * n as i64).sum()
    }
}

/// Chain-side symmetric Euler characteristic: `Σ_i (-1)^i N_i^(j)` per j.
pub fn symmetric_euler(decomposition: &IsotypicDecomposition) -> SymmetricEuler {
    let count = decomposition.table.irrep_count();
    let entries = (0..count)
        .map(|j| {
            (0..3usize)
                .map(|i| {
                    let sign = if i % 2 == 0 { 1 } else { -1 };
                    sign * decomposition.multiplicities[i][j] as i64
                })
                .sum()
        })
        .collect();
    SymmetricEuler { entries }
}

/// Homology-side symmetric Euler characteristic from per-degree homology
/// multiplicities.
pub fn symmetric_euler_homology(per_degree: &[Vec<u32>; 3]) -> SymmetricEuler {
    let count = per_degree[0].len();
    let entries = (0..count)
        .map(|j| {
            (0..3usize)
                .map(|i| {
                    let sign = if i % 2 == 0 { 1 } else { -1 };
                    sign * per_degree[i][j] as i64
                })
                .sum()
        })
        .collect();
    SymmetricEuler { entries }
}

/// Build the action described by a sample's group block.
pub fn action_for_sample(
    framework: &Framework,
    sample_group: &crate::samples::SampleGroup,
) -> Result<CellAction, ActionError> {
    let group = Arc::new(crate::groups::build_group_with_axis(
        sample_group.kind,
        sample_group.m,
        sample_group.axis_degrees,
    )?);
    let mut vertex_action = HashMap::new();
    for (name, pairs) in &sample_group.generators {
        let mut perm: Vec<usize> = (0..framework.complex.vertex_count()).collect();
        for (from, to) in pairs {
            let from =
                framework.complex.vertex_index(from).ok_or_else(|| ActionError::NotEquivariant {
                    detail: format!("generator {name:?} names unknown vertex {from:?}"),
                })?;
            let to =
                framework.complex.vertex_index(to).ok_or_else(|| ActionError::NotEquivariant {
                    detail: format!("generator {name:?} names unknown vertex {to:?}"),
                })?;
            perm[from] = to;
        }
        vertex_action.insert(name.clone(), perm);
    }
    let rep = crate::groups::tau(&group);
    induce_action(framework, group, &vertex_action, rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cosheaf::{homology, ChainComplex};
    use crate::groups::{build_group, character_table, tau};
    use crate::samples;
    use crate::statics;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn sample_action(sample: &samples::Sample) -> (Framework, Arc<CellAction>) {
        let framework = sample.framework().unwrap();
        let action = Arc::new(
            action_for_sample(&framework, sample.group.as_ref().unwrap()).unwrap(),
        );
        (framework, action)
    }

    #[test]
    fn identity_action_is_trivial() {
        let framework = samples::triangle().framework().unwrap();
        let group = Arc::new(build_group(GroupKind::Cyclic, 1).unwrap());
        let rep = tau(&group);
        let action = Arc::new(induce_action(&framework, group, &HashMap::new(), rep).unwrap());
        for e in 0..framework.complex.edge_count() {
            assert_eq!(action.edge_image(0, e), e);
            assert_eq!(action.orientation_sign(0, CellRef::Edge(e)), 1);
        }
        for f in 0..framework.complex.face_count() {
            assert_eq!(action.orientation_sign(0, CellRef::Face(f)), 1);
        }
    }

    #[test]
    fn square_quarter_turn_action() {
        let (framework, action) = sample_action(&samples::square());
        let r = action.group.element_index(GroupElement { rotation: 1, reflection: false });
        let mut v = 0usize;
        let mut orbit = Vec::new();
        for _ in 0..4 {
            orbit.push(v);
            v = action.vertex_image(r, v);
        }
        assert_eq!(v, 0, "vertices form a 4-cycle");
        orbit.sort();
        assert_eq!(orbit, vec![0, 1, 2, 3]);
        for f in 0..framework.complex.face_count() {
            assert_eq!(action.face_image(r, f), f, "both faces are fixed");
        }
        assert_eq!(action.sign_coherence_defect(), 0);
        assert!(action.functoriality_holds());
    }

    #[test]
    fn face_signs_follow_rotation_reflection_rule() {
        for sample in
            [samples::square(), samples::d6_wheel(), samples::d8_star(), samples::d4_grid()]
        {
            let (framework, action) = sample_action(&sample);
            for (gi, g) in action.group.elements().iter().enumerate() {
                for f in 0..framework.complex.face_count() {
                    let expected = if g.reflection { -1 } else { 1 };
                    assert_eq!(
                        action.orientation_sign(gi, CellRef::Face(f)),
                        expected,
                        "sample {} element r^{}s^{} face {}",
                        sample.name,
                        g.rotation,
                        g.reflection as u8,
                        f
                    );
                }
            }
        }
    }

    #[test]
    fn desargues_mirror_fixes_axis_edges() {
        let (framework, action) = sample_action(&samples::desargues());
        let s = action.group.element_index(GroupElement { rotation: 0, reflection: true });
        let fixed: Vec<&str> = (0..framework.complex.edge_count())
            .filter(|&e| action.edge_image(s, e) == e)
            .map(|e| framework.complex.edge(e).id.as_str())
            .collect();
        assert_eq!(fixed, vec!["C-A", "F-D", "B-E"]);
    }

    #[test]
    fn asymmetric_realization_is_rejected() {
        let sample = samples::square();
        let mut vertices = sample.vertices.clone();
        vertices[0].1 = [-1.3, -1.0];
        let distorted = samples::Sample { vertices, ..sample };
        let framework = distorted.framework().unwrap();
        let group = Arc::new(build_group(GroupKind::Dihedral, 4).unwrap());
        let vertex_action: HashMap<String, Vec<usize>> =
            [("r".to_string(), vec![1, 2, 3, 0]), ("s".to_string(), vec![3, 2, 1, 0])]
                .into_iter()
                .collect();
        let rep = tau(&group);
        assert!(matches!(
            induce_action(&framework, group, &vertex_action, rep),
            Err(ActionError::NotARealization { .. })
        ));
    }

    #[test]
    fn bad_relations_are_rejected() {
        let framework = samples::square().framework().unwrap();
        let group = Arc::new(build_group(GroupKind::Cyclic, 4).unwrap());
        // A 3-cycle cannot satisfy r⁴ = ε.
        let vertex_action: HashMap<String, Vec<usize>> =
            [("r".to_string(), vec![1, 2, 0, 3])].into_iter().collect();
        let rep = tau(&group);
        assert!(matches!(
            induce_action(&framework, group, &vertex_action, rep),
            Err(ActionError::NotAnAction { .. })
        ));
    }

    #[test]
    fn trivial_rep_degree_zero_is_vertex_permutation() {
        let (_, action) = sample_action(&samples::square());
        let constant = Arc::new(Cosheaf::constant(action.complex().clone(), 1));
        let rep = build_trivial_rep(constant, action.clone());
        assert!(verify_equivariance(&rep, &tol()).is_empty());
        let r = action.group.element_index(GroupElement { rotation: 1, reflection: false });
        let alpha0 = rep.chain_matrix(r, 0);
        for v in 0..4 {
            assert_eq!(alpha0[(action.vertex_image(r, v), v)], Scalar::new(1.0, 0.0));
        }
    }

    #[test]
    fn mirror_reverses_some_square_edge() {
        // The rotation preserves the cyclic edge directions of the square,
        // but the mirror must run some edge against its stored direction.
        let (_, action) = sample_action(&samples::square());
        let r = action.group.element_index(GroupElement { rotation: 1, reflection: false });
        let rotation_signs: Vec<i8> =
            (0..4).map(|e| action.orientation_sign(r, CellRef::Edge(e))).collect();
        assert_eq!(rotation_signs, vec![1, 1, 1, 1]);
        let s = action.group.element_index(GroupElement { rotation: 0, reflection: true });
        let mirror_signs: Vec<i8> =
            (0..4).map(|e| action.orientation_sign(s, CellRef::Edge(e))).collect();
        assert!(mirror_signs.contains(&-1));
    }

    #[test]
    fn constant_and_force_reps_are_equivariant_on_all_samples() {
        for sample in samples::all_samples() {
            let Some(group_block) = sample.group.as_ref() else { continue };
            let framework = sample.framework().unwrap();
            let action = Arc::new(action_for_sample(&framework, group_block).unwrap());
            let constant = Arc::new(Cosheaf::constant(action.complex().clone(), 2));
            let eta = build_constant_rep(constant, action.clone());
            assert!(
                verify_equivariance(&eta, &tol()).is_empty(),
                "constant rep fails on {}",
                sample.name
            );
            let force = Arc::new(statics::build_force_cosheaf(&framework).unwrap());
            let rho = build_force_rep(force, action.clone(), &tol()).unwrap();
            assert!(verify_equivariance(&rho, &tol()).is_empty());
        }
    }

    #[test]
    fn force_rep_degree_one_is_plain_permutation() {
        let (framework, action) = sample_action(&samples::d6_wheel());
        let force = Arc::new(statics::build_force_cosheaf(&framework).unwrap());
        let rho = build_force_rep(force, action.clone(), &tol()).unwrap();
        for gi in 0..action.group.order() {
            let mat = rho.chain_matrix(gi, 1);
            for e in 0..framework.complex.edge_count() {
                assert_eq!(mat[(action.edge_image(gi, e), e)], Scalar::new(1.0, 0.0));
            }
        }
    }

    #[test]
    fn position_rep_face_blocks_negate_tau_on_reflections() {
        for sample in [samples::desargues(), samples::d8_star()] {
            let (framework, action) = sample_action(&sample);
            let sequence = statics::build_graphic_statics_sequence(&framework, &tol()).unwrap();
            let rep =
                build_position_rep(sequence.position.clone(), action.clone(), &tol()).unwrap();
            assert!(verify_equivariance(&rep, &tol()).is_empty());
            for (gi, g) in action.group.elements().iter().enumerate() {
                if g.reflection {
                    for f in 0..framework.complex.face_count() {
                        let block = rep.block(gi, CellRef::Face(f));
                        let expected = action.tau.matrix(*g) * Scalar::new(-1.0, 0.0);
                        assert!(max_abs(&(block - expected)) <= 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn cube_commutes_for_graphic_statics_maps() {
        for sample in [samples::desargues(), samples::d6_wheel(), samples::z5_flower()] {
            let (framework, action) = sample_action(&sample);
            let sequence = statics::build_graphic_statics_sequence(&framework, &tol()).unwrap();
            let rho = build_force_rep(sequence.force.clone(), action.clone(), &tol()).unwrap();
            let eta = build_constant_rep(sequence.constant.clone(), action.clone());
            let pos =
                build_position_rep(sequence.position.clone(), action.clone(), &tol()).unwrap();
            assert!(
                verify_cube(&sequence.include, &rho, &eta, &tol()).is_empty(),
                "include cube fails on {}",
                sample.name
            );
            assert!(
                verify_cube(&sequence.project, &eta, &pos, &tol()).is_empty(),
                "project cube fails on {}",
                sample.name
            );
        }
    }

    #[test]
    fn desargues_trivial_multiplicities_match_hand_count() {
        let (framework, action) = sample_action(&samples::desargues());
        let force = Arc::new(statics::build_force_cosheaf(&framework).unwrap());
        let rho = build_force_rep(force, action.clone(), &tol()).unwrap();
        let table = Arc::new(character_table(&action.group));
        let decomposition = multiplicities(&rho, &table).unwrap();
        // Two on-axis vertices contribute one symmetric direction each, two
        // off-axis pairs two each: 2 + 2·2 = 6. Three fixed edges plus three
        // swapped pairs: 3 + 6/2 = 6.
        assert_eq!(decomposition.multiplicities[0][0], 6);
        assert_eq!(decomposition.multiplicities[1][0], 6);
        assert_eq!(decomposition.degree_dimension(0), 12);
        assert_eq!(decomposition.degree_dimension(1), 9);
        let _ = framework;
    }

    #[test]
    fn chain_character_degree_is_dimension() {
        let (_, action) = sample_action(&samples::d8_star());
        let framework = samples::d8_star().framework().unwrap();
        let force = Arc::new(statics::build_force_cosheaf(&framework).unwrap());
        let rho = build_force_rep(force.clone(), action, &tol()).unwrap();
        for i in [0usize, 1] {
            let chi = rho.chain_character(i);
            assert!((chi.degree() - Scalar::new(force.chain_dim(i) as f64, 0.0)).norm() <= 1e-9);
        }
    }

    #[test]
    fn reflection_trace_vanishes_on_vertex_chains() {
        let (_, action) = sample_action(&samples::desargues());
        let framework = samples::desargues().framework().unwrap();
        let force = Arc::new(statics::build_force_cosheaf(&framework).unwrap());
        let rho = build_force_rep(force, action.clone(), &tol()).unwrap();
        let chi = rho.chain_character(0);
        let s_class = action.group.class_of(GroupElement { rotation: 0, reflection: true });
        assert!(chi.values[s_class].norm() <= 1e-12, "trace of a 2D reflection is zero");
    }

    #[test]
    fn projector_algebra_on_desargues_force_chains() {
        let (framework, action) = sample_action(&samples::desargues());
        let force = Arc::new(statics::build_force_cosheaf(&framework).unwrap());
        let rho = build_force_rep(force.clone(), action.clone(), &tol()).unwrap();
        let table = Arc::new(character_table(&action.group));
        let decomposition = multiplicities(&rho, &table).unwrap();
        for i in [0usize, 1] {
            let dim = force.chain_dim(i);
            let mut sum = Mat::zeros(dim, dim);
            for j in 0..table.irrep_count() {
                let p = isotypic_projector(&rho, &table, i, j);
                assert!(max_abs(&(&p * &p - &p)) <= 1e-9, "idempotence degree {i} irrep {j}");
                assert_eq!(
                    numerics::rank(&p, &tol()),
                    decomposition.multiplicities[i][j] as usize * table.dims[j],
                    "projector rank, degree {i} irrep {j}"
                );
                for t in 0..j {
                    let q = isotypic_projector(&rho, &table, i, t);
                    assert!(max_abs(&(&p * &q)) <= 1e-9, "orthogonality ({j},{t})");
                }
                sum += &p;
            }
            assert!(max_abs(&(sum - Mat::identity(dim, dim))) <= 1e-9, "completeness degree {i}");
        }
    }

    #[test]
    fn trivial_group_keeps_everything() {
        let framework = samples::triangle().framework().unwrap();
        let group = Arc::new(build_group(GroupKind::Cyclic, 1).unwrap());
        let rep_tau = tau(&group);
        let action = Arc::new(induce_action(&framework, group, &HashMap::new(), rep_tau).unwrap());
        let force = Arc::new(statics::build_force_cosheaf(&framework).unwrap());
        let rho = build_force_rep(force.clone(), action.clone(), &tol()).unwrap();
        let table = Arc::new(character_table(&action.group));
        let decomposition = multiplicities(&rho, &table).unwrap();
        assert_eq!(decomposition.multiplicities[0][0] as usize, force.chain_dim(0));
        assert_eq!(decomposition.multiplicities[1][0] as usize, force.chain_dim(1));
        let p = isotypic_projector(&rho, &table, 0, 0);
        assert!(max_abs(&(p - Mat::identity(6, 6))) <= 1e-12);
        // The symmetric Euler characteristic collapses to the Maxwell count.
        let euler = symmetric_euler(&decomposition);
        assert_eq!(euler.entries, vec![2 * 3 - 3]);
    }

    #[test]
    fn desargues_symmetric_euler_matches_homology_side() {
        let (framework, action) = sample_action(&samples::desargues());
        let force = Arc::new(statics::build_force_cosheaf(&framework).unwrap());
        let rho = build_force_rep(force.clone(), action.clone(), &tol()).unwrap();
        let table = Arc::new(character_table(&action.group));
        let decomposition = multiplicities(&rho, &table).unwrap();
        let chain_side = symmetric_euler(&decomposition);
        assert_eq!(chain_side.entries[0], 0, "6 - 6 = 0 at the trivial irrep");

        let chain = ChainComplex::assemble(&force).unwrap();
        let per_degree = [
            homology_multiplicities(&rho, &table, &homology(&chain, 0, &tol())).unwrap(),
            homology_multiplicities(&rho, &table, &homology(&chain, 1, &tol())).unwrap(),
            homology_multiplicities(&rho, &table, &homology(&chain, 2, &tol())).unwrap(),
        ];
        assert_eq!(per_degree[1], vec![1, 0], "the single self-stress is mirror-symmetric");
        let homology_side = symmetric_euler_homology(&per_degree);
        assert_eq!(chain_side, homology_side);
        assert_eq!(chain_side.weighted_sum(&table.dims), chain.euler_characteristic());
        let _ = framework;
    }

    #[test]
    fn isotypic_homology_splits_stress_space() {
        let (framework, action) = sample_action(&samples::desargues());
        let force = Arc::new(statics::build_force_cosheaf(&framework).unwrap());
        let rho = build_force_rep(force.clone(), action.clone(), &tol()).unwrap();
        let table = Arc::new(character_table(&action.group));
        let chain = ChainComplex::assemble(&force).unwrap();
        let h1 = homology(&chain, 1, &tol());
        assert_eq!(h1.dim(), 1);
        let symmetric = isotypic_homology(&rho, &table, &h1, 0, &tol());
        let antisymmetric = isotypic_homology(&rho, &table, &h1, 1, &tol());
        assert_eq!(symmetric.dim(), 1);
        assert_eq!(antisymmetric.dim(), 0);
        let _ = framework;
    }
}
