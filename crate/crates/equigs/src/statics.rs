//! Graphic statics proper: the force, constant and position cosheaves of a
//! framework, self-stresses, infinitesimal motions, Maxwell counting, and
//! reciprocal-diagram construction.
//!
//! The force cosheaf has stalks `ℝ²` on vertices and `ℝ` on edges; its
//! assembled degree-1 boundary is the equilibrium matrix, so `H₁` is the
//! space of self-stresses and `H₀` the space of infinitesimal motions. The
//! position cosheaf is the quotient of the constant `ℝ²` cosheaf by the force
//! cosheaf; its `H₂` is the space of parallel reciprocal diagrams. Stress
//! coefficients are positive in compression.

use std::sync::Arc;

use thiserror::Error;

use crate::complex::{dual_graph, BuildError, Framework, NotSphereClosed};
use crate::cosheaf::{
    assemble_boundary, connecting_homomorphism, homology, homology_dims, quotient_cosheaf,
    verify_map, ChainComplex, ConnectingError, Cosheaf, CosheafError, CosheafMap, HomologyBasis,
};
use crate::numerics::{self, Mat, Scalar, SubspaceBasis, Tolerance, Vector};

#[derive(Debug, Error)]
pub enum StaticsError {
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    NotSphereClosed(#[from] NotSphereClosed),
    #[error(transparent)]
    Cosheaf(#[from] CosheafError),
    #[error("cosheaf map failed naturality at {count} covering pairs")]
    MapNotNatural { count: usize },
    #[error("stalk exactness fails at cell {cell}: {sub} + {quotient} != {ambient}")]
    StalkExactness { cell: String, sub: usize, quotient: usize, ambient: usize },
    #[error("Maxwell rule violated: {lhs} != {rhs} (numerics bug)")]
    MaxwellViolation { lhs: i64, rhs: i64 },
    #[error(transparent)]
    Connecting(#[from] ConnectingError),
    #[error("reciprocal positions are not a cycle: residual {0:.3e}")]
    NotACycle(f64),
    #[error("stress is not in equilibrium: closure fails at edge {edge:?} with residual {residual:.3e}")]
    InconsistentStress { edge: String, residual: f64 },
    #[error(transparent)]
    Action(#[from] Box<crate::equivariant::ActionError>),
    #[error(transparent)]
    Group(#[from] crate::groups::GroupError),
    #[error("irreducible {label}: dim H₂𝒫 = {h2_position} but H₁ℱ + translations = {h1_force} + {translations}")]
    IrrepMismatch { label: String, h2_position: usize, h1_force: usize, translations: usize },
    #[error("stress/reciprocal pairing broken at irreducible {label}: round-trip defect {defect:.3e}")]
    PairingBroken { label: String, defect: f64 },
}

/// Edge scalars in equilibrium at every vertex: `∂₁ w = 0` in the force
/// cosheaf. Positive coefficients are compression, scaled by edge length.
#[derive(Clone, Debug)]
pub struct SelfStress {
    /// One coefficient per edge, in the complex's edge order.
    pub coefficients: Vec<Scalar>,
}

/// A realization of the dual graph: one planar position per face, with dual
/// edges parallel to their primal counterparts.
#[derive(Clone, Debug)]
pub struct ReciprocalDiagram {
    /// One coordinate pair per face, in the complex's face order.
    pub positions: Vec<[Scalar; 2]>,
}

/// The force cosheaf of a framework: `ℝ²` vertex stalks, `ℝ` edge stalks,
/// zero face stalks. Both extension maps of an edge send `1` to the same
/// vector `[v:e](p_v − p_u)`, unnormalized, so the assembled `∂₁` is the
/// equilibrium matrix.
pub fn build_force_cosheaf(framework: &Framework) -> Result<Cosheaf, StaticsError> {
    let complex = Arc::new(framework.complex.clone());
    let mut edge_to_tail = Vec::with_capacity(complex.edge_count());
    let mut edge_to_head = Vec::with_capacity(complex.edge_count());
    for e in 0..complex.edge_count() {
        let v = framework.edge_vector(e);
        let len = crate::complex::norm(v);
        if len == 0.0 {
            return Err(StaticsError::Build(BuildError::DegenerateEdge {
                edge: complex.edge(e).id.clone(),
            }));
        }
        // [tail:e](p_tail − p_head) = [head:e](p_head − p_tail) = the edge
        // vector, for the convention [tail:e] = −1, [head:e] = +1.
        let column = numerics::real_mat(2, 1, &[v[0], v[1]]);
        edge_to_tail.push(column.clone());
        edge_to_head.push(column);
    }
    let face_extensions = complex
        .faces()
        .iter()
        .map(|face| face.cycle.iter().map(|_| Mat::zeros(1, 0)).collect())
        .collect();
    Ok(Cosheaf::from_parts(
        complex.clone(),
        vec![2; complex.vertex_count()],
        vec![1; complex.edge_count()],
        vec![0; complex.face_count()],
        edge_to_tail,
        edge_to_head,
        face_extensions,
    )?)
}

/// The short exact sequence `0 → ℱ → ℝ²̄ → 𝒫 → 0` of a sphere-closed
/// framework, with the inclusion φ and quotient projection π.
#[derive(Clone, Debug)]
pub struct GraphicStaticsSequence {
    pub force: Arc<Cosheaf>,
    pub constant: Arc<Cosheaf>,
    pub position: Arc<Cosheaf>,
    /// φ: force → constant. Identity on vertex stalks, the unnormalized edge
    /// vector on edge stalks.
    pub include: CosheafMap,
    /// π: constant → position, orthogonal projection in the canonical
    /// complement bases.
    pub project: CosheafMap,
}

pub fn build_graphic_statics_sequence(
    framework: &Framework,
    tol: &Tolerance,
) -> Result<GraphicStaticsSequence, StaticsError> {
    framework.complex.check_sphere_closed().map_err(NotSphereClosed)?;
    let force = Arc::new(build_force_cosheaf(framework)?);
    let complex = force.complex().clone();
    let constant = Arc::new(Cosheaf::constant(complex.clone(), 2));

    let edge_blocks = (0..complex.edge_count())
        .map(|e| {
            let v = framework.edge_vector(e);
            numerics::real_mat(2, 1, &[v[0], v[1]])
        })
        .collect();
    let include = CosheafMap {
        domain: force.clone(),
        codomain: constant.clone(),
        vertex_blocks: vec![Mat::identity(2, 2); complex.vertex_count()],
        edge_blocks,
        face_blocks: vec![Mat::zeros(2, 0); complex.face_count()],
    };
    let phi_report = verify_map(&include, tol);
    if !phi_report.is_empty() {
        return Err(StaticsError::MapNotNatural { count: phi_report.len() });
    }

    let (position, project) = quotient_cosheaf(&include, tol)?;
    let pi_report = verify_map(&project, tol);
    if !pi_report.is_empty() {
        return Err(StaticsError::MapNotNatural { count: pi_report.len() });
    }

    // Stalk exactness: dim ℱ_c + dim 𝒫_c = dim ℝ²̄_c at every cell.
    for cell in all_cells(&complex) {
        let (sub, ambient, quotient) =
            (force.stalk_dim(cell), constant.stalk_dim(cell), position.stalk_dim(cell));
        if sub + quotient != ambient {
            return Err(StaticsError::StalkExactness {
                cell: cell_name(&complex, cell),
                sub,
                quotient,
                ambient,
            });
        }
    }

    Ok(GraphicStaticsSequence { force, constant, position, include, project })
}

fn all_cells(complex: &crate::complex::CellComplex) -> Vec<crate::complex::CellRef> {
    use crate::complex::CellRef;
    (0..complex.vertex_count())
        .map(CellRef::Vertex)
        .chain((0..complex.edge_count()).map(CellRef::Edge))
        .chain((0..complex.face_count()).map(CellRef::Face))
        .collect()
}

fn cell_name(complex: &crate::complex::CellComplex, cell: crate::complex::CellRef) -> String {
    use crate::complex::CellRef;
    match cell {
        CellRef::Vertex(v) => complex.vertex_id(v).to_string(),
        CellRef::Edge(e) => complex.edge(e).id.clone(),
        CellRef::Face(f) => complex.face(f).id.clone(),
    }
}

/// Basis of the self-stress space `H₁ℱ = ker ∂₁` (faces carry no force data,
/// so there is nothing to quotient).
pub fn self_stresses(framework: &Framework, tol: &Tolerance) -> Result<Vec<SelfStress>, StaticsError> {
    let force = build_force_cosheaf(framework)?;
    let equilibrium = assemble_boundary(&force, 1);
    let kernel = numerics::kernel_basis(&equilibrium, tol);
    Ok((0..kernel.dim())
        .map(|k| SelfStress { coefficients: kernel.basis.column(k).iter().copied().collect() })
        .collect())
}

/// Orthonormal basis of `H₀ℱ`, the cokernel of the equilibrium matrix,
/// interpreted as infinitesimal motions (rigid motions plus mechanisms).
pub fn infinitesimal_motions(
    framework: &Framework,
    tol: &Tolerance,
) -> Result<SubspaceBasis, StaticsError> {
    let force = build_force_cosheaf(framework)?;
    let equilibrium = assemble_boundary(&force, 1);
    let image = numerics::image_basis(&equilibrium, tol);
    let ambient = SubspaceBasis::full(force.chain_dim(0));
    Ok(numerics::quotient_representatives(&ambient, &image, tol)
        .expect("image lies in the chain space"))
}

/// Maxwell counting rule: `dim H₀ℱ − dim H₁ℱ = 2|V| − |E|`.
/// Both sides are returned; a mismatch is a numerics failure, never a
/// modeling state.
pub fn maxwell_check(framework: &Framework, tol: &Tolerance) -> Result<(i64, i64), StaticsError> {
    let force = build_force_cosheaf(framework)?;
    let chain = ChainComplex::assemble(&force)?;
    let dims = homology_dims(&chain, tol);
    let lhs = dims[0] as i64 - dims[1] as i64;
    let rhs = 2 * framework.complex.vertex_count() as i64 - framework.complex.edge_count() as i64;
    if lhs != rhs {
        return Err(StaticsError::MaxwellViolation { lhs, rhs });
    }
    Ok((lhs, rhs))
}

/// `H₂𝒫`, the space of parallel reciprocal diagrams, together with the
/// decoded diagram for each basis cycle.
pub fn reciprocal_space(
    sequence: &GraphicStaticsSequence,
    tol: &Tolerance,
) -> Result<(HomologyBasis, Vec<ReciprocalDiagram>), StaticsError> {
    let chain = ChainComplex::assemble(&sequence.position)?;
    let basis = homology(&chain, 2, tol);
    let diagrams = (0..basis.dim())
        .map(|k| decode_reciprocal(&sequence.position, &basis.representatives.basis.column(k).into_owned()))
        .collect();
    Ok((basis, diagrams))
}

/// Read the face-stalk pairs of a degree-2 position chain as dual positions.
pub fn decode_reciprocal(position: &Cosheaf, chain: &Vector) -> ReciprocalDiagram {
    let offsets = position.chain_offsets(2);
    let positions = offsets
        .iter()
        .map(|&off| [chain[off], chain[off + 1]])
        .collect();
    ReciprocalDiagram { positions }
}

/// Encode dual positions as a degree-2 position chain.
pub fn encode_reciprocal(position: &Cosheaf, diagram: &ReciprocalDiagram) -> Vector {
    let offsets = position.chain_offsets(2);
    let mut chain = Vector::zeros(position.chain_dim(2));
    for (f, &off) in offsets.iter().enumerate() {
        chain[off] = diagram.positions[f][0];
        chain[off + 1] = diagram.positions[f][1];
    }
    chain
}

/// The connecting homomorphism ϑ: a reciprocal diagram maps to the
/// self-stress it scales. Fails with `NotACycle` when the positions violate
/// the parallelism constraint.
pub fn stress_from_reciprocal(
    sequence: &GraphicStaticsSequence,
    diagram: &ReciprocalDiagram,
    tol: &Tolerance,
) -> Result<SelfStress, StaticsError> {
    let chain = encode_reciprocal(&sequence.position, diagram);
    let d2 = assemble_boundary(&sequence.position, 2);
    let residual = if chain.is_empty() { 0.0 } else { (&d2 * &chain).norm() };
    let scale = numerics::max_abs(&d2).max(1.0) * numerics::max_abs_vec(&chain).max(1.0);
    if residual > tol.abs_for(scale) {
        return Err(StaticsError::NotACycle(residual));
    }
    let w = connecting_homomorphism(&sequence.include, &sequence.project, 2, &chain, tol)?;
    Ok(SelfStress { coefficients: w.iter().copied().collect() })
}

/// Integrate a self-stress into a reciprocal diagram over a breadth-first
/// spanning tree of the dual graph, rooted at the outer face with `ξ = 0`.
/// Closure of every non-tree edge is the cycle condition; failure means the
/// input was not in `ker ∂₁`.
pub fn reciprocal_from_stress(
    framework: &Framework,
    stress: &SelfStress,
    tol: &Tolerance,
) -> Result<ReciprocalDiagram, StaticsError> {
    let complex = &framework.complex;
    assert_eq!(stress.coefficients.len(), complex.edge_count());
    let dual = dual_graph(framework)?;
    let root = complex.outer_face().expect("sphere-closed complexes have an outer face");
    let parent = dual.bfs_tree(root);

    let mut positions: Vec<Option<[Scalar; 2]>> = vec![None; complex.face_count()];
    positions[root] = Some([Scalar::new(0.0, 0.0); 2]);

    // Fill positions in BFS order: each tree arc crosses one edge e between
    // parent face f and child face g, with [e:f]·(ξ_f − ξ_g) = w_e·(p_v − p_u).
    let mut pending: Vec<usize> = (0..complex.face_count()).collect();
    while !pending.is_empty() {
        let mut progressed = false;
        pending.retain(|&f| {
            if positions[f].is_some() {
                progressed = true;
                return false;
            }
            let Some(arc_index) = parent[f] else { return true };
            let arc = dual.arcs[arc_index];
            let (other, sign_other) = if arc.faces[0].0 == f { arc.faces[1] } else { arc.faces[0] };
            if let Some(xi) = positions[other] {
                let ev = framework.edge_vector(arc.edge);
                let w = stress.coefficients[arc.edge];
                let sign = Scalar::new(sign_other as f64, 0.0);
                positions[f] = Some([
                    xi[0] - sign * w * Scalar::new(ev[0], 0.0),
                    xi[1] - sign * w * Scalar::new(ev[1], 0.0),
                ]);
                progressed = true;
                false
            } else {
                true
            }
        });
        assert!(progressed, "BFS tree reaches every face");
    }
    let positions: Vec<[Scalar; 2]> = positions.into_iter().map(|p| p.unwrap()).collect();

    // Cycle condition on every edge, tree and non-tree alike.
    let scale = framework.geometric_scale()
        * stress.coefficients.iter().fold(1.0f64, |acc, w| acc.max(w.norm()));
    for arc in &dual.arcs {
        let (f, sf) = arc.faces[0];
        let (g, sg) = arc.faces[1];
        let ev = framework.edge_vector(arc.edge);
        let w = stress.coefficients[arc.edge];
        let mut residual = 0.0f64;
        for k in 0..2 {
            let lhs = Scalar::new(sf as f64, 0.0) * positions[f][k]
                + Scalar::new(sg as f64, 0.0) * positions[g][k];
            residual = residual.max((lhs - w * Scalar::new(ev[k], 0.0)).norm());
        }
        if residual > tol.abs_for(scale) {
            return Err(StaticsError::InconsistentStress {
                edge: complex.edge(arc.edge).id.clone(),
                residual,
            });
        }
    }
    Ok(ReciprocalDiagram { positions })
}

/// Everything the equivariant pipeline produces for one framework: global
/// homology dimensions, the Maxwell count, per-irreducible decompositions of
/// stresses and reciprocal diagrams, and matched basis pairs.
#[derive(Clone, Debug)]
pub struct GraphicStaticsReport {
    pub irrep_labels: Vec<String>,
    pub irrep_dims: Vec<usize>,
    pub h0_force: usize,
    pub h1_force: usize,
    pub h2_position: usize,
    pub h1_position: usize,
    /// `(lhs, rhs)` of the Maxwell rule, equal by construction.
    pub maxwell: (i64, i64),
    /// Chain- and homology-side symmetric Euler tuples of the force cosheaf:
    /// the symmetric Maxwell rule.
    pub euler_chain_force: Vec<i64>,
    pub euler_homology_force: Vec<i64>,
    pub irreps: Vec<IrrepReport>,
}

/// Per-irreducible slice of the graphic statics decomposition.
#[derive(Clone, Debug)]
pub struct IrrepReport {
    pub label: String,
    /// Dimension n_j of the irreducible.
    pub dim: usize,
    /// Chain multiplicities `N_i^(j)` of the force cosheaf, degrees 0..2.
    pub force_chain_multiplicities: [u32; 3],
    pub h1_force_dim: usize,
    pub h2_position_dim: usize,
    /// Dimension of the embedded translation block `(ℝ²)^(j)` inside `H₂𝒫`
    /// (the face-sign twist of τ for reflections).
    pub translation_dim: usize,
    /// Basis of the μ^(j)-symmetric self-stresses.
    pub stresses: Vec<SelfStress>,
    /// Matched reciprocal diagrams: entry k maps to `stresses[k]` under ϑ.
    pub reciprocals: Vec<ReciprocalDiagram>,
    /// Basis of the pure-translation reciprocal block.
    pub translations: Vec<ReciprocalDiagram>,
}

/// Decompose self-stresses and reciprocal diagrams by the irreducible
/// representations of the framework's symmetry group, pairing each
/// μ^(j)-symmetric stress with a reciprocal diagram of the same type via the
/// connecting homomorphism.
pub fn symmetric_graphic_statics(
    framework: &Framework,
    action: &Arc<crate::equivariant::CellAction>,
    tol: &Tolerance,
) -> Result<GraphicStaticsReport, StaticsError> {
    use crate::equivariant as eq;

    let sequence = build_graphic_statics_sequence(framework, tol)?;
    let rho = eq::build_force_rep(sequence.force.clone(), action.clone(), tol)
        .map_err(|e| StaticsError::Action(Box::new(e)))?;
    let position_rep = eq::build_position_rep(sequence.position.clone(), action.clone(), tol)
        .map_err(|e| StaticsError::Action(Box::new(e)))?;
    let table = Arc::new(crate::groups::character_table(&action.group));

    let force_chain = ChainComplex::assemble(&sequence.force)?;
    let position_chain = ChainComplex::assemble(&sequence.position)?;
    let h0_force = homology(&force_chain, 0, tol);
    let h1_force = homology(&force_chain, 1, tol);
    let h2_force = homology(&force_chain, 2, tol);
    let h1_position = homology(&position_chain, 1, tol);
    let h2_position = homology(&position_chain, 2, tol);

    let maxwell = {
        let lhs = h0_force.dim() as i64 - h1_force.dim() as i64;
        let rhs =
            2 * framework.complex.vertex_count() as i64 - framework.complex.edge_count() as i64;
        if lhs != rhs {
            return Err(StaticsError::MaxwellViolation { lhs, rhs });
        }
        (lhs, rhs)
    };

    let force_decomposition =
        eq::multiplicities(&rho, &table).map_err(StaticsError::Group)?;
    let euler_chain_force = eq::symmetric_euler(&force_decomposition);
    let force_homology_mults = [
        eq::homology_multiplicities(&rho, &table, &h0_force).map_err(StaticsError::Group)?,
        eq::homology_multiplicities(&rho, &table, &h1_force).map_err(StaticsError::Group)?,
        eq::homology_multiplicities(&rho, &table, &h2_force).map_err(StaticsError::Group)?,
    ];
    let euler_homology_force = eq::symmetric_euler_homology(&force_homology_mults);

    // Embedded translation block: the constant assignment ξ_f ≡ c for every
    // face, as a subspace of C₂𝒫 (π is the identity on face stalks).
    let face_count = framework.complex.face_count();
    let translations_chain = {
        let mut t = Mat::zeros(sequence.position.chain_dim(2), 2);
        let offsets = sequence.position.chain_offsets(2);
        let normalize = Scalar::new(1.0 / (face_count as f64).sqrt(), 0.0);
        for &off in &offsets {
            t[(off, 0)] = normalize;
            t[(off + 1, 1)] = normalize;
        }
        t
    };

    let mut irreps = Vec::with_capacity(table.irrep_count());
    for j in 0..table.irrep_count() {
        let stress_basis = eq::isotypic_homology(&rho, &table, &h1_force, j, tol);
        let reciprocal_basis = eq::isotypic_homology(&position_rep, &table, &h2_position, j, tol);

        let translation_block = {
            let projector = eq::isotypic_projector(&position_rep, &table, 2, j);
            let projected = &projector * &translations_chain;
            numerics::orthonormal_columns_floor(&projected, tol, tol.abs_for(1.0))
        };

        // Reduced exact sequence per irreducible:
        // 0 -> (ℝ²)^(j) -> H₂^(j)𝒫 -> H₁^(j)ℱ -> 0.
        if reciprocal_basis.dim() != stress_basis.dim() + translation_block.dim() {
            return Err(StaticsError::IrrepMismatch {
                label: table.labels[j].clone(),
                h2_position: reciprocal_basis.dim(),
                h1_force: stress_basis.dim(),
                translations: translation_block.dim(),
            });
        }

        let mut stresses = Vec::new();
        let mut reciprocals = Vec::new();
        for k in 0..stress_basis.dim() {
            let coefficients: Vec<Scalar> = stress_basis.basis.column(k).iter().copied().collect();
            let stress = SelfStress { coefficients };
            let raw = reciprocal_from_stress(framework, &stress, tol)?;
            // Symmetrize the integrated diagram inside its isotypic class;
            // ϑ commutes with the projector, so the pairing is preserved.
            let projector = eq::isotypic_projector(&position_rep, &table, 2, j);
            let projected = &projector * encode_reciprocal(&sequence.position, &raw);
            let diagram = decode_reciprocal(&sequence.position, &projected);
            let back = stress_from_reciprocal(&sequence, &diagram, tol)?;
            let defect = stress
                .coefficients
                .iter()
                .zip(&back.coefficients)
                .fold(0.0f64, |acc, (a, b)| acc.max((a - b).norm()));
            if defect > tol.abs_for(framework.geometric_scale()) {
                return Err(StaticsError::PairingBroken { label: table.labels[j].clone(), defect });
            }
            stresses.push(stress);
            reciprocals.push(diagram);
        }

        let translations = (0..translation_block.dim())
            .map(|k| {
                decode_reciprocal(
                    &sequence.position,
                    &translation_block.basis.column(k).into_owned(),
                )
            })
            .collect();

        irreps.push(IrrepReport {
            label: table.labels[j].clone(),
            dim: table.dims[j],
            force_chain_multiplicities: [
                force_decomposition.multiplicities[0][j],
                force_decomposition.multiplicities[1][j],
                force_decomposition.multiplicities[2][j],
            ],
            h1_force_dim: stress_basis.dim(),
            h2_position_dim: reciprocal_basis.dim(),
            translation_dim: translation_block.dim(),
            stresses,
            reciprocals,
            translations,
        });
    }

    // Isotypic bookkeeping: components sum to the full homology dimensions.
    let stress_sum: usize = irreps.iter().map(|r| r.h1_force_dim).sum();
    let reciprocal_sum: usize = irreps.iter().map(|r| r.h2_position_dim).sum();
    if stress_sum != h1_force.dim() || reciprocal_sum != h2_position.dim() {
        return Err(StaticsError::IrrepMismatch {
            label: "(total)".into(),
            h2_position: reciprocal_sum,
            h1_force: stress_sum,
            translations: h2_position.dim() - h1_force.dim(),
        });
    }

    Ok(GraphicStaticsReport {
        irrep_labels: table.labels.clone(),
        irrep_dims: table.dims.clone(),
        h0_force: h0_force.dim(),
        h1_force: h1_force.dim(),
        h2_position: h2_position.dim(),
        h1_position: h1_position.dim(),
        maxwell,
        euler_chain_force: euler_chain_force.entries,
        euler_homology_force: euler_homology_force.entries,
        irreps,
    })
}

/// Real 2-dimensional reciprocal block spanned by a conjugate pair of
/// complex isotypic bases: the span of real and imaginary parts, as
/// orthonormal real diagrams. Conjugate irreducibles yield the same span.
pub fn merge_conjugate_reciprocals(
    position: &Cosheaf,
    basis: &SubspaceBasis,
    tol: &Tolerance,
) -> Vec<ReciprocalDiagram> {
    if basis.dim() == 0 {
        return Vec::new();
    }
    let mut stacked = Mat::zeros(basis.ambient_dim, 2 * basis.dim());
    for k in 0..basis.dim() {
        for r in 0..basis.ambient_dim {
            let z = basis.basis[(r, k)];
            stacked[(r, 2 * k)] = Scalar::new(z.re, 0.0);
            stacked[(r, 2 * k + 1)] = Scalar::new(z.im, 0.0);
        }
    }
    let merged = numerics::orthonormal_columns_floor(&stacked, tol, tol.abs_for(1.0));
    (0..merged.dim())
        .map(|k| decode_reciprocal(position, &merged.basis.column(k).into_owned()))
        .collect()
}

/// Worst-case parallelism defect of a diagram: `|cross(ξ_f − ξ_g, p_u − p_v)|`
/// normalized by edge length and diagram scale, maximized over edges.
pub fn parallelism_defect(framework: &Framework, diagram: &ReciprocalDiagram) -> f64 {
    let complex = &framework.complex;
    let mut worst = 0.0f64;
    let scale = diagram
        .positions
        .iter()
        .flat_map(|p| p.iter())
        .fold(1.0f64, |acc, z| acc.max(z.norm()));
    for e in 0..complex.edge_count() {
        let faces = complex.faces_of_edge(e);
        if faces.len() != 2 {
            continue;
        }
        let (f, g) = (faces[0].0, faces[1].0);
        let ev = framework.edge_vector(e);
        let len = crate::complex::norm(ev);
        let dx = diagram.positions[f][0] - diagram.positions[g][0];
        let dy = diagram.positions[f][1] - diagram.positions[g][1];
        let cross = dx * Scalar::new(ev[1], 0.0) - dy * Scalar::new(ev[0], 0.0);
        worst = worst.max(cross.norm() / (len * scale));
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::test_complexes::triangle_framework;
    use crate::samples;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn triangle_has_no_self_stress() {
        let framework = triangle_framework();
        assert!(self_stresses(&framework, &tol()).unwrap().is_empty());
    }

    #[test]
    fn triangle_motions_are_rigid_body_only() {
        let framework = triangle_framework();
        assert_eq!(infinitesimal_motions(&framework, &tol()).unwrap().dim(), 3);
    }

    #[test]
    fn triangle_maxwell() {
        let framework = triangle_framework();
        assert_eq!(maxwell_check(&framework, &tol()).unwrap(), (3, 3));
    }

    #[test]
    fn square_cycle_has_one_mechanism() {
        let framework = samples::square().framework().unwrap();
        assert_eq!(infinitesimal_motions(&framework, &tol()).unwrap().dim(), 4);
        assert_eq!(maxwell_check(&framework, &tol()).unwrap(), (4, 4));
        assert!(self_stresses(&framework, &tol()).unwrap().is_empty());
    }

    #[test]
    fn position_cosheaf_shape() {
        let framework = triangle_framework();
        let sequence = build_graphic_statics_sequence(&framework, &tol()).unwrap();
        assert_eq!(sequence.position.chain_dim(0), 0);
        assert_eq!(sequence.position.chain_dim(1), framework.complex.edge_count());
        assert_eq!(sequence.position.chain_dim(2), 2 * framework.complex.face_count());
    }

    #[test]
    fn triangle_reciprocals_are_translations_only() {
        let framework = triangle_framework();
        let sequence = build_graphic_statics_sequence(&framework, &tol()).unwrap();
        let (basis, diagrams) = reciprocal_space(&sequence, &tol()).unwrap();
        assert_eq!(basis.dim(), 2);
        for diagram in &diagrams {
            assert!(parallelism_defect(&framework, diagram) <= 1e-9);
            // Translations: all dual vertices coincide.
            for p in &diagram.positions {
                for k in 0..2 {
                    assert!((p[k] - diagram.positions[0][k]).norm() <= 1e-9);
                }
            }
        }
    }

    #[test]
    fn translation_maps_to_zero_stress() {
        let framework = triangle_framework();
        let sequence = build_graphic_statics_sequence(&framework, &tol()).unwrap();
        let constant = ReciprocalDiagram {
            positions: vec![
                [Scalar::new(1.3, 0.0), Scalar::new(-0.4, 0.0)];
                framework.complex.face_count()
            ],
        };
        let stress = stress_from_reciprocal(&sequence, &constant, &tol()).unwrap();
        assert!(stress.coefficients.iter().all(|w| w.norm() <= 1e-9));
    }

    #[test]
    fn non_parallel_positions_are_rejected() {
        let framework = triangle_framework();
        let sequence = build_graphic_statics_sequence(&framework, &tol()).unwrap();
        let skewed = ReciprocalDiagram {
            positions: vec![
                [Scalar::new(1.0, 0.0), Scalar::new(0.0, 0.0)],
                [Scalar::new(0.0, 0.0), Scalar::new(1.0, 0.0)],
            ],
        };
        assert!(matches!(
            stress_from_reciprocal(&sequence, &skewed, &tol()),
            Err(StaticsError::NotACycle(_))
        ));
    }

    #[test]
    fn zero_stress_integrates_to_origin() {
        let framework = samples::desargues().framework().unwrap();
        let zero = SelfStress {
            coefficients: vec![Scalar::new(0.0, 0.0); framework.complex.edge_count()],
        };
        let diagram = reciprocal_from_stress(&framework, &zero, &tol()).unwrap();
        for p in &diagram.positions {
            assert!(p[0].norm() <= 1e-12 && p[1].norm() <= 1e-12);
        }
    }

    #[test]
    fn desargues_stress_matches_brute_force_kernel() {
        // Independent oracle: eliminate the 12x9 equilibrium matrix by hand
        // and solve for its one kernel vector by back substitution, sharing
        // nothing with the Jacobi decomposition path.
        let framework = samples::desargues().framework().unwrap();
        let force = build_force_cosheaf(&framework).unwrap();
        let equilibrium = crate::cosheaf::assemble_boundary(&force, 1);
        assert_eq!(equilibrium.shape(), (12, 9));
        assert_eq!(crate::numerics::rank_by_elimination(&equilibrium, 1e-9), 8);

        // Fix the last coordinate to 1 and solve M[:, ..8] x = -M[:, 8] by
        // least squares on the reduced system via normal equations solved
        // with elimination.
        let reduced = equilibrium.columns(0, 8).into_owned();
        let rhs = equilibrium.column(8).into_owned() * Scalar::new(-1.0, 0.0);
        let gram = reduced.adjoint() * &reduced;
        let beta = reduced.adjoint() * &rhs;
        let mut augmented = Mat::zeros(8, 9);
        augmented.view_mut((0, 0), (8, 8)).copy_from(&gram);
        augmented.view_mut((0, 8), (8, 1)).copy_from(&beta);
        // Gauss-Jordan on the augmented system.
        for col in 0..8 {
            let mut pivot = col;
            for r in col..8 {
                if augmented[(r, col)].norm() > augmented[(pivot, col)].norm() {
                    pivot = r;
                }
            }
            augmented.swap_rows(col, pivot);
            let inv = Scalar::new(1.0, 0.0) / augmented[(col, col)];
            for c in 0..9 {
                augmented[(col, c)] *= inv;
            }
            for r in 0..8 {
                if r != col {
                    let factor = augmented[(r, col)];
                    for c in 0..9 {
                        let sub = factor * augmented[(col, c)];
                        augmented[(r, c)] -= sub;
                    }
                }
            }
        }
        let mut oracle = Vector::zeros(9);
        for k in 0..8 {
            oracle[k] = augmented[(k, 8)];
        }
        oracle[8] = Scalar::new(1.0, 0.0);
        assert!(numerics::max_abs_vec(&(&equilibrium * &oracle)) <= 1e-9);

        // The connecting homomorphism recovers a stress spanning the same
        // line: compare after normalizing both to the last coordinate.
        let sequence = build_graphic_statics_sequence(&framework, &tol()).unwrap();
        let stresses = self_stresses(&framework, &tol()).unwrap();
        assert_eq!(stresses.len(), 1);
        let diagram = reciprocal_from_stress(&framework, &stresses[0], &tol()).unwrap();
        let recovered = stress_from_reciprocal(&sequence, &diagram, &tol()).unwrap();
        let scale = recovered.coefficients[8];
        assert!(scale.norm() > 1e-9, "stress is supported on the last edge");
        for (k, w) in recovered.coefficients.iter().enumerate() {
            assert!(
                (w / scale - oracle[k]).norm() <= 1e-8,
                "coefficient {k} disagrees with the elimination oracle"
            );
        }
    }

    #[test]
    fn square_motions_match_brute_force_cokernel() {
        // The 8x4 equilibrium matrix of the square 4-cycle has rank 4 by
        // direct elimination, leaving 8 - 4 = 4 motions.
        let framework = samples::square().framework().unwrap();
        let force = build_force_cosheaf(&framework).unwrap();
        let equilibrium = crate::cosheaf::assemble_boundary(&force, 1);
        assert_eq!(equilibrium.shape(), (8, 4));
        let rank = crate::numerics::rank_by_elimination(&equilibrium, 1e-9);
        assert_eq!(rank, 4);
        assert_eq!(infinitesimal_motions(&framework, &tol()).unwrap().dim(), 8 - rank);
    }

    #[test]
    fn desargues_stress_round_trip() {
        let framework = samples::desargues().framework().unwrap();
        let sequence = build_graphic_statics_sequence(&framework, &tol()).unwrap();
        let stresses = self_stresses(&framework, &tol()).unwrap();
        assert_eq!(stresses.len(), 1);
        let diagram = reciprocal_from_stress(&framework, &stresses[0], &tol()).unwrap();
        assert!(parallelism_defect(&framework, &diagram) <= 1e-9);
        let back = stress_from_reciprocal(&sequence, &diagram, &tol()).unwrap();
        let mut worst = 0.0f64;
        for (a, b) in back.coefficients.iter().zip(&stresses[0].coefficients) {
            worst = worst.max((a - b).norm());
        }
        assert!(worst <= 1e-8, "round trip defect {worst}");
    }

    #[test]
    fn desargues_exactness_dimension() {
        let framework = samples::desargues().framework().unwrap();
        let sequence = build_graphic_statics_sequence(&framework, &tol()).unwrap();
        let (basis, _) = reciprocal_space(&sequence, &tol()).unwrap();
        let stresses = self_stresses(&framework, &tol()).unwrap();
        assert_eq!(basis.dim(), stresses.len() + 2);
    }

    #[test]
    fn desargues_symmetric_report() {
        let sample = samples::desargues();
        let framework = sample.framework().unwrap();
        let action = Arc::new(
            crate::equivariant::action_for_sample(&framework, sample.group.as_ref().unwrap())
                .unwrap(),
        );
        let report = symmetric_graphic_statics(&framework, &action, &tol()).unwrap();
        assert_eq!(report.h1_force, 1);
        assert_eq!(report.h2_position, 3);
        assert_eq!(report.maxwell, (3, 3));
        // Trivial irrep: one translation plus the stress-generated diagram;
        // sign irrep: a single pure translation.
        assert_eq!(report.irreps[0].h1_force_dim, 1);
        assert_eq!(report.irreps[0].h2_position_dim, 2);
        assert_eq!(report.irreps[0].translation_dim, 1);
        assert_eq!(report.irreps[1].h1_force_dim, 0);
        assert_eq!(report.irreps[1].h2_position_dim, 1);
        assert_eq!(report.irreps[1].translation_dim, 1);
        assert_eq!(report.euler_chain_force[0], 0);
        assert_eq!(report.euler_chain_force, report.euler_homology_force);
        // The matched reciprocal is a genuine diagram for the stress.
        assert_eq!(report.irreps[0].reciprocals.len(), 1);
        assert!(parallelism_defect(&framework, &report.irreps[0].reciprocals[0]) <= 1e-8);
    }

    #[test]
    fn d4_grid_report_matches_pinned_counts() {
        let sample = samples::d4_grid();
        let framework = sample.framework().unwrap();
        let action = Arc::new(
            crate::equivariant::action_for_sample(&framework, sample.group.as_ref().unwrap())
                .unwrap(),
        );
        let report = symmetric_graphic_statics(&framework, &action, &tol()).unwrap();
        assert_eq!(report.h1_force, 4);
        assert_eq!(report.h2_position, 6);
        // The Klein labels are (00), (01), (10), (11); the last irreducible
        // carries only trivial cycles.
        assert_eq!(report.irrep_labels[3], "(11)");
        assert_eq!(report.irreps[3].h2_position_dim, 0);
        let total: usize = report.irreps.iter().map(|r| r.h2_position_dim).sum();
        assert_eq!(total, 6);
    }

    #[test]
    fn d8_star_two_dimensional_irrep_carries_pairs() {
        let sample = samples::d8_star();
        let framework = sample.framework().unwrap();
        let action = Arc::new(
            crate::equivariant::action_for_sample(&framework, sample.group.as_ref().unwrap())
                .unwrap(),
        );
        let report = symmetric_graphic_statics(&framework, &action, &tol()).unwrap();
        let two_dim = report.irreps.iter().find(|r| r.dim == 2).unwrap();
        // Reciprocal diagrams in the 2-dimensional irreducible come in
        // pairs: two stress-generated plus the two global translations.
        assert_eq!(two_dim.h2_position_dim, 4);
        assert_eq!(two_dim.h2_position_dim % 2, 0);
        assert_eq!(two_dim.translation_dim, 2);
        assert_eq!(two_dim.h1_force_dim, 2);
    }

    #[test]
    fn z5_conjugate_pairs_are_conjugate_subspaces() {
        let sample = samples::z5_flower();
        let framework = sample.framework().unwrap();
        let action = Arc::new(
            crate::equivariant::action_for_sample(&framework, sample.group.as_ref().unwrap())
                .unwrap(),
        );
        let report = symmetric_graphic_statics(&framework, &action, &tol()).unwrap();
        assert_eq!(report.h1_force, 3);
        assert_eq!(report.h2_position, 5);
        // Conjugate irreducibles (2)/(5) and (3)/(4) carry equal dimensions.
        assert_eq!(report.irreps[1].h2_position_dim, report.irreps[4].h2_position_dim);
        assert_eq!(report.irreps[2].h2_position_dim, report.irreps[3].h2_position_dim);
    }

    #[test]
    fn perturbed_stress_fails_closure() {
        let framework = samples::desargues().framework().unwrap();
        let mut stress = self_stresses(&framework, &tol()).unwrap().remove(0);
        stress.coefficients[0] += Scalar::new(0.25, 0.0);
        assert!(matches!(
            reciprocal_from_stress(&framework, &stress, &tol()),
            Err(StaticsError::InconsistentStress { .. })
        ));
    }
}
