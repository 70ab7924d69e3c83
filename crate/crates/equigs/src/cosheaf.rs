//! Cellular cosheaves over 2-complexes: stalks, extension maps, assembled
//! boundary matrices, homology, cosheaf maps, quotients, and the connecting
//! homomorphism of a short exact sequence.

use std::sync::Arc;

use thiserror::Error;

use crate::complex::{CellComplex, CellRef};
use crate::numerics::{
    self, kernel_basis, max_abs, quotient_representatives, solve_ls, Mat, Scalar, SubspaceBasis,
    Tolerance, Vector,
};

/// A cellular cosheaf: a finite-dimensional stalk on every cell and an
/// extension map `stalk(d) -> stalk(c)` on every covering pair `c ◁ d`.
#[derive(Clone, Debug)]
pub struct Cosheaf {
    complex: Arc<CellComplex>,
    vertex_dims: Vec<usize>,
    edge_dims: Vec<usize>,
    face_dims: Vec<usize>,
    /// Extension map from each edge stalk into its tail vertex stalk.
    edge_to_tail: Vec<Mat>,
    /// Extension map from each edge stalk into its head vertex stalk.
    edge_to_head: Vec<Mat>,
    /// Per face, in cycle order: `(edge, extension map stalk(f) -> stalk(e))`.
    face_to_edges: Vec<Vec<(usize, Mat)>>,
}

#[derive(Debug, Error)]
pub enum CosheafError {
    #[error("extension map for {pair} has shape {got:?}, expected {expected:?}")]
    ShapeMismatch { pair: String, got: (usize, usize), expected: (usize, usize) },
    #[error("missing extension map for {pair}")]
    MissingExtension { pair: String },
    #[error("boundary maps do not compose to zero: max |∂₁∂₂| = {defect:.3e}")]
    BoundarySquare { defect: f64 },
    #[error("cosheaf map is not injective at cell {cell}")]
    NotInjective { cell: String },
}

impl Cosheaf {
    /// Assemble a cosheaf from per-cell stalk dimensions and extension maps,
    /// checking block shapes. `face_extensions` must list one map per entry
    /// of the face's boundary cycle, in cycle order.
    pub fn from_parts(
        complex: Arc<CellComplex>,
        vertex_dims: Vec<usize>,
        edge_dims: Vec<usize>,
        face_dims: Vec<usize>,
        edge_to_tail: Vec<Mat>,
        edge_to_head: Vec<Mat>,
        face_extensions: Vec<Vec<Mat>>,
    ) -> Result<Self, CosheafError> {
        assert_eq!(vertex_dims.len(), complex.vertex_count());
        assert_eq!(edge_dims.len(), complex.edge_count());
        assert_eq!(face_dims.len(), complex.face_count());
        assert_eq!(edge_to_tail.len(), complex.edge_count());
        assert_eq!(edge_to_head.len(), complex.edge_count());
        assert_eq!(face_extensions.len(), complex.face_count());

        for (e, edge) in complex.edges().iter().enumerate() {
            for (m, v, which) in [
                (&edge_to_tail[e], edge.tail, "tail"),
                (&edge_to_head[e], edge.head, "head"),
            ] {
                let expected = (vertex_dims[v], edge_dims[e]);
                if m.shape() != expected {
                    return Err(CosheafError::ShapeMismatch {
                        pair: format!("{} ▷ {}", edge.id, which),
                        got: m.shape(),
                        expected,
                    });
                }
            }
        }
        let mut face_to_edges = Vec::with_capacity(complex.face_count());
        for (f, face) in complex.faces().iter().enumerate() {
            if face_extensions[f].len() != face.cycle.len() {
                return Err(CosheafError::MissingExtension {
                    pair: format!("{} ▷ (boundary edges)", face.id),
                });
            }
            let mut maps = Vec::with_capacity(face.cycle.len());
            for (&(e, _), m) in face.cycle.iter().zip(&face_extensions[f]) {
                let expected = (edge_dims[e], face_dims[f]);
                if m.shape() != expected {
                    return Err(CosheafError::ShapeMismatch {
                        pair: format!("{} ▷ {}", face.id, complex.edge(e).id),
                        got: m.shape(),
                        expected,
                    });
                }
                maps.push((e, m.clone()));
            }
            face_to_edges.push(maps);
        }
        Ok(Cosheaf {
            complex,
            vertex_dims,
            edge_dims,
            face_dims,
            edge_to_tail,
            edge_to_head,
            face_to_edges,
        })
    }

    /// The constant cosheaf: every stalk is `k^dim`, every extension map the
    /// identity.
    pub fn constant(complex: Arc<CellComplex>, dim: usize) -> Self {
        let id = Mat::identity(dim, dim);
        let vertex_dims = vec![dim; complex.vertex_count()];
        let edge_dims = vec![dim; complex.edge_count()];
        let face_dims = vec![dim; complex.face_count()];
        let edge_to_tail = vec![id.clone(); complex.edge_count()];
        let edge_to_head = vec![id.clone(); complex.edge_count()];
        let face_to_edges = complex
            .faces()
            .iter()
            .map(|face| face.cycle.iter().map(|&(e, _)| (e, id.clone())).collect())
            .collect();
        Cosheaf {
            complex,
            vertex_dims,
            edge_dims,
            face_dims,
            edge_to_tail,
            edge_to_head,
            face_to_edges,
        }
    }

    pub fn complex(&self) -> &Arc<CellComplex> {
        &self.complex
    }

    pub fn stalk_dim(&self, cell: CellRef) -> usize {
        match cell {
            CellRef::Vertex(v) => self.vertex_dims[v],
            CellRef::Edge(e) => self.edge_dims[e],
            CellRef::Face(f) => self.face_dims[f],
        }
    }

    /// Extension map `stalk(e) -> stalk(v)` for an endpoint `v` of edge `e`.
    pub fn edge_extension(&self, e: usize, v: usize) -> Option<&Mat> {
        let edge = self.complex.edge(e);
        if edge.tail == v {
            Some(&self.edge_to_tail[e])
        } else if edge.head == v {
            Some(&self.edge_to_head[e])
        } else {
            None
        }
    }

    /// Extension map `stalk(f) -> stalk(e)` for an edge on the face boundary.
    pub fn face_extension(&self, f: usize, e: usize) -> Option<&Mat> {
        self.face_to_edges[f].iter().find(|&&(k, _)| k == e).map(|(_, m)| m)
    }

    fn dims_of_degree(&self, i: usize) -> &[usize] {
        match i {
            0 => &self.vertex_dims,
            1 => &self.edge_dims,
            2 => &self.face_dims,
            _ => &[],
        }
    }

    /// Total chain dimension in degree `i`.
    pub fn chain_dim(&self, i: usize) -> usize {
        self.dims_of_degree(i).iter().sum()
    }

    /// Start offset of each cell's stalk inside the degree-`i` chain space.
    pub fn chain_offsets(&self, i: usize) -> Vec<usize> {
        let mut offsets = Vec::with_capacity(self.dims_of_degree(i).len());
        let mut acc = 0;
        for d in self.dims_of_degree(i) {
            offsets.push(acc);
            acc += d;
        }
        offsets
    }
}

/// Block matrix of the boundary map `∂_i : C_i -> C_{i-1}` with block
/// `(c, d) = [c:d] · K_{d▷c}` in the complex's cell orderings.
pub fn assemble_boundary(cosheaf: &Cosheaf, i: usize) -> Mat {
    assert!(i == 1 || i == 2, "boundary assembled in degrees 1 and 2");
    let complex = cosheaf.complex();
    let rows = cosheaf.chain_dim(i - 1);
    let cols = cosheaf.chain_dim(i);
    let row_offsets = cosheaf.chain_offsets(i - 1);
    let col_offsets = cosheaf.chain_offsets(i);
    let mut out = Mat::zeros(rows, cols);
    if i == 1 {
        for (e, edge) in complex.edges().iter().enumerate() {
            for (v, block) in [
                (edge.tail, &cosheaf.edge_to_tail[e]),
                (edge.head, &cosheaf.edge_to_head[e]),
            ] {
                let sign = complex.vertex_edge_sign(v, e).expect("endpoint incidence") as f64;
                add_block(&mut out, row_offsets[v], col_offsets[e], block, sign);
            }
        }
    } else {
        for (f, maps) in cosheaf.face_to_edges.iter().enumerate() {
            for (e, block) in maps {
                let sign = complex.edge_face_sign(*e, f).expect("face incidence") as f64;
                add_block(&mut out, row_offsets[*e], col_offsets[f], block, sign);
            }
        }
    }
    out
}

fn add_block(out: &mut Mat, row: usize, col: usize, block: &Mat, sign: f64) {
    for i in 0..block.nrows() {
        for j in 0..block.ncols() {
            out[(row + i, col + j)] += Scalar::new(sign, 0.0) * block[(i, j)];
        }
    }
}

/// Assembled chain complex `C₂ -> C₁ -> C₀` of a cosheaf.
#[derive(Clone, Debug)]
pub struct ChainComplex {
    pub dims: [usize; 3],
    pub d1: Mat,
    pub d2: Mat,
}

impl ChainComplex {
    /// Assemble both boundary matrices and verify `∂₁∂₂ = 0`.
    pub fn assemble(cosheaf: &Cosheaf) -> Result<Self, CosheafError> {
        let d1 = assemble_boundary(cosheaf, 1);
        let d2 = assemble_boundary(cosheaf, 2);
        let chain = ChainComplex {
            dims: [cosheaf.chain_dim(0), cosheaf.chain_dim(1), cosheaf.chain_dim(2)],
            d1,
            d2,
        };
        let defect = chain.boundary_square_defect();
        if defect > 1e-10 * max_abs(&chain.d1).max(1.0) * max_abs(&chain.d2).max(1.0) {
            return Err(CosheafError::BoundarySquare { defect });
        }
        Ok(chain)
    }

    /// `max |∂₁∂₂|` over all entries.
    pub fn boundary_square_defect(&self) -> f64 {
        if self.d1.ncols() == 0 || self.d2.ncols() == 0 {
            return 0.0;
        }
        max_abs(&(&self.d1 * &self.d2))
    }

    pub fn boundary(&self, i: usize) -> Option<&Mat> {
        match i {
            1 => Some(&self.d1),
            2 => Some(&self.d2),
            _ => None,
        }
    }

    /// Euler characteristic of the chain complex.
    pub fn euler_characteristic(&self) -> i64 {
        self.dims[0] as i64 - self.dims[1] as i64 + self.dims[2] as i64
    }
}

/// Orthonormal cycle representatives spanning a complement of the boundaries
/// inside the cycles of degree `i`.
#[derive(Clone, Debug)]
pub struct HomologyBasis {
    pub degree: usize,
    pub representatives: SubspaceBasis,
}

impl HomologyBasis {
    pub fn dim(&self) -> usize {
        self.representatives.dim()
    }
}

/// Homology `H_i = ker ∂_i / im ∂_{i+1}` with representatives realized as the
/// orthogonal complement of the boundaries inside the cycles.
///
/// Dimensions come from rank bookkeeping: `dim H_i = dim ker ∂_i − rank
/// ∂_{i+1}`, with every rank read off the same thresholded decomposition, so
/// the Euler identity holds exactly as integers even for frameworks near a
/// geometric singularity. Representatives are found in cycle coordinates,
/// where `∂∂ = 0` puts the boundary space inside by construction.
pub fn homology(chain: &ChainComplex, i: usize, tol: &Tolerance) -> HomologyBasis {
    assert!(i <= 2, "three chain degrees");
    let cycles = match i {
        0 => SubspaceBasis::full(chain.dims[0]),
        1 => kernel_basis(&chain.d1, tol),
        _ => kernel_basis(&chain.d2, tol),
    };
    let boundary = match i {
        0 => Some(&chain.d1),
        1 => Some(&chain.d2),
        _ => None,
    };
    let representatives = match boundary {
        None => cycles,
        Some(d) if d.ncols() == 0 || numerics::max_abs(d) == 0.0 => cycles,
        Some(d) => {
            let boundary_rank = numerics::rank(d, tol);
            assert!(
                boundary_rank <= cycles.dim(),
                "∂∂ = 0 keeps boundaries inside cycles"
            );
            let quotient_dim = cycles.dim() - boundary_rank;
            if quotient_dim == 0 {
                SubspaceBasis::empty(cycles.ambient_dim)
            } else {
                // Boundary coordinates inside the cycle basis.
                let coords = cycles.basis.adjoint() * d;
                let complement = numerics::image_complement_with_dim(&coords, quotient_dim);
                SubspaceBasis {
                    ambient_dim: cycles.ambient_dim,
                    basis: &cycles.basis * &complement.basis,
                }
            }
        }
    };
    HomologyBasis { degree: i, representatives }
}

/// All three homology dimensions of an assembled chain complex.
pub fn homology_dims(chain: &ChainComplex, tol: &Tolerance) -> [usize; 3] {
    [0, 1, 2].map(|i| homology(chain, i, tol).dim())
}

/// A map of cosheaves over one complex: a block `φ_c` per cell, commuting
/// with the extension maps.
#[derive(Clone, Debug)]
pub struct CosheafMap {
    pub domain: Arc<Cosheaf>,
    pub codomain: Arc<Cosheaf>,
    pub vertex_blocks: Vec<Mat>,
    pub edge_blocks: Vec<Mat>,
    pub face_blocks: Vec<Mat>,
}

impl CosheafMap {
    pub fn identity(cosheaf: Arc<Cosheaf>) -> Self {
        let complex = cosheaf.complex().clone();
        let id = |d: usize| Mat::identity(d, d);
        CosheafMap {
            vertex_blocks: (0..complex.vertex_count())
                .map(|v| id(cosheaf.stalk_dim(CellRef::Vertex(v))))
                .collect(),
            edge_blocks: (0..complex.edge_count())
                .map(|e| id(cosheaf.stalk_dim(CellRef::Edge(e))))
                .collect(),
            face_blocks: (0..complex.face_count())
                .map(|f| id(cosheaf.stalk_dim(CellRef::Face(f))))
                .collect(),
            domain: cosheaf.clone(),
            codomain: cosheaf,
        }
    }

    pub fn block(&self, cell: CellRef) -> &Mat {
        match cell {
            CellRef::Vertex(v) => &self.vertex_blocks[v],
            CellRef::Edge(e) => &self.edge_blocks[e],
            CellRef::Face(f) => &self.face_blocks[f],
        }
    }

    /// Block-diagonal matrix of the induced chain map in degree `i`.
    pub fn chain_matrix(&self, i: usize) -> Mat {
        let rows = self.codomain.chain_dim(i);
        let cols = self.domain.chain_dim(i);
        let row_offsets = self.codomain.chain_offsets(i);
        let col_offsets = self.domain.chain_offsets(i);
        let blocks: &[Mat] = match i {
            0 => &self.vertex_blocks,
            1 => &self.edge_blocks,
            _ => &self.face_blocks,
        };
        let mut out = Mat::zeros(rows, cols);
        for (c, block) in blocks.iter().enumerate() {
            add_block(&mut out, row_offsets[c], col_offsets[c], block, 1.0);
        }
        out
    }
}

/// A covering pair whose naturality square fails beyond tolerance.
#[derive(Clone, Debug, PartialEq)]
pub struct MapViolation {
    /// Higher cell of the pair.
    pub from: String,
    /// Lower cell of the pair.
    pub to: String,
    pub defect: f64,
}

/// Check `φ_c ∘ K_{d▷c} = L_{d▷c} ∘ φ_d` on every covering pair.
pub fn verify_map(map: &CosheafMap, tol: &Tolerance) -> Vec<MapViolation> {
    let complex = map.domain.complex().clone();
    let mut scale = 1.0f64;
    for blocks in [&map.vertex_blocks, &map.edge_blocks, &map.face_blocks] {
        for b in blocks.iter() {
            scale = scale.max(max_abs(b));
        }
    }
    let cutoff = tol.abs_for(scale);
    let mut report = Vec::new();
    for (e, edge) in complex.edges().iter().enumerate() {
        for v in [edge.tail, edge.head] {
            let dom_ext = map.domain.edge_extension(e, v).expect("covering pair");
            let cod_ext = map.codomain.edge_extension(e, v).expect("covering pair");
            let defect = max_abs(&(&map.vertex_blocks[v] * dom_ext - cod_ext * &map.edge_blocks[e]));
            if defect > cutoff {
                report.push(MapViolation {
                    from: edge.id.clone(),
                    to: complex.vertex_id(v).to_string(),
                    defect,
                });
            }
        }
    }
    for (f, face) in complex.faces().iter().enumerate() {
        for &(e, _) in &face.cycle {
            let dom_ext = map.domain.face_extension(f, e).expect("covering pair");
            let cod_ext = map.codomain.face_extension(f, e).expect("covering pair");
            let defect = max_abs(&(&map.edge_blocks[e] * dom_ext - cod_ext * &map.face_blocks[f]));
            if defect > cutoff {
                report.push(MapViolation {
                    from: face.id.clone(),
                    to: complex.edge(e).id.clone(),
                    defect,
                });
            }
        }
    }
    report
}

/// Quotient of an injective cosheaf map: stalks are realized concretely as
/// orthogonal complements of `im φ_c`, and `π_c` is the orthogonal projection
/// expressed in that complement basis.
///
/// Complement bases are canonical where a natural choice exists: the standard
/// basis when `φ_c = 0`, and for a real line inside the plane the unit normal
/// obtained by rotating the unit spanning vector a quarter turn clockwise.
/// Other shapes fall back to an SVD complement.
pub fn quotient_cosheaf(
    phi: &CosheafMap,
    tol: &Tolerance,
) -> Result<(Arc<Cosheaf>, CosheafMap), CosheafError> {
    let dom = &phi.domain;
    let cod = &phi.codomain;
    let complex = cod.complex().clone();

    let complement = |cell: CellRef, block: &Mat| -> Result<Mat, CosheafError> {
        let dom_dim = dom.stalk_dim(cell);
        let cod_dim = cod.stalk_dim(cell);
        if dom_dim == 0 {
            return Ok(Mat::identity(cod_dim, cod_dim));
        }
        let image = numerics::image_basis(block, tol);
        if image.dim() < dom_dim {
            let name = match cell {
                CellRef::Vertex(v) => complex.vertex_id(v).to_string(),
                CellRef::Edge(e) => complex.edge(e).id.clone(),
                CellRef::Face(f) => complex.face(f).id.clone(),
            };
            return Err(CosheafError::NotInjective { cell: name });
        }
        if image.dim() == cod_dim {
            return Ok(Mat::zeros(cod_dim, 0));
        }
        if cod_dim == 2 && dom_dim == 1 && numerics::max_imag(block) <= tol.abs {
            // Clockwise quarter-turn of the unit spanning vector.
            let len = (block[(0, 0)].re.powi(2) + block[(1, 0)].re.powi(2)).sqrt();
            let unit = [block[(0, 0)].re / len, block[(1, 0)].re / len];
            return Ok(numerics::real_mat(2, 1, &[unit[1], -unit[0]]));
        }
        let q = quotient_representatives(&SubspaceBasis::full(cod_dim), &image, tol)
            .expect("image lies in the full stalk");
        Ok(q.basis)
    };

    let mut vertex_dims = Vec::new();
    let mut edge_dims = Vec::new();
    let mut face_dims = Vec::new();
    let mut vertex_bases = Vec::new();
    let mut edge_bases = Vec::new();
    let mut face_bases = Vec::new();
    for v in 0..complex.vertex_count() {
        let q = complement(CellRef::Vertex(v), &phi.vertex_blocks[v])?;
        vertex_dims.push(q.ncols());
        vertex_bases.push(q);
    }
    for e in 0..complex.edge_count() {
        let q = complement(CellRef::Edge(e), &phi.edge_blocks[e])?;
        edge_dims.push(q.ncols());
        edge_bases.push(q);
    }
    for f in 0..complex.face_count() {
        let q = complement(CellRef::Face(f), &phi.face_blocks[f])?;
        face_dims.push(q.ncols());
        face_bases.push(q);
    }

    // Induced extension maps: Q_{d▷c} = π_c ∘ L_{d▷c} ∘ inclusion_d.
    let edge_to_tail = (0..complex.edge_count())
        .map(|e| {
            let edge = complex.edge(e);
            vertex_bases[edge.tail].adjoint() * &cod.edge_to_tail[e] * &edge_bases[e]
        })
        .collect();
    let edge_to_head = (0..complex.edge_count())
        .map(|e| {
            let edge = complex.edge(e);
            vertex_bases[edge.head].adjoint() * &cod.edge_to_head[e] * &edge_bases[e]
        })
        .collect();
    let face_extensions = (0..complex.face_count())
        .map(|f| {
            cod.face_to_edges[f]
                .iter()
                .map(|(e, m)| edge_bases[*e].adjoint() * m * &face_bases[f])
                .collect()
        })
        .collect();

    let quotient = Arc::new(Cosheaf::from_parts(
        complex,
        vertex_dims,
        edge_dims,
        face_dims,
        edge_to_tail,
        edge_to_head,
        face_extensions,
    )?);

    let projection = CosheafMap {
        domain: cod.clone(),
        codomain: quotient.clone(),
        vertex_blocks: vertex_bases.iter().map(|q| q.adjoint()).collect(),
        edge_blocks: edge_bases.iter().map(|q| q.adjoint()).collect(),
        face_blocks: face_bases.iter().map(|q| q.adjoint()).collect(),
    };
    Ok((quotient, projection))
}

#[derive(Debug, Error)]
pub enum ConnectingError {
    #[error("projection is not surjective on the needed chain: lift residual {0:.3e}")]
    LiftFailed(f64),
    #[error("boundary of the lift is not in the image of the inclusion: residual {0:.3e} (input was not a cycle)")]
    NotInImage(f64),
}

/// Snake-lemma connecting homomorphism for the short exact sequence
/// `0 -> K -φ-> L -π-> Q -> 0`: a degree-`i` cycle of `Q` maps to a
/// degree-`i-1` cycle of `K`. The output class is checked to be independent
/// of the chain-level lift.
pub fn connecting_homomorphism(
    phi: &CosheafMap,
    pi: &CosheafMap,
    i: usize,
    cycle: &Vector,
    tol: &Tolerance,
) -> Result<Vector, ConnectingError> {
    assert!((1..=2).contains(&i), "connecting map needs a boundary below");
    let mid_boundary = assemble_boundary(&pi.domain, i);
    let pi_i = pi.chain_matrix(i);
    let phi_lower = phi.chain_matrix(i - 1);
    let scale = max_abs(&mid_boundary).max(1.0);
    let cutoff = tol.abs_for(scale * numerics::max_abs_vec(cycle).max(1.0));

    let solve_back = |lift: &Vector| -> Result<Vector, ConnectingError> {
        let dropped = &mid_boundary * lift;
        let (w, residual) = solve_ls(&phi_lower, &dropped, tol);
        if residual > cutoff {
            return Err(ConnectingError::NotInImage(residual));
        }
        Ok(w)
    };

    let (lift, lift_residual) = solve_ls(&pi_i, cycle, tol);
    if lift_residual > cutoff {
        return Err(ConnectingError::LiftFailed(lift_residual));
    }
    let w = solve_back(&lift)?;

    // A second lift differing by an element of ker π = im φ must give a
    // homologous result: the difference of outputs lies in im ∂ of K.
    let phi_i = phi.chain_matrix(i);
    if phi_i.ncols() > 0 {
        let jitter = Vector::from_fn(phi_i.ncols(), |k, _| {
            // Deterministic pseudo-random mix so repeated runs agree.
            let t = (k as f64 + 1.0) * 0.734_f64;
            Scalar::new(t.sin(), 0.0)
        });
        let second = &lift + &phi_i * &jitter;
        let w2 = solve_back(&second)?;
        let sub_boundary = assemble_boundary(&phi.domain, i);
        let diff = &w2 - &w;
        let image = numerics::image_basis(&sub_boundary, tol);
        let residual = if image.dim() == 0 {
            diff.norm()
        } else {
            (&diff - image.projector() * &diff).norm()
        };
        debug_assert!(
            residual <= cutoff.max(1e-8),
            "connecting homomorphism depends on the lift: residual {residual:.3e}"
        );
    }
    Ok(w)
}
