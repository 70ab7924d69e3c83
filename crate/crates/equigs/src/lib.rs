//! Cosheaf homology for planar bar-joint frameworks with finite symmetry.
//!
//! The pipeline: a [`complex::Framework`] (a 2-dimensional cell complex with
//! planar vertex positions) carries three cellular cosheaves — the force
//! cosheaf whose first homology is the space of self-stresses, the constant
//! `ℝ²` cosheaf, and the position cosheaf whose second homology is the space
//! of reciprocal diagrams. A cyclic or dihedral group acting on the framework
//! decomposes all of these spaces into isotypic components, one per
//! irreducible representation, pairing self-stresses with reciprocal diagrams
//! of the same symmetry type.

pub mod analysis;
pub mod complex;
pub mod cosheaf;
pub mod equivariant;
pub mod groups;
pub mod io;
pub mod numerics;
pub mod render;
pub mod samples;
pub mod statics;
