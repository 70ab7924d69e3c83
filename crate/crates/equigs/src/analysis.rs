//! One-call analysis pipeline over a parsed framework file: geometry, the
//! graphic-statics sequence, homology dimensions, Maxwell counts, and the
//! symmetry decomposition when a group block is present.

use std::sync::Arc;

use thiserror::Error;

use crate::complex::Framework;
use crate::cosheaf::{homology_dims, ChainComplex, Cosheaf, CosheafError};
use crate::equivariant::CellAction;
use crate::groups::GroupKind;
use crate::io::{
    irrep_outputs, stress_output, AnalysisOutput, FrameworkFile, GroupSummary, HomologyDims,
    IoError, SCHEMA_VERSION,
};
use crate::numerics::Tolerance;
use crate::statics::{
    build_graphic_statics_sequence, maxwell_check, self_stresses, symmetric_graphic_statics,
    GraphicStaticsReport, GraphicStaticsSequence, StaticsError,
};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    File(#[from] IoError),
    #[error(transparent)]
    Statics(#[from] StaticsError),
    #[error(transparent)]
    Cosheaf(#[from] CosheafError),
}

impl AnalysisError {
    /// True when the failure signals a numerics bug rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            AnalysisError::Statics(
                StaticsError::MaxwellViolation { .. }
                    | StaticsError::IrrepMismatch { .. }
                    | StaticsError::PairingBroken { .. }
            ) | AnalysisError::Cosheaf(CosheafError::BoundarySquare { .. })
        )
    }
}

/// Everything one analysis run produces.
pub struct Analysis {
    pub framework: Framework,
    pub action: Option<Arc<CellAction>>,
    pub sequence: GraphicStaticsSequence,
    pub output: AnalysisOutput,
    pub report: Option<GraphicStaticsReport>,
}

/// Run the full pipeline on a parsed file. With `no_group` the symmetry
/// block is ignored and only plain homology, Maxwell counts and the stress
/// basis are produced.
pub fn analyze(
    file: &FrameworkFile,
    no_group: bool,
    tol: &Tolerance,
) -> Result<Analysis, AnalysisError> {
    let framework = file.framework()?;
    let action = if no_group { None } else { file.action(&framework)? };

    let (lhs, rhs) = maxwell_check(&framework, tol)?;
    let sequence = build_graphic_statics_sequence(&framework, tol)?;
    let dims = |cosheaf: &Cosheaf| -> Result<HomologyDims, AnalysisError> {
        let chain = ChainComplex::assemble(cosheaf)?;
        let d = homology_dims(&chain, tol);
        Ok(HomologyDims { h0: d[0], h1: d[1], h2: d[2] })
    };

    let mut output = AnalysisOutput {
        schema_version: SCHEMA_VERSION,
        name: file.name.clone(),
        tolerance_rel: tol.rel,
        tolerance_abs: tol.abs,
        vertices: framework.complex.vertex_count(),
        edges: framework.complex.edge_count(),
        faces: framework.complex.face_count(),
        force_homology: dims(&sequence.force)?,
        constant_homology: dims(&sequence.constant)?,
        position_homology: dims(&sequence.position)?,
        maxwell_lhs: lhs,
        maxwell_rhs: rhs,
        group: None,
        symmetric_euler_force_chain: None,
        symmetric_euler_force_homology: None,
        irreps: None,
        stresses: None,
    };

    let report = match &action {
        Some(action) => {
            let report = symmetric_graphic_statics(&framework, action, tol)?;
            output.group = Some(GroupSummary {
                kind: match action.group.kind {
                    GroupKind::Cyclic => "cyclic".into(),
                    GroupKind::Dihedral => "dihedral".into(),
                },
                m: action.group.m,
                order: action.group.order(),
                irrep_labels: report.irrep_labels.clone(),
                irrep_dims: report.irrep_dims.clone(),
            });
            output.symmetric_euler_force_chain = Some(report.euler_chain_force.clone());
            output.symmetric_euler_force_homology = Some(report.euler_homology_force.clone());
            output.irreps = Some(irrep_outputs(&framework, &report));
            Some(report)
        }
        None => {
            let stresses = self_stresses(&framework, tol)?;
            output.stresses =
                Some(stresses.iter().map(|s| stress_output(&framework, s)).collect());
            None
        }
    };

    Ok(Analysis { framework, action, sequence, output, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::to_json_string;
    use crate::samples;

    #[test]
    fn analysis_output_is_deterministic() {
        let file = FrameworkFile::from(&samples::desargues());
        let tol = Tolerance::default();
        let first = analyze(&file, false, &tol).unwrap();
        let second = analyze(&file, false, &tol).unwrap();
        assert_eq!(to_json_string(&first.output), to_json_string(&second.output));
    }

    #[test]
    fn no_group_skips_decomposition() {
        let file = FrameworkFile::from(&samples::desargues());
        let analysis = analyze(&file, true, &Tolerance::default()).unwrap();
        assert!(analysis.report.is_none());
        assert_eq!(analysis.output.stresses.as_ref().map(|s| s.len()), Some(1));
        assert_eq!(analysis.output.force_homology.h1, 1);
        assert_eq!(analysis.output.maxwell_lhs, 3);
    }

    #[test]
    fn analysis_round_trips_through_schema() {
        let file = FrameworkFile::from(&samples::d4_grid());
        let analysis = analyze(&file, false, &Tolerance::default()).unwrap();
        let text = to_json_string(&analysis.output);
        let parsed: AnalysisOutput = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed, analysis.output);
    }
}
