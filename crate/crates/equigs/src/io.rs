//! File formats: the framework JSON schema (geometry, faces, symmetry
//! group) and the analysis output schema, plus atomic file writing.
//!
//! Floats in emitted JSON carry 17 significant digits so that output is
//! byte-deterministic and round-trips exactly.

use std::collections::HashMap;
use std::io::Write;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{build_complex, FaceSpec, Framework};
use crate::equivariant::{induce_action, CellAction};
use crate::groups::{build_group_with_axis, tau, GroupKind};
use crate::numerics::{Scalar, Tolerance};
use crate::samples::Sample;
use crate::statics::{GraphicStaticsReport, ReciprocalDiagram, SelfStress};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid framework file at {pointer}: {message}")]
    Invalid { pointer: String, code: String, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn invalid(
    pointer: impl Into<String>,
    code: impl Into<String>,
    message: impl Into<String>,
) -> IoError {
    IoError::Invalid { pointer: pointer.into(), code: code.into(), message: message.into() }
}

/// On-disk description of a framework: vertices with coordinates, directed
/// edges, oriented faces with an outer flag, and an optional symmetry block.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FrameworkFile {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub vertices: Vec<VertexEntry>,
    pub edges: Vec<EdgeEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub faces: Vec<FaceEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct VertexEntry {
    pub id: String,
    pub x: f64,
    pub y: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct EdgeEntry {
    pub id: String,
    pub u: String,
    pub v: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FaceEntry {
    pub id: String,
    pub edges: Vec<OrientedEdgeEntry>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub outer: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct OrientedEdgeEntry {
    pub edge: String,
    pub sign: i8,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GroupEntry {
    /// "cyclic" or "dihedral".
    pub kind: String,
    pub m: u32,
    /// Angle of the reflection axis realized by τ(s), degrees.
    #[serde(default, skip_serializing_if = "is_zero")]
    pub axis_degrees: f64,
    pub generators: Vec<GeneratorEntry>,
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GeneratorEntry {
    /// "r" for the rotation, "s" for the reflection.
    pub name: String,
    /// Vertex permutation; fixed vertices may be omitted.
    pub vertex_map: Vec<(String, String)>,
}

pub fn parse_framework_file(text: &str) -> Result<FrameworkFile, IoError> {
    serde_json::from_str(text).map_err(|e| IoError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

impl FrameworkFile {
    /// Validate and build the geometric framework.
    pub fn framework(&self) -> Result<Framework, IoError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(invalid(
                "/schema_version",
                "UnsupportedSchema",
                format!("unsupported schema version {}", self.schema_version),
            ));
        }
        for (k, vertex) in self.vertices.iter().enumerate() {
            if !vertex.x.is_finite() {
                return Err(invalid(
                    format!("/vertices/{k}/x"),
                    "BadCoordinate",
                    "coordinate is not finite",
                ));
            }
            if !vertex.y.is_finite() {
                return Err(invalid(
                    format!("/vertices/{k}/y"),
                    "BadCoordinate",
                    "coordinate is not finite",
                ));
            }
        }
        let vertex_ids: Vec<String> = self.vertices.iter().map(|v| v.id.clone()).collect();
        let known: HashMap<&str, usize> =
            vertex_ids.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
        for (k, edge) in self.edges.iter().enumerate() {
            if !known.contains_key(edge.u.as_str()) {
                return Err(invalid(
                    format!("/edges/{k}/u"),
                    "UnknownVertex",
                    format!("unknown vertex {:?}", edge.u),
                ));
            }
            if !known.contains_key(edge.v.as_str()) {
                return Err(invalid(
                    format!("/edges/{k}/v"),
                    "UnknownVertex",
                    format!("unknown vertex {:?}", edge.v),
                ));
            }
        }
        let edge_ids: std::collections::HashSet<&str> =
            self.edges.iter().map(|e| e.id.as_str()).collect();
        for (k, face) in self.faces.iter().enumerate() {
            for (t, entry) in face.edges.iter().enumerate() {
                if !edge_ids.contains(entry.edge.as_str()) {
                    return Err(invalid(
                        format!("/faces/{k}/edges/{t}/edge"),
                        "UnknownEdge",
                        format!("unknown edge {:?}", entry.edge),
                    ));
                }
                if entry.sign != 1 && entry.sign != -1 {
                    return Err(invalid(
                        format!("/faces/{k}/edges/{t}/sign"),
                        "BadSign",
                        "sign must be +1 or -1",
                    ));
                }
            }
        }
        let complex = build_complex(
            vertex_ids,
            self.edges.iter().map(|e| (e.id.clone(), e.u.clone(), e.v.clone())).collect(),
            self.faces
                .iter()
                .map(|f| FaceSpec {
                    id: f.id.clone(),
                    cycle: f.edges.iter().map(|e| (e.edge.clone(), e.sign)).collect(),
                    outer: f.outer,
                })
                .collect(),
        )
        .map_err(|e| invalid("/faces", e.code(), e.to_string()))?;
        let positions = self.vertices.iter().map(|v| [v.x, v.y]).collect();
        Framework::new(complex, positions)
            .map_err(|e| invalid("/vertices", e.code(), e.to_string()))
    }

    /// Build the symmetry action declared in the group block, if any.
    pub fn action(&self, framework: &Framework) -> Result<Option<Arc<CellAction>>, IoError> {
        let Some(entry) = &self.group else { return Ok(None) };
        let kind = match entry.kind.as_str() {
            "cyclic" => GroupKind::Cyclic,
            "dihedral" => GroupKind::Dihedral,
            other => {
                return Err(invalid(
                    "/group/kind",
                    "UnknownGroupKind",
                    format!("unknown group kind {other:?}, expected \"cyclic\" or \"dihedral\""),
                ))
            }
        };
        let group = Arc::new(
            build_group_with_axis(kind, entry.m, entry.axis_degrees)
                .map_err(|e| invalid("/group/m", "BadOrder", e.to_string()))?,
        );
        let mut vertex_action = HashMap::new();
        for (k, generator) in entry.generators.iter().enumerate() {
            let mut perm: Vec<usize> = (0..framework.complex.vertex_count()).collect();
            for (t, (from, to)) in generator.vertex_map.iter().enumerate() {
                let pointer = format!("/group/generators/{k}/vertex_map/{t}");
                let from = framework.complex.vertex_index(from).ok_or_else(|| {
                    invalid(&pointer, "UnknownVertex", format!("unknown vertex {from:?}"))
                })?;
                let to = framework.complex.vertex_index(to).ok_or_else(|| {
                    invalid(&pointer, "UnknownVertex", format!("unknown vertex {to:?}"))
                })?;
                perm[from] = to;
            }
            vertex_action.insert(generator.name.clone(), perm);
        }
        let rep = tau(&group);
        let action = induce_action(framework, group, &vertex_action, rep)
            .map_err(|e| invalid("/group", e.code(), e.to_string()))?;
        Ok(Some(Arc::new(action)))
    }
}

impl From<&Sample> for FrameworkFile {
    fn from(sample: &Sample) -> Self {
        let complex = sample.complex().expect("bundled samples are valid");
        FrameworkFile {
            schema_version: SCHEMA_VERSION,
            name: Some(sample.name.to_string()),
            vertices: sample
                .vertices
                .iter()
                .map(|(id, p)| VertexEntry { id: id.clone(), x: p[0], y: p[1] })
                .collect(),
            edges: sample
                .edges
                .iter()
                .map(|(id, u, v)| EdgeEntry { id: id.clone(), u: u.clone(), v: v.clone() })
                .collect(),
            faces: complex
                .faces()
                .iter()
                .map(|face| FaceEntry {
                    id: face.id.clone(),
                    edges: face
                        .cycle
                        .iter()
                        .map(|&(e, sign)| OrientedEdgeEntry {
                            edge: complex.edge(e).id.clone(),
                            sign,
                        })
                        .collect(),
                    outer: face.outer,
                })
                .collect(),
            group: sample.group.as_ref().map(|g| GroupEntry {
                kind: match g.kind {
                    GroupKind::Cyclic => "cyclic".to_string(),
                    GroupKind::Dihedral => "dihedral".to_string(),
                },
                m: g.m,
                axis_degrees: g.axis_degrees,
                generators: g
                    .generators
                    .iter()
                    .map(|(name, map)| GeneratorEntry {
                        name: name.clone(),
                        vertex_map: map.clone(),
                    })
                    .collect(),
            }),
        }
    }
}

/// A complex number in output schemas.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct ComplexEntry {
    pub re: f64,
    pub im: f64,
}

impl From<Scalar> for ComplexEntry {
    fn from(z: Scalar) -> Self {
        ComplexEntry { re: z.re, im: z.im }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct StressOutput {
    /// One entry per edge, in the complex's edge order.
    pub coefficients: Vec<StressCoefficient>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct StressCoefficient {
    pub edge: String,
    #[serde(flatten)]
    pub value: ComplexEntry,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ReciprocalOutput {
    /// One dual position per face, in the complex's face order.
    pub positions: Vec<DualPosition>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct DualPosition {
    pub face: String,
    pub x: ComplexEntry,
    pub y: ComplexEntry,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct HomologyDims {
    pub h0: usize,
    pub h1: usize,
    pub h2: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct IrrepOutput {
    pub label: String,
    pub dim: usize,
    pub force_chain_multiplicities: [u32; 3],
    pub h1_force: usize,
    pub h2_position: usize,
    pub translation_dim: usize,
    pub stresses: Vec<StressOutput>,
    /// reciprocals[k] maps to stresses[k] under the connecting homomorphism.
    pub reciprocals: Vec<ReciprocalOutput>,
    pub translations: Vec<ReciprocalOutput>,
}

/// Full analysis result: homology dimensions, Maxwell counts, and (when a
/// group is present) the per-irreducible decomposition with stress and
/// reciprocal bases.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct AnalysisOutput {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub tolerance_rel: f64,
    pub tolerance_abs: f64,
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub force_homology: HomologyDims,
    pub constant_homology: HomologyDims,
    pub position_homology: HomologyDims,
    pub maxwell_lhs: i64,
    pub maxwell_rhs: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symmetric_euler_force_chain: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symmetric_euler_force_homology: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub irreps: Option<Vec<IrrepOutput>>,
    /// Plain (unsymmetrized) stress basis, present without a group block.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stresses: Option<Vec<StressOutput>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GroupSummary {
    pub kind: String,
    pub m: u32,
    pub order: usize,
    pub irrep_labels: Vec<String>,
    pub irrep_dims: Vec<usize>,
}

pub fn stress_output(framework: &Framework, stress: &SelfStress) -> StressOutput {
    StressOutput {
        coefficients: stress
            .coefficients
            .iter()
            .enumerate()
            .map(|(e, &w)| StressCoefficient {
                edge: framework.complex.edge(e).id.clone(),
                value: w.into(),
            })
            .collect(),
    }
}

pub fn reciprocal_output(framework: &Framework, diagram: &ReciprocalDiagram) -> ReciprocalOutput {
    ReciprocalOutput {
        positions: diagram
            .positions
            .iter()
            .enumerate()
            .map(|(f, p)| DualPosition {
                face: framework.complex.face(f).id.clone(),
                x: p[0].into(),
                y: p[1].into(),
            })
            .collect(),
    }
}

pub fn irrep_outputs(framework: &Framework, report: &GraphicStaticsReport) -> Vec<IrrepOutput> {
    report
        .irreps
        .iter()
        .map(|irrep| IrrepOutput {
            label: irrep.label.clone(),
            dim: irrep.dim,
            force_chain_multiplicities: irrep.force_chain_multiplicities,
            h1_force: irrep.h1_force_dim,
            h2_position: irrep.h2_position_dim,
            translation_dim: irrep.translation_dim,
            stresses: irrep.stresses.iter().map(|s| stress_output(framework, s)).collect(),
            reciprocals: irrep
                .reciprocals
                .iter()
                .map(|d| reciprocal_output(framework, d))
                .collect(),
            translations: irrep
                .translations
                .iter()
                .map(|d| reciprocal_output(framework, d))
                .collect(),
        })
        .collect()
}

/// Serialize any value with floats written as 17-significant-digit
/// scientific notation; deterministic byte-for-byte for identical inputs.
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut serializer = serde_json::Serializer::with_formatter(&mut out, SciFormatter);
    value.serialize(&mut serializer).expect("in-memory serialization cannot fail");
    String::from_utf8(out).expect("serde_json emits utf-8")
}

/// Compact JSON formatter with `{:.16e}` floats (17 significant digits).
struct SciFormatter;

impl serde_json::ser::Formatter for SciFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.7e}")
    }
}

/// Write a file atomically: to a temporary sibling first, then rename.
pub fn write_atomic(path: &std::path::Path, contents: &str) -> Result<(), IoError> {
    let directory = path.parent().unwrap_or_else(|| std::path::Path::new("."));
    std::fs::create_dir_all(directory)?;
    let (temp_path, mut file) = tempfile_in(directory)?;
    file.write_all(contents.as_bytes())?;
    file.sync_all()?;
    drop(file);
    std::fs::rename(&temp_path, path)?;
    Ok(())
}

fn tempfile_in(
    directory: &std::path::Path,
) -> Result<(std::path::PathBuf, std::fs::File), IoError> {
    use std::time::{SystemTime, UNIX_EPOCH};
    let stamp = SystemTime::now().duration_since(UNIX_EPOCH).unwrap_or_default().as_nanos();
    let path = directory.join(format!(".equigs-tmp-{stamp}-{}", std::process::id()));
    let file = std::fs::OpenOptions::new().write(true).create_new(true).open(&path)?;
    Ok((path, file))
}

/// The default tolerance, overridable through the `COSHEAF_TOL` environment
/// variable (sets the relative cutoff; the absolute cutoff scales by 10).
pub fn tolerance_from_env() -> Tolerance {
    match std::env::var("COSHEAF_TOL") {
        Ok(text) => match text.trim().parse::<f64>() {
            Ok(rel) if rel > 0.0 && rel.is_finite() => Tolerance { rel, abs: 10.0 * rel },
            _ => Tolerance::default(),
        },
        Err(_) => Tolerance::default(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    #[test]
    fn samples_round_trip_through_schema() {
        for sample in samples::all_samples() {
            let file = FrameworkFile::from(&sample);
            let text = to_json_string(&file);
            let parsed = parse_framework_file(&text).unwrap();
            assert_eq!(parsed, file, "sample {}", sample.name);
            let framework = parsed.framework().unwrap();
            assert_eq!(framework.complex.vertex_count(), sample.vertices.len());
            let action = parsed.action(&framework).unwrap();
            assert_eq!(action.is_some(), sample.group.is_some());
        }
    }

    #[test]
    fn parse_error_reports_position() {
        let err = parse_framework_file("{ \"schema_version\": 1, ").unwrap_err();
        assert!(matches!(err, IoError::Parse { line: 1, .. }));
    }

    #[test]
    fn unknown_vertex_reports_pointer() {
        let text = r#"{
            "schema_version": 1,
            "vertices": [{"id": "a", "x": 0.0, "y": 0.0}],
            "edges": [{"id": "e", "u": "a", "v": "missing"}]
        }"#;
        let file = parse_framework_file(text).unwrap();
        let err = file.framework().unwrap_err();
        match err {
            IoError::Invalid { pointer, .. } => assert_eq!(pointer, "/edges/0/v"),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn bad_group_kind_reports_pointer() {
        let mut file = FrameworkFile::from(&samples::desargues());
        file.group.as_mut().unwrap().kind = "frieze".into();
        let framework = file.framework().unwrap();
        let err = file.action(&framework).unwrap_err();
        match err {
            IoError::Invalid { pointer, .. } => assert_eq!(pointer, "/group/kind"),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn floats_have_seventeen_digits() {
        #[derive(Serialize)]
        struct One {
            x: f64,
        }
        let text = to_json_string(&One { x: 1.0 / 3.0 });
        assert_eq!(text, "{\"x\":3.3333333333333331e-1}");
        let back: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back["x"].as_f64().unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn serialization_is_deterministic() {
        let file = FrameworkFile::from(&samples::d6_wheel());
        assert_eq!(to_json_string(&file), to_json_string(&file.clone()));
    }

    #[test]
    fn atomic_write_replaces_content() {
        let directory =
            std::env::temp_dir().join(format!("equigs-io-test-{}", std::process::id()));
        let path = directory.join("out.json");
        write_atomic(&path, "first").unwrap();
        write_atomic(&path, "second").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "second");
        std::fs::remove_dir_all(&directory).unwrap();
    }

    #[test]
    fn env_tolerance_override() {
        std::env::set_var("COSHEAF_TOL", "1e-7");
        let tol = tolerance_from_env();
        std::env::remove_var("COSHEAF_TOL");
        assert_eq!(tol.rel, 1e-7);
        assert_eq!(tol.abs, 1e-6);
        assert_eq!(tolerance_from_env(), Tolerance::default());
    }
}
