//! Bundled sample frameworks: small classics plus reconstructions of
//! symmetric wheel, star, grid and flower geometries with their symmetry
//! groups.
//!
//! Faces are declared as vertex cycles and oriented automatically: interior
//! faces counterclockwise, the outer face clockwise.

use crate::complex::{build_complex, BuildError, CellComplex, FaceSpec, Framework};
use crate::groups::GroupKind;

/// A named framework with optional symmetry data, in a declarative form that
/// converts to a [`Framework`] plus group action.
#[derive(Clone, Debug)]
pub struct Sample {
    pub name: &'static str,
    pub description: &'static str,
    pub vertices: Vec<(String, [f64; 2])>,
    /// `(id, tail, head)`.
    pub edges: Vec<(String, String, String)>,
    /// `(id, vertex cycle, outer flag)`; orientation is normalized on build.
    pub faces: Vec<(String, Vec<String>, bool)>,
    pub group: Option<SampleGroup>,
}

#[derive(Clone, Debug)]
pub struct SampleGroup {
    pub kind: GroupKind,
    pub m: u32,
    pub axis_degrees: f64,
    /// Generator name ("r" or "s") with its vertex permutation.
    pub generators: Vec<(String, Vec<(String, String)>)>,
}

impl Sample {
    pub fn complex(&self) -> Result<CellComplex, BuildError> {
        let positions: std::collections::HashMap<&str, [f64; 2]> =
            self.vertices.iter().map(|(id, p)| (id.as_str(), *p)).collect();
        let faces = self
            .faces
            .iter()
            .map(|(id, cycle, outer)| {
                let mut cycle = cycle.clone();
                let area = shoelace(&cycle, &positions);
                let want_ccw = !outer;
                if (area > 0.0) != want_ccw {
                    cycle.reverse();
                }
                face_spec_from_vertices(id.clone(), &cycle, &self.edges, *outer)
            })
            .collect::<Result<Vec<_>, _>>()?;
        build_complex(
            self.vertices.iter().map(|(id, _)| id.clone()).collect(),
            self.edges.clone(),
            faces,
        )
    }

    pub fn framework(&self) -> Result<Framework, BuildError> {
        let complex = self.complex()?;
        let positions = self.vertices.iter().map(|(_, p)| *p).collect();
        Framework::new(complex, positions)
    }
}

fn shoelace(cycle: &[String], positions: &std::collections::HashMap<&str, [f64; 2]>) -> f64 {
    let mut area = 0.0;
    for k in 0..cycle.len() {
        let a = positions[cycle[k].as_str()];
        let b = positions[cycle[(k + 1) % cycle.len()].as_str()];
        area += a[0] * b[1] - b[0] * a[1];
    }
    area / 2.0
}

/// Convert a vertex cycle into an oriented edge cycle, looking up each
/// consecutive pair in the edge list.
fn face_spec_from_vertices(
    id: String,
    cycle: &[String],
    edges: &[(String, String, String)],
    outer: bool,
) -> Result<FaceSpec, BuildError> {
    let mut edge_cycle = Vec::with_capacity(cycle.len());
    for k in 0..cycle.len() {
        let a = &cycle[k];
        let b = &cycle[(k + 1) % cycle.len()];
        let found = edges.iter().find_map(|(eid, u, v)| {
            if u == a && v == b {
                Some((eid.clone(), 1i8))
            } else if u == b && v == a {
                Some((eid.clone(), -1i8))
            } else {
                None
            }
        });
        match found {
            Some(entry) => edge_cycle.push(entry),
            None => {
                return Err(BuildError::BadCycle {
                    face: id,
                    reason: format!("no edge between {a:?} and {b:?}"),
                })
            }
        }
    }
    Ok(FaceSpec { id, cycle: edge_cycle, outer })
}

fn edge(u: &str, v: &str) -> (String, String, String) {
    (format!("{u}-{v}"), u.to_string(), v.to_string())
}

fn polar(radius: f64, degrees: f64) -> [f64; 2] {
    let t = degrees.to_radians();
    [radius * t.cos(), radius * t.sin()]
}

/// Equilateral triangle, inner and outer face, no symmetry block.
pub fn triangle() -> Sample {
    let vertices = vec![
        ("a".to_string(), polar(1.0, 90.0)),
        ("b".to_string(), polar(1.0, 210.0)),
        ("c".to_string(), polar(1.0, 330.0)),
    ];
    Sample {
        name: "triangle",
        description: "equilateral triangle, rigid and stress-free",
        vertices,
        edges: vec![edge("a", "b"), edge("b", "c"), edge("c", "a")],
        faces: vec![
            ("inner".into(), vec!["a".into(), "b".into(), "c".into()], false),
            ("outer".into(), vec!["a".into(), "b".into(), "c".into()], true),
        ],
        group: None,
    }
}

/// Unit square 4-cycle (no diagonals): one mechanism, full D₈ symmetry.
pub fn square() -> Sample {
    let vertices = vec![
        ("a".to_string(), [-1.0, -1.0]),
        ("b".to_string(), [1.0, -1.0]),
        ("c".to_string(), [1.0, 1.0]),
        ("d".to_string(), [-1.0, 1.0]),
    ];
    let perm = |pairs: &[(&str, &str)]| {
        pairs.iter().map(|(x, y)| (x.to_string(), y.to_string())).collect()
    };
    Sample {
        name: "square",
        description: "square 4-cycle with one shear mechanism",
        vertices,
        edges: vec![edge("a", "b"), edge("b", "c"), edge("c", "d"), edge("d", "a")],
        faces: vec![
            ("inner".into(), vec!["a".into(), "b".into(), "c".into(), "d".into()], false),
            ("outer".into(), vec!["a".into(), "b".into(), "c".into(), "d".into()], true),
        ],
        group: Some(SampleGroup {
            kind: GroupKind::Dihedral,
            m: 4,
            axis_degrees: 0.0,
            generators: vec![
                ("r".into(), perm(&[("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")])),
                ("s".into(), perm(&[("a", "d"), ("b", "c"), ("c", "b"), ("d", "a")])),
            ],
        }),
    }
}

/// Two triangles in perspective joined by three spokes, mirror-symmetric
/// about the vertical axis. The mirror forces the perspective position, so
/// the framework carries exactly one (mirror-symmetric) self-stress.
pub fn desargues() -> Sample {
    let vertices = vec![
        ("A".to_string(), [-2.0, 0.0]),
        ("B".to_string(), [0.0, 3.0]),
        ("C".to_string(), [2.0, 0.0]),
        ("D".to_string(), [-0.8, 0.9]),
        ("E".to_string(), [0.0, 1.8]),
        ("F".to_string(), [0.8, 0.9]),
    ];
    let f = |ids: &[&str]| ids.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    Sample {
        name: "desargues",
        description: "Desargues configuration with one mirror-symmetric self-stress",
        vertices,
        edges: vec![
            edge("A", "B"),
            edge("B", "C"),
            edge("C", "A"),
            edge("D", "E"),
            edge("E", "F"),
            edge("F", "D"),
            edge("A", "D"),
            edge("B", "E"),
            edge("C", "F"),
        ],
        faces: vec![
            ("mid".into(), f(&["D", "F", "E"]), false),
            ("left".into(), f(&["A", "D", "E", "B"]), false),
            ("right".into(), f(&["B", "E", "F", "C"]), false),
            ("bottom".into(), f(&["C", "F", "D", "A"]), false),
            ("outer".into(), f(&["A", "B", "C"]), true),
        ],
        group: Some(SampleGroup {
            kind: GroupKind::Dihedral,
            m: 1,
            axis_degrees: 90.0,
            generators: vec![(
                "s".into(),
                vec![
                    ("A".into(), "C".into()),
                    ("B".into(), "B".into()),
                    ("C".into(), "A".into()),
                    ("D".into(), "F".into()),
                    ("E".into(), "E".into()),
                    ("F".into(), "D".into()),
                ],
            )],
        }),
    }
}

/// Wheel with an `m`-gon hub ring, an offset `m`-gon rim, antiprism lacing,
/// and a hub vertex: the triangulated double-ring wheels behind the dihedral
/// samples.
fn double_ring_wheel(
    name: &'static str,
    description: &'static str,
    m: u32,
    outer_radius: f64,
    inner_radius: f64,
    inner_offset_degrees: f64,
    group: Option<SampleGroup>,
) -> Sample {
    let n = m as usize;
    let step = 360.0 / m as f64;
    let mut vertices = vec![("hub".to_string(), [0.0, 0.0])];
    for k in 0..n {
        vertices.push((format!("o{k}"), polar(outer_radius, step * k as f64)));
    }
    for k in 0..n {
        vertices.push((
            format!("i{k}"),
            polar(inner_radius, step * k as f64 + inner_offset_degrees),
        ));
    }
    let mut edges = Vec::new();
    for k in 0..n {
        let next = (k + 1) % n;
        edges.push(edge(&format!("o{k}"), &format!("o{next}")));
        edges.push(edge(&format!("i{k}"), &format!("i{next}")));
        edges.push(edge(&format!("o{k}"), &format!("i{k}")));
        edges.push(edge(&format!("i{k}"), &format!("o{next}")));
        edges.push(edge("hub", &format!("i{k}")));
    }
    let mut faces = Vec::new();
    for k in 0..n {
        let next = (k + 1) % n;
        faces.push((
            format!("lat{k}"),
            vec![format!("o{k}"), format!("i{k}"), format!("o{next}")],
            false,
        ));
        faces.push((
            format!("web{k}"),
            vec![format!("i{k}"), format!("i{next}"), format!("o{next}")],
            false,
        ));
        faces.push((
            format!("hubface{k}"),
            vec!["hub".to_string(), format!("i{k}"), format!("i{next}")],
            false,
        ));
    }
    faces.push((
        "outer".to_string(),
        (0..n).map(|k| format!("o{k}")).collect(),
        true,
    ));
    Sample { name, description, vertices, edges, faces, group }
}

fn rotation_generator(m: u32) -> (String, Vec<(String, String)>) {
    let n = m as usize;
    let mut map = vec![("hub".to_string(), "hub".to_string())];
    for k in 0..n {
        map.push((format!("o{k}"), format!("o{}", (k + 1) % n)));
        map.push((format!("i{k}"), format!("i{}", (k + 1) % n)));
    }
    ("r".to_string(), map)
}

/// Mirror about the x-axis for a double-ring wheel whose inner ring is offset
/// by half a step: o_k -> o_{-k}, i_k -> i_{-k-1}.
fn wheel_mirror_generator(m: u32) -> (String, Vec<(String, String)>) {
    let n = m as i64;
    let wrap = |x: i64| x.rem_euclid(n) as usize;
    let mut map = vec![("hub".to_string(), "hub".to_string())];
    for k in 0..n {
        map.push((format!("o{k}"), format!("o{}", wrap(-k))));
        map.push((format!("i{k}"), format!("i{}", wrap(-k - 1))));
    }
    ("s".to_string(), map)
}

/// Triangular double-ring wheel with full D₆ symmetry.
pub fn d6_wheel() -> Sample {
    double_ring_wheel(
        "d6_wheel",
        "triangular double-ring wheel with D6 symmetry",
        3,
        2.0,
        0.8,
        60.0,
        Some(SampleGroup {
            kind: GroupKind::Dihedral,
            m: 3,
            axis_degrees: 0.0,
            generators: vec![rotation_generator(3), wheel_mirror_generator(3)],
        }),
    )
}

/// Square double-ring star with full D₈ symmetry.
pub fn d8_star() -> Sample {
    double_ring_wheel(
        "d8_star",
        "square double-ring star with D8 symmetry",
        4,
        2.0,
        1.0,
        45.0,
        Some(SampleGroup {
            kind: GroupKind::Dihedral,
            m: 4,
            axis_degrees: 0.0,
            generators: vec![rotation_generator(4), wheel_mirror_generator(4)],
        }),
    )
}

/// Pentagonal antiprism flower with 5-fold rotational symmetry only: the
/// inner ring is offset away from the half-step so no mirror survives.
pub fn z5_flower() -> Sample {
    let n = 5usize;
    let step = 72.0;
    let mut vertices = Vec::new();
    for k in 0..n {
        vertices.push((format!("o{k}"), polar(2.0, 90.0 + step * k as f64)));
    }
    for k in 0..n {
        vertices.push((format!("i{k}"), polar(1.0, 90.0 + step * k as f64 + 25.0)));
    }
    let mut edges = Vec::new();
    for k in 0..n {
        let next = (k + 1) % n;
        edges.push(edge(&format!("o{k}"), &format!("o{next}")));
        edges.push(edge(&format!("i{k}"), &format!("i{next}")));
        edges.push(edge(&format!("o{k}"), &format!("i{k}")));
        edges.push(edge(&format!("i{k}"), &format!("o{next}")));
    }
    let mut faces = Vec::new();
    for k in 0..n {
        let next = (k + 1) % n;
        faces.push((
            format!("lat{k}"),
            vec![format!("o{k}"), format!("i{k}"), format!("o{next}")],
            false,
        ));
        faces.push((
            format!("web{k}"),
            vec![format!("i{k}"), format!("i{next}"), format!("o{next}")],
            false,
        ));
    }
    faces.push(("core".to_string(), (0..n).map(|k| format!("i{k}")).collect(), false));
    faces.push(("outer".to_string(), (0..n).map(|k| format!("o{k}")).collect(), true));
    let mut rotation = Vec::new();
    for k in 0..n {
        rotation.push((format!("o{k}"), format!("o{}", (k + 1) % n)));
        rotation.push((format!("i{k}"), format!("i{}", (k + 1) % n)));
    }
    Sample {
        name: "z5_flower",
        description: "pentagonal antiprism flower with 5-fold rotational symmetry",
        vertices,
        edges,
        faces,
        group: Some(SampleGroup {
            kind: GroupKind::Cyclic,
            m: 5,
            axis_degrees: 0.0,
            generators: vec![("r".to_string(), rotation)],
        }),
    }
}

/// Terraced quad patch with Klein four-group symmetry: five nested aligned
/// rectangles joined by radial corner spokes. Each adjacent pair of rings is
/// the plan view of a frustum and carries one fully symmetric self-stress,
/// four in total.
pub fn d4_grid() -> Sample {
    let rings = 5usize;
    let scales = [1.0, 0.8, 0.63, 0.5, 0.4];
    let (a, b) = (2.0, 1.4);
    // Quadrant suffixes in counterclockwise ring order.
    let quads: [(&str, [f64; 2]); 4] =
        [("pp", [1.0, 1.0]), ("mp", [-1.0, 1.0]), ("mm", [-1.0, -1.0]), ("pm", [1.0, -1.0])];

    let mut vertices = Vec::new();
    for (i, s) in scales.iter().enumerate() {
        for (q, sign) in quads {
            vertices.push((format!("r{i}{q}"), [a * s * sign[0], b * s * sign[1]]));
        }
    }
    let mut edges = Vec::new();
    for i in 0..rings {
        for k in 0..4 {
            let from = format!("r{i}{}", quads[k].0);
            let to = format!("r{i}{}", quads[(k + 1) % 4].0);
            edges.push(edge(&from, &to));
        }
    }
    for i in 0..rings - 1 {
        for (q, _) in quads {
            edges.push(edge(&format!("r{i}{q}"), &format!("r{}{q}", i + 1)));
        }
    }
    let mut faces = Vec::new();
    for i in 0..rings - 1 {
        for k in 0..4 {
            let (qa, qb) = (quads[k].0, quads[(k + 1) % 4].0);
            faces.push((
                format!("gap{i}{k}"),
                vec![
                    format!("r{i}{qa}"),
                    format!("r{i}{qb}"),
                    format!("r{}{qb}", i + 1),
                    format!("r{}{qa}", i + 1),
                ],
                false,
            ));
        }
    }
    let core = rings - 1;
    faces.push((
        "core".into(),
        quads.iter().map(|(q, _)| format!("r{core}{q}")).collect(),
        false,
    ));
    faces.push(("outer".into(), quads.iter().map(|(q, _)| format!("r0{q}")).collect(), true));

    let swap = |pairs: &[(&str, &str)]| -> Vec<(String, String)> {
        let mut map = Vec::new();
        for i in 0..rings {
            for (x, y) in pairs {
                map.push((format!("r{i}{x}"), format!("r{i}{y}")));
            }
        }
        map
    };
    Sample {
        name: "d4_grid",
        description: "terraced quad patch with Klein four-group symmetry",
        vertices,
        edges,
        faces,
        group: Some(SampleGroup {
            kind: GroupKind::Dihedral,
            m: 2,
            axis_degrees: 0.0,
            generators: vec![
                ("r".into(), swap(&[("pp", "mm"), ("mm", "pp"), ("pm", "mp"), ("mp", "pm")])),
                ("s".into(), swap(&[("pp", "pm"), ("pm", "pp"), ("mp", "mm"), ("mm", "mp")])),
            ],
        }),
    }
}

/// Every bundled sample, in a fixed order.
pub fn all_samples() -> Vec<Sample> {
    vec![triangle(), square(), desargues(), d4_grid(), d6_wheel(), d8_star(), z5_flower()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{check_planarity, validate};

    #[test]
    fn all_samples_build_and_validate() {
        for sample in all_samples() {
            let framework = sample.framework().unwrap_or_else(|e| {
                panic!("sample {} failed to build: {e}", sample.name);
            });
            assert!(
                validate(&framework.complex).is_empty(),
                "sample {} fails incidence axioms",
                sample.name
            );
            assert!(
                framework.complex.is_sphere_closed(),
                "sample {} is not sphere-closed",
                sample.name
            );
            let crossings = check_planarity(&framework);
            assert!(
                crossings.is_empty(),
                "sample {} has edge crossings: {crossings:?}",
                sample.name
            );
        }
    }

    #[test]
    fn sample_names_are_unique() {
        let mut names: Vec<_> = all_samples().iter().map(|s| s.name).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), all_samples().len());
    }
}
