//! SVG rendering: a framework with a highlighted stress on the left, the
//! matching reciprocal diagram on the right.
//!
//! Geometry is emitted in raw world coordinates inside a group carrying the
//! viewport transform, so file coordinates equal the analysis output after
//! that declared affine map. Compression edges are red, tension blue, and
//! edges with negligible force dashed gray.

use crate::complex::Framework;
use crate::statics::{ReciprocalDiagram, SelfStress};

const PANEL: f64 = 380.0;
const MARGIN: f64 = 40.0;

/// Stress classification cutoff relative to the largest coefficient.
const FORCE_DISPLAY_TOL: f64 = 1e-7;

struct Viewport {
    scale: f64,
    tx: f64,
    ty: f64,
}

impl Viewport {
    /// Fit the world box into a panel whose left edge sits at `left`.
    fn fit(points: &[[f64; 2]], left: f64) -> Viewport {
        let (mut min, mut max) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in points {
            for k in 0..2 {
                min[k] = min[k].min(p[k]);
                max[k] = max[k].max(p[k]);
            }
        }
        if points.is_empty() || !min[0].is_finite() {
            min = [0.0; 2];
            max = [1.0; 2];
        }
        let span = (max[0] - min[0]).max(max[1] - min[1]).max(1e-9);
        let scale = PANEL / span;
        let cx = (min[0] + max[0]) / 2.0;
        let cy = (min[1] + max[1]) / 2.0;
        Viewport {
            scale,
            tx: left + PANEL / 2.0 - scale * cx,
            // The y-axis flips so the plane's orientation matches the screen.
            ty: MARGIN + PANEL / 2.0 + scale * cy,
        }
    }

    fn transform(&self) -> String {
        format!("translate({} {}) scale({} {})", self.tx, self.ty, self.scale, -self.scale)
    }
}

fn edge_style(coefficient: Option<(f64, f64)>) -> (&'static str, &'static str) {
    match coefficient {
        Some((w, scale)) if w > FORCE_DISPLAY_TOL * scale => ("#c0392b", ""),
        Some((w, scale)) if w < -FORCE_DISPLAY_TOL * scale => ("#2980b9", ""),
        Some(_) => ("#888888", " stroke-dasharray=\"6 4\""),
        None => ("#444444", ""),
    }
}

/// Render `framework` (left, with stress coloring when given) next to its
/// reciprocal diagram (right). Complex coordinates are drawn by real part;
/// imaginary parts belong to the complex-irreducible bases and are reported
/// in the JSON output instead.
pub fn render_pair(
    framework: &Framework,
    stress: Option<&SelfStress>,
    diagram: &ReciprocalDiagram,
    title: &str,
) -> String {
    let complex = &framework.complex;
    let width = 2.0 * PANEL + 3.0 * MARGIN;
    let height = PANEL + 2.0 * MARGIN;
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {width} {height}\" \
         font-family=\"sans-serif\">\n"
    ));
    svg.push_str(&format!(
        "  <text x=\"{}\" y=\"{}\" font-size=\"15\" text-anchor=\"middle\">{}</text>\n",
        width / 2.0,
        MARGIN / 2.0 + 5.0,
        escape(title)
    ));

    let stress_scale = stress.map(|s| {
        s.coefficients.iter().fold(0.0f64, |acc, w| acc.max(w.norm())).max(1e-300)
    });

    // Primal framework.
    let primal_view = Viewport::fit(framework.positions(), MARGIN);
    svg.push_str(&format!("  <g id=\"primal\" transform=\"{}\">\n", primal_view.transform()));
    for (e, edge) in complex.edges().iter().enumerate() {
        let a = framework.position(edge.tail);
        let b = framework.position(edge.head);
        let coefficient = stress
            .zip(stress_scale)
            .map(|(s, scale)| (s.coefficients[e].re, scale));
        let (color, dash) = edge_style(coefficient);
        svg.push_str(&format!(
            "    <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{color}\" \
             stroke-width=\"2.5\"{dash} vector-effect=\"non-scaling-stroke\"/>\n",
            a[0], a[1], b[0], b[1]
        ));
    }
    for p in framework.positions() {
        svg.push_str(&format!(
            "    <circle cx=\"{}\" cy=\"{}\" r=\"3.5\" fill=\"#222222\" \
             vector-effect=\"non-scaling-stroke\"/>\n",
            p[0], p[1]
        ));
    }
    svg.push_str("  </g>\n");

    // Reciprocal diagram: one dual node per face, one dual edge per primal
    // edge, joining the incident faces and parallel to the primal edge.
    let dual_points: Vec<[f64; 2]> =
        diagram.positions.iter().map(|p| [p[0].re, p[1].re]).collect();
    let dual_view = Viewport::fit(&dual_points, 2.0 * MARGIN + PANEL);
    svg.push_str(&format!("  <g id=\"dual\" transform=\"{}\">\n", dual_view.transform()));
    for (e, _) in complex.edges().iter().enumerate() {
        let faces = complex.faces_of_edge(e);
        if faces.len() != 2 {
            continue;
        }
        let a = dual_points[faces[0].0];
        let b = dual_points[faces[1].0];
        let coefficient = stress
            .zip(stress_scale)
            .map(|(s, scale)| (s.coefficients[e].re, scale));
        let (color, dash) = edge_style(coefficient);
        svg.push_str(&format!(
            "    <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{color}\" \
             stroke-width=\"2\"{dash} vector-effect=\"non-scaling-stroke\"/>\n",
            a[0], a[1], b[0], b[1]
        ));
    }
    for p in &dual_points {
        svg.push_str(&format!(
            "    <circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"#555555\" \
             vector-effect=\"non-scaling-stroke\"/>\n",
            p[0], p[1]
        ));
    }
    svg.push_str("  </g>\n</svg>\n");
    svg
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Tolerance;
    use crate::samples;
    use crate::statics::{build_graphic_statics_sequence, reciprocal_from_stress, self_stresses};

    #[test]
    fn svg_contains_raw_world_coordinates() {
        let framework = samples::desargues().framework().unwrap();
        let tol = Tolerance::default();
        let stress = self_stresses(&framework, &tol).unwrap().remove(0);
        let diagram = reciprocal_from_stress(&framework, &stress, &tol).unwrap();
        let svg = render_pair(&framework, Some(&stress), &diagram, "desargues");
        // The primal group carries the declared transform and raw positions.
        assert!(svg.contains("<g id=\"primal\" transform=\"translate("));
        let a = framework.position(0);
        assert!(svg.contains(&format!("x1=\"{}\" y1=\"{}\"", a[0], a[1])));
        // Both colors appear: the Desargues stress mixes tension and
        // compression.
        assert!(svg.contains("#c0392b") && svg.contains("#2980b9"));
        // One dual node per face.
        assert_eq!(svg.matches("r=\"3\"").count(), framework.complex.face_count());
    }

    #[test]
    fn zero_stress_renders_dashed() {
        let framework = samples::triangle().framework().unwrap();
        let tol = Tolerance::default();
        let zero = crate::statics::SelfStress {
            coefficients: vec![
                crate::numerics::Scalar::new(0.0, 0.0);
                framework.complex.edge_count()
            ],
        };
        let diagram = reciprocal_from_stress(&framework, &zero, &tol).unwrap();
        let svg = render_pair(&framework, Some(&zero), &diagram, "triangle");
        assert!(svg.contains("stroke-dasharray"));
    }
}
