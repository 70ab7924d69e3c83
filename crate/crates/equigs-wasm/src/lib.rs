//! Browser bindings for the interactive demo page: list the bundled
//! samples, run the full analysis on a framework file, and render a chosen
//! reciprocal diagram as SVG.
//!
//! Every binding speaks JSON strings so the page needs no generated types.
//! The inner functions are plain Rust and unit-tested natively; only the
//! thin exported wrappers involve wasm-bindgen.

use wasm_bindgen::prelude::*;

use equigs::analysis::analyze;
use equigs::io::{self, parse_framework_file, FrameworkFile};
use equigs::render::render_pair;
use equigs::samples::all_samples;

fn samples_inner() -> String {
    let entries: Vec<serde_json::Value> = all_samples()
        .iter()
        .map(|sample| {
            serde_json::json!({
                "name": sample.name,
                "description": sample.description,
                "group": sample.group.as_ref().map(|g| format!(
                    "{} m={}",
                    match g.kind {
                        equigs::groups::GroupKind::Cyclic => "cyclic",
                        equigs::groups::GroupKind::Dihedral => "dihedral",
                    },
                    g.m
                )),
            })
        })
        .collect();
    serde_json::to_string(&entries).expect("static data serializes")
}

fn sample_file_inner(name: &str) -> Result<String, String> {
    let sample = all_samples()
        .into_iter()
        .find(|s| s.name == name)
        .ok_or_else(|| format!("unknown sample {name:?}"))?;
    Ok(io::to_json_string(&FrameworkFile::from(&sample)))
}

fn analyze_inner(file_json: &str) -> Result<String, String> {
    let file = parse_framework_file(file_json).map_err(|e| e.to_string())?;
    let tol = equigs::numerics::Tolerance::default();
    let analysis = analyze(&file, false, &tol).map_err(|e| e.to_string())?;
    Ok(io::to_json_string(&analysis.output))
}

/// Kind selects what to draw: "stress" pairs or pure "translation" diagrams.
fn reciprocal_svg_inner(
    file_json: &str,
    irrep_label: &str,
    kind: &str,
    index: usize,
) -> Result<String, String> {
    let file = parse_framework_file(file_json).map_err(|e| e.to_string())?;
    let tol = equigs::numerics::Tolerance::default();
    let analysis = analyze(&file, false, &tol).map_err(|e| e.to_string())?;
    let report = analysis.report.ok_or("framework file has no group block")?;
    let j = report
        .irrep_labels
        .iter()
        .position(|l| l == irrep_label)
        .ok_or_else(|| format!("unknown irreducible {irrep_label:?}"))?;
    let irrep = &report.irreps[j];
    let name = analysis.output.name.as_deref().unwrap_or("framework");
    let title = format!("{name} irrep {} {kind} {index}", irrep.label);
    match kind {
        "stress" => {
            let stress = irrep
                .stresses
                .get(index)
                .ok_or_else(|| format!("irrep {} has {} stress diagrams", irrep.label, irrep.stresses.len()))?;
            let diagram = &irrep.reciprocals[index];
            Ok(render_pair(&analysis.framework, Some(stress), diagram, &title))
        }
        "translation" => {
            let diagram = irrep.translations.get(index).ok_or_else(|| {
                format!("irrep {} has {} translations", irrep.label, irrep.translations.len())
            })?;
            Ok(render_pair(&analysis.framework, None, diagram, &title))
        }
        other => Err(format!("unknown kind {other:?}, expected \"stress\" or \"translation\"")),
    }
}

#[wasm_bindgen]
pub fn samples() -> String {
    samples_inner()
}

#[wasm_bindgen]
pub fn sample_file(name: &str) -> Result<String, JsValue> {
    sample_file_inner(name).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn analyze_framework(file_json: &str) -> Result<String, JsValue> {
    analyze_inner(file_json).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn reciprocal_svg(
    file_json: &str,
    irrep_label: &str,
    kind: &str,
    index: usize,
) -> Result<String, JsValue> {
    reciprocal_svg_inner(file_json, irrep_label, kind, index).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_listing_parses() {
        let listing: Vec<serde_json::Value> = serde_json::from_str(&samples_inner()).unwrap();
        assert_eq!(listing.len(), 7);
        assert!(listing.iter().any(|e| e["name"] == "desargues"));
    }

    #[test]
    fn analysis_of_bundled_sample() {
        let file = sample_file_inner("desargues").unwrap();
        let analysis = analyze_inner(&file).unwrap();
        let value: serde_json::Value = serde_json::from_str(&analysis).unwrap();
        assert_eq!(value["force_homology"]["h1"], 1);
        assert_eq!(value["position_homology"]["h2"], 3);
    }

    #[test]
    fn svg_for_stress_and_translation() {
        let file = sample_file_inner("desargues").unwrap();
        let svg = reciprocal_svg_inner(&file, "(1)", "stress", 0).unwrap();
        assert!(svg.starts_with("<svg"));
        let svg = reciprocal_svg_inner(&file, "(2)", "translation", 0).unwrap();
        assert!(svg.contains("id=\"dual\""));
        assert!(reciprocal_svg_inner(&file, "(9)", "stress", 0).is_err());
    }
}
