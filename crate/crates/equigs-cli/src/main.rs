//! Command-line interface: validate framework files, run the full analysis,
//! emit reciprocal diagrams as SVG and JSON, and self-test the bundled
//! samples.
//!
//! Exit codes: 0 success, 1 validation failure, 2 I/O or parse error,
//! 3 internal invariant violation.

mod selftest;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use equigs::analysis::{analyze, Analysis, AnalysisError};
use equigs::complex::check_planarity;
use equigs::io::{
    self, parse_framework_file, reciprocal_output, stress_output, to_json_string, FrameworkFile,
    IoError,
};
use equigs::numerics::{Scalar, Tolerance};
use equigs::render::render_pair;
use equigs::statics::{ReciprocalDiagram, SelfStress};

#[derive(Parser)]
#[command(name = "equigs", version, about = "Cosheaf homology of planar symmetric frameworks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a framework file: complex axioms, planarity, symmetry action.
    Validate {
        path: PathBuf,
    },
    /// Compute homology, Maxwell counts and the per-irreducible
    /// decomposition of stresses and reciprocal diagrams.
    Analyze {
        path: PathBuf,
        /// Write the full analysis as JSON to this path.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Skip the symmetry decomposition even if a group block is present.
        #[arg(long)]
        no_group: bool,
    },
    /// Emit reciprocal-diagram SVGs (primal left, dual right) and a JSON
    /// file with all coordinates.
    Reciprocal {
        path: PathBuf,
        /// Restrict to one irreducible, by label ("(2)") or 1-based index.
        #[arg(long)]
        irrep: Option<String>,
        /// Directory for the rendered SVG files.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Write all diagram coordinates as JSON to this path.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Merge complex-conjugate irreducibles into real diagram pairs.
        #[arg(long)]
        merge_conjugates: bool,
    },
    /// Run the bundled sample suite and all invariant checks.
    Selftest {
        /// List every check, not only failures.
        #[arg(long)]
        verbose: bool,
    },
}

/// Failure carrying its process exit code.
pub(crate) struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn validation(message: impl Into<String>) -> Failure {
        Failure { code: 1, message: message.into() }
    }

    pub fn io(message: impl Into<String>) -> Failure {
        Failure { code: 2, message: message.into() }
    }

    pub fn internal(message: impl Into<String>) -> Failure {
        Failure { code: 3, message: message.into() }
    }
}

impl From<IoError> for Failure {
    fn from(error: IoError) -> Failure {
        match &error {
            IoError::Parse { .. } | IoError::Io(_) => Failure::io(error.to_string()),
            IoError::Invalid { .. } => Failure::validation(error.to_string()),
        }
    }
}

impl From<AnalysisError> for Failure {
    fn from(error: AnalysisError) -> Failure {
        match &error {
            AnalysisError::File(e) => match e {
                IoError::Parse { .. } | IoError::Io(_) => Failure::io(error.to_string()),
                IoError::Invalid { .. } => Failure::validation(error.to_string()),
            },
            _ if error.is_internal() => Failure::internal(error.to_string()),
            _ => Failure::validation(error.to_string()),
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let tol = io::tolerance_from_env();
    let result = match cli.command {
        Command::Validate { path } => cmd_validate(&path),
        Command::Analyze { path, json, no_group } => {
            cmd_analyze(&path, json.as_deref(), no_group, &tol)
        }
        Command::Reciprocal { path, irrep, svg, json, merge_conjugates } => cmd_reciprocal(
            &path,
            irrep.as_deref(),
            svg.as_deref(),
            json.as_deref(),
            merge_conjugates,
            &tol,
        ),
        Command::Selftest { verbose } => selftest::run(verbose, &tol),
    };
    if let Err(failure) = result {
        eprintln!("error: {}", failure.message);
        std::process::exit(failure.code);
    }
}

fn load(path: &Path) -> Result<FrameworkFile, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::io(format!("cannot read {}: {e}", path.display())))?;
    Ok(parse_framework_file(&text)?)
}

fn cmd_validate(path: &Path) -> Result<(), Failure> {
    let file = load(path)?;
    let mut issues = Vec::new();
    let framework = match file.framework() {
        Ok(framework) => Some(framework),
        Err(e) => {
            issues.push(issue_json(&e));
            None
        }
    };
    if let Some(framework) = &framework {
        for violation in equigs::complex::validate(&framework.complex) {
            issues.push(serde_json::json!({
                "code": "NonRegular",
                "message": violation.to_string(),
            }));
        }
        for crossing in check_planarity(framework) {
            issues.push(serde_json::json!({
                "code": "NotPlanar",
                "message": format!(
                    "edges {:?} and {:?} intersect outside shared endpoints",
                    crossing.edge_a, crossing.edge_b
                ),
            }));
        }
        if let Err(e) = file.action(framework) {
            issues.push(issue_json(&e));
        }
    }
    let count = issues.len();
    let report = serde_json::json!({
        "file": path.display().to_string(),
        "status": if count == 0 { "ok" } else { "invalid" },
        "issues": issues,
    });
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    if count == 0 {
        Ok(())
    } else {
        Err(Failure::validation(format!("{count} issue(s) found")))
    }
}

fn issue_json(error: &IoError) -> serde_json::Value {
    match error {
        IoError::Invalid { pointer, code, message } => serde_json::json!({
            "code": code,
            "pointer": pointer,
            "message": message,
        }),
        other => serde_json::json!({
            "code": "Io",
            "message": other.to_string(),
        }),
    }
}

fn cmd_analyze(
    path: &Path,
    json: Option<&Path>,
    no_group: bool,
    tol: &Tolerance,
) -> Result<(), Failure> {
    let file = load(path)?;
    let output = analyze(&file, no_group, tol)?.output;

    println!(
        "framework: {} ({} vertices, {} edges, {} faces)",
        output.name.as_deref().unwrap_or("unnamed"),
        output.vertices,
        output.edges,
        output.faces
    );
    println!(
        "self-stresses dim H1F = {}   motions dim H0F = {}   reciprocals dim H2P = {}",
        output.force_homology.h1, output.force_homology.h0, output.position_homology.h2
    );
    println!("maxwell: {} = {}", output.maxwell_lhs, output.maxwell_rhs);
    if let (Some(irreps), Some(chain), Some(homology)) = (
        &output.irreps,
        &output.symmetric_euler_force_chain,
        &output.symmetric_euler_force_homology,
    ) {
        println!(
            "{:>8} {:>4} {:>7} {:>7} {:>6} {:>12} {:>12}",
            "irrep", "dim", "H1F", "H2P", "transl", "euler(chain)", "euler(hom)"
        );
        for (j, irrep) in irreps.iter().enumerate() {
            println!(
                "{:>8} {:>4} {:>7} {:>7} {:>6} {:>12} {:>12}",
                irrep.label,
                irrep.dim,
                irrep.h1_force,
                irrep.h2_position,
                irrep.translation_dim,
                chain[j],
                homology[j]
            );
        }
    }
    if let Some(out_path) = json {
        io::write_atomic(out_path, &to_json_string(&output))?;
        println!("analysis written to {}", out_path.display());
    }
    Ok(())
}

/// Resolve an --irrep selector: a label like "(2)" / "(01)" or a 1-based
/// index.
fn resolve_irrep(selector: &str, labels: &[String]) -> Result<usize, Failure> {
    if let Some(j) = labels.iter().position(|l| l == selector) {
        return Ok(j);
    }
    if let Ok(index) = selector.parse::<usize>() {
        if index >= 1 && index <= labels.len() {
            return Ok(index - 1);
        }
    }
    Err(Failure::validation(format!(
        "unknown irreducible {selector:?}; available: {} or 1..{}",
        labels.join(", "),
        labels.len()
    )))
}

fn sanitize(label: &str) -> String {
    label.chars().filter(|c| c.is_ascii_alphanumeric()).collect()
}

fn real_part(diagram: &ReciprocalDiagram) -> ReciprocalDiagram {
    ReciprocalDiagram {
        positions: diagram
            .positions
            .iter()
            .map(|p| [Scalar::new(p[0].re, 0.0), Scalar::new(p[1].re, 0.0)])
            .collect(),
    }
}

fn imag_part(diagram: &ReciprocalDiagram) -> ReciprocalDiagram {
    ReciprocalDiagram {
        positions: diagram
            .positions
            .iter()
            .map(|p| [Scalar::new(p[0].im, 0.0), Scalar::new(p[1].im, 0.0)])
            .collect(),
    }
}

fn diagram_norm(diagram: &ReciprocalDiagram) -> f64 {
    diagram.positions.iter().flat_map(|p| p.iter()).fold(0.0f64, |acc, z| acc.max(z.norm()))
}

fn stress_real(stress: &SelfStress) -> SelfStress {
    SelfStress {
        coefficients: stress.coefficients.iter().map(|w| Scalar::new(w.re, 0.0)).collect(),
    }
}

fn stress_imag(stress: &SelfStress) -> SelfStress {
    SelfStress {
        coefficients: stress.coefficients.iter().map(|w| Scalar::new(w.im, 0.0)).collect(),
    }
}

fn cmd_reciprocal(
    path: &Path,
    irrep: Option<&str>,
    svg_dir: Option<&Path>,
    json: Option<&Path>,
    merge_conjugates: bool,
    tol: &Tolerance,
) -> Result<(), Failure> {
    let file = load(path)?;
    let Analysis { framework, action, output, report, .. } = analyze(&file, false, tol)?;
    let Some(report) = report else {
        return Err(Failure::validation(
            "reciprocal decomposition needs a group block in the framework file",
        ));
    };
    let action = action.expect("a report implies an action");
    let table = equigs::groups::character_table(&action.group);

    let selected: Vec<usize> = match irrep {
        Some(selector) => vec![resolve_irrep(selector, &report.irrep_labels)?],
        None => (0..report.irrep_labels.len()).collect(),
    };

    let name = output.name.as_deref().unwrap_or("framework").to_string();
    let mut emitted = Vec::new();
    let mut rendered = 0usize;
    for &j in &selected {
        let irrep_report = &report.irreps[j];
        let conjugate = table.conjugate_partner(j);
        if merge_conjugates && conjugate < j {
            continue; // the partner already covered this pair
        }
        // Real and imaginary parts of a matched pair are matched pairs
        // again (the connecting homomorphism is a real-linear map), so the
        // merged output keeps the stress <-> reciprocal correspondence.
        let mut entries: Vec<(String, Option<SelfStress>, ReciprocalDiagram)> = Vec::new();
        for (k, (stress, diagram)) in
            irrep_report.stresses.iter().zip(&irrep_report.reciprocals).enumerate()
        {
            if merge_conjugates && conjugate != j {
                let parts = [
                    ("re", stress_real(stress), real_part(diagram)),
                    ("im", stress_imag(stress), imag_part(diagram)),
                ];
                for (tag, s, d) in parts {
                    if diagram_norm(&d) > tol.abs_for(1.0) {
                        entries.push((format!("stress{k}{tag}"), Some(s), d));
                    }
                }
            } else {
                entries.push((format!("stress{k}"), Some(stress.clone()), diagram.clone()));
            }
        }
        for (k, diagram) in irrep_report.translations.iter().enumerate() {
            if merge_conjugates && conjugate != j {
                for (tag, d) in [("re", real_part(diagram)), ("im", imag_part(diagram))] {
                    if diagram_norm(&d) > tol.abs_for(1.0) {
                        entries.push((format!("translation{k}{tag}"), None, d));
                    }
                }
            } else {
                entries.push((format!("translation{k}"), None, diagram.clone()));
            }
        }

        for (tag, stress, diagram) in &entries {
            let label = &report.irrep_labels[j];
            let title = format!("{name} irrep {label} {tag}");
            if let Some(dir) = svg_dir {
                let file_name = format!("{name}_{}_{tag}.svg", sanitize(label));
                let svg = render_pair(&framework, stress.as_ref(), diagram, &title);
                io::write_atomic(&dir.join(&file_name), &svg)?;
                rendered += 1;
            }
            emitted.push(serde_json::json!({
                "irrep": report.irrep_labels[j],
                "kind": tag,
                "stress": stress.as_ref().map(|s| stress_output(&framework, s)),
                "reciprocal": reciprocal_output(&framework, diagram),
            }));
        }
        println!(
            "irrep {}: {} stress diagram(s), {} translation(s)",
            report.irrep_labels[j],
            irrep_report.stresses.len(),
            irrep_report.translations.len()
        );
    }
    if let Some(dir) = svg_dir {
        println!("{rendered} SVG file(s) written to {}", dir.display());
    }
    if let Some(out_path) = json {
        let document = serde_json::json!({
            "schema_version": io::SCHEMA_VERSION,
            "name": name,
            "diagrams": emitted,
        });
        io::write_atomic(out_path, &to_json_string(&document))?;
        println!("coordinates written to {}", out_path.display());
    }
    Ok(())
}
