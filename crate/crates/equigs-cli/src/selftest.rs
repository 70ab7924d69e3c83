//! Built-in sample suite: every bundled framework is pushed through the full
//! pipeline and the structural identities are checked, one line per check.

use std::sync::Arc;

use equigs::complex::{check_planarity, validate};
use equigs::cosheaf::{homology_dims, ChainComplex};
use equigs::equivariant::{
    build_constant_rep, build_force_rep, build_position_rep, verify_cube, verify_equivariance,
};
use equigs::io::{parse_framework_file, to_json_string, FrameworkFile};
use equigs::numerics::Tolerance;
use equigs::samples::all_samples;
use equigs::statics::{
    build_graphic_statics_sequence, parallelism_defect, reciprocal_from_stress, self_stresses,
    stress_from_reciprocal, symmetric_graphic_statics,
};

use crate::Failure;

type Check = (String, Result<(), String>);

pub fn run(verbose: bool, tol: &Tolerance) -> Result<(), Failure> {
    let mut checks: Vec<Check> = Vec::new();
    for sample in all_samples() {
        sample_checks(&sample, tol, &mut checks);
    }

    let mut failures = 0usize;
    for (name, result) in &checks {
        match result {
            Ok(()) => {
                if verbose {
                    println!("ok   {name}");
                }
            }
            Err(why) => {
                failures += 1;
                println!("FAIL {name}: {why}");
            }
        }
    }
    println!("selftest: {} checks, {} failed", checks.len(), failures);
    if failures == 0 {
        Ok(())
    } else {
        let first = checks.iter().find(|(_, r)| r.is_err()).expect("failures counted");
        Err(Failure::internal(format!("invariant violated: {}", first.0)))
    }
}

fn check(checks: &mut Vec<Check>, name: String, result: Result<(), String>) {
    checks.push((name, result));
}

fn sample_checks(sample: &equigs::samples::Sample, tol: &Tolerance, checks: &mut Vec<Check>) {
    let name = sample.name;

    let framework = match sample.framework() {
        Ok(framework) => framework,
        Err(e) => {
            check(checks, format!("{name}: build"), Err(e.to_string()));
            return;
        }
    };
    check(checks, format!("{name}: build"), Ok(()));

    check(checks, format!("{name}: schema round trip"), {
        let file = FrameworkFile::from(sample);
        let text = to_json_string(&file);
        match parse_framework_file(&text) {
            Ok(parsed) if parsed == file => Ok(()),
            Ok(_) => Err("reparsed file differs".into()),
            Err(e) => Err(e.to_string()),
        }
    });

    check(checks, format!("{name}: incidence axioms"), {
        let report = validate(&framework.complex);
        if report.is_empty() {
            Ok(())
        } else {
            Err(format!("{} violations, first: {}", report.len(), report[0]))
        }
    });

    check(checks, format!("{name}: planarity"), {
        let report = check_planarity(&framework);
        if report.is_empty() {
            Ok(())
        } else {
            Err(format!("{} crossings", report.len()))
        }
    });

    let sequence = match build_graphic_statics_sequence(&framework, tol) {
        Ok(sequence) => sequence,
        Err(e) => {
            check(checks, format!("{name}: graphic statics sequence"), Err(e.to_string()));
            return;
        }
    };
    check(checks, format!("{name}: graphic statics sequence"), Ok(()));

    // Euler identity for all three cosheaves.
    for (label, cosheaf) in
        [("force", &sequence.force), ("constant", &sequence.constant), ("position", &sequence.position)]
    {
        check(checks, format!("{name}: euler identity ({label})"), {
            match ChainComplex::assemble(cosheaf) {
                Ok(chain) => {
                    let dims = homology_dims(&chain, tol);
                    let homology_euler = dims[0] as i64 - dims[1] as i64 + dims[2] as i64;
                    if homology_euler == chain.euler_characteristic() {
                        Ok(())
                    } else {
                        Err(format!(
                            "chain {} != homology {homology_euler}",
                            chain.euler_characteristic()
                        ))
                    }
                }
                Err(e) => Err(e.to_string()),
            }
        });
    }

    let stresses = self_stresses(&framework, tol).unwrap_or_default();
    check(checks, format!("{name}: maxwell"), {
        equigs::statics::maxwell_check(&framework, tol)
            .map(|_| ())
            .map_err(|e| e.to_string())
    });

    check(checks, format!("{name}: reciprocal exactness"), {
        match ChainComplex::assemble(&sequence.position) {
            Ok(chain) => {
                let dims = homology_dims(&chain, tol);
                if dims[2] == stresses.len() + 2 {
                    Ok(())
                } else {
                    Err(format!("dim H2P = {} but H1F + 2 = {}", dims[2], stresses.len() + 2))
                }
            }
            Err(e) => Err(e.to_string()),
        }
    });

    for (k, stress) in stresses.iter().enumerate() {
        check(checks, format!("{name}: stress {k} round trip"), {
            match reciprocal_from_stress(&framework, stress, tol) {
                Ok(diagram) => {
                    let parallel = parallelism_defect(&framework, &diagram);
                    if parallel > 1e-8 {
                        Err(format!("parallelism defect {parallel:.3e}"))
                    } else {
                        match stress_from_reciprocal(&sequence, &diagram, tol) {
                            Ok(back) => {
                                let defect = stress
                                    .coefficients
                                    .iter()
                                    .zip(&back.coefficients)
                                    .fold(0.0f64, |acc, (a, b)| acc.max((a - b).norm()));
                                if defect <= 1e-8 {
                                    Ok(())
                                } else {
                                    Err(format!("round trip defect {defect:.3e}"))
                                }
                            }
                            Err(e) => Err(e.to_string()),
                        }
                    }
                }
                Err(e) => Err(e.to_string()),
            }
        });
    }

    let Some(group_block) = &sample.group else { return };
    let action = match equigs::equivariant::action_for_sample(&framework, group_block) {
        Ok(action) => Arc::new(action),
        Err(e) => {
            check(checks, format!("{name}: group action"), Err(e.to_string()));
            return;
        }
    };
    check(checks, format!("{name}: group action"), Ok(()));

    check(checks, format!("{name}: sign coherence"), {
        if action.sign_coherence_defect() == 0 {
            Ok(())
        } else {
            Err("orientation signs violate the coherence rule".into())
        }
    });

    let rho = match build_force_rep(sequence.force.clone(), action.clone(), tol) {
        Ok(rep) => rep,
        Err(e) => {
            check(checks, format!("{name}: force representation"), Err(e.to_string()));
            return;
        }
    };
    let eta = build_constant_rep(sequence.constant.clone(), action.clone());
    let position_rep = match build_position_rep(sequence.position.clone(), action.clone(), tol) {
        Ok(rep) => rep,
        Err(e) => {
            check(checks, format!("{name}: position representation"), Err(e.to_string()));
            return;
        }
    };
    for (label, rep) in
        [("force", &rho), ("constant", &eta), ("position", &position_rep)]
    {
        check(checks, format!("{name}: equivariance ({label})"), {
            let report = verify_equivariance(rep, tol);
            if report.is_empty() {
                Ok(())
            } else {
                Err(format!("{} failing cells, first {}", report.len(), report[0].cell))
            }
        });
    }
    check(checks, format!("{name}: cube (inclusion)"), {
        let report = verify_cube(&sequence.include, &rho, &eta, tol);
        if report.is_empty() {
            Ok(())
        } else {
            Err(format!("{} failing faces", report.len()))
        }
    });
    check(checks, format!("{name}: cube (projection)"), {
        let report = verify_cube(&sequence.project, &eta, &position_rep, tol);
        if report.is_empty() {
            Ok(())
        } else {
            Err(format!("{} failing faces", report.len()))
        }
    });

    let report = match symmetric_graphic_statics(&framework, &action, tol) {
        Ok(report) => report,
        Err(e) => {
            check(checks, format!("{name}: symmetric decomposition"), Err(e.to_string()));
            return;
        }
    };
    check(checks, format!("{name}: symmetric decomposition"), Ok(()));

    check(checks, format!("{name}: symmetric euler identity"), {
        if report.euler_chain_force == report.euler_homology_force {
            Ok(())
        } else {
            Err(format!(
                "chain {:?} != homology {:?}",
                report.euler_chain_force, report.euler_homology_force
            ))
        }
    });

    check(checks, format!("{name}: isotypic bookkeeping"), {
        let h1: usize = report.irreps.iter().map(|r| r.h1_force_dim).sum();
        let h2: usize = report.irreps.iter().map(|r| r.h2_position_dim).sum();
        if h1 == report.h1_force && h2 == report.h2_position {
            Ok(())
        } else {
            Err(format!("components sum to ({h1}, {h2})"))
        }
    });

    check(checks, format!("{name}: per-irrep exactness"), {
        let bad: Vec<String> = report
            .irreps
            .iter()
            .filter(|r| r.h2_position_dim != r.h1_force_dim + r.translation_dim)
            .map(|r| r.label.clone())
            .collect();
        if bad.is_empty() {
            Ok(())
        } else {
            Err(format!("fails at {}", bad.join(", ")))
        }
    });

    // Pinned counts for the reconstructions.
    match name {
        "desargues" => {
            check(checks, format!("{name}: pinned counts"), {
                let irrep = &report.irreps[0];
                if irrep.force_chain_multiplicities[0] == 6
                    && irrep.force_chain_multiplicities[1] == 6
                    && report.euler_chain_force[0] == 0
                    && report.h1_force == 1
                    && irrep.h1_force_dim == 1
                    && report.irreps[1].h2_position_dim == 1
                    && report.irreps[1].translation_dim == 1
                {
                    Ok(())
                } else {
                    Err("mirror-symmetric counts changed".into())
                }
            });
        }
        "d4_grid" => {
            check(checks, format!("{name}: pinned counts"), {
                let klein_last = report.irreps.last().expect("four irreducibles");
                if report.h1_force == 4 && report.h2_position == 6 && klein_last.h2_position_dim == 0
                {
                    Ok(())
                } else {
                    Err(format!(
                        "H1F {} H2P {} last irrep {}",
                        report.h1_force, report.h2_position, klein_last.h2_position_dim
                    ))
                }
            });
        }
        "d6_wheel" => {
            check(checks, format!("{name}: pinned counts"), {
                if report.h1_force == 4 && report.h2_position == 6 {
                    Ok(())
                } else {
                    Err(format!("H1F {} H2P {}", report.h1_force, report.h2_position))
                }
            });
        }
        _ => {}
    }
}
