//! Built-in demonstration problems.
//!
//! Three self-contained scenarios cover the three model families: the
//! circle algebra under rotation, a truncated polynomial line under a
//! solvable two-generator action, and a three-point function algebra
//! with the full bimodule tool chain. Each is a complete problem file;
//! `shipped` returns all of them for batch runs and tests.

use crate::problem::{parse_problem, ProblemFile};

/// Laurent polynomials under the rotation derivation, with the winding
/// generator declared. The unit cocycle extends to a lift isomorphic to
/// the canonical one, the half cocycle does not.
pub fn circle() -> ProblemFile {
    parse_problem(
        r#"{
        "scalars": "gaussian-rational-1",
        "truncation": 4,
        "window": 3,
        "algebra": {"model": "laurent"},
        "lie_algebra": {"names": ["xi"]},
        "action": [{"kind": "mode", "scale": "i"}],
        "windings": [{"body": {"u": "1"}}],
        "members": [
            {"name": "winding-hat", "kind": "hat", "unitary": {"body": {"u": "1"}}},
            {"name": "unit-cocycle", "kind": "extend", "cochain": [{"1": "i"}]},
            {"name": "half-cocycle", "kind": "extend", "cochain": [{"1": "1/2*i"}]},
            {"name": "product", "kind": "convolve", "left": "winding-hat", "right": "unit-cocycle"},
            {"name": "winding-hat-inverse", "kind": "inverse", "of": "winding-hat"}
        ],
        "bimodules": [{"name": "circle-line", "kind": "self"}],
        "tasks": [
            "check-action",
            "hopf-axioms",
            "convolution",
            "u-membership",
            "ce-cohomology",
            "classify-lifts",
            {"task": "lift-equivalence", "member": "winding-hat"},
            {"task": "lift-equivalence", "member": "half-cocycle"},
            "morita-check",
            "covariance",
            "forget-diagram"
        ]
    }"#,
    )
    .expect("the circle scenario parses")
}

/// Truncated polynomials under the solvable pair D1 = x d/dx,
/// D2 = x^2 d/dx with [D1, D2] = D2. The declared winding exp(ix) has
/// a trivial class, so the lattice contributes nothing; one member is
/// an exact coboundary, the other represents an independent class.
pub fn solvable() -> ProblemFile {
    parse_problem(
        r#"{
        "scalars": "gaussian-rational-1",
        "truncation": 4,
        "algebra": {"model": "truncated_poly", "order": 4},
        "lie_algebra": {
            "names": ["xi1", "xi2"],
            "brackets": [{"left": 0, "right": 1, "coeffs": ["0", "1"]}]
        },
        "action": [
            {"kind": "table", "images": {
                "x": {"x": "1"},
                "x^2": {"x^2": "2"},
                "x^3": {"x^3": "3"}
            }},
            {"kind": "table", "images": {
                "x": {"x^2": "1"},
                "x^2": {"x^3": "2"}
            }}
        ],
        "windings": [{"body": {"1": "1", "x": "i", "x^2": "-1/2", "x^3": "-1/6*i"}}],
        "members": [
            {"name": "coboundary", "kind": "extend", "cochain": [{"x^2": "2*i"}, {"x^3": "2*i"}]},
            {"name": "independent", "kind": "extend", "cochain": [{}, {"x": "i"}]}
        ],
        "tasks": [
            "check-action",
            "hopf-axioms",
            "convolution",
            "u-membership",
            "ce-cohomology",
            "classify-lifts",
            {"task": "lift-equivalence", "member": "coboundary"},
            {"task": "lift-equivalence", "member": "independent"}
        ]
    }"#,
    )
    .expect("the solvable scenario parses")
}

/// Functions on three points with a trivial action, where the whole
/// bimodule tool chain applies: self, relabeling, and column modules,
/// plus the Picard enumeration.
pub fn functions() -> ProblemFile {
    parse_problem(
        r#"{
        "scalars": "gaussian-rational-1",
        "truncation": 4,
        "algebra": {"model": "finite_functions", "points": ["p", "q", "r"]},
        "lie_algebra": {"names": ["xi1", "xi2"]},
        "action": [{"kind": "zero"}, {"kind": "zero"}],
        "members": [
            {"name": "flip-phase", "kind": "hat",
             "unitary": {"body": {"e_p": "i", "e_q": "-1", "e_r": "1"}}},
            {"name": "point-cocycle", "kind": "extend", "cochain": [{"e_p": "i"}, {}]}
        ],
        "bimodules": [
            {"name": "diagonal", "kind": "self"},
            {"name": "rotate", "kind": "relabel", "permutation": [1, 2, 0]},
            {"name": "pair-column", "kind": "column", "size": 2}
        ],
        "tasks": [
            "check-action",
            "hopf-axioms",
            "convolution",
            "u-membership",
            "ce-cohomology",
            "classify-lifts",
            {"task": "lift-equivalence", "member": "flip-phase"},
            {"task": "lift-equivalence", "member": "point-cocycle"},
            "morita-check",
            "picard",
            "covariance",
            "forget-diagram"
        ]
    }"#,
    )
    .expect("the functions scenario parses")
}

pub fn shipped() -> Vec<(&'static str, ProblemFile)> {
    vec![
        ("circle", circle()),
        ("solvable", solvable()),
        ("functions", functions()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Verdict;
    use crate::runner::{run, verify_oracle, RunFlags};

    #[test]
    fn every_shipped_scenario_passes_every_task() {
        for (name, problem) in shipped() {
            let report = run(&problem, &RunFlags::default()).unwrap();
            assert_eq!(report.tasks.len(), problem.tasks.len(), "{name}");
            for t in &report.tasks {
                assert_eq!(
                    t.verdict,
                    Verdict::Pass,
                    "{name}/{}: {:?}",
                    t.task,
                    t.witnesses
                );
            }
        }
    }

    #[test]
    fn shipped_scenarios_are_deterministic() {
        for (name, problem) in shipped() {
            let a = run(&problem, &RunFlags::default()).unwrap();
            let b = run(&problem, &RunFlags::default()).unwrap();
            assert_eq!(
                a.comparable().to_json(),
                b.comparable().to_json(),
                "{name}"
            );
        }
    }

    #[test]
    fn shipped_scenarios_agree_with_their_oracles() {
        for (name, problem) in shipped() {
            let report = verify_oracle(&problem, &RunFlags::default()).unwrap();
            assert!(report.all_passed(), "{name}: {}", report.summary());
        }
    }

    #[test]
    fn circle_lift_classes_come_out_as_expected() {
        let report = run(&circle(), &RunFlags::default()).unwrap();
        let coh = report
            .tasks
            .iter()
            .find(|t| t.task == "ce-cohomology")
            .unwrap();
        assert_eq!(coh.details["h1_dim"], serde_json::json!(1));
        let lifts = report
            .tasks
            .iter()
            .find(|t| t.task == "classify-lifts")
            .unwrap();
        assert_eq!(lifts.details["quotient"], serde_json::json!("Q/Z"));
        let equiv: Vec<&crate::report::TaskReport> = report
            .tasks
            .iter()
            .filter(|t| t.task == "lift-equivalence")
            .collect();
        assert_eq!(equiv[0].details["member"], serde_json::json!("winding-hat"));
        assert_eq!(equiv[0].details["isomorphic"], serde_json::json!(true));
        assert_eq!(equiv[1].details["member"], serde_json::json!("half-cocycle"));
        assert_eq!(equiv[1].details["isomorphic"], serde_json::json!(false));
    }

    #[test]
    fn solvable_classes_split_into_coboundary_and_independent() {
        let report = run(&solvable(), &RunFlags::default()).unwrap();
        let coh = report
            .tasks
            .iter()
            .find(|t| t.task == "ce-cohomology")
            .unwrap();
        assert_eq!(coh.details["h1_dim"], serde_json::json!(2));
        let equiv: Vec<&crate::report::TaskReport> = report
            .tasks
            .iter()
            .filter(|t| t.task == "lift-equivalence")
            .collect();
        assert_eq!(equiv[0].details["isomorphic"], serde_json::json!(true));
        assert_eq!(equiv[1].details["isomorphic"], serde_json::json!(false));
    }

    #[test]
    fn function_scenario_finds_the_full_permutation_group() {
        let report = run(&functions(), &RunFlags::default()).unwrap();
        let picard = report.tasks.iter().find(|t| t.task == "picard").unwrap();
        assert_eq!(picard.details["order"], serde_json::json!(6));
        let equiv: Vec<&crate::report::TaskReport> = report
            .tasks
            .iter()
            .filter(|t| t.task == "lift-equivalence")
            .collect();
        assert_eq!(equiv[0].details["isomorphic"], serde_json::json!(true));
        assert_eq!(equiv[1].details["isomorphic"], serde_json::json!(false));
    }
}
