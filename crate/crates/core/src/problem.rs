//! Declarative batch problem files.
//!
//! A problem file is one JSON document: the scalar format tag, a model
//! algebra, an optional acting Lie algebra with one operator per
//! generator, declared winding unitaries, named convolution-group members
//! and bimodules, and an ordered task list. Parse errors carry line and
//! column; validation errors carry the path of the offending field.
//!
//! Elements are written as maps from basis labels to scalar strings, for
//! example `{"u": "1"}` or `{"x^2": "2*i"}`. Convolution-map values are
//! addressed by PBW exponent vectors.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num::Zero;
use serde::{Deserialize, Serialize};

use crate::algebra::{Algebra, CentralUnitary, Element, ModelSpec};
use crate::lie::Operator;
use crate::scalar::{Rat, Scalar};
use crate::{Error, Result};

pub const SCALAR_FORMAT: &str = "gaussian-rational-1";

pub const TASK_NAMES: [&str; 11] = [
    "check-action",
    "hopf-axioms",
    "convolution",
    "u-membership",
    "ce-cohomology",
    "classify-lifts",
    "lift-equivalence",
    "morita-check",
    "picard",
    "covariance",
    "forget-diagram",
];

/// Basis label to scalar string, the written form of an algebra element.
pub type ElementInput = BTreeMap<String, String>;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub scalars: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lie_algebra: Option<LieInput>,
    pub algebra: ModelSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<Vec<OperatorInput>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub windings: Vec<UnitaryInput>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub members: Vec<MemberInput>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bimodules: Vec<BimoduleInput>,
    pub tasks: Vec<TaskInput>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LieInput {
    pub names: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub brackets: Vec<BracketInput>,
}

/// [ξ_left, ξ_right] = Σ coeffs[k]·ξ_k.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketInput {
    pub left: usize,
    pub right: usize,
    pub coeffs: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum OperatorInput {
    Zero,
    /// D(u^k) = k·scale·u^(k+shift) on the circle model.
    Mode {
        scale: String,
        #[serde(default)]
        shift: i64,
    },
    /// Sparse basis images; absent labels map to zero.
    Table { images: BTreeMap<String, ElementInput> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitaryInput {
    /// Symbolic phase q standing for e^(2πi·q); defaults to zero.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase: Option<String>,
    pub body: ElementInput,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MemberInput {
    pub name: String,
    #[serde(flatten)]
    pub kind: MemberKind,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MemberKind {
    /// c*·(g▹c) for a declared central unitary c.
    Hat { unitary: UnitaryInput },
    /// Extension of an anti-Hermitian central cocycle, one value per
    /// generator.
    Extend { cochain: Vec<ElementInput> },
    /// Convolution product of two earlier members.
    Convolve { left: String, right: String },
    /// Convolution inverse of an earlier member.
    Inverse { of: String },
    /// Raw value table on PBW exponent vectors; unlisted keys are zero.
    Values { values: Vec<ValueEntry> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValueEntry {
    pub exponents: Vec<u32>,
    pub value: ElementInput,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BimoduleInput {
    pub name: String,
    #[serde(flatten)]
    pub kind: BimoduleKind,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BimoduleKind {
    /// The algebra over itself with the canonical pairing.
    #[serde(rename = "self")]
    SelfModule,
    /// Relabeling bimodule of a point permutation (function algebras).
    Relabel { permutation: Vec<usize> },
    /// Columns Aⁿ between Mₙ(A) and A (function algebras).
    Column { size: usize },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TaskInput {
    Name(String),
    Detailed(TaskDetail),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskDetail {
    pub task: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub member: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub module: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tuple_size: Option<usize>,
}

impl TaskInput {
    pub fn name(&self) -> &str {
        match self {
            TaskInput::Name(s) => s,
            TaskInput::Detailed(d) => &d.task,
        }
    }

    pub fn member(&self) -> Option<&str> {
        match self {
            TaskInput::Name(_) => None,
            TaskInput::Detailed(d) => d.member.as_deref(),
        }
    }

    pub fn base(&self) -> Option<&str> {
        match self {
            TaskInput::Name(_) => None,
            TaskInput::Detailed(d) => d.base.as_deref(),
        }
    }

    pub fn module(&self) -> Option<&str> {
        match self {
            TaskInput::Name(_) => None,
            TaskInput::Detailed(d) => d.module.as_deref(),
        }
    }

    pub fn bound(&self) -> usize {
        match self {
            TaskInput::Name(_) => 4,
            TaskInput::Detailed(d) => d.bound.unwrap_or(4),
        }
    }

    pub fn tuple_size(&self) -> usize {
        match self {
            TaskInput::Name(_) => 2,
            TaskInput::Detailed(d) => d.tuple_size.unwrap_or(2),
        }
    }
}

/// Parse a problem file, reporting line and column on any syntax or shape
/// error.
pub fn parse_problem(text: &str) -> Result<ProblemFile> {
    serde_json::from_str(text).map_err(|e| {
        Error::input(
            format!("line {}, column {}", e.line(), e.column()),
            e.to_string(),
        )
    })
}

fn bad(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::input(path, message)
}

fn check_scalar(text: &str, path: &str) -> Result<()> {
    text.parse::<Scalar>()
        .map(|_| ())
        .map_err(|e| bad(path, e.to_string()))
}

fn check_rational(text: &str, path: &str) -> Result<()> {
    text.parse::<Rat>()
        .map(|_| ())
        .map_err(|e| bad(path, format!("not a rational number: {e}")))
}

fn contains_laurent(spec: &ModelSpec) -> bool {
    match spec {
        ModelSpec::Laurent => true,
        ModelSpec::Product { factors } => factors.iter().any(contains_laurent),
        _ => false,
    }
}

fn check_model(spec: &ModelSpec, path: &str) -> Result<()> {
    match spec {
        ModelSpec::FiniteFunctions { points } => {
            if points.is_empty() {
                return Err(bad(format!("{path}.points"), "needs at least one point"));
            }
            let distinct: BTreeSet<&String> = points.iter().collect();
            if distinct.len() != points.len() {
                return Err(bad(format!("{path}.points"), "point names must be distinct"));
            }
        }
        ModelSpec::TruncatedPoly { order } => {
            if *order == 0 {
                return Err(bad(format!("{path}.order"), "truncation order must be at least 1"));
            }
        }
        ModelSpec::Matrix { size } => {
            if *size == 0 {
                return Err(bad(format!("{path}.size"), "matrix size must be at least 1"));
            }
        }
        ModelSpec::Laurent => {}
        ModelSpec::Product { factors } => {
            if factors.is_empty() {
                return Err(bad(format!("{path}.factors"), "needs at least one factor"));
            }
            for (i, f) in factors.iter().enumerate() {
                check_model(f, &format!("{path}.factors[{i}]"))?;
            }
        }
    }
    Ok(())
}

impl ProblemFile {
    /// Structural validation with field paths. Values that need live
    /// objects (basis labels, unitarity) are checked during preparation
    /// with the same path discipline.
    pub fn validate(&self) -> Result<()> {
        if self.scalars != SCALAR_FORMAT {
            return Err(bad(
                "scalars",
                format!(
                    "unsupported scalar format {:?}; this build reads {SCALAR_FORMAT:?}",
                    self.scalars
                ),
            ));
        }
        if self.truncation == Some(0) {
            return Err(bad("truncation", "truncation order must be at least 1"));
        }
        if let Some(k) = self.window {
            if k < 0 {
                return Err(bad("window", "mode window must be nonnegative"));
            }
        }
        check_model(&self.algebra, "algebra")?;
        if contains_laurent(&self.algebra) && self.window.is_none() {
            return Err(bad("window", "the circle model needs a mode window"));
        }

        let dim = match &self.lie_algebra {
            None => None,
            Some(lie) => {
                if lie.names.is_empty() {
                    return Err(bad("lie_algebra.names", "needs at least one generator"));
                }
                let distinct: BTreeSet<&String> = lie.names.iter().collect();
                if distinct.len() != lie.names.len() {
                    return Err(bad("lie_algebra.names", "generator names must be distinct"));
                }
                let d = lie.names.len();
                for (k, b) in lie.brackets.iter().enumerate() {
                    let path = format!("lie_algebra.brackets[{k}]");
                    if b.left >= d || b.right >= d {
                        return Err(bad(
                            &path,
                            format!("generator index out of range for dimension {d}"),
                        ));
                    }
                    if b.coeffs.len() != d {
                        return Err(bad(
                            &path,
                            format!("needs {d} coefficients, got {}", b.coeffs.len()),
                        ));
                    }
                    for (m, c) in b.coeffs.iter().enumerate() {
                        check_scalar(c, &format!("{path}.coeffs[{m}]"))?;
                    }
                }
                Some(d)
            }
        };

        match (&self.action, dim) {
            (None, _) => {}
            (Some(_), None) => {
                return Err(bad("action", "an action needs a lie_algebra section"));
            }
            (Some(ops), Some(d)) => {
                if ops.len() != d {
                    return Err(bad(
                        "action",
                        format!("needs one operator per generator: {d} expected, {} given", ops.len()),
                    ));
                }
                for (i, op) in ops.iter().enumerate() {
                    let path = format!("action[{i}]");
                    match op {
                        OperatorInput::Zero => {}
                        OperatorInput::Mode { scale, .. } => {
                            if !matches!(self.algebra, ModelSpec::Laurent) {
                                return Err(bad(&path, "mode operators only act on the circle model"));
                            }
                            check_scalar(scale, &format!("{path}.scale"))?;
                        }
                        OperatorInput::Table { images } => {
                            for (label, img) in images {
                                for (l2, c) in img {
                                    check_scalar(c, &format!("{path}.images.{label}.{l2}"))?;
                                }
                            }
                        }
                    }
                }
            }
        }

        let has_action = self.action.is_some();
        for (k, w) in self.windings.iter().enumerate() {
            let path = format!("windings[{k}]");
            if let Some(p) = &w.phase {
                check_rational(p, &format!("{path}.phase"))?;
            }
            for (label, c) in &w.body {
                check_scalar(c, &format!("{path}.body.{label}"))?;
            }
        }

        let mut member_names = BTreeSet::new();
        for (k, m) in self.members.iter().enumerate() {
            let path = format!("members[{k}]");
            if !member_names.insert(m.name.clone()) {
                return Err(bad(
                    format!("{path}.name"),
                    format!("member name {:?} declared twice", m.name),
                ));
            }
            match &m.kind {
                MemberKind::Hat { unitary } => {
                    if !has_action {
                        return Err(bad(&path, "hat members need an action"));
                    }
                    if let Some(p) = &unitary.phase {
                        check_rational(p, &format!("{path}.unitary.phase"))?;
                    }
                    for (label, c) in &unitary.body {
                        check_scalar(c, &format!("{path}.unitary.body.{label}"))?;
                    }
                }
                MemberKind::Extend { cochain } => {
                    if !has_action {
                        return Err(bad(&path, "extended members need an action"));
                    }
                    if Some(cochain.len()) != dim {
                        return Err(bad(
                            format!("{path}.cochain"),
                            format!(
                                "needs one value per generator: {} expected, {} given",
                                dim.unwrap_or(0),
                                cochain.len()
                            ),
                        ));
                    }
                    for (g, e) in cochain.iter().enumerate() {
                        for (label, c) in e {
                            check_scalar(c, &format!("{path}.cochain[{g}].{label}"))?;
                        }
                    }
                }
                MemberKind::Convolve { left, right } => {
                    for (field, name) in [("left", left), ("right", right)] {
                        if !member_names.contains(name) || name == &m.name {
                            return Err(bad(
                                format!("{path}.{field}"),
                                format!("references {name:?}, which is not an earlier member"),
                            ));
                        }
                    }
                }
                MemberKind::Inverse { of } => {
                    if !has_action {
                        return Err(bad(&path, "inversion needs an action"));
                    }
                    if !member_names.contains(of) || of == &m.name {
                        return Err(bad(
                            format!("{path}.of"),
                            format!("references {of:?}, which is not an earlier member"),
                        ));
                    }
                }
                MemberKind::Values { values } => {
                    if !has_action {
                        return Err(bad(&path, "raw members need an action"));
                    }
                    for (j, v) in values.iter().enumerate() {
                        if Some(v.exponents.len()) != dim {
                            return Err(bad(
                                format!("{path}.values[{j}].exponents"),
                                format!(
                                    "needs one exponent per generator: {} expected, {} given",
                                    dim.unwrap_or(0),
                                    v.exponents.len()
                                ),
                            ));
                        }
                        for (label, c) in &v.value {
                            check_scalar(c, &format!("{path}.values[{j}].value.{label}"))?;
                        }
                    }
                }
            }
        }

        let n_points = match &self.algebra {
            ModelSpec::FiniteFunctions { points } => Some(points.len()),
            _ => None,
        };
        let mut module_names = BTreeSet::new();
        for (k, b) in self.bimodules.iter().enumerate() {
            let path = format!("bimodules[{k}]");
            if !module_names.insert(b.name.clone()) {
                return Err(bad(
                    format!("{path}.name"),
                    format!("bimodule name {:?} declared twice", b.name),
                ));
            }
            match &b.kind {
                BimoduleKind::SelfModule => {}
                BimoduleKind::Relabel { permutation } => {
                    let Some(n) = n_points else {
                        return Err(bad(&path, "relabeling bimodules need a function algebra"));
                    };
                    let mut seen = vec![false; n];
                    if permutation.len() != n || permutation.iter().any(|&p| p >= n) {
                        return Err(bad(
                            format!("{path}.permutation"),
                            format!("must list each of 0..{n} exactly once"),
                        ));
                    }
                    for &p in permutation {
                        if seen[p] {
                            return Err(bad(
                                format!("{path}.permutation"),
                                format!("must list each of 0..{n} exactly once"),
                            ));
                        }
                        seen[p] = true;
                    }
                }
                BimoduleKind::Column { size } => {
                    if n_points.is_none() {
                        return Err(bad(&path, "column bimodules need a function algebra"));
                    }
                    if *size == 0 {
                        return Err(bad(format!("{path}.size"), "needs at least one column entry"));
                    }
                }
            }
        }

        for (k, t) in self.tasks.iter().enumerate() {
            let path = format!("tasks[{k}]");
            let name = t.name();
            if !TASK_NAMES.contains(&name) {
                return Err(bad(
                    &path,
                    format!(
                        "unknown task {name:?}; tasks are {}",
                        TASK_NAMES.join(", ")
                    ),
                ));
            }
            let needs_action = [
                "check-action",
                "convolution",
                "u-membership",
                "ce-cohomology",
                "classify-lifts",
                "lift-equivalence",
                "covariance",
            ]
            .contains(&name);
            if needs_action && !has_action {
                return Err(bad(&path, format!("task {name} needs an action")));
            }
            if name == "hopf-axioms" && self.lie_algebra.is_none() {
                return Err(bad(&path, "task hopf-axioms needs a lie_algebra section"));
            }
            if ["convolution", "u-membership"].contains(&name) && self.members.is_empty() {
                return Err(bad(&path, format!("task {name} needs at least one member")));
            }
            if ["morita-check", "forget-diagram"].contains(&name) && self.bimodules.is_empty() {
                return Err(bad(&path, format!("task {name} needs at least one bimodule")));
            }
            if name == "picard" {
                let Some(n) = n_points else {
                    return Err(bad(&path, "task picard needs a function algebra"));
                };
                if n > t.bound() {
                    return Err(bad(
                        format!("{path}.bound"),
                        format!("point set of size {n} exceeds the enumeration bound {}", t.bound()),
                    ));
                }
            }
            if name == "lift-equivalence" {
                let named = t.member().or(t.base());
                if named.is_none() && self.members.is_empty() {
                    return Err(bad(&path, "task lift-equivalence needs a member to compare"));
                }
            }
            for (field, reference) in [("member", t.member()), ("base", t.base())] {
                if let Some(r) = reference {
                    if !member_names.contains(r) {
                        return Err(bad(
                            format!("{path}.{field}"),
                            format!("references undeclared member {r:?}"),
                        ));
                    }
                }
            }
            if let Some(r) = t.module() {
                if !module_names.contains(r) {
                    return Err(bad(
                        format!("{path}.module"),
                        format!("references undeclared bimodule {r:?}"),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Basis label to flat index on the given window.
pub fn label_index(algebra: &Arc<Algebra>, window: Option<i64>) -> Result<BTreeMap<String, i64>> {
    let mut map = BTreeMap::new();
    for i in algebra.basis_indices(window)? {
        map.insert(algebra.label(i), i);
    }
    Ok(map)
}

pub fn resolve_element(
    algebra: &Arc<Algebra>,
    window: Option<i64>,
    input: &ElementInput,
    path: &str,
) -> Result<Element> {
    let labels = label_index(algebra, window)?;
    let mut coeffs = BTreeMap::new();
    for (label, text) in input {
        let idx = labels.get(label).ok_or_else(|| {
            bad(
                format!("{path}.{label}"),
                format!("no basis vector {label:?} in this model"),
            )
        })?;
        let c: Scalar = text
            .parse()
            .map_err(|e: Error| bad(format!("{path}.{label}"), e.to_string()))?;
        if !c.is_zero() {
            coeffs.insert(*idx, c);
        }
    }
    Ok(algebra.element(coeffs))
}

pub fn resolve_operator(
    algebra: &Arc<Algebra>,
    window: Option<i64>,
    input: &OperatorInput,
    path: &str,
) -> Result<Operator> {
    match input {
        OperatorInput::Zero => Ok(Operator::Table(BTreeMap::new())),
        OperatorInput::Mode { scale, shift } => Ok(Operator::LaurentMode {
            scale: scale
                .parse()
                .map_err(|e: Error| bad(format!("{path}.scale"), e.to_string()))?,
            shift: *shift,
        }),
        OperatorInput::Table { images } => {
            let labels = label_index(algebra, window)?;
            let mut table = BTreeMap::new();
            for (label, img) in images {
                let idx = labels.get(label).ok_or_else(|| {
                    bad(
                        format!("{path}.images.{label}"),
                        format!("no basis vector {label:?} in this model"),
                    )
                })?;
                let value =
                    resolve_element(algebra, window, img, &format!("{path}.images.{label}"))?;
                table.insert(*idx, value);
            }
            Ok(Operator::Table(table))
        }
    }
}

pub fn resolve_unitary(
    algebra: &Arc<Algebra>,
    window: Option<i64>,
    input: &UnitaryInput,
    path: &str,
) -> Result<CentralUnitary> {
    let phase = match &input.phase {
        None => Rat::zero(),
        Some(p) => p
            .parse()
            .map_err(|e| bad(format!("{path}.phase"), format!("not a rational number: {e}")))?,
    };
    let body = resolve_element(algebra, window, &input.body, &format!("{path}.body"))?;
    CentralUnitary::new(phase, body).map_err(|e| bad(path, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal() -> String {
        r#"{
            "scalars": "gaussian-rational-1",
            "algebra": {"model": "finite_functions", "points": ["p", "q"]},
            "tasks": ["picard"]
        }"#
        .to_string()
    }

    #[test]
    fn minimal_file_parses_and_validates() {
        let p = parse_problem(&minimal()).unwrap();
        p.validate().unwrap();
        assert_eq!(p.tasks[0].name(), "picard");
        assert_eq!(p.tasks[0].bound(), 4);
    }

    #[test]
    fn syntax_errors_carry_line_and_column() {
        let err = parse_problem("{\n  \"scalars\": \n}").unwrap_err();
        let Error::Input { path, .. } = err else {
            panic!("expected an input error, got {err:?}");
        };
        assert!(path.contains("line 3"), "{path}");
        assert!(path.contains("column"), "{path}");
    }

    #[test]
    fn bracket_arity_is_reported_with_its_path() {
        let text = r#"{
            "scalars": "gaussian-rational-1",
            "algebra": {"model": "truncated_poly", "order": 4},
            "lie_algebra": {
                "names": ["xi1", "xi2"],
                "brackets": [{"left": 0, "right": 1, "coeffs": ["1"]}]
            },
            "tasks": ["hopf-axioms"]
        }"#;
        let err = parse_problem(text).unwrap().validate().unwrap_err();
        let Error::Input { path, message } = err else {
            panic!("expected an input error, got {err:?}");
        };
        assert_eq!(path, "lie_algebra.brackets[0]");
        assert!(message.contains("needs 2 coefficients"), "{message}");
    }

    #[test]
    fn unknown_tasks_and_formats_are_rejected() {
        let mut p = parse_problem(&minimal()).unwrap();
        p.scalars = "floating-point".into();
        let Error::Input { path, .. } = p.validate().unwrap_err() else {
            panic!()
        };
        assert_eq!(path, "scalars");

        let mut p = parse_problem(&minimal()).unwrap();
        p.tasks = vec![TaskInput::Name("draw-picture".into())];
        let Error::Input { path, .. } = p.validate().unwrap_err() else {
            panic!()
        };
        assert_eq!(path, "tasks[0]");
    }

    #[test]
    fn circle_model_requires_a_window() {
        let text = r#"{
            "scalars": "gaussian-rational-1",
            "algebra": {"model": "laurent"},
            "lie_algebra": {"names": ["xi"]},
            "action": [{"kind": "mode", "scale": "i"}],
            "tasks": ["check-action"]
        }"#;
        let Error::Input { path, .. } = parse_problem(text).unwrap().validate().unwrap_err()
        else {
            panic!()
        };
        assert_eq!(path, "window");
    }

    #[test]
    fn task_references_must_resolve() {
        let text = r#"{
            "scalars": "gaussian-rational-1",
            "algebra": {"model": "finite_functions", "points": ["p", "q"]},
            "lie_algebra": {"names": ["xi"]},
            "action": [{"kind": "zero"}],
            "members": [{"name": "a", "kind": "extend", "cochain": [{"e_p": "i"}]}],
            "tasks": [{"task": "lift-equivalence", "member": "missing"}]
        }"#;
        let Error::Input { path, .. } = parse_problem(text).unwrap().validate().unwrap_err()
        else {
            panic!()
        };
        assert_eq!(path, "tasks[0].member");
    }

    #[test]
    fn elements_resolve_by_label() {
        let alg = Algebra::build(ModelSpec::TruncatedPoly { order: 3 }).unwrap();
        let mut input = ElementInput::new();
        input.insert("x^2".into(), "2*i".into());
        input.insert("1".into(), "1/2".into());
        let v = resolve_element(&alg, None, &input, "test").unwrap();
        let expected = alg
            .unit()
            .scale(&"1/2".parse().unwrap())
            .add(&alg.basis(2).scale(&"2*i".parse().unwrap()));
        assert_eq!(v, expected);

        input.insert("x^9".into(), "1".into());
        let Error::Input { path, .. } = resolve_element(&alg, None, &input, "test").unwrap_err()
        else {
            panic!()
        };
        assert_eq!(path, "test.x^9");
    }

    #[test]
    fn members_must_reference_earlier_members() {
        let text = r#"{
            "scalars": "gaussian-rational-1",
            "algebra": {"model": "finite_functions", "points": ["p"]},
            "lie_algebra": {"names": ["xi"]},
            "action": [{"kind": "zero"}],
            "members": [{"name": "prod", "kind": "convolve", "left": "prod", "right": "prod"}],
            "tasks": ["u-membership"]
        }"#;
        let Error::Input { path, .. } = parse_problem(text).unwrap().validate().unwrap_err()
        else {
            panic!()
        };
        assert_eq!(path, "members[0].left");
    }
}
