//! Finite-dimensional Lie algebras acting by *-derivations.
//!
//! Brackets are structure constants on a fixed generator list. Construction
//! is deliberately lenient about the Jacobi identity: broken bracket tables
//! must still build so that the checkers can report exactly which identity
//! fails and where. Antisymmetry is enforced structurally by storing only
//! i < j pairs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::algebra::{Algebra, Element};
use crate::scalar::Scalar;
use crate::{Error, Result};

pub struct LieAlgebra {
    pub dim: usize,
    brackets: BTreeMap<(usize, usize), Vec<Scalar>>,
}

impl LieAlgebra {
    pub fn new(dim: usize, entries: Vec<(usize, usize, Vec<Scalar>)>) -> Result<Arc<Self>> {
        if dim == 0 {
            return Err(Error::Model("Lie algebra dimension must be at least 1".into()));
        }
        let mut brackets = BTreeMap::new();
        for (i, j, coeffs) in entries {
            if i >= dim || j >= dim {
                return Err(Error::Model(format!(
                    "bracket indices ({i},{j}) out of range for dimension {dim}"
                )));
            }
            if coeffs.len() != dim {
                return Err(Error::Model(format!(
                    "bracket ({i},{j}) needs {dim} coefficients, got {}",
                    coeffs.len()
                )));
            }
            if i == j {
                if coeffs.iter().any(|c| !c.is_zero()) {
                    return Err(Error::Model(format!(
                        "bracket ({i},{i}) must vanish by antisymmetry"
                    )));
                }
                continue;
            }
            let (key, stored) = if i < j {
                ((i, j), coeffs)
            } else {
                ((j, i), coeffs.into_iter().map(|c| -c).collect())
            };
            if brackets.insert(key, stored).is_some() {
                return Err(Error::Model(format!(
                    "bracket ({},{}) specified twice",
                    key.0, key.1
                )));
            }
        }
        Ok(Arc::new(LieAlgebra { dim, brackets }))
    }

    pub fn abelian(dim: usize) -> Arc<Self> {
        LieAlgebra::new(dim, Vec::new()).expect("abelian construction is total for dim >= 1")
    }

    /// [ξ_i, ξ_j] as generator coefficients, with antisymmetry applied.
    pub fn bracket(&self, i: usize, j: usize) -> Vec<Scalar> {
        if i == j {
            return vec![Scalar::zero(); self.dim];
        }
        let (key, flip) = if i < j { ((i, j), false) } else { ((j, i), true) };
        match self.brackets.get(&key) {
            None => vec![Scalar::zero(); self.dim],
            Some(c) if !flip => c.clone(),
            Some(c) => c.iter().map(|v| -v.clone()).collect(),
        }
    }

    /// Jacobi failures as witness strings; empty for an honest Lie algebra.
    pub fn jacobi_failures(&self) -> Vec<String> {
        let mut failures = Vec::new();
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                for k in j + 1..self.dim {
                    let mut total = vec![Scalar::zero(); self.dim];
                    for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
                        let inner = self.bracket(a, b);
                        for (m, cm) in inner.iter().enumerate() {
                            if cm.is_zero() {
                                continue;
                            }
                            for (l, cl) in self.bracket(m, c).iter().enumerate() {
                                total[l] += &(cm * cl);
                            }
                        }
                    }
                    if total.iter().any(|c| !c.is_zero()) {
                        failures.push(format!("jacobi fails on generators ({i},{j},{k})"));
                    }
                }
            }
        }
        failures
    }
}

impl std::fmt::Debug for LieAlgebra {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "LieAlgebra(dim {})", self.dim)
    }
}

/// A linear operator on an algebra, given either by a sparse image table
/// (absent basis vectors map to zero) or by the mode form
/// D(u^k) = k·scale·u^{k+shift} on the circle model.
#[derive(Clone, Debug)]
pub enum Operator {
    Table(BTreeMap<i64, Element>),
    LaurentMode { scale: Scalar, shift: i64 },
}

impl Operator {
    pub fn apply(&self, a: &Element) -> Element {
        match self {
            Operator::Table(images) => {
                let mut out = a.algebra.zero();
                for (i, c) in a.coeffs() {
                    if let Some(img) = images.get(i) {
                        out = out.add(&img.scale(c));
                    }
                }
                out
            }
            Operator::LaurentMode { scale, shift } => {
                let mut coeffs = BTreeMap::new();
                for (k, c) in a.coeffs() {
                    let factor = &Scalar::from_int(*k) * scale;
                    let v = &factor * c;
                    if !v.is_zero() {
                        coeffs.insert(k + shift, v);
                    }
                }
                a.algebra.element(coeffs)
            }
        }
    }
}

/// A Lie algebra represented on an algebra by one operator per generator.
pub struct LieAction {
    pub lie: Arc<LieAlgebra>,
    pub algebra: Arc<Algebra>,
    pub derivations: Vec<Operator>,
}

#[derive(Debug, Default, serde::Serialize)]
pub struct ActionCheckReport {
    pub jacobi: Vec<String>,
    pub leibniz: Vec<String>,
    pub star: Vec<String>,
    pub commutator: Vec<String>,
}

impl ActionCheckReport {
    pub fn passed(&self) -> bool {
        self.jacobi.is_empty()
            && self.leibniz.is_empty()
            && self.star.is_empty()
            && self.commutator.is_empty()
    }
}

impl LieAction {
    pub fn new(
        lie: Arc<LieAlgebra>,
        algebra: Arc<Algebra>,
        derivations: Vec<Operator>,
    ) -> Result<Arc<Self>> {
        if derivations.len() != lie.dim {
            return Err(Error::Model(format!(
                "action needs {} derivations, got {}",
                lie.dim,
                derivations.len()
            )));
        }
        Ok(Arc::new(LieAction {
            lie,
            algebra,
            derivations,
        }))
    }

    pub fn apply_gen(&self, i: usize, a: &Element) -> Element {
        self.derivations[i].apply(a)
    }

    /// ξ₁^{k₁}···ξ_d^{k_d} acting as D₁^{k₁}∘…∘D_d^{k_d}; the rightmost
    /// factor is applied first.
    pub fn apply_monomial(&self, exps: &[u32], a: &Element) -> Element {
        let mut v = a.clone();
        for i in (0..self.lie.dim).rev() {
            for _ in 0..exps[i] {
                v = self.apply_gen(i, &v);
            }
        }
        v
    }

    pub fn is_invariant(&self, a: &Element) -> bool {
        (0..self.lie.dim).all(|i| self.apply_gen(i, a).is_zero())
    }

    /// Verify every defining identity of a *-derivation action, reporting
    /// failures with witnesses. Basis identities on the circle model are
    /// checked on the supplied mode window.
    pub fn check(&self, window: Option<i64>) -> Result<ActionCheckReport> {
        let mut report = ActionCheckReport {
            jacobi: self.lie.jacobi_failures(),
            ..Default::default()
        };
        let indices = self.algebra.basis_indices(window)?;
        let d = self.lie.dim;
        for g in 0..d {
            for &i in &indices {
                let ei = self.algebra.basis(i);
                for &j in &indices {
                    let ej = self.algebra.basis(j);
                    let lhs = self.apply_gen(g, &ei.mul(&ej));
                    let rhs = self
                        .apply_gen(g, &ei)
                        .mul(&ej)
                        .add(&ei.mul(&self.apply_gen(g, &ej)));
                    if lhs != rhs {
                        let mut w = String::new();
                        let _ = write!(
                            w,
                            "leibniz fails for D_{g} on ({}, {}): {} vs {}",
                            self.algebra.label(i),
                            self.algebra.label(j),
                            lhs,
                            rhs
                        );
                        report.leibniz.push(w);
                    }
                }
                let lhs = self.apply_gen(g, &ei.star());
                let rhs = self.apply_gen(g, &ei).star();
                if lhs != rhs {
                    report.star.push(format!(
                        "reality fails for D_{g} on {}: {} vs {}",
                        self.algebra.label(i),
                        lhs,
                        rhs
                    ));
                }
            }
        }
        for i in 0..d {
            for j in i + 1..d {
                let bracket = self.lie.bracket(i, j);
                for &b in &indices {
                    let eb = self.algebra.basis(b);
                    let lhs = self
                        .apply_gen(i, &self.apply_gen(j, &eb))
                        .sub(&self.apply_gen(j, &self.apply_gen(i, &eb)));
                    let mut rhs = self.algebra.zero();
                    for (k, c) in bracket.iter().enumerate() {
                        if !c.is_zero() {
                            rhs = rhs.add(&self.apply_gen(k, &eb).scale(c));
                        }
                    }
                    if lhs != rhs {
                        report.commutator.push(format!(
                            "commutator fails for (ξ_{i},ξ_{j}) on {}: {} vs {}",
                            self.algebra.label(b),
                            lhs,
                            rhs
                        ));
                    }
                }
            }
        }
        Ok(report)
    }
}

impl std::fmt::Debug for LieAction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "LieAction(dim {} on {:?})",
            self.lie.dim, self.algebra.spec
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ModelSpec;

    fn s(t: &str) -> Scalar {
        t.parse().unwrap()
    }

    fn laurent() -> Arc<Algebra> {
        Algebra::build(ModelSpec::Laurent).unwrap()
    }

    fn poly(n: u32) -> Arc<Algebra> {
        Algebra::build(ModelSpec::TruncatedPoly { order: n }).unwrap()
    }

    pub fn rotation_action(alg: &Arc<Algebra>) -> Arc<LieAction> {
        LieAction::new(
            LieAlgebra::abelian(1),
            Arc::clone(alg),
            vec![Operator::LaurentMode {
                scale: s("i"),
                shift: 0,
            }],
        )
        .unwrap()
    }

    /// x^p d/dx on x^k (a derivation of the quotient exactly when p ≥ 1).
    fn x_pow_ddx(alg: &Arc<Algebra>, n: u32, p: i64) -> Operator {
        let mut images = BTreeMap::new();
        for k in 1..n as i64 {
            let target = k - 1 + p;
            if target < n as i64 {
                images.insert(k, alg.basis(target).scale(&Scalar::from_int(k)));
            }
        }
        Operator::Table(images)
    }

    #[test]
    fn rotation_action_passes_all_checks() {
        let alg = laurent();
        let action = rotation_action(&alg);
        let report = action.check(Some(3)).unwrap();
        assert!(report.passed(), "{report:?}");
        let u = alg.basis(1);
        assert_eq!(action.apply_gen(0, &u), u.scale(&s("i")));
        assert!(action.is_invariant(&alg.unit()));
        assert!(!action.is_invariant(&u));
    }

    #[test]
    fn solvable_action_on_truncated_polynomials_passes() {
        let alg = poly(4);
        // [x d/dx, x^2 d/dx] = x^2 d/dx realizes [ξ1,ξ2] = ξ2
        let lie = LieAlgebra::new(2, vec![(0, 1, vec![s("0"), s("1")])]).unwrap();
        let action = LieAction::new(
            lie,
            Arc::clone(&alg),
            vec![x_pow_ddx(&alg, 4, 1), x_pow_ddx(&alg, 4, 2)],
        )
        .unwrap();
        let report = action.check(None).unwrap();
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn plain_ddx_violates_leibniz_at_the_nilpotency_boundary() {
        // d/dx does not preserve the ideal (x^4), so it is not a
        // derivation of the quotient: D(x·x^3) = 0 but 4x^3 survives.
        let alg = poly(4);
        let action = LieAction::new(
            LieAlgebra::abelian(1),
            Arc::clone(&alg),
            vec![x_pow_ddx(&alg, 4, 0)],
        )
        .unwrap();
        let report = action.check(None).unwrap();
        assert!(
            report.leibniz.iter().any(|w| w.contains("(x, x^3)")),
            "{report:?}"
        );
    }

    #[test]
    fn leibniz_violation_is_witnessed_on_x_x() {
        let alg = poly(3);
        // D(x) = 1 but D(x^2) = 0: not a derivation
        let mut images = BTreeMap::new();
        images.insert(1, alg.unit());
        let action = LieAction::new(
            LieAlgebra::abelian(1),
            Arc::clone(&alg),
            vec![Operator::Table(images)],
        )
        .unwrap();
        let report = action.check(None).unwrap();
        assert!(!report.passed());
        assert!(report.leibniz.iter().any(|w| w.contains("(x, x)")), "{report:?}");
    }

    #[test]
    fn commutator_mismatch_is_reported() {
        let alg = poly(4);
        // claims [ξ1,ξ2] = ξ2 but [2x d/dx, x^2 d/dx] = 2 x^2 d/dx
        let lie = LieAlgebra::new(2, vec![(0, 1, vec![s("0"), s("1")])]).unwrap();
        let mut twice_x_ddx = BTreeMap::new();
        for k in 1..4i64 {
            twice_x_ddx.insert(k, alg.basis(k).scale(&Scalar::from_int(2 * k)));
        }
        let action = LieAction::new(
            lie,
            Arc::clone(&alg),
            vec![Operator::Table(twice_x_ddx), x_pow_ddx(&alg, 4, 2)],
        )
        .unwrap();
        let report = action.check(None).unwrap();
        assert!(report.leibniz.is_empty(), "{report:?}");
        assert!(!report.commutator.is_empty());
    }

    #[test]
    fn jacobi_corruption_is_reported() {
        let lie = LieAlgebra::new(
            3,
            vec![
                (0, 1, vec![s("1"), s("0"), s("0")]),
                (0, 2, vec![s("0"), s("1"), s("0")]),
            ],
        )
        .unwrap();
        assert!(!lie.jacobi_failures().is_empty());
        let honest = LieAlgebra::new(2, vec![(0, 1, vec![s("0"), s("1")])]).unwrap();
        assert!(honest.jacobi_failures().is_empty());
    }

    #[test]
    fn bracket_storage_is_antisymmetric() {
        let lie = LieAlgebra::new(2, vec![(1, 0, vec![s("0"), s("-1")])]).unwrap();
        assert_eq!(lie.bracket(0, 1), vec![s("0"), s("1")]);
        assert_eq!(lie.bracket(1, 0), vec![s("0"), s("-1")]);
        assert!(LieAlgebra::new(2, vec![(0, 0, vec![s("1"), s("0")])]).is_err());
        assert!(LieAlgebra::new(2, vec![(0, 3, vec![s("0"), s("1")])]).is_err());
    }

    #[test]
    fn monomial_application_order() {
        let alg = poly(4);
        let lie = LieAlgebra::new(2, vec![(0, 1, vec![s("0"), s("1")])]).unwrap();
        let action = LieAction::new(
            lie,
            Arc::clone(&alg),
            vec![x_pow_ddx(&alg, 4, 1), x_pow_ddx(&alg, 4, 2)],
        )
        .unwrap();
        // ξ1 ξ2 ▹ x^2 applies D2 first: D1(D2(x^2)) = D1(2x^3) = 6x^3
        let out = action.apply_monomial(&[1, 1], &alg.basis(2));
        assert_eq!(out, alg.basis(3).scale(&s("6")));
        // ordering matters: D2(D1(x^2)) = D2(2x^2) = 4x^3
        let other = action.apply_gen(1, &action.apply_gen(0, &alg.basis(2)));
        assert_eq!(other, alg.basis(3).scale(&s("4")));
    }
}
