//! The convolution algebra Hom(H,A) and the unitary-cocycle group inside
//! it: normalized maps whose values cocycle across products, commute with
//! the action on the algebra, and invert under a twisted star.
//!
//! Maps are stored on Hopf basis keys and extended linearly. Every group
//! condition is verified exhaustively on basis keys (pairs within the
//! truncation order), so a passing report means "holds to order N", which
//! is the strongest finitely checkable statement here.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::algebra::{Algebra, CentralUnitary, Element};
use crate::hopf::{coproduct_key, same_hopf, HAction, HElem, HKey, Hopf};
use crate::{Error, Result};

#[derive(Clone)]
pub struct ConvolutionMap {
    pub hopf: Arc<Hopf>,
    pub target: Arc<Algebra>,
    values: BTreeMap<HKey, Element>,
}

impl PartialEq for ConvolutionMap {
    fn eq(&self, other: &Self) -> bool {
        same_hopf(&self.hopf, &other.hopf)
            && self.target.spec == other.target.spec
            && self.values == other.values
    }
}

impl ConvolutionMap {
    /// Build from explicit values on basis keys; keys left out map to zero.
    pub fn new(
        hopf: &Arc<Hopf>,
        target: &Arc<Algebra>,
        values: Vec<(HKey, Element)>,
    ) -> Result<Self> {
        let basis = hopf.basis();
        let mut table: BTreeMap<HKey, Element> =
            basis.iter().map(|k| (k.clone(), target.zero())).collect();
        for (key, value) in values {
            if !table.contains_key(&key) {
                return Err(Error::Model(format!(
                    "convolution map value on a key outside the Hopf basis: {}",
                    hopf.label(&key)
                )));
            }
            if !crate::algebra::same_algebra(&value.algebra, target) {
                return Err(Error::Model(
                    "convolution map value lies in a different algebra".into(),
                ));
            }
            table.insert(key, value);
        }
        Ok(ConvolutionMap {
            hopf: Arc::clone(hopf),
            target: Arc::clone(target),
            values: table,
        })
    }

    /// The convolution unit ê(g) = ε(g)·1.
    pub fn unit(hopf: &Arc<Hopf>, target: &Arc<Algebra>) -> Self {
        let values = hopf
            .basis()
            .into_iter()
            .map(|k| {
                let eps = HElem::from_key(hopf, k.clone()).counit();
                (k, target.unit().scale(&eps))
            })
            .collect();
        ConvolutionMap {
            hopf: Arc::clone(hopf),
            target: Arc::clone(target),
            values,
        }
    }

    pub fn value(&self, key: &HKey) -> Element {
        self.values
            .get(key)
            .cloned()
            .unwrap_or_else(|| self.target.zero())
    }

    pub fn values(&self) -> &BTreeMap<HKey, Element> {
        &self.values
    }

    /// Linear extension to arbitrary Hopf elements.
    pub fn eval(&self, h: &HElem) -> Element {
        let mut out = self.target.zero();
        for (k, c) in h.coeffs() {
            out = out.add(&self.value(k).scale(c));
        }
        out
    }

    fn check_compatible(&self, other: &ConvolutionMap) -> Result<()> {
        if !same_hopf(&self.hopf, &other.hopf) {
            return Err(Error::Model(
                "convolution operands live over different Hopf algebras".into(),
            ));
        }
        if self.target.spec != other.target.spec {
            return Err(Error::Model(
                "convolution operands target different algebras".into(),
            ));
        }
        Ok(())
    }

    /// (a*b)(g) = a(g₍₁₎) b(g₍₂₎) on every basis key.
    pub fn convolve(&self, other: &ConvolutionMap) -> Result<ConvolutionMap> {
        self.check_compatible(other)?;
        let mut values = BTreeMap::new();
        for key in self.hopf.basis() {
            let mut v = self.target.zero();
            for ((g1, g2), c) in coproduct_key(&self.hopf, &key).terms {
                v = v.add(&self.value(&g1).mul(&other.value(&g2)).scale(&c));
            }
            values.insert(key, v);
        }
        Ok(ConvolutionMap {
            hopf: Arc::clone(&self.hopf),
            target: Arc::clone(&self.target),
            values,
        })
    }

    /// a⁻¹(g) = a(S(g*))*, valid on group members; membership is rechecked
    /// and refused with the first failing condition.
    pub fn inverse(&self, action: &HAction, window: Option<i64>) -> Result<ConvolutionMap> {
        let report = u_membership(self, action, window)?;
        if let Some(reason) = report.first_failure() {
            return Err(Error::Model(format!(
                "convolution inverse needs a group member: {reason}"
            )));
        }
        let values = self
            .hopf
            .basis()
            .into_iter()
            .map(|k| {
                let arg = HElem::from_key(&self.hopf, k.clone()).star().antipode();
                (k, self.eval(&arg).star())
            })
            .collect();
        Ok(ConvolutionMap {
            hopf: Arc::clone(&self.hopf),
            target: Arc::clone(&self.target),
            values,
        })
    }

    /// ĉ(g) = c·(g▹c⁻¹) for a central unitary c. A symbolic phase on c
    /// cancels against its inverse, so only the body enters.
    pub fn hat(c: &CentralUnitary, action: &HAction) -> ConvolutionMap {
        let inv = c.body.star();
        let values = action
            .hopf
            .basis()
            .into_iter()
            .map(|k| (k.clone(), c.body.mul(&action.act_key(&k, &inv))))
            .collect();
        ConvolutionMap {
            hopf: Arc::clone(&action.hopf),
            target: Arc::clone(&action.algebra),
            values,
        }
    }

    /// Witnesses of values failing to be central in the target.
    pub fn centrality_of_values_check(&self) -> Vec<String> {
        let mut failures = Vec::new();
        for (k, v) in &self.values {
            if !v.is_central() {
                failures.push(format!(
                    "value on {} is not central: {v}",
                    self.hopf.label(k)
                ));
            }
        }
        failures
    }
}

impl std::fmt::Debug for ConvolutionMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut map = f.debug_map();
        for (k, v) in &self.values {
            if !v.is_zero() {
                map.entry(&self.hopf.label(k), &format!("{v}"));
            }
        }
        map.finish()
    }
}

#[derive(Debug, serde::Serialize)]
pub struct UMembershipReport {
    pub normalized: bool,
    pub cocycle: Vec<String>,
    pub central: Vec<String>,
    pub unitary: Vec<String>,
    /// Truncation order the conditions were verified to, if any.
    pub order: Option<u32>,
}

impl UMembershipReport {
    pub fn passed(&self) -> bool {
        self.normalized
            && self.cocycle.is_empty()
            && self.central.is_empty()
            && self.unitary.is_empty()
    }

    pub fn first_failure(&self) -> Option<String> {
        if !self.normalized {
            return Some("not normalized: value on the Hopf unit is not 1".into());
        }
        self.cocycle
            .first()
            .or_else(|| self.central.first())
            .or_else(|| self.unitary.first())
            .cloned()
    }
}

/// Verify the four membership conditions on all basis keys, pairs within
/// the truncation order.
pub fn u_membership(
    a: &ConvolutionMap,
    action: &HAction,
    window: Option<i64>,
) -> Result<UMembershipReport> {
    if !same_hopf(&a.hopf, &action.hopf) || a.target.spec != action.algebra.spec {
        return Err(Error::Model(
            "membership check needs the action on the map's own Hopf algebra and target".into(),
        ));
    }
    let hopf = &a.hopf;
    let mut report = UMembershipReport {
        normalized: a.value(&hopf.unit_key()) == a.target.unit(),
        cocycle: Vec::new(),
        central: Vec::new(),
        unitary: Vec::new(),
        order: hopf.truncation(),
    };
    let basis = hopf.basis();
    let trunc = hopf.truncation();

    for g in &basis {
        for h in &basis {
            if let Some(n) = trunc {
                if g.degree() + h.degree() > n {
                    continue;
                }
            }
            let gh = HElem::from_key(hopf, g.clone()).mul(&HElem::from_key(hopf, h.clone()))?;
            let lhs = a.eval(&gh);
            let mut rhs = a.target.zero();
            for ((g1, g2), c) in coproduct_key(hopf, g).terms {
                let acted = action.act_key(&g2, &a.value(h));
                rhs = rhs.add(&a.value(&g1).mul(&acted).scale(&c));
            }
            if lhs != rhs {
                report.cocycle.push(format!(
                    "cocycle fails on ({}, {}): {lhs} vs {rhs}",
                    hopf.label(g),
                    hopf.label(h)
                ));
            }
        }
    }

    let indices = a.target.basis_indices(window)?;
    for g in &basis {
        let delta = coproduct_key(hopf, g);
        for &bi in &indices {
            let b = a.target.basis(bi);
            let mut lhs = a.target.zero();
            let mut rhs = a.target.zero();
            for ((g1, g2), c) in &delta.terms {
                lhs = lhs.add(&action.act_key(g1, &b).mul(&a.value(g2)).scale(c));
                rhs = rhs.add(&a.value(g1).mul(&action.act_key(g2, &b)).scale(c));
            }
            if lhs != rhs {
                report.central.push(format!(
                    "centrality fails on {} against {}",
                    hopf.label(g),
                    a.target.label(bi)
                ));
            }
        }

        let mut lhs = a.target.zero();
        for ((g1, g2), c) in &delta.terms {
            let arg = HElem::from_key(hopf, g2.clone()).star().antipode();
            lhs = lhs.add(&a.value(g1).mul(&a.eval(&arg).star()).scale(c));
        }
        let eps = HElem::from_key(hopf, g.clone()).counit();
        if lhs != a.target.unit().scale(&eps) {
            report
                .unitary
                .push(format!("unitarity fails on {}: {lhs}", hopf.label(g)));
        }
    }
    Ok(report)
}

#[derive(Debug, Default, serde::Serialize)]
pub struct ExactSequenceReport {
    /// Witnesses where "hat(c) = ê" and "c is invariant" disagree.
    pub kernel: Vec<String>,
    /// Witness pairs where hat fails to be multiplicative.
    pub morphism: Vec<String>,
}

impl ExactSequenceReport {
    pub fn passed(&self) -> bool {
        self.kernel.is_empty() && self.morphism.is_empty()
    }
}

/// On the supplied central unitaries, confirm that the kernel of the hat
/// map is exactly the invariant ones, and that hat is multiplicative.
pub fn exact_sequence_check(
    action: &HAction,
    witnesses: &[CentralUnitary],
) -> Result<ExactSequenceReport> {
    let mut report = ExactSequenceReport::default();
    let unit = ConvolutionMap::unit(&action.hopf, &action.algebra);
    for c in witnesses {
        let in_kernel = ConvolutionMap::hat(c, action) == unit;
        let invariant = action.is_invariant(&c.body);
        if in_kernel != invariant {
            report.kernel.push(format!(
                "hat({c}) = ê is {in_kernel} but invariance is {invariant}"
            ));
        }
    }
    for c1 in witnesses {
        for c2 in witnesses {
            let lhs = ConvolutionMap::hat(&c1.mul(c2), action);
            let rhs = ConvolutionMap::hat(c1, action).convolve(&ConvolutionMap::hat(c2, action))?;
            if lhs != rhs {
                report
                    .morphism
                    .push(format!("hat({c1}·{c2}) differs from hat({c1})*hat({c2})"));
            }
        }
    }
    Ok(report)
}
