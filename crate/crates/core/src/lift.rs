//! Classification of action lifts for enveloping-algebra Hopf structures:
//! restriction of convolution-group members to degree-1 cocycles, the
//! inverse inductive extension, the relation between hat and exp, and the
//! quotient that parametrizes lifts up to isomorphism.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::bigint::BigInt;
use num::{Integer, One, Signed};

use crate::algebra::{exp_central_phased, same_algebra, CentralUnitary, Element};
use crate::bimodule::{same_module, Bimodule, CovariantStructure, ModElem, ModOp};
use crate::cohomology::{ce_d0, ce_d1, h1, CohomologyResult};
use crate::convolution::{u_membership, ConvolutionMap};
use crate::hopf::{same_hopf, HAction, HKey, Hopf};
use crate::intlin::{hermite_basis, lattice_contains, smith_invariant_factors};
use crate::lie::LieAction;
use crate::linalg::Mat;
use crate::scalar::{Rat, Scalar};
use crate::{Error, Result};

/// Where a certified convolution-group member came from.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Provenance {
    ExtendedCocycle,
    Raw,
}

/// A convolution-group member with its membership certificate implied by
/// construction: both constructors verify the four conditions.
#[derive(Clone, Debug)]
pub struct LiftTwist {
    pub map: ConvolutionMap,
    pub provenance: Provenance,
}

impl PartialEq for LiftTwist {
    fn eq(&self, other: &Self) -> bool {
        self.map == other.map
    }
}

impl LiftTwist {
    /// Certify an arbitrary map by a full membership check.
    pub fn certify(map: ConvolutionMap, action: &HAction, window: Option<i64>) -> Result<Self> {
        let report = u_membership(&map, action, window)?;
        if let Some(reason) = report.first_failure() {
            return Err(Error::Model(format!("not a convolution-group member: {reason}")));
        }
        Ok(LiftTwist {
            map,
            provenance: Provenance::Raw,
        })
    }
}

fn lie_action_of(action: &HAction) -> Result<&Arc<LieAction>> {
    action.lie_action().ok_or_else(|| {
        Error::Model("lift classification needs an enveloping-algebra Hopf action".into())
    })
}

fn gen_key(dim: usize, i: usize) -> HKey {
    let mut e = vec![0u32; dim];
    e[i] = 1;
    HKey::Mono(e)
}

/// Values of a member on the Lie generators. The output is verified to be
/// an anti-Hermitian central cocycle; a failure here means the membership
/// certificate was wrong, so it is an internal inconsistency.
pub fn restrict(twist: &LiftTwist, action: &HAction) -> Result<Vec<Element>> {
    let lie_action = lie_action_of(action)?;
    let d = lie_action.lie.dim;
    let alpha: Vec<Element> = (0..d)
        .map(|i| twist.map.value(&gen_key(d, i)))
        .collect();
    for (i, v) in alpha.iter().enumerate() {
        if !v.is_anti_hermitian() || !v.is_central() {
            return Err(Error::Internal(format!(
                "restriction of a certified member is not anti-Hermitian central on ξ{}: {v}",
                i + 1
            )));
        }
    }
    let d1 = ce_d1(lie_action, &alpha)?;
    if let Some(((i, j), v)) = d1.iter().find(|(_, v)| !v.is_zero()) {
        return Err(Error::Internal(format!(
            "restriction of a certified member is not a cocycle on (ξ{},ξ{}): {v}",
            i + 1,
            j + 1
        )));
    }
    Ok(alpha)
}

/// Inductive extension of a degree-1 cocycle to the enveloping algebra:
/// on tensor words, value(ξ⊗Y) = α(ξ)·value(Y) + ξ▹value(Y); descent to
/// the PBW quotient is verified on all bracket relations up to order N,
/// and membership is re-verified.
pub fn extend(alpha: &[Element], action: &HAction, window: Option<i64>) -> Result<LiftTwist> {
    let lie_action = lie_action_of(action)?;
    let d = lie_action.lie.dim;
    let trunc = action
        .hopf
        .truncation()
        .expect("enveloping-algebra Hopf structures carry a truncation");
    if alpha.len() != d {
        return Err(Error::Model(format!(
            "cocycle needs {d} values, got {}",
            alpha.len()
        )));
    }
    for (i, v) in alpha.iter().enumerate() {
        if !v.is_anti_hermitian() || !v.is_central() {
            return Err(Error::Model(format!(
                "cocycle value on ξ{} must be anti-Hermitian central, got {v}",
                i + 1
            )));
        }
    }
    if let Some(((i, j), v)) = ce_d1(lie_action, alpha)?.iter().find(|(_, v)| !v.is_zero()) {
        return Err(Error::Model(format!(
            "not a cocycle: d¹α(ξ{},ξ{}) = {v}",
            i + 1,
            j + 1
        )));
    }

    // tensor-word values by induction on the leading letter
    let mut words: BTreeMap<Vec<usize>, Element> = BTreeMap::new();
    words.insert(Vec::new(), action.algebra.unit());
    let mut layer: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..trunc {
        let mut next = Vec::new();
        for rest in &layer {
            let tail = words[rest].clone();
            for i in 0..d {
                let mut w = Vec::with_capacity(rest.len() + 1);
                w.push(i);
                w.extend_from_slice(rest);
                let v = alpha[i].mul(&tail).add(&lie_action.apply_gen(i, &tail));
                words.insert(w.clone(), v);
                next.push(w);
            }
        }
        layer = next;
    }

    // descent: swapping adjacent leading letters must agree with the
    // bracket, so the word values pass to the PBW quotient
    for (word, _) in words.iter() {
        if word.len() + 2 > trunc as usize {
            continue;
        }
        for i in 0..d {
            for j in 0..d {
                let mut ij = vec![i, j];
                ij.extend_from_slice(word);
                let mut ji = vec![j, i];
                ji.extend_from_slice(word);
                let lhs = words[&ij].sub(&words[&ji]);
                let mut rhs = action.algebra.zero();
                for (k, c) in lie_action.lie.bracket(i, j).iter().enumerate() {
                    if !c.is_zero() {
                        let mut kw = vec![k];
                        kw.extend_from_slice(word);
                        rhs = rhs.add(&words[&kw].scale(c));
                    }
                }
                if lhs != rhs {
                    return Err(Error::Internal(format!(
                        "extension does not descend on (ξ{},ξ{}) against a word of length {}",
                        i + 1,
                        j + 1,
                        word.len()
                    )));
                }
            }
        }
    }

    let mut values = Vec::new();
    for key in action.hopf.basis() {
        let HKey::Mono(ref exps) = key else {
            return Err(Error::Internal("monomial basis expected".into()));
        };
        let mut word = Vec::new();
        for (i, &k) in exps.iter().enumerate() {
            for _ in 0..k {
                word.push(i);
            }
        }
        values.push((key, words[&word].clone()));
    }
    let map = ConvolutionMap::new(&action.hopf, &action.algebra, values)?;
    let report = u_membership(&map, action, window)?;
    if let Some(reason) = report.first_failure() {
        return Err(Error::Internal(format!(
            "extension of a cocycle failed membership: {reason}"
        )));
    }
    Ok(LiftTwist {
        map,
        provenance: Provenance::ExtendedCocycle,
    })
}

/// Check hat(exp(2πi·q + a))|𝔤 = −d⁰a for a central anti-Hermitian
/// nilpotent a (the symbolic phase drops out of both sides).
pub fn hat_exp_relation_check(
    q: &Rat,
    a: &Element,
    action: &HAction,
) -> Result<Vec<String>> {
    let lie_action = lie_action_of(action)?;
    let c = exp_central_phased(q, a)?;
    let hat = ConvolutionMap::hat(&c, action);
    let d = lie_action.lie.dim;
    let minus_d0 = ce_d0(lie_action, a);
    let mut failures = Vec::new();
    for i in 0..d {
        let lhs = hat.value(&gen_key(d, i));
        let rhs = minus_d0[i].neg();
        if lhs != rhs {
            failures.push(format!(
                "hat(exp({a}))(ξ{}) = {lhs} but −d⁰ gives {rhs}",
                i + 1
            ));
        }
    }
    Ok(failures)
}

/// Central unitaries declared to generate the unitary group of the center
/// modulo exponentials, with nothing auto-discovered.
#[derive(Clone)]
pub struct WindingSet {
    pub generators: Vec<CentralUnitary>,
}

impl WindingSet {
    pub fn empty() -> Self {
        WindingSet {
            generators: Vec::new(),
        }
    }

    pub fn new(generators: Vec<CentralUnitary>) -> Self {
        WindingSet { generators }
    }
}

/// The lift-classifying quotient: H¹ as a rational vector space modulo
/// the integer lattice of winding hat-classes, presented through invariant
/// factors after clearing denominators.
pub struct U0Presentation {
    pub cohomology: CohomologyResult,
    /// Rational H¹ coordinates of each winding hat-class.
    pub winding_classes: Vec<Vec<Rat>>,
    /// The common denominator cleared from the winding coordinates.
    pub denominator: BigInt,
    /// Integer matrix `denominator`·winding_classes.
    pub winding_matrix: Vec<Vec<BigInt>>,
    /// Invariant factors of the scaled winding lattice.
    pub invariant_factors: Vec<BigInt>,
}

impl U0Presentation {
    pub fn h1_dim(&self) -> usize {
        self.cohomology.h1_dim()
    }

    pub fn lattice_rank(&self) -> usize {
        self.invariant_factors.len()
    }

    /// Directions of H¹ not met by the lattice stay rational.
    pub fn free_rank(&self) -> usize {
        self.h1_dim() - self.lattice_rank()
    }

    /// Isomorphism type as a readable formula.
    pub fn description(&self) -> String {
        let mut parts = Vec::new();
        match self.lattice_rank() {
            0 => {}
            1 => parts.push("Q/Z".to_string()),
            r => parts.push(format!("(Q/Z)^{r}")),
        }
        match self.free_rank() {
            0 => {}
            1 => parts.push("Q".to_string()),
            k => parts.push(format!("Q^{k}")),
        }
        if parts.is_empty() {
            "trivial".to_string()
        } else {
            parts.join(" x ")
        }
    }

    /// Whether a cocycle class is trivial in the quotient, i.e. lies in
    /// the integer winding lattice.
    pub fn class_is_trivial(&self, class: &[Rat]) -> bool {
        if class.len() != self.h1_dim() {
            return false;
        }
        let mut scale = self.denominator.clone();
        for c in class {
            scale = scale.lcm(c.denom());
        }
        let n = self.h1_dim();
        let to_int = |v: &[Rat]| -> Vec<BigInt> {
            v.iter().map(|c| c.numer() * (&scale / c.denom())).collect()
        };
        let rows: Vec<Vec<BigInt>> = self.winding_classes.iter().map(|w| to_int(w)).collect();
        let hermite = hermite_basis(&rows, n);
        lattice_contains(&hermite, &to_int(class))
    }
}

/// Compute the lift-classifying quotient for an enveloping-algebra action
/// and a declared winding set.
pub fn u0_quotient(
    action: &HAction,
    window: Option<i64>,
    windings: &WindingSet,
) -> Result<U0Presentation> {
    let lie_action = lie_action_of(action)?;
    let cohomology = h1(lie_action, window)?;
    let d = lie_action.lie.dim;

    let mut winding_classes = Vec::new();
    for c in &windings.generators {
        let hat = ConvolutionMap::hat(c, action);
        let alpha: Vec<Element> = (0..d).map(|i| hat.value(&gen_key(d, i))).collect();
        if !cohomology.is_cocycle(&alpha)? {
            return Err(Error::Internal(format!(
                "hat-image of winding {c} is not a cocycle"
            )));
        }
        winding_classes.push(cohomology.h1_coords(&alpha)?);
    }

    let mut denominator = BigInt::one();
    for row in &winding_classes {
        for c in row {
            denominator = denominator.lcm(c.denom());
        }
    }
    let winding_matrix: Vec<Vec<BigInt>> = winding_classes
        .iter()
        .map(|row| {
            row.iter()
                .map(|c| c.numer() * (&denominator / c.denom()))
                .collect()
        })
        .collect();
    let invariant_factors = smith_invariant_factors(&winding_matrix, cohomology.h1_dim());

    Ok(U0Presentation {
        cohomology,
        winding_classes,
        denominator: denominator.abs(),
        winding_matrix,
        invariant_factors,
    })
}

/// Twist a module structure by a convolution-group member with values in
/// the left algebra. For an enveloping algebra each generator picks up
/// left multiplication by the member's value additively; for a group each
/// element's operator is postcomposed with it.
pub fn lift_action(cov: &CovariantStructure, twist: &LiftTwist) -> Result<CovariantStructure> {
    if !same_hopf(&cov.hopf, &twist.map.hopf) {
        return Err(Error::Model(
            "twist and module structure use different Hopf structures".into(),
        ));
    }
    let module = &cov.module;
    if !same_algebra(&twist.map.target, module.left_algebra()) {
        return Err(Error::Model(
            "twist must take values in the left algebra of the module".into(),
        ));
    }
    let mut ops = Vec::with_capacity(cov.ops.len());
    match cov.hopf.as_ref() {
        Hopf::Uea { lie, .. } => {
            for (i, op) in cov.ops.iter().enumerate() {
                let beta = twist.map.value(&gen_key(lie.dim, i));
                ops.push(match op {
                    ModOp::SelfOp { multiplier, base } => ModOp::SelfOp {
                        multiplier: multiplier.add(&beta),
                        base: base.clone(),
                    },
                    ModOp::Table(images) => {
                        let ids = module.basis_indices(None).map_err(|_| {
                            Error::Model(
                                "twisting a table operator needs a finite module basis".into(),
                            )
                        })?;
                        ModOp::Table(
                            ids.iter()
                                .map(|&k| {
                                    let prev = ModElem::from_coords(
                                        module,
                                        images.get(&k).cloned().unwrap_or_default(),
                                    );
                                    let img =
                                        prev.add(&ModElem::basis(module, k).left(&beta));
                                    (k, img.coords().clone())
                                })
                                .collect(),
                        )
                    }
                });
            }
        }
        Hopf::Group { .. } => {
            let ids = module.basis_indices(None).map_err(|_| {
                Error::Model("twisting a group structure needs a finite module basis".into())
            })?;
            for g in 0..cov.ops.len() {
                let beta = twist.map.value(&HKey::Grp(g));
                ops.push(ModOp::Table(
                    ids.iter()
                        .map(|&k| {
                            let img = cov
                                .act_key(&HKey::Grp(g), &ModElem::basis(module, k))
                                .left(&beta);
                            (k, img.coords().clone())
                        })
                        .collect(),
                ));
            }
        }
    }
    CovariantStructure::new(&cov.hopf, module, ops)
}

/// Verdict on whether two module structures are twists of each other, and
/// if so whether the connecting cocycle is trivial in the classifying
/// quotient.
pub struct LiftEquivalence {
    /// The generator values of the twist carrying one structure to the
    /// other.
    pub connecting: Vec<Element>,
    /// Rational coordinates of the connecting cocycle in the cohomology
    /// basis.
    pub class: Vec<Rat>,
    pub quotient: U0Presentation,
    pub isomorphic: bool,
}

/// Decide whether `other` is the twist of `base` by a member whose class
/// vanishes in the lift-classifying quotient. The difference on each Lie
/// generator must be left multiplication by an anti-Hermitian central
/// element, and the values must satisfy the cocycle identity; anything
/// else means the structures are not related by a twist at all.
pub fn lift_equivalence_check(
    base: &CovariantStructure,
    other: &CovariantStructure,
    action: &HAction,
    window: Option<i64>,
    windings: &WindingSet,
) -> Result<LiftEquivalence> {
    if !same_module(&base.module, &other.module) {
        return Err(Error::Model(
            "the two module structures live on different modules".into(),
        ));
    }
    if !same_hopf(&base.hopf, &other.hopf) || !same_hopf(&base.hopf, &action.hopf) {
        return Err(Error::Model("Hopf structures do not match".into()));
    }
    let lie_action = lie_action_of(action)?;
    let module = &base.module;
    if !same_algebra(&action.algebra, module.left_algebra()) {
        return Err(Error::Model(
            "the classifying action must act on the left algebra of the module".into(),
        ));
    }
    let d = lie_action.lie.dim;
    let b_alg = module.left_algebra();
    let mids = module.basis_indices(window)?;

    let mut connecting = Vec::with_capacity(d);
    for i in 0..d {
        let key = gen_key(d, i);
        let delta: Vec<ModElem> = mids
            .iter()
            .map(|&k| {
                let x = ModElem::basis(module, k);
                other.act_key(&key, &x).sub(&base.act_key(&key, &x))
            })
            .collect();
        let beta = match module.as_ref() {
            Bimodule::SelfMod { .. } => {
                let unit = ModElem::from_element(module, &b_alg.unit())?;
                other
                    .act_key(&key, &unit)
                    .sub(&base.act_key(&key, &unit))
                    .to_element()?
            }
            Bimodule::Table(_) => {
                let db = b_alg.dim().expect("table modules have finite algebras");
                let products: Vec<Vec<ModElem>> = (0..db as i64)
                    .map(|b| {
                        mids.iter()
                            .map(|&k| ModElem::basis(module, k).left(&b_alg.basis(b)))
                            .collect()
                    })
                    .collect();
                let mut slots: Vec<i64> = delta
                    .iter()
                    .chain(products.iter().flatten())
                    .flat_map(|v| v.coords().keys().copied())
                    .collect();
                slots.sort();
                slots.dedup();
                let mut rows = Vec::new();
                let mut target = Vec::new();
                for ki in 0..mids.len() {
                    for &slot in &slots {
                        rows.push(
                            (0..db)
                                .map(|b| {
                                    products[b][ki]
                                        .coords()
                                        .get(&slot)
                                        .cloned()
                                        .unwrap_or_else(Scalar::zero)
                                })
                                .collect(),
                        );
                        target.push(
                            delta[ki]
                                .coords()
                                .get(&slot)
                                .cloned()
                                .unwrap_or_else(Scalar::zero),
                        );
                    }
                }
                let sol = Mat::from_rows(rows, db).solve(&target).ok_or_else(|| {
                    Error::Model(format!(
                        "module structures do not differ by left multiplication on ξ{}",
                        i + 1
                    ))
                })?;
                b_alg.element(
                    sol.into_iter()
                        .enumerate()
                        .map(|(b, c)| (b as i64, c))
                        .collect(),
                )
            }
        };
        for (k, dk) in mids.iter().zip(&delta) {
            if ModElem::basis(module, *k).left(&beta) != *dk {
                return Err(Error::Model(format!(
                    "module structures do not differ by left multiplication: mismatch on ξ{} at {}",
                    i + 1,
                    module.label(*k)
                )));
            }
        }
        connecting.push(beta);
    }

    for (i, v) in connecting.iter().enumerate() {
        if !v.is_anti_hermitian() || !v.is_central() {
            return Err(Error::Model(format!(
                "connecting value on ξ{} is not anti-Hermitian central: {v}",
                i + 1
            )));
        }
    }
    if let Some(((i, j), v)) = ce_d1(lie_action, &connecting)?
        .iter()
        .find(|(_, v)| !v.is_zero())
    {
        return Err(Error::Model(format!(
            "connecting values fail the cocycle identity on (ξ{},ξ{}): {v}",
            i + 1,
            j + 1
        )));
    }

    let quotient = u0_quotient(action, window, windings)?;
    let class = quotient.cohomology.h1_coords(&connecting)?;
    let isomorphic = quotient.class_is_trivial(&class);
    Ok(LiftEquivalence {
        connecting,
        class,
        quotient,
        isomorphic,
    })
}
