//! The two Hopf *-algebras of the workbench: truncated universal
//! enveloping algebras in a PBW basis, and group algebras of finite groups
//! given by multiplication tables.
//!
//! Enveloping-algebra elements live below a global truncation order N.
//! Products straighten words by bracket rewriting, which never raises the
//! degree, so a product overflows exactly when the degrees of two factors
//! add beyond N; that is a hard error rather than silent dropping, since
//! every downstream cocycle check would be corrupted by lost terms. The
//! coproduct is degree-preserving and therefore exact.

use num::bigint::BigInt;
use num::One;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::algebra::{Algebra, Element};
use crate::lie::{LieAction, LieAlgebra, Operator};
use crate::scalar::{Rat, Scalar};
use crate::{Error, Result};

/// Basis label: a PBW exponent vector ξ₁^{k₁}···ξ_d^{k_d}, or a group
/// element index.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub enum HKey {
    Mono(Vec<u32>),
    Grp(usize),
}

impl HKey {
    pub fn degree(&self) -> u32 {
        match self {
            HKey::Mono(e) => e.iter().sum(),
            HKey::Grp(_) => 0,
        }
    }
}

impl Ord for HKey {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (HKey::Mono(a), HKey::Mono(b)) => {
                let da: u32 = a.iter().sum();
                let db: u32 = b.iter().sum();
                da.cmp(&db).then_with(|| a.cmp(b))
            }
            (HKey::Grp(a), HKey::Grp(b)) => a.cmp(b),
            (HKey::Mono(_), HKey::Grp(_)) => Ordering::Less,
            (HKey::Grp(_), HKey::Mono(_)) => Ordering::Greater,
        }
    }
}

impl PartialOrd for HKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub enum Hopf {
    Uea {
        lie: Arc<LieAlgebra>,
        trunc: u32,
    },
    Group {
        table: Vec<Vec<usize>>,
        identity: usize,
        inverse: Vec<usize>,
        labels: Vec<String>,
    },
}

impl Hopf {
    pub fn uea(lie: Arc<LieAlgebra>, trunc: u32) -> Result<Arc<Self>> {
        if trunc == 0 {
            return Err(Error::Model("truncation order must be at least 1".into()));
        }
        Ok(Arc::new(Hopf::Uea { lie, trunc }))
    }

    /// A finite group from its multiplication table; group axioms are
    /// verified here since the table is user input.
    pub fn group(table: Vec<Vec<usize>>, labels: Option<Vec<String>>) -> Result<Arc<Self>> {
        let n = table.len();
        if n == 0 {
            return Err(Error::Model("group table must be nonempty".into()));
        }
        for row in &table {
            if row.len() != n || row.iter().any(|&v| v >= n) {
                return Err(Error::Model("group table must be square with in-range entries".into()));
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| table[e][g] == g && table[g][e] == g))
            .ok_or_else(|| Error::Model("group table has no identity".into()))?;
        let mut inverse = vec![usize::MAX; n];
        for g in 0..n {
            inverse[g] = (0..n)
                .find(|&h| table[g][h] == identity && table[h][g] == identity)
                .ok_or_else(|| Error::Model(format!("group element {g} has no inverse")))?;
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::Model(format!(
                            "group table is not associative at ({a},{b},{c})"
                        )));
                    }
                }
            }
        }
        let labels = labels.unwrap_or_else(|| (0..n).map(|g| format!("g{g}")).collect());
        if labels.len() != n {
            return Err(Error::Model("group label count must match order".into()));
        }
        Ok(Arc::new(Hopf::Group {
            table,
            identity,
            inverse,
            labels,
        }))
    }

    pub fn truncation(&self) -> Option<u32> {
        match self {
            Hopf::Uea { trunc, .. } => Some(*trunc),
            Hopf::Group { .. } => None,
        }
    }

    pub fn lie(&self) -> Option<&Arc<LieAlgebra>> {
        match self {
            Hopf::Uea { lie, .. } => Some(lie),
            Hopf::Group { .. } => None,
        }
    }

    pub fn unit_key(&self) -> HKey {
        match self {
            Hopf::Uea { lie, .. } => HKey::Mono(vec![0; lie.dim]),
            Hopf::Group { identity, .. } => HKey::Grp(*identity),
        }
    }

    /// All basis keys: PBW monomials of degree ≤ N ordered by degree then
    /// lexicographically, or all group elements.
    pub fn basis(&self) -> Vec<HKey> {
        match self {
            Hopf::Uea { lie, trunc } => {
                let mut keys = Vec::new();
                let mut current = vec![0u32; lie.dim];
                loop {
                    if current.iter().sum::<u32>() <= *trunc {
                        keys.push(HKey::Mono(current.clone()));
                    }
                    // odometer over exponents bounded by the truncation
                    let mut pos = lie.dim;
                    loop {
                        if pos == 0 {
                            keys.sort();
                            return keys;
                        }
                        pos -= 1;
                        if current[pos] < *trunc {
                            current[pos] += 1;
                            for v in current.iter_mut().skip(pos + 1) {
                                *v = 0;
                            }
                            break;
                        }
                    }
                }
            }
            Hopf::Group { table, .. } => (0..table.len()).map(HKey::Grp).collect(),
        }
    }

    pub fn label(&self, key: &HKey) -> String {
        match (self, key) {
            (Hopf::Uea { .. }, HKey::Mono(e)) => {
                if e.iter().all(|&k| k == 0) {
                    return "1".to_string();
                }
                let mut parts = Vec::new();
                for (i, &k) in e.iter().enumerate() {
                    match k {
                        0 => {}
                        1 => parts.push(format!("ξ{}", i + 1)),
                        _ => parts.push(format!("ξ{}^{}", i + 1, k)),
                    }
                }
                parts.join("")
            }
            (Hopf::Group { labels, .. }, HKey::Grp(g)) => labels[*g].clone(),
            _ => "?".to_string(),
        }
    }
}

impl fmt::Debug for Hopf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Hopf::Uea { lie, trunc } => write!(f, "Uea(dim {}, order {trunc})", lie.dim),
            Hopf::Group { table, .. } => write!(f, "Group(order {})", table.len()),
        }
    }
}

pub fn same_hopf(a: &Arc<Hopf>, b: &Arc<Hopf>) -> bool {
    if Arc::ptr_eq(a, b) {
        return true;
    }
    match (a.as_ref(), b.as_ref()) {
        (
            Hopf::Uea { lie: l1, trunc: t1 },
            Hopf::Uea { lie: l2, trunc: t2 },
        ) => t1 == t2 && (Arc::ptr_eq(l1, l2) || l1.dim == l2.dim),
        (Hopf::Group { table: t1, .. }, Hopf::Group { table: t2, .. }) => t1 == t2,
        _ => false,
    }
}

#[derive(Clone)]
pub struct HElem {
    pub hopf: Arc<Hopf>,
    coeffs: BTreeMap<HKey, Scalar>,
}

impl PartialEq for HElem {
    fn eq(&self, other: &Self) -> bool {
        same_hopf(&self.hopf, &other.hopf) && self.coeffs == other.coeffs
    }
}

impl Eq for HElem {}

fn merge(out: &mut BTreeMap<HKey, Scalar>, k: HKey, add: Scalar) {
    if add.is_zero() {
        return;
    }
    match out.entry(k) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(add);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            *e.get_mut() += add;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

/// PBW-sort a generator word, rewriting ξ_b ξ_a = ξ_a ξ_b + [ξ_b, ξ_a].
/// The result maps exponent vectors to coefficients; degree never grows.
fn straighten(lie: &LieAlgebra, word: Vec<usize>, coeff: Scalar) -> BTreeMap<Vec<u32>, Scalar> {
    let mut done: BTreeMap<Vec<u32>, Scalar> = BTreeMap::new();
    let mut work = vec![(coeff, word)];
    while let Some((c, w)) = work.pop() {
        if c.is_zero() {
            continue;
        }
        match w.windows(2).position(|p| p[0] > p[1]) {
            None => {
                let mut exps = vec![0u32; lie.dim];
                for letter in &w {
                    exps[*letter] += 1;
                }
                match done.entry(exps) {
                    std::collections::btree_map::Entry::Vacant(e) => {
                        e.insert(c);
                    }
                    std::collections::btree_map::Entry::Occupied(mut e) => {
                        *e.get_mut() += c;
                        if e.get().is_zero() {
                            e.remove();
                        }
                    }
                }
            }
            Some(p) => {
                let mut swapped = w.clone();
                swapped.swap(p, p + 1);
                let bracket = lie.bracket(w[p], w[p + 1]);
                for (k, bc) in bracket.iter().enumerate() {
                    if bc.is_zero() {
                        continue;
                    }
                    let mut contracted = Vec::with_capacity(w.len() - 1);
                    contracted.extend_from_slice(&w[..p]);
                    contracted.push(k);
                    contracted.extend_from_slice(&w[p + 2..]);
                    work.push((&c * bc, contracted));
                }
                work.push((c, swapped));
            }
        }
    }
    done
}

fn mono_word(exps: &[u32]) -> Vec<usize> {
    let mut w = Vec::new();
    for (i, &k) in exps.iter().enumerate() {
        for _ in 0..k {
            w.push(i);
        }
    }
    w
}

fn binom(n: u32, k: u32) -> Scalar {
    let mut v = BigInt::one();
    for j in 0..k {
        v = v * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    Scalar::from_rat(Rat::from_integer(v))
}

impl HElem {
    pub fn zero(hopf: &Arc<Hopf>) -> Self {
        HElem {
            hopf: Arc::clone(hopf),
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(hopf: &Arc<Hopf>) -> Self {
        HElem::from_key(hopf, hopf.unit_key())
    }

    pub fn from_key(hopf: &Arc<Hopf>, key: HKey) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(key, Scalar::one());
        HElem {
            hopf: Arc::clone(hopf),
            coeffs,
        }
    }

    /// The generator ξ_{i+1} of an enveloping algebra.
    pub fn gen(hopf: &Arc<Hopf>, i: usize) -> Result<Self> {
        match hopf.as_ref() {
            Hopf::Uea { lie, .. } => {
                if i >= lie.dim {
                    return Err(Error::Model(format!("no generator {i}")));
                }
                let mut e = vec![0u32; lie.dim];
                e[i] = 1;
                Ok(HElem::from_key(hopf, HKey::Mono(e)))
            }
            Hopf::Group { .. } => Err(Error::Model("group algebras have no Lie generators".into())),
        }
    }

    pub fn coeffs(&self) -> &BTreeMap<HKey, Scalar> {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &HElem) -> HElem {
        let mut out = self.coeffs.clone();
        for (k, c) in &other.coeffs {
            merge(&mut out, k.clone(), c.clone());
        }
        HElem {
            hopf: Arc::clone(&self.hopf),
            coeffs: out,
        }
    }

    pub fn neg(&self) -> HElem {
        HElem {
            hopf: Arc::clone(&self.hopf),
            coeffs: self.coeffs.iter().map(|(k, c)| (k.clone(), -c.clone())).collect(),
        }
    }

    pub fn sub(&self, other: &HElem) -> HElem {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Scalar) -> HElem {
        if c.is_zero() {
            return HElem::zero(&self.hopf);
        }
        HElem {
            hopf: Arc::clone(&self.hopf),
            coeffs: self.coeffs.iter().map(|(k, v)| (k.clone(), c * v)).collect(),
        }
    }

    pub fn mul(&self, other: &HElem) -> Result<HElem> {
        let mut out = BTreeMap::new();
        match self.hopf.as_ref() {
            Hopf::Group { table, .. } => {
                for (ka, ca) in &self.coeffs {
                    for (kb, cb) in &other.coeffs {
                        let (HKey::Grp(a), HKey::Grp(b)) = (ka, kb) else {
                            return Err(Error::Internal("group element with monomial key".into()));
                        };
                        merge(&mut out, HKey::Grp(table[*a][*b]), ca * cb);
                    }
                }
            }
            Hopf::Uea { lie, trunc } => {
                for (ka, ca) in &self.coeffs {
                    for (kb, cb) in &other.coeffs {
                        let (HKey::Mono(ea), HKey::Mono(eb)) = (ka, kb) else {
                            return Err(Error::Internal("monomial with group key".into()));
                        };
                        let (da, db) = (ka.degree(), kb.degree());
                        if da + db > *trunc {
                            return Err(Error::TruncationOverflow(da, db, *trunc));
                        }
                        let mut word = mono_word(ea);
                        word.extend(mono_word(eb));
                        for (exps, c) in straighten(lie, word, ca * cb) {
                            merge(&mut out, HKey::Mono(exps), c);
                        }
                    }
                }
            }
        }
        Ok(HElem {
            hopf: Arc::clone(&self.hopf),
            coeffs: out,
        })
    }

    pub fn counit(&self) -> Scalar {
        match self.hopf.as_ref() {
            Hopf::Uea { .. } => self.coeffs.get(&self.hopf.unit_key()).cloned().unwrap_or_else(Scalar::zero),
            Hopf::Group { .. } => {
                let mut v = Scalar::zero();
                for c in self.coeffs.values() {
                    v += c;
                }
                v
            }
        }
    }

    /// Antipode: antihomomorphic extension of S(ξ) = -ξ, resp. S(g) = g⁻¹.
    pub fn antipode(&self) -> HElem {
        let mut out = BTreeMap::new();
        match self.hopf.as_ref() {
            Hopf::Group { inverse, .. } => {
                for (k, c) in &self.coeffs {
                    let HKey::Grp(g) = k else { continue };
                    merge(&mut out, HKey::Grp(inverse[*g]), c.clone());
                }
            }
            Hopf::Uea { lie, .. } => {
                for (k, c) in &self.coeffs {
                    let HKey::Mono(e) = k else { continue };
                    let deg = k.degree();
                    let sign = if deg % 2 == 0 { c.clone() } else { -c.clone() };
                    let mut word = mono_word(e);
                    word.reverse();
                    for (exps, v) in straighten(lie, word, sign) {
                        merge(&mut out, HKey::Mono(exps), v);
                    }
                }
            }
        }
        HElem {
            hopf: Arc::clone(&self.hopf),
            coeffs: out,
        }
    }

    /// The *-involution: antilinear, ξ* = -ξ on real generators (with
    /// factor order reversed), g* = g⁻¹.
    pub fn star(&self) -> HElem {
        let mut out = BTreeMap::new();
        match self.hopf.as_ref() {
            Hopf::Group { inverse, .. } => {
                for (k, c) in &self.coeffs {
                    let HKey::Grp(g) = k else { continue };
                    merge(&mut out, HKey::Grp(inverse[*g]), c.conj());
                }
            }
            Hopf::Uea { lie, .. } => {
                for (k, c) in &self.coeffs {
                    let HKey::Mono(e) = k else { continue };
                    let deg = k.degree();
                    let conj = c.conj();
                    let sign = if deg % 2 == 0 { conj } else { -conj };
                    let mut word = mono_word(e);
                    word.reverse();
                    for (exps, v) in straighten(lie, word, sign) {
                        merge(&mut out, HKey::Mono(exps), v);
                    }
                }
            }
        }
        HElem {
            hopf: Arc::clone(&self.hopf),
            coeffs: out,
        }
    }
}

impl fmt::Display for HElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let label = self.hopf.label(k);
            if c.is_one() {
                write!(f, "{label}")?;
            } else {
                write!(f, "({c})*{label}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for HElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// An exact Sweedler expansion Δ(h) = Σ h₍₁₎ ⊗ h₍₂₎ on basis keys.
#[derive(Clone, PartialEq, Debug)]
pub struct Sweedler {
    pub terms: BTreeMap<(HKey, HKey), Scalar>,
}

impl Sweedler {
    pub fn flip(&self) -> Sweedler {
        Sweedler {
            terms: self
                .terms
                .iter()
                .map(|((a, b), c)| ((b.clone(), a.clone()), c.clone()))
                .collect(),
        }
    }
}

/// Δ on a single basis key: binomial expansion for PBW monomials (exact,
/// degree-preserving), grouplike for group elements.
pub fn coproduct_key(hopf: &Hopf, key: &HKey) -> Sweedler {
    let mut terms = BTreeMap::new();
    match (hopf, key) {
        (Hopf::Group { .. }, HKey::Grp(g)) => {
            terms.insert((HKey::Grp(*g), HKey::Grp(*g)), Scalar::one());
        }
        (Hopf::Uea { lie, .. }, HKey::Mono(e)) => {
            // iterate j ≤ e componentwise
            let mut j = vec![0u32; lie.dim];
            loop {
                let mut coeff = Scalar::one();
                for i in 0..lie.dim {
                    coeff = &coeff * &binom(e[i], j[i]);
                }
                let rest: Vec<u32> = e.iter().zip(&j).map(|(a, b)| a - b).collect();
                terms.insert((HKey::Mono(j.clone()), HKey::Mono(rest)), coeff);
                let mut pos = lie.dim;
                loop {
                    if pos == 0 {
                        return Sweedler { terms };
                    }
                    pos -= 1;
                    if j[pos] < e[pos] {
                        j[pos] += 1;
                        for v in j.iter_mut().skip(pos + 1) {
                            *v = 0;
                        }
                        break;
                    }
                }
            }
        }
        _ => {}
    }
    Sweedler { terms }
}

pub fn coproduct(h: &HElem) -> Sweedler {
    let mut terms: BTreeMap<(HKey, HKey), Scalar> = BTreeMap::new();
    for (k, c) in h.coeffs() {
        for (pair, v) in coproduct_key(&h.hopf, k).terms {
            let add = c * &v;
            match terms.entry(pair) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(add);
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    *e.get_mut() += add;
                    if e.get().is_zero() {
                        e.remove();
                    }
                }
            }
        }
    }
    Sweedler { terms }
}

#[derive(Debug, Default, serde::Serialize)]
pub struct HopfAxiomReport {
    pub coassociativity: Vec<String>,
    pub counit: Vec<String>,
    pub antipode: Vec<String>,
    pub star: Vec<String>,
    pub product_associativity: Vec<String>,
    pub product_compatibility: Vec<String>,
    pub cocommutativity: Vec<String>,
}

impl HopfAxiomReport {
    pub fn passed(&self) -> bool {
        self.coassociativity.is_empty()
            && self.counit.is_empty()
            && self.antipode.is_empty()
            && self.star.is_empty()
            && self.product_associativity.is_empty()
            && self.product_compatibility.is_empty()
            && self.cocommutativity.is_empty()
    }
}

/// Exhaustive axiom verification on all basis keys (and key pairs/triples
/// within truncation for the product laws).
pub fn hopf_axiom_report(hopf: &Arc<Hopf>) -> HopfAxiomReport {
    let mut report = HopfAxiomReport::default();
    let basis = hopf.basis();
    for key in &basis {
        let label = hopf.label(key);
        let h = HElem::from_key(hopf, key.clone());
        let delta = coproduct(&h);

        // (Δ⊗id)Δ vs (id⊗Δ)Δ as triple-tensor coefficient maps
        let mut left: BTreeMap<(HKey, HKey, HKey), Scalar> = BTreeMap::new();
        let mut right: BTreeMap<(HKey, HKey, HKey), Scalar> = BTreeMap::new();
        for ((a, b), c) in &delta.terms {
            for ((a1, a2), c2) in coproduct_key(hopf, a).terms {
                let v = c * &c2;
                if !v.is_zero() {
                    *left.entry((a1, a2, b.clone())).or_insert_with(Scalar::zero) += v;
                }
            }
            for ((b1, b2), c2) in coproduct_key(hopf, b).terms {
                let v = c * &c2;
                if !v.is_zero() {
                    *right.entry((a.clone(), b1, b2)).or_insert_with(Scalar::zero) += v;
                }
            }
        }
        left.retain(|_, v| !v.is_zero());
        right.retain(|_, v| !v.is_zero());
        if left != right {
            report.coassociativity.push(format!("coassociativity fails on {label}"));
        }

        // counit identities
        let mut from_left = HElem::zero(hopf);
        let mut from_right = HElem::zero(hopf);
        for ((a, b), c) in &delta.terms {
            let ea = HElem::from_key(hopf, a.clone()).counit();
            from_left = from_left.add(&HElem::from_key(hopf, b.clone()).scale(&(&ea * c)));
            let eb = HElem::from_key(hopf, b.clone()).counit();
            from_right = from_right.add(&HElem::from_key(hopf, a.clone()).scale(&(&eb * c)));
        }
        if from_left != h || from_right != h {
            report.counit.push(format!("counit identity fails on {label}"));
        }

        // antipode identity m∘(S⊗id)∘Δ = ε(·)1 (and the mirrored one)
        let target = HElem::one(hopf).scale(&h.counit());
        let mut s_left = HElem::zero(hopf);
        let mut s_right = HElem::zero(hopf);
        let mut antipode_ok = true;
        for ((a, b), c) in &delta.terms {
            let sa = HElem::from_key(hopf, a.clone()).antipode();
            let hb = HElem::from_key(hopf, b.clone());
            match sa.mul(&hb) {
                Ok(p) => s_left = s_left.add(&p.scale(c)),
                Err(_) => {
                    antipode_ok = false;
                }
            }
            let ha = HElem::from_key(hopf, a.clone());
            let sb = hb.antipode();
            match ha.mul(&sb) {
                Ok(p) => s_right = s_right.add(&p.scale(c)),
                Err(_) => {
                    antipode_ok = false;
                }
            }
        }
        if !antipode_ok || s_left != target || s_right != target {
            report.antipode.push(format!("antipode identity fails on {label}"));
        }

        // S(S(h*)*) = h
        if h.star().antipode().star().antipode() != h {
            report.star.push(format!("S(S(h*)*) = h fails on {label}"));
        }

        // cocommutativity
        if delta.flip() != delta {
            report.cocommutativity.push(format!("coproduct not cocommutative on {label}"));
        }
    }

    // product laws on pairs/triples within truncation
    let n = hopf.truncation().unwrap_or(0);
    for k1 in &basis {
        for k2 in &basis {
            if k1.degree() + k2.degree() > n && hopf.truncation().is_some() {
                continue;
            }
            let h1 = HElem::from_key(hopf, k1.clone());
            let h2 = HElem::from_key(hopf, k2.clone());
            let Ok(p12) = h1.mul(&h2) else { continue };

            // Δ(ab) = Δ(a)Δ(b)
            let lhs = coproduct(&p12);
            let mut rhs: BTreeMap<(HKey, HKey), Scalar> = BTreeMap::new();
            let d1 = coproduct(&h1);
            let d2 = coproduct(&h2);
            let mut compatible = true;
            'outer: for ((a1, a2), c1) in &d1.terms {
                for ((b1, b2), c2) in &d2.terms {
                    let left = match HElem::from_key(hopf, a1.clone())
                        .mul(&HElem::from_key(hopf, b1.clone()))
                    {
                        Ok(v) => v,
                        Err(_) => {
                            compatible = false;
                            break 'outer;
                        }
                    };
                    let right = match HElem::from_key(hopf, a2.clone())
                        .mul(&HElem::from_key(hopf, b2.clone()))
                    {
                        Ok(v) => v,
                        Err(_) => {
                            compatible = false;
                            break 'outer;
                        }
                    };
                    for (ka, ca) in left.coeffs() {
                        for (kb, cb) in right.coeffs() {
                            let add = &(c1 * c2) * &(ca * cb);
                            if add.is_zero() {
                                continue;
                            }
                            *rhs.entry((ka.clone(), kb.clone())).or_insert_with(Scalar::zero) += add;
                        }
                    }
                }
            }
            rhs.retain(|_, v| !v.is_zero());
            if !compatible || lhs.terms != rhs {
                report.product_compatibility.push(format!(
                    "Δ(ab) = Δ(a)Δ(b) fails on ({}, {})",
                    hopf.label(k1),
                    hopf.label(k2)
                ));
            }

            for k3 in &basis {
                if hopf.truncation().is_some()
                    && k1.degree() + k2.degree() + k3.degree() > n
                {
                    continue;
                }
                let h3 = HElem::from_key(hopf, k3.clone());
                let a = p12.mul(&h3);
                let b = match h2.mul(&h3) {
                    Ok(p23) => h1.mul(&p23),
                    Err(e) => Err(e),
                };
                match (a, b) {
                    (Ok(x), Ok(y)) if x == y => {}
                    _ => report.product_associativity.push(format!(
                        "associativity fails on ({}, {}, {})",
                        hopf.label(k1),
                        hopf.label(k2),
                        hopf.label(k3)
                    )),
                }
            }
        }
    }
    report
}

/// An H-module-algebra structure: a Lie action extended to the enveloping
/// algebra, or a finite group acting by *-automorphism tables.
pub struct HAction {
    pub hopf: Arc<Hopf>,
    pub algebra: Arc<Algebra>,
    kind: HActionKind,
}

enum HActionKind {
    Lie(Arc<LieAction>),
    Group(Vec<Operator>),
}

impl HAction {
    pub fn from_lie(hopf: Arc<Hopf>, action: Arc<LieAction>) -> Result<Self> {
        match hopf.as_ref() {
            Hopf::Uea { lie, .. } if lie.dim == action.lie.dim => Ok(HAction {
                algebra: Arc::clone(&action.algebra),
                kind: HActionKind::Lie(action),
                hopf,
            }),
            Hopf::Uea { .. } => Err(Error::Model(
                "action dimension does not match the enveloping algebra".into(),
            )),
            Hopf::Group { .. } => Err(Error::Model(
                "a Lie action needs an enveloping-algebra Hopf structure".into(),
            )),
        }
    }

    pub fn from_group(hopf: Arc<Hopf>, algebra: Arc<Algebra>, ops: Vec<Operator>) -> Result<Self> {
        match hopf.as_ref() {
            Hopf::Group { table, .. } if table.len() == ops.len() => Ok(HAction {
                hopf,
                algebra,
                kind: HActionKind::Group(ops),
            }),
            Hopf::Group { .. } => Err(Error::Model(
                "group action needs one operator per group element".into(),
            )),
            Hopf::Uea { .. } => Err(Error::Model(
                "a group action needs a group-algebra Hopf structure".into(),
            )),
        }
    }

    pub fn lie_action(&self) -> Option<&Arc<LieAction>> {
        match &self.kind {
            HActionKind::Lie(a) => Some(a),
            HActionKind::Group(_) => None,
        }
    }

    pub fn act_key(&self, key: &HKey, a: &Element) -> Element {
        match (&self.kind, key) {
            (HActionKind::Lie(action), HKey::Mono(e)) => action.apply_monomial(e, a),
            (HActionKind::Group(ops), HKey::Grp(g)) => ops[*g].apply(a),
            _ => a.algebra.zero(),
        }
    }

    pub fn act(&self, h: &HElem, a: &Element) -> Element {
        let mut out = self.algebra.zero();
        for (k, c) in h.coeffs() {
            out = out.add(&self.act_key(k, a).scale(c));
        }
        out
    }

    /// Invariance under the whole Hopf action: g▹a = ε(g)a on every basis
    /// key (for an enveloping algebra this is annihilation by 𝔤).
    pub fn is_invariant(&self, a: &Element) -> bool {
        self.hopf.basis().iter().all(|key| {
            let eps = HElem::from_key(&self.hopf, key.clone()).counit();
            self.act_key(key, a) == a.scale(&eps)
        })
    }
}

#[derive(Debug, Default, serde::Serialize)]
pub struct StarActionReport {
    pub unit_action: Vec<String>,
    pub module: Vec<String>,
    pub coproduct_rule: Vec<String>,
    pub star_rule: Vec<String>,
    pub counit_rule: Vec<String>,
}

impl StarActionReport {
    pub fn passed(&self) -> bool {
        self.unit_action.is_empty()
            && self.module.is_empty()
            && self.coproduct_rule.is_empty()
            && self.star_rule.is_empty()
            && self.counit_rule.is_empty()
    }
}

/// Verify the *-action axioms exhaustively on Hopf basis keys against
/// algebra basis elements (windowed on the circle model):
/// 1▹a = a, (gh)▹a = g▹(h▹a), g▹(ab) = (g₍₁₎▹a)(g₍₂₎▹b),
/// (g▹a)* = S(g)*▹a*, g▹1 = ε(g)1.
pub fn star_action_report(action: &HAction, window: Option<i64>) -> Result<StarActionReport> {
    let mut report = StarActionReport::default();
    let hopf = &action.hopf;
    let basis = hopf.basis();
    let indices = action.algebra.basis_indices(window)?;
    let n = hopf.truncation();

    let one = action.algebra.unit();
    for &i in &indices {
        let a = action.algebra.basis(i);
        if action.act_key(&hopf.unit_key(), &a) != a {
            report
                .unit_action
                .push(format!("1▹{} differs from it", action.algebra.label(i)));
        }
    }

    for key in &basis {
        let h = HElem::from_key(hopf, key.clone());
        let label = hopf.label(key);

        // g▹1 = ε(g)·1
        let lhs = action.act_key(key, &one);
        let rhs = one.scale(&h.counit());
        if lhs != rhs {
            report.counit_rule.push(format!("{label}▹1 = ε({label})1 fails"));
        }

        let delta = coproduct_key(hopf, key);
        for &i in &indices {
            let a = action.algebra.basis(i);

            // (g▹a)* = S(g)*▹a*
            let lhs = action.act_key(key, &a).star();
            let sg_star = h.antipode().star();
            let rhs = action.act(&sg_star, &a.star());
            if lhs != rhs {
                report.star_rule.push(format!(
                    "(g▹a)* = S(g)*▹a* fails for g = {label}, a = {}",
                    action.algebra.label(i)
                ));
            }

            for &j in &indices {
                let b = action.algebra.basis(j);
                let lhs = action.act_key(key, &a.mul(&b));
                let mut rhs = action.algebra.zero();
                for ((k1, k2), c) in &delta.terms {
                    let part = action.act_key(k1, &a).mul(&action.act_key(k2, &b));
                    rhs = rhs.add(&part.scale(c));
                }
                if lhs != rhs {
                    report.coproduct_rule.push(format!(
                        "g▹(ab) = (g₍₁₎▹a)(g₍₂₎▹b) fails for g = {label}, (a,b) = ({}, {})",
                        action.algebra.label(i),
                        action.algebra.label(j)
                    ));
                }
            }
        }
    }

    for k1 in &basis {
        for k2 in &basis {
            if let Some(n) = n {
                if k1.degree() + k2.degree() > n {
                    continue;
                }
            }
            let h1 = HElem::from_key(hopf, k1.clone());
            let h2 = HElem::from_key(hopf, k2.clone());
            let prod = h1.mul(&h2)?;
            for &i in &indices {
                let a = action.algebra.basis(i);
                let lhs = action.act(&prod, &a);
                let rhs = action.act_key(k1, &action.act_key(k2, &a));
                if lhs != rhs {
                    report.module.push(format!(
                        "(gh)▹a = g▹(h▹a) fails for ({}, {}) on {}",
                        hopf.label(k1),
                        hopf.label(k2),
                        action.algebra.label(i)
                    ));
                }
            }
        }
    }
    Ok(report)
}
