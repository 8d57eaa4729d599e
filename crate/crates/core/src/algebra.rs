//! Model *-algebras presented by structure constants.
//!
//! Five shapes cover every construction in the workbench: functions on a
//! finite set, truncated polynomials K[x]/(x^n), full matrix algebras,
//! Laurent polynomials in a unitary u (the algebraic circle), and finite
//! direct products of those. Finite models carry explicit multiplication
//! and involution tables that are verified (associativity, *-antihomo-
//! morphism) at build time; the Laurent model is handled symbolically with
//! finite-support elements, and operations that need a finite basis take a
//! mode window.
//!
//! Basis indexing is a single flat `i64`: nonnegative positions for finite
//! models, the mode k for Laurent. Elements are canonical sparse maps, so
//! equality is decidable everywhere.

use num::bigint::BigInt;
use num::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::linalg::Mat;
use crate::scalar::{Rat, Scalar};
use crate::{Error, Result};

pub type SparseVec = BTreeMap<i64, Scalar>;

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModelSpec {
    FiniteFunctions { points: Vec<String> },
    TruncatedPoly { order: u32 },
    Matrix { size: u32 },
    Laurent,
    Product { factors: Vec<ModelSpec> },
}

enum Kind {
    Finite {
        dim: usize,
        labels: Vec<String>,
        unit: SparseVec,
        mul: Vec<Vec<SparseVec>>,
        star: Vec<SparseVec>,
        commutative: bool,
    },
    Laurent,
}

pub struct Algebra {
    pub spec: ModelSpec,
    kind: Kind,
}

fn single(i: i64) -> SparseVec {
    let mut v = SparseVec::new();
    v.insert(i, Scalar::one());
    v
}

struct Tables {
    labels: Vec<String>,
    unit: SparseVec,
    mul: Vec<Vec<SparseVec>>,
    star: Vec<SparseVec>,
}

fn build_tables(spec: &ModelSpec) -> Result<Tables> {
    match spec {
        ModelSpec::FiniteFunctions { points } => {
            if points.is_empty() {
                return Err(Error::Model("function algebra needs a nonempty point set".into()));
            }
            {
                let mut seen = points.clone();
                seen.sort();
                seen.dedup();
                if seen.len() != points.len() {
                    return Err(Error::Model("function algebra points must be distinct".into()));
                }
            }
            let dim = points.len();
            let mul = (0..dim)
                .map(|i| {
                    (0..dim)
                        .map(|j| if i == j { single(i as i64) } else { SparseVec::new() })
                        .collect()
                })
                .collect();
            Ok(Tables {
                labels: points.iter().map(|p| format!("e_{p}")).collect(),
                unit: (0..dim).map(|i| (i as i64, Scalar::one())).collect(),
                mul,
                star: (0..dim).map(|i| single(i as i64)).collect(),
            })
        }
        ModelSpec::TruncatedPoly { order } => {
            if *order == 0 {
                return Err(Error::Model("truncated polynomial order must be at least 1".into()));
            }
            let n = *order as usize;
            let mul = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            if i + j < n {
                                single((i + j) as i64)
                            } else {
                                SparseVec::new()
                            }
                        })
                        .collect()
                })
                .collect();
            let labels = (0..n)
                .map(|k| match k {
                    0 => "1".to_string(),
                    1 => "x".to_string(),
                    _ => format!("x^{k}"),
                })
                .collect();
            Ok(Tables {
                labels,
                unit: single(0),
                mul,
                star: (0..n).map(|i| single(i as i64)).collect(),
            })
        }
        ModelSpec::Matrix { size } => {
            if *size == 0 {
                return Err(Error::Model("matrix size must be at least 1".into()));
            }
            let n = *size as usize;
            let dim = n * n;
            let idx = |i: usize, j: usize| (i * n + j) as i64;
            let mut mul = vec![vec![SparseVec::new(); dim]; dim];
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        for l in 0..n {
                            if j == k {
                                mul[(idx(i, j)) as usize][(idx(k, l)) as usize] = single(idx(i, l));
                            }
                        }
                    }
                }
            }
            let star = (0..n)
                .flat_map(|i| (0..n).map(move |j| single(idx(j, i))))
                .collect();
            Ok(Tables {
                labels: (0..n)
                    .flat_map(|i| (0..n).map(move |j| format!("E{}{}", i + 1, j + 1)))
                    .collect(),
                unit: (0..n).map(|i| (idx(i, i), Scalar::one())).collect(),
                mul,
                star,
            })
        }
        ModelSpec::Laurent => Err(Error::Model("Laurent model has no finite tables".into())),
        ModelSpec::Product { factors } => {
            if factors.is_empty() {
                return Err(Error::Model("product needs at least one factor".into()));
            }
            let mut parts = Vec::new();
            for f in factors {
                if matches!(f, ModelSpec::Laurent) {
                    return Err(Error::Model(
                        "product factors must be finite-dimensional models".into(),
                    ));
                }
                parts.push(build_tables(f)?);
            }
            let dims: Vec<usize> = parts.iter().map(|p| p.labels.len()).collect();
            let total: usize = dims.iter().sum();
            let offsets: Vec<usize> = dims
                .iter()
                .scan(0, |acc, d| {
                    let o = *acc;
                    *acc += d;
                    Some(o)
                })
                .collect();
            let shift = |v: &SparseVec, off: usize| -> SparseVec {
                v.iter().map(|(k, c)| (k + off as i64, c.clone())).collect()
            };
            let mut mul = vec![vec![SparseVec::new(); total]; total];
            let mut star = vec![SparseVec::new(); total];
            let mut unit = SparseVec::new();
            let mut labels = vec![String::new(); total];
            for (c, part) in parts.iter().enumerate() {
                let off = offsets[c];
                for (i, row) in part.mul.iter().enumerate() {
                    for (j, v) in row.iter().enumerate() {
                        mul[off + i][off + j] = shift(v, off);
                    }
                }
                for (i, v) in part.star.iter().enumerate() {
                    star[off + i] = shift(v, off);
                }
                unit.extend(shift(&part.unit, off));
                for (i, l) in part.labels.iter().enumerate() {
                    labels[off + i] = format!("{c}:{l}");
                }
            }
            Ok(Tables {
                labels,
                unit,
                mul,
                star,
            })
        }
    }
}

fn sparse_mul_tables(mul: &[Vec<SparseVec>], a: &SparseVec, b: &SparseVec) -> SparseVec {
    let mut out = SparseVec::new();
    for (i, ca) in a {
        for (j, cb) in b {
            for (k, c) in &mul[*i as usize][*j as usize] {
                let add = &(ca * cb) * c;
                merge_coeff(&mut out, *k, add);
            }
        }
    }
    out
}

fn merge_coeff(out: &mut SparseVec, k: i64, add: Scalar) {
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

impl Algebra {
    pub fn build(spec: ModelSpec) -> Result<Arc<Algebra>> {
        if matches!(spec, ModelSpec::Laurent) {
            return Ok(Arc::new(Algebra {
                spec,
                kind: Kind::Laurent,
            }));
        }
        let t = build_tables(&spec)?;
        let dim = t.labels.len();
        // exhaustive build-time verification on the generated tables
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    let ab = &t.mul[i][j];
                    let bc = &t.mul[j][k];
                    let left = sparse_mul_tables(&t.mul, ab, &single(k as i64));
                    let right = sparse_mul_tables(&t.mul, &single(i as i64), bc);
                    if left != right {
                        return Err(Error::Internal(format!(
                            "associativity failed on basis triple ({i},{j},{k})"
                        )));
                    }
                }
            }
        }
        for i in 0..dim {
            for j in 0..dim {
                let lhs: SparseVec = {
                    // star(e_i e_j), computed through the tables
                    let prod = &t.mul[i][j];
                    let mut out = SparseVec::new();
                    for (k, c) in prod {
                        for (m, s) in &t.star[*k as usize] {
                            merge_coeff(&mut out, *m, &c.conj() * s);
                        }
                    }
                    out
                };
                let rhs = sparse_mul_tables(&t.mul, &t.star[j], &t.star[i]);
                if lhs != rhs {
                    return Err(Error::Internal(format!(
                        "involution is not an antihomomorphism on pair ({i},{j})"
                    )));
                }
            }
        }
        let commutative = (0..dim).all(|i| (0..dim).all(|j| t.mul[i][j] == t.mul[j][i]));
        Ok(Arc::new(Algebra {
            spec,
            kind: Kind::Finite {
                dim,
                labels: t.labels,
                unit: t.unit,
                mul: t.mul,
                star: t.star,
                commutative,
            },
        }))
    }

    pub fn dim(&self) -> Option<usize> {
        match &self.kind {
            Kind::Finite { dim, .. } => Some(*dim),
            Kind::Laurent => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.kind, Kind::Finite { .. })
    }

    pub fn is_commutative(&self) -> bool {
        match &self.kind {
            Kind::Finite { commutative, .. } => *commutative,
            Kind::Laurent => true,
        }
    }

    /// Basis index list: everything for finite models, |k| ≤ window for
    /// Laurent.
    pub fn basis_indices(&self, window: Option<i64>) -> Result<Vec<i64>> {
        match &self.kind {
            Kind::Finite { dim, .. } => Ok((0..*dim as i64).collect()),
            Kind::Laurent => match window {
                Some(k) if k >= 0 => Ok((-k..=k).collect()),
                _ => Err(Error::Model(
                    "Laurent computation requires a nonnegative mode window".into(),
                )),
            },
        }
    }

    pub fn mul_basis(&self, i: i64, j: i64) -> SparseVec {
        match &self.kind {
            Kind::Finite { mul, .. } => mul[i as usize][j as usize].clone(),
            Kind::Laurent => single(i + j),
        }
    }

    pub fn star_basis(&self, i: i64) -> SparseVec {
        match &self.kind {
            Kind::Finite { star, .. } => star[i as usize].clone(),
            Kind::Laurent => single(-i),
        }
    }

    pub fn label(&self, i: i64) -> String {
        match &self.kind {
            Kind::Finite { labels, .. } => labels[i as usize].clone(),
            Kind::Laurent => match i {
                0 => "1".to_string(),
                1 => "u".to_string(),
                _ => format!("u^{i}"),
            },
        }
    }

    pub fn unit(self: &Arc<Self>) -> Element {
        let coeffs = match &self.kind {
            Kind::Finite { unit, .. } => unit.clone(),
            Kind::Laurent => single(0),
        };
        Element {
            algebra: Arc::clone(self),
            coeffs,
        }
    }

    pub fn basis(self: &Arc<Self>, i: i64) -> Element {
        if let Kind::Finite { dim, .. } = &self.kind {
            assert!(
                (0..*dim as i64).contains(&i),
                "basis index {i} out of range for dimension {dim}"
            );
        }
        Element {
            algebra: Arc::clone(self),
            coeffs: single(i),
        }
    }

    pub fn zero(self: &Arc<Self>) -> Element {
        Element {
            algebra: Arc::clone(self),
            coeffs: SparseVec::new(),
        }
    }

    pub fn element(self: &Arc<Self>, coeffs: SparseVec) -> Element {
        let coeffs = coeffs.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Element {
            algebra: Arc::clone(self),
            coeffs,
        }
    }

    pub fn scalar_multiple_of_unit(self: &Arc<Self>, c: &Scalar) -> Element {
        self.unit().scale(c)
    }
}

impl fmt::Debug for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Algebra({:?})", self.spec)
    }
}

#[derive(Clone)]
pub struct Element {
    pub algebra: Arc<Algebra>,
    coeffs: SparseVec,
}

pub fn same_algebra(a: &Arc<Algebra>, b: &Arc<Algebra>) -> bool {
    Arc::ptr_eq(a, b) || a.spec == b.spec
}

impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        same_algebra(&self.algebra, &other.algebra) && self.coeffs == other.coeffs
    }
}

impl Eq for Element {}

impl Element {
    pub fn coeffs(&self) -> &SparseVec {
        &self.coeffs
    }

    pub fn coeff(&self, i: i64) -> Scalar {
        self.coeffs.get(&i).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &Element) -> Element {
        assert!(same_algebra(&self.algebra, &other.algebra), "algebra mismatch");
        let mut out = self.coeffs.clone();
        for (k, c) in &other.coeffs {
            merge_coeff(&mut out, *k, c.clone());
        }
        Element {
            algebra: Arc::clone(&self.algebra),
            coeffs: out,
        }
    }

    pub fn sub(&self, other: &Element) -> Element {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Element {
        Element {
            algebra: Arc::clone(&self.algebra),
            coeffs: self
                .coeffs
                .iter()
                .map(|(k, c)| (*k, -c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> Element {
        if c.is_zero() {
            return Element {
                algebra: Arc::clone(&self.algebra),
                coeffs: SparseVec::new(),
            };
        }
        Element {
            algebra: Arc::clone(&self.algebra),
            coeffs: self.coeffs.iter().map(|(k, v)| (*k, c * v)).collect(),
        }
    }

    pub fn mul(&self, other: &Element) -> Element {
        assert!(same_algebra(&self.algebra, &other.algebra), "algebra mismatch");
        let mut out = SparseVec::new();
        for (i, ca) in &self.coeffs {
            for (j, cb) in &other.coeffs {
                for (k, c) in self.algebra.mul_basis(*i, *j) {
                    merge_coeff(&mut out, k, &(ca * cb) * &c);
                }
            }
        }
        Element {
            algebra: Arc::clone(&self.algebra),
            coeffs: out,
        }
    }

    pub fn star(&self) -> Element {
        let mut out = SparseVec::new();
        for (i, c) in &self.coeffs {
            for (k, s) in self.algebra.star_basis(*i) {
                merge_coeff(&mut out, k, &c.conj() * &s);
            }
        }
        Element {
            algebra: Arc::clone(&self.algebra),
            coeffs: out,
        }
    }

    pub fn commutator(&self, other: &Element) -> Element {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn is_unitary(&self) -> bool {
        let unit = self.algebra.unit();
        let st = self.star();
        self.mul(&st) == unit && st.mul(self) == unit
    }

    pub fn is_hermitian(&self) -> bool {
        self.star() == *self
    }

    pub fn is_anti_hermitian(&self) -> bool {
        self.star() == self.neg()
    }

    pub fn is_central(&self) -> bool {
        if self.algebra.is_commutative() {
            return true;
        }
        let alg = &self.algebra;
        let indices = alg
            .basis_indices(None)
            .expect("non-commutative models are finite");
        indices.iter().all(|&b| {
            let eb = alg.basis(b);
            self.commutator(&eb).is_zero()
        })
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in &self.coeffs {
            let label = self.algebra.label(*k);
            let text = c.to_string();
            let needs_parens = text[1..].contains('+') || text[1..].contains('-');
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if c.is_one() {
                write!(f, "{label}")?;
            } else if needs_parens {
                write!(f, "({text})*{label}")?;
            } else {
                write!(f, "{text}*{label}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Basis of the center, by exact kernel of the commutator operators.
///
/// The Laurent model is commutative, so the windowed basis is returned
/// there and a window is required.
pub fn center_basis(alg: &Arc<Algebra>, window: Option<i64>) -> Result<Vec<Element>> {
    if alg.is_commutative() {
        return Ok(alg
            .basis_indices(window)?
            .into_iter()
            .map(|i| alg.basis(i))
            .collect());
    }
    let dim = alg.dim().expect("non-commutative models are finite");
    let n = dim as i64;
    // rows: one per (probe basis b, output coordinate k); columns: z coords
    let mut rows = Vec::new();
    for b in 0..n {
        let mut block = vec![vec![Scalar::zero(); dim]; dim];
        for j in 0..n {
            let ej = alg.basis(j);
            let com = ej.commutator(&alg.basis(b));
            for (k, c) in com.coeffs() {
                block[*k as usize][j as usize] = c.clone();
            }
        }
        rows.extend(block);
    }
    let m = Mat::from_rows(rows, dim);
    Ok(m.kernel_basis()
        .into_iter()
        .map(|v| {
            alg.element(
                v.into_iter()
                    .enumerate()
                    .map(|(j, c)| (j as i64, c))
                    .collect(),
            )
        })
        .collect())
}

/// Pointwise positivity of a function: every value real and nonnegative.
pub fn is_positive_element(f: &Element) -> Result<bool> {
    if !matches!(f.algebra.spec, ModelSpec::FiniteFunctions { .. }) {
        return Err(Error::Model(
            "pointwise positivity is supported only for function algebras".into(),
        ));
    }
    Ok(f.coeffs()
        .values()
        .all(|c| c.im.is_zero() && !c.re.is_negative()))
}

/// Realize an element of a diagonalizable model as a list of matrices, one
/// block per point/factor: functions give 1x1 blocks, a matrix algebra one
/// full block, products the concatenation. Positivity of the element is
/// exactly blockwise positive semidefiniteness.
pub fn block_matrices(f: &Element) -> Result<Vec<Mat<Scalar>>> {
    fn spec_blocks(spec: &ModelSpec) -> Result<Vec<usize>> {
        match spec {
            ModelSpec::FiniteFunctions { points } => Ok(vec![1; points.len()]),
            ModelSpec::Matrix { size } => Ok(vec![*size as usize]),
            ModelSpec::Product { factors } => {
                let mut out = Vec::new();
                for f in factors {
                    out.extend(spec_blocks(f)?);
                }
                Ok(out)
            }
            _ => Err(Error::Model(
                "blockwise matrix realization needs a diagonalizable model".into(),
            )),
        }
    }
    let sizes = spec_blocks(&f.algebra.spec)?;
    let mut mats: Vec<Mat<Scalar>> = sizes.iter().map(|&s| Mat::zeros(s, s)).collect();
    let mut offsets = Vec::new();
    let mut acc = 0i64;
    for s in &sizes {
        offsets.push(acc);
        acc += (*s * *s) as i64;
    }
    for (idx, c) in f.coeffs() {
        let block = match offsets.binary_search(idx) {
            Ok(b) => b,
            Err(b) => b - 1,
        };
        let local = (idx - offsets[block]) as usize;
        let n = sizes[block];
        *mats[block].at_mut(local / n, local % n) = c.clone();
    }
    Ok(mats)
}

fn factorial(k: u64) -> BigInt {
    (1..=k).map(BigInt::from).product::<BigInt>().max(BigInt::one())
}

/// Exponential of a central nilpotent element, as the finite sum Σ aᵏ/k!.
pub fn exp_central(a: &Element) -> Result<Element> {
    if !a.is_central() {
        return Err(Error::Model("exponential input must be central".into()));
    }
    let bound = match a.algebra.dim() {
        Some(d) => d + 1,
        None => {
            if a.is_zero() {
                1
            } else {
                return Err(Error::Model(
                    "exponential on the circle model needs a symbolic phase; \
                     nonzero elements are never nilpotent there"
                        .into(),
                ));
            }
        }
    };
    let mut sum = a.algebra.unit();
    let mut power = a.algebra.unit();
    for k in 1..=bound as u64 {
        power = power.mul(a);
        if power.is_zero() {
            return Ok(sum);
        }
        let inv_fact = Scalar::from_rat(Rat::new(BigInt::one(), factorial(k)));
        sum = sum.add(&power.scale(&inv_fact));
    }
    Err(Error::Model("exponential input must be nilpotent".into()))
}

fn mod_one(q: &Rat) -> Rat {
    let f = q.floor();
    q - f
}

/// A central unitary with an optional symbolic phase: the value
/// e^{2πi·phase} · body, where the phase is exact data (never evaluated)
/// and the body is an honest algebra element.
#[derive(Clone, PartialEq)]
pub struct CentralUnitary {
    pub phase: Rat,
    pub body: Element,
}

impl CentralUnitary {
    pub fn new(phase: Rat, body: Element) -> Result<Self> {
        if !body.is_central() {
            return Err(Error::Model("unitary body must be central".into()));
        }
        if !body.is_unitary() {
            return Err(Error::Model(format!("element {body} is not unitary")));
        }
        Ok(CentralUnitary {
            phase: mod_one(&phase),
            body,
        })
    }

    pub fn from_element(body: Element) -> Result<Self> {
        CentralUnitary::new(Rat::zero(), body)
    }

    pub fn one(alg: &Arc<Algebra>) -> Self {
        CentralUnitary {
            phase: Rat::zero(),
            body: alg.unit(),
        }
    }

    pub fn mul(&self, other: &CentralUnitary) -> CentralUnitary {
        CentralUnitary {
            phase: mod_one(&(&self.phase + &other.phase)),
            body: self.body.mul(&other.body),
        }
    }

    pub fn inverse(&self) -> CentralUnitary {
        CentralUnitary {
            phase: mod_one(&-self.phase.clone()),
            body: self.body.star(),
        }
    }
}

impl fmt::Display for CentralUnitary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.phase.is_zero() {
            write!(f, "{}", self.body)
        } else {
            write!(f, "e^(2*pi*i*{})*({})", self.phase, self.body)
        }
    }
}

impl fmt::Debug for CentralUnitary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// exp(2πi·q + a) for central nilpotent a, split as phase times unipotent.
pub fn exp_central_phased(q: &Rat, a: &Element) -> Result<CentralUnitary> {
    let body = exp_central(a)?;
    CentralUnitary::new(q.clone(), body)
}

/// A linear unital map between finite models given by basis images,
/// with verification that it is a *-isomorphism.
#[derive(Clone, Debug)]
pub struct AlgebraMap {
    pub domain: Arc<Algebra>,
    pub codomain: Arc<Algebra>,
    pub images: Vec<Element>,
}

impl AlgebraMap {
    pub fn new(
        domain: Arc<Algebra>,
        codomain: Arc<Algebra>,
        images: Vec<Element>,
    ) -> Result<Self> {
        let dim = domain
            .dim()
            .ok_or_else(|| Error::Model("algebra map domain must be finite".into()))?;
        if images.len() != dim {
            return Err(Error::Model(format!(
                "algebra map needs {dim} basis images, got {}",
                images.len()
            )));
        }
        Ok(AlgebraMap {
            domain,
            codomain,
            images,
        })
    }

    pub fn apply(&self, a: &Element) -> Element {
        let mut out = self.codomain.zero();
        for (i, c) in a.coeffs() {
            out = out.add(&self.images[*i as usize].scale(c));
        }
        out
    }

    /// Failure messages for multiplicativity, unitality, *-compatibility,
    /// and bijectivity; empty means verified *-isomorphism.
    pub fn isomorphism_failures(&self) -> Vec<String> {
        let mut failures = Vec::new();
        let dim = self.domain.dim().unwrap();
        if self.apply(&self.domain.unit()) != self.codomain.unit() {
            failures.push("unit is not preserved".to_string());
        }
        for i in 0..dim as i64 {
            let ei = self.domain.basis(i);
            for j in 0..dim as i64 {
                let ej = self.domain.basis(j);
                if self.apply(&ei.mul(&ej)) != self.apply(&ei).mul(&self.apply(&ej)) {
                    failures.push(format!(
                        "multiplicativity fails on ({}, {})",
                        self.domain.label(i),
                        self.domain.label(j)
                    ));
                }
            }
            if self.apply(&ei.star()) != self.apply(&ei).star() {
                failures.push(format!("involution fails on {}", self.domain.label(i)));
            }
        }
        match self.codomain.dim() {
            Some(cd) if cd == dim => {
                let mut rows = Vec::new();
                for img in &self.images {
                    let mut row = vec![Scalar::zero(); cd];
                    for (k, c) in img.coeffs() {
                        row[*k as usize] = c.clone();
                    }
                    rows.push(row);
                }
                if Mat::from_rows(rows, cd).rank() != dim {
                    failures.push("map is not bijective".to_string());
                }
            }
            _ => failures.push("domain and codomain dimensions differ".to_string()),
        }
        failures
    }

    pub fn compose(&self, inner: &AlgebraMap) -> Result<AlgebraMap> {
        if !same_algebra(&self.domain, &inner.codomain) {
            return Err(Error::Model("algebra map composition mismatch".into()));
        }
        let images = inner.images.iter().map(|e| self.apply(e)).collect();
        AlgebraMap::new(Arc::clone(&inner.domain), Arc::clone(&self.codomain), images)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(t: &str) -> Scalar {
        t.parse().unwrap()
    }

    fn fun(points: &[&str]) -> Arc<Algebra> {
        Algebra::build(ModelSpec::FiniteFunctions {
            points: points.iter().map(|p| p.to_string()).collect(),
        })
        .unwrap()
    }

    fn poly(n: u32) -> Arc<Algebra> {
        Algebra::build(ModelSpec::TruncatedPoly { order: n }).unwrap()
    }

    fn mat(n: u32) -> Arc<Algebra> {
        Algebra::build(ModelSpec::Matrix { size: n }).unwrap()
    }

    fn laurent() -> Arc<Algebra> {
        Algebra::build(ModelSpec::Laurent).unwrap()
    }

    #[test]
    fn construction_rejects_bad_parameters() {
        assert!(Algebra::build(ModelSpec::FiniteFunctions { points: vec![] }).is_err());
        assert!(Algebra::build(ModelSpec::TruncatedPoly { order: 0 }).is_err());
        assert!(Algebra::build(ModelSpec::Matrix { size: 0 }).is_err());
        assert!(Algebra::build(ModelSpec::Product {
            factors: vec![ModelSpec::Laurent]
        })
        .is_err());
    }

    #[test]
    fn idempotents_sum_to_unit() {
        let a = fun(&["p", "q"]);
        let sum = a.basis(0).add(&a.basis(1));
        assert_eq!(sum, a.unit());
        assert_eq!(a.basis(0).mul(&a.basis(1)), a.zero());
        assert_eq!(a.basis(0).mul(&a.basis(0)), a.basis(0));
    }

    #[test]
    fn truncation_kills_high_powers() {
        let a = poly(3);
        let x = a.basis(1);
        let x2 = a.basis(2);
        assert_eq!(x.mul(&x), x2);
        assert!(x.mul(&x2).is_zero());
    }

    #[test]
    fn laurent_unit_and_star() {
        let a = laurent();
        let u = a.basis(1);
        let uinv = a.basis(-1);
        assert_eq!(u.mul(&uinv), a.unit());
        assert_eq!(u.star(), uinv);
        assert!(u.is_unitary());
    }

    #[test]
    fn matrix_units_multiply() {
        let a = mat(2);
        let e12 = a.basis(1);
        let e21 = a.basis(2);
        let e11 = a.basis(0);
        let e22 = a.basis(3);
        assert_eq!(e12.mul(&e21), e11);
        assert_eq!(e21.mul(&e12), e22);
        assert!(e12.mul(&e12).is_zero());
        assert_eq!(e12.star(), e21);
        assert!(!a.is_commutative());
    }

    #[test]
    fn centers_of_models() {
        let m2 = mat(2);
        let c = center_basis(&m2, None).unwrap();
        assert_eq!(c.len(), 1);
        assert!(c[0].is_central());
        // the center of M_2 is spanned by the identity
        let lambda = c[0].coeff(0);
        assert_eq!(c[0], m2.unit().scale(&lambda));

        let p = poly(4);
        assert_eq!(center_basis(&p, None).unwrap().len(), 4);

        let prod = Algebra::build(ModelSpec::Product {
            factors: vec![
                ModelSpec::FiniteFunctions {
                    points: vec!["p".into()],
                },
                ModelSpec::Matrix { size: 2 },
            ],
        })
        .unwrap();
        assert_eq!(center_basis(&prod, None).unwrap().len(), 2);
    }

    #[test]
    fn unitarity_and_hermiticity_predicates() {
        let p = poly(2);
        let one_plus_x = p.unit().add(&p.basis(1));
        assert!(!one_plus_x.is_unitary());
        let i_unit = p.unit().scale(&s("i"));
        assert!(i_unit.is_anti_hermitian());
        assert!(i_unit.is_unitary());
        assert!(p.basis(1).is_hermitian());
    }

    #[test]
    fn positivity_matches_functional_scan() {
        let a = fun(&["p", "q", "r"]);
        let samples = vec![
            a.element([(0, s("2")), (1, s("3"))].into()),
            a.element([(0, s("1")), (1, s("-1"))].into()),
            a.element([(0, s("i"))].into()),
            a.zero(),
            a.unit(),
            a.element([(2, s("1/7"))].into()),
        ];
        for f in samples {
            let direct = is_positive_element(&f).unwrap();
            // every positive functional w ↦ Σ w_x f(x) with 0/1 weights must
            // give a nonnegative real
            let mut scan = true;
            for mask in 0u8..8 {
                let mut v = Scalar::zero();
                for x in 0..3 {
                    if mask & (1 << x) != 0 {
                        v += f.coeff(x as i64);
                    }
                }
                if !v.im.is_zero() || v.re.is_negative() {
                    scan = false;
                }
            }
            assert_eq!(direct, scan, "disagreement on {f}");
        }
    }

    #[test]
    fn exp_of_nilpotents() {
        let p = poly(3);
        let x = p.basis(1);
        let e = exp_central(&x).unwrap();
        let expected = p
            .unit()
            .add(&x)
            .add(&p.basis(2).scale(&s("1/2")));
        assert_eq!(e, expected);
        assert_eq!(exp_central(&p.zero()).unwrap(), p.unit());
        // the unit itself is not nilpotent
        assert!(exp_central(&p.unit()).is_err());
        // additivity on commuting nilpotents
        let p4 = poly(4);
        let a = p4.basis(1).scale(&s("i"));
        let b = p4.basis(2).scale(&s("2*i"));
        let lhs = exp_central(&a.add(&b)).unwrap();
        let rhs = exp_central(&a).unwrap().mul(&exp_central(&b).unwrap());
        assert_eq!(lhs, rhs);
        // star compatibility: exp(a)* = exp(a*)
        assert_eq!(
            exp_central(&a).unwrap().star(),
            exp_central(&a.star()).unwrap()
        );
    }

    #[test]
    fn exp_on_circle_model_needs_phases() {
        let l = laurent();
        let a = l.basis(1).sub(&l.basis(-1)).scale(&s("i"));
        assert!(exp_central(&a).is_err());
        let phased = exp_central_phased(&Rat::new(1.into(), 3.into()), &l.zero()).unwrap();
        assert_eq!(phased.body, l.unit());
        assert_eq!(phased.phase, Rat::new(1.into(), 3.into()));
        let cube = phased.mul(&phased).mul(&phased);
        assert_eq!(cube, CentralUnitary::one(&l));
    }

    #[test]
    fn central_unitary_group_structure() {
        let l = laurent();
        let u = CentralUnitary::from_element(l.basis(1)).unwrap();
        let prod = u.mul(&u.inverse());
        assert_eq!(prod, CentralUnitary::one(&l));
        assert!(CentralUnitary::from_element(l.basis(1).add(&l.basis(0))).is_err());
    }

    #[test]
    fn block_realization_of_products() {
        let prod = Algebra::build(ModelSpec::Product {
            factors: vec![
                ModelSpec::FiniteFunctions {
                    points: vec!["p".into(), "q".into()],
                },
                ModelSpec::Matrix { size: 2 },
            ],
        })
        .unwrap();
        let e = prod.element([(0, s("3")), (2, s("1")), (3, s("i"))].into());
        let mats = block_matrices(&e).unwrap();
        assert_eq!(mats.len(), 3);
        assert_eq!(*mats[0].at(0, 0), s("3"));
        assert_eq!(*mats[1].at(0, 0), s("0"));
        assert_eq!(*mats[2].at(0, 0), s("1"));
        assert_eq!(*mats[2].at(0, 1), s("i"));
        assert!(block_matrices(&laurent().unit()).is_err());
    }

    #[test]
    fn algebra_map_flip_is_isomorphism() {
        let a = fun(&["p", "q"]);
        let flip = AlgebraMap::new(
            Arc::clone(&a),
            Arc::clone(&a),
            vec![a.basis(1), a.basis(0)],
        )
        .unwrap();
        assert!(flip.isomorphism_failures().is_empty());
        let broken = AlgebraMap::new(
            Arc::clone(&a),
            Arc::clone(&a),
            vec![a.basis(0), a.basis(0)],
        )
        .unwrap();
        assert!(!broken.isomorphism_failures().is_empty());
    }
}
