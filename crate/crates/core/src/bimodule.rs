//! Equivalence bimodules between model *-algebras.
//!
//! A bimodule is either an algebra over itself (works for every model,
//! including the circle with a mode window) or a finite-basis module with
//! explicit action tables. Inner-product pairs carry two sesquilinear
//! products: the right-algebra-valued one is conjugate-linear in the left
//! slot, the left-algebra-valued one in the right slot. On top of that
//! live the seven-axiom equivalence check, exact complete positivity,
//! balanced tensor products with the induced pairings, an isomorphism
//! decision, and compatibility checks for Hopf actions on the module.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use itertools::Itertools;

use crate::algebra::{same_algebra, Algebra, Element, ModelSpec, SparseVec};
use crate::hopf::{coproduct_key, same_hopf, HAction, HElem, HKey, Hopf};
use crate::lie::Operator;
use crate::linalg::{hermitian_is_psd, is_hermitian, Mat, Quotient, Subspace};
use crate::scalar::Scalar;
use crate::{Error, Result};

/// A finite-basis bimodule given by action tables.
pub struct TableModule {
    pub left_algebra: Arc<Algebra>,
    pub right_algebra: Arc<Algebra>,
    pub labels: Vec<String>,
    /// left[b][m]: image of module basis m under the left algebra basis b
    left: Vec<Vec<SparseVec>>,
    /// right[m][a]: image of module basis m under the right algebra basis a
    right: Vec<Vec<SparseVec>>,
}

/// A bimodule between two model algebras.
pub enum Bimodule {
    /// The algebra as a module over itself by two-sided multiplication.
    SelfMod { algebra: Arc<Algebra> },
    Table(TableModule),
}

impl Bimodule {
    pub fn canonical(algebra: &Arc<Algebra>) -> Arc<Bimodule> {
        Arc::new(Bimodule::SelfMod {
            algebra: Arc::clone(algebra),
        })
    }

    /// Build and validate a table module: units act as the identity, both
    /// actions are associative, and they commute with each other.
    pub fn table(
        left_algebra: &Arc<Algebra>,
        right_algebra: &Arc<Algebra>,
        labels: Vec<String>,
        left: Vec<Vec<SparseVec>>,
        right: Vec<Vec<SparseVec>>,
    ) -> Result<Arc<Bimodule>> {
        let (Some(db), Some(da)) = (left_algebra.dim(), right_algebra.dim()) else {
            return Err(Error::Model(
                "table modules need finite-dimensional algebras on both sides".into(),
            ));
        };
        let m = labels.len();
        if left.len() != db || left.iter().any(|r| r.len() != m) {
            return Err(Error::Model(format!(
                "left action table must be {db} x {m}"
            )));
        }
        if right.len() != m || right.iter().any(|r| r.len() != da) {
            return Err(Error::Model(format!(
                "right action table must be {m} x {da}"
            )));
        }
        let module = Arc::new(Bimodule::Table(TableModule {
            left_algebra: Arc::clone(left_algebra),
            right_algebra: Arc::clone(right_algebra),
            labels,
            left,
            right,
        }));
        for k in 0..m {
            let e = ModElem::basis(&module, k as i64);
            if e.left(&left_algebra.unit()) != e {
                return Err(Error::Model(format!(
                    "left unit does not fix module basis {}",
                    module.label(k as i64)
                )));
            }
            if e.right(&right_algebra.unit()) != e {
                return Err(Error::Model(format!(
                    "right unit does not fix module basis {}",
                    module.label(k as i64)
                )));
            }
            for b1 in 0..db as i64 {
                for b2 in 0..db as i64 {
                    let prod = left_algebra.basis(b1).mul(&left_algebra.basis(b2));
                    if e.left(&left_algebra.basis(b2)).left(&left_algebra.basis(b1))
                        != e.left(&prod)
                    {
                        return Err(Error::Model(format!(
                            "left action is not associative on ({b1},{b2}) at {}",
                            module.label(k as i64)
                        )));
                    }
                }
            }
            for a1 in 0..da as i64 {
                for a2 in 0..da as i64 {
                    let prod = right_algebra.basis(a1).mul(&right_algebra.basis(a2));
                    if e.right(&right_algebra.basis(a1)).right(&right_algebra.basis(a2))
                        != e.right(&prod)
                    {
                        return Err(Error::Model(format!(
                            "right action is not associative on ({a1},{a2}) at {}",
                            module.label(k as i64)
                        )));
                    }
                }
            }
            for b in 0..db as i64 {
                for a in 0..da as i64 {
                    let lb = left_algebra.basis(b);
                    let ra = right_algebra.basis(a);
                    if e.left(&lb).right(&ra) != e.right(&ra).left(&lb) {
                        return Err(Error::Model(format!(
                            "actions do not commute on (b{b},a{a}) at {}",
                            module.label(k as i64)
                        )));
                    }
                }
            }
        }
        Ok(module)
    }

    pub fn left_algebra(&self) -> &Arc<Algebra> {
        match self {
            Bimodule::SelfMod { algebra } => algebra,
            Bimodule::Table(t) => &t.left_algebra,
        }
    }

    pub fn right_algebra(&self) -> &Arc<Algebra> {
        match self {
            Bimodule::SelfMod { algebra } => algebra,
            Bimodule::Table(t) => &t.right_algebra,
        }
    }

    pub fn is_self(&self) -> bool {
        matches!(self, Bimodule::SelfMod { .. })
    }

    pub fn dim(&self) -> Option<usize> {
        match self {
            Bimodule::SelfMod { algebra } => algebra.dim(),
            Bimodule::Table(t) => Some(t.labels.len()),
        }
    }

    pub fn basis_indices(&self, window: Option<i64>) -> Result<Vec<i64>> {
        match self {
            Bimodule::SelfMod { algebra } => algebra.basis_indices(window),
            Bimodule::Table(t) => Ok((0..t.labels.len() as i64).collect()),
        }
    }

    pub fn label(&self, i: i64) -> String {
        match self {
            Bimodule::SelfMod { algebra } => algebra.label(i),
            Bimodule::Table(t) => t.labels[i as usize].clone(),
        }
    }

    fn left_mul_basis(&self, b: i64, m: i64) -> SparseVec {
        match self {
            Bimodule::SelfMod { algebra } => algebra.mul_basis(b, m),
            Bimodule::Table(t) => t.left[b as usize][m as usize].clone(),
        }
    }

    fn right_mul_basis(&self, m: i64, a: i64) -> SparseVec {
        match self {
            Bimodule::SelfMod { algebra } => algebra.mul_basis(m, a),
            Bimodule::Table(t) => t.right[m as usize][a as usize].clone(),
        }
    }
}

pub fn same_module(a: &Arc<Bimodule>, b: &Arc<Bimodule>) -> bool {
    Arc::ptr_eq(a, b)
}

fn merge(out: &mut SparseVec, k: i64, add: Scalar) {
    use std::collections::btree_map::Entry;
    if add.is_zero() {
        return;
    }
    match out.entry(k) {
        Entry::Vacant(e) => {
            e.insert(add);
        }
        Entry::Occupied(mut e) => {
            *e.get_mut() += add;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

/// A module element as a sparse coordinate vector over the module basis.
#[derive(Clone)]
pub struct ModElem {
    pub module: Arc<Bimodule>,
    coords: SparseVec,
}

impl PartialEq for ModElem {
    fn eq(&self, other: &Self) -> bool {
        self.coords == other.coords
    }
}

impl Eq for ModElem {}

impl ModElem {
    pub fn zero(module: &Arc<Bimodule>) -> Self {
        ModElem {
            module: Arc::clone(module),
            coords: SparseVec::new(),
        }
    }

    pub fn basis(module: &Arc<Bimodule>, i: i64) -> Self {
        let mut coords = SparseVec::new();
        coords.insert(i, Scalar::one());
        ModElem {
            module: Arc::clone(module),
            coords,
        }
    }

    pub fn from_coords(module: &Arc<Bimodule>, coords: SparseVec) -> Self {
        ModElem {
            module: Arc::clone(module),
            coords: coords.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    /// View an algebra element as an element of the self-bimodule.
    pub fn from_element(module: &Arc<Bimodule>, a: &Element) -> Result<Self> {
        if !module.is_self() || !same_algebra(&a.algebra, module.left_algebra()) {
            return Err(Error::Model(
                "element embedding needs the matching self-bimodule".into(),
            ));
        }
        Ok(ModElem {
            module: Arc::clone(module),
            coords: a.coeffs().clone(),
        })
    }

    pub fn to_element(&self) -> Result<Element> {
        if !self.module.is_self() {
            return Err(Error::Model(
                "only self-bimodule elements convert back to the algebra".into(),
            ));
        }
        Ok(self.module.left_algebra().element(self.coords.clone()))
    }

    pub fn coords(&self) -> &SparseVec {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn add(&self, other: &ModElem) -> ModElem {
        let mut out = self.coords.clone();
        for (k, c) in &other.coords {
            merge(&mut out, *k, c.clone());
        }
        ModElem {
            module: Arc::clone(&self.module),
            coords: out,
        }
    }

    pub fn sub(&self, other: &ModElem) -> ModElem {
        self.add(&other.scale(&-Scalar::one()))
    }

    pub fn scale(&self, c: &Scalar) -> ModElem {
        if c.is_zero() {
            return ModElem::zero(&self.module);
        }
        ModElem {
            module: Arc::clone(&self.module),
            coords: self.coords.iter().map(|(k, v)| (*k, c * v)).collect(),
        }
    }

    pub fn left(&self, b: &Element) -> ModElem {
        assert!(
            same_algebra(&b.algebra, self.module.left_algebra()),
            "left algebra mismatch"
        );
        let mut out = SparseVec::new();
        for (i, cb) in b.coeffs() {
            for (m, cm) in &self.coords {
                for (k, c) in self.module.left_mul_basis(*i, *m) {
                    merge(&mut out, k, &(cb * cm) * &c);
                }
            }
        }
        ModElem {
            module: Arc::clone(&self.module),
            coords: out,
        }
    }

    pub fn right(&self, a: &Element) -> ModElem {
        assert!(
            same_algebra(&a.algebra, self.module.right_algebra()),
            "right algebra mismatch"
        );
        let mut out = SparseVec::new();
        for (m, cm) in &self.coords {
            for (j, ca) in a.coeffs() {
                for (k, c) in self.module.right_mul_basis(*m, *j) {
                    merge(&mut out, k, &(cm * ca) * &c);
                }
            }
        }
        ModElem {
            module: Arc::clone(&self.module),
            coords: out,
        }
    }
}

impl fmt::Display for ModElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coords.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in &self.coords {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if c.is_one() {
                write!(f, "{}", self.module.label(*k))?;
            } else {
                write!(f, "({c})*{}", self.module.label(*k))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for ModElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A verified *-isomorphism between two finite models, stored by images of
/// the source basis.
#[derive(Clone)]
pub struct AlgebraMap {
    pub source: Arc<Algebra>,
    pub target: Arc<Algebra>,
    images: Vec<Element>,
}

impl AlgebraMap {
    pub fn new(
        source: &Arc<Algebra>,
        target: &Arc<Algebra>,
        images: Vec<Element>,
    ) -> Result<Self> {
        let (Some(ds), Some(dt)) = (source.dim(), target.dim()) else {
            return Err(Error::Model("algebra maps need finite models".into()));
        };
        if images.len() != ds {
            return Err(Error::Model(format!(
                "map needs {ds} images, got {}",
                images.len()
            )));
        }
        for v in &images {
            if !same_algebra(&v.algebra, target) {
                return Err(Error::Model("image lies in the wrong algebra".into()));
            }
        }
        let map = AlgebraMap {
            source: Arc::clone(source),
            target: Arc::clone(target),
            images,
        };
        if map.apply(&source.unit()) != target.unit() {
            return Err(Error::Model("map does not preserve the unit".into()));
        }
        for i in 0..ds as i64 {
            let ei = source.basis(i);
            if map.apply(&ei.star()) != map.apply(&ei).star() {
                return Err(Error::Model(format!(
                    "map does not intertwine the involutions on {}",
                    source.label(i)
                )));
            }
            for j in 0..ds as i64 {
                let ej = source.basis(j);
                if map.apply(&ei.mul(&ej)) != map.apply(&ei).mul(&map.apply(&ej)) {
                    return Err(Error::Model(format!(
                        "map is not multiplicative on ({}, {})",
                        source.label(i),
                        source.label(j)
                    )));
                }
            }
        }
        let rows: Vec<Vec<Scalar>> = (0..ds)
            .map(|i| {
                (0..dt as i64)
                    .map(|j| map.images[i].coeff(j))
                    .collect()
            })
            .collect();
        if ds != dt || Mat::from_rows(rows, dt).rank() != ds {
            return Err(Error::Model("map is not bijective".into()));
        }
        Ok(map)
    }

    pub fn identity(a: &Arc<Algebra>) -> Result<Self> {
        let d = a
            .dim()
            .ok_or_else(|| Error::Model("algebra maps need finite models".into()))?;
        AlgebraMap::new(a, a, (0..d as i64).map(|i| a.basis(i)).collect())
    }

    /// The point-relabeling automorphism of a function algebra.
    pub fn permutation(a: &Arc<Algebra>, perm: &[usize]) -> Result<Self> {
        let ModelSpec::FiniteFunctions { points } = &a.spec else {
            return Err(Error::Model(
                "permutation maps are for function algebras".into(),
            ));
        };
        let n = points.len();
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || seen[p] {
                return Err(Error::Model(format!("not a permutation of {n} points")));
            }
            seen[p] = true;
        }
        if perm.len() != n {
            return Err(Error::Model(format!("not a permutation of {n} points")));
        }
        AlgebraMap::new(a, a, perm.iter().map(|&p| a.basis(p as i64)).collect())
    }

    pub fn apply(&self, a: &Element) -> Element {
        assert!(same_algebra(&a.algebra, &self.source), "algebra mismatch");
        let mut out = self.target.zero();
        for (i, c) in a.coeffs() {
            out = out.add(&self.images[*i as usize].scale(c));
        }
        out
    }

    /// self after other.
    pub fn compose(&self, other: &AlgebraMap) -> Result<AlgebraMap> {
        if !same_algebra(&other.target, &self.source) {
            return Err(Error::Model("composition algebras do not line up".into()));
        }
        AlgebraMap::new(
            &other.source,
            &self.target,
            other.images.iter().map(|v| self.apply(v)).collect(),
        )
    }

    pub fn inverse(&self) -> Result<AlgebraMap> {
        let d = self.source.dim().expect("verified maps are finite");
        let cols: Vec<Vec<Scalar>> = (0..d)
            .map(|i| {
                (0..d as i64)
                    .map(|j| self.images[i].coeff(j))
                    .collect()
            })
            .collect();
        let mat = Mat::from_rows(cols, d).transpose();
        let mut images = Vec::new();
        for j in 0..d as i64 {
            let target: Vec<Scalar> = (0..d as i64)
                .map(|k| if k == j { Scalar::one() } else { Scalar::zero() })
                .collect();
            let sol = mat
                .solve(&target)
                .ok_or_else(|| Error::Internal("verified map failed to invert".into()))?;
            images.push(
                self.source
                    .element(sol.into_iter().enumerate().map(|(k, c)| (k as i64, c)).collect()),
            );
        }
        AlgebraMap::new(&self.target, &self.source, images)
    }
}

/// The module realizing an isomorphism: the target algebra with the right
/// action pulled back through the map.
pub fn ell(phi: &AlgebraMap) -> Result<Arc<Bimodule>> {
    let b = &phi.target;
    let a = &phi.source;
    let db = b.dim().expect("verified maps are finite");
    let da = a.dim().expect("verified maps are finite");
    let left = (0..db as i64)
        .map(|i| (0..db as i64).map(|m| b.mul_basis(i, m)).collect())
        .collect();
    let right = (0..db as i64)
        .map(|m| {
            (0..da as i64)
                .map(|j| b.basis(m).mul(&phi.apply(&a.basis(j))).coeffs().clone())
                .collect()
        })
        .collect();
    Bimodule::table(
        b,
        a,
        (0..db as i64).map(|i| b.label(i)).collect(),
        left,
        right,
    )
}

/// The two inner products of an equivalence bimodule. The right-valued
/// product is conjugate-linear in its left slot; the left-valued product
/// is conjugate-linear in its right slot.
#[derive(Clone)]
pub struct InnerPair {
    pub module: Arc<Bimodule>,
    kind: PairKind,
}

#[derive(Clone)]
enum PairKind {
    /// x*y and xy* on a self-bimodule.
    Canonical,
    /// Dense tables over basis pairs of a finite module.
    Tables {
        right_values: Vec<Vec<Element>>,
        left_values: Vec<Vec<Element>>,
    },
}

impl PartialEq for InnerPair {
    fn eq(&self, other: &Self) -> bool {
        if !same_module(&self.module, &other.module) {
            return false;
        }
        match (&self.kind, &other.kind) {
            (PairKind::Canonical, PairKind::Canonical) => true,
            (
                PairKind::Tables {
                    right_values: r1,
                    left_values: l1,
                },
                PairKind::Tables {
                    right_values: r2,
                    left_values: l2,
                },
            ) => r1 == r2 && l1 == l2,
            _ => false,
        }
    }
}

impl InnerPair {
    pub fn canonical(module: &Arc<Bimodule>) -> Result<Self> {
        if !module.is_self() {
            return Err(Error::Model(
                "canonical products live on a self-bimodule".into(),
            ));
        }
        Ok(InnerPair {
            module: Arc::clone(module),
            kind: PairKind::Canonical,
        })
    }

    pub fn from_tables(
        module: &Arc<Bimodule>,
        right_values: Vec<Vec<Element>>,
        left_values: Vec<Vec<Element>>,
    ) -> Result<Self> {
        let m = module
            .dim()
            .ok_or_else(|| Error::Model("pairing tables need a finite module basis".into()))?;
        let square = |t: &Vec<Vec<Element>>| t.len() == m && t.iter().all(|r| r.len() == m);
        if !square(&right_values) || !square(&left_values) {
            return Err(Error::Model(format!("pairing tables must be {m} x {m}")));
        }
        for v in right_values.iter().flatten() {
            if !same_algebra(&v.algebra, module.right_algebra()) {
                return Err(Error::Model(
                    "right-valued table entry lies in the wrong algebra".into(),
                ));
            }
        }
        for v in left_values.iter().flatten() {
            if !same_algebra(&v.algebra, module.left_algebra()) {
                return Err(Error::Model(
                    "left-valued table entry lies in the wrong algebra".into(),
                ));
            }
        }
        Ok(InnerPair {
            module: Arc::clone(module),
            kind: PairKind::Tables {
                right_values,
                left_values,
            },
        })
    }

    /// Evaluate the pairing tables of any pair on a finite module basis.
    pub fn tables(&self) -> Result<(Vec<Vec<Element>>, Vec<Vec<Element>>)> {
        let m = self
            .module
            .dim()
            .ok_or_else(|| Error::Model("pairing tables need a finite module basis".into()))?;
        let basis: Vec<ModElem> = (0..m as i64)
            .map(|i| ModElem::basis(&self.module, i))
            .collect();
        let right = basis
            .iter()
            .map(|x| basis.iter().map(|y| self.right_valued(x, y)).collect())
            .collect();
        let left = basis
            .iter()
            .map(|x| basis.iter().map(|y| self.left_valued(x, y)).collect())
            .collect();
        Ok((right, left))
    }

    /// The right-algebra-valued product, conjugate-linear in `x`.
    pub fn right_valued(&self, x: &ModElem, y: &ModElem) -> Element {
        match &self.kind {
            PairKind::Canonical => {
                let xe = x.to_element().expect("canonical pair on self-bimodule");
                let ye = y.to_element().expect("canonical pair on self-bimodule");
                xe.star().mul(&ye)
            }
            PairKind::Tables { right_values, .. } => {
                let mut out = self.module.right_algebra().zero();
                for (i, ci) in x.coords() {
                    for (j, cj) in y.coords() {
                        let c = &ci.conj() * cj;
                        out = out.add(&right_values[*i as usize][*j as usize].scale(&c));
                    }
                }
                out
            }
        }
    }

    /// The left-algebra-valued product, conjugate-linear in `y`.
    pub fn left_valued(&self, x: &ModElem, y: &ModElem) -> Element {
        match &self.kind {
            PairKind::Canonical => {
                let xe = x.to_element().expect("canonical pair on self-bimodule");
                let ye = y.to_element().expect("canonical pair on self-bimodule");
                xe.mul(&ye.star())
            }
            PairKind::Tables { left_values, .. } => {
                let mut out = self.module.left_algebra().zero();
                for (i, ci) in x.coords() {
                    for (j, cj) in y.coords() {
                        let c = ci * &cj.conj();
                        out = out.add(&left_values[*i as usize][*j as usize].scale(&c));
                    }
                }
                out
            }
        }
    }
}

/// The column module: n-tuples over a function algebra as a module between
/// the matrix amplification (one matrix block per point) and the algebra,
/// with the standard products sum_i x_i* y_i and (x_i y_j*)_ij.
pub fn column_module(a: &Arc<Algebra>, n: u32) -> Result<(Arc<Bimodule>, InnerPair)> {
    let ModelSpec::FiniteFunctions { points } = &a.spec else {
        return Err(Error::Model(
            "column modules are built over function algebras".into(),
        ));
    };
    if n == 0 {
        return Err(Error::Model("column module needs at least one row".into()));
    }
    let np = points.len();
    let n = n as usize;
    let b = Algebra::build(ModelSpec::Product {
        factors: vec![ModelSpec::Matrix { size: n as u32 }; np],
    })?;
    // module basis (i, x) -> i*np + x; matrix units at point x sit at
    // offset x*n^2 in the amplification
    let midx = |i: usize, x: usize| (i * np + x) as i64;
    let bidx = |x: usize, i: usize, j: usize| (x * n * n + i * n + j) as i64;
    let m = n * np;
    let mut left = vec![vec![SparseVec::new(); m]; n * n * np];
    for x in 0..np {
        for k in 0..n {
            for l in 0..n {
                for i in 0..n {
                    for y in 0..np {
                        if l == i && x == y {
                            left[bidx(x, k, l) as usize][midx(i, y) as usize] =
                                [(midx(k, x), Scalar::one())].into_iter().collect();
                        }
                    }
                }
            }
        }
    }
    let mut right = vec![vec![SparseVec::new(); np]; m];
    for i in 0..n {
        for x in 0..np {
            right[midx(i, x) as usize][x] = [(midx(i, x), Scalar::one())].into_iter().collect();
        }
    }
    let labels = (0..n)
        .flat_map(|i| points.iter().map(move |p| format!("e{}_{p}", i + 1)))
        .collect();
    let module = Bimodule::table(&b, a, labels, left, right)?;
    let mut right_values = vec![vec![a.zero(); m]; m];
    let mut left_values = vec![vec![b.zero(); m]; m];
    for i in 0..n {
        for x in 0..np {
            for j in 0..n {
                for y in 0..np {
                    if i == j && x == y {
                        right_values[midx(i, x) as usize][midx(j, y) as usize] =
                            a.basis(x as i64);
                    }
                    if x == y {
                        left_values[midx(i, x) as usize][midx(j, y) as usize] =
                            b.basis(bidx(x, i, j));
                    }
                }
            }
        }
    }
    let pair = InnerPair::from_tables(&module, right_values, left_values)?;
    Ok((module, pair))
}

/// The pairing on a module built by `ell`: the right-valued product pulls
/// x*y back through the inverse map, the left-valued one is xy*.
pub fn ell_pair(phi: &AlgebraMap) -> Result<(Arc<Bimodule>, InnerPair)> {
    let module = ell(phi)?;
    let inv = phi.inverse()?;
    let b = &phi.target;
    let db = b.dim().expect("verified maps are finite");
    let mut right_values = vec![vec![phi.source.zero(); db]; db];
    let mut left_values = vec![vec![b.zero(); db]; db];
    for i in 0..db as i64 {
        for j in 0..db as i64 {
            right_values[i as usize][j as usize] = inv.apply(&b.basis(i).star().mul(&b.basis(j)));
            left_values[i as usize][j as usize] = b.basis(i).mul(&b.basis(j).star());
        }
    }
    let pair = InnerPair::from_tables(&module, right_values, left_values)?;
    Ok((module, pair))
}

/// The conjugate module: same underlying space with the algebras swapped
/// through the involutions, and the two products exchanged.
pub fn conjugate_module(pair: &InnerPair) -> Result<(Arc<Bimodule>, InnerPair)> {
    let module = &pair.module;
    let m = module
        .dim()
        .ok_or_else(|| Error::Model("conjugation needs a finite module basis".into()))?;
    let b = module.left_algebra();
    let a = module.right_algebra();
    let (da, db) = (a.dim().unwrap(), b.dim().unwrap());
    let conj_coords = |x: &ModElem| -> SparseVec {
        x.coords().iter().map(|(k, c)| (*k, c.conj())).collect()
    };
    let basis: Vec<ModElem> = (0..m as i64).map(|i| ModElem::basis(module, i)).collect();
    let left = (0..da as i64)
        .map(|ai| {
            basis
                .iter()
                .map(|x| conj_coords(&x.right(&a.basis(ai).star())))
                .collect()
        })
        .collect();
    let right = basis
        .iter()
        .map(|x| {
            (0..db as i64)
                .map(|bi| conj_coords(&x.left(&b.basis(bi).star())))
                .collect()
        })
        .collect();
    let labels = (0..m as i64).map(|i| format!("conj({})", module.label(i))).collect();
    let conj = Bimodule::table(a, b, labels, left, right)?;
    let mut right_values = vec![vec![b.zero(); m]; m];
    let mut left_values = vec![vec![a.zero(); m]; m];
    for i in 0..m as i64 {
        for j in 0..m as i64 {
            right_values[i as usize][j as usize] =
                pair.left_valued(&basis[i as usize], &basis[j as usize]);
            left_values[i as usize][j as usize] =
                pair.right_valued(&basis[i as usize], &basis[j as usize]);
        }
    }
    let cpair = InnerPair::from_tables(&conj, right_values, left_values)?;
    Ok((conj, cpair))
}

/// Results of the seven-axiom equivalence check, with witnesses.
#[derive(Debug, Default, serde::Serialize)]
pub struct MoritaReport {
    pub linearity: Vec<String>,
    pub compatibility: Vec<String>,
    pub hermitian: Vec<String>,
    pub nondegenerate: Vec<String>,
    pub full: Vec<String>,
    pub star_compatibility: Vec<String>,
    pub associativity: Vec<String>,
    /// Fullness and non-degeneracy were decided on a mode window only.
    pub windowed: bool,
}

impl MoritaReport {
    pub fn passed(&self) -> bool {
        self.linearity.is_empty()
            && self.compatibility.is_empty()
            && self.hermitian.is_empty()
            && self.nondegenerate.is_empty()
            && self.full.is_empty()
            && self.star_compatibility.is_empty()
            && self.associativity.is_empty()
    }
}

fn coord_list(values: &[Element]) -> Vec<i64> {
    let mut idx: Vec<i64> = values
        .iter()
        .flat_map(|v| v.coeffs().keys().copied())
        .collect();
    idx.sort();
    idx.dedup();
    idx
}

fn coords_on(v: &Element, idx: &[i64]) -> Vec<Scalar> {
    idx.iter().map(|i| v.coeff(*i)).collect()
}

/// Exhaustive check of the seven equivalence-bimodule axioms on basis
/// tuples. On the circle model the span conditions are decided inside the
/// supplied window and flagged as such.
pub fn morita_axiom_check(pair: &InnerPair, window: Option<i64>) -> Result<MoritaReport> {
    let module = &pair.module;
    let b_alg = module.left_algebra();
    let a_alg = module.right_algebra();
    let mids = module.basis_indices(window)?;
    let aids = a_alg.basis_indices(window)?;
    let bids = b_alg.basis_indices(window)?;
    let basis: Vec<ModElem> = mids.iter().map(|&i| ModElem::basis(module, i)).collect();
    let mut report = MoritaReport {
        windowed: module.dim().is_none(),
        ..MoritaReport::default()
    };

    let i_scalar = Scalar::i();
    for (xi, x) in mids.iter().zip(&basis) {
        for (yi, y) in mids.iter().zip(&basis) {
            let lbl = || format!("({}, {})", module.label(*xi), module.label(*yi));
            // sesquilinear conventions, probed with the imaginary unit
            let ra = pair.right_valued(x, y);
            if pair.right_valued(&x.scale(&i_scalar), y) != ra.scale(&i_scalar.conj())
                || pair.right_valued(x, &y.scale(&i_scalar)) != ra.scale(&i_scalar)
            {
                report
                    .linearity
                    .push(format!("right-valued convention fails on {}", lbl()));
            }
            let la = pair.left_valued(x, y);
            if pair.left_valued(&x.scale(&i_scalar), y) != la.scale(&i_scalar)
                || pair.left_valued(x, &y.scale(&i_scalar)) != la.scale(&i_scalar.conj())
            {
                report
                    .linearity
                    .push(format!("left-valued convention fails on {}", lbl()));
            }
            if pair.right_valued(y, x) != ra.star() {
                report
                    .hermitian
                    .push(format!("right-valued symmetry fails on {}", lbl()));
            }
            if pair.left_valued(y, x) != la.star() {
                report
                    .hermitian
                    .push(format!("left-valued symmetry fails on {}", lbl()));
            }
            for &ai in &aids {
                let a = a_alg.basis(ai);
                if pair.right_valued(x, &y.right(&a)) != ra.mul(&a) {
                    report.compatibility.push(format!(
                        "right module rule fails on {} with {}",
                        lbl(),
                        a_alg.label(ai)
                    ));
                }
                if pair.left_valued(x, &y.right(&a.star())) != pair.left_valued(&x.right(&a), y) {
                    report.star_compatibility.push(format!(
                        "right star rule fails on {} with {}",
                        lbl(),
                        a_alg.label(ai)
                    ));
                }
            }
            for &bi in &bids {
                let b = b_alg.basis(bi);
                if pair.left_valued(&x.left(&b), y) != b.mul(&la) {
                    report.compatibility.push(format!(
                        "left module rule fails on {} with {}",
                        lbl(),
                        b_alg.label(bi)
                    ));
                }
                if pair.right_valued(x, &y.left(&b)) != pair.right_valued(&x.left(&b.star()), y) {
                    report.star_compatibility.push(format!(
                        "left star rule fails on {} with {}",
                        lbl(),
                        b_alg.label(bi)
                    ));
                }
            }
            for (zi, z) in mids.iter().zip(&basis) {
                if z.left(&la) != x.right(&pair.right_valued(y, z)) {
                    report.associativity.push(format!(
                        "pairing associativity fails on ({}, {}, {})",
                        module.label(*xi),
                        module.label(*yi),
                        module.label(*zi)
                    ));
                }
            }
        }
    }

    // non-degeneracy: no nonzero combination pairs to zero against the
    // whole basis
    let n = basis.len();
    {
        let right_vals: Vec<Vec<Element>> = basis
            .iter()
            .map(|x| basis.iter().map(|y| pair.right_valued(x, y)).collect())
            .collect();
        let flat: Vec<Element> = right_vals.iter().flatten().cloned().collect();
        let idx = coord_list(&flat);
        let mut rows = Vec::new();
        for i in 0..n {
            for slot in 0..idx.len() {
                rows.push((0..n).map(|j| coords_on(&right_vals[i][j], &idx)[slot].clone()).collect());
            }
        }
        for v in Mat::from_rows(rows, n).kernel_basis() {
            let witness = ModElem::from_coords(
                module,
                v.iter()
                    .enumerate()
                    .map(|(j, c)| (mids[j], c.clone()))
                    .collect(),
            );
            report
                .nondegenerate
                .push(format!("right-valued product vanishes against {witness}"));
        }
        let span = Subspace::new(
            idx.len(),
            &flat.iter().map(|v| coords_on(v, &idx)).collect::<Vec<_>>(),
        );
        for &ai in &aids {
            let target = coords_on(&a_alg.basis(ai), &idx);
            if target.iter().all(|c| c.is_zero()) || !span.contains(&target) {
                report
                    .full
                    .push(format!("right-valued span misses {}", a_alg.label(ai)));
            }
        }
    }
    {
        let left_vals: Vec<Vec<Element>> = basis
            .iter()
            .map(|x| basis.iter().map(|y| pair.left_valued(x, y)).collect())
            .collect();
        let flat: Vec<Element> = left_vals.iter().flatten().cloned().collect();
        let idx = coord_list(&flat);
        let mut rows = Vec::new();
        for j in 0..n {
            for slot in 0..idx.len() {
                rows.push((0..n).map(|i| coords_on(&left_vals[i][j], &idx)[slot].clone()).collect());
            }
        }
        for v in Mat::from_rows(rows, n).kernel_basis() {
            let witness = ModElem::from_coords(
                module,
                v.iter()
                    .enumerate()
                    .map(|(i, c)| (mids[i], c.clone()))
                    .collect(),
            );
            report
                .nondegenerate
                .push(format!("left-valued product vanishes against {witness}"));
        }
        let span = Subspace::new(
            idx.len(),
            &flat.iter().map(|v| coords_on(v, &idx)).collect::<Vec<_>>(),
        );
        for &bi in &bids {
            let target = coords_on(&b_alg.basis(bi), &idx);
            if target.iter().all(|c| c.is_zero()) || !span.contains(&target) {
                report
                    .full
                    .push(format!("left-valued span misses {}", b_alg.label(bi)));
            }
        }
    }
    Ok(report)
}

fn model_dim(spec: &ModelSpec) -> Option<usize> {
    match spec {
        ModelSpec::FiniteFunctions { points } => Some(points.len()),
        ModelSpec::TruncatedPoly { order } => Some(*order as usize),
        ModelSpec::Matrix { size } => Some((*size as usize) * (*size as usize)),
        ModelSpec::Laurent => None,
        ModelSpec::Product { factors } => factors.iter().map(model_dim).sum(),
    }
}

/// Matrix-block decomposition (offset, side length) of a model in which
/// positivity is decidable blockwise; `None` when no such decomposition
/// exists (nilpotents, infinite models).
fn blocks_of(spec: &ModelSpec) -> Option<Vec<(i64, usize)>> {
    match spec {
        ModelSpec::FiniteFunctions { points } => {
            Some((0..points.len()).map(|i| (i as i64, 1)).collect())
        }
        ModelSpec::TruncatedPoly { order: 1 } => Some(vec![(0, 1)]),
        ModelSpec::TruncatedPoly { .. } => None,
        ModelSpec::Matrix { size } => Some(vec![(0, *size as usize)]),
        ModelSpec::Laurent => None,
        ModelSpec::Product { factors } => {
            let mut out = Vec::new();
            let mut off = 0i64;
            for f in factors {
                for (o, s) in blocks_of(f)? {
                    out.push((off + o, s));
                }
                off += model_dim(f)? as i64;
            }
            Some(out)
        }
    }
}

/// Is a Hermitian matrix over the algebra positive? Decided exactly on
/// each matrix block of the coefficient model.
fn gram_is_positive(gram: &[Vec<Element>], algebra: &Arc<Algebra>) -> Result<bool> {
    let blocks = blocks_of(&algebra.spec).ok_or_else(|| {
        Error::Model(format!(
            "positivity is not decidable blockwise for {:?}",
            algebra.spec
        ))
    })?;
    let k = gram.len();
    for (off, s) in blocks {
        let mut numeric = Mat::zeros(k * s, k * s);
        for p in 0..k {
            for q in 0..k {
                for r in 0..s {
                    for t in 0..s {
                        *numeric.at_mut(p * s + r, q * s + t) =
                            gram[p][q].coeff(off + (r * s + t) as i64);
                    }
                }
            }
        }
        if !is_hermitian(&numeric) || !hermitian_is_psd(&numeric) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Exact complete positivity of both products on basis tuples up to the
/// given size: every Gram matrix must be positive in the corresponding
/// matrix amplification.
pub fn complete_positivity_check(
    pair: &InnerPair,
    max_tuple: usize,
    window: Option<i64>,
) -> Result<Vec<String>> {
    let module = &pair.module;
    let mids = module.basis_indices(window)?;
    let basis: Vec<ModElem> = mids.iter().map(|&i| ModElem::basis(module, i)).collect();
    let mut failures = Vec::new();
    for k in 1..=max_tuple.min(basis.len()) {
        for combo in (0..basis.len()).combinations(k) {
            let tuple_label = || {
                combo
                    .iter()
                    .map(|&i| module.label(mids[i]))
                    .collect::<Vec<_>>()
                    .join(", ")
            };
            let right_gram: Vec<Vec<Element>> = combo
                .iter()
                .map(|&i| {
                    combo
                        .iter()
                        .map(|&j| pair.right_valued(&basis[i], &basis[j]))
                        .collect()
                })
                .collect();
            if !gram_is_positive(&right_gram, module.right_algebra())? {
                failures.push(format!(
                    "right-valued Gram matrix of ({}) is not positive",
                    tuple_label()
                ));
            }
            let left_gram: Vec<Vec<Element>> = combo
                .iter()
                .map(|&i| {
                    combo
                        .iter()
                        .map(|&j| pair.left_valued(&basis[i], &basis[j]))
                        .collect()
                })
                .collect();
            if !gram_is_positive(&left_gram, module.left_algebra())? {
                failures.push(format!(
                    "left-valued Gram matrix of ({}) is not positive",
                    tuple_label()
                ));
            }
        }
    }
    Ok(failures)
}

/// A balanced tensor product, keeping the projection data so pure tensors
/// and induced structure can be formed later.
pub struct TensorProduct {
    pub module: Arc<Bimodule>,
    pub left_factor: Arc<Bimodule>,
    pub right_factor: Arc<Bimodule>,
    quotient: Quotient<Scalar>,
}

impl TensorProduct {
    fn ambient_dim(&self) -> usize {
        self.quotient.ambient()
    }

    fn pure_index(&self, i: i64, j: i64) -> usize {
        let me = self.right_factor.dim().unwrap();
        (i as usize) * me + (j as usize)
    }

    /// The class of x ⊗ y.
    pub fn pure(&self, x: &ModElem, y: &ModElem) -> ModElem {
        assert!(same_module(&x.module, &self.left_factor), "left factor mismatch");
        assert!(same_module(&y.module, &self.right_factor), "right factor mismatch");
        let mut ambient = vec![Scalar::zero(); self.ambient_dim()];
        for (i, ci) in x.coords() {
            for (j, cj) in y.coords() {
                let slot = self.pure_index(*i, *j);
                ambient[slot] += &(ci * cj);
            }
        }
        let coords = self
            .quotient
            .project(&ambient)
            .into_iter()
            .enumerate()
            .map(|(k, c)| (k as i64, c))
            .collect();
        ModElem::from_coords(&self.module, coords)
    }

    /// Representative of a quotient basis vector as ambient pure-tensor
    /// coordinates.
    fn lift(&self, k: i64) -> Vec<Scalar> {
        self.quotient.embed(k as usize)
    }
}

/// Tensor two finite-basis bimodules over their shared middle algebra,
/// imposing the balanced relations exactly.
pub fn tensor_over(f: &Arc<Bimodule>, e: &Arc<Bimodule>) -> Result<TensorProduct> {
    if !same_algebra(f.right_algebra(), e.left_algebra()) {
        return Err(Error::Model(
            "tensor factors must share the middle algebra".into(),
        ));
    }
    let (Some(mf), Some(me)) = (f.dim(), e.dim()) else {
        return Err(Error::Model("tensor products need finite module bases".into()));
    };
    let mid = f.right_algebra();
    let dmid = mid.dim().expect("middle algebra of finite modules is finite");
    let ambient = mf * me;
    let slot = |i: usize, j: usize| i * me + j;
    let mut relations = Vec::new();
    for i in 0..mf as i64 {
        let xi = ModElem::basis(f, i);
        for b in 0..dmid as i64 {
            let xb = xi.right(&mid.basis(b));
            for j in 0..me as i64 {
                let by = ModElem::basis(e, j).left(&mid.basis(b));
                let mut rel = vec![Scalar::zero(); ambient];
                for (k, c) in xb.coords() {
                    rel[slot(*k as usize, j as usize)] = c.clone();
                }
                for (l, c) in by.coords() {
                    let s = slot(i as usize, *l as usize);
                    rel[s] = rel[s].clone() - c.clone();
                }
                if rel.iter().any(|c| !c.is_zero()) {
                    relations.push(rel);
                }
            }
        }
    }
    let quotient = Quotient::new(ambient, &relations);
    let dim = quotient.dim();

    let c_alg = f.left_algebra();
    let a_alg = e.right_algebra();
    let dc = c_alg.dim().unwrap();
    let da = a_alg.dim().unwrap();
    let project_sparse = |ambient_vec: &[Scalar], q: &Quotient<Scalar>| -> SparseVec {
        q.project(ambient_vec)
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (k as i64, c))
            .collect()
    };
    let mut labels = Vec::with_capacity(dim);
    let mut left = vec![vec![SparseVec::new(); dim]; dc];
    let mut right = vec![vec![SparseVec::new(); da]; dim];
    for k in 0..dim {
        let rep = quotient.embed(k);
        let lead = rep.iter().position(|c| !c.is_zero()).unwrap();
        labels.push(format!(
            "{}(x){}",
            f.label((lead / me) as i64),
            e.label((lead % me) as i64)
        ));
        for c in 0..dc as i64 {
            let mut img = vec![Scalar::zero(); ambient];
            for (s, coeff) in rep.iter().enumerate() {
                if coeff.is_zero() {
                    continue;
                }
                let (i, j) = ((s / me) as i64, (s % me) as i64);
                let moved = ModElem::basis(f, i).left(&c_alg.basis(c));
                for (i2, c2) in moved.coords() {
                    let t = slot(*i2 as usize, j as usize);
                    img[t] += &(coeff * c2);
                }
            }
            left[c as usize][k] = project_sparse(&img, &quotient);
        }
        for a in 0..da as i64 {
            let mut img = vec![Scalar::zero(); ambient];
            for (s, coeff) in rep.iter().enumerate() {
                if coeff.is_zero() {
                    continue;
                }
                let (i, j) = ((s / me) as i64, (s % me) as i64);
                let moved = ModElem::basis(e, j).right(&a_alg.basis(a));
                for (j2, c2) in moved.coords() {
                    let t = slot(i as usize, *j2 as usize);
                    img[t] += &(coeff * c2);
                }
            }
            right[k][a as usize] = project_sparse(&img, &quotient);
        }
    }
    let module = Bimodule::table(c_alg, a_alg, labels, left, right)?;
    Ok(TensorProduct {
        module,
        left_factor: Arc::clone(f),
        right_factor: Arc::clone(e),
        quotient,
    })
}

fn rieffel_ambient_right(
    t: &TensorProduct,
    pf: &InnerPair,
    pe: &InnerPair,
    xv: &[Scalar],
    yv: &[Scalar],
) -> Element {
    let me = t.right_factor.dim().unwrap();
    let mut out = t.module.right_algebra().zero();
    for (sx, cx) in xv.iter().enumerate() {
        if cx.is_zero() {
            continue;
        }
        let (i, j) = ((sx / me) as i64, (sx % me) as i64);
        for (sy, cy) in yv.iter().enumerate() {
            if cy.is_zero() {
                continue;
            }
            let (k, l) = ((sy / me) as i64, (sy % me) as i64);
            let mid = pf.right_valued(
                &ModElem::basis(&t.left_factor, i),
                &ModElem::basis(&t.left_factor, k),
            );
            let v = pe.right_valued(
                &ModElem::basis(&t.right_factor, j),
                &ModElem::basis(&t.right_factor, l).left(&mid),
            );
            out = out.add(&v.scale(&(&cx.conj() * cy)));
        }
    }
    out
}

fn rieffel_ambient_left(
    t: &TensorProduct,
    pf: &InnerPair,
    pe: &InnerPair,
    xv: &[Scalar],
    yv: &[Scalar],
) -> Element {
    let me = t.right_factor.dim().unwrap();
    let mut out = t.module.left_algebra().zero();
    for (sx, cx) in xv.iter().enumerate() {
        if cx.is_zero() {
            continue;
        }
        let (i, j) = ((sx / me) as i64, (sx % me) as i64);
        for (sy, cy) in yv.iter().enumerate() {
            if cy.is_zero() {
                continue;
            }
            let (k, l) = ((sy / me) as i64, (sy % me) as i64);
            let mid = pe.left_valued(
                &ModElem::basis(&t.right_factor, j),
                &ModElem::basis(&t.right_factor, l),
            );
            let v = pf.left_valued(
                &ModElem::basis(&t.left_factor, i).right(&mid),
                &ModElem::basis(&t.left_factor, k),
            );
            out = out.add(&v.scale(&(cx * &cy.conj())));
        }
    }
    out
}

/// The induced products on a tensor: pair the middle value into the other
/// factor. Well-definedness against every balanced relation is verified
/// before the tables are built.
pub fn rieffel_tensor(t: &TensorProduct, pf: &InnerPair, pe: &InnerPair) -> Result<InnerPair> {
    if !same_module(&pf.module, &t.left_factor) || !same_module(&pe.module, &t.right_factor) {
        return Err(Error::Model("pairings do not match the tensor factors".into()));
    }
    let ambient = t.ambient_dim();
    let mf = t.left_factor.dim().unwrap();
    let me = t.right_factor.dim().unwrap();
    let mid = t.left_factor.right_algebra();
    let dmid = mid.dim().unwrap();
    // probe ill-definedness: every balanced relation must pair to zero
    // against every pure tensor in both slots and both products
    let mut pures = Vec::new();
    for s in 0..ambient {
        let mut v = vec![Scalar::zero(); ambient];
        v[s] = Scalar::one();
        pures.push(v);
    }
    for i in 0..mf as i64 {
        let xi = ModElem::basis(&t.left_factor, i);
        for b in 0..dmid as i64 {
            let xb = xi.right(&mid.basis(b));
            for j in 0..me as i64 {
                let by = ModElem::basis(&t.right_factor, j).left(&mid.basis(b));
                let mut rel = vec![Scalar::zero(); ambient];
                for (k, c) in xb.coords() {
                    rel[(*k as usize) * me + j as usize] = c.clone();
                }
                for (l, c) in by.coords() {
                    let s = (i as usize) * me + *l as usize;
                    rel[s] = rel[s].clone() - c.clone();
                }
                if rel.iter().all(|c| c.is_zero()) {
                    continue;
                }
                for p in &pures {
                    if !rieffel_ambient_right(t, pf, pe, &rel, p).is_zero()
                        || !rieffel_ambient_right(t, pf, pe, p, &rel).is_zero()
                        || !rieffel_ambient_left(t, pf, pe, &rel, p).is_zero()
                        || !rieffel_ambient_left(t, pf, pe, p, &rel).is_zero()
                    {
                        return Err(Error::Internal(
                            "induced tensor pairing is not balanced".into(),
                        ));
                    }
                }
            }
        }
    }
    let dim = t.module.dim().unwrap();
    let reps: Vec<Vec<Scalar>> = (0..dim as i64).map(|k| t.lift(k)).collect();
    let right_values = reps
        .iter()
        .map(|x| {
            reps.iter()
                .map(|y| rieffel_ambient_right(t, pf, pe, x, y))
                .collect()
        })
        .collect();
    let left_values = reps
        .iter()
        .map(|x| {
            reps.iter()
                .map(|y| rieffel_ambient_left(t, pf, pe, x, y))
                .collect()
        })
        .collect();
    InnerPair::from_tables(&t.module, right_values, left_values)
}

/// A linear map between finite-basis modules, stored columnwise.
pub struct ModuleMap {
    pub source: Arc<Bimodule>,
    pub target: Arc<Bimodule>,
    /// target-dim x source-dim coordinate matrix
    pub matrix: Mat<Scalar>,
}

impl ModuleMap {
    pub fn new(source: &Arc<Bimodule>, target: &Arc<Bimodule>, images: &[ModElem]) -> Result<Self> {
        let ms = source
            .dim()
            .ok_or_else(|| Error::Model("module maps need finite bases".into()))?;
        let mt = target
            .dim()
            .ok_or_else(|| Error::Model("module maps need finite bases".into()))?;
        if images.len() != ms {
            return Err(Error::Model(format!("map needs {ms} images")));
        }
        let mut matrix = Mat::zeros(mt, ms);
        for (j, img) in images.iter().enumerate() {
            assert!(same_module(&img.module, target), "image module mismatch");
            for (k, c) in img.coords() {
                *matrix.at_mut(*k as usize, j) = c.clone();
            }
        }
        Ok(ModuleMap {
            source: Arc::clone(source),
            target: Arc::clone(target),
            matrix,
        })
    }

    pub fn apply(&self, x: &ModElem) -> ModElem {
        assert!(same_module(&x.module, &self.source), "source mismatch");
        let ms = self.source.dim().unwrap();
        let mut v = vec![Scalar::zero(); ms];
        for (k, c) in x.coords() {
            v[*k as usize] = c.clone();
        }
        let w = self.matrix.apply(&v);
        ModElem::from_coords(
            &self.target,
            w.into_iter()
                .enumerate()
                .map(|(k, c)| (k as i64, c))
                .collect(),
        )
    }

    pub fn is_bijective(&self) -> bool {
        self.matrix.rows == self.matrix.cols && self.matrix.rank() == self.matrix.rows
    }

    /// Violations of compatibility with both algebra actions.
    pub fn module_map_failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        let ms = self.source.dim().unwrap();
        let b_alg = self.source.left_algebra();
        let a_alg = self.source.right_algebra();
        if !same_algebra(b_alg, self.target.left_algebra())
            || !same_algebra(a_alg, self.target.right_algebra())
        {
            out.push("modules live over different algebra pairs".into());
            return out;
        }
        for k in 0..ms as i64 {
            let x = ModElem::basis(&self.source, k);
            for b in 0..b_alg.dim().unwrap() as i64 {
                let eb = b_alg.basis(b);
                if self.apply(&x.left(&eb)) != self.apply(&x).left(&eb) {
                    out.push(format!(
                        "left action of {} is not intertwined at {}",
                        b_alg.label(b),
                        self.source.label(k)
                    ));
                }
            }
            for a in 0..a_alg.dim().unwrap() as i64 {
                let ea = a_alg.basis(a);
                if self.apply(&x.right(&ea)) != self.apply(&x).right(&ea) {
                    out.push(format!(
                        "right action of {} is not intertwined at {}",
                        a_alg.label(a),
                        self.source.label(k)
                    ));
                }
            }
        }
        out
    }

    /// Violations of isometry for both products.
    pub fn isometry_failures(&self, p_src: &InnerPair, p_tgt: &InnerPair) -> Vec<String> {
        let mut out = Vec::new();
        let ms = self.source.dim().unwrap();
        for i in 0..ms as i64 {
            for j in 0..ms as i64 {
                let x = ModElem::basis(&self.source, i);
                let y = ModElem::basis(&self.source, j);
                if p_tgt.right_valued(&self.apply(&x), &self.apply(&y))
                    != p_src.right_valued(&x, &y)
                {
                    out.push(format!(
                        "right-valued product moves under the map on ({}, {})",
                        self.source.label(i),
                        self.source.label(j)
                    ));
                }
                if p_tgt.left_valued(&self.apply(&x), &self.apply(&y)) != p_src.left_valued(&x, &y)
                {
                    out.push(format!(
                        "left-valued product moves under the map on ({}, {})",
                        self.source.label(i),
                        self.source.label(j)
                    ));
                }
            }
        }
        out
    }
}

#[derive(Debug, Default, serde::Serialize)]
pub struct MapReport {
    pub bijective: bool,
    pub module_map: Vec<String>,
    pub isometry: Vec<String>,
}

impl MapReport {
    pub fn passed(&self) -> bool {
        self.bijective && self.module_map.is_empty() && self.isometry.is_empty()
    }
}

/// x ⊗ a ↦ x·a as an explicit isomorphism from E ⊗ A to E, with the unit
/// law for the induced products.
pub fn right_unit_check(pe: &InnerPair) -> Result<MapReport> {
    let e = &pe.module;
    let a_alg = e.right_algebra();
    let a_mod = Bimodule::canonical(a_alg);
    let pa = InnerPair::canonical(&a_mod)?;
    let t = tensor_over(e, &a_mod)?;
    let p_t = rieffel_tensor(&t, pe, &pa)?;
    let dim = t.module.dim().unwrap();
    let da = a_alg.dim().unwrap();
    let images: Vec<ModElem> = (0..dim as i64)
        .map(|k| {
            let rep = t.lift(k);
            let mut out = ModElem::zero(e);
            for (s, c) in rep.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let (i, j) = ((s / da) as i64, (s % da) as i64);
                out = out.add(&ModElem::basis(e, i).right(&a_alg.basis(j)).scale(c));
            }
            out
        })
        .collect();
    let map = ModuleMap::new(&t.module, e, &images)?;
    Ok(MapReport {
        bijective: map.is_bijective(),
        module_map: map.module_map_failures(),
        isometry: map.isometry_failures(&p_t, pe),
    })
}

/// The rebracketing map (x ⊗ y) ⊗ z ↦ x ⊗ (y ⊗ z) on triple tensors,
/// checked to be a bijective module map and an isometry for the induced
/// products on both sides.
pub fn associator_check(
    f: &Arc<Bimodule>,
    e: &Arc<Bimodule>,
    d: &Arc<Bimodule>,
    pf: &InnerPair,
    pe: &InnerPair,
    pd: &InnerPair,
) -> Result<MapReport> {
    let fe = tensor_over(f, e)?;
    let fe_d = tensor_over(&fe.module, d)?;
    let ed = tensor_over(e, d)?;
    let f_ed = tensor_over(f, &ed.module)?;
    let p_fe = rieffel_tensor(&fe, pf, pe)?;
    let p_left = rieffel_tensor(&fe_d, &p_fe, pd)?;
    let p_ed = rieffel_tensor(&ed, pe, pd)?;
    let p_right = rieffel_tensor(&f_ed, pf, &p_ed)?;

    let md = d.dim().unwrap();
    let me = e.dim().unwrap();
    let dim = fe_d.module.dim().unwrap();
    let images: Vec<ModElem> = (0..dim as i64)
        .map(|k| {
            let rep = fe_d.lift(k);
            let mut out = ModElem::zero(&f_ed.module);
            for (s, c) in rep.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let (kfe, l) = ((s / md) as i64, (s % md) as i64);
                let inner = fe.lift(kfe);
                for (si, ci) in inner.iter().enumerate() {
                    if ci.is_zero() {
                        continue;
                    }
                    let (i, j) = ((si / me) as i64, (si % me) as i64);
                    let right_part = ed.pure(&ModElem::basis(e, j), &ModElem::basis(d, l));
                    out = out.add(
                        &f_ed
                            .pure(&ModElem::basis(f, i), &right_part)
                            .scale(&(c * ci)),
                    );
                }
            }
            out
        })
        .collect();
    let map = ModuleMap::new(&fe_d.module, &f_ed.module, &images)?;
    Ok(MapReport {
        bijective: map.is_bijective(),
        module_map: map.module_map_failures(),
        isometry: map.isometry_failures(&p_left, &p_right),
    })
}

/// Decide isomorphism of two finite-basis bimodules over the same algebra
/// pair: compute the space of intertwiners and search it for an invertible
/// element on an integer grid large enough to be conclusive.
pub fn are_isomorphic(e: &Arc<Bimodule>, f: &Arc<Bimodule>) -> Result<bool> {
    if !same_algebra(e.left_algebra(), f.left_algebra())
        || !same_algebra(e.right_algebra(), f.right_algebra())
    {
        return Ok(false);
    }
    let (Some(me), Some(mf)) = (e.dim(), f.dim()) else {
        return Err(Error::Model("isomorphism decision needs finite bases".into()));
    };
    if me != mf {
        return Ok(false);
    }
    let m = me;
    if m == 0 {
        return Ok(true);
    }
    let b_alg = e.left_algebra();
    let a_alg = e.right_algebra();
    let unknowns = m * m;
    let slot = |p: usize, r: usize| p * m + r;
    let mut rows = Vec::new();
    let mut push_constraints = |moved_e: Vec<ModElem>, moved_f: Vec<ModElem>| {
        // intertwining: sum_r act_e[q][r] T[p][r] - act_f[r][p] T[r][q] = 0
        for q in 0..m {
            for p in 0..m {
                let mut row = vec![Scalar::zero(); unknowns];
                for (r, c) in moved_e[q].coords() {
                    row[slot(p, *r as usize)] += c;
                }
                for (r, mf_img) in moved_f.iter().enumerate() {
                    if let Some(c) = mf_img.coords().get(&(p as i64)) {
                        row[slot(r, q)] = row[slot(r, q)].clone() - c.clone();
                    }
                }
                if row.iter().any(|c| !c.is_zero()) {
                    rows.push(row);
                }
            }
        }
    };
    for b in 0..b_alg.dim().unwrap() as i64 {
        let eb = b_alg.basis(b);
        push_constraints(
            (0..m as i64).map(|q| ModElem::basis(e, q).left(&eb)).collect(),
            (0..m as i64).map(|r| ModElem::basis(f, r).left(&eb)).collect(),
        );
    }
    for a in 0..a_alg.dim().unwrap() as i64 {
        let ea = a_alg.basis(a);
        push_constraints(
            (0..m as i64).map(|q| ModElem::basis(e, q).right(&ea)).collect(),
            (0..m as i64).map(|r| ModElem::basis(f, r).right(&ea)).collect(),
        );
    }
    let kernel = if rows.is_empty() {
        Mat::<Scalar>::zeros(1, unknowns).kernel_basis()
    } else {
        Mat::from_rows(rows, unknowns).kernel_basis()
    };
    if kernel.is_empty() {
        return Ok(false);
    }
    let k = kernel.len();
    let as_matrix = |coeffs: &[Scalar]| -> Mat<Scalar> {
        let mut t = Mat::zeros(m, m);
        for (idx, basis_vec) in kernel.iter().enumerate() {
            if coeffs[idx].is_zero() {
                continue;
            }
            for p in 0..m {
                for r in 0..m {
                    *t.at_mut(p, r) += &(&coeffs[idx] * &basis_vec[slot(p, r)]);
                }
            }
        }
        t
    };
    // generic combination first; the full grid afterwards is conclusive
    // because the determinant has degree at most m in each coefficient
    let ones = vec![Scalar::one(); k];
    if as_matrix(&ones).rank() == m {
        return Ok(true);
    }
    let grid = (m as u64 + 1).checked_pow(k as u32);
    match grid {
        Some(total) if total <= 200_000 => {
            let mut counters = vec![0usize; k];
            loop {
                let coeffs: Vec<Scalar> = counters
                    .iter()
                    .map(|&c| Scalar::from_int(c as i64))
                    .collect();
                if as_matrix(&coeffs).rank() == m {
                    return Ok(true);
                }
                let mut pos = 0;
                loop {
                    if pos == k {
                        return Ok(false);
                    }
                    counters[pos] += 1;
                    if counters[pos] <= m {
                        break;
                    }
                    counters[pos] = 0;
                    pos += 1;
                }
            }
        }
        _ => Err(Error::Model(
            "intertwiner space too large for a conclusive invertibility search".into(),
        )),
    }
}

/// Block dimensions of a module between two function algebras: entry
/// (y, x) is the rank of cutting by the indicators of y and x.
pub fn dimension_matrix(module: &Arc<Bimodule>) -> Result<Vec<Vec<usize>>> {
    let b_alg = module.left_algebra();
    let a_alg = module.right_algebra();
    if !matches!(b_alg.spec, ModelSpec::FiniteFunctions { .. })
        || !matches!(a_alg.spec, ModelSpec::FiniteFunctions { .. })
    {
        return Err(Error::Model(
            "block dimensions need function algebras on both sides".into(),
        ));
    }
    let m = module.dim().unwrap();
    let mut out = Vec::new();
    for y in 0..b_alg.dim().unwrap() as i64 {
        let mut row = Vec::new();
        for x in 0..a_alg.dim().unwrap() as i64 {
            let cols: Vec<Vec<Scalar>> = (0..m as i64)
                .map(|i| {
                    let cut = ModElem::basis(module, i)
                        .left(&b_alg.basis(y))
                        .right(&a_alg.basis(x));
                    let mut v = vec![Scalar::zero(); m];
                    for (kk, c) in cut.coords() {
                        v[*kk as usize] = c.clone();
                    }
                    v
                })
                .collect();
            row.push(Mat::from_rows(cols, m).rank());
        }
        out.push(row);
    }
    Ok(out)
}

/// One Hopf generator (or group element) acting on the module.
#[derive(Clone)]
pub enum ModOp {
    /// On a self-bimodule: x ↦ multiplier·x + base(x).
    SelfOp {
        multiplier: Element,
        base: Option<Operator>,
    },
    /// Explicit sparse images of module basis vectors.
    Table(BTreeMap<i64, SparseVec>),
}

impl ModOp {
    fn apply(&self, module: &Arc<Bimodule>, x: &ModElem) -> ModElem {
        match self {
            ModOp::SelfOp { multiplier, base } => {
                let e = x.to_element().expect("self-operator on a self-bimodule");
                let mut out = multiplier.mul(&e);
                if let Some(op) = base {
                    out = out.add(&op.apply(&e));
                }
                ModElem::from_element(module, &out).expect("self-bimodule image")
            }
            ModOp::Table(images) => {
                let mut out = SparseVec::new();
                for (i, c) in x.coords() {
                    if let Some(img) = images.get(i) {
                        for (k, v) in img {
                            merge(&mut out, *k, c * v);
                        }
                    }
                }
                ModElem::from_coords(module, out)
            }
        }
    }
}

/// An H-module structure on a bimodule: one operator per Lie generator or
/// per group element.
pub struct CovariantStructure {
    pub hopf: Arc<Hopf>,
    pub module: Arc<Bimodule>,
    pub ops: Vec<ModOp>,
}

impl CovariantStructure {
    pub fn new(hopf: &Arc<Hopf>, module: &Arc<Bimodule>, ops: Vec<ModOp>) -> Result<Self> {
        let expected = match hopf.as_ref() {
            Hopf::Uea { lie, .. } => lie.dim,
            Hopf::Group { table, .. } => table.len(),
        };
        if ops.len() != expected {
            return Err(Error::Model(format!(
                "module structure needs {expected} operators, got {}",
                ops.len()
            )));
        }
        Ok(CovariantStructure {
            hopf: Arc::clone(hopf),
            module: Arc::clone(module),
            ops,
        })
    }

    /// The module structure that copies the algebra action on the
    /// canonical self-bimodule.
    pub fn canonical_lift(action: &HAction) -> Result<Self> {
        let module = Bimodule::canonical(&action.algebra);
        let ops = match action.lie_action() {
            Some(la) => la
                .derivations
                .iter()
                .map(|op| ModOp::SelfOp {
                    multiplier: action.algebra.zero(),
                    base: Some(op.clone()),
                })
                .collect(),
            None => {
                let order = match action.hopf.as_ref() {
                    Hopf::Group { table, .. } => table.len(),
                    Hopf::Uea { .. } => unreachable!(),
                };
                let ids = action.algebra.basis_indices(None).map_err(|_| {
                    Error::Model(
                        "group module structures need a finite-dimensional algebra".into(),
                    )
                })?;
                (0..order)
                    .map(|g| {
                        ModOp::Table(
                            ids.iter()
                                .map(|&i| {
                                    let img = action
                                        .act_key(&HKey::Grp(g), &action.algebra.basis(i));
                                    (i, img.coeffs().clone())
                                })
                                .collect(),
                        )
                    })
                    .collect()
            }
        };
        CovariantStructure::new(&action.hopf, &module, ops)
    }

    pub fn act_key(&self, key: &HKey, x: &ModElem) -> ModElem {
        match key {
            HKey::Mono(exps) => {
                let mut v = x.clone();
                for i in (0..exps.len()).rev() {
                    for _ in 0..exps[i] {
                        v = self.ops[i].apply(&self.module, &v);
                    }
                }
                v
            }
            HKey::Grp(g) => self.ops[*g].apply(&self.module, x),
        }
    }

    pub fn act(&self, h: &HElem, x: &ModElem) -> ModElem {
        let mut out = ModElem::zero(&self.module);
        for (k, c) in h.coeffs() {
            out = out.add(&self.act_key(k, x).scale(c));
        }
        out
    }
}

/// Violations of the four compatibility rules between a Hopf action on
/// the algebras and a module structure on the bimodule.
#[derive(Debug, Default, serde::Serialize)]
pub struct CovarianceReport {
    pub left_leibniz: Vec<String>,
    pub right_leibniz: Vec<String>,
    pub left_pairing: Vec<String>,
    pub right_pairing: Vec<String>,
}

impl CovarianceReport {
    pub fn passed(&self) -> bool {
        self.left_leibniz.is_empty()
            && self.right_leibniz.is_empty()
            && self.left_pairing.is_empty()
            && self.right_pairing.is_empty()
    }
}

/// Check the compatibilities on every Hopf basis key and basis sample:
/// both actions distribute over the module multiplications through the
/// coproduct, and the products are equivariant with the star-antipode
/// twist in the contravariant slot.
pub fn covariance_check(
    cov: &CovariantStructure,
    left_action: &HAction,
    right_action: &HAction,
    pair: Option<&InnerPair>,
    window: Option<i64>,
) -> Result<CovarianceReport> {
    if !same_hopf(&cov.hopf, &left_action.hopf) || !same_hopf(&cov.hopf, &right_action.hopf) {
        return Err(Error::Model("module and algebra actions use different Hopf structures".into()));
    }
    let module = &cov.module;
    if !same_algebra(&left_action.algebra, module.left_algebra())
        || !same_algebra(&right_action.algebra, module.right_algebra())
    {
        return Err(Error::Model("the actions do not act on the module's algebras".into()));
    }
    if let Some(p) = pair {
        if !same_module(&p.module, module) {
            return Err(Error::Model("pairing belongs to a different module".into()));
        }
    }
    let mids = module.basis_indices(window)?;
    let bids = left_action.algebra.basis_indices(window)?;
    let aids = right_action.algebra.basis_indices(window)?;
    let keys = cov.hopf.basis();
    let mut report = CovarianceReport::default();
    for g in &keys {
        let cop = coproduct_key(&cov.hopf, g);
        for &xi in &mids {
            let x = ModElem::basis(module, xi);
            for &bi in &bids {
                let b = left_action.algebra.basis(bi);
                let lhs = cov.act_key(g, &x.left(&b));
                let mut rhs = ModElem::zero(module);
                for ((k1, k2), c) in &cop.terms {
                    let gb = left_action.act_key(k1, &b);
                    rhs = rhs.add(&cov.act_key(k2, &x).left(&gb).scale(c));
                }
                if lhs != rhs {
                    report.left_leibniz.push(format!(
                        "{} on {}·{}: {} vs {}",
                        cov.hopf.label(g),
                        left_action.algebra.label(bi),
                        module.label(xi),
                        lhs,
                        rhs
                    ));
                }
            }
            for &ai in &aids {
                let a = right_action.algebra.basis(ai);
                let lhs = cov.act_key(g, &x.right(&a));
                let mut rhs = ModElem::zero(module);
                for ((k1, k2), c) in &cop.terms {
                    let ga = right_action.act_key(k2, &a);
                    rhs = rhs.add(&cov.act_key(k1, &x).right(&ga).scale(c));
                }
                if lhs != rhs {
                    report.right_leibniz.push(format!(
                        "{} on {}·{}: {} vs {}",
                        cov.hopf.label(g),
                        module.label(xi),
                        right_action.algebra.label(ai),
                        lhs,
                        rhs
                    ));
                }
            }
            if let Some(p) = pair {
                for &yi in &mids {
                    let y = ModElem::basis(module, yi);
                    let lhs = left_action.act_key(g, &p.left_valued(&x, &y));
                    let mut rhs = left_action.algebra.zero();
                    for ((k1, k2), c) in &cop.terms {
                        let twisted = HElem::from_key(&cov.hopf, k2.clone())
                            .antipode()
                            .star();
                        let v = p.left_valued(&cov.act_key(k1, &x), &cov.act(&twisted, &y));
                        rhs = rhs.add(&v.scale(c));
                    }
                    if lhs != rhs {
                        report.left_pairing.push(format!(
                            "{} on <{}, {}>: {} vs {}",
                            cov.hopf.label(g),
                            module.label(xi),
                            module.label(yi),
                            lhs,
                            rhs
                        ));
                    }
                    let lhs = right_action.act_key(g, &p.right_valued(&x, &y));
                    let mut rhs = right_action.algebra.zero();
                    for ((k1, k2), c) in &cop.terms {
                        let twisted = HElem::from_key(&cov.hopf, k1.clone())
                            .antipode()
                            .star();
                        let v = p.right_valued(&cov.act(&twisted, &x), &cov.act_key(k2, &y));
                        rhs = rhs.add(&v.scale(c));
                    }
                    if lhs != rhs {
                        report.right_pairing.push(format!(
                            "{} on <{}, {}>: {} vs {}",
                            cov.hopf.label(g),
                            module.label(xi),
                            module.label(yi),
                            lhs,
                            rhs
                        ));
                    }
                }
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, serde::Serialize)]
pub enum CertLevel {
    Strong,
    Star,
    Ring,
}

/// A certification records which layer of structure has been verified:
/// positivity on top of the products on top of the plain bimodule.
pub struct Certification {
    pub module: Arc<Bimodule>,
    pub level: CertLevel,
    pub pair: Option<InnerPair>,
    pub covariant: bool,
}

impl PartialEq for Certification {
    fn eq(&self, other: &Self) -> bool {
        same_module(&self.module, &other.module)
            && self.level == other.level
            && self.pair == other.pair
            && self.covariant == other.covariant
    }
}

/// Table modules are validated at construction, so the plain level holds
/// by fiat.
pub fn certify_ring(module: &Arc<Bimodule>) -> Certification {
    Certification {
        module: Arc::clone(module),
        level: CertLevel::Ring,
        pair: None,
        covariant: false,
    }
}

pub fn certify_star(pair: &InnerPair, window: Option<i64>) -> Result<Certification> {
    let report = morita_axiom_check(pair, window)?;
    if !report.passed() {
        return Err(Error::Model(format!(
            "pairing fails the equivalence axioms: {report:?}"
        )));
    }
    Ok(Certification {
        module: Arc::clone(&pair.module),
        level: CertLevel::Star,
        pair: Some(pair.clone()),
        covariant: false,
    })
}

pub fn certify_strong(
    pair: &InnerPair,
    max_tuple: usize,
    window: Option<i64>,
) -> Result<Certification> {
    let star = certify_star(pair, window)?;
    let failures = complete_positivity_check(pair, max_tuple, window)?;
    if !failures.is_empty() {
        return Err(Error::Model(format!(
            "pairing is not completely positive: {}",
            failures[0]
        )));
    }
    Ok(Certification {
        level: CertLevel::Strong,
        ..star
    })
}

/// Mark a certification as compatible with a Hopf action.
pub fn with_covariance(cert: Certification, report: &CovarianceReport) -> Result<Certification> {
    if !report.passed() {
        return Err(Error::Model("module structure is not covariant".into()));
    }
    Ok(Certification {
        covariant: true,
        ..cert
    })
}

/// Drop one layer of verified structure.
pub fn forget(cert: &Certification) -> Result<Certification> {
    let (level, pair) = match cert.level {
        CertLevel::Strong => (CertLevel::Star, cert.pair.clone()),
        CertLevel::Star => (CertLevel::Ring, None),
        CertLevel::Ring => {
            return Err(Error::Model("nothing left to forget".into()));
        }
    };
    Ok(Certification {
        module: Arc::clone(&cert.module),
        level,
        pair,
        covariant: cert.covariant,
    })
}

/// Drop structure down to the named level in one step.
pub fn forget_to(cert: &Certification, level: CertLevel) -> Result<Certification> {
    let mut out = Certification {
        module: Arc::clone(&cert.module),
        level: cert.level,
        pair: cert.pair.clone(),
        covariant: cert.covariant,
    };
    while out.level != level {
        out = forget(&out)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{LieAction, LieAlgebra};
    use std::collections::BTreeMap;

    fn s(t: &str) -> Scalar {
        t.parse().unwrap()
    }

    fn functions(n: usize) -> Arc<Algebra> {
        let names = ["p", "q", "r", "s"];
        Algebra::build(ModelSpec::FiniteFunctions {
            points: names[..n].iter().map(|p| p.to_string()).collect(),
        })
        .unwrap()
    }

    #[test]
    fn canonical_self_bimodule_passes_the_axioms() {
        let a = functions(2);
        let module = Bimodule::canonical(&a);
        let pair = InnerPair::canonical(&module).unwrap();
        let report = morita_axiom_check(&pair, None).unwrap();
        assert!(report.passed(), "{report:?}");
        assert!(!report.windowed);
        assert!(complete_positivity_check(&pair, 3, None).unwrap().is_empty());
    }

    #[test]
    fn circle_canonical_bimodule_on_a_window() {
        let a = Algebra::build(ModelSpec::Laurent).unwrap();
        let module = Bimodule::canonical(&a);
        let pair = InnerPair::canonical(&module).unwrap();
        let report = morita_axiom_check(&pair, Some(2)).unwrap();
        assert!(report.passed(), "{report:?}");
        assert!(report.windowed);
    }

    #[test]
    fn column_module_passes_axioms_and_positivity() {
        let a = functions(2);
        let (_, pair) = column_module(&a, 2).unwrap();
        let report = morita_axiom_check(&pair, None).unwrap();
        assert!(report.passed(), "{report:?}");
        assert!(complete_positivity_check(&pair, 3, None).unwrap().is_empty());
    }

    #[test]
    fn corrupted_pairings_fail_with_witnesses() {
        let a = functions(2);
        let module = Bimodule::canonical(&a);
        let pair = InnerPair::canonical(&module).unwrap();
        let (mut right, left) = pair.tables().unwrap();
        // kill one row of the right-valued product
        right[0] = vec![a.zero(), a.zero()];
        right[1][0] = a.zero();
        let broken = InnerPair::from_tables(&module, right, left).unwrap();
        let report = morita_axiom_check(&broken, None).unwrap();
        assert!(!report.nondegenerate.is_empty());
        assert!(report.nondegenerate[0].contains("e_p"));

        let (right, left) = pair.tables().unwrap();
        let negated = InnerPair::from_tables(
            &module,
            right.iter().map(|r| r.iter().map(|v| v.neg()).collect()).collect(),
            left,
        )
        .unwrap();
        let failures = complete_positivity_check(&negated, 1, None).unwrap();
        assert!(!failures.is_empty());
        assert!(failures[0].contains("(e_p)"));
    }

    #[test]
    fn relabeling_modules_and_their_blocks() {
        let a = functions(2);
        let flip = AlgebraMap::permutation(&a, &[1, 0]).unwrap();
        let module = ell(&flip).unwrap();
        assert_eq!(dimension_matrix(&module).unwrap(), vec![vec![0, 1], vec![1, 0]]);
        let id_mod = ell(&AlgebraMap::identity(&a).unwrap()).unwrap();
        assert_eq!(dimension_matrix(&id_mod).unwrap(), vec![vec![1, 0], vec![0, 1]]);
        // the identity module is the canonical bimodule in table form
        assert!(are_isomorphic(&id_mod, &id_mod).unwrap());
        assert!(!are_isomorphic(&module, &id_mod).unwrap());
    }

    #[test]
    fn tensor_multiplies_dimension_matrices() {
        let a = functions(3);
        let sigma = AlgebraMap::permutation(&a, &[1, 2, 0]).unwrap();
        let tau = AlgebraMap::permutation(&a, &[0, 2, 1]).unwrap();
        let m_sigma = ell(&sigma).unwrap();
        let m_tau = ell(&tau).unwrap();
        let t = tensor_over(&m_sigma, &m_tau).unwrap();
        let ds = dimension_matrix(&m_sigma).unwrap();
        let dt = dimension_matrix(&m_tau).unwrap();
        let dprod = dimension_matrix(&t.module).unwrap();
        let mut expect = vec![vec![0usize; 3]; 3];
        for y in 0..3 {
            for x in 0..3 {
                expect[y][x] = (0..3).map(|k| ds[y][k] * dt[k][x]).sum();
            }
        }
        assert_eq!(dprod, expect);
        // composition of the relabelings gives an isomorphic module
        let composed = ell(&sigma.compose(&tau).unwrap()).unwrap();
        assert!(are_isomorphic(&t.module, &composed).unwrap());
        let other = ell(&tau.compose(&sigma).unwrap()).unwrap();
        assert!(!are_isomorphic(&t.module, &other).unwrap());
    }

    #[test]
    fn unit_law_is_an_isometry() {
        let a = functions(2);
        let flip = AlgebraMap::permutation(&a, &[1, 0]).unwrap();
        let (_, pair) = ell_pair(&flip).unwrap();
        let report = right_unit_check(&pair).unwrap();
        assert!(report.passed(), "{report:?}");
        // and for the canonical bimodule itself
        let module = Bimodule::canonical(&a);
        let pair = InnerPair::canonical(&module).unwrap();
        let report = right_unit_check(&pair).unwrap();
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn relabeling_pairs_are_equivalences() {
        let a = functions(3);
        let sigma = AlgebraMap::permutation(&a, &[1, 2, 0]).unwrap();
        let (_, pair) = ell_pair(&sigma).unwrap();
        let report = morita_axiom_check(&pair, None).unwrap();
        assert!(report.passed(), "{report:?}");
        assert!(complete_positivity_check(&pair, 3, None).unwrap().is_empty());
    }

    #[test]
    fn induced_tensor_pair_is_again_an_equivalence() {
        let a = functions(2);
        let sigma = AlgebraMap::permutation(&a, &[1, 0]).unwrap();
        let (m_sigma, p_sigma) = ell_pair(&sigma).unwrap();
        let id = AlgebraMap::identity(&a).unwrap();
        let (m_id, p_id) = ell_pair(&id).unwrap();
        let t = tensor_over(&m_sigma, &m_id).unwrap();
        let p_t = rieffel_tensor(&t, &p_sigma, &p_id).unwrap();
        let report = morita_axiom_check(&p_t, None).unwrap();
        assert!(report.passed(), "{report:?}");
        assert!(complete_positivity_check(&p_t, 3, None).unwrap().is_empty());
    }

    #[test]
    fn rebracketing_is_a_bijective_isometry() {
        let a = functions(2);
        let sigma = AlgebraMap::permutation(&a, &[1, 0]).unwrap();
        let (mf, pf) = ell_pair(&sigma).unwrap();
        let (me, pe) = ell_pair(&sigma).unwrap();
        let (md, pd) = ell_pair(&AlgebraMap::identity(&a).unwrap()).unwrap();
        let report = associator_check(&mf, &me, &md, &pf, &pe, &pd).unwrap();
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn column_times_conjugate_recovers_the_matrix_products() {
        let a = functions(1);
        let (col, pcol) = column_module(&a, 2).unwrap();
        let (conj, pconj) = conjugate_module(&pcol).unwrap();
        let t = tensor_over(&col, &conj).unwrap();
        let b = col.left_algebra();
        assert!(are_isomorphic(&t.module, &Bimodule::canonical(b)).unwrap());
        let p_t = rieffel_tensor(&t, &pcol, &pconj).unwrap();
        // the left-valued product of pure tensors e_i⊗conj(e_j) matches
        // the canonical product of the matrix units E_i1 E_j1* etc.
        for i in 0..2i64 {
            for j in 0..2i64 {
                for k in 0..2i64 {
                    for l in 0..2i64 {
                        let x = t.pure(&ModElem::basis(&col, i), &ModElem::basis(&conj, j));
                        let y = t.pure(&ModElem::basis(&col, k), &ModElem::basis(&conj, l));
                        let got = p_t.left_valued(&x, &y);
                        let expect = if j == l {
                            b.basis(i * 2 + k)
                        } else {
                            b.zero()
                        };
                        assert_eq!(got, expect, "({i},{j},{k},{l})");
                    }
                }
            }
        }
    }

    fn rotation_action() -> HAction {
        let alg = Algebra::build(ModelSpec::Laurent).unwrap();
        let lie = LieAlgebra::abelian(1);
        let act = LieAction::new(
            Arc::clone(&lie),
            alg,
            vec![Operator::LaurentMode {
                scale: s("i"),
                shift: 0,
            }],
        )
        .unwrap();
        let hopf = Hopf::uea(lie, 4).unwrap();
        HAction::from_lie(hopf, act).unwrap()
    }

    #[test]
    fn rotation_lift_is_covariant() {
        let action = rotation_action();
        let cov = CovariantStructure::canonical_lift(&action).unwrap();
        let pair = InnerPair::canonical(&cov.module).unwrap();
        let report = covariance_check(&cov, &action, &action, Some(&pair), Some(2)).unwrap();
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn central_twists_stay_covariant() {
        let action = rotation_action();
        let base = CovariantStructure::canonical_lift(&action).unwrap();
        let twisted_ops: Vec<ModOp> = base
            .ops
            .iter()
            .map(|op| {
                let ModOp::SelfOp { base: b, .. } = op else { unreachable!() };
                ModOp::SelfOp {
                    multiplier: action.algebra.unit().scale(&s("i")),
                    base: b.clone(),
                }
            })
            .collect();
        let cov = CovariantStructure::new(&action.hopf, &base.module, twisted_ops).unwrap();
        let pair = InnerPair::canonical(&cov.module).unwrap();
        let report = covariance_check(&cov, &action, &action, Some(&pair), Some(2)).unwrap();
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn zeroed_module_operator_breaks_the_leibniz_rule() {
        let alg = Algebra::build(ModelSpec::TruncatedPoly { order: 3 }).unwrap();
        let lie = LieAlgebra::abelian(1);
        let mut images = BTreeMap::new();
        for k in 1..3i64 {
            images.insert(k, alg.basis(k).scale(&Scalar::from_int(k)));
        }
        let act = LieAction::new(
            Arc::clone(&lie),
            Arc::clone(&alg),
            vec![Operator::Table(images.clone())],
        )
        .unwrap();
        let hopf = Hopf::uea(lie, 4).unwrap();
        let action = HAction::from_lie(hopf, act).unwrap();
        let module = Bimodule::canonical(&alg);
        // module table copies the action but forgets what happens to x^2
        let mut table = BTreeMap::new();
        table.insert(1, images[&1].coeffs().clone());
        let cov = CovariantStructure::new(&action.hopf, &module, vec![ModOp::Table(table)]).unwrap();
        let report = covariance_check(&cov, &action, &action, None, None).unwrap();
        assert!(!report.right_leibniz.is_empty());
        assert!(report.right_leibniz[0].contains("x"), "{report:?}");
    }

    #[test]
    fn group_relabeling_is_covariant() {
        let a = functions(2);
        let hopf = Hopf::group(vec![vec![0, 1], vec![1, 0]], None).unwrap();
        let ops = vec![
            Operator::Table((0..2i64).map(|i| (i, a.basis(i))).collect()),
            Operator::Table([(0i64, a.basis(1)), (1i64, a.basis(0))].into_iter().collect()),
        ];
        let action = HAction::from_group(hopf, Arc::clone(&a), ops).unwrap();
        let cov = CovariantStructure::canonical_lift(&action).unwrap();
        let pair = InnerPair::canonical(&cov.module).unwrap();
        let report = covariance_check(&cov, &action, &action, Some(&pair), None).unwrap();
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn certification_levels_forget_consistently() {
        let a = functions(2);
        let (_, pair) = column_module(&a, 2).unwrap();
        let strong = certify_strong(&pair, 3, None).unwrap();
        assert_eq!(strong.level, CertLevel::Strong);
        let star = forget(&strong).unwrap();
        assert_eq!(star.level, CertLevel::Star);
        assert!(star.pair.is_some());
        let ring = forget(&star).unwrap();
        assert_eq!(ring.level, CertLevel::Ring);
        assert!(ring.pair.is_none());
        // two single steps agree with the one-shot descent
        assert!(forget_to(&strong, CertLevel::Ring).unwrap() == ring);
        assert!(forget(&ring).is_err());
    }

    #[test]
    fn negated_pair_is_star_but_not_strong() {
        let a = functions(2);
        let module = Bimodule::canonical(&a);
        let pair = InnerPair::canonical(&module).unwrap();
        let (right, left) = pair.tables().unwrap();
        let negated = InnerPair::from_tables(
            &module,
            right.iter().map(|r| r.iter().map(|v| v.neg()).collect()).collect(),
            left.iter().map(|r| r.iter().map(|v| v.neg()).collect()).collect(),
        )
        .unwrap();
        assert!(certify_star(&negated, None).is_ok());
        assert!(certify_strong(&negated, 2, None).is_err());
    }
}
