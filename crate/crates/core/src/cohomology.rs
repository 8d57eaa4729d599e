//! Chevalley-Eilenberg cochains in degrees 0 to 2 with coefficients in
//! the anti-Hermitian central part of a module algebra, and the exact
//! computation of Z¹, B¹ and H¹.
//!
//! Anti-Hermitian elements form a real, not complex, subspace, so all
//! linear algebra here runs over the rationals on a realified coordinate
//! system: an element supported on the window is a vector of (re, im)
//! pairs. The H¹ dimension is cross-checkable against an independent
//! integer-arithmetic rank oracle (`h1_dimension_oracle`).

use std::collections::BTreeMap;
use std::sync::Arc;

use num::bigint::BigInt;
use num::{One, Zero};

use crate::algebra::{center_basis, Algebra, Element};
use crate::intlin::bareiss_rank;
use crate::lie::LieAction;
use crate::linalg::{Mat, Subspace};
use crate::scalar::{Rat, Scalar};
use crate::{Error, Result};

/// The coefficient space: anti-Hermitian central elements inside the
/// window, as a rational vector space with a canonical basis.
pub struct CoeffSpace {
    pub algebra: Arc<Algebra>,
    pub window: Option<i64>,
    indices: Vec<i64>,
    pub basis: Vec<Element>,
    /// Realified basis vectors as columns, for coordinate solving.
    columns: Mat<Rat>,
}

impl CoeffSpace {
    pub fn new(algebra: &Arc<Algebra>, window: Option<i64>) -> Result<Self> {
        let indices = algebra.basis_indices(window)?;
        let central = center_basis(algebra, window)?;

        // realified center basis {z_j, i·z_j}; anti-Hermitian means
        // v + v* = 0, a rational-linear condition
        let mut spanning = Vec::with_capacity(2 * central.len());
        for z in &central {
            spanning.push(z.clone());
            spanning.push(z.scale(&Scalar::i()));
        }
        let mut rows = Vec::new();
        for v in &spanning {
            rows.push(realify(&v.add(&v.star()), &indices)?);
        }
        // kernel of the map (coeffs over spanning) -> v + v*
        let constraint = Mat::from_rows(rows, 2 * indices.len()).transpose();
        let kernel = constraint.kernel_basis();
        let mut basis = Vec::new();
        for combo in kernel {
            let mut e = algebra.zero();
            for (t, c) in combo.iter().enumerate() {
                if !c.is_zero() {
                    e = e.add(&spanning[t].scale(&Scalar::from_rat(c.clone())));
                }
            }
            basis.push(e);
        }
        let mut cols = Vec::new();
        for b in &basis {
            cols.push(realify(b, &indices)?);
        }
        let columns = Mat::from_rows(cols, 2 * indices.len()).transpose();
        Ok(CoeffSpace {
            algebra: Arc::clone(algebra),
            window,
            indices,
            basis,
            columns,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Rational coordinates of an element in the coefficient basis;
    /// errors if the element lies outside the space or the window.
    pub fn coords(&self, a: &Element) -> Result<Vec<Rat>> {
        let v = realify(a, &self.indices)?;
        self.columns.solve(&v).ok_or_else(|| {
            Error::Model(format!(
                "element is not an anti-Hermitian central combination on the window: {a}"
            ))
        })
    }

    pub fn contains(&self, a: &Element) -> bool {
        self.coords(a).is_ok()
    }

    pub fn from_coords(&self, coords: &[Rat]) -> Element {
        let mut e = self.algebra.zero();
        for (j, c) in coords.iter().enumerate() {
            if !c.is_zero() {
                e = e.add(&self.basis[j].scale(&Scalar::from_rat(c.clone())));
            }
        }
        e
    }
}

/// (re, im) coordinates of an element over the given basis indices;
/// errors on support outside them.
fn realify(a: &Element, indices: &[i64]) -> Result<Vec<Rat>> {
    let position: BTreeMap<i64, usize> =
        indices.iter().enumerate().map(|(p, &i)| (i, p)).collect();
    let mut v = vec![Rat::zero(); 2 * indices.len()];
    for (k, c) in a.coeffs() {
        let Some(&p) = position.get(k) else {
            return Err(Error::Model(format!(
                "element has support outside the window: {a}"
            )));
        };
        v[2 * p] = c.re.clone();
        v[2 * p + 1] = c.im.clone();
    }
    Ok(v)
}

/// (d⁰a)(ξᵢ) = Dᵢ a.
pub fn ce_d0(action: &LieAction, a: &Element) -> Vec<Element> {
    (0..action.lie.dim).map(|i| action.apply_gen(i, a)).collect()
}

/// (d¹α)(ξᵢ,ξⱼ) = Dᵢ α(ξⱼ) − Dⱼ α(ξᵢ) − α([ξᵢ,ξⱼ]), stored on i < j.
pub fn ce_d1(
    action: &LieAction,
    alpha: &[Element],
) -> Result<BTreeMap<(usize, usize), Element>> {
    let d = action.lie.dim;
    if alpha.len() != d {
        return Err(Error::Model(format!(
            "degree-1 cochain needs {d} values, got {}",
            alpha.len()
        )));
    }
    let mut out = BTreeMap::new();
    for i in 0..d {
        for j in i + 1..d {
            let mut v = action
                .apply_gen(i, &alpha[j])
                .sub(&action.apply_gen(j, &alpha[i]));
            for (k, c) in action.lie.bracket(i, j).iter().enumerate() {
                if !c.is_zero() {
                    v = v.sub(&alpha[k].scale(c));
                }
            }
            out.insert((i, j), v);
        }
    }
    Ok(out)
}

pub struct CohomologyResult {
    pub space: CoeffSpace,
    pub dim_g: usize,
    /// Cocycle basis, each entry one value per generator.
    pub z1: Vec<Vec<Element>>,
    /// Coboundary basis with an explicit degree-0 preimage each.
    pub b1: Vec<(Vec<Element>, Element)>,
    /// Representatives of a basis of the quotient.
    pub h1: Vec<Vec<Element>>,
    b1_sub: Subspace<Rat>,
    /// Reduced representative coordinate rows, in reduced echelon form.
    h1_rows: Mat<Rat>,
    z1_sub: Subspace<Rat>,
}

impl CohomologyResult {
    pub fn z1_dim(&self) -> usize {
        self.z1.len()
    }

    pub fn b1_dim(&self) -> usize {
        self.b1.len()
    }

    pub fn h1_dim(&self) -> usize {
        self.h1.len()
    }

    /// Coordinates of a degree-1 cochain in the C¹ = (coefficient space)^d
    /// coordinate system.
    pub fn cochain_coords(&self, alpha: &[Element]) -> Result<Vec<Rat>> {
        if alpha.len() != self.dim_g {
            return Err(Error::Model(format!(
                "degree-1 cochain needs {} values, got {}",
                self.dim_g,
                alpha.len()
            )));
        }
        let mut v = Vec::with_capacity(self.dim_g * self.space.dim());
        for a in alpha {
            v.extend(self.space.coords(a)?);
        }
        Ok(v)
    }

    pub fn cochain_from_coords(&self, v: &[Rat]) -> Vec<Element> {
        let m = self.space.dim();
        (0..self.dim_g)
            .map(|g| self.space.from_coords(&v[g * m..(g + 1) * m]))
            .collect()
    }

    pub fn is_cocycle(&self, alpha: &[Element]) -> Result<bool> {
        Ok(self.z1_sub.contains(&self.cochain_coords(alpha)?))
    }

    /// Class of a cocycle in H¹ coordinates over the representative basis.
    pub fn h1_coords(&self, alpha: &[Element]) -> Result<Vec<Rat>> {
        let v = self.cochain_coords(alpha)?;
        if !self.z1_sub.contains(&v) {
            return Err(Error::Model("cochain is not a cocycle".into()));
        }
        let mut residual = self.b1_sub.reduce(&v);
        let mut coords = Vec::with_capacity(self.h1_rows.rows);
        for r in 0..self.h1_rows.rows {
            let pivot = (0..self.h1_rows.cols)
                .find(|&c| !self.h1_rows.at(r, c).is_zero())
                .expect("representative rows are nonzero");
            let c = residual[pivot].clone();
            for col in 0..self.h1_rows.cols {
                let sub = &c * self.h1_rows.at(r, col);
                residual[col] = residual[col].clone() - sub;
            }
            coords.push(c);
        }
        if residual.iter().any(|c| !c.is_zero()) {
            return Err(Error::Internal(
                "cocycle does not reduce into the representative span".into(),
            ));
        }
        Ok(coords)
    }
}

/// Exact Z¹, B¹, H¹ over the rationals on the windowed coefficient space.
pub fn h1(action: &LieAction, window: Option<i64>) -> Result<CohomologyResult> {
    let space = CoeffSpace::new(&action.algebra, window)?;
    let d = action.lie.dim;
    let m = space.dim();
    if m == 0 {
        return Err(Error::Model(
            "coefficient space is empty on this window".into(),
        ));
    }
    let c1 = d * m;

    // d⁰ as an m -> c1 matrix, columns indexed by coefficient basis
    let mut d0_cols = Vec::with_capacity(m);
    for b in &space.basis {
        let image = ce_d0(action, b);
        let mut col = Vec::with_capacity(c1);
        for component in &image {
            col.extend(space.coords(component).map_err(|_| {
                Error::Model(format!(
                    "the action leaves the coefficient window on {b}; enlarge the window"
                ))
            })?);
        }
        d0_cols.push(col);
    }
    let d0 = Mat::from_rows(d0_cols, c1).transpose();

    // d¹ as a c1 -> pairs·m matrix
    let pairs: Vec<(usize, usize)> = (0..d)
        .flat_map(|i| (i + 1..d).map(move |j| (i, j)))
        .collect();
    let c2 = pairs.len() * m;
    let mut d1_cols = Vec::with_capacity(c1);
    for g in 0..d {
        for b in &space.basis {
            let mut alpha = vec![action.algebra.zero(); d];
            alpha[g] = b.clone();
            let image = ce_d1(action, &alpha)?;
            let mut col = Vec::with_capacity(c2);
            for pair in &pairs {
                col.extend(space.coords(&image[pair]).map_err(|_| {
                    Error::Model(format!(
                        "the action leaves the coefficient window on {b}; enlarge the window"
                    ))
                })?);
            }
            d1_cols.push(col);
        }
    }
    let d1 = Mat::from_rows(d1_cols, c2).transpose();

    let z1_vectors = if c2 == 0 {
        // no pairs: every cochain is a cocycle
        (0..c1)
            .map(|t| {
                let mut v = vec![Rat::zero(); c1];
                v[t] = Rat::one();
                v
            })
            .collect()
    } else {
        d1.kernel_basis()
    };
    let z1_sub = Subspace::new(c1, &z1_vectors);

    let image = d0.image_with_preimages();
    let b1_vectors: Vec<Vec<Rat>> = image.iter().map(|(w, _)| w.clone()).collect();
    let b1_sub = Subspace::new(c1, &b1_vectors);

    // d²=0: every coboundary must be a cocycle
    for w in &b1_vectors {
        if !z1_sub.contains(w) {
            return Err(Error::Internal(
                "a coboundary failed the cocycle condition".into(),
            ));
        }
    }

    // quotient representatives: reduce the cocycle basis against B¹ and
    // re-echelonize what survives
    let reduced: Vec<Vec<Rat>> = z1_vectors
        .iter()
        .map(|v| b1_sub.reduce(v))
        .filter(|v| v.iter().any(|c| !c.is_zero()))
        .collect();
    let (h1_rows_full, h1_pivots) = Mat::from_rows(reduced, c1).rref();
    let h1_rows = Mat::from_rows(
        (0..h1_pivots.len())
            .map(|r| h1_rows_full.row(r).to_vec())
            .collect(),
        c1,
    );

    let mk_cochain = |v: &[Rat]| -> Vec<Element> {
        (0..d)
            .map(|g| space.from_coords(&v[g * m..(g + 1) * m]))
            .collect()
    };
    let z1 = z1_vectors.iter().map(|v| mk_cochain(v)).collect();
    let b1 = image
        .iter()
        .map(|(w, x)| (mk_cochain(w), space.from_coords(x)))
        .collect();
    let h1 = (0..h1_pivots.len())
        .map(|r| mk_cochain(h1_rows.row(r)))
        .collect();

    Ok(CohomologyResult {
        space,
        dim_g: d,
        z1,
        b1,
        h1,
        b1_sub,
        h1_rows,
        z1_sub,
    })
}

/// Independent H¹ dimension via dense integer matrices and fraction-free
/// rank computation: dim ker d¹ − rank d⁰ with ranks over cleared
/// denominators.
pub fn h1_dimension_oracle(action: &LieAction, window: Option<i64>) -> Result<usize> {
    let space = CoeffSpace::new(&action.algebra, window)?;
    let d = action.lie.dim;
    let m = space.dim();
    let c1 = d * m;

    let mut d0_dense: Vec<Vec<Rat>> = vec![vec![Rat::zero(); m]; c1];
    for (j, b) in space.basis.iter().enumerate() {
        for (i, component) in ce_d0(action, b).iter().enumerate() {
            for (r, c) in space.coords(component)?.into_iter().enumerate() {
                d0_dense[i * m + r][j] = c;
            }
        }
    }

    let pairs: Vec<(usize, usize)> = (0..d)
        .flat_map(|i| (i + 1..d).map(move |j| (i, j)))
        .collect();
    let c2 = pairs.len() * m;
    let mut d1_dense: Vec<Vec<Rat>> = vec![vec![Rat::zero(); c1]; c2];
    for g in 0..d {
        for (j, b) in space.basis.iter().enumerate() {
            let mut alpha = vec![action.algebra.zero(); d];
            alpha[g] = b.clone();
            let image = ce_d1(action, &alpha)?;
            for (p, pair) in pairs.iter().enumerate() {
                for (r, c) in space.coords(&image[pair])?.into_iter().enumerate() {
                    d1_dense[p * m + r][g * m + j] = c;
                }
            }
        }
    }

    let rank0 = bareiss_rank(clear_denominators(&d0_dense));
    let rank1 = bareiss_rank(clear_denominators(&d1_dense));
    Ok(c1 - rank1 - rank0)
}

fn clear_denominators(rows: &[Vec<Rat>]) -> Vec<Vec<BigInt>> {
    rows.iter()
        .map(|row| {
            let mut lcm = BigInt::one();
            for c in row {
                lcm = num::integer::lcm(lcm, c.denom().clone());
            }
            row.iter()
                .map(|c| c.numer() * (&lcm / c.denom()))
                .collect()
        })
        .collect()
}
