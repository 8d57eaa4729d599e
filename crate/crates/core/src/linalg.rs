//! Exact linear algebra over the rationals and the Gaussian rationals.
//!
//! Everything is dense row reduction with exact pivots: reduced row echelon
//! form with an optional transform matrix, kernels, solving, image bases
//! with preimage tracking, quotient spaces by a relation span, and a
//! pivoted LDL* test deciding positive semidefiniteness of Hermitian
//! matrices without eigenvalues.

use num::{One, Signed, Zero};
use std::fmt;

use crate::scalar::{Rat, Scalar};

/// A field with decidable equality and exact arithmetic.
pub trait ExactField: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse of a nonzero element.
    fn invert(&self) -> Self;
}

impl ExactField for Rat {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self.clone()
    }
    fn invert(&self) -> Self {
        self.recip()
    }
}

impl ExactField for Scalar {
    fn zero() -> Self {
        Scalar::zero()
    }
    fn one() -> Self {
        Scalar::one()
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self.clone() + other
    }
    fn sub(&self, other: &Self) -> Self {
        self.clone() - other.clone()
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self.clone()
    }
    fn invert(&self) -> Self {
        self.inv()
    }
}

/// Dense row-major matrix over an exact field.
#[derive(Clone, PartialEq)]
pub struct Mat<F> {
    pub rows: usize,
    pub cols: usize,
    data: Vec<F>,
}

impl<F: ExactField> Mat<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![F::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for k in 0..n {
            *m.at_mut(k, k) = F::one();
        }
        m
    }

    /// Panics on ragged input.
    pub fn from_rows(rows: Vec<Vec<F>>, cols: usize) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix row");
            data.extend(r);
        }
        Mat {
            rows: n,
            cols,
            data,
        }
    }

    pub fn at(&self, i: usize, j: usize) -> &F {
        &self.data[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut F {
        &mut self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Mat<F> {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *t.at_mut(j, i) = self.at(i, j).clone();
            }
        }
        t
    }

    pub fn matmul(&self, other: &Mat<F>) -> Mat<F> {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = F::add(out.at(i, j), &F::mul(a, other.at(k, j)));
                    *out.at_mut(i, j) = v;
                }
            }
        }
        out
    }

    /// Matrix applied to a column vector.
    pub fn apply(&self, v: &[F]) -> Vec<F> {
        assert_eq!(self.cols, v.len(), "apply shape mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = F::zero();
                for j in 0..self.cols {
                    acc = F::add(&acc, &F::mul(self.at(i, j), &v[j]));
                }
                acc
            })
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn scale_row(&mut self, i: usize, c: &F) {
        for j in 0..self.cols {
            let v = F::mul(self.at(i, j), c);
            *self.at_mut(i, j) = v;
        }
    }

    /// row[i] -= c * row[k]
    fn sub_scaled_row(&mut self, i: usize, k: usize, c: &F) {
        if c.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = F::sub(self.at(i, j), &F::mul(c, self.at(k, j)));
            *self.at_mut(i, j) = v;
        }
    }

    /// Reduced row echelon form, pivot columns in order.
    pub fn rref(&self) -> (Mat<F>, Vec<usize>) {
        let mut m = self.clone();
        let pivots = rref_in_place(&mut m, None);
        (m, pivots)
    }

    /// As `rref`, also returning an invertible `T` with `T * self = rref`.
    pub fn rref_with_transform(&self) -> (Mat<F>, Mat<F>, Vec<usize>) {
        let mut m = self.clone();
        let mut t = Mat::identity(self.rows);
        let pivots = rref_in_place(&mut m, Some(&mut t));
        (m, t, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the null space of `self` acting on column vectors.
    pub fn kernel_basis(&self) -> Vec<Vec<F>> {
        let (r, pivots) = self.rref();
        let pivot_of_col: Vec<Option<usize>> = {
            let mut v = vec![None; self.cols];
            for (row, &col) in pivots.iter().enumerate() {
                v[col] = Some(row);
            }
            v
        };
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_of_col[free].is_some() {
                continue;
            }
            let mut x = vec![F::zero(); self.cols];
            x[free] = F::one();
            for (row, &col) in pivots.iter().enumerate() {
                x[col] = r.at(row, free).neg();
            }
            basis.push(x);
        }
        basis
    }

    /// One solution of `self * x = b`, if consistent.
    pub fn solve(&self, b: &[F]) -> Option<Vec<F>> {
        assert_eq!(self.rows, b.len(), "solve shape mismatch");
        let mut aug = Mat::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *aug.at_mut(i, j) = self.at(i, j).clone();
            }
            *aug.at_mut(i, self.cols) = b[i].clone();
        }
        let (r, pivots) = aug.rref();
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![F::zero(); self.cols];
        for (row, &col) in pivots.iter().enumerate() {
            x[col] = r.at(row, self.cols).clone();
        }
        Some(x)
    }

    /// Basis of the column space together with preimages: each returned
    /// pair `(w, x)` satisfies `self * x = w`, and the `w` span the image.
    pub fn image_with_preimages(&self) -> Vec<(Vec<F>, Vec<F>)> {
        let t = self.transpose();
        let (r, tr, pivots) = t.rref_with_transform();
        (0..pivots.len())
            .map(|i| {
                let image = r.row(i).to_vec();
                let preimage = tr.row(i).to_vec();
                (image, preimage)
            })
            .collect()
    }
}

fn rref_in_place<F: ExactField>(m: &mut Mat<F>, mut transform: Option<&mut Mat<F>>) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..m.cols {
        let Some(p) = (row..m.rows).find(|&i| !m.at(i, col).is_zero()) else {
            continue;
        };
        m.swap_rows(row, p);
        if let Some(t) = transform.as_deref_mut() {
            t.swap_rows(row, p);
        }
        let inv = m.at(row, col).invert();
        m.scale_row(row, &inv);
        if let Some(t) = transform.as_deref_mut() {
            t.scale_row(row, &inv);
        }
        for i in 0..m.rows {
            if i == row {
                continue;
            }
            let c = m.at(i, col).clone();
            m.sub_scaled_row(i, row, &c);
            if let Some(t) = transform.as_deref_mut() {
                t.sub_scaled_row(i, row, &c);
            }
        }
        pivots.push(col);
        row += 1;
        if row == m.rows {
            break;
        }
    }
    pivots
}

impl<F: fmt::Debug> fmt::Debug for Mat<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[i * self.cols..(i + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}

/// Row span with decidable membership, built once from spanning vectors.
#[derive(Clone, Debug)]
pub struct Subspace<F> {
    pub ambient: usize,
    rref: Mat<F>,
    pivots: Vec<usize>,
}

impl<F: ExactField> Subspace<F> {
    pub fn new(ambient: usize, vectors: &[Vec<F>]) -> Self {
        let m = Mat::from_rows(vectors.to_vec(), ambient);
        let (rref, pivots) = m.rref();
        Subspace {
            ambient,
            rref,
            pivots,
        }
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    /// Residual of `v` after eliminating every pivot coordinate; zero iff
    /// `v` lies in the span.
    pub fn reduce(&self, v: &[F]) -> Vec<F> {
        assert_eq!(v.len(), self.ambient);
        let mut w = v.to_vec();
        for (row, &col) in self.pivots.iter().enumerate() {
            let c = w[col].clone();
            if c.is_zero() {
                continue;
            }
            for j in 0..self.ambient {
                w[j] = F::sub(&w[j], &F::mul(&c, self.rref.at(row, j)));
            }
        }
        w
    }

    pub fn contains(&self, v: &[F]) -> bool {
        self.reduce(v).iter().all(|c| c.is_zero())
    }

    pub fn basis(&self) -> Vec<Vec<F>> {
        (0..self.dim()).map(|i| self.rref.row(i).to_vec()).collect()
    }
}

/// The quotient of `F^n` by a relation span, with explicit project/embed.
///
/// `project` sends a vector to its coordinates in the quotient basis;
/// `embed` picks the canonical representative of a quotient basis vector.
/// `project(embed(k))` is the `k`-th unit vector, and `project(v) = 0`
/// exactly when `v` lies in the relation span.
#[derive(Clone, Debug)]
pub struct Quotient<F> {
    relations: Subspace<F>,
    free: Vec<usize>,
}

impl<F: ExactField> Quotient<F> {
    pub fn new(ambient: usize, relations: &[Vec<F>]) -> Self {
        let relations = Subspace::new(ambient, relations);
        let pivot_set: Vec<usize> = relations.pivots.clone();
        let free = (0..ambient).filter(|j| !pivot_set.contains(j)).collect();
        Quotient { relations, free }
    }

    pub fn dim(&self) -> usize {
        self.free.len()
    }

    pub fn ambient(&self) -> usize {
        self.relations.ambient
    }

    pub fn project(&self, v: &[F]) -> Vec<F> {
        let w = self.relations.reduce(v);
        self.free.iter().map(|&j| w[j].clone()).collect()
    }

    pub fn embed(&self, k: usize) -> Vec<F> {
        let mut v = vec![F::zero(); self.relations.ambient];
        v[self.free[k]] = F::one();
        v
    }
}

/// Is the matrix equal to its conjugate transpose?
pub fn is_hermitian(m: &Mat<Scalar>) -> bool {
    if m.rows != m.cols {
        return false;
    }
    for i in 0..m.rows {
        for j in 0..m.cols {
            if *m.at(i, j) != m.at(j, i).conj() {
                return false;
            }
        }
    }
    true
}

/// Exact positive-semidefiniteness of a Hermitian matrix.
///
/// Pivoted LDL* over the Gaussian rationals: a zero diagonal pivot forces
/// its whole row and column to vanish in any PSD matrix, a negative pivot
/// refutes, and a positive pivot passes to the Schur complement.
pub fn hermitian_is_psd(m: &Mat<Scalar>) -> bool {
    debug_assert!(is_hermitian(m));
    let mut work = m.clone();
    let mut active: Vec<usize> = (0..m.rows).collect();
    while let Some(&k) = active.first() {
        let d = work.at(k, k).clone();
        if !Zero::is_zero(&d.im) || d.re.is_negative() {
            return false;
        }
        if Zero::is_zero(&d.re) {
            if active.iter().any(|&j| !work.at(k, j).is_zero()) {
                return false;
            }
            active.remove(0);
            continue;
        }
        let dinv = d.inv();
        for &i in &active[1..] {
            for &j in &active[1..] {
                let corr = &(&work.at(i, k).clone() * &dinv) * work.at(k, j);
                let v = work.at(i, j).clone() - corr;
                *work.at_mut(i, j) = v;
            }
        }
        active.remove(0);
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rq(n: i64, d: i64) -> Rat {
        Rat::new(n.into(), d.into())
    }

    fn mat_q(rows: &[&[i64]]) -> Mat<Rat> {
        Mat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| rq(v, 1)).collect())
                .collect(),
            rows[0].len(),
        )
    }

    #[test]
    fn rref_and_rank() {
        let m = mat_q(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        let (r, pivots) = m.rref();
        assert_eq!(pivots, vec![0, 1]);
        assert_eq!(m.rank(), 2);
        assert_eq!(*r.at(0, 0), rq(1, 1));
        assert_eq!(*r.at(0, 1), rq(0, 1));
    }

    #[test]
    fn transform_reproduces_rref() {
        let m = mat_q(&[&[0, 1, 1], &[2, 0, 4], &[2, 1, 5]]);
        let (r, t, _) = m.rref_with_transform();
        assert_eq!(t.matmul(&m), r);
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        let m = mat_q(&[&[1, 2, 3], &[2, 4, 6]]);
        let basis = m.kernel_basis();
        assert_eq!(basis.len(), 2);
        for v in &basis {
            assert!(m.apply(v).iter().all(|c| Zero::is_zero(c)));
        }
    }

    #[test]
    fn solve_finds_solutions_and_detects_inconsistency() {
        let m = mat_q(&[&[1, 1], &[1, -1]]);
        let x = m.solve(&[rq(3, 1), rq(1, 1)]).unwrap();
        assert_eq!(x, vec![rq(2, 1), rq(1, 1)]);
        let singular = mat_q(&[&[1, 1], &[2, 2]]);
        assert!(singular.solve(&[rq(0, 1), rq(1, 1)]).is_none());
    }

    #[test]
    fn image_preimages_hit_their_images() {
        let m = mat_q(&[&[1, 2, 0], &[0, 0, 1], &[1, 2, 1]]);
        let pairs = m.image_with_preimages();
        assert_eq!(pairs.len(), 2);
        for (w, x) in pairs {
            assert_eq!(m.apply(&x), w);
        }
    }

    #[test]
    fn quotient_projects_relations_to_zero() {
        let rels = vec![vec![rq(1, 1), rq(-1, 1), rq(0, 1)]];
        let q = Quotient::new(3, &rels);
        assert_eq!(q.dim(), 2);
        assert!(q
            .project(&[rq(5, 1), rq(-5, 1), rq(0, 1)])
            .iter()
            .all(|c| Zero::is_zero(c)));
        for k in 0..q.dim() {
            let coords = q.project(&q.embed(k));
            for (j, c) in coords.iter().enumerate() {
                assert_eq!(Zero::is_zero(c), j != k);
            }
        }
    }

    #[test]
    fn psd_accepts_gram_and_rejects_indefinite() {
        let s = |t: &str| t.parse::<Scalar>().unwrap();
        let gram = Mat::from_rows(
            vec![
                vec![s("2"), s("1+i")],
                vec![s("1-i"), s("3")],
            ],
            2,
        );
        assert!(is_hermitian(&gram));
        assert!(hermitian_is_psd(&gram));

        let indef = Mat::from_rows(
            vec![
                vec![s("1"), s("2")],
                vec![s("2"), s("1")],
            ],
            2,
        );
        assert!(is_hermitian(&indef));
        assert!(!hermitian_is_psd(&indef));

        let zero_pivot_bad = Mat::from_rows(
            vec![
                vec![s("0"), s("1")],
                vec![s("1"), s("1")],
            ],
            2,
        );
        assert!(!hermitian_is_psd(&zero_pivot_bad));

        let psd_rank_one = Mat::from_rows(
            vec![
                vec![s("1"), s("i")],
                vec![s("-i"), s("1")],
            ],
            2,
        );
        assert!(hermitian_is_psd(&psd_rank_one));
    }

    proptest! {
        #[test]
        fn rref_is_idempotent(entries in proptest::collection::vec(-5i64..5, 12)) {
            let rows: Vec<Vec<Rat>> = entries
                .chunks(4)
                .map(|c| c.iter().map(|&v| rq(v, 1)).collect())
                .collect();
            let m = Mat::from_rows(rows, 4);
            let (r, p1) = m.rref();
            let (rr, p2) = r.rref();
            prop_assert_eq!(r, rr);
            prop_assert_eq!(p1, p2);
        }

        #[test]
        fn rank_kernel_dimension_theorem(entries in proptest::collection::vec(-4i64..4, 12)) {
            let rows: Vec<Vec<Rat>> = entries
                .chunks(4)
                .map(|c| c.iter().map(|&v| rq(v, 1)).collect())
                .collect();
            let m = Mat::from_rows(rows, 4);
            prop_assert_eq!(m.rank() + m.kernel_basis().len(), 4);
        }

        #[test]
        fn gram_matrices_are_psd(entries in proptest::collection::vec(-3i64..3, 6)) {
            // a^* a over the Gaussian rationals, built from a random 1x3 of
            // complex integers folded into a 3x3 Gram matrix
            let a: Vec<Scalar> = entries
                .chunks(2)
                .map(|c| Scalar::new(rq(c[0], 1), rq(c[1], 1)))
                .collect();
            let mut g = Mat::zeros(3, 3);
            for i in 0..3 {
                for j in 0..3 {
                    *g.at_mut(i, j) = &a[i].conj() * &a[j];
                }
            }
            prop_assert!(is_hermitian(&g));
            prop_assert!(hermitian_is_psd(&g));
        }
    }
}
