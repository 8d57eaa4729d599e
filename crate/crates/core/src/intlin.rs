//! Integer linear algebra: Hermite echelon bases for lattices, membership
//! tests, Smith invariant factors for quotient presentations, and a
//! fraction-free Bareiss rank used as an independent second route for
//! rational rank computations.

use num::bigint::BigInt;
use num::{Integer, Signed, Zero};

pub type IRow = Vec<BigInt>;

fn is_zero_row(r: &[BigInt]) -> bool {
    r.iter().all(|x| x.is_zero())
}

/// Row-style Hermite echelon basis of the lattice spanned by `rows`.
///
/// Pivots are positive, strictly to the right as rows descend, the only
/// nonzero entries in their column below, and entries above each pivot are
/// reduced into `[0, pivot)`.
pub fn hermite_basis(rows: &[IRow], n: usize) -> Vec<IRow> {
    let mut work: Vec<IRow> = rows
        .iter()
        .inspect(|r| assert_eq!(r.len(), n, "lattice row length mismatch"))
        .filter(|r| !is_zero_row(r))
        .cloned()
        .collect();
    let mut top = 0;
    for col in 0..n {
        loop {
            let mut best: Option<usize> = None;
            for i in top..work.len() {
                if work[i][col].is_zero() {
                    continue;
                }
                if best.map_or(true, |b| work[i][col].abs() < work[b][col].abs()) {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            work.swap(top, b);
            let mut any_left = false;
            for i in top + 1..work.len() {
                if work[i][col].is_zero() {
                    continue;
                }
                let q = &work[i][col] / &work[top][col];
                for j in 0..n {
                    let s = &q * &work[top][j];
                    work[i][j] -= s;
                }
                any_left |= !work[i][col].is_zero();
            }
            if !any_left {
                break;
            }
        }
        if top < work.len() && !work[top][col].is_zero() {
            if work[top][col].is_negative() {
                for j in 0..n {
                    work[top][j] = -work[top][j].clone();
                }
            }
            for i in 0..top {
                let q = work[i][col].div_floor(&work[top][col]);
                if !q.is_zero() {
                    for j in 0..n {
                        let s = &q * &work[top][j];
                        work[i][j] -= s;
                    }
                }
            }
            top += 1;
        }
    }
    work.truncate(top);
    work
}

/// Does `v` lie in the lattice spanned by a Hermite echelon basis?
pub fn lattice_contains(hermite: &[IRow], v: &[BigInt]) -> bool {
    let mut w = v.to_vec();
    for row in hermite {
        let col = match row.iter().position(|x| !x.is_zero()) {
            Some(c) => c,
            None => continue,
        };
        if w[col].is_zero() {
            continue;
        }
        let (q, r) = w[col].div_rem(&row[col]);
        if !r.is_zero() {
            return false;
        }
        for j in 0..w.len() {
            let s = &q * &row[j];
            w[j] -= s;
        }
    }
    is_zero_row(&w)
}

/// Nonzero Smith invariant factors d₁ | d₂ | …, all positive.
pub fn smith_invariant_factors(rows: &[IRow], n: usize) -> Vec<BigInt> {
    let mut m: Vec<IRow> = rows.to_vec();
    for r in &m {
        assert_eq!(r.len(), n, "matrix row length mismatch");
    }
    let nrows = m.len();
    let steps = nrows.min(n);
    let mut diag: Vec<BigInt> = Vec::new();
    let mut t = 0;
    while t < steps {
        // pivot search in the trailing submatrix
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..nrows {
            for j in t..n {
                if m[i][j].is_zero() {
                    continue;
                }
                if pivot.map_or(true, |(pi, pj)| m[i][j].abs() < m[pi][pj].abs()) {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut clean = true;
            for i in t + 1..nrows {
                if m[i][t].is_zero() {
                    continue;
                }
                let q = m[i][t].div_floor(&m[t][t]);
                for j in t..n {
                    let s = &q * &m[t][j];
                    m[i][j] -= s;
                }
                if !m[i][t].is_zero() {
                    // remainder smaller than pivot: promote it
                    m.swap(t, i);
                    clean = false;
                }
            }
            for j in t + 1..n {
                if m[t][j].is_zero() {
                    continue;
                }
                let q = m[t][j].div_floor(&m[t][t]);
                for row in m.iter_mut().skip(t) {
                    let s = &q * &row[t];
                    row[j] -= s;
                }
                if !m[t][j].is_zero() {
                    for row in m.iter_mut() {
                        row.swap(t, j);
                    }
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        // pivot must divide the rest of the submatrix; if not, fold the
        // offending row in and redo this step
        let mut redo = false;
        'scan: for i in t + 1..nrows {
            for j in t + 1..n {
                if !m[i][j].is_multiple_of(&m[t][t]) {
                    for j2 in t..n {
                        let add = m[i][j2].clone();
                        m[t][j2] += add;
                    }
                    redo = true;
                    break 'scan;
                }
            }
        }
        if redo {
            continue;
        }
        diag.push(m[t][t].abs());
        t += 1;
    }
    diag.retain(|d| !d.is_zero());
    diag
}

/// Rank of an integer matrix by fraction-free Gaussian elimination.
pub fn bareiss_rank(mut m: Vec<IRow>) -> usize {
    if m.is_empty() {
        return 0;
    }
    let cols = m[0].len();
    let rows = m.len();
    let mut prev = BigInt::from(1);
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let num = &m[r][c] * &m[i][j] - &m[i][c] * &m[r][j];
                let (q, rem) = num.div_rem(&prev);
                assert!(rem.is_zero(), "fraction-free elimination lost exactness");
                m[i][j] = q;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(v: &[&[i64]]) -> Vec<IRow> {
        v.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    fn iv(v: &[i64]) -> IRow {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn hermite_membership() {
        let h = hermite_basis(&rows(&[&[2, 0], &[0, 3]]), 2);
        assert!(lattice_contains(&h, &iv(&[2, 3])));
        assert!(lattice_contains(&h, &iv(&[4, -3])));
        assert!(!lattice_contains(&h, &iv(&[1, 0])));
        assert!(!lattice_contains(&h, &iv(&[0, 2])));
    }

    #[test]
    fn hermite_handles_dependent_rows() {
        let h = hermite_basis(&rows(&[&[1, 2, 3], &[2, 4, 6], &[0, 0, 5]]), 3);
        assert_eq!(h.len(), 2);
        assert!(lattice_contains(&h, &iv(&[1, 2, 8])));
        assert!(!lattice_contains(&h, &iv(&[0, 1, 0])));
    }

    #[test]
    fn gcd_appears_through_row_combinations() {
        let h = hermite_basis(&rows(&[&[4], &[6]]), 1);
        assert_eq!(h, rows(&[&[2]]));
    }

    #[test]
    fn smith_factors_known_cases() {
        assert_eq!(
            smith_invariant_factors(&rows(&[&[2, 0], &[0, 3]]), 2),
            iv(&[1, 6])
        );
        assert_eq!(
            smith_invariant_factors(&rows(&[&[1, 0], &[0, 1]]), 2),
            iv(&[1, 1])
        );
        assert_eq!(
            smith_invariant_factors(&rows(&[&[2, 4], &[4, 8]]), 2),
            iv(&[2])
        );
        assert_eq!(
            smith_invariant_factors(&rows(&[&[6, 4], &[4, 6]]), 2),
            iv(&[2, 10])
        );
        assert_eq!(smith_invariant_factors(&rows(&[&[0, 0]]), 2), iv(&[]));
    }

    #[test]
    fn bareiss_matches_small_ranks() {
        assert_eq!(bareiss_rank(rows(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(bareiss_rank(rows(&[&[1, 2], &[3, 4]])), 2);
        assert_eq!(bareiss_rank(rows(&[&[0, 0], &[0, 0]])), 0);
        assert_eq!(
            bareiss_rank(rows(&[&[2, 3, 5], &[4, 6, 10], &[1, 1, 1]])),
            2
        );
    }
}
