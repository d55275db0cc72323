//! Dense exact linear algebra over ℚ(i).

use num_traits::{One, Zero};

use crate::scalar::GaussianRational as Q;

pub type Matrix = Vec<Vec<Q>>;

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect())
        .collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let m = b.first().map_or(0, |r| r.len());
    let mut out = vec![vec![Q::zero(); m]; n];
    for i in 0..n {
        for (k, aik) in a[i].iter().enumerate() {
            if aik.is_zero() {
                continue;
            }
            for j in 0..m {
                if !b[k][j].is_zero() {
                    out[i][j] += &(aik * &b[k][j]);
                }
            }
        }
    }
    out
}

pub fn transpose(a: &Matrix) -> Matrix {
    let m = a.first().map_or(0, |r| r.len());
    (0..m).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn is_antisymmetric(a: &Matrix) -> bool {
    let n = a.len();
    (0..n).all(|i| a[i].len() == n && (0..n).all(|j| a[i][j] == -&a[j][i]))
}

pub fn invert(a: &Matrix) -> Option<Matrix> {
    let n = a.len();
    let mut m: Vec<Vec<Q>> = a
        .iter()
        .zip(identity(n))
        .map(|(row, id)| row.iter().cloned().chain(id).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        let inv = m[col][col].inv()?;
        for x in m[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in 0..2 * n {
                    let t = &f * &m[col][c];
                    m[r][c] -= &t;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Sparse linear system `Σ_j a_ij x_j = b_i` solved by Gauss-Jordan
/// elimination. Returns one solution (free variables set to zero) or
/// `None` when the system is inconsistent.
pub struct SparseSystem {
    cols: usize,
    rows: Vec<(Vec<(usize, Q)>, Q)>,
}

impl SparseSystem {
    pub fn new(cols: usize) -> Self {
        SparseSystem { cols, rows: Vec::new() }
    }

    pub fn push(&mut self, mut row: Vec<(usize, Q)>, rhs: Q) {
        row.retain(|(_, c)| !c.is_zero());
        row.sort_by_key(|(j, _)| *j);
        self.rows.push((row, rhs));
    }

    pub fn solve(self) -> Option<Vec<Q>> {
        self.solve_with_rank().map(|(x, _)| x)
    }

    /// Like [`SparseSystem::solve`], also returning the rank of the system.
    pub fn solve_with_rank(self) -> Option<(Vec<Q>, usize)> {
        use std::collections::BTreeMap;
        // pivot column -> normalized row with pivot coefficient 1
        let mut pivots: BTreeMap<usize, (BTreeMap<usize, Q>, Q)> = BTreeMap::new();
        for (row, rhs) in self.rows {
            let mut r: BTreeMap<usize, Q> = row.into_iter().collect();
            let mut b = rhs;
            // reduce by existing pivots until the leading column is free
            loop {
                let lead = r.iter().find(|(j, _)| pivots.contains_key(j)).map(|(j, c)| (*j, c.clone()));
                let Some((j, c)) = lead else { break };
                let (prow, pb) = &pivots[&j];
                for (k, v) in prow.iter() {
                    let e = r.entry(*k).or_insert_with(Q::zero);
                    *e -= &(&c * v);
                    if e.is_zero() {
                        r.remove(k);
                    }
                }
                b -= &(&c * pb);
            }
            let Some((&j, c)) = r.iter().next() else {
                if b.is_zero() {
                    continue;
                }
                return None;
            };
            let inv = c.inv().unwrap();
            for v in r.values_mut() {
                *v *= &inv;
            }
            b *= &inv;
            // keep existing pivot rows free of the new pivot column
            for (prow, pb) in pivots.values_mut() {
                if let Some(f) = prow.get(&j).cloned() {
                    for (k, v) in r.iter() {
                        let e = prow.entry(*k).or_insert_with(Q::zero);
                        *e -= &(&f * v);
                        if e.is_zero() {
                            prow.remove(k);
                        }
                    }
                    *pb -= &(&f * &b);
                }
            }
            pivots.insert(j, (r, b));
        }
        let mut x = vec![Q::zero(); self.cols];
        let rank = pivots.len();
        for (j, (_, b)) in pivots {
            x[j] = b;
        }
        Some((x, rank))
    }
}
