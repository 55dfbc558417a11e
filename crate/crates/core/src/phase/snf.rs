//! Smith normal form of integer matrices over arbitrary-precision integers.
//!
//! `U * B * V = diag(d)` with `U`, `V` unimodular and `d1 | d2 | ...`. The
//! elimination pivots on the smallest nonzero entry of the trailing
//! submatrix, ties broken by smallest row then column index, which makes the
//! output deterministic. All arithmetic is exact; entries never wrap.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Dense integer matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged rows");
        Self {
            rows: nrows,
            cols: ncols,
            data: rows
                .iter()
                .flat_map(|r| r.iter().map(|&v| BigInt::from(v)))
                .collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    pub(crate) fn set(&mut self, r: usize, c: usize, v: BigInt) {
        self.data[r * self.cols + c] = v;
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    /// `row[target] += factor * row[source]`
    fn add_row_multiple(&mut self, target: usize, source: usize, factor: &BigInt) {
        if factor.is_zero() {
            return;
        }
        for c in 0..self.cols {
            let add = factor * self.get(source, c);
            let v = self.get(target, c) + add;
            self.set(target, c, v);
        }
    }

    /// `col[target] += factor * col[source]`
    fn add_col_multiple(&mut self, target: usize, source: usize, factor: &BigInt) {
        if factor.is_zero() {
            return;
        }
        for r in 0..self.rows {
            let add = factor * self.get(r, source);
            let v = self.get(r, target) + add;
            self.set(r, target, v);
        }
    }

    fn negate_row(&mut self, r: usize) {
        for c in 0..self.cols {
            let v = -self.get(r, c);
            self.set(r, c, v);
        }
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut m = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m.get(k, k).is_zero() {
                match (k + 1..n).find(|&i| !m.get(i, k).is_zero()) {
                    Some(i) => {
                        m.swap_rows(k, i);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (m.get(i, j) * m.get(k, k) - m.get(i, k) * m.get(k, j)) / &prev;
                    m.set(i, j, v);
                }
                m.set(i, k, BigInt::zero());
            }
            prev = m.get(k, k).clone();
        }
        sign * m.get(n - 1, n - 1)
    }
}

/// `U * B * V = diag(d)` with `d_i | d_{i+1}` and `d_i >= 0`.
#[derive(Debug, Clone)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub d: Vec<BigInt>,
}

impl SmithDecomposition {
    /// Checks `U * B * V = diag(d)`, the divisibility chain and the
    /// unimodularity of both transforms.
    pub fn verify(&self, original: &IntMatrix) -> bool {
        let product = self.u.mul(original).mul(&self.v);
        for r in 0..product.rows() {
            for c in 0..product.cols() {
                let expected = if r == c && r < self.d.len() {
                    self.d[r].clone()
                } else {
                    BigInt::zero()
                };
                if *product.get(r, c) != expected {
                    return false;
                }
            }
        }
        for w in self.d.windows(2) {
            if !w[0].is_zero() && !(&w[1] % &w[0]).is_zero() {
                return false;
            }
            if w[0].is_zero() && !w[1].is_zero() {
                return false;
            }
        }
        self.u.determinant().abs().is_one() && self.v.determinant().abs().is_one()
    }
}

// the pivot loop has three distinct exits; a `while let` would hide them
#[allow(clippy::while_let_loop)]
pub fn smith_normal_form(b: &IntMatrix) -> SmithDecomposition {
    let rows = b.rows();
    let cols = b.cols();
    let mut a = b.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);

    let rank_bound = rows.min(cols);
    for k in 0..rank_bound {
        loop {
            let Some((pi, pj)) = select_pivot(&a, k) else {
                break;
            };
            a.swap_rows(k, pi);
            u.swap_rows(k, pi);
            a.swap_cols(k, pj);
            v.swap_cols(k, pj);

            // Reduce column k below the pivot and row k right of it; any
            // leftover remainder is strictly smaller than the pivot, so the
            // re-pivoting loop terminates.
            let mut leftovers = false;
            for i in k + 1..rows {
                if a.get(i, k).is_zero() {
                    continue;
                }
                let q = -(a.get(i, k) / a.get(k, k));
                a.add_row_multiple(i, k, &q);
                u.add_row_multiple(i, k, &q);
                if !a.get(i, k).is_zero() {
                    leftovers = true;
                }
            }
            for j in k + 1..cols {
                if a.get(k, j).is_zero() {
                    continue;
                }
                let q = -(a.get(k, j) / a.get(k, k));
                a.add_col_multiple(j, k, &q);
                v.add_col_multiple(j, k, &q);
                if !a.get(k, j).is_zero() {
                    leftovers = true;
                }
            }
            if leftovers {
                continue;
            }

            // Divisibility: the pivot must divide the whole trailing block.
            let culprit = (k + 1..rows)
                .find(|&i| (k + 1..cols).any(|j| !(a.get(i, j) % a.get(k, k)).is_zero()));
            if let Some(i) = culprit {
                a.add_row_multiple(k, i, &BigInt::one());
                u.add_row_multiple(k, i, &BigInt::one());
                continue;
            }
            break;
        }
    }

    let mut d = Vec::with_capacity(rank_bound);
    for k in 0..rank_bound {
        if a.get(k, k).is_negative() {
            a.negate_row(k);
            u.negate_row(k);
        }
        d.push(a.get(k, k).clone());
    }
    SmithDecomposition { u, v, d }
}

/// Smallest-magnitude nonzero entry of the trailing submatrix; ties go to
/// the smallest row, then column.
fn select_pivot(a: &IntMatrix, k: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in k..a.rows() {
        for j in k..a.cols() {
            let val = a.get(i, j);
            if val.is_zero() {
                continue;
            }
            match best {
                None => best = Some((i, j)),
                Some((bi, bj)) => {
                    if val.abs() < a.get(bi, bj).abs() {
                        best = Some((i, j));
                    }
                }
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn snf_of(rows: &[Vec<i64>]) -> (IntMatrix, SmithDecomposition) {
        let b = IntMatrix::from_rows(rows);
        let s = smith_normal_form(&b);
        assert!(
            s.verify(&b),
            "U B V != diag(d) or transforms not unimodular"
        );
        (b, s)
    }

    fn diag_i64(s: &SmithDecomposition) -> Vec<i64> {
        s.d.iter().map(|d| i64::try_from(d).unwrap()).collect()
    }

    #[test]
    fn identity_is_fixed() {
        let (_, s) = snf_of(&[vec![1, 0], vec![0, 1]]);
        assert_eq!(diag_i64(&s), vec![1, 1]);
        assert_eq!(s.u, IntMatrix::identity(2));
        assert_eq!(s.v, IntMatrix::identity(2));
    }

    #[test]
    fn rank_one_symmetric() {
        let (_, s) = snf_of(&[vec![2, -2], vec![-2, 2]]);
        assert_eq!(diag_i64(&s), vec![2, 0]);
    }

    #[test]
    fn single_row_gcd() {
        let (_, s) = snf_of(&[vec![2, -1, -1]]);
        assert_eq!(diag_i64(&s), vec![1]);
    }

    #[test]
    fn zero_matrix() {
        let (_, s) = snf_of(&[vec![0, 0], vec![0, 0], vec![0, 0]]);
        assert_eq!(diag_i64(&s), vec![0, 0]);
    }

    #[test]
    fn divisibility_chain_example() {
        let (_, s) = snf_of(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, 4, 16]]);
        let d = diag_i64(&s);
        assert_eq!(d.len(), 3);
        for w in d.windows(2) {
            if w[0] != 0 {
                assert_eq!(w[1] % w[0], 0);
            }
        }
        // classical result for this matrix
        assert_eq!(d, vec![2, 2, 156]);
    }

    #[test]
    fn deterministic_output() {
        let rows = vec![vec![6, 4, -2], vec![4, -4, 8], vec![0, 2, 12]];
        let b = IntMatrix::from_rows(&rows);
        let s1 = smith_normal_form(&b);
        let s2 = smith_normal_form(&b);
        assert_eq!(s1.u, s2.u);
        assert_eq!(s1.v, s2.v);
        assert_eq!(s1.d, s2.d);
    }

    #[test]
    fn determinant_bareiss() {
        let m = IntMatrix::from_rows(&[vec![2, 0, 1], vec![1, 1, 0], vec![0, 3, 1]]);
        assert_eq!(m.determinant(), BigInt::from(5));
        let singular = IntMatrix::from_rows(&[vec![1, 2], vec![2, 4]]);
        assert_eq!(singular.determinant(), BigInt::zero());
    }

    #[test]
    fn random_matrices_verify() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for _ in 0..200 {
            let rows = rng.gen_range(1..=5);
            let cols = rng.gen_range(1..=5);
            let data: Vec<Vec<i64>> = (0..rows)
                .map(|_| (0..cols).map(|_| rng.gen_range(-9..=9)).collect())
                .collect();
            let b = IntMatrix::from_rows(&data);
            let s = smith_normal_form(&b);
            assert!(s.verify(&b), "failed on {data:?}");
        }
    }
}
