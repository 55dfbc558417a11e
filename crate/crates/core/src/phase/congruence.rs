//! Systems of linear congruences `B t = b (mod M)` over `t in [0, M)^n`.
//!
//! Solvability, solution counting and solution enumeration all go through
//! the Smith normal form `U B V = diag(d)`: with `y = V^{-1} t` the system
//! decouples into `d_i y_i = (U b)_i (mod M)` per diagonal position plus
//! `(U b)_i = 0 (mod M)` for rows beyond the diagonal, and the number of
//! homogeneous solutions is `prod_i gcd(d_i, M) * M^{n-k}`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::snf::{smith_normal_form, IntMatrix, SmithDecomposition};
use super::PhaseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CongruenceSystem {
    unknowns: usize,
    modulus: u64,
    rows: Vec<Vec<i64>>,
    rhs: Vec<u64>,
}

/// Outcome of solution enumeration under a cap.
#[derive(Debug, Clone)]
pub enum Enumeration {
    /// All solutions, sorted lexicographically.
    Full(Vec<Vec<u64>>),
    /// Too many solutions to list; generators of the homogeneous solution
    /// group are returned instead.
    Capped {
        total: BigUint,
        generators: Vec<Vec<u64>>,
    },
}

impl CongruenceSystem {
    /// Normalizes, deduplicates and sorts the rows. Rows with all-zero
    /// coefficients and zero right-hand side are dropped; all-zero rows with
    /// a nonzero right-hand side are kept since they encode unsolvability.
    pub fn new(
        unknowns: usize,
        modulus: u64,
        raw: impl IntoIterator<Item = (Vec<i64>, i64)>,
    ) -> Self {
        assert!(modulus >= 1, "modulus must be at least 1");
        let m = modulus as i64;
        let mut pairs: Vec<(Vec<i64>, u64)> = raw
            .into_iter()
            .map(|(row, rhs)| {
                assert_eq!(row.len(), unknowns);
                (row, (rhs.rem_euclid(m)) as u64)
            })
            .filter(|(row, rhs)| *rhs != 0 || row.iter().any(|&c| c != 0))
            .collect();
        pairs.sort();
        pairs.dedup();
        let (rows, rhs) = pairs.into_iter().unzip();
        Self {
            unknowns,
            modulus,
            rows,
            rhs,
        }
    }

    pub fn unknowns(&self) -> usize {
        self.unknowns
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> impl Iterator<Item = (&[i64], u64)> + '_ {
        self.rows
            .iter()
            .zip(&self.rhs)
            .map(|(row, &rhs)| (row.as_slice(), rhs))
    }

    pub fn is_homogeneous(&self) -> bool {
        self.rhs.iter().all(|&r| r == 0)
    }

    /// Appends the normalization constraint `t_1 = 0`.
    pub fn normalized(&self) -> Self {
        let mut row = vec![0i64; self.unknowns];
        row[0] = 1;
        let raw = self
            .rows()
            .map(|(r, b)| (r.to_vec(), b as i64))
            .chain([(row, 0)]);
        Self::new(self.unknowns, self.modulus, raw)
    }

    pub fn satisfied_by(&self, t: &[u64]) -> bool {
        assert_eq!(t.len(), self.unknowns);
        let m = self.modulus as i128;
        self.rows().all(|(row, rhs)| {
            let sum: i128 = row
                .iter()
                .zip(t)
                .map(|(&c, &v)| (c as i128 * v as i128).rem_euclid(m))
                .fold(0i128, |acc, term| (acc + term).rem_euclid(m));
            sum == rhs as i128
        })
    }

    fn matrix(&self) -> IntMatrix {
        let mut m = IntMatrix::zero(self.rows.len(), self.unknowns);
        for (r, row) in self.rows.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                m.set(r, c, BigInt::from(v));
            }
        }
        m
    }

    /// Number of solutions of a homogeneous system:
    /// `prod_{i<k} gcd(d_i, M) * M^{n-k}`.
    pub fn count_solutions(&self) -> Result<BigUint, PhaseError> {
        if !self.is_homogeneous() {
            return Err(PhaseError::NonHomogeneous);
        }
        let m = BigUint::from(self.modulus);
        if self.rows.is_empty() {
            return Ok(m.pow(self.unknowns as u32));
        }
        let snf = smith_normal_form(&self.matrix());
        let k = snf.d.len();
        let mut count = m.pow((self.unknowns - k) as u32);
        for d in &snf.d {
            count *= d.magnitude().gcd(&BigUint::from(self.modulus));
        }
        Ok(count)
    }

    /// A witness solution when one exists: the transformed right-hand side
    /// must be divisible by `gcd(d_i, M)` at each diagonal position and by
    /// `M` beyond; the witness is mapped back through `V` and checked
    /// against every row.
    pub fn solve_witness(&self) -> Option<Vec<u64>> {
        let m = self.modulus;
        if self.rows.is_empty() {
            return Some(vec![0; self.unknowns]);
        }
        let snf = smith_normal_form(&self.matrix());
        let k = snf.d.len();
        let c = transformed_rhs(&snf, &self.rhs, m);
        let mut y = vec![0u64; self.unknowns];
        for i in 0..self.rows.len() {
            if i < k {
                let d_mod = bigint_mod(&snf.d[i], m);
                y[i] = solve_scalar_congruence(d_mod, c[i], m)?;
            } else if c[i] != 0 {
                return None;
            }
        }
        let t = map_through_v(&snf.v, &y, m);
        assert!(
            self.satisfied_by(&t),
            "witness reconstruction failed for a solvable system"
        );
        Some(t)
    }

    /// Generators of the homogeneous solution group: column `i` of `V`
    /// scaled by `M / gcd(d_i, M)`, reduced mod `M` (missing diagonal
    /// positions count as `d_i = 0`).
    pub fn homogeneous_generators(&self) -> Vec<Vec<u64>> {
        let m = self.modulus;
        if self.rows.is_empty() {
            return (0..self.unknowns)
                .map(|i| {
                    let mut t = vec![0u64; self.unknowns];
                    t[i] = 1 % m;
                    t
                })
                .filter(|t| t.iter().any(|&v| v != 0))
                .collect();
        }
        let snf = smith_normal_form(&self.matrix());
        let mut gens = Vec::new();
        for i in 0..self.unknowns {
            let order = self.column_order(&snf, i);
            if order <= 1 {
                continue;
            }
            let step = m / order;
            let mut y = vec![0u64; self.unknowns];
            y[i] = step;
            let t = map_through_v(&snf.v, &y, m);
            if t.iter().any(|&v| v != 0) {
                gens.push(t);
            }
        }
        gens
    }

    /// Order of the cyclic factor attached to column `i`: `gcd(d_i, M)`,
    /// with `d_i = 0` for positions beyond the diagonal.
    fn column_order(&self, snf: &SmithDecomposition, i: usize) -> u64 {
        if i < snf.d.len() {
            bigint_mod(&snf.d[i], self.modulus).gcd(&self.modulus)
        } else {
            self.modulus
        }
    }

    /// All solutions (witness plus homogeneous lattice), sorted, as long as
    /// the count stays within `cap`.
    pub fn enumerate(&self, cap: usize) -> Enumeration {
        let m = self.modulus;
        let Some(witness) = self.solve_witness() else {
            return Enumeration::Full(Vec::new());
        };
        if self.rows.is_empty() {
            // unconstrained: M^n solutions
            let total = BigUint::from(m).pow(self.unknowns as u32);
            if total > BigUint::from(cap) {
                return Enumeration::Capped {
                    total,
                    generators: self.homogeneous_generators(),
                };
            }
        }
        let snf = if self.rows.is_empty() {
            None
        } else {
            Some(smith_normal_form(&self.matrix()))
        };
        let orders: Vec<u64> = (0..self.unknowns)
            .map(|i| match &snf {
                Some(s) => self.column_order(s, i),
                None => m,
            })
            .collect();
        let total: BigUint = orders.iter().map(|&g| BigUint::from(g)).product();
        if total > BigUint::from(cap) {
            return Enumeration::Capped {
                total,
                generators: self.homogeneous_generators(),
            };
        }
        let total = total.to_usize().expect("within cap");

        // V columns mod M, for fast mixed-radix expansion
        let v_mod: Option<Vec<Vec<u64>>> = snf.as_ref().map(|s| {
            (0..self.unknowns)
                .map(|r| {
                    (0..self.unknowns)
                        .map(|c| bigint_mod(s.v.get(r, c), m))
                        .collect()
                })
                .collect()
        });

        let mut digits = vec![0u64; self.unknowns];
        let mut out = Vec::with_capacity(total);
        loop {
            let t: Vec<u64> = match &v_mod {
                Some(v) => (0..self.unknowns)
                    .map(|r| {
                        let mut acc: u128 = witness[r] as u128;
                        for c in 0..self.unknowns {
                            let y = digits[c] as u128 * (m / orders[c]) as u128 % m as u128;
                            acc = (acc + v[r][c] as u128 * y) % m as u128;
                        }
                        acc as u64
                    })
                    .collect(),
                None => (0..self.unknowns)
                    .map(|r| (witness[r] + digits[r]) % m)
                    .collect(),
            };
            debug_assert!(self.satisfied_by(&t));
            out.push(t);

            // advance mixed-radix counter
            let mut pos = 0;
            loop {
                if pos == self.unknowns {
                    out.sort_unstable();
                    out.dedup();
                    debug_assert_eq!(out.len(), total, "solution lattice not free");
                    return Enumeration::Full(out);
                }
                digits[pos] += 1;
                if digits[pos] < orders[pos] {
                    break;
                }
                digits[pos] = 0;
                pos += 1;
            }
        }
    }
}

fn bigint_mod(v: &BigInt, m: u64) -> u64 {
    v.mod_floor(&BigInt::from(m))
        .to_u64()
        .expect("reduced mod m")
}

fn transformed_rhs(snf: &SmithDecomposition, rhs: &[u64], m: u64) -> Vec<u64> {
    (0..rhs.len())
        .map(|i| {
            let mut acc = BigInt::zero();
            for (j, &b) in rhs.iter().enumerate() {
                acc += snf.u.get(i, j) * BigInt::from(b);
            }
            bigint_mod(&acc, m)
        })
        .collect()
}

fn map_through_v(v: &IntMatrix, y: &[u64], m: u64) -> Vec<u64> {
    (0..y.len())
        .map(|r| {
            let mut acc = BigInt::zero();
            for (c, &yc) in y.iter().enumerate() {
                acc += v.get(r, c) * BigInt::from(yc);
            }
            bigint_mod(&acc, m)
        })
        .collect()
}

/// Smallest `y` with `d y = c (mod m)`, if any.
fn solve_scalar_congruence(d: u64, c: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    // d = 0 gives g = m, which forces c = 0 and yields y = 0 below
    let g = d.gcd(&m);
    if !c.is_multiple_of(g) {
        return None;
    }
    let m_red = m / g;
    let d_red = (d / g) % m_red;
    let c_red = (c / g) % m_red;
    if m_red == 1 {
        return Some(0);
    }
    let inv = mod_inverse(d_red, m_red)?;
    Some((c_red as u128 * inv as u128 % m_red as u128) as u64)
}

fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}
