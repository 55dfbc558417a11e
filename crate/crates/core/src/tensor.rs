//! Sparse order-m tensors in coordinate form.
//!
//! A [`SparseTensor`] stores only the strictly positive entries of a
//! nonnegative tensor of order `m >= 2` and dimension `n >= 1`, as a
//! lexicographically sorted list of `(index tuple, value)` pairs. Indices are
//! 0-based internally; the text format is 1-based and the parser/writer pair
//! is the only place where the two conventions meet.
//!
//! Complex values arise only transiently: in vectors fed to [`SparseTensor::apply`]
//! and in the result of [`diagonal_product`].

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use thiserror::Error;

/// Values this small are indistinguishable from structural zeros; the loader
/// rejects them instead of silently dropping entries.
pub const MIN_STORED_VALUE: f64 = 1e-15;

#[derive(Debug, Error)]
pub enum TensorError {
    #[error("line {line}: malformed header, expected \"m n nnz\"")]
    MalformedHeader { line: usize },
    #[error("line {line}: expected {expected} fields, found {found}")]
    WrongFieldCount {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: index {index} out of range [1, {dim}]")]
    IndexOutOfRange { line: usize, index: i64, dim: usize },
    #[error("line {line}: negative value {value}")]
    NegativeValue { line: usize, value: f64 },
    #[error("line {line}: value {value} below the storage threshold {MIN_STORED_VALUE}")]
    BelowThreshold { line: usize, value: f64 },
    #[error("line {line}: duplicate index tuple")]
    DuplicateTuple { line: usize },
    #[error("line {line}: unparseable number {token:?}")]
    BadNumber { line: usize, token: String },
    #[error("declared {declared} entries but found {found}")]
    EntryCountMismatch { declared: usize, found: usize },
    #[error("tensor order must be at least 2, got {order}")]
    BadOrder { order: usize },
    #[error("tensor dimension must be at least 1, got {dim}")]
    BadDim { dim: usize },
    #[error("index tuple has {found} components, expected {expected}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("index {index} out of range for dimension {dim}")]
    EntryIndexOutOfRange { index: u32, dim: usize },
    #[error("negative entry value {value}")]
    NegativeEntry { value: f64 },
    #[error("duplicate index tuple in entry list")]
    DuplicateEntry,
    #[error("vector length {found} does not match tensor dimension {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("index subset must be nonempty")]
    EmptyIndexSet,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Nonnegative tensor of order `m` and dimension `n` in coordinate form.
///
/// Invariants: every stored value is strictly positive, every tuple has
/// exactly `order` components each in `[0, dim)`, tuples are sorted
/// lexicographically and duplicate-free.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseTensor {
    order: usize,
    dim: usize,
    entries: Vec<(Vec<u32>, f64)>,
}

impl SparseTensor {
    /// Builds a tensor from `(tuple, value)` pairs, validating all invariants.
    /// Entries with value exactly `0.0` are dropped; negative values and
    /// duplicate tuples are rejected.
    pub fn new(
        order: usize,
        dim: usize,
        entries: impl IntoIterator<Item = (Vec<u32>, f64)>,
    ) -> Result<Self, TensorError> {
        if order < 2 {
            return Err(TensorError::BadOrder { order });
        }
        if dim < 1 {
            return Err(TensorError::BadDim { dim });
        }
        let mut map: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        for (tuple, value) in entries {
            if tuple.len() != order {
                return Err(TensorError::ArityMismatch {
                    expected: order,
                    found: tuple.len(),
                });
            }
            if let Some(&bad) = tuple.iter().find(|&&i| i as usize >= dim) {
                return Err(TensorError::EntryIndexOutOfRange { index: bad, dim });
            }
            if value < 0.0 || value.is_nan() {
                return Err(TensorError::NegativeEntry { value });
            }
            if value == 0.0 {
                continue;
            }
            if map.insert(tuple, value).is_some() {
                return Err(TensorError::DuplicateEntry);
            }
        }
        Ok(Self {
            order,
            dim,
            entries: map.into_iter().collect(),
        })
    }

    /// The zero tensor (no stored entries).
    pub fn zero(order: usize, dim: usize) -> Self {
        Self::new(order, dim, []).expect("zero tensor parameters")
    }

    /// The identity tensor: 1 at every diagonal tuple `(i, i, ..., i)`.
    pub fn identity(order: usize, dim: usize) -> Self {
        let entries = (0..dim as u32).map(|i| (vec![i; order], 1.0));
        Self::new(order, dim, entries).expect("identity tensor parameters")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in lexicographic tuple order.
    pub fn entries(&self) -> impl Iterator<Item = (&[u32], f64)> + '_ {
        self.entries.iter().map(|(t, v)| (t.as_slice(), *v))
    }

    pub fn get(&self, tuple: &[u32]) -> Option<f64> {
        self.entries
            .binary_search_by(|(t, _)| t.as_slice().cmp(tuple))
            .ok()
            .map(|i| self.entries[i].1)
    }

    /// The support `sp(A)`: the set of index tuples with nonzero value.
    pub fn support(&self) -> Vec<&[u32]> {
        self.entries.iter().map(|(t, _)| t.as_slice()).collect()
    }

    // ---- text format -------------------------------------------------

    /// Parses the coordinate text format: a header line `m n nnz` followed by
    /// `nnz` lines `i1 i2 .. im value` with 1-based indices. `#` starts a
    /// comment; blank lines are ignored. Errors carry 1-based line numbers.
    pub fn parse(input: &str) -> Result<Self, TensorError> {
        let mut lines = input
            .lines()
            .enumerate()
            .map(|(i, raw)| {
                let body = match raw.find('#') {
                    Some(pos) => &raw[..pos],
                    None => raw,
                };
                (i + 1, body.trim())
            })
            .filter(|(_, body)| !body.is_empty());

        let (header_line, header) = lines
            .next()
            .ok_or(TensorError::MalformedHeader { line: 1 })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(TensorError::MalformedHeader { line: header_line });
        }
        let parse_usize = |tok: &str| -> Result<usize, TensorError> {
            tok.parse()
                .map_err(|_| TensorError::MalformedHeader { line: header_line })
        };
        let order = parse_usize(fields[0])?;
        let dim = parse_usize(fields[1])?;
        let nnz = parse_usize(fields[2])?;
        if order < 2 {
            return Err(TensorError::BadOrder { order });
        }
        if dim < 1 {
            return Err(TensorError::BadDim { dim });
        }

        let mut map: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        let mut found = 0usize;
        for (line, body) in lines {
            let fields: Vec<&str> = body.split_whitespace().collect();
            if fields.len() != order + 1 {
                return Err(TensorError::WrongFieldCount {
                    line,
                    expected: order + 1,
                    found: fields.len(),
                });
            }
            let mut tuple = Vec::with_capacity(order);
            for tok in &fields[..order] {
                let idx: i64 = tok.parse().map_err(|_| TensorError::BadNumber {
                    line,
                    token: tok.to_string(),
                })?;
                if idx < 1 || idx as usize > dim {
                    return Err(TensorError::IndexOutOfRange {
                        line,
                        index: idx,
                        dim,
                    });
                }
                tuple.push((idx - 1) as u32);
            }
            let value: f64 = fields[order].parse().map_err(|_| TensorError::BadNumber {
                line,
                token: fields[order].to_string(),
            })?;
            if value.is_nan() || value.is_infinite() {
                return Err(TensorError::BadNumber {
                    line,
                    token: fields[order].to_string(),
                });
            }
            if value < 0.0 {
                return Err(TensorError::NegativeValue { line, value });
            }
            if value < MIN_STORED_VALUE {
                return Err(TensorError::BelowThreshold { line, value });
            }
            if map.insert(tuple, value).is_some() {
                return Err(TensorError::DuplicateTuple { line });
            }
            found += 1;
        }
        if found != nnz {
            return Err(TensorError::EntryCountMismatch {
                declared: nnz,
                found,
            });
        }
        Ok(Self {
            order,
            dim,
            entries: map.into_iter().collect(),
        })
    }

    /// Canonical text rendering: sorted tuples, 1-based indices, values with
    /// 17 significant digits. `parse(to_text(t)) == t` and re-rendering is
    /// byte-identical.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {} {}", self.order, self.dim, self.nnz());
        for (tuple, value) in &self.entries {
            for idx in tuple {
                let _ = write!(out, "{} ", idx + 1);
            }
            let _ = writeln!(out, "{:.16e}", value);
        }
        out
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, TensorError> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn store(&self, path: impl AsRef<Path>) -> Result<(), TensorError> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    // ---- algebra -----------------------------------------------------

    /// The contraction `(A x^{m-1})_i = sum a_{i i2..im} x_{i2}..x_{im}`.
    ///
    /// Summation follows the sorted entry order, so the result is
    /// reproducible bit for bit.
    pub fn apply(&self, x: &[Complex64]) -> Result<Vec<Complex64>, TensorError> {
        if x.len() != self.dim {
            return Err(TensorError::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        for (tuple, value) in &self.entries {
            let mut term = Complex64::new(*value, 0.0);
            for &idx in &tuple[1..] {
                term *= x[idx as usize];
            }
            out[tuple[0] as usize] += term;
        }
        Ok(out)
    }

    /// Real-vector fast path of [`SparseTensor::apply`]; same summation order.
    pub fn apply_real(&self, x: &[f64]) -> Result<Vec<f64>, TensorError> {
        if x.len() != self.dim {
            return Err(TensorError::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        let mut out = vec![0.0; self.dim];
        for (tuple, value) in &self.entries {
            let mut term = *value;
            for &idx in &tuple[1..] {
                term *= x[idx as usize];
            }
            out[tuple[0] as usize] += term;
        }
        Ok(out)
    }

    /// `A + c I`: adds `c` to every diagonal entry. `c` must be positive.
    pub fn add_identity(&self, c: f64) -> Self {
        assert!(c > 0.0, "identity shift must be positive");
        let mut map: BTreeMap<Vec<u32>, f64> = self.entries.iter().cloned().collect();
        for i in 0..self.dim as u32 {
            *map.entry(vec![i; self.order]).or_insert(0.0) += c;
        }
        Self {
            order: self.order,
            dim: self.dim,
            entries: map.into_iter().collect(),
        }
    }

    /// Rescales every entry; `factor` must be strictly positive so the
    /// support is preserved.
    pub fn scale(&self, factor: f64) -> Self {
        assert!(factor > 0.0, "scale factor must be positive");
        Self {
            order: self.order,
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .map(|(t, v)| (t.clone(), v * factor))
                .collect(),
        }
    }

    // ---- structure ---------------------------------------------------

    /// True when every entry value is invariant under all permutations of
    /// its index tuple.
    pub fn is_symmetric(&self) -> bool {
        self.entries.iter().all(|(tuple, value)| {
            distinct_permutations(tuple)
                .into_iter()
                .all(|p| self.get(&p) == Some(*value))
        })
    }

    /// True when the support is invariant under all index permutations
    /// (values may differ across an orbit).
    pub fn is_combinatorially_symmetric(&self) -> bool {
        self.entries.iter().all(|(tuple, _)| {
            distinct_permutations(tuple)
                .into_iter()
                .all(|p| self.get(&p).is_some())
        })
    }

    /// The majorization matrix `M(A)` with `M[i][j] = a_{i j j .. j}`.
    pub fn majorization(&self) -> Vec<Vec<f64>> {
        let mut m = vec![vec![0.0; self.dim]; self.dim];
        for (tuple, value) in &self.entries {
            let j = tuple[1];
            if tuple[1..].iter().all(|&k| k == j) {
                m[tuple[0] as usize][j as usize] = *value;
            }
        }
        m
    }

    /// The induced tensor `I(A)`: keeps exactly the entries whose tail
    /// indices all coincide.
    pub fn induced(&self) -> Self {
        let entries = self
            .entries
            .iter()
            .filter(|(tuple, _)| {
                let j = tuple[1];
                tuple[1..].iter().all(|&k| k == j)
            })
            .cloned()
            .collect();
        Self {
            order: self.order,
            dim: self.dim,
            entries,
        }
    }

    /// Principal subtensor `A[alpha]`: keeps entries with every index in
    /// `alpha` (0-based), reindexed to `[0, alpha.len())`. Returns the tensor
    /// together with the new-to-old index map.
    pub fn principal_subtensor(&self, alpha: &[usize]) -> Result<(Self, Vec<usize>), TensorError> {
        if alpha.is_empty() {
            return Err(TensorError::EmptyIndexSet);
        }
        let mut sorted: Vec<usize> = alpha.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if let Some(&bad) = sorted.iter().find(|&&i| i >= self.dim) {
            return Err(TensorError::EntryIndexOutOfRange {
                index: bad as u32,
                dim: self.dim,
            });
        }
        let mut old_to_new = vec![u32::MAX; self.dim];
        for (new, &old) in sorted.iter().enumerate() {
            old_to_new[old] = new as u32;
        }
        let entries: Vec<(Vec<u32>, f64)> = self
            .entries
            .iter()
            .filter(|(tuple, _)| tuple.iter().all(|&i| old_to_new[i as usize] != u32::MAX))
            .map(|(tuple, value)| {
                (
                    tuple.iter().map(|&i| old_to_new[i as usize]).collect(),
                    *value,
                )
            })
            .collect();
        Ok((
            Self {
                order: self.order,
                dim: sorted.len(),
                entries,
            },
            sorted,
        ))
    }
}

/// Complex-valued tensor with the same coordinate layout as [`SparseTensor`].
/// Appears only as the result of phase-diagonal conjugation.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexTensor {
    order: usize,
    dim: usize,
    entries: Vec<(Vec<u32>, Complex64)>,
}

impl ComplexTensor {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> impl Iterator<Item = (&[u32], Complex64)> + '_ {
        self.entries.iter().map(|(t, v)| (t.as_slice(), *v))
    }

    pub fn get(&self, tuple: &[u32]) -> Option<Complex64> {
        self.entries
            .binary_search_by(|(t, _)| t.as_slice().cmp(tuple))
            .ok()
            .map(|i| self.entries[i].1)
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            order: self.order,
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .map(|(t, v)| (t.clone(), v * factor))
                .collect(),
        }
    }

    /// Componentwise distance on the union of supports.
    pub fn max_entry_distance(&self, other: &Self) -> f64 {
        let mut max = 0.0f64;
        for (tuple, value) in &self.entries {
            let d = (value - other.get(tuple).unwrap_or_default()).norm();
            max = max.max(d);
        }
        for (tuple, value) in &other.entries {
            if self.get(tuple).is_none() {
                max = max.max(value.norm());
            }
        }
        max
    }
}

impl From<&SparseTensor> for ComplexTensor {
    fn from(t: &SparseTensor) -> Self {
        Self {
            order: t.order,
            dim: t.dim,
            entries: t
                .entries
                .iter()
                .map(|(tuple, v)| (tuple.clone(), Complex64::new(*v, 0.0)))
                .collect(),
        }
    }
}

/// The diagonal product `(P A Q)_{i1..im} = p_{i1} a_{i1..im} q_{i2}..q_{im}`
/// for diagonal matrices given by their diagonals. The support is unchanged
/// whenever no diagonal entry is zero.
pub fn diagonal_product(
    p: &[Complex64],
    a: &ComplexTensor,
    q: &[Complex64],
) -> Result<ComplexTensor, TensorError> {
    if p.len() != a.dim {
        return Err(TensorError::DimensionMismatch {
            expected: a.dim,
            found: p.len(),
        });
    }
    if q.len() != a.dim {
        return Err(TensorError::DimensionMismatch {
            expected: a.dim,
            found: q.len(),
        });
    }
    let entries = a
        .entries
        .iter()
        .map(|(tuple, value)| {
            let mut v = p[tuple[0] as usize] * value;
            for &idx in &tuple[1..] {
                v *= q[idx as usize];
            }
            (tuple.clone(), v)
        })
        .collect();
    Ok(ComplexTensor {
        order: a.order,
        dim: a.dim,
        entries,
    })
}

/// All distinct permutations of a tuple (multiset permutations).
pub fn distinct_permutations(tuple: &[u32]) -> Vec<Vec<u32>> {
    let mut sorted = tuple.to_vec();
    sorted.sort_unstable();
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(tuple.len());
    let mut used = vec![false; tuple.len()];
    fn rec(sorted: &[u32], used: &mut [bool], current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if current.len() == sorted.len() {
            out.push(current.clone());
            return;
        }
        let mut prev: Option<u32> = None;
        for i in 0..sorted.len() {
            if used[i] || prev == Some(sorted[i]) {
                continue;
            }
            prev = Some(sorted[i]);
            used[i] = true;
            current.push(sorted[i]);
            rec(sorted, used, current, out);
            current.pop();
            used[i] = false;
        }
    }
    rec(&sorted, &mut used, &mut current, &mut out);
    out
}
