//! Phase diagonals, the stabilizing index and the cyclic index.
//!
//! A diagonal matrix `D = diag(e^{2 pi i t_1 / M}, ..., e^{2 pi i t_n / M})`
//! with `t_1 = 0` satisfies `A = e^{-2 pi i j / ell} D^{-(m-1)} A D` exactly
//! when, for every nonzero entry `a_{i1..im}`,
//!
//! ```text
//! (m-1) t_{i1} - (t_{i2} + ... + t_{im})  =  -M j / ell   (mod M)
//! ```
//!
//! so the phase diagonals fixing `A` form the solution group of an integer
//! congruence system read off the support. Solving it by Smith normal form
//! yields the stabilizing index `s(A)` (the number of spectral-circle
//! eigenvectors up to scalar), generators of the group, coset
//! representatives per rotation class and, for combinatorially symmetric
//! tensors, the cyclic index `ell`.
//!
//! Moduli are theorem-backed in two cases: `M = m` for combinatorially
//! symmetric tensors (every phase diagonal satisfies `D^m = I`) and
//! `M = (m-1)^r` for irreducible tensors, `r` the number of weakly connected
//! components of the solid graph. Merely weakly irreducible tensors get a
//! heuristic modulus and an `exact = false` flag.

pub mod congruence;
pub mod snf;

use std::collections::BTreeSet;
use std::f64::consts::TAU;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

use crate::graph::StructureProfile;
use crate::oracle;
use crate::spectral::{eigen_residual, SpectralError, SpectralResult};
use crate::tensor::{SparseTensor, TensorError};

pub use congruence::{CongruenceSystem, Enumeration};
pub use snf::{smith_normal_form, IntMatrix, SmithDecomposition};

#[derive(Debug, Error)]
pub enum PhaseError {
    #[error(
        "tensor is not weakly irreducible; the stabilizing index is defined through \
         the decomposition into communication classes"
    )]
    NotWeaklyIrreducible,
    #[error("cyclic candidate {ell} does not divide the modulus {modulus}")]
    ModulusNotDivisible { ell: u64, modulus: u64 },
    #[error("phase index {j} out of range for cyclic index {ell}")]
    PhaseOutOfRange { j: u64, ell: u64 },
    #[error("right-hand side is not homogeneous")]
    NonHomogeneous,
    #[error("stabilizing index {count} exceeds the 64-bit report range")]
    CountOverflow { count: BigUint },
    #[error("modulus computation overflowed: {what}")]
    ModulusOverflow { what: String },
    #[error(
        "Smith-normal-form count {snf} disagrees with the oracle count {oracle} \
         at modulus {modulus}"
    )]
    OracleDisagreement { snf: u64, oracle: u64, modulus: u64 },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

/// Diagonal phase matrix `diag(e^{2 pi i t_i / M})`, normalized to `t_1 = 0`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct PhaseDiagonal {
    pub modulus: u64,
    pub t: Vec<u64>,
}

impl PhaseDiagonal {
    pub fn new(modulus: u64, t: Vec<u64>) -> Self {
        assert!(modulus >= 1);
        assert_eq!(t.first().map(|&v| v % modulus), Some(0), "t_1 must be 0");
        assert!(t.iter().all(|&v| v < modulus));
        Self { modulus, t }
    }

    pub fn identity(modulus: u64, n: usize) -> Self {
        Self::new(modulus, vec![0; n])
    }

    pub fn is_identity(&self) -> bool {
        self.t.iter().all(|&v| v == 0)
    }

    /// The diagonal as complex numbers on the unit circle.
    pub fn diagonal(&self) -> Vec<Complex64> {
        self.t
            .iter()
            .map(|&k| Complex64::from_polar(1.0, TAU * k as f64 / self.modulus as f64))
            .collect()
    }

    /// `D * v` for a real vector `v`.
    pub fn apply_to(&self, v: &[f64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.t.len());
        self.diagonal()
            .into_iter()
            .zip(v)
            .map(|(d, &vi)| d * vi)
            .collect()
    }

    /// Rescales the phase vector onto a multiple of its modulus.
    pub fn lift_to(&self, modulus: u64) -> Self {
        assert_eq!(modulus % self.modulus, 0, "lift target must be a multiple");
        let factor = modulus / self.modulus;
        Self::new(modulus, self.t.iter().map(|&v| v * factor).collect())
    }
}

/// Tuning knobs shared by the phase and oracle paths.
#[derive(Debug, Clone)]
pub struct PhaseOptions {
    /// Largest eigenvector list materialized before falling back to
    /// generators.
    pub enumeration_cap: usize,
    /// Cap on oracle enumeration size `M^(n-1)`.
    pub oracle_budget: u128,
    /// Residual tolerance for accepting a synthesized eigenvector; looser
    /// than the spectral tolerance because the Perron vector error is
    /// amplified through degree-(m-1) products.
    pub residual_tol: f64,
}

impl Default for PhaseOptions {
    fn default() -> Self {
        Self {
            enumeration_cap: 10_000,
            oracle_budget: oracle::DEFAULT_ORACLE_BUDGET,
            residual_tol: oracle::DEFAULT_ORACLE_TOL,
        }
    }
}

/// Everything known about the spectral-circle eigenvector structure.
#[derive(Debug, Clone, Serialize)]
pub struct EigenvarietyReport {
    /// Stabilizing index: the number of eigenvectors for `rho` up to scalar.
    pub s: u64,
    /// Cyclic index (or the best certified lower bound when `ell_exact` is
    /// false).
    pub ell: u64,
    /// Modulus the congruence system was solved over.
    pub modulus_used: u64,
    /// Whether `modulus_used` is theorem-backed, making `s` exact.
    pub exact: bool,
    /// Whether `ell` came from the theorem-backed congruence path rather
    /// than oracle enumeration.
    pub ell_exact: bool,
    /// Canonical generators of the phase-diagonal group fixing `A`.
    pub generators: Vec<PhaseDiagonal>,
    /// One representative phase diagonal per rotation class `j in [0, ell)`.
    pub cosets: Vec<Option<PhaseDiagonal>>,
}

/// The congruence system for membership in the rotation class `j` of `ell`:
/// one row per distinct support tuple, coefficients `+(m-1)` at the head
/// index and `-1` per tail occurrence, right-hand side `-M j / ell mod M`.
pub fn constraint_system(
    a: &SparseTensor,
    j: u64,
    ell: u64,
    modulus: u64,
) -> Result<CongruenceSystem, PhaseError> {
    assert!(ell >= 1);
    if j >= ell {
        return Err(PhaseError::PhaseOutOfRange { j, ell });
    }
    if j != 0 && !modulus.is_multiple_of(ell) {
        return Err(PhaseError::ModulusNotDivisible { ell, modulus });
    }
    if modulus > i64::MAX as u64 {
        return Err(PhaseError::ModulusOverflow {
            what: format!("modulus {modulus} too large for the constraint builder"),
        });
    }
    let n = a.dim();
    let order = a.order();
    let rhs = if j == 0 {
        0i64
    } else {
        let shift = (modulus / ell) as u128 * j as u128 % modulus as u128;
        (modulus - shift as u64) as i64 % modulus as i64
    };
    let rows = a.entries().map(|(tuple, _)| {
        let mut row = vec![0i64; n];
        row[tuple[0] as usize] += (order - 1) as i64;
        for &idx in &tuple[1..] {
            row[idx as usize] -= 1;
        }
        (row, rhs)
    });
    Ok(CongruenceSystem::new(n, modulus, rows))
}

/// The theorem-backed (or fallback) modulus for enumerating the group of
/// phase diagonals fixing `A`.
fn modulus_policy(a: &SparseTensor, profile: &StructureProfile) -> Result<(u64, bool), PhaseError> {
    let m = a.order() as u64;
    let n = a.dim();
    if a.is_combinatorially_symmetric() {
        return Ok((m, true));
    }
    if profile.irreducible {
        let r = profile.solid_component_count as u32;
        let modulus = (m - 1)
            .checked_pow(r)
            .ok_or_else(|| PhaseError::ModulusOverflow {
                what: format!("(m-1)^r = {}^{r}", m - 1),
            })?;
        return Ok((modulus, true));
    }
    // weakly irreducible only: no theorem supplies a modulus, try
    // lcm(m, (m-1)^(n-1)) and flag the result as inexact
    let power = (m - 1)
        .checked_pow((n - 1) as u32)
        .ok_or_else(|| PhaseError::ModulusOverflow {
            what: format!("(m-1)^(n-1) = {}^{}", m - 1, n - 1),
        })?;
    let modulus = num_integer::lcm(m, power);
    Ok((modulus, false))
}

/// Stabilizing index `s(A)` with generators, cyclic index and coset
/// representatives, for a weakly irreducible nonnegative tensor.
///
/// Combinatorially symmetric irreducible tensors short-circuit to `s = 1`
/// (the orders `m` and `(m-1)^r` are coprime). The inexact fallback path is
/// cross-checked against the oracle whenever the budget permits; a
/// disagreement there is a hard error, not a silent report.
pub fn stabilizing_index(
    a: &SparseTensor,
    profile: &StructureProfile,
    spectral: &SpectralResult,
    opts: &PhaseOptions,
) -> Result<EigenvarietyReport, PhaseError> {
    if !profile.weakly_irreducible {
        return Err(PhaseError::NotWeaklyIrreducible);
    }
    let n = a.dim();
    let comb_symmetric = a.is_combinatorially_symmetric();
    let (modulus, exact) = modulus_policy(a, profile)?;

    let (s, generators) = if comb_symmetric && profile.irreducible {
        (1u64, Vec::new())
    } else {
        let sys = constraint_system(a, 0, 1, modulus)?.normalized();
        let count = sys.count_solutions()?;
        let s = count.to_u64().ok_or(PhaseError::CountOverflow { count })?;
        let generators = match sys.enumerate(opts.enumeration_cap) {
            Enumeration::Full(elements) => canonical_generators(&elements, modulus),
            Enumeration::Capped { generators, .. } => generators,
        };
        (
            s,
            generators
                .into_iter()
                .map(|t| PhaseDiagonal::new(modulus, t))
                .collect(),
        )
    };

    if !exact {
        // dual route: the SNF count must match brute-force enumeration
        match oracle::enumerate_spectral_circle(
            a,
            spectral,
            modulus,
            opts.residual_tol,
            opts.oracle_budget,
        ) {
            Ok(o) => {
                let brute = o.phase_zero_count() as u64;
                if brute != s {
                    return Err(PhaseError::OracleDisagreement {
                        snf: s,
                        oracle: brute,
                        modulus,
                    });
                }
            }
            Err(oracle::OracleError::BudgetExceeded { .. }) => {}
            Err(_) => {}
        }
    }

    let (ell, ell_exact, cosets) = cyclic_index_parts(
        a,
        comb_symmetric,
        profile.irreducible,
        modulus,
        n,
        spectral,
        opts,
    )?;

    Ok(EigenvarietyReport {
        s,
        ell,
        modulus_used: modulus,
        exact,
        ell_exact,
        generators,
        cosets,
    })
}

/// `(ell, theorem-backed, coset representatives)`.
pub type CyclicIndexParts = (u64, bool, Vec<Option<PhaseDiagonal>>);

/// Cyclic index `ell` with one coset representative per rotation class.
///
/// Combinatorially symmetric tensors use the congruence path over modulus
/// `m` (`ell` divides `m` and all phase diagonals have `m`-th-root phases).
/// Irreducible tensors use the congruence path over `ell (m-1)^r` per
/// candidate, which is also exact. Merely weakly irreducible tensors fall
/// back to oracle enumeration with modulus doubling, reported as a
/// certified lower bound.
pub fn cyclic_index(
    a: &SparseTensor,
    profile: &StructureProfile,
    spectral: &SpectralResult,
    opts: &PhaseOptions,
) -> Result<CyclicIndexParts, PhaseError> {
    if !profile.weakly_irreducible {
        return Err(PhaseError::NotWeaklyIrreducible);
    }
    let (modulus, _) = modulus_policy(a, profile)?;
    cyclic_index_parts(
        a,
        a.is_combinatorially_symmetric(),
        profile.irreducible,
        modulus,
        a.dim(),
        spectral,
        opts,
    )
}

fn cyclic_index_parts(
    a: &SparseTensor,
    comb_symmetric: bool,
    irreducible: bool,
    modulus: u64,
    n: usize,
    spectral: &SpectralResult,
    opts: &PhaseOptions,
) -> Result<CyclicIndexParts, PhaseError> {
    if comb_symmetric {
        let m = a.order() as u64;
        let (ell, cosets) = cyclic_index_symmetric(a, m, n)?;
        return Ok((ell, true, cosets));
    }
    if irreducible {
        if let Some(result) = cyclic_index_irreducible(a, modulus, n)? {
            return Ok(result);
        }
    }
    Ok(cyclic_index_oracle(a, spectral, modulus, opts))
}

fn cyclic_index_symmetric(
    a: &SparseTensor,
    m: u64,
    n: usize,
) -> Result<(u64, Vec<Option<PhaseDiagonal>>), PhaseError> {
    for ell in divisors_descending(m) {
        if ell == 1 {
            break;
        }
        let sys = constraint_system(a, 1, ell, m)?.normalized();
        if let Some(witness) = sys.solve_witness() {
            // powers of the j = 1 witness represent every class
            let cosets = (0..ell)
                .map(|j| {
                    let t: Vec<u64> = witness
                        .iter()
                        .map(|&v| (v as u128 * j as u128 % m as u128) as u64)
                        .collect();
                    debug_assert!(constraint_system(a, j, ell, m)
                        .expect("divisor")
                        .normalized()
                        .satisfied_by(&t));
                    Some(PhaseDiagonal::new(m, t))
                })
                .collect();
            return Ok((ell, cosets));
        }
    }
    Ok((1, vec![Some(PhaseDiagonal::identity(m, n))]))
}

/// Largest searched cyclic index for the irreducible congruence path; the
/// true value is bounded by the spectrum size `n (m-1)^{n-1}`, so beyond
/// this cap the result falls back to the inexact oracle estimate.
const CYCLIC_SEARCH_CAP: u64 = 4096;

/// Exact cyclic index of an irreducible tensor whose phase group for the
/// spectral radius has order dividing `base_modulus = (m-1)^r`.
///
/// Iterating `A = e^{-2 pi i / ell} D^{-(m-1)} A D` shows `D^ell` fixes `A`
/// outright, so `D^{ell (m-1)^r} = I`: a rotation class `ell` is nonempty
/// exactly when its congruence system is solvable over `Z_{ell (m-1)^r}`.
/// The candidates that pass are precisely the divisors of the cyclic index,
/// which the prime-by-prime ascent reconstructs. Returns `None` when the
/// spectrum-size bound overflows the search cap.
fn cyclic_index_irreducible(
    a: &SparseTensor,
    base_modulus: u64,
    n: usize,
) -> Result<Option<CyclicIndexParts>, PhaseError> {
    // the rotation orbit of rho consists of distinct roots of the
    // characteristic polynomial, whose degree is n (m-1)^{n-1}
    let m = a.order() as u64;
    let bound = (n as u64).saturating_mul((m - 1).saturating_pow((n as u32).saturating_sub(1)));
    if bound > CYCLIC_SEARCH_CAP {
        return Ok(None);
    }
    let solvable = |ell: u64| -> Result<Option<Vec<u64>>, PhaseError> {
        let Some(modulus) = ell.checked_mul(base_modulus) else {
            return Ok(None);
        };
        let sys = constraint_system(a, 1, ell, modulus)?.normalized();
        Ok(sys.solve_witness())
    };

    let mut ell = 1u64;
    let mut witness: Option<Vec<u64>> = None;
    for p in primes_up_to(bound) {
        while ell * p <= bound {
            match solvable(ell * p)? {
                Some(w) => {
                    ell *= p;
                    witness = Some(w);
                }
                None => break,
            }
        }
    }

    let modulus = ell * base_modulus;
    let cosets = match witness {
        None => vec![Some(PhaseDiagonal::identity(base_modulus, n))],
        Some(w) => (0..ell)
            .map(|j| {
                let t: Vec<u64> = w
                    .iter()
                    .map(|&v| (v as u128 * j as u128 % modulus as u128) as u64)
                    .collect();
                debug_assert!(constraint_system(a, j, ell, modulus)
                    .expect("divides")
                    .normalized()
                    .satisfied_by(&t));
                Some(PhaseDiagonal::new(modulus, t))
            })
            .collect(),
    };
    Ok(Some((ell, true, cosets)))
}

fn primes_up_to(bound: u64) -> Vec<u64> {
    let mut primes = Vec::new();
    'outer: for candidate in 2..=bound {
        for &p in &primes {
            if p * p > candidate {
                break;
            }
            if candidate % p == 0 {
                continue 'outer;
            }
        }
        primes.push(candidate);
    }
    primes
}

fn cyclic_index_oracle(
    a: &SparseTensor,
    spectral: &SpectralResult,
    start_modulus: u64,
    opts: &PhaseOptions,
) -> CyclicIndexParts {
    let fallback = |m: u64| (1u64, false, vec![Some(PhaseDiagonal::identity(m, a.dim()))]);
    let result = match oracle::stabilized_enumeration(
        a,
        spectral,
        start_modulus,
        opts.residual_tol,
        opts.oracle_budget,
    ) {
        Ok((result, _stabilized)) => result,
        Err(_) => return fallback(start_modulus),
    };
    let ell = result.class_count() as u64;
    if ell == 0 {
        return fallback(result.modulus);
    }
    let cosets = (0..ell)
        .map(|j| {
            result
                .t_vectors_at_phase(j, ell)
                .first()
                .map(|t| PhaseDiagonal::new(result.modulus, t.to_vec()))
        })
        .collect();
    (ell, false, cosets)
}

fn divisors_descending(m: u64) -> Vec<u64> {
    let mut divisors: Vec<u64> = (1..=m).filter(|d| m.is_multiple_of(*d)).collect();
    divisors.reverse();
    divisors
}

/// Greedy minimal generating set over the sorted element list; canonical for
/// a given group, independent of how the group was computed.
fn canonical_generators(elements: &[Vec<u64>], modulus: u64) -> Vec<Vec<u64>> {
    let Some(first) = elements.first() else {
        return Vec::new();
    };
    let n = first.len();
    let target: BTreeSet<&Vec<u64>> = elements.iter().collect();
    let mut generators: Vec<Vec<u64>> = Vec::new();
    let mut span: BTreeSet<Vec<u64>> = BTreeSet::new();
    span.insert(vec![0u64; n]);
    for element in elements {
        if span.len() == target.len() {
            break;
        }
        if span.contains(element) {
            continue;
        }
        generators.push(element.clone());
        // re-close the span under addition mod M
        loop {
            let mut grew = false;
            let snapshot: Vec<Vec<u64>> = span.iter().cloned().collect();
            for e in &snapshot {
                for g in &generators {
                    let sum: Vec<u64> = e.iter().zip(g).map(|(&x, &y)| (x + y) % modulus).collect();
                    grew |= span.insert(sum);
                }
            }
            if !grew {
                break;
            }
        }
    }
    debug_assert_eq!(span.len(), target.len(), "generators must span the group");
    generators
}

/// The synthesized spectral-circle eigenvectors for rotation class `j`.
#[derive(Debug, Clone)]
pub enum EigenvectorSet {
    /// Complete list `{D * perron : D in the j-th class}`, each verified
    /// through the eigenequation, in canonical phase-vector order.
    Full(Vec<Vec<Complex64>>),
    /// The class is too large to list; the group generators stand in.
    Capped { generators: Vec<PhaseDiagonal> },
}

/// Eigenvectors for the eigenvalue `rho e^{2 pi i j / ell}`, built by
/// applying each phase diagonal of class `j` to the Perron vector and
/// verified by residual before inclusion.
pub fn eigenvectors(
    a: &SparseTensor,
    spectral: &SpectralResult,
    report: &EigenvarietyReport,
    j: u64,
    opts: &PhaseOptions,
) -> Result<EigenvectorSet, PhaseError> {
    if j >= report.ell {
        return Err(PhaseError::PhaseOutOfRange { j, ell: report.ell });
    }
    let lambda = Complex64::from_polar(spectral.rho, TAU * j as f64 / report.ell as f64);

    // class-j phase diagonals: representative + the homogeneous group,
    // lifted to the representative's modulus when the oracle path produced
    // it at a doubling of the report modulus
    let rep = match &report.cosets.get(j as usize) {
        Some(Some(rep)) => rep.clone(),
        _ => return Ok(EigenvectorSet::Full(Vec::new())),
    };
    let sys = constraint_system(a, 0, 1, report.modulus_used)?.normalized();
    let group = match sys.enumerate(opts.enumeration_cap) {
        Enumeration::Full(elements) => elements,
        Enumeration::Capped { .. } => {
            return Ok(EigenvectorSet::Capped {
                generators: report.generators.clone(),
            })
        }
    };
    let lift = rep.modulus / report.modulus_used;
    assert_eq!(
        rep.modulus % report.modulus_used,
        0,
        "coset representative modulus must be a multiple of the report modulus"
    );

    let mut ts: Vec<Vec<u64>> = group
        .into_iter()
        .map(|t| {
            t.iter()
                .zip(&rep.t)
                .map(|(&g, &r)| (g * lift + r) % rep.modulus)
                .collect()
        })
        .collect();
    ts.sort_unstable();
    let mut out = Vec::with_capacity(ts.len());
    for t in ts {
        let d = PhaseDiagonal::new(rep.modulus, t);
        let x = d.apply_to(&spectral.perron);
        if eigen_residual(a, lambda, &x)? <= opts.residual_tol {
            out.push(x);
        }
    }
    Ok(EigenvectorSet::Full(out))
}
