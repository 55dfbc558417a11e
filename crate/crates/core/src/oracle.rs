//! Brute-force ground truth for spectral-circle eigenvectors.
//!
//! Every eigenvector for an eigenvalue of modulus `rho` of a weakly
//! irreducible nonnegative tensor has the form `D * perron` for a diagonal
//! phase matrix `D` (its componentwise modulus is the Perron vector), so
//! enumerating all phase vectors `t in [0, M)^n` with `t_1 = 0` is an
//! exhaustive search relative to the modulus `M`. The enumeration is exact
//! for the group of phase diagonals whose order divides `M`; raising `M` to
//! a multiple and comparing (the stabilization check) detects an
//! insufficient modulus.
//!
//! This module deliberately shares no code with the congruence-system path
//! it validates: hits are detected numerically through the eigenequation.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::phase::{EigenvarietyReport, PhaseDiagonal};
use crate::spectral::SpectralResult;
use crate::tensor::SparseTensor;

pub const DEFAULT_ORACLE_TOL: f64 = 1e-8;
pub const DEFAULT_ORACLE_BUDGET: u128 = 10_000_000;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("enumeration needs {required} phase vectors, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },
    #[error("modulus must be at least 1")]
    BadModulus,
}

/// One spectral-circle eigenvector found by enumeration: the eigenvalue is
/// `rho * e^(2 pi i * phase_numer / phase_denom)`.
#[derive(Debug, Clone, Serialize)]
pub struct OracleEigenpair {
    pub phase_numer: u64,
    pub phase_denom: u64,
    pub t: Vec<u64>,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OraclePhaseClass {
    pub numer: u64,
    pub denom: u64,
    pub count: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleResult {
    pub modulus: u64,
    pub rho: f64,
    /// Hits sorted by phase class, then by `t`.
    pub eigenpairs: Vec<OracleEigenpair>,
    /// Per-phase counts sorted by phase.
    pub classes: Vec<OraclePhaseClass>,
}

impl OracleResult {
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn count_at_phase(&self, numer: u64, denom: u64) -> usize {
        let (numer, denom) = reduce_fraction(numer, denom);
        self.classes
            .iter()
            .find(|c| c.numer == numer && c.denom == denom)
            .map_or(0, |c| c.count)
    }

    pub fn phase_zero_count(&self) -> usize {
        self.count_at_phase(0, 1)
    }

    pub fn t_vectors_at_phase(&self, numer: u64, denom: u64) -> Vec<&[u64]> {
        let (numer, denom) = reduce_fraction(numer, denom);
        self.eigenpairs
            .iter()
            .filter(|p| p.phase_numer == numer && p.phase_denom == denom)
            .map(|p| p.t.as_slice())
            .collect()
    }

    /// Modulus-independent signature of the projective eigenvector set:
    /// each hit as a vector of reduced fractions `t_i / modulus`.
    pub fn projective_signature(&self) -> std::collections::BTreeSet<Vec<(u64, u64)>> {
        self.eigenpairs
            .iter()
            .map(|p| {
                p.t.iter()
                    .map(|&ti| reduce_fraction(ti, self.modulus))
                    .collect()
            })
            .collect()
    }
}

fn reduce_fraction(numer: u64, denom: u64) -> (u64, u64) {
    debug_assert!(denom >= 1);
    let numer = numer % denom;
    let g = num_integer::gcd(numer, denom);
    if numer == 0 {
        (0, 1)
    } else {
        (numer / g, denom / g)
    }
}

/// Enumerates all phase vectors `t in [0, M)^n` with `t_1 = 0`, keeps those
/// for which `D_t * perron` solves the eigenequation for a single complex
/// eigenvalue of modulus `rho`, and bins them by eigenvalue phase.
///
/// The eigenvalue candidate is read off the component where the Perron
/// vector is largest, then verified against every component; the Perron
/// vector is strictly positive, so no division degenerates.
pub fn enumerate_spectral_circle(
    a: &SparseTensor,
    spectral: &SpectralResult,
    modulus: u64,
    tol: f64,
    budget: u128,
) -> Result<OracleResult, OracleError> {
    if modulus == 0 {
        return Err(OracleError::BadModulus);
    }
    let n = a.dim();
    let rho = spectral.rho;
    let perron = &spectral.perron;
    assert_eq!(perron.len(), n);
    let required = (modulus as u128)
        .checked_pow(n.saturating_sub(1) as u32)
        .ok_or(OracleError::BudgetExceeded {
            required: u128::MAX,
            budget,
        })?;
    if required > budget {
        return Err(OracleError::BudgetExceeded { required, budget });
    }

    let exponent = (a.order() - 1) as u32;
    let root = |k: u64| Complex64::from_polar(1.0, TAU * k as f64 / modulus as f64);
    let i_star = perron
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    let circle_tol = 1e-6 * rho.max(1.0);

    let mut by_phase: BTreeMap<(u64, u64), Vec<OracleEigenpair>> = BTreeMap::new();
    let mut t = vec![0u64; n];
    let mut x = vec![Complex64::default(); n];
    let mut xp = vec![Complex64::default(); n];
    let mut y = vec![Complex64::default(); n];
    'enumeration: loop {
        for i in 0..n {
            x[i] = perron[i] * root(t[i]);
            xp[i] = x[i].powu(exponent);
        }
        y.iter_mut().for_each(|v| *v = Complex64::default());
        for (tuple, value) in a.entries() {
            let mut term = Complex64::new(value, 0.0);
            for &idx in &tuple[1..] {
                term *= x[idx as usize];
            }
            y[tuple[0] as usize] += term;
        }
        let lambda = y[i_star] / xp[i_star];
        let mut worst = 0.0f64;
        let mut scale = 0.0f64;
        for i in 0..n {
            worst = worst.max((y[i] - lambda * xp[i]).norm());
            scale = scale.max(xp[i].norm());
        }
        if worst <= tol * scale && (lambda.norm() - rho).abs() <= circle_tol {
            let k_float = lambda.arg().rem_euclid(TAU) / TAU * modulus as f64;
            let k = (k_float.round() as u64) % modulus;
            let snapped = rho * root(k);
            debug_assert!(
                (lambda - snapped).norm() <= circle_tol,
                "eigenvalue phase is not a multiple of 2 pi / M"
            );
            let key = reduce_fraction(k, modulus);
            by_phase.entry(key).or_default().push(OracleEigenpair {
                phase_numer: key.0,
                phase_denom: key.1,
                t: t.clone(),
                residual: worst / scale,
            });
        }

        // advance the counter over positions 1..n (t[0] stays 0)
        let mut pos = 1;
        loop {
            if pos >= n {
                break 'enumeration;
            }
            t[pos] += 1;
            if t[pos] < modulus {
                break;
            }
            t[pos] = 0;
            pos += 1;
        }
    }

    let mut classes = Vec::with_capacity(by_phase.len());
    let mut eigenpairs = Vec::new();
    let mut keys: Vec<(u64, u64)> = by_phase.keys().copied().collect();
    keys.sort_by(|a, b| (a.0 as u128 * b.1 as u128).cmp(&(b.0 as u128 * a.1 as u128)));
    for key in keys {
        let mut hits = by_phase.remove(&key).unwrap();
        hits.sort_by(|a, b| a.t.cmp(&b.t));
        classes.push(OraclePhaseClass {
            numer: key.0,
            denom: key.1,
            count: hits.len(),
        });
        eigenpairs.extend(hits);
    }
    Ok(OracleResult {
        modulus,
        rho,
        eigenpairs,
        classes,
    })
}

/// Runs the enumeration at `modulus` and `2 * modulus` repeatedly (within
/// budget) until the projective eigenvector set stops changing. Returns the
/// final result and whether stabilization was observed.
pub fn stabilized_enumeration(
    a: &SparseTensor,
    spectral: &SpectralResult,
    start_modulus: u64,
    tol: f64,
    budget: u128,
) -> Result<(OracleResult, bool), OracleError> {
    const MAX_DOUBLINGS: usize = 6;
    let mut current = enumerate_spectral_circle(a, spectral, start_modulus, tol, budget)?;
    for _ in 0..MAX_DOUBLINGS {
        let Some(next_modulus) = current.modulus.checked_mul(2) else {
            return Ok((current, false));
        };
        let next = match enumerate_spectral_circle(a, spectral, next_modulus, tol, budget) {
            Ok(r) => r,
            Err(OracleError::BudgetExceeded { .. }) => return Ok((current, false)),
            Err(e) => return Err(e),
        };
        if next.projective_signature() == current.projective_signature() {
            return Ok((current, true));
        }
        current = next;
    }
    Ok((current, false))
}

/// Outcome of validating an eigenvariety report against the oracle.
#[derive(Debug, Clone, Serialize)]
pub enum OracleVerdict {
    Match {
        oracle: OracleResult,
    },
    Mismatch {
        problems: Vec<String>,
        oracle: OracleResult,
        report: EigenvarietyReport,
    },
    Skipped {
        reason: String,
    },
}

impl OracleVerdict {
    pub fn is_match(&self) -> bool {
        matches!(self, OracleVerdict::Match { .. })
    }
}

/// Checks a congruence-path report by independent enumeration.
///
/// The enumeration runs at the smallest modulus covering both the report's
/// solution lattice and every coset representative (their least common
/// multiple), so each nonempty rotation class is seen in full. For an exact
/// report every per-phase count must equal `s`, the phase classes must be
/// exactly `{2 pi j / ell}` when the cyclic index is theorem-backed, and the
/// group spanned by the generators must reproduce the oracle's phase-zero
/// list element by element. For a report flagged inexact, `s` and the span
/// are validated as lower bounds (the whole point of the flag is that the
/// modulus may miss solutions).
pub fn cross_validate(
    a: &SparseTensor,
    spectral: &SpectralResult,
    report: &EigenvarietyReport,
    tol: f64,
    budget: u128,
) -> OracleVerdict {
    let mut covering = report.modulus_used as u128;
    for rep in report.cosets.iter().flatten() {
        covering = num_integer::lcm(covering, rep.modulus as u128);
    }
    let Ok(covering) = u64::try_from(covering) else {
        return OracleVerdict::Skipped {
            reason: "covering modulus exceeds u64".to_string(),
        };
    };
    let oracle = match enumerate_spectral_circle(a, spectral, covering, tol, budget) {
        Ok(o) => o,
        Err(e) => {
            return OracleVerdict::Skipped {
                reason: e.to_string(),
            }
        }
    };
    let mut problems = Vec::new();

    let zero_count = oracle.phase_zero_count() as u64;
    if report.exact && zero_count != report.s {
        problems.push(format!(
            "phase-0 count {zero_count} != stabilizing index {}",
            report.s
        ));
    }
    if !report.exact && zero_count < report.s {
        problems.push(format!(
            "phase-0 count {zero_count} below the reported lower bound {}",
            report.s
        ));
    }
    if report.exact {
        for class in &oracle.classes {
            if class.count as u64 != report.s {
                problems.push(format!(
                    "phase {}/{} has {} eigenvectors, expected {}",
                    class.numer, class.denom, class.count, report.s
                ));
            }
        }
    }
    if report.ell_exact {
        let expected: std::collections::BTreeSet<(u64, u64)> = (0..report.ell)
            .map(|j| reduce_fraction(j, report.ell))
            .collect();
        let found: std::collections::BTreeSet<(u64, u64)> =
            oracle.classes.iter().map(|c| (c.numer, c.denom)).collect();
        if expected != found {
            problems.push(format!(
                "phase classes {found:?} differ from {{2 pi j / {}}}",
                report.ell
            ));
        }
    }

    // Span the generators, lift everything onto the covering modulus, and
    // compare the class lists element by element (skipped when s is too
    // large to materialize).
    const SPAN_CAP: u64 = 1 << 20;
    if report.s <= SPAN_CAP {
        let span = span_generators(&report.generators, report.modulus_used, a.dim());
        if span.len() as u64 != report.s {
            problems.push(format!(
                "generators span {} elements, expected {}",
                span.len(),
                report.s
            ));
        }
        let lift = covering / report.modulus_used;
        let lifted: std::collections::BTreeSet<Vec<u64>> = span
            .iter()
            .map(|e| e.iter().map(|&v| v * lift).collect())
            .collect();
        let oracle_zero: std::collections::BTreeSet<Vec<u64>> = oracle
            .t_vectors_at_phase(0, 1)
            .into_iter()
            .map(<[u64]>::to_vec)
            .collect();
        if report.exact && lifted != oracle_zero {
            problems.push("generator span differs from the oracle phase-0 list".to_string());
        }
        if !report.exact && !lifted.is_subset(&oracle_zero) {
            problems.push("generator span not contained in the oracle phase-0 list".to_string());
        }
        if report.exact {
            for (j, rep) in report.cosets.iter().enumerate() {
                let Some(rep) = rep else { continue };
                let rep_lift = covering / rep.modulus;
                let shifted: std::collections::BTreeSet<Vec<u64>> = lifted
                    .iter()
                    .map(|e| {
                        e.iter()
                            .zip(&rep.t)
                            .map(|(&a, &b)| (a + b * rep_lift) % covering)
                            .collect()
                    })
                    .collect();
                let oracle_j: std::collections::BTreeSet<Vec<u64>> = oracle
                    .t_vectors_at_phase(j as u64, report.ell)
                    .into_iter()
                    .map(<[u64]>::to_vec)
                    .collect();
                if shifted != oracle_j {
                    problems.push(format!(
                        "coset {j} built from the representative differs from the oracle list"
                    ));
                }
            }
        }
    }

    if problems.is_empty() {
        OracleVerdict::Match { oracle }
    } else {
        OracleVerdict::Mismatch {
            problems,
            oracle,
            report: report.clone(),
        }
    }
}

fn span_generators(
    generators: &[PhaseDiagonal],
    modulus: u64,
    n: usize,
) -> std::collections::BTreeSet<Vec<u64>> {
    let mut span = std::collections::BTreeSet::new();
    span.insert(vec![0u64; n]);
    loop {
        let mut grew = false;
        let snapshot: Vec<Vec<u64>> = span.iter().cloned().collect();
        for e in &snapshot {
            for g in generators {
                debug_assert_eq!(g.modulus, modulus);
                let sum: Vec<u64> = e
                    .iter()
                    .zip(&g.t)
                    .map(|(&a, &b)| (a + b) % modulus)
                    .collect();
                grew |= span.insert(sum);
            }
        }
        if !grew {
            return span;
        }
    }
}
