//! Spectral radius and Perron vector of weakly irreducible nonnegative
//! tensors.
//!
//! The iteration runs on the shifted tensor `B = A + I`, whose diagonal makes
//! it weakly primitive whenever `A` is weakly irreducible, so the normalized
//! power map `x <- normalize((B x^{m-1})^{[1/(m-1)]})` converges. At every
//! iterate the Collatz-Wielandt ratios `(B x^{m-1})_i / x_i^{m-1}` bracket
//! `rho(B) = rho(A) + 1`; the bracket is monotone and its width is the
//! termination and certification criterion.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::graph::is_weakly_irreducible;
use crate::tensor::{SparseTensor, TensorError};

/// Fixed shift: the iteration always runs on `A + I`.
const SHIFT: f64 = 1.0;

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 100_000;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("tensor has no entries; the spectral radius of the zero tensor is 0")]
    ZeroTensor,
    #[error(
        "tensor is not weakly irreducible; decompose it into communication classes \
         and take per-class spectral radii instead"
    )]
    NotWeaklyIrreducible,
    #[error("no convergence after {iterations} iterations; best bracket [{lower}, {upper}]")]
    MaxIterExceeded {
        lower: f64,
        upper: f64,
        iterations: usize,
    },
    #[error("component {index} of the vector is not strictly positive")]
    NonpositiveComponent { index: usize },
    #[error("eigen residual of the zero vector is undefined")]
    ZeroVector,
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

/// Certified spectral radius computation.
///
/// `lower <= rho <= upper` always holds, the bracket being the final
/// Collatz-Wielandt ratios shifted back to `A`. `perron` is strictly
/// positive with maximum component exactly 1.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralResult {
    pub rho: f64,
    pub perron: Vec<f64>,
    pub lower: f64,
    pub upper: f64,
    pub iterations: usize,
    pub residual: f64,
}

/// Collatz-Wielandt ratios of `A` at a strictly positive vector:
/// `lower = min_i (A x^{m-1})_i / x_i^{m-1}`, `upper = max_i`. The lower
/// bound never exceeds `rho(A)`; the upper bound dominates `rho(A)` when `A`
/// is weakly irreducible.
pub fn cw_bounds(a: &SparseTensor, x: &[f64]) -> Result<(f64, f64), SpectralError> {
    if let Some(index) = x.iter().position(|&v| v <= 0.0 || !v.is_finite()) {
        return Err(SpectralError::NonpositiveComponent { index });
    }
    let y = a.apply_real(x)?;
    let exponent = (a.order() - 1) as i32;
    let mut lower = f64::INFINITY;
    let mut upper = f64::NEG_INFINITY;
    for i in 0..x.len() {
        let ratio = y[i] / x[i].powi(exponent);
        lower = lower.min(ratio);
        upper = upper.max(ratio);
    }
    Ok((lower, upper))
}

/// Scale-invariant eigenequation residual
/// `max_i |(A x^{m-1})_i - lambda x_i^{m-1}| / max_i |x_i|^{m-1}`.
pub fn eigen_residual(
    a: &SparseTensor,
    lambda: Complex64,
    x: &[Complex64],
) -> Result<f64, SpectralError> {
    if x.iter().all(|v| v.norm() == 0.0) {
        return Err(SpectralError::ZeroVector);
    }
    let y = a.apply(x)?;
    let exponent = (a.order() - 1) as u32;
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for i in 0..x.len() {
        let xp = x[i].powu(exponent);
        worst = worst.max((y[i] - lambda * xp).norm());
        scale = scale.max(xp.norm());
    }
    Ok(worst / scale)
}

/// Spectral radius of a nonzero weakly irreducible tensor with default
/// tolerance `1e-12` and iteration cap `1e5`.
pub fn spectral_radius(a: &SparseTensor) -> Result<SpectralResult, SpectralError> {
    spectral_radius_with(a, DEFAULT_TOL, DEFAULT_MAX_ITER)
}

pub fn spectral_radius_with(
    a: &SparseTensor,
    tol: f64,
    max_iter: usize,
) -> Result<SpectralResult, SpectralError> {
    iterate(a, tol, max_iter, |_, _| {})
}

/// Core loop; `on_bracket` observes the (unshifted) bracket at every
/// iteration so tests can assert monotonicity.
pub(crate) fn iterate(
    a: &SparseTensor,
    tol: f64,
    max_iter: usize,
    mut on_bracket: impl FnMut(f64, f64),
) -> Result<SpectralResult, SpectralError> {
    if a.is_zero() {
        return Err(SpectralError::ZeroTensor);
    }
    if !is_weakly_irreducible(a) {
        return Err(SpectralError::NotWeaklyIrreducible);
    }
    let n = a.dim();
    let exponent = (a.order() - 1) as i32;
    let root = 1.0 / exponent as f64;
    let shifted = a.add_identity(SHIFT);

    let mut x = vec![1.0; n];
    let mut prev_lower = f64::NEG_INFINITY;
    let mut prev_upper = f64::INFINITY;
    for iteration in 1..=max_iter {
        let y = shifted.apply_real(&x)?;
        let mut lower = f64::INFINITY;
        let mut upper = f64::NEG_INFINITY;
        for i in 0..n {
            let ratio = y[i] / x[i].powi(exponent);
            lower = lower.min(ratio);
            upper = upper.max(ratio);
        }
        on_bracket(lower, upper);
        // Exact arithmetic gives a monotone bracket; allow rounding slack.
        let slack = 1e-12 * upper.abs().max(1.0);
        debug_assert!(lower >= prev_lower - slack, "lower bound regressed");
        debug_assert!(upper <= prev_upper + slack, "upper bound regressed");
        prev_lower = prev_lower.max(lower);
        prev_upper = prev_upper.min(upper);

        if upper - lower <= tol * (upper - SHIFT).max(1.0) {
            let rho = (lower + upper) / 2.0 - SHIFT;
            debug_assert!(x.iter().all(|&v| v > 0.0));
            let residual = {
                let ax = a.apply_real(&x)?;
                (0..n)
                    .map(|i| (ax[i] - rho * x[i].powi(exponent)).abs())
                    .fold(0.0f64, f64::max)
            };
            return Ok(SpectralResult {
                rho,
                perron: x,
                lower: lower - SHIFT,
                upper: upper - SHIFT,
                iterations: iteration,
                residual,
            });
        }

        let mut next: Vec<f64> = y.iter().map(|&v| v.powf(root)).collect();
        let max = next.iter().cloned().fold(0.0f64, f64::max);
        for v in &mut next {
            *v /= max;
        }
        x = next;
    }
    Err(SpectralError::MaxIterExceeded {
        lower: prev_lower - SHIFT,
        upper: prev_upper - SHIFT,
        iterations: max_iter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::distinct_permutations;

    fn swap_tensor() -> SparseTensor {
        SparseTensor::new(3, 2, [(vec![0, 1, 1], 1.0), (vec![1, 0, 0], 1.0)]).unwrap()
    }

    fn single_edge() -> SparseTensor {
        SparseTensor::new(
            3,
            3,
            distinct_permutations(&[0, 1, 2])
                .into_iter()
                .map(|p| (p, 0.5)),
        )
        .unwrap()
    }

    #[test]
    fn cw_bounds_pin_swap_tensor() {
        let (lo, hi) = cw_bounds(&swap_tensor(), &[1.0, 1.0]).unwrap();
        assert_eq!((lo, hi), (1.0, 1.0));
    }

    #[test]
    fn cw_bounds_pin_single_edge() {
        let (lo, hi) = cw_bounds(&single_edge(), &[1.0, 1.0, 1.0]).unwrap();
        assert!((lo - 1.0).abs() < 1e-15);
        assert!((hi - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cw_bounds_identity() {
        for n in [1, 2, 5] {
            let id = SparseTensor::identity(3, n);
            let x: Vec<f64> = (1..=n).map(|i| i as f64 * 0.7).collect();
            let (lo, hi) = cw_bounds(&id, &x).unwrap();
            assert!((lo - 1.0).abs() < 1e-12);
            assert!((hi - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn cw_bounds_rejects_nonpositive() {
        assert!(matches!(
            cw_bounds(&swap_tensor(), &[1.0, 0.0]),
            Err(SpectralError::NonpositiveComponent { index: 1 })
        ));
    }

    #[test]
    fn spectral_radius_swap_tensor() {
        // oracle: lambda x1^2 = x2^2, lambda x2^2 = x1^2 forces lambda^2 = 1,
        // positive solution lambda = 1 with x = (1, 1)
        let r = spectral_radius(&swap_tensor()).unwrap();
        assert!((r.rho - 1.0).abs() < 1e-10);
        assert!((r.perron[0] - 1.0).abs() < 1e-9);
        assert!((r.perron[1] - 1.0).abs() < 1e-9);
        assert!(r.lower <= r.rho && r.rho <= r.upper);
        assert!(r.residual < 1e-11);
    }

    #[test]
    fn spectral_radius_single_edge() {
        // oracle: symmetric ansatz x = (c,c,c) solves A x^2 = x^{[2]} with rho 1
        let r = spectral_radius(&single_edge()).unwrap();
        assert!((r.rho - 1.0).abs() < 1e-10);
        for &v in &r.perron {
            assert!((v - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn spectral_radius_dim1_identity_converges_immediately() {
        let id = SparseTensor::identity(3, 1);
        let r = spectral_radius(&id).unwrap();
        assert_eq!(r.iterations, 1);
        assert_eq!(r.rho, 1.0);
        assert_eq!(r.perron, vec![1.0]);
    }

    #[test]
    fn spectral_radius_rejects_weakly_reducible() {
        let id = SparseTensor::identity(3, 3);
        assert!(matches!(
            spectral_radius(&id),
            Err(SpectralError::NotWeaklyIrreducible)
        ));
        assert!(matches!(
            spectral_radius(&SparseTensor::zero(3, 2)),
            Err(SpectralError::ZeroTensor)
        ));
    }

    #[test]
    fn max_iter_error_carries_bracket() {
        let a = SparseTensor::new(3, 2, [(vec![0, 1, 1], 1.0), (vec![1, 0, 0], 2.0)]).unwrap();
        match spectral_radius_with(&a, 1e-12, 1) {
            Err(SpectralError::MaxIterExceeded {
                lower,
                upper,
                iterations,
            }) => {
                assert_eq!(iterations, 1);
                assert!(lower <= upper);
                // true rho is sqrt(2); the first bracket must contain it
                assert!(lower <= 2.0f64.sqrt() && 2.0f64.sqrt() <= upper);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bracket_is_monotone() {
        let a = SparseTensor::new(
            3,
            3,
            [
                (vec![0, 1, 2], 0.7),
                (vec![1, 2, 2], 1.3),
                (vec![2, 0, 1], 0.4),
                (vec![0, 0, 1], 0.2),
            ],
        )
        .unwrap();
        let mut brackets = Vec::new();
        let r = iterate(&a, 1e-12, 100_000, |lo, hi| brackets.push((lo, hi))).unwrap();
        assert!(brackets.len() >= 2);
        for w in brackets.windows(2) {
            let slack = 1e-12 * w[0].1.abs().max(1.0);
            assert!(w[1].0 >= w[0].0 - slack);
            assert!(w[1].1 <= w[0].1 + slack);
        }
        assert!(r.upper - r.lower <= 1e-12 * r.upper.max(1.0));
    }

    #[test]
    fn scale_invariance() {
        let a = SparseTensor::new(
            3,
            3,
            [
                (vec![0, 1, 2], 0.9),
                (vec![1, 0, 2], 1.1),
                (vec![2, 0, 1], 0.5),
            ],
        )
        .unwrap();
        let base = spectral_radius(&a).unwrap();
        for c in [0.5, 2.0, 10.0] {
            let scaled = spectral_radius(&a.scale(c)).unwrap();
            assert!(
                (scaled.rho - c * base.rho).abs() <= 10.0 * DEFAULT_TOL * c.max(1.0),
                "rho({c}A) = {} vs {}",
                scaled.rho,
                c * base.rho
            );
        }
    }

    #[test]
    fn entrywise_domination_bounds_rho() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            let n = rng.gen_range(2..=5);
            // random weakly irreducible support: a cycle plus extras
            let mut entries: Vec<(Vec<u32>, f64)> = (0..n as u32)
                .map(|i| {
                    let j = (i + 1) % n as u32;
                    (vec![i, j, j], rng.gen_range(0.2..1.0))
                })
                .collect();
            for _ in 0..n {
                let tuple: Vec<u32> = (0..3).map(|_| rng.gen_range(0..n as u32)).collect();
                if !entries.iter().any(|(t, _)| *t == tuple) {
                    entries.push((tuple, rng.gen_range(0.2..1.0)));
                }
            }
            let a = SparseTensor::new(3, n, entries.clone()).unwrap();
            let b = SparseTensor::new(
                3,
                n,
                entries
                    .iter()
                    .map(|(t, v)| (t.clone(), v * rng.gen_range(0.3..1.0))),
            )
            .unwrap();
            let ra = spectral_radius(&a).unwrap();
            let rb = spectral_radius(&b).unwrap();
            assert!(rb.rho <= ra.rho + DEFAULT_TOL);
        }
    }

    #[test]
    fn eigen_residual_examples() {
        let a = swap_tensor();
        let x = [Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)];
        let r = eigen_residual(&a, Complex64::new(1.0, 0.0), &x).unwrap();
        assert!(r < 1e-15);

        let x = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)];
        let r = eigen_residual(&a, Complex64::new(-1.0, 0.0), &x).unwrap();
        assert!(r < 1e-15);

        assert!(matches!(
            eigen_residual(&a, Complex64::new(1.0, 0.0), &[Complex64::default(); 2]),
            Err(SpectralError::ZeroVector)
        ));
    }

    #[test]
    fn residual_matches_contract() {
        let r = spectral_radius(&single_edge()).unwrap();
        let xc: Vec<Complex64> = r.perron.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let res = eigen_residual(&single_edge(), Complex64::new(r.rho, 0.0), &xc).unwrap();
        assert!(res <= 10.0 * DEFAULT_TOL);
    }
}
