//! Communication classes, block structure and the eigenvariety dimension of
//! general (weakly reducible) tensors.
//!
//! The strongly connected components of `G(A)` partition `[n]` into classes
//! ordered so that support tuples only run from earlier classes to later
//! ones (upper block-triangular form). Every principal subtensor `A[alpha]`
//! satisfies `rho(A[alpha]) <= rho(A)`, and `rho(A)` is attained by some
//! class, so the spectral radius of any nonnegative tensor is the maximum
//! over its classes, recursively.
//!
//! For a combinatorially symmetric tensor the classes are a direct sum: each
//! class is a weakly irreducible component or a zero of dimension one, and
//! the projective eigenvariety of `rho` has dimension `k - 1` where `k`
//! counts the components attaining `rho`.

use serde::Serialize;
use thiserror::Error;

use crate::graph::{build_digraph, is_weakly_irreducible};
use crate::spectral::{spectral_radius_with, SpectralError, DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::tensor::{SparseTensor, TensorError};

/// Relative tolerance for deciding that two class radii tie: spectral radii
/// of identical components differ only by iteration noise, so this must
/// exceed the spectral tolerance by a safety factor.
pub const RHO_TIE_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum DecompositionError {
    #[error("the dimension theorem applies to combinatorially symmetric tensors only")]
    NotCombinatoriallySymmetric,
    #[error("the zero tensor has no eigenvariety dimension verdict")]
    ZeroTensor,
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

/// Certified spectral radius information for one communication class.
#[derive(Debug, Clone, Serialize)]
pub enum ClassValue {
    /// Zero subtensor: spectral radius 0.
    Zero,
    /// Weakly irreducible subtensor with a Collatz-Wielandt certificate.
    Certified { rho: f64, lower: f64, upper: f64 },
    /// Weakly reducible subtensor: bracket from recursive decomposition.
    Bracket { lower: f64, upper: f64 },
}

impl ClassValue {
    pub fn rho(&self) -> f64 {
        match self {
            ClassValue::Zero => 0.0,
            ClassValue::Certified { rho, .. } => *rho,
            ClassValue::Bracket { lower, upper } => (lower + upper) / 2.0,
        }
    }

    pub fn bracket(&self) -> (f64, f64) {
        match self {
            ClassValue::Zero => (0.0, 0.0),
            ClassValue::Certified { lower, upper, .. } => (*lower, *upper),
            ClassValue::Bracket { lower, upper } => (*lower, *upper),
        }
    }
}

/// One communication class: its members (original indices, ascending), its
/// principal subtensor and spectral data.
#[derive(Debug, Clone)]
pub struct ClassInfo {
    pub members: Vec<usize>,
    pub subtensor: SparseTensor,
    /// A zero class is never a weakly irreducible component, whatever the
    /// one-vertex graph convention says.
    pub weakly_irreducible: bool,
    pub value: ClassValue,
}

#[derive(Debug, Clone)]
pub struct ClassDecomposition {
    pub classes: Vec<ClassInfo>,
    /// Whether every support tuple respects the upper-triangular class
    /// pattern (head class no later than any tail class). Holds by
    /// construction of the class order; recorded as a self-check.
    pub block_ok: bool,
}

impl ClassDecomposition {
    /// `(class members, spectral value)` pairs in class order.
    pub fn class_spectral_radii(&self) -> Vec<(&[usize], &ClassValue)> {
        self.classes
            .iter()
            .map(|c| (c.members.as_slice(), &c.value))
            .collect()
    }

    /// Certified bracket for the spectral radius of the whole tensor: the
    /// classwise maximum.
    pub fn spectral_radius_bracket(&self) -> (f64, f64) {
        let mut lower = 0.0f64;
        let mut upper = 0.0f64;
        for class in &self.classes {
            let (lo, hi) = class.value.bracket();
            lower = lower.max(lo);
            upper = upper.max(hi);
        }
        (lower, upper)
    }
}

pub fn decompose(a: &SparseTensor) -> Result<ClassDecomposition, DecompositionError> {
    decompose_with(a, DEFAULT_TOL, DEFAULT_MAX_ITER)
}

pub fn decompose_with(
    a: &SparseTensor,
    tol: f64,
    max_iter: usize,
) -> Result<ClassDecomposition, DecompositionError> {
    let classes = build_digraph(a).strongly_connected_components();
    let mut class_of = vec![usize::MAX; a.dim()];
    for (k, class) in classes.iter().enumerate() {
        for &v in class {
            class_of[v] = k;
        }
    }
    let block_ok = a.entries().all(|(tuple, _)| {
        let head = class_of[tuple[0] as usize];
        tuple[1..].iter().all(|&j| head <= class_of[j as usize])
    });

    let mut infos = Vec::with_capacity(classes.len());
    for members in classes {
        let (subtensor, _map) = a.principal_subtensor(&members)?;
        let weakly_irreducible = !subtensor.is_zero() && is_weakly_irreducible(&subtensor);
        let value = if subtensor.is_zero() {
            ClassValue::Zero
        } else if weakly_irreducible {
            let r = spectral_radius_with(&subtensor, tol, max_iter)?;
            ClassValue::Certified {
                rho: r.rho,
                lower: r.lower,
                upper: r.upper,
            }
        } else {
            let nested = decompose_with(&subtensor, tol, max_iter)?;
            let (lower, upper) = nested.spectral_radius_bracket();
            ClassValue::Bracket { lower, upper }
        };
        infos.push(ClassInfo {
            members,
            subtensor,
            weakly_irreducible,
            value,
        });
    }
    Ok(ClassDecomposition {
        classes: infos,
        block_ok,
    })
}

/// Certified bracket for `rho(A)` of an arbitrary nonnegative tensor,
/// through the class decomposition when `A` is weakly reducible.
pub fn spectral_radius_bracket(a: &SparseTensor) -> Result<(f64, f64), DecompositionError> {
    if a.is_zero() {
        return Ok((0.0, 0.0));
    }
    if is_weakly_irreducible(a) {
        let r = spectral_radius_with(a, DEFAULT_TOL, DEFAULT_MAX_ITER)?;
        return Ok((r.lower, r.upper));
    }
    Ok(decompose(a)?.spectral_radius_bracket())
}

/// Dimension of the projective eigenvariety of `rho(A)` for a nonzero
/// combinatorially symmetric tensor: `k - 1`, `k` the number of weakly
/// irreducible components attaining `rho(A)`.
#[derive(Debug, Clone, Serialize)]
pub struct DimensionVerdict {
    pub k: usize,
    pub dim: usize,
    pub rho: f64,
}

pub fn eigenvariety_dimension(
    a: &SparseTensor,
) -> Result<(DimensionVerdict, ClassDecomposition), DecompositionError> {
    eigenvariety_dimension_with(a, DEFAULT_TOL, DEFAULT_MAX_ITER)
}

pub fn eigenvariety_dimension_with(
    a: &SparseTensor,
    tol: f64,
    max_iter: usize,
) -> Result<(DimensionVerdict, ClassDecomposition), DecompositionError> {
    if a.is_zero() {
        return Err(DecompositionError::ZeroTensor);
    }
    if !a.is_combinatorially_symmetric() {
        return Err(DecompositionError::NotCombinatoriallySymmetric);
    }
    let dec = decompose_with(a, tol, max_iter)?;
    debug_assert!(dec.block_ok);
    // direct sum: every nonzero class is a weakly irreducible component
    debug_assert!(dec
        .classes
        .iter()
        .all(|c| c.weakly_irreducible || c.subtensor.is_zero()));
    let rho = dec
        .classes
        .iter()
        .map(|c| c.value.rho())
        .fold(0.0f64, f64::max);
    let k = dec
        .classes
        .iter()
        .filter(|c| c.weakly_irreducible && c.value.rho() >= rho * (1.0 - RHO_TIE_TOL))
        .count();
    debug_assert!(k >= 1, "some class attains the spectral radius");
    Ok((DimensionVerdict { k, dim: k - 1, rho }, dec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::cw_bounds;
    use crate::tensor::distinct_permutations;
    use num_complex::Complex64;

    fn section5_tensor() -> SparseTensor {
        SparseTensor::new(
            3,
            4,
            [
                (vec![0, 0, 0], 1.0),
                (vec![0, 1, 3], 1.0),
                (vec![1, 2, 3], 1.0),
                (vec![2, 3, 0], 1.0),
            ],
        )
        .unwrap()
    }

    fn edge_entries(vertices: &[u32], value: f64) -> Vec<(Vec<u32>, f64)> {
        distinct_permutations(vertices)
            .into_iter()
            .map(|p| (p, value))
            .collect()
    }

    fn two_disjoint_edges(v1: f64, v2: f64) -> SparseTensor {
        let mut entries = edge_entries(&[0, 1, 2], v1);
        entries.extend(edge_entries(&[3, 4, 5], v2));
        SparseTensor::new(3, 6, entries).unwrap()
    }

    #[test]
    fn section5_classes_and_flags() {
        let dec = decompose(&section5_tensor()).unwrap();
        assert!(dec.block_ok);
        let members: Vec<&[usize]> = dec.classes.iter().map(|c| c.members.as_slice()).collect();
        assert_eq!(members, vec![&[0usize, 1, 2][..], &[3usize][..]]);
        // both principal subtensors are weakly reducible
        assert!(!dec.classes[0].weakly_irreducible);
        assert!(!dec.classes[1].weakly_irreducible);
        // the first class decomposes recursively to rho = 1 (its a_111 = 1
        // loop), the second is the 1-dimensional zero tensor
        let (lo, hi) = dec.classes[0].value.bracket();
        assert!(lo <= 1.0 + 1e-12 && 1.0 <= hi + 1e-12);
        assert!(matches!(dec.classes[1].value, ClassValue::Zero));
        let (_, whole_hi) = dec.spectral_radius_bracket();
        assert!((whole_hi - 1.0).abs() < 1e-10);
    }

    #[test]
    fn weakly_irreducible_tensor_is_one_class() {
        let a = SparseTensor::new(3, 2, [(vec![0, 1, 1], 1.0), (vec![1, 0, 0], 1.0)]).unwrap();
        let dec = decompose(&a).unwrap();
        assert!(dec.block_ok);
        assert_eq!(dec.classes.len(), 1);
        assert!(dec.classes[0].weakly_irreducible);
        assert!((dec.classes[0].value.rho() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn disjoint_edges_decompose_per_component() {
        let a = two_disjoint_edges(0.5, 0.5);
        let dec = decompose(&a).unwrap();
        assert_eq!(dec.classes.len(), 2);
        for class in &dec.classes {
            assert_eq!(class.members.len(), 3);
            assert!(class.weakly_irreducible);
            assert!((class.value.rho() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn scaled_component_radii() {
        // doubling one component's values doubles its spectral radius
        let a = two_disjoint_edges(0.5, 1.0);
        let dec = decompose(&a).unwrap();
        let radii: Vec<f64> = dec.classes.iter().map(|c| c.value.rho()).collect();
        assert!((radii[0] - 1.0).abs() < 1e-10);
        assert!((radii[1] - 2.0).abs() < 1e-10);
    }

    #[test]
    fn zero_class_with_isolated_vertex() {
        // one edge plus one isolated vertex
        let a = SparseTensor::new(3, 4, edge_entries(&[0, 1, 2], 0.5)).unwrap();
        let dec = decompose(&a).unwrap();
        assert_eq!(dec.classes.len(), 2);
        assert!(matches!(dec.classes[1].value, ClassValue::Zero));
        assert!(!dec.classes[1].weakly_irreducible);
    }

    #[test]
    fn dimension_verdicts() {
        // connected: k = 1, dim = 0
        let single = SparseTensor::new(3, 3, edge_entries(&[0, 1, 2], 0.5)).unwrap();
        let (v, _) = eigenvariety_dimension(&single).unwrap();
        assert_eq!((v.k, v.dim), (1, 0));

        // two tied components: dim = 1
        let tied = two_disjoint_edges(0.5, 0.5);
        let (v, _) = eigenvariety_dimension(&tied).unwrap();
        assert_eq!((v.k, v.dim), (2, 1));

        // breaking the tie restores dim = 0
        let broken = two_disjoint_edges(0.5, 1.0);
        let (v, _) = eigenvariety_dimension(&broken).unwrap();
        assert_eq!((v.k, v.dim), (1, 0));
        assert!((v.rho - 2.0).abs() < 1e-9);
    }

    #[test]
    fn dimension_verdict_rejections() {
        let swap = SparseTensor::new(3, 2, [(vec![0, 1, 1], 1.0), (vec![1, 0, 0], 1.0)]).unwrap();
        assert!(matches!(
            eigenvariety_dimension(&swap),
            Err(DecompositionError::NotCombinatoriallySymmetric)
        ));
        assert!(matches!(
            eigenvariety_dimension(&SparseTensor::zero(3, 3)),
            Err(DecompositionError::ZeroTensor)
        ));
    }

    #[test]
    fn isolated_vertex_does_not_count_as_component() {
        // one edge plus an isolated vertex: the zero class is excluded
        let a = SparseTensor::new(3, 4, edge_entries(&[0, 1, 2], 0.5)).unwrap();
        let (v, _) = eigenvariety_dimension(&a).unwrap();
        assert_eq!((v.k, v.dim), (1, 0));
    }

    #[test]
    fn classes_partition_the_index_set() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(53);
        for _ in 0..100 {
            let n = rng.gen_range(1..=7);
            let nnz = rng.gen_range(0..=2 * n);
            let mut seen = std::collections::BTreeSet::new();
            let entries: Vec<(Vec<u32>, f64)> = (0..nnz)
                .filter_map(|_| {
                    let tuple: Vec<u32> = (0..3).map(|_| rng.gen_range(0..n as u32)).collect();
                    seen.insert(tuple.clone())
                        .then(|| (tuple, rng.gen_range(0.1..1.0)))
                })
                .collect();
            let a = SparseTensor::new(3, n, entries).unwrap();
            let dec = decompose(&a).unwrap();
            let mut all: Vec<usize> = dec
                .classes
                .iter()
                .flat_map(|c| c.members.iter().copied())
                .collect();
            all.sort_unstable();
            assert_eq!(all, (0..n).collect::<Vec<_>>());
            assert!(dec.block_ok);
        }
    }

    #[test]
    fn symmetric_supports_keep_tuples_inside_classes() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(59);
        for _ in 0..100 {
            let n = rng.gen_range(2..=6);
            let orbits = rng.gen_range(1..=3);
            let mut entries = std::collections::BTreeMap::new();
            for _ in 0..orbits {
                let base: Vec<u32> = (0..3).map(|_| rng.gen_range(0..n as u32)).collect();
                for p in distinct_permutations(&base) {
                    entries.insert(p, rng.gen_range(0.1..1.0));
                }
            }
            let a = SparseTensor::new(3, n, entries).unwrap();
            assert!(a.is_combinatorially_symmetric());
            let dec = decompose(&a).unwrap();
            let mut class_of = vec![usize::MAX; n];
            for (k, c) in dec.classes.iter().enumerate() {
                for &v in &c.members {
                    class_of[v] = k;
                }
            }
            for (tuple, _) in a.entries() {
                let c0 = class_of[tuple[0] as usize];
                assert!(tuple.iter().all(|&i| class_of[i as usize] == c0));
            }
        }
    }

    #[test]
    fn class_radii_bounded_by_whole_tensor_bound() {
        // rho(A[alpha]) <= rho(A) <= any Collatz-Wielandt upper bound of A
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(61);
        for _ in 0..100 {
            let n = rng.gen_range(2..=6);
            let nnz = rng.gen_range(1..=2 * n);
            let mut seen = std::collections::BTreeSet::new();
            let entries: Vec<(Vec<u32>, f64)> = (0..nnz)
                .filter_map(|_| {
                    let tuple: Vec<u32> = (0..3).map(|_| rng.gen_range(0..n as u32)).collect();
                    seen.insert(tuple.clone())
                        .then(|| (tuple, rng.gen_range(0.1..1.0)))
                })
                .collect();
            let a = SparseTensor::new(3, n, entries).unwrap();
            let (_, upper) = cw_bounds(&a, &vec![1.0; n]).unwrap();
            let dec = decompose(&a).unwrap();
            for class in &dec.classes {
                assert!(
                    class.value.bracket().0 <= upper + 1e-9,
                    "class lower bound exceeded the whole-tensor upper bound"
                );
            }
            let (whole_lo, whole_hi) = dec.spectral_radius_bracket();
            for class in &dec.classes {
                assert!(class.value.bracket().0 <= whole_hi + 1e-9);
            }
            assert!(whole_lo <= upper + 1e-9);
        }
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn eigenvector_support_concentrates_on_maximal_components() {
        // two components with different radii: embedding the small
        // component's Perron vector is not an eigenvector of the whole
        let a = two_disjoint_edges(0.5, 1.0);
        let rho = decompose(&a).unwrap().spectral_radius_bracket().1;

        // big component (vertices 3..6) embeds to an eigenvector
        let mut x = vec![Complex64::default(); 6];
        for i in 3..6 {
            x[i] = Complex64::new(1.0, 0.0);
        }
        let res = crate::spectral::eigen_residual(&a, Complex64::new(rho, 0.0), &x).unwrap();
        assert!(res < 1e-9);

        // small component embeds to something that is not
        let mut x = vec![Complex64::default(); 6];
        for i in 0..3 {
            x[i] = Complex64::new(1.0, 0.0);
        }
        let res = crate::spectral::eigen_residual(&a, Complex64::new(rho, 0.0), &x).unwrap();
        assert!(res > 0.5);
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn tied_components_give_a_two_parameter_family() {
        // with two tied components, independently scaled embeddings stay
        // eigenvectors: the projective eigenvariety has positive dimension
        let a = two_disjoint_edges(0.5, 0.5);
        let (v, _) = eigenvariety_dimension(&a).unwrap();
        assert_eq!(v.dim, 1);
        for (s1, s2) in [(1.0, 1.0), (1.0, 0.3), (2.0, 1.0), (0.7, 0.0)] {
            let mut x = vec![Complex64::default(); 6];
            for i in 0..3 {
                x[i] = Complex64::new(s1, 0.0);
            }
            for i in 3..6 {
                x[i] = Complex64::new(s2, 0.0);
            }
            let res = crate::spectral::eigen_residual(&a, Complex64::new(1.0, 0.0), &x).unwrap();
            assert!(res < 1e-9, "scaling ({s1}, {s2}) broke the eigenequation");
        }
    }
}
