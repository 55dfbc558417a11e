//! Seeded random tensor generators shared by the integration suites.
//!
//! Different suites use different subsets of the generators.
#![allow(dead_code)]

use eigenvariety::graph::{is_irreducible, is_weakly_irreducible};
use eigenvariety::tensor::{distinct_permutations, SparseTensor};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_value(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen_range(0.5..1.5)
}

/// Random support with the given number of attempted tuples (duplicates
/// collapse), positive values.
pub fn random_tensor(rng: &mut ChaCha8Rng, m: usize, n: usize, tuples: usize) -> SparseTensor {
    let mut entries = BTreeMap::new();
    for _ in 0..tuples {
        let tuple: Vec<u32> = (0..m).map(|_| rng.gen_range(0..n as u32)).collect();
        entries.entry(tuple).or_insert_with(|| random_value(rng));
    }
    SparseTensor::new(m, n, entries).expect("valid random tensor")
}

/// Random weakly irreducible tensor: resampled until its digraph is strongly
/// connected, with a directed-cycle backbone merged in as a fallback.
pub fn random_weakly_irreducible(rng: &mut ChaCha8Rng, m: usize, n: usize) -> SparseTensor {
    for _ in 0..50 {
        let tuples = rng.gen_range(n..=3 * n);
        let t = random_tensor(rng, m, n, tuples);
        if is_weakly_irreducible(&t) {
            return t;
        }
    }
    // fallback: add a cycle i -> i+1 through tuples (i, i+1, ..., i+1)
    let mut entries: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
    for i in 0..n as u32 {
        let j = (i + 1) % n as u32;
        let mut tuple = vec![j; m];
        tuple[0] = i;
        entries.insert(tuple, random_value(rng));
    }
    for _ in 0..n {
        let tuple: Vec<u32> = (0..m).map(|_| rng.gen_range(0..n as u32)).collect();
        entries.entry(tuple).or_insert_with(|| random_value(rng));
    }
    let t = SparseTensor::new(m, n, entries).expect("valid cycle tensor");
    assert!(is_weakly_irreducible(&t));
    t
}

/// Random combinatorially symmetric tensor built from permutation orbits of
/// random multisets; values differ across an orbit, so the tensor is
/// combinatorially symmetric but usually not symmetric.
pub fn random_symmetric_support(
    rng: &mut ChaCha8Rng,
    m: usize,
    n: usize,
    orbits: usize,
) -> SparseTensor {
    let mut entries = BTreeMap::new();
    for _ in 0..orbits {
        let base: Vec<u32> = (0..m).map(|_| rng.gen_range(0..n as u32)).collect();
        for p in distinct_permutations(&base) {
            entries.entry(p).or_insert_with(|| random_value(rng));
        }
    }
    SparseTensor::new(m, n, entries).expect("valid symmetric tensor")
}

/// Random combinatorially symmetric weakly irreducible tensor.
pub fn random_symmetric_weakly_irreducible(
    rng: &mut ChaCha8Rng,
    m: usize,
    n: usize,
) -> SparseTensor {
    loop {
        let orbits = rng.gen_range(1..=2 * n);
        let t = random_symmetric_support(rng, m, n, orbits);
        if is_weakly_irreducible(&t) {
            assert!(t.is_combinatorially_symmetric());
            return t;
        }
    }
}

/// Random combinatorially symmetric irreducible tensor: orbits are added
/// until the closure criterion is satisfied (irreducibility is monotone in
/// the support, so this terminates).
pub fn random_symmetric_irreducible(rng: &mut ChaCha8Rng, m: usize, n: usize) -> SparseTensor {
    let mut entries: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
    loop {
        // bias toward orbits of (i, j, ..., j), which carry solid arcs
        let base: Vec<u32> = if rng.gen_bool(0.5) {
            let i = rng.gen_range(0..n as u32);
            let j = rng.gen_range(0..n as u32);
            let mut t = vec![j; m];
            t[0] = i;
            t
        } else {
            (0..m).map(|_| rng.gen_range(0..n as u32)).collect()
        };
        for p in distinct_permutations(&base) {
            entries.entry(p).or_insert_with(|| random_value(rng));
        }
        let t = SparseTensor::new(m, n, entries.clone()).expect("valid tensor");
        if is_irreducible(&t) {
            assert!(t.is_combinatorially_symmetric());
            return t;
        }
    }
}

/// Random irreducible tensor (no symmetry constraint).
pub fn random_irreducible(rng: &mut ChaCha8Rng, m: usize, n: usize) -> SparseTensor {
    let mut entries: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
    loop {
        let tuple: Vec<u32> = if rng.gen_bool(0.5) {
            let i = rng.gen_range(0..n as u32);
            let j = rng.gen_range(0..n as u32);
            let mut t = vec![j; m];
            t[0] = i;
            t
        } else {
            (0..m).map(|_| rng.gen_range(0..n as u32)).collect()
        };
        entries.entry(tuple).or_insert_with(|| random_value(rng));
        let t = SparseTensor::new(m, n, entries.clone()).expect("valid tensor");
        if is_irreducible(&t) {
            return t;
        }
    }
}

/// A disjoint union of single-edge components on `k` blocks of `m` vertices,
/// each block's entries scaled by the given factor.
pub fn disjoint_edge_components(m: usize, scales: &[f64]) -> SparseTensor {
    let n = m * scales.len();
    let mut entries = Vec::new();
    for (b, &scale) in scales.iter().enumerate() {
        let base: Vec<u32> = (0..m).map(|v| (b * m + v) as u32).collect();
        for p in distinct_permutations(&base) {
            entries.push((p, scale));
        }
    }
    SparseTensor::new(m, n, entries).expect("valid block tensor")
}

/// Rescale every entry by an independent random positive factor, preserving
/// the support.
pub fn rescale_entries(rng: &mut ChaCha8Rng, a: &SparseTensor) -> SparseTensor {
    let entries: Vec<(Vec<u32>, f64)> = a
        .entries()
        .map(|(t, v)| (t.to_vec(), v * rng.gen_range(0.25..4.0)))
        .collect();
    SparseTensor::new(a.order(), a.dim(), entries).expect("rescaled tensor")
}
