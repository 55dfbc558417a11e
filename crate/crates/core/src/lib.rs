//! Spectral analysis of nonnegative tensors.
//!
//! An order-`m` dimension-`n` tensor acts on vectors through the degree-(m-1)
//! map `(A x^{m-1})_i = sum a_{i i2..im} x_{i2}..x_{im}`; eigenpairs solve
//! `A x^{m-1} = lambda x^{[m-1]}` where `x^{[m-1]}` raises each component to
//! the power `m-1`. For a nonnegative weakly irreducible tensor the spectral
//! radius is an eigenvalue with a unique positive eigenvector (the Perron
//! vector), but unlike the matrix case the spectral radius may admit several
//! eigenvectors up to scalar. This crate computes:
//!
//! - the spectral radius and Perron vector by shifted power iteration with
//!   Collatz-Wielandt certificates ([`spectral`]),
//! - the structural hierarchy (weak irreducibility, irreducibility, solid
//!   graph, primitivity) of the support ([`graph`]),
//! - the stabilizing index `s(A)` (the number of spectral-circle eigenvectors
//!   up to scalar), the cyclic index and the full list of spectral-circle
//!   eigenvectors, by solving an integer congruence system over the support
//!   via Smith normal form ([`phase`]),
//! - communication-class decompositions and the eigenvariety dimension for
//!   combinatorially symmetric tensors ([`decomposition`]),
//! - adjacency tensors of uniform hypergraphs ([`hypergraph`]),
//! - an independent brute-force enumeration oracle ([`oracle`]).
//!
//! [`analysis`] orchestrates the modules into a single report consumed by the
//! `eigenvariety` CLI.

pub mod analysis;
pub mod decomposition;
pub mod graph;
pub mod hypergraph;
pub mod oracle;
pub mod phase;
pub mod spectral;
pub mod tensor;

pub use analysis::{analyze_hypergraph, analyze_tensor, AnalysisOptions, AnalysisReport};
pub use tensor::{ComplexTensor, SparseTensor};
