//! Uniform hypergraphs and their adjacency tensors.
//!
//! An m-uniform hypergraph on `n` vertices turns into an order-m tensor with
//! entry `1/(m-1)!` at every permutation of every edge. The tensor is
//! symmetric, and it is weakly irreducible exactly when the hypergraph is
//! connected, which feeds hypergraphs through the general analysis pipeline.

use std::collections::BTreeSet;
use std::path::Path;

use thiserror::Error;

use crate::tensor::{distinct_permutations, SparseTensor};

/// Permutation expansion generates `m!` tuples per edge; cap the edge size.
pub const MAX_EDGE_SIZE: usize = 8;

#[derive(Debug, Error)]
pub enum HypergraphError {
    #[error("line {line}: malformed header, expected \"m n l\"")]
    MalformedHeader { line: usize },
    #[error("edge size must be at least 2, got {m}")]
    EdgeSizeTooSmall { m: usize },
    #[error("edge size {m} exceeds the supported maximum {MAX_EDGE_SIZE}")]
    EdgeSizeUnsupported { m: usize },
    #[error("vertex count must be at least 1, got {n}")]
    BadVertexCount { n: usize },
    #[error("line {line}: expected {expected} vertices, found {found}")]
    NonUniformEdge {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: repeated vertex {vertex} within an edge")]
    RepeatedVertex { line: usize, vertex: u64 },
    #[error("line {line}: vertex {vertex} out of range [1, {n}]")]
    VertexOutOfRange { line: usize, vertex: i64, n: usize },
    #[error("line {line}: duplicate edge")]
    DuplicateEdge { line: usize },
    #[error("line {line}: unparseable vertex id {token:?}")]
    BadVertexId { line: usize, token: String },
    #[error("declared {declared} edges but found {found}")]
    EdgeCountMismatch { declared: usize, found: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// m-uniform hypergraph: every edge is a set of exactly `m` distinct
/// vertices. Vertices are 0-based internally; files are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniformHypergraph {
    m: usize,
    n: usize,
    edges: Vec<Vec<u32>>,
}

impl UniformHypergraph {
    pub fn new(
        m: usize,
        n: usize,
        edges: impl IntoIterator<Item = Vec<u32>>,
    ) -> Result<Self, HypergraphError> {
        if m < 2 {
            return Err(HypergraphError::EdgeSizeTooSmall { m });
        }
        if m > MAX_EDGE_SIZE {
            return Err(HypergraphError::EdgeSizeUnsupported { m });
        }
        if n < 1 {
            return Err(HypergraphError::BadVertexCount { n });
        }
        let mut set = BTreeSet::new();
        for edge in edges {
            let mut edge = edge;
            edge.sort_unstable();
            if edge.len() != m {
                return Err(HypergraphError::NonUniformEdge {
                    line: 0,
                    expected: m,
                    found: edge.len(),
                });
            }
            if let Some(w) = edge.windows(2).find(|w| w[0] == w[1]) {
                return Err(HypergraphError::RepeatedVertex {
                    line: 0,
                    vertex: w[0] as u64 + 1,
                });
            }
            if let Some(&v) = edge.iter().find(|&&v| v as usize >= n) {
                return Err(HypergraphError::VertexOutOfRange {
                    line: 0,
                    vertex: v as i64 + 1,
                    n,
                });
            }
            if !set.insert(edge) {
                return Err(HypergraphError::DuplicateEdge { line: 0 });
            }
        }
        Ok(Self {
            m,
            n,
            edges: set.into_iter().collect(),
        })
    }

    /// Parses the text format: header `m n l`, then `l` lines of `m`
    /// distinct 1-based vertex ids; `#` starts a comment.
    pub fn parse(input: &str) -> Result<Self, HypergraphError> {
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
            .ok_or(HypergraphError::MalformedHeader { line: 1 })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(HypergraphError::MalformedHeader { line: header_line });
        }
        let parse = |tok: &str| -> Result<usize, HypergraphError> {
            tok.parse()
                .map_err(|_| HypergraphError::MalformedHeader { line: header_line })
        };
        let m = parse(fields[0])?;
        let n = parse(fields[1])?;
        let declared = parse(fields[2])?;
        if m < 2 {
            return Err(HypergraphError::EdgeSizeTooSmall { m });
        }
        if m > MAX_EDGE_SIZE {
            return Err(HypergraphError::EdgeSizeUnsupported { m });
        }
        if n < 1 {
            return Err(HypergraphError::BadVertexCount { n });
        }

        let mut set = BTreeSet::new();
        let mut found = 0usize;
        for (line, body) in lines {
            let fields: Vec<&str> = body.split_whitespace().collect();
            if fields.len() != m {
                return Err(HypergraphError::NonUniformEdge {
                    line,
                    expected: m,
                    found: fields.len(),
                });
            }
            let mut edge = Vec::with_capacity(m);
            for tok in fields {
                let v: i64 = tok.parse().map_err(|_| HypergraphError::BadVertexId {
                    line,
                    token: tok.to_string(),
                })?;
                if v < 1 || v as usize > n {
                    return Err(HypergraphError::VertexOutOfRange { line, vertex: v, n });
                }
                edge.push((v - 1) as u32);
            }
            edge.sort_unstable();
            if let Some(w) = edge.windows(2).find(|w| w[0] == w[1]) {
                return Err(HypergraphError::RepeatedVertex {
                    line,
                    vertex: w[0] as u64 + 1,
                });
            }
            if !set.insert(edge) {
                return Err(HypergraphError::DuplicateEdge { line });
            }
            found += 1;
        }
        if found != declared {
            return Err(HypergraphError::EdgeCountMismatch { declared, found });
        }
        Ok(Self {
            m,
            n,
            edges: set.into_iter().collect(),
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, HypergraphError> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn edge_size(&self) -> usize {
        self.m
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as sorted vertex lists, in sorted order.
    pub fn edges(&self) -> impl Iterator<Item = &[u32]> + '_ {
        self.edges.iter().map(Vec::as_slice)
    }

    /// The adjacency tensor: value `1/(m-1)!` at all `m!` permutations of
    /// each edge. Always symmetric.
    pub fn adjacency_tensor(&self) -> SparseTensor {
        let weight = 1.0 / factorial(self.m - 1) as f64;
        let entries = self.edges.iter().flat_map(|edge| {
            distinct_permutations(edge)
                .into_iter()
                .map(move |p| (p, weight))
        });
        SparseTensor::new(self.m, self.n, entries).expect("edge expansion is valid")
    }

    /// Equivalence classes of the connectedness relation, including isolated
    /// vertices as singleton classes; classes sorted by smallest vertex.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(parent: &mut Vec<usize>, x: usize) -> usize {
            if parent[x] != x {
                let root = find(parent, parent[x]);
                parent[x] = root;
            }
            parent[x]
        }
        for edge in &self.edges {
            let first = edge[0] as usize;
            for &v in &edge[1..] {
                let (a, b) = (find(&mut parent, first), find(&mut parent, v as usize));
                if a != b {
                    parent[a] = b;
                }
            }
        }
        let mut by_root: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for v in 0..self.n {
            let root = find(&mut parent, v);
            by_root.entry(root).or_default().push(v);
        }
        let mut components: Vec<Vec<usize>> = by_root.into_values().collect();
        for c in &mut components {
            c.sort_unstable();
        }
        components.sort_by_key(|c| c[0]);
        components
    }
}

fn factorial(k: usize) -> u64 {
    (1..=k as u64).product()
}
