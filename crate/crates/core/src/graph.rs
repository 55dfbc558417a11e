//! Combinatorial structure of a tensor's support.
//!
//! Everything here is a pure function of the zero-nonzero pattern: the
//! associated digraph `G(A)` (arc `i -> j` when `j` appears among the tail
//! indices of a nonzero entry with head `i`), the communication classes, the
//! irreducibility/primitivity hierarchy and the solid graph whose weakly
//! connected component count `r` controls the order of phase diagonals for
//! irreducible tensors.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::tensor::SparseTensor;

/// Directed graph on `[n]` with duplicate-free arcs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    adj: Vec<Vec<u32>>,
}

impl Digraph {
    pub fn new(n: usize, arcs: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut adj = vec![BTreeSet::new(); n];
        for (i, j) in arcs {
            assert!(
                (i as usize) < n && (j as usize) < n,
                "arc endpoint out of range"
            );
            adj[i as usize].insert(j);
        }
        Self {
            n,
            adj: adj.into_iter().map(|s| s.into_iter().collect()).collect(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn arcs(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(i, out)| out.iter().map(move |&j| (i as u32, j)))
    }

    pub fn has_arc(&self, i: u32, j: u32) -> bool {
        self.adj[i as usize].binary_search(&j).is_ok()
    }

    pub fn arc_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }

    /// Strongly connected components as an ordered partition of `[n]`:
    /// arcs only run from earlier classes to later ones, so every class is
    /// final within the prefix it closes. Ties in the topological order are
    /// broken by smallest contained vertex; vertices inside a class are
    /// sorted ascending. Deterministic for a fixed input.
    pub fn strongly_connected_components(&self) -> Vec<Vec<usize>> {
        let comps = self.tarjan();
        let ncomp = comps.len();
        let mut comp_of = vec![usize::MAX; self.n];
        for (cid, comp) in comps.iter().enumerate() {
            for &v in comp {
                comp_of[v] = cid;
            }
        }

        // Condensation in-degrees, then Kahn's algorithm choosing among the
        // ready classes the one with the smallest vertex index.
        let mut succs = vec![BTreeSet::new(); ncomp];
        for (u, v) in self.arcs() {
            let (cu, cv) = (comp_of[u as usize], comp_of[v as usize]);
            if cu != cv {
                succs[cu].insert(cv);
            }
        }
        let mut indeg = vec![0usize; ncomp];
        for out in &succs {
            for &v in out {
                indeg[v] += 1;
            }
        }
        let min_vertex: Vec<usize> = comps
            .iter()
            .map(|c| c.iter().copied().min().unwrap())
            .collect();
        let mut ready: BTreeSet<(usize, usize)> = (0..ncomp)
            .filter(|&c| indeg[c] == 0)
            .map(|c| (min_vertex[c], c))
            .collect();
        let mut order = Vec::with_capacity(ncomp);
        while let Some(&(key, c)) = ready.iter().next() {
            ready.remove(&(key, c));
            order.push(c);
            for &s in &succs[c] {
                indeg[s] -= 1;
                if indeg[s] == 0 {
                    ready.insert((min_vertex[s], s));
                }
            }
        }
        debug_assert_eq!(order.len(), ncomp);
        order
            .into_iter()
            .map(|c| {
                let mut class = comps[c].clone();
                class.sort_unstable();
                class
            })
            .collect()
    }

    fn tarjan(&self) -> Vec<Vec<usize>> {
        struct State<'a> {
            adj: &'a [Vec<u32>],
            index: usize,
            idx: Vec<Option<usize>>,
            low: Vec<usize>,
            stack: Vec<usize>,
            on_stack: Vec<bool>,
            comps: Vec<Vec<usize>>,
        }
        fn strongconnect(v: usize, st: &mut State) {
            st.idx[v] = Some(st.index);
            st.low[v] = st.index;
            st.index += 1;
            st.stack.push(v);
            st.on_stack[v] = true;
            for k in 0..st.adj[v].len() {
                let w = st.adj[v][k] as usize;
                if st.idx[w].is_none() {
                    strongconnect(w, st);
                    st.low[v] = st.low[v].min(st.low[w]);
                } else if st.on_stack[w] {
                    st.low[v] = st.low[v].min(st.idx[w].unwrap());
                }
            }
            if st.low[v] == st.idx[v].unwrap() {
                let mut comp = Vec::new();
                loop {
                    let w = st.stack.pop().expect("tarjan stack underflow");
                    st.on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                st.comps.push(comp);
            }
        }
        let mut st = State {
            adj: &self.adj,
            index: 0,
            idx: vec![None; self.n],
            low: vec![0; self.n],
            stack: Vec::new(),
            on_stack: vec![false; self.n],
            comps: Vec::new(),
        };
        for v in 0..self.n {
            if st.idx[v].is_none() {
                strongconnect(v, &mut st);
            }
        }
        st.comps
    }

    pub fn is_strongly_connected(&self) -> bool {
        self.n == 0 || self.tarjan().len() == 1
    }

    /// Gcd of directed cycle lengths, from BFS level differences. Requires a
    /// strongly connected graph; returns 0 when the graph has no cycle at
    /// all (a single vertex without a loop).
    fn cycle_gcd(&self) -> u64 {
        debug_assert!(self.is_strongly_connected());
        if self.n == 0 {
            return 0;
        }
        let mut level = vec![usize::MAX; self.n];
        let mut queue = std::collections::VecDeque::new();
        level[0] = 0;
        queue.push_back(0usize);
        while let Some(u) = queue.pop_front() {
            for &v in &self.adj[u] {
                if level[v as usize] == usize::MAX {
                    level[v as usize] = level[u] + 1;
                    queue.push_back(v as usize);
                }
            }
        }
        let mut g: u64 = 0;
        for (u, v) in self.arcs() {
            let diff = level[u as usize] as i64 + 1 - level[v as usize] as i64;
            g = gcd(g, diff.unsigned_abs());
        }
        g
    }

    fn is_primitive(&self) -> bool {
        self.is_strongly_connected() && self.cycle_gcd() == 1
    }

    /// Number of connected components after forgetting arc directions,
    /// counted over all `n` vertices.
    pub fn weak_component_count(&self) -> usize {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(parent: &mut Vec<usize>, x: usize) -> usize {
            if parent[x] != x {
                let root = find(parent, parent[x]);
                parent[x] = root;
            }
            parent[x]
        }
        for (u, v) in self.arcs() {
            let (ru, rv) = (find(&mut parent, u as usize), find(&mut parent, v as usize));
            if ru != rv {
                parent[ru] = rv;
            }
        }
        (0..self.n).filter(|&v| find(&mut parent, v) == v).count()
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// The digraph `G(A)`: arc `(i, j)` present iff some nonzero entry has head
/// `i` and `j` among its tail indices.
pub fn build_digraph(a: &SparseTensor) -> Digraph {
    let arcs = a.entries().flat_map(|(tuple, _)| {
        let head = tuple[0];
        tuple[1..]
            .iter()
            .map(move |&j| (head, j))
            .collect::<Vec<_>>()
    });
    Digraph::new(a.dim(), arcs)
}

/// The digraph of the majorization matrix: arc `(i, j)` iff `a_{i j .. j} > 0`.
/// Loops included.
pub fn majorization_digraph(a: &SparseTensor) -> Digraph {
    let m = a.majorization();
    let n = a.dim();
    let arcs = (0..n).flat_map(|i| {
        let row = m[i].clone();
        (0..n)
            .filter(move |&j| row[j] > 0.0)
            .map(move |j| (i as u32, j as u32))
    });
    Digraph::new(n, arcs)
}

/// The solid graph `G^s(A)`: arcs `(i, j)` with `i != j` and `a_{i j .. j} > 0`.
/// Loops never join components, so they are excluded.
pub fn solid_graph(a: &SparseTensor) -> Digraph {
    let m = a.majorization();
    let n = a.dim();
    let arcs = (0..n).flat_map(|i| {
        let row = m[i].clone();
        (0..n)
            .filter(move |&j| j != i && row[j] > 0.0)
            .map(move |j| (i as u32, j as u32))
    });
    Digraph::new(n, arcs)
}

/// `r`: the number of weakly connected components of the solid graph.
pub fn solid_weak_components(a: &SparseTensor) -> usize {
    solid_graph(a).weak_component_count()
}

pub fn is_weakly_irreducible(a: &SparseTensor) -> bool {
    build_digraph(a).is_strongly_connected()
}

/// Irreducibility through the closure criterion: starting from a seed set,
/// repeatedly add any head `i` of an entry whose tail lies entirely in the
/// current set. The tensor is irreducible iff every singleton seed closes to
/// all of `[n]` (closure is monotone in the seed, so singletons suffice).
pub fn is_irreducible(a: &SparseTensor) -> bool {
    let n = a.dim();
    (0..n).all(|seed| closure_size(a, seed) == n)
}

fn closure_size(a: &SparseTensor, seed: usize) -> usize {
    let n = a.dim();
    let mut member = vec![false; n];
    member[seed] = true;
    let mut size = 1;
    loop {
        let mut grew = false;
        for (tuple, _) in a.entries() {
            let head = tuple[0] as usize;
            if !member[head] && tuple[1..].iter().all(|&j| member[j as usize]) {
                member[head] = true;
                size += 1;
                grew = true;
            }
        }
        if !grew {
            return size;
        }
    }
}

pub fn is_essentially_positive(a: &SparseTensor) -> bool {
    a.majorization()
        .iter()
        .all(|row| row.iter().all(|&v| v > 0.0))
}

pub fn is_weakly_positive(a: &SparseTensor) -> bool {
    let m = a.majorization();
    let n = a.dim();
    (0..n).all(|i| (0..n).all(|j| i == j || m[i][j] > 0.0))
}

/// Strong irreducibility: the induced tensor `I(A)` is irreducible, which
/// reduces to irreducibility (strong connectivity) of the majorization
/// matrix.
pub fn is_strongly_irreducible(a: &SparseTensor) -> bool {
    majorization_digraph(a).is_strongly_connected()
}

/// Strong primitivity: the majorization matrix is primitive (strongly
/// connected with cycle-length gcd one).
pub fn is_strongly_primitive(a: &SparseTensor) -> bool {
    majorization_digraph(a).is_primitive()
}

pub fn is_weakly_primitive(a: &SparseTensor) -> bool {
    build_digraph(a).is_primitive()
}

/// The full structural classification of a tensor's support.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StructureProfile {
    pub essentially_positive: bool,
    pub weakly_positive: bool,
    pub weakly_irreducible: bool,
    pub irreducible: bool,
    pub strongly_irreducible: bool,
    pub weakly_primitive: bool,
    pub strongly_primitive: bool,
    /// Weakly connected components of the solid graph; meaningful as an
    /// eigenvector order bound when the tensor is irreducible.
    pub solid_component_count: usize,
}

impl StructureProfile {
    pub fn of(a: &SparseTensor) -> Self {
        let profile = Self {
            essentially_positive: is_essentially_positive(a),
            weakly_positive: is_weakly_positive(a),
            weakly_irreducible: is_weakly_irreducible(a),
            irreducible: is_irreducible(a),
            strongly_irreducible: is_strongly_irreducible(a),
            weakly_primitive: is_weakly_primitive(a),
            strongly_primitive: is_strongly_primitive(a),
            solid_component_count: solid_weak_components(a),
        };
        profile.assert_hierarchy();
        profile
    }

    fn assert_hierarchy(&self) {
        if self.strongly_irreducible {
            assert!(
                self.irreducible,
                "strong irreducibility implies irreducibility"
            );
        }
        if self.irreducible {
            assert!(
                self.weakly_irreducible,
                "irreducibility implies weak irreducibility"
            );
        }
        if self.strongly_primitive {
            assert!(
                self.weakly_primitive,
                "strong primitivity implies weak primitivity"
            );
        }
        assert!(self.solid_component_count >= 1);
    }
}
