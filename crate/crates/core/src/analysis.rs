//! Pipeline orchestration: classify the input, run the appropriate modules
//! and assemble a machine-readable report.
//!
//! Weakly irreducible tensors get the full spectral + phase-group treatment
//! (their projective eigenvariety has dimension zero). Weakly reducible
//! combinatorially symmetric tensors go through the class decomposition and
//! the dimension theorem. Weakly reducible non-symmetric tensors get
//! structure and per-class data only, with an explicit note that no
//! eigenvariety claim is made.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::decomposition::{
    decompose_with, eigenvariety_dimension_with, ClassDecomposition, ClassValue,
    DecompositionError, DimensionVerdict, RHO_TIE_TOL,
};
use crate::graph::StructureProfile;
use crate::hypergraph::{HypergraphError, UniformHypergraph};
use crate::oracle::{cross_validate, OracleVerdict};
use crate::phase::{
    eigenvectors, stabilizing_index, EigenvarietyReport, EigenvectorSet, PhaseError, PhaseOptions,
};
use crate::spectral::{
    spectral_radius_with, SpectralError, SpectralResult, DEFAULT_MAX_ITER, DEFAULT_TOL,
};
use crate::tensor::{SparseTensor, TensorError};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("tensor_core: {0}")]
    Tensor(#[from] TensorError),
    #[error("hypergraph: {0}")]
    Hypergraph(#[from] HypergraphError),
    #[error("spectral: {0}")]
    Spectral(#[from] SpectralError),
    #[error("phase_group: {0}")]
    Phase(#[from] PhaseError),
    #[error("decomposition: {0}")]
    Decomposition(#[from] DecompositionError),
    #[error("hypergraph has no edges; nothing to analyze")]
    EdgelessHypergraph,
}

#[derive(Debug, Clone)]
pub struct AnalysisOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub enumeration_cap: usize,
    pub oracle_budget: u128,
    pub residual_tol: f64,
    /// Run oracle cross-validation of the eigenvariety report.
    pub run_oracle: bool,
    /// Include wall-clock timings; off by default so identical inputs yield
    /// byte-identical reports.
    pub record_timings: bool,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        let phase = PhaseOptions::default();
        Self {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            enumeration_cap: phase.enumeration_cap,
            oracle_budget: phase.oracle_budget,
            residual_tol: phase.residual_tol,
            run_oracle: false,
            record_timings: false,
        }
    }
}

impl AnalysisOptions {
    fn phase_options(&self) -> PhaseOptions {
        PhaseOptions {
            enumeration_cap: self.enumeration_cap,
            oracle_budget: self.oracle_budget,
            residual_tol: self.residual_tol,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InputDescriptor {
    pub path: Option<String>,
    pub kind: String,
    pub order: usize,
    pub dim: usize,
    pub nnz: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edges: Option<usize>,
}

impl InputDescriptor {
    pub fn for_tensor(a: &SparseTensor, path: Option<String>) -> Self {
        Self {
            path,
            kind: "tensor".to_string(),
            order: a.order(),
            dim: a.dim(),
            nnz: a.nnz(),
            edges: None,
        }
    }

    pub fn for_hypergraph(g: &UniformHypergraph, a: &SparseTensor, path: Option<String>) -> Self {
        Self {
            path,
            kind: "hypergraph".to_string(),
            order: a.order(),
            dim: a.dim(),
            nnz: a.nnz(),
            edges: Some(g.edge_count()),
        }
    }
}

/// Tolerances and caps echoed into every report so each numeric field's
/// precision is explicit.
#[derive(Debug, Clone, Serialize)]
pub struct ToleranceInfo {
    pub spectral_tol: f64,
    pub residual_tol: f64,
    pub rho_tie_tol: f64,
    pub enumeration_cap: usize,
}

/// Per-rotation-class eigenvector counts for weakly irreducible input.
#[derive(Debug, Clone, Serialize)]
pub struct EigenvectorCount {
    pub j: u64,
    pub count: u64,
    /// False when the class was too large to list and the count is the
    /// coset-size value `s` rather than a verified enumeration.
    pub enumerated: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassSummary {
    /// 1-based member indices, matching the file format.
    pub members: Vec<usize>,
    pub weakly_irreducible: bool,
    pub value: ClassValue,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecompositionSection {
    pub classes: Vec<ClassSummary>,
    pub block_ok: bool,
}

impl DecompositionSection {
    fn from_decomposition(dec: &ClassDecomposition) -> Self {
        Self {
            classes: dec
                .classes
                .iter()
                .map(|c| ClassSummary {
                    members: c.members.iter().map(|&v| v + 1).collect(),
                    weakly_irreducible: c.weakly_irreducible,
                    value: c.value.clone(),
                })
                .collect(),
            block_ok: dec.block_ok,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub input: InputDescriptor,
    pub tolerances: ToleranceInfo,
    pub structure: StructureProfile,
    pub combinatorially_symmetric: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectral: Option<SpectralResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eigenvariety: Option<EigenvarietyReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eigenvector_counts: Option<Vec<EigenvectorCount>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<DecompositionSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dimension: Option<DimensionVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleVerdict>,
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<BTreeMap<String, f64>>,
}

pub fn analyze_tensor(
    a: &SparseTensor,
    input: InputDescriptor,
    opts: &AnalysisOptions,
) -> Result<AnalysisReport, AnalysisError> {
    let mut timings: BTreeMap<String, f64> = BTreeMap::new();
    let mut notes = Vec::new();
    let clock = Instant::now();
    let profile = StructureProfile::of(a);
    let comb_symmetric = a.is_combinatorially_symmetric();
    timings.insert("structure".into(), clock.elapsed().as_secs_f64() * 1e3);

    let mut report = AnalysisReport {
        schema_version: 1,
        input,
        tolerances: ToleranceInfo {
            spectral_tol: opts.tol,
            residual_tol: opts.residual_tol,
            rho_tie_tol: RHO_TIE_TOL,
            enumeration_cap: opts.enumeration_cap,
        },
        structure: profile,
        combinatorially_symmetric: comb_symmetric,
        spectral: None,
        eigenvariety: None,
        eigenvector_counts: None,
        decomposition: None,
        dimension: None,
        oracle: None,
        notes: Vec::new(),
        timings_ms: None,
    };

    if a.is_zero() {
        notes.push("zero tensor: spectral radius 0, no eigenvariety claim".to_string());
        report.notes = notes;
        if opts.record_timings {
            report.timings_ms = Some(timings);
        }
        return Ok(report);
    }

    if profile.weakly_irreducible {
        let clock = Instant::now();
        let spectral = spectral_radius_with(a, opts.tol, opts.max_iter)?;
        timings.insert("spectral".into(), clock.elapsed().as_secs_f64() * 1e3);

        let clock = Instant::now();
        let phase_opts = opts.phase_options();
        let variety = stabilizing_index(a, &profile, &spectral, &phase_opts)?;
        timings.insert("phase_group".into(), clock.elapsed().as_secs_f64() * 1e3);

        let clock = Instant::now();
        let mut counts = Vec::with_capacity(variety.ell as usize);
        for j in 0..variety.ell {
            match eigenvectors(a, &spectral, &variety, j, &phase_opts)? {
                EigenvectorSet::Full(vecs) => counts.push(EigenvectorCount {
                    j,
                    count: vecs.len() as u64,
                    enumerated: true,
                }),
                EigenvectorSet::Capped { .. } => counts.push(EigenvectorCount {
                    j,
                    count: variety.s,
                    enumerated: false,
                }),
            }
        }
        timings.insert("eigenvectors".into(), clock.elapsed().as_secs_f64() * 1e3);

        if opts.run_oracle {
            let clock = Instant::now();
            report.oracle = Some(cross_validate(
                a,
                &spectral,
                &variety,
                opts.residual_tol,
                opts.oracle_budget,
            ));
            timings.insert("oracle".into(), clock.elapsed().as_secs_f64() * 1e3);
        }

        // weak irreducibility makes the projective eigenvariety of rho
        // zero-dimensional
        report.dimension = Some(DimensionVerdict {
            k: 1,
            dim: 0,
            rho: spectral.rho,
        });
        report.spectral = Some(spectral);
        report.eigenvariety = Some(variety);
        report.eigenvector_counts = Some(counts);
    } else if comb_symmetric {
        let clock = Instant::now();
        let (verdict, dec) = eigenvariety_dimension_with(a, opts.tol, opts.max_iter)?;
        timings.insert("decomposition".into(), clock.elapsed().as_secs_f64() * 1e3);
        report.decomposition = Some(DecompositionSection::from_decomposition(&dec));
        report.dimension = Some(verdict);
    } else {
        let clock = Instant::now();
        let dec = decompose_with(a, opts.tol, opts.max_iter)?;
        timings.insert("decomposition".into(), clock.elapsed().as_secs_f64() * 1e3);
        report.decomposition = Some(DecompositionSection::from_decomposition(&dec));
        notes.push(
            "weakly reducible non-symmetric input: structure report only, \
             no eigenvariety claim"
                .to_string(),
        );
    }

    report.notes = notes;
    if opts.record_timings {
        report.timings_ms = Some(timings);
    }
    Ok(report)
}

pub fn analyze_hypergraph(
    g: &UniformHypergraph,
    path: Option<String>,
    opts: &AnalysisOptions,
) -> Result<AnalysisReport, AnalysisError> {
    if g.edge_count() == 0 {
        return Err(AnalysisError::EdgelessHypergraph);
    }
    let a = g.adjacency_tensor();
    let input = InputDescriptor::for_hypergraph(g, &a, path);
    analyze_tensor(&a, input, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::distinct_permutations;

    fn swap_tensor() -> SparseTensor {
        SparseTensor::new(3, 2, [(vec![0, 1, 1], 1.0), (vec![1, 0, 0], 1.0)]).unwrap()
    }

    fn analyze(a: &SparseTensor) -> AnalysisReport {
        analyze_tensor(
            a,
            InputDescriptor::for_tensor(a, None),
            &AnalysisOptions::default(),
        )
        .unwrap()
    }

    #[test]
    fn swap_tensor_full_path() {
        let report = analyze(&swap_tensor());
        let spectral = report.spectral.as_ref().unwrap();
        assert!((spectral.rho - 1.0).abs() < 1e-10);
        let variety = report.eigenvariety.as_ref().unwrap();
        assert_eq!(variety.s, 2);
        assert_eq!(variety.ell, 2);
        let verdict = report.dimension.as_ref().unwrap();
        assert_eq!(verdict.dim, 0);
        let counts = report.eigenvector_counts.as_ref().unwrap();
        assert_eq!(counts.len(), 2);
        assert!(counts.iter().all(|c| c.count == 2 && c.enumerated));
        assert!(report.decomposition.is_none());
    }

    #[test]
    fn section5_structure_only_path() {
        let a = SparseTensor::new(
            3,
            4,
            [
                (vec![0, 0, 0], 1.0),
                (vec![0, 1, 3], 1.0),
                (vec![1, 2, 3], 1.0),
                (vec![2, 3, 0], 1.0),
            ],
        )
        .unwrap();
        let report = analyze(&a);
        assert!(report.spectral.is_none());
        assert!(report.eigenvariety.is_none());
        assert!(report.dimension.is_none());
        let dec = report.decomposition.as_ref().unwrap();
        let members: Vec<&[usize]> = dec.classes.iter().map(|c| c.members.as_slice()).collect();
        assert_eq!(members, vec![&[1usize, 2, 3][..], &[4usize][..]]);
        assert!(report
            .notes
            .iter()
            .any(|n| n.contains("no eigenvariety claim")));
    }

    #[test]
    fn reducible_symmetric_path() {
        let mut entries = Vec::new();
        for p in distinct_permutations(&[0, 1, 2]) {
            entries.push((p, 0.5));
        }
        for p in distinct_permutations(&[3, 4, 5]) {
            entries.push((p, 0.5));
        }
        let a = SparseTensor::new(3, 6, entries).unwrap();
        let report = analyze(&a);
        let verdict = report.dimension.as_ref().unwrap();
        assert_eq!((verdict.k, verdict.dim), (2, 1));
        assert!(report.decomposition.is_some());
        assert!(report.eigenvariety.is_none());
    }

    #[test]
    fn zero_tensor_is_reported_not_rejected() {
        let report = analyze(&SparseTensor::zero(3, 3));
        assert!(report.spectral.is_none());
        assert!(report.dimension.is_none());
        assert!(report.notes.iter().any(|n| n.contains("zero tensor")));
    }

    #[test]
    fn hypergraph_and_expanded_tensor_agree() {
        let g = UniformHypergraph::parse("3 3 1\n1 2 3\n").unwrap();
        let via_graph = analyze_hypergraph(&g, None, &AnalysisOptions::default()).unwrap();
        let a = g.adjacency_tensor();
        let via_tensor = analyze(&a);
        let lhs = serde_json::to_string(&via_graph.eigenvariety).unwrap();
        let rhs = serde_json::to_string(&via_tensor.eigenvariety).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(via_graph.eigenvariety.as_ref().unwrap().s, 3);
        assert_eq!(via_graph.dimension.as_ref().unwrap().dim, 0);
    }

    #[test]
    fn order_four_single_edge_full_pipeline() {
        // one 4-edge: every phase vector with t2+t3+t4 = 0 (mod 4) fixes the
        // tensor, so s = 16; the spectrum has full 4-fold rotation symmetry
        let g = UniformHypergraph::parse("4 4 1\n1 2 3 4\n").unwrap();
        let report = analyze_hypergraph(
            &g,
            None,
            &AnalysisOptions {
                run_oracle: true,
                ..Default::default()
            },
        )
        .unwrap();
        let spectral = report.spectral.as_ref().unwrap();
        assert!((spectral.rho - 1.0).abs() < 1e-10);
        let variety = report.eigenvariety.as_ref().unwrap();
        assert_eq!(variety.s, 16);
        assert_eq!(variety.ell, 4);
        assert!(variety.ell_exact);
        assert_eq!(variety.modulus_used, 4);
        let counts = report.eigenvector_counts.as_ref().unwrap();
        assert_eq!(counts.len(), 4);
        assert!(counts.iter().all(|c| c.count == 16 && c.enumerated));
        assert!(report.oracle.as_ref().unwrap().is_match());
    }

    #[test]
    fn disconnected_hypergraph_gets_a_dimension_verdict() {
        let g = UniformHypergraph::parse("3 6 2\n1 2 3\n4 5 6\n").unwrap();
        let report = analyze_hypergraph(&g, None, &AnalysisOptions::default()).unwrap();
        let verdict = report.dimension.as_ref().unwrap();
        assert_eq!((verdict.k, verdict.dim), (2, 1));

        // an isolated vertex contributes a zero class, not a component
        let g = UniformHypergraph::parse("3 4 1\n1 2 3\n").unwrap();
        let report = analyze_hypergraph(&g, None, &AnalysisOptions::default()).unwrap();
        let verdict = report.dimension.as_ref().unwrap();
        assert_eq!((verdict.k, verdict.dim), (1, 0));
    }

    #[test]
    fn edgeless_hypergraph_is_an_error() {
        let g = UniformHypergraph::parse("3 4 0\n").unwrap();
        assert!(matches!(
            analyze_hypergraph(&g, None, &AnalysisOptions::default()),
            Err(AnalysisError::EdgelessHypergraph)
        ));
    }

    #[test]
    fn timings_only_on_request() {
        let a = swap_tensor();
        let plain = analyze(&a);
        assert!(plain.timings_ms.is_none());
        let timed = analyze_tensor(
            &a,
            InputDescriptor::for_tensor(&a, None),
            &AnalysisOptions {
                record_timings: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(timed.timings_ms.is_some());
    }

    #[test]
    fn oracle_cross_validation_through_the_pipeline() {
        let report = analyze_tensor(
            &swap_tensor(),
            InputDescriptor::for_tensor(&swap_tensor(), None),
            &AnalysisOptions {
                run_oracle: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(report.oracle.as_ref().unwrap().is_match());
    }

    #[test]
    fn report_serialization_is_deterministic() {
        let a = swap_tensor();
        let r1 = serde_json::to_string_pretty(&analyze(&a)).unwrap();
        let r2 = serde_json::to_string_pretty(&analyze(&a)).unwrap();
        assert_eq!(r1, r2);
    }
}
