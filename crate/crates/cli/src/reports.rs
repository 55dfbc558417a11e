//! Report shapes for the partial subcommands and the text renderer.
//!
//! Field order is fixed by struct declaration and floats go through the
//! shortest-round-trip formatter, so identical inputs and flags always
//! produce byte-identical output.

use eigenvariety::analysis::{AnalysisReport, InputDescriptor};
use eigenvariety::decomposition::ClassValue;
use eigenvariety::oracle::{OracleEigenpair, OraclePhaseClass, OracleVerdict};
use eigenvariety::phase::PhaseDiagonal;
use eigenvariety::spectral::SpectralResult;
use num_complex::Complex64;
use serde::Serialize;
use std::fmt::Write;

#[derive(Serialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexValue {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

#[derive(Serialize)]
pub struct RhoReport {
    pub schema_version: u32,
    pub input: InputDescriptor,
    pub weakly_irreducible: bool,
    pub rho: f64,
    pub lower: f64,
    pub upper: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
}

#[derive(Serialize)]
pub struct StabReport {
    pub schema_version: u32,
    pub input: InputDescriptor,
    pub s: u64,
    pub modulus: u64,
    pub exact: bool,
    pub generators: Vec<PhaseDiagonal>,
}

#[derive(Serialize)]
pub struct CyclicReport {
    pub schema_version: u32,
    pub input: InputDescriptor,
    pub ell: u64,
    pub ell_exact: bool,
    pub cosets: Vec<Option<PhaseDiagonal>>,
}

#[derive(Serialize)]
pub struct EigvecsReport {
    pub schema_version: u32,
    pub input: InputDescriptor,
    pub j: u64,
    pub ell: u64,
    pub lambda: ComplexValue,
    pub count: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vectors: Option<Vec<Vec<ComplexValue>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<PhaseDiagonal>>,
}

#[derive(Serialize)]
pub struct OracleRunReport {
    pub schema_version: u32,
    pub source: String,
    pub input: InputDescriptor,
    pub modulus: u64,
    pub rho: f64,
    pub s: u64,
    pub ell: u64,
    pub classes: Vec<OraclePhaseClass>,
    pub eigenpairs: Vec<OracleEigenpair>,
}

fn phase_diagonal_line(d: &PhaseDiagonal) -> String {
    let ts: Vec<String> = d.t.iter().map(u64::to_string).collect();
    format!("(modulus {}) t = [{}]", d.modulus, ts.join(", "))
}

fn class_value_line(v: &ClassValue) -> String {
    match v {
        ClassValue::Zero => "rho = 0 (zero subtensor)".to_string(),
        ClassValue::Certified { rho, lower, upper } => {
            format!("rho = {rho} in [{lower}, {upper}]")
        }
        ClassValue::Bracket { lower, upper } => {
            format!("rho in [{lower}, {upper}] (weakly reducible, recursive)")
        }
    }
}

fn input_line(out: &mut String, input: &InputDescriptor) {
    let path = input.path.as_deref().unwrap_or("<stdin>");
    let _ = write!(
        out,
        "input: {path} ({}, order {}, dim {}, {} entries",
        input.kind, input.order, input.dim, input.nnz
    );
    if let Some(edges) = input.edges {
        let _ = write!(out, ", {edges} edges");
    }
    let _ = writeln!(out, ")");
}

fn spectral_lines(out: &mut String, s: &SpectralResult) {
    let _ = writeln!(out, "spectral radius: {}", s.rho);
    let _ = writeln!(
        out,
        "  certificate: [{}, {}] after {} iterations, residual {}",
        s.lower, s.upper, s.iterations, s.residual
    );
}

pub fn render_analysis_text(report: &AnalysisReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "eigenvariety analysis (schema {})",
        report.schema_version
    );
    input_line(&mut out, &report.input);
    let st = &report.structure;
    let _ = writeln!(
        out,
        "structure: weakly_irreducible={} irreducible={} strongly_irreducible={}",
        st.weakly_irreducible, st.irreducible, st.strongly_irreducible
    );
    let _ = writeln!(
        out,
        "           weakly_positive={} essentially_positive={} weakly_primitive={} strongly_primitive={}",
        st.weakly_positive, st.essentially_positive, st.weakly_primitive, st.strongly_primitive
    );
    let _ = writeln!(
        out,
        "           solid graph components r = {}",
        st.solid_component_count
    );
    let _ = writeln!(
        out,
        "combinatorially symmetric: {}",
        report.combinatorially_symmetric
    );
    if let Some(s) = &report.spectral {
        spectral_lines(&mut out, s);
    }
    if let Some(v) = &report.eigenvariety {
        let _ = writeln!(
            out,
            "stabilizing index s = {} (modulus {}, {})",
            v.s,
            v.modulus_used,
            if v.exact {
                "theorem-backed"
            } else {
                "heuristic modulus"
            }
        );
        let _ = writeln!(
            out,
            "cyclic index ell = {} ({})",
            v.ell,
            if v.ell_exact {
                "congruence path"
            } else {
                "oracle lower bound"
            }
        );
        if v.generators.is_empty() {
            let _ = writeln!(out, "group generators: none (trivial group)");
        } else {
            let _ = writeln!(out, "group generators:");
            for g in &v.generators {
                let _ = writeln!(out, "  {}", phase_diagonal_line(g));
            }
        }
        let _ = writeln!(out, "coset representatives:");
        for (j, rep) in v.cosets.iter().enumerate() {
            match rep {
                Some(d) => {
                    let _ = writeln!(out, "  j={j}: {}", phase_diagonal_line(d));
                }
                None => {
                    let _ = writeln!(out, "  j={j}: absent");
                }
            }
        }
    }
    if let Some(counts) = &report.eigenvector_counts {
        let _ = writeln!(out, "eigenvectors per rotation class:");
        for c in counts {
            let _ = writeln!(
                out,
                "  j={}: {} vectors{}",
                c.j,
                c.count,
                if c.enumerated {
                    ""
                } else {
                    " (cap exceeded, coset size)"
                }
            );
        }
    }
    if let Some(dec) = &report.decomposition {
        let _ = writeln!(
            out,
            "communication classes ({}, block-triangular: {}):",
            dec.classes.len(),
            dec.block_ok
        );
        for (i, class) in dec.classes.iter().enumerate() {
            let members: Vec<String> = class.members.iter().map(usize::to_string).collect();
            let _ = writeln!(
                out,
                "  class {}: {{{}}} weakly_irreducible={} {}",
                i + 1,
                members.join(", "),
                class.weakly_irreducible,
                class_value_line(&class.value)
            );
        }
    }
    if let Some(d) = &report.dimension {
        let _ = writeln!(
            out,
            "projective eigenvariety of rho: dim = {} (k = {} component(s) at rho = {})",
            d.dim, d.k, d.rho
        );
    }
    if let Some(verdict) = &report.oracle {
        match verdict {
            OracleVerdict::Match { oracle } => {
                let _ = writeln!(
                    out,
                    "oracle: MATCH at modulus {} ({} phase classes)",
                    oracle.modulus,
                    oracle.classes.len()
                );
            }
            OracleVerdict::Mismatch { problems, .. } => {
                let _ = writeln!(out, "oracle: MISMATCH");
                for p in problems {
                    let _ = writeln!(out, "  {p}");
                }
            }
            OracleVerdict::Skipped { reason } => {
                let _ = writeln!(out, "oracle: skipped ({reason})");
            }
        }
    }
    for note in &report.notes {
        let _ = writeln!(out, "note: {note}");
    }
    if let Some(timings) = &report.timings_ms {
        let _ = writeln!(out, "timings (ms):");
        for (stage, ms) in timings {
            let _ = writeln!(out, "  {stage}: {ms:.3}");
        }
    }
    out
}

pub fn render_rho_text(r: &RhoReport) -> String {
    let mut out = String::new();
    input_line(&mut out, &r.input);
    let _ = writeln!(out, "rho = {}", r.rho);
    let _ = writeln!(out, "bracket: [{}, {}]", r.lower, r.upper);
    if let (Some(iterations), Some(residual)) = (r.iterations, r.residual) {
        let _ = writeln!(out, "iterations: {iterations}, residual: {residual}");
    } else {
        let _ = writeln!(out, "(weakly reducible: classwise bracket)");
    }
    out
}

pub fn render_stab_text(r: &StabReport) -> String {
    let mut out = String::new();
    input_line(&mut out, &r.input);
    let _ = writeln!(
        out,
        "s = {} (modulus {}, {})",
        r.s,
        r.modulus,
        if r.exact { "exact" } else { "lower bound" }
    );
    for g in &r.generators {
        let _ = writeln!(out, "generator: {}", phase_diagonal_line(g));
    }
    out
}

pub fn render_cyclic_text(r: &CyclicReport) -> String {
    let mut out = String::new();
    input_line(&mut out, &r.input);
    let _ = writeln!(
        out,
        "ell = {} ({})",
        r.ell,
        if r.ell_exact { "exact" } else { "lower bound" }
    );
    for (j, rep) in r.cosets.iter().enumerate() {
        match rep {
            Some(d) => {
                let _ = writeln!(out, "j={j}: {}", phase_diagonal_line(d));
            }
            None => {
                let _ = writeln!(out, "j={j}: absent");
            }
        }
    }
    out
}

pub fn render_eigvecs_text(r: &EigvecsReport) -> String {
    let mut out = String::new();
    input_line(&mut out, &r.input);
    let _ = writeln!(
        out,
        "j = {} of ell = {}: lambda = {} + {}i, {} eigenvector(s)",
        r.j, r.ell, r.lambda.re, r.lambda.im, r.count
    );
    if let Some(vectors) = &r.vectors {
        for (i, v) in vectors.iter().enumerate() {
            let comps: Vec<String> = v
                .iter()
                .map(|z| format!("{}{}{}i", z.re, if z.im < 0.0 { "" } else { "+" }, z.im))
                .collect();
            let _ = writeln!(out, "  x{}: [{}]", i + 1, comps.join(", "));
        }
    }
    if let Some(generators) = &r.generators {
        let _ = writeln!(out, "cap exceeded; group generators:");
        for g in generators {
            let _ = writeln!(out, "  {}", phase_diagonal_line(g));
        }
    }
    out
}

pub fn render_oracle_text(r: &OracleRunReport) -> String {
    let mut out = String::new();
    input_line(&mut out, &r.input);
    let _ = writeln!(
        out,
        "oracle enumeration at modulus {}: s = {}, ell = {} (rho = {})",
        r.modulus, r.s, r.ell, r.rho
    );
    for class in &r.classes {
        let _ = writeln!(
            out,
            "phase {}/{}: {} eigenvector(s)",
            class.numer, class.denom, class.count
        );
    }
    for pair in &r.eigenpairs {
        let ts: Vec<String> = pair.t.iter().map(u64::to_string).collect();
        let _ = writeln!(
            out,
            "  phase {}/{} t = [{}] residual {}",
            pair.phase_numer,
            pair.phase_denom,
            ts.join(", "),
            pair.residual
        );
    }
    out
}
