//! Command-line front end for nonnegative tensor spectral analysis.
//!
//! Exit codes: 0 on success, 2 when oracle cross-validation found a verified
//! mismatch, 1 on any other failure.

mod reports;

use std::f64::consts::TAU;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use eigenvariety::analysis::{
    analyze_hypergraph, analyze_tensor, AnalysisOptions, AnalysisReport, InputDescriptor,
};
use eigenvariety::decomposition::spectral_radius_bracket;
use eigenvariety::graph::StructureProfile;
use eigenvariety::hypergraph::UniformHypergraph;
use eigenvariety::oracle::{enumerate_spectral_circle, OracleVerdict};
use eigenvariety::phase::{
    eigenvectors, stabilizing_index, EigenvarietyReport, EigenvectorSet, PhaseOptions,
};
use eigenvariety::spectral::{spectral_radius_with, SpectralResult};
use eigenvariety::tensor::SparseTensor;

use reports::{
    render_analysis_text, render_cyclic_text, render_eigvecs_text, render_oracle_text,
    render_rho_text, render_stab_text, ComplexValue, CyclicReport, EigvecsReport, OracleRunReport,
    RhoReport, StabReport,
};

#[derive(Parser)]
#[command(
    name = "eigenvariety",
    version,
    about = "Spectral radius, Perron vectors and spectral-circle eigenvector \
             structure of nonnegative tensors and uniform hypergraphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct CommonArgs {
    /// Input file: tensor coordinate format, or a hypergraph edge list with
    /// --hypergraph
    input: PathBuf,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Treat the input as a hypergraph file and analyze its adjacency tensor
    #[arg(long)]
    hypergraph: bool,
    /// Spectral convergence tolerance
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    /// Power iteration cap
    #[arg(long, default_value_t = 100_000)]
    max_iter: usize,
    /// Largest eigenvector list materialized before reporting generators
    #[arg(long, default_value_t = 10_000)]
    cap: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline: structure, spectral radius, stabilizing index, cyclic
    /// index, eigenvector counts and the eigenvariety dimension
    Analyze {
        #[command(flatten)]
        common: CommonArgs,
        /// Cross-validate the eigenvariety report by brute-force enumeration
        #[arg(long)]
        oracle: bool,
        /// Include wall-clock timings (breaks byte-for-byte determinism)
        #[arg(long)]
        timings: bool,
    },
    /// Spectral radius with Collatz-Wielandt certificate
    Rho {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Stabilizing index s and group generators
    Stab {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Cyclic index and coset representatives
    Cyclic {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Spectral-circle eigenvectors for one rotation class
    Eigvecs {
        #[command(flatten)]
        common: CommonArgs,
        /// Rotation class index in [0, ell)
        #[arg(long, default_value_t = 0)]
        j: u64,
    },
    /// Brute-force enumeration of spectral-circle eigenvectors
    Oracle {
        #[command(flatten)]
        common: CommonArgs,
        /// Enumeration modulus (defaults to the report modulus policy)
        #[arg(long)]
        modulus: Option<u64>,
    },
}

struct LoadedInput {
    tensor: SparseTensor,
    descriptor: InputDescriptor,
}

fn load_input(common: &CommonArgs) -> Result<LoadedInput, String> {
    let path = common.input.display().to_string();
    if common.hypergraph {
        let g = UniformHypergraph::load(&common.input).map_err(|e| format!("hypergraph: {e}"))?;
        let tensor = g.adjacency_tensor();
        let descriptor = InputDescriptor::for_hypergraph(&g, &tensor, Some(path));
        Ok(LoadedInput { tensor, descriptor })
    } else {
        let tensor = SparseTensor::load(&common.input).map_err(|e| format!("tensor_core: {e}"))?;
        let descriptor = InputDescriptor::for_tensor(&tensor, Some(path));
        Ok(LoadedInput { tensor, descriptor })
    }
}

fn analysis_options(common: &CommonArgs, oracle: bool, timings: bool) -> AnalysisOptions {
    AnalysisOptions {
        tol: common.tol,
        max_iter: common.max_iter,
        enumeration_cap: common.cap,
        run_oracle: oracle,
        record_timings: timings,
        ..Default::default()
    }
}

fn phase_options(common: &CommonArgs) -> PhaseOptions {
    PhaseOptions {
        enumeration_cap: common.cap,
        ..Default::default()
    }
}

fn emit<T: serde::Serialize>(format: Format, value: &T, text: impl FnOnce() -> String) {
    match format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(value).expect("report serialization")
        ),
        Format::Text => print!("{}", text()),
    }
}

/// The weakly irreducible front half shared by stab/cyclic/eigvecs/oracle.
fn spectral_and_variety(
    common: &CommonArgs,
    input: &LoadedInput,
) -> Result<(StructureProfile, SpectralResult, EigenvarietyReport), String> {
    let profile = StructureProfile::of(&input.tensor);
    let spectral = spectral_radius_with(&input.tensor, common.tol, common.max_iter)
        .map_err(|e| format!("spectral: {e}"))?;
    let variety = stabilizing_index(&input.tensor, &profile, &spectral, &phase_options(common))
        .map_err(|e| format!("phase_group: {e}"))?;
    Ok((profile, spectral, variety))
}

fn run(cli: Cli) -> Result<u8, String> {
    match cli.command {
        Command::Analyze {
            common,
            oracle,
            timings,
        } => {
            let opts = analysis_options(&common, oracle, timings);
            let report: AnalysisReport = if common.hypergraph {
                let path = common.input.display().to_string();
                let g = UniformHypergraph::load(&common.input)
                    .map_err(|e| format!("hypergraph: {e}"))?;
                analyze_hypergraph(&g, Some(path), &opts).map_err(|e| e.to_string())?
            } else {
                let input = load_input(&common)?;
                analyze_tensor(&input.tensor, input.descriptor, &opts).map_err(|e| e.to_string())?
            };
            emit(common.format, &report, || render_analysis_text(&report));
            if let Some(OracleVerdict::Mismatch { .. }) = report.oracle {
                return Ok(2);
            }
            Ok(0)
        }
        Command::Rho { common } => {
            let input = load_input(&common)?;
            let profile = StructureProfile::of(&input.tensor);
            let report = if profile.weakly_irreducible && !input.tensor.is_zero() {
                let s = spectral_radius_with(&input.tensor, common.tol, common.max_iter)
                    .map_err(|e| format!("spectral: {e}"))?;
                RhoReport {
                    schema_version: 1,
                    input: input.descriptor,
                    weakly_irreducible: true,
                    rho: s.rho,
                    lower: s.lower,
                    upper: s.upper,
                    iterations: Some(s.iterations),
                    residual: Some(s.residual),
                }
            } else {
                let (lower, upper) = spectral_radius_bracket(&input.tensor)
                    .map_err(|e| format!("decomposition: {e}"))?;
                RhoReport {
                    schema_version: 1,
                    input: input.descriptor,
                    weakly_irreducible: false,
                    rho: (lower + upper) / 2.0,
                    lower,
                    upper,
                    iterations: None,
                    residual: None,
                }
            };
            emit(common.format, &report, || render_rho_text(&report));
            Ok(0)
        }
        Command::Stab { common } => {
            let input = load_input(&common)?;
            let (_, _, variety) = spectral_and_variety(&common, &input)?;
            let report = StabReport {
                schema_version: 1,
                input: input.descriptor,
                s: variety.s,
                modulus: variety.modulus_used,
                exact: variety.exact,
                generators: variety.generators,
            };
            emit(common.format, &report, || render_stab_text(&report));
            Ok(0)
        }
        Command::Cyclic { common } => {
            let input = load_input(&common)?;
            let (_, _, variety) = spectral_and_variety(&common, &input)?;
            let report = CyclicReport {
                schema_version: 1,
                input: input.descriptor,
                ell: variety.ell,
                ell_exact: variety.ell_exact,
                cosets: variety.cosets,
            };
            emit(common.format, &report, || render_cyclic_text(&report));
            Ok(0)
        }
        Command::Eigvecs { common, j } => {
            let input = load_input(&common)?;
            let (_, spectral, variety) = spectral_and_variety(&common, &input)?;
            let set = eigenvectors(
                &input.tensor,
                &spectral,
                &variety,
                j,
                &phase_options(&common),
            )
            .map_err(|e| format!("phase_group: {e}"))?;
            let lambda = Complex64::from_polar(spectral.rho, TAU * j as f64 / variety.ell as f64);
            let report = match set {
                EigenvectorSet::Full(vecs) => EigvecsReport {
                    schema_version: 1,
                    input: input.descriptor,
                    j,
                    ell: variety.ell,
                    lambda: lambda.into(),
                    count: vecs.len() as u64,
                    vectors: Some(
                        vecs.into_iter()
                            .map(|v| v.into_iter().map(ComplexValue::from).collect())
                            .collect(),
                    ),
                    generators: None,
                },
                EigenvectorSet::Capped { generators } => EigvecsReport {
                    schema_version: 1,
                    input: input.descriptor,
                    j,
                    ell: variety.ell,
                    lambda: lambda.into(),
                    count: variety.s,
                    vectors: None,
                    generators: Some(generators),
                },
            };
            emit(common.format, &report, || render_eigvecs_text(&report));
            Ok(0)
        }
        Command::Oracle { common, modulus } => {
            let input = load_input(&common)?;
            let (_, spectral, variety) = spectral_and_variety(&common, &input)?;
            let modulus = modulus.unwrap_or(variety.modulus_used);
            let result = enumerate_spectral_circle(
                &input.tensor,
                &spectral,
                modulus,
                eigenvariety::oracle::DEFAULT_ORACLE_TOL,
                eigenvariety::oracle::DEFAULT_ORACLE_BUDGET,
            )
            .map_err(|e| format!("oracle: {e}"))?;
            let report = OracleRunReport {
                schema_version: 1,
                source: "oracle".to_string(),
                input: input.descriptor,
                modulus: result.modulus,
                rho: result.rho,
                s: result.phase_zero_count() as u64,
                ell: result.classes.len() as u64,
                classes: result.classes.clone(),
                eigenpairs: result.eigenpairs.clone(),
            };
            emit(common.format, &report, || render_oracle_text(&report));
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}
