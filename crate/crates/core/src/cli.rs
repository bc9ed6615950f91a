//! Command-line verbs and their file formats.
//!
//! Instance and report files are JSON. Complex numbers are written as
//! `[re, im]` pairs; floats use shortest round-trip formatting, so values
//! survive a write/read cycle bit for bit.
//!
//! Exit codes: 0 compatible/success, 1 incompatible, 2 input or validation
//! error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::compat::{full_report, CompatReport};
use crate::density::{validate_density, DensityMatrix};
use crate::linalg::{ComplexMatrix, Subspace, Tolerances, C64};
use crate::random::{
    random_density_matrix, random_density_on, random_permutation, random_unit_vector, random_unitary,
    rng_from_seed,
};
use crate::scenario::{run_scenario, ScenarioResult};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INCOMPATIBLE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

/// `[re, im]`.
pub type ComplexPair = [f64; 2];

fn to_pair(z: &C64) -> ComplexPair {
    [z.re, z.im]
}

fn from_pair(p: &ComplexPair) -> C64 {
    C64::new(p[0], p[1])
}

pub fn vector_to_pairs(v: &[C64]) -> Vec<ComplexPair> {
    v.iter().map(to_pair).collect()
}

pub fn pairs_to_vector(v: &[ComplexPair]) -> Vec<C64> {
    v.iter().map(from_pair).collect()
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid instance:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),
    #[error("invalid arguments: {0}")]
    Arguments(String),
    #[error(transparent)]
    Library(#[from] crate::Error),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ToleranceOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank_rel: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub match_abs: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedMatrix {
    pub name: String,
    /// `dim` rows of `dim` `[re, im]` pairs.
    pub entries: Vec<Vec<ComplexPair>>,
}

impl NamedMatrix {
    pub fn from_matrix(name: impl Into<String>, m: &ComplexMatrix) -> Self {
        Self {
            name: name.into(),
            entries: m.to_rows().iter().map(|r| vector_to_pairs(r)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub dim: usize,
    pub matrices: Vec<NamedMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceOverrides>,
}

/// A parsed and validated instance.
#[derive(Debug, Clone)]
pub struct Instance {
    pub names: Vec<String>,
    pub rhos: Vec<DensityMatrix>,
    pub tolerances: Tolerances,
}

impl InstanceFile {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes") + "\n"
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_owned(),
            source,
        })?;
        Self::from_json(&text)
    }

    /// Resolves tolerances (flags win over file overrides, which win over
    /// defaults) and validates every matrix, collecting one diagnostic per
    /// offending matrix.
    pub fn validate(&self, flags: &ToleranceOverrides) -> Result<Instance, CliError> {
        let file = self.tolerances.clone().unwrap_or_default();
        let defaults = Tolerances::default();
        let tolerances = Tolerances::new(
            flags.rank_rel.or(file.rank_rel).unwrap_or(defaults.rank_rel),
            flags.match_abs.or(file.match_abs).unwrap_or(defaults.match_abs),
        )?;
        if self.dim == 0 {
            return Err(CliError::Validation(vec!["dim must be positive".into()]));
        }
        if self.matrices.is_empty() {
            return Err(CliError::Validation(vec!["instance contains no matrices".into()]));
        }
        let mut problems = Vec::new();
        let mut rhos = Vec::new();
        for (i, named) in self.matrices.iter().enumerate() {
            match self.parse_matrix(named).and_then(|m| Ok(validate_density(&m, &tolerances)?)) {
                Ok(rho) => rhos.push(rho),
                Err(e) => problems.push(format!("matrix {i} ({:?}): {e}", named.name)),
            }
        }
        if !problems.is_empty() {
            return Err(CliError::Validation(problems));
        }
        Ok(Instance {
            names: self.matrices.iter().map(|m| m.name.clone()).collect(),
            rhos,
            tolerances,
        })
    }

    fn parse_matrix(&self, named: &NamedMatrix) -> Result<ComplexMatrix, CliError> {
        let d = self.dim;
        if named.entries.len() != d || named.entries.iter().any(|r| r.len() != d) {
            return Err(CliError::Library(crate::Error::DimensionMismatch(format!(
                "expected a {d}x{d} grid"
            ))));
        }
        let data = named.entries.iter().flatten().map(from_pair).collect();
        Ok(ComplexMatrix::new(d, d, data)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairTable {
    pub holds: Vec<Vec<bool>>,
    pub values: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObserverSection {
    pub name: String,
    pub distance: f64,
    pub outcome_probability: f64,
    pub recovered: Vec<Vec<ComplexPair>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSection {
    pub success: bool,
    pub joint_zero_probability: f64,
    pub ancilla_dims: Vec<usize>,
    pub observers: Vec<ObserverSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub names: Vec<String>,
    pub dim: usize,
    pub n_matrices: usize,
    pub rank_rel: f64,
    pub match_abs: f64,
    pub bfm_compatible: bool,
    pub intersection_dim: usize,
    pub forbidden_dim: usize,
    pub witness: Option<Vec<ComplexPair>>,
    pub marginal: bool,
    pub averaged_projector_spectrum: Vec<f64>,
    pub all_commute: bool,
    pub all_products_nonzero: bool,
    /// Residuals `‖[ρ_a, ρ_b]‖_F`.
    pub pairwise_commute: PairTable,
    /// Overlaps `tr(ρ_a ρ_b)`.
    pub pairwise_product_nonzero: PairTable,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<ScenarioSection>,
}

impl ReportFile {
    pub fn new(instance: &Instance, report: &CompatReport) -> Self {
        let table = |checks: &Vec<Vec<crate::compat::PairCheck>>| PairTable {
            holds: checks.iter().map(|r| r.iter().map(|c| c.holds).collect()).collect(),
            values: checks.iter().map(|r| r.iter().map(|c| c.value).collect()).collect(),
        };
        let mut notes = Vec::new();
        if report.marginal {
            notes.push(
                "marginal: an averaged-projector eigenvalue lies near the intersection cutoff; \
                 the verdict depends on --tol-rank"
                    .to_string(),
            );
        }
        Self {
            names: instance.names.clone(),
            dim: report.dim,
            n_matrices: report.n_matrices,
            rank_rel: instance.tolerances.rank_rel,
            match_abs: instance.tolerances.match_abs,
            bfm_compatible: report.bfm_compatible,
            intersection_dim: report.intersection_dim,
            forbidden_dim: report.forbidden_dim,
            witness: report.witness.as_deref().map(vector_to_pairs),
            marginal: report.marginal,
            averaged_projector_spectrum: report.averaged_projector_spectrum.clone(),
            all_commute: report.all_commute(),
            all_products_nonzero: report.all_products_nonzero(),
            pairwise_commute: table(&report.pairwise_commute),
            pairwise_product_nonzero: table(&report.pairwise_product_nonzero),
            notes,
            scenario: None,
        }
    }

    pub fn with_scenario(mut self, names: &[String], result: &ScenarioResult) -> Self {
        self.scenario = Some(ScenarioSection {
            success: result.success,
            joint_zero_probability: result.joint_zero_probability,
            ancilla_dims: result.state.ancilla_dims().to_vec(),
            observers: names
                .iter()
                .zip(&result.observers)
                .map(|(name, o)| ObserverSection {
                    name: name.clone(),
                    distance: o.distance,
                    outcome_probability: o.conditional.probability,
                    recovered: o.recovered.matrix().to_rows().iter().map(|r| vector_to_pairs(r)).collect(),
                })
                .collect(),
        });
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn witness_vector(&self) -> Option<Vec<C64>> {
        self.witness.as_deref().map(pairs_to_vector)
    }
}

/// Outcome of a verb: exit code, the file to emit and an optional message for
/// the error stream.
#[derive(Debug)]
pub struct CommandOutput {
    pub exit_code: i32,
    pub body: String,
    pub message: Option<String>,
}

pub fn cmd_check(input: &Path, flags: &ToleranceOverrides) -> Result<(CommandOutput, ReportFile), CliError> {
    let instance = InstanceFile::load(input)?.validate(flags)?;
    let report = full_report(&instance.rhos, &instance.tolerances)?;
    let file = ReportFile::new(&instance, &report);
    let exit_code = if report.bfm_compatible {
        EXIT_OK
    } else {
        EXIT_INCOMPATIBLE
    };
    Ok((
        CommandOutput {
            exit_code,
            body: file.to_json(),
            message: None,
        },
        file,
    ))
}

pub fn cmd_scenario(input: &Path, flags: &ToleranceOverrides) -> Result<(CommandOutput, ReportFile), CliError> {
    let instance = InstanceFile::load(input)?.validate(flags)?;
    let tol = instance.tolerances;
    let report = full_report(&instance.rhos, &tol)?;
    let file = ReportFile::new(&instance, &report);
    match run_scenario(&instance.rhos, &tol) {
        Ok(result) => {
            let exit_code = if result.success {
                EXIT_OK
            } else {
                EXIT_INCOMPATIBLE
            };
            let message = (!result.success).then(|| {
                format!(
                    "recovered density matrices deviate by up to {:e} (> {:e})",
                    result.distances().iter().cloned().fold(0.0, f64::max),
                    tol.match_abs
                )
            });
            let file = file.with_scenario(&instance.names, &result);
            Ok((
                CommandOutput {
                    exit_code,
                    body: file.to_json(),
                    message,
                },
                file,
            ))
        }
        Err(crate::Error::IncompatibleInputs) => Ok((
            CommandOutput {
                exit_code: EXIT_INCOMPATIBLE,
                body: file.to_json(),
                message: Some(
                    "no scenario exists: the supports have no common state, so no state \
                     can appear in an expansion of every density matrix"
                        .into(),
                ),
            },
            file,
        )),
        Err(e) => Err(e.into()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenerateMode {
    Compatible,
    Incompatible,
    PairwiseOnly,
}

/// Random instance generator.
///
/// - `Compatible`: every matrix comes from an ensemble containing one shared
///   random unit vector.
/// - `Incompatible`: two matrices have orthogonal supports, so the joint
///   intersection is empty.
/// - `PairwiseOnly`: supports `span{u₀,u₁}`, `span{u₁,u₂}`, `span{u₀,u₂}`
///   for the first columns of a random unitary.
pub fn generate_instance(dim: usize, count: usize, seed: u64, mode: GenerateMode) -> Result<InstanceFile, CliError> {
    if dim < 2 {
        return Err(CliError::Arguments(format!("--dim must be at least 2, got {dim}")));
    }
    if count < 2 {
        return Err(CliError::Arguments(format!("--count must be at least 2, got {count}")));
    }
    if mode == GenerateMode::PairwiseOnly && (dim < 3 || count != 3) {
        return Err(CliError::Arguments(
            "pairwise-only requires --dim >= 3 and --count = 3".into(),
        ));
    }
    let mut rng = rng_from_seed(seed);
    let matrices: Vec<ComplexMatrix> = match mode {
        GenerateMode::Compatible => {
            let common = random_unit_vector(&mut rng, dim);
            (0..count)
                .map(|_| {
                    let extra = rng.random_range(0..dim);
                    let mut m = ComplexMatrix::zeros(dim, dim);
                    let mut total = 0.0;
                    for i in 0..=extra {
                        let state = if i == 0 {
                            common.clone()
                        } else {
                            random_unit_vector(&mut rng, dim)
                        };
                        let w: f64 = rng.random_range(0.1..1.0);
                        total += w;
                        m.add_outer(C64::new(w, 0.0), &state, &state);
                    }
                    m.scale_real(1.0 / total).symmetrized()
                })
                .collect()
        }
        GenerateMode::Incompatible => {
            let u = random_unitary(&mut rng, dim);
            let cols: Vec<Vec<C64>> = (0..dim).map(|j| u.column(j)).collect();
            let split = rng.random_range(1..dim);
            let second_len = rng.random_range(1..=dim - split);
            let first = Subspace::from_orthonormal(dim, cols[..split].to_vec());
            let second = Subspace::from_orthonormal(dim, cols[split..split + second_len].to_vec());
            let mut ms = vec![random_density_on(&mut rng, &first), random_density_on(&mut rng, &second)];
            for _ in 2..count {
                let rank = rng.random_range(1..=dim);
                ms.push(random_density_matrix(&mut rng, dim, rank));
            }
            let order = random_permutation(&mut rng, count);
            order.into_iter().map(|i| ms[i].clone()).collect()
        }
        GenerateMode::PairwiseOnly => {
            let u = random_unitary(&mut rng, dim);
            [[0, 1], [1, 2], [0, 2]]
                .iter()
                .map(|pair| {
                    let plane = Subspace::from_orthonormal(dim, pair.iter().map(|&j| u.column(j)).collect());
                    random_density_on(&mut rng, &plane)
                })
                .collect()
        }
    };
    Ok(InstanceFile {
        dim,
        matrices: matrices
            .iter()
            .enumerate()
            .map(|(i, m)| NamedMatrix::from_matrix(format!("rho_{i}"), m))
            .collect(),
        tolerances: None,
    })
}

#[derive(Debug, Parser)]
#[command(name = "dmcompat", version, about = "Decide whether density matrices can describe one system")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Args)]
pub struct CheckArgs {
    /// Instance file (JSON).
    #[arg(long)]
    pub input: PathBuf,
    /// Report destination; standard output when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Relative eigenvalue cutoff [default: 1e-10]
    #[arg(long = "tol-rank")]
    pub tol_rank: Option<f64>,
    /// Absolute matching threshold [default: 1e-8]
    #[arg(long = "tol-match")]
    pub tol_match: Option<f64>,
}

impl CheckArgs {
    fn overrides(&self) -> ToleranceOverrides {
        ToleranceOverrides {
            rank_rel: self.tol_rank,
            match_abs: self.tol_match,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Report compatibility verdicts for an instance.
    Check(CheckArgs),
    /// Build and verify the multi-observer scenario for a compatible instance.
    Scenario(CheckArgs),
    /// Write a random instance.
    Generate {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum)]
        mode: GenerateMode,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn emit(output: Option<&Path>, body: &str) -> Result<(), CliError> {
    match output {
        Some(path) => fs::write(path, body).map_err(|source| CliError::Write {
            path: path.to_owned(),
            source,
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Write {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

fn execute(command: Command) -> Result<i32, CliError> {
    let (out, path) = match command {
        Command::Check(args) => (cmd_check(&args.input, &args.overrides())?.0, args.output),
        Command::Scenario(args) => (cmd_scenario(&args.input, &args.overrides())?.0, args.output),
        Command::Generate {
            dim,
            count,
            seed,
            mode,
            output,
        } => {
            let file = generate_instance(dim, count, seed, mode)?;
            (
                CommandOutput {
                    exit_code: EXIT_OK,
                    body: file.to_json(),
                    message: None,
                },
                output,
            )
        }
    };
    emit(path.as_deref(), &out.body)?;
    if let Some(msg) = out.message {
        eprintln!("{msg}");
    }
    Ok(out.exit_code)
}

/// Parses arguments, runs the verb and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn instance(dim: usize, matrices: &[(&str, ComplexMatrix)]) -> InstanceFile {
        InstanceFile {
            dim,
            matrices: matrices.iter().map(|(n, m)| NamedMatrix::from_matrix(*n, m)).collect(),
            tolerances: None,
        }
    }

    #[test]
    fn parses_hand_written_instance() {
        let text = r#"{"dim": 2, "matrices": [
            {"name": "half", "entries": [[[0.5, 0], [0, 0]], [[0, 0], [0.5, 0]]]},
            {"name": "plus", "entries": [[[0.5, 0], [0.5, 0]], [[0.5, 0], [0.5, 0]]]}
        ], "tolerances": {"rank_rel": 1e-9}}"#;
        let file = InstanceFile::from_json(text).unwrap();
        let inst = file.validate(&ToleranceOverrides::default()).unwrap();
        assert_eq!(inst.names, vec!["half", "plus"]);
        assert_eq!(inst.tolerances.rank_rel, 1e-9);
        assert_eq!(inst.tolerances.match_abs, 1e-8);
        let flags = ToleranceOverrides {
            rank_rel: Some(1e-11),
            match_abs: None,
        };
        assert_eq!(file.validate(&flags).unwrap().tolerances.rank_rel, 1e-11);
    }

    #[test]
    fn diagnostics_name_each_bad_matrix() {
        let file = instance(
            2,
            &[
                ("ok", ComplexMatrix::from_diag(&[0.5, 0.5])),
                ("trace2", ComplexMatrix::from_diag(&[1.0, 1.0])),
                ("neg", ComplexMatrix::from_diag(&[1.5, -0.5])),
            ],
        );
        match file.validate(&ToleranceOverrides::default()) {
            Err(CliError::Validation(msgs)) => {
                assert_eq!(msgs.len(), 2);
                assert!(msgs[0].contains("trace2") && msgs[0].contains("TraceNotOne"));
                assert!(msgs[1].contains("neg") && msgs[1].contains("NotPositive"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_grids_and_tolerances() {
        let text = r#"{"dim": 2, "matrices": [{"name": "x", "entries": [[[1, 0]]]}]}"#;
        let file = InstanceFile::from_json(text).unwrap();
        assert!(matches!(
            file.validate(&ToleranceOverrides::default()),
            Err(CliError::Validation(_))
        ));
        let empty = InstanceFile::from_json(r#"{"dim": 2, "matrices": []}"#).unwrap();
        assert!(empty.validate(&ToleranceOverrides::default()).is_err());
        let flags = ToleranceOverrides {
            rank_rel: Some(0.5),
            match_abs: None,
        };
        let file = instance(2, &[("ok", ComplexMatrix::from_diag(&[0.5, 0.5]))]);
        assert!(matches!(
            file.validate(&flags),
            Err(CliError::Library(crate::Error::InvalidTolerance(_)))
        ));
        assert!(InstanceFile::from_json("{not json").is_err());
    }

    #[test]
    fn generator_argument_checks() {
        assert!(generate_instance(1, 2, 0, GenerateMode::Compatible).is_err());
        assert!(generate_instance(2, 1, 0, GenerateMode::Compatible).is_err());
        assert!(generate_instance(2, 3, 0, GenerateMode::PairwiseOnly).is_err());
        assert!(generate_instance(3, 4, 0, GenerateMode::PairwiseOnly).is_err());
        assert!(generate_instance(3, 3, 0, GenerateMode::PairwiseOnly).is_ok());
    }

    #[test]
    fn generated_files_round_trip_exactly() {
        let file = generate_instance(4, 3, 7, GenerateMode::Compatible).unwrap();
        let text = file.to_json();
        assert_eq!(InstanceFile::from_json(&text).unwrap(), file);
        assert_eq!(generate_instance(4, 3, 7, GenerateMode::Compatible).unwrap().to_json(), text);
        assert_ne!(generate_instance(4, 3, 8, GenerateMode::Compatible).unwrap().to_json(), text);
    }
}
