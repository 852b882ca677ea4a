//! Problem and report files, and the commands behind the `zariski` binary.
//!
//! Every rational in a file is a JSON string, either `"p/q"` or an integer.
//! Commands write to caller-supplied sinks and return the process exit code.

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::divisor::{
    self, format_rational, parse_rational, validate_configuration, CurveConfiguration, Divisor,
    DivisorError, SupportSet,
};
use crate::engine::{self, OracleOutcome, ZariskiResult};
use crate::linalg::{inertia, InertiaCertificate, Matrix};
use crate::Rational;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_INTERNAL: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Debug, Error)]
pub enum InputError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
    #[error("{0}")]
    Parameter(String),
}

impl InputError {
    fn field(field: impl Into<String>, message: impl fmt::Display) -> Self {
        InputError::Field {
            field: field.into(),
            message: message.to_string(),
        }
    }
}

impl From<serde_json::Error> for InputError {
    fn from(e: serde_json::Error) -> Self {
        InputError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemFile {
    pub components: Vec<String>,
    pub intersection_matrix: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub divisor: Option<Vec<String>>,
}

/// A parsed problem; the divisor is optional for witness searches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Problem {
    pub config: CurveConfiguration,
    pub divisor: Option<Divisor>,
}

impl Problem {
    pub fn require_divisor(&self) -> Result<&Divisor, InputError> {
        self.divisor
            .as_ref()
            .ok_or_else(|| InputError::field("divisor", "missing"))
    }
}

fn parse_vector(field: &str, values: &[String]) -> Result<Vec<Rational>, InputError> {
    values
        .iter()
        .enumerate()
        .map(|(i, s)| parse_rational(s).map_err(|e| InputError::field(format!("{field}[{i}]"), e)))
        .collect()
}

impl ProblemFile {
    pub fn from_json(text: &str) -> Result<Self, InputError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem serializes") + "\n"
    }

    pub fn from_problem(config: &CurveConfiguration, d: Option<&Divisor>) -> Self {
        ProblemFile {
            components: config.names().to_vec(),
            intersection_matrix: config
                .matrix()
                .to_rows()
                .iter()
                .map(|row| row.iter().map(format_rational).collect())
                .collect(),
            divisor: d.map(|d| format_vector(d.coefficients())),
        }
    }

    pub fn parse(&self) -> Result<Problem, InputError> {
        let r = self.components.len();
        if self.intersection_matrix.len() != r {
            return Err(InputError::field(
                "intersection_matrix",
                format!(
                    "has {} rows for {} components",
                    self.intersection_matrix.len(),
                    r
                ),
            ));
        }
        let mut rows = Vec::with_capacity(r);
        for (i, row) in self.intersection_matrix.iter().enumerate() {
            let field = format!("intersection_matrix[{i}]");
            if row.len() != r {
                return Err(InputError::field(
                    field,
                    format!("has {} entries for {} components", row.len(), r),
                ));
            }
            rows.push(parse_vector(&field, row)?);
        }
        let matrix =
            Matrix::from_rows(rows).map_err(|e| InputError::field("intersection_matrix", e))?;
        let config = validate_configuration(self.components.clone(), matrix).map_err(|e| {
            let field = match &e {
                DivisorError::NotSymmetric(i, j) | DivisorError::NegativeOffDiagonal(i, j) => {
                    format!("intersection_matrix[{i}][{j}]")
                }
                DivisorError::DuplicateName(_) | DivisorError::EmptyConfiguration => {
                    "components".to_string()
                }
                _ => "intersection_matrix".to_string(),
            };
            InputError::field(field, e)
        })?;
        let divisor = match &self.divisor {
            None => None,
            Some(values) => {
                if values.len() != r {
                    return Err(InputError::field(
                        "divisor",
                        format!("has {} entries for {} components", values.len(), r),
                    ));
                }
                let coefficients = parse_vector("divisor", values)?;
                if let Some(i) = coefficients.iter().position(|c| *c < Rational::zero()) {
                    return Err(InputError::field(
                        format!("divisor[{i}]"),
                        "divisor is not effective",
                    ));
                }
                Some(Divisor::new(coefficients))
            }
        };
        Ok(Problem { config, divisor })
    }
}

fn format_vector(values: &[Rational]) -> Vec<String> {
    values.iter().map(format_rational).collect()
}

fn read_text(path: &Path) -> Result<String, InputError> {
    fs::read_to_string(path).map_err(|source| InputError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_problem(path: &Path) -> Result<Problem, InputError> {
    ProblemFile::from_json(&read_text(path)?)?.parse()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrthogonalityEntry {
    pub component: String,
    pub index: usize,
    pub product: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InertiaReport {
    pub n_plus: usize,
    pub n_zero: usize,
    pub n_minus: usize,
    pub transcript_digest: String,
}

impl InertiaReport {
    pub fn from_certificate(cert: &InertiaCertificate) -> Self {
        InertiaReport {
            n_plus: cert.n_plus,
            n_zero: cert.n_zero,
            n_minus: cert.n_minus,
            transcript_digest: transcript_digest(cert),
        }
    }
}

/// SHA-256 over the transcript, one step per line.
pub fn transcript_digest(cert: &InertiaCertificate) -> String {
    let mut hasher = Sha256::new();
    for step in &cert.transcript {
        hasher.update(step.to_string().as_bytes());
        hasher.update(b"\n");
    }
    format!("{:x}", hasher.finalize())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub nef_products: Vec<String>,
    pub orthogonality_products: Vec<OrthogonalityEntry>,
    /// Inertia of the negative part's intersection matrix; `null` when N = 0.
    pub inertia: Option<InertiaReport>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverReport {
    pub pivot_count: usize,
    pub basis: Vec<usize>,
    /// `null` when the oracle was not run or was inapplicable.
    pub oracle_agreement: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportFile {
    pub input: ProblemFile,
    pub positive_part: Vec<String>,
    pub negative_part: Vec<String>,
    pub certificates: CertificateReport,
    pub solver: SolverReport,
}

impl ReportFile {
    pub fn build(config: &CurveConfiguration, d: &Divisor, result: &ZariskiResult) -> Self {
        let names = config.names();
        let solver = result.solver.clone().unwrap_or(engine::SolverInfo {
            pivots: 0,
            basis: vec![],
        });
        ReportFile {
            input: ProblemFile::from_problem(config, Some(d)),
            positive_part: format_vector(result.positive_part.coefficients()),
            negative_part: format_vector(result.negative_part.coefficients()),
            certificates: certificate_report(names, result),
            solver: SolverReport {
                pivot_count: solver.pivots,
                basis: solver.basis,
                oracle_agreement: None,
                oracle_note: None,
            },
        }
    }

    pub fn from_json(text: &str) -> Result<Self, InputError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

fn certificate_report(names: &[String], result: &ZariskiResult) -> CertificateReport {
    CertificateReport {
        nef_products: format_vector(&result.nef_certificate),
        orthogonality_products: result
            .orthogonality_certificate
            .iter()
            .map(|(j, v)| OrthogonalityEntry {
                component: names[*j].clone(),
                index: *j,
                product: format_rational(v),
            })
            .collect(),
        inertia: result
            .negativity_certificate
            .as_ref()
            .map(InertiaReport::from_certificate),
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct DecomposeOptions {
    pub json: bool,
    pub oracle: bool,
    pub quiet: bool,
}

fn labelled(names: &[String], values: &[Rational]) -> String {
    names
        .iter()
        .zip(values)
        .map(|(n, v)| format!("{n} = {v}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn text_report(
    config: &CurveConfiguration,
    d: &Divisor,
    report: &ReportFile,
    result: &ZariskiResult,
) -> String {
    let names = config.names();
    let mut out = String::new();
    out.push_str(&format!("components: {}\n", names.join(" ")));
    out.push_str(&format!("D = {}\n", d));
    out.push_str(&format!("P = {}\n", result.positive_part));
    out.push_str(&format!("N = {}\n", result.negative_part));
    out.push_str(&format!(
        "(i)   P.C: {}\n",
        labelled(names, &result.nef_certificate)
    ));
    if result.orthogonality_certificate.is_empty() {
        out.push_str("(ii)  N = 0\n(iii) N = 0\n");
    } else {
        let cert = result.negativity_certificate.as_ref().expect("N nonzero");
        out.push_str(&format!("(ii)  inertia on supp(N): {}\n", cert));
        let orth: Vec<String> = result
            .orthogonality_certificate
            .iter()
            .map(|(j, v)| format!("{} = {}", names[*j], v))
            .collect();
        out.push_str(&format!("(iii) P.C on supp(N): {}\n", orth.join(", ")));
    }
    out.push_str(&format!("pivots: {}\n", report.solver.pivot_count));
    if let Some(flag) = report.solver.oracle_agreement {
        out.push_str(&format!("oracle agreement: {flag}\n"));
    } else if let Some(note) = &report.solver.oracle_note {
        out.push_str(&format!("oracle: {note}\n"));
    }
    out
}

/// Decomposes the problem at `path` and writes a certified report.
pub fn cmd_decompose(
    path: &Path,
    opts: DecomposeOptions,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let problem =
        match load_problem(path).and_then(|p| p.require_divisor().cloned().map(|d| (p, d))) {
            Ok(v) => v,
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                return EXIT_INPUT;
            }
        };
    let (problem, d) = problem;
    let config = &problem.config;
    let result = match engine::zariski_decompose(config, &d) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "internal error: {e}");
            return EXIT_INTERNAL;
        }
    };
    let mut report = ReportFile::build(config, &d, &result);
    if opts.oracle {
        match engine::fujita_oracle(config, &d) {
            Ok(OracleOutcome::Decomposed(oracle)) => {
                let agree = oracle.positive_part == result.positive_part
                    && oracle.negative_part == result.negative_part;
                if !agree {
                    let _ = writeln!(
                        err,
                        "warning: oracle disagrees: P = {}",
                        oracle.positive_part
                    );
                }
                report.solver.oracle_agreement = Some(agree);
            }
            Ok(OracleOutcome::Inapplicable(why)) => {
                report.solver.oracle_note = Some(format!("inapplicable: {why}"));
            }
            Err(e) => {
                let _ = writeln!(err, "internal error: {e}");
                return EXIT_INTERNAL;
            }
        }
    }
    if !opts.quiet {
        let text = if opts.json {
            report.to_json()
        } else {
            text_report(config, &d, &report, &result)
        };
        let _ = out.write_all(text.as_bytes());
    }
    EXIT_OK
}

/// Why a report failed to verify.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerifyFailure {
    InputMismatch,
    Property(engine::Violation),
    Certificate(String),
}

impl fmt::Display for VerifyFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerifyFailure::InputMismatch => write!(f, "report input does not match the problem"),
            VerifyFailure::Property(v) => write!(f, "{v}"),
            VerifyFailure::Certificate(what) => write!(f, "certificate mismatch: {what}"),
        }
    }
}

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error("{0}")]
    Failed(VerifyFailure),
}

/// Checks a report against a problem: the echoed input, the decomposition
/// properties, then the stated certificates.
pub fn verify_report(problem: &Problem, report: &ReportFile) -> Result<(), VerifyError> {
    let d = problem.require_divisor()?;
    let echoed = report.input.parse()?;
    if echoed != *problem {
        return Err(VerifyError::Failed(VerifyFailure::InputMismatch));
    }
    let p = Divisor::new(parse_vector("positive_part", &report.positive_part)?);
    let n = Divisor::new(parse_vector("negative_part", &report.negative_part)?);
    let config = &problem.config;
    let result = engine::verify_decomposition(config, d, &p, &n)
        .map_err(|v| VerifyError::Failed(VerifyFailure::Property(v)))?;
    let expected = certificate_report(config.names(), &result);
    let claimed = &report.certificates;
    let mismatch = |what: &str| {
        Err(VerifyError::Failed(VerifyFailure::Certificate(
            what.to_string(),
        )))
    };
    let same_values = |a: &[String], b: &[String]| {
        a.len() == b.len()
            && a.iter()
                .zip(b)
                .all(|(x, y)| match (parse_rational(x), parse_rational(y)) {
                    (Ok(x), Ok(y)) => x == y,
                    _ => false,
                })
    };
    if !same_values(&claimed.nef_products, &expected.nef_products) {
        return mismatch("nef products");
    }
    let claimed_orth: Vec<String> = claimed
        .orthogonality_products
        .iter()
        .map(|e| e.product.clone())
        .collect();
    let expected_orth: Vec<String> = expected
        .orthogonality_products
        .iter()
        .map(|e| e.product.clone())
        .collect();
    if claimed
        .orthogonality_products
        .iter()
        .map(|e| e.index)
        .ne(expected.orthogonality_products.iter().map(|e| e.index))
        || !same_values(&claimed_orth, &expected_orth)
    {
        return mismatch("orthogonality products");
    }
    if claimed.inertia != expected.inertia {
        return mismatch("inertia");
    }
    Ok(())
}

pub fn cmd_verify(
    problem_path: &Path,
    report_path: &Path,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let loaded = load_problem(problem_path).and_then(|p| {
        read_text(report_path)
            .and_then(|t| ReportFile::from_json(&t))
            .map(|r| (p, r))
    });
    let (problem, report) = match loaded {
        Ok(v) => v,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INPUT;
        }
    };
    match verify_report(&problem, &report) {
        Ok(()) => {
            let _ = writeln!(out, "ok: sum, effectivity, (i), (ii), (iii) hold");
            EXIT_OK
        }
        Err(VerifyError::Failed(failure)) => {
            let _ = writeln!(out, "{failure}");
            EXIT_VERIFY
        }
        Err(VerifyError::Input(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct WitnessOptions {
    pub json: bool,
    pub quiet: bool,
    /// Indices to search on; all components when absent.
    pub support: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub support: Vec<String>,
    /// Witness coefficients on the full component list, or `null`.
    pub witness: Option<Vec<String>>,
    pub products: Option<Vec<String>>,
    pub inertia: InertiaReport,
}

fn compact_counts(cert: &InertiaCertificate) -> String {
    format!("({},{},{})", cert.n_plus, cert.n_zero, cert.n_minus)
}

/// Parses `"0,2,3"` into indices.
pub fn parse_support_list(text: &str) -> Result<Vec<usize>, InputError> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| InputError::Parameter(format!("invalid support index `{t}`")))
        })
        .collect()
}

pub fn cmd_witness(
    path: &Path,
    opts: &WitnessOptions,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let prepared = load_problem(path).and_then(|problem| {
        let r = problem.config.len();
        let support = match &opts.support {
            None => SupportSet::full(r),
            Some(list) => SupportSet::new(list.clone(), r)
                .map_err(|e| InputError::Parameter(e.to_string()))?,
        };
        let sub = divisor::restrict(&problem.config, &support)
            .map_err(|e| InputError::Parameter(e.to_string()))?;
        Ok((problem, support, sub))
    });
    let (problem, support, sub) = match prepared {
        Ok(v) => v,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INPUT;
        }
    };
    let r = problem.config.len();
    let witness = engine::find_nef_witness(&sub);
    let cert = inertia(sub.matrix());
    let (witness, cert) = match (witness, cert) {
        (Ok(w), Ok(c)) => (w, c),
        (Err(e), _) => {
            let _ = writeln!(err, "internal error: {e}");
            return EXIT_INTERNAL;
        }
        (_, Err(e)) => {
            let _ = writeln!(err, "internal error: {e}");
            return EXIT_INTERNAL;
        }
    };
    let full = witness
        .as_ref()
        .map(|w| Divisor::new(w.coefficients.clone()).expand(&support, r));
    if opts.quiet {
        return EXIT_OK;
    }
    if opts.json {
        let report = WitnessReport {
            support: sub.names().to_vec(),
            witness: full.as_ref().map(|d| format_vector(d.coefficients())),
            products: witness.as_ref().map(|w| format_vector(&w.products)),
            inertia: InertiaReport::from_certificate(&cert),
        };
        let _ = out.write_all(
            (serde_json::to_string_pretty(&report).expect("serializes") + "\n").as_bytes(),
        );
    } else {
        match (&witness, &full) {
            (Some(w), Some(full)) => {
                let _ = writeln!(out, "witness {}", full);
                let _ = writeln!(
                    out,
                    "coefficients: {}",
                    labelled(problem.config.names(), full.coefficients())
                );
                let _ = writeln!(out, "products: {}", labelled(sub.names(), &w.products));
                let _ = writeln!(out, "inertia {}", compact_counts(&cert));
            }
            _ => {
                let _ = writeln!(out, "negative definite {}", compact_counts(&cert));
            }
        }
    }
    EXIT_OK
}

/// One random problem of the given size: off-diagonals uniform in `0..=4`,
/// diagonals in `-6..=2`, coefficients `p/q` with `p` in `1..=8` and `q` in
/// `1..=4`.
pub fn random_problem<R: Rng>(rng: &mut R, size: usize) -> ProblemFile {
    let mut m = Matrix::zeros(size, size);
    for i in 0..size {
        m.set(i, i, crate::rat(rng.gen_range(-6..=2)));
        for j in (i + 1)..size {
            let v = crate::rat(rng.gen_range(0..=4));
            m.set(i, j, v.clone());
            m.set(j, i, v);
        }
    }
    let d: Vec<Rational> = (0..size)
        .map(|_| {
            Rational::new(
                rng.gen_range(1..=8i64).into(),
                rng.gen_range(1..=4i64).into(),
            )
        })
        .collect();
    let names: Vec<String> = (1..=size).map(|i| format!("C{i}")).collect();
    let config = validate_configuration(names, m).expect("generated configuration is valid");
    ProblemFile::from_problem(&config, Some(&Divisor::new(d)))
}

/// Deterministic corpus of `count` problems of one size.
pub fn generate_corpus(
    seed: u64,
    size: usize,
    count: usize,
) -> Result<Vec<ProblemFile>, InputError> {
    if size == 0 {
        return Err(InputError::Parameter("size must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count).map(|_| random_problem(&mut rng, size)).collect())
}

pub fn corpus_file_name(seed: u64, size: usize, index: usize) -> String {
    format!("gen-s{seed}-r{size}-{index:04}.json")
}

pub fn cmd_generate(
    seed: u64,
    size: usize,
    count: usize,
    out_dir: &Path,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let corpus = match generate_corpus(seed, size, count) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INPUT;
        }
    };
    if let Err(e) = fs::create_dir_all(out_dir) {
        let _ = writeln!(err, "error: {}: {e}", out_dir.display());
        return EXIT_INPUT;
    }
    for (i, problem) in corpus.iter().enumerate() {
        let path = out_dir.join(corpus_file_name(seed, size, i));
        if let Err(e) = fs::write(&path, problem.to_json()) {
            let _ = writeln!(err, "error: {}: {e}", path.display());
            return EXIT_INPUT;
        }
        let _ = writeln!(out, "{}", path.display());
    }
    EXIT_OK
}
