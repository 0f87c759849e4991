//! Job documents: a TOML description of a prime, a precision, a list of
//! modules and the commands to run on each.
//!
//! ```toml
//! p = 3
//! commands = ["wach", "tam", "cep"]
//!
//! [precision]
//! n = 20
//!
//! [[modules]]
//! jumps = [0, 1]
//! matrix = [[0, 1], [1, 0]]
//! ```
//!
//! Matrix entries are integers or base-`p` digit strings (most significant
//! digit first, optional leading `-`), so that residues close to `p^N` can be
//! written without overflowing 64-bit literals.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use wachlab_core::filmod::FilPhiModule;
use wachlab_core::padic::{OFElement, OFMatrix, PrecisionContext};

pub const DEFAULT_PRECISION: u32 = 20;
pub const DEFAULT_IWASAWA_ORDER: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Check,
    Wach,
    Tam,
    Cep,
    Slopes,
    IwasawaCheck,
}

impl Command {
    pub const ALL: [Command; 6] =
        [Command::Check, Command::Slopes, Command::Wach, Command::Tam, Command::Cep, Command::IwasawaCheck];

    pub fn name(self) -> &'static str {
        match self {
            Command::Check => "check",
            Command::Wach => "wach",
            Command::Tam => "tam",
            Command::Cep => "cep",
            Command::Slopes => "slopes",
            Command::IwasawaCheck => "iwasawa-check",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Int(i64),
    Digits(String),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Precision {
    /// Absolute p-adic precision `N`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    /// Truncation order `M` in `π`; defaults to `40 (p - 1)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    /// Truncation order in `T` for the Iwasawa layer.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_t: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleSpec {
    pub jumps: Vec<u32>,
    pub matrix: Vec<Vec<Entry>>,
    #[serde(default)]
    pub shift: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobDocument {
    pub p: u64,
    #[serde(default = "default_degree")]
    pub f: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Integer `c` of the element `γ` with `χ(γ) = c`; defaults to `1 + p`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<i64>,
    #[serde(default)]
    pub commands: Vec<Command>,
    #[serde(default)]
    pub precision: Precision,
    #[serde(default)]
    pub modules: Vec<ModuleSpec>,
}

fn default_degree() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JobError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid field {field}: {message}")]
    Validation { field: String, message: String },
}

impl JobError {
    fn validation(field: impl Into<String>, message: impl ToString) -> Self {
        Self::Validation { field: field.into(), message: message.to_string() }
    }
}

/// A parsed document together with its precision context and modules.
#[derive(Debug, Clone)]
pub struct ValidatedJob {
    pub doc: JobDocument,
    pub ctx: PrecisionContext,
    pub n: u32,
    pub m: usize,
    pub m_t: usize,
    pub gamma: BigInt,
    pub modules: Vec<FilPhiModule>,
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

pub fn parse_document(text: &str) -> Result<JobDocument, JobError> {
    toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((0, 0), |s| line_column(text, s.start));
        JobError::Parse { line, column, message: e.message().to_string() }
    })
}

fn parse_entry(ctx: &PrecisionContext, entry: &Entry, field: &str) -> Result<OFElement, JobError> {
    match entry {
        Entry::Int(x) => Ok(OFElement::from_i64(ctx, *x)),
        Entry::Digits(s) => {
            let (negative, digits) = match s.strip_prefix('-') {
                Some(rest) => (true, rest),
                None => (false, s.as_str()),
            };
            let value = (!digits.is_empty())
                .then(|| BigInt::parse_bytes(digits.as_bytes(), ctx.p() as u32))
                .flatten()
                .ok_or_else(|| JobError::validation(field, format!("{s:?} is not a base-{} digit string", ctx.p())))?;
            Ok(OFElement::from_bigint(ctx, &if negative { -value } else { value }))
        }
    }
}

fn build_module(ctx: &PrecisionContext, spec: &ModuleSpec, index: usize) -> Result<FilPhiModule, JobError> {
    let field = |name: &str| format!("modules[{index}].{name}");
    let d = spec.jumps.len();
    if d == 0 {
        return Err(JobError::validation(field("jumps"), "a module needs at least one jump"));
    }
    if spec.matrix.len() != d || spec.matrix.iter().any(|row| row.len() != d) {
        return Err(JobError::validation(field("matrix"), format!("expected a {d}x{d} matrix")));
    }
    if let Some(&j) = spec.jumps.iter().find(|&&j| j as u64 > ctx.p() - 1) {
        return Err(JobError::validation(field("jumps"), format!("jump {j} outside [0, p-1]")));
    }
    let mut a = OFMatrix::zeros(ctx, d, d);
    for (i, row) in spec.matrix.iter().enumerate() {
        for (j, entry) in row.iter().enumerate() {
            a.set(i, j, parse_entry(ctx, entry, &field(&format!("matrix[{i}][{j}]")))?);
        }
    }
    FilPhiModule::new(ctx, spec.jumps.clone(), a, spec.shift).map_err(|e| {
        let name = if matches!(e, wachlab_core::Error::InvalidModule(ref m) if m.contains("invertible")) {
            "matrix"
        } else {
            "jumps"
        };
        JobError::validation(field(name), e)
    })
}

/// Check a document and build its modules. Precision overrides from the
/// command line are applied before validation.
pub fn validate(doc: JobDocument) -> Result<ValidatedJob, JobError> {
    let n = doc.precision.n.unwrap_or(DEFAULT_PRECISION);
    let ctx = PrecisionContext::new(doc.p, doc.f, n).map_err(|e| JobError::validation("p/f/precision.n", e))?;
    let m = doc.precision.m.unwrap_or(40 * (doc.p as usize - 1));
    if m < doc.p as usize {
        return Err(JobError::validation("precision.m", format!("truncation order {m} is below p")));
    }
    let m_t = doc.precision.m_t.unwrap_or(DEFAULT_IWASAWA_ORDER);
    if m_t == 0 {
        return Err(JobError::validation("precision.m_t", "T-truncation order must be positive"));
    }
    let gamma = BigInt::from(doc.gamma.unwrap_or(1 + doc.p as i64));
    if &gamma % doc.p == BigInt::from(0) {
        return Err(JobError::validation("gamma", "χ(γ) must be a p-adic unit"));
    }
    let modules = doc
        .modules
        .iter()
        .enumerate()
        .map(|(i, spec)| build_module(&ctx, spec, i))
        .collect::<Result<_, _>>()?;
    Ok(ValidatedJob { doc, ctx, n, m, m_t, gamma, modules })
}

pub fn parse_job(text: &str) -> Result<ValidatedJob, JobError> {
    validate(parse_document(text)?)
}

/// Render a document back to TOML.
pub fn to_toml(doc: &JobDocument) -> String {
    toml::to_string(doc).expect("job documents always serialise")
}
