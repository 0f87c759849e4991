//! Running jobs and rendering the versioned JSON report.
//!
//! Reports are built from plain structs whose field order fixes the key
//! order, and every map is a `BTreeMap`, so identical inputs give
//! byte-identical output regardless of thread count.

use std::collections::BTreeMap;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use wachlab_core::cep::{cep_check, tam_exponent};
use wachlab_core::filmod::FilPhiModule;
use wachlab_core::iwasawa::{delta_twist_consistency, IwasawaElement};
use wachlab_core::padic::{newton_slopes, OFMatrix};
use wachlab_core::wach::{check_q_cokernel, WachBuilder};
use wachlab_core::aplus::SeriesMatrix;
use wachlab_core::Error;

use crate::job::{parse_job, Command, JobError, ValidatedJob};

pub const SCHEMA: &str = "wachlab-report/1";

/// Normalisations the report depends on but the inputs do not fix.
const ASSUMPTIONS: [&str; 3] = [
    "gamma_1 is normalised by chi(gamma_1) = 1 + p",
    "ell_j = log(1+T)/log_p(1+p) - j",
    "H^1_f(T) is the lattice M/(1-phi)Fil^0 M",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ErrorReport {
    pub kind: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<Value>,
}

impl From<&Error> for ErrorReport {
    fn from(e: &Error) -> Self {
        let (kind, detail) = match e {
            Error::InvalidContext(_) => ("InvalidContext", None),
            Error::ContextMismatch => ("ContextMismatch", None),
            Error::DimensionMismatch(_) => ("DimensionMismatch", None),
            Error::NotAUnit(_) => ("NotAUnit", None),
            Error::PrecisionLoss(_) => ("PrecisionLoss", None),
            Error::ExactDivisionFailure { k, index } => {
                ("ExactDivisionFailure", Some(json!({ "k": k, "index": index })))
            }
            Error::CongruenceFailure(_) => ("CongruenceFailure", None),
            Error::NonConvergence { iterations, valuation } => {
                ("NonConvergence", Some(json!({ "iterations": iterations, "valuation": valuation })))
            }
            Error::WindowOverflow { length, limit } => {
                ("WindowOverflow", Some(json!({ "length": length, "limit": limit })))
            }
            Error::Degenerate(_) => ("Degenerate", None),
            Error::NotExact(_) => ("NotExact", None),
            Error::NotIntegral(_) => ("NotIntegral", None),
            Error::InvalidModule(_) => ("InvalidModule", None),
        };
        Self { kind: kind.into(), message: e.to_string(), detail }
    }
}

impl From<&JobError> for ErrorReport {
    fn from(e: &JobError) -> Self {
        match e {
            JobError::Parse { line, column, .. } => Self {
                kind: "ParseError".into(),
                message: e.to_string(),
                detail: Some(json!({ "line": line, "column": column })),
            },
            JobError::Validation { field, .. } => Self {
                kind: "ValidationError".into(),
                message: e.to_string(),
                detail: Some(json!({ "field": field })),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CommandResult {
    pub command: &'static str,
    pub status: &'static str,
    /// `None` for commands that only report data.
    pub verdict: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorReport>,
}

impl CommandResult {
    fn ok(command: Command, verdict: Option<bool>, output: Value) -> Self {
        Self { command: command.name(), status: "ok", verdict, output: Some(output), error: None }
    }

    fn failed(command: Command, error: &Error) -> Self {
        Self { command: command.name(), status: "error", verdict: None, output: None, error: Some(error.into()) }
    }

    pub fn passed(&self) -> bool {
        self.error.is_none() && self.verdict != Some(false)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Flags {
    pub ab_star: bool,
    pub a_star_b: bool,
    pub both: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModuleReport {
    pub index: usize,
    pub rank: usize,
    pub jumps: Vec<u32>,
    pub shift: i64,
    pub actual_jumps: Vec<i64>,
    pub hodge_numbers: BTreeMap<String, usize>,
    pub t_h: i64,
    pub unit_root_rank: usize,
    pub flags: Flags,
    pub results: Vec<CommandResult>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrecisionReport {
    pub n: u32,
    pub m: usize,
    pub m_t: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub modules: usize,
    pub commands_run: usize,
    pub errors: usize,
    pub failed_verdicts: usize,
    pub all_passed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub schema: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precision: Option<PrecisionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub assumptions: Vec<&'static str>,
    /// Problems with the document itself; modules are not run when present.
    pub document_errors: Vec<ErrorReport>,
    pub modules: Vec<ModuleReport>,
    pub summary: Summary,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialise");
        s.push('\n');
        s
    }

    pub fn all_passed(&self) -> bool {
        self.summary.all_passed
    }

    /// Report for a document that failed to parse or validate.
    pub fn from_job_error(error: &JobError) -> Self {
        Self {
            schema: SCHEMA,
            p: None,
            f: None,
            precision: None,
            seed: None,
            assumptions: ASSUMPTIONS.to_vec(),
            document_errors: vec![error.into()],
            modules: Vec::new(),
            summary: Summary { modules: 0, commands_run: 0, errors: 1, failed_verdicts: 0, all_passed: false },
        }
    }
}

fn slopes_output(module: &FilPhiModule) -> Result<Value, Error> {
    let shift = module.shift();
    let slopes: Vec<String> = newton_slopes(&module.phi_matrix())?
        .into_iter()
        .map(|s| (s + shift).to_string())
        .collect();
    Ok(json!({ "slopes": slopes }))
}

fn check_output(module: &FilPhiModule) -> Result<(bool, Value), Error> {
    let d = module.rank();
    let raw = module.to_raw(&OFMatrix::identity(module.ctx(), d))?;
    let divisible = raw.strong_divisibility_check()?.divisible;
    Ok((divisible, json!({ "strongly_divisible": divisible, "top_slope_absent": module.top_slope_absent() })))
}

fn wach_output(job: &ValidatedJob, module: &FilPhiModule) -> Result<(bool, Value), Error> {
    let builder = WachBuilder::new(module, job.m)?;
    let w = builder.gamma_matrix(&job.gamma)?;
    let k = job.ctx.p() as usize - 1;
    let relation = w.relation_holds();
    let reduction = w.p.constant_terms() == module.phi_matrix();
    let congruence = w.g.truncate(k) == SeriesMatrix::identity(module.ctx(), module.rank(), k);
    let cokernel = check_q_cokernel(&w)?;
    let verdict = relation && reduction && congruence && cokernel;
    Ok((
        verdict,
        json!({
            "gamma": job.gamma.to_string(),
            "iterations": w.iterations,
            "residual_weight": w.residual_weight,
            "relation_holds": relation,
            "p_mod_pi_is_phi": reduction,
            "g_is_identity_mod_pi_p_minus_1": congruence,
            "q_cokernel": cokernel,
        }),
    ))
}

fn tam_output(module: &FilPhiModule) -> Result<(bool, Value), Error> {
    let e = tam_exponent(module)?;
    Ok((e == 0, json!({ "tam_exponent": e })))
}

fn cep_output(module: &FilPhiModule) -> Result<(bool, Value), Error> {
    let r = cep_check(module)?;
    Ok((
        r.verdict,
        json!({
            "tam_exponent_v": r.tam_exponent_v,
            "tam_exponent_dual": r.tam_exponent_dual,
            "det_minus_phi_dual_vp": r.det_minus_phi_dual_vp,
            "gamma_star_total_vp": r.gamma_star_total_vp,
            "eta_exponent": r.eta_exponent,
            "cep_lattice_exponent": r.cep_lattice_exponent,
            "tam_ratio_exponent": r.tam_ratio_exponent,
            "verdict": r.verdict,
        }),
    ))
}

fn random_element(rng: &mut ChaCha8Rng, p: u64, order: usize) -> IwasawaElement {
    let bound = (p * p * p) as i64;
    let comps = (0..p - 1)
        .map(|_| (0..order).map(|_| BigRational::from_integer(rng.gen_range(-bound..=bound).into())).collect())
        .collect();
    IwasawaElement::from_components(p, comps).expect("component count matches p")
}

/// Formal identities of the Iwasawa layer on seeded random elements.
fn iwasawa_output(job: &ValidatedJob, index: usize) -> Result<(bool, Value), Error> {
    let p = job.ctx.p();
    let order = job.m_t;
    let seed = job.doc.seed.unwrap_or(0) ^ (index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = random_element(&mut rng, p, order);
    let y = random_element(&mut rng, p, order);

    let one = IwasawaElement::one(p, order);
    let idempotents = (0..p as usize - 1).all(|i| {
        let e = IwasawaElement::idempotent(p, i, order);
        e.mul(&e) == e && e.mul(&IwasawaElement::idempotent(p, i + 1, order)) == IwasawaElement::zero(p, order)
    }) && (0..p as usize - 1).fold(IwasawaElement::zero(p, order), |acc, i| acc.add(&IwasawaElement::idempotent(p, i, order))) == one;
    let round_trip = x.twist1().twist_inverse() == x;
    let automorphism = x.mul_exact(&y).twist1() == x.twist1().mul_exact(&y.twist1());
    let evaluation = x.mul(&y).eval_at_zero() == x.eval_at_zero() * y.eval_at_zero();
    let units = x.mul(&y).is_lambda_unit()? == (x.is_lambda_unit()? && y.is_lambda_unit()?);
    let twist_lemma = delta_twist_consistency(&x, &x.twist1());
    let verdict = idempotents && round_trip && automorphism && evaluation && units && twist_lemma;
    Ok((
        verdict,
        json!({
            "m_t": order,
            "idempotents": idempotents,
            "twist_round_trip": round_trip,
            "twist_automorphism": automorphism,
            "eval_at_zero_multiplicative": evaluation,
            "unit_multiplicative": units,
            "twist_lemma": twist_lemma,
        }),
    ))
}

fn run_command(job: &ValidatedJob, index: usize, command: Command) -> CommandResult {
    let module = &job.modules[index];
    let outcome = match command {
        Command::Slopes => slopes_output(module).map(|v| (None, v)),
        Command::Check => check_output(module).map(|(b, v)| (Some(b), v)),
        Command::Wach => wach_output(job, module).map(|(b, v)| (Some(b), v)),
        Command::Tam => tam_output(module).map(|(b, v)| (Some(b), v)),
        Command::Cep => cep_output(module).map(|(b, v)| (Some(b), v)),
        Command::IwasawaCheck => iwasawa_output(job, index).map(|(b, v)| (Some(b), v)),
    };
    match outcome {
        Ok((verdict, output)) => CommandResult::ok(command, verdict, output),
        Err(e) => CommandResult::failed(command, &e),
    }
}

fn module_report(job: &ValidatedJob, index: usize, commands: &[Command]) -> ModuleReport {
    let module = &job.modules[index];
    let hodge = module.hodge_invariants();
    let flags = module.category_membership();
    ModuleReport {
        index,
        rank: module.rank(),
        jumps: module.jumps().to_vec(),
        shift: module.shift(),
        actual_jumps: module.actual_jumps(),
        hodge_numbers: hodge.h.iter().map(|(j, n)| (j.to_string(), *n)).collect(),
        t_h: hodge.t_h,
        unit_root_rank: module.unit_root_rank(),
        flags: Flags { ab_star: flags.ab_star, a_star_b: flags.a_star_b, both: flags.both },
        results: commands.iter().map(|&c| run_command(job, index, c)).collect(),
    }
}

/// Run every command of `job` on every module. Modules are processed in
/// parallel on the current rayon pool; results keep document order.
pub fn run_job(job: &ValidatedJob) -> Report {
    let commands = job.doc.commands.clone();
    let modules: Vec<ModuleReport> =
        (0..job.modules.len()).into_par_iter().map(|i| module_report(job, i, &commands)).collect();
    let results = modules.iter().flat_map(|m| &m.results);
    let commands_run = results.clone().count();
    let errors = results.clone().filter(|r| r.error.is_some()).count();
    let failed_verdicts = results.filter(|r| r.verdict == Some(false)).count();
    Report {
        schema: SCHEMA,
        p: Some(job.ctx.p()),
        f: Some(job.ctx.degree()),
        precision: Some(PrecisionReport { n: job.n, m: job.m, m_t: job.m_t }),
        seed: job.doc.seed,
        assumptions: ASSUMPTIONS.to_vec(),
        document_errors: Vec::new(),
        summary: Summary {
            modules: modules.len(),
            commands_run,
            errors,
            failed_verdicts,
            all_passed: errors == 0 && failed_verdicts == 0,
        },
        modules,
    }
}

/// Parse and run a document; a malformed document yields a report whose
/// `document_errors` explain why, never a panic.
pub fn run_text(text: &str) -> Report {
    match parse_job(text) {
        Ok(job) => run_job(&job),
        Err(e) => Report::from_job_error(&e),
    }
}

/// Reports for a list of jobs, in input order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorpusReport {
    pub schema: &'static str,
    pub jobs: Vec<Report>,
    pub summary: Summary,
}

impl CorpusReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialise");
        s.push('\n');
        s
    }

    pub fn all_passed(&self) -> bool {
        self.summary.all_passed
    }
}

/// Validate and run every document in parallel; ordering follows the input.
pub fn run_corpus(docs: &[crate::job::JobDocument]) -> CorpusReport {
    let jobs: Vec<Report> = docs
        .par_iter()
        .map(|doc| match crate::job::validate(doc.clone()) {
            Ok(job) => run_job(&job),
            Err(e) => Report::from_job_error(&e),
        })
        .collect();
    let sum = |f: fn(&Summary) -> usize| jobs.iter().map(|r| f(&r.summary)).sum::<usize>();
    let summary = Summary {
        modules: sum(|s| s.modules),
        commands_run: sum(|s| s.commands_run),
        errors: sum(|s| s.errors),
        failed_verdicts: sum(|s| s.failed_verdicts),
        all_passed: jobs.iter().all(Report::all_passed),
    };
    CorpusReport { schema: SCHEMA, jobs, summary }
}
