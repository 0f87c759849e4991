//! Batch front-end for `wachlab-core`: TOML job documents, deterministic
//! JSON reports and a seeded corpus generator.

pub mod corpus;
pub mod job;
pub mod report;

pub use corpus::{generate_corpus, generate_corpus_with, Eligibility};
pub use job::{parse_job, Command, JobDocument, JobError, ValidatedJob};
pub use report::{run_corpus, run_job, run_text, CorpusReport, Report, SCHEMA};
