use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use wachlab_cli::job::{parse_document, to_toml, validate};
use wachlab_cli::{generate_corpus_with, run_corpus, run_job, Command, Eligibility, Report};

#[derive(Parser)]
#[command(name = "wachlab", version, about = "Wach modules, Tamagawa exponents and C_EP checks for Fontaine-Laffaille modules")]
struct Cli {
    /// Worker threads (defaults to the number of CPUs). Output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Action,
}

#[derive(Subcommand)]
enum Action {
    /// Run a TOML job document and emit a JSON report.
    Run {
        input: PathBuf,
        /// Replace the document's command list (comma separated).
        #[arg(long, value_delimiter = ',')]
        commands: Option<Vec<String>>,
        /// Absolute p-adic precision N.
        #[arg(long)]
        n: Option<u32>,
        /// Truncation order M in π.
        #[arg(long)]
        m: Option<usize>,
        /// Truncation order in T for the Iwasawa layer.
        #[arg(long)]
        m_t: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Write seeded random job documents.
    Generate {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Directory receiving job-NNNN.toml; stdout when absent.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Generate a corpus and run it, emitting one combined report.
    Corpus {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

#[derive(clap::Args)]
struct CorpusArgs {
    #[arg(long)]
    p: u64,
    #[arg(long, default_value_t = 3)]
    d_max: usize,
    #[arg(long, default_value_t = 10)]
    count: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = EligibilityArg::UnitRootFree)]
    eligibility: EligibilityArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum EligibilityArg {
    UnitRootFree,
    TopSlopeAbsent,
    Both,
}

impl From<EligibilityArg> for Eligibility {
    fn from(e: EligibilityArg) -> Self {
        match e {
            EligibilityArg::UnitRootFree => Eligibility::UnitRootFree,
            EligibilityArg::TopSlopeAbsent => Eligibility::TopSlopeAbsent,
            EligibilityArg::Both => Eligibility::Both,
        }
    }
}

fn emit(text: &str, output: Option<&PathBuf>) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn generate(args: &CorpusArgs) -> Result<Vec<wachlab_cli::JobDocument>> {
    if ![3, 5, 7].contains(&args.p) {
        bail!("corpus generation supports p in {{3, 5, 7}}");
    }
    if args.d_max == 0 || args.d_max > 3 {
        bail!("corpus generation supports 1 <= d_max <= 3");
    }
    Ok(generate_corpus_with(args.p, args.d_max, args.count, args.seed, args.eligibility.into(), &Command::ALL))
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Action::Run { input, commands, n, m, m_t, seed, output } => {
            let text = fs::read_to_string(&input).with_context(|| format!("reading {}", input.display()))?;
            let report = match parse_document(&text) {
                Err(e) => Report::from_job_error(&e),
                Ok(mut doc) => {
                    if let Some(names) = commands {
                        doc.commands = names
                            .iter()
                            .map(|s| Command::parse(s.trim()).with_context(|| format!("unknown command {s:?}")))
                            .collect::<Result<_>>()?;
                    }
                    doc.precision.n = n.or(doc.precision.n);
                    doc.precision.m = m.or(doc.precision.m);
                    doc.precision.m_t = m_t.or(doc.precision.m_t);
                    doc.seed = seed.or(doc.seed);
                    match validate(doc) {
                        Ok(job) => run_job(&job),
                        Err(e) => Report::from_job_error(&e),
                    }
                }
            };
            emit(&report.to_json(), output.as_ref())?;
            Ok(report.all_passed())
        }
        Action::Generate { corpus, out_dir } => {
            let docs = generate(&corpus)?;
            match out_dir {
                Some(dir) => {
                    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
                    for (i, doc) in docs.iter().enumerate() {
                        let path = dir.join(format!("job-{i:04}.toml"));
                        fs::write(&path, to_toml(doc)).with_context(|| format!("writing {}", path.display()))?;
                    }
                }
                None => {
                    for (i, doc) in docs.iter().enumerate() {
                        println!("# job {i}\n{}", to_toml(doc));
                    }
                }
            }
            Ok(true)
        }
        Action::Corpus { corpus, output } => {
            let report = run_corpus(&generate(&corpus)?);
            emit(&report.to_json(), output.as_ref())?;
            Ok(report.all_passed())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        pool = pool.num_threads(t);
    }
    let outcome = match pool.build() {
        Ok(pool) => pool.install(|| run(cli)),
        Err(e) => Err(e.into()),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("wachlab: {e:#}");
            ExitCode::from(2)
        }
    }
}
