//! Seeded generation of eligible modules for property campaigns.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wachlab_core::cep::det_one_minus_phi;
use wachlab_core::filmod::FilPhiModule;
use wachlab_core::padic::{OFElement, OFMatrix, PrecisionContext};

use crate::job::{Command, Entry, JobDocument, ModuleSpec, Precision, DEFAULT_PRECISION};

/// Which convergence hypothesis the generated modules satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Eligibility {
    /// No slope-0 part (`unit_root_rank = 0`).
    UnitRootFree,
    /// No part of slope equal to the top jump.
    TopSlopeAbsent,
    Both,
}

impl Eligibility {
    fn accepts(self, module: &FilPhiModule) -> bool {
        match self {
            Eligibility::UnitRootFree => module.unit_root_rank() == 0,
            Eligibility::TopSlopeAbsent => module.top_slope_absent(),
            Eligibility::Both => module.unit_root_rank() == 0 && module.top_slope_absent(),
        }
    }
}

/// Largest precision up to the default that the residue representation allows.
pub fn corpus_precision(p: u64) -> u32 {
    (1..=DEFAULT_PRECISION).rev().find(|&n| PrecisionContext::unramified_base(p, n).is_ok()).unwrap_or(1)
}

/// Shifts for which the weights stay in `[-(p-2), p-1]` and the window
/// spanned by `{0, 1}` and the weights has length at most `p - 1`.
fn admissible_shifts(p: i64, jumps: &[u32]) -> Vec<i64> {
    let lo = jumps[0] as i64;
    let hi = *jumps.last().expect("nonempty") as i64;
    (-(p - 1)..=1)
        .filter(|s| {
            let (a, b) = (lo + s, hi + s);
            a >= -(p - 2) && b <= p - 1 && b.max(1) - a.min(0) <= p - 1
        })
        .collect()
}

fn generic(module: &FilPhiModule) -> bool {
    let nonzero = |m: &FilPhiModule| det_one_minus_phi(m).map_or(false, |(_, v)| v.is_some());
    nonzero(module) && module.dual_twist(1).map_or(false, |dual| nonzero(&dual))
}

fn candidate(rng: &mut ChaCha8Rng, ctx: &PrecisionContext, d_max: usize) -> Option<(ModuleSpec, FilPhiModule)> {
    let p = ctx.p();
    let d = rng.gen_range(1..=d_max);
    let mut jumps: Vec<u32> = (0..d).map(|_| rng.gen_range(0..p as u32)).collect();
    jumps.sort_unstable();
    let modulus = ctx.modulus_pn() as i64;
    let values: Vec<Vec<i64>> = (0..d).map(|_| (0..d).map(|_| rng.gen_range(0..modulus)).collect()).collect();
    let shifts = admissible_shifts(p as i64, &jumps);
    let shift = shifts[rng.gen_range(0..shifts.len())];
    let a = OFMatrix::from_fn(ctx, d, d, |i, j| OFElement::from_i64(ctx, values[i][j]));
    let module = FilPhiModule::new(ctx, jumps.clone(), a, shift).ok()?;
    let matrix = values.into_iter().map(|row| row.into_iter().map(Entry::Int).collect()).collect();
    Some((ModuleSpec { jumps, matrix, shift }, module))
}

/// `count` single-module jobs with the given eligibility that are generic
/// (`D^{φ=1} = 0` for the module and its twisted dual), deterministic in `seed`.
pub fn generate_corpus_with(
    p: u64,
    d_max: usize,
    count: usize,
    seed: u64,
    eligibility: Eligibility,
    commands: &[Command],
) -> Vec<JobDocument> {
    let n = corpus_precision(p);
    let ctx = PrecisionContext::unramified_base(p, n).expect("precision chosen to fit");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut jobs = Vec::with_capacity(count);
    while jobs.len() < count {
        let Some((spec, module)) = candidate(&mut rng, &ctx, d_max.max(1)) else { continue };
        if !eligibility.accepts(&module) || !generic(&module) {
            continue;
        }
        jobs.push(JobDocument {
            p,
            f: 1,
            seed: Some(u64::from(rng.gen::<u32>())),
            gamma: None,
            commands: commands.to_vec(),
            precision: Precision { n: Some(n), m: None, m_t: None },
            modules: vec![spec],
        });
    }
    jobs
}

/// Unit-root-free generic modules with every command enabled.
pub fn generate_corpus(p: u64, d_max: usize, count: usize, seed: u64) -> Vec<JobDocument> {
    generate_corpus_with(p, d_max, count, seed, Eligibility::UnitRootFree, &Command::ALL)
}
