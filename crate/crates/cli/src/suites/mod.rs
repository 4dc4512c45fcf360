use koopman_core::combinatorics::Limits;
use koopman_core::{AdmissibleWord, Result, Scalar, TorusStep};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use serde_json::{json, Value};

use crate::report::SuiteReport;
use crate::{Command, RunConfig, HARD_DEGREE, HARD_LEVEL};

mod alpha;
mod beta;
mod coherence;
mod density;
mod fock;
mod simulate;
mod spectral;

/// Tolerance for the float backend; the exact backend compares exactly.
pub const TOL: f64 = 1e-9;

pub fn run_suite<S: Scalar>(c: Command, cfg: &RunConfig) -> Result<SuiteReport> {
    match c {
        Command::VerifyFock => fock::run::<S>(cfg),
        Command::VerifyAlpha => alpha::run::<S>(cfg),
        Command::VerifyBeta => beta::run::<S>(cfg),
        Command::VerifyCoherence => coherence::run::<S>(cfg),
        Command::VerifyDensity => density::run::<S>(cfg),
        Command::VerifySpectral => spectral::run::<S>(cfg),
        Command::Simulate => simulate::run::<S>(cfg),
        Command::All => unreachable!("expanded by the caller"),
    }
}

fn words(n: u32, l: u32) -> Result<Vec<AdmissibleWord>> {
    Limits { max_level: HARD_LEVEL, max_degree: HARD_DEGREE, max_words: 1 << 24 }.words_up_to(n, l)
}

fn close<S: Scalar>(a: &S, b: &S) -> bool {
    a.approx_eq(b, TOL)
}

/// Deterministic stream per suite and purpose.
fn rng(cfg: &RunConfig, salt: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(cfg.seed);
    r.set_stream(salt);
    r
}

fn random_step<S: Scalar>(level: u32, order: u32, rng: &mut ChaCha8Rng) -> Result<TorusStep<S>> {
    let exps: Vec<i64> = (0..1usize << level).map(|_| rng.gen_range(0..order as i64)).collect();
    TorusStep::from_roots(level, &exps, order)
}

fn step_json<S: Scalar>(g: &TorusStep<S>) -> Value {
    json!({ "level": g.level(), "values": g.values().iter().map(Scalar::to_json).collect::<Vec<_>>() })
}

fn word_json(w: &AdmissibleWord) -> Value {
    json!(w.to_string())
}
