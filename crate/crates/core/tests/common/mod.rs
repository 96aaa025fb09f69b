#![allow(dead_code)]

use maxshare_core::gen::random_term;
use maxshare_core::{parse, Term};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn t(src: &str) -> Term {
    parse(src).unwrap_or_else(|e| panic!("{src}: {e}"))
}

/// A random closed term of size at most 60 determined by `seed`.
pub fn random(seed: u64) -> Term {
    random_term(&mut ChaCha8Rng::seed_from_u64(seed), 60)
}
