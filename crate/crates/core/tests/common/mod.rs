#![allow(dead_code)]

use lexvit::workbench::random_lexicon;
use lexvit::{Alphabet, HmmConfig, Lexicon, ObservationSequence, Routing};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const LETTERS: &str = "abcdefghijklmnopqrstuvwxyz";

pub fn toy() -> Lexicon {
    Lexicon::new(["ab", "ba", "bb", "bc", "bcd", "c"]).unwrap()
}

pub fn alphabet(k: usize) -> Alphabet {
    Alphabet::new(LETTERS.chars().take(k)).unwrap()
}

#[derive(Debug)]
pub struct Case {
    pub lexicon: Lexicon,
    pub config: HmmConfig,
    pub obs: ObservationSequence,
}

pub fn random_config<R: Rng>(rng: &mut R, alphabet: Alphabet) -> HmmConfig {
    let mut c = HmmConfig::new(alphabet);
    c.states_per_letter = rng.gen_range(1..=3);
    c.self_loop_prob = [0.0, 0.3, 0.5, 0.7][rng.gen_range(0..4)];
    c.emission_peak = [0.5, 0.8, 0.95, 1.0][rng.gen_range(0..4)];
    c.routing = if rng.gen_bool(0.5) {
        Routing::Zero
    } else {
        Routing::Uniform
    };
    c
}

/// A small random lexicon, letter-HMM configuration and observation
/// sequence. Most sequences are sampled from a word, some with noise; the
/// rest are uniform noise.
pub fn random_case(seed: u64) -> Case {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = rng.gen_range(2..=6);
    let a = alphabet(k);
    let words = rng.gen_range(1..=40);
    let max_len = rng.gen_range(1..=5);
    let lexicon = random_lexicon(&mut rng, words, a.symbols(), max_len).unwrap();
    let config = random_config(&mut rng, a);
    let symbols: Vec<usize> = if rng.gen_bool(0.7) {
        let all: Vec<&str> = lexicon.iter().collect();
        let w = all[rng.gen_range(0..all.len())];
        let mut s = lexvit::letter_hmm::sample_observations_with(w, &config, &mut rng)
            .unwrap()
            .symbols()
            .to_vec();
        if rng.gen_bool(0.3) {
            let at = rng.gen_range(0..s.len());
            s[at] = rng.gen_range(0..k);
        }
        s
    } else {
        let t = rng.gen_range(1..=12);
        (0..t).map(|_| rng.gen_range(0..k)).collect()
    };
    let obs = ObservationSequence::from_indices(symbols, &config.alphabet).unwrap();
    Case {
        lexicon,
        config,
        obs,
    }
}
