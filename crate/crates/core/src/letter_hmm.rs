//! Per-letter left-to-right HMM templates with discrete emissions, and a
//! seeded generator of synthetic observation sequences.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::score::LogScore;

/// Ordered observation symbols. Letter `c` is expected to emit symbol `c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<char>,
    index: HashMap<char, usize>,
}

impl Alphabet {
    pub fn new(symbols: impl IntoIterator<Item = char>) -> Result<Self> {
        let symbols: Vec<char> = symbols.into_iter().collect();
        let mut index = HashMap::with_capacity(symbols.len());
        for (i, &c) in symbols.iter().enumerate() {
            if c.is_whitespace() {
                return Err(Error::Config(
                    "alphabet symbols cannot be whitespace".into(),
                ));
            }
            if index.insert(c, i).is_some() {
                return Err(Error::Config(format!("duplicate alphabet symbol {c:?}")));
            }
        }
        if symbols.is_empty() {
            return Err(Error::Config("alphabet is empty".into()));
        }
        Ok(Alphabet { symbols, index })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[char] {
        &self.symbols
    }

    pub fn index_of(&self, c: char) -> Option<usize> {
        self.index.get(&c).copied()
    }

    pub fn symbol(&self, i: usize) -> char {
        self.symbols[i]
    }
}

/// Log-weight added on every arc leaving an automaton node.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Routing {
    /// Pure lexical constraint: every arc weighs log 1.
    #[default]
    Zero,
    /// `-ln(out-degree)`, so the routing choices at a node sum to one.
    Uniform,
}

impl FromStr for Routing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" => Ok(Routing::Zero),
            "uniform" => Ok(Routing::Uniform),
            _ => Err(Error::Config(format!(
                "unknown routing {s:?} (zero|uniform)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HmmConfig {
    pub states_per_letter: usize,
    /// In `[0, 1)`; 0 gives a strict one-frame-per-state walk.
    pub self_loop_prob: f64,
    /// Mass on the letter's own symbol, in `(0, 1]`.
    pub emission_peak: f64,
    pub alphabet: Alphabet,
    pub routing: Routing,
}

impl HmmConfig {
    pub const DEFAULT_STATES: usize = 3;
    pub const DEFAULT_SELF_LOOP: f64 = 0.5;
    pub const DEFAULT_PEAK: f64 = 0.9;

    pub fn new(alphabet: Alphabet) -> Self {
        HmmConfig {
            states_per_letter: Self::DEFAULT_STATES,
            self_loop_prob: Self::DEFAULT_SELF_LOOP,
            emission_peak: Self::DEFAULT_PEAK,
            alphabet,
            routing: Routing::Zero,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.states_per_letter == 0 {
            return Err(Error::Config("states_per_letter must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.self_loop_prob) {
            return Err(Error::Config("self_loop_prob must be in [0, 1)".into()));
        }
        if !(self.emission_peak > 0.0 && self.emission_peak <= 1.0) {
            return Err(Error::Config("emission_peak must be in (0, 1]".into()));
        }
        Ok(())
    }

    /// Parses `key=value` lines; `#` starts a comment. `alphabet` is either a
    /// run of symbols (`abc`) or whitespace-separated single symbols.
    pub fn parse(text: &str) -> Result<Self> {
        let mut kv = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(i + 1, "expected key=value"))?;
            kv.insert(k.trim().to_string(), (i + 1, v.trim().to_string()));
        }
        let (_, alpha) = kv
            .remove("alphabet")
            .ok_or_else(|| Error::Config("missing `alphabet`".into()))?;
        let symbols: Vec<char> = if alpha.contains(char::is_whitespace) {
            alpha
                .split_whitespace()
                .map(|s| {
                    let mut cs = s.chars();
                    match (cs.next(), cs.next()) {
                        (Some(c), None) => Ok(c),
                        _ => Err(Error::Config(format!(
                            "alphabet entry {s:?} is not one symbol"
                        ))),
                    }
                })
                .collect::<Result<_>>()?
        } else {
            alpha.chars().collect()
        };
        let mut cfg = HmmConfig::new(Alphabet::new(symbols)?);
        for (k, (line, v)) in kv {
            let bad = || Error::parse(line, format!("bad value for {k}: {v:?}"));
            match k.as_str() {
                "states_per_letter" => cfg.states_per_letter = v.parse().map_err(|_| bad())?,
                "self_loop_prob" => cfg.self_loop_prob = v.parse().map_err(|_| bad())?,
                "emission_peak" => cfg.emission_peak = v.parse().map_err(|_| bad())?,
                "routing" => cfg.routing = v.parse()?,
                _ => return Err(Error::parse(line, format!("unknown key {k:?}"))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "states_per_letter={}", self.states_per_letter);
        let _ = writeln!(out, "self_loop_prob={}", self.self_loop_prob);
        let _ = writeln!(out, "emission_peak={}", self.emission_peak);
        let syms: Vec<String> = self
            .alphabet
            .symbols()
            .iter()
            .map(char::to_string)
            .collect();
        let _ = writeln!(out, "alphabet={}", syms.join(" "));
        let routing = match self.routing {
            Routing::Zero => "zero",
            Routing::Uniform => "uniform",
        };
        let _ = writeln!(out, "routing={routing}");
        out
    }

    /// Emission probability of `symbol` for a state of `letter`'s model.
    pub(crate) fn emission_prob(&self, letter_symbol: usize, symbol: usize) -> f64 {
        let k = self.alphabet.len();
        if k == 1 {
            1.0
        } else if symbol == letter_symbol {
            self.emission_peak
        } else {
            (1.0 - self.emission_peak) / (k - 1) as f64
        }
    }
}

/// Left-to-right model of one letter: each state loops on itself or moves
/// one step forward; the last state's forward mass leaves the letter.
#[derive(Clone, Debug, PartialEq)]
pub struct LetterHmm<F> {
    letter: char,
    symbol: usize,
    log_self: Vec<F>,
    log_forward: Vec<F>,
    /// `states x alphabet` table of `ln b_j(o)`.
    log_emissions: Vec<Vec<F>>,
}

pub fn make_letter_hmm<F: LogScore>(letter: char, config: &HmmConfig) -> Result<LetterHmm<F>> {
    config.validate()?;
    let symbol = config
        .alphabet
        .index_of(letter)
        .ok_or_else(|| Error::Config(format!("letter {letter:?} has no observation symbol")))?;
    let s = config.states_per_letter;
    let row: Vec<F> = (0..config.alphabet.len())
        .map(|o| F::from_prob(config.emission_prob(symbol, o)))
        .collect();
    Ok(LetterHmm {
        letter,
        symbol,
        log_self: vec![F::from_prob(config.self_loop_prob); s],
        log_forward: vec![F::from_prob(1.0 - config.self_loop_prob); s],
        log_emissions: vec![row; s],
    })
}

impl<F: LogScore> LetterHmm<F> {
    pub fn letter(&self) -> char {
        self.letter
    }

    pub fn state_count(&self) -> usize {
        self.log_self.len()
    }

    pub fn entry(&self) -> usize {
        0
    }

    pub fn exit(&self) -> usize {
        self.state_count() - 1
    }

    pub fn log_self(&self, state: usize) -> F {
        self.log_self[state]
    }

    /// Log-probability of leaving `state` forward (to the next state, or out
    /// of the letter from the exit state).
    pub fn log_forward(&self, state: usize) -> F {
        self.log_forward[state]
    }

    pub fn emission_row(&self, state: usize) -> &[F] {
        &self.log_emissions[state]
    }

    pub fn emission_logprob(&self, state: usize, symbol: usize) -> Result<F> {
        self.log_emissions[state]
            .get(symbol)
            .copied()
            .ok_or_else(|| Error::UnknownSymbol(format!("#{symbol}")))
    }

    pub fn emission_logprob_char(
        &self,
        state: usize,
        symbol: char,
        alphabet: &Alphabet,
    ) -> Result<F> {
        let o = alphabet
            .index_of(symbol)
            .ok_or_else(|| Error::UnknownSymbol(symbol.to_string()))?;
        self.emission_logprob(state, o)
    }
}

/// One shared model per alphabet symbol.
#[derive(Clone, Debug)]
pub struct LetterModels<F> {
    models: BTreeMap<char, LetterHmm<F>>,
    config: HmmConfig,
}

impl<F: LogScore> LetterModels<F> {
    pub fn new(config: &HmmConfig) -> Result<Self> {
        let models = config
            .alphabet
            .symbols()
            .iter()
            .map(|&c| Ok((c, make_letter_hmm(c, config)?)))
            .collect::<Result<_>>()?;
        Ok(LetterModels {
            models,
            config: config.clone(),
        })
    }

    pub fn get(&self, letter: char) -> Result<&LetterHmm<F>> {
        self.models
            .get(&letter)
            .ok_or(Error::MissingLetterModel(letter))
    }

    pub fn config(&self) -> &HmmConfig {
        &self.config
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.config.alphabet
    }
}

/// Observation symbols, stored as alphabet indices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ObservationSequence {
    symbols: Vec<usize>,
}

impl ObservationSequence {
    pub fn from_indices(symbols: Vec<usize>, alphabet: &Alphabet) -> Result<Self> {
        if let Some(&bad) = symbols.iter().find(|&&s| s >= alphabet.len()) {
            return Err(Error::UnknownSymbol(format!("#{bad}")));
        }
        Ok(ObservationSequence { symbols })
    }

    pub fn from_chars(chars: impl IntoIterator<Item = char>, alphabet: &Alphabet) -> Result<Self> {
        let symbols = chars
            .into_iter()
            .map(|c| {
                alphabet
                    .index_of(c)
                    .ok_or_else(|| Error::UnknownSymbol(c.to_string()))
            })
            .collect::<Result<_>>()?;
        Ok(ObservationSequence { symbols })
    }

    /// One line of whitespace-separated single-character symbols.
    pub fn parse_line(line: &str, alphabet: &Alphabet) -> Result<Self> {
        let symbols = line
            .split_whitespace()
            .map(|tok| {
                let mut cs = tok.chars();
                match (cs.next(), cs.next()) {
                    (Some(c), None) => alphabet.index_of(c),
                    _ => None,
                }
                .ok_or_else(|| Error::UnknownSymbol(tok.to_string()))
            })
            .collect::<Result<_>>()?;
        Ok(ObservationSequence { symbols })
    }

    pub fn to_line(&self, alphabet: &Alphabet) -> String {
        let parts: Vec<String> = self
            .symbols
            .iter()
            .map(|&s| alphabet.symbol(s).to_string())
            .collect();
        parts.join(" ")
    }

    pub fn symbols(&self) -> &[usize] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

/// Walks `word`'s concatenated letter models and samples one observation per
/// frame. Deterministic for a given seed.
pub fn sample_observations(
    word: &str,
    config: &HmmConfig,
    seed: u64,
) -> Result<ObservationSequence> {
    sample_observations_with(word, config, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn sample_observations_with<R: Rng + ?Sized>(
    word: &str,
    config: &HmmConfig,
    rng: &mut R,
) -> Result<ObservationSequence> {
    config.validate()?;
    let k = config.alphabet.len();
    let mut out = Vec::new();
    for c in word.chars() {
        let own = config
            .alphabet
            .index_of(c)
            .ok_or_else(|| Error::Config(format!("letter {c:?} has no observation symbol")))?;
        for _ in 0..config.states_per_letter {
            loop {
                let sym = if k == 1 || rng.gen::<f64>() < config.emission_peak {
                    own
                } else {
                    // Uniform over the other k - 1 symbols.
                    let r = rng.gen_range(0..k - 1);
                    if r >= own {
                        r + 1
                    } else {
                        r
                    }
                };
                out.push(sym);
                if rng.gen::<f64>() >= config.self_loop_prob {
                    break;
                }
            }
        }
    }
    Ok(ObservationSequence { symbols: out })
}
