//! Token-passing Viterbi decoders over a [`LexiconHmm`].
//!
//! All variants share one update rule: for state `j` at frame `t`,
//! `delta_t(j) = max_i(delta_{t-1}(i) + ln a_ij) + ln b_j(o_t)`, with
//! predecessors scanned in stored order and exact score ties resolved
//! towards the smaller path index. The 1-best variants therefore return
//! bit-identical results; they differ in how many token slots they hold.

mod nbest;
mod one_best;
mod tabular;

use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::letter_hmm::ObservationSequence;
use crate::lexicon_hmm::{LexiconHmm, Source, Transition};
use crate::pph::Pph;
use crate::score::{format_score, LogScore};

pub use nbest::{nbest_improved, nbest_naive, MergeRule, NBestSession};
pub use one_best::{viterbi_flipflop, viterbi_inplace, FlipFlopSession, InPlaceSession};
pub use tabular::{tabular_lattice, viterbi_tabular, Lattice};

/// Score plus path history of one hypothesis held by a state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Token<F> {
    pub score: F,
    pub pph: Pph,
}

impl<F: LogScore> Token<F> {
    pub fn impossible() -> Self {
        Token {
            score: F::impossible(),
            pph: 0,
        }
    }

    pub(crate) fn start() -> Self {
        Token {
            score: F::zero(),
            pph: 0,
        }
    }

    pub fn is_impossible(&self) -> bool {
        self.score.is_impossible()
    }

    /// Higher score wins; equal scores go to the smaller path index.
    #[inline]
    pub fn beats(&self, other: &Self) -> bool {
        self.score > other.score || (self.score == other.score && self.pph < other.pph)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Hypothesis<F> {
    pub word: String,
    pub pph: Pph,
    pub score: F,
}

/// Work and memory instrumentation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counters {
    /// Predecessor visits (1-best) or predecessor-token visits (n-best).
    pub ops: u64,
    /// Candidate tokens submitted to a sorted-list merge.
    pub merges: u64,
    /// Additions of an emission log-probability.
    pub emission_adds: u64,
    /// Token storage held for the decode.
    pub token_slots: usize,
}

impl std::ops::AddAssign for Counters {
    fn add_assign(&mut self, o: Self) {
        self.ops += o.ops;
        self.merges += o.merges;
        self.emission_adds += o.emission_adds;
        self.token_slots = self.token_slots.max(o.token_slots);
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecodeResult<F> {
    /// Best first; distinct words.
    pub ranking: Vec<Hypothesis<F>>,
    pub counters: Counters,
}

impl<F: LogScore> DecodeResult<F> {
    pub fn best(&self) -> Option<&Hypothesis<F>> {
        self.ranking.first()
    }

    /// `rank word pph score` lines, then the counter trailer.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, h) in self.ranking.iter().enumerate() {
            let _ = writeln!(
                out,
                "{} {} {} {}",
                k + 1,
                h.word,
                h.pph,
                format_score(h.score.to_f64())
            );
        }
        let c = &self.counters;
        let _ = writeln!(
            out,
            "# ops={} merges={} token_slots={}",
            c.ops, c.merges, c.token_slots
        );
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Tabular,
    FlipFlop,
    InPlace,
    NBestNaive,
    NBestImproved,
}

impl Variant {
    pub const ALL: [Variant; 5] = [
        Variant::Tabular,
        Variant::FlipFlop,
        Variant::InPlace,
        Variant::NBestNaive,
        Variant::NBestImproved,
    ];

    pub fn is_nbest(self) -> bool {
        matches!(self, Variant::NBestNaive | Variant::NBestImproved)
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::Tabular => "tabular",
            Variant::FlipFlop => "flipflop",
            Variant::InPlace => "inplace",
            Variant::NBestNaive => "nbest-naive",
            Variant::NBestImproved => "nbest-improved",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown decoder variant {s:?}")))
    }
}

/// Runs `variant`; `n` is ignored by the 1-best variants.
pub fn decode<F: LogScore>(
    hmm: &LexiconHmm<F>,
    obs: &ObservationSequence,
    variant: Variant,
    n: usize,
) -> Result<DecodeResult<F>> {
    match variant {
        Variant::Tabular => viterbi_tabular(hmm, obs),
        Variant::FlipFlop => viterbi_flipflop(hmm, obs),
        Variant::InPlace => viterbi_inplace(hmm, obs),
        Variant::NBestNaive => nbest_naive(hmm, obs, n),
        Variant::NBestImproved => nbest_improved(hmm, obs, n),
    }
}

pub(crate) fn check_symbols<F: LogScore>(
    hmm: &LexiconHmm<F>,
    obs: &ObservationSequence,
) -> Result<()> {
    match obs.symbols().iter().find(|&&s| s >= hmm.alphabet().len()) {
        Some(bad) => Err(Error::UnknownSymbol(format!("#{bad}"))),
        None => Ok(()),
    }
}

/// Best `delta_{t-1}(i) + ln a_ij` over the predecessors of a state, before
/// the emission is added. Returns the winning transition's position.
#[inline]
pub(crate) fn best_incoming<F: LogScore>(
    preds: &[Transition<F>],
    read: impl Fn(usize) -> Token<F>,
    start: Token<F>,
    ops: &mut u64,
) -> (Token<F>, Option<usize>) {
    let mut best = Token::impossible();
    let mut arg = None;
    for (k, t) in preds.iter().enumerate() {
        *ops += 1;
        let src = match t.source {
            Source::Start => start,
            Source::State(i) => read(i),
        };
        if src.is_impossible() {
            continue;
        }
        let cand = Token {
            score: src.score.plus(t.log_prob),
            pph: src.pph + t.pph_increment,
        };
        if !cand.is_impossible() && cand.beats(&best) {
            best = cand;
            arg = Some(k);
        }
    }
    (best, arg)
}

#[inline]
pub(crate) fn with_emission<F: LogScore>(tok: Token<F>, e: F) -> Token<F> {
    if tok.is_impossible() || e.is_impossible() {
        Token::impossible()
    } else {
        Token {
            score: tok.score.plus(e),
            pph: tok.pph,
        }
    }
}

/// Best completion over the final states, sink increment included.
pub(crate) fn harvest_best<F: LogScore>(
    hmm: &LexiconHmm<F>,
    read: impl Fn(usize) -> Token<F>,
) -> Option<(Token<F>, usize)> {
    let mut best: Option<(Token<F>, usize)> = None;
    for f in hmm.finals() {
        let tok = read(f.state);
        if tok.is_impossible() {
            continue;
        }
        let cand = Token {
            score: tok.score.plus(f.log_prob),
            pph: tok.pph + f.pph_increment,
        };
        if cand.is_impossible() {
            continue;
        }
        if best.as_ref().is_none_or(|(b, _)| cand.beats(b)) {
            best = Some((cand, f.state));
        }
    }
    best
}

pub(crate) fn hypothesis<F: LogScore>(hmm: &LexiconHmm<F>, tok: Token<F>) -> Result<Hypothesis<F>> {
    Ok(Hypothesis {
        word: hmm.coding().decode_word(u64::from(tok.pph))?,
        pph: tok.pph,
        score: tok.score,
    })
}
