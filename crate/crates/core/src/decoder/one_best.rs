use super::{
    best_incoming, check_symbols, harvest_best, hypothesis, with_emission, Counters, DecodeResult,
    Token,
};
use crate::error::Result;
use crate::letter_hmm::ObservationSequence;
use crate::lexicon_hmm::LexiconHmm;
use crate::score::LogScore;

/// 1-best token passing with two token arrays: frame `t` is computed from
/// frame `t - 1` in any state order.
pub struct FlipFlopSession<'a, F> {
    hmm: &'a LexiconHmm<F>,
    prev: Vec<Token<F>>,
    cur: Vec<Token<F>>,
    frames: usize,
    counters: Counters,
}

impl<'a, F: LogScore> FlipFlopSession<'a, F> {
    pub fn new(hmm: &'a LexiconHmm<F>) -> Self {
        let n = hmm.state_count();
        FlipFlopSession {
            hmm,
            prev: vec![Token::impossible(); n],
            cur: vec![Token::impossible(); n],
            frames: 0,
            counters: Counters {
                token_slots: 2 * n,
                ..Counters::default()
            },
        }
    }

    pub fn step(&mut self, symbol: usize) {
        let hmm = self.hmm;
        let start = if self.frames == 0 {
            Token::start()
        } else {
            Token::impossible()
        };
        let prev = &self.prev;
        for &j in hmm.decode_order() {
            let (best, _) = best_incoming(
                hmm.predecessors(j),
                |i| prev[i],
                start,
                &mut self.counters.ops,
            );
            self.cur[j] = with_emission(best, hmm.emission(j, symbol));
        }
        self.counters.emission_adds += hmm.state_count() as u64;
        std::mem::swap(&mut self.prev, &mut self.cur);
        self.frames += 1;
    }

    /// Tokens after the last completed frame.
    pub fn tokens(&self) -> &[Token<F>] {
        &self.prev
    }

    pub fn finish(self) -> Result<DecodeResult<F>> {
        finish(self.hmm, &self.prev, self.frames, self.counters)
    }
}

/// 1-best token passing with a single token array, updated in reverse
/// decode order so that every predecessor is read before it is overwritten.
pub struct InPlaceSession<'a, F> {
    hmm: &'a LexiconHmm<F>,
    tokens: Vec<Token<F>>,
    frames: usize,
    counters: Counters,
}

impl<'a, F: LogScore> InPlaceSession<'a, F> {
    pub fn new(hmm: &'a LexiconHmm<F>) -> Self {
        let n = hmm.state_count();
        InPlaceSession {
            hmm,
            tokens: vec![Token::impossible(); n],
            frames: 0,
            counters: Counters {
                token_slots: n,
                ..Counters::default()
            },
        }
    }

    pub fn step(&mut self, symbol: usize) {
        let hmm = self.hmm;
        let start = if self.frames == 0 {
            Token::start()
        } else {
            Token::impossible()
        };
        let tokens = &mut self.tokens;
        for &j in hmm.decode_order().iter().rev() {
            let (best, _) = best_incoming(
                hmm.predecessors(j),
                |i| tokens[i],
                start,
                &mut self.counters.ops,
            );
            tokens[j] = with_emission(best, hmm.emission(j, symbol));
        }
        self.counters.emission_adds += hmm.state_count() as u64;
        self.frames += 1;
    }

    pub fn tokens(&self) -> &[Token<F>] {
        &self.tokens
    }

    pub fn finish(self) -> Result<DecodeResult<F>> {
        finish(self.hmm, &self.tokens, self.frames, self.counters)
    }
}

fn finish<F: LogScore>(
    hmm: &LexiconHmm<F>,
    tokens: &[Token<F>],
    frames: usize,
    counters: Counters,
) -> Result<DecodeResult<F>> {
    let ranking = if frames == 0 {
        Vec::new()
    } else {
        harvest_best(hmm, |i| tokens[i])
            .map(|(tok, _)| hypothesis(hmm, tok))
            .transpose()?
            .into_iter()
            .collect()
    };
    Ok(DecodeResult { ranking, counters })
}

pub fn viterbi_flipflop<F: LogScore>(
    hmm: &LexiconHmm<F>,
    obs: &ObservationSequence,
) -> Result<DecodeResult<F>> {
    check_symbols(hmm, obs)?;
    let mut s = FlipFlopSession::new(hmm);
    for &o in obs.symbols() {
        s.step(o);
    }
    s.finish()
}

pub fn viterbi_inplace<F: LogScore>(
    hmm: &LexiconHmm<F>,
    obs: &ObservationSequence,
) -> Result<DecodeResult<F>> {
    check_symbols(hmm, obs)?;
    let mut s = InPlaceSession::new(hmm);
    for &o in obs.symbols() {
        s.step(o);
    }
    s.finish()
}
