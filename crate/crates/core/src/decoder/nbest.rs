//! n-best token passing: every state keeps up to `n` tokens with distinct
//! path indices, sorted best first.
//!
//! Two update orders are provided. [`MergeRule::Naive`] visits every
//! (predecessor, rank) pair, completes the candidate with its emission and
//! merges it into the list. [`MergeRule::Improved`] visits ranks in the outer
//! loop: after round `k` the first `k + 1` list entries are final, so later
//! candidates are merged only from position `k` on, path indices are updated
//! only for merged candidates, and the emission is added once per surviving
//! token. Both produce the same lists.

use super::{check_symbols, hypothesis, Counters, DecodeResult, Token};
use crate::error::{Error, Result};
use crate::letter_hmm::ObservationSequence;
use crate::lexicon_hmm::{LexiconHmm, Source};
use crate::score::LogScore;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MergeRule {
    Naive,
    Improved,
}

/// Inserts `cand` into a sorted, distinct-pph list of capacity `n`, never
/// touching entries before `from`. A candidate whose path index is already
/// present replaces that entry only if it scores strictly higher.
fn merge_from<F: LogScore>(
    list: &mut Vec<Token<F>>,
    from: usize,
    cand: Token<F>,
    n: usize,
) -> bool {
    if let Some(pos) = list.iter().position(|t| t.pph == cand.pph) {
        if pos < from || cand.score <= list[pos].score {
            return false;
        }
        list.remove(pos);
    }
    let from = from.min(list.len());
    let idx = list[from..]
        .iter()
        .position(|t| cand.beats(t))
        .map_or(list.len(), |p| from + p);
    if idx >= n {
        return false;
    }
    list.insert(idx, cand);
    list.truncate(n);
    true
}

pub struct NBestSession<'a, F> {
    hmm: &'a LexiconHmm<F>,
    n: usize,
    rule: MergeRule,
    lists: Vec<Token<F>>,
    lens: Vec<usize>,
    scratch: Vec<Token<F>>,
    frames: usize,
    counters: Counters,
}

impl<'a, F: LogScore> NBestSession<'a, F> {
    pub fn new(hmm: &'a LexiconHmm<F>, n: usize, rule: MergeRule) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("n-best list size must be at least 1".into()));
        }
        let states = hmm.state_count();
        Ok(NBestSession {
            hmm,
            n,
            rule,
            lists: vec![Token::impossible(); n * states],
            lens: vec![0; states],
            scratch: Vec::with_capacity(n + 1),
            frames: 0,
            counters: Counters {
                token_slots: n * states,
                ..Counters::default()
            },
        })
    }

    /// Tokens of state `j` after the last completed frame.
    pub fn list(&self, j: usize) -> &[Token<F>] {
        &self.lists[j * self.n..j * self.n + self.lens[j]]
    }

    /// Advances one frame. States are visited in reverse decode order, so the
    /// lists are updated in place.
    pub fn step(&mut self, symbol: usize) {
        let hmm = self.hmm;
        let start = [Token::start()];
        let start: &[Token<F>] = if self.frames == 0 { &start } else { &[] };
        for &j in hmm.decode_order().iter().rev() {
            let e = hmm.emission(j, symbol);
            self.scratch.clear();
            match self.rule {
                MergeRule::Naive => self.update_naive(j, e, start),
                MergeRule::Improved => self.update_improved(j, e, start),
            }
            let n = self.n;
            self.lists[j * n..j * n + self.scratch.len()].copy_from_slice(&self.scratch);
            self.lens[j] = self.scratch.len();
        }
        self.frames += 1;
    }

    fn source<'s>(&'s self, src: Source, start: &'s [Token<F>]) -> &'s [Token<F>] {
        match src {
            Source::Start => start,
            Source::State(i) => &self.lists[i * self.n..i * self.n + self.lens[i]],
        }
    }

    fn update_naive(&mut self, j: usize, e: F, start: &[Token<F>]) {
        let mut scratch = std::mem::take(&mut self.scratch);
        let mut c = self.counters;
        for t in self.hmm.predecessors(j) {
            for tok in self.source(t.source, start) {
                c.ops += 1;
                c.emission_adds += 1;
                let score = tok.score.plus(t.log_prob).plus(e);
                if score.is_impossible() {
                    continue;
                }
                c.merges += 1;
                merge_from(
                    &mut scratch,
                    0,
                    Token {
                        score,
                        pph: tok.pph + t.pph_increment,
                    },
                    self.n,
                );
            }
        }
        self.counters = c;
        self.scratch = scratch;
    }

    fn update_improved(&mut self, j: usize, e: F, start: &[Token<F>]) {
        if e.is_impossible() {
            return;
        }
        let n = self.n;
        let mut scratch = std::mem::take(&mut self.scratch);
        let mut c = self.counters;
        let preds = self.hmm.predecessors(j);
        for k in 0..n {
            let mut any = false;
            for t in preds {
                let Some(tok) = self.source(t.source, start).get(k) else {
                    continue;
                };
                any = true;
                c.ops += 1;
                let score = tok.score.plus(t.log_prob);
                if score.is_impossible() {
                    continue;
                }
                // Cheap rejection against the worst entry of a full list.
                if scratch.len() == n {
                    let worst = scratch[n - 1];
                    if score < worst.score
                        || (score == worst.score && tok.pph + t.pph_increment >= worst.pph)
                    {
                        continue;
                    }
                }
                c.merges += 1;
                merge_from(
                    &mut scratch,
                    k,
                    Token {
                        score,
                        pph: tok.pph + t.pph_increment,
                    },
                    n,
                );
            }
            if let Some(entry) = scratch.get_mut(k) {
                entry.score = entry.score.plus(e);
                c.emission_adds += 1;
            } else if !any {
                break;
            }
        }
        self.counters = c;
        self.scratch = scratch;
    }

    pub fn finish(self) -> Result<DecodeResult<F>> {
        let mut ranking = Vec::new();
        if self.frames > 0 {
            let mut best: Vec<Token<F>> = Vec::with_capacity(self.n + 1);
            for f in self.hmm.finals() {
                for tok in self.list(f.state) {
                    let score = tok.score.plus(f.log_prob);
                    if !score.is_impossible() {
                        merge_from(
                            &mut best,
                            0,
                            Token {
                                score,
                                pph: tok.pph + f.pph_increment,
                            },
                            self.n,
                        );
                    }
                }
            }
            ranking = best
                .into_iter()
                .map(|t| hypothesis(self.hmm, t))
                .collect::<Result<_>>()?;
        }
        Ok(DecodeResult {
            ranking,
            counters: self.counters,
        })
    }
}

fn run<F: LogScore>(
    hmm: &LexiconHmm<F>,
    obs: &ObservationSequence,
    n: usize,
    rule: MergeRule,
) -> Result<DecodeResult<F>> {
    check_symbols(hmm, obs)?;
    let mut s = NBestSession::new(hmm, n, rule)?;
    for &o in obs.symbols() {
        s.step(o);
    }
    s.finish()
}

pub fn nbest_naive<F: LogScore>(
    hmm: &LexiconHmm<F>,
    obs: &ObservationSequence,
    n: usize,
) -> Result<DecodeResult<F>> {
    run(hmm, obs, n, MergeRule::Naive)
}

pub fn nbest_improved<F: LogScore>(
    hmm: &LexiconHmm<F>,
    obs: &ObservationSequence,
    n: usize,
) -> Result<DecodeResult<F>> {
    run(hmm, obs, n, MergeRule::Improved)
}
