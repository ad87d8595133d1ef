//! Brute-force references for the decoders and the path-index coding.
//!
//! Nothing here goes through [`LexiconHmm`](crate::LexiconHmm) or the
//! token-passing code: words are scored one at a time with a dedicated
//! chain recurrence, and word indices come from sorting the lexicon.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};

use crate::automaton::{NodeAutomaton, NodeId};
use crate::decoder::Hypothesis;
use crate::error::Result;
use crate::letter_hmm::{LetterModels, ObservationSequence, Routing};
use crate::lexicon::Lexicon;
use crate::pph::Pph;
use crate::score::LogScore;

/// Depth-first order of words under canonical successor order: letters
/// compare by scalar value, and a word comes after all of its extensions.
pub fn canonical_cmp(a: &str, b: &str) -> Ordering {
    let (mut ai, mut bi) = (a.chars(), b.chars());
    loop {
        match (ai.next(), bi.next()) {
            (Some(x), Some(y)) if x == y => {}
            (Some(x), Some(y)) => return x.cmp(&y),
            (None, None) => return Ordering::Equal,
            (None, Some(_)) => return Ordering::Greater,
            (Some(_), None) => return Ordering::Less,
        }
    }
}

/// Words in canonical order; a word's position is its path index.
pub fn canonical_order(lexicon: &Lexicon) -> Vec<String> {
    let mut words: Vec<String> = lexicon.iter().map(String::from).collect();
    words.sort_by(|a, b| canonical_cmp(a, b));
    words
}

/// Full root-to-sink paths in depth-first completion order.
pub fn enumerate_paths_dfs(a: &NodeAutomaton) -> Vec<Vec<NodeId>> {
    fn walk(a: &NodeAutomaton, path: &mut Vec<NodeId>, out: &mut Vec<Vec<NodeId>>) {
        let x = *path.last().expect("non-empty");
        if x == a.sink() {
            out.push(path.clone());
            return;
        }
        for &y in a.successors(x) {
            path.push(y);
            walk(a, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    walk(a, &mut vec![a.root()], &mut out);
    out
}

/// Out-degree each prefix would have in the lexicon's trie.
fn prefix_out_degrees(lexicon: &Lexicon) -> HashMap<String, usize> {
    let mut next: HashMap<String, BTreeSet<Option<char>>> = HashMap::new();
    for w in lexicon.iter() {
        let mut prefix = String::new();
        for c in w.chars() {
            next.entry(prefix.clone()).or_default().insert(Some(c));
            prefix.push(c);
        }
        next.entry(prefix).or_default().insert(None);
    }
    next.into_iter().map(|(p, s)| (p, s.len())).collect()
}

struct Scorer<'m, F> {
    models: &'m LetterModels<F>,
    degrees: Option<HashMap<String, usize>>,
}

impl<F: LogScore> Scorer<'_, F> {
    fn route(&self, prefix: &str) -> F {
        match &self.degrees {
            None => F::zero(),
            Some(d) => F::from_prob(1.0 / d[prefix] as f64),
        }
    }

    /// Viterbi over the word's chain of letter states.
    fn score(&self, word: &str, obs: &ObservationSequence) -> Result<F> {
        // Per chain state: (self-loop, incoming transition, emission row).
        let mut chain: Vec<(F, F, &[F])> = Vec::new();
        let mut prefix = String::new();
        let mut leave = self.route("");
        for c in word.chars() {
            let m = self.models.get(c)?;
            for s in 0..m.state_count() {
                let incoming = if s == 0 { leave } else { m.log_forward(s - 1) };
                chain.push((m.log_self(s), incoming, m.emission_row(s)));
            }
            prefix.push(c);
            leave = m.log_forward(m.exit()).plus(self.route(&prefix));
        }
        if obs.is_empty() {
            return Ok(F::impossible());
        }

        let mut delta = vec![F::impossible(); chain.len()];
        for (t, &o) in obs.symbols().iter().enumerate() {
            let prev = delta.clone();
            for (q, &(stay, enter, row)) in chain.iter().enumerate() {
                let from_self = prev[q].plus(stay);
                let from_prev = match (q, t) {
                    (0, 0) => F::zero().plus(enter),
                    (0, _) => F::impossible(),
                    _ => prev[q - 1].plus(enter),
                };
                let best = if from_prev > from_self {
                    from_prev
                } else {
                    from_self
                };
                delta[q] = best.plus(row[o]);
            }
        }
        Ok(delta[chain.len() - 1].plus(leave))
    }
}

/// Best log score of `word` alone (the lexicon `{word}`).
pub fn score_word<F: LogScore>(
    word: &str,
    models: &LetterModels<F>,
    obs: &ObservationSequence,
) -> Result<F> {
    let lexicon = Lexicon::new([word])?;
    score_word_in(word, &lexicon, models, obs)
}

/// Best log score of `word` as a member of `lexicon`; the lexicon matters
/// only for uniform routing weights.
pub fn score_word_in<F: LogScore>(
    word: &str,
    lexicon: &Lexicon,
    models: &LetterModels<F>,
    obs: &ObservationSequence,
) -> Result<F> {
    scorer(lexicon, models).score(word, obs)
}

fn scorer<'m, F: LogScore>(lexicon: &Lexicon, models: &'m LetterModels<F>) -> Scorer<'m, F> {
    let degrees = match models.config().routing {
        Routing::Zero => None,
        Routing::Uniform => Some(prefix_out_degrees(lexicon)),
    };
    Scorer { models, degrees }
}

/// Every word with its index and score, in canonical order.
pub fn word_score_table<F: LogScore>(
    lexicon: &Lexicon,
    models: &LetterModels<F>,
    obs: &ObservationSequence,
) -> Result<Vec<Hypothesis<F>>> {
    let s = scorer(lexicon, models);
    canonical_order(lexicon)
        .into_iter()
        .enumerate()
        .map(|(i, word)| {
            let score = s.score(&word, obs)?;
            Ok(Hypothesis {
                word,
                pph: i as Pph,
                score,
            })
        })
        .collect()
}

/// The `n` best words by (score descending, index ascending); impossible
/// words are dropped.
pub fn nbest_exhaustive<F: LogScore>(
    lexicon: &Lexicon,
    models: &LetterModels<F>,
    obs: &ObservationSequence,
    n: usize,
) -> Result<Vec<Hypothesis<F>>> {
    let mut table: Vec<_> = word_score_table(lexicon, models, obs)?
        .into_iter()
        .filter(|h| !h.score.is_impossible())
        .collect();
    table.sort_by(|a, b| crate::score::rank_order((a.score, a.pph), (b.score, b.pph)));
    table.truncate(n);
    Ok(table)
}
