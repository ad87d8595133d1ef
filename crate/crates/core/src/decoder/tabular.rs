use super::{
    best_incoming, check_symbols, harvest_best, with_emission, Counters, DecodeResult, Hypothesis,
    Token,
};
use crate::error::Result;
use crate::letter_hmm::ObservationSequence;
use crate::lexicon_hmm::{LexiconHmm, Source};
use crate::score::LogScore;

const NO_BACK: u32 = u32::MAX;

#[derive(Clone, Copy, Debug)]
struct Cell<F> {
    token: Token<F>,
    /// Position of the winning transition in the state's predecessor list.
    back: u32,
}

/// Full `frames x states` score lattice with back-pointers.
#[derive(Clone, Debug)]
pub struct Lattice<F> {
    states: usize,
    frames: usize,
    cells: Vec<Cell<F>>,
    counters: Counters,
}

impl<F: LogScore> Lattice<F> {
    pub fn frames(&self) -> usize {
        self.frames
    }

    /// `delta_t(j)` for `t` in `0..frames` (frame `t` has consumed `t + 1`
    /// symbols).
    pub fn score(&self, t: usize, j: usize) -> F {
        self.cells[t * self.states + j].token.score
    }

    pub fn token(&self, t: usize, j: usize) -> Token<F> {
        self.cells[t * self.states + j].token
    }

    pub fn counters(&self) -> Counters {
        self.counters
    }
}

pub fn tabular_lattice<F: LogScore>(
    hmm: &LexiconHmm<F>,
    obs: &ObservationSequence,
) -> Result<Lattice<F>> {
    check_symbols(hmm, obs)?;
    let n = hmm.state_count();
    let frames = obs.len();
    let mut cells = vec![
        Cell {
            token: Token::impossible(),
            back: NO_BACK
        };
        n * frames
    ];
    let mut counters = Counters {
        token_slots: n * frames,
        ..Counters::default()
    };
    for (t, &o) in obs.symbols().iter().enumerate() {
        let (done, rest) = cells.split_at_mut(t * n);
        let prev = if t == 0 {
            &[][..]
        } else {
            &done[(t - 1) * n..]
        };
        let row = &mut rest[..n];
        let start = if t == 0 {
            Token::start()
        } else {
            Token::impossible()
        };
        for &j in hmm.decode_order() {
            let (best, arg) = best_incoming(
                hmm.predecessors(j),
                |i| prev.get(i).map_or(Token::impossible(), |c| c.token),
                start,
                &mut counters.ops,
            );
            let token = with_emission(best, hmm.emission(j, o));
            let back = match arg {
                Some(k) if !token.is_impossible() => k as u32,
                _ => NO_BACK,
            };
            row[j] = Cell { token, back };
        }
        counters.emission_adds += n as u64;
    }
    Ok(Lattice {
        states: n,
        frames,
        cells,
        counters,
    })
}

/// Reference 1-best decoder: fills the whole lattice, then recovers the
/// winning word by backtracking through the stored predecessors.
pub fn viterbi_tabular<F: LogScore>(
    hmm: &LexiconHmm<F>,
    obs: &ObservationSequence,
) -> Result<DecodeResult<F>> {
    let lattice = tabular_lattice(hmm, obs)?;
    let counters = lattice.counters;
    if lattice.frames == 0 {
        return Ok(DecodeResult {
            ranking: Vec::new(),
            counters,
        });
    }
    let last = lattice.frames - 1;
    let Some((tok, state)) = harvest_best(hmm, |j| lattice.token(last, j)) else {
        return Ok(DecodeResult {
            ranking: Vec::new(),
            counters,
        });
    };

    // Backtrack to the start, collecting automaton nodes.
    let a = hmm.coding().automaton();
    let mut nodes = vec![a.sink()];
    let (mut t, mut j) = (last, state);
    loop {
        let node = hmm.state(j).node;
        if nodes.last() != Some(&node) {
            nodes.push(node);
        }
        let cell = lattice.cells[t * lattice.states + j];
        debug_assert_ne!(cell.back, NO_BACK);
        match hmm.predecessors(j)[cell.back as usize].source {
            Source::Start => break,
            Source::State(i) => {
                j = i;
                t -= 1;
            }
        }
    }
    nodes.push(a.root());
    nodes.reverse();

    let hyp = Hypothesis {
        word: a.spell(&nodes),
        pph: hmm.coding().encode_path(&nodes)?,
        score: tok.score,
    };
    Ok(DecodeResult {
        ranking: vec![hyp],
        counters,
    })
}
