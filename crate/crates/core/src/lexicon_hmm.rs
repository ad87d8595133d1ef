//! Flattening of a node-automaton into one global HMM.
//!
//! Every letter node becomes the states of its letter's model. The root and
//! sink are not instantiated: arcs out of the root become transitions from a
//! virtual `Start` source, and arcs into the sink mark final states. States
//! are laid out node by node in ascending topological index, so the decode
//! order is the identity and a reverse scan walks memory downwards.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::automaton::{NodeId, NodeLabel};
use crate::error::Result;
use crate::letter_hmm::{Alphabet, LetterModels, Routing};
use crate::lexicon::Lexicon;
use crate::pph::{Pph, PphCoding};
use crate::score::LogScore;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    /// The virtual start state: holds log 1 before the first frame only.
    Start,
    State(usize),
}

/// An incoming transition of some state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Transition<F> {
    pub source: Source,
    pub log_prob: F,
    /// 0 inside a node; the automaton arc's increment across nodes.
    pub pph_increment: Pph,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HmmState {
    pub node: NodeId,
    pub sub_state: usize,
    pub letter: char,
}

/// Exit state of a node linked to the sink.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FinalState<F> {
    pub state: usize,
    /// Exit release plus routing weight of the sink arc.
    pub log_prob: F,
    pub pph_increment: Pph,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecodeStats {
    pub states: usize,
    /// `(1/N) sum_j |pred(j)|`, self-loops and start transitions included.
    pub mean_predecessors: f64,
    pub frames: usize,
}

#[derive(Clone, Debug)]
pub struct LexiconHmm<F> {
    coding: Arc<PphCoding>,
    alphabet: Alphabet,
    states: Vec<HmmState>,
    emission_rows: Vec<F>,
    row_of_state: Vec<usize>,
    pred_start: Vec<usize>,
    preds: Vec<Transition<F>>,
    finals: Vec<FinalState<F>>,
    decode_order: Vec<usize>,
}

impl<F: LogScore> LexiconHmm<F> {
    pub fn expand(coding: impl Into<Arc<PphCoding>>, models: &LetterModels<F>) -> Result<Self> {
        let coding = coding.into();
        let a = coding.automaton();
        let alphabet = models.alphabet().clone();
        let routing = models.config().routing;
        let route = |x: NodeId| match routing {
            Routing::Zero => F::zero(),
            Routing::Uniform => F::from_prob(1.0 / a.successors(x).len() as f64),
        };

        // Lay out states node by node.
        let mut states = Vec::new();
        let mut first_state = vec![usize::MAX; a.node_count()];
        for x in a.topo_order() {
            if let NodeLabel::Letter(c) = a.label(x) {
                let m = models.get(c)?;
                first_state[x] = states.len();
                states.extend((0..m.state_count()).map(|k| HmmState {
                    node: x,
                    sub_state: k,
                    letter: c,
                }));
            }
        }

        let mut emission_rows = Vec::new();
        let mut row_ids: HashMap<(char, usize), usize> = HashMap::new();
        let mut row_of_state = Vec::with_capacity(states.len());
        for st in &states {
            let next = row_ids.len();
            let id = *row_ids.entry((st.letter, st.sub_state)).or_insert_with(|| {
                let m = models.get(st.letter).expect("model checked above");
                emission_rows.extend_from_slice(m.emission_row(st.sub_state));
                next
            });
            row_of_state.push(id);
        }

        // Cross-node transitions, grouped by destination node.
        let mut incoming: Vec<Vec<Transition<F>>> = vec![Vec::new(); a.node_count()];
        let mut finals = Vec::new();
        for (x, i, y) in a.arcs() {
            let inc = coding.increments(x)[i];
            let (source, log_prob) = match a.label(x) {
                NodeLabel::Root => (Source::Start, route(x)),
                NodeLabel::Letter(c) => {
                    let m = models.get(c)?;
                    let exit = first_state[x] + m.exit();
                    (Source::State(exit), m.log_forward(m.exit()).plus(route(x)))
                }
                NodeLabel::Sink => unreachable!("sink has no successors"),
            };
            match (a.label(y), source) {
                (NodeLabel::Sink, Source::State(state)) => finals.push(FinalState {
                    state,
                    log_prob,
                    pph_increment: inc,
                }),
                (NodeLabel::Letter(_), _) => incoming[y].push(Transition {
                    source,
                    log_prob,
                    pph_increment: inc,
                }),
                _ => unreachable!("validated automaton"),
            }
        }
        finals.sort_by_key(|f| f.state);

        let mut pred_start = Vec::with_capacity(states.len() + 1);
        let mut preds = Vec::new();
        for (j, st) in states.iter().enumerate() {
            pred_start.push(preds.len());
            let m = models.get(st.letter)?;
            preds.push(Transition {
                source: Source::State(j),
                log_prob: m.log_self(st.sub_state),
                pph_increment: 0,
            });
            if st.sub_state > 0 {
                preds.push(Transition {
                    source: Source::State(j - 1),
                    log_prob: m.log_forward(st.sub_state - 1),
                    pph_increment: 0,
                });
            } else {
                let mut cross = std::mem::take(&mut incoming[st.node]);
                cross.sort_by_key(|t| match t.source {
                    Source::Start => 0,
                    Source::State(i) => i + 1,
                });
                preds.extend(cross);
            }
        }
        pred_start.push(preds.len());

        let decode_order = (0..states.len()).collect();
        Ok(LexiconHmm {
            coding,
            alphabet,
            states,
            emission_rows,
            row_of_state,
            pred_start,
            preds,
            finals,
            decode_order,
        })
    }

    /// Lexicon HMM of the single-word lexicon `{word}`; every increment is 0.
    pub fn word_linear(word: &str, models: &LetterModels<F>) -> Result<Self> {
        let lexicon = Lexicon::new([word])?;
        let coding = PphCoding::new(crate::automaton::build_trie(&lexicon)?)?;
        Self::expand(coding, models)
    }

    pub fn coding(&self) -> &PphCoding {
        &self.coding
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, j: usize) -> HmmState {
        self.states[j]
    }

    pub fn predecessors(&self, j: usize) -> &[Transition<F>] {
        &self.preds[self.pred_start[j]..self.pred_start[j + 1]]
    }

    pub fn transition_count(&self) -> usize {
        self.preds.len()
    }

    pub fn finals(&self) -> &[FinalState<F>] {
        &self.finals
    }

    /// A topological order of the loop-free transition skeleton.
    pub fn decode_order(&self) -> &[usize] {
        &self.decode_order
    }

    #[inline]
    pub fn emission(&self, j: usize, symbol: usize) -> F {
        self.emission_rows[self.row_of_state[j] * self.alphabet.len() + symbol]
    }

    pub fn start_fan_out(&self) -> usize {
        self.preds
            .iter()
            .filter(|t| t.source == Source::Start)
            .count()
    }

    pub fn decode_stats(&self, frames: usize) -> DecodeStats {
        DecodeStats {
            states: self.state_count(),
            mean_predecessors: self.preds.len() as f64 / self.state_count() as f64,
            frames,
        }
    }

    /// One line per state: `<index> <node> <letter> <predecessor count>`.
    pub fn dump_states(&self) -> String {
        let mut out = String::new();
        for (j, st) in self.states.iter().enumerate() {
            let _ = writeln!(
                out,
                "{j} {} {} {}",
                st.node,
                st.letter,
                self.predecessors(j).len()
            );
        }
        out
    }
}
