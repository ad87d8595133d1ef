//! Perfect path history: a minimal perfect hash of the root-to-sink paths.
//!
//! `suff(x)` counts the paths from `x` to the sink. Each arc `x -> succ(x, i)`
//! carries the increment `sum_{j < i} suff(succ(x, j))`; summing increments
//! along a full path gives its depth-first completion rank in `[0, W)`.
//! A partial path sums to the rank of its first full extension, so a token
//! can update its history with one addition per arc crossed.

use crate::automaton::{NodeAutomaton, NodeId, ParsedAutomaton};
use crate::error::{Error, Result};

/// Path index carried by tokens.
pub type Pph = u32;

/// Number of paths from every node to the sink, by one pass in descending
/// topological order.
pub fn compute_suff(a: &NodeAutomaton) -> Result<Vec<u64>> {
    let mut suff = vec![0u64; a.node_count()];
    for &x in a.topo_order().iter().rev() {
        suff[x] = if x == a.sink() {
            1
        } else {
            a.successors(x).iter().try_fold(0u64, |acc, &y| {
                acc.checked_add(suff[y])
                    .ok_or_else(|| Error::PathCountOverflow("more than 2^64".into()))
            })?
        };
    }
    Ok(suff)
}

/// Per-arc increments, in successor order, checked against the [`Pph`] width.
pub fn annotate_increments(a: &NodeAutomaton, suff: &[u64]) -> Result<Vec<Vec<Pph>>> {
    (0..a.node_count())
        .map(|x| {
            let mut offset = 0u64;
            a.successors(x)
                .iter()
                .map(|&y| {
                    let inc = Pph::try_from(offset)
                        .map_err(|_| Error::PathCountOverflow(offset.to_string()))?;
                    offset += suff[y];
                    Ok(inc)
                })
                .collect()
        })
        .collect()
}

/// An automaton together with its cached suffix counts and arc increments.
#[derive(Clone, Debug, PartialEq)]
pub struct PphCoding {
    automaton: NodeAutomaton,
    suff: Vec<u64>,
    increments: Vec<Vec<Pph>>,
}

impl PphCoding {
    pub fn new(automaton: NodeAutomaton) -> Result<Self> {
        let suff = compute_suff(&automaton)?;
        let words = suff[automaton.root()];
        if words - 1 > u64::from(Pph::MAX) {
            return Err(Error::PathCountOverflow(words.to_string()));
        }
        let increments = annotate_increments(&automaton, &suff)?;
        Ok(PphCoding {
            automaton,
            suff,
            increments,
        })
    }

    /// Accepts either text form; stored annotations must match the
    /// recomputed ones.
    pub fn from_parsed(parsed: ParsedAutomaton) -> Result<Self> {
        let coding = Self::new(parsed.automaton)?;
        if let Some(suff) = &parsed.suff {
            if *suff != coding.suff {
                return Err(Error::Annotation("suffix counts differ".into()));
            }
        }
        if let Some(inc) = &parsed.increments {
            let ours = coding
                .increments
                .iter()
                .map(|v| v.iter().map(|&d| u64::from(d)).collect::<Vec<_>>());
            if !inc.iter().cloned().eq(ours) {
                return Err(Error::Annotation("arc increments differ".into()));
            }
        }
        Ok(coding)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_parsed(NodeAutomaton::parse(text)?)
    }

    /// Annotated text form: node lines carry `suff`, arc lines their increment.
    pub fn to_text(&self) -> String {
        crate::automaton::format_annotated(
            &self.automaton,
            self.word_count(),
            &self.suff,
            &self.increments,
        )
    }

    pub fn automaton(&self) -> &NodeAutomaton {
        &self.automaton
    }

    pub fn word_count(&self) -> u64 {
        self.suff[self.automaton.root()]
    }

    pub fn suff(&self, node: NodeId) -> u64 {
        self.suff[node]
    }

    /// Increments of `node`'s outgoing arcs, in successor order.
    pub fn increments(&self, node: NodeId) -> &[Pph] {
        &self.increments[node]
    }

    /// Sum of increments along a path starting at the root. The path may stop
    /// at any node.
    pub fn encode_path(&self, path: &[NodeId]) -> Result<Pph> {
        let a = &self.automaton;
        match path.first() {
            Some(&x) if x == a.root() => {}
            _ => {
                return Err(Error::PathNotInAutomaton(
                    "path must start at the root".into(),
                ))
            }
        }
        let mut value: Pph = 0;
        for w in path.windows(2) {
            let (x, y) = (w[0], w[1]);
            let i = a
                .successors(x)
                .iter()
                .position(|&s| s == y)
                .ok_or_else(|| Error::PathNotInAutomaton(format!("no arc {x}->{y}")))?;
            value += self.increments[x][i];
        }
        Ok(value)
    }

    pub fn encode_word(&self, word: &str) -> Result<Pph> {
        let path = self
            .automaton
            .path_of_word(word)
            .ok_or_else(|| Error::PathNotInAutomaton(format!("no path spells {word:?}")))?;
        self.encode_path(&path)
    }

    /// The full path with index `value`; cost linear in the path length
    /// (times the out-degree scanned at each node).
    pub fn decode(&self, value: u64) -> Result<Vec<NodeId>> {
        let words = self.word_count();
        if value >= words {
            return Err(Error::PathIndexOutOfRange { value, words });
        }
        let a = &self.automaton;
        let mut rest = value;
        let mut x = a.root();
        let mut path = vec![x];
        while x != a.sink() {
            let inc = &self.increments[x];
            let i = match inc.partition_point(|&d| u64::from(d) <= rest) {
                0 => {
                    return Err(Error::Annotation(format!(
                        "node {x} has no arc for remainder {rest}"
                    )))
                }
                k => k - 1,
            };
            rest -= u64::from(inc[i]);
            x = a.successors(x)[i];
            path.push(x);
        }
        if rest != 0 {
            return Err(Error::Annotation(format!(
                "index {value} leaves remainder {rest} at the sink"
            )));
        }
        Ok(path)
    }

    pub fn decode_word(&self, value: u64) -> Result<String> {
        Ok(self.automaton.spell(&self.decode(value)?))
    }

    /// Fault injection for verification tooling: shifts one cached increment.
    #[doc(hidden)]
    pub fn corrupt_increment(&mut self, node: NodeId, position: usize, delta: Pph) {
        self.increments[node][position] = self.increments[node][position].wrapping_add(delta);
    }
}
