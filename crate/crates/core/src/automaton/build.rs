use std::collections::{BTreeMap, HashMap};

use super::{NodeAutomaton, NodeId, NodeLabel};
use crate::error::Result;
use crate::lexicon::Lexicon;

/// One node per distinct non-empty prefix, plus the root and one sink shared
/// by every word end.
pub fn build_trie(lexicon: &Lexicon) -> Result<NodeAutomaton> {
    let mut labels = vec![NodeLabel::Root];
    let mut children: Vec<BTreeMap<char, NodeId>> = vec![BTreeMap::new()];
    let mut terminal = vec![false];

    for word in lexicon.iter() {
        let mut cur = 0;
        for c in word.chars() {
            cur = match children[cur].get(&c) {
                Some(&next) => next,
                None => {
                    let next = labels.len();
                    labels.push(NodeLabel::Letter(c));
                    children.push(BTreeMap::new());
                    terminal.push(false);
                    children[cur].insert(c, next);
                    next
                }
            };
        }
        terminal[cur] = true;
    }

    let sink = labels.len();
    labels.push(NodeLabel::Sink);
    let mut successors: Vec<Vec<NodeId>> = children
        .iter()
        .zip(&terminal)
        .map(|(ch, &term)| ch.values().copied().chain(term.then_some(sink)).collect())
        .collect();
    successors.push(Vec::new());

    NodeAutomaton::canonicalize(labels, successors)
}

/// Merges nodes bottom-up by `(label, successor list)`.
///
/// For deterministic input (a trie) two nodes end up merged exactly when
/// they carry the same letter and the same right language, so the result is
/// the minimal DAWG.
pub fn minimize(automaton: &NodeAutomaton) -> Result<NodeAutomaton> {
    let n = automaton.node_count();
    let mut canon = vec![usize::MAX; n];
    let mut table: HashMap<(NodeLabel, Vec<NodeId>), NodeId> = HashMap::new();
    let mut labels = Vec::new();
    let mut successors = Vec::new();

    for &x in automaton.topo_order().iter().rev() {
        let mut succ: Vec<NodeId> = Vec::with_capacity(automaton.successors(x).len());
        for &y in automaton.successors(x) {
            let c = canon[y];
            if !succ.contains(&c) {
                succ.push(c);
            }
        }
        let key = (automaton.label(x), succ);
        canon[x] = match table.get(&key) {
            Some(&id) => id,
            None => {
                let id = labels.len();
                labels.push(key.0);
                successors.push(key.1.clone());
                table.insert(key, id);
                id
            }
        };
    }

    NodeAutomaton::canonicalize(labels, successors)
}

pub fn build_dawg(lexicon: &Lexicon) -> Result<NodeAutomaton> {
    minimize(&build_trie(lexicon)?)
}
