//! Letter-labelled node-automata: tries and DAWGs with a common sink.
//!
//! Nodes carry the letters; arcs only route. The root and the sink are
//! structural and unlabelled. Successor lists are kept in canonical order
//! (letters ascending, the arc to the sink last), which fixes the
//! depth-first order of full paths and therefore their path indices.

mod build;
mod format;

use std::collections::HashSet;

use crate::error::{Error, Result};

pub use build::{build_dawg, build_trie, minimize};
pub use format::{ParsedAutomaton, FORMAT_VERSION_LINE};

pub type NodeId = usize;

pub(crate) fn format_annotated(
    a: &NodeAutomaton,
    words: u64,
    suff: &[u64],
    increments: &[Vec<crate::pph::Pph>],
) -> String {
    format::write_text(a, words, Some((suff, increments)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeLabel {
    Root,
    Letter(char),
    Sink,
}

impl NodeLabel {
    pub fn letter(self) -> Option<char> {
        match self {
            NodeLabel::Letter(c) => Some(c),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeAutomaton {
    labels: Vec<NodeLabel>,
    successors: Vec<Vec<NodeId>>,
    root: NodeId,
    sink: NodeId,
    topo: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AutomatonStats {
    pub node_count: usize,
    pub arc_count: usize,
    /// `arc_count / node_count`.
    pub mean_in_degree: f64,
}

impl NodeAutomaton {
    /// Validates the structure and computes a topological index.
    pub fn from_parts(labels: Vec<NodeLabel>, successors: Vec<Vec<NodeId>>) -> Result<Self> {
        let (root, sink) = check_structure(&labels, &successors)?;
        let topo = topological_index(&successors, root)?;
        Ok(NodeAutomaton {
            labels,
            successors,
            root,
            sink,
            topo,
        })
    }

    /// Like [`from_parts`](Self::from_parts) but keeps a caller-supplied
    /// topological index after checking it.
    pub fn with_topo(
        labels: Vec<NodeLabel>,
        successors: Vec<Vec<NodeId>>,
        topo: Vec<usize>,
    ) -> Result<Self> {
        let (root, sink) = check_structure(&labels, &successors)?;
        // Reachability and acyclicity.
        topological_index(&successors, root)?;
        let n = labels.len();
        if topo.len() != n {
            return Err(Error::Structure(format!(
                "{} topo indices for {n} nodes",
                topo.len()
            )));
        }
        let mut seen = vec![false; n];
        for &t in &topo {
            if t >= n || std::mem::replace(&mut seen[t], true) {
                return Err(Error::Structure(
                    "topo indices are not a permutation".into(),
                ));
            }
        }
        for (x, succ) in successors.iter().enumerate() {
            if let Some(&y) = succ.iter().find(|&&y| topo[x] >= topo[y]) {
                return Err(Error::Structure(format!(
                    "arc {x}->{y} violates the topological index"
                )));
            }
        }
        Ok(NodeAutomaton {
            labels,
            successors,
            root,
            sink,
            topo,
        })
    }

    /// Renumbers nodes so that node ids equal topological indices.
    pub(crate) fn canonicalize(
        labels: Vec<NodeLabel>,
        successors: Vec<Vec<NodeId>>,
    ) -> Result<Self> {
        let a = Self::from_parts(labels, successors)?;
        let n = a.labels.len();
        let mut labels = vec![NodeLabel::Root; n];
        let mut successors = vec![Vec::new(); n];
        for x in 0..n {
            labels[a.topo[x]] = a.labels[x];
            successors[a.topo[x]] = a.successors[x].iter().map(|&y| a.topo[y]).collect();
        }
        Ok(NodeAutomaton {
            labels,
            successors,
            root: a.topo[a.root],
            sink: a.topo[a.sink],
            topo: (0..n).collect(),
        })
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn sink(&self) -> NodeId {
        self.sink
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn arc_count(&self) -> usize {
        self.successors.iter().map(Vec::len).sum()
    }

    pub fn label(&self, node: NodeId) -> NodeLabel {
        self.labels[node]
    }

    pub fn successors(&self, node: NodeId) -> &[NodeId] {
        &self.successors[node]
    }

    pub fn topo_index(&self, node: NodeId) -> usize {
        self.topo[node]
    }

    /// Nodes in ascending topological index.
    pub fn topo_order(&self) -> Vec<NodeId> {
        let mut order = vec![0; self.labels.len()];
        for (x, &t) in self.topo.iter().enumerate() {
            order[t] = x;
        }
        order
    }

    /// All arcs as `(src, position in src's successor list, dst)`.
    pub fn arcs(&self) -> impl Iterator<Item = (NodeId, usize, NodeId)> + '_ {
        self.successors
            .iter()
            .enumerate()
            .flat_map(|(x, s)| s.iter().enumerate().map(move |(i, &y)| (x, i, y)))
    }

    /// Predecessor lists, each in ascending source id.
    pub fn predecessors(&self) -> Vec<Vec<NodeId>> {
        let mut preds = vec![Vec::new(); self.labels.len()];
        for (x, _, y) in self.arcs() {
            preds[y].push(x);
        }
        preds
    }

    pub fn stats(&self) -> AutomatonStats {
        let node_count = self.node_count();
        let arc_count = self.arc_count();
        AutomatonStats {
            node_count,
            arc_count,
            mean_in_degree: arc_count as f64 / node_count as f64,
        }
    }

    /// Words spelled by root-to-sink paths, in depth-first completion order.
    pub fn language(&self) -> Vec<String> {
        let mut words = Vec::new();
        let mut prefix = String::new();
        // (node, next successor position)
        let mut stack = vec![(self.root, 0usize)];
        while let Some(&mut (x, ref mut next)) = stack.last_mut() {
            if x == self.sink {
                words.push(prefix.clone());
                stack.pop();
                continue;
            }
            if let Some(&y) = self.successors[x].get(*next) {
                *next += 1;
                if let NodeLabel::Letter(c) = self.labels[y] {
                    prefix.push(c);
                }
                stack.push((y, 0));
            } else {
                stack.pop();
                if let NodeLabel::Letter(_) = self.labels[x] {
                    prefix.pop();
                }
            }
        }
        words
    }

    /// The first root-to-sink path (in depth-first order) spelling `word`.
    pub fn path_of_word(&self, word: &str) -> Option<Vec<NodeId>> {
        let letters: Vec<char> = word.chars().collect();
        let mut path = vec![self.root];
        self.find_path(&letters, &mut path).then_some(path)
    }

    fn find_path(&self, rest: &[char], path: &mut Vec<NodeId>) -> bool {
        let x = *path.last().expect("non-empty path");
        for &y in &self.successors[x] {
            let matched = match (self.labels[y], rest.first()) {
                (NodeLabel::Sink, None) => {
                    path.push(y);
                    return true;
                }
                (NodeLabel::Letter(c), Some(&r)) => c == r,
                _ => false,
            };
            if matched {
                path.push(y);
                if self.find_path(&rest[1..], path) {
                    return true;
                }
                path.pop();
            }
        }
        false
    }

    /// Letters along a path, skipping the structural nodes.
    pub fn spell(&self, path: &[NodeId]) -> String {
        path.iter()
            .filter_map(|&x| self.labels[x].letter())
            .collect()
    }
}

fn check_structure(labels: &[NodeLabel], successors: &[Vec<NodeId>]) -> Result<(NodeId, NodeId)> {
    let n = labels.len();
    if successors.len() != n {
        return Err(Error::Structure(format!(
            "{} successor lists for {n} nodes",
            successors.len()
        )));
    }
    let find_unique = |want: NodeLabel, name: &str| -> Result<NodeId> {
        let mut it = labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == want)
            .map(|(i, _)| i);
        match (it.next(), it.next()) {
            (Some(i), None) => Ok(i),
            (None, _) => Err(Error::Structure(format!("no {name} node"))),
            _ => Err(Error::Structure(format!("more than one {name} node"))),
        }
    };
    let root = find_unique(NodeLabel::Root, "root")?;
    let sink = find_unique(NodeLabel::Sink, "sink")?;

    for (x, succ) in successors.iter().enumerate() {
        if x == sink {
            if !succ.is_empty() {
                return Err(Error::Structure("sink has successors".into()));
            }
            continue;
        }
        if succ.is_empty() {
            return Err(Error::Structure(format!("node {x} has no successors")));
        }
        let mut seen = HashSet::with_capacity(succ.len());
        let mut last_letter: Option<char> = None;
        for (i, &y) in succ.iter().enumerate() {
            if y >= n {
                return Err(Error::Structure(format!(
                    "arc {x}->{y} points outside the automaton"
                )));
            }
            if !seen.insert(y) {
                return Err(Error::Structure(format!("duplicate arc {x}->{y}")));
            }
            match labels[y] {
                NodeLabel::Root => return Err(Error::Structure("arc into the root".into())),
                NodeLabel::Sink if x == root => {
                    return Err(Error::Structure(
                        "root is linked to the sink (empty word)".into(),
                    ))
                }
                NodeLabel::Sink if i + 1 != succ.len() => {
                    return Err(Error::Structure(format!(
                        "arc {x}->sink must be last in the successor list"
                    )))
                }
                NodeLabel::Sink => {}
                NodeLabel::Letter(c) => {
                    if last_letter.is_some_and(|p| p > c) {
                        return Err(Error::Structure(format!(
                            "successors of node {x} are not in ascending letter order"
                        )));
                    }
                    last_letter = Some(c);
                }
            }
        }
    }
    Ok((root, sink))
}

/// Reverse depth-first completion order from `root`, with successors
/// explored in list order: every arc goes from a lower to a higher index,
/// the root gets 0 and the sink `N - 1`.
pub fn topological_index(successors: &[Vec<NodeId>], root: NodeId) -> Result<Vec<usize>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Open,
        Done,
    }
    let n = successors.len();
    let mut mark = vec![Mark::New; n];
    let mut finished = Vec::with_capacity(n);
    let mut stack = vec![(root, 0usize)];
    mark[root] = Mark::Open;
    while let Some(&mut (x, ref mut next)) = stack.last_mut() {
        if let Some(&y) = successors[x].get(*next) {
            *next += 1;
            match mark[y] {
                Mark::New => {
                    mark[y] = Mark::Open;
                    stack.push((y, 0));
                }
                Mark::Open => return Err(Error::Cycle(y)),
                Mark::Done => {}
            }
        } else {
            mark[x] = Mark::Done;
            finished.push(x);
            stack.pop();
        }
    }
    if finished.len() != n {
        let x = mark.iter().position(|&m| m == Mark::New).unwrap_or(0);
        return Err(Error::Structure(format!(
            "node {x} is not reachable from the root"
        )));
    }
    let mut topo = vec![0; n];
    for (pos, &x) in finished.iter().enumerate() {
        topo[x] = n - 1 - pos;
    }
    Ok(topo)
}
