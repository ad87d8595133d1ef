//! Line-oriented text form of a node-automaton.
//!
//! ```text
//! # lexvit-automaton 1
//! NODES <N> ARCS <A> WORDS <W>
//! node <id> <letter|ROOT|SINK> <topo_index> [<suff>]
//! arc <src> <dst> [<dpph>]
//! ```
//!
//! Node lines come in id order, arc lines grouped by source in successor
//! order. The bracketed columns are present only in the path-index
//! annotated form, and then on every line.

use std::fmt::Write as _;

use super::{NodeAutomaton, NodeId, NodeLabel};
use crate::error::{Error, Result};
use crate::pph::{compute_suff, Pph};

pub const FORMAT_VERSION_LINE: &str = "# lexvit-automaton 1";

/// Result of parsing either form of the text format.
#[derive(Clone, Debug)]
pub struct ParsedAutomaton {
    pub automaton: NodeAutomaton,
    pub words: u64,
    /// Per-node suffix counts, when the file is annotated.
    pub suff: Option<Vec<u64>>,
    /// Per-arc increments in successor order, when the file is annotated.
    pub increments: Option<Vec<Vec<u64>>>,
}

pub(crate) fn write_text(
    a: &NodeAutomaton,
    words: u64,
    annotation: Option<(&[u64], &[Vec<Pph>])>,
) -> String {
    let mut out = String::new();
    out.push_str(FORMAT_VERSION_LINE);
    out.push('\n');
    let _ = writeln!(
        out,
        "NODES {} ARCS {} WORDS {}",
        a.node_count(),
        a.arc_count(),
        words
    );
    for x in 0..a.node_count() {
        let label = match a.label(x) {
            NodeLabel::Root => "ROOT".to_string(),
            NodeLabel::Sink => "SINK".to_string(),
            NodeLabel::Letter(c) => c.to_string(),
        };
        let _ = write!(out, "node {x} {label} {}", a.topo_index(x));
        if let Some((suff, _)) = annotation {
            let _ = write!(out, " {}", suff[x]);
        }
        out.push('\n');
    }
    for x in 0..a.node_count() {
        for (i, &y) in a.successors(x).iter().enumerate() {
            let _ = write!(out, "arc {x} {y}");
            if let Some((_, inc)) = annotation {
                let _ = write!(out, " {}", inc[x][i]);
            }
            out.push('\n');
        }
    }
    out
}

impl NodeAutomaton {
    /// Plain (unannotated) text form.
    pub fn to_text(&self) -> Result<String> {
        let words = compute_suff(self)?[self.root()];
        Ok(write_text(self, words, None))
    }

    pub fn parse(text: &str) -> Result<ParsedAutomaton> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());

        let (no, first) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "empty automaton file"))?;
        if first != FORMAT_VERSION_LINE {
            return Err(Error::parse(
                no,
                format!("expected {FORMAT_VERSION_LINE:?}"),
            ));
        }
        let mut lines = lines.filter(|(_, l)| !l.starts_with('#'));

        let (no, header) = lines
            .next()
            .ok_or_else(|| Error::parse(no, "missing header"))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        let (n, arcs, words) = match h.as_slice() {
            ["NODES", n, "ARCS", a, "WORDS", w] => (
                num::<usize>(no, n)?,
                num::<usize>(no, a)?,
                num::<u64>(no, w)?,
            ),
            _ => return Err(Error::parse(no, "expected `NODES <N> ARCS <A> WORDS <W>`")),
        };

        let mut labels = Vec::with_capacity(n);
        let mut topo = Vec::with_capacity(n);
        let mut suff: Vec<u64> = Vec::new();
        let mut annotated: Option<bool> = None;
        for id in 0..n {
            let (no, line) = lines
                .next()
                .ok_or_else(|| Error::parse(no, "missing node lines"))?;
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() < 4 || f[0] != "node" {
                return Err(Error::parse(
                    no,
                    "expected `node <id> <label> <topo> [<suff>]`",
                ));
            }
            let has_suff = match (f.len(), annotated) {
                (4, None | Some(false)) => false,
                (5, None | Some(true)) => true,
                _ => return Err(Error::parse(no, "inconsistent node line width")),
            };
            annotated = Some(has_suff);
            if num::<usize>(no, f[1])? != id {
                return Err(Error::parse(no, format!("expected node {id}")));
            }
            labels.push(match f[2] {
                "ROOT" => NodeLabel::Root,
                "SINK" => NodeLabel::Sink,
                s => {
                    let mut cs = s.chars();
                    match (cs.next(), cs.next()) {
                        (Some(c), None) => NodeLabel::Letter(c),
                        _ => return Err(Error::parse(no, format!("bad node label {s:?}"))),
                    }
                }
            });
            topo.push(num::<usize>(no, f[3])?);
            if has_suff {
                suff.push(num::<u64>(no, f[4])?);
            }
        }
        let annotated = annotated.unwrap_or(false);

        let mut successors: Vec<Vec<NodeId>> = vec![Vec::new(); n];
        let mut increments: Vec<Vec<u64>> = vec![Vec::new(); n];
        let mut last_src = 0;
        for _ in 0..arcs {
            let (no, line) = lines
                .next()
                .ok_or_else(|| Error::parse(no, "missing arc lines"))?;
            let f: Vec<&str> = line.split_whitespace().collect();
            let width = if annotated { 4 } else { 3 };
            if f.len() != width || f[0] != "arc" {
                return Err(Error::parse(no, "malformed arc line"));
            }
            let (src, dst) = (num::<usize>(no, f[1])?, num::<usize>(no, f[2])?);
            if src >= n || dst >= n {
                return Err(Error::parse(no, "arc endpoint out of range"));
            }
            if src < last_src {
                return Err(Error::parse(no, "arcs must be grouped by ascending source"));
            }
            last_src = src;
            successors[src].push(dst);
            if annotated {
                increments[src].push(num::<u64>(no, f[3])?);
            }
        }
        if let Some((no, _)) = lines.next() {
            return Err(Error::parse(no, "trailing content"));
        }

        let automaton = NodeAutomaton::with_topo(labels, successors, topo)?;
        let counted = compute_suff(&automaton)?[automaton.root()];
        if counted != words {
            return Err(Error::Structure(format!(
                "header declares {words} words but the automaton has {counted} paths"
            )));
        }
        Ok(ParsedAutomaton {
            automaton,
            words,
            suff: annotated.then_some(suff),
            increments: annotated.then_some(increments),
        })
    }
}

fn num<T: std::str::FromStr>(line: usize, s: &str) -> Result<T> {
    s.parse()
        .map_err(|_| Error::parse(line, format!("expected a number, got {s:?}")))
}
