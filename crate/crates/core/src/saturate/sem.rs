use std::collections::BTreeSet;
use std::fmt;

use rustc_hash::FxHashMap;

use crate::interp::runtime::{Compiled, Heap, Node, Vid};
use crate::value::Value;

pub(crate) type SemId = u32;

/// A tuple `(e1, .., en, o)` of a graph.
pub(crate) type Tuple = (Box<[SemId]>, SemId);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) enum SemNode {
    Base(Vid),
    /// A pair with at least one functional component.
    Pair(SemId, SemId),
    /// Sorted and free of duplicates.
    Graph(Box<[Tuple]>),
}

/// Elements of the semantic universes: data from `B`, pairs, and graphs of
/// functional values, given as sets of argument/result tuples.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SemValue {
    Base(Value),
    Pair(Box<SemValue>, Box<SemValue>),
    Graph(BTreeSet<(Vec<SemValue>, SemValue)>),
}

impl fmt::Display for SemValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SemValue::Base(v) => write!(f, "{v}"),
            SemValue::Pair(a, b) => write!(f, "({a}, {b})"),
            SemValue::Graph(tuples) => {
                f.write_str("{")?;
                for (i, (args, o)) in tuples.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    f.write_str("(")?;
                    for a in args {
                        write!(f, "{a}, ")?;
                    }
                    write!(f, "{o})")?;
                }
                f.write_str("}")
            }
        }
    }
}

#[derive(Default)]
pub(crate) struct SemStore {
    nodes: Vec<SemNode>,
    index: FxHashMap<SemNode, SemId>,
}

impl SemStore {
    pub fn intern(&mut self, node: SemNode) -> SemId {
        if let Some(&id) = self.index.get(&node) {
            return id;
        }
        let id = self.nodes.len() as SemId;
        self.nodes.push(node.clone());
        self.index.insert(node, id);
        id
    }

    pub fn node(&self, id: SemId) -> &SemNode {
        &self.nodes[id as usize]
    }

    pub fn base(&mut self, v: Vid) -> SemId {
        self.intern(SemNode::Base(v))
    }

    /// Pairs of data are data.
    pub fn pair(&mut self, heap: &mut Heap, a: SemId, b: SemId) -> SemId {
        match (self.node(a), self.node(b)) {
            (SemNode::Base(x), SemNode::Base(y)) => {
                let v = heap.intern(Node::Pair(*x, *y));
                self.base(v)
            }
            _ => self.intern(SemNode::Pair(a, b)),
        }
    }

    pub fn graph(&mut self, mut tuples: Vec<Tuple>) -> SemId {
        tuples.sort();
        tuples.dedup();
        self.intern(SemNode::Graph(tuples.into()))
    }

    pub fn tuples(&self, id: SemId) -> &[Tuple] {
        match self.node(id) {
            SemNode::Graph(t) => t,
            _ => &[],
        }
    }

    pub fn as_base(&self, id: SemId) -> Option<Vid> {
        match self.node(id) {
            SemNode::Base(v) => Some(*v),
            _ => None,
        }
    }

    pub fn export(&self, prog: &Compiled, heap: &Heap, id: SemId) -> SemValue {
        match self.node(id) {
            SemNode::Base(v) => SemValue::Base(prog.export(heap, *v)),
            SemNode::Pair(a, b) => SemValue::Pair(
                Box::new(self.export(prog, heap, *a)),
                Box::new(self.export(prog, heap, *b)),
            ),
            SemNode::Graph(tuples) => SemValue::Graph(
                tuples
                    .iter()
                    .map(|(args, o)| {
                        (
                            args.iter().map(|&a| self.export(prog, heap, a)).collect(),
                            self.export(prog, heap, *o),
                        )
                    })
                    .collect(),
            ),
        }
    }
}

/// `small ⊆ large` for sorted tuple lists.
pub(crate) fn is_subset(small: &[Tuple], large: &[Tuple]) -> bool {
    let mut it = large.iter();
    small.iter().all(|t| it.by_ref().any(|u| u == t))
}
