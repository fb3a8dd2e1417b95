//! Message-passing graphs and their compiled branch lists.
//!
//! The MPG for a target bit is a full binary tree whose leaves are the n
//! channel outputs and whose internal nodes are binary check and equality
//! operations. Each node carries a branch list describing the classical-quantum
//! state of its data qubit: for every pattern `s` of the check ancillas below
//! it, the data qubit is `|x, angle⟩` with probability `prob`.

use std::fmt::{self, Write as _};

use crate::codes::{BinaryLinearCode, TannerGraph};
use crate::error::{BpqmError, Result};

/// Cosines are kept this far away from ±1 before taking `acos`.
pub const COS_CLAMP: f64 = 1e-12;

/// Largest check-list length compiled into explicit branch lists.
pub const MAX_CHECK_LIST: usize = 24;

#[inline]
pub fn clamp_cos(c: f64) -> f64 {
    c.clamp(-1.0 + COS_CLAMP, 1.0 - COS_CLAMP)
}

/// Angle of the equality-node combination: `arccos(cos φ1 · cos φ2)`.
pub fn angle_ostar(phi1: f64, phi2: f64) -> f64 {
    clamp_cos(phi1.cos() * phi2.cos()).acos()
}

/// Cosine form of [`angle_boxstar`]: `(c1 + (−1)^l c2) / (1 + (−1)^l c1 c2)`.
pub fn cos_boxstar(c1: f64, c2: f64, l: u8) -> f64 {
    let (c1, c2) = (clamp_cos(c1), clamp_cos(c2));
    let sgn = if l & 1 == 0 { 1.0 } else { -1.0 };
    clamp_cos((c1 + sgn * c2) / (1.0 + sgn * c1 * c2))
}

/// Angle of the check-node combination on outcome `l`.
pub fn angle_boxstar(phi1: f64, phi2: f64, l: u8) -> f64 {
    cos_boxstar(phi1.cos(), phi2.cos(), l).acos()
}

/// Probability of check outcome `l`: `(1 + (−1)^l cos φ1 cos φ2) / 2`.
pub fn prob_boxstar(phi1: f64, phi2: f64, l: u8) -> f64 {
    let sgn = if l & 1 == 0 { 1.0 } else { -1.0 };
    0.5 * (1.0 + sgn * phi1.cos() * phi2.cos())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    /// Channel output of code bit `leaf` (0-based).
    Channel {
        leaf: usize,
    },
    Check,
    Equality,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MpgNode {
    /// Post-order name 1..n−1 for internal nodes, 0 for leaves.
    pub id: usize,
    pub kind: NodeKind,
    /// (first, second) child as arena indices; `None` for leaves.
    pub children: Option<(usize, usize)>,
    /// Smallest channel leaf in the subtree.
    pub min_leaf: usize,
    /// Qubit carrying this node's data: the data qubit of the first child.
    pub data: usize,
}

impl MpgNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_none()
    }

    pub fn data_qubit(&self) -> usize {
        self.data
    }
}

/// A message-passing graph stored as an arena in post-order: children always
/// precede their parent and the root is the last node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mpg {
    pub nodes: Vec<MpgNode>,
    /// Target bit, 0-based.
    pub target: usize,
    /// Number of channel leaves.
    pub n: usize,
}

enum Tmp {
    Leaf(usize),
    Node(NodeKind, Box<Tmp>, Box<Tmp>, usize, usize),
}

impl Tmp {
    fn key(&self) -> usize {
        match self {
            Tmp::Leaf(l) => *l,
            Tmp::Node(_, _, _, k, _) => *k,
        }
    }

    fn data(&self) -> usize {
        match self {
            Tmp::Leaf(l) => *l,
            Tmp::Node(_, _, _, _, d) => *d,
        }
    }

    /// The input holding the larger leaves comes first and keeps the data.
    fn join(kind: NodeKind, a: Tmp, b: Tmp) -> Tmp {
        let (a, b) = if a.key() > b.key() { (a, b) } else { (b, a) };
        let (key, data) = (b.key(), a.data());
        Tmp::Node(kind, Box::new(a), Box::new(b), key, data)
    }
}

/// Binary reduction of a node with several inputs: the two inputs with the
/// largest smallest-leaf index are merged first, repeatedly.
fn reduce(kind: NodeKind, mut inputs: Vec<Tmp>) -> Tmp {
    debug_assert!(!inputs.is_empty());
    while inputs.len() > 1 {
        inputs.sort_by_key(Tmp::key);
        let b = inputs.pop().unwrap();
        let a = inputs.pop().unwrap();
        inputs.push(Tmp::join(kind, a, b));
    }
    inputs.pop().unwrap()
}

struct Builder<'a> {
    g: &'a TannerGraph,
}

impl Builder<'_> {
    fn variable(&self, v: usize, parent: Option<usize>) -> Result<Tmp> {
        let mut inputs = Vec::new();
        if v < self.g.n {
            inputs.push(Tmp::Leaf(v));
        }
        for &c in &self.g.var_checks[v] {
            if Some(c) != parent {
                inputs.push(self.check(c, v)?);
            }
        }
        if inputs.is_empty() {
            return Err(BpqmError::InvalidArgument(format!("auxiliary variable {} has no incoming messages", v + 1)));
        }
        Ok(reduce(NodeKind::Equality, inputs))
    }

    fn check(&self, c: usize, parent: usize) -> Result<Tmp> {
        let inputs = self.g.checks[c]
            .iter()
            .filter(|&&u| u != parent)
            .map(|&u| self.variable(u, Some(c)))
            .collect::<Result<Vec<_>>>()?;
        if inputs.is_empty() {
            return Err(BpqmError::InvalidArgument(format!("check {} involves a single variable", c + 1)));
        }
        Ok(reduce(NodeKind::Check, inputs))
    }
}

fn flatten(t: Tmp, nodes: &mut Vec<MpgNode>, next_id: &mut usize) -> usize {
    match t {
        Tmp::Leaf(l) => {
            nodes.push(MpgNode { id: 0, kind: NodeKind::Channel { leaf: l }, children: None, min_leaf: l, data: l });
            nodes.len() - 1
        }
        Tmp::Node(kind, a, b, key, data) => {
            let ia = flatten(*a, nodes, next_id);
            let ib = flatten(*b, nodes, next_id);
            nodes.push(MpgNode { id: *next_id, kind, children: Some((ia, ib)), min_leaf: key, data });
            *next_id += 1;
            nodes.len() - 1
        }
    }
}

/// Build the MPG of code bit `r` (1-based) from the code's tree factor graph.
pub fn build_mpg(code: &BinaryLinearCode, r: usize) -> Result<Mpg> {
    let g = code.factor_graph();
    build_mpg_on(&g, r)
}

/// Build an MPG directly on a tree-shaped factor graph.
pub fn build_mpg_on(g: &TannerGraph, r: usize) -> Result<Mpg> {
    if r == 0 || r > g.n {
        return Err(BpqmError::BitOutOfRange { index: r, n: g.n });
    }
    if !g.is_tree() {
        return Err(BpqmError::NotTree);
    }
    let tree = Builder { g }.variable(r - 1, None)?;
    let mut nodes = Vec::with_capacity(2 * g.n - 1);
    let mut next_id = 1;
    flatten(tree, &mut nodes, &mut next_id);
    Ok(Mpg { nodes, target: r - 1, n: g.n })
}

impl Mpg {
    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn count(&self, kind: NodeKind) -> usize {
        self.nodes.iter().filter(|n| n.kind == kind).count()
    }

    pub fn num_checks(&self) -> usize {
        self.count(NodeKind::Check)
    }

    pub fn num_equalities(&self) -> usize {
        self.count(NodeKind::Equality)
    }

    /// Indented text rendering, root first.
    pub fn render(&self, thetas: Option<&[f64]>) -> String {
        let mut out = String::new();
        self.render_node(self.root(), 0, thetas, &mut out);
        out
    }

    fn render_node(&self, i: usize, depth: usize, thetas: Option<&[f64]>, out: &mut String) {
        let node = &self.nodes[i];
        let pad = "  ".repeat(depth);
        let root = if i == self.root() { " (root)" } else { "" };
        match node.kind {
            NodeKind::Channel { leaf } => {
                let _ = match thetas {
                    Some(t) => writeln!(out, "{pad}W{} theta={:.6}{root}", leaf + 1, t[leaf]),
                    None => writeln!(out, "{pad}W{}{root}", leaf + 1),
                };
            }
            NodeKind::Check => {
                let _ = writeln!(out, "{pad}[+] node {}{root}", node.id);
            }
            NodeKind::Equality => {
                let _ = writeln!(out, "{pad}[=] node {}{root}", node.id);
            }
        }
        if let Some((a, b)) = node.children {
            self.render_node(a, depth + 1, thetas, out);
            self.render_node(b, depth + 1, thetas, out);
        }
    }
}

impl fmt::Display for Mpg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(None))
    }
}

/// One element of a branch list. Bit `j` of `s` is the outcome of the check
/// at position `j` of the node's check list; `s` always equals the entry's
/// index in the list.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BranchEntry {
    pub s: u64,
    pub angle: f64,
    pub prob: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompiledMpg {
    pub mpg: Mpg,
    pub thetas: Vec<f64>,
    /// Per node: ids of the check nodes preceding it, in list order.
    pub check_lists: Vec<Vec<usize>>,
    /// Per node: its branch list.
    pub branches: Vec<Vec<BranchEntry>>,
}

impl CompiledMpg {
    pub fn root_branches(&self) -> &[BranchEntry] {
        &self.branches[self.mpg.root()]
    }

    pub fn root_check_list(&self) -> &[usize] {
        &self.check_lists[self.mpg.root()]
    }
}

/// Fill in check lists and branch lists for all nodes, given per-leaf angles.
pub fn compile_lists(mpg: &Mpg, thetas: &[f64]) -> Result<CompiledMpg> {
    if thetas.len() != mpg.n {
        return Err(BpqmError::InvalidArgument(format!("{} angles supplied for {} channels", thetas.len(), mpg.n)));
    }
    if let Some(t) = thetas.iter().find(|t| !(**t > 0.0 && **t < std::f64::consts::PI)) {
        return Err(BpqmError::InvalidArgument(format!("channel angle {t} outside (0, π)")));
    }
    let checks = mpg.num_checks();
    if checks > MAX_CHECK_LIST {
        return Err(BpqmError::Guard { what: "check nodes", value: checks, limit: MAX_CHECK_LIST });
    }
    let mut check_lists: Vec<Vec<usize>> = Vec::with_capacity(mpg.nodes.len());
    let mut branches: Vec<Vec<BranchEntry>> = Vec::with_capacity(mpg.nodes.len());
    for node in &mpg.nodes {
        let (list, entries) = match (node.kind, node.children) {
            (NodeKind::Channel { leaf }, _) => (Vec::new(), vec![BranchEntry { s: 0, angle: thetas[leaf], prob: 1.0 }]),
            (NodeKind::Equality, Some((a, b))) => {
                let m = check_lists[a].len();
                let list = [check_lists[a].as_slice(), check_lists[b].as_slice()].concat();
                let mut out = Vec::with_capacity(branches[a].len() * branches[b].len());
                for e2 in &branches[b] {
                    for e1 in &branches[a] {
                        out.push(BranchEntry {
                            s: e1.s | (e2.s << m),
                            angle: angle_ostar(e1.angle, e2.angle),
                            prob: e1.prob * e2.prob,
                        });
                    }
                }
                (list, out)
            }
            (NodeKind::Check, Some((a, b))) => {
                let m = check_lists[a].len();
                let list = [&[node.id][..], &check_lists[a], &check_lists[b]].concat();
                let mut out = Vec::with_capacity(2 * branches[a].len() * branches[b].len());
                for e2 in &branches[b] {
                    for e1 in &branches[a] {
                        for l in 0..2u8 {
                            out.push(BranchEntry {
                                s: l as u64 | (e1.s << 1) | (e2.s << (m + 1)),
                                angle: angle_boxstar(e1.angle, e2.angle, l),
                                prob: e1.prob * e2.prob * prob_boxstar(e1.angle, e2.angle, l),
                            });
                        }
                    }
                }
                (list, out)
            }
            _ => unreachable!("internal MPG nodes always have two children"),
        };
        check_lists.push(list);
        branches.push(entries);
    }
    Ok(CompiledMpg { mpg: mpg.clone(), thetas: thetas.to_vec(), check_lists, branches })
}
