use std::fmt::Write as _;

use crate::go::{Color, GameState, Vertex};

pub type NodeId = usize;

/// Whose turn it is at a node, from the searching agent's point of view.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    /// The root player (the adversary in A-MCTS) moves here.
    SelfNode,
    /// The opponent (the victim in A-MCTS) moves here.
    VictimNode,
    Terminal,
}

/// Moves and priors of an expanded, non-terminal node.
#[derive(Clone, Debug)]
pub struct Expansion {
    pub state: GameState,
    pub moves: Vec<Vertex>,
    /// Prior per entry of `moves`, normalized.
    pub priors: Vec<f64>,
    /// Materialized child per entry of `moves`.
    pub children: Vec<Option<NodeId>>,
}

impl Expansion {
    /// Prior mass of children already present in the tree.
    pub fn explored_prior_mass(&self) -> f64 {
        self.children
            .iter()
            .zip(&self.priors)
            .filter(|(c, _)| c.is_some())
            .map(|(_, p)| p)
            .sum()
    }
}

/// One tree node. A terminal node stands for all of its duplicates: `size`
/// counts every visit that ended there.
#[derive(Clone, Debug)]
pub struct SearchNode {
    pub move_in: Vertex,
    pub parent: Option<NodeId>,
    pub to_move: Color,
    pub kind: NodeKind,
    /// Prior of this node under its parent's policy.
    pub prior: f64,
    /// Subtree size S (duplicate terminal nodes counted).
    pub size: u64,
    /// Sum of V̂ over the subtree, root perspective.
    pub value_sum: f64,
    /// Weighted subtree size S^A.
    pub weighted_size: u64,
    /// Weighted sum of V̂ over the subtree.
    pub weighted_value_sum: f64,
    /// V̂ of this node (root perspective); the game result for terminals.
    pub own_value: f64,
    /// Weight of one copy of this node in the weighted statistics.
    pub weight: u64,
    pub expansion: Option<Expansion>,
}

impl SearchNode {
    /// V̄: average of V̂ over the subtree.
    pub fn mean_value(&self) -> f64 {
        if self.kind == NodeKind::Terminal {
            self.own_value
        } else {
            self.value_sum / self.size as f64
        }
    }

    pub fn is_terminal(&self) -> bool {
        self.kind == NodeKind::Terminal
    }

    pub fn children(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.expansion
            .iter()
            .flat_map(|e| e.children.iter().filter_map(|c| *c))
    }
}

/// Game tree grown by playouts. Node 0 is the root.
#[derive(Clone, Debug)]
pub struct SearchTree {
    pub nodes: Vec<SearchNode>,
    pub root_player: Color,
    /// Evaluator calls made while growing the tree.
    pub evaluations: u64,
}

impl SearchTree {
    pub const ROOT: NodeId = 0;

    pub fn root(&self) -> &SearchNode {
        &self.nodes[0]
    }

    pub fn node(&self, id: NodeId) -> &SearchNode {
        &self.nodes[id]
    }

    /// Number of tree nodes, duplicate terminal nodes counted.
    pub fn node_count(&self) -> u64 {
        self.nodes[0].size
    }

    pub fn push(&mut self, node: SearchNode) -> NodeId {
        self.nodes.push(node);
        self.nodes.len() - 1
    }

    /// Add one copy of the leaf at the end of `path` to every node's
    /// statistics along it.
    pub fn backup(&mut self, path: &[NodeId]) {
        let leaf = *path.last().expect("nonempty path");
        let v = self.nodes[leaf].own_value;
        let w = self.nodes[leaf].weight;
        for &id in path {
            let node = &mut self.nodes[id];
            node.size += 1;
            node.value_sum += v;
            node.weighted_size += w;
            node.weighted_value_sum += w as f64 * v;
        }
    }

    /// Root children as `(move, node)` in legal-move order.
    pub fn root_children(&self) -> Vec<(Vertex, NodeId)> {
        match &self.nodes[0].expansion {
            None => Vec::new(),
            Some(e) => e
                .moves
                .iter()
                .zip(&e.children)
                .filter_map(|(&m, c)| c.map(|c| (m, c)))
                .collect(),
        }
    }

    /// Path of moves from the root to `id`.
    pub fn path_to(&self, mut id: NodeId) -> Vec<Vertex> {
        let mut out = Vec::new();
        while let Some(p) = self.nodes[id].parent {
            out.push(self.nodes[id].move_in);
            id = p;
        }
        out.reverse();
        out
    }

    /// Indented dump: move, kind, S, V̄, prior, S^A, V̄^A.
    pub fn dump(&self, max_depth: usize) -> String {
        let mut out = String::new();
        self.dump_node(0, 0, max_depth, &mut out);
        out
    }

    fn dump_node(&self, id: NodeId, depth: usize, max_depth: usize, out: &mut String) {
        let n = &self.nodes[id];
        let kind = match n.kind {
            NodeKind::SelfNode => "self",
            NodeKind::VictimNode => "victim",
            NodeKind::Terminal => "term",
        };
        let wv = if n.weighted_size > 0 {
            format!("{:+.4}", n.weighted_value_sum / n.weighted_size as f64)
        } else {
            "-".to_string()
        };
        let _ = writeln!(
            out,
            "{:indent$}{} {} S={} V={:+.4} P={:.4} SA={} VA={}",
            "",
            n.move_in,
            kind,
            n.size,
            n.mean_value(),
            n.prior,
            n.weighted_size,
            wv,
            indent = depth * 2
        );
        if depth < max_depth {
            let mut kids: Vec<NodeId> = n.children().collect();
            kids.sort_by(|&a, &b| self.nodes[b].size.cmp(&self.nodes[a].size));
            for c in kids {
                self.dump_node(c, depth + 1, max_depth, out);
            }
        }
    }
}
