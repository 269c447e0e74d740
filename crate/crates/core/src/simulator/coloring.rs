use serde::Serialize;

use super::PlacementRealization;
use crate::partition::DemandVector;

/// A requested subfile: user `user` wants `W_{file, cached_by}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Node {
    pub user: usize,
    pub file: usize,
    pub cached_by: u32,
}

/// Conflict graph of the requested subfiles of one demand. Two nodes may
/// share a transmission iff they are the same subfile or each one's
/// requester caches the other.
#[derive(Debug, Clone)]
pub struct ConflictGraph {
    pub nodes: Vec<Node>,
    adjacency: Vec<Vec<bool>>,
}

impl ConflictGraph {
    pub fn build(real: &PlacementRealization, d: &DemandVector) -> Self {
        let k = real.users();
        let d = d.files();
        let mut nodes = Vec::new();
        for mask in 1u32..(1 << k) {
            for user in (0..k).filter(|u| mask & (1 << u) != 0) {
                let sub = mask & !(1 << user);
                if real.size(d[user], sub) > 0 {
                    nodes.push(Node { user, file: d[user], cached_by: sub });
                }
            }
        }
        Self::from_nodes(nodes)
    }

    pub fn from_nodes(nodes: Vec<Node>) -> Self {
        let adjacency = nodes
            .iter()
            .map(|u| nodes.iter().map(|v| conflict(u, v)).collect())
            .collect();
        Self { nodes, adjacency }
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency[a][b]
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().flatten().filter(|e| **e).count() / 2
    }

    /// The grouping used by the delivery: node `(k, T)` goes to group `T + k`.
    pub fn group_colors(&self) -> Vec<u32> {
        self.nodes.iter().map(|n| n.cached_by | (1 << n.user)).collect()
    }

    pub fn is_proper(&self, colors: &[u32]) -> bool {
        colors.len() == self.nodes.len()
            && (0..self.nodes.len())
                .all(|a| (a + 1..self.nodes.len()).all(|b| colors[a] != colors[b] || !self.has_edge(a, b)))
    }
}

fn conflict(u: &Node, v: &Node) -> bool {
    let same_subfile = u.file == v.file && u.cached_by == v.cached_by;
    let side_info = v.cached_by & (1 << u.user) != 0 && u.cached_by & (1 << v.user) != 0;
    !same_subfile && !side_info
}

/// Whether the delivery grouping is a proper coloring of the conflict graph.
pub fn coloring_check(real: &PlacementRealization, d: &DemandVector) -> bool {
    let graph = ConflictGraph::build(real, d);
    graph.is_proper(&graph.group_colors())
}
