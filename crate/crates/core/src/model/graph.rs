//! Contact and precedence graphs.
//!
//! Nodes are 0-based placement positions (part index minus one).

use std::collections::VecDeque;

use super::{AssemblyModel, ModelError};

pub const DEFAULT_CONTACT_EPSILON: f64 = 0.5;

/// Undirected face-contact graph: `a`'s top face meets `b`'s bottom face (or
/// the reverse) within epsilon and their footprints overlap with positive area.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContactGraph {
    edges: Vec<(usize, usize)>,
    neighbors: Vec<Vec<usize>>,
}

impl ContactGraph {
    pub fn from_edges(node_count: usize, mut edges: Vec<(usize, usize)>) -> ContactGraph {
        for e in edges.iter_mut() {
            if e.0 > e.1 {
                *e = (e.1, e.0);
            }
        }
        edges.retain(|(a, b)| a != b);
        edges.sort_unstable();
        edges.dedup();
        let mut neighbors = vec![Vec::new(); node_count];
        for &(a, b) in &edges {
            neighbors[a].push(b);
            neighbors[b].push(a);
        }
        for n in neighbors.iter_mut() {
            n.sort_unstable();
        }
        ContactGraph { edges, neighbors }
    }

    pub fn node_count(&self) -> usize {
        self.neighbors.len()
    }

    /// Sorted `(a, b)` pairs with `a < b`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.neighbors[node]
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.neighbors[a].binary_search(&b).is_ok()
    }
}

pub fn contact_graph(model: &AssemblyModel, epsilon: f64) -> ContactGraph {
    let boxes = model.world_boxes();
    let touches = |top: i64, bottom: i64| ((top - bottom) as f64).abs() <= epsilon;
    // Sweep on x like the interpenetration check; footprints must overlap in x.
    let mut by_x: Vec<usize> = (0..boxes.len()).collect();
    by_x.sort_by_key(|&i| (boxes[i].min[0], i));
    let mut edges = Vec::new();
    for (pos, &i) in by_x.iter().enumerate() {
        for &j in &by_x[pos + 1..] {
            if boxes[j].min[0] >= boxes[i].max[0] {
                break;
            }
            let (a, b) = (&boxes[i], &boxes[j]);
            if a.footprint_overlap(b) > 0 && (touches(a.max[1], b.min[1]) || touches(b.max[1], a.min[1])) {
                edges.push((i, j));
            }
        }
    }
    ContactGraph::from_edges(boxes.len(), edges)
}

/// Directed "must be placed before" graph: `a -> b` when `a` sits directly
/// beneath `b` across a contact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrecedenceGraph {
    edges: Vec<(usize, usize)>,
    preds: Vec<Vec<usize>>,
    succs: Vec<Vec<usize>>,
}

impl PrecedenceGraph {
    /// Build from directed edges; fails with the offending cycle if any.
    pub fn from_edges(node_count: usize, mut edges: Vec<(usize, usize)>) -> Result<PrecedenceGraph, ModelError> {
        edges.sort_unstable();
        edges.dedup();
        let mut preds = vec![Vec::new(); node_count];
        let mut succs = vec![Vec::new(); node_count];
        for &(a, b) in &edges {
            succs[a].push(b);
            preds[b].push(a);
        }
        let g = PrecedenceGraph { edges, preds, succs };
        if let Some(cycle) = g.find_cycle() {
            return Err(ModelError::PrecedenceCycle(cycle.into_iter().map(|i| i + 1).collect()));
        }
        Ok(g)
    }

    pub fn node_count(&self) -> usize {
        self.preds.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn predecessors(&self, node: usize) -> &[usize] {
        &self.preds[node]
    }

    pub fn successors(&self, node: usize) -> &[usize] {
        &self.succs[node]
    }

    /// True when `order` is a permutation respecting every edge.
    pub fn is_topological(&self, order: &[usize]) -> bool {
        let n = self.node_count();
        if order.len() != n {
            return false;
        }
        let mut pos = vec![usize::MAX; n];
        for (i, &p) in order.iter().enumerate() {
            if p >= n || pos[p] != usize::MAX {
                return false;
            }
            pos[p] = i;
        }
        self.edges.iter().all(|&(a, b)| pos[a] < pos[b])
    }

    /// Kahn's algorithm, smallest ready node first.
    pub fn topological_order(&self) -> Vec<usize> {
        let n = self.node_count();
        let mut indeg: Vec<usize> = self.preds.iter().map(Vec::len).collect();
        let mut ready: std::collections::BTreeSet<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut out = Vec::with_capacity(n);
        while let Some(v) = ready.pop_first() {
            out.push(v);
            for &s in &self.succs[v] {
                indeg[s] -= 1;
                if indeg[s] == 0 {
                    ready.insert(s);
                }
            }
        }
        out
    }

    fn find_cycle(&self) -> Option<Vec<usize>> {
        let n = self.node_count();
        let mut indeg: Vec<usize> = self.preds.iter().map(Vec::len).collect();
        let mut queue: VecDeque<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut removed = vec![false; n];
        while let Some(v) = queue.pop_front() {
            removed[v] = true;
            for &s in &self.succs[v] {
                indeg[s] -= 1;
                if indeg[s] == 0 {
                    queue.push_back(s);
                }
            }
        }
        let start = (0..n).find(|&i| !removed[i])?;
        // Every remaining node has a remaining predecessor; walk back until a repeat.
        let mut seen = vec![usize::MAX; n];
        let mut path = Vec::new();
        let mut v = start;
        while seen[v] == usize::MAX {
            seen[v] = path.len();
            path.push(v);
            v = *self.preds[v].iter().find(|&&p| !removed[p]).expect("cycle member has a live predecessor");
        }
        let mut cycle = path[seen[v]..].to_vec();
        cycle.reverse();
        let min_pos = cycle.iter().enumerate().min_by_key(|(_, &x)| x).map(|(i, _)| i).unwrap_or(0);
        cycle.rotate_left(min_pos);
        Some(cycle)
    }
}

pub fn precedence_graph(model: &AssemblyModel, contacts: &ContactGraph) -> Result<PrecedenceGraph, ModelError> {
    let boxes = model.world_boxes();
    let mut edges = Vec::new();
    for &(a, b) in contacts.edges() {
        let (ba, bb) = (&boxes[a], &boxes[b]);
        let gap_ab = (ba.max[1] - bb.min[1]).abs();
        let gap_ba = (bb.max[1] - ba.min[1]).abs();
        // The contact graph already admitted this pair; the nearer face pair
        // decides direction, and an exact tie in both directions is a cycle.
        if gap_ab <= gap_ba {
            edges.push((a, b));
        }
        if gap_ba <= gap_ab {
            edges.push((b, a));
        }
    }
    PrecedenceGraph::from_edges(boxes.len(), edges)
}

#[cfg(test)]
mod tests {
    use super::super::{PartPlacement, PartShape, Rotation};
    use super::*;

    fn model(parts: &[(&str, &str, [i64; 3])]) -> AssemblyModel {
        AssemblyModel::new(
            parts
                .iter()
                .map(|(id, rot, pos)| PartPlacement {
                    index: 0,
                    shape: PartShape::from_dictionary(id).unwrap(),
                    color_id: 1,
                    rotation: rot.parse::<Rotation>().unwrap(),
                    position: *pos,
                    source_step: 1,
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn single_brick_has_no_contacts() {
        let m = model(&[("3005", "identity", [0, 0, 0])]);
        assert!(contact_graph(&m, 0.5).edges().is_empty());
    }

    #[test]
    fn stacked_bricks_share_one_edge_lower_to_upper() {
        let m = model(&[("3005", "identity", [0, 24, 0]), ("3005", "identity", [0, 0, 0])]);
        let c = contact_graph(&m, 0.5);
        assert_eq!(c.edges(), &[(0, 1)]);
        let p = precedence_graph(&m, &c).unwrap();
        assert_eq!(p.edges(), &[(1, 0)]);
        assert_eq!(p.topological_order(), vec![1, 0]);
    }

    #[test]
    fn side_by_side_layer_has_no_precedence() {
        let m = model(&[
            ("3004", "identity", [0, 0, 0]),
            ("3004", "identity", [40, 0, 0]),
            ("3004", "identity", [80, 0, 0]),
            ("3004", "identity", [120, 0, 0]),
        ]);
        let c = contact_graph(&m, 0.5);
        assert!(c.edges().is_empty());
        assert!(precedence_graph(&m, &c).unwrap().edges().is_empty());
    }

    #[test]
    fn crosswise_pyramid_has_eight_beneath_pairs() {
        // Three 1x4 bricks along z, two along x across them, one along z on top.
        let m = model(&[
            ("3010", "ry90", [10, 0, 40]),
            ("3010", "ry90", [30, 0, 40]),
            ("3010", "ry90", [50, 0, 40]),
            ("3010", "identity", [30, 24, 20]),
            ("3010", "identity", [30, 24, 60]),
            ("3010", "ry90", [30, 48, 40]),
        ]);
        let c = contact_graph(&m, 0.5);
        let p = precedence_graph(&m, &c).unwrap();
        let expected = vec![(0, 3), (0, 4), (1, 3), (1, 4), (2, 3), (2, 4), (3, 5), (4, 5)];
        assert_eq!(p.edges(), expected.as_slice());
    }

    #[test]
    fn cycle_is_reported() {
        let err = PrecedenceGraph::from_edges(3, vec![(0, 1), (1, 2), (2, 1)]).unwrap_err();
        assert_eq!(err, ModelError::PrecedenceCycle(vec![2, 3]));
    }

    #[test]
    fn level_pair_forced_into_contact_is_a_cycle() {
        let m = model(&[("3005", "identity", [0, 0, 0]), ("3005", "identity", [20, 0, 0])]);
        let forced = ContactGraph::from_edges(2, vec![(0, 1)]);
        assert_eq!(
            precedence_graph(&m, &forced).unwrap_err(),
            ModelError::PrecedenceCycle(vec![1, 2])
        );
    }

    #[test]
    fn wide_epsilon_can_make_mutual_contacts() {
        // Two plates stacked: with epsilon >= 16 the pair is also "top of upper
        // meets bottom of lower" and the direction becomes ambiguous only on
        // exact ties, which cannot happen here.
        let m = model(&[("3024", "identity", [0, 0, 0]), ("3024", "identity", [0, 8, 0])]);
        let p = precedence_graph(&m, &contact_graph(&m, 20.0)).unwrap();
        assert_eq!(p.edges(), &[(0, 1)]);
    }
}
