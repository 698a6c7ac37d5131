//! Prefix buildability: every prefix of a build order must be grounded and
//! form a single contact-connected component.
//!
//! Orders hold 0-based placement positions; reported step indices are
//! 1-based prefix lengths.

use serde::Serialize;
use thiserror::Error;

use crate::model::{AssemblyModel, ContactGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Violation {
    FloatingPart,
    DisconnectedComponent,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FeasibilityReport {
    pub feasible: bool,
    /// `(k, reason)` for the shortest failing prefix.
    pub first_violation: Option<(usize, Violation)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StabilityError {
    #[error("order is not a permutation of the {0} parts")]
    NotAPermutation(usize),
    #[error("contact graph has {graph} nodes but the model has {model} parts")]
    SizeMismatch { graph: usize, model: usize },
}

/// Parts whose bottom face lies on the model's ground plane.
pub fn ground_parts(model: &AssemblyModel) -> Vec<bool> {
    let ground = model.ground_level();
    model.world_boxes().iter().map(|b| b.min[1] == ground).collect()
}

struct UnionFind {
    parent: Vec<usize>,
    grounded: Vec<bool>,
}

impl UnionFind {
    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }
}

pub fn prefix_feasible(
    model: &AssemblyModel,
    contacts: &ContactGraph,
    order: &[usize],
) -> Result<FeasibilityReport, StabilityError> {
    let n = model.part_count();
    if contacts.node_count() != n {
        return Err(StabilityError::SizeMismatch {
            graph: contacts.node_count(),
            model: n,
        });
    }
    let mut seen = vec![false; n];
    if order.len() != n || order.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
        return Err(StabilityError::NotAPermutation(n));
    }
    let on_ground = ground_parts(model);
    let mut uf = UnionFind {
        parent: (0..n).collect(),
        grounded: on_ground.clone(),
    };
    let mut placed = vec![false; n];
    let (mut components, mut ungrounded) = (0usize, 0usize);
    for (k, &p) in order.iter().enumerate() {
        placed[p] = true;
        components += 1;
        ungrounded += usize::from(!on_ground[p]);
        for &q in contacts.neighbors(p) {
            if !placed[q] {
                continue;
            }
            let (a, b) = (uf.find(p), uf.find(q));
            if a == b {
                continue;
            }
            let (ga, gb) = (uf.grounded[a], uf.grounded[b]);
            ungrounded -= usize::from(!ga) + usize::from(!gb);
            ungrounded += usize::from(!(ga || gb));
            uf.parent[a] = b;
            uf.grounded[b] = ga || gb;
            components -= 1;
        }
        let reason = if ungrounded > 0 {
            Some(Violation::FloatingPart)
        } else if components > 1 {
            Some(Violation::DisconnectedComponent)
        } else {
            None
        };
        if let Some(r) = reason {
            return Ok(FeasibilityReport {
                feasible: false,
                first_violation: Some((k + 1, r)),
            });
        }
    }
    Ok(FeasibilityReport {
        feasible: true,
        first_violation: None,
    })
}

/// Incremental check used while growing an order one part at a time.
///
/// Given a feasible prefix, appending `p` keeps it feasible iff the prefix is
/// empty and `p` is on the ground, or `p` touches an already placed part.
#[derive(Debug, Clone)]
pub struct PrefixTracker<'a> {
    contacts: &'a ContactGraph,
    on_ground: Vec<bool>,
    placed: Vec<bool>,
    len: usize,
}

impl<'a> PrefixTracker<'a> {
    pub fn new(model: &AssemblyModel, contacts: &'a ContactGraph) -> PrefixTracker<'a> {
        PrefixTracker {
            contacts,
            on_ground: ground_parts(model),
            placed: vec![false; model.part_count()],
            len: 0,
        }
    }

    pub fn can_add(&self, p: usize) -> bool {
        if self.placed[p] {
            return false;
        }
        if self.len == 0 {
            return self.on_ground[p];
        }
        self.contacts.neighbors(p).iter().any(|&q| self.placed[q])
    }

    pub fn add(&mut self, p: usize) {
        debug_assert!(!self.placed[p]);
        self.placed[p] = true;
        self.len += 1;
    }

    pub fn is_placed(&self, p: usize) -> bool {
        self.placed[p]
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{contact_graph, parse_model, ModelFormat};

    fn load(text: &str) -> (AssemblyModel, ContactGraph) {
        let m = parse_model(text, ModelFormat::Native).unwrap();
        let c = contact_graph(&m, 0.5);
        (m, c)
    }

    fn tower() -> (AssemblyModel, ContactGraph) {
        load("part 3005 1 identity 0 0 0\npart 3005 1 identity 0 24 0\npart 3005 1 identity 0 48 0\n")
    }

    /// Two 1x1 piers with a 1x4 deck resting on both, plus a 1x1 on each end
    /// of the deck.
    fn bridge() -> (AssemblyModel, ContactGraph) {
        load(
            "part 3005 1 identity 0 0 0\n\
             part 3005 1 identity 60 0 0\n\
             part 3010 1 identity 30 24 0\n\
             part 3005 1 identity 0 48 0\n\
             part 3005 1 identity 60 48 0\n",
        )
    }

    /// Definition applied literally: for each prefix, search from every
    /// ground part and from the first part separately.
    fn oracle(model: &AssemblyModel, contacts: &ContactGraph, order: &[usize]) -> Option<(usize, Violation)> {
        let ground = ground_parts(model);
        for k in 1..=order.len() {
            let set = &order[..k];
            let reach = |start: usize| {
                let mut seen = vec![start];
                let mut i = 0;
                while i < seen.len() {
                    for &q in contacts.neighbors(seen[i]) {
                        if set.contains(&q) && !seen.contains(&q) {
                            seen.push(q);
                        }
                    }
                    i += 1;
                }
                seen
            };
            if set.iter().any(|&p| !reach(p).iter().any(|&q| ground[q])) {
                return Some((k, Violation::FloatingPart));
            }
            if reach(set[0]).len() != k {
                return Some((k, Violation::DisconnectedComponent));
            }
        }
        None
    }

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for i in 0..=p.len() {
                let mut q = p.clone();
                q.insert(i, n - 1);
                out.push(q);
            }
        }
        out
    }

    #[test]
    fn tower_bottom_up_is_feasible() {
        let (m, c) = tower();
        let r = prefix_feasible(&m, &c, &[0, 1, 2]).unwrap();
        assert!(r.feasible);
        assert_eq!(r.first_violation, None);
    }

    #[test]
    fn tower_top_down_floats_at_first_step() {
        let (m, c) = tower();
        let r = prefix_feasible(&m, &c, &[2, 1, 0]).unwrap();
        assert!(!r.feasible);
        assert_eq!(r.first_violation, Some((1, Violation::FloatingPart)));
    }

    #[test]
    fn bridge_matches_brute_force_on_all_orders() {
        let (m, c) = bridge();
        let mut feasible = 0;
        for order in permutations(5) {
            let r = prefix_feasible(&m, &c, &order).unwrap();
            assert_eq!(r.first_violation, oracle(&m, &c, &order), "{order:?}");
            assert_eq!(r.feasible, r.first_violation.is_none());
            let deck = order.iter().position(|&p| p == 2).unwrap();
            let piers = [0, 1].map(|p| order.iter().position(|&q| q == p).unwrap());
            if deck < piers[0] && deck < piers[1] {
                assert!(!r.feasible, "{order:?}");
            }
            feasible += usize::from(r.feasible);
        }
        // A pier, then the deck, then the other three parts in any order.
        assert_eq!(feasible, 2 * 6);
    }

    #[test]
    fn bridge_on_a_base_plate_has_feasible_orders() {
        let (m, c) = load(
            "part 3034 1 identity 30 0 0\n\
             part 3005 1 identity 0 8 0\n\
             part 3005 1 identity 60 8 0\n\
             part 3010 1 identity 30 32 0\n",
        );
        assert!(prefix_feasible(&m, &c, &[0, 1, 2, 3]).unwrap().feasible);
        for order in permutations(4) {
            let r = prefix_feasible(&m, &c, &order).unwrap();
            assert_eq!(r.first_violation, oracle(&m, &c, &order), "{order:?}");
        }
    }

    #[test]
    fn tracker_agrees_with_full_check() {
        let (m, c) = bridge();
        for order in permutations(5) {
            let mut t = PrefixTracker::new(&m, &c);
            let mut ok = true;
            for &p in &order {
                ok &= t.can_add(p);
                if !ok {
                    break;
                }
                t.add(p);
            }
            assert_eq!(ok, prefix_feasible(&m, &c, &order).unwrap().feasible);
        }
    }

    #[test]
    fn rejects_non_permutations() {
        let (m, c) = tower();
        assert_eq!(
            prefix_feasible(&m, &c, &[0, 0, 1]).unwrap_err(),
            StabilityError::NotAPermutation(3)
        );
        assert!(prefix_feasible(&m, &c, &[0, 1]).is_err());
        assert!(prefix_feasible(&m, &c, &[0, 1, 3]).is_err());
    }
}
