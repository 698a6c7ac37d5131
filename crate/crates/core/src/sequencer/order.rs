use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{SequencerConfig, SequencerError};
use crate::metrics::symmetry_value;
use crate::model::{AssemblyModel, Brick, ContactGraph, PrecedenceGraph};
use crate::stability::{prefix_feasible, PrefixTracker};

/// Swap partners are drawn from this many positions after the first pick.
pub const SWAP_WINDOW: usize = 8;

fn distance(a: &Brick, b: &Brick) -> f64 {
    let (ca, cb) = (a.aabb.center(), b.aabb.center());
    ((ca[0] - cb[0]).powi(2) + (ca[1] - cb[1]).powi(2) + (ca[2] - cb[2]).powi(2)).sqrt()
}

fn locality(bricks: &[Brick], order: &[usize]) -> f64 {
    order.windows(2).map(|w| distance(&bricks[w[0]], &bricks[w[1]])).sum()
}

fn prefix_symmetry(bricks: &[Brick], order: &[usize], len: usize, tau: f64) -> f64 {
    let prefix: Vec<Brick> = order[..len].iter().map(|&i| bricks[i]).collect();
    symmetry_value(&prefix, tau)
}

/// `w_local * sum of centroid hops + sum over prefixes of symmetry`.
pub fn order_cost(model: &AssemblyModel, order: &[usize], config: &SequencerConfig) -> f64 {
    let bricks = model.bricks();
    let sym: f64 = (1..=order.len())
        .map(|k| prefix_symmetry(&bricks, order, k, config.tau_sym))
        .sum();
    config.w_local * locality(&bricks, order) + sym
}

/// Greedy construction followed by seeded pairwise-swap descent.
pub fn order_steps(
    model: &AssemblyModel,
    precedence: &PrecedenceGraph,
    contacts: &ContactGraph,
    config: &SequencerConfig,
) -> Result<Vec<usize>, SequencerError> {
    let n = model.part_count();
    let bricks = model.bricks();
    let mut order = greedy(model, &bricks, precedence, contacts, config)?;
    if n < 2 || config.iters == 0 {
        return Ok(order);
    }

    let mut sym: Vec<f64> = (0..=n)
        .map(|k| if k == 0 { 0.0 } else { prefix_symmetry(&bricks, &order, k, config.tau_sym) })
        .collect();
    let mut cost = config.w_local * locality(&bricks, &order) + sym.iter().sum::<f64>();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut pos = vec![0usize; n];
    for (i, &p) in order.iter().enumerate() {
        pos[p] = i;
    }
    for _ in 0..config.iters {
        let i = rng.random_range(0..n - 1);
        let j = i + 1 + rng.random_range(0..SWAP_WINDOW.min(n - 1 - i));
        let (a, b) = (order[i], order[j]);
        // a moves later to j, b moves earlier to i; everything between stays.
        let topo_ok = precedence.successors(a).iter().all(|&s| pos[s] > j)
            && precedence.predecessors(b).iter().all(|&p| pos[p] < i)
            && !order[i + 1..j]
                .iter()
                .any(|&m| precedence.successors(a).contains(&m) || precedence.predecessors(b).contains(&m));
        if !topo_ok {
            continue;
        }
        order.swap(i, j);
        let feasible = prefix_feasible(model, contacts, &order).is_ok_and(|r| r.feasible);
        if feasible {
            // Only prefixes holding position i but not j change their part set.
            let new_sym: Vec<f64> = (i + 1..=j)
                .map(|k| prefix_symmetry(&bricks, &order, k, config.tau_sym))
                .collect();
            let sym_delta: f64 = new_sym.iter().sum::<f64>() - sym[i + 1..=j].iter().sum::<f64>();
            let new_cost = config.w_local * locality(&bricks, &order) + sym.iter().sum::<f64>() + sym_delta;
            if new_cost < cost - 1e-9 {
                sym[i + 1..=j].copy_from_slice(&new_sym);
                cost = new_cost;
                pos[a] = j;
                pos[b] = i;
                continue;
            }
        }
        order.swap(i, j);
    }
    Ok(order)
}

fn greedy(
    model: &AssemblyModel,
    bricks: &[Brick],
    precedence: &PrecedenceGraph,
    contacts: &ContactGraph,
    config: &SequencerConfig,
) -> Result<Vec<usize>, SequencerError> {
    let n = model.part_count();
    let mut tracker = PrefixTracker::new(model, contacts);
    let mut missing: Vec<usize> = (0..n).map(|p| precedence.predecessors(p).len()).collect();
    let mut order: Vec<usize> = Vec::with_capacity(n);
    let mut prefix: Vec<Brick> = Vec::with_capacity(n);
    while order.len() < n {
        let mut best: Option<(f64, usize)> = None;
        for c in 0..n {
            if missing[c] != 0 || !tracker.can_add(c) {
                continue;
            }
            let hop = order.last().map_or(0.0, |&l| distance(&bricks[l], &bricks[c]));
            prefix.push(bricks[c]);
            let step_cost = config.w_local * hop + symmetry_value(&prefix, config.tau_sym);
            prefix.pop();
            if best.is_none_or(|(bc, _)| step_cost < bc) {
                best = Some((step_cost, c));
            }
        }
        let Some((_, c)) = best else {
            return Err(SequencerError::NoFeasibleOrder { placed: order.len() });
        };
        tracker.add(c);
        missing[c] = usize::MAX;
        for &s in precedence.successors(c) {
            missing[s] -= 1;
        }
        order.push(c);
        prefix.push(bricks[c]);
    }
    Ok(order)
}
