use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use super::{SequencerConfig, SequencerError};
use crate::metrics::{confusability, distinctness_score, symmetry_value, ViewpointSet};
use crate::model::{AssemblyModel, Brick};

/// The boundary predicate that rejected a candidate phase start.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    /// Too few steps remain after the minimum bootstrap.
    BootstrapLength,
    Symmetry,
    Distinctness,
    Confusability,
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Constraint::BootstrapLength => "bootstrap length",
            Constraint::Symmetry => "symmetry",
            Constraint::Distinctness => "distinctness",
            Constraint::Confusability => "confusability",
        })
    }
}

/// Where farthest-first partitioning got stuck.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Stuck {
    pub step: usize,
    pub constraint: Constraint,
}

/// Earliest valid first boundary at or after `b_min + 1`, then greedily the
/// farthest valid boundary within `t_max` of the previous one until the final
/// phase reaches `n`.
///
/// `unary(b)` judges the prefix before step `b`; `pair(prev, b)` judges the
/// transition between consecutive phase starts.
pub fn farthest_first(
    n: usize,
    t_max: usize,
    b_min: usize,
    mut unary: impl FnMut(usize) -> Result<(), Constraint>,
    mut pair: impl FnMut(usize, usize) -> Result<(), Constraint>,
) -> Result<Vec<usize>, Stuck> {
    assert!(t_max >= 1);
    let lo = (b_min + 1).max(2);
    if lo > n {
        return Err(Stuck {
            step: n,
            constraint: Constraint::BootstrapLength,
        });
    }
    let mut first_failure = None;
    let mut b1 = None;
    for b in lo..=n {
        match unary(b) {
            Ok(()) => {
                b1 = Some(b);
                break;
            }
            Err(c) => {
                first_failure.get_or_insert(c);
            }
        }
    }
    let Some(b1) = b1 else {
        return Err(Stuck {
            step: lo,
            constraint: first_failure.unwrap_or(Constraint::BootstrapLength),
        });
    };
    let mut boundaries = vec![b1];
    let mut prev = b1;
    while n - prev + 1 > t_max {
        let mut farthest_failure = None;
        let mut next = None;
        for b in (prev + 1..=prev + t_max).rev() {
            match unary(b).and_then(|()| pair(prev, b)) {
                Ok(()) => {
                    next = Some(b);
                    break;
                }
                Err(c) => {
                    farthest_failure.get_or_insert(c);
                }
            }
        }
        match next {
            Some(b) => {
                boundaries.push(b);
                prev = b;
            }
            None => {
                return Err(Stuck {
                    step: prev,
                    constraint: farthest_failure.expect("t_max >= 1 gives a candidate"),
                })
            }
        }
    }
    Ok(boundaries)
}

/// Scores of the prefix a phase's target is built from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseScores {
    pub start_step: usize,
    pub symmetry: f64,
    pub distinctness: f64,
    /// Against the previous phase's prefix; absent for the first phase.
    pub confusability: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderedPlanDraft {
    /// 0-based placement positions in build order.
    pub order: Vec<usize>,
    /// Last ground-plane step, `boundaries[0] - 1`.
    pub bootstrap_end: usize,
    /// Ascending 1-based phase start steps.
    pub boundaries: Vec<usize>,
    pub phase_scores: Vec<PhaseScores>,
}

impl OrderedPlanDraft {
    /// `(start, end)` of every model-target phase.
    pub fn phases(&self) -> Vec<(usize, usize)> {
        phase_ranges(&self.boundaries, self.order.len())
    }
}

pub fn phase_ranges(boundaries: &[usize], n: usize) -> Vec<(usize, usize)> {
    boundaries
        .iter()
        .enumerate()
        .map(|(i, &s)| (s, boundaries.get(i + 1).map_or(n, |&next| next - 1)))
        .collect()
}

/// Phases longer than `t_max` steps, as `(start, end)`.
pub fn phase_length_violations(boundaries: &[usize], n: usize, t_max: usize) -> Vec<(usize, usize)> {
    phase_ranges(boundaries, n)
        .into_iter()
        .filter(|(s, e)| e + 1 - s > t_max)
        .collect()
}

struct PrefixScorer<'a> {
    bricks: Vec<Brick>,
    config: &'a SequencerConfig,
    views: ViewpointSet,
    unary: HashMap<usize, (f64, f64)>,
    pairs: HashMap<(usize, usize), f64>,
}

impl PrefixScorer<'_> {
    fn prefix(&self, len: usize) -> &[Brick] {
        &self.bricks[..len]
    }

    /// (symmetry, distinctness) of the first `len` parts.
    fn unary(&mut self, len: usize) -> (f64, f64) {
        if let Some(&v) = self.unary.get(&len) {
            return v;
        }
        let p = self.prefix(len);
        let v = (
            symmetry_value(p, self.config.tau_sym),
            distinctness_score(p, &self.views, self.config.resolution),
        );
        self.unary.insert(len, v);
        v
    }

    fn pair(&mut self, a: usize, b: usize) -> f64 {
        if let Some(&v) = self.pairs.get(&(a, b)) {
            return v;
        }
        let v = confusability(self.prefix(a), self.prefix(b), &self.views, self.config.resolution);
        self.pairs.insert((a, b), v);
        v
    }

    fn check_unary(&mut self, b: usize) -> Result<(), Constraint> {
        let (sym, dist) = self.unary(b - 1);
        if sym > self.config.theta_sym {
            Err(Constraint::Symmetry)
        } else if dist < self.config.theta_dist {
            Err(Constraint::Distinctness)
        } else {
            Ok(())
        }
    }
}

/// Place the bootstrap end and phase boundaries for a feasible order.
pub fn partition_phases(
    model: &AssemblyModel,
    order: &[usize],
    config: &SequencerConfig,
) -> Result<OrderedPlanDraft, SequencerError> {
    config.validate()?;
    let n = order.len();
    let scorer = std::cell::RefCell::new(PrefixScorer {
        bricks: model.bricks_in_order(order),
        config,
        views: ViewpointSet::default(),
        unary: HashMap::new(),
        pairs: HashMap::new(),
    });
    let boundaries = farthest_first(
        n,
        config.t_max,
        config.b_min,
        |b| scorer.borrow_mut().check_unary(b),
        |prev, b| {
            if scorer.borrow_mut().pair(prev - 1, b - 1) > config.theta_conf {
                Err(Constraint::Confusability)
            } else {
                Ok(())
            }
        },
    )
    .map_err(|s| SequencerError::Unplannable {
        step: s.step,
        constraint: s.constraint,
    })?;
    let mut scorer = scorer.into_inner();
    let phase_scores = boundaries
        .iter()
        .enumerate()
        .map(|(i, &b)| {
            let (symmetry, distinctness) = scorer.unary(b - 1);
            PhaseScores {
                start_step: b,
                symmetry,
                distinctness,
                confusability: (i > 0).then(|| scorer.pair(boundaries[i - 1] - 1, b - 1)),
            }
        })
        .collect();
    Ok(OrderedPlanDraft {
        order: order.to_vec(),
        bootstrap_end: boundaries[0] - 1,
        boundaries,
        phase_scores,
    })
}
