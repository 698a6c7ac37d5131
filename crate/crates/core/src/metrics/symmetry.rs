use std::collections::HashMap;
use std::fmt;

use crate::model::Brick;

/// Candidate symmetry maps, all through the vertical line at the prefix AABB centre.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SymmetryMap {
    /// Reflection across the plane `x = cx`.
    MirrorX,
    /// Reflection across the plane `z = cz`.
    MirrorZ,
    /// Half turn about the vertical axis.
    Rotate180,
}

impl SymmetryMap {
    pub const ALL: [SymmetryMap; 3] = [SymmetryMap::MirrorX, SymmetryMap::MirrorZ, SymmetryMap::Rotate180];

    /// Apply to a point in doubled coordinates, given the doubled centre.
    pub fn apply2(self, p: [i64; 3], center: [i64; 3]) -> [i64; 3] {
        let flip = |k: usize| 2 * center[k] - p[k];
        match self {
            SymmetryMap::MirrorX => [flip(0), p[1], p[2]],
            SymmetryMap::MirrorZ => [p[0], p[1], flip(2)],
            SymmetryMap::Rotate180 => [flip(0), p[1], flip(2)],
        }
    }
}

impl fmt::Display for SymmetryMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SymmetryMap::MirrorX => "mirror-x",
            SymmetryMap::MirrorZ => "mirror-z",
            SymmetryMap::Rotate180 => "rotate-180",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryReport {
    pub best_plane: SymmetryMap,
    pub score: f64,
    pub per_plane_scores: Vec<(SymmetryMap, f64)>,
}

/// Fraction of centroids matched one-to-one under the best candidate map.
pub fn symmetry_score(prefix: &[Brick], tau: f64) -> SymmetryReport {
    let per_plane_scores: Vec<(SymmetryMap, f64)> = SymmetryMap::ALL
        .iter()
        .map(|&m| (m, map_score(prefix, tau, m)))
        .collect();
    let (best_plane, score) = per_plane_scores
        .iter()
        .copied()
        .fold((SymmetryMap::MirrorX, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
    SymmetryReport {
        best_plane,
        score: score.max(0.0),
        per_plane_scores,
    }
}

/// Just the maximum score; what the sequencer sums over prefixes.
pub fn symmetry_value(prefix: &[Brick], tau: f64) -> f64 {
    SymmetryMap::ALL
        .iter()
        .map(|&m| map_score(prefix, tau, m))
        .fold(0.0, f64::max)
}

/// Greedy one-to-one matching: each centroid, visited in (class, position)
/// order, takes the nearest unclaimed same-class centroid within `tau` of its
/// image, ties going to the lexicographically smaller centroid. The visiting
/// order makes the score depend only on the set of bricks, not their sequence.
pub fn map_score(prefix: &[Brick], tau: f64, map: SymmetryMap) -> f64 {
    if prefix.is_empty() {
        return 0.0;
    }
    let center = prefix
        .iter()
        .skip(1)
        .fold(prefix[0].aabb, |acc, b| acc.union(&b.aabb))
        .center2();
    let reach = (2.0 * tau).max(0.0);
    let reach_sq = reach * reach;
    let cell = (reach.ceil() as i64).max(1);
    let bucket = |p: [i64; 3]| (p[0].div_euclid(cell), p[1].div_euclid(cell), p[2].div_euclid(cell));

    let centroids: Vec<[i64; 3]> = prefix.iter().map(|b| b.aabb.center2()).collect();
    let mut grid: HashMap<_, Vec<usize>> = HashMap::new();
    for (i, (b, c)) in prefix.iter().zip(&centroids).enumerate() {
        grid.entry((b.class, bucket(*c))).or_default().push(i);
    }
    let mut visit: Vec<usize> = (0..prefix.len()).collect();
    visit.sort_by_key(|&i| (prefix[i].class, centroids[i], i));
    let mut claimed = vec![false; prefix.len()];
    let mut matched = 0usize;
    for &i in &visit {
        let (b, c) = (&prefix[i], &centroids[i]);
        let img = map.apply2(*c, center);
        let (bx, by, bz) = bucket(img);
        let mut best: Option<(i64, [i64; 3], usize)> = None;
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    let Some(list) = grid.get(&(b.class, (bx + dx, by + dy, bz + dz))) else {
                        continue;
                    };
                    for &j in list {
                        if claimed[j] {
                            continue;
                        }
                        let d: i64 = (0..3).map(|k| (centroids[j][k] - img[k]).pow(2)).sum();
                        let key = (d, centroids[j], j);
                        if (d as f64) <= reach_sq && best.is_none_or(|b| key < b) {
                            best = Some(key);
                        }
                    }
                }
            }
        }
        if let Some((_, _, j)) = best {
            claimed[j] = true;
            matched += 1;
        }
    }
    matched as f64 / prefix.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Aabb;

    fn brick(class: u32, min: [i64; 3], size: [i64; 3]) -> Brick {
        Brick {
            class,
            aabb: Aabb {
                min,
                max: [min[0] + size[0], min[1] + size[1], min[2] + size[2]],
            },
        }
    }

    /// Maximum bipartite matching by brute force over assignments.
    fn optimal(prefix: &[Brick], tau: f64, map: SymmetryMap) -> f64 {
        let center = prefix.iter().skip(1).fold(prefix[0].aabb, |a, b| a.union(&b.aabb)).center2();
        let n = prefix.len();
        let ok = |i: usize, j: usize| {
            let img = map.apply2(prefix[i].aabb.center2(), center);
            let c = prefix[j].aabb.center2();
            let d: i64 = (0..3).map(|k| (c[k] - img[k]).pow(2)).sum();
            prefix[i].class == prefix[j].class && (d as f64).sqrt() <= 2.0 * tau
        };
        fn best(i: usize, n: usize, used: &mut Vec<bool>, ok: &dyn Fn(usize, usize) -> bool) -> usize {
            if i == n {
                return 0;
            }
            let mut m = best(i + 1, n, used, ok);
            for j in 0..n {
                if !used[j] && ok(i, j) {
                    used[j] = true;
                    m = m.max(1 + best(i + 1, n, used, ok));
                    used[j] = false;
                }
            }
            m
        }
        best(0, n, &mut vec![false; n], &ok) as f64 / n as f64
    }

    fn mirrored_pair() -> Vec<Brick> {
        // Two 1x2 bricks turned along z, mirrored about x = 0.
        vec![brick(0, [-40, 0, -20], [20, 24, 40]), brick(0, [20, 0, -20], [20, 24, 40])]
    }

    #[test]
    fn mirrored_pair_is_fully_symmetric() {
        let r = symmetry_score(&mirrored_pair(), 1.0);
        assert_eq!(r.score, 1.0);
        assert_eq!(r.best_plane, SymmetryMap::MirrorX);
    }

    #[test]
    fn extra_brick_on_one_side_scores_two_thirds() {
        let mut p = mirrored_pair();
        // 1x1 on top of the right brick, off the z centre line.
        p.push(brick(1, [20, 24, 0], [20, 24, 20]));
        let r = symmetry_score(&p, 1.0);
        for (m, s) in &r.per_plane_scores {
            assert_eq!(*s, optimal(&p, 1.0, *m), "{m}");
        }
        assert!((r.score - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn score_ignores_prefix_order_and_translation() {
        let mut p = mirrored_pair();
        p.push(brick(1, [20, 24, 0], [20, 24, 20]));
        let base = symmetry_score(&p, 1.0);
        p.reverse();
        assert_eq!(symmetry_score(&p, 1.0), base);
        for b in p.iter_mut() {
            for k in 0..3 {
                b.aabb.min[k] += 17 * (k as i64 + 1);
                b.aabb.max[k] += 17 * (k as i64 + 1);
            }
        }
        assert_eq!(symmetry_score(&p, 1.0), base);
    }

    #[test]
    fn single_brick_maps_to_itself() {
        assert_eq!(symmetry_score(&[brick(0, [3, 5, 7], [40, 24, 20])], 1.0).score, 1.0);
    }

    #[test]
    fn class_mismatch_blocks_matching() {
        let mut p = mirrored_pair();
        p[1].class = 7;
        // Still symmetric under MirrorZ since each brick straddles z = 0.
        let r = symmetry_score(&p, 1.0);
        assert_eq!(r.per_plane_scores[0].1, 0.0);
        assert_eq!(r.best_plane, SymmetryMap::MirrorZ);
    }
}
