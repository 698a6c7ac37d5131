//! The 24-element group of axis-aligned rotations.
//!
//! Every member is a signed permutation matrix with determinant +1. Members are
//! named by the shortest product of `r{x,y,z}{90,180,270}` tokens that produces
//! them (ties broken lexicographically), with `identity` for the neutral element.
//! A token string composes left to right as a matrix product, so `rx90ry90`
//! is `Rx(90) * Ry(90)`.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Row-major 3x3 integer matrix acting on column vectors.
pub type Mat3i = [[i64; 3]; 3];

const IDENTITY: Mat3i = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rotation(u8);

struct Group {
    matrices: Vec<Mat3i>,
    names: Vec<String>,
}

fn mul(a: &Mat3i, b: &Mat3i) -> Mat3i {
    let mut out = [[0; 3]; 3];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, cell) in row.iter_mut().enumerate() {
            *cell = (0..3).map(|k| a[r][k] * b[k][c]).sum();
        }
    }
    out
}

fn det(m: &Mat3i) -> i64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn axis_quarter(axis: char) -> Mat3i {
    match axis {
        'x' => [[1, 0, 0], [0, 0, -1], [0, 1, 0]],
        'y' => [[0, 0, 1], [0, 1, 0], [-1, 0, 0]],
        'z' => [[0, -1, 0], [1, 0, 0], [0, 0, 1]],
        _ => unreachable!("axis must be x, y or z"),
    }
}

fn token_matrix(axis: char, quarters: u32) -> Mat3i {
    let q = axis_quarter(axis);
    (0..quarters).fold(IDENTITY, |acc, _| mul(&acc, &q))
}

const TOKENS: [(&str, char, u32); 9] = [
    ("rx90", 'x', 1),
    ("rx180", 'x', 2),
    ("rx270", 'x', 3),
    ("ry90", 'y', 1),
    ("ry180", 'y', 2),
    ("ry270", 'y', 3),
    ("rz90", 'z', 1),
    ("rz180", 'z', 2),
    ("rz270", 'z', 3),
];

fn group() -> &'static Group {
    static GROUP: OnceLock<Group> = OnceLock::new();
    GROUP.get_or_init(|| {
        // Enumerate signed permutation matrices with det +1 in a fixed order.
        let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let mut matrices = Vec::with_capacity(24);
        for p in perms {
            for signs in 0..8u8 {
                let mut m = [[0i64; 3]; 3];
                for r in 0..3 {
                    m[r][p[r]] = if signs & (1 << r) != 0 { -1 } else { 1 };
                }
                if det(&m) == 1 {
                    matrices.push(m);
                }
            }
        }
        debug_assert_eq!(matrices.len(), 24);

        let mut names: Vec<Option<String>> = vec![None; matrices.len()];
        let idx = |m: &Mat3i| matrices.iter().position(|x| x == m).expect("closed group");
        names[idx(&IDENTITY)] = Some("identity".to_string());
        let tokens: Vec<(String, Mat3i)> = TOKENS
            .iter()
            .map(|(n, a, q)| (n.to_string(), token_matrix(*a, *q)))
            .collect();
        let mut frontier: Vec<(String, Mat3i)> = tokens.clone();
        while names.iter().any(Option::is_none) {
            let mut level: Vec<(String, Mat3i)> = frontier.clone();
            level.sort_by(|a, b| a.0.cmp(&b.0));
            for (name, m) in &level {
                let slot = &mut names[idx(m)];
                if slot.is_none() {
                    *slot = Some(name.clone());
                }
            }
            frontier = level
                .iter()
                .flat_map(|(n, m)| tokens.iter().map(move |(tn, tm)| (format!("{n}{tn}"), mul(m, tm))))
                .collect();
        }
        Group {
            matrices,
            names: names.into_iter().map(|n| n.expect("named")).collect(),
        }
    })
}

impl Rotation {
    pub const IDENTITY: Rotation = Rotation(0);

    /// All 24 members in a fixed order.
    pub fn all() -> impl Iterator<Item = Rotation> {
        (0..24u8).map(Rotation)
    }

    pub fn matrix(self) -> Mat3i {
        group().matrices[self.0 as usize]
    }

    pub fn name(self) -> &'static str {
        &group().names[self.0 as usize]
    }

    pub fn from_matrix(m: &Mat3i) -> Option<Rotation> {
        group()
            .matrices
            .iter()
            .position(|x| x == m)
            .map(|i| Rotation(i as u8))
    }

    /// Snap a floating-point matrix onto the group; `None` when any entry is
    /// further than `tol` from the nearest member.
    pub fn from_f64(m: &[[f64; 3]; 3], tol: f64) -> Option<Rotation> {
        let mut snapped = [[0i64; 3]; 3];
        for r in 0..3 {
            for c in 0..3 {
                let v = m[r][c].round();
                if (m[r][c] - v).abs() > tol || v.abs() > 1.0 {
                    return None;
                }
                snapped[r][c] = v as i64;
            }
        }
        Rotation::from_matrix(&snapped)
    }

    pub fn compose(self, other: Rotation) -> Rotation {
        Rotation::from_matrix(&mul(&self.matrix(), &other.matrix())).expect("group is closed")
    }

    pub fn apply(self, v: [i64; 3]) -> [i64; 3] {
        let m = self.matrix();
        [
            m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
            m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
        ]
    }
}

impl Default for Rotation {
    fn default() -> Self {
        Rotation::IDENTITY
    }
}

impl fmt::Display for Rotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown rotation `{0}`")]
pub struct UnknownRotation(pub String);

impl FromStr for Rotation {
    type Err = UnknownRotation;

    /// Accepts `identity` or any non-empty concatenation of rotation tokens.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "identity" {
            return Ok(Rotation::IDENTITY);
        }
        if s.is_empty() {
            return Err(UnknownRotation(s.to_string()));
        }
        let mut rest = s;
        let mut acc = IDENTITY;
        while !rest.is_empty() {
            // Longest token first so `rx270` is not read as `rx27` + garbage.
            let tok = TOKENS
                .iter()
                .filter(|(n, _, _)| rest.starts_with(n))
                .max_by_key(|(n, _, _)| n.len())
                .ok_or_else(|| UnknownRotation(s.to_string()))?;
            acc = mul(&acc, &token_matrix(tok.1, tok.2));
            rest = &rest[tok.0.len()..];
        }
        Ok(Rotation::from_matrix(&acc).expect("group is closed"))
    }
}

impl Serialize for Rotation {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Rotation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
