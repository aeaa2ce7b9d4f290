//! Canonical line keys and enumeration of all lines spanned by a
//! configuration.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::config::{ColoredConfig, Point, PointRef};
use crate::scalar::{Field, Scalar};

/// Representation-independent key of an affine line.
///
/// Over ℚ the direction is the primitive integer vector with positive
/// leading coordinate; over ℚ(i) it is scaled to a leading coordinate of 1.
/// The base point is `p − (⟨p,u⟩/⟨u,u⟩)·u` (Hermitian product), which is the
/// same for every `p` on the line.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LineKey {
    pub direction: Vec<Scalar>,
    pub base: Vec<Scalar>,
}

fn hermitian(a: &[Scalar], b: &[Scalar]) -> Scalar {
    a.iter()
        .zip(b)
        .fold(Scalar::zero(), |acc, (x, y)| acc + x * &y.conj())
}

fn primitive_integer(dir: &[Scalar]) -> Vec<Scalar> {
    let l = dir
        .iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.re().denom()));
    let ints: Vec<BigInt> = dir.iter().map(|v| (v.re() * &l).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    let lead_negative = ints.iter().find(|v| !v.is_zero()).is_some_and(|v| v.is_negative());
    ints.into_iter()
        .map(|v| {
            let v = v / &g;
            Scalar::real(BigRational::from_integer(if lead_negative { -v } else { v }))
        })
        .collect()
}

fn leading_one(dir: &[Scalar]) -> Vec<Scalar> {
    let lead = dir
        .iter()
        .find(|v| !v.is_zero())
        .expect("direction of distinct points is nonzero")
        .clone();
    dir.iter().map(|v| v / &lead).collect()
}

/// Canonical key of the line through two distinct points.
pub fn line_key(field: Field, p: &[Scalar], q: &[Scalar]) -> LineKey {
    let diff: Vec<Scalar> = q.iter().zip(p).map(|(a, b)| a - b).collect();
    let direction = match field {
        Field::Rational => primitive_integer(&diff),
        Field::Gaussian => leading_one(&diff),
    };
    let s = line_parameter(&direction, p);
    let base = p
        .iter()
        .zip(&direction)
        .map(|(x, u)| x - &(&s * u))
        .collect();
    LineKey { direction, base }
}

/// The parameter `s` with `p = base + s·u` for `u` the given direction.
pub fn line_parameter(direction: &[Scalar], p: &[Scalar]) -> Scalar {
    hermitian(p, direction) / hermitian(direction, direction)
}

/// A maximal collinear subset of the configuration (at least two points).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineRecord {
    pub key: LineKey,
    /// Global point indices, ascending.
    pub members: Vec<usize>,
}

impl LineRecord {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn member_refs(&self, config: &ColoredConfig) -> Vec<PointRef> {
        self.members.iter().map(|&g| config.locate(g)).collect()
    }

    pub fn to_json(&self, config: &ColoredConfig) -> Value {
        json!({
            "direction": self.key.direction,
            "base": self.key.base,
            "members": self.member_refs(config).iter()
                .map(|r| json!([r.color, r.index])).collect::<Vec<_>>(),
            "points": self.members.iter().map(|&g| config.point(g)).collect::<Vec<&Point>>(),
        })
    }
}

/// All lines through at least two configuration points, sorted by key.
pub fn enumerate_lines(config: &ColoredConfig) -> Vec<LineRecord> {
    let points = config.points();
    let field = config.field();
    let m = points.len();
    let mut lines: BTreeMap<LineKey, Vec<usize>> = BTreeMap::new();
    // covered[i][j]: pair already placed on a known line
    let mut covered = vec![false; m * m];
    for i in 0..m {
        for j in i + 1..m {
            if covered[i * m + j] {
                continue;
            }
            let key = line_key(field, &points[i], &points[j]);
            let members: Vec<usize> = (0..m)
                .filter(|&k| k == i || k == j || on_line(&key, &points[k]))
                .collect();
            for (a, &u) in members.iter().enumerate() {
                for &v in &members[a + 1..] {
                    covered[u * m + v] = true;
                }
            }
            lines.insert(key, members);
        }
    }
    lines
        .into_iter()
        .map(|(key, members)| LineRecord { key, members })
        .collect()
}

/// Whether `p` lies on the line with the given key.
pub fn on_line(key: &LineKey, p: &[Scalar]) -> bool {
    let s = line_parameter(&key.direction, p);
    p.iter()
        .zip(&key.base)
        .zip(&key.direction)
        .all(|((x, b), u)| *x == b + &(&s * u))
}
