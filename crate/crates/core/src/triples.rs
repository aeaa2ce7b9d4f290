//! Triple systems over `[r]`: `r² − r` ordered triples of distinct elements,
//! each element in exactly `3(r − 1)` triples, each pair in at most 6.
//!
//! The construction takes an idempotent Latin square `L` of order `r`
//! (`L(i,i) = i`) and emits `(i, j, L(i,j))` for every `i ≠ j`. Idempotence
//! makes `L(i,j)` differ from both `i` and `j`. Each element then appears
//! `r − 1` times in each of the three positions, and a pair `{a,b}` can only
//! occur as `(a,b,·)`, `(b,a,·)` or with one of them as the symbol, at most
//! once for each of the four remaining placements.
//!
//! Odd orders use `L(i,j) = (i + j)·(r + 1)/2 mod r`. Even orders prolong
//! the odd square of order `r − 1` along its transversal `{(i, i+1)}`,
//! which avoids the diagonal and so keeps the result idempotent.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered triples over `1..=r` (1-based, as serialized).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleSystem {
    pub r: usize,
    pub triples: Vec<[usize; 3]>,
}

/// 0-based idempotent Latin square of order `r`, `r != 2`.
pub fn idempotent_latin_square(r: usize) -> Vec<Vec<usize>> {
    assert!(r != 2 && r >= 1, "no idempotent Latin square of order {r}");
    if r % 2 == 1 {
        let half = r.div_ceil(2);
        return (0..r)
            .map(|i| (0..r).map(|j| (i + j) * half % r).collect())
            .collect();
    }
    let m = r - 1;
    let odd = idempotent_latin_square(m);
    let mut sq = vec![vec![0; r]; r];
    for i in 0..m {
        for j in 0..m {
            sq[i][j] = odd[i][j];
        }
    }
    for i in 0..m {
        let j = (i + 1) % m;
        let s = odd[i][j];
        sq[i][j] = m;
        sq[i][m] = s;
        sq[m][j] = s;
    }
    sq[m][m] = m;
    sq
}

fn construct(r: usize) -> TripleSystem {
    let sq = idempotent_latin_square(r);
    let mut triples = Vec::with_capacity(r * r - r);
    for (i, row) in sq.iter().enumerate() {
        for (j, &s) in row.iter().enumerate() {
            if i != j {
                triples.push([i + 1, j + 1, s + 1]);
            }
        }
    }
    TripleSystem { r, triples }
}

fn cache() -> &'static Mutex<HashMap<usize, Arc<TripleSystem>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<TripleSystem>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Builds (or fetches from the process-wide cache) a verified system for `r`.
pub fn build_triples(r: usize) -> Result<Arc<TripleSystem>> {
    if r < 3 {
        return Err(Error::TripleGround(r));
    }
    if let Some(ts) = cache().lock().unwrap().get(&r) {
        return Ok(Arc::clone(ts));
    }
    let ts = construct(r);
    let verdict = verify_triples(&ts);
    if let Some(v) = verdict.violations.first() {
        return Err(Error::Invariant(format!("triple system for r={r}: {v:?}")));
    }
    let mut guard = cache().lock().unwrap();
    let entry = guard.entry(r).or_insert_with(|| Arc::new(ts));
    Ok(Arc::clone(entry))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TripleViolation {
    /// Wrong number of triples.
    Size { expected: usize, found: usize },
    /// A triple with an element outside `1..=r` or a repeated element.
    BadTriple { position: usize, triple: [usize; 3] },
    /// An element occurring in the wrong number of triples.
    ElementCount { element: usize, expected: usize, found: usize },
    /// A pair occurring in more than 6 triples.
    PairCount { pair: (usize, usize), found: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripleVerdict {
    pub violations: Vec<TripleViolation>,
}

impl TripleVerdict {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn first_violation(&self) -> Option<&TripleViolation> {
        self.violations.first()
    }
}

/// Checks every property and lists all violations, in the order size,
/// malformed triples, element counts, pair counts.
pub fn verify_triples(ts: &TripleSystem) -> TripleVerdict {
    let r = ts.r;
    let mut violations = Vec::new();
    let expected = (r * r).saturating_sub(r);
    if ts.triples.len() != expected {
        violations.push(TripleViolation::Size {
            expected,
            found: ts.triples.len(),
        });
    }
    let mut element = vec![0usize; r + 1];
    let mut pairs = vec![0usize; (r + 1) * (r + 1)];
    for (position, t) in ts.triples.iter().enumerate() {
        let in_range = t.iter().all(|&e| (1..=r).contains(&e));
        let distinct = t[0] != t[1] && t[1] != t[2] && t[0] != t[2];
        if !in_range || !distinct {
            violations.push(TripleViolation::BadTriple {
                position,
                triple: *t,
            });
            continue;
        }
        for &e in t {
            element[e] += 1;
        }
        for (a, b) in [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])] {
            pairs[a.min(b) * (r + 1) + a.max(b)] += 1;
        }
    }
    let per_element = 3 * r.saturating_sub(1);
    for (e, &found) in element.iter().enumerate().skip(1) {
        if found != per_element {
            violations.push(TripleViolation::ElementCount {
                element: e,
                expected: per_element,
                found,
            });
        }
    }
    for a in 1..=r {
        for b in a + 1..=r {
            let found = pairs[a * (r + 1) + b];
            if found > 6 {
                violations.push(TripleViolation::PairCount { pair: (a, b), found });
            }
        }
    }
    TripleVerdict { violations }
}
