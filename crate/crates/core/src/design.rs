//! Design-matrix parameters and the rank lower bound they certify.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::matrix::SparseExactMatrix;

/// `q`: largest row support, `k`: smallest column support, `t`: largest
/// support intersection of two distinct columns.
///
/// A matrix with these exact parameters is a `(q', k', t')`-design matrix
/// for every `q' >= q`, `k' <= k`, `t' >= t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DesignParams {
    pub q: usize,
    pub k: usize,
    pub t: usize,
}

impl DesignParams {
    pub fn to_json(&self) -> Value {
        json!({ "q": self.q, "k": self.k, "t": self.t })
    }
}

fn sorted_intersection(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

pub fn audit_design(mat: &SparseExactMatrix) -> DesignParams {
    let q = mat.row_supports().into_iter().max().unwrap_or(0);
    let cols = mat.column_supports();
    let k = cols.iter().map(Vec::len).min().unwrap_or(0);
    let mut t = 0;
    for (a, ca) in cols.iter().enumerate() {
        for cb in &cols[a + 1..] {
            if ca.len().min(cb.len()) > t {
                t = t.max(sorted_intersection(ca, cb));
            }
        }
    }
    DesignParams { q, k, t }
}

/// `n − n·t·q·(q − 1)/k`, exactly. May be negative.
pub fn rank_bound(n: usize, params: DesignParams) -> Result<BigRational> {
    if params.k == 0 {
        return Err(Error::ZeroColumnSupport);
    }
    let n = BigInt::from(n);
    let q = BigInt::from(params.q);
    let loss = BigRational::new(
        &n * BigInt::from(params.t) * &q * (&q - 1),
        BigInt::from(params.k),
    );
    Ok(BigRational::from_integer(n) - loss)
}
