//! ε-large index decomposition and the explicit dimension bounds built on it.
//!
//! With `c = 1/(δ − ε)`, index `j` is ε-large when
//! `|V_j| >= c·(|V_{j+1}| + … + |V_n|)`, and `n` is always ε-large. The large
//! indices `d_1 < … < d_k = n` (with `d_0 = 0`) cut the colors into blocks
//! `W_i = V_{d_{i−1}+1} ∪ … ∪ V_{d_i}`. Writing `g_i = d_i − d_{i−1}`:
//!
//! * recursion: `R_0 = 0`, `R_i = 2·R_{i−1} + (24/ε)(1 + c)^{g_i − 1}`, `B_rec = R_k`
//! * summation: `B_sum = (24/ε) Σ_j 2^{k−j} (1 + c)^{g_j − 1}`
//! * closed form: `B_coarse = (24k/ε)(2/(2 + ε))^k (1 + c)^n`
//!
//! All three are exact rationals; the only floating-point value anywhere is
//! the real maximizer reported by [`coarse_constants`].

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::config::ColoredConfig;
use crate::error::{Error, Result};
use crate::metrics::{compute_delta, SingletonPolicy};
use crate::rank::{affine_dim, linear_dim};
use crate::scalar::{decimal, format_rational};

fn int(v: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn pow(base: &BigRational, exp: usize) -> BigRational {
    num_traits::pow::pow(base.clone(), exp)
}

fn rat_json(r: &BigRational) -> Value {
    json!({ "exact": format_rational(r), "decimal": decimal(r) })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonDecomposition {
    pub sizes: Vec<usize>,
    pub delta: BigRational,
    pub eps: BigRational,
    /// `1/(δ − ε)`.
    pub c_eps: BigRational,
    /// `large[j]` for 0-based color `j`.
    pub large: Vec<bool>,
    /// 1-based large indices `d_1 < … < d_k = n`.
    pub large_indices: Vec<usize>,
}

impl EpsilonDecomposition {
    pub fn k(&self) -> usize {
        self.large_indices.len()
    }

    /// Consecutive cuts `(d_{i−1}, d_i)` for `i = 1..=k`.
    pub fn blocks(&self) -> Vec<(usize, usize)> {
        let mut prev = 0;
        self.large_indices
            .iter()
            .map(|&d| {
                let b = (prev, d);
                prev = d;
                b
            })
            .collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "sizes": self.sizes,
            "delta": format_rational(&self.delta),
            "eps": format_rational(&self.eps),
            "c_eps": format_rational(&self.c_eps),
            "large_indices": self.large_indices,
        })
    }
}

fn check_sizes(sizes: &[usize]) -> Result<()> {
    if sizes.is_empty() || sizes.contains(&0) || sizes.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::InvalidSizes(sizes.to_vec()));
    }
    Ok(())
}

pub fn classify_indices(
    sizes: &[usize],
    delta: &BigRational,
    eps: &BigRational,
) -> Result<EpsilonDecomposition> {
    check_sizes(sizes)?;
    if *delta > BigRational::one() {
        return Err(Error::Parameter(format!("delta {} exceeds 1", format_rational(delta))));
    }
    if !(*eps > BigRational::zero() && eps < delta) {
        return Err(Error::Parameter(format!(
            "eps {} not in (0, {})",
            format_rational(eps),
            format_rational(delta)
        )));
    }
    let c_eps = (delta - eps).recip();
    let n = sizes.len();
    let mut large = vec![false; n];
    let mut tail = 0usize;
    for j in (0..n).rev() {
        large[j] = j == n - 1 || int(sizes[j]) >= &c_eps * int(tail);
        tail += sizes[j];
    }
    let large_indices = (0..n).filter(|&j| large[j]).map(|j| j + 1).collect();
    Ok(EpsilonDecomposition {
        sizes: sizes.to_vec(),
        delta: delta.clone(),
        eps: eps.clone(),
        c_eps,
        large,
        large_indices,
    })
}

#[derive(Debug, Clone)]
pub struct TailCheck {
    pub x: usize,
    pub y: usize,
    pub i: usize,
    /// `Σ_{j >= y−i} |V_j|`.
    pub lhs: BigRational,
    /// `2(1 + c)^i |V_y|`.
    pub rhs: BigRational,
    pub holds: bool,
}

#[derive(Debug, Clone)]
pub struct CorollaryCheck {
    pub x: usize,
    pub y: usize,
    /// `|V_y|`.
    pub lhs: BigRational,
    /// `Σ_{j=x+1..y} |V_j| / (2(1 + c)^{y−x−1})`.
    pub rhs: BigRational,
    pub holds: bool,
}

#[derive(Debug, Clone)]
pub struct TailReport {
    pub tail: Vec<TailCheck>,
    pub corollary: Vec<CorollaryCheck>,
}

impl TailReport {
    pub fn holds(&self) -> bool {
        self.tail.iter().all(|c| c.holds) && self.corollary.iter().all(|c| c.holds)
    }

    pub fn violations(&self) -> usize {
        self.tail.iter().filter(|c| !c.holds).count()
            + self.corollary.iter().filter(|c| !c.holds).count()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "holds": self.holds(),
            "tail": self.tail.iter().map(|c| json!({
                "x": c.x, "y": c.y, "i": c.i,
                "lhs": format_rational(&c.lhs), "rhs": format_rational(&c.rhs), "holds": c.holds,
            })).collect::<Vec<_>>(),
            "corollary": self.corollary.iter().map(|c| json!({
                "x": c.x, "y": c.y,
                "lhs": format_rational(&c.lhs), "rhs": format_rational(&c.rhs), "holds": c.holds,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Checks the geometric tail bound and its corollary on every block of the
/// decomposition (every block has a large right end and small interior).
pub fn verify_tail_bound(decomp: &EpsilonDecomposition) -> TailReport {
    let sizes = &decomp.sizes;
    let one_plus_c = BigRational::one() + &decomp.c_eps;
    // suffix[j] = Σ_{l >= j} |V_l|, 1-based j
    let n = sizes.len();
    let mut suffix = vec![0usize; n + 2];
    for j in (1..=n).rev() {
        suffix[j] = suffix[j + 1] + sizes[j - 1];
    }
    let mut tail = Vec::new();
    let mut corollary = Vec::new();
    for (x, y) in decomp.blocks() {
        let v_y = int(sizes[y - 1]);
        for i in 0..y - x {
            let lhs = int(suffix[y - i]);
            let rhs = int(2) * pow(&one_plus_c, i) * &v_y;
            tail.push(TailCheck {
                x,
                y,
                i,
                holds: lhs <= rhs,
                lhs,
                rhs,
            });
        }
        let block_sum = int(suffix[x + 1] - suffix[y + 1]);
        let rhs = block_sum / (int(2) * pow(&one_plus_c, y - x - 1));
        corollary.push(CorollaryCheck {
            x,
            y,
            holds: v_y >= rhs,
            lhs: v_y,
            rhs,
        });
    }
    TailReport { tail, corollary }
}

/// The three explicit bounds for a decomposition, independent of geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct ExplicitBounds {
    /// `R_1..R_k`.
    pub recursion: Vec<BigRational>,
    pub b_rec: BigRational,
    pub b_sum: BigRational,
    pub b_coarse: BigRational,
}

pub fn explicit_bounds(decomp: &EpsilonDecomposition) -> ExplicitBounds {
    let one_plus_c = BigRational::one() + &decomp.c_eps;
    let unit = int(24) / &decomp.eps;
    let gaps: Vec<usize> = decomp.blocks().iter().map(|(x, y)| y - x).collect();
    let k = gaps.len();

    let mut recursion = Vec::with_capacity(k);
    let mut r = BigRational::zero();
    for &g in &gaps {
        r = int(2) * r + &unit * pow(&one_plus_c, g - 1);
        recursion.push(r.clone());
    }
    let b_sum = gaps
        .iter()
        .enumerate()
        .map(|(j, &g)| pow(&int(2), k - (j + 1)) * pow(&one_plus_c, g - 1))
        .fold(BigRational::zero(), |acc, v| acc + v)
        * &unit;
    let two = int(2);
    let b_coarse = &unit
        * int(k)
        * pow(&(&two / (&two + &decomp.eps)), k)
        * pow(&one_plus_c, decomp.sizes.len());
    ExplicitBounds {
        b_rec: r,
        recursion,
        b_sum,
        b_coarse,
    }
}

#[derive(Debug, Clone)]
pub struct BlockBound {
    pub x: usize,
    pub y: usize,
    /// `dim(W_i)`.
    pub dim_block: usize,
    /// Measured `m_i = dim(W_1 ∪ … ∪ W_i)`.
    pub cumulative: usize,
    /// `R_i`.
    pub recursion: BigRational,
    /// `m_{i−1} + (24/ε)(1 + c)^{g_i − 1}`, the per-block bound on `dim(W_i)`.
    pub block_bound: BigRational,
}

#[derive(Debug, Clone)]
pub struct BoundCheck {
    pub name: &'static str,
    pub holds: bool,
}

#[derive(Debug, Clone)]
pub struct FootnotePoint {
    pub eps: BigRational,
    pub b_rec: BigRational,
    pub b_coarse: BigRational,
}

#[derive(Debug, Clone)]
pub struct BoundReport {
    pub decomposition: EpsilonDecomposition,
    pub blocks: Vec<BlockBound>,
    pub bounds: ExplicitBounds,
    pub linear_dim: usize,
    pub affine_dim: isize,
    pub checks: Vec<BoundCheck>,
    /// The bounds at `ε = δ/2`.
    pub footnote: FootnotePoint,
}

impl BoundReport {
    pub fn b_rec(&self) -> &BigRational {
        &self.bounds.b_rec
    }

    pub fn holds(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn failed_checks(&self) -> Vec<&'static str> {
        self.checks.iter().filter(|c| !c.holds).map(|c| c.name).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "holds": self.holds(),
            "decomposition": self.decomposition.to_json(),
            "linear_dim": self.linear_dim,
            "affine_dim": self.affine_dim,
            "b_rec": rat_json(&self.bounds.b_rec),
            "b_sum": rat_json(&self.bounds.b_sum),
            "b_coarse": rat_json(&self.bounds.b_coarse),
            "constant_c": "symbolic",
            "blocks": self.blocks.iter().map(|b| json!({
                "x": b.x, "y": b.y,
                "dim_block": b.dim_block,
                "cumulative_dim": b.cumulative,
                "recursion_bound": rat_json(&b.recursion),
                "block_bound": rat_json(&b.block_bound),
            })).collect::<Vec<_>>(),
            "checks": self.checks.iter().map(|c| json!({ "name": c.name, "holds": c.holds }))
                .collect::<Vec<_>>(),
            "footnote": {
                "eps": format_rational(&self.footnote.eps),
                "b_rec": rat_json(&self.footnote.b_rec),
                "b_coarse": rat_json(&self.footnote.b_coarse),
            },
        })
    }
}

/// Geometry of a configuration measured once and reused across ε values.
#[derive(Debug, Clone)]
pub struct BoundContext {
    pub sizes: Vec<usize>,
    pub delta_star: BigRational,
    pub linear_dim: usize,
    pub affine_dim: isize,
    /// `prefix_dims[j] = dim(V_1 ∪ … ∪ V_j)`.
    pub prefix_dims: Vec<usize>,
    /// `range_dims[x][y] = dim(V_{x+1} ∪ … ∪ V_y)` for `x < y`.
    range_dims: Vec<Vec<usize>>,
}

impl BoundContext {
    pub fn new(config: &ColoredConfig, policy: SingletonPolicy) -> Result<Self> {
        let delta_star = compute_delta(config, policy).delta_star;
        Self::with_delta_star(config, delta_star)
    }

    pub fn with_delta_star(config: &ColoredConfig, delta_star: BigRational) -> Result<Self> {
        let n = config.num_colors();
        let points = config.points();
        let mut range_dims = vec![vec![0; n + 1]; n + 1];
        for (x, row) in range_dims.iter_mut().enumerate() {
            for (y, slot) in row.iter_mut().enumerate().skip(x + 1) {
                *slot = linear_dim(&points[config.color_range(x..y)])?;
            }
        }
        Ok(BoundContext {
            sizes: config.sizes(),
            delta_star,
            linear_dim: range_dims[0][n],
            affine_dim: affine_dim(&points)?,
            prefix_dims: (0..=n).map(|j| if j == 0 { 0 } else { range_dims[0][j] }).collect(),
            range_dims,
        })
    }

    fn admissible_delta(&self, delta: &BigRational) -> Result<()> {
        if self.delta_star.is_zero() {
            return Err(Error::EmptyHypothesis);
        }
        if *delta > self.delta_star {
            return Err(Error::DeltaAboveMeasured {
                supplied: format_rational(delta),
                measured: format_rational(&self.delta_star),
            });
        }
        Ok(())
    }

    pub fn evaluate(&self, delta: &BigRational, eps: &BigRational) -> Result<BoundReport> {
        self.admissible_delta(delta)?;
        let decomposition = classify_indices(&self.sizes, delta, eps)?;
        let bounds = explicit_bounds(&decomposition);
        let one_plus_c = BigRational::one() + &decomposition.c_eps;
        let unit = int(24) / eps;
        let blocks: Vec<BlockBound> = decomposition
            .blocks()
            .into_iter()
            .zip(&bounds.recursion)
            .map(|((x, y), r)| BlockBound {
                x,
                y,
                dim_block: self.range_dims[x][y],
                cumulative: self.prefix_dims[y],
                recursion: r.clone(),
                block_bound: int(self.prefix_dims[x]) + &unit * pow(&one_plus_c, y - x - 1),
            })
            .collect();
        let dim = int(self.linear_dim);
        let checks = vec![
            BoundCheck {
                name: "adim(V) <= dim(V)",
                holds: self.affine_dim <= self.linear_dim as isize,
            },
            BoundCheck {
                name: "dim(V) <= B_rec",
                holds: dim <= bounds.b_rec,
            },
            BoundCheck {
                name: "B_rec <= B_sum",
                holds: bounds.b_rec <= bounds.b_sum,
            },
            BoundCheck {
                name: "B_rec = B_sum",
                holds: bounds.b_rec == bounds.b_sum,
            },
            BoundCheck {
                name: "B_sum <= B_coarse",
                holds: bounds.b_sum <= bounds.b_coarse,
            },
            BoundCheck {
                name: "m_i <= R_i",
                holds: blocks.iter().all(|b| int(b.cumulative) <= b.recursion),
            },
            BoundCheck {
                name: "m_i <= m_{i-1} + dim(W_i)",
                holds: blocks
                    .iter()
                    .all(|b| b.cumulative <= self.prefix_dims[b.x] + b.dim_block),
            },
            BoundCheck {
                name: "dim(W_i) <= m_{i-1} + (24/eps)(1+c)^(g_i-1)",
                holds: blocks.iter().all(|b| int(b.dim_block) <= b.block_bound),
            },
        ];
        let half = delta / int(2);
        let footnote_bounds = explicit_bounds(&classify_indices(&self.sizes, delta, &half)?);
        Ok(BoundReport {
            decomposition,
            blocks,
            bounds,
            linear_dim: self.linear_dim,
            affine_dim: self.affine_dim,
            checks,
            footnote: FootnotePoint {
                eps: half,
                b_rec: footnote_bounds.b_rec,
                b_coarse: footnote_bounds.b_coarse,
            },
        })
    }

    /// `δ·g/(grid + 1)` for `g = 1..=grid`, plus `δ/2`, ascending and unique.
    pub fn epsilon_grid(delta: &BigRational, grid: usize) -> Vec<BigRational> {
        let mut eps: Vec<BigRational> = (1..=grid)
            .map(|g| delta * BigRational::new(BigInt::from(g), BigInt::from(grid + 1)))
            .collect();
        eps.push(delta / int(2));
        eps.sort();
        eps.dedup();
        eps
    }

    /// Evaluates every grid point and returns the one minimizing `B_rec`
    /// (smaller ε on ties).
    pub fn optimize(&self, delta: &BigRational, grid: usize) -> Result<(BigRational, BoundReport)> {
        if grid == 0 {
            return Err(Error::Parameter("grid must be positive".into()));
        }
        let mut best: Option<(BigRational, BoundReport)> = None;
        for eps in Self::epsilon_grid(delta, grid) {
            let report = self.evaluate(delta, &eps)?;
            let better = best
                .as_ref()
                .is_none_or(|(_, b)| report.bounds.b_rec < b.bounds.b_rec);
            if better {
                best = Some((eps, report));
            }
        }
        Ok(best.expect("grid is nonempty"))
    }
}

pub fn theorem_bound(
    config: &ColoredConfig,
    delta: &BigRational,
    eps: &BigRational,
    policy: SingletonPolicy,
) -> Result<BoundReport> {
    BoundContext::new(config, policy)?.evaluate(delta, eps)
}

pub fn optimize_epsilon(
    config: &ColoredConfig,
    delta: &BigRational,
    grid: usize,
    policy: SingletonPolicy,
) -> Result<(BigRational, BoundReport)> {
    BoundContext::new(config, policy)?.optimize(delta, grid)
}

/// `(24k/ε)(2/(2 + ε))^k`.
pub fn coarse_objective(eps: &BigRational, k: usize) -> BigRational {
    let two = int(2);
    int(24) * int(k) / eps * pow(&(&two / (&two + eps)), k)
}

#[derive(Debug, Clone)]
pub struct CoarseReport {
    pub eps: BigRational,
    /// `−1/ln(2/(2 + ε))`, floating point.
    pub k_star: f64,
    pub k_floor: usize,
    pub k_ceil: usize,
    pub value_floor: BigRational,
    pub value_ceil: BigRational,
    pub argmax: usize,
    pub max: BigRational,
    /// Last `k` of the exhaustive scan.
    pub scan_limit: usize,
    /// No scanned `k` exceeds `max`.
    pub scan_ok: bool,
    /// Nondecreasing up to `k_floor`, nonincreasing from `k_ceil`.
    pub unimodal: bool,
    /// `2/(1 + c) < 2/(2 + ε)` for the supplied δ.
    pub chain: Option<bool>,
    /// δ was supplied as exactly 1.
    pub delta_is_one: bool,
}

impl CoarseReport {
    pub fn holds(&self) -> bool {
        self.scan_ok && self.unimodal && self.chain.unwrap_or(true)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "holds": self.holds(),
            "eps": format_rational(&self.eps),
            "k_star_approx": self.k_star,
            "k_floor": self.k_floor,
            "k_ceil": self.k_ceil,
            "value_floor": rat_json(&self.value_floor),
            "value_ceil": rat_json(&self.value_ceil),
            "argmax": self.argmax,
            "max": rat_json(&self.max),
            "max_over_24_eps_sq": decimal(&(&self.max * &self.eps * &self.eps / int(24))),
            "scan_limit": self.scan_limit,
            "scan_ok": self.scan_ok,
            "unimodal": self.unimodal,
            "chain_2_over_1_plus_c_lt_2_over_2_plus_eps": self.chain,
            "delta_is_one": self.delta_is_one,
        })
    }
}

pub fn coarse_constants(eps: &BigRational, delta: Option<&BigRational>) -> Result<CoarseReport> {
    if !(*eps > BigRational::zero() && *eps < BigRational::one()) {
        return Err(Error::Parameter(format!("eps {} not in (0, 1)", format_rational(eps))));
    }
    let e = eps.to_f64().expect("eps in (0, 1)");
    let k_star = -1.0 / (2.0 / (2.0 + e)).ln();
    let k_floor = (k_star.floor() as usize).max(1);
    let k_ceil = (k_star.ceil() as usize).max(k_floor);
    let value_floor = coarse_objective(eps, k_floor);
    let value_ceil = coarse_objective(eps, k_ceil);
    let (argmax, max) = if value_ceil > value_floor {
        (k_ceil, value_ceil.clone())
    } else {
        (k_floor, value_floor.clone())
    };
    let scan_limit = (3.0 * k_star).ceil() as usize;
    let values: Vec<BigRational> = (1..=scan_limit).map(|k| coarse_objective(eps, k)).collect();
    let scan_ok = values.iter().all(|v| *v <= max);
    let unimodal = values.windows(2).enumerate().all(|(i, w)| {
        let k = i + 1;
        if k < k_floor {
            w[0] <= w[1]
        } else if k >= k_ceil {
            w[0] >= w[1]
        } else {
            true
        }
    });
    let (chain, delta_is_one) = match delta {
        Some(d) => {
            if d <= eps || *d > BigRational::one() {
                return Err(Error::Parameter(format!(
                    "delta {} must satisfy eps < delta <= 1",
                    format_rational(d)
                )));
            }
            let c = (d - eps).recip();
            let two = int(2);
            let lhs = &two / (BigRational::one() + c);
            let rhs = &two / (&two + eps);
            (Some(lhs < rhs), d.is_one())
        }
        None => (None, false),
    };
    Ok(CoarseReport {
        eps: eps.clone(),
        k_star,
        k_floor,
        k_ceil,
        value_floor,
        value_ceil,
        argmax,
        max,
        scan_limit,
        scan_ok,
        unimodal,
        chain,
        delta_is_one,
    })
}
