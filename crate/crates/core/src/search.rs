//! Seeded hill climbing over colored configurations on the integer grid
//! `{0..G}^d`, looking for large dimension at a prescribed δ.
//!
//! The work is split into a fixed number of chains. Chain `c` draws from
//! `Rng64::new(seed + c)` and owns a fixed share of the iterations, so the
//! archive depends only on the parameters and never on how many worker
//! threads execute the chains. Records are merged in (chain, iteration)
//! order.

use std::cmp::{Ordering, Reverse};
use std::collections::HashSet;
use std::io::Write;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::bounds::BoundContext;
use crate::config::{config_from_ints, ColoredConfig};
use crate::error::{Error, Result};
use crate::generators::Rng64;
use crate::metrics::{compute_delta, SingletonPolicy};
use crate::scalar::{format_rational, parse_rational};

#[derive(Debug, Clone)]
pub struct SearchParams {
    pub colors: usize,
    pub side: usize,
    pub dim: usize,
    pub budget: usize,
    pub iterations: usize,
    pub seed: u64,
    pub chains: usize,
    /// Moves without strict improvement before the chain restarts. Moves
    /// that leave the objective unchanged are accepted.
    pub patience: usize,
    pub target: BigRational,
}

impl SearchParams {
    pub fn new(colors: usize, side: usize, budget: usize, iterations: usize, seed: u64) -> Self {
        SearchParams {
            colors,
            side,
            dim: 4,
            budget,
            iterations,
            seed,
            chains: 4,
            patience: 200,
            target: BigRational::new(BigInt::from(1), BigInt::from(4)),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.colors == 0 || self.side < 2 || self.dim == 0 || self.chains == 0 || self.patience == 0 {
            return Err(Error::Parameter(format!(
                "search needs positive colors, dim, chains, patience and side >= 2, got {self:?}"
            )));
        }
        if self.budget < self.colors {
            return Err(Error::Parameter(format!(
                "point budget {} is below the number of colors {}",
                self.budget, self.colors
            )));
        }
        if self.target <= BigRational::zero() || self.target > BigRational::one() {
            return Err(Error::Parameter("target δ must lie in (0, 1]".into()));
        }
        Ok(())
    }

    fn chain_iterations(&self, chain: usize) -> usize {
        self.iterations / self.chains + usize::from(chain < self.iterations % self.chains)
    }
}

/// Measured quantities of one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub delta: BigRational,
    pub dim: usize,
    pub affine_dim: isize,
    /// `B_rec` at `δ = δ*`, `ε = δ*/2`; absent when `δ* = 0`.
    pub bound_rec: Option<BigRational>,
    /// Per-point partner counts, as in the δ-profile.
    counts: Vec<Vec<usize>>,
}

impl Evaluation {
    pub fn of(config: &ColoredConfig) -> Result<Self> {
        let profile = compute_delta(config, SingletonPolicy::Strict);
        let delta = profile.delta_star;
        let ctx = BoundContext::with_delta_star(config, delta.clone())?;
        let bound_rec = if delta.is_zero() {
            None
        } else {
            let eps = &delta / BigInt::from(2);
            Some(ctx.evaluate(&delta, &eps)?.bounds.b_rec)
        };
        Ok(Evaluation {
            delta,
            dim: ctx.linear_dim,
            affine_dim: ctx.affine_dim,
            bound_rec,
            counts: profile.counts,
        })
    }

    pub fn ratio(&self) -> BigRational {
        match &self.bound_rec {
            Some(b) if !b.is_zero() => BigRational::from_integer(BigInt::from(self.dim)) / b,
            _ => BigRational::zero(),
        }
    }

    pub fn within_bound(&self) -> bool {
        self.bound_rec
            .as_ref()
            .is_none_or(|b| BigRational::from_integer(BigInt::from(self.dim)) <= *b)
    }

    /// `dim / (n/δ*)^p` for `p = 1, 2, 3`.
    fn diagnostics(&self, points: usize) -> Value {
        if self.delta.is_zero() {
            return Value::Null;
        }
        let scale = BigRational::from_integer(BigInt::from(points)) / &self.delta;
        let dim = BigRational::from_integer(BigInt::from(self.dim));
        let mut out = serde_json::Map::new();
        let mut power = BigRational::one();
        for p in 1..=3 {
            power *= &scale;
            out.insert(format!("p{p}"), json!(format_rational(&(&dim / &power))));
        }
        Value::Object(out)
    }

    /// Total number of partners missing for every point to reach
    /// `target·|V_i|`.
    fn deficit(&self, target: &BigRational) -> usize {
        self.counts
            .iter()
            .map(|class| {
                let need = (target * BigInt::from(class.len())).ceil().to_integer();
                let need = usize::try_from(need).unwrap_or(usize::MAX);
                class.iter().map(|&c| need.saturating_sub(c)).sum::<usize>()
            })
            .sum()
    }

    /// Lexicographic: δ* at or above the target, dimension, fewer missing
    /// partners, then `dim/B_rec`.
    fn key(&self, target: &BigRational) -> (bool, usize, Reverse<usize>, BigRational) {
        (
            self.delta >= *target,
            self.dim,
            Reverse(self.deficit(target)),
            self.ratio(),
        )
    }
}

fn better(a: &Evaluation, b: &Evaluation, target: &BigRational) -> bool {
    a.key(target).cmp(&b.key(target)) == Ordering::Greater
}

#[derive(Debug, Clone)]
struct State {
    classes: Vec<Vec<Vec<i64>>>,
}

impl State {
    fn total(&self) -> usize {
        self.classes.iter().map(Vec::len).sum()
    }

    fn occupied(&self) -> HashSet<&Vec<i64>> {
        self.classes.iter().flatten().collect()
    }

    fn config(&self) -> Result<ColoredConfig> {
        config_from_ints(&self.classes)
    }
}

fn random_cell(rng: &mut Rng64, p: &SearchParams) -> Vec<i64> {
    (0..p.dim).map(|_| rng.below(p.side as u64) as i64).collect()
}

/// Half the time a uniform cell, otherwise a grid cell on the line through
/// two current points (`a + t(b − a)` for `t ∈ {−1, 1/2, 2}`), falling back
/// to a uniform cell when that lands off the grid.
fn target_cell(rng: &mut Rng64, p: &SearchParams, s: &State) -> Vec<i64> {
    let pts: Vec<&Vec<i64>> = s.classes.iter().flatten().collect();
    if pts.len() < 2 || rng.below(2) == 0 {
        return random_cell(rng, p);
    }
    let i = rng.index(pts.len());
    let j = (i + 1 + rng.index(pts.len() - 1)) % pts.len();
    let (a, b) = (pts[i], pts[j]);
    let cell: Option<Vec<i64>> = match rng.below(3) {
        0 => Some(a.iter().zip(b).map(|(x, y)| 2 * x - y).collect()),
        1 => a.iter().zip(b).map(|(x, y)| ((x + y) % 2 == 0).then_some((x + y) / 2)).collect(),
        _ => Some(a.iter().zip(b).map(|(x, y)| 2 * y - x).collect()),
    };
    match cell {
        Some(c) if c.iter().all(|&v| (0..p.side as i64).contains(&v)) => c,
        _ => random_cell(rng, p),
    }
}

/// Two points per color (one if the budget is tight), dealt round-robin.
fn initial_state(rng: &mut Rng64, p: &SearchParams) -> State {
    let total = (2 * p.colors).min(p.budget);
    let mut classes = vec![Vec::new(); p.colors];
    let mut seen = HashSet::new();
    let mut color = 0;
    while seen.len() < total {
        let cell = random_cell(rng, p);
        if seen.insert(cell.clone()) {
            classes[color].push(cell);
            color = (color + 1) % p.colors;
        }
    }
    State { classes }
}

/// One random move; `None` when the drawn move is degenerate.
fn propose(rng: &mut Rng64, p: &SearchParams, s: &State) -> Option<State> {
    let mut next = s.clone();
    match rng.below(4) {
        0 => {
            let color = rng.index(p.colors);
            let idx = rng.index(s.classes[color].len());
            let cell = target_cell(rng, p, s);
            if s.occupied().contains(&cell) {
                return None;
            }
            next.classes[color][idx] = cell;
        }
        1 => {
            if p.colors < 2 {
                return None;
            }
            let a = rng.index(p.colors);
            let b = (a + 1 + rng.index(p.colors - 1)) % p.colors;
            let i = rng.index(s.classes[a].len());
            let j = rng.index(s.classes[b].len());
            let pa = s.classes[a][i].clone();
            next.classes[a][i] = s.classes[b][j].clone();
            next.classes[b][j] = pa;
        }
        2 => {
            if s.total() >= p.budget {
                return None;
            }
            let color = rng.index(p.colors);
            let cell = target_cell(rng, p, s);
            if s.occupied().contains(&cell) {
                return None;
            }
            next.classes[color].push(cell);
        }
        _ => {
            let color = rng.index(p.colors);
            if s.classes[color].len() < 2 {
                return None;
            }
            let idx = rng.index(s.classes[color].len());
            next.classes[color].remove(idx);
        }
    }
    Some(next)
}

/// One improvement of a chain's best-so-far.
#[derive(Debug, Clone)]
pub struct SearchRecord {
    pub seed: u64,
    pub chain: usize,
    pub iter: usize,
    pub config: ColoredConfig,
    pub eval: Evaluation,
}

impl SearchRecord {
    pub fn to_json(&self) -> Value {
        json!({
            "seed": self.seed,
            "chain": self.chain,
            "iter": self.iter,
            "config": self.config.to_json(),
            "points": self.config.num_points(),
            "sizes": self.config.sizes(),
            "delta": format_rational(&self.eval.delta),
            "dim": self.eval.dim,
            "adim": self.eval.affine_dim,
            "bound_rec": self.eval.bound_rec.as_ref().map(format_rational),
            "ratio": format_rational(&self.eval.ratio()),
            "diagnostics": self.eval.diagnostics(self.config.num_points()),
        })
    }

    /// One archive line, without trailing newline.
    pub fn to_line(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("records serialize")
    }
}

fn run_chain(p: &SearchParams, chain: usize) -> Result<Vec<SearchRecord>> {
    let seed = p.seed.wrapping_add(chain as u64);
    let mut rng = Rng64::new(seed);
    let mut current = initial_state(&mut rng, p);
    let mut current_eval = Evaluation::of(&current.config()?)?;
    let mut best_eval = current_eval.clone();
    let mut records = vec![SearchRecord {
        seed,
        chain,
        iter: 0,
        config: current.config()?,
        eval: current_eval.clone(),
    }];
    let mut stale = 0;
    for iter in 1..=p.chain_iterations(chain) {
        if stale >= p.patience {
            current = initial_state(&mut rng, p);
            current_eval = Evaluation::of(&current.config()?)?;
            stale = 0;
        }
        stale += 1;
        let Some(next) = propose(&mut rng, p, &current) else {
            continue;
        };
        let config = next.config()?;
        let eval = Evaluation::of(&config)?;
        if better(&current_eval, &eval, &p.target) {
            continue;
        }
        if better(&eval, &current_eval, &p.target) {
            stale = 0;
        }
        current = next;
        current_eval = eval;
        if better(&current_eval, &best_eval, &p.target) {
            best_eval = current_eval.clone();
            records.push(SearchRecord {
                seed,
                chain,
                iter,
                config,
                eval: current_eval.clone(),
            });
        }
    }
    Ok(records)
}

/// Runs all chains on up to `workers` threads and returns the merged archive.
/// Chain 0 always runs; other chains run only when they have iterations.
pub fn search(params: &SearchParams, workers: usize) -> Result<Vec<SearchRecord>> {
    params.validate()?;
    let active: Vec<usize> = (0..params.chains)
        .filter(|&c| c == 0 || params.chain_iterations(c) > 0)
        .collect();
    let workers = workers.clamp(1, active.len());
    let mut per_chain: Vec<(usize, Result<Vec<SearchRecord>>)> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let mine: Vec<usize> = active.iter().copied().skip(w).step_by(workers).collect();
                scope.spawn(move || {
                    mine.into_iter()
                        .map(|c| (c, run_chain(params, c)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("search worker panicked"))
            .collect()
    });
    per_chain.sort_by_key(|(c, _)| *c);
    let mut archive = Vec::new();
    for (_, records) in per_chain {
        archive.extend(records?);
    }
    Ok(archive)
}

/// Writes the archive as JSON lines.
pub fn write_archive<W: Write>(out: &mut W, archive: &[SearchRecord]) -> Result<()> {
    for r in archive {
        writeln!(out, "{}", r.to_line())?;
    }
    Ok(())
}

/// Outcome of replaying one archive line.
#[derive(Debug, Clone)]
pub struct Reverification {
    pub line: usize,
    pub delta_matches: bool,
    pub dim_matches: bool,
    pub bound_matches: bool,
    pub within_bound: bool,
}

impl Reverification {
    pub fn holds(&self) -> bool {
        self.delta_matches && self.dim_matches && self.bound_matches && self.within_bound
    }
}

/// Recomputes δ*, dim and `B_rec` for every record in a JSON-lines archive.
pub fn reverify_archive(text: &str) -> Result<Vec<Reverification>> {
    let mut out = Vec::new();
    for (line, raw) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let v: Value = serde_json::from_str(raw)?;
        let config = ColoredConfig::from_json(&v["config"])?;
        let eval = Evaluation::of(&config)?;
        let field = |name: &str| -> Result<&str> {
            v[name]
                .as_str()
                .ok_or_else(|| Error::Format(format!("record {line}: missing {name}")))
        };
        let delta = parse_rational(field("delta")?)?;
        let bound = match &v["bound_rec"] {
            Value::Null => None,
            Value::String(s) => Some(parse_rational(s)?),
            other => return Err(Error::Format(format!("record {line}: bad bound_rec {other}"))),
        };
        out.push(Reverification {
            line,
            delta_matches: eval.delta == delta,
            dim_matches: v["dim"].as_u64() == Some(eval.dim as u64),
            bound_matches: eval.bound_rec == bound,
            within_bound: eval.within_bound(),
        });
    }
    Ok(out)
}
