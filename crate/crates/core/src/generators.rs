//! Deterministic fixture configurations and a seeded random generator.

use std::collections::HashSet;
use std::str::FromStr;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::config::{config_from_ints, ColoredConfig, Point};
use crate::error::{Error, Result};
use crate::scalar::{Field, Scalar};

/// SplitMix64 stream: `state += 0x9E3779B97F4A7C15`, then
/// `z = (state ^ (state >> 30)) * 0xBF58476D1CE4E5B9`,
/// `z = (z ^ (z >> 27)) * 0x94D049BB133111EB`, output `z ^ (z >> 31)`.
/// The initial state is the seed itself. Bounded draws are `next % bound`.
#[derive(Debug, Clone)]
pub struct Rng64(SplitMix64);

impl Rng64 {
    pub fn new(seed: u64) -> Self {
        Rng64(SplitMix64::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform-ish draw from `0..bound`; `bound` must be positive.
    pub fn below(&mut self, bound: u64) -> u64 {
        self.next_u64() % bound
    }

    pub fn index(&mut self, len: usize) -> usize {
        self.below(len as u64) as usize
    }

    /// Draw from the closed range `lo..=hi`.
    pub fn range(&mut self, lo: i64, hi: i64) -> i64 {
        lo + self.below((hi - lo + 1) as u64) as i64
    }
}

/// All points on the x-axis of the plane, colors dealt round-robin among
/// classes that still need points.
pub fn gen_collinear(sizes: &[usize], field: Field) -> Result<ColoredConfig> {
    let total: usize = sizes.iter().sum();
    if sizes.is_empty() || sizes.contains(&0) || sizes.windows(2).any(|w| w[0] < w[1]) || total < 2 {
        return Err(Error::InvalidSizes(sizes.to_vec()));
    }
    let mut classes: Vec<Vec<Point>> = vec![Vec::new(); sizes.len()];
    let mut color = 0;
    for t in 0..total {
        while classes[color].len() == sizes[color] {
            color = (color + 1) % sizes.len();
        }
        classes[color].push(vec![Scalar::from_integer(t as i64), Scalar::zero()]);
        color = (color + 1) % sizes.len();
    }
    ColoredConfig::new(field, 2, classes)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridColoring {
    /// One color per row.
    Rows,
    /// Even and odd coordinate sum.
    Parity,
    /// Four quadrants.
    Blocks,
}

impl FromStr for GridColoring {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rows" => Ok(GridColoring::Rows),
            "parity" => Ok(GridColoring::Parity),
            "blocks" => Ok(GridColoring::Blocks),
            other => Err(Error::Parameter(format!("unknown coloring {other:?}"))),
        }
    }
}

/// The `side × side` integer grid `{0..side}²` with the given coloring.
pub fn gen_grid(side: usize, coloring: GridColoring) -> Result<ColoredConfig> {
    if side < 2 {
        return Err(Error::Parameter(format!("grid side {side} < 2")));
    }
    let half = side.div_ceil(2);
    let colors = match coloring {
        GridColoring::Rows => side,
        GridColoring::Parity => 2,
        GridColoring::Blocks => 4,
    };
    let mut classes: Vec<Vec<Vec<i64>>> = vec![Vec::new(); colors];
    for y in 0..side {
        for x in 0..side {
            let c = match coloring {
                GridColoring::Rows => y,
                GridColoring::Parity => (x + y) % 2,
                GridColoring::Blocks => 2 * usize::from(y >= half) + usize::from(x >= half),
            };
            classes[c].push(vec![x as i64, y as i64]);
        }
    }
    config_from_ints(&classes)
}

/// Shape of a random configuration with planted multi-colored lines.
#[derive(Debug, Clone)]
pub struct PlantedParams {
    pub colors: usize,
    pub dim: usize,
    pub lines: usize,
    pub max_points: usize,
    /// Extra points in general position.
    pub noise: usize,
}

/// Random lines in a small integer box, each carrying at least two points of
/// each of two colors, plus a few loose points. Duplicate points are dropped
/// and any color left empty gets one random point.
pub fn gen_planted(seed: u64, params: &PlantedParams) -> Result<ColoredConfig> {
    if params.colors == 0 || params.dim == 0 || params.max_points < params.colors {
        return Err(Error::Parameter(format!("bad planted parameters {params:?}")));
    }
    let mut rng = Rng64::new(seed);
    let d = params.dim;
    let mut seen: HashSet<Vec<i64>> = HashSet::new();
    let mut classes: Vec<Vec<Vec<i64>>> = vec![Vec::new(); params.colors];
    let mut total = 0;
    let mut place = |p: Vec<i64>, color: usize, classes: &mut Vec<Vec<Vec<i64>>>, total: &mut usize| {
        if *total < params.max_points && seen.insert(p.clone()) {
            classes[color].push(p);
            *total += 1;
        }
    };
    for _ in 0..params.lines {
        let base: Vec<i64> = (0..d).map(|_| rng.range(-4, 4)).collect();
        let mut dir: Vec<i64> = (0..d).map(|_| rng.range(-2, 2)).collect();
        if dir.iter().all(|&v| v == 0) {
            dir[rng.index(d)] = 1;
        }
        let ell = 4 + rng.index(4);
        let a = rng.index(params.colors);
        let b = if params.colors > 1 {
            (a + 1 + rng.index(params.colors - 1)) % params.colors
        } else {
            a
        };
        let mut ts: Vec<i64> = (-5..=5).collect();
        for k in 0..ell {
            let t = ts.swap_remove(rng.index(ts.len()));
            let color = match k {
                0 | 1 => a,
                2 | 3 => b,
                _ => [a, b][rng.index(2)],
            };
            let p = base.iter().zip(&dir).map(|(x, u)| x + t * u).collect();
            place(p, color, &mut classes, &mut total);
        }
    }
    for _ in 0..params.noise {
        let p = (0..d).map(|_| rng.range(-9, 9)).collect();
        let color = rng.index(params.colors);
        place(p, color, &mut classes, &mut total);
    }
    for class in classes.iter_mut() {
        while class.is_empty() {
            let p: Vec<i64> = (0..d).map(|_| rng.range(-20, 20)).collect();
            if seen.insert(p.clone()) {
                class.push(p);
            }
        }
    }
    config_from_ints(&classes)
}
