#![allow(dead_code)]

use mrlab::config::ColoredConfig;
use mrlab::generators::{gen_collinear, gen_grid, gen_planted, GridColoring, PlantedParams, Rng64};
use mrlab::metrics::SingletonPolicy;
use mrlab::scalar::{Field, Scalar};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Dense Gaussian elimination over the scalar field.
pub fn rank_by_elimination(rows: &[Vec<Scalar>]) -> usize {
    let mut m: Vec<Vec<Scalar>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let pivot = m[rank][c].clone();
        for r in 0..m.len() {
            if r != rank && !m[r][c].is_zero() {
                let f = &m[r][c] / &pivot;
                for j in c..cols {
                    let sub = &f * &m[rank][j];
                    m[r][j] = &m[r][j] - &sub;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn det(m: &[Vec<Scalar>]) -> Scalar {
    if m.len() == 1 {
        return m[0][0].clone();
    }
    let mut acc = Scalar::zero();
    for (j, a) in m[0].iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let minor: Vec<Vec<Scalar>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, v)| v.clone()).collect())
            .collect();
        let term = a * &det(&minor);
        acc = if j % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Largest `k` with a nonzero `k × k` minor.
pub fn rank_by_minors(rows: &[Vec<Scalar>]) -> usize {
    let m = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    for k in (1..=m.min(n)).rev() {
        for rs in subsets(m, k) {
            for cs in subsets(n, k) {
                let sub: Vec<Vec<Scalar>> = rs
                    .iter()
                    .map(|&r| cs.iter().map(|&c| rows[r][c].clone()).collect())
                    .collect();
                if !det(&sub).is_zero() {
                    return k;
                }
            }
        }
    }
    0
}

fn collinear(a: &[Scalar], b: &[Scalar], c: &[Scalar]) -> bool {
    let u: Vec<Scalar> = b.iter().zip(a).map(|(x, y)| x - y).collect();
    let w: Vec<Scalar> = c.iter().zip(a).map(|(x, y)| x - y).collect();
    for i in 0..u.len() {
        for j in i + 1..u.len() {
            if !(&(&u[i] * &w[j]) - &(&u[j] * &w[i])).is_zero() {
                return false;
            }
        }
    }
    true
}

/// δ* by scanning every ordered triple `(v, u, w)`.
pub fn delta_by_triples(config: &ColoredConfig, policy: SingletonPolicy) -> BigRational {
    let m = config.num_points();
    let mut best: Option<BigRational> = None;
    for v in 0..m {
        let cv = config.color_of(v);
        let size = config.class(cv).len();
        if size == 1 && policy == SingletonPolicy::Vacuous {
            continue;
        }
        let mut count = 0;
        for u in 0..m {
            if u == v || config.color_of(u) != cv {
                continue;
            }
            let witnessed = (0..m).any(|w| {
                config.color_of(w) != cv && collinear(config.point(v), config.point(u), config.point(w))
            });
            count += usize::from(witnessed);
        }
        let f = q(count as i64, size as i64);
        if best.as_ref().is_none_or(|b| f < *b) {
            best = Some(f);
        }
    }
    best.unwrap_or_else(BigRational::zero)
}

/// Deterministic fixtures: collinear families, grids and a few planted configurations.
pub fn fixtures() -> Vec<(String, ColoredConfig)> {
    let mut out = Vec::new();
    for sizes in [
        vec![2, 2],
        vec![3, 3],
        vec![4, 2],
        vec![5, 3],
        vec![2, 2, 2],
        vec![4, 3, 2],
        vec![3, 3, 3, 3],
        vec![6, 1],
        vec![4],
    ] {
        out.push((format!("collinear{sizes:?}"), gen_collinear(&sizes, Field::Rational).unwrap()));
    }
    out.push((
        "collinear-gaussian[3, 3]".into(),
        gen_collinear(&[3, 3], Field::Gaussian).unwrap(),
    ));
    for side in 2..=4 {
        for coloring in [GridColoring::Rows, GridColoring::Parity, GridColoring::Blocks] {
            out.push((format!("grid{side}-{coloring:?}"), gen_grid(side, coloring).unwrap()));
        }
    }
    for seed in 0..6 {
        let params = PlantedParams {
            colors: 2 + (seed as usize % 2),
            dim: 3 + (seed as usize % 3),
            lines: 3,
            max_points: 30,
            noise: 0,
        };
        out.push((format!("planted{seed}"), gen_planted(seed, &params).unwrap()));
    }
    out
}

/// 100 seeded random configurations with at most 50 points, `d <= 6`,
/// `n <= 4`. Even-numbered ones carry no loose points.
pub fn corpus() -> Vec<ColoredConfig> {
    let mut rng = Rng64::new(0xC0FFEE);
    (0..100)
        .map(|i| {
            let params = PlantedParams {
                colors: 1 + rng.index(4),
                dim: 2 + rng.index(5),
                lines: 1 + rng.index(5),
                max_points: 50,
                noise: if i % 2 == 0 { 0 } else { 1 + rng.index(3) },
            };
            gen_planted(rng.next_u64(), &params).unwrap()
        })
        .collect()
}

pub fn random_scalar(rng: &mut Rng64, lo: i64, hi: i64) -> Scalar {
    Scalar::from_integer(rng.range(lo, hi))
}

pub fn nonzero_rational(rng: &mut Rng64) -> Scalar {
    loop {
        let n = rng.range(-9, 9);
        if n != 0 {
            return Scalar::real(q(n, rng.range(1, 7)));
        }
    }
}
