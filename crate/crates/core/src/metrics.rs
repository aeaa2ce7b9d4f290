//! Collinearity measurements of colored configurations.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{json, Value};

use crate::config::ColoredConfig;
use crate::error::{Error, Result};
use crate::lines::{enumerate_lines, LineRecord};
use crate::scalar::{decimal, format_rational};

/// How a color class with a single point enters `δ*`.
///
/// Under `Strict` such a point has no partner, so `c(v) = 0` and `δ* = 0`.
/// Under `Vacuous` singleton classes impose no constraint and `δ*` is the
/// minimum over classes of size at least 2 (or 0 if there are none).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SingletonPolicy {
    #[default]
    Strict,
    Vacuous,
}

impl std::str::FromStr for SingletonPolicy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(SingletonPolicy::Strict),
            "vacuous" => Ok(SingletonPolicy::Vacuous),
            other => Err(Error::Parameter(format!("unknown singleton policy {other:?}"))),
        }
    }
}

impl SingletonPolicy {
    pub fn name(self) -> &'static str {
        match self {
            SingletonPolicy::Strict => "strict",
            SingletonPolicy::Vacuous => "vacuous",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaProfile {
    /// `counts[i][j]`: number of same-color partners `u` of point `j` of
    /// color `i` whose line carries a point of another color.
    pub counts: Vec<Vec<usize>>,
    pub sizes: Vec<usize>,
    /// Minimum of `c(v)/|V_i|` per color.
    pub color_minima: Vec<BigRational>,
    pub delta_star: BigRational,
    pub policy: SingletonPolicy,
}

impl DeltaProfile {
    pub fn fraction(&self, color: usize, index: usize) -> BigRational {
        BigRational::new(
            BigInt::from(self.counts[color][index]),
            BigInt::from(self.sizes[color]),
        )
    }

    /// Whether the configuration is a `(delta, n)`-MR configuration.
    pub fn admits(&self, delta: &BigRational) -> bool {
        *delta <= self.delta_star
    }

    pub fn to_json(&self) -> Value {
        json!({
            "policy": self.policy.name(),
            "sizes": self.sizes,
            "counts": self.counts,
            "color_minima": self.color_minima.iter().map(format_rational).collect::<Vec<_>>(),
            "delta_star": format_rational(&self.delta_star),
            "delta_star_decimal": decimal(&self.delta_star),
        })
    }
}

pub fn compute_delta(config: &ColoredConfig, policy: SingletonPolicy) -> DeltaProfile {
    compute_delta_with_lines(config, &enumerate_lines(config), policy)
}

/// Same as [`compute_delta`] with a precomputed line list.
pub fn compute_delta_with_lines(
    config: &ColoredConfig,
    lines: &[LineRecord],
    policy: SingletonPolicy,
) -> DeltaProfile {
    let n = config.num_colors();
    let sizes = config.sizes();
    let mut counts: Vec<Vec<usize>> = sizes.iter().map(|&s| vec![0; s]).collect();
    let mut per_color = vec![0usize; n];
    for line in lines {
        per_color.iter_mut().for_each(|c| *c = 0);
        for &g in &line.members {
            per_color[config.color_of(g)] += 1;
        }
        // each pair lies on exactly one line, so crediting every same-color
        // partner on a multi-colored line counts c(v) exactly
        for &g in &line.members {
            let r = config.locate(g);
            let same = per_color[r.color];
            if same < line.len() {
                counts[r.color][r.index] += same - 1;
            }
        }
    }
    let color_minima: Vec<BigRational> = counts
        .iter()
        .zip(&sizes)
        .map(|(c, &s)| {
            BigRational::new(
                BigInt::from(*c.iter().min().unwrap()),
                BigInt::from(s),
            )
        })
        .collect();
    let constrained = color_minima
        .iter()
        .zip(&sizes)
        .filter(|(_, &s)| policy == SingletonPolicy::Strict || s >= 2)
        .map(|(m, _)| m);
    let delta_star = constrained.min().cloned().unwrap_or_else(BigRational::zero);
    DeltaProfile {
        counts,
        sizes,
        color_minima,
        delta_star,
        policy,
    }
}

#[derive(Debug, Clone)]
pub struct MrVerdict {
    pub holds: bool,
    /// A monochromatic line when `holds` is false.
    pub witness: Option<LineRecord>,
}

/// Classical two-color test: every line through two or more points meets
/// both colors.
pub fn is_mr_configuration(config: &ColoredConfig) -> Result<MrVerdict> {
    if config.num_colors() != 2 {
        return Err(Error::ColorCount {
            expected: 2,
            found: config.num_colors(),
        });
    }
    let witness = enumerate_lines(config).into_iter().find(|line| {
        let first = config.color_of(line.members[0]);
        line.members.iter().all(|&g| config.color_of(g) == first)
    });
    Ok(MrVerdict {
        holds: witness.is_none(),
        witness,
    })
}
