//! Colored point configurations, partitions, and the JSON configuration
//! format.
//!
//! ```json
//! { "field": "rational", "dim": 2, "colors": [ [["0","0"], [1, 0]], [["1/2", 0]] ] }
//! ```
//!
//! Classes are reordered by nonincreasing size at load (stable on ties).
//! `permutation[i]` is the input position of sorted class `i`; serialized
//! files carry it so that loading them again composes back to the same
//! labels.

use std::collections::HashMap;
use std::ops::Range;

use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::{Error, PointLocation, Result};
use crate::scalar::{scalar_from_json, Field, Scalar};

pub type Point = Vec<Scalar>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoredConfig {
    field: Field,
    dim: usize,
    classes: Vec<Vec<Point>>,
    permutation: Vec<usize>,
    offsets: Vec<usize>,
}

/// A point of the configuration addressed by sorted color and position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PointRef {
    pub color: usize,
    pub index: usize,
}

impl ColoredConfig {
    /// Validates and canonicalizes. `classes` are in input order.
    pub fn new(field: Field, dim: usize, classes: Vec<Vec<Point>>) -> Result<Self> {
        let n = classes.len();
        Self::with_permutation(field, dim, classes, (0..n).collect())
    }

    fn with_permutation(
        field: Field,
        dim: usize,
        classes: Vec<Vec<Point>>,
        labels: Vec<usize>,
    ) -> Result<Self> {
        if classes.is_empty() {
            return Err(Error::NoColors);
        }
        let mut seen: HashMap<&Point, PointLocation> = HashMap::new();
        for (color, class) in classes.iter().enumerate() {
            if class.is_empty() {
                return Err(Error::EmptyClass { color });
            }
            for (index, p) in class.iter().enumerate() {
                let location = PointLocation { color, index };
                if p.len() != dim {
                    return Err(Error::DimensionMismatch {
                        location,
                        expected: dim,
                        found: p.len(),
                    });
                }
                if field == Field::Rational && !p.iter().all(Scalar::is_real) {
                    return Err(Error::NonRealCoordinate { location });
                }
                if let Some(first) = seen.insert(p, location) {
                    return Err(Error::DuplicatePoint {
                        first,
                        second: location,
                    });
                }
            }
        }
        let mut order: Vec<usize> = (0..classes.len()).collect();
        order.sort_by(|&a, &b| classes[b].len().cmp(&classes[a].len()));
        let permutation = order.iter().map(|&i| labels[i]).collect();
        let mut slots: Vec<Option<Vec<Point>>> = classes.into_iter().map(Some).collect();
        let classes: Vec<Vec<Point>> = order
            .iter()
            .map(|&i| slots[i].take().expect("each class moved once"))
            .collect();
        let mut offsets = vec![0];
        for c in &classes {
            offsets.push(offsets.last().unwrap() + c.len());
        }
        Ok(ColoredConfig {
            field,
            dim,
            classes,
            permutation,
            offsets,
        })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_colors(&self) -> usize {
        self.classes.len()
    }

    pub fn num_points(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn classes(&self) -> &[Vec<Point>] {
        &self.classes
    }

    pub fn class(&self, color: usize) -> &[Point] {
        &self.classes[color]
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.classes.iter().map(Vec::len).collect()
    }

    /// Input position of each sorted class.
    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    /// Global indices `start..end` of a run of colors `first..last`.
    pub fn color_range(&self, colors: Range<usize>) -> Range<usize> {
        self.offsets[colors.start]..self.offsets[colors.end]
    }

    pub fn global_index(&self, p: PointRef) -> usize {
        self.offsets[p.color] + p.index
    }

    pub fn locate(&self, global: usize) -> PointRef {
        let color = self.offsets.partition_point(|&o| o <= global) - 1;
        PointRef {
            color,
            index: global - self.offsets[color],
        }
    }

    pub fn color_of(&self, global: usize) -> usize {
        self.locate(global).color
    }

    pub fn point(&self, global: usize) -> &Point {
        let r = self.locate(global);
        &self.classes[r.color][r.index]
    }

    /// All points in global order: class 0 first, then class 1, and so on.
    pub fn points(&self) -> Vec<Point> {
        self.classes.iter().flatten().cloned().collect()
    }

    pub fn points_in(&self, globals: Range<usize>) -> Vec<Point> {
        globals.map(|g| self.point(g).clone()).collect()
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: Value = serde_json::from_str(text)?;
        Self::from_json(&raw)
    }

    pub fn from_json(raw: &Value) -> Result<Self> {
        #[derive(Deserialize)]
        struct RawConfig {
            #[serde(default)]
            field: Field,
            dim: usize,
            colors: Vec<Vec<Vec<Value>>>,
            #[serde(default)]
            permutation: Option<Vec<usize>>,
        }
        let raw = RawConfig::deserialize(raw).map_err(|e| Error::Format(e.to_string()))?;
        let mut classes = Vec::with_capacity(raw.colors.len());
        for (color, class) in raw.colors.iter().enumerate() {
            let mut pts = Vec::with_capacity(class.len());
            for (index, coords) in class.iter().enumerate() {
                let p = coords
                    .iter()
                    .enumerate()
                    .map(|(coord, v)| {
                        scalar_from_json(v).map_err(|e| Error::MalformedCoordinate {
                            location: PointLocation { color, index },
                            coord,
                            reason: e.to_string(),
                        })
                    })
                    .collect::<Result<Point>>()?;
                pts.push(p);
            }
            classes.push(pts);
        }
        let n = classes.len();
        let labels = match raw.permutation {
            Some(p) => {
                let mut check = p.clone();
                check.sort_unstable();
                if check != (0..n).collect::<Vec<_>>() {
                    return Err(Error::Format(format!(
                        "permutation {p:?} is not a permutation of 0..{n}"
                    )));
                }
                p
            }
            None => (0..n).collect(),
        };
        Self::with_permutation(raw.field, raw.dim, classes, labels)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "field": self.field,
            "dim": self.dim,
            "colors": self.classes,
            "permutation": self.permutation,
        })
    }
}

/// A cut `0 <= x < y <= n` of the color indices into
/// `P1 = V_1..V_x`, `P2 = V_{x+1}..V_y`, `P3 = V_{y+1}..V_n`.
///
/// Cut indices are 1-based as colors; the point ranges are global indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub x: usize,
    pub y: usize,
    pub p1: Range<usize>,
    pub p2: Range<usize>,
    pub p3: Range<usize>,
}

impl Partition {
    pub fn block_of(&self, global: usize) -> Block {
        if self.p1.contains(&global) {
            Block::P1
        } else if self.p2.contains(&global) {
            Block::P2
        } else {
            Block::P3
        }
    }

    pub fn range(&self, block: Block) -> Range<usize> {
        match block {
            Block::P1 => self.p1.clone(),
            Block::P2 => self.p2.clone(),
            Block::P3 => self.p3.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Block {
    P1,
    P2,
    P3,
}

pub fn restrict_partition(config: &ColoredConfig, x: usize, y: usize) -> Result<Partition> {
    let n = config.num_colors();
    if x >= y || y > n {
        return Err(Error::PartitionRange { x, y, n });
    }
    Ok(Partition {
        x,
        y,
        p1: config.color_range(0..x),
        p2: config.color_range(x..y),
        p3: config.color_range(y..n),
    })
}

/// Builds a rational configuration from integer coordinates.
pub fn config_from_ints(classes: &[Vec<Vec<i64>>]) -> Result<ColoredConfig> {
    let dim = classes
        .first()
        .and_then(|c| c.first())
        .map_or(0, Vec::len);
    let classes = classes
        .iter()
        .map(|c| {
            c.iter()
                .map(|p| p.iter().map(|&v| Scalar::from_integer(v)).collect())
                .collect()
        })
        .collect();
    ColoredConfig::new(Field::Rational, dim, classes)
}
