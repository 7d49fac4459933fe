//! Seeded synthetic datasets with planted outliers.

use std::fmt;
use std::str::FromStr;

use anyhow::{bail, ensure, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::io::PointRecord;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Layout {
    /// Integer lattice, filled in row-major order.
    Grid,
    /// Gaussian blobs with per-axis standard deviation `spread`.
    Blobs { count: usize, spread: f64 },
    /// Uniform in `[0, side]^d`.
    Cube { side: f64 },
}

impl Layout {
    /// Length unit that planted-outlier displacement is measured in.
    pub fn scale(&self) -> f64 {
        match *self {
            Layout::Grid => 1.0,
            Layout::Blobs { spread, .. } => spread,
            Layout::Cube { side } => side,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WeightModel {
    None,
    Constant { value: f64 },
    Uniform { lo: f64, hi: f64 },
}

/// `none`, `const:W` or `uniform:A:B`.
impl FromStr for WeightModel {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["none"] => Ok(WeightModel::None),
            ["const", v] => Ok(WeightModel::Constant { value: v.parse()? }),
            ["uniform", a, b] => Ok(WeightModel::Uniform {
                lo: a.parse()?,
                hi: b.parse()?,
            }),
            _ => bail!("weight model must be none, const:W or uniform:A:B"),
        }
    }
}

impl fmt::Display for WeightModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightModel::None => f.write_str("none"),
            WeightModel::Constant { value } => write!(f, "const:{value}"),
            WeightModel::Uniform { lo, hi } => write!(f, "uniform:{lo}:{hi}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    /// Total points, planted outliers included.
    pub n: usize,
    pub dim: usize,
    pub layout: Layout,
    /// Planted outliers, appended after the inliers.
    pub outliers: usize,
    /// Minimum outlier distance to every inlier and blob center, in units of
    /// the layout scale.
    pub displacement: f64,
    pub weights: WeightModel,
    /// Number of categories drawn uniformly per point.
    pub categories: Option<u32>,
    pub seed: u64,
}

impl GenSpec {
    pub fn validate(&self) -> Result<()> {
        ensure!(self.n >= 1, "n must be at least 1");
        ensure!(self.dim >= 1, "dimension must be at least 1");
        ensure!(self.outliers < self.n, "at least one inlier is needed");
        ensure!(
            self.displacement.is_finite() && self.displacement > 0.0,
            "displacement must be positive"
        );
        match self.layout {
            Layout::Grid => {}
            Layout::Blobs { count, spread } => {
                ensure!(count >= 1, "at least one blob is needed");
                ensure!(
                    spread.is_finite() && spread > 0.0,
                    "spread must be positive"
                );
            }
            Layout::Cube { side } => {
                ensure!(side.is_finite() && side > 0.0, "side must be positive")
            }
        }
        match self.weights {
            WeightModel::None => {}
            WeightModel::Constant { value } => {
                ensure!((0.0..=1.0).contains(&value), "weights must lie in [0, 1]")
            }
            WeightModel::Uniform { lo, hi } => ensure!(
                0.0 <= lo && lo <= hi && hi <= 1.0,
                "uniform weights need 0 <= a <= b <= 1"
            ),
        }
        ensure!(
            self.categories != Some(0),
            "at least one category is needed"
        );
        Ok(())
    }
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Smallest `s` with `s^d >= n`.
fn grid_side(n: usize, d: usize) -> usize {
    let mut s = 1usize;
    while s.checked_pow(d as u32).is_some_and(|v| v < n) {
        s += 1;
    }
    s
}

pub fn generate(spec: &GenSpec) -> Result<Vec<PointRecord>> {
    spec.validate()?;
    let d = spec.dim;
    let inliers = spec.n - spec.outliers;
    let mut geo = stream_rng(spec.seed, 0);
    let mut anchors: Vec<Vec<f64>> = Vec::new();

    let mut coords: Vec<Vec<f64>> = match spec.layout {
        Layout::Grid => {
            let side = grid_side(inliers, d);
            (0..inliers)
                .map(|i| {
                    let mut rest = i;
                    let mut p = vec![0.0; d];
                    for x in p.iter_mut().rev() {
                        *x = (rest % side) as f64;
                        rest /= side;
                    }
                    p
                })
                .collect()
        }
        Layout::Blobs { count, spread } => {
            let box_side = 10.0 * spread * count as f64;
            anchors = (0..count)
                .map(|_| (0..d).map(|_| geo.gen_range(0.0..box_side)).collect())
                .collect();
            let noise = Normal::new(0.0, spread)?;
            (0..inliers)
                .map(|i| {
                    anchors[i % count]
                        .iter()
                        .map(|c| c + noise.sample(&mut geo))
                        .collect()
                })
                .collect()
        }
        Layout::Cube { side } => (0..inliers)
            .map(|_| (0..d).map(|_| geo.gen_range(0.0..=side)).collect())
            .collect(),
    };

    if spec.outliers > 0 {
        // place outliers beyond the enclosing ball of inliers and anchors
        let mut centroid = vec![0.0; d];
        for p in &coords {
            centroid
                .iter_mut()
                .zip(p)
                .for_each(|(c, x)| *c += x / inliers as f64);
        }
        let reach = coords
            .iter()
            .chain(&anchors)
            .map(|p| euclid(p, &centroid))
            .fold(0.0, f64::max);
        let gap = spec.displacement * spec.layout.scale();
        let mut out = stream_rng(spec.seed, 1);
        for _ in 0..spec.outliers {
            let dir = loop {
                let v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut out)).collect();
                let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if len > 1e-9 {
                    break v.into_iter().map(|x| x / len).collect::<Vec<f64>>();
                }
            };
            let radius = (reach + gap) * out.gen_range(1.0..1.5);
            coords.push(
                centroid
                    .iter()
                    .zip(&dir)
                    .map(|(c, u)| c + radius * u)
                    .collect(),
            );
        }
    }

    let mut wr = stream_rng(spec.seed, 2);
    let mut cr = stream_rng(spec.seed, 3);
    Ok(coords
        .into_iter()
        .enumerate()
        .map(|(i, coords)| PointRecord {
            id: Some(i),
            coords,
            weight: match spec.weights {
                WeightModel::None => None,
                WeightModel::Constant { value } => Some(value),
                WeightModel::Uniform { lo, hi } => Some(wr.gen_range(lo..=hi)),
            },
            category: spec.categories.map(|c| cr.gen_range(0..c)),
        })
        .collect())
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(layout: Layout) -> GenSpec {
        GenSpec {
            n: 40,
            dim: 2,
            layout,
            outliers: 0,
            displacement: 5.0,
            weights: WeightModel::None,
            categories: None,
            seed: 9,
        }
    }

    #[test]
    fn line_grid() {
        let s = GenSpec {
            n: 4,
            dim: 1,
            ..spec(Layout::Grid)
        };
        let pts: Vec<Vec<f64>> = generate(&s)
            .unwrap()
            .into_iter()
            .map(|p| p.coords)
            .collect();
        assert_eq!(pts, [[0.0], [1.0], [2.0], [3.0]]);
        assert_eq!(grid_side(1024, 2), 32);
        assert_eq!(grid_side(1, 3), 1);
    }

    #[test]
    fn planted_outliers_are_far() {
        let s = GenSpec {
            outliers: 3,
            ..spec(Layout::Blobs {
                count: 2,
                spread: 1.0,
            })
        };
        let pts = generate(&s).unwrap();
        let (inl, out) = pts.split_at(37);
        for o in out {
            for p in inl {
                assert!(euclid(&o.coords, &p.coords) >= 5.0);
            }
        }
    }

    #[test]
    fn model_parsing_and_validation() {
        assert_eq!(
            "uniform:0.3:1".parse::<WeightModel>().unwrap(),
            WeightModel::Uniform { lo: 0.3, hi: 1.0 }
        );
        assert_eq!(
            "const:0.5".parse::<WeightModel>().unwrap().to_string(),
            "const:0.5"
        );
        assert!("uniform:2:1".parse::<WeightModel>().is_ok());
        let bad = GenSpec {
            weights: WeightModel::Uniform { lo: 0.8, hi: 0.2 },
            ..spec(Layout::Grid)
        };
        assert!(generate(&bad).is_err());
        assert!(generate(&GenSpec {
            outliers: 40,
            ..spec(Layout::Grid)
        })
        .is_err());
    }

    #[test]
    fn weights_and_categories_in_range() {
        let s = GenSpec {
            weights: WeightModel::Uniform { lo: 0.3, hi: 1.0 },
            categories: Some(3),
            ..spec(Layout::Cube { side: 10.0 })
        };
        for p in generate(&s).unwrap() {
            assert!((0.3..=1.0).contains(&p.weight.unwrap()));
            assert!(p.category.unwrap() < 3);
            assert!(p.coords.iter().all(|x| (0.0..=10.0).contains(x)));
        }
    }
}
