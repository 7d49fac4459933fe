//! Points, datasets, the distance oracle and the robust cost functions.
//!
//! Every distance used by the algorithms in this crate is obtained through a
//! [`DistanceOracle`], which counts evaluations so that the cost model of the
//! coreset constructions can be observed directly.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Identity of a point; dense in `0..n` for a loaded dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct PointId(pub usize);

impl From<usize> for PointId {
    fn from(v: usize) -> Self {
        PointId(v)
    }
}

/// A coreset point standing in for `multiplicity` original points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MultiplicityPoint {
    pub id: PointId,
    pub multiplicity: u64,
}

impl MultiplicityPoint {
    pub fn new(id: PointId, multiplicity: u64) -> Self {
        MultiplicityPoint { id, multiplicity }
    }

    pub fn unit(id: PointId) -> Self {
        MultiplicityPoint::new(id, 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum MetricKind {
    Euclidean,
    Matrix,
}

/// How much of the triangle inequality to check when loading a matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MatrixCheck {
    /// `min(1000, n^3)` triples (all of them when `n^3 <= 1000`).
    #[default]
    Sampled,
    /// Every ordered triple; `O(n^3)`.
    Strict,
}

const SAMPLED_TRIPLES: usize = 1000;
// Matrices are often produced by floating-point computations; allow for the
// last-bit noise that makes an exact metric look violated.
const TRIANGLE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone)]
enum Geometry {
    Euclidean { dim: usize, coords: Vec<f64> },
    Matrix { n: usize, entries: Vec<f64> },
}

/// A ground set of points with optional knapsack weights and category labels.
#[derive(Debug, Clone)]
pub struct Dataset {
    geometry: Geometry,
    weights: Option<Vec<f64>>,
    categories: Option<Vec<u32>>,
}

impl Dataset {
    /// Builds a Euclidean dataset; `rows[i]` holds the coordinates of point `i`.
    pub fn from_coords(rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if !rows.is_empty() && dim == 0 {
            return Err(Error::InvalidParameter(
                "points need at least one coordinate",
            ));
        }
        let mut coords = Vec::with_capacity(rows.len() * dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                    id: PointId(i),
                });
            }
            if row.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidParameter("coordinates must be finite"));
            }
            coords.extend_from_slice(row);
        }
        Ok(Dataset {
            geometry: Geometry::Euclidean { dim, coords },
            weights: None,
            categories: None,
        })
    }

    /// Points on the real line, one per value.
    pub fn from_line(values: &[f64]) -> Result<Self> {
        Dataset::from_coords(values.iter().map(|&v| alloc::vec![v]).collect())
    }

    /// Builds a dataset from a symmetric, zero-diagonal distance matrix.
    pub fn from_matrix(rows: Vec<Vec<f64>>, check: MatrixCheck) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in &rows {
            if row.len() != n {
                return Err(Error::NotAMetric("matrix is not square"));
            }
            entries.extend_from_slice(row);
        }
        for i in 0..n {
            if entries[i * n + i] != 0.0 {
                return Err(Error::NotAMetric("non-zero diagonal"));
            }
            for j in 0..n {
                let d = entries[i * n + j];
                if !d.is_finite() || d < 0.0 {
                    return Err(Error::NotAMetric("entries must be finite and non-negative"));
                }
                if d != entries[j * n + i] {
                    return Err(Error::NotAMetric("matrix is not symmetric"));
                }
            }
        }
        let at = |a: usize, b: usize| entries[a * n + b];
        let violates = |a: usize, b: usize, c: usize| {
            let direct = at(a, c);
            let detour = at(a, b) + at(b, c);
            direct > detour + TRIANGLE_SLACK * detour.max(1.0)
        };
        let all_triples = n.checked_pow(3).is_some_and(|t| t <= SAMPLED_TRIPLES);
        if check == MatrixCheck::Strict || all_triples {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        if violates(a, b, c) {
                            return Err(Error::NotAMetric("triangle inequality violated"));
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x0072_6961_6e67_6c65);
            for _ in 0..SAMPLED_TRIPLES {
                let (a, b, c) = (
                    rng.gen_range(0..n),
                    rng.gen_range(0..n),
                    rng.gen_range(0..n),
                );
                if violates(a, b, c) {
                    return Err(Error::NotAMetric("triangle inequality violated"));
                }
            }
        }
        Ok(Dataset {
            geometry: Geometry::Matrix { n, entries },
            weights: None,
            categories: None,
        })
    }

    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.len() {
            return Err(Error::InvalidParameter("one weight per point required"));
        }
        if let Some(i) = weights.iter().position(|w| !(0.0..=1.0).contains(w)) {
            return Err(Error::InvalidWeight(PointId(i)));
        }
        self.weights = Some(weights);
        Ok(self)
    }

    pub fn with_categories(mut self, categories: Vec<u32>) -> Result<Self> {
        if categories.len() != self.len() {
            return Err(Error::InvalidParameter("one category per point required"));
        }
        self.categories = Some(categories);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        match &self.geometry {
            Geometry::Euclidean { dim, coords } => {
                if *dim == 0 {
                    // zero-dimensional points are allowed only in the empty dataset
                    0
                } else {
                    coords.len() / dim
                }
            }
            Geometry::Matrix { n, .. } => *n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn ids(&self) -> Vec<PointId> {
        (0..self.len()).map(PointId).collect()
    }

    pub fn contains(&self, id: PointId) -> bool {
        id.0 < self.len()
    }

    pub fn kind(&self) -> MetricKind {
        match self.geometry {
            Geometry::Euclidean { .. } => MetricKind::Euclidean,
            Geometry::Matrix { .. } => MetricKind::Matrix,
        }
    }

    /// Coordinate dimension; `None` for matrix-backed datasets.
    pub fn dim(&self) -> Option<usize> {
        match self.geometry {
            Geometry::Euclidean { dim, .. } => Some(dim),
            Geometry::Matrix { .. } => None,
        }
    }

    pub fn coords(&self, id: PointId) -> Option<&[f64]> {
        match &self.geometry {
            Geometry::Euclidean { dim, coords } if self.contains(id) => {
                Some(&coords[id.0 * dim..(id.0 + 1) * dim])
            }
            _ => None,
        }
    }

    /// Row `id` of the distance matrix, for matrix-backed datasets.
    pub fn matrix_row(&self, id: PointId) -> Option<&[f64]> {
        match &self.geometry {
            Geometry::Matrix { n, entries } if id.0 < *n => {
                Some(&entries[id.0 * n..(id.0 + 1) * n])
            }
            _ => None,
        }
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    pub fn weight(&self, id: PointId) -> Option<f64> {
        self.weights.as_ref().and_then(|w| w.get(id.0).copied())
    }

    pub fn categories(&self) -> Option<&[u32]> {
        self.categories.as_deref()
    }

    pub fn category(&self, id: PointId) -> Option<u32> {
        self.categories.as_ref().and_then(|c| c.get(id.0).copied())
    }

    fn raw_distance(&self, a: usize, b: usize) -> f64 {
        match &self.geometry {
            Geometry::Euclidean { dim, coords } => {
                let pa = &coords[a * dim..(a + 1) * dim];
                let pb = &coords[b * dim..(b + 1) * dim];
                let sq: f64 = pa.iter().zip(pb).map(|(x, y)| (x - y) * (x - y)).sum();
                libm::sqrt(sq)
            }
            Geometry::Matrix { n, entries } => entries[a * n + b],
        }
    }
}

/// Counting distance oracle over a dataset.
///
/// Read-only apart from the evaluation tally, which is atomic so the oracle
/// can be shared by concurrent workers.
#[derive(Debug)]
pub struct DistanceOracle<'a> {
    data: &'a Dataset,
    evals: AtomicUsize,
}

impl<'a> DistanceOracle<'a> {
    pub fn new(data: &'a Dataset) -> Self {
        DistanceOracle {
            data,
            evals: AtomicUsize::new(0),
        }
    }

    pub fn dataset(&self) -> &'a Dataset {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn kind(&self) -> MetricKind {
        self.data.kind()
    }

    /// Number of distance evaluations performed so far.
    pub fn evaluations(&self) -> usize {
        self.evals.load(AtomicOrdering::Relaxed)
    }

    pub fn check(&self, id: PointId) -> Result<()> {
        if self.data.contains(id) {
            Ok(())
        } else {
            Err(Error::InvalidPointId(id))
        }
    }

    pub fn check_all(&self, ids: &[PointId]) -> Result<()> {
        ids.iter().try_for_each(|&id| self.check(id))
    }

    /// Checked distance between two points.
    pub fn distance(&self, a: PointId, b: PointId) -> Result<f64> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.dist(a, b))
    }

    /// Distance between two ids already known to be valid.
    ///
    /// Panics on an out-of-range id.
    #[inline]
    pub fn dist(&self, a: PointId, b: PointId) -> f64 {
        assert!(
            self.data.contains(a) && self.data.contains(b),
            "invalid point id"
        );
        self.evals.fetch_add(1, AtomicOrdering::Relaxed);
        self.data.raw_distance(a.0, b.0)
    }

    /// `d(j, S)` together with the index of the closest center (ties to the
    /// lowest index). Performs exactly `|S|` evaluations.
    pub fn nearest(&self, j: PointId, centers: &[PointId]) -> (usize, f64) {
        let mut best = (usize::MAX, f64::INFINITY);
        for (idx, &c) in centers.iter().enumerate() {
            let d = self.dist(j, c);
            if d < best.1 {
                best = (idx, d);
            }
        }
        best
    }

    /// [`nearest`](Self::nearest), `None` for an empty `S`.
    pub fn nearest_opt(&self, j: PointId, centers: &[PointId]) -> Option<(usize, f64)> {
        (!centers.is_empty()).then(|| self.nearest(j, centers))
    }

    /// `d(j, S)`; `+inf` for an empty `S`.
    pub fn dist_to_set(&self, j: PointId, centers: &[PointId]) -> f64 {
        self.nearest(j, centers).1
    }

    /// Full pairwise matrix over `ids`, row-major in the order given.
    pub fn local_matrix(&self, ids: &[PointId]) -> Vec<f64> {
        let m = ids.len();
        let mut out = alloc::vec![0.0; m * m];
        for a in 0..m {
            for b in (a + 1)..m {
                let d = self.dist(ids[a], ids[b]);
                out[a * m + b] = d;
                out[b * m + a] = d;
            }
        }
        out
    }
}

/// `max_{j in points} d(j, centers)`.
pub fn coverage_radius(
    centers: &[PointId],
    points: &[PointId],
    oracle: &DistanceOracle<'_>,
) -> Result<f64> {
    if centers.is_empty() {
        return Err(Error::EmptyCenterSet);
    }
    oracle.check_all(centers)?;
    oracle.check_all(points)?;
    Ok(points
        .iter()
        .map(|&j| oracle.dist_to_set(j, centers))
        .fold(0.0, f64::max))
}

/// Robust cost with multiplicities: the smallest `v` such that the points
/// within distance `v` of `centers` carry mass at least `mu - z`.
pub fn robust_cost(
    centers: &[PointId],
    points: &[MultiplicityPoint],
    z: u64,
    oracle: &DistanceOracle<'_>,
) -> Result<f64> {
    if centers.is_empty() {
        return Err(Error::EmptyCenterSet);
    }
    oracle.check_all(centers)?;
    let mut entries = Vec::with_capacity(points.len());
    for p in points {
        oracle.check(p.id)?;
        entries.push((oracle.dist_to_set(p.id, centers), p.id, p.multiplicity));
    }
    robust_order_statistic(entries, z)
}

/// [`robust_cost`] with every multiplicity equal to one.
pub fn robust_cost_unit(
    centers: &[PointId],
    points: &[PointId],
    z: u64,
    oracle: &DistanceOracle<'_>,
) -> Result<f64> {
    let pts: Vec<_> = points
        .iter()
        .map(|&id| MultiplicityPoint::unit(id))
        .collect();
    robust_cost(centers, &pts, z, oracle)
}

/// Core of the robust cost: given `(distance, id, mass)` entries, sort them by
/// distance (ties by id) and return the distance at which the cumulative mass
/// first reaches `total - z`.
pub fn robust_order_statistic(mut entries: Vec<(f64, PointId, u64)>, z: u64) -> Result<f64> {
    let mass: u64 = entries.iter().map(|e| e.2).sum();
    if z >= mass {
        return Err(Error::OutlierBudgetExhausted { z, mass });
    }
    let need = mass - z;
    entries.sort_unstable_by(|a, b| cmp_dist(a.0, b.0).then(a.1.cmp(&b.1)));
    let mut acc = 0u64;
    for (d, _, m) in entries {
        acc += m;
        if acc >= need {
            return Ok(d);
        }
    }
    unreachable!("cumulative mass reaches the total")
}

#[inline]
pub(crate) fn cmp_dist(a: f64, b: f64) -> Ordering {
    a.total_cmp(&b)
}
