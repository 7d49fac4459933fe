//! One-pass scaling estimate for `target`-center.
//!
//! A base guess of 0 keeps every distinct point. Once more than `target`
//! distinct points have arrived, a ladder of `L` guesses
//! `g_i = g_0 (1 + gamma)^i` replaces it, with `g_0` half the smallest
//! distance among those points and `gamma = delta / 5`. Each guess keeps
//! centers pairwise farther than `2 g` apart: an arriving point farther than
//! `2 g` from all of them opens a new center, otherwise it joins the nearest
//! one and the guess's coverage bound grows to that distance.
//!
//! A guess with more than `target` centers proves the optimum exceeds it.
//! It and every smaller guess are dropped; guess `i` is replaced by guess
//! `i + L`, whose value is at least `(1 + 5 / delta) g_i`. The replacement is
//! seeded by packing the old centers at `2 g_{i+L}`, so its coverage bound is
//! the old bound plus the largest move. These increments form a geometric
//! series, which keeps the smallest surviving bound within `(2 + delta)` of
//! the optimum.
//!
//! Each guess carries a payload that observes the same decisions, which is
//! how the streaming coresets ride on the sketch.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matroid::Matroid;
use crate::metric::{DistanceOracle, PointId};

/// Number of live guesses for a given `delta`.
pub fn ladder_len(delta: f64) -> usize {
    let gamma = delta / 5.0;
    let span = 1.0 + 5.0 / delta;
    (libm::ceil(libm::log(span) / libm::log1p(gamma)) as usize).max(1)
}

/// Guards computed bounds against rounding in the triangle inequality.
fn inflate(x: f64) -> f64 {
    x * (1.0 + 4.0 * f64::EPSILON)
}

/// Nearest of `list` to `p`, ties to the lowest id.
fn nearest_by_id(
    p: PointId,
    list: &[PointId],
    oracle: &DistanceOracle<'_>,
) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &q) in list.iter().enumerate() {
        let d = oracle.dist(p, q);
        let better = match best {
            None => true,
            Some((b, bd)) => d < bd || (d == bd && q < list[b]),
        };
        if better {
            best = Some((i, d));
        }
    }
    best
}

/// Per-guess state that follows the sketch's decisions.
pub trait SketchPayload {
    type State: Clone;
    /// State of a fresh guess of value `g`.
    fn empty(&self, g: f64) -> Self::State;
    /// `p` was attached to center `slot`; `opened` when it became that center.
    fn absorb(
        &self,
        state: &mut Self::State,
        p: PointId,
        slot: usize,
        opened: bool,
        oracle: &DistanceOracle<'_>,
    );
    /// State for a guess of value `g` built from a dropped guess whose center
    /// `i` moved to new center `slot_map[i]` (of `slots` new centers).
    fn reseed(
        &self,
        old: &Self::State,
        g: f64,
        slot_map: &[usize],
        slots: usize,
        oracle: &DistanceOracle<'_>,
    ) -> Self::State;
    /// Points held by the state.
    fn items(&self, state: &Self::State) -> usize;
}

/// The bare sketch.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoPayload;

impl SketchPayload for NoPayload {
    type State = ();

    fn empty(&self, _: f64) {}

    fn absorb(&self, _: &mut (), _: PointId, _: usize, _: bool, _: &DistanceOracle<'_>) {}

    fn reseed(&self, _: &(), _: f64, _: &[usize], _: usize, _: &DistanceOracle<'_>) {}

    fn items(&self, _: &()) -> usize {
        0
    }
}

/// One guess of the ladder.
#[derive(Debug, Clone)]
pub struct Guess<S> {
    /// Ladder index, `None` for the base guess 0.
    pub index: Option<usize>,
    pub value: f64,
    pub centers: Vec<PointId>,
    /// Every point seen lies within this distance of `centers`.
    pub radius: f64,
    pub state: S,
}

/// The scaling sketch with a payload per guess.
pub struct ScalingSketch<'o, P: SketchPayload> {
    oracle: &'o DistanceOracle<'o>,
    payload: P,
    target: usize,
    delta: f64,
    gamma: f64,
    ladder: usize,
    g0: f64,
    live: Vec<Guess<P::State>>,
    lower_bound: f64,
    seen: usize,
    failures: usize,
    peak_items: usize,
}

impl<'o, P: SketchPayload> ScalingSketch<'o, P> {
    pub fn new(
        oracle: &'o DistanceOracle<'o>,
        target: usize,
        delta: f64,
        payload: P,
    ) -> Result<Self> {
        if target == 0 {
            return Err(Error::InvalidParameter("target must be at least 1"));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidParameter("delta must lie in (0, 1)"));
        }
        let base = Guess {
            index: None,
            value: 0.0,
            centers: Vec::new(),
            radius: 0.0,
            state: payload.empty(0.0),
        };
        Ok(ScalingSketch {
            oracle,
            payload,
            target,
            delta,
            gamma: delta / 5.0,
            ladder: ladder_len(delta),
            g0: 0.0,
            live: vec![base],
            lower_bound: 0.0,
            seen: 0,
            failures: 0,
            peak_items: 0,
        })
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn payload(&self) -> &P {
        &self.payload
    }

    /// Value of ladder guess `i`.
    pub fn value_of(&self, i: usize) -> f64 {
        self.g0 * libm::pow(1.0 + self.gamma, i as f64)
    }

    pub fn insert(&mut self, p: PointId) {
        self.seen += 1;
        for guess in &mut self.live {
            Self::absorb(&self.payload, self.oracle, guess, p);
        }
        self.resolve_failures();
        self.peak_items = self.peak_items.max(self.items());
    }

    fn absorb(payload: &P, oracle: &DistanceOracle<'_>, guess: &mut Guess<P::State>, p: PointId) {
        let (slot, opened) = match oracle.nearest_opt(p, &guess.centers) {
            Some((slot, d)) if d <= 2.0 * guess.value => {
                guess.radius = guess.radius.max(d);
                (slot, false)
            }
            _ => {
                guess.centers.push(p);
                (guess.centers.len() - 1, true)
            }
        };
        payload.absorb(&mut guess.state, p, slot, opened, oracle);
    }

    fn resolve_failures(&mut self) {
        while let Some(pos) = self
            .live
            .iter()
            .rposition(|g| g.centers.len() > self.target)
        {
            self.failures += 1;
            self.lower_bound = self.lower_bound.max(self.live[pos].value);
            let dropped: Vec<Guess<P::State>> = self.live.drain(..=pos).collect();
            let mut fresh = Vec::with_capacity(dropped.len());
            for old in &dropped {
                match old.index {
                    None => {
                        let c = &old.centers;
                        let mut dmin = f64::INFINITY;
                        for a in 0..c.len() {
                            for b in a + 1..c.len() {
                                dmin = dmin.min(self.oracle.dist(c[a], c[b]));
                            }
                        }
                        self.g0 = dmin / 2.0;
                        for i in 0..self.ladder {
                            fresh.push(self.reseed(old, i));
                        }
                    }
                    Some(i) => fresh.push(self.reseed(old, i + self.ladder)),
                }
            }
            self.live.extend(fresh);
            self.live.sort_by_key(|g| g.index);
        }
    }

    fn reseed(&self, old: &Guess<P::State>, index: usize) -> Guess<P::State> {
        let value = self.value_of(index);
        let mut centers: Vec<PointId> = Vec::new();
        let mut slot_map = Vec::with_capacity(old.centers.len());
        let mut moved = 0.0f64;
        for &c in &old.centers {
            match self.oracle.nearest_opt(c, &centers) {
                Some((slot, d)) if d <= 2.0 * value => {
                    slot_map.push(slot);
                    moved = moved.max(d);
                }
                _ => {
                    centers.push(c);
                    slot_map.push(centers.len() - 1);
                }
            }
        }
        let state = self
            .payload
            .reseed(&old.state, value, &slot_map, centers.len(), self.oracle);
        Guess {
            index: Some(index),
            value,
            radius: inflate(old.radius + moved),
            centers,
            state,
        }
    }

    /// The smallest surviving guess.
    pub fn best(&self) -> &Guess<P::State> {
        &self.live[0]
    }

    /// Consumes the sketch, returning the smallest surviving guess.
    pub fn into_best(mut self) -> Guess<P::State> {
        self.live.swap_remove(0)
    }

    pub fn live(&self) -> &[Guess<P::State>] {
        &self.live
    }

    /// Largest guess proven below the optimum (0 if none failed).
    pub fn lower_bound(&self) -> f64 {
        self.lower_bound
    }

    pub fn points_seen(&self) -> usize {
        self.seen
    }

    pub fn failures(&self) -> usize {
        self.failures
    }

    /// Points currently held across all guesses.
    pub fn items(&self) -> usize {
        self.live
            .iter()
            .map(|g| g.centers.len() + self.payload.items(&g.state))
            .sum()
    }

    pub fn peak_items(&self) -> usize {
        self.peak_items
    }
}

impl<P: SketchPayload> core::fmt::Debug for ScalingSketch<'_, P> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("ScalingSketch")
            .field("target", &self.target)
            .field("delta", &self.delta)
            .field("live", &self.live.len())
            .field("lower_bound", &self.lower_bound)
            .field("seen", &self.seen)
            .finish()
    }
}

/// Per-witness totals for knapsack coresets: `(mass, lightest point)` per center.
#[derive(Debug, Clone, Copy)]
pub struct KnapsackPayload<'w> {
    pub weights: &'w [f64],
}

impl KnapsackPayload<'_> {
    fn lighter(&self, a: PointId, b: PointId) -> PointId {
        match self.weights[a.0]
            .total_cmp(&self.weights[b.0])
            .then(a.cmp(&b))
        {
            core::cmp::Ordering::Greater => b,
            _ => a,
        }
    }
}

impl SketchPayload for KnapsackPayload<'_> {
    type State = Vec<(u64, PointId)>;

    fn empty(&self, _: f64) -> Self::State {
        Vec::new()
    }

    fn absorb(
        &self,
        state: &mut Self::State,
        p: PointId,
        slot: usize,
        opened: bool,
        _: &DistanceOracle<'_>,
    ) {
        if opened {
            state.push((1, p));
        } else {
            let entry = &mut state[slot];
            entry.0 += 1;
            entry.1 = self.lighter(entry.1, p);
        }
    }

    fn reseed(
        &self,
        old: &Self::State,
        _: f64,
        slot_map: &[usize],
        slots: usize,
        _: &DistanceOracle<'_>,
    ) -> Self::State {
        let mut merged: Vec<Option<(u64, PointId)>> = vec![None; slots];
        for (&(mass, w), &slot) in old.iter().zip(slot_map) {
            merged[slot] = Some(match merged[slot] {
                None => (mass, w),
                Some((m, v)) => (m + mass, self.lighter(v, w)),
            });
        }
        merged
            .into_iter()
            .map(|e| e.expect("every new center keeps itself"))
            .collect()
    }

    fn items(&self, state: &Self::State) -> usize {
        state.len()
    }
}

/// A cell of the streaming matroid coreset.
#[derive(Debug, Clone, PartialEq)]
pub struct StreamCell {
    pub anchor: PointId,
    /// Every point of the cell lies within `rho` of the anchor.
    pub rho: f64,
    /// Greedily maintained maximal independent subset of the cell.
    pub y: Vec<PointId>,
    /// Proxy mass of each member of `y`.
    pub mass: Vec<u64>,
}

/// Cells of one guess, at threshold `eps' g / beta`.
#[derive(Debug, Clone, PartialEq)]
pub struct CellState {
    pub threshold: f64,
    pub cells: Vec<StreamCell>,
    /// `point -> (cell, proxy)` when auditing.
    pub audit: Option<BTreeMap<PointId, (usize, PointId)>>,
}

/// Cell payload for the one-pass matroid coreset.
#[derive(Clone, Copy)]
pub struct CellPayload<'m> {
    pub matroid: &'m dyn Matroid,
    pub eps_prime: f64,
    pub beta: f64,
    pub audit: bool,
}

impl CellPayload<'_> {
    pub fn threshold(&self, g: f64) -> f64 {
        self.eps_prime * g / self.beta
    }
}

impl SketchPayload for CellPayload<'_> {
    type State = CellState;

    fn empty(&self, g: f64) -> CellState {
        CellState {
            threshold: self.threshold(g),
            cells: Vec::new(),
            audit: self.audit.then(BTreeMap::new),
        }
    }

    fn absorb(
        &self,
        state: &mut CellState,
        p: PointId,
        _: usize,
        _: bool,
        oracle: &DistanceOracle<'_>,
    ) {
        let anchors: Vec<PointId> = state.cells.iter().map(|c| c.anchor).collect();
        let (index, proxy) = match nearest_by_id(p, &anchors, oracle) {
            Some((ci, d)) if d <= state.threshold => {
                let cell = &mut state.cells[ci];
                cell.rho = cell.rho.max(d);
                let mut trial = cell.y.clone();
                trial.push(p);
                let proxy = if self.matroid.independent(&trial) {
                    cell.y.push(p);
                    cell.mass.push(1);
                    p
                } else {
                    let (slot, _) = nearest_by_id(p, &cell.y, oracle).expect("cells are non-empty");
                    cell.mass[slot] += 1;
                    cell.y[slot]
                };
                (ci, proxy)
            }
            _ => {
                state.cells.push(StreamCell {
                    anchor: p,
                    rho: 0.0,
                    y: vec![p],
                    mass: vec![1],
                });
                (state.cells.len() - 1, p)
            }
        };
        if let Some(audit) = state.audit.as_mut() {
            audit.insert(p, (index, proxy));
        }
    }

    fn reseed(
        &self,
        old: &CellState,
        g: f64,
        _: &[usize],
        _: usize,
        oracle: &DistanceOracle<'_>,
    ) -> CellState {
        let threshold = self.threshold(g);
        let mut cells: Vec<StreamCell> = Vec::new();
        let mut cell_map = Vec::with_capacity(old.cells.len());
        for cell in &old.cells {
            let anchors: Vec<PointId> = cells.iter().map(|c| c.anchor).collect();
            match nearest_by_id(cell.anchor, &anchors, oracle) {
                Some((ci, d)) if d <= threshold => {
                    cells[ci].rho = cells[ci].rho.max(inflate(d + cell.rho));
                    cell_map.push(ci);
                }
                _ => {
                    cells.push(StreamCell {
                        anchor: cell.anchor,
                        rho: cell.rho,
                        y: Vec::new(),
                        mass: Vec::new(),
                    });
                    cell_map.push(cells.len() - 1);
                }
            }
        }

        let mut pooled: Vec<Vec<(PointId, u64)>> = vec![Vec::new(); cells.len()];
        for (cell, &ci) in old.cells.iter().zip(&cell_map) {
            pooled[ci].extend(cell.y.iter().copied().zip(cell.mass.iter().copied()));
        }
        let mut remap: BTreeMap<PointId, PointId> = BTreeMap::new();
        for (cell, pool) in cells.iter_mut().zip(pooled) {
            let candidates: Vec<PointId> = pool.iter().map(|&(p, _)| p).collect();
            cell.y = self.matroid.greedy(&candidates);
            cell.mass = vec![0; cell.y.len()];
            for (p, m) in pool {
                let (slot, _) = match cell.y.iter().position(|&q| q == p) {
                    Some(s) => (s, 0.0),
                    None => nearest_by_id(p, &cell.y, oracle).expect("a pool keeps a member"),
                };
                cell.mass[slot] += m;
                remap.insert(p, cell.y[slot]);
            }
        }

        let audit = old.audit.as_ref().map(|a| {
            a.iter()
                .map(|(&p, &(c, proxy))| (p, (cell_map[c], remap[&proxy])))
                .collect()
        });
        CellState {
            threshold,
            cells,
            audit,
        }
    }

    fn items(&self, state: &CellState) -> usize {
        state.cells.iter().map(|c| 1 + c.y.len()).sum()
    }
}
