//! Matroid independence oracles and the greedy machinery built on them.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;
use core::sync::atomic::{AtomicUsize, Ordering};

use crate::error::{Error, Result};
use crate::metric::PointId;

/// Independence oracle over the ground set `0..ground_size()`.
pub trait Matroid {
    fn ground_size(&self) -> usize;

    /// Independence of a set of distinct, in-range ids. Counts one oracle call.
    fn independent(&self, set: &[PointId]) -> bool;

    /// Number of independence queries answered so far.
    fn oracle_calls(&self) -> usize;

    fn kind(&self) -> &'static str;

    /// Scans `order` once, keeping every point that preserves independence.
    ///
    /// `order` must contain distinct, in-range ids.
    fn greedy(&self, order: &[PointId]) -> Vec<PointId> {
        let mut kept: Vec<PointId> = Vec::new();
        for &p in order {
            kept.push(p);
            if !self.independent(&kept) {
                kept.pop();
            }
        }
        kept
    }
}

/// A set together with whether an oracle has confirmed its independence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndependentSet {
    pub members: Vec<PointId>,
    pub certified: bool,
}

impl IndependentSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

fn validate(set: &[PointId], m: &dyn Matroid) -> Result<()> {
    let mut seen = BTreeSet::new();
    for &p in set {
        if p.0 >= m.ground_size() {
            return Err(Error::InvalidPointId(p));
        }
        if !seen.insert(p) {
            return Err(Error::InvalidParameter("set contains a duplicate id"));
        }
    }
    Ok(())
}

/// Checked independence test.
pub fn is_independent(set: &[PointId], m: &dyn Matroid) -> Result<bool> {
    validate(set, m)?;
    Ok(m.independent(set))
}

/// Greedy maximal independent subset of `order`, scanned in the order given.
/// Repeated ids after their first occurrence are ignored.
pub fn maximal_independent_subset(order: &[PointId], m: &dyn Matroid) -> Result<IndependentSet> {
    let mut seen = BTreeSet::new();
    let mut distinct = Vec::with_capacity(order.len());
    for &p in order {
        if p.0 >= m.ground_size() {
            return Err(Error::InvalidPointId(p));
        }
        if seen.insert(p) {
            distinct.push(p);
        }
    }
    Ok(IndependentSet {
        members: m.greedy(&distinct),
        certified: true,
    })
}

/// Size of a maximal independent subset of `set`.
pub fn rank(set: &[PointId], m: &dyn Matroid) -> Result<usize> {
    maximal_independent_subset(set, m).map(|s| s.len())
}

/// Rank of the whole ground set.
pub fn matroid_rank(m: &dyn Matroid) -> usize {
    let all: Vec<PointId> = (0..m.ground_size()).map(PointId).collect();
    m.greedy(&all).len()
}

/// Finds `x` in `B \ A` with `A + x` independent, given an independent `A`, a
/// maximal independent set `B` of `V'` and a witness `y` in `V' \ A` with
/// `A + y` independent. Such an `x` always exists in a matroid; `Ok(None)`
/// would therefore indicate a broken oracle.
///
/// Candidates are tried in ascending id order.
pub fn augment_witness(
    a: &[PointId],
    v_prime: &[PointId],
    b: &[PointId],
    y: PointId,
    m: &dyn Matroid,
) -> Result<Option<PointId>> {
    validate(a, m)?;
    validate(v_prime, m)?;
    validate(b, m)?;
    if y.0 >= m.ground_size() {
        return Err(Error::InvalidPointId(y));
    }
    let a_set: BTreeSet<PointId> = a.iter().copied().collect();
    let v_set: BTreeSet<PointId> = v_prime.iter().copied().collect();
    let b_set: BTreeSet<PointId> = b.iter().copied().collect();

    if !m.independent(a) {
        return Err(Error::LemmaPreconditions("A is not independent"));
    }
    if !b_set.is_subset(&v_set) || !m.independent(b) {
        return Err(Error::LemmaPreconditions(
            "B is not an independent subset of V'",
        ));
    }
    let mut probe = b.to_vec();
    for &v in v_prime.iter().filter(|v| !b_set.contains(v)) {
        probe.push(v);
        let extends = m.independent(&probe);
        probe.pop();
        if extends {
            return Err(Error::LemmaPreconditions("B is not maximal in V'"));
        }
    }
    if !v_set.contains(&y) || a_set.contains(&y) {
        return Err(Error::LemmaPreconditions("y is not in V' \\ A"));
    }
    let mut probe = a.to_vec();
    probe.push(y);
    if !m.independent(&probe) {
        return Err(Error::LemmaPreconditions("A + y is not independent"));
    }

    for &x in b_set.iter().filter(|x| !a_set.contains(x)) {
        *probe.last_mut().expect("probe holds y") = x;
        if m.independent(&probe) {
            return Ok(Some(x));
        }
    }
    Ok(None)
}

/// `U(k, n)`: any set of at most `k` elements is independent.
#[derive(Debug)]
pub struct UniformMatroid {
    n: usize,
    k: usize,
    calls: AtomicUsize,
}

impl UniformMatroid {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if k == 0 && n > 0 {
            return Err(Error::MatroidLoop(PointId(0)));
        }
        Ok(UniformMatroid {
            n,
            k,
            calls: AtomicUsize::new(0),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

impl Matroid for UniformMatroid {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn independent(&self, set: &[PointId]) -> bool {
        self.calls.fetch_add(1, Ordering::Relaxed);
        set.len() <= self.k
    }

    fn oracle_calls(&self) -> usize {
        self.calls.load(Ordering::Relaxed)
    }

    fn kind(&self) -> &'static str {
        "uniform"
    }

    fn greedy(&self, order: &[PointId]) -> Vec<PointId> {
        self.calls.fetch_add(order.len(), Ordering::Relaxed);
        order.iter().copied().take(self.k).collect()
    }
}

/// Partition matroid: at most `quota[c]` elements of each category `c`.
#[derive(Debug)]
pub struct PartitionMatroid {
    categories: Vec<u32>,
    quotas: BTreeMap<u32, usize>,
    calls: AtomicUsize,
}

impl PartitionMatroid {
    /// `categories[i]` is the category of point `i`. Every category in use
    /// needs a positive quota so that singletons stay independent.
    pub fn new(categories: Vec<u32>, quotas: BTreeMap<u32, usize>) -> Result<Self> {
        for (i, c) in categories.iter().enumerate() {
            if quotas.get(c).copied().unwrap_or(0) == 0 {
                return Err(Error::MatroidLoop(PointId(i)));
            }
        }
        Ok(PartitionMatroid {
            categories,
            quotas,
            calls: AtomicUsize::new(0),
        })
    }

    pub fn quotas(&self) -> &BTreeMap<u32, usize> {
        &self.quotas
    }

    pub fn category(&self, p: PointId) -> u32 {
        self.categories[p.0]
    }

    fn within_quotas<'s>(&self, set: impl Iterator<Item = &'s PointId>) -> bool {
        let mut used: BTreeMap<u32, usize> = BTreeMap::new();
        for p in set {
            let c = self.categories[p.0];
            let n = used.entry(c).or_insert(0);
            *n += 1;
            if *n > self.quotas[&c] {
                return false;
            }
        }
        true
    }
}

impl Matroid for PartitionMatroid {
    fn ground_size(&self) -> usize {
        self.categories.len()
    }

    fn independent(&self, set: &[PointId]) -> bool {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.within_quotas(set.iter())
    }

    fn oracle_calls(&self) -> usize {
        self.calls.load(Ordering::Relaxed)
    }

    fn kind(&self) -> &'static str {
        "partition"
    }

    fn greedy(&self, order: &[PointId]) -> Vec<PointId> {
        self.calls.fetch_add(order.len(), Ordering::Relaxed);
        let mut used: BTreeMap<u32, usize> = BTreeMap::new();
        let mut kept = Vec::new();
        for &p in order {
            let c = self.categories[p.0];
            let n = used.entry(c).or_insert(0);
            if *n < self.quotas[&c] {
                *n += 1;
                kept.push(p);
            }
        }
        kept
    }
}

/// Transversal matroid: a set is independent when it can be matched
/// injectively into slots along the point/slot adjacency.
#[derive(Debug)]
pub struct TransversalMatroid {
    slots: usize,
    adjacency: Vec<Vec<usize>>,
    calls: AtomicUsize,
}

impl TransversalMatroid {
    /// `adjacency[i]` lists the slots point `i` may occupy. Every point needs
    /// at least one slot.
    pub fn new(slots: usize, adjacency: Vec<Vec<usize>>) -> Result<Self> {
        for (i, adj) in adjacency.iter().enumerate() {
            if adj.is_empty() {
                return Err(Error::MatroidLoop(PointId(i)));
            }
            if adj.iter().any(|&s| s >= slots) {
                return Err(Error::InvalidParameter(
                    "adjacency names a slot out of range",
                ));
            }
        }
        Ok(TransversalMatroid {
            slots,
            adjacency,
            calls: AtomicUsize::new(0),
        })
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn adjacency(&self, p: PointId) -> &[usize] {
        &self.adjacency[p.0]
    }
}

/// Slot assignment grown one point at a time by augmenting paths.
struct Matching<'m> {
    adjacency: &'m [Vec<usize>],
    owner: Vec<Option<PointId>>,
    visited: Vec<bool>,
}

impl<'m> Matching<'m> {
    fn new(m: &'m TransversalMatroid) -> Self {
        Matching {
            adjacency: &m.adjacency,
            owner: vec![None; m.slots],
            visited: vec![false; m.slots],
        }
    }

    /// Tries to add `p`; the matching is unchanged when no augmenting path exists.
    fn insert(&mut self, p: PointId) -> bool {
        self.visited.fill(false);
        self.augment(p)
    }

    fn augment(&mut self, p: PointId) -> bool {
        for &s in &self.adjacency[p.0] {
            if self.visited[s] {
                continue;
            }
            self.visited[s] = true;
            let free = match self.owner[s] {
                None => true,
                Some(q) => self.augment(q),
            };
            if free {
                self.owner[s] = Some(p);
                return true;
            }
        }
        false
    }
}

impl Matroid for TransversalMatroid {
    fn ground_size(&self) -> usize {
        self.adjacency.len()
    }

    fn independent(&self, set: &[PointId]) -> bool {
        self.calls.fetch_add(1, Ordering::Relaxed);
        if set.len() > self.slots {
            return false;
        }
        let mut matching = Matching::new(self);
        set.iter().all(|&p| matching.insert(p))
    }

    fn oracle_calls(&self) -> usize {
        self.calls.load(Ordering::Relaxed)
    }

    fn kind(&self) -> &'static str {
        "transversal"
    }

    fn greedy(&self, order: &[PointId]) -> Vec<PointId> {
        self.calls.fetch_add(order.len(), Ordering::Relaxed);
        let mut matching = Matching::new(self);
        let mut kept = Vec::new();
        for &p in order {
            if kept.len() == self.slots {
                break;
            }
            if matching.insert(p) {
                kept.push(p);
            }
        }
        kept
    }
}
