use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::metric::PointId;

/// A replayable source of point ids, consumed one pass at a time.
pub trait PointStream {
    /// Rewinds to the beginning of a new pass.
    fn begin_pass(&mut self) -> Result<()>;
    /// Next point of the current pass, `None` at its end.
    fn next_point(&mut self) -> Result<Option<PointId>>;
}

impl<S: PointStream + ?Sized> PointStream for Box<S> {
    fn begin_pass(&mut self) -> Result<()> {
        (**self).begin_pass()
    }

    fn next_point(&mut self) -> Result<Option<PointId>> {
        (**self).next_point()
    }
}

/// Stream over an in-memory arrival order.
#[derive(Debug, Clone)]
pub struct SliceStream {
    order: Vec<PointId>,
    pos: Option<usize>,
}

impl SliceStream {
    pub fn new(order: Vec<PointId>) -> Self {
        SliceStream { order, pos: None }
    }

    /// Ids `0..n` in order.
    pub fn in_order(n: usize) -> Self {
        SliceStream::new((0..n).map(PointId).collect())
    }

    /// Ids `0..n` in a seeded random order.
    pub fn shuffled(n: usize, seed: u64) -> Self {
        let mut order: Vec<PointId> = (0..n).map(PointId).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        SliceStream::new(order)
    }

    pub fn order(&self) -> &[PointId] {
        &self.order
    }
}

impl PointStream for SliceStream {
    fn begin_pass(&mut self) -> Result<()> {
        self.pos = Some(0);
        Ok(())
    }

    fn next_point(&mut self) -> Result<Option<PointId>> {
        let pos = self
            .pos
            .as_mut()
            .ok_or(Error::InvalidParameter("no pass in progress"))?;
        let next = self.order.get(*pos).copied();
        if next.is_some() {
            *pos += 1;
        }
        Ok(next)
    }
}

/// Wraps a stream and records every read, flagging ids repeated within a pass.
#[derive(Debug, Clone)]
pub struct StreamLedger<S> {
    inner: S,
    pass_reads: Vec<usize>,
    seen: BTreeSet<PointId>,
    repeats: usize,
}

impl<S: PointStream> StreamLedger<S> {
    pub fn new(inner: S) -> Self {
        StreamLedger {
            inner,
            pass_reads: Vec::new(),
            seen: BTreeSet::new(),
            repeats: 0,
        }
    }

    pub fn passes(&self) -> usize {
        self.pass_reads.len()
    }

    pub fn reads(&self) -> usize {
        self.pass_reads.iter().sum()
    }

    pub fn reads_per_pass(&self) -> &[usize] {
        &self.pass_reads
    }

    /// Reads of an id already delivered earlier in the same pass.
    pub fn repeats(&self) -> usize {
        self.repeats
    }

    pub fn into_inner(self) -> S {
        self.inner
    }
}

impl<S: PointStream> PointStream for StreamLedger<S> {
    fn begin_pass(&mut self) -> Result<()> {
        self.inner.begin_pass()?;
        self.pass_reads.push(0);
        self.seen.clear();
        Ok(())
    }

    fn next_point(&mut self) -> Result<Option<PointId>> {
        let next = self.inner.next_point()?;
        if let Some(p) = next {
            *self.pass_reads.last_mut().expect("pass begun") += 1;
            if !self.seen.insert(p) {
                self.repeats += 1;
            }
        }
        Ok(next)
    }
}
