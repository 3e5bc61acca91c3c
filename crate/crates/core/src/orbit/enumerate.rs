//! Monotone bucket-queue enumeration of a positive-semigroup orbit.
//!
//! Every positive jump raises `s` by a positive side square, so states are
//! processed in increasing `s` and a bucket is final once popped. Equal
//! canonical states share `s`, hence deduplication only ever looks inside the
//! bucket being processed.

use std::collections::BTreeMap;
use std::path::PathBuf;

use rayon::prelude::*;
use rayon::ThreadPool;

use crate::error::{Error, Result};
use crate::lattice::Quadruple;

use super::checkpoint::Checkpoint;
use super::{canonical, ComponentLabel, ReachSet};

/// Buckets smaller than this are expanded on the calling thread.
const PARALLEL_THRESHOLD: usize = 512;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentReach {
    pub label: ComponentLabel,
    pub reach: ReachSet,
    pub visited: u64,
    pub peak_frontier: u64,
}

/// How a run may be interrupted.
#[derive(Debug, Clone, Default)]
pub struct RunControl {
    /// Frontier size limit, in bytes of stored states.
    pub memory_budget: Option<u64>,
    /// Where to spill the frontier when the run is interrupted.
    pub checkpoint: Option<PathBuf>,
    /// Stop (and checkpoint) once every bucket `<= pause_after` is done.
    pub pause_after: Option<u64>,
}

#[derive(Debug)]
pub struct Enumeration {
    label: ComponentLabel,
    bound: u64,
    buckets: BTreeMap<u64, Vec<Quadruple>>,
    frontier_len: usize,
    reach: ReachSet,
    visited: u64,
    peak_frontier: u64,
}

fn successors(q: &Quadruple, bound: u64, out: &mut Vec<Quadruple>) -> Result<()> {
    let v = q.abc();
    let s = q.s as i128;
    for i in 0..3 {
        let x = v[(i + 1) % 3] as i128 + v[(i + 2) % 3] as i128;
        if x <= 0 {
            // Coincident pair: the jump is the identity.
            continue;
        }
        let ns = s + x;
        if ns > bound as i128 {
            continue;
        }
        let mut n = q.to_array();
        n[i] = i64::try_from(v[i] as i128 + x + 2 * s).map_err(|_| Error::Overflow("orbit state"))?;
        n[3] = ns as i64;
        out.push(canonical(Quadruple::from_array(n)));
    }
    Ok(())
}

impl Enumeration {
    pub fn new(label: ComponentLabel, start: Quadruple, bound: u64) -> Result<Self> {
        if start.s < 0 {
            return Err(Error::NotReduced(format!("component start {start} has s < 0")));
        }
        let mut buckets = BTreeMap::new();
        let mut frontier_len = 0;
        if start.s as u64 <= bound {
            buckets.insert(start.s as u64, vec![canonical(start)]);
            frontier_len = 1;
        }
        Ok(Enumeration {
            label,
            bound,
            buckets,
            frontier_len,
            reach: ReachSet::new(bound),
            visited: 0,
            peak_frontier: frontier_len as u64,
        })
    }

    pub fn from_checkpoint(cp: Checkpoint) -> Self {
        let mut buckets: BTreeMap<u64, Vec<Quadruple>> = BTreeMap::new();
        let frontier_len = cp.frontier.len();
        for q in cp.frontier {
            buckets.entry(q.s as u64).or_default().push(q);
        }
        Enumeration {
            label: cp.label,
            bound: cp.bound,
            buckets,
            frontier_len,
            reach: cp.reach,
            visited: cp.visited,
            peak_frontier: cp.peak_frontier,
        }
    }

    pub fn label(&self) -> ComponentLabel {
        self.label
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn next_bucket(&self) -> Option<u64> {
        self.buckets.keys().next().copied()
    }

    pub fn is_done(&self) -> bool {
        self.buckets.is_empty()
    }

    pub fn frontier_len(&self) -> usize {
        self.frontier_len
    }

    pub fn frontier_bytes(&self) -> u64 {
        (self.frontier_len * std::mem::size_of::<Quadruple>()) as u64
    }

    /// Snapshot at the current bucket boundary.
    pub fn checkpoint(&self) -> Checkpoint {
        let mut frontier = Vec::with_capacity(self.frontier_len);
        for states in self.buckets.values() {
            let mut v = states.clone();
            v.sort_unstable();
            frontier.extend(v);
        }
        Checkpoint {
            label: self.label,
            bound: self.bound,
            next_bucket: self.next_bucket().unwrap_or(self.bound + 1),
            visited: self.visited,
            peak_frontier: self.peak_frontier,
            frontier,
            reach: self.reach.clone(),
        }
    }

    /// Processes the smallest bucket. Returns its `s`, or `None` when done.
    pub fn step(
        &mut self,
        pool: Option<&ThreadPool>,
        visit: &mut dyn FnMut(&Quadruple),
    ) -> Result<Option<u64>> {
        let Some((s, mut states)) = self.buckets.pop_first() else {
            return Ok(None);
        };
        self.frontier_len -= states.len();
        states.sort_unstable();
        states.dedup();
        self.visited += states.len() as u64;
        self.reach.insert(s);
        for q in &states {
            visit(q);
        }

        let bound = self.bound;
        let next: Vec<Quadruple> = match pool {
            Some(pool) if states.len() >= PARALLEL_THRESHOLD => {
                let chunk = states.len().div_ceil(pool.current_num_threads() * 4).max(64);
                let parts: Vec<Vec<Quadruple>> = pool.install(|| {
                    states
                        .par_chunks(chunk)
                        .map(|part| {
                            let mut out = Vec::with_capacity(part.len() * 3);
                            for q in part {
                                successors(q, bound, &mut out)?;
                            }
                            Ok(out)
                        })
                        .collect::<Result<_>>()
                })?;
                parts.into_iter().flatten().collect()
            }
            _ => {
                let mut out = Vec::with_capacity(states.len() * 3);
                for q in &states {
                    successors(q, bound, &mut out)?;
                }
                out
            }
        };
        self.frontier_len += next.len();
        for q in next {
            self.buckets.entry(q.s as u64).or_default().push(q);
        }
        self.peak_frontier = self.peak_frontier.max(self.frontier_len as u64);
        Ok(Some(s))
    }

    /// Runs to completion, or until `ctl` asks to stop; a stopped run is
    /// checkpointed when `ctl.checkpoint` is set.
    pub fn run(
        &mut self,
        pool: Option<&ThreadPool>,
        ctl: &RunControl,
        visit: &mut dyn FnMut(&Quadruple),
    ) -> Result<()> {
        while let Some(s) = self.step(pool, visit)? {
            if self.is_done() {
                break;
            }
            if let Some(budget) = ctl.memory_budget {
                if self.frontier_bytes() > budget {
                    return Err(self.interrupt(ctl).unwrap_or(Error::MemoryBudgetExceeded {
                        states: self.frontier_len,
                        budget,
                    }));
                }
            }
            if ctl.pause_after.is_some_and(|p| s >= p) {
                if let Some(e) = self.interrupt(ctl) {
                    return Err(e);
                }
                return Err(Error::BudgetExceeded(format!(
                    "paused after bucket {s} without a checkpoint path"
                )));
            }
        }
        Ok(())
    }

    fn interrupt(&self, ctl: &RunControl) -> Option<Error> {
        let path = ctl.checkpoint.as_ref()?;
        let cp = self.checkpoint();
        if let Err(e) = cp.save(path) {
            return Some(e);
        }
        log::info!(
            "component {}: checkpoint at bucket {} ({} frontier states) -> {}",
            self.label,
            cp.next_bucket,
            cp.frontier.len(),
            path.display()
        );
        Some(Error::Suspended { path: path.clone(), next_bucket: cp.next_bucket })
    }

    pub fn finish(self) -> ComponentReach {
        ComponentReach {
            label: self.label,
            reach: self.reach,
            visited: self.visited,
            peak_frontier: self.peak_frontier,
        }
    }
}

/// Reach set of the positive-semigroup orbit of `start` up to `bound`.
pub fn enumerate(start: Quadruple, bound: u64) -> Result<ReachSet> {
    let mut e = Enumeration::new(ComponentLabel::K, start, bound)?;
    e.run(None, &RunControl::default(), &mut |_| {})?;
    Ok(e.finish().reach)
}
