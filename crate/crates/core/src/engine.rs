// Licensed under the Apache-2.0 license

//! Deterministic discrete-event scheduler.
//!
//! Every latency in the simulator accrues on a single clock counted in
//! secure-element cycles. Events with the same firing time execute in the
//! order they were scheduled.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};
use std::fmt;

use serde::{Deserialize, Serialize};

/// Default ceiling on executed events before a run is declared livelocked.
pub const DEFAULT_EVENT_CEILING: u64 = 1_000_000_000;

/// A point on the simulated clock, in secure-element cycles.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SimTime(pub u64);

impl SimTime {
    pub const ZERO: SimTime = SimTime(0);

    pub fn cycles(self) -> u64 {
        self.0
    }

    pub fn after(self, delay: u64) -> SimTime {
        SimTime(self.0 + delay)
    }

    pub fn saturating_sub(self, earlier: SimTime) -> u64 {
        self.0.saturating_sub(earlier.0)
    }
}

impl fmt::Display for SimTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Handle returned by [`Scheduler::schedule`]; doubles as the tie-break ordinal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventId(u64);

impl EventId {
    pub fn seq(self) -> u64 {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("event ceiling of {ceiling} exceeded at cycle {at} (last action: {last_action})")]
pub struct LivelockError {
    pub ceiling: u64,
    pub at: SimTime,
    pub last_action: String,
}

/// One executed event, as recorded in the trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fired<A> {
    pub fire_at: SimTime,
    pub seq: u64,
    pub action: A,
}

/// Priority queue of pending actions over a monotonic clock.
#[derive(Debug)]
pub struct Scheduler<A> {
    now: SimTime,
    next_seq: u64,
    queue: BinaryHeap<Reverse<(SimTime, u64)>>,
    pending: BTreeMap<u64, A>,
    executed: u64,
    ceiling: u64,
    trace: Option<Vec<Fired<A>>>,
}

impl<A> Default for Scheduler<A> {
    fn default() -> Self {
        Self::new()
    }
}

impl<A> Scheduler<A> {
    pub fn new() -> Self {
        Scheduler {
            now: SimTime::ZERO,
            next_seq: 0,
            queue: BinaryHeap::new(),
            pending: BTreeMap::new(),
            executed: 0,
            ceiling: DEFAULT_EVENT_CEILING,
            trace: None,
        }
    }

    pub fn with_ceiling(mut self, ceiling: u64) -> Self {
        self.ceiling = ceiling;
        self
    }

    /// Keep a copy of every executed event.
    pub fn with_trace(mut self) -> Self {
        self.trace = Some(Vec::new());
        self
    }

    pub fn now(&self) -> SimTime {
        self.now
    }

    pub fn executed(&self) -> u64 {
        self.executed
    }

    pub fn is_idle(&self) -> bool {
        self.pending.is_empty()
    }

    pub fn pending_len(&self) -> usize {
        self.pending.len()
    }

    pub fn trace(&self) -> Option<&[Fired<A>]> {
        self.trace.as_deref()
    }

    pub fn schedule(&mut self, delay: u64, action: A) -> EventId {
        self.schedule_at(self.now.after(delay), action)
    }

    /// Schedule at an absolute time. Times in the past are clamped to `now`.
    pub fn schedule_at(&mut self, at: SimTime, action: A) -> EventId {
        let at = at.max(self.now);
        let seq = self.next_seq;
        self.next_seq += 1;
        self.queue.push(Reverse((at, seq)));
        self.pending.insert(seq, action);
        EventId(seq)
    }

    /// Returns the cancelled action, or `None` if it already fired.
    pub fn cancel(&mut self, id: EventId) -> Option<A> {
        self.pending.remove(&id.0)
    }

    /// Firing time of the earliest live event.
    pub fn peek_time(&mut self) -> Option<SimTime> {
        while let Some(Reverse((at, seq))) = self.queue.peek().copied() {
            if self.pending.contains_key(&seq) {
                return Some(at);
            }
            self.queue.pop();
        }
        None
    }
}

impl<A: Clone + fmt::Debug> Scheduler<A> {
    /// Pops the next live event and advances the clock to it.
    pub fn pop(&mut self) -> Result<Option<Fired<A>>, LivelockError> {
        while let Some(Reverse((at, seq))) = self.queue.pop() {
            let Some(action) = self.pending.remove(&seq) else {
                continue;
            };
            if self.executed >= self.ceiling {
                return Err(LivelockError {
                    ceiling: self.ceiling,
                    at,
                    last_action: format!("{action:?}"),
                });
            }
            debug_assert!(at >= self.now);
            self.now = at;
            self.executed += 1;
            let fired = Fired {
                fire_at: at,
                seq,
                action,
            };
            if let Some(trace) = self.trace.as_mut() {
                trace.push(fired.clone());
            }
            return Ok(Some(fired));
        }
        Ok(None)
    }

    /// Drains the queue, handing each event to `handler`, which may schedule
    /// more. Returns the time of the last executed event.
    pub fn run_until_idle<F>(&mut self, mut handler: F) -> Result<SimTime, LivelockError>
    where
        F: FnMut(&mut Self, Fired<A>),
    {
        while let Some(fired) = self.pop()? {
            handler(self, fired);
        }
        Ok(self.now)
    }
}
