//! Playback buffer.
//!
//! The buffer is tracked by its headroom `Z = Q~ - Q`, which evolves as
//! `Z' = min(Z + c, Q~) - M`. Arrivals are limited to `M <= min(Z + c, Q~)`
//! so that `Z` never leaves `0..=Q~`.

use core::fmt;

use crate::config::SimConfig;
use crate::mdp::Action;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QueueState {
    headroom: u32,
    capacity: u32,
    departure: u32,
}

/// What happened in one slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlotOutcome {
    /// The buffer held fewer than `c` chunks when playback was due.
    pub stalled: bool,
    pub chunks_received: u32,
    pub quality: Option<usize>,
    /// Chunks actually played out, `min(Q, c)`.
    pub served: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Overflow {
    pub chunks: u32,
    pub limit: u32,
}

impl fmt::Display for Overflow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} chunks exceed the admissible arrival of {}", self.chunks, self.limit)
    }
}

impl core::error::Error for Overflow {}

impl QueueState {
    /// Empty buffer: `Q = 0`, `Z = Q~`.
    pub fn new(capacity: u32, departure: u32) -> Self {
        QueueState { headroom: capacity, capacity, departure }
    }

    pub fn from_config(cfg: &SimConfig) -> Self {
        Self::new(cfg.capacity, cfg.departure)
    }

    /// Buffer with the given headroom. Panics if `headroom > capacity`.
    pub fn with_headroom(capacity: u32, departure: u32, headroom: u32) -> Self {
        assert!(headroom <= capacity, "headroom {headroom} above capacity {capacity}");
        QueueState { headroom, capacity, departure }
    }

    pub fn headroom(&self) -> u32 {
        self.headroom
    }

    pub fn backlog(&self) -> u32 {
        self.capacity - self.headroom
    }

    pub fn capacity(&self) -> u32 {
        self.capacity
    }

    pub fn departure(&self) -> u32 {
        self.departure
    }

    /// Most chunks that may arrive this slot.
    pub fn arrival_limit(&self) -> u32 {
        admissible_arrivals(self.headroom, self.departure, self.capacity)
    }

    pub fn is_feasible(&self, chunks: u32) -> bool {
        chunks <= self.arrival_limit()
    }

    /// Plays out one slot and stores the arrivals of `action`.
    pub fn step(&self, action: Action) -> Result<(QueueState, SlotOutcome), Overflow> {
        let chunks = action.chunks();
        let limit = self.arrival_limit();
        if chunks > limit {
            return Err(Overflow { chunks, limit });
        }
        let q = self.backlog();
        let next = QueueState { headroom: next_headroom(self.headroom, chunks, self.departure, self.capacity), ..*self };
        let outcome = SlotOutcome {
            stalled: q < self.departure,
            chunks_received: chunks,
            quality: action.quality(),
            served: q.min(self.departure),
        };
        Ok((next, outcome))
    }
}

/// `min(z + c, Q~)`.
pub fn admissible_arrivals(headroom: u32, departure: u32, capacity: u32) -> u32 {
    (headroom + departure).min(capacity)
}

/// Headroom after a slot with `chunks` arrivals. The caller guarantees
/// `chunks <= admissible_arrivals(..)`.
pub fn next_headroom(headroom: u32, chunks: u32, departure: u32, capacity: u32) -> u32 {
    admissible_arrivals(headroom, departure, capacity) - chunks
}
