//! Per-frame stochastic shortest path over the buffer headroom.
//!
//! Within a frame of `T` slots served by one node of type `l`, the state is
//! the headroom `z` and the slot's deliverable bits `b` (on the solver
//! grid). An action fetches `M` chunks of one quality `q <= l` with
//! `M N_q <= b` and `M <= min(z + c, Q~)`. The stage cost is
//!
//! ```text
//! g(z, M, q) = z (c - M) + (c - M)^2 / 2 + V (P_max - P_q) M
//! ```
//!
//! and the next headroom `min(z + c, Q~) - M` is deterministic. Backward
//! induction from the terminal costs gives `G(t, z, b)`, its expectation
//! over `b`, `J(t, z)`, and the minimizing actions.
//!
//! Realizations of `b` that admit the same action set are grouped into
//! classes; one action per `(t, z, class)` is stored.

use alloc::vec;
use alloc::vec::Vec;

use crate::channel::BDistribution;
use crate::config::SimConfig;
use crate::queue::{admissible_arrivals, next_headroom};

/// Slot decision. Receiving nothing carries no quality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Action {
    #[default]
    Skip,
    /// `chunks >= 1` chunks of quality `quality` (1-based).
    Fetch { chunks: u32, quality: usize },
}

impl Action {
    pub fn chunks(&self) -> u32 {
        match *self {
            Action::Skip => 0,
            Action::Fetch { chunks, .. } => chunks,
        }
    }

    pub fn quality(&self) -> Option<usize> {
        match *self {
            Action::Skip => None,
            Action::Fetch { quality, .. } => Some(quality),
        }
    }
}

/// Stage costs and action enumeration, prepared once per configuration.
#[derive(Debug, Clone)]
pub struct CostModel {
    pub chunk_units: Vec<u32>,
    /// `V (P_max - P_q)` per quality.
    pub penalty: Vec<f64>,
    pub departure: u32,
    pub capacity: u32,
}

impl CostModel {
    pub fn new(cfg: &SimConfig) -> Self {
        let best = cfg.best_quality();
        CostModel {
            chunk_units: cfg.chunk_units(),
            penalty: cfg.quality_db.iter().map(|&p| cfg.v * (best - p)).collect(),
            departure: cfg.departure,
            capacity: cfg.capacity,
        }
    }

    pub fn stage_cost(&self, z: u32, action: Action) -> f64 {
        let m = action.chunks();
        let short = f64::from(self.departure) - f64::from(m);
        let quality = match action {
            Action::Skip => 0.0,
            Action::Fetch { chunks, quality } => self.penalty[quality - 1] * f64::from(chunks),
        };
        f64::from(z) * short + 0.5 * short * short + quality
    }

    /// Calls `f` on every feasible action in tie-break order: more chunks
    /// first, then higher quality, `Skip` last.
    pub fn for_each_feasible(&self, z: u32, b: u32, node_type: usize, mut f: impl FnMut(Action)) {
        let units = &self.chunk_units[..node_type];
        let max_chunks = admissible_arrivals(z, self.departure, self.capacity).min(b / units[0]);
        for chunks in (1..=max_chunks).rev() {
            for quality in (1..=node_type).rev() {
                if u64::from(chunks) * u64::from(units[quality - 1]) <= u64::from(b) {
                    f(Action::Fetch { chunks, quality });
                }
            }
        }
        f(Action::Skip);
    }

    pub fn next(&self, z: u32, action: Action) -> u32 {
        next_headroom(z, action.chunks(), self.departure, self.capacity)
    }
}

/// Stage cost of `action` at headroom `z`.
pub fn stage_cost(z: u32, action: Action, cfg: &SimConfig) -> f64 {
    CostModel::new(cfg).stage_cost(z, action)
}

/// Actions available to a type-`node_type` link at headroom `z` with `b`
/// grid units deliverable, in tie-break order.
pub fn feasible_actions(z: u32, b: u32, node_type: usize, cfg: &SimConfig) -> Vec<Action> {
    assert!((1..=cfg.levels).contains(&node_type), "node type {node_type} outside 1..={}", cfg.levels);
    let mut out = Vec::new();
    CostModel::new(cfg).for_each_feasible(z, b, node_type, |a| out.push(a));
    out
}

/// Terminal cost per headroom `z = 0..=Q~`: `A` where the buffer holds
/// fewer than `c` chunks, otherwise `1e-3 A mu exp(-mu (Q~ - z))`.
pub fn end_costs(cfg: &SimConfig) -> Vec<f64> {
    let cap = cfg.capacity;
    let stall_from = cap - cfg.departure + 1;
    (0..=cap)
        .map(|z| {
            if z >= stall_from {
                cfg.end_cost_a
            } else {
                1e-3 * cfg.end_cost_a * cfg.end_cost_mu * libm::exp(-cfg.end_cost_mu * f64::from(cap - z))
            }
        })
        .collect()
}

/// Contiguous ranges of the grid `0..=top` over which the feasible action
/// set does not change.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BClasses {
    starts: Vec<u32>,
    top: u32,
}

impl BClasses {
    /// Splits at every multiple `M N_q <= top` with `q <= node_type` and
    /// `M <= Q~`; larger multiples are never admissible.
    pub fn new(node_type: usize, top: u32, cfg: &SimConfig) -> Self {
        let units = cfg.chunk_units();
        let mut starts = vec![0u32];
        for &n in &units[..node_type] {
            let mut m = 1u32;
            while m <= cfg.capacity && u64::from(m) * u64::from(n) <= u64::from(top) {
                starts.push(m * n);
                m += 1;
            }
        }
        starts.sort_unstable();
        starts.dedup();
        BClasses { starts, top }
    }

    pub fn len(&self) -> usize {
        self.starts.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn top(&self) -> u32 {
        self.top
    }

    /// Inclusive grid range of class `n`.
    pub fn bounds(&self, n: usize) -> (u32, u32) {
        let hi = self.starts.get(n + 1).map_or(self.top, |&s| s - 1);
        (self.starts[n], hi)
    }

    /// Class of a realization; values above `top` fall in the last class.
    pub fn class_of(&self, b: u32) -> usize {
        let b = b.min(self.top);
        self.starts.partition_point(|&s| s <= b) - 1
    }

    /// Probability of each class, with the tail mass folded into the last.
    pub fn probabilities(&self, dist: &BDistribution) -> Vec<f64> {
        let mut p: Vec<f64> = (0..self.len())
            .map(|n| {
                let (lo, hi) = self.bounds(n);
                dist.pmf[lo as usize..=hi as usize].iter().sum()
            })
            .collect();
        *p.last_mut().unwrap() += dist.tail_mass;
        p
    }
}

/// Value tables and optimal actions of one frame for one node.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyTable {
    pub node_type: usize,
    /// First slot of the frame covered (0 unless this is a truncated
    /// subproblem).
    pub first_slot: u32,
    /// Frame length `T`.
    pub frame_len: u32,
    pub capacity: u32,
    pub classes: BClasses,
    pub class_prob: Vec<f64>,
    /// `(frame_len - first_slot + 1) x (Q~ + 1)`; the last row holds the
    /// terminal costs.
    j: Vec<f64>,
    g: Vec<f64>,
    theta: Vec<Action>,
    /// Stage-cost-plus-continuation evaluations per solved slot.
    pub evaluations: Vec<u64>,
}

impl PolicyTable {
    fn states(&self) -> usize {
        self.capacity as usize + 1
    }

    fn row(&self, t: u32) -> usize {
        assert!(t >= self.first_slot && t <= self.frame_len, "slot {t} outside the table");
        (t - self.first_slot) as usize
    }

    /// `J(t, z)`; `t = frame_len` gives the terminal cost.
    pub fn value(&self, t: u32, z: u32) -> f64 {
        self.j[self.row(t) * self.states() + z as usize]
    }

    /// `G(t, z, class)`.
    pub fn class_value(&self, t: u32, z: u32, class: usize) -> f64 {
        self.g[(self.row(t) * self.states() + z as usize) * self.classes.len() + class]
    }

    pub fn class_action(&self, t: u32, z: u32, class: usize) -> Action {
        self.theta[(self.row(t) * self.states() + z as usize) * self.classes.len() + class]
    }

    /// Solved slots, in order.
    pub fn slots(&self) -> core::ops::Range<u32> {
        self.first_slot..self.frame_len
    }
}

/// Solves the frame for a node of type `node_type` whose deliverable bits
/// follow `dist`.
pub fn backward_dp(node_type: usize, dist: &BDistribution, cfg: &SimConfig) -> PolicyTable {
    backward_dp_from(node_type, dist, cfg, 0)
}

/// Solves the tail subproblem over slots `first_slot..T` with the same
/// terminal costs.
pub fn backward_dp_from(node_type: usize, dist: &BDistribution, cfg: &SimConfig, first_slot: u32) -> PolicyTable {
    assert!((1..=cfg.levels).contains(&node_type), "node type {node_type} outside 1..={}", cfg.levels);
    assert!(first_slot < cfg.frame_len, "first slot {first_slot} beyond frame length {}", cfg.frame_len);
    let model = CostModel::new(cfg);
    let classes = BClasses::new(node_type, dist.top(), cfg);
    let class_prob = classes.probabilities(dist);
    let reps: Vec<u32> = (0..classes.len()).map(|n| classes.bounds(n).0).collect();

    let states = cfg.capacity as usize + 1;
    let slots = (cfg.frame_len - first_slot) as usize;
    let n_classes = classes.len();
    let mut j = vec![0.0; (slots + 1) * states];
    j[slots * states..].copy_from_slice(&end_costs(cfg));
    let mut g = vec![0.0; slots * states * n_classes];
    let mut theta = vec![Action::Skip; slots * states * n_classes];
    let mut evaluations = vec![0u64; slots];

    for row in (0..slots).rev() {
        let (head, next) = j.split_at_mut((row + 1) * states);
        let next = &next[..states];
        let current = &mut head[row * states..];
        let mut count = 0u64;
        for z in 0..states {
            let mut expected = 0.0;
            for (n, &b) in reps.iter().enumerate() {
                let mut best = f64::INFINITY;
                let mut arg = Action::Skip;
                model.for_each_feasible(z as u32, b, node_type, |a| {
                    count += 1;
                    let cost = model.stage_cost(z as u32, a) + next[model.next(z as u32, a) as usize];
                    if cost < best {
                        best = cost;
                        arg = a;
                    }
                });
                let idx = (row * states + z) * n_classes + n;
                g[idx] = best;
                theta[idx] = arg;
                expected += class_prob[n] * best;
            }
            current[z] = expected;
        }
        evaluations[row] = count;
    }

    PolicyTable {
        node_type,
        first_slot,
        frame_len: cfg.frame_len,
        capacity: cfg.capacity,
        classes,
        class_prob,
        j,
        g,
        theta,
        evaluations,
    }
}

/// Expected frame cost from headroom `z0`: the minimized drift-plus-penalty
/// bound of the node.
pub fn frame_value(table: &PolicyTable, z0: u32) -> f64 {
    table.value(table.first_slot, z0)
}

/// Optimal action at slot `t` (frame-relative), headroom `z`, realization
/// `b` grid units.
pub fn lookup_action(table: &PolicyTable, t: u32, z: u32, b: u32) -> Action {
    table.class_action(t, z, table.classes.class_of(b))
}

/// Action-evaluation bookkeeping of one slot of the recursion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Complexity {
    /// `|Z| = Q~ + 1`.
    pub states: u64,
    /// Number of b-classes.
    pub classes: u64,
    /// Feasible actions summed over every `(z, class)`.
    pub total_actions: u64,
}

impl Complexity {
    /// Counts feasible actions class by class.
    pub fn of(node_type: usize, classes: &BClasses, cfg: &SimConfig) -> Self {
        let states = u64::from(cfg.capacity) + 1;
        let mut total_actions = 0u64;
        for z in 0..=cfg.capacity {
            for n in 0..classes.len() {
                total_actions += feasible_actions(z, classes.bounds(n).0, node_type, cfg).len() as u64;
            }
        }
        Complexity { states, classes: classes.len() as u64, total_actions }
    }

    /// Mean number of feasible actions per `(z, class)`.
    pub fn mean_actions(&self) -> f64 {
        self.total_actions as f64 / (self.states * self.classes) as f64
    }

    /// `|Z| * N_B * N_theta`.
    pub fn per_slot(&self) -> f64 {
        (self.states * self.classes) as f64 * self.mean_actions()
    }
}
