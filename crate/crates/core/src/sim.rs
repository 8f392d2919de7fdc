//! End-to-end run over `K` frames of `T` slots.
//!
//! Each frame: place the node field, observe every node's fading and form
//! the candidate set, associate with a node, then for each slot observe the
//! link, pick an action and update the buffer. Randomness is drawn from
//! per-frame streams (see [`crate::rng`]) that do not depend on the policy,
//! so runs of different policies under one seed are paired.

use alloc::vec::Vec;

use rand_distr::{Distribution, Exp1};

use crate::channel::link_state;
use crate::config::{Mobility, SimConfig};
use crate::geometry::{candidate_set, draw_fading, field_around, sample_disk, sample_field, CachingNode, NodeField};
use crate::mdp::CostModel;
use crate::policy::{choose_action_with, choose_node, FrameDecision, PolicyKind};
use crate::queue::QueueState;
use crate::rng::{stream, Purpose};

/// One slot of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    /// Global slot index.
    pub t: u32,
    pub frame: u32,
    /// Associated node, `None` when no candidate existed.
    pub node_type: Option<usize>,
    pub distance: Option<f64>,
    /// Deliverable bits of the slot (before the solver cap).
    pub b_bits: u64,
    pub chunks: u32,
    pub quality: Option<usize>,
    /// Buffer at the start of the slot.
    pub backlog: u32,
    pub headroom: u32,
    pub stalled: bool,
}

/// Association diagnostics of one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameLog {
    pub frame: u32,
    /// `(type, distance)` of every candidate.
    pub candidates: Vec<(usize, f64)>,
    /// `(type, expected frame cost)` of every evaluated candidate.
    pub frame_values: Vec<(usize, f64)>,
    pub chosen: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunMetrics {
    pub slots: u64,
    pub stalls: u64,
    /// Fraction of slots that stalled.
    pub delay_rate: f64,
    pub total_chunks: u64,
    /// Chunks played out.
    pub served: u64,
    pub final_backlog: u32,
    /// Mean quality measure over every received chunk (0 if none).
    pub avg_quality_per_chunk: f64,
    /// As above, counting chunks received in a frame that stalled as
    /// quality 0.
    pub avg_quality_stall_zeroed: f64,
    /// Time average of `(P_max - P_q) M`.
    pub objective_estimate: f64,
    /// Frames without any candidate node.
    pub empty_frames: u32,
    /// Which quality average [`RunMetrics::quality`] reports.
    pub stall_quality_accounting: bool,
    pub trace: Option<Vec<TraceRow>>,
    /// One entry per frame, kept together with the trace.
    pub frame_log: Option<Vec<FrameLog>>,
}

impl RunMetrics {
    /// The headline quality metric selected by the configuration.
    pub fn quality(&self) -> f64 {
        if self.stall_quality_accounting {
            self.avg_quality_stall_zeroed
        } else {
            self.avg_quality_per_chunk
        }
    }
}

/// Node positions for every frame of a trial.
enum FieldSource {
    Resample,
    Fixed(Vec<CachingNode>),
    Moving { nodes: Vec<CachingNode>, step: f64 },
}

impl FieldSource {
    fn new(cfg: &SimConfig, seed: u64) -> Self {
        let mut rng = stream(seed, u32::MAX, Purpose::Geometry);
        match cfg.mobility {
            Mobility::Resample => FieldSource::Resample,
            Mobility::Static => FieldSource::Fixed(sample_disk(cfg, cfg.user_radius, &mut rng)),
            Mobility::Speed(v) => {
                let step = v * f64::from(cfg.frame_len) * cfg.slot_time;
                let reach = cfg.user_radius + step * f64::from(cfg.frames);
                FieldSource::Moving { nodes: sample_disk(cfg, reach, &mut rng), step }
            }
        }
    }

    fn field(&self, cfg: &SimConfig, seed: u64, frame: u32) -> NodeField {
        match self {
            FieldSource::Resample => sample_field(cfg, frame, &mut stream(seed, frame, Purpose::Geometry)),
            FieldSource::Fixed(nodes) => NodeField { nodes: nodes.clone(), frame },
            FieldSource::Moving { nodes, step } => {
                field_around(nodes, step * f64::from(frame), 0.0, cfg.user_radius, frame)
            }
        }
    }
}

/// Runs one trial without a per-slot trace.
pub fn run_trial(cfg: &SimConfig, kind: PolicyKind, seed: u64) -> RunMetrics {
    run_trial_with(cfg, kind, seed, false)
}

/// Runs one trial; `record_trace` keeps one [`TraceRow`] per slot.
pub fn run_trial_with(cfg: &SimConfig, kind: PolicyKind, seed: u64, record_trace: bool) -> RunMetrics {
    let model = CostModel::new(cfg);
    let source = FieldSource::new(cfg, seed);
    let best = cfg.best_quality();

    let mut queue = QueueState::from_config(cfg);
    let mut trace = record_trace.then(|| Vec::with_capacity((cfg.frames * cfg.frame_len) as usize));
    let mut frame_log = record_trace.then(|| Vec::with_capacity(cfg.frames as usize));
    let (mut stalls, mut total_chunks, mut served) = (0u64, 0u64, 0u64);
    let (mut quality_sum, mut quality_kept, mut degradation) = (0.0, 0.0, 0.0);
    let mut empty_frames = 0;

    for frame in 0..cfg.frames {
        let field = source.field(cfg, seed, frame);
        let fading = draw_fading(&field, &mut stream(seed, frame, Purpose::Decision));
        let candidates = candidate_set(&field, &fading).ok();
        let decision: Option<FrameDecision> =
            candidates.as_ref().and_then(|set| choose_node(kind, set, queue.headroom(), cfg).ok());
        if decision.is_none() {
            empty_frames += 1;
        }
        if let Some(log) = frame_log.as_mut() {
            log.push(FrameLog {
                frame,
                candidates: candidates
                    .iter()
                    .flat_map(|set| set.candidates.iter().map(|c| (c.node.node_type, c.node.distance)))
                    .collect(),
                frame_values: decision.as_ref().map_or_else(Vec::new, |d| d.frame_values.clone()),
                chosen: decision.as_ref().map(|d| d.chosen.node.node_type),
            });
        }

        let mut slot_rng = stream(seed, frame, Purpose::SlotFading);
        let mut frame_stalled = false;
        let mut frame_quality = 0.0;
        for slot in 0..cfg.frame_len {
            let (action, b_bits) = match &decision {
                Some(d) => {
                    // The association-time observation is the first slot's channel.
                    let u2 = if slot == 0 { d.chosen.fading } else { Exp1.sample(&mut slot_rng) };
                    let link = link_state(d.chosen.node.distance, u2, cfg).expect("positive node distance");
                    let b = u32::try_from(link.grid_units(cfg)).unwrap_or(u32::MAX);
                    (choose_action_with(kind, d, slot, queue.headroom(), b, &model), link.bits)
                }
                None => (crate::mdp::Action::Skip, 0),
            };
            let (next, outcome) = queue.step(action).expect("policies only emit admissible actions");
            if let Some(rows) = trace.as_mut() {
                rows.push(TraceRow {
                    t: frame * cfg.frame_len + slot,
                    frame,
                    node_type: decision.as_ref().map(|d| d.chosen.node.node_type),
                    distance: decision.as_ref().map(|d| d.chosen.node.distance),
                    b_bits,
                    chunks: outcome.chunks_received,
                    quality: outcome.quality,
                    backlog: queue.backlog(),
                    headroom: queue.headroom(),
                    stalled: outcome.stalled,
                });
            }
            if outcome.stalled {
                stalls += 1;
                frame_stalled = true;
            }
            if let Some(q) = outcome.quality {
                let m = f64::from(outcome.chunks_received);
                frame_quality += cfg.quality_db[q - 1] * m;
                degradation += (best - cfg.quality_db[q - 1]) * m;
            }
            total_chunks += u64::from(outcome.chunks_received);
            served += u64::from(outcome.served);
            queue = next;
        }
        quality_sum += frame_quality;
        if !frame_stalled {
            quality_kept += frame_quality;
        }
    }

    let slots = u64::from(cfg.frames) * u64::from(cfg.frame_len);
    let per_chunk = |sum: f64| if total_chunks > 0 { sum / total_chunks as f64 } else { 0.0 };
    RunMetrics {
        slots,
        stalls,
        delay_rate: stalls as f64 / slots as f64,
        total_chunks,
        served,
        final_backlog: queue.backlog(),
        avg_quality_per_chunk: per_chunk(quality_sum),
        avg_quality_stall_zeroed: per_chunk(quality_kept),
        objective_estimate: degradation / slots as f64,
        empty_frames,
        stall_quality_accounting: cfg.stall_quality_accounting,
        trace,
        frame_log,
    }
}
