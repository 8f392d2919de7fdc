//! Node association per frame and quality/chunk decisions per slot.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::channel::{pmf_bits, BDistribution};
use crate::config::SimConfig;
use crate::geometry::{Candidate, CandidateSet};
use crate::mdp::{backward_dp, frame_value, lookup_action, Action, CostModel, PolicyTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PolicyKind {
    /// Minimum expected drift-plus-penalty node, slot actions from the table.
    Proposed,
    /// Strongest channel at association, slot actions from the table.
    Strongest,
    /// Highest node type, slot actions from the table.
    HighestQuality,
    /// Node as `Proposed`, slot actions minimize the stage cost alone.
    OneStep,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 4] =
        [PolicyKind::Proposed, PolicyKind::Strongest, PolicyKind::HighestQuality, PolicyKind::OneStep];

    pub fn name(&self) -> &'static str {
        match self {
            PolicyKind::Proposed => "proposed",
            PolicyKind::Strongest => "strongest",
            PolicyKind::HighestQuality => "highest-quality",
            PolicyKind::OneStep => "one-step",
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownPolicy;

impl fmt::Display for UnknownPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("unknown policy (expected proposed, strongest, highest-quality or one-step)")
    }
}

impl core::error::Error for UnknownPolicy {}

impl FromStr for PolicyKind {
    type Err = UnknownPolicy;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "proposed" => Ok(PolicyKind::Proposed),
            "strongest" => Ok(PolicyKind::Strongest),
            "highest-quality" | "highestquality" => Ok(PolicyKind::HighestQuality),
            "one-step" | "onestep" => Ok(PolicyKind::OneStep),
            _ => Err(UnknownPolicy),
        }
    }
}

/// Node chosen for a frame and what the slot decisions need from it.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameDecision {
    pub chosen: Candidate,
    /// Policy table of the chosen node; `None` for one-step decisions.
    pub table: Option<PolicyTable>,
    /// Largest grid value tracked for the chosen link; larger
    /// realizations are treated as this value.
    pub top: u32,
    /// `(node type, expected frame cost)` of every evaluated candidate.
    pub frame_values: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmptyCandidates;

impl fmt::Display for EmptyCandidates {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("empty candidate set")
    }
}

impl core::error::Error for EmptyCandidates {}

/// Does `a` win a tie against `b` in the frame-value comparison: higher
/// type, then shorter distance.
fn preferred(a: &Candidate, b: &Candidate) -> bool {
    a.node.node_type > b.node.node_type
        || (a.node.node_type == b.node.node_type && a.node.distance < b.node.distance)
}

/// Chooses the frame's node; deliverable-bit distributions come from the
/// link model at each candidate's distance.
pub fn choose_node(
    kind: PolicyKind,
    candidates: &CandidateSet,
    z0: u32,
    cfg: &SimConfig,
) -> Result<FrameDecision, EmptyCandidates> {
    choose_node_with(kind, candidates, z0, cfg, |c| {
        pmf_bits(c.node.distance, cfg).expect("candidate nodes lie at positive distance")
    })
}

/// As [`choose_node`], with the distribution of each candidate supplied by
/// `dist_of`.
pub fn choose_node_with(
    kind: PolicyKind,
    candidates: &CandidateSet,
    z0: u32,
    cfg: &SimConfig,
    mut dist_of: impl FnMut(&Candidate) -> BDistribution,
) -> Result<FrameDecision, EmptyCandidates> {
    let first = candidates.candidates.first().ok_or(EmptyCandidates)?;
    match kind {
        PolicyKind::Proposed | PolicyKind::OneStep => {
            let mut best: Option<(Candidate, PolicyTable, u32, f64)> = None;
            let mut frame_values = Vec::with_capacity(candidates.len());
            for cand in &candidates.candidates {
                let dist = dist_of(cand);
                let table = backward_dp(cand.node.node_type, &dist, cfg);
                let value = frame_value(&table, z0);
                frame_values.push((cand.node.node_type, value));
                let better = match &best {
                    None => true,
                    Some((b, _, _, v)) => value < *v || (value == *v && preferred(cand, b)),
                };
                if better {
                    best = Some((*cand, table, dist.top(), value));
                }
            }
            let (chosen, table, top, _) = best.expect("nonempty candidate set");
            let table = (kind == PolicyKind::Proposed).then_some(table);
            Ok(FrameDecision { chosen, table, top, frame_values })
        }
        PolicyKind::Strongest | PolicyKind::HighestQuality => {
            let mut chosen = *first;
            for cand in &candidates.candidates[1..] {
                let wins = if kind == PolicyKind::Strongest {
                    cand.channel_power > chosen.channel_power
                        || (cand.channel_power == chosen.channel_power && cand.node.distance < chosen.node.distance)
                } else {
                    cand.node.node_type > chosen.node.node_type
                        || (cand.node.node_type == chosen.node.node_type
                            && cand.channel_power > chosen.channel_power)
                };
                if wins {
                    chosen = *cand;
                }
            }
            let dist = dist_of(&chosen);
            let table = backward_dp(chosen.node.node_type, &dist, cfg);
            let frame_values = alloc::vec![(chosen.node.node_type, frame_value(&table, z0))];
            Ok(FrameDecision { chosen, top: dist.top(), table: Some(table), frame_values })
        }
    }
}

/// Myopic choice: the feasible action of least stage cost.
pub fn one_step_action(z: u32, b: u32, node_type: usize, model: &CostModel) -> Action {
    let mut best = f64::INFINITY;
    let mut arg = Action::Skip;
    model.for_each_feasible(z, b, node_type, |a| {
        let cost = model.stage_cost(z, a);
        if cost < best {
            best = cost;
            arg = a;
        }
    });
    arg
}

/// Action at frame-relative slot `t`, headroom `z`, realization `b` grid
/// units.
pub fn choose_action(kind: PolicyKind, decision: &FrameDecision, t: u32, z: u32, b: u32, cfg: &SimConfig) -> Action {
    choose_action_with(kind, decision, t, z, b, &CostModel::new(cfg))
}

/// As [`choose_action`] with a prepared cost model.
pub fn choose_action_with(
    kind: PolicyKind,
    decision: &FrameDecision,
    t: u32,
    z: u32,
    b: u32,
    model: &CostModel,
) -> Action {
    let b = b.min(decision.top);
    match (&decision.table, kind) {
        (_, PolicyKind::OneStep) | (None, _) => one_step_action(z, b, decision.chosen.node.node_type, model),
        (Some(table), _) => lookup_action(table, t, z, b),
    }
}
