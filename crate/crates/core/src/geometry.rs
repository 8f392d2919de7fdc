//! Poisson field of typed caching nodes and the per-frame candidate set.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::PI;
use core::fmt;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Poisson};

use crate::config::SimConfig;

/// A caching node; a type-`l` node serves qualities `1..=l`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CachingNode {
    /// Position relative to the user, meters.
    pub x: f64,
    pub y: f64,
    pub node_type: usize,
    pub distance: f64,
}

impl CachingNode {
    pub fn new(x: f64, y: f64, node_type: usize) -> Self {
        CachingNode { x, y, node_type, distance: libm::sqrt(x * x + y * y) }
    }

    /// Path gain `1 / d^2`.
    pub fn path_gain(&self) -> f64 {
        1.0 / (self.distance * self.distance)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct NodeField {
    pub nodes: Vec<CachingNode>,
    pub frame: u32,
}

/// Draws one independent Poisson process per node type inside a disk of
/// radius `radius` around the origin.
pub fn sample_disk<R: Rng + ?Sized>(cfg: &SimConfig, radius: f64, rng: &mut R) -> Vec<CachingNode> {
    let area = PI * radius * radius;
    let mut nodes = Vec::new();
    for (i, &p) in cfg.caching_probs.iter().enumerate() {
        let mean = cfg.lambda * p * area;
        let count = if mean > 0.0 {
            Poisson::new(mean).expect("finite positive mean").sample(rng) as usize
        } else {
            0
        };
        nodes.reserve(count);
        for _ in 0..count {
            // (0, 1] keeps every node off the user's position.
            let r = radius * libm::sqrt(1.0 - rng.random::<f64>());
            let theta = 2.0 * PI * rng.random::<f64>();
            nodes.push(CachingNode::new(r * libm::cos(theta), r * libm::sin(theta), i + 1));
        }
    }
    nodes
}

/// Samples the field seen by the user at one frame start.
pub fn sample_field<R: Rng + ?Sized>(cfg: &SimConfig, frame: u32, rng: &mut R) -> NodeField {
    NodeField { nodes: sample_disk(cfg, cfg.user_radius, rng), frame }
}

/// Re-centers a fixed field on a displaced user, keeping nodes within
/// `radius`.
pub fn field_around(nodes: &[CachingNode], ux: f64, uy: f64, radius: f64, frame: u32) -> NodeField {
    let nodes = nodes
        .iter()
        .map(|n| CachingNode::new(n.x - ux, n.y - uy, n.node_type))
        .filter(|n| n.distance <= radius && n.distance > 0.0)
        .collect();
    NodeField { nodes, frame }
}

/// Unit-mean exponential fading power of every node in the field.
pub fn draw_fading<R: Rng + ?Sized>(field: &NodeField, rng: &mut R) -> Vec<f64> {
    field.nodes.iter().map(|_| Exp1.sample(rng)).collect()
}

/// The strongest node of one type at the association instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub node: CachingNode,
    /// Index into the field.
    pub index: usize,
    /// `|u|^2` observed at association.
    pub fading: f64,
    /// `|h|^2 = D |u|^2`.
    pub channel_power: f64,
}

/// At most one candidate per node type, ordered by type.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CandidateSet {
    pub candidates: Vec<Candidate>,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn types(&self) -> impl Iterator<Item = usize> + '_ {
        self.candidates.iter().map(|c| c.node.node_type)
    }
}

/// No caching node of any type exists around the user.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NoCandidates;

impl fmt::Display for NoCandidates {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("no caching node of any type around the user")
    }
}

impl core::error::Error for NoCandidates {}

/// Does `a` beat `b` for the same type: stronger channel, then closer, then
/// lower field index.
fn stronger(a: &Candidate, b: &Candidate) -> bool {
    match a.channel_power.partial_cmp(&b.channel_power) {
        Some(Ordering::Greater) => true,
        Some(Ordering::Less) => false,
        _ => match a.node.distance.partial_cmp(&b.node.distance) {
            Some(Ordering::Less) => true,
            Some(Ordering::Greater) => false,
            _ => a.index < b.index,
        },
    }
}

/// Keeps, for each node type present, the node with the largest `|h|^2`.
///
/// `fading` holds `|u|^2` per field node, in field order.
pub fn candidate_set(field: &NodeField, fading: &[f64]) -> Result<CandidateSet, NoCandidates> {
    assert_eq!(field.nodes.len(), fading.len(), "one fading draw per node");
    let levels = field.nodes.iter().map(|n| n.node_type).max().unwrap_or(0);
    let mut best: Vec<Option<Candidate>> = alloc::vec![None; levels];
    for (index, (node, &u2)) in field.nodes.iter().zip(fading).enumerate() {
        let cand = Candidate { node: *node, index, fading: u2, channel_power: node.path_gain() * u2 };
        let slot = &mut best[node.node_type - 1];
        match slot {
            Some(cur) if !stronger(&cand, cur) => {}
            _ => *slot = Some(cand),
        }
    }
    let candidates: Vec<Candidate> = best.into_iter().flatten().collect();
    if candidates.is_empty() {
        Err(NoCandidates)
    } else {
        Ok(CandidateSet { candidates })
    }
}
