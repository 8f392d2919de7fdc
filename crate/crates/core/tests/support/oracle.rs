//! Brute-force reference for the frame problem.
//!
//! Searches the full decision tree (every realized `b`, every admissible
//! action, at every slot) without memoization or b-classes, in terms of the
//! backlog `Q` rather than the headroom. Nothing here calls the solver's
//! cost, feasibility or transition code.

use cachevid_core::channel::BDistribution;
use cachevid_core::mdp::Action;
use cachevid_core::SimConfig;
use rand::Rng;

/// A small frame problem.
#[derive(Debug, Clone)]
pub struct Instance {
    pub cfg: SimConfig,
    pub node_type: usize,
    pub dist: BDistribution,
}

/// Random instance with `T <= 3`, `Q~ <= 6`, `c = 1`, `L <= 2` and at most
/// eight grid points; one grid unit is one bit.
pub fn random_instance<R: Rng>(rng: &mut R) -> Instance {
    let levels = rng.random_range(1..=2usize);
    let first = rng.random_range(1..=3u64);
    let mut chunk_bits = vec![first];
    let mut quality_db = vec![rng.random_range(20.0..35.0)];
    if levels == 2 {
        chunk_bits.push(rng.random_range(first + 1..=first + 3));
        quality_db.push(quality_db[0] + rng.random_range(0.5..6.0));
    }
    let top = rng.random_range(1..=7usize);
    let mut pmf: Vec<f64> = (0..=top).map(|_| rng.random_range(0.0..1.0)).collect();
    let tail = if rng.random_bool(0.3) { rng.random_range(0.0..0.5) } else { 0.0 };
    let total: f64 = pmf.iter().sum::<f64>() + tail;
    pmf.iter_mut().for_each(|p| *p /= total);
    let mut dist = BDistribution::from_pmf(pmf, 1);
    dist.tail_mass = tail / total;

    let cfg = SimConfig {
        levels,
        caching_probs: vec![1.0 / levels as f64; levels],
        frame_len: rng.random_range(1..=3),
        departure: 1,
        capacity: rng.random_range(1..=6),
        end_cost_a: rng.random_range(10.0..1000.0),
        end_cost_mu: rng.random_range(0.1..2.0),
        grid_unit_bits: 1,
        b_max: cachevid_core::BitCap::Bits(top as u64),
        v: if rng.random_bool(0.2) { 0.0 } else { rng.random_range(0.0..3.0) },
        chunk_bits,
        quality_db,
        ..SimConfig::default()
    };
    Instance { node_type: rng.random_range(1..=levels), cfg, dist }
}

pub struct Oracle {
    horizon: u32,
    capacity: u32,
    departure: u32,
    node_type: usize,
    chunk_bits: Vec<u64>,
    /// `V (P_max - P_q)`.
    weight: Vec<f64>,
    end_a: f64,
    end_mu: f64,
    /// `(b, probability)` with values above the top treated as the top.
    points: Vec<(u32, f64)>,
}

impl Oracle {
    pub fn new(inst: &Instance) -> Self {
        let cfg = &inst.cfg;
        let best = cfg.quality_db.iter().cloned().fold(f64::MIN, f64::max);
        let mut points: Vec<(u32, f64)> = inst.dist.pmf.iter().enumerate().map(|(b, &p)| (b as u32, p)).collect();
        points.last_mut().unwrap().1 += inst.dist.tail_mass;
        Oracle {
            horizon: cfg.frame_len,
            capacity: cfg.capacity,
            departure: cfg.departure,
            node_type: inst.node_type,
            chunk_bits: cfg.chunk_bits.clone(),
            weight: cfg.quality_db.iter().map(|p| cfg.v * (best - p)).collect(),
            end_a: cfg.end_cost_a,
            end_mu: cfg.end_cost_mu,
            points,
        }
    }

    fn terminal(&self, backlog: u32) -> f64 {
        if backlog < self.departure {
            self.end_a
        } else {
            self.end_a * 1e-3 * self.end_mu * (-self.end_mu * f64::from(backlog)).exp()
        }
    }

    /// Every admissible `(M, q)` with its cost and successor backlog, `q = 0`
    /// for receiving nothing.
    fn moves(&self, backlog: u32, b: u32) -> Vec<(u32, usize, f64, u32)> {
        let z = f64::from(self.capacity - backlog);
        let after_playout = backlog.saturating_sub(self.departure);
        let mut out = Vec::new();
        for m in 0..=self.capacity {
            let qualities: Vec<usize> = if m == 0 { vec![0] } else { (1..=self.node_type).collect() };
            for q in qualities {
                if q > 0 && u64::from(m) * self.chunk_bits[q - 1] > u64::from(b) {
                    continue;
                }
                if after_playout + m > self.capacity {
                    continue;
                }
                let short = f64::from(self.departure) - f64::from(m);
                let penalty = if q == 0 { 0.0 } else { self.weight[q - 1] * f64::from(m) };
                out.push((m, q, z * short + short * short / 2.0 + penalty, after_playout + m));
            }
        }
        out
    }

    /// Least expected cost from slot `t` with headroom `z`, before `b` is seen.
    pub fn value(&self, t: u32, z: u32) -> f64 {
        self.expected(t, self.capacity - z)
    }

    fn expected(&self, t: u32, backlog: u32) -> f64 {
        if t == self.horizon {
            return self.terminal(backlog);
        }
        self.points.iter().map(|&(b, p)| p * self.best(t, backlog, b)).sum()
    }

    fn best(&self, t: u32, backlog: u32, b: u32) -> f64 {
        self.moves(backlog, b)
            .into_iter()
            .map(|(_, _, cost, next)| cost + self.expected(t + 1, next))
            .fold(f64::INFINITY, f64::min)
    }

    /// Minimizing action at `(t, z, b)` among those within `tol` of the
    /// minimum, preferring more chunks, then higher quality.
    pub fn action(&self, t: u32, z: u32, b: u32, tol: f64) -> Action {
        let b = b.min(self.points.last().unwrap().0);
        let backlog = self.capacity - z;
        let scored: Vec<(u32, usize, f64)> = self
            .moves(backlog, b)
            .into_iter()
            .map(|(m, q, cost, next)| (m, q, cost + self.expected(t + 1, next)))
            .collect();
        let min = scored.iter().map(|s| s.2).fold(f64::INFINITY, f64::min);
        let (m, q, _) = scored
            .into_iter()
            .filter(|s| s.2 <= min + tol)
            .max_by_key(|&(m, q, _)| (m, q))
            .unwrap();
        if m == 0 {
            Action::Skip
        } else {
            Action::Fetch { chunks: m, quality: q }
        }
    }
}
