mod support;

use cachevid_core::channel::BDistribution;
use cachevid_core::geometry::{CachingNode, Candidate, CandidateSet};
use cachevid_core::mdp::{backward_dp, backward_dp_from, frame_value, lookup_action, Action};
use cachevid_core::policy::{choose_node_with, PolicyKind};
use cachevid_core::SimConfig;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::oracle::{random_instance, Instance, Oracle};

/// Expected cost of a Markov policy `(t, z, b) -> action` from `z0`, by
/// enumerating every sequence of realizations.
fn policy_cost(inst: &Instance, policy: &[Action], points: &[(u32, f64)], t: u32, z: u32) -> f64 {
    let cfg = &inst.cfg;
    if t == cfg.frame_len {
        let q = cfg.capacity - z;
        return if q < cfg.departure {
            cfg.end_cost_a
        } else {
            cfg.end_cost_a * 1e-3 * cfg.end_cost_mu * (-cfg.end_cost_mu * f64::from(q)).exp()
        };
    }
    let states = (cfg.capacity + 1) as usize;
    let best = cfg.quality_db.iter().cloned().fold(f64::MIN, f64::max);
    points
        .iter()
        .enumerate()
        .map(|(bi, &(_, p))| {
            let a = policy[(t as usize * states + z as usize) * points.len() + bi];
            let m = a.chunks();
            let short = f64::from(cfg.departure) - f64::from(m);
            let pen = a.quality().map_or(0.0, |q| cfg.v * (best - cfg.quality_db[q - 1]) * f64::from(m));
            let q_next = (cfg.capacity - z).saturating_sub(cfg.departure) + m;
            p * (f64::from(z) * short + short * short / 2.0 + pen
                + policy_cost(inst, policy, points, t + 1, cfg.capacity - q_next))
        })
        .sum()
}

fn admissible(inst: &Instance, z: u32, b: u32) -> Vec<Action> {
    let cfg = &inst.cfg;
    let mut out = vec![Action::Skip];
    let q = cfg.capacity - z;
    for m in 1..=cfg.capacity {
        for quality in 1..=inst.node_type {
            if u64::from(m) * cfg.chunk_bits[quality - 1] <= u64::from(b) && q.saturating_sub(cfg.departure) + m <= cfg.capacity {
                out.push(Action::Fetch { chunks: m, quality });
            }
        }
    }
    out
}

#[test]
fn tree_search_equals_best_markov_policy() {
    let mut rng = ChaCha8Rng::seed_from_u64(91);
    let mut checked = 0;
    while checked < 12 {
        let mut inst = random_instance(&mut rng);
        inst.cfg.frame_len = 2;
        inst.cfg.capacity = rng.random_range(1..=2);
        inst.dist = BDistribution::from_pmf(inst.dist.pmf[..inst.dist.pmf.len().min(3)].to_vec(), 1);
        let total = inst.dist.total_mass();
        inst.dist.pmf.iter_mut().for_each(|p| *p /= total);
        inst.dist.tail_mass = 0.0;

        let points: Vec<(u32, f64)> = inst.dist.pmf.iter().enumerate().map(|(b, &p)| (b as u32, p)).collect();
        let states = inst.cfg.capacity + 1;
        let choices: Vec<Vec<Action>> = (0..inst.cfg.frame_len)
            .flat_map(|_| (0..states).flat_map(|z| points.iter().map(move |&(b, _)| (z, b))))
            .map(|(z, b)| admissible(&inst, z, b))
            .collect();
        let combos: usize = choices.iter().map(Vec::len).product();
        if combos > 200_000 {
            continue;
        }

        let oracle = Oracle::new(&inst);
        let mut index = vec![0usize; choices.len()];
        let mut best = vec![f64::INFINITY; states as usize];
        loop {
            let policy: Vec<Action> = index.iter().zip(&choices).map(|(&i, c)| c[i]).collect();
            for z in 0..states {
                best[z as usize] = best[z as usize].min(policy_cost(&inst, &policy, &points, 0, z));
            }
            // Odometer over every combination of choices.
            let mut k = 0;
            while k < index.len() {
                index[k] += 1;
                if index[k] < choices[k].len() {
                    break;
                }
                index[k] = 0;
                k += 1;
            }
            if k == index.len() {
                break;
            }
        }
        for z in 0..states {
            assert!((oracle.value(0, z) - best[z as usize]).abs() < 1e-9, "{inst:?} z={z}");
        }
        checked += 1;
    }
}

#[test]
fn solver_matches_tree_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..300 {
        let inst = random_instance(&mut rng);
        let oracle = Oracle::new(&inst);
        let table = backward_dp(inst.node_type, &inst.dist, &inst.cfg);
        for t in 0..=inst.cfg.frame_len {
            for z in 0..=inst.cfg.capacity {
                let (got, want) = (table.value(t, z), oracle.value(t, z));
                assert!((got - want).abs() <= 1e-9, "J({t},{z}) {got} vs {want} in {inst:?}");
                if t == inst.cfg.frame_len {
                    continue;
                }
                for b in 0..=inst.dist.top() + 2 {
                    assert_eq!(lookup_action(&table, t, z, b), oracle.action(t, z, b, 1e-9), "t={t} z={z} b={b} {inst:?}");
                }
            }
        }
    }
}

#[test]
fn truncated_subproblems_reuse_rows() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..200 {
        let inst = random_instance(&mut rng);
        let full = backward_dp(inst.node_type, &inst.dist, &inst.cfg);
        for first in 1..inst.cfg.frame_len {
            let tail = backward_dp_from(inst.node_type, &inst.dist, &inst.cfg, first);
            for t in first..=inst.cfg.frame_len {
                for z in 0..=inst.cfg.capacity {
                    assert!((tail.value(t, z) - full.value(t, z)).abs() <= 1e-12);
                }
            }
        }
    }
}

#[test]
fn proposed_node_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..100 {
        let mut inst = random_instance(&mut rng);
        inst.cfg.levels = 2;
        inst.cfg.caching_probs = vec![0.5, 0.5];
        if inst.cfg.chunk_bits.len() == 1 {
            inst.cfg.chunk_bits.push(inst.cfg.chunk_bits[0] + 1);
            inst.cfg.quality_db.push(inst.cfg.quality_db[0] + 1.0);
        }
        let other = random_instance(&mut rng).dist;
        let dists = [inst.dist.clone(), other];
        let set = CandidateSet {
            candidates: (0..2)
                .map(|i| Candidate { node: CachingNode::new(1.0 + i as f64, 0.0, i + 1), index: i, fading: 1.0, channel_power: 1.0 })
                .collect(),
        };
        let z0 = rng.random_range(0..=inst.cfg.capacity);
        let values: Vec<f64> = (0..2)
            .map(|i| Oracle::new(&Instance { node_type: i + 1, dist: dists[i].clone(), cfg: inst.cfg.clone() }).value(0, z0))
            .collect();
        let d = choose_node_with(PolicyKind::Proposed, &set, z0, &inst.cfg, |c| dists[c.index].clone()).unwrap();
        let chosen = d.chosen.node.node_type;
        if (values[0] - values[1]).abs() > 1e-9 {
            let want = if values[0] < values[1] { 1 } else { 2 };
            assert_eq!(chosen, want, "{values:?}");
        }
        let table = d.table.unwrap();
        assert!((frame_value(&table, z0) - values[chosen - 1]).abs() < 1e-9);
        assert!(values[chosen - 1] <= values[0].min(values[1]) + 1e-9);
    }
}

#[test]
fn single_slot_frame_is_myopic_plus_terminal() {
    let cfg = SimConfig { frame_len: 1, chunk_bits: vec![10, 20, 40], grid_unit_bits: 1, ..SimConfig::default() };
    let dist = BDistribution::from_pmf((0..=52).map(|b| if b == 45 { 0.6 } else { 0.4 / 52.0 }).collect(), 1);
    let inst = Instance { cfg, node_type: 3, dist };
    let oracle = Oracle::new(&inst);
    let table = backward_dp(3, &inst.dist, &inst.cfg);
    for z in [0, 1, 50, 99, 100] {
        assert!((table.value(0, z) - oracle.value(0, z)).abs() < 1e-9);
    }
}
