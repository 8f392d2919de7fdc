//! CSV tables and the feasibility report.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so equal
//! results give byte-identical files.

use std::fmt::Write as _;
use std::io::{self, Write};

use cachevid_core::admission::FeasibilityReport;
use cachevid_core::geometry::NodeField;
use cachevid_core::sim::{FrameLog, TraceRow};
use cachevid_core::{Action, PolicyTable, SimConfig};

use crate::experiment::{SweepAxis, SweepPoint, Trials};

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

fn action_fields(a: Action) -> [String; 2] {
    [a.chunks().to_string(), opt(a.quality())]
}

/// `policy,metric,mean,stderr,trials`.
pub fn write_summary<W: Write>(w: W, results: &[Trials]) -> io::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["policy", "metric", "mean", "stderr", "trials"])?;
    for trials in results {
        for (metric, s) in trials.metrics() {
            out.write_record([trials.kind.name(), metric, &s.mean.to_string(), &s.stderr.to_string(), &s.n.to_string()])?;
        }
    }
    out.flush()
}

/// `axis,value,policy,delay_mean,delay_stderr,quality_mean,quality_stderr,trials`.
pub fn write_sweep<W: Write>(w: W, axis: SweepAxis, points: &[SweepPoint]) -> io::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["axis", "value", "policy", "delay_mean", "delay_stderr", "quality_mean", "quality_stderr", "trials"])?;
    for p in points {
        let (d, q) = (p.trials.delay(), p.trials.quality());
        out.write_record([
            axis.name(),
            &p.value.to_string(),
            p.trials.kind.name(),
            &d.mean.to_string(),
            &d.stderr.to_string(),
            &q.mean.to_string(),
            &q.stderr.to_string(),
            &d.n.to_string(),
        ])?;
    }
    out.flush()
}

/// `t,frame,node_type,distance_m,b_bits,M,q,Q,Z,stalled`; `Q` and `Z` are
/// taken at the start of the slot.
pub fn write_trace<W: Write>(w: W, rows: &[TraceRow]) -> io::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["t", "frame", "node_type", "distance_m", "b_bits", "M", "q", "Q", "Z", "stalled"])?;
    for r in rows {
        out.write_record([
            r.t.to_string(),
            r.frame.to_string(),
            opt(r.node_type),
            opt(r.distance),
            r.b_bits.to_string(),
            r.chunks.to_string(),
            opt(r.quality),
            r.backlog.to_string(),
            r.headroom.to_string(),
            u8::from(r.stalled).to_string(),
        ])?;
    }
    out.flush()
}

fn joined<T>(items: &[T], f: impl Fn(&T) -> String) -> String {
    items.iter().map(f).collect::<Vec<_>>().join(";")
}

/// `frame,candidate_types,candidate_distances_m,frame_values,chosen_type`;
/// list cells are `;`-separated in candidate order.
pub fn write_frame_log<W: Write>(w: W, frames: &[FrameLog]) -> io::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["frame", "candidate_types", "candidate_distances_m", "frame_values", "chosen_type"])?;
    for f in frames {
        out.write_record([
            f.frame.to_string(),
            joined(&f.candidates, |c| c.0.to_string()),
            joined(&f.candidates, |c| c.1.to_string()),
            joined(&f.frame_values, |v| format!("{}:{}", v.0, v.1)),
            opt(f.chosen),
        ])?;
    }
    out.flush()
}

/// `t,z,class,b_lo,b_hi,M,q,G` with `b` in grid units.
pub fn write_policy_table<W: Write>(w: W, table: &PolicyTable) -> io::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["t", "z", "class", "b_lo", "b_hi", "M", "q", "G"])?;
    for t in table.slots() {
        for z in 0..=table.capacity {
            for n in 0..table.classes.len() {
                let (lo, hi) = table.classes.bounds(n);
                let [m, q] = action_fields(table.class_action(t, z, n));
                out.write_record([
                    t.to_string(),
                    z.to_string(),
                    n.to_string(),
                    lo.to_string(),
                    hi.to_string(),
                    m,
                    q,
                    table.class_value(t, z, n).to_string(),
                ])?;
            }
        }
    }
    out.flush()
}

/// `x,y,type,distance`, one node per line.
pub fn write_field<W: Write>(w: W, field: &NodeField) -> io::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["x", "y", "type", "distance"])?;
    for n in &field.nodes {
        out.write_record([n.x.to_string(), n.y.to_string(), n.node_type.to_string(), n.distance.to_string()])?;
    }
    out.flush()
}

/// Human-readable admission feasibility of `cfg`.
pub fn feasibility_text(cfg: &SimConfig) -> String {
    let r = FeasibilityReport::new(cfg);
    let mut s = String::new();
    let _ = writeln!(s, "gamma_min  {:.6} ({:.3} dB)", r.gamma_min, 10.0 * r.gamma_min.log10());
    let _ = writeln!(s, "lambda_min {:.4} per m^2", r.lambda_min);
    match r.rho {
        Ok(rho) => {
            let _ = writeln!(s, "rho        {:.4} ({:.3} dB)", rho, 10.0 * rho.log10());
        }
        Err(e) => {
            let _ = writeln!(s, "rho        {e}");
        }
    }
    match r.radii {
        Ok((r_n, r_u)) => {
            let _ = writeln!(s, "R_N        {r_n:.4} m");
            let _ = writeln!(s, "R_U        {r_u:.4} m");
        }
        Err(e) => {
            let _ = writeln!(s, "radii      {e}");
        }
    }
    for t in &r.types {
        let verdict = if t.supported { "ok" } else { "below lambda_min" };
        let _ = writeln!(s, "type {}     intensity {:.4} {verdict}", t.node_type, t.intensity);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::run_experiment;
    use cachevid_core::channel::pmf_bits;
    use cachevid_core::mdp::backward_dp;
    use cachevid_core::PolicyKind;

    #[test]
    fn summary_layout() {
        let cfg = SimConfig { frames: 4, ..SimConfig::default() };
        let results = run_experiment(&cfg, &[PolicyKind::Proposed, PolicyKind::OneStep], 2, 1);
        let mut buf = Vec::new();
        write_summary(&mut buf, &results).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "policy,metric,mean,stderr,trials");
        assert_eq!(lines.len(), 1 + 2 * 6);
        assert!(lines[1].starts_with("proposed,delay_rate,"));
        assert!(lines[1].ends_with(",2"));
    }

    #[test]
    fn policy_dump_covers_every_cell() {
        let cfg = SimConfig { capacity: 10, ..SimConfig::default() };
        let table = backward_dp(2, &pmf_bits(2.0, &cfg).unwrap(), &cfg);
        let mut buf = Vec::new();
        write_policy_table(&mut buf, &table).unwrap();
        let rows = String::from_utf8(buf).unwrap().lines().count();
        assert_eq!(rows, 1 + 5 * 11 * table.classes.len());
    }

    #[test]
    fn feasibility_mentions_sparse_type() {
        let text = feasibility_text(&SimConfig { lambda: 0.6, ..SimConfig::default() });
        assert!(text.contains("lambda_min 0.111"));
        assert!(text.contains("type 3     intensity 0.0857 below lambda_min"));
        assert!(text.contains("type 1     intensity 0.3429 ok"));
    }
}
