use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn cachevid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cachevid")).args(args).output().expect("binary runs")
}

fn read(p: &Path) -> String {
    fs::read_to_string(p).unwrap()
}

#[test]
fn run_writes_summary_trace_and_frame_log() {
    let dir = tempfile::tempdir().unwrap();
    let (out, trace, frames) = (dir.path().join("s.csv"), dir.path().join("t.csv"), dir.path().join("f.csv"));
    let o = cachevid(&[
        "run", "--frames", "6", "--trials", "3", "--policy", "proposed",
        "--out", out.to_str().unwrap(), "--trace", trace.to_str().unwrap(), "--frame-log", frames.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(read(&out).starts_with("policy,metric,mean,stderr,trials\nproposed,delay_rate,"));
    let t = read(&trace);
    assert_eq!(t.lines().next().unwrap(), "t,frame,node_type,distance_m,b_bits,M,q,Q,Z,stalled");
    assert_eq!(t.lines().count(), 1 + 30);
    assert_eq!(read(&frames).lines().count(), 1 + 6);
}

#[test]
fn several_policies_get_separate_traces() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let o = cachevid(&["run", "--frames", "2", "--policy", "strongest,one-step", "--trace", trace.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(dir.path().join("trace-strongest.csv").exists());
    assert!(dir.path().join("trace-one-step.csv").exists());
}

#[test]
fn sweep_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let paths = [dir.path().join("a.csv"), dir.path().join("b.csv")];
    for p in &paths {
        let o = cachevid(&[
            "sweep", "--axis", "caching_case", "--values", "1,2,3", "--trials", "3", "--frames", "4",
            "--seed", "5", "--out", p.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let a = read(&paths[0]);
    assert_eq!(a, read(&paths[1]));
    assert_eq!(a.lines().next().unwrap(), "axis,value,policy,delay_mean,delay_stderr,quality_mean,quality_stderr,trials");
    assert_eq!(a.lines().count(), 1 + 3 * 4);
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, "frames = 3\n[network]\nlambda = 0.6\n").unwrap();
    let c = cfg.to_str().unwrap();
    let file_only = String::from_utf8(cachevid(&["feasibility", "--config", c]).stdout).unwrap();
    assert!(file_only.contains("type 3     intensity 0.0857 below lambda_min"));
    let overridden = String::from_utf8(cachevid(&["feasibility", "--config", c, "--lambda", "0.2"]).stdout).unwrap();
    assert!(overridden.contains("type 1     intensity 0.1143 ok"));
}

#[test]
fn exit_codes() {
    assert_eq!(cachevid(&["run", "--trials", "0"]).status.code(), Some(1));
    assert_eq!(cachevid(&["sweep", "--axis", "gamma", "--values", "1"]).status.code(), Some(1));
    assert_eq!(cachevid(&["sweep", "--axis", "caching_case", "--values", "4"]).status.code(), Some(1));
    assert_eq!(cachevid(&["feasibility", "--config", "/definitely/missing.toml"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "[control]\nv = -2.0\n").unwrap();
    assert_eq!(cachevid(&["feasibility", "--config", bad.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(cachevid(&["--help"]).status.code(), Some(0));
}

#[test]
fn dumps() {
    let o = cachevid(&["dump-policy", "--node-type", "1", "--distance", "3"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), "t,z,class,b_lo,b_hi,M,q,G");
    assert_eq!(cachevid(&["dump-policy", "--node-type", "4"]).status.code(), Some(1));

    let o = cachevid(&["dump-field", "--lambda", "0.01", "--frame", "2"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), "x,y,type,distance");
    for line in text.lines().skip(1) {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert!((cols[0].hypot(cols[1]) - cols[3]).abs() < 1e-9 && cols[3] <= 50.0);
    }
}
