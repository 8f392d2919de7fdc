//! The `cachevid` command line.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use cachevid_core::channel::pmf_bits;
use cachevid_core::geometry::sample_field;
use cachevid_core::mdp::backward_dp;
use cachevid_core::rng::{stream, trial_seed, Purpose};
use cachevid_core::sim::run_trial_with;
use cachevid_core::{PolicyKind, SimConfig};
use clap::{Args, Parser, Subcommand};

use crate::config_file::load_config;
use crate::error::Error;
use crate::experiment::{run_experiment, run_sweep, SweepAxis, SweepSpec};
use crate::output;

#[derive(Debug, Parser)]
#[command(name = "cachevid", version, about = "Adaptive video delivery over a wireless caching network")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run Monte Carlo trials of one configuration.
    Run(RunArgs),
    /// Sweep one parameter across values.
    Sweep(SweepArgs),
    /// Print the admission feasibility report.
    Feasibility(ConfigArgs),
    /// Dump the policy table of one link.
    DumpPolicy(DumpPolicyArgs),
    /// Dump the node field of one frame.
    DumpField(DumpFieldArgs),
}

/// Config file and the flags that override it.
#[derive(Debug, Args)]
pub struct ConfigArgs {
    /// TOML config file; defaults apply when absent.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Root seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of frames per trial.
    #[arg(long)]
    pub frames: Option<u32>,
    /// Node intensity per square meter.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Quality weight.
    #[arg(long = "v")]
    pub v: Option<f64>,
    /// Interference-to-noise ratio, dB.
    #[arg(long)]
    pub upsilon_db: Option<f64>,
    /// Reference caching placement (1, 2 or 3).
    #[arg(long)]
    pub caching_case: Option<u32>,
}

impl ConfigArgs {
    pub fn resolve(&self) -> Result<SimConfig, Error> {
        let mut cfg = load_config(self.config.as_deref())?;
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(frames) = self.frames {
            cfg.frames = frames;
        }
        if let Some(lambda) = self.lambda {
            cfg = SweepAxis::Lambda.apply(&cfg, lambda)?;
        }
        if let Some(v) = self.v {
            cfg = SweepAxis::V.apply(&cfg, v)?;
        }
        if let Some(u) = self.upsilon_db {
            cfg = SweepAxis::UpsilonDb.apply(&cfg, u)?;
        }
        if let Some(case) = self.caching_case {
            cfg = SweepAxis::CachingCase.apply(&cfg, f64::from(case))?;
        }
        cfg.validate().map_err(|e| Error::Validation(e.to_string()))?;
        Ok(cfg)
    }
}

fn parse_policy(s: &str) -> Result<PolicyKind, String> {
    s.parse().map_err(|e: cachevid_core::policy::UnknownPolicy| e.to_string())
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Policies to compare (comma separated).
    #[arg(long, value_delimiter = ',', value_parser = parse_policy, default_values_t = PolicyKind::ALL.to_vec())]
    pub policy: Vec<PolicyKind>,
    #[arg(long, default_value_t = 1)]
    pub trials: u32,
    /// Summary CSV; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-slot CSV of the first trial. With several policies the policy
    /// name is appended to the file stem.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Per-frame association CSV of the first trial, named like `--trace`.
    #[arg(long)]
    pub frame_log: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// lambda, caching_case, V or upsilon_db.
    #[arg(long)]
    pub axis: String,
    /// Comma separated axis values.
    #[arg(long, value_delimiter = ',', required = true)]
    pub values: Vec<f64>,
    #[arg(long, value_delimiter = ',', value_parser = parse_policy, default_values_t = PolicyKind::ALL.to_vec())]
    pub policy: Vec<PolicyKind>,
    #[arg(long, default_value_t = 200)]
    pub trials: u32,
    /// Sweep CSV; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DumpPolicyArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Node type; the highest when absent.
    #[arg(long)]
    pub node_type: Option<usize>,
    /// Link distance, meters.
    #[arg(long, default_value_t = 2.0)]
    pub distance: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DumpFieldArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Frame index (fields are drawn as in trial 0).
    #[arg(long, default_value_t = 0)]
    pub frame: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Opens `path` for writing, or stdout.
fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, Error> {
    match path {
        None => Ok(Box::new(io::stdout().lock())),
        Some(p) => Ok(Box::new(BufWriter::new(File::create(p).map_err(|e| Error::io(p, e))?))),
    }
}

fn write_to(path: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<(), Error> {
    let mut w = sink(path)?;
    let shown = path.unwrap_or(Path::new("<stdout>"));
    f(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(shown, e))
}

/// `trace.csv` becomes `trace-proposed.csv` when several policies run.
fn per_policy(path: &Path, kind: PolicyKind, several: bool) -> PathBuf {
    if !several {
        return path.to_path_buf();
    }
    let stem = path.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
    let mut name = format!("{stem}-{}", kind.name());
    if let Some(ext) = path.extension() {
        name.push('.');
        name.push_str(&ext.to_string_lossy());
    }
    path.with_file_name(name)
}

fn run(args: &RunArgs) -> Result<(), Error> {
    let cfg = args.config.resolve()?;
    if args.trials == 0 {
        return Err(Error::Validation("trials must be at least 1".into()));
    }
    let results = run_experiment(&cfg, &args.policy, args.trials, cfg.seed);
    write_to(args.out.as_deref(), |w| output::write_summary(w, &results))?;

    if args.trace.is_some() || args.frame_log.is_some() {
        let several = args.policy.len() > 1;
        for &kind in &args.policy {
            let m = run_trial_with(&cfg, kind, trial_seed(cfg.seed, 0), true);
            if let Some(path) = &args.trace {
                let path = per_policy(path, kind, several);
                write_to(Some(&path), |w| output::write_trace(w, m.trace.as_deref().unwrap_or_default()))?;
            }
            if let Some(path) = &args.frame_log {
                let path = per_policy(path, kind, several);
                write_to(Some(&path), |w| output::write_frame_log(w, m.frame_log.as_deref().unwrap_or_default()))?;
            }
        }
    }
    Ok(())
}

fn sweep(args: &SweepArgs) -> Result<(), Error> {
    let cfg = args.config.resolve()?;
    let spec = SweepSpec {
        axis: args.axis.parse()?,
        values: args.values.clone(),
        policies: args.policy.clone(),
        trials: args.trials,
        base_seed: cfg.seed,
    };
    let points = run_sweep(&cfg, &spec)?;
    write_to(args.out.as_deref(), |w| output::write_sweep(w, spec.axis, &points))
}

fn dump_policy(args: &DumpPolicyArgs) -> Result<(), Error> {
    let cfg = args.config.resolve()?;
    let node_type = args.node_type.unwrap_or(cfg.levels);
    if !(1..=cfg.levels).contains(&node_type) {
        return Err(Error::Validation(format!("node type must be in 1..={} (got {node_type})", cfg.levels)));
    }
    let dist = pmf_bits(args.distance, &cfg).map_err(|e| Error::Validation(e.to_string()))?;
    let table = backward_dp(node_type, &dist, &cfg);
    write_to(args.out.as_deref(), |w| output::write_policy_table(w, &table))
}

fn dump_field(args: &DumpFieldArgs) -> Result<(), Error> {
    let cfg = args.config.resolve()?;
    let seed = trial_seed(cfg.seed, 0);
    let field = sample_field(&cfg, args.frame, &mut stream(seed, args.frame, Purpose::Geometry));
    write_to(args.out.as_deref(), |w| output::write_field(w, &field))
}

pub fn execute(cli: &Cli) -> Result<(), Error> {
    match &cli.command {
        Command::Run(a) => run(a),
        Command::Sweep(a) => sweep(a),
        Command::Feasibility(a) => {
            let cfg = a.resolve()?;
            write_to(None, |w| w.write_all(output::feasibility_text(&cfg).as_bytes()))
        }
        Command::DumpPolicy(a) => dump_policy(a),
        Command::DumpField(a) => dump_field(a),
    }
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
