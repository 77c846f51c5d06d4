//! `qrough`: segment fire regions in frame directories, track the threat
//! index, score masks against ground truth and generate synthetic sequences.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use qrough_fire::eval::{evaluate_sequence, synth_sequence, ScenarioKind, SynthScenario};
use qrough_fire::frame_io::{read_mask_dir, write_frame, write_mask, MaskFormat};
use qrough_fire::granulation::DEFAULT_THR;
use qrough_fire::pipeline::{run_directory, RunOptions, RunSummary};
use qrough_fire::qrough_agent::AgentConfig;
use qrough_fire::threat::{choose_p, AlarmPolicy};
use qrough_fire::SegmentConfig;

#[derive(Parser)]
#[command(name = "qrough", version, about = "Fire-region segmentation and fire threat tracking")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a fire mask for every frame in a directory.
    Segment(SegmentArgs),
    /// Segment a sequence and write the per-frame threat report.
    Threat(ThreatArgs),
    /// Score predicted masks against ground-truth masks.
    Eval(EvalArgs),
    /// Generate a synthetic frame sequence with ground truth.
    Synth(SynthArgs),
}

#[derive(Args)]
struct Input {
    /// Directory of numbered frames (PNG or PPM).
    #[arg(long)]
    input: PathBuf,
    /// Filename glob inside the input directory.
    #[arg(long, default_value = "*")]
    pattern: String,
}

#[derive(Args)]
struct Tuning {
    /// Granulation color threshold (1-255).
    #[arg(long, default_value_t = DEFAULT_THR, value_parser = clap::value_parser!(u8).range(1..))]
    thr: u8,
    /// Discount factor in [0, 1).
    #[arg(long, default_value_t = 0.9)]
    gamma: f64,
    /// Quantization levels per feature channel for the Q-table state key.
    #[arg(long, default_value_t = 16)]
    quant_levels: u16,
    /// Lookahead depth of the boundary walk.
    #[arg(long, default_value_t = 1)]
    lookahead: u32,
    /// Start from a previously saved Q-table.
    #[arg(long)]
    load_qtable: Option<PathBuf>,
    /// Save the Q-table after the last frame.
    #[arg(long)]
    save_qtable: Option<PathBuf>,
}

impl Tuning {
    fn apply(&self, opts: &mut RunOptions) {
        opts.segment = SegmentConfig {
            thr: self.thr,
            agent: AgentConfig {
                gamma: self.gamma,
                quant_levels: self.quant_levels,
                lookahead_depth: self.lookahead,
            },
        };
        opts.load_qtable.clone_from(&self.load_qtable);
        opts.save_qtable.clone_from(&self.save_qtable);
    }
}

#[derive(Args)]
struct SegmentArgs {
    #[command(flatten)]
    input: Input,
    /// Output directory for masks.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "pgm")]
    mask_format: MaskFormat,
    #[command(flatten)]
    tuning: Tuning,
}

#[derive(Args)]
struct ThreatArgs {
    #[command(flatten)]
    input: Input,
    /// Frame rate of the sequence; sets the default window and alarm length.
    #[arg(long)]
    fps: f64,
    /// Recent-window length in frames [default: round(fps)].
    #[arg(long)]
    p: Option<usize>,
    /// Alarm threshold on the threat index.
    #[arg(long, default_value_t = AlarmPolicy::DEFAULT_TAU)]
    alarm_tau: f64,
    /// Consecutive frames above the threshold needed to alarm [default: round(fps/2)].
    #[arg(long)]
    alarm_k: Option<usize>,
    /// JSON-lines report path.
    #[arg(long)]
    report: PathBuf,
    /// Also write masks here.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "pgm")]
    mask_format: MaskFormat,
    /// CSV of frame_index,threat for plotting.
    #[arg(long)]
    plot: Option<PathBuf>,
    #[command(flatten)]
    tuning: Tuning,
}

#[derive(Args)]
struct EvalArgs {
    /// Directory of predicted masks.
    #[arg(long)]
    pred: PathBuf,
    /// Directory of ground-truth masks, matched to predictions by sorted filename.
    #[arg(long)]
    gt: PathBuf,
    /// JSON summary path.
    #[arg(long)]
    report: PathBuf,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    scenario: ScenarioKind,
    #[arg(long)]
    frames: usize,
    /// Writes frames/ and gt/ below this directory.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 320)]
    width: usize,
    #[arg(long, default_value_t = 240)]
    height: usize,
    /// Fire area of the first frame, in pixels.
    #[arg(long, default_value_t = 2400.0)]
    base_area: f64,
    /// Per-frame growth factor for grow and shrink.
    #[arg(long, default_value_t = 1.02)]
    rate: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn log_summary(s: &RunSummary) {
    log::info!(
        "{} frames, {} without a fire model, {} reward evaluations, {} known-state hits, {} q-table entries",
        s.reports.len(),
        s.no_fire_model_frames,
        s.reward_evaluations,
        s.known_state_hits,
        s.qtable_entries
    );
}

fn segment(args: SegmentArgs) -> Result<()> {
    ensure_dir(&args.out)?;
    let mut opts = RunOptions::new(&args.input.input);
    opts.pattern = args.input.pattern;
    opts.mask_dir = Some(args.out);
    opts.mask_format = args.mask_format;
    args.tuning.apply(&mut opts);
    log_summary(&run_directory(&opts)?);
    Ok(())
}

fn threat(args: ThreatArgs) -> Result<()> {
    let p = match args.p {
        Some(0) => bail!("--p must be at least 1"),
        Some(p) => p,
        None => choose_p(args.fps)?,
    };
    let mut alarm = AlarmPolicy::for_fps(args.fps);
    alarm.tau = args.alarm_tau;
    if let Some(k) = args.alarm_k {
        if k == 0 {
            bail!("--alarm-k must be at least 1");
        }
        alarm.k = k;
    }
    let mut opts = RunOptions::new(&args.input.input);
    opts.pattern = args.input.pattern;
    if let Some(out) = &args.out {
        ensure_dir(out)?;
    }
    opts.mask_dir = args.out;
    opts.mask_format = args.mask_format;
    opts.report = Some(args.report);
    opts.plot = args.plot;
    opts.fps = Some(args.fps);
    opts.p = p;
    opts.alarm = alarm;
    args.tuning.apply(&mut opts);
    let summary = run_directory(&opts)?;
    log_summary(&summary);
    if let Some(first) = summary.reports.iter().find(|r| r.alarm) {
        log::warn!("alarm first raised at frame {}", first.frame_index);
    }
    Ok(())
}

fn eval(args: EvalArgs) -> Result<()> {
    let preds = read_mask_dir(&args.pred, "*")?;
    let gts = read_mask_dir(&args.gt, "*")?;
    let summary = evaluate_sequence(&preds, &gts)?;
    let file = File::create(&args.report).with_context(|| format!("creating {}", args.report.display()))?;
    serde_json::to_writer_pretty(BufWriter::new(file), &summary)?;
    println!(
        "frames {}  precision {:.4}  recall {:.4}  FP% {:.2}  FN% {:.2}",
        summary.n_frames, summary.precision, summary.recall, summary.fp_pct, summary.fn_pct
    );
    Ok(())
}

fn synth(args: SynthArgs) -> Result<()> {
    if args.width == 0 || args.height == 0 {
        bail!("frame size must be positive");
    }
    let mut scenario = SynthScenario::new(args.scenario, args.frames);
    scenario.width = args.width;
    scenario.height = args.height;
    scenario.base_area = args.base_area;
    scenario.rate = args.rate;
    scenario.seed = args.seed;
    let (frames_dir, gt_dir) = (args.out.join("frames"), args.out.join("gt"));
    ensure_dir(&frames_dir)?;
    ensure_dir(&gt_dir)?;
    let seq = synth_sequence(&scenario);
    for (t, (frame, gt)) in seq.frames.iter().zip(&seq.ground_truth).enumerate() {
        write_frame(frame, frames_dir.join(format!("frame_{t:05}.ppm")))?;
        write_mask(gt, gt_dir.join(format!("frame_{t:05}.pgm")), MaskFormat::Pgm)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let result = match Cli::parse().command {
        Command::Segment(a) => segment(a),
        Command::Threat(a) => threat(a),
        Command::Eval(a) => eval(a),
        Command::Synth(a) => synth(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
