use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pmi_sampler::cli::{self, Format, RunConfig};
use pmi_sampler::frame_io::{self, IngestOptions};
use pmi_sampler::synth::{Background, SceneSpec};
use pmi_sampler::{Error, MetricKind, Regularization, SamplerConfig, ScoreConfig, SelectMode};

#[derive(Parser)]
#[command(name = "pmi-sampler", version, about = "Motion-salience frame selection with patch mutual information")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score every adjacent frame pair and write the motion distribution.
    Score {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "pmi")]
        metric: MetricKind,
    },
    /// Select frames from the cumulative motion distribution.
    Select {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "pmi")]
        metric: MetricKind,
        #[arg(short = 'n', long = "num-frames")]
        num_frames: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "center")]
        mode: SelectMode,
        /// Split the video into this many uniform clips and select inside each.
        #[arg(long, default_value_t = 1)]
        clips: usize,
        /// Repeat frames evenly when the video is shorter than the request.
        #[arg(long)]
        allow_repeat: bool,
        #[arg(long, value_name = "DIR")]
        export_frames: Option<PathBuf>,
    },
    /// Score with several metrics and report per-pair cost.
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "pmi,euclidean,cosine,psnr,histogram_mi")]
        metrics: Vec<MetricKind>,
    },
    /// Render a synthetic test video to a PMIS container.
    Synth(SynthArgs),
}

#[derive(Args)]
struct Common {
    /// Image directory or PMIS container.
    input: PathBuf,
    #[arg(long, default_value_t = 7)]
    patch_size: usize,
    #[arg(long, default_value_t = 0.3)]
    alpha: f64,
    #[arg(long, default_value_t = 64)]
    bins: usize,
    #[arg(long, value_name = "HxW", value_parser = parse_pair_x)]
    resize: Option<(usize, usize)>,
    #[arg(long)]
    grayscale: bool,
    /// Give frame 0 no motion mass.
    #[arg(long)]
    exclude_t0_mass: bool,
    /// Worker threads (default: $PMI_THREADS, else all cores).
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, default_value = "json")]
    format: Format,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(short, long)]
    output: PathBuf,
    /// burst (motion in frames 20-40) or still.
    #[arg(long, default_value = "burst")]
    preset: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    jitter: Option<usize>,
    #[arg(long, value_name = "HxW", value_parser = parse_pair_x)]
    size: Option<(usize, usize)>,
    #[arg(long)]
    channels: Option<usize>,
    #[arg(long)]
    frames: Option<usize>,
    /// gradient, noise or constant:<level>.
    #[arg(long)]
    background: Option<String>,
    #[arg(long)]
    sprite_size: Option<usize>,
    #[arg(long)]
    intensity: Option<f64>,
    #[arg(long, value_name = "Y,X", value_parser = parse_pair_i64, allow_hyphen_values = true)]
    origin: Option<(i64, i64)>,
    #[arg(long, value_name = "DY,DX", value_parser = parse_pair_i64, allow_hyphen_values = true)]
    velocity: Option<(i64, i64)>,
    /// Inclusive motion window START,END, or "none".
    #[arg(long)]
    window: Option<String>,
}

fn parse_pair_x(s: &str) -> Result<(usize, usize), String> {
    let (h, w) = s.split_once(['x', 'X']).ok_or("expected HxW")?;
    let h = h.trim().parse().map_err(|_| format!("bad height in '{s}'"))?;
    let w = w.trim().parse().map_err(|_| format!("bad width in '{s}'"))?;
    Ok((h, w))
}

fn parse_pair_i64(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s.split_once(',').ok_or("expected A,B")?;
    Ok((
        a.trim().parse().map_err(|_| format!("bad value in '{s}'"))?,
        b.trim().parse().map_err(|_| format!("bad value in '{s}'"))?,
    ))
}

impl Common {
    fn run_config(&self, metric: MetricKind) -> RunConfig {
        let mut cfg = RunConfig::new(&self.input);
        cfg.metric = metric;
        cfg.sampler.score = ScoreConfig {
            patch_size: self.patch_size,
            alpha: self.alpha,
            histogram_bins: self.bins,
            regularization: Regularization::default(),
            exclude_t0_mass: self.exclude_t0_mass,
        };
        cfg.ingest = IngestOptions {
            resize_to: self.resize,
            grayscale: self.grayscale,
        };
        cfg.output = self.output.clone();
        cfg.format = self.format;
        cfg.threads = self.threads;
        cfg
    }
}

fn synth_spec(args: &SynthArgs) -> Result<SceneSpec, Error> {
    let jitter = args.jitter.unwrap_or(0);
    let mut spec = match args.preset.as_str() {
        "burst" => SceneSpec::burst(args.seed, jitter),
        "still" => SceneSpec::still(args.seed, jitter),
        other => {
            return Err(Error::InvalidConfig(format!(
                "unknown preset '{other}', expected burst or still"
            )))
        }
    };
    if let Some((h, w)) = args.size {
        spec.height = h;
        spec.width = w;
    }
    if let Some(c) = args.channels {
        spec.channels = c;
    }
    if let Some(t) = args.frames {
        spec.frames = t;
    }
    if let Some(bg) = &args.background {
        spec.background = match bg.as_str() {
            "gradient" => Background::Gradient,
            "noise" => Background::Noise,
            s => match s.strip_prefix("constant:").map(str::parse::<f64>) {
                Some(Ok(level)) => Background::Constant { level },
                _ => {
                    return Err(Error::InvalidConfig(format!(
                        "unknown background '{s}', expected gradient, noise or constant:<level>"
                    )))
                }
            },
        };
    }
    if let Some(size) = args.sprite_size {
        spec.sprite.size = size;
    }
    if let Some(v) = args.intensity {
        spec.sprite.intensity = v;
    }
    if let Some(o) = args.origin {
        spec.sprite.origin = o;
    }
    if let Some(v) = args.velocity {
        spec.sprite.velocity = v;
    }
    if let Some(w) = &args.window {
        spec.motion_window = if w == "none" {
            None
        } else {
            let (a, b) = parse_pair_i64(w).map_err(Error::InvalidConfig)?;
            if a < 0 || b < 0 {
                return Err(Error::InvalidConfig(format!("negative motion window '{w}'")));
            }
            Some((a as usize, b as usize))
        };
    }
    Ok(spec)
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Score { common, metric } => {
            let cfg = common.run_config(metric);
            let threads = cli::resolve_threads(cfg.threads)?;
            let report = cli::with_pool(threads, || cli::cmd_score(&cfg))??;
            let text = match cfg.format {
                Format::Json => cli::to_json(&report),
                Format::Csv => cli::score_csv(&report.scores),
            };
            cli::emit(&text, cfg.output.as_deref())
        }
        Command::Select {
            common,
            metric,
            num_frames,
            seed,
            mode,
            clips,
            allow_repeat,
            export_frames,
        } => {
            let mut cfg = common.run_config(metric);
            cfg.sampler = SamplerConfig {
                score: cfg.sampler.score,
                num_frames,
                mode,
                seed,
                clips,
                allow_repeat,
            };
            cfg.export_frames = export_frames;
            let threads = cli::resolve_threads(cfg.threads)?;
            let report = cli::with_pool(threads, || cli::cmd_select(&cfg))??;
            let text = match cfg.format {
                Format::Json => cli::to_json(&report),
                Format::Csv => cli::select_csv(&report),
            };
            cli::emit(&text, cfg.output.as_deref())
        }
        Command::Compare { common, metrics } => {
            let mut cfg = common.run_config(MetricKind::Pmi);
            cfg.metrics = metrics;
            let threads = cli::resolve_threads(cfg.threads)?;
            let report = cli::with_pool(threads, || cli::cmd_compare(&cfg))??;
            let text = match cfg.format {
                Format::Json => cli::to_json(&report),
                Format::Csv => cli::compare_csv(&report),
            };
            cli::emit(&text, cfg.output.as_deref())
        }
        Command::Synth(args) => {
            let spec = synth_spec(&args)?;
            let seq = pmi_sampler::render(&spec)?;
            frame_io::write_container(&seq, &args.output)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.class().exit_code() as u8)
        }
    }
}
