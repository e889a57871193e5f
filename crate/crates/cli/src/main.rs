use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use streamprop::imageio::{
    load_annotations, load_ppm, load_svm_model, save_svm_model, write_ppm, write_proposals,
    ANNOTATION_HEADER,
};
use streamprop::pipeline::synth::{center_surround_model, ground_truth, planted_square_dataset};
use streamprop::pipeline::{
    image_path, list_ppm_images, proposal_digest, run_bench, run_eval, Pipeline, PipelineConfig,
    Scheduler,
};
use streamprop::{Error, Result};

#[derive(Parser)]
#[command(
    name = "streamprop",
    version,
    about = "Streaming multi-scale region proposals"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propose windows for one image and write them as CSV.
    Propose {
        #[arg(long)]
        image: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        opts: PipelineOpts,
    },
    /// Evaluate detection rate and MABO over an annotated image directory.
    Eval {
        #[arg(long)]
        images: PathBuf,
        #[arg(long)]
        ann: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        #[command(flatten)]
        opts: PipelineOpts,
    },
    /// Time the pipeline over every PPM image in a directory.
    Bench {
        #[arg(long)]
        images: PathBuf,
        #[arg(long, default_value_t = 5)]
        repeats: usize,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
        #[command(flatten)]
        opts: PipelineOpts,
    },
    /// Write a planted-square dataset with annotations and a matching model.
    Synth {
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 128)]
        size: usize,
        #[arg(long, default_value_t = 20)]
        min_side: usize,
        #[arg(long, default_value_t = 100)]
        max_side: usize,
    },
}

#[derive(Args)]
struct PipelineOpts {
    /// Model file; overrides `model_path` in the config.
    #[arg(long)]
    model: Option<PathBuf>,
    /// TOML config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    base_sizes: Option<Vec<usize>>,
    #[arg(long)]
    scheduler: Option<Scheduler>,
    #[arg(long)]
    top_n_per_scale: Option<usize>,
    #[arg(long)]
    top_k: Option<usize>,
    #[arg(long)]
    iou_thresh: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    budgets: Option<Vec<usize>>,
    /// Overrides the config and STREAMPROP_THREADS.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    pipelined_stages: bool,
}

impl PipelineOpts {
    fn build(self) -> Result<Pipeline> {
        let mut cfg = match &self.config {
            Some(path) => {
                let mut cfg = PipelineConfig::load(path)?;
                // relative model paths are taken from the config's directory
                if let (Some(m), Some(dir)) = (&cfg.model_path, path.parent()) {
                    cfg.model_path = Some(dir.join(m));
                }
                cfg
            }
            None => PipelineConfig::default(),
        };
        cfg.apply_env()?;
        if let Some(v) = self.base_sizes {
            cfg.base_sizes = v;
        }
        if let Some(v) = self.scheduler {
            cfg.scheduler = v;
        }
        if let Some(v) = self.top_n_per_scale {
            cfg.top_n_per_scale = v;
        }
        if let Some(v) = self.top_k {
            cfg.top_k = v;
        }
        if let Some(v) = self.iou_thresh {
            cfg.iou_thresh = v;
        }
        if let Some(v) = self.budgets {
            cfg.budgets = v;
        }
        if let Some(v) = self.threads {
            cfg.threads = v;
        }
        cfg.pipelined_stages |= self.pipelined_stages;
        if let Some(m) = self.model {
            cfg.model_path = Some(m);
        }
        cfg.validate()?;
        let model = match &cfg.model_path {
            Some(path) => load_svm_model(path)?,
            None => {
                return Err(Error::InvalidArgument(
                    "no model given (--model or model_path in --config)".into(),
                ))
            }
        };
        Pipeline::new(cfg, model)
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Propose { image, out, opts } => {
            let pipeline = opts.build()?;
            let img = load_ppm(&image)?;
            let (props, report) = pipeline.run(&img)?;
            write_proposals(&props, &out)?;
            log::info!(
                "{} proposals over {} scales in {:.3}s",
                props.len(),
                report.scales.len(),
                report.seconds
            );
            println!("{}", proposal_digest(&props));
        }
        Command::Eval {
            images,
            ann,
            out_dir,
            opts,
        } => {
            let pipeline = opts.build()?;
            let gt = load_annotations(&ann)?;
            let summary = run_eval(&images, &gt, &pipeline, &out_dir)?;
            println!(
                "{} images, {} objects, {} missing",
                summary.images_evaluated,
                summary.objects,
                summary.images_missing.len()
            );
            for line in summary.lines() {
                println!("{line}");
            }
        }
        Command::Bench {
            images,
            repeats,
            report,
            opts,
        } => {
            let pipeline = opts.build()?;
            let mut loaded = Vec::new();
            for path in list_ppm_images(&images)? {
                let name = path
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default();
                loaded.push((name, load_ppm(&path)?));
            }
            let bench = run_bench(&loaded, &pipeline, repeats)?;
            let json = serde_json::to_string_pretty(&bench).expect("report serializes");
            match report {
                Some(path) => {
                    fs::write(&path, json + "\n").map_err(|e| io_error(&path, e))?;
                    println!("{:.2} fps over {} images", bench.fps, bench.images);
                }
                None => println!("{json}"),
            }
        }
        Command::Synth {
            out_dir,
            count,
            seed,
            size,
            min_side,
            max_side,
        } => {
            if size < 8 || min_side == 0 || min_side > max_side {
                return Err(Error::InvalidArgument(
                    "need size >= 8 and 0 < min_side <= max_side".into(),
                ));
            }
            fs::create_dir_all(&out_dir).map_err(|e| io_error(&out_dir, e))?;
            let data = planted_square_dataset(seed, count, size, size, (min_side, max_side));
            let mut ann = format!("{ANNOTATION_HEADER}\n");
            for (g, (id, sq)) in ground_truth(&data).iter().zip(&data) {
                write_ppm(&sq.image, image_path(&out_dir, id))?;
                for o in &g.objects {
                    let b = o.bbox;
                    let _ = writeln!(
                        ann,
                        "{},{},{},{},{},{}",
                        g.image_id, o.class_label, b.x0, b.y0, b.x1, b.y1
                    );
                }
            }
            let ann_path = out_dir.join("annotations.csv");
            fs::write(&ann_path, ann).map_err(|e| io_error(&ann_path, e))?;
            save_svm_model(&center_surround_model(), out_dir.join("model.txt"))?;
            println!("wrote {count} images to {}", out_dir.display());
        }
    }
    Ok(())
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_input_error() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
