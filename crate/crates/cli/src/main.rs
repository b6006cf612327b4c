use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use graphmatch::features::{build_graph, ShapeContextConfig};
use graphmatch::harness::{
    build_instances, emit_plot_data, evaluate_model, load_scene, load_scenes_for, make_pairs, run_experiment,
    save_scene, select_by_validation, synth_sequence, Assignment, ExperimentConfig, ExperimentReport, Method,
    ModelFile, PairInstance, PairManifest, Split,
};
use graphmatch::learn::{predict, Inference};
use graphmatch::loss::{EndpointLoss, LossKind};
use graphmatch::TrainingInstance;

#[derive(Parser)]
#[command(name = "graphmatch", version, about = "Learned graph matching for 2-D point sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum LossArg {
    Hamming,
    Endpoint,
}

#[derive(Clone, Copy, ValueEnum)]
enum AssignmentArg {
    Linear,
    Quadratic,
}

impl From<AssignmentArg> for Assignment {
    fn from(a: AssignmentArg) -> Self {
        match a {
            AssignmentArg::Linear => Assignment::Linear,
            AssignmentArg::Quadratic => Assignment::Quadratic,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a labelled synthetic sequence and a pair manifest.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 30)]
        frames: usize,
        #[arg(long, default_value_t = 15)]
        points: usize,
        /// Jitter standard deviation as a fraction of the cloud diameter.
        #[arg(long, default_value_t = 0.03)]
        noise: f64,
        #[arg(long, default_value_t = 3.0)]
        rotation_deg: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_delimiter = ',', default_value = "10")]
        baselines: Vec<usize>,
        #[arg(long, value_enum, default_value = "hamming")]
        loss: LossArg,
        /// Skip Delaunay edges.
        #[arg(long)]
        no_triangulate: bool,
    },
    /// Train a model on one baseline of a manifest, choosing lambda on the
    /// validation split.
    Train {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, value_enum)]
        assignment: AssignmentArg,
        #[arg(long)]
        baseline: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        lambda: Option<Vec<f64>>,
        #[arg(long, default_value_t = 1e-3)]
        epsilon: f64,
        #[arg(long, default_value_t = 200)]
        max_iterations: usize,
        #[arg(long)]
        out: PathBuf,
        /// Per-iteration training log (TSV).
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Match one scene pair with a trained model.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        query: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        no_triangulate: bool,
        /// Output file; one `query_index target_index` line per query point.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a trained model, or run methods, on every baseline of a
    /// manifest and write a JSON report.
    Eval {
        #[arg(long)]
        manifest: PathBuf,
        /// Evaluate this model instead of training.
        #[arg(long, conflicts_with = "methods")]
        model: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        methods: Option<Vec<Method>>,
        #[arg(long, value_delimiter = ',')]
        lambda: Option<Vec<f64>>,
        #[arg(long, default_value_t = 1e-3)]
        epsilon: f64,
        #[arg(long, default_value_t = 200)]
        max_iterations: usize,
        /// Leave runtimes out so the report is reproducible byte for byte.
        #[arg(long)]
        no_timing: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Convert a report into tab-separated plot data.
    Plotdata {
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn manifest_dir(path: &Path) -> PathBuf {
    path.parent().map_or_else(|| PathBuf::from("."), Path::to_path_buf)
}

fn load_pairs(manifest_path: &Path) -> Result<(PairManifest, Vec<PairInstance>)> {
    let manifest = PairManifest::load(manifest_path)?;
    let store = load_scenes_for(&manifest, &manifest_dir(manifest_path))?;
    let pairs = build_instances(&manifest, &store, &ShapeContextConfig::default())?;
    Ok((manifest, pairs))
}

fn experiment_config(lambda: Option<Vec<f64>>, epsilon: f64, max_iterations: usize) -> ExperimentConfig {
    let mut cfg = ExperimentConfig { epsilon, max_iterations, ..ExperimentConfig::default() };
    if let Some(grid) = lambda {
        cfg.lambda_grid = grid;
    }
    cfg
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synth { out, frames, points, noise, rotation_deg, seed, baselines, loss, no_triangulate } => {
            std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            let scenes = synth_sequence(frames, points, noise, rotation_deg.to_radians(), seed)?;
            let names: Vec<String> = (0..scenes.len()).map(|t| format!("frame_{t:03}.txt")).collect();
            for (name, scene) in names.iter().zip(&scenes) {
                save_scene(scene, out.join(name))?;
            }
            let loss = match loss {
                LossArg::Hamming => LossKind::Hamming,
                LossArg::Endpoint => LossKind::Endpoint(EndpointLoss::new(graphmatch::harness::SYNTH_WIDTH)?),
            };
            let mut manifest: Option<PairManifest> = None;
            for b in baselines {
                let m = make_pairs(&names, &scenes, b, loss, !no_triangulate)?;
                match manifest.as_mut() {
                    Some(all) => all.extend(m),
                    None => manifest = Some(m),
                }
            }
            let manifest = manifest.context("no baselines given")?;
            manifest.save(out.join("manifest.json"))?;
            println!("wrote {} scenes and {} pairs to {}", scenes.len(), manifest.entries.len(), out.display());
        }
        Command::Train { manifest, assignment, baseline, lambda, epsilon, max_iterations, out, log } => {
            let (m, pairs) = load_pairs(&manifest)?;
            let baseline = match baseline {
                Some(b) => b,
                None => match m.baselines()[..] {
                    [b] => b,
                    _ => bail!("manifest has several baselines; pick one with --baseline"),
                },
            };
            let split = |s: Split| -> Vec<TrainingInstance> {
                pairs
                    .iter()
                    .filter(|p| p.entry.baseline == baseline && p.entry.split == s)
                    .map(|p| p.instance.clone())
                    .collect()
            };
            let cfg = experiment_config(lambda, epsilon, max_iterations);
            let assignment = Assignment::from(assignment);
            let (choice, state) =
                select_by_validation(&split(Split::Train), &split(Split::Validation), assignment, &m.loss, &cfg)?;
            ModelFile { w: state.w.clone(), assignment, lambda: Some(choice.lambda) }.save(&out)?;
            if let Some(log) = log {
                let f = File::create(&log).with_context(|| format!("creating {}", log.display()))?;
                state.write_log(BufWriter::new(f))?;
            }
            println!(
                "lambda {} validation loss {} iterations {} converged {}",
                choice.lambda,
                choice.validation_loss,
                state.history.len(),
                state.converged
            );
        }
        Command::Predict { model, query, target, no_triangulate, out } => {
            let model = ModelFile::load(&model)?;
            let shape = ShapeContextConfig::default();
            let g = build_graph(&load_scene(&query)?.points, &shape, !no_triangulate)?;
            let gp = build_graph(&load_scene(&target)?.points, &shape, !no_triangulate)?;
            let inference = match model.assignment {
                Assignment::Linear => Inference::Linear,
                Assignment::Quadratic => Inference::graduated(),
            };
            let y = predict(&model.w, &g, &gp, &inference)?;
            let mut text = String::new();
            for (i, j) in y.pairs() {
                text.push_str(&format!("{i} {j}\n"));
            }
            match out {
                Some(p) => std::fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?,
                None => std::io::stdout().write_all(text.as_bytes())?,
            }
        }
        Command::Eval { manifest, model, methods, lambda, epsilon, max_iterations, no_timing, out } => {
            let (m, pairs) = load_pairs(&manifest)?;
            let mut cfg = experiment_config(lambda, epsilon, max_iterations);
            cfg.timing = !no_timing;
            let report = match model {
                Some(path) => {
                    let model = ModelFile::load(&path)?;
                    evaluate_model(&pairs, &m.loss, &model.w, model.assignment, model.lambda, &cfg)?
                }
                None => run_experiment(&pairs, &m.loss, &methods.unwrap_or_else(Method::all), &cfg)?,
            };
            std::fs::write(&out, report.to_json()?).with_context(|| format!("writing {}", out.display()))?;
            for r in &report.rows {
                println!("{}\t{}\t{:.4}\t{:.4}", r.baseline, r.method, r.mean_loss, r.stderr);
            }
        }
        Command::Plotdata { report, out } => {
            let text = std::fs::read_to_string(&report).with_context(|| format!("reading {}", report.display()))?;
            let report: ExperimentReport = serde_json::from_str(&text).context("parsing report")?;
            emit_plot_data(&report, &out)?;
        }
    }
    Ok(())
}
