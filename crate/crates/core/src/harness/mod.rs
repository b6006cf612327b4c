//! Data ingestion, synthetic sequences, experiment orchestration and
//! report output.

mod experiment;
mod model_file;
mod pairs;
mod plot;
mod scene;
mod synth;

pub use experiment::{
    default_lambda_grid, evaluate_matcher, evaluate_model, mean_and_stderr, run_experiment, select_by_validation,
    Assignment, ExperimentConfig, ExperimentReport, LearnedWeights, LearnerConfigChoice, Matcher, Method, ReportRow,
    Weighting,
};
pub use model_file::ModelFile;
pub use pairs::{
    build_instance, build_instances, load_scenes_for, make_pairs, PairEntry, PairInstance, PairManifest, SceneStore,
    Split,
};
pub use plot::{emit_plot_data, parse_plot_data, plot_data_text, PlotRow, PLOT_HEADER};
pub use scene::{load_scene, save_scene, SceneFile};
pub use synth::{synth_sequence, SYNTH_WIDTH};
