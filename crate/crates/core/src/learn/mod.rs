//! Max-margin estimation of the compatibility weights.

mod bundle;
mod inference;
mod risk;
mod trainer;

pub use bundle::{BundleMaster, CuttingPlane, MasterSolution, MASTER_TOLERANCE};
pub use inference::{
    build_augmented_tables, build_tables, most_violated, predict, predict_linear_model, AugmentedTables, Inference,
    MostViolated,
};
pub use risk::{empirical_risk_and_subgradient, prediction_risk, regularized_risk_and_subgradient, EmpiricalRisk};
pub use trainer::{train, IterationRecord, LearnerConfig, TrainerState, LEMMA_TOLERANCE};
