//! Inference engines for linear and quadratic assignment.

mod bistochastic;
mod brute;
mod graduated;
mod lap;
mod sinkhorn;

pub use bistochastic::{bistochastic_normalize_baseline, NormalizedCompatibilities};
pub use brute::{brute_force_max, brute_force_qap, for_each_injection, MAX_BRUTE_FORCE_ROWS};
pub use graduated::{graduated_assignment, graduated_assignment_soft, GraduatedAssignmentConfig, SoftAssignment};
pub use lap::{assignment_value, linear_assignment};
pub use sinkhorn::{sinkhorn, stochastic_deviation, DoublyStochasticMatrix};
