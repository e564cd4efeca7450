//! Monte Carlo photon counting: Poisson source with two-photon post-selection,
//! independent per-photon detection, and coincidence-based correlation
//! estimates.

mod detect;
mod estimate;
mod experiment;
mod source;

pub use detect::{detect_pair, DetectionModel, PairOutcome, StationProbabilities};
pub use estimate::{estimate_correlation, CoincidenceCounts, EstimatedCorrelation, Normalization};
pub use experiment::{run_experiment, simulate_point, Experiment, ExperimentPoint, NormalizationMode};
pub use source::{sample_post_selected_pairs, BinTally, PairEvent, PairRouting, PairStream, SourceParams};
