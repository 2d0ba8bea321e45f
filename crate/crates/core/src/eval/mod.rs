//! Cross-validated evaluation, significance testing and anchor-count curves.

pub mod anchors;
pub mod compare;
pub mod cv;
pub mod metrics;
pub mod stats;
pub mod tuning;

pub use anchors::{
    anchor_effect_curve, classify_case, default_sizes, fit_inverse_sqrt, run_anchor_experiment, AnchorCase,
    AnchorCurve, AnchorExperiment, InverseSqrtFit,
};
pub use compare::{compare, compare_scores, overfit_report, ComparisonReport, Outcome, OverfitReport, WinTally};
pub use cv::{fold_splits, run_cv, stratified_kfold, CvConfig, FoldResult, Split};
pub use metrics::{macro_f1, per_class_f1};
pub use stats::{paired_t_test, students_t_test, TTest};
pub use tuning::{candidate_grid, select_learner};
