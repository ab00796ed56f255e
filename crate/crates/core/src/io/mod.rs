//! Files in and out: FOLD-subset surfaces, built-in generators, solution
//! vectors and analysis reports.

pub mod fold;
pub mod generate;
pub mod json;
pub mod report;
pub mod solution;

pub use fold::{parse_fold, FoldDocument};
pub use generate::{generate, Shape};
pub use json::to_canonical_json;
pub use report::{analyze, AnalysisReport, CheckResult};
pub use solution::SolutionFile;
