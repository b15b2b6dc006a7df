//! Crack topology scoring for binary crack-segmentation masks.
//!
//! Both masks are thinned to one-pixel skeletons, split into segments at junction
//! pixels, and matched against each other inside a Euclidean buffer of radius `r`.
//! A segment counts as matched when at least a fraction `θ` of its pixels falls
//! in the buffer of the other side's nearby segments, taken together. Matched
//! length over total length gives PCS (prediction side) and RCS (ground-truth
//! side); CTS is their harmonic mean.
//!
//! ```
//! use crack_topology::{evaluate, BinaryMask, EvalConfig};
//!
//! let gt = BinaryMask::from_ascii(&[
//!     "..........",
//!     ".########.",
//!     "..........",
//! ]);
//! let scores = evaluate(&gt, &gt, &EvalConfig::default()).unwrap();
//! assert_eq!((scores.pcs, scores.rcs, scores.cts), (1.0, 1.0, 1.0));
//! ```

pub mod components;
pub mod error;
pub mod io;
pub mod mask;
pub mod matching;
pub mod morphology;
pub mod overlay;
pub mod preprocess;
pub mod report;
pub mod scoring;
pub mod skeleton;

pub use error::{CtsError, Result};
pub use io::{load_mask, save_mask_png};
pub use mask::{BinaryMask, PixelCoord};
pub use matching::{match_all, MatchConfig, MatchTable};
pub use overlay::render_overlay;
pub use preprocess::{ApplyTo, PreprocessConfig, SmoothMode};
pub use report::{write_report, EvalReport, ReportFormat};
pub use scoring::{evaluate, evaluate_detailed, DegenerateFlag, EvalConfig, Evaluation, Scores};
pub use skeleton::{decompose, thin, SegmentDecomposition, Skeleton};
