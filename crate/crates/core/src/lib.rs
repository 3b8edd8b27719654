//! Evaluation toolkit for speech spoofing countermeasures (CM) and
//! spoofing-robust automatic speaker verification (SASV).
//!
//! The crate scores two kinds of submissions against trial key files:
//!
//! * **Track 1** (standalone spoofing/deepfake detection): normalized
//!   detection cost (DCF), its minimum and actual variants, the
//!   log-likelihood-ratio cost `Cllr`, and the equal error rate (EER).
//! * **Track 2** (spoofing-robust speaker verification): the agnostic
//!   DCF (a-DCF) over target/nontarget/spoof trials, the ASV-constrained
//!   minimum tandem DCF (t-DCF), and the concurrent tandem EER (t-EER).
//!
//! Score and key files are plain tab-separated text; [`io`] reads and
//!   validates them and serializes evaluation reports deterministically.
//! [`calibration`] fits affine and isotonic score-to-LLR maps.
//! [`report`] assembles pooled and per-condition (attack / codec)
//!   breakdowns.
//!
//! All accept/reject decisions in this crate follow one tie rule:
//! a trial is accepted as bona fide (or as a target) exactly when its
//! score is **greater than or equal to** the threshold. Thresholds are
//! swept over the distinct observed scores plus `-inf`/`+inf` sentinels.
//! Logarithms are natural throughout, except where `Cllr` converts to
//! bits by its `1/(2 ln 2)` factor.

pub mod calibration;
pub mod cost;
pub mod detection;
pub mod error;
pub mod io;
pub mod model;
pub mod report;
pub mod sasv;

pub use cost::{CmCostModel, SasvCostModel};
pub use error::{DomainError, JoinError, MetricError};
pub use model::{
    SasvPartition, ScoreChannel, ScorePartition, ScoreSet, TandemPartition, Track, TrialClass,
    TrialRecord, Vocabulary,
};
