//! Brute-force reference implementations and synthetic data generation
//! used to validate the `spoofeval` engines.
//!
//! The reference metrics here deliberately share **no computation code**
//! with the engine crate: they re-derive every constant from raw costs and
//! count error rates with direct loops over the score vectors. They are
//! quadratic (or worse) on purpose; clarity and independence beat speed.
//! Only plain data types (`TrialClass`, `ScoreSet`, ...) are imported from
//! the engine crate so the two sides can be compared in tests.

pub mod brute;
pub mod synth;

pub use brute::{BruteTrack1, GridTeer};
pub use synth::{ClassSynthSpec, GaussianComponent, SyntheticData, SyntheticSpec};
