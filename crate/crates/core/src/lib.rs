//! Certified computations in the sequence spaces `lp`, `c0`, `c` and ℓ₂:
//! Schauder expansions, convergence of families, and precompactness.
//!
//! Every norm is an enclosure `[lo, hi]`; verdicts carry finite certificates
//! or witnesses that can be re-checked from the inputs.

pub mod basis;
pub mod cli;
pub mod compactness;
pub mod config;
pub mod convergence;
pub mod element;
pub mod error;
pub mod family;
pub mod json;
pub mod opnorm;
pub mod space;
pub mod tail;

pub use basis::{BasisConstant, BasisDescriptor, BasisFamily, Rotation};
pub use compactness::{check_bounded, check_precompact, check_uniform_tail_set, CompactnessVerdict, SetDescriptor};
pub use config::CheckConfig;
pub use convergence::{
    check_condition1, check_condition2, decide, decide_c, decide_c0, decide_convergence, decide_hilbert, decide_lp,
    direct_norm_check, Decider, Verdict, Witness,
};
pub use element::{Interval, NormInterval, SeqElement, Slack};
pub use error::{Error, Result};
pub use family::{CoordinateForm, Discrepancy, Family, Generator, Rate};
pub use opnorm::{estimate_operator_norm, Operator};
pub use space::{Norm, SpaceKind};
pub use tail::{Envelope, EnvelopeTerm, TailModel};
