//! Frames of operator iterates `{Tⁿvᵢ}` in finite dimensions.
//!
//! The crate covers admissibility of an operator for (Parseval) frames of
//! iterations, Parseval frames generated by the defect operator, canonical
//! tightening of an arbitrary frame, truncated Hardy-space model spaces of
//! inner functions, and the conjugation-similarity tests for inner
//! functions.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod defect;
pub mod error;
pub mod frames;
pub mod hardy;
pub mod inner;
pub mod instances;
pub mod numkit;
pub mod operators;
pub mod tighten;

pub use error::{Error, Result};
pub use frames::{FrameReport, FrameSystem, HorizonPolicy};
pub use hardy::{ModelSpace, TruncHardy};
pub use inner::{BlaschkeProduct, MatrixInner};
pub use numkit::{HermMat, Mat, Subspace};
pub use operators::OperatorSpec;
