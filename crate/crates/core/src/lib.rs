//! Renewal walks whose steps have slowly varying tails, together with exact
//! samplers for the extremal process of a Poisson random measure with
//! intensity `dt × y⁻² dy` and the statistics used to compare the two.
//!
//! Physical times such as `exp(10⁴)` do not fit in an `f64`, so every time
//! and partial sum is a [`LogNum`]: a nonnegative real stored as its natural
//! logarithm. Slowly varying functions map those times back into ordinary
//! reals.
//!
//! The crate is `no_std` (with `alloc`) when the default `std` feature is
//! disabled. IO, parallel replica pools and report formats live in the
//! companion `shotnoise` crate.

// `!(x > 0.0)` is the idiom here for rejecting NaN along with the bound.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

mod error;
pub mod extremal;
pub mod numscale;
pub mod renewal;
pub mod rngcore;
pub mod slowvary;
pub mod stats;

pub use error::{Error, Result};
pub use extremal::{MarkedPoint, PrePostJump, StepPath};
pub use numscale::LogNum;
pub use renewal::{RenewalCrossing, ShotShape};
pub use rngcore::{RngStream, ScriptedUniforms, UniformSource};
pub use slowvary::{Epsilon, RepresentationSpec, SlowVaryFn};
pub use stats::{EcdfView, TestResult};
