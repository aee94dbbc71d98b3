//! Observers written in the original coordinates.
//!
//! A high-gain observer designed in the coordinates of an injective
//! immersion is moved back to the state coordinates. The Jacobian of the
//! immersion is completed into an invertible matrix, the image of the
//! resulting diffeomorphism is extended to the whole space, and the observer
//! is integrated through a Jacobian solve instead of a left inverse.
//!
//! The numerical core is generic over [`Scalar`] (`f32` or `f64`); the
//! `*64` aliases below fix the scalar to `f64`, which every scenario uses.

// `!(a < b)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod completion;
pub mod dynsys;
mod error;
pub mod extension;
pub mod numkit;
pub mod observer;
mod scalar;
pub mod scenarios;
pub mod selftest;

pub use error::{Error, Result};
pub use scalar::{cast, Scalar};

pub type Matrix64 = numkit::Matrix<f64>;
pub type Grid64 = numkit::Grid<f64>;
pub type Trajectory64 = dynsys::Trajectory<f64>;
pub type ObserverRun64 = observer::ObserverRun<f64>;
pub type Summary64 = observer::Summary<f64>;
pub type NuParams64 = extension::NuParams<f64>;
pub type OscillatorScenario64 = scenarios::OscillatorScenario<f64>;
pub type BioreactorScenario64 = scenarios::BioreactorScenario<f64>;
