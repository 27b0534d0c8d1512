// SPDX-License-Identifier: MIT OR Apache-2.0

//! Projection-based and panel-based CUSUM change-point tests for
//! high-dimensional time series.
//!
//! The crate is organised around the data flow of a test:
//!
//! * [`model`] generates synthetic panels `X[i, t] = mu[i] + delta[i] g(t/T) + e[i, t]`
//!   with factor-model errors,
//! * [`projection`] builds search directions (oracle, pre-/quasi-oracle, random, ...),
//! * [`stats`] turns a panel and a direction into CUSUM processes and test statistics,
//! * [`limits`] simulates the null limit laws and their quantiles,
//! * [`efficiency`] evaluates the closed-form high-dimensional efficiencies,
//! * [`detector`] bundles a statistic with its null law into a ready-to-run test,
//! * [`segment`] runs binary segmentation on top of a detector,
//! * [`harness`] reproduces the size and power simulation studies.

#![forbid(unsafe_code)]

pub mod detector;
pub mod efficiency;
mod error;
pub mod harness;
pub mod limits;
pub mod model;
pub mod projection;
pub mod rng;
pub mod segment;
pub mod stats;

pub use error::{Error, Result};
pub use model::PanelSeries;
pub use projection::{Projection, Provenance};
