//! Non-stationary fuzzy time series forecasting.
//!
//! A first-order fuzzy rule model is trained once; afterwards each new
//! observation perturbs the membership functions from the statistics of a
//! sliding residual window, so the model tracks concept drift without
//! retraining and without touching its rule base. The crate also ships the
//! classic competitors (periodic retraining and a FIFO model ensemble),
//! seeded synthetic drift generators, accuracy metrics, and a manifest-driven
//! benchmark runner.
//!
//! # Example
//!
//! ```
//! use nsfts::nsfts::{NsftsModel, NsftsParams};
//!
//! let train: Vec<f64> = (0..200).map(|i| (i as f64 * 0.2).sin() * 5.0 + 10.0).collect();
//! let mut model = NsftsModel::train(&train, &NsftsParams::default()).unwrap();
//! // Stream new observations; forecasts[t] predicts values[t + 1].
//! let stream: Vec<f64> = (200..260).map(|i| (i as f64 * 0.2).sin() * 5.0 + 12.0).collect();
//! let forecasts = model.run_online(&stream).unwrap();
//! assert_eq!(forecasts.len(), stream.len());
//! ```

pub mod drift;
pub mod error;
pub mod eval;
pub mod fts;
pub mod fuzzy;
pub mod manifest;
pub mod metamodels;
pub mod nsfts;
pub mod partition;
pub mod runner;

pub use error::{Error, Result};
