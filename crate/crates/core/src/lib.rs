//! Derivative-free hyperparameter tuning for RBF support vector machines,
//! gradient boosting, adaboost and the elastic net, scored by
//! cross-validation or a fast single holdout.
//!
//! ```no_run
//! use std::sync::Arc;
//! use autotune::learners::LearnerKind;
//! use autotune::tuner::{tune, EvaluationStrategy, Optimizer, TuneSpec};
//!
//! let sonar = Arc::new(autotune::data::bundled("sonar")?);
//! let spec = TuneSpec::new(
//!     LearnerKind::Svm,
//!     Optimizer::Hj,
//!     EvaluationStrategy::FastHoldout { fraction: 0.5 },
//! );
//! let result = tune(sonar, &spec, 7)?;
//! println!("{:?} -> {}", result.best_named(), result.best_loss);
//! # Ok::<(), autotune::Error>(())
//! ```

pub mod bench;
pub mod cli;
pub mod data;
pub mod error;
pub mod exec;
pub mod learners;
pub mod metrics;
pub mod plot;
pub mod tuner;

pub use error::{Error, Result};
