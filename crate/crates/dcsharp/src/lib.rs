//! DC# hybrid probabilistic logic programs: parsing, static analysis, exact
//! enumeration, and context-specific likelihood weighting.

pub mod analysis;
pub mod bayes_ball;
pub mod bench;
pub mod bif;
pub mod distribution;
pub mod error;
pub mod estimator;
pub mod fo;
pub mod ground;
pub mod oracle;
pub mod parser;
pub mod program;
pub mod prover;
pub mod run;
pub mod state;
pub mod term;
pub mod validate;

pub use error::{Error, Result};
