//! Workbench for `kricci-core`: tensor and field file formats, random
//! instance generation, property suites and flow campaigns.

pub mod campaign;
pub mod error;
pub mod flowcfg;
pub mod formats;
pub mod generate;
pub mod suites;

pub use error::{Error, Result};
pub use kricci_core as core;
