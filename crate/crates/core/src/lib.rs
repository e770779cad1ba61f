#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod certify;
pub mod curvature;
pub mod diagnostics;
pub mod error;
pub mod flow;
pub mod forms;
pub mod geometry;
pub mod grid;
pub mod lemmas;
pub mod linalg;
pub mod random;
pub mod royden;

pub use error::{Error, Result};
pub use num_complex::Complex64;
