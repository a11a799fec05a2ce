#![no_std]
extern crate alloc;

pub mod analysis;
pub mod bohr;
pub mod dynamics;
pub mod error;
pub mod fourier;
pub mod generator;
pub mod model;
pub mod reference;
pub mod linalg;
pub mod tolerances;

pub use error::{Error, Result};
pub use tolerances::Tolerances;
