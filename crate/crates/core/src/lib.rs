#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod esdlift;
pub mod exec;
pub mod homotower;
pub mod mat;
pub mod oddform;
pub mod orthogroup;
pub mod pipeline;
pub mod quadmod;
pub mod report;
pub mod ring;
pub mod snf;
pub mod starpres;
pub mod steinberg;
pub mod tc;

pub use error::{Error, Result};
