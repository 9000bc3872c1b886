//! WKB asymptotics of Fenchel-Nielsen coordinates along rays of quadratic
//! differentials on the five-punctured sphere.

pub mod asymptotics;
pub mod config;
pub mod error;
pub mod experiments;
pub mod fenchel_nielsen;
pub mod fiducial;
pub mod hitchin_base;
pub mod numerics;
pub mod periods;
pub mod transport;

pub use error::{Error, Result};
