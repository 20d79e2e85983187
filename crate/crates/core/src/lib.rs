//! Dual-quaternion kinematic control with H∞ disturbance attenuation.
//!
//! The crate is layered bottom-up: [`dq`] algebra, [`kinematics`] of serial
//! chains, [`error_metrics`], [`controllers`], [`disturbances`], the
//! closed-loop [`simulator`], and finally scenario [`config`] parsing and
//! trace [`analysis`].

pub mod analysis;
pub mod config;
pub mod controllers;
pub mod disturbances;
pub mod dq;
pub mod error;
pub mod error_metrics;
pub mod kinematics;
pub mod simulator;

pub use error::{Error, Result};
