//! Puzzle benchmark harness for separating reasoning failures from interface
//! limits: four adjudicated puzzle environments, reference solvers, analytic
//! failure models, a dual-mode agent runner and a tool protocol server.

pub mod error;
pub mod puzzle;

pub use error::{Error, Result};
pub mod adjudicator;
pub mod solvers;
pub mod analytics;
pub mod agents;
pub mod tool_server;
pub mod harness;
