//! Command-line front end: instance files, seeded generation, solver runs,
//! result files and their verification.

pub mod commands;
pub mod format;
pub mod generate;
pub mod result;

pub use format::{instance_digest, parse_instance, serialize_instance, ParseError};
pub use generate::{generate_random, GammaPreset, GenError, GenParams, Probability};
pub use result::{ResultFile, Solver};
