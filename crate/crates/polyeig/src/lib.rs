//! File formats and the command-line driver for `polyeig-core`.
//!
//! * [`mm`]: Matrix Market reading and writing of Hermitian matrices.
//! * [`problem_dir`]: a problem as coefficient files plus a metadata sidecar.
//! * [`trace`]: CSV iteration traces.
//! * [`cli`]: the `polyeig` subcommands.

pub mod cli;
pub mod error;
pub mod mm;
pub mod problem_dir;
pub mod trace;

pub use error::{Error, Result};
pub use polyeig_core as core;
