//! Library side of the `decohere` command-line tool: capacity rows, x-sweeps,
//! figure data, SVG rendering and the verification suite.

mod error;
pub mod row;
pub mod svg;
pub mod sweep;
pub mod verify;

pub use error::CliError;
