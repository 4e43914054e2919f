//! Library surface of the experiment runner: configuration, row encoding,
//! family dispatch, and report formatting. The `lpp` binary is a thin shell
//! over these modules.

pub mod config;
pub mod report;
pub mod rows;
pub mod runner;
