//! Batch runner for discrepancy scans, scaling fits and the Fourier checks.

mod commands;
pub mod config;
pub mod plot;
pub mod table;

pub use commands::{
    fit_table, read_scan_suprema, run, scan_table, Cli, Command, CsvList, FIT_HEADER, SCAN_HEADER,
};
