//! Instance files, reports and command bodies for the `conelim` tool.

pub mod commands;
pub mod instance;
pub mod report;
