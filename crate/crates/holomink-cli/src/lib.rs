//! Library side of the `holomink` command: document parsing, the commands
//! themselves, canonical output and golden-dataset verification.

pub mod commands;
pub mod document;
pub mod emit;
pub mod exit;
pub mod report;
pub mod verify;

pub use commands::Settings;
pub use document::{parse_document, read_document, Document, InputError};
pub use exit::{exit_code, Failure};
