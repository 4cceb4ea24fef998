//! Failures and their process exit codes.

use std::fmt;

use holomink::Error;

use crate::document::InputError;

#[derive(Debug, Clone, PartialEq)]
pub enum Failure {
    Input(InputError),
    Library(Error),
    /// verify-paper ran, and this many checks failed.
    Verification { failed: usize },
    /// A valid document of a kind the command does not accept.
    Unsupported(String),
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Failure::Input(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Library(e)
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(e) => write!(f, "{e}"),
            Failure::Library(e) => write!(f, "{e}"),
            Failure::Verification { failed } => write!(f, "{failed} check(s) failed"),
            Failure::Unsupported(m) => write!(f, "{m}"),
        }
    }
}

pub const VERIFICATION_FAILED: u8 = 1;
/// Used by the argument parser for bad flags.
pub const USAGE: u8 = 2;
pub const INVALID_INPUT: u8 = 3;
pub const IO: u8 = 4;
pub const UNSUPPORTED: u8 = 5;

/// One code per library error variant.
pub fn library_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) => INVALID_INPUT,
        Error::ModelMismatch => 10,
        Error::NotSymmetric { .. } => 11,
        Error::InertiaMismatch { .. } => 12,
        Error::DegenerateGram { .. } => 13,
        Error::MetricViolation { .. } => 14,
        Error::DetViolation { .. } => 15,
        Error::OrientationViolation { .. } => 16,
        Error::NullAxis => 17,
        Error::NonNullGenerator { .. } => 18,
        Error::CentralHolonomy { .. } => 19,
        Error::ZeroGenerator => 20,
        Error::NotUnimodular { .. } => 21,
        Error::LiftFailure => 22,
        Error::NotClosing { .. } => 23,
        Error::ExceptionalEntryMismatch { .. } => 24,
        Error::ZeroTriple { .. } => 25,
        Error::FlatOrDegenerate { .. } => 26,
        Error::WrongCausalVertexLine { .. } => 27,
        Error::ClosureViolation { .. } => 28,
        Error::InadmissibleParabolicBranch => 29,
        Error::DegeneratePair { .. } => 30,
        Error::NoOrthochronousRealization => 31,
        Error::HypothesisViolated(_) => 32,
        Error::NullFace => 33,
        Error::NotRotation { .. } => 34,
        Error::NotUnitary { .. } => 35,
    }
}

pub fn exit_code(f: &Failure) -> u8 {
    match f {
        Failure::Input(InputError::Io { .. }) => IO,
        Failure::Input(_) => INVALID_INPUT,
        Failure::Library(e) => library_code(e),
        Failure::Verification { .. } => VERIFICATION_FAILED,
        Failure::Unsupported(_) => UNSUPPORTED,
    }
}

/// Short name of the failure class, used in error documents.
pub fn class_name(f: &Failure) -> String {
    match f {
        Failure::Input(InputError::Io { .. }) => "Io".into(),
        Failure::Input(InputError::Json { .. }) => "InvalidJson".into(),
        Failure::Input(InputError::Field { .. }) => "InvalidField".into(),
        Failure::Library(e) => {
            let dbg = format!("{e:?}");
            dbg.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Error").to_string()
        }
        Failure::Verification { .. } => "VerificationFailed".into(),
        Failure::Unsupported(_) => "Unsupported".into(),
    }
}
