use alloc::string::String;
use core::fmt;

use crate::polyfam::ShiftSym;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// Evaluation below the window where every logarithm is positive.
    Domain { n: u64, min: u64 },
    LengthMismatch { expected: usize, found: usize },
    EmptyInput(&'static str),
    InvalidSymbol(String),
    UnboundShift(ShiftSym),
    ShiftsPresent,
    ConstantMember(usize),
    InvalidIndex { index: usize, len: usize },
    NotEssentiallyDistinct(String),
    NoTypeReduction { step: usize, family: String },
    BudgetExceeded(String),
    ZeroDenominator,
    SpaceMismatch(String),
    NonErgodic(String),
    ZeroMeasure,
    InvalidModulus(u64),
    InvalidArgument(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain { n, min } => write!(f, "N = {n} is below the evaluation window (N >= {min})"),
            Error::LengthMismatch { expected, found } => {
                write!(f, "length mismatch: expected {expected}, found {found}")
            }
            Error::EmptyInput(what) => write!(f, "empty input: {what}"),
            Error::InvalidSymbol(msg) => write!(f, "invalid growth symbol: {msg}"),
            Error::UnboundShift(h) => write!(f, "shift symbol {h} is not bound"),
            Error::ShiftsPresent => f.write_str("family still carries symbolic shifts"),
            Error::ConstantMember(i) => write!(f, "member {} is constant in n", i + 1),
            Error::InvalidIndex { index, len } => write!(f, "index {index} out of range for length {len}"),
            Error::NotEssentiallyDistinct(msg) => write!(f, "family is not essentially distinct: {msg}"),
            Error::NoTypeReduction { step, family } => {
                write!(f, "no minimum-degree candidate reduces the type at step {step}: {family}")
            }
            Error::BudgetExceeded(msg) => write!(f, "budget exceeded: {msg}"),
            Error::ZeroDenominator => f.write_str("zero denominator"),
            Error::SpaceMismatch(msg) => write!(f, "space mismatch: {msg}"),
            Error::NonErgodic(msg) => write!(f, "system is not ergodic: {msg}"),
            Error::ZeroMeasure => f.write_str("set has zero measure"),
            Error::InvalidModulus(m) => write!(f, "invalid modulus {m}"),
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
