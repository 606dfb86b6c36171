use num_bigint::BigUint;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("incompatible semigroups: degree {left} vs degree {right}")]
    DegreeMismatch { left: usize, right: usize },

    #[error("incompatible semigroups: level {left} vs level {right}")]
    LevelMismatch { left: usize, right: usize },

    #[error("invalid partial permutation: {0}")]
    InvalidPartialPerm(String),

    #[error("invalid wreath element: {0}")]
    InvalidElement(String),

    #[error("invalid tree map: {0}")]
    InvalidTree(String),

    #[error("invalid subtree type: {0}")]
    InvalidType(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("enumeration limit exceeded: {what} would produce {predicted} items (cap {cap})")]
    EnumerationLimit {
        what: String,
        predicted: BigUint,
        cap: u64,
    },

    #[error("search limit exceeded: {0}")]
    SearchLimit(String),

    #[error("internal consistency error: {0}")]
    Inconsistent(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_cap(what: impl Into<String>, predicted: &BigUint, cap: u64) -> Result<()> {
    if *predicted > BigUint::from(cap) {
        return Err(Error::EnumerationLimit {
            what: what.into(),
            predicted: predicted.clone(),
            cap,
        });
    }
    Ok(())
}
