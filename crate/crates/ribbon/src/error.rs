//! Library error type.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RibbonError {
    /// A configuration violates one of its invariants.
    InvalidConfig(String),
    /// Standard construction still failed after the allowed retries.
    ConstructionFailed { attempts: u32 },
    /// A balanced build could not place all keys of a final-level shard.
    BalancedOverflow { shard: usize },
    /// A space budget is too small to afford even one solution bit per row.
    BudgetTooSmall,
    /// `backtrack` was asked to clear a row that is not occupied.
    BacktrackEmptyRow { row: usize },
}

impl fmt::Display for RibbonError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RibbonError::InvalidConfig(reason) => write!(f, "invalid configuration: {reason}"),
            RibbonError::ConstructionFailed { attempts } => {
                write!(f, "construction failed after {attempts} attempt(s)")
            }
            RibbonError::BalancedOverflow { shard } => {
                write!(f, "balanced construction overflowed final-level shard {shard}")
            }
            RibbonError::BudgetTooSmall => write!(f, "space budget too small for r >= 1"),
            RibbonError::BacktrackEmptyRow { row } => {
                write!(f, "cannot backtrack row {row}: not occupied")
            }
        }
    }
}

impl std::error::Error for RibbonError {}
