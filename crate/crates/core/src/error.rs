use std::fmt;

use thiserror::Error;

use crate::market::OrderId;

/// Which side of the book an order sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Bid,
    Ask,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Bid => f.write_str("bid"),
            Side::Ask => f.write_str("ask"),
        }
    }
}

/// Errors raised by the matching library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("duplicate {side} id {id}")]
    DuplicateId { side: Side, id: OrderId },

    #[error("matching is not a valid matching over the given bids and asks")]
    InvalidMatching,

    #[error("fill {index} is not matchable: bid price {bid_price} < ask price {ask_price}")]
    NotMatchable {
        index: usize,
        bid_price: u64,
        ask_price: u64,
    },

    #[error("{side} list is not sorted as required (first violation at position {index})")]
    UnsortedInput { side: Side, index: usize },

    #[error("instance too large to enumerate: {bids} bids x {asks} asks (limit {limit} per side)")]
    TooLarge {
        bids: usize,
        asks: usize,
        limit: usize,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
