//! Double-sided call-auction matching.
//!
//! Unit bids and asks are matched by one of several mechanisms, each paired
//! with an executable statement of the property it guarantees:
//!
//! | mechanism                       | guarantee                                   |
//! |---------------------------------|---------------------------------------------|
//! | [`algorithms::produce_mm`]      | maximum size, fair on bids, IR              |
//! | [`algorithms::fair_mm`]         | maximum size, fair                          |
//! | [`algorithms::produce_um`]      | uniform, IR, fair, largest such matching    |
//! | [`algorithms::fairize`]         | fair, same size as its input                |
//! | [`algorithms::ir_middle`]       | IR, same pairs as its input                 |
//!
//! The predicates live in [`predicates`], the brute-force references in
//! [`oracle`], and [`check`] ties them together into a randomized campaign.

pub mod algorithms;
pub mod check;
pub mod cli;
pub mod error;
pub mod io;
pub mod market;
pub mod oracle;
pub mod predicates;

pub use error::{Error, Result, Side};
pub use market::{Ask, Bid, Fill, Instance, Matching, OrderId, Price};
