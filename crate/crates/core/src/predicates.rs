//! Executable correctness predicates over matchings.
//!
//! These are used as postcondition checks by the mechanisms, as verdict
//! functions by the [`crate::check`] harness and by the CLI summary line.

use std::collections::HashSet;

use crate::market::{demand_at, supply_at, Ask, Bid, Matching, Order, Price};
use crate::oracle;

/// Every fill pairs a bid with an ask priced at or below it.
pub fn all_matchable(m: &Matching) -> bool {
    m.iter().all(|f| f.bid.price >= f.ask.price)
}

fn no_dup<O: Order>(orders: impl Iterator<Item = O>) -> bool {
    let mut seen = HashSet::new();
    orders.into_iter().all(|o| seen.insert(o))
}

/// `m` is a matching over `bids` and `asks`: all fills matchable, no bid or
/// ask used twice, and every matched order present in the respective list.
pub fn matching_in(bids: &[Bid], asks: &[Ask], m: &Matching) -> bool {
    if !all_matchable(m) {
        return false;
    }
    if !no_dup(m.iter().map(|f| f.bid)) || !no_dup(m.iter().map(|f| f.ask)) {
        return false;
    }
    let bid_set: HashSet<&Bid> = bids.iter().collect();
    let ask_set: HashSet<&Ask> = asks.iter().collect();
    m.iter()
        .all(|f| bid_set.contains(&f.bid) && ask_set.contains(&f.ask))
}

/// Individually rational: `ask.price <= trade_price <= bid.price` on every fill.
pub fn is_ir(m: &Matching) -> bool {
    m.iter()
        .all(|f| f.ask.price <= f.trade_price && f.trade_price <= f.bid.price)
}

/// No bid in `bids` is left out while a strictly cheaper bid from `bids` is matched.
///
/// Equivalent to the pairwise definition: the highest unmatched price must
/// not exceed the lowest matched price (both taken over members of `bids`).
pub fn fair_on_bids(m: &Matching, bids: &[Bid]) -> bool {
    let matched: HashSet<Bid> = m.iter().map(|f| f.bid).collect();
    let (mut lowest_matched, mut highest_unmatched) = (None::<Price>, None::<Price>);
    for b in bids {
        if matched.contains(b) {
            lowest_matched = Some(lowest_matched.map_or(b.price, |p| p.min(b.price)));
        } else {
            highest_unmatched = Some(highest_unmatched.map_or(b.price, |p| p.max(b.price)));
        }
    }
    match (lowest_matched, highest_unmatched) {
        (Some(lo), Some(hi)) => hi <= lo,
        _ => true,
    }
}

/// Mirror of [`fair_on_bids`]: no ask is left out while a strictly dearer ask is matched.
pub fn fair_on_asks(m: &Matching, asks: &[Ask]) -> bool {
    let matched: HashSet<Ask> = m.iter().map(|f| f.ask).collect();
    let (mut highest_matched, mut lowest_unmatched) = (None::<Price>, None::<Price>);
    for a in asks {
        if matched.contains(a) {
            highest_matched = Some(highest_matched.map_or(a.price, |p| p.max(a.price)));
        } else {
            lowest_unmatched = Some(lowest_unmatched.map_or(a.price, |p| p.min(a.price)));
        }
    }
    match (highest_matched, lowest_unmatched) {
        (Some(hi), Some(lo)) => lo >= hi,
        _ => true,
    }
}

pub fn is_fair(m: &Matching, bids: &[Bid], asks: &[Ask]) -> bool {
    fair_on_asks(m, asks) && fair_on_bids(m, bids)
}

/// All fills clear at a single trade price. Vacuously true for an empty matching.
pub fn is_uniform(m: &Matching) -> bool {
    uniform_trade_price(m).is_some() || m.is_empty()
}

/// The shared trade price of a non-empty uniform matching.
pub fn uniform_trade_price(m: &Matching) -> Option<Price> {
    let first = m.fills().first()?.trade_price;
    m.iter().all(|f| f.trade_price == first).then_some(first)
}

/// `m` is a matching over `bids`/`asks` of the largest possible size.
///
/// The maximum size comes from the augmenting-path oracle, which shares no
/// code with the mechanisms.
pub fn is_maximum(m: &Matching, bids: &[Bid], asks: &[Ask]) -> bool {
    matching_in(bids, asks, m) && m.len() == oracle::max_matching_size_oracle(bids, asks)
}

/// Volume inequalities at one price `p`.
///
/// Field names follow the compared quantities: `matched_bids_ge` is the
/// number of matched bids priced at or above `p`, `demand` is the number of
/// bids in the market priced at or above `p`, and so on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundsReport {
    pub p: Price,
    pub matched_bids_ge: usize,
    pub matched_asks_ge: usize,
    pub matched_bids_le: usize,
    pub matched_asks_le: usize,
    pub demand: usize,
    pub supply: usize,
    pub size: usize,
    /// `matched_bids_ge >= matched_asks_ge`
    pub bids_above_ok: bool,
    /// `matched_bids_le <= matched_asks_le`
    pub asks_below_ok: bool,
    /// `size <= matched_bids_ge + matched_asks_le`
    pub size_by_matched_ok: bool,
    /// `size <= demand + supply`
    pub size_by_market_ok: bool,
}

impl BoundsReport {
    pub fn all_ok(&self) -> bool {
        self.bids_above_ok
            && self.asks_below_ok
            && self.size_by_matched_ok
            && self.size_by_market_ok
    }
}

/// Evaluates the matched-volume and total-volume bounds at price `p`.
///
/// The flags are only meaningful when `matching_in(bids, asks, m)` holds.
pub fn volume_bounds_report(bids: &[Bid], asks: &[Ask], m: &Matching, p: Price) -> BoundsReport {
    let mb = m.bids();
    let ma = m.asks();
    let matched_bids_ge = demand_at(&mb, p);
    let matched_asks_ge = ma.iter().filter(|a| a.price >= p).count();
    let matched_bids_le = mb.iter().filter(|b| b.price <= p).count();
    let matched_asks_le = supply_at(&ma, p);
    let demand = demand_at(bids, p);
    let supply = supply_at(asks, p);
    let size = m.len();
    BoundsReport {
        p,
        matched_bids_ge,
        matched_asks_ge,
        matched_bids_le,
        matched_asks_le,
        demand,
        supply,
        size,
        bids_above_ok: matched_bids_ge >= matched_asks_ge,
        asks_below_ok: matched_bids_le <= matched_asks_le,
        size_by_matched_ok: size <= matched_bids_ge + matched_asks_le,
        size_by_market_ok: size <= demand + supply,
    }
}

/// Price grid on which the volume bounds are checked: zero, every limit
/// price, and one past the largest of them.
pub fn price_grid(bids: &[Bid], asks: &[Ask]) -> Vec<Price> {
    let mut grid: Vec<Price> = std::iter::once(0)
        .chain(bids.iter().map(|b| b.price))
        .chain(asks.iter().map(|a| a.price))
        .collect();
    let top = grid.iter().copied().max().unwrap_or(0);
    grid.push(top.saturating_add(1));
    grid.sort_unstable();
    grid.dedup();
    grid
}
