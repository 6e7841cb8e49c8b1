//! Orders, fills, matchings and the list utilities the mechanisms are built on.
//!
//! Prices are natural numbers of ticks (the smallest monetary unit). Every
//! order is a unit order; a trader wanting several units submits several
//! orders with distinct ids.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::hash::Hash;

use crate::error::{Error, Result, Side};

pub type Price = u64;
pub type OrderId = u64;

/// A unit buy order. Equality is structural on `(price, id)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Bid {
    pub price: Price,
    pub id: OrderId,
}

/// A unit sell order. Equality is structural on `(price, id)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ask {
    pub price: Price,
    pub id: OrderId,
}

impl Bid {
    pub const fn new(price: Price, id: OrderId) -> Self {
        Bid { price, id }
    }
}

impl Ask {
    pub const fn new(price: Price, id: OrderId) -> Self {
        Ask { price, id }
    }
}

/// Shared view of bids and asks for code that only needs price and id.
pub trait Order: Copy + Eq + Hash {
    const SIDE: Side;
    fn price(&self) -> Price;
    fn id(&self) -> OrderId;
}

impl Order for Bid {
    const SIDE: Side = Side::Bid;
    fn price(&self) -> Price {
        self.price
    }
    fn id(&self) -> OrderId {
        self.id
    }
}

impl Order for Ask {
    const SIDE: Side = Side::Ask;
    fn price(&self) -> Price {
        self.price
    }
    fn id(&self) -> OrderId {
        self.id
    }
}

/// One matched bid-ask pair and the price it trades at.
///
/// Matchability and individual rationality are not enforced here; see
/// [`crate::predicates`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fill {
    pub bid: Bid,
    pub ask: Ask,
    pub trade_price: Price,
}

impl Fill {
    pub const fn new(bid: Bid, ask: Ask, trade_price: Price) -> Self {
        Fill {
            bid,
            ask,
            trade_price,
        }
    }
}

/// An ordered list of fills.
///
/// Duplicate-freeness of the bid and ask projections is a property checked by
/// [`crate::predicates::matching_in`], not a structural guarantee.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Matching {
    fills: Vec<Fill>,
}

impl Matching {
    pub fn new() -> Self {
        Matching::default()
    }

    pub fn len(&self) -> usize {
        self.fills.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fills.is_empty()
    }

    pub fn fills(&self) -> &[Fill] {
        &self.fills
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Fill> {
        self.fills.iter()
    }

    pub fn push(&mut self, fill: Fill) {
        self.fills.push(fill);
    }

    pub fn into_fills(self) -> Vec<Fill> {
        self.fills
    }

    /// Bids of the matching in fill order, duplicates kept.
    pub fn bids(&self) -> Vec<Bid> {
        bids_of(self)
    }

    /// Asks of the matching in fill order, duplicates kept.
    pub fn asks(&self) -> Vec<Ask> {
        asks_of(self)
    }
}

impl From<Vec<Fill>> for Matching {
    fn from(fills: Vec<Fill>) -> Self {
        Matching { fills }
    }
}

impl FromIterator<Fill> for Matching {
    fn from_iter<I: IntoIterator<Item = Fill>>(iter: I) -> Self {
        Matching {
            fills: iter.into_iter().collect(),
        }
    }
}

impl<'a> IntoIterator for &'a Matching {
    type Item = &'a Fill;
    type IntoIter = std::slice::Iter<'a, Fill>;

    fn into_iter(self) -> Self::IntoIter {
        self.fills.iter()
    }
}

impl IntoIterator for Matching {
    type Item = Fill;
    type IntoIter = std::vec::IntoIter<Fill>;

    fn into_iter(self) -> Self::IntoIter {
        self.fills.into_iter()
    }
}

/// A market snapshot whose bid ids and ask ids are each pairwise distinct.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Instance {
    bids: Vec<Bid>,
    asks: Vec<Ask>,
}

impl Instance {
    /// Validates id uniqueness per side; input order is preserved.
    pub fn new(bids: Vec<Bid>, asks: Vec<Ask>) -> Result<Self> {
        check_unique_ids(&bids)?;
        check_unique_ids(&asks)?;
        Ok(Instance { bids, asks })
    }

    pub fn bids(&self) -> &[Bid] {
        &self.bids
    }

    pub fn asks(&self) -> &[Ask] {
        &self.asks
    }

    pub fn into_parts(self) -> (Vec<Bid>, Vec<Ask>) {
        (self.bids, self.asks)
    }

    /// Largest limit price on either side, if any order exists.
    pub fn max_price(&self) -> Option<Price> {
        let b = self.bids.iter().map(|b| b.price).max();
        let a = self.asks.iter().map(|a| a.price).max();
        b.max(a)
    }
}

/// Builds an [`Instance`], rejecting repeated ids on either side.
pub fn mk_instance(bids: Vec<Bid>, asks: Vec<Ask>) -> Result<Instance> {
    Instance::new(bids, asks)
}

fn check_unique_ids<O: Order>(orders: &[O]) -> Result<()> {
    let mut seen = HashSet::with_capacity(orders.len());
    for o in orders {
        if !seen.insert(o.id()) {
            return Err(Error::DuplicateId {
                side: O::SIDE,
                id: o.id(),
            });
        }
    }
    Ok(())
}

/// Order used for bids: price descending, then id ascending.
pub fn cmp_bids_desc(x: &Bid, y: &Bid) -> Ordering {
    y.price.cmp(&x.price).then(x.id.cmp(&y.id))
}

/// Order used for asks: price ascending, then id ascending.
pub fn cmp_asks_asc(x: &Ask, y: &Ask) -> Ordering {
    x.price.cmp(&y.price).then(x.id.cmp(&y.id))
}

/// Order used for asks: price descending, then id ascending.
pub fn cmp_asks_desc(x: &Ask, y: &Ask) -> Ordering {
    y.price.cmp(&x.price).then(x.id.cmp(&y.id))
}

pub fn sort_bids_desc(bids: &[Bid]) -> Vec<Bid> {
    let mut out = bids.to_vec();
    out.sort_by(cmp_bids_desc);
    out
}

pub fn sort_asks_asc(asks: &[Ask]) -> Vec<Ask> {
    let mut out = asks.to_vec();
    out.sort_by(cmp_asks_asc);
    out
}

pub fn sort_asks_desc(asks: &[Ask]) -> Vec<Ask> {
    let mut out = asks.to_vec();
    out.sort_by(cmp_asks_desc);
    out
}

/// Position of the first element that breaks the price direction, if any.
/// Only prices are checked; ties in any id order are accepted.
pub(crate) fn first_unsorted<O: Order>(orders: &[O], descending: bool) -> Option<usize> {
    orders
        .windows(2)
        .position(|w| {
            if descending {
                w[0].price() < w[1].price()
            } else {
                w[0].price() > w[1].price()
            }
        })
        .map(|i| i + 1)
}

/// Number of bids willing to buy at `p`, i.e. `|B(>= p)|`.
pub fn demand_at(bids: &[Bid], p: Price) -> usize {
    bids.iter().filter(|b| b.price >= p).count()
}

/// Number of asks willing to sell at `p`, i.e. `|A(<= p)|`.
pub fn supply_at(asks: &[Ask], p: Price) -> usize {
    asks.iter().filter(|a| a.price <= p).count()
}

pub fn bids_of(m: &Matching) -> Vec<Bid> {
    m.fills.iter().map(|f| f.bid).collect()
}

pub fn asks_of(m: &Matching) -> Vec<Ask> {
    m.fills.iter().map(|f| f.ask).collect()
}

pub fn price_projection<O: Order>(orders: &[O]) -> Vec<Price> {
    orders.iter().map(Order::price).collect()
}

/// True iff `l` is a (not necessarily contiguous) subsequence of `s`.
pub fn is_sublist<T: PartialEq>(l: &[T], s: &[T]) -> bool {
    let mut rest = s.iter();
    l.iter().all(|x| rest.any(|y| y == x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bids(v: &[(Price, OrderId)]) -> Vec<Bid> {
        v.iter().map(|&(p, i)| Bid::new(p, i)).collect()
    }

    fn asks(v: &[(Price, OrderId)]) -> Vec<Ask> {
        v.iter().map(|&(p, i)| Ask::new(p, i)).collect()
    }

    const LADDER_BIDS: [Price; 8] = [37, 69, 82, 83, 91, 112, 120, 125];
    const LADDER_ASKS: [Price; 8] = [53, 79, 85, 90, 94, 98, 113, 121];

    #[test]
    fn instance_accepts_distinct_ids() {
        let inst = mk_instance(bids(&[(100, 1), (80, 2)]), asks(&[(90, 1), (70, 2)])).unwrap();
        assert_eq!(inst.bids()[0], Bid::new(100, 1));
        assert_eq!(inst.asks()[1], Ask::new(70, 2));
        assert_eq!(inst.max_price(), Some(100));
    }

    #[test]
    fn empty_instance() {
        let inst = mk_instance(vec![], vec![]).unwrap();
        assert!(inst.bids().is_empty() && inst.asks().is_empty());
        assert_eq!(inst.max_price(), None);
    }

    #[test]
    fn duplicate_ids_rejected() {
        let err = mk_instance(bids(&[(50, 7), (60, 7)]), vec![]).unwrap_err();
        assert_eq!(
            err,
            Error::DuplicateId {
                side: Side::Bid,
                id: 7
            }
        );
        let err = mk_instance(vec![], asks(&[(1, 3), (1, 3)])).unwrap_err();
        assert_eq!(
            err,
            Error::DuplicateId {
                side: Side::Ask,
                id: 3
            }
        );
        // same id on opposite sides is fine
        assert!(mk_instance(bids(&[(1, 1)]), asks(&[(1, 1)])).is_ok());
    }

    #[test]
    fn sorting_examples() {
        assert_eq!(
            sort_bids_desc(&bids(&[(37, 1), (125, 8), (83, 4)])),
            bids(&[(125, 8), (83, 4), (37, 1)])
        );
        assert!(sort_bids_desc(&[]).is_empty());
        assert_eq!(
            sort_bids_desc(&bids(&[(90, 2), (90, 1)])),
            bids(&[(90, 1), (90, 2)])
        );
        assert_eq!(
            sort_asks_asc(&asks(&[(121, 8), (53, 1)])),
            asks(&[(53, 1), (121, 8)])
        );
        assert_eq!(sort_asks_asc(&asks(&[(70, 1)])), asks(&[(70, 1)]));
        assert_eq!(
            sort_asks_desc(&asks(&[(53, 1), (121, 8)])),
            asks(&[(121, 8), (53, 1)])
        );
    }

    #[test]
    fn counters() {
        let b: Vec<Bid> = LADDER_BIDS
            .iter()
            .zip(1..)
            .map(|(&p, i)| Bid::new(p, i))
            .collect();
        let a: Vec<Ask> = LADDER_ASKS
            .iter()
            .zip(1..)
            .map(|(&p, i)| Ask::new(p, i))
            .collect();
        assert_eq!(demand_at(&b, 91), 4);
        assert_eq!(demand_at(&b, 0), b.len());
        assert_eq!(demand_at(&[], 5), 0);
        assert_eq!(supply_at(&a, 91), 4);
        assert_eq!(supply_at(&[], 5), 0);
        assert_eq!(supply_at(&asks(&[(10, 1), (10, 2)]), 9), 0);
    }

    #[test]
    fn projections() {
        let m: Matching = vec![
            Fill::new(Bid::new(83, 4), Ask::new(79, 2), 0),
            Fill::new(Bid::new(91, 5), Ask::new(90, 4), 0),
        ]
        .into();
        assert_eq!(price_projection(&bids_of(&m)), vec![83, 91]);
        assert_eq!(price_projection(&asks_of(&m)), vec![79, 90]);
        assert!(bids_of(&Matching::new()).is_empty());

        let b = Bid::new(10, 1);
        let dup: Matching = vec![
            Fill::new(b, Ask::new(1, 1), 5),
            Fill::new(b, Ask::new(2, 2), 5),
        ]
        .into();
        assert_eq!(bids_of(&dup), vec![b, b]);

        assert_eq!(price_projection(&bids(&[(125, 8), (83, 4)])), vec![125, 83]);
        assert!(price_projection::<Bid>(&[]).is_empty());
        let ladder: Vec<Bid> = LADDER_BIDS
            .iter()
            .zip(1..)
            .map(|(&p, i)| Bid::new(p, i))
            .collect();
        assert_eq!(
            price_projection(&sort_bids_desc(&ladder)),
            vec![125, 120, 112, 91, 83, 82, 69, 37]
        );
    }

    #[test]
    fn sublist_examples() {
        assert!(is_sublist(&[120, 91], &[125, 120, 112, 91]));
        assert!(is_sublist::<u64>(&[], &[1, 2, 3]));
        assert!(is_sublist::<u64>(&[], &[]));
        assert!(!is_sublist(&[91, 120], &[125, 120, 112, 91]));
        assert!(!is_sublist(&[1], &[]));
        assert!(is_sublist(&[5, 5], &[5, 1, 5]));
        assert!(!is_sublist(&[5, 5], &[5, 1]));
    }

    #[test]
    fn unsorted_detection() {
        assert_eq!(first_unsorted(&bids(&[(3, 1), (3, 2), (1, 3)]), true), None);
        assert_eq!(first_unsorted(&bids(&[(3, 1), (4, 2)]), true), Some(1));
        assert_eq!(
            first_unsorted(&asks(&[(1, 1), (2, 2), (0, 3)]), false),
            Some(2)
        );
    }
}
