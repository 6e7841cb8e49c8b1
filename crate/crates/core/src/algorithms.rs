//! Matching mechanisms.
//!
//! * [`produce_mm`] / [`fair_mm`]: maximum matchings, the latter also fair.
//! * [`pair_uniform`] / [`uniform_price`] / [`produce_um`]: the single-price
//!   call auction used for opening price discovery.
//! * [`make_fob`] / [`make_foa`] / [`fairize`]: cardinality-preserving
//!   conversion of any matching into a fair one.
//! * [`ir_middle`]: individually rational re-pricing of any matching.
//!
//! The recursive definitions are written as loops; each step consumes the head
//! of one or both input lists exactly like the recursion does.

use crate::error::{Error, Result};
use crate::market::{
    cmp_asks_asc, cmp_bids_desc, first_unsorted, sort_asks_asc, sort_asks_desc, sort_bids_desc,
    Ask, Bid, Fill, Matching, Order, Price,
};
use crate::predicates::matching_in;

/// Whether the sorted-input mechanisms verify their input order first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SortCheck {
    #[default]
    Strict,
    Skip,
}

fn require_sorted<O: Order>(orders: &[O], descending: bool, check: SortCheck) -> Result<()> {
    if check == SortCheck::Skip {
        return Ok(());
    }
    match first_unsorted(orders, descending) {
        Some(index) => Err(Error::UnsortedInput {
            side: O::SIDE,
            index,
        }),
        None => Ok(()),
    }
}

/// Replaces the bid of the i-th fill with the i-th bid of `bids`.
///
/// Asks and trade prices are kept in place. With `m` and `bids` both sorted by
/// decreasing bid price and the bids of `m` drawn from `bids`, the result is
/// fair on bids. Stops when either list runs out.
pub fn make_fob(m: &Matching, bids: &[Bid]) -> Matching {
    m.iter()
        .zip(bids)
        .map(|(f, &b)| Fill::new(b, f.ask, f.trade_price))
        .collect()
}

/// Replaces the ask of the i-th fill with the i-th ask of `asks`.
///
/// Mirror of [`make_fob`] for `m` and `asks` sorted by increasing ask price.
pub fn make_foa(m: &Matching, asks: &[Ask]) -> Matching {
    m.iter()
        .zip(asks)
        .map(|(f, &a)| Fill::new(f.bid, a, f.trade_price))
        .collect()
}

fn sorted_by_bid_desc(m: &Matching) -> Matching {
    let mut fills = m.fills().to_vec();
    fills.sort_by(|x, y| cmp_bids_desc(&x.bid, &y.bid));
    fills.into()
}

fn sorted_by_ask_asc(m: &Matching) -> Matching {
    let mut fills = m.fills().to_vec();
    fills.sort_by(|x, y| cmp_asks_asc(&x.ask, &y.ask));
    fills.into()
}

/// Sort-then-[`make_fob`] pass: makes `m` fair on bids.
pub fn fair_on_bids_pass(m: &Matching, bids: &[Bid]) -> Matching {
    make_fob(&sorted_by_bid_desc(m), &sort_bids_desc(bids))
}

/// Sort-then-[`make_foa`] pass: makes `m` fair on asks without touching its bids.
pub fn fair_on_asks_pass(m: &Matching, asks: &[Ask]) -> Matching {
    make_foa(&sorted_by_ask_asc(m), &sort_asks_asc(asks))
}

/// Converts a matching over `bids`/`asks` into a fair matching of the same size.
///
/// The trade-price sequence is carried along positionally, so a previously
/// individually rational matching may stop being one; compose with
/// [`ir_middle`] if that matters.
pub fn fairize(m: &Matching, bids: &[Bid], asks: &[Ask]) -> Result<Matching> {
    if !matching_in(bids, asks, m) {
        return Err(Error::InvalidMatching);
    }
    let on_bids = fair_on_bids_pass(m, bids);
    Ok(fair_on_asks_pass(&on_bids, asks))
}

/// Midpoint between the two limit prices, rounded down.
pub fn mid_price(bid: Price, ask: Price) -> Price {
    debug_assert!(ask <= bid);
    ask + (bid - ask) / 2
}

/// Re-prices every fill at the floor of the midpoint of its limit prices.
/// The bid-ask pairs are unchanged.
pub fn ir_middle(m: &Matching) -> Result<Matching> {
    m.iter()
        .enumerate()
        .map(|(index, f)| {
            if f.bid.price < f.ask.price {
                return Err(Error::NotMatchable {
                    index,
                    bid_price: f.bid.price,
                    ask_price: f.ask.price,
                });
            }
            Ok(Fill::new(f.bid, f.ask, mid_price(f.bid.price, f.ask.price)))
        })
        .collect::<Result<Vec<_>>>()
        .map(Matching::from)
}

/// Maximum matching over bids and asks both sorted by decreasing price.
///
/// Each step compares the top bid with the top ask: a matchable pair is
/// emitted at the bid's price and both are consumed, otherwise the ask (too
/// expensive for every remaining bid) is dropped.
pub fn produce_mm(bids: &[Bid], asks: &[Ask]) -> Result<Matching> {
    produce_mm_checked(bids, asks, SortCheck::Strict)
}

pub fn produce_mm_checked(bids: &[Bid], asks: &[Ask], check: SortCheck) -> Result<Matching> {
    require_sorted(bids, true, check)?;
    require_sorted(asks, true, check)?;
    Ok(produce_mm_with_stats(bids, asks).0)
}

/// [`produce_mm`] without the order check, also returning the number of
/// head comparisons performed (at most `bids.len() + asks.len()`).
pub fn produce_mm_with_stats(bids: &[Bid], asks: &[Ask]) -> (Matching, usize) {
    let mut out = Matching::new();
    let mut comparisons = 0;
    let (mut i, mut j) = (0, 0);
    while i < bids.len() && j < asks.len() {
        let (b, a) = (bids[i], asks[j]);
        comparisons += 1;
        if a.price <= b.price {
            out.push(Fill::new(b, a, b.price));
            i += 1;
        }
        j += 1;
    }
    (out, comparisons)
}

/// Maximum matching that is also fair, for bids and asks in any order.
///
/// Runs [`produce_mm`] on price-descending copies (its bids are already a
/// top prefix, hence fair) and then the ask-side fairness pass.
pub fn fair_mm(bids: &[Bid], asks: &[Ask]) -> Result<Matching> {
    let mm = produce_mm(&sort_bids_desc(bids), &sort_asks_desc(asks))?;
    Ok(fair_on_asks_pass(&mm, asks))
}

/// Pairs the highest remaining bid with the lowest remaining ask until the
/// pair is no longer matchable. Bids must be sorted by decreasing price, asks
/// by increasing price. Each fill carries its bid's price.
pub fn pair_uniform(bids: &[Bid], asks: &[Ask]) -> Result<Matching> {
    pair_uniform_checked(bids, asks, SortCheck::Strict)
}

pub fn pair_uniform_checked(bids: &[Bid], asks: &[Ask], check: SortCheck) -> Result<Matching> {
    require_sorted(bids, true, check)?;
    require_sorted(asks, false, check)?;
    Ok(pair_uniform_unchecked(bids, asks))
}

pub fn pair_uniform_unchecked(bids: &[Bid], asks: &[Ask]) -> Matching {
    bids.iter()
        .zip(asks)
        .take_while(|(b, a)| a.price <= b.price)
        .map(|(&b, &a)| Fill::new(b, a, b.price))
        .collect()
}

/// The clearing price: the bid price of the last pair formed by
/// [`pair_uniform`]. `None` when nothing trades.
pub fn uniform_price(bids: &[Bid], asks: &[Ask]) -> Result<Option<Price>> {
    Ok(last_bid_price(&pair_uniform(bids, asks)?))
}

fn last_bid_price(pairs: &Matching) -> Option<Price> {
    pairs.fills().last().map(|f| f.bid.price)
}

/// Sets every fill's trade price to `price`.
pub fn replace_trade_price(m: &Matching, price: Price) -> Matching {
    m.iter().map(|f| Fill::new(f.bid, f.ask, price)).collect()
}

/// Uniform-price matching of maximum size among uniform individually
/// rational matchings; also fair.
pub fn produce_um(bids: &[Bid], asks: &[Ask]) -> Result<Matching> {
    produce_um_checked(bids, asks, SortCheck::Strict)
}

pub fn produce_um_checked(bids: &[Bid], asks: &[Ask], check: SortCheck) -> Result<Matching> {
    Ok(uniform_from_pairs(&pair_uniform_checked(
        bids, asks, check,
    )?))
}

/// Re-prices the output of a pairing pass at its last pair's bid price.
pub fn uniform_from_pairs(pairs: &Matching) -> Matching {
    match last_bid_price(pairs) {
        Some(p) => replace_trade_price(pairs, p),
        None => Matching::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Side;
    use crate::predicates::{fair_on_asks, fair_on_bids, is_fair, is_ir, is_uniform};

    fn ladder() -> (Vec<Bid>, Vec<Ask>) {
        let b = [37, 69, 82, 83, 91, 112, 120, 125];
        let a = [53, 79, 85, 90, 94, 98, 113, 121];
        (
            b.iter().zip(1..).map(|(&p, i)| Bid::new(p, i)).collect(),
            a.iter().zip(1..).map(|(&p, i)| Ask::new(p, i)).collect(),
        )
    }

    fn crossed() -> (Vec<Bid>, Vec<Ask>) {
        (
            vec![Bid::new(100, 1), Bid::new(80, 2)],
            vec![Ask::new(90, 1), Ask::new(70, 2)],
        )
    }

    fn bid(b: &[Bid], p: Price) -> Bid {
        *b.iter().find(|x| x.price == p).unwrap()
    }

    fn ask(a: &[Ask], p: Price) -> Ask {
        *a.iter().find(|x| x.price == p).unwrap()
    }

    fn pairs(m: &Matching) -> Vec<(Price, Price)> {
        m.iter().map(|f| (f.bid.price, f.ask.price)).collect()
    }

    fn m1(b: &[Bid], a: &[Ask]) -> Matching {
        [(83, 79), (91, 90), (120, 98)]
            .iter()
            .map(|&(bp, ap)| Fill::new(bid(b, bp), ask(a, ap), bp))
            .collect()
    }

    #[test]
    fn make_fob_ladder() {
        let (b, a) = ladder();
        let m = sorted_by_bid_desc(&m1(&b, &a));
        assert_eq!(pairs(&m), vec![(120, 98), (91, 90), (83, 79)]);
        let m2 = make_fob(&m, &sort_bids_desc(&b));
        assert_eq!(pairs(&m2), vec![(125, 98), (120, 90), (112, 79)]);
        // trade prices ride along with the asks
        assert_eq!(
            m2.iter().map(|f| f.trade_price).collect::<Vec<_>>(),
            vec![120, 91, 83]
        );
        assert!(fair_on_bids(&m2, &b));
    }

    #[test]
    fn make_fob_edges() {
        let (b, a) = ladder();
        assert!(make_fob(&Matching::new(), &b).is_empty());
        let top = sort_bids_desc(&b);
        let m: Matching = vec![
            Fill::new(top[0], ask(&a, 121), 1),
            Fill::new(top[1], ask(&a, 53), 2),
        ]
        .into();
        assert_eq!(make_fob(&m, &top), m);
        // shorter bid list truncates
        assert_eq!(make_fob(&m, &top[..1]).len(), 1);
    }

    #[test]
    fn make_foa_ladder() {
        let (b, a) = ladder();
        let m2: Matching = [(112, 79), (120, 90), (125, 98)]
            .iter()
            .map(|&(bp, ap)| Fill::new(bid(&b, bp), ask(&a, ap), bp))
            .collect();
        let m3 = make_foa(&m2, &sort_asks_asc(&a));
        assert_eq!(pairs(&m3), vec![(112, 53), (120, 79), (125, 85)]);
        assert!(fair_on_asks(&m3, &a));
        assert!(make_foa(&Matching::new(), &a).is_empty());
        let bottom = sort_asks_asc(&a);
        let m: Matching = vec![Fill::new(bid(&b, 125), bottom[0], 9)].into();
        assert_eq!(make_foa(&m, &bottom), m);
    }

    #[test]
    fn fairize_ladder() {
        let (b, a) = ladder();
        let m3 = fairize(&m1(&b, &a), &b, &a).unwrap();
        let mut got = pairs(&m3);
        got.sort_unstable();
        assert_eq!(got, vec![(112, 53), (120, 79), (125, 85)]);
        assert!(matching_in(&b, &a, &m3));
        assert!(is_fair(&m3, &b, &a));
        assert!(fairize(&Matching::new(), &b, &a).unwrap().is_empty());
    }

    #[test]
    fn fairize_rejects_invalid() {
        let (b, a) = ladder();
        let bad: Matching = vec![Fill::new(Bid::new(1, 99), a[0], 1)].into();
        assert_eq!(fairize(&bad, &b, &a), Err(Error::InvalidMatching));
    }

    #[test]
    fn fairize_keeps_fair_input_prices() {
        let (b, a) = ladder();
        let fair = fair_mm(&b, &a).unwrap();
        let again = fairize(&fair, &b, &a).unwrap();
        let prices = |m: &Matching| {
            let mut bp: Vec<_> = m.iter().map(|f| f.bid.price).collect();
            let mut ap: Vec<_> = m.iter().map(|f| f.ask.price).collect();
            bp.sort_unstable();
            ap.sort_unstable();
            (bp, ap)
        };
        assert_eq!(prices(&fair), prices(&again));
    }

    #[test]
    fn ir_middle_examples() {
        let f = |bp, ap, tp| Matching::from(vec![Fill::new(Bid::new(bp, 1), Ask::new(ap, 1), tp)]);
        assert_eq!(
            ir_middle(&f(100, 70, 0)).unwrap().fills()[0].trade_price,
            85
        );
        assert_eq!(ir_middle(&f(90, 90, 7)).unwrap().fills()[0].trade_price, 90);
        let r = ir_middle(&f(91, 90, 0)).unwrap();
        assert_eq!(r.fills()[0].trade_price, 90);
        assert!(is_ir(&r));
        assert_eq!(
            ir_middle(&f(80, 90, 0)),
            Err(Error::NotMatchable {
                index: 0,
                bid_price: 80,
                ask_price: 90
            })
        );
        assert_eq!(
            ir_middle(&f(u64::MAX, u64::MAX - 1, 0)).unwrap().fills()[0].trade_price,
            u64::MAX - 1
        );
    }

    #[test]
    fn produce_mm_ladder() {
        let (b, a) = ladder();
        let m = produce_mm(&sort_bids_desc(&b), &sort_asks_desc(&a)).unwrap();
        assert_eq!(
            pairs(&m),
            vec![
                (125, 121),
                (120, 113),
                (112, 98),
                (91, 90),
                (83, 79),
                (82, 53)
            ]
        );
        assert!(m.iter().all(|f| f.trade_price == f.bid.price));
        assert!(is_ir(&m) && fair_on_bids(&m, &b));
    }

    #[test]
    fn produce_mm_crossed() {
        let (b, a) = crossed();
        let m = produce_mm(&b, &a).unwrap();
        assert_eq!(pairs(&m), vec![(100, 90), (80, 70)]);
        assert!(produce_mm(&b, &[]).unwrap().is_empty());
        assert!(produce_mm(&[], &a).unwrap().is_empty());
    }

    #[test]
    fn produce_mm_rejects_unsorted() {
        let (b, a) = crossed();
        let err = produce_mm(&b, &sort_asks_asc(&a)).unwrap_err();
        assert_eq!(
            err,
            Error::UnsortedInput {
                side: Side::Ask,
                index: 1
            }
        );
        let rev: Vec<Bid> = b.iter().rev().copied().collect();
        assert!(matches!(
            produce_mm(&rev, &a),
            Err(Error::UnsortedInput {
                side: Side::Bid,
                ..
            })
        ));
        assert!(produce_mm_checked(&rev, &a, SortCheck::Skip).is_ok());
    }

    #[test]
    fn produce_mm_ties_match() {
        let m = produce_mm(&[Bid::new(5, 1)], &[Ask::new(5, 1)]).unwrap();
        assert_eq!(m.len(), 1);
    }

    #[test]
    fn fair_mm_examples() {
        let (b, a) = ladder();
        let m = fair_mm(&b, &a).unwrap();
        assert_eq!(m.len(), 6);
        let mut ap: Vec<_> = m.iter().map(|f| f.ask.price).collect();
        ap.sort_unstable();
        assert_eq!(ap, vec![53, 79, 85, 90, 94, 98]);
        assert!(is_fair(&m, &b, &a) && matching_in(&b, &a, &m));

        let (b, a) = crossed();
        let m = fair_mm(&b, &a).unwrap();
        assert_eq!(m.len(), 2);
        assert!(is_fair(&m, &b, &a));
        assert!(fair_mm(&[], &[]).unwrap().is_empty());
    }

    #[test]
    fn pair_uniform_examples() {
        let (b, a) = ladder();
        let (bs, asc) = (sort_bids_desc(&b), sort_asks_asc(&a));
        let m = pair_uniform(&bs, &asc).unwrap();
        assert_eq!(pairs(&m), vec![(125, 53), (120, 79), (112, 85), (91, 90)]);
        assert_eq!(uniform_price(&bs, &asc).unwrap(), Some(91));

        let (b, a) = crossed();
        let asc = sort_asks_asc(&a);
        assert_eq!(pairs(&pair_uniform(&b, &asc).unwrap()), vec![(100, 70)]);
        assert_eq!(uniform_price(&b, &asc).unwrap(), Some(100));

        assert!(pair_uniform(&[], &asc).unwrap().is_empty());
        assert_eq!(uniform_price(&[], &[]).unwrap(), None);
        assert!(matches!(
            pair_uniform(&b, &a),
            Err(Error::UnsortedInput {
                side: Side::Ask,
                ..
            })
        ));
    }

    #[test]
    fn produce_um_examples() {
        let (b, a) = ladder();
        let m = produce_um(&sort_bids_desc(&b), &sort_asks_asc(&a)).unwrap();
        assert_eq!(m.len(), 4);
        assert!(m.iter().all(|f| f.trade_price == 91));
        assert!(is_uniform(&m) && is_ir(&m) && is_fair(&m, &b, &a));

        let (b, a) = crossed();
        let m = produce_um(&b, &sort_asks_asc(&a)).unwrap();
        assert_eq!(m.fills(), &[Fill::new(b[0], a[1], 100)]);

        assert!(produce_um(&[], &[]).unwrap().is_empty());
    }

    #[test]
    fn mm_comparison_bound() {
        let (b, a) = ladder();
        let (m, n) = produce_mm_with_stats(&sort_bids_desc(&b), &sort_asks_desc(&a));
        assert_eq!(m.len(), 6);
        assert!(n <= b.len() + a.len());
    }
}
