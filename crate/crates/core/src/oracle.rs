//! Brute-force references and a seeded instance generator.
//!
//! Nothing here calls into [`crate::algorithms`]; the oracles are separate
//! computations of the quantities the mechanisms are supposed to achieve.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::market::{demand_at, supply_at, Ask, Bid, Fill, Instance, Matching, Price};

/// Size of a maximum matching in the bipartite graph with an edge between
/// every bid and every ask priced at or below it.
///
/// Plain augmenting-path search (Kuhn), `O(|B| * |B| * |A|)`.
pub fn max_matching_size_oracle(bids: &[Bid], asks: &[Ask]) -> usize {
    let adj: Vec<Vec<usize>> = bids
        .iter()
        .map(|b| {
            asks.iter()
                .enumerate()
                .filter(|(_, a)| a.price <= b.price)
                .map(|(j, _)| j)
                .collect()
        })
        .collect();
    let mut owner = vec![usize::MAX; asks.len()];
    let mut size = 0;
    for u in 0..bids.len() {
        let mut seen = vec![false; asks.len()];
        if augment(u, &adj, &mut owner, &mut seen) {
            size += 1;
        }
    }
    size
}

fn augment(u: usize, adj: &[Vec<usize>], owner: &mut [usize], seen: &mut [bool]) -> bool {
    for &v in &adj[u] {
        if seen[v] {
            continue;
        }
        seen[v] = true;
        if owner[v] == usize::MAX || augment(owner[v], adj, owner, seen) {
            owner[v] = u;
            return true;
        }
    }
    false
}

/// Largest size of a uniform individually rational matching.
///
/// At a single trade price `p` only bids priced `>= p` and asks priced `<= p`
/// can take part, and any of those bids can pair with any of those asks, so
/// the best size at `p` is `min(demand_at(p), supply_at(p))`. Demand only
/// changes at bid prices and supply only at ask prices, so the maximum over
/// all `p` is attained at some limit price and scanning those is enough.
pub fn max_uniform_size_oracle(bids: &[Bid], asks: &[Ask]) -> usize {
    bids.iter()
        .map(|b| b.price)
        .chain(asks.iter().map(|a| a.price))
        .map(|p| demand_at(bids, p).min(supply_at(asks, p)))
        .max()
        .unwrap_or(0)
}

/// How [`enumerate_matchings`] prices each emitted fill.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TradePricePolicy {
    #[default]
    AskPrice,
    BidPrice,
    Fixed(Price),
}

impl TradePricePolicy {
    fn price(self, b: &Bid, a: &Ask) -> Price {
        match self {
            TradePricePolicy::AskPrice => a.price,
            TradePricePolicy::BidPrice => b.price,
            TradePricePolicy::Fixed(p) => p,
        }
    }
}

/// Per-side size limit for exhaustive enumeration.
pub const ENUMERATION_LIMIT: usize = 6;

/// Every valid matching over `bids` and `asks`: each injective partial
/// pairing of bids to asks using only matchable pairs. Fills are listed in
/// bid order.
pub fn enumerate_matchings(
    bids: &[Bid],
    asks: &[Ask],
    policy: TradePricePolicy,
) -> Result<Vec<Matching>> {
    if bids.len() > ENUMERATION_LIMIT || asks.len() > ENUMERATION_LIMIT {
        return Err(Error::TooLarge {
            bids: bids.len(),
            asks: asks.len(),
            limit: ENUMERATION_LIMIT,
        });
    }
    let mut out = Vec::new();
    let mut used = vec![false; asks.len()];
    let mut current = Vec::new();
    enumerate_from(0, bids, asks, policy, &mut used, &mut current, &mut out);
    Ok(out)
}

fn enumerate_from(
    i: usize,
    bids: &[Bid],
    asks: &[Ask],
    policy: TradePricePolicy,
    used: &mut [bool],
    current: &mut Vec<Fill>,
    out: &mut Vec<Matching>,
) {
    if i == bids.len() {
        out.push(Matching::from(current.clone()));
        return;
    }
    enumerate_from(i + 1, bids, asks, policy, used, current, out);
    let b = bids[i];
    for (j, a) in asks.iter().enumerate() {
        if used[j] || a.price > b.price {
            continue;
        }
        used[j] = true;
        current.push(Fill::new(b, *a, policy.price(&b, a)));
        enumerate_from(i + 1, bids, asks, policy, used, current, out);
        current.pop();
        used[j] = false;
    }
}

/// Every matching that can be priced uniformly and individually rationally,
/// priced at the lowest such price (its highest ask). The empty matching is
/// included.
pub fn enumerate_uniform_ir(bids: &[Bid], asks: &[Ask]) -> Result<Vec<Matching>> {
    Ok(enumerate_matchings(bids, asks, TradePricePolicy::AskPrice)?
        .into_iter()
        .filter_map(|m| {
            let lo = m.iter().map(|f| f.ask.price).max();
            let hi = m.iter().map(|f| f.bid.price).min();
            match (lo, hi) {
                (Some(lo), Some(hi)) if lo <= hi => {
                    Some(m.into_iter().map(|f| Fill::new(f.bid, f.ask, lo)).collect())
                }
                (Some(_), Some(_)) => None,
                _ => Some(m),
            }
        })
        .collect())
}

/// 64-bit linear congruential generator with Knuth's MMIX constants:
/// `state = state * 6364136223846793005 + 1442695040888963407 (mod 2^64)`,
/// seeded by `state = seed`. Each draw advances once and returns the new state.
#[derive(Debug, Clone)]
pub struct Lcg64 {
    state: u64,
}

impl Lcg64 {
    pub const MULTIPLIER: u64 = 6364136223846793005;
    pub const INCREMENT: u64 = 1442695040888963407;

    pub fn new(seed: u64) -> Self {
        Lcg64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self
            .state
            .wrapping_mul(Self::MULTIPLIER)
            .wrapping_add(Self::INCREMENT);
        self.state
    }

    /// Value in `0..bound` via the high half of a 64x64 product, so the
    /// well-mixed high bits of the state decide the result. `bound == 0`
    /// means the full `u64` range.
    pub fn below(&mut self, bound: u64) -> u64 {
        let x = self.next_u64();
        if bound == 0 {
            return x;
        }
        ((x as u128 * bound as u128) >> 64) as u64
    }

    /// Value in `0..=max`.
    pub fn up_to(&mut self, max: u64) -> u64 {
        self.below(max.wrapping_add(1))
    }
}

/// Parameters for [`gen_instance`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenParams {
    pub seed: u64,
    pub max_orders_per_side: usize,
    /// Prices are drawn from `0..=max_price`; must be at least 1.
    pub max_price: Price,
    /// When false, every limit price in the instance is distinct (across
    /// both sides), and side sizes are clamped so that this is possible.
    pub allow_price_ties: bool,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            seed: 0,
            max_orders_per_side: 10,
            max_price: 30,
            allow_price_ties: true,
        }
    }
}

/// Deterministic pseudo-random instance.
///
/// Draw order: bid count, ask count (each in `0..=max_orders_per_side`), then
/// bid prices, then ask prices. Ids are `1..=n` per side in draw order.
pub fn gen_instance(params: &GenParams) -> Instance {
    let mut rng = Lcg64::new(params.seed);
    let max_price = params.max_price.max(1);
    let cap = params.max_orders_per_side as u64;
    let mut n_bids = rng.up_to(cap) as usize;
    let mut n_asks = rng.up_to(cap) as usize;
    let mut taken = HashSet::new();
    if !params.allow_price_ties {
        let room = usize::try_from(max_price)
            .unwrap_or(usize::MAX)
            .saturating_add(1);
        n_bids = n_bids.min(room);
        n_asks = n_asks.min(room - n_bids);
    }
    let mut draw = |rng: &mut Lcg64| loop {
        let p = rng.up_to(max_price);
        if params.allow_price_ties || taken.insert(p) {
            return p;
        }
    };
    let bids = (1..=n_bids as u64)
        .map(|id| Bid::new(draw(&mut rng), id))
        .collect();
    let asks = (1..=n_asks as u64)
        .map(|id| Ask::new(draw(&mut rng), id))
        .collect();
    Instance::new(bids, asks).expect("generated ids are sequential")
}

/// A valid but generally unfair matching: bids in list order each take the
/// first unused matchable ask in list order, trading at the ask price.
pub fn first_fit_matching(bids: &[Bid], asks: &[Ask]) -> Matching {
    let mut used = vec![false; asks.len()];
    let mut out = Matching::new();
    for b in bids {
        if let Some(j) = (0..asks.len()).find(|&j| !used[j] && asks[j].price <= b.price) {
            used[j] = true;
            out.push(Fill::new(*b, asks[j], asks[j].price));
        }
    }
    out
}

/// A random valid matching: shuffles both sides, then each bid takes a
/// random unused matchable ask or (with probability 1/4) stays unmatched.
pub fn random_matching(bids: &[Bid], asks: &[Ask], rng: &mut Lcg64) -> Matching {
    let mut b = bids.to_vec();
    let mut a = asks.to_vec();
    shuffle(&mut b, rng);
    shuffle(&mut a, rng);
    let mut used = vec![false; a.len()];
    let mut out = Matching::new();
    for bid in b {
        if rng.below(4) == 0 {
            continue;
        }
        let open: Vec<usize> = (0..a.len())
            .filter(|&j| !used[j] && a[j].price <= bid.price)
            .collect();
        if open.is_empty() {
            continue;
        }
        let j = open[rng.below(open.len() as u64) as usize];
        used[j] = true;
        out.push(Fill::new(bid, a[j], a[j].price));
    }
    out
}

pub(crate) fn shuffle<T>(v: &mut [T], rng: &mut Lcg64) {
    for i in (1..v.len()).rev() {
        let j = rng.below(i as u64 + 1) as usize;
        v.swap(i, j);
    }
}
