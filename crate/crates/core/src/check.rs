//! Randomized invariant campaign.
//!
//! Every generated instance is run through all mechanisms and each output is
//! checked against the predicates and the oracles. On the first violation the
//! instance is shrunk by dropping orders one at a time for as long as the same
//! invariant keeps failing.
//!
//! The mechanisms under test are injected through [`Mechanisms`] so that the
//! harness can be pointed at deliberately broken variants ([`Mutant`]) to show
//! that it actually detects faults.

use std::fmt;
use std::str::FromStr;

use crate::algorithms::{
    fair_on_asks_pass, fairize, ir_middle, produce_mm_with_stats, uniform_from_pairs,
};
use crate::market::{
    is_sublist, price_projection, sort_asks_asc, sort_asks_desc, sort_bids_desc, Ask, Bid, Fill,
    Instance, Matching,
};
use crate::oracle::{
    self, enumerate_matchings, enumerate_uniform_ir, first_fit_matching, gen_instance,
    random_matching, GenParams, Lcg64, TradePricePolicy,
};
use crate::predicates::{
    fair_on_bids, is_fair, is_ir, is_maximum, is_uniform, matching_in, price_grid,
    volume_bounds_report,
};

/// Instances with both sides at most this long also get exhaustive checks.
pub const EXHAUSTIVE_SIDE_LIMIT: usize = 5;

pub type PairingFn = fn(&[Bid], &[Ask]) -> Matching;

/// The two primitive mechanisms the campaign exercises; everything else is
/// composed from them the same way the library does.
#[derive(Clone, Copy)]
pub struct Mechanisms {
    pub name: &'static str,
    /// Bids and asks both sorted by decreasing price.
    pub produce_mm: PairingFn,
    /// Bids by decreasing price, asks by increasing price.
    pub pair_uniform: PairingFn,
}

impl fmt::Debug for Mechanisms {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Mechanisms")
            .field("name", &self.name)
            .finish()
    }
}

fn reference_mm(bids: &[Bid], asks: &[Ask]) -> Matching {
    produce_mm_with_stats(bids, asks).0
}

impl Mechanisms {
    pub fn reference() -> Self {
        Mechanisms {
            name: "reference",
            produce_mm: reference_mm,
            pair_uniform: crate::algorithms::pair_uniform_unchecked,
        }
    }

    pub fn with_mutant(mutant: Mutant) -> Self {
        let mut m = Mechanisms::reference();
        m.name = mutant.name();
        match mutant {
            Mutant::MmStrict => m.produce_mm = mutants::produce_mm_strict,
            Mutant::UmSkip => m.pair_uniform = mutants::pair_uniform_skip,
        }
        m
    }
}

/// Known-bad variants used to test the harness itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutant {
    /// `produce_mm` requires a strictly higher bid (`a < b`).
    MmStrict,
    /// `pair_uniform` drops the ask and keeps scanning instead of stopping.
    UmSkip,
}

impl Mutant {
    pub const ALL: [Mutant; 2] = [Mutant::MmStrict, Mutant::UmSkip];

    pub fn name(self) -> &'static str {
        match self {
            Mutant::MmStrict => "mm-strict",
            Mutant::UmSkip => "um-skip",
        }
    }
}

impl FromStr for Mutant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Mutant::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown mutant `{s}` (expected mm-strict or um-skip)"))
    }
}

pub mod mutants {
    use super::*;

    pub fn produce_mm_strict(bids: &[Bid], asks: &[Ask]) -> Matching {
        let mut out = Matching::new();
        let (mut i, mut j) = (0, 0);
        while i < bids.len() && j < asks.len() {
            if asks[j].price < bids[i].price {
                out.push(Fill::new(bids[i], asks[j], bids[i].price));
                i += 1;
            }
            j += 1;
        }
        out
    }

    pub fn pair_uniform_skip(bids: &[Bid], asks: &[Ask]) -> Matching {
        let mut out = Matching::new();
        let (mut i, mut j) = (0, 0);
        while i < bids.len() && j < asks.len() {
            if asks[j].price <= bids[i].price {
                out.push(Fill::new(bids[i], asks[j], bids[i].price));
                i += 1;
            }
            j += 1;
        }
        out
    }
}

/// A failed invariant on one instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub invariant: &'static str,
    pub detail: String,
}

/// Counters accumulated over a campaign.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CheckStats {
    pub instances: u64,
    pub exhaustive_instances: u64,
    pub enumerated_matchings: u64,
    pub bound_reports: u64,
    pub sublist_pairs: u64,
}

impl std::ops::AddAssign for CheckStats {
    fn add_assign(&mut self, o: Self) {
        self.instances += o.instances;
        self.exhaustive_instances += o.exhaustive_instances;
        self.enumerated_matchings += o.enumerated_matchings;
        self.bound_reports += o.bound_reports;
        self.sublist_pairs += o.sublist_pairs;
    }
}

/// First violation of a campaign, with the shrunk instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub seed: u64,
    pub invariant: &'static str,
    pub detail: String,
    pub instance: Instance,
    pub original: Instance,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub mechanisms: &'static str,
    pub seeds: u64,
    pub stats: CheckStats,
    pub violation: Option<Violation>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckConfig {
    pub seeds: u64,
    pub seed_base: u64,
    pub max_orders_per_side: usize,
    pub max_price: u64,
    pub allow_price_ties: bool,
}

impl CheckConfig {
    pub fn params(&self, seed: u64) -> GenParams {
        GenParams {
            seed,
            max_orders_per_side: self.max_orders_per_side,
            max_price: self.max_price,
            allow_price_ties: self.allow_price_ties,
        }
    }
}

macro_rules! ensure {
    ($cond:expr, $name:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(Failure { invariant: $name, detail: format!($($fmt)+) });
        }
    };
}

fn fmt_pairs(m: &Matching) -> String {
    let parts: Vec<String> = m
        .iter()
        .map(|f| {
            format!(
                "(b{}@{} a{}@{} tp {})",
                f.bid.id, f.bid.price, f.ask.id, f.ask.price, f.trade_price
            )
        })
        .collect();
    format!("[{}]", parts.join(" "))
}

fn check_bounds(
    bids: &[Bid],
    asks: &[Ask],
    m: &Matching,
    what: &str,
    stats: &mut CheckStats,
) -> Result<(), Failure> {
    for p in price_grid(bids, asks) {
        let r = volume_bounds_report(bids, asks, m, p);
        stats.bound_reports += 1;
        ensure!(
            r.bids_above_ok,
            "bounds.matched_bids_above",
            "{what} at p={p}: {r:?}"
        );
        ensure!(
            r.asks_below_ok,
            "bounds.matched_asks_below",
            "{what} at p={p}: {r:?}"
        );
        ensure!(
            r.size_by_matched_ok,
            "bounds.size_by_matched",
            "{what} at p={p}: {r:?}"
        );
        ensure!(
            r.size_by_market_ok,
            "bounds.size_by_market",
            "{what} at p={p}: {r:?}"
        );
    }
    Ok(())
}

fn check_fairize(bids: &[Bid], asks: &[Ask], m: &Matching, what: &str) -> Result<(), Failure> {
    let out = match fairize(m, bids, asks) {
        Ok(out) => out,
        Err(e) => {
            return Err(Failure {
                invariant: "fairize.accepts_matching",
                detail: format!("{what}: {e}"),
            })
        }
    };
    ensure!(
        out.len() == m.len(),
        "fairize.size",
        "{what}: {} -> {}",
        m.len(),
        out.len()
    );
    ensure!(
        matching_in(bids, asks, &out),
        "fairize.matching_in",
        "{what}: {}",
        fmt_pairs(&out)
    );
    ensure!(
        is_fair(&out, bids, asks),
        "fairize.fair",
        "{what}: {}",
        fmt_pairs(&out)
    );
    Ok(())
}

fn check_ir_middle(m: &Matching, what: &str) -> Result<(), Failure> {
    let out = match ir_middle(m) {
        Ok(out) => out,
        Err(e) => {
            return Err(Failure {
                invariant: "ir_middle.accepts_matchable",
                detail: format!("{what}: {e}"),
            })
        }
    };
    ensure!(is_ir(&out), "ir_middle.ir", "{what}: {}", fmt_pairs(&out));
    ensure!(
        out.bids() == m.bids() && out.asks() == m.asks(),
        "ir_middle.pairs_unchanged",
        "{what}: {} -> {}",
        fmt_pairs(m),
        fmt_pairs(&out)
    );
    Ok(())
}

/// Runs every invariant on one instance. `aux_seed` drives the random
/// matchings and subsets used by the ∀-matching checks.
pub fn check_instance(
    inst: &Instance,
    mech: &Mechanisms,
    aux_seed: u64,
) -> Result<CheckStats, Failure> {
    let mut stats = CheckStats {
        instances: 1,
        ..CheckStats::default()
    };
    let (bids, asks) = (inst.bids(), inst.asks());
    let bids_desc = sort_bids_desc(bids);
    let asks_desc = sort_asks_desc(asks);
    let asks_asc = sort_asks_asc(asks);
    let max_size = oracle::max_matching_size_oracle(bids, asks);
    let max_uniform = oracle::max_uniform_size_oracle(bids, asks);

    // sorting
    let mut sorted_ids: Vec<_> = bids_desc.iter().map(|b| (b.price, b.id)).collect();
    let mut orig_ids: Vec<_> = bids.iter().map(|b| (b.price, b.id)).collect();
    sorted_ids.sort_unstable();
    orig_ids.sort_unstable();
    ensure!(sorted_ids == orig_ids, "sort.permutation", "bids");
    ensure!(
        bids_desc.windows(2).all(|w| w[0].price >= w[1].price),
        "sort.order",
        "bids"
    );

    // maximum matching
    let mm = (mech.produce_mm)(&bids_desc, &asks_desc);
    ensure!(
        matching_in(bids, asks, &mm),
        "mm.matching_in",
        "{}",
        fmt_pairs(&mm)
    );
    ensure!(is_ir(&mm), "mm.ir", "{}", fmt_pairs(&mm));
    ensure!(
        fair_on_bids(&mm, bids),
        "mm.fair_on_bids",
        "{}",
        fmt_pairs(&mm)
    );
    ensure!(
        mm.len() == max_size,
        "mm.maximum",
        "produce_mm size {} but oracle {max_size}",
        mm.len()
    );
    let (_, comparisons) = produce_mm_with_stats(&bids_desc, &asks_desc);
    ensure!(
        comparisons <= bids.len() + asks.len(),
        "mm.scan_bound",
        "{comparisons} comparisons"
    );

    let fmm = fair_on_asks_pass(&mm, asks);
    ensure!(
        is_fair(&fmm, bids, asks),
        "fair_mm.fair",
        "{}",
        fmt_pairs(&fmm)
    );
    ensure!(
        is_maximum(&fmm, bids, asks),
        "fair_mm.maximum",
        "{}",
        fmt_pairs(&fmm)
    );

    // uniform price
    let um = uniform_from_pairs(&(mech.pair_uniform)(&bids_desc, &asks_asc));
    ensure!(
        matching_in(bids, asks, &um),
        "um.matching_in",
        "{}",
        fmt_pairs(&um)
    );
    ensure!(is_uniform(&um), "um.uniform", "{}", fmt_pairs(&um));
    ensure!(is_ir(&um), "um.ir", "{}", fmt_pairs(&um));
    ensure!(is_fair(&um, bids, asks), "um.fair", "{}", fmt_pairs(&um));
    ensure!(
        um.len() == max_uniform,
        "um.maximum_uniform",
        "produce_um size {} but oracle {max_uniform}",
        um.len()
    );

    let mut rng = Lcg64::new(aux_seed);
    let mut bases = vec![
        ("first-fit", first_fit_matching(bids, asks)),
        ("random", random_matching(bids, asks, &mut rng)),
        ("produce_mm", mm.clone()),
    ];
    bases.push(("fair_mm", fmm.clone()));
    bases.push(("produce_um", um.clone()));
    for (what, m) in &bases {
        check_fairize(bids, asks, m, what)?;
        check_ir_middle(m, what)?;
        check_bounds(bids, asks, m, what, &mut stats)?;
    }

    // exhaustive quantifiers on small instances
    if bids.len() <= EXHAUSTIVE_SIDE_LIMIT && asks.len() <= EXHAUSTIVE_SIDE_LIMIT {
        stats.exhaustive_instances += 1;
        let all = enumerate_matchings(bids, asks, TradePricePolicy::AskPrice)
            .expect("sides within enumeration limit");
        let best = all.iter().map(Matching::len).max().unwrap_or(0);
        ensure!(
            best == max_size,
            "oracle.max_matching",
            "enumeration {best}, oracle {max_size}"
        );
        for m in &all {
            stats.enumerated_matchings += 1;
            check_bounds(bids, asks, m, "enumerated", &mut stats)?;
            check_fairize(bids, asks, m, "enumerated")?;
            check_ir_middle(m, "enumerated")?;
        }
        for m in enumerate_uniform_ir(bids, asks).expect("sides within enumeration limit") {
            ensure!(
                m.len() <= um.len(),
                "um.dominates_uniform_ir",
                "uniform IR matching of size {} beats produce_um size {}: {}",
                m.len(),
                um.len(),
                fmt_pairs(&m)
            );
        }
    }

    // sublist projection on a random subset of the bids
    let subset: Vec<Bid> = bids.iter().copied().filter(|_| rng.below(2) == 0).collect();
    let (p1, p2) = (
        price_projection(&sort_bids_desc(&subset)),
        price_projection(&bids_desc),
    );
    stats.sublist_pairs += 1;
    ensure!(
        is_sublist(&p1, &p2),
        "sublist.sorted_subset",
        "{p1:?} vs {p2:?}"
    );

    Ok(stats)
}

fn aux_seed(seed: u64) -> u64 {
    seed ^ 0x9e37_79b9_7f4a_7c15
}

/// Drops single orders while `invariant` still fails.
pub fn minimize(inst: &Instance, mech: &Mechanisms, invariant: &str, aux: u64) -> Instance {
    let still_fails =
        |c: &Instance| matches!(check_instance(c, mech, aux), Err(f) if f.invariant == invariant);
    let mut cur = inst.clone();
    loop {
        let (bids, asks) = (cur.bids().to_vec(), cur.asks().to_vec());
        let mut shrunk = None;
        for i in 0..bids.len() {
            let mut b = bids.clone();
            b.remove(i);
            let cand = Instance::new(b, asks.clone()).expect("subset keeps ids unique");
            if still_fails(&cand) {
                shrunk = Some(cand);
                break;
            }
        }
        if shrunk.is_none() {
            for j in 0..asks.len() {
                let mut a = asks.clone();
                a.remove(j);
                let cand = Instance::new(bids.clone(), a).expect("subset keeps ids unique");
                if still_fails(&cand) {
                    shrunk = Some(cand);
                    break;
                }
            }
        }
        match shrunk {
            Some(c) => cur = c,
            None => return cur,
        }
    }
}

/// Runs the campaign over seeds `seed_base .. seed_base + seeds`, stopping at
/// the first violation.
pub fn run_check(cfg: &CheckConfig, mech: &Mechanisms) -> CheckReport {
    let mut stats = CheckStats::default();
    for seed in cfg.seed_base..cfg.seed_base.saturating_add(cfg.seeds) {
        let inst = gen_instance(&cfg.params(seed));
        match check_instance(&inst, mech, aux_seed(seed)) {
            Ok(s) => stats += s,
            Err(f) => {
                let small = minimize(&inst, mech, f.invariant, aux_seed(seed));
                let detail = match check_instance(&small, mech, aux_seed(seed)) {
                    Err(g) => g.detail,
                    Ok(_) => f.detail,
                };
                return CheckReport {
                    mechanisms: mech.name,
                    seeds: seed - cfg.seed_base + 1,
                    stats,
                    violation: Some(Violation {
                        seed,
                        invariant: f.invariant,
                        detail,
                        instance: small,
                        original: inst,
                    }),
                };
            }
        }
    }
    CheckReport {
        mechanisms: mech.name,
        seeds: cfg.seeds,
        stats,
        violation: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(seeds: u64) -> CheckConfig {
        CheckConfig {
            seeds,
            seed_base: 0,
            max_orders_per_side: 8,
            max_price: 20,
            allow_price_ties: true,
        }
    }

    #[test]
    fn zero_seeds_pass() {
        let r = run_check(&cfg(0), &Mechanisms::reference());
        assert!(r.passed());
        assert_eq!(r.stats, CheckStats::default());
    }

    #[test]
    fn reference_passes_short_campaign() {
        let r = run_check(&cfg(300), &Mechanisms::reference());
        assert!(r.passed(), "{:?}", r.violation);
        assert_eq!(r.stats.instances, 300);
        assert!(r.stats.exhaustive_instances > 0);
    }

    #[test]
    fn strict_mutant_is_caught_and_shrunk() {
        let r = run_check(&cfg(300), &Mechanisms::with_mutant(Mutant::MmStrict));
        let v = r.violation.expect("mutant must be detected");
        assert!(v.invariant.starts_with("mm.") || v.invariant.starts_with("fair_mm."));
        // a single tied pair is the smallest witness
        assert!(
            v.instance.bids().len() + v.instance.asks().len()
                <= v.original.bids().len() + v.original.asks().len()
        );
        assert_eq!(v.instance.bids().len(), 1);
        assert_eq!(v.instance.asks().len(), 1);
        assert_eq!(v.instance.bids()[0].price, v.instance.asks()[0].price);
    }

    #[test]
    fn mutant_names_round_trip() {
        for m in Mutant::ALL {
            assert_eq!(m.name().parse::<Mutant>(), Ok(m));
        }
        assert!("nope".parse::<Mutant>().is_err());
    }
}
