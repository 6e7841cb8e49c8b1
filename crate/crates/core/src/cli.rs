//! Command implementations behind the `callmatch` binary.
//!
//! Kept in the library so the commands can be driven from tests without
//! spawning a process.

use std::fmt;
use std::io::{self, Write};
use std::path::PathBuf;
use std::str::FromStr;

use thiserror::Error;

use crate::algorithms::{
    fair_mm, fairize, ir_middle, produce_mm_checked, produce_um_checked, SortCheck,
};
use crate::check::{run_check, CheckConfig, CheckReport, Mechanisms, Mutant};
use crate::error::Error;
use crate::io::{self as files, Format, IngestError};
use crate::market::{sort_asks_asc, sort_asks_desc, sort_bids_desc, Instance, Matching};
use crate::oracle::{self, first_fit_matching};
use crate::predicates::{is_fair, is_ir, matching_in, uniform_trade_price};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_VIOLATION: i32 = 3;

/// Above this many orders on either side the summary skips the oracle.
pub const MAXIMUM_FLAG_LIMIT: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Mm,
    FairMm,
    Um,
    Fairize,
    IrMiddle,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Mm,
        Algorithm::FairMm,
        Algorithm::Um,
        Algorithm::Fairize,
        Algorithm::IrMiddle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Mm => "mm",
            Algorithm::FairMm => "fair-mm",
            Algorithm::Um => "um",
            Algorithm::Fairize => "fairize",
            Algorithm::IrMiddle => "ir-middle",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown algorithm `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    pub input: PathBuf,
    /// Fills go to stdout when absent.
    pub output: Option<PathBuf>,
    pub format: Format,
    pub strict_sort_check: bool,
    /// Starting matching for `fairize` and `ir-middle`; when absent the
    /// first-fit matching of the order file is used.
    pub fills: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Ingest(#[from] IngestError),

    #[error("{0}")]
    Algorithm(#[from] Error),

    #[error("{0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        EXIT_INPUT
    }
}

/// Predicate flags printed after a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Summary {
    pub matched: usize,
    pub uniform_price: Option<u64>,
    pub ir: bool,
    pub fair: bool,
    /// `None` when the instance is too large for the oracle.
    pub maximum: Option<bool>,
}

impl Summary {
    pub fn of(inst: &Instance, m: &Matching) -> Summary {
        let (bids, asks) = (inst.bids(), inst.asks());
        let maximum =
            (bids.len() <= MAXIMUM_FLAG_LIMIT && asks.len() <= MAXIMUM_FLAG_LIMIT).then(|| {
                matching_in(bids, asks, m)
                    && m.len() == oracle::max_matching_size_oracle(bids, asks)
            });
        Summary {
            matched: m.len(),
            uniform_price: uniform_trade_price(m),
            ir: is_ir(m),
            fair: is_fair(m, bids, asks),
            maximum,
        }
    }
}

fn opt<T: fmt::Display>(v: Option<T>) -> String {
    v.map_or_else(|| "-".to_owned(), |v| v.to_string())
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "matched={} uniform_price={} ir={} fair={} maximum={}",
            self.matched,
            opt(self.uniform_price),
            self.ir,
            self.fair,
            opt(self.maximum)
        )
    }
}

/// Runs one mechanism over an instance with the sorting each one expects.
pub fn execute(
    algorithm: Algorithm,
    inst: &Instance,
    base: Option<&Matching>,
    check: SortCheck,
) -> Result<Matching, Error> {
    let (bids, asks) = (inst.bids(), inst.asks());
    let base = || {
        base.cloned()
            .unwrap_or_else(|| first_fit_matching(bids, asks))
    };
    match algorithm {
        Algorithm::Mm => produce_mm_checked(&sort_bids_desc(bids), &sort_asks_desc(asks), check),
        Algorithm::FairMm => ir_middle(&fair_mm(bids, asks)?),
        Algorithm::Um => produce_um_checked(&sort_bids_desc(bids), &sort_asks_asc(asks), check),
        Algorithm::Fairize => fairize(&base(), bids, asks),
        Algorithm::IrMiddle => {
            let m = base();
            if !matching_in(bids, asks, &m) {
                return Err(Error::InvalidMatching);
            }
            ir_middle(&m)
        }
    }
}

/// `match`: ingest, run, write fills, return the summary.
pub fn run_match(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<Summary, CliError> {
    let inst = files::ingest(&cfg.input)?;
    let base = cfg.fills.as_deref().map(files::read_fills).transpose()?;
    let check = if cfg.strict_sort_check {
        SortCheck::Strict
    } else {
        SortCheck::Skip
    };
    let m = execute(cfg.algorithm, &inst, base.as_ref(), check)?;
    match &cfg.output {
        Some(path) => files::emit(&m, path, cfg.format)?,
        None => files::write_fills(&m, cfg.format, &mut *stdout)?,
    }
    Ok(Summary::of(&inst, &m))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOutcome {
    pub valid: bool,
    pub summary: Summary,
}

impl fmt::Display for VerifyOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "valid={} {}", self.valid, self.summary)
    }
}

/// `verify`: re-reads an order file and a fills file and checks that the
/// fills form a matching over those orders.
pub fn run_verify(
    orders: &std::path::Path,
    fills: &std::path::Path,
) -> Result<VerifyOutcome, CliError> {
    let inst = files::ingest(orders)?;
    let m = files::read_fills(fills)?;
    Ok(VerifyOutcome {
        valid: matching_in(inst.bids(), inst.asks(), &m),
        summary: Summary::of(&inst, &m),
    })
}

/// `check`: the randomized campaign, optionally against a mutant.
pub fn run_check_command(cfg: &CheckConfig, mutant: Option<Mutant>) -> CheckReport {
    let mech = match mutant {
        Some(m) => Mechanisms::with_mutant(m),
        None => Mechanisms::reference(),
    };
    run_check(cfg, &mech)
}

/// Human-readable campaign report; includes the shrunk counterexample as an
/// order file on failure.
pub fn format_report(r: &CheckReport) -> String {
    let s = &r.stats;
    let mut out = format!(
        "mechanisms={} seeds={} instances={} exhaustive={} enumerated={} bound_reports={} sublist_pairs={}",
        r.mechanisms,
        r.seeds,
        s.instances,
        s.exhaustive_instances,
        s.enumerated_matchings,
        s.bound_reports,
        s.sublist_pairs
    );
    match &r.violation {
        None => out.push_str(" violations=0\n"),
        Some(v) => {
            out.push_str(" violations=1\n");
            out.push_str(&format!(
                "VIOLATION invariant={} seed={}\n{}\nminimized instance ({} bids, {} asks; original {} bids, {} asks):\n{}",
                v.invariant,
                v.seed,
                v.detail,
                v.instance.bids().len(),
                v.instance.asks().len(),
                v.original.bids().len(),
                v.original.asks().len(),
                files::format_orders(&v.instance)
            ));
        }
    }
    out
}
