//! C ABI over `callmatch`.
//!
//! Markets and matchings live behind opaque handles created and freed by
//! this library. Every fallible call returns a [`CmStatus`]; the text of the
//! most recent failure on the calling thread is available from
//! [`cm_last_error_message`].

use std::cell::RefCell;
use std::collections::HashSet;
use std::ffi::{c_char, CString};
use std::ptr;

use callmatch::algorithms::{fair_mm, fairize, ir_middle, produce_mm, produce_um, uniform_price};
use callmatch::market::{sort_asks_asc, sort_asks_desc, sort_bids_desc};
use callmatch::predicates::{is_fair, is_ir, is_maximum, is_uniform, matching_in};
use callmatch::{Ask, Bid, Error, Fill, Matching};

/// Status code returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmStatus {
    Ok = 0,
    NullPointer = 1,
    DuplicateId = 2,
    InvalidMatching = 3,
    NotMatchable = 4,
    Unsorted = 5,
    OutOfRange = 6,
    /// Nothing trades, so there is no clearing price.
    NoPrice = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmAlgorithm {
    /// Maximum matching.
    Mm = 0,
    /// Maximum matching, made fair and priced at pair midpoints.
    FairMm = 1,
    /// Maximum uniform-price matching.
    Um = 2,
}

/// One trade.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CmFill {
    pub bid_id: u64,
    pub ask_id: u64,
    pub bid_price: u64,
    pub ask_price: u64,
    pub trade_price: u64,
}

/// Order book under construction. Opaque to C.
pub struct CmInstance {
    bids: Vec<Bid>,
    asks: Vec<Ask>,
    bid_ids: HashSet<u64>,
    ask_ids: HashSet<u64>,
}

/// Opaque list of fills.
pub struct CmMatching(Matching);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn fail(status: CmStatus, msg: impl ToString) -> CmStatus {
    let text = CString::new(msg.to_string().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(text));
    status
}

fn from_error(e: Error) -> CmStatus {
    let status = match e {
        Error::DuplicateId { .. } => CmStatus::DuplicateId,
        Error::InvalidMatching => CmStatus::InvalidMatching,
        Error::NotMatchable { .. } => CmStatus::NotMatchable,
        Error::UnsortedInput { .. } => CmStatus::Unsorted,
        Error::TooLarge { .. } => CmStatus::OutOfRange,
    };
    fail(status, e)
}

fn to_cfill(f: &Fill) -> CmFill {
    CmFill {
        bid_id: f.bid.id,
        ask_id: f.ask.id,
        bid_price: f.bid.price,
        ask_price: f.ask.price,
        trade_price: f.trade_price,
    }
}

fn finish(out: *mut *mut CmMatching, r: callmatch::Result<Matching>) -> CmStatus {
    match r {
        Ok(m) => {
            // SAFETY: callers checked `out` for null.
            unsafe { *out = Box::into_raw(Box::new(CmMatching(m))) };
            CmStatus::Ok
        }
        Err(e) => from_error(e),
    }
}

macro_rules! deref {
    ($p:expr) => {
        // SAFETY: non-null handles come from this library and are live per the API contract.
        match unsafe { $p.as_ref() } {
            Some(v) => v,
            None => return fail(CmStatus::NullPointer, "null pointer argument"),
        }
    };
}

/// Message for the last failure on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Fresh empty order book. Free with [`cm_instance_free`].
#[no_mangle]
pub extern "C" fn cm_instance_new() -> *mut CmInstance {
    Box::into_raw(Box::new(CmInstance {
        bids: Vec::new(),
        asks: Vec::new(),
        bid_ids: HashSet::new(),
        ask_ids: HashSet::new(),
    }))
}

/// # Safety
/// `inst` must be null or a handle from [`cm_instance_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cm_instance_free(inst: *mut CmInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// # Safety
/// `inst` must be null or a live instance handle.
#[no_mangle]
pub unsafe extern "C" fn cm_instance_add_bid(
    inst: *mut CmInstance,
    price: u64,
    id: u64,
) -> CmStatus {
    let inst = match inst.as_mut() {
        Some(i) => i,
        None => return fail(CmStatus::NullPointer, "null instance"),
    };
    if !inst.bid_ids.insert(id) {
        return from_error(Error::DuplicateId {
            side: callmatch::Side::Bid,
            id,
        });
    }
    inst.bids.push(Bid::new(price, id));
    CmStatus::Ok
}

/// # Safety
/// `inst` must be null or a live instance handle.
#[no_mangle]
pub unsafe extern "C" fn cm_instance_add_ask(
    inst: *mut CmInstance,
    price: u64,
    id: u64,
) -> CmStatus {
    let inst = match inst.as_mut() {
        Some(i) => i,
        None => return fail(CmStatus::NullPointer, "null instance"),
    };
    if !inst.ask_ids.insert(id) {
        return from_error(Error::DuplicateId {
            side: callmatch::Side::Ask,
            id,
        });
    }
    inst.asks.push(Ask::new(price, id));
    CmStatus::Ok
}

/// Number of bids and asks. Either out pointer may be null.
///
/// # Safety
/// `inst` must be a live instance handle; out pointers null or writable.
#[no_mangle]
pub unsafe extern "C" fn cm_instance_counts(
    inst: *const CmInstance,
    bids: *mut usize,
    asks: *mut usize,
) -> CmStatus {
    let inst = deref!(inst);
    if !bids.is_null() {
        *bids = inst.bids.len();
    }
    if !asks.is_null() {
        *asks = inst.asks.len();
    }
    CmStatus::Ok
}

/// Run a mechanism over the book. On success `*out` owns a new matching.
///
/// # Safety
/// `inst` must be a live instance handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cm_run(
    inst: *const CmInstance,
    algo: CmAlgorithm,
    out: *mut *mut CmMatching,
) -> CmStatus {
    let inst = deref!(inst);
    if out.is_null() {
        return fail(CmStatus::NullPointer, "null out pointer");
    }
    let (b, a) = (&inst.bids, &inst.asks);
    let r = match algo {
        CmAlgorithm::Mm => produce_mm(&sort_bids_desc(b), &sort_asks_desc(a)),
        CmAlgorithm::FairMm => fair_mm(b, a).and_then(|m| ir_middle(&m)),
        CmAlgorithm::Um => produce_um(&sort_bids_desc(b), &sort_asks_asc(a)),
    };
    finish(out, r)
}

/// Clearing price of the uniform mechanism. Returns `NoPrice` when
/// nothing trades.
///
/// # Safety
/// `inst` must be a live instance handle and `price` writable.
#[no_mangle]
pub unsafe extern "C" fn cm_uniform_price(inst: *const CmInstance, price: *mut u64) -> CmStatus {
    let inst = deref!(inst);
    if price.is_null() {
        return fail(CmStatus::NullPointer, "null out pointer");
    }
    match uniform_price(&sort_bids_desc(&inst.bids), &sort_asks_asc(&inst.asks)) {
        Ok(Some(p)) => {
            *price = p;
            CmStatus::Ok
        }
        Ok(None) => fail(CmStatus::NoPrice, "no order pair trades"),
        Err(e) => from_error(e),
    }
}

/// Rewire `m` so it is fair on both sides, keeping its size.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cm_fairize(
    inst: *const CmInstance,
    m: *const CmMatching,
    out: *mut *mut CmMatching,
) -> CmStatus {
    let inst = deref!(inst);
    let m = deref!(m);
    if out.is_null() {
        return fail(CmStatus::NullPointer, "null out pointer");
    }
    finish(out, fairize(&m.0, &inst.bids, &inst.asks))
}

/// Reprice every pair at the midpoint of its bid and ask.
///
/// # Safety
/// `m` must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cm_ir_middle(m: *const CmMatching, out: *mut *mut CmMatching) -> CmStatus {
    let m = deref!(m);
    if out.is_null() {
        return fail(CmStatus::NullPointer, "null out pointer");
    }
    finish(out, ir_middle(&m.0))
}

/// Empty matching, for building one by hand with [`cm_matching_push`].
#[no_mangle]
pub extern "C" fn cm_matching_new() -> *mut CmMatching {
    Box::into_raw(Box::new(CmMatching(Matching::new())))
}

/// # Safety
/// `m` must be null or a matching handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cm_matching_free(m: *mut CmMatching) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// # Safety
/// `m` must be a live matching handle.
#[no_mangle]
pub unsafe extern "C" fn cm_matching_push(m: *mut CmMatching, fill: CmFill) -> CmStatus {
    let m = match m.as_mut() {
        Some(m) => m,
        None => return fail(CmStatus::NullPointer, "null matching"),
    };
    m.0.push(Fill::new(
        Bid::new(fill.bid_price, fill.bid_id),
        Ask::new(fill.ask_price, fill.ask_id),
        fill.trade_price,
    ));
    CmStatus::Ok
}

/// Number of fills; 0 for null.
///
/// # Safety
/// `m` must be null or a live matching handle.
#[no_mangle]
pub unsafe extern "C" fn cm_matching_len(m: *const CmMatching) -> usize {
    m.as_ref().map_or(0, |m| m.0.len())
}

/// # Safety
/// `m` must be a live matching handle and `fill` writable.
#[no_mangle]
pub unsafe extern "C" fn cm_matching_get(
    m: *const CmMatching,
    index: usize,
    fill: *mut CmFill,
) -> CmStatus {
    let m = deref!(m);
    if fill.is_null() {
        return fail(CmStatus::NullPointer, "null out pointer");
    }
    match m.0.fills().get(index) {
        Some(f) => {
            *fill = to_cfill(f);
            CmStatus::Ok
        }
        None => fail(
            CmStatus::OutOfRange,
            format!("index {index} out of range for {} fills", m.0.len()),
        ),
    }
}

fn flag(out: *mut bool, v: bool) -> CmStatus {
    if out.is_null() {
        return fail(CmStatus::NullPointer, "null out pointer");
    }
    // SAFETY: checked non-null; caller guarantees writability.
    unsafe { *out = v };
    CmStatus::Ok
}

/// Every pair trades at a price between its ask and bid.
///
/// # Safety
/// `m` must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cm_is_ir(m: *const CmMatching, out: *mut bool) -> CmStatus {
    flag(out, is_ir(&deref!(m).0))
}

/// # Safety
/// `m` must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cm_is_uniform(m: *const CmMatching, out: *mut bool) -> CmStatus {
    flag(out, is_uniform(&deref!(m).0))
}

/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cm_is_fair(
    inst: *const CmInstance,
    m: *const CmMatching,
    out: *mut bool,
) -> CmStatus {
    let inst = deref!(inst);
    flag(out, is_fair(&deref!(m).0, &inst.bids, &inst.asks))
}

/// `m` is a valid matching over the book's orders.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cm_matching_in(
    inst: *const CmInstance,
    m: *const CmMatching,
    out: *mut bool,
) -> CmStatus {
    let inst = deref!(inst);
    flag(out, matching_in(&inst.bids, &inst.asks, &deref!(m).0))
}

/// No matching over the book is larger than `m`.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cm_is_maximum(
    inst: *const CmInstance,
    m: *const CmMatching,
    out: *mut bool,
) -> CmStatus {
    let inst = deref!(inst);
    flag(out, is_maximum(&deref!(m).0, &inst.bids, &inst.asks))
}
