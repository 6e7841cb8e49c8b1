//! Flat-file formats.
//!
//! Orders: CSV rows `side,id,price` with `side` one of `B`/`A`, optional
//! header row, surrounding whitespace ignored. A `.json` file instead holds
//! `{"bids": [{"id": .., "price": ..}], "asks": [..]}`.
//!
//! Fills: CSV with the exact header `bid_id,ask_id,bid_price,ask_price,trade_price`,
//! one fill per row in matching order, or a JSON array of objects with the
//! same five fields.

use std::fs;
use std::io::{self, Write};
use std::num::IntErrorKind;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::Error;
use crate::market::{Ask, Bid, Fill, Instance, Matching, OrderId, Price};

pub const FILLS_HEADER: [&str; 5] = ["bid_id", "ask_id", "bid_price", "ask_price", "trade_price"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    /// `.json` means JSON, anything else CSV.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Csv,
        }
    }
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: {msg}")]
    Parse { line: u64, msg: String },

    #[error("line {line}: value does not fit in 64 bits")]
    Overflow { line: u64 },

    #[error(transparent)]
    Invalid(#[from] Error),

    #[error("{0}")]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FillRecord {
    pub bid_id: OrderId,
    pub ask_id: OrderId,
    pub bid_price: Price,
    pub ask_price: Price,
    pub trade_price: Price,
}

impl From<&Fill> for FillRecord {
    fn from(f: &Fill) -> Self {
        FillRecord {
            bid_id: f.bid.id,
            ask_id: f.ask.id,
            bid_price: f.bid.price,
            ask_price: f.ask.price,
            trade_price: f.trade_price,
        }
    }
}

impl From<FillRecord> for Fill {
    fn from(r: FillRecord) -> Self {
        Fill::new(
            Bid::new(r.bid_price, r.bid_id),
            Ask::new(r.ask_price, r.ask_id),
            r.trade_price,
        )
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct OrderRecord {
    id: OrderId,
    price: Price,
}

#[derive(Debug, Serialize, Deserialize)]
struct OrdersFile {
    #[serde(default)]
    bids: Vec<OrderRecord>,
    #[serde(default)]
    asks: Vec<OrderRecord>,
}

fn parse_u64(field: &str, what: &str, line: u64) -> Result<u64, IngestError> {
    field.parse::<u64>().map_err(|e| match e.kind() {
        IntErrorKind::PosOverflow => IngestError::Overflow { line },
        _ => IngestError::Parse {
            line,
            msg: format!("invalid {what} `{field}`"),
        },
    })
}

fn csv_line(rec: &csv::StringRecord) -> u64 {
    rec.position().map_or(0, |p| p.line())
}

fn csv_error(e: csv::Error) -> IngestError {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(e) => IngestError::Io(e),
        other => IngestError::Parse {
            line,
            msg: format!("{other:?}"),
        },
    }
}

/// Parses an order file's text. Line order is kept within each side.
pub fn parse_orders(text: &str, format: Format) -> Result<Instance, IngestError> {
    match format {
        Format::Csv => parse_orders_csv(text),
        Format::Json => {
            let file: OrdersFile = serde_json::from_str(text).map_err(|e| IngestError::Parse {
                line: e.line() as u64,
                msg: e.to_string(),
            })?;
            let bids = file.bids.iter().map(|o| Bid::new(o.price, o.id)).collect();
            let asks = file.asks.iter().map(|o| Ask::new(o.price, o.id)).collect();
            Ok(Instance::new(bids, asks)?)
        }
    }
}

fn parse_orders_csv(text: &str) -> Result<Instance, IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let (mut bids, mut asks) = (Vec::new(), Vec::new());
    for (n, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_error)?;
        let line = csv_line(&rec);
        if rec.iter().all(str::is_empty) {
            continue;
        }
        if n == 0 && rec.get(0).is_some_and(|s| s.eq_ignore_ascii_case("side")) {
            continue;
        }
        if rec.len() != 3 {
            return Err(IngestError::Parse {
                line,
                msg: format!("expected 3 fields `side,id,price`, found {}", rec.len()),
            });
        }
        let id = parse_u64(&rec[1], "id", line)?;
        let price = parse_u64(&rec[2], "price", line)?;
        match &rec[0] {
            "B" => bids.push(Bid::new(price, id)),
            "A" => asks.push(Ask::new(price, id)),
            other => {
                return Err(IngestError::Parse {
                    line,
                    msg: format!("unknown side `{other}` (expected B or A)"),
                })
            }
        }
    }
    Ok(Instance::new(bids, asks)?)
}

/// Reads and validates an order file; the format follows the extension.
pub fn ingest(path: &Path) -> Result<Instance, IngestError> {
    ingest_as(path, Format::from_path(path))
}

pub fn ingest_as(path: &Path, format: Format) -> Result<Instance, IngestError> {
    let text = fs::read_to_string(path)?;
    parse_orders(&text, format)
}

/// Order file text in CSV form, bids first.
pub fn format_orders(inst: &Instance) -> String {
    let mut s = String::from("side,id,price\n");
    for b in inst.bids() {
        s.push_str(&format!("B,{},{}\n", b.id, b.price));
    }
    for a in inst.asks() {
        s.push_str(&format!("A,{},{}\n", a.id, a.price));
    }
    s
}

/// Serializes fills in matching order.
pub fn write_fills<W: Write>(m: &Matching, format: Format, mut out: W) -> io::Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .has_headers(false)
                .from_writer(out);
            w.write_record(FILLS_HEADER)?;
            for f in m {
                w.serialize(FillRecord::from(f))
                    .map_err(io::Error::other)?;
            }
            w.flush()
        }
        Format::Json => {
            let recs: Vec<FillRecord> = m.iter().map(FillRecord::from).collect();
            serde_json::to_writer_pretty(&mut out, &recs)?;
            out.write_all(b"\n")
        }
    }
}

pub fn fills_to_string(m: &Matching, format: Format) -> String {
    let mut buf = Vec::new();
    write_fills(m, format, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("formats emit UTF-8")
}

/// Writes fills to `path`.
pub fn emit(m: &Matching, path: &Path, format: Format) -> io::Result<()> {
    fs::write(path, fills_to_string(m, format))
}

pub fn parse_fills(text: &str, format: Format) -> Result<Matching, IngestError> {
    match format {
        Format::Json => {
            let recs: Vec<FillRecord> =
                serde_json::from_str(text).map_err(|e| IngestError::Parse {
                    line: e.line() as u64,
                    msg: e.to_string(),
                })?;
            Ok(recs.into_iter().map(Fill::from).collect())
        }
        Format::Csv => {
            let mut rdr = csv::ReaderBuilder::new()
                .has_headers(false)
                .trim(csv::Trim::All)
                .from_reader(text.as_bytes());
            let mut records = rdr.records();
            match records.next() {
                None => return Ok(Matching::new()),
                Some(h) => {
                    let h = h.map_err(csv_error)?;
                    if h.iter().ne(FILLS_HEADER) {
                        return Err(IngestError::Parse {
                            line: csv_line(&h),
                            msg: format!("expected header `{}`", FILLS_HEADER.join(",")),
                        });
                    }
                }
            }
            let mut m = Matching::new();
            for rec in records {
                let rec = rec.map_err(csv_error)?;
                let line = csv_line(&rec);
                let v: Vec<u64> = rec
                    .iter()
                    .zip(FILLS_HEADER)
                    .map(|(f, name)| parse_u64(f, name, line))
                    .collect::<Result<_, _>>()?;
                m.push(Fill::new(Bid::new(v[2], v[0]), Ask::new(v[3], v[1]), v[4]));
            }
            Ok(m)
        }
    }
}

/// Reads a fills file; the format follows the extension.
pub fn read_fills(path: &Path) -> Result<Matching, IngestError> {
    let text = fs::read_to_string(path)?;
    parse_fills(&text, Format::from_path(path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Side;

    #[test]
    fn csv_crossed() {
        let inst = parse_orders("B,1,100\nB,2,80\nA,1,90\nA,2,70\n", Format::Csv).unwrap();
        assert_eq!(inst.bids(), &[Bid::new(100, 1), Bid::new(80, 2)]);
        assert_eq!(inst.asks(), &[Ask::new(90, 1), Ask::new(70, 2)]);
    }

    #[test]
    fn csv_header_and_whitespace() {
        let inst = parse_orders("side,id,price\n  A , 3 , 7 \n\nB,1,9\n", Format::Csv).unwrap();
        assert_eq!(inst.bids(), &[Bid::new(9, 1)]);
        assert_eq!(inst.asks(), &[Ask::new(7, 3)]);
    }

    #[test]
    fn csv_empty() {
        assert_eq!(parse_orders("", Format::Csv).unwrap(), Instance::default());
    }

    #[test]
    fn csv_errors() {
        let e = parse_orders("B,1,100\nB,1,90\n", Format::Csv).unwrap_err();
        assert!(matches!(
            e,
            IngestError::Invalid(Error::DuplicateId {
                side: Side::Bid,
                id: 1
            })
        ));
        let e = parse_orders("B,1,100\nX,2,5\n", Format::Csv).unwrap_err();
        assert!(matches!(e, IngestError::Parse { line: 2, .. }), "{e:?}");
        let e = parse_orders("B,1,abc\n", Format::Csv).unwrap_err();
        assert!(matches!(e, IngestError::Parse { line: 1, .. }));
        let e = parse_orders("B,1,-3\n", Format::Csv).unwrap_err();
        assert!(matches!(e, IngestError::Parse { line: 1, .. }));
        let e = parse_orders("B,1\n", Format::Csv).unwrap_err();
        assert!(matches!(e, IngestError::Parse { line: 1, .. }));
        let e = parse_orders("A,1,5\nB,2,18446744073709551616\n", Format::Csv).unwrap_err();
        assert!(matches!(e, IngestError::Overflow { line: 2 }));
        assert!(parse_orders("B,1,18446744073709551615\n", Format::Csv).is_ok());
    }

    #[test]
    fn json_orders() {
        let inst = parse_orders(
            r#"{"bids":[{"id":1,"price":100}],"asks":[{"id":4,"price":70}]}"#,
            Format::Json,
        )
        .unwrap();
        assert_eq!(inst.bids(), &[Bid::new(100, 1)]);
        assert_eq!(inst.asks(), &[Ask::new(70, 4)]);
        assert!(parse_orders("{\"bids\":[{\"id\":1}]}", Format::Json).is_err());
    }

    #[test]
    fn fills_csv_format() {
        let m: Matching = vec![Fill::new(Bid::new(100, 1), Ask::new(70, 2), 100)].into();
        assert_eq!(
            fills_to_string(&m, Format::Csv),
            "bid_id,ask_id,bid_price,ask_price,trade_price\n1,2,100,70,100\n"
        );
        assert_eq!(
            fills_to_string(&Matching::new(), Format::Csv),
            "bid_id,ask_id,bid_price,ask_price,trade_price\n"
        );
    }

    #[test]
    fn fills_json_format() {
        let m: Matching = vec![Fill::new(Bid::new(100, 1), Ask::new(70, 2), 100)].into();
        let s = fills_to_string(&m, Format::Json);
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(
            v,
            serde_json::json!([{"bid_id":1,"ask_id":2,"bid_price":100,"ask_price":70,"trade_price":100}])
        );
        assert_eq!(fills_to_string(&Matching::new(), Format::Json), "[]\n");
    }

    #[test]
    fn fills_header_required() {
        assert!(parse_fills("1,2,100,70,100\n", Format::Csv).is_err());
        assert!(parse_fills(
            "bid_id,ask_id,bid_price,ask_price,trade_price\n1,2,x,70,100\n",
            Format::Csv
        )
        .is_err());
        assert!(parse_fills("", Format::Csv).unwrap().is_empty());
    }

    #[test]
    fn orders_dump_parses_back() {
        let inst = Instance::new(vec![Bid::new(5, 2)], vec![Ask::new(3, 9)]).unwrap();
        assert_eq!(
            parse_orders(&format_orders(&inst), Format::Csv).unwrap(),
            inst
        );
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn fills_round_trip(
                rows in prop::collection::vec(any::<(u64, u64, u64, u64, u64)>(), 0..20),
                json in any::<bool>(),
            ) {
                let m: Matching = rows
                    .iter()
                    .map(|&(bi, ai, bp, ap, tp)| Fill::new(Bid::new(bp, bi), Ask::new(ap, ai), tp))
                    .collect();
                let fmt = if json { Format::Json } else { Format::Csv };
                prop_assert_eq!(parse_fills(&fills_to_string(&m, fmt), fmt).unwrap(), m);
            }
        }
    }
}
