//! Reference TPC-H generator, used for the TPC-H side of paired runs.
//!
//! Value domains follow the TPC-H layout closely enough for the four
//! comparison queries; text columns are filler.

use chrono::{Duration, NaiveDate};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::calendar::Calendar;
use super::hierarchy::{
    COLORS, CONTAINER_S1, CONTAINER_S2, NATIONS, PRIORITIES, REGIONS, SEGMENTS,
    SHIP_INSTRUCT, SHIP_MODES, TYPE_S1, TYPE_S2, TYPE_S3,
};
use super::rng::substream;
use super::ssb::{chunk_range, phone, random_text, retail_price_cents};
use super::tbl::Row;
use super::{ChunkSource, GenError};
use crate::value::Value;

pub const LINES_PER_ORDER: u64 = 4;
pub const SUPPLIERS_PER_PART: u64 = 4;

/// Last order date is this many days before the calendar end so that
/// receipt dates stay inside the calendar.
const ORDER_DATE_MARGIN: u64 = 151;

fn current_date() -> NaiveDate {
    NaiveDate::from_ymd_opt(1995, 6, 17).expect("valid date")
}

fn pick<'a>(rng: &mut ChaCha8Rng, xs: &[&'a str]) -> &'a str {
    xs[rng.gen_range(0..xs.len())]
}

/// The `i`-th supplier of `partkey`; distinct for `i < 4` when there are at
/// least four suppliers.
pub fn partsupp_suppkey(partkey: u64, i: u64, suppliers: u64) -> u64 {
    (partkey - 1 + i * (suppliers / SUPPLIERS_PER_PART) + (partkey - 1) / suppliers) % suppliers
        + 1
}

pub(crate) struct RegionSource;

impl ChunkSource for RegionSource {
    fn total_rows(&self) -> u64 {
        REGIONS.len() as u64
    }
    fn chunk_rows(&self) -> u64 {
        REGIONS.len() as u64
    }
    fn chunk(&self, c: u64) -> Result<Vec<Row>, GenError> {
        if c > 0 {
            return Ok(Vec::new());
        }
        Ok(REGIONS
            .iter()
            .enumerate()
            .map(|(i, r)| {
                vec![
                    Value::Int(i as i64),
                    Value::text(*r),
                    Value::Text(format!("region {}", r.to_ascii_lowercase())),
                ]
            })
            .collect())
    }
}

pub(crate) struct NationSource;

impl ChunkSource for NationSource {
    fn total_rows(&self) -> u64 {
        NATIONS.len() as u64
    }
    fn chunk_rows(&self) -> u64 {
        NATIONS.len() as u64
    }
    fn chunk(&self, c: u64) -> Result<Vec<Row>, GenError> {
        if c > 0 {
            return Ok(Vec::new());
        }
        Ok(NATIONS
            .iter()
            .enumerate()
            .map(|(i, (n, r))| {
                vec![
                    Value::Int(i as i64),
                    Value::text(*n),
                    Value::Int(*r as i64),
                    Value::Text(format!("nation {}", n.to_ascii_lowercase())),
                ]
            })
            .collect())
    }
}

pub(crate) struct PartSource {
    pub seed: u64,
    pub rows: u64,
    pub chunk_rows: u64,
}

impl ChunkSource for PartSource {
    fn total_rows(&self) -> u64 {
        self.rows
    }
    fn chunk_rows(&self) -> u64 {
        self.chunk_rows
    }
    fn chunk(&self, c: u64) -> Result<Vec<Row>, GenError> {
        let s = |col| substream(self.seed, "TPCH.PART", col, c);
        let (mut name, mut mfgr, mut brand, mut ty, mut size, mut cont, mut cmt) = (
            s("P_NAME"),
            s("P_MFGR"),
            s("P_BRAND"),
            s("P_TYPE"),
            s("P_SIZE"),
            s("P_CONTAINER"),
            s("P_COMMENT"),
        );
        Ok(chunk_range(c, self.chunk_rows, self.rows)
            .map(|i| {
                let key = i as i64 + 1;
                let m = mfgr.gen_range(1..=5);
                let nm = (0..5).map(|_| pick(&mut name, &COLORS)).collect::<Vec<_>>().join(" ");
                vec![
                    Value::Int(key),
                    Value::Text(nm),
                    Value::Text(format!("Manufacturer#{m}")),
                    Value::Text(format!("Brand#{m}{}", brand.gen_range(1..=5))),
                    Value::Text(format!(
                        "{} {} {}",
                        pick(&mut ty, &TYPE_S1),
                        pick(&mut ty, &TYPE_S2),
                        pick(&mut ty, &TYPE_S3)
                    )),
                    Value::Int(size.gen_range(1..=50)),
                    Value::Text(format!(
                        "{} {}",
                        pick(&mut cont, &CONTAINER_S1),
                        pick(&mut cont, &CONTAINER_S2)
                    )),
                    Value::money(retail_price_cents(key)),
                    Value::Text(random_text(&mut cmt, 5, 22)),
                ]
            })
            .collect())
    }
}

pub(crate) struct SupplierSource {
    pub seed: u64,
    pub rows: u64,
    pub chunk_rows: u64,
}

impl ChunkSource for SupplierSource {
    fn total_rows(&self) -> u64 {
        self.rows
    }
    fn chunk_rows(&self) -> u64 {
        self.chunk_rows
    }
    fn chunk(&self, c: u64) -> Result<Vec<Row>, GenError> {
        let s = |col| substream(self.seed, "TPCH.SUPPLIER", col, c);
        let (mut addr, mut nat, mut ph, mut bal, mut cmt) = (
            s("S_ADDRESS"),
            s("S_NATIONKEY"),
            s("S_PHONE"),
            s("S_ACCTBAL"),
            s("S_COMMENT"),
        );
        Ok(chunk_range(c, self.chunk_rows, self.rows)
            .map(|i| {
                let key = i as i64 + 1;
                let n = nat.gen_range(0..NATIONS.len());
                vec![
                    Value::Int(key),
                    Value::Text(format!("Supplier#{key:09}")),
                    Value::Text(random_text(&mut addr, 10, 40)),
                    Value::Int(n as i64),
                    Value::Text(phone(&mut ph, n)),
                    Value::money(bal.gen_range(-99_999..=999_999)),
                    Value::Text(random_text(&mut cmt, 25, 100)),
                ]
            })
            .collect())
    }
}

pub(crate) struct PartsuppSource {
    pub seed: u64,
    pub parts: u64,
    pub suppliers: u64,
    /// Multiple of [`SUPPLIERS_PER_PART`].
    pub chunk_rows: u64,
}

impl ChunkSource for PartsuppSource {
    fn total_rows(&self) -> u64 {
        self.parts * SUPPLIERS_PER_PART
    }
    fn chunk_rows(&self) -> u64 {
        self.chunk_rows
    }
    fn chunk(&self, c: u64) -> Result<Vec<Row>, GenError> {
        let s = |col| substream(self.seed, "TPCH.PARTSUPP", col, c);
        let (mut qty, mut cost, mut cmt) = (s("PS_AVAILQTY"), s("PS_SUPPLYCOST"), s("PS_COMMENT"));
        Ok(chunk_range(c, self.chunk_rows, self.total_rows())
            .map(|i| {
                let partkey = i / SUPPLIERS_PER_PART + 1;
                let suppkey = partsupp_suppkey(partkey, i % SUPPLIERS_PER_PART, self.suppliers);
                vec![
                    Value::Int(partkey as i64),
                    Value::Int(suppkey as i64),
                    Value::Int(qty.gen_range(1..=9_999)),
                    Value::money(cost.gen_range(100..=100_000)),
                    Value::Text(random_text(&mut cmt, 49, 198)),
                ]
            })
            .collect())
    }
}

pub(crate) struct CustomerSource {
    pub seed: u64,
    pub rows: u64,
    pub chunk_rows: u64,
}

impl ChunkSource for CustomerSource {
    fn total_rows(&self) -> u64 {
        self.rows
    }
    fn chunk_rows(&self) -> u64 {
        self.chunk_rows
    }
    fn chunk(&self, c: u64) -> Result<Vec<Row>, GenError> {
        let s = |col| substream(self.seed, "TPCH.CUSTOMER", col, c);
        let (mut addr, mut nat, mut ph, mut bal, mut seg, mut cmt) = (
            s("C_ADDRESS"),
            s("C_NATIONKEY"),
            s("C_PHONE"),
            s("C_ACCTBAL"),
            s("C_MKTSEGMENT"),
            s("C_COMMENT"),
        );
        Ok(chunk_range(c, self.chunk_rows, self.rows)
            .map(|i| {
                let key = i as i64 + 1;
                let n = nat.gen_range(0..NATIONS.len());
                vec![
                    Value::Int(key),
                    Value::Text(format!("Customer#{key:09}")),
                    Value::Text(random_text(&mut addr, 10, 40)),
                    Value::Int(n as i64),
                    Value::Text(phone(&mut ph, n)),
                    Value::money(bal.gen_range(-99_999..=999_999)),
                    Value::text(pick(&mut seg, &SEGMENTS)),
                    Value::Text(random_text(&mut cmt, 29, 116)),
                ]
            })
            .collect())
    }
}

/// ORDERS and LINEITEM share order-level streams, so chunk `c` of either
/// table covers the same orders.
#[derive(Clone)]
pub(crate) struct OrderBlocks {
    pub seed: u64,
    pub orders: u64,
    pub customers: u64,
    pub parts: u64,
    pub suppliers: u64,
    pub calendar: Calendar,
    pub orders_per_chunk: u64,
}

struct Block {
    orders: Vec<Row>,
    lines: Vec<Row>,
}

impl OrderBlocks {
    fn block(&self, c: u64) -> Block {
        let s = |col| substream(self.seed, "TPCH.ORDERS", col, c);
        let (mut cust, mut odate, mut prio, mut clerk, mut ocmt) = (
            s("O_CUSTKEY"),
            s("O_ORDERDATE"),
            s("O_ORDERPRIORITY"),
            s("O_CLERK"),
            s("O_COMMENT"),
        );
        let (mut part, mut supp, mut qty, mut disc, mut tax, mut ship, mut commit, mut receipt) = (
            s("L_PARTKEY"),
            s("L_SUPPKEY"),
            s("L_QUANTITY"),
            s("L_DISCOUNT"),
            s("L_TAX"),
            s("L_SHIPDATE"),
            s("L_COMMITDATE"),
            s("L_RECEIPTDATE"),
        );
        let (mut flag, mut instr, mut mode, mut lcmt) =
            (s("L_RETURNFLAG"), s("L_SHIPINSTRUCT"), s("L_SHIPMODE"), s("L_COMMENT"));
        let span = self.calendar.days().saturating_sub(ORDER_DATE_MARGIN).max(1);
        let clerks = (self.orders / 1_500).max(1);
        let today = current_date();
        let mut out = Block {
            orders: Vec::new(),
            lines: Vec::new(),
        };
        for o in chunk_range(c, self.orders_per_chunk, self.orders) {
            let orderkey = o as i64 + 1;
            let orderdate = self.calendar.date_at(odate.gen_range(0..span));
            let mut total = 0i128;
            let mut shipped = 0;
            for l in 0..LINES_PER_ORDER {
                let partkey = part.gen_range(1..=self.parts);
                let suppkey =
                    partsupp_suppkey(partkey, supp.gen_range(0..SUPPLIERS_PER_PART), self.suppliers);
                let quantity = qty.gen_range(1..=50i64);
                let discount = disc.gen_range(0..=10i64);
                let tax_pct = tax.gen_range(0..=8i64);
                let extended = quantity * retail_price_cents(partkey as i64);
                total += i128::from(extended) * i128::from(100 - discount) * i128::from(100 + tax_pct);
                let shipdate = orderdate + Duration::days(ship.gen_range(1..=121));
                let commitdate = orderdate + Duration::days(commit.gen_range(30..=90));
                let receiptdate = shipdate + Duration::days(receipt.gen_range(1..=30));
                let returnflag = if receiptdate <= today {
                    if flag.gen_bool(0.5) { "R" } else { "A" }
                } else {
                    "N"
                };
                let linestatus = if shipdate > today { "O" } else { "F" };
                if linestatus == "F" {
                    shipped += 1;
                }
                out.lines.push(vec![
                    Value::Int(orderkey),
                    Value::Int(partkey as i64),
                    Value::Int(suppkey as i64),
                    Value::Int(l as i64 + 1),
                    Value::money(quantity * 100),
                    Value::money(extended),
                    Value::money(discount),
                    Value::money(tax_pct),
                    Value::text(returnflag),
                    Value::text(linestatus),
                    Value::Date(shipdate),
                    Value::Date(commitdate),
                    Value::Date(receiptdate),
                    Value::text(pick(&mut instr, &SHIP_INSTRUCT)),
                    Value::text(pick(&mut mode, &SHIP_MODES)),
                    Value::Text(random_text(&mut lcmt, 10, 43)),
                ]);
            }
            let status = match shipped {
                0 => "O",
                n if n == LINES_PER_ORDER => "F",
                _ => "P",
            };
            out.orders.push(vec![
                Value::Int(orderkey),
                Value::Int(cust.gen_range(1..=self.customers) as i64),
                Value::text(status),
                Value::money((total / 10_000) as i64),
                Value::Date(orderdate),
                Value::text(pick(&mut prio, &PRIORITIES)),
                Value::Text(format!("Clerk#{:09}", clerk.gen_range(1..=clerks))),
                Value::Int(0),
                Value::Text(random_text(&mut ocmt, 19, 78)),
            ]);
        }
        out
    }
}

pub(crate) struct OrdersSource(pub OrderBlocks);

impl ChunkSource for OrdersSource {
    fn total_rows(&self) -> u64 {
        self.0.orders
    }
    fn chunk_rows(&self) -> u64 {
        self.0.orders_per_chunk
    }
    fn chunk(&self, c: u64) -> Result<Vec<Row>, GenError> {
        Ok(self.0.block(c).orders)
    }
}

pub(crate) struct LineitemSource(pub OrderBlocks);

impl ChunkSource for LineitemSource {
    fn total_rows(&self) -> u64 {
        self.0.orders * LINES_PER_ORDER
    }
    fn chunk_rows(&self) -> u64 {
        self.0.orders_per_chunk * LINES_PER_ORDER
    }
    fn chunk(&self, c: u64) -> Result<Vec<Row>, GenError> {
        Ok(self.0.block(c).lines)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn partsupp_suppliers_are_distinct_and_in_range() {
        for s in [4u64, 20, 100, 1_000] {
            for p in 1..=500u64 {
                let keys: HashSet<_> =
                    (0..SUPPLIERS_PER_PART).map(|i| partsupp_suppkey(p, i, s)).collect();
                assert_eq!(keys.len(), 4, "part {p} suppliers {s}");
                assert!(keys.iter().all(|k| (1..=s).contains(k)));
            }
        }
    }

    #[test]
    fn orders_and_lines_agree() {
        let blocks = OrderBlocks {
            seed: 7,
            orders: 50,
            customers: 30,
            parts: 40,
            suppliers: 8,
            calendar: Calendar::default(),
            orders_per_chunk: 16,
        };
        let orders = OrdersSource(blocks.clone());
        let lines = LineitemSource(blocks);
        let mut n_orders = 0;
        for c in 0..4 {
            let os = orders.chunk(c).unwrap();
            let ls = lines.chunk(c).unwrap();
            assert_eq!(ls.len(), os.len() * 4);
            for (i, o) in os.iter().enumerate() {
                let mine = &ls[i * 4..i * 4 + 4];
                assert!(mine.iter().all(|l| l[0] == o[0]));
                // totalprice is the taxed, discounted sum of the lines
                let expect: i128 = mine
                    .iter()
                    .map(|l| {
                        let (e, _) = l[5].as_scaled().unwrap();
                        let (d, _) = l[6].as_scaled().unwrap();
                        let (t, _) = l[7].as_scaled().unwrap();
                        e * (100 - d) * (100 + t)
                    })
                    .sum();
                assert_eq!(o[3].as_scaled().unwrap().0, expect / 10_000);
                assert!(mine.iter().all(|l| l[10].compare(&o[4]) == Some(std::cmp::Ordering::Greater)));
            }
            n_orders += os.len();
        }
        assert_eq!(n_orders, 50);
    }
}
