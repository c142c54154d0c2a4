//! Row generators for the five SSB tables.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::calendar::{date_row, datekey, Calendar};
use super::hierarchy::{
    brand_label, category_label, city_label, mfgr_label, region_of_nation, nation_name,
    HierarchySpec, COLORS, CONTAINER_S1, CONTAINER_S2, NATIONS, PRIORITIES, SEGMENTS,
    SHIP_MODES, TYPE_S1, TYPE_S2, TYPE_S3,
};
use super::rng::substream;
use super::tbl::Row;
use super::{ChunkSource, GenError, GenSpec};
use crate::value::Value;

pub const LINES_PER_ORDER: u64 = 4;
pub const QUANTITY_RANGE: (i64, i64) = (1, 50);
pub const DISCOUNT_RANGE: (i64, i64) = (0, 10);
pub const TAX_RANGE: (i64, i64) = (0, 8);
pub const COMMIT_LAG_DAYS: (u64, u64) = (30, 90);

const ALNUM: &[u8] = b"0123456789abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ ,";

pub(crate) fn random_text(rng: &mut ChaCha8Rng, min: usize, max: usize) -> String {
    let len = rng.gen_range(min..=max);
    (0..len)
        .map(|_| ALNUM[rng.gen_range(0..ALNUM.len())] as char)
        .collect::<String>()
        .trim()
        .to_string()
        .chars()
        .map(|c| if c == ' ' { '.' } else { c })
        .collect()
}

pub(crate) fn phone(rng: &mut ChaCha8Rng, nation: usize) -> String {
    format!(
        "{}-{:03}-{:03}-{:04}",
        nation + 10,
        rng.gen_range(100..1000),
        rng.gen_range(100..1000),
        rng.gen_range(1000..10000)
    )
}

/// Unit price in cents, a pure function of the part key.
pub fn retail_price_cents(partkey: i64) -> i64 {
    90_000 + ((partkey / 10) % 20_001) + 100 * (partkey % 1_000)
}

pub(crate) fn chunk_range(chunk: u64, chunk_rows: u64, total: u64) -> std::ops::Range<u64> {
    let start = (chunk * chunk_rows).min(total);
    start..(start + chunk_rows).min(total)
}

#[derive(Debug, Clone, Copy)]
pub struct SsbSizes {
    pub customers: u64,
    pub suppliers: u64,
    pub parts: u64,
    pub lineorders: u64,
    pub dates: u64,
}

impl SsbSizes {
    pub fn for_spec(spec: &GenSpec) -> Result<Self, GenError> {
        let card = |t: &str| spec.cardinality(t);
        Ok(Self {
            customers: card("CUSTOMER")?,
            suppliers: card("SUPPLIER")?,
            parts: card("PART")?,
            lineorders: card("LINEORDER")?,
            dates: card(&spec.date_table)?,
        })
    }
}

/// A fact row before derived columns are filled in. Money is in cents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialFactRow {
    pub orderkey: i64,
    pub linenumber: i64,
    pub custkey: i64,
    pub partkey: i64,
    pub suppkey: i64,
    pub orderdate: i64,
    pub orderpriority: &'static str,
    pub shippriority: i64,
    pub quantity: i64,
    pub extendedprice: i64,
    pub ordtotalprice: i64,
    pub discount: i64,
    pub revenue: i64,
    pub supplycost: i64,
    pub tax: i64,
    pub commitdate: i64,
    pub shipmode: &'static str,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactRow {
    pub base: PartialFactRow,
    pub profit: i64,
}

/// Fills in `LO_PROFIT = LO_REVENUE - LO_SUPPLYCOST` in exact cents.
pub fn derive_row_fields(raw: PartialFactRow) -> Result<FactRow, GenError> {
    let profit = raw
        .revenue
        .checked_sub(raw.supplycost)
        .ok_or(GenError::Overflow {
            what: "LO_PROFIT",
            orderkey: raw.orderkey,
            linenumber: raw.linenumber,
        })?;
    Ok(FactRow { base: raw, profit })
}

impl FactRow {
    pub fn to_row(&self, materialize_profit: bool) -> Row {
        let b = &self.base;
        let mut row = vec![
            Value::Int(b.orderkey),
            Value::Int(b.linenumber),
            Value::Int(b.custkey),
            Value::Int(b.partkey),
            Value::Int(b.suppkey),
            Value::Int(b.orderdate),
            Value::text(b.orderpriority),
            Value::Int(b.shippriority),
            Value::Int(b.quantity),
            Value::money(b.extendedprice),
            Value::money(b.ordtotalprice),
            Value::Int(b.discount),
            Value::money(b.revenue),
            Value::money(b.supplycost),
            Value::Int(b.tax),
            Value::Int(b.commitdate),
            Value::text(b.shipmode),
        ];
        if materialize_profit {
            row.push(Value::money(self.profit));
        }
        row
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
        let s = |col| substream(self.seed, "CUSTOMER", col, c);
        let (mut addr, mut nat, mut city, mut ph, mut seg) = (
            s("C_ADDRESS"),
            s("C_NATION"),
            s("C_CITY"),
            s("C_PHONE"),
            s("C_MKTSEGMENT"),
        );
        Ok(chunk_range(c, self.chunk_rows, self.rows)
            .map(|i| {
                let key = i as i64 + 1;
                let n = nat.gen_range(0..NATIONS.len());
                vec![
                    Value::Int(key),
                    Value::Text(format!("Customer#{key:09}")),
                    Value::Text(random_text(&mut addr, 10, 25)),
                    Value::Text(city_label(n, city.gen_range(0..10))),
                    Value::text(nation_name(n)),
                    Value::text(region_of_nation(n)),
                    Value::Text(phone(&mut ph, n)),
                    Value::text(SEGMENTS[seg.gen_range(0..SEGMENTS.len())]),
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
        let s = |col| substream(self.seed, "SUPPLIER", col, c);
        let (mut addr, mut nat, mut city, mut ph) =
            (s("S_ADDRESS"), s("S_NATION"), s("S_CITY"), s("S_PHONE"));
        Ok(chunk_range(c, self.chunk_rows, self.rows)
            .map(|i| {
                let key = i as i64 + 1;
                let n = nat.gen_range(0..NATIONS.len());
                vec![
                    Value::Int(key),
                    Value::Text(format!("Supplier#{key:09}")),
                    Value::Text(random_text(&mut addr, 10, 25)),
                    Value::Text(city_label(n, city.gen_range(0..10))),
                    Value::text(nation_name(n)),
                    Value::text(region_of_nation(n)),
                    Value::Text(phone(&mut ph, n)),
                ]
            })
            .collect())
    }
}

pub(crate) struct PartSource {
    pub seed: u64,
    pub rows: u64,
    pub chunk_rows: u64,
    pub hierarchy: HierarchySpec,
}

impl ChunkSource for PartSource {
    fn total_rows(&self) -> u64 {
        self.rows
    }
    fn chunk_rows(&self) -> u64 {
        self.chunk_rows
    }
    fn chunk(&self, c: u64) -> Result<Vec<Row>, GenError> {
        let s = |col| substream(self.seed, "PART", col, c);
        let (mut name, mut mfgr, mut cat, mut brand, mut color, mut ty, mut size, mut cont) = (
            s("P_NAME"),
            s("P_MFGR"),
            s("P_CATEGORY"),
            s("P_BRAND1"),
            s("P_COLOR"),
            s("P_TYPE"),
            s("P_SIZE"),
            s("P_CONTAINER"),
        );
        let fan = |l| self.hierarchy.fan_out(l).unwrap_or(1);
        let (fm, fc, fb) = (fan("mfgr"), fan("category"), fan("brand"));
        Ok(chunk_range(c, self.chunk_rows, self.rows)
            .map(|i| {
                let key = i as i64 + 1;
                let m = mfgr.gen_range(1..=fm);
                let k = cat.gen_range(1..=fc);
                let b = brand.gen_range(1..=fb);
                let pick = |r: &mut ChaCha8Rng, xs: &[&'static str]| xs[r.gen_range(0..xs.len())];
                let nm = format!("{} {}", pick(&mut name, &COLORS), pick(&mut name, &COLORS));
                let tp = format!(
                    "{} {} {}",
                    pick(&mut ty, &TYPE_S1),
                    pick(&mut ty, &TYPE_S2),
                    pick(&mut ty, &TYPE_S3)
                );
                let ct = format!(
                    "{} {}",
                    pick(&mut cont, &CONTAINER_S1),
                    pick(&mut cont, &CONTAINER_S2)
                );
                vec![
                    Value::Int(key),
                    Value::Text(nm),
                    Value::Text(mfgr_label(m)),
                    Value::Text(category_label(m, k)),
                    Value::Text(brand_label(m, k, b)),
                    Value::text(pick(&mut color, &COLORS)),
                    Value::Text(tp),
                    Value::Int(size.gen_range(1..=50)),
                    Value::Text(ct),
                ]
            })
            .collect())
    }
}

pub(crate) struct DateSource {
    pub calendar: Calendar,
    pub chunk_rows: u64,
}

impl ChunkSource for DateSource {
    fn total_rows(&self) -> u64 {
        self.calendar.days()
    }
    fn chunk_rows(&self) -> u64 {
        self.chunk_rows
    }
    fn chunk(&self, c: u64) -> Result<Vec<Row>, GenError> {
        Ok(chunk_range(c, self.chunk_rows, self.total_rows())
            .map(|i| date_row(self.calendar.date_at(i)))
            .collect())
    }
}

pub(crate) struct LineorderSource {
    pub seed: u64,
    pub sizes: SsbSizes,
    pub calendar: Calendar,
    /// Always a multiple of [`LINES_PER_ORDER`] so orders never straddle chunks.
    pub chunk_rows: u64,
    pub materialize_profit: bool,
}

impl LineorderSource {
    /// Fact rows of one chunk, with derived fields filled in.
    pub fn fact_rows(&self, c: u64) -> Result<Vec<FactRow>, GenError> {
        let range = chunk_range(c, self.chunk_rows, self.sizes.lineorders);
        if range.is_empty() {
            return Ok(Vec::new());
        }
        let s = |col| substream(self.seed, "LINEORDER", col, c);
        let (mut cust, mut odate, mut prio) =
            (s("LO_CUSTKEY"), s("LO_ORDERDATE"), s("LO_ORDERPRIORITY"));
        let (mut part, mut supp, mut qty, mut disc, mut tax, mut commit, mut mode) = (
            s("LO_PARTKEY"),
            s("LO_SUPPKEY"),
            s("LO_QUANTITY"),
            s("LO_DISCOUNT"),
            s("LO_TAX"),
            s("LO_COMMITDATE"),
            s("LO_SHIPMODE"),
        );
        let days = self.calendar.days();
        let mut out = Vec::with_capacity((range.end - range.start) as usize);
        let first_order = range.start / LINES_PER_ORDER;
        let last_order = (range.end - 1) / LINES_PER_ORDER;
        for o in first_order..=last_order {
            let custkey = cust.gen_range(1..=self.sizes.customers) as i64;
            let day = odate.gen_range(0..days);
            let orderdate = datekey(self.calendar.date_at(day));
            let orderpriority = PRIORITIES[prio.gen_range(0..PRIORITIES.len())];
            let order_start = out.len();
            let mut total = 0i64;
            for l in 0..LINES_PER_ORDER {
                let row = o * LINES_PER_ORDER + l;
                if row >= range.end {
                    break;
                }
                let partkey = part.gen_range(1..=self.sizes.parts) as i64;
                let suppkey = supp.gen_range(1..=self.sizes.suppliers) as i64;
                let quantity = qty.gen_range(QUANTITY_RANGE.0..=QUANTITY_RANGE.1);
                let discount = disc.gen_range(DISCOUNT_RANGE.0..=DISCOUNT_RANGE.1);
                let tax_pct = tax.gen_range(TAX_RANGE.0..=TAX_RANGE.1);
                // wraps to the calendar start so every commit date is a dimension key
                let lag = commit.gen_range(COMMIT_LAG_DAYS.0..=COMMIT_LAG_DAYS.1);
                let commitdate = datekey(self.calendar.date_at((day + lag) % days));
                let shipmode = SHIP_MODES[mode.gen_range(0..SHIP_MODES.len())];
                let price = retail_price_cents(partkey);
                let extendedprice = quantity * price;
                let revenue = extendedprice * (100 - discount) / 100;
                total += revenue * (100 + tax_pct) / 100;
                out.push(derive_row_fields(PartialFactRow {
                    orderkey: o as i64 + 1,
                    linenumber: l as i64 + 1,
                    custkey,
                    partkey,
                    suppkey,
                    orderdate,
                    orderpriority,
                    shippriority: 0,
                    quantity,
                    extendedprice,
                    ordtotalprice: 0,
                    discount,
                    revenue,
                    supplycost: price * 6 / 10,
                    tax: tax_pct,
                    commitdate,
                    shipmode,
                })?);
            }
            for r in &mut out[order_start..] {
                r.base.ordtotalprice = total;
            }
        }
        Ok(out)
    }
}

impl ChunkSource for LineorderSource {
    fn total_rows(&self) -> u64 {
        self.sizes.lineorders
    }
    fn chunk_rows(&self) -> u64 {
        self.chunk_rows
    }
    fn chunk(&self, c: u64) -> Result<Vec<Row>, GenError> {
        Ok(self
            .fact_rows(c)?
            .iter()
            .map(|r| r.to_row(self.materialize_profit))
            .collect())
    }
}
