use super::{
    CatalogVariant, ColumnDef, ForeignKey, LogicalType, Provenance, SchemaCatalog, TableDef,
    TableKind,
};
use LogicalType::*;

/// `DATE` is reserved in most SQL dialects.
pub const DEFAULT_DATE_TABLE: &str = "DIM_DATE";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SsbOptions {
    pub date_table: String,
    /// Store `LO_PROFIT` instead of exposing it as `LO_REVENUE - LO_SUPPLYCOST`.
    pub materialize_profit: bool,
}

impl Default for SsbOptions {
    fn default() -> Self {
        Self {
            date_table: DEFAULT_DATE_TABLE.to_string(),
            materialize_profit: false,
        }
    }
}

pub fn build_ssb_catalog() -> SchemaCatalog {
    build_ssb_catalog_with(&SsbOptions::default())
}

fn col(name: &str, ty: LogicalType) -> ColumnDef {
    ColumnDef::new(name, ty)
}

fn fk(column: &str, table: &str, target: &str) -> ForeignKey {
    ForeignKey {
        columns: vec![column.to_string()],
        references_table: table.to_string(),
        references_columns: vec![target.to_string()],
    }
}

pub fn build_ssb_catalog_with(opts: &SsbOptions) -> SchemaCatalog {
    let date = opts.date_table.as_str();
    let mut profit = col("LO_PROFIT", LogicalType::MONEY);
    if !opts.materialize_profit {
        profit.expression = Some("LO_REVENUE - LO_SUPPLYCOST".to_string());
    }

    let lineorder = TableDef {
        name: "LINEORDER".into(),
        kind: TableKind::Fact,
        columns: vec![
            col("LO_ORDERKEY", Integer).from_source("ORDERS", "O_ORDERKEY"),
            col("LO_LINENUMBER", Integer).from_source("LINEITEM", "L_LINENUMBER"),
            col("LO_CUSTKEY", Integer).from_source("ORDERS", "O_CUSTKEY"),
            col("LO_PARTKEY", Integer).from_source("LINEITEM", "L_PARTKEY"),
            col("LO_SUPPKEY", Integer).from_source("LINEITEM", "L_SUPPKEY"),
            col("LO_ORDERDATE", Integer).from_source("ORDERS", "O_ORDERDATE"),
            col("LO_ORDERPRIORITY", FixedText(15)).from_source("ORDERS", "O_ORDERPRIORITY"),
            col("LO_SHIPPRIORITY", Integer).from_source("ORDERS", "O_SHIPPRIORITY"),
            col("LO_QUANTITY", Integer).from_source("LINEITEM", "L_QUANTITY"),
            col("LO_EXTENDEDPRICE", LogicalType::MONEY)
                .from_source("LINEITEM", "L_EXTENDEDPRICE"),
            col("LO_ORDTOTALPRICE", LogicalType::MONEY).from_source("ORDERS", "O_TOTALPRICE"),
            col("LO_DISCOUNT", Integer).from_source("LINEITEM", "L_DISCOUNT"),
            col("LO_REVENUE", LogicalType::MONEY),
            col("LO_SUPPLYCOST", LogicalType::MONEY),
            col("LO_TAX", Integer).from_source("LINEITEM", "L_TAX"),
            col("LO_COMMITDATE", Integer).from_source("LINEITEM", "L_COMMITDATE"),
            col("LO_SHIPMODE", FixedText(10)).from_source("LINEITEM", "L_SHIPMODE"),
            profit,
        ],
        primary_key: vec!["LO_ORDERKEY".into(), "LO_LINENUMBER".into()],
        foreign_keys: vec![
            fk("LO_CUSTKEY", "CUSTOMER", "C_CUSTKEY"),
            fk("LO_PARTKEY", "PART", "P_PARTKEY"),
            fk("LO_SUPPKEY", "SUPPLIER", "S_SUPPKEY"),
            fk("LO_ORDERDATE", date, "D_DATEKEY"),
            fk("LO_COMMITDATE", date, "D_DATEKEY"),
        ],
        provenance: Provenance::Merged {
            from: vec!["LINEITEM".into(), "ORDERS".into()],
        },
        note: "merge of LINEITEM and ORDERS; one row per LINEITEM row".into(),
    };

    let customer = TableDef {
        name: "CUSTOMER".into(),
        kind: TableKind::Dimension,
        columns: vec![
            col("C_CUSTKEY", Integer).from_source("CUSTOMER", "C_CUSTKEY"),
            col("C_NAME", VarText(25)).from_source("CUSTOMER", "C_NAME"),
            col("C_ADDRESS", VarText(25)).from_source("CUSTOMER", "C_ADDRESS"),
            col("C_CITY", FixedText(10)),
            col("C_NATION", FixedText(15)).from_source("NATION", "N_NAME"),
            col("C_REGION", FixedText(12)).from_source("REGION", "R_NAME"),
            col("C_PHONE", FixedText(15)).from_source("CUSTOMER", "C_PHONE"),
            col("C_MKTSEGMENT", FixedText(10)).from_source("CUSTOMER", "C_MKTSEGMENT"),
        ],
        primary_key: vec!["C_CUSTKEY".into()],
        foreign_keys: vec![],
        provenance: Provenance::Carried {
            from: "CUSTOMER".into(),
            denormalized: vec!["NATION".into(), "REGION".into()],
        },
        note: "NATION and REGION folded in; CITY added".into(),
    };

    let supplier = TableDef {
        name: "SUPPLIER".into(),
        kind: TableKind::Dimension,
        columns: vec![
            col("S_SUPPKEY", Integer).from_source("SUPPLIER", "S_SUPPKEY"),
            col("S_NAME", FixedText(25)).from_source("SUPPLIER", "S_NAME"),
            col("S_ADDRESS", VarText(25)).from_source("SUPPLIER", "S_ADDRESS"),
            col("S_CITY", FixedText(10)),
            col("S_NATION", FixedText(15)).from_source("NATION", "N_NAME"),
            col("S_REGION", FixedText(12)).from_source("REGION", "R_NAME"),
            col("S_PHONE", FixedText(15)).from_source("SUPPLIER", "S_PHONE"),
        ],
        primary_key: vec!["S_SUPPKEY".into()],
        foreign_keys: vec![],
        provenance: Provenance::Carried {
            from: "SUPPLIER".into(),
            denormalized: vec!["NATION".into(), "REGION".into()],
        },
        note: "NATION and REGION folded in; CITY added".into(),
    };

    let part = TableDef {
        name: "PART".into(),
        kind: TableKind::Dimension,
        columns: vec![
            col("P_PARTKEY", Integer).from_source("PART", "P_PARTKEY"),
            col("P_NAME", VarText(22)).from_source("PART", "P_NAME"),
            col("P_MFGR", FixedText(6)).from_source("PART", "P_MFGR"),
            col("P_CATEGORY", FixedText(7)),
            col("P_BRAND1", FixedText(9)).from_source("PART", "P_BRAND"),
            col("P_COLOR", VarText(11)),
            col("P_TYPE", VarText(25)).from_source("PART", "P_TYPE"),
            col("P_SIZE", Integer).from_source("PART", "P_SIZE"),
            col("P_CONTAINER", FixedText(10)).from_source("PART", "P_CONTAINER"),
        ],
        primary_key: vec!["P_PARTKEY".into()],
        foreign_keys: vec![],
        provenance: Provenance::Carried {
            from: "PART".into(),
            denormalized: vec![],
        },
        note: "mfgr/category/brand hierarchy".into(),
    };

    let date_dim = TableDef {
        name: date.to_string(),
        kind: TableKind::Dimension,
        columns: vec![
            col("D_DATEKEY", Integer),
            col("D_DATE", FixedText(18)),
            col("D_DAYOFWEEK", FixedText(9)),
            col("D_MONTH", FixedText(9)),
            col("D_YEAR", Integer),
            col("D_YEARMONTHNUM", Integer),
            col("D_YEARMONTH", FixedText(7)),
            col("D_DAYNUMINWEEK", Integer),
            col("D_DAYNUMINMONTH", Integer),
            col("D_DAYNUMINYEAR", Integer),
            col("D_MONTHNUMINYEAR", Integer),
            col("D_WEEKNUMINYEAR", Integer),
            col("D_SELLINGSEASON", VarText(12)),
            col("D_LASTDAYINWEEKFL", Integer),
            col("D_LASTDAYINMONTHFL", Integer),
            col("D_HOLIDAYFL", Integer),
            col("D_WEEKDAYFL", Integer),
        ],
        primary_key: vec!["D_DATEKEY".into()],
        foreign_keys: vec![],
        provenance: Provenance::Added,
        note: "calendar dimension; physical name avoids the DATE keyword".into(),
    };

    SchemaCatalog {
        name: "ssb".into(),
        variant: CatalogVariant::Ssb,
        tables: vec![lineorder, customer, supplier, part, date_dim],
    }
}
