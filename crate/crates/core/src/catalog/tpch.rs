use super::{
    CatalogVariant, ColumnDef, ForeignKey, LogicalType, Provenance, SchemaCatalog, TableDef,
    TableKind,
};
use LogicalType::*;

fn table(name: &str, kind: TableKind, cols: &[(&str, LogicalType)], pk: &[&str]) -> TableDef {
    TableDef {
        name: name.to_string(),
        kind,
        columns: cols.iter().map(|(n, t)| ColumnDef::new(n, *t)).collect(),
        primary_key: pk.iter().map(|s| s.to_string()).collect(),
        foreign_keys: vec![],
        provenance: Provenance::Original,
        note: String::new(),
    }
}

fn fk(cols: &[&str], target: &str, target_cols: &[&str]) -> ForeignKey {
    ForeignKey {
        columns: cols.iter().map(|s| s.to_string()).collect(),
        references_table: target.to_string(),
        references_columns: target_cols.iter().map(|s| s.to_string()).collect(),
    }
}

/// The eight TPC-H tables, used for schema diffs and for hosting the
/// reference queries that the SSB flights are compared against.
pub fn build_tpch_reference_catalog() -> SchemaCatalog {
    const M: LogicalType = LogicalType::MONEY;
    let region = table(
        "REGION",
        TableKind::Dimension,
        &[
            ("R_REGIONKEY", Integer),
            ("R_NAME", FixedText(25)),
            ("R_COMMENT", VarText(152)),
        ],
        &["R_REGIONKEY"],
    );
    let mut nation = table(
        "NATION",
        TableKind::Dimension,
        &[
            ("N_NATIONKEY", Integer),
            ("N_NAME", FixedText(25)),
            ("N_REGIONKEY", Integer),
            ("N_COMMENT", VarText(152)),
        ],
        &["N_NATIONKEY"],
    );
    nation.foreign_keys = vec![fk(&["N_REGIONKEY"], "REGION", &["R_REGIONKEY"])];
    let part = table(
        "PART",
        TableKind::Dimension,
        &[
            ("P_PARTKEY", Integer),
            ("P_NAME", VarText(55)),
            ("P_MFGR", FixedText(25)),
            ("P_BRAND", FixedText(10)),
            ("P_TYPE", VarText(25)),
            ("P_SIZE", Integer),
            ("P_CONTAINER", FixedText(10)),
            ("P_RETAILPRICE", M),
            ("P_COMMENT", VarText(23)),
        ],
        &["P_PARTKEY"],
    );
    let mut supplier = table(
        "SUPPLIER",
        TableKind::Dimension,
        &[
            ("S_SUPPKEY", Integer),
            ("S_NAME", FixedText(25)),
            ("S_ADDRESS", VarText(40)),
            ("S_NATIONKEY", Integer),
            ("S_PHONE", FixedText(15)),
            ("S_ACCTBAL", M),
            ("S_COMMENT", VarText(101)),
        ],
        &["S_SUPPKEY"],
    );
    supplier.foreign_keys = vec![fk(&["S_NATIONKEY"], "NATION", &["N_NATIONKEY"])];
    let mut partsupp = table(
        "PARTSUPP",
        TableKind::Fact,
        &[
            ("PS_PARTKEY", Integer),
            ("PS_SUPPKEY", Integer),
            ("PS_AVAILQTY", Integer),
            ("PS_SUPPLYCOST", M),
            ("PS_COMMENT", VarText(199)),
        ],
        &["PS_PARTKEY", "PS_SUPPKEY"],
    );
    partsupp.foreign_keys = vec![
        fk(&["PS_PARTKEY"], "PART", &["P_PARTKEY"]),
        fk(&["PS_SUPPKEY"], "SUPPLIER", &["S_SUPPKEY"]),
    ];
    let mut customer = table(
        "CUSTOMER",
        TableKind::Dimension,
        &[
            ("C_CUSTKEY", Integer),
            ("C_NAME", VarText(25)),
            ("C_ADDRESS", VarText(40)),
            ("C_NATIONKEY", Integer),
            ("C_PHONE", FixedText(15)),
            ("C_ACCTBAL", M),
            ("C_MKTSEGMENT", FixedText(10)),
            ("C_COMMENT", VarText(117)),
        ],
        &["C_CUSTKEY"],
    );
    customer.foreign_keys = vec![fk(&["C_NATIONKEY"], "NATION", &["N_NATIONKEY"])];
    let mut orders = table(
        "ORDERS",
        TableKind::Fact,
        &[
            ("O_ORDERKEY", Integer),
            ("O_CUSTKEY", Integer),
            ("O_ORDERSTATUS", FixedText(1)),
            ("O_TOTALPRICE", M),
            ("O_ORDERDATE", CalendarDate),
            ("O_ORDERPRIORITY", FixedText(15)),
            ("O_CLERK", FixedText(15)),
            ("O_SHIPPRIORITY", Integer),
            ("O_COMMENT", VarText(79)),
        ],
        &["O_ORDERKEY"],
    );
    orders.foreign_keys = vec![fk(&["O_CUSTKEY"], "CUSTOMER", &["C_CUSTKEY"])];
    let mut lineitem = table(
        "LINEITEM",
        TableKind::Fact,
        &[
            ("L_ORDERKEY", Integer),
            ("L_PARTKEY", Integer),
            ("L_SUPPKEY", Integer),
            ("L_LINENUMBER", Integer),
            ("L_QUANTITY", M),
            ("L_EXTENDEDPRICE", M),
            ("L_DISCOUNT", M),
            ("L_TAX", M),
            ("L_RETURNFLAG", FixedText(1)),
            ("L_LINESTATUS", FixedText(1)),
            ("L_SHIPDATE", CalendarDate),
            ("L_COMMITDATE", CalendarDate),
            ("L_RECEIPTDATE", CalendarDate),
            ("L_SHIPINSTRUCT", FixedText(25)),
            ("L_SHIPMODE", FixedText(10)),
            ("L_COMMENT", VarText(44)),
        ],
        &["L_ORDERKEY", "L_LINENUMBER"],
    );
    lineitem.foreign_keys = vec![
        fk(&["L_ORDERKEY"], "ORDERS", &["O_ORDERKEY"]),
        fk(
            &["L_PARTKEY", "L_SUPPKEY"],
            "PARTSUPP",
            &["PS_PARTKEY", "PS_SUPPKEY"],
        ),
    ];

    SchemaCatalog {
        name: "tpch".into(),
        variant: CatalogVariant::TpchReference,
        tables: vec![
            part, supplier, partsupp, customer, orders, lineitem, nation, region,
        ],
    }
}
