//! Dimension hierarchies: region → nation → city, mfgr → category → brand.

use serde::{Deserialize, Serialize};

pub const REGIONS: [&str; 5] = ["AFRICA", "AMERICA", "ASIA", "EUROPE", "MIDDLE EAST"];

/// TPC-H nations with their region index.
pub const NATIONS: [(&str, usize); 25] = [
    ("ALGERIA", 0),
    ("ARGENTINA", 1),
    ("BRAZIL", 1),
    ("CANADA", 1),
    ("EGYPT", 4),
    ("ETHIOPIA", 0),
    ("FRANCE", 3),
    ("GERMANY", 3),
    ("INDIA", 2),
    ("INDONESIA", 2),
    ("IRAN", 4),
    ("IRAQ", 4),
    ("JAPAN", 2),
    ("JORDAN", 4),
    ("KENYA", 0),
    ("MOROCCO", 0),
    ("MOZAMBIQUE", 0),
    ("PERU", 1),
    ("CHINA", 2),
    ("ROMANIA", 3),
    ("SAUDI ARABIA", 4),
    ("VIETNAM", 2),
    ("RUSSIA", 3),
    ("UNITED KINGDOM", 3),
    ("UNITED STATES", 1),
];

pub const CITIES_PER_NATION: u32 = 10;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HierarchyLevel {
    pub name: String,
    pub fan_out: u32,
}

/// Ordered levels, root first; `fan_out` is the number of children per
/// parent (for the root, the number of roots).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HierarchySpec {
    pub levels: Vec<HierarchyLevel>,
}

impl HierarchySpec {
    fn of(levels: &[(&str, u32)]) -> Self {
        Self {
            levels: levels
                .iter()
                .map(|(n, f)| HierarchyLevel {
                    name: n.to_string(),
                    fan_out: *f,
                })
                .collect(),
        }
    }

    pub fn geography() -> Self {
        Self::of(&[("region", 5), ("nation", 5), ("city", CITIES_PER_NATION)])
    }

    pub fn part() -> Self {
        Self::of(&[("mfgr", 5), ("category", 5), ("brand", 40)])
    }

    pub fn leaf_count(&self) -> u64 {
        self.levels.iter().map(|l| u64::from(l.fan_out)).product()
    }

    pub fn fan_out(&self, level: &str) -> Option<u32> {
        self.levels.iter().find(|l| l.name == level).map(|l| l.fan_out)
    }
}

pub fn nation_name(nation: usize) -> &'static str {
    NATIONS[nation].0
}

pub fn region_of_nation(nation: usize) -> &'static str {
    REGIONS[NATIONS[nation].1]
}

/// First nine characters of the nation name, space padded, plus a digit.
pub fn city_label(nation: usize, digit: u32) -> String {
    format!("{:<9.9}{}", nation_name(nation), digit)
}

pub fn all_cities() -> Vec<String> {
    (0..NATIONS.len())
        .flat_map(|n| (0..CITIES_PER_NATION).map(move |d| city_label(n, d)))
        .collect()
}

pub fn mfgr_label(m: u32) -> String {
    format!("MFGR#{m}")
}

pub fn category_label(m: u32, c: u32) -> String {
    format!("MFGR#{m}{c}")
}

pub fn brand_label(m: u32, c: u32, b: u32) -> String {
    format!("MFGR#{m}{c}{b:02}")
}

/// `(mfgr, category, brand)` labels of the whole part hierarchy.
pub fn part_labels(spec: &HierarchySpec) -> Vec<(String, String, String)> {
    let fm = spec.fan_out("mfgr").unwrap_or(5);
    let fc = spec.fan_out("category").unwrap_or(5);
    let fb = spec.fan_out("brand").unwrap_or(40);
    let mut out = Vec::new();
    for m in 1..=fm {
        for c in 1..=fc {
            for b in 1..=fb {
                out.push((mfgr_label(m), category_label(m, c), brand_label(m, c, b)));
            }
        }
    }
    out
}

pub const COLORS: [&str; 92] = [
    "almond", "antique", "aquamarine", "azure", "beige", "bisque", "black", "blanched", "blue",
    "blush", "brown", "burlywood", "burnished", "chartreuse", "chiffon", "chocolate", "coral",
    "cornflower", "cornsilk", "cream", "cyan", "dark", "deep", "dim", "dodger", "drab",
    "firebrick", "floral", "forest", "frosted", "gainsboro", "ghost", "goldenrod", "green",
    "grey", "honeydew", "hot", "indian", "ivory", "khaki", "lace", "lavender", "lawn", "lemon",
    "light", "lime", "linen", "magenta", "maroon", "medium", "metallic", "midnight", "mint",
    "misty", "moccasin", "navajo", "navy", "olive", "orange", "orchid", "pale", "papaya",
    "peach", "peru", "pink", "plum", "powder", "puff", "purple", "red", "rose", "rosy", "royal",
    "saddle", "salmon", "sandy", "seashell", "sienna", "sky", "slate", "smoke", "snow", "spring",
    "steel", "tan", "thistle", "tomato", "turquoise", "violet", "wheat", "white", "yellow",
];

pub const TYPE_S1: [&str; 6] = ["STANDARD", "SMALL", "MEDIUM", "LARGE", "ECONOMY", "PROMO"];
pub const TYPE_S2: [&str; 5] = ["ANODIZED", "BURNISHED", "PLATED", "POLISHED", "BRUSHED"];
pub const TYPE_S3: [&str; 5] = ["TIN", "NICKEL", "BRASS", "STEEL", "COPPER"];
pub const CONTAINER_S1: [&str; 5] = ["SM", "LG", "MED", "JUMBO", "WRAP"];
pub const CONTAINER_S2: [&str; 8] = ["CASE", "BOX", "BAG", "JAR", "PKG", "PACK", "CAN", "DRUM"];
pub const SEGMENTS: [&str; 5] = ["AUTOMOBILE", "BUILDING", "FURNITURE", "MACHINERY", "HOUSEHOLD"];
pub const PRIORITIES: [&str; 5] = ["1-URGENT", "2-HIGH", "3-MEDIUM", "4-NOT SPECI", "5-LOW"];
pub const SHIP_MODES: [&str; 7] = ["REG AIR", "AIR", "RAIL", "SHIP", "TRUCK", "MAIL", "FOB"];
pub const SHIP_INSTRUCT: [&str; 4] = [
    "DELIVER IN PERSON",
    "COLLECT COD",
    "NONE",
    "TAKE BACK RETURN",
];

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn five_nations_per_region() {
        let mut per_region = HashMap::new();
        for (_, r) in NATIONS {
            *per_region.entry(r).or_insert(0) += 1;
        }
        assert_eq!(per_region.len(), 5);
        assert!(per_region.values().all(|&n| n == 5));
        assert_eq!(HierarchySpec::geography().leaf_count(), 250);
    }

    #[test]
    fn city_labels() {
        assert_eq!(city_label(23, 1), "UNITED KI1");
        assert_eq!(city_label(24, 5), "UNITED ST5");
        assert_eq!(city_label(11, 0), "IRAQ     0");
        let cities = all_cities();
        assert_eq!(cities.len(), 250);
        // city -> nation is a function: labels are unique
        let unique: std::collections::HashSet<_> = cities.iter().collect();
        assert_eq!(unique.len(), 250);
    }

    #[test]
    fn part_labels_nest() {
        let labels = part_labels(&HierarchySpec::part());
        assert_eq!(labels.len(), 1000);
        for (m, c, b) in &labels {
            assert!(c.starts_with(m.as_str()));
            assert!(b.starts_with(c.as_str()));
        }
        assert_eq!(brand_label(2, 2, 21), "MFGR#2221");
    }
}
