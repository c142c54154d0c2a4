use chrono::{Datelike, Duration, NaiveDate, Weekday};
use serde::{Deserialize, Serialize};

use crate::value::Value;

/// Inclusive date range backing the date dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Calendar {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl Default for Calendar {
    /// Seven consecutive years, 1992-01-01 through 1998-12-31.
    fn default() -> Self {
        Self {
            start: NaiveDate::from_ymd_opt(1992, 1, 1).expect("valid date"),
            end: NaiveDate::from_ymd_opt(1998, 12, 31).expect("valid date"),
        }
    }
}

const HOLIDAYS: [(u32, u32); 6] = [(1, 1), (5, 30), (7, 4), (11, 11), (12, 24), (12, 25)];

impl Calendar {
    pub fn new(start: NaiveDate, end: NaiveDate) -> Self {
        Self { start, end }
    }

    pub fn days(&self) -> u64 {
        (self.end - self.start).num_days().max(-1) as u64 + 1
    }

    pub fn date_at(&self, index: u64) -> NaiveDate {
        self.start + Duration::days(index as i64)
    }

    pub fn iter(&self) -> impl Iterator<Item = NaiveDate> + '_ {
        (0..self.days()).map(|i| self.date_at(i))
    }

    pub fn years(&self) -> std::ops::RangeInclusive<i32> {
        self.start.year()..=self.end.year()
    }
}

pub fn datekey(d: NaiveDate) -> i64 {
    i64::from(d.year()) * 10_000 + i64::from(d.month()) * 100 + i64::from(d.day())
}

pub fn week_of_year(d: NaiveDate) -> u32 {
    (d.ordinal() - 1) / 7 + 1
}

pub fn year_month_label(d: NaiveDate) -> String {
    d.format("%b%Y").to_string()
}

fn selling_season(month: u32) -> &'static str {
    match month {
        12 => "Christmas",
        1 | 2 => "Winter",
        3..=5 => "Spring",
        6..=8 => "Summer",
        _ => "Fall",
    }
}

/// Date-dimension row in catalog column order.
pub fn date_row(d: NaiveDate) -> Vec<Value> {
    let weekday = d.weekday();
    let last_in_month = (d + Duration::days(1)).month() != d.month();
    let holiday = HOLIDAYS.contains(&(d.month(), d.day()));
    let weekday_fl = !matches!(weekday, Weekday::Sat | Weekday::Sun);
    vec![
        Value::Int(datekey(d)),
        Value::Text(d.format("%B %-d, %Y").to_string()),
        Value::Text(d.format("%A").to_string()),
        Value::Text(d.format("%B").to_string()),
        Value::Int(i64::from(d.year())),
        Value::Int(i64::from(d.year()) * 100 + i64::from(d.month())),
        Value::Text(year_month_label(d)),
        Value::Int(i64::from(weekday.number_from_sunday())),
        Value::Int(i64::from(d.day())),
        Value::Int(i64::from(d.ordinal())),
        Value::Int(i64::from(d.month())),
        Value::Int(i64::from(week_of_year(d))),
        Value::text(selling_season(d.month())),
        Value::Int(i64::from(weekday == Weekday::Sat)),
        Value::Int(i64::from(last_in_month)),
        Value::Int(i64::from(holiday)),
        Value::Int(i64::from(weekday_fl)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_calendar_has_seven_years() {
        let c = Calendar::default();
        // oracle: count day by day
        let mut n = 0;
        let mut d = c.start;
        while d <= c.end {
            n += 1;
            d = d.succ_opt().unwrap();
        }
        assert_eq!(c.days(), n);
        assert_eq!(n, 2557);
        assert_eq!(c.years().count(), 7);
    }

    #[test]
    fn date_row_fields() {
        let d = NaiveDate::from_ymd_opt(1992, 1, 1).unwrap();
        let r = date_row(d);
        assert_eq!(r[0], Value::Int(19920101));
        assert_eq!(r[1], Value::text("January 1, 1992"));
        assert_eq!(r[2], Value::text("Wednesday"));
        assert_eq!(r[6], Value::text("Jan1992"));
        assert_eq!(r[7], Value::Int(4));
        assert_eq!(r[11], Value::Int(1));
        assert_eq!(r[15], Value::Int(1));
        let dec31 = date_row(NaiveDate::from_ymd_opt(1997, 12, 31).unwrap());
        assert_eq!(dec31[14], Value::Int(1));
        assert_eq!(dec31[12], Value::text("Christmas"));
        assert_eq!(dec31[6], Value::text("Dec1997"));
    }

    #[test]
    fn week_six_has_seven_days_every_year() {
        let c = Calendar::default();
        for y in c.years() {
            let n = c
                .iter()
                .filter(|d| d.year() == y && week_of_year(*d) == 6)
                .count();
            assert_eq!(n, 7);
        }
    }
}
