//! Label and column typing: numbers, supported date patterns, or categories.

use alloc::string::String;
use core::fmt;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FieldType {
    Categorical,
    Quantitative,
    Date,
}

impl FieldType {
    pub fn name(self) -> &'static str {
        match self {
            FieldType::Categorical => "Categorical",
            FieldType::Quantitative => "Quantitative",
            FieldType::Date => "Date",
        }
    }

    /// Grouping levels accept categorical or date fields.
    pub fn is_discrete(self) -> bool {
        matches!(self, FieldType::Categorical | FieldType::Date)
    }
}

impl fmt::Display for FieldType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Classifies a non-empty list of labels. Dates are checked before numbers
/// so that bare years read as dates.
pub fn infer_field_type<S: AsRef<str>>(labels: &[S]) -> FieldType {
    let labels: alloc::vec::Vec<&str> = labels
        .iter()
        .map(|s| s.as_ref().trim())
        .filter(|s| !s.is_empty())
        .collect();
    if labels.is_empty() {
        return FieldType::Categorical;
    }
    for pattern in DatePattern::ALL {
        if labels.iter().all(|l| pattern.matches(l)) {
            return FieldType::Date;
        }
    }
    if labels.iter().all(|l| parse_number(l).is_some()) {
        return FieldType::Quantitative;
    }
    FieldType::Categorical
}

/// Parses a numeric label: thousands separators, currency prefixes, percent
/// suffixes and the unicode minus are tolerated.
pub fn parse_number(s: &str) -> Option<f64> {
    let mut t = String::with_capacity(s.len());
    for c in s.trim().chars() {
        match c {
            ',' | ' ' | '\u{a0}' => {}
            '\u{2212}' => t.push('-'),
            _ => t.push(c),
        }
    }
    let t = t.trim_start_matches(['$', '€', '£']);
    let t = t.strip_suffix('%').unwrap_or(t);
    if t.is_empty()
        || t.chars()
            .any(|c| c.is_ascii_alphabetic() && c != 'e' && c != 'E')
    {
        return None;
    }
    t.parse::<f64>().ok().filter(|v| v.is_finite())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum DatePattern {
    Year,
    Iso,
    MonthName,
    MonthDayYear,
}

impl DatePattern {
    const ALL: [DatePattern; 4] = [
        DatePattern::Year,
        DatePattern::Iso,
        DatePattern::MonthName,
        DatePattern::MonthDayYear,
    ];

    fn matches(self, s: &str) -> bool {
        match self {
            DatePattern::Year => is_year(s),
            DatePattern::Iso => is_iso(s),
            DatePattern::MonthName => is_month_name(s),
            DatePattern::MonthDayYear => is_mdy(s),
        }
    }
}

fn digits(s: &str, n: usize) -> Option<u32> {
    (s.len() == n && s.bytes().all(|b| b.is_ascii_digit()))
        .then(|| s.parse().ok())
        .flatten()
}

fn is_year(s: &str) -> bool {
    digits(s, 4).is_some_and(|y| (1000..=2999).contains(&y))
}

fn is_iso(s: &str) -> bool {
    let mut parts = s.split('-');
    let (Some(y), Some(m)) = (parts.next(), parts.next()) else {
        return false;
    };
    if !is_year(y) || !digits(m, 2).is_some_and(|m| (1..=12).contains(&m)) {
        return false;
    }
    match (parts.next(), parts.next()) {
        (None, _) => true,
        (Some(d), None) => {
            let d = d.split('T').next().unwrap_or(d);
            digits(d, 2).is_some_and(|d| (1..=31).contains(&d))
        }
        _ => false,
    }
}

const MONTHS: [&str; 12] = [
    "january",
    "february",
    "march",
    "april",
    "may",
    "june",
    "july",
    "august",
    "september",
    "october",
    "november",
    "december",
];

/// Month index (0-based) of a full or three-letter month name.
pub fn month_index(s: &str) -> Option<usize> {
    let l = s.trim().trim_end_matches('.').to_ascii_lowercase();
    if l.len() < 3 {
        return None;
    }
    MONTHS
        .iter()
        .position(|m| *m == l || (l.len() <= 4 && m.starts_with(l.as_str())))
}

fn is_month_name(s: &str) -> bool {
    let mut words = s.split_whitespace();
    let Some(first) = words.next() else {
        return false;
    };
    if month_index(first).is_none() {
        return false;
    }
    match (words.next(), words.next()) {
        (None, _) => true,
        (Some(y), None) => {
            is_year(y.trim_start_matches('\'')) || digits(y.trim_start_matches('\''), 2).is_some()
        }
        _ => false,
    }
}

fn is_mdy(s: &str) -> bool {
    let parts: alloc::vec::Vec<&str> = s.split('/').collect();
    if parts.len() != 3 {
        return false;
    }
    let num = |p: &str| (1..=2).contains(&p.len()) && p.bytes().all(|b| b.is_ascii_digit());
    num(parts[0])
        && num(parts[1])
        && parts[0].parse::<u32>().is_ok_and(|m| (1..=12).contains(&m))
        && parts[1].parse::<u32>().is_ok_and(|d| (1..=31).contains(&d))
        && is_year(parts[2])
}
