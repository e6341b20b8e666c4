//! Check-in records, per-student tables, CSV ingestion and time windows.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Location token used for library entries, whose CSV rows carry no location column.
pub const LIBRARY_LOCATION: &str = "LIBRARY";

/// Swipes by one student at one location closer than this are collapsed.
pub const DUPLICATE_SWIPE_SECONDS: i64 = 60;

/// Default minimum number of in-window records for a student to count as valid.
pub const DEFAULT_MIN_RECORDS: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EventRecord {
    pub student_id: String,
    pub location_id: String,
    /// Seconds since the Unix epoch, UTC.
    pub timestamp: i64,
}

impl EventRecord {
    pub fn new(
        student_id: impl Into<String>,
        location_id: impl Into<String>,
        timestamp: i64,
    ) -> Result<Self> {
        let rec = EventRecord {
            student_id: student_id.into(),
            location_id: location_id.into(),
            timestamp,
        };
        if rec.student_id.is_empty() {
            return Err(invalid("empty student id"));
        }
        if rec.location_id.is_empty() {
            return Err(invalid("empty location id"));
        }
        if rec.timestamp <= 0 {
            return Err(invalid(format!("non-positive timestamp {}", rec.timestamp)));
        }
        Ok(rec)
    }
}

/// Half-open interval `[start, end)` of epoch seconds with a display label.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TimeWindow {
    pub start: i64,
    pub end: i64,
    pub label: String,
}

impl TimeWindow {
    pub fn new(start: i64, end: i64, label: impl Into<String>) -> Result<Self> {
        if start >= end {
            return Err(invalid(format!("empty window [{start}, {end})")));
        }
        Ok(TimeWindow {
            start,
            end,
            label: label.into(),
        })
    }

    #[inline]
    pub fn contains(&self, timestamp: i64) -> bool {
        self.start <= timestamp && timestamp < self.end
    }

    pub fn overlaps(&self, other: &TimeWindow) -> bool {
        self.start < other.end && other.start < self.end
    }

    /// Calendar month in UTC, labelled `YYYY-MM`.
    pub fn calendar_month(year: i32, month: u32) -> Result<Self> {
        let first = NaiveDate::from_ymd_opt(year, month, 1)
            .ok_or_else(|| invalid(format!("no such month {year}-{month:02}")))?;
        let next = if month == 12 {
            NaiveDate::from_ymd_opt(year + 1, 1, 1)
        } else {
            NaiveDate::from_ymd_opt(year, month + 1, 1)
        }
        .ok_or_else(|| invalid(format!("month after {year}-{month:02} out of range")))?;
        TimeWindow::new(
            midnight_epoch(first),
            midnight_epoch(next),
            format!("{year:04}-{month:02}"),
        )
    }

    /// Parses a `YYYY-MM` label into its calendar-month window.
    pub fn parse_month(label: &str) -> Result<Self> {
        let (y, m) = label
            .split_once('-')
            .ok_or_else(|| invalid(format!("expected YYYY-MM, got {label:?}")))?;
        let year: i32 = y
            .parse()
            .map_err(|_| invalid(format!("bad year in {label:?}")))?;
        let month: u32 = m
            .parse()
            .map_err(|_| invalid(format!("bad month in {label:?}")))?;
        TimeWindow::calendar_month(year, month)
    }

    /// `count` consecutive calendar months starting at `first` (a `YYYY-MM` label).
    pub fn consecutive_months(first: &str, count: usize) -> Result<Vec<Self>> {
        let start = TimeWindow::parse_month(first)?;
        let date = chrono::DateTime::from_timestamp(start.start, 0)
            .ok_or_else(|| invalid("timestamp out of range"))?
            .date_naive();
        let (mut year, mut month) = (date.year(), date.month());
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            out.push(TimeWindow::calendar_month(year, month)?);
            month += 1;
            if month > 12 {
                month = 1;
                year += 1;
            }
        }
        Ok(out)
    }

    /// Smallest window holding every record of `table`, labelled `all`.
    pub fn spanning(table: &StudentTable) -> Option<Self> {
        let mut lo = i64::MAX;
        let mut hi = i64::MIN;
        for rec in table.records() {
            lo = lo.min(rec.timestamp);
            hi = hi.max(rec.timestamp);
        }
        (lo <= hi).then(|| TimeWindow {
            start: lo,
            end: hi + 1,
            label: "all".to_string(),
        })
    }
}

fn midnight_epoch(date: NaiveDate) -> i64 {
    date.and_hms_opt(0, 0, 0)
        .expect("midnight is a valid time")
        .and_utc()
        .timestamp()
}

impl fmt::Display for TimeWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}, {})", self.label, self.start, self.end)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StudentEntry {
    /// Sorted by `(timestamp, location_id)`.
    pub records: Vec<EventRecord>,
    pub gpa: Option<f64>,
}

/// Records grouped per student, keyed and iterated in lexicographic id order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StudentTable {
    students: BTreeMap<String, StudentEntry>,
}

impl StudentTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a normalized table: records sorted per student, exact duplicates
    /// and same-location swipes less than a minute apart collapsed.
    pub fn from_records<I: IntoIterator<Item = EventRecord>>(records: I) -> Self {
        let mut students: BTreeMap<String, StudentEntry> = BTreeMap::new();
        for rec in records {
            students
                .entry(rec.student_id.clone())
                .or_default()
                .records
                .push(rec);
        }
        for entry in students.values_mut() {
            normalize(&mut entry.records);
        }
        StudentTable { students }
    }

    pub fn len(&self) -> usize {
        self.students.len()
    }

    pub fn is_empty(&self) -> bool {
        self.students.is_empty()
    }

    pub fn record_count(&self) -> usize {
        self.students.values().map(|e| e.records.len()).sum()
    }

    pub fn get(&self, student_id: &str) -> Option<&StudentEntry> {
        self.students.get(student_id)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &StudentEntry)> {
        self.students.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn student_ids(&self) -> impl Iterator<Item = &str> {
        self.students.keys().map(String::as_str)
    }

    pub fn records(&self) -> impl Iterator<Item = &EventRecord> {
        self.students.values().flat_map(|e| e.records.iter())
    }

    pub fn set_gpa(&mut self, student_id: &str, gpa: f64) {
        self.students.entry(student_id.to_string()).or_default().gpa = Some(gpa);
    }

    /// Copies GPA values from `gpa_table` onto students already present here.
    pub fn attach_gpa(&mut self, gpa_table: &StudentTable) {
        for (id, entry) in self.students.iter_mut() {
            if let Some(g) = gpa_table.get(id).and_then(|e| e.gpa) {
                entry.gpa = Some(g);
            }
        }
    }

    pub fn gpa_map(&self) -> BTreeMap<String, f64> {
        self.students
            .iter()
            .filter_map(|(k, e)| e.gpa.map(|g| (k.clone(), g)))
            .collect()
    }

    /// Students with at least one record inside `window`, records restricted to it.
    pub fn restrict_to(&self, window: &TimeWindow) -> StudentTable {
        let students = self
            .students
            .iter()
            .filter_map(|(id, entry)| {
                let records: Vec<EventRecord> = entry
                    .records
                    .iter()
                    .filter(|r| window.contains(r.timestamp))
                    .cloned()
                    .collect();
                (!records.is_empty()).then(|| {
                    (
                        id.clone(),
                        StudentEntry {
                            records,
                            gpa: entry.gpa,
                        },
                    )
                })
            })
            .collect();
        StudentTable { students }
    }
}

fn normalize(records: &mut Vec<EventRecord>) {
    records.sort_by(|a, b| {
        a.timestamp
            .cmp(&b.timestamp)
            .then_with(|| a.location_id.cmp(&b.location_id))
    });
    let mut last_kept: BTreeMap<String, i64> = BTreeMap::new();
    records.retain(|r| match last_kept.get(&r.location_id) {
        Some(&t) if r.timestamp - t < DUPLICATE_SWIPE_SECONDS => false,
        _ => {
            last_kept.insert(r.location_id.clone(), r.timestamp);
            true
        }
    });
}

/// Keeps students holding at least `min_records` records inside `window`.
/// A `min_records` of zero is treated as one.
pub fn filter_valid(table: &StudentTable, window: &TimeWindow, min_records: usize) -> StudentTable {
    let min_records = min_records.max(1);
    let mut out = table.restrict_to(window);
    out.students.retain(|_, e| e.records.len() >= min_records);
    out
}

/// Slices `table` into pairwise disjoint windows.
pub fn split_windows(
    table: &StudentTable,
    windows: &[TimeWindow],
) -> Result<Vec<(TimeWindow, StudentTable)>> {
    for (i, a) in windows.iter().enumerate() {
        for b in &windows[i + 1..] {
            if a.overlaps(b) {
                return Err(invalid(format!("windows {a} and {b} overlap")));
            }
        }
    }
    Ok(windows
        .iter()
        .map(|w| (w.clone(), table.restrict_to(w)))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventFormat {
    Consumption,
    Library,
    Gpa,
}

impl EventFormat {
    pub fn header(self) -> &'static str {
        match self {
            EventFormat::Consumption => "student_id,location_id,timestamp",
            EventFormat::Library => "student_id,timestamp",
            EventFormat::Gpa => "student_id,gpa",
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ParseReport {
    pub table: StudentTable,
    pub malformed: usize,
    /// 1-based line numbers of skipped rows.
    pub malformed_lines: Vec<usize>,
}

/// Reads one of the three CSV schemas into a normalized [`StudentTable`].
/// Malformed rows are skipped and reported; a wrong header is an error.
pub fn parse_events<R: BufRead>(source: R, format: EventFormat) -> Result<ParseReport> {
    let mut lines = source.lines();
    let header = match lines.next() {
        Some(line) => line?,
        None => {
            return Err(Error::Format {
                line: 1,
                message: format!("missing header, expected {:?}", format.header()),
            })
        }
    };
    let header = header.trim_end_matches('\r').trim_start_matches('\u{feff}');
    if header != format.header() {
        return Err(Error::Format {
            line: 1,
            message: format!("expected header {:?}, found {:?}", format.header(), header),
        });
    }

    let mut records = Vec::new();
    let mut gpas: Vec<(String, f64)> = Vec::new();
    let mut malformed_lines = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line_no = idx + 2;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let ok = match format {
            EventFormat::Consumption => match fields.as_slice() {
                [sid, loc, ts] if is_canteen_location(loc) => parse_timestamp(ts)
                    .and_then(|t| EventRecord::new(*sid, *loc, t).ok())
                    .map(|r| records.push(r))
                    .is_some(),
                _ => false,
            },
            EventFormat::Library => match fields.as_slice() {
                [sid, ts] => parse_timestamp(ts)
                    .and_then(|t| EventRecord::new(*sid, LIBRARY_LOCATION, t).ok())
                    .map(|r| records.push(r))
                    .is_some(),
                _ => false,
            },
            EventFormat::Gpa => match fields.as_slice() {
                [sid, g] if !sid.is_empty() => match g.trim().parse::<f64>() {
                    Ok(v) if v.is_finite() && v >= 0.0 => {
                        gpas.push((sid.to_string(), v));
                        true
                    }
                    _ => false,
                },
                _ => false,
            },
        };
        if !ok {
            malformed_lines.push(line_no);
        }
    }

    let mut table = StudentTable::from_records(records);
    for (sid, g) in gpas {
        table.set_gpa(&sid, g);
    }
    Ok(ParseReport {
        table,
        malformed: malformed_lines.len(),
        malformed_lines,
    })
}

fn parse_timestamp(s: &str) -> Option<i64> {
    s.trim().parse::<i64>().ok().filter(|&t| t > 0)
}

/// `C<canteen>.W<window>` with decimal canteen and window numbers.
pub fn is_canteen_location(loc: &str) -> bool {
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    loc.strip_prefix('C')
        .and_then(|rest| rest.split_once(".W"))
        .is_some_and(|(c, w)| digits(c) && digits(w))
}

/// Writes `table` in the given CSV schema. Rows are ordered by student id,
/// then by timestamp.
pub fn write_events<W: Write>(table: &StudentTable, format: EventFormat, mut out: W) -> Result<()> {
    writeln!(out, "{}", format.header())?;
    for (id, entry) in table.iter() {
        match format {
            EventFormat::Consumption => {
                for r in &entry.records {
                    writeln!(out, "{},{},{}", id, r.location_id, r.timestamp)?;
                }
            }
            EventFormat::Library => {
                for r in &entry.records {
                    writeln!(out, "{},{}", id, r.timestamp)?;
                }
            }
            EventFormat::Gpa => {
                if let Some(g) = entry.gpa {
                    writeln!(out, "{},{}", id, g)?;
                }
            }
        }
    }
    Ok(())
}
