//! Behavioral characters: meal-time orderliness and library diligence.
//!
//! Orderliness is the negated actual entropy of a student's discretized meal
//! times. Each check-in is mapped to one of 48 half-hour slices of the day, and
//! the entropy is estimated from how long a fresh substring has to be at each
//! position before it stops repeating the past.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{insufficient, invalid, Error, Result};
use crate::par::par_map;
use crate::records::{StudentTable, TimeWindow, DEFAULT_MIN_RECORDS};

pub const SECONDS_PER_DAY: u32 = 86_400;
pub const SLICE_SECONDS: u32 = 1_800;
pub const SLICES_PER_DAY: u8 = 48;

/// Half-hour slice codes `1..=48` in chronological order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DaySlots(Vec<u8>);

impl DaySlots {
    pub fn codes(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Seconds after midnight in `(0, 86400]`; midnight itself maps to 86400 so it
/// falls in the last slice of the previous day.
pub fn seconds_of_day(timestamp: i64, utc_offset_seconds: i64) -> u32 {
    let s = (timestamp + utc_offset_seconds).rem_euclid(SECONDS_PER_DAY as i64) as u32;
    if s == 0 {
        SECONDS_PER_DAY
    } else {
        s
    }
}

/// Slice code `ceil(seconds / 1800)` for each time of day.
pub fn discretize(times: &[u32]) -> Result<DaySlots> {
    times
        .iter()
        .map(|&t| {
            if t == 0 || t > SECONDS_PER_DAY {
                Err(invalid(format!("time of day {t}s outside (0, 86400]")))
            } else {
                Ok(t.div_ceil(SLICE_SECONDS) as u8)
            }
        })
        .collect::<Result<Vec<u8>>>()
        .map(DaySlots)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyEstimate {
    /// Shortest novel substring length at each position.
    pub lambdas: Vec<u32>,
    pub entropy: f64,
}

/// Actual entropy `S = n ln n / Σ Λ_i`.
///
/// `Λ_i` is the length of the shortest substring starting at `i` that does not
/// appear starting at any earlier position (earlier matches may run past `i`).
/// When every substring through the end has appeared before, `Λ_i` is the
/// remaining length plus one. Both cases equal one more than the longest match
/// between the suffix at `i` and any earlier suffix, which is what the rolling
/// longest-common-prefix table below computes in `O(n²)` time and `O(n)` space.
pub fn actual_entropy<T: Eq>(seq: &[T]) -> Result<EntropyEstimate> {
    let n = seq.len();
    if n < 2 {
        return Err(insufficient(format!(
            "entropy needs at least 2 symbols, got {n}"
        )));
    }
    // next[j] = lcp(i + 1, j), cur[j] = lcp(i, j), for j < i.
    let mut next = vec![0u32; n + 1];
    let mut cur = vec![0u32; n + 1];
    let mut lambdas = vec![0u32; n];
    for i in (0..n).rev() {
        let mut longest = 0;
        for j in 0..i {
            cur[j] = if seq[i] == seq[j] { next[j + 1] + 1 } else { 0 };
            longest = longest.max(cur[j]);
        }
        lambdas[i] = longest + 1;
        std::mem::swap(&mut cur, &mut next);
    }
    let total: u64 = lambdas.iter().map(|&l| l as u64).sum();
    let nf = n as f64;
    Ok(EntropyEstimate {
        entropy: nf * nf.ln() / total as f64,
        lambdas,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderlinessConfig {
    /// Students with fewer in-window records are left out.
    pub min_records: usize,
    /// Shift applied before cutting days into slices (local time zone).
    pub utc_offset_seconds: i64,
}

impl Default for OrderlinessConfig {
    fn default() -> Self {
        OrderlinessConfig {
            min_records: DEFAULT_MIN_RECORDS,
            utc_offset_seconds: 0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OrderlinessReport {
    /// Actual entropy per student; orderliness is its negation.
    pub entropy: BTreeMap<String, f64>,
    /// Students with in-window records but fewer than `min_records`.
    pub omitted: usize,
}

impl OrderlinessReport {
    pub fn orderliness(&self) -> BTreeMap<String, f64> {
        self.entropy.iter().map(|(k, s)| (k.clone(), -s)).collect()
    }
}

/// Actual entropy of each student's in-window consumption times.
pub fn orderliness(
    consumption: &StudentTable,
    window: &TimeWindow,
    config: &OrderlinessConfig,
) -> OrderlinessReport {
    let min_records = config.min_records.max(2);
    let scoped = consumption.restrict_to(window);
    let students: Vec<(&str, Vec<u32>)> = scoped
        .iter()
        .map(|(id, e)| {
            let times = e
                .records
                .iter()
                .map(|r| seconds_of_day(r.timestamp, config.utc_offset_seconds))
                .collect();
            (id, times)
        })
        .collect();
    let omitted = students
        .iter()
        .filter(|(_, t)| t.len() < min_records)
        .count();
    let eligible: Vec<&(&str, Vec<u32>)> = students
        .iter()
        .filter(|(_, t)| t.len() >= min_records)
        .collect();
    let entropies: Vec<(String, f64)> = par_map!(eligible, |item: &&(&str, Vec<u32>)| {
        let (id, times) = *item;
        let slots = discretize(times).expect("seconds_of_day stays in range");
        let est = actual_entropy(slots.codes()).expect("at least two records");
        (id.to_string(), est.entropy)
    });
    OrderlinessReport {
        entropy: entropies.into_iter().collect(),
        omitted,
    }
}

/// In-window library entries per student.
pub fn diligence(library: &StudentTable, window: &TimeWindow) -> BTreeMap<String, u64> {
    library
        .iter()
        .map(|(id, e)| {
            let n = e
                .records
                .iter()
                .filter(|r| window.contains(r.timestamp))
                .count();
            (id.to_string(), n as u64)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BehaviorProfile {
    pub student_id: String,
    pub actual_entropy: Option<f64>,
    pub diligence: u64,
    pub gpa: Option<f64>,
}

impl BehaviorProfile {
    pub fn orderliness(&self) -> Option<f64> {
        self.actual_entropy.map(|s| -s)
    }
}

/// Joins orderliness, diligence and GPA for every student seen in either table.
pub fn behavior_profiles(
    consumption: &StudentTable,
    library: &StudentTable,
    gpa: &BTreeMap<String, f64>,
    window: &TimeWindow,
    config: &OrderlinessConfig,
) -> (Vec<BehaviorProfile>, OrderlinessReport) {
    let order = orderliness(consumption, window, config);
    let dil = diligence(library, window);
    let scoped = consumption.restrict_to(window);
    let ids: BTreeSet<&str> = scoped
        .student_ids()
        .chain(dil.iter().filter(|(_, &c)| c > 0).map(|(k, _)| k.as_str()))
        .collect();
    let profiles = ids
        .into_iter()
        .map(|id| BehaviorProfile {
            student_id: id.to_string(),
            actual_entropy: order.entropy.get(id).copied(),
            diligence: dil.get(id).copied().unwrap_or(0),
            gpa: gpa.get(id).copied(),
        })
        .collect();
    (profiles, order)
}

pub const PROFILE_HEADER: &str = "student_id\tentropy\torderliness\tdiligence\tgpa";

pub fn write_profiles<W: Write>(profiles: &[BehaviorProfile], mut out: W) -> Result<()> {
    writeln!(out, "{PROFILE_HEADER}")?;
    for p in profiles {
        let f = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            p.student_id,
            f(p.actual_entropy),
            f(p.orderliness()),
            p.diligence,
            f(p.gpa)
        )?;
    }
    Ok(())
}

pub fn read_profiles<R: BufRead>(source: R) -> Result<Vec<BehaviorProfile>> {
    let mut lines = source.lines();
    let header = lines.next().transpose()?.unwrap_or_default();
    if header.trim_end_matches('\r') != PROFILE_HEADER {
        return Err(Error::Format {
            line: 1,
            message: format!("expected header {PROFILE_HEADER:?}"),
        });
    }
    let mut out = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let bad = |m: &str| Error::Format {
            line: idx + 2,
            message: m.to_string(),
        };
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 5 || f[0].is_empty() {
            return Err(bad("expected 5 tab-separated fields"));
        }
        let opt = |s: &str| -> Result<Option<f64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse::<f64>().map(Some).map_err(|_| bad("bad number"))
            }
        };
        out.push(BehaviorProfile {
            student_id: f[0].to_string(),
            actual_entropy: opt(f[1])?,
            diligence: f[3].parse().map_err(|_| bad("bad diligence"))?,
            gpa: opt(f[4])?,
        });
    }
    Ok(out)
}

/// Average ranks (1-based), ties sharing the mean of their positions.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

pub(crate) fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    (sxx > 0.0 && syy > 0.0).then(|| (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(invalid(format!(
            "length mismatch {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 3 {
        return Err(invalid("spearman correlation needs at least 3 pairs"));
    }
    pearson(&average_ranks(x), &average_ranks(y))
        .ok_or_else(|| Error::Undefined("a constant sequence has no rank correlation".into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BinScale {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinRow {
    pub center: f64,
    pub mean: f64,
    pub count: usize,
}

/// Equal-width bins over `attr` (or `ln attr`), reporting the mean GPA in each
/// nonempty bin. Only students present in both maps take part.
pub fn binned_relation(
    attr: &BTreeMap<String, f64>,
    gpa: &BTreeMap<String, f64>,
    bins: usize,
    scale: BinScale,
) -> Result<Vec<BinRow>> {
    if bins == 0 {
        return Err(invalid("at least one bin is required"));
    }
    let pairs: Vec<(f64, f64)> = attr
        .iter()
        .filter_map(|(k, &x)| gpa.get(k).map(|&g| (x, g)))
        .collect();
    if pairs.len() < bins {
        return Err(insufficient(format!(
            "{} students with both values, need at least {bins}",
            pairs.len()
        )));
    }
    let xs: Vec<f64> = match scale {
        BinScale::Linear => pairs.iter().map(|p| p.0).collect(),
        BinScale::Log => pairs
            .iter()
            .map(|p| {
                if p.0 > 0.0 {
                    Ok(p.0.ln())
                } else {
                    Err(invalid(format!(
                        "log binning needs positive values, got {}",
                        p.0
                    )))
                }
            })
            .collect::<Result<_>>()?,
    };
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = (hi - lo) / bins as f64;
    let mut sums = vec![(0.0, 0usize); bins];
    for (x, (_, g)) in xs.iter().zip(&pairs) {
        let idx = if width > 0.0 {
            (((x - lo) / width) as usize).min(bins - 1)
        } else {
            0
        };
        sums[idx].0 += g;
        sums[idx].1 += 1;
    }
    Ok(sums
        .iter()
        .enumerate()
        .filter(|(_, (_, c))| *c > 0)
        .map(|(i, &(s, c))| {
            let mid = lo + (i as f64 + 0.5) * width;
            BinRow {
                center: match scale {
                    BinScale::Linear => mid,
                    BinScale::Log => mid.exp(),
                },
                mean: s / c as f64,
                count: c,
            }
        })
        .collect())
}

/// Min-max rescaling to `[0, 1]`; a constant map becomes all zeros.
pub fn min_max_normalize(values: &BTreeMap<String, f64>) -> BTreeMap<String, f64> {
    let lo = values.values().copied().fold(f64::INFINITY, f64::min);
    let hi = values.values().copied().fold(f64::NEG_INFINITY, f64::max);
    values
        .iter()
        .map(|(k, &v)| {
            let scaled = if hi > lo { (v - lo) / (hi - lo) } else { 0.0 };
            (k.clone(), scaled)
        })
        .collect()
}

/// Equal-width histogram over the value range as `(bin center, count)`.
pub fn histogram(values: &[f64], bins: usize) -> Vec<(f64, usize)> {
    if values.is_empty() || bins == 0 {
        return Vec::new();
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &v in values {
        let idx = if width > 0.0 {
            (((v - lo) / width) as usize).min(bins - 1)
        } else {
            0
        };
        counts[idx] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(i, c)| (lo + (i as f64 + 0.5) * width, c))
        .collect()
}
