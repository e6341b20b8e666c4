use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Unordered student pair stored with `a < b` and its co-occurrence count.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeCount {
    pub a: String,
    pub b: String,
    pub count: u32,
}

/// Deduplicated, lexicographically sorted list of unordered pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeList {
    edges: Vec<EdgeCount>,
}

impl EdgeList {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a list from arbitrary `(u, v, count)` triples. Endpoint order is
    /// normalized and repeated pairs are merged by summing their counts.
    pub fn from_counts<I, S>(triples: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, S, u32)>,
        S: Into<String>,
    {
        let mut merged: BTreeMap<(String, String), u32> = BTreeMap::new();
        for (u, v, count) in triples {
            let (u, v) = (u.into(), v.into());
            if u == v {
                return Err(invalid(format!("self pair {u:?}")));
            }
            if count == 0 {
                return Err(invalid(format!("zero count for pair {u:?}-{v:?}")));
            }
            let key = if u < v { (u, v) } else { (v, u) };
            *merged.entry(key).or_default() += count;
        }
        Ok(EdgeList {
            edges: merged
                .into_iter()
                .map(|((a, b), count)| EdgeCount { a, b, count })
                .collect(),
        })
    }

    /// Pairs with unit count.
    pub fn from_pairs<I, S>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, S)>,
        S: Into<String>,
    {
        let mut merged: BTreeMap<(String, String), u32> = BTreeMap::new();
        for (u, v) in pairs {
            let (u, v) = (u.into(), v.into());
            if u == v {
                return Err(invalid(format!("self pair {u:?}")));
            }
            let key = if u < v { (u, v) } else { (v, u) };
            merged.insert(key, 1);
        }
        Ok(EdgeList {
            edges: merged
                .into_iter()
                .map(|((a, b), count)| EdgeCount { a, b, count })
                .collect(),
        })
    }

    pub(crate) fn from_sorted_unchecked(edges: Vec<EdgeCount>) -> Self {
        debug_assert!(edges
            .windows(2)
            .all(|w| (&w[0].a, &w[0].b) < (&w[1].a, &w[1].b)));
        EdgeList { edges }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, EdgeCount> {
        self.edges.iter()
    }

    pub fn count(&self, u: &str, v: &str) -> Option<u32> {
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        self.edges
            .binary_search_by(|e| (e.a.as_str(), e.b.as_str()).cmp(&(a, b)))
            .ok()
            .map(|i| self.edges[i].count)
    }

    pub fn contains(&self, u: &str, v: &str) -> bool {
        self.count(u, v).is_some()
    }

    /// Pairs whose count reaches `min_count`.
    pub fn at_least(&self, min_count: u32) -> EdgeList {
        EdgeList {
            edges: self
                .edges
                .iter()
                .filter(|e| e.count >= min_count)
                .cloned()
                .collect(),
        }
    }

    pub fn intersection_size(&self, other: &EdgeList) -> usize {
        self.edges
            .iter()
            .filter(|e| other.contains(&e.a, &e.b))
            .count()
    }

    /// Pairs of `self` that are absent from `other`.
    pub fn difference(&self, other: &EdgeList) -> EdgeList {
        EdgeList {
            edges: self
                .edges
                .iter()
                .filter(|e| !other.contains(&e.a, &e.b))
                .cloned()
                .collect(),
        }
    }

    /// `student_a\tstudent_b\tcount`, one pair per line, no header.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> Result<()> {
        for e in &self.edges {
            writeln!(out, "{}\t{}\t{}", e.a, e.b, e.count)?;
        }
        Ok(())
    }

    /// Reads the TSV written by [`EdgeList::write_tsv`]. A missing count column
    /// reads as 1 so plain two-column pair lists are accepted too.
    pub fn read_tsv<R: BufRead>(source: R) -> Result<Self> {
        let mut triples = Vec::new();
        for (idx, line) in source.lines().enumerate() {
            let line = line?;
            let line = line.trim_end_matches('\r');
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let bad = |msg: &str| Error::Format {
                line: idx + 1,
                message: msg.to_string(),
            };
            let (a, b, count) = match fields.as_slice() {
                [a, b] => (*a, *b, 1),
                [a, b, c] => (*a, *b, c.parse::<u32>().map_err(|_| bad("bad count"))?),
                _ => return Err(bad("expected 2 or 3 tab-separated fields")),
            };
            if a.is_empty() || b.is_empty() || a == b || count == 0 {
                return Err(bad("invalid pair"));
            }
            triples.push((a.to_string(), b.to_string(), count));
        }
        EdgeList::from_counts(triples)
    }
}

impl<'a> IntoIterator for &'a EdgeList {
    type Item = &'a EdgeCount;
    type IntoIter = std::slice::Iter<'a, EdgeCount>;

    fn into_iter(self) -> Self::IntoIter {
        self.edges.iter()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Validation {
    /// `|inferred ∩ truth| / |truth|`.
    pub hit_rate: f64,
    pub matched: usize,
    pub missed: EdgeList,
    pub extra: EdgeList,
}

/// Compares inferred ties with a reference tie set.
pub fn validate_against_ground_truth(inferred: &EdgeList, truth: &EdgeList) -> Result<Validation> {
    if truth.is_empty() {
        return Err(invalid("hit rate is undefined for an empty truth set"));
    }
    let matched = truth.intersection_size(inferred);
    Ok(Validation {
        hit_rate: matched as f64 / truth.len() as f64,
        matched,
        missed: truth.difference(inferred),
        extra: inferred.difference(truth),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn numbered(range: std::ops::Range<usize>) -> EdgeList {
        EdgeList::from_pairs(range.map(|i| (format!("s{i:03}"), format!("t{i:03}")))).unwrap()
    }

    #[test]
    fn orientation_and_merging() {
        let l = EdgeList::from_counts(vec![("b", "a", 2), ("a", "b", 3), ("c", "a", 1)]).unwrap();
        assert_eq!(l.len(), 2);
        assert_eq!(l.count("b", "a"), Some(5));
        assert_eq!(l.iter().next().unwrap().a, "a");
        assert!(EdgeList::from_pairs(vec![("x", "x")]).is_err());
    }

    #[test]
    fn hit_rate_thirty_eight_of_forty_three() {
        let truth = numbered(0..43);
        let inferred = numbered(5..43);
        let v = validate_against_ground_truth(&inferred, &truth).unwrap();
        assert_eq!(v.matched, 38);
        assert_eq!(v.missed.len(), 5);
        assert!((v.hit_rate - 0.884).abs() < 5e-4);
    }

    #[test]
    fn identity_and_disjoint() {
        let truth = numbered(0..10);
        assert_eq!(
            validate_against_ground_truth(&truth, &truth)
                .unwrap()
                .hit_rate,
            1.0
        );
        let other = numbered(10..20);
        let v = validate_against_ground_truth(&other, &truth).unwrap();
        assert_eq!(v.hit_rate, 0.0);
        assert_eq!(v.extra.len(), 10);
    }

    #[test]
    fn empty_truth_is_an_error() {
        assert!(validate_against_ground_truth(&numbered(0..3), &EdgeList::new()).is_err());
    }

    #[test]
    fn tsv_round_trip() {
        let l = EdgeList::from_counts(vec![("a", "b", 7), ("b", "c", 5)]).unwrap();
        let mut buf = Vec::new();
        l.write_tsv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap(),
            "a\tb\t7\nb\tc\t5\n"
        );
        assert_eq!(EdgeList::read_tsv(buf.as_slice()).unwrap(), l);
        assert!(EdgeList::read_tsv("a\tb\tx\n".as_bytes()).is_err());
    }
}
