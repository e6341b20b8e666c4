use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::edges::{EdgeCount, EdgeList};
use crate::error::{invalid, Result};
use crate::graph::FriendshipNetwork;
use crate::par::par_map;
use crate::records::{StudentTable, TimeWindow};

/// Encounters of one pair at one location separated by more than this start a
/// new meal session; each session counts once.
pub const SESSION_GAP_SECONDS: i64 = 30 * 60;

pub const DEFAULT_WINDOW_SECONDS: i64 = 120;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TieParams {
    /// Minimum co-occurrence count for a tie (`a_c`).
    pub critical_frequency: u32,
    /// Maximum timestamp difference for a co-occurrence.
    pub window_seconds: i64,
}

impl Default for TieParams {
    fn default() -> Self {
        TieParams {
            critical_frequency: 5,
            window_seconds: DEFAULT_WINDOW_SECONDS,
        }
    }
}

impl TieParams {
    pub fn validate(&self) -> Result<()> {
        if self.critical_frequency < 1 {
            return Err(invalid("critical frequency must be at least 1"));
        }
        if self.window_seconds < 1 {
            return Err(invalid("co-occurrence window must be at least one second"));
        }
        Ok(())
    }
}

/// Counts, for every unordered student pair, the meal sessions in which both
/// were recorded at the same location within `window_seconds` of each other.
///
/// Records are swept per location in time order, so the cost is proportional
/// to the number of records times the local crowd size rather than the square
/// of the population. Locations are processed independently and merged by
/// summing counts.
pub fn count_cooccurrences(table: &StudentTable, window_seconds: i64) -> EdgeList {
    let window_seconds = window_seconds.max(0);
    let ids: Vec<&str> = table.student_ids().collect();
    let mut by_location: BTreeMap<&str, Vec<(i64, u32)>> = BTreeMap::new();
    for (idx, (_, entry)) in table.iter().enumerate() {
        for r in &entry.records {
            by_location
                .entry(r.location_id.as_str())
                .or_default()
                .push((r.timestamp, idx as u32));
        }
    }
    let locations: Vec<Vec<(i64, u32)>> = by_location
        .into_values()
        .map(|mut v| {
            v.sort_unstable();
            v
        })
        .collect();

    let partials: Vec<Vec<((u32, u32), u32)>> =
        par_map!(locations, |events: &Vec<(i64, u32)>| location_sessions(
            events,
            window_seconds
        ));

    let mut merged: BTreeMap<(u32, u32), u32> = BTreeMap::new();
    for part in partials {
        for (pair, n) in part {
            *merged.entry(pair).or_default() += n;
        }
    }
    // Index order equals lexicographic id order, so the pairs are already sorted.
    EdgeList::from_sorted_unchecked(
        merged
            .into_iter()
            .map(|((a, b), count)| EdgeCount {
                a: ids[a as usize].to_string(),
                b: ids[b as usize].to_string(),
                count,
            })
            .collect(),
    )
}

fn location_sessions(events: &[(i64, u32)], window_seconds: i64) -> Vec<((u32, u32), u32)> {
    let mut encounters: HashMap<(u32, u32), Vec<i64>> = HashMap::new();
    let mut lo = 0;
    for (j, &(t, s)) in events.iter().enumerate() {
        while events[lo].0 < t - window_seconds {
            lo += 1;
        }
        for &(_, r) in &events[lo..j] {
            if r != s {
                let key = if r < s { (r, s) } else { (s, r) };
                encounters.entry(key).or_default().push(t);
            }
        }
    }
    let mut out: Vec<((u32, u32), u32)> = encounters
        .into_iter()
        .map(|(pair, times)| (pair, count_sessions(&times)))
        .collect();
    out.sort_unstable();
    out
}

/// Number of runs in sorted `times` whose consecutive gaps stay within the session gap.
pub(crate) fn count_sessions(times: &[i64]) -> u32 {
    let mut sessions = 0;
    let mut last: Option<i64> = None;
    for &t in times {
        if last.is_none_or(|l| t - l > SESSION_GAP_SECONDS) {
            sessions += 1;
        }
        last = Some(t);
    }
    sessions
}

/// Friendship network of pairs co-occurring at least `a_c` times inside `window`.
pub fn infer_network(
    table: &StudentTable,
    params: &TieParams,
    window: &TimeWindow,
) -> Result<FriendshipNetwork> {
    params.validate()?;
    let counts = count_cooccurrences(&table.restrict_to(window), params.window_seconds);
    Ok(FriendshipNetwork::from_edge_list(
        &counts.at_least(params.critical_frequency),
        Some(window.clone()),
    ))
}

/// Network size (nodes, edges) for each threshold in `thresholds`, from one
/// pass of co-occurrence counting.
pub fn threshold_sweep(counts: &EdgeList, thresholds: &[u32]) -> Vec<(u32, usize, usize)> {
    thresholds
        .iter()
        .map(|&a| {
            let kept = counts.at_least(a);
            let g = FriendshipNetwork::from_edge_list(&kept, None);
            (a, g.node_count(), g.edge_count())
        })
        .collect()
}
