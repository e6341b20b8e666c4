//! Component structure and small-world statistics of a friendship network.

use std::collections::VecDeque;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::network::FriendshipNetwork;
use super::powerlaw::{fit_power_law, PowerLawFit};
use crate::error::{insufficient, Error, Result};
use crate::par::par_map;

/// Sampled shortest paths kick in above this many nodes under [`PathMode::Auto`].
pub const EXACT_PATH_LIMIT: usize = 20_000;
pub const DEFAULT_PATH_SOURCES: usize = 1_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentReport {
    /// Node sets, largest first; equal sizes ordered by smallest member.
    pub components: Vec<Vec<u32>>,
    pub largest: usize,
    pub second_largest: usize,
    pub count: usize,
    /// Power-law fit of the sizes of all components but the largest.
    pub beta: Option<PowerLawFit>,
}

impl ComponentReport {
    pub fn sizes(&self) -> Vec<usize> {
        self.components.iter().map(Vec::len).collect()
    }
}

pub fn connected_components(g: &FriendshipNetwork) -> ComponentReport {
    let n = g.node_count();
    let mut seen = vec![false; n];
    let mut components = Vec::new();
    let mut queue = VecDeque::new();
    for start in g.nodes() {
        if seen[start as usize] {
            continue;
        }
        seen[start as usize] = true;
        queue.push_back(start);
        let mut members = Vec::new();
        while let Some(u) = queue.pop_front() {
            members.push(u);
            for &v in g.neighbors(u) {
                if !seen[v as usize] {
                    seen[v as usize] = true;
                    queue.push_back(v);
                }
            }
        }
        members.sort_unstable();
        components.push(members);
    }
    components.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a[0].cmp(&b[0])));

    let small: Vec<u64> = components.iter().skip(1).map(|c| c.len() as u64).collect();
    ComponentReport {
        largest: components.first().map_or(0, Vec::len),
        second_largest: components.get(1).map_or(0, Vec::len),
        count: components.len(),
        beta: fit_power_law(&small, None).ok(),
        components,
    }
}

/// Induced subgraph on the largest component (empty graph if `g` is empty).
pub fn giant_component(g: &FriendshipNetwork) -> FriendshipNetwork {
    let report = connected_components(g);
    match report.components.first() {
        Some(c) => g.induced_subgraph(c),
        None => g.clone(),
    }
}

/// `ρ = 2e / n(n−1)`.
pub fn density(g: &FriendshipNetwork) -> Result<f64> {
    let n = g.node_count();
    if n < 2 {
        return Err(Error::Undefined(format!(
            "density needs at least 2 nodes, got {n}"
        )));
    }
    Ok(2.0 * g.edge_count() as f64 / (n as f64 * (n as f64 - 1.0)))
}

/// `⟨k⟩ = 2e / n`.
pub fn avg_degree(g: &FriendshipNetwork) -> Result<f64> {
    let n = g.node_count();
    if n == 0 {
        return Err(Error::Undefined("average degree of an empty graph".into()));
    }
    Ok(2.0 * g.edge_count() as f64 / n as f64)
}

/// Triangles through each node.
pub fn triangles(g: &FriendshipNetwork) -> Vec<u64> {
    let nodes: Vec<u32> = g.nodes().collect();
    par_map!(nodes, |&u: &u32| {
        let nu = g.neighbors(u);
        let links: u64 = nu
            .iter()
            .map(|&v| sorted_intersection(nu, g.neighbors(v)))
            .sum();
        links / 2
    })
}

fn sorted_intersection(a: &[u32], b: &[u32]) -> u64 {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Local clustering per node; nodes of degree below 2 score 0.
pub fn local_clustering(g: &FriendshipNetwork) -> Vec<f64> {
    triangles(g)
        .into_iter()
        .zip(g.degrees())
        .map(|(t, k)| {
            if k < 2 {
                0.0
            } else {
                2.0 * t as f64 / (k as f64 * (k as f64 - 1.0))
            }
        })
        .collect()
}

pub fn avg_clustering(g: &FriendshipNetwork) -> Result<f64> {
    let n = g.node_count();
    if n == 0 {
        return Err(Error::Undefined("clustering of an empty graph".into()));
    }
    Ok(local_clustering(g).iter().sum::<f64>() / n as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PathMode {
    /// BFS from every node.
    Exact,
    /// BFS from `sources` distinct nodes drawn with `seed`.
    Sampled { sources: usize, seed: u64 },
    /// Exact up to [`EXACT_PATH_LIMIT`] nodes, otherwise sampled with
    /// [`DEFAULT_PATH_SOURCES`] sources.
    Auto { seed: u64 },
}

/// Sum of BFS distances from `source` and the number of nodes reached.
fn bfs_distance_sum(g: &FriendshipNetwork, source: u32) -> (u64, usize) {
    let mut dist = vec![u32::MAX; g.node_count()];
    let mut queue = VecDeque::new();
    dist[source as usize] = 0;
    queue.push_back(source);
    let (mut sum, mut reached) = (0u64, 1usize);
    while let Some(u) = queue.pop_front() {
        let d = dist[u as usize] + 1;
        for &v in g.neighbors(u) {
            if dist[v as usize] == u32::MAX {
                dist[v as usize] = d;
                sum += d as u64;
                reached += 1;
                queue.push_back(v);
            }
        }
    }
    (sum, reached)
}

/// Mean BFS distance over ordered node pairs of a connected graph.
pub fn avg_shortest_path(g: &FriendshipNetwork, mode: PathMode) -> Result<f64> {
    let n = g.node_count();
    if n < 2 {
        return Err(insufficient("path length needs at least 2 nodes"));
    }
    if bfs_distance_sum(g, 0).1 != n {
        return Err(Error::Disconnected);
    }
    let sources: Vec<u32> = match mode {
        PathMode::Exact => g.nodes().collect(),
        PathMode::Auto { .. } if n <= EXACT_PATH_LIMIT => g.nodes().collect(),
        PathMode::Auto { seed } => sample_sources(n, DEFAULT_PATH_SOURCES, seed),
        PathMode::Sampled { sources, seed } => sample_sources(n, sources, seed),
    };
    if sources.is_empty() {
        return Err(insufficient("at least one BFS source is required"));
    }
    let sums: Vec<u64> = par_map!(sources, |&s: &u32| bfs_distance_sum(g, s).0);
    let total: u64 = sums.iter().sum();
    Ok(total as f64 / (sources.len() as f64 * (n as f64 - 1.0)))
}

fn sample_sources(n: usize, k: usize, seed: u64) -> Vec<u32> {
    if k >= n {
        return (0..n as u32).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked: Vec<u32> = rand::seq::index::sample(&mut rng, n, k)
        .into_iter()
        .map(|i| i as u32)
        .collect();
    picked.sort_unstable();
    picked
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopologyReport {
    pub rho: f64,
    pub c_avg: f64,
    pub l_avg: f64,
    pub k_avg: f64,
    /// Degree power-law exponent, when the degree tail is fit-able.
    pub alpha: Option<f64>,
}

/// Table-style topology of a connected graph (callers pass the giant component).
pub fn topology(g: &FriendshipNetwork, mode: PathMode) -> Result<TopologyReport> {
    let degrees: Vec<u64> = g.degrees().into_iter().map(|d| d as u64).collect();
    Ok(TopologyReport {
        rho: density(g)?,
        c_avg: avg_clustering(g)?,
        l_avg: avg_shortest_path(g, mode)?,
        k_avg: avg_degree(g)?,
        alpha: fit_power_law(&degrees, None).ok().map(|f| f.exponent),
    })
}
