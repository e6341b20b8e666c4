use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::records::TimeWindow;
use crate::ties::{EdgeCount, EdgeList};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct NodeAttributes {
    pub orderliness: Option<f64>,
    pub diligence: Option<u64>,
    pub gpa: Option<f64>,
}

/// Undirected simple graph over student ids.
///
/// Nodes are indexed `0..n` in lexicographic id order and adjacency lists are
/// sorted, so every traversal is deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct FriendshipNetwork {
    ids: Vec<String>,
    index: HashMap<String, u32>,
    adjacency: Vec<Vec<u32>>,
    attributes: Vec<NodeAttributes>,
    edge_count: usize,
    label: String,
    window: Option<TimeWindow>,
}

impl FriendshipNetwork {
    /// Builds a graph from `nodes` (may include isolated ones) and `edges`.
    /// Edge endpoints missing from `nodes` are added; self loops and repeated
    /// edges are dropped.
    pub fn build<'a, N, E>(label: impl Into<String>, nodes: N, edges: E) -> Self
    where
        N: IntoIterator<Item = &'a str>,
        E: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let edges: Vec<(&str, &str)> = edges.into_iter().filter(|(u, v)| u != v).collect();
        let mut all: BTreeSet<&str> = nodes.into_iter().collect();
        for (u, v) in &edges {
            all.insert(u);
            all.insert(v);
        }
        let ids: Vec<String> = all.into_iter().map(str::to_string).collect();
        let index: HashMap<String, u32> = ids
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i as u32))
            .collect();
        let mut adjacency = vec![Vec::new(); ids.len()];
        for (u, v) in edges {
            let (iu, iv) = (index[u], index[v]);
            adjacency[iu as usize].push(iv);
            adjacency[iv as usize].push(iu);
        }
        let mut edge_count = 0;
        for list in adjacency.iter_mut() {
            list.sort_unstable();
            list.dedup();
            edge_count += list.len();
        }
        let n = ids.len();
        FriendshipNetwork {
            ids,
            index,
            adjacency,
            attributes: vec![NodeAttributes::default(); n],
            edge_count: edge_count / 2,
            label: label.into(),
            window: None,
        }
    }

    /// Graph whose nodes are exactly the endpoints of `edges`.
    pub fn from_edge_list(edges: &EdgeList, window: Option<TimeWindow>) -> Self {
        let label = window.as_ref().map(|w| w.label.clone()).unwrap_or_default();
        let mut g = Self::build(
            label,
            std::iter::empty(),
            edges.iter().map(|e| (e.a.as_str(), e.b.as_str())),
        );
        g.window = window;
        g
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn set_label(&mut self, label: impl Into<String>) {
        self.label = label.into();
    }

    pub fn window(&self) -> Option<&TimeWindow> {
        self.window.as_ref()
    }

    pub fn set_window(&mut self, window: TimeWindow) {
        self.label = window.label.clone();
        self.window = Some(window);
    }

    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn id(&self, node: u32) -> &str {
        &self.ids[node as usize]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn index_of(&self, id: &str) -> Option<u32> {
        self.index.get(id).copied()
    }

    pub fn neighbors(&self, node: u32) -> &[u32] {
        &self.adjacency[node as usize]
    }

    pub fn degree(&self, node: u32) -> usize {
        self.adjacency[node as usize].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn nodes(&self) -> impl Iterator<Item = u32> + '_ {
        0..self.ids.len() as u32
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(u, list)| {
            list.iter()
                .filter(move |&&v| (u as u32) < v)
                .map(move |&v| (u as u32, v))
        })
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.adjacency[u as usize].binary_search(&v).is_ok()
    }

    pub fn attributes(&self, node: u32) -> &NodeAttributes {
        &self.attributes[node as usize]
    }

    pub fn attributes_mut(&mut self, node: u32) -> &mut NodeAttributes {
        &mut self.attributes[node as usize]
    }

    /// Sets orderliness on the nodes present in `values`; returns how many matched.
    pub fn set_orderliness(&mut self, values: &BTreeMap<String, f64>) -> usize {
        self.assign(values, |a, v| a.orderliness = Some(*v))
    }

    pub fn set_diligence(&mut self, values: &BTreeMap<String, u64>) -> usize {
        self.assign(values, |a, v| a.diligence = Some(*v))
    }

    pub fn set_gpa(&mut self, values: &BTreeMap<String, f64>) -> usize {
        self.assign(values, |a, v| a.gpa = Some(*v))
    }

    fn assign<T>(
        &mut self,
        values: &BTreeMap<String, T>,
        set: impl Fn(&mut NodeAttributes, &T),
    ) -> usize {
        let mut hits = 0;
        for (i, id) in self.ids.iter().enumerate() {
            if let Some(v) = values.get(id) {
                set(&mut self.attributes[i], v);
                hits += 1;
            }
        }
        hits
    }

    /// Subgraph induced by `keep`, retaining attributes, label and window.
    pub fn induced_subgraph(&self, keep: &[u32]) -> FriendshipNetwork {
        let kept: BTreeSet<u32> = keep.iter().copied().collect();
        let mut g = FriendshipNetwork::build(
            self.label.clone(),
            kept.iter().map(|&u| self.id(u)),
            self.edges()
                .filter(|(u, v)| kept.contains(u) && kept.contains(v))
                .map(|(u, v)| (self.id(u), self.id(v))),
        );
        for (new, &old) in kept.iter().enumerate() {
            g.attributes[new] = self.attributes[old as usize];
        }
        g.window = self.window.clone();
        g
    }

    /// Edges as an [`EdgeList`] with unit counts.
    pub fn edge_list(&self) -> EdgeList {
        let mut edges: Vec<EdgeCount> = self
            .edges()
            .map(|(u, v)| EdgeCount {
                a: self.id(u).to_string(),
                b: self.id(v).to_string(),
                count: 1,
            })
            .collect();
        edges.sort();
        EdgeList::from_sorted_unchecked(edges)
    }
}
