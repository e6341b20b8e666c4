//! Peer effects on the friendship network: attribute assortativity and
//! site percolation driven by an orderliness threshold.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{insufficient, invalid, Error, Result};
use crate::graph::FriendshipNetwork;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Attribute {
    Degree,
    Orderliness,
    Diligence,
    Gpa,
}

impl Attribute {
    pub const ALL: [Attribute; 4] = [
        Attribute::Degree,
        Attribute::Orderliness,
        Attribute::Diligence,
        Attribute::Gpa,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Attribute::Degree => "degree",
            Attribute::Orderliness => "orderliness",
            Attribute::Diligence => "diligence",
            Attribute::Gpa => "gpa",
        }
    }

    fn value(self, g: &FriendshipNetwork, node: u32) -> Option<f64> {
        let a = g.attributes(node);
        match self {
            Attribute::Degree => Some(g.degree(node) as f64),
            Attribute::Orderliness => a.orderliness,
            Attribute::Diligence => a.diligence.map(|d| d as f64),
            Attribute::Gpa => a.gpa,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Assortativity {
    pub r: f64,
    /// Nodes without the attribute, removed before computing `r`.
    pub dropped_nodes: usize,
    /// Edges of the graph the coefficient was computed on.
    pub edges: usize,
}

/// Assortativity of `attr` over the subgraph induced by nodes carrying it.
/// Degree is taken in the graph as given.
pub fn assortativity(g: &FriendshipNetwork, attr: Attribute) -> Result<Assortativity> {
    let keep: Vec<u32> = g.nodes().filter(|&u| attr.value(g, u).is_some()).collect();
    let dropped_nodes = g.node_count() - keep.len();
    let sub;
    let h = if dropped_nodes == 0 {
        g
    } else {
        sub = g.induced_subgraph(&keep);
        &sub
    };
    let values: Vec<f64> = h
        .nodes()
        .map(|u| attr.value(h, u).expect("filtered above"))
        .collect();
    Ok(Assortativity {
        r: assortativity_values(h, &values)?,
        dropped_nodes,
        edges: h.edge_count(),
    })
}

/// `r = Σ_ij (a_ij − k_i k_j / 2M) x_i x_j / Σ_ij (k_i δ_ij − k_i k_j / 2M) x_i x_j`
/// evaluated from edge sums in `O(M)`.
///
/// The ratio is unchanged by shifting `x`, so values are centred on their
/// degree-weighted mean first to avoid cancellation.
pub fn assortativity_values(g: &FriendshipNetwork, values: &[f64]) -> Result<f64> {
    if values.len() != g.node_count() {
        return Err(invalid(format!(
            "{} values for {} nodes",
            values.len(),
            g.node_count()
        )));
    }
    let m = g.edge_count();
    if m < 2 {
        return Err(insufficient(format!(
            "assortativity needs 2 edges, got {m}"
        )));
    }
    let two_m = 2.0 * m as f64;
    let weighted: f64 = g
        .nodes()
        .map(|u| g.degree(u) as f64 * values[u as usize])
        .sum();
    let mean = weighted / two_m;
    let y: Vec<f64> = values.iter().map(|x| x - mean).collect();

    let mixed: f64 = 2.0
        * g.edges()
            .map(|(u, v)| y[u as usize] * y[v as usize])
            .sum::<f64>();
    let (mut ky, mut kyy, mut kxx) = (0.0, 0.0, 0.0);
    for u in g.nodes() {
        let k = g.degree(u) as f64;
        let yu = y[u as usize];
        ky += k * yu;
        kyy += k * yu * yu;
        kxx += k * values[u as usize] * values[u as usize];
    }
    let correction = ky * ky / two_m;
    let numerator = mixed - correction;
    let denominator = kyy - correction;
    if denominator.is_nan() || denominator <= 1e-12 * kxx.max(f64::MIN_POSITIVE) {
        return Err(Error::Undefined(
            "attribute is constant over edge endpoints".into(),
        ));
    }
    Ok((numerator / denominator).clamp(-1.0, 1.0))
}

/// Disjoint sets with component sizes.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    /// Merges the sets of `a` and `b`; returns the old root sizes when they differed.
    pub fn union(&mut self, a: u32, b: u32) -> Option<(u32, u32)> {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return None;
        }
        let sizes = (self.size[ra as usize], self.size[rb as usize]);
        if self.size[ra as usize] < self.size[rb as usize] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize] = ra;
        self.size[ra as usize] += self.size[rb as usize];
        Some(sizes)
    }

    pub fn size_of(&mut self, x: u32) -> u32 {
        let r = self.find(x);
        self.size[r as usize]
    }
}

/// Multiset of component sizes for O(log n) largest/second-largest queries.
#[derive(Debug, Default)]
struct SizeCounts(BTreeMap<u32, u32>);

impl SizeCounts {
    fn add(&mut self, s: u32) {
        *self.0.entry(s).or_default() += 1;
    }

    fn remove(&mut self, s: u32) {
        if let Some(c) = self.0.get_mut(&s) {
            *c -= 1;
            if *c == 0 {
                self.0.remove(&s);
            }
        }
    }

    fn top_two(&self) -> (usize, usize) {
        let mut it = self.0.iter().rev();
        match it.next() {
            None => (0, 0),
            Some((&s, &c)) if c >= 2 => (s as usize, s as usize),
            Some((&s, _)) => (s as usize, it.next().map_or(0, |(&t, _)| t as usize)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PercolationStep {
    /// Threshold: nodes with orderliness `≥ m` are active.
    pub m: f64,
    /// Active fraction.
    pub p: f64,
    pub g1: usize,
    pub g2: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PercolationCurve {
    /// Ordered by decreasing `m`.
    pub steps: Vec<PercolationStep>,
    /// Active fraction where the second-largest component peaks.
    pub p_c: f64,
    pub m_c: f64,
    pub critical_step: usize,
}

pub const DEFAULT_DELTA_M: f64 = 0.01;
const MAX_STEPS: f64 = 5e7;

/// Threshold sweep using each node's orderliness attribute.
pub fn percolate(g: &FriendshipNetwork, delta_m: f64) -> Result<PercolationCurve> {
    percolate_values(g, &orderliness_values(g)?, delta_m)
}

fn orderliness_values(g: &FriendshipNetwork) -> Result<Vec<f64>> {
    g.nodes()
        .map(|u| {
            g.attributes(u)
                .orderliness
                .ok_or_else(|| invalid(format!("node {} has no orderliness", g.id(u))))
        })
        .collect()
}

/// Lowers the threshold `m` from above the largest value to the smallest one
/// in steps no wider than `delta_m`, with an extra step at every distinct value
/// so each step activates at most one group of tied nodes. Activations are
/// merged incrementally with union-find.
pub fn percolate_values(
    g: &FriendshipNetwork,
    values: &[f64],
    delta_m: f64,
) -> Result<PercolationCurve> {
    let n = g.node_count();
    if values.len() != n {
        return Err(invalid(format!("{} values for {n} nodes", values.len())));
    }
    if !(delta_m > 0.0 && delta_m.is_finite()) {
        return Err(invalid("threshold step must be positive"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(invalid("orderliness values must be finite"));
    }
    if n == 0 {
        return Err(insufficient("percolation needs at least one node"));
    }

    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_by(|&a, &b| {
        values[b as usize]
            .total_cmp(&values[a as usize])
            .then(a.cmp(&b))
    });
    let top = values[order[0] as usize];
    let bottom = values[order[n - 1] as usize];
    if (top - bottom) / delta_m > MAX_STEPS {
        return Err(invalid("threshold step too small for the value range"));
    }

    let mut thresholds: Vec<f64> = Vec::new();
    let mut k = 0u64;
    loop {
        let m = top + delta_m - k as f64 * delta_m;
        if m <= bottom {
            break;
        }
        thresholds.push(m);
        k += 1;
    }
    thresholds.extend(order.iter().map(|&u| values[u as usize]));
    thresholds.sort_by(|a, b| b.total_cmp(a));
    thresholds.dedup();

    let mut uf = UnionFind::new(n);
    let mut active = vec![false; n];
    let mut sizes = SizeCounts::default();
    let mut next = 0;
    let mut steps = Vec::with_capacity(thresholds.len());
    for m in thresholds {
        while next < n && values[order[next] as usize] >= m {
            let u = order[next];
            active[u as usize] = true;
            sizes.add(1);
            for &v in g.neighbors(u) {
                if active[v as usize] {
                    if let Some((a, b)) = uf.union(u, v) {
                        sizes.remove(a);
                        sizes.remove(b);
                        sizes.add(a + b);
                    }
                }
            }
            next += 1;
        }
        let (g1, g2) = sizes.top_two();
        steps.push(PercolationStep {
            m,
            p: next as f64 / n as f64,
            g1,
            g2,
        });
    }

    let mut critical_step = 0;
    for (i, s) in steps.iter().enumerate() {
        if s.g2 > steps[critical_step].g2 {
            critical_step = i;
        }
    }
    Ok(PercolationCurve {
        p_c: steps[critical_step].p,
        m_c: steps[critical_step].m,
        critical_step,
        steps,
    })
}

impl PercolationCurve {
    pub fn write_tsv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "m\tp\tg1\tg2")?;
        for s in &self.steps {
            writeln!(out, "{}\t{}\t{}\t{}", s.m, s.p, s.g1, s.g2)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeyNode {
    pub id: String,
    pub orderliness: f64,
    /// Size of the component the node would form on activation, minus the
    /// largest active component it touches.
    pub delta_g1: usize,
    pub merged_size: usize,
}

/// Inactive nodes at the critical threshold ranked by how much their lone
/// activation grows the component they join. Ties are broken by node id.
pub fn key_nodes(
    g: &FriendshipNetwork,
    values: &[f64],
    curve: &PercolationCurve,
    top_k: usize,
) -> Result<Vec<KeyNode>> {
    if values.len() != g.node_count() {
        return Err(invalid(format!(
            "{} values for {} nodes",
            values.len(),
            g.node_count()
        )));
    }
    let active: Vec<bool> = values.iter().map(|&v| v >= curve.m_c).collect();
    let mut uf = UnionFind::new(g.node_count());
    for (u, v) in g.edges() {
        if active[u as usize] && active[v as usize] {
            uf.union(u, v);
        }
    }
    let mut out = Vec::new();
    for u in g.nodes().filter(|&u| !active[u as usize]) {
        let mut roots: Vec<u32> = g
            .neighbors(u)
            .iter()
            .filter(|&&v| active[v as usize])
            .map(|&v| uf.find(v))
            .collect();
        roots.sort_unstable();
        roots.dedup();
        let sizes: Vec<usize> = roots.iter().map(|&r| uf.size_of(r) as usize).collect();
        let merged_size = 1 + sizes.iter().sum::<usize>();
        let largest_touched = sizes.iter().copied().max().unwrap_or(0);
        out.push(KeyNode {
            id: g.id(u).to_string(),
            orderliness: values[u as usize],
            delta_g1: merged_size - largest_touched,
            merged_size,
        });
    }
    out.sort_by(|a, b| b.delta_g1.cmp(&a.delta_g1).then_with(|| a.id.cmp(&b.id)));
    out.truncate(top_k);
    Ok(out)
}

/// Key nodes using the orderliness attribute.
pub fn key_nodes_by_orderliness(
    g: &FriendshipNetwork,
    curve: &PercolationCurve,
    top_k: usize,
) -> Result<Vec<KeyNode>> {
    key_nodes(g, &orderliness_values(g)?, curve, top_k)
}
