use std::io::Write;

use serde::{Deserialize, Serialize};

use super::metrics::{connected_components, topology, PathMode};
use super::network::FriendshipNetwork;
use super::powerlaw::densification_fit;
use crate::error::Result;
use crate::par::par_map;

/// Per-window network statistics. Field names follow the usual table headings:
/// size, edges, component count and the two largest components, then the
/// topology of the giant component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionRow {
    pub label: String,
    pub window_start: Option<i64>,
    #[serde(rename = "S_G")]
    pub size: usize,
    #[serde(rename = "E_G")]
    pub edges: usize,
    #[serde(rename = "N")]
    pub components: usize,
    #[serde(rename = "S_G1")]
    pub largest: usize,
    #[serde(rename = "S_G2")]
    pub second_largest: usize,
    pub beta: Option<f64>,
    /// Giant-component edge count.
    pub gcc_edges: usize,
    pub rho: Option<f64>,
    pub c_avg: Option<f64>,
    #[serde(rename = "L_avg")]
    pub l_avg: Option<f64>,
    pub k_avg: Option<f64>,
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionReport {
    pub rows: Vec<EvolutionRow>,
    /// Densification exponent over the giant components, when ≥ 3 windows fit.
    pub gamma: Option<f64>,
}

pub fn evolution_row(g: &FriendshipNetwork, mode: PathMode) -> Result<EvolutionRow> {
    let comps = connected_components(g);
    let (gcc_edges, topo) = match comps.components.first() {
        Some(c) if c.len() >= 2 => {
            let gcc = g.induced_subgraph(c);
            (gcc.edge_count(), Some(topology(&gcc, mode)?))
        }
        _ => (0, None),
    };
    Ok(EvolutionRow {
        label: g.label().to_string(),
        window_start: g.window().map(|w| w.start),
        size: g.node_count(),
        edges: g.edge_count(),
        components: comps.count,
        largest: comps.largest,
        second_largest: comps.second_largest,
        beta: comps.beta.as_ref().map(|b| b.exponent),
        gcc_edges,
        rho: topo.as_ref().map(|t| t.rho),
        c_avg: topo.as_ref().map(|t| t.c_avg),
        l_avg: topo.as_ref().map(|t| t.l_avg),
        k_avg: topo.as_ref().map(|t| t.k_avg),
        alpha: topo.and_then(|t| t.alpha),
    })
}

/// One row per network, ordered by window start (unwindowed networks last, in
/// input order).
pub fn evolution_report(networks: &[FriendshipNetwork], mode: PathMode) -> Result<EvolutionReport> {
    let mut order: Vec<&FriendshipNetwork> = networks.iter().collect();
    order.sort_by_key(|g| g.window().map_or(i64::MAX, |w| w.start));
    let rows: Vec<Result<EvolutionRow>> =
        par_map!(order, |g: &&FriendshipNetwork| evolution_row(g, mode));
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let series: Vec<(u64, u64)> = rows
        .iter()
        .filter(|r| r.largest >= 2 && r.gcc_edges >= 1)
        .map(|r| (r.largest as u64, r.gcc_edges as u64))
        .collect();
    Ok(EvolutionReport {
        gamma: densification_fit(&series).ok(),
        rows,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl EvolutionReport {
    pub const TSV_HEADER: &'static str =
        "label\tS_G\tE_G\tN\tS_G1\tS_G2\tbeta\trho\tc_avg\tL_avg\tk_avg\talpha";

    pub fn write_tsv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{}", Self::TSV_HEADER)?;
        for r in &self.rows {
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                r.label,
                r.size,
                r.edges,
                r.components,
                r.largest,
                r.second_largest,
                opt(r.beta),
                opt(r.rho),
                opt(r.c_avg),
                opt(r.l_avg),
                opt(r.k_avg),
                opt(r.alpha),
            )?;
        }
        Ok(())
    }
}
