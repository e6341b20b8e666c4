//! Friendship networks and their topology.

mod evolution;
mod metrics;
mod network;
mod powerlaw;

pub use evolution::{evolution_report, evolution_row, EvolutionReport, EvolutionRow};
pub use metrics::{
    avg_clustering, avg_degree, avg_shortest_path, connected_components, density, giant_component,
    local_clustering, topology, triangles, ComponentReport, PathMode, TopologyReport,
    DEFAULT_PATH_SOURCES, EXACT_PATH_LIMIT,
};
pub use network::{FriendshipNetwork, NodeAttributes};
pub use powerlaw::{densification_fit, fit_power_law, hurwitz_zeta, PowerLawFit, MIN_TAIL_VALUES};
