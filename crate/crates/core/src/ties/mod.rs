//! Friend-tie inference from canteen co-occurrences.

mod edges;
mod infer;
mod model;

pub use edges::{validate_against_ground_truth, EdgeCount, EdgeList, Validation};
pub use infer::{
    count_cooccurrences, infer_network, threshold_sweep, TieParams, DEFAULT_WINDOW_SECONDS,
    SESSION_GAP_SECONDS,
};
pub use model::{CooccurrenceModel, EncounterTail, TailValue};
