//! Campus friendship networks from co-occurrence records.
//!
//! The crate infers friend ties from canteen check-ins with a chance
//! co-occurrence threshold, measures the resulting networks, scores students'
//! behavioral regularity and diligence, and relates those attributes to the
//! network through assortativity and threshold percolation. A synthetic campus
//! generator with planted ground truth backs every stage.
//!
//! Data-parallel loops run on rayon when the default `parallel` feature is on
//! and fall back to sequential iteration otherwise; results are identical.

mod error;
pub(crate) mod par;

pub mod behavior;
pub mod graph;
pub mod peer;
pub mod records;
pub mod synth;
pub mod ties;

pub use error::{Error, Result};
pub use par::is_parallel;
