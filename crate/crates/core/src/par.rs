//! Data-parallel helpers that fall back to sequential iteration when the
//! `parallel` feature is disabled. Every reduction used through these helpers
//! is order-independent (integer sums, keyed merges) or collected in input
//! order, so results do not depend on the worker count.

/// Map over a slice, collecting results in input order.
macro_rules! par_map {
    ($slice:expr, $f:expr) => {{
        #[cfg(feature = "parallel")]
        {
            use rayon::iter::{IntoParallelRefIterator, ParallelIterator};
            $slice.par_iter().map($f).collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            $slice.iter().map($f).collect()
        }
    }};
}

/// Map over an index range, collecting results in index order.
macro_rules! par_range_map {
    ($range:expr, $f:expr) => {{
        #[cfg(feature = "parallel")]
        {
            use rayon::iter::{IntoParallelIterator, ParallelIterator};
            ($range).into_par_iter().map($f).collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            ($range).map($f).collect()
        }
    }};
}

pub(crate) use par_map;
pub(crate) use par_range_map;

/// Whether this build runs the data-parallel paths.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
