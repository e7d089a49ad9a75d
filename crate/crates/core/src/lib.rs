//! Desk-scale laboratory for squares of Hamilton cycles in random graphs.
//!
//! The library is organized around the copy hypergraph of the square of a
//! Hamilton cycle: all `(n-1)!/2` cyclic orderings of `[n]`, each contributing
//! the edge set of its second power. On top of that sit
//!
//! * exact counting and enumeration ([`copies`]),
//! * a complete backtracking solver for spanning cycle powers ([`solver`]),
//! * exhaustive audits of the counting bounds that control local spread
//!   ([`spread`]),
//! * the two-round fragment experiment and its second-moment statistic
//!   ([`fragments`]),
//! * Monte Carlo threshold curves over `p = C/sqrt(n)` ([`threshold`]).
//!
//! Everything stochastic is driven by [`rng::RngStream`], a seeded splittable
//! stream, so every experiment is reproducible bit for bit. Audit comparisons
//! are exact: big integers and rationals, with directed rounding intervals for
//! the few transcendental constants involved.
//!
//! With the `parallel` feature (on by default) the heavy sweeps run on rayon;
//! without it everything falls back to the sequential reference paths, which
//! are also exported with a `_seq` suffix for benchmarking the two against
//! each other.

pub mod bits;
pub mod copies;
pub mod error;
pub mod exact;
pub mod fragments;
pub mod graph;
pub mod par;
pub mod rng;
pub mod solver;
pub mod spread;
pub mod threshold;

pub use error::Error;

/// Hard ceiling on the vertex count of the dense representations.
///
/// Edge sets are fixed-index bitmasks and adjacency rows are single `u64`
/// words, both of which require `n <= 64`. Larger inputs are rejected with
/// [`Error::VertexCountTooLarge`].
pub const MAX_N: u32 = 64;
