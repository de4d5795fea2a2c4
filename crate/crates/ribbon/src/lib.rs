//! Static approximate-membership filters and r-bit retrieval structures
//! built on incremental boolean banding.
//!
//! A filter is constructed by solving a banded linear system over GF(2): each
//! key contributes one equation whose coefficients occupy a window of `w`
//! consecutive solution rows starting at a hashed position. Insertion keeps
//! the system in reduced band form on the fly, back-substitution produces the
//! solution matrix, and a query recomputes the key's equation against it.
//!
//! Three variants are provided:
//!
//! * **Standard** — stores an `r`-bit fingerprint per key; construction can
//!   fail and is retried under a fresh seed.
//! * **Homogeneous** — all right-hand sides are zero, so construction never
//!   fails; free rows are filled pseudo-randomly and a query accepts iff the
//!   retrieved value is zero.
//! * **Balanced** (experimental) — soft-sharded standard construction with
//!   greedy load balancing and one bump bit per shard bucket, for very low
//!   space overhead at large scale.
//!
//! ```
//! use ribbon::{build_homogeneous, config_for_count, KeyHash, Variant};
//!
//! let keys: Vec<KeyHash> = (0..10_000u64).map(|i| KeyHash(i.wrapping_mul(0x9E3779B97F4A7C15))).collect();
//! let cfg = config_for_count(keys.len(), 7.0, 64, None, None, Variant::Homogeneous, 0).unwrap();
//! let (filter, report) = build_homogeneous::<u64>(&keys, &cfg).unwrap();
//! assert!(keys.iter().all(|&k| filter.contains(k)));
//! assert!(report.bits_per_key < 8.0);
//! ```

pub mod balanced;
pub mod banding;
pub mod config;
pub mod error;
pub mod filter;
pub mod hash;
pub mod solve;
pub mod words;

pub use balanced::{
    assign_locations, build_balanced, build_balanced_with_plan, default_balanced_epsilon,
    query_balanced, Assignment, BalancedFilter, ShardPlan, BUCKETS_PER_SHARD,
};
pub use banding::{BandingStorage, Equation, InsertOutcome};
pub use config::{default_smash, RibbonConfig, Variant, SUPPORTED_WIDTHS};
pub use error::RibbonError;
pub use filter::{
    build_homogeneous, build_standard, config_for_count, config_from_space, grow_m,
    homogeneous_small_n_warning, recommended_epsilon, standard_epsilon_hint, BuildReport,
    RibbonFilter,
};
pub use hash::{
    coefficient_vector, derive_seeded_hash, fastrange64, fingerprint, start_in_range, KeyHash,
    SplitMix64,
};
pub use solve::{
    back_substitute, filter_query, FreeVariablePolicy, Layout, SolutionStorage,
    FREE_VARIABLE_MULTIPLIER,
};
pub use words::RibbonWord;

/// Start position for a full-range configuration, `[0, m - w]`.
pub fn start_position(h: KeyHash, cfg: &RibbonConfig) -> usize {
    hash::start_in_range(h, cfg.num_starts(), cfg.smash)
}
