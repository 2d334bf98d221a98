//! Monte Carlo machinery for two-category Dempster–Shafer inference.
//!
//! The crate is organised around the affine iterated random function
//!
//! ```text
//! Z(t) = B1 (1 - B2) Z(t-1) + B2,    B1 ~ Beta(N1, 1),  B2 ~ Beta(1, N2)
//! ```
//!
//! whose stationary law is `Beta(N1 + 1, N2)`, together with the categorical
//! geometry that produces it (sub-simplices of the probability simplex and the
//! feasible polytope of parameters consistent with a configuration), a brute
//! force rejection sampler on the feasible set, and the flat-Dirichlet
//! birthday / coupon-collector calculators.
//!
//! | module       | contents                                                     |
//! |--------------|--------------------------------------------------------------|
//! | [`beta`]     | Beta moments, CDF, samplers, `W1(δ_z, Beta)`                 |
//! | [`geometry`] | simplex points, sub-simplex membership, feasible sets        |
//! | [`chain`]    | the two-category chain, analytic bounds, trajectory reports  |
//! | [`oracle`]   | rejection sampling uniformly on the feasible set             |
//! | [`counts`]   | birthday and coupon-collector probabilities                  |
//! | [`stats`]    | Kolmogorov–Smirnov tests and small estimators                |
//! | [`lp`]       | dense two-phase simplex used for `K >= 3` feasibility        |
//! | [`report`]   | CSV / JSON serialization of simulation output                |
//! | [`rng`]      | counter-based splitting of a master seed into streams        |
//!
//! ```
//! use dsgibbs::chain::{self, ChainParams};
//!
//! let params = ChainParams::new(1, 1).unwrap();
//! assert_eq!(chain::stationary_distribution(params).alpha(), 2.0);
//! let bound = chain::worst_case_w1(params, 1);
//! assert!((bound - 1.0 / 6.0).abs() < 1e-15);
//! ```

pub mod beta;
pub mod chain;
pub mod counts;
pub mod error;
pub mod geometry;
pub mod lp;
pub mod oracle;
pub mod report;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};

/// Version string written into every serialized report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Schema version of the JSON documents produced by [`report`].
pub const SCHEMA_VERSION: u32 = 1;
