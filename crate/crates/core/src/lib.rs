//! Pseudorandom almost-perfect matchings in uniform hypergraphs with small
//! codegrees.
//!
//! The [`matcher`] runs a randomized three-step construction: a random
//! vertex partition, a random edge slicing, and a uniform choice among
//! matching decompositions of each slice. The output is a matching `M`
//! whose weight under each supplied tuple weight function `ω` is close to
//! `ω(E(H))/Δ^ℓ`. Each intermediate random object is checked and
//! resampled on failure, and a [`matcher::MatchReport`] records what was
//! checked.
//!
//! Around it sit exhaustive [`oracle`]s for tiny instances, an empirical
//! concentration lab, and two [`applications`]: approximate Steiner systems
//! with subgraph counts, and rainbow matchings in Latin squares.
//!
//! ```
//! use nibble::applications::steiner::SteinerInstance;
//! use nibble::matcher::{derive_params, run_pipeline, Overrides};
//! use nibble::Weights;
//!
//! let fano = SteinerInstance::new(7, 3, 2).unwrap();
//! let h = &fano.hypergraph;
//! let ones = Weights::uniform(h.num_edges(), 1.0).unwrap();
//! let params = derive_params(h, 0.5, 1, &Overrides::single_slice()).unwrap();
//! let report = run_pipeline(h, &[ones], &params).unwrap();
//! assert!(h.is_matching(&report.matching).unwrap());
//! ```

pub mod applications;
pub mod check;
pub mod coloring;
pub mod error;
pub mod generators;
pub mod hypergraph;
pub mod matcher;
pub mod oracle;
pub mod rng;
pub mod scalar;
pub mod weights;

pub use error::{Error, Result};
pub use hypergraph::Hypergraph;

/// Weight functions in double precision, used for real runs.
pub type Weights = weights::TupleWeightFunction<f64>;
/// Single-precision weights.
pub type Weights32 = weights::TupleWeightFunction<f32>;
/// Exact rational weights, used against the oracles.
pub type ExactWeights = weights::TupleWeightFunction<num_rational::BigRational>;
/// Small exact rationals.
pub type RatioWeights = weights::TupleWeightFunction<num_rational::Ratio<i64>>;
