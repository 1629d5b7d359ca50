use serde::{Deserialize, Serialize};

use crate::coloring::DEFAULT_EFFORT;
use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::rng::DEFAULT_SEED;
use crate::weights::epsilon;

pub const DEFAULT_SLACK: f64 = 0.25;
pub const DEFAULT_TOLERANCE: f64 = 0.15;
pub const DEFAULT_RETRIES: usize = 20;

/// Everything the pipeline needs besides the hypergraph and the weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineParams {
    /// The degree parameter Δ, at least Δ(H) for the guarantees to apply.
    pub delta: f64,
    /// The codegree exponent δ in (0, 1).
    pub codegree_exponent: f64,
    /// Largest tuple arity L among the weight functions.
    pub max_arity: usize,
    pub epsilon: f64,
    /// Number of vertex parts.
    pub p: usize,
    /// Number of edge slices per part.
    pub q: usize,
    /// Relative tolerance of the Step 1 and Step 2 checks.
    pub slack: f64,
    /// Relative tolerance when comparing ω(M) with ω(E(H))/Δ^ℓ.
    pub tolerance: f64,
    pub retries_step1: usize,
    pub retries_step2: usize,
    /// Local-search budget per slice decomposition.
    pub effort: u64,
    pub seed: u64,
}

/// User choices that take precedence over derived values.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Overrides {
    pub delta: Option<f64>,
    pub p: Option<usize>,
    pub q: Option<usize>,
    pub slack: Option<f64>,
    pub tolerance: Option<f64>,
    pub retries: Option<usize>,
    pub effort: Option<u64>,
    pub seed: Option<u64>,
}

impl Overrides {
    /// The desk-scale setting: a single part and a single slice.
    pub fn single_slice() -> Self {
        Self {
            p: Some(1),
            q: Some(1),
            ..Self::default()
        }
    }
}

/// Derives ε, p and q from Δ, δ, L and r, clamped to sensible ranges:
/// p = Δ^{20Lrε} within [1, ⌊v/2r⌋] and q = Δ^{1−20(r−1+1/4L)Lrε} within
/// [1, Δ]. Overrides win.
pub fn derive_params(
    h: &Hypergraph,
    codegree_exponent: f64,
    max_arity: usize,
    overrides: &Overrides,
) -> Result<PipelineParams> {
    let r = h.r();
    if r < 2 {
        return Err(Error::UniformityTooSmall(r));
    }
    if !(codegree_exponent > 0.0 && codegree_exponent < 1.0) {
        return Err(Error::BadDelta(codegree_exponent));
    }
    if max_arity == 0 {
        return Err(Error::BadParams("tuple arity L must be at least 1".into()));
    }
    let delta = overrides
        .delta
        .unwrap_or_else(|| h.max_degree().max(1) as f64);
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::BadParams(format!("Δ must be positive, got {delta}")));
    }
    let slack = overrides.slack.unwrap_or(DEFAULT_SLACK);
    let tolerance = overrides.tolerance.unwrap_or(DEFAULT_TOLERANCE);
    if !(slack > 0.0 && tolerance >= 0.0) {
        return Err(Error::BadParams(format!(
            "slack must be positive, got {slack}; tolerance {tolerance}"
        )));
    }

    let eps = epsilon(codegree_exponent, max_arity, r);
    let (l, rf) = (max_arity as f64, r as f64);
    let p_max = (h.num_vertices() / (2 * r)).max(1);
    let p_auto = delta
        .powf(20.0 * l * rf * eps)
        .round()
        .clamp(1.0, p_max as f64) as usize;
    let q_exp = 1.0 - 20.0 * (rf - 1.0 + 1.0 / (4.0 * l)) * l * rf * eps;
    let q_auto = delta.powf(q_exp).round().clamp(1.0, delta.floor().max(1.0)) as usize;
    let p = overrides.p.unwrap_or(p_auto);
    let q = overrides.q.unwrap_or(q_auto);
    if p == 0 || q == 0 {
        return Err(Error::BadParams(format!(
            "p and q must be at least 1, got p={p}, q={q}"
        )));
    }
    let retries = overrides.retries.unwrap_or(DEFAULT_RETRIES);
    Ok(PipelineParams {
        delta,
        codegree_exponent,
        max_arity,
        epsilon: eps,
        p,
        q,
        slack,
        tolerance,
        retries_step1: retries,
        retries_step2: retries,
        effort: overrides.effort.unwrap_or(DEFAULT_EFFORT),
        seed: overrides.seed.unwrap_or(DEFAULT_SEED),
    })
}
