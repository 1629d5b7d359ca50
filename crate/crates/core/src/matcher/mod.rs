//! The three-step randomized matching pipeline.
//!
//! 1. Every vertex picks one of `p` parts uniformly; `H_i` keeps the edges
//!    inside part `i` and crossing edges are discarded.
//! 2. Every edge of `H_i` picks one of `q` slices uniformly, giving `H_{i,j}`.
//! 3. Each slice is decomposed into matchings, padded with empty classes to
//!    a common count `M`, so part `i` owns a list of `qM` matchings. One
//!    index `s_i ∈ [qM]` per part is drawn uniformly and the output is the
//!    union of the chosen matchings.
//!
//! Steps 1 and 2 are checked against the conditions the analysis needs
//! and resampled on failure; see [`Transcript`] for what gets recorded.
//! The report format is described in `docs/report-format.md`.

mod params;
mod steps;

use rand::Rng as _;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use params::{
    derive_params, Overrides, PipelineParams, DEFAULT_RETRIES, DEFAULT_SLACK, DEFAULT_TOLERANCE,
};
pub use steps::{
    decompose_slices, partition_edges, partition_vertices, pi, step1_checks, step2_checks,
    EdgeSlicing, VertexPartition, MAX_PATTERNS,
};

use crate::check::Check;
use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::rng;
use crate::scalar::Weight;
use crate::weights::{check_hypotheses, ConditionReport, TupleWeightFunction};

/// Outcome of one attempt at Step 1 or Step 2.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Transcript {
    /// `"step1"` or `"step2"`.
    pub step: String,
    /// Zero-based attempt number.
    pub attempt: usize,
    /// Seed of the random stream used by this attempt.
    pub seed: u64,
    pub checks: Vec<Check>,
    /// Patterns J (Step 1) or (J, σ) (Step 2) covered by the checks.
    pub patterns_checked: u64,
    pub patterns_total: u64,
}

impl Transcript {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.pass).count()
    }

    /// Every pass flag agrees with its numbers.
    pub fn is_consistent(&self) -> bool {
        self.checks.iter().all(Check::is_consistent)
    }
}

/// Per-part matching lists after Step 3's padding.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineState {
    pub vertex_part: Vec<u32>,
    /// `None` for crossing edges.
    pub edge_part: Vec<Option<u32>>,
    /// `None` for crossing edges.
    pub edge_slice: Vec<Option<u32>>,
    /// `classes[i][j]`: the matchings of slice `H_{i,j}`.
    pub classes: Vec<Vec<Vec<Vec<u32>>>>,
    p: usize,
    q: usize,
    m: usize,
}

impl PipelineState {
    /// Builds the state from per-slice matchings; `M` becomes the largest
    /// class count of any slice (at least 1).
    pub fn new(
        vertex_part: Vec<u32>,
        edge_part: Vec<Option<u32>>,
        edge_slice: Vec<Option<u32>>,
        classes: Vec<Vec<Vec<Vec<u32>>>>,
    ) -> Result<Self> {
        let p = classes.len();
        let q = classes.first().map_or(0, Vec::len);
        if p == 0 || q == 0 || classes.iter().any(|part| part.len() != q) {
            return Err(Error::BadParams(
                "every part needs the same positive number of slices".into(),
            ));
        }
        let m = classes
            .iter()
            .flatten()
            .map(Vec::len)
            .max()
            .unwrap_or(0)
            .max(1);
        Ok(Self {
            vertex_part,
            edge_part,
            edge_slice,
            classes,
            p,
            q,
            m,
        })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// The common class count `M`.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Length `qM` of each part's matching list.
    pub fn list_len(&self) -> usize {
        self.q * self.m
    }

    /// Matching `s` of part `i`: class `s mod M` of slice `s div M`, empty
    /// when that slice has fewer classes.
    pub fn matching(&self, part: usize, s: usize) -> &[u32] {
        let (j, c) = (s / self.m, s % self.m);
        self.classes[part][j].get(c).map_or(&[], Vec::as_slice)
    }

    /// The union of the chosen matchings, sorted.
    pub fn matching_for(&self, indices: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = indices
            .iter()
            .enumerate()
            .flat_map(|(i, &s)| self.matching(i, s).iter().map(|&e| e as usize))
            .collect();
        out.sort_unstable();
        out
    }

    /// Draws `s_i` uniformly from `[qM]` for each part.
    pub fn select(&self, rng: &mut rng::Rng) -> (Vec<usize>, Vec<usize>) {
        let indices: Vec<usize> = (0..self.p)
            .map(|_| rng.gen_range(0..self.list_len()))
            .collect();
        let matching = self.matching_for(&indices);
        (indices, matching)
    }

    /// Largest class count per part.
    pub fn m_per_part(&self) -> Vec<usize> {
        self.classes
            .iter()
            .map(|part| part.iter().map(Vec::len).max().unwrap_or(0))
            .collect()
    }
}

/// How one weight function fared on the output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightOutcome {
    pub index: usize,
    pub ell: usize,
    /// ω(E(H)).
    pub total: f64,
    /// ω(E(H)) / Δ^ℓ.
    pub target: f64,
    /// ω(M), recomputed from the final matching.
    pub achieved: f64,
    pub ratio: f64,
    /// |ratio − 1| ≤ tolerance.
    pub pass: bool,
    /// The weight function meets its own hypotheses.
    pub eligible: bool,
}

impl WeightOutcome {
    pub fn new(
        index: usize,
        ell: usize,
        total: f64,
        delta: f64,
        achieved: f64,
        tolerance: f64,
        eligible: bool,
    ) -> Self {
        let target = total / delta.powi(ell as i32);
        let ratio = if target > 0.0 {
            achieved / target
        } else if achieved == 0.0 {
            1.0
        } else {
            f64::INFINITY
        };
        let pass = (ratio - 1.0).abs() <= tolerance;
        Self {
            index,
            ell,
            total,
            target,
            achieved,
            ratio,
            pass,
            eligible,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Seeds {
    pub master: u64,
    pub step1: u64,
    pub step2: u64,
    pub selection: u64,
    /// The chosen `s_i`, one per part.
    pub indices: Vec<usize>,
}

/// Everything a pipeline run produces, in the form written to disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchReport {
    pub r: usize,
    pub num_vertices: usize,
    pub num_edges: usize,
    /// Edge ids of the output matching, ascending.
    pub matching: Vec<usize>,
    pub weights: Vec<WeightOutcome>,
    pub params: PipelineParams,
    pub hypotheses: ConditionReport,
    /// The accepted Step 1 and Step 2 transcripts.
    pub transcripts: Vec<Transcript>,
    pub attempts_step1: usize,
    pub attempts_step2: usize,
    /// The common class count `M`.
    pub m: usize,
    pub m_per_part: Vec<usize>,
    /// Fraction of edges lost to crossing the vertex partition.
    pub discarded_fraction: f64,
    pub seeds: Seeds,
}

impl MatchReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn all_weights_pass(&self) -> bool {
        self.weights.iter().all(|w| w.pass)
    }
}

/// Runs Steps 1 to 3 and reports ω(M) against ω(E(H))/Δ^ℓ for every
/// weight function. Deterministic for fixed inputs and seed, whatever the
/// thread count.
pub fn run_pipeline<W: Weight>(
    h: &Hypergraph,
    weights: &[TupleWeightFunction<W>],
    params: &PipelineParams,
) -> Result<MatchReport> {
    let hypotheses = check_hypotheses(
        h,
        params.delta,
        params.codegree_exponent,
        params.max_arity,
        weights,
    )?;
    let wf: Vec<TupleWeightFunction<f64>> =
        weights.iter().map(TupleWeightFunction::to_f64).collect();
    let mut report = MatchReport {
        r: h.r(),
        num_vertices: h.num_vertices(),
        num_edges: h.num_edges(),
        matching: Vec::new(),
        weights: Vec::new(),
        params: params.clone(),
        hypotheses,
        transcripts: Vec::new(),
        attempts_step1: 0,
        attempts_step2: 0,
        m: 0,
        m_per_part: Vec::new(),
        discarded_fraction: 0.0,
        seeds: Seeds {
            master: params.seed,
            ..Seeds::default()
        },
    };
    if !h.is_empty() {
        let (parts, t1) = partition_vertices(h, &wf, params)?;
        let (slicing, t2) = partition_edges(h, &parts, &wf, params)?;
        let classes = decompose_slices(h, &slicing, params);
        let state = PipelineState::new(
            parts.vertex_part.clone(),
            (0..h.num_edges())
                .map(|e| parts.part_of_edge(e).map(|i| i as u32))
                .collect(),
            slicing
                .edge_slice
                .iter()
                .map(|&j| (j != u32::MAX).then_some(j))
                .collect(),
            classes,
        )?;
        let mut rng = rng::stream(params.seed, "select", &[]);
        let (indices, matching) = state.select(&mut rng);
        debug_assert!(h.is_matching(&matching).unwrap_or(false));

        report.attempts_step1 = t1.attempt + 1;
        report.attempts_step2 = t2.attempt + 1;
        report.seeds.step1 = t1.seed;
        report.seeds.step2 = t2.seed;
        report.seeds.selection = rng::derive_seed(params.seed, "select", &[]);
        report.seeds.indices = indices;
        report.transcripts = vec![t1, t2];
        report.m = state.m();
        report.m_per_part = state.m_per_part();
        report.discarded_fraction = parts.crossing_edges() as f64 / h.num_edges() as f64;
        report.matching = matching;
    }
    for (index, omega) in weights.iter().enumerate() {
        let achieved = omega.total(&report.matching)?.as_f64();
        report.weights.push(WeightOutcome::new(
            index,
            omega.ell(),
            omega.total_all().as_f64(),
            params.delta,
            achieved,
            params.tolerance,
            report
                .hypotheses
                .eligible
                .get(index)
                .copied()
                .unwrap_or(false),
        ));
    }
    Ok(report)
}

/// The first claim of a report that does not survive re-checking.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyFailure {
    #[error("instance-mismatch: {0}")]
    InstanceMismatch(String),
    #[error("matching-validity: {0}")]
    MatchingValidity(String),
    #[error("weight-recomputation: {0}")]
    WeightRecomputation(String),
    #[error("transcript-consistency: {0}")]
    TranscriptConsistency(String),
}

fn close(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= 1e-9 * a.abs().max(b.abs())
}

/// Re-validates a report against its instance and weight functions.
pub fn verify_report<W: Weight>(
    h: &Hypergraph,
    weights: &[TupleWeightFunction<W>],
    report: &MatchReport,
) -> std::result::Result<(), VerifyFailure> {
    use VerifyFailure::*;
    if (report.r, report.num_vertices, report.num_edges) != (h.r(), h.num_vertices(), h.num_edges())
    {
        return Err(InstanceMismatch(format!(
            "report is for (r, v, e) = ({}, {}, {}), instance is ({}, {}, {})",
            report.r,
            report.num_vertices,
            report.num_edges,
            h.r(),
            h.num_vertices(),
            h.num_edges()
        )));
    }
    if report.matching.windows(2).any(|w| w[0] >= w[1]) {
        return Err(MatchingValidity(
            "edge ids are not strictly ascending".into(),
        ));
    }
    match h.is_matching(&report.matching) {
        Ok(true) => {}
        Ok(false) => return Err(MatchingValidity("two chosen edges share a vertex".into())),
        Err(e) => return Err(MatchingValidity(e.to_string())),
    }

    if report.weights.len() != weights.len() {
        return Err(WeightRecomputation(format!(
            "report lists {} weight functions, {} supplied",
            report.weights.len(),
            weights.len()
        )));
    }
    for (omega, claimed) in weights.iter().zip(&report.weights) {
        let achieved = omega
            .total(&report.matching)
            .map_err(|e| WeightRecomputation(e.to_string()))?
            .as_f64();
        let again = WeightOutcome::new(
            claimed.index,
            omega.ell(),
            omega.total_all().as_f64(),
            report.params.delta,
            achieved,
            report.params.tolerance,
            claimed.eligible,
        );
        let same = again.ell == claimed.ell
            && close(again.total, claimed.total)
            && close(again.target, claimed.target)
            && close(again.achieved, claimed.achieved)
            && close(again.ratio, claimed.ratio)
            && again.pass == claimed.pass;
        if !same {
            return Err(WeightRecomputation(format!(
                "weight {}: claimed achieved {} (ratio {}), recomputed {} (ratio {})",
                claimed.index, claimed.achieved, claimed.ratio, again.achieved, again.ratio
            )));
        }
    }

    if let Some(c) = report.hypotheses.checks.iter().find(|c| !c.is_consistent()) {
        return Err(TranscriptConsistency(format!(
            "hypothesis check {} has an inconsistent flag",
            c.name
        )));
    }
    for t in &report.transcripts {
        if let Some(c) = t.checks.iter().find(|c| !c.is_consistent()) {
            return Err(TranscriptConsistency(format!(
                "{} check {} has an inconsistent flag",
                t.step, c.name
            )));
        }
        if !t.passed() {
            return Err(TranscriptConsistency(format!(
                "accepted {} transcript has failing checks",
                t.step
            )));
        }
    }
    if !h.is_empty() {
        let steps: Vec<&str> = report.transcripts.iter().map(|t| t.step.as_str()).collect();
        if steps != ["step1", "step2"] {
            return Err(TranscriptConsistency(format!(
                "expected step1 and step2 transcripts, found {steps:?}"
            )));
        }
        if report.seeds.indices.len() != report.params.p {
            return Err(TranscriptConsistency(
                "one selection index per part expected".into(),
            ));
        }
        let range = report.params.q * report.m;
        if report.seeds.indices.iter().any(|&s| s >= range) {
            return Err(TranscriptConsistency(format!(
                "a selection index is outside [qM] = [{range}]"
            )));
        }
    }
    Ok(())
}
