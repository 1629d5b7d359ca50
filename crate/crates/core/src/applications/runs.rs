//! End-to-end runs of the two applications, and re-checks of their reports.

use std::collections::HashSet;

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::patterns::{count_injections, is_t_avoiding, mad, Pattern};
use super::rainbow::{is_rainbow_matching, ColouredEdge, RainbowInstance};
use super::steiner::{
    binomial, is_partial_steiner, residual_stats, ResidualStats, SteinerInstance,
};
use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::matcher::{
    derive_params, run_pipeline, verify_report, MatchReport, Overrides, VerifyFailure,
};
use crate::rng;
use crate::weights::TupleWeightFunction;

/// Codegree exponent used by the application runs.
pub const DEFAULT_CODEGREE_EXPONENT: f64 = 0.5;
/// Number of disjoint block pairs carrying the sampled pair weight.
pub const DEFAULT_PAIR_SAMPLES: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternStat {
    pub pattern: Pattern,
    pub injections: u64,
    /// p^{e(F)} n^{v(F)}.
    pub expected: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteinerReport {
    pub n: usize,
    pub k: usize,
    pub t: usize,
    pub density: f64,
    /// Sorted k-subsets of `[n]`.
    pub blocks: Vec<Vec<u32>>,
    /// C(n,t)/C(k,t), the size of a full Steiner system.
    pub full_size: f64,
    /// |S| / full size.
    pub coverage: f64,
    pub partial_steiner: bool,
    pub patterns: Vec<PatternStat>,
    pub residual: ResidualStats,
    pub pair_samples: usize,
    pub pipeline: MatchReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RainbowReport {
    pub n_left: usize,
    pub n_right: usize,
    pub edges: Vec<ColouredEdge>,
    /// Graph edges of the rainbow matching.
    pub matching: Vec<ColouredEdge>,
    pub size: usize,
    pub rainbow: bool,
    pub pipeline: MatchReport,
}

/// Pipeline settings shared by the application runs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSettings {
    pub overrides: Overrides,
    pub codegree_exponent: f64,
    /// Raised to the largest weight arity when smaller.
    pub max_arity: Option<usize>,
}

impl Default for RunSettings {
    fn default() -> Self {
        Self {
            overrides: Overrides::default(),
            codegree_exponent: DEFAULT_CODEGREE_EXPONENT,
            max_arity: None,
        }
    }
}

impl RunSettings {
    pub fn new(overrides: Overrides) -> Self {
        Self {
            overrides,
            ..Self::default()
        }
    }

    fn arity(&self, weights: &[TupleWeightFunction<f64>]) -> usize {
        let own = weights
            .iter()
            .map(TupleWeightFunction::ell)
            .max()
            .unwrap_or(1);
        self.max_arity.map_or(own, |l| l.max(own))
    }
}

/// Rejects patterns that are not t-avoiding or have mad(F) ≥ k/(k−t).
pub fn admit_pattern(f: &Pattern, k: usize, t: usize) -> Result<()> {
    if f.k != k {
        return Err(Error::PatternRejected(format!(
            "pattern edges have size {}, blocks have size {k}",
            f.k
        )));
    }
    if !is_t_avoiding(f, t) {
        return Err(Error::PatternRejected(format!(
            "two edges of {:?} share {t} or more vertices",
            f.edges
        )));
    }
    let m = mad(f)?;
    let limit = num_rational::Ratio::new(k as i64, (k - t) as i64);
    if m >= limit {
        return Err(Error::PatternRejected(format!(
            "mad = {m} is not below k/(k−t) = {limit}"
        )));
    }
    Ok(())
}

/// ω ≡ 1 on blocks, plus weight 1 on `samples` random disjoint block
/// pairs drawn from a stream of `seed`.
pub fn steiner_weights(
    h: &Hypergraph,
    samples: usize,
    seed: u64,
) -> Result<Vec<TupleWeightFunction<f64>>> {
    let m = h.num_edges();
    let mut weights = vec![TupleWeightFunction::uniform(m, 1.0)?];
    if samples == 0 || m < 2 {
        return Ok(weights);
    }
    let mut rng = rng::stream(seed, "pair-weights", &[]);
    let mut pairs = HashSet::with_capacity(samples);
    let mut tries = 0usize;
    while pairs.len() < samples && tries < 20 * samples {
        tries += 1;
        let (a, b) = (rng.gen_range(0..m), rng.gen_range(0..m));
        let (a, b) = (a.min(b), a.max(b));
        if a != b && h.is_matching(&[a, b])? {
            pairs.insert((a, b));
        }
    }
    let mut pairs: Vec<(usize, usize)> = pairs.into_iter().collect();
    pairs.sort_unstable();
    weights.push(TupleWeightFunction::new(
        2,
        m,
        pairs.into_iter().map(|(a, b)| (vec![a, b], 1.0)),
    )?);
    Ok(weights)
}

fn pattern_stats(
    n: usize,
    density: f64,
    blocks: &[Vec<u32>],
    patterns: &[Pattern],
) -> Result<Vec<PatternStat>> {
    patterns
        .par_iter()
        .map(|f| {
            let injections = count_injections(f, n, blocks)?;
            let expected =
                density.powi(f.num_edges() as i32) * (n as f64).powi(f.num_vertices as i32);
            Ok(PatternStat {
                pattern: f.clone(),
                injections,
                expected,
                ratio: injections as f64 / expected,
            })
        })
        .collect()
}

/// Runs the pipeline on π(K_n^k) with Δ = 1/p unless overridden, maps the
/// matching back to blocks and counts each pattern in the result.
pub fn steiner_run(
    n: usize,
    k: usize,
    t: usize,
    patterns: &[Pattern],
    pair_samples: usize,
    settings: &RunSettings,
) -> Result<SteinerReport> {
    for f in patterns {
        admit_pattern(f, k, t)?;
    }
    let inst = SteinerInstance::new(n, k, t)?;
    let h = &inst.hypergraph;
    let mut overrides = settings.overrides.clone();
    overrides.delta.get_or_insert(inst.delta());
    let seed = overrides.seed.unwrap_or(rng::DEFAULT_SEED);
    let weights = steiner_weights(h, pair_samples, seed)?;
    let params = derive_params(
        h,
        settings.codegree_exponent,
        settings.arity(&weights),
        &overrides,
    )?;
    let pipeline = run_pipeline(h, &weights, &params)?;

    let blocks: Vec<Vec<u32>> = pipeline.matching.iter().map(|&e| inst.block(e)).collect();
    let full_size = binomial(n as u64, t as u64).expect("bounded") as f64
        / binomial(k as u64, t as u64).expect("bounded") as f64;
    Ok(SteinerReport {
        n,
        k,
        t,
        density: inst.density(),
        full_size,
        coverage: blocks.len() as f64 / full_size,
        partial_steiner: is_partial_steiner(n, t, &blocks),
        patterns: pattern_stats(n, inst.density(), &blocks, patterns)?,
        residual: residual_stats(n, t, &blocks),
        blocks,
        pair_samples,
        pipeline,
    })
}

/// Runs the pipeline on the rainbow hypergraph with ω ≡ 1.
pub fn rainbow_run(instance: &RainbowInstance, settings: &RunSettings) -> Result<RainbowReport> {
    let h = &instance.hypergraph;
    let weights = vec![TupleWeightFunction::uniform(h.num_edges(), 1.0)?];
    let params = derive_params(
        h,
        settings.codegree_exponent,
        settings.arity(&weights),
        &settings.overrides,
    )?;
    let pipeline = run_pipeline(h, &weights, &params)?;
    let matching = instance.graph_edges(&pipeline.matching);
    Ok(RainbowReport {
        n_left: instance.n_left,
        n_right: instance.n_right,
        edges: instance.edges.clone(),
        size: matching.len(),
        rainbow: is_rainbow_matching(&matching),
        matching,
        pipeline,
    })
}

/// Re-derives every claim of a Steiner report from its parameters.
pub fn verify_steiner(report: &SteinerReport) -> std::result::Result<(), VerifyFailure> {
    use VerifyFailure::*;
    let inst = SteinerInstance::new(report.n, report.k, report.t)
        .map_err(|e| InstanceMismatch(e.to_string()))?;
    let weights = steiner_weights(
        &inst.hypergraph,
        report.pair_samples,
        report.pipeline.params.seed,
    )
    .map_err(|e| WeightRecomputation(e.to_string()))?;
    verify_report(&inst.hypergraph, &weights, &report.pipeline)?;
    let blocks: Vec<Vec<u32>> = report
        .pipeline
        .matching
        .iter()
        .map(|&e| inst.block(e))
        .collect();
    if blocks != report.blocks {
        return Err(MatchingValidity(
            "block list does not match the pipeline matching".into(),
        ));
    }
    if !is_partial_steiner(report.n, report.t, &blocks) || !report.partial_steiner {
        return Err(MatchingValidity("some t-subset lies in two blocks".into()));
    }
    let stats = pattern_stats(
        report.n,
        inst.density(),
        &blocks,
        &report
            .patterns
            .iter()
            .map(|p| p.pattern.clone())
            .collect::<Vec<_>>(),
    )
    .map_err(|e| WeightRecomputation(e.to_string()))?;
    if stats
        .iter()
        .zip(&report.patterns)
        .any(|(a, b)| a.injections != b.injections)
    {
        return Err(WeightRecomputation(
            "pattern counts differ on recount".into(),
        ));
    }
    Ok(())
}

/// Re-checks a rainbow report against the coloured graph it carries.
pub fn verify_rainbow(report: &RainbowReport) -> std::result::Result<(), VerifyFailure> {
    use VerifyFailure::*;
    let inst = RainbowInstance::new(report.n_left, report.n_right, report.edges.clone())
        .map_err(|e| InstanceMismatch(e.to_string()))?;
    let weights = vec![
        TupleWeightFunction::uniform(inst.hypergraph.num_edges(), 1.0)
            .map_err(|e| WeightRecomputation(e.to_string()))?,
    ];
    verify_report(&inst.hypergraph, &weights, &report.pipeline)?;
    if inst.graph_edges(&report.pipeline.matching) != report.matching
        || report.size != report.matching.len()
    {
        return Err(MatchingValidity(
            "graph matching does not match the pipeline matching".into(),
        ));
    }
    if !is_rainbow_matching(&report.matching) || !report.rainbow {
        return Err(MatchingValidity("matching is not rainbow".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::applications::latin::{latin_square, LatinKind};

    fn cherry() -> Pattern {
        Pattern::new(3, vec![vec![0, 1, 2], vec![0, 3, 4]]).unwrap()
    }

    #[test]
    fn pattern_admission() {
        assert!(admit_pattern(&cherry(), 3, 2).is_ok());
        let shared_pair = Pattern::new(3, vec![vec![0, 1, 2], vec![0, 1, 3]]).unwrap();
        assert!(matches!(
            admit_pattern(&shared_pair, 3, 2),
            Err(Error::PatternRejected(_))
        ));
        // the Fano plane has mad 3 = k/(k−t)
        let fano = Pattern::new(
            3,
            vec![
                vec![0, 1, 2],
                vec![0, 3, 4],
                vec![0, 5, 6],
                vec![1, 3, 5],
                vec![1, 4, 6],
                vec![2, 3, 6],
                vec![2, 4, 5],
            ],
        )
        .unwrap();
        assert!(matches!(
            admit_pattern(&fano, 3, 2),
            Err(Error::PatternRejected(_))
        ));
    }

    #[test]
    fn pair_weights_are_clean() {
        let inst = SteinerInstance::new(9, 3, 2).unwrap();
        let w = steiner_weights(&inst.hypergraph, 50, 3).unwrap();
        assert_eq!(w.len(), 2);
        assert_eq!(w[1].support_len(), 50);
        assert!(w[1].is_clean(&inst.hypergraph).unwrap());
    }

    #[test]
    fn small_steiner_run() {
        let f0 = Pattern::new(3, vec![vec![0, 1, 2]]).unwrap();
        let report = steiner_run(
            13,
            3,
            2,
            &[f0, cherry()],
            200,
            &RunSettings::new(Overrides::single_slice()),
        )
        .unwrap();
        assert!(report.partial_steiner);
        assert_eq!(
            report.patterns[0].injections,
            6 * report.blocks.len() as u64
        );
        assert!(verify_steiner(&report).is_ok());
        let mut bad = report.clone();
        bad.patterns[1].injections += 1;
        assert!(matches!(
            verify_steiner(&bad),
            Err(VerifyFailure::WeightRecomputation(_))
        ));
    }

    #[test]
    fn small_rainbow_run() {
        let inst = RainbowInstance::from_latin(&latin_square(9, LatinKind::Cyclic)).unwrap();
        let report = rainbow_run(&inst, &RunSettings::new(Overrides::single_slice())).unwrap();
        assert!(report.rainbow && report.size > 0);
        assert!(verify_rainbow(&report).is_ok());
    }
}
