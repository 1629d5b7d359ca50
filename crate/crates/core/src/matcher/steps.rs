use std::collections::{BTreeMap, HashMap};

use rand::seq::index;
use rand::Rng as _;
use rayon::prelude::*;

use super::{PipelineParams, Transcript};
use crate::applications::steiner::{binomial, factorial};
use crate::check::Check;
use crate::coloring::decompose;
use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::rng;
use crate::weights::TupleWeightFunction;

/// Part patterns checked exhaustively up to this count, sampled beyond.
pub const MAX_PATTERNS: u64 = 10_000;

const NONE: u32 = u32::MAX;

/// Step 1 output: each vertex in one of `p` parts; an edge belongs to part
/// `i` iff all its vertices do.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexPartition {
    pub p: usize,
    pub vertex_part: Vec<u32>,
    /// `u32::MAX` marks a crossing edge.
    pub edge_part: Vec<u32>,
}

impl VertexPartition {
    pub fn from_vertex_parts(h: &Hypergraph, p: usize, vertex_part: Vec<u32>) -> Self {
        let edge_part = h
            .edges()
            .map(|e| {
                let i = vertex_part[e[0] as usize];
                if e.iter().all(|&v| vertex_part[v as usize] == i) {
                    i
                } else {
                    NONE
                }
            })
            .collect();
        Self {
            p,
            vertex_part,
            edge_part,
        }
    }

    pub fn part_of_edge(&self, e: usize) -> Option<usize> {
        (self.edge_part[e] != NONE).then_some(self.edge_part[e] as usize)
    }

    pub fn crossing_edges(&self) -> usize {
        self.edge_part.iter().filter(|&&i| i == NONE).count()
    }
}

/// Step 2 output: every non-crossing edge in one of `q` slices of its part.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSlicing {
    pub q: usize,
    /// `u32::MAX` for crossing edges.
    pub edge_slice: Vec<u32>,
    /// `slices[i][j]`: edge ids of H_{i,j}, ascending.
    pub slices: Vec<Vec<Vec<u32>>>,
}

impl EdgeSlicing {
    pub fn from_edge_slices(parts: &VertexPartition, q: usize, edge_slice: Vec<u32>) -> Self {
        let mut slices = vec![vec![Vec::new(); q]; parts.p];
        for (e, &j) in edge_slice.iter().enumerate() {
            if let Some(i) = parts.part_of_edge(e) {
                slices[i][j as usize].push(e as u32);
            }
        }
        Self {
            q,
            edge_slice,
            slices,
        }
    }
}

/// π(J) for a sorted multiset `J`: the number of maps [ℓ] → supp(J) whose
/// multiset of values is `J`, i.e. ℓ! / Π mult!.
pub fn pi(j: &[u32]) -> u64 {
    let mut out = factorial(j.len() as u64);
    for run in j.chunk_by(|a, b| a == b) {
        out /= factorial(run.len() as u64);
    }
    out
}

/// Number of size-ℓ multisets over [p], saturating.
fn multiset_count(p: usize, ell: usize) -> u64 {
    binomial((p + ell - 1) as u64, ell as u64).unwrap_or(u64::MAX)
}

/// Calls `f` on every nondecreasing sequence of length ℓ over [p].
fn for_each_multiset(p: usize, ell: usize, mut f: impl FnMut(&[u32])) {
    let mut j = vec![0u32; ell];
    loop {
        f(&j);
        let Some(pos) = (0..ell).rev().find(|&i| (j[i] as usize) < p - 1) else {
            return;
        };
        let next = j[pos] + 1;
        for x in &mut j[pos..] {
            *x = next;
        }
    }
}

/// A uniform size-ℓ multiset over [p] by stars and bars.
fn sample_multiset(p: usize, ell: usize, rng: &mut rng::Rng) -> Vec<u32> {
    let mut pos: Vec<usize> = index::sample(rng, p + ell - 1, ell).into_vec();
    pos.sort_unstable();
    pos.iter()
        .enumerate()
        .map(|(t, &x)| (x - t) as u32)
        .collect()
}

/// Checks (a) and (b) for a given vertex partition.
pub fn step1_checks(
    h: &Hypergraph,
    parts: &VertexPartition,
    weights: &[TupleWeightFunction<f64>],
    params: &PipelineParams,
    attempt: usize,
) -> (Vec<Check>, u64, u64) {
    let p = parts.p;
    let r = h.r() as i32;
    let mut degree = vec![0u32; h.num_vertices()];
    for (e, verts) in h.edges().enumerate() {
        if parts.edge_part[e] != NONE {
            for &v in verts {
                degree[v as usize] += 1;
            }
        }
    }
    let max_part_degree = degree.iter().copied().max().unwrap_or(0);
    let mut checks = vec![Check::at_most(
        "a.max_part_degree",
        f64::from(max_part_degree),
        (1.0 + params.slack) * params.delta / (p as f64).powi(r - 1),
    )];

    let (mut sampled, mut total_patterns) = (0u64, 0u64);
    for (w, omega) in weights.iter().enumerate() {
        let ell = omega.ell();
        let total = omega.total_all();
        let mut mass: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        let mut key = Vec::with_capacity(ell);
        for (tuple, &x) in omega.entries() {
            key.clear();
            key.extend(tuple.iter().map(|&e| parts.edge_part[e as usize]));
            if key.contains(&NONE) {
                continue;
            }
            key.sort_unstable();
            *mass.entry(key.clone()).or_insert(0.0) += x;
        }
        let count = multiset_count(p, ell);
        total_patterns = total_patterns.saturating_add(count);
        let denom = (p as f64).powi(r * ell as i32);
        // the pattern with the largest relative deviation decides
        let mut worst: Option<(f64, Vec<u32>, f64, f64)> = None;
        let mut visit = |j: &[u32]| {
            let expected = total * pi(j) as f64 / denom;
            let actual = mass.get(j).copied().unwrap_or(0.0);
            let dev = if expected > 0.0 {
                (actual / expected - 1.0).abs()
            } else {
                actual
            };
            if worst.as_ref().is_none_or(|w| dev > w.0) {
                worst = Some((dev, j.to_vec(), actual, expected));
            }
        };
        if count <= MAX_PATTERNS {
            for_each_multiset(p, ell, &mut visit);
            sampled += count;
        } else {
            let mut prng = rng::stream(params.seed, "step1-patterns", &[attempt as u64, w as u64]);
            for _ in 0..MAX_PATTERNS {
                visit(&sample_multiset(p, ell, &mut prng));
            }
            sampled += MAX_PATTERNS;
        }
        if let Some((_, j, actual, expected)) = worst {
            checks.push(Check::within(
                format!("b.w{w}.J{j:?}"),
                actual,
                (1.0 - params.slack) * expected,
                (1.0 + params.slack) * expected,
            ));
        }
    }
    (checks, sampled, total_patterns)
}

/// Checks (A), (B) and (C) for a given slicing. `max_codegree` is Δ^c(H).
pub fn step2_checks(
    h: &Hypergraph,
    parts: &VertexPartition,
    slicing: &EdgeSlicing,
    weights: &[TupleWeightFunction<f64>],
    params: &PipelineParams,
    max_codegree: usize,
) -> (Vec<Check>, u64) {
    let (p, q) = (parts.p as f64, slicing.q as f64);
    let r = h.r() as i32;
    let mut degree = vec![0u32; h.num_vertices()];
    let mut pairs: HashMap<u64, u32> = HashMap::new();
    let (mut max_degree, mut max_co) = (0u32, 0u32);
    for slice in slicing.slices.iter().flatten() {
        for &e in slice {
            let verts = h.edge(e as usize);
            for (a, &u) in verts.iter().enumerate() {
                degree[u as usize] += 1;
                max_degree = max_degree.max(degree[u as usize]);
                for &v in &verts[a + 1..] {
                    let c = pairs
                        .entry((u64::from(u) << 32) | u64::from(v))
                        .or_insert(0);
                    *c += 1;
                    max_co = max_co.max(*c);
                }
            }
        }
        for &e in slice {
            for &v in h.edge(e as usize) {
                degree[v as usize] = 0;
            }
        }
        pairs.clear();
    }
    let codegree_bound = params
        .delta
        .powf(params.epsilon)
        .max((max_codegree as f64 / q).ceil());
    let mut checks = vec![
        Check::at_most(
            "A.max_slice_degree",
            f64::from(max_degree),
            (1.0 + 2.0 * params.slack) * params.delta / (q * p.powi(r - 1)),
        ),
        Check::at_most(
            "B.max_slice_codegree",
            f64::from(max_co),
            (1.0 + params.slack) * codegree_bound,
        ),
    ];

    let mut total_patterns = 0u64;
    for (w, omega) in weights.iter().enumerate() {
        let ell = omega.ell();
        let total = omega.total_all();
        // (J, σ) as the sorted list of (part, slice) over the tuple's edges;
        // tuples splitting a part across slices lie in no E_{J,σ}
        let mut mass: BTreeMap<Vec<(u32, u32)>, f64> = BTreeMap::new();
        let mut key = Vec::with_capacity(ell);
        'tuples: for (tuple, &x) in omega.entries() {
            key.clear();
            for &e in tuple {
                let i = parts.edge_part[e as usize];
                if i == NONE {
                    continue 'tuples;
                }
                key.push((i, slicing.edge_slice[e as usize]));
            }
            key.sort_unstable();
            if key.windows(2).any(|w| w[0].0 == w[1].0 && w[0].1 != w[1].1) {
                continue;
            }
            *mass.entry(key.clone()).or_insert(0.0) += x;
        }
        let (worst_key, worst) =
            mass.iter().fold(
                (None, 0.0),
                |acc, (k, &m)| if m > acc.1 { (Some(k), m) } else { acc },
            );
        let bound = (1.0 + params.slack) * 2.0 * factorial(ell as u64) as f64 * total
            / (q.powi(ell as i32) * p.powi(r * ell as i32));
        let name = match worst_key {
            Some(k) => format!("C.w{w}.Jσ{k:?}"),
            None => format!("C.w{w}"),
        };
        checks.push(Check::at_most(name, worst, bound));
        // patterns never observed carry zero mass, so the check is exact
        let pairs: u64 = (1..=ell.min(parts.p))
            .map(|k| {
                let shapes = binomial(parts.p as u64, k as u64)
                    .unwrap_or(u64::MAX)
                    .saturating_mul(binomial(ell as u64 - 1, k as u64 - 1).unwrap_or(u64::MAX));
                shapes.saturating_mul((slicing.q as u64).saturating_pow(k as u32))
            })
            .fold(0u64, u64::saturating_add);
        total_patterns = total_patterns.saturating_add(pairs);
    }
    (checks, total_patterns)
}

fn fewest_failures(a: &Transcript, b: &Transcript) -> bool {
    a.failures() < b.failures()
}

/// Step 1: uniform random vertex partition into `p` parts, resampled until
/// (a) and (b) hold or the retry budget runs out.
pub fn partition_vertices(
    h: &Hypergraph,
    weights: &[TupleWeightFunction<f64>],
    params: &PipelineParams,
) -> Result<(VertexPartition, Transcript)> {
    let mut best: Option<Transcript> = None;
    for attempt in 0..=params.retries_step1 {
        let seed = rng::derive_seed(params.seed, "step1", &[attempt as u64]);
        let mut rng = rng::stream(params.seed, "step1", &[attempt as u64]);
        let vertex_part = (0..h.num_vertices())
            .map(|_| rng.gen_range(0..params.p as u32))
            .collect();
        let parts = VertexPartition::from_vertex_parts(h, params.p, vertex_part);
        let (checks, sampled, total) = step1_checks(h, &parts, weights, params, attempt);
        let t = Transcript {
            step: "step1".into(),
            attempt,
            seed,
            checks,
            patterns_checked: sampled,
            patterns_total: total,
        };
        if t.passed() {
            return Ok((parts, t));
        }
        if best.as_ref().is_none_or(|b| fewest_failures(&t, b)) {
            best = Some(t);
        }
    }
    Err(Error::RetriesExhausted {
        step: "step1",
        attempts: params.retries_step1 + 1,
        best: Box::new(best.expect("at least one attempt")),
    })
}

/// Step 2: every non-crossing edge picks a slice in [q] uniformly,
/// resampled until (A), (B) and (C) hold or the retry budget runs out.
pub fn partition_edges(
    h: &Hypergraph,
    parts: &VertexPartition,
    weights: &[TupleWeightFunction<f64>],
    params: &PipelineParams,
) -> Result<(EdgeSlicing, Transcript)> {
    let max_codegree = h.max_codegree();
    let mut best: Option<Transcript> = None;
    for attempt in 0..=params.retries_step2 {
        let seed = rng::derive_seed(params.seed, "step2", &[attempt as u64]);
        let mut rng = rng::stream(params.seed, "step2", &[attempt as u64]);
        let edge_slice = parts
            .edge_part
            .iter()
            .map(|&i| {
                if i == NONE {
                    NONE
                } else {
                    rng.gen_range(0..params.q as u32)
                }
            })
            .collect();
        let slicing = EdgeSlicing::from_edge_slices(parts, params.q, edge_slice);
        let (checks, total) = step2_checks(h, parts, &slicing, weights, params, max_codegree);
        let t = Transcript {
            step: "step2".into(),
            attempt,
            seed,
            checks,
            patterns_checked: total,
            patterns_total: total,
        };
        if t.passed() {
            return Ok((slicing, t));
        }
        if best.as_ref().is_none_or(|b| fewest_failures(&t, b)) {
            best = Some(t);
        }
    }
    Err(Error::RetriesExhausted {
        step: "step2",
        attempts: params.retries_step2 + 1,
        best: Box::new(best.expect("at least one attempt")),
    })
}

/// Decomposes every slice into matchings, in parallel, aiming at the
/// slice's maximum degree. Returns `[part][slice][class]` in host edge ids.
pub fn decompose_slices(
    h: &Hypergraph,
    slicing: &EdgeSlicing,
    params: &PipelineParams,
) -> Vec<Vec<Vec<Vec<u32>>>> {
    let jobs: Vec<(usize, usize)> = (0..slicing.slices.len())
        .flat_map(|i| (0..slicing.q).map(move |j| (i, j)))
        .collect();
    let done: Vec<Vec<Vec<u32>>> = jobs
        .par_iter()
        .map(|&(i, j)| {
            let ids: Vec<usize> = slicing.slices[i][j].iter().map(|&e| e as usize).collect();
            let sub = h.edge_subgraph(&ids).expect("slice ids come from the host");
            let target = sub.graph.max_degree().max(1);
            let seed = rng::derive_seed(params.seed, "decompose", &[i as u64, j as u64]);
            decompose(&sub.graph, target, params.effort, seed)
                .into_classes()
                .into_iter()
                .map(|class| {
                    class
                        .into_iter()
                        .map(|e| sub.new_to_old[e as usize])
                        .collect()
                })
                .collect()
        })
        .collect();
    let mut out = vec![Vec::with_capacity(slicing.q); slicing.slices.len()];
    for ((i, _), classes) in jobs.into_iter().zip(done) {
        out[i].push(classes);
    }
    out
}
