//! Tuple weight functions on the edge set of a hypergraph.
//!
//! An ℓ-tuple weight function assigns a nonnegative weight to unordered
//! ℓ-sets of edges. It is stored sparsely: only positive entries are kept,
//! each as a strictly increasing tuple of edge ids.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::check::Check;
use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::scalar::Weight;

#[derive(Debug, Clone, PartialEq)]
pub struct TupleWeightFunction<W> {
    ell: usize,
    host_edge_count: usize,
    /// Flat tuples, `ell` ids per entry, lexicographically sorted.
    tuples: Vec<u32>,
    weights: Vec<W>,
}

impl<W: Weight> TupleWeightFunction<W> {
    /// Builds a weight function. Tuples must be strictly increasing, ids
    /// must index into the host edge set, weights must be nonnegative and
    /// no tuple may appear twice. Zero weights are dropped.
    pub fn new<I>(ell: usize, host_edge_count: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, W)>,
    {
        if ell == 0 {
            return Err(Error::BadTuple("tuple arity must be at least 1".into()));
        }
        let mut list: Vec<(Vec<u32>, W)> = Vec::new();
        for (tuple, w) in entries {
            if tuple.len() != ell {
                return Err(Error::BadTuple(format!(
                    "{tuple:?} does not have {ell} entries"
                )));
            }
            if tuple.windows(2).any(|p| p[0] >= p[1]) {
                return Err(Error::BadTuple(format!(
                    "{tuple:?} is not strictly increasing"
                )));
            }
            if let Some(&id) = tuple.iter().find(|&&id| id >= host_edge_count) {
                return Err(Error::UnknownEdgeId {
                    id,
                    num_edges: host_edge_count,
                });
            }
            if !w.is_valid_weight() {
                return Err(Error::BadWeight(format!("{w:?} at {tuple:?}")));
            }
            if w.is_zero() {
                continue;
            }
            list.push((tuple.into_iter().map(|x| x as u32).collect(), w));
        }
        list.sort_by(|a, b| a.0.cmp(&b.0));
        if let Some(p) = list.windows(2).find(|p| p[0].0 == p[1].0) {
            return Err(Error::BadTuple(format!("duplicate tuple {:?}", p[0].0)));
        }
        let mut tuples = Vec::with_capacity(list.len() * ell);
        let mut weights = Vec::with_capacity(list.len());
        for (t, w) in list {
            tuples.extend(t);
            weights.push(w);
        }
        Ok(Self {
            ell,
            host_edge_count,
            tuples,
            weights,
        })
    }

    /// The 1-tuple weight function with weight `w` on every edge.
    pub fn uniform(host_edge_count: usize, w: W) -> Result<Self> {
        Self::new(
            1,
            host_edge_count,
            (0..host_edge_count).map(|e| (vec![e], w.clone())),
        )
    }

    pub fn zero(ell: usize, host_edge_count: usize) -> Self {
        Self {
            ell: ell.max(1),
            host_edge_count,
            tuples: Vec::new(),
            weights: Vec::new(),
        }
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn host_edge_count(&self) -> usize {
        self.host_edge_count
    }

    pub fn support_len(&self) -> usize {
        self.weights.len()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&[u32], &W)> + '_ {
        self.tuples.chunks_exact(self.ell).zip(self.weights.iter())
    }

    /// ω summed over all stored tuples, i.e. ω(E(H)).
    pub fn total_all(&self) -> W {
        W::sum_all(self.weights.iter().cloned())
    }

    /// ω(X′): the sum over stored tuples lying entirely inside `edge_ids`.
    pub fn total(&self, edge_ids: &[usize]) -> Result<W> {
        let mut member = vec![false; self.host_edge_count];
        for &id in edge_ids {
            if id >= self.host_edge_count {
                return Err(Error::UnknownEdgeId {
                    id,
                    num_edges: self.host_edge_count,
                });
            }
            member[id] = true;
        }
        Ok(self.total_where(|t| t.iter().all(|&e| member[e as usize])))
    }

    /// Sum over stored tuples accepted by `keep`.
    pub fn total_where(&self, mut keep: impl FnMut(&[u32]) -> bool) -> W {
        W::sum_all(
            self.entries()
                .filter(|(t, _)| keep(t))
                .map(|(_, w)| w.clone()),
        )
    }

    /// The shadow weight of a k-tuple: the total weight of stored tuples
    /// containing it.
    pub fn shadow(&self, t: &[usize]) -> Result<W> {
        if t.is_empty() || t.len() > self.ell {
            return Err(Error::BadTuple(format!(
                "shadow tuple size {} not in 1..={}",
                t.len(),
                self.ell
            )));
        }
        if t.windows(2).any(|p| p[0] >= p[1]) {
            return Err(Error::BadTuple(format!("{t:?} is not strictly increasing")));
        }
        Ok(self.total_where(|s| is_subsequence(t, s)))
    }

    /// ‖ω‖ₖ, the largest shadow weight over all k-tuples. Only k-subsets of
    /// support tuples can have a positive shadow, so only those are visited.
    pub fn norm(&self, k: usize) -> Result<W> {
        if k == 0 || k > self.ell {
            return Err(Error::BadTuple(format!(
                "norm index {k} not in 1..={}",
                self.ell
            )));
        }
        if k == self.ell {
            return Ok(self.weights.iter().cloned().fold(W::zero(), max_of));
        }
        let mut shadows: HashMap<Vec<u32>, Vec<W>> = HashMap::new();
        let mut sub = Vec::with_capacity(k);
        for (t, w) in self.entries() {
            for_each_subset(t, k, &mut sub, &mut |s| {
                shadows.entry(s.to_vec()).or_default().push(w.clone());
            });
        }
        Ok(shadows
            .into_values()
            .map(W::sum_all)
            .fold(W::zero(), max_of))
    }

    /// Every positive tuple is a matching in `h`.
    pub fn is_clean(&self, h: &Hypergraph) -> Result<bool> {
        self.check_host(h)?;
        if self.ell == 1 {
            return Ok(true);
        }
        let mut ids = Vec::with_capacity(self.ell);
        for (t, _) in self.entries() {
            ids.clear();
            ids.extend(t.iter().map(|&e| e as usize));
            if !h.is_matching(&ids)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn check_host(&self, h: &Hypergraph) -> Result<()> {
        if self.host_edge_count == h.num_edges() {
            Ok(())
        } else {
            Err(Error::HostMismatch {
                expected: self.host_edge_count,
                actual: h.num_edges(),
            })
        }
    }

    /// Re-indexes onto a sub-hypergraph; tuples with a dropped edge vanish.
    pub fn restrict(&self, old_to_new: &[Option<u32>], new_edge_count: usize) -> Self {
        let mut tuples = Vec::new();
        let mut weights = Vec::new();
        let mut mapped = Vec::with_capacity(self.ell);
        for (t, w) in self.entries() {
            mapped.clear();
            mapped.extend(t.iter().map_while(|&e| old_to_new[e as usize]));
            if mapped.len() == self.ell {
                mapped.sort_unstable();
                tuples.push((mapped.clone(), w.clone()));
            }
        }
        tuples.sort_by(|a, b| a.0.cmp(&b.0));
        let mut flat = Vec::with_capacity(tuples.len() * self.ell);
        for (t, w) in tuples {
            flat.extend(t);
            weights.push(w);
        }
        Self {
            ell: self.ell,
            host_edge_count: new_edge_count,
            tuples: flat,
            weights,
        }
    }

    /// Lossy conversion to `f64` weights.
    pub fn to_f64(&self) -> TupleWeightFunction<f64> {
        TupleWeightFunction {
            ell: self.ell,
            host_edge_count: self.host_edge_count,
            tuples: self.tuples.clone(),
            weights: self.weights.iter().map(Weight::as_f64).collect(),
        }
    }

    pub fn to_file(&self) -> WeightFile {
        WeightFile {
            ell: self.ell,
            entries: self
                .entries()
                .map(|(t, w)| WeightEntry {
                    tuple: t.iter().map(|&e| e as usize).collect(),
                    w: w.as_f64(),
                })
                .collect(),
        }
    }

    pub fn from_file(file: &WeightFile, host_edge_count: usize) -> Result<Self> {
        let entries = file
            .entries
            .iter()
            .map(|e| {
                if !(e.w.is_finite() && e.w >= 0.0) {
                    return Err(Error::BadWeight(format!("{} at {:?}", e.w, e.tuple)));
                }
                let w = W::from_float(e.w).ok_or_else(|| Error::BadWeight(format!("{}", e.w)))?;
                Ok((e.tuple.clone(), w))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(file.ell, host_edge_count, entries)
    }
}

/// ω_U(e) := |e ∩ U|. Its total equals the sum of degrees over `U`, and on
/// a matching it counts the vertices of `U` the matching covers.
pub fn vertex_cover_weight<W: Weight>(
    h: &Hypergraph,
    u: &[usize],
) -> Result<TupleWeightFunction<W>> {
    let mut inside = vec![false; h.num_vertices()];
    for &x in u {
        if x >= h.num_vertices() {
            return Err(Error::VertexOutOfRange {
                vertex: x,
                num_vertices: h.num_vertices(),
            });
        }
        inside[x] = true;
    }
    let entries = h.edges().enumerate().filter_map(|(i, e)| {
        let c = e.iter().filter(|&&v| inside[v as usize]).count();
        (c > 0).then(|| (vec![i], W::from_usize(c).expect("small integer")))
    });
    TupleWeightFunction::new(1, h.num_edges(), entries)
}

fn max_of<W: PartialOrd>(a: W, b: W) -> W {
    if b > a {
        b
    } else {
        a
    }
}

/// `t` is a sub-sequence of the sorted slice `s`.
fn is_subsequence(t: &[usize], s: &[u32]) -> bool {
    let mut it = s.iter();
    t.iter().all(|&x| it.any(|&y| y as usize == x))
}

fn for_each_subset(items: &[u32], k: usize, buf: &mut Vec<u32>, f: &mut impl FnMut(&[u32])) {
    if buf.len() == k {
        f(buf);
        return;
    }
    let need = k - buf.len();
    for i in 0..items.len() {
        if items.len() - i < need {
            break;
        }
        buf.push(items[i]);
        for_each_subset(&items[i + 1..], k, buf, f);
        buf.pop();
    }
}

/// JSON form: `{ "ell": L, "entries": [ { "tuple": [ids], "w": number } ] }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightFile {
    pub ell: usize,
    pub entries: Vec<WeightEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightEntry {
    pub tuple: Vec<usize>,
    pub w: f64,
}

/// Hypothesis transcript for a hypergraph and a family of weight functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub delta: f64,
    pub codegree_exponent: f64,
    pub max_arity: usize,
    pub epsilon: f64,
    pub checks: Vec<Check>,
    /// Per weight function: all of its own conditions hold.
    pub eligible: Vec<bool>,
}

impl ConditionReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// ε := δ / (50 L² r²).
pub fn epsilon(codegree_exponent: f64, max_arity: usize, r: usize) -> f64 {
    codegree_exponent / (50.0 * (max_arity * max_arity * r * r) as f64)
}

/// Evaluates every hypothesis of the weighted matching theorem and records
/// the outcome. Never fails on a violated hypothesis.
pub fn check_hypotheses<W: Weight>(
    h: &Hypergraph,
    delta: f64,
    codegree_exponent: f64,
    max_arity: usize,
    weights: &[TupleWeightFunction<W>],
) -> Result<ConditionReport> {
    for w in weights {
        w.check_host(h)?;
    }
    let stats = h.stats();
    let eps = epsilon(codegree_exponent, max_arity, h.r());
    let mut checks = vec![
        Check::at_most("max_degree", stats.max_degree as f64, delta),
        Check::at_most(
            "max_codegree",
            stats.max_codegree as f64,
            delta.powf(1.0 - codegree_exponent),
        ),
        // e(H) <= exp(Δ^{ε²}), compared in log space
        Check::at_most(
            "log_edge_count",
            (h.num_edges().max(1) as f64).ln(),
            delta.powf(eps * eps),
        ),
    ];
    let per_weight: Vec<Vec<Check>> = weights
        .par_iter()
        .enumerate()
        .map(|(i, w)| -> Result<Vec<Check>> {
            let mut out = Vec::new();
            if w.ell() > max_arity {
                out.push(Check::at_most(
                    format!("weight[{i}].arity"),
                    w.ell() as f64,
                    max_arity as f64,
                ));
            }
            let total = w.total_all().as_f64();
            for k in 1..=w.ell() {
                let norm = w.norm(k)?.as_f64();
                out.push(Check::at_least(
                    format!("weight[{i}].k{k}"),
                    total,
                    norm * delta.powf(k as f64 + codegree_exponent),
                ));
            }
            let clean = w.is_clean(h)?;
            out.push(Check::at_least(
                format!("weight[{i}].clean"),
                f64::from(u8::from(clean)),
                1.0,
            ));
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let eligible = per_weight
        .iter()
        .map(|cs| cs.iter().all(|c| c.pass))
        .collect();
    checks.extend(per_weight.into_iter().flatten());
    Ok(ConditionReport {
        delta,
        codegree_exponent,
        max_arity,
        epsilon: eps,
        checks,
        eligible,
    })
}
