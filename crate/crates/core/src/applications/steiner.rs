//! Approximate Steiner systems.
//!
//! The hypergraph has one vertex per t-subset of `[n]` and one edge per
//! k-subset `X`, namely the set of t-subsets of `X`. A matching is a family
//! of k-sets sharing no t-set: a partial (n, k, t)-Steiner system.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;

/// Default cap on C(n, k), the number of edges.
pub const DEFAULT_MAX_EDGES: u64 = 4_000_000;

pub fn binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
        if acc > u128::from(u64::MAX) {
            return None;
        }
    }
    Some(acc as u64)
}

pub fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

/// Colex rank of a strictly increasing set.
pub fn colex_rank(set: &[u32]) -> u64 {
    set.iter()
        .enumerate()
        .map(|(i, &c)| binomial(u64::from(c), i as u64 + 1).expect("rank fits in u64"))
        .sum()
}

/// The set of the given colex rank and size.
pub fn colex_unrank(mut rank: u64, size: usize) -> Vec<u32> {
    let mut out = vec![0u32; size];
    for i in (0..size).rev() {
        let k = i as u64 + 1;
        // largest c with C(c, k) <= rank
        let mut c = i as u64;
        while binomial(c + 1, k).expect("small") <= rank {
            c += 1;
        }
        rank -= binomial(c, k).expect("small");
        out[i] = c as u32;
    }
    out
}

/// Calls `f` on every `size`-subset of `[n]` in colex order.
fn for_each_colex(n: u32, size: usize, mut f: impl FnMut(&[u32])) {
    if size == 0 || size as u32 > n {
        return;
    }
    let mut set: Vec<u32> = (0..size as u32).collect();
    loop {
        f(&set);
        // colex successor: bump the first entry that can move up
        let mut i = 0;
        while i < size {
            let limit = if i + 1 < size { set[i + 1] } else { n };
            if set[i] + 1 < limit {
                set[i] += 1;
                for (j, s) in set.iter_mut().enumerate().take(i) {
                    *s = j as u32;
                }
                break;
            }
            i += 1;
        }
        if i == size {
            return;
        }
    }
}

#[derive(Debug, Clone)]
pub struct SteinerInstance {
    pub n: usize,
    pub k: usize,
    pub t: usize,
    /// Vertex ids are colex ranks of t-subsets, edge ids colex ranks of
    /// k-subsets.
    pub hypergraph: Hypergraph,
}

impl SteinerInstance {
    pub fn new(n: usize, k: usize, t: usize) -> Result<Self> {
        Self::with_cap(n, k, t, DEFAULT_MAX_EDGES)
    }

    pub fn with_cap(n: usize, k: usize, t: usize, max_edges: u64) -> Result<Self> {
        if !(2 <= t && t < k && k <= n) {
            return Err(Error::BadParams(format!(
                "need 2 <= t < k <= n, got n={n}, k={k}, t={t}"
            )));
        }
        let edges = binomial(n as u64, k as u64)
            .filter(|&e| e <= max_edges)
            .ok_or_else(|| {
                Error::TooLarge(format!("C({n}, {k}) exceeds the edge cap {max_edges}"))
            })?;
        let r = binomial(k as u64, t as u64).expect("k is small") as usize;
        let num_vertices = binomial(n as u64, t as u64).expect("bounded by C(n,k)") as usize;
        let mut verts = Vec::with_capacity(edges as usize * r);
        let mut sub = Vec::with_capacity(r);
        for_each_colex(n as u32, k, |x| {
            sub.clear();
            for_each_colex(k as u32, t, |pos| {
                let tset: Vec<u32> = pos.iter().map(|&p| x[p as usize]).collect();
                sub.push(colex_rank(&tset) as u32);
            });
            sub.sort_unstable();
            verts.extend_from_slice(&sub);
        });
        Ok(Self {
            n,
            k,
            t,
            hypergraph: Hypergraph::from_flat(r, num_vertices, verts),
        })
    }

    /// `(k−t)! · n^{−(k−t)}`, the density of a Steiner system among k-sets.
    pub fn density(&self) -> f64 {
        let d = (self.k - self.t) as u64;
        factorial(d) as f64 / (self.n as f64).powi(d as i32)
    }

    /// `n^{k−t} / (k−t)!`, the degree parameter the application uses.
    pub fn delta(&self) -> f64 {
        1.0 / self.density()
    }

    pub fn block(&self, edge: usize) -> Vec<u32> {
        colex_unrank(edge as u64, self.k)
    }

    pub fn t_subset(&self, vertex: usize) -> Vec<u32> {
        colex_unrank(vertex as u64, self.t)
    }

    pub fn edge_of_block(&self, block: &[u32]) -> usize {
        colex_rank(block) as usize
    }
}

/// Every t-subset of `[n]` lies in at most one block.
pub fn is_partial_steiner(n: usize, t: usize, blocks: &[Vec<u32>]) -> bool {
    let total = binomial(n as u64, t as u64).unwrap_or(u64::MAX);
    let mut covered = vec![false; total as usize];
    for b in blocks {
        if b.windows(2).any(|w| w[0] >= w[1]) || b.iter().any(|&x| x as usize >= n) {
            return false;
        }
        let mut ok = true;
        for_each_colex(b.len() as u32, t, |pos| {
            let tset: Vec<u32> = pos.iter().map(|&p| b[p as usize]).collect();
            let rank = colex_rank(&tset) as usize;
            ok &= !std::mem::replace(&mut covered[rank], true);
        });
        if !ok {
            return false;
        }
    }
    true
}

/// For each (t−1)-subset, how many t-subsets containing it no block covers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualStats {
    pub uncovered_t_sets: u64,
    pub total_t_sets: u64,
    pub min_per_link: u64,
    pub max_per_link: u64,
    pub mean_per_link: f64,
}

pub fn residual_stats(n: usize, t: usize, blocks: &[Vec<u32>]) -> ResidualStats {
    let total = binomial(n as u64, t as u64).expect("bounded") as usize;
    let mut covered = vec![false; total];
    for b in blocks {
        for_each_colex(b.len() as u32, t, |pos| {
            let tset: Vec<u32> = pos.iter().map(|&p| b[p as usize]).collect();
            covered[colex_rank(&tset) as usize] = true;
        });
    }
    let links = binomial(n as u64, t as u64 - 1).expect("bounded") as usize;
    let mut per_link = vec![0u64; links.max(1)];
    let mut uncovered = 0u64;
    for (rank, &c) in covered.iter().enumerate() {
        if c {
            continue;
        }
        uncovered += 1;
        let tset = colex_unrank(rank as u64, t);
        for skip in 0..t {
            let link: Vec<u32> = tset
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .map(|(_, &x)| x)
                .collect();
            per_link[colex_rank(&link) as usize] += 1;
        }
    }
    ResidualStats {
        uncovered_t_sets: uncovered,
        total_t_sets: total as u64,
        min_per_link: per_link.iter().copied().min().unwrap_or(0),
        max_per_link: per_link.iter().copied().max().unwrap_or(0),
        mean_per_link: per_link.iter().sum::<u64>() as f64 / per_link.len() as f64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colex_round_trip() {
        let mut count = 0u64;
        for_each_colex(9, 4, |s| {
            assert_eq!(colex_rank(s), count);
            assert_eq!(colex_unrank(count, 4), s);
            count += 1;
        });
        assert_eq!(count, 126);
    }

    #[test]
    fn fano_parameters() {
        let s = SteinerInstance::new(7, 3, 2).unwrap();
        let h = &s.hypergraph;
        assert_eq!((h.num_vertices(), h.num_edges(), h.r()), (21, 35, 3));
        let st = h.stats();
        assert_eq!((st.max_degree, st.min_degree, st.max_codegree), (5, 5, 1));
        assert_eq!(s.delta(), 7.0);
    }

    #[test]
    fn nine_four_two() {
        let s = SteinerInstance::new(9, 4, 2).unwrap();
        assert_eq!(s.hypergraph.r(), 6);
        assert_eq!(s.hypergraph.max_degree(), 21);
        assert_eq!(s.delta(), 81.0 / 2.0);
    }

    #[test]
    fn edges_map_back_to_blocks() {
        let s = SteinerInstance::new(8, 4, 2).unwrap();
        for e in 0..s.hypergraph.num_edges() {
            let block = s.block(e);
            assert_eq!(s.edge_of_block(&block), e);
            let pairs: Vec<Vec<u32>> = s
                .hypergraph
                .edge(e)
                .iter()
                .map(|&v| s.t_subset(v as usize))
                .collect();
            assert_eq!(pairs.len(), 6);
            assert!(pairs.iter().all(|p| p.iter().all(|x| block.contains(x))));
        }
    }

    #[test]
    fn bad_params() {
        assert!(matches!(
            SteinerInstance::new(7, 3, 3),
            Err(Error::BadParams(_))
        ));
        assert!(matches!(
            SteinerInstance::new(7, 8, 2),
            Err(Error::BadParams(_))
        ));
        assert!(matches!(
            SteinerInstance::with_cap(30, 3, 2, 100),
            Err(Error::TooLarge(_))
        ));
    }

    #[test]
    fn partial_steiner_check() {
        let fano: Vec<Vec<u32>> = [
            [0, 1, 2],
            [0, 3, 4],
            [0, 5, 6],
            [1, 3, 5],
            [1, 4, 6],
            [2, 3, 6],
            [2, 4, 5],
        ]
        .iter()
        .map(|b| b.to_vec())
        .collect();
        assert!(is_partial_steiner(7, 2, &fano));
        let stats = residual_stats(7, 2, &fano);
        assert_eq!(stats.uncovered_t_sets, 0);
        let mut bad = fano.clone();
        bad.push(vec![0, 1, 3]);
        assert!(!is_partial_steiner(7, 2, &bad));
        let stats = residual_stats(7, 2, &fano[..6]);
        assert_eq!(stats.uncovered_t_sets, 3);
        assert_eq!(stats.max_per_link, 2);
    }
}
