//! Random r-graphs with a codegree cap.

use std::collections::{HashMap, HashSet};

use rand::seq::{index, SliceRandom};

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::rng;

struct Builder {
    r: usize,
    cap: usize,
    pairs: HashMap<u64, u32>,
    seen: HashSet<Vec<u32>>,
    edges: Vec<Vec<usize>>,
}

impl Builder {
    fn new(r: usize, cap: usize) -> Self {
        Self {
            r,
            cap,
            pairs: HashMap::new(),
            seen: HashSet::new(),
            edges: Vec::new(),
        }
    }

    /// Adds the sorted edge unless it is a repeat or would lift a pair
    /// codegree above the cap.
    fn try_add(&mut self, mut e: Vec<u32>) -> bool {
        e.sort_unstable();
        if self.seen.contains(&e) {
            return false;
        }
        let key = |a: u32, b: u32| (u64::from(a) << 32) | u64::from(b);
        for i in 0..self.r {
            for j in i + 1..self.r {
                if self.pairs.get(&key(e[i], e[j])).copied().unwrap_or(0) as usize >= self.cap {
                    return false;
                }
            }
        }
        for i in 0..self.r {
            for j in i + 1..self.r {
                *self.pairs.entry(key(e[i], e[j])).or_insert(0) += 1;
            }
        }
        self.edges.push(e.iter().map(|&v| v as usize).collect());
        self.seen.insert(e);
        true
    }
}

fn check_shape(r: usize, n: usize, cap: usize) -> Result<()> {
    if r < 2 || n < r {
        return Err(Error::InfeasibleParams(format!(
            "need 2 <= r <= n, got r={r}, n={n}"
        )));
    }
    if cap == 0 {
        return Err(Error::InfeasibleParams(
            "codegree cap must be at least 1".into(),
        ));
    }
    Ok(())
}

/// `m` uniformly random r-sets, rejecting repeats and codegree-cap
/// violations; fails if `m` edges cannot be placed within `50 m` draws.
pub fn random_r_graph(
    r: usize,
    n: usize,
    m: usize,
    codegree_cap: usize,
    seed: u64,
) -> Result<Hypergraph> {
    check_shape(r, n, codegree_cap)?;
    let mut rng = rng::stream(seed, "gen-random", &[]);
    let mut b = Builder::new(r, codegree_cap);
    let mut draws = 0usize;
    while b.edges.len() < m {
        draws += 1;
        if draws > 50 * m.max(1) {
            return Err(Error::InfeasibleParams(format!(
                "placed only {} of {m} edges under codegree cap {codegree_cap}",
                b.edges.len()
            )));
        }
        let e = index::sample(&mut rng, n, r)
            .into_iter()
            .map(|v| v as u32)
            .collect();
        b.try_add(e);
    }
    Hypergraph::new(r, n, b.edges)
}

/// Union of `d` random near-perfect matchings (shuffle, cut into r-sets),
/// with repeats and codegree-cap violations re-dealt a few times and
/// then dropped. Every degree is at
/// most `d` and most vertices reach it.
pub fn near_regular(
    r: usize,
    n: usize,
    d: usize,
    codegree_cap: usize,
    seed: u64,
) -> Result<Hypergraph> {
    check_shape(r, n, codegree_cap)?;
    let mut rng = rng::stream(seed, "gen-regular", &[]);
    let mut b = Builder::new(r, codegree_cap);
    let mut order: Vec<u32> = (0..n as u32).collect();
    let mut left = Vec::new();
    for _ in 0..d {
        order.shuffle(&mut rng);
        left.clear();
        for chunk in order.chunks_exact(r) {
            if !b.try_add(chunk.to_vec()) {
                left.extend_from_slice(chunk);
            }
        }
        // re-deal the vertices of rejected chunks a few times
        for _ in 0..8 {
            if left.len() < r {
                break;
            }
            left.shuffle(&mut rng);
            let mut next = Vec::new();
            for chunk in left.chunks_exact(r) {
                if !b.try_add(chunk.to_vec()) {
                    next.extend_from_slice(chunk);
                }
            }
            left = next;
        }
    }
    Hypergraph::new(r, n, b.edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_graph_respects_cap() {
        let h = random_r_graph(3, 200, 2000, 3, 11).unwrap();
        assert_eq!(h.num_edges(), 2000);
        assert!(h.stats().max_codegree <= 3);
        assert_eq!(h, random_r_graph(3, 200, 2000, 3, 11).unwrap());
    }

    #[test]
    fn infeasible_is_reported() {
        // K_4^(2) has only 6 edges
        assert!(matches!(
            random_r_graph(2, 4, 7, 1, 1),
            Err(Error::InfeasibleParams(_))
        ));
        assert!(random_r_graph(1, 4, 1, 1, 1).is_err());
    }

    #[test]
    fn near_regular_degrees() {
        let h = near_regular(3, 300, 12, 1, 5).unwrap();
        let st = h.stats();
        assert!(st.max_degree <= 12);
        assert!(st.max_codegree <= 1);
        let avg = 3.0 * h.num_edges() as f64 / 300.0;
        assert!(avg > 11.5, "average degree {avg}");
    }
}
