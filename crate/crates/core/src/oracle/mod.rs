//! Exhaustive ground truth for tiny instances, and the concentration lab.

pub mod lab;

use crate::coloring::conflict_graph;
use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;

pub const MAX_ENUMERATION_EDGES: usize = 20;
pub const MAX_MATCHING_EDGES: usize = 40;
pub const MAX_CHROMATIC_VERTICES: usize = 64;

/// Every matching of `h` (the empty one included), each sorted, in
/// lexicographic order.
pub fn enumerate_matchings(h: &Hypergraph) -> Result<Vec<Vec<usize>>> {
    let m = h.num_edges();
    if m > MAX_ENUMERATION_EDGES {
        return Err(Error::TooLarge(format!(
            "{m} edges, enumeration supports {MAX_ENUMERATION_EDGES}"
        )));
    }
    fn go(
        h: &Hypergraph,
        next: usize,
        used: &mut [bool],
        chosen: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        out.push(chosen.clone());
        for e in next..h.num_edges() {
            let verts = h.edge(e);
            if verts.iter().any(|&v| used[v as usize]) {
                continue;
            }
            verts.iter().for_each(|&v| used[v as usize] = true);
            chosen.push(e);
            go(h, e + 1, used, chosen, out);
            chosen.pop();
            verts.iter().for_each(|&v| used[v as usize] = false);
        }
    }
    let mut out = Vec::new();
    go(
        h,
        0,
        &mut vec![false; h.num_vertices()],
        &mut Vec::new(),
        &mut out,
    );
    Ok(out)
}

/// Size of a maximum matching, with a witness, by branch and bound.
pub fn max_matching(h: &Hypergraph) -> Result<(usize, Vec<usize>)> {
    let m = h.num_edges();
    if m > MAX_MATCHING_EDGES {
        return Err(Error::TooLarge(format!(
            "{m} edges, exact matching supports {MAX_MATCHING_EDGES}"
        )));
    }
    struct Search<'a> {
        h: &'a Hypergraph,
        used: Vec<bool>,
        free: usize,
        chosen: Vec<usize>,
        best: Vec<usize>,
    }
    impl Search<'_> {
        fn go(&mut self, next: usize) {
            if self.chosen.len() > self.best.len() {
                self.best.clone_from(&self.chosen);
            }
            let r = self.h.r();
            let room = (self.h.num_edges() - next).min(self.free / r);
            if self.chosen.len() + room <= self.best.len() {
                return;
            }
            for e in next..self.h.num_edges() {
                let verts = self.h.edge(e);
                if verts.iter().any(|&v| self.used[v as usize]) {
                    continue;
                }
                verts.iter().for_each(|&v| self.used[v as usize] = true);
                self.free -= r;
                self.chosen.push(e);
                self.go(e + 1);
                self.chosen.pop();
                self.free += r;
                verts.iter().for_each(|&v| self.used[v as usize] = false);
                let room = (self.h.num_edges() - e - 1).min(self.free / r);
                if self.chosen.len() + room <= self.best.len() {
                    return;
                }
            }
        }
    }
    let mut s = Search {
        h,
        used: vec![false; h.num_vertices()],
        free: h.num_vertices(),
        chosen: Vec::new(),
        best: Vec::new(),
    };
    s.go(0);
    Ok((s.best.len(), s.best))
}

/// Exact chromatic number of a graph given by adjacency lists, with an
/// optimal colouring, by DSatur-ordered branch and bound.
pub fn chromatic_number(adj: &[Vec<u32>]) -> Result<(usize, Vec<u32>)> {
    let n = adj.len();
    if n > MAX_CHROMATIC_VERTICES {
        return Err(Error::TooLarge(format!(
            "{n} vertices, exact colouring supports {MAX_CHROMATIC_VERTICES}"
        )));
    }
    if n == 0 {
        return Ok((0, Vec::new()));
    }
    let nbr: Vec<u64> = adj
        .iter()
        .map(|a| a.iter().fold(0u64, |m, &v| m | 1 << v))
        .collect();

    // greedy clique for a lower bound
    let mut clique = 0u64;
    let mut candidates = u64::MAX >> (64 - n);
    while candidates != 0 {
        let v = (0..n)
            .filter(|&v| candidates >> v & 1 == 1)
            .max_by_key(|&v| (nbr[v] & candidates).count_ones())
            .unwrap();
        clique |= 1 << v;
        candidates &= nbr[v];
    }
    let lower = clique.count_ones() as usize;

    struct Search<'a> {
        nbr: &'a [u64],
        colour: Vec<u32>,
        best: Vec<u32>,
        best_k: usize,
        lower: usize,
    }
    impl Search<'_> {
        fn go(&mut self, coloured: usize, k: usize) {
            let n = self.nbr.len();
            if coloured == n {
                if k < self.best_k {
                    self.best_k = k;
                    self.best.clone_from(&self.colour);
                }
                return;
            }
            // most saturated uncoloured vertex, then highest degree
            let mut pick = usize::MAX;
            let mut key = (0u32, 0u32);
            let mut used_at_pick = 0u64;
            for v in 0..n {
                if self.colour[v] != u32::MAX {
                    continue;
                }
                let mut used = 0u64;
                let mut rest = self.nbr[v];
                while rest != 0 {
                    let u = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    if self.colour[u] != u32::MAX {
                        used |= 1 << self.colour[u];
                    }
                }
                let this = (used.count_ones(), self.nbr[v].count_ones());
                if pick == usize::MAX || this > key {
                    pick = v;
                    key = this;
                    used_at_pick = used;
                }
            }
            for c in 0..=k {
                if k.max(c + 1) >= self.best_k {
                    break;
                }
                if used_at_pick >> c & 1 == 1 {
                    continue;
                }
                self.colour[pick] = c as u32;
                self.go(coloured + 1, k.max(c + 1));
                self.colour[pick] = u32::MAX;
                if self.best_k <= self.lower {
                    return;
                }
            }
        }
    }
    let mut s = Search {
        nbr: &nbr,
        colour: vec![u32::MAX; n],
        best: Vec::new(),
        best_k: n + 1,
        lower,
    };
    s.go(0, 0);
    Ok((s.best_k, s.best))
}

/// The least number of matchings partitioning `E(h)`.
pub fn chromatic_index(h: &Hypergraph) -> Result<(usize, Vec<u32>)> {
    chromatic_number(&conflict_graph(h))
}
