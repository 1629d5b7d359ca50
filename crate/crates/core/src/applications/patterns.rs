//! Small k-graph patterns: t-avoidance, maximum average degree and
//! labelled copy counts.

use std::collections::HashSet;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_MAD_EDGES: usize = 12;
pub const MAX_PATTERN_VERTICES: usize = 8;

/// A k-graph on vertices `0..num_vertices`, edges sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pattern {
    pub k: usize,
    pub num_vertices: usize,
    pub edges: Vec<Vec<u32>>,
}

impl Pattern {
    /// Canonicalizes `edges` and relabels the touched vertices to
    /// `0..v(F)` in increasing order.
    pub fn new(k: usize, edges: Vec<Vec<u32>>) -> Result<Self> {
        let mut edges: Vec<Vec<u32>> = edges
            .into_iter()
            .map(|mut e| {
                e.sort_unstable();
                e.dedup();
                e
            })
            .collect();
        if let Some(e) = edges.iter().find(|e| e.len() != k) {
            return Err(Error::PatternRejected(format!("{e:?} is not a {k}-set")));
        }
        let mut labels: Vec<u32> = edges.iter().flatten().copied().collect();
        labels.sort_unstable();
        labels.dedup();
        for e in &mut edges {
            for v in e.iter_mut() {
                *v = labels.binary_search(v).expect("present") as u32;
            }
        }
        edges.sort();
        edges.dedup();
        Ok(Self {
            k,
            num_vertices: labels.len(),
            edges,
        })
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }
}

/// Any two edges meet in fewer than `t` vertices.
pub fn is_t_avoiding(f: &Pattern, t: usize) -> bool {
    f.edges.iter().enumerate().all(|(i, a)| {
        f.edges[i + 1..]
            .iter()
            .all(|b| a.iter().filter(|x| b.contains(x)).count() < t)
    })
}

/// max over non-empty edge subsets F′ of k·e(F′)/v(F′), where v(F′)
/// counts the vertices the subset touches.
pub fn mad(f: &Pattern) -> Result<Ratio<i64>> {
    let m = f.num_edges();
    if m == 0 {
        return Err(Error::PatternRejected("mad of an empty pattern".into()));
    }
    if m > MAX_MAD_EDGES {
        return Err(Error::TooLarge(format!(
            "{m} edges, at most {MAX_MAD_EDGES} supported"
        )));
    }
    let masks: Vec<u64> = f
        .edges
        .iter()
        .map(|e| e.iter().fold(0u64, |acc, &v| acc | 1 << v))
        .collect();
    let mut best = Ratio::from_integer(0);
    for subset in 1u32..(1 << m) {
        let mut touched = 0u64;
        for (i, mask) in masks.iter().enumerate() {
            if subset >> i & 1 == 1 {
                touched |= mask;
            }
        }
        let value = Ratio::new(
            (f.k * subset.count_ones() as usize) as i64,
            i64::from(touched.count_ones()),
        );
        if value > best {
            best = value;
        }
    }
    Ok(best)
}

/// Number of injections φ: V(F) → V(G) with φ(e) ∈ E(G) for every edge
/// of F. `g_edges` are k-sets over `0..g_vertices`.
pub fn count_injections(f: &Pattern, g_vertices: usize, g_edges: &[Vec<u32>]) -> Result<u64> {
    if f.num_vertices > MAX_PATTERN_VERTICES {
        return Err(Error::TooLarge(format!(
            "pattern has {} vertices, at most {MAX_PATTERN_VERTICES} supported",
            f.num_vertices
        )));
    }
    let mut edge_set: HashSet<Vec<u32>> = HashSet::with_capacity(g_edges.len());
    let mut neighbours = vec![Vec::new(); g_vertices];
    for e in g_edges {
        let mut e = e.clone();
        e.sort_unstable();
        if e.len() != f.k || e.iter().any(|&v| v as usize >= g_vertices) {
            return Err(Error::BadParams(format!(
                "host edge {e:?} is not a {}-set in range",
                f.k
            )));
        }
        for &a in &e {
            for &b in &e {
                if a != b {
                    neighbours[a as usize].push(b);
                }
            }
        }
        edge_set.insert(e);
    }
    for nb in &mut neighbours {
        nb.sort_unstable();
        nb.dedup();
    }

    // Order pattern vertices so each one, where possible, shares an edge
    // with an earlier one; record which edges become complete at each step.
    let n = f.num_vertices;
    let mut order = Vec::with_capacity(n);
    let mut placed = vec![false; n];
    while order.len() < n {
        let next = (0..n)
            .filter(|&v| !placed[v])
            .max_by_key(|&v| {
                let links = f
                    .edges
                    .iter()
                    .filter(|e| e.contains(&(v as u32)))
                    .flat_map(|e| e.iter())
                    .filter(|&&u| placed[u as usize])
                    .count();
                (links, usize::MAX - v)
            })
            .expect("unplaced vertex");
        placed[next] = true;
        order.push(next);
    }
    let step_of: Vec<usize> = {
        let mut s = vec![0; n];
        for (i, &v) in order.iter().enumerate() {
            s[v] = i;
        }
        s
    };
    let mut completes: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, e) in f.edges.iter().enumerate() {
        let last = e
            .iter()
            .map(|&v| step_of[v as usize])
            .max()
            .expect("nonempty edge");
        completes[last].push(i);
    }
    let anchor: Vec<Option<usize>> = order
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            f.edges
                .iter()
                .filter(|e| e.contains(&(v as u32)))
                .flat_map(|e| e.iter())
                .map(|&u| u as usize)
                .find(|&u| step_of[u] < i)
        })
        .collect();

    struct Search<'a> {
        f: &'a Pattern,
        order: &'a [usize],
        anchor: &'a [Option<usize>],
        completes: &'a [Vec<usize>],
        neighbours: &'a [Vec<u32>],
        edge_set: &'a HashSet<Vec<u32>>,
        image: Vec<u32>,
        used: Vec<bool>,
        buf: Vec<u32>,
    }

    impl Search<'_> {
        fn run(&mut self, step: usize) -> u64 {
            if step == self.order.len() {
                return 1;
            }
            let v = self.order[step];
            let candidates: Vec<u32> = match self.anchor[step] {
                Some(u) => self.neighbours[self.image[u] as usize].clone(),
                None => (0..self.used.len() as u32).collect(),
            };
            let mut total = 0;
            for x in candidates {
                if self.used[x as usize] {
                    continue;
                }
                self.image[v] = x;
                if self.completes[step].iter().all(|&ei| {
                    self.buf.clear();
                    self.buf
                        .extend(self.f.edges[ei].iter().map(|&u| self.image[u as usize]));
                    self.buf.sort_unstable();
                    self.edge_set.contains(&self.buf)
                }) {
                    self.used[x as usize] = true;
                    total += self.run(step + 1);
                    self.used[x as usize] = false;
                }
            }
            total
        }
    }

    let mut search = Search {
        f,
        order: &order,
        anchor: &anchor,
        completes: &completes,
        neighbours: &neighbours,
        edge_set: &edge_set,
        image: vec![0; n],
        used: vec![false; g_vertices],
        buf: Vec::with_capacity(f.k),
    };
    Ok(search.run(0))
}
