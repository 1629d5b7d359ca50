//! Decomposition of a hypergraph's edge set into matchings.
//!
//! A proper edge colouring of H is a proper vertex colouring of its conflict
//! graph (edges adjacent iff they intersect), and each colour class is a
//! matching. The decomposition starts from a DSatur greedy colouring and
//! then repeatedly drops the smallest class and repairs the partial
//! colouring with a tabu search in the style of PARTIALCOL: an uncoloured
//! edge is inserted into a class and the at most `r` class members it
//! intersects are evicted.

use std::collections::BinaryHeap;

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::rng;

const NONE: u32 = u32::MAX;

/// Default number of tabu moves per decomposition.
pub const DEFAULT_EFFORT: u64 = 400_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchingDecomposition {
    classes: Vec<Vec<u32>>,
    assignment: Vec<u32>,
}

impl MatchingDecomposition {
    /// Builds from explicit classes over `num_edges` edges. Checks that the
    /// classes partition the edge ids; does not check the matching property
    /// (see [`validate`]).
    pub fn from_classes(num_edges: usize, classes: Vec<Vec<u32>>) -> Result<Self> {
        let mut assignment = vec![NONE; num_edges];
        for (c, class) in classes.iter().enumerate() {
            for &e in class {
                let slot = assignment.get_mut(e as usize).ok_or(Error::UnknownEdgeId {
                    id: e as usize,
                    num_edges,
                })?;
                if *slot != NONE {
                    return Err(Error::BadParams(format!("edge {e} appears in two classes")));
                }
                *slot = c as u32;
            }
        }
        if let Some(e) = assignment.iter().position(|&c| c == NONE) {
            return Err(Error::BadParams(format!("edge {e} is in no class")));
        }
        Ok(Self {
            classes,
            assignment,
        })
    }

    pub fn classes(&self) -> &[Vec<u32>] {
        &self.classes
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn class_of(&self, edge: usize) -> usize {
        self.assignment[edge] as usize
    }

    pub fn into_classes(self) -> Vec<Vec<u32>> {
        self.classes
    }

    pub fn to_file(&self) -> DecompositionFile {
        DecompositionFile {
            classes: self.classes.clone(),
        }
    }
}

/// Audit dump: `{ "classes": [[edge ids], ...] }`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionFile {
    pub classes: Vec<Vec<u32>>,
}

/// The conflict graph: adjacency lists on edge ids, sorted, without
/// repeats; two edges are adjacent iff they share a vertex.
pub fn conflict_graph(h: &Hypergraph) -> Vec<Vec<u32>> {
    (0..h.num_edges())
        .map(|e| {
            let mut adj: Vec<u32> = h
                .edge(e)
                .iter()
                .flat_map(|&v| h.incident_edges(v as usize).iter().copied())
                .filter(|&f| f as usize != e)
                .collect();
            adj.sort_unstable();
            adj.dedup();
            adj
        })
        .collect()
}

/// The classes partition the edge set, the assignment agrees with them and
/// every class is a matching.
pub fn validate(h: &Hypergraph, d: &MatchingDecomposition) -> bool {
    if d.assignment.len() != h.num_edges() {
        return false;
    }
    let mut seen = vec![false; h.num_edges()];
    let mut owner = vec![NONE; h.num_vertices()];
    for (c, class) in d.classes.iter().enumerate() {
        for &e in class {
            let Some(s) = seen.get_mut(e as usize) else {
                return false;
            };
            if *s || d.assignment[e as usize] != c as u32 {
                return false;
            }
            *s = true;
            for &v in h.edge(e as usize) {
                if owner[v as usize] == c as u32 {
                    return false;
                }
                owner[v as usize] = c as u32;
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Decomposes `E(H)` into matchings, trying to reach `target` classes
/// within `effort` tabu moves. Always returns a valid decomposition; the
/// class count may exceed the target. Deterministic in its arguments.
pub fn decompose(h: &Hypergraph, target: usize, effort: u64, seed: u64) -> MatchingDecomposition {
    let m = h.num_edges();
    if m == 0 {
        return MatchingDecomposition {
            classes: Vec::new(),
            assignment: Vec::new(),
        };
    }
    let mut rng = rng::stream(seed, "decompose", &[]);
    let colours = dsatur(h, &mut rng);
    let k0 = colours.iter().copied().max().map_or(0, |c| c as usize + 1);
    let target = target.max(1);
    let best = if k0 > target && effort > 0 {
        let mut search = TabuSearch::new(h, &colours, k0, rng);
        search.reduce(target, effort)
    } else {
        colours
    };
    let k = best.iter().copied().max().map_or(0, |c| c as usize + 1);
    let mut classes = vec![Vec::new(); k];
    for (e, &c) in best.iter().enumerate() {
        classes[c as usize].push(e as u32);
    }
    classes.retain(|c| !c.is_empty());
    let mut assignment = vec![0u32; m];
    for (c, class) in classes.iter().enumerate() {
        for &e in class {
            assignment[e as usize] = c as u32;
        }
    }
    MatchingDecomposition {
        classes,
        assignment,
    }
}

/// Greedy colouring in DSatur order: repeatedly colour the uncoloured edge
/// seeing the most distinct colours (ties: larger conflict degree, then a
/// random key) with the smallest free colour.
fn dsatur(h: &Hypergraph, rng: &mut rng::Rng) -> Vec<u32> {
    let m = h.num_edges();
    let r = h.r();
    let bound = r * h.max_degree().saturating_sub(1) + 1;
    let words = bound.div_ceil(64);
    let mut forbidden = vec![0u64; m * words];
    let mut sat = vec![0u32; m];
    let mut colour = vec![NONE; m];
    let mut heap = BinaryHeap::with_capacity(m * 2);
    let conflict_degree =
        |e: usize| -> u32 { h.edge(e).iter().map(|&v| h.degrees()[v as usize] - 1).sum() };
    for e in 0..m {
        heap.push((0u32, conflict_degree(e), rng.gen::<u32>(), e as u32));
    }
    while let Some((s, _, _, e)) = heap.pop() {
        let e = e as usize;
        if colour[e] != NONE || s != sat[e] {
            continue;
        }
        let row = &forbidden[e * words..(e + 1) * words];
        let c = row
            .iter()
            .enumerate()
            .find(|(_, &w)| w != u64::MAX)
            .map(|(i, &w)| i * 64 + (!w).trailing_zeros() as usize)
            .expect("greedy colour count is bounded by r(Δ-1)+1");
        debug_assert!(c < bound);
        colour[e] = c as u32;
        let (word, bit) = (c / 64, 1u64 << (c % 64));
        for &v in h.edge(e) {
            for &f in h.incident_edges(v as usize) {
                let f = f as usize;
                if colour[f] == NONE && forbidden[f * words + word] & bit == 0 {
                    forbidden[f * words + word] |= bit;
                    sat[f] += 1;
                    heap.push((sat[f], conflict_degree(f), rng.gen::<u32>(), f as u32));
                }
            }
        }
    }
    colour
}

struct TabuSearch<'a> {
    h: &'a Hypergraph,
    /// Colour slots per vertex; fixed at the initial class count.
    stride: usize,
    words: usize,
    planes: usize,
    k: usize,
    colour: Vec<u32>,
    /// occupant[v * stride + c]: the edge of colour `c` at vertex `v`.
    occupant: Vec<u32>,
    /// Bit `c` of vertex `v`'s row is set iff colour `c` is free at `v`.
    free: Vec<u64>,
    valid: Vec<u64>,
    tabu: Vec<u32>,
    uncoloured: Vec<u32>,
    position: Vec<u32>,
    rng: rng::Rng,
    iter: u32,
    counter: Vec<u64>,
}

impl<'a> TabuSearch<'a> {
    fn new(h: &'a Hypergraph, colours: &[u32], k: usize, rng: rng::Rng) -> Self {
        let stride = k;
        let words = stride.div_ceil(64);
        let mut occupant = vec![NONE; h.num_vertices() * stride];
        let mut free = vec![u64::MAX; h.num_vertices() * words];
        for (e, &c) in colours.iter().enumerate() {
            for &v in h.edge(e) {
                occupant[v as usize * stride + c as usize] = e as u32;
                free[v as usize * words + c as usize / 64] &= !(1u64 << (c % 64));
            }
        }
        let planes = (usize::BITS - h.r().leading_zeros()) as usize;
        let mut s = Self {
            h,
            stride,
            words,
            planes,
            k,
            colour: colours.to_vec(),
            occupant,
            free,
            valid: vec![0; words],
            tabu: vec![0; h.num_edges() * stride],
            uncoloured: Vec::new(),
            position: vec![NONE; h.num_edges()],
            rng,
            iter: 0,
            counter: vec![0; planes * words],
        };
        s.set_k(k);
        s
    }

    fn set_k(&mut self, k: usize) {
        self.k = k;
        for (w, mask) in self.valid.iter_mut().enumerate() {
            let lo = w * 64;
            *mask = match k.saturating_sub(lo) {
                0 => 0,
                n if n >= 64 => u64::MAX,
                n => (1u64 << n) - 1,
            };
        }
    }

    fn occupy(&mut self, v: u32, c: usize, e: u32) {
        let v = v as usize;
        self.occupant[v * self.stride + c] = e;
        let bit = 1u64 << (c % 64);
        if e == NONE {
            self.free[v * self.words + c / 64] |= bit;
        } else {
            self.free[v * self.words + c / 64] &= !bit;
        }
    }

    fn uncolour(&mut self, e: u32) {
        let c = self.colour[e as usize] as usize;
        for &v in self.h.edge(e as usize) {
            self.occupy(v, c, NONE);
        }
        self.colour[e as usize] = NONE;
        self.position[e as usize] = self.uncoloured.len() as u32;
        self.uncoloured.push(e);
    }

    fn colour_with(&mut self, e: u32, c: usize) {
        let pos = self.position[e as usize] as usize;
        let last = *self.uncoloured.last().expect("edge is uncoloured");
        self.uncoloured.swap_remove(pos);
        if last != e {
            self.position[last as usize] = pos as u32;
        }
        self.position[e as usize] = NONE;
        for &v in self.h.edge(e as usize) {
            self.occupy(v, c, e);
        }
        self.colour[e as usize] = c as u32;
    }

    /// Moves a coloured edge to another class that is free on all its vertices.
    fn recolour(&mut self, e: u32, c: usize) {
        let old = self.colour[e as usize] as usize;
        for &v in self.h.edge(e as usize) {
            self.occupy(v, old, NONE);
            self.occupy(v, c, e);
        }
        self.colour[e as usize] = c as u32;
    }

    /// Distinct class-`c` edges meeting edge `e`, written into `out`.
    fn clashes(&self, e: u32, c: usize, out: &mut Vec<u32>) {
        out.clear();
        for &v in self.h.edge(e as usize) {
            let f = self.occupant[v as usize * self.stride + c];
            if f != NONE && !out.contains(&f) {
                out.push(f);
            }
        }
    }

    /// Bit-sliced count, per colour, of the vertices of `e` where that
    /// colour is taken. Plane `p` holds bit `p` of the count.
    fn count_occupied(&mut self, e: u32) {
        let (words, planes) = (self.words, self.planes);
        self.counter.iter_mut().for_each(|x| *x = 0);
        for &v in self.h.edge(e as usize) {
            let row = &self.free[v as usize * words..(v as usize + 1) * words];
            for (w, (&taken, &valid)) in row.iter().zip(&self.valid).enumerate() {
                let mut carry = !taken & valid;
                for p in 0..planes {
                    let slot = &mut self.counter[p * words + w];
                    let next = *slot & carry;
                    *slot ^= carry;
                    carry = next;
                    if carry == 0 {
                        break;
                    }
                }
            }
        }
    }

    /// Colours whose occupied count equals `level`, word `w`.
    fn level_mask(&self, level: usize, w: usize) -> u64 {
        let mut mask = self.valid[w];
        for p in 0..self.planes {
            let plane = self.counter[p * self.words + w];
            mask &= if level >> p & 1 == 1 { plane } else { !plane };
        }
        mask
    }

    /// Removes colour class `c` (renaming the last class to `c`) and returns
    /// to the uncoloured pool every edge it held.
    fn drop_class(&mut self, c: usize) {
        let last = self.k - 1;
        for e in 0..self.colour.len() as u32 {
            if self.colour[e as usize] == c as u32 {
                self.uncolour(e);
            }
        }
        if c != last {
            for e in 0..self.colour.len() {
                if self.colour[e] == last as u32 {
                    self.colour[e] = c as u32;
                    for &v in self.h.edge(e) {
                        self.occupy(v, last, NONE);
                        self.occupy(v, c, e as u32);
                    }
                }
                self.tabu[e * self.stride + c] = self.tabu[e * self.stride + last];
            }
        }
        self.set_k(self.k - 1);
    }

    fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.k];
        for &c in self.colour.iter().filter(|&&c| c != NONE) {
            sizes[c as usize] += 1;
        }
        sizes
    }

    /// Lowers the class count towards `target`. Returns the colouring with
    /// the fewest classes completed within the budget.
    fn reduce(&mut self, target: usize, effort: u64) -> Vec<u32> {
        let mut best = self.colour.clone();
        let mut best_k = self.k;
        let mut spent = 0u64;
        while self.k > target && spent < effort {
            let sizes = self.class_sizes();
            let smallest = (0..self.k).min_by_key(|&c| (sizes[c], c)).expect("k >= 1");
            self.drop_class(smallest);
            spent += self.repair(effort - spent);
            if !self.uncoloured.is_empty() {
                break;
            }
            best.clone_from(&self.colour);
            best_k = self.k;
        }
        if best_k != self.k || !self.uncoloured.is_empty() {
            // Rebuild the search state from the last complete colouring.
            let rng = self.rng.clone();
            *self = Self::new(self.h, &best, self.stride, rng);
            self.set_k(best_k);
        }
        self.balance();
        self.colour.clone()
    }

    /// Moves edges into undersized classes from classes at least two
    /// larger, wherever the small class is free on the whole edge. The
    /// class count is unchanged.
    fn balance(&mut self) {
        let m = self.colour.len();
        let floor_mean = m / self.k;
        let mut sizes = self.class_sizes();
        loop {
            let mut moved = false;
            let mut order: Vec<usize> = (0..self.k).filter(|&c| sizes[c] < floor_mean).collect();
            order.sort_by_key(|&c| (sizes[c], c));
            for s in order {
                for e in 0..m as u32 {
                    if sizes[s] >= floor_mean {
                        break;
                    }
                    let c = self.colour[e as usize] as usize;
                    if c == s || sizes[c] < sizes[s] + 2 {
                        continue;
                    }
                    let fits = self
                        .h
                        .edge(e as usize)
                        .iter()
                        .all(|&v| self.occupant[v as usize * self.stride + s] == NONE);
                    if fits {
                        self.recolour(e, s);
                        sizes[c] -= 1;
                        sizes[s] += 1;
                        moved = true;
                    }
                }
            }
            if !moved {
                break;
            }
        }
        self.balance_walk(&mut sizes, floor_mean, 50 * m as u64);
    }

    /// Random walk over proper colourings: moves a random edge to a class
    /// free on all its vertices, never pushing its old class below
    /// `floor_mean`, preferring undersized targets.
    fn balance_walk(&mut self, sizes: &mut [usize], floor_mean: usize, steps: u64) {
        let m = self.colour.len();
        let mut deficit: usize = sizes.iter().map(|&z| floor_mean.saturating_sub(z)).sum();
        let mut options = Vec::new();
        for _ in 0..steps {
            if deficit == 0 {
                break;
            }
            let e = self.rng.gen_range(0..m) as u32;
            let a = self.colour[e as usize] as usize;
            if sizes[a] <= floor_mean {
                continue;
            }
            options.clear();
            for w in 0..self.words {
                let mut bits = self.valid[w];
                for &v in self.h.edge(e as usize) {
                    bits &= self.free[v as usize * self.words + w];
                }
                while bits != 0 {
                    options.push(w * 64 + bits.trailing_zeros() as usize);
                    bits &= bits - 1;
                }
            }
            if options.is_empty() {
                continue;
            }
            let c = match options
                .iter()
                .copied()
                .filter(|&c| sizes[c] < floor_mean)
                .min_by_key(|&c| sizes[c])
            {
                Some(c) => {
                    deficit -= 1;
                    c
                }
                None => options[self.rng.gen_range(0..options.len())],
            };
            self.recolour(e, c);
            sizes[a] -= 1;
            sizes[c] += 1;
        }
    }

    /// Tabu search on the partial colouring until every edge is coloured or
    /// the budget runs out. Returns the number of moves made.
    fn repair(&mut self, budget: u64) -> u64 {
        const SAMPLE: usize = 24;
        let r = self.h.r();
        let mut clash = Vec::with_capacity(r);
        let mut candidates = Vec::with_capacity(SAMPLE);
        let mut best_pool = self.uncoloured.len();
        let mut moves = 0u64;
        while !self.uncoloured.is_empty() && moves < budget {
            moves += 1;
            self.iter = self.iter.wrapping_add(1);
            if self.iter == 0 {
                self.tabu.iter_mut().for_each(|t| *t = 0);
                self.iter = 1;
            }
            candidates.clear();
            if self.uncoloured.len() <= SAMPLE {
                candidates.extend_from_slice(&self.uncoloured);
            } else {
                for _ in 0..SAMPLE {
                    candidates.push(*self.uncoloured.choose(&mut self.rng).expect("nonempty"));
                }
            }
            let pool = self.uncoloured.len();
            let mut chosen: Option<(u32, usize)> = None;
            let mut chosen_level = usize::MAX;
            let mut ties = 0u32;
            'candidates: for &e in &candidates {
                self.count_occupied(e);
                for level in 0..=r.min(chosen_level) {
                    // level counts occupied vertices, an upper bound on the
                    // number of evictions (exact when codegrees are 1)
                    let allowed_tabu = pool + level < best_pool + 1;
                    for w in 0..self.words {
                        let mut mask = self.level_mask(level, w);
                        while mask != 0 {
                            let c = w * 64 + mask.trailing_zeros() as usize;
                            mask &= mask - 1;
                            if !allowed_tabu && self.tabu[e as usize * self.stride + c] > self.iter
                            {
                                continue;
                            }
                            if level < chosen_level {
                                chosen_level = level;
                                chosen = Some((e, c));
                                ties = 1;
                            } else {
                                ties += 1;
                                if self.rng.gen_range(0..ties) == 0 {
                                    chosen = Some((e, c));
                                }
                            }
                        }
                    }
                    if chosen_level == level {
                        if level == 0 {
                            break 'candidates;
                        }
                        break;
                    }
                }
            }
            let (e, c) = chosen.unwrap_or_else(|| {
                (
                    *self.uncoloured.choose(&mut self.rng).expect("nonempty"),
                    self.rng.gen_range(0..self.k),
                )
            });
            self.clashes(e, c, &mut clash);
            let tenure = (0.6 * pool as f64) as u32 + self.rng.gen_range(0..10);
            for &f in &clash {
                self.uncolour(f);
                self.tabu[f as usize * self.stride + c] = self.iter + tenure;
            }
            self.colour_with(e, c);
            best_pool = best_pool.min(self.uncoloured.len());
        }
        moves
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn greedy_bound(h: &Hypergraph) -> usize {
        h.r() * h.max_degree().saturating_sub(1) + 1
    }

    #[test]
    fn small_examples() {
        let single = Hypergraph::new(3, 3, vec![vec![0, 1, 2]]).unwrap();
        let d = decompose(&single, 1, 100, 1);
        assert_eq!(d.num_classes(), 1);
        assert!(validate(&single, &d));

        let two = Hypergraph::new(3, 6, vec![vec![0, 1, 2], vec![3, 4, 5]]).unwrap();
        let d = decompose(&two, 1, 100, 1);
        assert_eq!(d.classes(), &[vec![0, 1]]);
    }

    #[test]
    fn conflict_graph_examples() {
        let path = Hypergraph::new(2, 3, vec![vec![0, 1], vec![1, 2]]).unwrap();
        assert_eq!(conflict_graph(&path), vec![vec![1], vec![0]]);
        let m =
            Hypergraph::new(2, 8, vec![vec![0, 1], vec![2, 3], vec![4, 5], vec![6, 7]]).unwrap();
        assert!(conflict_graph(&m).iter().all(Vec::is_empty));
    }

    #[test]
    fn validate_rejects_bad_decompositions() {
        let path = Hypergraph::new(2, 3, vec![vec![0, 1], vec![1, 2]]).unwrap();
        let bad = MatchingDecomposition::from_classes(2, vec![vec![0, 1]]).unwrap();
        assert!(!validate(&path, &bad));
        let good = MatchingDecomposition::from_classes(2, vec![vec![0], vec![1]]).unwrap();
        assert!(validate(&path, &good));
        let empty = Hypergraph::empty(3, 4);
        let none = MatchingDecomposition::from_classes(0, vec![]).unwrap();
        assert!(validate(&empty, &none));
        assert!(MatchingDecomposition::from_classes(2, vec![vec![0]]).is_err());
        assert!(MatchingDecomposition::from_classes(2, vec![vec![0, 1], vec![1]]).is_err());
    }

    #[test]
    fn greedy_only_respects_bound() {
        let h = Hypergraph::new(
            3,
            7,
            vec![
                vec![0, 1, 2],
                vec![0, 3, 4],
                vec![0, 5, 6],
                vec![1, 3, 5],
                vec![2, 4, 6],
            ],
        )
        .unwrap();
        let d = decompose(&h, 1, 0, 9);
        assert!(validate(&h, &d));
        assert!(d.num_classes() <= greedy_bound(&h));
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let mut edges = Vec::new();
        for a in 0..40usize {
            for b in [1usize, 3, 7] {
                let mut e = vec![a, (a + b) % 40, (a + 3 * b + 2) % 40];
                e.sort();
                e.dedup();
                if e.len() == 3 {
                    edges.push(e);
                }
            }
        }
        edges.sort();
        edges.dedup();
        let h = Hypergraph::new(3, 40, edges).unwrap();
        let a = decompose(&h, 1, 5_000, 42);
        let b = decompose(&h, 1, 5_000, 42);
        assert_eq!(a, b);
        assert!(validate(&h, &a));
    }
}
