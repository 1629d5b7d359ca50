//! Uniform hypergraphs with degree and codegree statistics.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Above this many `e(H) * r^2` pair incidences, single codegree queries go
/// through a hashed pair index instead of scanning incidence lists.
const PAIR_INDEX_THRESHOLD: usize = 1 << 18;

/// An r-uniform hypergraph. Edges are stored flat, each sorted ascending;
/// an edge is identified by its position.
#[derive(Debug, Clone)]
pub struct Hypergraph {
    r: usize,
    num_vertices: usize,
    verts: Vec<u32>,
    degrees: Vec<u32>,
    incidence: OnceLock<Incidence>,
    pairs: OnceLock<HashMap<u64, u32>>,
}

#[derive(Debug, Clone)]
struct Incidence {
    offsets: Vec<usize>,
    edges: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeStats {
    pub max_degree: usize,
    /// Minimum over all declared vertices, isolated ones included.
    pub min_degree: usize,
    pub max_codegree: usize,
}

/// Result of restricting a hypergraph to a vertex subset or an edge subset.
#[derive(Debug, Clone)]
pub struct SubHypergraph {
    pub graph: Hypergraph,
    /// Old edge id to new edge id, `None` if the edge did not survive.
    pub old_to_new: Vec<Option<u32>>,
    pub new_to_old: Vec<u32>,
}

fn pair_key(u: u32, v: u32) -> u64 {
    let (a, b) = if u < v { (u, v) } else { (v, u) };
    (u64::from(a) << 32) | u64::from(b)
}

impl Hypergraph {
    /// Builds a hypergraph, sorting each edge. Rejects edges of the wrong
    /// size or with repeated vertices, out-of-range vertices and duplicate
    /// edge sets.
    pub fn new(r: usize, num_vertices: usize, edges: Vec<Vec<usize>>) -> Result<Self> {
        if r == 0 {
            return Err(Error::BadParams("uniformity r must be at least 1".into()));
        }
        if num_vertices > u32::MAX as usize {
            return Err(Error::TooLarge(format!("{num_vertices} vertices")));
        }
        let mut verts = Vec::with_capacity(edges.len() * r);
        for (i, mut e) in edges.into_iter().enumerate() {
            e.sort_unstable();
            e.dedup();
            if e.len() != r {
                return Err(Error::NonUniformEdge { edge: i, r });
            }
            if let Some(&v) = e.iter().find(|&&v| v >= num_vertices) {
                return Err(Error::VertexOutOfRange {
                    vertex: v,
                    num_vertices,
                });
            }
            verts.extend(e.into_iter().map(|v| v as u32));
        }
        let h = Self::from_flat(r, num_vertices, verts);
        h.check_duplicates()?;
        Ok(h)
    }

    /// Builds from an already sorted, validated flat edge array.
    pub(crate) fn from_flat(r: usize, num_vertices: usize, verts: Vec<u32>) -> Self {
        debug_assert_eq!(verts.len() % r, 0);
        let mut degrees = vec![0u32; num_vertices];
        for &v in &verts {
            degrees[v as usize] += 1;
        }
        Self {
            r,
            num_vertices,
            verts,
            degrees,
            incidence: OnceLock::new(),
            pairs: OnceLock::new(),
        }
    }

    fn check_duplicates(&self) -> Result<()> {
        let mut seen: HashMap<&[u32], usize> = HashMap::with_capacity(self.num_edges());
        for (i, e) in self.edges().enumerate() {
            if let Some(&first) = seen.get(e) {
                return Err(Error::DuplicateEdge { edge: i, first });
            }
            seen.insert(e, i);
        }
        Ok(())
    }

    pub fn empty(r: usize, num_vertices: usize) -> Self {
        Self::from_flat(r.max(1), num_vertices, Vec::new())
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.verts.len() / self.r
    }

    pub fn is_empty(&self) -> bool {
        self.verts.is_empty()
    }

    /// Vertices of edge `id`, sorted ascending. Panics if `id` is out of range.
    pub fn edge(&self, id: usize) -> &[u32] {
        &self.verts[id * self.r..(id + 1) * self.r]
    }

    pub fn edges(&self) -> std::slice::ChunksExact<'_, u32> {
        self.verts.chunks_exact(self.r)
    }

    pub fn check_edge_id(&self, id: usize) -> Result<()> {
        if id < self.num_edges() {
            Ok(())
        } else {
            Err(Error::UnknownEdgeId {
                id,
                num_edges: self.num_edges(),
            })
        }
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.num_vertices {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange {
                vertex: v,
                num_vertices: self.num_vertices,
            })
        }
    }

    pub fn degree(&self, v: usize) -> Result<usize> {
        self.check_vertex(v)?;
        Ok(self.degrees[v] as usize)
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    fn incidence_index(&self) -> &Incidence {
        self.incidence.get_or_init(|| {
            let mut offsets = Vec::with_capacity(self.num_vertices + 1);
            let mut acc = 0usize;
            offsets.push(0);
            for &d in &self.degrees {
                acc += d as usize;
                offsets.push(acc);
            }
            let mut fill = offsets.clone();
            let mut edges = vec![0u32; acc];
            for (i, e) in self.edges().enumerate() {
                for &v in e {
                    edges[fill[v as usize]] = i as u32;
                    fill[v as usize] += 1;
                }
            }
            Incidence { offsets, edges }
        })
    }

    /// Ids of the edges containing `v`, ascending. Panics if `v` is out of range.
    pub fn incident_edges(&self, v: usize) -> &[u32] {
        let inc = self.incidence_index();
        &inc.edges[inc.offsets[v]..inc.offsets[v + 1]]
    }

    pub fn codegree(&self, u: usize, v: usize) -> Result<usize> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(Error::SameVertex(u));
        }
        if self.num_edges() * self.r * self.r > PAIR_INDEX_THRESHOLD {
            let pairs = self.pairs.get_or_init(|| {
                let mut map = HashMap::new();
                for e in self.edges() {
                    for (a, &x) in e.iter().enumerate() {
                        for &y in &e[a + 1..] {
                            *map.entry(pair_key(x, y)).or_insert(0) += 1;
                        }
                    }
                }
                map
            });
            return Ok(pairs
                .get(&pair_key(u as u32, v as u32))
                .copied()
                .unwrap_or(0) as usize);
        }
        let (a, b) = if self.degrees[u] <= self.degrees[v] {
            (u, v)
        } else {
            (v, u)
        };
        let b = b as u32;
        Ok(self
            .incident_edges(a)
            .iter()
            .filter(|&&e| self.edge(e as usize).binary_search(&b).is_ok())
            .count())
    }

    /// Largest codegree, by a full scan of every vertex's incidence list.
    pub fn max_codegree(&self) -> usize {
        if self.r < 2 {
            return 0;
        }
        let mut count = vec![0u32; self.num_vertices];
        let mut touched = Vec::new();
        let mut best = 0u32;
        for u in 0..self.num_vertices {
            for &e in self.incident_edges(u) {
                for &w in self.edge(e as usize) {
                    if (w as usize) > u {
                        if count[w as usize] == 0 {
                            touched.push(w);
                        }
                        count[w as usize] += 1;
                    }
                }
            }
            for w in touched.drain(..) {
                best = best.max(count[w as usize]);
                count[w as usize] = 0;
            }
        }
        best as usize
    }

    pub fn stats(&self) -> DegreeStats {
        DegreeStats {
            max_degree: self.degrees.iter().copied().max().unwrap_or(0) as usize,
            min_degree: self.degrees.iter().copied().min().unwrap_or(0) as usize,
            max_codegree: self.max_codegree(),
        }
    }

    pub fn max_degree(&self) -> usize {
        self.degrees.iter().copied().max().unwrap_or(0) as usize
    }

    /// True iff the given edges are pairwise vertex-disjoint. Repeated ids
    /// denote the same edge.
    pub fn is_matching(&self, ids: &[usize]) -> Result<bool> {
        let mut owner = vec![u32::MAX; self.num_vertices];
        for &id in ids {
            self.check_edge_id(id)?;
            for &v in self.edge(id) {
                let o = &mut owner[v as usize];
                if *o != u32::MAX && *o != id as u32 {
                    return Ok(false);
                }
                *o = id as u32;
            }
        }
        Ok(true)
    }

    /// Sub-hypergraph of the edges lying entirely inside `subset`, on the
    /// same vertex set.
    pub fn induced(&self, subset: &[bool]) -> SubHypergraph {
        assert_eq!(
            subset.len(),
            self.num_vertices,
            "subset mask has wrong length"
        );
        self.edge_subgraph_by(|e| self.edge(e).iter().all(|&v| subset[v as usize]))
    }

    /// Sub-hypergraph keeping the listed edges, in ascending id order.
    pub fn edge_subgraph(&self, ids: &[usize]) -> Result<SubHypergraph> {
        let mut keep = vec![false; self.num_edges()];
        for &id in ids {
            self.check_edge_id(id)?;
            keep[id] = true;
        }
        Ok(self.edge_subgraph_by(|e| keep[e]))
    }

    fn edge_subgraph_by(&self, mut keep: impl FnMut(usize) -> bool) -> SubHypergraph {
        let mut old_to_new = vec![None; self.num_edges()];
        let mut new_to_old = Vec::new();
        let mut verts = Vec::new();
        for (id, slot) in old_to_new.iter_mut().enumerate() {
            if keep(id) {
                *slot = Some(new_to_old.len() as u32);
                new_to_old.push(id as u32);
                verts.extend_from_slice(self.edge(id));
            }
        }
        SubHypergraph {
            graph: Self::from_flat(self.r, self.num_vertices, verts),
            old_to_new,
            new_to_old,
        }
    }

    /// Embeds the hypergraph into a `target`-regular one. Each round takes
    /// `r` disjoint copies of the current graph and, for every vertex of
    /// degree below `target` (ascending order), adds the edge formed by its
    /// `r` copies. Rounds repeat until the graph is regular; the first round
    /// always runs, so the output contains `r` labelled copies of `self`
    /// (copy `c` of vertex `x` is `c * n + x` for the current `n`).
    pub fn regularize(&self, target: usize) -> Result<Self> {
        const MAX_VERTICES: usize = 1 << 24;
        let delta = self.max_degree();
        if target < delta {
            return Err(Error::BadParams(format!(
                "target degree {target} is below the maximum degree {delta}"
            )));
        }
        let min_deg = self.degrees.iter().copied().min().unwrap_or(0) as usize;
        let rounds = (target - min_deg).max(1);
        let projected = (self.num_vertices as f64) * (self.r as f64).powi(rounds as i32);
        if projected > MAX_VERTICES as f64 {
            return Err(Error::TooLarge(format!(
                "regularization would create about {projected:.3e} vertices"
            )));
        }
        let mut cur = self.clone();
        loop {
            let n = cur.num_vertices;
            let r = cur.r;
            let mut verts = Vec::with_capacity(cur.verts.len() * r + n * r);
            for c in 0..r {
                let shift = (c * n) as u32;
                verts.extend(cur.verts.iter().map(|&v| v + shift));
            }
            for x in 0..n {
                if (cur.degrees[x] as usize) < target {
                    verts.extend((0..r).map(|c| (c * n + x) as u32));
                }
            }
            cur = Self::from_flat(r, n * r, verts);
            if cur.degrees.iter().all(|&d| d as usize == target) {
                return Ok(cur);
            }
        }
    }

    /// Serializes to the `HGR` text format.
    pub fn to_hgr(&self) -> String {
        let mut out = String::with_capacity(self.verts.len() * 6 + 32);
        let _ = writeln!(out, "{} {} {}", self.r, self.num_vertices, self.num_edges());
        for e in self.edges() {
            let mut first = true;
            for v in e {
                if !first {
                    out.push(' ');
                }
                first = false;
                let _ = write!(out, "{v}");
            }
            out.push('\n');
        }
        out
    }

    /// Parses the `HGR` text format. Lines starting with `#` and blank lines
    /// are skipped.
    pub fn from_hgr(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let parse_nums = |line: usize, l: &str| -> Result<Vec<usize>> {
            l.split_whitespace()
                .map(|t| {
                    t.parse::<usize>().map_err(|_| Error::Parse {
                        line,
                        msg: format!("not a nonnegative integer: {t:?}"),
                    })
                })
                .collect()
        };
        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 0,
            msg: "missing header".into(),
        })?;
        let header = parse_nums(hline, header)?;
        let [r, n, m] = header[..] else {
            return Err(Error::Parse {
                line: hline,
                msg: "header must be `r num_vertices num_edges`".into(),
            });
        };
        let mut edges = Vec::with_capacity(m);
        for (line, l) in lines {
            let e = parse_nums(line, l)?;
            if e.len() != r {
                return Err(Error::Parse {
                    line,
                    msg: format!("expected {r} vertices, found {}", e.len()),
                });
            }
            edges.push(e);
        }
        if edges.len() != m {
            return Err(Error::Parse {
                line: 0,
                msg: format!("header declares {m} edges, file has {}", edges.len()),
            });
        }
        Self::new(r, n, edges)
    }
}

impl PartialEq for Hypergraph {
    fn eq(&self, other: &Self) -> bool {
        self.r == other.r && self.num_vertices == other.num_vertices && self.verts == other.verts
    }
}

impl Eq for Hypergraph {}

#[cfg(test)]
mod tests {
    use super::*;

    fn path() -> Hypergraph {
        Hypergraph::new(2, 3, vec![vec![0, 1], vec![1, 2]]).unwrap()
    }

    fn single() -> Hypergraph {
        Hypergraph::new(3, 3, vec![vec![0, 1, 2]]).unwrap()
    }

    #[test]
    fn build_examples() {
        let p = path();
        assert_eq!(p.num_edges(), 2);
        assert_eq!(p.edge(1), &[1, 2]);
        assert_eq!(single().num_edges(), 1);
        assert!(matches!(
            Hypergraph::new(2, 2, vec![vec![0, 0]]),
            Err(Error::NonUniformEdge { edge: 0, r: 2 })
        ));
        assert!(matches!(
            Hypergraph::new(2, 2, vec![vec![0, 2]]),
            Err(Error::VertexOutOfRange { vertex: 2, .. })
        ));
        assert!(matches!(
            Hypergraph::new(2, 3, vec![vec![0, 1], vec![1, 0]]),
            Err(Error::DuplicateEdge { edge: 1, first: 0 })
        ));
        // edges are canonicalized
        let h = Hypergraph::new(3, 5, vec![vec![4, 0, 2]]).unwrap();
        assert_eq!(h.edge(0), &[0, 2, 4]);
    }

    #[test]
    fn degrees_and_codegrees() {
        let p = path();
        assert_eq!(p.degree(1).unwrap(), 2);
        assert_eq!(p.degree(0).unwrap(), 1);
        assert!(p.degree(3).is_err());
        assert_eq!(single().degree(0).unwrap(), 1);
        assert_eq!(single().codegree(0, 1).unwrap(), 1);
        assert_eq!(p.codegree(0, 2).unwrap(), 0);
        assert!(matches!(p.codegree(1, 1), Err(Error::SameVertex(1))));
        assert_eq!(
            p.stats(),
            DegreeStats {
                max_degree: 2,
                min_degree: 1,
                max_codegree: 1
            }
        );
    }

    #[test]
    fn isolated_vertices_count_for_min_degree() {
        let h = Hypergraph::new(2, 4, vec![vec![0, 1]]).unwrap();
        assert_eq!(h.stats().min_degree, 0);
    }

    #[test]
    fn matching_checks() {
        let p = path();
        assert!(!p.is_matching(&[0, 1]).unwrap());
        assert!(p.is_matching(&[0]).unwrap());
        assert!(p.is_matching(&[]).unwrap());
        assert!(p.is_matching(&[1, 1]).unwrap());
        assert!(matches!(
            p.is_matching(&[2]),
            Err(Error::UnknownEdgeId { id: 2, .. })
        ));
    }

    #[test]
    fn induced_examples() {
        let p = path();
        let s = p.induced(&[true, true, false]);
        assert_eq!(s.graph.num_edges(), 1);
        assert_eq!(s.old_to_new, vec![Some(0), None]);
        assert_eq!(s.new_to_old, vec![0]);
        assert_eq!(p.induced(&[true, false, true]).graph.num_edges(), 0);
    }

    #[test]
    fn regularize_examples() {
        let h = single().regularize(1).unwrap();
        assert_eq!(h.num_vertices(), 9);
        assert_eq!(h.num_edges(), 3);
        assert!(h.degrees().iter().all(|&d| d == 1));

        let h = path().regularize(2).unwrap();
        let st = h.stats();
        assert_eq!((st.max_degree, st.min_degree), (2, 2));
        assert!(st.max_codegree <= 1);
        assert!(path().regularize(1).is_err());
    }

    #[test]
    fn pair_index_agrees_with_scan() {
        // 3-graph big enough to switch to the hashed pair index
        let n = 1000;
        let mut edges = Vec::new();
        for a in 0..n {
            for d in 1..40 {
                let b = (a + d) % n;
                let c = (a + 3 * d + 1) % n;
                if a != b && b != c && a != c {
                    edges.push(vec![a, b, c]);
                }
            }
        }
        edges.iter_mut().for_each(|e| e.sort());
        edges.sort();
        edges.dedup();
        let h = Hypergraph::new(3, n, edges).unwrap();
        assert!(h.num_edges() * 9 > PAIR_INDEX_THRESHOLD);
        for (u, v) in [(0, 1), (0, 4), (5, 17), (7, 100)] {
            let direct = h
                .edges()
                .filter(|e| e.contains(&u) && e.contains(&v))
                .count();
            assert_eq!(h.codegree(u as usize, v as usize).unwrap(), direct);
        }
    }

    #[test]
    fn hgr_round_trip_is_bit_exact() {
        let text = "3 6 2\n0 1 2\n3 4 5\n";
        let h = Hypergraph::from_hgr(text).unwrap();
        assert_eq!(h.to_hgr(), text);
        let with_comments = "# a comment\n3 6 2\n\n0 2 1\n# mid\n3 4 5\n";
        assert_eq!(Hypergraph::from_hgr(with_comments).unwrap().to_hgr(), text);
        assert!(Hypergraph::from_hgr("3 6 3\n0 1 2\n").is_err());
        assert!(Hypergraph::from_hgr("2 3\n").is_err());
        assert!(matches!(
            Hypergraph::from_hgr("2 3 1\n0 x\n"),
            Err(Error::Parse { line: 2, .. })
        ));
    }
}
