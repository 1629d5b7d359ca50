//! Rainbow matchings in properly edge-coloured bipartite graphs.
//!
//! Each coloured edge `uv` of colour `c` becomes the 3-edge `{u, v, c}` on
//! the vertex set `U ∪ V ∪ C`. Matchings in this hypergraph are exactly the
//! rainbow matchings of the graph. For a proper colouring every degree is
//! at most the largest vertex degree of the graph plus the largest colour
//! class, and every codegree is at most one.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;

/// A graph edge `(left, right, colour)`.
pub type ColouredEdge = (u32, u32, u32);

#[derive(Debug, Clone)]
pub struct RainbowInstance {
    pub hypergraph: Hypergraph,
    pub n_left: usize,
    pub n_right: usize,
    pub num_colours: usize,
    /// Hyperedge `i` comes from `edges[i]`.
    pub edges: Vec<ColouredEdge>,
}

impl RainbowInstance {
    pub fn new(n_left: usize, n_right: usize, edges: Vec<ColouredEdge>) -> Result<Self> {
        let num_colours = edges.iter().map(|e| e.2 as usize + 1).max().unwrap_or(0);
        let mut at_left = HashSet::new();
        let mut at_right = HashSet::new();
        let mut pairs = HashSet::new();
        for &(u, v, c) in &edges {
            if u as usize >= n_left {
                return Err(Error::VertexOutOfRange {
                    vertex: u as usize,
                    num_vertices: n_left,
                });
            }
            if v as usize >= n_right {
                return Err(Error::VertexOutOfRange {
                    vertex: v as usize,
                    num_vertices: n_right,
                });
            }
            if !pairs.insert((u, v)) {
                return Err(Error::BadParams(format!(
                    "parallel edges between {u} and {v}"
                )));
            }
            if !at_left.insert((u, c)) {
                return Err(Error::ImproperColouring(format!(
                    "colour {c} repeats at left vertex {u}"
                )));
            }
            if !at_right.insert((v, c)) {
                return Err(Error::ImproperColouring(format!(
                    "colour {c} repeats at right vertex {v}"
                )));
            }
        }
        let base = n_left + n_right;
        let hyper = edges
            .iter()
            .map(|&(u, v, c)| vec![u as usize, n_left + v as usize, base + c as usize])
            .collect();
        let hypergraph = Hypergraph::new(3, base + num_colours, hyper)?;
        Ok(Self {
            hypergraph,
            n_left,
            n_right,
            num_colours,
            edges,
        })
    }

    /// The coloured K_{n,n} given by a Latin square.
    pub fn from_latin(square: &[Vec<u32>]) -> Result<Self> {
        let n = square.len();
        let edges = square
            .iter()
            .enumerate()
            .flat_map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(move |(j, &c)| (i as u32, j as u32, c))
            })
            .collect();
        Self::new(n, n, edges)
    }

    /// The graph edges behind a set of hyperedge ids.
    pub fn graph_edges(&self, ids: &[usize]) -> Vec<ColouredEdge> {
        ids.iter().map(|&i| self.edges[i]).collect()
    }

    /// Maps graph edges back to hyperedge ids; `None` if one is unknown.
    pub fn hyperedge_ids(&self, graph_edges: &[ColouredEdge]) -> Option<Vec<usize>> {
        graph_edges
            .iter()
            .map(|e| self.edges.iter().position(|f| f == e))
            .collect()
    }
}

/// Vertex-disjoint with pairwise distinct colours.
pub fn is_rainbow_matching(edges: &[ColouredEdge]) -> bool {
    let mut left = HashSet::new();
    let mut right = HashSet::new();
    let mut colours = HashSet::new();
    edges
        .iter()
        .all(|&(u, v, c)| left.insert(u) && right.insert(v) && colours.insert(c))
}
