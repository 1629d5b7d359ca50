//! Worked applications: approximate Steiner systems with subgraph
//! statistics, and rainbow matchings in Latin squares.

pub mod latin;
pub mod patterns;
pub mod rainbow;
pub mod runs;
pub mod steiner;
