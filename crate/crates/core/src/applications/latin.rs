//! Latin squares as proper n-colourings of K_{n,n}.

use rand::seq::SliceRandom;

use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatinKind {
    Cyclic,
    Random { seed: u64 },
}

/// `square[i][j]` is the colour of the edge between left vertex `i` and
/// right vertex `j`.
pub fn latin_square(n: usize, kind: LatinKind) -> Vec<Vec<u32>> {
    match kind {
        LatinKind::Cyclic => (0..n)
            .map(|i| (0..n).map(|j| ((i + j) % n) as u32).collect())
            .collect(),
        LatinKind::Random { seed } => random_square(n, seed),
    }
}

/// Row by row: start from a random symbol permutation, keep the entries
/// that do not clash with their column, then complete the row by
/// augmenting paths in the column/symbol availability graph. A Latin
/// rectangle always extends, so the repair never fails.
fn random_square(n: usize, seed: u64) -> Vec<Vec<u32>> {
    let mut rng = rng::stream(seed, "latin", &[]);
    let mut used = vec![vec![false; n]; n]; // used[column][symbol]
    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        let mut col_sym = vec![usize::MAX; n];
        let mut sym_col = vec![usize::MAX; n];
        for (j, &s) in perm.iter().enumerate() {
            if !used[j][s] {
                col_sym[j] = s;
                sym_col[s] = j;
            }
        }
        let mut cols: Vec<usize> = (0..n).filter(|&j| col_sym[j] == usize::MAX).collect();
        cols.shuffle(&mut rng);
        for j in cols {
            let mut visited = vec![false; n];
            let ok = augment(j, &used, &mut col_sym, &mut sym_col, &mut visited);
            assert!(ok, "a Latin rectangle always extends to a further row");
        }
        for (j, &s) in col_sym.iter().enumerate() {
            used[j][s] = true;
        }
        rows.push(col_sym.into_iter().map(|s| s as u32).collect());
    }
    rows
}

fn augment(
    j: usize,
    used: &[Vec<bool>],
    col_sym: &mut [usize],
    sym_col: &mut [usize],
    visited: &mut [bool],
) -> bool {
    for s in 0..used.len() {
        if used[j][s] || visited[s] {
            continue;
        }
        visited[s] = true;
        if sym_col[s] == usize::MAX || augment(sym_col[s], used, col_sym, sym_col, visited) {
            col_sym[j] = s;
            sym_col[s] = j;
            return true;
        }
    }
    false
}

/// Every row and column holds each symbol exactly once.
pub fn is_latin(square: &[Vec<u32>]) -> bool {
    let n = square.len();
    fn line_ok(n: usize, line: impl Iterator<Item = u32>) -> bool {
        let mut seen = vec![false; n];
        let mut line = line;
        line.all(|s| (s as usize) < n && !std::mem::replace(&mut seen[s as usize], true))
    }
    square.iter().all(|row| row.len() == n)
        && (0..n).all(|i| line_ok(n, square[i].iter().copied()))
        && (0..n).all(|j| line_ok(n, square.iter().map(|row| row[j])))
}
