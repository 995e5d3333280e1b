//! Monotone DAGs, source-to-sink path parity, and its determinant encoding.

use crate::bits::BitMatrix;
use rand::Rng;
use thiserror::Error;

/// A directed graph on `{0, .., n-1}` with edges only from lower to higher
/// indices, stored as a strictly upper-triangular adjacency matrix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MonotoneDag {
    n: usize,
    adj: BitMatrix,
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum DagError {
    #[error("edge ({0},{1}) violates monotonicity")]
    NotMonotone(usize, usize),
    #[error("vertex {0} out of range for {1} vertices")]
    OutOfRange(usize, usize),
    #[error("line {0}: {1}")]
    Parse(usize, String),
}

impl MonotoneDag {
    pub fn new(n: usize) -> Self {
        MonotoneDag {
            n,
            adj: BitMatrix::zeros(n, n),
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, DagError> {
        let mut dag = Self::new(n);
        for &(u, v) in edges {
            dag.add_edge(u, v)?;
        }
        Ok(dag)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<(), DagError> {
        if u >= self.n || v >= self.n {
            return Err(DagError::OutOfRange(u.max(v), self.n));
        }
        if u >= v {
            return Err(DagError::NotMonotone(u, v));
        }
        self.adj.set(u, v, true);
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj.get(u, v)
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in self.adj.row(u).iter_ones() {
                out.push((u, v));
            }
        }
        out
    }

    /// Uniformly random monotone DAG.
    pub fn random(n: usize, rng: &mut impl Rng) -> Self {
        let mut dag = Self::new(n);
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen::<bool>() {
                    dag.adj.set(u, v, true);
                }
            }
        }
        dag
    }

    /// All `2^(n(n-1)/2)` monotone DAGs, for exhaustive sweeps.
    pub fn enumerate(n: usize) -> Vec<Self> {
        let slots: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
            .collect();
        let count = 1usize << slots.len();
        (0..count)
            .map(|mask| {
                let mut dag = Self::new(n);
                for (b, &(u, v)) in slots.iter().enumerate() {
                    if mask >> b & 1 == 1 {
                        dag.adj.set(u, v, true);
                    }
                }
                dag
            })
            .collect()
    }

    /// Flip the direct source-to-sink edge; a parity-toggling bijection.
    pub fn toggle_direct_edge(&self) -> Self {
        let mut out = self.clone();
        let v = out.adj.get(0, out.n - 1);
        out.adj.set(0, out.n - 1, !v);
        out
    }

    /// Text format: first line `n`, then one `u v` edge per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for (u, v) in self.edges() {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, DagError> {
        let mut lines = text.lines().enumerate();
        let (_, first) = lines
            .next()
            .ok_or_else(|| DagError::Parse(1, "empty input".into()))?;
        let n: usize = first
            .trim()
            .parse()
            .map_err(|e: std::num::ParseIntError| DagError::Parse(1, e.to_string()))?;
        let mut dag = Self::new(n);
        for (i, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let mut toks = line.split_whitespace();
            let parse = |t: Option<&str>| {
                t.and_then(|s| s.parse::<usize>().ok())
                    .ok_or_else(|| DagError::Parse(i + 1, format!("bad edge line: {line}")))
            };
            let u = parse(toks.next())?;
            let v = parse(toks.next())?;
            dag.add_edge(u, v)?;
        }
        Ok(dag)
    }
}

/// Parity of the number of paths from vertex 0 to vertex n-1, by dynamic
/// programming over GF(2). This is the independent oracle the encodings are
/// tested against.
pub fn path_parity_bruteforce(dag: &MonotoneDag) -> bool {
    let n = dag.n;
    if n == 0 {
        return false;
    }
    let mut count = vec![false; n];
    count[0] = true;
    for v in 1..n {
        for u in 0..v {
            if dag.has_edge(u, v) {
                count[v] ^= count[u];
            }
        }
    }
    count[n - 1]
}

/// The `(n-1) x (n-1)` top-right submatrix of `A - I`: upper triangular
/// entries from `A`, ones on the second diagonal, zeros below.
pub fn extract_l(dag: &MonotoneDag) -> BitMatrix {
    let n = dag.n;
    assert!(n >= 2);
    let mut l = BitMatrix::zeros(n - 1, n - 1);
    for i in 0..n - 1 {
        for j in 0..n - 1 {
            let mut v = dag.adj.get(i, j + 1);
            if i == j + 1 {
                v = !v;
            }
            l.set(i, j, v);
        }
    }
    l
}

/// `det(L) mod 2`, which equals the source-to-sink path parity.
pub fn det_encoding(dag: &MonotoneDag) -> bool {
    extract_l(dag).det()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Literal path enumeration, a second oracle for the oracle.
    fn count_paths(dag: &MonotoneDag, from: usize) -> u64 {
        if from == dag.n() - 1 {
            return 1;
        }
        ((from + 1)..dag.n())
            .filter(|&v| dag.has_edge(from, v))
            .map(|v| count_paths(dag, v))
            .sum()
    }

    #[test]
    fn single_edge_and_edgeless() {
        let mut dag = MonotoneDag::new(4);
        assert!(!path_parity_bruteforce(&dag));
        dag.add_edge(0, 3).unwrap();
        assert!(path_parity_bruteforce(&dag));
    }

    #[test]
    fn diamond_has_even_parity() {
        let dag = MonotoneDag::from_edges(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
        assert!(!path_parity_bruteforce(&dag));
        assert_eq!(count_paths(&dag, 0), 2);
    }

    #[test]
    fn dp_matches_literal_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let dag = MonotoneDag::random(6, &mut rng);
            assert_eq!(path_parity_bruteforce(&dag), count_paths(&dag, 0) % 2 == 1);
        }
    }

    #[test]
    fn det_encoding_exhaustive_small_n() {
        for n in 2..=5 {
            for dag in MonotoneDag::enumerate(n) {
                assert_eq!(
                    det_encoding(&dag),
                    path_parity_bruteforce(&dag),
                    "n={n} dag={:?}",
                    dag.edges()
                );
            }
        }
    }

    #[test]
    fn monotonicity_enforced() {
        let mut dag = MonotoneDag::new(3);
        assert!(matches!(dag.add_edge(2, 1), Err(DagError::NotMonotone(2, 1))));
        assert!(matches!(dag.add_edge(1, 1), Err(DagError::NotMonotone(1, 1))));
        assert!(matches!(dag.add_edge(0, 5), Err(DagError::OutOfRange(5, 3))));
    }

    #[test]
    fn toggle_direct_edge_flips_parity() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let dag = MonotoneDag::random(5, &mut rng);
            assert_ne!(
                path_parity_bruteforce(&dag),
                path_parity_bruteforce(&dag.toggle_direct_edge())
            );
        }
    }

    #[test]
    fn text_roundtrip() {
        let dag = MonotoneDag::from_edges(5, &[(0, 2), (1, 4), (2, 3)]).unwrap();
        let text = dag.to_text();
        let back = MonotoneDag::from_text(&text).unwrap();
        assert_eq!(back, dag);
        assert_eq!(back.to_text(), text);
    }
}
