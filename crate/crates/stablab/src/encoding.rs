//! The randomized encoding pipeline: matrix randomization with share
//! splitting, the monotone matrix B, the layered DAG construction, and the
//! half-randomization audit.
//!
//! The input DAG's parity bit rides through as `det(L) mod 2`; multiplying
//! by random unit upper-triangular matrices on both sides yields a uniformly
//! random same-determinant matrix of the same shape, whose cells are then
//! split into XOR shares. The layered graph reads the shares back as edges,
//! preserving the path parity while hiding everything else about the input.

use crate::bits::BitMatrix;
use crate::dag::{extract_l, MonotoneDag};
use rand::Rng;
use std::collections::BTreeSet;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum EncodingError {
    #[error("matrix is not in L-form (upper triangular with unit second diagonal)")]
    NotLForm,
}

/// True for square matrices that are upper triangular except for ones on
/// the second diagonal.
pub fn is_l_form(m: &BitMatrix) -> bool {
    let n = m.rows();
    if m.cols() != n {
        return false;
    }
    for r in 0..n {
        for c in 0..n {
            if r == c + 1 && !m.get(r, c) {
                return false;
            }
            if r > c + 1 && m.get(r, c) {
                return false;
            }
        }
    }
    true
}

/// Explicit randomness for one randomized-encoding run, so exhaustive
/// audits can enumerate it: strict-upper bits of R1 and R2 (row-major) and
/// the free share-split bits per cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RandomizeBits {
    pub r1: Vec<bool>,
    pub r2: Vec<bool>,
    /// per upper cell, `shares - 1` free bits
    pub splits: Vec<Vec<bool>>,
}

fn strict_upper_slots(n1: usize) -> usize {
    n1 * (n1 - 1) / 2
}

fn upper_cells(n1: usize) -> Vec<(usize, usize)> {
    (0..n1).flat_map(|i| (i..n1).map(move |j| (i, j))).collect()
}

impl RandomizeBits {
    pub fn sample(n1: usize, shares: usize, rng: &mut impl Rng) -> Self {
        let s = strict_upper_slots(n1);
        RandomizeBits {
            r1: (0..s).map(|_| rng.gen()).collect(),
            r2: (0..s).map(|_| rng.gen()).collect(),
            splits: upper_cells(n1)
                .iter()
                .map(|_| (0..shares - 1).map(|_| rng.gen()).collect())
                .collect(),
        }
    }

    /// Every assignment, for exhaustive audits at small sizes.
    pub fn enumerate(n1: usize, shares: usize) -> Vec<Self> {
        let s = strict_upper_slots(n1);
        let cells = upper_cells(n1).len();
        let free = 2 * s + cells * (shares - 1);
        assert!(free <= 24, "randomness space too large to enumerate");
        (0..1usize << free)
            .map(|mask| {
                let bit = |k: usize| mask >> k & 1 == 1;
                let r1 = (0..s).map(bit).collect();
                let r2 = (s..2 * s).map(bit).collect();
                let splits = (0..cells)
                    .map(|c| {
                        (0..shares - 1)
                            .map(|l| bit(2 * s + c * (shares - 1) + l))
                            .collect()
                    })
                    .collect();
                RandomizeBits { r1, r2, splits }
            })
            .collect()
    }
}

fn unit_upper_from_bits(n1: usize, bits: &[bool]) -> BitMatrix {
    let mut m = BitMatrix::identity(n1);
    let mut k = 0;
    for i in 0..n1 {
        for j in (i + 1)..n1 {
            if bits[k] {
                m.set(i, j, true);
            }
            k += 1;
        }
    }
    m
}

/// Per-cell XOR shares of a randomized L-form matrix. The second diagonal
/// is implicitly one and everything below it zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ShareMatrix {
    n1: usize,
    shares: usize,
    /// row-major upper cells (i <= j), each holding `shares` bits
    cells: Vec<Vec<bool>>,
}

impl ShareMatrix {
    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn shares_per_cell(&self) -> usize {
        self.shares
    }

    fn cell_index(&self, i: usize, j: usize) -> usize {
        assert!(i <= j && j < self.n1);
        // cells of rows before i, plus offset in row i
        (0..i).map(|r| self.n1 - r).sum::<usize>() + (j - i)
    }

    pub fn share_bit(&self, i: usize, j: usize, l: usize) -> bool {
        self.cells[self.cell_index(i, j)][l]
    }

    /// The implied matrix: XOR of shares above the diagonal, ones on the
    /// second diagonal, zeros below.
    pub fn k_oplus(&self) -> BitMatrix {
        let mut m = BitMatrix::zeros(self.n1, self.n1);
        for (ci, (i, j)) in upper_cells(self.n1).into_iter().enumerate() {
            let bit = self.cells[ci].iter().fold(false, |a, &b| a ^ b);
            m.set(i, j, bit);
        }
        for r in 1..self.n1 {
            m.set(r, r - 1, true);
        }
        m
    }

    /// Direct share assignment (for worked examples and goldens).
    pub fn from_cells(n1: usize, shares: usize, cells: Vec<Vec<bool>>) -> Self {
        assert_eq!(cells.len(), upper_cells(n1).len());
        assert!(cells.iter().all(|c| c.len() == shares));
        ShareMatrix { n1, shares, cells }
    }
}

/// `K⊕ = R1·L·R2` with fresh unit upper-triangular factors, split into
/// uniform shares conditioned on the cell XOR. Determinant and shape are
/// preserved exactly.
pub fn randomize_matrix_with(
    l: &BitMatrix,
    shares: usize,
    bits: &RandomizeBits,
) -> Result<ShareMatrix, EncodingError> {
    if !is_l_form(l) {
        return Err(EncodingError::NotLForm);
    }
    assert!(shares >= 1);
    let n1 = l.rows();
    let r1 = unit_upper_from_bits(n1, &bits.r1);
    let r2 = unit_upper_from_bits(n1, &bits.r2);
    let k = r1.mul(l).mul(&r2);
    debug_assert!(is_l_form(&k));
    debug_assert_eq!(k.det(), l.det());
    let cells = upper_cells(n1)
        .into_iter()
        .enumerate()
        .map(|(ci, (i, j))| {
            let target = k.get(i, j);
            let mut cell: Vec<bool> = bits.splits[ci].clone();
            let partial = cell.iter().fold(false, |a, &b| a ^ b);
            cell.push(partial ^ target);
            cell
        })
        .collect();
    Ok(ShareMatrix {
        n1,
        shares,
        cells,
    })
}

pub fn randomize_matrix(
    l: &BitMatrix,
    shares: usize,
    rng: &mut impl Rng,
) -> Result<ShareMatrix, EncodingError> {
    let bits = RandomizeBits::sample(l.rows(), shares, rng);
    randomize_matrix_with(l, shares, &bits)
}

/// The monotone matrix whose strictly-upper entries are `K⊕`'s upper
/// region; its source-to-sink path parity equals `det(K⊕) mod 2`.
pub fn build_b(k: &ShareMatrix) -> MonotoneDag {
    let n = k.n1() + 1;
    let km = k.k_oplus();
    let mut dag = MonotoneDag::new(n);
    for (i, j) in upper_cells(k.n1()) {
        if km.get(i, j) {
            dag.add_edge(i, j + 1).expect("strictly upper");
        }
    }
    dag
}

/// Vertex of a layered DAG: a plain graph vertex copy or a share vertex.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum LVertex {
    Plain(usize),
    /// share `l` of cell (i, j), all 0-based
    Share { i: usize, j: usize, l: usize },
}

/// The `2n-1`-layer DAG `N_1 J_1 N_2 ... J_{n-1} N_n` with edges only
/// between consecutive layers.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LayeredDag {
    n: usize,
    shares: usize,
    layers: Vec<Vec<LVertex>>,
    /// per layer gap: (source index, target index) pairs, sorted
    edges: Vec<Vec<(usize, usize)>>,
}

impl LayeredDag {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn shares(&self) -> usize {
        self.shares
    }

    pub fn layers(&self) -> &[Vec<LVertex>] {
        &self.layers
    }

    pub fn gap_edges(&self, gap: usize) -> &[(usize, usize)] {
        &self.edges[gap]
    }

    pub fn num_gaps(&self) -> usize {
        self.edges.len()
    }

    /// Human-readable layer name: N1, J1, N2, ...
    pub fn layer_name(idx: usize) -> String {
        if idx % 2 == 0 {
            format!("N{}", idx / 2 + 1)
        } else {
            format!("J{}", idx / 2 + 1)
        }
    }

    /// Parity of paths from vertex 1 in `N_1` to vertex n in `N_n`.
    pub fn path_parity(&self) -> bool {
        let mut reach = vec![false; self.layers[0].len()];
        let src = self
            .layers[0]
            .iter()
            .position(|v| *v == LVertex::Plain(0))
            .expect("source present");
        reach[src] = true;
        for (gap, layer_edges) in self.edges.iter().enumerate() {
            let mut next = vec![false; self.layers[gap + 1].len()];
            for &(s, t) in layer_edges {
                next[t] ^= reach[s];
            }
            reach = next;
        }
        let sink = self
            .layers
            .last()
            .unwrap()
            .iter()
            .position(|v| *v == LVertex::Plain(self.n - 1))
            .expect("sink present");
        reach[sink]
    }

    /// Break the layer structure, for exercising shape validation in tests.
    #[cfg(test)]
    pub(crate) fn corrupt_for_tests(mut self) -> Self {
        self.layers.pop();
        self.edges.pop();
        self
    }

    /// Canonical text dump, the golden-file format.
    pub fn dump(&self) -> String {
        let label = |v: &LVertex| match v {
            LVertex::Plain(q) => format!("{}", q + 1),
            LVertex::Share { i, j, l } => format!("K[{},{},{}]", i + 1, j + 1, l + 1),
        };
        let mut out = format!("layers {}\n", self.layers.len());
        for (idx, layer) in self.layers.iter().enumerate() {
            let names: Vec<String> = layer.iter().map(&label).collect();
            let _ = writeln!(
                out,
                "layer {}: {}",
                Self::layer_name(idx),
                names.join(" ")
            );
        }
        for (gap, layer_edges) in self.edges.iter().enumerate() {
            for &(s, t) in layer_edges {
                let _ = writeln!(
                    out,
                    "edge {}:{} -> {}:{}",
                    Self::layer_name(gap),
                    label(&self.layers[gap][s]),
                    Self::layer_name(gap + 1),
                    label(&self.layers[gap + 1][t]),
                );
            }
        }
        out
    }
}

/// The layered-DAG construction over a share matrix: plain vertices chain
/// straight through; share vertices hang off vertex `i` in `N_i` (edge
/// present iff the share bit is one) and always rejoin at vertex `j+1`.
pub fn build_layered(k: &ShareMatrix) -> LayeredDag {
    let n = k.n1() + 1;
    let shares = k.shares_per_cell();
    let mut layers: Vec<Vec<LVertex>> = Vec::with_capacity(2 * n - 1);
    for gi in 0..n {
        layers.push((0..n).map(LVertex::Plain).collect());
        if gi + 1 < n {
            let mut j_layer: Vec<LVertex> = (0..n).map(LVertex::Plain).collect();
            for j in gi..k.n1() {
                for l in 0..shares {
                    j_layer.push(LVertex::Share { i: gi, j, l });
                }
            }
            layers.push(j_layer);
        }
    }

    let mut edges: Vec<Vec<(usize, usize)>> = Vec::with_capacity(2 * n - 2);
    for gi in 0..n - 1 {
        // N_{gi+1} -> J_{gi+1}
        let j_layer = &layers[2 * gi + 1];
        let mut gap = Vec::new();
        for q in 0..n {
            gap.push((q, q));
        }
        for (t, v) in j_layer.iter().enumerate() {
            if let LVertex::Share { i, j, l } = *v {
                if k.share_bit(i, j, l) {
                    gap.push((i, t));
                }
            }
        }
        gap.sort_unstable();
        edges.push(gap);

        // J_{gi+1} -> N_{gi+2}
        let mut gap = Vec::new();
        for q in 0..n {
            gap.push((q, q));
        }
        for (s, v) in j_layer.iter().enumerate() {
            if let LVertex::Share { j, .. } = *v {
                gap.push((s, j + 1));
            }
        }
        gap.sort_unstable();
        edges.push(gap);
    }

    LayeredDag {
        n,
        shares,
        layers,
        edges,
    }
}

/// The full half-randomizing reduction: randomize the determinant encoding
/// of `A` and lay the shares out as a layered DAG.
pub fn dfrak(dag: &MonotoneDag, shares: usize, rng: &mut impl Rng) -> LayeredDag {
    let bits = RandomizeBits::sample(dag.n() - 1, shares, rng);
    dfrak_with(dag, shares, &bits)
}

pub fn dfrak_with(dag: &MonotoneDag, shares: usize, bits: &RandomizeBits) -> LayeredDag {
    let l = extract_l(dag);
    let k = randomize_matrix_with(&l, shares, bits).expect("L is always in form");
    build_layered(&k)
}

/// Exact distribution report for a candidate half-randomizing map, over an
/// enumerable domain and fully enumerated randomness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuditReport {
    pub identical_within_yes: bool,
    pub identical_within_no: bool,
    pub disjoint_across: bool,
    pub equal_cardinality: bool,
    pub yes_support: usize,
    pub no_support: usize,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.identical_within_yes
            && self.identical_within_no
            && self.disjoint_across
            && self.equal_cardinality
    }
}

pub fn half_randomization_audit<A, O: Ord + Clone>(
    domain: &[A],
    classify: impl Fn(&A) -> bool,
    outputs: impl Fn(&A) -> Vec<O>,
) -> AuditReport {
    let mut yes_dists: Vec<Vec<O>> = Vec::new();
    let mut no_dists: Vec<Vec<O>> = Vec::new();
    for a in domain {
        let mut out = outputs(a);
        out.sort();
        if classify(a) {
            yes_dists.push(out);
        } else {
            no_dists.push(out);
        }
    }
    let identical = |dists: &[Vec<O>]| dists.windows(2).all(|w| w[0] == w[1]);
    let support = |dists: &[Vec<O>]| -> BTreeSet<O> {
        dists.iter().flatten().cloned().collect()
    };
    let yes_supp = support(&yes_dists);
    let no_supp = support(&no_dists);
    AuditReport {
        identical_within_yes: identical(&yes_dists),
        identical_within_no: identical(&no_dists),
        disjoint_across: yes_supp.intersection(&no_supp).count() == 0,
        equal_cardinality: yes_supp.len() == no_supp.len(),
        yes_support: yes_supp.len(),
        no_support: no_supp.len(),
    }
}

/// The worked share assignment used as a golden: shares
/// ((1,0),(1,1); -; (0,1)) over a 2x2 upper matrix.
pub fn worked_example_shares() -> ShareMatrix {
    ShareMatrix::from_cells(
        2,
        2,
        vec![
            vec![true, false],
            vec![true, true],
            vec![false, true],
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dag::{det_encoding, path_parity_bruteforce};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn randomize_preserves_det_and_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..500 {
            let n = rand::Rng::gen_range(&mut rng, 3..=6);
            let dag = MonotoneDag::random(n, &mut rng);
            let l = extract_l(&dag);
            let k = randomize_matrix(&l, 2, &mut rng).unwrap();
            let km = k.k_oplus();
            assert!(is_l_form(&km));
            assert_eq!(km.det(), l.det());
        }
    }

    #[test]
    fn k_orbit_uniform_exhaustive_n1_2() {
        // for every L, K⊕ is exactly uniform over the same-determinant
        // L-form matrices, checked over the full (R1, R2) space
        use std::collections::HashMap;
        for l_mask in 0..8u32 {
            let mut l = BitMatrix::zeros(2, 2);
            l.set(1, 0, true);
            l.set(0, 0, l_mask & 1 != 0);
            l.set(0, 1, l_mask & 2 != 0);
            l.set(1, 1, l_mask & 4 != 0);
            let mut hits: HashMap<Vec<bool>, usize> = HashMap::new();
            for bits in RandomizeBits::enumerate(2, 1) {
                let k = randomize_matrix_with(&l, 1, &bits).unwrap().k_oplus();
                let key = vec![k.get(0, 0), k.get(0, 1), k.get(1, 1)];
                *hits.entry(key).or_default() += 1;
            }
            // 4 same-determinant matrices, each hit equally often
            assert_eq!(hits.len(), 4, "L mask {l_mask}");
            let counts: Vec<usize> = hits.values().copied().collect();
            assert!(counts.iter().all(|&c| c == counts[0]));
        }
    }

    #[test]
    fn b_preserves_parity() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..500 {
            let n = rand::Rng::gen_range(&mut rng, 2..=6);
            let dag = MonotoneDag::random(n, &mut rng);
            let l = extract_l(&dag);
            let k = randomize_matrix(&l, 2, &mut rng).unwrap();
            let b = build_b(&k);
            assert_eq!(path_parity_bruteforce(&b), path_parity_bruteforce(&dag));
            assert_eq!(det_encoding(&b), det_encoding(&dag));
        }
    }

    #[test]
    fn all_zero_shares_give_parity_zero() {
        let k = ShareMatrix::from_cells(2, 2, vec![vec![false; 2]; 3]);
        let c = build_layered(&k);
        assert!(!c.path_parity());
        assert!(!path_parity_bruteforce(&build_b(&k)));
    }

    #[test]
    fn layered_parity_matches_b_exhaustively_n3() {
        // all share assignments at n = 3 with 2 shares per cell
        for mask in 0..64u32 {
            let cells: Vec<Vec<bool>> = (0..3)
                .map(|c| vec![mask >> (2 * c) & 1 == 1, mask >> (2 * c + 1) & 1 == 1])
                .collect();
            let k = ShareMatrix::from_cells(2, 2, cells);
            let c = build_layered(&k);
            assert_eq!(c.path_parity(), path_parity_bruteforce(&build_b(&k)));
        }
    }

    #[test]
    fn worked_example_connectivity_and_parity() {
        let k = worked_example_shares();
        assert!(k.share_bit(0, 0, 0) && !k.share_bit(0, 0, 1));
        assert!(k.share_bit(0, 1, 0) && k.share_bit(0, 1, 1));
        assert!(!k.share_bit(1, 1, 0) && k.share_bit(1, 1, 1));
        let c = build_layered(&k);
        assert_eq!(c.layers().len(), 5);
        // J1 holds the three plain vertices plus four share vertices
        assert_eq!(c.layers()[1].len(), 3 + 4);
        // J2 holds three plain plus two share vertices
        assert_eq!(c.layers()[3].len(), 3 + 2);
        // K⊕ = [[1,0],[1,1]] -> B edges 0->1 and 1->2: one path, odd parity
        assert!(c.path_parity());
        let dump = c.dump();
        assert!(dump.contains("layer N1: 1 2 3"));
        assert!(dump.contains("K[1,2,2]"));
        assert!(dump.contains("edge N1:1 -> J1:K[1,1,1]"));
        // absent share edge: K[1,1,2] = 0 has no incoming edge from vertex 1
        assert!(!dump.contains("edge N1:1 -> J1:K[1,1,2]"));
        // share exit edges are unconditional
        assert!(dump.contains("edge J1:K[1,1,2] -> N2:2"));
    }

    #[test]
    fn dfrak_preserves_parity_randomized() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..300 {
            let n = rand::Rng::gen_range(&mut rng, 2..=6);
            let dag = MonotoneDag::random(n, &mut rng);
            let c = dfrak(&dag, 2, &mut rng);
            assert_eq!(c.path_parity(), path_parity_bruteforce(&dag));
        }
    }

    #[test]
    fn dfrak_is_half_randomizing_exhaustive_n3() {
        let domain = MonotoneDag::enumerate(3);
        let randomness = RandomizeBits::enumerate(2, 2);
        let report = half_randomization_audit(
            &domain,
            path_parity_bruteforce,
            |a| {
                randomness
                    .iter()
                    .map(|bits| dfrak_with(a, 2, bits).dump())
                    .collect()
            },
        );
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.yes_support, report.no_support);
    }

    #[test]
    fn identity_map_fails_the_audit() {
        let domain = MonotoneDag::enumerate(3);
        let report = half_randomization_audit(&domain, path_parity_bruteforce, |a| {
            vec![a.to_text()]
        });
        assert!(!report.identical_within_yes || !report.identical_within_no);
        assert!(!report.passed());
    }

    #[test]
    fn parity_classes_have_equal_size() {
        for n in 2..=5 {
            let (yes, no): (Vec<_>, Vec<_>) = MonotoneDag::enumerate(n)
                .into_iter()
                .partition(path_parity_bruteforce);
            assert_eq!(yes.len(), no.len(), "n = {n}");
        }
    }
}
