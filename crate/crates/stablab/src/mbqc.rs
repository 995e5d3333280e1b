//! Compilation of Clifford gate words onto grid cluster states.
//!
//! Wires are grid rows, time runs along columns. Measuring a column of the
//! cluster in X teleports every wire one step and applies `H^⊗m`; folding
//! `S^k` into a vertex basis and placing vertical CZ edges inside a column
//! prepend a diagonal layer, so each measured column contributes `H^⊗m·Δ_q`.
//! The compiler emits columns whose product is the word's unitary:
//! single-wire Hadamards are synthesized from the global-H calculus
//! (`H_t = S_t·H·S_t·H·S_t` up to phase), which yields a four-column gadget
//! for an adjacent-wire CNOT; distant pairs are routed with swap chains.
//!
//! Measurement outcomes feed a per-vertex byproduct rule: the residual
//! register always equals `P·U|+^m>` with `P` recomputed from the outcomes.

use crate::diag::GateStep;
use crate::gate::{conjugate_pauli_through, CliffordGate};
use crate::graph::{ColoredGraph, MeasBasis};
use crate::pauli::{PauliString, Sign};
use crate::tableau::StabilizerTableau;
use rand::Rng;
use std::collections::BTreeMap;
use thiserror::Error;

/// Signed single-qubit measurement basis of a pattern vertex.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct PatternBasis {
    pub axis: MeasBasis,
    /// Measure the negated observable (-X or -Y).
    pub negated: bool,
}

impl PatternBasis {
    fn from_fold(k: u8) -> Self {
        // observable (S^k)† X S^k
        match k & 3 {
            0 => PatternBasis { axis: MeasBasis::X, negated: false },
            1 => PatternBasis { axis: MeasBasis::Y, negated: true },
            2 => PatternBasis { axis: MeasBasis::X, negated: true },
            _ => PatternBasis { axis: MeasBasis::Y, negated: false },
        }
    }

    pub fn observable(&self, n: usize, v: usize) -> PauliString {
        let mut p = self.axis.observable(n, v);
        if self.negated {
            p.add_phase(2);
        }
        p
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum CompileError {
    #[error("word needs {needed} grid columns but the family provides {available}")]
    WordTooLong { needed: usize, available: usize },
    #[error("word acts on wire {wire} but the pattern has {wires} wires")]
    WireOutOfRange { wire: usize, wires: usize },
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ByproductError {
    #[error("missing outcome for measured vertex {0}")]
    MissingOutcome(usize),
}

/// A compiled measurement pattern on a grid fragment.
#[derive(Clone, Debug)]
pub struct MbqcPattern {
    wires: usize,
    cols: usize,
    graph: ColoredGraph,
    /// measured vertex -> signed basis
    bases: BTreeMap<usize, PatternBasis>,
    /// measured vertex -> byproduct rule on the residual wires
    rules: BTreeMap<usize, PauliString>,
    /// residual vertex ids in wire order
    residual: Vec<usize>,
    /// measured vertices in byproduct product order (descending column)
    product_order: Vec<usize>,
}

impl MbqcPattern {
    pub fn wires(&self) -> usize {
        self.wires
    }

    pub fn columns(&self) -> usize {
        self.cols
    }

    pub fn graph(&self) -> &ColoredGraph {
        &self.graph
    }

    pub fn bases(&self) -> &BTreeMap<usize, PatternBasis> {
        &self.bases
    }

    pub fn byproduct_rule(&self, vertex: usize) -> Option<&PauliString> {
        self.rules.get(&vertex)
    }

    pub fn residual_vertices(&self) -> &[usize] {
        &self.residual
    }

    fn vertex(&self, col: usize, wire: usize) -> usize {
        col * self.wires + wire
    }
}

/// One emitted measured column: per-wire S-exponent folds plus vertical
/// CZ edges (upper wire index of each adjacent pair).
#[derive(Clone, Debug, Default)]
struct Column {
    folds: Vec<u8>,
    vedges: Vec<usize>,
}

impl Column {
    fn new(m: usize) -> Self {
        Column {
            folds: vec![0; m],
            vedges: Vec::new(),
        }
    }

    fn is_empty(&self) -> bool {
        self.folds.iter().all(|&k| k == 0) && self.vedges.is_empty()
    }

    /// Application-order gates of `Δ_q` (folds and vertical CZs commute).
    fn diag_circuit(&self) -> Vec<CliffordGate> {
        let mut out = Vec::new();
        for (w, &k) in self.folds.iter().enumerate() {
            for _ in 0..k {
                out.push(CliffordGate::S(w));
            }
        }
        for &w in &self.vedges {
            out.push(CliffordGate::CZ(w, w + 1));
        }
        out
    }
}

/// Adjacency-respecting primitives the word is lowered to.
#[derive(Clone, Copy, Debug)]
enum Prim {
    SExp(usize, u8),
    /// CZ between wires (w, w+1)
    CzAdj(usize),
    /// CNOT with control and target adjacent
    CnotAdj { control: usize, target: usize },
}

fn lower_swap(a: usize, out: &mut Vec<Prim>) {
    // SWAP(a, a+1) from three alternating CNOTs
    out.push(Prim::CnotAdj { control: a, target: a + 1 });
    out.push(Prim::CnotAdj { control: a + 1, target: a });
    out.push(Prim::CnotAdj { control: a, target: a + 1 });
}

/// Emit `prims` conjugated by a swap chain that brings wire `from` to
/// position `to` (exclusive of `to` itself).
fn with_route(from: usize, to: usize, inner: &mut dyn FnMut(&mut Vec<Prim>, usize), out: &mut Vec<Prim>) {
    let mut pos = from;
    let mut swaps = Vec::new();
    while pos + 1 < to {
        swaps.push(pos);
        pos += 1;
    }
    while pos > to + 1 {
        swaps.push(pos - 1);
        pos -= 1;
    }
    for &s in &swaps {
        lower_swap(s, out);
    }
    inner(out, pos);
    for &s in swaps.iter().rev() {
        lower_swap(s, out);
    }
}

/// Lower a word to adjacency-respecting primitives, in application order
/// (the word's last step first).
fn lower_word(m: usize, word: &[GateStep]) -> Result<Vec<Prim>, CompileError> {
    let mut prims = Vec::new();
    for step in word.iter().rev() {
        // within a step the diagonal applies first
        let d = &step.diag;
        if d.wires() != m {
            return Err(CompileError::WireOutOfRange {
                wire: d.wires().saturating_sub(1),
                wires: m,
            });
        }
        for w in 0..m {
            if d.s_exp(w) != 0 {
                prims.push(Prim::SExp(w, d.s_exp(w)));
            }
        }
        for a in 0..m {
            for b in (a + 1)..m {
                if d.cz_exp(a, b) {
                    if b == a + 1 {
                        prims.push(Prim::CzAdj(a));
                    } else {
                        // route wire a next to b, CZ there, route back
                        with_route(a, b, &mut |out, pos| out.push(Prim::CzAdj(pos.min(b))), &mut prims);
                    }
                }
            }
        }
        if let Some(g) = step.cnot {
            let (c, t) = (g.control, g.target);
            if c >= m || t >= m {
                return Err(CompileError::WireOutOfRange { wire: c.max(t), wires: m });
            }
            if c + 1 == t || t + 1 == c {
                prims.push(Prim::CnotAdj { control: c, target: t });
            } else {
                with_route(c, t, &mut |out, pos| {
                    out.push(Prim::CnotAdj { control: pos, target: t })
                }, &mut prims);
            }
        }
    }
    Ok(prims)
}

/// Compile a gate word on `m` logical wires onto a grid pattern with at most
/// `max_cols` columns. Measuring the pattern's round-1 vertices leaves the
/// residual column in `P·U|+^m>` where `U` is the word's unitary and `P`
/// follows from [`pauli_byproduct`].
pub fn compile_word_to_mbqc(
    word: &[GateStep],
    m: usize,
    max_cols: usize,
) -> Result<MbqcPattern, CompileError> {
    let prims = lower_word(m, word)?;

    let mut columns: Vec<Column> = Vec::new();
    let mut pending = Column::new(m);
    let emit = |pending: &mut Column, columns: &mut Vec<Column>| {
        columns.push(std::mem::replace(pending, Column::new(m)));
    };

    for prim in prims {
        match prim {
            Prim::SExp(w, k) => pending.folds[w] = (pending.folds[w] + k) & 3,
            Prim::CzAdj(w) => pending.vedges.push(w),
            Prim::CnotAdj { control, target } => {
                // CNOT(c,t) = S_t H S_t H (CZ_ct S_t^2) H S_t H S_t up to
                // a global phase, consuming four H-columns
                let upper = control.min(target);
                pending.folds[target] = (pending.folds[target] + 1) & 3;
                emit(&mut pending, &mut columns);
                pending.folds[target] = 1;
                emit(&mut pending, &mut columns);
                pending.folds[target] = 2;
                pending.vedges.push(upper);
                emit(&mut pending, &mut columns);
                pending.folds[target] = 1;
                emit(&mut pending, &mut columns);
                pending.folds[target] = 1;
            }
        }
    }
    if !pending.is_empty() {
        emit(&mut pending, &mut columns);
        emit(&mut pending, &mut columns); // empty pad, cancels the extra H
    }

    let measured_cols = columns.len();
    let cols = measured_cols + 1;
    if cols > max_cols {
        return Err(CompileError::WordTooLong {
            needed: cols,
            available: max_cols,
        });
    }

    // pattern graph: full horizontal chains plus the placed vertical edges
    let n = cols * m;
    let vid = |c: usize, w: usize| c * m + w;
    let mut edges = Vec::new();
    for c in 0..cols {
        for w in 0..m {
            if c + 1 < cols {
                edges.push((vid(c, w), vid(c + 1, w)));
            }
        }
    }
    for (c, col) in columns.iter().enumerate() {
        for &w in &col.vedges {
            edges.push((vid(c, w), vid(c, w + 1)));
        }
    }
    let coloring = (0..n).map(|v| usize::from(v / m == cols - 1)).collect();
    let graph = ColoredGraph::new(n, edges, coloring).expect("pattern grid is simple");

    // bases from the folds
    let mut bases = BTreeMap::new();
    for (c, col) in columns.iter().enumerate() {
        for w in 0..m {
            bases.insert(vid(c, w), PatternBasis::from_fold(col.folds[w]));
        }
    }

    // byproduct rules by a backward pass: rule(q, w) = R_q • X_w where
    // R_q is the product of the later columns' H·Δ layers
    let mut map_x: Vec<PauliString> = (0..m).map(|w| PauliString::x(m, w)).collect();
    let mut map_z: Vec<PauliString> = (0..m).map(|w| PauliString::z(m, w)).collect();
    let apply_map = |mx: &[PauliString], mz: &[PauliString], p: &PauliString| {
        let mut out = PauliString::identity(m);
        out.set_phase(p.phase());
        for w in p.x_mask().iter_ones() {
            out.mul_assign(&mx[w]);
        }
        for w in p.z_mask().iter_ones() {
            out.mul_assign(&mz[w]);
        }
        out
    };
    let mut rules: BTreeMap<usize, PauliString> = BTreeMap::new();
    let mut product_order: Vec<usize> = Vec::new();
    let all_h: Vec<CliffordGate> = (0..m).map(CliffordGate::H).collect();
    for (q, col) in columns.iter().enumerate().rev() {
        for w in 0..m {
            rules.insert(vid(q, w), apply_map(&map_x, &map_z, &PauliString::x(m, w)));
            product_order.push(vid(q, w));
        }
        // extend the map backward through this column's H·Δ_q
        let mut layer = col.diag_circuit();
        layer.extend_from_slice(&all_h);
        let new_x: Vec<PauliString> = (0..m)
            .map(|w| {
                apply_map(
                    &map_x,
                    &map_z,
                    &conjugate_pauli_through(&layer, &PauliString::x(m, w)),
                )
            })
            .collect();
        let new_z: Vec<PauliString> = (0..m)
            .map(|w| {
                apply_map(
                    &map_x,
                    &map_z,
                    &conjugate_pauli_through(&layer, &PauliString::z(m, w)),
                )
            })
            .collect();
        map_x = new_x;
        map_z = new_z;
    }

    let residual = (0..m).map(|w| vid(cols - 1, w)).collect();
    Ok(MbqcPattern {
        wires: m,
        cols,
        graph,
        bases,
        rules,
        residual,
        product_order,
    })
}

/// Deterministic byproduct Pauli from the pattern outcomes; all-+1 yields
/// the identity. Outcomes must cover every measured vertex.
pub fn pauli_byproduct(
    pattern: &MbqcPattern,
    outcomes: &BTreeMap<usize, Sign>,
) -> Result<PauliString, ByproductError> {
    let mut f = PauliString::identity(pattern.wires);
    for &v in &pattern.product_order {
        let s = outcomes.get(&v).ok_or(ByproductError::MissingOutcome(v))?;
        if *s == Sign::Minus {
            f.mul_assign(&pattern.rules[&v]);
        }
    }
    Ok(f)
}

/// Result of honestly measuring a pattern's round-1 vertices.
pub struct PatternRun {
    /// Post-measurement state of the whole cluster.
    pub tableau: StabilizerTableau,
    pub outcomes: BTreeMap<usize, Sign>,
}

/// Build the cluster state and measure all round-1 vertices in their
/// assigned signed bases with natural randomness.
pub fn run_pattern(pattern: &MbqcPattern, rng: &mut impl Rng) -> PatternRun {
    let n = pattern.graph.num_vertices();
    let mut tab = crate::graph::build_graph_state(&pattern.graph);
    let mut outcomes = BTreeMap::new();
    for col in 0..pattern.cols - 1 {
        for w in 0..pattern.wires {
            let v = pattern.vertex(col, w);
            let obs = pattern.bases[&v].observable(n, v);
            let (sign, _) = tab.measure(&obs, rng).expect("pattern observable");
            outcomes.insert(v, sign);
        }
    }
    PatternRun {
        tableau: tab,
        outcomes,
    }
}

/// Stabilizer generators of the residual register (wire order) after a run.
pub fn residual_state(pattern: &MbqcPattern, run: &PatternRun) -> Vec<PauliString> {
    run.tableau.restrict_state(&pattern.residual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diag::{sample_uniform_h, CnotGate, GateStep};
    use crate::tableau::StabilizerTableau;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Reference: P·U|+^m> from direct simulation.
    fn reference_state(word: &[GateStep], m: usize, byproduct: &PauliString) -> StabilizerTableau {
        let mut tab = StabilizerTableau::plus_state(m);
        tab.apply_circuit(&crate::diag::word_circuit(word)).unwrap();
        tab.apply_pauli(byproduct);
        tab
    }

    fn check_word(word: &[GateStep], m: usize, rng: &mut ChaCha8Rng) {
        let pattern = compile_word_to_mbqc(word, m, 4096).unwrap();
        let run = run_pattern(&pattern, rng);
        let byproduct = pauli_byproduct(&pattern, &run.outcomes).unwrap();
        let reference = reference_state(word, m, &byproduct);
        for g in residual_state(&pattern, &run) {
            assert_eq!(
                reference.deterministic_sign(&g),
                Some(Sign::Plus),
                "residual generator {g} not stabilizing the reference"
            );
        }
    }

    #[test]
    fn empty_word_gives_plus_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        check_word(&[], 3, &mut rng);
        let pattern = compile_word_to_mbqc(&[], 3, 16).unwrap();
        assert_eq!(pattern.columns(), 1);
        let run = run_pattern(&pattern, &mut rng);
        assert!(pauli_byproduct(&pattern, &run.outcomes).unwrap().is_identity());
    }

    #[test]
    fn single_cnot_word() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let word = vec![GateStep::cnot(CnotGate::new(0, 1), 2)];
        for _ in 0..20 {
            check_word(&word, 2, &mut rng);
        }
    }

    #[test]
    fn single_diag_word() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let word = vec![GateStep::diag(sample_uniform_h(3, &mut rng))];
            check_word(&word, 3, &mut rng);
        }
    }

    #[test]
    fn random_words_match_direct_simulation() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..25 {
            let m = rng.gen_range(2..4);
            let len = rng.gen_range(1..5);
            let word: Vec<GateStep> = (0..len)
                .map(|_| {
                    let c = rng.gen_range(0..m);
                    let t = (c + rng.gen_range(1..m)) % m;
                    GateStep {
                        cnot: Some(CnotGate::new(c, t)),
                        diag: sample_uniform_h(m, &mut rng),
                    }
                })
                .collect();
            check_word(&word, m, &mut rng);
        }
    }

    #[test]
    fn byproduct_is_linear_over_flips() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let word = vec![
            GateStep::cnot(CnotGate::new(0, 1), 2),
            GateStep::diag(sample_uniform_h(2, &mut rng)),
        ];
        let pattern = compile_word_to_mbqc(&word, 2, 4096).unwrap();
        let run = run_pattern(&pattern, &mut rng);
        let base = pauli_byproduct(&pattern, &run.outcomes).unwrap();
        for &v in pattern.bases().keys() {
            let mut flipped = run.outcomes.clone();
            flipped.insert(v, flipped[&v].flip());
            let with_flip = pauli_byproduct(&pattern, &flipped).unwrap();
            // masks differ by exactly the rule of the flipped vertex
            let delta = base.mul(&with_flip.inverse());
            let rule = pattern.byproduct_rule(v).unwrap();
            assert_eq!(delta.x_mask(), rule.x_mask());
            assert_eq!(delta.z_mask(), rule.z_mask());
        }
    }

    #[test]
    fn too_long_word_errors() {
        let word = vec![GateStep::cnot(CnotGate::new(0, 1), 2); 4];
        assert!(matches!(
            compile_word_to_mbqc(&word, 2, 3),
            Err(CompileError::WordTooLong { .. })
        ));
    }

    #[test]
    fn missing_outcome_errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let word = vec![GateStep::cnot(CnotGate::new(0, 1), 2)];
        let pattern = compile_word_to_mbqc(&word, 2, 4096).unwrap();
        let run = run_pattern(&pattern, &mut rng);
        let mut outcomes = run.outcomes.clone();
        let v = *outcomes.keys().next().unwrap();
        outcomes.remove(&v);
        assert_eq!(
            pauli_byproduct(&pattern, &outcomes),
            Err(ByproductError::MissingOutcome(v))
        );
    }
}
