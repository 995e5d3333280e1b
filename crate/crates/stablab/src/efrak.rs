//! Reduction from layered DAGs to fixed-length CNOT words whose GF(2)
//! product is the identity or a fixed 3-cycle.
//!
//! One wire per (layer, vertex) plus a shared dummy target for absent share
//! edges keeps the gate sequence data-independent in length while edge
//! presence toggles only each gate's target, so the map is injective. The
//! forward pass accumulates path parities, a readout CNOT copies the sink
//! into an ancilla `a`, and the reversed pass uncomputes; that block is the
//! transvection `A = I + e_a·cᵀ` where `c` holds every wire's path parity
//! into the sink. Squaring against `B = I + e_s·e_bᵀ` (one CNOT from a fresh
//! trigger wire `b` into the source) multiplies the two one-hot factors out:
//! `(AB)² = I + γ·e_a·e_bᵀ` with `γ` exactly the source-to-sink parity — the
//! junk coordinates of `c` cancel. Six permutation-conjugated copies of that
//! `{I, CNOT(b→a)}` block then realize the promise `{I, C3}` on the first
//! three wires, with C3 the cycle 1→2→3→1.

use crate::bits::BitMatrix;
use crate::diag::CnotGate;
use crate::encoding::{LVertex, LayeredDag};
use thiserror::Error;

/// A fixed-length sequence of CNOT gates on `m` wires, read in application
/// order; the word's linear map is the product of its transvections.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CnotWord {
    pub m: usize,
    pub gates: Vec<CnotGate>,
}

impl CnotWord {
    /// The GF(2) linear map `x_final = M · x_initial`.
    pub fn matrix(&self) -> BitMatrix {
        let mut m = BitMatrix::identity(self.m);
        for g in &self.gates {
            let row_c = m.row(g.control).clone();
            m.row_mut(g.target).xor_assign(&row_c);
        }
        m
    }

    /// The reversed word realizes the inverse product (CNOTs are
    /// involutions).
    pub fn reversed(&self) -> CnotWord {
        CnotWord {
            m: self.m,
            gates: self.gates.iter().rev().copied().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }
}

/// The fixed 3-cycle permutation matrix on wires {0,1,2}: content of wire 0
/// moves to wire 1, 1 to 2, 2 to 0.
pub fn three_cycle_matrix(m: usize) -> BitMatrix {
    let mut c = BitMatrix::identity(m);
    c.set(0, 0, false);
    c.set(1, 1, false);
    c.set(2, 2, false);
    c.set(1, 0, true);
    c.set(2, 1, true);
    c.set(0, 2, true);
    c
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum EfrakError {
    #[error("layered DAG does not have the expected layer structure: {0}")]
    ShapeMismatch(String),
}

/// Wire bookkeeping for one instance size.
struct WireMap {
    m: usize,
    /// wire of vertex `t` in layer `idx`
    layer_base: Vec<usize>,
    dummy: usize,
    trigger: usize,
    ancilla: usize,
}

impl WireMap {
    fn new(c: &LayeredDag) -> Self {
        let mut next = 3; // wires 0..3 are the protocol wires
        let mut layer_base = Vec::with_capacity(c.layers().len());
        for layer in c.layers() {
            layer_base.push(next);
            next += layer.len();
        }
        let dummy = next;
        let trigger = next + 1;
        let ancilla = next + 2;
        WireMap {
            m: next + 3,
            layer_base,
            dummy,
            trigger,
            ancilla,
        }
    }

    fn wire(&self, layer: usize, t: usize) -> usize {
        self.layer_base[layer] + t
    }
}

fn validate_shape(c: &LayeredDag) -> Result<(), EfrakError> {
    let n = c.n();
    if c.layers().len() != 2 * n - 1 {
        return Err(EfrakError::ShapeMismatch(format!(
            "expected {} layers, found {}",
            2 * n - 1,
            c.layers().len()
        )));
    }
    for (idx, layer) in c.layers().iter().enumerate() {
        for (t, v) in layer.iter().enumerate() {
            match (idx % 2, t < n, v) {
                (_, true, LVertex::Plain(q)) if *q == t => {}
                (1, false, LVertex::Share { i, .. }) if *i == idx / 2 => {}
                _ => {
                    return Err(EfrakError::ShapeMismatch(format!(
                        "layer {idx} slot {t} holds {v:?}"
                    )))
                }
            }
        }
        if idx % 2 == 0 && layer.len() != n {
            return Err(EfrakError::ShapeMismatch(format!(
                "N-layer {idx} has {} vertices",
                layer.len()
            )));
        }
    }
    Ok(())
}

/// The reduction. Output length and wire count depend only on `(n, shares)`,
/// never on edge content.
pub fn efrak(c: &LayeredDag) -> Result<CnotWord, EfrakError> {
    validate_shape(c)?;
    let n = c.n();
    let wires = WireMap::new(c);

    // forward pass: every slot emits exactly one gate
    let mut forward: Vec<CnotGate> = Vec::new();
    for gap in 0..c.num_gaps() {
        let present: std::collections::BTreeSet<(usize, usize)> =
            c.gap_edges(gap).iter().copied().collect();
        let target_layer = gap + 1;
        if gap % 2 == 0 {
            // N_i -> J_i: identity slots, then one slot per share vertex
            let i = gap / 2;
            for q in 0..n {
                forward.push(CnotGate::new(wires.wire(gap, q), wires.wire(target_layer, q)));
            }
            for t in n..c.layers()[target_layer].len() {
                let target = if present.contains(&(i, t)) {
                    wires.wire(target_layer, t)
                } else {
                    wires.dummy
                };
                forward.push(CnotGate::new(wires.wire(gap, i), target));
            }
        } else {
            // J_i -> N_{i+1}: identity slots, then unconditional share exits
            for q in 0..n {
                forward.push(CnotGate::new(wires.wire(gap, q), wires.wire(target_layer, q)));
            }
            for (t, v) in c.layers()[gap].iter().enumerate().skip(n) {
                let LVertex::Share { j, .. } = *v else {
                    unreachable!("validated shape");
                };
                forward.push(CnotGate::new(
                    wires.wire(gap, t),
                    wires.wire(target_layer, j + 1),
                ));
            }
        }
    }

    // A = reverse ∘ readout ∘ forward = I + e_a·cᵀ
    let source = wires.wire(0, 0);
    let sink = wires.wire(2 * n - 2, n - 1);
    let mut a_block = forward.clone();
    a_block.push(CnotGate::new(sink, wires.ancilla));
    a_block.extend(forward.iter().rev());

    // W = (A·B)² = I + γ·e_a·e_bᵀ, application order [B, A, B, A]
    let b_gate = CnotGate::new(wires.trigger, source);
    let mut w_block: Vec<CnotGate> = vec![b_gate];
    w_block.extend_from_slice(&a_block);
    w_block.push(b_gate);
    w_block.extend_from_slice(&a_block);

    // promise conversion: C3 = (swap 0,1)·(swap 1,2) as six transvections;
    // conjugate W so its {I, CNOT(trigger→ancilla)} value lands on each
    let ts: [(usize, usize); 6] = [(1, 2), (2, 1), (1, 2), (0, 1), (1, 0), (0, 1)];
    let swap = |x: usize, y: usize| {
        vec![
            CnotGate::new(x, y),
            CnotGate::new(y, x),
            CnotGate::new(x, y),
        ]
    };
    let mut gates: Vec<CnotGate> = Vec::new();
    for (u, v) in ts {
        let mut conj = swap(wires.trigger, u);
        conj.extend(swap(wires.ancilla, v));
        gates.extend(conj.iter().rev());
        gates.extend_from_slice(&w_block);
        gates.extend(conj.iter());
    }

    Ok(CnotWord {
        m: wires.m,
        gates,
    })
}

/// Expected word length for an instance size, for padding-soundness checks.
pub fn word_len(n: usize, shares: usize) -> usize {
    let share_slots: usize = (0..n - 1).map(|gi| (n - 1 - gi) * shares).collect::<Vec<_>>().iter().sum();
    let forward = (2 * n - 2) * n + 2 * share_slots;
    let a_block = 2 * forward + 1;
    let w_block = 2 * a_block + 2;
    6 * (w_block + 12)
}

pub fn wire_count(n: usize, shares: usize) -> usize {
    let layer_vertices = n * n + (n - 1) * n + shares * (n - 1) * n / 2;
    3 + layer_vertices + 3
}
