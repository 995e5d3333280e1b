//! Multi-block encoded registers: syndrome-measured preparation, logical
//! Clifford layers with bounded error spread, Pauli-frame conjugation, and
//! the noisy-extended relation check.
//!
//! Preparation measures every check on a physical product state, steering
//! random outcomes to the reference value and recording what it gets; the
//! recovery `Rec(s)` is never applied physically — it is accounted for
//! classically by conjugating it through the logical circuit and folding the
//! resulting X-frame into each block's decoded readout.

use crate::bits::BitVec;
use crate::gate::CliffordGate;
use crate::graph::MeasBasis;
use crate::noise::{sample_noise, NoiseSpec};
use crate::pauli::{PauliString, Sign};
use crate::surface::{CodeParams, SurfaceError, Syndrome};
use crate::tableau::StabilizerTableau;
use rand::Rng;
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LogicalBasis {
    Zero,
    Plus,
}

/// A logical operation on an encoded register.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum EncodedOp {
    H(usize),
    S(usize),
    Sdg(usize),
    Cnot(usize, usize),
    Cz(usize, usize),
}

/// Physical realization of one op: gate lists interleaved with relabelings.
enum Layer {
    Gates(Vec<CliffordGate>),
    Permute(Vec<usize>),
}

fn shift_gates(gates: &[CliffordGate], offset: usize) -> Vec<CliffordGate> {
    gates
        .iter()
        .map(|g| match *g {
            CliffordGate::H(q) => CliffordGate::H(q + offset),
            CliffordGate::S(q) => CliffordGate::S(q + offset),
            CliffordGate::X(q) => CliffordGate::X(q + offset),
            CliffordGate::Z(q) => CliffordGate::Z(q + offset),
            CliffordGate::CZ(a, b) => CliffordGate::CZ(a + offset, b + offset),
            CliffordGate::CNOT(a, b) => CliffordGate::CNOT(a + offset, b + offset),
        })
        .collect()
}

fn op_layers(params: &CodeParams, blocks: usize, op: EncodedOp) -> Vec<Layer> {
    let m = params.block_size();
    let n = blocks * m;
    match op {
        EncodedOp::H(b) => {
            let gates = (0..m).map(|q| CliffordGate::H(b * m + q)).collect();
            let mut perm: Vec<usize> = (0..n).collect();
            for (q, &img) in params.transpose_perm().iter().enumerate() {
                perm[b * m + q] = b * m + img;
            }
            vec![Layer::Gates(gates), Layer::Permute(perm)]
        }
        EncodedOp::S(b) => vec![Layer::Gates(shift_gates(params.fold_s_circuit(), b * m))],
        EncodedOp::Sdg(b) => {
            // S̄† = S̄³
            let gates = shift_gates(params.fold_s_circuit(), b * m);
            let mut all = gates.clone();
            all.extend_from_slice(&gates);
            all.extend_from_slice(&gates);
            vec![Layer::Gates(all)]
        }
        EncodedOp::Cnot(a, b) => {
            assert_ne!(a, b);
            let gates = (0..m)
                .map(|q| CliffordGate::CNOT(a * m + q, b * m + q))
                .collect();
            vec![Layer::Gates(gates)]
        }
        EncodedOp::Cz(a, b) => {
            let mut layers = op_layers(params, blocks, EncodedOp::H(b));
            layers.extend(op_layers(params, blocks, EncodedOp::Cnot(a, b)));
            layers.extend(op_layers(params, blocks, EncodedOp::H(b)));
            layers
        }
    }
}

/// Conjugate a Pauli frame through a sequence of logical ops, layer by layer.
pub fn conjugate_frame_through(
    params: &CodeParams,
    blocks: usize,
    ops: &[EncodedOp],
    frame: &PauliString,
) -> PauliString {
    let mut out = frame.clone();
    for &op in ops {
        for layer in op_layers(params, blocks, op) {
            match layer {
                Layer::Gates(gates) => {
                    out = crate::gate::conjugate_pauli_through(&gates, &out);
                }
                Layer::Permute(perm) => out = out.permuted(&perm),
            }
        }
    }
    out
}

/// The recovery Pauli of a multi-block register, embedded on all qubits.
pub fn rec_all_blocks(
    params: &CodeParams,
    syndromes: &[Syndrome],
) -> Result<PauliString, SurfaceError> {
    let m = params.block_size();
    let n = syndromes.len() * m;
    let mut out = PauliString::identity(n);
    for (b, s) in syndromes.iter().enumerate() {
        let rec = params.rec(s)?;
        for q in 0..m {
            out.x_mask_mut().set(b * m + q, rec.x_mask().get(q));
            out.z_mask_mut().set(b * m + q, rec.z_mask().get(q));
        }
    }
    Ok(out)
}

/// The X(f)Z(h) frame of `Rec(s)` pushed through a logical circuit:
/// `f` is the X part (which flips Z-basis readouts), `h` the Z part.
pub fn conjugated_frame(
    params: &CodeParams,
    blocks: usize,
    syndromes: &[Syndrome],
    ops: &[EncodedOp],
) -> Result<(BitVec, BitVec), SurfaceError> {
    let rec = rec_all_blocks(params, syndromes)?;
    let pushed = conjugate_frame_through(params, blocks, ops, &rec);
    Ok((pushed.x_mask().clone(), pushed.z_mask().clone()))
}

/// An encoded register of like blocks.
pub struct EncodedRegister {
    params: Arc<CodeParams>,
    blocks: usize,
    tableau: StabilizerTableau,
    prep_syndromes: Vec<Syndrome>,
}

impl EncodedRegister {
    /// Prepare `blocks` logical basis states: initialize the physical
    /// product state, inject one noise layer, measure every check steering
    /// toward +1 and record the outcome. The recovery is not applied.
    pub fn prepare_logical_basis(
        params: Arc<CodeParams>,
        blocks: usize,
        basis: LogicalBasis,
        noise: &NoiseSpec,
        rng: &mut impl Rng,
    ) -> Self {
        let m = params.block_size();
        let n = blocks * m;
        let mut tableau = match basis {
            LogicalBasis::Zero => StabilizerTableau::zero_state(n),
            LogicalBasis::Plus => StabilizerTableau::plus_state(n),
        };
        tableau.apply_pauli(&sample_noise(noise, n, rng));
        let mut prep_syndromes = Vec::with_capacity(blocks);
        for b in 0..blocks {
            let mut bits = BitVec::zeros(params.num_checks());
            for i in 0..params.num_checks() {
                let obs = embed_block(&params.check_observable(i), b, m, n);
                let sign = match tableau.deterministic_sign(&obs) {
                    Some(sign) => sign,
                    None => {
                        tableau
                            .measure_pauli(&obs, Some(Sign::Plus), rng)
                            .expect("steered check measurement");
                        Sign::Plus
                    }
                };
                bits.set(i, sign == Sign::Minus);
            }
            prep_syndromes.push(Syndrome { bits });
        }
        EncodedRegister {
            params,
            blocks,
            tableau,
            prep_syndromes,
        }
    }

    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }

    pub fn prep_syndromes(&self) -> &[Syndrome] {
        &self.prep_syndromes
    }

    pub fn tableau(&self) -> &StabilizerTableau {
        &self.tableau
    }

    pub fn num_qubits(&self) -> usize {
        self.blocks * self.params.block_size()
    }

    pub fn apply_op(&mut self, op: EncodedOp) {
        for layer in op_layers(&self.params, self.blocks, op) {
            match layer {
                Layer::Gates(gates) => self.tableau.apply_circuit(&gates).expect("valid layer"),
                Layer::Permute(perm) => self.tableau.permute_qubits(&perm),
            }
        }
    }

    pub fn apply_ops(&mut self, ops: &[EncodedOp]) {
        ops.iter().for_each(|&op| self.apply_op(op));
    }

    /// One layer of local stochastic noise on every physical qubit.
    pub fn inject_noise(&mut self, spec: &NoiseSpec, rng: &mut impl Rng) {
        let e = sample_noise(spec, self.num_qubits(), rng);
        self.tableau.apply_pauli(&e);
    }

    /// Basis-change ops turning an X/Y logical measurement into a
    /// transversal Z readout of the block.
    pub fn basis_change_ops(block: usize, basis: MeasBasis) -> Vec<EncodedOp> {
        match basis {
            MeasBasis::X => vec![EncodedOp::H(block)],
            MeasBasis::Y => vec![EncodedOp::Sdg(block), EncodedOp::H(block)],
        }
    }

    /// Destructive transversal Z-basis readout of one block; bit set = −1.
    pub fn measure_block_z(&mut self, block: usize, rng: &mut impl Rng) -> BitVec {
        let m = self.params.block_size();
        let n = self.num_qubits();
        let mut bits = BitVec::zeros(m);
        for q in 0..m {
            let obs = PauliString::z(n, block * m + q);
            let (sign, _) = self.tableau.measure(&obs, rng).expect("Z readout");
            bits.set(q, sign == Sign::Minus);
        }
        bits
    }

    /// Value of a logical observable representative (for p = 0 testing).
    pub fn logical_deterministic_sign(&self, block: usize, obs: &PauliString) -> Option<Sign> {
        let m = self.params.block_size();
        let embedded = embed_block(obs, block, m, self.num_qubits());
        self.tableau.deterministic_sign(&embedded)
    }
}

/// Embed a one-block Pauli at block index `b` of an `n`-qubit register.
pub fn embed_block(p: &PauliString, b: usize, m: usize, n: usize) -> PauliString {
    let mut out = PauliString::identity(n);
    for q in 0..m {
        out.x_mask_mut().set(b * m + q, p.x_mask().get(q));
        out.z_mask_mut().set(b * m + q, p.z_mask().get(q));
    }
    out.set_phase(p.phase());
    out
}

/// One verification stage: logical ops applied, then blocks measured
/// transversally in Z.
pub struct NoisyStage {
    pub ops: Vec<EncodedOp>,
    pub measured: Vec<(usize, BitVec)>,
}

/// The noisy-extended relation check: decode every measured block with the
/// conjugated frame and hand the decoded logical bits to the base relation.
pub fn check_noisy_extended(
    params: &CodeParams,
    blocks: usize,
    syndromes: &[Syndrome],
    stages: &[NoisyStage],
    relation: impl FnOnce(&BTreeMap<usize, bool>) -> bool,
) -> Result<bool, SurfaceError> {
    let m = params.block_size();
    let mut frame = rec_all_blocks(params, syndromes)?;
    let mut decoded: BTreeMap<usize, bool> = BTreeMap::new();
    for stage in stages {
        frame = conjugate_frame_through(params, blocks, &stage.ops, &frame);
        for (b, bits) in &stage.measured {
            if bits.len() != m {
                return Err(SurfaceError::BlockLength {
                    got: bits.len(),
                    want: m,
                });
            }
            let mut corrected = bits.clone();
            for q in 0..m {
                if frame.x_mask().get(b * m + q) {
                    corrected.flip(q);
                }
            }
            decoded.insert(*b, params.dec_z(&corrected)?);
        }
    }
    Ok(relation(&decoded))
}
