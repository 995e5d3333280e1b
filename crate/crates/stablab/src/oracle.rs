//! Rewindable oracle devices.
//!
//! The word-interface devices answer the two-round protocol whose first
//! round is a gate word and whose second round is a line of four commuting
//! 3-qubit Pauli measurements; `rewind` returns the session to the round
//! boundary. The graph-interface device answers the noisy encoded two-round
//! graph state measurement problem with physical outcomes.

use crate::bits::BitVec;
use crate::diag::{DiagWord, GateStep, NormalForm};
use crate::encoded::{EncodedOp, EncodedRegister, LogicalBasis, NoisyStage};
use crate::graph::{GraphProblemInstance, MeasBasis};
use crate::mbqc::{compile_word_to_mbqc, run_pattern, MbqcPattern};
use crate::noise::NoiseSpec;
use crate::pauli::{PauliString, Sign};
use crate::surface::{CodeParams, Syndrome};
use crate::tableau::{Snapshot, StabilizerTableau};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::sync::Arc;

/// First-round input: a gate word on `m` wires in product order (the last
/// step is applied to `|+^m>` first).
#[derive(Clone, Debug)]
pub struct WordInput {
    pub m: usize,
    pub steps: Vec<GateStep>,
}

/// A line of four commuting 3-qubit Paulis, measured in order on wires 0..3.
pub type LineInput = [PauliString; 4];

/// Interactive device with rewind capability. Sessions run first round,
/// then any number of (second round, rewind) pairs; `reset` erases all
/// session state.
pub trait WordOracle {
    fn first_round(&mut self, input: &WordInput);
    fn second_round(&mut self, line: &LineInput) -> [Sign; 4];
    fn rewind(&mut self);
    fn reset(&mut self);
}

// ---------------------------------------------------------------------------
// honest logical device
// ---------------------------------------------------------------------------

enum LogicalState {
    /// diagonal word confined to wires 0..3: a 3-qubit tableau suffices
    Small(StabilizerTableau),
    /// general case: full tableau on all wires
    Full(StabilizerTableau),
}

struct LogicalSession {
    state: LogicalState,
    snapshot: Snapshot,
    m: usize,
}

/// Applies the word directly to `|+^m>` and measures the requested Pauli
/// lines on the resulting state.
pub struct HonestLogical {
    rng: ChaCha8Rng,
    session: Option<LogicalSession>,
}

impl HonestLogical {
    pub fn new(seed: u64) -> Self {
        HonestLogical {
            rng: ChaCha8Rng::seed_from_u64(seed),
            session: None,
        }
    }
}

/// True when the diagonal word is supported entirely on wires 0..3.
fn diag_confined_to_protocol_wires(d: &DiagWord) -> bool {
    for w in 3..d.wires() {
        if d.s_exp(w) != 0 {
            return false;
        }
        for u in 0..d.wires() {
            if u != w && d.cz_exp(w, u) {
                return false;
            }
        }
    }
    true
}

/// Restrict a diagonal word to its first three wires.
fn diag_first_three(d: &DiagWord) -> DiagWord {
    let mut out = DiagWord::identity(3);
    for w in 0..3.min(d.wires()) {
        out.set_s_exp(w, d.s_exp(w));
    }
    for a in 0..3.min(d.wires()) {
        for b in (a + 1)..3.min(d.wires()) {
            if d.cz_exp(a, b) {
                out.set_cz_exp(a, b, true);
            }
        }
    }
    out
}

/// Build the tableau of `C(M)·δ|+^m>` for a general normal form.
fn tableau_of_normal_form(nf: &NormalForm) -> StabilizerTableau {
    let m = nf.diag_part().wires();
    let map = nf.linear_map();
    let minv_t = map
        .inverse()
        .expect("CNOT words are invertible")
        .transpose();
    // stabilizers: C(M)·(δ X_j δ†)·C(M)†; destabilizers: C(M)·Z_j·C(M)†.
    // CNOT conjugation in the X^xZ^z representation is phase-free:
    // (x|z) -> (Mx | M^{-T}z).
    let stab = (0..m)
        .map(|j| {
            let img = nf.diag_part().x_image(j);
            let x = map.mul_vec(img.x_mask());
            let z = minv_t.mul_vec(img.z_mask());
            PauliString::from_masks(m, x, z, img.phase())
        })
        .collect();
    let destab = (0..m)
        .map(|j| {
            let mut e = BitVec::zeros(m);
            e.set(j, true);
            PauliString::from_masks(m, BitVec::zeros(m), minv_t.mul_vec(&e), 0)
        })
        .collect();
    StabilizerTableau::from_rows(stab, destab)
}

impl WordOracle for HonestLogical {
    fn first_round(&mut self, input: &WordInput) {
        let mut nf = NormalForm::identity(input.m);
        nf.push_word(&input.steps);
        let state = if nf.linear_map_is_identity() && diag_confined_to_protocol_wires(nf.diag_part())
        {
            let d3 = diag_first_three(nf.diag_part());
            let mut t = StabilizerTableau::plus_state(3);
            t.apply_circuit(&d3.to_circuit()).expect("diag circuit");
            LogicalState::Small(t)
        } else {
            LogicalState::Full(tableau_of_normal_form(&nf))
        };
        let snapshot = match &state {
            LogicalState::Small(t) | LogicalState::Full(t) => t.snapshot(),
        };
        self.session = Some(LogicalSession {
            state,
            snapshot,
            m: input.m,
        });
    }

    fn second_round(&mut self, line: &LineInput) -> [Sign; 4] {
        let session = self.session.as_mut().expect("first round not run");
        let mut out = [Sign::Plus; 4];
        for (i, p) in line.iter().enumerate() {
            let sign = match &mut session.state {
                LogicalState::Small(t) => t.measure(p, &mut self.rng),
                LogicalState::Full(t) => t.measure(&p.embed(session.m), &mut self.rng),
            };
            out[i] = sign.expect("line observable").0;
        }
        out
    }

    fn rewind(&mut self) {
        let session = self.session.as_mut().expect("first round not run");
        let restored = StabilizerTableau::restore(&session.snapshot);
        session.state = match session.state {
            LogicalState::Small(_) => LogicalState::Small(restored),
            LogicalState::Full(_) => LogicalState::Full(restored),
        };
    }

    fn reset(&mut self) {
        self.session = None;
    }
}

// ---------------------------------------------------------------------------
// honest MBQC device
// ---------------------------------------------------------------------------

struct MbqcSession {
    pattern: MbqcPattern,
    tableau: StabilizerTableau,
    snapshot: Snapshot,
}

/// Compiles the word onto a grid cluster state, measures the pattern in
/// round one, and answers second-round lines by measuring the residual
/// wires directly. Outcomes are raw (byproduct-uncorrected); the protocol's
/// statistics are byproduct-blind because a Pauli's two contexts acquire
/// the same frame sign.
pub struct HonestMbqc {
    rng: ChaCha8Rng,
    max_cols: usize,
    session: Option<MbqcSession>,
}

impl HonestMbqc {
    pub fn new(seed: u64, max_cols: usize) -> Self {
        HonestMbqc {
            rng: ChaCha8Rng::seed_from_u64(seed),
            max_cols,
            session: None,
        }
    }
}

impl WordOracle for HonestMbqc {
    fn first_round(&mut self, input: &WordInput) {
        let pattern =
            compile_word_to_mbqc(&input.steps, input.m, self.max_cols).expect("word fits grid");
        let run = run_pattern(&pattern, &mut self.rng);
        let snapshot = run.tableau.snapshot();
        self.session = Some(MbqcSession {
            pattern,
            tableau: run.tableau,
            snapshot,
        });
    }

    fn second_round(&mut self, line: &LineInput) -> [Sign; 4] {
        let session = self.session.as_mut().expect("first round not run");
        let n = session.pattern.graph().num_vertices();
        let residual = session.pattern.residual_vertices();
        let mut out = [Sign::Plus; 4];
        for (i, p) in line.iter().enumerate() {
            // embed the 3-qubit Pauli onto the first three residual wires
            let mut obs = PauliString::identity(n);
            for w in 0..3 {
                obs.x_mask_mut().set(residual[w], p.x_mask().get(w));
                obs.z_mask_mut().set(residual[w], p.z_mask().get(w));
            }
            obs.set_phase(p.phase());
            let (sign, _) = session.tableau.measure(&obs, &mut self.rng).expect("line");
            out[i] = sign;
        }
        out
    }

    fn rewind(&mut self) {
        let session = self.session.as_mut().expect("first round not run");
        session.tableau = StabilizerTableau::restore(&session.snapshot);
    }

    fn reset(&mut self) {
        self.session = None;
    }
}

// ---------------------------------------------------------------------------
// faulty wrapper
// ---------------------------------------------------------------------------

/// How a faulty device spends its error budget.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaultyPolicy {
    /// each second-round call fails independently with probability ε
    UniformRandom,
    /// a fixed ε-measure set of (first round, line) inputs always fails
    FixedSet,
    /// a fixed ε-measure set of gate words fails on every blinding of the
    /// word — the concentration the instance randomization must defeat
    ConcentrateOnWord,
}

/// Wraps a device; with ε = 0 it is observationally identical to the inner
/// device. A failing call answers the noncontextual all-+1 assignment.
pub struct Faulty<O: WordOracle> {
    inner: O,
    eps: f64,
    policy: FaultyPolicy,
    rng: ChaCha8Rng,
    input_fp: u64,
    word_fp: u64,
}

impl<O: WordOracle> Faulty<O> {
    pub fn new(inner: O, eps: f64, policy: FaultyPolicy, seed: u64) -> Self {
        Faulty {
            inner,
            eps,
            policy,
            rng: ChaCha8Rng::seed_from_u64(seed),
            input_fp: 0,
            word_fp: 0,
        }
    }

    pub fn inner_mut(&mut self) -> &mut O {
        &mut self.inner
    }

    fn threshold(&self) -> u64 {
        (self.eps * u64::MAX as f64) as u64
    }
}

fn mix(h: u64, v: u64) -> u64 {
    // split-mix style avalanche
    let mut x = h ^ v.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    x ^= x >> 30;
    x = x.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x ^= x >> 27;
    x = x.wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

fn fingerprint_word(input: &WordInput) -> u64 {
    let mut h = 0x57ab_1ab0_u64;
    h = mix(h, input.m as u64);
    for step in &input.steps {
        if let Some(g) = step.cnot {
            h = mix(h, (g.control as u64) << 32 | g.target as u64);
        } else {
            h = mix(h, u64::MAX);
        }
    }
    h
}

fn fingerprint_full(input: &WordInput) -> u64 {
    let mut h = fingerprint_word(input);
    for step in &input.steps {
        let d = &step.diag;
        for w in 0..d.wires() {
            h = mix(h, d.s_exp(w) as u64);
        }
        // couple in the CZ exponents row by row
        for a in 0..d.wires() {
            let mut row = 0u64;
            for b in 0..d.wires() {
                if a != b && d.cz_exp(a, b) {
                    row = row.rotate_left(1) ^ b as u64 ^ 0x9e37;
                }
            }
            h = mix(h, row);
        }
    }
    h
}

fn fingerprint_line(line: &LineInput) -> u64 {
    let mut h = 0x1111_e000_u64;
    for p in line {
        for (x, z) in p.x_mask().words().iter().zip(p.z_mask().words()) {
            h = mix(h, *x);
            h = mix(h, *z);
        }
    }
    h
}

impl<O: WordOracle> WordOracle for Faulty<O> {
    fn first_round(&mut self, input: &WordInput) {
        self.word_fp = fingerprint_word(input);
        self.input_fp = match self.policy {
            FaultyPolicy::FixedSet => fingerprint_full(input),
            _ => 0,
        };
        self.inner.first_round(input);
    }

    fn second_round(&mut self, line: &LineInput) -> [Sign; 4] {
        let fail = match self.policy {
            FaultyPolicy::UniformRandom => self.rng.gen::<f64>() < self.eps,
            FaultyPolicy::FixedSet => mix(self.input_fp, fingerprint_line(line)) < self.threshold(),
            FaultyPolicy::ConcentrateOnWord => self.word_fp < self.threshold(),
        };
        if fail {
            // consume the honest answer to keep the session consistent
            let _ = self.inner.second_round(line);
            [Sign::Plus; 4]
        } else {
            self.inner.second_round(line)
        }
    }

    fn rewind(&mut self) {
        self.inner.rewind();
    }

    fn reset(&mut self) {
        self.inner.reset();
    }
}

// ---------------------------------------------------------------------------
// honest noisy encoded device for the graph problem
// ---------------------------------------------------------------------------

/// Record of one encoded two-round run: the preparation syndromes and the
/// per-stage ops and physical outcomes, ready for the noisy-extended check.
pub struct NoisyGraphRun {
    pub syndromes: Vec<Syndrome>,
    pub stages: Vec<NoisyStage>,
}

/// Group edges into layers of disjoint support, greedily.
fn edge_layers(edges: &[(usize, usize)]) -> Vec<Vec<(usize, usize)>> {
    let mut layers: Vec<Vec<(usize, usize)>> = Vec::new();
    for &(a, b) in edges {
        let slot = layers.iter_mut().find(|layer| {
            layer.iter().all(|&(x, y)| x != a && x != b && y != a && y != b)
        });
        match slot {
            Some(layer) => layer.push((a, b)),
            None => layers.push(vec![(a, b)]),
        }
    }
    layers
}

/// Run the honest encoded device on a two-round instance: prepare encoded
/// |+̄> states, build the graph with CZ̄ layers, then per round rotate the
/// round's blocks into the requested bases and read them out transversally.
/// One noise layer follows preparation, each logical gate layer, and
/// precedes each measurement round.
pub fn run_noisy_graph_device(
    params: Arc<CodeParams>,
    inst: &GraphProblemInstance,
    bases: &[BTreeMap<usize, MeasBasis>],
    noise: &NoiseSpec,
    rng: &mut impl Rng,
) -> NoisyGraphRun {
    let blocks = inst.graph.num_vertices();
    let mut reg =
        EncodedRegister::prepare_logical_basis(params.clone(), blocks, LogicalBasis::Plus, noise, rng);
    let syndromes = reg.prep_syndromes().to_vec();

    let mut stages = Vec::with_capacity(1 + inst.rounds);
    // graph construction: CZ̄ per edge, one noise layer per disjoint layer
    let mut build_ops = Vec::new();
    for layer in edge_layers(inst.graph.edges()) {
        for (a, b) in layer {
            reg.apply_op(EncodedOp::Cz(a, b));
            build_ops.push(EncodedOp::Cz(a, b));
        }
        reg.inject_noise(noise, rng);
    }

    let mut pending_ops = build_ops;
    for round_bases in bases {
        // basis-change layer for this round's blocks
        for (&v, &basis) in round_bases {
            for op in EncodedRegister::basis_change_ops(v, basis) {
                reg.apply_op(op);
                pending_ops.push(op);
            }
        }
        reg.inject_noise(noise, rng);
        // one more layer right before measurement
        reg.inject_noise(noise, rng);
        let measured = round_bases
            .keys()
            .map(|&v| (v, reg.measure_block_z(v, rng)))
            .collect();
        stages.push(NoisyStage {
            ops: std::mem::take(&mut pending_ops),
            measured,
        });
    }
    NoisyGraphRun { syndromes, stages }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diag::{sample_uniform_h, CnotGate};
    use crate::encoded::check_noisy_extended;
    use crate::graph::{random_bases, verify_transcript, ColoredGraph, Transcript};

    fn tiny_word(m: usize, rng: &mut ChaCha8Rng) -> WordInput {
        let steps = (0..3)
            .map(|_| {
                let c = rng.gen_range(0..m);
                let t = (c + rng.gen_range(1..m)) % m;
                GateStep {
                    cnot: Some(CnotGate::new(c, t)),
                    diag: sample_uniform_h(m, rng),
                }
            })
            .collect();
        WordInput { m, steps }
    }

    #[test]
    fn honest_logical_full_path_matches_small_path() {
        // a word that telescopes to a 3-wire diagonal takes the small path;
        // appending and prepending cancelling junk forces the full path.
        // Deterministic observables must agree.
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let m = 4;
            let input = tiny_word(m, &mut rng);
            let mut nf = NormalForm::identity(m);
            nf.push_word(&input.steps);
            let full = tableau_of_normal_form(&nf);
            // reference by direct circuit application
            let mut reference = StabilizerTableau::plus_state(m);
            reference
                .apply_circuit(&crate::diag::word_circuit(&input.steps))
                .unwrap();
            assert!(reference.same_state(&full));
        }
    }

    #[test]
    fn rewind_gives_identical_deterministic_answers() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut dev = HonestLogical::new(7);
        let input = tiny_word(4, &mut rng);
        dev.first_round(&input);
        let line: LineInput = [
            PauliString::parse("XXX").unwrap(),
            PauliString::parse("XYY").unwrap(),
            PauliString::parse("YXY").unwrap(),
            PauliString::parse("YYX").unwrap(),
        ];
        let first = dev.second_round(&line);
        // within a session, the line product is fixed by the state
        let prod: i8 = first.iter().map(|s| s.value()).product();
        dev.rewind();
        let second = dev.second_round(&line);
        let prod2: i8 = second.iter().map(|s| s.value()).product();
        assert_eq!(prod, prod2, "line products are deterministic");
    }

    #[test]
    fn faulty_eps_zero_is_transparent() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let input = tiny_word(4, &mut rng);
        let line: LineInput = [
            PauliString::parse("XII").unwrap(),
            PauliString::parse("IXI").unwrap(),
            PauliString::parse("IIX").unwrap(),
            PauliString::parse("XXX").unwrap(),
        ];
        let mut honest = HonestLogical::new(42);
        let mut wrapped = Faulty::new(HonestLogical::new(42), 0.0, FaultyPolicy::UniformRandom, 9);
        honest.first_round(&input);
        wrapped.first_round(&input);
        for _ in 0..5 {
            assert_eq!(honest.second_round(&line), wrapped.second_round(&line));
            honest.rewind();
            wrapped.rewind();
        }
    }

    #[test]
    fn noisy_graph_device_noiseless_passes_check() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let params = Arc::new(CodeParams::new(3));
        let g = ColoredGraph::grid(2, 2);
        let inst = GraphProblemInstance::new(g, 2).unwrap();
        for _ in 0..10 {
            let bases = random_bases(&inst, &mut rng);
            let run = run_noisy_graph_device(
                params.clone(),
                &inst,
                &bases,
                &NoiseSpec::depolarizing(0.0),
                &mut rng,
            );
            let accepted = check_noisy_extended(
                &params,
                inst.graph.num_vertices(),
                &run.syndromes,
                &run.stages,
                |decoded| {
                    let rounds = bases
                        .iter()
                        .map(|rb| {
                            rb.iter()
                                .map(|(&v, &b)| (v, (b, Sign::from_bit(decoded[&v]))))
                                .collect()
                        })
                        .collect();
                    verify_transcript(&inst, &Transcript { rounds }) == Ok(true)
                },
            )
            .unwrap();
            assert!(accepted);
        }
    }
}
