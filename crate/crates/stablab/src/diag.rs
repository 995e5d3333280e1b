//! The abelian diagonal Clifford group `H_m = <CZ, S>_m` in exponent form,
//! CNOT gates as GF(2) transvections, and the normal form pushing diagonal
//! words through CNOT words.
//!
//! An element of `H_m` is the diagonal unitary `|x> -> i^q(x) |x>` with
//! `q(x) = Σ_j s_j x_j + 2 Σ_{j<k} c_jk x_j x_k (mod 4)`. The exponent
//! vector `(s, c)` is a canonical form: words are quotiented to unitaries
//! modulo global phase. Composition adds exponents, so the group is abelian
//! by construction.

use crate::bits::{BitMatrix, BitVec};
use crate::gate::CliffordGate;
use crate::pauli::PauliString;
use rand::Rng;

/// A CNOT gate, i.e. the transvection `I + E_{target,control}` over GF(2).
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub struct CnotGate {
    pub control: usize,
    pub target: usize,
}

impl CnotGate {
    pub fn new(control: usize, target: usize) -> Self {
        assert_ne!(control, target, "CNOT requires distinct wires");
        CnotGate { control, target }
    }

    pub fn as_clifford(&self) -> CliffordGate {
        CliffordGate::CNOT(self.control, self.target)
    }
}

/// An element of `H_m` as an exponent vector.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DiagWord {
    m: usize,
    /// S-gate exponent per wire, mod 4.
    s_exp: Vec<u8>,
    /// CZ exponents, stored as a symmetric bit matrix with zero diagonal.
    cz: BitMatrix,
}

impl DiagWord {
    pub fn identity(m: usize) -> Self {
        DiagWord {
            m,
            s_exp: vec![0; m],
            cz: BitMatrix::zeros(m, m),
        }
    }

    pub fn wires(&self) -> usize {
        self.m
    }

    pub fn s_exp(&self, wire: usize) -> u8 {
        self.s_exp[wire]
    }

    pub fn set_s_exp(&mut self, wire: usize, e: u8) {
        self.s_exp[wire] = e & 3;
    }

    pub fn add_s_exp(&mut self, wire: usize, e: u8) {
        self.s_exp[wire] = (self.s_exp[wire] + e) & 3;
    }

    pub fn cz_exp(&self, a: usize, b: usize) -> bool {
        self.cz.get(a, b)
    }

    pub fn set_cz_exp(&mut self, a: usize, b: usize, v: bool) {
        assert_ne!(a, b);
        self.cz.set(a, b, v);
        self.cz.set(b, a, v);
    }

    pub fn is_identity(&self) -> bool {
        self.s_exp.iter().all(|&s| s == 0) && (0..self.m).all(|r| self.cz.row(r).is_zero())
    }

    /// The homomorphism to Z2: total number of S and CZ gates mod 2.
    pub fn gate_parity(&self) -> bool {
        let s_par = self.s_exp.iter().fold(0u8, |a, &s| a ^ s) & 1;
        let mut cz_set = 0usize;
        for r in 0..self.m {
            cz_set += self.cz.row(r).count_ones();
        }
        // every CZ exponent appears twice in the symmetric matrix
        (s_par == 1) ^ ((cz_set / 2) % 2 == 1)
    }

    /// Membership in `H_3^⊕` embedded on the first three wires: supported on
    /// wires 0..3 with even gate count.
    pub fn is_h3_even(&self) -> bool {
        if self.s_exp.iter().skip(3).any(|&s| s != 0) {
            return false;
        }
        for r in 0..self.m {
            for c in self.cz.row(r).iter_ones() {
                if r >= 3 || c >= 3 {
                    return false;
                }
            }
        }
        !self.gate_parity()
    }

    /// Abelian composition: exponents add.
    pub fn compose_assign(&mut self, other: &DiagWord) {
        debug_assert_eq!(self.m, other.m);
        for (a, b) in self.s_exp.iter_mut().zip(&other.s_exp) {
            *a = (*a + b) & 3;
        }
        for r in 0..self.m {
            self.cz.row_mut(r).xor_assign(other.cz.row(r));
        }
    }

    pub fn compose(&self, other: &DiagWord) -> DiagWord {
        let mut out = self.clone();
        out.compose_assign(other);
        out
    }

    pub fn inverse(&self) -> DiagWord {
        let mut out = self.clone();
        for s in out.s_exp.iter_mut() {
            *s = (4 - *s) & 3;
        }
        out
    }

    /// In-place conjugation `h <- g h g` by the CNOT `g` (an involution), so
    /// that `h·g = g·h'` as unitaries. Derived from the substitution
    /// `x_t <- x_t ⊕ x_c` in the phase polynomial.
    pub fn conjugate_by_cnot(&mut self, g: CnotGate) {
        let (c, t) = (g.control, g.target);
        let old_ct = self.cz.get(c, t);
        let st = self.s_exp[t];
        // couplings of the target spread to the control
        let row_t = self.cz.row(t).clone();
        self.cz.row_mut(c).xor_assign(&row_t);
        self.cz.set(c, c, false);
        self.cz.set(c, t, old_ct ^ (st & 1 == 1));
        for u in 0..self.m {
            if u != c {
                let v = self.cz.get(c, u);
                self.cz.set(u, c, v);
            }
        }
        self.s_exp[c] = (self.s_exp[c] + st + if old_ct { 2 } else { 0 }) & 3;
    }

    /// Embed a word on fewer wires into a register of `m` wires.
    pub fn embed(&self, m: usize) -> DiagWord {
        assert!(m >= self.m);
        let mut out = DiagWord::identity(m);
        for j in 0..self.m {
            out.s_exp[j] = self.s_exp[j];
            for k in self.cz.row(j).iter_ones() {
                out.cz.set(j, k, true);
            }
        }
        out
    }

    /// Relabel wires: wire `j` of the result is wire `perm[j]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> DiagWord {
        assert_eq!(perm.len(), self.m);
        let mut out = DiagWord::identity(self.m);
        for j in 0..self.m {
            out.s_exp[j] = self.s_exp[perm[j]];
            for k in 0..self.m {
                if j != k {
                    out.cz.set(j, k, self.cz.get(perm[j], perm[k]));
                }
            }
        }
        out
    }

    /// A gate realization (order irrelevant, the group is abelian).
    pub fn to_circuit(&self) -> Vec<CliffordGate> {
        let mut out = Vec::new();
        for j in 0..self.m {
            for _ in 0..self.s_exp[j] {
                out.push(CliffordGate::S(j));
            }
        }
        for j in 0..self.m {
            for k in self.cz.row(j).iter_ones() {
                if k > j {
                    out.push(CliffordGate::CZ(j, k));
                }
            }
        }
        out
    }

    /// `δ X_j δ†` with exact phase: `i^{s_j} · X_j · Z_j^{s_j} · Z(cz_j)`.
    pub fn x_image(&self, j: usize) -> PauliString {
        let mut x = BitVec::zeros(self.m);
        x.set(j, true);
        let mut z = self.cz.row(j).clone();
        if self.s_exp[j] & 1 == 1 {
            z.flip(j);
        }
        PauliString::from_masks(self.m, x, z, self.s_exp[j])
    }

    /// Conjugate a Pauli: `δ P δ†`.
    pub fn conjugate_pauli(&self, p: &PauliString) -> PauliString {
        crate::gate::conjugate_pauli_through(&self.to_circuit(), p)
    }
}

/// Uniform sample from `H_m`: every S exponent uniform on Z4, every CZ
/// exponent uniform on Z2, independently.
pub fn sample_uniform_h(m: usize, rng: &mut impl Rng) -> DiagWord {
    let mut w = DiagWord::identity(m);
    for j in 0..m {
        w.s_exp[j] = rng.gen_range(0..4);
    }
    for j in 0..m {
        for k in (j + 1)..m {
            if rng.gen::<bool>() {
                w.set_cz_exp(j, k, true);
            }
        }
    }
    w
}

/// Uniform sample from the 256-element `H_3^⊕`: sample `H_3` uniformly and
/// repair odd parity by composing with a fixed parity-1 element (a single S
/// on wire 0). The coset bijection keeps the result exactly uniform.
pub fn sample_uniform_h3_even(rng: &mut impl Rng) -> DiagWord {
    let mut w = sample_uniform_h(3, rng);
    if w.gate_parity() {
        w.add_s_exp(0, 1);
    }
    w
}

/// All 512 elements of `H_3` in a fixed enumeration order.
pub fn enumerate_h3() -> Vec<DiagWord> {
    let mut out = Vec::with_capacity(512);
    for s0 in 0..4u8 {
        for s1 in 0..4u8 {
            for s2 in 0..4u8 {
                for cz in 0..8u8 {
                    let mut w = DiagWord::identity(3);
                    w.s_exp = vec![s0, s1, s2];
                    if cz & 1 != 0 {
                        w.set_cz_exp(0, 1, true);
                    }
                    if cz & 2 != 0 {
                        w.set_cz_exp(0, 2, true);
                    }
                    if cz & 4 != 0 {
                        w.set_cz_exp(1, 2, true);
                    }
                    out.push(w);
                }
            }
        }
    }
    out
}

/// The 256 elements of `H_3^⊕` in a fixed enumeration order.
pub fn enumerate_h3_even() -> Vec<DiagWord> {
    enumerate_h3().into_iter().filter(|w| !w.gate_parity()).collect()
}

/// `A • B = A B A^{-1}` for a diagonal word acting on a Pauli.
pub fn bullet(a: &DiagWord, b: &PauliString) -> PauliString {
    a.conjugate_pauli(b)
}

/// Returns `h'` with `h·g = g·h'` as unitaries; the exported normal form of
/// pushing a diagonal word right through a CNOT.
pub fn push_diag_through_cnot(g: CnotGate, h: &DiagWord) -> DiagWord {
    let mut out = h.clone();
    out.conjugate_by_cnot(g);
    out
}

/// One element of a gate word: a CNOT times a diagonal word, read as the
/// matrix product `C(cnot)·δ(diag)` (the diagonal hits the ket first).
///
/// A word `(w_1, ..., w_k)` denotes the operator product `w_1·w_2···w_k` in
/// list order, so the *last* element is applied to the state first. This
/// matches the telescoping products the blinding scheme is written in.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GateStep {
    pub cnot: Option<CnotGate>,
    pub diag: DiagWord,
}

impl GateStep {
    pub fn cnot(g: CnotGate, m: usize) -> Self {
        GateStep {
            cnot: Some(g),
            diag: DiagWord::identity(m),
        }
    }

    pub fn diag(d: DiagWord) -> Self {
        GateStep { cnot: None, diag: d }
    }

    /// Gate list in application order: diagonal gates, then the CNOT.
    pub fn to_circuit(&self) -> Vec<CliffordGate> {
        let mut out = self.diag.to_circuit();
        if let Some(g) = self.cnot {
            out.push(g.as_clifford());
        }
        out
    }
}

/// Application-order gate list of a whole word (last step first).
pub fn word_circuit(steps: &[GateStep]) -> Vec<CliffordGate> {
    steps.iter().rev().flat_map(|s| s.to_circuit()).collect()
}

/// Normal-form accumulator for the product `w_1·w_2···w_k` of a word of
/// [`GateStep`]s: maintains `U = C(M)·δ` where `C(M)` is the CNOT part as a
/// GF(2) linear map and `δ ∈ H_m`. Appending a step costs one sparse
/// conjugation.
#[derive(Clone, Debug)]
pub struct NormalForm {
    m: usize,
    /// Transpose of the linear map (rows here are columns of `M`), so a
    /// right-multiplied transvection is a row XOR.
    mt: BitMatrix,
    diag: DiagWord,
}

impl NormalForm {
    pub fn identity(m: usize) -> Self {
        NormalForm {
            m,
            mt: BitMatrix::identity(m),
            diag: DiagWord::identity(m),
        }
    }

    /// Append a step on the right: `U <- U · (cnot · diag)`.
    pub fn push_step(&mut self, step: &GateStep) {
        if let Some(g) = step.cnot {
            // U·C_g = C(M·A_g)·(g δ g); the column update on M is a row XOR
            // on the stored transpose
            self.diag.conjugate_by_cnot(g);
            let (c, t) = (g.control, g.target);
            let row_t = self.mt.row(t).clone();
            self.mt.row_mut(c).xor_assign(&row_t);
        }
        self.diag.compose_assign(&step.diag);
    }

    pub fn push_word(&mut self, steps: &[GateStep]) {
        steps.iter().for_each(|s| self.push_step(s));
    }

    /// The GF(2) linear map of the CNOT part.
    pub fn linear_map(&self) -> BitMatrix {
        self.mt.transpose()
    }

    pub fn linear_map_is_identity(&self) -> bool {
        self.mt == BitMatrix::identity(self.m)
    }

    pub fn diag_part(&self) -> &DiagWord {
        &self.diag
    }

    pub fn into_parts(self) -> (BitMatrix, DiagWord) {
        (self.mt.transpose(), self.diag)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{circuit_matrix, mat_approx_eq, mat_mul};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn group_sizes() {
        assert_eq!(enumerate_h3().len(), 512);
        assert_eq!(enumerate_h3_even().len(), 256);
    }

    #[test]
    fn compose_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let a = sample_uniform_h(3, &mut rng);
            let b = sample_uniform_h(3, &mut rng);
            let ab = a.compose(&b);
            let dense_a = circuit_matrix(3, &a.to_circuit());
            let dense_b = circuit_matrix(3, &b.to_circuit());
            let dense_ab = circuit_matrix(3, &ab.to_circuit());
            assert!(mat_approx_eq(&mat_mul(&dense_a, &dense_b), &dense_ab));
            assert!(a.compose(&a.inverse()).is_identity());
        }
    }

    #[test]
    fn parity_is_homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let a = sample_uniform_h(4, &mut rng);
            let b = sample_uniform_h(4, &mut rng);
            assert_eq!(a.compose(&b).gate_parity(), a.gate_parity() ^ b.gate_parity());
        }
    }

    #[test]
    fn push_s_target_through_cnot() {
        // h = S_t, g = CNOT(c->t): h' = S_c S_t CZ_ct
        let g = CnotGate::new(0, 1);
        let mut h = DiagWord::identity(2);
        h.set_s_exp(1, 1);
        let pushed = push_diag_through_cnot(g, &h);
        let mut expect = DiagWord::identity(2);
        expect.set_s_exp(0, 1);
        expect.set_s_exp(1, 1);
        expect.set_cz_exp(0, 1, true);
        assert_eq!(pushed, expect);
    }

    #[test]
    fn push_disjoint_wires_is_noop() {
        let g = CnotGate::new(0, 1);
        let mut h = DiagWord::identity(4);
        h.set_s_exp(2, 3);
        h.set_cz_exp(2, 3, true);
        assert_eq!(push_diag_through_cnot(g, &h), h);
    }

    #[test]
    fn push_matches_dense_unitaries() {
        // h·g = g·h' checked as exact 8x8 matrices for random h, g on 3 wires
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let h = sample_uniform_h(3, &mut rng);
            let c = rng.gen_range(0..3);
            let t = (c + rng.gen_range(1..3)) % 3;
            let g = CnotGate::new(c, t);
            let hp = push_diag_through_cnot(g, &h);
            let mh = circuit_matrix(3, &h.to_circuit());
            let mg = circuit_matrix(3, &[g.as_clifford()]);
            let mhp = circuit_matrix(3, &hp.to_circuit());
            assert!(mat_approx_eq(&mat_mul(&mh, &mg), &mat_mul(&mg, &mhp)));
        }
    }

    #[test]
    fn h3_even_sampler_lands_in_kernel() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut seen_identity = false;
        for _ in 0..2000 {
            let w = sample_uniform_h3_even(&mut rng);
            assert!(!w.gate_parity());
            seen_identity |= w.is_identity();
        }
        assert!(seen_identity, "identity must be in the support");
    }

    #[test]
    fn m1_sampler_uniform_over_four_elements() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut counts = [0usize; 4];
        let trials = 10_000;
        for _ in 0..trials {
            let w = sample_uniform_h(1, &mut rng);
            counts[w.s_exp(0) as usize] += 1;
        }
        let expect = trials as f64 / 4.0;
        let sigma = (trials as f64 * 0.25 * 0.75).sqrt();
        for c in counts {
            assert!((c as f64 - expect).abs() < 3.0 * sigma, "{counts:?}");
        }
    }

    #[test]
    fn m0_word_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        assert!(sample_uniform_h(0, &mut rng).is_identity());
    }

    #[test]
    fn bullet_basics() {
        let i = DiagWord::identity(3);
        let p = PauliString::parse("XYZ").unwrap();
        assert_eq!(bullet(&i, &p), p);
        // S_0 • XII = YII
        let mut s0 = DiagWord::identity(3);
        s0.set_s_exp(0, 1);
        let out = bullet(&s0, &PauliString::parse("XII").unwrap());
        assert_eq!(out, PauliString::parse("YII").unwrap());
    }

    #[test]
    fn x_image_matches_circuit_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..30 {
            let w = sample_uniform_h(4, &mut rng);
            for j in 0..4 {
                let via_circuit = w.conjugate_pauli(&PauliString::x(4, j));
                assert_eq!(w.x_image(j), via_circuit);
            }
        }
    }

    #[test]
    fn normal_form_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..20 {
            let mut nf = NormalForm::identity(3);
            let mut steps = Vec::new();
            for _ in 0..6 {
                let c = rng.gen_range(0..3);
                let t = (c + rng.gen_range(1..3)) % 3;
                let step = GateStep {
                    cnot: Some(CnotGate::new(c, t)),
                    diag: sample_uniform_h(3, &mut rng),
                };
                nf.push_step(&step);
                steps.push(step);
            }
            let (m, diag) = nf.into_parts();
            // U = C(M)·δ, so in application order: δ gates, then C(M)
            let mut rebuilt = diag.to_circuit();
            rebuilt.extend(linear_map_circuit(&m));
            let lhs = circuit_matrix(3, &word_circuit(&steps));
            let rhs = circuit_matrix(3, &rebuilt);
            assert!(mat_approx_eq(&lhs, &rhs));
        }
    }

    /// Decompose an invertible GF(2) matrix into CNOTs (test helper).
    fn linear_map_circuit(m: &BitMatrix) -> Vec<CliffordGate> {
        let n = m.rows();
        let mut work = m.clone();
        let mut gates = Vec::new();
        for col in 0..n {
            if !work.get(col, col) {
                let r = ((col + 1)..n).find(|&r| work.get(r, col)).unwrap();
                let row = work.row(r).clone();
                work.row_mut(col).xor_assign(&row);
                gates.push(CliffordGate::CNOT(r, col));
            }
            for r in 0..n {
                if r != col && work.get(r, col) {
                    let row = work.row(col).clone();
                    work.row_mut(r).xor_assign(&row);
                    gates.push(CliffordGate::CNOT(col, r));
                }
            }
        }
        assert_eq!(work, BitMatrix::identity(n));
        // each recorded op is an involution; M is their product in reverse
        gates.reverse();
        gates
    }
}
