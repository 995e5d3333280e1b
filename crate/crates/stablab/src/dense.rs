//! Brute-force state-vector reference simulator.
//!
//! This is the independent oracle the stabilizer machinery is tested
//! against. It never shares code with the tableau path: gates act on raw
//! amplitudes, measurements go through projectors.

use crate::gate::CliffordGate;
use crate::pauli::{PauliString, Sign};
use num_complex::Complex64;
use rand::Rng;

const EPS: f64 = 1e-9;

/// Dense complex state on up to ~14 qubits. Qubit 0 is the least
/// significant bit of the amplitude index.
#[derive(Clone, Debug)]
pub struct DenseState {
    n: usize,
    amps: Vec<Complex64>,
}

impl DenseState {
    pub fn zero_state(n: usize) -> Self {
        assert!(n <= 14, "dense oracle capped at 14 qubits");
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        DenseState { n, amps }
    }

    pub fn plus_state(n: usize) -> Self {
        let mut s = Self::zero_state(n);
        let a = Complex64::new(1.0 / ((1usize << n) as f64).sqrt(), 0.0);
        s.amps.iter_mut().for_each(|x| *x = a);
        s
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn apply_gate(&mut self, g: CliffordGate) {
        let dim = self.amps.len();
        match g {
            CliffordGate::H(q) => {
                let bit = 1usize << q;
                let inv_sqrt2 = 1.0 / 2f64.sqrt();
                for i in 0..dim {
                    if i & bit == 0 {
                        let a = self.amps[i];
                        let b = self.amps[i | bit];
                        self.amps[i] = (a + b) * inv_sqrt2;
                        self.amps[i | bit] = (a - b) * inv_sqrt2;
                    }
                }
            }
            CliffordGate::S(q) => {
                let bit = 1usize << q;
                for i in 0..dim {
                    if i & bit != 0 {
                        self.amps[i] *= Complex64::new(0.0, 1.0);
                    }
                }
            }
            CliffordGate::CZ(a, b) => {
                let (ba, bb) = (1usize << a, 1usize << b);
                for i in 0..dim {
                    if i & ba != 0 && i & bb != 0 {
                        self.amps[i] = -self.amps[i];
                    }
                }
            }
            CliffordGate::CNOT(c, t) => {
                let (bc, bt) = (1usize << c, 1usize << t);
                for i in 0..dim {
                    if i & bc != 0 && i & bt == 0 {
                        self.amps.swap(i, i | bt);
                    }
                }
            }
            CliffordGate::X(q) => {
                let bit = 1usize << q;
                for i in 0..dim {
                    if i & bit == 0 {
                        self.amps.swap(i, i | bit);
                    }
                }
            }
            CliffordGate::Z(q) => {
                let bit = 1usize << q;
                for i in 0..dim {
                    if i & bit != 0 {
                        self.amps[i] = -self.amps[i];
                    }
                }
            }
        }
    }

    pub fn apply_circuit(&mut self, circuit: &[CliffordGate]) {
        circuit.iter().for_each(|&g| self.apply_gate(g));
    }

    /// Apply a Pauli string as a unitary.
    pub fn apply_pauli(&mut self, p: &PauliString) {
        assert_eq!(p.num_qubits(), self.n);
        let phase = Complex64::new(0.0, 1.0).powu(p.phase() as u32);
        let x_bits: usize = p.x_mask().iter_ones().map(|q| 1usize << q).sum();
        let old = self.amps.clone();
        for (i, amp) in old.iter().enumerate() {
            // i^p · X(x)Z(z)|i> = i^p · (-1)^(z·i) |i ^ x>
            let z_par = p.z_mask().iter_ones().filter(|&q| i & (1 << q) != 0).count() & 1;
            let sgn = if z_par == 1 { -1.0 } else { 1.0 };
            self.amps[i ^ x_bits] = phase * sgn * amp;
        }
    }

    /// Probability that measuring `p` yields +1.
    pub fn prob_plus(&self, p: &PauliString) -> f64 {
        let mut applied = self.clone();
        applied.apply_pauli(p);
        // ||(I+P)/2 ψ||^2 = (1 + Re<ψ|P|ψ>)/2
        let inner: Complex64 = self
            .amps
            .iter()
            .zip(&applied.amps)
            .map(|(a, b)| a.conj() * b)
            .sum();
        ((1.0 + inner.re) / 2.0).clamp(0.0, 1.0)
    }

    /// Measure the Pauli observable, projecting and renormalizing. With a
    /// forced sign, returns `None` when that outcome has probability zero.
    pub fn measure_pauli(
        &mut self,
        p: &PauliString,
        forced: Option<Sign>,
        rng: &mut impl Rng,
    ) -> Option<Sign> {
        let prob_plus = self.prob_plus(p);
        let outcome = match forced {
            Some(Sign::Plus) if prob_plus < EPS => return None,
            Some(Sign::Minus) if prob_plus > 1.0 - EPS => return None,
            Some(s) => s,
            None => {
                if prob_plus > 1.0 - EPS {
                    Sign::Plus
                } else if prob_plus < EPS {
                    Sign::Minus
                } else if rng.gen::<f64>() < prob_plus {
                    Sign::Plus
                } else {
                    Sign::Minus
                }
            }
        };
        let mut applied = self.clone();
        applied.apply_pauli(p);
        let s = outcome.value() as f64;
        for (a, b) in self.amps.iter_mut().zip(&applied.amps) {
            *a = (*a + s * b) / 2.0;
        }
        let norm: f64 = self.amps.iter().map(|a| a.norm_sqr()).sum();
        debug_assert!(norm > EPS);
        let inv = 1.0 / norm.sqrt();
        self.amps.iter_mut().for_each(|a| *a *= inv);
        Some(outcome)
    }

    /// `<ψ|φ>` squared magnitude; 1 when the states match up to phase.
    pub fn overlap(&self, other: &DenseState) -> f64 {
        let inner: Complex64 = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum();
        inner.norm_sqr()
    }
}

/// Dense matrix of a Pauli string (column-major application to basis kets).
pub fn pauli_matrix(p: &PauliString) -> Vec<Vec<Complex64>> {
    let dim = 1usize << p.num_qubits();
    let mut m = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
    for col in 0..dim {
        let mut e = DenseState {
            n: p.num_qubits(),
            amps: vec![Complex64::new(0.0, 0.0); dim],
        };
        e.amps[col] = Complex64::new(1.0, 0.0);
        e.apply_pauli(p);
        for (row, v) in e.amps.iter().enumerate() {
            m[row][col] = *v;
        }
    }
    m
}

/// Dense unitary of a circuit.
pub fn circuit_matrix(n: usize, circuit: &[CliffordGate]) -> Vec<Vec<Complex64>> {
    let dim = 1usize << n;
    let mut m = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
    for col in 0..dim {
        let mut e = DenseState {
            n,
            amps: vec![Complex64::new(0.0, 0.0); dim],
        };
        e.amps[col] = Complex64::new(1.0, 0.0);
        e.apply_circuit(circuit);
        for (row, v) in e.amps.iter().enumerate() {
            m[row][col] = *v;
        }
    }
    m
}

pub fn mat_mul(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let dim = a.len();
    let mut out = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
    for i in 0..dim {
        for k in 0..dim {
            let aik = a[i][k];
            if aik.norm_sqr() < EPS * EPS {
                continue;
            }
            for j in 0..dim {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

pub fn mat_adjoint(a: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let dim = a.len();
    let mut out = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
    for i in 0..dim {
        for j in 0..dim {
            out[j][i] = a[i][j].conj();
        }
    }
    out
}

pub fn mat_approx_eq(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> bool {
    a.iter()
        .zip(b)
        .all(|(ra, rb)| ra.iter().zip(rb).all(|(x, y)| (x - y).norm() < 1e-7))
}

/// Equal up to a global phase.
pub fn mat_eq_up_to_phase(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> bool {
    let dim = a.len();
    let mut phase = None;
    for i in 0..dim {
        for j in 0..dim {
            let (x, y) = (a[i][j], b[i][j]);
            if x.norm() < 1e-9 && y.norm() < 1e-9 {
                continue;
            }
            if x.norm() < 1e-9 || y.norm() < 1e-9 {
                return false;
            }
            let r = x / y;
            match phase {
                None => phase = Some(r),
                Some(p) => {
                    if (r - p).norm() > 1e-7 {
                        return false;
                    }
                }
            }
        }
    }
    true
}
