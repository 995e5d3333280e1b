//! Clifford gates and Pauli conjugation through circuits.

use crate::pauli::PauliString;
use thiserror::Error;

/// The gate set generating every circuit in this crate.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum CliffordGate {
    H(usize),
    S(usize),
    CZ(usize, usize),
    CNOT(usize, usize),
    X(usize),
    Z(usize),
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum GateError {
    #[error("qubit index {index} out of range for register of {n} qubits")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("two-qubit gate requires distinct qubits, got {0}")]
    DuplicateIndex(usize),
}

impl CliffordGate {
    pub fn qubits(&self) -> (usize, Option<usize>) {
        match *self {
            CliffordGate::H(q) | CliffordGate::S(q) | CliffordGate::X(q) | CliffordGate::Z(q) => {
                (q, None)
            }
            CliffordGate::CZ(a, b) | CliffordGate::CNOT(a, b) => (a, Some(b)),
        }
    }

    pub fn validate(&self, n: usize) -> Result<(), GateError> {
        let (a, b) = self.qubits();
        if a >= n {
            return Err(GateError::IndexOutOfRange { index: a, n });
        }
        if let Some(b) = b {
            if b >= n {
                return Err(GateError::IndexOutOfRange { index: b, n });
            }
            if a == b {
                return Err(GateError::DuplicateIndex(a));
            }
        }
        Ok(())
    }
}

/// `S†` as a gate word (the enum keeps only the generators).
pub fn s_dagger(q: usize) -> [CliffordGate; 3] {
    [CliffordGate::S(q), CliffordGate::S(q), CliffordGate::S(q)]
}

/// Conjugate `p <- g p g†` in place. Phase is exact.
///
/// In the `i^phase·X^x Z^z` representation CNOT conjugation is phase-free;
/// the single-qubit rules carry the whole phase bookkeeping.
pub fn conjugate_by_gate(p: &mut PauliString, g: CliffordGate) {
    match g {
        CliffordGate::H(q) => {
            let (x, z) = (p.x_mask().get(q), p.z_mask().get(q));
            p.x_mask_mut().set(q, z);
            p.z_mask_mut().set(q, x);
            if x && z {
                p.add_phase(2);
            }
        }
        CliffordGate::S(q) => {
            let x = p.x_mask().get(q);
            if x {
                p.z_mask_mut().flip(q);
                p.add_phase(1);
            }
        }
        CliffordGate::CZ(a, b) => {
            let (xa, xb) = (p.x_mask().get(a), p.x_mask().get(b));
            if xa {
                p.z_mask_mut().flip(b);
            }
            if xb {
                p.z_mask_mut().flip(a);
            }
            if xa && xb {
                p.add_phase(2);
            }
        }
        CliffordGate::CNOT(c, t) => {
            if p.x_mask().get(c) {
                p.x_mask_mut().flip(t);
            }
            if p.z_mask().get(t) {
                p.z_mask_mut().flip(c);
            }
        }
        CliffordGate::X(q) => {
            if p.z_mask().get(q) {
                p.add_phase(2);
            }
        }
        CliffordGate::Z(q) => {
            if p.x_mask().get(q) {
                p.add_phase(2);
            }
        }
    }
}

/// Returns `C P C†` for the circuit `C` given as a gate sequence in
/// application order, evaluated gate by gate.
pub fn conjugate_pauli_through(circuit: &[CliffordGate], p: &PauliString) -> PauliString {
    let mut out = p.clone();
    for &g in circuit {
        debug_assert!(g.validate(p.num_qubits()).is_ok());
        conjugate_by_gate(&mut out, g);
    }
    out
}

/// Conjugate by the inverse circuit: `C† P C`.
pub fn conjugate_pauli_through_inverse(circuit: &[CliffordGate], p: &PauliString) -> PauliString {
    let mut out = p.clone();
    for &g in circuit.iter().rev() {
        match g {
            CliffordGate::S(q) => {
                // S† = S^3
                for _ in 0..3 {
                    conjugate_by_gate(&mut out, CliffordGate::S(q));
                }
            }
            _ => conjugate_by_gate(&mut out, g),
        }
    }
    out
}
