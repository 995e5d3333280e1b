//! Pauli strings in the symplectic bit-mask representation.
//!
//! A Pauli operator on `n` qubits is stored as `i^phase · X(x_mask) · Z(z_mask)`
//! where the masks are packed bit vectors and `phase` is the exponent of `i`
//! modulo 4. The `X^x Z^z` ordering is fixed: a qubit with both bits set is
//! `XZ = -iY`, so the canonical positive `Y` carries one unit of phase per `Y`.

use crate::bits::BitVec;

/// Exponent of `i` modulo 4.
pub type Phase = u8;

/// Measurement sign, `+1` or `-1`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn from_bit(bit: bool) -> Sign {
        if bit {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn bit(self) -> bool {
        self == Sign::Minus
    }

    pub fn value(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Sign::Plus => write!(f, "+1"),
            Sign::Minus => write!(f, "-1"),
        }
    }
}

/// An `n`-qubit Pauli operator with exact phase.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x_mask: BitVec,
    z_mask: BitVec,
    phase: Phase,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        PauliString {
            n,
            x_mask: BitVec::zeros(n),
            z_mask: BitVec::zeros(n),
            phase: 0,
        }
    }

    pub fn from_masks(n: usize, x_mask: BitVec, z_mask: BitVec, phase: Phase) -> Self {
        assert_eq!(x_mask.len(), n);
        assert_eq!(z_mask.len(), n);
        PauliString {
            n,
            x_mask,
            z_mask,
            phase: phase & 3,
        }
    }

    /// Single-qubit `X_q`.
    pub fn x(n: usize, q: usize) -> Self {
        let mut p = Self::identity(n);
        p.x_mask.set(q, true);
        p
    }

    /// Single-qubit `Z_q`.
    pub fn z(n: usize, q: usize) -> Self {
        let mut p = Self::identity(n);
        p.z_mask.set(q, true);
        p
    }

    /// Single-qubit `Y_q` with the canonical `+1` sign.
    pub fn y(n: usize, q: usize) -> Self {
        let mut p = Self::identity(n);
        p.x_mask.set(q, true);
        p.z_mask.set(q, true);
        p.phase = 1;
        p
    }

    /// Parse e.g. "XYI", "-XZ", "+IIY". One letter per qubit.
    pub fn parse(s: &str) -> Option<Self> {
        let (sign, body) = match s.as_bytes().first()? {
            b'-' => (2u8, &s[1..]),
            b'+' => (0, &s[1..]),
            _ => (0, s),
        };
        let n = body.len();
        let mut p = Self::identity(n);
        p.phase = sign;
        for (q, ch) in body.bytes().enumerate() {
            match ch {
                b'I' => {}
                b'X' => p.x_mask.set(q, true),
                b'Z' => p.z_mask.set(q, true),
                b'Y' => {
                    p.x_mask.set(q, true);
                    p.z_mask.set(q, true);
                    p.phase = (p.phase + 1) & 3;
                }
                _ => return None,
            }
        }
        Some(p)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn x_mask(&self) -> &BitVec {
        &self.x_mask
    }

    pub fn z_mask(&self) -> &BitVec {
        &self.z_mask
    }

    pub fn x_mask_mut(&mut self) -> &mut BitVec {
        &mut self.x_mask
    }

    pub fn z_mask_mut(&mut self) -> &mut BitVec {
        &mut self.z_mask
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn set_phase(&mut self, phase: Phase) {
        self.phase = phase & 3;
    }

    pub fn add_phase(&mut self, delta: Phase) {
        self.phase = (self.phase + delta) & 3;
    }

    pub fn is_identity(&self) -> bool {
        self.x_mask.is_zero() && self.z_mask.is_zero() && self.phase == 0
    }

    /// Identity up to phase: both masks empty.
    pub fn is_trivial(&self) -> bool {
        self.x_mask.is_zero() && self.z_mask.is_zero()
    }

    /// Qubits on which the operator acts nontrivially.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n)
            .filter(|&q| self.x_mask.get(q) || self.z_mask.get(q))
            .collect()
    }

    pub fn support_size(&self) -> usize {
        let mut count = 0;
        for (a, b) in self.x_mask.words().iter().zip(self.z_mask.words()) {
            count += (a | b).count_ones() as usize;
        }
        count
    }

    /// True when the two operators commute.
    pub fn commutes_with(&self, other: &PauliString) -> bool {
        !(self.x_mask.dot(&other.z_mask) ^ self.z_mask.dot(&other.x_mask))
    }

    /// In-place product `self <- self * other` with exact phase:
    /// `X^a Z^b · X^c Z^d = (-1)^(b·c) X^(a^c) Z^(b^d)`.
    pub fn mul_assign(&mut self, other: &PauliString) {
        debug_assert_eq!(self.n, other.n);
        let swap_parity = self.z_mask.dot(&other.x_mask);
        self.phase = (self.phase + other.phase + if swap_parity { 2 } else { 0 }) & 3;
        self.x_mask.xor_assign(&other.x_mask);
        self.z_mask.xor_assign(&other.z_mask);
    }

    pub fn mul(&self, other: &PauliString) -> PauliString {
        let mut out = self.clone();
        out.mul_assign(other);
        out
    }

    pub fn inverse(&self) -> PauliString {
        // P^2 = i^(2·phase + 2·overlap)·I for P = i^phase X^x Z^z.
        let overlap = self.x_mask.dot(&self.z_mask);
        let sq_phase = (2 * self.phase + if overlap { 2 } else { 0 }) & 3;
        let mut out = self.clone();
        out.phase = (self.phase + 4 - sq_phase) & 3;
        out
    }

    /// Hermitian iff phase parity matches the number of `Y` factors.
    pub fn is_hermitian(&self) -> bool {
        let y_parity = self.x_mask.dot(&self.z_mask);
        (self.phase & 1 == 1) == y_parity
    }

    /// Sign relative to the canonical positive representative.
    /// Only meaningful for Hermitian operators.
    pub fn sign(&self) -> Sign {
        debug_assert!(self.is_hermitian());
        let y_count = self.x_mask.and_count(&self.z_mask) as u8;
        Sign::from_bit((self.phase.wrapping_sub(y_count)) & 3 == 2)
    }

    /// The same operator with its sign forced to `+1`.
    pub fn unsigned(&self) -> PauliString {
        let y_count = self.x_mask.and_count(&self.z_mask) as u8;
        let mut out = self.clone();
        out.phase = y_count & 3;
        out
    }

    /// Unsigned key (the two masks), for tallying Paulis up to sign.
    pub fn mask_key(&self) -> (Vec<u64>, Vec<u64>) {
        (self.x_mask.words().to_vec(), self.z_mask.words().to_vec())
    }

    /// Extend to `m >= n` qubits, acting as identity on the new ones.
    pub fn embed(&self, m: usize) -> PauliString {
        assert!(m >= self.n);
        let mut out = PauliString::identity(m);
        for q in 0..self.n {
            out.x_mask.set(q, self.x_mask.get(q));
            out.z_mask.set(q, self.z_mask.get(q));
        }
        out.phase = self.phase;
        out
    }

    /// Restrict to the first `m` qubits; the rest must be identity.
    pub fn restrict(&self, m: usize) -> Option<PauliString> {
        let mut out = PauliString::identity(m);
        for q in 0..self.n {
            let (x, z) = (self.x_mask.get(q), self.z_mask.get(q));
            if q < m {
                out.x_mask.set(q, x);
                out.z_mask.set(q, z);
            } else if x || z {
                return None;
            }
        }
        out.phase = self.phase;
        Some(out)
    }

    /// Relabel qubits: qubit `q` of the result is qubit `perm[q]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> PauliString {
        assert_eq!(perm.len(), self.n);
        let mut out = PauliString::identity(self.n);
        for q in 0..self.n {
            out.x_mask.set(q, self.x_mask.get(perm[q]));
            out.z_mask.set(q, self.z_mask.get(perm[q]));
        }
        out.phase = self.phase;
        out
    }
}

impl std::fmt::Debug for PauliString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self}")
    }
}

impl std::fmt::Display for PauliString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let y_count = self.x_mask.and_count(&self.z_mask) as u8;
        match (self.phase.wrapping_sub(y_count)) & 3 {
            0 => write!(f, "+")?,
            1 => write!(f, "i")?,
            2 => write!(f, "-")?,
            _ => write!(f, "-i")?,
        }
        for q in 0..self.n {
            let ch = match (self.x_mask.get(q), self.z_mask.get(q)) {
                (false, false) => 'I',
                (true, false) => 'X',
                (false, true) => 'Z',
                (true, true) => 'Y',
            };
            write!(f, "{ch}")?;
        }
        Ok(())
    }
}
