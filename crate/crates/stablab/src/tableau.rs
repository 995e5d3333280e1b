//! Stabilizer states with destabilizers: gate application, general Pauli
//! measurement with forced-outcome support, and snapshot/restore.

use crate::bits::BitVec;
use crate::gate::{conjugate_by_gate, CliffordGate, GateError};
use crate::pauli::{PauliString, Sign};
use rand::Rng;
use thiserror::Error;

/// Whether a measurement outcome was fixed by the state or a fresh coin.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Determinism {
    Deterministic,
    Random,
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum MeasureError {
    #[error("cannot measure the identity operator")]
    IdentityMeasurement,
    #[error("measured operator must be Hermitian (a +/-1 observable)")]
    NotHermitian,
    #[error("operator acts on {got} qubits but the register has {want}")]
    SizeMismatch { got: usize, want: usize },
    #[error("forced outcome {forced} contradicts the deterministic outcome {actual}")]
    Contradiction { forced: Sign, actual: Sign },
}

/// An `n`-qubit stabilizer state: `n` stabilizer rows and the paired
/// destabilizer rows forming a symplectic basis of the Pauli group.
#[derive(Clone, PartialEq, Eq)]
pub struct StabilizerTableau {
    n: usize,
    stab: Vec<PauliString>,
    destab: Vec<PauliString>,
}

/// Opaque full copy of a tableau, used to rewind devices.
#[derive(Clone)]
pub struct Snapshot(StabilizerTableau);

impl StabilizerTableau {
    /// |0...0>
    pub fn zero_state(n: usize) -> Self {
        StabilizerTableau {
            n,
            stab: (0..n).map(|q| PauliString::z(n, q)).collect(),
            destab: (0..n).map(|q| PauliString::x(n, q)).collect(),
        }
    }

    /// |+...+>
    pub fn plus_state(n: usize) -> Self {
        StabilizerTableau {
            n,
            stab: (0..n).map(|q| PauliString::x(n, q)).collect(),
            destab: (0..n).map(|q| PauliString::z(n, q)).collect(),
        }
    }

    /// Build from explicit rows. The caller must provide a valid symplectic
    /// basis; this is checked.
    pub fn from_rows(stab: Vec<PauliString>, destab: Vec<PauliString>) -> Self {
        let n = stab.len();
        assert_eq!(destab.len(), n);
        let t = StabilizerTableau { n, stab, destab };
        assert!(t.check_invariants(), "rows do not form a symplectic basis");
        t
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn stabilizers(&self) -> &[PauliString] {
        &self.stab
    }

    pub fn destabilizers(&self) -> &[PauliString] {
        &self.destab
    }

    /// Symplectic-basis condition plus Hermiticity of every row. With the
    /// pairing intact the rows are independent, so the group cannot contain
    /// -I.
    pub fn check_invariants(&self) -> bool {
        for i in 0..self.n {
            if !self.stab[i].is_hermitian() || !self.destab[i].is_hermitian() {
                return false;
            }
            if self.stab[i].is_trivial() || self.stab[i].commutes_with(&self.destab[i]) {
                return false;
            }
            for j in 0..i {
                if !self.stab[i].commutes_with(&self.stab[j])
                    || !self.destab[i].commutes_with(&self.destab[j])
                    || !self.stab[i].commutes_with(&self.destab[j])
                    || !self.stab[j].commutes_with(&self.destab[i])
                {
                    return false;
                }
            }
        }
        true
    }

    #[inline]
    fn debug_check(&self) {
        #[cfg(debug_assertions)]
        if self.n <= 12 {
            debug_assert!(self.check_invariants());
        }
    }

    pub fn apply_gate(&mut self, g: CliffordGate) -> Result<(), GateError> {
        g.validate(self.n)?;
        for row in self.stab.iter_mut().chain(self.destab.iter_mut()) {
            conjugate_by_gate(row, g);
        }
        self.debug_check();
        Ok(())
    }

    pub fn apply_circuit(&mut self, circuit: &[CliffordGate]) -> Result<(), GateError> {
        for &g in circuit {
            self.apply_gate(g)?;
        }
        Ok(())
    }

    /// Relabel qubits: qubit `q` of the result is qubit `perm[q]` of `self`.
    pub fn permute_qubits(&mut self, perm: &[usize]) {
        for row in self.stab.iter_mut().chain(self.destab.iter_mut()) {
            *row = row.permuted(perm);
        }
    }

    /// Apply a Pauli operator as a unitary (phases of anticommuting rows flip).
    pub fn apply_pauli(&mut self, p: &PauliString) {
        assert_eq!(p.num_qubits(), self.n);
        for row in self.stab.iter_mut().chain(self.destab.iter_mut()) {
            if !row.commutes_with(p) {
                row.add_phase(2);
            }
        }
    }

    /// If `p` (with its phase) is in `±<stabilizers>`, return its
    /// deterministic eigenvalue; otherwise `None`.
    pub fn deterministic_sign(&self, p: &PauliString) -> Option<Sign> {
        if self.stab.iter().any(|s| !s.commutes_with(p)) {
            return None;
        }
        Some(self.deterministic_sign_unchecked(p))
    }

    fn deterministic_sign_unchecked(&self, p: &PauliString) -> Sign {
        // p commutes with the whole group, so it decomposes over the
        // stabilizer generators; destab_i flags whether stab_i participates.
        let mut acc = PauliString::identity(self.n);
        for i in 0..self.n {
            if !self.destab[i].commutes_with(p) {
                acc.mul_assign(&self.stab[i]);
            }
        }
        debug_assert_eq!(acc.x_mask(), p.x_mask());
        debug_assert_eq!(acc.z_mask(), p.z_mask());
        // acc stabilizes the state; p = i^(dp)·acc with dp in {0, 2}.
        let dp = (p.phase() + 4 - acc.phase()) & 3;
        debug_assert!(dp == 0 || dp == 2);
        Sign::from_bit(dp == 2)
    }

    /// Measure the Pauli observable `p`.
    ///
    /// Deterministic outcomes leave the state untouched and return the
    /// determined sign; forcing a contradicting sign is an error (this is the
    /// "probability zero" signal transcript verification relies on). Random
    /// outcomes take the forced sign when given, otherwise a fair coin from
    /// `rng`, and collapse the state.
    pub fn measure_pauli(
        &mut self,
        p: &PauliString,
        forced: Option<Sign>,
        rng: &mut impl Rng,
    ) -> Result<(Sign, Determinism), MeasureError> {
        if p.num_qubits() != self.n {
            return Err(MeasureError::SizeMismatch {
                got: p.num_qubits(),
                want: self.n,
            });
        }
        if p.is_trivial() {
            return Err(MeasureError::IdentityMeasurement);
        }
        if !p.is_hermitian() {
            return Err(MeasureError::NotHermitian);
        }

        let pivot = (0..self.n).find(|&i| !self.stab[i].commutes_with(p));
        let Some(pivot) = pivot else {
            let actual = self.deterministic_sign_unchecked(p);
            if let Some(f) = forced {
                if f != actual {
                    return Err(MeasureError::Contradiction { forced: f, actual });
                }
            }
            return Ok((actual, Determinism::Deterministic));
        };

        let outcome = forced.unwrap_or_else(|| Sign::from_bit(rng.gen::<bool>()));
        let pivot_row = self.stab[pivot].clone();
        for i in 0..self.n {
            if i != pivot && !self.stab[i].commutes_with(p) {
                self.stab[i].mul_assign(&pivot_row);
            }
            if !self.destab[i].commutes_with(p) {
                self.destab[i].mul_assign(&pivot_row);
            }
        }
        self.destab[pivot] = pivot_row;
        let mut new_row = p.clone();
        if outcome == Sign::Minus {
            new_row.add_phase(2);
        }
        self.stab[pivot] = new_row;
        self.debug_check();
        Ok((outcome, Determinism::Random))
    }

    /// Measure with natural randomness.
    pub fn measure(
        &mut self,
        p: &PauliString,
        rng: &mut impl Rng,
    ) -> Result<(Sign, Determinism), MeasureError> {
        self.measure_pauli(p, None, rng)
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot(self.clone())
    }

    pub fn restore(snapshot: &Snapshot) -> StabilizerTableau {
        snapshot.0.clone()
    }

    /// True when `other` describes the same quantum state.
    pub fn same_state(&self, other: &StabilizerTableau) -> bool {
        if self.n != other.n {
            return false;
        }
        other
            .stab
            .iter()
            .all(|row| self.deterministic_sign(row) == Some(Sign::Plus))
    }

    /// Stabilizer generators of the reduced state on `keep`, valid when the
    /// dropped qubits are in a product state with the kept ones (e.g. after
    /// they have been measured). Panics otherwise.
    pub fn restrict_state(&self, keep: &[usize]) -> Vec<PauliString> {
        let keep_set: std::collections::HashSet<usize> = keep.iter().copied().collect();
        let drop: Vec<usize> = (0..self.n).filter(|q| !keep_set.contains(q)).collect();
        let mut rows = self.stab.clone();
        // Eliminate all support on dropped qubits by Pauli row reduction.
        for &q in &drop {
            for bit in [true, false] {
                // bit=true handles the x component, then the z component.
                let has = |r: &PauliString| {
                    if bit {
                        r.x_mask().get(q)
                    } else {
                        r.z_mask().get(q)
                    }
                };
                if let Some(pi) = rows.iter().position(has) {
                    let pivot = rows[pi].clone();
                    for (i, r) in rows.iter_mut().enumerate() {
                        if i != pi && has(r) {
                            r.mul_assign(&pivot);
                        }
                    }
                    rows.swap_remove(pi);
                }
            }
        }
        assert_eq!(
            rows.len(),
            keep.len(),
            "dropped qubits are entangled with the kept ones"
        );
        rows.iter()
            .map(|r| {
                let mut out = PauliString::identity(keep.len());
                for (new_q, &old_q) in keep.iter().enumerate() {
                    out.x_mask_mut().set(new_q, r.x_mask().get(old_q));
                    out.z_mask_mut().set(new_q, r.z_mask().get(old_q));
                }
                out.set_phase(r.phase());
                out
            })
            .collect()
    }

    /// The full syndrome of a set of commuting observables, without
    /// collapsing: each must be deterministic.
    pub fn deterministic_signs(&self, observables: &[PauliString]) -> Option<Vec<Sign>> {
        observables.iter().map(|p| self.deterministic_sign(p)).collect()
    }
}

impl std::fmt::Debug for StabilizerTableau {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Stab")?;
        for row in &self.stab {
            writeln!(f, "  {row}")?;
        }
        writeln!(f, "Destab")?;
        for row in &self.destab {
            writeln!(f, "  {row}")?;
        }
        Ok(())
    }
}

/// Build the `n`-qubit graph state tableau directly from an edge list:
/// stabilizers `X_v ∏_{u~v} Z_u`, destabilizers `Z_v`.
pub fn graph_state_tableau(n: usize, edges: &[(usize, usize)]) -> StabilizerTableau {
    let mut adj = vec![BitVec::zeros(n); n];
    for &(a, b) in edges {
        assert!(a != b && a < n && b < n, "bad edge ({a},{b})");
        adj[a].set(b, true);
        adj[b].set(a, true);
    }
    let stab = (0..n)
        .map(|v| {
            let mut x = BitVec::zeros(n);
            x.set(v, true);
            PauliString::from_masks(n, x, adj[v].clone(), 0)
        })
        .collect();
    let destab = (0..n).map(|v| PauliString::z(n, v)).collect();
    StabilizerTableau::from_rows(stab, destab)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(s: &str) -> PauliString {
        PauliString::parse(s).unwrap()
    }

    #[test]
    fn zero_state_measurements() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut t = StabilizerTableau::zero_state(1);
        let (sign, det) = t.measure(&p("Z"), &mut rng).unwrap();
        assert_eq!((sign, det), (Sign::Plus, Determinism::Deterministic));

        // |0>, H -> stabilizer {X}
        t.apply_gate(CliffordGate::H(0)).unwrap();
        assert_eq!(t.deterministic_sign(&p("X")), Some(Sign::Plus));
    }

    #[test]
    fn forced_random_measurement_collapses() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        // |0>, measure X forced -1 -> post state |->
        let mut t = StabilizerTableau::zero_state(1);
        let (sign, det) = t.measure_pauli(&p("X"), Some(Sign::Minus), &mut rng).unwrap();
        assert_eq!((sign, det), (Sign::Minus, Determinism::Random));
        assert_eq!(t.deterministic_sign(&p("X")), Some(Sign::Minus));
    }

    #[test]
    fn forced_contradiction_errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut t = StabilizerTableau::zero_state(1);
        let err = t.measure_pauli(&p("Z"), Some(Sign::Minus), &mut rng);
        assert_eq!(
            err,
            Err(MeasureError::Contradiction {
                forced: Sign::Minus,
                actual: Sign::Plus
            })
        );
    }

    #[test]
    fn two_vertex_graph_state() {
        // |++>, CZ(0,1) -> stabilizers {XZ, ZX}
        let mut t = StabilizerTableau::plus_state(2);
        t.apply_gate(CliffordGate::CZ(0, 1)).unwrap();
        assert_eq!(t.deterministic_sign(&p("XZ")), Some(Sign::Plus));
        assert_eq!(t.deterministic_sign(&p("ZX")), Some(Sign::Plus));
        let g = graph_state_tableau(2, &[(0, 1)]);
        assert!(t.same_state(&g));
    }

    #[test]
    fn snapshot_restore_identical() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut t = StabilizerTableau::plus_state(3);
        t.apply_gate(CliffordGate::CZ(0, 1)).unwrap();
        let snap = t.snapshot();
        let r1 = StabilizerTableau::restore(&snap);
        let snap2 = r1.snapshot();
        let r2 = StabilizerTableau::restore(&snap2);
        assert!(r2 == t);
        // measurement after restore is an independent future
        let mut a = StabilizerTableau::restore(&snap);
        let mut b = StabilizerTableau::restore(&snap);
        let (_, d1) = a.measure(&p("XII"), &mut rng).unwrap();
        let (_, d2) = b.measure(&p("XII"), &mut rng).unwrap();
        assert_eq!(d1, Determinism::Random);
        assert_eq!(d2, Determinism::Random);
    }

    #[test]
    fn measure_pauli_rejects_identity_and_nonhermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut t = StabilizerTableau::zero_state(2);
        assert_eq!(
            t.measure(&PauliString::identity(2), &mut rng),
            Err(MeasureError::IdentityMeasurement)
        );
        let mut bad = p("XZ");
        bad.add_phase(1);
        assert_eq!(t.measure(&bad, &mut rng), Err(MeasureError::NotHermitian));
    }

    #[test]
    fn restrict_after_measurement() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        // GHZ-ish: measure out one qubit of a 3-qubit graph state, the rest
        // stays a valid 2-qubit stabilizer state.
        let mut t = graph_state_tableau(3, &[(0, 1), (1, 2)]);
        t.measure(&p("XII"), &mut rng).unwrap();
        let rows = t.restrict_state(&[1, 2]);
        assert_eq!(rows.len(), 2);
        for r in &rows {
            assert!(r.is_hermitian());
        }
    }
}
