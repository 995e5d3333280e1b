//! The magic-pentagram constants: the five measurement lines `I2`, the
//! ten-element star of 3-qubit Paulis, and the conjugation set
//! `S = H_3^⊕ • star` with its stabilizer/nonstabilizer split against |+++>.
//!
//! The printed version of the fifth line circulates with a misprint (`YXY`
//! appearing in three lines and `YYX` in only one); the constructor uses the
//! unique single-symbol repair that restores the each-Pauli-in-exactly-two-
//! lines incidence structure, and asserts every line invariant.

use crate::diag::{bullet, enumerate_h3_even};
use crate::pauli::{PauliString, Sign};
use std::collections::HashMap;

/// Four pairwise-commuting 3-qubit Paulis whose product is `+III` or `-III`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PauliLine {
    paulis: [PauliString; 4],
    product_sign: Sign,
}

impl PauliLine {
    pub fn new(paulis: [PauliString; 4]) -> Self {
        for p in &paulis {
            assert_eq!(p.num_qubits(), 3);
            assert!(p.is_hermitian() && !p.is_trivial());
        }
        for i in 0..4 {
            for j in 0..i {
                assert!(
                    paulis[i].commutes_with(&paulis[j]),
                    "line members must commute: {} vs {}",
                    paulis[i],
                    paulis[j]
                );
            }
        }
        let mut prod = PauliString::identity(3);
        for p in &paulis {
            prod.mul_assign(p);
        }
        assert!(prod.is_trivial(), "line product must be ±III, got {prod}");
        let product_sign = prod.sign();
        PauliLine {
            paulis,
            product_sign,
        }
    }

    pub fn paulis(&self) -> &[PauliString; 4] {
        &self.paulis
    }

    /// Sign `λ` with `P1 P2 P3 P4 = λ·III`; outcomes of the four commuting
    /// measurements always multiply to `λ` on any state.
    pub fn product_sign(&self) -> Sign {
        self.product_sign
    }
}

/// The pentagram constants, computed once and shared read-only.
#[derive(Clone, Debug)]
pub struct PentagramConstants {
    lines: [PauliLine; 5],
    /// The 10 distinct measured Paulis in a fixed order.
    star: Vec<PauliString>,
    /// For each star Pauli, the (line, slot) positions where it is measured.
    occurrences: Vec<[(usize, usize); 2]>,
    /// `H_3^⊕ • star`, up to sign: 32 Paulis.
    s_set: Vec<PauliString>,
    /// The elements of `s_set` that do not stabilize |+++> (up to sign).
    nonstab: Vec<PauliString>,
}

fn p(s: &str) -> PauliString {
    PauliString::parse(s).unwrap()
}

/// Build the constants, verifying every structural invariant.
pub fn build_pentagram_constants() -> PentagramConstants {
    // fifth line repaired: YYX in place of the misprinted YXY
    let lines = [
        PauliLine::new([p("XXX"), p("XYY"), p("YXY"), p("YYX")]),
        PauliLine::new([p("IYI"), p("XII"), p("XYY"), p("IIY")]),
        PauliLine::new([p("IIY"), p("YXY"), p("YII"), p("IXI")]),
        PauliLine::new([p("XXX"), p("XII"), p("IIX"), p("IXI")]),
        PauliLine::new([p("IYI"), p("IIX"), p("YII"), p("YYX")]),
    ];

    // star: first occurrence order over the lines
    let mut star: Vec<PauliString> = Vec::new();
    let mut index: HashMap<(Vec<u64>, Vec<u64>), usize> = HashMap::new();
    let mut occ: Vec<Vec<(usize, usize)>> = Vec::new();
    for (li, line) in lines.iter().enumerate() {
        for (si, q) in line.paulis().iter().enumerate() {
            let key = q.mask_key();
            let id = *index.entry(key).or_insert_with(|| {
                star.push(q.unsigned());
                occ.push(Vec::new());
                star.len() - 1
            });
            occ[id].push((li, si));
        }
    }
    assert_eq!(star.len(), 10, "star must contain 10 distinct Paulis");
    let occurrences: Vec<[(usize, usize); 2]> = occ
        .iter()
        .map(|v| {
            assert_eq!(v.len(), 2, "every star Pauli is measured exactly twice");
            [v[0], v[1]]
        })
        .collect();

    // an odd number of -III lines forces a contextuality violation
    let minus_lines = lines
        .iter()
        .filter(|l| l.product_sign() == Sign::Minus)
        .count();
    assert_eq!(minus_lines % 2, 1, "need an odd number of -III lines");

    // S = H_3^⊕ • star, collected up to sign. The conjugation orbit of a
    // 3-qubit Mermin pentagram star is 32 Paulis: the full weight-3 family
    // plus the three single-X/Y families with arbitrary dangling Zs. Of
    // these, 4 are X-type stabilizers of |+++>.
    let mut s_index: HashMap<(Vec<u64>, Vec<u64>), usize> = HashMap::new();
    let mut s_set: Vec<PauliString> = Vec::new();
    for f in enumerate_h3_even() {
        for q in &star {
            let img = bullet(&f, q).unsigned();
            s_index.entry(img.mask_key()).or_insert_with(|| {
                s_set.push(img.clone());
                s_set.len() - 1
            });
        }
    }
    assert_eq!(s_set.len(), 32, "conjugation orbit of the star");

    let nonstab: Vec<PauliString> = s_set
        .iter()
        .filter(|q| !stabilizes_plus3(q))
        .cloned()
        .collect();
    assert_eq!(nonstab.len(), 28, "non-X-type elements of the orbit");

    PentagramConstants {
        lines,
        star,
        occurrences,
        s_set,
        nonstab,
    }
}

/// True when the unsigned Pauli is a stabilizer of |+++> up to sign,
/// i.e. a product of X operators.
fn stabilizes_plus3(q: &PauliString) -> bool {
    q.z_mask().is_zero()
}

impl PentagramConstants {
    pub fn lines(&self) -> &[PauliLine; 5] {
        &self.lines
    }

    pub fn star(&self) -> &[PauliString] {
        &self.star
    }

    /// Where star Pauli `i` is measured: two (line, slot) positions.
    pub fn occurrences(&self, i: usize) -> [(usize, usize); 2] {
        self.occurrences[i]
    }

    pub fn s_set(&self) -> &[PauliString] {
        &self.s_set
    }

    pub fn nonstabilizers(&self) -> &[PauliString] {
        &self.nonstab
    }

    /// Index of an unsigned Pauli in `s_set`, if present.
    pub fn s_index(&self, q: &PauliString) -> Option<usize> {
        let key = q.mask_key();
        self.s_set.iter().position(|s| s.mask_key() == key)
    }

    pub fn is_nonstabilizer(&self, q: &PauliString) -> bool {
        !stabilizes_plus3(q)
    }
}
