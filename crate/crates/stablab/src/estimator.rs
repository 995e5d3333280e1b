//! The two-qubit Pauli-frequency estimator for the constant-width grid
//! problem, driven by a contract-modeled extraction oracle.
//!
//! The extraction subroutine (a magic-square protocol in the source
//! construction) is modeled by its contract: each call makes six uniformly
//! random oracle queries, each failing independently with probability ε;
//! an errorless call returns a uniformly random nonstabilizer Pauli of the
//! hidden state, and only failed calls may return a stabilizer. The
//! estimator tallies the fifteen nontrivial two-qubit Paulis, classifies
//! them against the 1/15 threshold — meaningful while ε < 1/30, where the
//! gap is σ = (1 − 30ε)/12 — and reads the basis class off the stabilizer
//! group.

use crate::pauli::PauliString;
use rand::Rng;

/// The hidden promise: the state is an X-basis or a Z-basis state.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BasisClass {
    XBasis,
    ZBasis,
}

/// What the adversary returns on failed calls.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ExtractionAdversary {
    /// uniform over the three nontrivial stabilizers
    UniformStabilizer,
    /// all failure mass on one fixed stabilizer (worst case for the
    /// threshold classifier)
    FixedStabilizer(usize),
}

/// The fifteen nontrivial two-qubit Paulis up to sign, fixed order.
pub fn two_qubit_paulis() -> Vec<PauliString> {
    let mut out = Vec::with_capacity(15);
    for code in 1u8..16 {
        let mut p = PauliString::identity(2);
        p.x_mask_mut().set(0, code & 1 != 0);
        p.z_mask_mut().set(0, code & 2 != 0);
        p.x_mask_mut().set(1, code & 4 != 0);
        p.z_mask_mut().set(1, code & 8 != 0);
        out.push(p.unsigned());
    }
    out
}

/// Indices (into [`two_qubit_paulis`]) of the class's three nontrivial
/// stabilizers.
pub fn stabilizer_indices(class: BasisClass) -> [usize; 3] {
    let paulis = two_qubit_paulis();
    let is_stab = |p: &PauliString| match class {
        BasisClass::XBasis => p.z_mask().is_zero(),
        BasisClass::ZBasis => p.x_mask().is_zero(),
    };
    let v: Vec<usize> = (0..15).filter(|&i| is_stab(&paulis[i])).collect();
    [v[0], v[1], v[2]]
}

/// Contract-modeled extraction oracle.
pub struct ExtractionOracle {
    class: BasisClass,
    eps: f64,
    adversary: ExtractionAdversary,
    stabs: [usize; 3],
    nonstabs: Vec<usize>,
}

impl ExtractionOracle {
    pub fn new(class: BasisClass, eps: f64, adversary: ExtractionAdversary) -> Self {
        let stabs = stabilizer_indices(class);
        let nonstabs = (0..15).filter(|i| !stabs.contains(i)).collect();
        ExtractionOracle {
            class,
            eps,
            adversary,
            stabs,
            nonstabs,
        }
    }

    pub fn class(&self) -> BasisClass {
        self.class
    }

    /// One extraction: six internal queries each failing with probability ε.
    pub fn sample(&self, rng: &mut impl Rng) -> usize {
        let failed = (0..6).any(|_| rng.gen::<f64>() < self.eps);
        if failed {
            match self.adversary {
                ExtractionAdversary::UniformStabilizer => self.stabs[rng.gen_range(0..3)],
                ExtractionAdversary::FixedStabilizer(k) => self.stabs[k % 3],
            }
        } else {
            self.nonstabs[rng.gen_range(0..12)]
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Nc1Decision {
    XBasis,
    ZBasis,
    /// the tally admitted no coherent three-element stabilizer group
    Undecided,
}

/// The frequency gap the sample count is sized against.
pub fn sigma(eps: f64) -> f64 {
    (1.0 - 30.0 * eps) / 12.0
}

/// `⌈c/σ²⌉` samples.
pub fn samples_for(c: f64, eps: f64) -> usize {
    let s = sigma(eps);
    assert!(s > 0.0, "estimator undefined at ε ≥ 1/30");
    (c / (s * s)).ceil() as usize
}

/// Tally `samples` extractions and classify each Pauli against the 1/15
/// threshold; Paulis below it form the stabilizer-group candidate, whose
/// type decides the basis class.
pub fn nc1_estimate(
    oracle: &ExtractionOracle,
    samples: usize,
    rng: &mut impl Rng,
) -> Nc1Decision {
    let mut tally = vec![0u64; 15];
    for _ in 0..samples {
        tally[oracle.sample(rng)] += 1;
    }
    decide_from_tally(&tally)
}

/// The decision rule, separated for distribution-level tests.
pub fn decide_from_tally(tally: &[u64]) -> Nc1Decision {
    let total: u64 = tally.iter().sum();
    if total == 0 {
        return Nc1Decision::Undecided;
    }
    let paulis = two_qubit_paulis();
    let candidates: Vec<usize> = (0..15)
        .filter(|&i| (tally[i] as f64) / (total as f64) < 1.0 / 15.0)
        .collect();
    if candidates.is_empty() || candidates.len() > 3 {
        return Nc1Decision::Undecided;
    }
    if candidates.len() == 3 {
        // the three must form a group: the product of any two is the third
        let prod = paulis[candidates[0]].mul(&paulis[candidates[1]]).unsigned();
        if prod.mask_key() != paulis[candidates[2]].mask_key() {
            return Nc1Decision::Undecided;
        }
    }
    let all_x = candidates.iter().all(|&i| paulis[i].z_mask().is_zero());
    let all_z = candidates.iter().all(|&i| paulis[i].x_mask().is_zero());
    match (all_x, all_z) {
        (true, false) => Nc1Decision::XBasis,
        (false, true) => Nc1Decision::ZBasis,
        _ => Nc1Decision::Undecided,
    }
}

pub fn decision_matches(class: BasisClass, decision: Nc1Decision) -> bool {
    matches!(
        (class, decision),
        (BasisClass::XBasis, Nc1Decision::XBasis) | (BasisClass::ZBasis, Nc1Decision::ZBasis)
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn errorless_frequencies_are_one_twelfth() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let oracle = ExtractionOracle::new(
            BasisClass::XBasis,
            0.0,
            ExtractionAdversary::UniformStabilizer,
        );
        let samples = 100_000;
        let mut tally = vec![0u64; 15];
        for _ in 0..samples {
            tally[oracle.sample(&mut rng)] += 1;
        }
        let stabs = stabilizer_indices(BasisClass::XBasis);
        for i in 0..15 {
            let freq = tally[i] as f64 / samples as f64;
            if stabs.contains(&i) {
                assert_eq!(tally[i], 0);
            } else {
                assert!((freq - 1.0 / 12.0).abs() < 0.01, "freq[{i}] = {freq}");
            }
        }
        assert!(decision_matches(
            BasisClass::XBasis,
            decide_from_tally(&tally)
        ));
    }

    #[test]
    fn both_classes_decided_at_small_eps() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for class in [BasisClass::XBasis, BasisClass::ZBasis] {
            let oracle =
                ExtractionOracle::new(class, 0.01, ExtractionAdversary::UniformStabilizer);
            let samples = samples_for(20.0, 0.01);
            let decision = nc1_estimate(&oracle, samples, &mut rng);
            assert!(decision_matches(class, decision));
        }
    }

    #[test]
    fn worst_case_adversary_at_eps_002() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let eps = 0.02;
        let samples = samples_for(20.0, eps);
        let mut correct = 0;
        let reps = 40;
        for r in 0..reps {
            let class = if r % 2 == 0 {
                BasisClass::XBasis
            } else {
                BasisClass::ZBasis
            };
            let oracle = ExtractionOracle::new(class, eps, ExtractionAdversary::FixedStabilizer(0));
            if decision_matches(class, nc1_estimate(&oracle, samples, &mut rng)) {
                correct += 1;
            }
        }
        assert!(
            correct * 3 >= reps * 2,
            "correct {correct}/{reps} below 2/3"
        );
    }

    #[test]
    fn boundary_eps_runs_but_is_not_guaranteed() {
        // ε = 1/30 exactly: the bounds coincide at 1/15; σ = 0, so the
        // sized sample count is undefined — the estimator itself still
        // executes on a fixed sample budget
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let oracle = ExtractionOracle::new(
            BasisClass::ZBasis,
            1.0 / 30.0,
            ExtractionAdversary::FixedStabilizer(1),
        );
        let _ = nc1_estimate(&oracle, 10_000, &mut rng);
        assert!(sigma(1.0 / 30.0).abs() < 1e-12);
    }

    #[test]
    fn fifteen_paulis_and_group_structure() {
        let ps = two_qubit_paulis();
        assert_eq!(ps.len(), 15);
        for class in [BasisClass::XBasis, BasisClass::ZBasis] {
            let [a, b, c] = stabilizer_indices(class);
            let prod = ps[a].mul(&ps[b]).unsigned();
            assert_eq!(prod.mask_key(), ps[c].mask_key());
        }
    }
}
