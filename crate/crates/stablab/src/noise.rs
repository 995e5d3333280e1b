//! Local stochastic Pauli noise.
//!
//! A sampler is `p`-local stochastic when `Pr[F ⊆ Supp(E)] ≤ p^|F|` for
//! every qubit subset `F`. The iid kinds satisfy this analytically (each
//! qubit is corrupted independently with probability `p`); the adversarial
//! kind is constrained by construction, choosing its support inside an
//! iid-sampled allowed set.

use crate::pauli::PauliString;
use rand::Rng;

/// What the adversary does on the qubits it is allowed to corrupt.
#[derive(Clone, Debug, PartialEq)]
pub enum AdversarialPolicy {
    /// X on every allowed qubit.
    AllX,
    /// Z on every allowed qubit.
    AllZ,
    /// X on allowed qubits inside the target set only, concentrating
    /// damage (e.g. on a logical operator's support).
    TargetX(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum NoiseKind {
    IidDepolarizing,
    IidXz,
    Adversarial(AdversarialPolicy),
}

#[derive(Clone, Debug, PartialEq)]
pub struct NoiseSpec {
    pub rate: f64,
    pub kind: NoiseKind,
}

impl NoiseSpec {
    pub fn depolarizing(rate: f64) -> Self {
        assert!((0.0..=1.0).contains(&rate));
        NoiseSpec {
            rate,
            kind: NoiseKind::IidDepolarizing,
        }
    }

    pub fn xz(rate: f64) -> Self {
        assert!((0.0..=1.0).contains(&rate));
        NoiseSpec {
            rate,
            kind: NoiseKind::IidXz,
        }
    }

    pub fn adversarial(rate: f64, policy: AdversarialPolicy) -> Self {
        assert!((0.0..=1.0).contains(&rate));
        NoiseSpec {
            rate,
            kind: NoiseKind::Adversarial(policy),
        }
    }
}

/// Draw one error layer on `n` qubits.
pub fn sample_noise(spec: &NoiseSpec, n: usize, rng: &mut impl Rng) -> PauliString {
    let mut e = PauliString::identity(n);
    if spec.rate == 0.0 {
        return e;
    }
    for q in 0..n {
        if rng.gen::<f64>() >= spec.rate {
            continue;
        }
        match &spec.kind {
            NoiseKind::IidDepolarizing => match rng.gen_range(0..3) {
                0 => e.x_mask_mut().set(q, true),
                1 => {
                    e.x_mask_mut().set(q, true);
                    e.z_mask_mut().set(q, true);
                    e.add_phase(1);
                }
                _ => e.z_mask_mut().set(q, true),
            },
            NoiseKind::IidXz => {
                if rng.gen::<bool>() {
                    e.x_mask_mut().set(q, true);
                } else {
                    e.z_mask_mut().set(q, true);
                }
            }
            NoiseKind::Adversarial(policy) => match policy {
                AdversarialPolicy::AllX => e.x_mask_mut().set(q, true),
                AdversarialPolicy::AllZ => e.z_mask_mut().set(q, true),
                AdversarialPolicy::TargetX(targets) => {
                    if targets.contains(&q) {
                        e.x_mask_mut().set(q, true);
                    }
                }
            },
        }
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_rate_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let spec = NoiseSpec::depolarizing(0.0);
        for _ in 0..100 {
            assert!(sample_noise(&spec, 16, &mut rng).is_identity());
        }
    }

    #[test]
    fn per_qubit_rate_respected() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = 0.1;
        let spec = NoiseSpec::depolarizing(p);
        let n = 1000;
        let trials = 200;
        let mut corrupted = 0usize;
        for _ in 0..trials {
            corrupted += sample_noise(&spec, n, &mut rng).support_size();
        }
        let total = (n * trials) as f64;
        let freq = corrupted as f64 / total;
        let sigma = (p * (1.0 - p) / total).sqrt();
        assert!(freq <= p + 3.0 * sigma, "freq {freq}");
    }

    #[test]
    fn pair_probability_product_bound() {
        // fixed pair F with |F| = 2: Pr[F ⊆ Supp] ≤ p² + 3σ
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = 0.2;
        let spec = NoiseSpec::xz(p);
        let trials = 100_000;
        let mut both = 0usize;
        for _ in 0..trials {
            let e = sample_noise(&spec, 8, &mut rng);
            let in_supp = |q: usize| e.x_mask().get(q) || e.z_mask().get(q);
            if in_supp(2) && in_supp(5) {
                both += 1;
            }
        }
        let freq = both as f64 / trials as f64;
        let bound = p * p;
        let sigma = (bound * (1.0 - bound) / trials as f64).sqrt();
        assert!(freq <= bound + 3.0 * sigma, "freq {freq} vs bound {bound}");
    }

    #[test]
    fn adversarial_support_within_allowed_set() {
        // the target policy corrupts only allowed qubits inside the target
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let spec = NoiseSpec::adversarial(0.5, AdversarialPolicy::TargetX(vec![0, 1, 2]));
        for _ in 0..200 {
            let e = sample_noise(&spec, 10, &mut rng);
            assert!(e.support().iter().all(|&q| q < 3));
        }
    }

    #[test]
    fn composed_layers_stay_local_stochastic() {
        // two layers at rates p and q compose within the p+q bound
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (p, q) = (0.05, 0.03);
        let trials = 100_000;
        let mut hit = 0usize;
        for _ in 0..trials {
            let a = sample_noise(&NoiseSpec::xz(p), 4, &mut rng);
            let b = sample_noise(&NoiseSpec::xz(q), 4, &mut rng);
            let e = a.mul(&b);
            if e.x_mask().get(1) || e.z_mask().get(1) {
                hit += 1;
            }
        }
        let freq = hit as f64 / trials as f64;
        let bound = p + q;
        let sigma = (bound * (1.0 - bound) / trials as f64).sqrt();
        assert!(freq <= bound + 3.0 * sigma);
    }
}
