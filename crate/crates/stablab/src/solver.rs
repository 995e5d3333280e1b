//! The reduction algorithms consuming rewindable oracles: Kilian
//! randomization of gate words, the pentagram extraction loop, the exact
//! honest output distribution, blocking-element search, the two-phase
//! identity-vs-3-cycle distinguisher, and the majority-vote path-parity
//! solver.

use crate::diag::{
    bullet, enumerate_h3_even, sample_uniform_h, sample_uniform_h3_even, CnotGate, DiagWord,
    GateStep,
};
use crate::dag::MonotoneDag;
use crate::efrak::{efrak, CnotWord, EfrakError};
use crate::encoding::dfrak;
use crate::oracle::{LineInput, WordInput, WordOracle};
use crate::pauli::Sign;
use crate::pentagram::{build_pentagram_constants, PentagramConstants};
use crate::tableau::{Determinism, StabilizerTableau};
use rand::Rng;
use thiserror::Error;

/// Wire relabeling of the fixed 3-cycle (content 0 -> 1 -> 2 -> 0), in the
/// convention of [`PauliString::permuted`] / [`DiagWord::permuted`].
pub const CYCLE_PERM: [usize; 3] = [2, 0, 1];

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum SolverError {
    #[error("every oracle run failed to produce an inconsistent Pauli")]
    AllRunsFailed,
    #[error("no blocking element exists for Pauli index {0}")]
    NoBlockingF(usize),
    #[error(transparent)]
    Efrak(#[from] EfrakError),
}

/// Kilian randomization of a CNOT word: uniformly random first-round input
/// whose elements stay in the word's cosets while the total product
/// telescopes to `f'·πfπ⁻¹`. Returns the input and the bookkeeping element
/// `f'`, which the caller must never reveal to the oracle.
pub fn gamma(
    f3: &DiagWord,
    word: &CnotWord,
    rng: &mut impl Rng,
) -> (WordInput, DiagWord) {
    assert_eq!(f3.wires(), 3);
    let n = word.len();
    assert!(n >= 1);
    let m = word.m;
    let f_prime3 = sample_uniform_h3_even(rng);
    let f_prime = f_prime3.embed(m);
    let f_m = f3.embed(m);
    // g(i) is the i-th factor of the group product π = g_1·g_2···g_n,
    // i.e. the word's gates read from the end (the last applied gate is
    // the leftmost factor)
    let g = |i: usize| word.gates[n - i];
    let mut h: Vec<DiagWord> = (0..2 * n).map(|_| DiagWord::identity(0)).collect();
    for slot in h.iter_mut().take(2 * n).skip(1) {
        *slot = sample_uniform_h(m, rng);
    }

    let mut steps = Vec::with_capacity(2 * n);
    for i in 1..=2 * n {
        let gate = if i <= n { g(i) } else { g(2 * n + 1 - i) };
        let mut left = if i == 1 {
            f_prime.clone()
        } else {
            h[i - 1].inverse()
        };
        if i == n + 1 {
            left.compose_assign(&f_m);
        }
        // normal form: (left · gate · right) = gate · (gate left gate · right)
        left.conjugate_by_cnot(gate);
        if i < 2 * n {
            left.compose_assign(&h[i]);
        }
        steps.push(GateStep {
            cnot: Some(gate),
            diag: left,
        });
    }
    (WordInput { m, steps }, f_prime3)
}

/// Outcome of one pentagram extraction run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RfRun {
    /// Index into the constants' S-set, or `None` when the oracle produced
    /// no inconsistent Pauli (an oracle failure).
    pub output: Option<usize>,
}

/// One full run of the extraction loop: blind the word, feed the five
/// pentagram lines with rewinds in between, take the first Pauli with
/// inconsistent outcomes across its two contexts, and undo the blinding.
pub fn run_rf(
    f3: &DiagWord,
    word: &CnotWord,
    oracle: &mut dyn WordOracle,
    consts: &PentagramConstants,
    rng: &mut impl Rng,
) -> RfRun {
    let (input, f_prime) = gamma(f3, word, rng);
    oracle.reset();
    oracle.first_round(&input);
    let mut outcomes = [[Sign::Plus; 4]; 5];
    for (li, line) in consts.lines().iter().enumerate() {
        let line_input: LineInput = line.paulis().clone();
        outcomes[li] = oracle.second_round(&line_input);
        oracle.rewind();
    }
    oracle.reset();
    let mut output = None;
    for (si, _) in consts.star().iter().enumerate() {
        let [(l1, s1), (l2, s2)] = consts.occurrences(si);
        if outcomes[l1][s1] != outcomes[l2][s2] {
            let p = bullet(&f_prime.inverse(), &consts.star()[si]).unsigned();
            output = Some(consts.s_index(&p).expect("orbit is closed"));
            break;
        }
    }
    RfRun { output }
}

/// Exact errorless output distribution `R_{f,0}` over the S-set, by full
/// enumeration of the blinding element and every measurement branch. `pi`
/// selects the word product: identity or the fixed 3-cycle.
pub fn exact_rf0(consts: &PentagramConstants, f3: &DiagWord, three_cycle: bool) -> Vec<f64> {
    let conj = if three_cycle {
        f3.permuted(&CYCLE_PERM)
    } else {
        f3.clone()
    };
    let mut dist = vec![0.0f64; consts.s_set().len()];
    for f_prime in enumerate_h3_even() {
        // state = f'·(πfπ⁻¹)|+++>, all diagonal so order is irrelevant
        let mut tab = StabilizerTableau::plus_state(3);
        tab.apply_circuit(&conj.to_circuit()).unwrap();
        tab.apply_circuit(&f_prime.to_circuit()).unwrap();

        // per line: all outcome branches with probabilities
        let line_dists: Vec<Vec<([Sign; 4], f64)>> = consts
            .lines()
            .iter()
            .map(|line| {
                let mut branches: Vec<(StabilizerTableau, [Sign; 4], f64)> =
                    vec![(tab.clone(), [Sign::Plus; 4], 1.0)];
                for (k, p) in line.paulis().iter().enumerate() {
                    let mut next = Vec::with_capacity(branches.len() * 2);
                    for (state, signs, prob) in branches {
                        match state.deterministic_sign(p) {
                            Some(sign) => {
                                let mut s2 = signs;
                                s2[k] = sign;
                                next.push((state, s2, prob));
                            }
                            None => {
                                for sign in [Sign::Plus, Sign::Minus] {
                                    let mut st = state.clone();
                                    let mut dummy = rand::rngs::mock::StepRng::new(0, 0);
                                    let (got, det) =
                                        st.measure_pauli(p, Some(sign), &mut dummy).unwrap();
                                    debug_assert_eq!((got, det), (sign, Determinism::Random));
                                    let mut s2 = signs;
                                    s2[k] = sign;
                                    next.push((st, s2, prob * 0.5));
                                }
                            }
                        }
                    }
                    branches = next;
                }
                branches.into_iter().map(|(_, s, p)| (s, p)).collect()
            })
            .collect();

        // cross product over the five independent (rewound) lines
        let f_inv = f_prime.inverse();
        let mut idx = [0usize; 5];
        'joint: loop {
            let mut prob = 1.0 / 256.0;
            for li in 0..5 {
                prob *= line_dists[li][idx[li]].1;
            }
            if prob > 0.0 {
                for si in 0..consts.star().len() {
                    let [(l1, s1), (l2, s2)] = consts.occurrences(si);
                    if line_dists[l1][idx[l1]].0[s1] != line_dists[l2][idx[l2]].0[s2] {
                        let p = bullet(&f_inv, &consts.star()[si]).unsigned();
                        dist[consts.s_index(&p).expect("orbit closed")] += prob;
                        break;
                    }
                }
            }
            // odometer
            let mut li = 0;
            loop {
                if li == 5 {
                    break 'joint;
                }
                idx[li] += 1;
                if idx[li] < line_dists[li].len() {
                    break;
                }
                idx[li] = 0;
                li += 1;
            }
        }
    }
    normalize_checked(dist)
}

fn normalize_checked(dist: Vec<f64>) -> Vec<f64> {
    let total: f64 = dist.iter().sum();
    // an honest execution always finds an inconsistent Pauli
    assert!(
        (total - 1.0).abs() < 1e-9,
        "honest runs must always produce an inconsistency, mass = {total}"
    );
    dist
}

/// Exact `D_R`: the errorless distribution with `f = I`, `π = I`.
pub fn exact_dr(consts: &PentagramConstants) -> Vec<f64> {
    exact_rf0(consts, &DiagWord::identity(3), false)
}

/// Precomputed solver context: the pentagram constants, the exact honest
/// distribution, and for each support Pauli the first blocking element in
/// enumeration order (where one exists).
pub struct SolverContext {
    pub consts: PentagramConstants,
    pub dr: Vec<f64>,
    /// first blocking f per S-set index, for the Paulis that admit one
    pub blocking_f: Vec<Option<DiagWord>>,
}

impl SolverContext {
    pub fn new() -> Self {
        let consts = build_pentagram_constants();
        let dr = exact_dr(&consts);
        let blocking_f = (0..consts.s_set().len())
            .map(|si| find_blocking_f_raw(&consts, &dr, si))
            .collect();
        SolverContext {
            consts,
            dr,
            blocking_f,
        }
    }

    /// Indices that phase 1 may return: positive honest weight and a
    /// blocking element available for phase 2.
    pub fn blockable_support(&self) -> Vec<usize> {
        (0..self.dr.len())
            .filter(|&i| self.dr[i] > 0.0 && self.blocking_f[i].is_some())
            .collect()
    }
}

impl Default for SolverContext {
    fn default() -> Self {
        Self::new()
    }
}

/// Brute-force search over all 256 elements of `H_3^⊕` in fixed enumeration
/// order for an `f` such that `f•P` has no weight in `R_{f,0}` when the word
/// product is the 3-cycle; equivalently `(πf⁻¹π⁻¹·f)•P` must leave the
/// honest support.
fn find_blocking_f_raw(
    consts: &PentagramConstants,
    dr: &[f64],
    p_index: usize,
) -> Option<DiagWord> {
    let p = &consts.s_set()[p_index];
    for f in enumerate_h3_even() {
        let w = f.inverse().permuted(&CYCLE_PERM).compose(&f);
        let q = bullet(&w, p).unsigned();
        let qi = consts.s_index(&q).expect("orbit closed");
        if dr[qi] == 0.0 {
            return Some(f);
        }
    }
    None
}

/// The exported blocking search; errors when the Lemma's claim fails for
/// this Pauli (the odd-Y weight-3 orbit elements).
pub fn find_blocking_f(ctx: &SolverContext, p_index: usize) -> Result<DiagWord, SolverError> {
    ctx.blocking_f[p_index]
        .clone()
        .ok_or(SolverError::NoBlockingF(p_index))
}

/// Phase 1: sample the extraction loop with `f = I` and return the most
/// frequent Pauli among those phase 2 can use (fixed tie-break by S-set
/// order). Failed runs are excluded from the tally.
pub fn phase1_estimate(
    word: &CnotWord,
    oracle: &mut dyn WordOracle,
    ctx: &SolverContext,
    samples: usize,
    rng: &mut impl Rng,
) -> Result<usize, SolverError> {
    let identity = DiagWord::identity(3);
    let mut tally = vec![0usize; ctx.consts.s_set().len()];
    let mut any = false;
    for _ in 0..samples {
        if let Some(i) = run_rf(&identity, word, oracle, &ctx.consts, rng).output {
            tally[i] += 1;
            any = true;
        }
    }
    if !any {
        return Err(SolverError::AllRunsFailed);
    }
    let best = ctx
        .blockable_support()
        .into_iter()
        .max_by_key(|&i| (tally[i], std::cmp::Reverse(i)))
        .expect("blockable support is nonempty");
    Ok(best)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProductVerdict {
    Identity,
    ThreeCycle,
}

/// Phase 2: with a blocking `f` in hand, the frequency of `f•P` separates
/// the two promise cases: at least `(1-δ)·D_R(P)` under the identity,
/// at most `δ` under the 3-cycle.
pub fn phase2_distinguish(
    word: &CnotWord,
    oracle: &mut dyn WordOracle,
    ctx: &SolverContext,
    f3: &DiagWord,
    p_index: usize,
    samples: usize,
    threshold: f64,
    rng: &mut impl Rng,
) -> ProductVerdict {
    let target = bullet(f3, &ctx.consts.s_set()[p_index]).unsigned();
    let target_idx = ctx.consts.s_index(&target).expect("orbit closed");
    let mut hits = 0usize;
    for _ in 0..samples {
        if run_rf(f3, word, oracle, &ctx.consts, rng).output == Some(target_idx) {
            hits += 1;
        }
    }
    let freq = hits as f64 / samples as f64;
    if freq > threshold {
        ProductVerdict::Identity
    } else {
        ProductVerdict::ThreeCycle
    }
}

/// Distribution-level phase 2, for worst-case adversary experiments: the
/// sampler stands in for `run_rf` outputs (`None` = failed run).
pub fn phase2_distinguish_sampled(
    ctx: &SolverContext,
    f3: &DiagWord,
    p_index: usize,
    samples: usize,
    threshold: f64,
    mut sampler: impl FnMut() -> Option<usize>,
) -> ProductVerdict {
    let target = bullet(f3, &ctx.consts.s_set()[p_index]).unsigned();
    let target_idx = ctx.consts.s_index(&target).expect("orbit closed");
    let mut hits = 0usize;
    for _ in 0..samples {
        if sampler() == Some(target_idx) {
            hits += 1;
        }
    }
    let freq = hits as f64 / samples as f64;
    if freq > threshold {
        ProductVerdict::Identity
    } else {
        ProductVerdict::ThreeCycle
    }
}

/// Tunable solver parameters; the defaults carry the analysis constants.
#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub phase1_samples: usize,
    pub phase2_samples: usize,
    /// placement of the phase-2 threshold: midpoint of the allowed-failure
    /// bound and the identity-case lower bound `(1-δ_max)/20`
    pub delta_max: f64,
    pub shares: usize,
    pub repetitions: usize,
}

impl SolverConfig {
    pub fn threshold(&self) -> f64 {
        (self.delta_max + (1.0 - self.delta_max) / 20.0) / 2.0
    }

    /// `k = ceil(c·log2 n)`, forced odd for clean majorities.
    pub fn repetitions_for(c: f64, n: usize) -> usize {
        let k = (c * (n.max(2) as f64).log2()).ceil() as usize;
        k | 1
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            phase1_samples: 160,
            phase2_samples: 320,
            delta_max: 1.0 / 42.0,
            shares: 2,
            repetitions: 7,
        }
    }
}

/// Majority-vote path-parity solver: per repetition, re-randomize the
/// instance, reduce it to a promise word, and run the two-phase
/// distinguisher through blinded oracle calls.
pub fn solve_dagparity(
    dag: &MonotoneDag,
    oracle: &mut dyn WordOracle,
    ctx: &SolverContext,
    cfg: &SolverConfig,
    rng: &mut impl Rng,
) -> Result<bool, SolverError> {
    let mut odd_votes = 0usize;
    let k = cfg.repetitions | 1;
    for _ in 0..k {
        let layered = dfrak(dag, cfg.shares, rng);
        let word = efrak(&layered)?;
        let vote = match phase1_estimate(&word, oracle, ctx, cfg.phase1_samples, rng) {
            Ok(p_index) => {
                let f3 = find_blocking_f(ctx, p_index).expect("blockable by construction");
                let verdict = phase2_distinguish(
                    &word,
                    oracle,
                    ctx,
                    &f3,
                    p_index,
                    cfg.phase2_samples,
                    cfg.threshold(),
                    rng,
                );
                verdict == ProductVerdict::ThreeCycle
            }
            // a dead oracle gives no signal; vote a fair coin
            Err(SolverError::AllRunsFailed) => rng.gen::<bool>(),
            Err(e) => return Err(e),
        };
        if vote {
            odd_votes += 1;
        }
    }
    Ok(odd_votes > k / 2)
}

/// Build a promise word directly from a small gate list, for tests: the
/// word's product is the identity (a palindrome) optionally composed with
/// the fixed 3-cycle.
pub fn promise_word(m: usize, half: &[CnotGate], three_cycle: bool, pad_front: bool) -> CnotWord {
    assert!(m >= 3);
    let mut gates: Vec<CnotGate> = Vec::new();
    if three_cycle {
        // (swap 0,1)·(swap 1,2) applied first
        for (x, y) in [(1usize, 2usize), (0, 1)] {
            gates.push(CnotGate::new(x, y));
            gates.push(CnotGate::new(y, x));
            gates.push(CnotGate::new(x, y));
        }
    }
    let mut mirror: Vec<CnotGate> = half.to_vec();
    let rev: Vec<CnotGate> = half.iter().rev().copied().collect();
    mirror.extend(rev);
    if pad_front {
        gates.splice(0..0, mirror);
    } else {
        gates.extend(mirror);
    }
    CnotWord { m, gates }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::BitMatrix;
    use crate::dense::{circuit_matrix, mat_eq_up_to_phase, mat_mul};
    use crate::diag::{word_circuit, NormalForm};
    use crate::efrak::three_cycle_matrix;
    use crate::oracle::HonestLogical;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::OnceLock;

    fn ctx() -> &'static SolverContext {
        static CTX: OnceLock<SolverContext> = OnceLock::new();
        CTX.get_or_init(SolverContext::new)
    }

    fn small_word(three_cycle: bool, rng: &mut ChaCha8Rng) -> CnotWord {
        let m = 5;
        let half: Vec<CnotGate> = (0..3)
            .map(|_| {
                let c = rng.gen_range(0..m);
                let t = (c + rng.gen_range(1..m)) % m;
                CnotGate::new(c, t)
            })
            .collect();
        promise_word(m, &half, three_cycle, false)
    }

    #[test]
    fn promise_words_have_promised_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for tc in [false, true] {
            let w = small_word(tc, &mut rng);
            let expect = if tc {
                three_cycle_matrix(w.m)
            } else {
                BitMatrix::identity(w.m)
            };
            assert_eq!(w.matrix(), expect);
        }
    }

    #[test]
    fn gamma_coset_and_product_conditions() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let word = small_word(rng.gen(), &mut rng);
            let f3 = sample_uniform_h3_even(&mut rng);
            let (input, f_prime) = gamma(&f3, &word, &mut rng);
            let n = word.len();
            assert_eq!(input.steps.len(), 2 * n);
            // coset condition: the CNOT parts follow the mirrored word
            for (i, step) in input.steps.iter().enumerate() {
                let idx = if i < n { n - 1 - i } else { i - n };
                assert_eq!(step.cnot, Some(word.gates[idx]));
            }
            // product condition: the total telescopes to f'·πfπ⁻¹, which
            // for promise words lies in H_3^⊕
            let mut nf = NormalForm::identity(input.m);
            nf.push_word(&input.steps);
            assert!(nf.linear_map_is_identity());
            assert!(nf.diag_part().is_h3_even());
            let _ = f_prime;
        }
    }

    #[test]
    fn gamma_unitary_product_matches_dense() {
        // on three wires: the product equals f'·π f π⁻¹ as an 8x8 matrix
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let gates: Vec<CnotGate> = (0..4)
                .map(|_| {
                    let c = rng.gen_range(0..3);
                    let t = (c + rng.gen_range(1..3)) % 3;
                    CnotGate::new(c, t)
                })
                .collect();
            let word = CnotWord { m: 3, gates };
            let f3 = sample_uniform_h3_even(&mut rng);
            let (input, f_prime) = gamma(&f3, &word, &mut rng);
            let lhs = circuit_matrix(3, &word_circuit(&input.steps));
            // rhs = f'·(π f π⁻¹): conjugate_by_cnot computes g·d·g, and
            // iterating gates in application order x_1..x_k builds
            // conjugation by x_k···x_1 = π
            let mut pi_f = f3.clone();
            for g in word.gates.iter() {
                pi_f.conjugate_by_cnot(*g);
            }
            let mut rhs_gates = pi_f.to_circuit();
            rhs_gates.extend(f_prime.to_circuit());
            let rhs = circuit_matrix(3, &rhs_gates);
            assert!(mat_eq_up_to_phase(&lhs, &rhs), "gamma product mismatch");
            let _ = mat_mul;
        }
    }

    #[test]
    fn dr_support_and_max_weight() {
        let c = ctx();
        let support: Vec<usize> = (0..c.dr.len()).filter(|&i| c.dr[i] > 0.0).collect();
        // every support element is a nonstabilizer of |+++>
        for &i in &support {
            assert!(c.consts.is_nonstabilizer(&c.consts.s_set()[i]));
        }
        let max = c.dr.iter().cloned().fold(0.0, f64::max);
        assert!(max >= 1.0 / 20.0, "max honest weight {max}");
        // the maximal blockable weight also clears 1/20
        let max_blockable = c
            .blockable_support()
            .into_iter()
            .map(|i| c.dr[i])
            .fold(0.0, f64::max);
        assert!(max_blockable >= 1.0 / 20.0);
        let total: f64 = c.dr.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn honest_runs_land_in_support_and_never_stabilize() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let c = ctx();
        let mut dev = HonestLogical::new(11);
        let word = small_word(false, &mut rng);
        let identity = DiagWord::identity(3);
        for _ in 0..300 {
            let run = run_rf(&identity, &word, &mut dev, &c.consts, &mut rng);
            let i = run.output.expect("honest runs always find an inconsistency");
            assert!(c.dr[i] > 0.0);
            assert!(c.consts.is_nonstabilizer(&c.consts.s_set()[i]));
        }
    }

    #[test]
    fn honest_empirical_matches_exact_dr() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let c = ctx();
        let mut dev = HonestLogical::new(13);
        let word = small_word(false, &mut rng);
        let identity = DiagWord::identity(3);
        let trials = 4000usize;
        let mut tally = vec![0u64; c.dr.len()];
        for _ in 0..trials {
            let i = run_rf(&identity, &word, &mut dev, &c.consts, &mut rng)
                .output
                .unwrap();
            tally[i] += 1;
        }
        let p = crate::stats::chi_squared_gof_p(&tally, &c.dr);
        assert!(p > 0.001, "empirical D_R diverges, p = {p}");
    }

    #[test]
    fn blocking_f_certification() {
        let c = ctx();
        // a blocking element exists exactly for the star-side orbit: the
        // four odd-Y weight-3 Paulis are unreachable
        let mut missing = Vec::new();
        for i in 0..c.dr.len() {
            if c.dr[i] > 0.0 && c.blocking_f[i].is_none() {
                missing.push(format!("{}", c.consts.s_set()[i]));
            }
        }
        assert_eq!(missing.len(), 4, "unblockable: {missing:?}");
        assert_eq!(c.blockable_support().len(), 24);
        // identity-case property for one heavy Pauli: weight of f•P in
        // R_{f,0:π=I} equals D_R(P)
        let p_index = c
            .blockable_support()
            .into_iter()
            .max_by(|&a, &b| c.dr[a].partial_cmp(&c.dr[b]).unwrap())
            .unwrap();
        let f3 = c.blocking_f[p_index].clone().unwrap();
        let rf0 = exact_rf0(&c.consts, &f3, false);
        let target = bullet(&f3, &c.consts.s_set()[p_index]).unsigned();
        let ti = c.consts.s_index(&target).unwrap();
        assert!((rf0[ti] - c.dr[p_index]).abs() < 1e-12);
        // and the 3-cycle case truly blocks it
        let rf0_c3 = exact_rf0(&c.consts, &f3, true);
        assert_eq!(rf0_c3[ti], 0.0);
    }

    #[test]
    fn two_phase_distinguisher_on_honest_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let c = ctx();
        let cfg = SolverConfig::default();
        let mut dev = HonestLogical::new(17);
        for tc in [false, true] {
            let word = small_word(tc, &mut rng);
            let p_index =
                phase1_estimate(&word, &mut dev, c, cfg.phase1_samples, &mut rng).unwrap();
            let f3 = find_blocking_f(c, p_index).unwrap();
            let verdict = phase2_distinguish(
                &word,
                &mut dev,
                c,
                &f3,
                p_index,
                cfg.phase2_samples,
                cfg.threshold(),
                &mut rng,
            );
            let expect = if tc {
                ProductVerdict::ThreeCycle
            } else {
                ProductVerdict::Identity
            };
            assert_eq!(verdict, expect, "three_cycle = {tc}");
        }
    }

    #[test]
    fn solve_small_instances_end_to_end() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let c = ctx();
        let cfg = SolverConfig {
            phase1_samples: 60,
            phase2_samples: 120,
            repetitions: 3,
            ..SolverConfig::default()
        };
        let mut dev = HonestLogical::new(19);
        for _ in 0..4 {
            let dag = MonotoneDag::random(3, &mut rng);
            let got = solve_dagparity(&dag, &mut dev, c, &cfg, &mut rng).unwrap();
            assert_eq!(got, crate::dag::path_parity_bruteforce(&dag));
        }
    }
}
