//! Small statistical helpers shared by experiments and tests.

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// P-value of a chi-squared homogeneity test across `groups` of counts over
/// the same bins. Bins with zero total are dropped.
pub fn chi_squared_homogeneity_p(groups: &[Vec<u64>]) -> f64 {
    assert!(groups.len() >= 2);
    let bins = groups[0].len();
    assert!(groups.iter().all(|g| g.len() == bins));
    let group_totals: Vec<f64> = groups.iter().map(|g| g.iter().sum::<u64>() as f64).collect();
    let grand: f64 = group_totals.iter().sum();
    let mut stat = 0.0;
    let mut used_bins = 0usize;
    for b in 0..bins {
        let bin_total: f64 = groups.iter().map(|g| g[b] as f64).sum();
        if bin_total == 0.0 {
            continue;
        }
        used_bins += 1;
        for (g, &gt) in groups.iter().zip(&group_totals) {
            let expected = gt * bin_total / grand;
            if expected > 0.0 {
                let diff = g[b] as f64 - expected;
                stat += diff * diff / expected;
            }
        }
    }
    let dof = ((groups.len() - 1) * (used_bins.saturating_sub(1))) as f64;
    if dof == 0.0 {
        return 1.0;
    }
    let dist = ChiSquared::new(dof).expect("positive dof");
    1.0 - dist.cdf(stat)
}

/// P-value of a goodness-of-fit test of counts against given probabilities.
pub fn chi_squared_gof_p(counts: &[u64], probs: &[f64]) -> f64 {
    assert_eq!(counts.len(), probs.len());
    let total: f64 = counts.iter().sum::<u64>() as f64;
    let mut stat = 0.0;
    let mut dof = 0usize;
    for (&c, &p) in counts.iter().zip(probs) {
        let expected = total * p;
        if expected > 0.0 {
            let diff = c as f64 - expected;
            stat += diff * diff / expected;
            dof += 1;
        }
    }
    let dof = dof.saturating_sub(1) as f64;
    if dof == 0.0 {
        return 1.0;
    }
    let dist = ChiSquared::new(dof).expect("positive dof");
    1.0 - dist.cdf(stat)
}

/// One-sided test that rate B is smaller than rate A: probability of seeing
/// at most `b` successes in `n_b` trials under A's empirical rate.
/// Exact binomial tail, summed in log space for stability.
pub fn binomial_tail_p(a: u64, n_a: u64, b: u64, n_b: u64) -> f64 {
    assert!(n_a > 0 && n_b > 0);
    let p = a as f64 / n_a as f64;
    if p == 0.0 {
        return 1.0;
    }
    let ln_p = p.ln();
    let ln_q = (1.0 - p).ln_1p_safe();
    let mut total = 0.0f64;
    for k in 0..=b {
        let ln_pmf = ln_choose(n_b, k) + k as f64 * ln_p + (n_b - k) as f64 * ln_q;
        total += ln_pmf.exp();
    }
    total.min(1.0)
}

trait Ln1pSafe {
    fn ln_1p_safe(self) -> f64;
}

impl Ln1pSafe for f64 {
    fn ln_1p_safe(self) -> f64 {
        if self <= 0.0 {
            f64::NEG_INFINITY
        } else {
            self.ln()
        }
    }
}

fn ln_choose(n: u64, k: u64) -> f64 {
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

fn ln_factorial(n: u64) -> f64 {
    (1..=n).map(|i| (i as f64).ln()).sum()
}
