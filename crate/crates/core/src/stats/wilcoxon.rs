use statrs::distribution::{ContinuousCDF, Normal};

use super::{average_ranks, Method, StatsError, TestResult};

/// Largest sample (after dropping zero differences) that uses the exact null
/// distribution.
const EXACT_LIMIT: usize = 25;

/// Two-sided Wilcoxon signed-rank test on paired samples.
///
/// Zero differences are dropped and the absolute differences are ranked with
/// average ranks for ties. The statistic is `min(W+, W-)`. The p-value comes
/// from the exact sign-flip distribution when at most 25 differences remain
/// and none were zero; otherwise from the normal approximation with tie
/// correction and no continuity correction.
pub fn wilcoxon_signed_rank(pairs: &[(f64, f64)]) -> Result<TestResult, StatsError> {
    if pairs.iter().any(|(a, b)| !a.is_finite() || !b.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let diffs: Vec<f64> = pairs.iter().map(|(a, b)| a - b).collect();
    let nonzero: Vec<f64> = diffs.iter().copied().filter(|&d| d != 0.0).collect();
    if nonzero.is_empty() {
        return Err(StatsError::AllZeroDifferences);
    }
    let had_zeros = nonzero.len() < diffs.len();
    let abs: Vec<f64> = nonzero.iter().map(|d| d.abs()).collect();
    let (ranks, ties) = average_ranks(&abs);
    let w_plus: f64 = nonzero
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| r)
        .sum();
    let n = nonzero.len() as f64;
    let total = n * (n + 1.0) / 2.0;
    let statistic = w_plus.min(total - w_plus);

    if nonzero.len() <= EXACT_LIMIT && !had_zeros {
        let p = (2.0 * wilcoxon_exact_cdf(&ranks, statistic)).min(1.0);
        return Ok(TestResult::new(statistic, p, Method::WilcoxonExact));
    }
    let mean = total / 2.0;
    let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>() / 48.0;
    let variance = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term;
    let p = if variance > 0.0 {
        let z = (statistic - mean) / variance.sqrt();
        let normal = Normal::new(0.0, 1.0).expect("standard normal");
        (2.0 * normal.cdf(z)).min(1.0)
    } else {
        1.0
    };
    Ok(TestResult::new(statistic, p, Method::WilcoxonNormal))
}

/// `P(W+ <= w)` when every rank in `ranks` carries a random sign. Ranks must
/// be multiples of one half (average ranks are).
pub fn wilcoxon_exact_cdf(ranks: &[f64], w: f64) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let max: usize = doubled.iter().sum();
    let mut counts = vec![0.0f64; max + 1];
    counts[0] = 1.0;
    let mut reach = 0;
    for &r in &doubled {
        for s in (0..=reach).rev() {
            if counts[s] != 0.0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    let limit = (2.0 * w + 1e-9).floor();
    if limit < 0.0 {
        return 0.0;
    }
    let limit = (limit as usize).min(max);
    let below: f64 = counts[..=limit].iter().sum();
    below / 2f64.powi(ranks.len() as i32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use rand::Rng as _;

    /// Enumerates every sign assignment.
    fn enumerate_cdf(ranks: &[f64], w: f64) -> f64 {
        let n = ranks.len();
        let mut hits = 0u64;
        for mask in 0u64..(1 << n) {
            let s: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
            if s <= w + 1e-9 {
                hits += 1;
            }
        }
        hits as f64 / (1u64 << n) as f64
    }

    #[test]
    fn exact_cdf_matches_enumeration() {
        let mut rng = rng_from_seed(12);
        for _ in 0..200 {
            let n = rng.gen_range(1..=12);
            // coarse magnitudes produce ties
            let abs: Vec<f64> = (0..n).map(|_| rng.gen_range(1..6) as f64).collect();
            let (ranks, _) = average_ranks(&abs);
            let total: f64 = ranks.iter().sum();
            for step in 0..=(2.0 * total) as usize {
                let w = step as f64 / 2.0;
                assert!((wilcoxon_exact_cdf(&ranks, w) - enumerate_cdf(&ranks, w)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn small_exact_case() {
        // differences 1..=5 all positive: W- = 0, p = 2 / 32
        let pairs: Vec<(f64, f64)> = (1..=5).map(|d| (d as f64, 0.0)).collect();
        let r = wilcoxon_signed_rank(&pairs).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!((r.p_value - 0.0625).abs() < 1e-12);
        assert_eq!(r.method, Method::WilcoxonExact);
    }

    #[test]
    fn zero_differences_are_dropped() {
        let r = wilcoxon_signed_rank(&[(1.0, 1.0), (2.0, 1.0), (1.0, 3.0), (5.0, 2.0)]).unwrap();
        // |d| = 1, 2, 3 with signs +, -, +
        assert_eq!(r.statistic, 2.0);
        assert_eq!(r.method, Method::WilcoxonNormal);
        assert_eq!(
            wilcoxon_signed_rank(&[(1.0, 1.0), (2.0, 2.0)]),
            Err(StatsError::AllZeroDifferences)
        );
    }

    #[test]
    fn large_samples_use_normal_approximation() {
        let pairs: Vec<(f64, f64)> = (0..40).map(|i| (i as f64 + if i % 3 == 0 { 2.0 } else { -1.0 }, i as f64)).collect();
        let r = wilcoxon_signed_rank(&pairs).unwrap();
        assert_eq!(r.method, Method::WilcoxonNormal);
        assert!((0.0..=1.0).contains(&r.p_value));
    }

    #[test]
    fn shift_invariance() {
        let mut rng = rng_from_seed(3);
        for _ in 0..100 {
            let n = rng.gen_range(2..20);
            // dyadic values keep the shifted differences exact
            let pairs: Vec<(f64, f64)> = (0..n)
                .map(|_| (rng.gen_range(0..64) as f64 / 8.0, rng.gen_range(0..64) as f64 / 8.0))
                .collect();
            let Ok(base) = wilcoxon_signed_rank(&pairs) else { continue };
            let shifted: Vec<(f64, f64)> = pairs.iter().map(|(a, b)| (a + 3.0, b + 3.0)).collect();
            assert_eq!(wilcoxon_signed_rank(&shifted).unwrap(), base);
        }
    }
}
