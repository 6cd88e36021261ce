//! One-sided Mann-Whitney U with midrank ties: exact permutation
//! enumeration for pooled sizes up to 10, tie-corrected normal
//! approximation with continuity correction beyond that.

use statrs::distribution::{ContinuousCDF, Normal};

use super::StatsError;

/// Pooled-size ceiling for the exact permutation path.
pub const EXACT_LIMIT: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Alternative {
    /// First sample tends greater.
    Greater,
    /// First sample tends less.
    Less,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MwuMethod {
    Exact,
    NormalApprox,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MwuResult {
    /// U statistic of the first sample (midrank ties).
    pub u: f64,
    pub p: f64,
    pub method: MwuMethod,
}

/// Midrank U statistic of sample `a` against sample `b`.
pub fn u_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut pooled: Vec<(f64, bool)> = a
        .iter()
        .map(|&v| (v, true))
        .chain(b.iter().map(|&v| (v, false)))
        .collect();
    pooled.sort_by(|x, y| x.0.total_cmp(&y.0));

    let mut rank_sum_a = 0.0;
    let mut i = 0;
    while i < pooled.len() {
        let mut j = i;
        while j < pooled.len() && pooled[j].0 == pooled[i].0 {
            j += 1;
        }
        // average of the 1-based ranks i+1 ..= j
        let midrank = (i + j + 1) as f64 / 2.0;
        for entry in &pooled[i..j] {
            if entry.1 {
                rank_sum_a += midrank;
            }
        }
        i = j;
    }
    let na = a.len() as f64;
    rank_sum_a - na * (na + 1.0) / 2.0
}

/// One-sided Mann-Whitney U test.
pub fn mann_whitney_one_sided(
    a: &[f64],
    b: &[f64],
    alternative: Alternative,
) -> Result<MwuResult, StatsError> {
    if a.is_empty() || b.is_empty() {
        return Err(StatsError::EmptySample);
    }
    match alternative {
        Alternative::Greater => greater(a, b),
        Alternative::Less => {
            // duality: "a less than b" is exactly "b greater than a"
            let swapped = greater(b, a)?;
            Ok(MwuResult { u: u_statistic(a, b), ..swapped })
        }
    }
}

fn greater(a: &[f64], b: &[f64]) -> Result<MwuResult, StatsError> {
    let u = u_statistic(a, b);
    if a.len() + b.len() <= EXACT_LIMIT {
        Ok(MwuResult { u, p: exact_p_greater(a, b, u), method: MwuMethod::Exact })
    } else {
        Ok(MwuResult { u, p: approx_p_greater(a, b, u), method: MwuMethod::NormalApprox })
    }
}

/// Exact permutation p-value: the fraction of equal-size regroupings of
/// the pooled sample whose U is at least the observed one. Handles ties
/// since U is recomputed with midranks per regrouping.
fn exact_p_greater(a: &[f64], b: &[f64], u_obs: f64) -> f64 {
    let pooled: Vec<f64> = a.iter().chain(b.iter()).copied().collect();
    let n = pooled.len();
    let na = a.len();
    let mut hits = 0usize;
    let mut total = 0usize;
    let mut indices: Vec<usize> = (0..na).collect();
    loop {
        let sa: Vec<f64> = indices.iter().map(|&i| pooled[i]).collect();
        let sb: Vec<f64> = (0..n).filter(|i| !indices.contains(i)).map(|i| pooled[i]).collect();
        total += 1;
        if u_statistic(&sa, &sb) >= u_obs - 1e-9 {
            hits += 1;
        }
        // next combination in lexicographic order
        let mut k = na;
        loop {
            if k == 0 {
                return hits as f64 / total as f64;
            }
            k -= 1;
            if indices[k] != k + n - na {
                break;
            }
        }
        indices[k] += 1;
        for j in k + 1..na {
            indices[j] = indices[j - 1] + 1;
        }
    }
}

/// Normal approximation with tie-corrected variance and a 0.5 continuity
/// correction.
fn approx_p_greater(a: &[f64], b: &[f64], u: f64) -> f64 {
    let na = a.len() as f64;
    let nb = b.len() as f64;
    let n = na + nb;
    let mean = na * nb / 2.0;

    let mut pooled: Vec<f64> = a.iter().chain(b.iter()).copied().collect();
    pooled.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < pooled.len() {
        let mut j = i;
        while j < pooled.len() && pooled[j] == pooled[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        i = j;
    }
    let var = na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if var <= 0.0 {
        // fully tied pooled sample carries no ordering evidence
        return 0.5;
    }
    let z = (u - mean - 0.5) / var.sqrt();
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    1.0 - normal.cdf(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frozen_exact_case() {
        // independent enumeration oracle: U = 6, p = 1/10
        let r = mann_whitney_one_sided(&[1.0, 2.0, 3.0], &[0.0, 0.0], Alternative::Greater).unwrap();
        assert_eq!(r.method, MwuMethod::Exact);
        assert_eq!(r.u, 6.0);
        assert!((r.p - 0.1).abs() < 1e-12);
    }

    #[test]
    fn more_frozen_exact_cases() {
        // oracle: [1,4,6] vs [2,3,5]: U = 5, p = 1/2
        let r = mann_whitney_one_sided(&[1.0, 4.0, 6.0], &[2.0, 3.0, 5.0], Alternative::Greater)
            .unwrap();
        assert_eq!(r.u, 5.0);
        assert!((r.p - 0.5).abs() < 1e-12);
        // oracle: [3,4] vs [1,2,5]: U = 4, p = 2/5
        let r = mann_whitney_one_sided(&[3.0, 4.0], &[1.0, 2.0, 5.0], Alternative::Greater).unwrap();
        assert_eq!(r.u, 4.0);
        assert!((r.p - 0.4).abs() < 1e-12);
    }

    #[test]
    fn identical_samples_sit_near_half() {
        let a = [1.0, 2.0, 3.0];
        let r = mann_whitney_one_sided(&a, &a, Alternative::Greater).unwrap();
        assert!(r.p >= 0.5 && r.p <= 1.0, "p = {}", r.p);
    }

    #[test]
    fn duality_is_bit_exact() {
        let a = [0.3, 0.9, 1.4, 0.2];
        let b = [0.5, 0.1, 0.8];
        let fwd = mann_whitney_one_sided(&a, &b, Alternative::Greater).unwrap();
        let rev = mann_whitney_one_sided(&b, &a, Alternative::Less).unwrap();
        assert_eq!(fwd.p, rev.p);
        // and on a larger sample through the approximation path
        let big_a: Vec<f64> = (0..30).map(|i| (i as f64 * 7.3) % 5.0).collect();
        let big_b: Vec<f64> = (0..25).map(|i| (i as f64 * 3.1) % 4.0).collect();
        let fwd = mann_whitney_one_sided(&big_a, &big_b, Alternative::Greater).unwrap();
        let rev = mann_whitney_one_sided(&big_b, &big_a, Alternative::Less).unwrap();
        assert_eq!(fwd.method, MwuMethod::NormalApprox);
        assert_eq!(fwd.p, rev.p);
    }

    #[test]
    fn u_sum_identity() {
        let a = [0.3, 0.9, 1.4, 0.2, 0.9];
        let b = [0.5, 0.1, 0.9];
        let ua = u_statistic(&a, &b);
        let ub = u_statistic(&b, &a);
        assert_eq!(ua + ub, (a.len() * b.len()) as f64);
    }

    #[test]
    fn empty_sample_is_an_error() {
        assert!(matches!(
            mann_whitney_one_sided(&[], &[1.0], Alternative::Greater),
            Err(StatsError::EmptySample)
        ));
    }

    #[test]
    fn approximation_tracks_exact_for_small_tie_free() {
        // tolerance from the acceptance criterion: 0.03 absolute
        let cases = [
            (vec![1.0, 3.0, 5.0, 7.0], vec![2.0, 4.0, 6.0, 8.0]),
            (vec![10.0, 11.0, 1.0, 2.0, 3.5], vec![4.0, 5.0, 6.0, 7.0, 8.0]),
        ];
        for (a, b) in cases {
            let u = u_statistic(&a, &b);
            let exact = exact_p_greater(&a, &b, u);
            let approx = approx_p_greater(&a, &b, u);
            assert!((exact - approx).abs() < 0.03, "exact {exact} vs approx {approx}");
        }
    }

    #[test]
    fn fully_tied_approximation_returns_half() {
        let a = vec![2.0; 8];
        let b = vec![2.0; 8];
        let r = mann_whitney_one_sided(&a, &b, Alternative::Greater).unwrap();
        assert_eq!(r.p, 0.5);
    }
}
