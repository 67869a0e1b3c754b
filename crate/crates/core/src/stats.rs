//! Small statistical helpers shared by the experiment drivers and the
//! acceptance checks.

use crate::numerics::std_normal_cdf;

/// Two-sided one-sample Kolmogorov-Smirnov statistic against the standard
/// normal distribution.
pub fn ks_statistic_std_normal(sample: &[f64]) -> f64 {
    ks_statistic(sample, std_normal_cdf)
}

/// Two-sided one-sample Kolmogorov-Smirnov statistic against `cdf`.
pub fn ks_statistic(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = sample.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d
            .max(((i + 1) as f64 / n - f).abs())
            .max((i as f64 / n - f).abs());
    }
    d
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn ks_statistic_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(|p, q| p.partial_cmp(q).unwrap());
    ys.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let (na, nb) = (xs.len() as f64, ys.len() as f64);
    let mut i = 0usize;
    let mut j = 0usize;
    let mut d: f64 = 0.0;
    while i < xs.len() && j < ys.len() {
        let x = xs[i];
        let y = ys[j];
        if x <= y {
            i += 1;
        }
        if y <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Median of a sample (average of the two central order statistics for even
/// sizes). Panics on an empty slice.
pub fn median(sample: &[f64]) -> f64 {
    assert!(!sample.is_empty(), "median of an empty sample");
    let mut xs = sample.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

pub fn mean(sample: &[f64]) -> f64 {
    sample.iter().sum::<f64>() / sample.len() as f64
}

pub fn variance(sample: &[f64]) -> f64 {
    let m = mean(sample);
    sample.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / sample.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_of_exact_quantiles_is_small() {
        // points at φ^{-1}((i-1/2)/n) give D = 1/(2n)
        let n = 100usize;
        let sample: Vec<f64> = (0..n)
            .map(|i| {
                let p = (i as f64 + 0.5) / n as f64;
                // bisection inverse of φ
                let (mut lo, mut hi) = (-10.0, 10.0);
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    if std_normal_cdf(mid) < p {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            })
            .collect();
        let d = ks_statistic_std_normal(&sample);
        assert!((d - 0.5 / n as f64).abs() < 1e-6, "D = {d}");
    }

    #[test]
    fn two_sample_ks_identical_and_disjoint() {
        let xs = vec![1.0, 2.0, 3.0, 4.0];
        let ys = vec![4.0, 3.0, 2.0, 1.0];
        assert_eq!(ks_statistic_two_sample(&xs, &ys), 0.0);
        let zs = vec![10.0, 11.0, 12.0];
        assert_eq!(ks_statistic_two_sample(&xs, &zs), 1.0);
        // hand case: D = 0.25
        let a = vec![1.0, 1.0, 4.0, 4.0];
        let b = vec![1.0, 1.0, 1.0, 4.0];
        assert!((ks_statistic_two_sample(&a, &b) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn median_odd_even() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
