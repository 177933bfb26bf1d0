//! Small statistics helpers used by the experiments: least-squares lines, rank
//! correlation, and ensemble summaries.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Ordinary least squares `y = slope * x + intercept`. `None` with fewer than two
/// distinct abscissae.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<LinearFit> {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    if n < 2 {
        return None;
    }
    let mx = mean(xs);
    let my = mean(ys);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy) / (sxx * syy)
    };
    Some(LinearFit {
        slope,
        intercept,
        r_squared,
        points: n,
    })
}

/// Least squares through the origin `y = c * f(x)`; returns `(c, residual sum of squares)`.
pub fn fit_through_origin(fx: &[f64], ys: &[f64]) -> (f64, f64) {
    let sff: f64 = fx.iter().map(|f| f * f).sum();
    let sfy: f64 = fx.iter().zip(ys).map(|(f, y)| f * y).sum();
    let c = if sff == 0.0 { 0.0 } else { sfy / sff };
    let rss = fx.iter().zip(ys).map(|(f, y)| (y - c * f).powi(2)).sum();
    (c, rss)
}

/// Akaike information criterion of a Gaussian least-squares fit with `params`
/// parameters. A perfect fit gives negative infinity.
pub fn aic(rss: f64, n: usize, params: usize) -> f64 {
    let n = n as f64;
    n * (rss / n).ln() + 2.0 * params as f64
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (n - 1 denominator); zero for fewer than two samples.
pub fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

pub fn standard_error(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    sample_std(xs) / (xs.len() as f64).sqrt()
}

/// Binomial frequency and its standard error `sqrt(p (1 - p) / n)`.
pub fn binomial_estimate(successes: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (f64::NAN, f64::NAN);
    }
    let p = successes as f64 / trials as f64;
    (p, (p * (1.0 - p) / trials as f64).sqrt())
}

pub fn median(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Average ranks (1-based), ties share their mean rank.
pub fn ranks(xs: &[f64]) -> Vec<f64> {
    let order: Vec<usize> = (0..xs.len())
        .sorted_by(|&a, &b| xs[a].total_cmp(&xs[b]))
        .collect();
    let mut out = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            out[k] = rank;
        }
        i = j + 1;
    }
    out
}

pub fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let mx = mean(xs);
    let my = mean(ys);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 || syy == 0.0 {
        return 0.0;
    }
    sxy / (sxx * syy).sqrt()
}

pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    pearson(&ranks(xs), &ranks(ys))
}

/// Spearman correlation with a one-sided exact permutation p-value for a negative
/// trend: the fraction of orderings of `ys` whose correlation is at most the
/// observed one. Exact enumeration, so keep `n <= 9`.
pub fn spearman_decreasing_test(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    assert!(xs.len() <= 9, "exact permutation test limited to 9 points");
    let rho = spearman(xs, ys);
    let rx = ranks(xs);
    let ry = ranks(ys);
    let mut hits = 0usize;
    let mut total = 0usize;
    for perm in ry.iter().copied().permutations(ry.len()) {
        total += 1;
        if pearson(&rx, &perm) <= rho + 1e-12 {
            hits += 1;
        }
    }
    (rho, hits as f64 / total as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 - 0.5 * x).collect();
        let fit = linear_fit(&xs, &ys).unwrap();
        assert!((fit.slope + 0.5).abs() < 1e-15);
        assert!((fit.intercept - 2.0).abs() < 1e-15);
        assert!((fit.r_squared - 1.0).abs() < 1e-15);
        assert!(linear_fit(&[1.0, 1.0], &[0.0, 2.0]).is_none());
    }

    #[test]
    fn ranks_with_ties() {
        assert_eq!(ranks(&[3.0, 1.0, 3.0, 2.0]), vec![3.5, 1.0, 3.5, 2.0]);
    }

    #[test]
    fn perfectly_decreasing_five_points() {
        let xs = [0.0, 1.0, 2.0, 3.0, 4.0];
        let ys = [9.0, 7.0, 4.0, 2.0, 1.0];
        let (rho, p) = spearman_decreasing_test(&xs, &ys);
        assert_eq!(rho, -1.0);
        assert!((p - 1.0 / 120.0).abs() < 1e-15);
    }

    #[test]
    fn binomial_degenerate() {
        assert_eq!(binomial_estimate(10, 10), (1.0, 0.0));
        assert_eq!(binomial_estimate(0, 10), (0.0, 0.0));
    }

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
