//! Summary statistics and distances between empirical measures.

use crate::matrix::dot;
use crate::random::{trial_rng, uniform_sphere};

/// Neumaier's compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut acc = Neumaier::default();
    xs.into_iter().for_each(|x| acc.add(x));
    acc.value()
}

/// Sample mean and standard error of the mean.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub stderr: f64,
}

pub fn mean_and_stderr(xs: &[f64]) -> MeanEstimate {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return MeanEstimate { mean: f64::NAN, stderr: f64::NAN };
    }
    let mean = compensated_sum(xs.iter().copied()) / n;
    if xs.len() < 2 {
        return MeanEstimate { mean, stderr: 0.0 };
    }
    let var = compensated_sum(xs.iter().map(|x| (x - mean).powi(2))) / (n - 1.0);
    MeanEstimate { mean, stderr: (var / n).sqrt() }
}

/// Kolmogorov–Smirnov statistic of samples in `[0, 1)` against the uniform law.
pub fn ks_uniform(samples: &[f64]) -> f64 {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let x = x.clamp(0.0, 1.0);
            ((i + 1) as f64 / n - x).max(x - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

/// Wasserstein-1 distance between two empirical measures on the circle
/// `ℝ / period·ℤ` (arc-length metric).
///
/// With `D(t) = F_a(t) − F_b(t)` the difference of distribution functions
/// on `[0, period)`, `W₁ = min_m ∫ |D(t) − m| dt`; the minimizer is a
/// weighted median of the values of `D`.
pub fn circle_w1(a: &[f64], b: &[f64], period: f64) -> f64 {
    let wrap = |x: f64| {
        let r = x.rem_euclid(period);
        if r >= period { 0.0 } else { r }
    };
    let (wa, wb) = (1.0 / a.len() as f64, 1.0 / b.len() as f64);
    let mut events: Vec<(f64, f64)> = a
        .iter()
        .map(|&x| (wrap(x), wa))
        .chain(b.iter().map(|&x| (wrap(x), -wb)))
        .collect();
    events.sort_by(|x, y| x.0.total_cmp(&y.0));

    // Pieces (value of D, length) over [0, period).
    let mut pieces: Vec<(f64, f64)> = Vec::with_capacity(events.len() + 1);
    let mut level = Neumaier::default();
    let mut t = 0.0;
    for &(x, w) in &events {
        if x > t {
            pieces.push((level.value(), x - t));
            t = x;
        }
        level.add(w);
    }
    pieces.push((level.value(), period - t));

    let mut sorted = pieces.clone();
    sorted.sort_by(|x, y| x.0.total_cmp(&y.0));
    let half = period / 2.0;
    let mut acc = 0.0;
    let mut median = sorted[0].0;
    for &(v, len) in &sorted {
        acc += len;
        median = v;
        if acc >= half {
            break;
        }
    }
    compensated_sum(pieces.iter().map(|&(v, len)| (v - median).abs() * len))
}

/// Mean of `|E_a f − E_b f|` over `count` seeded test functions
/// `f(x) = |⟨u, x⟩|` with `u` uniform on the sphere (each 1-Lipschitz for `δ`
/// up to sign choice of representatives).
pub fn lipschitz_discrepancy(a: &[Vec<f64>], b: &[Vec<f64>], seed: u64, count: usize) -> f64 {
    let dim = a.first().or(b.first()).map_or(0, Vec::len);
    let mut rng = trial_rng(seed, 0);
    let probes: Vec<Vec<f64>> = (0..count).map(|_| uniform_sphere(&mut rng, dim)).collect();
    let expect = |pts: &[Vec<f64>], u: &[f64]| {
        compensated_sum(pts.iter().map(|x| dot(u, x).abs())) / pts.len() as f64
    };
    let total = compensated_sum(probes.iter().map(|u| (expect(a, u) - expect(b, u)).abs()));
    total / count as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn neumaier_recovers_cancellation() {
        let xs = [1e100, 1.0, -1e100];
        assert_eq!(compensated_sum(xs), 1.0);
        assert_eq!(xs.iter().sum::<f64>(), 0.0);
    }

    #[test]
    fn mean_stderr() {
        let e = mean_and_stderr(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(e.mean, 2.5);
        assert!((e.stderr - (5.0f64 / 12.0).sqrt()).abs() < 1e-15);
        assert_eq!(mean_and_stderr(&[7.0]).stderr, 0.0);
    }

    #[test]
    fn ks_examples() {
        let n = 1000;
        let grid: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        assert!((ks_uniform(&grid) - 0.5 / n as f64).abs() < 1e-15);
        assert_eq!(ks_uniform(&[0.0; 10]), 1.0);
    }

    #[test]
    fn w1_examples() {
        // Point masses at distance 0.3 and the wrap-around distance.
        assert!((circle_w1(&[0.1], &[0.4], 1.0) - 0.3).abs() < 1e-15);
        assert!((circle_w1(&[0.05], &[0.95], 1.0) - 0.1).abs() < 1e-15);
        // Rotation of an evenly spaced cloud by half a spacing.
        let n = 100;
        let a: Vec<f64> = (0..n).map(|i| i as f64 / n as f64).collect();
        let b: Vec<f64> = a.iter().map(|x| x + 0.5 / n as f64).collect();
        assert!((circle_w1(&a, &b, 1.0) - 0.5 / n as f64).abs() < 1e-12);
        assert!(circle_w1(&a, &a, 1.0) < 1e-15);
    }

    /// Brute-force oracle: for equal masses on the circle some cyclic shift
    /// of the sorted samples is an optimal matching.
    fn matching_w1(a: &[f64], b: &[f64], period: f64) -> f64 {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        let n = a.len();
        (0..n)
            .map(|shift| {
                (0..n)
                    .map(|i| {
                        let d = (a[i] - b[(i + shift) % n]).abs();
                        d.min(period - d)
                    })
                    .sum::<f64>()
            })
            .fold(f64::INFINITY, f64::min)
            / n as f64
    }

    proptest! {
        #[test]
        fn w1_matches_matching_oracle(
            a in prop::collection::vec(0.0f64..1.0, 1..7),
            shift in 0.0f64..1.0,
            noise in prop::collection::vec(0.0f64..0.2, 7),
        ) {
            let b: Vec<f64> = a.iter().zip(&noise).map(|(x, e)| (x + shift + e) % 1.0).collect();
            let w = circle_w1(&a, &b, 1.0);
            let oracle = matching_w1(&a, &b, 1.0);
            prop_assert!(w <= oracle + 1e-12, "{} > {}", w, oracle);
            prop_assert!((w - oracle).abs() < 1e-9, "{} vs {}", w, oracle);
        }
    }

    #[test]
    fn discrepancy_zero_on_identical_clouds() {
        let a = vec![vec![1.0, 0.0, 0.0], vec![0.0, 0.6, 0.8]];
        assert_eq!(lipschitz_discrepancy(&a, &a, 3, 64), 0.0);
        let b = vec![vec![0.0, 0.0, 1.0], vec![0.0, 0.6, 0.8]];
        assert!(lipschitz_discrepancy(&a, &b, 3, 64) > 0.0);
    }
}
