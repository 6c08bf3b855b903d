//! Small statistics helpers shared by the samplers' distribution tests and
//! the Monte Carlo harness: Kolmogorov–Smirnov statistics with asymptotic
//! thresholds, and mean / standard-error summaries.

/// One-sample Kolmogorov–Smirnov statistic `D_n = sup |F_n − F|` against the
/// continuous CDF `cdf`. Sorts `samples` in place.
pub fn ks_statistic_one_sample<F: Fn(f64) -> f64>(samples: &mut [f64], cdf: F) -> f64 {
    let n = samples.len();
    assert!(n > 0, "KS statistic needs at least one sample");
    samples.sort_by(f64::total_cmp);
    let nf = n as f64;
    let mut d = 0.0f64;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        let lower = f - i as f64 / nf;
        let upper = (i + 1) as f64 / nf - f;
        d = d.max(lower.max(upper));
    }
    d
}

/// Two-sample Kolmogorov–Smirnov statistic `sup |F_n − G_m|`. Sorts both
/// slices in place.
pub fn ks_statistic_two_sample(a: &mut [f64], b: &mut [f64]) -> f64 {
    assert!(!a.is_empty() && !b.is_empty(), "KS statistic needs non-empty samples");
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

/// Critical value `c(α) = √(ln(2/α)/2)` of the asymptotic Kolmogorov
/// distribution.
#[must_use]
fn ks_critical(alpha: f64) -> f64 {
    ((2.0 / alpha).ln() / 2.0).sqrt()
}

/// Asymptotic one-sample KS threshold at significance `alpha`: reject when
/// `D_n > c(α)/√n`.
#[must_use]
pub fn ks_threshold_one_sample(n: usize, alpha: f64) -> f64 {
    ks_critical(alpha) / (n as f64).sqrt()
}

/// Asymptotic two-sample KS threshold at significance `alpha`: reject when
/// `D > c(α)·√((n+m)/(n·m))`.
#[must_use]
pub fn ks_threshold_two_sample(n: usize, m: usize, alpha: f64) -> f64 {
    let (n, m) = (n as f64, m as f64);
    ks_critical(alpha) * ((n + m) / (n * m)).sqrt()
}

/// Sample mean and standard error of the mean (`s/√n`, with the unbiased
/// sample variance). The standard error is `0` for a single observation.
#[must_use]
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    assert!(!xs.is_empty(), "mean of an empty sample");
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
