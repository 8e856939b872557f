//! Sample statistics for the verification checks.

/// Sample mean and standard error of the mean (`s / sqrt(n)`, with the
/// unbiased sample deviation). A single sample has zero error.
pub fn mean_se(samples: &[f64]) -> (f64, f64) {
    let n = samples.len();
    assert!(n > 0, "no samples");
    let mean = samples.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// `H_k = 1 + 1/2 + ... + 1/k`, with `H_0 = 0`.
pub fn harmonic(k: u64) -> f64 {
    (1..=k).map(|i| 1.0 / i as f64).sum()
}
