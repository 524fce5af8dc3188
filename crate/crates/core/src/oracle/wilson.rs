//! Wilson score interval for a binomial proportion: robust near 0 and 1,
//! where the normal approximation collapses. For zero observed hits the
//! lower end is exactly 0 and the upper end is the Wilson limit.

/// Two-sided 99% normal quantile Φ⁻¹(0.995).
pub const Z_99: f64 = 2.575_829_303_548_900_4;

/// Wilson score interval for `hits` successes out of `samples` trials at
/// normal quantile `z`.
pub fn wilson_interval(hits: u64, samples: u64, z: f64) -> (f64, f64) {
    assert!(samples > 0, "wilson interval needs at least one sample");
    let n = samples as f64;
    let p_hat = hits as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = p_hat + z2 / (2.0 * n);
    let radius = z * (p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * n)).sqrt();
    let mut lo = ((center - radius) / denom).max(0.0);
    let mut hi = ((center + radius) / denom).min(1.0);
    if hits == 0 {
        lo = 0.0;
    }
    if hits == samples {
        hi = 1.0;
    }
    (lo, hi)
}
