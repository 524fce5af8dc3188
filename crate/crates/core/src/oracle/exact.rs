//! Exact binomial tail probabilities by log-domain summation.
//!
//! Masses are accumulated with a streaming log-sum-exp over the iterative
//! recurrence ln pmf(k+1) = ln pmf(k) + ln((n−k)/(k+1)) + ln(p/(1−p)), which
//! keeps the computation O(n) and stable at n = 10⁶. Summation breaks off
//! once the remaining terms are below e^{−60} of the running maximum, far
//! under f64 resolution of the total.

use crate::model::Direction;
use crate::oracle::OracleError;

/// Terms this far (in nats) below the running max cannot move the sum.
const NEGLIGIBLE_LOG_GAP: f64 = 60.0;

/// Compensated (Kahan) accumulator. The tail sums walk O(n) terms; naive
/// accumulation drifts past the 1e-12 mass-conservation contract by n = 10⁴.
#[derive(Clone, Copy, Default)]
struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    fn new(x: f64) -> Self {
        KahanSum { sum: x, carry: 0.0 }
    }

    fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum
    }
}

/// ln C(n, k) as a compensated sum of logs over min(k, n−k) terms.
fn ln_choose(n: u64, k: u64) -> f64 {
    let m = k.min(n - k);
    let mut acc = KahanSum::default();
    for i in 0..m {
        acc.add(((n - i) as f64 / (i + 1) as f64).ln());
    }
    acc.value()
}

struct LogSum {
    max: f64,
    acc: KahanSum,
}

impl LogSum {
    fn new(first: f64) -> Self {
        LogSum {
            max: first,
            acc: KahanSum::new(1.0),
        }
    }

    fn push(&mut self, lp: f64) {
        if lp > self.max {
            let scale = (self.max - lp).exp();
            let rescaled = self.acc.value() * scale;
            self.acc = KahanSum::new(rescaled);
            self.acc.add(1.0);
            self.max = lp;
        } else {
            self.acc.add((lp - self.max).exp());
        }
    }

    fn value(&self) -> f64 {
        (self.max + self.acc.value().ln()).exp()
    }
}

/// Pr(X ≥ k) for X ~ Binomial(n, p).
fn upper_tail(n: u64, p: f64, k: u64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if k > n {
        return 0.0;
    }
    if p == 0.0 {
        return 0.0; // k >= 1 here
    }
    if p == 1.0 {
        return 1.0;
    }
    let log_ratio = p.ln() - (-p).ln_1p();
    let mut lp = KahanSum::new(ln_choose(n, k) + k as f64 * p.ln() + (n - k) as f64 * (-p).ln_1p());
    let mut sum = LogSum::new(lp.value());
    let mode = n as f64 * p;
    for j in k..n {
        lp.add(((n - j) as f64 / (j + 1) as f64).ln() + log_ratio);
        sum.push(lp.value());
        if (j + 1) as f64 > mode && lp.value() < sum.max - NEGLIGIBLE_LOG_GAP {
            break;
        }
    }
    sum.value().min(1.0)
}

/// Pr(X ≤ k) for X ~ Binomial(n, p).
fn lower_tail(n: u64, p: f64, k: u64) -> f64 {
    if k >= n {
        return 1.0;
    }
    if p == 0.0 {
        return 1.0;
    }
    if p == 1.0 {
        return 0.0; // k < n here
    }
    let log_ratio = p.ln() - (-p).ln_1p();
    let mut lp = KahanSum::new(ln_choose(n, k) + k as f64 * p.ln() + (n - k) as f64 * (-p).ln_1p());
    let mut sum = LogSum::new(lp.value());
    let mode = n as f64 * p;
    for j in (1..=k).rev() {
        // pmf(j-1) = pmf(j) * j / ((n-j+1) * ratio)
        lp.add((j as f64 / (n - j + 1) as f64).ln() - log_ratio);
        sum.push(lp.value());
        if ((j - 1) as f64) < mode && lp.value() < sum.max - NEGLIGIBLE_LOG_GAP {
            break;
        }
    }
    sum.value().min(1.0)
}

/// Exact tail probability of Binomial(n, p) at integer level k.
///
/// `Upper` is Pr(X ≥ k), `Lower` is Pr(X ≤ k), and `TwoSided` is
/// Pr(|X − np| ≥ |k − np|) (both tails at the same absolute deviation from
/// the mean, clamped to 1). Deterministic; no sampling involved.
pub fn exact_binomial_tail(
    n: u64,
    p: f64,
    k: u64,
    direction: Direction,
) -> Result<f64, OracleError> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(OracleError::InvalidProbability(p));
    }
    if k > n {
        return Err(OracleError::LevelOutOfRange { k, n });
    }
    Ok(match direction {
        Direction::Upper => upper_tail(n, p, k),
        Direction::Lower => lower_tail(n, p, k),
        Direction::TwoSided => {
            // Keep k itself as the level for its own side of the mean, so no
            // float round trip can drop the k-th mass term; only the mirrored
            // side is derived (as 2np − k, with float semantics).
            let mean = n as f64 * p;
            let kf = k as f64;
            let mirrored = 2.0 * mean - kf;
            let (hi_level, lo_level) = if kf >= mean {
                (kf, mirrored)
            } else {
                (mirrored.ceil(), kf)
            };
            let upper = if hi_level > n as f64 {
                0.0
            } else {
                upper_tail(n, p, hi_level as u64)
            };
            let lower = if lo_level < 0.0 {
                0.0
            } else {
                lower_tail(n, p, lo_level.floor() as u64)
            };
            (upper + lower).min(1.0)
        }
    })
}

/// Pr(X ≥ level) (or ≤) at a possibly fractional level, rounded to the
/// equivalent integer event for integer-valued X.
pub fn exact_binomial_tail_at(
    n: u64,
    p: f64,
    level: f64,
    direction: Direction,
) -> Result<f64, OracleError> {
    match direction {
        Direction::Upper => {
            let k = level.ceil().max(0.0);
            if k > n as f64 {
                return Ok(0.0);
            }
            exact_binomial_tail(n, p, k as u64, Direction::Upper)
        }
        Direction::Lower => {
            let k = level.floor();
            if k < 0.0 {
                return Ok(0.0);
            }
            exact_binomial_tail(n, p, k.min(n as f64) as u64, Direction::Lower)
        }
        Direction::TwoSided => {
            // Level interpreted as a deviation target around the mean; both
            // tails at that deviation. The given level keeps its own side so
            // no float round trip shifts it; the other side is mirrored.
            let mean = n as f64 * p;
            let mirrored = 2.0 * mean - level;
            let (hi, lo) = if level >= mean {
                (level, mirrored)
            } else {
                (mirrored, level)
            };
            let upper = exact_binomial_tail_at(n, p, hi, Direction::Upper)?;
            let lower = exact_binomial_tail_at(n, p, lo, Direction::Lower)?;
            Ok((upper + lower).min(1.0))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_summed_small_case() {
        // C(10,8)+C(10,9)+C(10,10) = 45+10+1 = 56 over 2^10.
        let v = exact_binomial_tail(10, 0.5, 8, Direction::Upper).unwrap();
        assert!((v - 56.0 / 1024.0).abs() / (56.0 / 1024.0) < 1e-13);
    }

    #[test]
    fn zero_level_is_certain() {
        assert_eq!(
            exact_binomial_tail(17, 0.3, 0, Direction::Upper).unwrap(),
            1.0
        );
        assert_eq!(
            exact_binomial_tail(1_000_000, 1e-4, 0, Direction::Upper).unwrap(),
            1.0
        );
    }

    #[test]
    fn tails_sum_to_one() {
        for &(n, p) in &[(10u64, 0.5f64), (100, 0.1), (1000, 0.37), (10_000, 0.5)] {
            for frac in [0.1, 0.45, 0.5, 0.9] {
                let k = ((n as f64 * frac).round() as u64).clamp(1, n);
                let up = exact_binomial_tail(n, p, k, Direction::Upper).unwrap();
                let lo = exact_binomial_tail(n, p, k - 1, Direction::Lower).unwrap();
                assert!(
                    (up + lo - 1.0).abs() < 1e-12,
                    "n={n} p={p} k={k}: {up} + {lo}"
                );
            }
        }
    }

    #[test]
    fn large_n_sum_to_one() {
        let n = 1_000_000u64;
        let p = 1e-4;
        let up = exact_binomial_tail(n, p, 100, Direction::Upper).unwrap();
        let lo = exact_binomial_tail(n, p, 99, Direction::Lower).unwrap();
        assert!((up + lo - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_probabilities() {
        assert_eq!(
            exact_binomial_tail(5, 0.0, 1, Direction::Upper).unwrap(),
            0.0
        );
        assert_eq!(
            exact_binomial_tail(5, 0.0, 0, Direction::Upper).unwrap(),
            1.0
        );
        assert_eq!(
            exact_binomial_tail(5, 1.0, 5, Direction::Upper).unwrap(),
            1.0
        );
        assert_eq!(
            exact_binomial_tail(5, 1.0, 4, Direction::Lower).unwrap(),
            0.0
        );
        assert!(exact_binomial_tail(5, 1.5, 0, Direction::Upper).is_err());
        assert!(exact_binomial_tail(5, 0.5, 6, Direction::Upper).is_err());
    }

    #[test]
    fn two_sided_symmetric_case() {
        // Binomial(10, 1/2) at k = 8: Pr[X>=8] + Pr[X<=2] = 2 * 56/1024.
        let v = exact_binomial_tail(10, 0.5, 8, Direction::TwoSided).unwrap();
        assert!((v - 112.0 / 1024.0).abs() < 1e-13);
    }

    #[test]
    fn fractional_levels_round_to_integer_events() {
        let a = exact_binomial_tail_at(50, 0.5, 37.5, Direction::Upper).unwrap();
        let b = exact_binomial_tail(50, 0.5, 38, Direction::Upper).unwrap();
        assert_eq!(a, b);
        let a = exact_binomial_tail_at(50, 0.5, 12.5, Direction::Lower).unwrap();
        let b = exact_binomial_tail(50, 0.5, 12, Direction::Lower).unwrap();
        assert_eq!(a, b);
    }
}
