//! Finite sets of `N` standing in for "for all N" quantifiers.

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::arithmetic::Rat;

/// Every `N <= dense_to`, `log_samples` log-spaced points above that, and
/// optionally the checkpoints `N_j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub dense_to: u64,
    pub log_samples: usize,
    pub include_checkpoints: bool,
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule {
            dense_to: 10_000,
            log_samples: 64,
            include_checkpoints: true,
        }
    }
}

/// `floor(2^t)` for `t >= 0`, deterministic across platforms.
fn pow2_real(t: f64) -> BigInt {
    let e = t.floor();
    let m = (2f64.powf(t - e) * (1u64 << 52) as f64).round() as u64;
    (BigInt::from(m) << e as u64) >> 52u32
}

/// `count` log-spaced integers strictly between `lo` and `hi`.
pub fn log_spaced(lo: &BigInt, hi: &BigInt, count: usize) -> Vec<BigInt> {
    if count == 0 || hi <= lo || lo < &BigInt::one() {
        return Vec::new();
    }
    let a = Rat::from_integer(lo.clone()).log2_estimate();
    let b = Rat::from_integer(hi.clone()).log2_estimate();
    let mut out: Vec<BigInt> = (1..=count)
        .map(|i| pow2_real(a + (b - a) * i as f64 / (count + 1) as f64))
        .filter(|n| n > lo && n < hi)
        .collect();
    out.dedup();
    out
}

impl Schedule {
    /// Points in `[1, upto]`: the dense range, the log samples, the
    /// checkpoints (if enabled) and `extra`, sorted and deduplicated.
    pub fn points(&self, upto: &BigInt, checkpoints: &[BigInt], extra: &[BigInt]) -> Vec<BigInt> {
        let one = BigInt::one();
        if upto < &one {
            return Vec::new();
        }
        let dense = BigInt::from(self.dense_to).min(upto.clone());
        let dense_u = u64::try_from(&dense).unwrap_or(self.dense_to);
        let mut pts: Vec<BigInt> = (1..=dense_u).map(BigInt::from).collect();
        pts.extend(log_spaced(&dense, upto, self.log_samples));
        if self.include_checkpoints {
            pts.extend(checkpoints.iter().cloned());
        }
        pts.extend(extra.iter().cloned());
        pts.retain(|n| n >= &one && n <= upto);
        pts.sort();
        pts.dedup();
        pts
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_are_sorted_and_bounded() {
        let s = Schedule {
            dense_to: 10,
            log_samples: 5,
            include_checkpoints: true,
        };
        let upto = BigInt::one() << 200u32;
        let pts = s.points(
            &upto,
            &[BigInt::from(65)],
            &[BigInt::from(7), upto.clone() + 1],
        );
        assert_eq!(pts.len(), 10 + 5 + 1);
        assert!(pts.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(pts.last().unwrap().bits(), 168);
        let short = s.points(&BigInt::from(5), &[], &[]);
        assert_eq!(short.len(), 5);
    }
}
