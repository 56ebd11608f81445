//! Exact cut gains.
//!
//! Splitting a set with moments `(n, S)` into `(n1, S1)` and `(n2, S2)`
//! reduces its SSE by `‖n2·S1 − n1·S2‖² / (n1·n2·n)`. The numerator and
//! denominator are integers, so two gains can be ordered without rounding;
//! that keeps the greedy tie-breaking rules deterministic.

use std::cmp::Ordering;

use num_bigint::BigUint;

use crate::integral::RegionStats;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct ExactGain {
    diff: [i128; 3],
    n1: u64,
    n2: u64,
}

impl ExactGain {
    pub(crate) fn between(first: &RegionStats, second: &RegionStats) -> Self {
        let (n1, n2) = (first.count, second.count);
        let diff = std::array::from_fn(|c| {
            n2 as i128 * first.sum[c] as i128 - n1 as i128 * second.sum[c] as i128
        });
        Self { diff, n1, n2 }
    }

    #[cfg(test)]
    pub(crate) fn zero() -> Self {
        Self {
            diff: [0; 3],
            n1: 1,
            n2: 1,
        }
    }

    fn is_zero(&self) -> bool {
        self.diff == [0; 3]
    }

    /// `n1·n2·(n1+n2)` fits in 128 bits for any admissible image.
    fn denominator(&self) -> u128 {
        self.n1 as u128 * self.n2 as u128 * (self.n1 + self.n2) as u128
    }

    fn numerator_u128(&self) -> Option<u128> {
        self.diff.iter().try_fold(0u128, |acc, &d| {
            let a = d.unsigned_abs();
            a.checked_mul(a).and_then(|sq| acc.checked_add(sq))
        })
    }

    fn numerator_big(&self) -> BigUint {
        self.diff
            .iter()
            .map(|&d| {
                let a = BigUint::from(d.unsigned_abs());
                &a * &a
            })
            .sum()
    }

    fn approx(&self) -> f64 {
        let num: f64 = self.diff.iter().map(|&d| (d as f64) * (d as f64)).sum();
        num / self.denominator() as f64
    }

    /// Gain in the requested scalar type, as the mean-difference form
    /// `‖μ1 − μ2‖² · n1·n2/n`, which stays in range for `f32`.
    pub(crate) fn value<T: Scalar>(&self) -> T {
        if self.is_zero() {
            return T::zero();
        }
        let n1 = T::from_u64(self.n1).unwrap();
        let n2 = T::from_u64(self.n2).unwrap();
        let n12 = n1 * n2;
        let dist: T = self
            .diff
            .iter()
            .map(|&d| {
                let m = T::from_i128(d).unwrap() / n12;
                m * m
            })
            .sum();
        dist * (n12 / (n1 + n2))
    }

    fn exact_cmp(&self, other: &Self) -> Ordering {
        let (da, db) = (self.denominator(), other.denominator());
        if let (Some(na), Some(nb)) = (self.numerator_u128(), other.numerator_u128()) {
            if let (Some(l), Some(r)) = (na.checked_mul(db), nb.checked_mul(da)) {
                return l.cmp(&r);
            }
        }
        (self.numerator_big() * BigUint::from(db)).cmp(&(other.numerator_big() * BigUint::from(da)))
    }
}

impl Ord for ExactGain {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        let (a, b) = (self.approx(), other.approx());
        // f64 evaluation is accurate to a few ulps; only near-ties need the exact path
        if a > b * (1.0 + 1e-12) {
            Ordering::Greater
        } else if b > a * (1.0 + 1e-12) {
            Ordering::Less
        } else {
            self.exact_cmp(other)
        }
    }
}

impl PartialOrd for ExactGain {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
