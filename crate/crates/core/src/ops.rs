//! Arithmetic operation tallies.
//!
//! Counting conventions shared by all compressors (only floating point work
//! on sample values and coefficients is counted; loop counters and integer
//! index arithmetic are free, as are table lookups of precomputed constants
//! such as FFT twiddles):
//!
//! | operation                           | charged as                 |
//! |-------------------------------------|----------------------------|
//! | tolerance check `|e| <= eps`        | 1 sub (residual) + 1 cmp   |
//! | slope between two samples           | 1 sub + 1 div              |
//! | line evaluation `v0 + slope * dt`   | 1 mul + 1 add              |
//! | running max / argmax update         | 1 cmp                      |
//! | complex multiply                    | 4 mul + 1 add + 1 sub      |
//! | complex add / sub                   | 2 add / 2 sub              |
//! | polynomial evaluation (Horner, p)   | p mul + p add              |
//! | AR one-step prediction (order p)    | p mul + (p - 1) add        |

use std::iter::Sum;
use std::ops::{Add, AddAssign};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct OpCount {
    pub add: u64,
    pub sub: u64,
    pub mul: u64,
    pub div: u64,
    pub cmp: u64,
}

impl OpCount {
    pub const ZERO: OpCount = OpCount {
        add: 0,
        sub: 0,
        mul: 0,
        div: 0,
        cmp: 0,
    };

    pub fn new(add: u64, sub: u64, mul: u64, div: u64, cmp: u64) -> Self {
        Self {
            add,
            sub,
            mul,
            div,
            cmp,
        }
    }

    #[inline]
    pub fn add(&mut self, n: u64) {
        self.add += n;
    }

    #[inline]
    pub fn sub(&mut self, n: u64) {
        self.sub += n;
    }

    #[inline]
    pub fn mul(&mut self, n: u64) {
        self.mul += n;
    }

    #[inline]
    pub fn div(&mut self, n: u64) {
        self.div += n;
    }

    #[inline]
    pub fn cmp(&mut self, n: u64) {
        self.cmp += n;
    }

    /// One tolerance check: residual subtraction plus the comparison.
    #[inline]
    pub fn tolerance_check(&mut self) {
        self.sub += 1;
        self.cmp += 1;
    }

    #[inline]
    pub fn complex_mul(&mut self) {
        self.mul += 4;
        self.add += 1;
        self.sub += 1;
    }

    pub fn total(&self) -> u64 {
        self.add + self.sub + self.mul + self.div + self.cmp
    }

    pub fn merge(&mut self, other: &OpCount) {
        *self += *other;
    }
}

impl Add for OpCount {
    type Output = OpCount;

    fn add(self, rhs: OpCount) -> OpCount {
        OpCount {
            add: self.add + rhs.add,
            sub: self.sub + rhs.sub,
            mul: self.mul + rhs.mul,
            div: self.div + rhs.div,
            cmp: self.cmp + rhs.cmp,
        }
    }
}

impl AddAssign for OpCount {
    fn add_assign(&mut self, rhs: OpCount) {
        *self = *self + rhs;
    }
}

impl Sum for OpCount {
    fn sum<I: Iterator<Item = OpCount>>(iter: I) -> OpCount {
        iter.fold(OpCount::ZERO, Add::add)
    }
}
