//! Nonnegative rationals used for interval endpoints and oracle values.
//!
//! Endpoints of error enclosures are ratios of numbers that grow to many
//! thousands of digits during tuple construction. `num_rational::Ratio`
//! normalises on every operation, and its `Ord` walks a continued-fraction
//! expansion; both are pathological at that scale when the compared values
//! are deliberately close. This type stays unreduced and compares by a
//! single cross multiplication. Call [`Rational::reduced`] at serialization
//! boundaries only.

use alloc::format;
use alloc::string::String;
use core::cmp::Ordering;
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

/// A nonnegative rational `num/den` with `den > 0`, kept unreduced.
#[derive(Clone, Debug)]
pub struct Rational {
    pub num: BigUint,
    pub den: BigUint,
}

impl Rational {
    pub fn new(num: BigUint, den: BigUint) -> Self {
        debug_assert!(!den.is_zero(), "rational with zero denominator");
        Rational { num, den }
    }

    pub fn from_u64(num: u64, den: u64) -> Self {
        Rational::new(BigUint::from(num), BigUint::from(den))
    }

    pub fn zero() -> Self {
        Rational::new(BigUint::zero(), BigUint::one())
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Lowest-terms copy; used when emitting values, never on hot paths.
    pub fn reduced(&self) -> Self {
        if self.num.is_zero() {
            return Rational::zero();
        }
        let g = self.num.gcd(&self.den);
        Rational::new(&self.num / &g, &self.den / &g)
    }

    /// `num/den` in decimal, reduced. The on-disk format for exact values.
    pub fn to_fraction_string(&self) -> String {
        let r = self.reduced();
        format!("{}/{}", r.num, r.den)
    }
}

impl PartialEq for Rational {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Rational {}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        (&self.num * &other.den).cmp(&(&other.num * &self.den))
    }
}
