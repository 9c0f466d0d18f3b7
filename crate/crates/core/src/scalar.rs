//! Numeric abstractions shared by the counting and summing routines.
//!
//! Leaf counts and power profiles only ever need nonnegative integer
//! arithmetic, so they are generic over [`Count`]. Kraft-style sums need
//! division and are generic over [`Field`]. The crate root picks the exact
//! arbitrary-precision instances; fixed-width and floating point instances
//! are available for callers that know their inputs are small.

use std::fmt::{Debug, Display};

use num_traits::{Num, One, Zero};

/// Nonnegative integer-like scalar used for counts and profile entries.
pub trait Count: Clone + Ord + Debug + Display + Zero + One + Num {
    /// `2^n` in this scalar type.
    fn pow2(n: usize) -> Self {
        num_traits::pow(Self::one() + Self::one(), n)
    }

    /// `3^n` in this scalar type.
    fn pow3(n: usize) -> Self {
        num_traits::pow(Self::one() + Self::one() + Self::one(), n)
    }

    fn from_usize(n: usize) -> Self {
        // Binary expansion keeps this generic without a `From<usize>` bound.
        let mut acc = Self::zero();
        let mut bit = Self::one();
        let mut rest = n;
        while rest > 0 {
            if rest & 1 == 1 {
                acc = acc + bit.clone();
            }
            bit = bit.clone() + bit;
            rest >>= 1;
        }
        acc
    }
}

impl<T> Count for T where T: Clone + Ord + Debug + Display + Zero + One + Num {}

/// Scalar field used for sums with negative powers (`2^-|w|`, `3^-|w|`).
pub trait Field: Clone + Debug + PartialOrd + Num {
    fn two() -> Self {
        Self::one() + Self::one()
    }

    fn three() -> Self {
        Self::two() + Self::one()
    }

    /// `base^-n`.
    fn inv_pow(base: Self, n: usize) -> Self {
        Self::one() / num_traits::pow(base, n)
    }

    /// `2^n`.
    fn pow2(n: usize) -> Self {
        num_traits::pow(Self::two(), n)
    }
}

impl<T> Field for T where T: Clone + Debug + PartialOrd + Num {}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;
    use num_rational::Ratio;

    #[test]
    fn powers_agree_across_instances() {
        for n in 0..20 {
            assert_eq!(<u64 as Count>::pow2(n), 1u64 << n);
            assert_eq!(<u64 as Count>::pow3(n), 3u64.pow(n as u32));
            assert_eq!(<BigUint as Count>::pow3(n), BigUint::from(3u64.pow(n as u32)));
        }
    }

    #[test]
    fn from_usize_round_trips() {
        for n in [0usize, 1, 2, 7, 255, 1 << 20, 123_456_789] {
            assert_eq!(<u64 as Count>::from_usize(n), n as u64);
            assert_eq!(<BigUint as Count>::from_usize(n), BigUint::from(n));
        }
    }

    #[test]
    fn inverse_powers() {
        assert_eq!(<Ratio<i64> as Field>::inv_pow(Field::three(), 2), Ratio::new(1, 9));
        assert_eq!(<f64 as Field>::inv_pow(2.0, 3), 0.125);
    }
}
