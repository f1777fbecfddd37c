//! Exact exponent scalars.
//!
//! Every unramified twist that shows up in segment arithmetic is a
//! half-integer, so the calculus only needs a scalar that can represent
//! `k/2` exactly, compare totally, and hash. Any `num_rational::Ratio` over a
//! signed machine or big integer qualifies.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{FromPrimitive, Signed, ToPrimitive};

/// Exact scalar used for twist exponents.
pub trait Exponent:
    Clone + Ord + Hash + Debug + Display + Signed + Send + Sync + 'static
{
    /// The value `halves / 2`, or `None` if it does not fit the scalar.
    fn from_halves(halves: i64) -> Option<Self>;

    /// Twice the value, when that is an integer representable as `i64`.
    fn to_halves(&self) -> Option<i64>;

    fn from_integer(value: i64) -> Option<Self> {
        value.checked_mul(2).and_then(Self::from_halves)
    }

    fn is_integer(&self) -> bool {
        matches!(self.to_halves(), Some(h) if h % 2 == 0)
    }

    fn is_half_integer(&self) -> bool {
        self.to_halves().is_some()
    }
}

impl<T> Exponent for Ratio<T>
where
    T: Clone + Integer + Signed + Hash + Debug + Display + FromPrimitive + ToPrimitive,
    T: Send + Sync + 'static,
{
    fn from_halves(halves: i64) -> Option<Self> {
        let numer = T::from_i64(halves)?;
        let two = T::from_i64(2)?;
        Some(Ratio::new(numer, two))
    }

    fn to_halves(&self) -> Option<i64> {
        let denom = self.denom();
        if denom.is_one() {
            self.numer().to_i64()?.checked_mul(2)
        } else if *denom == T::from_i64(2)? {
            self.numer().to_i64()
        } else {
            None
        }
    }
}

/// `halves / 2` in the scalar `S`.
///
/// Only used for shifts bounded by segment lengths, which always fit.
pub(crate) fn half<S: Exponent>(halves: i64) -> S {
    S::from_halves(halves).expect("half-integer shift exceeds scalar range")
}

/// Parses the textual form produced by `Display` on exact rationals
/// (`"3"`, `"-1/2"`).
pub fn parse_exponent<S: Exponent>(text: &str) -> Option<S> {
    let text = text.trim();
    let (numer, denom) = match text.split_once('/') {
        Some((n, d)) => (n.trim().parse::<i64>().ok()?, d.trim().parse::<i64>().ok()?),
        None => (text.parse::<i64>().ok()?, 1),
    };
    match denom {
        1 => S::from_integer(numer),
        2 => S::from_halves(numer),
        _ => None,
    }
}
