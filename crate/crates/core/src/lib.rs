//! Distinction calculus for generic representations of `GL_n(E)`, `E/F`
//! quadratic, in terms of Zelevinsky multisegments.
//!
//! Representations are formal: a generic irreducible `pi` is a multiset of
//! segments `St_l(rho |det|^e)` on declared cuspidal lines. On that data the
//! crate decides
//!
//! * genericity ([`generic`]),
//! * `GL_n(F)`- and `GL_m(D)`-distinction ([`distinction`]),
//! * whether `pi` is an unstable base change of a parameter that is generic
//!   for every non-degenerate character ([`galois`]),
//!
//! and provides the supporting combinatorics: Jacquet modules of segments
//! ([`jacquet`]) and the double cosets `P \ G / H'` with their permutation
//! representatives ([`cosets`]).
//!
//! All algebra is generic over an exact [`Exponent`] scalar; the aliases at
//! the crate root fix it to [`Rational`].

pub mod cosets;
pub mod distinction;
pub mod dsl;
pub mod fuzz;
pub mod galois;
pub mod generic;
pub mod jacquet;
pub mod line;
pub mod multisegment;
pub mod scalar;
pub mod segment;

pub use line::{CuspidalLine, LineId, LineTable, Sign};
pub use scalar::Exponent;

/// Default exponent scalar.
pub type Rational = num_rational::Ratio<i64>;
/// Exponent scalar without overflow.
pub type BigRational = num_rational::Ratio<num_bigint::BigInt>;

pub type Segment = segment::Segment<Rational>;
pub type Multisegment = multisegment::Multisegment<Rational>;
pub type WdConstituent = galois::WdConstituent<Rational>;
pub type WdParameter = galois::WdParameter<Rational>;
pub type SelfDualDecomposition = galois::SelfDualDecomposition<Rational>;
pub type JacquetModule = jacquet::JacquetModule<Rational>;
pub type Program = dsl::Program<Rational>;
