//! Segments `St_l(rho)`: essentially square-integrable Zelevinsky data.

use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::line::{LineId, LineTable, Sign};
use crate::scalar::{half, Exponent};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SegmentError {
    #[error("segment length must be positive")]
    ZeroLength,
    #[error("exponent {0} is not a half-integer; twists are always multiples of 1/2")]
    NotHalfInteger(String),
}

/// `St_length(rho_base |det|^exponent)` on a cuspidal line.
///
/// Ordering is by `(line, length, exponent)`; it only serves to group
/// isomorphic segments; see [`crate::multisegment::Multisegment::langlands_sort`]
/// for the Langlands order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Segment<S> {
    line: LineId,
    length: u32,
    exponent: S,
}

impl<S: Exponent> Segment<S> {
    pub fn new(line: LineId, length: u32, exponent: S) -> Result<Self, SegmentError> {
        if length == 0 {
            return Err(SegmentError::ZeroLength);
        }
        if !exponent.is_half_integer() {
            return Err(SegmentError::NotHalfInteger(exponent.to_string()));
        }
        Ok(Segment {
            line,
            length,
            exponent,
        })
    }

    pub fn line(&self) -> LineId {
        self.line
    }

    pub fn length(&self) -> u32 {
        self.length
    }

    pub fn exponent(&self) -> &S {
        &self.exponent
    }

    /// `n_i = length * degree(line)`.
    pub fn ambient_degree(&self, table: &LineTable) -> u32 {
        self.length * table.degree(self.line)
    }

    /// Absolute central-character slope `t_i / n_i`. With unitary base points
    /// this is the exponent itself.
    pub fn central_slope(&self) -> &S {
        &self.exponent
    }

    /// The conjugate-dual `(Delta^c)^v`: partner line, negated exponent.
    pub fn sigma(&self, table: &LineTable) -> Segment<S> {
        Segment {
            line: table.partner(self.line),
            length: self.length,
            exponent: -self.exponent.clone(),
        }
    }

    pub fn is_isomorphic(&self, other: &Segment<S>) -> bool {
        self == other
    }

    pub fn is_conjugate_self_dual(&self, table: &LineTable) -> bool {
        table.partner(self.line) == self.line && self.exponent.is_zero()
    }

    /// Sign of the parameter `phi_rho (x) Sp(l)` when the segment is conjugate
    /// self-dual: the line's sign, flipped when `l` is even.
    pub fn sign(&self, table: &LineTable) -> Option<Sign> {
        if !self.is_conjugate_self_dual(table) {
            return None;
        }
        table
            .self_sign(self.line)
            .map(|s| s * Sign::of_sp(self.length))
    }

    /// Cuspidal support as `(line, exponent)` pairs, top exponent first:
    /// `e + (l-1)/2, e + (l-1)/2 - 1, ..., e - (l-1)/2`.
    pub fn support(&self) -> Vec<(LineId, S)> {
        let l = self.length as i64;
        (0..l)
            .map(|j| {
                let shift: S = half(l - 1 - 2 * j);
                (self.line, self.exponent.clone() + shift)
            })
            .collect()
    }

    /// Same segment twisted by `|det|^shift`.
    pub fn twist(&self, shift: &S) -> Result<Segment<S>, SegmentError> {
        Segment::new(self.line, self.length, self.exponent.clone() + shift.clone())
    }

    pub fn display<'a>(&'a self, table: &'a LineTable) -> SegmentDisplay<'a, S> {
        SegmentDisplay {
            segment: self,
            table,
        }
    }
}

/// Renders a segment in the input syntax, `St(l, line, e)`.
pub struct SegmentDisplay<'a, S> {
    segment: &'a Segment<S>,
    table: &'a LineTable,
}

impl<S: Exponent> fmt::Display for SegmentDisplay<'_, S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let seg = self.segment;
        write!(f, "St({}, {}", seg.length, self.table.name(seg.line))?;
        if !seg.exponent.is_zero() {
            write!(f, ", {}", seg.exponent)?;
        }
        f.write_str(")")
    }
}

impl<S: Exponent> Serialize for SegmentDisplay<'_, S> {
    fn serialize<Ser: Serializer>(&self, serializer: Ser) -> Result<Ser::Ok, Ser::Error> {
        let seg = self.segment;
        let mut st = serializer.serialize_struct("Segment", 5)?;
        st.serialize_field("text", &self.to_string())?;
        st.serialize_field("line", self.table.name(seg.line))?;
        st.serialize_field("length", &seg.length)?;
        st.serialize_field("exponent", &seg.exponent.to_string())?;
        st.serialize_field("degree", &seg.ambient_degree(self.table))?;
        st.end()
    }
}
