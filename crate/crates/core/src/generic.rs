//! Genericity of a multisegment via linked segments.
//!
//! `Delta_i = St_{l_i}(rho_i)` precedes-and-links `Delta_j` when, for some
//! integer `d` with `max(1, l_i - l_j + 1) <= d <= l_i`, both segments sit on
//! the same line and `e_i = e_j + d + (l_j - l_i)/2`. The representation is
//! generic exactly when no ordered pair is linked.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::line::LineId;
use crate::multisegment::Multisegment;
use crate::scalar::{half, Exponent};
use crate::segment::Segment;

/// An ordered linked pair `(i, j)` with its offset `d`. Indices are 0-based
/// positions in the input multisegment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LinkWitness {
    pub i: usize,
    pub j: usize,
    pub d: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GenericVerdict {
    pub generic: bool,
    pub witness: Option<LinkWitness>,
}

/// The unique `d` that could link `first` to `second`, if it is in range.
pub fn link_offset<S: Exponent>(first: &Segment<S>, second: &Segment<S>) -> Option<u32> {
    if first.line() != second.line() {
        return None;
    }
    let (li, lj) = (first.length() as i64, second.length() as i64);
    // d = e_i - e_j - (l_j - l_i)/2 must be a positive integer
    let d = first.exponent().clone() - second.exponent().clone() - half::<S>(lj - li);
    if !d.is_integer() {
        return None;
    }
    let d = d.to_halves()? / 2;
    let lower = 1.max(li - lj + 1);
    (lower <= d && d <= li).then_some(d as u32)
}

pub fn is_linked<S: Exponent>(first: &Segment<S>, second: &Segment<S>) -> bool {
    link_offset(first, second).is_some()
}

/// Decides genericity, returning the first linked pair found.
///
/// Segments are bucketed by line first; only pairs inside a bucket can link.
pub fn is_generic<S: Exponent>(pi: &Multisegment<S>) -> GenericVerdict {
    let mut buckets: BTreeMap<LineId, Vec<usize>> = BTreeMap::new();
    for (idx, seg) in pi.segments().iter().enumerate() {
        buckets.entry(seg.line()).or_default().push(idx);
    }
    let segs = pi.segments();
    for indices in buckets.values() {
        for &i in indices {
            for &j in indices {
                if i == j {
                    continue;
                }
                if let Some(d) = link_offset(&segs[i], &segs[j]) {
                    return GenericVerdict {
                        generic: false,
                        witness: Some(LinkWitness { i, j, d }),
                    };
                }
            }
        }
    }
    GenericVerdict {
        generic: true,
        witness: None,
    }
}

/// Re-checks a witness against the defining equation.
pub fn witness_holds<S: Exponent>(pi: &Multisegment<S>, w: &LinkWitness) -> bool {
    let segs = pi.segments();
    if w.i == w.j || w.i >= segs.len() || w.j >= segs.len() {
        return false;
    }
    let (a, b) = (&segs[w.i], &segs[w.j]);
    let (li, lj) = (a.length() as i64, b.length() as i64);
    let d = w.d as i64;
    if a.line() != b.line() || d < 1.max(li - lj + 1) || d > li {
        return false;
    }
    let rhs = b.exponent().clone() + half::<S>(2 * d + lj - li);
    *a.exponent() == rhs
}
