//! Jacquet modules of segments along standard parabolics.

use serde::Serialize;
use thiserror::Error;

use crate::line::LineTable;
use crate::scalar::{half, Exponent};
use crate::segment::Segment;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JacquetError {
    #[error("partition sums to {got}, but the segment lives on GL_{expected}")]
    PartitionMismatch { expected: u32, got: u64 },
    #[error("partition parts must be positive")]
    EmptyPart,
}

/// Jacquet module of `St_l(rho)` along `P_lambda`: either zero, or an outer
/// tensor product of segments, the `i`-th on `GL_{n_i}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum JacquetModule<S> {
    Zero,
    Factors(Vec<Segment<S>>),
}

impl<S> JacquetModule<S> {
    pub fn is_zero(&self) -> bool {
        matches!(self, JacquetModule::Zero)
    }

    pub fn factors(&self) -> &[Segment<S>] {
        match self {
            JacquetModule::Zero => &[],
            JacquetModule::Factors(f) => f,
        }
    }
}

#[derive(Serialize)]
#[serde(bound(serialize = "S: Exponent"))]
pub struct JacquetReport<'a, S: Exponent> {
    pub zero: bool,
    pub factors: Vec<crate::segment::SegmentDisplay<'a, S>>,
}

impl<S: Exponent> JacquetModule<S> {
    pub fn report<'a>(&'a self, table: &'a LineTable) -> JacquetReport<'a, S> {
        JacquetReport {
            zero: self.is_zero(),
            factors: self.factors().iter().map(|f| f.display(table)).collect(),
        }
    }
}

/// `r_P(St_l(rho |det|^e))` for `P = P_lambda`.
///
/// Nonzero iff each part is a multiple `k_i * deg(rho)`. The `i`-th factor is
/// `St_{k_i}` twisted by `e - (k_1 + ... + k_{i-1}) + (l - k_i)/2`, so the
/// factors carry the cuspidal support from the top exponent downwards.
pub fn jacquet<S: Exponent>(
    seg: &Segment<S>,
    table: &LineTable,
    lambda: &[u32],
) -> Result<JacquetModule<S>, JacquetError> {
    let n = seg.ambient_degree(table);
    let total: u64 = lambda.iter().map(|&p| p as u64).sum();
    if total != n as u64 {
        return Err(JacquetError::PartitionMismatch {
            expected: n,
            got: total,
        });
    }
    if lambda.contains(&0) {
        return Err(JacquetError::EmptyPart);
    }

    let degree = table.degree(seg.line());
    if lambda.iter().any(|&p| p % degree != 0) {
        return Ok(JacquetModule::Zero);
    }

    let l = seg.length() as i64;
    let mut consumed = 0i64;
    let mut factors = Vec::with_capacity(lambda.len());
    for &part in lambda {
        let k = (part / degree) as i64;
        let shift: S = half(-2 * consumed + (l - k));
        let factor = Segment::new(seg.line(), k as u32, seg.exponent().clone() + shift)
            .expect("jacquet factor keeps a half-integer exponent");
        factors.push(factor);
        consumed += k;
    }
    Ok(JacquetModule::Factors(factors))
}
