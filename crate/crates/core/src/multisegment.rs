//! Multisegments `Delta_1 [+] ... [+] Delta_r` over a shared line table.

use std::sync::Arc;

use thiserror::Error;

use crate::line::LineTable;
use crate::scalar::Exponent;
use crate::segment::Segment;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MultisegmentError {
    #[error("segment {index} refers to line id {line} outside the line table")]
    UnknownLine { index: usize, line: usize },
}

/// A multiset of segments, kept in input order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multisegment<S> {
    table: Arc<LineTable>,
    segments: Vec<Segment<S>>,
}

impl<S: Exponent> Multisegment<S> {
    pub fn new(table: Arc<LineTable>, segments: Vec<Segment<S>>) -> Result<Self, MultisegmentError> {
        for (index, seg) in segments.iter().enumerate() {
            if !table.contains(seg.line()) {
                return Err(MultisegmentError::UnknownLine {
                    index,
                    line: seg.line().index(),
                });
            }
        }
        Ok(Multisegment { table, segments })
    }

    pub fn table(&self) -> &LineTable {
        &self.table
    }

    pub fn shared_table(&self) -> &Arc<LineTable> {
        &self.table
    }

    pub fn segments(&self) -> &[Segment<S>] {
        &self.segments
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// `n = sum n_i`.
    pub fn total_degree(&self) -> u32 {
        self.segments
            .iter()
            .map(|s| s.ambient_degree(&self.table))
            .sum()
    }

    /// `lambda = (n_1, ..., n_r)` in stored order.
    pub fn degrees(&self) -> Vec<u32> {
        self.segments
            .iter()
            .map(|s| s.ambient_degree(&self.table))
            .collect()
    }

    pub fn with_segments(&self, segments: Vec<Segment<S>>) -> Self {
        Multisegment {
            table: Arc::clone(&self.table),
            segments,
        }
    }

    /// Applies the conjugate-dual involution to every segment.
    pub fn sigma(&self) -> Self {
        let segments = self.segments.iter().map(|s| s.sigma(&self.table)).collect();
        self.with_segments(segments)
    }

    /// Segments sorted into a multiset normal form.
    pub fn canonical(&self) -> Vec<Segment<S>> {
        let mut v = self.segments.clone();
        v.sort();
        v
    }

    /// Stable under `sigma` as a multiset.
    pub fn is_sigma_stable(&self) -> bool {
        self.canonical() == self.sigma().canonical()
    }

    /// Langlands order: central slope descending; ties by line name, then
    /// longer segments first.
    pub fn langlands_sort(&self) -> Vec<Segment<S>> {
        let mut v = self.segments.clone();
        v.sort_by(|a, b| {
            b.central_slope()
                .cmp(a.central_slope())
                .then(a.line().cmp(&b.line()))
                .then(b.length().cmp(&a.length()))
        });
        v
    }
}
