//! Formal Weil-Deligne parameters and the base-change side.
//!
//! `St_l(rho |det|^e)` corresponds to `phi_rho |.|^e (x) Sp(l)`. A parameter is
//! stored as a multiset of such constituents. For a conjugate self-dual
//! parameter the constituents split into
//!
//! * `I_+`: conjugate-orthogonal constituents,
//! * `I_-`: conjugate-symplectic constituents,
//! * `I_0`: orbits `{M, sigma(M)}` of constituents that are not conjugate
//!   self-dual.
//!
//! The parameter carries a conjugate-orthogonal form exactly when it is
//! conjugate self-dual and each `I_-` constituent occurs with even
//! multiplicity (the multiplicity space must carry a symplectic form). That
//! is the criterion for `pi` to be a base change from the quasi-split even
//! unitary group through the unstable embedding.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::distinction::{classify_h, DistinctionError};
use crate::generic::is_generic;
use crate::line::{LineId, LineTable, Sign};
use crate::multisegment::Multisegment;
use crate::scalar::Exponent;
use crate::segment::Segment;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GaloisError {
    #[error("parameter is not conjugate self-dual: constituent {constituent} occurs {count} times but its conjugate dual occurs {image_count} times")]
    NotConjugateSelfDual {
        constituent: String,
        count: u32,
        image_count: u32,
    },
    #[error("parameter has odd dimension {0}")]
    OddDimension(u32),
    #[error(transparent)]
    Distinction(#[from] DistinctionError),
    #[error("condition (A) fails: {0}")]
    ConditionAFails(String),
}

/// `phi_rho |.|^exponent (x) Sp(sp_length)` on a cuspidal line.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WdConstituent<S> {
    pub line: LineId,
    pub sp_length: u32,
    pub exponent: S,
}

impl<S: Exponent> WdConstituent<S> {
    pub fn dimension(&self, table: &LineTable) -> u32 {
        table.degree(self.line) * self.sp_length
    }

    pub fn sigma(&self, table: &LineTable) -> Self {
        WdConstituent {
            line: table.partner(self.line),
            sp_length: self.sp_length,
            exponent: -self.exponent.clone(),
        }
    }

    fn as_segment(&self) -> Segment<S> {
        Segment::new(self.line, self.sp_length, self.exponent.clone())
            .expect("constituents are built from valid segments")
    }

    pub fn sign(&self, table: &LineTable) -> Option<Sign> {
        self.as_segment().sign(table)
    }

    pub fn describe(&self, table: &LineTable) -> String {
        format!(
            "{} (x) Sp({}) |.|^{}",
            table.name(self.line),
            self.sp_length,
            self.exponent
        )
    }
}

impl<S: Exponent> From<&Segment<S>> for WdConstituent<S> {
    fn from(seg: &Segment<S>) -> Self {
        WdConstituent {
            line: seg.line(),
            sp_length: seg.length(),
            exponent: seg.exponent().clone(),
        }
    }
}

/// A parameter as constituent multiplicities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WdParameter<S> {
    table: Arc<LineTable>,
    constituents: BTreeMap<WdConstituent<S>, u32>,
}

impl<S: Exponent> WdParameter<S> {
    pub fn new(table: Arc<LineTable>, constituents: BTreeMap<WdConstituent<S>, u32>) -> Self {
        let constituents = constituents.into_iter().filter(|(_, m)| *m > 0).collect();
        WdParameter {
            table,
            constituents,
        }
    }

    pub fn table(&self) -> &LineTable {
        &self.table
    }

    pub fn constituents(&self) -> &BTreeMap<WdConstituent<S>, u32> {
        &self.constituents
    }

    pub fn multiplicity(&self, c: &WdConstituent<S>) -> u32 {
        self.constituents.get(c).copied().unwrap_or(0)
    }

    pub fn dimension(&self) -> u32 {
        self.constituents
            .iter()
            .map(|(c, m)| c.dimension(&self.table) * m)
            .sum()
    }

    pub fn sigma(&self) -> Self {
        let constituents = self
            .constituents
            .iter()
            .map(|(c, m)| (c.sigma(&self.table), *m))
            .collect();
        WdParameter {
            table: Arc::clone(&self.table),
            constituents,
        }
    }

    pub fn is_conjugate_self_dual(&self) -> bool {
        self.first_unbalanced().is_none()
    }

    fn first_unbalanced(&self) -> Option<GaloisError> {
        self.constituents.iter().find_map(|(c, &count)| {
            let image_count = self.multiplicity(&c.sigma(&self.table));
            (image_count != count).then(|| GaloisError::NotConjugateSelfDual {
                constituent: c.describe(&self.table),
                count,
                image_count,
            })
        })
    }
}

/// The parameter of `pi`, aggregating isomorphic segments.
pub fn to_wd<S: Exponent>(pi: &Multisegment<S>) -> WdParameter<S> {
    let mut constituents = BTreeMap::new();
    for seg in pi.segments() {
        *constituents.entry(WdConstituent::from(seg)).or_insert(0) += 1;
    }
    WdParameter {
        table: Arc::clone(pi.shared_table()),
        constituents,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelfDualDecomposition<S> {
    pub i_plus: Vec<(WdConstituent<S>, u32)>,
    pub i_minus: Vec<(WdConstituent<S>, u32)>,
    /// One entry per orbit, smaller constituent first.
    pub i_zero: Vec<((WdConstituent<S>, u32), (WdConstituent<S>, u32))>,
}

impl<S: Exponent> SelfDualDecomposition<S> {
    /// Number of distinct constituents covered.
    pub fn constituent_count(&self) -> usize {
        self.i_plus.len() + self.i_minus.len() + 2 * self.i_zero.len()
    }
}

/// Splits a conjugate self-dual parameter into its orthogonal, symplectic and
/// non-self-dual parts, with the sign fixed to `+1`.
pub fn decompose<S: Exponent>(m: &WdParameter<S>) -> Result<SelfDualDecomposition<S>, GaloisError> {
    if let Some(err) = m.first_unbalanced() {
        return Err(err);
    }
    let table = m.table();
    let mut dec = SelfDualDecomposition {
        i_plus: Vec::new(),
        i_minus: Vec::new(),
        i_zero: Vec::new(),
    };
    for (c, &mult) in m.constituents() {
        match c.sign(table) {
            Some(Sign::Plus) => dec.i_plus.push((c.clone(), mult)),
            Some(Sign::Minus) => dec.i_minus.push((c.clone(), mult)),
            None => {
                let image = c.sigma(table);
                if *c < image {
                    let image_mult = m.multiplicity(&image);
                    dec.i_zero.push(((c.clone(), mult), (image, image_mult)));
                }
            }
        }
    }
    Ok(dec)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EtaReport {
    pub trivial: bool,
    /// `k` in `A = (Z/2Z)^k`, the number of `I_+` constituents.
    pub component_group_rank: usize,
    /// `eta(a_i) = (-1)^{dim M_i}` on the generator of the `i`-th `O(V_i)`.
    pub values: Vec<Sign>,
}

/// The quadratic character `eta` of the component group.
pub fn eta<S: Exponent>(m: &WdParameter<S>) -> Result<EtaReport, GaloisError> {
    let dec = decompose(m)?;
    let values: Vec<Sign> = dec
        .i_plus
        .iter()
        .map(|(c, _)| {
            if c.dimension(m.table()) % 2 == 0 {
                Sign::Plus
            } else {
                Sign::Minus
            }
        })
        .collect();
    Ok(EtaReport {
        trivial: values.iter().all(|&v| v == Sign::Plus),
        component_group_rank: values.len(),
        values,
    })
}

pub fn eta_trivial<S: Exponent>(m: &WdParameter<S>) -> Result<bool, GaloisError> {
    eta(m).map(|r| r.trivial)
}

pub fn is_conjugate_orthogonal<S: Exponent>(m: &WdParameter<S>) -> bool {
    match decompose(m) {
        Ok(dec) => dec.i_minus.iter().all(|(_, mult)| mult % 2 == 0),
        Err(_) => false,
    }
}

/// Whether the parameter factors through the unstable base-change embedding.
pub fn bc_exists<S: Exponent>(m: &WdParameter<S>) -> Result<bool, GaloisError> {
    let dim = m.dimension();
    if dim % 2 != 0 {
        return Err(GaloisError::OddDimension(dim));
    }
    Ok(is_conjugate_orthogonal(m))
}

fn require_generic_even<S: Exponent>(pi: &Multisegment<S>) -> Result<(), GaloisError> {
    if let Some(w) = is_generic(pi).witness {
        return Err(DistinctionError::NotGeneric(w).into());
    }
    let n = pi.total_degree();
    if n % 2 != 0 {
        return Err(DistinctionError::OddTotalDegree(n).into());
    }
    Ok(())
}

/// `pi` is an unstable base change of a parameter that is generic for every
/// non-degenerate character: the parameter is conjugate-orthogonal and `eta`
/// is trivial. Genericity of the packet follows from genericity of `pi`.
pub fn condition_a<S: Exponent>(pi: &Multisegment<S>) -> Result<bool, GaloisError> {
    require_generic_even(pi)?;
    let m = to_wd(pi);
    if !bc_exists(&m)? {
        return Ok(false);
    }
    eta_trivial(&m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MainTheoremCheck {
    #[serde(rename = "A")]
    pub a: bool,
    #[serde(rename = "B")]
    pub b: bool,
    pub consistent: bool,
}

/// Evaluates (A) and (B) = `GL_m(D)`-distinction; consistent unless A and not B.
pub fn main_theorem_check<S: Exponent>(pi: &Multisegment<S>) -> Result<MainTheoremCheck, GaloisError> {
    let a = condition_a(pi)?;
    let b = classify_h(pi)?.verdict;
    Ok(MainTheoremCheck {
        a,
        b,
        consistent: !a || b,
    })
}

/// Segment indices (0-based) grouped by the type of their parameter.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ConditionAGrouping {
    /// `(a, b)` with `Delta_a` not conjugate self-dual and `sigma(Delta_a) = Delta_b`.
    pub non_self_dual_pairs: Vec<(usize, usize)>,
    /// Isomorphic pairs of conjugate-symplectic segments.
    pub symplectic_pairs: Vec<(usize, usize)>,
    /// Conjugate-orthogonal segments, each of even degree.
    pub orthogonal: Vec<usize>,
}

/// Reorders `pi` into the three groups used to derive (B) from (A).
pub fn decompose_condition_a_witness<S: Exponent>(
    pi: &Multisegment<S>,
) -> Result<ConditionAGrouping, GaloisError> {
    if !condition_a(pi)? {
        let m = to_wd(pi);
        let reason = if !is_conjugate_orthogonal(&m) {
            "parameter is not conjugate-orthogonal"
        } else {
            "eta is nontrivial (an orthogonal constituent has odd dimension)"
        };
        return Err(GaloisError::ConditionAFails(reason.into()));
    }
    let table = pi.table();
    let mut classes: BTreeMap<&Segment<S>, Vec<usize>> = BTreeMap::new();
    for (idx, seg) in pi.segments().iter().enumerate() {
        classes.entry(seg).or_default().push(idx);
    }
    let mut grouping = ConditionAGrouping::default();
    for (&class, members) in &classes {
        match class.sign(table) {
            Some(Sign::Plus) => grouping.orthogonal.extend(members.iter().copied()),
            Some(Sign::Minus) => grouping
                .symplectic_pairs
                .extend(members.chunks_exact(2).map(|p| (p[0], p[1]))),
            None => {
                let image = class.sigma(table);
                if *class < image {
                    let partners = &classes[&image];
                    grouping
                        .non_self_dual_pairs
                        .extend(members.iter().copied().zip(partners.iter().copied()));
                }
            }
        }
    }
    grouping.orthogonal.sort_unstable();
    Ok(grouping)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::line::CuspidalLine;
    use num_rational::Rational64;

    fn table() -> Arc<LineTable> {
        Arc::new(
            LineTable::new(vec![
                CuspidalLine::self_dual("a", 1, Sign::Plus),
                CuspidalLine::self_dual("a2", 2, Sign::Plus),
                CuspidalLine::self_dual("a3", 3, Sign::Plus),
                CuspidalLine::self_dual("s", 1, Sign::Minus),
                CuspidalLine::paired("b", 1, "c"),
                CuspidalLine::paired("c", 1, "b"),
            ])
            .unwrap(),
        )
    }

    fn pi(spec: &[(&str, u32, i64)]) -> Multisegment<Rational64> {
        let t = table();
        let segs = spec
            .iter()
            .map(|&(n, l, h)| Segment::new(t.lookup(n).unwrap(), l, Rational64::new(h, 2)).unwrap())
            .collect();
        Multisegment::new(t, segs).unwrap()
    }

    #[test]
    fn translation_aggregates_multiplicities() {
        let m = to_wd(&pi(&[("a", 2, 0)]));
        assert_eq!(m.constituents().len(), 1);
        assert_eq!(m.dimension(), 2);
        let doubled = to_wd(&pi(&[("b", 1, 1), ("b", 1, 1)]));
        assert_eq!(doubled.constituents().values().copied().collect::<Vec<_>>(), vec![2]);
    }

    #[test]
    fn decomposition_routes_by_sign() {
        let dec = decompose(&to_wd(&pi(&[("a3", 1, 0), ("a3", 1, 0)]))).unwrap();
        assert_eq!(dec.i_plus.len(), 1);
        assert_eq!(dec.i_plus[0].1, 2);
        assert!(dec.i_minus.is_empty() && dec.i_zero.is_empty());

        let dec = decompose(&to_wd(&pi(&[("b", 1, 0), ("c", 1, 0)]))).unwrap();
        assert_eq!(dec.i_zero.len(), 1);
        assert_eq!(dec.constituent_count(), 2);

        assert!(matches!(
            decompose(&to_wd(&pi(&[("b", 1, 0)]))),
            Err(GaloisError::NotConjugateSelfDual { .. })
        ));
    }

    #[test]
    fn eta_values() {
        let empty = eta(&to_wd(&pi(&[("b", 1, 0), ("c", 1, 0)]))).unwrap();
        assert!(empty.trivial);
        assert_eq!(empty.component_group_rank, 0);

        let odd = eta(&to_wd(&pi(&[("a3", 1, 0)]))).unwrap();
        assert!(!odd.trivial);
        assert_eq!(odd.values, vec![Sign::Minus]);

        let five = pi(&[("a2", 1, 0); 5]);
        assert!(eta_trivial(&to_wd(&five)).unwrap());
    }

    #[test]
    fn conjugate_orthogonality() {
        assert!(is_conjugate_orthogonal(&to_wd(&pi(&[("a", 1, 0); 3]))));
        assert!(!is_conjugate_orthogonal(&to_wd(&pi(&[("s", 1, 0)]))));
        assert!(is_conjugate_orthogonal(&to_wd(&pi(&[("b", 2, 1), ("c", 2, -1)]))));
        assert!(is_conjugate_orthogonal(&to_wd(&pi(&[("s", 1, 0), ("s", 1, 0)]))));
    }

    #[test]
    fn base_change_existence() {
        assert!(bc_exists(&to_wd(&pi(&[("b", 1, 1), ("c", 1, -1)]))).unwrap());
        assert!(!bc_exists(&to_wd(&pi(&[("a", 2, 0)]))).unwrap());
        assert!(bc_exists(&to_wd(&pi(&[("a", 2, 0), ("a", 2, 0)]))).unwrap());
        assert_eq!(
            bc_exists(&to_wd(&pi(&[("a", 1, 0)]))),
            Err(GaloisError::OddDimension(1))
        );
    }

    #[test]
    fn condition_a_cases() {
        assert!(condition_a(&pi(&[("a2", 1, 0)])).unwrap());
        assert!(!condition_a(&pi(&[("a3", 1, 0), ("a3", 1, 0)])).unwrap());
        assert!(condition_a(&pi(&[("b", 1, 0), ("c", 1, 0)])).unwrap());
        assert!(matches!(
            condition_a(&pi(&[("a", 1, 0)])),
            Err(GaloisError::Distinction(DistinctionError::OddTotalDegree(1)))
        ));
    }

    #[test]
    fn main_theorem_examples() {
        let counter = main_theorem_check(&pi(&[("a3", 1, 0), ("a3", 1, 0)])).unwrap();
        assert_eq!(
            counter,
            MainTheoremCheck {
                a: false,
                b: true,
                consistent: true
            }
        );
        let both = main_theorem_check(&pi(&[("a2", 1, 0)])).unwrap();
        assert_eq!(
            both,
            MainTheoremCheck {
                a: true,
                b: true,
                consistent: true
            }
        );
    }

    #[test]
    fn grouping_for_condition_a() {
        let g = decompose_condition_a_witness(&pi(&[("b", 1, 0), ("c", 1, 0)])).unwrap();
        assert_eq!(g.non_self_dual_pairs, vec![(0, 1)]);
        assert!(g.symplectic_pairs.is_empty() && g.orthogonal.is_empty());

        let g = decompose_condition_a_witness(&pi(&[("a", 2, 0), ("a", 2, 0)])).unwrap();
        assert_eq!(g.symplectic_pairs, vec![(0, 1)]);

        let g = decompose_condition_a_witness(&pi(&[("a2", 1, 0)])).unwrap();
        assert_eq!(g.orthogonal, vec![0]);

        assert!(matches!(
            decompose_condition_a_witness(&pi(&[("a3", 1, 0), ("a3", 1, 0)])),
            Err(GaloisError::ConditionAFails(_))
        ));
    }

    #[test]
    fn sigma_preserves_conjugate_orthogonality() {
        let m = to_wd(&pi(&[("b", 2, 1), ("c", 2, -1), ("s", 1, 0)]));
        assert_eq!(is_conjugate_orthogonal(&m), is_conjugate_orthogonal(&m.sigma()));
    }
}
