//! Distinction of generic representations by `GL_n(F)` and by `GL_m(D)`.
//!
//! A generic `pi = Delta_1 [+] ... [+] Delta_r` is distinguished exactly when
//! its segments split into pairs `{Delta, sigma(Delta)}` plus singletons that
//! are themselves distinguished. Only the singleton predicate differs between
//! the two subgroups:
//!
//! * `GL_{n_i}(F)`: the segment is conjugate self-dual of sign `+1`;
//! * `H_{m_i} = GL_{m_i}(D)`: additionally `n_i` is even.
//!
//! # Counting
//!
//! `sigma` maps isomorphism classes to isomorphism classes and is an
//! involution, so matching reduces to counting per class orbit:
//!
//! * a class `C != sigma(C)` can only be matched against `sigma(C)`, never left
//!   as a singleton (a singleton must be conjugate self-dual), so the two
//!   counts must agree;
//! * a class `C = sigma(C)` pairs internally; a leftover copy is allowed iff
//!   the singleton predicate holds for `C`.
//!
//! [`brute_force_classify`] searches all pairings directly and serves as the
//! independent check of this reduction.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::generic::{is_generic, LinkWitness};
use crate::line::{LineTable, Sign};
use crate::multisegment::Multisegment;
use crate::scalar::Exponent;
use crate::segment::Segment;

/// Default size limit for the exhaustive pairing search.
pub const DEFAULT_ORACLE_BOUND: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DistinctionError {
    #[error("multisegment is not generic: segments {} and {} are linked (d = {})", .0.i, .0.j, .0.d)]
    NotGeneric(LinkWitness),
    #[error("total degree {0} is odd")]
    OddTotalDegree(u32),
    #[error("exhaustive search is limited to {bound} segments, got {r}")]
    InstanceTooLarge { r: usize, bound: usize },
}

/// Which subgroup a classification refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// `GL_n(F)`.
    Gl,
    /// `GL_m(D)`.
    H,
}

impl Mode {
    pub fn singleton_holds<S: Exponent>(self, seg: &Segment<S>, table: &LineTable) -> bool {
        match self {
            Mode::Gl => esq_gl_distinguished(seg, table),
            Mode::H => esq_h_distinguished(seg, table),
        }
    }
}

/// Segment `St_l(rho)` is `GL_n(F)`-distinguished iff its parameter is
/// conjugate-orthogonal. Holds for odd `n` as well.
pub fn esq_gl_distinguished<S: Exponent>(seg: &Segment<S>, table: &LineTable) -> bool {
    seg.sign(table) == Some(Sign::Plus)
}

/// `GL_m(D)`-distinction of a single segment: `GL_n(F)`-distinction in even
/// rank `n = 2m`.
pub fn esq_h_distinguished<S: Exponent>(seg: &Segment<S>, table: &LineTable) -> bool {
    seg.ambient_degree(table) % 2 == 0 && esq_gl_distinguished(seg, table)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Singleton {
    pub index: usize,
    pub certificate: Mode,
}

/// Reordering certificate: `pairs` are `(a, b)` with `sigma(Delta_a) = Delta_b`,
/// `singletons` are distinguished on their own. Indices are 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct PairingWitness {
    pub pairs: Vec<(usize, usize)>,
    pub singletons: Vec<Singleton>,
}

impl PairingWitness {
    /// Re-validates the witness against `pi`.
    pub fn validate<S: Exponent>(&self, pi: &Multisegment<S>, mode: Mode) -> bool {
        let segs = pi.segments();
        let table = pi.table();
        let mut used = vec![false; segs.len()];
        let mut mark = |i: usize| -> bool {
            if i >= used.len() || used[i] {
                return false;
            }
            used[i] = true;
            true
        };
        for &(a, b) in &self.pairs {
            if a == b || !mark(a) || !mark(b) || segs[a].sigma(table) != segs[b] {
                return false;
            }
        }
        for single in &self.singletons {
            if single.certificate != mode
                || !mark(single.index)
                || !mode.singleton_holds(&segs[single.index], table)
            {
                return false;
            }
        }
        used.into_iter().all(|u| u)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub mode: Mode,
    pub verdict: bool,
    pub witness: Option<PairingWitness>,
}

fn require_generic<S: Exponent>(pi: &Multisegment<S>) -> Result<(), DistinctionError> {
    let verdict = is_generic(pi);
    match verdict.witness {
        Some(w) => Err(DistinctionError::NotGeneric(w)),
        None => Ok(()),
    }
}

/// The pairing decision without hypothesis checks.
pub fn pairing_decision<S: Exponent>(pi: &Multisegment<S>, mode: Mode) -> Option<PairingWitness> {
    let table = pi.table();
    let mut classes: BTreeMap<&Segment<S>, Vec<usize>> = BTreeMap::new();
    for (idx, seg) in pi.segments().iter().enumerate() {
        classes.entry(seg).or_default().push(idx);
    }

    let mut witness = PairingWitness::default();
    for (&class, members) in &classes {
        let image = class.sigma(table);
        if image == *class {
            let mut chunks = members.chunks_exact(2);
            for pair in &mut chunks {
                witness.pairs.push((pair[0], pair[1]));
            }
            if let [leftover] = chunks.remainder() {
                if !mode.singleton_holds(class, table) {
                    return None;
                }
                witness.singletons.push(Singleton {
                    index: *leftover,
                    certificate: mode,
                });
            }
        } else if *class < image {
            let partners = classes.get(&image).map(Vec::as_slice).unwrap_or(&[]);
            if partners.len() != members.len() {
                return None;
            }
            witness
                .pairs
                .extend(members.iter().copied().zip(partners.iter().copied()));
        } else if !classes.contains_key(&image) {
            return None;
        }
    }
    witness.pairs.sort_unstable();
    witness.singletons.sort_unstable_by_key(|s| s.index);
    Some(witness)
}

fn classify<S: Exponent>(pi: &Multisegment<S>, mode: Mode) -> Classification {
    let witness = pairing_decision(pi, mode);
    Classification {
        mode,
        verdict: witness.is_some(),
        witness,
    }
}

/// `GL_n(F)`-distinction of a generic `pi`.
pub fn classify_gl<S: Exponent>(pi: &Multisegment<S>) -> Result<Classification, DistinctionError> {
    require_generic(pi)?;
    Ok(classify(pi, Mode::Gl))
}

/// `GL_m(D)`-distinction of a generic `pi` of even rank `n = 2m`.
pub fn classify_h<S: Exponent>(pi: &Multisegment<S>) -> Result<Classification, DistinctionError> {
    require_generic(pi)?;
    let n = pi.total_degree();
    if n % 2 != 0 {
        return Err(DistinctionError::OddTotalDegree(n));
    }
    Ok(classify(pi, Mode::H))
}

pub fn classify_mode<S: Exponent>(
    pi: &Multisegment<S>,
    mode: Mode,
) -> Result<Classification, DistinctionError> {
    match mode {
        Mode::Gl => classify_gl(pi),
        Mode::H => classify_h(pi),
    }
}

/// Exhaustive search over all ways to split the indices into unordered pairs
/// and singletons.
pub fn brute_force_classify<S, P>(
    pi: &Multisegment<S>,
    singleton_pred: P,
    bound: usize,
) -> Result<bool, DistinctionError>
where
    S: Exponent,
    P: Fn(&Segment<S>, &LineTable) -> bool,
{
    let r = pi.len();
    if r > bound {
        return Err(DistinctionError::InstanceTooLarge { r, bound });
    }
    let mut assigned = vec![false; r];
    Ok(search(pi, &singleton_pred, &mut assigned))
}

fn search<S, P>(pi: &Multisegment<S>, pred: &P, assigned: &mut [bool]) -> bool
where
    S: Exponent,
    P: Fn(&Segment<S>, &LineTable) -> bool,
{
    let Some(first) = assigned.iter().position(|&a| !a) else {
        return true;
    };
    let segs = pi.segments();
    let table = pi.table();
    assigned[first] = true;
    if pred(&segs[first], table) && search(pi, pred, assigned) {
        assigned[first] = false;
        return true;
    }
    let image = segs[first].sigma(table);
    for other in (first + 1)..segs.len() {
        if !assigned[other] && segs[other] == image {
            assigned[other] = true;
            let found = search(pi, pred, assigned);
            assigned[other] = false;
            if found {
                assigned[first] = false;
                return true;
            }
        }
    }
    assigned[first] = false;
    false
}

/// Necessary condition for distinction: `pi^c = pi^v`, i.e. the segment
/// multiset is `sigma`-stable.
pub fn check_conj_selfdual_necessary<S: Exponent>(pi: &Multisegment<S>) -> bool {
    pi.is_sigma_stable()
}
