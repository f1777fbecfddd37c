//! Cuspidal lines: supercuspidal representations up to unramified twist.
//!
//! A line is declared with its degree (the `k` such that its members live on
//! `GL_k(E)`) and the name of its image under the conjugate-dual involution
//! `rho -> (rho^c)^v`. The base point of every line is taken to be unitary,
//! and a self-partnered line additionally carries the sign of the form its
//! base point preserves.

use std::collections::HashMap;
use std::fmt;
use std::ops::Mul;

use serde::{Serialize, Serializer};
use thiserror::Error;

/// Sign of a conjugate self-dual form: `+1` orthogonal, `-1` symplectic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    /// `+1` for odd `n`, `-1` for even `n`: the sign of the `n`-dimensional
    /// irreducible representation of `SL_2`.
    pub fn of_sp(n: u32) -> Sign {
        if n % 2 == 1 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_i8(self.as_i8())
    }
}

/// Declaration of one cuspidal line.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CuspidalLine {
    pub name: String,
    pub degree: u32,
    pub sigma_partner: String,
    /// Present exactly when `sigma_partner == name`.
    pub self_sign: Option<Sign>,
}

impl CuspidalLine {
    pub fn self_dual(name: impl Into<String>, degree: u32, sign: Sign) -> Self {
        let name = name.into();
        CuspidalLine {
            sigma_partner: name.clone(),
            name,
            degree,
            self_sign: Some(sign),
        }
    }

    pub fn paired(name: impl Into<String>, degree: u32, partner: impl Into<String>) -> Self {
        CuspidalLine {
            name: name.into(),
            degree,
            sigma_partner: partner.into(),
            self_sign: None,
        }
    }

    pub fn is_self_partnered(&self) -> bool {
        self.name == self.sigma_partner
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LineTableError {
    #[error("line `{0}` is declared more than once")]
    DuplicateLine(String),
    #[error("line `{0}` has degree 0")]
    ZeroDegree(String),
    #[error("line `{line}` names undeclared sigma partner `{partner}`")]
    DanglingPartner { line: String, partner: String },
    #[error("line `{line}` is partnered with `{partner}`, but `{partner}` is partnered with `{back}`")]
    AsymmetricPartner {
        line: String,
        partner: String,
        back: String,
    },
    #[error("line `{0}` has a distinct sigma partner and must not carry a sign")]
    SignOnPairedLine(String),
    #[error("self-partnered line `{0}` needs a sign (orthogonal or symplectic)")]
    MissingSignOnSelfDualLine(String),
    #[error("partnered lines `{line}` (degree {degree}) and `{partner}` (degree {partner_degree}) differ in degree")]
    DegreeMismatch {
        line: String,
        degree: u32,
        partner: String,
        partner_degree: u32,
    },
}

/// Index of a line inside its [`LineTable`].
///
/// Tables store lines sorted by name, so comparing ids compares names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LineId(pub(crate) u32);

impl LineId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A validated set of line declarations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineTable {
    lines: Vec<CuspidalLine>,
    partners: Vec<LineId>,
    by_name: HashMap<String, LineId>,
}

/// Checks that the partner map is a degree-preserving involution and that
/// signs are declared exactly on self-partnered lines.
pub fn validate_line_table(lines: &[CuspidalLine]) -> Result<(), LineTableError> {
    LineTable::new(lines.to_vec()).map(|_| ())
}

impl LineTable {
    pub fn new(mut lines: Vec<CuspidalLine>) -> Result<Self, LineTableError> {
        lines.sort_by(|a, b| a.name.cmp(&b.name));
        let mut by_name = HashMap::with_capacity(lines.len());
        for (i, line) in lines.iter().enumerate() {
            if by_name.insert(line.name.clone(), LineId(i as u32)).is_some() {
                return Err(LineTableError::DuplicateLine(line.name.clone()));
            }
        }

        let mut partners = Vec::with_capacity(lines.len());
        for line in &lines {
            if line.degree == 0 {
                return Err(LineTableError::ZeroDegree(line.name.clone()));
            }
            let partner_id = *by_name.get(&line.sigma_partner).ok_or_else(|| {
                LineTableError::DanglingPartner {
                    line: line.name.clone(),
                    partner: line.sigma_partner.clone(),
                }
            })?;
            let partner = &lines[partner_id.index()];
            if partner.sigma_partner != line.name {
                return Err(LineTableError::AsymmetricPartner {
                    line: line.name.clone(),
                    partner: partner.name.clone(),
                    back: partner.sigma_partner.clone(),
                });
            }
            match (line.is_self_partnered(), line.self_sign) {
                (true, None) => {
                    return Err(LineTableError::MissingSignOnSelfDualLine(line.name.clone()))
                }
                (false, Some(_)) => return Err(LineTableError::SignOnPairedLine(line.name.clone())),
                _ => {}
            }
            if partner.degree != line.degree {
                return Err(LineTableError::DegreeMismatch {
                    line: line.name.clone(),
                    degree: line.degree,
                    partner: partner.name.clone(),
                    partner_degree: partner.degree,
                });
            }
            partners.push(partner_id);
        }

        Ok(LineTable {
            lines,
            partners,
            by_name,
        })
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = LineId> {
        (0..self.lines.len() as u32).map(LineId)
    }

    pub fn lookup(&self, name: &str) -> Option<LineId> {
        self.by_name.get(name).copied()
    }

    pub fn contains(&self, id: LineId) -> bool {
        id.index() < self.lines.len()
    }

    pub fn line(&self, id: LineId) -> &CuspidalLine {
        &self.lines[id.index()]
    }

    pub fn lines(&self) -> &[CuspidalLine] {
        &self.lines
    }

    pub fn name(&self, id: LineId) -> &str {
        &self.lines[id.index()].name
    }

    pub fn degree(&self, id: LineId) -> u32 {
        self.lines[id.index()].degree
    }

    pub fn partner(&self, id: LineId) -> LineId {
        self.partners[id.index()]
    }

    /// The declared sign of a self-partnered line, `None` otherwise.
    pub fn self_sign(&self, id: LineId) -> Option<Sign> {
        self.lines[id.index()].self_sign
    }
}
