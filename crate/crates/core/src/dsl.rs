//! Text format for line tables and multisegments.
//!
//! ```text
//! file     := decl* binding*
//! decl     := "line" NAME "{" "degree" "=" INT "," "sigma" "=" sigma "}"
//! sigma    := "self" ("orthogonal" | "symplectic") | NAME
//! binding  := "pi" NAME "=" seg ("+" seg)*
//! seg      := "St" "(" INT "," NAME ("," RAT)? ")"
//! RAT      := ["-"] INT | ["-"] INT "/" "2"
//! ```
//!
//! `--` starts a comment that runs to the end of the line. Keywords are
//! reserved and cannot be used as names.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::line::{CuspidalLine, LineTable, LineTableError, Sign};
use crate::multisegment::Multisegment;
use crate::scalar::Exponent;
use crate::segment::{Segment, SegmentError};

const KEYWORDS: [&str; 8] = [
    "line",
    "degree",
    "sigma",
    "self",
    "orthogonal",
    "symplectic",
    "pi",
    "St",
];

/// Largest accepted degree or segment length.
pub const MAX_LITERAL: u64 = 10_000;
/// Largest accepted total degree of a binding.
pub const MAX_TOTAL_DEGREE: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DslError {
    #[error("input is not valid UTF-8 (at byte {0})")]
    InvalidUtf8(usize),
    #[error("{pos}: {message}")]
    Syntax { pos: Pos, message: String },
    #[error("{pos}: exponent {text} is not allowed; exponents are written as k or k/2")]
    BadExponent { pos: Pos, text: String },
    #[error("{pos}: {message}")]
    OutOfRange { pos: Pos, message: String },
    #[error("{pos}: line `{name}` is declared more than once")]
    DuplicateLine { pos: Pos, name: String },
    #[error("{pos}: multisegment `{name}` is bound more than once")]
    DuplicateBinding { pos: Pos, name: String },
    #[error("{pos}: segment refers to undeclared line `{name}`")]
    DanglingLine { pos: Pos, name: String },
    #[error("invalid line table: {0}")]
    LineTable(#[from] LineTableError),
    #[error("{pos}: {source}")]
    Segment { pos: Pos, source: SegmentError },
    #[error("no multisegment named `{0}`")]
    UnknownBinding(String),
}

impl DslError {
    pub fn pos(&self) -> Option<Pos> {
        match self {
            DslError::Syntax { pos, .. }
            | DslError::BadExponent { pos, .. }
            | DslError::OutOfRange { pos, .. }
            | DslError::DuplicateLine { pos, .. }
            | DslError::DuplicateBinding { pos, .. }
            | DslError::DanglingLine { pos, .. }
            | DslError::Segment { pos, .. } => Some(*pos),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SigmaDecl {
    SelfDual(Sign),
    Partner(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineDecl {
    pub name: String,
    pub degree: u32,
    pub sigma: SigmaDecl,
    pub pos: Pos,
}

/// An exponent as written: `numer` or `numer/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExponentLit {
    pub numer: i64,
    pub halved: bool,
}

impl ExponentLit {
    pub fn halves(self) -> Option<i64> {
        if self.halved {
            Some(self.numer)
        } else {
            self.numer.checked_mul(2)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentLit {
    pub length: u32,
    pub line: String,
    pub exponent: Option<ExponentLit>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Binding {
    pub name: String,
    pub segments: Vec<SegmentLit>,
    pub pos: Pos,
}

/// Parsed, unresolved input.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SourceFile {
    pub lines: Vec<LineDecl>,
    pub bindings: Vec<Binding>,
}

impl SourceFile {
    /// Same syntax tree with all positions cleared.
    pub fn without_positions(&self) -> SourceFile {
        let mut out = self.clone();
        for l in &mut out.lines {
            l.pos = Pos::default();
        }
        for b in &mut out.bindings {
            b.pos = Pos::default();
            for s in &mut b.segments {
                s.pos = Pos::default();
            }
        }
        out
    }

    /// Builds the line table and every binding.
    pub fn resolve<S: Exponent>(&self) -> Result<Program<S>, DslError> {
        let mut names = HashSet::new();
        for decl in &self.lines {
            if !names.insert(decl.name.as_str()) {
                return Err(DslError::DuplicateLine {
                    pos: decl.pos,
                    name: decl.name.clone(),
                });
            }
        }
        let lines = self
            .lines
            .iter()
            .map(|d| match &d.sigma {
                SigmaDecl::SelfDual(sign) => CuspidalLine::self_dual(d.name.clone(), d.degree, *sign),
                SigmaDecl::Partner(p) => CuspidalLine::paired(d.name.clone(), d.degree, p.clone()),
            })
            .collect();
        let table = Arc::new(LineTable::new(lines)?);

        let mut bound = HashSet::new();
        let mut bindings = Vec::with_capacity(self.bindings.len());
        for binding in &self.bindings {
            if !bound.insert(binding.name.as_str()) {
                return Err(DslError::DuplicateBinding {
                    pos: binding.pos,
                    name: binding.name.clone(),
                });
            }
            let mut segments = Vec::with_capacity(binding.segments.len());
            let mut total = 0u64;
            for lit in &binding.segments {
                let line = table.lookup(&lit.line).ok_or_else(|| DslError::DanglingLine {
                    pos: lit.pos,
                    name: lit.line.clone(),
                })?;
                let exponent = match lit.exponent {
                    None => S::zero(),
                    Some(e) => e.halves().and_then(S::from_halves).ok_or_else(|| {
                        DslError::OutOfRange {
                            pos: lit.pos,
                            message: "exponent does not fit the scalar type".into(),
                        }
                    })?,
                };
                let seg = Segment::new(line, lit.length, exponent)
                    .map_err(|source| DslError::Segment { pos: lit.pos, source })?;
                total += seg.ambient_degree(&table) as u64;
                if total > MAX_TOTAL_DEGREE {
                    return Err(DslError::OutOfRange {
                        pos: lit.pos,
                        message: format!("total degree exceeds {MAX_TOTAL_DEGREE}"),
                    });
                }
                segments.push(seg);
            }
            let pi = Multisegment::new(Arc::clone(&table), segments)
                .expect("segment lines come from this table");
            bindings.push((binding.name.clone(), pi));
        }
        Ok(Program { table, bindings })
    }
}

/// Resolved input.
#[derive(Debug, Clone)]
pub struct Program<S> {
    pub table: Arc<LineTable>,
    pub bindings: Vec<(String, Multisegment<S>)>,
}

impl<S: Exponent> Program<S> {
    pub fn get(&self, name: &str) -> Result<&Multisegment<S>, DslError> {
        self.bindings
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, pi)| pi)
            .ok_or_else(|| DslError::UnknownBinding(name.to_string()))
    }
}

impl fmt::Display for ExponentLit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.halved {
            write!(f, "{}/2", self.numer)
        } else {
            write!(f, "{}", self.numer)
        }
    }
}

impl fmt::Display for SourceFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for decl in &self.lines {
            let sigma = match &decl.sigma {
                SigmaDecl::SelfDual(Sign::Plus) => "self orthogonal".to_string(),
                SigmaDecl::SelfDual(Sign::Minus) => "self symplectic".to_string(),
                SigmaDecl::Partner(p) => p.clone(),
            };
            writeln!(
                f,
                "line {} {{ degree = {}, sigma = {} }}",
                decl.name, decl.degree, sigma
            )?;
        }
        for binding in &self.bindings {
            write!(f, "pi {} =", binding.name)?;
            for (k, seg) in binding.segments.iter().enumerate() {
                if k > 0 {
                    f.write_str(" +")?;
                }
                write!(f, " St({}, {}", seg.length, seg.line)?;
                if let Some(e) = seg.exponent {
                    write!(f, ", {e}")?;
                }
                f.write_str(")")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(u64),
    Minus,
    Slash,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Equals,
    Plus,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Minus => f.write_str("`-`"),
            Tok::Slash => f.write_str("`/`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Equals => f.write_str("`=`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, DslError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let mut pos = Pos { line: 1, col: 1 };
    let advance = |c: char, pos: &mut Pos| {
        if c == '\n' {
            pos.line += 1;
            pos.col = 1;
        } else {
            pos.col += 1;
        }
    };
    while let Some(&c) = chars.peek() {
        let start = pos;
        if c.is_whitespace() {
            chars.next();
            advance(c, &mut pos);
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut ident = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    ident.push(c);
                    chars.next();
                    advance(c, &mut pos);
                } else {
                    break;
                }
            }
            out.push((Tok::Ident(ident), start));
            continue;
        }
        if c.is_ascii_digit() {
            let mut value: u64 = 0;
            let mut overflow = false;
            while let Some(&c) = chars.peek() {
                let Some(digit) = c.to_digit(10) else { break };
                match value.checked_mul(10).and_then(|v| v.checked_add(digit as u64)) {
                    Some(v) => value = v,
                    None => overflow = true,
                }
                chars.next();
                advance(c, &mut pos);
            }
            if overflow {
                return Err(DslError::OutOfRange {
                    pos: start,
                    message: "integer literal is too large".into(),
                });
            }
            out.push((Tok::Int(value), start));
            continue;
        }
        chars.next();
        advance(c, &mut pos);
        let tok = match c {
            '-' if chars.peek() == Some(&'-') => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                    advance(c, &mut pos);
                }
                continue;
            }
            '-' => Tok::Minus,
            '/' => Tok::Slash,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '=' => Tok::Equals,
            '+' => Tok::Plus,
            other => {
                return Err(DslError::Syntax {
                    pos: start,
                    message: format!("unexpected character {other:?}"),
                })
            }
        };
        out.push((tok, start));
    }
    out.push((Tok::Eof, pos));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, expected: &str) -> Result<T, DslError> {
        Err(DslError::Syntax {
            pos: self.pos(),
            message: format!("expected {expected}, found {}", self.peek()),
        })
    }

    fn expect(&mut self, tok: Tok) -> Result<(), DslError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.error(&tok.to_string())
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn keyword(&mut self, kw: &str) -> Result<(), DslError> {
        if self.at_keyword(kw) {
            self.bump();
            Ok(())
        } else {
            self.error(&format!("`{kw}`"))
        }
    }

    fn name(&mut self) -> Result<String, DslError> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            Tok::Ident(s) => Err(DslError::Syntax {
                pos: self.pos(),
                message: format!("`{s}` is a keyword and cannot be used as a name"),
            }),
            _ => self.error("a name"),
        }
    }

    fn positive(&mut self, what: &str) -> Result<u32, DslError> {
        let pos = self.pos();
        match *self.peek() {
            Tok::Int(n) => {
                self.bump();
                if n == 0 || n > MAX_LITERAL {
                    return Err(DslError::OutOfRange {
                        pos,
                        message: format!("{what} must be between 1 and {MAX_LITERAL}"),
                    });
                }
                Ok(n as u32)
            }
            _ => self.error(what),
        }
    }

    fn exponent(&mut self) -> Result<ExponentLit, DslError> {
        let pos = self.pos();
        let negative = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let magnitude = match *self.peek() {
            Tok::Int(n) => {
                self.bump();
                n
            }
            _ => return self.error("an exponent"),
        };
        let numer = i64::try_from(magnitude).map_err(|_| DslError::OutOfRange {
            pos,
            message: "exponent is too large".into(),
        })?;
        let numer = if negative { -numer } else { numer };
        if *self.peek() != Tok::Slash {
            return Ok(ExponentLit {
                numer,
                halved: false,
            });
        }
        self.bump();
        match *self.peek() {
            Tok::Int(2) => {
                self.bump();
                Ok(ExponentLit {
                    numer,
                    halved: true,
                })
            }
            Tok::Int(d) => Err(DslError::BadExponent {
                pos,
                text: format!("{numer}/{d}"),
            }),
            _ => self.error("denominator `2`"),
        }
    }

    fn line_decl(&mut self) -> Result<LineDecl, DslError> {
        let pos = self.pos();
        self.keyword("line")?;
        let name = self.name()?;
        self.expect(Tok::LBrace)?;
        self.keyword("degree")?;
        self.expect(Tok::Equals)?;
        let degree = self.positive("a degree")?;
        self.expect(Tok::Comma)?;
        self.keyword("sigma")?;
        self.expect(Tok::Equals)?;
        let sigma = if self.at_keyword("self") {
            self.bump();
            if self.at_keyword("orthogonal") {
                self.bump();
                SigmaDecl::SelfDual(Sign::Plus)
            } else if self.at_keyword("symplectic") {
                self.bump();
                SigmaDecl::SelfDual(Sign::Minus)
            } else {
                return self.error("`orthogonal` or `symplectic`");
            }
        } else {
            SigmaDecl::Partner(self.name()?)
        };
        self.expect(Tok::RBrace)?;
        Ok(LineDecl {
            name,
            degree,
            sigma,
            pos,
        })
    }

    fn segment(&mut self) -> Result<SegmentLit, DslError> {
        let pos = self.pos();
        self.keyword("St")?;
        self.expect(Tok::LParen)?;
        let length = self.positive("a segment length")?;
        self.expect(Tok::Comma)?;
        let line = self.name()?;
        let exponent = if *self.peek() == Tok::Comma {
            self.bump();
            Some(self.exponent()?)
        } else {
            None
        };
        self.expect(Tok::RParen)?;
        Ok(SegmentLit {
            length,
            line,
            exponent,
            pos,
        })
    }

    fn binding(&mut self) -> Result<Binding, DslError> {
        let pos = self.pos();
        self.keyword("pi")?;
        let name = self.name()?;
        self.expect(Tok::Equals)?;
        let mut segments = vec![self.segment()?];
        while *self.peek() == Tok::Plus {
            self.bump();
            segments.push(self.segment()?);
        }
        Ok(Binding {
            name,
            segments,
            pos,
        })
    }

    fn file(&mut self) -> Result<SourceFile, DslError> {
        let mut file = SourceFile::default();
        while self.at_keyword("line") {
            file.lines.push(self.line_decl()?);
        }
        while self.at_keyword("pi") {
            file.bindings.push(self.binding()?);
        }
        if *self.peek() != Tok::Eof {
            return if file.bindings.is_empty() {
                self.error("`line`, `pi` or end of input")
            } else {
                self.error("`pi` or end of input")
            };
        }
        Ok(file)
    }
}

pub fn parse(text: &str) -> Result<SourceFile, DslError> {
    let toks = lex(text)?;
    Parser { toks, at: 0 }.file()
}

pub fn parse_bytes(bytes: &[u8]) -> Result<SourceFile, DslError> {
    let text = std::str::from_utf8(bytes).map_err(|e| DslError::InvalidUtf8(e.valid_up_to()))?;
    parse(text)
}

/// Parses and resolves in one step.
pub fn load<S: Exponent>(text: &str) -> Result<Program<S>, DslError> {
    parse(text)?.resolve()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    #[test]
    fn minimal_file() {
        let src = parse("line a { degree = 2, sigma = self orthogonal }  pi p = St(1, a)").unwrap();
        assert_eq!(src.lines.len(), 1);
        assert_eq!(src.bindings.len(), 1);
        let prog: Program<Rational64> = src.resolve().unwrap();
        assert_eq!(prog.get("p").unwrap().total_degree(), 2);
    }

    #[test]
    fn undeclared_line_is_positioned() {
        let text = "line a { degree = 1, sigma = self orthogonal }\npi p = St(2, a, 1/2) + St(2, b)";
        let err = load::<Rational64>(text).unwrap_err();
        assert_eq!(
            err,
            DslError::DanglingLine {
                pos: Pos { line: 2, col: 24 },
                name: "b".into()
            }
        );
    }

    #[test]
    fn comments_and_partners() {
        let text = "-- two lines\nline b { degree = 1, sigma = c } -- paired\nline c { degree = 1, sigma = b }\npi q = St(1, b, -1/2) + St(1, c, 1/2)\n";
        let prog = load::<Rational64>(text).unwrap();
        let q = prog.get("q").unwrap();
        assert!(q.is_sigma_stable());
        assert_eq!(*q.segments()[0].exponent(), Rational64::new(-1, 2));
    }

    #[test]
    fn rejects_thirds() {
        let err = parse("pi p = St(1, a, 1/3)").unwrap_err();
        assert!(matches!(err, DslError::BadExponent { .. }));
        assert!(err.to_string().contains("k/2"));
    }

    #[test]
    fn keywords_are_reserved() {
        assert!(parse("line self { degree = 1, sigma = self orthogonal }").is_err());
    }

    #[test]
    fn declarations_precede_bindings() {
        let err = parse("pi p = St(1, a)\nline a { degree = 1, sigma = self orthogonal }").unwrap_err();
        assert!(matches!(err, DslError::Syntax { pos: Pos { line: 2, col: 1 }, .. }));
    }

    #[test]
    fn duplicates() {
        let dup_line = "line a { degree = 1, sigma = self orthogonal }\nline a { degree = 1, sigma = self orthogonal }";
        assert!(matches!(
            load::<Rational64>(dup_line),
            Err(DslError::DuplicateLine { .. })
        ));
        let dup_pi = "line a { degree = 1, sigma = self orthogonal }\npi p = St(1, a)\npi p = St(2, a)";
        assert!(matches!(
            load::<Rational64>(dup_pi),
            Err(DslError::DuplicateBinding { .. })
        ));
    }

    #[test]
    fn semantic_errors_flow_through() {
        let text = "line b { degree = 1, sigma = c }";
        assert!(matches!(
            load::<Rational64>(text),
            Err(DslError::LineTable(LineTableError::DanglingPartner { .. }))
        ));
        assert!(matches!(
            parse("line a { degree = 0, sigma = self orthogonal }"),
            Err(DslError::OutOfRange { .. })
        ));
        assert!(matches!(
            parse("line a { degree = 99999999999999999999999, sigma = self orthogonal }"),
            Err(DslError::OutOfRange { .. })
        ));
    }

    #[test]
    fn printing_roundtrips() {
        let text = "line a { degree = 2, sigma = self symplectic }\nline b { degree = 1, sigma = c }\nline c { degree = 1, sigma = b }\npi p = St(1, a) + St(3, b, -3/2) + St(1, c, 2/2)\n";
        let src = parse(text).unwrap();
        assert_eq!(src.to_string(), text);
        assert_eq!(parse(&src.to_string()).unwrap(), src);
    }

    #[test]
    fn invalid_utf8() {
        assert_eq!(parse_bytes(&[b'p', 0xff]), Err(DslError::InvalidUtf8(1)));
    }
}
