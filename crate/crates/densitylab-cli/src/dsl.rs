//! Recursive-descent parser for the set-expression grammar.
//!
//! `periodic(m,{residues},threshold,{patch})` is accepted as an extension so
//! that every printed normal form parses back.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use densitylab::setkit::{FactorialVariant, PeriodicSet, SetError, SetExpr};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DslError {
    /// Byte offset into the source, the tokens that would have been accepted
    /// there, and what was found instead.
    #[error("parse error at {position}: expected {}, found {found}", expected.join(" | "))]
    Parse { position: usize, expected: Vec<String>, found: String },
    #[error("{message} (at {position})")]
    Domain { position: usize, message: String },
}

impl DslError {
    pub fn position(&self) -> usize {
        match self {
            DslError::Parse { position, .. } | DslError::Domain { position, .. } => *position,
        }
    }
}

const KEYWORDS: [&str; 18] = [
    "ap",
    "interval",
    "finite",
    "squares",
    "primes",
    "full",
    "empty",
    "valpha",
    "rangeset",
    "fblocks",
    "fblocks_full",
    "union",
    "inter",
    "diff",
    "symdiff",
    "compl",
    "affine",
    "periodic",
];

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(String),
    Punct(char),
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "{s:?}"),
            Tok::Int(s) => write!(f, "integer {s}"),
            Tok::Punct(c) => write!(f, "'{c}'"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

fn quote(c: char) -> String {
    format!("'{c}'")
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    /// The next token and the offset where it starts, without consuming it.
    fn peek(&mut self) -> (Tok, usize) {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let Some(c) = rest.chars().next() else { return (Tok::End, self.pos) };
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            let n = rest.find(|ch: char| !(ch.is_ascii_alphanumeric() || ch == '_')).unwrap_or(rest.len());
            Tok::Ident(rest[..n].to_string())
        } else if c.is_ascii_digit() || c == '-' {
            let body = &rest[c.len_utf8()..];
            let n = body.find(|ch: char| !ch.is_ascii_digit()).unwrap_or(body.len());
            Tok::Int(rest[..c.len_utf8() + n].to_string())
        } else {
            Tok::Punct(c)
        };
        (tok, self.pos)
    }

    fn bump(&mut self, t: &Tok) {
        self.pos += match t {
            Tok::Ident(s) | Tok::Int(s) => s.len(),
            Tok::Punct(c) => c.len_utf8(),
            Tok::End => 0,
        };
    }

    fn fail<T>(&mut self, expected: &[&str]) -> Result<T, DslError> {
        let (t, at) = self.peek();
        Err(DslError::Parse { position: at, expected: expected.iter().map(|s| s.to_string()).collect(), found: t.to_string() })
    }

    fn punct(&mut self, c: char) -> Result<(), DslError> {
        match self.peek().0 {
            Tok::Punct(p) if p == c => {
                self.pos += c.len_utf8();
                Ok(())
            }
            _ => self.fail(&[&quote(c)]),
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek().0 == Tok::Punct(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    /// A signed integer literal, kept as text so range checks can report it.
    fn int_text(&mut self) -> Result<(String, usize), DslError> {
        match self.peek() {
            (t @ Tok::Int(_), at) => {
                self.bump(&t);
                let Tok::Int(s) = t else { unreachable!() };
                if s == "-" {
                    return Err(DslError::Parse { position: at, expected: vec!["integer".into()], found: "'-'".into() });
                }
                Ok((s, at))
            }
            _ => self.fail(&["integer"]),
        }
    }

    fn uint<T: std::str::FromStr>(&mut self) -> Result<T, DslError> {
        let (s, at) = self.int_text()?;
        s.parse::<T>().map_err(|_| DslError::Domain { position: at, message: format!("{s} is not a nonnegative integer in range") })
    }

    fn rational(&mut self) -> Result<(BigRational, usize), DslError> {
        let (n, at) = self.int_text()?;
        let n: BigInt = n.parse().expect("lexer yields digits");
        let d: BigInt = if self.eat('/') {
            let (d, dat) = self.int_text()?;
            let d: BigInt = d.parse().expect("lexer yields digits");
            if d == BigInt::from(0) {
                return Err(DslError::Domain { position: dat, message: "zero denominator".into() });
            }
            d
        } else {
            BigInt::from(1)
        };
        Ok((BigRational::new(n, d), at))
    }

    /// Comma-separated integers up to (not including) `close`; may be empty.
    fn list<T: std::str::FromStr>(&mut self, close: char) -> Result<Vec<T>, DslError> {
        let mut out = Vec::new();
        if self.peek().0 == Tok::Punct(close) {
            return Ok(out);
        }
        loop {
            out.push(self.uint()?);
            if !self.eat(',') {
                return Ok(out);
            }
        }
    }

    fn domain(at: usize) -> impl Fn(SetError) -> DslError {
        move |e| DslError::Domain { position: at, message: e.to_string() }
    }

    fn binary(&mut self, build: fn(SetExpr, SetExpr) -> SetExpr) -> Result<SetExpr, DslError> {
        self.punct('(')?;
        let a = self.expr()?;
        self.punct(',')?;
        let b = self.expr()?;
        self.punct(')')?;
        Ok(build(a, b))
    }

    fn expr(&mut self) -> Result<SetExpr, DslError> {
        let (t, at) = self.peek();
        let Tok::Ident(name) = &t else {
            return self.fail(&KEYWORDS);
        };
        let name = name.clone();
        self.bump(&t);
        let dom = Self::domain(at);
        Ok(match name.as_str() {
            "squares" => SetExpr::squares(),
            "primes" => SetExpr::primes(),
            "full" => SetExpr::Full,
            "empty" => SetExpr::Empty,
            "fblocks" => SetExpr::fblocks(FactorialVariant::Standard),
            "fblocks_full" => SetExpr::fblocks(FactorialVariant::Full),
            "ap" => {
                self.punct('(')?;
                let k = self.uint()?;
                self.punct(',')?;
                let h = self.uint()?;
                self.punct(')')?;
                SetExpr::ap(k, h).map_err(dom)?
            }
            "interval" => {
                self.punct('(')?;
                let a = self.uint()?;
                self.punct(',')?;
                let b = self.uint()?;
                self.punct(')')?;
                SetExpr::interval(a, b)
            }
            "finite" => {
                self.punct('{')?;
                let xs: Vec<u64> = self.list('}')?;
                self.punct('}')?;
                SetExpr::finite(xs)
            }
            "valpha" => {
                self.punct('(')?;
                let (q, qat) = self.rational()?;
                self.punct(')')?;
                SetExpr::valpha(q).map_err(Self::domain(qat))?
            }
            "rangeset" => {
                self.punct('(')?;
                let bits: Vec<u32> = self.list(')')?;
                self.punct(')')?;
                SetExpr::rangeset(bits).map_err(dom)?
            }
            "periodic" => {
                self.punct('(')?;
                let m = self.uint()?;
                self.punct(',')?;
                self.punct('{')?;
                let res: Vec<u64> = self.list('}')?;
                self.punct('}')?;
                self.punct(',')?;
                let threshold = self.uint()?;
                self.punct(',')?;
                self.punct('{')?;
                let patch: Vec<u64> = self.list('}')?;
                self.punct('}')?;
                self.punct(')')?;
                SetExpr::Periodic(PeriodicSet::from_parts(m, res, threshold, patch).map_err(dom)?)
            }
            "union" => self.binary(SetExpr::union)?,
            "inter" => self.binary(SetExpr::inter)?,
            "diff" => self.binary(SetExpr::diff)?,
            "symdiff" => self.binary(SetExpr::symdiff)?,
            "compl" => {
                self.punct('(')?;
                let a = self.expr()?;
                self.punct(')')?;
                SetExpr::compl(a)
            }
            "affine" => {
                self.punct('(')?;
                let k = self.uint()?;
                self.punct(',')?;
                let h = self.uint()?;
                self.punct(',')?;
                let a = self.expr()?;
                self.punct(')')?;
                SetExpr::affine(k, h, a).map_err(dom)?
            }
            _ => {
                self.pos = at;
                return self.fail(&KEYWORDS);
            }
        })
    }
}

/// Parses a whole expression; trailing input is an error.
pub fn parse_set_expr(text: &str) -> Result<SetExpr, DslError> {
    let mut p = Parser { src: text, pos: 0 };
    let e = p.expr()?;
    match p.peek().0 {
        Tok::End => Ok(e),
        _ => p.fail(&["end of input"]),
    }
}
