//! Series literal syntax: parsing and canonical printing.
//!
//! ```text
//! expr   := ['+' | '-'] term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | atom ['^' uint]
//! atom   := integer | 'i' | name | '(' expr ')'
//! ```
//!
//! Division is only by nonzero constants. Decimal points and implicit
//! multiplication (`2z1`) are rejected.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::coeff::GaussRational;
use crate::error::{Error, Result};
use crate::series::{Exps, Monomial, Series};

const MAX_DEPTH: usize = 256;
const MAX_EXPONENT: u64 = 1000;

/// Names of the variable slots of a series space, plus optional aliases.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarNames {
    names: Vec<String>,
    aliases: HashMap<String, usize>,
}

impl VarNames {
    pub fn new(names: Vec<String>) -> Self {
        Self { names, aliases: HashMap::new() }
    }

    /// `z1..zn, c1..cn, s`.
    pub fn cr(n: usize) -> Self {
        let mut names: Vec<String> = (1..=n).map(|a| format!("z{a}")).collect();
        names.extend((1..=n).map(|a| format!("c{a}")));
        names.push("s".into());
        Self::new(names)
    }

    /// `z1..zn, w`: holomorphic coordinates of the ambient space.
    pub fn ambient(n: usize) -> Self {
        let mut names: Vec<String> = (1..=n).map(|a| format!("z{a}")).collect();
        names.push("w".into());
        Self::new(names)
    }

    /// `t, y1..yN`.
    pub fn briot_bouquet(n: usize) -> Self {
        let mut names = vec!["t".to_string()];
        names.extend((1..=n).map(|j| format!("y{j}")));
        Self::new(names)
    }

    pub fn univariate(name: &str) -> Self {
        Self::new(vec![name.to_string()])
    }

    pub fn anonymous(nvars: usize) -> Self {
        Self::new((1..=nvars).map(|j| format!("v{j}")).collect())
    }

    pub fn with_alias(mut self, alias: &str, slot: usize) -> Self {
        self.aliases.insert(alias.to_string(), slot);
        self
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, slot: usize) -> &str {
        &self.names[slot]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn slot(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name).or_else(|| self.aliases.get(name).copied())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut col) = (1usize, 1usize);
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        let (tl, tc) = (line, col);
        if ch == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if ch.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if ch.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i < chars.len() && (chars[i] == '.' || chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '.' || chars[j] == '-') {
                    j += 1;
                }
                let text: String = chars[start..j].iter().collect();
                return Err(Error::NonRational { line: tl, col: tc, text });
            }
            let text: String = chars[start..i].iter().collect();
            col += i - start;
            let v: BigInt = text.parse().expect("digits");
            out.push(Token { tok: Tok::Int(v), line: tl, col: tc });
            continue;
        }
        if ch == '.' {
            let mut j = i + 1;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let text: String = chars[i..j].iter().collect();
            return Err(Error::NonRational { line: tl, col: tc, text });
        }
        if ch.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - start;
            let text: String = chars[start..i].iter().collect();
            out.push(Token { tok: Tok::Ident(text), line: tl, col: tc });
            continue;
        }
        let tok = match ch {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            other => {
                return Err(Error::Parse { line: tl, col: tc, msg: format!("unexpected character '{other}'") })
            }
        };
        out.push(Token { tok, line: tl, col: tc });
        i += 1;
        col += 1;
    }
    out.push(Token { tok: Tok::End, line, col });
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    names: &'a VarNames,
    trunc: i32,
    depth: usize,
}

impl Parser<'_> {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, t: &Token, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { line: t.line, col: t.col, msg: msg.into() })
    }

    fn enter(&mut self) -> Result<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            let t = self.peek().clone();
            return self.err(&t, "expression nested too deeply");
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Series> {
        self.enter()?;
        let mut acc = match self.peek().tok {
            Tok::Plus => {
                self.bump();
                self.term()?
            }
            Tok::Minus => {
                self.bump();
                -&self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Tok::Minus => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => break,
            }
        }
        self.depth -= 1;
        Ok(acc)
    }

    fn term(&mut self) -> Result<Series> {
        let mut acc = self.factor()?;
        loop {
            match self.peek().tok {
                Tok::Star => {
                    self.bump();
                    acc = &acc * &self.factor()?;
                }
                Tok::Slash => {
                    self.bump();
                    let at = self.peek().clone();
                    let d = self.factor()?;
                    let c = d.constant_term();
                    if d.len() > 1 || (d.len() == 1 && c.is_zero()) {
                        return self.err(&at, "divisor must be a constant");
                    }
                    match c.inv() {
                        Some(inv) => acc = acc.scale(&inv),
                        None => return self.err(&at, "division by zero"),
                    }
                }
                Tok::Int(_) | Tok::Ident(_) | Tok::LParen => {
                    let t = self.peek().clone();
                    return self.err(&t, "implicit multiplication; use '*'");
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Series> {
        if self.peek().tok == Tok::Minus {
            self.bump();
            self.enter()?;
            let f = self.factor()?;
            self.depth -= 1;
            return Ok(-&f);
        }
        let base = self.atom()?;
        if self.peek().tok == Tok::Caret {
            self.bump();
            let t = self.bump();
            let e = match &t.tok {
                Tok::Int(v) => v.clone(),
                _ => return self.err(&t, "exponent must be a nonnegative integer"),
            };
            let e: u64 = match u64::try_from(e) {
                Ok(e) if e <= MAX_EXPONENT => e,
                _ => return self.err(&t, format!("exponent exceeds {MAX_EXPONENT}")),
            };
            if self.peek().tok == Tok::Caret {
                let t = self.peek().clone();
                return self.err(&t, "chained powers need parentheses");
            }
            return Ok(base.pow(e as u32));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Series> {
        let nv = self.names.len();
        let t = self.bump();
        match t.tok {
            Tok::Int(v) => Ok(Series::constant(nv, self.trunc, BigRational::from_integer(v).into())),
            Tok::Ident(ref name) if name == "i" => Ok(Series::constant(nv, self.trunc, GaussRational::i())),
            Tok::Ident(ref name) => match self.names.slot(name) {
                Some(slot) => Ok(Series::var(nv, slot, self.trunc)),
                None => Err(Error::Arity(format!(
                    "unknown variable '{name}' at line {}, column {}; expected one of {}",
                    t.line,
                    t.col,
                    self.names.names().join(", ")
                ))),
            },
            Tok::LParen => {
                let inner = self.expr()?;
                let close = self.bump();
                if close.tok != Tok::RParen {
                    return self.err(&close, "expected ')'");
                }
                Ok(inner)
            }
            Tok::End => self.err(&t, "unexpected end of input"),
            _ => self.err(&t, "expected a number, variable or '('"),
        }
    }
}

/// Parse a literal in the given variable space. The result is exact through
/// `trunc`; higher-degree terms are dropped.
pub fn parse_series(src: &str, names: &VarNames, trunc: i32) -> Result<Series> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, names, trunc, depth: 0 };
    if p.peek().tok == Tok::End {
        let t = p.peek().clone();
        return p.err(&t, "empty series literal");
    }
    let s = p.expr()?;
    let t = p.peek().clone();
    match t.tok {
        Tok::End => Ok(s.with_trunc(trunc)),
        Tok::Int(_) | Tok::Ident(_) | Tok::LParen => p.err(&t, "implicit multiplication; use '*'"),
        _ => p.err(&t, "unexpected token"),
    }
}

/// Parse a coefficient literal (no variables).
pub fn parse_coeff(src: &str) -> Result<GaussRational> {
    let names = VarNames::new(Vec::new());
    let s = parse_series(src, &names, 0)?;
    Ok(s.constant_term())
}

pub struct SeriesDisplay<'a> {
    pub(crate) series: &'a Series,
    pub(crate) names: &'a VarNames,
}

fn split_sign(c: &GaussRational) -> (bool, GaussRational) {
    let neg = (c.im.is_zero() && c.re.is_negative()) || (c.re.is_zero() && c.im.is_negative());
    if neg {
        (true, -c)
    } else {
        (false, c.clone())
    }
}

fn write_monomial(f: &mut fmt::Formatter<'_>, exps: &[u16], names: &VarNames) -> fmt::Result {
    let mut first = true;
    for (slot, &e) in exps.iter().enumerate() {
        if e == 0 {
            continue;
        }
        if !first {
            write!(f, "*")?;
        }
        first = false;
        write!(f, "{}", names.name(slot))?;
        if e > 1 {
            write!(f, "^{e}")?;
        }
    }
    Ok(())
}

impl fmt::Display for SeriesDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.series.is_zero() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.series.terms().enumerate() {
            let (neg, mag) = split_sign(c);
            match (idx, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if m.degree() == 0 {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write_monomial(f, m.exps(), self.names)?;
            } else {
                write!(f, "{mag}*")?;
                write_monomial(f, m.exps(), self.names)?;
            }
        }
        Ok(())
    }
}

/// Exponent vector from `(slot, exponent)` pairs.
pub fn exps_of(nvars: usize, pairs: &[(usize, u16)]) -> Monomial {
    let mut e: Exps = smallvec::SmallVec::from_elem(0, nvars);
    for &(slot, p) in pairs {
        e[slot] += p;
    }
    Monomial::new(e)
}
