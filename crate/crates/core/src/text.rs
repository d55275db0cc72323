//! Canonical text form for polynomials and ħ-series, and its parser.
//!
//! Terms are printed highest graded-lex monomial first. Coefficients use
//! an explicit `i` token (`1/2 i`, `(3/2 - i)`), and ħ appears as `hbar^k`.
//! The parser accepts everything the printer emits plus ordinary infix
//! input: `+ - * / ^`, parentheses and juxtaposition for products.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::{Monomial, MultiPoly, Vars};
use crate::scalar::GaussianRational;
use crate::series::{HbarSeries, MIN_HBAR};

pub const HBAR: &str = "hbar";

pub(crate) fn format_monomial(m: &Monomial, names: &[String]) -> String {
    let mut parts = Vec::new();
    for (e, name) in m.exps().iter().zip(names.iter()) {
        match e {
            0 => {}
            1 => parts.push(name.clone()),
            _ => parts.push(format!("{name}^{e}")),
        }
    }
    parts.join("*")
}

fn format_term(c: &GaussianRational, mono: &str) -> String {
    if mono.is_empty() {
        return c.canonical();
    }
    if c.is_one() {
        return mono.to_string();
    }
    if (-c).is_one() {
        return format!("-{mono}");
    }
    format!("{}*{}", c.canonical(), mono)
}

fn join_terms(terms: Vec<String>) -> String {
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (idx, t) in terms.into_iter().enumerate() {
        if idx == 0 {
            out.push_str(&t);
        } else if let Some(rest) = t.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(rest);
        } else {
            out.push_str(" + ");
            out.push_str(&t);
        }
    }
    out
}

pub fn format_poly(p: &MultiPoly) -> String {
    let terms = p
        .terms()
        .iter()
        .rev()
        .map(|(m, c)| format_term(c, &format_monomial(m, p.vars())))
        .collect();
    join_terms(terms)
}

pub fn format_series(s: &HbarSeries) -> String {
    let mut terms = Vec::new();
    for (k, p) in s.coeffs().iter() {
        if *k == 0 {
            if p.len() == 1 {
                terms.push(format_poly(p));
            } else {
                terms.push(format!("({})", format_poly(p)));
            }
        } else {
            terms.push(format!("{HBAR}^{k}*({})", format_poly(p)));
        }
    }
    join_terms(terms)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(s: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = s.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            d if d.is_ascii_digit() => {
                while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                    i += 1;
                }
                out.push((start, Tok::Num(s[start..i].parse().unwrap())));
                continue;
            }
            a if a.is_ascii_alphabetic() || a == '_' => {
                while i < bytes.len() && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(s[start..i].to_string())));
                continue;
            }
            other => {
                return Err(Error::Parse {
                    pos: i,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

/// Laurent polynomial in ħ with polynomial coefficients, used while parsing.
#[derive(Clone)]
struct Laurent {
    vars: Vars,
    map: BTreeMap<i32, MultiPoly>,
}

impl Laurent {
    fn zero(vars: Vars) -> Self {
        Laurent {
            vars,
            map: BTreeMap::new(),
        }
    }

    fn scalar(vars: Vars, c: GaussianRational) -> Self {
        let mut l = Laurent::zero(vars.clone());
        l.add(0, &MultiPoly::constant(vars, c));
        l
    }

    fn add(&mut self, k: i32, p: &MultiPoly) {
        if p.is_zero() {
            return;
        }
        let e = self.map.entry(k).or_insert_with(|| MultiPoly::zero(self.vars.clone()));
        e.add_assign_ref(p);
        if e.is_zero() {
            self.map.remove(&k);
        }
    }

    fn plus(mut self, other: &Laurent) -> Laurent {
        for (k, p) in other.map.iter() {
            self.add(*k, p);
        }
        self
    }

    fn neg(&self) -> Laurent {
        Laurent {
            vars: self.vars.clone(),
            map: self.map.iter().map(|(k, p)| (*k, -p)).collect(),
        }
    }

    fn times(&self, other: &Laurent) -> Laurent {
        let mut out = Laurent::zero(self.vars.clone());
        for (ka, pa) in self.map.iter() {
            for (kb, pb) in other.map.iter() {
                out.add(ka + kb, &(pa * pb));
            }
        }
        out
    }

    /// `Some(k)` when the value is exactly `ħ^k`.
    fn as_hbar_power(&self) -> Option<i32> {
        if self.map.len() != 1 {
            return None;
        }
        let (k, p) = self.map.iter().next().unwrap();
        if p.len() == 1 && p.is_constant() && p.constant_term().is_one() {
            Some(*k)
        } else {
            None
        }
    }
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    vars: &'a Vars,
    len: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.len)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.here(),
            msg: msg.into(),
        })
    }

    fn expr(&mut self) -> Result<Laurent> {
        let mut negate = false;
        match self.peek() {
            Some(Tok::Plus) => self.pos += 1,
            Some(Tok::Minus) => {
                negate = true;
                self.pos += 1;
            }
            _ => {}
        }
        let first = self.term()?;
        let mut acc = if negate { first.neg() } else { first };
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.plus(&t);
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.plus(&t.neg());
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Laurent> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    let f = self.factor()?;
                    acc = acc.times(&f);
                }
                Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::LParen) => {
                    let f = self.factor()?;
                    acc = acc.times(&f);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Laurent> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let neg = if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            true
        } else {
            false
        };
        let e: i64 = match self.peek() {
            Some(Tok::Num(n)) => match i64::try_from(n.clone()) {
                Ok(v) if v <= 4096 => v,
                _ => return self.err("exponent too large"),
            },
            _ => return self.err("expected integer exponent"),
        };
        self.pos += 1;
        if let Some(k) = base.as_hbar_power() {
            let k = k as i64 * if neg { -e } else { e };
            let mut l = Laurent::zero(self.vars.clone());
            l.add(k as i32, &MultiPoly::one(self.vars.clone()));
            return Ok(l);
        }
        if neg {
            return self.err("negative exponents are only allowed on hbar");
        }
        let mut acc = Laurent::scalar(self.vars.clone(), GaussianRational::one());
        for _ in 0..e {
            acc = acc.times(&base);
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Laurent> {
        let vars = self.vars.clone();
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                let mut r = BigRational::from_integer(n);
                if self.peek() == Some(&Tok::Slash) {
                    self.pos += 1;
                    match self.peek().cloned() {
                        Some(Tok::Num(d)) if !d.is_zero() => {
                            self.pos += 1;
                            r /= BigRational::from_integer(d);
                        }
                        Some(Tok::Num(_)) => return self.err("zero denominator"),
                        _ => return self.err("expected denominator"),
                    }
                }
                Ok(Laurent::scalar(vars, GaussianRational::from(r)))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if name == "i" {
                    return Ok(Laurent::scalar(vars, GaussianRational::i()));
                }
                if name == HBAR {
                    let mut l = Laurent::zero(vars.clone());
                    l.add(1, &MultiPoly::one(vars));
                    return Ok(l);
                }
                match vars.iter().position(|v| *v == name) {
                    Some(idx) => {
                        let mut l = Laurent::zero(vars.clone());
                        l.add(0, &MultiPoly::var_index(vars, idx));
                        Ok(l)
                    }
                    None => {
                        self.pos -= 1;
                        self.err(format!("unknown variable `{name}`"))
                    }
                }
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.err("expected `)`");
                }
                self.pos += 1;
                Ok(e)
            }
            Some(t) => self.err(format!("unexpected token {t:?}")),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses into ħ-exponent → coefficient, allowing any integer exponent.
pub(crate) fn parse_hbar_terms(s: &str, vars: &Vars) -> Result<BTreeMap<i32, MultiPoly>> {
    Ok(parse_laurent(s, vars)?.map)
}

fn parse_laurent(s: &str, vars: &Vars) -> Result<Laurent> {
    let toks = lex(s)?;
    let mut p = Parser {
        toks,
        pos: 0,
        vars,
        len: s.len(),
    };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

/// Parses a polynomial; `hbar` must not occur.
pub fn parse_poly(s: &str, vars: &Vars) -> Result<MultiPoly> {
    let l = parse_laurent(s, vars)?;
    let mut out = MultiPoly::zero(vars.clone());
    for (k, p) in l.map {
        if k != 0 {
            return Err(Error::Parse {
                pos: 0,
                msg: "hbar is not allowed in a polynomial".into(),
            });
        }
        out = p;
    }
    Ok(out)
}

/// Parses an ħ-series; exponents above `trunc` are dropped.
pub fn parse_series(s: &str, vars: &Vars, trunc: i32) -> Result<HbarSeries> {
    let l = parse_laurent(s, vars)?;
    let mut out = HbarSeries::zero(vars.clone(), trunc);
    for (k, p) in l.map {
        if k < MIN_HBAR {
            return Err(Error::HbarUnderflow(k));
        }
        out.add_poly(k, &p)?;
    }
    Ok(out)
}
