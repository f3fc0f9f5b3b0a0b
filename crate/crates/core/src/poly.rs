//! Sparse multivariate polynomials over the state vector, with a small
//! expression parser and natural interval extensions.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::ParseError;

/// Closed real interval used for range enclosures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "bad interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn point(v: f64) -> Self {
        Interval { lo: v, hi: v }
    }

    pub fn add(self, o: Interval) -> Interval {
        Interval { lo: self.lo + o.lo, hi: self.hi + o.hi }
    }

    pub fn scale(self, c: f64) -> Interval {
        if c >= 0.0 {
            Interval { lo: self.lo * c, hi: self.hi * c }
        } else {
            Interval { lo: self.hi * c, hi: self.lo * c }
        }
    }

    pub fn mul(self, o: Interval) -> Interval {
        let c = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        Interval {
            lo: c.iter().cloned().fold(f64::INFINITY, f64::min),
            hi: c.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        }
    }

    pub fn powi(self, k: u32) -> Interval {
        match k {
            0 => Interval::point(1.0),
            1 => self,
            _ if k % 2 == 0 => {
                let a = self.lo.abs().powi(k as i32);
                let b = self.hi.abs().powi(k as i32);
                if self.lo <= 0.0 && self.hi >= 0.0 {
                    Interval { lo: 0.0, hi: a.max(b) }
                } else {
                    Interval { lo: a.min(b), hi: a.max(b) }
                }
            }
            _ => Interval { lo: self.lo.powi(k as i32), hi: self.hi.powi(k as i32) },
        }
    }

    pub fn hull(self, o: Interval) -> Interval {
        Interval { lo: self.lo.min(o.lo), hi: self.hi.max(o.hi) }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

/// A polynomial `Σ c_k Π x_i^{e_ki}` over `arity` variables.
///
/// Terms are kept in a canonical map keyed by the exponent vector, so two
/// polynomials that differ only by term order compare equal.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    arity: usize,
    terms: BTreeMap<Vec<u32>, f64>,
}

impl Polynomial {
    pub fn zero(arity: usize) -> Self {
        Polynomial { arity, terms: BTreeMap::new() }
    }

    pub fn constant(arity: usize, c: f64) -> Self {
        let mut p = Self::zero(arity);
        p.add_term(vec![0; arity], c);
        p
    }

    pub fn variable(arity: usize, i: usize) -> Self {
        let mut e = vec![0; arity];
        e[i] = 1;
        let mut p = Self::zero(arity);
        p.add_term(e, 1.0);
        p
    }

    /// Builds a polynomial from `(coefficient, exponents)` pairs in any order.
    pub fn from_terms(arity: usize, terms: impl IntoIterator<Item = (f64, Vec<u32>)>) -> Self {
        let mut p = Self::zero(arity);
        for (c, e) in terms {
            assert_eq!(e.len(), arity, "exponent vector length must equal arity");
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: Vec<u32>, c: f64) {
        if c == 0.0 {
            return;
        }
        let v = self.terms.get(&e).copied().unwrap_or(0.0) + c;
        if v == 0.0 {
            self.terms.remove(&e);
        } else {
            self.terms.insert(e, v);
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, f64)> {
        self.terms.iter().map(|(e, c)| (e, *c))
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn is_linear(&self) -> bool {
        self.degree() <= 1
    }

    /// Variables with a nonzero exponent in some term.
    pub fn support(&self) -> Vec<usize> {
        (0..self.arity).filter(|&i| self.terms.keys().any(|e| e[i] > 0)).collect()
    }

    /// For a linear polynomial, `(gradient, constant)`.
    pub fn linear_parts(&self) -> Option<(Vec<f64>, f64)> {
        if !self.is_linear() {
            return None;
        }
        let mut g = vec![0.0; self.arity];
        let mut c = 0.0;
        for (e, v) in &self.terms {
            match e.iter().position(|&k| k == 1) {
                Some(i) => g[i] += v,
                None => c += v,
            }
        }
        Some((g, c))
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.arity);
        self.terms
            .iter()
            .map(|(e, c)| c * e.iter().zip(x).map(|(&k, &xi)| xi.powi(k as i32)).product::<f64>())
            .sum()
    }

    /// Natural interval extension over a box.
    pub fn eval_interval(&self, b: &[Interval]) -> Interval {
        debug_assert_eq!(b.len(), self.arity);
        let mut acc = Interval::point(0.0);
        for (e, &c) in &self.terms {
            let mut t = Interval::point(1.0);
            for (&k, iv) in e.iter().zip(b) {
                if k > 0 {
                    t = t.mul(iv.powi(k));
                }
            }
            acc = acc.add(t.scale(c));
        }
        acc
    }

    /// The same function re-expanded in `δ = x - c`.
    pub fn shifted(&self, c: &[f64]) -> Polynomial {
        let mut out = Polynomial::zero(self.arity);
        for (e, &coef) in &self.terms {
            let mut term = Polynomial::constant(self.arity, coef);
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    let lin = Polynomial::variable(self.arity, i).add(&Polynomial::constant(self.arity, c[i]));
                    term = term.mul(&lin.pow(k));
                }
            }
            out = out.add(&term);
        }
        out
    }

    /// Interval enclosure using the expansion around the box center, which
    /// is much tighter than the natural extension for shifted squares.
    pub fn eval_interval_centered(&self, b: &[Interval]) -> Interval {
        let c: Vec<f64> = b.iter().map(Interval::mid).collect();
        let d: Vec<Interval> = b.iter().zip(&c).map(|(iv, m)| Interval::new(iv.lo - m, iv.hi - m)).collect();
        let centered = self.shifted(&c).eval_interval(&d);
        let natural = self.eval_interval(b);
        Interval::new(centered.lo.max(natural.lo), centered.hi.min(natural.hi))
    }

    fn mul(&self, o: &Polynomial) -> Polynomial {
        let mut p = Polynomial::zero(self.arity);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                p.add_term(e, c1 * c2);
            }
        }
        p
    }

    fn add(&self, o: &Polynomial) -> Polynomial {
        let mut p = self.clone();
        for (e, c) in &o.terms {
            p.add_term(e.clone(), *c);
        }
        p
    }

    fn neg(&self) -> Polynomial {
        Polynomial { arity: self.arity, terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }

    fn pow(&self, k: u32) -> Polynomial {
        let mut p = Polynomial::constant(self.arity, 1.0);
        for _ in 0..k {
            p = p.mul(self);
        }
        p
    }

    /// Parses an arithmetic expression (`+ - * ^`, parentheses, numeric
    /// literals, variable names) and expands it.
    pub fn parse(text: &str, vars: &[String]) -> Result<Polynomial, ParseError> {
        let toks = tokenize(text)?;
        let mut p = PolyParser { toks, pos: 0, vars, text };
        let poly = p.expr()?;
        if p.pos != p.toks.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(poly)
    }

    /// Renders using the given variable names (round-trips through [`Polynomial::parse`]).
    pub fn display_with(&self, vars: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, (e, &c)) in self.terms.iter().rev().enumerate() {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(j, &k)| if k == 1 { vars[j].clone() } else { format!("{}^{}", vars[j], k) })
                .collect();
            let mag = c.abs();
            let body = if mono.is_empty() {
                format!("{}", mag)
            } else if mag == 1.0 {
                mono.join("*")
            } else {
                format!("{}*{}", mag, mono.join("*"))
            };
            if i == 0 {
                if c < 0.0 {
                    s.push('-');
                }
            } else {
                s.push_str(if c < 0.0 { " - " } else { " + " });
            }
            s.push_str(&body);
        }
        s
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vars: Vec<String> = (0..self.arity).map(|i| format!("x{}", i)).collect();
        f.write_str(&self.display_with(&vars))
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let b: Vec<char> = text.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    while i < b.len() {
        let c = b[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let st = i;
            while i < b.len() && (b[i].is_ascii_digit() || b[i] == '.' || b[i] == 'e' || b[i] == 'E'
                || ((b[i] == '-' || b[i] == '+') && i > st && (b[i - 1] == 'e' || b[i - 1] == 'E')))
            {
                i += 1;
            }
            let s: String = b[st..i].iter().collect();
            let v = s.parse::<f64>().map_err(|_| ParseError::new(st, format!("bad number `{}`", s)))?;
            out.push((Tok::Num(v), st));
        } else if c.is_alphabetic() || c == '_' {
            let st = i;
            while i < b.len() && (b[i].is_alphanumeric() || b[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(b[st..i].iter().collect()), st));
        } else if "+-*^()".contains(c) {
            out.push((Tok::Op(c), i));
            i += 1;
        } else {
            return Err(ParseError::new(i, format!("unexpected character `{}`", c)));
        }
    }
    Ok(out)
}

struct PolyParser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    vars: &'a [String],
    text: &'a str,
}

impl PolyParser<'_> {
    fn err(&self, msg: &str) -> ParseError {
        let at = self.toks.get(self.pos).map(|t| t.1).unwrap_or(self.text.len());
        ParseError::new(at, msg.to_string())
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn expr(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.term()?;
        while let Some(Tok::Op(c @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let t = self.term()?;
            acc = if c == '+' { acc.add(&t) } else { acc.add(&t.neg()) };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.unary()?;
        while let Some(Tok::Op('*')) = self.peek() {
            self.pos += 1;
            let f = self.unary()?;
            acc = acc.mul(&f);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Polynomial, ParseError> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Some(Tok::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Polynomial, ParseError> {
        let base = self.atom()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.pos += 1;
            match self.peek().cloned() {
                Some(Tok::Num(k)) if k >= 0.0 && k.fract() == 0.0 && k <= 32.0 => {
                    self.pos += 1;
                    Ok(base.pow(k as u32))
                }
                _ => Err(self.err("exponent must be a small non-negative integer")),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Polynomial, ParseError> {
        let n = self.vars.len();
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(Polynomial::constant(n, v))
            }
            Some(Tok::Ident(name)) => match self.vars.iter().position(|v| *v == name) {
                Some(i) => {
                    self.pos += 1;
                    Ok(Polynomial::variable(n, i))
                }
                None => Err(self.err(&format!("unknown state variable `{}`", name))),
            },
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(&Tok::Op(')')) {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            _ => Err(self.err("expected a number, variable or `(`")),
        }
    }
}
