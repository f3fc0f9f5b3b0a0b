//! Concrete syntax for STL_nn formulas and specification files.
//!
//! ```text
//! formula  := implies
//! implies  := or ( "->" implies )?
//! or       := and ( "|" and )*
//! and      := until ( "&" until )*
//! until    := unary ( "U" interval unary )?
//! unary    := "!" unary | ("F" | "G") interval unary | atom
//! atom     := "true" | "false" | NAME | "(" formula ")"
//! interval := ("[" | "(") NUMBER "," NUMBER ("]" | ")")
//! ```
//!
//! `F`, `G` and `U` are reserved and cannot be predicate names.

use crate::error::{Error, ParseError, Result};
use crate::poly::Polynomial;
use crate::time::TimeInterval;

use super::{PredicateFn, PredicateSet, StlFormula};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Name(String),
    Num(f64),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    And,
    Or,
    Not,
    Arrow,
}

fn lex(text: &str) -> std::result::Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
                continue;
            }
            '(' => out.push((Tok::LParen, start)),
            ')' => out.push((Tok::RParen, start)),
            '[' => out.push((Tok::LBrack, start)),
            ']' => out.push((Tok::RBrack, start)),
            ',' => out.push((Tok::Comma, start)),
            '&' => out.push((Tok::And, start)),
            '|' => out.push((Tok::Or, start)),
            '!' => out.push((Tok::Not, start)),
            '-' if bytes.get(i + 1) == Some(&b'>') => {
                out.push((Tok::Arrow, start));
                i += 1;
            }
            c if c.is_ascii_digit() || c == '.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.' || bytes[i] == b'e' || bytes[i] == b'E') {
                    if (bytes[i] == b'e' || bytes[i] == b'E') && matches!(bytes.get(i + 1), Some(b'-') | Some(b'+')) {
                        i += 1;
                    }
                    i += 1;
                }
                let s = &text[start..i];
                let v: f64 = s.parse().map_err(|_| ParseError::new(start, format!("bad number `{}`", s)))?;
                out.push((Tok::Num(v), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Name(text[start..i].to_string()), start));
                continue;
            }
            _ => return Err(ParseError::new(start, format!("unexpected character `{}`", c))),
        }
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    names: &'a [String],
    // Offset of the innermost enclosing temporal operator, if any.
    scope: Option<usize>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(_, o)| *o).unwrap_or(self.end)
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        ParseError::new(self.offset(), msg).into()
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected {}", what)))
        }
    }

    fn implies(&mut self) -> Result<StlFormula> {
        let lhs = self.or()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.pos += 1;
            let rhs = self.implies()?;
            return Ok(StlFormula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<StlFormula> {
        let mut f = self.and()?;
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            f = StlFormula::or(f, self.and()?);
        }
        Ok(f)
    }

    fn and(&mut self) -> Result<StlFormula> {
        let mut f = self.until()?;
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            f = StlFormula::and(f, self.until()?);
        }
        Ok(f)
    }

    fn is_keyword(&self, k: &str) -> bool {
        matches!(self.peek(), Some(Tok::Name(n)) if n == k)
    }

    fn enter_temporal(&mut self, at: usize) -> Result<Option<usize>> {
        if let Some(_outer) = self.scope {
            return Err(Error::NestedTemporal(at));
        }
        Ok(self.scope.replace(at))
    }

    fn until(&mut self) -> Result<StlFormula> {
        // The left operand is parsed before we know it belongs to an until;
        // non-nesting is checked structurally afterwards.
        let start = self.offset();
        let lhs = self.unary()?;
        if self.is_keyword("U") {
            let at = self.offset();
            if self.scope.is_some() {
                return Err(Error::NestedTemporal(at));
            }
            if !lhs.is_propositional() {
                return Err(Error::NestedTemporal(start));
            }
            self.pos += 1;
            let i = self.interval()?;
            let saved = self.enter_temporal(at)?;
            let rhs = self.unary()?;
            self.scope = saved;
            return Ok(StlFormula::until(i, lhs, rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<StlFormula> {
        match self.peek() {
            Some(Tok::Not) => {
                self.pos += 1;
                Ok(StlFormula::not(self.unary()?))
            }
            Some(Tok::Name(n)) if (n == "F" || n == "G") => {
                let is_f = n == "F";
                let at = self.offset();
                self.pos += 1;
                let i = self.interval()?;
                let saved = self.enter_temporal(at)?;
                let body = self.unary()?;
                self.scope = saved;
                Ok(if is_f { StlFormula::eventually(i, body) } else { StlFormula::globally(i, body) })
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<StlFormula> {
        let at = self.offset();
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let f = self.implies()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Some(Tok::Name(n)) => {
                self.pos += 1;
                match n.as_str() {
                    "true" => Ok(StlFormula::True),
                    "false" => Ok(StlFormula::falsum()),
                    "U" => Err(ParseError::new(at, "`U` needs a left operand").into()),
                    _ => match self.names.iter().position(|m| *m == n) {
                        Some(i) => Ok(StlFormula::Pred(i)),
                        None => Err(Error::UnknownPredicate(n)),
                    },
                }
            }
            Some(_) => Err(self.err("expected a predicate, `true`, `false`, `!`, `F`, `G` or `(`")),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<f64> {
        match self.peek() {
            Some(Tok::Num(v)) => {
                let v = *v;
                self.pos += 1;
                Ok(v)
            }
            _ => Err(self.err("expected a number")),
        }
    }

    fn interval(&mut self) -> Result<TimeInterval> {
        let at = self.offset();
        let lo_closed = match self.peek() {
            Some(Tok::LBrack) => true,
            Some(Tok::LParen) => false,
            _ => return Err(self.err("expected `[` or `(` starting a time interval")),
        };
        self.pos += 1;
        let lo = self.number()?;
        self.expect(Tok::Comma, "`,`")?;
        let hi = self.number()?;
        let hi_closed = match self.peek() {
            Some(Tok::RBrack) => true,
            Some(Tok::RParen) => false,
            _ => return Err(self.err("expected `]` or `)` closing a time interval")),
        };
        self.pos += 1;
        let i = TimeInterval::new(lo, hi, lo_closed, hi_closed);
        if !i.is_valid() || !hi.is_finite() {
            return Err(ParseError::new(at, format!("invalid time interval {}", i)).into());
        }
        Ok(i)
    }
}

/// Parses a formula over the given predicate names.
pub fn parse_stl(text: &str, names: &[String]) -> Result<StlFormula> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, end: text.len(), names, scope: None };
    let f = p.implies()?;
    if p.pos != p.toks.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(f)
}

/// A parsed specification file: state variables, predicates and one formula.
///
/// ```text
/// variables: x y
/// predicates:
///   goal = x - 3.5
/// formula:
///   F[0,18](goal)
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct SpecFile {
    pub predicates: PredicateSet,
    pub formula: StlFormula,
}

impl SpecFile {
    pub fn parse(text: &str) -> Result<SpecFile> {
        #[derive(PartialEq)]
        enum Block {
            None,
            Preds,
            Formula,
        }
        let mut vars: Option<Vec<String>> = None;
        let mut defs: Vec<(String, String, usize)> = Vec::new();
        let mut formula_lines: Vec<(String, usize)> = Vec::new();
        let mut block = Block::None;
        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("variables:") {
                vars = Some(rest.split_whitespace().map(str::to_string).collect());
                block = Block::None;
                continue;
            }
            if let Some(rest) = line.strip_prefix("predicates:") {
                block = Block::Preds;
                if !rest.trim().is_empty() {
                    return Err(Error::Config { line: line_no, message: "put predicates on their own lines".into() });
                }
                continue;
            }
            if let Some(rest) = line.strip_prefix("formula:") {
                block = Block::Formula;
                if !rest.trim().is_empty() {
                    formula_lines.push((rest.trim().to_string(), line_no));
                }
                continue;
            }
            match block {
                Block::Preds => {
                    let (name, expr) = line.split_once('=').ok_or_else(|| Error::Config {
                        line: line_no,
                        message: "expected `name = polynomial`".into(),
                    })?;
                    defs.push((name.trim().to_string(), expr.trim().to_string(), line_no));
                }
                Block::Formula => formula_lines.push((line.to_string(), line_no)),
                Block::None => {
                    return Err(Error::Config { line: line_no, message: format!("unexpected line `{}`", line) })
                }
            }
        }
        let vars = vars.ok_or(Error::Config { line: 0, message: "missing `variables:` line".into() })?;
        let mut preds = Vec::new();
        for (name, expr, line_no) in &defs {
            if matches!(name.as_str(), "F" | "G" | "U" | "true" | "false") || !is_ident(name) {
                return Err(Error::Config { line: *line_no, message: format!("invalid predicate name `{}`", name) });
            }
            let poly = Polynomial::parse(expr, &vars).map_err(|e| Error::Syntax(e.at_line(*line_no)))?;
            preds.push(PredicateFn::new(name.clone(), poly)?);
        }
        let predicates = PredicateSet::new(vars, preds)?;
        let (first_line, text) = match formula_lines.first() {
            Some((_, l)) => (*l, formula_lines.iter().map(|(s, _)| s.as_str()).collect::<Vec<_>>().join(" ")),
            None => return Err(Error::Config { line: 0, message: "missing `formula:` block".into() }),
        };
        let formula = parse_stl(&text, &predicates.names()).map_err(|e| match e {
            Error::Syntax(p) => Error::Syntax(p.at_line(first_line)),
            other => other,
        })?;
        Ok(SpecFile { predicates, formula })
    }

    pub fn to_text(&self) -> String {
        let names = self.predicates.names();
        let mut s = format!("variables: {}\npredicates:\n", self.predicates.vars().join(" "));
        for p in self.predicates.predicates() {
            s.push_str(&format!("  {} = {}\n", p.name, p.poly.display_with(self.predicates.vars())));
        }
        s.push_str(&format!("formula:\n  {}\n", self.formula.display_with(&names)));
        s
    }
}

fn is_ident(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic() || c == '_') && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names() -> Vec<String> {
        vec!["g1".into(), "g2".into()]
    }

    #[test]
    fn reach_avoid() {
        let f = parse_stl("F[0,18](g1) & G[0,6](!g2)", &names()).unwrap();
        let expect = StlFormula::and(
            StlFormula::eventually(TimeInterval::closed(0.0, 18.0), StlFormula::pred(0)),
            StlFormula::globally(TimeInterval::closed(0.0, 6.0), StlFormula::not(StlFormula::pred(1))),
        );
        assert_eq!(f, expect);
        assert_eq!(f.horizon(), 18.0);
    }

    #[test]
    fn atomic_predicate() {
        assert_eq!(parse_stl("g1", &names()).unwrap(), StlFormula::Pred(0));
    }

    #[test]
    fn nested_temporal_is_rejected() {
        assert!(matches!(parse_stl("F[0,5](G[0,2](g1))", &names()), Err(Error::NestedTemporal(7))));
        assert!(matches!(parse_stl("(F[0,1] g1) U[0,2] g2", &names()), Err(Error::NestedTemporal(_))));
        assert!(matches!(parse_stl("g1 U[0,2] F[0,1] g2", &names()), Err(Error::NestedTemporal(_))));
    }

    #[test]
    fn unknown_predicate() {
        assert!(matches!(parse_stl("F[0,1](goal)", &names()), Err(Error::UnknownPredicate(n)) if n == "goal"));
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse_stl("g1 & ", &names()) {
            Err(Error::Syntax(p)) => assert_eq!(p.position, 5),
            other => panic!("{:?}", other),
        }
        match parse_stl("F[3,1](g1)", &names()) {
            Err(Error::Syntax(p)) => assert_eq!(p.position, 1),
            other => panic!("{:?}", other),
        }
    }

    #[test]
    fn open_endpoints_and_until() {
        let f = parse_stl("g1 U(2,5] !g2", &names()).unwrap();
        assert_eq!(
            f,
            StlFormula::until(TimeInterval::new(2.0, 5.0, false, true), StlFormula::pred(0), StlFormula::not(StlFormula::pred(1)))
        );
    }

    #[test]
    fn implication_is_right_associative() {
        let f = parse_stl("g1 -> g2 -> g1", &names()).unwrap();
        let g = StlFormula::implies(StlFormula::pred(0), StlFormula::implies(StlFormula::pred(1), StlFormula::pred(0)));
        assert_eq!(f, g);
    }

    #[test]
    fn display_round_trips() {
        for s in [
            "F[0,18](g1) & G[0,6](!g2)",
            "g1 U(2,5] (g2 | !g1)",
            "G[0,10]((g1 & !g2) -> g2) & F[0,10](g1)",
            "!(true & false) | g1",
        ] {
            let f = parse_stl(s, &names()).unwrap();
            let printed = f.display_with(&names()).to_string();
            assert_eq!(parse_stl(&printed, &names()).unwrap(), f, "{}", printed);
        }
    }

    #[test]
    fn spec_file() {
        let text = "variables: x y\npredicates:\n  g1 = x - 3.5  # goal\n  g2 = 2 - (x-5)^2 - (y-5)^2\nformula:\n  F[0,18](g1)\n  & G[0,6](!g2)\n";
        let s = SpecFile::parse(text).unwrap();
        assert_eq!(s.predicates.len(), 2);
        assert_eq!(s.formula.horizon(), 18.0);
        let again = SpecFile::parse(&s.to_text()).unwrap();
        assert_eq!(again, s);
    }

    #[test]
    fn spec_file_errors_have_lines() {
        let text = "variables: x\npredicates:\n  g1 = x +\nformula:\n  g1\n";
        match SpecFile::parse(text) {
            Err(Error::Syntax(p)) => assert_eq!(p.line, Some(3)),
            other => panic!("{:?}", other),
        }
    }
}
