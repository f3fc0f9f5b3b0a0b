//! STL formulas with non-nested temporal operators over polynomial predicates.

mod parser;
mod signal;

use std::fmt;

pub use parser::{parse_stl, SpecFile};
pub use signal::{LabelSignal, Piece};

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::time::TimeInterval;

/// A truth assignment over the declared predicates, bit `i` set iff `γ_i` holds.
pub type Symbol = u32;

/// Upper bound on the number of predicates (width of [`Symbol`]).
pub const MAX_PREDICATES: usize = 32;

/// `γ(x) := h(x) ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PredicateFn {
    pub name: String,
    pub poly: Polynomial,
}

impl PredicateFn {
    pub fn new(name: impl Into<String>, poly: Polynomial) -> Result<Self> {
        let name = name.into();
        if poly.is_zero() {
            return Err(Error::DegeneratePredicate(name));
        }
        Ok(PredicateFn { name, poly })
    }

    pub fn arity(&self) -> usize {
        self.poly.arity()
    }

    pub fn eval(&self, x: &[f64]) -> Result<bool> {
        if x.len() != self.arity() {
            return Err(Error::DimensionMismatch { expected: self.arity(), got: x.len() });
        }
        Ok(self.poly.eval(x) >= 0.0)
    }
}

/// The predicate set `Γ` together with the names of the state variables.
#[derive(Debug, Clone, PartialEq)]
pub struct PredicateSet {
    vars: Vec<String>,
    preds: Vec<PredicateFn>,
}

impl PredicateSet {
    pub fn new(vars: Vec<String>, preds: Vec<PredicateFn>) -> Result<Self> {
        for p in &preds {
            if p.arity() != vars.len() {
                return Err(Error::DimensionMismatch { expected: vars.len(), got: p.arity() });
            }
        }
        if preds.len() > MAX_PREDICATES {
            return Err(Error::Config { line: 0, message: format!("at most {} predicates are supported", MAX_PREDICATES) });
        }
        Ok(PredicateSet { vars, preds })
    }

    /// Parses `name = polynomial` pairs over the given variables.
    pub fn from_exprs(vars: &[&str], defs: &[(&str, &str)]) -> Result<Self> {
        let vars: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
        let preds = defs
            .iter()
            .map(|(n, e)| PredicateFn::new(*n, Polynomial::parse(e, &vars)?))
            .collect::<Result<Vec<_>>>()?;
        PredicateSet::new(vars, preds)
    }

    pub fn len(&self) -> usize {
        self.preds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.preds.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn predicates(&self) -> &[PredicateFn] {
        &self.preds
    }

    pub fn get(&self, i: usize) -> &PredicateFn {
        &self.preds[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.preds.iter().position(|p| p.name == name)
    }

    pub fn names(&self) -> Vec<String> {
        self.preds.iter().map(|p| p.name.clone()).collect()
    }

    /// `L(x)`: the symbol of predicates true at `x`.
    pub fn label(&self, x: &[f64]) -> Result<Symbol> {
        let mut s = 0;
        for (i, p) in self.preds.iter().enumerate() {
            if p.eval(x)? {
                s |= 1 << i;
            }
        }
        Ok(s)
    }

    /// State-space dimensions any predicate depends on.
    pub fn support(&self) -> Vec<usize> {
        let mut dims: Vec<usize> = self.preds.iter().flat_map(|p| p.poly.support()).collect();
        dims.sort_unstable();
        dims.dedup();
        dims
    }
}

/// Abstract syntax of an STL_nn formula.
///
/// Temporal nodes never occur below other temporal nodes, and their operands
/// are Boolean combinations of predicates.
#[derive(Debug, Clone, PartialEq)]
pub enum StlFormula {
    True,
    Pred(usize),
    Not(Box<StlFormula>),
    And(Box<StlFormula>, Box<StlFormula>),
    Or(Box<StlFormula>, Box<StlFormula>),
    Until(TimeInterval, Box<StlFormula>, Box<StlFormula>),
    Eventually(TimeInterval, Box<StlFormula>),
    Globally(TimeInterval, Box<StlFormula>),
}

impl StlFormula {
    pub fn pred(i: usize) -> Self {
        StlFormula::Pred(i)
    }

    pub fn falsum() -> Self {
        StlFormula::Not(Box::new(StlFormula::True))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: StlFormula) -> Self {
        StlFormula::Not(Box::new(f))
    }

    pub fn and(a: StlFormula, b: StlFormula) -> Self {
        StlFormula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: StlFormula, b: StlFormula) -> Self {
        StlFormula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: StlFormula, b: StlFormula) -> Self {
        StlFormula::or(StlFormula::not(a), b)
    }

    pub fn until(i: TimeInterval, a: StlFormula, b: StlFormula) -> Self {
        StlFormula::Until(i, Box::new(a), Box::new(b))
    }

    pub fn eventually(i: TimeInterval, a: StlFormula) -> Self {
        StlFormula::Eventually(i, Box::new(a))
    }

    pub fn globally(i: TimeInterval, a: StlFormula) -> Self {
        StlFormula::Globally(i, Box::new(a))
    }

    /// Conjunction of a list (`True` if empty).
    pub fn conj(items: impl IntoIterator<Item = StlFormula>) -> Self {
        items.into_iter().reduce(StlFormula::and).unwrap_or(StlFormula::True)
    }

    /// Disjunction of a list (`¬True` if empty).
    pub fn disj(items: impl IntoIterator<Item = StlFormula>) -> Self {
        items.into_iter().reduce(StlFormula::or).unwrap_or_else(StlFormula::falsum)
    }

    pub fn is_temporal(&self) -> bool {
        matches!(self, StlFormula::Until(..) | StlFormula::Eventually(..) | StlFormula::Globally(..))
    }

    /// True if the formula contains no temporal operator.
    pub fn is_propositional(&self) -> bool {
        match self {
            StlFormula::True | StlFormula::Pred(_) => true,
            StlFormula::Not(a) => a.is_propositional(),
            StlFormula::And(a, b) | StlFormula::Or(a, b) => a.is_propositional() && b.is_propositional(),
            _ => false,
        }
    }

    /// Checks the non-nesting restriction and interval validity.
    pub fn validate(&self) -> Result<()> {
        match self {
            StlFormula::True | StlFormula::Pred(_) => Ok(()),
            StlFormula::Not(a) => a.validate(),
            StlFormula::And(a, b) | StlFormula::Or(a, b) => {
                a.validate()?;
                b.validate()
            }
            StlFormula::Until(i, a, b) => {
                check_interval(i)?;
                if !a.is_propositional() || !b.is_propositional() {
                    return Err(Error::NestedTemporal(0));
                }
                Ok(())
            }
            StlFormula::Eventually(i, a) | StlFormula::Globally(i, a) => {
                check_interval(i)?;
                if !a.is_propositional() {
                    return Err(Error::NestedTemporal(0));
                }
                Ok(())
            }
        }
    }

    /// Largest upper bound over all temporal intervals; 0 when propositional.
    pub fn horizon(&self) -> f64 {
        match self {
            StlFormula::True | StlFormula::Pred(_) => 0.0,
            StlFormula::Not(a) => a.horizon(),
            StlFormula::And(a, b) | StlFormula::Or(a, b) => a.horizon().max(b.horizon()),
            StlFormula::Until(i, ..) | StlFormula::Eventually(i, _) | StlFormula::Globally(i, _) => i.hi,
        }
    }

    /// All temporal intervals in syntactic order.
    pub fn intervals(&self) -> Vec<TimeInterval> {
        let mut out = Vec::new();
        self.collect_intervals(&mut out);
        out
    }

    fn collect_intervals(&self, out: &mut Vec<TimeInterval>) {
        match self {
            StlFormula::True | StlFormula::Pred(_) => {}
            StlFormula::Not(a) => a.collect_intervals(out),
            StlFormula::And(a, b) | StlFormula::Or(a, b) => {
                a.collect_intervals(out);
                b.collect_intervals(out);
            }
            StlFormula::Until(i, ..) | StlFormula::Eventually(i, _) | StlFormula::Globally(i, _) => out.push(*i),
        }
    }

    /// Predicate indices that occur in the formula.
    pub fn predicates(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_preds(&mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    fn collect_preds(&self, out: &mut Vec<usize>) {
        match self {
            StlFormula::True => {}
            StlFormula::Pred(i) => out.push(*i),
            StlFormula::Not(a) | StlFormula::Eventually(_, a) | StlFormula::Globally(_, a) => a.collect_preds(out),
            StlFormula::And(a, b) | StlFormula::Or(a, b) | StlFormula::Until(_, a, b) => {
                a.collect_preds(out);
                b.collect_preds(out);
            }
        }
    }

    /// Evaluates a propositional formula on a symbol.
    ///
    /// Panics on temporal nodes.
    pub fn eval_prop(&self, s: Symbol) -> bool {
        match self {
            StlFormula::True => true,
            StlFormula::Pred(i) => s & (1 << i) != 0,
            StlFormula::Not(a) => !a.eval_prop(s),
            StlFormula::And(a, b) => a.eval_prop(s) && b.eval_prop(s),
            StlFormula::Or(a, b) => a.eval_prop(s) || b.eval_prop(s),
            _ => panic!("eval_prop called on a temporal formula"),
        }
    }

    /// Rewrites `F_I φ` as `⊤ U_I φ` and `G_I φ` as `¬(⊤ U_I ¬φ)`.
    pub fn desugar(&self) -> StlFormula {
        match self {
            StlFormula::True | StlFormula::Pred(_) => self.clone(),
            StlFormula::Not(a) => StlFormula::not(a.desugar()),
            StlFormula::And(a, b) => StlFormula::and(a.desugar(), b.desugar()),
            StlFormula::Or(a, b) => StlFormula::or(a.desugar(), b.desugar()),
            StlFormula::Until(i, a, b) => StlFormula::until(*i, a.desugar(), b.desugar()),
            StlFormula::Eventually(i, a) => StlFormula::until(*i, StlFormula::True, a.desugar()),
            StlFormula::Globally(i, a) => StlFormula::not(StlFormula::until(
                *i,
                StlFormula::True,
                StlFormula::not(a.desugar()),
            )),
        }
    }

    /// Renders in the concrete syntax accepted by [`parse_stl`].
    pub fn display_with<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        FormulaDisplay { f: self, names }
    }
}

fn check_interval(i: &TimeInterval) -> Result<()> {
    if i.is_valid() && i.hi.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInterval(i.to_string()))
    }
}

struct FormulaDisplay<'a> {
    f: &'a StlFormula,
    names: &'a [String],
}

impl FormulaDisplay<'_> {
    fn write(&self, f: &StlFormula, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f {
            StlFormula::True => out.write_str("true"),
            StlFormula::Pred(i) => match self.names.get(*i) {
                Some(n) => out.write_str(n),
                None => write!(out, "p{}", i),
            },
            StlFormula::Not(a) if **a == StlFormula::True => out.write_str("false"),
            StlFormula::Not(a) => {
                out.write_str("!")?;
                self.atomic(a, out)
            }
            StlFormula::And(a, b) => {
                self.atomic(a, out)?;
                out.write_str(" & ")?;
                self.atomic(b, out)
            }
            StlFormula::Or(a, b) => {
                self.atomic(a, out)?;
                out.write_str(" | ")?;
                self.atomic(b, out)
            }
            StlFormula::Until(i, a, b) => {
                self.atomic(a, out)?;
                write!(out, " U{} ", i)?;
                self.atomic(b, out)
            }
            StlFormula::Eventually(i, a) => {
                write!(out, "F{}", i)?;
                self.paren(a, out)
            }
            StlFormula::Globally(i, a) => {
                write!(out, "G{}", i)?;
                self.paren(a, out)
            }
        }
    }

    fn paren(&self, f: &StlFormula, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        out.write_str("(")?;
        self.write(f, out)?;
        out.write_str(")")
    }

    fn atomic(&self, f: &StlFormula, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f {
            StlFormula::True | StlFormula::Pred(_) | StlFormula::Eventually(..) | StlFormula::Globally(..) => {
                self.write(f, out)
            }
            StlFormula::Not(a) if **a == StlFormula::True => self.write(f, out),
            _ => self.paren(f, out),
        }
    }
}

impl fmt::Display for FormulaDisplay<'_> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(self.f, out)
    }
}
