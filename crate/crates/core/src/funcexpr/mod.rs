//! Closed-form expressions in one complex variable `s`.
//!
//! Weights `g` and maps `β` are given as text in a small grammar (see
//! [`parse`](self::parse) for the productions): complex literals, the variable
//! `s`, the four field operations and real powers. Non-integer powers use the
//! principal branch `z^w = exp(w · Log z)`; integer powers are expanded by
//! repeated multiplication.
//!
//! The grammar has no transcendental functions. Adding one means a new
//! [`Node`] variant, a keyword in the lexer, and a case in
//! `ComplexField`-generic evaluation.

mod parse;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use parse::ParseError;

use crate::scalar::ComplexField;

/// Denominators smaller than this in modulus are treated as poles.
pub const POLE_THRESHOLD: f64 = 1e-300;

/// Integer exponents up to this size are expanded by repeated squaring.
const MAX_INT_POW: f64 = 1024.0;

#[derive(Clone, Debug, PartialEq, Error)]
#[error("pole of the expression at s = {at}")]
pub struct EvalError {
    pub at: Complex64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Lit(Complex64),
    Var,
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, f64),
    /// `conj(f(conj s))` of the wrapped expression.
    Involute(Box<Node>),
}

/// A parsed expression. Immutable; evaluation is pure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct FuncExpr {
    root: Node,
}

impl FuncExpr {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        parse::parse(text).map(|root| FuncExpr { root })
    }

    pub fn from_node(root: Node) -> Self {
        FuncExpr { root }
    }

    pub fn constant(c: Complex64) -> Self {
        FuncExpr {
            root: Node::Lit(c),
        }
    }

    pub fn identity() -> Self {
        FuncExpr { root: Node::Var }
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn eval(&self, s: Complex64) -> Result<Complex64, EvalError> {
        eval_node(&self.root, &s)
    }

    pub fn eval_generic<F: ComplexField>(&self, s: &F) -> Result<F, EvalError> {
        eval_node(&self.root, s)
    }

    /// `ǧ(s) = conj(g(conj s))`. Literals are conjugated in place; non-integer
    /// powers are wrapped in an [`Node::Involute`] marker so the identity also
    /// holds on the branch cut.
    pub fn involute(&self) -> FuncExpr {
        FuncExpr {
            root: involute_node(&self.root),
        }
    }
}

impl FromStr for FuncExpr {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, ParseError> {
        FuncExpr::parse(s)
    }
}

impl TryFrom<String> for FuncExpr {
    type Error = ParseError;
    fn try_from(s: String) -> Result<Self, ParseError> {
        FuncExpr::parse(&s)
    }
}

impl From<FuncExpr> for String {
    fn from(e: FuncExpr) -> String {
        e.to_string()
    }
}

pub fn parse(text: &str) -> Result<FuncExpr, ParseError> {
    FuncExpr::parse(text)
}

pub fn eval(e: &FuncExpr, s: Complex64) -> Result<Complex64, EvalError> {
    e.eval(s)
}

pub fn involute(e: &FuncExpr) -> FuncExpr {
    e.involute()
}

fn is_small_integer(e: f64) -> bool {
    e.fract() == 0.0 && e.abs() <= MAX_INT_POW
}

fn involute_node(node: &Node) -> Node {
    let b = |n: &Node| Box::new(involute_node(n));
    match node {
        Node::Lit(c) => Node::Lit(c.conj()),
        Node::Var => Node::Var,
        Node::Neg(x) => Node::Neg(b(x)),
        Node::Add(x, y) => Node::Add(b(x), b(y)),
        Node::Sub(x, y) => Node::Sub(b(x), b(y)),
        Node::Mul(x, y) => Node::Mul(b(x), b(y)),
        Node::Div(x, y) => Node::Div(b(x), b(y)),
        Node::Pow(x, e) if is_small_integer(*e) => Node::Pow(b(x), *e),
        Node::Pow(..) => Node::Involute(Box::new(node.clone())),
        Node::Involute(x) => (**x).clone(),
    }
}

fn pole<F: ComplexField>(s: &F) -> EvalError {
    EvalError { at: s.to_c64() }
}

fn eval_node<F: ComplexField>(node: &Node, s: &F) -> Result<F, EvalError> {
    Ok(match node {
        Node::Lit(c) => s.lift(*c),
        Node::Var => s.clone(),
        Node::Neg(x) => -eval_node(x, s)?,
        Node::Add(x, y) => eval_node(x, s)? + eval_node(y, s)?,
        Node::Sub(x, y) => eval_node(x, s)? - eval_node(y, s)?,
        Node::Mul(x, y) => eval_node(x, s)? * eval_node(y, s)?,
        Node::Div(x, y) => {
            let num = eval_node(x, s)?;
            let den = eval_node(y, s)?;
            if !(den.abs_f64() >= POLE_THRESHOLD) {
                return Err(pole(s));
            }
            num / den
        }
        Node::Pow(x, e) => {
            let base = eval_node(x, s)?;
            power(base, *e).ok_or_else(|| pole(s))?
        }
        Node::Involute(x) => eval_node(x, &s.conj())?.conj(),
    })
}

fn power<F: ComplexField>(base: F, e: f64) -> Option<F> {
    let tiny = !(base.abs_f64() >= POLE_THRESHOLD);
    if is_small_integer(e) {
        let mut k = e.abs() as u64;
        let mut acc = base.one_like();
        let mut sq = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * sq.clone();
            }
            k >>= 1;
            if k > 0 {
                sq = sq.clone() * sq;
            }
        }
        if e < 0.0 {
            if tiny {
                return None;
            }
            return Some(acc.one_like() / acc);
        }
        return Some(acc);
    }
    if tiny {
        return if e > 0.0 { Some(base.zero_like()) } else { None };
    }
    Some(base.powf(e))
}

/// Literals print in shortest round-trip form; every compound node is fully
/// parenthesized so that `parse(print(e))` rebuilds the same tree.
impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Lit(c) => {
                if c.im == 0.0 && c.im.is_sign_positive() && c.re.is_sign_positive() {
                    write!(f, "{:?}", c.re)
                } else {
                    write!(f, "({:?},{:?})", c.re, c.im)
                }
            }
            Node::Var => f.write_str("s"),
            Node::Neg(x) => write!(f, "(-{x})"),
            Node::Add(x, y) => write!(f, "({x}+{y})"),
            Node::Sub(x, y) => write!(f, "({x}-{y})"),
            Node::Mul(x, y) => write!(f, "({x}*{y})"),
            Node::Div(x, y) => write!(f, "({x}/{y})"),
            Node::Pow(x, e) => write!(f, "({x}^{e:?})"),
            Node::Involute(x) => write!(f, "involute({x})"),
        }
    }
}

impl fmt::Display for FuncExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.fmt(f)
    }
}
