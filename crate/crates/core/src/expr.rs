//! Arithmetic expressions and the update rules attached to stages.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::TriggerId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
        }
    }
}

/// Expression tree. Literals produced by the parser are never negative;
/// a leading minus is kept as [`Expr::Neg`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Expr {
    Num(f64),
    Var(String),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("division by zero")]
    DivisionByZero,
}

impl Expr {
    pub fn bin(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Bin(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn var(name: impl Into<String>) -> Expr {
        Expr::Var(name.into())
    }

    /// Evaluates left to right in tree order. Every operation is a single
    /// IEEE-754 double operation, so results are reproducible bit for bit.
    pub fn eval<F>(&self, lookup: &F) -> Result<f64, EvalError>
    where
        F: Fn(&str) -> Option<f64>,
    {
        match self {
            Expr::Num(v) => Ok(*v),
            Expr::Var(name) => lookup(name).ok_or_else(|| EvalError::UnknownVariable(name.clone())),
            Expr::Neg(inner) => Ok(-inner.eval(lookup)?),
            Expr::Bin(op, lhs, rhs) => {
                let l = lhs.eval(lookup)?;
                let r = rhs.eval(lookup)?;
                Ok(match op {
                    BinOp::Add => l + r,
                    BinOp::Sub => l - r,
                    BinOp::Mul => l * r,
                    BinOp::Div => {
                        if r == 0.0 {
                            return Err(EvalError::DivisionByZero);
                        }
                        l / r
                    }
                })
            }
        }
    }

    pub fn variables(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Expr::Num(_) => {}
            Expr::Var(name) => {
                out.insert(name);
            }
            Expr::Neg(inner) => inner.collect_vars(out),
            Expr::Bin(_, l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Bin(op, _, _) => op.precedence(),
            Expr::Neg(_) => 3,
            _ => 4,
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) if v.is_sign_negative() => write!(f, "({v})"),
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var(name) => f.write_str(name),
            Expr::Neg(inner) => {
                if inner.precedence() < 3 {
                    write!(f, "-({inner})")
                } else {
                    write!(f, "-{inner}")
                }
            }
            Expr::Bin(op, lhs, rhs) => {
                let p = op.precedence();
                if lhs.precedence() < p {
                    write!(f, "({lhs})")?;
                } else {
                    write!(f, "{lhs}")?;
                }
                write!(f, " {} ", op.symbol())?;
                // Operators are left-associative: an equal-precedence right
                // operand needs parentheses to keep its grouping.
                if rhs.precedence() <= p {
                    write!(f, "({rhs})")
                } else {
                    write!(f, "{rhs}")
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    pub target: String,
    pub value: Expr,
}

/// One branch of a stochastic rule; drawing it fires `trigger`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome<T = TriggerId> {
    pub label: String,
    pub probability: Expr,
    pub trigger: T,
}

/// Behaviour attached to a create or process stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Rule<T = TriggerId> {
    /// Simultaneous assignments; every right-hand side reads pre-tick values.
    Update(Vec<Assignment>),
    /// Draw exactly one outcome.
    Choose(Vec<Outcome<T>>),
}

impl<T> Rule<T> {
    pub fn map_triggers<U>(&self, mut f: impl FnMut(T) -> U) -> Rule<U>
    where
        T: Copy,
    {
        match self {
            Rule::Update(a) => Rule::Update(a.clone()),
            Rule::Choose(outcomes) => Rule::Choose(
                outcomes
                    .iter()
                    .map(|o| Outcome {
                        label: o.label.clone(),
                        probability: o.probability.clone(),
                        trigger: f(o.trigger),
                    })
                    .collect(),
            ),
        }
    }

    /// Every expression in the rule, in declaration order.
    pub fn expressions(&self) -> Vec<&Expr> {
        match self {
            Rule::Update(a) => a.iter().map(|a| &a.value).collect(),
            Rule::Choose(o) => o.iter().map(|o| &o.probability).collect(),
        }
    }
}
