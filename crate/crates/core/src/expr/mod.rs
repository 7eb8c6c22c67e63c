//! One-variable closed-form expressions.
//!
//! Expressions are parsed into an [`Ast`], differentiated symbolically and
//! evaluated in IEEE double precision. [`Func1D`] bundles an expression with
//! its open domain interval and its first three derivative trees, which is
//! what the curvature code consumes through [`Func1D::jet3`].

mod deriv;
mod display;
mod parser;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use deriv::{differentiate, simplify};
pub use parser::parse_expr;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { offset: usize, name: String },
    #[error("`{name}` at offset {offset} takes {expected} argument(s), found {found}")]
    Arity {
        offset: usize,
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("domain error: {what} at x = {at}")]
    Domain { what: &'static str, at: f64 },
    #[error("x = {at} is outside the open domain ({lo}, {hi})")]
    OutsideDomain { at: f64, lo: f64, hi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Neg,
    Sin,
    Cos,
    Sinh,
    Cosh,
    Tanh,
    Exp,
    Log,
    Sqrt,
    Abs,
}

impl UnaryOp {
    pub(crate) fn from_name(name: &str) -> Option<UnaryOp> {
        Some(match name {
            "sin" => UnaryOp::Sin,
            "cos" => UnaryOp::Cos,
            "sinh" => UnaryOp::Sinh,
            "cosh" => UnaryOp::Cosh,
            "tanh" => UnaryOp::Tanh,
            "exp" => UnaryOp::Exp,
            "log" => UnaryOp::Log,
            "sqrt" => UnaryOp::Sqrt,
            "abs" => UnaryOp::Abs,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            UnaryOp::Neg => "-",
            UnaryOp::Sin => "sin",
            UnaryOp::Cos => "cos",
            UnaryOp::Sinh => "sinh",
            UnaryOp::Cosh => "cosh",
            UnaryOp::Tanh => "tanh",
            UnaryOp::Exp => "exp",
            UnaryOp::Log => "log",
            UnaryOp::Sqrt => "sqrt",
            UnaryOp::Abs => "abs",
        }
    }

    fn apply(self, a: f64) -> Result<f64, ExprError> {
        let v = match self {
            UnaryOp::Neg => -a,
            UnaryOp::Sin => a.sin(),
            UnaryOp::Cos => a.cos(),
            UnaryOp::Sinh => a.sinh(),
            UnaryOp::Cosh => a.cosh(),
            UnaryOp::Tanh => a.tanh(),
            UnaryOp::Exp => a.exp(),
            UnaryOp::Log => {
                if a <= 0.0 {
                    return Err(ExprError::Domain {
                        what: "log of non-positive value",
                        at: a,
                    });
                }
                a.ln()
            }
            UnaryOp::Sqrt => {
                if a < 0.0 {
                    return Err(ExprError::Domain {
                        what: "sqrt of negative value",
                        at: a,
                    });
                }
                a.sqrt()
            }
            UnaryOp::Abs => a.abs(),
        };
        Ok(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinaryOp {
    fn apply(self, a: f64, b: f64) -> Result<f64, ExprError> {
        match self {
            BinaryOp::Add => Ok(a + b),
            BinaryOp::Sub => Ok(a - b),
            BinaryOp::Mul => Ok(a * b),
            BinaryOp::Div => {
                if b == 0.0 {
                    Err(ExprError::Domain {
                        what: "division by zero",
                        at: a,
                    })
                } else {
                    Ok(a / b)
                }
            }
            BinaryOp::Pow => real_pow(a, b),
        }
    }
}

/// Real power with the principal branch: integer exponents accept any base,
/// non-integer exponents need a positive base.
pub fn real_pow(base: f64, exponent: f64) -> Result<f64, ExprError> {
    let is_integer = exponent.fract() == 0.0 && exponent.abs() <= i32::MAX as f64;
    if is_integer {
        if base == 0.0 && exponent < 0.0 {
            return Err(ExprError::Domain {
                what: "zero raised to a negative power",
                at: base,
            });
        }
        Ok(base.powi(exponent as i32))
    } else if base > 0.0 {
        Ok(base.powf(exponent))
    } else if base == 0.0 && exponent > 0.0 {
        Ok(0.0)
    } else {
        Err(ExprError::Domain {
            what: "non-positive base with non-integer exponent",
            at: base,
        })
    }
}

/// Expression tree over a single variable.
#[derive(Debug, Clone, PartialEq)]
pub enum Ast {
    Const(f64),
    Var,
    Unary(UnaryOp, Box<Ast>),
    Binary(BinaryOp, Box<Ast>, Box<Ast>),
}

#[allow(clippy::should_implement_trait)]
impl Ast {
    pub fn constant(c: f64) -> Ast {
        Ast::Const(c)
    }

    pub fn unary(op: UnaryOp, a: Ast) -> Ast {
        Ast::Unary(op, Box::new(a))
    }

    pub fn binary(op: BinaryOp, a: Ast, b: Ast) -> Ast {
        Ast::Binary(op, Box::new(a), Box::new(b))
    }

    pub fn add(a: Ast, b: Ast) -> Ast {
        Ast::binary(BinaryOp::Add, a, b)
    }

    pub fn sub(a: Ast, b: Ast) -> Ast {
        Ast::binary(BinaryOp::Sub, a, b)
    }

    pub fn mul(a: Ast, b: Ast) -> Ast {
        Ast::binary(BinaryOp::Mul, a, b)
    }

    pub fn div(a: Ast, b: Ast) -> Ast {
        Ast::binary(BinaryOp::Div, a, b)
    }

    pub fn pow(a: Ast, b: Ast) -> Ast {
        Ast::binary(BinaryOp::Pow, a, b)
    }

    pub fn neg(a: Ast) -> Ast {
        Ast::unary(UnaryOp::Neg, a)
    }

    /// True when the tree mentions the variable.
    pub fn depends_on_var(&self) -> bool {
        match self {
            Ast::Const(_) => false,
            Ast::Var => true,
            Ast::Unary(_, a) => a.depends_on_var(),
            Ast::Binary(_, a, b) => a.depends_on_var() || b.depends_on_var(),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Ast::Const(_) | Ast::Var => 1,
            Ast::Unary(_, a) => 1 + a.node_count(),
            Ast::Binary(_, a, b) => 1 + a.node_count() + b.node_count(),
        }
    }

    /// Evaluate at `x`. Non-finite results are reported as domain errors.
    pub fn eval(&self, x: f64) -> Result<f64, ExprError> {
        let v = match self {
            Ast::Const(c) => *c,
            Ast::Var => x,
            Ast::Unary(op, a) => op.apply(a.eval(x)?)?,
            Ast::Binary(op, a, b) => op.apply(a.eval(x)?, b.eval(x)?)?,
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(ExprError::Domain {
                what: "non-finite result",
                at: x,
            })
        }
    }

    /// Printer bound to a variable name.
    pub fn display_with<'a>(&'a self, var: &'a str) -> display::AstDisplay<'a> {
        display::AstDisplay { ast: self, var }
    }
}

impl fmt::Display for Ast {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with("x"))
    }
}

pub fn eval(ast: &Ast, x: f64) -> Result<f64, ExprError> {
    ast.eval(x)
}

/// Open interval `(lo, hi)`; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const REAL_LINE: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    pub fn new(lo: f64, hi: f64) -> Interval {
        Interval { lo, hi }
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.lo && x < self.hi
    }

    pub fn is_empty(&self) -> bool {
        !(self.lo < self.hi)
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        Interval::new(self.lo.max(other.lo), self.hi.min(other.hi))
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }
}

/// Value and first three derivatives at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jet3 {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

impl Jet3 {
    pub fn constant(v: f64) -> Jet3 {
        Jet3 {
            v,
            d1: 0.0,
            d2: 0.0,
            d3: 0.0,
        }
    }
}

/// A smooth function of one variable on an open interval, with its
/// derivative trees precomputed.
#[derive(Debug, Clone, PartialEq)]
pub struct Func1D {
    ast: Ast,
    derivs: [Ast; 3],
    domain: Interval,
    var: String,
}

impl Func1D {
    pub fn new(ast: Ast, domain: Interval) -> Func1D {
        Func1D::with_var(ast, domain, "x")
    }

    pub fn with_var(ast: Ast, domain: Interval, var: &str) -> Func1D {
        let d1 = differentiate(&ast);
        let d2 = differentiate(&d1);
        let d3 = differentiate(&d2);
        Func1D {
            ast,
            derivs: [d1, d2, d3],
            domain,
            var: var.to_string(),
        }
    }

    pub fn parse(src: &str, var: &str, domain: Interval) -> Result<Func1D, ExprError> {
        Ok(Func1D::with_var(parse_expr(src, var)?, domain, var))
    }

    pub fn constant(c: f64) -> Func1D {
        Func1D::new(Ast::Const(c), Interval::REAL_LINE)
    }

    pub fn ast(&self) -> &Ast {
        &self.ast
    }

    /// Derivative tree of order 1, 2 or 3.
    pub fn derivative(&self, order: usize) -> &Ast {
        &self.derivs[order - 1]
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    pub fn is_constant(&self) -> bool {
        !self.ast.depends_on_var()
    }

    /// Source text for the expression, using the bound variable name.
    pub fn source(&self) -> String {
        self.ast.display_with(&self.var).to_string()
    }

    fn check_domain(&self, x: f64) -> Result<(), ExprError> {
        if self.domain.contains(x) {
            Ok(())
        } else {
            Err(ExprError::OutsideDomain {
                at: x,
                lo: self.domain.lo,
                hi: self.domain.hi,
            })
        }
    }

    pub fn value(&self, x: f64) -> Result<f64, ExprError> {
        self.check_domain(x)?;
        self.ast.eval(x)
    }

    /// First derivative only.
    pub fn slope(&self, x: f64) -> Result<f64, ExprError> {
        self.check_domain(x)?;
        self.derivs[0].eval(x)
    }

    pub fn jet3(&self, x: f64) -> Result<Jet3, ExprError> {
        self.check_domain(x)?;
        Ok(Jet3 {
            v: self.ast.eval(x)?,
            d1: self.derivs[0].eval(x)?,
            d2: self.derivs[1].eval(x)?,
            d3: self.derivs[2].eval(x)?,
        })
    }
}

pub fn eval_jet3(f: &Func1D, x: f64) -> Result<Jet3, ExprError> {
    f.jet3(x)
}

#[derive(Serialize, Deserialize)]
struct Func1DDoc {
    expr: String,
    #[serde(default = "default_var")]
    var: String,
    #[serde(default)]
    lo: Option<f64>,
    #[serde(default)]
    hi: Option<f64>,
}

fn default_var() -> String {
    "x".to_string()
}

impl Serialize for Func1D {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        Func1DDoc {
            expr: self.source(),
            var: self.var.clone(),
            lo: Some(self.domain.lo).filter(|v| v.is_finite()),
            hi: Some(self.domain.hi).filter(|v| v.is_finite()),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Func1D {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let doc = Func1DDoc::deserialize(deserializer)?;
        let domain = Interval::new(
            doc.lo.unwrap_or(f64::NEG_INFINITY),
            doc.hi.unwrap_or(f64::INFINITY),
        );
        if domain.is_empty() {
            return Err(serde::de::Error::custom("empty domain interval"));
        }
        Func1D::parse(&doc.expr, &doc.var, domain).map_err(serde::de::Error::custom)
    }
}
