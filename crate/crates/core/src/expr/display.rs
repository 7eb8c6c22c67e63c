use std::fmt;

use super::{Ast, BinaryOp, UnaryOp};

// Binding strength, mirroring the grammar levels.
const ADDITIVE: u8 = 1;
const MULTIPLICATIVE: u8 = 2;
const UNARY: u8 = 3;
const ATOM: u8 = 5;

pub struct AstDisplay<'a> {
    pub(super) ast: &'a Ast,
    pub(super) var: &'a str,
}

fn level(ast: &Ast) -> u8 {
    match ast {
        Ast::Const(c) if c.is_sign_negative() => UNARY,
        Ast::Const(_) | Ast::Var => ATOM,
        Ast::Unary(UnaryOp::Neg, _) => UNARY,
        Ast::Unary(_, _) => ATOM,
        Ast::Binary(BinaryOp::Add | BinaryOp::Sub, _, _) => ADDITIVE,
        Ast::Binary(BinaryOp::Mul | BinaryOp::Div, _, _) => MULTIPLICATIVE,
        Ast::Binary(BinaryOp::Pow, _, _) => 4,
    }
}

fn write_number(f: &mut fmt::Formatter<'_>, c: f64) -> fmt::Result {
    let a = c.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) {
        write!(f, "{c}")
    } else {
        write!(f, "{c:?}")
    }
}

impl AstDisplay<'_> {
    fn child<'b>(&'b self, ast: &'b Ast) -> AstDisplay<'b> {
        AstDisplay { ast, var: self.var }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, ast: &Ast, min_level: u8) -> fmt::Result {
        if level(ast) < min_level {
            write!(f, "({})", self.child(ast))
        } else {
            write!(f, "{}", self.child(ast))
        }
    }
}

impl fmt::Display for AstDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.ast {
            Ast::Const(c) => write_number(f, *c),
            Ast::Var => f.write_str(self.var),
            Ast::Unary(UnaryOp::Neg, a) => {
                f.write_str("-")?;
                self.write_at(f, a, UNARY)
            }
            Ast::Unary(op, a) => write!(f, "{}({})", op.name(), self.child(a)),
            Ast::Binary(op, a, b) => {
                let (sym, left, right) = match op {
                    BinaryOp::Add => (" + ", ADDITIVE, MULTIPLICATIVE),
                    BinaryOp::Sub => (" - ", ADDITIVE, MULTIPLICATIVE),
                    BinaryOp::Mul => ("*", MULTIPLICATIVE, UNARY),
                    BinaryOp::Div => ("/", MULTIPLICATIVE, UNARY),
                    BinaryOp::Pow => ("^", ATOM, UNARY),
                };
                self.write_at(f, a, left)?;
                f.write_str(sym)?;
                self.write_at(f, b, right)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::expr::parse_expr;

    #[test]
    fn prints_minimal_parentheses() {
        for (src, want) in [
            ("x^2", "x^2"),
            ("-2*log(x)", "-2*log(x)"),
            ("(x+1)*(x-1)", "(x + 1)*(x - 1)"),
            ("x-(1-x)", "x - (1 - x)"),
            ("(-2)^x", "(-2)^x"),
            ("(x^2)^3", "(x^2)^3"),
            ("x^2^3", "x^2^3"),
            ("-(x+1)", "-(x + 1)"),
            ("x/(2*x)", "x/(2*x)"),
            ("1e-7*x", "1e-7*x"),
        ] {
            let ast = parse_expr(src, "x").unwrap();
            assert_eq!(ast.to_string(), want, "{src}");
            assert_eq!(parse_expr(want, "x").unwrap(), ast);
        }
    }

    #[test]
    fn uses_bound_variable() {
        let ast = parse_expr("exp(z)*z", "z").unwrap();
        assert_eq!(ast.display_with("z").to_string(), "exp(z)*z");
    }
}
