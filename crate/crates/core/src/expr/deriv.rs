//! Symbolic differentiation and the light simplification pass applied to
//! its output (constant subtrees, 0/1 identities, double negation).

use super::{Ast, BinaryOp, UnaryOp};

fn c(v: f64) -> Ast {
    Ast::Const(v)
}

fn un(op: UnaryOp, a: &Ast) -> Ast {
    Ast::unary(op, a.clone())
}

/// d/dx of `ast`, simplified.
pub fn differentiate(ast: &Ast) -> Ast {
    simplify(&raw_derivative(ast))
}

fn raw_derivative(ast: &Ast) -> Ast {
    match ast {
        Ast::Const(_) => c(0.0),
        Ast::Var => c(1.0),
        Ast::Unary(op, a) => {
            let da = raw_derivative(a);
            let outer = match op {
                UnaryOp::Neg => return Ast::neg(da),
                UnaryOp::Sin => un(UnaryOp::Cos, a),
                UnaryOp::Cos => Ast::neg(un(UnaryOp::Sin, a)),
                UnaryOp::Sinh => un(UnaryOp::Cosh, a),
                UnaryOp::Cosh => un(UnaryOp::Sinh, a),
                UnaryOp::Tanh => Ast::sub(c(1.0), Ast::pow(un(UnaryOp::Tanh, a), c(2.0))),
                UnaryOp::Exp => un(UnaryOp::Exp, a),
                UnaryOp::Log => return Ast::div(da, (**a).clone()),
                UnaryOp::Sqrt => {
                    return Ast::div(da, Ast::mul(c(2.0), un(UnaryOp::Sqrt, a)));
                }
                // sign(a) written as a/|a|, undefined at a = 0
                UnaryOp::Abs => Ast::div((**a).clone(), un(UnaryOp::Abs, a)),
            };
            Ast::mul(outer, da)
        }
        Ast::Binary(op, a, b) => {
            let (a, b) = (&**a, &**b);
            match op {
                BinaryOp::Add => Ast::add(raw_derivative(a), raw_derivative(b)),
                BinaryOp::Sub => Ast::sub(raw_derivative(a), raw_derivative(b)),
                BinaryOp::Mul => Ast::add(
                    Ast::mul(raw_derivative(a), b.clone()),
                    Ast::mul(a.clone(), raw_derivative(b)),
                ),
                BinaryOp::Div => Ast::div(
                    Ast::sub(
                        Ast::mul(raw_derivative(a), b.clone()),
                        Ast::mul(a.clone(), raw_derivative(b)),
                    ),
                    Ast::pow(b.clone(), c(2.0)),
                ),
                BinaryOp::Pow => pow_derivative(a, b),
            }
        }
    }
}

fn pow_derivative(base: &Ast, exponent: &Ast) -> Ast {
    let db = raw_derivative(base);
    if !exponent.depends_on_var() {
        // p * u^(p-1) * u'
        let lowered = match exponent {
            Ast::Const(p) => c(p - 1.0),
            e => Ast::sub(e.clone(), c(1.0)),
        };
        return Ast::mul(
            Ast::mul(exponent.clone(), Ast::pow(base.clone(), lowered)),
            db,
        );
    }
    // u^v * (v' log u + v u'/u)
    let de = raw_derivative(exponent);
    Ast::mul(
        Ast::pow(base.clone(), exponent.clone()),
        Ast::add(
            Ast::mul(de, un(UnaryOp::Log, base)),
            Ast::div(Ast::mul(exponent.clone(), db), base.clone()),
        ),
    )
}

fn is_const(ast: &Ast, v: f64) -> bool {
    matches!(ast, Ast::Const(x) if *x == v)
}

/// Fold a variable-free subtree when it evaluates to a finite value.
fn fold(ast: Ast) -> Ast {
    if matches!(ast, Ast::Const(_)) || ast.depends_on_var() {
        return ast;
    }
    match ast.eval(0.0) {
        Ok(v) => Ast::Const(v),
        Err(_) => ast,
    }
}

/// Bottom-up simplification limited to identities that preserve the value
/// everywhere the original expression is defined.
pub fn simplify(ast: &Ast) -> Ast {
    let out = match ast {
        Ast::Const(_) | Ast::Var => return ast.clone(),
        Ast::Unary(op, a) => {
            let a = simplify(a);
            match (op, a) {
                (UnaryOp::Neg, Ast::Unary(UnaryOp::Neg, inner)) => *inner,
                (UnaryOp::Neg, Ast::Const(v)) => Ast::Const(-v),
                (op, a) => Ast::unary(*op, a),
            }
        }
        Ast::Binary(op, a, b) => {
            let a = simplify(a);
            let b = simplify(b);
            match op {
                BinaryOp::Add if is_const(&a, 0.0) => b,
                BinaryOp::Add | BinaryOp::Sub if is_const(&b, 0.0) => a,
                BinaryOp::Sub if is_const(&a, 0.0) => simplify(&Ast::neg(b)),
                BinaryOp::Mul if is_const(&a, 0.0) || is_const(&b, 0.0) => c(0.0),
                BinaryOp::Mul if is_const(&a, 1.0) => b,
                BinaryOp::Mul | BinaryOp::Div if is_const(&b, 1.0) => a,
                BinaryOp::Div if is_const(&a, 0.0) => c(0.0),
                BinaryOp::Pow if is_const(&b, 1.0) => a,
                BinaryOp::Pow if is_const(&b, 0.0) => c(1.0),
                _ => Ast::binary(*op, a, b),
            }
        }
    };
    fold(out)
}
