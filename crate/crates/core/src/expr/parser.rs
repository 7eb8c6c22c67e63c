//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr  := term (('+'|'-') term)*
//! term  := unary (('*'|'/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' unary)?
//! atom  := number | ident | ident '(' expr ')' | '(' expr ')'
//! ```

use super::{Ast, BinaryOp, ExprError, UnaryOp};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Num(v) => format!("number {v}"),
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Plus => "`+`".into(),
        Tok::Minus => "`-`".into(),
        Tok::Star => "`*`".into(),
        Tok::Slash => "`/`".into(),
        Tok::Caret => "`^`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Comma => "`,`".into(),
        Tok::End => "end of input".into(),
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ExprError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let text = &src[start..i];
                let v: f64 = text.parse().map_err(|_| ExprError::Syntax {
                    offset: start,
                    message: format!("malformed number `{text}`"),
                })?;
                out.push((Tok::Num(v), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(src[start..i].to_string()), start));
                continue;
            }
            _ => {
                let ch = src[start..].chars().next().unwrap_or('?');
                return Err(ExprError::Syntax {
                    offset: start,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    var: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self) -> ExprError {
        ExprError::Syntax {
            offset: self.offset(),
            message: format!("unexpected {}", describe(self.peek())),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ExprError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(ExprError::Syntax {
                offset: self.offset(),
                message: format!(
                    "expected {}, found {}",
                    describe(&tok),
                    describe(self.peek())
                ),
            })
        }
    }

    fn expr(&mut self) -> Result<Ast, ExprError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinaryOp::Add,
                Tok::Minus => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Ast::binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Ast, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinaryOp::Mul,
                Tok::Slash => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Ast::binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Ast, ExprError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            let inner = self.unary()?;
            // negative literals are stored as constants
            return Ok(match inner {
                Ast::Const(c) => Ast::Const(-c),
                other => Ast::neg(other),
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Ast, ExprError> {
        let base = self.atom()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let exponent = self.unary()?;
            return Ok(Ast::pow(base, exponent));
        }
        Ok(base)
    }

    fn call_args(&mut self) -> Result<Vec<Ast>, ExprError> {
        self.expect(Tok::LParen)?;
        let mut args = vec![self.expr()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            args.push(self.expr()?);
        }
        self.expect(Tok::RParen)?;
        Ok(args)
    }

    fn atom(&mut self) -> Result<Ast, ExprError> {
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Ast::Const(v))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                let (_, offset) = self.bump();
                let is_call = *self.peek() == Tok::LParen;
                if name == self.var {
                    if is_call {
                        let found = self.call_args()?.len();
                        return Err(ExprError::Arity {
                            offset,
                            name,
                            expected: 0,
                            found,
                        });
                    }
                    return Ok(Ast::Var);
                }
                let Some(op) = UnaryOp::from_name(&name) else {
                    return Err(ExprError::UnknownIdentifier { offset, name });
                };
                if !is_call {
                    return Err(ExprError::Arity {
                        offset,
                        name,
                        expected: 1,
                        found: 0,
                    });
                }
                let mut args = self.call_args()?;
                if args.len() != 1 {
                    return Err(ExprError::Arity {
                        offset,
                        name,
                        expected: 1,
                        found: args.len(),
                    });
                }
                Ok(Ast::unary(op, args.pop().expect("one argument")))
            }
            _ => Err(self.unexpected()),
        }
    }
}

/// Parse `src` as an expression in the single variable `var`.
pub fn parse_expr(src: &str, var: &str) -> Result<Ast, ExprError> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
        var,
    };
    let ast = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected());
    }
    Ok(ast)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar_examples() {
        assert_eq!(
            parse_expr("x^2", "x").unwrap(),
            Ast::pow(Ast::Var, Ast::Const(2.0))
        );
        assert_eq!(
            parse_expr("-2*log(x)", "x").unwrap(),
            Ast::mul(Ast::Const(-2.0), Ast::unary(UnaryOp::Log, Ast::Var))
        );
        assert_eq!(
            parse_expr("1+*x", "x"),
            Err(ExprError::Syntax {
                offset: 2,
                message: "unexpected `*`".into()
            })
        );
    }

    #[test]
    fn precedence_and_associativity() {
        let p = |s| parse_expr(s, "x").unwrap();
        assert_eq!(
            p("1-x-2"),
            Ast::sub(Ast::sub(Ast::Const(1.0), Ast::Var), Ast::Const(2.0))
        );
        assert_eq!(
            p("x^2^3"),
            Ast::pow(Ast::Var, Ast::pow(Ast::Const(2.0), Ast::Const(3.0)))
        );
        assert_eq!(p("-x^2"), Ast::neg(Ast::pow(Ast::Var, Ast::Const(2.0))));
        assert_eq!(p("2^-x"), Ast::pow(Ast::Const(2.0), Ast::neg(Ast::Var)));
        assert_eq!(
            p("1 + 2*x/3"),
            Ast::add(
                Ast::Const(1.0),
                Ast::div(Ast::mul(Ast::Const(2.0), Ast::Var), Ast::Const(3.0))
            )
        );
        assert_eq!(p(" 1.5e-3 "), Ast::Const(1.5e-3));
        assert_eq!(p(".25"), Ast::Const(0.25));
    }

    #[test]
    fn declared_variable() {
        assert_eq!(
            parse_expr("exp(z)", "z").unwrap(),
            Ast::unary(UnaryOp::Exp, Ast::Var)
        );
        assert!(matches!(
            parse_expr("exp(x)", "z"),
            Err(ExprError::UnknownIdentifier { offset: 4, .. })
        ));
    }

    #[test]
    fn error_kinds() {
        assert!(matches!(
            parse_expr("foo(x)", "x"),
            Err(ExprError::UnknownIdentifier { offset: 0, .. })
        ));
        assert!(matches!(
            parse_expr("sin + 1", "x"),
            Err(ExprError::Arity {
                expected: 1,
                found: 0,
                ..
            })
        ));
        assert!(matches!(
            parse_expr("cos(x, 2)", "x"),
            Err(ExprError::Arity {
                expected: 1,
                found: 2,
                ..
            })
        ));
        assert!(matches!(
            parse_expr("x(2)", "x"),
            Err(ExprError::Arity {
                expected: 0,
                found: 1,
                ..
            })
        ));
        assert!(matches!(
            parse_expr("(x", "x"),
            Err(ExprError::Syntax { offset: 2, .. })
        ));
        assert!(matches!(
            parse_expr("", "x"),
            Err(ExprError::Syntax { offset: 0, .. })
        ));
        assert!(matches!(
            parse_expr("x $ 2", "x"),
            Err(ExprError::Syntax { offset: 2, .. })
        ));
        assert!(matches!(
            parse_expr("2 x", "x"),
            Err(ExprError::Syntax { offset: 2, .. })
        ));
    }
}
