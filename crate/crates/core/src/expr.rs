//! A small arithmetic expression language used for maps `S(x)`, moduli `φ(t)`
//! and function-backed distances `d(x, y)`.
//!
//! Grammar (lowest precedence first):
//!
//! ```text
//! expr    := sum (cmp_op sum)?          cmp_op: < <= > >= == !=
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | '+' unary | power
//! power   := atom (('^' | '**') unary)?
//! atom    := number | ident | ident '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! Comparisons evaluate to `1.0` or `0.0`, which makes piecewise maps such as
//! `if(x < 0.5, x/4, x/5)` expressible.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("expression error at column {position}: {message}")]
pub struct ParseError {
    /// 1-based character column.
    pub position: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Func {
    Abs,
    Sqrt,
    Exp,
    Ln,
    Floor,
    Min,
    Max,
    If,
}

impl Func {
    fn lookup(name: &str) -> Option<(Func, usize)> {
        Some(match name {
            "abs" => (Func::Abs, 1),
            "sqrt" => (Func::Sqrt, 1),
            "exp" => (Func::Exp, 1),
            "ln" | "log" => (Func::Ln, 1),
            "floor" => (Func::Floor, 1),
            "min" => (Func::Min, 2),
            "max" => (Func::Max, 2),
            "if" => (Func::If, 3),
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Num(f64),
    Var(usize),
    Neg(Box<Node>),
    Bin(BinOp, Box<Node>, Box<Node>),
    Call(Func, Vec<Node>),
}

/// A parsed expression over a fixed, ordered list of variables.
#[derive(Clone, PartialEq)]
pub struct Expr {
    source: String,
    vars: Vec<String>,
    root: Node,
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({:?})", self.source)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

impl Expr {
    /// Parse `source`; identifiers must be one of `vars`, a builtin function,
    /// or the constants `pi` / `e`.
    pub fn parse(source: &str, vars: &[&str]) -> Result<Expr, ParseError> {
        let tokens = tokenize(source)?;
        let mut parser = Parser {
            tokens,
            pos: 0,
            vars,
        };
        let root = parser.expr()?;
        if let Some(tok) = parser.peek() {
            return Err(ParseError {
                position: tok.col,
                message: format!("unexpected {}", tok.kind),
            });
        }
        Ok(Expr {
            source: source.trim().to_string(),
            vars: vars.iter().map(|v| v.to_string()).collect(),
            root,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    /// Evaluate with `values[i]` bound to the i-th declared variable.
    ///
    /// Panics if fewer values than declared variables are supplied.
    pub fn eval(&self, values: &[f64]) -> f64 {
        assert!(
            values.len() >= self.vars.len(),
            "expression over {} variables evaluated with {} values",
            self.vars.len(),
            values.len()
        );
        eval_node(&self.root, values)
    }
}

fn bool_val(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

fn eval_node(node: &Node, values: &[f64]) -> f64 {
    match node {
        Node::Num(v) => *v,
        Node::Var(i) => values[*i],
        Node::Neg(inner) => -eval_node(inner, values),
        Node::Bin(op, a, b) => {
            let a = eval_node(a, values);
            let b = eval_node(b, values);
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => a / b,
                BinOp::Pow => a.powf(b),
                BinOp::Lt => bool_val(a < b),
                BinOp::Le => bool_val(a <= b),
                BinOp::Gt => bool_val(a > b),
                BinOp::Ge => bool_val(a >= b),
                BinOp::Eq => bool_val(a == b),
                BinOp::Ne => bool_val(a != b),
            }
        }
        Node::Call(func, args) => match func {
            // only the taken branch is evaluated
            Func::If => {
                if eval_node(&args[0], values) != 0.0 {
                    eval_node(&args[1], values)
                } else {
                    eval_node(&args[2], values)
                }
            }
            Func::Abs => eval_node(&args[0], values).abs(),
            Func::Sqrt => eval_node(&args[0], values).sqrt(),
            Func::Exp => eval_node(&args[0], values).exp(),
            Func::Ln => eval_node(&args[0], values).ln(),
            Func::Floor => eval_node(&args[0], values).floor(),
            Func::Min => eval_node(&args[0], values).min(eval_node(&args[1], values)),
            Func::Max => eval_node(&args[0], values).max(eval_node(&args[1], values)),
        },
    }
}

#[derive(Debug, Clone, PartialEq)]
enum TokKind {
    Num(f64),
    Ident(String),
    Op(&'static str),
    LParen,
    RParen,
    Comma,
}

impl fmt::Display for TokKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokKind::Num(v) => write!(f, "number {v}"),
            TokKind::Ident(s) => write!(f, "identifier '{s}'"),
            TokKind::Op(op) => write!(f, "'{op}'"),
            TokKind::LParen => f.write_str("'('"),
            TokKind::RParen => f.write_str("')'"),
            TokKind::Comma => f.write_str("','"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokKind,
    col: usize,
}

const OPERATORS: [&str; 13] = [
    "**", "<=", ">=", "==", "!=", "+", "-", "*", "/", "^", "<", ">", "=",
];

fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let value = text.parse::<f64>().map_err(|_| ParseError {
                position: col,
                message: format!("malformed number '{text}'"),
            })?;
            out.push(Token {
                kind: TokKind::Num(value),
                col,
            });
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token {
                kind: TokKind::Ident(chars[start..i].iter().collect()),
                col,
            });
        } else if c == '(' || c == ')' || c == ',' {
            out.push(Token {
                kind: match c {
                    '(' => TokKind::LParen,
                    ')' => TokKind::RParen,
                    _ => TokKind::Comma,
                },
                col,
            });
            i += 1;
        } else {
            let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
            let op = OPERATORS
                .iter()
                .find(|op| rest.starts_with(**op))
                .ok_or_else(|| ParseError {
                    position: col,
                    message: format!("unexpected character '{c}'"),
                })?;
            if *op == "=" {
                return Err(ParseError {
                    position: col,
                    message: "use '==' for equality".into(),
                });
            }
            i += op.chars().count();
            out.push(Token {
                kind: TokKind::Op(op),
                col,
            });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    vars: &'a [&'a str],
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn end_col(&self) -> usize {
        self.tokens.last().map_or(1, |t| t.col + 1)
    }

    fn eat_op(&mut self, ops: &[&'static str]) -> Option<&'static str> {
        if let Some(Token {
            kind: TokKind::Op(op),
            ..
        }) = self.peek()
        {
            if ops.contains(op) {
                let op = *op;
                self.pos += 1;
                return Some(op);
            }
        }
        None
    }

    fn expect(&mut self, kind: TokKind) -> Result<(), ParseError> {
        match self.peek() {
            Some(tok) if tok.kind == kind => {
                self.pos += 1;
                Ok(())
            }
            Some(tok) => Err(ParseError {
                position: tok.col,
                message: format!("expected {kind}, found {}", tok.kind),
            }),
            None => Err(ParseError {
                position: self.end_col(),
                message: format!("expected {kind}, found end of input"),
            }),
        }
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let lhs = self.sum()?;
        let op = match self.eat_op(&["<", "<=", ">", ">=", "==", "!="]) {
            Some(op) => op,
            None => return Ok(lhs),
        };
        let rhs = self.sum()?;
        let op = match op {
            "<" => BinOp::Lt,
            "<=" => BinOp::Le,
            ">" => BinOp::Gt,
            ">=" => BinOp::Ge,
            "==" => BinOp::Eq,
            _ => BinOp::Ne,
        };
        Ok(Node::Bin(op, Box::new(lhs), Box::new(rhs)))
    }

    fn sum(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.product()?;
        while let Some(op) = self.eat_op(&["+", "-"]) {
            let rhs = self.product()?;
            let op = if op == "+" { BinOp::Add } else { BinOp::Sub };
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.eat_op(&["*", "/"]) {
            let rhs = self.unary()?;
            let op = if op == "*" { BinOp::Mul } else { BinOp::Div };
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node, ParseError> {
        if self.eat_op(&["-"]).is_some() {
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        if self.eat_op(&["+"]).is_some() {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, ParseError> {
        let base = self.atom()?;
        if self.eat_op(&["^", "**"]).is_some() {
            let exponent = self.unary()?;
            return Ok(Node::Bin(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node, ParseError> {
        let tok = match self.peek() {
            Some(tok) => tok.clone(),
            None => {
                return Err(ParseError {
                    position: self.end_col(),
                    message: "unexpected end of input".into(),
                })
            }
        };
        self.pos += 1;
        match tok.kind {
            TokKind::Num(v) => Ok(Node::Num(v)),
            TokKind::LParen => {
                let inner = self.expr()?;
                self.expect(TokKind::RParen)?;
                Ok(inner)
            }
            TokKind::Ident(name) => {
                if matches!(self.peek(), Some(Token { kind: TokKind::LParen, .. })) {
                    return self.call(&name, tok.col);
                }
                if let Some(i) = self.vars.iter().position(|v| *v == name) {
                    return Ok(Node::Var(i));
                }
                match name.as_str() {
                    "pi" => Ok(Node::Num(std::f64::consts::PI)),
                    "e" => Ok(Node::Num(std::f64::consts::E)),
                    _ => Err(ParseError {
                        position: tok.col,
                        message: format!(
                            "unknown identifier '{name}' (variables: {})",
                            self.vars.join(", ")
                        ),
                    }),
                }
            }
            other => Err(ParseError {
                position: tok.col,
                message: format!("unexpected {other}"),
            }),
        }
    }

    fn call(&mut self, name: &str, col: usize) -> Result<Node, ParseError> {
        let (func, arity) = Func::lookup(name).ok_or_else(|| ParseError {
            position: col,
            message: format!("unknown function '{name}'"),
        })?;
        self.expect(TokKind::LParen)?;
        let mut args = vec![self.expr()?];
        while matches!(self.peek(), Some(Token { kind: TokKind::Comma, .. })) {
            self.pos += 1;
            args.push(self.expr()?);
        }
        self.expect(TokKind::RParen)?;
        if args.len() != arity {
            return Err(ParseError {
                position: col,
                message: format!("{name} takes {arity} argument(s), got {}", args.len()),
            });
        }
        Ok(Node::Call(func, args))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval1(src: &str, x: f64) -> f64 {
        Expr::parse(src, &["x"]).unwrap().eval(&[x])
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(eval1("1 + 2 * 3", 0.0), 7.0);
        assert_eq!(eval1("(1 + 2) * 3", 0.0), 9.0);
        assert_eq!(eval1("8 / 4 / 2", 0.0), 1.0);
        assert_eq!(eval1("2 ^ 3 ^ 2", 0.0), 512.0);
        assert_eq!(eval1("-2 ^ 2", 0.0), -4.0);
        assert_eq!(eval1("2 ** 10", 0.0), 1024.0);
        assert_eq!(eval1("x - 1 - 1", 5.0), 3.0);
    }

    #[test]
    fn piecewise_kannan_map() {
        let src = "if(x < 0.5, x/4, x/5)";
        assert_eq!(eval1(src, 0.4), 0.1);
        assert_eq!(eval1(src, 0.5), 0.1);
        assert_eq!(eval1(src, 1.0), 0.2);
    }

    #[test]
    fn functions_and_constants() {
        assert_eq!(eval1("abs(x)", -3.0), 3.0);
        assert_eq!(eval1("max(x, 2)", 1.0), 2.0);
        assert_eq!(eval1("min(x, 2)", 1.0), 1.0);
        assert!((eval1("ln(e)", 0.0) - 1.0).abs() < 1e-15);
        assert_eq!(eval1("floor(2.7)", 0.0), 2.0);
        assert_eq!(eval1("sqrt(x)", 16.0), 4.0);
        assert_eq!(eval1("1.5e2 + 2E-1", 0.0), 150.2);
    }

    #[test]
    fn two_variables() {
        let d = Expr::parse("(x - y)^2", &["x", "y"]).unwrap();
        assert_eq!(d.eval(&[0.0, 2.0]), 4.0);
        assert_eq!(d.to_string(), "(x - y)^2");
    }

    #[test]
    fn errors_report_position() {
        let err = Expr::parse("x + * 2", &["x"]).unwrap_err();
        assert_eq!(err.position, 5);
        let err = Expr::parse("t + 1", &["x"]).unwrap_err();
        assert_eq!(err.position, 1);
        assert!(err.message.contains("unknown identifier"));
        let err = Expr::parse("(x + 1", &["x"]).unwrap_err();
        assert!(err.message.contains("expected ')'"));
        let err = Expr::parse("max(x)", &["x"]).unwrap_err();
        assert!(err.message.contains("takes 2"));
        let err = Expr::parse("x = 1", &["x"]).unwrap_err();
        assert_eq!(err.position, 3);
        assert!(Expr::parse("", &["x"]).is_err());
        assert!(Expr::parse("x 1", &["x"]).is_err());
        assert!(Expr::parse("x $ 1", &["x"]).is_err());
    }
}
