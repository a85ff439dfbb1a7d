//! Small real-valued expression language in one variable `x`.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := primary ('^' exponent)*
//! exponent:= INT | '(' INT ')'
//! primary := NUMBER | 'x' | 'pi' | ('sin' | 'cos' | 'abs') '(' expr ')' | '(' expr ')'
//! ```

use std::f64::consts::PI;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
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
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Abs,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Abs => "abs",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    X,
    Pi,
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("empty expression")]
    Empty,
    #[error("unexpected character `{0}`")]
    UnexpectedChar(char),
    #[error("unexpected token `{0}`")]
    UnexpectedToken(String),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("unbalanced parenthesis")]
    UnbalancedParenthesis,
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("exponent must be a non-negative integer literal")]
    NonIntegerExponent,
    #[error("division by literal zero")]
    DivisionByZero,
    #[error("malformed number `{0}`")]
    MalformedNumber(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at position {position}: {kind}")]
pub struct ParseError {
    pub position: usize,
    pub kind: ParseErrorKind,
}

impl Expr {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::X => x,
            Expr::Pi => PI,
            Expr::Neg(e) => -e.eval(x),
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval(x), b.eval(x));
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                }
            }
            Expr::Pow(e, n) => e.eval(x).powi(*n as i32),
            Expr::Call(f, e) => {
                let v = e.eval(x);
                match f {
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Abs => v.abs(),
                }
            }
        }
    }

    pub fn mentions_x(&self) -> bool {
        match self {
            Expr::Num(_) | Expr::Pi => false,
            Expr::X => true,
            Expr::Neg(e) | Expr::Pow(e, _) | Expr::Call(_, e) => e.mentions_x(),
            Expr::Bin(_, a, b) => a.mentions_x() || b.mentions_x(),
        }
    }
}

impl fmt::Display for Expr {
    /// Fully parenthesized; re-parsing reproduces the same tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::X => write!(f, "x"),
            Expr::Pi => write!(f, "pi"),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Bin(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Expr::Pow(e, n) => write!(f, "({e}^{n})"),
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64, String),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || c == '.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
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
            let value: f64 = text.parse().map_err(|_| ParseError {
                position: start,
                kind: ParseErrorKind::MalformedNumber(text.to_string()),
            })?;
            out.push((start, Tok::Num(value, text.to_string())));
        } else if c.is_ascii_alphabetic() || c == '_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(src[start..i].to_string())));
        } else {
            let tok = match c {
                '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                _ => {
                    let ch = src[start..].chars().next().unwrap_or(c);
                    return Err(ParseError {
                        position: start,
                        kind: ParseErrorKind::UnexpectedChar(ch),
                    });
                }
            };
            out.push((start, tok));
            i += 1;
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn err<T>(&self, kind: ParseErrorKind) -> Result<T, ParseError> {
        Err(ParseError {
            position: self.here(),
            kind,
        })
    }

    fn unexpected<T>(&self) -> Result<T, ParseError> {
        match self.peek() {
            None => self.err(ParseErrorKind::UnexpectedEnd),
            Some(t) => {
                let text = match t {
                    Tok::Num(_, s) | Tok::Ident(s) => s.clone(),
                    Tok::Op(c) => c.to_string(),
                    Tok::LParen => "(".into(),
                    Tok::RParen => ")".into(),
                };
                self.err(ParseErrorKind::UnexpectedToken(text))
            }
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        while let Some(Tok::Op(c @ ('+' | '-'))) = self.peek() {
            let op = if *c == '+' { BinOp::Add } else { BinOp::Sub };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(Tok::Op(c @ ('*' | '/'))) = self.peek() {
            let op = if *c == '*' { BinOp::Mul } else { BinOp::Div };
            self.pos += 1;
            let at = self.here();
            let rhs = self.unary()?;
            if op == BinOp::Div && rhs == Expr::Num(0.0) {
                return Err(ParseError {
                    position: at,
                    kind: ParseErrorKind::DivisionByZero,
                });
            }
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Some(Tok::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let mut base = self.primary()?;
        while let Some(Tok::Op('^')) = self.peek() {
            self.pos += 1;
            let n = self.exponent()?;
            base = Expr::Pow(Box::new(base), n);
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<u32, ParseError> {
        let wrapped = matches!(self.peek(), Some(Tok::LParen));
        if wrapped {
            self.pos += 1;
        }
        let n = match self.peek() {
            Some(Tok::Num(v, text)) if !text.contains(['.', 'e', 'E']) && *v <= u32::MAX as f64 => *v as u32,
            Some(Tok::Num(..)) | Some(Tok::Op('-')) => return self.err(ParseErrorKind::NonIntegerExponent),
            _ => return self.unexpected(),
        };
        self.pos += 1;
        if wrapped {
            self.close_paren()?;
        }
        Ok(n)
    }

    fn close_paren(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::RParen) => {
                self.pos += 1;
                Ok(())
            }
            None => self.err(ParseErrorKind::UnbalancedParenthesis),
            _ => self.unexpected(),
        }
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let Some(tok) = self.peek().cloned() else {
            return self.err(ParseErrorKind::UnexpectedEnd);
        };
        match tok {
            Tok::Num(v, _) => {
                self.pos += 1;
                Ok(Expr::Num(v))
            }
            Tok::LParen => {
                self.pos += 1;
                let e = self.expr()?;
                self.close_paren()?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let at = self.here();
                self.pos += 1;
                let func = match name.as_str() {
                    "x" => return Ok(Expr::X),
                    "pi" => return Ok(Expr::Pi),
                    "sin" => Func::Sin,
                    "cos" => Func::Cos,
                    "abs" => Func::Abs,
                    _ => {
                        return Err(ParseError {
                            position: at,
                            kind: ParseErrorKind::UnknownIdentifier(name),
                        })
                    }
                };
                if !matches!(self.peek(), Some(Tok::LParen)) {
                    return self.unexpected();
                }
                self.pos += 1;
                let arg = self.expr()?;
                self.close_paren()?;
                Ok(Expr::Call(func, Box::new(arg)))
            }
            Tok::Op(_) | Tok::RParen => self.unexpected(),
        }
    }
}

pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let toks = tokenize(src)?;
    if toks.is_empty() {
        return Err(ParseError {
            position: 0,
            kind: ParseErrorKind::Empty,
        });
    }
    let mut parser = Parser {
        toks,
        pos: 0,
        end: src.len(),
    };
    let e = parser.expr()?;
    match parser.peek() {
        None => Ok(e),
        Some(Tok::RParen) => parser.err(ParseErrorKind::UnbalancedParenthesis),
        Some(_) => parser.unexpected(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn kind(src: &str) -> ParseErrorKind {
        parse_expr(src).unwrap_err().kind
    }

    #[test]
    fn precedence() {
        assert_eq!(parse_expr("-x^2").unwrap().eval(3.0), -9.0);
        assert_eq!(parse_expr("1 + 2 * 3 ^ 2").unwrap().eval(0.0), 19.0);
        assert_eq!(parse_expr("(1 + 2) * 3").unwrap().eval(0.0), 9.0);
        assert_eq!(parse_expr("8 / 4 / 2").unwrap().eval(0.0), 1.0);
        assert_eq!(parse_expr("2 - 3 - 4").unwrap().eval(0.0), -5.0);
        assert_eq!(parse_expr("x^(3)").unwrap().eval(2.0), 8.0);
        assert_eq!(parse_expr("--x").unwrap().eval(2.0), 2.0);
    }

    #[test]
    fn functions_and_constants() {
        let e = parse_expr("cos(2*pi*x)").unwrap();
        assert_eq!(e.eval(0.0), 1.0);
        assert!((e.eval(0.5) + 1.0).abs() < 1e-15);
        assert_eq!(parse_expr("abs(x - 1)").unwrap().eval(-1.0), 2.0);
        assert_eq!(parse_expr("1.5e1").unwrap().eval(0.0), 15.0);
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse_expr("sin(2*pi*x").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnbalancedParenthesis);
        assert_eq!(err.position, 10);
        assert_eq!(kind("x)"), ParseErrorKind::UnbalancedParenthesis);
        assert_eq!(kind("x^0.5"), ParseErrorKind::NonIntegerExponent);
        assert_eq!(kind("x^-1"), ParseErrorKind::NonIntegerExponent);
        assert_eq!(kind("x^x"), ParseErrorKind::UnexpectedToken("x".into()));
        assert_eq!(kind("1/0"), ParseErrorKind::DivisionByZero);
        assert_eq!(kind("1/(0)"), ParseErrorKind::DivisionByZero);
        assert_eq!(kind("tan(x)"), ParseErrorKind::UnknownIdentifier("tan".into()));
        assert_eq!(kind("y"), ParseErrorKind::UnknownIdentifier("y".into()));
        assert_eq!(kind("1 +"), ParseErrorKind::UnexpectedEnd);
        assert_eq!(kind("   "), ParseErrorKind::Empty);
        assert_eq!(kind("2 # 3"), ParseErrorKind::UnexpectedChar('#'));
        assert_eq!(parse_expr("2 # 3").unwrap_err().position, 2);
        assert_eq!(kind("1..2"), ParseErrorKind::MalformedNumber("1..2".into()));
        assert_eq!(kind("sin x"), ParseErrorKind::UnexpectedToken("x".into()));
    }

    #[test]
    fn division_by_nonliteral_zero_is_allowed() {
        assert!(parse_expr("1/(x - x)").is_ok());
        assert!(parse_expr("1/0.5").is_ok());
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            (0.0f64..100.0).prop_map(Expr::Num),
            Just(Expr::X),
            Just(Expr::Pi),
        ];
        leaf.prop_recursive(5, 48, 2, |inner| {
            let op = prop_oneof![
                Just(BinOp::Add),
                Just(BinOp::Sub),
                Just(BinOp::Mul),
                Just(BinOp::Div)
            ];
            let func = prop_oneof![Just(Func::Sin), Just(Func::Cos), Just(Func::Abs)];
            prop_oneof![
                inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
                (op, inner.clone(), inner.clone())
                    .prop_filter("literal zero divisor", |(op, _, b)| {
                        !(*op == BinOp::Div && *b == Expr::Num(0.0))
                    })
                    .prop_map(|(op, a, b)| Expr::Bin(op, Box::new(a), Box::new(b))),
                (inner.clone(), 0u32..4).prop_map(|(e, n)| Expr::Pow(Box::new(e), n)),
                (func, inner).prop_map(|(f, e)| Expr::Call(f, Box::new(e))),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_then_parse_round_trips(e in arb_expr(), seed in any::<u64>()) {
            let reparsed = parse_expr(&e.to_string()).unwrap();
            prop_assert_eq!(&reparsed, &e);
            let mut state = seed;
            for _ in 0..100 {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let x = (state >> 11) as f64 / (1u64 << 53) as f64 * 4.0 - 2.0;
                let (a, b) = (e.eval(x), reparsed.eval(x));
                prop_assert!(a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan()));
            }
        }
    }
}
