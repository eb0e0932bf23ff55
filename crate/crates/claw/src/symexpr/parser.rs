use crate::error::{Error, Result};

use super::chart::Chart;
use super::expr::RationalExpr;
use super::gaussian::GaussianRational;

/// Parses the shared expression grammar over a chart and folds the tree into
/// canonical form.
///
/// Grammar: identifiers are chart coordinates; literals are unsigned
/// integers and `i`; operators `+ - * / ^` with `^` taking a nonnegative
/// integer exponent; parentheses; whitespace insignificant.
pub fn parse_expr(src: &str, chart: &Chart) -> Result<RationalExpr> {
    let tokens = tokenize(src)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        chart,
    };
    let e = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(Error::Parse(format!(
            "unexpected trailing input at `{}`",
            p.describe_current()
        )));
    }
    Ok(e)
}

#[derive(Clone, PartialEq, Debug)]
enum Token {
    Ident(String),
    Int(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let mut k = 0;
    while k < chars.len() {
        let c = chars[k];
        match c {
            ' ' | '\t' | '\n' | '\r' => k += 1,
            '+' => {
                out.push(Token::Plus);
                k += 1;
            }
            '-' => {
                out.push(Token::Minus);
                k += 1;
            }
            '*' => {
                out.push(Token::Star);
                k += 1;
            }
            '/' => {
                out.push(Token::Slash);
                k += 1;
            }
            '^' => {
                out.push(Token::Caret);
                k += 1;
            }
            '(' => {
                out.push(Token::LParen);
                k += 1;
            }
            ')' => {
                out.push(Token::RParen);
                k += 1;
            }
            c if c.is_ascii_digit() => {
                let start = k;
                while k < chars.len() && chars[k].is_ascii_digit() {
                    k += 1;
                }
                out.push(Token::Int(chars[start..k].iter().collect()));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = k;
                while k < chars.len() && (chars[k].is_ascii_alphanumeric() || chars[k] == '_') {
                    k += 1;
                }
                out.push(Token::Ident(chars[start..k].iter().collect()));
            }
            other => return Err(Error::Parse(format!("unexpected character `{}`", other))),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    chart: &'a Chart,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn describe_current(&self) -> String {
        match self.peek() {
            Some(Token::Ident(s)) => s.clone(),
            Some(Token::Int(s)) => s.clone(),
            Some(t) => format!("{:?}", t),
            None => "end of input".to_string(),
        }
    }

    fn expr(&mut self) -> Result<RationalExpr> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Some(Token::Minus) => {
                    self.bump();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RationalExpr> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.bump();
                    acc = acc.mul(&self.factor()?);
                }
                Some(Token::Slash) => {
                    self.bump();
                    acc = acc.div(&self.factor()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<RationalExpr> {
        // Unary minus binds looser than `^`: -x^2 == -(x^2).
        if matches!(self.peek(), Some(Token::Minus)) {
            self.bump();
            return Ok(self.factor()?.neg());
        }
        if matches!(self.peek(), Some(Token::Plus)) {
            self.bump();
            return self.factor();
        }
        self.power()
    }

    fn power(&mut self) -> Result<RationalExpr> {
        let base = self.atom()?;
        if matches!(self.peek(), Some(Token::Caret)) {
            self.bump();
            match self.bump() {
                Some(Token::Int(s)) => {
                    let e: u32 = s
                        .parse()
                        .map_err(|_| Error::Parse(format!("exponent `{}` too large", s)))?;
                    Ok(base.pow(e))
                }
                _ => Err(Error::Parse(
                    "`^` requires a nonnegative integer exponent; use division for negative powers"
                        .to_string(),
                )),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<RationalExpr> {
        match self.bump() {
            Some(Token::LParen) => {
                let e = self.expr()?;
                match self.bump() {
                    Some(Token::RParen) => Ok(e),
                    _ => Err(Error::Parse("missing closing parenthesis".to_string())),
                }
            }
            Some(Token::Int(s)) => {
                let n: num::BigInt = s.parse().expect("digits parse as BigInt");
                Ok(RationalExpr::constant(
                    GaussianRational::from_real(num::BigRational::from_integer(n)),
                    self.chart,
                ))
            }
            Some(Token::Ident(name)) => {
                if name == "i" {
                    Ok(RationalExpr::i(self.chart))
                } else {
                    RationalExpr::coordinate(self.chart, &name)
                }
            }
            Some(t) => Err(Error::Parse(format!("unexpected token {:?}", t))),
            None => Err(Error::Parse("unexpected end of input".to_string())),
        }
    }
}
