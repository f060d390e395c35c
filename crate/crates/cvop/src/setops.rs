//! A small expression language over serialized upper sets.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! expr    := isect (('+' | '⊕') isect)*
//! isect   := scaled (('&' | '∩') scaled)*
//! scaled  := NUMBER ('*' | '⊙') scaled | primary
//! primary := IDENT | 'selfbounded' '(' expr ')' | '(' expr ')'
//! ```
//!
//! Identifiers are bound to upper sets by the caller. `selfbounded`
//! produces a boolean; using a boolean as a set operand is an error.

use std::collections::BTreeMap;

use crate::error::CvopError;
use crate::upper_set::UpperSet;
use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub enum SetExpr {
    Ident(String),
    Scale(f64, Box<SetExpr>),
    Oplus(Box<SetExpr>, Box<SetExpr>),
    Intersect(Box<SetExpr>, Box<SetExpr>),
    SelfBounded(Box<SetExpr>),
}

#[derive(Debug, Clone)]
pub enum SetopsValue {
    Set(UpperSet),
    Bool(bool),
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Ident(String),
    Number(f64),
    Plus,
    Star,
    Amp,
    LParen,
    RParen,
}

fn err(msg: impl Into<String>) -> CvopError {
    CvopError::Expression(msg.into())
}

fn tokenize(input: &str) -> Result<Vec<Token>> {
    let mut tokens = Vec::new();
    let chars: Vec<char> = input.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        match ch {
            c if c.is_whitespace() => i += 1,
            '+' | '\u{2295}' => {
                tokens.push(Token::Plus);
                i += 1;
            }
            '*' | '\u{2299}' => {
                tokens.push(Token::Star);
                i += 1;
            }
            '&' | '\u{2229}' => {
                tokens.push(Token::Amp);
                i += 1;
            }
            '(' => {
                tokens.push(Token::LParen);
                i += 1;
            }
            ')' => {
                tokens.push(Token::RParen);
                i += 1;
            }
            c if c.is_ascii_digit() || c == '.' || c == '-' => {
                let start = i;
                i += 1;
                while i < chars.len() {
                    let d = chars[i];
                    let in_number = d.is_ascii_digit()
                        || d == '.'
                        || d == 'e'
                        || d == 'E'
                        || ((d == '+' || d == '-')
                            && matches!(chars[i - 1], 'e' | 'E'));
                    if !in_number {
                        break;
                    }
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                let value: f64 = text
                    .parse()
                    .map_err(|_| err(format!("bad number literal '{text}'")))?;
                tokens.push(Token::Number(value));
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_alphanumeric() || chars[i] == '_')
                {
                    i += 1;
                }
                tokens.push(Token::Ident(chars[start..i].iter().collect()));
            }
            other => return Err(err(format!("unexpected character '{other}'"))),
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Token, what: &str) -> Result<()> {
        match self.next() {
            Some(t) if t == want => Ok(()),
            Some(t) => Err(err(format!("expected {what}, found {t:?}"))),
            None => Err(err(format!("expected {what}, found end of input"))),
        }
    }

    fn expr(&mut self) -> Result<SetExpr> {
        let mut lhs = self.isect()?;
        while self.peek() == Some(&Token::Plus) {
            self.next();
            let rhs = self.isect()?;
            lhs = SetExpr::Oplus(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn isect(&mut self) -> Result<SetExpr> {
        let mut lhs = self.scaled()?;
        while self.peek() == Some(&Token::Amp) {
            self.next();
            let rhs = self.scaled()?;
            lhs = SetExpr::Intersect(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn scaled(&mut self) -> Result<SetExpr> {
        if let Some(Token::Number(value)) = self.peek().cloned() {
            self.next();
            self.expect(Token::Star, "'*' after a scale factor")?;
            let inner = self.scaled()?;
            return Ok(SetExpr::Scale(value, Box::new(inner)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<SetExpr> {
        match self.next() {
            Some(Token::Ident(name)) if name == "selfbounded" => {
                self.expect(Token::LParen, "'(' after selfbounded")?;
                let inner = self.expr()?;
                self.expect(Token::RParen, "')'")?;
                Ok(SetExpr::SelfBounded(Box::new(inner)))
            }
            Some(Token::Ident(name)) => Ok(SetExpr::Ident(name)),
            Some(Token::LParen) => {
                let inner = self.expr()?;
                self.expect(Token::RParen, "')'")?;
                Ok(inner)
            }
            Some(t) => Err(err(format!("expected a set term, found {t:?}"))),
            None => Err(err("expected a set term, found end of input")),
        }
    }
}

pub fn parse(input: &str) -> Result<SetExpr> {
    let tokens = tokenize(input)?;
    if tokens.is_empty() {
        return Err(err("empty expression"));
    }
    let mut parser = Parser { tokens, pos: 0 };
    let expr = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        return Err(err(format!(
            "trailing tokens after expression: {:?}",
            &parser.tokens[parser.pos..]
        )));
    }
    Ok(expr)
}

fn as_set(value: SetopsValue, context: &str) -> Result<UpperSet> {
    match value {
        SetopsValue::Set(s) => Ok(s),
        SetopsValue::Bool(_) => Err(err(format!(
            "{context} needs a set operand, found a boolean"
        ))),
    }
}

pub fn eval(
    expr: &SetExpr,
    bindings: &BTreeMap<String, UpperSet>,
) -> Result<SetopsValue> {
    match expr {
        SetExpr::Ident(name) => bindings
            .get(name)
            .cloned()
            .map(SetopsValue::Set)
            .ok_or_else(|| err(format!("unbound identifier '{name}'"))),
        SetExpr::Scale(alpha, inner) => {
            let set = as_set(eval(inner, bindings)?, "scaling")?;
            Ok(SetopsValue::Set(set.odot(*alpha)?))
        }
        SetExpr::Oplus(a, b) => {
            let lhs = as_set(eval(a, bindings)?, "'+'")?;
            let rhs = as_set(eval(b, bindings)?, "'+'")?;
            Ok(SetopsValue::Set(lhs.oplus(&rhs)?))
        }
        SetExpr::Intersect(a, b) => {
            let lhs = as_set(eval(a, bindings)?, "'&'")?;
            let rhs = as_set(eval(b, bindings)?, "'&'")?;
            Ok(SetopsValue::Set(lhs.intersect(&rhs)?))
        }
        SetExpr::SelfBounded(inner) => {
            let set = as_set(eval(inner, bindings)?, "selfbounded")?;
            let (answer, _) = set.is_self_bounded()?;
            Ok(SetopsValue::Bool(answer))
        }
    }
}

/// Parses and evaluates in one step.
pub fn run(input: &str, bindings: &BTreeMap<String, UpperSet>) -> Result<SetopsValue> {
    eval(&parse(input)?, bindings)
}
