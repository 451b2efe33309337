use std::collections::BTreeSet;

use thiserror::Error;

use crate::ast::{Fix, Formula, Labels};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at {line}:{col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    OrOr,
    AndAnd,
    Bang,
    LBrack,
    RBrack,
    Lt,
    Gt,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Dot,
    Comma,
    Star,
    Minus,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::OrOr => "`||`".into(),
            Tok::AndAnd => "`&&`".into(),
            Tok::Bang => "`!`".into(),
            Tok::LBrack => "`[`".into(),
            Tok::RBrack => "`]`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Gt => "`>`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Star => "`*`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

const KEYWORDS: [&str; 6] = ["mu", "nu", "forall", "exists", "tt", "ff"];

pub fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

pub fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\'' || c == '#'
}

fn lex(text: &str) -> Result<Vec<(Tok, usize, usize)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let two = |a: char, b: char| c == a && chars.get(i + 1) == Some(&b);
        let (tok, len) = if two('|', '|') {
            (Tok::OrOr, 2)
        } else if two('&', '&') {
            (Tok::AndAnd, 2)
        } else if is_ident_start(c) {
            let mut j = i;
            while j < chars.len() && is_ident_char(chars[j]) {
                j += 1;
            }
            (Tok::Ident(chars[i..j].iter().collect()), j - i)
        } else {
            let t = match c {
                '!' => Tok::Bang,
                '[' => Tok::LBrack,
                ']' => Tok::RBrack,
                '<' => Tok::Lt,
                '>' => Tok::Gt,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                '.' => Tok::Dot,
                ',' => Tok::Comma,
                '*' => Tok::Star,
                '-' => Tok::Minus,
                _ => {
                    return Err(ParseError {
                        line: l0,
                        col: c0,
                        msg: format!("unknown token `{c}`"),
                    })
                }
            };
            (t, 1)
        };
        out.push((tok, l0, c0));
        i += len;
        col += len;
    }
    out.push((Tok::Eof, line, col));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        let (_, line, col) = self.toks[self.pos];
        ParseError { line, col, msg: msg.into() }
    }

    fn expect(&mut self, t: Tok, ctx: &str) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(self.err(format!(
                "expected {} {ctx}, found {}",
                t.describe(),
                self.peek().describe()
            )))
        }
    }

    fn ident(&mut self, ctx: &str) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            t => Err(self.err(format!("expected identifier {ctx}, found {}", t.describe()))),
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conj()?;
        while *self.peek() == Tok::OrOr {
            self.bump();
            let rhs = self.conj()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::AndAnd {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn labels(&mut self, close: Tok) -> Result<Labels, ParseError> {
        if *self.peek() == close {
            self.bump();
            return Ok(Labels::Set(BTreeSet::new()));
        }
        let labels = match self.peek() {
            Tok::Star => {
                self.bump();
                Labels::All
            }
            Tok::Minus => {
                self.bump();
                Labels::Except(self.label_list()?)
            }
            _ => Labels::Set(self.label_list()?),
        };
        self.expect(close, "to close the label set")?;
        Ok(labels)
    }

    fn label_list(&mut self) -> Result<BTreeSet<String>, ParseError> {
        let mut set = BTreeSet::new();
        set.insert(self.ident("in label set")?);
        while *self.peek() == Tok::Comma {
            self.bump();
            set.insert(self.ident("in label set")?);
        }
        Ok(set)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::LBrack => {
                self.bump();
                let k = self.labels(Tok::RBrack)?;
                Ok(Formula::boxed(k, self.unary()?))
            }
            Tok::Lt => {
                self.bump();
                let k = self.labels(Tok::Gt)?;
                Ok(Formula::dia(k, self.unary()?))
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, "to close parenthesis")?;
                Ok(f)
            }
            Tok::Ident(s) => match s.as_str() {
                "mu" | "nu" => {
                    self.bump();
                    let z = self.ident("after fixpoint keyword")?;
                    self.expect(Tok::Dot, "after bound variable")?;
                    let body = self.formula()?;
                    let sigma = if s == "mu" { Fix::Mu } else { Fix::Nu };
                    Ok(Formula::fix(sigma, z, body))
                }
                "forall" | "exists" => {
                    self.bump();
                    self.expect(Tok::LBrace, &format!("after `{s}`"))?;
                    let a = self.formula()?;
                    self.expect(Tok::RBrace, "to close the timed side formula")?;
                    self.expect(Tok::LParen, "before the timed main formula")?;
                    let b = self.formula()?;
                    self.expect(Tok::RParen, "to close the timed main formula")?;
                    Ok(if s == "forall" {
                        Formula::forall(a, b)
                    } else {
                        Formula::exists(a, b)
                    })
                }
                "tt" => {
                    self.bump();
                    Ok(Formula::tt())
                }
                "ff" => {
                    self.bump();
                    Ok(Formula::ff())
                }
                _ => {
                    self.bump();
                    Ok(Formula::Var(s))
                }
            },
            t => Err(self.err(format!("expected a formula, found {}", t.describe()))),
        }
    }
}

/// Parses a formula; `tt` and `ff` become `nu Z#. Z#` and `mu Z#. Z#`.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0 };
    let f = p.formula()?;
    if *p.peek() != Tok::Eof {
        return Err(p.err(format!("unexpected {} after formula", p.peek().describe())));
    }
    Ok(f)
}

impl std::str::FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Formula, ParseError> {
        parse_formula(s)
    }
}
