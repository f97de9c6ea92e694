//! Tokeniser and token cursor shared by the `.epi`, `.tenv` and `.wc` parsers.

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    /// Decimal digits, unconverted so that range errors get a position.
    Int(String),
    Punct(&'static str),
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(s) => format!("integer `{s}`"),
            Tok::Punct(p) => format!("`{p}`"),
            Tok::Eof => "end of input".to_string(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

const PUNCTS: [&str; 20] = [
    ":=", "::", "*", "!", "?", "(", ")", ".", ",", "|", "+", "-", "[", "]", ":", "=", "<", "{", "}", ";",
];

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_' || c == '$'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '$'
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut column) = (0, 1, 1);
    let advance = |i: &mut usize, line: &mut usize, column: &mut usize, n: usize| {
        for k in 0..n {
            if chars[*i + k] == '\n' {
                *line += 1;
                *column = 1;
            } else {
                *column += 1;
            }
        }
        *i += n;
    };
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut column, 1);
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, &mut line, &mut column, 1);
            }
            continue;
        }
        let (start_line, start_column) = (line, column);
        let tok = if is_ident_start(c) {
            let len = chars[i..].iter().take_while(|c| is_ident_continue(**c)).count();
            Tok::Ident(chars[i..i + len].iter().collect())
        } else if c.is_ascii_digit() {
            let len = chars[i..].iter().take_while(|c| c.is_ascii_digit()).count();
            Tok::Int(chars[i..i + len].iter().collect())
        } else {
            let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
            match PUNCTS.iter().find(|p| rest.starts_with(**p)) {
                Some(p) => Tok::Punct(p),
                None => {
                    return Err(ParseError {
                        line,
                        column,
                        message: format!("unexpected character `{c}`"),
                    })
                }
            }
        };
        let len = match &tok {
            Tok::Ident(s) | Tok::Int(s) => s.chars().count(),
            Tok::Punct(p) => p.len(),
            Tok::Eof => 0,
        };
        advance(&mut i, &mut line, &mut column, len);
        out.push(Token {
            tok,
            line: start_line,
            column: start_column,
        });
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

/// A cursor over a token stream with the usual expect/peek helpers.
pub struct Cursor {
    tokens: Vec<Token>,
    pos: usize,
    keywords: &'static [&'static str],
}

impl Cursor {
    pub fn new(src: &str, keywords: &'static [&'static str]) -> Result<Self, ParseError> {
        Ok(Cursor {
            tokens: tokenize(src)?,
            pos: 0,
            keywords,
        })
    }

    pub fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    pub fn peek_at(&self, offset: usize) -> &Tok {
        let i = (self.pos + offset).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    pub fn bump(&mut self) -> Tok {
        let t = self.tokens[self.pos].tok.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    /// Line and column of the next token.
    pub fn position(&self) -> (usize, usize) {
        let t = &self.tokens[self.pos];
        (t.line, t.column)
    }

    pub fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        let t = &self.tokens[self.pos];
        Err(ParseError {
            line: t.line,
            column: t.column,
            message: message.into(),
        })
    }

    pub fn unexpected<T>(&self, wanted: &str) -> Result<T, ParseError> {
        self.error(format!("expected {wanted}, found {}", self.peek().describe()))
    }

    pub fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    pub fn is_keyword(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == k)
    }

    pub fn eat_punct(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn eat_keyword(&mut self, k: &str) -> bool {
        if self.is_keyword(k) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn expect_punct(&mut self, p: &str) -> Result<(), ParseError> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            self.unexpected(&format!("`{p}`"))
        }
    }

    pub fn expect_keyword(&mut self, k: &str) -> Result<(), ParseError> {
        if self.eat_keyword(k) {
            Ok(())
        } else {
            self.unexpected(&format!("`{k}`"))
        }
    }

    pub fn is_ident(&self) -> bool {
        matches!(self.peek(), Tok::Ident(s) if !self.keywords.contains(&s.as_str()))
    }

    /// A non-keyword identifier.
    pub fn expect_ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if !self.keywords.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            _ => self.unexpected(what),
        }
    }

    pub fn expect_eof(&self) -> Result<(), ParseError> {
        if matches!(self.peek(), Tok::Eof) {
            Ok(())
        } else {
            self.unexpected("end of input")
        }
    }

    /// Parses an integer literal, with an optional leading minus sign.
    pub fn expect_int(&mut self) -> Result<i64, ParseError> {
        let negative = self.eat_punct("-");
        match self.peek().clone() {
            Tok::Int(digits) => {
                let magnitude: i128 = digits.parse().unwrap_or(i128::MAX);
                let value = if negative { -magnitude } else { magnitude };
                match i64::try_from(value) {
                    Ok(v) => {
                        self.bump();
                        Ok(v)
                    }
                    Err(_) => self.error(format!("integer literal {digits} out of range")),
                }
            }
            _ => self.unexpected("an integer literal"),
        }
    }
}
