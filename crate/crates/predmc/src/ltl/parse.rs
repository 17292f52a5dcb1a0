//! Recursive-descent parser for the formula text syntax.
//!
//! Precedence, tightest first: unary `! X F G`, then `U` (right
//! associative), then `&` (left), then `|` (left). Parentheses override.

use super::LtlFormula;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("{kind} at position {pos}")]
pub struct LtlParseError {
    pub pos: usize,
    pub kind: LtlParseErrorKind,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LtlParseErrorKind {
    #[error("unknown symbol {0:?}")]
    UnknownSymbol(char),
    #[error("unknown word {0:?}")]
    UnknownWord(String),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("dangling operator or missing operand")]
    MissingOperand,
    #[error("unbalanced parenthesis")]
    UnbalancedParen,
    #[error("trailing input")]
    TrailingInput,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Atom(u8),
    True,
    Not,
    And,
    Or,
    Next,
    Finally,
    Globally,
    Until,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(Token, usize)>, LtlParseError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let tok = match b {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'!' => Token::Not,
            b'&' => Token::And,
            b'|' => Token::Or,
            b'X' => Token::Next,
            b'F' => Token::Finally,
            b'G' => Token::Globally,
            b'U' => Token::Until,
            b'(' => Token::LParen,
            b')' => Token::RParen,
            b'a'..=b'z' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_lowercase() {
                    i += 1;
                }
                let word = &text[start..i];
                let tok = match word {
                    "true" => Token::True,
                    _ if word.len() == 1 && (b'p'..=b'z').contains(&bytes[start]) => {
                        Token::Atom(bytes[start] - b'p')
                    }
                    _ => {
                        return Err(LtlParseError {
                            pos: start,
                            kind: LtlParseErrorKind::UnknownWord(word.to_string()),
                        })
                    }
                };
                tokens.push((tok, start));
                continue;
            }
            _ => {
                return Err(LtlParseError {
                    pos: i,
                    kind: LtlParseErrorKind::UnknownSymbol(b as char),
                })
            }
        };
        tokens.push((tok, i));
        i += 1;
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn here(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|&(_, p)| p)
            .unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|(t, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, kind: LtlParseErrorKind) -> LtlParseError {
        LtlParseError {
            pos: self.here(),
            kind,
        }
    }

    fn parse_or(&mut self) -> Result<LtlFormula, LtlParseError> {
        let mut left = self.parse_and()?;
        while self.peek() == Some(&Token::Or) {
            self.bump();
            let right = self.parse_and()?;
            left = LtlFormula::or(left, right);
        }
        Ok(left)
    }

    fn parse_and(&mut self) -> Result<LtlFormula, LtlParseError> {
        let mut left = self.parse_until()?;
        while self.peek() == Some(&Token::And) {
            self.bump();
            let right = self.parse_until()?;
            left = LtlFormula::and(left, right);
        }
        Ok(left)
    }

    fn parse_until(&mut self) -> Result<LtlFormula, LtlParseError> {
        let left = self.parse_unary()?;
        if self.peek() == Some(&Token::Until) {
            self.bump();
            // right associative
            let right = self.parse_until()?;
            return Ok(LtlFormula::until(left, right));
        }
        Ok(left)
    }

    fn parse_unary(&mut self) -> Result<LtlFormula, LtlParseError> {
        match self.peek() {
            Some(Token::Not) => {
                self.bump();
                Ok(LtlFormula::not(self.parse_unary()?))
            }
            Some(Token::Next) => {
                self.bump();
                Ok(LtlFormula::next(self.parse_unary()?))
            }
            Some(Token::Finally) => {
                self.bump();
                Ok(LtlFormula::finally(self.parse_unary()?))
            }
            Some(Token::Globally) => {
                self.bump();
                Ok(LtlFormula::globally(self.parse_unary()?))
            }
            _ => self.parse_primary(),
        }
    }

    fn parse_primary(&mut self) -> Result<LtlFormula, LtlParseError> {
        match self.bump() {
            Some(Token::Atom(i)) => Ok(LtlFormula::Atom(i)),
            Some(Token::True) => Ok(LtlFormula::True),
            Some(Token::LParen) => {
                let inner = self.parse_or()?;
                match self.peek() {
                    Some(Token::RParen) => {
                        self.bump();
                        Ok(inner)
                    }
                    _ => Err(self.err(LtlParseErrorKind::UnbalancedParen)),
                }
            }
            None => Err(self.err(LtlParseErrorKind::UnexpectedEnd)),
            _ => {
                self.pos -= 1;
                Err(self.err(LtlParseErrorKind::MissingOperand))
            }
        }
    }
}

/// Parse a formula from its text syntax.
pub fn parse_ltl(text: &str) -> Result<LtlFormula, LtlParseError> {
    let tokens = lex(text)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        end: text.len(),
    };
    let formula = parser.parse_or()?;
    if parser.pos < parser.tokens.len() {
        return Err(parser.err(LtlParseErrorKind::TrailingInput));
    }
    Ok(formula)
}
