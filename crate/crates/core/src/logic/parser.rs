//! Recursive-descent reader for atoms, clauses and programs.
//!
//! Syntax: `pred(arg,...)` with nested compounds, unquoted integers,
//! lowercase-initial identifiers and uppercase-initial (or `_`) variables.
//! Clauses are `head :- lit, not lit.` and `%` starts a line comment.

use super::term::{sym, Clause, Literal, Term};
use crate::error::ParseError;

pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(text);
    let t = p.term()?;
    p.expect_end()?;
    Ok(t)
}

pub fn parse_atom(text: &str) -> Result<Literal, ParseError> {
    let mut p = Parser::new(text);
    let lit = p.literal(false)?;
    p.skip_ws();
    p.eat('.');
    p.expect_end()?;
    Ok(lit)
}

pub fn parse_clause(text: &str) -> Result<Clause, ParseError> {
    let mut p = Parser::new(text);
    let c = p.clause()?;
    p.expect_end()?;
    Ok(c)
}

/// Parses a sequence of `.`-terminated clauses.
pub fn parse_program(text: &str) -> Result<Vec<Clause>, ParseError> {
    let mut p = Parser::new(text);
    let mut out = Vec::new();
    loop {
        p.skip_ws();
        if p.at_end() {
            return Ok(out);
        }
        out.push(p.clause()?);
    }
}

pub(crate) struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    pub(crate) fn new(src: &'a str) -> Self {
        Parser { src, pos: 0 }
    }

    pub(crate) fn error(&self, msg: impl Into<String>) -> ParseError {
        let before = &self.src[..self.pos];
        let line = before.matches('\n').count() + 1;
        let column = before.rfind('\n').map_or(self.pos, |i| self.pos - i - 1) + 1;
        ParseError { line, column, message: msg.into() }
    }

    pub(crate) fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    pub(crate) fn remaining(&self) -> &'a str {
        &self.src[self.pos..]
    }

    pub(crate) fn advance(&mut self, bytes: usize) {
        self.pos += bytes;
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    pub(crate) fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.src.len()
    }

    pub(crate) fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '%' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    pub(crate) fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(match self.peek() {
                Some(found) => self.error(format!("expected '{c}', found '{found}'")),
                None => self.error(format!("expected '{c}', found end of input")),
            })
        }
    }

    pub(crate) fn expect_end(&mut self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error("unexpected trailing input"))
        }
    }

    pub(crate) fn name(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || c == '_' {
                self.bump();
            } else {
                break;
            }
        }
        (self.pos > start).then(|| &self.src[start..self.pos])
    }

    pub(crate) fn identifier(&mut self) -> Result<&'a str, ParseError> {
        self.skip_ws();
        match self.peek() {
            Some(c) if c.is_lowercase() => Ok(self.name().unwrap()),
            Some(c) => Err(self.error(format!("expected identifier, found '{c}'"))),
            None => Err(self.error("expected identifier, found end of input")),
        }
    }

    fn integer(&mut self) -> Result<i64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        if self.peek() == Some('-') {
            self.bump();
        }
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.bump();
        }
        self.src[start..self.pos].parse().map_err(|_| {
            self.pos = start;
            self.error("malformed integer")
        })
    }

    pub(crate) fn term(&mut self) -> Result<Term, ParseError> {
        self.skip_ws();
        match self.peek() {
            Some(c) if c.is_ascii_digit() || c == '-' => Ok(Term::Int(self.integer()?)),
            Some(c) if c.is_uppercase() || c == '_' => Ok(Term::Var(sym(self.name().unwrap()))),
            Some(c) if c.is_lowercase() => {
                let name = self.name().unwrap();
                self.skip_ws();
                if self.peek() == Some('(') {
                    Ok(Term::Compound(sym(name), self.args()?))
                } else {
                    Ok(Term::Const(sym(name)))
                }
            }
            Some(c) => Err(self.error(format!("unexpected '{c}'"))),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn args(&mut self) -> Result<Vec<Term>, ParseError> {
        self.expect('(')?;
        let mut args = vec![self.term()?];
        while self.eat(',') {
            args.push(self.term()?);
        }
        self.expect(')')?;
        Ok(args)
    }

    pub(crate) fn literal(&mut self, allow_not: bool) -> Result<Literal, ParseError> {
        self.skip_ws();
        let save = self.pos;
        let pred = self.identifier()?;
        if allow_not && pred == "not" {
            self.skip_ws();
            if matches!(self.peek(), Some(c) if c.is_lowercase()) {
                return Ok(self.literal(false)?.negate());
            }
            self.pos = save;
            self.identifier()?;
        }
        self.skip_ws();
        let args = if self.peek() == Some('(') { self.args()? } else { Vec::new() };
        Ok(Literal { pred: sym(pred), args, negated: false })
    }

    fn clause(&mut self) -> Result<Clause, ParseError> {
        let head = self.literal(false)?;
        let mut body = Vec::new();
        self.skip_ws();
        if self.src[self.pos..].starts_with(":-") {
            self.pos += 2;
            body.push(self.literal(true)?);
            while self.eat(',') {
                body.push(self.literal(true)?);
            }
        }
        self.expect('.')?;
        Ok(Clause { head, body })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn happens_at_walking() {
        let lit = parse_atom("happensAt(walking(id1),1)").unwrap();
        assert_eq!(&*lit.pred, "happensAt");
        assert_eq!(lit.args, vec![Term::compound("walking", vec![Term::constant("id1")]), Term::Int(1)]);
    }

    #[test]
    fn holds_at_moving() {
        let lit = parse_atom("holdsAt(moving(id1,id2),2)").unwrap();
        assert_eq!(&*lit.pred, "holdsAt");
        assert_eq!(
            lit.args,
            vec![Term::compound("moving", vec![Term::constant("id1"), Term::constant("id2")]), Term::Int(2)]
        );
    }

    #[test]
    fn unterminated_atom_is_error() {
        let err = parse_atom("foo(").unwrap_err();
        assert_eq!(err.line, 1);
        assert_eq!(err.column, 5);
    }

    #[test]
    fn error_position_on_later_line() {
        let err = parse_program("p(a).\nq(b) :- r(,).\n").unwrap_err();
        assert_eq!((err.line, err.column), (2, 11));
    }

    #[test]
    fn clause_with_negation_and_comments() {
        let prog = parse_program(
            "% header\np(X) :- q(X), not r(X). % trailing\n\ns(-3).\n",
        )
        .unwrap();
        assert_eq!(prog.len(), 2);
        assert!(prog[0].body[1].negated);
        assert_eq!(prog[1].head.args[0], Term::Int(-3));
        assert_eq!(prog[0].to_string(), "p(X) :- q(X), not r(X).");
    }

    #[test]
    fn predicate_named_like_not_prefix() {
        let c = parse_clause("p :- nothing(a).").unwrap();
        assert_eq!(&*c.body[0].pred, "nothing");
        assert!(!c.body[0].negated);
    }
}
