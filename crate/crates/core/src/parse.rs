//! Text syntax for clopens, tails, elements, expressions and multisections.
//!
//! ```text
//! clopen   := "{" (word ("," word)*)? "}"
//! element  := "[" branch ("," branch)* "]" | "0" | "1"
//! branch   := word "->" word (":" tailexpr)?
//! word     := digit+ | "~"
//! tailexpr := factor ("*" factor)*        factor := name ("^-1")? | "1"
//! expr     := prod ("|" prod)*            prod := post ("*" post)*
//! post     := atom ("^-1" | "@" clopen)*  atom := name | clopen | "0" | "1" | "(" expr ")"
//! msec     := "msec(" clopen ";" element ("," element)* ")"
//! ```

use crate::clopen::{Clopen, Word};
use crate::completion::Expr;
use crate::error::{Error, Result};
use crate::pmap::{Branch, PartialMap};
use crate::tail::{TailElement, TailRegistry};

struct Parser<'a> {
    s: &'a [u8],
    i: usize,
    arity: u8,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, arity: u8) -> Self {
        Parser { s: text.as_bytes(), i: 0, arity }
    }

    fn err(&self, expected: &str) -> Error {
        let before = &self.s[..self.i.min(self.s.len())];
        let line = before.iter().filter(|&&b| b == b'\n').count() + 1;
        let col = before.iter().rev().take_while(|&&b| b != b'\n').count() + 1;
        Error::Syntax { line, col, expected: expected.to_string() }
    }

    fn ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.i).copied()
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.ws();
        if self.s[self.i..].starts_with(tok.as_bytes()) {
            self.i += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.err(&format!("`{tok}`")))
        }
    }

    fn end(&mut self) -> Result<()> {
        if self.peek().is_some() {
            return Err(self.err("end of input"));
        }
        Ok(())
    }

    fn word(&mut self) -> Result<Word> {
        if self.eat("~") {
            return Ok(Word::empty());
        }
        self.ws();
        let start = self.i;
        let mut v = Vec::new();
        while let Some(&b) = self.s.get(self.i) {
            if !b.is_ascii_digit() {
                break;
            }
            if b - b'0' >= self.arity {
                return Err(Error::LetterOutOfRange { letter: b - b'0', arity: self.arity });
            }
            v.push(b - b'0');
            self.i += 1;
        }
        if self.i == start {
            return Err(self.err("word (digits or `~`)"));
        }
        Ok(Word(v))
    }

    fn name(&mut self) -> Option<String> {
        self.ws();
        let start = self.i;
        while let Some(&b) = self.s.get(self.i) {
            let ok = b.is_ascii_alphabetic() || b == b'_' || (self.i > start && (b.is_ascii_digit() || b == b'.'));
            if !ok {
                break;
            }
            self.i += 1;
        }
        (self.i > start).then(|| String::from_utf8_lossy(&self.s[start..self.i]).into_owned())
    }

    fn clopen(&mut self) -> Result<Clopen> {
        self.expect("{")?;
        let mut words = Vec::new();
        if !self.eat("}") {
            loop {
                words.push(self.word()?);
                if self.eat("}") {
                    break;
                }
                self.expect(",")?;
            }
        }
        Clopen::normalize(self.arity, words)
    }

    fn tail(&mut self, reg: &TailRegistry) -> Result<TailElement> {
        let mut t = TailElement::identity();
        loop {
            let f = if self.eat("1") {
                TailElement::identity()
            } else {
                let at = self.i;
                let name = self.name().ok_or_else(|| self.err("tail state name or `1`"))?;
                let mut f = reg.lookup(&name).map_err(|e| {
                    self.i = at;
                    e
                })?;
                if self.eat("^-1") {
                    f = f.invert();
                }
                f
            };
            t = t.compose(&f)?;
            if !self.eat("*") {
                return Ok(t);
            }
        }
    }

    fn element(&mut self, reg: &TailRegistry) -> Result<PartialMap> {
        if self.eat("0") {
            return Ok(PartialMap::zero(self.arity));
        }
        if self.eat("1") {
            return Ok(PartialMap::one(self.arity));
        }
        self.expect("[")?;
        let mut branches = Vec::new();
        loop {
            let dom = self.word()?;
            self.expect("->")?;
            let ran = self.word()?;
            let tail = if self.eat(":") { self.tail(reg)? } else { TailElement::identity() };
            branches.push(Branch::new(dom, ran, tail));
            if self.eat("]") {
                break;
            }
            self.expect(",")?;
        }
        PartialMap::new(self.arity, branches)
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut parts = vec![self.prod()?];
        while self.eat("|") {
            parts.push(self.prod()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Expr::Join(parts) })
    }

    fn prod(&mut self) -> Result<Expr> {
        let mut parts = vec![self.post()?];
        while self.eat("*") {
            parts.push(self.post()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Expr::Product(parts) })
    }

    fn post(&mut self) -> Result<Expr> {
        let mut e = self.atom()?;
        loop {
            if self.eat("^-1") {
                e = e.star();
            } else if self.eat("@") {
                e = e.restrict(self.clopen()?);
            } else {
                return Ok(e);
            }
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.i += 1;
                let e = self.expr()?;
                self.expect(")")?;
                Ok(e)
            }
            Some(b'{') => Ok(Expr::Idem(self.clopen()?)),
            Some(b'0') => {
                self.i += 1;
                Ok(Expr::Idem(Clopen::empty(self.arity)))
            }
            Some(b'1') => {
                self.i += 1;
                Ok(Expr::Idem(Clopen::full(self.arity)))
            }
            _ => self.name().map(Expr::Gen).ok_or_else(|| self.err("generator name, clopen or `(`")),
        }
    }
}

pub fn parse_word(text: &str, arity: u8) -> Result<Word> {
    let mut p = Parser::new(text, arity);
    let w = p.word()?;
    p.end()?;
    Ok(w)
}

pub fn parse_clopen(text: &str, arity: u8) -> Result<Clopen> {
    let mut p = Parser::new(text, arity);
    let c = p.clopen()?;
    p.end()?;
    Ok(c)
}

pub fn parse_tail(text: &str, reg: &TailRegistry) -> Result<TailElement> {
    let mut p = Parser::new(text, 2);
    let t = p.tail(reg)?;
    p.end()?;
    Ok(t)
}

pub fn parse_element(text: &str, arity: u8, reg: &TailRegistry) -> Result<PartialMap> {
    let mut p = Parser::new(text, arity);
    let m = p.element(reg)?;
    p.end()?;
    Ok(m)
}

pub fn parse_expr(text: &str, arity: u8) -> Result<Expr> {
    let mut p = Parser::new(text, arity);
    let e = p.expr()?;
    p.end()?;
    Ok(e)
}

/// Parses `msec(e1; f2, f3, ...)` into the base clopen and the transporters.
pub fn parse_msec(text: &str, arity: u8, reg: &TailRegistry) -> Result<(Clopen, Vec<PartialMap>)> {
    let mut p = Parser::new(text, arity);
    p.expect("msec")?;
    p.expect("(")?;
    let e1 = p.clopen()?;
    p.expect(";")?;
    let mut maps = vec![p.element(reg)?];
    while p.eat(",") {
        maps.push(p.element(reg)?);
    }
    p.expect(")")?;
    p.end()?;
    Ok((e1, maps))
}
