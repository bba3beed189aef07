//! Recursive-descent parser for formulas.
//!
//! Precedence from loosest to tightest: `<->` (non-associative sugar),
//! `->` (right-associative), `|`, `&`, `~`. A quantifier body extends as
//! far right as possible.

use std::collections::HashMap;

use crate::diag::{Code, Diagnostic, LineIndex};
use crate::syntax::{Formula, Term};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Not,
    And,
    Or,
    Imp,
    Iff,
    Forall,
    Exists,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Not => "`~`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`|`".into(),
            Tok::Imp => "`->`".into(),
            Tok::Iff => "`<->`".into(),
            Tok::Forall => "`forall`".into(),
            Tok::Exists => "`exists`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum SymbolKind {
    Function,
    Predicate,
}

/// Arity of every symbol seen so far. Shared across all formulas of a script
/// so that a symbol keeps one arity throughout.
#[derive(Clone, Debug, Default)]
pub struct ArityTable {
    seen: HashMap<(SymbolKind, String), usize>,
}

pub(crate) struct Parser<'t, 'a> {
    index: &'t LineIndex<'t>,
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    scope: Vec<String>,
    arities: &'a mut ArityTable,
}

impl<'t, 'a> Parser<'t, 'a> {
    /// Parses `text[start..end]` as one complete formula.
    pub(crate) fn parse_range(
        text: &'t str,
        index: &'t LineIndex<'t>,
        start: usize,
        end: usize,
        arities: &'a mut ArityTable,
    ) -> Result<Formula, Diagnostic> {
        let toks = lex(text, index, start, end)?;
        let mut p = Parser { index, toks, pos: 0, scope: Vec::new(), arities };
        let f = p.formula()?;
        match p.peek() {
            Tok::Eof => Ok(f),
            _ => Err(p.unexpected(&["`->`", "`<->`", "`|`", "`&`", "end of formula"])),
        }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn bump(&mut self) -> (Tok, usize, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &[&str]) -> Diagnostic {
        let (tok, s, e) = &self.toks[self.pos];
        Diagnostic::error(
            Code::SyntaxError,
            self.index.span(*s, *e),
            format!("expected {}, found {}", expected.join(" or "), tok.describe()),
        )
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), Diagnostic> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&[what]))
        }
    }

    fn formula(&mut self) -> Result<Formula, Diagnostic> {
        match self.peek() {
            Tok::Forall | Tok::Exists => self.quantifier(),
            _ => self.implication(),
        }
    }

    fn implication(&mut self) -> Result<Formula, Diagnostic> {
        let lhs = self.disjunction()?;
        match self.peek() {
            Tok::Imp => {
                self.bump();
                let rhs = self.implication()?;
                Ok(Formula::imp(lhs, rhs))
            }
            Tok::Iff => {
                self.bump();
                let rhs = self.disjunction()?;
                if *self.peek() == Tok::Iff {
                    return Err(Diagnostic::error(
                        Code::SyntaxError,
                        self.span_here(),
                        "`<->` does not associate; add parentheses",
                    ));
                }
                Ok(Formula::iff(lhs, rhs))
            }
            _ => Ok(lhs),
        }
    }

    fn disjunction(&mut self) -> Result<Formula, Diagnostic> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.conjunction()?;
            lhs = Formula::dis(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, Diagnostic> {
        let mut lhs = self.negation()?;
        while *self.peek() == Tok::And {
            self.bump();
            let rhs = self.negation()?;
            lhs = Formula::con(lhs, rhs);
        }
        Ok(lhs)
    }

    fn negation(&mut self) -> Result<Formula, Diagnostic> {
        if *self.peek() == Tok::Not {
            self.bump();
            return Ok(Formula::neg(self.negation()?));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Formula, Diagnostic> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::Forall | Tok::Exists => self.quantifier(),
            Tok::Ident(name) => {
                let (_, s, e) = self.bump();
                let args = self.arguments()?;
                self.record(SymbolKind::Predicate, &name, args.len(), s, e)?;
                Ok(Formula::Pred(name, args))
            }
            _ => Err(self.unexpected(&["a formula"])),
        }
    }

    fn quantifier(&mut self) -> Result<Formula, Diagnostic> {
        let (q, ..) = self.bump();
        let name = match self.peek().clone() {
            Tok::Ident(n) => {
                self.bump();
                n
            }
            _ => return Err(self.unexpected(&["a variable name"])),
        };
        self.expect(Tok::Dot, "`.`")?;
        self.scope.push(name.clone());
        let body = self.formula();
        self.scope.pop();
        let body = Box::new(body?);
        Ok(match q {
            Tok::Forall => Formula::Uni(Some(name), body),
            _ => Formula::Exi(Some(name), body),
        })
    }

    fn arguments(&mut self) -> Result<Vec<Term>, Diagnostic> {
        if *self.peek() != Tok::LParen {
            return Ok(Vec::new());
        }
        self.bump();
        let mut args = vec![self.term()?];
        loop {
            match self.peek() {
                Tok::Comma => {
                    self.bump();
                    args.push(self.term()?);
                }
                Tok::RParen => {
                    self.bump();
                    return Ok(args);
                }
                _ => return Err(self.unexpected(&["`,`", "`)`"])),
            }
        }
    }

    fn term(&mut self) -> Result<Term, Diagnostic> {
        let Tok::Ident(name) = self.peek().clone() else {
            return Err(self.unexpected(&["a term"]));
        };
        let (_, s, e) = self.bump();
        if *self.peek() != Tok::LParen {
            if let Some(pos) = self.scope.iter().rposition(|n| *n == name) {
                return Ok(Term::Var(self.scope.len() - 1 - pos));
            }
        }
        let args = self.arguments()?;
        self.record(SymbolKind::Function, &name, args.len(), s, e)?;
        Ok(Term::App(name, args))
    }

    fn record(&mut self, kind: SymbolKind, name: &str, arity: usize, s: usize, e: usize) -> Result<(), Diagnostic> {
        let prior = *self.arities.seen.entry((kind, name.to_string())).or_insert(arity);
        if prior == arity {
            return Ok(());
        }
        let what = match kind {
            SymbolKind::Function => "function",
            SymbolKind::Predicate => "predicate",
        };
        Err(Diagnostic::error(
            Code::ArityMismatch,
            self.index.span(s, e),
            format!(
                "{what} `{name}` was first used with {prior} argument{}, here with {arity}",
                if prior == 1 { "" } else { "s" }
            ),
        ))
    }

    fn span_here(&self) -> crate::diag::Span {
        let (_, s, e) = &self.toks[self.pos];
        self.index.span(*s, *e)
    }

}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic()
}

fn is_ident_continue(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

fn lex(text: &str, index: &LineIndex<'_>, start: usize, end: usize) -> Result<Vec<(Tok, usize, usize)>, Diagnostic> {
    let src = &text[start..end];
    let mut toks = Vec::new();
    let mut it = src.char_indices().peekable();
    while let Some((i, c)) = it.next() {
        let at = start + i;
        let single = |tok: Tok| (tok, at, at + c.len_utf8());
        match c {
            c if c.is_whitespace() => {}
            '#' => {
                while let Some(&(_, c)) = it.peek() {
                    if c == '\n' {
                        break;
                    }
                    it.next();
                }
            }
            '(' => toks.push(single(Tok::LParen)),
            ')' => toks.push(single(Tok::RParen)),
            ',' => toks.push(single(Tok::Comma)),
            '.' => toks.push(single(Tok::Dot)),
            '~' | '¬' => toks.push(single(Tok::Not)),
            '&' | '∧' => toks.push(single(Tok::And)),
            '|' | '∨' => toks.push(single(Tok::Or)),
            '→' => toks.push(single(Tok::Imp)),
            '↔' => toks.push(single(Tok::Iff)),
            '∀' => toks.push(single(Tok::Forall)),
            '∃' => toks.push(single(Tok::Exists)),
            '-' if src[i..].starts_with("->") => {
                it.next();
                toks.push((Tok::Imp, at, at + 2));
            }
            '<' if src[i..].starts_with("<->") => {
                it.next();
                it.next();
                toks.push((Tok::Iff, at, at + 3));
            }
            c if is_ident_start(c) => {
                let mut j = i + c.len_utf8();
                while let Some(&(k, c)) = it.peek() {
                    if !is_ident_continue(c) {
                        break;
                    }
                    j = k + c.len_utf8();
                    it.next();
                }
                let word = &src[i..j];
                let tok = match word {
                    "forall" => Tok::Forall,
                    "exists" => Tok::Exists,
                    w => Tok::Ident(w.to_string()),
                };
                toks.push((tok, at, start + j));
            }
            c => {
                return Err(Diagnostic::error(
                    Code::SyntaxError,
                    index.span(at, at + c.len_utf8()),
                    format!("unexpected character `{c}`"),
                ))
            }
        }
    }
    toks.push((Tok::Eof, end, end));
    Ok(toks)
}
