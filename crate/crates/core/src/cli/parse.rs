//! Parser for the `.pipta` model format.
//!
//! ```text
//! pipta NAME
//! clocks x, y;
//! params p;
//! actions a, b;
//! init l0;
//! loc l0 {
//!   when y < 2 && x >= p sync a goto { [0, 1] reset {y} -> l1; [0, 0.5] -> l2 }
//!   sync b goto l0
//! }
//! loc l1;
//! ```
//!
//! `x = c` abbreviates `x >= c && x <= c`. A bare number is a point interval
//! and a lone `goto TARGET` has probability one. A location may appear in
//! several `loc` blocks; its edges are appended in order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::model::{ActionId, AtomicGuard, Bound, ClockId, DistEntry, Edge, Guard, Interval, IntervalDistribution, LocId, Pipta, Rel};
use crate::rational::{self, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("{pos}: {message}")]
pub struct ParseError {
    pub pos: Pos,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Number(String),
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Number(s) => write!(f, "number `{s}`"),
            Tok::Sym(s) => write!(f, "`{s}`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

const SYMBOLS: [&str; 14] = ["->", "&&", "<=", ">=", "{", "}", "[", "]", ",", ";", "<", ">", "=", "/"];
const KEYWORDS: [&str; 11] = ["pipta", "clocks", "params", "actions", "init", "loc", "when", "sync", "goto", "reset", "true"];

fn lex(src: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
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
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            out.push((Tok::Ident(s), pos));
            continue;
        }
        if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            out.push((Tok::Number(s), pos));
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
        match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
            Some(s) => {
                i += s.len();
                col += s.len();
                out.push((Tok::Sym(s), pos));
            }
            None => return Err(ParseError { pos, message: format!("unexpected character `{c}`") }),
        }
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

struct RawAtom {
    clock: (String, Pos),
    rel: &'static str,
    bound: RawBound,
}

enum RawBound {
    Num(Rational),
    Name(String, Pos),
}

struct RawBranch {
    interval: Option<Interval>,
    resets: Vec<(String, Pos)>,
    target: (String, Pos),
    pos: Pos,
}

struct RawEdge {
    source: String,
    guard: Vec<RawAtom>,
    action: (String, Pos),
    branches: Vec<RawBranch>,
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { pos: self.pos(), message: message.into() })
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == k)
    }

    fn expect_sym(&mut self, s: &str) -> Result<(), ParseError> {
        if self.is_sym(s) {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected `{s}`, found {}", self.peek()))
        }
    }

    fn expect_kw(&mut self, k: &str) -> Result<(), ParseError> {
        if self.is_kw(k) {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected `{k}`, found {}", self.peek()))
        }
    }

    fn ident(&mut self) -> Result<(String, Pos), ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if KEYWORDS.contains(&s.as_str()) => self.err(format!("expected a name, found keyword `{s}`")),
            Tok::Ident(s) => {
                let p = self.pos();
                self.bump();
                Ok((s, p))
            }
            t => self.err(format!("expected a name, found {t}")),
        }
    }

    fn number(&mut self) -> Result<Rational, ParseError> {
        let (tok, pos) = self.bump();
        let Tok::Number(n) = tok else {
            return Err(ParseError { pos, message: format!("expected a number, found {tok}") });
        };
        let mut text = n;
        if self.is_sym("/") {
            self.bump();
            match self.bump() {
                (Tok::Number(d), _) => text = format!("{text}/{d}"),
                (t, p) => return Err(ParseError { pos: p, message: format!("expected a denominator, found {t}") }),
            }
        }
        rational::parse(&text).ok_or(ParseError { pos, message: format!("malformed number `{text}`") })
    }

    fn name_list(&mut self) -> Result<Vec<(String, Pos)>, ParseError> {
        let mut out = Vec::new();
        if self.is_sym(";") || self.is_sym("}") {
            return Ok(out);
        }
        out.push(self.ident()?);
        while self.is_sym(",") {
            self.bump();
            out.push(self.ident()?);
        }
        Ok(out)
    }

    fn atom(&mut self) -> Result<RawAtom, ParseError> {
        let clock = self.ident()?;
        let rel = match self.bump() {
            (Tok::Sym(s @ ("<" | "<=" | ">" | ">=" | "=")), _) => s,
            (t, p) => return Err(ParseError { pos: p, message: format!("expected a comparison, found {t}") }),
        };
        let bound = match self.peek().clone() {
            Tok::Ident(_) => {
                let (n, p) = self.ident()?;
                RawBound::Name(n, p)
            }
            Tok::Number(_) => RawBound::Num(self.number()?),
            t => return self.err(format!("expected a constant or parameter, found {t}")),
        };
        Ok(RawAtom { clock, rel, bound })
    }

    fn guard(&mut self) -> Result<Vec<RawAtom>, ParseError> {
        if self.is_kw("true") {
            self.bump();
            return Ok(Vec::new());
        }
        let mut atoms = vec![self.atom()?];
        while self.is_sym("&&") {
            self.bump();
            atoms.push(self.atom()?);
        }
        Ok(atoms)
    }

    fn branch(&mut self) -> Result<RawBranch, ParseError> {
        let pos = self.pos();
        let interval = if self.is_sym("[") {
            self.bump();
            let lo = self.number()?;
            self.expect_sym(",")?;
            let hi = self.number()?;
            self.expect_sym("]")?;
            Some(Interval::new(lo, hi))
        } else if matches!(self.peek(), Tok::Number(_)) {
            Some(Interval::point(self.number()?))
        } else {
            None
        };
        let mut resets = Vec::new();
        if self.is_kw("reset") {
            self.bump();
            self.expect_sym("{")?;
            resets = self.name_list()?;
            self.expect_sym("}")?;
        }
        self.expect_sym("->")?;
        let target = self.ident()?;
        Ok(RawBranch { interval, resets, target, pos })
    }

    fn edge(&mut self, source: &str) -> Result<RawEdge, ParseError> {
        let guard = if self.is_kw("when") {
            self.bump();
            self.guard()?
        } else {
            Vec::new()
        };
        self.expect_kw("sync")?;
        let action = self.ident()?;
        self.expect_kw("goto")?;
        let branches = if self.is_sym("{") {
            self.bump();
            let mut bs = vec![self.branch()?];
            while self.is_sym(";") {
                self.bump();
                if self.is_sym("}") {
                    break;
                }
                bs.push(self.branch()?);
            }
            self.expect_sym("}")?;
            bs
        } else {
            let pos = self.pos();
            let target = self.ident()?;
            vec![RawBranch { interval: None, resets: Vec::new(), target, pos }]
        };
        if self.is_sym(";") {
            self.bump();
        }
        Ok(RawEdge { source: source.to_string(), guard, action, branches })
    }
}

fn declare(kind: &str, list: Vec<(String, Pos)>, into: &mut Vec<String>) -> Result<(), ParseError> {
    for (n, p) in list {
        if into.contains(&n) {
            return Err(ParseError { pos: p, message: format!("{kind} `{n}` declared twice") });
        }
        into.push(n);
    }
    Ok(())
}

/// Parses a model from source text.
pub fn parse_model(src: &str) -> Result<Pipta, ParseError> {
    let mut p = Parser { toks: lex(src)?, at: 0 };
    p.expect_kw("pipta")?;
    let (name, _) = p.ident()?;
    let (mut clocks, mut params, mut actions) = (Vec::new(), Vec::new(), Vec::new());
    let mut init: Option<(String, Pos)> = None;
    let mut locations: Vec<String> = Vec::new();
    let mut raw_edges: Vec<RawEdge> = Vec::new();
    loop {
        match p.peek().clone() {
            Tok::Eof => break,
            Tok::Ident(k) if k == "clocks" || k == "params" || k == "actions" => {
                p.bump();
                let list = p.name_list()?;
                p.expect_sym(";")?;
                let (kind, into) = match k.as_str() {
                    "clocks" => ("clock", &mut clocks),
                    "params" => ("parameter", &mut params),
                    _ => ("action", &mut actions),
                };
                declare(kind, list, into)?;
            }
            Tok::Ident(k) if k == "init" => {
                if init.is_some() {
                    return p.err("initial location given twice");
                }
                p.bump();
                init = Some(p.ident()?);
                p.expect_sym(";")?;
            }
            Tok::Ident(k) if k == "loc" => {
                p.bump();
                let (l, _) = p.ident()?;
                if !locations.contains(&l) {
                    locations.push(l.clone());
                }
                if p.is_sym(";") {
                    p.bump();
                    continue;
                }
                p.expect_sym("{")?;
                while !p.is_sym("}") {
                    if matches!(p.peek(), Tok::Eof) {
                        return p.err("unterminated location block");
                    }
                    raw_edges.push(p.edge(&l)?);
                }
                p.expect_sym("}")?;
            }
            t => return p.err(format!("expected a declaration or `loc`, found {t}")),
        }
    }
    let Some((init, init_pos)) = init else {
        return Err(ParseError { pos: Pos { line: 1, col: 1 }, message: "missing `init` declaration".into() });
    };
    let index = |names: &[String], kind: &str, (n, pos): &(String, Pos)| -> Result<usize, ParseError> {
        names
            .iter()
            .position(|x| x == n)
            .ok_or_else(|| ParseError { pos: *pos, message: format!("undeclared {kind} `{n}`") })
    };
    let initial = LocId(index(&locations, "location", &(init, init_pos))?);
    let mut edges = Vec::new();
    for e in raw_edges {
        let mut atoms = Vec::new();
        for a in e.guard {
            let clock = ClockId(index(&clocks, "clock", &a.clock)?);
            let bound = match a.bound {
                RawBound::Num(c) => Bound::Const(c),
                RawBound::Name(n, pos) => {
                    Bound::Param(crate::model::ParamId(index(&params, "parameter", &(n, pos))?))
                }
            };
            let rels: &[Rel] = match a.rel {
                "<" => &[Rel::Lt],
                "<=" => &[Rel::Le],
                ">" => &[Rel::Gt],
                ">=" => &[Rel::Ge],
                _ => &[Rel::Ge, Rel::Le],
            };
            for r in rels {
                atoms.push(AtomicGuard::new(clock, *r, bound.clone()));
            }
        }
        let action = ActionId(index(&actions, "action", &e.action)?);
        let single = e.branches.len() == 1;
        let mut entries = Vec::new();
        for b in e.branches {
            let interval = match b.interval {
                Some(iv) => iv,
                None if single => Interval::point(rational::one()),
                None => return Err(ParseError { pos: b.pos, message: "probability missing on a branch".into() }),
            };
            let mut resets = BTreeSet::new();
            for r in &b.resets {
                resets.insert(ClockId(index(&clocks, "clock", r)?));
            }
            entries.push(DistEntry { resets, target: LocId(index(&locations, "location", &b.target)?), interval });
        }
        let source = LocId(locations.iter().position(|l| *l == e.source).expect("declared by its block"));
        edges.push(Edge { source, guard: Guard::new(atoms), action, dist: IntervalDistribution::new(entries) });
    }
    Ok(Pipta { name, clocks, params, actions, locations, initial, edges })
}

/// Parses `name=value` parameter bindings against a model.
pub fn parse_bindings(m: &Pipta, bindings: &[String]) -> Result<Vec<Rational>, String> {
    let mut values: BTreeMap<usize, Rational> = BTreeMap::new();
    for b in bindings {
        let (n, v) = b.split_once('=').ok_or_else(|| format!("binding `{b}` is not of the form name=value"))?;
        let p = m.param(n.trim()).ok_or_else(|| format!("unknown parameter `{}`", n.trim()))?;
        let v = rational::parse(v).ok_or_else(|| format!("malformed value in `{b}`"))?;
        if v < rational::zero() {
            return Err(format!("parameter `{}` must be nonnegative", n.trim()));
        }
        if values.insert(p.0, v).is_some() {
            return Err(format!("parameter `{}` bound twice", n.trim()));
        }
    }
    (0..m.params.len())
        .map(|i| values.remove(&i).ok_or_else(|| format!("parameter `{}` is not bound", m.params[i])))
        .collect()
}
