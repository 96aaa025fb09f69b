//! Terms of the λ-calculus with letrec: parsing, printing, α-equivalence
//! and the static analyses used by the translation.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::rc::Rc;

use thiserror::Error;

/// A λletrec term.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Abs(String, Box<Term>),
    App(Box<Term>, Box<Term>),
    Var(String),
    /// A non-empty group of mutually recursive bindings with distinct names.
    Let(Vec<Binding>, Box<Term>),
    BlackHole,
}

/// One equation `var = rhs` of a binding group.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Binding {
    pub var: String,
    pub rhs: Term,
}

impl Binding {
    pub fn new(var: impl Into<String>, rhs: Term) -> Binding {
        Binding {
            var: var.into(),
            rhs,
        }
    }
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn abs(binder: impl Into<String>, body: Term) -> Term {
        Term::Abs(binder.into(), Box::new(body))
    }

    pub fn app(fun: Term, arg: Term) -> Term {
        Term::App(Box::new(fun), Box::new(arg))
    }

    pub fn let_in(bindings: Vec<Binding>, body: Term) -> Term {
        Term::Let(bindings, Box::new(body))
    }

    /// Immediate subterms in position order: the body of an abstraction,
    /// function then argument of an application, binding right-hand sides
    /// then the body of a let.
    pub fn children(&self) -> Vec<&Term> {
        match self {
            Term::Abs(_, b) => vec![b],
            Term::App(f, a) => vec![f, a],
            Term::Let(bs, body) => bs.iter().map(|b| &b.rhs).chain([&**body]).collect(),
            Term::Var(_) | Term::BlackHole => Vec::new(),
        }
    }

    /// The subterm at `pos`, if the position is valid.
    pub fn subterm(&self, pos: &Position) -> Option<&Term> {
        let mut t = self;
        for &i in &pos.0 {
            t = *t.children().get(i)?;
        }
        Some(t)
    }
}

/// An occurrence in a term as a sequence of child indices (see
/// [`Term::children`] for the numbering).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Position(pub Vec<usize>);

impl Position {
    pub fn root() -> Position {
        Position(Vec::new())
    }

    pub fn child(&self, i: usize) -> Position {
        let mut p = self.0.clone();
        p.push(i);
        Position(p)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character '{0}'")]
    UnexpectedChar(char),
    #[error("expected {expected}, found {found}")]
    Unexpected { expected: String, found: String },
    #[error("recursion variable '{0}' bound twice in one group")]
    DuplicateRecVar(String),
    #[error("empty binding group")]
    EmptyBindingGroup,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Lambda,
    Dot,
    LParen,
    RParen,
    Let,
    In,
    Comma,
    Equals,
    BlackHole,
    Ident(String),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Lambda => write!(f, "'\\'"),
            Tok::Dot => write!(f, "'.'"),
            Tok::LParen => write!(f, "'('"),
            Tok::RParen => write!(f, "')'"),
            Tok::Let => write!(f, "'let'"),
            Tok::In => write!(f, "'in'"),
            Tok::Comma => write!(f, "','"),
            Tok::Equals => write!(f, "'='"),
            Tok::BlackHole => write!(f, "'_|_'"),
            Tok::Ident(s) => write!(f, "identifier '{s}'"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

struct Lexed {
    tok: Tok,
    line: usize,
    column: usize,
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

fn lex(src: &str) -> Result<Vec<Lexed>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut column) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (tline, tcol) = (line, column);
        let mut advance = |n: usize, i: &mut usize| {
            *i += n;
            column += n;
        };
        let tok = match c {
            '\n' => {
                i += 1;
                line += 1;
                column = 1;
                continue;
            }
            c if c.is_whitespace() => {
                advance(1, &mut i);
                continue;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            '\\' | 'λ' => {
                advance(1, &mut i);
                Tok::Lambda
            }
            '.' => {
                advance(1, &mut i);
                Tok::Dot
            }
            '(' => {
                advance(1, &mut i);
                Tok::LParen
            }
            ')' => {
                advance(1, &mut i);
                Tok::RParen
            }
            ',' => {
                advance(1, &mut i);
                Tok::Comma
            }
            '=' => {
                advance(1, &mut i);
                Tok::Equals
            }
            '_' if chars.get(i + 1) == Some(&'|') && chars.get(i + 2) == Some(&'_') => {
                advance(3, &mut i);
                Tok::BlackHole
            }
            c if is_ident_start(c) => {
                let start = i;
                while i < chars.len() && is_ident_char(chars[i]) {
                    advance(1, &mut i);
                }
                let word: String = chars[start..i].iter().collect();
                match word.as_str() {
                    "let" => Tok::Let,
                    "in" => Tok::In,
                    _ => Tok::Ident(word),
                }
            }
            c => {
                return Err(ParseError {
                    line,
                    column,
                    kind: ParseErrorKind::UnexpectedChar(c),
                })
            }
        };
        out.push(Lexed {
            tok,
            line: tline,
            column: tcol,
        });
    }
    out.push(Lexed {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Lexed>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        let t = &self.toks[self.pos];
        ParseError {
            line: t.line,
            column: t.column,
            kind,
        }
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        self.error(ParseErrorKind::Unexpected {
            expected: expected.to_string(),
            found: self.peek().to_string(),
        })
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected(&tok.to_string()))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        if let Tok::Ident(s) = self.peek() {
            let s = s.clone();
            self.pos += 1;
            Ok(s)
        } else {
            Err(self.unexpected("identifier"))
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        if *self.peek() == Tok::Lambda {
            self.pos += 1;
            let x = self.ident()?;
            self.expect(Tok::Dot)?;
            let body = self.term()?;
            return Ok(Term::abs(x, body));
        }
        let mut t = self.atom()?;
        while matches!(
            self.peek(),
            Tok::Ident(_) | Tok::LParen | Tok::Let | Tok::BlackHole
        ) {
            let a = self.atom()?;
            t = Term::app(t, a);
        }
        Ok(t)
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.pos += 1;
                Ok(Term::Var(s))
            }
            Tok::BlackHole => {
                self.pos += 1;
                Ok(Term::BlackHole)
            }
            Tok::LParen => {
                self.pos += 1;
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::Let => {
                self.pos += 1;
                if *self.peek() == Tok::In {
                    return Err(self.error(ParseErrorKind::EmptyBindingGroup));
                }
                let mut bindings: Vec<Binding> = Vec::new();
                loop {
                    let at = self.pos;
                    let f = self.ident()?;
                    if bindings.iter().any(|b| b.var == f) {
                        self.pos = at;
                        return Err(self.error(ParseErrorKind::DuplicateRecVar(f)));
                    }
                    self.expect(Tok::Equals)?;
                    let rhs = self.term()?;
                    bindings.push(Binding::new(f, rhs));
                    if *self.peek() == Tok::Comma {
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                self.expect(Tok::In)?;
                let body = self.term()?;
                Ok(Term::let_in(bindings, body))
            }
            _ => Err(self.unexpected("a term")),
        }
    }
}

/// Parses one term; `#` starts a comment running to the end of the line.
pub fn parse(source: &str) -> Result<Term, ParseError> {
    let mut p = Parser {
        toks: lex(source)?,
        pos: 0,
    };
    let t = p.term()?;
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected("end of input"));
    }
    Ok(t)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Ctx {
    Open,
    Fun,
    Arg,
}

fn write_term(t: &Term, ctx: Ctx, out: &mut String) {
    match t {
        Term::Var(x) => out.push_str(x),
        Term::BlackHole => out.push_str("_|_"),
        Term::App(f, a) => {
            let paren = ctx == Ctx::Arg;
            if paren {
                out.push('(');
            }
            write_term(f, Ctx::Fun, out);
            out.push(' ');
            write_term(a, Ctx::Arg, out);
            if paren {
                out.push(')');
            }
        }
        Term::Abs(..) | Term::Let(..) => {
            let paren = ctx != Ctx::Open;
            if paren {
                out.push('(');
            }
            match t {
                Term::Abs(x, body) => {
                    out.push('\\');
                    out.push_str(x);
                    out.push_str(". ");
                    write_term(body, Ctx::Open, out);
                }
                Term::Let(bs, body) => {
                    out.push_str("let ");
                    for (i, b) in bs.iter().enumerate() {
                        if i > 0 {
                            out.push_str(", ");
                        }
                        out.push_str(&b.var);
                        out.push_str(" = ");
                        write_term(&b.rhs, Ctx::Open, out);
                    }
                    out.push_str(" in ");
                    write_term(body, Ctx::Open, out);
                }
                _ => unreachable!(),
            }
            if paren {
                out.push(')');
            }
        }
    }
}

/// Renders a term in the concrete syntax accepted by [`parse`].
pub fn print(t: &Term) -> String {
    let mut out = String::new();
    write_term(t, Ctx::Open, &mut out);
    out
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print(self))
    }
}

/// α-equivalence; binding groups are compared position by position.
pub fn alpha_eq(a: &Term, b: &Term) -> bool {
    fn lookup(env: &[String], x: &str) -> Option<usize> {
        env.iter().rposition(|y| y == x)
    }
    fn go(a: &Term, b: &Term, ea: &mut Vec<String>, eb: &mut Vec<String>) -> bool {
        match (a, b) {
            (Term::Var(x), Term::Var(y)) => match (lookup(ea, x), lookup(eb, y)) {
                (Some(i), Some(j)) => i == j,
                (None, None) => x == y,
                _ => false,
            },
            (Term::BlackHole, Term::BlackHole) => true,
            (Term::App(f1, a1), Term::App(f2, a2)) => go(f1, f2, ea, eb) && go(a1, a2, ea, eb),
            (Term::Abs(x, b1), Term::Abs(y, b2)) => {
                ea.push(x.clone());
                eb.push(y.clone());
                let r = go(b1, b2, ea, eb);
                ea.pop();
                eb.pop();
                r
            }
            (Term::Let(bs1, b1), Term::Let(bs2, b2)) => {
                if bs1.len() != bs2.len() {
                    return false;
                }
                let (na, nb) = (ea.len(), eb.len());
                ea.extend(bs1.iter().map(|b| b.var.clone()));
                eb.extend(bs2.iter().map(|b| b.var.clone()));
                let r = bs1.iter().zip(bs2).all(|(x, y)| go(&x.rhs, &y.rhs, ea, eb))
                    && go(b1, b2, ea, eb);
                ea.truncate(na);
                eb.truncate(nb);
                r
            }
            _ => false,
        }
    }
    go(a, b, &mut Vec::new(), &mut Vec::new())
}

/// Names with a free occurrence, both λ-variables and recursion variables.
pub fn free_vars(t: &Term) -> BTreeSet<String> {
    fn go(t: &Term, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match t {
            Term::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            Term::BlackHole => {}
            Term::App(f, a) => {
                go(f, bound, out);
                go(a, bound, out);
            }
            Term::Abs(x, b) => {
                bound.push(x.clone());
                go(b, bound, out);
                bound.pop();
            }
            Term::Let(bs, body) => {
                let n = bound.len();
                bound.extend(bs.iter().map(|b| b.var.clone()));
                for b in bs {
                    go(&b.rhs, bound, out);
                }
                go(body, bound, out);
                bound.truncate(n);
            }
        }
    }
    let mut out = BTreeSet::new();
    go(t, &mut Vec::new(), &mut out);
    out
}

/// Every name occurring in the term, bound or free.
pub fn all_names(t: &Term) -> HashSet<String> {
    fn go(t: &Term, out: &mut HashSet<String>) {
        match t {
            Term::Var(x) => {
                out.insert(x.clone());
            }
            Term::BlackHole => {}
            Term::App(f, a) => {
                go(f, out);
                go(a, out);
            }
            Term::Abs(x, b) => {
                out.insert(x.clone());
                go(b, out);
            }
            Term::Let(bs, body) => {
                for b in bs {
                    out.insert(b.var.clone());
                    go(&b.rhs, out);
                }
                go(body, out);
            }
        }
    }
    let mut out = HashSet::new();
    go(t, &mut out);
    out
}

/// A variant of `base` (`base`, `base_1`, `base_2`, ...) not rejected by `taken`.
pub fn fresh_name(base: &str, taken: impl Fn(&str) -> bool) -> String {
    if !taken(base) {
        return base.to_string();
    }
    let stem = base.trim_end_matches(|c: char| c.is_ascii_digit() || c == '_');
    let stem = if stem.is_empty() { base } else { stem };
    (1..)
        .map(|i| format!("{stem}_{i}"))
        .find(|n| !taken(n))
        .expect("unbounded name supply")
}

/// Capture-avoiding replacement of free occurrences of `from` by the
/// variable `to`.
pub fn rename_free(t: &Term, from: &str, to: &str) -> Term {
    match t {
        Term::Var(x) if x == from => Term::var(to),
        Term::Var(_) | Term::BlackHole => t.clone(),
        Term::App(f, a) => Term::app(rename_free(f, from, to), rename_free(a, from, to)),
        Term::Abs(x, b) => {
            if x == from {
                t.clone()
            } else if x == to && free_vars(b).contains(from) {
                let avoid = all_names(b);
                let y = fresh_name(x, |n| n == from || n == to || avoid.contains(n));
                let b = rename_free(b, x, &y);
                Term::abs(y.clone(), rename_free(&b, from, to))
            } else {
                Term::abs(x.clone(), rename_free(b, from, to))
            }
        }
        Term::Let(bs, body) => {
            if bs.iter().any(|b| b.var == from) {
                return t.clone();
            }
            if bs.iter().any(|b| b.var == to) && free_vars(t).contains(from) {
                let avoid = all_names(t);
                let mut bs = bs.clone();
                let mut body = (**body).clone();
                let clash = bs.iter().position(|b| b.var == to).expect("checked above");
                let y = fresh_name(to, |n| n == from || avoid.contains(n));
                for b in bs.iter_mut() {
                    b.rhs = rename_free(&b.rhs, to, &y);
                }
                body = rename_free(&body, to, &y);
                bs[clash].var = y;
                return rename_free(&Term::let_in(bs, body), from, to);
            }
            Term::let_in(
                bs.iter()
                    .map(|b| Binding::new(b.var.clone(), rename_free(&b.rhs, from, to)))
                    .collect(),
                rename_free(body, from, to),
            )
        }
    }
}

/// Removes every binding not reachable from the in-part of its group;
/// groups left empty are replaced by their body.
pub fn garbage_collect(t: &Term) -> Term {
    match t {
        Term::Var(_) | Term::BlackHole => t.clone(),
        Term::App(f, a) => Term::app(garbage_collect(f), garbage_collect(a)),
        Term::Abs(x, b) => Term::abs(x.clone(), garbage_collect(b)),
        Term::Let(bs, body) => {
            let body = garbage_collect(body);
            let rhss: Vec<Term> = bs.iter().map(|b| garbage_collect(&b.rhs)).collect();
            let index: HashMap<&str, usize> = bs
                .iter()
                .enumerate()
                .map(|(i, b)| (b.var.as_str(), i))
                .collect();
            let mut live = vec![false; bs.len()];
            let mut work: Vec<usize> = free_vars(&body)
                .iter()
                .filter_map(|x| index.get(x.as_str()).copied())
                .collect();
            while let Some(i) = work.pop() {
                if live[i] {
                    continue;
                }
                live[i] = true;
                work.extend(
                    free_vars(&rhss[i])
                        .iter()
                        .filter_map(|x| index.get(x.as_str()).copied()),
                );
            }
            let kept: Vec<Binding> = bs
                .iter()
                .zip(rhss)
                .zip(&live)
                .filter(|(_, &l)| l)
                .map(|((b, rhs), _)| Binding::new(b.var.clone(), rhs))
                .collect();
            if kept.is_empty() {
                body
            } else {
                Term::let_in(kept, body)
            }
        }
    }
}

enum Frame<'a> {
    Lam { name: &'a str, outer: bool },
    Group(&'a [Binding]),
}

struct Env<'a> {
    frame: Frame<'a>,
    next: Option<Rc<Env<'a>>>,
}

enum Resolved<'a> {
    Lam { name: &'a str, outer: bool },
    Rec(Rc<Env<'a>>, usize),
    Free,
}

fn resolve<'a>(env: &Option<Rc<Env<'a>>>, x: &str) -> Resolved<'a> {
    let mut cur = env.clone();
    while let Some(e) = cur {
        match &e.frame {
            Frame::Lam { name, outer } if *name == x => {
                return Resolved::Lam {
                    name,
                    outer: *outer,
                }
            }
            Frame::Group(bs) => {
                if let Some(i) = bs.iter().position(|b| b.var == x) {
                    return Resolved::Rec(e.clone(), i);
                }
            }
            _ => {}
        }
        cur = e.next.clone();
    }
    Resolved::Free
}

fn push<'a>(env: &Option<Rc<Env<'a>>>, frame: Frame<'a>) -> Option<Rc<Env<'a>>> {
    Some(Rc::new(Env {
        frame,
        next: env.clone(),
    }))
}

/// The λ-variables bound above `p` that occur free in the complete
/// unfolding of the subterm at `p`. Returns `None` for an invalid position.
pub fn required_vars(t: &Term, p: &Position) -> Option<BTreeSet<String>> {
    let mut env: Option<Rc<Env<'_>>> = None;
    let mut cur = t;
    for &i in &p.0 {
        match cur {
            Term::Abs(x, b) if i == 0 => {
                env = push(
                    &env,
                    Frame::Lam {
                        name: x,
                        outer: true,
                    },
                );
                cur = b;
            }
            Term::App(f, a) if i < 2 => cur = if i == 0 { f } else { a },
            Term::Let(bs, body) if i <= bs.len() => {
                env = push(&env, Frame::Group(bs));
                cur = if i < bs.len() { &bs[i].rhs } else { body };
            }
            _ => return None,
        }
    }
    let mut out = BTreeSet::new();
    let mut visited: HashSet<(*const Binding, usize)> = HashSet::new();
    let mut work: Vec<(&Term, Option<Rc<Env<'_>>>)> = vec![(cur, env)];
    while let Some((t, env)) = work.pop() {
        match t {
            Term::Var(x) => match resolve(&env, x) {
                Resolved::Lam { name, outer: true } => {
                    out.insert(name.to_string());
                }
                Resolved::Rec(group, i) => {
                    let Frame::Group(bs) = &group.frame else {
                        unreachable!()
                    };
                    if visited.insert((bs.as_ptr(), i)) {
                        work.push((&bs[i].rhs, Some(group.clone())));
                    }
                }
                _ => {}
            },
            Term::BlackHole => {}
            Term::App(f, a) => {
                work.push((f, env.clone()));
                work.push((a, env));
            }
            Term::Abs(x, b) => work.push((
                b,
                push(
                    &env,
                    Frame::Lam {
                        name: x,
                        outer: false,
                    },
                ),
            )),
            Term::Let(bs, body) => work.push((body, push(&env, Frame::Group(bs)))),
        }
    }
    Some(out)
}

/// Number of symbols; each binding equation contributes one symbol for its
/// `=` plus the size of its right-hand side.
pub fn term_size(t: &Term) -> usize {
    match t {
        Term::Var(_) | Term::BlackHole => 1,
        Term::Abs(_, b) => 1 + term_size(b),
        Term::App(f, a) => 1 + term_size(f) + term_size(a),
        Term::Let(bs, body) => {
            1 + bs.iter().map(|b| 1 + term_size(&b.rhs)).sum::<usize>() + term_size(body)
        }
    }
}
