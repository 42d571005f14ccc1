//! Lexer and parser for workspace files.
//!
//! Declarations are terminated by a newline or `;`. Labels are bare words
//! (`[A-Za-z0-9_']+`) or double-quoted strings; `#` starts a comment.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.col)
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("{pos}: expected {}; found {found}", expected.join(" or "))]
pub struct ParseError {
    pub pos: Pos,
    pub expected: Vec<String>,
    pub found: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Word(String),
    Str(String),
    Punct(&'static str),
    Newline,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Word(w) => write!(f, "`{w}`"),
            Tok::Str(s) => write!(f, "{s:?}"),
            Tok::Punct(p) => write!(f, "`{p}`"),
            Tok::Newline => write!(f, "end of line"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

const PUNCTS: [&str; 18] = [
    "->", "-|", "<=", "{", "}", "(", ")", "[", "]", ",", ";", ":", "=", "~", ".", "/", "-", "|",
];

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn lex(src: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let pos = Pos { line, col };
        let c = chars[i];
        if c == '\n' {
            out.push((Tok::Newline, pos));
            i += 1;
            line += 1;
            col = 1;
        } else if c.is_whitespace() {
            i += 1;
            col += 1;
        } else if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
        } else if is_word_char(c) {
            let start = i;
            while i < chars.len() && is_word_char(chars[i]) {
                i += 1;
            }
            col += i - start;
            out.push((Tok::Word(chars[start..i].iter().collect()), pos));
        } else if c == '"' {
            let mut s = String::new();
            i += 1;
            col += 1;
            loop {
                match chars.get(i) {
                    None | Some('\n') => {
                        return Err(ParseError {
                            pos,
                            expected: vec!["closing `\"`".into()],
                            found: "end of line".into(),
                        })
                    }
                    Some('"') => {
                        i += 1;
                        col += 1;
                        break;
                    }
                    Some('\\') if matches!(chars.get(i + 1), Some('"' | '\\')) => {
                        s.push(chars[i + 1]);
                        i += 2;
                        col += 2;
                    }
                    Some(&ch) => {
                        s.push(ch);
                        i += 1;
                        col += 1;
                    }
                }
            }
            out.push((Tok::Str(s), pos));
        } else {
            let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
            let p = PUNCTS.iter().find(|p| rest.starts_with(**p)).ok_or_else(|| ParseError {
                pos,
                expected: vec!["a token".into()],
                found: format!("`{c}`"),
            })?;
            i += p.len();
            col += p.len();
            out.push((Tok::Punct(p), pos));
        }
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

/// A name together with where it was written.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Named {
    pub name: String,
    pub pos: Pos,
}

/// An unresolved term: `head` or `head(args)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawTerm {
    pub head: String,
    pub args: Option<Vec<RawTerm>>,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeriesLit {
    List(Vec<BigRational>),
    Rec {
        initial: Vec<BigRational>,
        coeffs: Vec<BigRational>,
        prec: usize,
    },
    RatFun {
        num: Vec<BigRational>,
        den: Vec<BigRational>,
        prec: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DeclKind {
    Set(Vec<String>),
    Fun {
        dom: Named,
        cod: Named,
        pairs: Vec<(String, String)>,
    },
    System {
        co: bool,
        on: Named,
        equations: Vec<(Named, Named)>,
    },
    Algebra {
        carrier: Vec<String>,
        tables: Vec<(String, usize, Vec<String>)>,
    },
    Group {
        carrier: Vec<String>,
        rows: Vec<Vec<String>>,
    },
    Theory {
        ops: Vec<(String, usize)>,
        axioms: Vec<(RawTerm, RawTerm)>,
    },
    Thmor {
        source: Named,
        target: Named,
        images: Vec<(String, RawTerm)>,
    },
    Category {
        objects: Vec<String>,
        arrows: Vec<(String, String, String)>,
        composites: Vec<(String, String, String)>,
    },
    Poset {
        elements: Vec<String>,
        relations: Vec<(String, String)>,
    },
    Functor {
        src: Named,
        tgt: Named,
        maps: Vec<(String, String)>,
    },
    Adjunction {
        left: Named,
        right: Named,
        components: Option<(Vec<String>, Vec<String>)>,
    },
    Series(SeriesLit),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decl {
    pub name: String,
    pub pos: Pos,
    pub kind: DeclKind,
}

pub const KEYWORDS: [&str; 12] = [
    "set",
    "fun",
    "system",
    "cosystem",
    "algebra",
    "group",
    "theory",
    "thmor",
    "category",
    "functor",
    "adjunction",
    "series",
];

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, expected: &[&str]) -> PResult<T> {
        Err(ParseError {
            pos: self.pos(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().to_string(),
        })
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Word(v) if v == w)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn punct(&mut self, p: &str) -> PResult<()> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            self.error(&[&format!("`{p}`")])
        }
    }

    fn keyword(&mut self, w: &str) -> PResult<()> {
        if self.is_word(w) {
            self.bump();
            Ok(())
        } else {
            self.error(&[&format!("`{w}`")])
        }
    }

    fn skip_newlines(&mut self) {
        while *self.peek() == Tok::Newline {
            self.bump();
        }
    }

    fn skip_separators(&mut self) {
        while *self.peek() == Tok::Newline || self.is_punct(";") {
            self.bump();
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Word(w) if w.starts_with(|c: char| c.is_ascii_alphabetic() || c == '_') => {
                self.bump();
                Ok(w)
            }
            _ => self.error(&["an identifier"]),
        }
    }

    fn named(&mut self) -> PResult<Named> {
        let pos = self.pos();
        Ok(Named {
            name: self.ident()?,
            pos,
        })
    }

    fn label(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Word(w) | Tok::Str(w) => {
                self.bump();
                Ok(w)
            }
            _ => self.error(&["a label"]),
        }
    }

    fn natural(&mut self) -> PResult<usize> {
        match self.peek().clone() {
            Tok::Word(w) => match w.parse() {
                Ok(n) => {
                    self.bump();
                    Ok(n)
                }
                Err(_) => self.error(&["a natural number"]),
            },
            _ => self.error(&["a natural number"]),
        }
    }

    fn rational(&mut self) -> PResult<BigRational> {
        let negative = self.eat_punct("-");
        let num = self.integer()?;
        let value = if self.eat_punct("/") {
            let den = self.integer()?;
            if den == BigInt::from(0) {
                return self.error(&["a nonzero denominator"]);
            }
            BigRational::new(num, den)
        } else {
            BigRational::from_integer(num)
        };
        Ok(if negative { -value } else { value })
    }

    fn integer(&mut self) -> PResult<BigInt> {
        match self.peek().clone() {
            Tok::Word(w) if w.bytes().all(|b| b.is_ascii_digit()) => {
                self.bump();
                Ok(w.parse().expect("digits"))
            }
            _ => self.error(&["an integer"]),
        }
    }

    /// `item (, item)*` up to `close`, newlines allowed anywhere.
    fn comma_list<T>(&mut self, close: &str, mut item: impl FnMut(&mut Self) -> PResult<T>) -> PResult<Vec<T>> {
        let mut out = Vec::new();
        self.skip_newlines();
        if self.eat_punct(close) {
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            self.skip_newlines();
            if self.eat_punct(close) {
                return Ok(out);
            }
            if !self.eat_punct(",") {
                return self.error(&["`,`", &format!("`{close}`")]);
            }
            self.skip_newlines();
        }
    }

    /// `{ item (sep item)* }` with `;` or newlines as separators.
    fn block<T>(&mut self, mut item: impl FnMut(&mut Self) -> PResult<T>) -> PResult<Vec<T>> {
        self.punct("{")?;
        let mut out = Vec::new();
        self.skip_separators();
        while !self.eat_punct("}") {
            out.push(item(self)?);
            if !(self.is_punct("}") || *self.peek() == Tok::Newline || self.is_punct(";")) {
                return self.error(&["`;`", "end of line", "`}`"]);
            }
            self.skip_separators();
        }
        Ok(out)
    }

    fn set_literal(&mut self) -> PResult<Vec<String>> {
        self.punct("{")?;
        self.comma_list("}", Self::label)
    }

    fn term(&mut self) -> PResult<RawTerm> {
        let pos = self.pos();
        let head = self.label()?;
        let args = if self.eat_punct("(") {
            Some(self.comma_list(")", Self::term)?)
        } else {
            None
        };
        Ok(RawTerm { head, args, pos })
    }

    fn decl(&mut self) -> PResult<Decl> {
        let pos = self.pos();
        let keyword = match self.peek().clone() {
            Tok::Word(w) if KEYWORDS.contains(&w.as_str()) => w,
            _ => return self.error(&["a declaration keyword"]),
        };
        self.bump();
        let name = self.ident()?;
        let kind = match keyword.as_str() {
            "set" => {
                self.punct("=")?;
                DeclKind::Set(self.set_literal()?)
            }
            "fun" => {
                self.punct(":")?;
                let dom = self.named()?;
                self.punct("->")?;
                let cod = self.named()?;
                self.punct("=")?;
                self.punct("{")?;
                let pairs = self.comma_list("}", |p| {
                    let a = p.label()?;
                    p.punct("->")?;
                    Ok((a, p.label()?))
                })?;
                DeclKind::Fun { dom, cod, pairs }
            }
            "system" | "cosystem" => {
                self.keyword("on")?;
                let on = self.named()?;
                let equations = self.block(|p| {
                    let l = p.named()?;
                    p.punct("~")?;
                    Ok((l, p.named()?))
                })?;
                DeclKind::System {
                    co: keyword == "cosystem",
                    on,
                    equations,
                }
            }
            "algebra" => {
                self.punct("=")?;
                let carrier = self.set_literal()?;
                let tables = self.block(|p| {
                    let op = p.ident()?;
                    p.punct("/")?;
                    let arity = p.natural()?;
                    p.punct("=")?;
                    p.punct("[")?;
                    Ok((op, arity, p.comma_list("]", Self::label)?))
                })?;
                DeclKind::Algebra { carrier, tables }
            }
            "group" => {
                self.punct("=")?;
                let carrier = self.set_literal()?;
                self.keyword("table")?;
                self.punct("[")?;
                let mut rows = vec![Vec::new()];
                self.skip_newlines();
                loop {
                    rows.last_mut().expect("non-empty").push(self.label()?);
                    self.skip_newlines();
                    if self.eat_punct("]") {
                        break;
                    }
                    if self.eat_punct(";") {
                        rows.push(Vec::new());
                    } else {
                        self.punct(",")?;
                    }
                    self.skip_newlines();
                }
                DeclKind::Group { carrier, rows }
            }
            "theory" => {
                let mut ops = Vec::new();
                let mut axioms = Vec::new();
                self.block(|p| {
                    if p.is_word("op") {
                        p.bump();
                        let op = p.ident()?;
                        p.punct("/")?;
                        ops.push((op, p.natural()?));
                    } else if p.is_word("axiom") {
                        p.bump();
                        let l = p.term()?;
                        p.punct("~")?;
                        axioms.push((l, p.term()?));
                    } else {
                        return p.error(&["`op`", "`axiom`"]);
                    }
                    Ok(())
                })?;
                DeclKind::Theory { ops, axioms }
            }
            "thmor" => {
                self.punct(":")?;
                let source = self.named()?;
                self.punct("->")?;
                let target = self.named()?;
                let images = self.block(|p| {
                    let sym = p.ident()?;
                    p.punct("->")?;
                    Ok((sym, p.term()?))
                })?;
                DeclKind::Thmor { source, target, images }
            }
            "category" => {
                if self.eat_punct("=") {
                    self.keyword("poset")?;
                    let elements = self.set_literal()?;
                    self.punct("{")?;
                    let relations = self.comma_list("}", |p| {
                        let a = p.label()?;
                        p.punct("<=")?;
                        Ok((a, p.label()?))
                    })?;
                    DeclKind::Poset { elements, relations }
                } else {
                    let mut objects = Vec::new();
                    let mut arrows = Vec::new();
                    let mut composites = Vec::new();
                    self.block(|p| {
                        if p.is_word("obj") {
                            p.bump();
                            objects.push(p.label()?);
                            while p.eat_punct(",") {
                                objects.push(p.label()?);
                            }
                        } else if p.is_word("arr") {
                            p.bump();
                            let name = p.label()?;
                            p.punct(":")?;
                            let a = p.label()?;
                            p.punct("->")?;
                            arrows.push((name, a, p.label()?));
                        } else if p.is_word("comp") {
                            p.bump();
                            let g = p.label()?;
                            p.punct(".")?;
                            let f = p.label()?;
                            p.punct("=")?;
                            composites.push((g, f, p.label()?));
                        } else {
                            return p.error(&["`obj`", "`arr`", "`comp`"]);
                        }
                        Ok(())
                    })?;
                    DeclKind::Category {
                        objects,
                        arrows,
                        composites,
                    }
                }
            }
            "functor" => {
                self.punct(":")?;
                let src = self.named()?;
                self.punct("->")?;
                let tgt = self.named()?;
                let maps = self.block(|p| {
                    let a = p.label()?;
                    p.punct("->")?;
                    Ok((a, p.label()?))
                })?;
                DeclKind::Functor { src, tgt, maps }
            }
            "adjunction" => {
                self.punct("=")?;
                let left = self.named()?;
                self.punct("-|")?;
                let right = self.named()?;
                let components = if self.is_word("unit") {
                    self.bump();
                    self.punct("[")?;
                    let unit = self.comma_list("]", Self::label)?;
                    self.keyword("counit")?;
                    self.punct("[")?;
                    let counit = self.comma_list("]", Self::label)?;
                    Some((unit, counit))
                } else {
                    None
                };
                DeclKind::Adjunction {
                    left,
                    right,
                    components,
                }
            }
            "series" => {
                self.punct("=")?;
                DeclKind::Series(self.series_literal()?)
            }
            _ => unreachable!("keyword list is exhaustive"),
        };
        Ok(Decl { name, pos, kind })
    }

    fn series_literal(&mut self) -> PResult<SeriesLit> {
        if self.eat_punct("[") {
            let coeffs = self.comma_list("]", Self::rational)?;
            if coeffs.is_empty() {
                return self.error(&["at least one coefficient"]);
            }
            return Ok(SeriesLit::List(coeffs));
        }
        if self.is_word("rec") {
            self.bump();
            self.punct("(")?;
            let mut initial = vec![self.rational()?];
            while self.eat_punct(",") {
                initial.push(self.rational()?);
            }
            self.punct(";")?;
            let mut coeffs = vec![self.rational()?];
            while self.eat_punct(",") {
                coeffs.push(self.rational()?);
            }
            self.punct(")")?;
            self.keyword("prec")?;
            let prec = self.natural()?;
            return Ok(SeriesLit::Rec { initial, coeffs, prec });
        }
        if self.is_word("ratfun") {
            self.bump();
            self.punct("(")?;
            self.punct("[")?;
            let num = self.comma_list("]", Self::rational)?;
            self.punct(",")?;
            self.punct("[")?;
            let den = self.comma_list("]", Self::rational)?;
            self.punct(")")?;
            self.keyword("prec")?;
            let prec = self.natural()?;
            return Ok(SeriesLit::RatFun { num, den, prec });
        }
        self.error(&["`[`", "`rec`", "`ratfun`"])
    }
}

/// Parses a whole workspace file into declarations.
pub fn parse(src: &str) -> Result<Vec<Decl>, ParseError> {
    let mut p = Parser { toks: lex(src)?, at: 0 };
    let mut out = Vec::new();
    p.skip_separators();
    while *p.peek() != Tok::Eof {
        out.push(p.decl()?);
        if !matches!(p.peek(), Tok::Newline | Tok::Eof) && !p.is_punct(";") {
            return p.error(&["`;`", "end of line"]);
        }
        p.skip_separators();
    }
    Ok(out)
}

/// Parses a single term, as given on the command line.
pub fn parse_term(src: &str) -> Result<RawTerm, ParseError> {
    let mut p = Parser { toks: lex(src)?, at: 0 };
    let t = p.term()?;
    if *p.peek() != Tok::Eof {
        return p.error(&["end of input"]);
    }
    Ok(t)
}

/// A label as it must be written: bare when possible, quoted otherwise.
pub fn quote(label: &str) -> String {
    if !label.is_empty() && label.chars().all(is_word_char) {
        label.to_string()
    } else {
        let escaped = label.replace('\\', "\\\\").replace('"', "\\\"");
        format!("\"{escaped}\"")
    }
}
