//! Text formats: quivers, algebra elements, module vectors and branching
//! systems. Every serializer here is inverted by the matching parser.
//!
//! ```text
//! quiver T { vertex 1 2; arrow x: 1 -> 1; arrow f: 1 -> 2; }   # comment
//! element  := ['-'] term (('+'|'-') term)* | '0'
//! term     := [scalar '*'] monomial
//! monomial := 'e_' IDENT | starpart [['.'] path] | path
//! starpart := '(' path ')' '^*' | IDENT '^*'
//! vector   := ['-'] vterm (('+'|'-') vterm)* | '0'
//! vterm    := [scalar '*'] (path | 'e_' IDENT | '(' path ')' '^inf' ['.' path])
//! bs { points: x y; v: x y; a: [x y]; sigma a: x->y y->x; }
//! ```
//!
//! Paths are written right to left: `b.a` traverses `a` first.

use std::sync::Arc;

use thiserror::Error;

use crate::algebra::{Element, Monomial};
use crate::branching::{BranchingError, BsSpec, FiniteBranchingSystem};
use crate::path::{EvInfPath, FinitePath};
use crate::quiver::{ArrowId, Quiver, QuiverError, VertexId};
use crate::repr::{FNKey, RepVector, SparseVector};
use crate::scalars::{Field, Scalar, ScalarError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TextError {
    #[error("{line}:{col}: syntax error: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("{line}:{col}: {message}")]
    Semantic {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("{line}:{col}: {source}")]
    Quiver {
        line: usize,
        col: usize,
        #[source]
        source: QuiverError,
    },
    #[error("{line}:{col}: {source}")]
    Scalar {
        line: usize,
        col: usize,
        #[source]
        source: ScalarError,
    },
    #[error(transparent)]
    Branching(#[from] BranchingError),
}

impl TextError {
    pub fn is_syntax(&self) -> bool {
        matches!(self, TextError::Syntax { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Word(String),
    Sym(char),
    /// `->`
    To,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Splits into words, symbols and `->`. In `loose` mode, used for
/// branching-system point names, a word is any run of characters other than
/// whitespace, `;:[]{}#` and `->`.
fn lex(text: &str, symbols: &str, loose: bool) -> Result<Vec<Token>, TextError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let delimiter = |c: char| c.is_whitespace() || ";:[]{}#".contains(c);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
        } else if c.is_whitespace() {
            i += 1;
            col += 1;
        } else if c == '#' && symbols.contains('#') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
                col += 1;
            }
        } else if c == '-' && chars.get(i + 1) == Some(&'>') && symbols.contains('>') {
            i += 2;
            col += 2;
            out.push(Token {
                tok: Tok::To,
                line: l0,
                col: c0,
            });
        } else if symbols.contains(c) && (!loose || delimiter(c)) {
            i += 1;
            col += 1;
            out.push(Token {
                tok: Tok::Sym(c),
                line: l0,
                col: c0,
            });
        } else if loose || is_word_char(c) {
            let start = i;
            while i < chars.len() {
                let d = chars[i];
                let stop = if loose {
                    delimiter(d) || (d == '-' && chars.get(i + 1) == Some(&'>'))
                } else {
                    !is_word_char(d)
                };
                if stop {
                    break;
                }
                i += 1;
                col += 1;
            }
            out.push(Token {
                tok: Tok::Word(chars[start..i].iter().collect()),
                line: l0,
                col: c0,
            });
        } else {
            return Err(TextError::Syntax {
                line,
                col,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

/// Semantic errors inside terms are held back until the whole input has
/// parsed, so a syntax error anywhere takes precedence.
struct Parser<'t> {
    toks: &'t [Token],
    pos: usize,
    end: (usize, usize),
    deferred: Option<TextError>,
}

impl<'t> Parser<'t> {
    fn new(toks: &'t [Token], text: &str) -> Self {
        let line = text.lines().count().max(1);
        let col = text.lines().last().map_or(0, |l| l.chars().count()) + 1;
        Parser {
            toks,
            pos: 0,
            end: (line, col),
            deferred: None,
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|t| &t.tok)
    }

    fn loc(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map_or(self.end, |t| (t.line, t.col))
    }

    fn syntax(&self, message: impl Into<String>) -> TextError {
        let (line, col) = self.loc();
        TextError::Syntax {
            line,
            col,
            message: message.into(),
        }
    }

    fn semantic_at(&self, at: (usize, usize), message: impl Into<String>) -> TextError {
        TextError::Semantic {
            line: at.0,
            col: at.1,
            message: message.into(),
        }
    }

    fn quiver_err(at: (usize, usize), source: QuiverError) -> TextError {
        TextError::Quiver {
            line: at.0,
            col: at.1,
            source,
        }
    }

    fn defer(&mut self, e: TextError) {
        self.deferred.get_or_insert(e);
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), TextError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.syntax(format!("expected `{c}`")))
        }
    }

    fn expect_to(&mut self) -> Result<(), TextError> {
        if self.peek() == Some(&Tok::To) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.syntax("expected `->`"))
        }
    }

    fn word(&mut self) -> Result<String, TextError> {
        match self.peek() {
            Some(Tok::Word(w)) => {
                let w = w.clone();
                self.pos += 1;
                Ok(w)
            }
            _ => Err(self.syntax("expected an identifier")),
        }
    }

    fn keyword(&mut self, k: &str) -> Result<(), TextError> {
        match self.peek() {
            Some(Tok::Word(w)) if w == k => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.syntax(format!("expected `{k}`"))),
        }
    }

    fn finish(&mut self) -> Result<(), TextError> {
        if !self.at_end() {
            return Err(self.syntax("unexpected trailing input"));
        }
        self.deferred.take().map_or(Ok(()), Err)
    }
}

/// Parses `quiver NAME { vertex v w; arrow a: v -> w; ... }`.
pub fn parse_quiver(text: &str) -> Result<Quiver, TextError> {
    let toks = lex(text, "{};:#>", false)?;
    let mut p = Parser::new(&toks, text);
    p.keyword("quiver")?;
    let name = p.word()?;
    p.expect('{')?;
    let mut vertices: Vec<(String, (usize, usize))> = Vec::new();
    let mut arrows: Vec<(String, String, String, (usize, usize))> = Vec::new();
    while !p.eat('}') {
        let at = p.loc();
        match p.word()?.as_str() {
            "vertex" => {
                while !p.eat(';') {
                    let at = p.loc();
                    vertices.push((p.word()?, at));
                }
            }
            "arrow" => {
                let name_at = p.loc();
                let a = p.word()?;
                p.expect(':')?;
                let s = p.word()?;
                p.expect_to()?;
                let t = p.word()?;
                p.expect(';')?;
                arrows.push((a, s, t, name_at));
            }
            other => return Err(p.semantic_at(at, format!("unknown statement `{other}`"))),
        }
    }
    p.finish()?;
    for (i, (v, at)) in vertices.iter().enumerate() {
        if vertices[..i].iter().any(|(w, _)| w == v) {
            return Err(Parser::quiver_err(
                *at,
                QuiverError::DuplicateVertex(v.clone()),
            ));
        }
    }
    for (i, (a, s, t, at)) in arrows.iter().enumerate() {
        if a.starts_with("e_") {
            return Err(p.semantic_at(*at, format!("arrow name `{a}` is reserved for vertices")));
        }
        if arrows[..i].iter().any(|(b, ..)| b == a) {
            return Err(Parser::quiver_err(
                *at,
                QuiverError::DuplicateArrow(a.clone()),
            ));
        }
        for v in [s, t] {
            if !vertices.iter().any(|(w, _)| w == v) {
                return Err(Parser::quiver_err(
                    *at,
                    QuiverError::UnknownVertex(v.clone()),
                ));
            }
        }
    }
    Quiver::new(
        &name,
        vertices.into_iter().map(|(v, _)| v),
        arrows.into_iter().map(|(a, s, t, _)| (a, s, t)),
    )
    .map_err(|e| Parser::quiver_err((1, 1), e))
}

pub fn serialize_quiver(q: &Quiver) -> String {
    let mut out = format!("quiver {} {{\n", q.name());
    let vs: Vec<&str> = q.vertex_ids().map(|v| q.vertex_name(v)).collect();
    out.push_str(&format!("  vertex {};\n", vs.join(" ")));
    for a in q.arrow_ids() {
        out.push_str(&format!(
            "  arrow {}: {} -> {};\n",
            q.arrow_name(a),
            q.vertex_name(q.source(a)),
            q.vertex_name(q.target(a))
        ));
    }
    out.push_str("}\n");
    out
}

/// Stands in for a term whose semantic error has been deferred.
fn placeholder() -> FinitePath {
    FinitePath::trivial(VertexId(0))
}

/// A key of either F or N, as read from text.
enum Key {
    Finite(FinitePath),
    Infinite(EvInfPath),
}

impl<'t> Parser<'t> {
    /// `IDENT ('.' IDENT)*` of arrows, or `e_v`, as a path in traversal order.
    fn path(&mut self, q: &Quiver, allow_trivial: bool) -> Result<FinitePath, TextError> {
        let at = self.loc();
        let first = self.word()?;
        if let Some(v) = first.strip_prefix("e_") {
            if !allow_trivial || v.is_empty() {
                return Err(TextError::Syntax {
                    line: at.0,
                    col: at.1,
                    message: format!("`{first}` is not an arrow"),
                });
            }
            return Ok(match q.vertex(v) {
                Ok(v) => FinitePath::trivial(v),
                Err(e) => {
                    self.defer(Parser::quiver_err(at, e));
                    placeholder()
                }
            });
        }
        let mut names = vec![(first, at)];
        while self.peek() == Some(&Tok::Sym('.'))
            && matches!(self.peek_at(1), Some(Tok::Word(w)) if !w.starts_with("e_"))
        {
            self.pos += 1;
            let at = self.loc();
            names.push((self.word()?, at));
        }
        let mut arrows: Vec<(ArrowId, (usize, usize))> = Vec::new();
        for (n, at) in names.into_iter().rev() {
            let a = match q.arrow(&n) {
                Ok(a) => a,
                Err(e) => {
                    self.defer(Parser::quiver_err(at, e));
                    return Ok(placeholder());
                }
            };
            if let Some(&(prev, _)) = arrows.last() {
                if q.target(prev) != q.source(a) {
                    self.defer(Parser::quiver_err(
                        at,
                        QuiverError::NotComposable {
                            left: q.arrow_name(a).to_string(),
                            right: q.arrow_name(prev).to_string(),
                        },
                    ));
                    return Ok(placeholder());
                }
            }
            arrows.push((a, at));
        }
        let source = q.source(arrows[0].0);
        Ok(
            FinitePath::from_arrows(q, source, arrows.into_iter().map(|(a, _)| a).collect())
                .expect("composability checked"),
        )
    }

    /// `[digits ['/' digits] '*']`.
    fn scalar(&mut self, field: Field) -> Result<Option<Scalar>, TextError> {
        let digits = |t: Option<&Tok>| matches!(t, Some(Tok::Word(w)) if w.bytes().all(|b| b.is_ascii_digit()));
        if !digits(self.peek()) || !matches!(self.peek_at(1), Some(Tok::Sym('*' | '/'))) {
            return Ok(None);
        }
        let at = self.loc();
        let mut lit = self.word()?;
        if self.eat('/') {
            if !digits(self.peek()) {
                return Err(self.syntax("expected a denominator"));
            }
            lit = format!("{lit}/{}", self.word()?);
        }
        self.expect('*')?;
        Ok(Some(field.parse_scalar(&lit).unwrap_or_else(|source| {
            self.defer(TextError::Scalar {
                line: at.0,
                col: at.1,
                source,
            });
            field.one()
        })))
    }

    fn monomial(&mut self, q: &Quiver) -> Result<Monomial, TextError> {
        let at = self.loc();
        let star = if self.peek() == Some(&Tok::Sym('(')) {
            self.pos += 1;
            let p = self.path(q, false)?;
            self.expect(')')?;
            self.expect('^')?;
            self.expect('*')?;
            Some(p)
        } else if matches!(self.peek(), Some(Tok::Word(_)))
            && self.peek_at(1) == Some(&Tok::Sym('^'))
        {
            let w_at = self.loc();
            let w = self.word()?;
            if w.starts_with("e_") {
                return Err(TextError::Syntax {
                    line: w_at.0,
                    col: w_at.1,
                    message: format!("`{w}` is not an arrow"),
                });
            }
            self.expect('^')?;
            self.expect('*')?;
            Some(match q.arrow(&w) {
                Ok(a) => FinitePath::arrow(q, a),
                Err(e) => {
                    self.defer(Parser::quiver_err(w_at, e));
                    placeholder()
                }
            })
        } else {
            None
        };
        match star {
            None => {
                let p = self.path(q, true)?;
                Ok(Monomial::of_path(p))
            }
            Some(s) => {
                let dotted = self.eat('.');
                let rest = if dotted
                    || matches!(self.peek(), Some(Tok::Word(w)) if !w.starts_with("e_"))
                {
                    Some(self.path(q, false)?)
                } else {
                    None
                };
                let path = rest.unwrap_or_else(|| FinitePath::trivial(s.target()));
                Ok(Monomial::new(s, path).unwrap_or_else(|e| {
                    self.defer(Parser::quiver_err(at, e));
                    Monomial::of_path(placeholder())
                }))
            }
        }
    }

    fn vector_key(&mut self, q: &Quiver) -> Result<Key, TextError> {
        let at = self.loc();
        if !self.eat('(') {
            return Ok(Key::Finite(self.path(q, true)?));
        }
        let cycle = self.path(q, false)?;
        self.expect(')')?;
        self.expect('^')?;
        self.keyword("inf")?;
        let prefix = if self.eat('.') {
            self.path(q, false)?
        } else {
            FinitePath::trivial(cycle.source())
        };
        Ok(match EvInfPath::new(q, prefix, cycle) {
            Ok(p) => Key::Infinite(p),
            Err(e) => {
                self.defer(Parser::quiver_err(at, e));
                Key::Finite(placeholder())
            }
        })
    }

    /// A signed sum of `[scalar '*'] item`, or the literal `0`.
    fn combination<T>(
        &mut self,
        field: Field,
        mut item: impl FnMut(&mut Self) -> Result<T, TextError>,
    ) -> Result<Vec<(Scalar, T)>, TextError> {
        if self.toks.len() == 1 && self.peek() == Some(&Tok::Word("0".into())) {
            self.pos += 1;
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        let mut negative = self.eat('-');
        loop {
            let c = self.scalar(field)?.unwrap_or_else(|| field.one());
            let c = if negative { -&c } else { c };
            out.push((c, item(self)?));
            if self.at_end() {
                return Ok(out);
            }
            negative = if self.eat('+') {
                false
            } else if self.eat('-') {
                true
            } else {
                return Err(self.syntax("expected `+`, `-` or end of input"));
            };
        }
    }
}

pub fn parse_element(text: &str, q: &Quiver, field: Field) -> Result<Element, TextError> {
    let toks = lex(text, "+-*/.()^", false)?;
    let mut p = Parser::new(&toks, text);
    let terms = p.combination(field, |p| p.monomial(q))?;
    p.finish()?;
    Ok(Element::from_terms(field, terms))
}

pub fn serialize_element(x: &Element, q: &Quiver) -> String {
    x.display(q).to_string()
}

/// Which module a parsed vector belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VectorKind {
    F,
    N,
    DirectSum,
    /// F if every key is infinite, N if every key is finite, otherwise the
    /// direct sum.
    Infer,
}

impl std::str::FromStr for VectorKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "f" | "F" => Ok(VectorKind::F),
            "n" | "N" => Ok(VectorKind::N),
            "sum" | "fn" => Ok(VectorKind::DirectSum),
            "auto" => Ok(VectorKind::Infer),
            _ => Err(format!("unknown module `{s}` (expected f, n, sum or auto)")),
        }
    }
}

/// Parses a vector of F, N or `F (+) N`. Finite keys must end at sinks.
pub fn parse_vector(
    text: &str,
    q: &Quiver,
    field: Field,
    kind: VectorKind,
) -> Result<RepVector, TextError> {
    let toks = lex(text, "+-*/.()^", false)?;
    let mut p = Parser::new(&toks, text);
    let mut locs = Vec::new();
    let terms = p.combination(field, |p| {
        locs.push(p.loc());
        p.vector_key(q)
    })?;
    p.finish()?;
    for ((_, k), at) in terms.iter().zip(&locs) {
        if let Key::Finite(path) = k {
            if !q.is_sink(path.target()) {
                return Err(
                    p.semantic_at(*at, format!("`{}` does not end at a sink", path.display(q)))
                );
            }
        }
    }
    let infinite = terms
        .iter()
        .filter(|(_, k)| matches!(k, Key::Infinite(_)))
        .count();
    let kind = match kind {
        VectorKind::Infer if infinite == terms.len() && !terms.is_empty() => VectorKind::F,
        VectorKind::Infer if infinite == 0 => VectorKind::N,
        VectorKind::Infer => VectorKind::DirectSum,
        k => k,
    };
    let wrong =
        |what: &str| p.semantic_at((1, 1), format!("a vector of {what} cannot have this key"));
    Ok(match kind {
        VectorKind::F => {
            let mut v = SparseVector::zero(field);
            for (c, k) in terms {
                match k {
                    Key::Infinite(x) => v.add_term(x, c),
                    Key::Finite(_) => return Err(wrong("F")),
                }
            }
            RepVector::InF(v)
        }
        VectorKind::N => {
            let mut v = SparseVector::zero(field);
            for (c, k) in terms {
                match k {
                    Key::Finite(x) => v.add_term(x, c),
                    Key::Infinite(_) => return Err(wrong("N")),
                }
            }
            RepVector::InN(v)
        }
        _ => {
            let mut v = SparseVector::zero(field);
            for (c, k) in terms {
                let key = match k {
                    Key::Finite(x) => FNKey::N(x),
                    Key::Infinite(x) => FNKey::F(x),
                };
                v.add_term(key, c);
            }
            RepVector::DirectSum(v)
        }
    })
}

pub fn serialize_vector(v: &RepVector, q: &Quiver) -> String {
    v.display(q)
}

/// Parses `bs { points: ...; <vertex>: ...; <arrow>: [...]; sigma <arrow>: x->y ...; }`.
pub fn parse_bs(text: &str, q: Arc<Quiver>) -> Result<FiniteBranchingSystem, TextError> {
    let toks = lex(text, "{};:[]#>", true)?;
    let mut p = Parser::new(&toks, text);
    p.keyword("bs")?;
    p.expect('{')?;
    let mut spec = BsSpec::default();
    let mut seen_points = false;
    while !p.eat('}') {
        let at = p.loc();
        let head = p.word()?;
        if head == "sigma" && p.peek() != Some(&Tok::Sym(':')) {
            let a_at = p.loc();
            let a = p.word()?;
            q.arrow(&a).map_err(|e| Parser::quiver_err(a_at, e))?;
            p.expect(':')?;
            let mut pairs = Vec::new();
            while !p.eat(';') {
                let x = p.word()?;
                p.expect_to()?;
                pairs.push((x, p.word()?));
            }
            spec.sigma.push((a, pairs));
            continue;
        }
        p.expect(':')?;
        let bracketed = p.eat('[');
        let mut names = Vec::new();
        while !(p.peek() == Some(&Tok::Sym(if bracketed { ']' } else { ';' }))) {
            names.push(p.word()?);
        }
        p.pos += 1;
        if bracketed {
            p.expect(';')?;
        }
        if head == "points" && !bracketed {
            if seen_points {
                return Err(p.semantic_at(at, "`points` given twice"));
            }
            seen_points = true;
            spec.points = names;
        } else if bracketed {
            q.arrow(&head).map_err(|e| Parser::quiver_err(at, e))?;
            spec.arrow_sets.push((head, names));
        } else {
            q.vertex(&head).map_err(|e| Parser::quiver_err(at, e))?;
            spec.vertex_sets.push((head, names));
        }
    }
    p.finish()?;
    if !seen_points {
        return Err(p.semantic_at((1, 1), "missing `points` block"));
    }
    Ok(FiniteBranchingSystem::new(q, &spec)?)
}

pub fn serialize_bs(x: &FiniteBranchingSystem) -> String {
    let spec = x.spec();
    let mut out = String::from("bs {\n");
    out.push_str(&format!("  points: {};\n", spec.points.join(" ")));
    for (v, pts) in &spec.vertex_sets {
        out.push_str(&format!("  {v}: {};\n", pts.join(" ")));
    }
    for (a, pts) in &spec.arrow_sets {
        out.push_str(&format!("  {a}: [{}];\n", pts.join(" ")));
    }
    for (a, pairs) in &spec.sigma {
        let body: Vec<String> = pairs.iter().map(|(x, y)| format!("{x}->{y}")).collect();
        out.push_str(&format!("  sigma {a}: {};\n", body.join(" ")));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::standard::*;

    #[test]
    fn quivers() {
        let r1 = parse_quiver("quiver R1 { vertex v; arrow x: v -> v; }").unwrap();
        assert_eq!(r1, rose(1));
        let a2 =
            parse_quiver("# line\nquiver A2 {\n  vertex 1 2;\n  arrow a: 1 -> 2; # the arrow\n}")
                .unwrap();
        assert_eq!(a2.arrow_count(), 1);
        assert_eq!(
            parse_quiver(&serialize_quiver(&toeplitz())).unwrap(),
            toeplitz()
        );
        let dup =
            parse_quiver("quiver Q { vertex v; arrow x: v -> v; arrow x: v -> v; }").unwrap_err();
        assert!(
            matches!(dup, TextError::Quiver { source: QuiverError::DuplicateArrow(ref a), .. } if a == "x")
        );
        let bad = parse_quiver("quiver Q {\n vertex v;\n arrow x v -> v; }").unwrap_err();
        assert_eq!(
            bad,
            TextError::Syntax {
                line: 3,
                col: 10,
                message: "expected `:`".into()
            }
        );
    }

    #[test]
    fn elements() {
        let r2 = rose(2);
        let f = Field::Rationals;
        let x = parse_element("a^* . b", &r2, f).unwrap();
        assert_eq!(x.display(&r2).to_string(), "a^*.b");
        let r1 = rose(1);
        let x = parse_element("e_v - x", &r1, f).unwrap();
        assert_eq!(x.display(&r1).to_string(), "e_v - x");
        let y = parse_element("-3/4*(x.x)^*.x + 0*x", &r1, f).unwrap();
        assert_eq!(y.display(&r1).to_string(), "-3/4*(x.x)^*.x");
        assert!(parse_element("0", &r1, f).unwrap().is_empty());
        assert!(parse_element("x +", &r1, f).unwrap_err().is_syntax());
        let t = toeplitz();
        let e = parse_element("x.f", &t, f).unwrap_err();
        assert!(matches!(
            e,
            TextError::Quiver {
                source: QuiverError::NotComposable { .. },
                ..
            }
        ));
        assert!(parse_element("f^*.x", &t, f).is_err());
    }

    #[test]
    fn vectors() {
        let r2 = rose(2);
        let v = parse_vector("(a.b)^inf.b", &r2, Field::Rationals, VectorKind::Infer).unwrap();
        let RepVector::InF(ref x) = v else { panic!() };
        let (k, _) = x.terms().next().unwrap();
        assert_eq!(k.prefix().arrows().len(), 1);
        assert_eq!(k.cycle().display(&r2).to_string(), "a.b");
        assert_eq!(serialize_vector(&v, &r2), "(a.b)^inf.b");
        let t = toeplitz();
        let v = parse_vector(
            "2*f - f.x + (x)^inf",
            &t,
            Field::Rationals,
            VectorKind::Infer,
        )
        .unwrap();
        assert!(matches!(v, RepVector::DirectSum(_)));
        assert!(parse_vector("x", &t, Field::Rationals, VectorKind::Infer).is_err());
    }

    #[test]
    fn branching_systems() {
        let a2 = Arc::new(line(2));
        let text = "bs { points: x y; 1: x; 2: y; a: [x]; sigma a: y->x; }";
        let x = parse_bs(text, Arc::clone(&a2)).unwrap();
        assert_eq!(x.len(), 2);
        assert_eq!(parse_bs(&serialize_bs(&x), a2.clone()).unwrap(), x);
        assert!(parse_bs("bs { points: x; 3: x; }", a2.clone()).is_err());
        assert!(parse_bs("bs { 1: x; }", a2).is_err());
    }
}
