//! Text formats for finite CDGAs (`.alg`) and Sullivan algebras (`.sul`).
//!
//! ```text
//! # H*(S² ∨ S² ∨ S⁵)
//! algebra wedge {
//!   basis e2:2, e2p:2, e5:5;
//!   default_product zero;
//! }
//!
//! sullivan Y {
//!   generator x:3, y:5, z:7;
//!   d z = x*y;
//! }
//! ```
//!
//! An algebra lists its basis as `label:degree` pairs and its nonzero
//! products as `product a*b = …;`. Pairs without a product statement
//! multiply to zero, and the unit `1` in degree 0 is implicit. Optional
//! `d a = …;` lines give a differential. A Sullivan algebra lists its
//! generators and the differential of each one; omitted generators are
//! closed. Right-hand sides are sums of terms `q*a*b^2` with rational
//! coefficients `p` or `p/q`. Labels may contain letters, digits, `_`, `'`,
//! `.` and `@`, but may not be plain numbers (the unit `1` excepted).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};

use crate::cdga::sullivan::mul_monomials;
use crate::cdga::{FiniteCdga, Monomial, Polynomial, SullivanAlgebra};
use crate::error::{Error, Result};
use crate::graded::{Element, GradedVectorSpace};
use crate::qlinalg::{parse_rational, Rational};

/// A located message that does not stop parsing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Parsed<T> {
    pub value: T,
    pub warnings: Vec<Diagnostic>,
}

/// Either kind of source file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Document {
    Algebra(FiniteCdga),
    Sullivan(SullivanAlgebra),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Sym(char),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '\'' | '.' | '@')
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let (line, column) = (ln + 1, i + 1);
            if c == '#' {
                break;
            }
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if is_word_char(c) {
                let start = i;
                while i < chars.len() && is_word_char(chars[i]) {
                    i += 1;
                }
                out.push(Token {
                    tok: Tok::Word(chars[start..i].iter().collect()),
                    line,
                    column,
                });
                continue;
            }
            if "{};,:=*/+-^".contains(c) {
                out.push(Token { tok: Tok::Sym(c), line, column });
                i += 1;
                continue;
            }
            return Err(Error::Parse {
                line,
                column,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

fn is_number(w: &str) -> bool {
    !w.is_empty() && w.bytes().all(|b| b.is_ascii_digit())
}

struct Cursor {
    tokens: Vec<Token>,
    pos: usize,
    /// Location reported at end of input.
    end: (usize, usize),
}

impl Cursor {
    fn new(text: &str) -> Result<Self> {
        let tokens = tokenize(text)?;
        let lines = text.lines().count().max(1);
        let last = text.lines().last().map(|l| l.chars().count() + 1).unwrap_or(1);
        Ok(Cursor {
            tokens,
            pos: 0,
            end: (lines, last),
        })
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_at(&self, k: usize) -> Option<&Token> {
        self.tokens.get(self.pos + k)
    }

    fn here(&self) -> (usize, usize) {
        self.peek().map(|t| (t.line, t.column)).unwrap_or(self.end)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        let (line, column) = self.here();
        Err(Error::Parse {
            line,
            column,
            message: message.into(),
        })
    }

    fn describe(&self) -> String {
        match self.peek() {
            Some(Token { tok: Tok::Word(w), .. }) => format!("`{w}`"),
            Some(Token { tok: Tok::Sym(c), .. }) => format!("`{c}`"),
            None => "end of input".into(),
        }
    }

    fn at_sym(&self, c: char) -> bool {
        matches!(self.peek(), Some(Token { tok: Tok::Sym(s), .. }) if *s == c)
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if self.at_sym(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<()> {
        if self.eat_sym(c) {
            Ok(())
        } else {
            self.error(format!("expected `{c}`, found {}", self.describe()))
        }
    }

    fn word(&mut self, what: &str) -> Result<(String, usize, usize)> {
        match self.peek().cloned() {
            Some(Token {
                tok: Tok::Word(w),
                line,
                column,
            }) => {
                self.pos += 1;
                Ok((w, line, column))
            }
            _ => self.error(format!("expected {what}, found {}", self.describe())),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(usize, usize)> {
        let (w, line, column) = self.word(&format!("`{kw}`"))?;
        if w != kw {
            return Err(Error::Parse {
                line,
                column,
                message: format!("expected `{kw}`, found `{w}`"),
            });
        }
        Ok((line, column))
    }

    fn integer(&mut self) -> Result<i32> {
        let neg = self.eat_sym('-');
        let (line, column) = self.here();
        let (w, _, _) = self.word("an integer")?;
        let v: i32 = w.parse().map_err(|_| Error::Parse {
            line,
            column,
            message: format!("`{w}` is not an integer"),
        })?;
        Ok(if neg { -v } else { v })
    }
}

/// One term of a right-hand side: coefficient and factor labels with their
/// locations.
struct Term {
    coeff: Rational,
    factors: Vec<(String, usize, usize)>,
    line: usize,
    column: usize,
}

/// `term (('+' | '-') term)*` where a term is `[q '*'] f ['^' n] ('*' f …)*`
/// or a bare rational. `known` decides whether a numeric word is a label.
fn parse_terms(cur: &mut Cursor, known: &dyn Fn(&str) -> bool) -> Result<Vec<Term>> {
    let mut terms = Vec::new();
    let mut sign = Rational::one();
    if cur.eat_sym('-') {
        sign = -sign;
    } else {
        cur.eat_sym('+');
    }
    loop {
        let (line, column) = cur.here();
        let mut coeff = sign.clone();
        let mut factors = Vec::new();
        // leading coefficient
        if let Some(Token { tok: Tok::Word(w), .. }) = cur.peek().cloned() {
            let followed_by = |k| matches!(cur.peek_at(k), Some(Token { tok: Tok::Sym(c), .. }) if *c == '/' || *c == '*');
            if is_number(&w) && (followed_by(1) || !known(&w)) {
                cur.pos += 1;
                let mut text = w.clone();
                if cur.eat_sym('/') {
                    let (d, _, _) = cur.word("a denominator")?;
                    text = format!("{w}/{d}");
                }
                let q = parse_rational(&text).ok_or_else(|| Error::Parse {
                    line,
                    column,
                    message: format!("`{text}` is not a rational number"),
                })?;
                coeff *= q;
                if !cur.eat_sym('*') {
                    terms.push(Term {
                        coeff,
                        factors,
                        line,
                        column,
                    });
                    if !next_sign(cur, &mut sign) {
                        return Ok(terms);
                    }
                    continue;
                }
            }
        }
        loop {
            let (f, fl, fc) = cur.word("a label")?;
            if is_number(&f) && !known(&f) {
                return Err(Error::Parse {
                    line: fl,
                    column: fc,
                    message: format!("`{f}` is a number where a label was expected"),
                });
            }
            let mut power = 1;
            if cur.eat_sym('^') {
                let p = cur.integer()?;
                if p < 1 {
                    return cur.error("exponents must be positive");
                }
                power = p as usize;
            }
            for _ in 0..power {
                factors.push((f.clone(), fl, fc));
            }
            if !cur.eat_sym('*') {
                break;
            }
        }
        terms.push(Term {
            coeff,
            factors,
            line,
            column,
        });
        if !next_sign(cur, &mut sign) {
            return Ok(terms);
        }
    }
}

fn next_sign(cur: &mut Cursor, sign: &mut Rational) -> bool {
    if cur.eat_sym('+') {
        *sign = Rational::one();
        true
    } else if cur.eat_sym('-') {
        *sign = -Rational::one();
        true
    } else {
        false
    }
}

fn unknown(label: &str, line: usize, column: usize, what: &str) -> Error {
    Error::Parse {
        line,
        column,
        message: format!("unknown {what} `{label}`"),
    }
}

/// A linear combination of basis labels; products are not allowed.
fn linear_terms(terms: Vec<Term>, space: &GradedVectorSpace, allow_unit_constant: bool) -> Result<Element> {
    let mut out = Element::zero();
    for t in terms {
        match t.factors.as_slice() {
            [] if t.coeff.is_zero() => {}
            [] if allow_unit_constant && space.index_of("1").is_some() => {
                out.add_term(space.index_of("1").unwrap(), t.coeff);
            }
            [] => {
                return Err(Error::Parse {
                    line: t.line,
                    column: t.column,
                    message: "a constant term is not allowed here".into(),
                })
            }
            [(l, line, column)] => {
                let i = space.index_of(l).ok_or_else(|| unknown(l, *line, *column, "basis label"))?;
                out.add_term(i, t.coeff);
            }
            [_, (_, line, column), ..] => {
                return Err(Error::Parse {
                    line: *line,
                    column: *column,
                    message: "expected a linear combination of basis labels".into(),
                })
            }
        }
    }
    Ok(out)
}

fn label_list(cur: &mut Cursor, seen: &mut BTreeSet<String>, out: &mut Vec<(String, i32, usize, usize)>) -> Result<()> {
    loop {
        let (l, line, column) = cur.word("a label")?;
        if is_number(&l) && l != "1" {
            return Err(Error::Parse {
                line,
                column,
                message: format!("`{l}` cannot be a label: labels may not be plain numbers"),
            });
        }
        if !seen.insert(l.clone()) {
            return Err(Error::Parse {
                line,
                column,
                message: format!("`{l}` is declared twice"),
            });
        }
        cur.expect_sym(':')?;
        let d = cur.integer()?;
        out.push((l, d, line, column));
        if !cur.eat_sym(',') {
            return cur.expect_sym(';');
        }
    }
}

fn locate(e: Error, line: usize, column: usize) -> Error {
    match e {
        Error::Invariant(m) => Error::Invariant(format!("{line}:{column}: {m}")),
        Error::Input(m) => Error::Parse { line, column, message: m },
        other => other,
    }
}

fn header(cur: &mut Cursor, kw: &str) -> Result<(String, usize, usize)> {
    let (line, column) = cur.keyword(kw)?;
    let (name, _, _) = cur.word("a name")?;
    cur.expect_sym('{')?;
    Ok((name, line, column))
}

fn finish_block(cur: &mut Cursor) -> Result<()> {
    if cur.peek().is_some() {
        return cur.error(format!("unexpected {} after the closing `}}`", cur.describe()));
    }
    Ok(())
}

/// Parses one `algebra NAME { … }` block.
pub fn parse_algebra(text: &str) -> Result<Parsed<FiniteCdga>> {
    let mut cur = Cursor::new(text)?;
    let (name, hl, hc) = header(&mut cur, "algebra")?;
    let mut seen = BTreeSet::new();
    let mut basis: Vec<(String, i32, usize, usize)> = Vec::new();
    let mut products: Vec<((String, usize, usize), (String, usize, usize), Vec<Term>)> = Vec::new();
    let mut differentials: Vec<((String, usize, usize), Vec<Term>)> = Vec::new();
    while !cur.eat_sym('}') {
        let (kw, line, column) = cur.word("a statement")?;
        match kw.as_str() {
            "basis" => label_list(&mut cur, &mut seen, &mut basis)?,
            "product" => {
                let a = cur.word("a label")?;
                cur.expect_sym('*')?;
                let b = cur.word("a label")?;
                cur.expect_sym('=')?;
                let rhs = parse_terms(&mut cur, &|_| true)?;
                cur.expect_sym(';')?;
                products.push((a, b, rhs));
            }
            "d" => {
                let a = cur.word("a label")?;
                cur.expect_sym('=')?;
                let rhs = parse_terms(&mut cur, &|_| true)?;
                cur.expect_sym(';')?;
                differentials.push((a, rhs));
            }
            "default_product" => {
                let (v, l, c) = cur.word("`zero`")?;
                if v != "zero" {
                    return Err(Error::Parse {
                        line: l,
                        column: c,
                        message: format!("only `default_product zero` is supported, found `{v}`"),
                    });
                }
                cur.expect_sym(';')?;
            }
            _ => {
                return Err(Error::Parse {
                    line,
                    column,
                    message: format!("unknown statement `{kw}` (expected basis, product, d or default_product)"),
                })
            }
        }
    }
    finish_block(&mut cur)?;

    if !seen.contains("1") {
        basis.push(("1".into(), 0, hl, hc));
    }
    let space = GradedVectorSpace::new(basis.iter().map(|(l, d, _, _)| (l.clone(), *d))).map_err(|e| locate(e, hl, hc))?;
    let lookup = |(l, line, column): &(String, usize, usize)| space.index_of(l).ok_or_else(|| unknown(l, *line, *column, "basis label"));
    let mut table: BTreeMap<(usize, usize), (Element, usize, usize)> = BTreeMap::new();
    for (a, b, rhs) in products {
        let (ia, ib) = (lookup(&a)?, lookup(&b)?);
        let v = linear_terms(rhs, &space, false)?;
        if ia == ib && space.is_odd(ia) && !v.is_zero() {
            return Err(Error::Invariant(format!(
                "{}:{}: {}*{} must be zero: `{}` has odd degree, and graded commutativity forces its square to vanish",
                a.1, a.2, a.0, a.0, a.0
            )));
        }
        if let Some((old, l, c)) = table.get(&(ia, ib)) {
            if *old != v {
                return Err(Error::Invariant(format!(
                    "{}:{}: product {}*{} conflicts with the value given at {l}:{c}",
                    a.1, a.2, a.0, b.0
                )));
            }
        }
        table.insert((ia, ib), (v, a.1, a.2));
    }
    let mut d = vec![Element::zero(); space.dim()];
    let mut d_seen = BTreeSet::new();
    for (a, rhs) in differentials {
        let ia = lookup(&a)?;
        if !d_seen.insert(ia) {
            return Err(Error::Parse {
                line: a.1,
                column: a.2,
                message: format!("d {} is given twice", a.0),
            });
        }
        d[ia] = linear_terms(rhs, &space, false)?;
    }
    let given: Vec<((usize, usize), Element)> = table.into_iter().map(|(k, (v, _, _))| (k, v)).collect();
    let alg = FiniteCdga::new(name, space, "1", given, d).map_err(|e| locate(e, hl, hc))?;
    Ok(Parsed {
        value: alg,
        warnings: Vec::new(),
    })
}

/// Parses one `sullivan NAME { … }` block and checks `d² = 0`.
pub fn parse_sullivan(text: &str) -> Result<Parsed<SullivanAlgebra>> {
    let mut cur = Cursor::new(text)?;
    let (name, hl, hc) = header(&mut cur, "sullivan")?;
    let mut seen = BTreeSet::new();
    let mut gens: Vec<(String, i32, usize, usize)> = Vec::new();
    let mut differentials: Vec<((String, usize, usize), Vec<Term>)> = Vec::new();
    while !cur.eat_sym('}') {
        let (kw, line, column) = cur.word("a statement")?;
        match kw.as_str() {
            "generator" | "generators" => label_list(&mut cur, &mut seen, &mut gens)?,
            "d" => {
                let a = cur.word("a generator")?;
                cur.expect_sym('=')?;
                let rhs = parse_terms(&mut cur, &|_| false)?;
                cur.expect_sym(';')?;
                differentials.push((a, rhs));
            }
            _ => {
                return Err(Error::Parse {
                    line,
                    column,
                    message: format!("unknown statement `{kw}` (expected generator or d)"),
                })
            }
        }
    }
    finish_block(&mut cur)?;

    for (l, d, line, column) in &gens {
        if *d <= 0 {
            return Err(Error::Parse {
                line: *line,
                column: *column,
                message: format!("generator `{l}` has degree {d}; Sullivan generators need positive degree"),
            });
        }
        if l == "1" {
            return Err(Error::Parse {
                line: *line,
                column: *column,
                message: "`1` is reserved for the unit".into(),
            });
        }
    }
    let space = GradedVectorSpace::new(gens.iter().map(|(l, d, _, _)| (l.clone(), *d))).map_err(|e| locate(e, hl, hc))?;
    let mut warnings = Vec::new();
    let mut d = vec![Polynomial::zero(); space.dim()];
    let mut located: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for ((g, gl, gc), rhs) in differentials {
        let ig = space.index_of(&g).ok_or_else(|| unknown(&g, gl, gc, "generator"))?;
        if located.insert(ig, (gl, gc)).is_some() {
            return Err(Error::Parse {
                line: gl,
                column: gc,
                message: format!("d {g} is given twice"),
            });
        }
        let mut p = Polynomial::zero();
        for t in rhs {
            let mut mono: Monomial = Vec::new();
            let mut sign = 1;
            let mut vanished = false;
            for (f, fl, fc) in &t.factors {
                let i = space.index_of(f).ok_or_else(|| unknown(f, *fl, *fc, "generator"))?;
                match mul_monomials(&mono, &[i], &space) {
                    Some((m, s)) => {
                        mono = m;
                        sign *= s;
                    }
                    None => vanished = true,
                }
            }
            if vanished {
                if !t.coeff.is_zero() {
                    warnings.push(Diagnostic {
                        line: t.line,
                        column: t.column,
                        message: "this term is zero: an odd generator squares to zero, so it is dropped".into(),
                    });
                }
                continue;
            }
            p.add_term(mono, t.coeff * Rational::from_integer(sign.into()));
        }
        d[ig] = p;
    }
    let s = SullivanAlgebra::new_unchecked(name, space, d).map_err(|e| locate(e, hl, hc))?;
    let gsp = s.generators();
    for g in 0..gsp.dim() {
        let Some(&(line, column)) = located.get(&g) else { continue };
        let dg = s.d_generator(g);
        if dg.terms().any(|(m, _)| m.is_empty()) {
            return Err(Error::Invariant(format!(
                "{line}:{column}: d {} has a constant term",
                gsp.label(g)
            )));
        }
        if !dg.is_zero() && dg.homogeneous_degree(gsp) != Some(gsp.degree(g) + 1) {
            return Err(Error::Invariant(format!(
                "{line}:{column}: d {} = {} is not homogeneous of degree {}",
                gsp.label(g),
                dg.format(gsp),
                gsp.degree(g) + 1
            )));
        }
    }
    for g in 0..gsp.dim() {
        let dd = s.d(s.d_generator(g));
        if !dd.is_zero() {
            let (line, column) = located.get(&g).copied().unwrap_or((hl, hc));
            return Err(Error::Invariant(format!(
                "{line}:{column}: d² ≠ 0 on generator {}: d(d {}) = {}",
                gsp.label(g),
                gsp.label(g),
                dd.format(gsp)
            )));
        }
    }
    s.validate().map_err(|e| locate(e, hl, hc))?;
    Ok(Parsed { value: s, warnings })
}

/// Parses either kind of file, dispatching on the first keyword.
pub fn parse_document(text: &str) -> Result<Parsed<Document>> {
    let cur = Cursor::new(text)?;
    match cur.peek().map(|t| &t.tok) {
        Some(Tok::Word(w)) if w == "algebra" => parse_algebra(text).map(|p| Parsed {
            value: Document::Algebra(p.value),
            warnings: p.warnings,
        }),
        Some(Tok::Word(w)) if w == "sullivan" => parse_sullivan(text).map(|p| Parsed {
            value: Document::Sullivan(p.value),
            warnings: p.warnings,
        }),
        _ => cur.error(format!("expected `algebra` or `sullivan`, found {}", cur.describe())),
    }
}

/// Parses `q*label + …` over the given basis, e.g. `1*e5@y` or
/// `xb@x - 1/2*yb@y`. `0` is the zero element.
pub fn parse_element(text: &str, space: &GradedVectorSpace) -> Result<Element> {
    let mut cur = Cursor::new(text)?;
    if cur.peek().is_none() {
        return cur.error("expected an element");
    }
    let terms = parse_terms(&mut cur, &|w| space.index_of(w).is_some())?;
    if cur.peek().is_some() {
        return cur.error(format!("unexpected {}", cur.describe()));
    }
    linear_terms(terms, space, false)
}

fn identifier(name: &str) -> String {
    let s: String = name.chars().map(|c| if is_word_char(c) { c } else { '_' }).collect();
    if s.is_empty() {
        "unnamed".into()
    } else {
        s
    }
}

fn label_pairs(space: &GradedVectorSpace, skip: Option<usize>) -> String {
    (0..space.dim())
        .filter(|&i| Some(i) != skip)
        .map(|i| format!("{}:{}", space.label(i), space.degree(i)))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Canonical `.alg` text; parsing it gives back an equal algebra when the
/// unit is labelled `1`.
pub fn render_algebra(a: &FiniteCdga) -> String {
    let sp = a.space();
    let name = |i: usize| sp.label(i).to_string();
    let mut out = format!("algebra {} {{\n", identifier(a.name()));
    let skip = (sp.label(a.unit()) == "1").then_some(a.unit());
    let basis = label_pairs(sp, skip);
    if !basis.is_empty() {
        out.push_str(&format!("  basis {basis};\n"));
    }
    for (&(x, y), v) in a.product_table() {
        if x > y || x == a.unit() || y == a.unit() {
            continue;
        }
        out.push_str(&format!("  product {}*{} = {};\n", sp.label(x), sp.label(y), v.format_with(name)));
    }
    for i in 0..a.dim() {
        let dv = a.d_basis(i);
        if !dv.is_zero() {
            out.push_str(&format!("  d {} = {};\n", sp.label(i), dv.format_with(name)));
        }
    }
    out.push_str("  default_product zero;\n}\n");
    out
}

/// Canonical `.sul` text.
pub fn render_sullivan(s: &SullivanAlgebra) -> String {
    let g = s.generators();
    let mut out = format!("sullivan {} {{\n", identifier(s.name()));
    if g.dim() > 0 {
        out.push_str(&format!("  generator {};\n", label_pairs(g, None)));
    }
    for i in 0..g.dim() {
        let p = s.d_generator(i);
        if !p.is_zero() {
            out.push_str(&format!("  d {} = {};\n", g.label(i), p.format(g)));
        }
    }
    out.push_str("}\n");
    out
}
