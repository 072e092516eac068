use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::graded::{sort_graded, Element, GradedVectorSpace};
use crate::qlinalg::{format_rational, int, Rational};

use super::FiniteCdga;

/// A monomial in a free graded-commutative algebra: generator indices in
/// non-decreasing order, odd generators at most once.
pub type Monomial = Vec<usize>;

/// A polynomial in the generators of a Sullivan algebra.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Polynomial(BTreeMap<Monomial, Rational>);

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial(BTreeMap::new())
    }

    pub fn one() -> Self {
        Self::monomial(vec![], Rational::one())
    }

    pub fn generator(g: usize) -> Self {
        Self::monomial(vec![g], Rational::one())
    }

    pub fn monomial(m: Monomial, c: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.0.iter()
    }

    pub fn coeff(&self, m: &[usize]) -> Rational {
        self.0.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.0.entry(m.clone()).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.0.remove(&m);
        }
    }

    pub fn add_scaled(&mut self, other: &Polynomial, c: &Rational) {
        for (m, x) in other.terms() {
            self.add_term(m.clone(), x * c);
        }
    }

    pub fn scaled(&self, c: &Rational) -> Polynomial {
        let mut p = Polynomial::zero();
        p.add_scaled(self, c);
        p
    }

    /// Product in the free graded-commutative algebra on `gens`.
    pub fn mul(&self, other: &Polynomial, gens: &GradedVectorSpace) -> Polynomial {
        let mut out = Polynomial::zero();
        for (a, x) in self.terms() {
            for (b, y) in other.terms() {
                if let Some((m, sign)) = mul_monomials(a, b, gens) {
                    out.add_term(m, x * y * int(sign as i64));
                }
            }
        }
        out
    }

    /// Splits into homogeneous word-length components.
    pub fn by_length(&self) -> BTreeMap<usize, Polynomial> {
        let mut out: BTreeMap<usize, Polynomial> = BTreeMap::new();
        for (m, c) in self.terms() {
            out.entry(m.len()).or_default().add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn degree_of(m: &[usize], gens: &GradedVectorSpace) -> i32 {
        m.iter().map(|&g| gens.degree(g)).sum()
    }

    /// Common degree of all terms, `None` if zero or inhomogeneous.
    pub fn homogeneous_degree(&self, gens: &GradedVectorSpace) -> Option<i32> {
        let mut it = self.terms().map(|(m, _)| Self::degree_of(m, gens));
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    pub fn generators_used(&self) -> impl Iterator<Item = usize> + '_ {
        self.terms().flat_map(|(m, _)| m.iter().copied())
    }

    /// Text such as `x*y - 1/2*a^2`.
    pub fn format(&self, gens: &GradedVectorSpace) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (n, (m, c)) in self.terms().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if n == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let body = format_monomial(m, gens, "*", true);
            if m.is_empty() {
                s.push_str(&format_rational(&a));
            } else if a.is_one() {
                s.push_str(&body);
            } else {
                let _ = write!(s, "{}*{}", format_rational(&a), body);
            }
        }
        s
    }
}

/// `x*x*y` style (or `x^2*y` with `powers`).
pub(crate) fn format_monomial(m: &[usize], gens: &GradedVectorSpace, sep: &str, powers: bool) -> String {
    if m.is_empty() {
        return "1".into();
    }
    let mut parts: Vec<String> = Vec::new();
    let mut i = 0;
    while i < m.len() {
        let mut j = i;
        while j < m.len() && m[j] == m[i] {
            j += 1;
        }
        let name = gens.label(m[i]);
        if powers && j - i > 1 {
            parts.push(format!("{name}^{}", j - i));
        } else {
            parts.extend(std::iter::repeat_n(name.to_string(), j - i));
        }
        i = j;
    }
    parts.join(sep)
}

pub(crate) fn mul_monomials(a: &[usize], b: &[usize], gens: &GradedVectorSpace) -> Option<(Monomial, i32)> {
    let mut joined = a.to_vec();
    joined.extend_from_slice(b);
    sort_graded(&joined, |g| gens.is_odd(g), false)
}

/// A free commutative graded algebra `ΛV` with a differential given on
/// generators. All generators have positive degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SullivanAlgebra {
    name: String,
    generators: GradedVectorSpace,
    differential: Vec<Polynomial>,
}

impl SullivanAlgebra {
    /// Validates degrees and `d² = 0`.
    pub fn new(name: impl Into<String>, generators: GradedVectorSpace, differential: Vec<Polynomial>) -> Result<Self> {
        let s = Self::new_unchecked(name, generators, differential)?;
        s.validate()?;
        Ok(s)
    }

    /// Checks generator degrees and shape but not `d² = 0`. Useful for
    /// auditing raw data, e.g. running [`two_stage_split`] on a table that
    /// is not a genuine Sullivan algebra.
    pub fn new_unchecked(
        name: impl Into<String>,
        generators: GradedVectorSpace,
        differential: Vec<Polynomial>,
    ) -> Result<Self> {
        if differential.len() != generators.dim() {
            return Err(Error::input("one differential per generator is required"));
        }
        for b in generators.basis() {
            if b.degree <= 0 {
                return Err(Error::input(format!(
                    "generator `{}` has degree {}; generators must have positive degree",
                    b.label, b.degree
                )));
            }
        }
        Ok(SullivanAlgebra {
            name: name.into(),
            generators,
            differential,
        })
    }

    /// Convenience constructor: `diffs` lists `(generator, [(factors, coeff)])`.
    pub fn from_terms(gens: &[(&str, i32)], diffs: &[(&str, &[(&[&str], i64)])]) -> Result<Self> {
        let s = Self::from_terms_unchecked(gens, diffs)?;
        s.validate()?;
        Ok(s)
    }

    pub fn from_terms_unchecked(gens: &[(&str, i32)], diffs: &[(&str, &[(&[&str], i64)])]) -> Result<Self> {
        let space = GradedVectorSpace::new(gens.iter().map(|&(l, d)| (l, d)))?;
        let mut d = vec![Polynomial::zero(); space.dim()];
        for (g, terms) in diffs {
            let gi = space.require(g)?;
            for (factors, c) in terms.iter() {
                let mut p = Polynomial::monomial(vec![], int(*c));
                for f in factors.iter() {
                    p = p.mul(&Polynomial::generator(space.require(f)?), &space);
                }
                d[gi].add_scaled(&p, &Rational::one());
            }
        }
        Self::new_unchecked("S", space, d)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn generators(&self) -> &GradedVectorSpace {
        &self.generators
    }

    pub fn d_generator(&self, g: usize) -> &Polynomial {
        &self.differential[g]
    }

    /// Extends `d` as a degree +1 derivation.
    pub fn d(&self, p: &Polynomial) -> Polynomial {
        let gens = &self.generators;
        let mut out = Polynomial::zero();
        for (m, c) in p.terms() {
            let mut sign = 1i64;
            for pos in 0..m.len() {
                let dg = &self.differential[m[pos]];
                if !dg.is_zero() {
                    let left = Polynomial::monomial(m[..pos].to_vec(), Rational::one());
                    let right = Polynomial::monomial(m[pos + 1..].to_vec(), Rational::one());
                    let term = left.mul(dg, gens).mul(&right, gens);
                    out.add_scaled(&term, &(c * int(sign)));
                }
                if gens.is_odd(m[pos]) {
                    sign = -sign;
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let gens = &self.generators;
        for g in 0..gens.dim() {
            let dg = &self.differential[g];
            if dg.is_zero() {
                continue;
            }
            if dg.homogeneous_degree(gens) != Some(gens.degree(g) + 1) {
                return Err(Error::invariant(format!(
                    "d({}) = {} is not homogeneous of degree {}",
                    gens.label(g),
                    dg.format(gens),
                    gens.degree(g) + 1
                )));
            }
            if dg.terms().any(|(m, _)| m.is_empty()) {
                return Err(Error::invariant(format!("d({}) has a constant term", gens.label(g))));
            }
        }
        for g in 0..gens.dim() {
            let dd = self.d(&self.differential[g]);
            if !dd.is_zero() {
                return Err(Error::invariant(format!(
                    "d² ≠ 0 on generator {}: d(d({})) = {}",
                    gens.label(g),
                    gens.label(g),
                    dd.format(gens)
                )));
            }
        }
        Ok(())
    }

    /// Largest word length appearing in any differential (0 if `d = 0`).
    pub fn max_word_length(&self) -> usize {
        self.differential
            .iter()
            .flat_map(|p| p.terms().map(|(m, _)| m.len()))
            .max()
            .unwrap_or(0)
    }

    /// All monomials of degree at most `max_degree`, grouped by nothing in
    /// particular; sorted by (degree, monomial).
    pub fn monomials_up_to(&self, max_degree: i32) -> Vec<Monomial> {
        let gens = &self.generators;
        let mut out = vec![vec![]];
        let mut frontier: Vec<(Monomial, i32)> = vec![(vec![], 0)];
        while let Some((m, deg)) = frontier.pop() {
            let start = m.last().copied().unwrap_or(0);
            for g in start..gens.dim() {
                if m.last() == Some(&g) && gens.is_odd(g) {
                    continue;
                }
                let nd = deg + gens.degree(g);
                if nd > max_degree {
                    continue;
                }
                let mut next = m.clone();
                next.push(g);
                out.push(next.clone());
                frontier.push((next, nd));
            }
        }
        out.sort_by_key(|m| (Polynomial::degree_of(m, gens), m.clone()));
        out
    }

    /// The finite CDGA `ΛV / (ΛV)^{>max_degree}`.
    pub fn truncate(&self, max_degree: i32) -> Result<FiniteCdga> {
        let gens = &self.generators;
        let monos = self.monomials_up_to(max_degree);
        let label = |m: &Monomial| format_monomial(m, gens, ".", false);
        let space = GradedVectorSpace::new(monos.iter().map(|m| (label(m), Polynomial::degree_of(m, gens))))?;
        let index = |m: &Monomial| space.index_of(&label(m));
        let to_element = |p: &Polynomial| -> Element {
            p.terms()
                .filter_map(|(m, c)| index(m).map(|i| (i, c.clone())))
                .collect()
        };
        let mut products = Vec::new();
        for a in &monos {
            for b in &monos {
                if let Some((m, sign)) = mul_monomials(a, b, gens) {
                    if let Some(i) = index(&m) {
                        products.push(((index(a).unwrap(), index(b).unwrap()), Element::term(i, int(sign as i64))));
                    }
                }
            }
        }
        let mut d = vec![Element::zero(); space.dim()];
        for m in &monos {
            let dm = self.d(&Polynomial::monomial(m.clone(), Rational::one()));
            d[index(m).unwrap()] = to_element(&dm);
        }
        FiniteCdga::new(format!("{}≤{max_degree}", self.name), space, "1", products, d)
    }
}

/// Per generator, the nonzero word-length components `d_k v` keyed by `k`.
pub fn wordlength_parts(s: &SullivanAlgebra) -> Vec<BTreeMap<usize, Polynomial>> {
    (0..s.generators.dim()).map(|g| s.differential[g].by_length()).collect()
}

/// True iff `d` has no linear part.
pub fn is_minimal(s: &SullivanAlgebra) -> bool {
    s.differential
        .iter()
        .all(|p| p.terms().all(|(m, _)| m.len() != 1))
}

/// Splits generators into `P` (closed) and `Q` (the rest), checking that
/// every `dQ` is a polynomial in `P`.
pub fn two_stage_split(s: &SullivanAlgebra) -> Result<(Vec<usize>, Vec<usize>)> {
    let gens = &s.generators;
    let (p, q): (Vec<usize>, Vec<usize>) = (0..gens.dim()).partition(|&g| s.differential[g].is_zero());
    for &g in &q {
        if let Some(bad) = s.differential[g].generators_used().find(|u| !p.contains(u)) {
            return Err(Error::NotTwoStage {
                generator: gens.label(g).to_string(),
                offending: gens.label(bad).to_string(),
            });
        }
    }
    Ok((p, q))
}
