//! Integer-graded vector spaces with labeled bases, elements, Koszul signs
//! and shuffles.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qlinalg::{format_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisElement {
    pub label: String,
    pub degree: i32,
}

/// A finite graded space. The basis is kept sorted by `(degree, label)`,
/// so a basis index is also a position in that order.
#[derive(Debug, Clone, Default)]
pub struct GradedVectorSpace {
    basis: Vec<BasisElement>,
    index: HashMap<String, usize>,
}

impl PartialEq for GradedVectorSpace {
    fn eq(&self, other: &Self) -> bool {
        self.basis == other.basis
    }
}

impl Eq for GradedVectorSpace {}

impl GradedVectorSpace {
    pub fn new<S: Into<String>>(elements: impl IntoIterator<Item = (S, i32)>) -> Result<Self> {
        let mut basis: Vec<BasisElement> = elements
            .into_iter()
            .map(|(l, d)| BasisElement {
                label: l.into(),
                degree: d,
            })
            .collect();
        basis.sort_by(|a, b| (a.degree, &a.label).cmp(&(b.degree, &b.label)));
        let mut index = HashMap::with_capacity(basis.len());
        for (i, b) in basis.iter().enumerate() {
            if b.label.is_empty() {
                return Err(Error::input("empty basis label"));
            }
            if index.insert(b.label.clone(), i).is_some() {
                return Err(Error::input(format!("duplicate basis label `{}`", b.label)));
            }
        }
        Ok(GradedVectorSpace { basis, index })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[BasisElement] {
        &self.basis
    }

    pub fn label(&self, i: usize) -> &str {
        &self.basis[i].label
    }

    pub fn degree(&self, i: usize) -> i32 {
        self.basis[i].degree
    }

    pub fn is_odd(&self, i: usize) -> bool {
        self.basis[i].degree.rem_euclid(2) == 1
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn require(&self, label: &str) -> Result<usize> {
        self.index_of(label)
            .ok_or_else(|| Error::input(format!("unknown basis element `{label}`")))
    }

    pub fn degrees(&self) -> BTreeSet<i32> {
        self.basis.iter().map(|b| b.degree).collect()
    }

    /// Indices of the basis elements of the given degree, in basis order.
    pub fn slice(&self, degree: i32) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.degree(i) == degree).collect()
    }

    pub fn dims_by_degree(&self) -> BTreeMap<i32, usize> {
        let mut out = BTreeMap::new();
        for b in &self.basis {
            *out.entry(b.degree).or_insert(0) += 1;
        }
        out
    }

    pub fn min_degree(&self) -> Option<i32> {
        self.basis.first().map(|b| b.degree)
    }

    pub fn max_degree(&self) -> Option<i32> {
        self.basis.last().map(|b| b.degree)
    }

    /// Shifts every degree by `shift`, keeping labels. Only the grading is
    /// touched; any structure defined on the space must be re-indexed by the
    /// caller through labels.
    pub fn suspend(&self, shift: i32) -> GradedVectorSpace {
        GradedVectorSpace::new(self.basis.iter().map(|b| (b.label.clone(), b.degree + shift)))
            .expect("labels stay unique")
    }

    /// Degree of a nonzero element, if homogeneous.
    pub fn homogeneous_degree(&self, e: &Element) -> Option<i32> {
        let mut degs = e.terms().map(|(i, _)| self.degree(i));
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    pub fn format(&self, e: &Element) -> String {
        e.format_with(|i| self.label(i).to_string())
    }

    /// Label -> coefficient map with canonical rational strings.
    pub fn to_label_map(&self, e: &Element) -> BTreeMap<String, String> {
        e.terms()
            .map(|(i, c)| (self.label(i).to_string(), format_rational(c)))
            .collect()
    }
}

/// A finite linear combination of basis vectors, keyed by basis index.
/// Zero coefficients are never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Element(BTreeMap<usize, Rational>);

impl Element {
    pub fn zero() -> Self {
        Element(BTreeMap::new())
    }

    pub fn basis(i: usize) -> Self {
        Self::term(i, Rational::one())
    }

    pub fn term(i: usize, c: Rational) -> Self {
        let mut e = Self::zero();
        e.add_term(i, c);
        e
    }

    pub fn from_dense(v: &[Rational]) -> Self {
        let mut e = Self::zero();
        for (i, c) in v.iter().enumerate() {
            e.add_term(i, c.clone());
        }
        e
    }

    pub fn to_dense(&self, n: usize) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); n];
        for (i, c) in self.terms() {
            v[i] = c.clone();
        }
        v
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.0.get(&i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &Rational)> + '_ {
        self.0.iter().map(|(&i, c)| (i, c))
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.keys().copied()
    }

    pub fn add_term(&mut self, i: usize, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.0.entry(i).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.0.remove(&i);
        }
    }

    pub fn add_scaled(&mut self, other: &Element, c: &Rational) {
        if c.is_zero() {
            return;
        }
        for (i, x) in other.terms() {
            self.add_term(i, x * c);
        }
    }

    pub fn add_assign(&mut self, other: &Element) {
        for (i, x) in other.terms() {
            self.add_term(i, x.clone());
        }
    }

    pub fn scaled(&self, c: &Rational) -> Element {
        if c.is_zero() {
            return Element::zero();
        }
        Element(self.0.iter().map(|(&i, x)| (i, x * c)).collect())
    }

    pub fn neg(&self) -> Element {
        Element(self.0.iter().map(|(&i, x)| (i, -x)).collect())
    }

    pub fn sub(&self, other: &Element) -> Element {
        let mut out = self.clone();
        out.add_scaled(other, &-Rational::one());
        out
    }

    /// Applies the linear map sending basis vector `i` to `image(i)`.
    pub fn map_linear(&self, mut image: impl FnMut(usize) -> Element) -> Element {
        let mut out = Element::zero();
        for (i, c) in self.terms() {
            out.add_scaled(&image(i), c);
        }
        out
    }

    pub fn format_with(&self, label: impl Fn(usize) -> String) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (n, (i, c)) in self.terms().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if n == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            if !a.is_one() {
                let _ = write!(s, "{}*", format_rational(&a));
            }
            s.push_str(&label(i));
        }
        s
    }
}

impl FromIterator<(usize, Rational)> for Element {
    fn from_iter<T: IntoIterator<Item = (usize, Rational)>>(iter: T) -> Self {
        let mut e = Element::zero();
        for (i, c) in iter {
            e.add_term(i, c);
        }
        e
    }
}

fn parity(d: i32) -> bool {
    d.rem_euclid(2) == 1
}

fn check_permutation(perm: &[usize]) -> Result<()> {
    let mut seen = vec![false; perm.len()];
    for &p in perm {
        if p >= perm.len() || std::mem::replace(&mut seen[p], true) {
            return Err(Error::input(format!("{perm:?} is not a permutation")));
        }
    }
    Ok(())
}

/// Koszul sign of rearranging symbols `x_0..x_{n-1}` (with the given
/// degrees) into the order `x_{perm[0]}, .., x_{perm[n-1]}`.
pub fn koszul_sign(perm: &[usize], degrees: &[i32]) -> Result<i32> {
    if perm.len() != degrees.len() {
        return Err(Error::input(format!(
            "permutation of length {} but {} degrees",
            perm.len(),
            degrees.len()
        )));
    }
    check_permutation(perm)?;
    let mut sign = 1;
    for a in 0..perm.len() {
        for b in a + 1..perm.len() {
            if perm[a] > perm[b] && parity(degrees[perm[a]]) && parity(degrees[perm[b]]) {
                sign = -sign;
            }
        }
    }
    Ok(sign)
}

/// Sign of the underlying permutation.
pub fn permutation_sign(perm: &[usize]) -> i32 {
    let mut sign = 1;
    for a in 0..perm.len() {
        for b in a + 1..perm.len() {
            if perm[a] > perm[b] {
                sign = -sign;
            }
        }
    }
    sign
}

/// `sgn(perm) * koszul_sign(perm)`: the sign for graded antisymmetric maps.
pub fn antisymmetric_sign(perm: &[usize], degrees: &[i32]) -> Result<i32> {
    Ok(permutation_sign(perm) * koszul_sign(perm, degrees)?)
}

/// An `(i, n-i)` unshuffle: `perm[..split]` and `perm[split..]` are each
/// increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shuffle {
    pub perm: Vec<usize>,
    pub split: usize,
}

impl Shuffle {
    pub fn koszul(&self, degrees: &[i32]) -> Result<i32> {
        koszul_sign(&self.perm, degrees)
    }

    /// `ε_σ · ε`, the sign used in the generalized Jacobi identity.
    pub fn antisymmetric(&self, degrees: &[i32]) -> Result<i32> {
        antisymmetric_sign(&self.perm, degrees)
    }
}

/// All `(i, j)` shuffles of `i + j` symbols, in lexicographic order of the
/// first block.
pub fn shuffles(i: usize, j: usize) -> Vec<Shuffle> {
    let n = i + j;
    let mut out = Vec::new();
    let mut chosen = Vec::with_capacity(i);
    fn rec(start: usize, n: usize, i: usize, chosen: &mut Vec<usize>, out: &mut Vec<Shuffle>) {
        if chosen.len() == i {
            let mut perm = chosen.clone();
            perm.extend((0..n).filter(|x| !chosen.contains(x)));
            out.push(Shuffle { perm, split: i });
            return;
        }
        for s in start..n {
            chosen.push(s);
            rec(s + 1, n, i, chosen, out);
            chosen.pop();
        }
    }
    rec(0, n, i, &mut chosen, &mut out);
    out
}

/// Sorts a tuple of basis indices into non-decreasing order and returns the
/// sign picked up on the way, or `None` when the tuple is forced to vanish
/// (a repeated entry whose self-swap sign is `-1`).
///
/// With `antisymmetric = false` adjacent swaps cost the Koszul sign; with
/// `antisymmetric = true` they cost `-(Koszul sign)`.
pub fn sort_graded(items: &[usize], is_odd: impl Fn(usize) -> bool, antisymmetric: bool) -> Option<(Vec<usize>, i32)> {
    let swap_sign = |a: usize, b: usize| {
        let k = if is_odd(a) && is_odd(b) { -1 } else { 1 };
        if antisymmetric {
            -k
        } else {
            k
        }
    };
    let mut v = items.to_vec();
    let mut sign = 1;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            sign *= swap_sign(v[j - 1], v[j]);
            v.swap(j - 1, j);
            j -= 1;
        }
    }
    for w in v.windows(2) {
        if w[0] == w[1] && swap_sign(w[0], w[1]) == -1 {
            return None;
        }
    }
    Some((v, sign))
}

/// Non-decreasing `k`-tuples over `0..n`; an index may repeat only when
/// `may_repeat` allows it.
pub fn sorted_tuples(n: usize, k: usize, may_repeat: impl Fn(usize) -> bool) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, may_repeat: &dyn Fn(usize) -> bool, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if cur.last() == Some(&i) && !may_repeat(i) {
                continue;
            }
            cur.push(i);
            rec(n, k, i, cur, may_repeat, out);
            cur.pop();
        }
    }
    rec(n, k, 0, &mut cur, &may_repeat, &mut out);
    out
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).unwrap();
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }
    out
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn koszul_examples() {
        assert_eq!(koszul_sign(&[1, 0], &[3, 3]).unwrap(), -1);
        assert_eq!(koszul_sign(&[0, 1, 2], &[1, 3, 5]).unwrap(), 1);
        assert_eq!(koszul_sign(&[1, 0], &[2, 5]).unwrap(), 1);
        assert!(koszul_sign(&[1, 0], &[2]).is_err());
        assert!(koszul_sign(&[0, 0], &[2, 2]).is_err());
    }

    #[test]
    fn koszul_is_multiplicative() {
        // Applying tau and then sigma to the tau-permuted symbols equals the
        // composite, for every pair of permutations of up to 4 symbols.
        for n in 0..=4 {
            let perms = permutations(n);
            let mut degree_lists = vec![vec![]];
            for _ in 0..n {
                degree_lists = degree_lists
                    .into_iter()
                    .flat_map(|d: Vec<i32>| {
                        (1..=3).map(move |x| {
                            let mut e = d.clone();
                            e.push(x);
                            e
                        })
                    })
                    .collect();
            }
            for degs in &degree_lists {
                for tau in &perms {
                    let tau_degs: Vec<i32> = tau.iter().map(|&i| degs[i]).collect();
                    for sigma in &perms {
                        let composite: Vec<usize> = sigma.iter().map(|&s| tau[s]).collect();
                        let stepwise = koszul_sign(tau, degs).unwrap() * koszul_sign(sigma, &tau_degs).unwrap();
                        assert_eq!(koszul_sign(&composite, degs).unwrap(), stepwise);
                    }
                }
            }
        }
    }

    #[test]
    fn shuffle_counts() {
        assert_eq!(shuffles(1, 1).len(), 2);
        let s21 = shuffles(2, 1);
        assert_eq!(s21.len(), 3);
        let perms: Vec<Vec<usize>> = s21.iter().map(|s| s.perm.clone()).collect();
        assert_eq!(perms, vec![vec![0, 1, 2], vec![0, 2, 1], vec![1, 2, 0]]);
        let s04 = shuffles(0, 4);
        assert_eq!(s04.len(), 1);
        assert_eq!(s04[0].perm, vec![0, 1, 2, 3]);
        for n in 0..=6 {
            for i in 0..=n {
                let all = shuffles(i, n - i);
                assert_eq!(all.len(), binomial(n, i));
                for s in &all {
                    assert!(s.perm[..i].windows(2).all(|w| w[0] < w[1]));
                    assert!(s.perm[i..].windows(2).all(|w| w[0] < w[1]));
                }
            }
        }
    }

    #[test]
    fn suspension() {
        let v = GradedVectorSpace::new([("x", 3), ("y", 5), ("z", 7)]).unwrap();
        let l = v.suspend(-1);
        let degs: Vec<(String, i32)> = l.basis().iter().map(|b| (b.label.clone(), b.degree)).collect();
        assert_eq!(degs, vec![("x".into(), 2), ("y".into(), 4), ("z".into(), 6)]);
        assert_eq!(v.suspend(0), v);
        assert_eq!(v.suspend(-1).suspend(1), v);
    }

    #[test]
    fn basis_order_and_duplicates() {
        let v = GradedVectorSpace::new([("b", 2), ("a", 2), ("c", -1)]).unwrap();
        let labels: Vec<&str> = (0..3).map(|i| v.label(i)).collect();
        assert_eq!(labels, vec!["c", "a", "b"]);
        assert!(GradedVectorSpace::new([("a", 1), ("a", 2)]).is_err());
    }

    #[test]
    fn graded_sorting() {
        // two odd symbols swap with -1 under Koszul
        assert_eq!(sort_graded(&[1, 0], |_| true, false), Some((vec![0, 1], -1)));
        // repeated odd symbol vanishes in the symmetric setting
        assert_eq!(sort_graded(&[0, 0], |_| true, false), None);
        // repeated even symbol vanishes in the antisymmetric setting
        assert_eq!(sort_graded(&[0, 0], |_| false, true), None);
        assert_eq!(sort_graded(&[0, 0], |_| true, true), Some((vec![0, 0], 1)));
    }

    #[test]
    fn element_arithmetic() {
        use crate::qlinalg::int;
        let mut e = Element::term(0, int(2));
        e.add_term(0, int(-2));
        assert!(e.is_zero());
        let a = Element::from_dense(&[int(1), int(0), int(-3)]);
        assert_eq!(a.len(), 2);
        assert_eq!(a.format_with(|i| format!("v{i}")), "v0 - 3*v2");
    }
}
