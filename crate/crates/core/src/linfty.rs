//! L∞-algebras with sparse bracket tables.
//!
//! Brackets follow the homological convention: `ℓ_k` has degree `k − 2`,
//! is graded antisymmetric, and the generalized Jacobi identity reads
//!
//! ```text
//! Σ_{i+j=n+1} Σ_{σ ∈ Sh(i,n−i)} sgn(σ) ε(σ) (−1)^{i(j−1)} ℓ_j(ℓ_i(x_σ(1..i)), x_σ(i+1..n)) = 0.
//! ```
//!
//! Values are stored only on non-decreasing basis tuples; every other
//! ordering is recovered with the antisymmetric Koszul sign.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use crate::cdga::{is_minimal, FiniteCdga, Monomial, Polynomial, SullivanAlgebra};
use crate::error::{Error, Result};
use crate::graded::{shuffles, sort_graded, sorted_tuples, Element, GradedVectorSpace};
use crate::qlinalg::{factorial, int, Rational};

/// One stored bracket value, labelled for reports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BracketTerm {
    pub inputs: Vec<String>,
    pub output: Element,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LInfinityAlgebra {
    space: GradedVectorSpace,
    brackets: BTreeMap<usize, BTreeMap<Vec<usize>, Element>>,
    arity_bound: usize,
    bound_is_exact: bool,
}

impl LInfinityAlgebra {
    /// Builds an algebra from bracket values on arbitrary basis tuples.
    /// Tuples are normalized to non-decreasing order; giving two orderings
    /// of the same tuple with inconsistent values is an error.
    ///
    /// The degree law is not enforced here so that corrupted tables can be
    /// audited; [`check_jacobi`] reports violations.
    pub fn new(space: GradedVectorSpace, entries: impl IntoIterator<Item = (Vec<usize>, Element)>) -> Result<Self> {
        let mut brackets: BTreeMap<usize, BTreeMap<Vec<usize>, Element>> = BTreeMap::new();
        for (tuple, value) in entries {
            if tuple.is_empty() {
                return Err(Error::input("brackets of arity 0 are not supported"));
            }
            if let Some(&bad) = tuple.iter().chain(value.support().collect::<Vec<_>>().iter()).find(|&&i| i >= space.dim()) {
                return Err(Error::input(format!("basis index {bad} out of range")));
            }
            if value.is_zero() {
                continue;
            }
            let Some((sorted, sign)) = sort_graded(&tuple, |i| space.is_odd(i), true) else {
                return Err(Error::input(format!(
                    "bracket on ({}) must vanish by graded antisymmetry",
                    label_tuple(&space, &tuple)
                )));
            };
            let value = value.scaled(&int(sign as i64));
            let table = brackets.entry(sorted.len()).or_default();
            if let Some(old) = table.get(&sorted) {
                if *old != value {
                    return Err(Error::input(format!(
                        "conflicting values for the bracket on ({})",
                        label_tuple(&space, &sorted)
                    )));
                }
            }
            table.insert(sorted, value);
        }
        brackets.retain(|_, t| !t.is_empty());
        let arity_bound = brackets.keys().max().copied().unwrap_or(0);
        Ok(LInfinityAlgebra {
            space,
            brackets,
            arity_bound,
            bound_is_exact: true,
        })
    }

    /// Builds an algebra from labels: `(inputs, [(output, coeff)])`.
    pub fn from_labels(space: GradedVectorSpace, entries: &[(&[&str], &[(&str, i64)])]) -> Result<Self> {
        let mut out = Vec::new();
        for (inputs, outputs) in entries {
            let tuple = inputs.iter().map(|l| space.require(l)).collect::<Result<Vec<_>>>()?;
            let mut value = Element::zero();
            for (l, c) in outputs.iter() {
                value.add_term(space.require(l)?, int(*c));
            }
            out.push((tuple, value));
        }
        Self::new(space, out)
    }

    pub fn abelian(space: GradedVectorSpace) -> Self {
        Self::new(space, []).expect("empty table is valid")
    }

    /// Declares brackets of arity above the stored ones as unknown (`exact =
    /// false`) or as zero (`exact = true`) up to `bound`.
    pub fn with_arity_bound(mut self, bound: usize, exact: bool) -> Self {
        self.arity_bound = bound.max(self.max_stored_arity());
        self.bound_is_exact = exact;
        self
    }

    pub fn space(&self) -> &GradedVectorSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Largest arity that may carry a nonzero bracket.
    pub fn arity_bound(&self) -> usize {
        self.arity_bound
    }

    /// True when every bracket above [`Self::arity_bound`] is known to vanish.
    pub fn bound_is_exact(&self) -> bool {
        self.bound_is_exact
    }

    pub fn max_stored_arity(&self) -> usize {
        self.brackets.keys().max().copied().unwrap_or(0)
    }

    pub fn is_minimal(&self) -> bool {
        !self.brackets.contains_key(&1)
    }

    /// `(min, max)` degree of the underlying space.
    pub fn degree_window(&self) -> Option<(i32, i32)> {
        Some((self.space.min_degree()?, self.space.max_degree()?))
    }

    /// Stored values of arity `k`, keyed by non-decreasing tuples.
    pub fn table(&self, k: usize) -> Option<&BTreeMap<Vec<usize>, Element>> {
        self.brackets.get(&k)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &Element)> + '_ {
        self.brackets.values().flat_map(|t| t.iter())
    }

    pub fn bracket_terms(&self) -> Vec<BracketTerm> {
        self.entries()
            .map(|(t, v)| BracketTerm {
                inputs: t.iter().map(|&i| self.space.label(i).to_string()).collect(),
                output: v.clone(),
            })
            .collect()
    }

    fn check_arity(&self, k: usize) -> Result<bool> {
        if k == 0 {
            return Err(Error::input("bracket arity must be at least 1"));
        }
        if k > self.arity_bound {
            if self.bound_is_exact {
                return Ok(false);
            }
            return Err(Error::input(format!(
                "arity {k} exceeds the arity bound {} of this algebra",
                self.arity_bound
            )));
        }
        Ok(true)
    }

    /// `ℓ_k` on a tuple of basis indices in any order.
    pub fn bracket_basis(&self, tuple: &[usize]) -> Result<Element> {
        if !self.check_arity(tuple.len())? {
            return Ok(Element::zero());
        }
        Ok(self.lookup(tuple))
    }

    fn lookup(&self, tuple: &[usize]) -> Element {
        let Some(table) = self.brackets.get(&tuple.len()) else {
            return Element::zero();
        };
        let Some((sorted, sign)) = sort_graded(tuple, |i| self.space.is_odd(i), true) else {
            return Element::zero();
        };
        match table.get(&sorted) {
            Some(v) if sign == 1 => v.clone(),
            Some(v) => v.neg(),
            None => Element::zero(),
        }
    }

    /// Multilinear extension of `ℓ_k` to arbitrary elements.
    pub fn bracket_eval(&self, args: &[Element]) -> Result<Element> {
        if !self.check_arity(args.len())? {
            return Ok(Element::zero());
        }
        Ok(self.eval_unchecked(args))
    }

    fn eval_unchecked(&self, args: &[Element]) -> Element {
        let mut out = Element::zero();
        if args.iter().any(Element::is_zero) || !self.brackets.contains_key(&args.len()) {
            return out;
        }
        let mut idx = Vec::with_capacity(args.len());
        fn rec(l: &LInfinityAlgebra, args: &[Element], idx: &mut Vec<usize>, coef: Rational, out: &mut Element) {
            if idx.len() == args.len() {
                let v = l.lookup(idx);
                if !v.is_zero() {
                    out.add_scaled(&v, &coef);
                }
                return;
            }
            for (i, c) in args[idx.len()].terms() {
                idx.push(i);
                rec(l, args, idx, &coef * c, out);
                idx.pop();
            }
        }
        rec(self, args, &mut idx, Rational::one(), &mut out);
        out
    }

    /// `ℓ₁` applied to an element (zero for minimal algebras).
    pub fn differential(&self, x: &Element) -> Element {
        self.eval_unchecked(std::slice::from_ref(x))
    }

    /// Stored entries whose output is not homogeneous of degree
    /// `Σ inputs + k − 2`.
    pub fn degree_violations(&self) -> Vec<BracketTerm> {
        let mut out = Vec::new();
        for (t, v) in self.entries() {
            let want = t.iter().map(|&i| self.space.degree(i)).sum::<i32>() + t.len() as i32 - 2;
            if v.support().any(|o| self.space.degree(o) != want) {
                out.push(BracketTerm {
                    inputs: t.iter().map(|&i| self.space.label(i).to_string()).collect(),
                    output: v.clone(),
                });
            }
        }
        out
    }

    /// The sub-algebra spanned by `vectors` (given in ambient coordinates),
    /// with new basis labels and degrees. Every bracket of basis vectors must
    /// land back in the span.
    pub fn restrict(&self, labelled: Vec<(String, i32, Element)>) -> Result<(LInfinityAlgebra, Vec<Element>)> {
        let space = GradedVectorSpace::new(labelled.iter().map(|(l, d, _)| (l.clone(), *d)))?;
        let mut vectors = vec![Element::zero(); space.dim()];
        for (l, _, v) in labelled {
            vectors[space.require(&l)?] = v;
        }
        let coords = Coordinates::new(&vectors, self.dim())?;
        let mut entries = Vec::new();
        for k in 1..=self.arity_bound.max(1) {
            if !self.brackets.contains_key(&k) {
                continue;
            }
            for t in sorted_tuples(space.dim(), k, |i| space.is_odd(i)) {
                let args: Vec<Element> = t.iter().map(|&i| vectors[i].clone()).collect();
                let v = self.eval_unchecked(&args);
                if v.is_zero() {
                    continue;
                }
                let c = coords.solve(&v).ok_or_else(|| {
                    Error::internal(format!("bracket on ({}) leaves the subspace", label_tuple(&space, &t)))
                })?;
                entries.push((t, c));
            }
        }
        let sub = LInfinityAlgebra::new(space, entries)?.with_arity_bound(self.arity_bound, self.bound_is_exact);
        Ok((sub, vectors))
    }
}

/// Expresses ambient vectors in the coordinates of a fixed independent family.
pub(crate) struct Coordinates {
    rows: usize,
    matrix: crate::qlinalg::RationalMatrix,
}

impl Coordinates {
    pub(crate) fn new(vectors: &[Element], ambient: usize) -> Result<Self> {
        let cols: Vec<Vec<Rational>> = vectors.iter().map(|v| v.to_dense(ambient)).collect();
        let matrix = crate::qlinalg::RationalMatrix::from_columns(ambient, &cols);
        if matrix.rank() != vectors.len() {
            return Err(Error::internal("subspace basis is not linearly independent"));
        }
        Ok(Coordinates { rows: ambient, matrix })
    }

    pub(crate) fn solve(&self, v: &Element) -> Option<Element> {
        if self.matrix.cols() == 0 {
            return v.is_zero().then(Element::zero);
        }
        let sol = self.matrix.solve(&v.to_dense(self.rows)).ok()??;
        Some(Element::from_dense(&sol))
    }
}

pub(crate) fn label_tuple(space: &GradedVectorSpace, t: &[usize]) -> String {
    t.iter().map(|&i| space.label(i)).collect::<Vec<_>>().join(", ")
}

/// Sign relating antisymmetric brackets to the symmetric brackets on the
/// suspension: `λ_k(sx₁,…,sx_k) = sign · s ℓ_k(x₁,…,x_k)`, with
/// `sign = (−1)^{k(k−1)/2 + Σ_i (k−i)|x_i|}`.
pub fn shift_sign(degrees: &[i32]) -> i32 {
    let k = degrees.len() as i64;
    let mut e = k * (k - 1) / 2;
    for (p, &d) in degrees.iter().enumerate() {
        e += (k - 1 - p as i64) * d as i64;
    }
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// The symmetric degree −1 brackets `λ_k` on the suspension, evaluated on an
/// ordered basis tuple (shares basis indices with the unshifted algebra).
pub fn shifted_bracket(l: &LInfinityAlgebra, tuple: &[usize]) -> Element {
    let v = l.lookup(tuple);
    if v.is_zero() {
        return v;
    }
    let degrees: Vec<i32> = tuple.iter().map(|&i| l.space.degree(i)).collect();
    if shift_sign(&degrees) == 1 {
        v
    } else {
        v.neg()
    }
}

/// The Jacobi sum of the symmetric brackets `λ` on one ordered tuple:
/// `Σ_{i+j=n+1} Σ_{σ ∈ Sh(i,n−i)} ε(σ) λ_j(λ_i(…), …)` with Koszul signs
/// taken in the shifted degrees.
pub fn symmetric_jacobi_residual(l: &LInfinityAlgebra, tuple: &[usize]) -> Element {
    let n = tuple.len();
    let shifted: Vec<i32> = tuple.iter().map(|&i| l.space.degree(i) + 1).collect();
    let mut total = Element::zero();
    for i in 1..=n {
        let j = n + 1 - i;
        if !l.brackets.contains_key(&i) || !l.brackets.contains_key(&j) {
            continue;
        }
        for sh in shuffles(i, n - i) {
            let inner_args: Vec<usize> = sh.perm[..i].iter().map(|&p| tuple[p]).collect();
            let inner = shifted_bracket(l, &inner_args);
            let rest: Vec<usize> = sh.perm[i..].iter().map(|&p| tuple[p]).collect();
            let mut v = Element::zero();
            for (b, c) in inner.terms() {
                let mut args = vec![b];
                args.extend_from_slice(&rest);
                v.add_scaled(&shifted_bracket(l, &args), c);
            }
            let s = sh.koszul(&shifted).expect("shuffle is a permutation");
            total.add_scaled(&v, &int(s as i64));
        }
    }
    total
}

/// Outcome of a Jacobi audit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JacobiReport {
    /// Highest arity actually checked.
    pub checked_up_to: usize,
    pub tuples_checked: usize,
    pub violations: Vec<JacobiViolation>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JacobiViolation {
    pub kind: ViolationKind,
    pub inputs: Vec<String>,
    pub residual: Element,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    /// A stored bracket has an output of the wrong degree.
    Degree,
    /// The generalized Jacobi sum is nonzero on this tuple.
    Jacobi,
}

impl JacobiReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// The generalized Jacobi sum on one ordered tuple of basis indices.
pub fn jacobi_residual(l: &LInfinityAlgebra, tuple: &[usize]) -> Element {
    let n = tuple.len();
    let degrees: Vec<i32> = tuple.iter().map(|&i| l.space.degree(i)).collect();
    let mut total = Element::zero();
    for i in 1..=n {
        let j = n + 1 - i;
        if !l.brackets.contains_key(&i) || !l.brackets.contains_key(&j) {
            continue;
        }
        let outer_sign = if (i * (j - 1)) % 2 == 0 { 1 } else { -1 };
        for sh in shuffles(i, n - i) {
            let inner_args: Vec<usize> = sh.perm[..i].iter().map(|&p| tuple[p]).collect();
            let inner = l.lookup(&inner_args);
            if inner.is_zero() {
                continue;
            }
            let mut args = vec![inner];
            args.extend(sh.perm[i..].iter().map(|&p| Element::basis(tuple[p])));
            let v = l.eval_unchecked(&args);
            if v.is_zero() {
                continue;
            }
            let s = sh.antisymmetric(&degrees).expect("shuffle is a permutation") * outer_sign;
            total.add_scaled(&v, &int(s as i64));
        }
    }
    total
}

/// Checks the degree law of every stored bracket and the generalized Jacobi
/// identity on all basis `n`-tuples, `n ≤ max_arity`.
///
/// For algebras whose bound is not exact the check stops at the bound.
pub fn check_jacobi(l: &LInfinityAlgebra, max_arity: usize) -> JacobiReport {
    let mut violations: Vec<JacobiViolation> = l
        .degree_violations()
        .into_iter()
        .map(|b| JacobiViolation {
            kind: ViolationKind::Degree,
            inputs: b.inputs,
            residual: b.output,
        })
        .collect();
    let top = if l.bound_is_exact { max_arity } else { max_arity.min(l.arity_bound) };
    let present: BTreeSet<i32> = l.space.degrees();
    let mut tuples_checked = 0;
    for n in 1..=top {
        for t in sorted_tuples(l.dim(), n, |i| l.space.is_odd(i)) {
            tuples_checked += 1;
            let out_degree = t.iter().map(|&i| l.space.degree(i)).sum::<i32>() + n as i32 - 3;
            if !present.contains(&out_degree) && violations.is_empty() {
                continue;
            }
            let r = jacobi_residual(l, &t);
            if !r.is_zero() {
                violations.push(JacobiViolation {
                    kind: ViolationKind::Jacobi,
                    inputs: t.iter().map(|&i| l.space.label(i).to_string()).collect(),
                    residual: r,
                });
            }
        }
    }
    JacobiReport {
        checked_up_to: top,
        tuples_checked,
        violations,
    }
}

/// Sign `ε` of the tensor-model bracket on `(h₁⊗x₁, …, h_k⊗x_k)`:
/// `(−1)^{Σ_{i<j} |x_i||h_j| + (k−2) Σ |h_i|}`.
pub fn tensor_sign(h_degrees: &[i32], x_degrees: &[i32]) -> i32 {
    let k = h_degrees.len();
    let mut e: i64 = 0;
    for j in 0..k {
        for i in 0..j {
            e += x_degrees[i] as i64 * h_degrees[j] as i64;
        }
    }
    e += (k as i64 - 2) * h_degrees.iter().map(|&d| d as i64).sum::<i64>();
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// The tensor model `A ⊗ L`.
///
/// Basis `h@l` in degree `|l| − |h|`;
/// `ℓ₁(h⊗x) = d h⊗x + (−1)^{|h|} h⊗ℓ₁x` and for `k ≥ 2`
/// `ℓ_k(h₁⊗x₁,…,h_k⊗x_k) = ε · (h₁⋯h_k)⊗ℓ_k(x₁,…,x_k)` with `ε` from
/// [`tensor_sign`].
pub fn tensor_model(a: &FiniteCdga, l: &LInfinityAlgebra) -> Result<LInfinityAlgebra> {
    let (asp, lsp) = (a.space(), l.space());
    let pair_label = |h: usize, x: usize| format!("{}@{}", asp.label(h), lsp.label(x));
    let space = GradedVectorSpace::new(
        (0..asp.dim()).flat_map(|h| (0..lsp.dim()).map(move |x| (h, x))).map(|(h, x)| (pair_label(h, x), lsp.degree(x) - asp.degree(h))),
    )?;
    let mut index = vec![vec![0usize; lsp.dim()]; asp.dim()];
    let mut parts = vec![(0usize, 0usize); space.dim()];
    for h in 0..asp.dim() {
        for x in 0..lsp.dim() {
            let i = space.require(&pair_label(h, x))?;
            index[h][x] = i;
            parts[i] = (h, x);
        }
    }
    let embed = |hs: &Element, xs: &Element| -> Element {
        let mut out = Element::zero();
        for (h, c) in hs.terms() {
            for (x, e) in xs.terms() {
                out.add_term(index[h][x], c * e);
            }
        }
        out
    };
    let mut entries: Vec<(Vec<usize>, Element)> = Vec::new();
    for i in 0..space.dim() {
        let (h, x) = parts[i];
        let mut v = embed(a.d_basis(h), &Element::basis(x));
        let dx = l.differential(&Element::basis(x));
        let sign = if asp.is_odd(h) { -1 } else { 1 };
        v.add_scaled(&embed(&Element::basis(h), &dx), &int(sign));
        if !v.is_zero() {
            entries.push((vec![i], v));
        }
    }
    for k in 2..=l.max_stored_arity() {
        let Some(table) = l.table(k) else { continue };
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        for xs in table.keys() {
            // every ordered assignment of A-basis elements to the slots
            let mut hs = vec![0usize; k];
            loop {
                let tuple: Vec<usize> = (0..k).map(|p| index[hs[p]][xs[p]]).collect();
                if let Some((sorted, _)) = sort_graded(&tuple, |i| space.is_odd(i), true) {
                    seen.insert(sorted);
                }
                let mut p = 0;
                while p < k {
                    hs[p] += 1;
                    if hs[p] < asp.dim() {
                        break;
                    }
                    hs[p] = 0;
                    p += 1;
                }
                if p == k {
                    break;
                }
            }
        }
        for tuple in seen {
            let hs: Vec<usize> = tuple.iter().map(|&i| parts[i].0).collect();
            let xs: Vec<usize> = tuple.iter().map(|&i| parts[i].1).collect();
            let prod = a.mul_many(&hs);
            if prod.is_zero() {
                continue;
            }
            let lx = l.lookup(&xs);
            if lx.is_zero() {
                continue;
            }
            let hd: Vec<i32> = hs.iter().map(|&h| asp.degree(h)).collect();
            let xd: Vec<i32> = xs.iter().map(|&x| lsp.degree(x)).collect();
            let v = embed(&prod, &lx).scaled(&int(tensor_sign(&hd, &xd) as i64));
            if !v.is_zero() {
                entries.push((tuple, v));
            }
        }
    }
    Ok(LInfinityAlgebra::new(space, entries)?.with_arity_bound(l.arity_bound, l.bound_is_exact))
}

/// The label of `h⊗x` in a tensor model.
pub fn pair_label(h: &str, x: &str) -> String {
    format!("{h}@{x}")
}

/// Coefficient `f(t)` such that the Chevalley–Eilenberg differential
/// contains `f(t) · ℓ_k(x_t)_c · v^t` in `d v_c`, for a non-decreasing tuple
/// `t` of generator indices.
///
/// It comes from expanding the Maurer–Cartan equation of the universal
/// element `−Σ_b v_b⊗x_b`, so `d v_c` is the `x_c`-coefficient of
/// `Σ_k ((−1)^k / k!) ℓ_k(Ξ,…,Ξ)` with `Ξ = Σ_b v_b⊗x_b`.
fn ce_factor(t: &[usize], l_space: &GradedVectorSpace) -> Rational {
    let k = t.len();
    let x_deg = |i: usize| l_space.degree(i);
    let v_deg = |i: usize| l_space.degree(i) + 1;
    let mut total = Rational::zero();
    for ordering in distinct_orderings(t) {
        let Some((_, sv)) = sort_graded(&ordering, |i| v_deg(i).rem_euclid(2) == 1, false) else {
            continue;
        };
        let Some((_, sl)) = sort_graded(&ordering, |i| x_deg(i).rem_euclid(2) == 1, true) else {
            continue;
        };
        let hd: Vec<i32> = ordering.iter().map(|&i| v_deg(i)).collect();
        let xd: Vec<i32> = ordering.iter().map(|&i| x_deg(i)).collect();
        total += int((tensor_sign(&hd, &xd) * sv * sl) as i64);
    }
    let sign = if k % 2 == 0 { int(1) } else { int(-1) };
    total * sign / factorial(k)
}

/// All distinct orderings of a multiset given as a sorted tuple.
pub(crate) fn distinct_orderings(t: &[usize]) -> Vec<Vec<usize>> {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &x in t {
        *counts.entry(x).or_default() += 1;
    }
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(t.len());
    fn rec(counts: &mut BTreeMap<usize, usize>, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        let keys: Vec<usize> = counts.iter().filter(|(_, &c)| c > 0).map(|(&k, _)| k).collect();
        for key in keys {
            *counts.get_mut(&key).unwrap() -= 1;
            cur.push(key);
            rec(counts, n, cur, out);
            cur.pop();
            *counts.get_mut(&key).unwrap() += 1;
        }
    }
    rec(&mut counts, t.len(), &mut cur, &mut out);
    out
}

/// The minimal L∞-algebra on `s⁻¹V^#` dual to a minimal Sullivan algebra:
/// the generator `v` of degree `n` becomes the basis element `v` of degree
/// `n − 1`, and `ℓ_k` is read off the word-length `k` part of `d`.
pub fn ce_dual(s: &SullivanAlgebra) -> Result<LInfinityAlgebra> {
    if !is_minimal(s) {
        return Err(Error::input(
            "ce_dual needs a minimal Sullivan algebra (d has a linear part); reduce it to a minimal model first",
        ));
    }
    let gens = s.generators();
    let space = gens.suspend(-1);
    let mut entries: BTreeMap<Vec<usize>, Element> = BTreeMap::new();
    for c in 0..gens.dim() {
        for (m, coef) in s.d_generator(c).terms() {
            let f = ce_factor(m, &space);
            if f.is_zero() {
                return Err(Error::internal(format!(
                    "monomial {} has no dual bracket",
                    crate::cdga::Polynomial::monomial(m.clone(), Rational::one()).format(gens)
                )));
            }
            entries.entry(m.clone()).or_default().add_term(c, coef / f);
        }
    }
    let bound = s.max_word_length();
    Ok(LInfinityAlgebra::new(space, entries)?.with_arity_bound(bound, true))
}

/// The Chevalley–Eilenberg construction of a minimal L∞-algebra; the exact
/// inverse of [`ce_dual`].
pub fn ce_construct(l: &LInfinityAlgebra) -> Result<SullivanAlgebra> {
    ce_construct_named(l, "CE")
}

pub fn ce_construct_named(l: &LInfinityAlgebra, name: &str) -> Result<SullivanAlgebra> {
    if !l.is_minimal() {
        return Err(Error::input("ce_construct needs a minimal L∞-algebra (ℓ₁ = 0)"));
    }
    if !l.bound_is_exact {
        return Err(Error::input(
            "ce_construct needs every bracket to be known; the arity bound of this algebra is not exact",
        ));
    }
    let gens = l.space().suspend(1);
    let mut d = vec![Polynomial::zero(); gens.dim()];
    for (t, v) in l.entries() {
        let f = ce_factor(t, l.space());
        let m: Monomial = t.clone();
        for (c, coef) in v.terms() {
            d[c].add_term(m.clone(), coef * &f);
        }
    }
    SullivanAlgebra::new(name, gens, d)
}

/// A nonzero nested bracket `ℓ_j(ℓ_i(inner), outer)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nesting {
    pub inner: Vec<String>,
    pub outer: Vec<String>,
    pub value: Element,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VanishingReport {
    pub max_arity: usize,
    pub nestings_checked: usize,
    pub offending: Vec<Nesting>,
}

impl VanishingReport {
    pub fn passed(&self) -> bool {
        self.offending.is_empty()
    }
}

/// Evaluates every nested bracket `ℓ_j(ℓ_i(…), …)` with `i, j ≥ 2` and
/// `i + j − 1 ≤ max_arity` on basis tuples.
pub fn verify_two_stage_vanishing(l: &LInfinityAlgebra, max_arity: usize) -> VanishingReport {
    let sp = l.space();
    let mut offending = Vec::new();
    let mut nestings_checked = 0;
    for i in 2..max_arity {
        let Some(inner_table) = l.table(i) else { continue };
        for j in 2..=(max_arity + 1 - i) {
            if l.table(j).is_none() {
                continue;
            }
            let outers = sorted_tuples(l.dim(), j - 1, |x| sp.is_odd(x));
            for (inner, value) in inner_table {
                for outer in &outers {
                    nestings_checked += 1;
                    let mut args = vec![value.clone()];
                    args.extend(outer.iter().map(|&x| Element::basis(x)));
                    let v = l.eval_unchecked(&args);
                    if !v.is_zero() {
                        offending.push(Nesting {
                            inner: inner.iter().map(|&x| sp.label(x).to_string()).collect(),
                            outer: outer.iter().map(|&x| sp.label(x).to_string()).collect(),
                            value: v,
                        });
                    }
                }
            }
        }
    }
    VanishingReport {
        max_arity,
        nestings_checked,
        offending,
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::cdga::finite::tests::{contractible, wedge};
    use crate::cdga::sullivan::tests::model_y;
    use crate::cdga::two_stage_split;

    pub fn target_lie() -> LInfinityAlgebra {
        ce_dual(&model_y()).unwrap()
    }

    fn e(sp: &GradedVectorSpace, terms: &[(&str, i64)]) -> Element {
        terms.iter().map(|&(l, c)| (sp.index_of(l).unwrap(), int(c))).collect()
    }

    #[test]
    fn ce_dual_of_example_model() {
        let l = target_lie();
        let sp = l.space();
        assert_eq!(
            sp.basis().iter().map(|b| (b.label.as_str(), b.degree)).collect::<Vec<_>>(),
            vec![("x", 2), ("y", 4), ("z", 6)]
        );
        assert!(l.is_minimal());
        assert_eq!(l.entries().count(), 1);
        let xy = l.bracket_eval(&[e(sp, &[("x", 1)]), e(sp, &[("y", 1)])]).unwrap();
        assert_eq!(xy, e(sp, &[("z", 1)]));
        let yx = l.bracket_eval(&[e(sp, &[("y", 1)]), e(sp, &[("x", 1)])]).unwrap();
        assert_eq!(yx, e(sp, &[("z", -1)]));
        let xx = l.bracket_eval(&[e(sp, &[("x", 1)]), e(sp, &[("x", 1)])]).unwrap();
        assert!(xx.is_zero());
    }

    #[test]
    fn ce_dual_of_odd_sphere_is_abelian() {
        let s = SullivanAlgebra::from_terms(&[("x", 3)], &[]).unwrap();
        let l = ce_dual(&s).unwrap();
        assert_eq!(l.space().degree(0), 2);
        assert_eq!(l.entries().count(), 0);
    }

    /// Expands `Σ_k ((−1)^k/k!) ℓ_k(Ξ,…,Ξ)` for `ℓ₂(a,a) = c·b` by hand:
    /// the only ordering is `(a, a)`, `ε = (−1)^{3·4} = 1`, `v_a v_a` keeps
    /// its sign (even generator), `ℓ₂(a,a)` needs no reordering. So
    /// `d v_b = (1/2)·c·v_a²`, hence `c = 2` for `d e₇ = e₄²`.
    #[test]
    fn ce_dual_even_square() {
        let s = SullivanAlgebra::from_terms(&[("e4", 4), ("e7", 7)], &[("e7", &[(&["e4", "e4"], 1)])]).unwrap();
        let l = ce_dual(&s).unwrap();
        let sp = l.space();
        let a = sp.index_of("e4").unwrap();
        let out = l.bracket_basis(&[a, a]).unwrap();
        assert_eq!(out, e(sp, &[("e7", 2)]));
        assert!(check_jacobi(&l, 3).passed());
        assert_eq!(ce_construct(&l).unwrap().d_generator(1), s.d_generator(1));
    }

    #[test]
    fn ce_round_trips() {
        for s in [
            model_y(),
            SullivanAlgebra::from_terms(&[("e4", 4), ("e7", 7)], &[("e7", &[(&["e4", "e4"], 1)])]).unwrap(),
            SullivanAlgebra::from_terms(
                &[("a", 2), ("b", 2), ("c", 3), ("w", 5)],
                &[("c", &[(&["a", "b"], 2)]), ("w", &[(&["a", "a", "b"], 3), (&["a", "c"], 0)])],
            )
            .unwrap(),
            SullivanAlgebra::from_terms(
                &[("a", 3), ("b", 3), ("c", 5), ("w", 10)],
                &[("c", &[(&["a", "b"], 1)]), ("w", &[(&["a", "b", "c"], 5)])],
            )
            .unwrap(),
        ] {
            let l = ce_dual(&s).unwrap();
            assert!(check_jacobi(&l, 4).passed(), "{:?}", check_jacobi(&l, 4));
            let back = ce_construct(&l).unwrap();
            assert_eq!(back.generators(), s.generators());
            for g in 0..s.generators().dim() {
                assert_eq!(back.d_generator(g), s.d_generator(g));
            }
        }
    }

    #[test]
    fn ce_construct_on_abelian_line() {
        let l = LInfinityAlgebra::abelian(GradedVectorSpace::new([("a", 1)]).unwrap());
        let s = ce_construct(&l).unwrap();
        assert_eq!(s.generators().degree(0), 2);
        assert!(s.d_generator(0).is_zero());
    }

    #[test]
    fn ce_dual_rejects_non_minimal() {
        let s = SullivanAlgebra::from_terms(&[("u", 2), ("v", 1)], &[("v", &[(&["u"], 1)])]);
        // |v| = 1 and dv = u has degree 2: a linear part
        let s = s.unwrap();
        assert!(matches!(ce_dual(&s), Err(Error::Input(_))));
    }

    #[test]
    fn corrupted_degree_is_named() {
        let sp = GradedVectorSpace::new([("a", 1), ("b", 1), ("c", 5)]).unwrap();
        let l = LInfinityAlgebra::from_labels(sp, &[(&["a", "b"], &[("c", 1)])]).unwrap();
        let r = check_jacobi(&l, 3);
        assert!(!r.passed());
        assert_eq!(r.violations[0].kind, ViolationKind::Degree);
        assert_eq!(r.violations[0].inputs, vec!["a", "b"]);
    }

    #[test]
    fn abelian_passes() {
        let sp = GradedVectorSpace::new([("a", 1), ("b", 2), ("c", -1)]).unwrap();
        assert!(check_jacobi(&LInfinityAlgebra::abelian(sp), 4).passed());
    }

    #[test]
    fn broken_jacobi_is_detected() {
        // [a,[a,a]] ≠ 0 for odd a violates the binary Jacobi identity
        let sp = GradedVectorSpace::new([("x", 1), ("y", 2), ("w", 3)]).unwrap();
        let l = LInfinityAlgebra::from_labels(sp, &[(&["x", "x"], &[("y", 1)]), (&["x", "y"], &[("w", 1)])]).unwrap();
        let r = check_jacobi(&l, 3);
        assert!(r.violations.iter().any(|v| v.kind == ViolationKind::Jacobi && v.inputs == ["x", "x", "x"]));
        let v = verify_two_stage_vanishing(&l, 3);
        assert!(!v.passed());
        assert_eq!(v.offending[0].inner, vec!["x", "x"]);
        assert_eq!(v.offending[0].outer, vec!["x"]);
    }

    #[test]
    fn example_models_have_vanishing_nestings() {
        assert!(verify_two_stage_vanishing(&target_lie(), 4).passed());
        let sp = GradedVectorSpace::new([("a", 2)]).unwrap();
        assert!(verify_two_stage_vanishing(&LInfinityAlgebra::abelian(sp), 4).passed());
    }

    #[test]
    fn two_stage_dual_shape() {
        let s = SullivanAlgebra::from_terms(
            &[("a", 3), ("b", 3), ("c", 5), ("w", 10), ("u", 7)],
            &[("w", &[(&["a", "b", "c"], 1)]), ("u", &[(&["a", "c"], 1)])],
        )
        .unwrap();
        let (p, q) = two_stage_split(&s).unwrap();
        let l = ce_dual(&s).unwrap();
        for (t, v) in l.entries() {
            assert!(t.iter().all(|x| p.contains(x)));
            assert!(v.support().all(|o| q.contains(&o)));
        }
        assert!(verify_two_stage_vanishing(&l, 4).passed());
    }

    #[test]
    fn arity_beyond_bound() {
        let l = target_lie();
        let x = Element::basis(0);
        assert!(l.bracket_eval(&[x.clone(), x.clone(), x.clone()]).unwrap().is_zero());
        let l = l.with_arity_bound(2, false);
        assert!(matches!(l.bracket_eval(&[x.clone(), x.clone(), x]), Err(Error::Input(_))));
    }

    #[test]
    fn tensor_with_point_is_the_same_algebra() {
        let l = target_lie();
        let t = tensor_model(&FiniteCdga::point(), &l).unwrap();
        assert_eq!(t.dim(), 3);
        let one_x = t.space().index_of("1@x").unwrap();
        let one_y = t.space().index_of("1@y").unwrap();
        let one_z = t.space().index_of("1@z").unwrap();
        assert_eq!(t.bracket_basis(&[one_x, one_y]).unwrap(), Element::basis(one_z));
    }

    #[test]
    fn tensor_model_of_example() {
        let t = tensor_model(&wedge(), &target_lie()).unwrap();
        assert_eq!(
            t.space().dims_by_degree(),
            BTreeMap::from([(-3, 1), (-1, 1), (0, 2), (1, 1), (2, 3), (4, 3), (6, 1)])
        );
        // the listing in nonnegative degrees; e5@x (−3) and e5@y (−1) add two more
        let nonneg = |l: &String| t.space().degree(t.space().index_of(l).unwrap()) >= 0;
        let (mut got, negative): (Vec<(Vec<String>, String)>, Vec<_>) = t
            .bracket_terms()
            .into_iter()
            .map(|b| (b.inputs, t.space().format(&b.output)))
            .partition(|(inputs, _)| inputs.iter().all(nonneg));
        assert_eq!(
            negative,
            vec![
                (vec!["e5@x".to_string(), "1@y".to_string()], "e5@z".to_string()),
                (vec!["e5@y".to_string(), "1@x".to_string()], "-e5@z".to_string()),
            ]
        );
        got.sort();
        let want: Vec<(Vec<String>, String)> = vec![
            (vec!["e2@x", "1@y"], "e2@z"),
            (vec!["e2p@x", "1@y"], "e2p@z"),
            (vec!["1@x", "e2@y"], "e2@z"),
            (vec!["1@x", "e2p@y"], "e2p@z"),
            (vec!["1@x", "1@y"], "1@z"),
        ]
        .into_iter()
        .map(|(i, o)| (i.into_iter().map(String::from).collect(), o.to_string()))
        .collect::<Vec<_>>();
        let mut want_sorted: Vec<(Vec<String>, String)> = Vec::new();
        for (inputs, out) in want {
            let idx: Vec<usize> = inputs.iter().map(|l| t.space().index_of(l).unwrap()).collect();
            let (sorted, _) = sort_graded(&idx, |i| t.space().is_odd(i), true).unwrap();
            let value = t.bracket_basis(&sorted).unwrap();
            assert!(!value.is_zero(), "missing bracket on {inputs:?}");
            let plain = t.bracket_basis(&idx).unwrap();
            assert_eq!(t.space().format(&plain), out, "sign of [{inputs:?}]");
            want_sorted.push((
                sorted.iter().map(|&i| t.space().label(i).to_string()).collect(),
                t.space().format(&value),
            ));
        }
        want_sorted.sort();
        assert_eq!(got, want_sorted);
        assert!(check_jacobi(&t, 4).passed());
    }

    #[test]
    fn tensor_with_contractible_gives_linear_part() {
        let l = LInfinityAlgebra::abelian(GradedVectorSpace::new([("l", 3)]).unwrap());
        let t = tensor_model(&contractible(), &l).unwrap();
        let b = t.space().index_of("b@l").unwrap();
        let db = t.space().index_of("db@l").unwrap();
        assert_eq!(t.differential(&Element::basis(b)), Element::basis(db));
        assert_eq!(t.max_stored_arity(), 1);
        assert!(check_jacobi(&t, 3).passed());
    }

    fn ell3_model() -> SullivanAlgebra {
        SullivanAlgebra::from_terms(
            &[("a", 2), ("b", 2), ("c", 3), ("w", 5)],
            &[("c", &[(&["a", "b"], 2)]), ("w", &[(&["a", "a", "b"], 3)])],
        )
        .unwrap()
    }

    fn sample_cdga() -> FiniteCdga {
        SullivanAlgebra::from_terms(&[("p", 2), ("q", 3)], &[("q", &[(&["p", "p"], 1)])])
            .unwrap()
            .truncate(6)
            .unwrap()
    }

    #[test]
    fn tensor_jacobi_with_differential_and_ternary_bracket() {
        let a = sample_cdga();
        assert!(!a.has_zero_differential());
        let l = ce_dual(&ell3_model()).unwrap();
        assert_eq!(l.max_stored_arity(), 3);
        let t = tensor_model(&a, &l).unwrap();
        assert!(!t.is_minimal());
        let r = check_jacobi(&t, 4);
        assert!(r.passed(), "{:?}", &r.violations[..r.violations.len().min(3)]);
    }

    #[test]
    fn shifted_brackets_satisfy_symmetric_jacobi() {
        let t = tensor_model(&sample_cdga(), &ce_dual(&ell3_model()).unwrap()).unwrap();
        for n in 1..=4 {
            for tuple in sorted_tuples(t.dim(), n, |_| true) {
                assert!(symmetric_jacobi_residual(&t, &tuple).is_zero(), "{tuple:?}");
            }
        }
    }

    #[test]
    fn shift_sign_small_cases() {
        assert_eq!(shift_sign(&[5]), 1);
        assert_eq!(shift_sign(&[0, 0]), -1);
        assert_eq!(shift_sign(&[1, 0]), 1);
        assert_eq!(shift_sign(&[0, 0, 0]), -1);
    }
}
