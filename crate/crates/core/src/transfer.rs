//! Homotopy transfer of L∞-structures along a deformation retract.
//!
//! The transferred brackets are `ℓ′_k = Σ_T ℓ_T / |Aut(T)|`, summed over
//! isomorphism classes of rooted trees with `k` leaves and internal vertices
//! of arity at least 2. Leaves carry `i`, internal edges carry the homotopy
//! and the root carries `q`.
//!
//! Evaluation happens on the suspension, where the brackets are symmetric
//! of degree −1 and only plain Koszul signs appear. With the homotopy
//! normalized by `id − i∘q = ℓ₁K + Kℓ₁` and the suspension sign of
//! [`shift_sign`], internal edges carry `K` itself; the opposite choice
//! breaks the Jacobi identity as soon as a corolla and a binary tree
//! contribute to the same bracket (see the tests).

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_traits::One;

use crate::cdga::ChainRetract;
use crate::error::{Error, Result};
use crate::graded::{koszul_sign, permutations, sorted_tuples, Element, GradedVectorSpace};
use crate::linfty::{shift_sign, shifted_bracket, LInfinityAlgebra};
use crate::qlinalg::{int, Rational};

/// A rooted tree up to isomorphism: children are kept in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RootedTree {
    Leaf,
    Node(Vec<RootedTree>),
}

impl Ord for RootedTree {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (RootedTree::Leaf, RootedTree::Leaf) => Ordering::Equal,
            (RootedTree::Leaf, _) => Ordering::Less,
            (_, RootedTree::Leaf) => Ordering::Greater,
            (RootedTree::Node(a), RootedTree::Node(b)) => {
                let la: usize = a.iter().map(RootedTree::leaf_count).sum();
                let lb: usize = b.iter().map(RootedTree::leaf_count).sum();
                la.cmp(&lb).then_with(|| a.len().cmp(&b.len())).then_with(|| a.cmp(b))
            }
        }
    }
}

impl PartialOrd for RootedTree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl RootedTree {
    /// A node with its children put in canonical order.
    pub fn node(mut children: Vec<RootedTree>) -> Self {
        children.sort();
        RootedTree::Node(children)
    }

    pub fn corolla(k: usize) -> Self {
        RootedTree::Node(vec![RootedTree::Leaf; k])
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            RootedTree::Leaf => 1,
            RootedTree::Node(c) => c.iter().map(RootedTree::leaf_count).sum(),
        }
    }

    pub fn internal_vertices(&self) -> usize {
        match self {
            RootedTree::Leaf => 0,
            RootedTree::Node(c) => 1 + c.iter().map(RootedTree::internal_vertices).sum::<usize>(),
        }
    }

    pub fn max_arity(&self) -> usize {
        match self {
            RootedTree::Leaf => 0,
            RootedTree::Node(c) => c.iter().map(RootedTree::max_arity).fold(c.len(), usize::max),
        }
    }

    /// Order of the automorphism group: at each vertex, equal subtrees may be
    /// permuted, and each subtree contributes its own symmetries.
    pub fn aut_order(&self) -> u64 {
        match self {
            RootedTree::Leaf => 1,
            RootedTree::Node(c) => {
                let mut total: u64 = c.iter().map(RootedTree::aut_order).product();
                let mut i = 0;
                while i < c.len() {
                    let mut j = i;
                    while j < c.len() && c[j] == c[i] {
                        j += 1;
                    }
                    total *= (1..=(j - i) as u64).product::<u64>();
                    i = j;
                }
                total
            }
        }
    }

    /// Compact text form: a leaf is `*`, a vertex lists its children in
    /// parentheses, e.g. `(*(**))`.
    pub fn code(&self) -> String {
        match self {
            RootedTree::Leaf => "*".into(),
            RootedTree::Node(c) => format!("({})", c.iter().map(RootedTree::code).collect::<String>()),
        }
    }
}

impl fmt::Display for RootedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.code())
    }
}

/// All isomorphism classes of rooted trees with `k` leaves and vertex
/// arities in `[2, max_arity]`, with their automorphism counts, sorted.
pub fn enumerate_trees(k: usize, max_arity: usize) -> Vec<(RootedTree, u64)> {
    fn shapes(n: usize, max_arity: usize, memo: &mut HashMap<usize, Vec<RootedTree>>) -> Vec<RootedTree> {
        if n == 1 {
            return vec![RootedTree::Leaf];
        }
        if let Some(v) = memo.get(&n) {
            return v.clone();
        }
        let mut out: BTreeSet<RootedTree> = BTreeSet::new();
        for parts in integer_partitions(n, n) {
            if parts.len() < 2 || parts.len() > max_arity {
                continue;
            }
            let options: Vec<Vec<RootedTree>> = parts.iter().map(|&p| shapes(p, max_arity, memo)).collect();
            let mut choice = vec![0usize; parts.len()];
            loop {
                out.insert(RootedTree::node(choice.iter().zip(&options).map(|(&c, o)| o[c].clone()).collect()));
                let mut p = 0;
                while p < choice.len() {
                    choice[p] += 1;
                    if choice[p] < options[p].len() {
                        break;
                    }
                    choice[p] = 0;
                    p += 1;
                }
                if p == choice.len() {
                    break;
                }
            }
        }
        let v: Vec<RootedTree> = out.into_iter().collect();
        memo.insert(n, v.clone());
        v
    }
    if k < 2 {
        return Vec::new();
    }
    let mut memo = HashMap::new();
    shapes(k, max_arity, &mut memo).into_iter().map(|t| {
        let a = t.aut_order();
        (t, a)
    }).collect()
}

/// Partitions of `n` into non-increasing parts of size at most `max_part`.
fn integer_partitions(n: usize, max_part: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in (1..=max_part.min(n)).rev() {
        for mut rest in integer_partitions(n - first, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Ambient L∞-algebra plus a deformation retract of `(ambient, ℓ₁)`.
#[derive(Debug, Clone, Copy)]
pub struct TransferProblem<'a> {
    ambient: &'a LInfinityAlgebra,
    retract: &'a ChainRetract,
}

impl<'a> TransferProblem<'a> {
    /// Checks the retract identities against the ambient `ℓ₁`.
    pub fn new(ambient: &'a LInfinityAlgebra, retract: &'a ChainRetract) -> Result<Self> {
        if retract.ambient_dim() != ambient.dim() {
            return Err(Error::input("retract and ambient algebra have different dimensions"));
        }
        retract.verify(|x| ambient.differential(x))?;
        for j in 0..retract.homology().dim() {
            let want = retract.homology().degree(j);
            if ambient.space().homogeneous_degree(retract.include_basis(j)) != Some(want) {
                return Err(Error::input(format!(
                    "i({}) is not homogeneous of degree {want}",
                    retract.homology().label(j)
                )));
            }
        }
        Ok(TransferProblem { ambient, retract })
    }

    pub fn ambient(&self) -> &LInfinityAlgebra {
        self.ambient
    }

    pub fn retract(&self) -> &ChainRetract {
        self.retract
    }

    pub fn target(&self) -> &GradedVectorSpace {
        self.retract.homology()
    }

    /// Symmetric ambient bracket on the suspension, multilinear in `args`.
    fn lambda(&self, args: &[Element]) -> Result<Element> {
        let amb = self.ambient;
        let m = args.len();
        if m > amb.arity_bound() {
            if amb.bound_is_exact() {
                return Ok(Element::zero());
            }
            return Err(Error::input(format!(
                "a vertex of arity {m} exceeds the ambient arity bound {}",
                amb.arity_bound()
            )));
        }
        if amb.table(m).is_none() {
            return Ok(Element::zero());
        }
        let mut out = Element::zero();
        let mut idx = Vec::with_capacity(m);
        fn rec(p: &TransferProblem, args: &[Element], idx: &mut Vec<usize>, coef: Rational, out: &mut Element) {
            if idx.len() == args.len() {
                let v = shifted_bracket(p.ambient, idx);
                if !v.is_zero() {
                    out.add_scaled(&v, &coef);
                }
                return;
            }
            for (i, c) in args[idx.len()].terms() {
                idx.push(i);
                rec(p, args, idx, &coef * c, out);
                idx.pop();
            }
        }
        if args.iter().any(Element::is_zero) {
            return Ok(out);
        }
        rec(self, args, &mut idx, Rational::one(), &mut out);
        Ok(out)
    }

    fn edge(&self, x: &Element) -> Element {
        self.retract.homotopy(x)
    }

    /// Planar evaluation of a tree on target basis elements read left to
    /// right from `leaves`; returns an ambient element before the root map.
    fn planar(&self, tree: &RootedTree, leaves: &[usize], pos: &mut usize) -> Result<Element> {
        match tree {
            RootedTree::Leaf => {
                let v = self.retract.include_basis(leaves[*pos]).clone();
                *pos += 1;
                Ok(v)
            }
            RootedTree::Node(children) => {
                let mut args = Vec::with_capacity(children.len());
                for c in children {
                    let v = self.planar(c, leaves, pos)?;
                    let v = if matches!(c, RootedTree::Node(_)) { self.edge(&v) } else { v };
                    if v.is_zero() {
                        // still advance over the remaining leaves consistently
                        for rest in children.iter().skip(args.len() + 1) {
                            *pos += rest.leaf_count();
                        }
                        return Ok(Element::zero());
                    }
                    args.push(v);
                }
                self.lambda(&args)
            }
        }
    }

    /// `ℓ_T / |Aut(T)|` on the suspension, on a tuple of target basis indices.
    fn tree_shifted(&self, tree: &RootedTree, tuple: &[usize]) -> Result<Element> {
        let k = tuple.len();
        let shifted: Vec<i32> = tuple.iter().map(|&i| self.target().degree(i) + 1).collect();
        let mut sum = Element::zero();
        for sigma in permutations(k) {
            let leaves: Vec<usize> = sigma.iter().map(|&s| tuple[s]).collect();
            let mut pos = 0;
            let v = self.planar(tree, &leaves, &mut pos)?;
            if v.is_zero() {
                continue;
            }
            let sign = koszul_sign(&sigma, &shifted)?;
            sum.add_scaled(&v, &int(sign as i64));
        }
        let aut = Rational::from_integer((tree.aut_order() as i64).into());
        Ok(self.retract.project(&sum).scaled(&(Rational::one() / aut)))
    }

    fn unshift(&self, tuple: &[usize], v: Element) -> Element {
        let degrees: Vec<i32> = tuple.iter().map(|&i| self.target().degree(i)).collect();
        if shift_sign(&degrees) == 1 {
            v
        } else {
            v.neg()
        }
    }

    /// True when no target element has the degree a `k`-bracket on `tuple`
    /// would land in.
    fn lands_nowhere(&self, tuple: &[usize], present: &BTreeSet<i32>) -> bool {
        let d: i32 = tuple.iter().map(|&i| self.target().degree(i)).sum::<i32>() + tuple.len() as i32 - 2;
        !present.contains(&d)
    }

    /// The transferred `ℓ′_k` on a target basis tuple, summed over
    /// leaf-labelled trees by recursion over set partitions.
    fn partition_value(&self, tuple: &[usize]) -> Result<Element> {
        let k = tuple.len();
        if k == 1 {
            let v = self.ambient.differential(self.retract.include_basis(tuple[0]));
            return Ok(self.retract.project(&v));
        }
        let shifted: Vec<i32> = tuple.iter().map(|&i| self.target().degree(i) + 1).collect();
        let mut memo: HashMap<u32, Element> = HashMap::new();
        let full: u32 = (1u32 << k) - 1;
        let top = self.vertex_sum(full, tuple, &shifted, &mut memo)?;
        let v = self.retract.project(&top);
        Ok(self.unshift(tuple, v))
    }

    /// `Σ_partitions ε λ_m(I_{B₁}, …, I_{B_m})` over partitions of `mask`
    /// into at least two blocks.
    fn vertex_sum(&self, mask: u32, tuple: &[usize], shifted: &[i32], memo: &mut HashMap<u32, Element>) -> Result<Element> {
        let positions: Vec<usize> = (0..tuple.len()).filter(|p| mask & (1 << p) != 0).collect();
        let amb = self.ambient;
        let max_blocks = if amb.bound_is_exact() { amb.arity_bound().min(positions.len()) } else { positions.len() };
        let local: Vec<i32> = positions.iter().map(|&p| shifted[p]).collect();
        let mut total = Element::zero();
        for blocks in set_partitions(positions.len(), max_blocks) {
            if blocks.len() < 2 {
                continue;
            }
            let perm: Vec<usize> = blocks.iter().flatten().copied().collect();
            let sign = koszul_sign(&perm, &local)?;
            let mut args = Vec::with_capacity(blocks.len());
            let mut dead = false;
            for b in &blocks {
                let sub: u32 = b.iter().map(|&q| 1u32 << positions[q]).sum();
                let v = self.subtree(sub, tuple, shifted, memo)?;
                if v.is_zero() {
                    dead = true;
                    break;
                }
                args.push(v);
            }
            if dead {
                continue;
            }
            let v = self.lambda(&args)?;
            total.add_scaled(&v, &int(sign as i64));
        }
        Ok(total)
    }

    /// `I_B`: the leaf map for singletons, `K` of the vertex sum otherwise.
    fn subtree(&self, mask: u32, tuple: &[usize], shifted: &[i32], memo: &mut HashMap<u32, Element>) -> Result<Element> {
        if mask.count_ones() == 1 {
            let p = mask.trailing_zeros() as usize;
            return Ok(self.retract.include_basis(tuple[p]).clone());
        }
        if let Some(v) = memo.get(&mask) {
            return Ok(v.clone());
        }
        let inner = self.vertex_sum(mask, tuple, shifted, memo)?;
        let v = self.edge(&inner);
        memo.insert(mask, v.clone());
        Ok(v)
    }

    fn max_vertex_arity(&self, k: usize) -> usize {
        if self.ambient.bound_is_exact() {
            self.ambient.arity_bound().min(k)
        } else {
            k
        }
    }
}

/// Set partitions of `0..n` into at most `max_blocks` blocks; blocks are
/// ordered by their least element and sorted internally.
pub(crate) fn set_partitions(n: usize, max_blocks: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    fn rec(i: usize, n: usize, max_blocks: usize, blocks: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == n {
            out.push(blocks.clone());
            return;
        }
        for b in 0..blocks.len() {
            blocks[b].push(i);
            rec(i + 1, n, max_blocks, blocks, out);
            blocks[b].pop();
        }
        if blocks.len() < max_blocks {
            blocks.push(vec![i]);
            rec(i + 1, n, max_blocks, blocks, out);
            blocks.pop();
        }
    }
    rec(0, n, max_blocks, &mut blocks, &mut out);
    out
}

/// `ℓ_T / |Aut(T)|` for one tree, multilinear in target elements, in the
/// homological convention of the ambient algebra.
pub fn eval_tree(tree: &RootedTree, problem: &TransferProblem, args: &[Element]) -> Result<Element> {
    if args.len() != tree.leaf_count() {
        return Err(Error::input(format!(
            "tree {tree} has {} leaves but {} arguments were given",
            tree.leaf_count(),
            args.len()
        )));
    }
    let amb = problem.ambient();
    if !amb.bound_is_exact() && tree.max_arity() > amb.arity_bound() {
        return Err(Error::input(format!(
            "tree {tree} has a vertex of arity {} beyond the ambient arity bound {}",
            tree.max_arity(),
            amb.arity_bound()
        )));
    }
    let mut out = Element::zero();
    let mut idx = Vec::with_capacity(args.len());
    fn rec(
        tree: &RootedTree,
        p: &TransferProblem,
        args: &[Element],
        idx: &mut Vec<usize>,
        coef: Rational,
        out: &mut Element,
    ) -> Result<()> {
        if idx.len() == args.len() {
            let v = p.tree_shifted(tree, idx)?;
            out.add_scaled(&p.unshift(idx, v), &coef);
            return Ok(());
        }
        for (i, c) in args[idx.len()].terms() {
            idx.push(i);
            rec(tree, p, args, idx, &coef * c, out)?;
            idx.pop();
        }
        Ok(())
    }
    rec(tree, problem, args, &mut idx, Rational::one(), &mut out)?;
    Ok(out)
}

/// Arity beyond which every bracket on `space` vanishes for degree reasons,
/// when the space sits in nonnegative degrees.
pub fn degree_arity_bound(space: &GradedVectorSpace) -> Option<usize> {
    let (lo, hi) = (space.min_degree()?, space.max_degree()?);
    if lo < 0 {
        return None;
    }
    // Σ degrees + k − 2 ≤ hi with Σ degrees ≥ k·lo
    Some(((hi + 2) / (lo + 1)).max(1) as usize)
}

fn finish(problem: &TransferProblem, entries: Vec<(Vec<usize>, Element)>, max_arity: usize) -> Result<LInfinityAlgebra> {
    let target = problem.target().clone();
    let exact = match degree_arity_bound(&target) {
        Some(b) => b <= max_arity,
        None => false,
    };
    let exact = exact || (problem.retract().homotopy_is_zero() && problem.ambient().bound_is_exact() && problem.ambient().arity_bound() <= max_arity);
    Ok(LInfinityAlgebra::new(target, entries)?.with_arity_bound(max_arity, exact))
}

fn target_tuples(problem: &TransferProblem, k: usize) -> Vec<Vec<usize>> {
    let t = problem.target();
    let present = t.degrees();
    sorted_tuples(t.dim(), k, |i| t.is_odd(i))
        .into_iter()
        .filter(|tuple| !problem.lands_nowhere(tuple, &present))
        .collect()
}

/// Transferred structure up to `max_arity`, summing `eval_tree` over all
/// tree classes.
pub fn transfer(problem: &TransferProblem, max_arity: usize) -> Result<LInfinityAlgebra> {
    let mut entries = Vec::new();
    for k in 1..=max_arity {
        let trees = if k == 1 { Vec::new() } else { enumerate_trees(k, problem.max_vertex_arity(k)) };
        for tuple in target_tuples(problem, k) {
            let value = if k == 1 {
                problem.partition_value(&tuple)?
            } else {
                let mut v = Element::zero();
                for (tree, _) in &trees {
                    v.add_assign(&problem.unshift(&tuple, problem.tree_shifted(tree, &tuple)?));
                }
                v
            };
            if !value.is_zero() {
                entries.push((tuple, value));
            }
        }
    }
    finish(problem, entries, max_arity)
}

/// Same result as [`transfer`], computed by memoized recursion over set
/// partitions instead of per-tree symmetrization; much faster for large
/// arities.
pub fn transfer_by_partitions(problem: &TransferProblem, max_arity: usize) -> Result<LInfinityAlgebra> {
    let mut entries = Vec::new();
    for k in 1..=max_arity {
        for tuple in target_tuples(problem, k) {
            let value = problem.partition_value(&tuple)?;
            if !value.is_zero() {
                entries.push((tuple, value));
            }
        }
    }
    finish(problem, entries, max_arity)
}

/// One nonzero tree evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeValue {
    pub tree: String,
    pub inputs: Vec<String>,
    pub value: Element,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeCensus {
    pub max_arity: usize,
    pub trees: usize,
    pub evaluations: usize,
    pub nonzero: Vec<TreeValue>,
}

/// Evaluates every tree with at least two internal vertices on every target
/// basis tuple up to `max_arity`, collecting the nonzero values.
pub fn multi_vertex_census(problem: &TransferProblem, max_arity: usize) -> Result<TreeCensus> {
    let mut census = TreeCensus {
        max_arity,
        trees: 0,
        evaluations: 0,
        nonzero: Vec::new(),
    };
    for k in 3..=max_arity {
        let trees: Vec<RootedTree> = enumerate_trees(k, problem.max_vertex_arity(k))
            .into_iter()
            .map(|(t, _)| t)
            .filter(|t| t.internal_vertices() >= 2)
            .collect();
        census.trees += trees.len();
        let target = problem.target();
        for tuple in sorted_tuples(target.dim(), k, |i| target.is_odd(i)) {
            for tree in &trees {
                census.evaluations += 1;
                let v = problem.unshift(&tuple, problem.tree_shifted(tree, &tuple)?);
                if !v.is_zero() {
                    census.nonzero.push(TreeValue {
                        tree: tree.code(),
                        inputs: tuple.iter().map(|&i| target.label(i).to_string()).collect(),
                        value: v,
                    });
                }
            }
        }
    }
    Ok(census)
}

/// Per-tree breakdown of `ℓ′_k` on one target basis tuple.
pub fn tree_provenance(problem: &TransferProblem, tuple: &[usize]) -> Result<Vec<TreeValue>> {
    let k = tuple.len();
    let target = problem.target();
    let mut out = Vec::new();
    for (tree, _) in enumerate_trees(k, problem.max_vertex_arity(k)) {
        let v = problem.unshift(tuple, problem.tree_shifted(&tree, tuple)?);
        if !v.is_zero() {
            out.push(TreeValue {
                tree: tree.code(),
                inputs: tuple.iter().map(|&i| target.label(i).to_string()).collect(),
                value: v,
            });
        }
    }
    Ok(out)
}

/// Retract of `(L, ℓ₁)` onto its homology.
pub fn homology_retract(l: &LInfinityAlgebra) -> Result<ChainRetract> {
    let d: Vec<Element> = (0..l.dim()).map(|i| l.differential(&Element::basis(i))).collect();
    ChainRetract::build(l.space(), &d, -1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cdga::{FiniteCdga, SullivanAlgebra};
    use crate::linfty::{ce_dual, check_jacobi, tensor_model};

    fn labelled_count(n: usize) -> u64 {
        // leaf-labelled trees, all vertex arities ≥ 2, by set partitions
        fn count(n: usize, memo: &mut HashMap<usize, u64>) -> u64 {
            if n == 1 {
                return 1;
            }
            if let Some(&v) = memo.get(&n) {
                return v;
            }
            let mut total = 0;
            for blocks in set_partitions(n, n) {
                if blocks.len() < 2 {
                    continue;
                }
                total += blocks.iter().map(|b| count(b.len(), memo)).product::<u64>();
            }
            memo.insert(n, total);
            total
        }
        count(n, &mut HashMap::new())
    }

    #[test]
    fn tree_census() {
        let sizes: Vec<usize> = (2..=6).map(|k| enumerate_trees(k, k).len()).collect();
        assert_eq!(sizes, vec![1, 2, 5, 12, 33]);
        let fact = |k: u64| (1..=k).product::<u64>();
        for k in 2..=6 {
            let via_aut: u64 = enumerate_trees(k, k).iter().map(|(_, a)| fact(k as u64) / a).sum();
            assert_eq!(via_aut, labelled_count(k), "k = {k}");
        }
        assert_eq!(labelled_count(4), 26);
        assert_eq!(enumerate_trees(2, 2), vec![(RootedTree::corolla(2), 2)]);
        let three: Vec<(String, u64)> = enumerate_trees(3, 3).into_iter().map(|(t, a)| (t.code(), a)).collect();
        assert_eq!(three, vec![("(*(**))".to_string(), 2), ("(***)".to_string(), 6)]);
        // binary trees only
        assert_eq!(enumerate_trees(4, 2).len(), 2);
    }

    #[test]
    fn aut_orders_for_four_leaves() {
        let got: BTreeSet<(String, u64)> = enumerate_trees(4, 4).into_iter().map(|(t, a)| (t.code(), a)).collect();
        let want: BTreeSet<(String, u64)> = [
            ("(****)", 24),
            ("(*(***))", 6),
            ("(**(**))", 4),
            ("((**)(**))", 8),
            ("(*(*(**)))", 2),
        ]
        .into_iter()
        .map(|(c, a)| (c.to_string(), a))
        .collect();
        assert_eq!(got, want);
    }

    /// Six-dimensional dg Lie algebra: `[x,y] = e`, `ℓ₁ t = e`,
    /// `[t,w] = r`. Homology is spanned by `x, y, w, r`.
    fn massey_ambient() -> LInfinityAlgebra {
        let sp = GradedVectorSpace::new([("x", 2), ("y", 2), ("w", 2), ("e", 4), ("t", 5), ("r", 7)]).unwrap();
        LInfinityAlgebra::from_labels(
            sp,
            &[
                (&["x", "y"], &[("e", 1)]),
                (&["t"], &[("e", 1)]),
                (&["t", "w"], &[("r", 1)]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn massey_type_ternary_bracket() {
        let amb = massey_ambient();
        assert!(check_jacobi(&amb, 4).passed());
        let r = homology_retract(&amb).unwrap();
        let p = TransferProblem::new(&amb, &r).unwrap();
        let h = p.target();
        let labels: Vec<&str> = h.basis().iter().map(|b| b.label.as_str()).collect();
        assert_eq!(labels, vec!["w", "x", "y", "r"]);
        let out = transfer(&p, 3).unwrap();
        let ix = |l| h.index_of(l).unwrap();
        // ℓ′₂(x, y) = q(e) = 0: e is a boundary
        assert!(out.bracket_basis(&[ix("x"), ix("y")]).unwrap().is_zero());
        // only the binary tree contributes (no ambient ℓ₃). By hand on the
        // suspension: λ₂(sx,sy) = −se, K(−se) = −st, λ₂(−st,sw) = −sr, and
        // the unshifting sign for degrees (2,2,2) is −1.
        let v = out.bracket_basis(&[ix("x"), ix("y"), ix("w")]).unwrap();
        assert_eq!(v, Element::basis(ix("r")));
        assert_eq!(out, transfer_by_partitions(&p, 3).unwrap());
        assert!(check_jacobi(&out, 3).passed());
        let binary = RootedTree::node(vec![RootedTree::Leaf, RootedTree::corolla(2)]);
        let args = [Element::basis(ix("x")), Element::basis(ix("y")), Element::basis(ix("w"))];
        assert_eq!(eval_tree(&binary, &p, &args).unwrap(), v);
        assert!(eval_tree(&RootedTree::corolla(3), &p, &args).unwrap().is_zero());
    }

    /// Ambient with `[b,c] = e = ℓ₁t`, `[t,d] = r`, `ℓ₃(b,c,d) = αr`,
    /// `[a,r] = s` and `ℓ₃(e,d,a) = βs`. Jacobi on the ambient fixes α and
    /// β; the transferred `ℓ′₃(b,c,d)` mixes the corolla with the binary
    /// tree, and Jacobi on `(a,b,c,d)` after transfer only holds for the
    /// correct sign on internal edges.
    fn corolla_and_binary_ambient(alpha: i64, beta: i64) -> LInfinityAlgebra {
        let sp = GradedVectorSpace::new([
            ("a", 2),
            ("b", 2),
            ("c", 2),
            ("d", 2),
            ("e", 4),
            ("t", 5),
            ("r", 7),
            ("s", 9),
        ])
        .unwrap();
        LInfinityAlgebra::from_labels(
            sp,
            &[
                (&["b", "c"], &[("e", 1)]),
                (&["t"], &[("e", 1)]),
                (&["t", "d"], &[("r", 1)]),
                (&["b", "c", "d"], &[("r", alpha)]),
                (&["a", "r"], &[("s", 1)]),
                (&["e", "d", "a"], &[("s", beta)]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn edge_sign_is_forced_by_jacobi() {
        let mut valid = Vec::new();
        for alpha in [-1, 0, 1] {
            for beta in [-1, 0, 1] {
                let amb = corolla_and_binary_ambient(alpha, beta);
                if check_jacobi(&amb, 4).passed() {
                    valid.push((alpha, beta));
                }
            }
        }
        assert_eq!(valid.len(), 1, "{valid:?}");
        let (alpha, beta) = valid[0];
        let amb = corolla_and_binary_ambient(alpha, beta);
        let r = homology_retract(&amb).unwrap();
        let p = TransferProblem::new(&amb, &r).unwrap();
        let out = transfer(&p, 4).unwrap();
        assert!(check_jacobi(&out, 4).passed());
        assert_eq!(out, transfer_by_partitions(&p, 4).unwrap());

        let h = p.target();
        let ix = |l| h.index_of(l).unwrap();
        let bcd = [ix("b"), ix("c"), ix("d")];
        // corolla and binary tree are both nonzero and cancel
        let trees = tree_provenance(&p, &bcd).unwrap();
        assert_eq!(trees.len(), 2);
        let mut sum = Element::zero();
        for t in &trees {
            sum.add_assign(&t.value);
        }
        assert!(sum.is_zero());
        assert!(out.bracket_basis(&bcd).unwrap().is_zero());

        // with the opposite edge sign they would add up, and Jacobi fails
        let corolla = trees.iter().find(|t| t.tree == "(***)").unwrap();
        let flipped_value = corolla.value.scaled(&int(2));
        let mut entries: Vec<(Vec<usize>, Element)> = out.entries().map(|(t, v)| (t.clone(), v.clone())).collect();
        entries.push((bcd.to_vec(), flipped_value));
        let flipped = LInfinityAlgebra::new(h.clone(), entries).unwrap();
        let bad = check_jacobi(&flipped, 4);
        assert!(bad.violations.iter().any(|v| v.inputs == ["a", "b", "c", "d"]), "{bad:?}");
    }

    #[test]
    fn trivial_retract_reproduces_ambient() {
        let amb = massey_ambient();
        // the trivial retract needs ℓ₁ = 0, so use the minimal part only
        let sp = amb.space().clone();
        let minimal = LInfinityAlgebra::from_labels(sp.clone(), &[(&["x", "y"], &[("e", 1)]), (&["t", "w"], &[("r", 1)])]).unwrap();
        let r = ChainRetract::trivial(&sp);
        let p = TransferProblem::new(&minimal, &r).unwrap();
        let out = transfer(&p, 4).unwrap();
        assert_eq!(out.table(2), minimal.table(2));
        assert!(out.table(3).is_none() && out.table(4).is_none());
    }

    #[test]
    fn zero_homotopy_kills_multi_vertex_trees() {
        let l = ce_dual(&crate::cdga::sullivan::tests::model_y()).unwrap();
        let r = ChainRetract::trivial(l.space());
        let p = TransferProblem::new(&l, &r).unwrap();
        let c = multi_vertex_census(&p, 4).unwrap();
        assert!(c.evaluations > 0 && c.nonzero.is_empty());
    }

    /// Minimal model with a ternary bracket that is not two-stage:
    /// filiform-type `dc = ab, de = ac` plus `df = abc`.
    fn three_stage_with_ternary() -> SullivanAlgebra {
        SullivanAlgebra::from_terms(
            &[("a", 1), ("b", 1), ("c", 1), ("e", 1), ("f", 2)],
            &[
                ("c", &[(&["a", "b"], 1)]),
                ("e", &[(&["a", "c"], 1)]),
                ("f", &[(&["a", "b", "c"], 1)]),
            ],
        )
        .unwrap()
    }

    fn nonformal_source() -> FiniteCdga {
        SullivanAlgebra::from_terms(&[("p", 2), ("q", 3)], &[("q", &[(&["p", "p"], 1)])])
            .unwrap()
            .truncate(6)
            .unwrap()
    }

    #[test]
    fn transfer_satisfies_jacobi_with_mixed_trees() {
        let l = ce_dual(&three_stage_with_ternary()).unwrap();
        assert_eq!(l.max_stored_arity(), 3);
        let amb = tensor_model(&nonformal_source(), &l).unwrap();
        let r = homology_retract(&amb).unwrap();
        assert!(!r.homotopy_is_zero());
        let p = TransferProblem::new(&amb, &r).unwrap();
        let fast = transfer_by_partitions(&p, 4).unwrap();
        let slow = transfer(&p, 4).unwrap();
        assert_eq!(fast, slow);
        assert!(fast.table(3).is_some(), "expected a nonzero ternary bracket");
        let report = check_jacobi(&fast, 4);
        assert!(report.passed(), "{:?}", report.violations.first());
    }
}

