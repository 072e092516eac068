//! L∞-models of mapping spaces `map(X, Y)` for a two-stage target `Y`.
//!
//! The model is `H ⊗ L`, where `H` is the cohomology algebra of `X` and `L`
//! the minimal L∞-model of `Y`. Its brackets come from the closed formula
//! of [`tensor_model`]. Path components correspond to Maurer–Cartan
//! elements `z` in degree −1. The component of `z` is modelled by the
//! twisted algebra truncated to degrees `≥ 0`. Ranks are reported with the
//! shift `H_n ↔ π_{n+1}`.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::One;

use crate::cdga::{harmonious_decomposition, tensor_product, two_stage_split, AlgebraMorphism, ChainRetract, FiniteCdga, Polynomial, SullivanAlgebra};
use crate::error::{Error, Result};
use crate::graded::{sorted_tuples, Element, GradedVectorSpace};
use crate::linfty::{ce_construct_named, ce_dual, distinct_orderings, pair_label, tensor_model, Coordinates, LInfinityAlgebra};
use crate::qlinalg::{factorial, Rational, RationalMatrix};
use crate::transfer::{degree_arity_bound, homology_retract, multi_vertex_census, transfer, transfer_by_partitions, tree_provenance, TransferProblem, TreeValue};

/// `H ⊗ L` together with the data it was built from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MappingSpaceModel {
    cohomology: FiniteCdga,
    target: SullivanAlgebra,
    lie: LInfinityAlgebra,
    model: LInfinityAlgebra,
    /// `(h, x)` for each model basis element.
    parts: Vec<(usize, usize)>,
    /// Model index of `h ⊗ x`.
    index: Vec<Vec<usize>>,
}

/// Builds the closed-form model of `map(X, Y)` from `H = H*(X)` and a
/// two-stage Sullivan model of `Y`.
pub fn mapping_space_model(h: &FiniteCdga, y: &SullivanAlgebra) -> Result<MappingSpaceModel> {
    if !h.has_zero_differential() {
        return Err(Error::input(format!(
            "`{}` has a nonzero differential; pass its cohomology algebra",
            h.name()
        )));
    }
    two_stage_split(y)?;
    let lie = ce_dual(y)?;
    let model = tensor_model(h, &lie)?;
    let (hs, ls) = (h.space(), lie.space());
    let mut parts = vec![(0, 0); model.dim()];
    let mut index = vec![vec![0; ls.dim()]; hs.dim()];
    for a in 0..hs.dim() {
        for x in 0..ls.dim() {
            let i = model.space().require(&pair_label(hs.label(a), ls.label(x)))?;
            parts[i] = (a, x);
            index[a][x] = i;
        }
    }
    Ok(MappingSpaceModel {
        cohomology: h.clone(),
        target: y.clone(),
        lie,
        model,
        parts,
        index,
    })
}

impl MappingSpaceModel {
    pub fn cohomology(&self) -> &FiniteCdga {
        &self.cohomology
    }

    pub fn target(&self) -> &SullivanAlgebra {
        &self.target
    }

    /// The minimal L∞-model `L` of the target.
    pub fn lie(&self) -> &LInfinityAlgebra {
        &self.lie
    }

    pub fn model(&self) -> &LInfinityAlgebra {
        &self.model
    }

    pub fn space(&self) -> &GradedVectorSpace {
        self.model.space()
    }

    /// `(h, x)` indices of a model basis element.
    pub fn parts(&self, i: usize) -> (usize, usize) {
        self.parts[i]
    }

    pub fn pair_index(&self, h: usize, x: usize) -> usize {
        self.index[h][x]
    }

    /// Basis indices of the degree −1 slice, where Maurer–Cartan elements
    /// live.
    pub fn mc_slice(&self) -> Vec<usize> {
        self.space().slice(-1)
    }

    /// `ψ ⊗ id` applied to a model element.
    pub fn map_cohomology(&self, psi: &AlgebraMorphism, v: &Element) -> Element {
        v.map_linear(|i| {
            let (h, x) = self.parts[i];
            psi.image(h).terms().map(|(g, c)| (self.index[g][x], c.clone())).collect()
        })
    }

    /// `ψ ⊗ id` as a matrix on the whole model.
    pub fn tensor_matrix(&self, psi: &AlgebraMorphism) -> RationalMatrix {
        let n = self.model.dim();
        let cols: Vec<Vec<Rational>> = (0..n).map(|i| self.map_cohomology(psi, &Element::basis(i)).to_dense(n)).collect();
        RationalMatrix::from_columns(n, &cols)
    }
}

/// `Σ_k (1/k!) ℓ_k(z, …, z)`, exact up to the model's arity bound.
pub fn mc_residual(m: &MappingSpaceModel, z: &Element) -> Result<Element> {
    curvature(&m.model, z)
}

/// [`mc_residual`] in an arbitrary L∞-algebra with an exact arity bound.
pub fn curvature(l: &LInfinityAlgebra, z: &Element) -> Result<Element> {
    if z.support().any(|i| i >= l.dim()) {
        return Err(Error::input("element has coordinates outside the model"));
    }
    if !z.is_zero() && l.space().homogeneous_degree(z) != Some(-1) {
        return Err(Error::input(format!(
            "Maurer–Cartan elements live in degree −1, got {}",
            l.space().format(z)
        )));
    }
    let mut out = Element::zero();
    if z.is_zero() {
        return Ok(out);
    }
    for k in 1..=l.arity_bound() {
        let v = l.bracket_eval(&vec![z.clone(); k])?;
        out.add_scaled(&v, &(Rational::one() / factorial(k)));
    }
    Ok(out)
}

/// A degree −1 element together with its Maurer–Cartan residual.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaurerCartanElement {
    pub element: Element,
    pub residual: Element,
}

impl MaurerCartanElement {
    pub fn new(m: &MappingSpaceModel, z: Element) -> Result<Self> {
        let residual = mc_residual(m, &z)?;
        Ok(MaurerCartanElement { element: z, residual })
    }

    pub fn zero() -> Self {
        MaurerCartanElement {
            element: Element::zero(),
            residual: Element::zero(),
        }
    }

    pub fn is_certified(&self) -> bool {
        self.residual.is_zero()
    }
}

/// Shape of the Maurer–Cartan system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemKind {
    Zero,
    Linear,
    Nonlinear,
}

impl SystemKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SystemKind::Zero => "zero",
            SystemKind::Linear => "linear",
            SystemKind::Nonlinear => "nonlinear",
        }
    }
}

/// One coordinate of the residual, as a polynomial in the MC coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct McEquation {
    pub output: String,
    pub polynomial: Polynomial,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum McSolution {
    /// The full solution set: the span of `basis`.
    Family { basis: Vec<Element> },
    /// Nonlinear system: only the caller's candidates were tested.
    Candidates { verified: Vec<Element>, rejected: Vec<Element> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct McDescription {
    /// One even variable per basis element of the degree −1 slice, named by
    /// that element.
    pub variables: GradedVectorSpace,
    /// Model index behind each variable.
    pub slice: Vec<usize>,
    pub equations: Vec<McEquation>,
    pub kind: SystemKind,
    pub solution: McSolution,
}

impl McDescription {
    /// Dimension of the solution family, when the whole set is known.
    pub fn family_dimension(&self) -> Option<usize> {
        match &self.solution {
            McSolution::Family { basis } => Some(basis.len()),
            McSolution::Candidates { .. } => None,
        }
    }
}

/// Expands the Maurer–Cartan equation over the degree −1 slice and solves
/// it when it is identically zero or linear; otherwise only `candidates`
/// are checked.
pub fn solve_mc(m: &MappingSpaceModel, candidates: &[Element]) -> Result<McDescription> {
    solve_mc_in(&m.model, candidates)
}

/// [`solve_mc`] in an arbitrary L∞-algebra with an exact arity bound.
pub fn solve_mc_in(l: &LInfinityAlgebra, candidates: &[Element]) -> Result<McDescription> {
    let sp = l.space();
    let slice = sp.slice(-1);
    let variables = GradedVectorSpace::new(slice.iter().map(|&i| (sp.label(i).to_string(), 0)))?;
    let var_of: BTreeMap<usize, usize> = slice.iter().map(|&i| (i, variables.require(sp.label(i)).unwrap())).collect();

    let mut polys: BTreeMap<usize, Polynomial> = BTreeMap::new();
    for k in 1..=l.arity_bound() {
        // degree −1 elements are odd, so every repetition pattern occurs
        for tuple in sorted_tuples(slice.len(), k, |_| true) {
            let model_tuple: Vec<usize> = tuple.iter().map(|&p| slice[p]).collect();
            let mut value = Element::zero();
            for ordering in distinct_orderings(&model_tuple) {
                value.add_assign(&l.bracket_basis(&ordering)?);
            }
            if value.is_zero() {
                continue;
            }
            let mut monomial: Vec<usize> = model_tuple.iter().map(|i| var_of[i]).collect();
            monomial.sort();
            for (out, c) in value.terms() {
                polys.entry(out).or_insert_with(Polynomial::zero).add_term(monomial.clone(), c / factorial(k));
            }
        }
    }
    polys.retain(|_, p| !p.is_zero());
    let equations: Vec<McEquation> = polys
        .iter()
        .map(|(&out, p)| McEquation {
            output: sp.label(out).to_string(),
            polynomial: p.clone(),
        })
        .collect();

    let kind = if equations.is_empty() {
        SystemKind::Zero
    } else if equations.iter().all(|e| e.polynomial.terms().all(|(mono, _)| mono.len() == 1)) {
        SystemKind::Linear
    } else {
        SystemKind::Nonlinear
    };
    let solution = match kind {
        SystemKind::Zero => McSolution::Family {
            basis: slice.iter().map(|&i| Element::basis(i)).collect(),
        },
        SystemKind::Linear => {
            let mut a = RationalMatrix::zeros(equations.len(), slice.len());
            for (r, e) in equations.iter().enumerate() {
                for (mono, c) in e.polynomial.terms() {
                    a.set(r, mono[0], c.clone());
                }
            }
            let basis = a
                .kernel_basis()
                .into_iter()
                .map(|v| v.into_iter().enumerate().map(|(p, c)| (slice[p], c)).collect())
                .collect();
            McSolution::Family { basis }
        }
        SystemKind::Nonlinear => {
            let (mut verified, mut rejected) = (Vec::new(), Vec::new());
            for z in candidates {
                if curvature(l, z)?.is_zero() {
                    verified.push(z.clone());
                } else {
                    rejected.push(z.clone());
                }
            }
            McSolution::Candidates { verified, rejected }
        }
    };
    Ok(McDescription {
        variables,
        slice,
        equations,
        kind,
        solution,
    })
}

/// The twisted and truncated model of one path component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentModel {
    pub base: MappingSpaceModel,
    pub mc: MaurerCartanElement,
    /// `ℓ^z` on the whole model.
    pub twisted: LInfinityAlgebra,
    /// `ℓ^z` restricted to degrees `≥ 1` plus the `ℓ₁^z`-cycles of degree 0.
    pub truncated: LInfinityAlgebra,
    /// Truncated basis vectors in model coordinates.
    pub embedding: Vec<Element>,
}

/// `ℓ^z_k(w) = Σ_j (1/j!) ℓ_{k+j}(z, …, z, w)` followed by truncation.
pub fn twist(m: &MappingSpaceModel, mc: &MaurerCartanElement) -> Result<ComponentModel> {
    if !mc.is_certified() {
        return Err(Error::input(format!(
            "not a Maurer–Cartan element: the residual is {}",
            m.space().format(&mc.residual)
        )));
    }
    let z = &mc.element;
    let model = &m.model;
    let sp = model.space();
    let bound = model.arity_bound();
    let zs: BTreeSet<usize> = z.support().collect();

    // candidate argument tuples: stored tuples with some z-slots removed
    let mut candidates: BTreeSet<Vec<usize>> = BTreeSet::new();
    for (t, _) in model.entries() {
        let mut drop_sets = vec![Vec::new()];
        for (p, i) in t.iter().enumerate() {
            if zs.contains(i) {
                let extended: Vec<Vec<usize>> = drop_sets.iter().map(|d| {
                    let mut d = d.clone();
                    d.push(p);
                    d
                }).collect();
                drop_sets.extend(extended);
            }
        }
        for d in drop_sets {
            let rest: Vec<usize> = t.iter().enumerate().filter(|(p, _)| !d.contains(p)).map(|(_, &i)| i).collect();
            if !rest.is_empty() {
                candidates.insert(rest);
            }
        }
    }
    let mut entries = Vec::new();
    for w in candidates {
        let args: Vec<Element> = w.iter().map(|&i| Element::basis(i)).collect();
        let v = twisted_bracket(model, z, &args)?;
        if !v.is_zero() {
            entries.push((w, v));
        }
    }
    let twisted = LInfinityAlgebra::new(sp.clone(), entries)?.with_arity_bound(bound, true);
    for i in 0..sp.dim() {
        let dd = twisted.differential(&twisted.differential(&Element::basis(i)));
        if !dd.is_zero() {
            return Err(Error::internal(format!("ℓ₁^z∘ℓ₁^z ≠ 0 on {}", sp.label(i))));
        }
    }

    // degree 0 cycles
    let zero_slice = sp.slice(0);
    let minus_one = sp.slice(-1);
    let mut d0 = RationalMatrix::zeros(minus_one.len(), zero_slice.len());
    for (c, &i) in zero_slice.iter().enumerate() {
        let img = twisted.differential(&Element::basis(i));
        for (r, &j) in minus_one.iter().enumerate() {
            d0.set(r, c, img.coeff(j));
        }
    }
    let mut labelled: Vec<(String, i32, Element)> = Vec::new();
    let mut used: BTreeSet<String> = sp.basis().iter().map(|b| b.label.clone()).collect();
    for (k, v) in d0.kernel_basis().into_iter().enumerate() {
        let elem: Element = v.into_iter().enumerate().map(|(p, c)| (zero_slice[p], c)).collect();
        let single = {
            let mut t = elem.terms();
            match (t.next(), t.next()) {
                (Some((i, c)), None) if c.is_one() => Some(i),
                _ => None,
            }
        };
        let label = match single {
            Some(i) => sp.label(i).to_string(),
            None => {
                let mut l = format!("c0_{k}");
                while used.contains(&l) {
                    l.push('\'');
                }
                used.insert(l.clone());
                l
            }
        };
        labelled.push((label, 0, elem));
    }
    for i in 0..sp.dim() {
        if sp.degree(i) >= 1 {
            labelled.push((sp.label(i).to_string(), sp.degree(i), Element::basis(i)));
        }
    }
    let (truncated, embedding) = twisted.restrict(labelled)?;
    Ok(ComponentModel {
        base: m.clone(),
        mc: mc.clone(),
        twisted,
        truncated,
        embedding,
    })
}

fn twisted_bracket(model: &LInfinityAlgebra, z: &Element, args: &[Element]) -> Result<Element> {
    let mut out = Element::zero();
    for j in 0..=model.arity_bound().saturating_sub(args.len()) {
        let mut full = vec![z.clone(); j];
        full.extend(args.iter().cloned());
        let v = model.bracket_eval(&full)?;
        out.add_scaled(&v, &(Rational::one() / factorial(j)));
    }
    Ok(out)
}

/// `dim H_n(truncated, ℓ₁^z)` for every degree `n` with nonzero homology.
pub fn component_homology(c: &ComponentModel) -> BTreeMap<i32, usize> {
    let t = &c.truncated;
    let sp = t.space();
    let mut out = BTreeMap::new();
    for n in sp.degrees() {
        let here = sp.slice(n);
        let rank_out = differential_rank(t, n);
        let rank_in = differential_rank(t, n + 1);
        let h = here.len() - rank_out - rank_in;
        if h > 0 {
            out.insert(n, h);
        }
    }
    out
}

fn differential_rank(t: &LInfinityAlgebra, n: i32) -> usize {
    let sp = t.space();
    let src = sp.slice(n);
    let dst = sp.slice(n - 1);
    if src.is_empty() || dst.is_empty() {
        return 0;
    }
    let mut m = RationalMatrix::zeros(dst.len(), src.len());
    for (c, &i) in src.iter().enumerate() {
        let img = t.differential(&Element::basis(i));
        for (r, &j) in dst.iter().enumerate() {
            m.set(r, c, img.coeff(j));
        }
    }
    m.rank()
}

/// Rank of `π_{n+1}(map(X, Y; f)) ⊗ Q`, keyed by `n + 1`, zero ranks
/// omitted.
pub fn component_homotopy_ranks(c: &ComponentModel) -> BTreeMap<i32, usize> {
    component_homology(c).into_iter().map(|(n, r)| (n + 1, r)).collect()
}

/// `Σ dim H = dim(truncated) − 2·rank ℓ₁^z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EulerCheck {
    pub truncated_dim: usize,
    pub differential_rank: usize,
    pub homology_dim: usize,
}

impl EulerCheck {
    pub fn holds(&self) -> bool {
        self.homology_dim + 2 * self.differential_rank == self.truncated_dim
    }
}

pub fn euler_bookkeeping(c: &ComponentModel) -> EulerCheck {
    let t = &c.truncated;
    let differential_rank = t.space().degrees().into_iter().map(|n| differential_rank(t, n)).sum();
    EulerCheck {
        truncated_dim: t.dim(),
        differential_rank,
        homology_dim: component_homology(c).values().sum(),
    }
}

/// The minimal L∞-structure on the homology of a component, with the
/// retract it was transferred along.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferredComponent {
    pub retract: ChainRetract,
    pub structure: LInfinityAlgebra,
}

/// Arity up to which transferred brackets are computed when the caller
/// does not choose: enough to be exhaustive.
fn exhaustive_arity(c: &ComponentModel, retract: &ChainRetract) -> usize {
    let ambient = c.truncated.arity_bound().max(1);
    if retract.homotopy_is_zero() {
        return ambient;
    }
    degree_arity_bound(retract.homology()).unwrap_or(ambient).max(ambient)
}

/// Transfers the truncated structure to its homology, up to `max_arity`
/// (or exhaustively when `None`).
pub fn transfer_component(c: &ComponentModel, max_arity: Option<usize>) -> Result<TransferredComponent> {
    let retract = homology_retract(&c.truncated)?;
    let arity = max_arity.unwrap_or_else(|| exhaustive_arity(c, &retract));
    let problem = TransferProblem::new(&c.truncated, &retract)?;
    let structure = transfer_by_partitions(&problem, arity)?;
    Ok(TransferredComponent { retract, structure })
}

/// Minimal Sullivan model of the component: the Chevalley–Eilenberg
/// algebra of the transferred minimal structure. Generators carry the
/// labels of the homology classes.
pub fn component_minimal_model(c: &ComponentModel) -> Result<SullivanAlgebra> {
    let t = transfer_component(c, None)?;
    if !t.structure.bound_is_exact() {
        return Err(Error::internal("transferred structure is not exhaustive"));
    }
    if !t.structure.is_minimal() {
        return Err(Error::internal("transferred structure has a nonzero differential"));
    }
    ce_construct_named(&t.structure, "component")
}

/// `(ψ ⊗ id)(z)` for a verified automorphism `ψ` of `H`.
pub fn apply_automorphism(psi: &AlgebraMorphism, m: &MappingSpaceModel, z: &MaurerCartanElement) -> Result<MaurerCartanElement> {
    psi.verify_automorphism(&m.cohomology).map_err(|e| Error::input(format!("not an algebra automorphism: {e}")))?;
    if !z.is_certified() {
        return Err(Error::input("the element to transport is not a Maurer–Cartan element"));
    }
    let image = MaurerCartanElement::new(m, m.map_cohomology(psi, &z.element))?;
    if !image.is_certified() {
        return Err(Error::internal("the image of a Maurer–Cartan element is not Maurer–Cartan"));
    }
    Ok(image)
}

/// Outcome of comparing two components along `ψ ⊗ id`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceWitness {
    /// Columns: images of the first truncated basis in the coordinates of
    /// the second.
    pub matrix: RationalMatrix,
    pub failures: Vec<String>,
}

impl EquivalenceWitness {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks that `ψ ⊗ id` restricts to an isomorphism of truncated twisted
/// algebras commuting with every stored bracket.
pub fn verify_component_equivalence(psi: &AlgebraMorphism, c: &ComponentModel, other: &ComponentModel) -> Result<EquivalenceWitness> {
    let m = &c.base;
    if m != &other.base {
        return Err(Error::input("the two components come from different models"));
    }
    psi.verify_automorphism(&m.cohomology).map_err(|e| Error::input(format!("not an algebra automorphism: {e}")))?;
    let moved = m.map_cohomology(psi, &c.mc.element);
    if moved != other.mc.element {
        return Err(Error::input(format!(
            "ψ⊗id carries {} to {}, not to {}",
            m.space().format(&c.mc.element),
            m.space().format(&moved),
            m.space().format(&other.mc.element)
        )));
    }
    let (a, b) = (&c.truncated, &other.truncated);
    let coords = Coordinates::new(&other.embedding, m.model.dim())?;
    let mut failures = Vec::new();
    let mut images = Vec::with_capacity(a.dim());
    for j in 0..a.dim() {
        let v = m.map_cohomology(psi, &c.embedding[j]);
        match coords.solve(&v) {
            Some(w) => {
                if w.support().any(|i| b.space().degree(i) != a.space().degree(j)) {
                    failures.push(format!("the image of {} changes degree", a.space().label(j)));
                }
                images.push(w);
            }
            None => {
                failures.push(format!("the image of {} leaves the truncated model", a.space().label(j)));
                images.push(Element::zero());
            }
        }
    }
    let matrix = RationalMatrix::from_columns(b.dim(), &images.iter().map(|e| e.to_dense(b.dim())).collect::<Vec<_>>());
    if a.dim() != b.dim() || matrix.inverse().is_none() {
        failures.push("ψ⊗id is not invertible between the truncated models".into());
    }
    if failures.is_empty() {
        for k in 1..=a.arity_bound() {
            for t in sorted_tuples(a.dim(), k, |i| a.space().is_odd(i)) {
                let lhs = a.bracket_basis(&t)?.map_linear(|i| images[i].clone());
                let args: Vec<Element> = t.iter().map(|&i| images[i].clone()).collect();
                let rhs = b.bracket_eval(&args)?;
                if lhs != rhs {
                    let labels: Vec<&str> = t.iter().map(|&i| a.space().label(i)).collect();
                    failures.push(format!("brackets disagree on ({})", labels.join(", ")));
                }
            }
        }
    }
    Ok(EquivalenceWitness { matrix, failures })
}

/// One nonzero transferred bracket on homology, with the trees that
/// produce it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferredBracket {
    pub inputs: Vec<String>,
    pub output: Element,
    pub trees: Vec<TreeValue>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrouplikeReport {
    pub max_arity: usize,
    /// True when no bracket above `max_arity` can be nonzero.
    pub exhaustive: bool,
    /// The homology space the brackets live on.
    pub homology: GradedVectorSpace,
    pub brackets: Vec<TransferredBracket>,
}

impl GrouplikeReport {
    /// No nonzero bracket up to `max_arity`.
    pub fn vanishes(&self) -> bool {
        self.brackets.is_empty()
    }

    /// `Some(answer)` when the computation settles the question.
    pub fn grouplike(&self) -> Option<bool> {
        if !self.vanishes() {
            Some(false)
        } else if self.exhaustive {
            Some(true)
        } else {
            None
        }
    }
}

/// Computes every transferred bracket of arity `≤ max_arity` on the
/// component's homology. The component is group-like exactly when all of
/// them vanish.
pub fn is_grouplike(c: &ComponentModel, max_arity: usize) -> Result<GrouplikeReport> {
    let t = transfer_component(c, Some(max_arity))?;
    let problem = TransferProblem::new(&c.truncated, &t.retract)?;
    let homology = t.retract.homology().clone();
    let mut brackets = Vec::new();
    for (tuple, value) in t.structure.entries() {
        brackets.push(TransferredBracket {
            inputs: tuple.iter().map(|&i| homology.label(i).to_string()).collect(),
            output: value.clone(),
            trees: tree_provenance(&problem, tuple)?,
        });
    }
    Ok(GrouplikeReport {
        max_arity,
        exhaustive: t.structure.bound_is_exact(),
        homology,
        brackets,
    })
}

/// `A ⊗ span{1, b, db}` with `|b| = 1` and all positive products zero: a
/// CDGA quasi-isomorphic to `A` on which the homotopy is nonzero.
pub fn thicken(a: &FiniteCdga) -> Result<FiniteCdga> {
    // Primes keep the cone labels clear of those of `a`.
    let mut tag = String::from("b");
    while a.space().index_of(&tag).is_some() || a.space().index_of(&format!("d{tag}")).is_some() {
        tag.push('\'');
    }
    let dtag = format!("d{tag}");
    let space = GradedVectorSpace::new([("1", 0), (tag.as_str(), 1), (dtag.as_str(), 2)])?;
    let (b, db) = (space.require(&tag)?, space.require(&dtag)?);
    let mut d = vec![Element::zero(); 3];
    d[b] = Element::basis(db);
    let c = FiniteCdga::new("cone", space, "1", [], d)?;
    tensor_product(a, &c)
}

/// Result of comparing the closed formula with the full transfer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferAgreement {
    pub ambient: String,
    pub max_arity: usize,
    /// Labelled tuples on which the two structures differ.
    pub mismatches: Vec<Vec<String>>,
    pub multi_vertex_trees: usize,
    pub multi_vertex_evaluations: usize,
    /// Nonzero evaluations of trees with two or more internal vertices.
    pub multi_vertex_nonzero: Vec<TreeValue>,
}

impl TransferAgreement {
    pub fn holds(&self) -> bool {
        self.mismatches.is_empty() && self.multi_vertex_nonzero.is_empty()
    }
}

/// Transfers `A ⊗ L` along `K ⊗ id` from the harmonious decomposition of a
/// CDGA model `a` of `X` and compares the result with the closed-form model,
/// bracket for bracket up to `max_arity`. The homology labels of `a` must be
/// the labels of `H`.
pub fn check_closed_formula(m: &MappingSpaceModel, a: &FiniteCdga, max_arity: usize) -> Result<TransferAgreement> {
    let ambient = tensor_model(a, &m.lie)?;
    let hr = harmonious_decomposition(a)?;
    let (asp, lsp, hsp) = (a.space(), m.lie.space(), hr.homology());
    if hsp != m.cohomology.space() {
        return Err(Error::input(format!(
            "the cohomology of `{}` is not presented on the basis of `{}`",
            a.name(),
            m.cohomology.name()
        )));
    }
    let amb_sp = ambient.space();
    let pair = |h: usize, x: usize| amb_sp.require(&pair_label(asp.label(h), lsp.label(x))).expect("tensor label");
    let along = |e: &Element, x: usize| -> Element { e.terms().map(|(h, c)| (pair(h, x), c.clone())).collect() };
    let target = m.space().clone();
    let mut include = vec![Element::zero(); target.dim()];
    for (j, slot) in include.iter_mut().enumerate() {
        let (h, x) = m.parts[j];
        *slot = along(hr.retract.include_basis(h), x);
    }
    let mut project = vec![Element::zero(); amb_sp.dim()];
    let mut homotopy = vec![Element::zero(); amb_sp.dim()];
    for h in 0..asp.dim() {
        for x in 0..lsp.dim() {
            let i = pair(h, x);
            project[i] = hr.retract.project(&Element::basis(h)).terms().map(|(g, c)| (m.index[g][x], c.clone())).collect();
            homotopy[i] = along(&hr.retract.homotopy(&Element::basis(h)), x);
        }
    }
    let retract = ChainRetract::from_parts(target, include, project, homotopy)?;
    let problem = TransferProblem::new(&ambient, &retract)?;
    let transferred = transfer(&problem, max_arity)?;
    let closed = &m.model;

    let mut tuples: BTreeSet<Vec<usize>> = BTreeSet::new();
    for (t, _) in transferred.entries().chain(closed.entries()) {
        if t.len() <= max_arity {
            tuples.insert(t.clone());
        }
    }
    let mut mismatches = Vec::new();
    for t in tuples {
        if transferred.bracket_basis(&t)? != closed.bracket_basis(&t)? {
            mismatches.push(t.iter().map(|&i| m.space().label(i).to_string()).collect());
        }
    }
    let census = multi_vertex_census(&problem, max_arity)?;
    Ok(TransferAgreement {
        ambient: a.name().to_string(),
        max_arity,
        mismatches,
        multi_vertex_trees: census.trees,
        multi_vertex_evaluations: census.evaluations,
        multi_vertex_nonzero: census.nonzero,
    })
}
