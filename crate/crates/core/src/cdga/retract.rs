use std::collections::{BTreeMap, HashSet};

use crate::error::{Error, Result};
use crate::graded::{Element, GradedVectorSpace};
use crate::qlinalg::{extend_basis, Rational, RationalMatrix};

use super::FiniteCdga;

/// Deformation retract `(i, q, K)` of a finite complex `(C, d)` onto a
/// chosen copy of its homology.
///
/// Built per degree from a splitting `C_n = U_n ⊕ dU ⊕ H_n` where `U_n`
/// completes the cycles to `C_n` with standard basis vectors, `dU` is the
/// image of `d`, and `H_n` completes the boundaries to the cycles with
/// kernel vectors in order. `K` inverts `d` on `dU` and vanishes on
/// `U ⊕ H`, so `K∘i = 0`, `q∘K = 0` and `K∘K = 0` hold along with
/// `q∘i = id` and `id − i∘q = dK + Kd`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainRetract {
    homology: GradedVectorSpace,
    /// `i(h_j)` in ambient coordinates.
    include: Vec<Element>,
    /// `q(e_a)` in homology coordinates.
    project: Vec<Element>,
    /// `K(e_a)` in ambient coordinates.
    homotopy: Vec<Element>,
    ambient_dim: usize,
}

impl ChainRetract {
    /// `d_degree` is `+1` for cohomological differentials and `-1` for
    /// `ℓ₁` of an L∞-algebra.
    pub fn build(space: &GradedVectorSpace, d: &[Element], d_degree: i32) -> Result<Self> {
        let n = space.dim();
        if d.len() != n {
            return Err(Error::input("differential size does not match the space"));
        }
        let degrees: Vec<i32> = space.degrees().into_iter().collect();
        let local = |deg: i32| -> (Vec<usize>, BTreeMap<usize, usize>) {
            let idx = space.slice(deg);
            let pos = idx.iter().enumerate().map(|(p, &g)| (g, p)).collect();
            (idx, pos)
        };

        // cycles and a standard-vector complement per degree
        let mut complement: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
        let mut cycles: BTreeMap<i32, Vec<Vec<Rational>>> = BTreeMap::new();
        for &deg in &degrees {
            let (idx, _) = local(deg);
            let (tidx, tpos) = local(deg + d_degree);
            let mut m = RationalMatrix::zeros(tidx.len(), idx.len());
            for (c, &g) in idx.iter().enumerate() {
                for (t, x) in d[g].terms() {
                    let r = *tpos.get(&t).ok_or_else(|| {
                        Error::invariant(format!("d({}) leaves degree {}", space.label(g), deg + d_degree))
                    })?;
                    m.set(r, c, x.clone());
                }
            }
            let z = m.kernel_basis();
            let units: Vec<Vec<Rational>> = (0..idx.len()).map(|p| unit(idx.len(), p)).collect();
            let u: Vec<usize> = extend_basis(&z, &units, idx.len()).into_iter().map(|p| idx[p]).collect();
            complement.insert(deg, u);
            cycles.insert(deg, z);
        }

        let mut include = Vec::new();
        let mut labels: Vec<(String, i32)> = Vec::new();
        let mut project = vec![Element::zero(); n];
        let mut homotopy = vec![Element::zero(); n];
        let mut used: HashSet<String> = space.basis().iter().map(|b| b.label.clone()).collect();

        for &deg in &degrees {
            let (idx, pos) = local(deg);
            let dim = idx.len();
            let to_local = |e: &Element| -> Vec<Rational> {
                let mut v = vec![Rational::default(); dim];
                for (g, x) in e.terms() {
                    v[pos[&g]] = x.clone();
                }
                v
            };
            let u_here: Vec<Vec<Rational>> = complement[&deg].iter().map(|&g| unit(dim, pos[&g])).collect();
            let sources: Vec<usize> = complement.get(&(deg - d_degree)).cloned().unwrap_or_default();
            let boundaries: Vec<Vec<Rational>> = sources.iter().map(|&g| to_local(&d[g])).collect();
            let z = &cycles[&deg];
            let h_pick = extend_basis(&boundaries, z, dim);
            let reps: Vec<Vec<Rational>> = h_pick.iter().map(|&p| z[p].clone()).collect();

            let h_offset = include.len();
            for (k, rep) in reps.iter().enumerate() {
                let elem: Element = rep.iter().enumerate().map(|(p, x)| (idx[p], x.clone())).collect();
                let label = match single_unit(&elem) {
                    Some(g) => space.label(g).to_string(),
                    None => fresh_label(&mut used, &format!("h{deg}_{k}")),
                };
                used.insert(label.clone());
                labels.push((label, deg));
                include.push(elem);
            }

            let mut cols = u_here.clone();
            cols.extend(boundaries.iter().cloned());
            cols.extend(reps.iter().cloned());
            if cols.len() != dim {
                return Err(Error::internal(format!("splitting in degree {deg} has {} of {dim} vectors", cols.len())));
            }
            if dim == 0 {
                continue;
            }
            let inv = RationalMatrix::from_columns(dim, &cols)
                .inverse()
                .ok_or_else(|| Error::internal(format!("splitting in degree {deg} is not a basis")))?;
            let nb = boundaries.len();
            let nu = u_here.len();
            for (p, &g) in idx.iter().enumerate() {
                let coords = inv.column(p);
                let mut k = Element::zero();
                for (j, src) in sources.iter().enumerate() {
                    k.add_term(*src, coords[nu + j].clone());
                }
                homotopy[g] = k;
                let mut q = Element::zero();
                for j in 0..reps.len() {
                    q.add_term(h_offset + j, coords[nu + nb + j].clone());
                }
                project[g] = q;
            }
        }

        // Homology basis is sorted by (degree, label); reorder include/project.
        let homology = GradedVectorSpace::new(labels.iter().cloned())?;
        let perm: Vec<usize> = labels.iter().map(|(l, _)| homology.index_of(l).unwrap()).collect();
        let mut sorted_include = vec![Element::zero(); include.len()];
        for (old, e) in include.into_iter().enumerate() {
            sorted_include[perm[old]] = e;
        }
        let project = project.into_iter().map(|e| e.map_linear(|j| Element::basis(perm[j]))).collect();
        Ok(ChainRetract {
            homology,
            include: sorted_include,
            project,
            homotopy,
            ambient_dim: n,
        })
    }

    /// The retract with `i = q = id` and `K = 0`.
    pub fn trivial(space: &GradedVectorSpace) -> Self {
        let n = space.dim();
        ChainRetract {
            homology: space.clone(),
            include: (0..n).map(Element::basis).collect(),
            project: (0..n).map(Element::basis).collect(),
            homotopy: vec![Element::zero(); n],
            ambient_dim: n,
        }
    }

    /// Assembles a retract from explicit maps.
    pub fn from_parts(
        homology: GradedVectorSpace,
        include: Vec<Element>,
        project: Vec<Element>,
        homotopy: Vec<Element>,
    ) -> Result<Self> {
        if include.len() != homology.dim() || project.len() != homotopy.len() {
            return Err(Error::input("retract maps have inconsistent sizes"));
        }
        let ambient_dim = project.len();
        Ok(ChainRetract {
            homology,
            include,
            project,
            homotopy,
            ambient_dim,
        })
    }

    pub fn homology(&self) -> &GradedVectorSpace {
        &self.homology
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn include(&self, x: &Element) -> Element {
        x.map_linear(|j| self.include[j].clone())
    }

    pub fn project(&self, x: &Element) -> Element {
        x.map_linear(|a| self.project[a].clone())
    }

    pub fn homotopy(&self, x: &Element) -> Element {
        x.map_linear(|a| self.homotopy[a].clone())
    }

    pub fn include_basis(&self, j: usize) -> &Element {
        &self.include[j]
    }

    pub fn homotopy_is_zero(&self) -> bool {
        self.homotopy.iter().all(Element::is_zero)
    }

    /// Checks the five retract identities on every basis element; `d` is
    /// the ambient differential.
    pub fn verify(&self, d: impl Fn(&Element) -> Element) -> Result<()> {
        for j in 0..self.homology.dim() {
            let h = Element::basis(j);
            if self.project(&self.include(&h)) != h {
                return Err(Error::invariant(format!("q∘i ≠ id on {}", self.homology.label(j))));
            }
            if !self.homotopy(&self.include(&h)).is_zero() {
                return Err(Error::invariant(format!("K∘i ≠ 0 on {}", self.homology.label(j))));
            }
        }
        for a in 0..self.ambient_dim {
            let x = Element::basis(a);
            let lhs = x.sub(&self.include(&self.project(&x)));
            let mut rhs = d(&self.homotopy(&x));
            rhs.add_assign(&self.homotopy(&d(&x)));
            if lhs != rhs {
                return Err(Error::invariant(format!("id − i∘q ≠ dK + Kd on basis element {a}")));
            }
            if !self.project(&self.homotopy(&x)).is_zero() {
                return Err(Error::invariant(format!("q∘K ≠ 0 on basis element {a}")));
            }
            if !self.homotopy(&self.homotopy(&x)).is_zero() {
                return Err(Error::invariant(format!("K∘K ≠ 0 on basis element {a}")));
            }
        }
        Ok(())
    }
}

fn unit(n: usize, p: usize) -> Vec<Rational> {
    let mut v = vec![Rational::default(); n];
    v[p] = Rational::from_integer(1.into());
    v
}

fn single_unit(e: &Element) -> Option<usize> {
    let mut terms = e.terms();
    let (g, c) = terms.next()?;
    (terms.next().is_none() && *c == Rational::from_integer(1.into())).then_some(g)
}

fn fresh_label(used: &mut HashSet<String>, base: &str) -> String {
    let mut label = base.to_string();
    while used.contains(&label) {
        label.push('\'');
    }
    label
}

/// A CDGA together with its deformation retract onto cohomology.
#[derive(Debug, Clone)]
pub struct HomotopyRetract {
    pub ambient: FiniteCdga,
    pub retract: ChainRetract,
}

impl HomotopyRetract {
    pub fn homology(&self) -> &GradedVectorSpace {
        self.retract.homology()
    }

    pub fn verify(&self) -> Result<()> {
        self.retract.verify(|x| self.ambient.d(x))
    }

    /// `H` with the induced product `h·h' = q(i(h)·i(h'))` and `d = 0`.
    pub fn cohomology_algebra(&self) -> FiniteCdga {
        let h = self.retract.homology().clone();
        let n = h.dim();
        let mut products = Vec::new();
        for a in 0..n {
            for b in 0..n {
                let p = self.ambient.mul(self.retract.include_basis(a), self.retract.include_basis(b));
                let v = self.retract.project(&p);
                if !v.is_zero() {
                    products.push(((a, b), v));
                }
            }
        }
        let unit_rep = Element::basis(self.ambient.unit());
        let unit_label = (0..n)
            .find(|&j| *self.retract.include_basis(j) == unit_rep)
            .map(|j| h.label(j).to_string())
            .expect("the unit is a cocycle that is never a coboundary");
        FiniteCdga::with_zero_differential(format!("H({})", self.ambient.name()), h, &unit_label, products)
            .expect("cohomology of a valid CDGA is a valid CDGA")
    }
}

/// Splits `A = B ⊕ dB ⊕ H` and returns the induced retract onto `H`.
pub fn harmonious_decomposition(a: &FiniteCdga) -> Result<HomotopyRetract> {
    let d: Vec<Element> = (0..a.dim()).map(|i| a.d_basis(i).clone()).collect();
    let retract = ChainRetract::build(a.space(), &d, 1)?;
    Ok(HomotopyRetract {
        ambient: a.clone(),
        retract,
    })
}
