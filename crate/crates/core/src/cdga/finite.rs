use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graded::{Element, GradedVectorSpace};
use crate::qlinalg::{int, Rational, RationalMatrix};

/// A finite-dimensional commutative DGA over Q with a distinguished unit in
/// degree 0. Degrees are cohomological: `d` raises degree by one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteCdga {
    name: String,
    space: GradedVectorSpace,
    unit: usize,
    /// Nonzero products on ordered basis pairs, both orders stored.
    products: BTreeMap<(usize, usize), Element>,
    differential: Vec<Element>,
}

impl FiniteCdga {
    /// Builds an algebra from a partial product table.
    ///
    /// Products with the unit are implied. A product given for `(a, b)` but
    /// not for `(b, a)` is completed by graded commutativity; if both orders
    /// are given they must agree. Basis pairs without an entry multiply to
    /// zero. The result is fully validated.
    pub fn new(
        name: impl Into<String>,
        space: GradedVectorSpace,
        unit_label: &str,
        given: impl IntoIterator<Item = ((usize, usize), Element)>,
        differential: Vec<Element>,
    ) -> Result<Self> {
        let unit = space.require(unit_label)?;
        if space.degree(unit) != 0 {
            return Err(Error::invariant(format!("unit `{unit_label}` must have degree 0")));
        }
        if differential.len() != space.dim() {
            return Err(Error::input("differential must give one image per basis element"));
        }
        let n = space.dim();
        let mut products: BTreeMap<(usize, usize), Element> = BTreeMap::new();
        let mut explicit: BTreeMap<(usize, usize), Element> = BTreeMap::new();
        for ((a, b), v) in given {
            if a >= n || b >= n {
                return Err(Error::input("product index out of range"));
            }
            if let Some(prev) = explicit.insert((a, b), v.clone()) {
                if prev != v {
                    return Err(Error::invariant(format!(
                        "product {}*{} given twice with different values",
                        space.label(a),
                        space.label(b)
                    )));
                }
            }
        }
        for (&(a, b), v) in &explicit {
            let swap = if space.is_odd(a) && space.is_odd(b) { int(-1) } else { int(1) };
            let mirrored = v.scaled(&swap);
            if a == b {
                if mirrored != *v {
                    return Err(Error::invariant(format!(
                        "graded commutativity fails on {0}*{0}: an odd element must square to zero",
                        space.label(a)
                    )));
                }
            } else if let Some(other) = explicit.get(&(b, a)) {
                if *other != mirrored {
                    return Err(Error::invariant(format!(
                        "graded commutativity fails on the pair ({}, {})",
                        space.label(a),
                        space.label(b)
                    )));
                }
            }
            if !v.is_zero() {
                products.insert((a, b), v.clone());
                products.insert((b, a), mirrored);
            }
        }
        for x in 0..n {
            for key in [(unit, x), (x, unit)] {
                match products.get(&key) {
                    Some(v) if *v != Element::basis(x) => {
                        return Err(Error::invariant(format!(
                            "unit law fails: {}*{} is not {}",
                            space.label(key.0),
                            space.label(key.1),
                            space.label(x)
                        )))
                    }
                    _ => {
                        products.insert(key, Element::basis(x));
                    }
                }
            }
        }
        let alg = FiniteCdga {
            name: name.into(),
            space,
            unit,
            products,
            differential,
        };
        alg.validate()?;
        Ok(alg)
    }

    /// The cohomology algebra shape: `d = 0`.
    pub fn with_zero_differential(
        name: impl Into<String>,
        space: GradedVectorSpace,
        unit_label: &str,
        given: impl IntoIterator<Item = ((usize, usize), Element)>,
    ) -> Result<Self> {
        let n = space.dim();
        Self::new(name, space, unit_label, given, vec![Element::zero(); n])
    }

    /// The ground field Q, i.e. the cohomology of a point.
    pub fn point() -> Self {
        let space = GradedVectorSpace::new([("1", 0)]).expect("single label");
        Self::with_zero_differential("point", space, "1", []).expect("valid")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn space(&self) -> &GradedVectorSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    pub fn product_table(&self) -> &BTreeMap<(usize, usize), Element> {
        &self.products
    }

    pub fn d_basis(&self, i: usize) -> &Element {
        &self.differential[i]
    }

    pub fn has_zero_differential(&self) -> bool {
        self.differential.iter().all(Element::is_zero)
    }

    pub fn mul_basis(&self, a: usize, b: usize) -> Element {
        self.products.get(&(a, b)).cloned().unwrap_or_default()
    }

    pub fn mul(&self, x: &Element, y: &Element) -> Element {
        let mut out = Element::zero();
        for (a, ca) in x.terms() {
            for (b, cb) in y.terms() {
                if let Some(p) = self.products.get(&(a, b)) {
                    out.add_scaled(p, &(ca * cb));
                }
            }
        }
        out
    }

    /// Left-to-right product of basis elements.
    pub fn mul_many(&self, factors: &[usize]) -> Element {
        let mut acc = Element::basis(self.unit);
        for &f in factors {
            acc = self.mul(&acc, &Element::basis(f));
            if acc.is_zero() {
                break;
            }
        }
        acc
    }

    pub fn d(&self, x: &Element) -> Element {
        x.map_linear(|i| self.differential[i].clone())
    }

    /// Matrix of `d` in the full basis (columns are images).
    pub fn d_matrix(&self) -> RationalMatrix {
        let n = self.dim();
        let cols: Vec<Vec<Rational>> = self.differential.iter().map(|e| e.to_dense(n)).collect();
        RationalMatrix::from_columns(n, &cols)
    }

    /// Largest `N` such that some product of `N` positive-degree basis
    /// elements is nonzero.
    pub fn nilpotency_length(&self) -> usize {
        let positive: Vec<usize> = (0..self.dim()).filter(|&i| i != self.unit).collect();
        let mut layer: Vec<Element> = positive.iter().map(|&i| Element::basis(i)).collect();
        let mut len = 0;
        while layer.iter().any(|e| !e.is_zero()) && len <= self.dim() {
            len += 1;
            let mut next = Vec::new();
            for e in &layer {
                for &p in &positive {
                    let prod = self.mul(e, &Element::basis(p));
                    if !prod.is_zero() {
                        next.push(prod);
                    }
                }
            }
            layer = next;
        }
        len
    }

    /// Checks degrees, graded commutativity, associativity, the unit law,
    /// `d² = 0` and the Leibniz rule on basis elements.
    pub fn validate(&self) -> Result<()> {
        let s = &self.space;
        let n = s.dim();
        let lbl = |i: usize| s.label(i).to_string();
        for i in 0..n {
            let di = &self.differential[i];
            if !di.is_zero() && s.homogeneous_degree(di) != Some(s.degree(i) + 1) {
                return Err(Error::invariant(format!("d({}) does not have degree {}", lbl(i), s.degree(i) + 1)));
            }
            if !self.d(di).is_zero() {
                return Err(Error::invariant(format!("d² ≠ 0 on {}", lbl(i))));
            }
        }
        for (&(a, b), v) in &self.products {
            if s.homogeneous_degree(v) != Some(s.degree(a) + s.degree(b)) {
                return Err(Error::invariant(format!("{}*{} has the wrong degree", lbl(a), lbl(b))));
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = self.mul_basis(a, b);
                let ba = self.mul_basis(b, a);
                let sign = if s.is_odd(a) && s.is_odd(b) { int(-1) } else { int(1) };
                if ab != ba.scaled(&sign) {
                    return Err(Error::invariant(format!(
                        "graded commutativity fails on the pair ({}, {})",
                        lbl(a),
                        lbl(b)
                    )));
                }
                // d(ab) = d(a) b + (-1)^{|a|} a d(b)
                let lhs = self.d(&ab);
                let mut rhs = self.mul(&self.differential[a], &Element::basis(b));
                let sa = if s.is_odd(a) { int(-1) } else { int(1) };
                rhs.add_scaled(&self.mul(&Element::basis(a), &self.differential[b]), &sa);
                if lhs != rhs {
                    return Err(Error::invariant(format!("Leibniz rule fails on the pair ({}, {})", lbl(a), lbl(b))));
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = self.mul_basis(a, b);
                for c in 0..n {
                    let left = self.mul(&ab, &Element::basis(c));
                    let right = self.mul(&Element::basis(a), &self.mul_basis(b, c));
                    if left != right {
                        return Err(Error::invariant(format!(
                            "associativity fails on ({}, {}, {})",
                            lbl(a),
                            lbl(b),
                            lbl(c)
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// `A ⊗ B` with the Koszul product `(a⊗b)(a'⊗b') = (−1)^{|b||a'|} aa'⊗bb'`
/// and `d(a⊗b) = da⊗b + (−1)^{|a|} a⊗db`.
///
/// Labels: `a⊗1` keeps the label of `a`, `1⊗b` the label of `b`, and other
/// pairs become `a.b`.
pub fn tensor_product(a: &FiniteCdga, b: &FiniteCdga) -> Result<FiniteCdga> {
    let (sa, sb) = (a.space(), b.space());
    let label = |i: usize, j: usize| -> String {
        if j == b.unit {
            sa.label(i).to_string()
        } else if i == a.unit {
            sb.label(j).to_string()
        } else {
            format!("{}.{}", sa.label(i), sb.label(j))
        }
    };
    let pairs: Vec<(usize, usize)> = (0..a.dim()).flat_map(|i| (0..b.dim()).map(move |j| (i, j))).collect();
    let space = GradedVectorSpace::new(pairs.iter().map(|&(i, j)| (label(i, j), sa.degree(i) + sb.degree(j))))?;
    let mut index = vec![vec![0usize; b.dim()]; a.dim()];
    for &(i, j) in &pairs {
        index[i][j] = space.require(&label(i, j))?;
    }
    let embed = |x: &Element, y: &Element, c: i64| -> Element {
        let mut out = Element::zero();
        for (i, ci) in x.terms() {
            for (j, cj) in y.terms() {
                out.add_term(index[i][j], ci * cj * int(c));
            }
        }
        out
    };
    let mut products = Vec::new();
    for &(i, j) in &pairs {
        for &(k, l) in &pairs {
            let sign = if sb.is_odd(j) && sa.is_odd(k) { -1 } else { 1 };
            let v = embed(&a.mul_basis(i, k), &b.mul_basis(j, l), sign);
            if !v.is_zero() {
                products.push(((index[i][j], index[k][l]), v));
            }
        }
    }
    let mut differential = vec![Element::zero(); space.dim()];
    for &(i, j) in &pairs {
        let mut v = embed(a.d_basis(i), &Element::basis(j), 1);
        v.add_assign(&embed(&Element::basis(i), b.d_basis(j), if sa.is_odd(i) { -1 } else { 1 }));
        differential[index[i][j]] = v;
    }
    let unit = label(a.unit, b.unit);
    FiniteCdga::new(format!("{}⊗{}", a.name(), b.name()), space, &unit, products, differential)
}

/// A degree-preserving linear map between finite CDGAs, given by the image
/// of each source basis vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraMorphism {
    images: Vec<Element>,
}

impl AlgebraMorphism {
    pub fn identity(a: &FiniteCdga) -> Self {
        AlgebraMorphism {
            images: (0..a.dim()).map(Element::basis).collect(),
        }
    }

    /// Builds a morphism from `(source label, image)` overrides on top of the
    /// identity.
    pub fn from_overrides(a: &FiniteCdga, overrides: impl IntoIterator<Item = (usize, Element)>) -> Self {
        let mut m = Self::identity(a);
        for (i, img) in overrides {
            m.images[i] = img;
        }
        m
    }

    pub fn from_images(images: Vec<Element>) -> Self {
        AlgebraMorphism { images }
    }

    pub fn image(&self, i: usize) -> &Element {
        &self.images[i]
    }

    pub fn apply(&self, x: &Element) -> Element {
        x.map_linear(|i| self.images[i].clone())
    }

    pub fn matrix(&self, n: usize) -> RationalMatrix {
        let cols: Vec<Vec<Rational>> = self.images.iter().map(|e| e.to_dense(n)).collect();
        RationalMatrix::from_columns(n, &cols)
    }

    /// Checks that `self` is a degree-0 unital algebra automorphism of `a`
    /// commuting with `d`.
    pub fn verify_automorphism(&self, a: &FiniteCdga) -> Result<()> {
        let s = a.space();
        let n = a.dim();
        if self.images.len() != n {
            return Err(Error::input("morphism size does not match the algebra"));
        }
        for i in 0..n {
            let img = &self.images[i];
            if img.support().any(|j| j >= n) {
                return Err(Error::input("morphism image outside the algebra"));
            }
            if !img.is_zero() && s.homogeneous_degree(img) != Some(s.degree(i)) {
                return Err(Error::input(format!("image of {} is not of degree {}", s.label(i), s.degree(i))));
            }
        }
        if self.images[a.unit()] != Element::basis(a.unit()) {
            return Err(Error::input("morphism does not preserve the unit"));
        }
        for x in 0..n {
            for y in 0..n {
                let lhs = self.apply(&a.mul_basis(x, y));
                let rhs = a.mul(&self.images[x], &self.images[y]);
                if lhs != rhs {
                    return Err(Error::input(format!(
                        "morphism does not commute with the product on ({}, {})",
                        s.label(x),
                        s.label(y)
                    )));
                }
            }
            if self.apply(a.d_basis(x)) != a.d(&self.images[x]) {
                return Err(Error::input(format!("morphism does not commute with d on {}", s.label(x))));
            }
        }
        if self.matrix(n).inverse().is_none() {
            return Err(Error::input("morphism is not invertible"));
        }
        Ok(())
    }
}

impl Default for FiniteCdga {
    fn default() -> Self {
        Self::point()
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// H*(S²∨S²∨S⁵).
    pub fn wedge() -> FiniteCdga {
        let space = GradedVectorSpace::new([("1", 0), ("e2", 2), ("e2p", 2), ("e5", 5)]).unwrap();
        FiniteCdga::with_zero_differential("wedge", space, "1", []).unwrap()
    }

    /// span{1, b, db}
    pub fn contractible() -> FiniteCdga {
        let space = GradedVectorSpace::new([("1", 0), ("b", 2), ("db", 3)]).unwrap();
        let db = space.index_of("db").unwrap();
        let mut d = vec![Element::zero(); 3];
        d[space.index_of("b").unwrap()] = Element::basis(db);
        FiniteCdga::new("contractible", space, "1", [], d).unwrap()
    }

    #[test]
    fn wedge_is_valid() {
        let w = wedge();
        assert_eq!(w.dim(), 4);
        assert_eq!(w.nilpotency_length(), 1);
        let e2 = w.space().index_of("e2").unwrap();
        assert!(w.mul_basis(e2, e2).is_zero());
    }

    #[test]
    fn odd_square_is_rejected() {
        let space = GradedVectorSpace::new([("1", 0), ("a", 3), ("b", 6)]).unwrap();
        let (a, b) = (space.index_of("a").unwrap(), space.index_of("b").unwrap());
        let err = FiniteCdga::with_zero_differential("bad", space, "1", [((a, a), Element::basis(b))]).unwrap_err();
        assert!(matches!(err, Error::Invariant(ref m) if m.contains("a*a")), "{err}");
    }

    #[test]
    fn broken_leibniz_is_rejected() {
        // d b = c, b*b = e, b*c = f and d e = 0, yet d(b*b) should be 2f
        let space = GradedVectorSpace::new([("1", 0), ("b", 2), ("c", 3), ("e", 4), ("f", 5)]).unwrap();
        let ix = |l| space.index_of(l).unwrap();
        let (b, c, e, f) = (ix("b"), ix("c"), ix("e"), ix("f"));
        let mut d = vec![Element::zero(); 5];
        d[b] = Element::basis(c);
        let products = [((b, b), Element::basis(e)), ((b, c), Element::basis(f))];
        let err = FiniteCdga::new("bad", space, "1", products, d).unwrap_err();
        assert!(matches!(err, Error::Invariant(_)));
    }

    #[test]
    fn automorphism_checks() {
        let w = wedge();
        let e5 = w.space().index_of("e5").unwrap();
        let psi = AlgebraMorphism::from_overrides(&w, [(e5, Element::term(e5, int(2)))]);
        psi.verify_automorphism(&w).unwrap();
        let zero = AlgebraMorphism::from_overrides(&w, [(e5, Element::zero())]);
        assert!(zero.verify_automorphism(&w).is_err());
    }

    #[test]
    fn tensor_with_contractible_keeps_cohomology() {
        let w = wedge();
        let t = tensor_product(&w, &contractible()).unwrap();
        assert_eq!(t.dim(), 12);
        assert_eq!(t.name(), "wedge⊗contractible");
        let ix = |l| t.space().index_of(l).unwrap();
        assert_eq!(t.d(&Element::basis(ix("e5.b"))), Element::term(ix("e5.db"), int(-1)));
        assert_eq!(t.mul_basis(ix("e2"), ix("b")), Element::basis(ix("e2.b")));
        let h = crate::cdga::cohomology(&t).unwrap();
        assert_eq!(h.space(), w.space());
    }

    #[test]
    fn unit_is_implicit() {
        let w = wedge();
        let e2 = w.space().index_of("e2").unwrap();
        assert_eq!(w.mul_basis(w.unit(), e2), Element::basis(e2));
        assert_eq!(w.mul(&Element::basis(e2), &Element::basis(w.unit())), Element::basis(e2));
    }
}
