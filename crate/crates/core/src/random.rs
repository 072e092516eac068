//! Small random algebras for property tests and demos.
//!
//! Everything is driven by a caller-supplied [`Rng`], so a seeded generator
//! reproduces the same fixtures.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::cdga::{cohomology, FiniteCdga, Monomial, Polynomial, SullivanAlgebra};
use crate::error::{Error, Result};
use crate::graded::GradedVectorSpace;
use crate::qlinalg::int;

/// Quadratic monomials in the listed generators, by position, with degrees.
fn quadratic_monomials(gens: &[(String, i32)]) -> Vec<(Monomial, i32)> {
    let mut out = Vec::new();
    for a in 0..gens.len() {
        for b in a..gens.len() {
            if a == b && gens[a].1 % 2 != 0 {
                continue;
            }
            out.push((vec![a, b], gens[a].1 + gens[b].1));
        }
    }
    out
}

/// A minimal two-stage Sullivan algebra with 2 or 3 closed generators in
/// degrees 2 to 5 and 1 or 2 generators whose differential is a nonzero
/// quadratic polynomial in the closed ones.
pub fn two_stage_sullivan(rng: &mut impl Rng, name: &str) -> Result<SullivanAlgebra> {
    let closed = rng.gen_range(2..=3);
    let mut labels: Vec<(String, i32)> = (0..closed).map(|i| (format!("p{i}"), rng.gen_range(2..=5))).collect();
    let quads = quadratic_monomials(&labels);
    let mut degrees: Vec<i32> = quads.iter().map(|(_, d)| *d).collect();
    degrees.sort_unstable();
    degrees.dedup();
    let mut diffs = Vec::new();
    for j in 0..rng.gen_range(1..=2) {
        let target = *degrees.choose(rng).ok_or_else(|| Error::internal("no quadratic monomials"))?;
        let mut p = Polynomial::zero();
        for (m, d) in &quads {
            if *d == target {
                p.add_term(m.clone(), int(rng.gen_range(-2..=2)));
            }
        }
        if p.is_zero() {
            let (m, _) = quads.iter().find(|(_, d)| *d == target).expect("target degree is realised");
            p.add_term(m.clone(), int(1));
        }
        labels.push((format!("q{j}"), target - 1));
        diffs.push(p);
    }
    let gens = GradedVectorSpace::new(labels.iter().map(|(l, d)| (l.as_str(), *d)))?;
    // The space orders its basis by degree, so positions are remapped by label.
    let at = |i: usize| gens.require(&labels[i].0);
    let mut differential = vec![Polynomial::zero(); gens.dim()];
    for (j, p) in diffs.iter().enumerate() {
        let mut q = Polynomial::zero();
        for (m, c) in p.terms() {
            let mut m = m.iter().map(|&g| at(g)).collect::<Result<Monomial>>()?;
            m.sort_unstable();
            q.add_term(m, c.clone());
        }
        differential[at(closed + j)?] = q;
    }
    SullivanAlgebra::new(name, gens, differential)
}

/// A finite CDGA with nonzero differential and dimension in `dims`, obtained
/// by truncating a random two-stage Sullivan algebra above some degree.
pub fn finite_cdga(rng: &mut impl Rng, dims: std::ops::RangeInclusive<usize>) -> Result<FiniteCdga> {
    for _ in 0..200 {
        let s = two_stage_sullivan(rng, "S")?;
        // Dimension grows with the cut, so scan upwards until it overshoots.
        let mut fits = Vec::new();
        for cut in 2..=30 {
            let n = s.monomials_up_to(cut).len();
            if n > *dims.end() {
                break;
            }
            if n >= *dims.start() {
                fits.push(cut);
            }
        }
        fits.shuffle(rng);
        for cut in fits {
            let a = s.truncate(cut)?;
            if !a.has_zero_differential() {
                return Ok(a);
            }
        }
    }
    Err(Error::internal(format!("no truncation with dimension in {dims:?}")))
}

/// The cohomology of a random finite CDGA, a zero-differential algebra of
/// positive dimension in `dims`.
pub fn cohomology_algebra(rng: &mut impl Rng, dims: std::ops::RangeInclusive<usize>) -> Result<FiniteCdga> {
    for _ in 0..200 {
        let a = finite_cdga(rng, 4..=12)?;
        let h = cohomology(&a)?;
        if dims.contains(&h.dim()) {
            return Ok(h);
        }
    }
    Err(Error::internal(format!("no cohomology algebra with dimension in {dims:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cdga::{is_minimal, two_stage_split};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_algebras_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let s = two_stage_sullivan(&mut rng, "S").unwrap();
            assert!(is_minimal(&s));
            two_stage_split(&s).unwrap();
            let a = finite_cdga(&mut rng, 8..=12).unwrap();
            a.validate().unwrap();
            assert!((8..=12).contains(&a.dim()));
            let h = cohomology_algebra(&mut rng, 2..=6).unwrap();
            assert!(h.has_zero_differential());
        }
    }

    #[test]
    fn seeds_reproduce() {
        let a = two_stage_sullivan(&mut ChaCha8Rng::seed_from_u64(3), "S").unwrap();
        let b = two_stage_sullivan(&mut ChaCha8Rng::seed_from_u64(3), "S").unwrap();
        assert_eq!(a, b);
    }
}
