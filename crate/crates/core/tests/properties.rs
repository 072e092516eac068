//! Property tests over seeded random algebras.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rhmap_core::cdga::{cohomology, harmonious_decomposition, AlgebraMorphism, FiniteCdga, SullivanAlgebra};
use rhmap_core::dsl::parse_sullivan;
use rhmap_core::graded::Element;
use rhmap_core::linfty::{ce_construct_named, ce_dual, check_jacobi, tensor_model, verify_two_stage_vanishing};
use rhmap_core::mapspace::{
    apply_automorphism, check_closed_formula, mapping_space_model, solve_mc, twist, verify_component_equivalence, MappingSpaceModel, MaurerCartanElement,
    McSolution,
};
use rhmap_core::qlinalg::int;
use rhmap_core::random::{cohomology_algebra, finite_cdga, two_stage_sullivan};
use rhmap_core::transfer::enumerate_trees;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_model(r: &mut ChaCha8Rng) -> MappingSpaceModel {
    let h = cohomology_algebra(r, 2..=5).unwrap();
    let y = two_stage_sullivan(r, "Y").unwrap();
    mapping_space_model(&h, &y).unwrap()
}

/// A random point of the solution family, or `None` if the system is not
/// linear.
fn random_mc(r: &mut ChaCha8Rng, m: &MappingSpaceModel) -> Option<MaurerCartanElement> {
    let d = solve_mc(m, &[]).unwrap();
    let McSolution::Family { basis } = d.solution else { return None };
    let mut z = Element::zero();
    for b in &basis {
        z.add_scaled(b, &int(r.gen_range(-2..=2)));
    }
    Some(MaurerCartanElement::new(m, z).unwrap())
}

/// `x ↦ λ^{|x|} x`, an automorphism of every graded algebra.
fn weight_scaling(h: &FiniteCdga, lambda: i64) -> AlgebraMorphism {
    let sp = h.space();
    AlgebraMorphism::from_images((0..sp.dim()).map(|i| Element::term(i, int(lambda.pow(sp.degree(i) as u32)))).collect())
}

fn same_structure(a: &SullivanAlgebra, b: &SullivanAlgebra) -> bool {
    a.generators() == b.generators() && (0..a.generators().dim()).all(|g| a.d_generator(g) == b.d_generator(g))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ce_dual_of_random_target_satisfies_jacobi(seed in any::<u64>()) {
        let y = two_stage_sullivan(&mut rng(seed), "Y").unwrap();
        let l = ce_dual(&y).unwrap();
        prop_assert!(check_jacobi(&l, 4).passed());
        prop_assert!(verify_two_stage_vanishing(&l, 4).passed());
        prop_assert!(same_structure(&ce_construct_named(&l, "Y").unwrap(), &y));
    }

    #[test]
    fn mapping_space_model_satisfies_jacobi(seed in any::<u64>()) {
        let m = random_model(&mut rng(seed));
        prop_assert!(check_jacobi(m.model(), 3).passed());
    }

    #[test]
    fn retract_identities_hold(seed in any::<u64>()) {
        let a = finite_cdga(&mut rng(seed), 8..=12).unwrap();
        let hr = harmonious_decomposition(&a).unwrap();
        prop_assert!(hr.verify().is_ok());
        prop_assert!(hr.cohomology_algebra().validate().is_ok());
    }

    #[test]
    fn twisted_differential_squares_to_zero(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = random_model(&mut r);
        if let Some(mc) = random_mc(&mut r, &m) {
            prop_assert!(mc.is_certified());
            let c = twist(&m, &mc).unwrap();
            for l in [&c.twisted, &c.truncated] {
                for i in 0..l.dim() {
                    prop_assert!(l.differential(&l.differential(&Element::basis(i))).is_zero());
                }
            }
        }
    }

    #[test]
    fn automorphisms_move_mc_elements_to_equivalent_components(seed in any::<u64>(), lambda in prop::sample::select(vec![-1i64, 2, 3])) {
        let mut r = rng(seed);
        let m = random_model(&mut r);
        if let Some(mc) = random_mc(&mut r, &m) {
            let psi = weight_scaling(m.cohomology(), lambda);
            let moved = apply_automorphism(&psi, &m, &mc).unwrap();
            prop_assert!(moved.is_certified());
            let (c, other) = (twist(&m, &mc).unwrap(), twist(&m, &moved).unwrap());
            prop_assert!(verify_component_equivalence(&psi, &c, &other).unwrap().holds());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn tensor_ambient_satisfies_jacobi_and_transfers_to_closed_formula(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = finite_cdga(&mut r, 5..=7).unwrap();
        let y = two_stage_sullivan(&mut r, "Y").unwrap();
        let ambient = tensor_model(&a, &ce_dual(&y).unwrap()).unwrap();
        prop_assert!(check_jacobi(&ambient, 3).passed());
        let m = mapping_space_model(&cohomology(&a).unwrap(), &y).unwrap();
        let t = check_closed_formula(&m, &a, 3).unwrap();
        prop_assert!(t.holds(), "{:?}", t.mismatches);
    }
}

#[test]
fn at_least_twenty_random_fixtures_pass_jacobi() {
    let mut checked = 0;
    for seed in 0..20 {
        let mut r = rng(seed);
        let y = two_stage_sullivan(&mut r, "Y").unwrap();
        assert!(check_jacobi(&ce_dual(&y).unwrap(), 4).passed());
        assert!(check_jacobi(random_model(&mut r).model(), 3).passed());
        checked += 2;
    }
    assert!(checked >= 20);
}

#[test]
fn tree_census_matches_labelled_count() {
    // Total partitions of a k-set: 1, 4, 26 labelled trees.
    for (k, classes, labelled) in [(2usize, 1usize, 1u64), (3, 2, 4), (4, 5, 26)] {
        let trees = enumerate_trees(k, k);
        assert_eq!(trees.len(), classes);
        let fact: u64 = (1..=k as u64).product();
        assert_eq!(trees.iter().map(|(_, aut)| fact / aut).sum::<u64>(), labelled);
    }
}

#[test]
fn ce_round_trip_on_target_fixture() {
    let y = parse_sullivan(include_str!("../../../fixtures/y.sul")).unwrap().value;
    let back = ce_construct_named(&ce_dual(&y).unwrap(), y.name()).unwrap();
    assert!(same_structure(&back, &y));
}
