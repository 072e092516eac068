//! Browser bindings. Every entry point takes the `.alg` and `.sul` texts and
//! returns a JSON string: a report on success, `{"error": {...}}` otherwise.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use rhmap_core::cdga::cohomology;
use rhmap_core::dsl::{parse_algebra, parse_sullivan};
use rhmap_core::graded::Element;
use rhmap_core::mapspace::{
    component_homotopy_ranks, component_minimal_model, euler_bookkeeping, is_grouplike, mapping_space_model, solve_mc, twist, MappingSpaceModel,
    MaurerCartanElement, McSolution,
};
use rhmap_core::qlinalg::int;
use rhmap_core::report::{component_json, grouplike_json, mc_json, model_json, Check, Report};
use rhmap_core::{Error, Result};

fn build(alg: &str, sul: &str) -> Result<(MappingSpaceModel, Vec<Check>)> {
    let a = parse_algebra(alg)?;
    let y = parse_sullivan(sul)?;
    let warnings = a.warnings.iter().chain(&y.warnings).map(Check::warning).collect();
    let h = if a.value.has_zero_differential() { a.value } else { cohomology(&a.value)? };
    Ok((mapping_space_model(&h, &y.value)?, warnings))
}

/// `Σ coefficients[i]·basis[i]` over the solution family of the MC equation.
fn family_point(m: &MappingSpaceModel, coefficients: &[i32]) -> Result<MaurerCartanElement> {
    let McSolution::Family { basis } = solve_mc(m, &[])?.solution else {
        return Err(Error::input("the Maurer–Cartan system is nonlinear; the demo only explores linear families"));
    };
    if coefficients.len() != basis.len() {
        return Err(Error::input(format!("expected {} coefficients, got {}", basis.len(), coefficients.len())));
    }
    let mut z = Element::zero();
    for (b, &c) in basis.iter().zip(coefficients) {
        z.add_scaled(b, &int(c as i64));
    }
    MaurerCartanElement::new(m, z)
}

fn render(r: Result<Report>) -> String {
    match r {
        Ok(report) => report.render(),
        Err(e) => json!({ "error": { "kind": e.kind(), "message": e.to_string() } }).to_string(),
    }
}

/// The model and its MC family.
pub fn model_report(alg: &str, sul: &str) -> Result<Report> {
    let (m, checks) = build(alg, sul)?;
    let d = solve_mc(&m, &[])?;
    Ok(Report {
        model: model_json(&m),
        mc: mc_json(&m, &d),
        components: Vec::new(),
        checks,
    })
}

/// Ranks and Sullivan model of the component at a point of the MC family.
pub fn component_report(alg: &str, sul: &str, coefficients: &[i32]) -> Result<Report> {
    let (m, checks) = build(alg, sul)?;
    let c = twist(&m, &family_point(&m, coefficients)?)?;
    let sullivan = component_minimal_model(&c)?;
    Ok(Report {
        model: Value::Null,
        mc: Value::Null,
        components: vec![component_json(&c, &component_homotopy_ranks(&c), &euler_bookkeeping(&c), Some(&sullivan))],
        checks,
    })
}

/// Transferred brackets of the component up to `max_arity`.
pub fn grouplike_report(alg: &str, sul: &str, coefficients: &[i32], max_arity: usize) -> Result<Report> {
    let (m, checks) = build(alg, sul)?;
    let c = twist(&m, &family_point(&m, coefficients)?)?;
    let mut entry = component_json(&c, &component_homotopy_ranks(&c), &euler_bookkeeping(&c), None);
    entry["grouplike"] = grouplike_json(&is_grouplike(&c, max_arity)?);
    Ok(Report {
        model: Value::Null,
        mc: Value::Null,
        components: vec![entry],
        checks,
    })
}

#[wasm_bindgen]
pub fn model(alg: &str, sul: &str) -> String {
    render(model_report(alg, sul))
}

#[wasm_bindgen]
pub fn component(alg: &str, sul: &str, coefficients: Vec<i32>) -> String {
    render(component_report(alg, sul, &coefficients))
}

#[wasm_bindgen]
pub fn grouplike(alg: &str, sul: &str, coefficients: Vec<i32>, max_arity: usize) -> String {
    render(grouplike_report(alg, sul, &coefficients, max_arity))
}

#[cfg(test)]
mod tests {
    use super::*;

    const WEDGE: &str = include_str!("../../../fixtures/wedge.alg");
    const TARGET_COHOMOLOGY: &str = include_str!("../../../fixtures/target_cohomology.alg");
    const Y: &str = include_str!("../../../fixtures/y.sul");

    fn parse(s: String) -> Value {
        serde_json::from_str(&s).unwrap()
    }

    #[test]
    fn model_lists_family() {
        let v = parse(model(TARGET_COHOMOLOGY, Y));
        assert_eq!(v["mc"]["family"]["dimension"], 2);
    }

    #[test]
    fn component_ranks_follow_coefficients() {
        assert_eq!(parse(component(WEDGE, Y, vec![0]))["components"][0]["ranks"]["2"], 1);
        assert!(parse(component(WEDGE, Y, vec![1]))["components"][0]["ranks"].get("2").is_none());
    }

    #[test]
    fn grouplike_verdict() {
        let v = parse(grouplike(TARGET_COHOMOLOGY, Y, vec![1, 0], 4));
        assert_eq!(v["components"][0]["grouplike"]["verdict"], "grouplike");
    }

    #[test]
    fn errors_are_json() {
        let v = parse(component(WEDGE, Y, vec![1, 2]));
        assert_eq!(v["error"]["kind"], "input");
        let v = parse(model("algebra {", Y));
        assert_eq!(v["error"]["kind"], "parse");
    }
}
