//! Canonical JSON reports.
//!
//! Every report has the top-level keys `model`, `mc`, `components` and
//! `checks`. Objects are emitted with sorted keys, rationals as `"p/q"`
//! strings (`"p"` for integers) and model basis elements as `h@l`. The
//! model section embeds the canonical text of both inputs so that later
//! commands can rebuild the model from the report alone.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use crate::cdga::{FiniteCdga, SullivanAlgebra};
use crate::dsl::{parse_algebra, parse_sullivan, render_algebra, render_sullivan, Diagnostic};
use crate::error::{Error, Result};
use crate::graded::{Element, GradedVectorSpace};
use crate::linfty::{BracketTerm, LInfinityAlgebra};
use crate::mapspace::{
    mapping_space_model, ComponentModel, EquivalenceWitness, EulerCheck, GrouplikeReport, MappingSpaceModel, McDescription, McSolution, TransferAgreement,
};
use crate::qlinalg::{format_rational, RationalMatrix};
use crate::transfer::TreeValue;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Comparison with an expected value supplied by the caller.
    Agree,
    Disagree,
    Inconclusive,
    Warning,
    Note,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Agree => "agree",
            Status::Disagree => "disagree",
            Status::Inconclusive => "inconclusive",
            Status::Warning => "warning",
            Status::Note => "note",
        }
    }

    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, status: Status, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            status,
            detail: detail.into(),
        }
    }

    pub fn warning(d: &Diagnostic) -> Self {
        Check::new("parse_warning", Status::Warning, d.to_string())
    }

    pub fn to_json(&self) -> Value {
        json!({ "name": self.name, "status": self.status.as_str(), "detail": self.detail })
    }
}

/// A report under construction.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub model: Value,
    pub mc: Value,
    pub components: Vec<Value>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn to_json(&self) -> Value {
        json!({
            "model": self.model,
            "mc": self.mc,
            "components": self.components,
            "checks": self.checks.iter().map(Check::to_json).collect::<Vec<_>>(),
        })
    }

    /// Pretty-printed with sorted keys and a trailing newline.
    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("values serialize");
        s.push('\n');
        s
    }

    pub fn has_failures(&self) -> bool {
        self.checks.iter().any(|c| c.status == Status::Fail)
    }

    /// Reads back a rendered report, keeping its sections.
    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| Error::input("a report must be a JSON object"))?;
        let checks = obj
            .get("checks")
            .and_then(Value::as_array)
            .map(|a| {
                a.iter()
                    .map(|c| {
                        let status = match c["status"].as_str().unwrap_or("note") {
                            "pass" => Status::Pass,
                            "fail" => Status::Fail,
                            "agree" => Status::Agree,
                            "disagree" => Status::Disagree,
                            "inconclusive" => Status::Inconclusive,
                            "warning" => Status::Warning,
                            _ => Status::Note,
                        };
                        Check::new(c["name"].as_str().unwrap_or(""), status, c["detail"].as_str().unwrap_or(""))
                    })
                    .collect()
            })
            .unwrap_or_default();
        Ok(Report {
            model: obj.get("model").cloned().unwrap_or(Value::Null),
            mc: obj.get("mc").cloned().unwrap_or(Value::Null),
            components: obj.get("components").and_then(Value::as_array).cloned().unwrap_or_default(),
            checks,
        })
    }
}

/// `{label: "p/q"}` for the nonzero coordinates.
pub fn element_json(space: &GradedVectorSpace, e: &Element) -> Value {
    let map: Map<String, Value> = e.terms().map(|(i, c)| (space.label(i).to_string(), Value::String(format_rational(c)))).collect();
    Value::Object(map)
}

pub fn basis_json(space: &GradedVectorSpace) -> Value {
    Value::Array(space.basis().iter().map(|b| json!({ "label": b.label, "degree": b.degree })).collect())
}

pub fn dims_json(space: &GradedVectorSpace) -> Value {
    let map: Map<String, Value> = space.dims_by_degree().into_iter().map(|(d, n)| (d.to_string(), json!(n))).collect();
    Value::Object(map)
}

fn bracket_json(space: &GradedVectorSpace, b: &BracketTerm) -> Value {
    json!({ "inputs": b.inputs, "output": element_json(space, &b.output) })
}

pub fn brackets_json(l: &LInfinityAlgebra) -> Value {
    Value::Array(l.bracket_terms().iter().map(|b| bracket_json(l.space(), b)).collect())
}

pub fn linfty_json(l: &LInfinityAlgebra) -> Value {
    json!({
        "basis": basis_json(l.space()),
        "brackets": brackets_json(l),
        "arity_bound": l.arity_bound(),
        "bound_is_exact": l.bound_is_exact(),
    })
}

pub fn sullivan_json(s: &SullivanAlgebra) -> Value {
    let g = s.generators();
    let d: Map<String, Value> = (0..g.dim())
        .filter(|&i| !s.d_generator(i).is_zero())
        .map(|i| (g.label(i).to_string(), Value::String(s.d_generator(i).format(g))))
        .collect();
    json!({
        "name": s.name(),
        "generators": basis_json(g),
        "differential": d,
        "text": render_sullivan(s),
    })
}

pub fn algebra_json(a: &FiniteCdga) -> Value {
    json!({ "name": a.name(), "basis": basis_json(a.space()), "text": render_algebra(a) })
}

pub fn model_json(m: &MappingSpaceModel) -> Value {
    let l = m.model();
    json!({
        "source": algebra_json(m.cohomology()),
        "target": sullivan_json(m.target()),
        "lie": linfty_json(m.lie()),
        "basis": basis_json(l.space()),
        "dims": dims_json(l.space()),
        "brackets": brackets_json(l),
        "arity_bound": l.arity_bound(),
    })
}

/// Rebuilds the model from the `model` section of a report.
pub fn load_model(report: &Value) -> Result<MappingSpaceModel> {
    let text = |key: &str| -> Result<&str> {
        report["model"][key]["text"]
            .as_str()
            .ok_or_else(|| Error::input(format!("report has no model.{key}.text; produce it with `rhmap model`")))
    };
    let h = parse_algebra(text("source")?)?.value;
    let y = parse_sullivan(text("target")?)?.value;
    mapping_space_model(&h, &y)
}

pub fn mc_json(m: &MappingSpaceModel, d: &McDescription) -> Value {
    let sp = m.space();
    let system: Vec<Value> = d
        .equations
        .iter()
        .map(|e| json!({ "output": e.output, "polynomial": e.polynomial.format(&d.variables) }))
        .collect();
    let mut out = json!({
        "variables": (0..d.variables.dim()).map(|i| d.variables.label(i)).collect::<Vec<_>>(),
        "system": system,
        "kind": d.kind.as_str(),
    });
    match &d.solution {
        McSolution::Family { basis } => {
            out["family"] = json!({
                "dimension": basis.len(),
                "basis": basis.iter().map(|b| element_json(sp, b)).collect::<Vec<_>>(),
            });
        }
        McSolution::Candidates { verified, rejected } => {
            out["candidates"] = json!({
                "verified": verified.iter().map(|b| element_json(sp, b)).collect::<Vec<_>>(),
                "rejected": rejected.iter().map(|b| element_json(sp, b)).collect::<Vec<_>>(),
            });
        }
    }
    out
}

/// `{"n+1": rank}` for a rank association.
pub fn ranks_json(ranks: &BTreeMap<i32, usize>) -> Value {
    let map: Map<String, Value> = ranks.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
    Value::Object(map)
}

pub fn euler_json(e: &EulerCheck) -> Value {
    json!({
        "truncated_dim": e.truncated_dim,
        "differential_rank": e.differential_rank,
        "homology_dim": e.homology_dim,
        "holds": e.holds(),
    })
}

/// The twisted differential on the truncated model, nonzero images only.
pub fn differential_json(c: &ComponentModel) -> Value {
    let t = &c.truncated;
    let sp = t.space();
    let out: Map<String, Value> = (0..t.dim())
        .filter_map(|i| {
            let v = t.differential(&Element::basis(i));
            (!v.is_zero()).then(|| (sp.label(i).to_string(), element_json(sp, &v)))
        })
        .collect();
    Value::Object(out)
}

pub fn component_json(c: &ComponentModel, ranks: &BTreeMap<i32, usize>, euler: &EulerCheck, sullivan: Option<&SullivanAlgebra>) -> Value {
    let sp = c.base.space();
    let mut truncated = linfty_json(&c.truncated);
    truncated["embedding"] = Value::Object(
        (0..c.truncated.dim())
            .filter(|&i| {
                let e = &c.embedding[i];
                e.len() != 1 || sp.label(e.support().next().unwrap()) != c.truncated.space().label(i)
            })
            .map(|i| (c.truncated.space().label(i).to_string(), element_json(sp, &c.embedding[i])))
            .collect(),
    );
    json!({
        "mc": element_json(sp, &c.mc.element),
        "certified": c.mc.is_certified(),
        "truncated": truncated,
        "twisted_differential": differential_json(c),
        "ranks": ranks_json(ranks),
        "euler": euler_json(euler),
        "sullivan": sullivan.map(sullivan_json).unwrap_or(Value::Null),
    })
}

fn tree_json(space: &GradedVectorSpace, t: &TreeValue) -> Value {
    json!({ "tree": t.tree, "inputs": t.inputs, "value": element_json(space, &t.value) })
}

pub fn grouplike_json(g: &GrouplikeReport) -> Value {
    let verdict = match g.grouplike() {
        Some(true) => "grouplike",
        Some(false) => "not_grouplike",
        None => "inconclusive",
    };
    json!({
        "max_arity": g.max_arity,
        "exhaustive": g.exhaustive,
        "homology": basis_json(&g.homology),
        "brackets": g.brackets.iter().map(|b| json!({
            "inputs": b.inputs,
            "output": element_json(&g.homology, &b.output),
            "trees": b.trees.iter().map(|t| tree_json(&g.homology, t)).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "verdict": verdict,
    })
}

pub fn transfer_json(model: &MappingSpaceModel, t: &TransferAgreement) -> Value {
    json!({
        "ambient": t.ambient,
        "max_arity": t.max_arity,
        "mismatches": t.mismatches,
        "multi_vertex_trees": t.multi_vertex_trees,
        "multi_vertex_evaluations": t.multi_vertex_evaluations,
        "multi_vertex_nonzero": t.multi_vertex_nonzero.iter().map(|v| tree_json(model.space(), v)).collect::<Vec<_>>(),
        "agrees": t.holds(),
    })
}

pub fn matrix_json(m: &RationalMatrix) -> Value {
    Value::Array((0..m.rows()).map(|r| Value::Array(m.row(r).iter().map(|q| Value::String(format_rational(q))).collect())).collect())
}

pub fn equivalence_json(w: &EquivalenceWitness) -> Value {
    json!({ "holds": w.holds(), "matrix": matrix_json(&w.matrix), "failures": w.failures })
}

/// Parses `"1:2,3:2"` into a rank association.
pub fn parse_ranks(text: &str) -> Result<BTreeMap<i32, usize>> {
    let mut out = BTreeMap::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once(':')
            .ok_or_else(|| Error::input(format!("expected `n:rank`, found `{part}`")))?;
        let k: i32 = k.trim().parse().map_err(|_| Error::input(format!("`{k}` is not a homotopy degree")))?;
        let v: usize = v.trim().parse().map_err(|_| Error::input(format!("`{v}` is not a rank")))?;
        if v > 0 {
            out.insert(k, v);
        }
    }
    Ok(out)
}

/// Compares computed ranks with expected ones, naming every degree that
/// differs.
pub fn compare_ranks(computed: &BTreeMap<i32, usize>, expected: &BTreeMap<i32, usize>) -> Check {
    let keys: std::collections::BTreeSet<i32> = computed.keys().chain(expected.keys()).copied().collect();
    let diffs: Vec<String> = keys
        .into_iter()
        .filter_map(|k| {
            let (c, e) = (computed.get(&k).copied().unwrap_or(0), expected.get(&k).copied().unwrap_or(0));
            (c != e).then(|| format!("π{k}: computed {c}, expected {e}"))
        })
        .collect();
    if diffs.is_empty() {
        Check::new("expected_ranks", Status::Agree, "computed ranks equal the expected ranks")
    } else {
        Check::new("expected_ranks", Status::Disagree, format!("open question: {}", diffs.join("; ")))
    }
}
