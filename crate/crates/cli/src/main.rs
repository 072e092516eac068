//! `rhmap`: builds mapping-space models from `.alg`/`.sul` files and writes
//! canonical JSON reports.
//!
//! Exit codes: 0 success, 1 input or parse error, 2 invariant violation,
//! 3 internal assertion failure. Every failure prints a JSON error object
//! on stderr.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use rhmap_core::cdga::{cohomology, is_minimal, two_stage_split, AlgebraMorphism, FiniteCdga, SullivanAlgebra};
use rhmap_core::dsl::{parse_algebra, parse_document, parse_element, parse_sullivan, Document};
use rhmap_core::linfty::{ce_dual, check_jacobi, verify_two_stage_vanishing, LInfinityAlgebra};
use rhmap_core::mapspace::{
    apply_automorphism, check_closed_formula, component_homotopy_ranks, component_minimal_model, euler_bookkeeping, is_grouplike, mapping_space_model,
    solve_mc, thicken, twist, verify_component_equivalence, ComponentModel, MappingSpaceModel, MaurerCartanElement,
};
use rhmap_core::report::{
    algebra_json, compare_ranks, component_json, dims_json, equivalence_json, grouplike_json, load_model, mc_json, model_json, parse_ranks, ranks_json,
    sullivan_json, transfer_json, Check, Report, Status,
};
use rhmap_core::{Error, Result};

#[derive(Parser)]
#[command(name = "rhmap", version, about = "Rational models of mapping spaces into two-stage targets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the L∞ model of map(X, Y) from H*(X) and a Sullivan model of Y.
    Model {
        /// `.alg` file: a finite CDGA model of X.
        #[arg(long)]
        source: PathBuf,
        /// `.sul` file: a two-stage Sullivan model of Y.
        #[arg(long)]
        target: PathBuf,
        /// Also run the full tree transfer and compare it with the closed formula.
        #[arg(long)]
        check_transfer: bool,
        /// Highest arity compared by `--check-transfer`.
        #[arg(long, default_value_t = 4)]
        max_arity: usize,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the Maurer–Cartan system and its solutions.
    Mc {
        /// Report written by `rhmap model`.
        #[arg(long)]
        model: PathBuf,
        /// Candidate solution, checked when the system is nonlinear. Repeatable.
        #[arg(long)]
        candidate: Vec<String>,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Twist at Maurer–Cartan elements and model the resulting components.
    Component {
        /// Report written by `rhmap model`.
        #[arg(long)]
        model: PathBuf,
        /// Element as `q*h@l` terms joined by `+`. Repeatable.
        #[arg(long, required = true)]
        mc: Vec<String>,
        /// Expected ranks as `n:rank,...`, matched to `--mc` by position.
        #[arg(long)]
        expect_ranks: Vec<String>,
        /// Expected number of distinct rank vectors among the `--mc` elements.
        #[arg(long)]
        expect_classes: Option<usize>,
        /// Cohomology automorphism as `label = element; ...`, compared on every component.
        #[arg(long)]
        automorphism: Option<String>,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide whether a component is group-like from its transferred brackets.
    Hspace {
        /// Report written by `rhmap model`.
        #[arg(long)]
        model: PathBuf,
        /// Element as `q*h@l` terms joined by `+`.
        #[arg(long)]
        mc: String,
        /// Largest bracket arity to transfer.
        #[arg(long, default_value_t = 4)]
        max_arity: usize,
        /// Expected verdict to compare against.
        #[arg(long, value_enum)]
        expect: Option<Verdict>,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Audit the invariants of a single `.alg` or `.sul` file.
    Check {
        #[arg(long)]
        file: PathBuf,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Verdict {
    Grouplike,
    NotGrouplike,
}

/// Failure of a command, tagged with the file it concerns.
struct Failure {
    error: Error,
    file: Option<PathBuf>,
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        Failure { error, file: None }
    }
}

trait InFile<T> {
    fn in_file(self, path: &Path) -> std::result::Result<T, Failure>;
}

impl<T> InFile<T> for Result<T> {
    fn in_file(self, path: &Path) -> std::result::Result<T, Failure> {
        self.map_err(|error| Failure {
            error,
            file: Some(path.to_path_buf()),
        })
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let mut obj = json!({
                "kind": f.error.kind(),
                "message": f.error.to_string(),
                "exit_code": f.error.exit_code(),
            });
            if let Error::Parse { line, column, .. } = &f.error {
                obj["line"] = json!(line);
                obj["column"] = json!(column);
            }
            if let Some(p) = &f.file {
                obj["file"] = json!(p.display().to_string());
            }
            eprintln!("{}", json!({ "error": obj }));
            ExitCode::from(f.error.exit_code() as u8)
        }
    }
}

fn run(command: Command) -> Outcome<()> {
    match command {
        Command::Model {
            source,
            target,
            check_transfer,
            max_arity,
            out,
        } => cmd_model(&source, &target, check_transfer, max_arity, out.as_deref()),
        Command::Mc { model, candidate, out } => cmd_mc(&model, &candidate, out.as_deref()),
        Command::Component {
            model,
            mc,
            expect_ranks,
            expect_classes,
            automorphism,
            out,
        } => cmd_component(&model, &mc, &expect_ranks, expect_classes, automorphism.as_deref(), out.as_deref()),
        Command::Hspace {
            model,
            mc,
            max_arity,
            expect,
            out,
        } => cmd_hspace(&model, &mc, max_arity, expect, out.as_deref()),
        Command::Check { file, out } => cmd_check(&file, out.as_deref()),
    }
}

fn read(path: &Path) -> Outcome<String> {
    fs::read_to_string(path).map_err(|e| Failure {
        error: Error::input(format!("cannot read {}: {e}", path.display())),
        file: Some(path.to_path_buf()),
    })
}

fn read_report(path: &Path) -> Outcome<(Report, MappingSpaceModel)> {
    let text = read(path)?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| Error::input(format!("not a JSON report: {e}")))
        .in_file(path)?;
    let report = Report::from_json(&value).in_file(path)?;
    let model = load_model(&value).in_file(path)?;
    Ok((report, model))
}

/// Writes the report, then turns failed checks into an invariant error.
fn emit(report: &Report, out: Option<&Path>) -> Outcome<()> {
    let text = report.render();
    match out {
        Some(p) => fs::write(p, &text)
            .map_err(|e| Error::input(format!("cannot write {}: {e}", p.display())))
            .in_file(p)?,
        None => print!("{text}"),
    }
    let failed: Vec<&str> = report.checks.iter().filter(|c| c.status == Status::Fail).map(|c| c.name.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Error::invariant(format!("failed checks: {}", failed.join(", "))).into())
    }
}

fn jacobi_check(name: &str, l: &LInfinityAlgebra) -> Check {
    let arity = (2 * l.arity_bound()).saturating_sub(1).clamp(3, 4);
    let r = check_jacobi(l, arity);
    let detail = match r.violations.first() {
        None => format!("{} tuples up to arity {}", r.tuples_checked, r.checked_up_to),
        Some(v) => format!("{} violations; first on ({})", r.violations.len(), v.inputs.join(", ")),
    };
    Check::new(name, Status::from_bool(r.passed()), detail)
}

fn vanishing_check(name: &str, l: &LInfinityAlgebra) -> Check {
    let r = verify_two_stage_vanishing(l, 4);
    let detail = match r.offending.first() {
        None => format!("{} nested brackets up to arity {} vanish", r.nestings_checked, r.max_arity),
        Some(n) => format!(
            "{} nonzero nested brackets; first [({}), {}]",
            r.offending.len(),
            n.inner.join(", "),
            n.outer.join(", ")
        ),
    };
    Check::new(name, Status::from_bool(r.passed()), detail)
}

fn cmd_model(source: &Path, target: &Path, check_transfer: bool, max_arity: usize, out: Option<&Path>) -> Outcome<()> {
    let a = parse_algebra(&read(source)?).in_file(source)?;
    let y = parse_sullivan(&read(target)?).in_file(target)?;
    let mut checks: Vec<Check> = a.warnings.iter().chain(&y.warnings).map(Check::warning).collect();
    let a = a.value;
    let h = if a.has_zero_differential() { a.clone() } else { cohomology(&a).in_file(source)? };
    let m = mapping_space_model(&h, &y.value)?;

    let mut model = model_json(&m);
    checks.push(jacobi_check("jacobi", m.model()));
    checks.push(vanishing_check("two_stage_vanishing", m.lie()));
    checks.push(Check::new(
        "nonzero_brackets",
        Status::Note,
        {
            let all = m.model().bracket_terms();
            let sp = m.space();
            let nonneg = all.iter().filter(|b| b.inputs.iter().all(|x| sp.degree(sp.require(x).expect("bracket label")) >= 0)).count();
            format!("{} nonzero brackets; {nonneg} with all inputs in degrees ≥ 0", all.len())
        },
    ));
    if check_transfer {
        let mut runs = Vec::new();
        let ambients: Vec<FiniteCdga> = vec![a.clone(), thicken(&a)?];
        for amb in &ambients {
            let t = check_closed_formula(&m, amb, max_arity)?;
            checks.push(Check::new(
                format!("closed_formula_vs_transfer[{}]", amb.name()),
                Status::from_bool(t.mismatches.is_empty()),
                match t.mismatches.first() {
                    None => format!("brackets agree up to arity {max_arity}"),
                    Some(x) => format!("{} tuples differ; first ({})", t.mismatches.len(), x.join(", ")),
                },
            ));
            checks.push(Check::new(
                format!("multi_vertex_trees_vanish[{}]", amb.name()),
                Status::from_bool(t.multi_vertex_nonzero.is_empty()),
                format!(
                    "{} trees, {} evaluations, {} nonzero",
                    t.multi_vertex_trees,
                    t.multi_vertex_evaluations,
                    t.multi_vertex_nonzero.len()
                ),
            ));
            runs.push(transfer_json(&m, &t));
        }
        model["transfer"] = Value::Array(runs);
    }
    let report = Report {
        model,
        checks,
        ..Default::default()
    };
    emit(&report, out)
}

fn cmd_mc(path: &Path, candidates: &[String], out: Option<&Path>) -> Outcome<()> {
    let (mut report, m) = read_report(path)?;
    let parsed = candidates.iter().map(|c| parse_element(c, m.space())).collect::<Result<Vec<_>>>()?;
    let d = solve_mc(&m, &parsed)?;
    report.mc = mc_json(&m, &d);
    let detail = match d.family_dimension() {
        Some(n) => format!("{} system; solutions form a {n}-parameter linear family", d.kind.as_str()),
        None => format!("{} system; candidates checked individually", d.kind.as_str()),
    };
    report.checks.push(Check::new("mc_system", Status::Note, detail));
    emit(&report, out)
}

fn certified(m: &MappingSpaceModel, text: &str) -> Result<MaurerCartanElement> {
    let z = parse_element(text, m.space())?;
    let mc = MaurerCartanElement::new(m, z)?;
    if !mc.is_certified() {
        return Err(Error::invariant(format!(
            "`{text}` is not a Maurer–Cartan element: the equation leaves {}",
            m.space().format(&mc.residual)
        )));
    }
    Ok(mc)
}

fn component_entry(c: &ComponentModel) -> Result<(Value, std::collections::BTreeMap<i32, usize>, Vec<Check>)> {
    let ranks = component_homotopy_ranks(c);
    let euler = euler_bookkeeping(c);
    let sullivan = component_minimal_model(c)?;
    let checks = vec![
        Check::new("mc_certified", Status::Pass, "the Maurer–Cartan equation holds exactly"),
        Check::new(
            "euler_bookkeeping",
            Status::from_bool(euler.holds()),
            format!(
                "dim {} − 2·rank {} = {} homology classes",
                euler.truncated_dim, euler.differential_rank, euler.homology_dim
            ),
        ),
    ];
    Ok((component_json(c, &ranks, &euler, Some(&sullivan)), ranks, checks))
}

fn parse_automorphism(text: &str, h: &FiniteCdga) -> Result<AlgebraMorphism> {
    let mut overrides = Vec::new();
    for part in text.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (lhs, rhs) = part
            .split_once('=')
            .ok_or_else(|| Error::input(format!("expected `label = element`, found `{part}`")))?;
        let i = h.space().require(lhs.trim())?;
        overrides.push((i, parse_element(rhs, h.space())?));
    }
    let psi = AlgebraMorphism::from_overrides(h, overrides);
    psi.verify_automorphism(h)?;
    Ok(psi)
}

fn cmd_component(
    path: &Path,
    mcs: &[String],
    expect_ranks: &[String],
    expect_classes: Option<usize>,
    automorphism: Option<&str>,
    out: Option<&Path>,
) -> Outcome<()> {
    let (mut report, m) = read_report(path)?;
    if expect_ranks.len() > mcs.len() {
        return Err(Error::input("more --expect-ranks than --mc elements").into());
    }
    let psi = automorphism.map(|t| parse_automorphism(t, m.cohomology())).transpose()?;
    let mut vectors = BTreeSet::new();
    for (k, text) in mcs.iter().enumerate() {
        let mc = certified(&m, text)?;
        let c = twist(&m, &mc)?;
        let (mut entry, ranks, checks) = component_entry(&c)?;
        entry["input"] = json!(text);
        let tag = |name: &str| if mcs.len() == 1 { name.to_string() } else { format!("{name}[{k}]") };
        for mut ch in checks {
            ch.name = tag(&ch.name);
            report.checks.push(ch);
        }
        report.checks.push(Check::new(tag("ranks"), Status::Note, rank_text(&ranks)));
        if let Some(expected) = expect_ranks.get(k) {
            let mut ch = compare_ranks(&ranks, &parse_ranks(expected)?);
            ch.name = tag(&ch.name);
            report.checks.push(ch);
        }
        if let Some(psi) = &psi {
            let moved = apply_automorphism(psi, &m, &mc)?;
            let other = twist(&m, &moved)?;
            let w = verify_component_equivalence(psi, &c, &other)?;
            let same_ranks = component_homotopy_ranks(&other) == ranks;
            let mut eq = equivalence_json(&w);
            eq["image"] = rhmap_core::report::element_json(m.space(), &moved.element);
            eq["same_ranks"] = json!(same_ranks);
            entry["automorphism"] = eq;
            report.checks.push(Check::new(
                tag("automorphism_equivalence"),
                Status::from_bool(w.holds() && same_ranks),
                format!("ψ(z) = {} is Maurer–Cartan and the components agree", m.space().format(&moved.element)),
            ));
        }
        vectors.insert(ranks);
        report.components.push(entry);
    }
    if mcs.len() > 1 {
        report.checks.push(Check::new(
            "rank_classes",
            Status::Note,
            format!("{} distinct rank vectors among {} elements", vectors.len(), mcs.len()),
        ));
    }
    if let Some(n) = expect_classes {
        let status = if vectors.len() == n { Status::Agree } else { Status::Disagree };
        let detail = format!("{} distinct rank vectors, expected {n}", vectors.len());
        let detail = if status == Status::Disagree { format!("open question: {detail}") } else { detail };
        report.checks.push(Check::new("expected_classes", status, detail));
    }
    emit(&report, out)
}

fn rank_text(ranks: &std::collections::BTreeMap<i32, usize>) -> String {
    ranks.iter().map(|(k, v)| format!("π{k}:{v}")).collect::<Vec<_>>().join(", ")
}

fn cmd_hspace(path: &Path, text: &str, max_arity: usize, expect: Option<Verdict>, out: Option<&Path>) -> Outcome<()> {
    let (mut report, m) = read_report(path)?;
    let mc = certified(&m, text)?;
    let c = twist(&m, &mc)?;
    let (mut entry, _, checks) = component_entry(&c)?;
    report.checks.extend(checks);
    let g = is_grouplike(&c, max_arity)?;
    entry["input"] = json!(text);
    entry["grouplike"] = grouplike_json(&g);
    let verdict = g.grouplike();
    report.checks.push(Check::new(
        "grouplike",
        Status::Note,
        match verdict {
            Some(true) => format!("all transferred brackets vanish and arity {max_arity} is exhaustive"),
            Some(false) => format!("{} nonzero transferred brackets", g.brackets.len()),
            None => format!("no nonzero bracket up to arity {max_arity}; higher arities not excluded"),
        },
    ));
    if let Some(e) = expect {
        let want = matches!(e, Verdict::Grouplike);
        let (status, detail) = match verdict {
            Some(v) if v == want => (Status::Agree, "computed verdict equals the expected one".to_string()),
            Some(v) => (Status::Disagree, format!("open question: computed group-like = {v}, expected {want}")),
            None => (Status::Inconclusive, format!("brackets vanish up to arity {max_arity} only")),
        };
        report.checks.push(Check::new("expected_grouplike", status, detail));
    }
    report.components.push(entry);
    emit(&report, out)
}

fn cmd_check(path: &Path, out: Option<&Path>) -> Outcome<()> {
    let parsed = parse_document(&read(path)?).in_file(path)?;
    let mut checks: Vec<Check> = parsed.warnings.iter().map(Check::warning).collect();
    let model = match &parsed.value {
        Document::Algebra(a) => {
            checks.push(Check::new("algebra_axioms", Status::Pass, "associative, graded commutative, unital, d² = 0, Leibniz"));
            let h = cohomology(a).in_file(path)?;
            checks.push(Check::new("cohomology", Status::Note, format!("dimensions by degree {}", dims_json(h.space()))));
            json!({ "algebra": algebra_json(a), "cohomology": algebra_json(&h) })
        }
        Document::Sullivan(s) => {
            checks.push(Check::new("d_squared_zero", Status::Pass, "d² vanishes on every generator"));
            sullivan_checks(s, &mut checks).in_file(path)?
        }
    };
    let report = Report {
        model,
        checks,
        ..Default::default()
    };
    emit(&report, out)
}

fn sullivan_checks(s: &SullivanAlgebra, checks: &mut Vec<Check>) -> Result<Value> {
    let minimal = is_minimal(s);
    checks.push(Check::new("minimal", Status::Note, if minimal { "d has no linear part" } else { "d has a linear part" }));
    let split = two_stage_split(s);
    checks.push(Check::new(
        "two_stage",
        Status::Note,
        match &split {
            Ok(_) => "generators split into closed and those with closed-polynomial differential".to_string(),
            Err(e) => e.to_string(),
        },
    ));
    let mut v = json!({ "sullivan": sullivan_json(s) });
    if minimal {
        let l = ce_dual(s)?;
        checks.push(jacobi_check("jacobi", &l));
        let mut ch = vanishing_check("nested_brackets_vanish", &l);
        if split.is_err() {
            ch.status = Status::Note;
        }
        checks.push(ch);
        v["homotopy_ranks"] = ranks_json(&s.generators().dims_by_degree());
    }
    Ok(v)
}
