//! Argument parsing and verb dispatch. Each verb reads one document (a
//! file path, `-` for stdin, or `corpus:<name>`), runs one check or one
//! measurement, and renders the outcome as text or JSON. Exit codes:
//! 0 for a pass, 1 for a failed check, 2 for unusable input.

use crate::corpus::corpus_document;
use crate::document::{
    document_functor, document_groupoid, document_multi, document_nfunctor, document_ngroupoid,
    document_sset, parse_document, serialize_document, sset_document, DocError, Document,
};
use crate::suite::run_suite;
use clap::{Parser, Subcommand, ValueEnum};
use ngpd_core::fp::{group_invariants, table_presentation};
use ngpd_core::groupoid::{
    automorphism_group, is_equivalence, iso_classes, nerve, validate_groupoid,
};
use ngpd_core::multi::{diagonal_components, total_diag, validate_multi};
use ngpd_core::ngroupoid::{
    homotopy_group, n_equivalence, pi0_set, unit_check_n1, unit_invariants_n2,
};
use ngpd_core::report::{Check, Report, ValidationReport};
use ngpd_core::sset::{
    is_nerve_of_groupoid, pi0, segal_map, validate_sset, Partition, SimplicialSet,
};
use ngpd_core::verify::{check_pr_weak_equiv, segal_space_report};
use serde_json::{json, Value};
use std::io::Read;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// Validate and measure finite simplicial sets and weak n-groupoids.
#[derive(Debug, Parser)]
#[command(name = "ngpd", version)]
pub struct Cli {
    /// Dimension bound for derived simplicial sets.
    #[arg(long, global = true, default_value_t = 3)]
    pub dim_bound: usize,

    /// Seed for generated documents and the suite.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Show witness detail on passing checks too.
    #[arg(long, global = true)]
    pub witness: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the structural laws of any document kind.
    Validate { input: String },
    /// List path components, isomorphism classes, or diagonal components.
    Pi0 { input: String },
    /// Loop group invariants at one base point per component.
    Pi1 { input: String },
    /// Build the nerve of a groupoid as a simplicial set document.
    Nerve { input: String },
    /// Collapse a multi-axis set to its diagonal simplicial set.
    Diag { input: String },
    /// Compare spines against chains, per level.
    Segal { input: String },
    /// Full law report for an n-groupoid carrier.
    NgpdValidate { input: String },
    /// Homotopy group invariants of an n-groupoid, per component and degree.
    NgpdPi { input: String },
    /// Decide whether a functor or map is an equivalence.
    Equiv { input: String },
    /// Compare a groupoid with the loops of its own nerve.
    UnitN1 { input: String },
    /// Compare a 2-groupoid with the one rebuilt from its invariants.
    UnitN2 { input: String },
    /// Split a simplicial set into components and test discreteness.
    FDecompose { input: String },
    /// Run the whole acceptance battery over the built-in corpus.
    Suite,
}

pub struct Outcome {
    pub exit: i32,
    pub text: String,
}

pub fn run(cli: &Cli) -> Result<Outcome, String> {
    match &cli.command {
        Command::Validate { input } => validate_verb(cli, &load(input, cli.seed)?),
        Command::Pi0 { input } => pi0_verb(cli, &load(input, cli.seed)?),
        Command::Pi1 { input } => pi1_verb(cli, &load(input, cli.seed)?),
        Command::Nerve { input } => nerve_verb(cli, &load(input, cli.seed)?),
        Command::Diag { input } => diag_verb(cli, &load(input, cli.seed)?),
        Command::Segal { input } => segal_verb(cli, &load(input, cli.seed)?),
        Command::NgpdValidate { input } => {
            let doc = load(input, cli.seed)?;
            let phi = document_ngroupoid(&doc).map_err(|e| e.to_string())?;
            Ok(validation_outcome(cli, phi.validation().clone()))
        }
        Command::NgpdPi { input } => ngpd_pi_verb(cli, &load(input, cli.seed)?),
        Command::Equiv { input } => equiv_verb(cli, &load(input, cli.seed)?),
        Command::UnitN1 { input } => {
            let doc = load(input, cli.seed)?;
            let g = document_groupoid(&doc).map_err(|e| e.to_string())?;
            let rep = unit_check_n1(&g).map_err(|e| e.to_string())?;
            Ok(report_outcome(cli, rep))
        }
        Command::UnitN2 { input } => unit_n2_verb(cli, &load(input, cli.seed)?),
        Command::FDecompose { input } => f_decompose_verb(cli, &load(input, cli.seed)?),
        Command::Suite => Ok(suite_verb(cli)),
    }
}

fn load(input: &str, seed: u64) -> Result<Document, String> {
    if input == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| format!("cannot read stdin: {e}"))?;
        return parse_document(&text).map_err(|e| e.to_string());
    }
    if let Some(name) = input.strip_prefix("corpus:") {
        return corpus_document(name, seed);
    }
    let text =
        std::fs::read_to_string(input).map_err(|e| format!("cannot read `{input}`: {e}"))?;
    parse_document(&text).map_err(|e| e.to_string())
}

fn wrong_kind(verb: &str, doc: &Document) -> String {
    format!("verb `{verb}` cannot use a document of kind `{}`", doc.kind)
}

// ---------------------------------------------------------------------------
// Rendering

fn json_line(value: Value) -> String {
    let mut out = serde_json::to_string_pretty(&value).expect("reports serialize");
    out.push('\n');
    out
}

fn with_verdict(mut value: Value, passed: bool) -> Value {
    value
        .as_object_mut()
        .expect("report values are objects")
        .insert(
            "verdict".to_string(),
            Value::String(if passed { "PASS" } else { "FAIL" }.to_string()),
        );
    value
}

fn report_outcome(cli: &Cli, report: Report) -> Outcome {
    let passed = report.passed();
    let text = match cli.format {
        Format::Text => report.render(cli.witness),
        Format::Json => json_line(with_verdict(
            serde_json::to_value(&report).expect("report"),
            passed,
        )),
    };
    Outcome {
        exit: i32::from(!passed),
        text,
    }
}

fn validation_outcome(cli: &Cli, report: ValidationReport) -> Outcome {
    let passed = report.is_valid();
    let text = match cli.format {
        Format::Text => report.render(),
        Format::Json => json_line(with_verdict(
            serde_json::to_value(&report).expect("report"),
            passed,
        )),
    };
    Outcome {
        exit: i32::from(!passed),
        text,
    }
}

fn document_outcome(doc: &Document) -> Outcome {
    Outcome {
        exit: 0,
        text: serialize_document(doc),
    }
}

// ---------------------------------------------------------------------------
// Verbs

fn validate_verb(cli: &Cli, doc: &Document) -> Result<Outcome, String> {
    match doc.kind.as_str() {
        "sset" => {
            let x = document_sset(doc).map_err(|e| e.to_string())?;
            Ok(validation_outcome(cli, validate_sset(&x)))
        }
        "multisset" => {
            let x = document_multi(doc).map_err(|e| e.to_string())?;
            Ok(validation_outcome(cli, validate_multi(&x)))
        }
        "groupoid" => {
            let g = document_groupoid(doc).map_err(|e| e.to_string())?;
            Ok(validation_outcome(cli, validate_groupoid(&g)))
        }
        "ngroupoid" => {
            let phi = document_ngroupoid(doc).map_err(|e| e.to_string())?;
            Ok(validation_outcome(cli, phi.validation().clone()))
        }
        "functor" => {
            let mut rep = Report::new("functor laws");
            match document_functor(doc) {
                Ok(_) => rep.pass("the tables preserve endpoints, identities, and composition"),
                Err(DocError::Core(e)) => rep.fail(
                    "the tables preserve endpoints, identities, and composition",
                    e.to_string(),
                ),
                Err(e) => return Err(e.to_string()),
            }
            Ok(report_outcome(cli, rep))
        }
        "nfunctor" => {
            let mut rep = Report::new("map naturality");
            match document_nfunctor(doc) {
                Ok(_) => rep.pass("the level tables commute with every structure map"),
                Err(DocError::Core(e)) => rep.fail(
                    "the level tables commute with every structure map",
                    e.to_string(),
                ),
                Err(e) => return Err(e.to_string()),
            }
            Ok(report_outcome(cli, rep))
        }
        _ => Err(wrong_kind("validate", doc)),
    }
}

fn partition_outcome(cli: &Cli, classes: &Partition) -> Outcome {
    let text = match cli.format {
        Format::Text => {
            let mut out = format!("components: {}\n", classes.len());
            for class in classes.classes() {
                out.push_str(&format!("  `{}`: {}\n", class[0], class.join(" ")));
            }
            out
        }
        Format::Json => json_line(json!({
            "components": classes.len(),
            "classes": classes.classes(),
        })),
    };
    Outcome { exit: 0, text }
}

fn pi0_verb(cli: &Cli, doc: &Document) -> Result<Outcome, String> {
    let classes = match doc.kind.as_str() {
        "sset" => {
            let x = document_sset(doc).map_err(|e| e.to_string())?;
            pi0(&x).map_err(|e| e.to_string())?
        }
        "multisset" => {
            let x = document_multi(doc).map_err(|e| e.to_string())?;
            diagonal_components(&x).map_err(|e| e.to_string())?
        }
        "groupoid" => {
            let g = document_groupoid(doc).map_err(|e| e.to_string())?;
            iso_classes(&g)
        }
        "ngroupoid" => {
            let phi = document_ngroupoid(doc).map_err(|e| e.to_string())?;
            pi0_set(&phi).map_err(|e| e.to_string())?
        }
        _ => return Err(wrong_kind("pi0", doc)),
    };
    Ok(partition_outcome(cli, &classes))
}

fn pi1_verb(cli: &Cli, doc: &Document) -> Result<Outcome, String> {
    // One measurement per component: presentation invariants of the loop
    // group at the canonical representative.
    let measured: Vec<(String, String, Vec<usize>)> = match doc.kind.as_str() {
        "sset" => {
            let x = document_sset(doc).map_err(|e| e.to_string())?;
            let classes = pi0(&x).map_err(|e| e.to_string())?;
            let mut rows = Vec::new();
            for rep in classes.representatives() {
                let loops = ngpd_core::edge_path::fundamental_group(&x, &rep)
                    .map_err(|e| e.to_string())?;
                let (inv, profile) = group_invariants(&loops);
                rows.push((rep, inv.to_string(), profile));
            }
            rows
        }
        "groupoid" => {
            let g = document_groupoid(doc).map_err(|e| e.to_string())?;
            let mut rows = Vec::new();
            for rep in iso_classes(&g).representatives() {
                let aut = automorphism_group(&g, &rep).map_err(|e| e.to_string())?;
                let (inv, profile) = group_invariants(&table_presentation(&aut));
                rows.push((rep, inv.to_string(), profile));
            }
            rows
        }
        _ => return Err(wrong_kind("pi1", doc)),
    };
    let text = match cli.format {
        Format::Text => {
            let mut out = String::new();
            for (base, inv, profile) in &measured {
                out.push_str(&format!(
                    "component `{base}`: invariants {inv}, profile {profile:?}\n"
                ));
            }
            out
        }
        Format::Json => {
            let rows: Vec<Value> = measured
                .iter()
                .map(|(base, inv, profile)| {
                    json!({"base": base, "invariants": inv, "profile": profile})
                })
                .collect();
            json_line(json!({ "components": rows }))
        }
    };
    Ok(Outcome { exit: 0, text })
}

fn nerve_verb(cli: &Cli, doc: &Document) -> Result<Outcome, String> {
    if doc.kind != "groupoid" {
        return Err(wrong_kind("nerve", doc));
    }
    let g = document_groupoid(doc).map_err(|e| e.to_string())?;
    let derived = nerve(&g, cli.dim_bound).sset;
    Ok(document_outcome(&sset_document(
        &format!("{}-nerve", doc.metadata.name),
        doc.metadata.seed,
        &format!("nerve of {} to dimension {}", doc.metadata.name, cli.dim_bound),
        &derived,
    )))
}

fn diag_verb(_cli: &Cli, doc: &Document) -> Result<Outcome, String> {
    let collapsed = match doc.kind.as_str() {
        "multisset" => {
            let x = document_multi(doc).map_err(|e| e.to_string())?;
            total_diag(&x).map_err(|e| e.to_string())?
        }
        "ngroupoid" => {
            let phi = document_ngroupoid(doc).map_err(|e| e.to_string())?;
            total_diag(phi.carrier()).map_err(|e| e.to_string())?
        }
        _ => return Err(wrong_kind("diag", doc)),
    };
    Ok(document_outcome(&sset_document(
        &format!("{}-diag", doc.metadata.name),
        doc.metadata.seed,
        &format!("diagonal of {}", doc.metadata.name),
        &collapsed,
    )))
}

fn sset_segal_report(cli: &Cli, x: &SimplicialSet) -> Result<Report, String> {
    let mut rep = Report::new("spine comparisons");
    let top = cli.dim_bound.min(x.dim_bound());
    if top < 2 {
        rep.skip("spine comparison needs two levels");
    }
    for m in 2..=top {
        let sm = segal_map(x, m).map_err(|e| e.to_string())?;
        let witness = sm
            .non_injective_witness()
            .map(|(a, b)| format!("cells `{a}` and `{b}` share a spine"))
            .or_else(|| {
                sm.non_surjective_witness()
                    .map(|s| format!("spine `{s}` has no filler"))
            });
        rep.record(
            format!("the level {m} spine map is a bijection"),
            sm.is_bijection(),
            witness.unwrap_or_default(),
        );
    }
    if x.dim_bound() >= 3 {
        let check = is_nerve_of_groupoid(x).map_err(|e| e.to_string())?;
        let why = check
            .report
            .first_failure()
            .map(|c| c.name.clone())
            .unwrap_or_default();
        rep.record(
            "the set is the nerve of some groupoid",
            check.holds(),
            why,
        );
    } else {
        rep.skip("nerve comparison needs three levels");
    }
    Ok(rep)
}

fn segal_verb(cli: &Cli, doc: &Document) -> Result<Outcome, String> {
    let rep = match doc.kind.as_str() {
        "sset" => {
            let x = document_sset(doc).map_err(|e| e.to_string())?;
            sset_segal_report(cli, &x)?
        }
        "ngroupoid" => {
            let phi = document_ngroupoid(doc).map_err(|e| e.to_string())?;
            segal_space_report(&phi).map_err(|e| e.to_string())?
        }
        _ => return Err(wrong_kind("segal", doc)),
    };
    Ok(report_outcome(cli, rep))
}

fn ngpd_pi_verb(cli: &Cli, doc: &Document) -> Result<Outcome, String> {
    if doc.kind != "ngroupoid" {
        return Err(wrong_kind("ngpd-pi", doc));
    }
    let phi = document_ngroupoid(doc).map_err(|e| e.to_string())?;
    let classes = pi0_set(&phi).map_err(|e| e.to_string())?;
    let mut rows: Vec<(String, Vec<(usize, usize, String, Vec<usize>)>)> = Vec::new();
    for rep in classes.representatives() {
        let mut groups = Vec::new();
        for degree in 1..=phi.n() {
            let g = homotopy_group(&phi, &rep, degree).map_err(|e| e.to_string())?;
            let (inv, profile) = group_invariants(&table_presentation(&g));
            groups.push((degree, g.order(), inv.to_string(), profile));
        }
        rows.push((rep, groups));
    }
    let text = match cli.format {
        Format::Text => {
            let mut out = format!("components: {}\n", rows.len());
            for (base, groups) in &rows {
                out.push_str(&format!("component `{base}`:\n"));
                for (degree, order, inv, profile) in groups {
                    out.push_str(&format!(
                        "  degree {degree}: order {order}, invariants {inv}, profile {profile:?}\n"
                    ));
                }
            }
            out
        }
        Format::Json => {
            let components: Vec<Value> = rows
                .iter()
                .map(|(base, groups)| {
                    let gs: Vec<Value> = groups
                        .iter()
                        .map(|(degree, order, inv, profile)| {
                            json!({
                                "degree": degree,
                                "order": order,
                                "invariants": inv,
                                "profile": profile,
                            })
                        })
                        .collect();
                    json!({"base": base, "groups": gs})
                })
                .collect();
            json_line(json!({ "components": components }))
        }
    };
    Ok(Outcome { exit: 0, text })
}

fn equiv_verb(cli: &Cli, doc: &Document) -> Result<Outcome, String> {
    let rep = match doc.kind.as_str() {
        "functor" => {
            let f = document_functor(doc).map_err(|e| e.to_string())?;
            is_equivalence(&f).report
        }
        "nfunctor" => {
            let f = document_nfunctor(doc).map_err(|e| e.to_string())?;
            n_equivalence(&f).map_err(|e| e.to_string())?
        }
        _ => return Err(wrong_kind("equiv", doc)),
    };
    Ok(report_outcome(cli, rep))
}

fn unit_n2_verb(cli: &Cli, doc: &Document) -> Result<Outcome, String> {
    if doc.kind != "ngroupoid" {
        return Err(wrong_kind("unit-n2", doc));
    }
    let phi = document_ngroupoid(doc).map_err(|e| e.to_string())?;
    let classes = pi0_set(&phi).map_err(|e| e.to_string())?;
    let mut merged = Report::new("unit comparisons over components");
    for rep in classes.representatives() {
        let partial = unit_invariants_n2(&phi, &rep).map_err(|e| e.to_string())?;
        for check in partial.checks {
            merged.checks.push(Check {
                name: format!("at `{rep}`: {}", check.name),
                status: check.status,
                detail: check.detail,
            });
        }
        for marker in partial.not_checked {
            if !merged.not_checked.contains(&marker) {
                merged.not_checked.push(marker);
            }
        }
    }
    Ok(report_outcome(cli, merged))
}

fn f_decompose_verb(cli: &Cli, doc: &Document) -> Result<Outcome, String> {
    if doc.kind != "sset" {
        return Err(wrong_kind("f-decompose", doc));
    }
    let x = document_sset(doc).map_err(|e| e.to_string())?;
    let pr = check_pr_weak_equiv(&x).map_err(|e| e.to_string())?;
    let passed = pr.report.passed();
    let pieces = pr.decomposition.components.len();
    let text = match cli.format {
        Format::Text => {
            let mut out = pr.report.render(cli.witness);
            out.push_str(&format!("components: {pieces}\n"));
            out.push_str(&format!("zero-truncated: {}\n", pr.zero_truncated));
            out
        }
        Format::Json => {
            let mut value = with_verdict(
                serde_json::to_value(&pr.report).expect("report"),
                passed,
            );
            let obj = value.as_object_mut().expect("object");
            obj.insert("components".to_string(), json!(pieces));
            obj.insert("zero_truncated".to_string(), json!(pr.zero_truncated));
            json_line(value)
        }
    };
    Ok(Outcome {
        exit: i32::from(!passed),
        text,
    })
}

fn suite_verb(cli: &Cli) -> Outcome {
    let outcome = run_suite(cli.seed);
    let text = match cli.format {
        Format::Text => outcome.text.clone(),
        Format::Json => json_line(with_verdict(
            json!({
                "seed": outcome.seed,
                "criteria": outcome.criteria,
            }),
            outcome.passed,
        )),
    };
    Outcome {
        exit: i32::from(!outcome.passed),
        text,
    }
}
