mod support;

use std::fs;

use saf_core::archtrace::{impacts_of_element, trace_kpi};
use saf_core::diag::{has_errors, Code};
use saf_core::dsl::parse_workspace;
use saf_core::guidance::{checklist_report, suggest_effects, ChecklistSpec, ItemStatus};
use saf_core::model::{ImpactLevel, Workspace};
use saf_core::render::{layout_dm, render, BandKind, LayoutConfig, RenderConfig, RenderFormat};
use saf_core::validation::{consistency_summary, validate, LintConfig};

use support::fixture;

fn load(name: &str) -> Workspace {
    let r = parse_workspace(&fixture(name)).unwrap();
    r.document.unwrap_or_else(|| panic!("{name}: {:?}", r.diagnostics))
}

fn ids<T: AsRef<str>>(v: &[T]) -> Vec<&str> {
    v.iter().map(AsRef::as_ref).collect()
}

#[test]
fn smart_lighting_is_clean_and_banded() {
    let ws = load("smart_lighting");
    let diags = validate(&ws, &LintConfig::default());
    assert!(!has_errors(&diags), "{diags:?}");
    assert_eq!(diags.iter().filter(|d| d.code == Code::W101).count(), 0);

    let dm = ws.decision_map("smart_lighting").unwrap();
    let layout = layout_dm(dm, &LayoutConfig::default());
    let band = |id: &str| layout.bands[layout.node(id).unwrap().band].kind;
    assert_eq!(band("customize_lighting"), BandKind::Features);
    assert_eq!(band("energy_savings"), BandKind::Impact(ImpactLevel::Immediate));
    assert_eq!(band("energy_costs"), BandKind::Impact(ImpactLevel::Enabling));
    assert_eq!(band("well_being"), BandKind::Impact(ImpactLevel::Enabling));
    assert_eq!(band("healthcare_costs"), BandKind::Impact(ImpactLevel::Systemic));

    let svg = render(dm, RenderFormat::Svg, &RenderConfig::default());
    let doc = roxmltree::Document::parse(&svg).unwrap();
    for c in &dm.concerns {
        let node = doc
            .descendants()
            .find(|n| n.attribute("id") == Some(&format!("node-{}", c.id)))
            .unwrap();
        let rect = node.children().find(|n| n.has_tag_name("rect")).unwrap();
        let x: i32 = rect.attribute("x").unwrap().parse().unwrap();
        let frame = doc
            .descendants()
            .find(|n| n.attribute("id") == Some(&format!("band-{}", c.impact)))
            .and_then(|g| g.children().find(|n| n.has_tag_name("rect")))
            .unwrap();
        let bx: i32 = frame.attribute("x").unwrap().parse().unwrap();
        let bw: i32 = frame.attribute("width").unwrap().parse().unwrap();
        assert!(bx <= x && x < bx + bw, "{} drawn outside its band", c.id);
    }
}

#[test]
fn smart_lighting_checklist_and_summary() {
    let ws = load("smart_lighting");
    let report = checklist_report(&ws, &ChecklistSpec::default_checklist());
    assert_eq!(report.len(), 10);
    for e in &report {
        assert_eq!(e.status, ItemStatus::Satisfied, "{}: {}", e.item_id, e.evidence);
    }
    let s = consistency_summary(&ws);
    assert_eq!(s.conflicts, 0);
    // Both concern-to-concern effects have a matrix cell.
    assert_eq!(s.hints, 0);
    assert!((s.coverage - 1.0).abs() < 1e-12, "{}", s.coverage);
    assert!(suggest_effects(ws.decision_map("smart_lighting").unwrap(), &ws.matrices).is_empty());
}

#[test]
fn conflict_fixture_yields_exactly_one_w101() {
    let ws = load("conflict");
    let diags = validate(&ws, &LintConfig::default());
    let w101: Vec<_> = diags.iter().filter(|d| d.code == Code::W101).collect();
    assert_eq!(w101.len(), 1, "{diags:?}");
    let d = w101[0];
    assert!(d.related.iter().any(|r| r == "interoperability"));
    assert!(d.related.iter().any(|r| r == "modifiability"));
    assert!(d.location.as_ref().unwrap().file.ends_with("conflict.dm.saf"));
    assert_eq!(consistency_summary(&ws).conflicts, 1);
    assert_eq!(saf_core::validation::exit_code(&diags, false), 0);
    assert_eq!(saf_core::validation::exit_code(&diags, true), 1);
}

#[test]
fn disabled_lint_is_silent() {
    let ws = load("conflict");
    let config = LintConfig::from_toml("disabled = [\"W101\"]").unwrap();
    assert!(validate(&ws, &config).iter().all(|d| d.code != Code::W101));
}

#[test]
fn cloud_trace_reaches_autoscaler_and_web_tier() {
    let ws = load("cloud");
    let t = trace_kpi(&ws, "peak_utilization").unwrap();
    assert_eq!(ids(&t.metrics), ["cpu_util"]);
    assert_eq!(ids(&t.concerns), ["availability_peak", "resource_utilization"]);
    assert_eq!(ids(&t.decisions), ["scaling_mode"]);
    assert_eq!(ids(&t.features), ["scalability"]);
    assert_eq!(ids(&t.elements), ["autoscaler", "web_tier"]);
    let chosen = ws.decision("scaling_mode").unwrap().chosen_option();
    assert_eq!(chosen, Some("auto-scaling"));

    let back = impacts_of_element(&ws, "autoscaler").unwrap();
    assert_eq!(ids(&back.kpis), ["peak_utilization"]);
    let billing = impacts_of_element(&ws, "billing").unwrap();
    assert!(billing.kpis.is_empty() && billing.features.is_empty());
    assert_eq!(trace_kpi(&ws, "nope").unwrap_err().code, Code::E501);
    assert_eq!(impacts_of_element(&ws, "nope").unwrap_err().code, Code::E501);
}

#[test]
fn cloud_undecided_effect_is_reported_by_checklist() {
    let ws = load("cloud");
    let report = checklist_report(&ws, &ChecklistSpec::default_checklist());
    let decided = report.iter().find(|e| e.item_id == "effects_typed").unwrap();
    assert_eq!(decided.status, ItemStatus::Unsatisfied);
    assert!(decided.evidence.contains("scalability -> resource_utilization"));
    let matrix = report.iter().find(|e| e.item_id == "dimension_coverage").unwrap();
    assert_eq!(matrix.status, ItemStatus::NotApplicable);
}

#[test]
fn removed_concern_breaks_references_with_location() {
    let dir = tempfile::tempdir().unwrap();
    for entry in fs::read_dir(fixture("smart_lighting")).unwrap() {
        let path = entry.unwrap().path();
        let text = fs::read_to_string(&path).unwrap();
        let text = if path.to_string_lossy().ends_with(".dm.saf") {
            text.lines().filter(|l| !l.contains("qa well_being")).collect::<Vec<_>>().join("\n")
        } else {
            text
        };
        fs::write(dir.path().join(path.file_name().unwrap()), text).unwrap();
    }
    let r = parse_workspace(dir.path()).unwrap();
    assert!(r.document.is_none());
    let e001: Vec<_> = r.diagnostics.iter().filter(|d| d.code == Code::E001).collect();
    assert!(!e001.is_empty(), "{:?}", r.diagnostics);
    for d in &e001 {
        let loc = d.location.as_ref().expect("located");
        assert!(loc.line >= 1);
    }
    assert!(e001.iter().any(|d| d.related.iter().any(|r| r == "well_being")
        && d.location.as_ref().unwrap().file.ends_with("smart_lighting.dm.saf")));
}

#[test]
fn matrix_dimension_without_concern_is_named() {
    let dir = tempfile::tempdir().unwrap();
    for f in ["smart_lighting.dm.saf", "smart_lighting.arch.saf"] {
        fs::copy(fixture(&format!("smart_lighting/{f}")), dir.path().join(f)).unwrap();
    }
    fs::copy(fixture("conflict/tech_env.matrix.csv"), dir.path().join("tech_env.matrix.csv")).unwrap();
    let r = parse_workspace(dir.path()).unwrap();
    let ws = r.document.unwrap_or_else(|| panic!("{:?}", r.diagnostics));
    let report = checklist_report(&ws, &ChecklistSpec::default_checklist());
    let cov = report.iter().find(|e| e.item_id == "dimension_coverage").unwrap();
    assert_eq!(cov.status, ItemStatus::Unsatisfied);
    assert!(cov.evidence.contains("technical"), "{}", cov.evidence);
    assert!(!cov.evidence.contains("environmental"), "{}", cov.evidence);
}

#[test]
fn empty_directory_is_an_empty_workspace() {
    let dir = tempfile::tempdir().unwrap();
    let r = parse_workspace(dir.path()).unwrap();
    let ws = r.document.unwrap();
    assert!(ws.is_empty());
    assert!(r.diagnostics.is_empty());
    assert!(validate(&ws, &LintConfig::default()).is_empty());
    assert_eq!(consistency_summary(&ws).coverage, 0.0);
}
