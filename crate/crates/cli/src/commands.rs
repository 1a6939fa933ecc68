use std::io::{BufRead, Read, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use saf_core::archtrace::{impacts_of_element, trace_kpi};
use saf_core::config::ToolConfig;
use saf_core::diag::{sort_diagnostics, Diagnostic};
use saf_core::dsl::{load_workspace, model_files, parse_document_bytes, parse_workspace, serialize_document};
use saf_core::guidance::{classify_impact, parse_answers, suggest_effects, Answer, Classification, DecisionGraphSpec};
use saf_core::ingest::{load_store, IngestOptions, MeasureStore, MetricCatalog, PersistentStore, RejectReason};
use saf_core::kpi::{detect_transitions, evaluate, rfc3339, status_json, statuses_json, KpiStatus};
use saf_core::model::{Document, DocumentKind, Workspace};
use saf_core::render::{render as render_dm, RenderFormat};
use saf_core::validation::{exit_code, validate};
use serde::Deserialize;

use crate::{
    CheckArgs, ClassifyArgs, FmtArgs, Format, IngestArgs, KpiEvalArgs, RenderArgs, ServeArgs, SuggestArgs, TraceArgs,
    ERRORS, OK, STRICT_WARNINGS, USAGE,
};

pub struct Failure {
    pub code: u8,
    pub message: String,
}

type Outcome = Result<u8, Failure>;

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: USAGE,
        message: message.into(),
    }
}

fn error(message: impl Into<String>) -> Failure {
    Failure {
        code: ERRORS,
        message: message.into(),
    }
}

fn config() -> Result<ToolConfig, Failure> {
    ToolConfig::from_env().map_err(|e| usage(format!("invalid configuration: {e}")))
}

fn print_diagnostics(diags: &[Diagnostic]) {
    for d in diags {
        eprintln!("{d}");
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn kind_of(path: &Path) -> Result<DocumentKind, Failure> {
    DocumentKind::from_path(path).ok_or_else(|| {
        usage(format!(
            "{}: not a model file (expected .dm.saf, .sq.csv, .matrix.csv, .kpi.saf or .arch.saf)",
            path.display()
        ))
    })
}

/// Parses one file on its own. Parse errors are printed and end the command.
fn parse_file(path: &Path, expected: Option<DocumentKind>) -> Result<Document, Failure> {
    let kind = kind_of(path)?;
    if let Some(want) = expected {
        if kind != want {
            return Err(usage(format!("{}: expected a {want} file", path.display())));
        }
    }
    let bytes = read(path)?;
    let r = parse_document_bytes(kind, &bytes, &path.display().to_string());
    print_diagnostics(&r.diagnostics);
    r.document.ok_or_else(|| error(format!("{} does not parse", path.display())))
}

fn matrix_files(dir: &Path) -> Result<Vec<PathBuf>, Failure> {
    let files = model_files(dir).map_err(|e| usage(format!("cannot read {}: {e}", dir.display())))?;
    Ok(files
        .into_iter()
        .filter(|p| DocumentKind::from_path(p) == Some(DocumentKind::Matrix))
        .collect())
}

fn write_json<T: serde::Serialize + ?Sized>(value: &T) {
    let mut s = serde_json::to_string_pretty(value).expect("output serializes");
    s.push('\n');
    print!("{s}");
}

fn load_dir(dir: &Path) -> Result<Workspace, Failure> {
    if !dir.is_dir() {
        return Err(usage(format!("{} is not a directory", dir.display())));
    }
    let r = parse_workspace(dir).map_err(|e| usage(format!("cannot read {}: {e}", dir.display())))?;
    print_diagnostics(&r.diagnostics);
    r.document.ok_or_else(|| error(format!("workspace {} does not load", dir.display())))
}

pub fn check(a: CheckArgs) -> Outcome {
    let config = config()?;
    let mut paths = Vec::new();
    for p in &a.paths {
        if p.is_dir() {
            paths.extend(model_files(p).map_err(|e| usage(format!("cannot read {}: {e}", p.display())))?);
        } else if p.is_file() {
            kind_of(p)?;
            paths.push(p.clone());
        } else {
            return Err(usage(format!("{}: no such file or directory", p.display())));
        }
    }
    if let Some(dir) = a.matrices.as_ref().or(config.matrices_dir.as_ref()) {
        paths.extend(matrix_files(dir)?);
    }
    paths.sort();
    paths.dedup();
    let loaded = load_workspace(&paths).map_err(|e| usage(e.to_string()))?;
    let mut diags = loaded.diagnostics;
    if let Some(ws) = &loaded.document {
        diags.extend(validate(ws, &config.lint));
    }
    sort_diagnostics(&mut diags);
    let code = if loaded.document.is_none() { ERRORS } else { exit_code(&diags, a.strict) as u8 };
    match a.format {
        Format::Json => write_json(&diags),
        Format::Text => {
            print_diagnostics(&diags);
            let count = |s| diags.iter().filter(|d| d.severity() == s).count();
            use saf_core::diag::Severity;
            eprintln!(
                "{} file(s): {} error(s), {} warning(s), {} note(s)",
                paths.len(),
                count(Severity::Error),
                count(Severity::Warning),
                count(Severity::Info)
            );
        }
    }
    Ok(code)
}

pub fn render(a: RenderArgs) -> Outcome {
    let config = config()?;
    let format = match (&a.format, &a.output) {
        (Some(f), _) => f.parse::<RenderFormat>().map_err(usage)?,
        (None, Some(out)) => match out.extension().and_then(|e| e.to_str()) {
            Some("drawio") | Some("xml") => RenderFormat::Drawio,
            Some("json") => RenderFormat::Json,
            _ => RenderFormat::Svg,
        },
        (None, None) => RenderFormat::Svg,
    };
    let Document::DecisionMap(dm) = parse_file(&a.file, Some(DocumentKind::Dm))? else {
        unreachable!("kind checked")
    };
    let known = |id: &str| dm.concern(id).is_some() || dm.feature(id).is_some();
    for e in &dm.effects {
        let source_known = match &e.source.variant {
            Some(v) => dm.feature(e.source.id.as_str()).is_some_and(|f| f.variant(v.as_str()).is_some()),
            None => known(e.source.id.as_str()),
        };
        if !source_known || !known(e.target.as_str()) {
            eprintln!("warning: effect {} -> {} names an undeclared node and is not drawn", e.source, e.target);
        }
    }
    let out = render_dm(&dm, format, &config.render);
    match &a.output {
        Some(path) => std::fs::write(path, out).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{out}"),
    }
    Ok(OK)
}

pub fn fmt(a: FmtArgs) -> Outcome {
    let mut unformatted = 0;
    for path in &a.files {
        let doc = parse_file(path, None)?;
        let canonical = serialize_document(&doc);
        let current = read(path)?;
        if current == canonical.as_bytes() {
            continue;
        }
        if a.check {
            println!("{}", path.display());
            unformatted += 1;
        } else {
            std::fs::write(path, canonical).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
        }
    }
    Ok(if unformatted > 0 { STRICT_WARNINGS } else { OK })
}

fn print_classification(c: &Classification, format: Format) {
    match (format, c) {
        (Format::Json, _) => write_json(c),
        (Format::Text, Classification::Leaf { level, path }) => {
            println!("impact: {level}");
            println!("path: {}", path.join(" -> "));
        }
        (Format::Text, Classification::NeedMore { node, question, .. }) => {
            println!("next question [{node}]: {question}");
        }
    }
}

fn classify_or_fail(graph: &DecisionGraphSpec, answers: &[Answer]) -> Result<Classification, Failure> {
    classify_impact(graph, answers).map_err(|d| error(d.to_string()))
}

pub fn classify(a: ClassifyArgs) -> Outcome {
    let graph = match &a.graph {
        Some(path) => {
            let text = String::from_utf8(read(path)?).map_err(|_| usage(format!("{} is not UTF-8", path.display())))?;
            DecisionGraphSpec::from_toml(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?
        }
        None => config()?.graph,
    };
    if let Some(list) = &a.answers {
        let answers = parse_answers(list).map_err(usage)?;
        print_classification(&classify_or_fail(&graph, &answers)?, a.format);
        return Ok(OK);
    }
    let stdin = std::io::stdin();
    let mut lines = stdin.lock().lines();
    let mut answers = Vec::new();
    loop {
        let c = classify_or_fail(&graph, &answers)?;
        let Classification::NeedMore { question, .. } = &c else {
            print_classification(&c, a.format);
            return Ok(OK);
        };
        eprint!("{question} [y/n] ");
        let _ = std::io::stderr().flush();
        match lines.next() {
            Some(Ok(line)) => match line.trim().parse::<Answer>() {
                Ok(answer) => answers.push(answer),
                Err(e) => eprintln!("{e}"),
            },
            _ => {
                eprintln!();
                print_classification(&c, a.format);
                return Ok(OK);
            }
        }
    }
}

pub fn suggest(a: SuggestArgs) -> Outcome {
    let config = config()?;
    let Document::DecisionMap(dm) = parse_file(&a.file, Some(DocumentKind::Dm))? else {
        unreachable!("kind checked")
    };
    let mut matrices = Vec::new();
    if let Some(dir) = a.matrices.as_ref().or(config.matrices_dir.as_ref()) {
        for path in matrix_files(dir)? {
            if let Document::Matrix(m) = parse_file(&path, Some(DocumentKind::Matrix))? {
                matrices.push(m);
            }
        }
    }
    let suggestions = suggest_effects(&dm, &matrices);
    match a.format {
        Format::Json => write_json(&suggestions),
        Format::Text => {
            for s in &suggestions {
                let verb = if s.resolves_existing { "resolve" } else { "add" };
                println!(
                    "{verb} {} -> {}: {} ({}; matrix {})",
                    s.source_qa, s.target_qa, s.suggested_type, s.rationale, s.matrix_id
                );
            }
        }
    }
    Ok(OK)
}

fn parse_at(at: Option<&str>) -> Result<DateTime<Utc>, Failure> {
    match at {
        None => Ok(Utc::now()),
        Some(s) => rfc3339::parse(s).map_err(|e| usage(format!("--at must be an RFC 3339 timestamp: {e}"))),
    }
}

/// Accepts a single status, a list of statuses, or an earlier `--prev`
/// output.
#[derive(Deserialize)]
#[serde(untagged)]
enum PreviousFile {
    Many(Vec<KpiStatus>),
    One(KpiStatus),
    Report { statuses: Vec<KpiStatus> },
}

pub fn kpi_eval(a: KpiEvalArgs) -> Outcome {
    let at = parse_at(a.at.as_deref())?;
    let ws = load_dir(&a.dir)?;
    let mut store = MeasureStore::new();
    let default_store = a.dir.join(".saf-store");
    let store_dir = a.store.clone().or_else(|| default_store.is_dir().then_some(default_store));
    if let Some(dir) = store_dir {
        let (loaded, warnings) = load_store(&dir).map_err(|e| error(e.to_string()))?;
        for w in warnings {
            eprintln!("{}: line {}: {}", dir.display(), w.line, w.message);
        }
        store = loaded;
    }
    if let Some(path) = &a.measures {
        let text = String::from_utf8(read(path)?).map_err(|_| usage(format!("{} is not UTF-8", path.display())))?;
        let report = store.ingest_batch(&text, &IngestOptions::default());
        for r in report.rejected.iter().filter(|r| r.reason == RejectReason::Malformed) {
            eprintln!("{}: line {}: {}", path.display(), r.line, r.detail.as_deref().unwrap_or("malformed"));
        }
    }
    let statuses: Vec<KpiStatus> = match &a.kpi {
        Some(id) => {
            let spec = ws.kpi(id).ok_or_else(|| usage(format!("no KPI `{id}` in {}", a.dir.display())))?;
            vec![evaluate(spec, &store, at)]
        }
        None => ws.kpis().map(|k| evaluate(k, &store, at)).collect(),
    };
    if let Some(path) = &a.save {
        std::fs::write(path, statuses_json(&statuses)).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
    }
    match &a.prev {
        Some(path) => {
            let previous = match serde_json::from_slice::<PreviousFile>(&read(path)?) {
                Ok(PreviousFile::Many(v)) | Ok(PreviousFile::Report { statuses: v }) => v,
                Ok(PreviousFile::One(s)) => vec![s],
                Err(e) => return Err(usage(format!("{}: not a status file: {e}", path.display()))),
            };
            let transitions = detect_transitions(&previous, &statuses, ws.kpis());
            for t in &transitions {
                for action in &t.fired {
                    eprintln!("fired {action}: {} went {} -> {}", t.kpi_id, t.from, t.to);
                }
            }
            write_json(&serde_json::json!({ "statuses": statuses, "transitions": transitions }));
        }
        None if a.kpi.is_some() => print!("{}", status_json(&statuses[0])),
        None => print!("{}", statuses_json(&statuses)),
    }
    Ok(OK)
}

pub fn ingest(a: IngestArgs) -> Outcome {
    let text = if a.file.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| usage(format!("cannot read standard input: {e}")))?;
        s
    } else {
        String::from_utf8(read(&a.file)?).map_err(|_| usage(format!("{} is not UTF-8", a.file.display())))?
    };
    let catalog = match &a.workspace {
        Some(dir) => MetricCatalog::from_workspace(&load_dir(dir)?),
        None if a.strict => return Err(usage("--strict needs --workspace to know the declared metrics")),
        None => MetricCatalog::default(),
    };
    let (mut store, warnings) = PersistentStore::open(&a.store).map_err(|e| error(e.to_string()))?;
    for w in warnings {
        eprintln!("{}: line {}: {}", a.store.display(), w.line, w.message);
    }
    let report = store
        .ingest(&text, &IngestOptions { strict: a.strict, catalog })
        .map_err(|e| error(format!("cannot append to {}: {e}", a.store.display())))?;
    for n in &report.notes {
        eprintln!("line {}: {}", n.line, n.message);
    }
    write_json(&report);
    Ok(if report.has_malformed() {
        ERRORS
    } else if report.rejected.iter().any(|r| r.reason == RejectReason::UnknownMetric) {
        STRICT_WARNINGS
    } else {
        OK
    })
}

fn print_list(label: &str, ids: &[impl std::fmt::Display]) {
    let ids: Vec<String> = ids.iter().map(ToString::to_string).collect();
    println!("  {label}: {}", if ids.is_empty() { "-".to_string() } else { ids.join(", ") });
}

pub fn trace(a: TraceArgs) -> Outcome {
    let ws = load_dir(&a.dir)?;
    if let Some(kpi) = &a.kpi {
        let t = trace_kpi(&ws, kpi).map_err(|d| error(d.to_string()))?;
        match a.format {
            Format::Json => write_json(&t),
            Format::Text => {
                println!("kpi {}", t.kpi_id);
                print_list("metrics", &t.metrics);
                print_list("concerns", &t.concerns);
                print_list("decisions", &t.decisions);
                print_list("features", &t.features);
                print_list("elements", &t.elements);
            }
        }
    } else if let Some(element) = &a.element {
        let i = impacts_of_element(&ws, element).map_err(|d| error(d.to_string()))?;
        match a.format {
            Format::Json => write_json(&i),
            Format::Text => {
                println!("element {}", i.element_id);
                print_list("features", &i.features);
                print_list("decisions", &i.decisions);
                print_list("concerns", &i.concerns);
                print_list("kpis", &i.kpis);
            }
        }
    }
    Ok(OK)
}

pub fn serve(a: ServeArgs) -> Outcome {
    let tool = config()?;
    if !a.workspace.is_dir() {
        return Err(usage(format!("{} is not a directory", a.workspace.display())));
    }
    let store = a.store.unwrap_or_else(|| a.workspace.join(".saf-store"));
    let config = saf_service::ServiceConfig {
        workspace: a.workspace,
        store,
        tool,
    };
    let state = match saf_service::AppState::load(config, Utc::now()) {
        Ok(s) => s,
        Err(saf_service::LoadError::Invalid(diags)) => {
            print_diagnostics(&diags);
            return Err(error("workspace does not load"));
        }
        Err(e) => return Err(error(e.to_string())),
    };
    let addr = std::net::SocketAddr::new(a.host, a.port);
    let runtime = tokio::runtime::Runtime::new().map_err(|e| error(e.to_string()))?;
    eprintln!("listening on http://{addr}");
    runtime
        .block_on(saf_service::serve(state, addr))
        .map_err(|e| error(format!("cannot serve on {addr}: {e}")))?;
    Ok(OK)
}
