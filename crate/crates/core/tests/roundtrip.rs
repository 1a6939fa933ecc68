mod support;

use proptest::prelude::*;
use saf_core::dsl::{canonicalize_document, file_name, parse_document, parse_document_bytes, serialize_document};
use saf_core::model::{Document, DocumentKind};

const KINDS: [DocumentKind; 5] = [
    DocumentKind::Dm,
    DocumentKind::Sq,
    DocumentKind::Matrix,
    DocumentKind::Kpi,
    DocumentKind::Arch,
];

fn round_trip(doc: &Document) -> Result<(), String> {
    let text = serialize_document(doc);
    let name = file_name(doc);
    let parsed = parse_document(doc.kind(), &text, &name);
    let Some(back) = parsed.document else {
        return Err(format!("re-parse failed: {:?}\n{text}", parsed.diagnostics));
    };
    let expected = canonicalize_document(doc);
    if back != expected {
        return Err(format!("round trip changed the document\n{text}\n{back:#?}\n{expected:#?}"));
    }
    if serialize_document(&back) != text {
        return Err("serialization is not a fixed point".into());
    }
    Ok(())
}

#[test]
fn five_hundred_documents_per_kind_round_trip() {
    for kind in 0..5 {
        for seed in 0..500u64 {
            let mut rng = support::rng(seed * 5 + kind as u64);
            let doc = support::gen_document(&mut rng, kind);
            if let Err(e) = round_trip(&doc) {
                panic!("kind {kind} seed {seed}: {e}");
            }
        }
    }
}

#[test]
fn fixture_files_round_trip() {
    let dir = support::fixtures_dir();
    let mut seen = 0;
    for path in saf_core::dsl::model_files(&dir).unwrap() {
        let kind = DocumentKind::from_path(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let r = parse_document(kind, &text, &path.display().to_string());
        let doc = r.document.unwrap_or_else(|| panic!("{}: {:?}", path.display(), r.diagnostics));
        round_trip(&doc).unwrap();
        seen += 1;
    }
    assert!(seen >= 10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    /// Arbitrary bytes never panic a parser, and a failed parse always
    /// carries a located error.
    #[test]
    fn parsers_total_on_bytes(kind in 0usize..5, bytes in proptest::collection::vec(any::<u8>(), 0..256)) {
        let r = parse_document_bytes(KINDS[kind], &bytes, "fuzz.input");
        if r.document.is_none() {
            prop_assert!(r.diagnostics.iter().any(|d| d.severity() == saf_core::diag::Severity::Error));
            prop_assert!(r.diagnostics.iter().filter(|d| d.severity() == saf_core::diag::Severity::Error).all(|d| d.location.is_some()));
        }
    }

    /// Token-shaped noise reaches deeper into the grammars than raw bytes.
    #[test]
    fn parsers_total_on_token_soup(kind in 0usize..5, words in proptest::collection::vec(
        prop_oneof![
            Just("decision_map".to_string()), Just("feature".to_string()), Just("qa".to_string()),
            Just("effect".to_string()), Just("->".to_string()), Just("{".to_string()), Just("}".to_string()),
            Just("dimension".to_string()), Just("impact".to_string()), Just("positive".to_string()),
            Just("kpi".to_string()), Just("expr".to_string()), Just("target".to_string()), Just("<=".to_string()),
            Just("architecture".to_string()), Just("decision".to_string()), Just(";".to_string()),
            Just("\"".to_string()), Just(",".to_string()), Just("\n".to_string()), Just("# dims:".to_string()),
            Just("avg(m, 1h)".to_string()), Just("|".to_string()), Just("-1e400".to_string()),
            "[a-z_]{1,6}", "\\PC{0,4}",
        ], 0..60)) {
        let text = words.join(" ");
        let r = parse_document(KINDS[kind], &text, "soup.input");
        prop_assert_eq!(r.document.is_some(), !saf_core::diag::has_errors(&r.diagnostics));
    }

    #[test]
    fn generated_documents_round_trip(seed in any::<u64>(), kind in 0usize..5) {
        let mut rng = support::rng(seed);
        let doc = support::gen_document(&mut rng, kind);
        prop_assert!(round_trip(&doc).is_ok(), "{}", round_trip(&doc).unwrap_err());
    }
}

/// At least ten thousand byte inputs across all parsers, deterministic.
#[test]
fn ten_thousand_seeded_byte_inputs() {
    use rand::Rng;
    let mut rng = support::rng(0x5AF);
    let mut corpus: Vec<Vec<u8>> = Vec::new();
    for kind in 0..5 {
        for seed in 0..20u64 {
            let mut g = support::rng(seed);
            corpus.push(serialize_document(&support::gen_document(&mut g, kind)).into_bytes());
        }
    }
    for i in 0..10_000 {
        let kind = KINDS[i % 5];
        let mut bytes = corpus[rng.gen_range(0..corpus.len())].clone();
        for _ in 0..rng.gen_range(1..6) {
            match rng.gen_range(0..3) {
                0 if !bytes.is_empty() => {
                    let at = rng.gen_range(0..bytes.len());
                    bytes[at] = rng.gen();
                }
                1 if !bytes.is_empty() => {
                    let at = rng.gen_range(0..bytes.len());
                    bytes.truncate(at);
                }
                _ => {
                    let at = rng.gen_range(0..=bytes.len());
                    bytes.insert(at, rng.gen());
                }
            }
        }
        let r = parse_document_bytes(kind, &bytes, "mutant.input");
        assert_eq!(r.document.is_some(), !saf_core::diag::has_errors(&r.diagnostics));
    }
}

#[test]
fn documents_survive_json() {
    use saf_core::model::Document;
    let mut rng = support::rng(11);
    for i in 0..500 {
        let doc = support::gen_document(&mut rng, i % 5);
        let back = Document::from_json(doc.kind(), doc.to_json()).unwrap();
        assert_eq!(back, doc, "{}", file_name(&doc));
    }
}
