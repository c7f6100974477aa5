mod common;

use proptest::prelude::*;
use tmkit::bundled::BUNDLED;
use tmkit::dsl::{parse_lenient, parse_str, serialize, Document, SourceText};
use tmkit::validate_static;

fn doc(text: &str) -> Document {
    parse_str(text).unwrap_or_else(|d| panic!("{d:?}"))
}

#[test]
fn bundled_models_round_trip() {
    for b in &BUNDLED {
        let d = b.document().unwrap();
        let again = parse_str(&serialize(&d)).unwrap();
        assert!(d.structurally_eq(&again), "{}", b.name);
        assert_eq!(serialize(&d), serialize(&again), "{}", b.name);
    }
}

#[test]
fn minimal_model() {
    let d = doc("model m {\n  thimac A { create }\n}\n");
    assert_eq!(d.model.stages.len(), 1);
    assert!(validate_static(&d.model).is_empty());
}

#[test]
fn syntax_error_is_positioned() {
    let errs = parse_str("model m {\n  thimac A { create\n").unwrap_err();
    assert!(errs[0].message.starts_with("syntax error"), "{errs:?}");
    assert_eq!(errs[0].line, 2);
}

#[test]
fn unknown_stage_kind() {
    let errs = parse_str("model m {\n  thimac A {\n    destroy\n  }\n}\n").unwrap_err();
    assert!(
        errs[0].message.starts_with("unknown stage kind"),
        "{errs:?}"
    );
    assert_eq!((errs[0].line, errs[0].column), (3, 5));
}

#[test]
fn duplicate_thimac() {
    let errs =
        parse_str("model m {\n  thimac A { create }\n  thimac A { process }\n}\n").unwrap_err();
    assert!(
        errs.iter().any(|e| e.message.starts_with("duplicate id")),
        "{errs:?}"
    );
}

#[test]
fn dangling_flow_is_an_error_strictly_and_a_warning_leniently() {
    let text = "model m {\n  thimac A { release; transfer }\n  flow A.release -> B.transfer\n}\n";
    let errs = parse_str(text).unwrap_err();
    assert!(
        errs[0].message.starts_with("dangling reference"),
        "{errs:?}"
    );
    assert_eq!(errs[0].line, 3);
    let (d, warnings) = parse_lenient(&SourceText::inline(text)).unwrap();
    assert_eq!(warnings.len(), 1);
    assert!(!warnings[0].is_error());
    let report = validate_static(&d.model);
    assert_eq!(report.len(), 1, "{report}");
}

#[test]
fn unicode_names_and_quoted_reserved_words() {
    let d = doc("model m {\n  thimac Λύγκας { create }\n  thimac \"flow\" { create }\n}\n");
    let text = serialize(&d);
    assert!(text.contains("thimac Λύγκας"));
    assert!(text.contains("thimac \"flow\""));
    assert!(d.structurally_eq(&parse_str(&text).unwrap()));
}

#[test]
fn empty_input_is_a_syntax_error() {
    let errs = parse_str("").unwrap_err();
    assert!(errs[0].message.starts_with("syntax error"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn serialize_parse_round_trip(bp in common::arb_blueprint()) {
        let model = common::build(&bp, true);
        let d = Document { model, events: vec![], behavior: None };
        let text = serialize(&d);
        let back = parse_str(&text).map_err(|e| TestCaseError::fail(format!("{e:?}\n{text}")))?;
        prop_assert!(d.structurally_eq(&back), "{}", text);
        prop_assert_eq!(serialize(&back), text);
    }
}
