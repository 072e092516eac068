use std::path::Path;

use rhmap_core::dsl::{parse_document, render_algebra, render_sullivan, Document};

fn render(d: &Document) -> String {
    match d {
        Document::Algebra(a) => render_algebra(a),
        Document::Sullivan(s) => render_sullivan(s),
    }
}

#[test]
fn every_valid_fixture_round_trips() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let Ok(parsed) = parse_document(&text) else {
            assert!(path.file_name().unwrap().to_str().unwrap().starts_with("bad_"), "{} fails to parse", path.display());
            continue;
        };
        let once = render(&parsed.value);
        let again = parse_document(&once).unwrap().value;
        assert_eq!(again, parsed.value, "{}", path.display());
        assert_eq!(render(&again), once);
        seen += 1;
    }
    assert!(seen >= 4);
}
