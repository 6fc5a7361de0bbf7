use std::collections::HashSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::CorpusError;
use crate::io::jsonl_lines;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Journal,
    Patent,
    Fixture,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub text: String,
    pub source: Source,
}

pub fn parse_corpus(body: &str) -> Result<Vec<Document>, CorpusError> {
    let mut seen = HashSet::new();
    let mut docs = Vec::new();
    for (line, raw) in jsonl_lines(body) {
        let doc: Document = serde_json::from_str(raw).map_err(|e| CorpusError::Parse {
            line,
            message: e.to_string(),
        })?;
        if doc.id.is_empty() || doc.text.is_empty() {
            return Err(CorpusError::Parse {
                line,
                message: "`id` and `text` must be nonempty".to_string(),
            });
        }
        if !seen.insert(doc.id.clone()) {
            return Err(CorpusError::DuplicateId(doc.id));
        }
        docs.push(doc);
    }
    Ok(docs)
}

/// Loads a JSONL corpus: one `{"id", "text", "source"}` object per line.
pub fn load_corpus(path: &Path) -> Result<Vec<Document>, CorpusError> {
    parse_corpus(&fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loads_in_order() {
        let body = r#"{"id":"d1","text":"FeCl3 was added.","source":"fixture"}
{"id":"d2","text":"Stirred at 60 °C.","source":"journal"}
"#;
        let docs = parse_corpus(body).unwrap();
        assert_eq!(docs.len(), 2);
        assert_eq!(docs[1].id, "d2");
        assert_eq!(docs[1].source, Source::Journal);
    }

    #[test]
    fn missing_text_reports_line() {
        let body = "{\"id\":\"d1\",\"text\":\"x\",\"source\":\"fixture\"}\n{\"id\":\"d2\",\"source\":\"fixture\"}\n";
        match parse_corpus(body) {
            Err(CorpusError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_ids_rejected() {
        let body = "{\"id\":\"d1\",\"text\":\"x\",\"source\":\"fixture\"}\n{\"id\":\"d1\",\"text\":\"y\",\"source\":\"fixture\"}\n";
        assert!(matches!(parse_corpus(body), Err(CorpusError::DuplicateId(id)) if id == "d1"));
    }

    #[test]
    fn load_from_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.jsonl");
        fs::write(&p, "{\"id\":\"a\",\"text\":\"t\",\"source\":\"patent\"}\n").unwrap();
        assert_eq!(load_corpus(&p).unwrap()[0].source, Source::Patent);
        assert!(matches!(load_corpus(&dir.path().join("nope")), Err(CorpusError::Io(_))));
    }
}
