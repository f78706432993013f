//! Newline-delimited score manifests.
//!
//! One flat JSON object per line with keys `id`, `class`, `difficulty` and
//! an optional `path`. Other keys are carried through unchanged. Blank lines
//! are skipped.

use std::collections::HashMap;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};
use crate::histogram::ScoreRecord;

use super::write_atomic;

/// Reads and validates a manifest file.
pub fn load_manifest(path: impl AsRef<Path>) -> Result<Vec<ScoreRecord>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_manifest(BufReader::new(file), path)
}

/// Parses manifest lines from `reader`; `path` is only used in errors.
pub fn parse_manifest(reader: impl BufRead, path: &Path) -> Result<Vec<ScoreRecord>> {
    let mut records = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let parse_err = |reason: String| Error::Parse {
            path: path.to_path_buf(),
            line: line_no,
            reason,
        };
        let record: ScoreRecord = serde_json::from_str(&line).map_err(|e| parse_err(e.to_string()))?;
        record.validate().map_err(|e| parse_err(e.to_string()))?;
        if let Some(&first) = seen.get(&record.id) {
            return Err(Error::DuplicateId {
                path: path.to_path_buf(),
                line: line_no,
                first,
                id: record.id,
            });
        }
        seen.insert(record.id.clone(), line_no);
        records.push(record);
    }
    Ok(records)
}

/// Serializes records, one per line, each line newline-terminated.
pub fn write_manifest_to(records: &[ScoreRecord]) -> Result<String> {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r)?);
        out.push('\n');
    }
    Ok(out)
}

pub fn write_manifest(path: impl AsRef<Path>, records: &[ScoreRecord]) -> Result<()> {
    write_atomic(path.as_ref(), write_manifest_to(records)?.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn parse(text: &str) -> Result<Vec<ScoreRecord>> {
        parse_manifest(text.as_bytes(), Path::new("m.jsonl"))
    }

    #[test]
    fn three_lines_three_records() {
        let text = r#"{"id":"a","class":"dog","difficulty":0.1}
{"id":"b","class":"dog","difficulty":1,"path":"img/b.png"}

{"id":"c","class":"cat","difficulty":0.0}
"#;
        let recs = parse(text).unwrap();
        assert_eq!(recs.len(), 3);
        assert_eq!(recs[1].source_path.as_deref(), Some("img/b.png"));
        assert_eq!(recs[2].class_label.as_str(), "cat");
    }

    #[test]
    fn out_of_range_names_id_and_line() {
        let text = "{\"id\":\"a\",\"class\":\"x\",\"difficulty\":0.5}\n{\"id\":\"img-7\",\"class\":\"x\",\"difficulty\":1.3}\n";
        let msg = parse(text).unwrap_err().to_string();
        assert!(msg.contains("m.jsonl:2"), "{msg}");
        assert!(msg.contains("img-7"), "{msg}");
    }

    #[test]
    fn duplicate_ids_report_both_lines() {
        let text = "{\"id\":\"a\",\"class\":\"x\",\"difficulty\":0.5}\n{\"id\":\"b\",\"class\":\"x\",\"difficulty\":0.5}\n{\"id\":\"a\",\"class\":\"y\",\"difficulty\":0.2}\n";
        match parse(text).unwrap_err() {
            Error::DuplicateId { line, first, id, .. } => assert_eq!((line, first, id.as_str()), (3, 1, "a")),
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn malformed_and_missing_fields_are_parse_errors() {
        for text in ["{\"id\":\"a\"", "{\"id\":\"a\",\"class\":\"x\"}", "{\"id\":1,\"class\":\"x\",\"difficulty\":0}"] {
            assert!(matches!(parse(text), Err(Error::Parse { line: 1, .. })), "{text}");
        }
    }

    #[test]
    fn unknown_keys_survive_round_trip() {
        let text = "{\"id\":\"a\",\"class\":\"x\",\"difficulty\":0.30000000000000004,\"seed\":7,\"tags\":[\"g\"]}\n";
        let recs = parse(text).unwrap();
        assert_eq!(recs[0].extra["seed"], 7);
        assert_eq!(recs[0].difficulty, 0.30000000000000004);
        assert_eq!(write_manifest_to(&recs).unwrap(), text);
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.jsonl");
        let recs = vec![
            ScoreRecord::new("a", "x", 0.25),
            ScoreRecord::new("b", "y", 1.0),
        ];
        write_manifest(&p, &recs).unwrap();
        assert_eq!(load_manifest(&p).unwrap(), recs);
        assert_eq!(load_manifest(dir.path().join("missing")).unwrap_err().kind(), "io");
    }

    proptest! {
        #[test]
        fn write_load_write_is_stable(
            ds in proptest::collection::vec(0.0f64..=1.0, 0..50),
            extra in proptest::option::of(any::<i64>()),
        ) {
            let recs: Vec<ScoreRecord> = ds
                .iter()
                .enumerate()
                .map(|(i, &d)| {
                    let mut r = ScoreRecord::new(format!("id-{i}"), format!("c{}", i % 3), d);
                    if let Some(v) = extra {
                        r.extra.insert("note".into(), v.into());
                    }
                    r
                })
                .collect();
            let text = write_manifest_to(&recs).unwrap();
            let back = parse(&text).unwrap();
            prop_assert_eq!(&back, &recs);
            prop_assert_eq!(write_manifest_to(&back).unwrap(), text);
        }
    }
}
