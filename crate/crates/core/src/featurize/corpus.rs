use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Instance, Split};
use crate::error::{Error, Result};

/// Class names for the 1-based AG's News class column.
pub const AG_NEWS_CLASSES: [&str; 4] = ["World", "Sports", "Business", "Sci/Tech"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorpusFormat {
    /// `COARSE:fine question text`, one per line.
    Trec6,
    /// Three quoted columns: class index (1..=4), title, description.
    AgNewsCsv,
    /// One `{"text": ..., "label": ...}` object per line.
    Jsonl,
}

impl FromStr for CorpusFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "trec6" | "trec" => Ok(CorpusFormat::Trec6),
            "ag_news_csv" | "ag_news" | "ag" => Ok(CorpusFormat::AgNewsCsv),
            "jsonl" => Ok(CorpusFormat::Jsonl),
            other => Err(Error::Config(format!("unknown corpus format {other:?}"))),
        }
    }
}

/// Read and parse a corpus file. Invalid UTF-8 is replaced and reported
/// through a log warning.
pub fn parse_corpus(path: &Path, format: CorpusFormat, split: Split) -> Result<Dataset> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let (dataset, replaced) = parse_corpus_bytes(&bytes, format, split, path)?;
    if replaced > 0 {
        log::warn!(
            "{}: replaced {replaced} invalid UTF-8 sequence(s)",
            path.display()
        );
    }
    Ok(dataset)
}

/// Parse in-memory corpus bytes. Returns the dataset and the number of
/// invalid UTF-8 sequences that were replaced.
pub fn parse_corpus_bytes(
    bytes: &[u8],
    format: CorpusFormat,
    split: Split,
    origin: &Path,
) -> Result<(Dataset, usize)> {
    let (text, replaced) = match std::str::from_utf8(bytes) {
        Ok(s) => (s.to_string(), 0),
        Err(_) => {
            let lossy = String::from_utf8_lossy(bytes).into_owned();
            let original = count_replacement_chars_in_valid_prefixes(bytes);
            let replaced = lossy.matches('\u{FFFD}').count() - original;
            (lossy, replaced)
        }
    };
    if text.trim().is_empty() {
        return Err(Error::Format(format!("{}: corpus is empty", origin.display())));
    }
    let dataset = match format {
        CorpusFormat::Trec6 => parse_trec(&text, split, origin)?,
        CorpusFormat::AgNewsCsv => parse_ag_news(&text, split, origin)?,
        CorpusFormat::Jsonl => parse_jsonl(&text, split, origin)?,
    };
    Ok((dataset, replaced))
}

// U+FFFD already present as valid UTF-8 in the input.
fn count_replacement_chars_in_valid_prefixes(bytes: &[u8]) -> usize {
    bytes.windows(3).filter(|w| *w == [0xEF, 0xBF, 0xBD]).count()
}

fn parse_err(origin: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: origin.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Assigns contiguous class indices in first-appearance order.
#[derive(Default)]
struct ClassIndex {
    names: Vec<String>,
}

impl ClassIndex {
    fn index_of(&mut self, name: &str) -> usize {
        match self.names.iter().position(|n| n == name) {
            Some(i) => i,
            None => {
                self.names.push(name.to_string());
                self.names.len() - 1
            }
        }
    }
}

fn parse_trec(text: &str, split: Split, origin: &Path) -> Result<Dataset> {
    let mut classes = ClassIndex::default();
    let mut instances = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let (head, rest) = line
            .split_once(char::is_whitespace)
            .ok_or_else(|| parse_err(origin, i + 1, "expected `LABEL:fine text`"))?;
        let (coarse, fine) = head
            .split_once(':')
            .ok_or_else(|| parse_err(origin, i + 1, format!("label token {head:?} has no ':'")))?;
        if coarse.is_empty() || fine.is_empty() {
            return Err(parse_err(origin, i + 1, format!("malformed label token {head:?}")));
        }
        instances.push(Instance {
            text: rest.trim().to_string(),
            label: classes.index_of(coarse),
        });
    }
    Dataset::new(instances, classes.names, split)
}

fn parse_ag_news(text: &str, split: Split, origin: &Path) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut instances = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(i + 1, |p| p.line() as usize);
            parse_err(origin, line, e.to_string())
        })?;
        let line = record.position().map_or(i + 1, |p| p.line() as usize);
        if record.len() != 3 {
            return Err(parse_err(
                origin,
                line,
                format!("expected 3 columns, found {}", record.len()),
            ));
        }
        let class: usize = record[0]
            .trim()
            .parse()
            .map_err(|_| parse_err(origin, line, format!("class index {:?} is not an integer", &record[0])))?;
        if !(1..=AG_NEWS_CLASSES.len()).contains(&class) {
            return Err(Error::Format(format!(
                "{}:{line}: unknown class index {class}",
                origin.display()
            )));
        }
        instances.push(Instance {
            text: format!("{} {}", &record[1], &record[2]),
            label: class - 1,
        });
    }
    Dataset::new(
        instances,
        AG_NEWS_CLASSES.iter().map(|s| s.to_string()).collect(),
        split,
    )
}

#[derive(Deserialize)]
struct JsonlRow {
    text: String,
    label: JsonLabel,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum JsonLabel {
    Int(i64),
    Str(String),
}

/// String labels keep first-appearance order; if every label is an integer
/// the classes are ordered numerically.
fn parse_jsonl(text: &str, split: Split, origin: &Path) -> Result<Dataset> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: JsonlRow =
            serde_json::from_str(line).map_err(|e| parse_err(origin, i + 1, e.to_string()))?;
        rows.push(row);
    }
    let all_int = rows.iter().all(|r| matches!(r.label, JsonLabel::Int(_)));
    let key = |l: &JsonLabel| match l {
        JsonLabel::Int(v) => v.to_string(),
        JsonLabel::Str(s) => s.clone(),
    };
    let mut classes = ClassIndex::default();
    if all_int {
        let mut ints: Vec<i64> = rows
            .iter()
            .map(|r| match r.label {
                JsonLabel::Int(v) => v,
                JsonLabel::Str(_) => unreachable!(),
            })
            .collect();
        ints.sort_unstable();
        ints.dedup();
        for v in ints {
            classes.index_of(&v.to_string());
        }
    }
    let instances = rows
        .into_iter()
        .map(|r| Instance {
            label: classes.index_of(&key(&r.label)),
            text: r.text,
        })
        .collect();
    Dataset::new(instances, classes.names, split)
}

/// Write the class-index to class-name mapping next to derived outputs.
pub fn write_label_map(dataset: &Dataset, path: &Path) -> Result<()> {
    let map = serde_json::json!({
        "classes": dataset.class_names(),
    });
    let body = serde_json::to_string_pretty(&map).expect("label map serializes");
    fs::write(path, body + "\n").map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str, f: CorpusFormat) -> Result<Dataset> {
        parse_corpus_bytes(s.as_bytes(), f, Split::Train, Path::new("mem")).map(|(d, _)| d)
    }

    #[test]
    fn trec_line_uses_coarse_label() {
        let ds = parse(
            "NUM:date When was Ozzy Osbourne born ?\nDESC:manner How did serfdom develop ?\nNUM:count How many ?\n",
            CorpusFormat::Trec6,
        )
        .unwrap();
        assert_eq!(ds.class_names(), &["NUM", "DESC"]);
        assert_eq!(ds.instances()[1].text, "How did serfdom develop ?");
        assert_eq!(ds.labels(), vec![0, 1, 0]);
    }

    #[test]
    fn trec_bad_line_reports_line_number() {
        let err = parse("NUM:date ok ?\nnocolon here\n", CorpusFormat::Trec6).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn ag_row_concatenates_title_and_description() {
        let ds = parse(
            "\"3\",\"Wall St. Bears\",\"Short-sellers...\"\n\"1\",\"x\",\"y\"\n",
            CorpusFormat::AgNewsCsv,
        )
        .unwrap();
        assert_eq!(ds.instances()[0].label, 2);
        assert_eq!(ds.instances()[0].text, "Wall St. Bears Short-sellers...");
        assert_eq!(ds.num_classes(), 4);
    }

    #[test]
    fn ag_unknown_class_is_format_error() {
        let err = parse("\"5\",\"a\",\"b\"\n", CorpusFormat::AgNewsCsv).unwrap_err();
        assert!(matches!(err, Error::Format(_)), "{err}");
        let err = parse("\"x\",\"a\",\"b\"\n", CorpusFormat::AgNewsCsv).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
    }

    #[test]
    fn empty_file_is_format_error() {
        for f in [CorpusFormat::Trec6, CorpusFormat::AgNewsCsv, CorpusFormat::Jsonl] {
            assert!(matches!(parse("", f), Err(Error::Format(_))));
        }
    }

    #[test]
    fn jsonl_string_and_int_labels() {
        let ds = parse(
            "{\"text\":\"a\",\"label\":\"food\"}\n{\"text\":\"b\",\"label\":\"keys\"}\n{\"text\":\"c\",\"label\":\"food\"}\n",
            CorpusFormat::Jsonl,
        )
        .unwrap();
        assert_eq!(ds.class_names(), &["food", "keys"]);
        assert_eq!(ds.labels(), vec![0, 1, 0]);
        let ds = parse(
            "{\"text\":\"a\",\"label\":7}\n{\"text\":\"b\",\"label\":2}\n",
            CorpusFormat::Jsonl,
        )
        .unwrap();
        assert_eq!(ds.class_names(), &["2", "7"]);
        assert_eq!(ds.labels(), vec![1, 0]);
        assert!(matches!(
            parse("{\"text\":\"a\"}\n", CorpusFormat::Jsonl),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn invalid_utf8_is_replaced_and_counted() {
        let bytes = b"HUM:ind Who is Andr\xe9 ?\nLOC:city Where ?\n";
        let (ds, replaced) =
            parse_corpus_bytes(bytes, CorpusFormat::Trec6, Split::Train, Path::new("mem")).unwrap();
        assert_eq!(replaced, 1);
        assert!(ds.instances()[0].text.contains('\u{FFFD}'));
    }

    #[test]
    fn format_names_parse() {
        assert_eq!("TREC6".parse::<CorpusFormat>().unwrap(), CorpusFormat::Trec6);
        assert_eq!("ag-news-csv".parse::<CorpusFormat>().unwrap(), CorpusFormat::AgNewsCsv);
        assert!("xml".parse::<CorpusFormat>().is_err());
    }
}
