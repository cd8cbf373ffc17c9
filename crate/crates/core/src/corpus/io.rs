//! JSONL and CSV corpus files.
//!
//! JSONL: one object per line with fields `paper_id`, `title`, `authors`
//! (array), `venue`, `year`, `abstract`. Blank lines are skipped.
//!
//! CSV: fixed header `paper_id,title,authors,venue,year,abstract`, authors
//! joined with `;`.
//!
//! A corpus directory holds `papers.jsonl` and `catalog.json`.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde_json::Value;

use super::{Corpus, CorpusError, PaperRecord, VenueCatalog};

const CSV_HEADER: [&str; 6] = ["paper_id", "title", "authors", "venue", "year", "abstract"];
const JSON_FIELDS: [&str; 6] = ["paper_id", "title", "authors", "venue", "year", "abstract"];
pub const PAPERS_FILE: &str = "papers.jsonl";
pub const CATALOG_FILE: &str = "catalog.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    Jsonl,
    Csv,
}

impl FromStr for CorpusFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "jsonl" => Ok(Self::Jsonl),
            "csv" => Ok(Self::Csv),
            other => Err(format!("unknown corpus format `{other}` (expected jsonl or csv)")),
        }
    }
}

fn io_err(path: &Path, source: std::io::Error) -> CorpusError {
    CorpusError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Reads and validates a corpus file against `catalog`.
pub fn load_corpus(
    path: impl AsRef<Path>,
    format: CorpusFormat,
    catalog: VenueCatalog,
) -> Result<Corpus, CorpusError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    read_corpus(BufReader::new(file), format, catalog)
}

pub fn read_corpus<R: BufRead>(
    reader: R,
    format: CorpusFormat,
    catalog: VenueCatalog,
) -> Result<Corpus, CorpusError> {
    let records = match format {
        CorpusFormat::Jsonl => read_jsonl(reader)?,
        CorpusFormat::Csv => read_csv(reader)?,
    };
    let mut seen = std::collections::HashSet::new();
    for (line, rec) in &records {
        let fail = |message: String| CorpusError::Validation {
            line: *line,
            message,
        };
        rec.validate().map_err(fail)?;
        if !catalog.contains(&rec.venue_id) {
            return Err(fail(format!("unknown venue `{}`", rec.venue_id)));
        }
        if !seen.insert(rec.paper_id.clone()) {
            return Err(fail(format!("duplicate paper_id `{}`", rec.paper_id)));
        }
    }
    Corpus::new(records.into_iter().map(|(_, r)| r).collect(), catalog)
}

fn read_jsonl<R: BufRead>(reader: R) -> Result<Vec<(usize, PaperRecord)>, CorpusError> {
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| CorpusError::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let value: Value = serde_json::from_str(&line).map_err(|e| CorpusError::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        let obj = value.as_object().ok_or_else(|| CorpusError::Parse {
            line: line_no,
            message: "expected a JSON object".into(),
        })?;
        if let Some(missing) = JSON_FIELDS.iter().find(|f| !obj.contains_key(**f)) {
            return Err(CorpusError::Validation {
                line: line_no,
                message: format!("missing field `{missing}`"),
            });
        }
        let rec: PaperRecord = serde_json::from_value(value).map_err(|e| CorpusError::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        out.push((line_no, rec));
    }
    Ok(out)
}

fn read_csv<R: Read>(reader: R) -> Result<Vec<(usize, PaperRecord)>, CorpusError> {
    let mut r = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let header = r.headers().map_err(|e| CorpusError::Parse {
        line: 1,
        message: e.to_string(),
    })?;
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(CorpusError::Parse {
            line: 1,
            message: format!("expected header `{}`", CSV_HEADER.join(",")),
        });
    }
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| CorpusError::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.len() != CSV_HEADER.len() {
            let missing = CSV_HEADER.get(rec.len()).copied().unwrap_or("?");
            return Err(CorpusError::Validation {
                line,
                message: format!(
                    "expected {} fields, found {} (missing `{missing}`)",
                    CSV_HEADER.len(),
                    rec.len()
                ),
            });
        }
        let year = rec[4].trim().parse::<i32>().map_err(|_| CorpusError::Parse {
            line,
            message: format!("bad year `{}`", &rec[4]),
        })?;
        let author_ids = rec[2]
            .split(';')
            .map(str::trim)
            .filter(|a| !a.is_empty())
            .map(String::from)
            .collect();
        out.push((
            line,
            PaperRecord {
                paper_id: rec[0].to_string(),
                title: rec[1].to_string(),
                author_ids,
                venue_id: rec[3].to_string(),
                year,
                abstract_text: rec[5].to_string(),
            },
        ));
    }
    Ok(out)
}

/// Writes papers in the given format (the catalog is not included).
pub fn write_corpus<W: Write>(
    corpus: &Corpus,
    writer: W,
    format: CorpusFormat,
) -> Result<(), CorpusError> {
    let wrap = |e: std::io::Error| CorpusError::Io {
        path: "<writer>".into(),
        source: e,
    };
    match format {
        CorpusFormat::Jsonl => {
            let mut w = BufWriter::new(writer);
            for p in corpus.papers() {
                let line = serde_json::to_string(p).expect("record serializes");
                writeln!(w, "{line}").map_err(wrap)?;
            }
            w.flush().map_err(wrap)
        }
        CorpusFormat::Csv => {
            let mut w = csv::Writer::from_writer(writer);
            let csv_err = |e: csv::Error| CorpusError::Invalid(e.to_string());
            w.write_record(CSV_HEADER).map_err(csv_err)?;
            for p in corpus.papers() {
                w.write_record([
                    p.paper_id.as_str(),
                    p.title.as_str(),
                    &p.author_ids.join(";"),
                    p.venue_id.as_str(),
                    &p.year.to_string(),
                    p.abstract_text.as_str(),
                ])
                .map_err(csv_err)?;
            }
            w.flush().map_err(wrap)
        }
    }
}

impl Corpus {
    /// Writes `papers.jsonl` and `catalog.json` into `dir`.
    pub fn save_dir(&self, dir: impl AsRef<Path>) -> Result<(), CorpusError> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        let papers = dir.join(PAPERS_FILE);
        let file = File::create(&papers).map_err(|e| io_err(&papers, e))?;
        write_corpus(self, file, CorpusFormat::Jsonl)?;
        let catalog = dir.join(CATALOG_FILE);
        fs::write(&catalog, self.catalog().to_json() + "\n").map_err(|e| io_err(&catalog, e))
    }

    pub fn load_dir(dir: impl AsRef<Path>) -> Result<Self, CorpusError> {
        let dir = dir.as_ref();
        let catalog_path = dir.join(CATALOG_FILE);
        let text = fs::read_to_string(&catalog_path).map_err(|e| io_err(&catalog_path, e))?;
        let catalog = VenueCatalog::from_json(&text)?;
        load_corpus(dir.join(PAPERS_FILE), CorpusFormat::Jsonl, catalog)
    }
}
