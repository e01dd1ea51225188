//! Essays, rubrics, gold labels and pyramid persistence.
//!
//! Two essay formats are supported: a delimited table with header
//! `id,role,draft_index,text` (extra columns become metadata) and JSON Lines
//! records with the same fields plus an optional `metadata` object. Text is
//! normalised on ingest (Unicode NFC, whitespace runs collapsed to a single
//! space, trimmed).

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

use crate::hashing::ContentHasher;
use crate::pyramid::Pyramid;

/// Current pyramid file format version.
pub const PYRAMID_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at record {record}: {message}")]
    Parse { record: usize, message: String },
    #[error("missing required column `{0}`")]
    MissingColumn(String),
    #[error("duplicate essay id `{0}`")]
    DuplicateId(String),
    #[error("essay id must not be empty (record {0})")]
    EmptyId(usize),
    #[error("essay `{0}` has empty text")]
    EmptyText(String),
    #[error("invalid rubric: {0}")]
    InvalidRubric(String),
    #[error("gold record for `{essay_id}` has {found} labels, rubric has {expected} ideas")]
    GoldArity {
        essay_id: String,
        expected: usize,
        found: usize,
    },
    #[error("gold record for `{essay_id}`: cell `{cell}` is not a boolean")]
    GoldCell { essay_id: String, cell: String },
    #[error("pyramid file version mismatch: expected {expected}, found {found}")]
    VersionMismatch { expected: u32, found: u32 },
    #[error("corrupted pyramid file: {0}")]
    CorruptPyramid(String),
}

fn io_err(path: &Path, source: std::io::Error) -> CorpusError {
    CorpusError::Io {
        path: path.display().to_string(),
        source,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Exemplar,
    Student,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Role::Exemplar => f.write_str("exemplar"),
            Role::Student => f.write_str("student"),
        }
    }
}

impl std::str::FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exemplar" => Ok(Role::Exemplar),
            "student" => Ok(Role::Student),
            other => Err(format!("unknown role `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Essay {
    pub id: String,
    pub role: Role,
    /// 0 for an original draft, 1 for the first revision and so on.
    pub draft_index: u32,
    pub text: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
}

impl Essay {
    pub fn new(id: impl Into<String>, role: Role, text: impl AsRef<str>) -> Self {
        Essay {
            id: id.into(),
            role,
            draft_index: 0,
            text: normalize_text(text.as_ref()),
            metadata: BTreeMap::new(),
        }
    }
}

/// NFC, whitespace runs collapsed to one space, trimmed.
pub fn normalize_text(text: &str) -> String {
    let nfc: String = text.nfc().collect();
    let mut out = String::with_capacity(nfc.len());
    for word in nfc.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

/// An ordered, validated collection of essays with unique ids.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    essays: Vec<Essay>,
    index: HashMap<String, usize>,
}

impl Corpus {
    pub fn new(essays: Vec<Essay>) -> Result<Self, CorpusError> {
        let mut index = HashMap::with_capacity(essays.len());
        for (i, e) in essays.iter().enumerate() {
            if e.id.trim().is_empty() {
                return Err(CorpusError::EmptyId(i + 1));
            }
            if e.text.trim().is_empty() {
                return Err(CorpusError::EmptyText(e.id.clone()));
            }
            if index.insert(e.id.clone(), i).is_some() {
                return Err(CorpusError::DuplicateId(e.id.clone()));
            }
        }
        Ok(Corpus { essays, index })
    }

    pub fn essays(&self) -> &[Essay] {
        &self.essays
    }

    pub fn len(&self) -> usize {
        self.essays.len()
    }

    pub fn is_empty(&self) -> bool {
        self.essays.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Essay> {
        self.index.get(id).map(|&i| &self.essays[i])
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    pub fn with_role(&self, role: Role) -> impl Iterator<Item = &Essay> {
        self.essays.iter().filter(move |e| e.role == role)
    }

    /// Sub-corpus keeping the essays accepted by `keep`, in order.
    pub fn filter(&self, keep: impl Fn(&Essay) -> bool) -> Corpus {
        let essays: Vec<Essay> = self.essays.iter().filter(|e| keep(e)).cloned().collect();
        Corpus::new(essays).expect("subset of a valid corpus is valid")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    /// Comma-separated table with a header row.
    DelimitedTable,
    /// JSON Lines, one essay object per line.
    StructuredRecords,
}

impl CorpusFormat {
    /// Guess from a file extension: `.jsonl`/`.json` are records, anything else a table.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl") | Some("json") | Some("ndjson") => CorpusFormat::StructuredRecords,
            _ => CorpusFormat::DelimitedTable,
        }
    }
}

pub fn ingest_corpus(path: &Path, format: CorpusFormat) -> Result<Corpus, CorpusError> {
    let data = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    match format {
        CorpusFormat::DelimitedTable => parse_corpus_csv(&data),
        CorpusFormat::StructuredRecords => parse_corpus_jsonl(&data),
    }
}

const REQUIRED_COLUMNS: [&str; 4] = ["id", "role", "draft_index", "text"];

pub fn parse_corpus_csv(data: &str) -> Result<Corpus, CorpusError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(data.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| CorpusError::Parse {
            record: 1,
            message: e.to_string(),
        })?
        .clone();
    let mut positions = [0usize; 4];
    for (slot, name) in positions.iter_mut().zip(REQUIRED_COLUMNS) {
        *slot = headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| CorpusError::MissingColumn(name.to_string()))?;
    }
    let extra: Vec<(usize, String)> = headers
        .iter()
        .enumerate()
        .filter(|(i, _)| !positions.contains(i))
        .map(|(i, h)| (i, h.trim().to_string()))
        .collect();

    let mut essays = Vec::new();
    for (n, row) in reader.records().enumerate() {
        // header is record 1
        let record_no = n + 2;
        let row = row.map_err(|e| CorpusError::Parse {
            record: e
                .position()
                .map(|p| p.line() as usize)
                .unwrap_or(record_no),
            message: e.to_string(),
        })?;
        let field = |i: usize| row.get(i).unwrap_or("");
        let role = field(positions[1])
            .parse::<Role>()
            .map_err(|message| CorpusError::Parse {
                record: record_no,
                message,
            })?;
        let draft_index =
            field(positions[2])
                .trim()
                .parse::<u32>()
                .map_err(|e| CorpusError::Parse {
                    record: record_no,
                    message: format!("draft_index: {e}"),
                })?;
        let metadata = extra
            .iter()
            .filter(|(i, _)| !field(*i).is_empty())
            .map(|(i, name)| (name.clone(), field(*i).to_string()))
            .collect();
        essays.push(Essay {
            id: field(positions[0]).trim().to_string(),
            role,
            draft_index,
            text: normalize_text(field(positions[3])),
            metadata,
        });
    }
    Corpus::new(essays)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EssayRecord {
    id: String,
    role: Role,
    draft_index: u32,
    text: String,
    #[serde(default)]
    metadata: BTreeMap<String, String>,
}

pub fn parse_corpus_jsonl(data: &str) -> Result<Corpus, CorpusError> {
    let mut essays = Vec::new();
    for (n, line) in data.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: EssayRecord = serde_json::from_str(line).map_err(|e| CorpusError::Parse {
            record: n + 1,
            message: e.to_string(),
        })?;
        essays.push(Essay {
            id: rec.id.trim().to_string(),
            role: rec.role,
            draft_index: rec.draft_index,
            text: normalize_text(&rec.text),
            metadata: rec.metadata,
        });
    }
    Corpus::new(essays)
}

/// Writes the delimited-table format. Metadata keys become extra columns.
pub fn write_corpus_csv<W: Write>(corpus: &Corpus, out: W) -> Result<(), CorpusError> {
    let keys: Vec<&String> = {
        let mut ks: Vec<&String> = corpus
            .essays()
            .iter()
            .flat_map(|e| e.metadata.keys())
            .collect();
        ks.sort();
        ks.dedup();
        ks
    };
    let mut w = csv::WriterBuilder::new()
        .quote_style(csv::QuoteStyle::NonNumeric)
        .from_writer(out);
    let to_err = |e: csv::Error| CorpusError::Parse {
        record: 0,
        message: e.to_string(),
    };
    let mut header: Vec<&str> = REQUIRED_COLUMNS.to_vec();
    header.extend(keys.iter().map(|k| k.as_str()));
    w.write_record(&header).map_err(to_err)?;
    for e in corpus.essays() {
        let mut row = vec![
            e.id.clone(),
            e.role.to_string(),
            e.draft_index.to_string(),
            e.text.clone(),
        ];
        row.extend(
            keys.iter()
                .map(|k| e.metadata.get(*k).cloned().unwrap_or_default()),
        );
        w.write_record(&row).map_err(to_err)?;
    }
    w.flush().map_err(|e| io_err(Path::new("<writer>"), e))
}

pub fn write_corpus_jsonl<W: Write>(corpus: &Corpus, mut out: W) -> Result<(), CorpusError> {
    for e in corpus.essays() {
        let line = serde_json::to_string(e).expect("essay serialises");
        writeln!(out, "{line}").map_err(|err| io_err(Path::new("<writer>"), err))?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MainIdea {
    pub id: u32,
    pub text: String,
    /// Historical per-idea accuracy shown next to each checklist row.
    pub confidence: f64,
}

/// Ordered main ideas with ids `1..=N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Rubric {
    main_ideas: Vec<MainIdea>,
}

impl<'de> Deserialize<'de> for Rubric {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            main_ideas: Vec<MainIdea>,
        }
        let raw = Raw::deserialize(d)?;
        Rubric::new(raw.main_ideas).map_err(serde::de::Error::custom)
    }
}

impl Rubric {
    pub fn new(main_ideas: Vec<MainIdea>) -> Result<Self, CorpusError> {
        if main_ideas.is_empty() {
            return Err(CorpusError::InvalidRubric("no main ideas".into()));
        }
        for (i, mi) in main_ideas.iter().enumerate() {
            if mi.id as usize != i + 1 {
                return Err(CorpusError::InvalidRubric(format!(
                    "ids must be contiguous from 1; position {} has id {}",
                    i + 1,
                    mi.id
                )));
            }
            if !(0.0..=1.0).contains(&mi.confidence) {
                return Err(CorpusError::InvalidRubric(format!(
                    "idea {} confidence {} outside [0, 1]",
                    mi.id, mi.confidence
                )));
            }
            if mi.text.trim().is_empty() {
                return Err(CorpusError::InvalidRubric(format!("idea {} has no text", mi.id)));
            }
        }
        for (i, a) in main_ideas.iter().enumerate() {
            if main_ideas[i + 1..].iter().any(|b| b.text == a.text) {
                return Err(CorpusError::InvalidRubric(format!(
                    "duplicate idea text `{}`",
                    a.text
                )));
            }
        }
        Ok(Rubric { main_ideas })
    }

    /// The six-idea energy rubric for the roller-coaster unit, with per-idea
    /// confidences taken from the first labelled validation set.
    pub fn roller_coaster() -> Self {
        let ideas = [
            ("The greater the height, the greater the potential energy (PE)", 0.7692),
            ("As the cart moves downhill, PE decreases and kinetic energy increases", 0.8205),
            ("The total energy of the system is always the sum of PE and KE", 0.6923),
            (
                "The law of conservation of energy states that energy cannot be created or destroyed, only transformed",
                0.8974,
            ),
            ("The initial drop should be higher than the hill", 0.7179),
            ("Higher mass of the cart corresponds to greater total energy of the system", 0.8462),
        ];
        Rubric::new(
            ideas
                .iter()
                .enumerate()
                .map(|(i, (text, confidence))| MainIdea {
                    id: i as u32 + 1,
                    text: text.to_string(),
                    confidence: *confidence,
                })
                .collect(),
        )
        .expect("built-in rubric is valid")
    }

    pub fn main_ideas(&self) -> &[MainIdea] {
        &self.main_ideas
    }

    pub fn len(&self) -> usize {
        self.main_ideas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.main_ideas.is_empty()
    }

    /// Hash over idea ids and texts; confidences are display data and excluded.
    pub fn hash(&self) -> String {
        let mut h = ContentHasher::new("rubric");
        for mi in &self.main_ideas {
            h.u64(mi.id as u64).str(&mi.text);
        }
        h.finish()
    }

    pub fn with_confidences(&self, confidences: &[f64]) -> Result<Rubric, CorpusError> {
        if confidences.len() != self.len() {
            return Err(CorpusError::InvalidRubric(format!(
                "{} confidences for {} ideas",
                confidences.len(),
                self.len()
            )));
        }
        let ideas = self
            .main_ideas
            .iter()
            .zip(confidences)
            .map(|(mi, &c)| MainIdea {
                confidence: c,
                ..mi.clone()
            })
            .collect();
        Rubric::new(ideas)
    }
}

pub fn load_rubric(path: &Path) -> Result<Rubric, CorpusError> {
    let data = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&data).map_err(|e| CorpusError::InvalidRubric(e.to_string()))
}

/// Human presence judgements, one boolean per rubric idea.
#[derive(Debug, Clone, PartialEq)]
pub struct GoldLabels {
    ideas: usize,
    records: Vec<(String, Vec<bool>)>,
    index: HashMap<String, usize>,
}

impl GoldLabels {
    pub fn new(ideas: usize, records: Vec<(String, Vec<bool>)>) -> Result<Self, CorpusError> {
        let mut index = HashMap::new();
        for (i, (id, labels)) in records.iter().enumerate() {
            if labels.len() != ideas {
                return Err(CorpusError::GoldArity {
                    essay_id: id.clone(),
                    expected: ideas,
                    found: labels.len(),
                });
            }
            if index.insert(id.clone(), i).is_some() {
                return Err(CorpusError::DuplicateId(id.clone()));
            }
        }
        Ok(GoldLabels {
            ideas,
            records,
            index,
        })
    }

    pub fn ideas(&self) -> usize {
        self.ideas
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, essay_id: &str) -> Option<&[bool]> {
        self.index
            .get(essay_id)
            .map(|&i| self.records[i].1.as_slice())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[bool])> {
        self.records.iter().map(|(id, l)| (id.as_str(), l.as_slice()))
    }

    /// Essay ids that have labels but are absent from `corpus`.
    pub fn unknown_ids(&self, corpus: &Corpus) -> Vec<String> {
        self.records
            .iter()
            .filter(|(id, _)| !corpus.contains(id))
            .map(|(id, _)| id.clone())
            .collect()
    }
}

fn parse_bool_cell(cell: &str) -> Option<bool> {
    match cell.trim().to_ascii_lowercase().as_str() {
        "1" | "true" => Some(true),
        "0" | "false" => Some(false),
        _ => None,
    }
}

/// Parses `essay_id,mi1,...,miN` with 0/1 cells.
pub fn parse_gold_labels(data: &str, rubric: &Rubric) -> Result<GoldLabels, CorpusError> {
    let n = rubric.len();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(data.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| CorpusError::Parse {
            record: 1,
            message: e.to_string(),
        })?
        .clone();
    if headers.get(0).map(str::trim) != Some("essay_id") {
        return Err(CorpusError::MissingColumn("essay_id".into()));
    }
    if headers.len() != n + 1 {
        return Err(CorpusError::GoldArity {
            essay_id: "<header>".into(),
            expected: n,
            found: headers.len().saturating_sub(1),
        });
    }
    let mut records = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row.map_err(|e| CorpusError::Parse {
            record: i + 2,
            message: e.to_string(),
        })?;
        let id = row.get(0).unwrap_or("").trim().to_string();
        if id.is_empty() {
            return Err(CorpusError::EmptyId(i + 2));
        }
        if row.len() != n + 1 {
            return Err(CorpusError::GoldArity {
                essay_id: id,
                expected: n,
                found: row.len() - 1,
            });
        }
        let labels = row
            .iter()
            .skip(1)
            .map(|cell| {
                parse_bool_cell(cell).ok_or_else(|| CorpusError::GoldCell {
                    essay_id: id.clone(),
                    cell: cell.to_string(),
                })
            })
            .collect::<Result<Vec<bool>, _>>()?;
        records.push((id, labels));
    }
    GoldLabels::new(n, records)
}

pub fn load_gold_labels(path: &Path, rubric: &Rubric) -> Result<GoldLabels, CorpusError> {
    let data = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    parse_gold_labels(&data, rubric)
}

pub fn write_gold_labels<W: Write>(gold: &GoldLabels, mut out: W) -> std::io::Result<()> {
    let header: Vec<String> = std::iter::once("essay_id".to_string())
        .chain((1..=gold.ideas).map(|i| format!("mi{i}")))
        .collect();
    writeln!(out, "{}", header.join(","))?;
    for (id, labels) in gold.iter() {
        let cells: Vec<&str> = labels.iter().map(|&b| if b { "1" } else { "0" }).collect();
        writeln!(out, "{},{}", id, cells.join(","))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct PyramidDocRef<'a> {
    version: u32,
    #[serde(flatten)]
    pyramid: &'a Pyramid,
}

pub fn pyramid_to_json(pyramid: &Pyramid) -> String {
    serde_json::to_string_pretty(&PyramidDocRef {
        version: PYRAMID_FORMAT_VERSION,
        pyramid,
    })
    .expect("pyramid serialises")
}

/// Parses and validates a pyramid document.
pub fn pyramid_from_json(data: &str) -> Result<Pyramid, CorpusError> {
    let mut value: serde_json::Value =
        serde_json::from_str(data).map_err(|e| CorpusError::CorruptPyramid(e.to_string()))?;
    let obj = value
        .as_object_mut()
        .ok_or_else(|| CorpusError::CorruptPyramid("top level is not an object".into()))?;
    let found = obj
        .remove("version")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| CorpusError::CorruptPyramid("missing version".into()))?;
    if found != PYRAMID_FORMAT_VERSION as u64 {
        return Err(CorpusError::VersionMismatch {
            expected: PYRAMID_FORMAT_VERSION,
            found: u32::try_from(found).unwrap_or(u32::MAX),
        });
    }
    let pyramid: Pyramid =
        serde_json::from_value(value).map_err(|e| CorpusError::CorruptPyramid(e.to_string()))?;
    pyramid
        .validate()
        .map_err(|e| CorpusError::CorruptPyramid(e.to_string()))?;
    Ok(pyramid)
}

pub fn save_pyramid(pyramid: &Pyramid, path: &Path) -> Result<(), CorpusError> {
    fs::write(path, pyramid_to_json(pyramid)).map_err(|e| io_err(path, e))
}

pub fn load_pyramid(path: &Path) -> Result<Pyramid, CorpusError> {
    let data = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    pyramid_from_json(&data)
}
