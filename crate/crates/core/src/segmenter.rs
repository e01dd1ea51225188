//! Rule-based sentence and clause segmentation.
//!
//! Sentences end at `.`, `!` or `?` (plus any run of further terminators and
//! closing quotes or brackets), with guards for decimal numbers and a short
//! list of abbreviations. Clauses are cut at semicolons, at coordinating
//! conjunctions that follow a comma, before subordinator cue words, and at the
//! comma closing a fronted subordinate clause. Fragments shorter than
//! `min_clause_tokens` are merged back into a neighbour.
//!
//! Every clause is a contiguous byte range of its sentence and the clauses of
//! a sentence tile it exactly, so concatenating clause texts reproduces the
//! sentence text.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub essay_id: String,
    pub index: usize,
    pub text: String,
    /// Byte range `[start, end)` into the essay text.
    pub span: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Clause {
    pub essay_id: String,
    pub sentence_index: usize,
    pub clause_index: usize,
    /// Raw substring of the sentence, including trailing separators.
    pub text: String,
    /// Byte range `[start, end)` into the essay text.
    pub span: (usize, usize),
    pub token_count: usize,
}

impl Clause {
    pub fn trimmed(&self) -> &str {
        self.text.trim()
    }
}

/// Lowercased alphanumeric runs.
pub fn tokenize(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
}

pub fn token_count(text: &str) -> usize {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .count()
}

/// Pluggable segmentation so that a parser-backed implementation can replace
/// the rule-based one.
pub trait Segmenter: Send + Sync {
    fn sentences(&self, essay_id: &str, text: &str) -> Vec<Sentence>;
    fn clauses(&self, sentence: &Sentence) -> Vec<Clause>;

    fn segment(&self, essay_id: &str, text: &str) -> Vec<Clause> {
        self.sentences(essay_id, text)
            .iter()
            .flat_map(|s| self.clauses(s))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmenterConfig {
    pub min_clause_tokens: usize,
}

impl Default for SegmenterConfig {
    fn default() -> Self {
        SegmenterConfig {
            min_clause_tokens: 3,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RuleSegmenter {
    pub config: SegmenterConfig,
}

impl RuleSegmenter {
    pub fn new(config: SegmenterConfig) -> Self {
        RuleSegmenter { config }
    }
}

impl Segmenter for RuleSegmenter {
    fn sentences(&self, essay_id: &str, text: &str) -> Vec<Sentence> {
        split_sentences(essay_id, text)
    }

    fn clauses(&self, sentence: &Sentence) -> Vec<Clause> {
        extract_clauses(sentence, self.config.min_clause_tokens)
    }
}

const ABBREVIATIONS: &[&str] = &[
    "e.g", "i.e", "etc", "vs", "mr", "mrs", "ms", "dr", "st", "prof", "approx", "fig", "cf",
    "al", "jr", "sr", "no",
];

fn is_closer(c: char) -> bool {
    matches!(c, '"' | '\'' | ')' | ']' | '}' | '\u{201d}' | '\u{2019}')
}

fn word_before(text: &str, end: usize) -> &str {
    let start = text[..end]
        .rfind(|c: char| c.is_whitespace() || c == '(' || c == '"')
        .map(|i| i + 1)
        .unwrap_or(0);
    &text[start..end]
}

/// Whether the `.` at byte `pos` ends a sentence.
fn period_ends_sentence(text: &str, pos: usize) -> bool {
    let next = text[pos + 1..].chars().next();
    if let Some(n) = next {
        if n.is_alphanumeric() {
            // decimal numbers, inner dots of abbreviations, file names
            return false;
        }
    }
    let word = word_before(text, pos).trim_matches(|c: char| !c.is_alphanumeric() && c != '.');
    let lower = word.to_lowercase();
    if ABBREVIATIONS.contains(&lower.as_str()) {
        // an abbreviation followed by a capitalised word may still end a sentence
        let following = text[pos + 1..].trim_start();
        return lower == "etc" && following.starts_with(|c: char| c.is_uppercase());
    }
    true
}

/// Splits normalised essay text into sentences with byte spans.
pub fn split_sentences(essay_id: &str, text: &str) -> Vec<Sentence> {
    let mut spans: Vec<(usize, usize)> = Vec::new();
    let mut start: Option<usize> = None;
    let mut iter = text.char_indices().peekable();
    while let Some((i, c)) = iter.next() {
        if start.is_none() {
            if c.is_whitespace() {
                continue;
            }
            start = Some(i);
        }
        let boundary = match c {
            '!' | '?' => true,
            '.' => period_ends_sentence(text, i),
            _ => false,
        };
        if !boundary {
            continue;
        }
        let mut end = i + c.len_utf8();
        while let Some(&(j, n)) = iter.peek() {
            if matches!(n, '.' | '!' | '?') || is_closer(n) {
                end = j + n.len_utf8();
                iter.next();
            } else {
                break;
            }
        }
        spans.push((start.take().unwrap(), end));
    }
    if let Some(s) = start {
        let end = text.trim_end().len();
        if end > s {
            spans.push((s, end));
        }
    }

    // punctuation-only pieces attach to a neighbour
    let mut merged: Vec<(usize, usize)> = Vec::with_capacity(spans.len());
    let mut pending_start: Option<usize> = None;
    for (s, e) in spans {
        if token_count(&text[s..e]) == 0 {
            match merged.last_mut() {
                Some(last) => last.1 = e,
                None => {
                    pending_start.get_or_insert(s);
                }
            }
            continue;
        }
        merged.push((pending_start.take().unwrap_or(s), e));
    }
    if let Some(s) = pending_start {
        // nothing but punctuation
        merged.push((s, text.trim_end().len()));
    }

    merged
        .into_iter()
        .enumerate()
        .map(|(index, (s, e))| Sentence {
            essay_id: essay_id.to_string(),
            index,
            text: text[s..e].to_string(),
            span: (s, e),
        })
        .collect()
}

const COORDINATORS: &[&str] = &["and", "but", "or", "so", "yet", "nor"];
const SUBORDINATORS: &[&str] = &["because", "when", "if", "since"];

struct Word {
    start: usize,
    end: usize,
    lower: String,
}

fn words(text: &str) -> Vec<Word> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices() {
        if c.is_alphanumeric() {
            start.get_or_insert(i);
        } else if let Some(s) = start.take() {
            out.push(Word {
                start: s,
                end: i,
                lower: text[s..i].to_lowercase(),
            });
        }
    }
    if let Some(s) = start {
        out.push(Word {
            start: s,
            end: text.len(),
            lower: text[s..].to_lowercase(),
        });
    }
    out
}

fn is_subordinator(ws: &[Word], k: usize) -> bool {
    let w = ws[k].lower.as_str();
    SUBORDINATORS.contains(&w) || (w == "so" && ws.get(k + 1).is_some_and(|n| n.lower == "that"))
}

/// Splits one sentence into clauses. A sentence without tokens yields no clauses.
pub fn extract_clauses(sentence: &Sentence, min_clause_tokens: usize) -> Vec<Clause> {
    let text = sentence.text.as_str();
    let ws = words(text);
    if ws.is_empty() {
        return Vec::new();
    }

    // clause start positions, as word indices
    let mut cuts: Vec<usize> = vec![0];
    let mut in_fronted = is_subordinator(&ws, 0);
    let between = |a: usize, b: usize| &text[ws[a].end..ws[b].start];
    for k in 1..ws.len() {
        let gap = between(k - 1, k);
        let w = ws[k].lower.as_str();
        let last_cut = *cuts.last().unwrap();
        let mut cut = false;

        if gap.contains(';') {
            cut = true;
        } else if in_fronted && gap.contains(',') {
            cut = true;
        } else if COORDINATORS.contains(&w)
            && (gap.contains(',') || (k + 1 < ws.len() && is_subordinator(&ws, k + 1)))
        {
            cut = true;
        } else if is_subordinator(&ws, k) {
            let prev = ws[k - 1].lower.as_str();
            // "and if": the cut already sits before the conjunction
            let after_coordinator = COORDINATORS.contains(&prev) && last_cut == k - 1;
            cut = !after_coordinator;
        }

        if cut && last_cut != k {
            cuts.push(k);
            in_fronted = is_subordinator(&ws, k)
                || (COORDINATORS.contains(&w)
                    && ws.get(k + 1).is_some()
                    && is_subordinator(&ws, k + 1));
        }
    }

    // merge short fragments
    let tokens_in = |cuts: &[usize], i: usize| -> usize {
        let end = cuts.get(i + 1).copied().unwrap_or(ws.len());
        end - cuts[i]
    };
    loop {
        if cuts.len() <= 1 {
            break;
        }
        let short = (0..cuts.len()).find(|&i| tokens_in(&cuts, i) < min_clause_tokens);
        match short {
            // first fragment joins the following clause
            Some(0) => {
                cuts.remove(1);
            }
            Some(i) => {
                cuts.remove(i);
            }
            None => break,
        }
    }

    let (base, _) = sentence.span;
    let n = cuts.len();
    (0..n)
        .map(|i| {
            let s = if i == 0 { 0 } else { ws[cuts[i]].start };
            let e = if i + 1 == n {
                text.len()
            } else {
                ws[cuts[i + 1]].start
            };
            let piece = &text[s..e];
            Clause {
                essay_id: sentence.essay_id.clone(),
                sentence_index: sentence.index,
                clause_index: i,
                text: piece.to_string(),
                span: (base + s, base + e),
                token_count: token_count(piece),
            }
        })
        .collect()
}

/// Plain-text listing of sentences and clauses with their byte spans.
pub fn segmentation_report(essay_id: &str, text: &str, segmenter: &dyn Segmenter) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "essay {essay_id}");
    for s in segmenter.sentences(essay_id, text) {
        let _ = writeln!(out, "  S{} [{}, {}) {}", s.index + 1, s.span.0, s.span.1, s.text);
        for c in segmenter.clauses(&s) {
            let _ = writeln!(
                out,
                "    C{}.{} [{}, {}) tokens={} | {}",
                s.index + 1,
                c.clause_index + 1,
                c.span.0,
                c.span.1,
                c.token_count,
                c.trimmed()
            );
        }
    }
    out
}
