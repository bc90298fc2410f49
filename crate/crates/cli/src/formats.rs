//! Readers and writers for the on-disk formats: corpus files (JSON Lines and
//! TREC-text), run files, qrels, topics, stopword lists and the CSV tables.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;

use qpp_core::corpus::{tokenize, Document, TokenizationConfig};
use qpp_core::evaluation::Qrels;
use qpp_core::run::{RankedList, Run, RunEntry};
use qpp_core::Query;

/// A topic file: raw text plus the tokenized query, with the tokenization
/// config that produced it.
#[derive(Debug, Clone)]
pub struct TopicSet {
    pub raw: BTreeMap<String, String>,
    pub queries: BTreeMap<String, Query>,
    pub config: TokenizationConfig,
}

impl TopicSet {
    pub fn len(&self) -> usize {
        self.raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }
}

#[derive(Deserialize)]
struct JsonDoc {
    id: String,
    contents: String,
}

/// Corpus file flavor; `Auto` sniffs: a leading '<' means TREC-text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CorpusFormat {
    #[default]
    Auto,
    JsonLines,
    TrecText,
}

/// Read and tokenize a corpus file.
pub fn read_corpus(
    path: &Path,
    format: CorpusFormat,
    config: &TokenizationConfig,
) -> Result<Vec<Document>> {
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .with_context(|| format!("reading corpus file {}", path.display()))?;
    let format = match format {
        CorpusFormat::Auto => {
            if text.trim_start().starts_with('<') {
                CorpusFormat::TrecText
            } else {
                CorpusFormat::JsonLines
            }
        }
        f => f,
    };
    match format {
        CorpusFormat::JsonLines => parse_jsonl_corpus(&text, config),
        CorpusFormat::TrecText => parse_trec_text_corpus(&text, config),
        CorpusFormat::Auto => unreachable!(),
    }
}

fn parse_jsonl_corpus(text: &str, config: &TokenizationConfig) -> Result<Vec<Document>> {
    let mut docs = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let doc: JsonDoc = serde_json::from_str(line)
            .with_context(|| format!("corpus line {}: invalid JSON object", lineno + 1))?;
        if doc.id.is_empty() {
            bail!("corpus line {}: empty doc id", lineno + 1);
        }
        docs.push(Document::new(doc.id, tokenize(&doc.contents, config)));
    }
    Ok(docs)
}

/// Minimal TREC-text reader: <DOC> blocks with <DOCNO> and <TEXT> fields.
fn parse_trec_text_corpus(text: &str, config: &TokenizationConfig) -> Result<Vec<Document>> {
    fn between<'a>(hay: &'a str, open: &str, close: &str, what: &str) -> Result<(&'a str, &'a str)> {
        let start = hay.find(open).ok_or_else(|| anyhow!("missing {what} tag"))?;
        let rest = &hay[start + open.len()..];
        let end = rest.find(close).ok_or_else(|| anyhow!("unterminated {what} tag"))?;
        Ok((&rest[..end], &rest[end + close.len()..]))
    }

    let mut docs = Vec::new();
    let mut rest = text;
    while let Some(start) = rest.find("<DOC>") {
        rest = &rest[start + 5..];
        let end = rest
            .find("</DOC>")
            .ok_or_else(|| anyhow!("document {}: unterminated <DOC> block", docs.len() + 1))?;
        let block = &rest[..end];
        rest = &rest[end + 6..];
        let (docno, _) = between(block, "<DOCNO>", "</DOCNO>", "<DOCNO>")
            .with_context(|| format!("document {}", docs.len() + 1))?;
        let (body, _) = between(block, "<TEXT>", "</TEXT>", "<TEXT>")
            .with_context(|| format!("document {}", docs.len() + 1))?;
        let id = docno.trim();
        if id.is_empty() {
            bail!("document {}: empty DOCNO", docs.len() + 1);
        }
        docs.push(Document::new(id, tokenize(body, config)));
    }
    Ok(docs)
}

/// Parse a TREC run file: `qid Q0 docid rank score tag`. Entries are
/// re-sorted by descending score (ties by ascending doc id) and ranks
/// reassigned 1..n; the stored rank field is ignored.
pub fn parse_run(path: &Path) -> Result<Run> {
    let file = File::open(path).with_context(|| format!("opening run file {}", path.display()))?;
    let mut per_query: BTreeMap<String, Vec<RunEntry>> = BTreeMap::new();
    let mut seen: std::collections::BTreeSet<(String, String)> = Default::default();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 6 {
            bail!(
                "{}:{}: run line has {} fields, expected 6 (qid Q0 docid rank score tag)",
                path.display(),
                lineno + 1,
                fields.len()
            );
        }
        let qid = fields[0];
        let doc_id = fields[2];
        let score: f64 = fields[4].parse().map_err(|_| {
            anyhow!("{}:{}: unparseable score {:?}", path.display(), lineno + 1, fields[4])
        })?;
        if !seen.insert((qid.to_string(), doc_id.to_string())) {
            bail!(
                "{}:{}: duplicate (query, doc) pair ({}, {})",
                path.display(),
                lineno + 1,
                qid,
                doc_id
            );
        }
        per_query
            .entry(qid.to_string())
            .or_default()
            .push(RunEntry { doc_id: doc_id.to_string(), score });
    }
    let mut run = Run::default();
    for (qid, mut entries) in per_query {
        entries.sort_by(|a, b| {
            b.score
                .partial_cmp(&a.score)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then_with(|| a.doc_id.cmp(&b.doc_id))
        });
        run.lists.insert(qid, RankedList::new(entries));
    }
    Ok(run)
}

/// Parse qrels: `qid 0 docid grade`. Duplicates keep the last grade (with a
/// warning); negative grades clamp to 0 (with a warning).
pub fn parse_qrels(path: &Path) -> Result<Qrels> {
    let file = File::open(path).with_context(|| format!("opening qrels file {}", path.display()))?;
    let mut qrels = Qrels::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 4 {
            bail!(
                "{}:{}: qrels line has {} fields, expected 4 (qid 0 docid grade)",
                path.display(),
                lineno + 1,
                fields.len()
            );
        }
        let grade: i64 = fields[3].parse().map_err(|_| {
            anyhow!("{}:{}: unparseable grade {:?}", path.display(), lineno + 1, fields[3])
        })?;
        let grade = if grade < 0 {
            log::warn!(
                "{}:{}: negative grade {} clamped to 0",
                path.display(),
                lineno + 1,
                grade
            );
            0
        } else {
            grade as u32
        };
        if qrels.set(fields[0], fields[2], grade).is_some() {
            log::warn!(
                "{}:{}: duplicate qrels pair ({}, {}), keeping the last grade",
                path.display(),
                lineno + 1,
                fields[0],
                fields[2]
            );
        }
    }
    Ok(qrels)
}

/// Parse topics as TSV `qid<TAB>text`; duplicate ids are a hard error.
pub fn parse_topics(path: &Path, config: &TokenizationConfig) -> Result<TopicSet> {
    let file = File::open(path).with_context(|| format!("opening topics file {}", path.display()))?;
    let mut raw = BTreeMap::new();
    let mut queries = BTreeMap::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (qid, text) = line.split_once('\t').ok_or_else(|| {
            anyhow!("{}:{}: topic line has no tab separator", path.display(), lineno + 1)
        })?;
        let qid = qid.trim();
        if qid.is_empty() {
            bail!("{}:{}: empty topic id", path.display(), lineno + 1);
        }
        if raw.insert(qid.to_string(), text.to_string()).is_some() {
            bail!("{}:{}: duplicate topic id {:?}", path.display(), lineno + 1, qid);
        }
        queries.insert(qid.to_string(), Query::new(qid, tokenize(text, config)));
    }
    Ok(TopicSet { raw, queries, config: config.clone() })
}

/// One word per line, UTF-8.
pub fn parse_stopwords(path: &Path) -> Result<std::collections::BTreeSet<String>> {
    let file = File::open(path)
        .with_context(|| format!("opening stopword file {}", path.display()))?;
    let mut words = std::collections::BTreeSet::new();
    for line in BufReader::new(file).lines() {
        let line = line?;
        let w = line.trim();
        if !w.is_empty() {
            words.insert(w.to_string());
        }
    }
    Ok(words)
}

/// Write a run in TREC format (the inverse of [`parse_run`]).
pub fn write_run(run: &Run, tag: &str, out: &mut dyn Write) -> Result<()> {
    for (qid, list) in &run.lists {
        for (rank, entry) in list.entries.iter().enumerate() {
            writeln!(out, "{qid} Q0 {} {} {} {tag}", entry.doc_id, rank + 1, entry.score)?;
        }
    }
    Ok(())
}

/// Quote a CSV field only when it needs it.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Format a float for CSV output (shortest round-trip representation).
pub fn csv_num(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v}")
    }
}
