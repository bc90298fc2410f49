//! Corpus ingestion: tokenization and collection-wide term statistics.

use alloc::borrow::ToOwned;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::porter;

/// The bundled English stopword list (one word per line).
pub const BUNDLED_STOPWORDS: &str = include_str!("stopwords.txt");

/// Which stopword list to apply during tokenization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StopwordFilter {
    /// Keep every token.
    None,
    /// Use [`BUNDLED_STOPWORDS`].
    Bundled,
    /// Use a caller-supplied set.
    Custom(BTreeSet<String>),
}

/// Controls [`tokenize`]. The same config must be used for documents and
/// queries that meet in a predictor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizationConfig {
    pub stopwords: StopwordFilter,
    pub stemming: bool,
}

impl Default for TokenizationConfig {
    fn default() -> Self {
        TokenizationConfig {
            stopwords: StopwordFilter::Bundled,
            stemming: false,
        }
    }
}

impl TokenizationConfig {
    fn is_stopword(&self, token: &str) -> bool {
        match &self.stopwords {
            StopwordFilter::None => false,
            StopwordFilter::Bundled => BUNDLED_STOPWORDS.lines().any(|w| w == token),
            StopwordFilter::Custom(set) => set.contains(token),
        }
    }
}

/// Lowercase, split on non-alphanumeric runes, drop stopwords, then stem.
///
/// Deterministic for a fixed config; empty input yields an empty list.
pub fn tokenize(text: &str, config: &TokenizationConfig) -> Vec<String> {
    let lowered = text.to_lowercase();
    lowered
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .filter(|t| !config.is_stopword(t))
        .map(|t| {
            if config.stemming {
                porter::stem(t)
            } else {
                t.to_owned()
            }
        })
        .collect()
}

/// A tokenized document ready for indexing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub tokens: Vec<String>,
}

impl Document {
    pub fn new(id: impl Into<String>, tokens: Vec<String>) -> Self {
        Document { id: id.into(), tokens }
    }
}

/// Term identifier; ids are assigned lexicographically once a corpus is built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TermId(pub u32);

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct TermData {
    pub df: u64,
    pub cf: u64,
    /// in-document frequency -> number of documents with that frequency
    pub tf_hist: BTreeMap<u32, u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct DocEntry {
    pub len: u64,
    /// term id -> frequency; `None` when vectors were not retained for this doc
    pub vector: Option<BTreeMap<TermId, u32>>,
}

/// Errors from corpus construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CorpusError {
    DuplicateDocId(String),
    /// A reconstructed stats table violates an invariant.
    CorruptStats(String),
}

impl fmt::Display for CorpusError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CorpusError::DuplicateDocId(id) => write!(f, "duplicate doc_id: {id}"),
            CorpusError::CorruptStats(detail) => write!(f, "corrupt corpus stats: {detail}"),
        }
    }
}

impl core::error::Error for CorpusError {}

/// Immutable collection statistics: N, |C|, df/cf per term, document lengths
/// and (optionally) per-document term vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusStats {
    num_docs: u64,
    total_tokens: u64,
    term_ids: BTreeMap<String, TermId>,
    term_names: Vec<String>,
    term_data: Vec<TermData>,
    docs: BTreeMap<String, DocEntry>,
}

impl CorpusStats {
    pub fn num_docs(&self) -> u64 {
        self.num_docs
    }

    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    pub fn num_terms(&self) -> usize {
        self.term_names.len()
    }

    /// `(df, cf)` for a term; `None` when out of vocabulary.
    pub fn term_stats(&self, term: &str) -> Option<(u64, u64)> {
        self.term_ids.get(term).map(|id| {
            let d = &self.term_data[id.0 as usize];
            (d.df, d.cf)
        })
    }

    pub fn term_id(&self, term: &str) -> Option<TermId> {
        self.term_ids.get(term).copied()
    }

    pub fn term_name(&self, id: TermId) -> &str {
        &self.term_names[id.0 as usize]
    }

    pub fn term_stats_by_id(&self, id: TermId) -> (u64, u64) {
        let d = &self.term_data[id.0 as usize];
        (d.df, d.cf)
    }

    /// The in-document frequencies of `term` across every document that
    /// contains it, as `(tf, doc count)` pairs in ascending `tf` order.
    pub fn term_tf_histogram(&self, term: &str) -> Option<impl Iterator<Item = (u32, u32)> + '_> {
        self.term_ids
            .get(term)
            .map(|id| self.term_data[id.0 as usize].tf_hist.iter().map(|(&tf, &n)| (tf, n)))
    }

    pub fn doc_len(&self, doc_id: &str) -> Option<u64> {
        self.docs.get(doc_id).map(|d| d.len)
    }

    /// Term-frequency vector of a document, when retained at build time.
    pub fn doc_vector(&self, doc_id: &str) -> Option<&BTreeMap<TermId, u32>> {
        self.docs.get(doc_id).and_then(|d| d.vector.as_ref())
    }

    pub fn doc_ids(&self) -> impl Iterator<Item = &str> {
        self.docs.keys().map(|s| s.as_str())
    }

    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.term_names.iter().map(|s| s.as_str())
    }

    /// Decompose into raw tables for serialization.
    pub fn into_parts(self) -> CorpusStatsParts {
        CorpusStatsParts {
            num_docs: self.num_docs,
            total_tokens: self.total_tokens,
            terms: self
                .term_names
                .into_iter()
                .zip(self.term_data)
                .map(|(name, d)| TermParts {
                    name,
                    df: d.df,
                    cf: d.cf,
                    tf_hist: d.tf_hist.into_iter().collect(),
                })
                .collect(),
            docs: self
                .docs
                .into_iter()
                .map(|(id, e)| DocParts {
                    id,
                    len: e.len,
                    vector: e.vector.map(|v| v.into_iter().map(|(t, c)| (t.0, c)).collect()),
                })
                .collect(),
        }
    }

    /// Rebuild from raw tables, validating every structural invariant.
    pub fn from_parts(parts: CorpusStatsParts) -> Result<Self, CorpusError> {
        let corrupt = |d: &str| CorpusError::CorruptStats(String::from(d));
        let num_terms = parts.terms.len();
        let mut term_ids = BTreeMap::new();
        let mut term_names = Vec::with_capacity(num_terms);
        let mut term_data = Vec::with_capacity(num_terms);
        let mut cf_sum = 0u64;
        for (i, t) in parts.terms.into_iter().enumerate() {
            if let Some(prev) = term_names.last() {
                if *prev >= t.name {
                    return Err(corrupt("term names not strictly sorted"));
                }
            }
            let hist_df: u64 = t.tf_hist.iter().map(|&(_, n)| n as u64).sum();
            let hist_cf: u64 = t.tf_hist.iter().map(|&(tf, n)| tf as u64 * n as u64).sum();
            if hist_df != t.df || hist_cf != t.cf {
                return Err(corrupt("tf histogram disagrees with df/cf"));
            }
            if t.df == 0 || t.df > parts.num_docs || t.cf < t.df {
                return Err(corrupt("df/cf out of range"));
            }
            cf_sum += t.cf;
            term_ids.insert(t.name.clone(), TermId(i as u32));
            term_names.push(t.name);
            term_data.push(TermData {
                df: t.df,
                cf: t.cf,
                tf_hist: t.tf_hist.into_iter().collect(),
            });
        }
        if cf_sum != parts.total_tokens {
            return Err(corrupt("sum of cf differs from total token count"));
        }
        let mut docs = BTreeMap::new();
        let mut len_sum = 0u64;
        for d in parts.docs {
            len_sum += d.len;
            let vector = match d.vector {
                Some(v) => {
                    let mut map = BTreeMap::new();
                    for (tid, tf) in v {
                        if tid as usize >= num_terms {
                            return Err(corrupt("doc vector references unknown term id"));
                        }
                        if tf == 0 || map.insert(TermId(tid), tf).is_some() {
                            return Err(corrupt("doc vector has zero or duplicate entries"));
                        }
                    }
                    Some(map)
                }
                None => None,
            };
            if docs.insert(d.id.clone(), DocEntry { len: d.len, vector }).is_some() {
                return Err(CorpusError::DuplicateDocId(d.id));
            }
        }
        if docs.len() as u64 != parts.num_docs {
            return Err(corrupt("document count mismatch"));
        }
        if len_sum != parts.total_tokens {
            return Err(corrupt("sum of doc lengths differs from total token count"));
        }
        Ok(CorpusStats {
            num_docs: parts.num_docs,
            total_tokens: parts.total_tokens,
            term_ids,
            term_names,
            term_data,
            docs,
        })
    }
}

/// Raw serializable form of [`CorpusStats`]; terms sorted by name, doc
/// vectors keyed by term index.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusStatsParts {
    pub num_docs: u64,
    pub total_tokens: u64,
    pub terms: Vec<TermParts>,
    pub docs: Vec<DocParts>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TermParts {
    pub name: String,
    pub df: u64,
    pub cf: u64,
    pub tf_hist: Vec<(u32, u32)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DocParts {
    pub id: String,
    pub len: u64,
    pub vector: Option<Vec<(u32, u32)>>,
}

/// Single-pass builder for [`CorpusStats`].
///
/// Term ids are provisional during the pass and canonicalized (lexicographic)
/// in [`finish`](CorpusStatsBuilder::finish), so the result is identical for
/// any arrival order of the same documents.
#[derive(Debug, Default)]
pub struct CorpusStatsBuilder {
    vector_allowlist: Option<BTreeSet<String>>,
    num_docs: u64,
    total_tokens: u64,
    term_ids: BTreeMap<String, TermId>,
    term_data: Vec<TermData>,
    docs: BTreeMap<String, DocEntry>,
}

impl CorpusStatsBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Retain doc vectors only for the listed ids (all docs by default).
    pub fn with_vector_allowlist(mut self, ids: BTreeSet<String>) -> Self {
        self.vector_allowlist = Some(ids);
        self
    }

    pub fn add_document(&mut self, doc: Document) -> Result<(), CorpusError> {
        if self.docs.contains_key(&doc.id) {
            return Err(CorpusError::DuplicateDocId(doc.id));
        }
        let mut counts: BTreeMap<TermId, u32> = BTreeMap::new();
        for token in &doc.tokens {
            let next_id = TermId(self.term_data.len() as u32);
            let id = *self.term_ids.entry(token.clone()).or_insert_with(|| {
                self.term_data.push(TermData {
                    df: 0,
                    cf: 0,
                    tf_hist: BTreeMap::new(),
                });
                next_id
            });
            *counts.entry(id).or_insert(0) += 1;
        }
        let len = doc.tokens.len() as u64;
        self.num_docs += 1;
        self.total_tokens += len;
        for (&id, &tf) in &counts {
            let data = &mut self.term_data[id.0 as usize];
            data.df += 1;
            data.cf += tf as u64;
            *data.tf_hist.entry(tf).or_insert(0) += 1;
        }
        let keep_vector = self
            .vector_allowlist
            .as_ref()
            .map_or(true, |allow| allow.contains(&doc.id));
        self.docs.insert(
            doc.id,
            DocEntry {
                len,
                vector: keep_vector.then_some(counts),
            },
        );
        Ok(())
    }

    pub fn finish(self) -> CorpusStats {
        // remap provisional (arrival-order) term ids to lexicographic ones
        let term_names: Vec<String> = self.term_ids.keys().cloned().collect();
        let mut remap = alloc::vec![TermId(0); self.term_data.len()];
        let mut term_ids = BTreeMap::new();
        for (new_idx, name) in term_names.iter().enumerate() {
            let old = self.term_ids[name];
            remap[old.0 as usize] = TermId(new_idx as u32);
            term_ids.insert(name.clone(), TermId(new_idx as u32));
        }
        let mut term_data = alloc::vec![
            TermData { df: 0, cf: 0, tf_hist: BTreeMap::new() };
            self.term_data.len()
        ];
        for (old_idx, data) in self.term_data.into_iter().enumerate() {
            term_data[remap[old_idx].0 as usize] = data;
        }
        let docs = self
            .docs
            .into_iter()
            .map(|(id, entry)| {
                let vector = entry.vector.map(|v| {
                    v.into_iter().map(|(old, tf)| (remap[old.0 as usize], tf)).collect()
                });
                (id, DocEntry { len: entry.len, vector })
            })
            .collect();
        CorpusStats {
            num_docs: self.num_docs,
            total_tokens: self.total_tokens,
            term_ids,
            term_names,
            term_data,
            docs,
        }
    }
}

/// Build stats from an iterator of documents.
pub fn build_stats<I>(documents: I) -> Result<CorpusStats, CorpusError>
where
    I: IntoIterator<Item = Document>,
{
    let mut builder = CorpusStatsBuilder::new();
    for doc in documents {
        builder.add_document(doc)?;
    }
    Ok(builder.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn toks(words: &[&str]) -> Vec<String> {
        words.iter().map(|w| w.to_string()).collect()
    }

    fn two_doc_corpus() -> CorpusStats {
        build_stats(vec![
            Document::new("d1", toks(&["a", "b"])),
            Document::new("d2", toks(&["a"])),
        ])
        .unwrap()
    }

    #[test]
    fn tokenize_lowercases_splits_and_drops_stopwords() {
        let config = TokenizationConfig::default();
        assert_eq!(tokenize("The Apple-tree", &config), toks(&["apple", "tree"]));
        assert_eq!(tokenize("", &config), Vec::<String>::new());
    }

    #[test]
    fn tokenize_applies_stemming_when_enabled() {
        let config = TokenizationConfig {
            stopwords: StopwordFilter::Bundled,
            stemming: true,
        };
        assert_eq!(
            tokenize("state state states", &config),
            toks(&["state", "state", "state"])
        );
    }

    #[test]
    fn tokenize_without_stopword_removal() {
        let config = TokenizationConfig {
            stopwords: StopwordFilter::None,
            stemming: false,
        };
        assert_eq!(tokenize("The Apple-tree", &config), toks(&["the", "apple", "tree"]));
    }

    #[test]
    fn build_stats_counts() {
        let stats = two_doc_corpus();
        assert_eq!(stats.num_docs(), 2);
        assert_eq!(stats.total_tokens(), 3);
        assert_eq!(stats.term_stats("a"), Some((2, 2)));
        assert_eq!(stats.term_stats("b"), Some((1, 1)));
        assert_eq!(stats.term_stats("zzz"), None);
        assert_eq!(stats.doc_len("d1"), Some(2));
        assert_eq!(stats.doc_len("d2"), Some(1));
    }

    #[test]
    fn build_stats_empty_stream() {
        let stats = build_stats(vec![]).unwrap();
        assert_eq!(stats.num_docs(), 0);
        assert_eq!(stats.total_tokens(), 0);
        assert_eq!(stats.num_terms(), 0);
    }

    #[test]
    fn build_stats_empty_document() {
        let stats = build_stats(vec![Document::new("d1", vec![])]).unwrap();
        assert_eq!(stats.num_docs(), 1);
        assert_eq!(stats.total_tokens(), 0);
        assert_eq!(stats.doc_len("d1"), Some(0));
    }

    #[test]
    fn duplicate_doc_id_is_rejected() {
        let mut b = CorpusStatsBuilder::new();
        b.add_document(Document::new("d1", vec![])).unwrap();
        let err = b.add_document(Document::new("d1", vec![])).unwrap_err();
        assert_eq!(err, CorpusError::DuplicateDocId("d1".to_string()));
    }

    #[test]
    fn arrival_order_does_not_matter() {
        let docs = vec![
            Document::new("d1", toks(&["a", "b", "a"])),
            Document::new("d2", toks(&["c"])),
            Document::new("d3", toks(&["b", "c", "c"])),
        ];
        let mut reversed = docs.clone();
        reversed.reverse();
        assert_eq!(build_stats(docs).unwrap(), build_stats(reversed).unwrap());
    }

    #[test]
    fn token_totals_agree() {
        let stats = build_stats(vec![
            Document::new("x", toks(&["p", "q", "p"])),
            Document::new("y", toks(&["q"])),
            Document::new("z", vec![]),
        ])
        .unwrap();
        let cf_sum: u64 = stats.terms().map(|t| stats.term_stats(t).unwrap().1).sum();
        let len_sum: u64 = stats.doc_ids().map(|d| stats.doc_len(d).unwrap()).sum();
        assert_eq!(cf_sum, stats.total_tokens());
        assert_eq!(len_sum, stats.total_tokens());
    }

    #[test]
    fn allowlist_restricts_vectors() {
        let mut b = CorpusStatsBuilder::new()
            .with_vector_allowlist(BTreeSet::from(["d2".to_string()]));
        b.add_document(Document::new("d1", toks(&["a"]))).unwrap();
        b.add_document(Document::new("d2", toks(&["b"]))).unwrap();
        let stats = b.finish();
        assert!(stats.doc_vector("d1").is_none());
        assert!(stats.doc_vector("d2").is_some());
        // aggregate stats are unaffected
        assert_eq!(stats.term_stats("a"), Some((1, 1)));
    }

    #[test]
    fn df_matches_membership_count_on_random_corpora() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let vocab = ["w0", "w1", "w2", "w3", "w4", "w5", "w6"];
        for _ in 0..20 {
            let docs: Vec<Document> = (0..rng.gen_range(1..12))
                .map(|i| {
                    let n = rng.gen_range(0..15);
                    let tokens = (0..n)
                        .map(|_| vocab[rng.gen_range(0..vocab.len())].to_string())
                        .collect();
                    Document::new(alloc::format!("d{i}"), tokens)
                })
                .collect();
            let stats = build_stats(docs.clone()).unwrap();
            for term in vocab {
                let expected = docs.iter().filter(|d| d.tokens.iter().any(|t| t == term)).count();
                let df = stats.term_stats(term).map_or(0, |(df, _)| df);
                assert_eq!(df, expected as u64, "df({term})");
            }
        }
    }
    #[test]
    fn parts_round_trip_and_validation() {
        let stats = build_stats(vec![
            Document::new("d1", toks(&["a", "b", "a"])),
            Document::new("d2", toks(&["b"])),
            Document::new("d3", vec![]),
        ])
        .unwrap();
        let rebuilt = CorpusStats::from_parts(stats.clone().into_parts()).unwrap();
        assert_eq!(stats, rebuilt);

        let mut broken = stats.clone().into_parts();
        broken.total_tokens += 1;
        assert!(matches!(
            CorpusStats::from_parts(broken),
            Err(CorpusError::CorruptStats(_))
        ));

        let mut broken = stats.into_parts();
        broken.terms[0].cf += 2;
        assert!(matches!(
            CorpusStats::from_parts(broken),
            Err(CorpusError::CorruptStats(_))
        ));
    }

}
