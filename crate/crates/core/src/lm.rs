//! Dirichlet-smoothed language-model scoring and relevance-model estimation.
//!
//! Post-retrieval predictors never trust raw run scores (they live on
//! arbitrary scales); everything here recomputes query likelihoods from the
//! corpus statistics.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::corpus::{CorpusStats, TermId};
use crate::math;
use crate::run::RankedList;

/// A tokenized query with term counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub id: String,
    pub tokens: Vec<String>,
    qtf: BTreeMap<String, u32>,
}

impl Query {
    pub fn new(id: impl Into<String>, tokens: Vec<String>) -> Self {
        let mut qtf = BTreeMap::new();
        for t in &tokens {
            *qtf.entry(t.clone()).or_insert(0) += 1;
        }
        Query { id: id.into(), tokens, qtf }
    }

    /// |q|: total token count.
    pub fn len(&self) -> u32 {
        self.qtf.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.qtf.is_empty()
    }

    /// Distinct terms with their in-query counts.
    pub fn term_counts(&self) -> impl Iterator<Item = (&str, u32)> {
        self.qtf.iter().map(|(t, &c)| (t.as_str(), c))
    }

    pub fn distinct_terms(&self) -> impl Iterator<Item = &str> {
        self.qtf.keys().map(|s| s.as_str())
    }
}

/// A sparse term distribution (all probabilities > 0, summing to <= 1).
#[derive(Debug, Clone, PartialEq)]
pub struct LanguageModel {
    probs: BTreeMap<String, f64>,
    renormalized: bool,
}

impl LanguageModel {
    pub(crate) fn new(probs: BTreeMap<String, f64>, renormalized: bool) -> Self {
        LanguageModel { probs, renormalized }
    }

    pub fn prob(&self, term: &str) -> Option<f64> {
        self.probs.get(term).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.probs.iter().map(|(t, &p)| (t.as_str(), p))
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.probs.values().sum()
    }

    /// True when the vocabulary was clipped and the mass rescaled to 1.
    pub fn renormalized(&self) -> bool {
        self.renormalized
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LmError {
    EmptyCorpus,
    MissingDocVector(String),
    EmptyTopDocs,
    EmptyRelevanceModel,
}

impl fmt::Display for LmError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LmError::EmptyCorpus => write!(f, "collection statistics are empty (|C| = 0)"),
            LmError::MissingDocVector(id) => {
                write!(f, "no document vector available for doc_id {id:?}")
            }
            LmError::EmptyTopDocs => write!(f, "all top-k documents are empty"),
            LmError::EmptyRelevanceModel => write!(f, "relevance model has no terms"),
        }
    }
}

impl core::error::Error for LmError {}

/// P(t|C) = cf(t)/|C|; out-of-vocabulary terms get the floor 1/(|C|+1).
pub fn collection_prob(stats: &CorpusStats, term: &str) -> Result<f64, LmError> {
    let total = stats.total_tokens();
    if total == 0 {
        return Err(LmError::EmptyCorpus);
    }
    Ok(match stats.term_stats(term) {
        Some((_, cf)) => cf as f64 / total as f64,
        None => 1.0 / (total as f64 + 1.0),
    })
}

fn collection_prob_by_id(stats: &CorpusStats, id: TermId) -> f64 {
    let (_, cf) = stats.term_stats_by_id(id);
    cf as f64 / stats.total_tokens() as f64
}

/// Dirichlet-smoothed log-likelihood of the query under a document model:
/// sum over query terms of qtf * ln((tf + mu * P(t|C)) / (|d| + mu)).
pub fn dirichlet_loglik(
    query: &Query,
    doc_id: &str,
    stats: &CorpusStats,
    mu: f64,
) -> Result<f64, LmError> {
    if stats.total_tokens() == 0 {
        return Err(LmError::EmptyCorpus);
    }
    let vector = stats
        .doc_vector(doc_id)
        .ok_or_else(|| LmError::MissingDocVector(String::from(doc_id)))?;
    let doc_len = stats.doc_len(doc_id).unwrap_or(0) as f64;
    let mut total = 0.0;
    for (term, qtf) in query.term_counts() {
        let p_c = collection_prob(stats, term)?;
        let tf = stats
            .term_id(term)
            .and_then(|id| vector.get(&id).copied())
            .unwrap_or(0) as f64;
        total += qtf as f64 * math::ln((tf + mu * p_c) / (doc_len + mu));
    }
    Ok(total)
}

/// Query log-likelihood under the collection model; always <= 0.
pub fn collection_loglik(query: &Query, stats: &CorpusStats) -> Result<f64, LmError> {
    let mut total = 0.0;
    for (term, qtf) in query.term_counts() {
        total += qtf as f64 * math::ln(collection_prob(stats, term)?);
    }
    Ok(total)
}

/// Recompute LM scores for the top-k entries of a run list, preserving the
/// run's order. Returns min(k, len) entries.
pub fn rescore_topk(
    query: &Query,
    list: &RankedList,
    stats: &CorpusStats,
    mu: f64,
    k: usize,
) -> Result<Vec<(String, f64)>, LmError> {
    list.entries
        .iter()
        .take(k)
        .map(|e| dirichlet_loglik(query, &e.doc_id, stats, mu).map(|s| (e.doc_id.clone(), s)))
        .collect()
}

/// Estimate a relevance model from the top-k documents.
///
/// P(w|R) is proportional to sum over top docs of P_dirichlet(w|d) * w_d,
/// where the document weights are a softmax over the recomputed query
/// log-likelihoods and the vocabulary is the union of top-k document terms.
/// The result is clipped to the `n_terms` most probable terms (ties broken
/// by term name) and renormalized to sum 1.
pub fn rm1(
    query: &Query,
    list: &RankedList,
    stats: &CorpusStats,
    mu: f64,
    k: usize,
    n_terms: usize,
) -> Result<LanguageModel, LmError> {
    let scored = rescore_topk(query, list, stats, mu, k)?;
    if scored.is_empty() {
        return Err(LmError::EmptyTopDocs);
    }

    // softmax over log-likelihoods, shifted by the max for stability
    let max_score = scored.iter().map(|(_, s)| *s).fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = scored.iter().map(|(_, s)| math::exp(s - max_score)).collect();
    let weight_sum: f64 = weights.iter().sum();

    let mut vocab: BTreeMap<TermId, f64> = BTreeMap::new();
    for (doc_id, _) in &scored {
        let vector = stats
            .doc_vector(doc_id)
            .ok_or_else(|| LmError::MissingDocVector(doc_id.clone()))?;
        for &id in vector.keys() {
            vocab.entry(id).or_insert(0.0);
        }
    }
    if vocab.is_empty() {
        return Err(LmError::EmptyTopDocs);
    }

    for ((doc_id, _), weight) in scored.iter().zip(&weights) {
        let vector = stats.doc_vector(doc_id).expect("vector checked above");
        let doc_len = stats.doc_len(doc_id).unwrap_or(0) as f64;
        let w = weight / weight_sum;
        for (&id, mass) in vocab.iter_mut() {
            let tf = vector.get(&id).copied().unwrap_or(0) as f64;
            let p_dir = (tf + mu * collection_prob_by_id(stats, id)) / (doc_len + mu);
            *mass += w * p_dir;
        }
    }

    let mut entries: Vec<(TermId, f64)> = vocab.into_iter().collect();
    let truncated = entries.len() > n_terms;
    // highest probability first; ties by ascending term name
    entries.sort_by(|(ta, pa), (tb, pb)| {
        pb.partial_cmp(pa)
            .unwrap_or(core::cmp::Ordering::Equal)
            .then_with(|| stats.term_name(*ta).cmp(stats.term_name(*tb)))
    });
    entries.truncate(n_terms);
    let mass: f64 = entries.iter().map(|(_, p)| p).sum();
    let probs = entries
        .into_iter()
        .map(|(id, p)| (String::from(stats.term_name(id)), p / mass))
        .collect();
    Ok(LanguageModel::new(probs, truncated))
}

/// Score documents by cross entropy with a relevance model:
/// score(d) = sum over rm terms of P(w|RM) * ln P_dirichlet(w|d).
/// Sorted descending, ties broken by ascending doc id.
pub fn rerank_by_rm(
    rm: &LanguageModel,
    doc_ids: &[String],
    stats: &CorpusStats,
    mu: f64,
) -> Result<Vec<(String, f64)>, LmError> {
    if rm.is_empty() {
        return Err(LmError::EmptyRelevanceModel);
    }
    let mut scored = Vec::with_capacity(doc_ids.len());
    for doc_id in doc_ids {
        let vector = stats
            .doc_vector(doc_id)
            .ok_or_else(|| LmError::MissingDocVector(doc_id.clone()))?;
        let doc_len = stats.doc_len(doc_id).unwrap_or(0) as f64;
        let mut score = 0.0;
        for (term, p_rm) in rm.iter() {
            let p_c = collection_prob(stats, term)?;
            let tf = stats
                .term_id(term)
                .and_then(|id| vector.get(&id).copied())
                .unwrap_or(0) as f64;
            score += p_rm * math::ln((tf + mu * p_c) / (doc_len + mu));
        }
        scored.push((doc_id.clone(), score));
    }
    scored.sort_by(|(da, sa), (db, sb)| {
        sb.partial_cmp(sa)
            .unwrap_or(core::cmp::Ordering::Equal)
            .then_with(|| da.cmp(db))
    });
    Ok(scored)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{build_stats, Document};
    use crate::run::RunEntry;
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

    fn list(ids: &[&str]) -> RankedList {
        RankedList::new(
            ids.iter()
                .enumerate()
                .map(|(i, id)| RunEntry {
                    doc_id: id.to_string(),
                    score: -(i as f64),
                })
                .collect(),
        )
    }

    #[test]
    fn collection_prob_values() {
        let stats = two_doc_corpus();
        assert_eq!(collection_prob(&stats, "a").unwrap(), 2.0 / 3.0);
        assert_eq!(collection_prob(&stats, "b").unwrap(), 1.0 / 3.0);
        assert_eq!(collection_prob(&stats, "z").unwrap(), 0.25);
    }

    #[test]
    fn collection_prob_empty_corpus_errors() {
        let stats = build_stats(vec![]).unwrap();
        assert_eq!(collection_prob(&stats, "a"), Err(LmError::EmptyCorpus));
    }

    #[test]
    fn dirichlet_loglik_hand_values() {
        let stats = two_doc_corpus();
        let q = Query::new("q", toks(&["a"]));
        let got = dirichlet_loglik(&q, "d1", &stats, 1.0).unwrap();
        assert!((got - (5.0f64 / 9.0).ln()).abs() < 1e-15);

        let q_oov = Query::new("q", toks(&["z"]));
        let got = dirichlet_loglik(&q_oov, "d1", &stats, 1.0).unwrap();
        assert!((got - (1.0f64 / 12.0).ln()).abs() < 1e-15);

        let q2 = Query::new("q", toks(&["a", "a"]));
        let single = dirichlet_loglik(&q, "d1", &stats, 1.0).unwrap();
        let double = dirichlet_loglik(&q2, "d1", &stats, 1.0).unwrap();
        assert!((double - 2.0 * single).abs() < 1e-12);
    }

    #[test]
    fn collection_loglik_hand_values() {
        let stats = two_doc_corpus();
        let ln23 = (2.0f64 / 3.0).ln();
        let ln13 = (1.0f64 / 3.0).ln();
        let got = collection_loglik(&Query::new("q", toks(&["a"])), &stats).unwrap();
        assert!((got - ln23).abs() < 1e-15);
        let got = collection_loglik(&Query::new("q", toks(&["a", "b"])), &stats).unwrap();
        assert!((got - (ln23 + ln13)).abs() < 1e-15);
        let got = collection_loglik(&Query::new("q", toks(&["z"])), &stats).unwrap();
        assert!((got - 0.25f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn collection_loglik_is_nonpositive() {
        let stats = build_stats(vec![Document::new("d", toks(&["w", "w", "w"]))]).unwrap();
        // single-term vocabulary: P(w|C) = 1, so the loglik hits exactly 0
        let got = collection_loglik(&Query::new("q", toks(&["w"])), &stats).unwrap();
        assert_eq!(got, 0.0);
        let got = collection_loglik(&Query::new("q", toks(&["v"])), &stats).unwrap();
        assert!(got < 0.0);
    }

    #[test]
    fn dirichlet_approaches_collection_model_for_huge_mu() {
        let stats = two_doc_corpus();
        let q = Query::new("q", toks(&["a", "b"]));
        let doc_score = dirichlet_loglik(&q, "d2", &stats, 1e9).unwrap();
        let coll_score = collection_loglik(&q, &stats).unwrap();
        assert!(((doc_score - coll_score) / coll_score).abs() < 1e-6);
    }

    #[test]
    fn rescore_topk_preserves_order_and_clamps() {
        let stats = two_doc_corpus();
        let q = Query::new("q", toks(&["a"]));
        let l = list(&["d1", "d2"]);

        let scored = rescore_topk(&q, &l, &stats, 1.0, 2).unwrap();
        assert_eq!(scored.len(), 2);
        assert_eq!(scored[0].0, "d1");
        assert_eq!(scored[1].0, "d2");
        assert!((scored[0].1 - (5.0f64 / 9.0).ln()).abs() < 1e-15);
        assert!((scored[1].1 - (5.0f64 / 6.0).ln()).abs() < 1e-15);

        assert_eq!(rescore_topk(&q, &l, &stats, 1.0, 1).unwrap().len(), 1);
        assert_eq!(rescore_topk(&q, &l, &stats, 1.0, 10).unwrap().len(), 2);
    }

    #[test]
    fn rescore_missing_vector_errors() {
        let stats = two_doc_corpus();
        let q = Query::new("q", toks(&["a"]));
        let err = rescore_topk(&q, &list(&["nope"]), &stats, 1.0, 1).unwrap_err();
        assert_eq!(err, LmError::MissingDocVector("nope".to_string()));
    }

    #[test]
    fn rm1_single_doc_is_its_smoothed_model() {
        let stats = two_doc_corpus();
        let q = Query::new("q", toks(&["a"]));
        let rm = rm1(&q, &list(&["d1", "d2"]), &stats, 1.0, 1, 100).unwrap();
        // d1 contains a and b; smoothed masses (1 + mu*P(t|C)) / (2 + mu)
        let pa = (1.0 + 2.0 / 3.0) / 3.0;
        let pb = (1.0 + 1.0 / 3.0) / 3.0;
        let sum = pa + pb;
        assert!((rm.prob("a").unwrap() - pa / sum).abs() < 1e-12);
        assert!((rm.prob("b").unwrap() - pb / sum).abs() < 1e-12);
        assert!(!rm.renormalized());
    }

    #[test]
    fn rm1_identical_docs_match_single_doc_case() {
        let stats = build_stats(vec![
            Document::new("d1", toks(&["a", "b"])),
            Document::new("d2", toks(&["a", "b"])),
        ])
        .unwrap();
        let q = Query::new("q", toks(&["a"]));
        let rm_two = rm1(&q, &list(&["d1", "d2"]), &stats, 1.0, 2, 100).unwrap();
        let rm_one = rm1(&q, &list(&["d1"]), &stats, 1.0, 1, 100).unwrap();
        for (term, p) in rm_two.iter() {
            assert!((p - rm_one.prob(term).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn rm1_sums_to_one_and_clips() {
        let stats = build_stats(vec![
            Document::new("d1", toks(&["a", "b", "c"])),
            Document::new("d2", toks(&["b", "c", "d"])),
            Document::new("d3", toks(&["c", "d", "e"])),
        ])
        .unwrap();
        let q = Query::new("q", toks(&["c"]));
        let rm = rm1(&q, &list(&["d1", "d2", "d3"]), &stats, 10.0, 3, 100).unwrap();
        assert!((rm.total_mass() - 1.0).abs() < 1e-9);
        assert!(!rm.renormalized());

        let clipped = rm1(&q, &list(&["d1", "d2", "d3"]), &stats, 10.0, 3, 2).unwrap();
        assert_eq!(clipped.len(), 2);
        assert!((clipped.total_mass() - 1.0).abs() < 1e-9);
        assert!(clipped.renormalized());
    }

    #[test]
    fn rm1_all_empty_docs_errors() {
        let stats = build_stats(vec![
            Document::new("d1", vec![]),
            Document::new("d2", toks(&["a"])),
        ])
        .unwrap();
        let q = Query::new("q", toks(&["a"]));
        assert_eq!(
            rm1(&q, &list(&["d1"]), &stats, 1.0, 1, 10).unwrap_err(),
            LmError::EmptyTopDocs
        );
    }

    #[test]
    fn rerank_prefers_docs_holding_rm_mass() {
        let stats = build_stats(vec![
            Document::new("d1", toks(&["rare"])),
            Document::new("d2", toks(&["common", "common"])),
        ])
        .unwrap();
        let rm = LanguageModel::new(
            BTreeMap::from([("rare".to_string(), 1.0)]),
            false,
        );
        let ranked = rerank_by_rm(
            &rm,
            &["d1".to_string(), "d2".to_string()],
            &stats,
            1.0,
        )
        .unwrap();
        assert_eq!(ranked[0].0, "d1");
    }

    #[test]
    fn rerank_ties_break_by_doc_id() {
        let stats = build_stats(vec![
            Document::new("db", toks(&["x"])),
            Document::new("da", toks(&["x"])),
        ])
        .unwrap();
        let rm = LanguageModel::new(BTreeMap::from([("x".to_string(), 1.0)]), false);
        let ranked = rerank_by_rm(&rm, &["db".to_string(), "da".to_string()], &stats, 1.0).unwrap();
        assert_eq!(ranked[0].0, "da");
        assert_eq!(ranked[1].0, "db");
    }
}
