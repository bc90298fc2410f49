//! Pre- and post-retrieval query performance predictors.
//!
//! Pre-retrieval predictors (IDF, ICTF, SCQ, VAR, SCS) use only query and
//! collection statistics. Post-retrieval predictors (Clarity, NQC, WIG, SMV
//! and their UEF counterparts) additionally consume the ranked list, with
//! document scores recomputed as Dirichlet query log-likelihoods by default.

use alloc::borrow::ToOwned;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::corpus::CorpusStats;
use crate::evaluation::{pearson, CorrError};
use crate::lm::{self, LmError, Query};
use crate::math;
use crate::run::{RankedList, Run};

/// How per-term values are combined over the distinct query terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Aggregation {
    Mean,
    Max,
}

impl Aggregation {
    pub fn as_str(self) -> &'static str {
        match self {
            Aggregation::Mean => "avg",
            Aggregation::Max => "max",
        }
    }

    fn apply(self, values: impl Iterator<Item = f64>) -> Option<f64> {
        match self {
            Aggregation::Mean => {
                let mut sum = 0.0;
                let mut n = 0usize;
                for v in values {
                    sum += v;
                    n += 1;
                }
                (n > 0).then(|| sum / n as f64)
            }
            Aggregation::Max => values.fold(None, |acc: Option<f64>, v| {
                Some(acc.map_or(v, |a| a.max(v)))
            }),
        }
    }
}

/// IDF formula. `Smoothed` stays finite at df = 0; `Plain` is ln(N/df) with
/// the same +0.5 floor applied to out-of-vocabulary terms only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IdfVariant {
    #[default]
    Smoothed,
    Plain,
}

impl IdfVariant {
    fn idf(self, num_docs: u64, df: u64) -> f64 {
        let n = num_docs as f64;
        match self {
            IdfVariant::Smoothed => math::ln((n + 1.0) / (df as f64 + 0.5)),
            IdfVariant::Plain => {
                let d = if df == 0 { 0.5 } else { df as f64 };
                math::ln(n / d)
            }
        }
    }
}

/// Where the top-k document scores of NQC/WIG/SMV/UEF come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScoreSource {
    /// Dirichlet query log-likelihoods recomputed from the corpus stats.
    #[default]
    RecomputedLm,
    /// The scores stored in the run file (ablation mode; the collection
    /// log-likelihood normalizers stay LM-based).
    RawRun,
}

/// How SMV maps scores to the positive domain its formula assumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SmvPositivity {
    /// s(d) = score(d) - min + 1e-6
    #[default]
    ShiftMin,
    /// s(d) = exp(score(d))
    Exp,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PredictError {
    EmptyQuery,
    /// Fewer ranked entries than the operation can work with.
    TooFewDocs { needed: usize, got: usize },
    /// |collection log-likelihood| below 1e-12; NQC/SMV cannot normalize.
    DegenerateNormalizer,
    /// The UEF similarity correlation is undefined (zero score variance).
    UndefinedCorrelation,
    Lm(LmError),
}

impl fmt::Display for PredictError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PredictError::EmptyQuery => write!(f, "query has no terms"),
            PredictError::TooFewDocs { needed, got } => {
                write!(f, "ranked list too short: need {needed} docs, got {got}")
            }
            PredictError::DegenerateNormalizer => {
                write!(f, "collection log-likelihood is ~0; normalized predictor undefined")
            }
            PredictError::UndefinedCorrelation => {
                write!(f, "score correlation undefined (zero variance)")
            }
            PredictError::Lm(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for PredictError {}

impl From<LmError> for PredictError {
    fn from(e: LmError) -> Self {
        PredictError::Lm(e)
    }
}

fn require_nonempty(query: &Query) -> Result<(), PredictError> {
    if query.is_empty() {
        Err(PredictError::EmptyQuery)
    } else {
        Ok(())
    }
}

/// IDF aggregated over distinct query terms.
pub fn idf_agg(
    query: &Query,
    stats: &CorpusStats,
    agg: Aggregation,
    variant: IdfVariant,
) -> Result<f64, PredictError> {
    require_nonempty(query)?;
    let n = stats.num_docs();
    let values = query
        .distinct_terms()
        .map(|t| variant.idf(n, stats.term_stats(t).map_or(0, |(df, _)| df)));
    Ok(agg.apply(values).expect("query checked non-empty"))
}

/// Inverse collection term frequency, ln(|C|/cf), aggregated over distinct
/// terms; out-of-vocabulary terms use the collection-probability floor.
pub fn ictf_agg(query: &Query, stats: &CorpusStats, agg: Aggregation) -> Result<f64, PredictError> {
    require_nonempty(query)?;
    let mut values = Vec::new();
    for term in query.distinct_terms() {
        values.push(-math::ln(lm::collection_prob(stats, term)?));
    }
    Ok(agg.apply(values.into_iter()).expect("query checked non-empty"))
}

/// Collection-query similarity per term: (1 + ln cf) * ln(1 + N/df);
/// out-of-vocabulary terms contribute 0.
pub fn scq_agg(query: &Query, stats: &CorpusStats, agg: Aggregation) -> Result<f64, PredictError> {
    require_nonempty(query)?;
    let n = stats.num_docs() as f64;
    let values = query.distinct_terms().map(|t| match stats.term_stats(t) {
        Some((df, cf)) => (1.0 + math::ln(cf as f64)) * math::ln(1.0 + n / df as f64),
        None => 0.0,
    });
    Ok(agg.apply(values).expect("query checked non-empty"))
}

/// Population variance of w(t,d) = (1 + ln tf(t,d)) * idf(t) over the
/// documents containing t; terms with df <= 1 (or OOV) contribute 0.
pub fn var_agg(
    query: &Query,
    stats: &CorpusStats,
    agg: Aggregation,
    variant: IdfVariant,
) -> Result<f64, PredictError> {
    require_nonempty(query)?;
    let values = query.distinct_terms().map(|t| var_term(stats, t, variant));
    Ok(agg.apply(values).expect("query checked non-empty"))
}

fn var_term(stats: &CorpusStats, term: &str, variant: IdfVariant) -> f64 {
    let Some((df, _)) = stats.term_stats(term) else { return 0.0 };
    if df <= 1 {
        return 0.0;
    }
    let hist: Vec<(u32, u32)> = stats
        .term_tf_histogram(term)
        .expect("term is in vocabulary")
        .collect();
    if hist.len() == 1 {
        // identical tf everywhere: variance is exactly 0
        return 0.0;
    }
    let idf = variant.idf(stats.num_docs(), df);
    let w = |tf: u32| (1.0 + math::ln(tf as f64)) * idf;
    let mean = hist.iter().map(|&(tf, n)| n as f64 * w(tf)).sum::<f64>() / df as f64;
    hist.iter()
        .map(|&(tf, n)| {
            let d = w(tf) - mean;
            n as f64 * d * d
        })
        .sum::<f64>()
        / df as f64
}

/// Simplified clarity score: KL(P(t|q) || P(t|C)) summed over the distinct
/// query terms, with P(t|q) = qtf/|q|.
pub fn scs(query: &Query, stats: &CorpusStats) -> Result<f64, PredictError> {
    require_nonempty(query)?;
    let q_len = query.len() as f64;
    let mut total = 0.0;
    for (term, qtf) in query.term_counts() {
        let p_q = qtf as f64 / q_len;
        let p_c = lm::collection_prob(stats, term)?;
        total += p_q * math::ln(p_q / p_c);
    }
    Ok(total)
}

/// Clarity: KL divergence between the top-k relevance model and the
/// collection language model, over the clipped relevance-model vocabulary.
pub fn clarity(
    query: &Query,
    list: &RankedList,
    stats: &CorpusStats,
    k: usize,
    n_terms: usize,
    mu: f64,
) -> Result<f64, PredictError> {
    require_nonempty(query)?;
    let rm = lm::rm1(query, list, stats, mu, k, n_terms)?;
    let mut kl = 0.0;
    for (term, p_r) in rm.iter() {
        let p_c = lm::collection_prob(stats, term)?;
        kl += p_r * math::ln(p_r / p_c);
    }
    Ok(kl)
}

/// Top-k scores under the chosen source, in run order.
fn topk_scores(
    query: &Query,
    list: &RankedList,
    stats: &CorpusStats,
    mu: f64,
    k: usize,
    source: ScoreSource,
) -> Result<Vec<(String, f64)>, PredictError> {
    match source {
        ScoreSource::RecomputedLm => Ok(lm::rescore_topk(query, list, stats, mu, k)?),
        ScoreSource::RawRun => Ok(list
            .entries
            .iter()
            .take(k)
            .map(|e| (e.doc_id.clone(), e.score))
            .collect()),
    }
}

fn normalizer(query: &Query, stats: &CorpusStats) -> Result<f64, PredictError> {
    let cll = lm::collection_loglik(query, stats)?;
    let norm = math::abs(cll);
    if norm < 1e-12 {
        return Err(PredictError::DegenerateNormalizer);
    }
    Ok(norm)
}

/// NQC: population standard deviation of the top-k scores, normalized by
/// |score(q, C)|.
pub fn nqc(
    query: &Query,
    list: &RankedList,
    stats: &CorpusStats,
    k: usize,
    mu: f64,
    source: ScoreSource,
) -> Result<f64, PredictError> {
    require_nonempty(query)?;
    let scored = topk_scores(query, list, stats, mu, k, source)?;
    if scored.len() < 2 {
        return Err(PredictError::TooFewDocs { needed: 2, got: scored.len() });
    }
    let norm = normalizer(query, stats)?;
    let n = scored.len() as f64;
    let mean = scored.iter().map(|(_, s)| s).sum::<f64>() / n;
    let var = scored
        .iter()
        .map(|(_, s)| {
            let d = s - mean;
            d * d
        })
        .sum::<f64>()
        / n;
    Ok(math::sqrt(var) / norm)
}

/// WIG: mean gap between top-k scores and the collection score, scaled by
/// 1/sqrt(|q|).
pub fn wig(
    query: &Query,
    list: &RankedList,
    stats: &CorpusStats,
    k: usize,
    mu: f64,
    source: ScoreSource,
) -> Result<f64, PredictError> {
    require_nonempty(query)?;
    let scored = topk_scores(query, list, stats, mu, k, source)?;
    if scored.is_empty() {
        return Err(PredictError::TooFewDocs { needed: 1, got: 0 });
    }
    let cll = lm::collection_loglik(query, stats)?;
    let n = scored.len() as f64;
    let gap: f64 = scored.iter().map(|(_, s)| s - cll).sum();
    Ok(gap / n / math::sqrt(query.len() as f64))
}

/// SMV: mean of s(d) * |ln(s(d)/mean(s))| over the top-k shifted-positive
/// scores, normalized by |score(q, C)|.
pub fn smv(
    query: &Query,
    list: &RankedList,
    stats: &CorpusStats,
    k: usize,
    mu: f64,
    source: ScoreSource,
    positivity: SmvPositivity,
) -> Result<f64, PredictError> {
    require_nonempty(query)?;
    let scored = topk_scores(query, list, stats, mu, k, source)?;
    if scored.is_empty() {
        return Err(PredictError::TooFewDocs { needed: 1, got: 0 });
    }
    let norm = normalizer(query, stats)?;
    let raw: Vec<f64> = scored.iter().map(|(_, s)| *s).collect();
    Ok(smv_of_positive(&positive_scores(&raw, positivity)) / norm)
}

fn positive_scores(scores: &[f64], positivity: SmvPositivity) -> Vec<f64> {
    match positivity {
        SmvPositivity::ShiftMin => {
            let min = scores.iter().copied().fold(f64::INFINITY, f64::min);
            scores.iter().map(|s| s - min + 1e-6).collect()
        }
        SmvPositivity::Exp => scores.iter().map(|&s| math::exp(s)).collect(),
    }
}

/// (1/k) * sum of s * |ln(s/mean)| for already-positive scores.
fn smv_of_positive(s: &[f64]) -> f64 {
    let min = s.iter().copied().fold(f64::INFINITY, f64::min);
    let max = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if min == max {
        // every score equals the mean: the sum is exactly 0
        return 0.0;
    }
    let n = s.len() as f64;
    let mean = s.iter().sum::<f64>() / n;
    s.iter().map(|&v| v * math::abs(math::ln(v / mean))).sum::<f64>() / n
}

/// Base predictor a UEF instance wraps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UefBase {
    Clarity,
    Nqc,
    Wig,
    Smv,
}

impl UefBase {
    pub fn as_str(self) -> &'static str {
        match self {
            UefBase::Clarity => "clarity",
            UefBase::Nqc => "nqc",
            UefBase::Wig => "wig",
            UefBase::Smv => "smv",
        }
    }
}

/// UEF: the base predictor weighted by how stable the top-k ranking is under
/// relevance-model re-ranking. The similarity is the Pearson correlation
/// between the original top-k scores and the relevance-model scores of the
/// same documents, doc-aligned; the base runs on the same list with the same
/// parameters.
pub fn uef(
    base: UefBase,
    query: &Query,
    list: &RankedList,
    stats: &CorpusStats,
    k: usize,
    n_terms: usize,
    mu: f64,
    source: ScoreSource,
) -> Result<f64, PredictError> {
    require_nonempty(query)?;
    let scored = topk_scores(query, list, stats, mu, k, source)?;
    if scored.len() < 2 {
        return Err(PredictError::TooFewDocs { needed: 2, got: scored.len() });
    }
    let rm = lm::rm1(query, list, stats, mu, k, n_terms)?;
    let doc_ids: Vec<String> = scored.iter().map(|(d, _)| d.clone()).collect();
    let reranked = lm::rerank_by_rm(&rm, &doc_ids, stats, mu)?;
    let rm_scores: BTreeMap<&str, f64> =
        reranked.iter().map(|(d, s)| (d.as_str(), *s)).collect();

    let original: Vec<f64> = scored.iter().map(|(_, s)| *s).collect();
    let aligned: Vec<f64> = scored.iter().map(|(d, _)| rm_scores[d.as_str()]).collect();
    let similarity = match pearson(&original, &aligned) {
        Ok(r) => r,
        Err(CorrError::ZeroVariance) => return Err(PredictError::UndefinedCorrelation),
        Err(_) => unreachable!("vectors are same-length and >= 2"),
    };

    let base_score = match base {
        UefBase::Clarity => clarity(query, list, stats, k, n_terms, mu)?,
        UefBase::Nqc => nqc(query, list, stats, k, mu, source)?,
        UefBase::Wig => wig(query, list, stats, k, mu, source)?,
        UefBase::Smv => smv(query, list, stats, k, mu, source, SmvPositivity::ShiftMin)?,
    };
    Ok(similarity * base_score)
}

/// A predictor instantiation with all of its parameters pinned.
#[derive(Debug, Clone, PartialEq)]
pub enum Predictor {
    Idf { agg: Aggregation, variant: IdfVariant },
    Ictf { agg: Aggregation },
    Scq { agg: Aggregation },
    Var { agg: Aggregation, variant: IdfVariant },
    Scs,
    Clarity { k: usize, n_terms: usize, mu: f64 },
    Nqc { k: usize, mu: f64 },
    Wig { k: usize, mu: f64 },
    Smv { k: usize, mu: f64 },
    Uef { base: UefBase, k: usize, n_terms: usize, mu: f64 },
}

impl Predictor {
    /// Pre-retrieval predictors do not consume the ranked list.
    pub fn is_pre_retrieval(&self) -> bool {
        matches!(
            self,
            Predictor::Idf { .. }
                | Predictor::Ictf { .. }
                | Predictor::Scq { .. }
                | Predictor::Var { .. }
                | Predictor::Scs
        )
    }

    pub fn default_name(&self) -> String {
        match self {
            Predictor::Idf { agg, .. } => alloc::format!("idf-{}", agg.as_str()),
            Predictor::Ictf { agg } => alloc::format!("ictf-{}", agg.as_str()),
            Predictor::Scq { agg } => alloc::format!("scq-{}", agg.as_str()),
            Predictor::Var { agg, .. } => alloc::format!("var-{}", agg.as_str()),
            Predictor::Scs => "scs".to_owned(),
            Predictor::Clarity { .. } => "clarity".to_owned(),
            Predictor::Nqc { .. } => "nqc".to_owned(),
            Predictor::Wig { .. } => "wig".to_owned(),
            Predictor::Smv { .. } => "smv".to_owned(),
            Predictor::Uef { base, .. } => alloc::format!("uef-{}", base.as_str()),
        }
    }

    /// Evaluate on one query. `list` may be `None` for pre-retrieval
    /// predictors only.
    pub fn evaluate(
        &self,
        query: &Query,
        list: Option<&RankedList>,
        stats: &CorpusStats,
        source: ScoreSource,
    ) -> Result<f64, PredictError> {
        match self {
            Predictor::Idf { agg, variant } => idf_agg(query, stats, *agg, *variant),
            Predictor::Ictf { agg } => ictf_agg(query, stats, *agg),
            Predictor::Scq { agg } => scq_agg(query, stats, *agg),
            Predictor::Var { agg, variant } => var_agg(query, stats, *agg, *variant),
            Predictor::Scs => scs(query, stats),
            Predictor::Clarity { k, n_terms, mu } => {
                let list = list.ok_or(PredictError::TooFewDocs { needed: 1, got: 0 })?;
                clarity(query, list, stats, *k, *n_terms, *mu)
            }
            Predictor::Nqc { k, mu } => {
                let list = list.ok_or(PredictError::TooFewDocs { needed: 2, got: 0 })?;
                nqc(query, list, stats, *k, *mu, source)
            }
            Predictor::Wig { k, mu } => {
                let list = list.ok_or(PredictError::TooFewDocs { needed: 1, got: 0 })?;
                wig(query, list, stats, *k, *mu, source)
            }
            Predictor::Smv { k, mu } => {
                let list = list.ok_or(PredictError::TooFewDocs { needed: 1, got: 0 })?;
                smv(query, list, stats, *k, *mu, source, SmvPositivity::ShiftMin)
            }
            Predictor::Uef { base, k, n_terms, mu } => {
                let list = list.ok_or(PredictError::TooFewDocs { needed: 2, got: 0 })?;
                uef(*base, query, list, stats, *k, *n_terms, *mu, source)
            }
        }
    }
}

/// Default parameters: k = 100 except WIG (k = 5), mu = 1000, 100 RM terms.
pub const DEFAULT_MU: f64 = 1000.0;
pub const DEFAULT_K: usize = 100;
pub const DEFAULT_WIG_K: usize = 5;
pub const DEFAULT_RM_TERMS: usize = 100;

/// A named predictor instantiation, the unit the experiment grid is built on.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictorSpec {
    pub name: String,
    pub predictor: Predictor,
}

impl PredictorSpec {
    pub fn new(predictor: Predictor) -> Self {
        PredictorSpec { name: predictor.default_name(), predictor }
    }

    pub fn named(name: impl Into<String>, predictor: Predictor) -> Self {
        PredictorSpec { name: name.into(), predictor }
    }
}

/// The standard roster: 9 pre-retrieval instantiations (SCS plus avg/max
/// variants of IDF, ICTF, SCQ, VAR) and 8 post-retrieval ones (Clarity, NQC,
/// WIG, SMV and their four UEF counterparts).
pub fn default_roster() -> Vec<PredictorSpec> {
    use Aggregation::{Max, Mean};
    let mut specs = Vec::new();
    for agg in [Mean, Max] {
        specs.push(PredictorSpec::new(Predictor::Idf { agg, variant: IdfVariant::Smoothed }));
    }
    for agg in [Mean, Max] {
        specs.push(PredictorSpec::new(Predictor::Ictf { agg }));
    }
    for agg in [Mean, Max] {
        specs.push(PredictorSpec::new(Predictor::Scq { agg }));
    }
    for agg in [Mean, Max] {
        specs.push(PredictorSpec::new(Predictor::Var { agg, variant: IdfVariant::Smoothed }));
    }
    specs.push(PredictorSpec::new(Predictor::Scs));
    specs.push(PredictorSpec::new(Predictor::Clarity {
        k: DEFAULT_K,
        n_terms: DEFAULT_RM_TERMS,
        mu: DEFAULT_MU,
    }));
    specs.push(PredictorSpec::new(Predictor::Nqc { k: DEFAULT_K, mu: DEFAULT_MU }));
    specs.push(PredictorSpec::new(Predictor::Wig { k: DEFAULT_WIG_K, mu: DEFAULT_MU }));
    specs.push(PredictorSpec::new(Predictor::Smv { k: DEFAULT_K, mu: DEFAULT_MU }));
    for base in [UefBase::Clarity, UefBase::Nqc, UefBase::Wig, UefBase::Smv] {
        specs.push(PredictorSpec::new(Predictor::Uef {
            base,
            k: DEFAULT_K,
            n_terms: DEFAULT_RM_TERMS,
            mu: DEFAULT_MU,
        }));
    }
    specs
}

/// (predictor, system, query) -> prediction score.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PredictionTable {
    records: BTreeMap<(String, String, String), f64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DuplicateRecord {
    pub predictor: String,
    pub system: String,
    pub query_id: String,
}

impl fmt::Display for DuplicateRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "duplicate prediction record ({}, {}, {})",
            self.predictor, self.system, self.query_id
        )
    }
}

impl core::error::Error for DuplicateRecord {}

impl PredictionTable {
    pub fn insert(
        &mut self,
        predictor: &str,
        system: &str,
        query_id: &str,
        score: f64,
    ) -> Result<(), DuplicateRecord> {
        let key = (predictor.to_owned(), system.to_owned(), query_id.to_owned());
        if self.records.contains_key(&key) {
            return Err(DuplicateRecord {
                predictor: key.0,
                system: key.1,
                query_id: key.2,
            });
        }
        self.records.insert(key, score);
        Ok(())
    }

    pub fn get(&self, predictor: &str, system: &str, query_id: &str) -> Option<f64> {
        self.records
            .get(&(predictor.to_owned(), system.to_owned(), query_id.to_owned()))
            .copied()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str, &str, f64)> {
        self.records
            .iter()
            .map(|((p, s, q), &v)| (p.as_str(), s.as_str(), q.as_str(), v))
    }

    pub(crate) fn keys(&self) -> impl Iterator<Item = (&str, &str, &str)> {
        self.records.keys().map(|(p, s, q)| (p.as_str(), s.as_str(), q.as_str()))
    }

    pub fn predictors(&self) -> Vec<String> {
        let mut names: Vec<String> = self.records.keys().map(|(p, _, _)| p.clone()).collect();
        names.dedup();
        names
    }

    /// Merge another table in; duplicate keys are an error.
    pub fn merge(&mut self, other: PredictionTable) -> Result<(), DuplicateRecord> {
        for ((p, s, q), v) in other.records {
            if self.records.contains_key(&(p.clone(), s.clone(), q.clone())) {
                return Err(DuplicateRecord { predictor: p, system: s, query_id: q });
            }
            self.records.insert((p, s, q), v);
        }
        Ok(())
    }
}

/// Why a grid cell was skipped rather than scored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SkipReason {
    MissingRankedList,
    EmptyQuery,
}

impl fmt::Display for SkipReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SkipReason::MissingRankedList => write!(f, "no ranked list for this (system, query)"),
            SkipReason::EmptyQuery => write!(f, "query tokenizes to no terms"),
        }
    }
}

/// A grid cell `run_predictor` could not fill.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedCell {
    pub predictor: String,
    pub system: String,
    pub query_id: String,
    pub reason: SkipReason,
}

/// The result of evaluating one spec over the (system, query) grid.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PredictionOutcome {
    pub table: PredictionTable,
    pub skipped: Vec<SkippedCell>,
}

/// Evaluate one predictor spec over every (system, query) pair.
///
/// Pre-retrieval predictors are computed once per query and replicated per
/// system so the grid stays complete. Cells without a ranked list (post
/// predictors) or with an empty query are skipped and reported.
pub fn run_predictor(
    spec: &PredictorSpec,
    queries: &BTreeMap<String, Query>,
    runs: &BTreeMap<String, Run>,
    stats: &CorpusStats,
    source: ScoreSource,
) -> Result<PredictionOutcome, PredictError> {
    let mut outcome = PredictionOutcome::default();
    let pre = spec.predictor.is_pre_retrieval();
    for (query_id, query) in queries {
        if query.is_empty() {
            for system in runs.keys() {
                outcome.skipped.push(SkippedCell {
                    predictor: spec.name.clone(),
                    system: system.clone(),
                    query_id: query_id.clone(),
                    reason: SkipReason::EmptyQuery,
                });
            }
            continue;
        }
        let shared = if pre {
            Some(spec.predictor.evaluate(query, None, stats, source)?)
        } else {
            None
        };
        for (system, run) in runs {
            let score = match shared {
                Some(v) => v,
                None => match run.list(query_id) {
                    Some(list) => spec.predictor.evaluate(query, Some(list), stats, source)?,
                    None => {
                        outcome.skipped.push(SkippedCell {
                            predictor: spec.name.clone(),
                            system: system.clone(),
                            query_id: query_id.clone(),
                            reason: SkipReason::MissingRankedList,
                        });
                        continue;
                    }
                },
            };
            outcome
                .table
                .insert(&spec.name, system, query_id, score)
                .expect("grid keys are unique by construction");
        }
    }
    Ok(outcome)
}
