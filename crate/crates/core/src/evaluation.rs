//! Effectiveness measures (nDCG@k), rank correlations, and the scaled
//! absolute rank error (sARE) tables used for the statistical analyses.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::math;
use crate::predictors::PredictionTable;
use crate::run::RankedList;

/// Graded relevance judgements.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Qrels {
    grades: BTreeMap<String, BTreeMap<String, u32>>,
}

impl Qrels {
    pub fn new() -> Self {
        Self::default()
    }

    /// Insert a grade; returns the previous one when the pair was already set.
    pub fn set(&mut self, query_id: &str, doc_id: &str, grade: u32) -> Option<u32> {
        self.grades
            .entry(String::from(query_id))
            .or_default()
            .insert(String::from(doc_id), grade)
    }

    pub fn grade(&self, query_id: &str, doc_id: &str) -> Option<u32> {
        self.grades.get(query_id).and_then(|m| m.get(doc_id)).copied()
    }

    pub fn for_query(&self, query_id: &str) -> Option<&BTreeMap<String, u32>> {
        self.grades.get(query_id)
    }

    pub fn query_ids(&self) -> impl Iterator<Item = &str> {
        self.grades.keys().map(|s| s.as_str())
    }

    /// Queries with judgements but no positive grade.
    pub fn queries_without_positives(&self) -> Vec<&str> {
        self.grades
            .iter()
            .filter(|(_, m)| m.values().all(|&g| g == 0))
            .map(|(q, _)| q.as_str())
            .collect()
    }
}

/// Gain assigned to a relevance grade inside DCG.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GainScheme {
    /// gain = rel
    #[default]
    Linear,
    /// gain = 2^rel - 1
    Exponential,
}

impl GainScheme {
    fn gain(self, rel: u32) -> f64 {
        match self {
            GainScheme::Linear => rel as f64,
            GainScheme::Exponential => math::powf(2.0, rel as f64) - 1.0,
        }
    }
}

/// nDCG@k with log2(i+1) discount. Queries without any positive judgement
/// score 0 (callers flag them; they are never dropped).
pub fn ndcg_at_k(
    list: &RankedList,
    qrels: Option<&BTreeMap<String, u32>>,
    k: usize,
    gain: GainScheme,
) -> f64 {
    let Some(qrels) = qrels else { return 0.0 };
    let mut grades: Vec<u32> = qrels.values().copied().filter(|&g| g > 0).collect();
    if grades.is_empty() {
        return 0.0;
    }
    grades.sort_unstable_by(|a, b| b.cmp(a));

    let dcg: f64 = list
        .entries
        .iter()
        .take(k)
        .enumerate()
        .map(|(i, e)| {
            let rel = qrels.get(&e.doc_id).copied().unwrap_or(0);
            gain.gain(rel) / math::log2(i as f64 + 2.0)
        })
        .sum();
    let ideal: f64 = grades
        .iter()
        .take(k)
        .enumerate()
        .map(|(i, &rel)| gain.gain(rel) / math::log2(i as f64 + 2.0))
        .sum();
    dcg / ideal
}

/// Correlation failures are explicit; undefined values are never reported as 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CorrError {
    LengthMismatch { left: usize, right: usize },
    TooShort { len: usize },
    ZeroVariance,
}

impl fmt::Display for CorrError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CorrError::LengthMismatch { left, right } => {
                write!(f, "correlation inputs differ in length: {left} vs {right}")
            }
            CorrError::TooShort { len } => {
                write!(f, "correlation needs at least 2 observations, got {len}")
            }
            CorrError::ZeroVariance => write!(f, "correlation undefined: an input has zero variance"),
        }
    }
}

impl core::error::Error for CorrError {}

fn check_lengths(x: &[f64], y: &[f64]) -> Result<(), CorrError> {
    if x.len() != y.len() {
        return Err(CorrError::LengthMismatch { left: x.len(), right: y.len() });
    }
    if x.len() < 2 {
        return Err(CorrError::TooShort { len: x.len() });
    }
    Ok(())
}

/// Pearson's product-moment correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, CorrError> {
    check_lengths(x, y)?;
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        let dx = a - mx;
        let dy = b - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(CorrError::ZeroVariance);
    }
    let r = sxy / (math::sqrt(sxx) * math::sqrt(syy));
    Ok(r.clamp(-1.0, 1.0))
}

/// Average ranks (1-based), ties receive the mean of their positions.
fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(core::cmp::Ordering::Equal));
    let mut ranks = alloc::vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j + 2) as f64 / 2.0; // mean of 1-based positions i+1..=j+1
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman's rho: Pearson on average ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64, CorrError> {
    check_lengths(x, y)?;
    pearson(&average_ranks(x), &average_ranks(y))
}

/// Kendall's tau-b with tie correction.
pub fn kendall_tau_b(x: &[f64], y: &[f64]) -> Result<f64, CorrError> {
    check_lengths(x, y)?;
    let n = x.len();
    let mut concordant = 0i64;
    let mut discordant = 0i64;
    for i in 0..n {
        for j in (i + 1)..n {
            let cx = x[i].partial_cmp(&x[j]).unwrap_or(core::cmp::Ordering::Equal);
            let cy = y[i].partial_cmp(&y[j]).unwrap_or(core::cmp::Ordering::Equal);
            use core::cmp::Ordering::Equal;
            if cx == Equal || cy == Equal {
                continue;
            }
            if cx == cy {
                concordant += 1;
            } else {
                discordant += 1;
            }
        }
    }
    let n0 = (n * (n - 1) / 2) as i64;
    let denom_x = n0 - count_tie_pairs(x);
    let denom_y = n0 - count_tie_pairs(y);
    if denom_x == 0 || denom_y == 0 {
        return Err(CorrError::ZeroVariance);
    }
    let tau = (concordant - discordant) as f64 / math::sqrt(denom_x as f64 * denom_y as f64);
    Ok(tau.clamp(-1.0, 1.0))
}

/// Number of within-group pairs among tied values.
fn count_tie_pairs(values: &[f64]) -> i64 {
    let mut sorted: Vec<f64> = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    let mut pairs = 0i64;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let t = (j - i + 1) as i64;
        pairs += t * (t - 1) / 2;
        i = j + 1;
    }
    pairs
}

/// Sorting direction for rank induction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankDirection {
    HigherBetter,
    LowerBetter,
}

/// Total-order ranks 1..=|Q| over per-query scores; ties broken by ascending
/// query id so the ranking is deterministic.
pub fn ranks_from_scores(
    scores: &BTreeMap<String, f64>,
    direction: RankDirection,
) -> BTreeMap<String, usize> {
    let mut items: Vec<(&String, f64)> = scores.iter().map(|(q, &v)| (q, v)).collect();
    items.sort_by(|(qa, va), (qb, vb)| {
        let by_score = match direction {
            RankDirection::HigherBetter => vb.partial_cmp(va),
            RankDirection::LowerBetter => va.partial_cmp(vb),
        }
        .unwrap_or(core::cmp::Ordering::Equal);
        by_score.then_with(|| qa.cmp(qb))
    });
    items
        .into_iter()
        .enumerate()
        .map(|(i, (q, _))| (q.clone(), i + 1))
        .collect()
}

/// Per-system, per-query effectiveness values for one measure.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalTable {
    measure: String,
    values: BTreeMap<(String, String), f64>,
}

impl EvalTable {
    pub fn new(measure: impl Into<String>) -> Self {
        EvalTable { measure: measure.into(), values: BTreeMap::new() }
    }

    pub fn measure(&self) -> &str {
        &self.measure
    }

    pub fn set(&mut self, system: &str, query_id: &str, value: f64) {
        self.values.insert((String::from(system), String::from(query_id)), value);
    }

    pub fn get(&self, system: &str, query_id: &str) -> Option<f64> {
        self.values.get(&(String::from(system), String::from(query_id))).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str, f64)> {
        self.values.iter().map(|((s, q), &v)| (s.as_str(), q.as_str(), v))
    }

    pub fn systems(&self) -> BTreeSet<&str> {
        self.values.keys().map(|(s, _)| s.as_str()).collect()
    }

    pub fn query_ids(&self) -> BTreeSet<&str> {
        self.values.keys().map(|(_, q)| q.as_str()).collect()
    }

    /// query -> value map for one system.
    pub fn scores_for_system(&self, system: &str) -> BTreeMap<String, f64> {
        self.values
            .iter()
            .filter(|((s, _), _)| s == system)
            .map(|((_, q), &v)| (q.clone(), v))
            .collect()
    }
}

/// (predictor, system, query) -> sARE.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SareTable {
    values: BTreeMap<(String, String, String), f64>,
}

impl SareTable {
    /// Insert one value; used when loading a serialized table back.
    pub fn insert(&mut self, predictor: &str, system: &str, query_id: &str, value: f64) {
        self.values.insert(
            (String::from(predictor), String::from(system), String::from(query_id)),
            value,
        );
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, predictor: &str, system: &str, query_id: &str) -> Option<f64> {
        self.values
            .get(&(String::from(predictor), String::from(system), String::from(query_id)))
            .copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str, &str, f64)> {
        self.values
            .iter()
            .map(|((p, s, q), &v)| (p.as_str(), s.as_str(), q.as_str(), v))
    }

    /// Mean sARE over queries for one (predictor, system) cell.
    pub fn smare(&self, predictor: &str, system: &str) -> Option<f64> {
        let vals: Vec<f64> = self
            .values
            .iter()
            .filter(|((p, s, _), _)| p == predictor && s == system)
            .map(|(_, &v)| v)
            .collect();
        if vals.is_empty() {
            None
        } else {
            Some(vals.iter().sum::<f64>() / vals.len() as f64)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EvalError {
    /// (predictor, system, query) cells present on one side but not the other.
    GridMismatch { missing: Vec<String> },
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::GridMismatch { missing } => {
                write!(f, "prediction/eval grids do not align; missing cells: ")?;
                for (i, m) in missing.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{m}")?;
                }
                Ok(())
            }
        }
    }
}

impl core::error::Error for EvalError {}

/// Build the sARE table: per (predictor, system), rank queries by the measure
/// and by the prediction (both higher-better) and emit |R^e - R^p| / |Q|.
pub fn sare_table(eval: &EvalTable, pred: &PredictionTable) -> Result<SareTable, EvalError> {
    let mut missing = Vec::new();
    for (predictor, system, query) in pred.keys() {
        if eval.get(system, query).is_none() {
            missing.push(alloc::format!("eval({system}, {query}) for {predictor}"));
        }
    }
    for predictor in pred.predictors() {
        for (system, query, _) in eval.iter() {
            if pred.get(&predictor, system, query).is_none() {
                missing.push(alloc::format!("prediction({predictor}, {system}, {query})"));
            }
        }
    }
    if !missing.is_empty() {
        missing.sort();
        return Err(EvalError::GridMismatch { missing });
    }

    let mut out = SareTable::default();
    for predictor in pred.predictors() {
        for system in eval.systems() {
            let measure_scores = eval.scores_for_system(system);
            let num_queries = measure_scores.len() as f64;
            let pred_scores: BTreeMap<String, f64> = measure_scores
                .keys()
                .map(|q| (q.clone(), pred.get(&predictor, system, q).expect("grid checked")))
                .collect();
            let measure_ranks = ranks_from_scores(&measure_scores, RankDirection::HigherBetter);
            let pred_ranks = ranks_from_scores(&pred_scores, RankDirection::HigherBetter);
            for (query, &re) in &measure_ranks {
                let rp = pred_ranks[query];
                let sare = (re as f64 - rp as f64).abs() / num_queries;
                out.values.insert(
                    (predictor.clone(), String::from(system), query.clone()),
                    sare,
                );
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::run::RunEntry;
    use alloc::string::ToString;
    use alloc::vec;

    fn ranked(ids: &[&str]) -> RankedList {
        RankedList::new(
            ids.iter()
                .enumerate()
                .map(|(i, id)| RunEntry { doc_id: id.to_string(), score: -(i as f64) })
                .collect(),
        )
    }

    #[test]
    fn ndcg_ideal_list_is_one() {
        let mut qrels = Qrels::new();
        qrels.set("q", "d1", 1);
        let v = ndcg_at_k(&ranked(&["d1", "d2"]), qrels.for_query("q"), 10, GainScheme::Linear);
        assert_eq!(v, 1.0);
    }

    #[test]
    fn ndcg_single_relevant_at_rank_two() {
        let mut qrels = Qrels::new();
        qrels.set("q", "d2", 1);
        let v = ndcg_at_k(&ranked(&["d1", "d2"]), qrels.for_query("q"), 10, GainScheme::Linear);
        assert!((v - 1.0 / 3.0f64.log2()).abs() < 1e-12);
        assert!((v - 0.63093).abs() < 1e-5);
    }

    #[test]
    fn ndcg_no_relevant_retrieved_is_zero() {
        let mut qrels = Qrels::new();
        qrels.set("q", "dx", 2);
        let v = ndcg_at_k(&ranked(&["d1", "d2"]), qrels.for_query("q"), 10, GainScheme::Linear);
        assert_eq!(v, 0.0);
    }

    #[test]
    fn ndcg_zero_when_no_positive_judgements() {
        let mut qrels = Qrels::new();
        qrels.set("q", "d1", 0);
        assert_eq!(
            ndcg_at_k(&ranked(&["d1"]), qrels.for_query("q"), 10, GainScheme::Linear),
            0.0
        );
        assert_eq!(qrels.queries_without_positives(), vec!["q"]);
    }

    #[test]
    fn ndcg_is_invariant_to_equal_grade_order() {
        let mut qrels = Qrels::new();
        qrels.set("q", "d1", 1);
        qrels.set("q", "d2", 1);
        let a = ndcg_at_k(&ranked(&["d1", "d2"]), qrels.for_query("q"), 10, GainScheme::Linear);
        let b = ndcg_at_k(&ranked(&["d2", "d1"]), qrels.for_query("q"), 10, GainScheme::Linear);
        assert_eq!(a, b);
    }

    #[test]
    fn ndcg_exponential_gain() {
        let mut qrels = Qrels::new();
        qrels.set("q", "d1", 2);
        qrels.set("q", "d2", 1);
        let v = ndcg_at_k(&ranked(&["d2", "d1"]), qrels.for_query("q"), 10, GainScheme::Exponential);
        let expected = (1.0 + 3.0 / 3.0f64.log2()) / (3.0 + 1.0 / 3.0f64.log2());
        assert!((v - expected).abs() < 1e-12);
    }

    #[test]
    fn pearson_closed_forms() {
        let x = [1.0, 2.0, 3.0];
        let y2 = [3.0, 5.0, 7.0]; // 2x + 1
        assert!((pearson(&x, &y2).unwrap() - 1.0).abs() < 1e-12);
        let yneg = [-1.0, -2.0, -3.0];
        assert!((pearson(&x, &yneg).unwrap() + 1.0).abs() < 1e-12);
        let y = [1.0, 3.0, 2.0];
        assert!((pearson(&x, &y).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn pearson_rejects_degenerate_input() {
        assert_eq!(pearson(&[1.0], &[1.0]), Err(CorrError::TooShort { len: 1 }));
        assert_eq!(
            pearson(&[1.0, 1.0], &[1.0, 2.0]),
            Err(CorrError::ZeroVariance)
        );
        assert_eq!(
            pearson(&[1.0, 2.0], &[1.0]),
            Err(CorrError::LengthMismatch { left: 2, right: 1 })
        );
    }

    #[test]
    fn pearson_affine_is_sign_of_slope() {
        let x = [0.3, -1.2, 4.5, 2.2, 0.0];
        let pos: Vec<f64> = x.iter().map(|v| 3.7 * v + 0.9).collect();
        let neg: Vec<f64> = x.iter().map(|v| -0.2 * v + 5.0).collect();
        assert!((pearson(&x, &pos).unwrap() - 1.0).abs() < 1e-12);
        assert!((pearson(&x, &neg).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn spearman_and_kendall_extremes() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let same = [10.0, 20.0, 30.0, 40.0];
        let rev = [4.0, 3.0, 2.0, 1.0];
        assert!((spearman(&x, &same).unwrap() - 1.0).abs() < 1e-12);
        assert!((kendall_tau_b(&x, &same).unwrap() - 1.0).abs() < 1e-12);
        assert!((spearman(&x, &rev).unwrap() + 1.0).abs() < 1e-12);
        assert!((kendall_tau_b(&x, &rev).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn kendall_hand_value() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [1.0, 3.0, 2.0, 4.0];
        assert!((kendall_tau_b(&x, &y).unwrap() - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn kendall_tau_b_with_ties() {
        // x has one tied pair: n0 = 6, tie pairs in x = 1
        let x = [1.0, 1.0, 2.0, 3.0];
        let y = [1.0, 2.0, 3.0, 4.0];
        // concordant = 5, discordant = 0, denom = sqrt(5 * 6)
        let expected = 5.0 / (5.0f64 * 6.0).sqrt();
        assert!((kendall_tau_b(&x, &y).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn all_tied_correlation_is_an_error() {
        let x = [2.0, 2.0, 2.0];
        let y = [1.0, 2.0, 3.0];
        assert_eq!(spearman(&x, &y), Err(CorrError::ZeroVariance));
        assert_eq!(kendall_tau_b(&x, &y), Err(CorrError::ZeroVariance));
    }

    #[test]
    fn spearman_uses_average_ranks_for_ties() {
        let x = [1.0, 1.0, 3.0];
        let ranks = average_ranks(&x);
        assert_eq!(ranks, vec![1.5, 1.5, 3.0]);
    }

    #[test]
    fn ranks_follow_direction_and_tiebreak() {
        let scores = BTreeMap::from([
            ("q1".to_string(), 0.9),
            ("q2".to_string(), 0.1),
        ]);
        let ranks = ranks_from_scores(&scores, RankDirection::HigherBetter);
        assert_eq!(ranks["q1"], 1);
        assert_eq!(ranks["q2"], 2);

        let tied = BTreeMap::from([
            ("q2".to_string(), 0.5),
            ("q1".to_string(), 0.5),
            ("q3".to_string(), 0.5),
        ]);
        let ranks = ranks_from_scores(&tied, RankDirection::HigherBetter);
        assert_eq!((ranks["q1"], ranks["q2"], ranks["q3"]), (1, 2, 3));
    }

    #[test]
    fn ranks_match_sort_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let scores: BTreeMap<String, f64> = (0..5)
            .map(|i| (alloc::format!("q{i}"), rng.gen::<f64>()))
            .collect();
        let ranks = ranks_from_scores(&scores, RankDirection::HigherBetter);
        let mut sorted: Vec<(&String, &f64)> = scores.iter().collect();
        sorted.sort_by(|(_, a), (_, b)| b.partial_cmp(a).unwrap());
        for (i, (q, _)) in sorted.iter().enumerate() {
            assert_eq!(ranks[*q], i + 1);
        }
        let lower = ranks_from_scores(&scores, RankDirection::LowerBetter);
        for (q, r) in &ranks {
            assert_eq!(lower[q], scores.len() + 1 - r);
        }
    }

    fn mini_grid(pred_scores: &[(&str, f64)]) -> (EvalTable, PredictionTable) {
        let mut eval = EvalTable::new("ndcg@10");
        let mut pred = PredictionTable::default();
        for (i, (q, p)) in pred_scores.iter().enumerate() {
            eval.set("sys", q, 1.0 - 0.1 * i as f64); // eval ranks q1 > q2 > ...
            pred.insert("p", "sys", q, *p).unwrap();
        }
        (eval, pred)
    }

    #[test]
    fn sare_zero_for_perfect_predictor() {
        let (eval, pred) = mini_grid(&[("q1", 0.9), ("q2", 0.8), ("q3", 0.2), ("q4", 0.1)]);
        let sare = sare_table(&eval, &pred).unwrap();
        for (_, _, _, v) in sare.iter() {
            assert_eq!(v, 0.0);
        }
        assert_eq!(sare.smare("p", "sys"), Some(0.0));
    }

    #[test]
    fn sare_reversed_ranking_hand_values() {
        let (eval, pred) = mini_grid(&[("q1", 0.1), ("q2", 0.2), ("q3", 0.8), ("q4", 0.9)]);
        let sare = sare_table(&eval, &pred).unwrap();
        assert_eq!(sare.get("p", "sys", "q1"), Some(0.75));
        assert_eq!(sare.get("p", "sys", "q2"), Some(0.25));
        assert_eq!(sare.get("p", "sys", "q3"), Some(0.25));
        assert_eq!(sare.get("p", "sys", "q4"), Some(0.75));
        assert_eq!(sare.smare("p", "sys"), Some(0.5));
    }

    #[test]
    fn sare_single_query_is_zero() {
        let (eval, pred) = mini_grid(&[("q1", 0.42)]);
        let sare = sare_table(&eval, &pred).unwrap();
        assert_eq!(sare.get("p", "sys", "q1"), Some(0.0));
    }

    #[test]
    fn sare_invariant_under_monotone_transform() {
        let (eval, pred) = mini_grid(&[("q1", 0.4), ("q2", 0.9), ("q3", 0.1), ("q4", 0.6)]);
        let mut transformed = PredictionTable::default();
        for (p, s, q, v) in pred.iter() {
            transformed.insert(p, s, q, (5.0 * v).exp() + 7.0).unwrap();
        }
        let a = sare_table(&eval, &pred).unwrap();
        let b = sare_table(&eval, &transformed).unwrap();
        for (p, s, q, v) in a.iter() {
            assert_eq!(b.get(p, s, q), Some(v));
        }
    }

    #[test]
    fn sare_grid_mismatch_lists_cells() {
        let mut eval = EvalTable::new("ndcg@10");
        eval.set("sys", "q1", 0.5);
        eval.set("sys", "q2", 0.6);
        let mut pred = PredictionTable::default();
        pred.insert("p", "sys", "q1", 0.1).unwrap();
        let err = sare_table(&eval, &pred).unwrap_err();
        let EvalError::GridMismatch { missing } = err;
        assert_eq!(missing, vec!["prediction(p, sys, q2)".to_string()]);
    }
}
