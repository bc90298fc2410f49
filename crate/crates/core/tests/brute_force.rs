//! Independent brute-force checks for the language-model machinery.
//!
//! Everything in here recomputes expected values with plain loops over the
//! raw token lists; nothing reuses the library's statistics or scoring paths.

use std::collections::BTreeMap;

use qpp_core::corpus::{build_stats, Document};
use qpp_core::lm;
use qpp_core::run::{RankedList, RunEntry};
use qpp_core::Query;

type Toks = Vec<String>;

fn toks(words: &[&str]) -> Toks {
    words.iter().map(|w| w.to_string()).collect()
}

/// Fixture: three short docs plus one padding doc.
fn fixture() -> Vec<(String, Toks)> {
    vec![
        ("d1".into(), toks(&["apple", "pie", "apple"])),
        ("d2".into(), toks(&["pie", "crust"])),
        ("d3".into(), toks(&["apple", "crust", "sugar", "sugar"])),
        ("d4".into(), toks(&["butter"])),
    ]
}

fn ranked(ids: &[&str]) -> RankedList {
    RankedList::new(
        ids.iter()
            .enumerate()
            .map(|(i, id)| RunEntry { doc_id: id.to_string(), score: -(i as f64) })
            .collect(),
    )
}

// -- brute-force pieces ------------------------------------------------------

fn bf_total_tokens(docs: &[(String, Toks)]) -> f64 {
    docs.iter().map(|(_, t)| t.len()).sum::<usize>() as f64
}

fn bf_cf(docs: &[(String, Toks)], term: &str) -> f64 {
    docs.iter()
        .map(|(_, t)| t.iter().filter(|w| *w == term).count())
        .sum::<usize>() as f64
}

fn bf_p_coll(docs: &[(String, Toks)], term: &str) -> f64 {
    let cf = bf_cf(docs, term);
    let total = bf_total_tokens(docs);
    if cf > 0.0 {
        cf / total
    } else {
        1.0 / (total + 1.0)
    }
}

fn bf_tf(docs: &[(String, Toks)], doc_id: &str, term: &str) -> f64 {
    docs.iter()
        .find(|(id, _)| id == doc_id)
        .map(|(_, t)| t.iter().filter(|w| *w == term).count())
        .unwrap() as f64
}

fn bf_doc_len(docs: &[(String, Toks)], doc_id: &str) -> f64 {
    docs.iter().find(|(id, _)| id == doc_id).map(|(_, t)| t.len()).unwrap() as f64
}

fn bf_p_dir(docs: &[(String, Toks)], term: &str, doc_id: &str, mu: f64) -> f64 {
    (bf_tf(docs, doc_id, term) + mu * bf_p_coll(docs, term))
        / (bf_doc_len(docs, doc_id) + mu)
}

fn bf_loglik(docs: &[(String, Toks)], query: &[&str], doc_id: &str, mu: f64) -> f64 {
    query.iter().map(|t| bf_p_dir(docs, t, doc_id, mu).ln()).sum()
}

/// RM1 over the given top docs: softmax-weighted mixture of smoothed doc
/// models over the union vocabulary, truncated to n_terms and renormalized.
fn bf_rm1(
    docs: &[(String, Toks)],
    query: &[&str],
    top: &[&str],
    mu: f64,
    n_terms: usize,
) -> BTreeMap<String, f64> {
    let logliks: Vec<f64> = top.iter().map(|d| bf_loglik(docs, query, d, mu)).collect();
    let max = logliks.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logliks.iter().map(|s| (s - max).exp()).collect();
    let z: f64 = exps.iter().sum();

    let mut union: Vec<String> = Vec::new();
    for d in top {
        for t in &docs.iter().find(|(id, _)| id == d).unwrap().1 {
            if !union.contains(t) {
                union.push(t.clone());
            }
        }
    }
    union.sort();

    let mut probs: Vec<(String, f64)> = union
        .into_iter()
        .map(|term| {
            let mass: f64 = top
                .iter()
                .zip(&exps)
                .map(|(d, e)| (e / z) * bf_p_dir(docs, &term, d, mu))
                .sum();
            (term, mass)
        })
        .collect();
    probs.sort_by(|(ta, pa), (tb, pb)| pb.partial_cmp(pa).unwrap().then(ta.cmp(tb)));
    probs.truncate(n_terms);
    let total: f64 = probs.iter().map(|(_, p)| p).sum();
    probs.into_iter().map(|(t, p)| (t, p / total)).collect()
}

// -- comparisons -------------------------------------------------------------

#[test]
fn rm1_matches_brute_force() {
    let docs = fixture();
    let stats = build_stats(docs.iter().map(|(id, t)| Document::new(id.clone(), t.clone()))).unwrap();
    let query = Query::new("q", toks(&["apple", "crust"]));
    let list = ranked(&["d1", "d2", "d3"]);

    for (mu, k, n_terms) in [(1.0, 3, 100), (10.0, 3, 100), (2.5, 2, 3), (1000.0, 3, 2)] {
        let rm = lm::rm1(&query, &list, &stats, mu, k, n_terms).unwrap();
        let top: Vec<&str> = ["d1", "d2", "d3"][..k].to_vec();
        let expected = bf_rm1(&docs, &["apple", "crust"], &top, mu, n_terms);
        assert_eq!(rm.len(), expected.len(), "vocab size for mu={mu} k={k}");
        for (term, p) in &expected {
            let got = rm.prob(term).unwrap_or(f64::NAN);
            assert!(
                (got - p).abs() < 1e-12,
                "P({term}|R) mu={mu} k={k}: got {got}, want {p}"
            );
        }
    }
}

#[test]
fn rerank_matches_brute_force_cross_entropy() {
    let docs = fixture();
    let stats = build_stats(docs.iter().map(|(id, t)| Document::new(id.clone(), t.clone()))).unwrap();
    let query = Query::new("q", toks(&["apple"]));
    let list = ranked(&["d1", "d2", "d3"]);
    let mu = 5.0;

    let rm = lm::rm1(&query, &list, &stats, mu, 3, 100).unwrap();
    let ids: Vec<String> = ["d1", "d2", "d3"].iter().map(|s| s.to_string()).collect();
    let reranked = lm::rerank_by_rm(&rm, &ids, &stats, mu).unwrap();

    // brute-force scores from the same rm, by direct formula
    let mut expected: Vec<(String, f64)> = ids
        .iter()
        .map(|d| {
            let score: f64 = rm
                .iter()
                .map(|(term, p)| p * bf_p_dir(&docs, term, d, mu).ln())
                .sum();
            (d.clone(), score)
        })
        .collect();
    expected.sort_by(|(da, sa), (db, sb)| sb.partial_cmp(sa).unwrap().then(da.cmp(db)));

    for ((gd, gs), (ed, es)) in reranked.iter().zip(&expected) {
        assert_eq!(gd, ed);
        assert!((gs - es).abs() < 1e-12);
    }
}

#[test]
fn clarity_matches_brute_force_kl() {
    let docs = fixture();
    let stats = build_stats(docs.iter().map(|(id, t)| Document::new(id.clone(), t.clone()))).unwrap();
    let query = Query::new("q", toks(&["sugar", "pie"]));
    let list = ranked(&["d3", "d1", "d2"]);
    let (k, n_terms, mu) = (3, 100, 8.0);

    let got = qpp_core::predictors::clarity(&query, &list, &stats, k, n_terms, mu).unwrap();
    let rm = bf_rm1(&docs, &["sugar", "pie"], &["d3", "d1", "d2"], mu, n_terms);
    let expected: f64 = rm
        .iter()
        .map(|(term, p)| p * (p / bf_p_coll(&docs, term)).ln())
        .sum();
    assert!((got - expected).abs() < 1e-12, "clarity {got} vs {expected}");
    assert!(got >= -1e-9);
}
