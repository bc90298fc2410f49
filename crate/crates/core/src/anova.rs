//! Fixed-effects factorial ANOVA for balanced crossed designs, with
//! omega-squared strength-of-association and marginal-mean confidence
//! intervals.
//!
//! Two canned models operate on sARE tables: one explains sARE by predictor,
//! run type and collection (with the run-type x collection interaction), the
//! other works within a single collection and crosses predictor, topic and
//! run type with all first-order interactions.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::evaluation::SareTable;
use crate::math;
use crate::run::RunType;
use crate::special;

#[derive(Debug, Clone, PartialEq)]
pub enum AnovaError {
    WrongArity { expected: usize, got: usize },
    UnknownFactor(String),
    EmptyDataset,
    /// Cell replicate counts differ (or a cell is empty).
    Unbalanced(String),
    /// No residual degrees of freedom left.
    SaturatedModel,
    /// A sARE record references a system without catalog labels.
    MissingSystemLabel(String),
    /// The verbatim omega-squared expression is undefined for F <= 1.
    OmegaUndefined { f: f64 },
}

impl fmt::Display for AnovaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnovaError::WrongArity { expected, got } => {
                write!(f, "observation supplies {got} factor levels, expected {expected}")
            }
            AnovaError::UnknownFactor(name) => write!(f, "unknown factor {name:?}"),
            AnovaError::EmptyDataset => write!(f, "no observations"),
            AnovaError::Unbalanced(detail) => write!(f, "unbalanced design: {detail}"),
            AnovaError::SaturatedModel => {
                write!(f, "saturated model: no residual degrees of freedom")
            }
            AnovaError::MissingSystemLabel(s) => {
                write!(f, "system {s:?} has no run-type/collection label")
            }
            AnovaError::OmegaUndefined { f: fval } => {
                write!(f, "omega-squared (verbatim variant) undefined for F = {fval}")
            }
        }
    }
}

impl core::error::Error for AnovaError {}

/// Observations tagged with one level per factor.
#[derive(Debug, Clone, Default)]
pub struct FactorialDataset {
    factor_names: Vec<String>,
    levels: Vec<Vec<String>>,
    level_index: Vec<BTreeMap<String, usize>>,
    observations: Vec<(Vec<usize>, f64)>,
}

impl FactorialDataset {
    pub fn new(factor_names: &[&str]) -> Self {
        FactorialDataset {
            factor_names: factor_names.iter().map(|s| s.to_string()).collect(),
            levels: factor_names.iter().map(|_| Vec::new()).collect(),
            level_index: factor_names.iter().map(|_| BTreeMap::new()).collect(),
            observations: Vec::new(),
        }
    }

    pub fn push(&mut self, levels: &[&str], response: f64) -> Result<(), AnovaError> {
        if levels.len() != self.factor_names.len() {
            return Err(AnovaError::WrongArity {
                expected: self.factor_names.len(),
                got: levels.len(),
            });
        }
        let idx = levels
            .iter()
            .enumerate()
            .map(|(f, level)| {
                *self.level_index[f].entry(level.to_string()).or_insert_with(|| {
                    self.levels[f].push(level.to_string());
                    self.levels[f].len() - 1
                })
            })
            .collect();
        self.observations.push((idx, response));
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn factor_names(&self) -> &[String] {
        &self.factor_names
    }

    pub fn num_levels(&self, factor: &str) -> Option<usize> {
        let f = self.factor_index(factor)?;
        Some(self.levels[f].len())
    }

    fn factor_index(&self, name: &str) -> Option<usize> {
        self.factor_names.iter().position(|n| n == name)
    }

    /// Level names per factor in canonical (lexicographic) order plus the
    /// registration-order -> canonical-order remap. Makes every downstream
    /// output independent of observation order.
    fn canonical_levels(&self) -> (Vec<Vec<String>>, Vec<Vec<usize>>) {
        let mut sorted = Vec::with_capacity(self.levels.len());
        let mut remap = Vec::with_capacity(self.levels.len());
        for levels in &self.levels {
            let mut names: Vec<String> = levels.clone();
            names.sort();
            let map: Vec<usize> = levels
                .iter()
                .map(|l| names.binary_search(l).expect("level registered"))
                .collect();
            sorted.push(names);
            remap.push(map);
        }
        (sorted, remap)
    }

    /// Observations remapped to canonical level indexes and sorted, so every
    /// float accumulation happens in the same order no matter how the data
    /// arrived.
    fn canonical_observations(&self, remap: &[Vec<usize>]) -> Vec<(Vec<usize>, f64)> {
        let mut obs: Vec<(Vec<usize>, f64)> = self
            .observations
            .iter()
            .map(|(idx, y)| {
                let cell: Vec<usize> =
                    idx.iter().enumerate().map(|(f, &l)| remap[f][l]).collect();
                (cell, *y)
            })
            .collect();
        obs.sort_by(|(ca, ya), (cb, yb)| ca.cmp(cb).then_with(|| ya.total_cmp(yb)));
        obs
    }
}

/// A model term: a main effect or a two-factor interaction, by factor name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Main(String),
    Interaction(String, String),
}

impl Term {
    pub fn main(factor: &str) -> Self {
        Term::Main(factor.to_string())
    }

    pub fn interaction(a: &str, b: &str) -> Self {
        Term::Interaction(a.to_string(), b.to_string())
    }

    pub fn label(&self) -> String {
        match self {
            Term::Main(a) => a.clone(),
            Term::Interaction(a, b) => alloc::format!("{a}*{b}"),
        }
    }
}

/// One fitted effect.
#[derive(Debug, Clone, PartialEq)]
pub struct AnovaRow {
    pub term: String,
    pub df: u64,
    pub ss: f64,
    pub ms: f64,
    pub f: f64,
    pub p: f64,
    pub omega2: f64,
}

/// The full decomposition: per-term rows plus residual and total.
#[derive(Debug, Clone, PartialEq)]
pub struct AnovaTable {
    pub grand_mean: f64,
    pub rows: Vec<AnovaRow>,
    pub residual_df: u64,
    pub residual_ss: f64,
    pub residual_ms: f64,
    pub total_df: u64,
    pub total_ss: f64,
    pub n: usize,
}

impl AnovaTable {
    pub fn row(&self, term: &str) -> Option<&AnovaRow> {
        self.rows.iter().find(|r| r.term == term)
    }
}

/// Which omega-squared estimator to report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OmegaVariant {
    /// df*(F-1) / (df*(F-1) + N), clamped to [0, 1].
    #[default]
    Standard,
    /// The verbatim expression df*F / (df*(F-1)*N); undefined for F <= 1.
    Verbatim,
}

/// Omega-squared strength of association for one effect.
pub fn omega_squared(df: u64, f: f64, n: usize, variant: OmegaVariant) -> Result<f64, AnovaError> {
    let df = df as f64;
    let n = n as f64;
    match variant {
        OmegaVariant::Standard => {
            if f.is_infinite() {
                return Ok(1.0);
            }
            let num = df * (f - 1.0);
            Ok((num / (num + n)).clamp(0.0, 1.0))
        }
        OmegaVariant::Verbatim => {
            if f <= 1.0 {
                return Err(AnovaError::OmegaUndefined { f });
            }
            Ok(df * f / (df * (f - 1.0) * n))
        }
    }
}

/// Effect-size classes with the 6% / 14% thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SoaClass {
    Small,
    Medium,
    Large,
}

impl SoaClass {
    pub fn as_str(self) -> &'static str {
        match self {
            SoaClass::Small => "small",
            SoaClass::Medium => "medium",
            SoaClass::Large => "large",
        }
    }
}

impl fmt::Display for SoaClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn soa_class(omega2: f64) -> SoaClass {
    if omega2 < 0.06 {
        SoaClass::Small
    } else if omega2 < 0.14 {
        SoaClass::Medium
    } else {
        SoaClass::Large
    }
}

/// Classical cell-means sums-of-squares decomposition on a balanced design.
///
/// The residual is everything the requested terms do not explain. Designs
/// whose full factor cross has unequal (or empty) cells are rejected.
pub fn fit_factorial(data: &FactorialDataset, terms: &[Term]) -> Result<AnovaTable, AnovaError> {
    if data.is_empty() {
        return Err(AnovaError::EmptyDataset);
    }
    let (levels, remap) = data.canonical_levels();
    let num_factors = levels.len();
    let observations = data.canonical_observations(&remap);

    // balance: every cell of the full cross must hold the same count >= 1
    let mut cell_counts: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for (cell, _) in &observations {
        *cell_counts.entry(cell.clone()).or_insert(0) += 1;
    }
    let num_cells: usize = levels.iter().map(|l| l.len().max(1)).product();
    if cell_counts.len() != num_cells {
        return Err(AnovaError::Unbalanced(alloc::format!(
            "{} of {} cells are empty",
            num_cells - cell_counts.len(),
            num_cells
        )));
    }
    let first = *cell_counts.values().next().expect("non-empty");
    if cell_counts.values().any(|&c| c != first) {
        return Err(AnovaError::Unbalanced(
            "cells have unequal replicate counts".to_string(),
        ));
    }

    let n = observations.len();
    let grand_mean = observations.iter().map(|(_, y)| y).sum::<f64>() / n as f64;
    let total_ss: f64 = observations
        .iter()
        .map(|(_, y)| {
            let d = y - grand_mean;
            d * d
        })
        .sum();
    let response_scale: f64 = observations.iter().map(|(_, y)| y * y).sum();
    // response constant up to float rounding: report an all-zero table
    let constant_response = total_ss <= response_scale * 1e-24;
    let total_ss = if constant_response { 0.0 } else { total_ss };

    // marginal means per factor and per requested factor pair
    let mut level_sums: Vec<Vec<f64>> = levels.iter().map(|l| alloc::vec![0.0; l.len()]).collect();
    let mut level_counts: Vec<Vec<usize>> =
        levels.iter().map(|l| alloc::vec![0usize; l.len()]).collect();
    for (cell, y) in &observations {
        for f in 0..num_factors {
            level_sums[f][cell[f]] += y;
            level_counts[f][cell[f]] += 1;
        }
    }
    let level_means: Vec<Vec<f64>> = level_sums
        .iter()
        .zip(&level_counts)
        .map(|(sums, counts)| {
            sums.iter().zip(counts).map(|(s, &c)| s / c as f64).collect()
        })
        .collect();

    let mut rows = Vec::with_capacity(terms.len());
    let mut explained_ss = 0.0;
    let mut explained_df = 0u64;
    for term in terms {
        let (ss, df) = match term {
            Term::Main(name) => {
                let f = data
                    .factor_index(name)
                    .ok_or_else(|| AnovaError::UnknownFactor(name.clone()))?;
                let ss = level_means[f]
                    .iter()
                    .zip(&level_counts[f])
                    .map(|(&mean, &cnt)| {
                        let d = mean - grand_mean;
                        cnt as f64 * d * d
                    })
                    .sum();
                (ss, levels[f].len() as u64 - 1)
            }
            Term::Interaction(a, b) => {
                let fa = data
                    .factor_index(a)
                    .ok_or_else(|| AnovaError::UnknownFactor(a.clone()))?;
                let fb = data
                    .factor_index(b)
                    .ok_or_else(|| AnovaError::UnknownFactor(b.clone()))?;
                let mut cell_sums: BTreeMap<(usize, usize), (f64, usize)> = BTreeMap::new();
                for (cell, y) in &observations {
                    let key = (cell[fa], cell[fb]);
                    let e = cell_sums.entry(key).or_insert((0.0, 0));
                    e.0 += y;
                    e.1 += 1;
                }
                let ss = cell_sums
                    .iter()
                    .map(|(&(la, lb), &(sum, cnt))| {
                        let cell_mean = sum / cnt as f64;
                        let d = cell_mean - level_means[fa][la] - level_means[fb][lb] + grand_mean;
                        cnt as f64 * d * d
                    })
                    .sum();
                let df = (levels[fa].len() as u64 - 1) * (levels[fb].len() as u64 - 1);
                (ss, df)
            }
        };
        let ss = if constant_response { 0.0 } else { ss };
        explained_ss += ss;
        explained_df += df;
        rows.push(AnovaRow {
            term: term.label(),
            df,
            ss,
            ms: if df > 0 { ss / df as f64 } else { 0.0 },
            f: 0.0,
            p: 1.0,
            omega2: 0.0,
        });
    }

    let total_df = n as u64 - 1;
    if explained_df >= total_df {
        return Err(AnovaError::SaturatedModel);
    }
    let residual_df = total_df - explained_df;
    let residual_ss = if constant_response {
        0.0
    } else {
        (total_ss - explained_ss).max(0.0)
    };
    let residual_ms = residual_ss / residual_df as f64;

    let zero_floor = total_ss * 1e-14;
    for row in &mut rows {
        if row.df == 0 {
            continue; // single-level factor: no testable effect
        }
        row.f = if residual_ss > zero_floor {
            row.ms / residual_ms
        } else if row.ss <= zero_floor {
            0.0 // 0/0: no variance anywhere, reported as no effect
        } else {
            f64::INFINITY
        };
        row.p = if row.f.is_infinite() {
            0.0
        } else if row.f <= 0.0 {
            1.0
        } else {
            special::f_survival(row.f, row.df as f64, residual_df as f64)
        };
        row.omega2 =
            omega_squared(row.df, row.f, n, OmegaVariant::Standard).expect("standard is total");
    }

    Ok(AnovaTable {
        grand_mean,
        rows,
        residual_df,
        residual_ss,
        residual_ms,
        total_df,
        total_ss,
        n,
    })
}

/// System labels the sARE models need: run type and collection per system.
#[derive(Debug, Clone, Default)]
pub struct SystemLabels {
    labels: BTreeMap<String, (RunType, String)>,
}

impl SystemLabels {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, system: &str, run_type: RunType, collection: &str) {
        self.labels
            .insert(system.to_string(), (run_type, collection.to_string()));
    }

    pub fn get(&self, system: &str) -> Option<&(RunType, String)> {
        self.labels.get(system)
    }
}

pub const FACTOR_PREDICTOR: &str = "predictor";
pub const FACTOR_RUN_TYPE: &str = "run_type";
pub const FACTOR_COLLECTION: &str = "collection";
pub const FACTOR_TOPIC: &str = "topic";

/// Arrange a sARE table as (predictor, run type, collection) observations.
pub fn sare_dataset_md1(
    sare: &SareTable,
    labels: &SystemLabels,
) -> Result<FactorialDataset, AnovaError> {
    let mut data =
        FactorialDataset::new(&[FACTOR_PREDICTOR, FACTOR_RUN_TYPE, FACTOR_COLLECTION]);
    for (predictor, system, _query, value) in sare.iter() {
        let (run_type, collection) = labels
            .get(system)
            .ok_or_else(|| AnovaError::MissingSystemLabel(system.to_string()))?;
        data.push(&[predictor, run_type.as_str(), collection], value)?;
    }
    Ok(data)
}

/// Model: sARE ~ predictor + run type + collection + (run type x collection).
pub fn fit_md1(sare: &SareTable, labels: &SystemLabels) -> Result<AnovaTable, AnovaError> {
    let data = sare_dataset_md1(sare, labels)?;
    fit_factorial(
        &data,
        &[
            Term::main(FACTOR_PREDICTOR),
            Term::main(FACTOR_RUN_TYPE),
            Term::main(FACTOR_COLLECTION),
            Term::interaction(FACTOR_RUN_TYPE, FACTOR_COLLECTION),
        ],
    )
}

/// Arrange a single-collection sARE table as (predictor, topic, run type)
/// observations.
pub fn sare_dataset_md2(
    sare: &SareTable,
    labels: &SystemLabels,
) -> Result<FactorialDataset, AnovaError> {
    let mut data = FactorialDataset::new(&[FACTOR_PREDICTOR, FACTOR_TOPIC, FACTOR_RUN_TYPE]);
    for (predictor, system, query, value) in sare.iter() {
        let (run_type, _) = labels
            .get(system)
            .ok_or_else(|| AnovaError::MissingSystemLabel(system.to_string()))?;
        data.push(&[predictor, query, run_type.as_str()], value)?;
    }
    Ok(data)
}

/// Model: sARE ~ predictor + topic + run type + all first-order interactions.
pub fn fit_md2(sare: &SareTable, labels: &SystemLabels) -> Result<AnovaTable, AnovaError> {
    let data = sare_dataset_md2(sare, labels)?;
    fit_factorial(
        &data,
        &[
            Term::main(FACTOR_PREDICTOR),
            Term::main(FACTOR_TOPIC),
            Term::main(FACTOR_RUN_TYPE),
            Term::interaction(FACTOR_PREDICTOR, FACTOR_TOPIC),
            Term::interaction(FACTOR_PREDICTOR, FACTOR_RUN_TYPE),
            Term::interaction(FACTOR_TOPIC, FACTOR_RUN_TYPE),
        ],
    )
}

/// A marginal mean with its t confidence interval.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalMean {
    /// One level name per selected factor.
    pub levels: Vec<String>,
    pub n: usize,
    pub mean: f64,
    pub lo: f64,
    pub hi: f64,
}

/// Per-level means for one factor (or one factor pair) with
/// mean +/- t_{(1+confidence)/2, df_res} * sqrt(MS_res / n_level) intervals.
pub fn marginal_means_ci(
    data: &FactorialDataset,
    fit: &AnovaTable,
    factors: &[&str],
    confidence: f64,
) -> Result<Vec<MarginalMean>, AnovaError> {
    assert!(
        factors.len() == 1 || factors.len() == 2,
        "one factor or a factor pair"
    );
    let idx: Vec<usize> = factors
        .iter()
        .map(|name| {
            data.factor_index(name)
                .ok_or_else(|| AnovaError::UnknownFactor(name.to_string()))
        })
        .collect::<Result<_, _>>()?;
    let (levels, remap) = data.canonical_levels();
    let observations = data.canonical_observations(&remap);

    let mut groups: BTreeMap<Vec<usize>, (f64, usize)> = BTreeMap::new();
    for (cell, y) in &observations {
        let key: Vec<usize> = idx.iter().map(|&f| cell[f]).collect();
        let e = groups.entry(key).or_insert((0.0, 0));
        e.0 += y;
        e.1 += 1;
    }

    let t = special::t_quantile((1.0 + confidence) / 2.0, fit.residual_df as f64);
    Ok(groups
        .into_iter()
        .map(|(key, (sum, count))| {
            let mean = sum / count as f64;
            let half = t * math::sqrt(fit.residual_ms / count as f64);
            MarginalMean {
                levels: key
                    .iter()
                    .zip(&idx)
                    .map(|(&l, &f)| levels[f][l].clone())
                    .collect(),
                n: count,
                mean,
                lo: mean - half,
                hi: mean + half,
            }
        })
        .collect())
}
