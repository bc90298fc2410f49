//! The predictor roster file: one predictor instantiation per line.
//!
//! ```text
//! # kind [key=value ...]
//! idf agg=avg
//! var agg=max variant=plain
//! scs
//! clarity k=100 n_terms=100 mu=1000
//! nqc k=100 mu=1000
//! uef base=wig k=100 n_terms=100 mu=1000 name=uef-wig-100
//! ```
//!
//! `name=` overrides the derived label; every name must be unique.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};

use qpp_core::predictors::{
    default_roster, Aggregation, IdfVariant, Predictor, PredictorSpec, UefBase, DEFAULT_K,
    DEFAULT_MU, DEFAULT_RM_TERMS, DEFAULT_WIG_K,
};

struct Params<'a> {
    line: usize,
    kv: BTreeMap<&'a str, &'a str>,
}

impl<'a> Params<'a> {
    fn take(&mut self, key: &str) -> Option<&'a str> {
        self.kv.remove(key)
    }

    fn agg(&mut self) -> Result<Aggregation> {
        match self.take("agg") {
            Some("avg") | Some("mean") => Ok(Aggregation::Mean),
            Some("max") => Ok(Aggregation::Max),
            Some(other) => bail!("line {}: unknown agg {:?} (avg or max)", self.line, other),
            None => bail!("line {}: pre-retrieval spec needs agg=avg|max", self.line),
        }
    }

    fn variant(&mut self) -> Result<IdfVariant> {
        match self.take("variant") {
            None | Some("smoothed") => Ok(IdfVariant::Smoothed),
            Some("plain") => Ok(IdfVariant::Plain),
            Some(other) => bail!("line {}: unknown idf variant {:?}", self.line, other),
        }
    }

    fn usize_or(&mut self, key: &str, default: usize) -> Result<usize> {
        match self.take(key) {
            None => Ok(default),
            Some(v) => {
                let n: usize = v
                    .parse()
                    .map_err(|_| anyhow::anyhow!("line {}: bad {key}={v:?}", self.line))?;
                if n == 0 {
                    bail!("line {}: {key} must be >= 1", self.line);
                }
                Ok(n)
            }
        }
    }

    fn f64_or(&mut self, key: &str, default: f64) -> Result<f64> {
        match self.take(key) {
            None => Ok(default),
            Some(v) => {
                let x: f64 = v
                    .parse()
                    .map_err(|_| anyhow::anyhow!("line {}: bad {key}={v:?}", self.line))?;
                if x <= 0.0 {
                    bail!("line {}: {key} must be positive", self.line);
                }
                Ok(x)
            }
        }
    }

    fn finish(self) -> Result<()> {
        if let Some(key) = self.kv.keys().next() {
            bail!("line {}: unknown parameter {key:?}", self.line);
        }
        Ok(())
    }
}

fn parse_line(lineno: usize, line: &str) -> Result<PredictorSpec> {
    let mut tokens = line.split_whitespace();
    let kind = tokens.next().expect("caller skips blank lines");
    let mut kv = BTreeMap::new();
    for tok in tokens {
        let Some((k, v)) = tok.split_once('=') else {
            bail!("line {lineno}: expected key=value, got {tok:?}");
        };
        if kv.insert(k, v).is_some() {
            bail!("line {lineno}: duplicate parameter {k:?}");
        }
    }
    let mut params = Params { line: lineno, kv };
    let name = params.take("name").map(str::to_string);

    let predictor = match kind {
        "idf" => Predictor::Idf { agg: params.agg()?, variant: params.variant()? },
        "ictf" => Predictor::Ictf { agg: params.agg()? },
        "scq" => Predictor::Scq { agg: params.agg()? },
        "var" => Predictor::Var { agg: params.agg()?, variant: params.variant()? },
        "scs" => Predictor::Scs,
        "clarity" => Predictor::Clarity {
            k: params.usize_or("k", DEFAULT_K)?,
            n_terms: params.usize_or("n_terms", DEFAULT_RM_TERMS)?,
            mu: params.f64_or("mu", DEFAULT_MU)?,
        },
        "nqc" => Predictor::Nqc {
            k: params.usize_or("k", DEFAULT_K)?,
            mu: params.f64_or("mu", DEFAULT_MU)?,
        },
        "wig" => Predictor::Wig {
            k: params.usize_or("k", DEFAULT_WIG_K)?,
            mu: params.f64_or("mu", DEFAULT_MU)?,
        },
        "smv" => Predictor::Smv {
            k: params.usize_or("k", DEFAULT_K)?,
            mu: params.f64_or("mu", DEFAULT_MU)?,
        },
        "uef" => {
            let base = match params.take("base") {
                Some("clarity") => UefBase::Clarity,
                Some("nqc") => UefBase::Nqc,
                Some("wig") => UefBase::Wig,
                Some("smv") => UefBase::Smv,
                Some(other) => bail!("line {lineno}: unknown uef base {other:?}"),
                None => bail!("line {lineno}: uef needs base=clarity|nqc|wig|smv"),
            };
            Predictor::Uef {
                base,
                k: params.usize_or("k", DEFAULT_K)?,
                n_terms: params.usize_or("n_terms", DEFAULT_RM_TERMS)?,
                mu: params.f64_or("mu", DEFAULT_MU)?,
            }
        }
        other => bail!("line {lineno}: unknown predictor kind {other:?}"),
    };
    params.finish()?;
    Ok(match name {
        Some(n) => PredictorSpec::named(n, predictor),
        None => PredictorSpec::new(predictor),
    })
}

/// Parse a roster file; names must be unique.
pub fn parse_roster(path: &Path) -> Result<Vec<PredictorSpec>> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading roster {}", path.display()))?;
    let mut specs = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        specs.push(parse_line(idx + 1, line).with_context(|| path.display().to_string())?);
    }
    if specs.is_empty() {
        bail!("{}: roster lists no predictors", path.display());
    }
    let mut seen = std::collections::BTreeSet::new();
    for spec in &specs {
        if !seen.insert(spec.name.clone()) {
            bail!("{}: duplicate predictor name {:?}", path.display(), spec.name);
        }
    }
    Ok(specs)
}

/// The bundled default roster (9 pre-retrieval + 8 post-retrieval specs).
pub fn bundled_roster() -> Vec<PredictorSpec> {
    default_roster()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_roster(contents: &str) -> tempfile::NamedTempFile {
        use std::io::Write;
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn parses_full_roster() {
        let f = write_roster(
            "# comment\n\
             idf agg=avg\n\
             idf agg=max\n\
             var agg=max variant=plain\n\
             scs\n\
             clarity k=50 n_terms=20 mu=500\n\
             wig\n\
             uef base=nqc name=uef-nqc-default\n",
        );
        let roster = parse_roster(f.path()).unwrap();
        assert_eq!(roster.len(), 7);
        assert_eq!(roster[0].name, "idf-avg");
        assert_eq!(
            roster[4].predictor,
            Predictor::Clarity { k: 50, n_terms: 20, mu: 500.0 }
        );
        assert_eq!(roster[5].predictor, Predictor::Wig { k: DEFAULT_WIG_K, mu: DEFAULT_MU });
        assert_eq!(roster[6].name, "uef-nqc-default");
    }

    #[test]
    fn rejects_bad_lines() {
        for (bad, needle) in [
            ("idf\n", "agg"),
            ("idf agg=sum\n", "unknown agg"),
            ("uef k=10\n", "base"),
            ("nqc k=0\n", ">= 1"),
            ("clarity mu=-3\n", "positive"),
            ("scs bogus=1\n", "unknown parameter"),
            ("frobnicate\n", "unknown predictor kind"),
            ("idf agg=avg agg=max\n", "duplicate parameter"),
            ("scs\nscs\n", "duplicate predictor name"),
        ] {
            let f = write_roster(bad);
            let err = parse_roster(f.path()).unwrap_err();
            assert!(
                format!("{err:#}").contains(needle),
                "{bad:?} should mention {needle:?}, got {err:#}"
            );
        }
    }

    #[test]
    fn bundled_roster_matches_default() {
        assert_eq!(bundled_roster().len(), 17);
    }
}
