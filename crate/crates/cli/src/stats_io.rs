//! Persistence for corpus statistics: a versioned little-endian binary file
//! with a magic header, accompanied by a plain-text manifest.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use sha2::{Digest, Sha256};

use qpp_core::corpus::{
    CorpusStats, CorpusStatsParts, DocParts, StopwordFilter, TermParts, TokenizationConfig,
};

const MAGIC: &[u8; 8] = b"QPPSTATS";
const VERSION: u32 = 1;

/// A stats file bundles the statistics with the tokenization config that
/// produced them, so queries can be tokenized identically later.
#[derive(Debug, Clone)]
pub struct StatsFile {
    pub config: TokenizationConfig,
    pub stats: CorpusStats,
}

struct Writer<W: Write> {
    inner: W,
}

impl<W: Write> Writer<W> {
    fn u8(&mut self, v: u8) -> Result<()> {
        self.inner.write_all(&[v])?;
        Ok(())
    }
    fn u32(&mut self, v: u32) -> Result<()> {
        self.inner.write_all(&v.to_le_bytes())?;
        Ok(())
    }
    fn u64(&mut self, v: u64) -> Result<()> {
        self.inner.write_all(&v.to_le_bytes())?;
        Ok(())
    }
    fn str(&mut self, s: &str) -> Result<()> {
        self.u32(s.len() as u32)?;
        self.inner.write_all(s.as_bytes())?;
        Ok(())
    }
}

struct Reader<R: Read> {
    inner: R,
}

impl<R: Read> Reader<R> {
    fn u8(&mut self) -> Result<u8> {
        let mut b = [0u8; 1];
        self.inner.read_exact(&mut b)?;
        Ok(b[0])
    }
    fn u32(&mut self) -> Result<u32> {
        let mut b = [0u8; 4];
        self.inner.read_exact(&mut b)?;
        Ok(u32::from_le_bytes(b))
    }
    fn u64(&mut self) -> Result<u64> {
        let mut b = [0u8; 8];
        self.inner.read_exact(&mut b)?;
        Ok(u64::from_le_bytes(b))
    }
    fn str(&mut self) -> Result<String> {
        let len = self.u32()? as usize;
        if len > 1 << 24 {
            bail!("string length {len} out of range");
        }
        let mut buf = vec![0u8; len];
        self.inner.read_exact(&mut buf)?;
        Ok(String::from_utf8(buf)?)
    }
}

/// Serialize stats to `path` and write `<path>.manifest` next to it.
pub fn write_stats(path: &Path, file: &StatsFile) -> Result<()> {
    let parts = file.stats.clone().into_parts();
    let out = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = Writer { inner: BufWriter::new(out) };

    w.inner.write_all(MAGIC)?;
    w.u32(VERSION)?;
    match &file.config.stopwords {
        StopwordFilter::None => w.u8(0)?,
        StopwordFilter::Bundled => w.u8(1)?,
        StopwordFilter::Custom(words) => {
            w.u8(2)?;
            w.u32(words.len() as u32)?;
            for word in words {
                w.str(word)?;
            }
        }
    }
    w.u8(file.config.stemming as u8)?;

    w.u64(parts.num_docs)?;
    w.u64(parts.total_tokens)?;
    w.u32(parts.terms.len() as u32)?;
    for t in &parts.terms {
        w.str(&t.name)?;
        w.u64(t.df)?;
        w.u64(t.cf)?;
        w.u32(t.tf_hist.len() as u32)?;
        for &(tf, n) in &t.tf_hist {
            w.u32(tf)?;
            w.u32(n)?;
        }
    }
    w.u32(parts.docs.len() as u32)?;
    for d in &parts.docs {
        w.str(&d.id)?;
        w.u64(d.len)?;
        match &d.vector {
            None => w.u8(0)?,
            Some(v) => {
                w.u8(1)?;
                w.u32(v.len() as u32)?;
                for &(tid, tf) in v {
                    w.u32(tid)?;
                    w.u32(tf)?;
                }
            }
        }
    }
    w.inner.flush()?;
    drop(w);

    write_manifest(path, file)?;
    Ok(())
}

fn write_manifest(path: &Path, file: &StatsFile) -> Result<()> {
    let digest = sha256_file(path)?;
    let manifest_path = manifest_path(path);
    let mut out = BufWriter::new(File::create(&manifest_path)?);
    writeln!(out, "format = qpp-stats v{VERSION}")?;
    writeln!(out, "stats_sha256 = {digest}")?;
    writeln!(out, "num_docs = {}", file.stats.num_docs())?;
    writeln!(out, "total_tokens = {}", file.stats.total_tokens())?;
    writeln!(out, "num_terms = {}", file.stats.num_terms())?;
    let stop = match &file.config.stopwords {
        StopwordFilter::None => "none".to_string(),
        StopwordFilter::Bundled => "bundled".to_string(),
        StopwordFilter::Custom(w) => format!("custom ({} words)", w.len()),
    };
    writeln!(out, "stopwords = {stop}")?;
    writeln!(out, "stemming = {}", file.config.stemming)?;
    Ok(())
}

pub fn manifest_path(stats_path: &Path) -> PathBuf {
    let mut os = stats_path.as_os_str().to_owned();
    os.push(".manifest");
    PathBuf::from(os)
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let mut file =
        File::open(path).with_context(|| format!("hashing {}", path.display()))?;
    let mut hasher = Sha256::new();
    std::io::copy(&mut file, &mut hasher)?;
    Ok(format!("{:x}", hasher.finalize()))
}

/// Load a stats file, validating the magic, version and every stats
/// invariant.
pub fn read_stats(path: &Path) -> Result<StatsFile> {
    let f = File::open(path).with_context(|| format!("opening stats file {}", path.display()))?;
    let mut r = Reader { inner: BufReader::new(f) };

    let mut magic = [0u8; 8];
    r.inner.read_exact(&mut magic)?;
    if &magic != MAGIC {
        bail!("{}: not a stats file (bad magic)", path.display());
    }
    let version = r.u32()?;
    if version != VERSION {
        bail!("{}: unsupported stats version {version}", path.display());
    }
    let stopwords = match r.u8()? {
        0 => StopwordFilter::None,
        1 => StopwordFilter::Bundled,
        2 => {
            let n = r.u32()? as usize;
            let mut words = std::collections::BTreeSet::new();
            for _ in 0..n {
                words.insert(r.str()?);
            }
            StopwordFilter::Custom(words)
        }
        other => bail!("{}: unknown stopword mode {other}", path.display()),
    };
    let stemming = r.u8()? != 0;

    let num_docs = r.u64()?;
    let total_tokens = r.u64()?;
    let num_terms = r.u32()? as usize;
    let mut terms = Vec::with_capacity(num_terms);
    for _ in 0..num_terms {
        let name = r.str()?;
        let df = r.u64()?;
        let cf = r.u64()?;
        let hist_len = r.u32()? as usize;
        let mut tf_hist = Vec::with_capacity(hist_len);
        for _ in 0..hist_len {
            let tf = r.u32()?;
            let n = r.u32()?;
            tf_hist.push((tf, n));
        }
        terms.push(TermParts { name, df, cf, tf_hist });
    }
    let num_doc_entries = r.u32()? as usize;
    let mut docs = Vec::with_capacity(num_doc_entries);
    for _ in 0..num_doc_entries {
        let id = r.str()?;
        let len = r.u64()?;
        let vector = match r.u8()? {
            0 => None,
            1 => {
                let n = r.u32()? as usize;
                let mut v = Vec::with_capacity(n);
                for _ in 0..n {
                    let tid = r.u32()?;
                    let tf = r.u32()?;
                    v.push((tid, tf));
                }
                Some(v)
            }
            other => bail!("{}: bad vector flag {other}", path.display()),
        };
        docs.push(DocParts { id, len, vector });
    }

    let stats = CorpusStats::from_parts(CorpusStatsParts { num_docs, total_tokens, terms, docs })
        .with_context(|| format!("{}: stats failed validation", path.display()))?;
    Ok(StatsFile { config: TokenizationConfig { stopwords, stemming }, stats })
}
