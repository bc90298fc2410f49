//! The system catalog: which run file belongs to which system, its run type
//! (lexical or neural) and its collection.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use qpp_core::run::RunType;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemEntry {
    pub run_path: PathBuf,
    pub run_type: RunType,
    pub collection: String,
}

/// system id -> (run file, run type, collection id).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SystemCatalog {
    pub systems: BTreeMap<String, SystemEntry>,
}

impl SystemCatalog {
    pub fn len(&self) -> usize {
        self.systems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.systems.is_empty()
    }

    pub fn collections(&self) -> Vec<&str> {
        let mut c: Vec<&str> = self.systems.values().map(|e| e.collection.as_str()).collect();
        c.sort();
        c.dedup();
        c
    }

    pub fn has_both_run_types(&self) -> bool {
        let mut lexical = false;
        let mut neural = false;
        for entry in self.systems.values() {
            match entry.run_type {
                RunType::Lexical => lexical = true,
                RunType::Neural => neural = true,
            }
        }
        lexical && neural
    }

    /// Systems restricted to one collection.
    pub fn for_collection(&self, collection: &str) -> SystemCatalog {
        SystemCatalog {
            systems: self
                .systems
                .iter()
                .filter(|(_, e)| e.collection == collection)
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }
}

/// Parse a catalog CSV with header `system,run_type,collection,path`.
/// Relative run paths are resolved against the catalog file's directory.
pub fn parse_catalog(path: &Path) -> Result<SystemCatalog> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading catalog {}", path.display()))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == "system,run_type,collection,path" => {}
        Some((_, header)) => bail!(
            "{}: bad catalog header {:?} (expected system,run_type,collection,path)",
            path.display(),
            header
        ),
        None => bail!("{}: empty catalog", path.display()),
    }
    let mut catalog = SystemCatalog::default();
    for (lineno, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            bail!(
                "{}:{}: catalog line has {} fields, expected 4",
                path.display(),
                lineno + 1,
                fields.len()
            );
        }
        let run_type: RunType = fields[1].parse().map_err(|e| {
            anyhow::anyhow!("{}:{}: {}", path.display(), lineno + 1, e)
        })?;
        let run_path = base.join(fields[3]);
        let entry = SystemEntry { run_path, run_type, collection: fields[2].to_string() };
        if catalog.systems.insert(fields[0].to_string(), entry).is_some() {
            bail!("{}:{}: duplicate system id {:?}", path.display(), lineno + 1, fields[0]);
        }
    }
    if catalog.is_empty() {
        bail!("{}: catalog lists no systems", path.display());
    }
    Ok(catalog)
}
