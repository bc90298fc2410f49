//! Retrieval-run data structures (TREC run semantics).

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// One retrieved document with its system score.
#[derive(Debug, Clone, PartialEq)]
pub struct RunEntry {
    pub doc_id: String,
    pub score: f64,
}

/// A per-query ranked list. The stored order is authoritative: rank i is
/// position i, whatever the scores say.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RankedList {
    pub entries: Vec<RunEntry>,
}

impl RankedList {
    pub fn new(entries: Vec<RunEntry>) -> Self {
        RankedList { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn doc_ids(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.doc_id.as_str())
    }
}

/// A retrieval system's output: query id -> ranked list.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Run {
    pub lists: BTreeMap<String, RankedList>,
}

impl Run {
    pub fn list(&self, query_id: &str) -> Option<&RankedList> {
        self.lists.get(query_id)
    }
}

/// The run-type factor: lexical bag-of-words systems vs. neural first-stage
/// retrievers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RunType {
    Lexical,
    Neural,
}

impl RunType {
    pub fn as_str(self) -> &'static str {
        match self {
            RunType::Lexical => "lexical",
            RunType::Neural => "neural",
        }
    }
}

impl fmt::Display for RunType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl core::str::FromStr for RunType {
    type Err = UnknownRunType;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lexical" => Ok(RunType::Lexical),
            "neural" => Ok(RunType::Neural),
            other => Err(UnknownRunType(String::from(other))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownRunType(pub String);

impl fmt::Display for UnknownRunType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown run type {:?} (expected \"lexical\" or \"neural\")", self.0)
    }
}

impl core::error::Error for UnknownRunType {}
