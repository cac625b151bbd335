//! Usage counts mined from client programs.

mod analyze;
pub mod resolve;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::literal::LiteralValue;
use crate::model::{ApiModel, SchemaError};
use crate::qname::QualifiedName;

pub use analyze::{analyze_corpus, analyze_source, AnalyzeError};
pub use resolve::{resolve_calls, CallTarget, ResolvedCall};

pub const USAGE_SCHEMA_VERSION: u32 = 1;

/// Where a non-literal argument was written. Distinct sites never share a value.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SiteId {
    pub file: String,
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for SiteId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.col)
    }
}

impl FromStr for SiteId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut parts = s.rsplitn(3, ':');
        let col = parts.next().and_then(|c| c.parse().ok());
        let line = parts.next().and_then(|l| l.parse().ok());
        match (parts.next(), line, col) {
            (Some(file), Some(line), Some(col)) => Ok(SiteId { file: file.to_string(), line, col }),
            _ => Err(format!("malformed site `{s}`")),
        }
    }
}

impl Serialize for SiteId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SiteId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        String::deserialize(deserializer)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ValueKey {
    Literal(LiteralValue),
    NonLiteral(SiteId),
}

impl ValueKey {
    pub fn as_literal(&self) -> Option<&LiteralValue> {
        match self {
            ValueKey::Literal(v) => Some(v),
            ValueKey::NonLiteral(_) => None,
        }
    }
}

impl fmt::Display for ValueKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueKey::Literal(v) => write!(f, "{v}"),
            ValueKey::NonLiteral(site) => write!(f, "<non-literal at {site}>"),
        }
    }
}

impl Serialize for ValueKey {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct NonLiteral<'a> {
            non_literal: &'a SiteId,
        }
        match self {
            ValueKey::Literal(v) => v.serialize(serializer),
            ValueKey::NonLiteral(site) => NonLiteral { non_literal: site }.serialize(serializer),
        }
    }
}

impl<'de> Deserialize<'de> for ValueKey {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Literal(LiteralValue),
            NonLiteral { non_literal: SiteId },
        }
        Ok(match Repr::deserialize(deserializer)? {
            Repr::Literal(v) => ValueKey::Literal(v),
            Repr::NonLiteral { non_literal } => ValueKey::NonLiteral(non_literal),
        })
    }
}

/// Value distribution of one parameter. Each non-literal site counts once.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValueCounts {
    pub values: BTreeMap<LiteralValue, u64>,
    /// Sorted.
    pub non_literal_sites: Vec<SiteId>,
}

impl ValueCounts {
    pub fn total(&self) -> u64 {
        self.values.values().sum::<u64>() + self.non_literal_sites.len() as u64
    }

    pub fn count(&self, key: &ValueKey) -> u64 {
        match key {
            ValueKey::Literal(v) => self.values.get(v).copied().unwrap_or(0),
            ValueKey::NonLiteral(site) => u64::from(self.non_literal_sites.binary_search(site).is_ok()),
        }
    }

    pub fn add(&mut self, key: ValueKey) {
        match key {
            ValueKey::Literal(v) => *self.values.entry(v).or_default() += 1,
            ValueKey::NonLiteral(site) => {
                let at = self.non_literal_sites.binary_search(&site).unwrap_or_else(|i| i);
                self.non_literal_sites.insert(at, site);
            }
        }
    }

    pub fn merge(&mut self, other: &ValueCounts) {
        for (v, n) in &other.values {
            *self.values.entry(v.clone()).or_default() += n;
        }
        self.non_literal_sites.extend(other.non_literal_sites.iter().cloned());
        self.non_literal_sites.sort();
    }

    /// Distinct values with their counts, most common first. Ties put the
    /// declared default first, then literals by canonical text, then
    /// non-literal sites.
    pub fn ranked(&self, declared_default: Option<&LiteralValue>) -> Vec<(ValueKey, u64)> {
        let mut all: Vec<(ValueKey, u64)> = self
            .values
            .iter()
            .map(|(v, n)| (ValueKey::Literal(v.clone()), *n))
            .chain(self.non_literal_sites.iter().map(|s| (ValueKey::NonLiteral(s.clone()), 1)))
            .collect();
        all.sort_by(|(a, na), (b, nb)| {
            let is_default = |k: &ValueKey| declared_default.is_some_and(|d| k.as_literal() == Some(d));
            nb.cmp(na)
                .then_with(|| is_default(b).cmp(&is_default(a)))
                .then_with(|| a.cmp(b))
        });
        all
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub files_scanned: u64,
    pub files_parsed: u64,
    pub calls_resolved: u64,
    pub calls_unresolved: u64,
}

impl CorpusStats {
    fn merge(&mut self, other: &CorpusStats) {
        self.files_scanned += other.files_scanned;
        self.files_parsed += other.files_parsed;
        self.calls_resolved += other.calls_resolved;
        self.calls_unresolved += other.calls_unresolved;
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LibraryRef {
    pub name: String,
    pub version: String,
}

/// Counts are sparse: absent keys mean zero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UsageStore {
    pub library: LibraryRef,
    pub corpus_stats: CorpusStats,
    pub class_usages: BTreeMap<QualifiedName, u64>,
    pub function_usages: BTreeMap<QualifiedName, u64>,
    pub parameter_usages: BTreeMap<QualifiedName, u64>,
    pub value_counts: BTreeMap<QualifiedName, ValueCounts>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("usage data is for {found_name} {found_version}, expected {expected_name} {expected_version}")]
pub struct ModelMismatch {
    pub expected_name: String,
    pub expected_version: String,
    pub found_name: String,
    pub found_version: String,
}

impl UsageStore {
    pub fn empty(model: &ApiModel) -> Self {
        UsageStore {
            library: LibraryRef { name: model.library_name.clone(), version: model.version.clone() },
            corpus_stats: CorpusStats::default(),
            class_usages: BTreeMap::new(),
            function_usages: BTreeMap::new(),
            parameter_usages: BTreeMap::new(),
            value_counts: BTreeMap::new(),
        }
    }

    pub fn class_usage(&self, q: &QualifiedName) -> u64 {
        self.class_usages.get(q).copied().unwrap_or(0)
    }

    pub fn function_usage(&self, q: &QualifiedName) -> u64 {
        self.function_usages.get(q).copied().unwrap_or(0)
    }

    pub fn parameter_usage(&self, q: &QualifiedName) -> u64 {
        self.parameter_usages.get(q).copied().unwrap_or(0)
    }

    pub fn values(&self, q: &QualifiedName) -> Option<&ValueCounts> {
        self.value_counts.get(q)
    }

    pub fn check_model(&self, model: &ApiModel) -> Result<(), ModelMismatch> {
        if self.library.name == model.library_name && self.library.version == model.version {
            Ok(())
        } else {
            Err(ModelMismatch {
                expected_name: model.library_name.clone(),
                expected_version: model.version.clone(),
                found_name: self.library.name.clone(),
                found_version: self.library.version.clone(),
            })
        }
    }

    /// Pointwise sum. Commutative and associative.
    pub fn merge(&self, other: &UsageStore) -> Result<UsageStore, ModelMismatch> {
        if self.library != other.library {
            return Err(ModelMismatch {
                expected_name: self.library.name.clone(),
                expected_version: self.library.version.clone(),
                found_name: other.library.name.clone(),
                found_version: other.library.version.clone(),
            });
        }
        let mut out = self.clone();
        out.absorb(other);
        Ok(out)
    }

    pub(crate) fn absorb(&mut self, other: &UsageStore) {
        fn sum(into: &mut BTreeMap<QualifiedName, u64>, from: &BTreeMap<QualifiedName, u64>) {
            for (k, v) in from {
                *into.entry(k.clone()).or_default() += v;
            }
        }
        self.corpus_stats.merge(&other.corpus_stats);
        sum(&mut self.class_usages, &other.class_usages);
        sum(&mut self.function_usages, &other.function_usages);
        sum(&mut self.parameter_usages, &other.parameter_usages);
        for (k, v) in &other.value_counts {
            self.value_counts.entry(k.clone()).or_default().merge(v);
        }
    }

    pub fn to_json(&self) -> String {
        let doc = UsageDocument {
            schema_version: USAGE_SCHEMA_VERSION,
            library: self.library.clone(),
            corpus_stats: self.corpus_stats,
            classes: self.class_usages.clone(),
            functions: self.function_usages.clone(),
            parameters: self.parameter_usages.clone(),
            values: self
                .value_counts
                .iter()
                .map(|(k, v)| {
                    let summary = ValueSummary {
                        values: v.values.clone(),
                        non_literal: v.non_literal_sites.len() as u64,
                        total: v.total(),
                        non_literal_sites: v.non_literal_sites.clone(),
                    };
                    (k.clone(), summary)
                })
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("usage store serializes");
        s.push('\n');
        s
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self, SchemaError> {
        let doc: UsageDocument = serde_json::from_slice(bytes)?;
        if doc.schema_version != USAGE_SCHEMA_VERSION {
            return Err(SchemaError::semantic(format!("unsupported schema_version {}", doc.schema_version)));
        }
        let mut value_counts = BTreeMap::new();
        for (k, s) in doc.values {
            let mut sites = s.non_literal_sites;
            sites.sort();
            let counts = ValueCounts { values: s.values, non_literal_sites: sites };
            if s.non_literal != counts.non_literal_sites.len() as u64 || s.total != counts.total() {
                return Err(SchemaError::semantic(format!("inconsistent value summary for `{k}`")));
            }
            value_counts.insert(k, counts);
        }
        Ok(UsageStore {
            library: doc.library,
            corpus_stats: doc.corpus_stats,
            class_usages: doc.classes,
            function_usages: doc.functions,
            parameter_usages: doc.parameters,
            value_counts,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct UsageDocument {
    schema_version: u32,
    library: LibraryRef,
    corpus_stats: CorpusStats,
    classes: BTreeMap<QualifiedName, u64>,
    functions: BTreeMap<QualifiedName, u64>,
    parameters: BTreeMap<QualifiedName, u64>,
    values: BTreeMap<QualifiedName, ValueSummary>,
}

#[derive(Serialize, Deserialize)]
struct ValueSummary {
    values: BTreeMap<LiteralValue, u64>,
    non_literal: u64,
    total: u64,
    #[serde(default)]
    non_literal_sites: Vec<SiteId>,
}
