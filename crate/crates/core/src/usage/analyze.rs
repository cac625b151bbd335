use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::resolve::{resolve_calls, CallTarget, NameTable};
use super::{UsageStore, ValueKey};
use crate::model::ApiModel;
use crate::python::parse_module;

#[derive(Debug, thiserror::Error)]
pub enum AnalyzeError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

/// Counts usages of `model` in every `.py` file under `corpus_root`.
/// Files that do not parse are skipped and only show up in the stats.
pub fn analyze_corpus(corpus_root: &Path, model: &ApiModel) -> Result<UsageStore, AnalyzeError> {
    if !corpus_root.is_dir() {
        return Err(AnalyzeError::Io {
            path: corpus_root.to_path_buf(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "not a directory"),
        });
    }
    let mut files = Vec::new();
    for entry in walkdir::WalkDir::new(corpus_root).sort_by_file_name() {
        let entry = entry.map_err(|e| AnalyzeError::Io {
            path: e.path().unwrap_or(corpus_root).to_path_buf(),
            source: e.into(),
        })?;
        if entry.file_type().is_file() && entry.path().extension().is_some_and(|e| e == "py") {
            files.push(entry.into_path());
        }
    }
    let table = NameTable::new(model);
    let stores: Vec<UsageStore> = files
        .par_iter()
        .map(|path| {
            let bytes = std::fs::read(path).map_err(|source| AnalyzeError::Io { path: path.clone(), source })?;
            let rel = path.strip_prefix(corpus_root).unwrap_or(path).to_string_lossy().replace('\\', "/");
            Ok(match std::str::from_utf8(&bytes) {
                Ok(src) => analyze_file(&table, model, &rel, src),
                Err(_) => unparsable(model),
            })
        })
        .collect::<Result<_, AnalyzeError>>()?;
    let mut total = UsageStore::empty(model);
    for s in &stores {
        total.absorb(s);
    }
    Ok(total)
}

/// Counts usages in a single client source; `file` names it in site ids.
pub fn analyze_source(file: &str, src: &str, model: &ApiModel) -> UsageStore {
    analyze_file(&NameTable::new(model), model, file, src)
}

fn unparsable(model: &ApiModel) -> UsageStore {
    let mut store = UsageStore::empty(model);
    store.corpus_stats.files_scanned = 1;
    store
}

fn analyze_file(table: &NameTable<'_>, model: &ApiModel, file: &str, src: &str) -> UsageStore {
    let Ok(module) = parse_module(src) else { return unparsable(model) };
    let mut store = UsageStore::empty(model);
    store.corpus_stats.files_scanned = 1;
    store.corpus_stats.files_parsed = 1;
    for call in resolve_calls(&module, table, file) {
        if call.target == CallTarget::Unresolved {
            store.corpus_stats.calls_unresolved += 1;
            continue;
        }
        store.corpus_stats.calls_resolved += 1;
        if let Some(class) = call.target.class() {
            *store.class_usages.entry(class.clone()).or_default() += 1;
        }
        let Some(callee) = call.target.callee() else { continue };
        *store.function_usages.entry(callee.clone()).or_default() += 1;
        let Some(binding) = call.binding else { continue };
        for (name, value) in binding.explicit {
            let q = callee.child(&name);
            *store.parameter_usages.entry(q.clone()).or_default() += 1;
            store.value_counts.entry(q).or_default().add(value);
        }
        for (name, default) in binding.implicit {
            store.value_counts.entry(callee.child(&name)).or_default().add(ValueKey::Literal(default));
        }
    }
    store
}
