//! Builds an [`ApiModel`] from a directory of library sources.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::docstring::{parse_docstring, Docstring};
use crate::model::{
    is_public_name, ApiModel, ClassDecl, DefaultValue, FunctionDecl, ModuleDecl, Optionality, Parameter,
    ParameterKind, Reexport,
};
use crate::python::ast::{self, Stmt, StmtKind};
use crate::python::parse_module_recovering;
use crate::qname::{is_identifier, QualifiedName};

#[derive(Debug, thiserror::Error)]
pub enum ExtractError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid library name `{0}`")]
    InvalidLibraryName(String),
    #[error("no declarations found under {0}")]
    EmptyLibrary(PathBuf),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Warning {
    pub file: String,
    pub line: u32,
    pub message: String,
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.file, self.line, self.message)
    }
}

#[derive(Clone, Debug)]
pub struct Extraction {
    pub model: ApiModel,
    pub warnings: Vec<Warning>,
}

/// Import statements seen at module level, resolved once every module is known.
struct PendingImport {
    line: u32,
    module: QualifiedName,
    /// `None` for `from m import *`.
    name: Option<String>,
    alias: String,
}

struct ParsedFile {
    module: ModuleDecl,
    imports: Vec<PendingImport>,
    warnings: Vec<Warning>,
}

/// Extracts every `.py` file below `source_root`. Module names are
/// `library_name` followed by the relative path, with `__init__` dropped.
pub fn extract_api(source_root: &Path, library_name: &str, version: &str) -> Result<Extraction, ExtractError> {
    let root = QualifiedName::new(library_name.split('.'))
        .map_err(|_| ExtractError::InvalidLibraryName(library_name.to_string()))?;
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| ExtractError::Io { path, source }
    };
    if !source_root.is_dir() {
        return Err(ExtractError::Io {
            path: source_root.to_path_buf(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "not a directory"),
        });
    }
    let mut warnings = Vec::new();
    let mut files = Vec::new();
    for entry in walkdir::WalkDir::new(source_root).sort_by_file_name() {
        let entry = entry.map_err(|e| {
            let path = e.path().unwrap_or(source_root).to_path_buf();
            ExtractError::Io { path, source: e.into() }
        })?;
        let path = entry.path();
        if !entry.file_type().is_file() || path.extension().is_none_or(|e| e != "py") {
            continue;
        }
        let rel = path.strip_prefix(source_root).unwrap_or(path);
        let display = rel.to_string_lossy().replace('\\', "/");
        match module_name(&root, rel) {
            Some(qname) => {
                let is_package = rel.file_stem().is_some_and(|s| s == "__init__");
                let bytes = std::fs::read(path).map_err(io(path))?;
                files.push((display, qname, is_package, bytes));
            }
            None => warnings.push(Warning { file: display, line: 0, message: "path is not an importable module name; skipped".into() }),
        }
    }

    let parsed: Vec<ParsedFile> = files
        .par_iter()
        .map(|(display, qname, is_package, bytes)| {
            let src = match std::str::from_utf8(bytes) {
                Ok(s) => s,
                Err(_) => {
                    let w = Warning { file: display.clone(), line: 0, message: "not valid UTF-8; skipped".into() };
                    return ParsedFile::empty(qname.clone(), vec![w]);
                }
            };
            extract_file(display, qname, *is_package, src)
        })
        .collect();

    let mut modules: Vec<ModuleDecl> = Vec::new();
    let mut pending: Vec<(usize, String, Vec<PendingImport>)> = Vec::new();
    let mut seen_modules = HashSet::new();
    for ((display, ..), file) in files.iter().zip(parsed) {
        warnings.extend(file.warnings);
        if !seen_modules.insert(file.module.qname.clone()) {
            warnings.push(Warning {
                file: display.clone(),
                line: 0,
                message: format!("module `{}` is defined twice; skipped", file.module.qname),
            });
            continue;
        }
        pending.push((modules.len(), display.clone(), file.imports));
        modules.push(file.module);
    }

    // A declaration cannot share its name with a submodule.
    for (m, (_, file, _)) in modules.iter_mut().zip(&pending) {
        let clash = |q: &QualifiedName| seen_modules.contains(q);
        m.classes.retain(|c| {
            let keep = !clash(&c.qname);
            if !keep {
                warnings.push(Warning { file: file.clone(), line: 0, message: format!("`{}` shadows a module; skipped", c.qname) });
            }
            keep
        });
        m.functions.retain(|f| {
            let keep = !clash(&f.qname);
            if !keep {
                warnings.push(Warning { file: file.clone(), line: 0, message: format!("`{}` shadows a module; skipped", f.qname) });
            }
            keep
        });
    }

    resolve_reexports(&mut modules, pending, &mut warnings);
    modules.retain(|m| !(m.classes.is_empty() && m.functions.is_empty() && m.reexports.is_empty()));

    let model = ApiModel { library_name: library_name.to_string(), version: version.to_string(), modules };
    if model.declaration_count() == 0 {
        return Err(ExtractError::EmptyLibrary(source_root.to_path_buf()));
    }
    Ok(Extraction { model, warnings })
}

impl ParsedFile {
    fn empty(qname: QualifiedName, warnings: Vec<Warning>) -> Self {
        ParsedFile {
            module: ModuleDecl { qname, classes: vec![], functions: vec![], reexports: vec![] },
            imports: vec![],
            warnings,
        }
    }
}

fn module_name(root: &QualifiedName, rel: &Path) -> Option<QualifiedName> {
    let mut segments: Vec<String> = root.segments().to_vec();
    let components: Vec<String> = rel.components().map(|c| c.as_os_str().to_string_lossy().into_owned()).collect();
    let (last, dirs) = components.split_last()?;
    for d in dirs {
        if !is_identifier(d) {
            return None;
        }
        segments.push(d.clone());
    }
    let stem = last.strip_suffix(".py")?;
    if stem != "__init__" {
        if !is_identifier(stem) {
            return None;
        }
        segments.push(stem.to_string());
    }
    QualifiedName::new(segments).ok()
}

/// Extracts one source file. `display` names the file in warnings.
pub fn extract_source(display: &str, qname: &QualifiedName, src: &str) -> (ModuleDecl, Vec<Warning>) {
    let file = extract_file(display, qname, false, src);
    (file.module, file.warnings)
}

fn extract_file(display: &str, qname: &QualifiedName, is_package: bool, src: &str) -> ParsedFile {
    let src = src.strip_prefix('\u{feff}').unwrap_or(src);
    let warn = |line: u32, message: String| Warning { file: display.to_string(), line, message };
    let (module, errors) = match parse_module_recovering(src) {
        Ok(r) => r,
        Err(e) => {
            return ParsedFile::empty(qname.clone(), vec![warn(e.line, format!("syntax error, file skipped: {}", e.message))]);
        }
    };
    let mut out = ParsedFile::empty(qname.clone(), Vec::new());
    for e in errors {
        out.warnings.push(warn(e.line, format!("syntax error, statement skipped: {}", e.message)));
    }
    let ctx = Ctx { src, display };
    for stmt in &module.body {
        match &stmt.kind {
            StmtKind::FunctionDef(def) => {
                if !is_identifier(&def.name) {
                    continue;
                }
                let f = ctx.function(qname.child(&def.name), def, None, &mut out.warnings);
                remove_existing(&mut out.module, &def.name, stmt, &ctx, &mut out.warnings);
                out.module.functions.push(f);
            }
            StmtKind::ClassDef(def) => {
                let c = ctx.class(qname.child(&def.name), def, &mut out.warnings);
                remove_existing(&mut out.module, &def.name, stmt, &ctx, &mut out.warnings);
                out.module.classes.push(c);
            }
            StmtKind::ImportFrom { module: from, level, names } => {
                let Some(base) = import_base(qname, is_package, from.as_deref(), *level) else { continue };
                for n in names {
                    if n.name == "*" {
                        out.imports.push(PendingImport { line: stmt.span.line, module: base.clone(), name: None, alias: String::new() });
                    } else {
                        let alias = n.alias.clone().unwrap_or_else(|| n.name.clone());
                        out.imports.push(PendingImport {
                            line: stmt.span.line,
                            module: base.clone(),
                            name: Some(n.name.clone()),
                            alias,
                        });
                    }
                }
            }
            StmtKind::Block { bodies, .. }
                if bodies.iter().flatten().any(defines_something) => {
                    out.warnings.push(warn(stmt.span.line, "conditional definitions are outside the supported subset; skipped".into()));
                }
            _ => {}
        }
    }
    out
}

fn defines_something(stmt: &Stmt) -> bool {
    match &stmt.kind {
        StmtKind::FunctionDef(_) | StmtKind::ClassDef(_) => true,
        StmtKind::Block { bodies, .. } => bodies.iter().flatten().any(defines_something),
        _ => false,
    }
}

fn remove_existing(module: &mut ModuleDecl, name: &str, stmt: &Stmt, ctx: &Ctx, warnings: &mut Vec<Warning>) {
    let before = module.classes.len() + module.functions.len();
    module.classes.retain(|c| c.name() != name);
    module.functions.retain(|f| f.name() != name);
    if module.classes.len() + module.functions.len() != before {
        warnings.push(Warning {
            file: ctx.display.to_string(),
            line: stmt.span.line,
            message: format!("`{name}` is defined more than once; the later definition wins"),
        });
    }
}

/// The absolute module named by a `from` import, if it is inside the library.
fn import_base(current: &QualifiedName, is_package: bool, from: Option<&str>, level: u32) -> Option<QualifiedName> {
    let mut segments: Vec<String> = if level == 0 {
        Vec::new()
    } else {
        let mut base = current.segments().to_vec();
        let ups = if is_package { level - 1 } else { level };
        for _ in 0..ups {
            base.pop()?;
        }
        base
    };
    if let Some(from) = from {
        segments.extend(from.split('.').map(str::to_string));
    }
    QualifiedName::new(segments).ok()
}

fn resolve_reexports(
    modules: &mut [ModuleDecl],
    pending: Vec<(usize, String, Vec<PendingImport>)>,
    warnings: &mut Vec<Warning>,
) {
    let index: BTreeMap<QualifiedName, usize> = modules.iter().enumerate().map(|(i, m)| (m.qname.clone(), i)).collect();
    // name → target per module, grown until a fixed point so chains resolve.
    let mut tables: Vec<BTreeMap<String, QualifiedName>> = modules
        .iter()
        .map(|m| {
            m.classes
                .iter()
                .map(|c| (c.name().to_string(), c.qname.clone()))
                .chain(m.functions.iter().map(|f| (f.name().to_string(), f.qname.clone())))
                .collect()
        })
        .collect();
    let local: Vec<HashSet<String>> = tables.iter().map(|t| t.keys().cloned().collect()).collect();
    loop {
        let mut changed = false;
        for (i, _, imports) in &pending {
            for imp in imports {
                let Some(&src) = index.get(&imp.module) else { continue };
                let additions: Vec<(String, QualifiedName)> = match &imp.name {
                    Some(name) => tables[src].get(name).map(|t| vec![(imp.alias.clone(), t.clone())]).unwrap_or_default(),
                    None => tables[src]
                        .iter()
                        .filter(|(n, _)| !n.starts_with('_'))
                        .map(|(n, t)| (n.clone(), t.clone()))
                        .collect(),
                };
                for (alias, target) in additions {
                    if local[*i].contains(&alias) || tables[*i].contains_key(&alias) {
                        continue;
                    }
                    tables[*i].insert(alias, target);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    for (i, display, imports) in &pending {
        let module_qname = modules[*i].qname.clone();
        // Keep import order for the re-export list.
        let mut seen = HashSet::new();
        for imp in imports {
            let names: Vec<String> = match &imp.name {
                Some(_) => vec![imp.alias.clone()],
                None => match index.get(&imp.module) {
                    Some(&src) => tables[src].keys().filter(|n| !n.starts_with('_')).cloned().collect(),
                    None => continue,
                },
            };
            for name in names {
                if local[*i].contains(&name) || !seen.insert(name.clone()) {
                    continue;
                }
                if let Some(target) = tables[*i].get(&name) {
                    if index.contains_key(&module_qname.child(&name)) {
                        warnings.push(Warning {
                            file: display.clone(),
                            line: imp.line,
                            message: format!("re-export `{name}` shadows a module; skipped"),
                        });
                        continue;
                    }
                    modules[*i].reexports.push(Reexport { name, target: target.clone() });
                }
            }
        }
    }
}

struct Ctx<'a> {
    src: &'a str,
    display: &'a str,
}

impl Ctx<'_> {
    fn warn(&self, line: u32, message: String) -> Warning {
        Warning { file: self.display.to_string(), line, message }
    }

    fn class(&self, qname: QualifiedName, def: &ast::ClassDef, warnings: &mut Vec<Warning>) -> ClassDecl {
        let mut docstring = def.docstring.as_deref().map(parse_docstring).unwrap_or_default();
        let mut methods: Vec<FunctionDecl> = Vec::new();
        for stmt in &def.body {
            match &stmt.kind {
                StmtKind::FunctionDef(f) => {
                    let decl = self.function(qname.child(&f.name), f, Some(&docstring), warnings);
                    if let Some(i) = methods.iter().position(|m| m.name() == f.name) {
                        // The getter describes the attribute; a setter adds nothing to the API surface.
                        if is_property_pair(&methods[i], &decl) {
                            continue;
                        }
                        warnings.push(self.warn(stmt.span.line, format!("`{}` is defined more than once; the later definition wins", decl.qname)));
                        methods.remove(i);
                    }
                    methods.push(decl);
                }
                StmtKind::ClassDef(c) => warnings.push(self.warn(
                    stmt.span.line,
                    format!("nested class `{}` is outside the supported subset; skipped", c.name),
                )),
                StmtKind::Block { bodies, .. } if bodies.iter().flatten().any(defines_something) => {
                    warnings.push(self.warn(stmt.span.line, "conditional definitions are outside the supported subset; skipped".into()));
                }
                _ => {}
            }
        }
        let init_params: Vec<&str> = methods
            .iter()
            .find(|m| m.name() == "__init__")
            .map(|m| m.parameters.iter().map(|p| p.name.as_str()).collect())
            .unwrap_or_default();
        docstring.flag_orphans(init_params.iter().copied());
        ClassDecl {
            qname,
            superclasses: def.bases.clone(),
            decorators: def.decorators.clone(),
            docstring,
            methods,
        }
    }

    fn function(
        &self,
        qname: QualifiedName,
        def: &ast::FunctionDef,
        class_doc: Option<&Docstring>,
        warnings: &mut Vec<Warning>,
    ) -> FunctionDecl {
        let is_method = class_doc.is_some();
        let is_static = def.decorators.iter().any(|d| d == "staticmethod" || d == "builtins.staticmethod");
        let mut params = def.params.as_slice();
        if is_method && !is_static {
            match params.first() {
                Some(p) if matches!(p.kind, ast::ParamKind::PositionalOnly | ast::ParamKind::PositionalOrKeyword) => {
                    params = &params[1..];
                }
                _ => {}
            }
        }
        let mut docstring = def.docstring.as_deref().map(parse_docstring).unwrap_or_default();
        docstring.flag_orphans(params.iter().map(|p| p.name.as_str()));
        let fallback = if def.name == "__init__" { class_doc } else { None };
        let parameters = params
            .iter()
            .filter(|p| {
                let ok = is_identifier(&p.name);
                if !ok {
                    warnings.push(self.warn(0, format!("parameter `{}` of `{qname}` has an unsupported name", p.name)));
                }
                ok
            })
            .map(|p| {
                let kind = match p.kind {
                    ast::ParamKind::PositionalOnly => ParameterKind::PositionalOnly,
                    ast::ParamKind::PositionalOrKeyword => ParameterKind::PositionalOrKeyword,
                    ast::ParamKind::KeywordOnly => ParameterKind::KeywordOnly,
                    ast::ParamKind::VarPositional => ParameterKind::VariadicPositional,
                    ast::ParamKind::VarKeyword => ParameterKind::VariadicKeyword,
                };
                let optionality = match &p.default {
                    None => Optionality::Required,
                    Some(e) => Optionality::Optional(match e.as_literal() {
                        Some(v) => DefaultValue::Literal(v),
                        None => DefaultValue::NonLiteral { non_literal: self.src[e.span.start..e.span.end].to_string() },
                    }),
                };
                let doc = docstring.param(&p.name).or_else(|| fallback.and_then(|d| d.param(&p.name)));
                Parameter {
                    name: p.name.clone(),
                    kind,
                    optionality,
                    doc_type: doc.map(|d| d.type_text.clone()).unwrap_or_default(),
                    doc_description: doc.map(|d| d.description.clone()).unwrap_or_default(),
                }
            })
            .collect();
        FunctionDecl {
            is_public: is_public_name(&def.name),
            qname,
            decorators: def.decorators.clone(),
            docstring,
            is_method,
            parameters,
        }
    }
}

/// `@property` followed by `@x.setter` is one logical attribute, not a redefinition.
fn is_property_pair(first: &FunctionDecl, second: &FunctionDecl) -> bool {
    let name = first.name();
    second.decorators.iter().any(|d| d.starts_with(&format!("{name}.")))
}
