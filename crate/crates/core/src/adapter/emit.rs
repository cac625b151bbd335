use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::io::{Seek, Write};
use std::path::{Path, PathBuf};

use super::*;
use crate::annotation::{interval_notation, number_text};
use crate::literal::quote_string;
use crate::qname::is_identifier;

pub const HEADER_PREFIX: &str = "# Generated by adaptor";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratedFile {
    /// `/`-separated, relative to the output directory.
    pub path: String,
    pub contents: String,
}

const BUILTINS: &[&str] = &[
    "abs", "all", "any", "bool", "bytes", "callable", "chr", "dict", "divmod", "Ellipsis", "enumerate", "Exception",
    "filter", "float", "frozenset", "getattr", "hasattr", "hash", "id", "int", "isinstance", "issubclass", "iter", "len",
    "list", "map", "max", "min", "next", "NotImplemented", "object", "ord", "pow", "print", "range", "repr", "reversed",
    "round", "set", "slice", "sorted", "str", "sum", "tuple", "type", "ValueError", "TypeError", "zip",
];

fn header(unit: &AdapterUnit) -> String {
    format!(
        "{HEADER_PREFIX} {} from {} {}. Do not edit.\n",
        env!("CARGO_PKG_VERSION"),
        unit.library.name,
        unit.library.version
    )
}

/// Python source for every adapter module, plus empty `__init__.py` files
/// for packages that have no declarations of their own. Sorted by path.
pub fn render(unit: &AdapterUnit) -> Vec<GeneratedFile> {
    let dotted: Vec<String> = unit.modules.iter().map(|m| unit.adapted_module(&m.qname)).collect();
    let is_package = |d: &str| d == unit.package || dotted.iter().any(|o| o.starts_with(&format!("{d}.")));
    let path_of = |d: &str| {
        let base = d.replace('.', "/");
        if is_package(d) {
            format!("{base}/__init__.py")
        } else {
            format!("{base}.py")
        }
    };
    let mut files: BTreeMap<String, String> = BTreeMap::new();
    for (m, d) in unit.modules.iter().zip(&dotted) {
        files.insert(path_of(d), ModuleWriter::new(unit, m).finish());
    }
    for d in &dotted {
        let segs: Vec<&str> = d.split('.').collect();
        for i in 1..=segs.len() {
            let pkg = segs[..i].join(".");
            if is_package(&pkg) {
                files.entry(path_of(&pkg)).or_insert_with(|| header(unit));
            }
        }
    }
    files.entry(format!("{}/__init__.py", unit.package)).or_insert_with(|| header(unit));
    files.into_iter().map(|(path, contents)| GeneratedFile { path, contents }).collect()
}

/// Writes the rendered files below `out_dir`.
pub fn emit(unit: &AdapterUnit, out_dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for f in render(unit) {
        let path = out_dir.join(&f.path);
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(&path, f.contents.as_bytes())?;
        written.push(path);
    }
    Ok(written)
}

/// Deterministic archive: sorted entries and a fixed timestamp.
pub fn write_zip<W: Write + Seek>(files: &[GeneratedFile], writer: W) -> zip::result::ZipResult<W> {
    let mut zip = zip::ZipWriter::new(writer);
    let options = zip::write::SimpleFileOptions::default()
        .compression_method(zip::CompressionMethod::Deflated)
        .last_modified_time(zip::DateTime::default())
        .unix_permissions(0o644);
    let mut sorted: Vec<&GeneratedFile> = files.iter().collect();
    sorted.sort_by(|a, b| a.path.cmp(&b.path));
    for f in sorted {
        zip.start_file(f.path.as_str(), options)?;
        zip.write_all(f.contents.as_bytes())?;
    }
    zip.finish()
}

fn docstring_literal(text: &str, indent: &str) -> Option<String> {
    let text = text.trim_end();
    if text.trim().is_empty() {
        return None;
    }
    let mut body = text.replace('\\', "\\\\").replace("\"\"\"", "\\\"\\\"\\\"");
    if body.ends_with('"') {
        body.pop();
        body.push_str("\\\"");
    }
    let mut out = String::new();
    let mut lines = body.lines();
    out.push_str(&format!("{indent}\"\"\"{}", lines.next().unwrap_or_default()));
    let rest: Vec<&str> = lines.collect();
    if rest.is_empty() {
        out.push_str("\"\"\"\n");
    } else {
        out.push('\n');
        for l in rest {
            if l.is_empty() {
                out.push('\n');
            } else {
                out.push_str(&format!("{indent}{l}\n"));
            }
        }
        out.push_str(&format!("{indent}\"\"\"\n"));
    }
    Some(out)
}

struct ModuleWriter<'a> {
    unit: &'a AdapterUnit,
    module: &'a AdapterModule,
    /// Original module -> alias, assigned in sorted order.
    aliases: BTreeMap<QualifiedName, String>,
}

fn dotted_name_root(text: &str) -> Option<&str> {
    let mut parts = text.split('.');
    let root = parts.next()?;
    (is_identifier(root) && parts.all(is_identifier)).then_some(root)
}

impl<'a> ModuleWriter<'a> {
    fn new(unit: &'a AdapterUnit, module: &'a AdapterModule) -> Self {
        let mut needed = BTreeSet::new();
        let all_functions = module
            .classes
            .iter()
            .flat_map(|c| std::iter::once(&c.init).chain(&c.methods))
            .chain(&module.functions);
        for f in all_functions {
            match &f.call.target {
                CallTarget::Function { module, .. } | CallTarget::Constructor { module, .. } | CallTarget::ClassAttr { module, .. } => {
                    needed.insert(module.clone());
                }
                CallTarget::Method { .. } | CallTarget::Property { .. } => {}
            }
            for p in &f.params {
                if let Some(ParamDefault::Source { text, module }) = &p.default {
                    if dotted_name_root(text).is_some_and(|r| !BUILTINS.contains(&r)) {
                        needed.insert(module.clone());
                    }
                }
            }
        }
        for g in &module.groups {
            for p in &g.fields {
                if let Some(ParamDefault::Source { text, module }) = &p.default {
                    if dotted_name_root(text).is_some_and(|r| !BUILTINS.contains(&r)) {
                        needed.insert(module.clone());
                    }
                }
            }
        }
        let mut aliases = BTreeMap::new();
        let mut taken = BTreeSet::new();
        for q in needed {
            let base = format!("_orig_{}", q.segments().join("_"));
            let mut alias = base.clone();
            let mut n = 2;
            while !taken.insert(alias.clone()) {
                alias = format!("{base}_{n}");
                n += 1;
            }
            aliases.insert(q, alias);
        }
        ModuleWriter { unit, module, aliases }
    }

    fn alias(&self, q: &QualifiedName) -> &str {
        &self.aliases[q]
    }

    fn finish(&self) -> String {
        let mut out = header(self.unit);
        let m = self.module;
        let mut imports = String::new();
        if !m.enums.is_empty() {
            imports.push_str("import enum as _enum\n");
        }
        for (q, alias) in &self.aliases {
            let _ = writeln!(imports, "import {} as {alias}", q.dotted());
        }
        if !imports.is_empty() {
            out.push('\n');
            out.push_str(&imports);
        }
        let mut blocks: Vec<String> = Vec::new();
        blocks.extend(m.enums.iter().map(|e| self.enum_def(e)));
        blocks.extend(m.groups.iter().map(|g| self.group(g)));
        blocks.extend(m.classes.iter().map(|c| self.class(c)));
        blocks.extend(m.functions.iter().map(|f| self.function(f, "")));
        for b in blocks {
            out.push_str("\n\n");
            out.push_str(&b);
        }
        if !m.reexports.is_empty() {
            out.push_str("\n\n");
            for r in &m.reexports {
                let (module, name) = r.resolved.as_ref().expect("post-processed");
                let from = self.unit.adapted_module(module);
                if *name == r.name {
                    let _ = writeln!(out, "from {from} import {name}");
                } else {
                    let _ = writeln!(out, "from {from} import {name} as {}", r.name);
                }
            }
        }
        out
    }

    fn enum_def(&self, e: &EnumDef) -> String {
        let mut s = format!("class {}(_enum.Enum):\n", e.name);
        for m in &e.members {
            let _ = writeln!(s, "    {} = {}", m.name, quote_string(&m.value));
        }
        s
    }

    fn group(&self, g: &GroupClass) -> String {
        let mut s = format!("class {}:\n", g.name);
        let _ = writeln!(s, "    def __init__(self, {}):", self.params(&g.fields));
        for p in &g.fields {
            let _ = writeln!(s, "        self.{0} = {0}", p.name);
        }
        s
    }

    fn class(&self, c: &AdapterClass) -> String {
        let mut s = format!("class {}:\n", c.name);
        if let Some(doc) = docstring_literal(&c.docstring.text, "    ") {
            s.push_str(&doc);
            s.push('\n');
        }
        s.push_str(&self.function(&c.init, "    "));
        for f in &c.methods {
            s.push('\n');
            s.push_str(&self.function(f, "    "));
        }
        s
    }

    fn default(&self, d: &ParamDefault) -> String {
        match d {
            ParamDefault::Literal(v) => v.canonical_text().to_string(),
            ParamDefault::EnumMember { enum_name, member } => format!("{enum_name}.{member}"),
            ParamDefault::Source { text, module } => match dotted_name_root(text) {
                Some(root) if !BUILTINS.contains(&root) => format!("{}.{text}", self.alias(module)),
                _ => text.clone(),
            },
        }
    }

    fn params(&self, params: &[AdapterParam]) -> String {
        let mut parts: Vec<String> = Vec::new();
        let last_pos_only = params.iter().rposition(|p| p.kind == ParameterKind::PositionalOnly);
        let has_var_pos = params.iter().any(|p| p.kind == ParameterKind::VariadicPositional);
        for (i, p) in params.iter().enumerate() {
            if p.kind == ParameterKind::KeywordOnly && !has_var_pos && !parts.iter().any(|x| x == "*") {
                parts.push("*".into());
            }
            let mut t = match p.kind {
                ParameterKind::VariadicPositional => format!("*{}", p.name),
                ParameterKind::VariadicKeyword => format!("**{}", p.name),
                _ => p.name.clone(),
            };
            match (&p.hint, &p.default) {
                (Some(h), Some(d)) => t.push_str(&format!(": {h} = {}", self.default(d))),
                (Some(h), None) => t.push_str(&format!(": {h}")),
                (None, Some(d)) => t.push_str(&format!("={}", self.default(d))),
                (None, None) => {}
            }
            parts.push(t);
            if Some(i) == last_pos_only {
                parts.push("/".into());
            }
        }
        parts.join(", ")
    }

    fn arg(&self, a: &CallArg) -> String {
        match &a.value {
            ArgValue::Ref(r) => r.expr(),
            ArgValue::Constant(v) => v.canonical_text().to_string(),
            ArgValue::EnumValue { value, nullable: false } => format!("{}.value", value.expr()),
            ArgValue::EnumValue { value, nullable: true } => {
                let e = value.expr();
                format!("None if {e} is None else {e}.value")
            }
        }
    }

    fn call_args(&self, call: &Call) -> String {
        let var_pos = call.args.iter().any(|a| a.kind == ParameterKind::VariadicPositional);
        call.args
            .iter()
            .map(|a| {
                let v = self.arg(a);
                match a.kind {
                    ParameterKind::PositionalOnly => v,
                    ParameterKind::PositionalOrKeyword if var_pos => v,
                    ParameterKind::PositionalOrKeyword | ParameterKind::KeywordOnly => format!("{}={v}", a.name),
                    ParameterKind::VariadicPositional => format!("*{v}"),
                    ParameterKind::VariadicKeyword => format!("**{v}"),
                }
            })
            .collect::<Vec<_>>()
            .join(", ")
    }

    fn check(&self, c: &Check, indent: &str) -> Option<String> {
        let x = c.value.expr();
        let lo = c.min.map(|v| (number_text(v), if c.min_exclusive { "<" } else { "<=" }));
        let hi = c.max.map(|v| (number_text(v), if c.max_exclusive { "<" } else { "<=" }));
        let cond = match (lo, hi) {
            (Some((l, lop)), Some((h, hop))) => format!("{l} {lop} {x} {hop} {h}"),
            (Some((l, lop)), None) => format!("{x} {} {l}", if lop == "<" { ">" } else { ">=" }),
            (None, Some((h, hop))) => format!("{x} {hop} {h}"),
            (None, None) => return None,
        };
        let guard = if c.allow_none { format!("{x} is not None and not ({cond})") } else { format!("not ({cond})") };
        let message = format!("{x} must be in {}", interval_notation(c.min, c.min_exclusive, c.max, c.max_exclusive));
        Some(format!("{indent}if {guard}:\n{indent}    raise ValueError({})\n", quote_string(&message)))
    }

    fn function(&self, f: &AdapterFunction, indent: &str) -> String {
        let mut s = String::new();
        match f.kind {
            FunctionKind::Static => s.push_str(&format!("{indent}@staticmethod\n")),
            FunctionKind::Class => s.push_str(&format!("{indent}@classmethod\n")),
            FunctionKind::Property => s.push_str(&format!("{indent}@property\n")),
            _ => {}
        }
        let receiver = match f.kind {
            FunctionKind::Init | FunctionKind::Instance | FunctionKind::Property => Some("self"),
            FunctionKind::Class => Some("cls"),
            FunctionKind::Static | FunctionKind::Function => None,
        };
        let params = self.params(&f.params);
        let sig = match (receiver, params.is_empty()) {
            (Some(r), true) => r.to_string(),
            (Some(r), false) => format!("{r}, {params}"),
            (None, _) => params,
        };
        let _ = writeln!(s, "{indent}def {}({sig}):", f.name);
        let body = format!("{indent}    ");
        if let Some(doc) = docstring_literal(&f.docstring.text, &body) {
            s.push_str(&doc);
        }
        for c in &f.checks {
            if let Some(text) = self.check(c, &body) {
                s.push_str(&text);
            }
        }
        let args = self.call_args(&f.call);
        let stmt = match &f.call.target {
            CallTarget::Function { module, name } => format!("return {}.{name}({args})", self.alias(module)),
            CallTarget::Constructor { module, class } => format!("self._wrapped = {}.{class}({args})", self.alias(module)),
            CallTarget::Method { name } => format!("return self._wrapped.{name}({args})"),
            CallTarget::ClassAttr { module, class, name } => format!("return {}.{class}.{name}({args})", self.alias(module)),
            CallTarget::Property { name } => format!("return self._wrapped.{name}"),
        };
        let _ = writeln!(s, "{body}{stmt}");
        s
    }
}
