//! Structured docstrings.
//!
//! Numpydoc is parsed structurally: a section is a title line underlined with
//! dashes, and entries in `Parameters` read `name : type, default=value` with
//! an indented description below. Other formats degrade to a summary plus a
//! `format_unrecognized` marker section.

use serde::{Deserialize, Serialize};

/// Title of the marker section added when the format is not Numpydoc.
pub const FORMAT_UNRECOGNIZED: &str = "format_unrecognized";

const PARAMETER_SECTIONS: &[&str] = &["Parameters", "Other Parameters"];

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Docstring {
    pub summary: String,
    pub parameter_docs: Vec<ParamDoc>,
    pub other_sections: Vec<Section>,
    /// Cleaned full text, kept so generated code can reproduce it.
    pub text: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamDoc {
    pub name: String,
    pub type_text: String,
    pub default_text: String,
    pub description: String,
    /// Documented but absent from the signature.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub orphaned: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Section {
    pub title: String,
    pub body: String,
}

impl Docstring {
    pub fn is_empty(&self) -> bool {
        self.text.is_empty()
    }

    pub fn param(&self, name: &str) -> Option<&ParamDoc> {
        self.parameter_docs.iter().find(|p| p.name == name)
    }

    pub fn format_unrecognized(&self) -> bool {
        self.other_sections.iter().any(|s| s.title == FORMAT_UNRECOGNIZED)
    }

    /// Flags entries whose name is not in `declared`.
    pub fn flag_orphans<'a>(&mut self, declared: impl IntoIterator<Item = &'a str> + Clone) {
        for doc in &mut self.parameter_docs {
            doc.orphaned = !declared.clone().into_iter().any(|n| n == doc.name);
        }
    }
}

/// Same normalization as `inspect.cleandoc`.
pub fn clean_docstring(raw: &str) -> String {
    let expanded = raw.replace('\t', "        ");
    let lines: Vec<&str> = expanded.lines().collect();
    if lines.is_empty() {
        return String::new();
    }
    let margin = lines[1..].iter().filter(|l| !l.trim().is_empty()).map(|l| indent_of(l)).min().unwrap_or(0);
    let mut out: Vec<String> = Vec::with_capacity(lines.len());
    out.push(lines[0].trim_start().to_string());
    for line in &lines[1..] {
        out.push(dedent(line, margin).trim_end().to_string());
    }
    if let Some(first) = out.first_mut() {
        *first = first.trim_end().to_string();
    }
    while out.first().is_some_and(|l| l.is_empty()) {
        out.remove(0);
    }
    while out.last().is_some_and(|l| l.is_empty()) {
        out.pop();
    }
    out.join("\n")
}

/// Leading whitespace, in characters.
fn indent_of(line: &str) -> usize {
    line.chars().take_while(|c| c.is_whitespace()).count()
}

/// Drops up to `n` leading whitespace characters.
fn dedent(line: &str, n: usize) -> &str {
    let cut = line
        .char_indices()
        .take_while(|(_, c)| c.is_whitespace())
        .take(n)
        .last()
        .map_or(0, |(i, c)| i + c.len_utf8());
    &line[cut..]
}

fn is_underline(line: &str) -> bool {
    let t = line.trim();
    t.len() >= 3 && t.chars().all(|c| c == '-')
}

/// Start line indices of Numpydoc section titles.
fn section_starts(lines: &[&str]) -> Vec<usize> {
    let mut starts = Vec::new();
    for i in 0..lines.len().saturating_sub(1) {
        let title = lines[i].trim();
        if !title.is_empty()
            && !is_underline(title)
            && indent_of(lines[i]) == 0
            && is_underline(lines[i + 1])
            && indent_of(lines[i + 1]) == 0
        {
            starts.push(i);
        }
    }
    starts
}

fn looks_like_other_format(text: &str) -> bool {
    text.lines().any(|l| {
        let t = l.trim();
        t.starts_with(":param") || t.starts_with(":type") || t.starts_with("@param")
            || matches!(t, "Args:" | "Arguments:" | "Parameters:" | "Returns:" | "Raises:" | "Keyword Args:")
    })
}

/// Parses a raw docstring. Total: any input yields a `Docstring`.
pub fn parse_docstring(raw: &str) -> Docstring {
    let text = clean_docstring(raw);
    let lines: Vec<&str> = text.lines().collect();
    let starts = section_starts(&lines);
    if starts.is_empty() {
        let mut doc = Docstring { summary: text.clone(), text, ..Default::default() };
        if looks_like_other_format(&doc.text) {
            doc.other_sections.push(Section { title: FORMAT_UNRECOGNIZED.into(), body: String::new() });
        }
        return doc;
    }
    let summary = lines[..starts[0]].join("\n").trim().to_string();
    let mut doc = Docstring { summary, text: text.clone(), ..Default::default() };
    for (k, &start) in starts.iter().enumerate() {
        let end = starts.get(k + 1).copied().unwrap_or(lines.len());
        let title = lines[start].trim().to_string();
        let body_lines = &lines[start + 2..end];
        if PARAMETER_SECTIONS.contains(&title.as_str()) {
            for entry in parameter_entries(body_lines) {
                doc.parameter_docs.extend(entry.docs);
            }
        } else {
            let body = body_lines.join("\n").trim_end().to_string();
            doc.other_sections.push(Section { title, body });
        }
    }
    doc
}

struct Entry {
    /// Range of lines (relative to the section body) this entry occupies.
    first: usize,
    last: usize,
    names: Vec<String>,
    docs: Vec<ParamDoc>,
}

/// Splits a Parameters body into entries: a header line at the base
/// indentation followed by deeper-indented description lines.
fn parameter_entries(body: &[&str]) -> Vec<Entry> {
    let Some(base) = body.iter().filter(|l| !l.trim().is_empty()).map(|l| indent_of(l)).min() else {
        return Vec::new();
    };
    let mut entries: Vec<Entry> = Vec::new();
    for (i, line) in body.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        if indent_of(line) == base {
            if let Some((names, type_text, default_text)) = parse_entry_header(line.trim()) {
                let docs = names
                    .iter()
                    .map(|n| ParamDoc {
                        name: n.clone(),
                        type_text: type_text.clone(),
                        default_text: default_text.clone(),
                        ..Default::default()
                    })
                    .collect();
                entries.push(Entry { first: i, last: i, names, docs });
                continue;
            }
        }
        if let Some(entry) = entries.last_mut() {
            entry.last = i;
        }
    }
    for entry in &mut entries {
        let desc_lines: Vec<&str> = body[entry.first + 1..=entry.last].to_vec();
        let margin = desc_lines.iter().filter(|l| !l.trim().is_empty()).map(|l| indent_of(l)).min().unwrap_or(0);
        let description = desc_lines
            .iter()
            .map(|l| if l.trim().is_empty() { "" } else { dedent(l, margin) })
            .collect::<Vec<_>>()
            .join("\n")
            .trim()
            .to_string();
        for d in &mut entry.docs {
            d.description = description.clone();
        }
    }
    entries
}

/// `name : type, default=x` → (names, type_text, default_text).
fn parse_entry_header(line: &str) -> Option<(Vec<String>, String, String)> {
    let (names_part, type_part) = match line.find(':') {
        Some(i) => (&line[..i], line[i + 1..].trim()),
        None => (line, ""),
    };
    let names: Vec<String> = names_part
        .split(',')
        .map(|n| n.trim().trim_start_matches('*').to_string())
        .collect();
    if names.is_empty() || names.iter().any(|n| !crate::qname::is_identifier(n)) {
        return None;
    }
    let (type_text, default_text) = split_type_and_default(type_part);
    Some((names, type_text, default_text))
}

/// Splits at top-level commas and pulls out a `default=...` component.
fn split_type_and_default(type_part: &str) -> (String, String) {
    let mut pieces: Vec<String> = Vec::new();
    let mut depth = 0i32;
    let mut quote: Option<char> = None;
    let mut current = String::new();
    for c in type_part.chars() {
        if let Some(q) = quote {
            if c == q {
                quote = None;
            }
            current.push(c);
            continue;
        }
        match c {
            '\'' | '"' => {
                quote = Some(c);
                current.push(c);
            }
            '{' | '[' | '(' => {
                depth += 1;
                current.push(c);
            }
            '}' | ']' | ')' => {
                depth -= 1;
                current.push(c);
            }
            ',' if depth == 0 => pieces.push(std::mem::take(&mut current)),
            c => current.push(c),
        }
    }
    pieces.push(current);
    let mut type_pieces = Vec::new();
    let mut default_text = String::new();
    for piece in pieces {
        let t = piece.trim();
        let lower = t.to_ascii_lowercase();
        if let Some(rest) = lower.strip_prefix("default") {
            let offset = t.len() - rest.len();
            let value = t[offset..].trim_start_matches([' ', '=', ':']).trim();
            default_text = value.to_string();
        } else if !t.is_empty() {
            type_pieces.push(t.to_string());
        }
    }
    (type_pieces.join(", "), default_text)
}

/// Rewrites a cleaned docstring: entries for `removed` parameters disappear
/// (a Parameters section left empty is dropped) and entries in `renamed`
/// get their new name. Everything else is kept verbatim.
pub fn rewrite_parameter_entries(text: &str, removed: &[&str], renamed: &[(&str, &str)]) -> String {
    if removed.is_empty() && renamed.is_empty() {
        return text.to_string();
    }
    let lines: Vec<&str> = text.lines().collect();
    let starts = section_starts(&lines);
    let mut drop = vec![false; lines.len()];
    let mut replace: Vec<Option<String>> = vec![None; lines.len()];
    for (k, &start) in starts.iter().enumerate() {
        let end = starts.get(k + 1).copied().unwrap_or(lines.len());
        if !PARAMETER_SECTIONS.contains(&lines[start].trim()) {
            continue;
        }
        let body_start = start + 2;
        let entries = parameter_entries(&lines[body_start..end]);
        let mut kept = 0;
        for entry in &entries {
            let remaining: Vec<String> = entry
                .names
                .iter()
                .filter(|n| !removed.contains(&n.as_str()))
                .map(|n| renamed.iter().find(|(old, _)| old == n).map_or(n.clone(), |(_, new)| new.to_string()))
                .collect();
            let first = body_start + entry.first;
            let last = body_start + entry.last;
            if remaining.is_empty() {
                for flag in &mut drop[first..=last] {
                    *flag = true;
                }
                continue;
            }
            kept += 1;
            if remaining != entry.names {
                let line = lines[first];
                let indent = &line[..line.len() - line.trim_start().len()];
                let header = line.trim();
                let rest = header.find(':').map(|i| &header[i..]).unwrap_or("");
                let names = remaining.join(", ");
                let new = if rest.is_empty() { format!("{indent}{names}") } else { format!("{indent}{names} {rest}") };
                replace[first] = Some(new);
            }
        }
        if kept == 0 && !entries.is_empty() {
            for flag in &mut drop[start..end] {
                *flag = true;
            }
        }
    }
    let mut out: Vec<String> = Vec::new();
    for (i, line) in lines.iter().enumerate() {
        if drop[i] {
            continue;
        }
        out.push(replace[i].clone().unwrap_or_else(|| line.to_string()));
    }
    // Collapse blank runs left behind by deletions.
    let mut collapsed: Vec<String> = Vec::new();
    for line in out {
        if line.trim().is_empty() && collapsed.last().is_some_and(|l: &String| l.trim().is_empty()) {
            continue;
        }
        collapsed.push(line);
    }
    while collapsed.last().is_some_and(|l| l.trim().is_empty()) {
        collapsed.pop();
    }
    collapsed.join("\n")
}
