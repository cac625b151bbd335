use std::collections::BTreeMap;

use super::*;
use crate::docstring::rewrite_parameter_entries;

fn is_positional(k: ParameterKind) -> bool {
    matches!(k, ParameterKind::PositionalOnly | ParameterKind::PositionalOrKeyword)
}

/// Stable partition of the positional parameters so that required ones come
/// first. Positional-only parameters that would end up behind a
/// positional-or-keyword one lose their positional-only marker.
fn reorder(params: &mut Vec<AdapterParam>) {
    let n = params.iter().take_while(|p| is_positional(p.kind)).count();
    let (required, optional): (Vec<_>, Vec<_>) = params.drain(..n).partition(|p| p.default.is_none());
    let mut head: Vec<AdapterParam> = required.into_iter().chain(optional).collect();
    let broken = head.windows(2).any(|w| w[0].kind == ParameterKind::PositionalOrKeyword && w[1].kind == ParameterKind::PositionalOnly);
    if broken {
        for p in &mut head {
            p.kind = ParameterKind::PositionalOrKeyword;
        }
    }
    params.splice(0..0, head);
}

fn finish_doc(doc: &mut DocText) {
    if !doc.replaced {
        let removed: Vec<&str> = doc.removed.iter().map(String::as_str).collect();
        let renamed: Vec<(&str, &str)> = doc.renamed.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        doc.text = rewrite_parameter_entries(&doc.text, &removed, &renamed);
    }
    if !doc.notes.is_empty() {
        let notes = doc.notes.join("\n");
        doc.text = if doc.text.trim().is_empty() { notes } else { format!("{}\n\n{notes}", doc.text.trim_end()) };
    }
    doc.removed.clear();
    doc.renamed.clear();
    doc.notes.clear();
}

fn finish_function(f: &mut AdapterFunction, enums: &mut Vec<(EnumDef, String)>, groups: &mut Vec<(GroupClass, String)>) {
    reorder(&mut f.params);
    finish_doc(&mut f.docstring);
    for e in f.enums.drain(..) {
        enums.push((e, f.original.dotted()));
    }
    for mut g in f.groups.drain(..) {
        reorder(&mut g.fields);
        groups.push((g, f.original.dotted()));
    }
}

/// Reorders signatures, prunes docstrings, hoists enums and parameter
/// objects into their modules, resolves re-exports and checks that no two
/// generated names collide.
pub fn post_process(mut unit: AdapterUnit) -> Result<AdapterUnit, EmitBlocked> {
    let mut collisions = Vec::new();
    for m in &mut unit.modules {
        let mut enums = Vec::new();
        let mut groups = Vec::new();
        for c in &mut m.classes {
            if !c.docstring.replaced {
                c.docstring.removed.extend(c.init.docstring.removed.iter().cloned());
                c.docstring.renamed.extend(c.init.docstring.renamed.iter().cloned());
            }
            finish_doc(&mut c.docstring);
            for f in std::iter::once(&mut c.init).chain(c.methods.iter_mut()) {
                finish_function(f, &mut enums, &mut groups);
            }
        }
        for f in &mut m.functions {
            finish_function(f, &mut enums, &mut groups);
        }
        // Identical definitions coming from inherited copies merge.
        for (e, _) in enums {
            if !m.enums.contains(&e) {
                m.enums.push(e);
            }
        }
        for (g, _) in groups {
            if !m.groups.contains(&g) {
                m.groups.push(g);
            }
        }
    }

    // Where every class and module-level function ended up.
    let mut location: BTreeMap<QualifiedName, (QualifiedName, String)> = BTreeMap::new();
    for m in &unit.modules {
        for c in &m.classes {
            location.insert(c.original.clone(), (m.qname.clone(), c.name.clone()));
        }
        for f in &m.functions {
            location.insert(f.original.clone(), (m.qname.clone(), f.name.clone()));
        }
    }
    for m in &mut unit.modules {
        let here = m.qname.clone();
        m.reexports.retain_mut(|r| {
            let Some((module, name)) = location.get(&r.target) else { return false };
            if r.name == r.target.name() {
                r.name = name.clone();
            }
            if *module == here && r.name == *name {
                return false;
            }
            r.resolved = Some((module.clone(), name.clone()));
            true
        });
    }

    for m in &unit.modules {
        let mut names: BTreeMap<&str, Vec<String>> = BTreeMap::new();
        for e in &m.enums {
            names.entry(&e.name).or_default().push(format!("enum {}", e.name));
        }
        for g in &m.groups {
            names.entry(&g.name).or_default().push(format!("parameter object {}", g.name));
        }
        for c in &m.classes {
            names.entry(&c.name).or_default().push(format!("class {}", c.original));
            let mut members: BTreeMap<&str, Vec<String>> = BTreeMap::new();
            for f in std::iter::once(&c.init).chain(&c.methods) {
                members.entry(&f.name).or_default().push(format!("method {}", f.original));
                params_collide(f, &m.qname, &mut collisions);
            }
            for (name, claimants) in members {
                if claimants.len() > 1 {
                    collisions.push(Collision { module: m.qname.clone(), name: format!("{}.{name}", c.name), claimants });
                }
            }
        }
        for f in &m.functions {
            names.entry(&f.name).or_default().push(format!("function {}", f.original));
            params_collide(f, &m.qname, &mut collisions);
        }
        for r in &m.reexports {
            names.entry(&r.name).or_default().push(format!("re-export of {}", r.target));
        }
        for (name, claimants) in names {
            if claimants.len() > 1 {
                collisions.push(Collision { module: m.qname.clone(), name: name.to_string(), claimants });
            }
        }
    }
    if collisions.is_empty() {
        Ok(unit)
    } else {
        Err(EmitBlocked { collisions })
    }
}

fn params_collide(f: &AdapterFunction, module: &QualifiedName, out: &mut Vec<Collision>) {
    let mut seen: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    for p in &f.params {
        seen.entry(&p.name).or_default().push(p.original.clone().unwrap_or_else(|| p.name.clone()));
    }
    if matches!(f.kind, FunctionKind::Init | FunctionKind::Instance | FunctionKind::Property) {
        seen.entry("self").or_default().push("receiver".into());
    }
    if f.kind == FunctionKind::Class {
        seen.entry("cls").or_default().push("receiver".into());
    }
    for (name, claimants) in seen {
        if claimants.len() > 1 {
            out.push(Collision { module: module.clone(), name: format!("{}({name})", f.name), claimants });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(name: &str, kind: ParameterKind, default: Option<i128>) -> AdapterParam {
        AdapterParam {
            name: name.into(),
            original: Some(name.into()),
            kind,
            default: default.map(|v| ParamDefault::Literal(LiteralValue::int(v))),
            hint: None,
        }
    }

    fn names(ps: &[AdapterParam]) -> Vec<&str> {
        ps.iter().map(|p| p.name.as_str()).collect()
    }

    #[test]
    fn stable_partition_of_positionals() {
        use ParameterKind::*;
        let mut ps = vec![p("a", PositionalOrKeyword, Some(0)), p("b", PositionalOrKeyword, None), p("c", PositionalOrKeyword, Some(1)), p("d", PositionalOrKeyword, None), p("k", KeywordOnly, None)];
        reorder(&mut ps);
        assert_eq!(names(&ps), ["b", "d", "a", "c", "k"]);
    }

    #[test]
    fn keyword_only_order_is_free() {
        use ParameterKind::*;
        let mut ps = vec![p("x", PositionalOrKeyword, None), p("k", KeywordOnly, Some(0)), p("j", KeywordOnly, None)];
        reorder(&mut ps);
        assert_eq!(names(&ps), ["x", "k", "j"]);
    }

    #[test]
    fn positional_only_marker_dropped_when_needed() {
        use ParameterKind::*;
        let mut ps = vec![p("a", PositionalOnly, Some(0)), p("b", PositionalOrKeyword, None)];
        reorder(&mut ps);
        assert_eq!(names(&ps), ["b", "a"]);
        assert!(ps.iter().all(|p| p.kind == PositionalOrKeyword));
        let mut ok = vec![p("a", PositionalOnly, None), p("b", PositionalOrKeyword, Some(1))];
        reorder(&mut ok);
        assert_eq!(ok[0].kind, PositionalOnly);
    }
}
