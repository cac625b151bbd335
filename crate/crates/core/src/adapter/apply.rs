use super::*;
use crate::annotation::{Annotation, Payload};

fn rank(kind: AnnotationKind) -> u8 {
    match kind {
        AnnotationKind::Remove => 0,
        AnnotationKind::ReplaceWithConstant => 1,
        AnnotationKind::ReplaceWithEnum => 2,
        AnnotationKind::AddBoundsCheck => 3,
        AnnotationKind::MakeOptional | AnnotationKind::MakeRequired => 4,
        AnnotationKind::Group => 5,
        AnnotationKind::Rename => 6,
        AnnotationKind::Move => 7,
        AnnotationKind::DependencyNote => 8,
        AnnotationKind::DocstringOverride => 9,
    }
}

fn err(a: &Annotation, message: impl Into<String>) -> ApplyError {
    ApplyError { target: a.target.clone(), kind: a.kind(), message: message.into() }
}

fn all_functions(unit: &mut AdapterUnit) -> impl Iterator<Item = &mut AdapterFunction> {
    unit.modules.iter_mut().flat_map(|m| {
        m.classes
            .iter_mut()
            .flat_map(|c| std::iter::once(&mut c.init).chain(c.methods.iter_mut()))
            .chain(m.functions.iter_mut())
    })
}

fn rewrite_refs(f: &mut AdapterFunction, mut map: impl FnMut(&ValueRef) -> Option<ValueRef>) {
    let mut fix = |r: &mut ValueRef| {
        if let Some(n) = map(r) {
            *r = n;
        }
    };
    for a in &mut f.call.args {
        match &mut a.value {
            ArgValue::Ref(r) | ArgValue::EnumValue { value: r, .. } => fix(r),
            ArgValue::Constant(_) => {}
        }
    }
    for c in &mut f.checks {
        fix(&mut c.value);
    }
}

/// Runs `op` on the wrapper parameter for `a.target` in every wrapper of
/// its function. Parameters that earlier annotations took out of the
/// signature are an error.
fn with_param(
    unit: &mut AdapterUnit,
    a: &Annotation,
    mut op: impl FnMut(&mut AdapterFunction, usize) -> Result<(), ApplyError>,
) -> Result<(), ApplyError> {
    let Some(function) = a.target.parent() else { return Ok(()) };
    let name = a.target.name();
    for f in all_functions(unit).filter(|f| f.original == function) {
        match f.params.iter().position(|p| p.original.as_deref() == Some(name)) {
            Some(i) => op(f, i)?,
            None if f.deleted.iter().any(|d| d == name) => {
                return Err(err(a, "the parameter was already taken out of the signature by another annotation"));
            }
            None => return Err(err(a, "the wrapper has no such parameter")),
        }
    }
    Ok(())
}

fn call_arg<'f>(f: &'f mut AdapterFunction, original: &str) -> &'f mut CallArg {
    f.call.args.iter_mut().find(|c| c.name == original).expect("every original parameter has an argument")
}

/// Applies active annotations in a fixed kind order. Annotations inside a
/// removed class or function are skipped, as are targets that have no
/// wrapper (private declarations).
pub fn apply_annotations(mut unit: AdapterUnit, set: &AnnotationSet, model: &ApiModel) -> Result<AdapterUnit, ApplyError> {
    let removed = set.removed();
    let mut anns: Vec<&Annotation> = set.active().collect();
    anns.sort_by_key(|a| rank(a.kind()));
    for a in anns {
        if let Some(parent) = a.target.parent() {
            if removed.covers(&parent) {
                continue;
            }
        }
        if a.kind() != AnnotationKind::Remove && removed.covers(&a.target) {
            continue;
        }
        apply_one(&mut unit, a, model)?;
    }
    Ok(unit)
}

fn apply_one(unit: &mut AdapterUnit, a: &Annotation, model: &ApiModel) -> Result<(), ApplyError> {
    let target = &a.target;
    match &a.payload {
        Payload::Remove {} => {
            for m in &mut unit.modules {
                m.classes.retain(|c| &c.original != target);
                m.functions.retain(|f| &f.original != target);
                for c in &mut m.classes {
                    c.methods.retain(|f| &f.original != target);
                }
            }
        }
        Payload::ReplaceWithConstant { value } => with_param(unit, a, |f, i| {
            let p = f.params.remove(i);
            let original = p.original.expect("matched by original name");
            call_arg(f, &original).value = ArgValue::Constant(value.clone());
            f.docstring.removed.push(p.name);
            f.deleted.push(original);
            Ok(())
        })?,
        Payload::ReplaceWithEnum { enum_name, members } => with_param(unit, a, |f, i| {
            let p = &mut f.params[i];
            let nullable = match &p.default {
                None => false,
                Some(ParamDefault::Literal(v)) if *v == LiteralValue::none() => true,
                Some(ParamDefault::Literal(v)) => {
                    let member = v.as_str().and_then(|s| members.iter().find(|m| m.value == s));
                    let Some(member) = member else {
                        return Err(err(a, format!("default {v} is not one of the enum values")));
                    };
                    p.default = Some(ParamDefault::EnumMember { enum_name: enum_name.clone(), member: member.name.clone() });
                    false
                }
                Some(_) => return Err(err(a, "a non-literal default cannot be mapped to an enum member")),
            };
            p.hint = Some(enum_name.clone());
            let original = p.original.clone().expect("matched by original name");
            let arg = call_arg(f, &original);
            if let ArgValue::Ref(r) = &arg.value {
                arg.value = ArgValue::EnumValue { value: r.clone(), nullable };
            }
            let def = EnumDef { name: enum_name.clone(), members: members.clone() };
            if !f.enums.contains(&def) {
                f.enums.push(def);
            }
            Ok(())
        })?,
        Payload::AddBoundsCheck { min, min_exclusive, max, max_exclusive } => with_param(unit, a, |f, i| {
            let p = &f.params[i];
            let allow_none = p.default == Some(ParamDefault::Literal(LiteralValue::none()));
            f.checks.push(Check {
                value: ValueRef::Param(p.name.clone()),
                min: *min,
                min_exclusive: *min_exclusive,
                max: *max,
                max_exclusive: *max_exclusive,
                allow_none,
            });
            Ok(())
        })?,
        Payload::MakeOptional { default } => with_param(unit, a, |f, i| {
            let p = &mut f.params[i];
            p.default = Some(match (&p.hint, f.enums.iter().find(|e| Some(&e.name) == p.hint.as_ref())) {
                (Some(_), Some(e)) if *default != LiteralValue::none() => {
                    let member = default.as_str().and_then(|s| e.members.iter().find(|m| m.value == s));
                    let Some(member) = member else {
                        return Err(err(a, format!("default {default} is not one of the enum values")));
                    };
                    ParamDefault::EnumMember { enum_name: e.name.clone(), member: member.name.clone() }
                }
                _ => ParamDefault::Literal(default.clone()),
            });
            Ok(())
        })?,
        Payload::MakeRequired {} => with_param(unit, a, |f, i| {
            f.params[i].default = None;
            Ok(())
        })?,
        Payload::Group { group_class_name, parameter_names, new_parameter_name } => {
            for f in all_functions(unit).filter(|f| &f.original == target) {
                group(f, a, group_class_name, parameter_names, new_parameter_name)?;
            }
        }
        Payload::Rename { new_name } => {
            match model.element(target).map(|e| e.kind()) {
                Some(crate::model::ElementKind::Parameter) => with_param(unit, a, |f, i| {
                    let old = std::mem::replace(&mut f.params[i].name, new_name.clone());
                    rewrite_refs(f, |r| match r {
                        ValueRef::Param(p) if *p == old => Some(ValueRef::Param(new_name.clone())),
                        _ => None,
                    });
                    f.docstring.renamed.push((old, new_name.clone()));
                    Ok(())
                })?,
                _ => {
                    for m in &mut unit.modules {
                        for c in m.classes.iter_mut().filter(|c| &c.original == target) {
                            c.name = new_name.clone();
                        }
                    }
                    for f in all_functions(unit).filter(|f| &f.original == target) {
                        f.name = new_name.clone();
                    }
                }
            }
        }
        Payload::Move { new_module } => {
            let mut classes = Vec::new();
            let mut functions = Vec::new();
            for m in &mut unit.modules {
                let (moved, kept): (Vec<_>, Vec<_>) = m.classes.drain(..).partition(|c| &c.original == target);
                m.classes = kept;
                classes.extend(moved);
                let (moved, kept): (Vec<_>, Vec<_>) = m.functions.drain(..).partition(|f| &f.original == target);
                m.functions = kept;
                functions.extend(moved);
            }
            if classes.is_empty() && functions.is_empty() {
                return Ok(());
            }
            let idx = match unit.modules.iter().position(|m| &m.qname == new_module) {
                Some(i) => i,
                None => {
                    unit.modules.push(AdapterModule {
                        qname: new_module.clone(),
                        enums: Vec::new(),
                        groups: Vec::new(),
                        classes: Vec::new(),
                        functions: Vec::new(),
                        reexports: Vec::new(),
                    });
                    unit.modules.len() - 1
                }
            };
            unit.modules[idx].classes.extend(classes);
            unit.modules[idx].functions.extend(functions);
        }
        Payload::DependencyNote { depends_on, condition_text } => {
            // Advisory: parameters no longer in the signature get no note.
            let Some(function) = target.parent() else { return Ok(()) };
            for f in all_functions(unit).filter(|f| f.original == function) {
                let current = |orig: &str| f.params.iter().find(|p| p.original.as_deref() == Some(orig)).map(|p| p.name.clone());
                let Some(name) = current(target.name()) else { continue };
                let other = current(depends_on).unwrap_or_else(|| depends_on.clone());
                f.docstring.notes.push(format!("`{name}` depends on `{other}`: {condition_text}"));
            }
        }
        Payload::DocstringOverride { text } => {
            let doc = DocText { text: text.clone(), replaced: true, ..Default::default() };
            for m in &mut unit.modules {
                for c in m.classes.iter_mut().filter(|c| &c.original == target) {
                    c.docstring = doc.clone();
                }
            }
            for f in all_functions(unit).filter(|f| &f.original == target) {
                f.docstring = doc.clone();
            }
        }
    }
    Ok(())
}

fn group(f: &mut AdapterFunction, a: &Annotation, class_name: &str, names: &[String], new_name: &str) -> Result<(), ApplyError> {
    let mut fields = Vec::new();
    let mut at = None;
    for n in names {
        let Some(i) = f.params.iter().position(|p| p.original.as_deref() == Some(n.as_str())) else {
            return Err(err(a, format!("parameter `{n}` is no longer in the signature")));
        };
        at = Some(at.map_or(i, |j: usize| j.min(i)));
        fields.push(f.params[i].clone());
    }
    let at = at.expect("groups have parameters");
    let kind = if f.params[at].kind == ParameterKind::KeywordOnly { ParameterKind::KeywordOnly } else { ParameterKind::PositionalOrKeyword };
    let grouped: Vec<String> = fields.iter().map(|p| p.name.clone()).collect();
    f.params.retain(|p| !grouped.contains(&p.name));
    f.params.insert(at.min(f.params.len()), AdapterParam { name: new_name.to_string(), original: None, kind, default: None, hint: None });
    rewrite_refs(f, |r| match r {
        ValueRef::Param(p) if grouped.contains(p) => Some(ValueRef::Field { param: new_name.to_string(), field: p.clone() }),
        _ => None,
    });
    for p in &mut fields {
        p.kind = ParameterKind::PositionalOrKeyword;
        f.deleted.push(p.original.clone().expect("grouped parameters are original"));
    }
    f.docstring.notes.push(format!("`{}` are passed as fields of `{new_name}` ({class_name}).", grouped.join("`, `")));
    f.groups.push(GroupClass { name: class_name.to_string(), fields });
    Ok(())
}
