use std::collections::HashSet;

use super::*;
use crate::model::{ClassDecl, DefaultValue, FunctionDecl, Optionality, Parameter};

/// Dunder methods that make no sense on a composition wrapper.
const SKIPPED_DUNDERS: &[&str] = &[
    "__new__",
    "__init_subclass__",
    "__class_getitem__",
    "__getattr__",
    "__getattribute__",
    "__setattr__",
    "__delattr__",
    "__del__",
];

/// One wrapper per public class, function and method, with the original
/// signature and docstring. Inherited methods are copied into each class.
pub fn build_trivial_wrappers(model: &ApiModel) -> AdapterUnit {
    let modules = model
        .modules
        .iter()
        .map(|m| AdapterModule {
            qname: m.qname.clone(),
            enums: Vec::new(),
            groups: Vec::new(),
            classes: m.classes.iter().filter(|c| c.is_public()).map(|c| class(model, c)).collect(),
            functions: m.functions.iter().filter(|f| f.is_public).map(|f| function(f, FunctionKind::Function, None)).collect(),
            reexports: m.reexports.iter().map(|r| AdapterReexport { name: r.name.clone(), target: r.target.clone(), resolved: None }).collect(),
        })
        .collect();
    AdapterUnit {
        library: LibraryRef { name: model.library_name.clone(), version: model.version.clone() },
        package: package_name(&model.library_name),
        modules,
    }
}

fn module_of(q: &QualifiedName) -> QualifiedName {
    q.parent().expect("declarations live in a module")
}

fn class(model: &ApiModel, c: &ClassDecl) -> AdapterClass {
    let module = module_of(&c.qname);
    let constructor = CallTarget::Constructor { module, class: c.name().to_string() };
    let init = match model.find_method(c, "__init__") {
        Some((_, f)) => {
            let mut w = function(f, FunctionKind::Init, None);
            w.call.target = constructor;
            w
        }
        None => {
            let mut w = AdapterFunction {
                name: "__init__".into(),
                original: c.qname.child("__init__"),
                kind: FunctionKind::Init,
                params: Vec::new(),
                checks: Vec::new(),
                call: Call { target: constructor, args: Vec::new() },
                docstring: DocText::default(),
                enums: Vec::new(),
                groups: Vec::new(),
                deleted: Vec::new(),
            };
            if !model.hierarchy_is_closed(c) {
                // The constructor comes from outside the library; pass everything through.
                for (name, kind) in [("args", ParameterKind::VariadicPositional), ("kwargs", ParameterKind::VariadicKeyword)] {
                    w.params.push(AdapterParam { name: name.into(), original: Some(name.into()), kind, default: None, hint: None });
                    w.call.args.push(CallArg { name: name.into(), kind, value: ArgValue::Ref(ValueRef::Param(name.into())) });
                }
            }
            w
        }
    };
    let mut seen = HashSet::new();
    let mut methods = Vec::new();
    for owner in model.ancestry(c) {
        for f in &owner.methods {
            let name = f.name();
            if name == "__init__" || !f.is_public || SKIPPED_DUNDERS.contains(&name) || !seen.insert(name) {
                continue;
            }
            let kind = if has_decorator(f, "staticmethod") {
                FunctionKind::Static
            } else if has_decorator(f, "classmethod") {
                FunctionKind::Class
            } else if has_decorator(f, "property") {
                FunctionKind::Property
            } else {
                FunctionKind::Instance
            };
            methods.push(function(f, kind, Some(c)));
        }
    }
    AdapterClass {
        name: c.name().to_string(),
        original: c.qname.clone(),
        docstring: DocText { text: c.docstring.text.clone(), ..Default::default() },
        init,
        methods,
    }
}

fn has_decorator(f: &FunctionDecl, name: &str) -> bool {
    f.decorators.iter().any(|d| d == name || d.ends_with(&format!(".{name}")))
}

fn param(p: &Parameter, module: &QualifiedName) -> AdapterParam {
    AdapterParam {
        name: p.name.clone(),
        original: Some(p.name.clone()),
        kind: p.kind,
        default: match &p.optionality {
            Optionality::Required => None,
            Optionality::Optional(DefaultValue::Literal(v)) => Some(ParamDefault::Literal(v.clone())),
            Optionality::Optional(d @ DefaultValue::NonLiteral { .. }) => {
                Some(ParamDefault::Source { text: d.source().to_string(), module: module.clone() })
            }
        },
        hint: None,
    }
}

/// `class` is the adapted class for methods, which may differ from the
/// class that declares `f`.
fn function(f: &FunctionDecl, kind: FunctionKind, class: Option<&ClassDecl>) -> AdapterFunction {
    let module = module_of(&f.qname);
    let target = match (kind, class) {
        (FunctionKind::Static | FunctionKind::Class, Some(c)) => CallTarget::ClassAttr {
            module: module_of(&c.qname),
            class: c.name().to_string(),
            name: f.name().to_string(),
        },
        (FunctionKind::Property, _) => CallTarget::Property { name: f.name().to_string() },
        (FunctionKind::Instance, _) => CallTarget::Method { name: f.name().to_string() },
        _ => CallTarget::Function { module: module.clone(), name: f.name().to_string() },
    };
    let params: Vec<AdapterParam> = if kind == FunctionKind::Property { Vec::new() } else { f.parameters.iter().map(|p| param(p, &module)).collect() };
    let args = params
        .iter()
        .map(|p| CallArg { name: p.name.clone(), kind: p.kind, value: ArgValue::Ref(ValueRef::Param(p.name.clone())) })
        .collect();
    AdapterFunction {
        name: f.name().to_string(),
        original: f.qname.clone(),
        kind,
        params,
        checks: Vec::new(),
        call: Call { target, args },
        docstring: DocText { text: f.docstring.text.clone(), ..Default::default() },
        enums: Vec::new(),
        groups: Vec::new(),
        deleted: Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extract::extract_source;

    fn unit(src: &str) -> AdapterUnit {
        let m = ApiModel {
            library_name: "lib".into(),
            version: "1".into(),
            modules: vec![extract_source("m.py", &"lib.m".parse().unwrap(), src).0],
        };
        build_trivial_wrappers(&m)
    }

    #[test]
    fn identity_wrappers() {
        let u = unit("def f(a, b=1): ...\ndef _g(): ...\n");
        assert_eq!(u.package, "lib_adapted");
        let m = &u.modules[0];
        assert_eq!(m.functions.len(), 1);
        let f = &m.functions[0];
        assert_eq!(f.params.iter().map(|p| p.name.as_str()).collect::<Vec<_>>(), ["a", "b"]);
        assert_eq!(f.params[1].default, Some(ParamDefault::Literal(LiteralValue::int(1))));
        assert_eq!(f.call.args.len(), 2);
        assert_eq!(f.call.target, CallTarget::Function { module: "lib.m".parse().unwrap(), name: "f".into() });
    }

    #[test]
    fn classes_are_flattened() {
        let u = unit(
            "class Base:\n    def run(self, x): ...\n    def stop(self): ...\n    def _private(self): ...\nclass Child(Base):\n    def __init__(self, k=2): ...\n    def stop(self, now=True): ...\n    @staticmethod\n    def make(v): ...\n    @property\n    def size(self): ...\n",
        );
        let child = &u.modules[0].classes[1];
        assert_eq!(child.init.params[0].name, "k");
        let names: Vec<(&str, String)> = child.methods.iter().map(|f| (f.name.as_str(), f.original.dotted())).collect();
        assert_eq!(
            names,
            vec![
                ("stop", "lib.m.Child.stop".to_string()),
                ("make", "lib.m.Child.make".to_string()),
                ("size", "lib.m.Child.size".to_string()),
                ("run", "lib.m.Base.run".to_string()),
            ]
        );
        assert_eq!(child.methods[1].kind, FunctionKind::Static);
        assert_eq!(child.methods[2].kind, FunctionKind::Property);
        let base = &u.modules[0].classes[0];
        assert!(base.init.params.is_empty());
    }

    #[test]
    fn external_bases_pass_constructor_arguments_through() {
        let u = unit("class E(Exception): ...\n");
        let kinds: Vec<ParameterKind> = u.modules[0].classes[0].init.params.iter().map(|p| p.kind).collect();
        assert_eq!(kinds, [ParameterKind::VariadicPositional, ParameterKind::VariadicKeyword]);
    }
}
